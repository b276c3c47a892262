//! From a bundle on disk to ranked proposals and their evaluation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EngineConfig;
use crate::evalkit::{self, EvalError, OVERLAP_DEFINITION};
use crate::ingest::{IngestError, MovieBundle};
use crate::model::{build_similarity, normalize_transition, sparsify, ModelError, MovieGraph, SignedSentiment};
use crate::traversal::{
    enumerate_degenerate, enumerate_proposals, rank_proposals, Scorer, TpSets, TrailerPath, TraversalConfig,
    TraversalError,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Traversal(#[from] TraversalError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("proposals were generated for movie `{found}`, bundle is `{expected}`")]
    MovieMismatch { expected: String, found: String },
}

/// A validated bundle with its shot graph, ready for walks.
#[derive(Debug, Clone)]
pub struct PreparedMovie {
    pub bundle: MovieBundle,
    pub graph: MovieGraph,
    pub sentiments: Vec<SignedSentiment>,
    pub tp_sets: TpSets,
}

impl PreparedMovie {
    pub fn new(bundle: MovieBundle, config: &EngineConfig) -> Result<Self, PipelineError> {
        bundle.validate()?;
        let sim = build_similarity(&bundle.shots, &config.similarity)?;
        let graph = sparsify(&normalize_transition(&sim)?, &config.similarity)?;
        let sentiments = bundle.sentiments();
        let tp_sets = bundle.tp_sets(config.tp_set_size);
        Ok(Self {
            bundle,
            graph,
            sentiments,
            tp_sets,
        })
    }

    pub fn scorer<'a>(&'a self, config: &'a TraversalConfig) -> Result<Scorer<'a>, TraversalError> {
        Scorer::new(&self.graph, &self.sentiments, &self.tp_sets, config)
    }

    pub fn is_degenerate(&self) -> bool {
        self.tp_sets.is_degenerate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartMode {
    TurningPoints,
    /// No turning-point scores in the bundle; starts are sampled with the seed.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalReport {
    pub movie_id: String,
    pub mode: StartMode,
    pub config: EngineConfig,
    /// In start order; `duplicate_of` indexes this list.
    pub proposals: Vec<TrailerPath>,
    /// Indices into `proposals`, best first.
    pub ranking: Vec<usize>,
}

impl ProposalReport {
    pub fn best(&self) -> Option<&TrailerPath> {
        self.ranking.first().map(|&i| &self.proposals[i])
    }
}

/// Enumerates and ranks proposals. `seed` overrides the configured start seed.
pub fn generate(movie: &PreparedMovie, config: &EngineConfig, seed: Option<u64>) -> Result<ProposalReport, PipelineError> {
    let mut config = config.clone();
    if let Some(s) = seed {
        config.traversal.rng_seed = s;
    }
    let scorer = movie.scorer(&config.traversal)?;
    let (mode, proposals) = if movie.is_degenerate() {
        (StartMode::Degenerate, enumerate_degenerate(&scorer)?)
    } else {
        (StartMode::TurningPoints, enumerate_proposals(&scorer)?)
    };
    let ranked = rank_proposals(proposals.clone())?;
    let ranking = ranked
        .iter()
        .map(|r| proposals.iter().position(|p| p.start == r.start).expect("ranked from proposals"))
        .collect();
    Ok(ProposalReport {
        movie_id: movie.bundle.movie_id.clone(),
        mode,
        config,
        proposals,
        ranking,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalScore {
    pub start: usize,
    pub shots: Vec<usize>,
    pub tps_covered: Vec<usize>,
    pub accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub movie_id: String,
    pub proposals: Vec<ProposalScore>,
    /// Accuracy of the top-ranked proposal.
    pub accuracy_best: Option<f64>,
    pub pa_at_5: Option<f64>,
    pub pa_at_10: Option<f64>,
    pub overlap_upper_bound: Option<f64>,
    pub overlap_definition: String,
    pub omissions: Vec<String>,
}

/// Scores proposals against the bundle's silver labels, turning-point
/// predictions against gold, and the agreement between official trailers.
pub fn evaluate(bundle: &MovieBundle, report: &ProposalReport) -> Result<EvaluationReport, PipelineError> {
    if bundle.movie_id != report.movie_id {
        return Err(PipelineError::MovieMismatch {
            expected: bundle.movie_id.clone(),
            found: report.movie_id.clone(),
        });
    }
    let mut omissions = Vec::new();
    let labels = bundle.trailer_labels();
    if labels.is_none() {
        omissions.push("accuracy: shots lack silver trailer labels".to_string());
    }
    let proposals = report
        .proposals
        .iter()
        .map(|p| {
            let shots = p.shots();
            let accuracy = match &labels {
                Some(l) => Some(evalkit::trailer_accuracy(&shots, l)?),
                None => None,
            };
            Ok(ProposalScore {
                start: p.start,
                shots,
                tps_covered: p.tps_covered.clone(),
                accuracy,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let accuracy_best = report.ranking.first().and_then(|&i| proposals.get(i)).and_then(|p| p.accuracy);

    let (mut pa_at_5, mut pa_at_10) = (None, None);
    match (&bundle.tp_gold, bundle.has_tp_scores()) {
        (Some(gold), true) => match evalkit::partial_agreement_at_k(&bundle.shots, gold, 5) {
            Ok(v) => {
                pa_at_5 = Some(v);
                pa_at_10 = Some(evalkit::partial_agreement_at_k(&bundle.shots, gold, 10)?);
            }
            Err(EvalError::NoGold) => omissions.push("partial agreement: gold sets are all empty".into()),
            Err(e) => return Err(e.into()),
        },
        _ => omissions.push("partial agreement: needs gold turning points and shot scores".into()),
    }

    let overlap_upper_bound = match &bundle.trailers {
        Some(t) if t.len() >= 2 => Some(evalkit::overlap_upper_bound(t)?),
        _ => {
            omissions.push("overlap: needs at least two official trailers".into());
            None
        }
    };
    Ok(EvaluationReport {
        movie_id: bundle.movie_id.clone(),
        proposals,
        accuracy_best,
        pa_at_5,
        pa_at_10,
        overlap_upper_bound,
        overlap_definition: OVERLAP_DEFINITION.to_string(),
        omissions,
    })
}
