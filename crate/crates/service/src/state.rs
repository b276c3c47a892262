use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use anyhow::Context;
use serde_json::Value;
use trailer_core::ingest::load_bundle;
use trailer_core::pipeline::PreparedMovie;
use trailer_core::traversal::TraversalConfig;
use trailer_core::EngineConfig;

use crate::error::ApiError;
use crate::journal::{Entry, Journal};
use crate::session::{Choice, Session};

pub type SessionHandle = Arc<Mutex<Session>>;

/// Movies are read-only and shared; each session sits behind its own lock so
/// requests on one session are serialized while distinct sessions run in parallel.
#[derive(Debug)]
pub struct AppState {
    pub engine: EngineConfig,
    movies: BTreeMap<String, Arc<PreparedMovie>>,
    sessions: Mutex<HashMap<String, SessionHandle>>,
    next_id: AtomicU64,
    journal: Option<Journal>,
}

impl AppState {
    pub fn new(engine: EngineConfig, movies: Vec<PreparedMovie>) -> anyhow::Result<Self> {
        let mut map = BTreeMap::new();
        for m in movies {
            let id = m.bundle.movie_id.clone();
            if map.insert(id.clone(), Arc::new(m)).is_some() {
                anyhow::bail!("duplicate movie_id `{id}`");
            }
        }
        Ok(Self {
            engine,
            movies: map,
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            journal: None,
        })
    }

    /// Loads and prepares every `*.json` bundle in `dir`.
    pub fn from_dir(engine: EngineConfig, dir: &Path) -> anyhow::Result<Self> {
        let mut files: Vec<_> = std::fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let movies = files
            .iter()
            .map(|p| {
                let b = load_bundle(p).with_context(|| format!("loading {}", p.display()))?;
                PreparedMovie::new(b, &engine).with_context(|| format!("preparing {}", p.display()))
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Self::new(engine, movies)
    }

    /// Replays `path` (if it exists) and journals further mutations to it.
    pub fn with_journal(mut self, path: &Path) -> anyhow::Result<Self> {
        for (i, entry) in Journal::read(path)?.into_iter().enumerate() {
            self.apply(&entry)
                .map_err(|e| anyhow::anyhow!("{} entry {}: {e}", path.display(), i + 1))?;
        }
        self.journal = Some(Journal::open(path)?);
        Ok(self)
    }

    fn apply(&self, entry: &Entry) -> Result<(), ApiError> {
        match entry {
            Entry::Create { session, movie_id, config } => {
                let n: u64 = session.trim_start_matches('s').parse().unwrap_or(0);
                self.next_id.fetch_max(n + 1, Ordering::SeqCst);
                self.insert_session(session.clone(), movie_id, config)
            }
            Entry::Step { session, choice } => self.session(session)?.lock().unwrap().step(*choice),
            Entry::Undo { session } => self.session(session)?.lock().unwrap().undo(),
        }
    }

    fn record(&self, entry: &Entry) -> Result<(), ApiError> {
        if let Some(j) = &self.journal {
            j.append(entry)
                .map_err(|e| ApiError::internal(format!("journal {}: {e}", j.path().display())))?;
        }
        Ok(())
    }

    pub fn movies(&self) -> impl Iterator<Item = &Arc<PreparedMovie>> {
        self.movies.values()
    }

    pub fn movie(&self, id: &str) -> Result<&Arc<PreparedMovie>, ApiError> {
        self.movies
            .get(id)
            .ok_or_else(|| ApiError::not_found("movie-not-found", format!("no movie `{id}`")))
    }

    pub fn session(&self, id: &str) -> Result<SessionHandle, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("session-not-found", format!("no session `{id}`")))
    }

    /// Server traversal defaults with `overrides` merged on top.
    pub fn session_config(&self, overrides: &Value) -> Result<TraversalConfig, ApiError> {
        let mut merged = serde_json::to_value(&self.engine.traversal).map_err(|e| ApiError::internal(e.to_string()))?;
        if !overrides.is_null() {
            if !overrides.is_object() {
                return Err(ApiError::unprocessable("invalid-config", "config must be an object").with_field("config"));
            }
            merge(&mut merged, overrides);
        }
        let cfg: TraversalConfig = serde_path_to_error::deserialize(merged).map_err(|e| {
            ApiError::unprocessable("invalid-config", e.inner().to_string()).with_field(format!("config.{}", e.path()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn insert_session(&self, id: String, movie_id: &str, overrides: &Value) -> Result<(), ApiError> {
        let movie = self.movie(movie_id)?.clone();
        let config = self.session_config(overrides)?;
        let session = Session::new(id.clone(), movie, config)?;
        self.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
        Ok(())
    }

    pub fn create_session(&self, movie_id: &str, overrides: Value) -> Result<SessionHandle, ApiError> {
        let id = format!("s{}", self.next_id.fetch_add(1, Ordering::SeqCst));
        self.insert_session(id.clone(), movie_id, &overrides)?;
        self.record(&Entry::Create {
            session: id.clone(),
            movie_id: movie_id.to_string(),
            config: overrides,
        })?;
        self.session(&id)
    }

    pub fn step(&self, id: &str, choice: Choice) -> Result<SessionHandle, ApiError> {
        let handle = self.session(id)?;
        {
            let mut s = handle.lock().unwrap();
            s.step(choice)?;
            self.record(&Entry::Step { session: id.to_string(), choice })?;
        }
        Ok(handle)
    }

    pub fn undo(&self, id: &str) -> Result<SessionHandle, ApiError> {
        let handle = self.session(id)?;
        {
            let mut s = handle.lock().unwrap();
            s.undo()?;
            self.record(&Entry::Undo { session: id.to_string() })?;
        }
        Ok(handle)
    }
}

fn merge(base: &mut Value, over: &Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}
