use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Result;
use clap::Parser;
use trailer_core::EngineConfig;
use trailer_service::{app, AppState, ServiceConfig};

#[derive(Parser)]
#[command(name = "trailer-service", version, about = "Interactive trailer walk sessions over HTTP")]
struct Cli {
    /// Service TOML (host, port, bundle_dir, journal, engine_config).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[tokio::main]
async fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = ServiceConfig::load(cli.config.as_deref(), |k| std::env::var(k).ok())?;
    let engine = match &cfg.engine_config {
        Some(p) => EngineConfig::load(p)?,
        None => EngineConfig::default(),
    };
    let mut state = AppState::from_dir(engine, &cfg.bundle_dir)?;
    if let Some(j) = &cfg.journal {
        state = state.with_journal(j)?;
    }
    let n = state.movies().count();
    let listener = tokio::net::TcpListener::bind(cfg.addr()?).await?;
    eprintln!("serving {n} movies from {} on http://{}", cfg.bundle_dir.display(), listener.local_addr()?);
    axum::serve(listener, app(Arc::new(state)))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
