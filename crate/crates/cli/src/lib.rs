//! Reproducible runs of the `dirperc` laboratory: configuration, manifest,
//! subcommands and the verification suite.

pub mod args;
pub mod commands;
pub mod config;
pub mod verify;

use std::fs;
use std::path::PathBuf;

pub use config::{Reference, RunConfig, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] dirperc_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Core(_) => 2,
            Self::Io { .. } => 1,
        }
    }
}

/// Files written by a run plus the text shown on stdout.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub stdout: String,
    /// Some check in the run failed.
    pub failed: bool,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        i32::from(self.failed)
    }
}

/// Runs `config` on a pool of `config.threads` workers and writes its files,
/// including the manifest, into `config.out`.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {:?} worker threads: {e}", config.threads)))?;
    let output = pool.install(|| commands::dispatch(config))?;

    fs::create_dir_all(&config.out).map_err(|source| CliError::Io {
        path: config.out.clone(),
        source,
    })?;
    let mut files = Vec::with_capacity(output.files.len() + 1);
    let named = output.files.into_iter().chain(std::iter::once((
        config::MANIFEST_NAME.to_string(),
        config.to_manifest().into_bytes(),
    )));
    for (name, bytes) in named {
        let path = config.out.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        files.push(path);
    }
    Ok(RunReport {
        files,
        stdout: output.stdout,
        failed: output.failed,
    })
}

/// Re-runs the configuration recorded in a manifest.
pub fn replay(manifest: &std::path::Path, out: PathBuf, threads: Option<usize>) -> Result<RunReport, CliError> {
    let text = fs::read_to_string(manifest).map_err(|source| CliError::Io {
        path: manifest.to_path_buf(),
        source,
    })?;
    let mut config = RunConfig::from_manifest(&text)?;
    config.out = out;
    config.threads = threads;
    run(&config)
}
