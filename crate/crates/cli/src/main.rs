//! `iiif`: serve, ingest, validate and report.
//!
//! Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Debug, Parser)]
#[command(name = "iiif", version, about = "IIIF image service, manifest ingestion and conformance reporting")]
struct Cli {
    /// Machine-readable output on standard output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the HTTP service until interrupted.
    Serve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Harvest a repository into manifests, collections and activity entries.
    Ingest(commands::IngestArgs),
    /// Check manifests and collections against the model rules.
    Validate {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Viewer support for the patterns found in the given manifests.
    Report {
        /// Tab-separated viewer matrix; the built-in September 2022 matrix when omitted.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Report over every registered pattern instead of the detected ones.
        #[arg(long)]
        all_patterns: bool,
        files: Vec<PathBuf>,
    },
}

/// A failed run: exit code, error kind and message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub detail: String,
}

impl Failure {
    pub fn usage(kind: &'static str, detail: impl Into<String>) -> Self {
        Failure { code: 2, kind, detail: detail.into() }
    }

    pub fn runtime(kind: &'static str, detail: impl Into<String>) -> Self {
        Failure { code: 1, kind, detail: detail.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let runtime = match tokio::runtime::Builder::new_multi_thread().enable_all().build() {
        Ok(rt) => rt,
        Err(e) => return report_failure(cli.json, Failure::runtime("RuntimeError", e.to_string())),
    };
    let json = cli.json;
    let result = runtime.block_on(async move {
        match cli.command {
            Command::Serve { config } => commands::serve(&config, json).await,
            Command::Ingest(args) => commands::ingest(args, json).await,
            Command::Validate { files } => commands::validate(&files, json),
            Command::Report { matrix, all_patterns, files } => {
                commands::report(matrix.as_deref(), all_patterns, &files, json)
            }
        }
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => report_failure(json, f),
    }
}

fn report_failure(json: bool, f: Failure) -> ExitCode {
    if json {
        println!("{}", json!({ "error": f.kind, "detail": f.detail }));
    } else {
        let _ = writeln!(std::io::stderr(), "error: {}: {}", f.kind, f.detail);
    }
    ExitCode::from(f.code)
}
