use clap::Parser;
use mcslab::experiments::{run, validate_config, ExperimentKind};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERTION: u8 = 3;
const EXIT_RUNTIME: u8 = 1;

/// Manifold compressive sensing experiments.
#[derive(Debug, Parser)]
#[command(name = "mcslab", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    kind: ExperimentKind,

    /// JSON config file.
    #[arg(long)]
    config: PathBuf,

    /// Output directory (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed (overrides the config's `seed`).
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads; defaults to one per core.
    #[arg(long, env = "MCSLAB_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = match validate_config(&cli.config, cli.kind) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = Some(seed);
    }
    if let Some(out) = cli.out {
        config.out = Some(out);
    }
    let out_dir = config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("mcslab-out").join(cli.kind.as_str()));
    config.out = Some(out_dir.clone());
    mcslab::exec::init_threads(cli.threads);

    match run(&config, &out_dir) {
        Ok(outcome) => {
            if !outcome.stdout.is_empty() {
                println!("{}", outcome.stdout);
            }
            let failed: Vec<_> = outcome.assertions.iter().filter(|a| !a.pass).collect();
            for a in &failed {
                eprintln!("assertion failed: {}: {}", a.name, a.detail);
            }
            if failed.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            }
        }
        Err(mcslab::Error::InvalidArgument(msg)) | Err(mcslab::Error::OutOfRange(msg)) => {
            eprintln!("{}: {msg}", cli.config.display());
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
