use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ozone_cli::{cmd_benchmark, cmd_featurize, cmd_stats, cmd_synth, CliError, RunConfig};
use ozone_core::Error;

/// Ozone forecasting pipeline: statistics, features, benchmarks and fixtures.
#[derive(Parser)]
#[command(name = "ozone", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summary statistics and Spearman matrices.
    Stats(Flags),
    /// Standardized train/test feature matrices.
    Featurize(Flags),
    /// Fit and score the model roster.
    Benchmark(Flags),
    /// Generate a synthetic dataset.
    Synth(Flags),
}

#[derive(Args)]
struct Flags {
    /// key=value file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<String>,
    /// 1, 2, 3, 4 or all.
    #[arg(long)]
    approach: Option<String>,
    /// chrono or random.
    #[arg(long)]
    split: Option<String>,
    #[arg(long = "train-frac")]
    train_frac: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Comma-separated model keys.
    #[arg(long)]
    models: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// model.param=value; repeatable.
    #[arg(long = "set")]
    sets: Vec<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    rows: Option<String>,
    #[arg(long)]
    autocorrelation: Option<String>,
}

impl Flags {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            cfg.merge_text(&text)?;
        }
        let flags = [
            ("data", &self.data),
            ("approach", &self.approach),
            ("split", &self.split),
            ("train-frac", &self.train_frac),
            ("seed", &self.seed),
            ("models", &self.models),
            ("out", &self.out),
            ("threads", &self.threads),
            ("rows", &self.rows),
            ("autocorrelation", &self.autocorrelation),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.apply(key, v)?;
            }
        }
        for s in &self.sets {
            cfg.apply("set", s)?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let flags = match &cli.command {
        Command::Stats(f) | Command::Featurize(f) | Command::Benchmark(f) | Command::Synth(f) => f,
    };
    let cfg = flags.resolve()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Stats(_) => {
            for p in cmd_stats(&cfg)? {
                println!("{}", p.display());
            }
        }
        Command::Featurize(_) => {
            for p in cmd_featurize(&cfg)? {
                println!("{}", p.display());
            }
        }
        Command::Benchmark(_) => {
            for r in cmd_benchmark(&cfg)? {
                println!("{}", r.to_markdown());
            }
        }
        Command::Synth(_) => println!("{}", cmd_synth(&cfg)?.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            for line in e.to_string().lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
