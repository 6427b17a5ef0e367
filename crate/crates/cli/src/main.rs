use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use los_glm::{Criterion, Family};
use los_glm_cli::commands::{self, Outcome};
use los_glm_cli::{CliError, ConfigLayer, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "losglm",
    version,
    about = "Poisson regression pipeline for hospital length of stay",
    after_help = "Examples:\n  \
      losglm prep --input extract.csv --out-dir out\n  \
      losglm fit --input out/cleaned.csv --train-size 7000 --out-dir out/fit\n  \
      losglm select --input out/cleaned.csv --criterion bic --out-dir out/select\n  \
      losglm diagnose --input out/cleaned.csv --model out/select/model.json --out-dir out/diag\n  \
      losglm predict --model out/select/model.json --newdata patients.csv --explain\n  \
      losglm report --input extract.csv --train-size 7000 --out-dir run"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Clean the raw extract: drop invalid gender rows and the weight column, recode race and admission type
    Prep,
    /// Descriptive statistics, group means of the response and correlations
    Eda,
    /// Write the seeded train/test partition
    Split,
    /// Fit a model on the training partition
    Fit,
    /// Forward stepwise selection on the training partition
    Select,
    /// Goodness of fit and residual data for a saved model
    Diagnose,
    /// Predict the mean response for new rows with a saved model
    Predict,
    /// Run the whole pipeline from the raw extract into one directory
    Report,
}

#[derive(clap::Args, Debug, Default)]
struct Opts {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Input CSV (raw extract for prep/report, cleaned table otherwise)
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output directory [default: out]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Schema file overriding the built-in column definitions
    #[arg(long, global = true)]
    schema: Option<PathBuf>,
    /// poisson-log or gaussian-identity [default: poisson-log]
    #[arg(long, global = true)]
    family: Option<Family>,
    /// aic or bic [default: bic]
    #[arg(long, global = true)]
    criterion: Option<Criterion>,
    /// Training fraction when no --train-size is given [default: 0.7]
    #[arg(long, global = true)]
    train_fraction: Option<f64>,
    /// Split seed [default: 20080101]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Exact number of training rows
    #[arg(long, global = true)]
    train_size: Option<usize>,
    /// Comma-separated model terms; "" fits the intercept only [default: every column but the response]
    #[arg(long, global = true, value_delimiter = ',')]
    terms: Option<Vec<String>>,
    /// Response column [default: days]
    #[arg(long, global = true)]
    response: Option<String>,
    /// Worker threads for candidate fits [default: number of processors]
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// IRLS iteration limit [default: 25]
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// IRLS relative deviance tolerance [default: 1e-8]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Saved model JSON (diagnose, predict)
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Rows to predict (predict)
    #[arg(long, global = true)]
    newdata: Option<PathBuf>,
    /// Add the baseline and per-term multiplicative factors to predictions
    #[arg(long, global = true)]
    explain: bool,
}

impl Opts {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            input: self.input.clone(),
            out_dir: self.out_dir.clone(),
            schema: self.schema.clone(),
            family: self.family,
            criterion: self.criterion,
            train_fraction: self.train_fraction,
            seed: self.seed,
            train_size: self.train_size,
            terms: self.terms.as_ref().map(|t| {
                t.iter()
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }),
            response: self.response.clone(),
            jobs: self.jobs,
            max_iter: self.max_iter,
            tol: self.tol,
            model: self.model.clone(),
            newdata: self.newdata.clone(),
            explain: self.explain.then_some(true),
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let file = cli
        .opts
        .config
        .as_deref()
        .map(ConfigLayer::from_file)
        .transpose()?;
    let cfg = RunConfig::resolve(file.as_ref(), &cli.opts.layer())?;
    match cli.command {
        Command::Prep => commands::prep(&cfg),
        Command::Eda => commands::eda(&cfg),
        Command::Split => commands::split(&cfg),
        Command::Fit => commands::fit(&cfg),
        Command::Select => commands::select(&cfg),
        Command::Diagnose => commands::diagnose(&cfg),
        Command::Predict => commands::predict(&cfg),
        Command::Report => commands::report(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            // A closed stdout (e.g. piped into `head`) is not a failure.
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(outcome.stdout.as_bytes());
            for p in &outcome.written {
                let _ = writeln!(out, "wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("losglm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
