use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use credible::experiments::ExperimentConfig;
use credible::selection::{GridSpec, PenaltyFamily};
use credible_cli::{
    parse_families, parse_lambda_grid, parse_seeds, run_experiment, train_on_csv, CliError, ExperimentName, RunOptions,
    AUDIT_FAILURE,
};

#[derive(Parser)]
#[command(name = "credible", version, about = "Train expert-guided sparse linear models and run the benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a synthetic benchmark: two_feature, correlation_sweep, known_fraction or expert_mistake.
    RunExperiment {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Select a model per penalty on a CSV dataset with a `label` column.
    TrainOnCsv {
        data: PathBuf,
        /// Known feature names, one per line.
        knowledge: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Seeds as a list (0,1,2) or a half-open range (0..20).
    #[arg(long, default_value = "0")]
    seed: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// λ values: lo:hi:count in log10, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    lambda_grid: Option<String>,
    /// Comma-separated penalty families.
    #[arg(long)]
    penalty: Option<String>,
    #[arg(long, default_value_t = credible::metrics::DEFAULT_SYMKL_EPSILON)]
    epsilon_symkl: f64,
    /// Significance level of the bootstrap filter.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 5000)]
    max_epochs: usize,
}

impl Common {
    fn options(&self, default_grid: GridSpec) -> Result<RunOptions, CliError> {
        let mut experiment = ExperimentConfig {
            grid: default_grid,
            alpha: self.alpha,
            symkl_epsilon: self.epsilon_symkl,
            ..ExperimentConfig::default()
        };
        if let Some(g) = &self.lambda_grid {
            experiment.grid.lambdas = parse_lambda_grid(g)?;
        }
        if let Some(p) = &self.penalty {
            experiment.families = parse_families(p)?;
        }
        experiment.train.max_epochs = self.max_epochs;
        Ok(RunOptions {
            seeds: parse_seeds(&self.seed)?,
            out: self.out.clone(),
            experiment,
        })
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let manifest = match cli.command {
        Command::RunExperiment { name, common } => {
            let name = ExperimentName::parse(&name)?;
            run_experiment(name, &common.options(GridSpec::desk_scale())?)?
        }
        Command::TrainOnCsv { data, knowledge, common } => {
            let mut options = common.options(GridSpec::wide())?;
            if common.penalty.is_none() {
                options.experiment.families = PenaltyFamily::BENCHMARK.to_vec();
            }
            train_on_csv(&data, &knowledge, &options)?
        }
    };
    for a in &manifest.artifacts {
        println!("{}  {}", a.sha256, a.path.display());
    }
    Ok(manifest.audits_passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("audit failure; see report.json");
            ExitCode::from(AUDIT_FAILURE as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
