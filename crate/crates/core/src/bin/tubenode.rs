use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use tubenode::commands::{exit_code, run_command};
use tubenode::config::parse_config;

#[derive(Parser)]
#[command(name = "tubenode", version, about = "Acoustic tube simulations and boundary-node checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Webster model and write time series and ledger CSV.
    SimulateWebster(Common),
    /// Run the axisymmetric cylinder solver and write its ledger.
    SimulateCylinder(Common),
    /// Compare cross-section averages against the Webster solution.
    CompareAverages(Common),
    /// Check the energy identities of the assembled Webster node.
    VerifyNode(Common),
    /// Tabulate and validate the derived geometry fields.
    GeometryReport(Common),
}

#[derive(Args)]
struct Common {
    /// Config file; repeat to run several configs.
    #[arg(long, required = true)]
    config: Vec<PathBuf>,
    /// Output directory (overrides `output.directory`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for sampled checks (overrides `verify.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of configs run concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl Command {
    fn split(&self) -> (&'static str, &Common) {
        match self {
            Command::SimulateWebster(c) => ("simulate-webster", c),
            Command::SimulateCylinder(c) => ("simulate-cylinder", c),
            Command::CompareAverages(c) => ("compare-averages", c),
            Command::VerifyNode(c) => ("verify-node", c),
            Command::GeometryReport(c) => ("geometry-report", c),
        }
    }
}

fn run_one(name: &str, common: &Common, path: &PathBuf) -> i32 {
    let mut cfg = match parse_config(path) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    if let Some(out) = &common.out {
        cfg.output.directory = if common.config.len() > 1 {
            let stem = path.file_stem().unwrap_or_default();
            out.join(stem)
        } else {
            out.clone()
        };
    }
    if let Some(seed) = common.seed {
        cfg.verify.seed = seed;
    }
    let result = run_command(name, &cfg);
    match &result {
        Ok(outcome) => {
            print!("{}", outcome.report());
            if let Some(fail) = outcome.first_failure() {
                eprintln!("{}: check `{}` failed", path.display(), fail.name);
            }
        }
        Err(e) => eprintln!("{}: {e}", path.display()),
    }
    exit_code(&result)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (name, common) = cli.command.split();
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(common.jobs.max(1))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let codes: Vec<i32> = pool.install(|| {
        common
            .config
            .par_iter()
            .map(|path| run_one(name, common, path))
            .collect()
    });
    ExitCode::from(codes.into_iter().max().unwrap_or(0) as u8)
}
