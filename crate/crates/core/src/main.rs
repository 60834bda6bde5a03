use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ferl::experiment::{
    curves_csv, heatmap_csv, run_heatmap, run_learning_curves, run_oracle_checks, sample_reads,
    write_output, ExperimentConfig, PoolKind,
};
use ferl::gridworld::Action;
use ferl::sampler::write_pool;
use ferl::topology::NetworkTopology;
use ferl::Error;

#[derive(Parser)]
#[command(name = "ferl", version, about = "Free-energy based reinforcement learning experiments")]
struct Cli {
    /// TOML experiment configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when omitted (required for `sample`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sampler {
    Sa,
    Sqa,
    External,
}

#[derive(Clone, Copy, ValueEnum)]
enum ActionArg {
    Up,
    Down,
    Left,
    Right,
    Stay,
}

impl From<ActionArg> for Action {
    fn from(a: ActionArg) -> Self {
        match a {
            ActionArg::Up => Action::Up,
            ActionArg::Down => Action::Down,
            ActionArg::Left => Action::Left,
            ActionArg::Right => Action::Right,
            ActionArg::Stay => Action::Stay,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Learning curves for every configured method.
    Curves,
    /// Average fidelity over the virtual (β, Γ) grid.
    Heatmap,
    /// Compares samplers and estimators with exact results on small models.
    OracleCheck,
    /// Writes a pool of reads for one clamped (state, action).
    Sample {
        #[arg(long, default_value_t = 0)]
        state: usize,
        #[arg(long, value_enum, default_value = "stay")]
        action: ActionArg,
        #[arg(long, value_enum, default_value = "sa")]
        sampler: Sampler,
        /// Network checkpoint; a randomly initialised Chimera network otherwise.
        #[arg(long)]
        topology: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Parse { .. } => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.experiment.seed = seed;
    }
    if cli.jobs == 0 {
        return Err(Error::Config("--jobs must be >= 1".into()));
    }
    let out = cli.out.as_deref();
    match cli.command {
        Command::Curves => {
            let curves = ferl::par::with_jobs(cli.jobs, || run_learning_curves(&config))?;
            write_output(out, &curves_csv(&curves))
        }
        Command::Heatmap => {
            let cells = ferl::par::with_jobs(cli.jobs, || run_heatmap(&config))?;
            write_output(out, &heatmap_csv(&cells))
        }
        Command::OracleCheck => {
            let checks = run_oracle_checks(config.experiment.seed)?;
            let mut report = String::new();
            for c in &checks {
                report.push_str(&format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail));
            }
            write_output(out, &report)?;
            match checks.iter().filter(|c| !c.passed).count() {
                0 => Ok(()),
                n => Err(Error::InvalidState(format!("{n} oracle check(s) failed"))),
            }
        }
        Command::Sample { state, action, sampler, topology } => {
            let out = out.ok_or_else(|| Error::Config("sample needs --out <path>".into()))?;
            let net = match topology {
                Some(path) => NetworkTopology::load(&path)?,
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.experiment.seed);
                    NetworkTopology::chimera_two_cell().init_weights(&mut rng, config.agent.init_scale)?
                }
            };
            let kind = match sampler {
                Sampler::Sa => PoolKind::Sa,
                Sampler::Sqa => PoolKind::Sqa,
                Sampler::External => PoolKind::External,
            };
            let rows = ferl::par::with_jobs(cli.jobs, || {
                sample_reads(&config, &net, state, action.into(), kind, config.experiment.seed)
            })?;
            write_pool(out, rows.iter().map(Vec::as_slice))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
