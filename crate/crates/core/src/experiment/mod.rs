//! Learning-curve and heatmap experiments with CSV output.
//!
//! Every run gets its own seed, derived from the master seed, a stream id
//! (the method, or the heatmap cell) and the run index. Adding runs or
//! methods never changes the seed of an existing one, and runs may execute in
//! any order or on any number of threads without changing results.

mod config;
mod oracle;

pub use config::{
    AgentSection, DqnSection, ExperimentConfig, ExperimentSection, ExternalSection, GridworldSection,
    HeatmapSection, Method, SaSection, SqaSection,
};
pub use oracle::{empirical_distribution, run_oracle_checks, total_variation, OracleCheck};

use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agent::{train, TrainingHistory};
use crate::dqn::train_dqn;
use crate::error::{Error, Result};
use crate::gridworld::{fidelity, value_iteration, Action, FidelityCurve, PolicyTable};
use crate::ising::{SpinConfiguration, TfimParameters};
use crate::sampler::{sa_sample, sqa_sample, AnnealSchedule, SamplePool};
use crate::topology::NetworkTopology;
use crate::par;

const VALUE_ITERATION_TOLERANCE: f64 = 1e-10;

/// splitmix64 output function.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of run `index` in stream `stream`.
pub fn run_seed(master: u64, stream: u64, index: usize) -> u64 {
    mix(mix(mix(master) ^ stream) ^ index as u64)
}

/// Stream id of a heatmap cell, keyed by its parameter values rather than its
/// position in the grid.
pub fn cell_stream(beta: f64, gamma: f64) -> u64 {
    mix(beta.to_bits()) ^ gamma.to_bits().rotate_left(17) ^ 0x6865_6174
}

fn train_method(config: &ExperimentConfig, method: Method, samples: usize, seed: u64) -> Result<TrainingHistory> {
    let env = config.environment()?;
    match method {
        Method::Dqn => train_dqn(&env, &config.dqn_config(samples), seed),
        _ => {
            let topology = config.topology(method)?.expect("free-energy methods have a network");
            train(&env, &topology, &config.agent_config(method, samples)?, seed)
        }
    }
}

fn score(histories: &[TrainingHistory], config: &ExperimentConfig) -> Result<FidelityCurve> {
    let optimal = value_iteration(&config.environment()?, VALUE_ITERATION_TOLERANCE)?.optimal;
    let runs: Vec<&[PolicyTable]> = histories.iter().map(TrainingHistory::snapshots).collect();
    fidelity(&runs, &optimal)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodCurve {
    pub method: Method,
    pub curve: FidelityCurve,
}

/// Trains every configured method `runs` times and scores the snapshots.
pub fn run_learning_curves(config: &ExperimentConfig) -> Result<Vec<MethodCurve>> {
    config.validate()?;
    let e = &config.experiment;
    let tasks: Vec<(Method, usize)> = e
        .methods
        .iter()
        .flat_map(|&m| (0..e.runs).map(move |l| (m, l)))
        .collect();
    let histories = par::map_indexed(tasks.len(), 1, |i| {
        let (method, run) = tasks[i];
        train_method(config, method, e.samples, run_seed(e.seed, method.stream_id(), run))
    });
    let histories: Vec<TrainingHistory> = histories.into_iter().collect::<Result<_>>()?;
    e.methods
        .iter()
        .zip(histories.chunks(e.runs))
        .map(|(&method, runs)| {
            Ok(MethodCurve {
                method,
                curve: score(runs, config)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapCell {
    pub beta: f64,
    pub gamma: f64,
    /// Fidelity averaged over runs and training samples.
    pub avg_fidelity: f64,
}

/// Trains the emulated-annealer agent at every `(β, Γ)` of the grid.
pub fn run_heatmap(config: &ExperimentConfig) -> Result<Vec<HeatmapCell>> {
    config.validate()?;
    let h = &config.heatmap;
    let env = config.environment()?;
    let topology = config
        .topology(Method::ExternalStacked)?
        .expect("chimera network");
    let cells: Vec<(f64, f64)> = h
        .betas
        .iter()
        .flat_map(|&b| h.gammas.iter().map(move |&g| (b, g)))
        .collect();
    let tasks = cells.len() * h.runs;
    let histories = par::map_indexed(tasks, 1, |i| {
        let (beta, gamma) = cells[i / h.runs];
        let agent = config.heatmap_agent(beta, gamma)?;
        let seed = run_seed(config.experiment.seed, cell_stream(beta, gamma), i % h.runs);
        train(&env, &topology, &agent, seed)
    });
    let histories: Vec<TrainingHistory> = histories.into_iter().collect::<Result<_>>()?;
    cells
        .iter()
        .zip(histories.chunks(h.runs))
        .map(|(&(beta, gamma), runs)| {
            Ok(HeatmapCell {
                beta,
                gamma,
                avg_fidelity: score(runs, config)?.overall_mean(),
            })
        })
        .collect()
}

pub const CURVES_HEADER: &str = "method,sample,mean_fidelity,stderr";
pub const HEATMAP_HEADER: &str = "beta,gamma,avg_fidelity";

/// Learning curves as CSV; samples are numbered from 1.
pub fn curves_csv(curves: &[MethodCurve]) -> String {
    let mut out = format!("{CURVES_HEADER}\n");
    for c in curves {
        for (i, (m, se)) in c.curve.mean.iter().zip(&c.curve.stderr).enumerate() {
            out.push_str(&format!("{},{},{},{}\n", c.method.name(), i + 1, m, se));
        }
    }
    out
}

pub fn heatmap_csv(cells: &[HeatmapCell]) -> String {
    let mut out = format!("{HEATMAP_HEADER}\n");
    for c in cells {
        out.push_str(&format!("{},{},{}\n", c.beta, c.gamma, c.avg_fidelity));
    }
    out
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Sampler used by the `sample` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolKind {
    /// SA reads of the binary machine, written as ±1 spins.
    Sa,
    /// Every replica slice of every SQA read.
    Sqa,
    /// Single-slice reads of the emulated annealer.
    External,
}

/// Clamps `topology` at `(state, action)` and draws a pool of ±1 reads with
/// the sampler settings of `config`.
pub fn sample_reads(
    config: &ExperimentConfig,
    topology: &NetworkTopology,
    state: usize,
    action: Action,
    kind: PoolKind,
    seed: u64,
) -> Result<Vec<Vec<i8>>> {
    let model = topology.clamp_indices(state, action.index())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = &config.agent;
    let rows = match kind {
        PoolKind::Sa => {
            let (ising, _) = model.binary_as_ising();
            let schedule = AnnealSchedule::linear(config.sa.sweeps, config.sa.initial_beta, a.beta)?;
            sa_sample(&ising, &schedule, config.sa.reads, &mut rng)?
        }
        PoolKind::Sqa => {
            let params = TfimParameters::new(a.gamma, a.beta, a.replicas)?;
            let schedule = AnnealSchedule::linear(config.sqa.sweeps, config.sqa.initial_gamma, a.gamma)?;
            sqa_sample(&model, &params, &schedule, config.sqa.reads, &mut rng)?.flattened()
        }
        PoolKind::External => {
            let e = &config.external;
            let params = TfimParameters::new(e.final_gamma, e.beta, e.replicas)?;
            let schedule = AnnealSchedule::linear(e.sweeps, e.initial_gamma, e.final_gamma)?;
            let pool = sqa_sample(&model, &params, &schedule, e.reads, &mut rng)?;
            SamplePool::<SpinConfiguration>::from_replica_slices(&pool, 0)?
        }
    };
    Ok(rows.into_configs().into_iter().map(|c| c.values().to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(run_seed(1, 2, 3), run_seed(1, 2, 3));
        let mut seen = std::collections::HashSet::new();
        for stream in 1..=8 {
            for run in 0..100 {
                assert!(seen.insert(run_seed(7, stream, run)));
            }
        }
        assert_ne!(cell_stream(2.0, 0.5), cell_stream(0.5, 2.0));
    }

    #[test]
    fn csv_headers() {
        assert_eq!(curves_csv(&[]), "method,sample,mean_fidelity,stderr\n");
        assert_eq!(heatmap_csv(&[]), "beta,gamma,avg_fidelity\n");
    }

    #[test]
    fn defaults_are_valid_and_include_named_optimum() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert!(c.heatmap.betas.contains(&2.0) && c.heatmap.gammas.contains(&0.5));
        assert_eq!(c.heatmap.betas.len() * c.heatmap.gammas.len(), 24);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let p = Path::new("x.toml");
        assert!(matches!(ExperimentConfig::parse("[agent]\nbogus = 1\n", p), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse("[experiment]\nruns = 0\n", p), Err(Error::Config(_))));
        assert!(matches!(ExperimentConfig::parse("[heatmap]\nbetas = []\n", p), Err(Error::Config(_))));
        assert!(matches!(
            ExperimentConfig::parse("[experiment]\nmethods = [\"nope\"]\n", p),
            Err(Error::Config(_))
        ));
        let c = ExperimentConfig::parse("[experiment]\nruns = 3\nmethods = [\"rbm\", \"dqn\"]\n", p).unwrap();
        assert_eq!(c.experiment.runs, 3);
    }

    #[test]
    fn zero_gamma_cells_use_the_classical_route() {
        use crate::agent::Route;
        let c = ExperimentConfig::default();
        assert_eq!(c.heatmap_agent(2.0, 0.0).unwrap().backend.route(), Some(Route::Classical));
        assert!(matches!(
            c.heatmap_agent(2.0, 0.5).unwrap().backend.route(),
            Some(Route::Quantum { .. })
        ));
    }
}
