//! Small-instance checks of the samplers and estimators against exact
//! references, run by the `oracle-check` subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::free_energy::{
    enumerate_spin_distribution, exact_classical_free_energy, exact_effective_free_energy,
    exact_quantum_free_energy, exact_spin_free_energy, rbm_free_energy, trotter_offset, GibbsState,
};
use crate::gridworld::{value_iteration, Action, GridWorld};
use crate::ising::{ClampedModel, Coupling, TfimParameters};
use crate::sampler::{sa_sample, sqa_sample, AnnealSchedule};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, error: f64, tolerance: f64) -> OracleCheck {
    OracleCheck {
        name,
        passed: error <= tolerance,
        detail: format!("error {error:.3e} (tolerance {tolerance:.1e})"),
    }
}

fn random_model<R: Rng + ?Sized>(n: usize, coupled: bool, rng: &mut R) -> Result<ClampedModel> {
    let biases = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut couplings = Vec::new();
    if coupled {
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < 0.5 {
                    couplings.push(Coupling { a, b, weight: rng.random_range(-1.0..1.0) });
                }
            }
        }
    }
    ClampedModel::new(biases, couplings)
}

/// Total variation distance between two distributions over the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Empirical distribution of ±1 reads over basis indices (qubit 0 most
/// significant, `-1` as the set bit).
pub fn empirical_distribution<'a>(reads: impl Iterator<Item = &'a [i8]>, n: usize) -> Vec<f64> {
    let mut counts = vec![0usize; 1 << n];
    let mut total = 0usize;
    for s in reads {
        let x = s.iter().fold(0usize, |acc, &v| (acc << 1) | usize::from(v < 0));
        counts[x] += 1;
        total += 1;
    }
    counts.into_iter().map(|c| c as f64 / total as f64).collect()
}

pub fn run_oracle_checks(seed: u64) -> Result<Vec<OracleCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let m = random_model(5, true, &mut rng)?;
    let q0 = exact_quantum_free_energy(&m, &TfimParameters::new(0.0, 1.5, 1)?)?;
    out.push(check("tfim at zero field equals enumeration", (q0 - exact_spin_free_energy(&m, 1.5)?).abs(), 1e-9));

    let free = random_model(6, false, &mut rng)?;
    let closed = rbm_free_energy(&free, 2.0)?;
    out.push(check("rbm closed form equals enumeration", (closed - exact_classical_free_energy(&free, 2.0)?).abs(), 1e-12));

    let small = random_model(4, true, &mut rng)?;
    let schedule = AnnealSchedule::linear(200, 0.1, 2.0)?;
    let pool = sa_sample(&small, &schedule, 20_000, &mut rng)?;
    let empirical = empirical_distribution(pool.configs().iter().map(|c| c.values()), 4);
    let tv = total_variation(&empirical, &enumerate_spin_distribution(&small, 2.0)?);
    out.push(check("sa matches the boltzmann distribution", tv, 0.05));

    let qubit = ClampedModel::uncoupled(vec![0.4])?;
    let params = TfimParameters::new(0.5, 2.0, 16)?;
    let pool = sqa_sample(&qubit, &params, &AnnealSchedule::linear(200, 4.0, 0.5)?, 4000, &mut rng)?;
    let sampled: f64 = pool.configs().iter().flat_map(|c| c.spins()).map(|&s| f64::from(s)).sum::<f64>()
        / (pool.len() * params.replicas) as f64;
    let exact = GibbsState::new(&qubit, &params)?.sigma_z[0];
    out.push(check("sqa magnetization matches diagonalization", (sampled - exact).abs(), 0.05));

    let pair = random_model(3, true, &mut rng)?;
    let fine = TfimParameters::new(0.5, 2.0, 64)?;
    let trotter = exact_effective_free_energy(&pair, &fine)? + trotter_offset(3, &fine)?;
    out.push(check(
        "trotter limit recovers the quantum free energy",
        (trotter - exact_quantum_free_energy(&pair, &fine)?).abs(),
        1e-2,
    ));

    let env = GridWorld::canonical();
    let vi = value_iteration(&env, 1e-10)?;
    let residual = (0..env.state_count())
        .flat_map(|s| Action::ALL.map(|a| (s, a)))
        .map(|(s, a)| {
            let (next, reward) = env.step(s, a).expect("valid state");
            let best = vi.q[next].iter().copied().fold(f64::MIN, f64::max);
            (reward + env.discount() * best - vi.q[s][a.index()]).abs()
        })
        .fold(0.0, f64::max);
    out.push(check("value iteration satisfies the bellman equation", residual, 1e-8));
    Ok(out)
}
