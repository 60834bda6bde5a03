use rand::Rng;

use super::{chain_batch, chain_rng, metropolis, random_spin, AnnealSchedule, PoolSource, SamplePool};
use crate::error::{Error, Result};
use crate::ising::{replica_coupling, ClampedModel, EffectiveConfiguration, TfimParameters};
use crate::par;

/// Simulated quantum annealing by single-spin-flip path-integral Monte Carlo.
///
/// Each read anneals an `r`-replica lattice at fixed `params.beta` while the
/// transverse field follows `schedule` down to `params.gamma`; the replica
/// coupling `w+` is recomputed at every sweep. Moves are Metropolis on the
/// effective (replica-expanded) energy, so at the end of a slow anneal the
/// reads follow its Boltzmann distribution.
pub fn sqa_sample<R: Rng + ?Sized>(
    model: &ClampedModel,
    params: &TfimParameters,
    schedule: &AnnealSchedule,
    reads: usize,
    rng: &mut R,
) -> Result<SamplePool<EffectiveConfiguration>> {
    if params.gamma <= 0.0 {
        return Err(Error::ClassicalLimit);
    }
    if schedule.final_value != params.gamma {
        return Err(Error::InvalidParameter(format!(
            "schedule ends at Γ = {} but the target is Γ = {}",
            schedule.final_value, params.gamma
        )));
    }
    if !(schedule.initial_value > 0.0) {
        return Err(Error::InvalidParameter("initial transverse field must be > 0".into()));
    }
    let couplings: Vec<f64> = (0..schedule.sweeps)
        .map(|t| replica_coupling(&params.with_gamma(schedule.value_at(t))))
        .collect::<Result<_>>()?;

    let pool_seed: u64 = rng.random();
    let n = model.hidden_count();
    let r = params.replicas;
    let beta = params.beta;
    let inv_r = 1.0 / r as f64;
    let batch = chain_batch(schedule.sweeps * n * r);
    let configs = par::map_indexed(reads, batch, |chain| {
        let mut rng = chain_rng(pool_seed, chain);
        let mut spins: Vec<i8> = (0..n * r).map(|_| random_spin(&mut rng)).collect();
        for &w_plus in &couplings {
            for k in 0..r {
                let prev = (k + r - 1) % r * n;
                let next = (k + 1) % r * n;
                let row = k * n;
                for i in 0..n {
                    let s = spins[row + i];
                    let mut field = model.local_field(i, &spins[row..row + n]) * inv_r;
                    if r > 1 {
                        field += w_plus * f64::from(spins[prev + i] + spins[next + i]);
                    }
                    if metropolis(&mut rng, beta, 2.0 * f64::from(s) * field) {
                        spins[row + i] = -s;
                    }
                }
            }
        }
        EffectiveConfiguration::from_raw(r, n, spins)
    });
    Ok(SamplePool::from_parts(configs, PoolSource::Sqa))
}
