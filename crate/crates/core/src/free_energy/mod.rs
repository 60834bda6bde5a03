//! Free-energy and observable estimates from sample pools, plus the closed-form
//! RBM free energy.
//!
//! The empirical estimators use the plug-in entropy over distinct observed
//! configurations: `F ≈ ⟨E⟩ + (1/β) Σ_c p̂(c) ln p̂(c)`. With few samples and a
//! large configuration space every read is distinct and the entropy term
//! saturates at `-ln(N)/β`.

mod exact;

pub use exact::{
    enumerate_spin_distribution, exact_classical_free_energy, exact_classical_moments, exact_effective_free_energy,
    exact_quantum_free_energy, exact_spin_free_energy, trotter_offset, GibbsState,
    ENUMERATION_LIMIT,
};

use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::ising::{
    classical_energy, effective_energy_raw, replica_coupling, BinaryConfiguration, ClampedModel,
    EffectiveConfiguration, TfimParameters,
};
use crate::sampler::SamplePool;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeEnergyEstimate {
    pub value: f64,
    pub mean_energy: f64,
    pub entropy_term: f64,
    pub support_size: usize,
}

/// Single-site and pair moments. For effective-model pools these are
/// `⟨σ^z_h⟩` and same-replica `⟨σ^z_h σ^z_h'⟩`; for classical pools they are
/// the binary `⟨h⟩` and `⟨h h'⟩`. `sigma_zz[i]` belongs to `pairs[i]`, which
/// follows the model's coupling order.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableEstimate {
    pub sigma_z: Vec<f64>,
    pub pairs: Vec<(usize, usize)>,
    pub sigma_zz: Vec<f64>,
}

/// `(1/β) Σ p ln p` over distinct items, summed in a fixed order.
fn plug_in_entropy_term<'a, K: Hash + Eq + 'a>(
    items: impl Iterator<Item = &'a K>,
    total: usize,
    beta: f64,
) -> (f64, usize) {
    let mut counts: HashMap<&K, usize> = HashMap::new();
    for item in items {
        *counts.entry(item).or_default() += 1;
    }
    let mut freq: Vec<usize> = counts.into_values().collect();
    freq.sort_unstable();
    let n = total as f64;
    let sum: f64 = freq
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum();
    (sum / beta, freq.len())
}

pub fn estimate_observables(
    pool: &SamplePool<EffectiveConfiguration>,
    model: &ClampedModel,
) -> Result<ObservableEstimate> {
    let first = pool.configs().first().ok_or(Error::EmptyPool)?;
    let n = model.hidden_count();
    if first.width() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: first.width(),
        });
    }
    let pairs: Vec<(usize, usize)> = model.couplings().iter().map(|c| (c.a, c.b)).collect();
    let mut single = vec![0i64; n];
    let mut pair = vec![0i64; pairs.len()];
    let mut slices = 0usize;
    for c in pool.configs() {
        for k in 0..c.replicas() {
            let s = c.replica(k);
            for (acc, &x) in single.iter_mut().zip(s) {
                *acc += i64::from(x);
            }
            for (acc, &(a, b)) in pair.iter_mut().zip(&pairs) {
                *acc += i64::from(s[a] * s[b]);
            }
        }
        slices += c.replicas();
    }
    let norm = slices as f64;
    Ok(ObservableEstimate {
        sigma_z: single.iter().map(|&v| v as f64 / norm).collect(),
        pairs,
        sigma_zz: pair.iter().map(|&v| v as f64 / norm).collect(),
    })
}

/// Binary moments `⟨h⟩`, `⟨h h'⟩` of a classical pool.
pub fn estimate_binary_observables(
    pool: &[BinaryConfiguration],
    model: &ClampedModel,
) -> Result<ObservableEstimate> {
    let first = pool.first().ok_or(Error::EmptyPool)?;
    let n = model.hidden_count();
    if first.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: first.len(),
        });
    }
    let pairs: Vec<(usize, usize)> = model.couplings().iter().map(|c| (c.a, c.b)).collect();
    let mut single = vec![0usize; n];
    let mut pair = vec![0usize; pairs.len()];
    for c in pool {
        let h = c.values();
        for (acc, &x) in single.iter_mut().zip(h) {
            *acc += usize::from(x);
        }
        for (acc, &(a, b)) in pair.iter_mut().zip(&pairs) {
            *acc += usize::from(h[a] & h[b]);
        }
    }
    let norm = pool.len() as f64;
    Ok(ObservableEstimate {
        sigma_z: single.iter().map(|&v| v as f64 / norm).collect(),
        pairs,
        sigma_zz: pair.iter().map(|&v| v as f64 / norm).collect(),
    })
}

/// Plug-in free energy of the replica-expanded model.
pub fn estimate_effective_free_energy(
    model: &ClampedModel,
    pool: &SamplePool<EffectiveConfiguration>,
    params: &TfimParameters,
) -> Result<FreeEnergyEstimate> {
    let first = pool.configs().first().ok_or(Error::EmptyPool)?;
    if first.width() != model.hidden_count() {
        return Err(Error::DimensionMismatch {
            expected: model.hidden_count(),
            got: first.width(),
        });
    }
    if first.replicas() != params.replicas {
        return Err(Error::DimensionMismatch {
            expected: params.replicas,
            got: first.replicas(),
        });
    }
    let w_plus = replica_coupling(params)?;
    let mean_energy = pool
        .configs()
        .iter()
        .map(|c| effective_energy_raw(model, c, w_plus))
        .sum::<f64>()
        / pool.len() as f64;
    let (entropy_term, support_size) =
        plug_in_entropy_term(pool.configs().iter(), pool.len(), params.beta);
    Ok(FreeEnergyEstimate {
        value: mean_energy + entropy_term,
        mean_energy,
        entropy_term,
        support_size,
    })
}

/// Plug-in free energy of the binary clamped Boltzmann machine.
pub fn estimate_classical_free_energy(
    model: &ClampedModel,
    pool: &[BinaryConfiguration],
    beta: f64,
) -> Result<FreeEnergyEstimate> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let mut total = 0.0;
    for c in pool {
        total += classical_energy(model, c)?;
    }
    let mean_energy = total / pool.len() as f64;
    let (entropy_term, support_size) = plug_in_entropy_term(pool.iter(), pool.len(), beta);
    Ok(FreeEnergyEstimate {
        value: mean_energy + entropy_term,
        mean_energy,
        entropy_term,
        support_size,
    })
}

/// `ln(1 + e^x)` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Exact free energy of a coupling-free binary model:
/// `F = -(1/β) Σ_h ln(1 + e^{β b_h})`.
pub fn rbm_free_energy(model: &ClampedModel, beta: f64) -> Result<f64> {
    if !model.couplings().is_empty() {
        return Err(Error::NotAnRbm(model.couplings().len()));
    }
    Ok(-model.biases().iter().map(|&b| softplus(beta * b)).sum::<f64>() / beta)
}

/// Exact `⟨h⟩ = σ(β b_h)` of a coupling-free binary model.
pub fn rbm_hidden_means(model: &ClampedModel, beta: f64) -> Result<Vec<f64>> {
    if !model.couplings().is_empty() {
        return Err(Error::NotAnRbm(model.couplings().len()));
    }
    Ok(model
        .biases()
        .iter()
        .map(|&b| 1.0 / (1.0 + (-beta * b).exp()))
        .collect())
}
