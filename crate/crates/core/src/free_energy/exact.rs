//! Exact reference values for small models: enumeration, dense
//! diagonalisation of the TFIM and the transfer matrix of the replica chain.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{softplus, ObservableEstimate};
use crate::error::{Error, Result};
use crate::ising::{
    pauli_z_diagonal, replica_coupling, spin_energy_raw, tfim_matrix, ClampedModel,
    TfimParameters, TFIM_ORACLE_LIMIT,
};

/// Largest hidden-node count accepted by the enumeration oracles.
pub const ENUMERATION_LIMIT: usize = 20;

/// Spins of basis index `x`, qubit 0 in the most significant bit.
fn basis_spins(x: usize, n: usize) -> Vec<i8> {
    (0..n).map(|h| 1 - 2 * ((x >> (n - 1 - h)) & 1) as i8).collect()
}

fn check_size(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::OracleLimit { size: n, limit });
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    Ok(())
}

/// `-(1/β) ln Σ e^{-β e_i}` computed around the minimum.
fn free_energy_of_levels(levels: impl Iterator<Item = f64> + Clone, beta: f64) -> f64 {
    let min = levels.clone().fold(f64::INFINITY, f64::min);
    let sum: f64 = levels.map(|e| (-beta * (e - min)).exp()).sum();
    min - sum.ln() / beta
}

fn spin_levels(model: &ClampedModel) -> Vec<f64> {
    let n = model.hidden_count();
    (0..1usize << n)
        .map(|x| spin_energy_raw(model, &basis_spins(x, n)))
        .collect()
}

/// Free energy of the binary-valued energy by enumerating `{0,1}^|H|`.
pub fn exact_classical_free_energy(model: &ClampedModel, beta: f64) -> Result<f64> {
    check_size(model.hidden_count(), ENUMERATION_LIMIT)?;
    check_beta(beta)?;
    let (ising, offset) = model.binary_as_ising();
    Ok(free_energy_of_levels(spin_levels(&ising).into_iter(), beta) + offset)
}

/// Free energy of the same expression on ±1 spins, which is the TFIM at Γ = 0.
pub fn exact_spin_free_energy(model: &ClampedModel, beta: f64) -> Result<f64> {
    check_size(model.hidden_count(), ENUMERATION_LIMIT)?;
    check_beta(beta)?;
    Ok(free_energy_of_levels(spin_levels(model).into_iter(), beta))
}

/// Boltzmann probabilities of every ±1 configuration, indexed by basis index.
pub fn enumerate_spin_distribution(model: &ClampedModel, beta: f64) -> Result<Vec<f64>> {
    check_size(model.hidden_count(), ENUMERATION_LIMIT)?;
    check_beta(beta)?;
    let levels = spin_levels(model);
    let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = levels.iter().map(|e| (-beta * (e - min)).exp()).collect();
    let z: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / z).collect())
}

/// Exact free energy and binary moments `⟨h⟩`, `⟨h h'⟩` of the binary
/// machine.
///
/// A greedy independent set of hidden nodes is summed out analytically: given
/// the remaining nodes, its members are independent with
/// `P(h_i = 1) = σ(β field_i)`. Only the remaining nodes are enumerated, so a
/// bipartite network costs `2^(smaller side)` and a coupling-free one is
/// closed-form.
pub fn exact_classical_moments(model: &ClampedModel, beta: f64) -> Result<(f64, ObservableEstimate)> {
    check_beta(beta)?;
    let n = model.hidden_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| model.neighbors(i).len());
    let mut summed = vec![false; n];
    for &i in &order {
        if model.neighbors(i).iter().all(|&(j, _)| !summed[j]) {
            summed[i] = true;
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !summed[i]).collect();
    let free: Vec<usize> = (0..n).filter(|&i| summed[i]).collect();
    check_size(rest.len(), ENUMERATION_LIMIT)?;
    let mut slot = vec![usize::MAX; n];
    for (k, &i) in rest.iter().enumerate() {
        slot[i] = k;
    }

    let dim = 1usize << rest.len();
    let mut h = vec![0.0f64; n];
    let mut log_weights = Vec::with_capacity(dim);
    for x in 0..dim {
        for (k, &i) in rest.iter().enumerate() {
            h[i] = (x >> k & 1) as f64;
        }
        let mut log_w = 0.0;
        for &i in &rest {
            log_w += beta * model.biases()[i] * h[i];
        }
        for c in model.couplings() {
            if !summed[c.a] && !summed[c.b] {
                log_w += beta * c.weight * h[c.a] * h[c.b];
            }
        }
        for &i in &free {
            log_w += softplus(beta * model.local_field_binary(i, &h));
        }
        log_weights.push(log_w);
    }
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let pairs: Vec<(usize, usize)> = model.couplings().iter().map(|c| (c.a, c.b)).collect();
    let mut z = 0.0;
    let mut single = vec![0.0; n];
    let mut pair = vec![0.0; pairs.len()];
    let mut mean = vec![0.0f64; n];
    for (x, &log_w) in log_weights.iter().enumerate() {
        let w = (log_w - max).exp();
        z += w;
        for &i in &rest {
            mean[i] = (x >> slot[i] & 1) as f64;
        }
        // conditional means of the summed-out nodes given the enumerated ones
        for &i in &free {
            mean[i] = 1.0 / (1.0 + (-beta * model.local_field_binary(i, &mean)).exp());
        }
        for (acc, m) in single.iter_mut().zip(&mean) {
            *acc += w * m;
        }
        for (acc, &(a, b)) in pair.iter_mut().zip(&pairs) {
            *acc += w * mean[a] * mean[b];
        }
    }
    let free_energy = -(max + z.ln()) / beta;
    Ok((
        free_energy,
        ObservableEstimate {
            sigma_z: single.into_iter().map(|v| v / z).collect(),
            pairs,
            sigma_zz: pair.into_iter().map(|v| v / z).collect(),
        },
    ))
}

/// Thermal state of the TFIM from a full eigendecomposition.
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub free_energy: f64,
    pub mean_energy: f64,
    /// `⟨σ^z_h⟩` per hidden node.
    pub sigma_z: Vec<f64>,
    /// `⟨σ^z_a σ^z_b⟩` in the model's coupling order.
    pub sigma_zz: Vec<f64>,
}

impl GibbsState {
    pub fn new(model: &ClampedModel, params: &TfimParameters) -> Result<Self> {
        let n = model.hidden_count();
        check_size(n, TFIM_ORACLE_LIMIT)?;
        check_beta(params.beta)?;
        let beta = params.beta;
        let eig = SymmetricEigen::new(tfim_matrix(model, params.gamma)?);
        let levels = eig.eigenvalues.as_slice();
        let free_energy = free_energy_of_levels(levels.iter().copied(), beta);
        let min = levels.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = levels.iter().map(|e| (-beta * (e - min)).exp()).collect();
        let z: f64 = weights.iter().sum();

        // Diagonal of ρ in the computational basis; every σ^z observable is
        // diagonal there.
        let dim = 1usize << n;
        let mut rho_diag = vec![0.0; dim];
        for (i, w) in weights.iter().enumerate() {
            let v = eig.eigenvectors.column(i);
            for (x, d) in rho_diag.iter_mut().enumerate() {
                *d += w / z * v[x] * v[x];
            }
        }
        let expect = |diag: nalgebra::DVector<f64>| -> f64 {
            diag.iter().zip(&rho_diag).map(|(a, b)| a * b).sum()
        };
        let sigma_z = (0..n).map(|h| expect(pauli_z_diagonal(n, &[h]))).collect();
        let sigma_zz = model
            .couplings()
            .iter()
            .map(|c| expect(pauli_z_diagonal(n, &[c.a, c.b])))
            .collect();
        let mean_energy = levels.iter().zip(&weights).map(|(e, w)| e * w / z).sum();
        Ok(Self {
            free_energy,
            mean_energy,
            sigma_z,
            sigma_zz,
        })
    }
}

/// `-(1/β) ln tr e^{-βH}` for the TFIM of the clamped model.
pub fn exact_quantum_free_energy(model: &ClampedModel, params: &TfimParameters) -> Result<f64> {
    Ok(GibbsState::new(model, params)?.free_energy)
}

/// Exact free energy of the replica-expanded classical model.
///
/// The replica chain is a periodic 1-d system in the configuration of one
/// slice, so `Z = tr T^r` with the symmetric transfer matrix
/// `T_xy = exp(-β E(x)/2r - β E(y)/2r + β w+ x·y)`. This covers `r = 1`
/// (`tr T`) and the doubled bond at `r = 2` as well.
pub fn exact_effective_free_energy(model: &ClampedModel, params: &TfimParameters) -> Result<f64> {
    let n = model.hidden_count();
    check_size(n, TFIM_ORACLE_LIMIT)?;
    check_beta(params.beta)?;
    let w_plus = replica_coupling(params)?;
    let beta = params.beta;
    let r = params.replicas as f64;
    let dim = 1usize << n;
    let spins: Vec<Vec<i8>> = (0..dim).map(|x| basis_spins(x, n)).collect();
    let half: Vec<f64> = spins
        .iter()
        .map(|s| -beta * spin_energy_raw(model, s) / (2.0 * r))
        .collect();
    let exponent = |x: usize, y: usize| {
        let overlap: i32 = spins[x]
            .iter()
            .zip(&spins[y])
            .map(|(a, b)| i32::from(a * b))
            .sum();
        half[x] + half[y] + beta * w_plus * f64::from(overlap)
    };
    let shift = (0..dim)
        .flat_map(|x| (0..dim).map(move |y| (x, y)))
        .map(|(x, y)| exponent(x, y))
        .fold(f64::NEG_INFINITY, f64::max);
    let t = DMatrix::from_fn(dim, dim, |x, y| (exponent(x, y) - shift).exp());
    let eig = SymmetricEigen::new(t);
    let top = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ratio_sum: f64 = eig
        .eigenvalues
        .iter()
        .map(|l| (l / top).powi(params.replicas as i32))
        .sum();
    let ln_z = r * (top.ln() + shift) + ratio_sum.ln();
    Ok(-ln_z / beta)
}

/// Constant that separates the replica-expanded free energy from the quantum
/// one: `F_q ≈ F_eff + trotter_offset`, where
/// `trotter_offset = -(n r / 2β) ln(sinh(2βΓ/r) / 2)`. It does not depend on
/// the clamped visible configuration.
pub fn trotter_offset(hidden: usize, params: &TfimParameters) -> Result<f64> {
    if params.gamma <= 0.0 {
        return Err(Error::ClassicalLimit);
    }
    let r = params.replicas as f64;
    let c = (2.0 * params.beta * params.gamma / r).sinh() / 2.0;
    Ok(-(hidden as f64) * r / (2.0 * params.beta) * c.ln())
}
