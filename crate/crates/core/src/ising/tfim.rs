//! Dense transverse-field Ising Hamiltonians for small-instance validation.
//!
//! Qubit 0 is the leftmost Kronecker factor and `|0⟩` is the σ^z = +1 state,
//! so basis index `x` has spin `1 - 2 * bit(n - 1 - h)` on qubit `h`.

use nalgebra::{DMatrix, DVector};

use super::ClampedModel;
use crate::error::{Error, Result};

/// Largest hidden-node count accepted by the dense oracles (4096 × 4096).
pub const TFIM_ORACLE_LIMIT: usize = 12;

fn kron_vec(a: &DVector<f64>, b: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Diagonal of `I ⊗ … ⊗ σ^z ⊗ … ⊗ I` with σ^z on each listed site.
pub fn pauli_z_diagonal(n: usize, sites: &[usize]) -> DVector<f64> {
    let z = DVector::from_vec(vec![1.0, -1.0]);
    let id = DVector::from_vec(vec![1.0, 1.0]);
    (0..n).fold(DVector::from_element(1, 1.0), |acc, q| {
        kron_vec(&acc, if sites.contains(&q) { &z } else { &id })
    })
}

/// Adds `coefficient · (I ⊗ … ⊗ σ^x_site ⊗ … ⊗ I)` into `matrix`.
///
/// `I_{2^site} ⊗ σ^x ⊗ I_{2^(n-site-1)}` has a single unit entry per row, at
/// the column that differs in the site's bit, so it is scattered directly.
pub fn pauli_x_term(matrix: &mut DMatrix<f64>, n: usize, site: usize, coefficient: f64) {
    let bit = 1usize << (n - 1 - site);
    for x in 0..(1usize << n) {
        matrix[(x, x ^ bit)] += coefficient;
    }
}

/// `-Σ b_h σ^z_h - Σ w_hh' σ^z_h σ^z_h' - Γ Σ σ^x_h` as a dense real symmetric
/// matrix of dimension `2^|H|`.
pub fn tfim_matrix(model: &ClampedModel, gamma: f64) -> Result<DMatrix<f64>> {
    let n = model.hidden_count();
    if n > TFIM_ORACLE_LIMIT {
        return Err(Error::OracleLimit {
            size: n,
            limit: TFIM_ORACLE_LIMIT,
        });
    }
    let dim = 1usize << n;
    let mut diagonal = DVector::zeros(dim);
    for (h, &b) in model.biases().iter().enumerate() {
        diagonal -= pauli_z_diagonal(n, &[h]) * b;
    }
    for c in model.couplings() {
        diagonal -= pauli_z_diagonal(n, &[c.a, c.b]) * c.weight;
    }
    let mut matrix = DMatrix::from_diagonal(&diagonal);
    if gamma != 0.0 {
        for h in 0..n {
            pauli_x_term(&mut matrix, n, h, -gamma);
        }
    }
    Ok(matrix)
}
