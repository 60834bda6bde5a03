//! Energy functions for clamped Boltzmann machines.
//!
//! Two spin conventions coexist here. The classical clamped energy is written
//! over binary hidden values `h ∈ {0, 1}`; the transverse-field model, its
//! Suzuki–Trotter replica expansion and every sampler use `s ∈ {-1, +1}`.
//! [`BinaryConfiguration::from_spins`] and [`SpinConfiguration::from_binary`]
//! (`h = (s + 1) / 2`) are the only conversions between the two.

mod tfim;

pub use tfim::{pauli_x_term, pauli_z_diagonal, tfim_matrix, TFIM_ORACLE_LIMIT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    StateVisible,
    ActionVisible,
    Hidden,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub index: usize,
    pub kind: NodeKind,
}

impl NodeId {
    pub fn state(index: usize) -> Self {
        NodeId {
            index,
            kind: NodeKind::StateVisible,
        }
    }

    pub fn action(index: usize) -> Self {
        NodeId {
            index,
            kind: NodeKind::ActionVisible,
        }
    }

    pub fn hidden(index: usize) -> Self {
        NodeId {
            index,
            kind: NodeKind::Hidden,
        }
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let prefix = match self.kind {
            NodeKind::StateVisible => 's',
            NodeKind::ActionVisible => 'a',
            NodeKind::Hidden => 'h',
        };
        write!(f, "{prefix}{}", self.index)
    }
}

/// A hidden-hidden coupling, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

/// Hidden-only Ising problem left after folding clamped visible values into
/// the hidden biases.
#[derive(Debug, Clone, PartialEq)]
pub struct ClampedModel {
    biases: Vec<f64>,
    couplings: Vec<Coupling>,
    offsets: Vec<usize>,
    neighbors: Vec<(usize, f64)>,
}

impl ClampedModel {
    pub fn new(biases: Vec<f64>, couplings: Vec<Coupling>) -> Result<Self> {
        let n = biases.len();
        if let Some(b) = biases.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidModel(format!("non-finite bias {b}")));
        }
        let mut seen = std::collections::HashSet::with_capacity(couplings.len());
        let mut normalized = Vec::with_capacity(couplings.len());
        for c in couplings {
            if c.a == c.b {
                return Err(Error::InvalidModel(format!("self-coupling on h{}", c.a)));
            }
            if c.a >= n || c.b >= n {
                return Err(Error::InvalidModel(format!(
                    "coupling ({}, {}) references a node outside 0..{n}",
                    c.a, c.b
                )));
            }
            if !c.weight.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "non-finite coupling ({}, {})",
                    c.a, c.b
                )));
            }
            let (a, b) = if c.a < c.b { (c.a, c.b) } else { (c.b, c.a) };
            if !seen.insert((a, b)) {
                return Err(Error::InvalidModel(format!("duplicate coupling ({a}, {b})")));
            }
            normalized.push(Coupling {
                a,
                b,
                weight: c.weight,
            });
        }

        let mut degree = vec![0usize; n];
        for c in &normalized {
            degree[c.a] += 1;
            degree[c.b] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![(0usize, 0.0f64); offsets[n]];
        for c in &normalized {
            neighbors[fill[c.a]] = (c.b, c.weight);
            fill[c.a] += 1;
            neighbors[fill[c.b]] = (c.a, c.weight);
            fill[c.b] += 1;
        }

        Ok(ClampedModel {
            biases,
            couplings: normalized,
            offsets,
            neighbors,
        })
    }

    /// Model with the given biases and no couplings.
    pub fn uncoupled(biases: Vec<f64>) -> Result<Self> {
        Self::new(biases, Vec::new())
    }

    pub fn hidden_count(&self) -> usize {
        self.biases.len()
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn neighbors(&self, node: usize) -> &[(usize, f64)] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    /// `bias_i + Σ_j J_ij s_j` for a ±1 configuration.
    #[inline]
    pub fn local_field(&self, node: usize, spins: &[i8]) -> f64 {
        let mut field = self.biases[node];
        for &(j, w) in self.neighbors(node) {
            field += w * f64::from(spins[j]);
        }
        field
    }

    /// `bias_i + Σ_j J_ij h_j` for real-valued (binary or mean) neighbours.
    #[inline]
    pub fn local_field_binary(&self, node: usize, values: &[f64]) -> f64 {
        let mut field = self.biases[node];
        for &(j, w) in self.neighbors(node) {
            field += w * values[j];
        }
        field
    }

    /// Rewrites the binary-valued energy as a ±1 Ising model.
    ///
    /// Returns `(ising, offset)` with
    /// `classical_energy(self, h) == spin_energy(ising, s) + offset` whenever
    /// `h = (s + 1) / 2`. Samplers work on ±1 spins, so this is how a binary
    /// Boltzmann machine is handed to them.
    pub fn binary_as_ising(&self) -> (ClampedModel, f64) {
        let mut fields: Vec<f64> = self.biases.iter().map(|b| b / 2.0).collect();
        let mut offset = -self.biases.iter().sum::<f64>() / 2.0;
        let mut couplings = Vec::with_capacity(self.couplings.len());
        for c in &self.couplings {
            fields[c.a] += c.weight / 4.0;
            fields[c.b] += c.weight / 4.0;
            offset -= c.weight / 4.0;
            couplings.push(Coupling {
                weight: c.weight / 4.0,
                ..*c
            });
        }
        let model = ClampedModel::new(fields, couplings).expect("derived from a valid model");
        (model, offset)
    }

    fn check_width(&self, width: usize) -> Result<()> {
        if width != self.hidden_count() {
            return Err(Error::DimensionMismatch {
                expected: self.hidden_count(),
                got: width,
            });
        }
        Ok(())
    }
}

/// Virtual transverse field, inverse temperature and Trotter replica count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TfimParameters {
    pub gamma: f64,
    pub beta: f64,
    pub replicas: usize,
}

impl TfimParameters {
    pub fn new(gamma: f64, beta: f64, replicas: usize) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("gamma must be >= 0, got {gamma}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        if replicas == 0 {
            return Err(Error::InvalidParameter("replicas must be >= 1".into()));
        }
        Ok(TfimParameters {
            gamma,
            beta,
            replicas,
        })
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        TfimParameters { gamma, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryConfiguration(Vec<u8>);

impl BinaryConfiguration {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidParameter(format!("binary value {v} not in {{0, 1}}")));
        }
        Ok(BinaryConfiguration(values))
    }

    pub fn zeros(len: usize) -> Self {
        BinaryConfiguration(vec![0; len])
    }

    pub fn from_spins(spins: &SpinConfiguration) -> Self {
        BinaryConfiguration(spins.0.iter().map(|&s| ((s + 1) / 2) as u8).collect())
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration(Vec<i8>);

impl SpinConfiguration {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidParameter(format!("spin value {v} not in {{-1, +1}}")));
        }
        Ok(SpinConfiguration(values))
    }

    pub(crate) fn from_raw(values: Vec<i8>) -> Self {
        debug_assert!(values.iter().all(|&v| v == 1 || v == -1));
        SpinConfiguration(values)
    }

    pub fn from_binary(bits: &BinaryConfiguration) -> Self {
        SpinConfiguration(bits.0.iter().map(|&b| 2 * b as i8 - 1).collect())
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `replicas × width` spins of the replica-expanded classical model, stored
/// replica-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EffectiveConfiguration {
    replicas: usize,
    width: usize,
    spins: Vec<i8>,
}

impl EffectiveConfiguration {
    pub fn from_replicas(rows: &[SpinConfiguration]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidParameter("at least one replica required".into()))?;
        let width = first.len();
        let mut spins = Vec::with_capacity(width * rows.len());
        for row in rows {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    got: row.len(),
                });
            }
            spins.extend_from_slice(row.values());
        }
        Ok(EffectiveConfiguration {
            replicas: rows.len(),
            width,
            spins,
        })
    }

    pub(crate) fn from_raw(replicas: usize, width: usize, spins: Vec<i8>) -> Self {
        debug_assert_eq!(spins.len(), replicas * width);
        EffectiveConfiguration {
            replicas,
            width,
            spins,
        }
    }

    pub fn replicas(&self) -> usize {
        self.replicas
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn replica(&self, k: usize) -> &[i8] {
        &self.spins[k * self.width..(k + 1) * self.width]
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }
}

/// `-Σ bias_h h - Σ w_hh' h h'` over binary hidden values.
pub fn classical_energy(model: &ClampedModel, config: &BinaryConfiguration) -> Result<f64> {
    model.check_width(config.len())?;
    let h = config.values();
    let mut energy = 0.0;
    for (b, &x) in model.biases().iter().zip(h) {
        energy -= b * f64::from(x);
    }
    for c in model.couplings() {
        energy -= c.weight * f64::from(h[c.a] * h[c.b]);
    }
    Ok(energy)
}

/// The same expression evaluated on ±1 spins (the σ^z-diagonal of the TFIM).
pub fn spin_energy(model: &ClampedModel, config: &SpinConfiguration) -> Result<f64> {
    model.check_width(config.len())?;
    Ok(spin_energy_raw(model, config.values()))
}

#[inline]
pub(crate) fn spin_energy_raw(model: &ClampedModel, s: &[i8]) -> f64 {
    let mut energy = 0.0;
    for (b, &x) in model.biases().iter().zip(s) {
        energy -= b * f64::from(x);
    }
    for c in model.couplings() {
        energy -= c.weight * f64::from(s[c.a] * s[c.b]);
    }
    energy
}

/// Ferromagnetic coupling between neighbouring Trotter replicas,
/// `w+ = ln coth(Γβ/r) / (2β)`.
pub fn replica_coupling(params: &TfimParameters) -> Result<f64> {
    if params.gamma <= 0.0 {
        return Err(Error::ClassicalLimit);
    }
    let x = params.gamma * params.beta / params.replicas as f64;
    // ln coth x = ln(1 + e^{-2x}) - ln(1 - e^{-2x}), stable at both ends
    let q = (-2.0 * x).exp();
    Ok((q.ln_1p() - (-q).ln_1p()) / (2.0 * params.beta))
}

/// Energy of the replica-expanded classical model.
///
/// Intra-replica terms carry a `1/r` factor. The replica chain contributes
/// `-w+ (Σ_{k<r} h_k h_{k+1} + h_1 h_r)` per hidden node: a periodic chain for
/// `r >= 3`, a doubled bond for `r = 2`, and the constant `-w+` for `r = 1`.
pub fn effective_energy(
    model: &ClampedModel,
    config: &EffectiveConfiguration,
    params: &TfimParameters,
) -> Result<f64> {
    model.check_width(config.width())?;
    if config.replicas() != params.replicas {
        return Err(Error::DimensionMismatch {
            expected: params.replicas,
            got: config.replicas(),
        });
    }
    let w_plus = replica_coupling(params)?;
    Ok(effective_energy_raw(model, config, w_plus))
}

pub(crate) fn effective_energy_raw(
    model: &ClampedModel,
    config: &EffectiveConfiguration,
    w_plus: f64,
) -> f64 {
    let r = config.replicas();
    let n = config.width();
    let mut intra = 0.0;
    for k in 0..r {
        intra += spin_energy_raw(model, config.replica(k));
    }
    let mut chain = 0i64;
    for h in 0..n {
        let spin = |k: usize| i64::from(config.spins[k * n + h]);
        for k in 0..r - 1 {
            chain += spin(k) * spin(k + 1);
        }
        chain += spin(0) * spin(r - 1);
    }
    intra / r as f64 - w_plus * chain as f64
}
