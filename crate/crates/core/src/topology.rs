//! Trainable Boltzmann-machine graphs and clamping.
//!
//! Three graph families are supported: the 16-qubit two-cell Chimera fragment,
//! layered bipartite (deep) Boltzmann machines, and single-layer RBMs. Weights
//! live in flat vectors indexed by edge so that training can update them in
//! place; lookups by node pair go through [`NetworkTopology::edge_weight`].

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::distr::{Distribution, Uniform};
use rand::Rng;

use crate::error::{Error, Result};
use crate::ising::{ClampedModel, Coupling, NodeId, NodeKind};

pub const GRID_STATE_COUNT: usize = 14;
pub const ACTION_COUNT: usize = 5;
pub const DEFAULT_INIT_SCALE: f64 = 0.1;

/// Which bipartite side of each Chimera unit cell is wired to the state nodes.
///
/// Qubits `8c..8c+4` form the first side of cell `c` and `8c+4..8c+8` the
/// second. The inter-cell couplers always join second-side qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChimeraSide {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyKind {
    Chimera { blue: ChimeraSide },
    Dbm { layers: Vec<usize> },
    Rbm { hidden: usize },
}

/// Weight changes for every edge of a topology, in edge order.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightDeltas {
    pub visible_hidden: Vec<f64>,
    pub hidden_hidden: Vec<f64>,
}

impl WeightDeltas {
    pub fn zeros(topology: &NetworkTopology) -> Self {
        WeightDeltas {
            visible_hidden: vec![0.0; topology.vh_edges.len()],
            hidden_hidden: vec![0.0; topology.hh_edges.len()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.visible_hidden.iter().chain(&self.hidden_hidden).all(|&d| d == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkTopology {
    kind: TopologyKind,
    state_count: usize,
    action_count: usize,
    hidden_count: usize,
    vh_edges: Vec<(NodeId, usize)>,
    vh_weights: Vec<f64>,
    hh_edges: Vec<(usize, usize)>,
    hh_weights: Vec<f64>,
    state_edges: Vec<Vec<usize>>,
    action_edges: Vec<Vec<usize>>,
}

impl NetworkTopology {
    fn from_edges(
        kind: TopologyKind,
        state_count: usize,
        action_count: usize,
        hidden_count: usize,
        vh_edges: Vec<(NodeId, usize)>,
        hh_edges: Vec<(usize, usize)>,
    ) -> Self {
        let mut state_edges = vec![Vec::new(); state_count];
        let mut action_edges = vec![Vec::new(); action_count];
        for (e, (v, _)) in vh_edges.iter().enumerate() {
            match v.kind {
                NodeKind::StateVisible => state_edges[v.index].push(e),
                NodeKind::ActionVisible => action_edges[v.index].push(e),
                NodeKind::Hidden => unreachable!("visible edge from a hidden node"),
            }
        }
        NetworkTopology {
            kind,
            state_count,
            action_count,
            hidden_count,
            vh_weights: vec![0.0; vh_edges.len()],
            hh_weights: vec![0.0; hh_edges.len()],
            vh_edges,
            hh_edges,
            state_edges,
            action_edges,
        }
    }

    /// Two adjacent Chimera unit cells with the default colouring (state nodes
    /// on the first side of each cell).
    pub fn chimera_two_cell() -> Self {
        Self::chimera_two_cell_with(ChimeraSide::First, GRID_STATE_COUNT, ACTION_COUNT)
    }

    pub fn chimera_two_cell_with(blue: ChimeraSide, state_count: usize, action_count: usize) -> Self {
        let side = |cell: usize, s: usize| (8 * cell + 4 * s)..(8 * cell + 4 * s + 4);
        let mut hh = Vec::with_capacity(36);
        for cell in 0..2 {
            for a in side(cell, 0) {
                for b in side(cell, 1) {
                    hh.push((a, b));
                }
            }
        }
        for k in 0..4 {
            hh.push((4 + k, 12 + k));
        }
        let (blue_side, red_side) = match blue {
            ChimeraSide::First => (0, 1),
            ChimeraSide::Second => (1, 0),
        };
        let blue_qubits: Vec<usize> = (0..2).flat_map(|c| side(c, blue_side)).collect();
        let red_qubits: Vec<usize> = (0..2).flat_map(|c| side(c, red_side)).collect();
        let mut vh = Vec::new();
        for s in 0..state_count {
            vh.extend(blue_qubits.iter().map(|&h| (NodeId::state(s), h)));
        }
        for a in 0..action_count {
            vh.extend(red_qubits.iter().map(|&h| (NodeId::action(a), h)));
        }
        Self::from_edges(TopologyKind::Chimera { blue }, state_count, action_count, 16, vh, hh)
    }

    /// Layered bipartite machine: states → layer 1 → … → layer L → actions.
    pub fn dbm(state_count: usize, action_count: usize, layers: &[usize]) -> Result<Self> {
        if layers.is_empty() || layers.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "DBM layer sizes must be positive, got {layers:?}"
            )));
        }
        let mut starts = Vec::with_capacity(layers.len());
        let mut total = 0;
        for &l in layers {
            starts.push(total);
            total += l;
        }
        let layer = |i: usize| starts[i]..starts[i] + layers[i];
        let mut hh = Vec::new();
        for i in 1..layers.len() {
            for a in layer(i - 1) {
                for b in layer(i) {
                    hh.push((a, b));
                }
            }
        }
        let mut vh = Vec::new();
        for s in 0..state_count {
            vh.extend(layer(0).map(|h| (NodeId::state(s), h)));
        }
        for a in 0..action_count {
            vh.extend(layer(layers.len() - 1).map(|h| (NodeId::action(a), h)));
        }
        Ok(Self::from_edges(
            TopologyKind::Dbm {
                layers: layers.to_vec(),
            },
            state_count,
            action_count,
            total,
            vh,
            hh,
        ))
    }

    pub fn rbm(state_count: usize, action_count: usize, hidden: usize) -> Result<Self> {
        if hidden == 0 {
            return Err(Error::InvalidParameter("RBM needs at least one hidden node".into()));
        }
        let mut vh = Vec::with_capacity((state_count + action_count) * hidden);
        for s in 0..state_count {
            vh.extend((0..hidden).map(|h| (NodeId::state(s), h)));
        }
        for a in 0..action_count {
            vh.extend((0..hidden).map(|h| (NodeId::action(a), h)));
        }
        Ok(Self::from_edges(
            TopologyKind::Rbm { hidden },
            state_count,
            action_count,
            hidden,
            vh,
            Vec::new(),
        ))
    }

    /// Rebuilds an empty topology of the same shape as `kind`.
    pub fn from_kind(kind: &TopologyKind, state_count: usize, action_count: usize) -> Result<Self> {
        match kind {
            TopologyKind::Chimera { blue } => {
                Ok(Self::chimera_two_cell_with(*blue, state_count, action_count))
            }
            TopologyKind::Dbm { layers } => Self::dbm(state_count, action_count, layers),
            TopologyKind::Rbm { hidden } => Self::rbm(state_count, action_count, *hidden),
        }
    }

    pub fn kind(&self) -> &TopologyKind {
        &self.kind
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden_count
    }

    pub fn state_nodes(&self) -> Vec<NodeId> {
        (0..self.state_count).map(NodeId::state).collect()
    }

    pub fn action_nodes(&self) -> Vec<NodeId> {
        (0..self.action_count).map(NodeId::action).collect()
    }

    pub fn hidden_nodes(&self) -> Vec<NodeId> {
        (0..self.hidden_count).map(NodeId::hidden).collect()
    }

    pub fn visible_hidden_edges(&self) -> &[(NodeId, usize)] {
        &self.vh_edges
    }

    pub fn hidden_hidden_edges(&self) -> &[(usize, usize)] {
        &self.hh_edges
    }

    pub fn visible_hidden_weights(&self) -> &[f64] {
        &self.vh_weights
    }

    pub fn hidden_hidden_weights(&self) -> &[f64] {
        &self.hh_weights
    }

    /// Indices into [`Self::visible_hidden_edges`] incident to a visible node.
    pub fn edges_of(&self, visible: NodeId) -> &[usize] {
        match visible.kind {
            NodeKind::StateVisible => &self.state_edges[visible.index],
            NodeKind::ActionVisible => &self.action_edges[visible.index],
            NodeKind::Hidden => &[],
        }
    }

    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<f64> {
        match (u.kind, v.kind) {
            (NodeKind::Hidden, NodeKind::Hidden) => {
                let key = (u.index.min(v.index), u.index.max(v.index));
                self.hh_edges.iter().position(|&e| e == key).map(|i| self.hh_weights[i])
            }
            (NodeKind::Hidden, _) => self.edge_weight(v, u),
            (_, NodeKind::Hidden) => self
                .edges_of(u)
                .iter()
                .find(|&&e| self.vh_edges[e].1 == v.index)
                .map(|&e| self.vh_weights[e]),
            _ => None,
        }
    }

    pub fn set_visible_hidden_weights(&mut self, weights: &[f64]) -> Result<()> {
        check_finite_len(weights, self.vh_weights.len())?;
        self.vh_weights.copy_from_slice(weights);
        Ok(())
    }

    pub fn set_hidden_hidden_weights(&mut self, weights: &[f64]) -> Result<()> {
        check_finite_len(weights, self.hh_weights.len())?;
        self.hh_weights.copy_from_slice(weights);
        Ok(())
    }

    pub fn apply(&mut self, deltas: &WeightDeltas) {
        for (w, d) in self.vh_weights.iter_mut().zip(&deltas.visible_hidden) {
            *w += d;
        }
        for (w, d) in self.hh_weights.iter_mut().zip(&deltas.hidden_hidden) {
            *w += d;
        }
    }

    /// Draws every weight i.i.d. from `U[-scale, scale]`.
    pub fn init_weights<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::InvalidParameter(format!("init scale must be >= 0, got {scale}")));
        }
        let mut out = self.clone();
        if scale == 0.0 {
            out.vh_weights.fill(0.0);
            out.hh_weights.fill(0.0);
            return Ok(out);
        }
        let dist = Uniform::new_inclusive(-scale, scale)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        for w in out.vh_weights.iter_mut().chain(out.hh_weights.iter_mut()) {
            *w = dist.sample(rng);
        }
        Ok(out)
    }

    /// Hidden biases `Σ_v w_vh v` for arbitrary real visible values.
    pub fn fold_biases(&self, state_values: &[f64], action_values: &[f64]) -> Result<Vec<f64>> {
        if state_values.len() != self.state_count {
            return Err(Error::DimensionMismatch {
                expected: self.state_count,
                got: state_values.len(),
            });
        }
        if action_values.len() != self.action_count {
            return Err(Error::DimensionMismatch {
                expected: self.action_count,
                got: action_values.len(),
            });
        }
        let mut biases = vec![0.0; self.hidden_count];
        for (e, &(v, h)) in self.vh_edges.iter().enumerate() {
            let value = match v.kind {
                NodeKind::StateVisible => state_values[v.index],
                _ => action_values[v.index],
            };
            biases[h] += self.vh_weights[e] * value;
        }
        Ok(biases)
    }

    /// Clamps one-hot state and action encodings into a hidden-only model.
    pub fn clamp(&self, state_encoding: &[u8], action_encoding: &[u8]) -> Result<ClampedModel> {
        let s = one_hot_index(state_encoding, self.state_count, "state")?;
        let a = one_hot_index(action_encoding, self.action_count, "action")?;
        self.clamp_indices(s, a)
    }

    /// Same as [`Self::clamp`] with the hot positions given directly.
    pub fn clamp_indices(&self, state: usize, action: usize) -> Result<ClampedModel> {
        if state >= self.state_count || action >= self.action_count {
            return Err(Error::InvalidEncoding(format!(
                "state {state} / action {action} outside {}x{}",
                self.state_count, self.action_count
            )));
        }
        let mut biases = vec![0.0; self.hidden_count];
        for &e in self.state_edges[state].iter().chain(&self.action_edges[action]) {
            biases[self.vh_edges[e].1] += self.vh_weights[e];
        }
        let couplings = self
            .hh_edges
            .iter()
            .zip(&self.hh_weights)
            .map(|(&(a, b), &weight)| Coupling { a, b, weight })
            .collect();
        ClampedModel::new(biases, couplings)
    }

    /// Serializes to the line-oriented checkpoint format.
    ///
    /// ```text
    /// ferl-topology 1
    /// kind dbm 8 8
    /// counts 14 5 16
    /// edge s0 h0 0.0123
    /// edge h0 h8 -0.04
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::from("ferl-topology 1\n");
        let kind = match &self.kind {
            TopologyKind::Chimera { blue: ChimeraSide::First } => "chimera first".to_string(),
            TopologyKind::Chimera { blue: ChimeraSide::Second } => "chimera second".to_string(),
            TopologyKind::Dbm { layers } => format!(
                "dbm {}",
                layers.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
            ),
            TopologyKind::Rbm { hidden } => format!("rbm {hidden}"),
        };
        let _ = writeln!(out, "kind {kind}");
        let _ = writeln!(
            out,
            "counts {} {} {}",
            self.state_count, self.action_count, self.hidden_count
        );
        for (&(v, h), w) in self.vh_edges.iter().zip(&self.vh_weights) {
            let _ = writeln!(out, "edge {v} {} {w:?}", NodeId::hidden(h));
        }
        for (&(a, b), w) in self.hh_edges.iter().zip(&self.hh_weights) {
            let _ = writeln!(out, "edge {} {} {w:?}", NodeId::hidden(a), NodeId::hidden(b));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        match lines.next() {
            Some((_, "ferl-topology 1")) => {}
            Some((n, l)) => return Err(err(n, format!("expected header 'ferl-topology 1', got '{l}'"))),
            None => return Err(err(0, "empty checkpoint".into())),
        }

        let (n, kind_line) = lines.next().ok_or_else(|| err(0, "missing kind line".into()))?;
        let words: Vec<&str> = kind_line.split_whitespace().collect();
        let numbers = |ws: &[&str]| -> Result<Vec<usize>> {
            ws.iter()
                .map(|w| w.parse().map_err(|_| err(n, format!("bad integer '{w}'"))))
                .collect()
        };
        let kind = match words.as_slice() {
            ["kind", "chimera", "first"] => TopologyKind::Chimera { blue: ChimeraSide::First },
            ["kind", "chimera", "second"] => TopologyKind::Chimera { blue: ChimeraSide::Second },
            ["kind", "dbm", rest @ ..] if !rest.is_empty() => TopologyKind::Dbm {
                layers: numbers(rest)?,
            },
            ["kind", "rbm", h] => TopologyKind::Rbm {
                hidden: numbers(&[h])?[0],
            },
            _ => return Err(err(n, format!("unrecognized kind line '{kind_line}'"))),
        };

        let (n, counts_line) = lines.next().ok_or_else(|| err(0, "missing counts line".into()))?;
        let words: Vec<&str> = counts_line.split_whitespace().collect();
        let counts = match words.as_slice() {
            ["counts", rest @ ..] if rest.len() == 3 => numbers(rest)?,
            _ => return Err(err(n, format!("expected 'counts <states> <actions> <hidden>', got '{counts_line}'"))),
        };
        let mut topo = Self::from_kind(&kind, counts[0], counts[1]).map_err(|e| err(n, e.to_string()))?;
        if topo.hidden_count != counts[2] {
            return Err(err(
                n,
                format!("kind implies {} hidden nodes, counts say {}", topo.hidden_count, counts[2]),
            ));
        }

        let mut vh_index: HashMap<(NodeId, usize), usize> = HashMap::new();
        for (e, &key) in topo.vh_edges.iter().enumerate() {
            vh_index.insert(key, e);
        }
        let mut hh_index: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, &key) in topo.hh_edges.iter().enumerate() {
            hh_index.insert(key, e);
        }
        let mut vh_seen = vec![false; topo.vh_edges.len()];
        let mut hh_seen = vec![false; topo.hh_edges.len()];

        for (n, line) in lines {
            let words: Vec<&str> = line.split_whitespace().collect();
            let ["edge", u, v, w] = words.as_slice() else {
                return Err(err(n, format!("expected 'edge <u> <v> <weight>', got '{line}'")));
            };
            let u = parse_node(u).ok_or_else(|| err(n, format!("bad node '{u}'")))?;
            let v = parse_node(v).ok_or_else(|| err(n, format!("bad node '{v}'")))?;
            let weight: f64 = w.parse().map_err(|_| err(n, format!("bad weight '{w}'")))?;
            if !weight.is_finite() {
                return Err(err(n, format!("non-finite weight '{w}'")));
            }
            let (slot, seen, weights) = match (u.kind, v.kind) {
                (NodeKind::Hidden, NodeKind::Hidden) => {
                    let key = (u.index.min(v.index), u.index.max(v.index));
                    let e = *hh_index.get(&key).ok_or_else(|| err(n, format!("no edge {u}-{v} in this topology")))?;
                    (e, &mut hh_seen, &mut topo.hh_weights)
                }
                (_, NodeKind::Hidden) | (NodeKind::Hidden, _) => {
                    let (vis, hid) = if v.kind == NodeKind::Hidden { (u, v) } else { (v, u) };
                    let e = *vh_index
                        .get(&(vis, hid.index))
                        .ok_or_else(|| err(n, format!("no edge {u}-{v} in this topology")))?;
                    (e, &mut vh_seen, &mut topo.vh_weights)
                }
                _ => return Err(err(n, format!("visible-visible edge {u}-{v} not allowed"))),
            };
            if seen[slot] {
                return Err(err(n, format!("duplicate edge {u}-{v}")));
            }
            seen[slot] = true;
            weights[slot] = weight;
        }
        let missing = vh_seen.iter().chain(&hh_seen).filter(|s| !**s).count();
        if missing > 0 {
            return Err(err(text.lines().count(), format!("{missing} edges missing from checkpoint")));
        }
        Ok(topo)
    }
}

fn parse_node(token: &str) -> Option<NodeId> {
    let (prefix, rest) = token.split_at(1.min(token.len()));
    let index = rest.parse().ok()?;
    match prefix {
        "s" => Some(NodeId::state(index)),
        "a" => Some(NodeId::action(index)),
        "h" => Some(NodeId::hidden(index)),
        _ => None,
    }
}

fn check_finite_len(weights: &[f64], expected: usize) -> Result<()> {
    if weights.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: weights.len(),
        });
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::InvalidParameter("weights must be finite".into()));
    }
    Ok(())
}

/// Position of the single 1 in a one-hot vector of the given width.
pub fn one_hot_index(encoding: &[u8], width: usize, what: &str) -> Result<usize> {
    if encoding.len() != width {
        return Err(Error::InvalidEncoding(format!(
            "{what} encoding has width {}, expected {width}",
            encoding.len()
        )));
    }
    let mut hot = None;
    for (i, &v) in encoding.iter().enumerate() {
        match v {
            0 => {}
            1 if hot.is_none() => hot = Some(i),
            _ => return Err(Error::InvalidEncoding(format!("{what} encoding is not one-hot"))),
        }
    }
    hot.ok_or_else(|| Error::InvalidEncoding(format!("{what} encoding is all zeros")))
}

pub fn one_hot(index: usize, width: usize) -> Vec<u8> {
    let mut v = vec![0; width];
    v[index] = 1;
    v
}
