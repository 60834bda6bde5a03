//! The 3×5 grid-world MDP, its one-hot encodings, a value-iteration oracle and
//! the fidelity metric.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::topology::one_hot_index;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
    Stay,
}

impl Action {
    pub const ALL: [Action; 5] = [Action::Up, Action::Down, Action::Left, Action::Right, Action::Stay];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Result<Self> {
        Self::ALL
            .get(i)
            .copied()
            .ok_or_else(|| Error::InvalidEncoding(format!("action index {i} out of range")))
    }

    fn delta(self) -> (isize, isize) {
        match self {
            Action::Up => (-1, 0),
            Action::Down => (1, 0),
            Action::Left => (0, -1),
            Action::Right => (0, 1),
            Action::Stay => (0, 0),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
            Action::Stay => "stay",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Neutral,
    Reward,
    Penalty,
    Wall,
}

pub const REWARD_VALUE: f64 = 200.0;
pub const NEUTRAL_VALUE: f64 = 100.0;
pub const PENALTY_VALUE: f64 = 0.0;
pub const DEFAULT_DISCOUNT: f64 = 0.8;

/// Layout used throughout: reward top-left, wall in the middle row, penalty
/// below it.
pub const CANONICAL_MAP: &str = "R....\n..W..\n..P..\n";

#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    rows: usize,
    cols: usize,
    cells: Vec<Cell>,
    /// Non-wall cells in row-major order; a state is an index into this list.
    states: Vec<(usize, usize)>,
    reward_value: f64,
    neutral_value: f64,
    penalty_value: f64,
    discount: f64,
}

impl GridWorld {
    pub fn canonical() -> Self {
        Self::parse_map(CANONICAL_MAP, Path::new("<canonical>")).expect("canonical map is valid")
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<Cell>) -> Result<Self> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "grid of {rows}x{cols} needs {} cells, got {}",
                rows * cols,
                cells.len()
            )));
        }
        let states: Vec<_> = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .filter(|&(r, c)| cells[r * cols + c] != Cell::Wall)
            .collect();
        if states.is_empty() {
            return Err(Error::InvalidParameter("grid has no open cells".into()));
        }
        Ok(Self {
            rows,
            cols,
            cells,
            states,
            reward_value: REWARD_VALUE,
            neutral_value: NEUTRAL_VALUE,
            penalty_value: PENALTY_VALUE,
            discount: DEFAULT_DISCOUNT,
        })
    }

    /// Parses `R`, `W`, `P` and `.` characters, one row per line.
    pub fn parse_map(text: &str, origin: &Path) -> Result<Self> {
        let mut cells = Vec::new();
        let mut cols = None;
        let mut rows = 0;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message,
            };
            let row: Vec<Cell> = line
                .chars()
                .map(|ch| match ch {
                    'R' => Ok(Cell::Reward),
                    'W' => Ok(Cell::Wall),
                    'P' => Ok(Cell::Penalty),
                    '.' => Ok(Cell::Neutral),
                    other => Err(parse_err(format!("unexpected map character {other:?}"))),
                })
                .collect::<Result<_>>()?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(parse_err(format!("row has {} cells, expected {c}", row.len())))
                }
                _ => {}
            }
            cells.extend(row);
            rows += 1;
        }
        let cols = cols.ok_or_else(|| Error::Parse {
            path: origin.to_path_buf(),
            line: 0,
            message: "map is empty".into(),
        })?;
        Self::from_cells(rows, cols, cells)
    }

    pub fn load_map(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_map(&text, path)
    }

    pub fn with_discount(mut self, discount: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&discount) {
            return Err(Error::InvalidParameter(format!("discount must lie in [0, 1), got {discount}")));
        }
        self.discount = discount;
        Ok(self)
    }

    /// Replaces the reward, neutral and penalty cell values.
    pub fn with_values(mut self, reward: f64, neutral: f64, penalty: f64) -> Self {
        self.reward_value = reward;
        self.neutral_value = neutral;
        self.penalty_value = penalty;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn cell(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.cols + col]
    }

    pub fn position(&self, state: usize) -> Result<(usize, usize)> {
        self.states
            .get(state)
            .copied()
            .ok_or_else(|| Error::InvalidState(format!("state {state} out of range")))
    }

    pub fn state_at(&self, row: usize, col: usize) -> Result<usize> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::InvalidState(format!("({row}, {col}) is off the grid")));
        }
        self.states
            .binary_search(&(row, col))
            .map_err(|_| Error::InvalidState(format!("({row}, {col}) is a wall")))
    }

    fn value_of(&self, row: usize, col: usize) -> f64 {
        match self.cell(row, col) {
            Cell::Reward => self.reward_value,
            Cell::Penalty => self.penalty_value,
            Cell::Neutral | Cell::Wall => self.neutral_value,
        }
    }

    /// Deterministic move. Walls and the grid edge block motion; the reward is
    /// the value of the cell occupied afterwards.
    pub fn step(&self, state: usize, action: Action) -> Result<(usize, f64)> {
        let (r, c) = self.position(state)?;
        let (dr, dc) = action.delta();
        let target = (r as isize + dr, c as isize + dc);
        let (nr, nc) = if target.0 < 0
            || target.1 < 0
            || target.0 >= self.rows as isize
            || target.1 >= self.cols as isize
            || self.cell(target.0 as usize, target.1 as usize) == Cell::Wall
        {
            (r, c)
        } else {
            (target.0 as usize, target.1 as usize)
        };
        Ok((self.state_at(nr, nc)?, self.value_of(nr, nc)))
    }

    pub fn encode_state(&self, state: usize) -> Result<Vec<u8>> {
        self.position(state)?;
        Ok(crate::topology::one_hot(state, self.state_count()))
    }

    /// One-hot encoding of the cell at `(row, col)`; walls are rejected.
    pub fn encode_cell(&self, row: usize, col: usize) -> Result<Vec<u8>> {
        self.encode_state(self.state_at(row, col)?)
    }

    pub fn decode_state(&self, encoding: &[u8]) -> Result<usize> {
        one_hot_index(encoding, self.state_count(), "state")
    }
}

pub fn encode_action(action: Action) -> Vec<u8> {
    crate::topology::one_hot(action.index(), Action::ALL.len())
}

pub fn decode_action(encoding: &[u8]) -> Result<Action> {
    Action::from_index(one_hot_index(encoding, Action::ALL.len(), "action")?)
}

/// Greedy action per state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolicyTable(Vec<Action>);

impl PolicyTable {
    pub fn new(actions: Vec<Action>) -> Self {
        Self(actions)
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn action(&self, state: usize) -> Action {
        self.0[state]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Optimal-action sets per state.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSets(Vec<Vec<Action>>);

impl OptimalSets {
    pub fn new(sets: Vec<Vec<Action>>) -> Self {
        Self(sets)
    }

    pub fn of(&self, state: usize) -> &[Action] {
        &self.0[state]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, state: usize, action: Action) -> bool {
        self.0[state].contains(&action)
    }

    /// A policy taking the first optimal action everywhere.
    pub fn policy(&self) -> PolicyTable {
        PolicyTable(self.0.iter().map(|s| s[0]).collect())
    }

    /// Expected fidelity of a policy drawn uniformly at random.
    pub fn random_policy_fidelity(&self) -> f64 {
        self.0.iter().map(|s| s.len() as f64 / Action::ALL.len() as f64).sum::<f64>()
            / self.0.len() as f64
    }
}

#[derive(Debug, Clone)]
pub struct ValueIteration {
    /// `q[s][a]` with actions in `Action::ALL` order.
    pub q: Vec<[f64; 5]>,
    pub optimal: OptimalSets,
    pub iterations: usize,
}

pub const OPTIMAL_TIE_TOLERANCE: f64 = 1e-9;

/// Iterates `Q ← r + γ max_a' Q(s', a')` until the sup-norm change drops below
/// `tolerance`.
pub fn value_iteration(env: &GridWorld, tolerance: f64) -> Result<ValueIteration> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tolerance}")));
    }
    let n = env.state_count();
    let transitions: Vec<[(usize, f64); 5]> = (0..n)
        .map(|s| {
            let mut t = [(0, 0.0); 5];
            for a in Action::ALL {
                t[a.index()] = env.step(s, a).expect("state in range");
            }
            t
        })
        .collect();
    let mut q = vec![[0.0; 5]; n];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let v: Vec<f64> = q.iter().map(|row| row.iter().copied().fold(f64::MIN, f64::max)).collect();
        let mut change: f64 = 0.0;
        for (row, t) in q.iter_mut().zip(&transitions) {
            for (qa, &(next, reward)) in row.iter_mut().zip(t) {
                let updated = reward + env.discount() * v[next];
                change = change.max((updated - *qa).abs());
                *qa = updated;
            }
        }
        if change < tolerance {
            break;
        }
    }
    let optimal = q
        .iter()
        .map(|row| {
            let best = row.iter().copied().fold(f64::MIN, f64::max);
            Action::ALL
                .into_iter()
                .filter(|a| row[a.index()] >= best - OPTIMAL_TIE_TOLERANCE)
                .collect()
        })
        .collect();
    Ok(ValueIteration {
        q,
        optimal: OptimalSets(optimal),
        iterations,
    })
}

/// Mean and standard error over runs of the per-sample fidelity.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityCurve {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl FidelityCurve {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Average over every sample index.
    pub fn overall_mean(&self) -> f64 {
        self.mean.iter().sum::<f64>() / self.mean.len() as f64
    }
}

pub fn policy_fidelity(policy: &PolicyTable, optimal: &OptimalSets) -> f64 {
    let hits = policy
        .actions()
        .iter()
        .enumerate()
        .filter(|&(s, &a)| optimal.contains(s, a))
        .count();
    hits as f64 / optimal.len() as f64
}

/// Fraction of (run, state) pairs whose snapshot action is optimal, per sample
/// index. `runs[l][i]` is run `l`'s policy after sample `i`.
pub fn fidelity(runs: &[&[PolicyTable]], optimal: &OptimalSets) -> Result<FidelityCurve> {
    let first = runs
        .first()
        .ok_or_else(|| Error::LengthMismatch("no runs to score".into()))?;
    let samples = first.len();
    for (l, run) in runs.iter().enumerate() {
        if run.len() != samples {
            return Err(Error::LengthMismatch(format!(
                "run {l} has {} snapshots, run 0 has {samples}",
                run.len()
            )));
        }
        if let Some(p) = run.iter().find(|p| p.len() != optimal.len()) {
            return Err(Error::LengthMismatch(format!(
                "run {l} has a policy over {} states, expected {}",
                p.len(),
                optimal.len()
            )));
        }
    }
    let count = runs.len() as f64;
    let mut mean = Vec::with_capacity(samples);
    let mut stderr = Vec::with_capacity(samples);
    for i in 0..samples {
        let values: Vec<f64> = runs.iter().map(|run| policy_fidelity(&run[i], optimal)).collect();
        let m = values.iter().sum::<f64>() / count;
        let se = if runs.len() > 1 {
            let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (count - 1.0);
            (var / count).sqrt()
        } else {
            0.0
        };
        mean.push(m);
        stderr.push(se);
    }
    Ok(FidelityCurve { mean, stderr })
}
