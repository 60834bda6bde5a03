//! Free-energy based Q-learning: `Q(s, a) ≈ -F(s, a)` of the Boltzmann machine
//! clamped at `(s, a)`, trained with TD(0).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::free_energy::{
    estimate_binary_observables, estimate_classical_free_energy, exact_classical_moments, estimate_effective_free_energy,
    estimate_observables, rbm_free_energy, rbm_hidden_means, ObservableEstimate,
};
use crate::gridworld::{Action, GridWorld, PolicyTable};
use crate::ising::{BinaryConfiguration, ClampedModel, TfimParameters};
use crate::sampler::{
    sa_sample, sqa_sample, stack_replicas, AnnealSchedule, SamplePool, DEFAULT_REPLICAS,
    DEFAULT_SA_INITIAL_BETA, DEFAULT_SA_SWEEPS, DEFAULT_SQA_INITIAL_GAMMA, DEFAULT_SQA_SWEEPS,
};
use crate::ising::SpinConfiguration;
use crate::topology::{NetworkTopology, WeightDeltas, DEFAULT_INIT_SCALE};

#[derive(Debug, Clone, PartialEq)]
pub struct SaSettings {
    pub sweeps: usize,
    pub initial_beta: f64,
    pub reads: usize,
}

impl Default for SaSettings {
    fn default() -> Self {
        Self {
            sweeps: DEFAULT_SA_SWEEPS,
            initial_beta: DEFAULT_SA_INITIAL_BETA,
            reads: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqaSettings {
    pub sweeps: usize,
    pub initial_gamma: f64,
    pub reads: usize,
}

impl Default for SqaSettings {
    fn default() -> Self {
        Self {
            sweeps: DEFAULT_SQA_SWEEPS,
            initial_gamma: DEFAULT_SQA_INITIAL_GAMMA,
            reads: 20,
        }
    }
}

/// Stand-in for annealing hardware: each read is the first Trotter slice of an
/// SQA run at the emulator's own physical parameters. The virtual `(β, Γ)`
/// used to interpret the reads are separate, as they would be for a device.
#[derive(Debug, Clone, PartialEq)]
pub struct EmulatorSettings {
    pub sweeps: usize,
    pub initial_gamma: f64,
    pub final_gamma: f64,
    pub beta: f64,
    pub replicas: usize,
    pub reads: usize,
    /// Effective configurations assembled from the reads by replica stacking.
    pub stacked: usize,
}

impl Default for EmulatorSettings {
    fn default() -> Self {
        Self {
            sweeps: 50,
            initial_gamma: DEFAULT_SQA_INITIAL_GAMMA,
            final_gamma: 0.5,
            beta: 2.0,
            replicas: 8,
            reads: 30,
            stacked: 150,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    /// Exact free energy of a coupling-free network.
    RbmClosedForm,
    /// Exact classical free energy and moments by enumerating the hidden
    /// configurations; a noise-free reference for the sampled backends.
    ExactClassical,
    /// SA reads of the binary machine, classical free energy at virtual β.
    Sa(SaSettings),
    /// SQA effective configurations, quantum free energy at virtual (β, Γ).
    Sqa(SqaSettings),
    /// Emulated single-slice reads stacked into effective configurations.
    ExternalStacked(EmulatorSettings),
    /// Emulated reads treated as classical configurations at virtual β.
    ExternalClassical(EmulatorSettings),
}

impl Backend {
    /// Whether the backend estimates the quantum free energy.
    pub fn is_quantum(&self) -> bool {
        matches!(self, Backend::Sqa(_) | Backend::ExternalStacked(_))
    }

    /// Interpretation applied to single-slice reads, for backends that have
    /// one. SQA produces full effective configurations and the closed form
    /// draws no samples, so both return `None`.
    pub fn route(&self) -> Option<Route> {
        match self {
            Backend::Sa(_) | Backend::ExternalClassical(_) => Some(Route::Classical),
            Backend::ExternalStacked(e) => Some(Route::Quantum { stacked: e.stacked }),
            Backend::RbmClosedForm | Backend::ExactClassical | Backend::Sqa(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exploration {
    Greedy,
    EpsilonGreedy(f64),
}

/// How `a'` in the TD target is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NextAction {
    Greedy,
    OnPolicy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub learning_rate: f64,
    pub discount: f64,
    pub training_samples: usize,
    pub backend: Backend,
    pub params: TfimParameters,
    pub exploration: Exploration,
    pub next_action: NextAction,
    pub init_scale: f64,
    /// Rewards are multiplied by this before entering the TD error.
    pub reward_scale: f64,
    /// The greedy policy is re-evaluated every this many samples and held in
    /// between; the last sample is always evaluated.
    pub snapshot_interval: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            discount: 0.8,
            training_samples: 500,
            backend: Backend::RbmClosedForm,
            params: TfimParameters::new(0.5, 2.0, DEFAULT_REPLICAS).expect("valid defaults"),
            exploration: Exploration::EpsilonGreedy(0.3),
            next_action: NextAction::Greedy,
            init_scale: DEFAULT_INIT_SCALE,
            reward_scale: 1.0,
            snapshot_interval: 1,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning rate must be > 0, got {}", self.learning_rate));
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return bad(format!("discount must lie in (0, 1), got {}", self.discount));
        }
        if self.training_samples == 0 {
            return bad("training samples must be >= 1".into());
        }
        if self.snapshot_interval == 0 {
            return bad("snapshot interval must be >= 1".into());
        }
        if !self.reward_scale.is_finite() || self.reward_scale <= 0.0 {
            return bad(format!("reward scale must be > 0, got {}", self.reward_scale));
        }
        if let Exploration::EpsilonGreedy(e) = self.exploration {
            if !(0.0..=1.0).contains(&e) {
                return bad(format!("exploration rate must lie in [0, 1], got {e}"));
            }
        }
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::Config(format!("{name} must be >= 1")))
            } else {
                Ok(())
            }
        };
        match &self.backend {
            Backend::RbmClosedForm | Backend::ExactClassical => {}
            Backend::Sa(s) => {
                positive("sa sweeps", s.sweeps)?;
                positive("sa reads", s.reads)?;
            }
            Backend::Sqa(s) => {
                positive("sqa sweeps", s.sweeps)?;
                positive("sqa reads", s.reads)?;
                if self.params.gamma <= 0.0 {
                    return bad("the SQA backend needs a virtual Γ > 0".into());
                }
            }
            Backend::ExternalStacked(e) | Backend::ExternalClassical(e) => {
                positive("emulator sweeps", e.sweeps)?;
                positive("emulator reads", e.reads)?;
                positive("emulator replicas", e.replicas)?;
                positive("stacked configurations", e.stacked)?;
                if e.final_gamma <= 0.0 || e.beta <= 0.0 {
                    return bad("emulator β and final Γ must be > 0".into());
                }
                if matches!(self.backend, Backend::ExternalStacked(_)) && self.params.gamma <= 0.0 {
                    return bad("replica stacking needs a virtual Γ > 0".into());
                }
            }
        }
        Ok(())
    }
}

/// Free energy at one clamped `(s, a)` together with the moments needed for
/// the weight update, all taken from the same pool.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub free_energy: f64,
    pub observables: ObservableEstimate,
}

impl Estimate {
    pub fn q_value(&self) -> f64 {
        -self.free_energy
    }
}

/// Reads of the emulated annealer programmed with `model`.
fn emulator_reads<R: Rng + ?Sized>(
    model: &ClampedModel,
    settings: &EmulatorSettings,
    rng: &mut R,
) -> Result<SamplePool<SpinConfiguration>> {
    let physical = TfimParameters::new(settings.final_gamma, settings.beta, settings.replicas)?;
    let schedule = AnnealSchedule::linear(settings.sweeps, settings.initial_gamma, settings.final_gamma)?;
    let pool = sqa_sample(model, &physical, &schedule, settings.reads, rng)?;
    SamplePool::<SpinConfiguration>::from_replica_slices(&pool, 0)
}

/// How single-slice reads are turned into a free energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Reads are `s = 2h - 1` of the binary machine; classical free energy at β.
    Classical,
    /// Reads are measurements of the ±1 model; `stacked` effective
    /// configurations are assembled and the quantum free energy is taken at
    /// the virtual (β, Γ).
    Quantum { stacked: usize },
}

/// Free energy and moments of `model` from a pool of reads along `route`.
pub fn estimate_from_reads<R: Rng + ?Sized>(
    model: &ClampedModel,
    reads: &SamplePool<SpinConfiguration>,
    route: Route,
    params: &TfimParameters,
    rng: &mut R,
) -> Result<Estimate> {
    match route {
        Route::Classical => {
            let binary: Vec<BinaryConfiguration> =
                reads.configs().iter().map(BinaryConfiguration::from_spins).collect();
            Ok(Estimate {
                free_energy: estimate_classical_free_energy(model, &binary, params.beta)?.value,
                observables: estimate_binary_observables(&binary, model)?,
            })
        }
        Route::Quantum { stacked } => {
            let pool = stack_replicas(reads, params, stacked, rng)?;
            Ok(Estimate {
                free_energy: estimate_effective_free_energy(model, &pool, params)?.value,
                observables: estimate_observables(&pool, model)?,
            })
        }
    }
}

/// Clamps the network at `(state, action)` and estimates its free energy.
pub fn estimate<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    state: usize,
    action: Action,
    backend: &Backend,
    params: &TfimParameters,
    rng: &mut R,
) -> Result<Estimate> {
    let model = topology.clamp_indices(state, action.index())?;
    estimate_clamped(&model, backend, params, rng)
}

/// [`estimate`] for an already clamped model.
pub fn estimate_clamped<R: Rng + ?Sized>(
    model: &ClampedModel,
    backend: &Backend,
    params: &TfimParameters,
    rng: &mut R,
) -> Result<Estimate> {
    let beta = params.beta;
    match backend {
        Backend::RbmClosedForm => Ok(Estimate {
            free_energy: rbm_free_energy(model, beta)?,
            observables: ObservableEstimate {
                sigma_z: rbm_hidden_means(model, beta)?,
                pairs: Vec::new(),
                sigma_zz: Vec::new(),
            },
        }),
        Backend::ExactClassical => {
            let (free_energy, observables) = exact_classical_moments(model, beta)?;
            Ok(Estimate {
                free_energy,
                observables,
            })
        }
        Backend::Sa(s) => {
            let (ising, _) = model.binary_as_ising();
            let schedule = AnnealSchedule::linear(s.sweeps, s.initial_beta, beta)?;
            let reads = sa_sample(&ising, &schedule, s.reads, rng)?;
            estimate_from_reads(model, &reads, Route::Classical, params, rng)
        }
        Backend::Sqa(s) => {
            let schedule = AnnealSchedule::linear(s.sweeps, s.initial_gamma, params.gamma)?;
            let pool = sqa_sample(model, params, &schedule, s.reads, rng)?;
            Ok(Estimate {
                free_energy: estimate_effective_free_energy(model, &pool, params)?.value,
                observables: estimate_observables(&pool, model)?,
            })
        }
        Backend::ExternalStacked(e) => {
            let reads = emulator_reads(model, e, rng)?;
            estimate_from_reads(model, &reads, Route::Quantum { stacked: e.stacked }, params, rng)
        }
        Backend::ExternalClassical(e) => {
            let (ising, _) = model.binary_as_ising();
            let reads = emulator_reads(&ising, e, rng)?;
            estimate_from_reads(model, &reads, Route::Classical, params, rng)
        }
    }
}

pub fn q_value<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    state: usize,
    action: Action,
    backend: &Backend,
    params: &TfimParameters,
    rng: &mut R,
) -> Result<f64> {
    Ok(estimate(topology, state, action, backend, params, rng)?.q_value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub state: usize,
    pub action: Action,
    pub reward: f64,
    pub next_state: usize,
    pub next_action: Action,
}

/// Spreads `step · moments` onto the edges of the active visibles and the
/// hidden-hidden edges.
fn deltas_from_moments(
    topology: &NetworkTopology,
    transition: &Transition,
    observables: &ObservableEstimate,
    step: f64,
) -> WeightDeltas {
    let mut deltas = WeightDeltas::zeros(topology);
    if step == 0.0 {
        return deltas;
    }
    let edges = topology.visible_hidden_edges();
    let active = topology
        .edges_of(crate::ising::NodeId::state(transition.state))
        .iter()
        .chain(topology.edges_of(crate::ising::NodeId::action(transition.action.index())));
    for &e in active {
        deltas.visible_hidden[e] = step * observables.sigma_z[edges[e].1];
    }
    // The pair moments follow the clamped model's coupling order, which is
    // the topology's hidden-hidden edge order.
    for (d, &m) in deltas.hidden_hidden.iter_mut().zip(&observables.sigma_zz) {
        *d = step * m;
    }
    deltas
}

/// `Δw = ε (r - γ F(s',a') + F(s,a)) · (v ⟨σ^z_h⟩ | ⟨σ^z_h σ^z_h'⟩)`.
pub fn td0_update_quantum(
    topology: &NetworkTopology,
    transition: &Transition,
    current: &Estimate,
    next: &Estimate,
    learning_rate: f64,
    discount: f64,
) -> WeightDeltas {
    let td = transition.reward - discount * next.free_energy + current.free_energy;
    deltas_from_moments(topology, transition, &current.observables, learning_rate * td)
}

/// `Δw = ε (r + γ Q(s',a') - Q(s,a)) · (v ⟨h⟩ | ⟨h h'⟩)` with binary moments.
pub fn td0_update_classical(
    topology: &NetworkTopology,
    transition: &Transition,
    moments: &ObservableEstimate,
    q_current: f64,
    q_next: f64,
    learning_rate: f64,
    discount: f64,
) -> WeightDeltas {
    let td = transition.reward + discount * q_next - q_current;
    deltas_from_moments(topology, transition, moments, learning_rate * td)
}

/// Index of the largest value, ties broken uniformly at random.
pub fn argmax_random_tie<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> usize {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..values.len()).filter(|&i| values[i] == best).collect();
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.random_range(0..ties.len())]
    }
}

fn estimate_all<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    state: usize,
    backend: &Backend,
    params: &TfimParameters,
    rng: &mut R,
) -> Result<Vec<Estimate>> {
    Action::ALL
        .iter()
        .map(|&a| estimate(topology, state, a, backend, params, rng))
        .collect()
}

fn greedy<R: Rng + ?Sized>(estimates: &[Estimate], rng: &mut R) -> Action {
    let q: Vec<f64> = estimates.iter().map(Estimate::q_value).collect();
    Action::ALL[argmax_random_tie(&q, rng)]
}

pub fn select_action<R: Rng + ?Sized>(
    topology: &NetworkTopology,
    state: usize,
    backend: &Backend,
    params: &TfimParameters,
    rng: &mut R,
    exploration: Exploration,
) -> Result<Action> {
    if let Exploration::EpsilonGreedy(e) = exploration {
        if rng.random::<f64>() < e {
            return Ok(Action::ALL[rng.random_range(0..Action::ALL.len())]);
        }
    }
    let estimates = estimate_all(topology, state, backend, params, rng)?;
    Ok(greedy(&estimates, rng))
}

/// Greedy policy over every state of `env`.
pub fn greedy_policy<R: Rng + ?Sized>(
    env: &GridWorld,
    topology: &NetworkTopology,
    backend: &Backend,
    params: &TfimParameters,
    rng: &mut R,
) -> Result<PolicyTable> {
    (0..env.state_count())
        .map(|s| select_action(topology, s, backend, params, rng, Exploration::Greedy))
        .collect::<Result<_>>()
        .map(PolicyTable::new)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingHistory {
    /// Greedy policy after each training sample.
    pub snapshots: Vec<PolicyTable>,
    pub td_errors: Vec<f64>,
    pub final_topology: Option<NetworkTopology>,
}

impl TrainingHistory {
    pub fn snapshots(&self) -> &[PolicyTable] {
        &self.snapshots
    }
}

/// Runs `config.training_samples` independent TD(0) updates. Each sample
/// draws a state uniformly, acts by the exploration rule, steps the
/// environment and updates the weights from the estimates at `(s, a)` and
/// `(s', a')`.
pub fn train(
    env: &GridWorld,
    topology: &NetworkTopology,
    config: &AgentConfig,
    seed: u64,
) -> Result<TrainingHistory> {
    config.validate()?;
    if topology.state_count() != env.state_count() {
        return Err(Error::DimensionMismatch {
            expected: env.state_count(),
            got: topology.state_count(),
        });
    }
    if matches!(config.backend, Backend::RbmClosedForm) && !topology.hidden_hidden_edges().is_empty() {
        return Err(Error::NotAnRbm(topology.hidden_hidden_edges().len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net = topology.init_weights(&mut rng, config.init_scale)?;
    let backend = &config.backend;
    let params = &config.params;
    let samples = config.training_samples;
    let mut snapshots = Vec::with_capacity(samples);
    let mut td_errors = Vec::with_capacity(samples);

    for i in 0..samples {
        let s = rng.random_range(0..env.state_count());
        let explore = match config.exploration {
            Exploration::Greedy => false,
            Exploration::EpsilonGreedy(e) => rng.random::<f64>() < e,
        };
        let (a, current) = if explore {
            let a = Action::ALL[rng.random_range(0..Action::ALL.len())];
            (a, estimate(&net, s, a, backend, params, &mut rng)?)
        } else {
            let mut all = estimate_all(&net, s, backend, params, &mut rng)?;
            let a = greedy(&all, &mut rng);
            (a, all.swap_remove(a.index()))
        };
        let (next_state, reward) = env.step(s, a)?;
        let reward = reward * config.reward_scale;
        let (next_action, next) = match config.next_action {
            NextAction::Greedy => {
                let mut all = estimate_all(&net, next_state, backend, params, &mut rng)?;
                let a = greedy(&all, &mut rng);
                (a, all.swap_remove(a.index()))
            }
            NextAction::OnPolicy => {
                let a = select_action(&net, next_state, backend, params, &mut rng, config.exploration)?;
                (a, estimate(&net, next_state, a, backend, params, &mut rng)?)
            }
        };
        let transition = Transition {
            state: s,
            action: a,
            reward,
            next_state,
            next_action,
        };
        let deltas = if backend.is_quantum() {
            td0_update_quantum(&net, &transition, &current, &next, config.learning_rate, config.discount)
        } else {
            td0_update_classical(
                &net,
                &transition,
                &current.observables,
                current.q_value(),
                next.q_value(),
                config.learning_rate,
                config.discount,
            )
        };
        td_errors.push(reward + config.discount * next.q_value() - current.q_value());
        net.apply(&deltas);

        let evaluate = (i + 1) % config.snapshot_interval == 0 || i + 1 == samples || i == 0;
        if evaluate {
            snapshots.push(greedy_policy(env, &net, backend, params, &mut rng)?);
        } else {
            let last = snapshots.last().cloned().expect("first sample is always evaluated");
            snapshots.push(last);
        }
    }
    Ok(TrainingHistory {
        snapshots,
        td_errors,
        final_topology: Some(net),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::NodeId;
    use crate::topology::{ACTION_COUNT, GRID_STATE_COUNT};
    use approx::assert_relative_eq;

    fn rbm() -> NetworkTopology {
        NetworkTopology::rbm(GRID_STATE_COUNT, ACTION_COUNT, 16).unwrap()
    }

    fn params() -> TfimParameters {
        TfimParameters::new(0.5, 2.0, 25).unwrap()
    }

    #[test]
    fn zero_weights_give_uniform_q() {
        let net = rbm();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in [0, 5, 13] {
            for a in Action::ALL {
                let q = q_value(&net, s, a, &Backend::RbmClosedForm, &params(), &mut rng).unwrap();
                assert_relative_eq!(q, 16.0 * 2f64.ln() / 2.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_td_error_gives_zero_deltas() {
        let net = rbm().init_weights(&mut ChaCha8Rng::seed_from_u64(3), 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let e = estimate(&net, 2, Action::Up, &Backend::RbmClosedForm, &params(), &mut rng).unwrap();
        let gamma = 0.8;
        // r + γQ' - Q = 0 with Q' = Q requires r = (1 - γ) Q
        let t = Transition {
            state: 2,
            action: Action::Up,
            reward: (1.0 - gamma) * e.q_value(),
            next_state: 2,
            next_action: Action::Up,
        };
        let d = td0_update_classical(&net, &t, &e.observables, e.q_value(), e.q_value(), 0.01, gamma);
        assert!(d.visible_hidden.iter().all(|x| x.abs() < 1e-15));
        let d = td0_update_quantum(&net, &t, &e, &e, 0.01, gamma);
        assert!(d.visible_hidden.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn only_active_visibles_move() {
        let net = rbm().init_weights(&mut ChaCha8Rng::seed_from_u64(5), 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e = estimate(&net, 3, Action::Left, &Backend::RbmClosedForm, &params(), &mut rng).unwrap();
        let t = Transition {
            state: 3,
            action: Action::Left,
            reward: 100.0,
            next_state: 2,
            next_action: Action::Stay,
        };
        let d = td0_update_classical(&net, &t, &e.observables, e.q_value(), 0.0, 0.01, 0.8);
        let active: Vec<usize> = net
            .edges_of(NodeId::state(3))
            .iter()
            .chain(net.edges_of(NodeId::action(Action::Left.index())))
            .copied()
            .collect();
        for (i, &x) in d.visible_hidden.iter().enumerate() {
            assert_eq!(x != 0.0, active.contains(&i), "edge {i}");
        }
    }

    #[test]
    fn single_hidden_node_hand_computed_update() {
        // One state, one action, one hidden node: w_s = 0.2, w_a = -0.1.
        let mut net = NetworkTopology::rbm(1, 1, 1).unwrap();
        net.set_visible_hidden_weights(&[0.2, -0.1]).unwrap();
        let current = Estimate {
            free_energy: -1.5,
            observables: ObservableEstimate {
                sigma_z: vec![0.4],
                pairs: vec![],
                sigma_zz: vec![],
            },
        };
        let next = Estimate {
            free_energy: -2.0,
            observables: current.observables.clone(),
        };
        let t = Transition {
            state: 0,
            action: Action::Up,
            reward: 1.0,
            next_state: 0,
            next_action: Action::Up,
        };
        // δ = 1 - 0.8·(-2) + (-1.5) = 1.1; Δ = 0.1 · 1.1 · 0.4 = 0.044
        let d = td0_update_quantum(&net, &t, &current, &next, 0.1, 0.8);
        for x in d.visible_hidden {
            assert_relative_eq!(x, 0.044, epsilon = 1e-15);
        }
    }

    #[test]
    fn full_exploration_is_uniform() {
        let net = rbm().init_weights(&mut ChaCha8Rng::seed_from_u64(7), 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut counts = [0usize; 5];
        for _ in 0..5000 {
            let a = select_action(&net, 0, &Backend::RbmClosedForm, &params(), &mut rng, Exploration::EpsilonGreedy(1.0)).unwrap();
            counts[a.index()] += 1;
        }
        assert!(counts.iter().all(|&c| (900..1100).contains(&c)), "{counts:?}");
    }

    #[test]
    fn training_is_reproducible_and_sized() {
        let env = GridWorld::canonical();
        let config = AgentConfig {
            training_samples: 20,
            ..AgentConfig::default()
        };
        let a = train(&env, &rbm(), &config, 11).unwrap();
        let b = train(&env, &rbm(), &config, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.snapshots.len(), 20);
        let one = train(&env, &rbm(), &AgentConfig { training_samples: 1, ..config }, 11).unwrap();
        assert_eq!(one.snapshots.len(), 1);
    }

    #[test]
    fn rbm_backend_rejects_coupled_topologies() {
        let env = GridWorld::canonical();
        let err = train(&env, &NetworkTopology::chimera_two_cell(), &AgentConfig::default(), 0).unwrap_err();
        assert!(matches!(err, Error::NotAnRbm(_)));
    }
}
