//! TOML experiment configuration. Every section and key is optional; missing
//! values take the defaults below.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::agent::{
    AgentConfig, Backend, EmulatorSettings, Exploration, NextAction, SaSettings, SqaSettings,
};
use crate::dqn::DqnConfig;
use crate::error::{Error, Result};
use crate::gridworld::GridWorld;
use crate::ising::TfimParameters;
use crate::topology::{ChimeraSide, NetworkTopology, ACTION_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rbm,
    SaBipartite,
    SaChimera,
    SqaBipartite,
    SqaChimera,
    ExternalStacked,
    ExternalClassical,
    Dqn,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Rbm,
        Method::SaBipartite,
        Method::SaChimera,
        Method::SqaBipartite,
        Method::SqaChimera,
        Method::ExternalStacked,
        Method::ExternalClassical,
        Method::Dqn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rbm => "rbm",
            Method::SaBipartite => "sa-bipartite",
            Method::SaChimera => "sa-chimera",
            Method::SqaBipartite => "sqa-bipartite",
            Method::SqaChimera => "sqa-chimera",
            Method::ExternalStacked => "external-stacked",
            Method::ExternalClassical => "external-classical",
            Method::Dqn => "dqn",
        }
    }

    /// Fixed identifier mixed into run seeds, independent of list order.
    pub fn stream_id(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub seed: u64,
    pub runs: usize,
    pub samples: usize,
    pub methods: Vec<Method>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            seed: 2024,
            runs: 100,
            samples: 500,
            methods: Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct AgentSection {
    pub learning_rate: f64,
    pub discount: f64,
    /// Probability of a uniform random action; 0 means purely greedy.
    pub exploration: f64,
    /// "greedy" or "on-policy".
    pub next_action: String,
    pub init_scale: f64,
    pub reward_scale: f64,
    /// Learning rate and reward scale for methods whose Q comes from the
    /// replica free energy. Its plug-in entropy is biased per clamping, so
    /// these runs need larger Q gaps than the classical ones.
    pub quantum_learning_rate: f64,
    pub quantum_reward_scale: f64,
    pub beta: f64,
    pub gamma: f64,
    pub replicas: usize,
    /// "first" or "second" Chimera side wired to the state nodes.
    pub chimera_state_side: String,
    pub dbm_layers: Vec<usize>,
    pub rbm_hidden: usize,
}

impl Default for AgentSection {
    fn default() -> Self {
        Self {
            learning_rate: 0.13,
            discount: 0.8,
            exploration: 0.2,
            next_action: "greedy".into(),
            init_scale: 0.5,
            reward_scale: 0.0075,
            quantum_learning_rate: 0.01,
            quantum_reward_scale: 0.1,
            beta: 2.0,
            gamma: 0.5,
            replicas: 8,
            chimera_state_side: "first".into(),
            dbm_layers: vec![8, 8],
            rbm_hidden: 16,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SaSection {
    pub sweeps: usize,
    pub initial_beta: f64,
    pub reads: usize,
    pub snapshot_interval: usize,
}

impl Default for SaSection {
    fn default() -> Self {
        Self {
            sweeps: 30,
            initial_beta: 0.1,
            reads: 10,
            snapshot_interval: 25,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct SqaSection {
    pub sweeps: usize,
    pub initial_gamma: f64,
    pub reads: usize,
    pub snapshot_interval: usize,
}

impl Default for SqaSection {
    fn default() -> Self {
        Self {
            sweeps: 30,
            initial_gamma: 8.0,
            reads: 10,
            snapshot_interval: 25,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExternalSection {
    pub sweeps: usize,
    pub initial_gamma: f64,
    pub final_gamma: f64,
    pub beta: f64,
    pub replicas: usize,
    pub reads: usize,
    pub stacked: usize,
    pub snapshot_interval: usize,
}

impl Default for ExternalSection {
    fn default() -> Self {
        let e = EmulatorSettings::default();
        Self {
            sweeps: e.sweeps,
            initial_gamma: e.initial_gamma,
            final_gamma: e.final_gamma,
            beta: e.beta,
            replicas: e.replicas,
            reads: e.reads,
            stacked: e.stacked,
            snapshot_interval: 25,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct DqnSection {
    pub learning_rate: f64,
    pub hidden: Vec<usize>,
    pub init_scale: f64,
    pub reward_scale: f64,
}

impl Default for DqnSection {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            hidden: vec![8, 8],
            init_scale: 0.1,
            reward_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct HeatmapSection {
    pub betas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub runs: usize,
    pub samples: usize,
}

impl Default for HeatmapSection {
    fn default() -> Self {
        Self {
            betas: vec![0.5, 1.0, 2.0, 4.0],
            gammas: vec![0.0, 0.1, 0.25, 0.5, 1.0, 2.0],
            runs: 10,
            samples: 300,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridworldSection {
    /// Map file; the built-in 3×5 layout when absent.
    pub map: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub agent: AgentSection,
    pub sa: SaSection,
    pub sqa: SqaSection,
    pub external: ExternalSection,
    pub dqn: DqnSection,
    pub heatmap: HeatmapSection,
    pub gridworld: GridworldSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let config: Self = toml::from_str(text)
            .map_err(|e| Error::Config(format!("{}: {}", origin.display(), e.message())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    /// Checks everything that can be checked before a run starts.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.experiment.runs == 0 || self.experiment.samples == 0 {
            return bad("experiment runs and samples must be >= 1");
        }
        if self.experiment.methods.is_empty() {
            return bad("experiment methods must not be empty");
        }
        let h = &self.heatmap;
        if h.betas.is_empty() || h.gammas.is_empty() {
            return bad("heatmap grids must not be empty");
        }
        if h.runs == 0 || h.samples == 0 {
            return bad("heatmap runs and samples must be >= 1");
        }
        if h.betas.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return bad("heatmap betas must be positive");
        }
        if h.gammas.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
            return bad("heatmap gammas must be >= 0");
        }
        if self.dqn.hidden.contains(&0) || !(self.dqn.learning_rate > 0.0) || !(self.dqn.reward_scale > 0.0) {
            return bad("dqn hidden widths, learning rate and reward scale must be positive");
        }
        self.chimera_side()?;
        self.next_action()?;
        for &method in &self.experiment.methods {
            self.topology(method)?;
            if method != Method::Dqn {
                self.agent_config(method, self.experiment.samples)?.validate()?;
            }
        }
        for &beta in &h.betas {
            for &gamma in &h.gammas {
                self.heatmap_agent(beta, gamma)?.validate()?;
            }
        }
        Ok(())
    }

    pub fn environment(&self) -> Result<GridWorld> {
        let env = match &self.gridworld.map {
            Some(path) => GridWorld::load_map(path)?,
            None => GridWorld::canonical(),
        };
        env.with_discount(self.agent.discount)
    }

    fn chimera_side(&self) -> Result<ChimeraSide> {
        match self.agent.chimera_state_side.as_str() {
            "first" => Ok(ChimeraSide::First),
            "second" => Ok(ChimeraSide::Second),
            other => Err(Error::Config(format!("chimera_state_side must be first or second, got {other:?}"))),
        }
    }

    fn next_action(&self) -> Result<NextAction> {
        match self.agent.next_action.as_str() {
            "greedy" => Ok(NextAction::Greedy),
            "on-policy" => Ok(NextAction::OnPolicy),
            other => Err(Error::Config(format!("next_action must be greedy or on-policy, got {other:?}"))),
        }
    }

    fn params(&self, beta: f64, gamma: f64) -> Result<TfimParameters> {
        TfimParameters::new(gamma, beta, self.agent.replicas).map_err(|e| Error::Config(e.to_string()))
    }

    /// Network used by `method`; the DQN uses none.
    pub fn topology(&self, method: Method) -> Result<Option<NetworkTopology>> {
        let states = self.environment()?.state_count();
        let config_err = |e: Error| Error::Config(e.to_string());
        Ok(match method {
            Method::Rbm => Some(NetworkTopology::rbm(states, ACTION_COUNT, self.agent.rbm_hidden).map_err(config_err)?),
            Method::SaBipartite | Method::SqaBipartite => {
                Some(NetworkTopology::dbm(states, ACTION_COUNT, &self.agent.dbm_layers).map_err(config_err)?)
            }
            Method::SaChimera | Method::SqaChimera | Method::ExternalStacked | Method::ExternalClassical => {
                Some(NetworkTopology::chimera_two_cell_with(self.chimera_side()?, states, ACTION_COUNT))
            }
            Method::Dqn => None,
        })
    }

    fn emulator(&self) -> EmulatorSettings {
        let e = &self.external;
        EmulatorSettings {
            sweeps: e.sweeps,
            initial_gamma: e.initial_gamma,
            final_gamma: e.final_gamma,
            beta: e.beta,
            replicas: e.replicas,
            reads: e.reads,
            stacked: e.stacked,
        }
    }

    fn base_agent(&self, backend: Backend, params: TfimParameters, samples: usize, interval: usize) -> Result<AgentConfig> {
        let a = &self.agent;
        let (learning_rate, reward_scale) = if backend.is_quantum() {
            (a.quantum_learning_rate, a.quantum_reward_scale)
        } else {
            (a.learning_rate, a.reward_scale)
        };
        Ok(AgentConfig {
            learning_rate,
            discount: a.discount,
            training_samples: samples,
            backend,
            params,
            exploration: if a.exploration > 0.0 {
                Exploration::EpsilonGreedy(a.exploration)
            } else {
                Exploration::Greedy
            },
            next_action: self.next_action()?,
            init_scale: a.init_scale,
            reward_scale,
            snapshot_interval: interval,
        })
    }

    /// Agent settings for a learning-curve method other than the DQN.
    pub fn agent_config(&self, method: Method, samples: usize) -> Result<AgentConfig> {
        let params = self.params(self.agent.beta, self.agent.gamma)?;
        let sa = || SaSettings {
            sweeps: self.sa.sweeps,
            initial_beta: self.sa.initial_beta,
            reads: self.sa.reads,
        };
        let sqa = || SqaSettings {
            sweeps: self.sqa.sweeps,
            initial_gamma: self.sqa.initial_gamma,
            reads: self.sqa.reads,
        };
        let (backend, interval) = match method {
            Method::Rbm => (Backend::RbmClosedForm, 1),
            Method::SaBipartite | Method::SaChimera => (Backend::Sa(sa()), self.sa.snapshot_interval),
            Method::SqaBipartite | Method::SqaChimera => (Backend::Sqa(sqa()), self.sqa.snapshot_interval),
            Method::ExternalStacked => (Backend::ExternalStacked(self.emulator()), self.external.snapshot_interval),
            Method::ExternalClassical => (Backend::ExternalClassical(self.emulator()), self.external.snapshot_interval),
            Method::Dqn => return Err(Error::Config("the dqn method has no free-energy agent".into())),
        };
        self.base_agent(backend, params, samples, interval)
    }

    /// Agent for one heatmap cell. Γ = 0 treats the emulator reads as
    /// classical configurations; Γ > 0 stacks them into replicas.
    pub fn heatmap_agent(&self, beta: f64, gamma: f64) -> Result<AgentConfig> {
        let params = self.params(beta, gamma)?;
        let backend = if gamma == 0.0 {
            Backend::ExternalClassical(self.emulator())
        } else {
            Backend::ExternalStacked(self.emulator())
        };
        self.base_agent(backend, params, self.heatmap.samples, self.external.snapshot_interval)
    }

    pub fn dqn_config(&self, samples: usize) -> DqnConfig {
        DqnConfig {
            hidden: self.dqn.hidden.clone(),
            learning_rate: self.dqn.learning_rate,
            discount: self.agent.discount,
            training_samples: samples,
            exploration: if self.agent.exploration > 0.0 {
                Exploration::EpsilonGreedy(self.agent.exploration)
            } else {
                Exploration::Greedy
            },
            init_scale: self.dqn.init_scale,
            reward_scale: self.dqn.reward_scale,
        }
    }
}
