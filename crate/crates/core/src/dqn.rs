//! Feed-forward Q-network baseline trained by one-step TD gradient steps.

use rand::distr::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agent::{argmax_random_tie, Exploration, TrainingHistory};
use crate::error::{Error, Result};
use crate::gridworld::{Action, GridWorld, PolicyTable};
use crate::topology::DEFAULT_INIT_SCALE;

pub const DQN_WIDTHS: [usize; 4] = [14, 8, 8, 5];

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Multilayer perceptron with sigmoid hidden layers and a linear output.
///
/// All parameters live in one flat vector; layer `l` stores its
/// `widths[l+1] × widths[l]` weight matrix row-major followed by its biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    widths: Vec<usize>,
    offsets: Vec<usize>,
    params: Vec<f64>,
}

impl Mlp {
    pub fn zeros(widths: &[usize]) -> Result<Self> {
        if widths.len() < 2 || widths.contains(&0) {
            return Err(Error::InvalidParameter(format!("bad layer widths {widths:?}")));
        }
        let mut offsets = vec![0];
        for w in widths.windows(2) {
            offsets.push(offsets.last().unwrap() + w[1] * w[0] + w[1]);
        }
        Ok(Self {
            widths: widths.to_vec(),
            params: vec![0.0; *offsets.last().unwrap()],
            offsets,
        })
    }

    /// Parameters drawn i.i.d. from `U[-scale, scale]`.
    pub fn random<R: Rng + ?Sized>(widths: &[usize], scale: f64, rng: &mut R) -> Result<Self> {
        let mut net = Self::zeros(widths)?;
        if scale > 0.0 {
            let dist = Uniform::new_inclusive(-scale, scale)
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            for p in &mut net.params {
                *p = dist.sample(rng);
            }
        }
        Ok(net)
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    fn layer(&self, l: usize) -> (&[f64], &[f64]) {
        let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
        let start = self.offsets[l];
        let w = &self.params[start..start + fan_in * fan_out];
        let b = &self.params[start + fan_in * fan_out..self.offsets[l + 1]];
        (w, b)
    }

    /// Activations of every layer, input first.
    fn activations(&self, input: &[f64]) -> Result<Vec<Vec<f64>>> {
        if input.len() != self.widths[0] {
            return Err(Error::DimensionMismatch {
                expected: self.widths[0],
                got: input.len(),
            });
        }
        let last = self.widths.len() - 2;
        let mut acts = vec![input.to_vec()];
        for l in 0..=last {
            let (w, b) = self.layer(l);
            let x = &acts[l];
            let z: Vec<f64> = b
                .iter()
                .enumerate()
                .map(|(j, bj)| bj + w[j * x.len()..(j + 1) * x.len()].iter().zip(x).map(|(a, c)| a * c).sum::<f64>())
                .collect();
            acts.push(if l == last { z } else { z.into_iter().map(sigmoid).collect() });
        }
        Ok(acts)
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.activations(input)?.pop().expect("at least one layer"))
    }

    /// `½ (Q(x, a) - target)²`.
    pub fn loss(&self, input: &[f64], output: usize, target: f64) -> Result<f64> {
        let q = self.forward(input)?;
        let d = q[output] - target;
        Ok(0.5 * d * d)
    }

    /// Gradient of [`Self::loss`] with respect to the flat parameter vector.
    pub fn loss_gradient(&self, input: &[f64], output: usize, target: f64) -> Result<Vec<f64>> {
        let acts = self.activations(input)?;
        let layers = self.widths.len() - 1;
        let mut grad = vec![0.0; self.params.len()];
        // dL/dz for the output layer: only the chosen output carries loss.
        let mut delta = vec![0.0; self.widths[layers]];
        delta[output] = acts[layers][output] - target;
        for l in (0..layers).rev() {
            let x = &acts[l];
            let (fan_in, fan_out) = (self.widths[l], self.widths[l + 1]);
            let start = self.offsets[l];
            for j in 0..fan_out {
                for i in 0..fan_in {
                    grad[start + j * fan_in + i] = delta[j] * x[i];
                }
                grad[start + fan_in * fan_out + j] = delta[j];
            }
            if l > 0 {
                let (w, _) = self.layer(l);
                delta = (0..fan_in)
                    .map(|i| {
                        let back: f64 = (0..fan_out).map(|j| w[j * fan_in + i] * delta[j]).sum();
                        back * x[i] * (1.0 - x[i])
                    })
                    .collect();
            }
        }
        Ok(grad)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DqnTransition<'a> {
    pub state: &'a [f64],
    pub action: usize,
    pub reward: f64,
    pub next_state: &'a [f64],
}

/// One SGD step on `½ (r + γ max_a' Q(s', a') - Q(s, a))²` with the target
/// held fixed. Returns the TD error before the step.
pub fn td0_gradient_step(
    net: &mut Mlp,
    transition: &DqnTransition<'_>,
    learning_rate: f64,
    discount: f64,
) -> Result<f64> {
    let next = net.forward(transition.next_state)?;
    let target = transition.reward + discount * next.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let q = net.forward(transition.state)?[transition.action];
    let grad = net.loss_gradient(transition.state, transition.action, target)?;
    for (p, g) in net.params.iter_mut().zip(grad) {
        *p -= learning_rate * g;
    }
    Ok(target - q)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DqnConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub discount: f64,
    pub training_samples: usize,
    pub exploration: Exploration,
    pub init_scale: f64,
    pub reward_scale: f64,
}

impl Default for DqnConfig {
    fn default() -> Self {
        Self {
            hidden: DQN_WIDTHS[1..3].to_vec(),
            learning_rate: 0.01,
            discount: 0.8,
            training_samples: 500,
            exploration: Exploration::EpsilonGreedy(0.3),
            init_scale: DEFAULT_INIT_SCALE,
            reward_scale: 1.0,
        }
    }
}

fn greedy_action<R: Rng + ?Sized>(net: &Mlp, input: &[f64], rng: &mut R) -> Result<Action> {
    Action::from_index(argmax_random_tie(&net.forward(input)?, rng))
}

/// Trains under the same sampling regime as the free-energy agent: uniform
/// states, the same exploration rule, a greedy policy snapshot per sample.
pub fn train_dqn(env: &GridWorld, config: &DqnConfig, seed: u64) -> Result<TrainingHistory> {
    if config.training_samples == 0 {
        return Err(Error::Config("training samples must be >= 1".into()));
    }
    if !(config.discount > 0.0 && config.discount < 1.0) {
        return Err(Error::Config(format!("discount must lie in (0, 1), got {}", config.discount)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut widths = vec![env.state_count()];
    widths.extend(&config.hidden);
    widths.push(Action::ALL.len());
    let mut net = Mlp::random(&widths, config.init_scale, &mut rng)?;
    let inputs: Vec<Vec<f64>> = (0..env.state_count())
        .map(|s| Ok(env.encode_state(s)?.into_iter().map(f64::from).collect()))
        .collect::<Result<_>>()?;

    let mut snapshots = Vec::with_capacity(config.training_samples);
    let mut td_errors = Vec::with_capacity(config.training_samples);
    for _ in 0..config.training_samples {
        let s = rng.random_range(0..env.state_count());
        let explore = match config.exploration {
            Exploration::Greedy => false,
            Exploration::EpsilonGreedy(e) => rng.random::<f64>() < e,
        };
        let a = if explore {
            Action::ALL[rng.random_range(0..Action::ALL.len())]
        } else {
            greedy_action(&net, &inputs[s], &mut rng)?
        };
        let (next, reward) = env.step(s, a)?;
        let transition = DqnTransition {
            state: &inputs[s],
            action: a.index(),
            reward: reward * config.reward_scale,
            next_state: &inputs[next],
        };
        td_errors.push(td0_gradient_step(&mut net, &transition, config.learning_rate, config.discount)?);
        let policy = inputs
            .iter()
            .map(|x| greedy_action(&net, x, &mut rng))
            .collect::<Result<_>>()?;
        snapshots.push(PolicyTable::new(policy));
    }
    Ok(TrainingHistory {
        snapshots,
        td_errors,
        final_topology: None,
    })
}
