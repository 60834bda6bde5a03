//! Spin-configuration samplers.
//!
//! Every backend returns a [`SamplePool`]. Chains are independent and each
//! draws from its own ChaCha stream keyed by `(pool seed, chain index)`; the
//! pool seed is the only value taken from the caller's RNG. The pool therefore
//! does not depend on how chains are scheduled across threads.

mod io;
mod pool;
mod sa;
mod schedule;
mod sqa;
mod stack;

pub use io::{load_external_pool, parse_pool, write_pool};
pub use pool::{PoolSource, SamplePool};
pub use sa::sa_sample;
pub use schedule::{AnnealSchedule, ScheduleKind};
pub use sqa::sqa_sample;
pub use stack::stack_replicas;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SA_SWEEPS: usize = 1000;
pub const DEFAULT_SQA_SWEEPS: usize = 1000;
pub const DEFAULT_SQA_INITIAL_GAMMA: f64 = 8.0;
pub const DEFAULT_SA_INITIAL_BETA: f64 = 0.1;
pub const DEFAULT_REPLICAS: usize = 25;

pub(crate) fn chain_rng(pool_seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(pool_seed);
    rng.set_stream(chain as u64);
    rng
}

/// Chains per rayon batch, so a batch holds roughly `TARGET` spin updates.
pub(crate) fn chain_batch(updates_per_chain: usize) -> usize {
    const TARGET: usize = 200_000;
    (TARGET / updates_per_chain.max(1)).max(1)
}

#[inline]
pub(crate) fn random_spin<R: rand::Rng>(rng: &mut R) -> i8 {
    if rng.random::<bool>() {
        1
    } else {
        -1
    }
}

/// Metropolis acceptance for an energy change `delta` at inverse temperature `beta`.
#[inline]
pub(crate) fn metropolis<R: rand::Rng>(rng: &mut R, beta: f64, delta: f64) -> bool {
    delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp()
}
