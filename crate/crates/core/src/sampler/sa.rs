use rand::Rng;

use super::{chain_batch, chain_rng, metropolis, random_spin, AnnealSchedule, PoolSource, SamplePool};
use crate::error::{Error, Result};
use crate::ising::{ClampedModel, SpinConfiguration};
use crate::par;

/// Simulated annealing over the ±1 Ising energy of `model`.
///
/// Each of the `reads` chains starts from uniform random spins and performs
/// `schedule.sweeps` single-spin-flip Metropolis sweeps with β following the
/// schedule; the final configuration of each chain is one read.
pub fn sa_sample<R: Rng + ?Sized>(
    model: &ClampedModel,
    schedule: &AnnealSchedule,
    reads: usize,
    rng: &mut R,
) -> Result<SamplePool<SpinConfiguration>> {
    if !(schedule.final_value > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "final inverse temperature must be > 0, got {}",
            schedule.final_value
        )));
    }
    let pool_seed: u64 = rng.random();
    let n = model.hidden_count();
    let batch = chain_batch(schedule.sweeps * n);
    let configs = par::map_indexed(reads, batch, |chain| {
        let mut rng = chain_rng(pool_seed, chain);
        let mut spins: Vec<i8> = (0..n).map(|_| random_spin(&mut rng)).collect();
        for t in 0..schedule.sweeps {
            let beta = schedule.value_at(t);
            for i in 0..n {
                let delta = 2.0 * f64::from(spins[i]) * model.local_field(i, &spins);
                if metropolis(&mut rng, beta, delta) {
                    spins[i] = -spins[i];
                }
            }
        }
        SpinConfiguration::from_raw(spins)
    });
    Ok(SamplePool::from_parts(configs, PoolSource::Sa))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::Coupling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn strong_bias_pins_spin() {
        // exact P(+1) = 1 / (1 + e^{-2·2·5}) > 0.99999999
        let m = ClampedModel::uncoupled(vec![5.0]).unwrap();
        let s = AnnealSchedule::linear(100, 0.1, 2.0).unwrap();
        let pool = sa_sample(&m, &s, 1000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let up = pool.configs().iter().filter(|c| c.values()[0] == 1).count();
        assert!(up as f64 / 1000.0 >= 0.99);
    }

    #[test]
    fn zero_model_is_unbiased() {
        let m = ClampedModel::uncoupled(vec![0.0; 4]).unwrap();
        let s = AnnealSchedule::linear(10, 0.1, 2.0).unwrap();
        let pool = sa_sample(&m, &s, 2500, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let total: i64 = pool.configs().iter().flat_map(|c| c.values()).map(|&x| i64::from(x)).sum();
        let n = 4.0 * 2500.0;
        let mean = total as f64 / n;
        assert!(mean.abs() < 3.0 / n.sqrt(), "mean {mean}");
    }

    #[test]
    fn ferromagnetic_pair_matches_enumeration() {
        let m = ClampedModel::new(vec![0.0, 0.0], vec![Coupling { a: 0, b: 1, weight: 1.0 }]).unwrap();
        let beta = 2.0;
        let s = AnnealSchedule::linear(200, 0.1, beta).unwrap();
        let reads = 4000;
        let pool = sa_sample(&m, &s, reads, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        // aligned states have energy -1, anti-aligned +1
        let z = 2.0 * (beta).exp() + 2.0 * (-beta).exp();
        let p_aligned_each = beta.exp() / z;
        let p_anti_each = (-beta).exp() / z;
        let mut counts = [0usize; 4];
        for c in pool.configs() {
            let v = c.values();
            counts[usize::from(v[0] < 0) * 2 + usize::from(v[1] < 0)] += 1;
        }
        let exact = [p_aligned_each, p_anti_each, p_anti_each, p_aligned_each];
        let tv: f64 = counts
            .iter()
            .zip(exact)
            .map(|(&c, p)| (c as f64 / reads as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv <= 0.05, "tv {tv}");
    }

    #[test]
    fn seeded_pools_repeat() {
        let m = ClampedModel::new(vec![0.3, -0.2, 0.1], vec![Coupling { a: 0, b: 2, weight: 0.7 }]).unwrap();
        let s = AnnealSchedule::linear(20, 0.1, 2.0).unwrap();
        let a = sa_sample(&m, &s, 64, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sa_sample(&m, &s, 64, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.source(), PoolSource::Sa);
    }

    #[test]
    fn rejects_non_positive_final_beta() {
        let m = ClampedModel::uncoupled(vec![0.0]).unwrap();
        let s = AnnealSchedule::linear(5, 1.0, 0.0).unwrap();
        assert!(sa_sample(&m, &s, 1, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }
}
