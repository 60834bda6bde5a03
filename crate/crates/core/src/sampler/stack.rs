use rand::Rng;

use super::{PoolSource, SamplePool};
use crate::error::{Error, Result};
use crate::ising::{EffectiveConfiguration, SpinConfiguration, TfimParameters};

/// Replica stacking: builds `count` effective configurations, each from
/// `params.replicas` reads drawn uniformly with replacement from `pool` and
/// placed as replicas `1..=r` in draw order.
pub fn stack_replicas<R: Rng + ?Sized>(
    pool: &SamplePool<SpinConfiguration>,
    params: &TfimParameters,
    count: usize,
    rng: &mut R,
) -> Result<SamplePool<EffectiveConfiguration>> {
    let width = pool.width().ok_or(Error::EmptyPool)?;
    let reads = pool.configs();
    let r = params.replicas;
    let configs = (0..count)
        .map(|_| {
            let mut spins = Vec::with_capacity(r * width);
            for _ in 0..r {
                spins.extend_from_slice(reads[rng.random_range(0..reads.len())].values());
            }
            EffectiveConfiguration::from_raw(r, width, spins)
        })
        .collect();
    Ok(SamplePool::from_parts(configs, PoolSource::Stacked))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pool(rows: &[&[i8]]) -> SamplePool<SpinConfiguration> {
        SamplePool::<SpinConfiguration>::new(
            rows.iter().map(|r| SpinConfiguration::new(r.to_vec()).unwrap()).collect(),
            PoolSource::External,
        )
        .unwrap()
    }

    #[test]
    fn shapes_follow_parameters() {
        let rows: Vec<Vec<i8>> = (0..3750).map(|i| (0..16).map(|j| if (i + j) % 3 == 0 { 1 } else { -1 }).collect()).collect();
        let refs: Vec<&[i8]> = rows.iter().map(Vec::as_slice).collect();
        let p = pool(&refs);
        let params = TfimParameters::new(0.5, 2.0, 25).unwrap();
        let out = stack_replicas(&p, &params, 150, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(out.len(), 150);
        assert!(out.configs().iter().all(|c| c.replicas() == 25 && c.width() == 16));
    }

    #[test]
    fn single_read_pool_gives_identical_replicas() {
        let p = pool(&[&[1, -1, 1]]);
        let params = TfimParameters::new(0.5, 2.0, 7).unwrap();
        let out = stack_replicas(&p, &params, 10, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        for c in out.configs() {
            for k in 0..7 {
                assert_eq!(c.replica(k), &[1, -1, 1]);
            }
        }
    }

    #[test]
    fn seeded_and_empty_pool() {
        let p = pool(&[&[1, -1], &[-1, -1], &[1, 1]]);
        let params = TfimParameters::new(0.5, 2.0, 4).unwrap();
        let a = stack_replicas(&p, &params, 20, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = stack_replicas(&p, &params, 20, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        let empty = SamplePool::<SpinConfiguration>::new(Vec::new(), PoolSource::External).unwrap();
        assert!(matches!(
            stack_replicas(&empty, &params, 1, &mut ChaCha8Rng::seed_from_u64(3)),
            Err(Error::EmptyPool)
        ));
    }
}
