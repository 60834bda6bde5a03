use crate::error::{Error, Result};
use crate::ising::{EffectiveConfiguration, SpinConfiguration};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolSource {
    Sa,
    Sqa,
    External,
    Stacked,
}

/// Multiset of configurations produced by one sampling call.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePool<C> {
    configs: Vec<C>,
    source: PoolSource,
}

impl<C> SamplePool<C> {
    pub fn configs(&self) -> &[C] {
        &self.configs
    }

    pub fn source(&self) -> PoolSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn into_configs(self) -> Vec<C> {
        self.configs
    }
}

impl SamplePool<SpinConfiguration> {
    pub fn new(configs: Vec<SpinConfiguration>, source: PoolSource) -> Result<Self> {
        if let Some(first) = configs.first() {
            if let Some(bad) = configs.iter().find(|c| c.len() != first.len()) {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    got: bad.len(),
                });
            }
        }
        Ok(SamplePool { configs, source })
    }

    pub fn width(&self) -> Option<usize> {
        self.configs.first().map(SpinConfiguration::len)
    }

    /// Replica-`k` slice of each effective configuration, one read per entry.
    pub fn from_replica_slices(pool: &SamplePool<EffectiveConfiguration>, k: usize) -> Result<Self> {
        let configs = pool
            .configs()
            .iter()
            .map(|c| {
                if k >= c.replicas() {
                    return Err(Error::InvalidParameter(format!(
                        "replica {k} out of range for {} replicas",
                        c.replicas()
                    )));
                }
                Ok(SpinConfiguration::from_raw(c.replica(k).to_vec()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SamplePool {
            configs,
            source: PoolSource::External,
        })
    }

    /// Regroups flat reads of `replicas × width` spins into effective
    /// configurations (replica-major).
    pub fn into_effective(self, replicas: usize) -> Result<SamplePool<EffectiveConfiguration>> {
        if replicas == 0 {
            return Err(Error::InvalidParameter("replicas must be >= 1".into()));
        }
        let source = self.source;
        let configs = self
            .configs
            .into_iter()
            .map(|c| {
                if c.len() % replicas != 0 {
                    return Err(Error::DimensionMismatch {
                        expected: replicas * (c.len() / replicas + 1),
                        got: c.len(),
                    });
                }
                let width = c.len() / replicas;
                Ok(EffectiveConfiguration::from_raw(replicas, width, c.values().to_vec()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SamplePool { configs, source })
    }
}

impl SamplePool<EffectiveConfiguration> {
    pub fn new(configs: Vec<EffectiveConfiguration>, source: PoolSource) -> Result<Self> {
        if let Some(first) = configs.first() {
            if let Some(bad) = configs
                .iter()
                .find(|c| c.width() != first.width() || c.replicas() != first.replicas())
            {
                return Err(Error::DimensionMismatch {
                    expected: first.width() * first.replicas(),
                    got: bad.width() * bad.replicas(),
                });
            }
        }
        Ok(SamplePool { configs, source })
    }

    /// Flattens each effective configuration into one ±1 read.
    pub fn flattened(&self) -> SamplePool<SpinConfiguration> {
        SamplePool {
            configs: self
                .configs
                .iter()
                .map(|c| SpinConfiguration::from_raw(c.spins().to_vec()))
                .collect(),
            source: self.source,
        }
    }
}

impl<C> SamplePool<C> {
    pub(crate) fn from_parts(configs: Vec<C>, source: PoolSource) -> Self {
        SamplePool { configs, source }
    }
}
