use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Linear,
}

/// Per-sweep control parameter: inverse temperature for SA, transverse field
/// for SQA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub sweeps: usize,
    pub initial_value: f64,
    pub final_value: f64,
    pub kind: ScheduleKind,
}

impl AnnealSchedule {
    pub fn linear(sweeps: usize, initial_value: f64, final_value: f64) -> Result<Self> {
        if sweeps == 0 {
            return Err(Error::InvalidParameter("schedule needs at least one sweep".into()));
        }
        if !(initial_value.is_finite() && final_value.is_finite()) {
            return Err(Error::InvalidParameter("schedule values must be finite".into()));
        }
        Ok(AnnealSchedule {
            sweeps,
            initial_value,
            final_value,
            kind: ScheduleKind::Linear,
        })
    }

    /// Value used during sweep `t` (0-based). The last sweep always runs at
    /// the final value; a one-sweep schedule runs only at the final value.
    pub fn value_at(&self, t: usize) -> f64 {
        match self.kind {
            ScheduleKind::Linear => {
                if self.sweeps <= 1 {
                    return self.final_value;
                }
                let frac = t.min(self.sweeps - 1) as f64 / (self.sweeps - 1) as f64;
                self.initial_value + (self.final_value - self.initial_value) * frac
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_endpoints() {
        let s = AnnealSchedule::linear(5, 0.0, 2.0).unwrap();
        assert_eq!(s.value_at(0), 0.0);
        assert_eq!(s.value_at(2), 1.0);
        assert_eq!(s.value_at(4), 2.0);
        assert_eq!(AnnealSchedule::linear(1, 8.0, 0.5).unwrap().value_at(0), 0.5);
        assert!(AnnealSchedule::linear(0, 1.0, 2.0).is_err());
        assert!(AnnealSchedule::linear(3, f64::NAN, 2.0).is_err());
    }
}
