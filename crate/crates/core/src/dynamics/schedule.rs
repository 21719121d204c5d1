use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Power-law steps `eps_i = c / (i + offset)^p`.
///
/// With `0 < p <= 1` the steps decrease to zero and their sum diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    pub c: f64,
    pub p: f64,
    pub offset: u64,
}

impl StepSchedule {
    pub fn new(c: f64, p: f64, offset: u64) -> Result<Self> {
        let s = Self { c, p, offset };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::invalid(format!("schedule c must be positive, got {}", self.c)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::invalid(format!("schedule p must lie in (0, 1], got {}", self.p)));
        }
        if self.offset == 0 {
            return Err(Error::invalid("schedule offset must be a positive integer"));
        }
        Ok(())
    }

    #[inline]
    pub fn step(&self, i: usize) -> f64 {
        let base = (i as u64 + self.offset) as f64;
        if self.p == 1.0 {
            self.c / base
        } else {
            self.c / base.powf(self.p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_steps() {
        let s = StepSchedule::new(0.5, 1.0, 1).unwrap();
        assert_eq!(s.step(0), 0.5);
        assert_eq!(s.step(1), 0.25);
        assert_eq!(s.step(2), 0.5 / 3.0);
    }

    #[test]
    fn steps_strictly_decrease() {
        let s = StepSchedule::new(0.1, 0.5, 3).unwrap();
        for i in 0..1000 {
            assert!(s.step(i + 1) < s.step(i));
            assert!(s.step(i) > 0.0);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(StepSchedule::new(0.0, 1.0, 1).is_err());
        assert!(StepSchedule::new(1.0, 1.5, 1).is_err());
        assert!(StepSchedule::new(1.0, 0.0, 1).is_err());
        assert!(StepSchedule::new(1.0, 1.0, 0).is_err());
    }
}
