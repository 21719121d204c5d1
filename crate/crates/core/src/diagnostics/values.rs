use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueTail {
    /// `max - min` of `f(x_i)` over the window.
    pub oscillation: f64,
    /// Mean of `f(x_i)` over the window.
    pub limit_estimate: f64,
}

/// Spread and mean of the objective over the last `window` stored iterates.
pub fn value_convergence(traj: &Trajectory, window: usize) -> Result<ValueTail> {
    if window == 0 {
        return Err(Error::invalid("window must be at least 1"));
    }
    let steps = traj.len().saturating_sub(1);
    if window > steps {
        return Err(Error::invalid(format!("window {window} exceeds the {steps} recorded steps")));
    }
    let tail = &traj.values()[traj.len() - window..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = tail.iter().copied().collect::<CompensatedSum>().value() / window as f64;
    Ok(ValueTail { oscillation: hi - lo, limit_estimate: mean })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence_has_no_oscillation() {
        let t = Trajectory::from_iterates(
            vec![vec![1.0]; 5],
            vec![vec![0.0]; 5],
            vec![1.0; 5],
            vec![2.0; 5],
        )
        .unwrap();
        let v = value_convergence(&t, 4).unwrap();
        assert_eq!((v.oscillation, v.limit_estimate), (0.0, 2.0));
        assert!(value_convergence(&t, 5).is_err());
        assert!(value_convergence(&t, 0).is_err());
    }

    #[test]
    fn window_covers_the_tail() {
        let vals = vec![9.0, 1.0, 3.0, 2.0];
        let t = Trajectory::from_iterates(
            vec![vec![0.0]; 4],
            vec![vec![0.0]; 4],
            vec![1.0; 4],
            vals,
        )
        .unwrap();
        let v = value_convergence(&t, 3).unwrap();
        assert_eq!((v.oscillation, v.limit_estimate), (2.0, 2.0));
    }
}
