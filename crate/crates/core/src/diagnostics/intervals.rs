use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::geometry::Ball;
use crate::linalg::norm;

/// A maximal run of consecutive iterates inside the outer ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    /// Inclusive.
    pub end: usize,
    /// `sum eps_i` over the interval.
    pub time: f64,
    /// `sum eps_i v_i` over the interval.
    pub weighted_velocity: Vec<f64>,
    /// The interval reaches the last recorded iterate, so it may continue.
    pub open_ended: bool,
}

impl Interval {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalDecomposition {
    pub center: Vec<f64>,
    pub eta: f64,
    pub delta: f64,
    pub intervals: Vec<Interval>,
    /// `||sum_A eps_i v_i|| / sum_A eps_i` over the union `A` of the
    /// intervals; `None` when `A` is empty.
    pub statistic: Option<f64>,
}

/// Maximal index intervals whose iterates all lie in the closed ball of
/// radius `delta` around `center` and that meet the ball of radius `eta`.
pub fn interval_decomposition(
    traj: &Trajectory,
    center: &[f64],
    eta: f64,
    delta: f64,
) -> Result<IntervalDecomposition> {
    traj.require_dense("the interval decomposition")?;
    if center.len() != traj.dim() {
        return Err(Error::DimensionMismatch { expected: traj.dim(), actual: center.len() });
    }
    if !(eta > 0.0 && delta > eta) {
        return Err(Error::invalid(format!("intervals need 0 < eta < delta, got {eta}, {delta}")));
    }
    let inner = Ball::new(center.to_vec(), eta)?;
    let outer = Ball::new(center.to_vec(), delta)?;
    let dim = traj.dim();
    let n = traj.len();

    let mut intervals = Vec::new();
    let mut i = 0;
    while i < n {
        if !outer.contains(traj.point(i)) {
            i += 1;
            continue;
        }
        let start = i;
        let mut touches = false;
        let mut time = 0.0;
        let mut wv = vec![0.0; dim];
        while i < n && outer.contains(traj.point(i)) {
            touches |= inner.contains(traj.point(i));
            time += traj.step(i);
            for (w, v) in wv.iter_mut().zip(traj.velocity(i)) {
                *w += traj.step(i) * v;
            }
            i += 1;
        }
        if touches {
            intervals.push(Interval {
                start,
                end: i - 1,
                time,
                weighted_velocity: wv,
                open_ended: i == n,
            });
        }
    }

    let mut total = 0.0;
    let mut sum = vec![0.0; dim];
    for iv in &intervals {
        total += iv.time;
        for (s, w) in sum.iter_mut().zip(&iv.weighted_velocity) {
            *s += w;
        }
    }
    let statistic = (total > 0.0).then(|| norm(&sum) / total);
    Ok(IntervalDecomposition { center: center.to_vec(), eta, delta, intervals, statistic })
}
