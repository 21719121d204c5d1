use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerpendicularityReport {
    /// Number of qualifying iterates.
    pub samples: usize,
    /// `max_i max_w |w . v_i|`, `None` without samples.
    pub max: Option<f64>,
    /// Mean over qualifying iterates of `max_w |w . v_i|`.
    pub mean: Option<f64>,
}

/// Tangential components `|w . v_i|` of the subgradients over the last
/// `tail_fraction` of the stored iterates that lie within `radius` of
/// `center` and have `||v_i|| >= min_velocity_norm`.
pub fn perpendicularity(
    traj: &Trajectory,
    center: &[f64],
    radius: f64,
    tangents: &[Vec<f64>],
    tail_fraction: f64,
    min_velocity_norm: f64,
) -> Result<PerpendicularityReport> {
    if center.len() != traj.dim() {
        return Err(Error::DimensionMismatch { expected: traj.dim(), actual: center.len() });
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::invalid("tail_fraction must lie in (0, 1]"));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    for w in tangents {
        if w.len() != traj.dim() {
            return Err(Error::DimensionMismatch { expected: traj.dim(), actual: w.len() });
        }
        if (norm(w) - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("tangent vectors must have unit norm"));
        }
    }
    let rows = traj.len();
    let tail = ((tail_fraction * rows as f64).ceil() as usize).clamp(1, rows);
    let (mut samples, mut max, mut sum) = (0usize, 0.0f64, 0.0f64);
    for r in rows - tail..rows {
        let v = traj.velocity(r);
        if dist(traj.point(r), center) > radius || norm(v) < min_velocity_norm {
            continue;
        }
        let m = tangents.iter().map(|w| dot(w, v).abs()).fold(0.0, f64::max);
        samples += 1;
        max = max.max(m);
        sum += m;
    }
    Ok(PerpendicularityReport {
        samples,
        max: (samples > 0).then_some(max),
        mean: (samples > 0).then(|| sum / samples as f64),
    })
}

/// Median of `||v_i||` over the last `tail_fraction` of the stored iterates.
pub fn typical_velocity_norm(traj: &Trajectory, tail_fraction: f64) -> f64 {
    let rows = traj.len();
    let tail = ((tail_fraction * rows as f64).ceil() as usize).clamp(1, rows);
    let mut norms: Vec<f64> = (rows - tail..rows).map(|r| norm(traj.velocity(r))).collect();
    norms.sort_by(f64::total_cmp);
    norms[norms.len() / 2]
}
