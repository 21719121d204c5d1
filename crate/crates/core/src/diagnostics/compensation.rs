use serde::{Deserialize, Serialize};

use super::Checkpoints;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{dist, norm, CompensatedSum, CompensatedVecSum};

/// Radial cutoff: `1` on the closed ball of radius `eta`, `0` outside radius
/// `delta`, linear in the distance in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub center: Vec<f64>,
    pub eta: f64,
    pub delta: f64,
}

impl Cutoff {
    pub fn new(center: Vec<f64>, eta: f64, delta: f64) -> Result<Self> {
        if !(eta > 0.0 && delta > eta && delta.is_finite()) {
            return Err(Error::invalid(format!("cutoff radii need 0 < eta < delta, got {eta}, {delta}")));
        }
        Ok(Self { center, eta, delta })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = dist(x, &self.center);
        if r <= self.eta {
            1.0
        } else if r >= self.delta {
            0.0
        } else {
            (self.delta - r) / (self.delta - self.eta)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensationPoint {
    pub n: usize,
    /// `||sum eps_i v_i psi(x_i)|| / sum eps_i psi(x_i)`, `None` when the
    /// sequence has not yet entered the support of `psi`.
    pub ratio: Option<f64>,
    /// `sum eps_i psi(x_i) / t_n`
    pub mass: f64,
}

/// Localised compensation ratio `R_n` and its mass fraction `M_n` at each
/// checkpoint.
pub fn compensation_ratio(
    traj: &Trajectory,
    psi: &Cutoff,
    checkpoints: &Checkpoints,
) -> Result<Vec<CompensationPoint>> {
    traj.require_dense("the compensation ratio")?;
    checkpoints.check_within(traj.last_index())?;
    if psi.center.len() != traj.dim() {
        return Err(Error::DimensionMismatch { expected: traj.dim(), actual: psi.center.len() });
    }
    let mut weighted = CompensatedVecSum::zeros(traj.dim());
    let mut mass = CompensatedSum::new();
    let mut time = CompensatedSum::new();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.as_slice().iter().peekable();
    for i in 0..=checkpoints.last() {
        let eps = traj.step(i);
        time.add(eps);
        let w = psi.eval(traj.point(i));
        if w > 0.0 {
            weighted.add_scaled(eps * w, traj.velocity(i));
            mass.add(eps * w);
        }
        if next.peek() == Some(&&i) {
            next.next();
            let m = mass.value();
            out.push(CompensationPoint {
                n: i,
                ratio: (m > 0.0).then(|| norm(&weighted.value()) / m),
                mass: m / time.value(),
            });
        }
    }
    Ok(out)
}

/// Global drift `||x_n - x_0|| / t_n` at each checkpoint.
pub fn global_ratio(traj: &Trajectory, checkpoints: &Checkpoints) -> Result<Vec<(usize, f64)>> {
    traj.require_dense("the global compensation ratio")?;
    checkpoints.check_within(traj.last_index())?;
    let x0 = traj.point(0);
    Ok(checkpoints
        .as_slice()
        .iter()
        .map(|&n| (n, dist(traj.point(n), x0) / traj.time(n)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run, RunOptions, StepSchedule};
    use crate::funcs::{builtin, Builtin, SelectionPolicy};

    #[test]
    fn cutoff_shape() {
        let psi = Cutoff::new(vec![0.0, 0.0], 1.0, 3.0).unwrap();
        assert_eq!(psi.eval(&[0.5, 0.0]), 1.0);
        assert_eq!(psi.eval(&[2.0, 0.0]), 0.5);
        assert_eq!(psi.eval(&[0.0, 3.0]), 0.0);
        assert!(Cutoff::new(vec![0.0], 1.0, 1.0).is_err());
        assert!(Cutoff::new(vec![0.0], 0.0, 1.0).is_err());
    }

    fn tripod_run(n: usize) -> Trajectory {
        let f = builtin(Builtin::Tripod);
        let s = StepSchedule::new(0.1, 1.0, 1).unwrap();
        run(f.as_ref(), &[0.3, -0.7], s, SelectionPolicy::default(), n, &RunOptions::for_dimension(2)).unwrap()
    }

    #[test]
    fn wide_cutoff_telescopes() {
        let t = tripod_run(3000);
        let psi = Cutoff::new(vec![0.0, 0.0], 100.0, 200.0).unwrap();
        let cp = Checkpoints::new(vec![3000]).unwrap();
        let r = compensation_ratio(&t, &psi, &cp).unwrap();
        let agg = t.aggregates().unwrap();
        let expected = dist(t.point(0), &agg.next_point) / agg.total_time;
        assert!((r[0].ratio.unwrap() - expected).abs() <= 1e-12 * expected);
        assert!((r[0].mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unvisited_support_has_no_ratio() {
        let t = tripod_run(100);
        let psi = Cutoff::new(vec![5.0, 5.0], 0.1, 0.2).unwrap();
        let r = compensation_ratio(&t, &psi, &Checkpoints::geometric(100)).unwrap();
        assert!(r.iter().all(|p| p.ratio.is_none() && p.mass == 0.0));
        assert_eq!(r.last().unwrap().n, 100);
    }
}
