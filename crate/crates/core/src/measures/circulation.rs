use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::funcs::{FunctionOracle, SelectionPolicy};
use crate::linalg::{dot, CompensatedSum};

/// How `sigma(x(t))` is integrated along each segment `[x_i, x_{i+1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentQuadrature {
    /// Split at every change of the active affine piece and integrate each
    /// part exactly. Polyhedral oracles only.
    Exact,
    /// `m` equally spaced interior points per segment.
    Midpoint(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circulation {
    /// `I_sigma`
    pub integral: f64,
    /// `(f(x_N) - f(x_0)) / T`
    pub reference: f64,
    /// `T = sum_{i < N} eps_i`, the time spanned by the segments.
    pub time: f64,
}

impl Circulation {
    pub fn abs_error(&self) -> f64 {
        (self.integral - self.reference).abs()
    }

    pub fn rel_error(&self) -> f64 {
        self.abs_error() / self.reference.abs().max(f64::MIN_POSITIVE)
    }
}

/// Time average of `sigma . gamma'` along the interpolating curve of the
/// first `upto` segments, where `sigma` is picked from the subdifferential by
/// `policy` at the quadrature points.
///
/// Path differentiability makes the exact integral equal to the change of `f`
/// whatever the selection. In exact mode each sub-segment midpoint lies in
/// the interior of its piece's region, so the subdifferential there is taken
/// without activity tolerance; `tol_active` applies to midpoint sampling.
pub fn circulation(
    oracle: &dyn FunctionOracle,
    traj: &Trajectory,
    upto: usize,
    policy: SelectionPolicy,
    quadrature: SegmentQuadrature,
    tol_active: f64,
) -> Result<Circulation> {
    traj.require_dense("circulation")?;
    if oracle.dimension() != traj.dim() {
        return Err(Error::DimensionMismatch { expected: oracle.dimension(), actual: traj.dim() });
    }
    if upto == 0 || upto >= traj.len() {
        return Err(Error::invalid(format!(
            "circulation needs 1 <= N <= {}, got {upto}",
            traj.len().saturating_sub(1)
        )));
    }
    let poly = match quadrature {
        SegmentQuadrature::Exact => Some(oracle.as_polyhedral().ok_or_else(|| {
            Error::invalid("exact segment quadrature needs a polyhedral function")
        })?),
        SegmentQuadrature::Midpoint(0) => {
            return Err(Error::invalid("at least one subsample per segment is needed"))
        }
        SegmentQuadrature::Midpoint(_) => None,
    };

    let dim = traj.dim();
    let mut selector = policy.selector();
    let mut integral = CompensatedSum::new();
    let mut time = CompensatedSum::new();
    let mut x = vec![0.0; dim];
    let tol = if poly.is_some() { 0.0 } else { tol_active };
    let mut sample = |a: &[f64], b: &[f64], s: f64, weight: f64, v: &[f64], acc: &mut CompensatedSum| {
        for k in 0..dim {
            x[k] = a[k] + s * (b[k] - a[k]);
        }
        let sigma = selector.select(&oracle.subdifferential(&x, tol));
        acc.add(-weight * dot(&sigma, v));
    };

    for i in 0..upto {
        let (a, b) = (traj.point(i), traj.point(i + 1));
        let (eps, v) = (traj.step(i), traj.velocity(i));
        time.add(eps);
        match (quadrature, poly) {
            (SegmentQuadrature::Exact, Some(p)) => {
                for piece in p.segment_pieces(a, b) {
                    let s = 0.5 * (piece.s_start + piece.s_end);
                    sample(a, b, s, eps * (piece.s_end - piece.s_start), v, &mut integral);
                }
            }
            (SegmentQuadrature::Midpoint(m), _) => {
                for k in 0..m {
                    let s = (k as f64 + 0.5) / m as f64;
                    sample(a, b, s, eps / m as f64, v, &mut integral);
                }
            }
            _ => unreachable!(),
        }
    }
    let t = time.value();
    Ok(Circulation {
        integral: integral.value() / t,
        reference: (traj.value(upto) - traj.value(0)) / t,
        time: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{run, RunOptions, StepSchedule};
    use crate::funcs::{builtin, AffinePiece, Builtin, PolyhedralFunction, SelectionKind};

    #[test]
    fn smooth_region_gives_unit_descent_rate() {
        let f = builtin(Builtin::Abs1d);
        let s = StepSchedule::new(0.01, 1.0, 1).unwrap();
        let t = run(f.as_ref(), &[1.0], s, SelectionPolicy::default(), 50, &RunOptions::for_dimension(1))
            .unwrap();
        assert!(t.points_flat().iter().all(|&x| x > 0.0));
        for kind in SelectionKind::ALL {
            let c = circulation(f.as_ref(), &t, 50, SelectionPolicy::new(kind, 1), SegmentQuadrature::Midpoint(1), 1e-9)
                .unwrap();
            assert_eq!(c.integral, -1.0);
            assert!((c.reference + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_function_has_zero_circulation() {
        let zero = PolyhedralFunction::new(vec![AffinePiece::new(vec![0.0, 0.0], 0.0)]).unwrap();
        let traj = Trajectory::from_iterates(
            vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![0.5, 0.5]],
            vec![vec![-1.0, -0.5], vec![0.5, 0.0], vec![0.0, 0.0]],
            vec![1.0, 1.0, 1.0],
            vec![0.0; 3],
        )
        .unwrap();
        for q in [SegmentQuadrature::Exact, SegmentQuadrature::Midpoint(4)] {
            let c = circulation(&zero, &traj, 2, SelectionPolicy::default(), q, 1e-9).unwrap();
            assert_eq!((c.integral, c.reference), (0.0, 0.0));
        }
    }

    #[test]
    fn exact_quadrature_matches_value_change_on_tripod() {
        let f = builtin(Builtin::Tripod);
        let s = StepSchedule::new(0.1, 1.0, 1).unwrap();
        let t = run(f.as_ref(), &[0.3, -0.7], s, SelectionPolicy::default(), 5000, &RunOptions::for_dimension(2))
            .unwrap();
        for kind in SelectionKind::ALL {
            let c = circulation(f.as_ref(), &t, 5000, SelectionPolicy::new(kind, 9), SegmentQuadrature::Exact, 1e-9)
                .unwrap();
            assert!(c.rel_error() <= 1e-10, "{kind}: {c:?}");
        }
    }

    #[test]
    fn exact_mode_needs_polyhedral_oracle() {
        let f = builtin(Builtin::Bowl);
        let s = StepSchedule::new(0.1, 1.0, 1).unwrap();
        let t = run(f.as_ref(), &[0.3, -0.7], s, SelectionPolicy::default(), 10, &RunOptions::for_dimension(2))
            .unwrap();
        let policy = SelectionPolicy::default();
        assert!(circulation(f.as_ref(), &t, 10, policy, SegmentQuadrature::Exact, 1e-9).is_err());
        assert!(circulation(f.as_ref(), &t, 10, policy, SegmentQuadrature::Midpoint(0), 1e-9).is_err());
        assert!(circulation(f.as_ref(), &t, 11, policy, SegmentQuadrature::Midpoint(2), 1e-9).is_err());
    }
}
