//! The vanishing-stepsize subgradient recursion `x_{i+1} = x_i - eps_i v_i`.

mod csv;
mod schedule;
mod trajectory;

pub use self::csv::{read_csv, write_csv};
pub use schedule::StepSchedule;
pub use trajectory::{Divergence, RunAggregates, RunMeta, Trajectory};

use crate::error::{Error, Result};
use crate::funcs::{FunctionOracle, SelectionPolicy, DEFAULT_TOL_ACTIVE};
use crate::geometry::BoundingBox;
use crate::linalg::{CompensatedSum, CompensatedVecSum};

/// Longest run that is stored densely when no stride is requested.
pub const MAX_DENSE_ITERATES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Iterates leaving this box stop the run and mark it divergent.
    pub guard_box: Option<BoundingBox>,
    /// Store every `thin`-th iterate. `0` picks the smallest stride that keeps
    /// at most [`MAX_DENSE_ITERATES`] rows.
    pub thin: usize,
    pub tol_active: f64,
}

impl RunOptions {
    /// Default guard `[-10, 10]^dim`, automatic stride.
    pub fn for_dimension(dim: usize) -> Self {
        Self {
            guard_box: Some(BoundingBox::default_guard(dim)),
            thin: 0,
            tol_active: DEFAULT_TOL_ACTIVE,
        }
    }

    pub fn unguarded() -> Self {
        Self { guard_box: None, thin: 0, tol_active: DEFAULT_TOL_ACTIVE }
    }

    pub fn with_guard(mut self, guard: Option<BoundingBox>) -> Self {
        self.guard_box = guard;
        self
    }

    pub fn with_thin(mut self, thin: usize) -> Self {
        self.thin = thin;
        self
    }

    fn stride(&self, n: usize) -> usize {
        if self.thin > 0 {
            self.thin
        } else {
            (n + 1).div_ceil(MAX_DENSE_ITERATES).max(1)
        }
    }
}

/// Runs `n` steps of the subgradient method from `x0`, recording
/// `x_0, ..., x_n`.
///
/// Subgradients are chosen by `policy` from the oracle's Clarke
/// subdifferential. If an iterate leaves the guard box the run stops there;
/// the escaped iterate is reported through [`Trajectory::divergence`] and is
/// not recorded.
pub fn run(
    oracle: &dyn FunctionOracle,
    x0: &[f64],
    schedule: StepSchedule,
    policy: SelectionPolicy,
    n: usize,
    opts: &RunOptions,
) -> Result<Trajectory> {
    let dim = oracle.dimension();
    if x0.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: x0.len() });
    }
    if x0.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("x0 must be finite"));
    }
    if n == 0 {
        return Err(Error::invalid("the number of steps must be at least 1"));
    }
    schedule.validate()?;
    if !(opts.tol_active >= 0.0) {
        return Err(Error::invalid("tol_active must be nonnegative"));
    }
    if let Some(g) = &opts.guard_box {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, actual: g.dim() });
        }
    }

    let thin = opts.stride(n);
    let mut traj = Trajectory::with_capacity(dim, thin, n / thin + 1);
    let mut selector = policy.selector();
    let mut x = x0.to_vec();
    let mut t = 0.0;
    let mut total = CompensatedSum::new();
    let mut weighted = CompensatedVecSum::zeros(dim);
    let (mut f_min, mut f_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut last: Option<(usize, Vec<f64>, f64)> = None;

    for i in 0..=n {
        if let Some(g) = &opts.guard_box {
            if !g.contains(&x) {
                traj.divergence = Some(Divergence { index: i, point: x.clone() });
                break;
            }
        }
        let f = oracle.value(&x);
        if !f.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        let sd = oracle.subdifferential(&x, opts.tol_active);
        let v = selector.select(&sd);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index: i });
        }
        let eps = schedule.step(i);
        t += eps;
        total.add(eps);
        weighted.add_scaled(eps, &v);
        f_min = f_min.min(f);
        f_max = f_max.max(f);
        if i % thin == 0 {
            traj.push_row(&x, &v, eps, t, f);
        }
        let next: Vec<f64> = x.iter().zip(&v).map(|(xi, vi)| xi - eps * vi).collect();
        last = Some((i, std::mem::replace(&mut x, next), f));
    }

    // The guard is checked before anything is computed, so x0 outside it
    // leaves nothing to record.
    let (last_index, last_point, last_value) = last.ok_or_else(|| {
        Error::invalid("x0 lies outside the guard box")
    })?;
    traj.aggregates = Some(RunAggregates {
        last_index,
        total_time: total.value(),
        weighted_velocity_sum: weighted.value(),
        f_min,
        f_max,
        last_point,
        last_value,
        next_point: x,
    });
    traj.meta = Some(RunMeta {
        oracle: oracle.name().to_string(),
        schedule,
        policy,
        iterations: n,
    });
    Ok(traj)
}

/// Occupation time `sum_{j <= upto, x_j in U} eps_j` of the set given by
/// `indicator`.
pub fn time_in_set<F>(traj: &Trajectory, indicator: F, upto: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> bool,
{
    traj.require_dense("occupation time")?;
    if upto >= traj.len() {
        return Err(Error::invalid(format!(
            "index {upto} is past the last stored iterate {}",
            traj.len().saturating_sub(1)
        )));
    }
    Ok((0..=upto)
        .filter(|&j| indicator(traj.point(j)))
        .map(|j| traj.step(j))
        .collect::<CompensatedSum>()
        .value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcs::{builtin, Builtin, SelectionKind};
    use crate::linalg::norm;

    fn abs1d_run(n: usize) -> Trajectory {
        let f = builtin(Builtin::Abs1d);
        let s = StepSchedule::new(0.5, 1.0, 1).unwrap();
        run(f.as_ref(), &[1.0], s, SelectionPolicy::default(), n, &RunOptions::for_dimension(1))
            .unwrap()
    }

    #[test]
    fn abs1d_first_steps() {
        let t = abs1d_run(2);
        assert_eq!(t.len(), 3);
        assert_eq!(t.point(0), &[1.0]);
        assert_eq!(t.point(1), &[0.5]);
        assert_eq!(t.point(2), &[0.25]);
        assert_eq!(t.velocity(0), &[1.0]);
        assert_eq!(t.times(), &[0.5, 0.75, 0.75 + 0.5 / 3.0]);
    }

    #[test]
    fn smallest_run_and_zero_steps() {
        let t = abs1d_run(1);
        assert_eq!(t.len(), 2);
        assert_eq!(t.point(1), &[0.5]);
        let f = builtin(Builtin::Abs1d);
        let s = StepSchedule::new(0.5, 1.0, 1).unwrap();
        let err = run(f.as_ref(), &[1.0], s, SelectionPolicy::default(), 0, &RunOptions::unguarded());
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn recursion_and_time_invariants() {
        let f = builtin(Builtin::Tripod);
        let s = StepSchedule::new(0.1, 1.0, 1).unwrap();
        let policy = SelectionPolicy::new(SelectionKind::RandomHull, 5);
        let t = run(f.as_ref(), &[0.3, -0.7], s, policy, 2000, &RunOptions::for_dimension(2)).unwrap();
        for i in 0..t.len() - 1 {
            assert_eq!(t.successor(i), t.point(i + 1));
            assert!(t.time(i + 1) > t.time(i));
            let dt = t.time(i + 1) - t.time(i);
            assert!((dt - t.step(i + 1)).abs() <= 4.0 * f64::EPSILON * t.time(i + 1));
        }
        let agg = t.aggregates().unwrap();
        assert_eq!(agg.next_point, t.successor(t.len() - 1));
    }

    #[test]
    fn tripod_converges_towards_origin() {
        let f = builtin(Builtin::Tripod);
        let s = StepSchedule::new(0.1, 1.0, 1).unwrap();
        let t = run(f.as_ref(), &[0.3, -0.7], s, SelectionPolicy::default(), 100_000, &RunOptions::for_dimension(2))
            .unwrap();
        let last = t.len() - 1;
        assert!(norm(t.point(last)) <= 0.1);
        assert!(t.value(last) <= 0.1);
    }

    #[test]
    fn escaping_iterate_is_flagged() {
        let f = builtin(Builtin::Abs1d);
        let s = StepSchedule::new(5.0, 1.0, 1).unwrap();
        let opts = RunOptions::for_dimension(1).with_guard(Some(BoundingBox::cube(1, 2.0)));
        let t = run(f.as_ref(), &[1.0], s, SelectionPolicy::default(), 10, &opts).unwrap();
        let d = t.divergence().unwrap();
        // 1 - 5 = -4 leaves [-2, 2]
        assert_eq!(d.index, 1);
        assert_eq!(d.point, vec![-4.0]);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn overflowing_value_is_reported() {
        let f = crate::funcs::PolyhedralFunction::new(vec![crate::funcs::AffinePiece::new(vec![1e308], 0.0)])
            .unwrap();
        let s = StepSchedule::new(0.1, 1.0, 1).unwrap();
        let r = run(&f, &[5.0], s, SelectionPolicy::default(), 10, &RunOptions::unguarded());
        assert_eq!(r.unwrap_err(), Error::NonFinite { index: 0 });
    }

    #[test]
    fn thinned_run_keeps_exact_aggregates() {
        let f = builtin(Builtin::Tripod);
        let s = StepSchedule::new(0.1, 0.5, 1).unwrap();
        let p = SelectionPolicy::default();
        let dense = run(f.as_ref(), &[0.3, -0.7], s, p, 1000, &RunOptions::for_dimension(2)).unwrap();
        let thin = run(f.as_ref(), &[0.3, -0.7], s, p, 1000, &RunOptions::for_dimension(2).with_thin(7))
            .unwrap();
        assert_eq!(thin.thin(), 7);
        assert_eq!(thin.len(), 1000 / 7 + 1);
        assert_eq!(thin.point(3), dense.point(21));
        assert_eq!(thin.aggregates(), dense.aggregates());
        assert!(matches!(time_in_set(&thin, |_| true, 3), Err(Error::Thinned { stride: 7, .. })));
    }

    #[test]
    fn occupation_time() {
        let t = abs1d_run(2);
        assert_eq!(time_in_set(&t, |_| false, 2).unwrap(), 0.0);
        assert_eq!(time_in_set(&t, |_| true, 2).unwrap(), t.time(2));
        // only x_2 = 0.25 qualifies, with step 0.5 / 3
        assert_eq!(time_in_set(&t, |x| x[0].abs() <= 0.3, 2).unwrap(), 0.5 / 3.0);
        assert!(time_in_set(&t, |_| true, 3).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let f = builtin(Builtin::NsBanana);
        let s = StepSchedule::new(0.01, 0.5, 1).unwrap();
        let p = SelectionPolicy::new(SelectionKind::RandomVertex, 11);
        let a = run(f.as_ref(), &[-1.0, 1.5], s, p, 5000, &RunOptions::for_dimension(2)).unwrap();
        let b = run(f.as_ref(), &[-1.0, 1.5], s, p, 5000, &RunOptions::for_dimension(2)).unwrap();
        assert_eq!(a, b);
    }
}
