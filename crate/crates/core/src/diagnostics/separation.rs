use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::geometry::Ball;

/// Candidate transitions `(i, l, sum_{p=i}^{l} eps_p)`: `l` is the first
/// visit of `to` after a visit of `from`, and `i` the last visit of `from`
/// before `l`.
fn transitions(traj: &Trajectory, from: &Ball, to: &Ball) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    let mut last_from: Option<usize> = None;
    for l in 0..traj.len() {
        let x = traj.point(l);
        if from.contains(x) {
            last_from = Some(l);
        } else if to.contains(x) {
            if let Some(i) = last_from.take() {
                let mut s = 0.0;
                for p in i..=l {
                    s += traj.step(p);
                }
                out.push((i, l, s));
            }
        }
    }
    out
}

fn check(traj: &Trajectory, from: &Ball, to: &Ball) -> Result<()> {
    traj.require_dense("separation times")?;
    for b in [from, to] {
        if b.center.len() != traj.dim() {
            return Err(Error::DimensionMismatch { expected: traj.dim(), actual: b.center.len() });
        }
    }
    if !from.is_separated_from(to) {
        return Err(Error::invalid("separation balls must be disjoint"));
    }
    Ok(())
}

/// `T_j = inf { sum_{p=i}^{l} eps_p : j <= i < l, x_i in from, x_l in to }`,
/// `+inf` when no such pair is recorded.
pub fn separation_time(traj: &Trajectory, from: &Ball, to: &Ball, j: usize) -> Result<f64> {
    Ok(separation_times(traj, from, to, &[j])?[0])
}

/// [`separation_time`] for several starting indices in one pass.
pub fn separation_times(traj: &Trajectory, from: &Ball, to: &Ball, js: &[usize]) -> Result<Vec<f64>> {
    check(traj, from, to)?;
    if let Some(&j) = js.iter().find(|&&j| j >= traj.len()) {
        return Err(Error::invalid(format!("index {j} is past the last iterate")));
    }
    let pairs = transitions(traj, from, to);
    // suffix[k] = min over pairs k.. of their sums
    let mut suffix = vec![f64::INFINITY; pairs.len() + 1];
    for k in (0..pairs.len()).rev() {
        suffix[k] = suffix[k + 1].min(pairs[k].2);
    }
    Ok(js
        .iter()
        .map(|&j| suffix[pairs.partition_point(|&(i, _, _)| i < j)])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_traj(xs: &[f64], steps: &[f64]) -> Trajectory {
        Trajectory::from_iterates(
            xs.iter().map(|&x| vec![x]).collect(),
            xs.iter().map(|_| vec![0.0]).collect(),
            steps.to_vec(),
            xs.to_vec(),
        )
        .unwrap()
    }

    fn balls() -> (Ball, Ball) {
        (Ball::new(vec![0.0], 0.5).unwrap(), Ball::new(vec![2.0], 0.5).unwrap())
    }

    #[test]
    fn single_transition() {
        let (bx, by) = balls();
        let t = line_traj(&[0.0, 2.0], &[0.5, 0.25]);
        assert_eq!(separation_time(&t, &bx, &by, 0).unwrap(), 0.75);
        assert_eq!(separation_time(&t, &bx, &by, 1).unwrap(), f64::INFINITY);
    }

    #[test]
    fn never_reaching_target() {
        let (bx, by) = balls();
        let t = line_traj(&[0.0, 1.0, 0.1], &[1.0, 1.0, 1.0]);
        assert_eq!(separation_time(&t, &bx, &by, 0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn picks_shortest_later_transition() {
        let (bx, by) = balls();
        let xs = [0.0, 1.0, 1.0, 2.0, 0.2, 2.1, 1.0, 0.0, 1.0, 1.0, 1.0, 2.0];
        let t = line_traj(&xs, &[1.0; 12]);
        let ts = separation_times(&t, &bx, &by, &[0, 1, 5, 8]).unwrap();
        // pairs: (0,3) sum 4, (4,5) sum 2, (7,11) sum 5
        assert_eq!(ts, vec![2.0, 2.0, 5.0, f64::INFINITY]);
    }

    #[test]
    fn overlapping_balls_are_rejected() {
        let t = line_traj(&[0.0], &[1.0]);
        let a = Ball::new(vec![0.0], 1.0).unwrap();
        let b = Ball::new(vec![1.5], 1.0).unwrap();
        assert!(separation_time(&t, &a, &b, 0).is_err());
    }
}
