//! Fixtures shared by the benchmarks.

use osccomp_core::{builtin, run, Builtin, RunOptions, SelectionPolicy, StepSchedule, Trajectory};

/// The tripod from `(0.3, -0.7)` with steps `0.1 / sqrt(i + 1)`.
pub fn tripod_trajectory(n: usize) -> Trajectory {
    let f = builtin(Builtin::Tripod);
    let s = StepSchedule::new(0.1, 0.5, 1).expect("valid schedule");
    run(f.as_ref(), &[0.3, -0.7], s, SelectionPolicy::default(), n, &RunOptions::for_dimension(2))
        .expect("the tripod run stays in the guard box")
}

/// `k` points spread over the unit circle, shifted by `(0.2, 0.1)`.
pub fn ring(k: usize) -> Vec<[f64; 2]> {
    (0..k)
        .map(|j| {
            let a = std::f64::consts::TAU * j as f64 / k as f64;
            [0.2 + a.cos(), 0.1 + a.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_the_requested_size() {
        assert_eq!(tripod_trajectory(100).len(), 101);
        assert_eq!(ring(7).len(), 7);
    }
}
