//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use osccomp_core::diagnostics::{Interval, IntervalDecomposition};
use osccomp_core::linalg::{dot, norm};
use osccomp_core::{Ball, FunctionOracle, Trajectory, DEFAULT_TOL_ACTIVE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Weights `l` with `sum_r l_r g_r = 0` and `sum_r l_r = 1` for three planar
/// vectors, by Cramer's rule.
pub fn balance_weights(g: [[f64; 2]; 3]) -> [f64; 3] {
    let m = [[g[0][0], g[1][0], g[2][0]], [g[0][1], g[1][1], g[2][1]], [1.0, 1.0, 1.0]];
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    let rhs = [0.0, 0.0, 1.0];
    let mut out = [0.0; 3];
    for (col, o) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = rhs[row];
        }
        *o = det3(&mc) / d;
    }
    out
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ChainRuleStats {
    pub samples: usize,
    pub passes: usize,
    /// Failures where the subdifferential at a coarse tolerance is not a
    /// singleton, i.e. a kink lies within the difference stencil.
    pub near_kink_failures: usize,
}

impl ChainRuleStats {
    pub fn rate(&self) -> f64 {
        self.passes as f64 / self.samples as f64
    }

    pub fn failures(&self) -> usize {
        self.samples - self.passes
    }
}

/// Central-difference check of `(f o gamma)'(t) = v . (b - a)` on random
/// segments `gamma(t) = a + t (b - a)` in `[-half_width, half_width]^n`,
/// at parameters where the oracle reports a singleton.
pub fn chain_rule_suite(
    f: &dyn FunctionOracle,
    half_width: f64,
    segments: usize,
    per_segment: usize,
    seed: u64,
) -> ChainRuleStats {
    let n = f.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = ChainRuleStats::default();
    let h = 1e-6;
    for _ in 0..segments {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-half_width..half_width)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-half_width..half_width)).collect();
        let d: Vec<f64> = b.iter().zip(&a).map(|(p, q)| p - q).collect();
        let at = |t: f64| -> Vec<f64> { a.iter().zip(&d).map(|(p, q)| p + t * q).collect() };
        let mut taken = 0;
        let mut attempts = 0;
        while taken < per_segment && attempts < 100 * per_segment {
            attempts += 1;
            let t = rng.random_range(h..1.0 - h);
            let x = at(t);
            let sd = f.subdifferential(&x, DEFAULT_TOL_ACTIVE);
            if sd.len() != 1 {
                continue;
            }
            taken += 1;
            stats.samples += 1;
            let fd = (f.value(&at(t + h)) - f.value(&at(t - h))) / (2.0 * h);
            let predicted = dot(sd.vertex(0), &d);
            if (fd - predicted).abs() <= 1e-6 * (1.0 + f.value(&x).abs()) {
                stats.passes += 1;
            } else if f.subdifferential(&x, 1e-3).len() > 1 {
                stats.near_kink_failures += 1;
            }
        }
    }
    stats
}

/// Interval decomposition by brute force: every index is tested as a start,
/// and every candidate end is checked against the whole run.
pub fn naive_intervals(traj: &Trajectory, center: &[f64], eta: f64, delta: f64) -> IntervalDecomposition {
    let inner = Ball::new(center.to_vec(), eta).unwrap();
    let outer = Ball::new(center.to_vec(), delta).unwrap();
    let n = traj.len();
    let inside = |i: usize| outer.contains(traj.point(i));
    let mut intervals = Vec::new();
    for s in 0..n {
        if !inside(s) || (s > 0 && inside(s - 1)) {
            continue;
        }
        let mut end = s;
        for e in s..n {
            if !(s..=e).all(inside) {
                break;
            }
            end = e;
        }
        if !(s..=end).any(|i| inner.contains(traj.point(i))) {
            continue;
        }
        let mut time = 0.0;
        let mut wv = vec![0.0; traj.dim()];
        for i in s..=end {
            time += traj.step(i);
            for (w, v) in wv.iter_mut().zip(traj.velocity(i)) {
                *w += traj.step(i) * v;
            }
        }
        intervals.push(Interval { start: s, end, time, weighted_velocity: wv, open_ended: end == n - 1 });
    }
    let mut total = 0.0;
    let mut sum = vec![0.0; traj.dim()];
    for iv in &intervals {
        total += iv.time;
        for (s, w) in sum.iter_mut().zip(&iv.weighted_velocity) {
            *s += w;
        }
    }
    let statistic = (total > 0.0).then(|| norm(&sum) / total);
    IntervalDecomposition { center: center.to_vec(), eta, delta, intervals, statistic }
}

/// `inf { sum_{p=i}^{l} eps_p : j <= i < l, x_i in from, x_l in to }` over
/// all pairs.
pub fn naive_separation(traj: &Trajectory, from: &Ball, to: &Ball, j: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in j..traj.len() {
        if !from.contains(traj.point(i)) {
            continue;
        }
        let mut s = traj.step(i);
        for l in i + 1..traj.len() {
            s += traj.step(l);
            if to.contains(traj.point(l)) {
                best = best.min(s);
            }
        }
    }
    best
}

/// A planar mean-reverting random walk with random positive steps, stored
/// with the subgradients that reproduce it.
pub fn random_walk(rng: &mut ChaCha8Rng, n: usize) -> Trajectory {
    let mut points = Vec::with_capacity(n + 1);
    let mut velocities = Vec::with_capacity(n + 1);
    let mut steps = Vec::with_capacity(n + 1);
    let mut x = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
    for _ in 0..=n {
        let eps: f64 = rng.random_range(0.01..0.2);
        let next: Vec<f64> =
            x.iter().map(|&c| 0.9 * c + rng.random_range(-0.3..0.3)).collect();
        let v: Vec<f64> = x.iter().zip(&next).map(|(a, b)| (a - b) / eps).collect();
        points.push(x.clone());
        velocities.push(v);
        steps.push(eps);
        x = next;
    }
    let values = points.iter().map(|p| norm(p)).collect();
    Trajectory::from_iterates(points, velocities, steps, values).unwrap()
}
