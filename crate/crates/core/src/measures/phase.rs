use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::linalg::{dist, CompensatedSum, CompensatedVecSum};

/// Weighted position-velocity samples `(x, v, w)`.
///
/// The normalised measure gives sample `k` mass `w_k / total_weight`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPhaseMeasure {
    dim: usize,
    positions: Vec<f64>,
    velocities: Vec<f64>,
    weights: Vec<f64>,
    total: CompensatedSum,
}

impl EmpiricalPhaseMeasure {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            positions: Vec::new(),
            velocities: Vec::new(),
            weights: Vec::new(),
            total: CompensatedSum::new(),
        }
    }

    pub fn push(&mut self, x: &[f64], v: &[f64], w: f64) -> Result<()> {
        if x.len() != self.dim || v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: if x.len() != self.dim { x.len() } else { v.len() },
            });
        }
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::invalid("sample weights must be positive and finite"));
        }
        self.positions.extend_from_slice(x);
        self.velocities.extend_from_slice(v);
        self.weights.push(w);
        self.total.add(w);
        Ok(())
    }

    /// Unit-speed traversal of the closed polygon through `vertices`, sampled
    /// at `nodes` Gauss-Legendre points per edge.
    ///
    /// With `nodes` points the integral of any polynomial of degree up to
    /// `2 nodes - 1` along each edge is exact.
    pub fn closed_polygon(vertices: &[Vec<f64>], nodes: usize) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid("a polygon needs at least two vertices"));
        }
        let (xs, ws) = gauss_legendre(nodes)?;
        let dim = vertices[0].len();
        let mut mu = Self::new(dim);
        for k in 0..vertices.len() {
            let a = &vertices[k];
            let b = &vertices[(k + 1) % vertices.len()];
            if a.len() != dim || b.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: a.len().max(b.len()) });
            }
            let len = dist(a, b);
            if len == 0.0 {
                continue;
            }
            let dir: Vec<f64> = b.iter().zip(a).map(|(p, q)| (p - q) / len).collect();
            for (&s, &w) in xs.iter().zip(&ws) {
                let u = 0.5 * (s + 1.0);
                let x: Vec<f64> = a.iter().zip(b).map(|(p, q)| p + u * (q - p)).collect();
                mu.push(&x, &dir, 0.5 * w * len)?;
            }
        }
        Ok(mu)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn position(&self, k: usize) -> &[f64] {
        &self.positions[k * self.dim..(k + 1) * self.dim]
    }

    pub fn velocity(&self, k: usize) -> &[f64] {
        &self.velocities[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weight(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn total_weight(&self) -> f64 {
        self.total.value()
    }

    pub fn positions_flat(&self) -> &[f64] {
        &self.positions
    }

    /// `int phi(x, v) dmu` for the normalised measure.
    pub fn integrate<F>(&self, phi: F) -> f64
    where
        F: Fn(&[f64], &[f64]) -> f64,
    {
        let s: CompensatedSum =
            (0..self.len()).map(|k| self.weights[k] * phi(self.position(k), self.velocity(k))).collect();
        s.value() / self.total_weight()
    }

    /// `int v dmu`.
    pub fn mean_velocity(&self) -> Vec<f64> {
        let mut s = CompensatedVecSum::zeros(self.dim);
        for k in 0..self.len() {
            s.add_scaled(self.weights[k], self.velocity(k));
        }
        let t = self.total_weight();
        s.value().into_iter().map(|c| c / t).collect()
    }
}

/// The measure of the interpolating curve restricted to the iterates in `b`:
/// one sample `(x_i, -v_i, eps_i)` per index.
pub fn phase_measure(traj: &Trajectory, b: &[usize]) -> Result<EmpiricalPhaseMeasure> {
    traj.require_dense("the empirical phase measure")?;
    if b.is_empty() {
        return Err(Error::invalid("the index set must be nonempty"));
    }
    let mut mu = EmpiricalPhaseMeasure::new(traj.dim());
    let mut neg = vec![0.0; traj.dim()];
    for &i in b {
        if i >= traj.len() {
            return Err(Error::invalid(format!("index {i} is not a stored iterate")));
        }
        for (n, v) in neg.iter_mut().zip(traj.velocity(i)) {
            *n = -v;
        }
        mu.push(traj.point(i), &neg, traj.step(i))?;
    }
    Ok(mu)
}

/// [`phase_measure`] over the index range `start..=end`.
pub fn phase_measure_range(traj: &Trajectory, start: usize, end: usize) -> Result<EmpiricalPhaseMeasure> {
    if start > end {
        return Err(Error::invalid("empty index range"));
    }
    let b: Vec<usize> = (start..=end).collect();
    phase_measure(traj, &b)
}

fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = 0.6f64.sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let s = (6.0f64 / 5.0).sqrt();
            let a = ((3.0 - 2.0 * s) / 7.0).sqrt();
            let b = ((3.0 + 2.0 * s) / 7.0).sqrt();
            let wa = (18.0 + 30f64.sqrt()) / 36.0;
            let wb = (18.0 - 30f64.sqrt()) / 36.0;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        5 => {
            let s = 2.0 * (10.0f64 / 7.0).sqrt();
            let a = (5.0 - s).sqrt() / 3.0;
            let b = (5.0 + s).sqrt() / 3.0;
            let w0 = 128.0 / 225.0;
            let wa = (322.0 + 13.0 * 70f64.sqrt()) / 900.0;
            let wb = (322.0 - 13.0 * 70f64.sqrt()) / 900.0;
            (vec![-b, -a, 0.0, a, b], vec![wb, wa, w0, wa, wb])
        }
        _ => return Err(Error::invalid("between 1 and 5 quadrature nodes per edge are supported")),
    };
    Ok(r)
}
