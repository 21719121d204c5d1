//! Vertex-hull descriptions of Clarke subdifferentials and the minimum-norm
//! point of a convex hull.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// How many candidate faces the exact enumeration may visit before the
/// iterative solver takes over.
const MAX_ENUMERATED_FACES: usize = 20_000;

/// Relative tolerance used by the iterative min-norm solver.
const ITERATIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubdiffKind {
    Singleton,
    VertexHull,
}

/// A compact convex set `conv(vertices)` in `R^dim`.
///
/// Vertices are stored flat with stride `dim`. Exact duplicates are removed on
/// construction, so a description with one vertex is a singleton.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdiffDescription {
    dim: usize,
    vertices: Vec<f64>,
}

impl SubdiffDescription {
    pub fn singleton(v: Vec<f64>) -> Self {
        Self { dim: v.len(), vertices: v }
    }

    pub fn hull<V: AsRef<[f64]>>(vertices: &[V]) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::invalid("a subdifferential needs at least one vertex"))?;
        let dim = first.as_ref().len();
        let mut flat = Vec::with_capacity(dim * vertices.len());
        for v in vertices {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: v.len() });
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("subdifferential vertices must be finite"));
            }
            flat.extend_from_slice(v);
        }
        Ok(Self::from_flat(dim, flat))
    }

    pub(crate) fn from_flat(dim: usize, flat: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && !flat.is_empty() && flat.len().is_multiple_of(dim));
        let mut out: Vec<f64> = Vec::with_capacity(flat.len());
        for v in flat.chunks_exact(dim) {
            if !out.chunks_exact(dim).any(|w| w == v) {
                out.extend_from_slice(v);
            }
        }
        Self { dim, vertices: out }
    }

    pub fn kind(&self) -> SubdiffKind {
        if self.len() == 1 {
            SubdiffKind::Singleton
        } else {
            SubdiffKind::VertexHull
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, k: usize) -> &[f64] {
        &self.vertices[k * self.dim..(k + 1) * self.dim]
    }

    pub fn vertices(&self) -> impl Iterator<Item = &[f64]> {
        self.vertices.chunks_exact(self.dim)
    }

    /// Point of `conv(vertices)` with convex weights `w`.
    pub fn combine(&self, w: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.dim];
        for (v, &wk) in self.vertices().zip(w) {
            for (pi, vi) in p.iter_mut().zip(v) {
                *pi += wk * vi;
            }
        }
        p
    }

    /// Barycentric weights of the minimum-norm element of the hull.
    pub fn min_norm_weights(&self) -> Vec<f64> {
        min_norm_weights(self.dim, &self.vertices)
    }

    /// `argmin { ||v|| : v in conv(vertices) }`.
    pub fn min_norm_element(&self) -> Vec<f64> {
        if self.len() == 1 {
            return self.vertices.clone();
        }
        self.combine(&self.min_norm_weights())
    }

    /// `dist(0, conv(vertices))`; zero exactly at Clarke-critical points.
    pub fn dist_to_critical(&self) -> f64 {
        norm(&self.min_norm_element())
    }

    /// Euclidean distance from `p` to the hull.
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        assert_eq!(p.len(), self.dim);
        let shifted: Vec<f64> = self
            .vertices()
            .flat_map(|v| v.iter().zip(p).map(|(a, b)| a - b))
            .collect();
        SubdiffDescription { dim: self.dim, vertices: shifted }.dist_to_critical()
    }
}

/// Minimum-norm point of `conv(vertices)` as barycentric weights.
///
/// Small hulls are solved exactly: every affinely independent subset of at
/// most `dim + 1` vertices is projected onto its affine hull and the feasible
/// candidate of least norm wins. Larger hulls fall back to accelerated
/// projected gradient on the simplex.
pub fn min_norm_weights(dim: usize, vertices: &[f64]) -> Vec<f64> {
    let k = vertices.len() / dim;
    match k {
        0 => Vec::new(),
        1 => vec![1.0],
        2 => segment_weights(&vertices[..dim], &vertices[dim..]),
        _ if face_count(k, dim + 1) <= MAX_ENUMERATED_FACES => enumerate_faces(dim, vertices),
        _ => projected_gradient(dim, vertices),
    }
}

fn segment_weights(a: &[f64], b: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let dd = dot(&d, &d);
    if dd == 0.0 {
        return vec![1.0, 0.0];
    }
    let t = (-dot(a, &d) / dd).clamp(0.0, 1.0);
    vec![1.0 - t, t]
}

fn face_count(k: usize, max_size: usize) -> usize {
    let mut total = 0usize;
    let mut c = 1usize;
    for s in 1..=max_size.min(k) {
        c = c.saturating_mul(k + 1 - s) / s;
        total = total.saturating_add(c);
    }
    total
}

fn gram(dim: usize, vertices: &[f64], idx: &[usize]) -> Vec<f64> {
    let s = idx.len();
    let mut g = vec![0.0; s * s];
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate().skip(a) {
            let v = dot(&vertices[i * dim..(i + 1) * dim], &vertices[j * dim..(j + 1) * dim]);
            g[a * s + b] = v;
            g[b * s + a] = v;
        }
    }
    g
}

/// Projection of the origin onto the affine hull of the selected vertices.
/// Returns `None` when the subset is affinely dependent.
fn affine_projection(dim: usize, vertices: &[f64], idx: &[usize]) -> Option<Vec<f64>> {
    let s = idx.len();
    let g = gram(dim, vertices, idx);
    let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    // KKT system [G 1; 1^T 0] [w; mu] = [0; 1]
    let n = s + 1;
    let mut m = vec![0.0; n * (n + 1)];
    for a in 0..s {
        for b in 0..s {
            m[a * (n + 1) + b] = g[a * s + b];
        }
        m[a * (n + 1) + s] = 1.0;
        m[s * (n + 1) + a] = 1.0;
    }
    m[s * (n + 1) + n] = 1.0;
    let sol = solve_augmented(n, &mut m, 1e-13 * scale)?;
    Some(sol[..s].to_vec())
}

/// Gaussian elimination with partial pivoting on an `n x (n+1)` augmented matrix.
fn solve_augmented(n: usize, m: &mut [f64], pivot_tol: f64) -> Option<Vec<f64>> {
    let w = n + 1;
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a * w + col].abs().total_cmp(&m[b * w + col].abs()))?;
        if m[piv * w + col].abs() <= pivot_tol {
            return None;
        }
        if piv != col {
            for c in 0..w {
                m.swap(piv * w + c, col * w + c);
            }
        }
        for r in col + 1..n {
            let f = m[r * w + col] / m[col * w + col];
            if f != 0.0 {
                for c in col..w {
                    m[r * w + c] -= f * m[col * w + c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = m[r * w + n];
        for c in r + 1..n {
            acc -= m[r * w + c] * x[c];
        }
        x[r] = acc / m[r * w + r];
    }
    Some(x)
}

fn enumerate_faces(dim: usize, vertices: &[f64]) -> Vec<f64> {
    let k = vertices.len() / dim;
    let norm_sq = |w: &[f64]| {
        let mut p = vec![0.0; dim];
        for (j, &wj) in w.iter().enumerate() {
            for c in 0..dim {
                p[c] += wj * vertices[j * dim + c];
            }
        }
        dot(&p, &p)
    };

    let mut best = vec![0.0; k];
    best[0] = 1.0;
    let mut best_val = norm_sq(&best);
    for j in 1..k {
        let mut w = vec![0.0; k];
        w[j] = 1.0;
        let v = norm_sq(&w);
        if v < best_val {
            best_val = v;
            best = w;
        }
    }

    let mut idx = Vec::with_capacity(dim + 1);
    for size in 2..=k.min(dim + 1) {
        idx.clear();
        idx.extend(0..size);
        loop {
            if let Some(face_w) = affine_projection(dim, vertices, &idx) {
                if face_w.iter().all(|&x| x >= -1e-10) {
                    let mut w = vec![0.0; k];
                    let mut total = 0.0;
                    for (&j, &x) in idx.iter().zip(&face_w) {
                        w[j] = x.max(0.0);
                        total += w[j];
                    }
                    if total > 0.0 {
                        w.iter_mut().for_each(|x| *x /= total);
                        let v = norm_sq(&w);
                        if v < best_val {
                            best_val = v;
                            best = w;
                        }
                    }
                }
            }
            if !next_combination(&mut idx, k) {
                break;
            }
        }
    }
    best
}

fn next_combination(idx: &mut [usize], k: usize) -> bool {
    let s = idx.len();
    let mut i = s;
    while i > 0 {
        i -= 1;
        if idx[i] < k - s + i {
            idx[i] += 1;
            for j in i + 1..s {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

fn projected_gradient(dim: usize, vertices: &[f64]) -> Vec<f64> {
    let k = vertices.len() / dim;
    let all: Vec<usize> = (0..k).collect();
    let g = gram(dim, vertices, &all);
    let lipschitz = (0..k).map(|i| g[i * k + i]).sum::<f64>().max(f64::MIN_POSITIVE);
    let grad = |w: &[f64]| -> Vec<f64> {
        (0..k).map(|i| (0..k).map(|j| g[i * k + j] * w[j]).sum()).collect()
    };

    let mut w = vec![1.0 / k as f64; k];
    let mut y = w.clone();
    let mut t = 1.0f64;
    for _ in 0..200_000 {
        let gy = grad(&y);
        let step: Vec<f64> = y.iter().zip(&gy).map(|(a, b)| a - b / lipschitz).collect();
        let w_next = project_simplex(&step);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        y = w_next.iter().zip(&w).map(|(a, b)| a + beta * (a - b)).collect();
        w = w_next;
        t = t_next;

        // Frank-Wolfe gap <grad, w> - min_j grad_j bounds the suboptimality.
        let gw = grad(&w);
        let lin: f64 = gw.iter().zip(&w).map(|(a, b)| a * b).sum();
        let min_g = gw.iter().copied().fold(f64::INFINITY, f64::min);
        if lin - min_g <= ITERATIVE_TOL * (1.0 + lin.abs()) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sd(vs: &[[f64; 2]]) -> SubdiffDescription {
        SubdiffDescription::hull(vs).unwrap()
    }

    /// Dense barycentric sampling of the hull; independent of the face solver.
    fn brute_min_norm(vs: &[[f64; 2]], steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        let k = vs.len();
        let mut consider = |w: &[f64]| {
            let p = [
                (0..k).map(|j| w[j] * vs[j][0]).sum::<f64>(),
                (0..k).map(|j| w[j] * vs[j][1]).sum::<f64>(),
            ];
            best = best.min(norm(&p));
        };
        match k {
            1 => consider(&[1.0]),
            2 => (0..=steps).for_each(|a| {
                let t = a as f64 / steps as f64;
                consider(&[1.0 - t, t]);
            }),
            3 => {
                for a in 0..=steps {
                    for b in 0..=steps - a {
                        let (x, y) = (a as f64 / steps as f64, b as f64 / steps as f64);
                        consider(&[x, y, 1.0 - x - y]);
                    }
                }
            }
            _ => unreachable!(),
        }
        best
    }

    #[test]
    fn segment_min_norm_is_midpoint() {
        let h = sd(&[[1.0, 1.0], [1.0, -1.0]]);
        assert_eq!(h.min_norm_element(), vec![1.0, 0.0]);
        assert_eq!(h.dist_to_critical(), 1.0);
        assert!((brute_min_norm(&[[1.0, 1.0], [1.0, -1.0]], 1000) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tripod_hull_contains_origin() {
        let vs = [[-2.0, 0.0], [1.0, 1.0], [1.0, -1.0]];
        let h = sd(&vs);
        let p = h.min_norm_element();
        assert!(norm(&p) < 1e-15, "{p:?}");
        assert!(h.dist_to_critical() < 1e-15);
        let w = h.min_norm_weights();
        for wi in w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-12);
        }
        assert!(brute_min_norm(&vs, 300) < 1e-2);
    }

    #[test]
    fn singleton_distance_is_norm() {
        let h = SubdiffDescription::singleton(vec![2.0, 0.0]);
        assert_eq!(h.kind(), SubdiffKind::Singleton);
        assert_eq!(h.dist_to_critical(), 2.0);
    }

    #[test]
    fn duplicates_collapse() {
        let h = sd(&[[1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(h.kind(), SubdiffKind::Singleton);
    }

    #[test]
    fn triangle_edge_and_vertex_cases_match_brute_force() {
        let cases: [[[f64; 2]; 3]; 4] = [
            [[1.0, 2.0], [3.0, -1.0], [2.0, 2.0]],
            [[0.5, 0.5], [2.0, 0.1], [0.3, 3.0]],
            [[-1.0, 1.0], [1.0, 1.0], [0.0, 2.0]],
            [[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]],
        ];
        for vs in cases {
            let exact = sd(&vs).dist_to_critical();
            let brute = brute_min_norm(&vs, 600);
            assert!(exact <= brute + 1e-12, "{vs:?}: {exact} > {brute}");
            assert!(brute - exact < 1e-2, "{vs:?}: {exact} vs {brute}");
        }
    }

    #[test]
    fn iterative_fallback_agrees_with_enumeration() {
        // 9 vertices in 2D around an offset center
        let mut flat = Vec::new();
        for j in 0..9 {
            let a = j as f64 * std::f64::consts::TAU / 9.0;
            flat.extend_from_slice(&[2.0 + a.cos(), 0.5 + a.sin()]);
        }
        let exact = enumerate_faces(2, &flat);
        let iter = projected_gradient(2, &flat);
        let pe = SubdiffDescription::from_flat(2, flat.clone()).combine(&exact);
        let pi = SubdiffDescription::from_flat(2, flat).combine(&iter);
        assert!((norm(&pe) - norm(&pi)).abs() < 1e-8, "{pe:?} {pi:?}");
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        for x in &p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(project_simplex(&[3.0, 0.0]), vec![1.0, 0.0]);
    }

    #[test]
    fn face_counting() {
        assert_eq!(face_count(3, 3), 7);
        assert_eq!(face_count(4, 3), 14);
    }
}
