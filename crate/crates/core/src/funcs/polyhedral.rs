use serde::{Deserialize, Serialize};

use super::{FunctionOracle, Stratum, SubdiffDescription};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// `x -> gradient . x + offset`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub gradient: Vec<f64>,
    pub offset: f64,
}

impl AffinePiece {
    pub fn new(gradient: Vec<f64>, offset: f64) -> Self {
        Self { gradient, offset }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.gradient, x) + self.offset
    }
}

/// Convex polyhedral function `f(x) = max_j pieces[j](x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralFunction {
    dim: usize,
    pieces: Vec<AffinePiece>,
    name: String,
    strata: Vec<Stratum>,
}

/// A maximal sub-segment of `[a, b]` on which one piece attains the max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentPiece {
    pub s_start: f64,
    pub s_end: f64,
    pub piece: usize,
}

impl PolyhedralFunction {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let dim = pieces
            .first()
            .map(|p| p.gradient.len())
            .ok_or_else(|| Error::invalid("a polyhedral function needs at least one piece"))?;
        if dim == 0 {
            return Err(Error::invalid("piece gradients must be nonempty"));
        }
        for p in &pieces {
            if p.gradient.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, actual: p.gradient.len() });
            }
            if !p.offset.is_finite() || p.gradient.iter().any(|g| !g.is_finite()) {
                return Err(Error::invalid("piece coefficients must be finite"));
            }
        }
        Ok(Self { dim, pieces, name: "polyhedral".into(), strata: Vec::new() })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_strata(mut self, strata: Vec<Stratum>) -> Self {
        self.strata = strata;
        self
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Index of the first piece attaining the max.
    pub fn argmax(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_val = self.pieces[0].eval(x);
        for (j, p) in self.pieces.iter().enumerate().skip(1) {
            let v = p.eval(x);
            if v > best_val {
                best = j;
                best_val = v;
            }
        }
        best
    }

    /// Pieces within `tol_active * (1 + |f(x)|)` of the max, in piece order.
    pub fn active_pieces(&self, x: &[f64], tol_active: f64) -> Vec<usize> {
        let vals: Vec<f64> = self.pieces.iter().map(|p| p.eval(x)).collect();
        let fx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let slack = tol_active * (1.0 + fx.abs());
        (0..vals.len()).filter(|&j| fx - vals[j] <= slack).collect()
    }

    /// Splits the segment `a + s (b - a)`, `s in [0, 1]`, at the points where
    /// the maximizing piece changes.
    pub fn segment_pieces(&self, a: &[f64], b: &[f64]) -> Vec<SegmentPiece> {
        let d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
        let alpha: Vec<f64> = self.pieces.iter().map(|p| p.eval(a)).collect();
        let beta: Vec<f64> = self.pieces.iter().map(|p| dot(&p.gradient, &d)).collect();

        // Active piece at s = 0, ties broken towards the steepest slope so the
        // piece stays maximal just after the start.
        let mut current = 0;
        for j in 1..alpha.len() {
            if alpha[j] > alpha[current] || (alpha[j] == alpha[current] && beta[j] > beta[current]) {
                current = j;
            }
        }

        let mut out = Vec::new();
        let mut s = 0.0;
        loop {
            let mut next: Option<(f64, usize)> = None;
            for k in 0..alpha.len() {
                if beta[k] <= beta[current] {
                    continue;
                }
                let sk = (alpha[current] - alpha[k]) / (beta[k] - beta[current]);
                if sk > s && sk < 1.0 {
                    let better = match next {
                        None => true,
                        Some((sn, kn)) => sk < sn || (sk == sn && beta[k] > beta[kn]),
                    };
                    if better {
                        next = Some((sk, k));
                    }
                }
            }
            match next {
                Some((sk, k)) => {
                    out.push(SegmentPiece { s_start: s, s_end: sk, piece: current });
                    s = sk;
                    current = k;
                }
                None => {
                    out.push(SegmentPiece { s_start: s, s_end: 1.0, piece: current });
                    return out;
                }
            }
        }
    }
}

impl FunctionOracle for PolyhedralFunction {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn subdifferential(&self, x: &[f64], tol_active: f64) -> SubdiffDescription {
        let active = self.active_pieces(x, tol_active);
        let mut flat = Vec::with_capacity(active.len() * self.dim);
        for j in active {
            flat.extend_from_slice(&self.pieces[j].gradient);
        }
        SubdiffDescription::from_flat(self.dim, flat)
    }

    /// Global Lipschitz constant `max_j ||gradient_j||`.
    fn lipschitz_bound(&self) -> Option<f64> {
        Some(self.pieces.iter().map(|p| norm(&p.gradient)).fold(0.0, f64::max))
    }

    fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    fn as_polyhedral(&self) -> Option<&PolyhedralFunction> {
        Some(self)
    }
}
