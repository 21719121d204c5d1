use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dist;

/// Axis-aligned closed box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::invalid("box bounds must be nonempty and of equal length"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
            return Err(Error::invalid("box bounds must be finite with lo <= hi"));
        }
        Ok(Self { lo, hi })
    }

    /// The cube `[-half_width, half_width]^dim`.
    pub fn cube(dim: usize, half_width: f64) -> Self {
        Self { lo: vec![-half_width; dim], hi: vec![half_width; dim] }
    }

    /// Default guard box used when a run does not specify one.
    pub fn default_guard(dim: usize) -> Self {
        Self::cube(dim, 10.0)
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(xi, (l, h))| *l <= *xi && *xi <= *h)
    }

    /// Smallest box containing all the given points (flat, stride `dim`).
    pub fn enclosing(dim: usize, flat_points: &[f64]) -> Option<Self> {
        if dim == 0 || flat_points.is_empty() {
            return None;
        }
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in flat_points.chunks_exact(dim) {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some(Self { lo, hi })
    }

    /// Largest absolute coordinate per axis, `max(|lo_k|, |hi_k|)`.
    pub fn abs_extent(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| l.abs().max(h.abs())).collect()
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        dist(&self.center, x) <= self.radius
    }

    /// True when the closed balls are at positive distance from each other.
    pub fn is_separated_from(&self, other: &Ball) -> bool {
        dist(&self.center, &other.center) > self.radius + other.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_membership_and_enclosing() {
        let b = BoundingBox::cube(2, 1.0);
        assert!(b.contains(&[1.0, -1.0]));
        assert!(!b.contains(&[1.0 + 1e-12, 0.0]));
        let e = BoundingBox::enclosing(2, &[0.0, 1.0, -2.0, 3.0]).unwrap();
        assert_eq!(e.lo, vec![-2.0, 1.0]);
        assert_eq!(e.hi, vec![0.0, 3.0]);
        assert_eq!(e.abs_extent(), vec![2.0, 3.0]);
        assert!(BoundingBox::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn ball_separation() {
        let a = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        let b = Ball::new(vec![2.0, 0.0], 1.0).unwrap();
        let c = Ball::new(vec![2.5, 0.0], 1.0).unwrap();
        assert!(!a.is_separated_from(&b));
        assert!(a.is_separated_from(&c));
        assert!(Ball::new(vec![0.0], 0.0).is_err());
    }
}
