//! Path-differentiable test functions with exact Clarke subdifferential
//! oracles, and the policies that pick a subgradient from them.

pub mod builtin;
pub mod composite;
pub mod hull;
pub mod polyhedral;
pub mod select;

pub use builtin::{builtin, Builtin};
pub use composite::{CompositeFunction, Monomial, Polynomial, Term};
pub use hull::{SubdiffDescription, SubdiffKind};
pub use polyhedral::{AffinePiece, PolyhedralFunction, SegmentPiece};
pub use select::{select, SelectionKind, SelectionPolicy, Selector};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};

/// Relative tolerance used to decide which pieces or kinks are active.
pub const DEFAULT_TOL_ACTIVE: f64 = 1e-9;

/// A locally Lipschitz, path-differentiable function with a Clarke
/// subdifferential oracle.
///
/// Implementations are immutable and may be shared across threads.
pub trait FunctionOracle: Send + Sync {
    fn name(&self) -> &str;

    fn dimension(&self) -> usize;

    /// `f(x)`. The caller guarantees `x.len() == self.dimension()`.
    fn value(&self, x: &[f64]) -> f64;

    /// Clarke subdifferential at `x`, with kinks detected up to the relative
    /// tolerance `tol_active`.
    fn subdifferential(&self, x: &[f64], tol_active: f64) -> SubdiffDescription;

    fn lipschitz_bound(&self) -> Option<f64> {
        None
    }

    /// Declared lower-dimensional strata of the singular set.
    fn strata(&self) -> &[Stratum] {
        &[]
    }

    fn as_polyhedral(&self) -> Option<&PolyhedralFunction> {
        None
    }
}

fn check_dim(oracle: &dyn FunctionOracle, x: &[f64]) -> Result<()> {
    if x.len() != oracle.dimension() {
        return Err(Error::DimensionMismatch { expected: oracle.dimension(), actual: x.len() });
    }
    Ok(())
}

pub fn eval(oracle: &dyn FunctionOracle, x: &[f64]) -> Result<f64> {
    check_dim(oracle, x)?;
    Ok(oracle.value(x))
}

pub fn subdifferential(
    oracle: &dyn FunctionOracle,
    x: &[f64],
    tol_active: f64,
) -> Result<SubdiffDescription> {
    check_dim(oracle, x)?;
    if !(tol_active >= 0.0) {
        return Err(Error::invalid("tol_active must be nonnegative"));
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("x must be finite"));
    }
    Ok(oracle.subdifferential(x, tol_active))
}

/// `dist(0, conv(vertices))`.
pub fn dist_to_critical(sd: &SubdiffDescription) -> f64 {
    sd.dist_to_critical()
}

/// A relatively open piece of an affine subspace: `anchor + span(tangents)`,
/// cut down by strict half-space constraints `bound(x) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stratum {
    pub anchor: Vec<f64>,
    /// Orthonormal tangent basis; empty for a point stratum.
    pub tangents: Vec<Vec<f64>>,
    pub bounds: Vec<AffinePiece>,
}

impl Stratum {
    pub fn point(anchor: Vec<f64>) -> Self {
        Self { anchor, tangents: Vec::new(), bounds: Vec::new() }
    }

    /// `anchor + t * direction`, `t in R`.
    pub fn line(anchor: Vec<f64>, direction: Vec<f64>) -> Self {
        Self { anchor, tangents: vec![direction], bounds: Vec::new() }
    }

    /// `anchor + t * direction`, `t > 0`.
    pub fn ray(anchor: Vec<f64>, direction: Vec<f64>) -> Self {
        let offset = -dot(&direction, &anchor);
        let bound = AffinePiece::new(direction.clone(), offset);
        Self { anchor, tangents: vec![direction], bounds: vec![bound] }
    }

    pub fn dimension(&self) -> usize {
        self.tangents.len()
    }

    /// Membership up to `tol` in distance; half-space bounds must hold with
    /// margin `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        let mut r: Vec<f64> = x.iter().zip(&self.anchor).map(|(a, b)| a - b).collect();
        for t in &self.tangents {
            let c = dot(&r, t);
            for (ri, ti) in r.iter_mut().zip(t) {
                *ri -= c * ti;
            }
        }
        norm(&r) <= tol && self.bounds.iter().all(|b| b.eval(x) > tol)
    }
}

/// The lowest-dimensional declared stratum containing `x`, if any.
pub fn stratum_at<'a>(oracle: &'a dyn FunctionOracle, x: &[f64], tol: f64) -> Option<&'a Stratum> {
    oracle
        .strata()
        .iter()
        .filter(|s| s.contains(x, tol))
        .min_by_key(|s| s.dimension())
}
