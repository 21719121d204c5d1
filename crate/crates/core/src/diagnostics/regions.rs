use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Checkpoints;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::funcs::PolyhedralFunction;
use crate::linalg::{norm, CompensatedSum};

type Indicator = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A set of the domain on which the function has the constant gradient
/// `gradient`.
#[derive(Clone)]
pub struct Region {
    pub gradient: Vec<f64>,
    indicator: Indicator,
}

impl Region {
    pub fn new<F>(gradient: Vec<f64>, indicator: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        Self { gradient, indicator: Arc::new(indicator) }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.indicator)(x)
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region").field("gradient", &self.gradient).finish_non_exhaustive()
    }
}

/// One region per affine piece: the points where that piece is the first
/// active piece at tolerance `tol_active`, as seen by the oracle. The regions
/// partition the domain.
pub fn polyhedral_regions(f: &PolyhedralFunction, tol_active: f64) -> Vec<Region> {
    let shared = Arc::new(f.clone());
    f.pieces()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let f = Arc::clone(&shared);
            Region::new(p.gradient.clone(), move |x| f.active_pieces(x, tol_active)[0] == j)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationPoint {
    pub n: usize,
    /// `lambda_r(n) = t_n(region r) / t_n`
    pub fractions: Vec<f64>,
    /// `||sum_r lambda_r(n) g_r||`
    pub residual: f64,
}

/// Fraction of time spent in each region up to every checkpoint.
pub fn region_occupation(
    traj: &Trajectory,
    regions: &[Region],
    checkpoints: &Checkpoints,
) -> Result<Vec<OccupationPoint>> {
    traj.require_dense("region occupation")?;
    checkpoints.check_within(traj.last_index())?;
    if regions.is_empty() {
        return Err(Error::invalid("at least one region is needed"));
    }
    if let Some(r) = regions.iter().find(|r| r.gradient.len() != traj.dim()) {
        return Err(Error::DimensionMismatch { expected: traj.dim(), actual: r.gradient.len() });
    }
    let mut times = vec![CompensatedSum::new(); regions.len()];
    let mut total = CompensatedSum::new();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.as_slice().iter().peekable();
    for i in 0..=checkpoints.last() {
        let x = traj.point(i);
        let eps = traj.step(i);
        total.add(eps);
        if let Some(r) = regions.iter().position(|r| r.contains(x)) {
            times[r].add(eps);
        }
        if next.peek() == Some(&&i) {
            next.next();
            let t = total.value();
            let fractions: Vec<f64> = times.iter().map(|s| s.value() / t).collect();
            let mut combo = vec![0.0; traj.dim()];
            for (lam, r) in fractions.iter().zip(regions) {
                for (c, g) in combo.iter_mut().zip(&r.gradient) {
                    *c += lam * g;
                }
            }
            out.push(OccupationPoint { n: i, fractions, residual: norm(&combo) });
        }
    }
    Ok(out)
}
