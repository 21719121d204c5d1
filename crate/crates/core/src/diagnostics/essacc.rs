use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Checkpoints;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::funcs::FunctionOracle;
use crate::linalg::{CompensatedSum, CompensatedVecSum};
use crate::measures::Grid;

/// Default occupation threshold above which a cell counts as essential.
pub const DEFAULT_TAU: f64 = 0.01;

/// Default activity tolerance for judging criticality of cell points.
pub const DEFAULT_CRIT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellOccupation {
    pub cell: usize,
    pub center: Vec<f64>,
    /// `t_{N_k}(cell) / t_{N_k}` for each checkpoint `N_k`.
    pub fractions: Vec<f64>,
    /// Largest fraction over the tail half of the checkpoints.
    pub tail_max: f64,
    /// `tail_max > tau`
    pub essential: bool,
    /// Visited at or after the first tail checkpoint.
    pub accumulated: bool,
    /// Time-weighted mean of the iterates in the cell.
    pub mean_point: Vec<f64>,
    pub dist_at_center: Option<f64>,
    pub dist_at_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssAccReport {
    pub grid: Grid,
    pub checkpoints: Checkpoints,
    pub tau: f64,
    /// Every cell visited before the last checkpoint, in cell order.
    pub cells: Vec<CellOccupation>,
    /// Fraction of time spent outside the grid box, per checkpoint.
    pub overflow: Vec<f64>,
}

impl EssAccReport {
    pub fn essential_cells(&self) -> impl Iterator<Item = &CellOccupation> {
        self.cells.iter().filter(|c| c.essential)
    }

    pub fn accumulated_cells(&self) -> impl Iterator<Item = &CellOccupation> {
        self.cells.iter().filter(|c| c.accumulated)
    }

    /// Sum of all cell fractions and the overflow fraction at checkpoint `k`.
    pub fn fraction_total(&self, k: usize) -> f64 {
        self.cells.iter().map(|c| c.fractions[k]).sum::<f64>() + self.overflow[k]
    }
}

struct CellState {
    time: CompensatedSum,
    position: CompensatedVecSum,
    fractions: Vec<f64>,
    accumulated: bool,
}

/// Estimates which grid cells carry a persistent share of the time: the
/// finite-horizon surrogate of `limsup_N t_N(cell) / t_N > 0`.
///
/// With `criticality = Some((oracle, tol))` every reported cell also gets the
/// distance from `0` to the subdifferential at its centre and at its mean
/// point, with kinks detected up to `tol`.
pub fn essacc_estimate(
    traj: &Trajectory,
    grid: &Grid,
    checkpoints: &Checkpoints,
    tau: f64,
    criticality: Option<(&dyn FunctionOracle, f64)>,
) -> Result<EssAccReport> {
    traj.require_dense("the essential accumulation estimate")?;
    checkpoints.check_within(traj.last_index())?;
    if grid.dim() != traj.dim() {
        return Err(Error::DimensionMismatch { expected: traj.dim(), actual: grid.dim() });
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid("tau must lie in (0, 1)"));
    }
    if let Some((oracle, tol)) = criticality {
        if oracle.dimension() != traj.dim() {
            return Err(Error::DimensionMismatch { expected: traj.dim(), actual: oracle.dimension() });
        }
        if !(tol >= 0.0) {
            return Err(Error::invalid("criticality tolerance must be nonnegative"));
        }
    }

    let cps = checkpoints.as_slice();
    let tail_from = cps[checkpoints.tail_start()];
    let mut states: Vec<CellState> = Vec::new();
    let mut cell_ids: Vec<usize> = Vec::new();
    let mut lookup: HashMap<usize, usize> = HashMap::new();
    let mut overflow_time = CompensatedSum::new();
    let mut overflow = Vec::with_capacity(cps.len());
    let mut total = CompensatedSum::new();
    let mut k = 0;
    for i in 0..=checkpoints.last() {
        let x = traj.point(i);
        let eps = traj.step(i);
        total.add(eps);
        match grid.cell_of(x) {
            Some(c) => {
                let slot = *lookup.entry(c).or_insert_with(|| {
                    cell_ids.push(c);
                    states.push(CellState {
                        time: CompensatedSum::new(),
                        position: CompensatedVecSum::zeros(x.len()),
                        fractions: vec![0.0; k],
                        accumulated: false,
                    });
                    states.len() - 1
                });
                let s = &mut states[slot];
                s.time.add(eps);
                s.position.add_scaled(eps, x);
                s.accumulated |= i >= tail_from;
            }
            None => overflow_time.add(eps),
        }
        if i == cps[k] {
            let t = total.value();
            for s in &mut states {
                s.fractions.push(s.time.value() / t);
            }
            overflow.push(overflow_time.value() / t);
            k += 1;
        }
    }

    let tail = checkpoints.tail_start();
    let dist = |x: &[f64]| {
        criticality.map(|(oracle, tol)| oracle.subdifferential(x, tol).dist_to_critical())
    };
    let mut cells: Vec<CellOccupation> = cell_ids
        .into_iter()
        .zip(states)
        .map(|(cell, s)| {
            let tail_max = s.fractions[tail..].iter().copied().fold(0.0, f64::max);
            let m = s.time.value();
            let mean_point: Vec<f64> = s.position.value().into_iter().map(|p| p / m).collect();
            let center = grid.cell_center(cell);
            CellOccupation {
                cell,
                dist_at_center: dist(&center),
                dist_at_mean: dist(&mean_point),
                center,
                fractions: s.fractions,
                tail_max,
                essential: tail_max > tau,
                accumulated: s.accumulated,
                mean_point,
            }
        })
        .collect();
    cells.sort_by_key(|c| c.cell);
    Ok(EssAccReport { grid: grid.clone(), checkpoints: checkpoints.clone(), tau, cells, overflow })
}
