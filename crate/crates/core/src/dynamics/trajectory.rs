use serde::{Deserialize, Serialize};

use super::StepSchedule;
use crate::error::{Error, Result};
use crate::funcs::SelectionPolicy;
use crate::linalg::{CompensatedSum, CompensatedVecSum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub oracle: String,
    pub schedule: StepSchedule,
    pub policy: SelectionPolicy,
    /// Requested number of steps `N`.
    pub iterations: usize,
}

/// The first iterate that left the guard box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Divergence {
    pub index: usize,
    pub point: Vec<f64>,
}

/// Exact running totals over every computed iterate, stored or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAggregates {
    /// Index of the last computed iterate.
    pub last_index: usize,
    /// `t_N = sum_{i <= N} eps_i`
    pub total_time: f64,
    /// `sum_{i <= N} eps_i v_i = x_0 - x_{N+1}`
    pub weighted_velocity_sum: Vec<f64>,
    pub f_min: f64,
    pub f_max: f64,
    pub last_point: Vec<f64>,
    pub last_value: f64,
    /// `x_{N+1} = x_N - eps_N v_N`
    pub next_point: Vec<f64>,
}

/// Recorded iterates `(x_i, v_i, eps_i, t_i, f(x_i))` of one run.
///
/// Row `r` holds iterate `i = r * thin`. Vectors are stored flat with stride
/// `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub(crate) dim: usize,
    pub(crate) thin: usize,
    pub(crate) points: Vec<f64>,
    pub(crate) velocities: Vec<f64>,
    pub(crate) steps: Vec<f64>,
    pub(crate) times: Vec<f64>,
    pub(crate) values: Vec<f64>,
    pub(crate) aggregates: Option<RunAggregates>,
    pub(crate) meta: Option<RunMeta>,
    pub(crate) divergence: Option<Divergence>,
}

impl Trajectory {
    pub(crate) fn with_capacity(dim: usize, thin: usize, rows: usize) -> Self {
        Self {
            dim,
            thin,
            points: Vec::with_capacity(rows * dim),
            velocities: Vec::with_capacity(rows * dim),
            steps: Vec::with_capacity(rows),
            times: Vec::with_capacity(rows),
            values: Vec::with_capacity(rows),
            aggregates: None,
            meta: None,
            divergence: None,
        }
    }

    pub(crate) fn push_row(&mut self, x: &[f64], v: &[f64], eps: f64, t: f64, f: f64) {
        self.points.extend_from_slice(x);
        self.velocities.extend_from_slice(v);
        self.steps.push(eps);
        self.times.push(t);
        self.values.push(f);
    }

    /// Builds a dense trajectory from explicit iterates and subgradients.
    ///
    /// Times are accumulated from the steps. The recursion is not checked, so
    /// arbitrary sequences can be analysed.
    pub fn from_iterates(
        points: Vec<Vec<f64>>,
        velocities: Vec<Vec<f64>>,
        steps: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let rows = points.len();
        if rows == 0 {
            return Err(Error::invalid("a trajectory needs at least one iterate"));
        }
        if velocities.len() != rows || steps.len() != rows || values.len() != rows {
            return Err(Error::invalid("iterate arrays must have equal length"));
        }
        let dim = points[0].len();
        let mut traj = Self::with_capacity(dim, 1, rows);
        let mut t = 0.0;
        for r in 0..rows {
            if points[r].len() != dim || velocities[r].len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: points[r].len().max(velocities[r].len()),
                });
            }
            if !(steps[r] > 0.0 && steps[r].is_finite()) {
                return Err(Error::invalid("steps must be positive and finite"));
            }
            t += steps[r];
            traj.push_row(&points[r], &velocities[r], steps[r], t, values[r]);
        }
        traj.aggregates = Some(traj.recompute_aggregates());
        Ok(traj)
    }

    pub(crate) fn from_flat_rows(
        dim: usize,
        thin: usize,
        points: Vec<f64>,
        velocities: Vec<f64>,
        steps: Vec<f64>,
        times: Vec<f64>,
        values: Vec<f64>,
    ) -> Self {
        let mut t = Self {
            dim,
            thin,
            points,
            velocities,
            steps,
            times,
            values,
            aggregates: None,
            meta: None,
            divergence: None,
        };
        if thin == 1 && !t.steps.is_empty() {
            t.aggregates = Some(t.recompute_aggregates());
        }
        t
    }

    fn recompute_aggregates(&self) -> RunAggregates {
        debug_assert!(self.thin == 1 && !self.steps.is_empty());
        let mut wv = CompensatedVecSum::zeros(self.dim);
        let mut total = CompensatedSum::new();
        for r in 0..self.len() {
            wv.add_scaled(self.steps[r], self.velocity(r));
            total.add(self.steps[r]);
        }
        let last = self.len() - 1;
        let next: Vec<f64> = self
            .point(last)
            .iter()
            .zip(self.velocity(last))
            .map(|(x, v)| x - self.steps[last] * v)
            .collect();
        RunAggregates {
            last_index: last,
            total_time: total.value(),
            weighted_velocity_sum: wv.value(),
            f_min: self.values.iter().copied().fold(f64::INFINITY, f64::min),
            f_max: self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            last_point: self.point(last).to_vec(),
            last_value: self.values[last],
            next_point: next,
        }
    }

    pub fn with_aggregates(mut self, aggregates: RunAggregates) -> Self {
        self.aggregates = Some(aggregates);
        self
    }

    pub fn with_meta(mut self, meta: RunMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored rows.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn thin(&self) -> usize {
        self.thin
    }

    pub fn is_dense(&self) -> bool {
        self.thin == 1
    }

    /// Errors unless every iterate is stored.
    pub fn require_dense(&self, what: &'static str) -> Result<()> {
        if self.is_dense() {
            Ok(())
        } else {
            Err(Error::Thinned { stride: self.thin, what })
        }
    }

    /// Iteration index of a stored row.
    pub fn index(&self, row: usize) -> usize {
        row * self.thin
    }

    /// Index of the last stored iterate.
    pub fn last_index(&self) -> usize {
        self.index(self.len().saturating_sub(1))
    }

    pub fn point(&self, row: usize) -> &[f64] {
        &self.points[row * self.dim..(row + 1) * self.dim]
    }

    pub fn velocity(&self, row: usize) -> &[f64] {
        &self.velocities[row * self.dim..(row + 1) * self.dim]
    }

    pub fn step(&self, row: usize) -> f64 {
        self.steps[row]
    }

    pub fn time(&self, row: usize) -> f64 {
        self.times[row]
    }

    pub fn value(&self, row: usize) -> f64 {
        self.values[row]
    }

    pub fn points_flat(&self) -> &[f64] {
        &self.points
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn aggregates(&self) -> Option<&RunAggregates> {
        self.aggregates.as_ref()
    }

    pub fn meta(&self) -> Option<&RunMeta> {
        self.meta.as_ref()
    }

    pub fn divergence(&self) -> Option<&Divergence> {
        self.divergence.as_ref()
    }

    pub fn diverged(&self) -> bool {
        self.divergence.is_some()
    }

    /// `x_{i+1}` for a stored row `i` of a dense trajectory.
    pub fn successor(&self, row: usize) -> Vec<f64> {
        self.point(row)
            .iter()
            .zip(self.velocity(row))
            .map(|(x, v)| x - self.steps[row] * v)
            .collect()
    }
}
