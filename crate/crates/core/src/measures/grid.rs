use std::io::Write;

use serde::{Deserialize, Serialize};

use super::EmpiricalPhaseMeasure;
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::linalg::{norm, CompensatedSum};

/// Cells per axis used when no resolution is configured. An odd count puts
/// the centre of a symmetric box in the middle of a cell.
pub const DEFAULT_RESOLUTION: usize = 65;

const MAX_CELLS: usize = 1 << 26;

/// Uniform partition of a box into `resolution^dim` cells.
///
/// Cells are numbered with axis 0 varying fastest. Points on the upper face of
/// the box belong to the last cell along that axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    bbox: BoundingBox,
    resolution: usize,
}

impl Grid {
    pub fn new(bbox: BoundingBox, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::invalid("grid resolution must be at least 1"));
        }
        if bbox.lo.iter().zip(&bbox.hi).any(|(l, h)| !(h > l)) {
            return Err(Error::invalid("grid box must have positive width on every axis"));
        }
        let cells = u32::try_from(bbox.dim())
            .ok()
            .and_then(|d| resolution.checked_pow(d))
            .filter(|&c| c <= MAX_CELLS);
        if cells.is_none() {
            return Err(Error::invalid(format!(
                "a {resolution}^{} grid has too many cells",
                bbox.dim()
            )));
        }
        Ok(Self { bbox, resolution })
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn dim(&self) -> usize {
        self.bbox.dim()
    }

    pub fn n_cells(&self) -> usize {
        self.resolution.pow(self.dim() as u32)
    }

    pub fn cell_width(&self, axis: usize) -> f64 {
        (self.bbox.hi[axis] - self.bbox.lo[axis]) / self.resolution as f64
    }

    pub fn cell_diagonal(&self) -> f64 {
        norm(&(0..self.dim()).map(|k| self.cell_width(k)).collect::<Vec<_>>())
    }

    /// Flat index of the cell containing `x`, `None` outside the box.
    pub fn cell_of(&self, x: &[f64]) -> Option<usize> {
        if !self.bbox.contains(x) {
            return None;
        }
        let mut idx = 0;
        let mut stride = 1;
        for (k, &xk) in x.iter().enumerate() {
            let u = (xk - self.bbox.lo[k]) / (self.bbox.hi[k] - self.bbox.lo[k]);
            let c = ((u * self.resolution as f64) as usize).min(self.resolution - 1);
            idx += c * stride;
            stride *= self.resolution;
        }
        Some(idx)
    }

    pub fn multi_index(&self, cell: usize) -> Vec<usize> {
        let mut rest = cell;
        (0..self.dim())
            .map(|_| {
                let c = rest % self.resolution;
                rest /= self.resolution;
                c
            })
            .collect()
    }

    pub fn cell_center(&self, cell: usize) -> Vec<f64> {
        self.multi_index(cell)
            .into_iter()
            .enumerate()
            .map(|(k, c)| self.bbox.lo[k] + (c as f64 + 0.5) * self.cell_width(k))
            .collect()
    }

    /// Distance between the centres of two cells.
    pub fn center_distance(&self, a: usize, b: usize) -> f64 {
        crate::linalg::dist(&self.cell_center(a), &self.cell_center(b))
    }
}

#[derive(Debug, Clone, Default)]
struct Bin {
    mass: CompensatedSum,
    vsum: Vec<CompensatedSum>,
    count: u64,
}

impl Bin {
    fn add(&mut self, v: &[f64], w: f64) {
        if self.vsum.is_empty() {
            self.vsum = vec![CompensatedSum::new(); v.len()];
        }
        self.mass.add(w);
        for (s, vk) in self.vsum.iter_mut().zip(v) {
            s.add(w * vk);
        }
        self.count += 1;
    }
}

/// Time mass, velocity sum and sample count per grid cell, with an overflow
/// bin for samples outside the box.
#[derive(Debug, Clone)]
pub struct GridField {
    grid: Grid,
    bins: Vec<Bin>,
    overflow: Bin,
}

impl GridField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn mass(&self, cell: usize) -> f64 {
        self.bins[cell].mass.value()
    }

    pub fn count(&self, cell: usize) -> u64 {
        self.bins[cell].count
    }

    /// `s_c / m_c`, `None` for an empty cell.
    pub fn centroid(&self, cell: usize) -> Option<Vec<f64>> {
        centroid_of(&self.bins[cell], self.grid.dim())
    }

    pub fn overflow_mass(&self) -> f64 {
        self.overflow.mass.value()
    }

    pub fn overflow_count(&self) -> u64 {
        self.overflow.count
    }

    pub fn overflow_centroid(&self) -> Option<Vec<f64>> {
        centroid_of(&self.overflow, self.grid.dim())
    }

    /// Mass over all cells and the overflow bin.
    pub fn total_mass(&self) -> f64 {
        let mut s = CompensatedSum::new();
        for b in self.bins.iter().chain(std::iter::once(&self.overflow)) {
            s.add(b.mass.value());
        }
        s.value()
    }

    /// Indices of cells holding at least one sample.
    pub fn nonempty_cells(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.bins.len()).filter(|&c| self.bins[c].count > 0)
    }

    /// Mass-weighted mean of `||centroid||` over the cells inside the box.
    pub fn mean_centroid_norm(&self) -> Option<f64> {
        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        for c in self.nonempty_cells() {
            let m = self.mass(c);
            num.add(m * norm(&self.centroid(c).expect("nonempty cell")));
            den.add(m);
        }
        (den.value() > 0.0).then(|| num.value() / den.value())
    }

    /// One row per nonempty cell: `cell_ix0..,mass,vbar0..,count`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.grid.dim();
        let mut head: Vec<String> = (0..d).map(|k| format!("cell_ix{k}")).collect();
        head.push("mass".into());
        head.extend((0..d).map(|k| format!("vbar{k}")));
        head.push("count".into());
        writeln!(w, "{}", head.join(","))?;
        for c in self.nonempty_cells() {
            let mut row: Vec<String> =
                self.grid.multi_index(c).iter().map(|i| i.to_string()).collect();
            row.push(format!("{:.16e}", self.mass(c)));
            row.extend(self.centroid(c).expect("nonempty cell").iter().map(|v| format!("{v:.16e}")));
            row.push(self.count(c).to_string());
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn centroid_of(b: &Bin, dim: usize) -> Option<Vec<f64>> {
    if b.count == 0 {
        return None;
    }
    let m = b.mass.value();
    Some((0..dim).map(|k| b.vsum[k].value() / m).collect())
}

/// Bins `mu` on `grid`, accumulating time mass and velocity per cell.
pub fn centroid_field(mu: &EmpiricalPhaseMeasure, grid: &Grid) -> Result<GridField> {
    if mu.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), actual: mu.dim() });
    }
    let mut bins = vec![Bin::default(); grid.n_cells()];
    let mut overflow = Bin::default();
    for k in 0..mu.len() {
        let bin = match grid.cell_of(mu.position(k)) {
            Some(c) => &mut bins[c],
            None => &mut overflow,
        };
        bin.add(mu.velocity(k), mu.weight(k));
    }
    Ok(GridField { grid: grid.clone(), bins, overflow })
}
