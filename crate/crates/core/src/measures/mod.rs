//! Empirical phase measures of the interpolating curve and the closed-measure
//! statistics computed on them.

mod circulation;
mod defect;
mod grid;
mod phase;

pub use circulation::{circulation, Circulation, SegmentQuadrature};
pub use defect::{closedness_defect, closedness_defect_on, monomial_exponents, DefectReport, TestFunctionValue};
pub use grid::{centroid_field, Grid, GridField, DEFAULT_RESOLUTION};
pub use phase::{phase_measure, phase_measure_range, EmpiricalPhaseMeasure};
