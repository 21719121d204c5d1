//! Asymptotic statistics of subgradient sequences: occupation of cells and
//! regions, localised oscillation compensation, interval decompositions,
//! separation times, perpendicularity and convergence of values.

mod checkpoints;
mod compensation;
mod essacc;
mod intervals;
mod perpendicular;
mod regions;
mod separation;
mod values;

pub use checkpoints::Checkpoints;
pub use compensation::{compensation_ratio, global_ratio, CompensationPoint, Cutoff};
pub use essacc::{essacc_estimate, CellOccupation, EssAccReport, DEFAULT_CRIT_TOL, DEFAULT_TAU};
pub use intervals::{interval_decomposition, Interval, IntervalDecomposition};
pub use perpendicular::{perpendicularity, typical_velocity_norm, PerpendicularityReport};
pub use regions::{polyhedral_regions, region_occupation, OccupationPoint, Region};
pub use separation::{separation_time, separation_times};
pub use values::{value_convergence, ValueTail};
