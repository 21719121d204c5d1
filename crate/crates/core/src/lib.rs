//! Vanishing-stepsize subgradient dynamics on nonsmooth path-differentiable
//! functions, together with the asymptotic diagnostics used to study their
//! oscillations: occupation times, oscillation compensation, essential
//! accumulation, criticality, separation times, perpendicularity and
//! closed-measure statistics on empirical phase measures.
//!
//! The crate is organised bottom-up:
//!
//! - [`funcs`]: function oracles with exact Clarke subdifferentials and
//!   subgradient selection policies.
//! - [`dynamics`]: the subgradient recursion and the recorded [`Trajectory`].
//! - [`measures`]: empirical phase measures, centroid fields, closedness
//!   defects and circulation of the subdifferential.
//! - [`diagnostics`]: theorem-level statistics computed on trajectories.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
mod error;
pub mod funcs;
mod geometry;
pub mod linalg;
pub mod measures;

/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use diagnostics::Checkpoints;
pub use dynamics::{run, Divergence, RunAggregates, RunOptions, StepSchedule, Trajectory};
pub use error::{Error, Result};
pub use funcs::{
    builtin, eval, subdifferential, AffinePiece, Builtin, CompositeFunction, FunctionOracle,
    PolyhedralFunction, SelectionKind, SelectionPolicy, Selector, Stratum, SubdiffDescription,
    DEFAULT_TOL_ACTIVE,
};
pub use geometry::{Ball, BoundingBox};
pub use measures::{EmpiricalPhaseMeasure, Grid, GridField};
