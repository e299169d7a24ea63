//! Incremental maximum allocation and the breakdown experiments.
//!
//! Ordinary edges have demand 1, so inserting one edge needs at most one
//! augmenting path. Paths run over vertices: from `v` one may push a unit to
//! `u` by moving an ordinary edge assigned to `v` to its other choice `u`,
//! or by shifting a unit of a helper edge from `v` to its other endpoint.

mod experiment;
mod state;

pub use experiment::{breakdown_load, failure_curve, BreakdownRecord, FailureCurve, CURVE_POINTS};
pub use state::{gap, is_orientable, max_allocation, AllocationState};
