//! Load thresholds for k-ary cuckoo hashing with windows of size ℓ.
//!
//! The crate has four parts:
//!
//! * [`bp`] computes the load threshold γ_{k,ℓ} from the fixed points of the
//!   belief-propagation message equations on the limiting tree, and ships
//!   Monte-Carlo and population-dynamics oracles to cross-check them.
//! * [`models`] generates the random hypergraphs (windows, blocks, plain),
//!   checks orientations and translates them between the cell-level graph
//!   `W` and the compressed graph `Ŵ` with helper edges.
//! * [`orient`] decides orientability with incremental augmenting paths and
//!   runs the breakdown-load experiments.
//! * [`lsa`] is a working windowed dictionary whose insertion is local
//!   search allocation over bins, helper balls and integer labels.
//!
//! ```
//! use wincuckoo::{compute_threshold, ModelParams};
//!
//! let params = ModelParams::new(2, 2).unwrap();
//! let result = compute_threshold(params, 1e-8).unwrap();
//! assert!((result.gamma - 0.964994923).abs() < 1e-7);
//! ```

pub mod bp;
mod error;
pub mod mix;
pub mod models;
pub mod orient;
pub mod lsa;
mod params;
pub mod report;

pub use bp::{
    compute_threshold, complete_solution, evaluate_f, g_value, poisson_pmf, solve_pwd,
    BPSolution, MessageLaw, ThresholdResult,
};
pub use error::{Error, Result};
pub use models::{Instance, InstanceSpec, Orientation, Scheme, WeightedHypergraph};
pub use lsa::{InsertStats, LsaTable};
pub use orient::{AllocationState, BreakdownRecord};
pub use params::ModelParams;
