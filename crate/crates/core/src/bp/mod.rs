//! Belief-propagation threshold solver.
//!
//! On the limiting tree of the incidence graph `G_n` four message variables
//! travel between node classes: `I_dw` (helper → vertex), `I_ow` (ordinary
//! edge → vertex), `I_wd` (vertex → helper) and `I_wo` (vertex → ordinary
//! edge). Every non-trivial solution of their distributional fixed-point
//! system is indexed by one parameter λ > 0, the rate of the Poisson count of
//! ordinary edges that send 1 to a vertex. From λ we get the induced load
//! `c_λ`, and the threshold is the least `c_λ` for which the allocation
//! functional `F` drops below the trivial value `ℓ − 1 + c_λ`.

mod law;
pub mod montecarlo;
mod poisson;
pub mod population;
mod solver;
mod threshold;
pub mod tree;

pub use law::MessageLaw;
pub use poisson::{poisson_pmf, poisson_tail, PoissonTable};
pub use solver::{
    complete_solution, evaluate_f, fixed_point_residual, g_value, solve_pwd, BPSolution,
};
pub use threshold::{compute_threshold, f_and_g, lambdas_for_load, ThresholdResult};

/// Tail-mass cutoff for every truncated Poisson sum.
pub const POISSON_TAIL: f64 = 1e-12;
