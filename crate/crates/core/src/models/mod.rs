//! Random hypergraph models and orientations.
//!
//! All three schemes draw the same kind of randomness: `m` edges of `k`
//! independent uniform choices. For windows a choice `j` stands for the
//! cyclic interval `[j, j + ℓ)` of cells; for blocks it is the aligned block
//! `[jℓ, (j+1)ℓ)`; for the plain scheme it is a single cell. One seeded
//! [`EdgeStream`] produces the choices, so `W`, `Ŵ` and the breakdown
//! experiments built from the same seed see the same edges.

mod brute;
mod hypergraph;
mod instance;
mod translate;

pub use brute::{brute_force_max_allocation, brute_force_orientable, brute_force_orientation, BRUTE_MAX_DEMAND, BRUTE_MAX_VERTICES};
pub use hypergraph::{Edge, EdgeKind, Orientation, WeightedHypergraph};
pub use instance::{gen_blocks, gen_windows, EdgeStream, Instance, InstanceSpec, Scheme};
pub use translate::{translate_down, translate_up, window_partition, WindowsPair};
