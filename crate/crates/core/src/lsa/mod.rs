//! A windowed cuckoo hash table filled by local search allocation.
//!
//! Bins `0..n` sit on a circle with capacity ℓ each. Between bins `i` and
//! `i+1` there are ℓ-1 helper balls that live in either of the two. Keys are
//! ordinary balls with `k` hashed bin choices. Every bin carries a label, a
//! lower bound on how many moves it takes to reach a bin with free room;
//! insertion places and evicts balls towards small labels.
//!
//! The helper split fixes, for every bin, an interval of cells
//! `[i + s_i, i + ℓ - t_i)` where `s_i` and `t_i` count the helpers in bin `i`
//! coming from its left and right separator. These intervals partition the
//! cells, and bin `i`'s keys are stored in its interval, so a key is always
//! inside one of its windows `[h_j(key), h_j(key) + ℓ)`.

mod bench;
mod table;

pub use bench::{bench_fill, FillPoint, DEFAULT_BATCH};
pub use table::{InsertStats, LsaTable, DEFAULT_TOUCH_CAP};
