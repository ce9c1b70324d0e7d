//! Order dimension toolkit for finite posets.
//!
//! * [`poset`]: the closed-relation poset model, standard examples, Kimble
//!   splits and induced `S_k` detection.
//! * [`dimension`]: critical pairs, realizer checks and an exact solver.
//! * [`skfree`]: upset-based colorings and the peeling construction that
//!   turns monochromatic subsets into certified realizers for `S_k`-free
//!   posets.
//! * [`experiments`]: seeded scans and the growth study.

pub mod dimension;
pub mod error;
pub mod experiments;
pub mod format;
pub mod generate;
pub mod poset;
pub mod skfree;

pub use dimension::{CriticalPair, DimensionResult, LinearExtension, Realizer};
pub use error::{Error, Result};
pub use poset::{BipartitePoset, Embedding, Poset};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
