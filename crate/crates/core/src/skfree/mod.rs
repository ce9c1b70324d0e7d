//! Realizers for `S_k`-free posets.
//!
//! * [`coloring`]: valid colors of `k`-subsets of `A` and monochromatic sets.
//! * [`matrix`]: binary matrices with the lone-one covering event.
//! * [`construct`]: extensions built from matrix rows for one monochromatic set.
//! * [`peel`]: the iterated construction and its certificate.

pub mod coloring;
pub mod construct;
pub mod matrix;
pub mod peel;

pub use coloring::{find_monochromatic, ub_coloring, valid_colors, UBColoring};
pub use construct::{build_reversing_extensions, ReversingFamily};
pub use matrix::{acquire_event_matrix, event_e_holds, event_probability_bound, BinaryMatrix};
pub use peel::{general_upper_bound, peel_realizer, peel_step, GeneralBound, PeelCertificate, PeelConfig, PeelStep};
