use thiserror::Error;

use crate::dimension::DimensionResult;
use crate::poset::Embedding;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("relation contains a cycle through element {element}")]
    Cycle { element: usize },

    #[error("element index {index} out of range for a poset on {n} elements")]
    Index { index: usize, n: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("all {tries} generated posets contained S_{k}")]
    GenerationExhausted { tries: usize, k: usize },

    #[error("extension {extension} is not a linear extension: {lower} < {upper} is violated")]
    NotAnExtension {
        extension: usize,
        lower: usize,
        upper: usize,
    },

    #[error("pair ({x}, {y}) is comparable")]
    ComparablePair { x: usize, y: usize },

    #[error("search budget of {budget} nodes exhausted; best known realizer has size {}", best.dimension)]
    BudgetExceeded {
        budget: u64,
        best: Box<DimensionResult>,
    },

    #[error("poset has {n} elements; this operation accepts at most {max}")]
    TooLarge { n: usize, max: usize },

    #[error("subset has no valid color: every position has a mate")]
    NoValidColor { embedding: Embedding },

    #[error("no matrix with event E found in {tries} samples (union bound {bound:.4})")]
    AcquisitionFailed { tries: usize, bound: f64 },

    #[error("critical pair ({a}, {b}) left unreversed (|M1| = {m1}, |M2| = {m2})")]
    VerificationFailed {
        a: usize,
        b: usize,
        m1: usize,
        m2: usize,
    },

    #[error("no monochromatic set of size {q}")]
    NoMonochromaticSet { q: usize },

    #[error("peel step used {used} extensions, above the guaranteed {limit}")]
    BoundExceeded { used: usize, limit: usize },

    #[error("poset contains S_{}", embedding.a_elems.len())]
    ContainsSk { embedding: Embedding },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}

impl Error {
    /// Stable error name, used in machine-readable error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Cycle { .. } => "CycleError",
            Error::Index { .. } => "IndexError",
            Error::Argument(_) => "ArgumentError",
            Error::GenerationExhausted { .. } => "GenerationExhausted",
            Error::NotAnExtension { .. } => "NotAnExtension",
            Error::ComparablePair { .. } => "ComparablePairError",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::TooLarge { .. } => "TooLarge",
            Error::NoValidColor { .. } => "NoValidColor",
            Error::AcquisitionFailed { .. } => "AcquisitionFailed",
            Error::VerificationFailed { .. } => "VerificationFailed",
            Error::NoMonochromaticSet { .. } => "NoMonochromaticSet",
            Error::BoundExceeded { .. } => "BoundExceeded",
            Error::ContainsSk { .. } => "ContainsSk",
            Error::Format { .. } => "FormatError",
        }
    }

    /// Module the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Cycle { .. }
            | Error::Index { .. }
            | Error::GenerationExhausted { .. }
            | Error::Format { .. } => "core",
            Error::Argument(_) => "core",
            Error::NotAnExtension { .. }
            | Error::ComparablePair { .. }
            | Error::BudgetExceeded { .. }
            | Error::TooLarge { .. } => "dimension",
            Error::NoValidColor { .. }
            | Error::AcquisitionFailed { .. }
            | Error::VerificationFailed { .. }
            | Error::NoMonochromaticSet { .. }
            | Error::BoundExceeded { .. }
            | Error::ContainsSk { .. } => "skfree",
        }
    }
}
