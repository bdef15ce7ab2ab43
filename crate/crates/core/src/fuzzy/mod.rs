//! Triangular fuzzy numbers, linguistic scales and fuzzified frames.

mod frame;
mod scale;
mod tfn;

pub(crate) use frame::edge_crossing;
pub use frame::{Frame, FrameClass};
pub use scale::LinguisticScale;
pub use tfn::Tfn;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("TFN components must be finite")]
    NonFinite,
    #[error("TFN components out of order: ({a}, {b}, {c})")]
    Unordered { a: f64, b: f64, c: f64 },
    #[error("TFN product is only defined for nonnegative operands")]
    NegativeProduct,
    #[error("scalar {0} must be nonnegative")]
    NegativeScalar(f64),
    #[error("frame span [{lo}, {hi}] is empty")]
    EmptySpan { lo: f64, hi: f64 },
    #[error("a frame needs at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("class index {index} out of range for {count} classes")]
    ClassIndex { index: usize, count: usize },
    #[error("invalid scale: {0}")]
    InvalidScale(String),
}
