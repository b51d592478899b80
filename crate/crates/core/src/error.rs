use thiserror::Error;

use crate::report::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid substitution system:\n{0}")]
    InvalidSystem(ValidationReport),

    #[error("invalid network:\n{0}")]
    InvalidNetwork(ValidationReport),

    #[error("rule `{rule}` has no network")]
    MissingNetwork { rule: String },

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("{what} {index} out of range (1..={max})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("the tileset admits no macro-tile")]
    NoMacroTiles,

    #[error("inconsistent gluing: {0}")]
    InconsistentGluing(String),

    #[error("patch is not fully partitioned into blocks: {0}")]
    PartialBlock(String),

    #[error("invalid counting parameters: {0}")]
    InvalidParams(String),

    #[error("tileset has {size} tiles, above the bound {bound}")]
    BoundViolated { size: usize, bound: u128 },

    #[error("operation requires a square-grid system (4 facets S,N,W,E oriented - + - +)")]
    NonSquareSystem,

    #[error("unsupported square layout: {0}")]
    UnsupportedLayout(String),

    #[error("positions {first:?} and {second:?} share the macro-index signature {signature}")]
    AmbiguousSignature {
        signature: String,
        first: (usize, usize),
        second: (usize, usize),
    },

    #[error("macro-index signature {0} matches no template position")]
    UnknownSignature(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unresolved reference `{name}`")]
    UnresolvedReference { line: usize, name: String },
}
