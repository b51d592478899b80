//! Bundled substitution systems.

use crate::format::{parse_spec, SpecDocument};

/// Source of the 3×3 square substitution with its chosen network.
pub const SQUARE_3X3: &str = include_str!("../../../data/square3x3.sub");

/// Parsed [`SQUARE_3X3`].
pub fn square3x3() -> SpecDocument {
    parse_spec(SQUARE_3X3).expect("bundled spec parses")
}
