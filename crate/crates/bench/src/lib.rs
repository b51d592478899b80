//! Shared fixtures for the benchmarks.

use sofic_core::examples::square3x3;
use sofic_core::{generate_tileset, Layout, Tileset};

pub fn square_layout() -> Layout {
    Layout::from_document(&square3x3()).expect("bundled example is valid")
}

pub fn square_fixture() -> (Layout, Tileset) {
    let layout = square_layout();
    let tau = generate_tileset(&layout);
    (layout, tau)
}
