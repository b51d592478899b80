//! Decorated tilesets whose tilings enforce the limit set of a combinatorial
//! substitution.
//!
//! The pipeline is: describe a substitution system ([`model`]), attach a
//! network to every rule ([`network`]), number tiles and facets
//! ([`numbering`], [`layout`]), close the decoration steps into a finite
//! tileset ([`tileset`]), then check that the tileset simulates its own
//! macro-tiles ([`simulation`]). [`counting`] evaluates the size bounds and
//! [`assembler`] enumerates patches on the square grid.

pub mod assembler;
pub mod counting;
pub mod error;
pub mod examples;
pub mod format;
pub mod layout;
pub mod model;
pub mod network;
pub mod numbering;
pub mod report;
pub mod simulation;
pub mod svg;
pub mod tileset;

pub use assembler::{
    assemble_patches, check_phase_coherence, decompose_macro, for_each_patch, hierarchy_to_grid,
    Boundary, DecompositionReport, GridPatch, PhaseReport, PhaseTable,
};
pub use counting::{
    count_bound_first, count_bound_second, exact_count, ComparisonReport, CountParams, FirstBound,
    SecondBound,
};
pub use error::{Error, Result};
pub use format::{parse_spec, print_spec, SpecDocument};
pub use layout::{Layout, SlotRole, TileInfo};
pub use model::{
    validate_system, Cell, MacroAdjacency, MacroFacetRef, MacroTileTemplate, Orientation,
    Prototype, Rule, Slot, SubstitutionSystem,
};
pub use network::{
    check_port_condition, search_networks, validate_network, validate_networks, Network,
    NetworkSet, SecondNetwork,
};
pub use numbering::{build_numbering, n_sigma, FacetClass, FacetId, GlobalNumbering, TileId};
pub use report::{ValidationReport, Violation};
pub use simulation::{
    enumerate_macro_tiles, hierarchy_decorate, mutate_macro_neighbors, phi, quotient_preimage,
    verify_self_simulation, HierarchyPatch, MacroTileInstance, PatchGraph, SimulationReport,
};
pub use svg::{render_patch_svg, render_tile_svg};
pub use tileset::{
    allowed_pairs, decorate_base, decorate_network_step, derive_central_step, extend_undefined,
    generate_tileset, DecoratedTile, Pair, Provenance, Tileset, Triple,
};
