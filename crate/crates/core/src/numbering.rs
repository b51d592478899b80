//! Global numbering of tiles `T_1..T_n` and internal facets `f_1..f_m`
//! across all rules, and the facet classification `N_σ`.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{validate_system, Slot, SubstitutionSystem};
use crate::network::NetworkSet;

/// 1-based index of a template cell in the global tile numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileId(pub u32);

impl TileId {
    pub fn from_index(i: usize) -> Self {
        TileId(i as u32 + 1)
    }

    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T{}", self.0)
    }
}

/// 1-based index of an internal facet in the global facet numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetId(pub u32);

/// Value of a macro-index or neighbor-index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FacetClass {
    Internal(FacetId),
    Port,
    MacroFacet,
    Boundary,
    /// Only produced by the undefined extension; never a value of `N_σ`.
    Undefined,
}

impl fmt::Display for FacetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FacetClass::Internal(i) => write!(f, "f{}", i.0),
            FacetClass::Port => f.write_str("p"),
            FacetClass::MacroFacet => f.write_str("m"),
            FacetClass::Boundary => f.write_str("b"),
            FacetClass::Undefined => f.write_str("u"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalNumbering {
    /// `tiles[i]` is `(rule, cell)` of `T_{i+1}`.
    pub tiles: Vec<(usize, usize)>,
    /// `internal_facets[i]` is `(rule, pairing)` of `f_{i+1}`.
    pub internal_facets: Vec<(usize, usize)>,
    tile_base: Vec<usize>,
    facet_base: Vec<usize>,
}

impl GlobalNumbering {
    pub fn n(&self) -> usize {
        self.tiles.len()
    }

    pub fn m(&self) -> usize {
        self.internal_facets.len()
    }

    pub fn tile(&self, rule: usize, cell: usize) -> TileId {
        TileId::from_index(self.tile_base[rule] + cell)
    }

    pub fn facet(&self, rule: usize, pairing: usize) -> FacetId {
        FacetId((self.facet_base[rule] + pairing) as u32 + 1)
    }

    pub fn locate(&self, t: TileId) -> (usize, usize) {
        self.tiles[t.index()]
    }

    pub fn check(&self, t: TileId) -> Result<()> {
        if t.0 == 0 || t.index() >= self.n() {
            return Err(Error::IndexOutOfRange {
                what: "tile",
                index: t.0 as usize,
                max: self.n(),
            });
        }
        Ok(())
    }
}

/// Numbers tiles by (rule, cell) and internal facets by (rule, pairing
/// declaration order).
pub fn build_numbering(system: &SubstitutionSystem) -> Result<GlobalNumbering> {
    let report = validate_system(system);
    if !report.is_valid() {
        return Err(Error::InvalidSystem(report));
    }
    let mut tiles = Vec::new();
    let mut internal_facets = Vec::new();
    let mut tile_base = Vec::new();
    let mut facet_base = Vec::new();
    for (ri, rule) in system.rules.iter().enumerate() {
        tile_base.push(tiles.len());
        facet_base.push(internal_facets.len());
        tiles.extend((0..rule.template.cells.len()).map(|c| (ri, c)));
        internal_facets.extend((0..rule.template.pairings.len()).map(|p| (ri, p)));
    }
    Ok(GlobalNumbering {
        tiles,
        internal_facets,
        tile_base,
        facet_base,
    })
}

/// `N_σ(j, k)` for facet `k` (0-based) of tile `j`.
pub fn n_sigma(
    system: &SubstitutionSystem,
    numbering: &GlobalNumbering,
    networks: &NetworkSet,
    j: TileId,
    k: usize,
) -> Result<FacetClass> {
    numbering.check(j)?;
    let (rule, cell) = numbering.locate(j);
    let fc = system.cell_prototype(rule, cell).facet_count();
    if k >= fc {
        return Err(Error::IndexOutOfRange {
            what: "facet",
            index: k + 1,
            max: fc,
        });
    }
    let net = networks.get(rule).ok_or_else(|| Error::MissingNetwork {
        rule: system.rules[rule].name.clone(),
    })?;
    Ok(classify(system, numbering, rule, Slot::new(cell, k), |s| {
        net.ports.contains(&s)
    }))
}

pub(crate) fn classify(
    system: &SubstitutionSystem,
    numbering: &GlobalNumbering,
    rule: usize,
    slot: Slot,
    is_port: impl Fn(Slot) -> bool,
) -> FacetClass {
    let r = &system.rules[rule];
    if let Some(p) = r.template.pairing_of(slot) {
        FacetClass::Internal(numbering.facet(rule, p))
    } else if is_port(slot) {
        FacetClass::Port
    } else if r.macro_facet_of(slot).is_some() {
        FacetClass::MacroFacet
    } else {
        FacetClass::Boundary
    }
}
