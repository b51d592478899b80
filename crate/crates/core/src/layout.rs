//! Per-tile facet classification: macro-index `N_σ(j, k)` and the role each
//! facet plays with respect to the rule's network.

use crate::error::{Error, Result};
use crate::model::{Slot, SubstitutionSystem};
use crate::network::{validate_networks, NetworkSet};
use crate::numbering::{classify, FacetClass, GlobalNumbering, TileId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotRole {
    /// Internal facet not crossed by the network.
    Internal,
    /// Internal facet crossed by branch `k`.
    Crossed(usize),
    /// Port of branch `k`.
    Port(usize),
    /// Non-port member of macro-facet `k`.
    MacroMember(usize),
    /// External facet outside every macro-facet.
    Boundary,
}

impl SlotRole {
    /// Branch served by a network slot.
    pub fn branch(self) -> Option<usize> {
        match self {
            SlotRole::Crossed(k) | SlotRole::Port(k) => Some(k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TileInfo {
    pub rule: usize,
    pub cell: usize,
    pub prototype: usize,
    pub central: bool,
    pub on_network: bool,
    pub classes: Vec<FacetClass>,
    pub roles: Vec<SlotRole>,
}

impl TileInfo {
    pub fn facet_count(&self) -> usize {
        self.classes.len()
    }

    /// Non-central tile holding at least one network slot.
    pub fn carries_network(&self) -> bool {
        self.on_network && !self.central
    }
}

/// A validated system together with its numbering and networks.
#[derive(Clone, Debug)]
pub struct Layout {
    pub system: SubstitutionSystem,
    pub numbering: GlobalNumbering,
    pub networks: NetworkSet,
    tiles: Vec<TileInfo>,
    parents: Vec<Vec<TileId>>,
}

impl Layout {
    /// Fails with `InvalidNetwork` unless every rule has a valid network
    /// and the port condition holds.
    pub fn new(
        system: &SubstitutionSystem,
        numbering: &GlobalNumbering,
        networks: &NetworkSet,
    ) -> Result<Self> {
        let report = validate_networks(system, networks);
        if !report.is_valid() {
            return Err(Error::InvalidNetwork(report));
        }
        let mut tiles = Vec::with_capacity(numbering.n());
        for &(rule, cell) in &numbering.tiles {
            let net = networks.require(system, rule)?;
            let slot_branch = net.slot_branches(system);
            let proto = system.rules[rule].template.cells[cell].prototype;
            let fc = system.prototypes[proto].facet_count();
            let mut classes = Vec::with_capacity(fc);
            let mut roles = Vec::with_capacity(fc);
            for k in 0..fc {
                let slot = Slot::new(cell, k);
                let class = classify(system, numbering, rule, slot, |s| net.ports.contains(&s));
                let branch = slot_branch
                    .iter()
                    .find(|(s, _)| *s == slot)
                    .map(|&(_, b)| b);
                let role = match (class, branch) {
                    (FacetClass::Internal(_), Some(b)) => SlotRole::Crossed(b),
                    (FacetClass::Internal(_), None) => SlotRole::Internal,
                    (FacetClass::Port, Some(b)) => SlotRole::Port(b),
                    (FacetClass::MacroFacet, _) => SlotRole::MacroMember(
                        system.rules[rule]
                            .macro_facet_of(slot)
                            .expect("macro-facet member"),
                    ),
                    _ => SlotRole::Boundary,
                };
                classes.push(class);
                roles.push(role);
            }
            tiles.push(TileInfo {
                rule,
                cell,
                prototype: proto,
                central: net.center == cell,
                on_network: net.cells().contains(&cell),
                classes,
                roles,
            });
        }
        let parents = system
            .rules
            .iter()
            .map(|r| {
                tiles
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.prototype == r.parent)
                    .map(|(i, _)| TileId::from_index(i))
                    .collect()
            })
            .collect();
        Ok(Layout {
            system: system.clone(),
            numbering: numbering.clone(),
            networks: networks.clone(),
            tiles,
            parents,
        })
    }

    pub fn from_document(doc: &crate::format::SpecDocument) -> Result<Self> {
        let numbering = crate::numbering::build_numbering(&doc.system)?;
        Layout::new(&doc.system, &numbering, &doc.networks)
    }

    pub fn n(&self) -> usize {
        self.tiles.len()
    }

    pub fn info(&self, j: TileId) -> &TileInfo {
        &self.tiles[j.index()]
    }

    pub fn tile_ids(&self) -> impl Iterator<Item = TileId> {
        (0..self.tiles.len()).map(TileId::from_index)
    }

    pub fn n_sigma(&self, j: TileId, k: usize) -> FacetClass {
        self.tiles[j.index()].classes[k]
    }

    /// Tiles that may act as parent of a macro-tile of `rule`.
    pub fn parents(&self, rule: usize) -> &[TileId] {
        &self.parents[rule]
    }

    pub fn centrals(&self) -> impl Iterator<Item = TileId> + '_ {
        self.tile_ids().filter(|&t| self.info(t).central)
    }

    pub fn tile(&self, rule: usize, cell: usize) -> TileId {
        self.numbering.tile(rule, cell)
    }

    /// Tiles lying on some network, centers included.
    pub fn network_tile_count(&self) -> usize {
        self.tiles.iter().filter(|t| t.on_network).count()
    }
}
