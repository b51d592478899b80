//! Generation of the decorated tileset as the least fixpoint of the five
//! decoration steps, plus the undefined extension and the canonical dump.
//!
//! Every facet of a decorated tile carries a triple `(f, j, g)`: the
//! macro-index `f = N_σ(j0, k)`, a parent-index `j` (absent on external
//! non-port facets), and a neighbor-index `g`. Base tiles (off-network,
//! non-central cells) are fully determined by their parent. Network tiles
//! repeat on all slots of a branch a parent/neighbor pair that some
//! decorated parent tile shows on the matching facet. Central tiles copy the
//! pairs of any non-central tile with as many facets.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::layout::{Layout, SlotRole};
use crate::numbering::{FacetClass, TileId};

/// Parent/neighbor part of a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub j: Option<TileId>,
    pub g: FacetClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub f: FacetClass,
    pub j: Option<TileId>,
    pub g: FacetClass,
}

impl Triple {
    pub const UNDEFINED: Triple = Triple {
        f: FacetClass::Undefined,
        j: None,
        g: FacetClass::Undefined,
    };

    pub fn new(f: FacetClass, pair: Pair) -> Self {
        Triple {
            f,
            j: pair.j,
            g: pair.g,
        }
    }

    pub fn pair(&self) -> Pair {
        Pair {
            j: self.j,
            g: self.g,
        }
    }

    pub fn is_undefined(&self) -> bool {
        *self == Triple::UNDEFINED
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.f, self.j.map_or(0, |t| t.0), self.g)
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.j.map_or(0, |t| t.0), self.g)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DecoratedTile {
    pub base: TileId,
    pub triples: Vec<Triple>,
    pub central: bool,
}

impl DecoratedTile {
    pub fn has_undefined(&self) -> bool {
        self.triples.iter().any(Triple::is_undefined)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Base,
    Network,
    Central,
}

impl Provenance {
    pub fn of(layout: &Layout, base: TileId) -> Self {
        let info = layout.info(base);
        if info.central {
            Provenance::Central
        } else if info.on_network {
            Provenance::Network
        } else {
            Provenance::Base
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Base => "base",
            Provenance::Network => "network",
            Provenance::Central => "central",
        }
    }
}

/// Canonically ordered, duplicate-free set of decorated tiles.
#[derive(Clone, Debug, Default)]
pub struct Tileset {
    entries: Vec<(DecoratedTile, Provenance)>,
    index: HashMap<DecoratedTile, usize>,
}

impl Tileset {
    pub fn from_entries(entries: impl IntoIterator<Item = (DecoratedTile, Provenance)>) -> Self {
        let mut entries: Vec<_> = entries.into_iter().collect();
        entries.sort_by(|a, b| {
            (a.0.base, a.1, &a.0.triples, a.0.central).cmp(&(
                b.0.base,
                b.1,
                &b.0.triples,
                b.0.central,
            ))
        });
        entries.dedup_by(|a, b| a.0 == b.0);
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.clone(), i))
            .collect();
        Tileset { entries, index }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, tile: &DecoratedTile) -> bool {
        self.index.contains_key(tile)
    }

    pub fn position(&self, tile: &DecoratedTile) -> Option<usize> {
        self.index.get(tile).copied()
    }

    pub fn tiles(&self) -> impl Iterator<Item = &DecoratedTile> {
        self.entries.iter().map(|(t, _)| t)
    }

    pub fn entries(&self) -> &[(DecoratedTile, Provenance)] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &DecoratedTile {
        &self.entries[i].0
    }

    pub fn count(&self, provenance: Provenance) -> usize {
        self.entries
            .iter()
            .filter(|(_, p)| *p == provenance)
            .count()
    }

    /// One line per tile:
    /// `T<j0> <provenance> | k=1:(f,j,g) k=2:(f,j,g) ...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (t, p) in &self.entries {
            out.push_str(&dump_line(t, *p));
            out.push('\n');
        }
        out
    }
}

pub fn dump_line(t: &DecoratedTile, p: Provenance) -> String {
    let mut s = format!("{} {} |", t.base, p.as_str());
    for (k, tr) in t.triples.iter().enumerate() {
        let _ = write!(s, " k={}:{}", k + 1, tr);
    }
    s
}

/// Prototype of the underlying cell, i.e. the tile with its decorations
/// removed.
pub fn strip_decorations(layout: &Layout, tile: &DecoratedTile) -> usize {
    layout.info(tile.base).prototype
}

/// Step 1 to 3 value of facet `k` of `t` under `parent`; `None` on network
/// slots, which only Step 4 decorates.
pub(crate) fn fixed_triple(layout: &Layout, t: TileId, k: usize, parent: TileId) -> Option<Triple> {
    let info = layout.info(t);
    let f = info.classes[k];
    match info.roles[k] {
        SlotRole::Internal => Some(Triple {
            f,
            j: Some(parent),
            g: f,
        }),
        SlotRole::MacroMember(b) => Some(Triple {
            f,
            j: None,
            g: layout.n_sigma(parent, b),
        }),
        SlotRole::Boundary => Some(Triple { f, j: None, g: f }),
        SlotRole::Crossed(_) | SlotRole::Port(_) => None,
    }
}

/// Steps 1 to 3: every off-network, non-central cell under every admissible
/// parent.
pub fn decorate_base(layout: &Layout) -> BTreeSet<DecoratedTile> {
    let mut out = BTreeSet::new();
    for t in layout.tile_ids() {
        let info = layout.info(t);
        if info.on_network || info.central {
            continue;
        }
        for &parent in layout.parents(info.rule) {
            let triples = (0..info.facet_count())
                .map(|k| fixed_triple(layout, t, k, parent).expect("off-network slot"))
                .collect();
            out.insert(DecoratedTile {
                base: t,
                triples,
                central: false,
            });
        }
    }
    out
}

/// Pairs shown on facet `k` by decorated copies of `T_j` among `current`.
pub fn allowed_pairs<'a>(
    current: impl IntoIterator<Item = &'a DecoratedTile>,
    j: TileId,
    k: usize,
) -> BTreeSet<Pair> {
    current
        .into_iter()
        .filter(|t| t.base == j)
        .filter_map(|t| t.triples.get(k))
        .map(Triple::pair)
        .collect()
}

fn pair_index<'a>(
    current: impl IntoIterator<Item = &'a DecoratedTile>,
) -> HashMap<(TileId, usize), BTreeSet<Pair>> {
    let mut index: HashMap<(TileId, usize), BTreeSet<Pair>> = HashMap::new();
    for t in current {
        for (k, tr) in t.triples.iter().enumerate() {
            index.entry((t.base, k)).or_default().insert(tr.pair());
        }
    }
    index
}

/// Step 4: network cells whose branch slots all carry one pair allowed on
/// the matching facet of the parent.
pub fn decorate_network_step<'a>(
    current: impl IntoIterator<Item = &'a DecoratedTile>,
    layout: &Layout,
) -> BTreeSet<DecoratedTile> {
    let index = pair_index(current);
    let empty = BTreeSet::new();
    let mut out = BTreeSet::new();
    for t in layout.tile_ids() {
        let info = layout.info(t);
        if !info.carries_network() {
            continue;
        }
        let branch = info
            .roles
            .iter()
            .find_map(|r| r.branch())
            .expect("network cell has a network slot");
        for &parent in layout.parents(info.rule) {
            let fixed: Vec<Option<Triple>> = (0..info.facet_count())
                .map(|k| fixed_triple(layout, t, k, parent))
                .collect();
            for &pair in index.get(&(parent, branch)).unwrap_or(&empty) {
                let triples = fixed
                    .iter()
                    .enumerate()
                    .map(|(k, fx)| fx.unwrap_or_else(|| Triple::new(info.classes[k], pair)))
                    .collect();
                out.insert(DecoratedTile {
                    base: t,
                    triples,
                    central: false,
                });
            }
        }
    }
    out
}

/// Step 5: a central tile derived from every non-central tile with the same
/// number of facets, facet `k` taking the pair of facet `k`.
pub fn derive_central_step<'a>(
    current: impl IntoIterator<Item = &'a DecoratedTile>,
    layout: &Layout,
) -> BTreeSet<DecoratedTile> {
    let centrals: Vec<TileId> = layout.centrals().collect();
    let mut out = BTreeSet::new();
    for t in current.into_iter().filter(|t| !t.central) {
        for &c in &centrals {
            if layout.info(c).facet_count() != t.triples.len() {
                continue;
            }
            let triples = t
                .triples
                .iter()
                .enumerate()
                .map(|(k, tr)| Triple::new(layout.n_sigma(c, k), tr.pair()))
                .collect();
            out.insert(DecoratedTile {
                base: c,
                triples,
                central: true,
            });
        }
    }
    out
}

/// Sizes of the working set after each closure round; the last two are
/// equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTrace {
    pub sizes: Vec<usize>,
}

pub fn generate_tileset(layout: &Layout) -> Tileset {
    generate_tileset_traced(layout).0
}

/// Least fixpoint of Steps 1 to 5. Each round recomputes Steps 4 and 5
/// against the whole current set; the set only grows and lives in a finite
/// universe, so the loop terminates.
pub fn generate_tileset_traced(layout: &Layout) -> (Tileset, ClosureTrace) {
    let mut current = decorate_base(layout);
    let mut sizes = vec![current.len()];
    loop {
        let network = decorate_network_step(&current, layout);
        let central = derive_central_step(&current, layout);
        current.extend(network);
        current.extend(central);
        let last = *sizes.last().unwrap();
        sizes.push(current.len());
        if current.len() == last {
            break;
        }
    }
    let tileset = Tileset::from_entries(current.into_iter().map(|t| {
        let p = Provenance::of(layout, t.base);
        (t, p)
    }));
    (tileset, ClosureTrace { sizes })
}

/// Adds, for every tile and every subset of its facets, the copy whose
/// facets in the subset carry [`Triple::UNDEFINED`].
pub fn extend_undefined(tau: &Tileset) -> Tileset {
    let mut out = Vec::new();
    for (t, p) in tau.entries() {
        let fc = t.triples.len();
        for mask in 0u64..(1u64 << fc) {
            let triples = t
                .triples
                .iter()
                .enumerate()
                .map(|(k, tr)| {
                    if mask >> k & 1 == 1 {
                        Triple::UNDEFINED
                    } else {
                        *tr
                    }
                })
                .collect();
            out.push((
                DecoratedTile {
                    base: t.base,
                    triples,
                    central: t.central,
                },
                *p,
            ));
        }
    }
    Tileset::from_entries(out)
}

/// Renders the tileset as it stands after decoration step `stage` (1..=5):
/// values a step has not fixed yet print as `?`. Lines are deduplicated and
/// sorted by tile, then text.
pub fn stage_view(tau: &Tileset, layout: &Layout, stage: u8) -> String {
    let mut lines: BTreeSet<(TileId, String)> = BTreeSet::new();
    for t in tau.tiles() {
        let info = layout.info(t.base);
        if stage == 5 && !t.central {
            continue;
        }
        let mut s = format!("{} |", t.base);
        for (k, tr) in t.triples.iter().enumerate() {
            let network = t.central || info.roles[k].branch().is_some();
            let shown_j = match stage {
                1 => false,
                2 | 3 => !network,
                4 => !t.central,
                _ => true,
            };
            let shown_g = match stage {
                1 | 2 => false,
                3 => !network,
                4 => !t.central,
                _ => true,
            };
            let j = tr.j.map_or("0".to_string(), |x| x.0.to_string());
            let _ = match (stage, shown_j, shown_g) {
                (1, _, _) => write!(s, " k={}:{}", k + 1, tr.f),
                (2, true, _) => write!(s, " k={}:({},{})", k + 1, tr.f, j),
                (2, false, _) => write!(s, " k={}:({},?)", k + 1, tr.f),
                (_, true, true) => write!(s, " k={}:({},{},{})", k + 1, tr.f, j, tr.g),
                _ => write!(s, " k={}:({},?,?)", k + 1, tr.f),
            };
        }
        lines.insert((t.base, s));
    }
    let mut out = String::new();
    for (_, l) in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}
