//! Macro-tiles of a decorated tileset, the map `φ` sending each of them to
//! a decorated parent tile, the self-simulation checks, and the
//! finite-depth hierarchies used for the converse inclusion.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::layout::{Layout, SlotRole};
use crate::model::facet_name;
use crate::numbering::{FacetClass, TileId};
use crate::tileset::{fixed_triple, DecoratedTile, Tileset, Triple};

/// A τ-tiling of one rule's template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroTileInstance {
    pub rule: usize,
    /// `assignment[c]` decorates template cell `c`.
    pub assignment: Vec<DecoratedTile>,
    pub parent: TileId,
    /// Template cell of the network center.
    pub center: usize,
}

impl MacroTileInstance {
    pub fn central_tile(&self) -> &DecoratedTile {
        &self.assignment[self.center]
    }
}

/// Parent-index shown by a non-central tile on its internal, non-crossed
/// facets; `None` if it has no such facet or they disagree.
pub fn parent_of(layout: &Layout, tile: &DecoratedTile) -> Option<TileId> {
    let info = layout.info(tile.base);
    let mut found = None;
    for (k, role) in info.roles.iter().enumerate() {
        if *role == SlotRole::Internal {
            let j = tile.triples.get(k)?.j?;
            match found {
                None => found = Some(j),
                Some(x) if x != j => return None,
                _ => {}
            }
        }
    }
    found
}

fn has_internal_slot(layout: &Layout, base: TileId) -> bool {
    layout.info(base).roles.contains(&SlotRole::Internal)
}

/// Cells of a template in breadth-first order from cell 0, then any cell
/// left unreached.
fn bfs_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = Vec::with_capacity(adj.len());
    for start in 0..adj.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Every τ-tiling of every rule template, for every admissible parent.
///
/// Order: by rule, then parent, then the candidates' positions in `tau`
/// taken cell by cell in breadth-first order.
pub fn enumerate_macro_tiles(layout: &Layout, tau: &Tileset) -> Vec<MacroTileInstance> {
    let mut by_base: HashMap<TileId, Vec<&DecoratedTile>> = HashMap::new();
    for t in tau.tiles() {
        by_base.entry(t.base).or_default().push(t);
    }
    let sys = &layout.system;
    let mut out = Vec::new();
    for (ri, rule) in sys.rules.iter().enumerate() {
        let Some(net) = layout.networks.get(ri) else {
            continue;
        };
        let tpl = &rule.template;
        let order = bfs_order(&tpl.dual_graph());
        // pairings towards cells placed earlier, per cell
        let mut position = vec![0; tpl.cells.len()];
        for (i, &c) in order.iter().enumerate() {
            position[c] = i;
        }
        let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); tpl.cells.len()];
        for &(a, b) in &tpl.pairings {
            let (late, early) = if position[a.cell] >= position[b.cell] {
                (a, b)
            } else {
                (b, a)
            };
            checks[late.cell].push((late.facet, early.cell, early.facet));
        }
        for &parent in layout.parents(ri) {
            let candidates: Vec<Vec<&DecoratedTile>> = (0..tpl.cells.len())
                .map(|c| {
                    let base = layout.tile(ri, c);
                    let all = by_base.get(&base).map(Vec::as_slice).unwrap_or(&[]);
                    if c == net.center || !has_internal_slot(layout, base) {
                        all.to_vec()
                    } else {
                        all.iter()
                            .copied()
                            .filter(|t| parent_of(layout, t) == Some(parent))
                            .collect()
                    }
                })
                .collect();
            let mut current: Vec<Option<&DecoratedTile>> = vec![None; tpl.cells.len()];
            let mut emit = |assignment: &[Option<&DecoratedTile>]| {
                out.push(MacroTileInstance {
                    rule: ri,
                    assignment: assignment.iter().map(|t| t.unwrap().clone()).collect(),
                    parent,
                    center: net.center,
                });
            };
            fill(&order, 0, &candidates, &checks, &mut current, &mut emit);
        }
    }
    out
}

fn fill<'a>(
    order: &[usize],
    depth: usize,
    candidates: &[Vec<&'a DecoratedTile>],
    checks: &[Vec<(usize, usize, usize)>],
    current: &mut Vec<Option<&'a DecoratedTile>>,
    emit: &mut impl FnMut(&[Option<&'a DecoratedTile>]),
) {
    if depth == order.len() {
        emit(current);
        return;
    }
    let cell = order[depth];
    for &t in &candidates[cell] {
        let ok = checks[cell]
            .iter()
            .all(|&(k, other, ko)| current[other].is_some_and(|o| o.triples[ko] == t.triples[k]));
        if ok {
            current[cell] = Some(t);
            fill(order, depth + 1, candidates, checks, current, emit);
            current[cell] = None;
        }
    }
}

/// Decorated parent tile of a macro-tile: `T_parent` with, on facet `k`,
/// the macro-index `N_σ(parent, k)` and the parent/neighbor pair of facet
/// `k` of the central tile. An UNDEFINED central facet gives an UNDEFINED
/// facet.
pub fn phi(layout: &Layout, q: &MacroTileInstance) -> DecoratedTile {
    phi_from(layout, q.parent, q.central_tile())
}

pub(crate) fn phi_from(layout: &Layout, parent: TileId, central: &DecoratedTile) -> DecoratedTile {
    let info = layout.info(parent);
    let triples = (0..info.facet_count())
        .map(|k| match central.triples.get(k) {
            Some(t) if !t.is_undefined() => Triple::new(info.classes[k], t.pair()),
            _ => Triple::UNDEFINED,
        })
        .collect();
    DecoratedTile {
        base: parent,
        triples,
        central: info.central,
    }
}

/// Negative control: every triple whose macro-index is a macro-facet gets
/// the neighbor-index `m` as well. Duplicates collapse.
pub fn mutate_macro_neighbors(tau: &Tileset) -> Tileset {
    Tileset::from_entries(tau.entries().iter().map(|(t, p)| {
        let mut t = t.clone();
        for tr in &mut t.triples {
            if tr.f == FacetClass::MacroFacet {
                tr.g = FacetClass::MacroFacet;
            }
        }
        (t, *p)
    }))
}

/// Outcome of the biconditional check for one macro-adjacency entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyCheck {
    pub entry: String,
    /// Ordered instance pairs whose macro-facets match.
    pub macro_matches: u128,
    /// Ordered instance pairs whose `φ` facets match.
    pub phi_matches: u128,
    /// Ordered instance pairs where both match.
    pub both: u128,
    /// A pair of instance indices where exactly one side matches.
    pub witness: Option<(usize, usize)>,
}

impl AdjacencyCheck {
    pub fn holds(&self) -> bool {
        self.macro_matches == self.both && self.phi_matches == self.both
    }
}

#[derive(Clone, Debug)]
pub struct SimulationReport {
    pub instances: usize,
    pub per_parent: BTreeMap<TileId, usize>,
    /// Instances whose projection or `φ` image is wrong.
    pub condition1_failures: Vec<String>,
    pub adjacency: Vec<AdjacencyCheck>,
}

impl SimulationReport {
    pub fn condition1(&self) -> bool {
        self.condition1_failures.is_empty()
    }

    pub fn condition3(&self) -> bool {
        self.adjacency.iter().all(AdjacencyCheck::holds)
    }
}

impl fmt::Display for SimulationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
        writeln!(f, "instances={}", self.instances)?;
        for (j, c) in &self.per_parent {
            writeln!(f, "parent={j} instances={c}")?;
        }
        writeln!(f, "condition1={}", verdict(self.condition1()))?;
        for msg in &self.condition1_failures {
            writeln!(f, "condition1.failure {msg}")?;
        }
        for a in &self.adjacency {
            write!(
                f,
                "condition3.entry {} macro_matches={} phi_matches={} both={} result={}",
                a.entry,
                a.macro_matches,
                a.phi_matches,
                a.both,
                verdict(a.holds())
            )?;
            if let Some((x, y)) = a.witness {
                write!(f, " witness={x},{y}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "condition3={}", verdict(self.condition3()))
    }
}

/// Macro-facet `facet` of `q`, read along the slots of `gamma[facet]`.
fn macro_facet<'a>(layout: &Layout, q: &'a MacroTileInstance, facet: usize) -> Vec<&'a Triple> {
    layout.system.rules[q.rule].gamma[facet]
        .iter()
        .map(|s| &q.assignment[s.cell].triples[s.facet])
        .collect()
}

/// Checks conditions (1) and (3) over all enumerated macro-tiles.
///
/// For condition (3), the number of instance pairs matching on the
/// macro-facets, on the `φ` facets, and on both are counted exactly through
/// grouping; the biconditional holds iff the three counts agree.
pub fn verify_self_simulation(layout: &Layout, tau: &Tileset) -> Result<SimulationReport> {
    let instances = enumerate_macro_tiles(layout, tau);
    verify_instances(layout, tau, &instances)
}

pub fn verify_instances(
    layout: &Layout,
    tau: &Tileset,
    instances: &[MacroTileInstance],
) -> Result<SimulationReport> {
    if instances.is_empty() {
        return Err(Error::NoMacroTiles);
    }
    let sys = &layout.system;
    let images: Vec<DecoratedTile> = instances.iter().map(|q| phi(layout, q)).collect();
    let mut per_parent = BTreeMap::new();
    let mut failures = Vec::new();
    for (i, (q, img)) in instances.iter().zip(&images).enumerate() {
        *per_parent.entry(q.parent).or_insert(0) += 1;
        let rule = &sys.rules[q.rule];
        let projected = q
            .assignment
            .iter()
            .enumerate()
            .all(|(c, t)| t.base == layout.tile(q.rule, c));
        if !projected {
            failures.push(format!("instance={i} does not project onto its template"));
        }
        if layout.info(img.base).prototype != rule.parent {
            failures.push(format!(
                "instance={i} image {} is not the parent prototype",
                img.base
            ));
        }
        if !tau.contains(img) {
            failures.push(format!(
                "instance={i} image {} is outside the tileset",
                img.base
            ));
        }
    }

    let mut adjacency = Vec::new();
    for e in &sys.macro_adjacency {
        let (ra, a) = (e.from.rule, e.from.facet);
        let (rb, b) = (e.to.rule, e.to.facet);
        let mut map = e.map.clone();
        map.sort_by_key(|&(_, y)| y);
        // key on the `to` side's position order
        type Key = (Vec<Triple>, Triple);
        let mut left: HashMap<Key, Vec<usize>> = HashMap::new();
        let mut right: HashMap<Key, Vec<usize>> = HashMap::new();
        for (i, q) in instances.iter().enumerate() {
            if q.rule == ra {
                let mf = macro_facet(layout, q, a);
                let sig = map.iter().map(|&(x, _)| *mf[x]).collect();
                left.entry((sig, images[i].triples[a])).or_default().push(i);
            }
            if q.rule == rb {
                let sig = macro_facet(layout, q, b).into_iter().copied().collect();
                right
                    .entry((sig, images[i].triples[b]))
                    .or_default()
                    .push(i);
            }
        }
        let mut sig_l: HashMap<&Vec<Triple>, u128> = HashMap::new();
        let mut phi_l: HashMap<&Triple, u128> = HashMap::new();
        for ((s, t), v) in &left {
            *sig_l.entry(s).or_default() += v.len() as u128;
            *phi_l.entry(t).or_default() += v.len() as u128;
        }
        let mut sig_r: HashMap<&Vec<Triple>, u128> = HashMap::new();
        let mut phi_r: HashMap<&Triple, u128> = HashMap::new();
        for ((s, t), v) in &right {
            *sig_r.entry(s).or_default() += v.len() as u128;
            *phi_r.entry(t).or_default() += v.len() as u128;
        }
        let macro_matches = sig_l
            .iter()
            .map(|(s, c)| c * sig_r.get(s).unwrap_or(&0))
            .sum();
        let phi_matches = phi_l
            .iter()
            .map(|(t, c)| c * phi_r.get(t).unwrap_or(&0))
            .sum();
        let both = left
            .iter()
            .map(|(k, v)| v.len() as u128 * right.get(k).map_or(0, |w| w.len() as u128))
            .sum();
        let mut check = AdjacencyCheck {
            entry: sys.entry_name(e),
            macro_matches,
            phi_matches,
            both,
            witness: None,
        };
        if !check.holds() {
            check.witness = find_witness(&left, &right);
        }
        adjacency.push(check);
    }

    Ok(SimulationReport {
        instances: instances.len(),
        per_parent,
        condition1_failures: failures,
        adjacency,
    })
}

type Groups = HashMap<(Vec<Triple>, Triple), Vec<usize>>;

fn find_witness(left: &Groups, right: &Groups) -> Option<(usize, usize)> {
    let mut lk: Vec<_> = left.iter().collect();
    lk.sort();
    let mut rk: Vec<_> = right.iter().collect();
    rk.sort();
    for ((ls, lt), lv) in &lk {
        for ((rs, rt), rv) in &rk {
            if (ls == rs) != (lt == rt) {
                return Some((lv[0], rv[0]));
            }
        }
    }
    None
}

/// Where the value of a hierarchy facet comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FacetProvenance {
    /// Fixed by the expansion of a level-`level` tile (1 is the lowest).
    Defined {
        level: usize,
    },
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HierarchyTile {
    /// Template cells chosen from the top tile downwards.
    pub path: Vec<usize>,
    pub tile: DecoratedTile,
    pub provenance: Vec<FacetProvenance>,
}

/// Two bottom-level facets glued together, `(tile, facet, tile, facet)`
/// with the smaller slot first.
pub type Gluing = (usize, usize, usize, usize);

#[derive(Clone, Debug)]
pub struct HierarchyPatch {
    pub depth: usize,
    pub top: TileId,
    pub tiles: Vec<HierarchyTile>,
    pub gluings: Vec<Gluing>,
    /// `network_slots[l - 1]`: bottom-level slots realizing the network slots
    /// of the level-`l` expansions.
    pub network_slots: Vec<BTreeSet<(usize, usize)>>,
    /// Bottom-level macro-tiles: `(rule, tile index per template cell)`.
    pub blocks: Vec<(usize, Vec<usize>)>,
}

impl HierarchyPatch {
    pub fn undefined_slots(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (i, t) in self.tiles.iter().enumerate() {
            for (k, tr) in t.tile.triples.iter().enumerate() {
                if tr.is_undefined() {
                    out.insert((i, k));
                }
            }
        }
        out
    }

    /// Gluings whose two triples differ.
    pub fn mismatches(&self) -> Vec<Gluing> {
        self.gluings
            .iter()
            .copied()
            .filter(|&(a, fa, b, fb)| {
                self.tiles[a].tile.triples[fa] != self.tiles[b].tile.triples[fb]
            })
            .collect()
    }

    pub fn network_union(&self) -> BTreeSet<(usize, usize)> {
        self.network_slots.iter().flatten().copied().collect()
    }

    /// Every UNDEFINED facet lies on a network slot of some level.
    pub fn undefined_confined(&self) -> bool {
        self.undefined_slots().is_subset(&self.network_union())
    }

    pub fn graph(&self) -> PatchGraph {
        PatchGraph::new(
            self.tiles.iter().map(|t| t.tile.clone()).collect(),
            self.gluings.clone(),
        )
    }

    pub fn decompose(&self) -> DecomposedPatch {
        DecomposedPatch {
            graph: self.graph(),
            blocks: self.blocks.clone(),
        }
    }
}

struct Node {
    base: TileId,
    level: usize,
    rule: Option<usize>,
    children: Vec<usize>,
    triples: Vec<Triple>,
    provenance: Vec<FacetProvenance>,
    path: Vec<usize>,
}

struct Builder<'a> {
    layout: &'a Layout,
    nodes: Vec<Node>,
    bottom: HashMap<usize, usize>,
    gluings: BTreeSet<Gluing>,
}

impl Builder<'_> {
    fn rule_for(&self, base: TileId) -> Result<usize> {
        let proto = self.layout.info(base).prototype;
        self.layout
            .system
            .rules
            .iter()
            .position(|r| r.parent == proto)
            .ok_or_else(|| {
                Error::InconsistentGluing(format!("no rule expands the prototype of {base}"))
            })
    }

    fn expand(&mut self, id: usize, rule: usize) -> Result<()> {
        let layout = self.layout;
        let (parent, level) = (self.nodes[id].base, self.nodes[id].level);
        let net = layout.networks.require(&layout.system, rule)?;
        let branch_of: HashMap<_, _> = net.slot_branches(&layout.system).into_iter().collect();
        let ncells = layout.system.rules[rule].template.cells.len();
        let mut children = Vec::with_capacity(ncells);
        for c in 0..ncells {
            let base = layout.tile(rule, c);
            let fc = layout.info(base).facet_count();
            let mut triples = Vec::with_capacity(fc);
            let mut provenance = Vec::with_capacity(fc);
            for k in 0..fc {
                let slot = crate::model::Slot::new(c, k);
                let (t, p) = match branch_of.get(&slot) {
                    Some(&b) => {
                        let carried = self.nodes[id].triples[b];
                        if carried.is_undefined() {
                            (Triple::UNDEFINED, FacetProvenance::Undefined)
                        } else {
                            (
                                Triple::new(layout.n_sigma(base, k), carried.pair()),
                                self.nodes[id].provenance[b],
                            )
                        }
                    }
                    None => (
                        fixed_triple(layout, base, k, parent).expect("non-network slot"),
                        FacetProvenance::Defined { level },
                    ),
                };
                triples.push(t);
                provenance.push(p);
            }
            let mut path = self.nodes[id].path.clone();
            path.push(c);
            children.push(self.nodes.len());
            self.nodes.push(Node {
                base,
                level: level - 1,
                rule: None,
                children: Vec::new(),
                triples,
                provenance,
                path,
            });
        }
        self.nodes[id].rule = Some(rule);
        self.nodes[id].children = children.clone();
        if level > 1 {
            for &ch in &children {
                let r = self.rule_for(self.nodes[ch].base)?;
                self.expand(ch, r)?;
            }
        }
        Ok(())
    }

    fn number_bottom(&mut self, id: usize, out: &mut Vec<usize>) {
        if self.nodes[id].level == 0 {
            self.bottom.insert(id, out.len());
            out.push(id);
        } else {
            for ch in self.nodes[id].children.clone() {
                self.number_bottom(ch, out);
            }
        }
    }

    /// Bottom-level slots realizing facet `k` of node `id`, in macro-facet
    /// order.
    fn image(&self, id: usize, k: usize) -> Vec<(usize, usize)> {
        let n = &self.nodes[id];
        match n.rule {
            None => vec![(self.bottom[&id], k)],
            Some(r) => self.layout.system.rules[r].gamma[k]
                .iter()
                .flat_map(|s| self.image(n.children[s.cell], s.facet))
                .collect(),
        }
    }

    fn glue(&mut self, a: usize, ka: usize, b: usize, kb: usize) -> Result<()> {
        let (ra, rb) = (self.nodes[a].rule, self.nodes[b].rule);
        match (ra, rb) {
            (None, None) => {
                let x = (self.bottom[&a], ka);
                let y = (self.bottom[&b], kb);
                let (x, y) = if x <= y { (x, y) } else { (y, x) };
                self.gluings.insert((x.0, x.1, y.0, y.1));
                Ok(())
            }
            (Some(ra), Some(rb)) => {
                let sys = &self.layout.system;
                let from = crate::model::MacroFacetRef {
                    rule: ra,
                    facet: ka,
                };
                let to = crate::model::MacroFacetRef {
                    rule: rb,
                    facet: kb,
                };
                let entry = sys.find_adjacency(from, to).ok_or_else(|| {
                    Error::InconsistentGluing(format!(
                        "no macro-adjacency ({},{}) ~ ({},{})",
                        sys.rules[ra].name,
                        facet_name(sys.facet_count(sys.rules[ra].parent), ka),
                        sys.rules[rb].name,
                        facet_name(sys.facet_count(sys.rules[rb].parent), kb)
                    ))
                })?;
                let ga = sys.rules[ra].gamma[ka].clone();
                let gb = sys.rules[rb].gamma[kb].clone();
                for &(x, y) in &entry.map.clone() {
                    let ca = self.nodes[a].children[ga[x].cell];
                    let cb = self.nodes[b].children[gb[y].cell];
                    self.glue(ca, ga[x].facet, cb, gb[y].facet)?;
                }
                Ok(())
            }
            _ => Err(Error::InconsistentGluing(
                "tiles of different levels".into(),
            )),
        }
    }
}

/// Builds the `depth`-fold image of one tile: the top tile (default: the
/// first tile with the seed rule's parent prototype) carries UNDEFINED on
/// all facets; every expansion gives its children the Step 1 to 3 values for
/// their parent, and network slots carry the pair of the parent's facet
/// served by their branch, UNDEFINED if that facet is.
pub fn hierarchy_decorate(
    layout: &Layout,
    seed_rule: &str,
    depth: usize,
    top: Option<TileId>,
) -> Result<HierarchyPatch> {
    let sys = &layout.system;
    let rule = sys
        .rule_index(seed_rule)
        .ok_or_else(|| Error::UnknownRule(seed_rule.to_string()))?;
    if depth == 0 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    let top = match top {
        Some(t) => {
            layout.numbering.check(t)?;
            if layout.info(t).prototype != sys.rules[rule].parent {
                return Err(Error::InconsistentGluing(format!(
                    "{t} is not a parent of rule {seed_rule}"
                )));
            }
            t
        }
        None => *layout.parents(rule).first().ok_or_else(|| {
            Error::InconsistentGluing(format!("no tile is a parent of rule {seed_rule}"))
        })?,
    };
    let fc = layout.info(top).facet_count();
    let mut b = Builder {
        layout,
        nodes: vec![Node {
            base: top,
            level: depth,
            rule: None,
            children: Vec::new(),
            triples: vec![Triple::UNDEFINED; fc],
            provenance: vec![FacetProvenance::Undefined; fc],
            path: Vec::new(),
        }],
        bottom: HashMap::new(),
        gluings: BTreeSet::new(),
    };
    b.expand(0, rule)?;
    let mut order = Vec::new();
    b.number_bottom(0, &mut order);

    let mut network_slots: Vec<BTreeSet<(usize, usize)>> = vec![BTreeSet::new(); depth];
    let mut blocks: Vec<(usize, Vec<usize>)> = Vec::new();
    for id in 0..b.nodes.len() {
        let Some(r) = b.nodes[id].rule else {
            continue;
        };
        let level = b.nodes[id].level;
        let tpl = &sys.rules[r].template;
        for &(x, y) in &tpl.pairings {
            let (cx, cy) = (b.nodes[id].children[x.cell], b.nodes[id].children[y.cell]);
            b.glue(cx, x.facet, cy, y.facet)?;
        }
        let net = layout.networks.require(sys, r)?;
        for (slot, _) in net.slot_branches(sys) {
            let child = b.nodes[id].children[slot.cell];
            network_slots[level - 1].extend(b.image(child, slot.facet));
        }
        if level == 1 {
            let members: Vec<usize> = b.nodes[id].children.iter().map(|c| b.bottom[c]).collect();
            blocks.push((r, members));
        }
    }
    blocks.sort_by(|x, y| x.1.cmp(&y.1));
    let tiles = order
        .iter()
        .map(|&id| {
            let n = &b.nodes[id];
            HierarchyTile {
                path: n.path.clone(),
                tile: DecoratedTile {
                    base: n.base,
                    triples: n.triples.clone(),
                    central: layout.info(n.base).central,
                },
                provenance: n.provenance.clone(),
            }
        })
        .collect();
    Ok(HierarchyPatch {
        depth,
        top,
        tiles,
        gluings: b.gluings.into_iter().collect(),
        network_slots,
        blocks,
    })
}

/// Abstract patch: decorated tiles and the facet pairs glued together.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchGraph {
    pub tiles: Vec<DecoratedTile>,
    /// Normalized so that `(a, fa) < (b, fb)`; sorted, without repeats.
    pub gluings: Vec<Gluing>,
}

impl PatchGraph {
    pub fn new(tiles: Vec<DecoratedTile>, gluings: Vec<Gluing>) -> Self {
        let mut g: Vec<Gluing> = gluings
            .into_iter()
            .map(|(a, fa, b, fb)| {
                if (a, fa) <= (b, fb) {
                    (a, fa, b, fb)
                } else {
                    (b, fb, a, fa)
                }
            })
            .collect();
        g.sort_unstable();
        g.dedup();
        PatchGraph { tiles, gluings: g }
    }

    /// Label-preserving isomorphism test: a bijection of tiles keeping the
    /// decorated tiles and the glued facet pairs.
    pub fn is_isomorphic(&self, other: &PatchGraph) -> bool {
        if self.tiles.len() != other.tiles.len() || self.gluings.len() != other.gluings.len() {
            return false;
        }
        let mut mine: Vec<&DecoratedTile> = self.tiles.iter().collect();
        let mut theirs: Vec<&DecoratedTile> = other.tiles.iter().collect();
        mine.sort();
        theirs.sort();
        if mine != theirs {
            return false;
        }
        let adj = |g: &PatchGraph| {
            let mut m: Vec<BTreeMap<usize, (usize, usize)>> = vec![BTreeMap::new(); g.tiles.len()];
            for &(a, fa, b, fb) in &g.gluings {
                m[a].insert(fa, (b, fb));
                m[b].insert(fb, (a, fa));
            }
            m
        };
        let (sa, oa) = (adj(self), adj(other));
        let order = bfs_order(
            &sa.iter()
                .map(|m| m.values().map(|v| v.0).collect())
                .collect::<Vec<Vec<usize>>>(),
        );
        let mut map = vec![usize::MAX; self.tiles.len()];
        let mut used = vec![false; other.tiles.len()];
        iso(self, other, &sa, &oa, &order, 0, &mut map, &mut used)
    }
}

#[allow(clippy::too_many_arguments)]
fn iso(
    a: &PatchGraph,
    b: &PatchGraph,
    sa: &[BTreeMap<usize, (usize, usize)>],
    sb: &[BTreeMap<usize, (usize, usize)>],
    order: &[usize],
    depth: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let v = order[depth];
    // a mapped neighbor pins the image of v
    let pinned = sa[v].iter().find_map(|(&f, &(w, fw))| {
        (map[w] != usize::MAX).then(|| sb[map[w]].get(&fw).filter(|x| x.1 == f).map(|x| x.0))
    });
    let candidates: Vec<usize> = match pinned {
        Some(Some(x)) => vec![x],
        Some(None) => return false,
        None => (0..b.tiles.len()).collect(),
    };
    for x in candidates {
        if used[x] || a.tiles[v] != b.tiles[x] || sa[v].len() != sb[x].len() {
            continue;
        }
        let consistent = sa[v].iter().all(|(&f, &(w, fw))| match sb[x].get(&f) {
            None => false,
            Some(&(y, fy)) => fy == fw && (map[w] == usize::MAX || map[w] == y),
        });
        if !consistent {
            continue;
        }
        map[v] = x;
        used[x] = true;
        if iso(a, b, sa, sb, order, depth + 1, map, used) {
            return true;
        }
        map[v] = usize::MAX;
        used[x] = false;
    }
    false
}

/// A patch partitioned into macro-tiles.
#[derive(Clone, Debug)]
pub struct DecomposedPatch {
    pub graph: PatchGraph,
    /// `(rule, tile index per template cell)`.
    pub blocks: Vec<(usize, Vec<usize>)>,
}

#[derive(Clone, Debug)]
pub struct Quotient {
    /// One node per block, decorated with `φ` of the block.
    pub graph: PatchGraph,
    /// Macro-facet pairs glued only partially, or glued facets where the
    /// macro-facets and the `φ` facets disagree on matching.
    pub violations: Vec<String>,
}

/// Contracts every block to one tile decorated by `φ`, linking facets `a`
/// and `b` of two blocks whenever their macro-facets are glued along the
/// macro-adjacency map.
pub fn quotient_preimage(layout: &Layout, patch: &DecomposedPatch) -> Result<Quotient> {
    let sys = &layout.system;
    let g = &patch.graph;
    let mut owner = vec![None; g.tiles.len()];
    for (bi, (rule, members)) in patch.blocks.iter().enumerate() {
        if members.len() != sys.rules[*rule].template.cells.len() {
            return Err(Error::PartialBlock(format!(
                "block {bi} has {} tiles",
                members.len()
            )));
        }
        for (c, &t) in members.iter().enumerate() {
            if g.tiles[t].base != layout.tile(*rule, c) {
                return Err(Error::PartialBlock(format!(
                    "block {bi} cell {c} holds {}",
                    g.tiles[t].base
                )));
            }
            if owner[t].replace((bi, c)).is_some() {
                return Err(Error::PartialBlock(format!("tile {t} lies in two blocks")));
            }
        }
    }
    if let Some(t) = owner.iter().position(Option::is_none) {
        return Err(Error::PartialBlock(format!("tile {t} lies in no block")));
    }
    let mut glued: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for &(a, fa, b, fb) in &g.gluings {
        glued.insert((a, fa), (b, fb));
        glued.insert((b, fb), (a, fa));
    }

    let mut nodes = Vec::new();
    for (rule, members) in &patch.blocks {
        let net = layout.networks.require(sys, *rule)?;
        let central = &g.tiles[members[net.center]];
        let parent = members
            .iter()
            .enumerate()
            .filter(|&(c, _)| c != net.center)
            .find_map(|(_, &t)| parent_of(layout, &g.tiles[t]))
            .ok_or_else(|| Error::PartialBlock("block without a parent-index".into()))?;
        nodes.push(phi_from(layout, parent, central));
    }

    let mut edges = Vec::new();
    let mut violations = Vec::new();
    for (ba, (ra, ma)) in patch.blocks.iter().enumerate() {
        for (ka, gamma_a) in sys.rules[*ra].gamma.iter().enumerate() {
            // blocks reached from this macro-facet
            let mut reached: BTreeSet<(usize, usize)> = BTreeSet::new();
            for s in gamma_a {
                if let Some(&(t, f)) = glued.get(&(ma[s.cell], s.facet)) {
                    let (bb, c) = owner[t].unwrap();
                    if bb == ba {
                        continue;
                    }
                    let rb = patch.blocks[bb].0;
                    if let Some(kb) = sys.rules[rb].macro_facet_of(crate::model::Slot::new(c, f)) {
                        reached.insert((bb, kb));
                    }
                }
            }
            for (bb, kb) in reached {
                if (bb, kb) < (ba, ka) {
                    continue;
                }
                let (rb, mb) = (&patch.blocks[bb].0, &patch.blocks[bb].1);
                let from = crate::model::MacroFacetRef {
                    rule: *ra,
                    facet: ka,
                };
                let to = crate::model::MacroFacetRef {
                    rule: *rb,
                    facet: kb,
                };
                let label = format!("blocks {ba}.{} ~ {bb}.{}", ka + 1, kb + 1);
                let Some(entry) = sys.find_adjacency(from, to) else {
                    violations.push(format!("{label}: no macro-adjacency entry"));
                    continue;
                };
                let gamma_b = &sys.rules[*rb].gamma[kb];
                let mut complete = true;
                let mut equal = true;
                for &(x, y) in &entry.map {
                    let sa = (ma[gamma_a[x].cell], gamma_a[x].facet);
                    let sb = (mb[gamma_b[y].cell], gamma_b[y].facet);
                    if glued.get(&sa) != Some(&sb) {
                        complete = false;
                    } else if g.tiles[sa.0].triples[sa.1] != g.tiles[sb.0].triples[sb.1] {
                        equal = false;
                    }
                }
                if !complete {
                    violations.push(format!("{label}: macro-facets glued partially"));
                    continue;
                }
                let phi_equal = nodes[ba].triples[ka] == nodes[bb].triples[kb];
                if equal != phi_equal {
                    violations.push(format!(
                        "{label}: macro-facets match={equal} but parent facets match={phi_equal}"
                    ));
                }
                edges.push((ba, ka, bb, kb));
            }
        }
    }
    Ok(Quotient {
        graph: PatchGraph::new(nodes, edges),
        violations,
    })
}
