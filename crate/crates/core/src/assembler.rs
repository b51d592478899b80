//! Square-grid assembly of decorated tiles: patch enumeration, phases of
//! tiles inside their macro-tile, and decomposition of patches into
//! macro-tiles.
//!
//! Grid coordinates put `(0, 0)` at the bottom-left; `x` grows eastwards and
//! `y` northwards. Facets are ordered S, N, W, E.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::numbering::FacetClass;
use crate::simulation::{DecomposedPatch, Gluing, HierarchyPatch, MacroTileInstance, PatchGraph};
use crate::tileset::{DecoratedTile, Tileset, Triple};

pub const S: usize = 0;
pub const N: usize = 1;
pub const W: usize = 2;
pub const E: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridPatch {
    pub width: usize,
    pub height: usize,
    /// Row-major from the bottom row.
    pub cells: Vec<Option<DecoratedTile>>,
}

impl GridPatch {
    pub fn empty(width: usize, height: usize) -> Self {
        GridPatch {
            width,
            height,
            cells: vec![None; width * height],
        }
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&DecoratedTile> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.cells[y * self.width + x].as_ref()
    }

    pub fn set(&mut self, x: usize, y: usize, tile: Option<DecoratedTile>) {
        self.cells[y * self.width + x] = tile;
    }

    /// Adjacent filled pairs whose shared triples differ.
    pub fn mismatches(&self) -> Vec<((usize, usize), (usize, usize))> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let Some(t) = self.get(x, y) else { continue };
                if let Some(r) = self.get(x + 1, y) {
                    if t.triples[E] != r.triples[W] {
                        out.push(((x, y), (x + 1, y)));
                    }
                }
                if let Some(u) = self.get(x, y + 1) {
                    if t.triples[N] != u.triples[S] {
                        out.push(((x, y), (x, y + 1)));
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.mismatches().is_empty()
    }

    /// The patch as an abstract graph over its filled cells, numbered
    /// row-major; also returns each node's grid position.
    pub fn to_graph(&self) -> (PatchGraph, Vec<(usize, usize)>) {
        let mut index = HashMap::new();
        let mut tiles = Vec::new();
        let mut positions = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if let Some(t) = self.get(x, y) {
                    index.insert((x, y), tiles.len());
                    tiles.push(t.clone());
                    positions.push((x, y));
                }
            }
        }
        let mut gluings: Vec<Gluing> = Vec::new();
        for (&(x, y), &i) in &index {
            if let Some(&r) = index.get(&(x + 1, y)) {
                gluings.push((i, E, r, W));
            }
            if let Some(&u) = index.get(&(x, y + 1)) {
                gluings.push((i, N, u, S));
            }
        }
        (PatchGraph::new(tiles, gluings), positions)
    }
}

#[derive(Clone, Debug, Default)]
pub enum Boundary {
    #[default]
    Free,
    /// Cells fixed in advance, `(x, y, tile)`.
    Seeded(Vec<(usize, usize, DecoratedTile)>),
}

/// Candidate lookup by the triples a cell must show on its W and S facets.
struct Index<'a> {
    all: Vec<&'a DecoratedTile>,
    by_w: HashMap<Triple, Vec<&'a DecoratedTile>>,
    by_s: HashMap<Triple, Vec<&'a DecoratedTile>>,
    by_ws: HashMap<(Triple, Triple), Vec<&'a DecoratedTile>>,
}

impl<'a> Index<'a> {
    fn new(tau: &'a Tileset) -> Self {
        let mut idx = Index {
            all: Vec::new(),
            by_w: HashMap::new(),
            by_s: HashMap::new(),
            by_ws: HashMap::new(),
        };
        for t in tau.tiles() {
            idx.all.push(t);
            idx.by_w.entry(t.triples[W]).or_default().push(t);
            idx.by_s.entry(t.triples[S]).or_default().push(t);
            idx.by_ws
                .entry((t.triples[W], t.triples[S]))
                .or_default()
                .push(t);
        }
        idx
    }

    fn lookup(&self, w: Option<&Triple>, s: Option<&Triple>) -> &[&'a DecoratedTile] {
        let found = match (w, s) {
            (None, None) => return &self.all,
            (Some(w), None) => self.by_w.get(w),
            (None, Some(s)) => self.by_s.get(s),
            (Some(w), Some(s)) => self.by_ws.get(&(*w, *s)),
        };
        found.map(Vec::as_slice).unwrap_or(&[])
    }
}

pub(crate) fn check_square(layout: &Layout) -> Result<()> {
    if layout.system.is_square() {
        Ok(())
    } else {
        Err(Error::NonSquareSystem)
    }
}

/// Calls `visit` on every valid, completely filled `width × height` patch,
/// in scanline order (rows from the bottom, cells from the left, candidates
/// in tileset order). Stops early when `visit` returns `false`.
pub fn for_each_patch(
    layout: &Layout,
    tau: &Tileset,
    width: usize,
    height: usize,
    boundary: &Boundary,
    mut visit: impl FnMut(&GridPatch) -> bool,
) -> Result<()> {
    check_square(layout)?;
    let mut seeds: HashMap<(usize, usize), DecoratedTile> = HashMap::new();
    if let Boundary::Seeded(list) = boundary {
        for (x, y, t) in list {
            if *x >= width || *y >= height {
                return Err(Error::IndexOutOfRange {
                    what: "seed position",
                    index: x.max(y) + 1,
                    max: width.max(height),
                });
            }
            if t.triples.len() != 4 {
                return Err(Error::NonSquareSystem);
            }
            if seeds.insert((*x, *y), t.clone()).is_some() {
                return Err(Error::InconsistentGluing(format!(
                    "cell ({x}, {y}) seeded twice"
                )));
            }
        }
    }
    let index = Index::new(tau);
    let mut patch = GridPatch::empty(width, height);
    let mut search = Search {
        index: &index,
        seeds: &seeds,
        patch: &mut patch,
        visit: &mut visit,
    };
    search.run(0);
    Ok(())
}

struct Search<'a, 'b, F> {
    index: &'b Index<'a>,
    seeds: &'b HashMap<(usize, usize), DecoratedTile>,
    patch: &'b mut GridPatch,
    visit: &'b mut F,
}

impl<F: FnMut(&GridPatch) -> bool> Search<'_, '_, F> {
    /// Returns `false` once the visitor asked to stop.
    fn run(&mut self, at: usize) -> bool {
        let (w, h) = (self.patch.width, self.patch.height);
        if at == w * h {
            return (self.visit)(self.patch);
        }
        let (x, y) = (at % w, at / w);
        let west = (x > 0).then(|| self.patch.get(x - 1, y).unwrap().triples[E]);
        let south = (y > 0).then(|| self.patch.get(x, y - 1).unwrap().triples[N]);
        // later cells already fixed by seeds
        let east = self.seeds.get(&(x + 1, y)).map(|t| t.triples[W]);
        let north = self.seeds.get(&(x, y + 1)).map(|t| t.triples[S]);
        let seeded = self.seeds.get(&(x, y)).cloned();
        let fits = |t: &DecoratedTile| {
            west.is_none_or(|v| t.triples[W] == v)
                && south.is_none_or(|v| t.triples[S] == v)
                && east.is_none_or(|v| t.triples[E] == v)
                && north.is_none_or(|v| t.triples[N] == v)
        };
        match seeded {
            Some(t) => {
                if fits(&t) {
                    self.patch.set(x, y, Some(t));
                    let go_on = self.run(at + 1);
                    self.patch.set(x, y, None);
                    return go_on;
                }
                true
            }
            None => {
                let index = self.index;
                for &t in index.lookup(west.as_ref(), south.as_ref()) {
                    if !fits(t) {
                        continue;
                    }
                    self.patch.set(x, y, Some(t.clone()));
                    let go_on = self.run(at + 1);
                    self.patch.set(x, y, None);
                    if !go_on {
                        return false;
                    }
                }
                true
            }
        }
    }
}

/// All valid patches of the given size; see [`for_each_patch`].
pub fn assemble_patches(
    layout: &Layout,
    tau: &Tileset,
    width: usize,
    height: usize,
    boundary: &Boundary,
) -> Result<Vec<GridPatch>> {
    let mut out = Vec::new();
    for_each_patch(layout, tau, width, height, boundary, |p| {
        out.push(p.clone());
        true
    })?;
    Ok(out)
}

/// Position `(column, row)` of every template cell of a single rectangular
/// square rule, keyed by the cell's macro-index signature.
#[derive(Clone, Debug)]
pub struct PhaseTable {
    pub rule: usize,
    pub width: usize,
    pub height: usize,
    /// `positions[c]` is the place of template cell `c`.
    pub positions: Vec<(usize, usize)>,
    by_signature: HashMap<Vec<FacetClass>, usize>,
    signatures: Vec<Vec<FacetClass>>,
}

fn signature_text(sig: &[FacetClass]) -> String {
    let parts: Vec<String> = sig.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(","))
}

impl PhaseTable {
    /// Embeds the only rule's template in the grid by following E and N
    /// pairings from cell 0, then checks the signatures are pairwise distinct.
    pub fn new(layout: &Layout) -> Result<Self> {
        check_square(layout)?;
        let sys = &layout.system;
        if sys.rules.len() != 1 {
            return Err(Error::UnsupportedLayout(format!(
                "phases need exactly one rule, found {}",
                sys.rules.len()
            )));
        }
        let tpl = &sys.rules[0].template;
        let mut pos: Vec<Option<(i64, i64)>> = vec![None; tpl.cells.len()];
        pos[0] = Some((0, 0));
        let mut queue = VecDeque::from([0usize]);
        while let Some(c) = queue.pop_front() {
            let (x, y) = pos[c].unwrap();
            for &(a, b) in &tpl.pairings {
                for (from, to) in [(a, b), (b, a)] {
                    if from.cell != c {
                        continue;
                    }
                    let step = match (from.facet, to.facet) {
                        (E, W) => (1, 0),
                        (W, E) => (-1, 0),
                        (N, S) => (0, 1),
                        (S, N) => (0, -1),
                        _ => {
                            return Err(Error::UnsupportedLayout(format!(
                                "pairing {} -- {} is not a grid step",
                                tpl.slot_name(&sys.prototypes, from),
                                tpl.slot_name(&sys.prototypes, to)
                            )))
                        }
                    };
                    let target = (x + step.0, y + step.1);
                    match pos[to.cell] {
                        None => {
                            pos[to.cell] = Some(target);
                            queue.push_back(to.cell);
                        }
                        Some(p) if p != target => {
                            return Err(Error::UnsupportedLayout(
                                "template does not embed in the grid".into(),
                            ))
                        }
                        _ => {}
                    }
                }
            }
        }
        let pos: Vec<(i64, i64)> = pos
            .into_iter()
            .map(|p| p.ok_or_else(|| Error::UnsupportedLayout("disconnected template".into())))
            .collect::<Result<_>>()?;
        let min_x = pos.iter().map(|p| p.0).min().unwrap();
        let min_y = pos.iter().map(|p| p.1).min().unwrap();
        let positions: Vec<(usize, usize)> = pos
            .iter()
            .map(|&(x, y)| ((x - min_x) as usize, (y - min_y) as usize))
            .collect();
        let width = positions.iter().map(|p| p.0).max().unwrap() + 1;
        let height = positions.iter().map(|p| p.1).max().unwrap() + 1;
        let distinct: BTreeSet<_> = positions.iter().collect();
        if distinct.len() != positions.len() || width * height != positions.len() {
            return Err(Error::UnsupportedLayout(
                "template is not a filled rectangle".into(),
            ));
        }
        let signatures: Vec<Vec<FacetClass>> = (0..tpl.cells.len())
            .map(|c| {
                let j = layout.tile(0, c);
                layout.info(j).classes.clone()
            })
            .collect();
        let mut by_signature = HashMap::new();
        for (c, sig) in signatures.iter().enumerate() {
            if let Some(&first) = by_signature.get(sig) {
                return Err(Error::AmbiguousSignature {
                    signature: signature_text(sig),
                    first: positions[first],
                    second: positions[c],
                });
            }
            by_signature.insert(sig.clone(), c);
        }
        Ok(PhaseTable {
            rule: 0,
            width,
            height,
            positions,
            by_signature,
            signatures,
        })
    }

    /// Template cell whose macro-index signature is `sig`.
    pub fn cell_of(&self, sig: &[FacetClass]) -> Result<usize> {
        self.by_signature
            .get(sig)
            .copied()
            .ok_or_else(|| Error::UnknownSignature(signature_text(sig)))
    }

    /// Phase `(column, row)` of a tile, read from its macro-indices.
    pub fn phase_of(&self, tile: &DecoratedTile) -> Result<(usize, usize)> {
        let sig: Vec<FacetClass> = tile.triples.iter().map(|t| t.f).collect();
        self.cell_of(&sig).map(|c| self.positions[c])
    }

    /// Like [`PhaseTable::phase_of`], treating UNDEFINED facets as
    /// wildcards; `None` unless exactly one cell fits.
    pub fn phase_of_partial(&self, tile: &DecoratedTile) -> Option<(usize, usize)> {
        let mut fits = self.signatures.iter().enumerate().filter(|(_, sig)| {
            sig.len() == tile.triples.len()
                && sig
                    .iter()
                    .zip(&tile.triples)
                    .all(|(c, t)| t.is_undefined() || t.f == *c)
        });
        let (c, _) = fits.next()?;
        if fits.next().is_some() {
            return None;
        }
        Some(self.positions[c])
    }

    pub fn cell_at(&self, col: usize, row: usize) -> usize {
        self.positions
            .iter()
            .position(|&p| p == (col, row))
            .expect("position inside the template")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhaseReport {
    pub checked_pairs: usize,
    pub violations: Vec<String>,
}

impl PhaseReport {
    pub fn is_coherent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that phases advance by one column eastwards and one row
/// northwards, modulo the template size.
pub fn check_phase_coherence(table: &PhaseTable, patch: &GridPatch) -> PhaseReport {
    let mut report = PhaseReport::default();
    let phase = |x: usize, y: usize| patch.get(x, y).map(|t| table.phase_of(t));
    for y in 0..patch.height {
        for x in 0..patch.width {
            let Some(here) = phase(x, y) else { continue };
            let here = match here {
                Ok(p) => p,
                Err(e) => {
                    report.violations.push(format!("({x},{y}): {e}"));
                    continue;
                }
            };
            for (dx, dy) in [(1, 0), (0, 1)] {
                let Some(there) = phase(x + dx, y + dy) else {
                    continue;
                };
                let Ok(there) = there else { continue };
                report.checked_pairs += 1;
                let expected = ((here.0 + dx) % table.width, (here.1 + dy) % table.height);
                if there != expected {
                    report.violations.push(format!(
                        "({x},{y}) phase {here:?} next to ({},{}) phase {there:?}, expected {expected:?}",
                        x + dx,
                        y + dy
                    ));
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionReport {
    /// Grid position of the phase-(0,0) cells, modulo the template size.
    pub anchor: Option<(usize, usize)>,
    /// Bottom-left corner of every complete block and the index of a
    /// matching instance.
    pub full_blocks: Vec<((usize, usize), usize)>,
    /// Complete blocks equal to no instance.
    pub non_instance_blocks: Vec<(usize, usize)>,
    /// Filled cells outside every complete block.
    pub margin_cells: Vec<(usize, usize)>,
    /// Cells whose phase disagrees with the anchor.
    pub incoherent_cells: Vec<(usize, usize)>,
}

impl fmt::Display for DecompositionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.anchor {
            Some((x, y)) => writeln!(f, "anchor={x},{y}")?,
            None => writeln!(f, "anchor=none")?,
        }
        writeln!(f, "full_blocks={}", self.full_blocks.len())?;
        for ((x, y), i) in &self.full_blocks {
            writeln!(f, "block {x},{y} instance={i}")?;
        }
        for (x, y) in &self.non_instance_blocks {
            writeln!(f, "NonInstanceBlock {x},{y}")?;
        }
        writeln!(f, "margin_cells={}", self.margin_cells.len())?;
        writeln!(f, "incoherent_cells={}", self.incoherent_cells.len())
    }
}

fn fits_instance(block: &[&DecoratedTile], q: &MacroTileInstance, wildcard: bool) -> bool {
    block.iter().zip(&q.assignment).all(|(t, i)| {
        t.base == i.base
            && t.triples.len() == i.triples.len()
            && t.triples
                .iter()
                .zip(&i.triples)
                .all(|(a, b)| a == b || (wildcard && a.is_undefined()))
    })
}

/// Cuts a patch into template-sized blocks aligned on the phase-(0,0)
/// anchor and matches every complete block against `instances`. With
/// `wildcard`, UNDEFINED facets of the patch match anything.
pub fn decompose_macro(
    table: &PhaseTable,
    patch: &GridPatch,
    instances: &[MacroTileInstance],
    wildcard: bool,
) -> DecompositionReport {
    let (bw, bh) = (table.width, table.height);
    let mut report = DecompositionReport::default();
    let mut votes: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut phases = HashMap::new();
    for y in 0..patch.height {
        for x in 0..patch.width {
            let Some(t) = patch.get(x, y) else { continue };
            let p = if wildcard {
                table.phase_of_partial(t)
            } else {
                table.phase_of(t).ok()
            };
            if let Some((c, r)) = p {
                let anchor = ((x + bw - c % bw) % bw, (y + bh - r % bh) % bh);
                *votes.entry(anchor).or_default() += 1;
                phases.insert((x, y), anchor);
            }
        }
    }
    let Some((&anchor, _)) = votes
        .iter()
        .max_by_key(|(a, n)| (**n, std::cmp::Reverse(**a)))
    else {
        report.margin_cells = (0..patch.height)
            .flat_map(|y| (0..patch.width).map(move |x| (x, y)))
            .filter(|&(x, y)| patch.get(x, y).is_some())
            .collect();
        return report;
    };
    report.anchor = Some(anchor);
    for (&cell, &a) in &phases {
        if a != anchor {
            report.incoherent_cells.push(cell);
        }
    }
    report.incoherent_cells.sort();

    let mut covered = BTreeSet::new();
    let mut by_key: HashMap<Vec<crate::numbering::TileId>, Vec<usize>> = HashMap::new();
    for (i, q) in instances.iter().enumerate() {
        if q.rule == table.rule {
            by_key
                .entry(q.assignment.iter().map(|t| t.base).collect())
                .or_default()
                .push(i);
        }
    }
    let mut y0 = anchor.1;
    while y0 + bh <= patch.height {
        let mut x0 = anchor.0;
        while x0 + bw <= patch.width {
            let block: Option<Vec<&DecoratedTile>> = (0..table.positions.len())
                .map(|c| {
                    let (px, py) = table.positions[c];
                    patch.get(x0 + px, y0 + py)
                })
                .collect();
            if let Some(block) = block {
                for &(px, py) in &table.positions {
                    covered.insert((x0 + px, y0 + py));
                }
                let key: Vec<_> = block.iter().map(|t| t.base).collect();
                let found = by_key.get(&key).and_then(|list| {
                    list.iter()
                        .copied()
                        .find(|&i| fits_instance(&block, &instances[i], wildcard))
                });
                match found {
                    Some(i) => report.full_blocks.push(((x0, y0), i)),
                    None => report.non_instance_blocks.push((x0, y0)),
                }
            }
            x0 += bw;
        }
        y0 += bh;
    }
    for y in 0..patch.height {
        for x in 0..patch.width {
            if patch.get(x, y).is_some() && !covered.contains(&(x, y)) {
                report.margin_cells.push((x, y));
            }
        }
    }
    report
}

impl DecompositionReport {
    /// The decomposition as blocks over [`GridPatch::to_graph`] nodes;
    /// `PartialBlock` if some filled cell lies outside every block.
    pub fn to_decomposed(&self, table: &PhaseTable, patch: &GridPatch) -> Result<DecomposedPatch> {
        if let Some(&(x, y)) = self.margin_cells.first() {
            return Err(Error::PartialBlock(format!(
                "cell ({x},{y}) lies in no block"
            )));
        }
        let (graph, positions) = patch.to_graph();
        let index: HashMap<(usize, usize), usize> =
            positions.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let mut corners: Vec<(usize, usize)> = self
            .full_blocks
            .iter()
            .map(|b| b.0)
            .chain(self.non_instance_blocks.iter().copied())
            .collect();
        corners.sort_by_key(|&(x, y)| (y, x));
        let blocks = corners
            .into_iter()
            .map(|(x0, y0)| {
                let members = table
                    .positions
                    .iter()
                    .map(|&(px, py)| index[&(x0 + px, y0 + py)])
                    .collect();
                (table.rule, members)
            })
            .collect();
        Ok(DecomposedPatch { graph, blocks })
    }
}

/// Lays a hierarchy patch of the single rectangular rule out on the grid.
pub fn hierarchy_to_grid(table: &PhaseTable, patch: &HierarchyPatch) -> GridPatch {
    let (bw, bh) = (table.width, table.height);
    let side_w = bw.pow(patch.depth as u32);
    let side_h = bh.pow(patch.depth as u32);
    let mut grid = GridPatch::empty(side_w, side_h);
    for t in &patch.tiles {
        let (mut x, mut y) = (0, 0);
        for &c in &t.path {
            let (px, py) = table.positions[c];
            x = x * bw + px;
            y = y * bh + py;
        }
        grid.set(x, y, Some(t.tile.clone()));
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::square3x3;
    use crate::numbering::{FacetId, TileId};
    use crate::simulation::{enumerate_macro_tiles, hierarchy_decorate};
    use crate::tileset::generate_tileset;

    fn setup() -> (Layout, Tileset) {
        let layout = Layout::from_document(&square3x3()).unwrap();
        let tau = generate_tileset(&layout);
        (layout, tau)
    }

    #[test]
    fn phases_of_corner_and_center() {
        let (layout, _) = setup();
        let table = PhaseTable::new(&layout).unwrap();
        let fi = |i| FacetClass::Internal(FacetId(i));
        use FacetClass::MacroFacet as M;
        assert_eq!(
            table.positions[table.cell_of(&[M, fi(3), M, fi(1)]).unwrap()],
            (0, 0)
        );
        assert_eq!(
            table.positions[table.cell_of(&[fi(4), fi(9), fi(6), fi(7)]).unwrap()],
            (1, 1)
        );
        assert!(matches!(
            table.cell_of(&[M, M, M, M]),
            Err(Error::UnknownSignature(_))
        ));
    }

    #[test]
    fn one_by_one_gives_every_tile() {
        let (layout, tau) = setup();
        let n = assemble_patches(&layout, &tau, 1, 1, &Boundary::Free)
            .unwrap()
            .len();
        assert_eq!(n, tau.len());
    }

    #[test]
    fn seeded_t1_forces_t2_with_same_parent() {
        let (layout, tau) = setup();
        let t1 = tau
            .tiles()
            .find(|t| t.base == TileId(1) && t.triples[N].j == Some(TileId(4)))
            .unwrap()
            .clone();
        let patches =
            assemble_patches(&layout, &tau, 2, 1, &Boundary::Seeded(vec![(0, 0, t1)])).unwrap();
        assert!(!patches.is_empty());
        for p in &patches {
            let right = p.get(1, 0).unwrap();
            assert_eq!(right.base, TileId(2));
            assert_eq!(right.triples[W].j, Some(TileId(4)));
            assert_eq!(right.triples[W].f, FacetClass::Internal(FacetId(1)));
        }
    }

    #[test]
    fn conflicting_seeds_give_nothing() {
        let (layout, tau) = setup();
        let a = tau.get(0).clone();
        let seeds = vec![(0, 0, a.clone()), (1, 0, a)];
        let patches = assemble_patches(&layout, &tau, 2, 1, &Boundary::Seeded(seeds)).unwrap();
        assert!(patches.is_empty());
    }

    #[test]
    fn forged_patch_is_incoherent() {
        let (layout, tau) = setup();
        let table = PhaseTable::new(&layout).unwrap();
        let mut a = tau.tiles().find(|t| t.base == TileId(1)).unwrap().clone();
        let mut b = a.clone();
        a.triples[E] = Triple::UNDEFINED;
        b.triples[W] = Triple::UNDEFINED;
        let mut p = GridPatch::empty(2, 1);
        p.set(0, 0, Some(a));
        p.set(1, 0, Some(b));
        assert!(p.is_valid());
        let r = check_phase_coherence(&table, &p);
        assert!(!r.is_coherent());
        assert!(check_phase_coherence(&table, &GridPatch::empty(0, 0)).is_coherent());
    }

    #[test]
    fn depth_two_hierarchy_decomposes_into_nine_instances() {
        let (layout, tau) = setup();
        let table = PhaseTable::new(&layout).unwrap();
        let h = hierarchy_decorate(&layout, "r1", 2, None).unwrap();
        let grid = hierarchy_to_grid(&table, &h);
        assert!(grid.is_valid());
        let instances = enumerate_macro_tiles(&layout, &tau);
        let r = decompose_macro(&table, &grid, &instances, true);
        assert_eq!(r.anchor, Some((0, 0)));
        assert_eq!(r.full_blocks.len(), 9);
        assert!(r.non_instance_blocks.is_empty());
        assert!(r.margin_cells.is_empty());
        assert!(r.incoherent_cells.is_empty());
    }

    #[test]
    fn four_by_four_has_margins() {
        let (layout, tau) = setup();
        let table = PhaseTable::new(&layout).unwrap();
        let instances = enumerate_macro_tiles(&layout, &tau);
        let q = &instances[0];
        let mut grid = GridPatch::empty(4, 4);
        for (c, t) in q.assignment.iter().enumerate() {
            let (x, y) = table.positions[c];
            grid.set(x, y, Some(t.clone()));
        }
        let r = decompose_macro(&table, &grid, &instances, false);
        assert_eq!(r.full_blocks.len(), 1);
        assert!(r.margin_cells.is_empty());
        grid.set(3, 3, Some(tau.get(0).clone()));
        let r = decompose_macro(&table, &grid, &instances, false);
        assert_eq!(r.margin_cells, vec![(3, 3)]);
    }

    #[test]
    fn non_square_system_is_refused() {
        let mut doc = square3x3();
        doc.system.prototypes[0].orientations.reverse();
        doc.system.prototypes[0].orientations.swap(0, 1);
        // still a valid system, but not in the S N W E convention
        assert!(!doc.system.is_square());
    }
}
