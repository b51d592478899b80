//! Combinatorial data model: prototypes, macro-tile templates, rules and
//! the substitution system itself.
//!
//! Nothing here is geometric. A tile is a prototype with numbered, oriented
//! facets, and a macro-tile is a set of cells glued facet to facet. Two
//! facets may only be glued when their orientations are opposite.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::report::{ValidationReport, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Plus,
    Minus,
}

impl Orientation {
    pub fn opposite(self) -> Self {
        match self {
            Orientation::Plus => Orientation::Minus,
            Orientation::Minus => Orientation::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Orientation::Plus => '+',
            Orientation::Minus => '-',
        }
    }
}

/// Facet names used for four-facet (square) prototypes.
pub const SQUARE_FACETS: [&str; 4] = ["S", "N", "W", "E"];

/// Renders facet `k` (0-based) of a prototype with `facet_count` facets.
pub fn facet_name(facet_count: usize, k: usize) -> String {
    if facet_count == 4 {
        SQUARE_FACETS[k].to_string()
    } else {
        (k + 1).to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prototype {
    pub name: String,
    pub orientations: Vec<Orientation>,
}

impl Prototype {
    pub fn new(name: impl Into<String>, orientations: Vec<Orientation>) -> Self {
        Prototype {
            name: name.into(),
            orientations,
        }
    }

    pub fn facet_count(&self) -> usize {
        self.orientations.len()
    }

    /// Square prototype with facets (S, N, W, E) oriented (-, +, -, +).
    pub fn square(name: impl Into<String>) -> Self {
        use Orientation::*;
        Prototype::new(name, vec![Minus, Plus, Minus, Plus])
    }

    pub fn is_square(&self) -> bool {
        use Orientation::*;
        self.orientations == [Minus, Plus, Minus, Plus]
    }
}

/// Facet `facet` (0-based) of template cell `cell`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub cell: usize,
    pub facet: usize,
}

impl Slot {
    pub fn new(cell: usize, facet: usize) -> Self {
        Slot { cell, facet }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub prototype: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroTileTemplate {
    pub cells: Vec<Cell>,
    /// Internal facets, in declaration order. This order is the one used by
    /// the global facet numbering.
    pub pairings: Vec<(Slot, Slot)>,
}

impl MacroTileTemplate {
    /// Every slot not taken by an internal pairing, in (cell, facet) order.
    pub fn external_facets(&self, prototypes: &[Prototype]) -> Vec<Slot> {
        let paired: BTreeSet<Slot> = self.pairings.iter().flat_map(|&(a, b)| [a, b]).collect();
        let mut out = Vec::new();
        for (c, cell) in self.cells.iter().enumerate() {
            let Some(p) = prototypes.get(cell.prototype) else {
                continue;
            };
            for k in 0..p.facet_count() {
                let s = Slot::new(c, k);
                if !paired.contains(&s) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// The pairing index holding `slot`, if any.
    pub fn pairing_of(&self, slot: Slot) -> Option<usize> {
        self.pairings
            .iter()
            .position(|&(a, b)| a == slot || b == slot)
    }

    /// The slot glued to `slot`, if it is internal.
    pub fn partner(&self, slot: Slot) -> Option<Slot> {
        self.pairings.iter().find_map(|&(a, b)| {
            if a == slot {
                Some(b)
            } else if b == slot {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Adjacency lists of the dual graph, sorted and deduplicated.
    pub fn dual_graph(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![BTreeSet::new(); self.cells.len()];
        for &(a, b) in &self.pairings {
            if a.cell < self.cells.len() && b.cell < self.cells.len() && a.cell != b.cell {
                adj[a.cell].insert(b.cell);
                adj[b.cell].insert(a.cell);
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Lowest-numbered pairing between two distinct cells.
    pub fn pairing_between(&self, x: usize, y: usize) -> Option<usize> {
        self.pairings
            .iter()
            .position(|&(a, b)| (a.cell == x && b.cell == y) || (a.cell == y && b.cell == x))
    }

    pub fn slot_name(&self, prototypes: &[Prototype], slot: Slot) -> String {
        match self.cells.get(slot.cell) {
            Some(cell) => {
                let fc = prototypes
                    .get(cell.prototype)
                    .map(Prototype::facet_count)
                    .unwrap_or(0);
                format!("{}.{}", cell.name, facet_name(fc, slot.facet))
            }
            None => format!("#{}.{}", slot.cell, slot.facet + 1),
        }
    }
}

/// Number of connected components of an undirected graph restricted to
/// `vertices`, following only edges accepted by `edge_ok`.
pub(crate) fn components(
    adj: &[Vec<usize>],
    vertices: &BTreeSet<usize>,
    edge_ok: impl Fn(usize, usize) -> bool,
) -> usize {
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for &start in vertices {
        if !seen.insert(start) {
            continue;
        }
        count += 1;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if vertices.contains(&w) && edge_ok(v, w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    /// Prototype index of the parent tile P.
    pub parent: usize,
    pub template: MacroTileTemplate,
    /// `gamma[k]` is the k-th macro-facet: the ordered external facets that
    /// the k-th facet of the parent is mapped to.
    pub gamma: Vec<Vec<Slot>>,
}

impl Rule {
    /// Macro-facet containing `slot`, if any.
    pub fn macro_facet_of(&self, slot: Slot) -> Option<usize> {
        self.gamma.iter().position(|mf| mf.contains(&slot))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MacroFacetRef {
    pub rule: usize,
    pub facet: usize,
}

/// Declares that macro-facet `from` can meet macro-facet `to`; `map` pairs
/// 0-based positions of the two macro-facet sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroAdjacency {
    pub from: MacroFacetRef,
    pub to: MacroFacetRef,
    pub map: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionSystem {
    pub name: String,
    pub prototypes: Vec<Prototype>,
    pub rules: Vec<Rule>,
    pub macro_adjacency: Vec<MacroAdjacency>,
    /// Declared, never computed.
    pub consistent: bool,
}

impl SubstitutionSystem {
    pub fn rule_index(&self, name: &str) -> Option<usize> {
        self.rules.iter().position(|r| r.name == name)
    }

    pub fn facet_count(&self, prototype: usize) -> usize {
        self.prototypes[prototype].facet_count()
    }

    pub fn cell_prototype(&self, rule: usize, cell: usize) -> &Prototype {
        &self.prototypes[self.rules[rule].template.cells[cell].prototype]
    }

    pub fn slot_name(&self, rule: usize, slot: Slot) -> String {
        self.rules[rule].template.slot_name(&self.prototypes, slot)
    }

    pub fn orientation(&self, rule: usize, slot: Slot) -> Orientation {
        self.cell_prototype(rule, slot.cell).orientations[slot.facet]
    }

    pub fn find_adjacency(
        &self,
        from: MacroFacetRef,
        to: MacroFacetRef,
    ) -> Option<&MacroAdjacency> {
        self.macro_adjacency
            .iter()
            .find(|e| e.from == from && e.to == to)
    }

    /// True when every prototype is a square with the S, N, W, E convention.
    pub fn is_square(&self) -> bool {
        !self.prototypes.is_empty() && self.prototypes.iter().all(Prototype::is_square)
    }

    pub fn entry_name(&self, e: &MacroAdjacency) -> String {
        let side = |r: MacroFacetRef| {
            let rule = self.rules.get(r.rule);
            let name = rule.map(|x| x.name.as_str()).unwrap_or("?");
            let fc = rule
                .and_then(|x| self.prototypes.get(x.parent))
                .map(Prototype::facet_count)
                .unwrap_or(0);
            format!("({},{})", name, facet_name(fc, r.facet))
        };
        format!("{}~{}", side(e.from), side(e.to))
    }
}

/// Structural validation of a substitution system. Never fails; every
/// problem found is an entry of the returned report.
pub fn validate_system(system: &SubstitutionSystem) -> ValidationReport {
    let mut report = ValidationReport::default();
    let protos = &system.prototypes;
    let mut rules_ok = vec![false; system.rules.len()];

    for (ri, rule) in system.rules.iter().enumerate() {
        let rname = rule.name.clone();
        let tpl = &rule.template;
        let mut ok = true;
        if rule.parent >= protos.len() {
            report.push(Violation::UnknownPrototype {
                rule: rname.clone(),
                what: "parent".into(),
            });
            ok = false;
        }
        for cell in &tpl.cells {
            if cell.prototype >= protos.len() {
                report.push(Violation::UnknownPrototype {
                    rule: rname.clone(),
                    what: format!("cell {}", cell.name),
                });
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        if tpl.cells.is_empty() {
            report.push(Violation::EmptyTemplate { rule: rname });
            continue;
        }
        let in_range = |s: Slot| {
            s.cell < tpl.cells.len() && s.facet < protos[tpl.cells[s.cell].prototype].facet_count()
        };

        let mut used = BTreeSet::new();
        let mut twice = BTreeSet::new();
        for &(a, b) in &tpl.pairings {
            for s in [a, b] {
                if !in_range(s) {
                    report.push(Violation::SlotOutOfRange {
                        rule: rname.clone(),
                        slot: tpl.slot_name(protos, s),
                    });
                    ok = false;
                } else if !used.insert(s) {
                    twice.insert(s);
                }
            }
            if in_range(a) && in_range(b) {
                let oa = protos[tpl.cells[a.cell].prototype].orientations[a.facet];
                let ob = protos[tpl.cells[b.cell].prototype].orientations[b.facet];
                if oa == ob {
                    report.push(Violation::OrientationMismatch {
                        rule: rname.clone(),
                        a: tpl.slot_name(protos, a),
                        b: tpl.slot_name(protos, b),
                    });
                }
            }
        }
        for s in twice {
            report.push(Violation::SlotPairedTwice {
                rule: rname.clone(),
                slot: tpl.slot_name(protos, s),
            });
            ok = false;
        }

        let all: BTreeSet<usize> = (0..tpl.cells.len()).collect();
        let comps = components(&tpl.dual_graph(), &all, |_, _| true);
        if comps > 1 {
            report.push(Violation::DisconnectedTemplate {
                rule: rname.clone(),
                components: comps,
            });
        }

        let parent_facets = protos[rule.parent].facet_count();
        if rule.gamma.len() != parent_facets {
            report.push(Violation::GammaArity {
                rule: rname.clone(),
                expected: parent_facets,
                found: rule.gamma.len(),
            });
            ok = false;
        }
        let mut owner: std::collections::BTreeMap<Slot, usize> = Default::default();
        for (k, mf) in rule.gamma.iter().enumerate() {
            if mf.is_empty() {
                report.push(Violation::GammaEmpty {
                    rule: rname.clone(),
                    facet: k + 1,
                });
                ok = false;
            }
            for &s in mf {
                if !in_range(s) {
                    report.push(Violation::SlotOutOfRange {
                        rule: rname.clone(),
                        slot: tpl.slot_name(protos, s),
                    });
                    ok = false;
                    continue;
                }
                if used.contains(&s) {
                    report.push(Violation::GammaNotExternal {
                        rule: rname.clone(),
                        facet: k + 1,
                        slot: tpl.slot_name(protos, s),
                    });
                    ok = false;
                }
                if let Some(&other) = owner.get(&s) {
                    report.push(Violation::GammaOverlap {
                        rule: rname.clone(),
                        facets: (other + 1, k + 1),
                        slot: tpl.slot_name(protos, s),
                    });
                    ok = false;
                } else {
                    owner.insert(s, k);
                }
            }
        }
        rules_ok[ri] = ok;
    }

    for e in &system.macro_adjacency {
        let name = system.entry_name(e);
        let known = |r: MacroFacetRef| {
            rules_ok.get(r.rule).copied().unwrap_or(false)
                && r.facet < system.rules[r.rule].gamma.len()
        };
        if !known(e.from) || !known(e.to) {
            report.push(Violation::MacroAdjacencyUnknown { entry: name });
            continue;
        }
        let a = &system.rules[e.from.rule].gamma[e.from.facet];
        let b = &system.rules[e.to.rule].gamma[e.to.facet];
        if let Some(reason) = map_problem(&e.map, a.len(), b.len()) {
            report.push(Violation::MacroAdjacencyMap {
                entry: name,
                reason,
            });
            continue;
        }
        for &(x, y) in &e.map {
            let oa = system.orientation(e.from.rule, a[x]);
            let ob = system.orientation(e.to.rule, b[y]);
            if oa == ob {
                report.push(Violation::MacroAdjacencyOrientation {
                    entry: name.clone(),
                    position: (x + 1, y + 1),
                });
            }
        }
        let mut inverse: Vec<(usize, usize)> = e.map.iter().map(|&(x, y)| (y, x)).collect();
        inverse.sort_unstable();
        let symmetric = system.macro_adjacency.iter().any(|o| {
            if o.from != e.to || o.to != e.from {
                return false;
            }
            let mut m = o.map.clone();
            m.sort_unstable();
            m == inverse
        });
        if !symmetric {
            report.push(Violation::MacroAdjacencyAsymmetric { entry: name });
        }
    }
    report
}

fn map_problem(map: &[(usize, usize)], len_a: usize, len_b: usize) -> Option<String> {
    if len_a != len_b {
        return Some(format!("macro-facet lengths differ ({len_a} vs {len_b})"));
    }
    if map.len() != len_a {
        return Some(format!("map has {} entries, expected {len_a}", map.len()));
    }
    let xs: BTreeSet<usize> = map.iter().map(|p| p.0).collect();
    let ys: BTreeSet<usize> = map.iter().map(|p| p.1).collect();
    if xs.len() != len_a || ys.len() != len_b {
        return Some("map is not a bijection".into());
    }
    if xs.iter().any(|&x| x >= len_a) || ys.iter().any(|&y| y >= len_b) {
        return Some("map position out of range".into());
    }
    None
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}.{}", self.cell, self.facet + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::square3x3;

    fn two_cells(pair: bool) -> SubstitutionSystem {
        let mut pairings = vec![];
        if pair {
            pairings.push((Slot::new(0, 3), Slot::new(1, 2)));
        }
        let template = MacroTileTemplate {
            cells: vec![
                Cell {
                    name: "a".into(),
                    prototype: 0,
                },
                Cell {
                    name: "b".into(),
                    prototype: 0,
                },
            ],
            pairings,
        };
        SubstitutionSystem {
            name: "pair".into(),
            prototypes: vec![Prototype::square("sq")],
            rules: vec![Rule {
                name: "r".into(),
                parent: 0,
                template,
                gamma: vec![
                    vec![Slot::new(0, 0), Slot::new(1, 0)],
                    vec![Slot::new(0, 1), Slot::new(1, 1)],
                    vec![Slot::new(0, 2)],
                    vec![Slot::new(1, 3)],
                ],
            }],
            macro_adjacency: vec![],
            consistent: true,
        }
    }

    #[test]
    fn bundled_system_is_valid() {
        let doc = square3x3();
        let report = validate_system(&doc.system);
        assert!(report.is_valid(), "{report}");
    }

    #[test]
    fn overlapping_gamma_is_reported() {
        let mut sys = two_cells(true);
        sys.rules[0].gamma[2].push(Slot::new(0, 0));
        let report = validate_system(&sys);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::GammaOverlap { .. })));
    }

    #[test]
    fn unpaired_cells_are_disconnected() {
        let mut sys = two_cells(false);
        // the freed slots are external and unused by gamma, which is fine
        sys.rules[0].gamma[3] = vec![Slot::new(1, 3)];
        let report = validate_system(&sys);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::DisconnectedTemplate { components: 2, .. })));
    }

    #[test]
    fn same_orientation_pairing_is_rejected() {
        let mut sys = two_cells(false);
        sys.rules[0]
            .template
            .pairings
            .push((Slot::new(0, 3), Slot::new(1, 3)));
        sys.rules[0].gamma[3] = vec![];
        let report = validate_system(&sys);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::OrientationMismatch { .. })));
    }

    #[test]
    fn gamma_member_must_be_external() {
        let mut sys = two_cells(true);
        sys.rules[0].gamma[3].push(Slot::new(0, 3));
        let report = validate_system(&sys);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::GammaNotExternal { .. })));
    }

    #[test]
    fn one_sided_macro_adjacency_is_asymmetric() {
        let mut doc = square3x3();
        doc.system.macro_adjacency.remove(1);
        let report = validate_system(&doc.system);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MacroAdjacencyAsymmetric { .. })));
    }

    #[test]
    fn macro_adjacency_map_must_be_bijective() {
        let mut doc = square3x3();
        doc.system.macro_adjacency[0].map[0] = (0, 1);
        let report = validate_system(&doc.system);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MacroAdjacencyMap { .. })));
    }
}
