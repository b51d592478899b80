//! Networks: star-shaped subgraphs of a macro-tile's dual graph that carry
//! decorations from the macro-facets to a central tile.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::model::{components, MacroFacetRef, Slot, SubstitutionSystem};
use crate::report::{ValidationReport, Violation};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Network {
    pub rule: usize,
    pub center: usize,
    /// `branches[k]` lists the cells of the k-th branch after the center,
    /// ending with the leaf.
    pub branches: Vec<Vec<usize>>,
    /// `ports[k]` is the leaf facet lying in the k-th macro-facet.
    pub ports: Vec<Slot>,
}

impl Network {
    /// Cells of branch `k`, center first.
    pub fn path(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.center).chain(self.branches[k].iter().copied())
    }

    pub fn cells(&self) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.branches.iter().flatten().copied().collect();
        s.insert(self.center);
        s
    }

    /// Pairing indices traversed by each branch. When two consecutive cells
    /// share several pairings the lowest-numbered one is the crossed facet.
    pub fn crossed_pairings(&self, system: &SubstitutionSystem) -> Vec<Vec<usize>> {
        let tpl = &system.rules[self.rule].template;
        (0..self.branches.len())
            .map(|k| {
                let cells: Vec<usize> = self.path(k).collect();
                cells
                    .windows(2)
                    .filter_map(|w| tpl.pairing_between(w[0], w[1]))
                    .collect()
            })
            .collect()
    }

    /// Branch served by each network slot of this rule: ports and both sides
    /// of every crossed pairing.
    pub fn slot_branches(&self, system: &SubstitutionSystem) -> Vec<(Slot, usize)> {
        let tpl = &system.rules[self.rule].template;
        let mut out = Vec::new();
        for (k, crossed) in self.crossed_pairings(system).iter().enumerate() {
            out.push((self.ports[k], k));
            for &p in crossed {
                let (a, b) = tpl.pairings[p];
                out.push((a, k));
                out.push((b, k));
            }
        }
        out.sort();
        out
    }

    pub fn describe(&self, system: &SubstitutionSystem) -> String {
        let rule = &system.rules[self.rule];
        let cells = &rule.template.cells;
        let fc = system.prototypes[rule.parent].facet_count();
        let mut s = format!("rule={} center={}", rule.name, cells[self.center].name);
        for (k, b) in self.branches.iter().enumerate() {
            let path: Vec<&str> = b.iter().map(|&c| cells[c].name.as_str()).collect();
            s.push_str(&format!(
                " branch {}:{} port={}",
                crate::model::facet_name(fc, k),
                path.join(","),
                system.slot_name(self.rule, self.ports[k])
            ));
        }
        s
    }
}

/// Auxiliary network used only by the reduced counting bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecondNetwork {
    pub rule: usize,
    pub cells: Vec<usize>,
    pub crossings: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NetworkSet {
    pub first: Vec<Option<Network>>,
    pub second: Vec<Option<SecondNetwork>>,
}

impl NetworkSet {
    pub fn get(&self, rule: usize) -> Option<&Network> {
        self.first.get(rule).and_then(Option::as_ref)
    }

    pub fn second(&self, rule: usize) -> Option<&SecondNetwork> {
        self.second.get(rule).and_then(Option::as_ref)
    }

    pub fn require(&self, system: &SubstitutionSystem, rule: usize) -> Result<&Network> {
        self.get(rule).ok_or_else(|| Error::MissingNetwork {
            rule: system.rules[rule].name.clone(),
        })
    }
}

/// Checks the connecting conditions of one rule's network.
///
/// The residual graph (all cells but the center, all pairings but the
/// crossed ones) must be connected as a whole. Whether the weaker reading
/// (only the cells owning non-port macro-facet members need to be linked)
/// holds is added to the report notes.
pub fn validate_network(system: &SubstitutionSystem, net: &Network) -> ValidationReport {
    let mut report = ValidationReport::default();
    let Some(rule) = system.rules.get(net.rule) else {
        report.push(Violation::MissingNetwork {
            rule: format!("#{}", net.rule),
        });
        return report;
    };
    let rname = rule.name.clone();
    let tpl = &rule.template;
    let ncells = tpl.cells.len();
    let cell_name = |c: usize| {
        tpl.cells
            .get(c)
            .map(|x| x.name.clone())
            .unwrap_or_else(|| format!("#{c}"))
    };

    if net.branches.len() != rule.gamma.len() || net.ports.len() != net.branches.len() {
        report.push(Violation::BranchCount {
            rule: rname,
            expected: rule.gamma.len(),
            found: net.branches.len().min(net.ports.len()),
        });
        return report;
    }
    let in_range = net.center < ncells && net.branches.iter().flatten().all(|&c| c < ncells);
    if !in_range {
        report.push(Violation::BranchBroken {
            rule: rname,
            branch: 0,
            from: "?".into(),
            to: "cell out of range".into(),
        });
        return report;
    }

    let external: BTreeSet<Slot> = tpl
        .external_facets(&system.prototypes)
        .into_iter()
        .collect();
    if external.iter().any(|s| s.cell == net.center) {
        report.push(Violation::CenterNotInterior {
            rule: rname.clone(),
            center: cell_name(net.center),
        });
    }

    let adj = tpl.dual_graph();
    let mut seen = BTreeSet::from([net.center]);
    for (k, branch) in net.branches.iter().enumerate() {
        if branch.is_empty() {
            report.push(Violation::BranchEmpty {
                rule: rname.clone(),
                branch: k + 1,
            });
            continue;
        }
        let cells: Vec<usize> = net.path(k).collect();
        for w in cells.windows(2) {
            if !adj[w[0]].contains(&w[1]) {
                report.push(Violation::BranchBroken {
                    rule: rname.clone(),
                    branch: k + 1,
                    from: cell_name(w[0]),
                    to: cell_name(w[1]),
                });
            }
        }
        for &c in branch {
            if !seen.insert(c) {
                report.push(Violation::BranchesOverlap {
                    rule: rname.clone(),
                    cell: cell_name(c),
                });
            }
        }
        let port = net.ports[k];
        let pname = tpl.slot_name(&system.prototypes, port);
        if branch.last() != Some(&port.cell) {
            report.push(Violation::PortNotOwnedByLeaf {
                rule: rname.clone(),
                branch: k + 1,
                port: pname.clone(),
            });
        }
        if !rule.gamma[k].contains(&port) {
            report.push(Violation::PortNotInMacroFacet {
                rule: rname.clone(),
                branch: k + 1,
                port: pname,
            });
        }
    }

    let ports: BTreeSet<Slot> = net.ports.iter().copied().collect();
    for (k, mf) in rule.gamma.iter().enumerate() {
        if mf.iter().all(|s| ports.contains(s)) {
            report.push(Violation::MacroFacetAllPorts {
                rule: rname.clone(),
                facet: k + 1,
            });
        }
    }

    // Cells may share several pairings; an edge survives if any of them is
    // not crossed.
    let crossed: BTreeSet<usize> = net.crossed_pairings(system).into_iter().flatten().collect();
    let surviving: BTreeSet<(usize, usize)> = tpl
        .pairings
        .iter()
        .enumerate()
        .filter(|(p, _)| !crossed.contains(p))
        .map(|(_, &(a, b))| (a.cell.min(b.cell), a.cell.max(b.cell)))
        .collect();
    let edge_ok = |x: usize, y: usize| surviving.contains(&(x.min(y), x.max(y)));
    let residual: BTreeSet<usize> = (0..ncells).filter(|&c| c != net.center).collect();
    let comps = components(&adj, &residual, edge_ok);
    if comps > 1 {
        report.push(Violation::ResidualDisconnected {
            rule: rname.clone(),
            components: comps,
        });
    }
    let owners: BTreeSet<usize> = rule
        .gamma
        .iter()
        .flatten()
        .filter(|s| !ports.contains(s) && s.cell != net.center)
        .map(|s| s.cell)
        .collect();
    let weak_ok = match owners.iter().next() {
        None => true,
        Some(&first) => {
            let mut reach = BTreeSet::from([first]);
            let mut stack = vec![first];
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if residual.contains(&w) && edge_ok(v, w) && reach.insert(w) {
                        stack.push(w);
                    }
                }
            }
            owners.is_subset(&reach)
        }
    };
    report.notes.push(format!(
        "rule {rname}: residual graph connected={} (strong), links all non-port macro-facet owners={} (weak)",
        comps <= 1,
        weak_ok
    ));
    report
}

/// Checks a second network against its rule and the first network.
pub fn validate_second_network(
    system: &SubstitutionSystem,
    first: &Network,
    second: &SecondNetwork,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let rule = &system.rules[second.rule];
    let rname = rule.name.clone();
    let tpl = &rule.template;
    let cells: BTreeSet<usize> = second.cells.iter().copied().collect();
    if cells.iter().any(|&c| c >= tpl.cells.len()) {
        report.push(Violation::SecondNetworkCrossings {
            rule: rname,
            reason: "cell out of range".into(),
        });
        return report;
    }
    if cells.is_empty() || components(&tpl.dual_graph(), &cells, |_, _| true) != 1 {
        report.push(Violation::SecondNetworkDisconnected {
            rule: rname.clone(),
        });
    }
    for (k, mf) in rule.gamma.iter().enumerate() {
        if !mf.iter().any(|s| cells.contains(&s.cell)) {
            report.push(Violation::SecondNetworkMissesMacroFacet {
                rule: rname.clone(),
                facet: k + 1,
            });
        }
    }
    let branch_cells: BTreeSet<usize> = first.branches.iter().flatten().copied().collect();
    let expected: BTreeSet<usize> = cells.intersection(&branch_cells).copied().collect();
    let declared: BTreeSet<usize> = second.crossings.iter().copied().collect();
    if expected != declared {
        report.push(Violation::SecondNetworkCrossings {
            rule: rname.clone(),
            reason: format!(
                "declared {} crossings, the networks share {} branch cells",
                declared.len(),
                expected.len()
            ),
        });
    }
    for (k, b) in first.branches.iter().enumerate() {
        if !b.iter().any(|c| declared.contains(c)) {
            report.push(Violation::BranchUncrossed {
                rule: rname.clone(),
                branch: k + 1,
            });
        }
    }
    report
}

/// Validates every rule's network, the second networks, and the port
/// condition.
pub fn validate_networks(system: &SubstitutionSystem, nets: &NetworkSet) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (ri, rule) in system.rules.iter().enumerate() {
        match nets.get(ri) {
            Some(n) => {
                report.merge(validate_network(system, n));
                if let Some(s) = nets.second(ri) {
                    report.merge(validate_second_network(system, n, s));
                }
            }
            None => report.push(Violation::MissingNetwork {
                rule: rule.name.clone(),
            }),
        }
    }
    if report.is_valid() {
        report.merge(check_port_condition(system, nets));
    }
    report
}

/// Whenever two macro-facets meet, their ports must meet each other.
pub fn check_port_condition(system: &SubstitutionSystem, nets: &NetworkSet) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (ri, rule) in system.rules.iter().enumerate() {
        if nets.get(ri).is_none() {
            report.push(Violation::MissingNetwork {
                rule: rule.name.clone(),
            });
        }
    }
    if !report.is_valid() {
        return report;
    }
    if system.macro_adjacency.is_empty() && !system.rules.is_empty() {
        report.push(Violation::NoAdjacency);
        return report;
    }
    let port_pos = |r: MacroFacetRef| -> Option<usize> {
        let net = nets.get(r.rule)?;
        let port = *net.ports.get(r.facet)?;
        system.rules[r.rule]
            .gamma
            .get(r.facet)?
            .iter()
            .position(|&s| s == port)
    };
    for e in &system.macro_adjacency {
        let entry = system.entry_name(e);
        let (Some(pa), Some(pb)) = (port_pos(e.from), port_pos(e.to)) else {
            report.push(Violation::PortMisaligned {
                entry,
                reason: "port not found in macro-facet".into(),
            });
            continue;
        };
        for &(x, y) in &e.map {
            if (x == pa) != (y == pb) {
                report.push(Violation::PortMisaligned {
                    entry: entry.clone(),
                    reason: format!(
                        "position {} meets position {} (ports at {} and {})",
                        x + 1,
                        y + 1,
                        pa + 1,
                        pb + 1
                    ),
                });
            }
        }
    }
    report
}

/// Enumerates every network of `rule` that passes [`validate_network`], in
/// canonical order: by center, then branch paths and ports in DFS order with
/// ascending cell indices.
pub fn search_networks(system: &SubstitutionSystem, rule: usize) -> Vec<Network> {
    let r = &system.rules[rule];
    let tpl = &r.template;
    let adj = tpl.dual_graph();
    let external: BTreeSet<Slot> = tpl
        .external_facets(&system.prototypes)
        .into_iter()
        .collect();
    let mut out = Vec::new();
    if r.gamma.is_empty() {
        return out;
    }
    for center in 0..tpl.cells.len() {
        if external.iter().any(|s| s.cell == center) {
            continue;
        }
        let mut search = Search {
            system,
            rule,
            adj: &adj,
            center,
            used: BTreeSet::from([center]),
            branches: Vec::new(),
            ports: Vec::new(),
            out: &mut out,
        };
        search.branch(0);
    }
    out
}

struct Search<'a> {
    system: &'a SubstitutionSystem,
    rule: usize,
    adj: &'a [Vec<usize>],
    center: usize,
    used: BTreeSet<usize>,
    branches: Vec<Vec<usize>>,
    ports: Vec<Slot>,
    out: &'a mut Vec<Network>,
}

impl Search<'_> {
    fn branch(&mut self, k: usize) {
        let gamma = &self.system.rules[self.rule].gamma;
        if k == gamma.len() {
            let net = Network {
                rule: self.rule,
                center: self.center,
                branches: self.branches.clone(),
                ports: self.ports.clone(),
            };
            if validate_network(self.system, &net).is_valid() {
                self.out.push(net);
            }
            return;
        }
        let mut path = Vec::new();
        self.extend(k, self.center, &mut path);
    }

    fn extend(&mut self, k: usize, at: usize, path: &mut Vec<usize>) {
        let adj = self.adj;
        for &next in &adj[at] {
            if self.used.contains(&next) {
                continue;
            }
            self.used.insert(next);
            path.push(next);
            let candidates: Vec<Slot> = self.system.rules[self.rule].gamma[k]
                .iter()
                .copied()
                .filter(|s| s.cell == next)
                .collect();
            for port in candidates {
                self.branches.push(path.clone());
                self.ports.push(port);
                self.branch(k + 1);
                self.branches.pop();
                self.ports.pop();
            }
            self.extend(k, next, path);
            path.pop();
            self.used.remove(&next);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::square3x3;

    fn has(report: &ValidationReport, f: impl Fn(&Violation) -> bool) -> bool {
        report.violations.iter().any(f)
    }

    #[test]
    fn bundled_network_is_valid() {
        let doc = square3x3();
        let net = doc.networks.get(0).unwrap();
        assert_eq!(net.center, 4);
        let report = validate_network(&doc.system, net);
        assert!(report.is_valid(), "{report}");
        assert!(check_port_condition(&doc.system, &doc.networks).is_valid());
    }

    #[test]
    fn corner_center_is_not_interior() {
        let doc = square3x3();
        let mut net = doc.networks.get(0).unwrap().clone();
        net.center = 0;
        let report = validate_network(&doc.system, &net);
        assert!(has(&report, |v| matches!(
            v,
            Violation::CenterNotInterior { .. }
        )));
    }

    #[test]
    fn three_branches_are_too_few() {
        let doc = square3x3();
        let mut net = doc.networks.get(0).unwrap().clone();
        net.branches.pop();
        net.ports.pop();
        let report = validate_network(&doc.system, &net);
        assert!(has(&report, |v| matches!(
            v,
            Violation::BranchCount {
                expected: 4,
                found: 3,
                ..
            }
        )));
    }

    #[test]
    fn port_condition_detects_misaligned_port() {
        let mut doc = square3x3();
        // send the S port (position 2) onto position 1 of N
        doc.system.macro_adjacency[0].map = vec![(0, 1), (1, 0), (2, 2)];
        let report = check_port_condition(&doc.system, &doc.networks);
        assert!(has(&report, |v| matches!(
            v,
            Violation::PortMisaligned { .. }
        )));
    }

    #[test]
    fn port_condition_needs_adjacency() {
        let mut doc = square3x3();
        doc.system.macro_adjacency.clear();
        let report = check_port_condition(&doc.system, &doc.networks);
        assert_eq!(report.violations, vec![Violation::NoAdjacency]);
    }

    #[test]
    fn port_condition_needs_networks() {
        let mut doc = square3x3();
        doc.networks.first[0] = None;
        let report = check_port_condition(&doc.system, &doc.networks);
        assert!(has(&report, |v| matches!(
            v,
            Violation::MissingNetwork { .. }
        )));
    }

    #[test]
    fn search_finds_declared_network() {
        let doc = square3x3();
        let found = search_networks(&doc.system, 0);
        let declared = doc.networks.get(0).unwrap();
        assert!(found.contains(declared));
        for n in &found {
            assert!(validate_network(&doc.system, n).is_valid());
            assert_eq!(n.center, 4);
        }
    }

    #[test]
    fn crossed_slots_of_declared_network() {
        let doc = square3x3();
        let net = doc.networks.get(0).unwrap();
        let slots = net.slot_branches(&doc.system);
        // 4 ports plus both sides of 4 crossed pairings
        assert_eq!(slots.len(), 12);
    }

    #[test]
    fn second_network_is_valid() {
        let doc = square3x3();
        let report = validate_networks(&doc.system, &doc.networks);
        assert!(report.is_valid(), "{report}");
        let mut second = doc.networks.second(0).unwrap().clone();
        second.crossings.pop();
        let r = validate_second_network(&doc.system, doc.networks.get(0).unwrap(), &second);
        assert!(has(&r, |v| matches!(v, Violation::BranchUncrossed { .. })));
    }
}
