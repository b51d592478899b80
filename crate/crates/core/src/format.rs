//! Line-oriented text format for substitution systems, and parsing of
//! canonical tile dump lines.
//!
//! ```text
//! substitution <name>
//! prototype <id> facets <k> orient <+/- list>
//! rule <rid> parent <prototype-id>
//!   cell <cid> <prototype-id>
//!   adj <cid>.<facet> -- <cid>.<facet>
//!   gamma <k> : <cid>.<facet> ...
//!   network center <cid> branch <k> : <cid> ... port <cid>.<facet>
//!   network2 cells <cid> ... crossings <cid> ...
//! macroadj (<rid>,<k>) ~ (<rid>,<l>) map <i:j> ...
//! consistent <true|false>
//! ```
//!
//! Facets are 1-based; on four-facet prototypes `S`, `N`, `W`, `E` stand for
//! 1 to 4. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{
    facet_name, Cell, MacroAdjacency, MacroFacetRef, MacroTileTemplate, Orientation, Prototype,
    Rule, Slot, SubstitutionSystem, SQUARE_FACETS,
};
use crate::network::{Network, NetworkSet, SecondNetwork};
use crate::numbering::{FacetClass, FacetId, TileId};
use crate::tileset::{DecoratedTile, Provenance, Triple};

#[derive(Clone, Debug)]
pub struct SpecDocument {
    pub system: SubstitutionSystem,
    pub networks: NetworkSet,
    /// Source line of each `rule` declaration; empty for documents built in
    /// code.
    pub rule_lines: Vec<usize>,
}

impl PartialEq for SpecDocument {
    fn eq(&self, other: &Self) -> bool {
        self.system == other.system && self.networks == other.networks
    }
}

impl Eq for SpecDocument {}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn unresolved(line: usize, name: &str) -> Error {
    Error::UnresolvedReference {
        line,
        name: name.to_string(),
    }
}

/// Network lines collected for one rule before assembly.
#[derive(Default)]
struct PendingNetwork {
    center: Option<(usize, usize)>,
    branches: Vec<(usize, Vec<usize>, Slot, usize)>,
    second: Option<SecondNetwork>,
}

struct PendingRule {
    rule: Rule,
    line: usize,
    cells: HashMap<String, usize>,
    gamma: Vec<Option<Vec<Slot>>>,
    network: PendingNetwork,
}

/// A `macroadj` line: source line, the two (rule, facet) tokens and the map.
type PendingAdjacency = (usize, String, String, String, String, Vec<(usize, usize)>);

struct Parser {
    name: Option<String>,
    prototypes: Vec<Prototype>,
    proto_index: HashMap<String, usize>,
    rules: Vec<PendingRule>,
    adjacency: Vec<PendingAdjacency>,
    consistent: Option<bool>,
}

/// Parses a spec document. Structural checks are left to the validators;
/// only syntax, unresolved names and missing `gamma` lines are errors here.
pub fn parse_spec(text: &str) -> Result<SpecDocument> {
    let mut p = Parser {
        name: None,
        prototypes: Vec::new(),
        proto_index: HashMap::new(),
        rules: Vec::new(),
        adjacency: Vec::new(),
        consistent: None,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        p.line(line, &tokens)?;
    }
    p.finish()
}

fn expect<'a>(tokens: &[&'a str], i: usize, line: usize, what: &str) -> Result<&'a str> {
    tokens
        .get(i)
        .copied()
        .ok_or_else(|| perr(line, format!("expected {what}")))
}

fn keyword(tokens: &[&str], i: usize, line: usize, kw: &str) -> Result<()> {
    match tokens.get(i) {
        Some(t) if *t == kw => Ok(()),
        Some(t) => Err(perr(line, format!("expected `{kw}`, found `{t}`"))),
        None => Err(perr(line, format!("expected `{kw}`"))),
    }
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| perr(line, format!("expected a number, found `{s}`")))
}

/// Facet token: a 1-based index, or a square facet name.
fn parse_facet(s: &str, line: usize) -> Result<usize> {
    if let Some(k) = SQUARE_FACETS.iter().position(|n| *n == s) {
        return Ok(k);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(k - 1),
        _ => Err(perr(line, format!("bad facet `{s}`"))),
    }
}

impl PendingRule {
    fn cell(&self, name: &str, line: usize) -> Result<usize> {
        self.cells
            .get(name)
            .copied()
            .ok_or_else(|| unresolved(line, name))
    }

    fn slot(&self, token: &str, line: usize) -> Result<Slot> {
        let (c, f) = token
            .split_once('.')
            .ok_or_else(|| perr(line, format!("expected <cell>.<facet>, found `{token}`")))?;
        Ok(Slot::new(self.cell(c, line)?, parse_facet(f, line)?))
    }
}

impl Parser {
    fn current(&mut self, line: usize, what: &str) -> Result<&mut PendingRule> {
        self.rules
            .last_mut()
            .ok_or_else(|| perr(line, format!("`{what}` outside a rule")))
    }

    fn line(&mut self, line: usize, t: &[&str]) -> Result<()> {
        match t[0] {
            "substitution" => {
                if self.name.is_some() {
                    return Err(perr(line, "duplicate `substitution` line"));
                }
                self.name = Some(expect(t, 1, line, "name")?.to_string());
            }
            "prototype" => {
                let name = expect(t, 1, line, "prototype name")?;
                keyword(t, 2, line, "facets")?;
                let k = parse_usize(expect(t, 3, line, "facet count")?, line)?;
                keyword(t, 4, line, "orient")?;
                let orient = t[5..]
                    .iter()
                    .map(|s| match *s {
                        "+" => Ok(Orientation::Plus),
                        "-" => Ok(Orientation::Minus),
                        o => Err(perr(line, format!("bad orientation `{o}`"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                if orient.len() != k {
                    return Err(perr(
                        line,
                        format!("{k} facets but {} orientations", orient.len()),
                    ));
                }
                if self.proto_index.contains_key(name) {
                    return Err(perr(line, format!("duplicate prototype `{name}`")));
                }
                self.proto_index
                    .insert(name.to_string(), self.prototypes.len());
                self.prototypes.push(Prototype::new(name, orient));
            }
            "rule" => {
                let name = expect(t, 1, line, "rule name")?;
                keyword(t, 2, line, "parent")?;
                let parent_name = expect(t, 3, line, "parent prototype")?;
                let parent = *self
                    .proto_index
                    .get(parent_name)
                    .ok_or_else(|| unresolved(line, parent_name))?;
                if self.rules.iter().any(|r| r.rule.name == name) {
                    return Err(perr(line, format!("duplicate rule `{name}`")));
                }
                let fc = self.prototypes[parent].facet_count();
                self.rules.push(PendingRule {
                    rule: Rule {
                        name: name.to_string(),
                        parent,
                        template: MacroTileTemplate {
                            cells: Vec::new(),
                            pairings: Vec::new(),
                        },
                        gamma: Vec::new(),
                    },
                    line,
                    cells: HashMap::new(),
                    gamma: vec![None; fc],
                    network: PendingNetwork::default(),
                });
            }
            "cell" => {
                let name = expect(t, 1, line, "cell name")?;
                let proto_name = expect(t, 2, line, "cell prototype")?;
                let proto = *self
                    .proto_index
                    .get(proto_name)
                    .ok_or_else(|| unresolved(line, proto_name))?;
                let r = self.current(line, "cell")?;
                if r.cells.contains_key(name) {
                    return Err(perr(line, format!("duplicate cell `{name}`")));
                }
                r.cells
                    .insert(name.to_string(), r.rule.template.cells.len());
                r.rule.template.cells.push(Cell {
                    name: name.to_string(),
                    prototype: proto,
                });
            }
            "adj" => {
                let r = self.current(line, "adj")?;
                let a = r.slot(expect(t, 1, line, "slot")?, line)?;
                keyword(t, 2, line, "--")?;
                let b = r.slot(expect(t, 3, line, "slot")?, line)?;
                r.rule.template.pairings.push((a, b));
            }
            "gamma" => {
                let r = self.current(line, "gamma")?;
                let k = parse_facet(expect(t, 1, line, "facet")?, line)?;
                keyword(t, 2, line, ":")?;
                let slots = t[3..]
                    .iter()
                    .map(|s| r.slot(s, line))
                    .collect::<Result<Vec<_>>>()?;
                let entry = r
                    .gamma
                    .get_mut(k)
                    .ok_or_else(|| perr(line, format!("parent has no facet {}", k + 1)))?;
                if entry.is_some() {
                    return Err(perr(line, format!("duplicate gamma for facet {}", k + 1)));
                }
                *entry = Some(slots);
            }
            "network" => {
                let r = self.current(line, "network")?;
                keyword(t, 1, line, "center")?;
                let center = r.cell(expect(t, 2, line, "center cell")?, line)?;
                keyword(t, 3, line, "branch")?;
                let k = parse_facet(expect(t, 4, line, "branch facet")?, line)?;
                keyword(t, 5, line, ":")?;
                let port_at = t
                    .iter()
                    .position(|s| *s == "port")
                    .ok_or_else(|| perr(line, "expected `port`"))?;
                let cells = t[6..port_at]
                    .iter()
                    .map(|s| r.cell(s, line))
                    .collect::<Result<Vec<_>>>()?;
                let port = r.slot(expect(t, port_at + 1, line, "port slot")?, line)?;
                if t.len() > port_at + 2 {
                    return Err(perr(line, "trailing tokens after port"));
                }
                match r.network.center {
                    Some((c, _)) if c != center => {
                        return Err(perr(line, "network lines disagree on the center"))
                    }
                    _ => r.network.center = Some((center, line)),
                }
                if r.network.branches.iter().any(|b| b.0 == k) {
                    return Err(perr(line, format!("duplicate branch {}", k + 1)));
                }
                r.network.branches.push((k, cells, port, line));
            }
            "network2" => {
                let r = self.current(line, "network2")?;
                keyword(t, 1, line, "cells")?;
                let cross_at = t
                    .iter()
                    .position(|s| *s == "crossings")
                    .ok_or_else(|| perr(line, "expected `crossings`"))?;
                let cells = t[2..cross_at]
                    .iter()
                    .map(|s| r.cell(s, line))
                    .collect::<Result<Vec<_>>>()?;
                let crossings = t[cross_at + 1..]
                    .iter()
                    .map(|s| r.cell(s, line))
                    .collect::<Result<Vec<_>>>()?;
                if r.network.second.is_some() {
                    return Err(perr(line, "duplicate `network2` line"));
                }
                let rule = self.rules.len() - 1;
                self.rules[rule].network.second = Some(SecondNetwork {
                    rule,
                    cells,
                    crossings,
                });
            }
            "macroadj" => {
                let (from_rule, from_facet) = parse_ref(expect(t, 1, line, "(rule,facet)")?, line)?;
                keyword(t, 2, line, "~")?;
                let (to_rule, to_facet) = parse_ref(expect(t, 3, line, "(rule,facet)")?, line)?;
                keyword(t, 4, line, "map")?;
                let map = t[5..]
                    .iter()
                    .map(|s| {
                        let (a, b) = s
                            .split_once(':')
                            .ok_or_else(|| perr(line, format!("expected i:j, found `{s}`")))?;
                        let a = parse_usize(a, line)?;
                        let b = parse_usize(b, line)?;
                        if a == 0 || b == 0 {
                            return Err(perr(line, "map positions are 1-based"));
                        }
                        Ok((a - 1, b - 1))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.adjacency.push((
                    line,
                    from_rule.to_string(),
                    from_facet.to_string(),
                    to_rule.to_string(),
                    to_facet.to_string(),
                    map,
                ));
            }
            "consistent" => {
                let v = match expect(t, 1, line, "true or false")? {
                    "true" => true,
                    "false" => false,
                    o => return Err(perr(line, format!("expected true or false, found `{o}`"))),
                };
                self.consistent = Some(v);
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
        Ok(())
    }

    fn finish(self) -> Result<SpecDocument> {
        let name = self
            .name
            .ok_or_else(|| perr(1, "missing `substitution` line"))?;
        let rule_index: HashMap<String, usize> = self
            .rules
            .iter()
            .enumerate()
            .map(|(i, r)| (r.rule.name.clone(), i))
            .collect();
        let mut macro_adjacency = Vec::new();
        for (line, fr, ff, tr, tf, map) in self.adjacency {
            let resolve = |r: &str, f: &str| -> Result<MacroFacetRef> {
                let rule = *rule_index.get(r).ok_or_else(|| unresolved(line, r))?;
                Ok(MacroFacetRef {
                    rule,
                    facet: parse_facet(f, line)?,
                })
            };
            macro_adjacency.push(MacroAdjacency {
                from: resolve(&fr, &ff)?,
                to: resolve(&tr, &tf)?,
                map,
            });
        }
        let mut rules = Vec::new();
        let mut first = Vec::new();
        let mut second = Vec::new();
        let mut rule_lines = Vec::new();
        for (ri, pr) in self.rules.into_iter().enumerate() {
            let mut rule = pr.rule;
            let mut gamma = Vec::new();
            for (k, g) in pr.gamma.into_iter().enumerate() {
                gamma.push(g.ok_or_else(|| {
                    perr(
                        pr.line,
                        format!("rule `{}` has no gamma line for facet {}", rule.name, k + 1),
                    )
                })?);
            }
            rule.gamma = gamma;
            let net = match pr.network.center {
                None => None,
                Some((center, line)) => {
                    let mut branches = pr.network.branches;
                    branches.sort_by_key(|b| b.0);
                    if branches.iter().enumerate().any(|(i, b)| b.0 != i) {
                        return Err(perr(line, "network branches must be numbered 1..k"));
                    }
                    Some(Network {
                        rule: ri,
                        center,
                        ports: branches.iter().map(|b| b.2).collect(),
                        branches: branches.into_iter().map(|b| b.1).collect(),
                    })
                }
            };
            first.push(net);
            second.push(pr.network.second);
            rule_lines.push(pr.line);
            rules.push(rule);
        }
        Ok(SpecDocument {
            system: SubstitutionSystem {
                name,
                prototypes: self.prototypes,
                rules,
                macro_adjacency,
                consistent: self.consistent.unwrap_or(false),
            },
            networks: NetworkSet { first, second },
            rule_lines,
        })
    }
}

fn parse_ref(token: &str, line: usize) -> Result<(&str, &str)> {
    token
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .and_then(|s| s.split_once(','))
        .ok_or_else(|| perr(line, format!("expected (rule,facet), found `{token}`")))
}

/// Canonical text of a document; [`parse_spec`] reads it back to an equal
/// document.
pub fn print_spec(doc: &SpecDocument) -> String {
    let sys = &doc.system;
    let mut out = String::new();
    let _ = writeln!(out, "substitution {}", sys.name);
    for p in &sys.prototypes {
        let orient: Vec<String> = p
            .orientations
            .iter()
            .map(|o| o.symbol().to_string())
            .collect();
        let _ = writeln!(
            out,
            "prototype {} facets {} orient {}",
            p.name,
            p.facet_count(),
            orient.join(" ")
        );
    }
    for (ri, rule) in sys.rules.iter().enumerate() {
        let tpl = &rule.template;
        let slot = |s: Slot| tpl.slot_name(&sys.prototypes, s);
        let cell = |c: usize| tpl.cells[c].name.as_str();
        let pfc = sys.prototypes[rule.parent].facet_count();
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "rule {} parent {}",
            rule.name, sys.prototypes[rule.parent].name
        );
        for c in &tpl.cells {
            let _ = writeln!(
                out,
                "  cell {} {}",
                c.name, sys.prototypes[c.prototype].name
            );
        }
        for &(a, b) in &tpl.pairings {
            let _ = writeln!(out, "  adj {} -- {}", slot(a), slot(b));
        }
        for (k, mf) in rule.gamma.iter().enumerate() {
            let members: Vec<String> = mf.iter().map(|&s| slot(s)).collect();
            let _ = writeln!(
                out,
                "  gamma {} : {}",
                facet_name(pfc, k),
                members.join(" ")
            );
        }
        if let Some(net) = doc.networks.get(ri) {
            for (k, b) in net.branches.iter().enumerate() {
                let cells: Vec<&str> = b.iter().map(|&c| cell(c)).collect();
                let mut line = format!(
                    "  network center {} branch {} :",
                    cell(net.center),
                    facet_name(pfc, k)
                );
                for c in cells {
                    line.push(' ');
                    line.push_str(c);
                }
                let _ = writeln!(out, "{line} port {}", slot(net.ports[k]));
            }
        }
        if let Some(s) = doc.networks.second(ri) {
            let cells: Vec<&str> = s.cells.iter().map(|&c| cell(c)).collect();
            let crossings: Vec<&str> = s.crossings.iter().map(|&c| cell(c)).collect();
            let _ = writeln!(
                out,
                "  network2 cells {} crossings {}",
                cells.join(" "),
                crossings.join(" ")
            );
        }
    }
    if !sys.macro_adjacency.is_empty() {
        let _ = writeln!(out);
    }
    for e in &sys.macro_adjacency {
        let side = |r: MacroFacetRef| {
            let rule = &sys.rules[r.rule];
            let fc = sys.prototypes[rule.parent].facet_count();
            format!("({},{})", rule.name, facet_name(fc, r.facet))
        };
        let map: Vec<String> = e
            .map
            .iter()
            .map(|(a, b)| format!("{}:{}", a + 1, b + 1))
            .collect();
        let _ = writeln!(
            out,
            "macroadj {} ~ {} map {}",
            side(e.from),
            side(e.to),
            map.join(" ")
        );
    }
    let _ = writeln!(out, "consistent {}", sys.consistent);
    out
}

fn parse_class(s: &str, line: usize) -> Result<FacetClass> {
    Ok(match s {
        "p" => FacetClass::Port,
        "m" => FacetClass::MacroFacet,
        "b" => FacetClass::Boundary,
        "u" => FacetClass::Undefined,
        _ => {
            let i = s
                .strip_prefix('f')
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&n| n > 0)
                .ok_or_else(|| perr(line, format!("bad facet class `{s}`")))?;
            FacetClass::Internal(FacetId(i))
        }
    })
}

/// Reads one canonical dump line back into a tile.
pub fn parse_dump_line(text: &str, line: usize) -> Result<(DecoratedTile, Provenance)> {
    let (head, rest) = text
        .split_once('|')
        .ok_or_else(|| perr(line, "expected `|` in tile line"))?;
    let head: Vec<&str> = head.split_whitespace().collect();
    if head.len() != 2 {
        return Err(perr(line, "expected `T<j> <provenance>`"));
    }
    let base = head[0]
        .strip_prefix('T')
        .and_then(|n| n.parse::<u32>().ok())
        .filter(|&n| n > 0)
        .ok_or_else(|| perr(line, format!("bad tile `{}`", head[0])))?;
    let prov = match head[1] {
        "base" => Provenance::Base,
        "network" => Provenance::Network,
        "central" => Provenance::Central,
        o => return Err(perr(line, format!("bad provenance `{o}`"))),
    };
    let mut triples = Vec::new();
    for (i, item) in rest.split_whitespace().enumerate() {
        let body = item
            .strip_prefix(&format!("k={}:(", i + 1))
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| perr(line, format!("bad triple `{item}`")))?;
        let parts: Vec<&str> = body.split(',').collect();
        if parts.len() != 3 {
            return Err(perr(line, format!("bad triple `{item}`")));
        }
        let j = parse_usize(parts[1], line)? as u32;
        triples.push(Triple {
            f: parse_class(parts[0], line)?,
            j: (j > 0).then_some(TileId(j)),
            g: parse_class(parts[2], line)?,
        });
    }
    Ok((
        DecoratedTile {
            base: TileId(base),
            triples,
            central: prov == Provenance::Central,
        },
        prov,
    ))
}

/// Placements for seeded assembly, one per line:
/// `place <x> <y> <dump line>` with `(0, 0)` the bottom-left cell.
pub fn parse_placements(text: &str) -> Result<Vec<(usize, usize, DecoratedTile)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.splitn(4, char::is_whitespace);
        keyword(&[parts.next().unwrap_or("")], 0, line, "place")?;
        let x = parse_usize(parts.next().unwrap_or(""), line)?;
        let y = parse_usize(parts.next().unwrap_or(""), line)?;
        let (tile, _) = parse_dump_line(parts.next().unwrap_or(""), line)?;
        out.push((x, y, tile));
    }
    Ok(out)
}
