//! Hand-transcribed tables of the bundled 3×3 example and a small,
//! string-based closure written without the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// Macro-indices of T1..T9, facets in S N W E order.
pub const CLASSES: [[&str; 4]; 9] = [
    ["m", "f3", "m", "f1"],
    ["p", "f4", "f1", "f2"],
    ["m", "f5", "f2", "m"],
    ["f3", "f8", "p", "f6"],
    ["f4", "f9", "f6", "f7"],
    ["f5", "f10", "f7", "p"],
    ["f8", "m", "m", "f11"],
    ["f9", "p", "f11", "f12"],
    ["f10", "m", "f12", "m"],
];

/// Network cells: tile, branch facet, and the two facets on the branch.
pub const NETWORK: [(usize, usize, [usize; 2]); 4] = [
    (2, 0, [0, 1]),
    (4, 2, [2, 3]),
    (6, 3, [3, 2]),
    (8, 1, [1, 0]),
];

pub const CENTER: usize = 5;

pub fn n_sigma(j: usize, k: usize) -> &'static str {
    CLASSES[j - 1][k]
}

pub fn is_network(t: usize) -> bool {
    NETWORK.iter().any(|n| n.0 == t)
}

/// `(f, j, g)` with `j = 0` when absent.
pub type T3 = (String, usize, String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OTile {
    pub base: usize,
    pub facets: [T3; 4],
}

fn t3(f: &str, j: usize, g: &str) -> T3 {
    (f.to_string(), j, g.to_string())
}

/// Step 3 schema for a base tile `t` under parent `j`.
pub fn base_tile(t: usize, j: usize) -> OTile {
    let facets = std::array::from_fn(|k| {
        let f = CLASSES[t - 1][k];
        if f == "m" {
            t3("m", 0, n_sigma(j, k))
        } else {
            t3(f, j, f)
        }
    });
    OTile { base: t, facets }
}

pub fn provenance(t: usize) -> &'static str {
    if t == CENTER {
        "central"
    } else if is_network(t) {
        "network"
    } else {
        "base"
    }
}

pub fn line(t: &OTile) -> String {
    let mut s = format!("T{} {} |", t.base, provenance(t.base));
    for (k, (f, j, g)) in t.facets.iter().enumerate() {
        s.push_str(&format!(" k={}:({f},{j},{g})", k + 1));
    }
    s
}

/// Least fixpoint of steps 3 to 5 over the tables above.
pub fn closure() -> BTreeSet<OTile> {
    let mut tau: BTreeSet<OTile> = BTreeSet::new();
    for t in [1, 3, 7, 9] {
        for j in 1..=9 {
            tau.insert(base_tile(t, j));
        }
    }
    loop {
        let mut pairs: BTreeMap<(usize, usize), BTreeSet<(usize, String)>> = BTreeMap::new();
        for t in &tau {
            for (k, (_, j, g)) in t.facets.iter().enumerate() {
                pairs
                    .entry((t.base, k))
                    .or_default()
                    .insert((*j, g.clone()));
            }
        }
        let mut next = tau.clone();
        for &(t, b, slots) in &NETWORK {
            for j in 1..=9 {
                for (pj, pg) in pairs.get(&(j, b)).into_iter().flatten() {
                    let facets = std::array::from_fn(|k| {
                        let f = CLASSES[t - 1][k];
                        if slots.contains(&k) {
                            t3(f, *pj, pg)
                        } else {
                            t3(f, j, f)
                        }
                    });
                    next.insert(OTile { base: t, facets });
                }
            }
        }
        for t in &tau {
            if t.base == CENTER {
                continue;
            }
            let facets = std::array::from_fn(|k| {
                let (_, j, g) = &t.facets[k];
                t3(CLASSES[CENTER - 1][k], *j, g)
            });
            next.insert(OTile {
                base: CENTER,
                facets,
            });
        }
        if next == tau {
            return tau;
        }
        tau = next;
    }
}
