mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::{closure, is_network, line, OTile, CENTER, CLASSES, NETWORK};
use sofic_core::examples::square3x3;
use sofic_core::tileset::{generate_tileset_traced, stage_view};
use sofic_core::Layout;

fn on_branch(t: usize, k: usize) -> bool {
    t == CENTER || NETWORK.iter().any(|n| n.0 == t && n.2.contains(&k))
}

/// Stage text built from the oracle closure, one line per distinct view.
fn oracle_stage(tau: &BTreeSet<OTile>, stage: u8) -> String {
    let mut lines: BTreeSet<(usize, String)> = BTreeSet::new();
    for t in tau {
        if stage == 5 && t.base != CENTER {
            continue;
        }
        let mut s = format!("T{} |", t.base);
        for (k, (f, j, g)) in t.facets.iter().enumerate() {
            let hidden = match stage {
                1..=3 => on_branch(t.base, k),
                4 => t.base == CENTER,
                _ => false,
            };
            let item = match stage {
                1 => f.clone(),
                2 if hidden => format!("({f},?)"),
                2 => format!("({f},{j})"),
                _ if hidden => format!("({f},?,?)"),
                _ => format!("({f},{j},{g})"),
            };
            s.push_str(&format!(" k={}:{item}", k + 1));
        }
        lines.insert((t.base, s));
    }
    lines.into_iter().map(|(_, l)| l + "\n").collect()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares `actual` with the committed file; `UPDATE_GOLDEN=1` rewrites
/// the file from `expected` first.
fn check_golden(name: &str, expected: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, expected).unwrap();
    }
    let committed =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(committed, expected, "{name} differs from the oracle");
    assert_eq!(committed, actual, "{name} differs from the library output");
}

#[test]
fn tables_agree_with_the_layout() {
    let layout = Layout::from_document(&square3x3()).unwrap();
    for j in 1..=9u32 {
        let info = layout.info(sofic_core::TileId(j));
        let classes: Vec<String> = info.classes.iter().map(|c| c.to_string()).collect();
        assert_eq!(classes, CLASSES[j as usize - 1], "T{j}");
        assert_eq!(
            info.on_network,
            is_network(j as usize) || j as usize == CENTER
        );
    }
}

#[test]
fn closure_matches_oracle() {
    let layout = Layout::from_document(&square3x3()).unwrap();
    let start = Instant::now();
    let (tau, trace) = generate_tileset_traced(&layout);
    assert!(start.elapsed() < Duration::from_secs(10));
    let oracle = closure();
    let expected: BTreeSet<String> = oracle.iter().map(line).collect();
    let actual: BTreeSet<String> = tau.dump().lines().map(str::to_string).collect();
    assert_eq!(actual, expected);
    assert_eq!(tau.len(), oracle.len());
    let n = trace.sizes.len();
    assert_eq!(trace.sizes[n - 1], trace.sizes[n - 2]);
}

#[test]
fn stage_views_match_oracle_and_golden_files() {
    let layout = Layout::from_document(&square3x3()).unwrap();
    let (tau, _) = generate_tileset_traced(&layout);
    let oracle = closure();
    for stage in 1..=5u8 {
        let expected = oracle_stage(&oracle, stage);
        let actual = stage_view(&tau, &layout, stage);
        check_golden(&format!("stage{stage}.txt"), &expected, &actual);
    }
}

#[test]
fn stage_sizes() {
    let oracle = closure();
    let count = |s: u8| oracle_stage(&oracle, s).lines().count();
    assert_eq!(count(1), 9);
    // 4 corners and 4 network cells under 9 parents, one center
    assert_eq!(count(2), 9 * 8 + 1);
    assert_eq!(count(3), 9 * 8 + 1);
}

#[test]
fn dump_is_byte_stable() {
    let layout = Layout::from_document(&square3x3()).unwrap();
    let a = generate_tileset_traced(&layout).0.dump();
    let b = generate_tileset_traced(&layout).0.dump();
    assert_eq!(a, b);
    check_golden_sorted(&a);
}

/// The dump file is kept in library order; the oracle only fixes its
/// content.
fn check_golden_sorted(actual: &str) {
    let path = golden("tileset.dump");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let oracle: BTreeSet<String> = closure().iter().map(line).collect();
        let lines: BTreeSet<String> = actual.lines().map(str::to_string).collect();
        assert_eq!(oracle, lines);
        std::fs::write(&path, actual).unwrap();
    }
    assert_eq!(std::fs::read_to_string(&path).unwrap(), actual);
}
