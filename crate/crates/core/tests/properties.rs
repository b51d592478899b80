use std::sync::OnceLock;

use proptest::prelude::*;
use sofic_core::examples::square3x3;
use sofic_core::layout::SlotRole;
use sofic_core::{
    assemble_patches, check_phase_coherence, decompose_macro, enumerate_macro_tiles,
    extend_undefined, for_each_patch, parse_spec, phi, print_spec, Boundary, FacetClass, GridPatch,
    Layout, MacroTileInstance, PatchGraph, PhaseTable, Tileset,
};

struct Fixture {
    layout: Layout,
    tau: Tileset,
    instances: Vec<MacroTileInstance>,
    table: PhaseTable,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let layout = Layout::from_document(&square3x3()).unwrap();
        let tau = sofic_core::generate_tileset(&layout);
        let instances = enumerate_macro_tiles(&layout, &tau);
        let table = PhaseTable::new(&layout).unwrap();
        Fixture {
            layout,
            tau,
            instances,
            table,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_round_trip(keep_second in any::<bool>(), consistent in any::<bool>(), name in "[a-z][a-z0-9_]{0,8}") {
        let mut doc = square3x3();
        doc.system.name = name;
        doc.system.consistent = consistent;
        if !keep_second {
            doc.networks.second[0] = None;
        }
        let text = print_spec(&doc);
        let back = parse_spec(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(print_spec(&back), text);
    }

    #[test]
    fn tiles_carry_their_macro_indices(i in 0usize..1544) {
        let f = fixture();
        let t = f.tau.get(i);
        let info = f.layout.info(t.base);
        for (k, tr) in t.triples.iter().enumerate() {
            prop_assert_eq!(tr.f, info.classes[k]);
            // a parent-index is absent exactly on macro-facet members
            if let SlotRole::MacroMember(_) = info.roles[k] {
                prop_assert!(tr.j.is_none());
            }
            if info.roles[k] == SlotRole::Internal && !t.central {
                prop_assert_eq!(tr.g, tr.f);
            }
        }
        // off-network cells carry a single parent-index on internal facets
        let parents: std::collections::BTreeSet<_> = t
            .triples
            .iter()
            .zip(&info.roles)
            .filter(|(_, r)| **r == SlotRole::Internal)
            .map(|(tr, _)| tr.j)
            .collect();
        prop_assert!(t.central || parents.len() <= 1);
    }

    #[test]
    fn phi_image_is_a_tile(i in 0usize..1544) {
        let f = fixture();
        let q = &f.instances[i];
        let img = phi(&f.layout, q);
        prop_assert!(f.tau.contains(&img));
        prop_assert_eq!(img.base, q.parent);
        prop_assert!(q.assignment.iter().all(|t| f.tau.contains(t)));
    }

    #[test]
    fn seeded_patches_are_valid_and_coherent(i in 0usize..1544, w in 2usize..4, h in 2usize..4, sx in 0usize..3, sy in 0usize..3) {
        let f = fixture();
        let (sx, sy) = (sx % w, sy % h);
        let seed = f.tau.get(i).clone();
        let boundary = Boundary::Seeded(vec![(sx, sy, seed.clone())]);
        let mut seen = 0;
        for_each_patch(&f.layout, &f.tau, w, h, &boundary, |p| {
            seen += 1;
            assert!(p.is_valid());
            assert_eq!(p.get(sx, sy), Some(&seed));
            assert!(p.cells.iter().flatten().all(|t| f.tau.contains(t)));
            assert!(check_phase_coherence(&f.table, p).is_coherent());
            seen < 200
        }).unwrap();
    }

    #[test]
    fn aligned_blocks_are_instances(i in 0usize..1544) {
        let f = fixture();
        let q = &f.instances[i];
        let mut grid = GridPatch::empty(3, 3);
        for (c, t) in q.assignment.iter().enumerate() {
            let (x, y) = f.table.positions[c];
            grid.set(x, y, Some(t.clone()));
        }
        prop_assert!(grid.is_valid());
        let r = decompose_macro(&f.table, &grid, &f.instances, false);
        prop_assert_eq!(r.full_blocks.len(), 1);
        prop_assert!(r.non_instance_blocks.is_empty());
        prop_assert_eq!(&f.instances[r.full_blocks[0].1].assignment, &q.assignment);
    }

    #[test]
    fn isomorphism_ignores_node_order(seed in any::<u64>()) {
        let f = fixture();
        let patches = assemble_patches(&f.layout, &f.tau, 2, 2, &Boundary::Seeded(vec![(0, 0, f.instances[(seed % 1544) as usize].assignment[0].clone())])).unwrap();
        prop_assume!(!patches.is_empty());
        let (g, _) = patches[0].to_graph();
        let mut order: Vec<usize> = (0..g.tiles.len()).collect();
        let mut s = seed;
        for i in (1..order.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let pos: Vec<usize> = (0..order.len()).map(|i| order.iter().position(|&o| o == i).unwrap()).collect();
        let tiles = order.iter().map(|&o| g.tiles[o].clone()).collect();
        let gluings = g.gluings.iter().map(|&(a, fa, b, fb)| (pos[a], fa, pos[b], fb)).collect();
        let h = PatchGraph::new(tiles, gluings);
        prop_assert!(g.is_isomorphic(&h));
    }
}

/// Strips one cell thick may glue two macro-facet members that sit at
/// different heights of their macro-facets; such strips never extend to a
/// 2×2 patch.
#[test]
fn incoherent_strips_do_not_extend() {
    let f = fixture();
    let mut incoherent = Vec::new();
    for_each_patch(&f.layout, &f.tau, 2, 1, &Boundary::Free, |p| {
        if !check_phase_coherence(&f.table, p).is_coherent() {
            incoherent.push(p.clone());
        }
        true
    })
    .unwrap();
    assert!(!incoherent.is_empty());
    for p in &incoherent {
        for row in 0..2 {
            let seeds = (0..2)
                .map(|x| (x, row, p.get(x, 0).unwrap().clone()))
                .collect();
            let ext = assemble_patches(&f.layout, &f.tau, 2, 2, &Boundary::Seeded(seeds)).unwrap();
            assert!(ext.is_empty());
        }
    }
}

#[test]
fn undefined_extension_contains_tau() {
    let f = fixture();
    let ext = extend_undefined(&f.tau);
    assert!(f.tau.tiles().all(|t| ext.contains(t)));
    assert!(ext.len() <= 16 * f.tau.len());
    for t in ext.tiles() {
        let covered = f.tau.tiles().any(|o| {
            o.base == t.base
                && o.triples
                    .iter()
                    .zip(&t.triples)
                    .all(|(a, b)| b.is_undefined() || a == b)
        });
        assert!(covered);
        assert!(t
            .triples
            .iter()
            .all(|x| x.is_undefined() || x.f != FacetClass::Undefined));
    }
}

/// Every 3×3 patch anchored on a T1 tile is one full block, and the blocks
/// found are exactly the enumerated instances.
#[test]
fn anchored_three_by_three_patches_are_the_instances() {
    let f = fixture();
    let mut blocks = Vec::new();
    for t in f.tau.tiles().filter(|t| t.base == sofic_core::TileId(1)) {
        let seeds = Boundary::Seeded(vec![(0, 0, t.clone())]);
        for p in assemble_patches(&f.layout, &f.tau, 3, 3, &seeds).unwrap() {
            assert!(check_phase_coherence(&f.table, &p).is_coherent());
            let r = decompose_macro(&f.table, &p, &f.instances, false);
            assert!(r.non_instance_blocks.is_empty());
            assert_eq!(r.full_blocks.len(), 1);
            blocks.push(r.full_blocks[0].1);
        }
    }
    blocks.sort();
    assert_eq!(blocks, (0..f.instances.len()).collect::<Vec<_>>());
}
