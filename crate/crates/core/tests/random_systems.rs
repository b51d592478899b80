use proptest::prelude::*;
use sofic_core::tileset::generate_tileset_traced;
use sofic_core::{
    enumerate_macro_tiles, exact_count, parse_spec, print_spec, simulation::verify_instances,
    CountParams, FacetClass, Layout, PhaseTable,
};

/// An `a × b` grid substitution of squares with a network centred on the
/// interior cell `(cx, cy)` and straight branches.
fn rect_spec(a: usize, b: usize, cx: usize, cy: usize) -> String {
    let c = |x: usize, y: usize| format!("c{}", y * a + x + 1);
    let mut s = format!(
        "substitution rect{a}x{b}\nprototype sq facets 4 orient - + - +\nrule r parent sq\n"
    );
    for y in 0..b {
        for x in 0..a {
            s += &format!("  cell {} sq\n", c(x, y));
        }
    }
    for y in 0..b {
        for x in 0..a {
            if x + 1 < a {
                s += &format!("  adj {}.E -- {}.W\n", c(x, y), c(x + 1, y));
            }
            if y + 1 < b {
                s += &format!("  adj {}.N -- {}.S\n", c(x, y), c(x, y + 1));
            }
        }
    }
    let list = |cells: Vec<String>, f: &str| {
        cells
            .iter()
            .map(|n| format!("{n}.{f}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    s += &format!(
        "  gamma S : {}\n",
        list((0..a).map(|x| c(x, 0)).collect(), "S")
    );
    s += &format!(
        "  gamma N : {}\n",
        list((0..a).rev().map(|x| c(x, b - 1)).collect(), "N")
    );
    s += &format!(
        "  gamma W : {}\n",
        list((0..b).rev().map(|y| c(0, y)).collect(), "W")
    );
    s += &format!(
        "  gamma E : {}\n",
        list((0..b).map(|y| c(a - 1, y)).collect(), "E")
    );
    let path = |cells: Vec<String>| cells.join(" ");
    let center = c(cx, cy);
    s += &format!(
        "  network center {center} branch S : {} port {}.S\n",
        path((0..cy).rev().map(|y| c(cx, y)).collect()),
        c(cx, 0)
    );
    s += &format!(
        "  network center {center} branch N : {} port {}.N\n",
        path((cy + 1..b).map(|y| c(cx, y)).collect()),
        c(cx, b - 1)
    );
    s += &format!(
        "  network center {center} branch W : {} port {}.W\n",
        path((0..cx).rev().map(|x| c(x, cy)).collect()),
        c(0, cy)
    );
    s += &format!(
        "  network center {center} branch E : {} port {}.E\n",
        path((cx + 1..a).map(|x| c(x, cy)).collect()),
        c(a - 1, cy)
    );
    let rev = |n: usize| {
        (1..=n)
            .map(|i| format!("{i}:{}", n + 1 - i))
            .collect::<Vec<_>>()
            .join(" ")
    };
    s += &format!("macroadj (r,S) ~ (r,N) map {}\n", rev(a));
    s += &format!("macroadj (r,N) ~ (r,S) map {}\n", rev(a));
    s += &format!("macroadj (r,W) ~ (r,E) map {}\n", rev(b));
    s += &format!("macroadj (r,E) ~ (r,W) map {}\n", rev(b));
    s += "consistent true\n";
    s
}

fn system() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (3usize..5, 3usize..5).prop_flat_map(|(a, b)| (Just(a), Just(b), 1..a - 1, 1..b - 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn generated_systems_stay_within_bounds_and_self_simulate((a, b, cx, cy) in system()) {
        let doc = parse_spec(&rect_spec(a, b, cx, cy)).unwrap();
        prop_assert_eq!(&parse_spec(&print_spec(&doc)).unwrap(), &doc);
        let layout = Layout::from_document(&doc).unwrap();

        // each internal facet class shows up on exactly two slots
        let m = layout.numbering.m();
        let mut seen = vec![0; m + 1];
        for j in layout.tile_ids() {
            for c in &layout.info(j).classes {
                if let FacetClass::Internal(f) = c {
                    seen[f.0 as usize] += 1;
                }
            }
        }
        prop_assert!(seen[1..].iter().all(|&n| n == 2));

        let (tau, trace) = generate_tileset_traced(&layout);
        prop_assert!(trace.sizes.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(tau.tiles().all(|t| !t.has_undefined()));
        let report = exact_count(tau.len(), &CountParams::from_layout(&layout));
        prop_assert!(report.is_ok(), "{:?}", report);

        let instances = enumerate_macro_tiles(&layout, &tau);
        let sim = verify_instances(&layout, &tau, &instances).unwrap();
        prop_assert!(sim.condition1(), "{}", sim);
        prop_assert!(sim.condition3(), "{}", sim);

        let table = PhaseTable::new(&layout).unwrap();
        prop_assert_eq!((table.width, table.height), (a, b));
    }
}

#[test]
fn bundled_grid_is_the_three_by_three_case() {
    let a = parse_spec(&rect_spec(3, 3, 1, 1)).unwrap();
    let b = sofic_core::examples::square3x3();
    let (ta, tb) = (&a.system.rules[0].template, &b.system.rules[0].template);
    assert_eq!(ta.cells, tb.cells);
    let mut pa = ta.pairings.clone();
    let mut pb = tb.pairings.clone();
    pa.sort();
    pb.sort();
    assert_eq!(pa, pb);
    assert_eq!(a.system.rules[0].gamma, b.system.rules[0].gamma);
    assert_eq!(a.networks.first, b.networks.first);
}
