use std::path::PathBuf;

use sofic_core::examples::square3x3;
use sofic_core::{
    enumerate_macro_tiles, generate_tileset, render_patch_svg, GridPatch, Layout, PhaseTable,
};

fn instance_svg() -> String {
    let layout = Layout::from_document(&square3x3()).unwrap();
    let tau = generate_tileset(&layout);
    let q = &enumerate_macro_tiles(&layout, &tau)[0];
    let table = PhaseTable::new(&layout).unwrap();
    let mut grid = GridPatch::empty(3, 3);
    for (c, t) in q.assignment.iter().enumerate() {
        let (x, y) = table.positions[c];
        grid.set(x, y, Some(t.clone()));
    }
    render_patch_svg(&layout, &grid).unwrap()
}

#[test]
fn nine_cells_in_row_order() {
    let svg = instance_svg();
    // T1 bottom-left, rows upwards: T_{3·row+col+1} at column col
    for row in 0..3 {
        for col in 0..3 {
            let j = 3 * row + col + 1;
            let x = 10 + col * 120 + 60;
            let y = 10 + (2 - row) * 120 + 65;
            let weight = if j == 5 { r#" font-weight="bold""# } else { "" };
            let label = format!(
                r#"<text x="{x}" y="{y}" text-anchor="middle" font-size="16"{weight}>T{j}</text>"#
            );
            assert!(svg.contains(&label), "missing {label}");
        }
    }
}

#[test]
fn instance_matches_golden_file() {
    let svg = instance_svg();
    assert_eq!(svg, instance_svg());
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/instance0.svg");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    assert_eq!(std::fs::read_to_string(&path).unwrap(), svg);
}
