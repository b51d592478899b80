//! SVG pictures of square-grid tiles and patches. Each facet shows its
//! triple as `f j g` along the matching side, internal facets by their bare
//! number and an absent parent-index as `0`.

use std::fmt::Write as _;

use crate::assembler::{check_square, GridPatch, E, N, S, W};
use crate::error::{Error, Result};
use crate::layout::Layout;
use crate::numbering::FacetClass;
use crate::tileset::{DecoratedTile, Triple};

const CELL: usize = 120;
const MARGIN: usize = 10;

fn class_label(c: FacetClass) -> String {
    match c {
        FacetClass::Internal(i) => i.0.to_string(),
        other => other.to_string(),
    }
}

/// The `f j g` label of a triple.
pub fn triple_label(t: &Triple) -> String {
    format!(
        "{} {} {}",
        class_label(t.f),
        t.j.map_or(0, |j| j.0),
        class_label(t.g)
    )
}

/// Renders a patch; empty cells leave only the grid.
pub fn render_patch_svg(layout: &Layout, patch: &GridPatch) -> Result<String> {
    check_square(layout)?;
    if patch.cells.iter().flatten().any(|t| t.triples.len() != 4) {
        return Err(Error::NonSquareSystem);
    }
    let w = patch.width * CELL + 2 * MARGIN;
    let h = patch.height * CELL + 2 * MARGIN;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="monospace" font-size="13">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    )
    .unwrap();
    for y in 0..patch.height {
        for x in 0..patch.width {
            let left = MARGIN + x * CELL;
            let top = MARGIN + (patch.height - 1 - y) * CELL;
            writeln!(
                out,
                r#"<rect x="{left}" y="{top}" width="{CELL}" height="{CELL}" fill="none" stroke="black" stroke-width="1"/>"#
            )
            .unwrap();
            if let Some(t) = patch.get(x, y) {
                write_tile(&mut out, t, left, top);
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Renders one tile as a 1×1 patch.
pub fn render_tile_svg(layout: &Layout, tile: &DecoratedTile) -> Result<String> {
    let mut p = GridPatch::empty(1, 1);
    p.set(0, 0, Some(tile.clone()));
    render_patch_svg(layout, &p)
}

fn write_tile(out: &mut String, t: &DecoratedTile, left: usize, top: usize) {
    let mid = CELL / 2;
    let (cx, cy) = (left + mid, top + mid);
    let weight = if t.central {
        r#" font-weight="bold""#
    } else {
        ""
    };
    writeln!(
        out,
        r#"<text x="{cx}" y="{}" text-anchor="middle" font-size="16"{weight}>{}</text>"#,
        cy + 5,
        t.base
    )
    .unwrap();
    let sides = [
        (S, cx, top + CELL - 8, 0),
        (N, cx, top + 18, 0),
        (W, left + 18, cy, -90),
        (E, left + CELL - 8, cy, 90),
    ];
    for (k, x, y, angle) in sides {
        let label = triple_label(&t.triples[k]);
        if angle == 0 {
            writeln!(
                out,
                r#"<text x="{x}" y="{y}" text-anchor="middle">{label}</text>"#
            )
            .unwrap();
        } else {
            writeln!(
                out,
                r#"<text x="{x}" y="{y}" text-anchor="middle" transform="rotate({angle} {x} {y})">{label}</text>"#
            )
            .unwrap();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::square3x3;
    use crate::numbering::TileId;
    use crate::tileset::decorate_base;

    fn layout() -> Layout {
        Layout::from_document(&square3x3()).unwrap()
    }

    #[test]
    fn t1_under_parent_one() {
        let l = layout();
        let t1 = decorate_base(&l)
            .into_iter()
            .find(|t| t.base == TileId(1) && t.triples[N].j == Some(TileId(1)))
            .unwrap();
        let svg = render_tile_svg(&l, &t1).unwrap();
        for label in [">m 0 m<", ">3 1 3<", ">1 1 1<"] {
            assert!(svg.contains(label), "missing {label}");
        }
        assert_eq!(svg, render_tile_svg(&l, &t1).unwrap());
    }

    #[test]
    fn empty_patch_is_a_bare_grid() {
        let svg = render_patch_svg(&layout(), &GridPatch::empty(2, 2)).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<rect").count(), 5);
        assert!(!svg.contains("<text"));
    }

    #[test]
    fn wrong_arity_is_refused() {
        let mut p = GridPatch::empty(1, 1);
        p.set(
            0,
            0,
            Some(DecoratedTile {
                base: TileId(1),
                triples: vec![Triple::UNDEFINED; 3],
                central: false,
            }),
        );
        assert!(matches!(
            render_patch_svg(&layout(), &p),
            Err(Error::NonSquareSystem)
        ));
    }
}
