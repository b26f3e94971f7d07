//! SVG export of a net in millimetres.
//!
//! Coordinates are written in layout units and mapped to paper by a single
//! group transform, so every vertex in the file is the layout value itself.

use std::fmt::Write;

use foldnet_core::mesh::{HalfEdgeId, HalfEdgeMesh};
use foldnet_core::unfold::{Layout2D, UnfoldTree};

/// Paper margin around the net, in millimetres.
pub const MARGIN_MM: f64 = 5.0;

/// Maps layout coordinates to SVG user units (mm) with y pointing down.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgTransform {
    pub scale: f64,
    pub tx: f64,
    pub ty: f64,
}

impl SvgTransform {
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.scale * x + self.tx, -self.scale * y + self.ty)
    }
}

fn bounds(layout: &Layout2D) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in layout.points() {
        b = (b.0.min(p.x), b.1.min(p.y), b.2.max(p.x), b.3.max(p.y));
    }
    if b.0 > b.2 {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        b
    }
}

pub fn transform_for(layout: &Layout2D, scale: f64) -> (SvgTransform, f64, f64) {
    let (x0, y0, x1, y1) = bounds(layout);
    let t = SvgTransform {
        scale,
        tx: MARGIN_MM - scale * x0,
        ty: MARGIN_MM + scale * y1,
    };
    let width = scale * (x1 - x0) + 2.0 * MARGIN_MM;
    let height = scale * (y1 - y0) + 2.0 * MARGIN_MM;
    (t, width, height)
}

fn is_hinge(mesh: &HalfEdgeMesh, tree: &UnfoldTree, h: HalfEdgeId) -> bool {
    tree.hinge(h.face()) == Some(h)
        || mesh
            .twin(h)
            .is_some_and(|t| tree.hinge(t.face()) == Some(t))
}

/// One polygon per face, cut and boundary edges solid, fold edges dashed
/// (drawn once, from the child face).
pub fn render_svg(mesh: &HalfEdgeMesh, tree: &UnfoldTree, layout: &Layout2D, scale: f64) -> String {
    let (t, width, height) = transform_for(layout, scale);
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}mm" height="{height}mm" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        r#"<g transform="matrix({} 0 0 {} {} {})">"#,
        t.scale, -t.scale, t.tx, t.ty
    );

    let _ = writeln!(s, r##"<g id="faces" fill="#f2efe6" stroke="none">"##);
    for (f, tri) in layout.iter() {
        let _ = writeln!(
            s,
            r#"<polygon data-face="{}" points="{},{} {},{} {},{}"/>"#,
            f.index(),
            tri[0].x,
            tri[0].y,
            tri[1].x,
            tri[1].y,
            tri[2].x,
            tri[2].y
        );
    }
    let _ = writeln!(s, "</g>");

    let mut cuts = String::new();
    let mut folds = String::new();
    for (f, tri) in layout.iter() {
        for corner in 0..3 {
            let h = HalfEdgeId::of(f, corner);
            let (a, b) = (tri[corner], tri[(corner + 1) % 3]);
            let line = format!(r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#, a.x, a.y, b.x, b.y);
            if !is_hinge(mesh, tree, h) {
                let _ = writeln!(cuts, "{line}");
            } else if tree.hinge(f) == Some(h) {
                let _ = writeln!(folds, "{line}");
            }
        }
    }
    let _ = writeln!(
        s,
        r#"<g id="cuts" stroke="black" stroke-width="0.3" vector-effect="non-scaling-stroke" stroke-linecap="round">"#
    );
    s.push_str(&cuts);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<g id="folds" stroke="black" stroke-width="0.2" stroke-dasharray="2 1" vector-effect="non-scaling-stroke">"#
    );
    s.push_str(&folds);
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}
