//! Exact rational triangle overlap: clip one triangle by the other and test
//! whether the intersection has positive area.

use std::collections::BTreeSet;

use num::{BigRational, Signed, Zero};

use foldnet_core::mesh::FaceId;
use foldnet_core::unfold::{Layout2D, Tri};

type Q = BigRational;

fn q(x: f64) -> Q {
    Q::from_float(x).expect("finite coordinate")
}

fn cross(o: &(Q, Q), a: &(Q, Q), b: &(Q, Q)) -> Q {
    (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
}

fn twice_area(poly: &[(Q, Q)]) -> Q {
    let mut s = Q::zero();
    for i in 0..poly.len() {
        let (a, b) = (&poly[i], &poly[(i + 1) % poly.len()]);
        s += &a.0 * &b.1 - &a.1 * &b.0;
    }
    s
}

fn to_exact(t: &Tri) -> Vec<(Q, Q)> {
    let mut v: Vec<(Q, Q)> = t.iter().map(|p| (q(p.x), q(p.y))).collect();
    if twice_area(&v).is_negative() {
        v.reverse();
    }
    v
}

/// Keeps the part of `poly` left of (or on) the directed line `a -> b`.
fn clip(poly: &[(Q, Q)], a: &(Q, Q), b: &(Q, Q)) -> Vec<(Q, Q)> {
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (p, r) = (&poly[i], &poly[(i + 1) % poly.len()]);
        let (sp, sr) = (cross(a, b, p), cross(a, b, r));
        if !sp.is_negative() {
            out.push(p.clone());
        }
        if (sp.is_positive() && sr.is_negative()) || (sp.is_negative() && sr.is_positive()) {
            let t = &sp / (&sp - &sr);
            out.push((&p.0 + &t * (&r.0 - &p.0), &p.1 + &t * (&r.1 - &p.1)));
        }
    }
    out
}

/// Whether the interiors of two triangles intersect. Degenerate triangles
/// have no interior.
pub fn exact_overlap(a: &Tri, b: &Tri) -> bool {
    let (pa, pb) = (to_exact(a), to_exact(b));
    if twice_area(&pa).is_zero() || twice_area(&pb).is_zero() {
        return false;
    }
    let mut poly = pa;
    for i in 0..3 {
        poly = clip(&poly, &pb[i], &pb[(i + 1) % 3]);
        if poly.len() < 3 {
            return false;
        }
    }
    twice_area(&poly).is_positive()
}

/// All overlapping pairs `(lo, hi)` by exhaustive pairwise testing.
pub fn exact_overlaps(layout: &Layout2D) -> BTreeSet<(FaceId, FaceId)> {
    let items: Vec<(FaceId, Tri, [f64; 4])> = layout
        .iter()
        .map(|(f, t)| {
            let xs = t.map(|p| p.x);
            let ys = t.map(|p| p.y);
            let bb = [
                xs.iter().copied().fold(f64::INFINITY, f64::min),
                ys.iter().copied().fold(f64::INFINITY, f64::min),
                xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                ys.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            ];
            (f, *t, bb)
        })
        .collect();
    let mut out = BTreeSet::new();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let (fa, ta, ba) = &items[i];
            let (fb, tb, bb) = &items[j];
            // interiors cannot meet unless the open boxes do
            if ba[2] <= bb[0] || bb[2] <= ba[0] || ba[3] <= bb[1] || bb[3] <= ba[1] {
                continue;
            }
            if exact_overlap(ta, tb) {
                out.insert((*fa.min(fb), *fa.max(fb)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Point2;

    fn t(c: [(f64, f64); 3]) -> Tri {
        c.map(|(x, y)| Point2::new(x, y))
    }

    #[test]
    fn shared_edge_is_not_overlap() {
        let a = t([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let b = t([(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert!(!exact_overlap(&a, &b));
    }

    #[test]
    fn vertex_touch_is_not_overlap() {
        let a = t([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let b = t([(1.0, 0.0), (2.0, 0.0), (2.0, 1.0)]);
        assert!(!exact_overlap(&a, &b));
    }

    #[test]
    fn containment_and_crossing_overlap() {
        let a = t([(0.0, 0.0), (4.0, 0.0), (0.0, 4.0)]);
        assert!(exact_overlap(&a, &t([(1.0, 1.0), (1.5, 1.0), (1.0, 1.5)])));
        assert!(exact_overlap(&a, &t([(1.0, -1.0), (2.0, 5.0), (1.5, -1.0)])));
        // same triangle, opposite orientation
        assert!(exact_overlap(&a, &t([(0.0, 4.0), (4.0, 0.0), (0.0, 0.0)])));
    }

    #[test]
    fn slivers_and_degenerates() {
        let a = t([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert!(!exact_overlap(&a, &t([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])));
        // tip crossing an edge by one ulp still overlaps
        let eps = f64::EPSILON;
        assert!(exact_overlap(&a, &t([(0.25, -1.0), (0.75, -1.0), (0.5, eps)])));
        assert!(!exact_overlap(&a, &t([(0.25, -1.0), (0.75, -1.0), (0.5, 0.0)])));
    }
}
