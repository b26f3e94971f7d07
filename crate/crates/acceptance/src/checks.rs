//! Geometric checks on nets, written against the public mesh accessors only.

use foldnet_core::mesh::{HalfEdgeId, HalfEdgeMesh};
use foldnet_core::unfold::{Layout2D, UnfoldTree};

/// Largest relative difference between a 3D edge length and its 2D image,
/// over every edge of every laid-out face.
pub fn isometry_error(mesh: &HalfEdgeMesh, layout: &Layout2D) -> f64 {
    let mut worst: f64 = 0.0;
    for (f, tri) in layout.iter() {
        let p = mesh.face_points(f);
        for i in 0..3 {
            let j = (i + 1) % 3;
            let l3 = (p[j] - p[i]).norm();
            let l2 = (tri[j] - tri[i]).norm();
            worst = worst.max((l3 - l2).abs() / l3.max(f64::MIN_POSITIVE));
        }
    }
    worst
}

/// Every hinge's two endpoints are the same `f64` values in child and parent.
pub fn hinges_bit_equal(mesh: &HalfEdgeMesh, tree: &UnfoldTree, layout: &Layout2D) -> bool {
    tree.faces().all(|f| {
        let Some(parent) = tree.parent(f) else {
            return true;
        };
        let h = tree.hinge(f).expect("non-root face has a hinge");
        let t = mesh.twin(h).expect("hinge is interior");
        if t.face() != parent {
            return false;
        }
        let (Some(c), Some(p)) = (layout.get(f), layout.get(parent)) else {
            return false;
        };
        let (i, j) = (h.corner(), t.corner());
        let same = |a: nalgebra::Point2<f64>, b: nalgebra::Point2<f64>| {
            a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits()
        };
        same(c[i], p[(j + 1) % 3]) && same(c[(i + 1) % 3], p[j])
    })
}

/// The tree holds exactly the live faces and every hinge is a mesh edge
/// between a face and its parent.
pub fn tree_spans_mesh(mesh: &HalfEdgeMesh, tree: &UnfoldTree) -> bool {
    let mut faces: Vec<_> = tree.faces().collect();
    faces.sort_unstable();
    let live: Vec<_> = mesh.faces().collect();
    faces == live
        && faces.iter().all(|&f| match tree.parent(f) {
            None => f == tree.root(),
            Some(p) => tree
                .hinge(f)
                .is_some_and(|h: HalfEdgeId| h.face() == f && mesh.opposite_face(h) == Some(p)),
        })
}

/// Largest change of any pairwise corner distance between two layouts of
/// the same faces.
pub fn max_distance_change(a: &Layout2D, b: &Layout2D) -> f64 {
    let pa: Vec<_> = a.iter().flat_map(|(_, t)| *t).collect();
    let pb: Vec<_> = b.iter().flat_map(|(_, t)| *t).collect();
    assert_eq!(pa.len(), pb.len());
    let mut worst: f64 = 0.0;
    for i in 0..pa.len() {
        for j in i + 1..pa.len() {
            worst = worst.max(((pa[i] - pa[j]).norm() - (pb[i] - pb[j]).norm()).abs());
        }
    }
    worst
}
