use nalgebra::{Point2, Point3, Vector2};

use super::UnfoldTree;
use crate::mesh::{FaceId, HalfEdgeId, HalfEdgeMesh};

/// Planar triangle, corners in the face's corner order.
pub type Tri = [Point2<f64>; 3];

/// Planar placement of every tree face.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout2D {
    tris: Vec<Option<Tri>>,
}

impl Layout2D {
    pub fn with_capacity(faces: usize) -> Self {
        Self {
            tris: vec![None; faces],
        }
    }

    /// Builds a layout from explicit triangles, for synthetic tests.
    pub fn from_triangles(tris: Vec<Tri>) -> Self {
        Self {
            tris: tris.into_iter().map(Some).collect(),
        }
    }

    pub fn get(&self, f: FaceId) -> Option<&Tri> {
        self.tris.get(f.index()).and_then(Option::as_ref)
    }

    pub fn set(&mut self, f: FaceId, tri: Tri) {
        if self.tris.len() <= f.index() {
            self.tris.resize(f.index() + 1, None);
        }
        self.tris[f.index()] = Some(tri);
    }

    pub fn clear(&mut self, f: FaceId) {
        if let Some(t) = self.tris.get_mut(f.index()) {
            *t = None;
        }
    }

    /// Placed faces with their triangles, in id order.
    pub fn iter(&self) -> impl Iterator<Item = (FaceId, &Tri)> + '_ {
        self.tris
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.as_ref().map(|t| (FaceId::from_index(i), t)))
    }

    pub fn len(&self) -> usize {
        self.tris.iter().filter(|t| t.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = Point2<f64>> + '_ {
        self.iter().flat_map(|(_, t)| t.iter().copied())
    }

    /// Sum of unsigned triangle areas.
    pub fn total_area(&self) -> f64 {
        self.iter().map(|(_, t)| tri_area(t).abs()).sum()
    }
}

/// Signed area, positive for counter-clockwise corners.
pub fn tri_area(t: &Tri) -> f64 {
    0.5 * (t[1] - t[0]).perp(&(t[2] - t[0]))
}

/// Third corner of a triangle with 3D corners `a`, `b`, `c`, given the 2D
/// images of `a` and `b`; `c` lands to the left of `a -> b`.
fn third_point(a2: Point2<f64>, b2: Point2<f64>, a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> Point2<f64> {
    let e = b - a;
    let w = c - a;
    let len2 = e.norm_squared();
    let along = w.dot(&e) / len2;
    let across = w.cross(&e).norm() / len2;
    let e2 = b2 - a2;
    let perp = Vector2::new(-e2.y, e2.x);
    a2 + e2 * along + perp * across
}

/// Canonical placement of a root face: corner 0 at the origin, corner 1 on
/// the positive x axis.
pub fn place_root(mesh: &HalfEdgeMesh, f: FaceId) -> Tri {
    let [a, b, c] = mesh.face_points(f);
    let a2 = Point2::origin();
    let b2 = Point2::new((b - a).norm(), 0.0);
    [a2, b2, third_point(a2, b2, &a, &b, &c)]
}

/// Placement of the face owning `hinge` when the face across the hinge sits
/// at `parent`. The hinge endpoints are copied from `parent` bit for bit.
pub fn place_child(mesh: &HalfEdgeMesh, hinge: HalfEdgeId, parent_side: HalfEdgeId, parent: &Tri) -> Tri {
    let j = parent_side.corner();
    // the hinge runs origin -> destination in the child and the other way in the parent
    let a2 = parent[(j + 1) % 3];
    let b2 = parent[j];
    let i = hinge.corner();
    let pts = mesh.face_points(hinge.face());
    let (a, b, c) = (pts[i], pts[(i + 1) % 3], pts[(i + 2) % 3]);
    let mut out = [Point2::origin(); 3];
    out[i] = a2;
    out[(i + 1) % 3] = b2;
    out[(i + 2) % 3] = third_point(a2, b2, &a, &b, &c);
    out
}

/// Lays out the whole tree in one preorder pass from the root.
pub fn layout(mesh: &HalfEdgeMesh, tree: &UnfoldTree) -> Layout2D {
    let mut out = Layout2D::with_capacity(mesh.face_capacity());
    out.set(tree.root(), place_root(mesh, tree.root()));
    place_descendants(mesh, tree, &mut out, tree.root());
    out
}

fn place_descendants(mesh: &HalfEdgeMesh, tree: &UnfoldTree, out: &mut Layout2D, top: FaceId) {
    let mut stack: Vec<FaceId> = tree.children(top).to_vec();
    while let Some(f) = stack.pop() {
        let (c, p) = tree.hinge_pair(f).expect("non-root face has a hinge");
        let parent = *out.get(p.face()).expect("parent placed before child");
        out.set(f, place_child(mesh, c, p, &parent));
        stack.extend_from_slice(tree.children(f));
    }
}

/// Recomputes the placements of the given faces and all their descendants
/// from their (unchanged) parents. A root among them is placed canonically.
pub fn update_subtrees(mesh: &HalfEdgeMesh, tree: &UnfoldTree, layout: &mut Layout2D, faces: &[FaceId]) {
    let mut marked = vec![false; tree.face_slots()];
    for &f in faces {
        marked[f.index()] = true;
    }
    // only the topmost marked faces need a walk
    for &f in faces {
        let shadowed = tree.path_to_root(f)[1..].iter().any(|a| marked[a.index()]);
        if shadowed {
            continue;
        }
        match tree.hinge_pair(f) {
            None => layout.set(f, place_root(mesh, f)),
            Some((c, p)) => {
                let parent = *layout.get(p.face()).expect("parent placed");
                layout.set(f, place_child(mesh, c, p, &parent));
            }
        }
        place_descendants(mesh, tree, layout, f);
    }
}

/// Placement the subtree of `face` would get if hinged through `hinge`
/// (a halfedge of `face`) to the face across it, without touching `layout`.
pub fn place_subtree_into(
    mesh: &HalfEdgeMesh,
    tree: &UnfoldTree,
    layout: &Layout2D,
    face: FaceId,
    hinge: HalfEdgeId,
    out: &mut Vec<(FaceId, Tri)>,
) {
    out.clear();
    let p = mesh.twin(hinge).expect("hinge is interior");
    let parent = layout.get(p.face()).expect("new parent placed");
    out.push((face, place_child(mesh, hinge, p, parent)));
    let mut i = 0;
    while i < out.len() {
        let (f, tri) = out[i];
        for &c in tree.children(f) {
            let (cs, ps) = tree.hinge_pair(c).unwrap();
            out.push((c, place_child(mesh, cs, ps, &tri)));
        }
        i += 1;
    }
}

/// Largest relative difference between a 2D side length and the matching
/// 3D edge length over all placed faces.
pub fn max_edge_length_error(mesh: &HalfEdgeMesh, layout: &Layout2D) -> f64 {
    let mut worst: f64 = 0.0;
    for (f, t) in layout.iter() {
        let p = mesh.face_points(f);
        for i in 0..3 {
            let l3 = (p[(i + 1) % 3] - p[i]).norm();
            let l2 = (t[(i + 1) % 3] - t[i]).norm();
            worst = worst.max((l2 - l3).abs() / l3);
        }
    }
    worst
}

/// Whether every hinge's endpoints are bit-identical in child and parent.
pub fn hinges_coincide(tree: &UnfoldTree, layout: &Layout2D) -> bool {
    tree.faces().all(|f| match tree.hinge_pair(f) {
        None => true,
        Some((c, p)) => {
            let (Some(ct), Some(pt)) = (layout.get(f), layout.get(p.face())) else {
                return false;
            };
            let (i, j) = (c.corner(), p.corner());
            ct[i] == pt[(j + 1) % 3] && ct[(i + 1) % 3] == pt[j]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;

    #[test]
    fn root_is_canonical() {
        let mesh = shapes::cube();
        let t = place_root(&mesh, FaceId(0));
        assert_eq!(t[0], Point2::origin());
        assert_eq!(t[1].y, 0.0);
        assert!(t[1].x > 0.0);
        assert!(tri_area(&t) > 0.0);
    }

    #[test]
    fn tetrahedron_star_net_is_a_big_triangle() {
        let mesh = shapes::tetrahedron();
        // hinge every face to face 0
        let hinges: Vec<_> = (0..3).map(|i| HalfEdgeId::of(FaceId(0), i)).collect();
        let tree = UnfoldTree::from_hinges(&mesh, FaceId(0), &hinges).unwrap();
        let l = layout(&mesh, &tree);
        assert!((l.total_area() - 3f64.sqrt()).abs() < 1e-12);
        // the three outer corners are pairwise 2 apart
        let outer: Vec<Point2<f64>> = (1..4)
            .map(|f| {
                let h = tree.hinge(FaceId(f)).unwrap();
                l.get(FaceId(f)).unwrap()[(h.corner() + 2) % 3]
            })
            .collect();
        for i in 0..3 {
            let d = (outer[i] - outer[(i + 1) % 3]).norm();
            assert!((d - 2.0).abs() < 1e-12, "{d}");
        }
        assert!(hinges_coincide(&tree, &l));
    }

    #[test]
    fn layout_is_isometric() {
        let mesh = shapes::icosphere(2);
        let tree = UnfoldTree::breadth_first(&mesh, FaceId(7)).unwrap();
        let l = layout(&mesh, &tree);
        assert!(max_edge_length_error(&mesh, &l) < 1e-9);
        assert!(hinges_coincide(&tree, &l));
        assert!((l.total_area() - mesh.surface_area()).abs() < 1e-9 * mesh.surface_area());
        assert!(l.iter().all(|(_, t)| tri_area(t) > 0.0));
    }

    #[test]
    fn subtree_update_matches_full_layout() {
        let mesh = shapes::icosphere(1);
        let mut tree = UnfoldTree::breadth_first(&mesh, FaceId(0)).unwrap();
        let mut l = layout(&mesh, &tree);
        let leaf = tree.faces().find(|&f| tree.children(f).is_empty()).unwrap();
        let p = tree.parent(leaf).unwrap();
        let other = mesh.face_neighbors(leaf).into_iter().flatten().find(|&g| g != p).unwrap();
        tree.apply_move(&mesh, leaf, other).unwrap();
        let mut scratch = Vec::new();
        place_subtree_into(&mesh, &tree, &l, leaf, tree.hinge(leaf).unwrap(), &mut scratch);
        update_subtrees(&mesh, &tree, &mut l, &[leaf]);
        assert_eq!(scratch, vec![(leaf, *l.get(leaf).unwrap())]);
        assert_eq!(l, layout(&mesh, &tree));
    }
}
