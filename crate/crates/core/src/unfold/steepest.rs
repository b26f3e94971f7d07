use nalgebra::Vector3;
use rand::Rng;

use super::UnfoldTree;
use crate::mesh::{FaceId, HalfEdgeId, HalfEdgeMesh, VertexId};

const REDRAWS: usize = 8;

/// Uniform random direction by rejection from the unit ball.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v: Vector3<f64> = Vector3::new(
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
            rng.random_range(-1.0..=1.0),
        );
        let n2 = v.norm_squared();
        if n2 > 1e-6 && n2 <= 1.0 {
            return v / n2.sqrt();
        }
    }
}

/// `|c . e|` for the unit direction `e` of edge `h`.
pub fn steepness(mesh: &HalfEdgeMesh, h: HalfEdgeId, c: &Vector3<f64>) -> f64 {
    let e = mesh.edge_vector(h);
    let len = e.norm();
    if len == 0.0 {
        0.0
    } else {
        (c.dot(&e) / len).abs()
    }
}

fn steepness_is_degenerate(mesh: &HalfEdgeMesh, c: &Vector3<f64>) -> bool {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for e in mesh.edges() {
        let s = steepness(mesh, e, c);
        lo = lo.min(s);
        hi = hi.max(s);
    }
    hi - lo <= 1e-12
}

/// Steepest-edge initial tree with a random objective direction. The
/// direction is redrawn (at most 8 times) while all edges are equally steep.
pub fn initial_unfold_tree<R: Rng + ?Sized>(mesh: &HalfEdgeMesh, rng: &mut R) -> UnfoldTree {
    let mut c = random_unit_vector(rng);
    for _ in 0..REDRAWS {
        if !steepness_is_degenerate(mesh, &c) {
            break;
        }
        c = random_unit_vector(rng);
    }
    steepest_edge_tree(mesh, &c)
}

/// Minimum-steepness spanning tree of the dual graph (Kruskal over
/// `(steepness, edge id)`, a strict total order, so the tree is unique),
/// rooted at the lowest face around the highest endpoint of the steepest
/// cut edge.
pub fn steepest_edge_tree(mesh: &HalfEdgeMesh, c: &Vector3<f64>) -> UnfoldTree {
    let mut edges: Vec<(f64, HalfEdgeId)> = mesh
        .edges()
        .filter(|&e| !mesh.is_boundary_edge(e))
        .map(|e| (steepness(mesh, e, c), e))
        .collect();
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut parent: Vec<usize> = (0..mesh.face_capacity()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut hinges = Vec::with_capacity(mesh.face_count().saturating_sub(1));
    for &(_, e) in &edges {
        let f = e.face().index();
        let g = mesh.opposite_face(e).unwrap().index();
        let (rf, rg) = (find(&mut parent, f), find(&mut parent, g));
        if rf != rg {
            parent[rf] = rg;
            hinges.push(e);
        }
    }
    hinges.sort_unstable();

    let steepest_cut = mesh
        .edges()
        .filter(|e| hinges.binary_search(e).is_err())
        .map(|e| (steepness(mesh, e, c), e))
        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let root = match steepest_cut {
        Some((_, e)) => {
            lowest_face_at(mesh, highest([mesh.origin(e), mesh.destination(e)], mesh, c))
        }
        None => mesh.faces().next().expect("mesh has faces"),
    };
    UnfoldTree::from_hinges(mesh, root, &hinges).expect("dual graph is connected")
}

fn highest(vs: [VertexId; 2], mesh: &HalfEdgeMesh, c: &Vector3<f64>) -> VertexId {
    let h = |v: VertexId| c.dot(&mesh.position(v).coords);
    let (a, b) = (vs[0].min(vs[1]), vs[0].max(vs[1]));
    if h(b) > h(a) {
        b
    } else {
        a
    }
}

fn lowest_face_at(mesh: &HalfEdgeMesh, v: VertexId) -> FaceId {
    mesh.vertex_faces(v).into_iter().min().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::shapes;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Union-find check that the cut edges form a forest over the vertices
    /// and report its cycle rank.
    fn cut_graph_stats(mesh: &HalfEdgeMesh, tree: &UnfoldTree) -> (usize, usize, usize) {
        let cut = tree.cut_edges(mesh);
        let mut p: Vec<usize> = (0..mesh.vertex_capacity()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                x = p[x];
            }
            x
        }
        let mut touched = vec![false; mesh.vertex_capacity()];
        for &e in &cut {
            let (a, b) = (mesh.origin(e).index(), mesh.destination(e).index());
            touched[a] = true;
            touched[b] = true;
            let (ra, rb) = (find(&mut p, a), find(&mut p, b));
            p[ra] = rb;
        }
        let comps = mesh
            .vertices()
            .filter(|v| touched[v.index()])
            .map(|v| find(&mut p, v.index()))
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        let covered = touched.iter().filter(|t| **t).count();
        (cut.len(), covered, comps)
    }

    #[test]
    fn tetrahedron_cuts_three_edges() {
        let mesh = shapes::tetrahedron();
        let tree = initial_unfold_tree(&mesh, &mut ChaCha8Rng::seed_from_u64(1));
        tree.check(&mesh).unwrap();
        assert_eq!(tree.cut_edges(&mesh).len(), 3);
    }

    #[test]
    fn genus_zero_cut_graph_is_a_spanning_tree() {
        let mesh = shapes::icosphere(2);
        for seed in 0..5 {
            let tree = initial_unfold_tree(&mesh, &mut ChaCha8Rng::seed_from_u64(seed));
            tree.check(&mesh).unwrap();
            let (cut, covered, comps) = cut_graph_stats(&mesh, &tree);
            assert_eq!(cut, mesh.edge_count() - mesh.face_count() + 1);
            assert_eq!(covered, mesh.vertex_count());
            assert_eq!(comps, 1);
            // a connected graph with V - 1 edges is a tree
            assert_eq!(cut, mesh.vertex_count() - 1);
        }
    }

    #[test]
    fn torus_cut_graph_has_cycle_rank_two() {
        let mesh = shapes::grid_torus(16, 16, 2.0, 0.7);
        let tree = initial_unfold_tree(&mesh, &mut ChaCha8Rng::seed_from_u64(3));
        let (cut, covered, comps) = cut_graph_stats(&mesh, &tree);
        assert_eq!(covered, mesh.vertex_count());
        assert_eq!(cut + comps - covered, 2);
    }

    #[test]
    fn hinges_prefer_flat_edges() {
        // with c along z, every horizontal edge of the cube has steepness 0
        let mesh = shapes::cube();
        let c = Vector3::z();
        let tree = steepest_edge_tree(&mesh, &c);
        let hinge_steepness: f64 = tree.hinge_edges(&mesh).iter().map(|&e| steepness(&mesh, e, &c)).sum();
        // brute force over a few alternative trees never does better
        for root in mesh.faces() {
            let bfs = UnfoldTree::breadth_first(&mesh, root).unwrap();
            let s: f64 = bfs.hinge_edges(&mesh).iter().map(|&e| steepness(&mesh, e, &c)).sum();
            assert!(hinge_steepness <= s + 1e-12);
        }
    }

    #[test]
    fn root_touches_highest_vertex_of_steepest_cut() {
        let mesh = shapes::icosphere(1);
        let c = random_unit_vector(&mut ChaCha8Rng::seed_from_u64(9));
        let tree = steepest_edge_tree(&mesh, &c);
        let cut = tree.cut_edges(&mesh);
        let e = *cut
            .iter()
            .max_by(|a, b| steepness(&mesh, **a, &c).total_cmp(&steepness(&mesh, **b, &c)).then(b.cmp(a)))
            .unwrap();
        let top = highest([mesh.origin(e), mesh.destination(e)], &mesh, &c);
        assert_eq!(tree.root(), lowest_face_at(&mesh, top));
    }

    #[test]
    fn same_seed_same_tree() {
        let mesh = shapes::icosphere(2);
        let a = initial_unfold_tree(&mesh, &mut ChaCha8Rng::seed_from_u64(42));
        let b = initial_unfold_tree(&mesh, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }
}
