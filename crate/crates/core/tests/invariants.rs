//! Property tests for the structural invariants of meshes, trees, layouts
//! and metrics.

use nalgebra::{Point2, Point3, Vector2, Vector3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use foldnet_core::decimate::{decimate_to, target_face_count, uncollapse_all, uncollapse_edge, CollapseStrategy};
use foldnet_core::mesh::{shapes, FaceId, HalfEdgeMesh};
use foldnet_core::metrics::{aspect_ratio, coverage, min_area_obb};
use foldnet_core::tabu::{apply_move_with_layout, tabu_capacity, Move, TabuList};
use foldnet_core::unfold::{
    count_overlaps, count_overlaps_brute_force, hinges_coincide, initial_unfold_tree, layout,
    max_edge_length_error, Layout2D, OverlapIndex, Tri, UnfoldTree,
};

fn bumpy_sphere(subdivisions: u32, a: f64, k: f64, stretch: f64) -> HalfEdgeMesh {
    shapes::mapped_sphere(subdivisions, move |p: Vector3<f64>| {
        let r = 1.0 + a * (k * p.x).sin() * (k * p.y + 0.3).cos();
        Point3::new(stretch * r * p.x, r * p.y, r * p.z)
    })
}

fn closed_mesh() -> impl Strategy<Value = HalfEdgeMesh> {
    prop_oneof![
        (1u32..3, 0.0..0.4f64, 1.0..5.0f64, 0.5..2.0f64).prop_map(|(s, a, k, st)| bumpy_sphere(s, a, k, st)),
        (5u32..14, 5u32..11, 1.5..3.0f64, 0.3..1.0f64).prop_map(|(nu, nv, big, small)| shapes::grid_torus(nu, nv, big, small)),
    ]
}

fn strategy() -> impl Strategy<Value = CollapseStrategy> {
    prop::sample::select(CollapseStrategy::ALL.to_vec())
}

/// Random legal moves: re-hinge a random face onto a random neighbour
/// outside its subtree.
fn random_moves(mesh: &HalfEdgeMesh, tree: &mut UnfoldTree, net: &mut Layout2D, rng: &mut ChaCha8Rng, n: usize) -> Vec<FaceId> {
    let faces: Vec<FaceId> = mesh.faces().collect();
    let mut moved = Vec::new();
    for _ in 0..n {
        let x = faces[rng.random_range(0..faces.len())];
        let Some(parent) = tree.parent(x) else { continue };
        let options: Vec<FaceId> = mesh
            .face_neighbors(x)
            .into_iter()
            .flatten()
            .filter(|&p| p != parent && !tree.is_in_subtree(p, x))
            .collect();
        if options.is_empty() {
            continue;
        }
        let p = options[rng.random_range(0..options.len())];
        let mv = Move {
            face: x,
            old_parent: parent,
            new_parent: p,
        };
        moved.extend(apply_move_with_layout(mesh, tree, net, &mv).unwrap());
    }
    moved.sort_unstable();
    moved.dedup();
    moved
}

fn soup(rng: &mut ChaCha8Rng, n: usize) -> Layout2D {
    let side = (n as f64).sqrt();
    let tris = (0..n)
        .map(|_| {
            let c = Point2::new(rng.random_range(0.0..side), rng.random_range(0.0..side));
            let s = rng.random_range(0.1..1.5);
            [0, 1, 2].map(|_| c + s * Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    Layout2D::from_triangles(tris)
}

/// One random triangle per cell of a grid, so nothing overlaps.
fn cell_soup(rng: &mut ChaCha8Rng, n: usize) -> Layout2D {
    let tris = (0..n)
        .map(|i| {
            let corner = Vector2::new((i % 7) as f64, (i / 7) as f64);
            [0, 1, 2].map(|_| Point2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)) + corner)
        })
        .collect();
    Layout2D::from_triangles(tris)
}

fn rigid(layout: &Layout2D, angle: f64, shift: Vector2<f64>) -> Layout2D {
    let (s, c) = angle.sin_cos();
    let tris: Vec<Tri> = layout
        .iter()
        .map(|(_, t)| t.map(|p| Point2::new(c * p.x - s * p.y, s * p.x + c * p.y) + shift))
        .collect();
    Layout2D::from_triangles(tris)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_characteristic_matches_genus(mesh in closed_mesh()) {
        let chi = mesh.vertex_count() as i64 - mesh.edge_count() as i64 + mesh.face_count() as i64;
        prop_assert_eq!(chi, 2 - 2 * mesh.surface_genus() as i64);
    }

    #[test]
    fn decimation_keeps_structure_and_uncollapse_restores_input(mesh in closed_mesh(), strat in strategy()) {
        let genus = mesh.surface_genus();
        let mut m = mesh.clone();
        let records = decimate_to(&mut m, target_face_count(mesh.face_count(), genus), strat);
        prop_assert!(m.check_invariants().is_ok());
        prop_assert_eq!(m.surface_genus(), genus);
        let mut last = m.face_count();
        for r in records.iter().rev() {
            uncollapse_edge(&mut m, r).unwrap();
            prop_assert!(m.check_invariants().is_ok());
            prop_assert!(m.face_count() > last);
            last = m.face_count();
        }
        prop_assert!(m.bit_identical(&mesh));

        let mut again = mesh.clone();
        let records = decimate_to(&mut again, 4, strat);
        uncollapse_all(&mut again, &records).unwrap();
        prop_assert!(again.bit_identical(&mesh));
    }

    #[test]
    fn moves_keep_tree_spanning_and_layout_isometric(mesh in closed_mesh(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tree = initial_unfold_tree(&mesh, &mut rng);
        let mut net = layout(&mesh, &tree);
        random_moves(&mesh, &mut tree, &mut net, &mut rng, 30);
        prop_assert!(tree.check(&mesh).is_ok());
        prop_assert!(hinges_coincide(&tree, &net));
        prop_assert!(max_edge_length_error(&mesh, &net) < 1e-9);
        prop_assert_eq!(&net, &layout(&mesh, &tree));
    }

    #[test]
    fn reroot_keeps_tree_and_placements(mesh in closed_mesh(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tree = initial_unfold_tree(&mesh, &mut rng);
        let net = layout(&mesh, &tree);
        let hinges = tree.hinge_edges(&mesh);
        let root = FaceId::from_index(rng.random_range(0..mesh.face_count()));
        tree.reroot(root).unwrap();
        prop_assert_eq!(tree.root(), root);
        prop_assert!(tree.check(&mesh).is_ok());
        prop_assert_eq!(tree.hinge_edges(&mesh), hinges);
        prop_assert!(hinges_coincide(&tree, &net));
    }

    #[test]
    fn grid_detection_matches_brute_force(seed in any::<u64>(), n in 2usize..200) {
        let net = soup(&mut ChaCha8Rng::seed_from_u64(seed), n);
        prop_assert_eq!(count_overlaps(&net), count_overlaps_brute_force(&net));
    }

    #[test]
    fn incremental_index_tracks_moves(mesh in closed_mesh(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tree = initial_unfold_tree(&mesh, &mut rng);
        let mut net = layout(&mesh, &tree);
        let mut index = OverlapIndex::from_layout(&net, true);
        for _ in 0..5 {
            let moved = random_moves(&mesh, &mut tree, &mut net, &mut rng, 3);
            index.update(&net, &moved);
            prop_assert_eq!(index.pairs(), &count_overlaps_brute_force(&net));
        }
    }

    #[test]
    fn obb_is_no_larger_than_axis_box_and_holds_all_points(seed in any::<u64>(), n in 3usize..60) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Point2<f64>> = (0..n)
            .map(|_| Point2::new(rng.random_range(-5.0..5.0), rng.random_range(-2.0..2.0)))
            .collect();
        let obb = min_area_obb(&pts).unwrap();
        let (lo, hi) = pts.iter().fold(
            (Point2::new(f64::INFINITY, f64::INFINITY), Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
            |(lo, hi), p| (lo.inf(p), hi.sup(p)),
        );
        let aabb = (hi.x - lo.x) * (hi.y - lo.y);
        prop_assert!(obb.area() <= aabb * (1.0 + 1e-12));
        prop_assert!(obb.aspect_ratio() >= 1.0);
        for p in &pts {
            prop_assert!(obb.contains(p, 1e-9));
        }
    }

    #[test]
    fn coverage_and_aspect_survive_rigid_motion(
        seed in any::<u64>(),
        angle in -3.2..3.2f64,
        dx in -100.0..100.0f64,
        dy in -100.0..100.0f64,
    ) {
        let net = cell_soup(&mut ChaCha8Rng::seed_from_u64(seed), 30);
        let moved = rigid(&net, angle, Vector2::new(dx, dy));
        let (c0, c1) = (coverage(&net).unwrap(), coverage(&moved).unwrap());
        let (a0, a1) = (aspect_ratio(&net).unwrap(), aspect_ratio(&moved).unwrap());
        prop_assert!(c0 > 0.0 && c0 <= 100.0 + 1e-9);
        prop_assert!((c0 - c1).abs() <= 1e-9 * c0);
        prop_assert!((a0 - a1).abs() <= 1e-9 * a0);
    }

    #[test]
    fn tabu_capacity_is_positive(faces in 1usize..1_000_000, valence in 1.0..12.0f64) {
        prop_assert!(tabu_capacity(faces, valence) >= 1);
    }

    #[test]
    fn tabu_list_never_exceeds_capacity(capacity in 1usize..20, pushes in prop::collection::vec((0u32..50, 0u32..50), 0..100)) {
        let mut list = TabuList::new(capacity);
        for (f, p) in pushes {
            list.push(FaceId(f), FaceId(p));
            prop_assert!(list.len() <= capacity);
            prop_assert!(list.is_tabu(FaceId(f), FaceId(p)));
        }
    }
}
