//! Test meshes and synthetic layouts.

use std::f64::consts::TAU;

use nalgebra::{Point2, Point3, Vector3};
use rand::Rng;

use foldnet_core::decimate::{decimate_to, CollapseStrategy};
use foldnet_core::mesh::{shapes, FaceId, HalfEdgeMesh};
use foldnet_core::unfold::{layout, Layout2D, Tri, UnfoldTree};

/// Platonic solids, three icospheres and a 512-face torus.
pub fn canonical() -> Vec<(String, HalfEdgeMesh)> {
    vec![
        ("tetrahedron".into(), shapes::tetrahedron()),
        ("cube".into(), shapes::cube()),
        ("octahedron".into(), shapes::octahedron()),
        ("icosahedron".into(), shapes::icosahedron()),
        ("icosphere-80".into(), shapes::icosphere(1)),
        ("icosphere-320".into(), shapes::icosphere(2)),
        ("icosphere-1280".into(), shapes::icosphere(3)),
        ("torus-512".into(), shapes::grid_torus(16, 16, 2.0, 0.7)),
    ]
}

/// Rebuilds the live part of a mesh with dense ids.
pub fn compact(mesh: &HalfEdgeMesh) -> HalfEdgeMesh {
    let (p, t) = mesh.to_triangles();
    HalfEdgeMesh::from_triangles(p, &t).expect("live part of a valid mesh")
}

/// Copy of `mesh` with every vertex moved by up to `amount` per axis,
/// which breaks the exact symmetries that make faces touch edge on edge.
pub fn jittered<R: Rng + ?Sized>(mesh: &HalfEdgeMesh, rng: &mut R, amount: f64) -> HalfEdgeMesh {
    let (mut p, t) = mesh.to_triangles();
    for q in &mut p {
        *q += Vector3::from_fn(|_, _| rng.random_range(-amount..amount));
    }
    HalfEdgeMesh::from_triangles(p, &t).expect("jitter keeps connectivity")
}

/// Icosphere with 5120 faces simplified to 2000.
pub fn icosphere_2000() -> HalfEdgeMesh {
    let mut m = shapes::icosphere(4);
    decimate_to(&mut m, 2000, CollapseStrategy::QUADRIC);
    compact(&m)
}

fn blob(a: f64, m: f64, n: f64, phase: f64, stretch: Vector3<f64>) -> impl Fn(Vector3<f64>) -> Point3<f64> {
    move |p: Vector3<f64>| {
        let r = 1.0 + a * (m * p.x + phase).sin() * (n * p.y).cos() + 0.5 * a * (m * p.z).cos();
        Point3::from((p * r).component_mul(&stretch))
    }
}

/// Twenty closed meshes of about 1280 faces: smooth deformed spheres and
/// tori of different proportions.
pub fn approximation_corpus() -> Vec<(String, HalfEdgeMesh)> {
    let mut out = Vec::new();
    let params = [
        (0.10, 2.0, 3.0, 0.0, (1.0, 1.0, 1.0)),
        (0.20, 3.0, 2.0, 0.5, (1.0, 1.0, 1.0)),
        (0.25, 4.0, 3.0, 1.0, (1.0, 1.0, 1.0)),
        (0.15, 5.0, 4.0, 0.2, (1.0, 1.0, 1.0)),
        (0.30, 2.0, 2.0, 2.0, (1.0, 1.0, 1.0)),
        (0.00, 1.0, 1.0, 0.0, (2.0, 1.0, 0.5)),
        (0.10, 3.0, 3.0, 0.3, (1.5, 1.0, 1.0)),
        (0.20, 2.0, 5.0, 1.3, (1.0, 0.6, 1.0)),
        (0.05, 6.0, 6.0, 0.7, (1.0, 1.0, 1.0)),
        (0.35, 1.5, 2.5, 0.1, (1.0, 1.0, 1.3)),
        (0.12, 4.0, 1.0, 2.5, (0.8, 1.2, 1.0)),
        (0.22, 3.5, 3.5, 0.9, (1.0, 1.0, 0.7)),
        (0.18, 2.5, 4.5, 1.7, (1.2, 0.9, 1.1)),
        (0.08, 7.0, 2.0, 0.4, (1.0, 1.0, 1.0)),
    ];
    for (i, &(a, m, n, phase, s)) in params.iter().enumerate() {
        let f = blob(a, m, n, phase, Vector3::new(s.0, s.1, s.2));
        out.push((format!("blob-{i:02}"), shapes::mapped_sphere(3, f)));
    }
    let tori = [
        (32, 20, 2.0, 0.7),
        (40, 16, 3.0, 1.0),
        (24, 26, 1.5, 0.6),
        (20, 32, 2.5, 1.2),
        (64, 10, 4.0, 0.5),
        (16, 40, 1.2, 0.5),
    ];
    for (nu, nv, big, small) in tori {
        out.push((format!("torus-{nu}x{nv}"), shapes::grid_torus(nu, nv, big, small)));
    }
    out
}

/// Random triangles of mixed size in a square sized so that a fair share
/// of them collide.
pub fn random_soup<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Layout2D {
    let side = (n as f64).sqrt() * 0.8;
    let tris = (0..n)
        .map(|_| {
            let c = Point2::new(rng.random_range(0.0..side), rng.random_range(0.0..side));
            let size = rng.random_range(0.05..1.5);
            [0, 1, 2].map(|_| c + size * nalgebra::Vector2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    Layout2D::from_triangles(tris)
}

/// Net of a bumpy sphere under a breadth-first tree from a random root.
pub fn random_net<R: Rng + ?Sized>(rng: &mut R) -> (HalfEdgeMesh, UnfoldTree, Layout2D) {
    let a = rng.random_range(0.1..0.5);
    let m = rng.random_range(2.0..6.0);
    let mesh = shapes::mapped_sphere(2, blob(a, m, m + 1.0, 0.0, Vector3::new(1.0, 1.0, 1.0)));
    let root = FaceId::from_index(rng.random_range(0..mesh.face_count()));
    let tree = UnfoldTree::breadth_first(&mesh, root).expect("closed mesh");
    let net = layout(&mesh, &tree);
    (mesh, tree, net)
}

/// A fan of thin triangles around the origin turning more than once, so
/// later turns lie on top of earlier ones.
pub fn fan_spiral(turns: f64, count: usize, growth: f64) -> Layout2D {
    let step = turns * TAU / count as f64;
    let pt = |k: usize| {
        let th = step * k as f64;
        let r = 1.0 + growth * th;
        Point2::new(r * th.cos(), r * th.sin())
    };
    let tris: Vec<Tri> = (0..count).map(|k| [Point2::origin(), pt(k), pt(k + 1)]).collect();
    Layout2D::from_triangles(tris)
}

/// A triangle strip wound along an Archimedean spiral whose pitch is
/// smaller than the strip width.
pub fn strip_spiral(turns: f64, segments: usize, width: f64, pitch: f64) -> Layout2D {
    let step = turns * TAU / segments as f64;
    let at = |k: usize, r_off: f64| {
        let th = step * k as f64;
        let r = 2.0 + pitch * th / TAU + r_off;
        Point2::new(r * th.cos(), r * th.sin())
    };
    let mut tris = Vec::new();
    for k in 0..segments {
        let (a, b, c, d) = (at(k, 0.0), at(k, width), at(k + 1, 0.0), at(k + 1, width));
        tris.push([a, c, b]);
        tris.push([b, c, d]);
    }
    Layout2D::from_triangles(tris)
}
