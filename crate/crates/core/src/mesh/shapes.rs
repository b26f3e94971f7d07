//! Procedural test meshes: platonic solids, icospheres, tori and flat grids.

use std::collections::HashMap;
use std::f64::consts::TAU;

use nalgebra::{Point3, Vector3};

use super::HalfEdgeMesh;

fn build(positions: Vec<Point3<f64>>, triangles: &[[u32; 3]]) -> HalfEdgeMesh {
    HalfEdgeMesh::from_triangles(positions, triangles).expect("generated mesh is valid")
}

/// Regular tetrahedron with unit edge length.
pub fn tetrahedron() -> HalfEdgeMesh {
    let h = (2.0f64 / 3.0).sqrt();
    let s3 = 3.0f64.sqrt();
    build(
        vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, s3 / 2.0, 0.0),
            Point3::new(0.5, s3 / 6.0, h),
        ],
        &[[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]],
    )
}

/// Unit cube `[0,1]^3`, two triangles per side.
pub fn cube() -> HalfEdgeMesh {
    let mut p = Vec::new();
    for z in [0.0, 1.0] {
        for (x, y) in [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)] {
            p.push(Point3::new(x, y, z));
        }
    }
    build(
        p,
        &[
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ],
    )
}

pub fn octahedron() -> HalfEdgeMesh {
    build(
        vec![
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(-1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, -1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
            Point3::new(0.0, 0.0, -1.0),
        ],
        &[
            [0, 2, 4],
            [2, 1, 4],
            [1, 3, 4],
            [3, 0, 4],
            [2, 0, 5],
            [1, 2, 5],
            [3, 1, 5],
            [0, 3, 5],
        ],
    )
}

const ICOSAHEDRON_FACES: [[u32; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

fn icosahedron_points() -> Vec<Point3<f64>> {
    let t = (1.0 + 5.0f64.sqrt()) / 2.0;
    [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point3::from(Vector3::new(x, y, z).normalize()))
    .collect()
}

/// Icosahedron inscribed in the unit sphere.
pub fn icosahedron() -> HalfEdgeMesh {
    build(icosahedron_points(), &ICOSAHEDRON_FACES)
}

/// Loop-style 1-to-4 subdivision of the icosahedron projected onto the unit
/// sphere; `20 * 4^k` faces.
pub fn icosphere(subdivisions: u32) -> HalfEdgeMesh {
    let (p, t) = icosphere_soup(subdivisions);
    build(p, &t)
}

fn icosphere_soup(subdivisions: u32) -> (Vec<Point3<f64>>, Vec<[u32; 3]>) {
    let mut positions = icosahedron_points();
    let mut faces = ICOSAHEDRON_FACES.to_vec();
    for _ in 0..subdivisions {
        let mut cache: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, positions: &mut Vec<Point3<f64>>| {
            let key = (a.min(b), a.max(b));
            *cache.entry(key).or_insert_with(|| {
                let m = (positions[a as usize].coords + positions[b as usize].coords) * 0.5;
                positions.push(Point3::from(m.normalize()));
                (positions.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut positions);
            let bc = midpoint(b, c, &mut positions);
            let ca = midpoint(c, a, &mut positions);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (positions, faces)
}

/// Icosphere whose unit-sphere points are mapped through `f`.
pub fn mapped_sphere(subdivisions: u32, f: impl Fn(Vector3<f64>) -> Point3<f64>) -> HalfEdgeMesh {
    let (p, t) = icosphere_soup(subdivisions);
    build(p.into_iter().map(|q| f(q.coords)).collect(), &t)
}

/// Torus of revolution sampled on an `nu x nv` grid, two triangles per cell;
/// `2 * nu * nv` faces, genus one.
pub fn grid_torus(nu: u32, nv: u32, major: f64, minor: f64) -> HalfEdgeMesh {
    let mut p = Vec::with_capacity((nu * nv) as usize);
    for i in 0..nu {
        let u = TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = TAU * j as f64 / nv as f64;
            let r = major + minor * v.cos();
            p.push(Point3::new(r * u.cos(), r * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: u32, j: u32| (i % nu) * nv + (j % nv);
    let mut t = Vec::with_capacity((2 * nu * nv) as usize);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            t.push([a, b, c]);
            t.push([a, c, d]);
        }
    }
    build(p, &t)
}

/// Flat open `nx x ny` grid in the xy-plane with unit cells.
pub fn grid_disk(nx: u32, ny: u32) -> HalfEdgeMesh {
    let mut p = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            p.push(Point3::new(i as f64, j as f64, 0.0));
        }
    }
    let id = |i: u32, j: u32| j * (nx + 1) + i;
    let mut t = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            t.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            t.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    build(p, &t)
}

/// Two disjoint unit tetrahedra.
pub fn two_tetrahedra() -> HalfEdgeMesh {
    let (mut p, mut t) = tetrahedron().to_triangles();
    let n = p.len() as u32;
    let shifted: Vec<_> = p.iter().map(|q| q + Vector3::new(3.0, 0.0, 0.0)).collect();
    p.extend(shifted);
    let more: Vec<_> = t.iter().map(|f| f.map(|i| i + n)).collect();
    t.extend(more);
    build(p, &t)
}

/// Two tetrahedra sharing a single apex: edge-manifold, not vertex-manifold.
pub fn bowtie_tetrahedra() -> (Vec<Point3<f64>>, Vec<[u32; 3]>) {
    let (mut p, mut t) = tetrahedron().to_triangles();
    // mirror through the apex (vertex 3)
    let apex = p[3];
    for i in 0..3 {
        p.push(Point3::from(apex.coords * 2.0 - p[i].coords));
    }
    let map = |i: u32| if i == 3 { 3 } else { i + 4 };
    let more: Vec<_> = t.iter().map(|f| f.map(map)).collect();
    t.extend(more);
    (p, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_volume(mesh: &HalfEdgeMesh) -> f64 {
        mesh.faces()
            .map(|f| {
                let [a, b, c] = mesh.face_points(f);
                a.coords.dot(&b.coords.cross(&c.coords)) / 6.0
            })
            .sum()
    }

    #[test]
    fn closed_shapes_are_outward_oriented() {
        for mesh in [
            tetrahedron(),
            cube(),
            octahedron(),
            icosahedron(),
            icosphere(2),
            grid_torus(16, 16, 2.0, 0.7),
        ] {
            mesh.check_invariants().unwrap();
            assert!(signed_volume(&mesh) > 0.0);
        }
    }

    #[test]
    fn face_counts() {
        assert_eq!(icosphere(1).face_count(), 80);
        assert_eq!(icosphere(2).face_count(), 320);
        assert_eq!(icosphere(3).face_count(), 1280);
        assert_eq!(grid_torus(16, 16, 2.0, 0.7).face_count(), 512);
        assert_eq!(grid_torus(16, 16, 2.0, 0.7).validate().genus, Some(1));
    }

    #[test]
    fn tetrahedron_edges_have_unit_length() {
        let t = tetrahedron();
        for h in t.edges() {
            assert!((t.edge_length(h) - 1.0).abs() < 1e-15);
        }
    }
}
