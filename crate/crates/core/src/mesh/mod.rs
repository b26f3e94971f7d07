//! Indexed halfedge representation of a triangular manifold surface.
//!
//! Halfedges are stored implicitly per face: face `f` owns halfedges
//! `3f`, `3f + 1` and `3f + 2`, where halfedge `3f + i` runs from corner `i`
//! to corner `i + 1` of the face. Only twin links are stored explicitly.
//! Face and vertex ids are dense; edge collapses mark slots dead and
//! uncollapsing revives the very same ids.

mod io;
mod validate;

pub mod shapes;

pub use io::{load_mesh, load_mesh_file, write_obj, write_off, MeshFormat};
pub use validate::{validate_triangles, MeshValidationReport};

use std::collections::HashMap;
use std::fmt;

use nalgebra::{Point3, Vector3};

use crate::error::MeshError;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
        #[derive(serde::Serialize, serde::Deserialize)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }

            #[inline]
            pub fn from_index(index: usize) -> Self {
                Self(index as u32)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// Index of a vertex slot.
    VertexId
);
id_type!(
    /// Index of a face slot.
    FaceId
);
id_type!(
    /// Index of a halfedge; `3 * face + corner`.
    HalfEdgeId
);

impl HalfEdgeId {
    #[inline]
    pub fn face(self) -> FaceId {
        FaceId(self.0 / 3)
    }

    #[inline]
    pub fn corner(self) -> usize {
        (self.0 % 3) as usize
    }

    #[inline]
    pub fn next(self) -> HalfEdgeId {
        HalfEdgeId(self.0 - self.0 % 3 + (self.0 + 1) % 3)
    }

    #[inline]
    pub fn prev(self) -> HalfEdgeId {
        HalfEdgeId(self.0 - self.0 % 3 + (self.0 + 2) % 3)
    }

    #[inline]
    pub fn of(face: FaceId, corner: usize) -> HalfEdgeId {
        HalfEdgeId(face.0 * 3 + corner as u32)
    }
}

/// Triangular surface with halfedge adjacency.
///
/// The mesh is always edge-manifold and consistently oriented: every
/// directed edge appears at most once and each twin pair traverses its
/// edge in opposite directions. Edges with a single incident face are
/// boundary edges.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfEdgeMesh {
    pub(crate) positions: Vec<Point3<f64>>,
    pub(crate) vertex_alive: Vec<bool>,
    pub(crate) vertex_halfedge: Vec<HalfEdgeId>,
    pub(crate) corners: Vec<[VertexId; 3]>,
    pub(crate) twins: Vec<Option<HalfEdgeId>>,
    pub(crate) face_alive: Vec<bool>,
    pub(crate) live_vertices: usize,
    pub(crate) live_faces: usize,
    pub(crate) live_edges: usize,
    /// Number of collapses currently applied; used to enforce LIFO uncollapsing.
    pub(crate) collapse_depth: usize,
}

impl HalfEdgeMesh {
    /// Builds the halfedge structure from an indexed triangle list.
    ///
    /// Fails on out-of-range indices, repeated corners, duplicate faces,
    /// unreferenced vertices, edges shared by more than two faces and
    /// inconsistently oriented neighbours.
    pub fn from_triangles(
        positions: Vec<Point3<f64>>,
        triangles: &[[u32; 3]],
    ) -> Result<Self, MeshError> {
        let vertex_count = positions.len();
        let mut corners = Vec::with_capacity(triangles.len());
        let mut seen_faces = HashMap::with_capacity(triangles.len());
        for (f, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v as usize >= vertex_count {
                    return Err(MeshError::IndexOutOfRange {
                        face: f,
                        index: v as usize,
                        vertex_count,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(MeshError::DegenerateFace { face: f });
            }
            let mut key = *tri;
            key.sort_unstable();
            if let Some(&first) = seen_faces.get(&key) {
                return Err(MeshError::DuplicateFace { first, second: f });
            }
            seen_faces.insert(key, f);
            corners.push([VertexId(tri[0]), VertexId(tri[1]), VertexId(tri[2])]);
        }

        let mut directed: HashMap<(u32, u32), HalfEdgeId> =
            HashMap::with_capacity(triangles.len() * 3);
        for (f, tri) in corners.iter().enumerate() {
            for i in 0..3 {
                let key = (tri[i].0, tri[(i + 1) % 3].0);
                let h = HalfEdgeId::of(FaceId::from_index(f), i);
                if directed.insert(key, h).is_some() {
                    // the same directed edge twice means either a third face on
                    // the edge or a flipped neighbour
                    let undirected_faces = triangles
                        .iter()
                        .filter(|t| {
                            let has = |x: u32| t.contains(&x);
                            has(key.0) && has(key.1)
                        })
                        .count();
                    return Err(if undirected_faces > 2 {
                        MeshError::NonManifoldEdge {
                            a: key.0 as usize,
                            b: key.1 as usize,
                        }
                    } else {
                        MeshError::InconsistentOrientation {
                            a: key.0 as usize,
                            b: key.1 as usize,
                        }
                    });
                }
            }
        }

        let mut twins = vec![None; corners.len() * 3];
        let mut edge_count = 0;
        for (&(a, b), &h) in &directed {
            match directed.get(&(b, a)) {
                Some(&t) => {
                    twins[h.index()] = Some(t);
                    if a < b {
                        edge_count += 1;
                    }
                }
                None => {
                    edge_count += 1;
                    // a reversed duplicate would have been caught above; a third
                    // face sharing the undirected edge shows up as (b, a) twice
                }
            }
        }

        let mut vertex_halfedge = vec![HalfEdgeId(u32::MAX); vertex_count];
        let mut referenced = vec![false; vertex_count];
        for (f, tri) in corners.iter().enumerate() {
            for (i, v) in tri.iter().enumerate() {
                let h = HalfEdgeId::of(FaceId::from_index(f), i);
                if !referenced[v.index()] {
                    referenced[v.index()] = true;
                    vertex_halfedge[v.index()] = h;
                } else if twins[h.prev().index()].is_none() {
                    // prefer the outgoing halfedge that starts a boundary fan
                    vertex_halfedge[v.index()] = h;
                }
            }
        }
        if let Some(v) = referenced.iter().position(|r| !r) {
            return Err(MeshError::UnreferencedVertex { vertex: v });
        }

        let face_count = corners.len();
        Ok(Self {
            positions,
            vertex_alive: vec![true; vertex_count],
            vertex_halfedge,
            corners,
            twins,
            face_alive: vec![true; face_count],
            live_vertices: vertex_count,
            live_faces: face_count,
            live_edges: edge_count,
            collapse_depth: 0,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.live_vertices
    }

    pub fn face_count(&self) -> usize {
        self.live_faces
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    /// Total number of vertex slots, dead ones included.
    pub fn vertex_capacity(&self) -> usize {
        self.positions.len()
    }

    /// Total number of face slots, dead ones included.
    pub fn face_capacity(&self) -> usize {
        self.corners.len()
    }

    pub fn collapse_depth(&self) -> usize {
        self.collapse_depth
    }

    pub fn is_face_alive(&self, f: FaceId) -> bool {
        self.face_alive[f.index()]
    }

    pub fn is_vertex_alive(&self, v: VertexId) -> bool {
        self.vertex_alive[v.index()]
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.face_alive
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .map(|(i, _)| FaceId::from_index(i))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_alive
            .iter()
            .enumerate()
            .filter(|(_, a)| **a)
            .map(|(i, _)| VertexId::from_index(i))
    }

    /// Live halfedges of live faces.
    pub fn halfedges(&self) -> impl Iterator<Item = HalfEdgeId> + '_ {
        self.faces()
            .flat_map(|f| (0..3).map(move |i| HalfEdgeId::of(f, i)))
    }

    /// One canonical halfedge per live edge: the lower id of a twin pair, or
    /// the only halfedge of a boundary edge.
    pub fn edges(&self) -> impl Iterator<Item = HalfEdgeId> + '_ {
        self.halfedges().filter(|&h| self.is_canonical(h))
    }

    #[inline]
    pub fn is_canonical(&self, h: HalfEdgeId) -> bool {
        match self.twins[h.index()] {
            Some(t) => h < t,
            None => true,
        }
    }

    /// Canonical halfedge of the edge containing `h`.
    #[inline]
    pub fn edge_of(&self, h: HalfEdgeId) -> HalfEdgeId {
        match self.twins[h.index()] {
            Some(t) if t < h => t,
            _ => h,
        }
    }

    #[inline]
    pub fn position(&self, v: VertexId) -> Point3<f64> {
        self.positions[v.index()]
    }

    pub fn positions(&self) -> &[Point3<f64>] {
        &self.positions
    }

    #[inline]
    pub fn face_vertices(&self, f: FaceId) -> [VertexId; 3] {
        self.corners[f.index()]
    }

    #[inline]
    pub fn face_points(&self, f: FaceId) -> [Point3<f64>; 3] {
        let [a, b, c] = self.corners[f.index()];
        [self.position(a), self.position(b), self.position(c)]
    }

    #[inline]
    pub fn origin(&self, h: HalfEdgeId) -> VertexId {
        self.corners[h.face().index()][h.corner()]
    }

    #[inline]
    pub fn destination(&self, h: HalfEdgeId) -> VertexId {
        self.origin(h.next())
    }

    #[inline]
    pub fn twin(&self, h: HalfEdgeId) -> Option<HalfEdgeId> {
        self.twins[h.index()]
    }

    #[inline]
    pub fn is_boundary_edge(&self, h: HalfEdgeId) -> bool {
        self.twins[h.index()].is_none()
    }

    /// Face across the edge `h`, if any.
    #[inline]
    pub fn opposite_face(&self, h: HalfEdgeId) -> Option<FaceId> {
        self.twins[h.index()].map(HalfEdgeId::face)
    }

    /// Edge-adjacent faces of `f` in corner order (`None` across boundary edges).
    pub fn face_neighbors(&self, f: FaceId) -> [Option<FaceId>; 3] {
        [0, 1, 2].map(|i| self.opposite_face(HalfEdgeId::of(f, i)))
    }

    /// Halfedge of `f` whose twin lies in `g`.
    pub fn shared_halfedge(&self, f: FaceId, g: FaceId) -> Option<HalfEdgeId> {
        (0..3)
            .map(|i| HalfEdgeId::of(f, i))
            .find(|&h| self.opposite_face(h) == Some(g))
    }

    pub fn edge_vector(&self, h: HalfEdgeId) -> Vector3<f64> {
        self.position(self.destination(h)) - self.position(self.origin(h))
    }

    pub fn edge_length(&self, h: HalfEdgeId) -> f64 {
        self.edge_vector(h).norm()
    }

    /// Unnormalised face normal (twice the area vector).
    pub fn face_normal(&self, f: FaceId) -> Vector3<f64> {
        let [a, b, c] = self.face_points(f);
        (b - a).cross(&(c - a))
    }

    pub fn face_area(&self, f: FaceId) -> f64 {
        0.5 * self.face_normal(f).norm()
    }

    pub fn surface_area(&self) -> f64 {
        self.faces().map(|f| self.face_area(f)).sum()
    }

    /// Outgoing halfedges around `v`, ordered around the fan. For boundary
    /// vertices the walk starts at the boundary.
    pub fn outgoing(&self, v: VertexId) -> Vec<HalfEdgeId> {
        let start = self.vertex_halfedge[v.index()];
        let mut out = vec![start];
        // rotate clockwise: twin(prev(h)) is the next outgoing halfedge
        let mut h = start;
        loop {
            match self.twins[h.prev().index()] {
                Some(t) if t == start => return out,
                Some(t) => {
                    out.push(t);
                    h = t;
                }
                None => break,
            }
            if out.len() > self.corners.len() * 3 {
                // broken adjacency; avoid spinning forever
                return out;
            }
        }
        // hit a boundary: walk the other way from the start
        let mut h = start;
        let mut before = Vec::new();
        while let Some(t) = self.twins[h.index()] {
            let n = t.next();
            before.push(n);
            h = n;
            if before.len() > self.corners.len() * 3 {
                break;
            }
        }
        before.reverse();
        before.extend(out);
        before
    }

    /// Faces incident to `v`.
    pub fn vertex_faces(&self, v: VertexId) -> Vec<FaceId> {
        self.outgoing(v).into_iter().map(HalfEdgeId::face).collect()
    }

    /// Vertices adjacent to `v`.
    pub fn vertex_neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let out = self.outgoing(v);
        let mut n: Vec<VertexId> = out.iter().map(|&h| self.destination(h)).collect();
        // on a boundary fan the last face contributes one more neighbour
        if let Some(&last) = out.last() {
            if self.twins[last.prev().index()].is_none() {
                n.push(self.origin(last.prev()));
            }
        }
        n
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.outgoing(v)
            .iter()
            .any(|&h| self.twins[h.index()].is_none() || self.twins[h.prev().index()].is_none())
    }

    /// Halfedge from `a` to `b`, if the edge exists in that direction.
    pub fn find_halfedge(&self, a: VertexId, b: VertexId) -> Option<HalfEdgeId> {
        self.outgoing(a)
            .into_iter()
            .find(|&h| self.destination(h) == b)
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.halfedges().filter(|&h| self.is_boundary_edge(h)).count()
    }

    /// Mean number of edge-adjacent faces per face.
    pub fn average_dual_valence(&self) -> f64 {
        if self.live_faces == 0 {
            return 0.0;
        }
        let adjacent = self.halfedges().filter(|&h| !self.is_boundary_edge(h)).count();
        adjacent as f64 / self.live_faces as f64
    }

    /// Axis-aligned bounding box over live vertices.
    pub fn bounding_box(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in self.vertices() {
            let p = self.position(v);
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    pub fn bounding_box_diagonal(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        (hi - lo).norm()
    }

    /// Number of connected components of the face graph, counting isolated
    /// vertices is unnecessary since every vertex is referenced.
    pub fn component_count(&self) -> usize {
        // faces sharing only a vertex belong to the same component, so group
        // by corner incidence rather than by fan walks
        let mut first_face: Vec<Option<usize>> = vec![None; self.positions.len()];
        let mut parent: Vec<usize> = (0..self.corners.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for f in self.faces() {
            for v in self.face_vertices(f) {
                match first_face[v.index()] {
                    None => first_face[v.index()] = Some(f.index()),
                    Some(g) => {
                        let (a, b) = (find(&mut parent, g), find(&mut parent, f.index()));
                        parent[a] = b;
                    }
                }
            }
        }
        let mut roots: Vec<usize> = self.faces().map(|f| find(&mut parent, f.index())).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }

    /// Number of closed boundary loops.
    pub fn boundary_loop_count(&self) -> usize {
        let mut visited = vec![false; self.twins.len()];
        let mut loops = 0;
        for h in self.halfedges() {
            if !self.is_boundary_edge(h) || visited[h.index()] {
                continue;
            }
            loops += 1;
            let mut cur = h;
            loop {
                visited[cur.index()] = true;
                // the next boundary halfedge starts at our destination
                let d = self.destination(cur);
                let next = self
                    .outgoing(d)
                    .into_iter()
                    .find(|&o| self.is_boundary_edge(o));
                match next {
                    Some(n) if !visited[n.index()] => cur = n,
                    _ => break,
                }
            }
        }
        loops
    }

    /// Euler characteristic `V - E + F` over live elements.
    pub fn euler_characteristic(&self) -> i64 {
        self.live_vertices as i64 - self.live_edges as i64 + self.live_faces as i64
    }

    /// Genus of a connected orientable surface, boundary loops accounted for:
    /// `chi = 2 - 2g - b`.
    pub fn surface_genus(&self) -> u32 {
        let b = self.boundary_loop_count() as i64;
        let g = (2 - self.euler_characteristic() - b) / 2;
        g.max(0) as u32
    }

    pub fn validate(&self) -> MeshValidationReport {
        validate::validate_mesh(self)
    }

    /// Compacted copy of the live part: positions and triangles with dense
    /// indices, in slot order.
    pub fn to_triangles(&self) -> (Vec<Point3<f64>>, Vec<[u32; 3]>) {
        let mut remap = vec![u32::MAX; self.positions.len()];
        let mut positions = Vec::with_capacity(self.live_vertices);
        for v in self.vertices() {
            remap[v.index()] = positions.len() as u32;
            positions.push(self.position(v));
        }
        let triangles = self
            .faces()
            .map(|f| self.face_vertices(f).map(|v| remap[v.index()]))
            .collect();
        (positions, triangles)
    }

    /// Bitwise equality of geometry and connectivity, including dead slots.
    pub fn bit_identical(&self, other: &HalfEdgeMesh) -> bool {
        self.positions.len() == other.positions.len()
            && self
                .positions
                .iter()
                .zip(&other.positions)
                .all(|(a, b)| (0..3).all(|k| a[k].to_bits() == b[k].to_bits()))
            && self.vertex_alive == other.vertex_alive
            && self.vertex_halfedge == other.vertex_halfedge
            && self.corners == other.corners
            && self.twins == other.twins
            && self.face_alive == other.face_alive
            && self.live_vertices == other.live_vertices
            && self.live_faces == other.live_faces
            && self.live_edges == other.live_edges
    }

    /// Full structural audit. Returns a description of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut faces = 0;
        let mut edges = 0;
        for f in self.faces() {
            faces += 1;
            let [a, b, c] = self.corners[f.index()];
            if a == b || b == c || a == c {
                return Err(format!("face {f} has repeated corners"));
            }
            for v in [a, b, c] {
                if !self.vertex_alive[v.index()] {
                    return Err(format!("face {f} references dead vertex {v}"));
                }
            }
            for i in 0..3 {
                let h = HalfEdgeId::of(f, i);
                if h.next().next().next() != h {
                    return Err(format!("next cycle of {h} is not a triangle"));
                }
                match self.twins[h.index()] {
                    Some(t) => {
                        if !self.face_alive[t.face().index()] {
                            return Err(format!("twin of {h} lies in dead face"));
                        }
                        if self.twins[t.index()] != Some(h) {
                            return Err(format!("twin(twin({h})) != {h}"));
                        }
                        if self.origin(t) != self.destination(h)
                            || self.destination(t) != self.origin(h)
                        {
                            return Err(format!("twin pair {h}/{t} not oppositely oriented"));
                        }
                        if h < t {
                            edges += 1;
                        }
                    }
                    None => edges += 1,
                }
            }
        }
        let mut vertices = 0;
        for v in self.vertices() {
            vertices += 1;
            let h = self.vertex_halfedge[v.index()];
            if h.index() >= self.twins.len()
                || !self.face_alive[h.face().index()]
                || self.origin(h) != v
            {
                return Err(format!("vertex {v} has a stale outgoing halfedge"));
            }
        }
        if faces != self.live_faces || edges != self.live_edges || vertices != self.live_vertices
        {
            return Err(format!(
                "counts out of sync: V {vertices}/{} E {edges}/{} F {faces}/{}",
                self.live_vertices, self.live_edges, self.live_faces
            ));
        }
        // every live vertex must be referenced by a live face
        let mut referenced = vec![false; self.positions.len()];
        for f in self.faces() {
            for v in self.face_vertices(f) {
                referenced[v.index()] = true;
            }
        }
        for v in self.vertices() {
            if !referenced[v.index()] {
                return Err(format!("live vertex {v} is unreferenced"));
            }
        }
        Ok(())
    }
}
