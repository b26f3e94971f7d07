//! Edge-collapse simplification with reversible collapse records.
//!
//! Three strategies are supported, named `selection/placement`:
//! quadric cost with quadric-optimal placement (`Q/Q`), shortest edge with
//! midpoint placement (`SE/MP`) and shortest edge with quadric placement
//! (`SE/Q`). Every collapse yields a [`CollapseRecord`]; replaying the
//! records in reverse through [`uncollapse_edge`] restores the input mesh
//! bit for bit.

mod quadric;

pub use quadric::Quadric;

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::error::CollapseError;
use crate::mesh::{FaceId, HalfEdgeId, HalfEdgeMesh, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeSelection {
    QuadricCost,
    ShortestEdge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexPlacement {
    QuadricOptimal,
    Midpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CollapseStrategy {
    pub selection: EdgeSelection,
    pub placement: VertexPlacement,
}

impl CollapseStrategy {
    pub const QUADRIC: Self = Self {
        selection: EdgeSelection::QuadricCost,
        placement: VertexPlacement::QuadricOptimal,
    };
    pub const SHORTEST_MIDPOINT: Self = Self {
        selection: EdgeSelection::ShortestEdge,
        placement: VertexPlacement::Midpoint,
    };
    pub const SHORTEST_QUADRIC: Self = Self {
        selection: EdgeSelection::ShortestEdge,
        placement: VertexPlacement::QuadricOptimal,
    };

    /// The three named variants in reporting order.
    pub const ALL: [Self; 3] = [Self::QUADRIC, Self::SHORTEST_MIDPOINT, Self::SHORTEST_QUADRIC];

    pub fn name(&self) -> &'static str {
        match (self.selection, self.placement) {
            (EdgeSelection::QuadricCost, VertexPlacement::QuadricOptimal) => "q/q",
            (EdgeSelection::ShortestEdge, VertexPlacement::Midpoint) => "se/mp",
            (EdgeSelection::ShortestEdge, VertexPlacement::QuadricOptimal) => "se/q",
            (EdgeSelection::QuadricCost, VertexPlacement::Midpoint) => "q/mp",
        }
    }
}

impl Default for CollapseStrategy {
    fn default() -> Self {
        Self::QUADRIC
    }
}

impl fmt::Display for CollapseStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CollapseStrategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "q/q" | "qq" => Ok(Self::QUADRIC),
            "se/mp" | "semp" => Ok(Self::SHORTEST_MIDPOINT),
            "se/q" | "seq" => Ok(Self::SHORTEST_QUADRIC),
            other => Err(format!("unknown strategy {other:?} (expected q/q, se/mp or se/q)")),
        }
    }
}

/// Face count the simplification aims for:
/// `round(faces / 10 + sqrt(faces) * (1 + genus))`, at least 4.
pub fn target_face_count(input_faces: usize, genus: u32) -> usize {
    let f = input_faces as f64;
    let t = f / 10.0 + f.sqrt() * (1.0 + genus as f64);
    (t.round() as usize).max(4)
}

/// Everything needed to undo one edge collapse.
#[derive(Clone, Debug, PartialEq)]
pub struct CollapseRecord {
    /// Position in the collapse stack (mesh collapse depth before the collapse).
    pub sequence: usize,
    /// The collapsed halfedge, running from `kept` to `removed`.
    pub halfedge: HalfEdgeId,
    pub kept: VertexId,
    pub removed: VertexId,
    /// One face for a boundary edge, two otherwise.
    pub removed_faces: Vec<FaceId>,
    pub removed_position: Point3<f64>,
    pub kept_position_before: Point3<f64>,
    pub kept_position_after: Point3<f64>,
    /// Corners (as outgoing halfedges) of surviving faces that referenced
    /// `removed` and were rewired to `kept`.
    pub fan: Vec<HalfEdgeId>,
    twin_patches: Vec<(HalfEdgeId, Option<HalfEdgeId>)>,
    vertex_patches: Vec<(VertexId, HalfEdgeId)>,
    edges_removed: usize,
}

fn midpoint(a: &Point3<f64>, b: &Point3<f64>) -> Point3<f64> {
    Point3::from((a.coords + b.coords) * 0.5)
}

fn place_with(q: &Quadric, pu: Point3<f64>, pv: Point3<f64>, placement: VertexPlacement) -> Point3<f64> {
    match placement {
        VertexPlacement::Midpoint => midpoint(&pu, &pv),
        VertexPlacement::QuadricOptimal => q.minimizer().unwrap_or_else(|| {
            let mut best = pu;
            let mut best_cost = q.cost(&pu);
            for c in [pv, midpoint(&pu, &pv)] {
                let cost = q.cost(&c);
                if cost < best_cost {
                    best = c;
                    best_cost = cost;
                }
            }
            best
        }),
    }
}

fn cost_with(q: &Quadric, pu: Point3<f64>, pv: Point3<f64>, p: &Point3<f64>, selection: EdgeSelection) -> f64 {
    match selection {
        EdgeSelection::QuadricCost => q.cost(p),
        EdgeSelection::ShortestEdge => (pv - pu).norm(),
    }
}

fn edge_quadric(mesh: &HalfEdgeMesh, edge: HalfEdgeId) -> Quadric {
    Quadric::of_vertex(mesh, mesh.origin(edge)) + Quadric::of_vertex(mesh, mesh.destination(edge))
}

/// Where the merged vertex of `edge` goes under `strategy`, using quadrics
/// built from the current faces.
pub fn place_vertex(mesh: &HalfEdgeMesh, edge: HalfEdgeId, strategy: CollapseStrategy) -> Point3<f64> {
    let q = edge_quadric(mesh, edge);
    let pu = mesh.position(mesh.origin(edge));
    let pv = mesh.position(mesh.destination(edge));
    place_with(&q, pu, pv, strategy.placement)
}

/// Priority of collapsing `edge`: the summed quadric at the placement point,
/// or the edge length for shortest-edge selection.
pub fn edge_cost(mesh: &HalfEdgeMesh, edge: HalfEdgeId, strategy: CollapseStrategy) -> f64 {
    let q = edge_quadric(mesh, edge);
    let pu = mesh.position(mesh.origin(edge));
    let pv = mesh.position(mesh.destination(edge));
    let p = place_with(&q, pu, pv, strategy.placement);
    cost_with(&q, pu, pv, &p, strategy.selection)
}

/// Sentinel for the virtual vertex joined to every boundary vertex.
const VIRTUAL: u32 = u32::MAX;

type Link = (BTreeSet<u32>, BTreeSet<(u32, u32)>);

fn ordered(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

/// Vertex and edge link of `x`, with boundaries closed off by a virtual vertex.
fn vertex_link(mesh: &HalfEdgeMesh, x: VertexId) -> Link {
    let mut verts = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for h in mesh.outgoing(x) {
        let p = mesh.destination(h);
        let q = mesh.origin(h.prev());
        verts.insert(p.0);
        verts.insert(q.0);
        edges.insert(ordered(p.0, q.0));
        if mesh.is_boundary_edge(h) {
            verts.insert(VIRTUAL);
            edges.insert(ordered(VIRTUAL, p.0));
        }
        if mesh.is_boundary_edge(h.prev()) {
            verts.insert(VIRTUAL);
            edges.insert(ordered(VIRTUAL, q.0));
        }
    }
    (verts, edges)
}

/// Topology and geometry checks for collapsing `edge` with the merged
/// vertex at `position`.
///
/// Requires the link condition, at least four remaining faces on closed
/// meshes (two on open ones) and that no surviving face normal turns by 90
/// degrees or more.
pub fn collapse_is_valid(mesh: &HalfEdgeMesh, edge: HalfEdgeId, position: &Point3<f64>) -> bool {
    if !mesh.is_face_alive(edge.face()) {
        return false;
    }
    let twin = mesh.twin(edge);
    let removed_faces = if twin.is_some() { 2 } else { 1 };
    let closed = mesh.boundary_edge_count() == 0;
    let min_faces = if closed { 4 } else { 2 };
    if mesh.face_count() < removed_faces + min_faces {
        return false;
    }

    let u = mesh.origin(edge);
    let v = mesh.destination(edge);
    let a = mesh.origin(edge.prev());
    let mut edge_link = BTreeSet::from([a.0]);
    match twin {
        Some(g) => {
            edge_link.insert(mesh.origin(g.prev()).0);
        }
        None => {
            edge_link.insert(VIRTUAL);
        }
    }
    let (lu_v, lu_e) = vertex_link(mesh, u);
    let (lv_v, lv_e) = vertex_link(mesh, v);
    let common: BTreeSet<u32> = lu_v.intersection(&lv_v).copied().collect();
    if common != edge_link || lu_e.intersection(&lv_e).next().is_some() {
        return false;
    }

    // normal guard on every surviving face around either endpoint
    let removed = [Some(edge.face()), twin.map(HalfEdgeId::face)];
    for x in [u, v] {
        for f in mesh.vertex_faces(x) {
            if removed.contains(&Some(f)) {
                continue;
            }
            let before = mesh.face_normal(f);
            let mut pts = mesh.face_points(f);
            for (k, w) in mesh.face_vertices(f).iter().enumerate() {
                if *w == u || *w == v {
                    pts[k] = *position;
                }
            }
            let after = (pts[1] - pts[0]).cross(&(pts[2] - pts[0]));
            if before.dot(&after) <= 0.0 {
                return false;
            }
        }
    }
    true
}

/// [`collapse_is_valid`] at the placement `strategy` would choose.
pub fn is_collapse_valid(mesh: &HalfEdgeMesh, edge: HalfEdgeId, strategy: CollapseStrategy) -> bool {
    let p = place_vertex(mesh, edge, strategy);
    collapse_is_valid(mesh, edge, &p)
}

/// Collapses `edge` into its origin vertex, moved to `position`.
pub fn collapse_edge(
    mesh: &mut HalfEdgeMesh,
    edge: HalfEdgeId,
    position: Point3<f64>,
) -> Result<CollapseRecord, CollapseError> {
    if !collapse_is_valid(mesh, edge, &position) {
        return Err(CollapseError::InvalidCollapse(edge.0));
    }
    Ok(collapse_unchecked(mesh, edge, position))
}

fn collapse_unchecked(mesh: &mut HalfEdgeMesh, h: HalfEdgeId, position: Point3<f64>) -> CollapseRecord {
    let u = mesh.origin(h);
    let v = mesh.destination(h);
    let fa = h.face();
    let (h1, h2) = (h.next(), h.prev());
    let (t1, t2) = (mesh.twin(h1), mesh.twin(h2));
    let a = mesh.origin(h2);
    let g = mesh.twin(h);
    let fb = g.map(HalfEdgeId::face);
    let (t3, t4) = match g {
        Some(g) => (mesh.twin(g.next()), mesh.twin(g.prev())),
        None => (None, None),
    };
    let b = g.map(|g| mesh.origin(g.prev()));

    let fan: Vec<HalfEdgeId> = mesh
        .outgoing(v)
        .into_iter()
        .filter(|o| o.face() != fa && Some(o.face()) != fb)
        .collect();

    let mut twin_patches = Vec::with_capacity(4);
    for (x, y) in [(t1, t2), (t3, t4)] {
        if let Some(x) = x {
            twin_patches.push((x, mesh.twins[x.index()]));
        }
        if let Some(y) = y {
            twin_patches.push((y, mesh.twins[y.index()]));
        }
        if let Some(x) = x {
            mesh.twins[x.index()] = y;
        }
        if let Some(y) = y {
            mesh.twins[y.index()] = x;
        }
    }

    for o in &fan {
        mesh.corners[o.face().index()][o.corner()] = u;
    }
    mesh.face_alive[fa.index()] = false;
    if let Some(fb) = fb {
        mesh.face_alive[fb.index()] = false;
    }
    mesh.vertex_alive[v.index()] = false;
    let kept_position_before = mesh.positions[u.index()];
    let removed_position = mesh.positions[v.index()];
    mesh.positions[u.index()] = position;

    let dead = |x: HalfEdgeId| x.face() == fa || Some(x.face()) == fb;
    let mut vertex_patches = Vec::new();
    let replacement_u = t2.or(t4).or_else(|| fan.first().copied());
    let replacement_a = t1.or(t2.map(HalfEdgeId::next));
    let replacement_b = t3.or(t4.map(HalfEdgeId::next));
    for (x, repl) in [(Some(u), replacement_u), (Some(a), replacement_a), (b, replacement_b)] {
        let Some(x) = x else { continue };
        let cur = mesh.vertex_halfedge[x.index()];
        if dead(cur) {
            if let Some(r) = repl {
                vertex_patches.push((x, cur));
                mesh.vertex_halfedge[x.index()] = r;
            }
        }
    }

    let removed_faces: Vec<FaceId> = std::iter::once(fa).chain(fb).collect();
    let edges_removed = if g.is_some() { 3 } else { 2 };
    mesh.live_faces -= removed_faces.len();
    mesh.live_vertices -= 1;
    mesh.live_edges -= edges_removed;
    let sequence = mesh.collapse_depth;
    mesh.collapse_depth += 1;

    CollapseRecord {
        sequence,
        halfedge: h,
        kept: u,
        removed: v,
        removed_faces,
        removed_position,
        kept_position_before,
        kept_position_after: position,
        fan,
        twin_patches,
        vertex_patches,
        edges_removed,
    }
}

/// Re-applies a collapse that was just undone, reproducing the identical
/// post-collapse state.
pub fn redo_collapse(mesh: &mut HalfEdgeMesh, record: &CollapseRecord) -> Result<(), CollapseError> {
    if record.sequence != mesh.collapse_depth {
        return Err(CollapseError::OutOfOrder {
            record: record.sequence,
            depth: mesh.collapse_depth,
        });
    }
    collapse_unchecked(mesh, record.halfedge, record.kept_position_after);
    Ok(())
}

/// Undoes the most recent collapse; returns the revived faces.
pub fn uncollapse_edge(
    mesh: &mut HalfEdgeMesh,
    record: &CollapseRecord,
) -> Result<Vec<FaceId>, CollapseError> {
    if mesh.collapse_depth == 0 || record.sequence != mesh.collapse_depth - 1 {
        return Err(CollapseError::OutOfOrder {
            record: record.sequence,
            depth: mesh.collapse_depth,
        });
    }
    let (u, v) = (record.kept, record.removed);
    mesh.positions[u.index()] = record.kept_position_before;
    mesh.positions[v.index()] = record.removed_position;
    mesh.vertex_alive[v.index()] = true;
    for f in &record.removed_faces {
        mesh.face_alive[f.index()] = true;
    }
    for o in &record.fan {
        mesh.corners[o.face().index()][o.corner()] = v;
    }
    for &(h, old) in record.twin_patches.iter().rev() {
        mesh.twins[h.index()] = old;
    }
    for &(x, old) in record.vertex_patches.iter().rev() {
        mesh.vertex_halfedge[x.index()] = old;
    }
    mesh.live_faces += record.removed_faces.len();
    mesh.live_vertices += 1;
    mesh.live_edges += record.edges_removed;
    mesh.collapse_depth -= 1;
    Ok(record.removed_faces.clone())
}

#[derive(Debug)]
struct Candidate {
    cost: f64,
    edge: HalfEdgeId,
    origin: VertexId,
    destination: VertexId,
    stamp: (u32, u32),
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Candidate {}
impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Candidate {
    // max-heap: cheaper first, then lower edge id
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.edge.cmp(&self.edge))
    }
}

/// Priority-queue decimator with accumulated vertex quadrics.
struct Decimator {
    strategy: CollapseStrategy,
    quadrics: Vec<Quadric>,
    versions: Vec<u32>,
    heap: BinaryHeap<Candidate>,
}

impl Decimator {
    fn new(mesh: &HalfEdgeMesh, strategy: CollapseStrategy) -> Self {
        let mut quadrics = vec![Quadric::default(); mesh.vertex_capacity()];
        for f in mesh.faces() {
            let q = Quadric::of_face(mesh, f);
            for v in mesh.face_vertices(f) {
                quadrics[v.index()] += q;
            }
        }
        Self {
            strategy,
            quadrics,
            versions: vec![0; mesh.vertex_capacity()],
            heap: BinaryHeap::new(),
        }
    }

    fn placement(&self, mesh: &HalfEdgeMesh, edge: HalfEdgeId) -> (Point3<f64>, f64) {
        let (u, v) = (mesh.origin(edge), mesh.destination(edge));
        let q = self.quadrics[u.index()] + self.quadrics[v.index()];
        let (pu, pv) = (mesh.position(u), mesh.position(v));
        let p = place_with(&q, pu, pv, self.strategy.placement);
        (p, cost_with(&q, pu, pv, &p, self.strategy.selection))
    }

    fn push(&mut self, mesh: &HalfEdgeMesh, edge: HalfEdgeId) {
        let (u, v) = (mesh.origin(edge), mesh.destination(edge));
        let (_, cost) = self.placement(mesh, edge);
        self.heap.push(Candidate {
            cost,
            edge,
            origin: u,
            destination: v,
            stamp: (self.versions[u.index()], self.versions[v.index()]),
        });
    }

    fn rebuild(&mut self, mesh: &HalfEdgeMesh) {
        self.heap.clear();
        let edges: Vec<_> = mesh.edges().collect();
        for e in edges {
            self.push(mesh, e);
        }
    }

    fn is_current(&self, mesh: &HalfEdgeMesh, c: &Candidate) -> bool {
        mesh.is_face_alive(c.edge.face())
            && mesh.is_canonical(c.edge)
            && mesh.origin(c.edge) == c.origin
            && mesh.destination(c.edge) == c.destination
            && c.stamp == (self.versions[c.origin.index()], self.versions[c.destination.index()])
    }
}

/// Collapses the cheapest valid edge until at most `target` faces remain or
/// no valid collapse is left. Returns the records in collapse order.
pub fn decimate_to(
    mesh: &mut HalfEdgeMesh,
    target: usize,
    strategy: CollapseStrategy,
) -> Vec<CollapseRecord> {
    let mut records = Vec::new();
    if target < 4 || mesh.face_count() <= target {
        return records;
    }
    let mut dec = Decimator::new(mesh, strategy);
    dec.rebuild(mesh);
    let mut collapsed_since_rebuild = false;
    while mesh.face_count() > target {
        let Some(cand) = dec.heap.pop() else {
            if !collapsed_since_rebuild {
                break;
            }
            collapsed_since_rebuild = false;
            dec.rebuild(mesh);
            continue;
        };
        if !dec.is_current(mesh, &cand) {
            continue;
        }
        let (p, _) = dec.placement(mesh, cand.edge);
        if !collapse_is_valid(mesh, cand.edge, &p) {
            continue;
        }
        let record = collapse_unchecked(mesh, cand.edge, p);
        let (u, v) = (record.kept, record.removed);
        let qv = dec.quadrics[v.index()];
        dec.quadrics[u.index()] += qv;
        dec.versions[u.index()] += 1;
        dec.versions[v.index()] += 1;
        records.push(record);
        collapsed_since_rebuild = true;
        for h in mesh.outgoing(u) {
            dec.push(mesh, mesh.edge_of(h));
            // the far edge of a boundary fan is only reachable through prev
            if mesh.is_boundary_edge(h.prev()) {
                dec.push(mesh, h.prev());
            }
        }
    }
    records
}

/// Undoes every record, newest first.
pub fn uncollapse_all(mesh: &mut HalfEdgeMesh, records: &[CollapseRecord]) -> Result<(), CollapseError> {
    for r in records.iter().rev() {
        uncollapse_edge(mesh, r)?;
    }
    Ok(())
}
