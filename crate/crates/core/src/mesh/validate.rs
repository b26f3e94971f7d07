use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::HalfEdgeMesh;

/// Topological checks required before unfolding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshValidationReport {
    pub is_manifold: bool,
    pub is_orientable: bool,
    pub is_triangular: bool,
    pub component_count: usize,
    pub boundary_edge_count: usize,
    /// Only set for closed, manifold, single-component meshes.
    pub genus: Option<u32>,
}

impl MeshValidationReport {
    pub fn is_closed(&self) -> bool {
        self.boundary_edge_count == 0
    }

    /// Whether the pipeline may run on this mesh.
    pub fn is_unfoldable_input(&self, allow_boundary: bool) -> bool {
        self.is_manifold
            && self.is_orientable
            && self.is_triangular
            && self.component_count == 1
            && (allow_boundary || self.is_closed())
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.is_manifold {
            out.push("mesh is not manifold".to_string());
        }
        if !self.is_orientable {
            out.push("mesh is not consistently orientable".to_string());
        }
        if !self.is_triangular {
            out.push("mesh is not triangular".to_string());
        }
        if self.component_count != 1 {
            out.push(format!(
                "mesh has {} connected components",
                self.component_count
            ));
        }
        if self.boundary_edge_count > 0 {
            out.push(format!(
                "mesh has {} boundary edges",
                self.boundary_edge_count
            ));
        }
        out
    }
}

pub(super) fn validate_mesh(mesh: &HalfEdgeMesh) -> MeshValidationReport {
    // edge-manifoldness and orientation hold by construction; vertices may
    // still be pinched (two fans meeting at one vertex)
    let mut incident = vec![0usize; mesh.vertex_capacity()];
    for f in mesh.faces() {
        for v in mesh.face_vertices(f) {
            incident[v.index()] += 1;
        }
    }
    let is_manifold = mesh
        .vertices()
        .all(|v| mesh.outgoing(v).len() == incident[v.index()]);
    let component_count = mesh.component_count();
    let boundary_edge_count = mesh.boundary_edge_count();
    let genus = (is_manifold && component_count == 1 && boundary_edge_count == 0).then(|| {
        let chi = mesh.euler_characteristic();
        ((2 - chi) / 2).max(0) as u32
    });
    MeshValidationReport {
        is_manifold,
        is_orientable: true,
        is_triangular: true,
        component_count,
        boundary_edge_count,
        genus,
    }
}

/// Validates a raw triangle soup that may fail halfedge construction.
pub fn validate_triangles(vertex_count: usize, triangles: &[[u32; 3]]) -> MeshValidationReport {
    let mut directed: HashMap<(u32, u32), usize> = HashMap::new();
    for t in triangles {
        for i in 0..3 {
            *directed.entry((t[i], t[(i + 1) % 3])).or_default() += 1;
        }
    }
    let mut is_manifold = true;
    let mut is_orientable = true;
    let mut boundary_edge_count = 0;
    let mut edge_count = 0;
    for (&(a, b), &n) in &directed {
        let back = directed.get(&(b, a)).copied().unwrap_or(0);
        if a < b || back == 0 {
            edge_count += 1;
        }
        if n + back > 2 {
            is_manifold = false;
        } else if n > 1 {
            is_orientable = false;
        } else if back == 0 {
            boundary_edge_count += 1;
        }
    }

    // union-find over vertices of faces
    let mut parent: Vec<usize> = (0..vertex_count).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut used = vec![false; vertex_count];
    for t in triangles {
        for &v in t {
            used[v as usize] = true;
        }
        let r0 = find(&mut parent, t[0] as usize);
        for &v in &t[1..] {
            let r = find(&mut parent, v as usize);
            parent[r] = r0;
        }
    }
    let mut roots: Vec<usize> = (0..vertex_count)
        .filter(|&v| used[v])
        .map(|v| find(&mut parent, v))
        .collect();
    roots.sort_unstable();
    roots.dedup();
    let component_count = roots.len();

    let used_vertices = used.iter().filter(|u| **u).count() as i64;
    let genus = (is_manifold && is_orientable && component_count == 1 && boundary_edge_count == 0)
        .then(|| {
            let chi = used_vertices - edge_count as i64 + triangles.len() as i64;
            ((2 - chi) / 2).max(0) as u32
        });
    MeshValidationReport {
        is_manifold,
        is_orientable,
        is_triangular: true,
        component_count,
        boundary_edge_count,
        genus,
    }
}
