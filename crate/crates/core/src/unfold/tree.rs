use std::collections::{BTreeSet, VecDeque};

use crate::error::UnfoldError;
use crate::mesh::{FaceId, HalfEdgeId, HalfEdgeMesh};

/// Spanning tree of the dual graph. Each non-root face hangs off its parent
/// by a hinge edge; every other mesh edge is cut.
///
/// Hinges are stored as `(child side, parent side)` halfedge pairs so the
/// tree can be rerooted without consulting the mesh.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnfoldTree {
    parent: Vec<Option<FaceId>>,
    hinge: Vec<Option<(HalfEdgeId, HalfEdgeId)>>,
    children: Vec<Vec<FaceId>>,
    in_tree: Vec<bool>,
    root: FaceId,
    len: usize,
}

impl UnfoldTree {
    /// Builds the tree spanned by `hinges` (canonical or not) by a
    /// breadth-first walk from `root`. Faces are visited in id order so the
    /// result is deterministic.
    pub fn from_hinges(
        mesh: &HalfEdgeMesh,
        root: FaceId,
        hinges: &[HalfEdgeId],
    ) -> Result<Self, UnfoldError> {
        let n = mesh.face_capacity();
        let mut is_hinge = vec![false; n * 3];
        for &h in hinges {
            let t = mesh.twin(h).ok_or(UnfoldError::NotAdjacent(h.face(), h.face()))?;
            is_hinge[h.index()] = true;
            is_hinge[t.index()] = true;
        }
        let mut tree = Self::empty(n, root);
        if !mesh.is_face_alive(root) {
            return Err(UnfoldError::NotInTree(root));
        }
        tree.in_tree[root.index()] = true;
        tree.len = 1;
        let mut queue = VecDeque::from([root]);
        while let Some(f) = queue.pop_front() {
            for i in 0..3 {
                let h = HalfEdgeId::of(f, i);
                if !is_hinge[h.index()] {
                    continue;
                }
                let t = mesh.twin(h).expect("hinge has a twin");
                let g = t.face();
                if tree.in_tree[g.index()] {
                    continue;
                }
                tree.in_tree[g.index()] = true;
                tree.len += 1;
                tree.parent[g.index()] = Some(f);
                tree.hinge[g.index()] = Some((t, h));
                tree.children[f.index()].push(g);
                queue.push_back(g);
            }
        }
        if tree.len != mesh.face_count() {
            let missing = mesh.faces().find(|f| !tree.in_tree[f.index()]).unwrap();
            return Err(UnfoldError::NotInTree(missing));
        }
        Ok(tree)
    }

    /// Breadth-first dual tree from `root`, hinging every face to the first
    /// face that reaches it.
    pub fn breadth_first(mesh: &HalfEdgeMesh, root: FaceId) -> Result<Self, UnfoldError> {
        let interior: Vec<HalfEdgeId> = mesh.edges().filter(|&e| !mesh.is_boundary_edge(e)).collect();
        Self::from_hinges(mesh, root, &interior)
    }

    fn empty(n: usize, root: FaceId) -> Self {
        Self {
            parent: vec![None; n],
            hinge: vec![None; n],
            children: vec![Vec::new(); n],
            in_tree: vec![false; n],
            root,
            len: 0,
        }
    }

    pub fn root(&self) -> FaceId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, f: FaceId) -> bool {
        self.in_tree.get(f.index()).copied().unwrap_or(false)
    }

    pub fn parent(&self, f: FaceId) -> Option<FaceId> {
        self.parent[f.index()]
    }

    /// Halfedge of `f` on its hinge edge.
    pub fn hinge(&self, f: FaceId) -> Option<HalfEdgeId> {
        self.hinge[f.index()].map(|(c, _)| c)
    }

    /// Both halves of the hinge edge, child side first.
    pub fn hinge_pair(&self, f: FaceId) -> Option<(HalfEdgeId, HalfEdgeId)> {
        self.hinge[f.index()]
    }

    pub fn children(&self, f: FaceId) -> &[FaceId] {
        &self.children[f.index()]
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.in_tree
            .iter()
            .enumerate()
            .filter(|(_, &t)| t)
            .map(|(i, _)| FaceId::from_index(i))
    }

    /// Whether `x` lies in the subtree rooted at `f` (including `f`).
    pub fn is_in_subtree(&self, x: FaceId, f: FaceId) -> bool {
        let mut cur = Some(x);
        while let Some(c) = cur {
            if c == f {
                return true;
            }
            cur = self.parent[c.index()];
        }
        false
    }

    /// Faces of the subtree rooted at `f`, in preorder.
    pub fn subtree(&self, f: FaceId) -> Vec<FaceId> {
        let mut out = Vec::new();
        let mut stack = vec![f];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.children[x.index()].iter().rev());
        }
        out
    }

    /// Union of the subtrees of `faces`, each face once.
    pub fn subtrees(&self, faces: &[FaceId]) -> Vec<FaceId> {
        let mut marked = vec![false; self.face_slots()];
        for &f in faces {
            marked[f.index()] = true;
        }
        let mut walked = vec![false; self.face_slots()];
        let mut out = Vec::new();
        for &f in faces {
            if walked[f.index()] || self.path_to_root(f)[1..].iter().any(|a| marked[a.index()]) {
                continue;
            }
            walked[f.index()] = true;
            out.extend(self.subtree(f));
        }
        out
    }

    /// `f`, its parent, and so on up to the root.
    pub fn path_to_root(&self, f: FaceId) -> Vec<FaceId> {
        let mut out = vec![f];
        let mut cur = f;
        while let Some(p) = self.parent[cur.index()] {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn depth(&self, f: FaceId) -> usize {
        self.path_to_root(f).len() - 1
    }

    /// Canonical ids of the hinge edges.
    pub fn hinge_edges(&self, mesh: &HalfEdgeMesh) -> BTreeSet<HalfEdgeId> {
        self.faces()
            .filter_map(|f| self.hinge(f))
            .map(|h| mesh.edge_of(h))
            .collect()
    }

    /// Canonical ids of all edges that are not hinges, boundary edges included.
    pub fn cut_edges(&self, mesh: &HalfEdgeMesh) -> BTreeSet<HalfEdgeId> {
        let hinges = self.hinge_edges(mesh);
        mesh.edges().filter(|e| !hinges.contains(e)).collect()
    }

    /// Makes `new_root` the root by reversing the parent links on the path
    /// to it. The hinge set is unchanged.
    pub fn reroot(&mut self, new_root: FaceId) -> Result<(), UnfoldError> {
        if !self.contains(new_root) {
            return Err(UnfoldError::NotInTree(new_root));
        }
        let path = self.path_to_root(new_root);
        // walk from the old root down so each step reverses one link
        for w in path.windows(2).rev() {
            let (child, parent) = (w[0], w[1]);
            let (c_side, p_side) = self.hinge[child.index()].take().unwrap();
            self.parent[child.index()] = None;
            self.children[parent.index()].retain(|&x| x != child);
            self.parent[parent.index()] = Some(child);
            self.hinge[parent.index()] = Some((p_side, c_side));
            self.children[child.index()].push(parent);
        }
        self.root = new_root;
        Ok(())
    }

    /// Re-hinges `face` onto the mesh-adjacent face `new_parent`.
    pub fn apply_move(
        &mut self,
        mesh: &HalfEdgeMesh,
        face: FaceId,
        new_parent: FaceId,
    ) -> Result<(), UnfoldError> {
        if !self.contains(face) {
            return Err(UnfoldError::NotInTree(face));
        }
        if !self.contains(new_parent) {
            return Err(UnfoldError::NotInTree(new_parent));
        }
        let h = mesh
            .shared_halfedge(face, new_parent)
            .ok_or(UnfoldError::NotAdjacent(face, new_parent))?;
        if self.is_in_subtree(new_parent, face) {
            return Err(UnfoldError::WouldCreateCycle {
                face,
                parent: new_parent,
            });
        }
        self.detach(face);
        self.attach(face, new_parent, (h, mesh.twin(h).unwrap()));
        Ok(())
    }

    fn detach(&mut self, face: FaceId) {
        if let Some(p) = self.parent[face.index()].take() {
            self.children[p.index()].retain(|&x| x != face);
        }
        self.hinge[face.index()] = None;
    }

    fn attach(&mut self, face: FaceId, parent: FaceId, hinge: (HalfEdgeId, HalfEdgeId)) {
        self.parent[face.index()] = Some(parent);
        self.hinge[face.index()] = Some(hinge);
        self.children[parent.index()].push(face);
    }

    fn grow(&mut self, face: FaceId) {
        let need = face.index() + 1;
        if self.parent.len() < need {
            self.parent.resize(need, None);
            self.hinge.resize(need, None);
            self.children.resize(need, Vec::new());
            self.in_tree.resize(need, false);
        }
        if !self.in_tree[face.index()] {
            self.in_tree[face.index()] = true;
            self.len += 1;
        }
    }

    /// Adds a new face hanging off `parent` through their shared edge.
    pub fn insert_leaf(
        &mut self,
        mesh: &HalfEdgeMesh,
        face: FaceId,
        parent: FaceId,
    ) -> Result<(), UnfoldError> {
        if !self.contains(parent) {
            return Err(UnfoldError::NotInTree(parent));
        }
        let h = mesh
            .shared_halfedge(face, parent)
            .ok_or(UnfoldError::NotAdjacent(face, parent))?;
        self.grow(face);
        self.attach(face, parent, (h, mesh.twin(h).unwrap()));
        Ok(())
    }

    /// Inserts a new face between `child` and its current parent. `child`
    /// keeps its subtree and is re-hinged to `face`.
    pub fn splice(
        &mut self,
        mesh: &HalfEdgeMesh,
        face: FaceId,
        child: FaceId,
    ) -> Result<(), UnfoldError> {
        let parent = self.parent(child).ok_or(UnfoldError::NotInTree(child))?;
        let up = mesh
            .shared_halfedge(face, parent)
            .ok_or(UnfoldError::NotAdjacent(face, parent))?;
        let down = mesh
            .shared_halfedge(child, face)
            .ok_or(UnfoldError::NotAdjacent(child, face))?;
        self.detach(child);
        self.grow(face);
        self.attach(face, parent, (up, mesh.twin(up).unwrap()));
        self.attach(child, face, (down, mesh.twin(down).unwrap()));
        Ok(())
    }

    /// Number of face slots the tree can index.
    pub fn face_slots(&self) -> usize {
        self.parent.len()
    }

    /// Structural audit against the mesh: spans exactly the live faces, is
    /// acyclic, and every hinge is a real shared edge.
    pub fn check(&self, mesh: &HalfEdgeMesh) -> Result<(), String> {
        if self.len != mesh.face_count() {
            return Err(format!("tree has {} nodes, mesh {} faces", self.len, mesh.face_count()));
        }
        for f in mesh.faces() {
            if !self.contains(f) {
                return Err(format!("live face {f} missing from tree"));
            }
        }
        if self.parent(self.root).is_some() {
            return Err("root has a parent".into());
        }
        let mut reached = 0;
        let mut stack = vec![self.root];
        let mut seen = vec![false; self.parent.len()];
        while let Some(f) = stack.pop() {
            if std::mem::replace(&mut seen[f.index()], true) {
                return Err(format!("face {f} reached twice"));
            }
            reached += 1;
            for &c in &self.children[f.index()] {
                if self.parent[c.index()] != Some(f) {
                    return Err(format!("child {c} of {f} has another parent"));
                }
                let (cs, ps) = self.hinge[c.index()].ok_or(format!("face {c} lacks a hinge"))?;
                if cs.face() != c || ps.face() != f || mesh.twin(cs) != Some(ps) {
                    return Err(format!("hinge of {c} is not an edge shared with {f}"));
                }
                stack.push(c);
            }
        }
        if reached != self.len {
            return Err(format!("{reached} of {} nodes reachable from root", self.len));
        }
        Ok(())
    }
}
