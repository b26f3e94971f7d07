//! Tabu search over unfold trees that removes overlaps by re-hinging faces.
//!
//! Each iteration reroots the tree at a random face, picks a random
//! overlapping face and climbs from it towards the root looking for a
//! re-attachment that lowers the overlap count. The first strictly
//! improving move wins; otherwise the least bad move seen on the way is
//! taken. Undoing a recent move is forbidden by a bounded tabu list.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::mesh::{FaceId, HalfEdgeMesh};
use nalgebra::{Point2, Vector2};

use crate::unfold::{
    count_overlaps, place_child, place_subtree_into, update_subtrees, Layout2D, OverlapIndex, Tri, UnfoldTree,
};

/// Re-attachment of `face` from `old_parent` to `new_parent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub face: FaceId,
    pub old_parent: FaceId,
    pub new_parent: FaceId,
}

/// Bounded FIFO of forbidden `(face, parent)` re-attachments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabuList {
    entries: VecDeque<(FaceId, FaceId)>,
    capacity: usize,
}

impl TabuList {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        Self {
            entries: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    /// Forbids hanging `face` back onto `parent`.
    pub fn push(&mut self, face: FaceId, parent: FaceId) {
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((face, parent));
    }

    /// Records the inverse of `mv`.
    pub fn record(&mut self, mv: &Move) {
        self.push(mv.face, mv.old_parent);
    }

    pub fn is_tabu(&self, face: FaceId, parent: FaceId) -> bool {
        self.entries.contains(&(face, parent))
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }
}

/// `floor(val * log_val(F))`, at least 1.
pub fn tabu_capacity(face_count: usize, avg_valence: f64) -> usize {
    if face_count < 2 || avg_valence <= 1.0 {
        return 1;
    }
    let m = avg_valence * (face_count as f64).ln() / avg_valence.ln();
    (m.floor() as usize).max(1)
}

/// Outcome of a move search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoveChoice {
    pub mv: Move,
    /// Overlap count after applying the move.
    pub overlaps_after: usize,
    pub improving: bool,
}

/// Move search state reused across iterations.
struct Searcher {
    inside: Vec<bool>,
    scratch: Vec<(FaceId, Tri)>,
    rest: Vec<(FaceId, Tri)>,
}

/// Rigid motion of the plane taking `from` onto `to`, two placements of
/// the same triangle.
fn motion(from: &Tri, to: &Tri) -> (Point2<f64>, Point2<f64>, f64, f64) {
    let (u, v) = (from[1] - from[0], to[1] - to[0]);
    let l2 = u.norm_squared();
    (from[0], to[0], u.dot(&v) / l2, u.perp(&v) / l2)
}

fn rotate(v: Vector2<f64>, c: f64, s: f64) -> Vector2<f64> {
    Vector2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

impl Searcher {
    fn new(slots: usize) -> Self {
        Self {
            inside: vec![false; slots],
            scratch: Vec::new(),
            rest: Vec::new(),
        }
    }

    /// Overlaps between the subtree placed at `self.scratch` and the
    /// remaining faces. A re-hinge moves the subtree rigidly, so pairs
    /// within either side keep their status and only these cross pairs
    /// change. When the subtree is the larger side the rest is moved by
    /// the inverse motion instead.
    fn cross_after(&self, layout: &Layout2D, index: &OverlapIndex, old: &Tri, big: bool) -> usize {
        let inside = &self.inside;
        if !big {
            return self
                .scratch
                .iter()
                .map(|(_, t)| index.count_hits(layout, t, |g| !inside[g.index()]))
                .sum();
        }
        let (o, n, c, s) = motion(old, &self.scratch[0].1);
        self.rest
            .iter()
            .map(|(_, t)| {
                let back = t.map(|p| o + rotate(p - n, c, -s));
                index.count_hits(layout, &back, |g| inside[g.index()])
            })
            .sum()
    }

    /// Returns the chosen move and whether any candidate was skipped as tabu.
    fn find(
        &mut self,
        mesh: &HalfEdgeMesh,
        tree: &UnfoldTree,
        layout: &Layout2D,
        index: &OverlapIndex,
        start: FaceId,
        tabu: &TabuList,
    ) -> (Option<MoveChoice>, bool) {
        if self.inside.len() < mesh.face_capacity() {
            self.inside.resize(mesh.face_capacity(), false);
        }
        let total = index.count();
        let mut best: Option<MoveChoice> = None;
        let mut blocked = false;
        let path = tree.path_to_root(start);
        for &x in &path[..path.len() - 1] {
            let parent = tree.parent(x).unwrap();
            let sub = tree.subtree(x);
            for s in &sub {
                self.inside[s.index()] = true;
            }
            let before = index.cross_pairs(&sub, &self.inside);
            let mut candidates: Vec<FaceId> = mesh.face_neighbors(x).into_iter().flatten().collect();
            candidates.sort_unstable();
            candidates.dedup();
            candidates.retain(|&p| p != parent && !self.inside[p.index()]);
            let big = 2 * sub.len() > tree.len();
            self.rest.clear();
            if big && !candidates.is_empty() {
                let inside = &self.inside;
                self.rest
                    .extend(layout.iter().filter(|(f, _)| !inside[f.index()]).map(|(f, t)| (f, *t)));
            }
            let old = *layout.get(x).expect("face is placed");
            let mut found = None;
            for p in candidates {
                if tabu.is_tabu(x, p) {
                    blocked = true;
                    continue;
                }
                let h = mesh.shared_halfedge(x, p).unwrap();
                if big {
                    let twin = mesh.twin(h).expect("hinge is interior");
                    self.scratch.clear();
                    self.scratch.push((x, place_child(mesh, h, twin, layout.get(p).unwrap())));
                } else {
                    place_subtree_into(mesh, tree, layout, x, h, &mut self.scratch);
                }
                let after = self.cross_after(layout, index, &old, big);
                let new_total = total - before + after;
                let choice = MoveChoice {
                    mv: Move {
                        face: x,
                        old_parent: parent,
                        new_parent: p,
                    },
                    overlaps_after: new_total,
                    improving: new_total < total,
                };
                if choice.improving {
                    found = Some(choice);
                    break;
                }
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (new_total, x, p) < (b.overlaps_after, b.mv.face, b.mv.new_parent)
                    }
                };
                if better {
                    best = Some(choice);
                }
            }
            for s in &sub {
                self.inside[s.index()] = false;
            }
            if found.is_some() {
                return (found, blocked);
            }
        }
        (best, blocked)
    }
}

/// Searches for a move starting at `start` and climbing to the root.
///
/// Returns the first strictly improving move, else the move with the
/// fewest resulting overlaps (ties by face id, then parent id), else `None`
/// when no non-tabu candidate exists on the path.
pub fn find_move(
    mesh: &HalfEdgeMesh,
    tree: &UnfoldTree,
    layout: &Layout2D,
    start: FaceId,
    tabu: &TabuList,
) -> Option<MoveChoice> {
    let index = OverlapIndex::from_layout(layout, true);
    Searcher::new(mesh.face_capacity())
        .find(mesh, tree, layout, &index, start, tabu)
        .0
}

/// Applies a move to tree and layout, re-placing only the moved subtree.
/// Returns the faces whose placement changed.
pub fn apply_move_with_layout(
    mesh: &HalfEdgeMesh,
    tree: &mut UnfoldTree,
    layout: &mut Layout2D,
    mv: &Move,
) -> Result<Vec<FaceId>, crate::error::UnfoldError> {
    tree.apply_move(mesh, mv.face, mv.new_parent)?;
    update_subtrees(mesh, tree, layout, &[mv.face]);
    Ok(tree.subtree(mv.face))
}

/// One applied move in the iteration trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub root: FaceId,
    pub face: FaceId,
    pub old_parent: FaceId,
    pub new_parent: FaceId,
    pub overlaps: usize,
}

/// Solver settings.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolveOptions {
    /// Maximum number of iterations.
    pub budget: usize,
    /// Overrides the formula-derived tabu list size.
    pub tabu_capacity: Option<usize>,
    pub trace: bool,
}

impl ResolveOptions {
    pub fn with_budget(budget: usize) -> Self {
        Self {
            budget,
            tabu_capacity: None,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ResolveReport {
    pub success: bool,
    pub iterations: usize,
    pub moves: usize,
    pub tabu_clears: usize,
    pub final_overlaps: usize,
    pub trace: Vec<TraceEntry>,
}

/// Runs the tabu search until the layout is overlap-free or the budget is
/// used up. Returns whether it ended overlap-free.
pub fn resolve_overlaps<R: Rng + ?Sized>(
    mesh: &HalfEdgeMesh,
    tree: &mut UnfoldTree,
    layout: &mut Layout2D,
    budget: usize,
    rng: &mut R,
) -> bool {
    resolve_overlaps_with(mesh, tree, layout, &ResolveOptions::with_budget(budget), rng).success
}

const AUDIT_INTERVAL: usize = 1000;

/// [`resolve_overlaps`] with full options and statistics.
pub fn resolve_overlaps_with<R: Rng + ?Sized>(
    mesh: &HalfEdgeMesh,
    tree: &mut UnfoldTree,
    layout: &mut Layout2D,
    options: &ResolveOptions,
    rng: &mut R,
) -> ResolveReport {
    let mut index = OverlapIndex::from_layout(layout, true);
    resolve_with_index(mesh, tree, layout, &mut index, options, rng)
}

/// [`resolve_overlaps_with`] on a caller-maintained index that must match
/// `layout`; the index is kept up to date.
pub fn resolve_with_index<R: Rng + ?Sized>(
    mesh: &HalfEdgeMesh,
    tree: &mut UnfoldTree,
    layout: &mut Layout2D,
    index: &mut OverlapIndex,
    options: &ResolveOptions,
    rng: &mut R,
) -> ResolveReport {
    let mut report = ResolveReport {
        final_overlaps: index.count(),
        ..Default::default()
    };
    if index.count() == 0 {
        report.success = true;
        return report;
    }
    let capacity = options
        .tabu_capacity
        .unwrap_or_else(|| tabu_capacity(mesh.face_count(), mesh.average_dual_valence()));
    let mut tabu = TabuList::new(capacity);
    let mut searcher = Searcher::new(mesh.face_capacity());
    let faces: Vec<FaceId> = tree.faces().collect();

    while report.iterations < options.budget {
        let iteration = report.iterations;
        report.iterations += 1;
        let root = faces[rng.random_range(0..faces.len())];
        tree.reroot(root).expect("face is in the tree");
        let overlapping = index.overlapping_faces();
        let start = *overlapping
            .iter()
            .nth(rng.random_range(0..overlapping.len()))
            .unwrap();

        let (mut choice, blocked) = searcher.find(mesh, tree, layout, index, start, &tabu);
        if choice.is_none() && blocked {
            tabu.clear();
            report.tabu_clears += 1;
            choice = searcher.find(mesh, tree, layout, index, start, &tabu).0;
        }
        let Some(choice) = choice else { continue };

        let moved = apply_move_with_layout(mesh, tree, layout, &choice.mv).expect("candidate move is valid");
        index.update(layout, &moved);
        tabu.record(&choice.mv);
        report.moves += 1;
        if options.trace {
            report.trace.push(TraceEntry {
                iteration,
                root,
                face: choice.mv.face,
                old_parent: choice.mv.old_parent,
                new_parent: choice.mv.new_parent,
                overlaps: index.count(),
            });
        }
        if cfg!(debug_assertions) && report.iterations.is_multiple_of(AUDIT_INTERVAL) {
            tree.check(mesh).expect("tree stays spanning");
            assert_eq!(&count_overlaps(layout), index.pairs(), "overlap index drifted");
        }
        if index.count() == 0 {
            break;
        }
    }
    report.final_overlaps = index.count();
    report.success = report.final_overlaps == 0;
    report
}
