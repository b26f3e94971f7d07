//! Progressive unfolding: simplify, unfold the coarse mesh, then undo the
//! collapses one by one while keeping the net overlap-free.
//!
//! When an uncollapse step cannot be repaired within its budget the last
//! overlap-free state is restored and returned as an approximative result.

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decimate::{
    decimate_to, redo_collapse, target_face_count, uncollapse_edge, CollapseRecord, CollapseStrategy,
};
use crate::error::PipelineError;
use crate::mesh::{FaceId, HalfEdgeMesh};
use crate::metrics::{aspect_ratio, coverage, hausdorff_relative, MetricsReport, DEFAULT_SAMPLE_DENSITY};
use crate::rng::{stage_rng, Stage};
use crate::tabu::{resolve_overlaps_with, resolve_with_index, ResolveOptions, TraceEntry};
use crate::unfold::{initial_unfold_tree, layout, update_subtrees, Layout2D, OverlapIndex, UnfoldTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnfoldStatus {
    /// Full-resolution net without overlaps.
    Success,
    /// Overlap-free net of a partially restored mesh.
    Approximative,
    /// Not even the coarse mesh could be unfolded.
    Failed,
}

impl UnfoldStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnfoldStatus::Success => "success",
            UnfoldStatus::Approximative => "approximative",
            UnfoldStatus::Failed => "failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub strategy: CollapseStrategy,
    /// Overrides the face-count formula.
    pub target_faces: Option<usize>,
    /// Initial solve budget is this times the face count.
    pub budget_factor: usize,
    /// Per-uncollapse-step budget is this times the current face count.
    pub step_budget_factor: usize,
    /// Absolute per-step budget; zero stops before the first uncollapse.
    pub step_budget: Option<usize>,
    /// Stop after this many uncollapse steps (test hook).
    pub uncollapse_limit: Option<usize>,
    pub allow_boundary: bool,
    pub tabu_capacity: Option<usize>,
    pub hausdorff_density: f64,
    pub trace: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            strategy: CollapseStrategy::QUADRIC,
            target_faces: None,
            budget_factor: 100,
            step_budget_factor: 20,
            step_budget: None,
            uncollapse_limit: None,
            allow_boundary: false,
            tabu_capacity: None,
            hausdorff_density: DEFAULT_SAMPLE_DENSITY,
            trace: false,
        }
    }
}

impl PipelineConfig {
    fn resolve_options(&self, budget: usize) -> ResolveOptions {
        ResolveOptions {
            budget,
            tabu_capacity: self.tabu_capacity,
            trace: self.trace,
        }
    }

    fn step_budget_for(&self, faces: usize) -> usize {
        self.step_budget.unwrap_or(self.step_budget_factor * faces)
    }
}

/// Counters describing a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineStats {
    pub input_faces: usize,
    pub target_faces: usize,
    pub decimated_faces: usize,
    pub final_faces: usize,
    pub collapses: usize,
    pub uncollapses: usize,
    pub local_repairs: usize,
    pub tabu_iterations: usize,
    pub tabu_moves: usize,
}

#[derive(Clone, Debug)]
pub struct UnfoldOutcome {
    pub status: UnfoldStatus,
    pub mesh: HalfEdgeMesh,
    /// Absent on failure.
    pub tree: Option<UnfoldTree>,
    pub layout: Option<Layout2D>,
    /// Collapse records still applied to `mesh`, oldest first.
    pub remaining: Vec<CollapseRecord>,
    pub metrics: MetricsReport,
    pub stats: PipelineStats,
    pub trace: Vec<TraceEntry>,
}

impl UnfoldOutcome {
    pub fn remaining_uncollapses(&self) -> usize {
        self.remaining.len()
    }
}

fn check_input(mesh: &HalfEdgeMesh, allow_boundary: bool) -> Result<u32, PipelineError> {
    let report = mesh.validate();
    if !report.is_unfoldable_input(allow_boundary) {
        return Err(PipelineError::from_report(&report));
    }
    Ok(report.genus.unwrap_or(0))
}

/// Adds the faces revived by `record`'s uncollapse to the tree and
/// re-places the one-ring of the split vertices. Returns that one-ring.
///
/// A revived face that now separates two faces hinged across the collapsed
/// edge is spliced between them; otherwise it becomes a leaf of a random
/// neighbour already in the tree.
pub fn insert_uncollapsed_faces<R: Rng + ?Sized>(
    mesh: &HalfEdgeMesh,
    tree: &mut UnfoldTree,
    layout: &mut Layout2D,
    record: &CollapseRecord,
    rng: &mut R,
) -> Vec<FaceId> {
    let h = record.halfedge;
    let mut sides = vec![(h.face(), h.next(), h.prev())];
    if let Some(g) = mesh.twin(h) {
        sides.push((g.face(), g.next(), g.prev()));
    }
    for (face, a, b) in sides {
        let mut placed = false;
        if let (Some(ta), Some(tb)) = (mesh.twin(a), mesh.twin(b)) {
            let (fa, fb) = (ta.face(), tb.face());
            // the outer faces were glued to each other while the collapse held
            if tree.parent(fa) == Some(fb) && tree.hinge_pair(fa) == Some((ta, tb)) {
                tree.splice(mesh, face, fa).expect("splice across collapsed edge");
                placed = true;
            } else if tree.parent(fb) == Some(fa) && tree.hinge_pair(fb) == Some((tb, ta)) {
                tree.splice(mesh, face, fb).expect("splice across collapsed edge");
                placed = true;
            }
        }
        if !placed {
            let mut options: Vec<FaceId> = mesh
                .face_neighbors(face)
                .into_iter()
                .flatten()
                .filter(|&g| tree.contains(g))
                .collect();
            options.sort_unstable();
            options.dedup();
            let parent = options[rng.random_range(0..options.len())];
            tree.insert_leaf(mesh, face, parent).expect("neighbour is in the tree");
        }
    }

    let mut touched: Vec<FaceId> = mesh
        .vertex_faces(record.kept)
        .into_iter()
        .chain(mesh.vertex_faces(record.removed))
        .collect();
    touched.sort_unstable();
    touched.dedup();
    // the layout is anchored at the root, so only faces hanging below the
    // one-ring move; root the tree where that leaves the most faces still
    if let Some(f) = calm_root(tree, &touched) {
        tree.reroot(f).expect("face is in the tree");
    }
    update_subtrees(mesh, tree, layout, &touched);
    touched
}

/// Lowest face of the largest tree component left after deleting `cut`.
fn calm_root(tree: &UnfoldTree, cut: &[FaceId]) -> Option<FaceId> {
    let mut seen = vec![false; tree.face_slots()];
    for f in cut {
        seen[f.index()] = true;
    }
    let mut best: Option<(usize, FaceId)> = None;
    let mut stack = Vec::new();
    for start in tree.faces() {
        if seen[start.index()] {
            continue;
        }
        seen[start.index()] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(x) = stack.pop() {
            size += 1;
            for &y in tree.children(x).iter().chain(tree.parent(x).as_ref()) {
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    stack.push(y);
                }
            }
        }
        if best.is_none_or(|(n, _)| size > n) {
            best = Some((size, start));
        }
    }
    best.map(|(_, f)| f)
}

fn measured(
    status: UnfoldStatus,
    original: &HalfEdgeMesh,
    mesh: &HalfEdgeMesh,
    layout: Option<&Layout2D>,
    density: f64,
    started: Instant,
) -> MetricsReport {
    let hausdorff = (status == UnfoldStatus::Approximative).then(|| hausdorff_relative(original, mesh, density));
    MetricsReport {
        status,
        coverage_percent: layout.and_then(|l| coverage(l).ok()),
        aspect_ratio: layout.and_then(|l| aspect_ratio(l).ok()),
        hausdorff_percent: hausdorff,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    }
}

/// Simplify, unfold, then refine back towards the input.
pub fn progressive_unfold(
    input: &HalfEdgeMesh,
    config: &PipelineConfig,
    seed: u64,
) -> Result<UnfoldOutcome, PipelineError> {
    let started = Instant::now();
    let genus = check_input(input, config.allow_boundary)?;
    let mut mesh = input.clone();
    let mut stats = PipelineStats {
        input_faces: mesh.face_count(),
        ..Default::default()
    };
    let target = config
        .target_faces
        .unwrap_or_else(|| target_face_count(mesh.face_count(), genus));
    stats.target_faces = target;
    let mut records = decimate_to(&mut mesh, target, config.strategy);
    stats.collapses = records.len();
    stats.decimated_faces = mesh.face_count();

    let mut objective_rng = stage_rng(seed, Stage::Objective);
    let mut tabu_rng = stage_rng(seed, Stage::Tabu);
    let mut insertion_rng = stage_rng(seed, Stage::Insertion);

    let mut tree = initial_unfold_tree(&mesh, &mut objective_rng);
    let mut net = layout(&mesh, &tree);
    let mut trace = Vec::new();
    let mut index = OverlapIndex::from_layout(&net, true);
    let initial = resolve_with_index(
        &mesh,
        &mut tree,
        &mut net,
        &mut index,
        &config.resolve_options(config.budget_factor * mesh.face_count()),
        &mut tabu_rng,
    );
    stats.tabu_iterations += initial.iterations;
    stats.tabu_moves += initial.moves;
    trace.extend(initial.trace);
    if !initial.success {
        stats.final_faces = mesh.face_count();
        let metrics = measured(UnfoldStatus::Failed, input, &mesh, None, config.hausdorff_density, started);
        return Ok(UnfoldOutcome {
            status: UnfoldStatus::Failed,
            mesh,
            tree: None,
            layout: None,
            remaining: records,
            metrics,
            stats,
            trace,
        });
    }

    while let Some(record) = records.pop() {
        let limit_hit = config.uncollapse_limit.is_some_and(|n| stats.uncollapses >= n);
        if limit_hit || config.step_budget_for(mesh.face_count()) == 0 {
            records.push(record);
            break;
        }
        let snapshot = (tree.clone(), net.clone());
        uncollapse_edge(&mut mesh, &record).expect("records are replayed in order");
        let touched = insert_uncollapsed_faces(&mesh, &mut tree, &mut net, &record, &mut insertion_rng);
        // the net was overlap-free, so only pairs with a moved face can appear
        index.update(&net, &tree.subtrees(&touched));
        if index.count() > 0 {
            stats.local_repairs += 1;
            let budget = config.step_budget_for(mesh.face_count());
            let repair = resolve_with_index(
                &mesh,
                &mut tree,
                &mut net,
                &mut index,
                &config.resolve_options(budget),
                &mut tabu_rng,
            );
            stats.tabu_iterations += repair.iterations;
            stats.tabu_moves += repair.moves;
            trace.extend(repair.trace);
            if !repair.success {
                (tree, net) = snapshot;
                redo_collapse(&mut mesh, &record).expect("collapse state restored");
                records.push(record);
                break;
            }
        }
        stats.uncollapses += 1;
    }

    let status = if records.is_empty() {
        UnfoldStatus::Success
    } else {
        UnfoldStatus::Approximative
    };
    stats.final_faces = mesh.face_count();
    let metrics = measured(status, input, &mesh, Some(&net), config.hausdorff_density, started);
    Ok(UnfoldOutcome {
        status,
        mesh,
        tree: Some(tree),
        layout: Some(net),
        remaining: records,
        metrics,
        stats,
        trace,
    })
}

/// Tabu search on the full-resolution mesh, without simplification.
pub fn direct_unfold(
    input: &HalfEdgeMesh,
    config: &PipelineConfig,
    seed: u64,
) -> Result<UnfoldOutcome, PipelineError> {
    let started = Instant::now();
    check_input(input, config.allow_boundary)?;
    let mesh = input.clone();
    let faces = mesh.face_count();
    let mut tree = initial_unfold_tree(&mesh, &mut stage_rng(seed, Stage::Objective));
    let mut net = layout(&mesh, &tree);
    let report = resolve_overlaps_with(
        &mesh,
        &mut tree,
        &mut net,
        &config.resolve_options(config.budget_factor * faces),
        &mut stage_rng(seed, Stage::Tabu),
    );
    let stats = PipelineStats {
        input_faces: faces,
        target_faces: faces,
        decimated_faces: faces,
        final_faces: faces,
        tabu_iterations: report.iterations,
        tabu_moves: report.moves,
        ..Default::default()
    };
    let (status, tree, net) = if report.success {
        (UnfoldStatus::Success, Some(tree), Some(net))
    } else {
        (UnfoldStatus::Failed, None, None)
    };
    let metrics = measured(status, input, &mesh, net.as_ref(), config.hausdorff_density, started);
    Ok(UnfoldOutcome {
        status,
        mesh,
        tree,
        layout: net,
        remaining: Vec::new(),
        metrics,
        stats,
        trace: report.trace,
    })
}
