//! Batch runs over a corpus at several resolutions and all four variants.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use foldnet_core::decimate::{decimate_to, CollapseStrategy};
use foldnet_core::mesh::{load_mesh_file, MeshFormat};
use foldnet_core::mesh::HalfEdgeMesh;
use foldnet_core::pipeline::{direct_unfold, progressive_unfold, PipelineConfig, UnfoldStatus};

use crate::report::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Progressive(CollapseStrategy),
    Direct,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Progressive(CollapseStrategy::QUADRIC),
        Variant::Progressive(CollapseStrategy::SHORTEST_MIDPOINT),
        Variant::Progressive(CollapseStrategy::SHORTEST_QUADRIC),
        Variant::Direct,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Progressive(s) => s.name(),
            Variant::Direct => "direct",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub resolutions: Vec<usize>,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub pipeline: PipelineConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub mesh: String,
    pub resolution: usize,
    pub faces: usize,
    pub variant: String,
    pub status: Option<UnfoldStatus>,
    pub error: Option<String>,
    pub remaining_uncollapses: usize,
    pub hausdorff_percent: Option<f64>,
    pub coverage_percent: Option<f64>,
    pub aspect_ratio: Option<f64>,
    pub wall_time_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchAggregate {
    pub resolution: usize,
    pub variant: String,
    pub runs: usize,
    pub success_rate: f64,
    pub success_with_approximation_rate: f64,
    pub median_time_seconds: f64,
    pub mean_time_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub schema: u32,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<BenchAggregate>,
}

/// Mesh files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && MeshFormat::from_path(p).is_some())
        .collect();
    files.sort();
    Ok(files)
}

/// The mesh simplified (quadric strategy) to at most `faces` faces and
/// compacted into a fresh mesh.
pub fn at_resolution(mesh: &HalfEdgeMesh, faces: usize) -> HalfEdgeMesh {
    if faces >= mesh.face_count() {
        return mesh.clone();
    }
    let mut m = mesh.clone();
    decimate_to(&mut m, faces, CollapseStrategy::QUADRIC);
    let (positions, triangles) = m.to_triangles();
    HalfEdgeMesh::from_triangles(positions, &triangles).expect("decimation keeps the mesh manifold")
}

fn run_one(name: &str, mesh: &HalfEdgeMesh, resolution: usize, variant: Variant, config: &BenchConfig) -> BenchRow {
    let mut row = BenchRow {
        mesh: name.to_string(),
        resolution,
        faces: mesh.face_count(),
        variant: variant.name().to_string(),
        status: None,
        error: None,
        remaining_uncollapses: 0,
        hausdorff_percent: None,
        coverage_percent: None,
        aspect_ratio: None,
        wall_time_seconds: 0.0,
    };
    let result = match variant {
        Variant::Progressive(strategy) => {
            let pipeline = PipelineConfig {
                strategy,
                ..config.pipeline.clone()
            };
            progressive_unfold(mesh, &pipeline, config.seed)
        }
        Variant::Direct => direct_unfold(mesh, &config.pipeline, config.seed),
    };
    match result {
        Ok(out) => {
            row.status = Some(out.status);
            row.remaining_uncollapses = out.remaining_uncollapses();
            row.hausdorff_percent = out.metrics.hausdorff_percent;
            row.coverage_percent = out.metrics.coverage_percent;
            row.aspect_ratio = out.metrics.aspect_ratio;
            row.wall_time_seconds = out.metrics.wall_time_seconds;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

pub fn aggregate(rows: &[BenchRow], resolutions: &[usize]) -> Vec<BenchAggregate> {
    let mut out = Vec::new();
    for &resolution in resolutions {
        for variant in Variant::ALL {
            let group: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.resolution == resolution && r.variant == variant.name())
                .collect();
            if group.is_empty() {
                continue;
            }
            let n = group.len() as f64;
            let success = group.iter().filter(|r| r.status == Some(UnfoldStatus::Success)).count();
            let approx = group
                .iter()
                .filter(|r| matches!(r.status, Some(UnfoldStatus::Success | UnfoldStatus::Approximative)))
                .count();
            let times: Vec<f64> = group.iter().filter(|r| r.status.is_some()).map(|r| r.wall_time_seconds).collect();
            let mean = if times.is_empty() {
                0.0
            } else {
                times.iter().sum::<f64>() / times.len() as f64
            };
            out.push(BenchAggregate {
                resolution,
                variant: variant.name().to_string(),
                runs: group.len(),
                success_rate: 100.0 * success as f64 / n,
                success_with_approximation_rate: 100.0 * approx as f64 / n,
                median_time_seconds: median(times),
                mean_time_seconds: mean,
            });
        }
    }
    out
}

/// Runs every mesh × resolution × variant. Load and input errors are
/// recorded in the rows and never stop the batch.
pub fn run_bench(files: &[PathBuf], config: &BenchConfig) -> BenchReport {
    let meshes: Vec<(String, Result<HalfEdgeMesh, String>)> = files
        .iter()
        .map(|p| {
            let name = p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned());
            (name, load_mesh_file(p).map_err(|e| e.to_string()))
        })
        .collect();

    let mut tasks = Vec::new();
    for (name, mesh) in &meshes {
        for &resolution in &config.resolutions {
            let resampled = mesh.as_ref().map(|m| at_resolution(m, resolution)).map_err(String::clone);
            for variant in Variant::ALL {
                tasks.push((name.as_str(), resampled.clone(), resolution, variant));
            }
        }
    }

    let work = || -> Vec<BenchRow> {
        tasks
            .par_iter()
            .map(|(name, mesh, resolution, variant)| match mesh {
                Ok(m) => run_one(name, m, *resolution, *variant, config),
                Err(e) => BenchRow {
                    mesh: name.to_string(),
                    resolution: *resolution,
                    faces: 0,
                    variant: variant.name().to_string(),
                    status: None,
                    error: Some(e.clone()),
                    remaining_uncollapses: 0,
                    hausdorff_percent: None,
                    coverage_percent: None,
                    aspect_ratio: None,
                    wall_time_seconds: 0.0,
                },
            })
            .collect()
    };
    let rows = match config.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let aggregates = aggregate(&rows, &config.resolutions);
    BenchReport {
        schema: SCHEMA_VERSION,
        seed: config.seed,
        rows,
        aggregates,
    }
}

pub fn write_csv<W: Write>(report: &BenchReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in &report.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
