//! Command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use foldnet_core::decimate::{decimate_to, target_face_count, CollapseStrategy};
use foldnet_core::error::{MeshError, PipelineError};
use foldnet_core::mesh::{load_mesh_file, write_obj, write_off, MeshFormat};
use foldnet_core::metrics::{hausdorff_relative, DEFAULT_SAMPLE_DENSITY};
use foldnet_core::pipeline::{direct_unfold, progressive_unfold, PipelineConfig, UnfoldStatus};

use crate::bench::{corpus_files, run_bench, write_csv, BenchConfig};
use crate::report::RunReport;
use crate::svg::render_svg;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_APPROXIMATIVE: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_INVALID: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Mesh { path: PathBuf, source: MeshError },
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "foldnet", version, about = "Unfold triangle meshes into single-patch papercraft nets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unfold a mesh and write its net.
    Unfold(UnfoldArgs),
    /// Simplify a mesh to a face budget.
    Decimate(DecimateArgs),
    /// Relative Hausdorff distance between two meshes.
    Metrics(MetricsArgs),
    /// Run all variants over a directory of meshes.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Collapse strategy: q/q, se/mp or se/q.
    #[arg(long, default_value = "q/q")]
    pub strategy: CollapseStrategy,
    /// Override the simplification target.
    #[arg(long)]
    pub target_faces: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial tabu budget, in iterations per face.
    #[arg(long, default_value_t = 100)]
    pub budget_factor: usize,
    /// Per-uncollapse repair budget, in iterations per face.
    #[arg(long, default_value_t = 20)]
    pub step_budget_factor: usize,
    /// Absolute per-uncollapse repair budget; 0 keeps the coarse net.
    #[arg(long)]
    pub step_budget: Option<usize>,
    /// Tabu list length (default derived from mesh size).
    #[arg(long)]
    pub tabu_capacity: Option<usize>,
    /// Accept meshes with boundary.
    #[arg(long)]
    pub allow_boundary: bool,
    /// Hausdorff samples per average face area.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_DENSITY)]
    pub density: f64,
}

impl RunConfig {
    pub fn pipeline(&self, trace: bool) -> PipelineConfig {
        PipelineConfig {
            strategy: self.strategy,
            target_faces: self.target_faces,
            budget_factor: self.budget_factor,
            step_budget_factor: self.step_budget_factor,
            step_budget: self.step_budget,
            uncollapse_limit: None,
            allow_boundary: self.allow_boundary,
            tabu_capacity: self.tabu_capacity,
            hausdorff_density: self.density,
            trace,
        }
    }
}

#[derive(Debug, Args)]
pub struct UnfoldArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub config: RunConfig,
    /// Skip simplification and run tabu search on the full mesh.
    #[arg(long)]
    pub direct: bool,
    /// SVG output (default: input name with .svg).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Millimetres per model unit in the SVG.
    #[arg(long, default_value_t = 10.0)]
    pub scale: f64,
    /// OBJ of the final (possibly partially simplified) mesh.
    #[arg(long)]
    pub obj_out: Option<PathBuf>,
    /// JSON report (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// JSON-lines trace of every tabu iteration.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecimateArgs {
    pub input: PathBuf,
    /// Output mesh (.obj or .off).
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value = "q/q")]
    pub strategy: CollapseStrategy,
    /// Default: the unfolding target for this mesh.
    #[arg(long)]
    pub target_faces: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    pub original: PathBuf,
    pub approximation: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_DENSITY)]
    pub density: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub corpus: PathBuf,
    /// Comma-separated face counts.
    #[arg(long, value_delimiter = ',', default_value = "100,200")]
    pub resolutions: Vec<usize>,
    #[command(flatten)]
    pub config: RunConfig,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// JSON report (default: stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(path: &Path) -> Result<foldnet_core::mesh::HalfEdgeMesh, CliError> {
    load_mesh_file(path).map_err(|source| CliError::Mesh {
        path: path.to_path_buf(),
        source,
    })
}

fn exit_code(status: UnfoldStatus) -> i32 {
    match status {
        UnfoldStatus::Success => EXIT_SUCCESS,
        UnfoldStatus::Approximative => EXIT_APPROXIMATIVE,
        UnfoldStatus::Failed => EXIT_FAILED,
    }
}

pub fn cmd_unfold(args: &UnfoldArgs) -> Result<i32, CliError> {
    let mesh = load(&args.input)?;
    let config = args.config.pipeline(args.trace.is_some());
    let seed = args.config.seed;
    let outcome = if args.direct {
        direct_unfold(&mesh, &config, seed)?
    } else {
        progressive_unfold(&mesh, &config, seed)?
    };

    if let (Some(tree), Some(net)) = (&outcome.tree, &outcome.layout) {
        let svg_path = args.svg.clone().unwrap_or_else(|| args.input.with_extension("svg"));
        write_text(&svg_path, &render_svg(&outcome.mesh, tree, net, args.scale))?;
    }
    if let Some(path) = &args.obj_out {
        let mut out = create(path)?;
        write_obj(&outcome.mesh, &mut out)
            .and_then(|_| out.flush())
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    if let Some(path) = &args.trace {
        let mut text = String::new();
        for entry in &outcome.trace {
            text.push_str(&serde_json::to_string(entry).expect("trace serializes"));
            text.push('\n');
        }
        write_text(path, &text)?;
    }

    let (mode, strategy) = if args.direct {
        ("direct", None)
    } else {
        ("progressive", Some(args.config.strategy.name()))
    };
    let report = RunReport::new(&args.input.display().to_string(), mode, strategy, seed, &outcome);
    match &args.report {
        Some(path) => write_text(path, &report.to_json())?,
        None => print!("{}", report.to_json()),
    }
    Ok(exit_code(outcome.status))
}

pub fn cmd_decimate(args: &DecimateArgs) -> Result<i32, CliError> {
    let mut mesh = load(&args.input)?;
    let before = mesh.face_count();
    let target = args
        .target_faces
        .unwrap_or_else(|| target_face_count(before, mesh.surface_genus()));
    let records = decimate_to(&mut mesh, target, args.strategy);
    let mut out = create(&args.output)?;
    let written = match MeshFormat::from_path(&args.output) {
        Some(MeshFormat::Off) => write_off(&mesh, &mut out),
        Some(MeshFormat::Obj) => write_obj(&mesh, &mut out),
        _ => return Err(CliError::Usage(format!("{}: output must be .obj or .off", args.output.display()))),
    };
    written.and_then(|_| out.flush()).map_err(|source| CliError::Io {
        path: args.output.clone(),
        source,
    })?;
    let summary = serde_json::json!({
        "schema": crate::report::SCHEMA_VERSION,
        "input_faces": before,
        "target_faces": target,
        "faces": mesh.face_count(),
        "collapses": records.len(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(EXIT_SUCCESS)
}

pub fn cmd_metrics(args: &MetricsArgs) -> Result<i32, CliError> {
    let original = load(&args.original)?;
    let approx = load(&args.approximation)?;
    let summary = serde_json::json!({
        "schema": crate::report::SCHEMA_VERSION,
        "original_faces": original.face_count(),
        "approximation_faces": approx.face_count(),
        "hausdorff_percent": hausdorff_relative(&original, &approx, args.density),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    Ok(EXIT_SUCCESS)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let files = corpus_files(&args.corpus).map_err(|source| CliError::Io {
        path: args.corpus.clone(),
        source,
    })?;
    let config = BenchConfig {
        resolutions: args.resolutions.clone(),
        seed: args.config.seed,
        jobs: args.jobs,
        pipeline: args.config.pipeline(false),
    };
    let report = run_bench(&files, &config);
    let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &args.report {
        Some(path) => write_text(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(path) = &args.csv {
        write_csv(&report, create(path)?)?;
    }
    Ok(EXIT_SUCCESS)
}

/// Runs a parsed command and maps the result to a process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Unfold(a) => cmd_unfold(a),
        Command::Decimate(a) => cmd_decimate(a),
        Command::Metrics(a) => cmd_metrics(a),
        Command::Bench(a) => cmd_bench(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_INVALID
    })
}
