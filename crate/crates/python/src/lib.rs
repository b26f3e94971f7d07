//! Python module `foldnet`: load and simplify meshes, unfold them into
//! overlap-free nets and export the result as SVG.

use nalgebra::Point3;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use foldnet_cli::svg::render_svg;
use foldnet_core::decimate::{decimate_to, CollapseStrategy};
use foldnet_core::error::{MeshError, PipelineError};
use foldnet_core::mesh::{load_mesh_file, HalfEdgeMesh};
use foldnet_core::pipeline::{direct_unfold, progressive_unfold, PipelineConfig, UnfoldOutcome};

fn mesh_err(e: MeshError) -> PyErr {
    match e {
        MeshError::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn pipeline_err(e: PipelineError) -> PyErr {
    match e {
        PipelineError::Mesh(e) => mesh_err(e),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn compact(mesh: &HalfEdgeMesh) -> PyResult<HalfEdgeMesh> {
    let (p, t) = mesh.to_triangles();
    HalfEdgeMesh::from_triangles(p, &t).map_err(mesh_err)
}

/// Triangle mesh.
#[pyclass(frozen, module = "foldnet")]
struct Mesh {
    inner: HalfEdgeMesh,
}

#[pymethods]
impl Mesh {
    #[new]
    fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[u32; 3]>) -> PyResult<Self> {
        let positions = vertices.into_iter().map(Point3::from).collect();
        let inner = HalfEdgeMesh::from_triangles(positions, &triangles).map_err(mesh_err)?;
        Ok(Self { inner })
    }

    /// Reads an OBJ, OFF or STL file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: load_mesh_file(path).map_err(mesh_err)?,
        })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn face_count(&self) -> usize {
        self.inner.face_count()
    }

    /// Genus, or `None` unless the mesh is closed and connected.
    #[getter]
    fn genus(&self) -> Option<u32> {
        self.inner.validate().genus
    }

    fn vertices(&self) -> Vec<[f64; 3]> {
        let (p, _) = self.inner.to_triangles();
        p.into_iter().map(|p| [p.x, p.y, p.z]).collect()
    }

    fn triangles(&self) -> Vec<[u32; 3]> {
        self.inner.to_triangles().1
    }

    /// Simplified copy with at most `target` faces.
    #[pyo3(signature = (target, strategy = "q/q"))]
    fn decimate(&self, target: usize, strategy: &str) -> PyResult<Self> {
        let strategy: CollapseStrategy = strategy.parse().map_err(PyValueError::new_err)?;
        let mut m = self.inner.clone();
        decimate_to(&mut m, target, strategy);
        Ok(Self { inner: compact(&m)? })
    }

    fn __repr__(&self) -> String {
        format!("Mesh(vertices={}, faces={})", self.inner.vertex_count(), self.inner.face_count())
    }
}

/// Result of an unfolding run.
#[pyclass(frozen, module = "foldnet")]
struct Net {
    outcome: UnfoldOutcome,
}

#[pymethods]
impl Net {
    /// "success", "approximative" or "failed".
    #[getter]
    fn status(&self) -> &'static str {
        self.outcome.status.as_str()
    }

    #[getter]
    fn remaining_uncollapses(&self) -> usize {
        self.outcome.remaining_uncollapses()
    }

    #[getter]
    fn coverage_percent(&self) -> Option<f64> {
        self.outcome.metrics.coverage_percent
    }

    #[getter]
    fn aspect_ratio(&self) -> Option<f64> {
        self.outcome.metrics.aspect_ratio
    }

    #[getter]
    fn hausdorff_percent(&self) -> Option<f64> {
        self.outcome.metrics.hausdorff_percent
    }

    /// The unfolded mesh, which is coarser than the input when approximative.
    #[getter]
    fn mesh(&self) -> PyResult<Mesh> {
        Ok(Mesh {
            inner: compact(&self.outcome.mesh)?,
        })
    }

    /// Planar corners of every face in face order; empty on failure.
    fn triangles(&self) -> Vec<[[f64; 2]; 3]> {
        self.outcome
            .layout
            .iter()
            .flat_map(|l| l.iter())
            .map(|(_, t)| t.map(|p| [p.x, p.y]))
            .collect()
    }

    /// Run counters as a dict.
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let s = &self.outcome.stats;
        let d = PyDict::new(py);
        d.set_item("input_faces", s.input_faces)?;
        d.set_item("target_faces", s.target_faces)?;
        d.set_item("decimated_faces", s.decimated_faces)?;
        d.set_item("final_faces", s.final_faces)?;
        d.set_item("collapses", s.collapses)?;
        d.set_item("uncollapses", s.uncollapses)?;
        d.set_item("local_repairs", s.local_repairs)?;
        d.set_item("tabu_iterations", s.tabu_iterations)?;
        d.set_item("tabu_moves", s.tabu_moves)?;
        Ok(d)
    }

    /// SVG drawing with cuts solid and folds dashed, `scale` mm per unit.
    #[pyo3(signature = (scale = 10.0))]
    fn svg(&self, scale: f64) -> PyResult<String> {
        match (&self.outcome.tree, &self.outcome.layout) {
            (Some(tree), Some(layout)) => Ok(render_svg(&self.outcome.mesh, tree, layout, scale)),
            _ => Err(PyValueError::new_err("failed runs have no net")),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Net(status={}, faces={}, remaining_uncollapses={})",
            self.status(),
            self.outcome.mesh.face_count(),
            self.remaining_uncollapses()
        )
    }
}

/// Unfolds `mesh` progressively, or with tabu search on the full mesh when
/// `direct` is set.
#[pyfunction]
#[allow(clippy::too_many_arguments)]
#[pyo3(signature = (mesh, *, seed = 0, strategy = "q/q", direct = false, target_faces = None, step_budget = None, allow_boundary = false))]
fn unfold(
    py: Python<'_>,
    mesh: &Mesh,
    seed: u64,
    strategy: &str,
    direct: bool,
    target_faces: Option<usize>,
    step_budget: Option<usize>,
    allow_boundary: bool,
) -> PyResult<Net> {
    let config = PipelineConfig {
        strategy: strategy.parse().map_err(PyValueError::new_err)?,
        target_faces,
        step_budget,
        allow_boundary,
        ..PipelineConfig::default()
    };
    let input = &mesh.inner;
    let outcome = py
        .detach(|| {
            if direct {
                direct_unfold(input, &config, seed)
            } else {
                progressive_unfold(input, &config, seed)
            }
        })
        .map_err(pipeline_err)?;
    Ok(Net { outcome })
}

#[pymodule]
fn foldnet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Mesh>()?;
    m.add_class::<Net>()?;
    m.add_function(wrap_pyfunction!(unfold, m)?)?;
    Ok(())
}
