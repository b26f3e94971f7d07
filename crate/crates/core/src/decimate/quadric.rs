use std::ops::{Add, AddAssign};

use nalgebra::{Matrix3, Matrix4, Point3, Vector3, Vector4};

use crate::mesh::{FaceId, HalfEdgeMesh, VertexId};

/// Symmetric 4x4 form accumulating squared point-to-plane distances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadric(pub Matrix4<f64>);

impl Default for Quadric {
    fn default() -> Self {
        Quadric(Matrix4::zeros())
    }
}

impl Quadric {
    /// Area-weighted quadric of the supporting plane of a face.
    pub fn of_face(mesh: &HalfEdgeMesh, f: FaceId) -> Quadric {
        let [a, _, _] = mesh.face_points(f);
        let n2 = mesh.face_normal(f);
        let len = n2.norm();
        if len == 0.0 {
            return Quadric::default();
        }
        let n = n2 / len;
        let area = 0.5 * len;
        let plane = Vector4::new(n.x, n.y, n.z, -n.dot(&a.coords));
        Quadric(plane * plane.transpose() * area)
    }

    /// Sum of the face quadrics incident to `v` in the current mesh.
    pub fn of_vertex(mesh: &HalfEdgeMesh, v: VertexId) -> Quadric {
        mesh.vertex_faces(v)
            .into_iter()
            .map(|f| Quadric::of_face(mesh, f))
            .fold(Quadric::default(), |a, b| a + b)
    }

    pub fn cost(&self, p: &Point3<f64>) -> f64 {
        let h = p.to_homogeneous();
        (h.transpose() * self.0 * h)[(0, 0)]
    }

    /// Minimiser of the form, if the 3x3 block is well conditioned.
    ///
    /// Rejected when `|det| < 1e-12 * s^3` with `s` the largest absolute
    /// entry of the block.
    pub fn minimizer(&self) -> Option<Point3<f64>> {
        let a: Matrix3<f64> = self.0.fixed_view::<3, 3>(0, 0).into_owned();
        let b: Vector3<f64> = self.0.fixed_view::<3, 1>(0, 3).into_owned();
        let scale = a.amax();
        if scale == 0.0 {
            return None;
        }
        let det = a.determinant();
        if det.abs() < 1e-12 * scale * scale * scale {
            return None;
        }
        let x = a.lu().solve(&(-b))?;
        x.iter().all(|c| c.is_finite()).then(|| Point3::from(x))
    }
}

impl Add for Quadric {
    type Output = Quadric;
    fn add(self, rhs: Quadric) -> Quadric {
        Quadric(self.0 + rhs.0)
    }
}

impl AddAssign for Quadric {
    fn add_assign(&mut self, rhs: Quadric) {
        self.0 += rhs.0;
    }
}
