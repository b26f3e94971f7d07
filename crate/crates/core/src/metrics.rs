//! Net quality measures: minimal-area oriented bounding box, coverage,
//! aspect ratio and sampled Hausdorff distance between two surfaces.

use nalgebra::{Point2, Point3, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust::{orient2d, Coord};
use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::mesh::HalfEdgeMesh;
use crate::pipeline::UnfoldStatus;
use crate::unfold::Layout2D;

/// Default Hausdorff sampling density, in samples per average triangle area.
pub const DEFAULT_SAMPLE_DENSITY: f64 = 10.0;

/// Rectangle with `half_extents.x >= half_extents.y`, its long side along
/// `angle` (radians from +x).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrientedBoundingBox2D {
    pub center: Point2<f64>,
    pub angle: f64,
    pub half_extents: Vector2<f64>,
}

impl OrientedBoundingBox2D {
    pub fn area(&self) -> f64 {
        4.0 * self.half_extents.x * self.half_extents.y
    }

    pub fn width(&self) -> f64 {
        2.0 * self.half_extents.x
    }

    pub fn height(&self) -> f64 {
        2.0 * self.half_extents.y
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.half_extents.x / self.half_extents.y
    }

    /// Whether `p` lies inside, with absolute slack `tol`.
    pub fn contains(&self, p: &Point2<f64>, tol: f64) -> bool {
        let u = Vector2::new(self.angle.cos(), self.angle.sin());
        let d = p - self.center;
        d.dot(&u).abs() <= self.half_extents.x + tol
            && u.perp(&d).abs() <= self.half_extents.y + tol
    }
}

fn coord(p: &Point2<f64>) -> Coord<f64> {
    Coord { x: p.x, y: p.y }
}

/// Convex hull in counter-clockwise order without collinear points
/// (monotone chain with exact orientation tests).
pub fn convex_hull(points: &[Point2<f64>]) -> Vec<Point2<f64>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2<f64>> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2<f64>>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && orient2d(coord(&hull[hull.len() - 2]), coord(&hull[hull.len() - 1]), coord(p)) <= 0.0
            {
                hull.pop();
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

fn box_for_edge(hull: &[Point2<f64>], dir: Vector2<f64>) -> (f64, [f64; 4]) {
    // [min along, max along, min across, max across]
    let n = Vector2::new(-dir.y, dir.x);
    let mut ext = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
    for p in hull {
        let (a, c) = (p.coords.dot(&dir), p.coords.dot(&n));
        ext[0] = ext[0].min(a);
        ext[1] = ext[1].max(a);
        ext[2] = ext[2].min(c);
        ext[3] = ext[3].max(c);
    }
    ((ext[1] - ext[0]) * (ext[3] - ext[2]), ext)
}

fn make_box(dir: Vector2<f64>, ext: [f64; 4]) -> OrientedBoundingBox2D {
    let n = Vector2::new(-dir.y, dir.x);
    let (ha, hc) = (0.5 * (ext[1] - ext[0]), 0.5 * (ext[3] - ext[2]));
    let center = Point2::from(dir * 0.5 * (ext[0] + ext[1]) + n * 0.5 * (ext[2] + ext[3]));
    let (long, half) = if ha >= hc { (dir, Vector2::new(ha, hc)) } else { (n, Vector2::new(hc, ha)) };
    OrientedBoundingBox2D {
        center,
        angle: long.y.atan2(long.x),
        half_extents: half,
    }
}

/// Minimal-area bounding rectangle by rotating calipers over the convex
/// hull; one side of an optimal rectangle is collinear with a hull edge.
pub fn min_area_obb(points: &[Point2<f64>]) -> Option<OrientedBoundingBox2D> {
    let hull = convex_hull(points);
    let n = hull.len();
    if n < 3 {
        return None;
    }
    let dir_of = |i: usize| (hull[(i + 1) % n] - hull[i]).normalize();
    let along = |k: usize, d: &Vector2<f64>| hull[k % n].coords.dot(d);
    let across = |k: usize, d: &Vector2<f64>| {
        let nn = Vector2::new(-d.y, d.x);
        hull[k % n].coords.dot(&nn)
    };

    // caliper indices for the first edge, found by scanning; kept as
    // unwrapped counters so right <= top <= left in hull order
    let d0 = dir_of(0);
    let argmax = |f: &dyn Fn(usize) -> f64| (0..n).max_by(|&a, &b| f(a).total_cmp(&f(b))).unwrap();
    let mut right = argmax(&|k| along(k, &d0));
    let mut top = argmax(&|k| across(k, &d0));
    let mut left = argmax(&|k| -along(k, &d0));
    if top < right {
        top += n;
    }
    if left < top {
        left += n;
    }

    let mut best: Option<(f64, Vector2<f64>, [f64; 4])> = None;
    for i in 0..n {
        let d = dir_of(i);
        while right < i + n && along(right + 1, &d) >= along(right, &d) {
            right += 1;
        }
        top = top.max(right);
        while top < right + n && across(top + 1, &d) >= across(top, &d) {
            top += 1;
        }
        left = left.max(top);
        while left < top + n && along(left + 1, &d) <= along(left, &d) {
            left += 1;
        }
        let ext = [along(left, &d), along(right, &d), across(i, &d), across(top, &d)];
        let area = (ext[1] - ext[0]) * (ext[3] - ext[2]);
        if best.as_ref().is_none_or(|b| area < b.0) {
            best = Some((area, d, ext));
        }
    }
    best.map(|(_, d, ext)| make_box(d, ext))
}

/// Reference minimal box: every hull edge direction scanned against every
/// hull point.
pub fn min_area_obb_brute_force(points: &[Point2<f64>]) -> Option<OrientedBoundingBox2D> {
    let hull = convex_hull(points);
    let n = hull.len();
    if n < 3 {
        return None;
    }
    (0..n)
        .map(|i| {
            let d = (hull[(i + 1) % n] - hull[i]).normalize();
            let (area, ext) = box_for_edge(&hull, d);
            (area, d, ext)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, d, ext)| make_box(d, ext))
}

fn layout_box(layout: &Layout2D) -> Result<OrientedBoundingBox2D, MetricsError> {
    let pts: Vec<Point2<f64>> = layout.points().collect();
    let obb = min_area_obb(&pts).ok_or(MetricsError::DegenerateLayout)?;
    if obb.area() > 0.0 && layout.total_area() > 0.0 {
        Ok(obb)
    } else {
        Err(MetricsError::DegenerateLayout)
    }
}

/// Summed triangle area over minimal bounding-box area, in percent.
pub fn coverage(layout: &Layout2D) -> Result<f64, MetricsError> {
    let obb = layout_box(layout)?;
    Ok(100.0 * layout.total_area() / obb.area())
}

/// Long over short side of the minimal bounding box.
pub fn aspect_ratio(layout: &Layout2D) -> Result<f64, MetricsError> {
    Ok(layout_box(layout)?.aspect_ratio())
}

/// Closest point to `p` on triangle `abc`.
pub fn closest_point_on_triangle(p: &Point3<f64>, a: &Point3<f64>, b: &Point3<f64>, c: &Point3<f64>) -> Point3<f64> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

fn distance_to_mesh(p: &Point3<f64>, tris: &[[Point3<f64>; 3]]) -> f64 {
    let mut best = f64::INFINITY;
    for [a, b, c] in tris {
        let d = (closest_point_on_triangle(p, a, b, c) - p).norm_squared();
        if d < best {
            best = d;
        }
    }
    best.sqrt()
}

/// Surface samples: every vertex plus `round(density * area / mean area)`
/// area-uniform points per face. Each face draws from its own fixed-seed
/// stream, so a higher density only appends samples.
pub fn surface_samples(mesh: &HalfEdgeMesh, density: f64) -> Vec<Point3<f64>> {
    let mut out: Vec<Point3<f64>> = mesh.vertices().map(|v| mesh.position(v)).collect();
    let mean = mesh.surface_area() / mesh.face_count().max(1) as f64;
    if mean <= 0.0 {
        return out;
    }
    for f in mesh.faces() {
        let n = (density * mesh.face_area(f) / mean).round() as usize;
        let [a, b, c] = mesh.face_points(f);
        let mut rng = ChaCha8Rng::seed_from_u64(f.0 as u64);
        for _ in 0..n {
            let (mut r1, mut r2): (f64, f64) = (rng.random(), rng.random());
            if r1 + r2 > 1.0 {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            out.push(a + (b - a) * r1 + (c - a) * r2);
        }
    }
    out
}

fn directed(samples: &[Point3<f64>], target: &HalfEdgeMesh) -> f64 {
    let tris: Vec<[Point3<f64>; 3]> = target.faces().map(|f| target.face_points(f)).collect();
    samples
        .iter()
        .map(|p| distance_to_mesh(p, &tris))
        .fold(0.0, f64::max)
}

/// Symmetric sampled Hausdorff distance as a percentage of the original's
/// bounding-box diagonal.
pub fn hausdorff_relative(original: &HalfEdgeMesh, approx: &HalfEdgeMesh, density: f64) -> f64 {
    let d_ab = directed(&surface_samples(original, density), approx);
    let d_ba = directed(&surface_samples(approx, density), original);
    let diag = original.bounding_box_diagonal();
    if diag == 0.0 {
        return 0.0;
    }
    100.0 * d_ab.max(d_ba) / diag
}

/// Measurements attached to an unfolding result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub status: UnfoldStatus,
    pub coverage_percent: Option<f64>,
    pub aspect_ratio: Option<f64>,
    /// Only for approximative results.
    pub hausdorff_percent: Option<f64>,
    pub wall_time_seconds: f64,
}
