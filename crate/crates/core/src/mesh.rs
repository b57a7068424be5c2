//! Deterministic Delaunay meshes of convex polygons.

use spade::{DelaunayTriangulation, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::geometry::{cross, norm, sub, ConvexPolygon, Point};

#[derive(Debug, Clone)]
pub struct TriMesh {
    pub points: Vec<Point>,
    /// Counterclockwise vertex indices.
    pub triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| triangle_area(t.map(|i| self.points[i])))
            .sum()
    }

    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(a, b)| norm(sub(self.points[a], self.points[b])))
            .fold(0.0, f64::max)
    }
}

fn triangle_area(t: [Point; 3]) -> f64 {
    0.5 * cross(sub(t[1], t[0]), sub(t[2], t[0]))
}

/// Points on the boundary at spacing at most `h`, plus a hexagonal lattice
/// of spacing `h` anchored at the bounding-box corner and kept at least
/// `h/2` away from the boundary, triangulated by Delaunay.
pub fn triangulate(poly: &ConvexPolygon, h: f64) -> Result<TriMesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "mesh size must be positive, got {h}"
        )));
    }
    let v = poly.vertices();
    let n = v.len();
    let mut points: Vec<Point> = Vec::new();
    for i in 0..n {
        let a = v[i];
        let e = sub(v[(i + 1) % n], a);
        let segments = (norm(e) / h).ceil().max(1.0) as usize;
        for k in 0..segments {
            let t = k as f64 / segments as f64;
            points.push([a[0] + t * e[0], a[1] + t * e[1]]);
        }
    }
    let (x0, x1) = poly.support([1.0, 0.0]);
    let (y0, y1) = poly.support([0.0, 1.0]);
    let dy = h * 3f64.sqrt() / 2.0;
    let rows = ((y1 - y0) / dy).floor() as usize;
    let cols = ((x1 - x0) / h).floor() as usize + 1;
    if rows.saturating_mul(cols) > 5_000_000 {
        return Err(Error::Mesh(format!("mesh size {h} yields too many points")));
    }
    for j in 0..=rows {
        let y = y0 + j as f64 * dy;
        let shift = if j % 2 == 1 { 0.5 * h } else { 0.0 };
        for i in 0..=cols {
            let x = [x0 + shift + i as f64 * h, y];
            if poly.contains(x, -0.5 * h) {
                points.push(x);
            }
        }
    }
    let vertices: Vec<Point2<f64>> = points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let dt: DelaunayTriangulation<Point2<f64>> =
        DelaunayTriangulation::bulk_load(vertices).map_err(|e| Error::Mesh(format!("{e:?}")))?;
    let points: Vec<Point> = dt
        .vertices()
        .map(|v| [v.position().x, v.position().y])
        .collect();
    let floor = 1e-12 * h * h;
    let mut triangles = Vec::with_capacity(dt.num_inner_faces());
    for face in dt.inner_faces() {
        let mut idx = face.vertices().map(|v| v.fix().index());
        let mut a = triangle_area(idx.map(|i| points[i]));
        if a < 0.0 {
            idx.swap(1, 2);
            a = -a;
        }
        if a > floor {
            triangles.push(idx);
        }
    }
    let mesh = TriMesh { points, triangles };
    let area = poly.area();
    if mesh.triangles.is_empty() || (mesh.area() - area).abs() > 1e-9 * area {
        return Err(Error::Mesh(format!(
            "triangulation covers area {} of polygon area {area}",
            mesh.area()
        )));
    }
    Ok(mesh)
}
