//! Convex polygons in the plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dot2(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Line `x · (cos θ, sin θ) = offset`, `θ ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutLine {
    pub theta: f64,
    pub offset: f64,
}

impl CutLine {
    pub fn normal(&self) -> Point {
        [self.theta.cos(), self.theta.sin()]
    }
}

/// Bounded convex polygon, vertices counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<Point>> for ConvexPolygon {
    type Error = Error;
    fn try_from(v: Vec<Point>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ConvexPolygon> for Vec<Point> {
    fn from(p: ConvexPolygon) -> Self {
        p.vertices
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum::<f64>()
}

impl ConvexPolygon {
    /// Validates at least three vertices, counterclockwise convex turns
    /// (cross products ≥ -1e-12 relative to the edge lengths) and positive area.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidParameter(format!(
                "polygon needs >= 3 vertices, got {n}"
            )));
        }
        if vertices
            .iter()
            .any(|v| !v[0].is_finite() || !v[1].is_finite())
        {
            return Err(Error::InvalidParameter(
                "polygon vertices must be finite".into(),
            ));
        }
        for i in 0..n {
            let e0 = sub(vertices[(i + 1) % n], vertices[i]);
            let e1 = sub(vertices[(i + 2) % n], vertices[(i + 1) % n]);
            if cross(e0, e1) < -1e-12 * norm(e0) * norm(e1) {
                return Err(Error::InvalidParameter(format!(
                    "polygon is not convex and counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        if !(signed_area(&vertices) > 0.0) {
            return Err(Error::InvalidParameter(
                "polygon has nonpositive area".into(),
            ));
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self> {
        Self::new(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    }

    pub fn unit_square() -> Self {
        Self::rectangle(0.0, 0.0, 1.0, 1.0).expect("valid square")
    }

    /// Regular `n`-gon with circumradius `r` centred at the origin.
    pub fn regular(n: usize, r: f64) -> Result<Self> {
        let verts = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        Self::new(verts)
    }

    /// Convex hull (monotone chain) of `points`.
    pub fn hull(points: &[Point]) -> Result<Self> {
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        pts.dedup();
        if pts.len() < 3 {
            return Err(Error::Degenerate("fewer than 3 distinct points".into()));
        }
        let mut lower: Vec<Point> = Vec::new();
        for &p in &pts {
            while lower.len() >= 2
                && cross(
                    sub(lower[lower.len() - 1], lower[lower.len() - 2]),
                    sub(p, lower[lower.len() - 1]),
                ) <= 0.0
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Point> = Vec::new();
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(
                    sub(upper[upper.len() - 1], upper[upper.len() - 2]),
                    sub(p, upper[upper.len() - 1]),
                ) <= 0.0
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        Self::new(lower)
    }

    /// Seeded random convex polygon with 3 to 9 vertices, diameter at most 2.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let n = rng.gen_range(3..=9);
            let sx = rng.gen_range(0.4..=1.0);
            let sy = rng.gen_range(0.4..=1.0);
            let rot: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let pts: Vec<Point> = (0..n)
                .map(|_| {
                    let a: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
                    let (x, y) = (sx * a.cos(), sy * a.sin());
                    [x * rot.cos() - y * rot.sin(), x * rot.sin() + y * rot.cos()]
                })
                .collect();
            if let Ok(poly) = Self::hull(&pts) {
                if poly.area() > 0.15 && poly.min_width().0 > 0.2 {
                    return poly;
                }
            }
        }
    }

    pub(crate) fn from_clip(vertices: Vec<Point>) -> Option<Self> {
        let mut v: Vec<Point> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if v.last().is_none_or(|&q: &Point| q != p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        if v.len() < 3 || !(signed_area(&v) > 0.0) {
            return None;
        }
        Some(Self { vertices: v })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Point {
        let v = &self.vertices;
        let n = v.len();
        let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
        // Shift to the first vertex to limit cancellation.
        let o = v[0];
        for i in 0..n {
            let p = sub(v[i], o);
            let q = sub(v[(i + 1) % n], o);
            let c = cross(p, q);
            a += c;
            cx += (p[0] + q[0]) * c;
            cy += (p[1] + q[1]) * c;
        }
        [o[0] + cx / (3.0 * a), o[1] + cy / (3.0 * a)]
    }

    /// `(min, max)` of `x · direction` over the polygon.
    pub fn support(&self, direction: Point) -> (f64, f64) {
        self.vertices
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                let s = dot2(v, direction);
                (lo.min(s), hi.max(s))
            })
    }

    /// Pieces on the sides `x·n ≤ c` (left) and `x·n ≥ c` (right) of `line`;
    /// an empty side is `None`.
    pub fn clip(&self, line: &CutLine) -> (Option<ConvexPolygon>, Option<ConvexPolygon>) {
        let n = line.normal();
        let c = line.offset;
        let v = &self.vertices;
        let m = v.len();
        let side: Vec<f64> = v.iter().map(|&p| dot2(p, n) - c).collect();
        let mut left = Vec::with_capacity(m + 2);
        let mut right = Vec::with_capacity(m + 2);
        for i in 0..m {
            let j = (i + 1) % m;
            let (si, sj) = (side[i], side[j]);
            if si <= 0.0 {
                left.push(v[i]);
            }
            if si >= 0.0 {
                right.push(v[i]);
            }
            if (si < 0.0 && sj > 0.0) || (si > 0.0 && sj < 0.0) {
                let t = si / (si - sj);
                let d = sub(v[j], v[i]);
                let x = [v[i][0] + t * d[0], v[i][1] + t * d[1]];
                left.push(x);
                right.push(x);
            }
        }
        (Self::from_clip(left), Self::from_clip(right))
    }

    /// Minimal width and the unit normal of the supporting strip, by
    /// rotating calipers over the edges.
    pub fn min_width(&self) -> (f64, Point) {
        let v = &self.vertices;
        let n = v.len();
        let mut best = (f64::INFINITY, [1.0, 0.0]);
        let mut j = 1;
        for i in 0..n {
            let a = v[i];
            let e = sub(v[(i + 1) % n], a);
            let len = norm(e);
            if len == 0.0 {
                continue;
            }
            let dist = |k: usize| cross(e, sub(v[k % n], a)) / len;
            if j < i + 1 {
                j = i + 1;
            }
            while dist(j + 1) >= dist(j) && (j + 1) % n != i {
                j += 1;
            }
            let w = dist(j);
            if w < best.0 {
                best = (w, [-e[1] / len, e[0] / len]);
            }
        }
        best
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let mut d: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                d = d.max(norm(sub(v[i], v[j])));
            }
        }
        d
    }

    pub fn contains(&self, x: Point, slack: f64) -> bool {
        let v = &self.vertices;
        let n = v.len();
        (0..n).all(|i| {
            let e = sub(v[(i + 1) % n], v[i]);
            cross(e, sub(x, v[i])) >= -slack * norm(e)
        })
    }
}
