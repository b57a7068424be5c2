//! Piecewise-linear finite elements shared by the 1D oracle and the 2D
//! certificates: assembly, a skyline Cholesky solver, inverse iteration for
//! the `p = 2` generalized eigenproblem, and the shifted p-quotient with its
//! analytic gradient.

use crate::error::{Error, Result};
use crate::quad::{GAUSS5, TRIANGLE7};

/// One P1 element (segment or triangle).
#[derive(Debug, Clone)]
pub struct Element {
    pub nodes: [usize; 3],
    pub arity: usize,
    /// Gradient of each local basis function (constant on the element).
    pub grads: [[f64; 2]; 3],
    /// Quadrature weight times `f` at each reference quadrature point.
    pub qwf: Vec<f64>,
    /// `∫_e f`, the sum of `qwf`.
    pub weight_integral: f64,
}

/// A P1 space with element-wise quadrature of the weight.
#[derive(Debug, Clone)]
pub struct P1Space {
    pub n_nodes: usize,
    pub elements: Vec<Element>,
    /// Local basis values at the reference quadrature points.
    pub basis: Vec<[f64; 3]>,
}

impl P1Space {
    /// Segments between consecutive `nodes`, weight `f` integrated by
    /// five-point Gauss rules per cell.
    pub fn interval<F: Fn(f64) -> f64>(nodes: &[f64], f: F) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "nodes must be strictly ascending".into(),
            ));
        }
        let basis = GAUSS5
            .iter()
            .map(|&(t, _)| [0.5 * (1.0 - t), 0.5 * (1.0 + t), 0.0])
            .collect();
        let elements = nodes
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let h = w[1] - w[0];
                let qwf: Vec<f64> = GAUSS5
                    .iter()
                    .map(|&(t, wt)| 0.5 * h * wt * f(w[0] + 0.5 * h * (1.0 + t)))
                    .collect();
                Element {
                    nodes: [i, i + 1, 0],
                    arity: 2,
                    grads: [[-1.0 / h, 0.0], [1.0 / h, 0.0], [0.0, 0.0]],
                    weight_integral: qwf.iter().sum(),
                    qwf,
                }
            })
            .collect();
        Ok(Self {
            n_nodes: nodes.len(),
            elements,
            basis,
        })
    }

    /// Triangles over `points`, weight integrated by the seven-point rule.
    pub fn triangles<F: Fn([f64; 2]) -> f64>(
        points: &[[f64; 2]],
        tris: &[[usize; 3]],
        f: F,
    ) -> Result<Self> {
        let basis = TRIANGLE7.iter().map(|&(b, _)| b).collect();
        let mut elements = Vec::with_capacity(tris.len());
        for t in tris {
            let [a, b, c] = t.map(|i| points[i]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if det.abs() <= 0.0 {
                return Err(Error::Mesh(format!("degenerate triangle {t:?}")));
            }
            let area = 0.5 * det.abs();
            let grads = [
                [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
                [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
                [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
            ];
            let qwf: Vec<f64> = TRIANGLE7
                .iter()
                .map(|&(l, w)| {
                    let x = [
                        l[0] * a[0] + l[1] * b[0] + l[2] * c[0],
                        l[0] * a[1] + l[1] * b[1] + l[2] * c[1],
                    ];
                    w * area * f(x)
                })
                .collect();
            elements.push(Element {
                nodes: *t,
                arity: 3,
                grads,
                weight_integral: qwf.iter().sum(),
                qwf,
            });
        }
        Ok(Self {
            n_nodes: points.len(),
            elements,
            basis,
        })
    }

    /// Weighted stiffness `∫ f ∇φ_i·∇φ_j` and mass `∫ f φ_i φ_j`.
    pub fn assemble(&self) -> (SparseSym, SparseSym) {
        let mut k = Triplets::new(self.n_nodes);
        let mut m = Triplets::new(self.n_nodes);
        for e in &self.elements {
            for a in 0..e.arity {
                for b in 0..e.arity {
                    let g = e.grads[a][0] * e.grads[b][0] + e.grads[a][1] * e.grads[b][1];
                    k.add(e.nodes[a], e.nodes[b], g * e.weight_integral);
                    let mass: f64 = e
                        .qwf
                        .iter()
                        .zip(&self.basis)
                        .map(|(w, phi)| w * phi[a] * phi[b])
                        .sum();
                    m.add(e.nodes[a], e.nodes[b], mass);
                }
            }
        }
        (k.build(), m.build())
    }

    fn quad_values(&self, e: &Element, u: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for phi in &self.basis {
            let mut v = 0.0;
            for a in 0..e.arity {
                v += phi[a] * u[e.nodes[a]];
            }
            out.push(v);
        }
    }

    fn gradient(e: &Element, u: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for a in 0..e.arity {
            g[0] += e.grads[a][0] * u[e.nodes[a]];
            g[1] += e.grads[a][1] * u[e.nodes[a]];
        }
        g
    }
}

struct Triplets {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }
    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.entries.push((i, j, v));
    }
    fn build(mut self) -> SparseSym {
        self.entries.sort_by_key(|a| (a.0, a.1));
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.n];
        for (i, j, v) in self.entries {
            match rows[i].last_mut() {
                Some(last) if last.0 == j => last.1 += v,
                _ => rows[i].push((j, v)),
            }
        }
        SparseSym { rows }
    }
}

/// Symmetric sparse matrix stored by rows (both triangles present).
#[derive(Debug, Clone)]
pub struct SparseSym {
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn quadratic(&self, x: &[f64]) -> f64 {
        dot(x, &self.matvec(x))
    }

    /// `self + s · other`, assuming compatible patterns are merged.
    pub fn axpy(&self, s: f64, other: &SparseSym) -> SparseSym {
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut out: Vec<(usize, f64)> = Vec::with_capacity(a.len().max(b.len()));
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
                        out.push(a[i]);
                        i += 1;
                    } else if i >= a.len() || b[j].0 < a[i].0 {
                        out.push((b[j].0, s * b[j].1));
                        j += 1;
                    } else {
                        out.push((a[i].0, a[i].1 + s * b[j].1));
                        i += 1;
                        j += 1;
                    }
                }
                out
            })
            .collect();
        SparseSym { rows }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Reverse Cuthill–McKee ordering of the matrix graph.
fn rcm(matrix: &SparseSym) -> Vec<usize> {
    let n = matrix.n();
    let degree: Vec<usize> = matrix.rows.iter().map(|r| r.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs = |start: usize, visited: &mut Vec<bool>, order: &mut Vec<usize>| -> usize {
        let begin = order.len();
        visited[start] = true;
        order.push(start);
        let mut head = begin;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let mut nbrs: Vec<usize> = matrix.rows[v]
                .iter()
                .map(|&(j, _)| j)
                .filter(|&j| !visited[j])
                .collect();
            nbrs.sort_by_key(|&j| (degree[j], j));
            for j in nbrs {
                if !visited[j] {
                    visited[j] = true;
                    order.push(j);
                }
            }
        }
        order[order.len() - 1]
    };
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // One extra sweep moves the start towards a peripheral node.
        let mut scratch_visited = visited.clone();
        let mut scratch = Vec::new();
        let far = bfs(seed, &mut scratch_visited, &mut scratch);
        bfs(far, &mut visited, &mut order);
    }
    order.reverse();
    order
}

/// Envelope (skyline) Cholesky factor of a permuted SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl Cholesky {
    pub fn factor(matrix: &SparseSym) -> Result<Self> {
        let n = matrix.n();
        let perm = rcm(matrix);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (old, row) in matrix.rows.iter().enumerate() {
            let i = inv[old];
            for &(oj, _) in row {
                let j = inv[oj];
                if j < i {
                    first[i] = first[i].min(j);
                }
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0; offset[n]];
        for (old, row) in matrix.rows.iter().enumerate() {
            let i = inv[old];
            for &(oj, v) in row {
                let j = inv[oj];
                if j <= i {
                    values[offset[i] + j - first[i]] += v;
                }
            }
        }
        for i in 0..n {
            for j in first[i]..=i {
                let start = first[i].max(first[j]);
                let mut sum = values[offset[i] + j - first[i]];
                for k in start..j {
                    sum -= values[offset[i] + k - first[i]] * values[offset[j] + k - first[j]];
                }
                if j < i {
                    values[offset[i] + j - first[i]] = sum / values[offset[j] + j - first[j]];
                } else {
                    if !(sum > 0.0) {
                        return Err(Error::Solver(format!(
                            "matrix not positive definite at pivot {i}"
                        )));
                    }
                    values[offset[i] + i - first[i]] = sum.sqrt();
                }
            }
        }
        Ok(Self {
            perm,
            first,
            offset,
            values,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let row = &self.values[self.offset[i]..self.offset[i] + i - self.first[i]];
            let sum = y[i]
                - row
                    .iter()
                    .zip(&y[self.first[i]..i])
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            y[i] = sum / self.values[self.offset[i] + i - self.first[i]];
        }
        for i in (0..n).rev() {
            y[i] /= self.values[self.offset[i] + i - self.first[i]];
            let yi = y[i];
            let row = &self.values[self.offset[i]..self.offset[i] + i - self.first[i]];
            for (yk, a) in y[self.first[i]..i].iter_mut().zip(row) {
                *yk -= a * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

/// Result of an iterative eigenvalue computation.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn deflate_constant(x: &mut [f64], m_ones: &[f64], ones_mass: f64) {
    let c = dot(x, m_ones) / ones_mass;
    x.iter_mut().for_each(|v| *v -= c);
}

/// Smallest nonzero eigenvalue of `K x = λ M x` where `K` annihilates
/// constants, by inverse iteration on `K + σM` with the constant mode
/// projected out in the `M` inner product.
pub fn smallest_nontrivial(
    k: &SparseSym,
    m: &SparseSym,
    sigma: f64,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<EigenPair> {
    let factor = Cholesky::factor(&k.axpy(sigma, m))?;
    let ones = vec![1.0; k.n()];
    let m_ones = m.matvec(&ones);
    let ones_mass = dot(&ones, &m_ones);
    let mut x = start.to_vec();
    deflate_constant(&mut x, &m_ones, ones_mass);
    let mut lambda_prev = f64::INFINITY;
    for it in 1..=max_iter {
        let mut y = factor.solve(&m.matvec(&x));
        deflate_constant(&mut y, &m_ones, ones_mass);
        let my = m.matvec(&y);
        let norm = dot(&y, &my).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Solver("inverse iteration collapsed to zero".into()));
        }
        y.iter_mut().for_each(|v| *v /= norm);
        let lambda = k.quadratic(&y);
        x = y;
        if it >= 5 && (lambda - lambda_prev).abs() <= tol * lambda {
            return Ok(EigenPair {
                lambda,
                vector: x,
                iterations: it,
                converged: true,
            });
        }
        lambda_prev = lambda;
    }
    Ok(EigenPair {
        lambda: lambda_prev,
        vector: x,
        iterations: max_iter,
        converged: false,
    })
}

/// The shifted quotient `∫ |∇u|^p f / min_t ∫ |u - t|^p f` on a P1 space.
pub struct PQuotient<'a> {
    pub space: &'a P1Space,
    pub p: f64,
}

#[inline]
fn signed_pow(v: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().powf(e)
    }
}

impl<'a> PQuotient<'a> {
    pub fn new(space: &'a P1Space, p: f64) -> Self {
        Self { space, p }
    }

    fn all_quad_values(&self, u: &[f64]) -> Vec<f64> {
        let mut all = Vec::with_capacity(self.space.elements.len() * self.space.basis.len());
        let mut buf = Vec::new();
        for e in &self.space.elements {
            self.space.quad_values(e, u, &mut buf);
            all.extend_from_slice(&buf);
        }
        all
    }

    fn weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.space
            .elements
            .iter()
            .flat_map(|e| e.qwf.iter().copied())
    }

    /// Root `t*` of `∫ |u - t|^{p-2}(u - t) f = 0`, bracketed by the range
    /// of `u` and refined by safeguarded Newton steps.
    fn shift_from_values(&self, vals: &[f64]) -> Result<f64> {
        let p = self.p;
        let (mut lo, mut hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        if !(hi > lo) {
            return Err(Error::Degenerate("function is constant".into()));
        }
        let span = hi - lo;
        let weights: Vec<f64> = self.weights().collect();
        let eval = |t: f64| -> (f64, f64) {
            let mut g = 0.0;
            let mut dg = 0.0;
            for (&v, &w) in vals.iter().zip(&weights) {
                let d = v - t;
                if d != 0.0 {
                    let a = d.abs().powf(p - 2.0);
                    g += w * a * d;
                    dg -= (p - 1.0) * w * a;
                }
            }
            (g, dg)
        };
        // Newton inside the bracket, with a forced bisection whenever two
        // iterations fail to halve it. For p < 2 the derivative is singular
        // where u = t, so a short Newton step is only accepted once g is
        // seen to change sign across it.
        let mut t = 0.5 * (lo + hi);
        let mut checkpoint = hi - lo;
        for it in 0..400 {
            let (g, dg) = eval(t);
            if g == 0.0 {
                return Ok(t);
            }
            if g > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            if hi - lo <= 4.0 * f64::EPSILON * (span + t.abs()) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let newton = t - g / dg;
            let mut next = if dg < 0.0 && newton.is_finite() && newton > lo && newton < hi {
                newton
            } else {
                mid
            };
            if it % 2 == 1 {
                if hi - lo > 0.5 * checkpoint {
                    next = mid;
                }
                checkpoint = hi - lo;
            }
            let step = (next - t).abs();
            let delta = 2.0 * step + 4.0 * f64::EPSILON * (span + next.abs());
            if step <= 4.0 * f64::EPSILON * (span + t.abs()) + 1e-12 * span {
                let (below, above) = (next - delta, next + delta);
                if below > lo && above < hi && eval(below).0 >= 0.0 && eval(above).0 <= 0.0 {
                    return Ok(next);
                }
            }
            t = next;
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn optimal_shift(&self, u: &[f64]) -> Result<f64> {
        self.shift_from_values(&self.all_quad_values(u))
    }

    fn numerator(&self, u: &[f64]) -> f64 {
        self.space
            .elements
            .iter()
            .map(|e| {
                let g = P1Space::gradient(e, u);
                (g[0] * g[0] + g[1] * g[1]).sqrt().powf(self.p) * e.weight_integral
            })
            .sum()
    }

    fn denominator(&self, vals: &[f64], t: f64) -> f64 {
        vals.iter()
            .zip(self.weights())
            .map(|(&v, w)| w * (v - t).abs().powf(self.p))
            .sum()
    }

    /// Quotient value and the optimal shift used.
    pub fn value(&self, u: &[f64]) -> Result<(f64, f64)> {
        let vals = self.all_quad_values(u);
        let t = self.shift_from_values(&vals)?;
        let den = self.denominator(&vals, t);
        if !(den > 0.0) {
            return Err(Error::Degenerate("zero denominator".into()));
        }
        Ok((self.numerator(u) / den, t))
    }

    /// Quotient and its gradient with respect to the nodal values. The
    /// shift is optimal, so its own variation drops out of the gradient.
    pub fn value_and_gradient(&self, u: &[f64]) -> Result<(f64, Vec<f64>)> {
        let p = self.p;
        let vals = self.all_quad_values(u);
        let t = self.shift_from_values(&vals)?;
        let den = self.denominator(&vals, t);
        if !(den > 0.0) {
            return Err(Error::Degenerate("zero denominator".into()));
        }
        let num = self.numerator(u);
        let q = num / den;
        let mut grad = vec![0.0; u.len()];
        let nq = self.space.basis.len();
        for (ei, e) in self.space.elements.iter().enumerate() {
            let g = P1Space::gradient(e, u);
            let norm = (g[0] * g[0] + g[1] * g[1]).sqrt();
            let scale = if norm > 0.0 {
                p * norm.powf(p - 2.0) * e.weight_integral
            } else {
                0.0
            };
            for a in 0..e.arity {
                let dn = scale * (g[0] * e.grads[a][0] + g[1] * e.grads[a][1]);
                let mut dd = 0.0;
                for (qi, phi) in self.space.basis.iter().enumerate() {
                    let v = vals[ei * nq + qi] - t;
                    dd += e.qwf[qi] * p * signed_pow(v, p - 1.0) * phi[a];
                }
                grad[e.nodes[a]] += (dn - q * dd) / den;
            }
        }
        Ok((q, grad))
    }
}

/// Outcome of a descent run.
#[derive(Debug, Clone)]
pub struct Descent {
    pub value: f64,
    pub u: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Relative floor applied to `|∇u|` and `|u - t|` when forming the
/// linearised p-weights of the preconditioner.
const LINEARIZATION_FLOOR: f64 = 1e-3;

impl<'a> PQuotient<'a> {
    /// SPD preconditioner `K_c + q M_d` where `c = |∇u|^{p-2}` per element
    /// and `d = |u - t|^{p-2}` per quadrature point, both floored relative
    /// to their maxima. At `p = 2` this is `K + q M`.
    pub fn preconditioner(&self, u: &[f64], t: f64, q: f64) -> Result<Cholesky> {
        let p = self.p;
        let space = self.space;
        let grad_norms: Vec<f64> = space
            .elements
            .iter()
            .map(|e| {
                let g = P1Space::gradient(e, u);
                (g[0] * g[0] + g[1] * g[1]).sqrt()
            })
            .collect();
        let gmax = grad_norms.iter().fold(0.0f64, |a, &b| a.max(b));
        let umax = u.iter().fold(0.0f64, |a, &v| a.max((v - t).abs()));
        let mut k = Triplets::new(space.n_nodes);
        let mut m = Triplets::new(space.n_nodes);
        let mut buf = Vec::new();
        for (e, &gn) in space.elements.iter().zip(&grad_norms) {
            let c = gn.max(LINEARIZATION_FLOOR * gmax).powf(p - 2.0) * e.weight_integral;
            space.quad_values(e, u, &mut buf);
            for a in 0..e.arity {
                for b in 0..e.arity {
                    let g = e.grads[a][0] * e.grads[b][0] + e.grads[a][1] * e.grads[b][1];
                    k.add(e.nodes[a], e.nodes[b], c * g);
                    let mass: f64 = e
                        .qwf
                        .iter()
                        .zip(&space.basis)
                        .zip(&buf)
                        .map(|((w, phi), &v)| {
                            let d = (v - t).abs().max(LINEARIZATION_FLOOR * umax).powf(p - 2.0);
                            w * d * phi[a] * phi[b]
                        })
                        .sum();
                    m.add(e.nodes[a], e.nodes[b], mass);
                }
            }
        }
        Cholesky::factor(&k.build().axpy(q, &m.build()))
    }
}

const STALL_WINDOW: usize = 50;

/// Preconditioned steepest descent with Armijo backtracking on the shifted
/// quotient. The direction is `-P^{-1} ∇Q`, with `P` rebuilt at every
/// iterate by [`PQuotient::preconditioner`]; for `p = 2` this is a fixed
/// `K + λM`. Stops once the predicted decrease `-∇Q·d` falls below
/// `tol · Q`, or the quotient decreases by less than `tol · Q` over
/// [`STALL_WINDOW`] iterations.
pub fn descend(
    quotient: &PQuotient<'_>,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Descent> {
    let normalize = |u: &mut Vec<f64>| -> Result<()> {
        let t = quotient.optimal_shift(u)?;
        let m = u.iter().fold(0.0f64, |a, &v| a.max((v - t).abs()));
        u.iter_mut().for_each(|v| *v = (*v - t) / m);
        Ok(())
    };
    let mut u = start.to_vec();
    normalize(&mut u)?;
    let (mut q, mut grad) = quotient.value_and_gradient(&u)?;
    let mut alpha: f64 = 1.0;
    let mut fixed: Option<Cholesky> = None;
    let mut checkpoint = q;
    for it in 1..=max_iter {
        let precond = if quotient.p == 2.0 {
            if fixed.is_none() {
                fixed = Some(quotient.preconditioner(&u, 0.0, q)?);
            }
            fixed.as_ref().expect("set above")
        } else {
            fixed = Some(quotient.preconditioner(&u, 0.0, q)?);
            fixed.as_ref().expect("set above")
        };
        let d: Vec<f64> = precond.solve(&grad).into_iter().map(|v| -v).collect();
        let slope = dot(&grad, &d);
        // The stationarity test also fires once the quotient stalls over a
        // window: for steep weights the gradient is dominated by rounding.
        let stalled = if it % STALL_WINDOW == 0 {
            let stalled = checkpoint - q <= tol * q;
            checkpoint = q;
            stalled
        } else {
            false
        };
        if !(slope < 0.0) || -slope <= tol * q || stalled {
            return Ok(Descent {
                value: q,
                u,
                iterations: it,
                converged: true,
            });
        }
        // Try a long step first; Newton-like directions accept α ≈ 1.
        alpha = (alpha * 2.0).min(4.0);
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = u.iter().zip(&d).map(|(a, b)| a + alpha * b).collect();
            if let Ok((qt, _)) = quotient.value(&trial) {
                if qt <= q + 1e-4 * alpha * slope {
                    accepted = Some(trial);
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some(mut next) = accepted else {
            // No decrease representable in floating point: stationary.
            return Ok(Descent {
                value: q,
                u,
                iterations: it,
                converged: true,
            });
        };
        normalize(&mut next)?;
        let (qn, gn) = quotient.value_and_gradient(&next)?;
        u = next;
        q = qn;
        grad = gn;
    }
    Ok(Descent {
        value: q,
        u,
        iterations: max_iter,
        converged: false,
    })
}
