//! Bound certificates: machine-checkable records of `λ ≥ (π_p / scale)^p`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen1d::{
    exponential_eigenvalue, first_nontrivial_eigenvalue, kappa_reduction_check, EigenProblem,
    REDUCTION_SLACK,
};
use crate::error::{Error, Result};
use crate::fem::{descend, smallest_nontrivial, P1Space, PQuotient};
use crate::field::{PlanarWeight, ScalarField, Shifted};
use crate::geometry::{dot2, ConvexPolygon};
use crate::mesh::triangulate;
use crate::ptrig::{wirtinger_bound, PExponent};
use crate::rayleigh::minimize_quotient;
use crate::slicing::{decompose, reduce_to_1d, reduction_residuals, zero_moment_shift};
use crate::weights::{random_log_concave, random_smooth_log_concave, WeightFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    #[serde(rename = "proposition_1d")]
    Proposition1d,
    LemmaExponential,
    LemmaReduction,
    #[serde(rename = "theorem_2d")]
    Theorem2d,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Proposition1d => "proposition_1d",
            CertificateKind::LemmaExponential => "lemma_exponential",
            CertificateKind::LemmaReduction => "lemma_reduction",
            CertificateKind::Theorem2d => "theorem_2d",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// The certificate passes iff `margin ≥ -rel_tol · bound`.
    pub rel_tol: f64,
    /// Tolerance handed to the eigenvalue solver.
    pub solver_tol: f64,
    /// Absolute discretization allowance subtracted from the bound.
    pub discretization: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// JSON description of the input.
    pub input: String,
    pub seed: Option<u64>,
}

/// Agreement of the computed eigenvalue with an independent method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub method: String,
    pub lambda: f64,
    pub rel_error: f64,
    pub limit: f64,
    pub pass: bool,
}

impl CrossCheck {
    pub fn new(method: &str, lambda: f64, reference: f64, limit: f64) -> Self {
        let rel_error = (lambda - reference).abs() / reference.abs();
        CrossCheck {
            method: method.into(),
            lambda,
            rel_error,
            limit,
            pass: rel_error <= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub kind: CertificateKind,
    pub p: f64,
    /// Interval length or domain diameter.
    pub scale: f64,
    /// `None` when the solver failed; see `diagnostics`.
    pub computed_lambda: Option<f64>,
    pub bound: f64,
    pub margin: Option<f64>,
    pub pass: bool,
    pub tolerances: Tolerances,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cross_check: Option<CrossCheck>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub diagnostics: Option<String>,
}

impl BoundCertificate {
    pub fn new(
        kind: CertificateKind,
        p: f64,
        scale: f64,
        lambda: f64,
        bound: f64,
        tolerances: Tolerances,
        provenance: Provenance,
    ) -> Self {
        let margin = lambda - bound;
        let pass = margin + tolerances.discretization >= -tolerances.rel_tol * bound;
        BoundCertificate {
            kind,
            p,
            scale,
            computed_lambda: Some(lambda),
            bound,
            margin: Some(margin),
            pass,
            tolerances,
            provenance,
            cross_check: None,
            diagnostics: None,
        }
    }

    pub fn failed(
        kind: CertificateKind,
        p: f64,
        scale: f64,
        bound: f64,
        tolerances: Tolerances,
        provenance: Provenance,
        error: &Error,
    ) -> Self {
        BoundCertificate {
            kind,
            p,
            scale,
            computed_lambda: None,
            bound,
            margin: None,
            pass: false,
            tolerances,
            provenance,
            cross_check: None,
            diagnostics: Some(error.to_string()),
        }
    }

    pub fn with_cross_check(mut self, check: CrossCheck) -> Self {
        self.cross_check = Some(check);
        self
    }

    /// Bound verdict and, when present, the cross-check verdict.
    pub fn holds(&self) -> bool {
        self.pass && self.cross_check.as_ref().is_none_or(|c| c.pass)
    }

    /// `kind seed=.. p=.. scale=..` label for failure listings.
    pub fn label(&self) -> String {
        let seed = self
            .provenance
            .seed
            .map_or_else(|| "-".into(), |s| s.to_string());
        format!(
            "{} seed={} p={} scale={}",
            self.kind.as_str(),
            seed,
            self.p,
            self.scale
        )
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(String::new, |v| format!("{v:.12e}"));
        format!(
            "{},{},{},{},{:.12e},{},{}",
            self.kind.as_str(),
            self.p,
            self.scale,
            opt(self.computed_lambda),
            self.bound,
            opt(self.margin),
            self.holds()
        )
    }
}

fn provenance_order(a: &BoundCertificate, b: &BoundCertificate) -> Ordering {
    a.kind
        .cmp(&b.kind)
        .then(a.provenance.seed.cmp(&b.provenance.seed))
        .then(a.p.total_cmp(&b.p))
        .then(a.scale.total_cmp(&b.scale))
        .then(a.provenance.input.cmp(&b.provenance.input))
}

/// Sorts by kind, seed, `p`, scale and input description.
pub fn sort_certificates(certs: &mut [BoundCertificate]) {
    certs.sort_by(provenance_order);
}

pub const CSV_HEADER: &str = "kind,p,scale,lambda,bound,margin,pass";

pub fn to_csv(certs: &[BoundCertificate]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for c in certs {
        out.push_str(&c.csv_row());
        out.push('\n');
    }
    out
}

pub fn to_json_lines(certs: &[BoundCertificate]) -> String {
    certs
        .iter()
        .map(|c| serde_json::to_string(c).expect("certificates serialize") + "\n")
        .collect()
}

fn describe<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("inputs serialize")
}

/// Settings of the one-dimensional batches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchConfig {
    pub length: f64,
    pub solver_tol: f64,
    pub rel_tol: f64,
    /// Nodes of the discretized oracle at `p = 2`.
    pub oracle_nodes: usize,
    pub oracle_limit: f64,
    /// Every `subsample`-th seed is also cross-checked at `p ≠ 2`; 0 disables.
    pub subsample: u64,
    pub subsample_nodes: usize,
    pub subsample_limit: f64,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            length: 1.0,
            solver_tol: 1e-10,
            rel_tol: 1e-6,
            oracle_nodes: 2001,
            oracle_limit: 1e-4,
            subsample: 20,
            subsample_nodes: 401,
            subsample_limit: 5e-3,
        }
    }
}

impl BatchConfig {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel_tol: self.rel_tol,
            solver_tol: self.solver_tol,
            discretization: 0.0,
        }
    }
}

/// Certificate of the one-dimensional inequality for a single weight.
pub fn certify_weight(
    weight: &WeightFunction,
    p: PExponent,
    config: &BatchConfig,
    seed: Option<u64>,
    oracle_nodes: Option<(usize, f64)>,
) -> BoundCertificate {
    let length = weight.length();
    let bound = wirtinger_bound(p, length);
    let provenance = Provenance {
        input: describe(weight),
        seed,
    };
    let kind = CertificateKind::Proposition1d;
    let prob = EigenProblem::new(weight.clone(), p);
    let lambda = match first_nontrivial_eigenvalue(&prob, config.solver_tol) {
        Ok(r) => r.lambda,
        Err(e) => {
            return BoundCertificate::failed(
                kind,
                p.get(),
                length,
                bound,
                config.tolerances(),
                provenance,
                &e,
            )
        }
    };
    let cert = BoundCertificate::new(
        kind,
        p.get(),
        length,
        lambda,
        bound,
        config.tolerances(),
        provenance,
    );
    match oracle_nodes {
        None => cert,
        Some((nodes, limit)) => match minimize_quotient(weight, p, nodes, 1e-12, seed.unwrap_or(0))
        {
            Ok(r) => cert.with_cross_check(CrossCheck::new(
                &format!("p1_fem_{nodes}"),
                r.lambda_h,
                lambda,
                limit,
            )),
            Err(e) => {
                let mut cert = cert.with_cross_check(CrossCheck {
                    method: format!("p1_fem_{nodes}"),
                    lambda: f64::NAN,
                    rel_error: f64::INFINITY,
                    limit,
                    pass: false,
                });
                cert.diagnostics = Some(format!("oracle failed: {e}"));
                cert
            }
        },
    }
}

fn p_values(p_grid: &[f64]) -> Result<Vec<PExponent>> {
    p_grid.iter().map(|&p| PExponent::new(p)).collect()
}

/// One certificate per seed and exponent for seeded random log-concave
/// weights on `[0, L]`, cross-checked against the discretized quotient at
/// `p = 2` and on a seed subsample otherwise.
pub fn verify_proposition(
    seeds: &[u64],
    p_grid: &[f64],
    config: &BatchConfig,
) -> Result<Vec<BoundCertificate>> {
    let ps = p_values(p_grid)?;
    let jobs: Vec<(u64, PExponent)> = seeds
        .iter()
        .flat_map(|&s| ps.iter().map(move |&p| (s, p)))
        .collect();
    let mut certs: Vec<BoundCertificate> = jobs
        .par_iter()
        .map(|&(seed, p)| {
            let oracle = if p.get() == 2.0 {
                Some((config.oracle_nodes, config.oracle_limit))
            } else if config.subsample > 0 && seed % config.subsample == 0 {
                Some((config.subsample_nodes, config.subsample_limit))
            } else {
                None
            };
            match random_log_concave(seed, config.length) {
                Ok(w) => certify_weight(&w, p, config, Some(seed), oracle),
                Err(e) => BoundCertificate::failed(
                    CertificateKind::Proposition1d,
                    p.get(),
                    config.length,
                    wirtinger_bound(p, config.length),
                    config.tolerances(),
                    Provenance {
                        input: format!("random_log_concave({seed})"),
                        seed: Some(seed),
                    },
                    &e,
                ),
            }
        })
        .collect();
    sort_certificates(&mut certs);
    Ok(certs)
}

/// Exponential weights `e^{κx}`, shooting cross-checked by the Riccati
/// length oracle.
pub fn verify_exponential(
    kappas: &[f64],
    p_grid: &[f64],
    config: &BatchConfig,
) -> Result<Vec<BoundCertificate>> {
    let ps = p_values(p_grid)?;
    let jobs: Vec<(f64, PExponent)> = kappas
        .iter()
        .flat_map(|&k| ps.iter().map(move |&p| (k, p)))
        .collect();
    let mut certs: Vec<BoundCertificate> = jobs
        .par_iter()
        .map(|&(kappa, p)| {
            let kind = CertificateKind::LemmaExponential;
            let length = config.length;
            let bound = wirtinger_bound(p, length);
            let fail = |e: &Error| {
                BoundCertificate::failed(
                    kind,
                    p.get(),
                    length,
                    bound,
                    config.tolerances(),
                    Provenance {
                        input: format!("{{\"kappa\":{kappa}}}"),
                        seed: None,
                    },
                    e,
                )
            };
            let weight = match WeightFunction::exponential(kappa, length) {
                Ok(w) => w,
                Err(e) => return fail(&e),
            };
            let provenance = Provenance {
                input: describe(&weight),
                seed: None,
            };
            let prob = EigenProblem::new(weight, p);
            let shot = first_nontrivial_eigenvalue(&prob, config.solver_tol);
            let oracle = exponential_eigenvalue(p, kappa, length, config.solver_tol);
            match (shot, oracle) {
                (Ok(s), Ok(o)) => BoundCertificate::new(
                    kind,
                    p.get(),
                    length,
                    s.lambda,
                    bound,
                    config.tolerances(),
                    provenance,
                )
                .with_cross_check(CrossCheck::new("riccati", o, s.lambda, 1e-6)),
                (Err(e), _) | (_, Err(e)) => fail(&e),
            }
        })
        .collect();
    sort_certificates(&mut certs);
    Ok(certs)
}

/// Reduction to the exponential comparison weight `e^{κx}` with
/// `κ = (log f)'` at the eigenfunction zero: certifies `λ(f) ≥ λ(e^{κx})`
/// (the bound of these certificates) on seeded smooth weights.
pub fn verify_reduction(
    seeds: &[u64],
    p_grid: &[f64],
    config: &BatchConfig,
) -> Result<Vec<BoundCertificate>> {
    let ps = p_values(p_grid)?;
    let jobs: Vec<(u64, PExponent)> = seeds
        .iter()
        .flat_map(|&s| ps.iter().map(move |&p| (s, p)))
        .collect();
    let tolerances = Tolerances {
        rel_tol: REDUCTION_SLACK,
        ..config.tolerances()
    };
    let mut certs: Vec<BoundCertificate> = jobs
        .par_iter()
        .map(|&(seed, p)| {
            let kind = CertificateKind::LemmaReduction;
            let length = config.length;
            let fallback = Provenance {
                input: format!("random_smooth_log_concave({seed})"),
                seed: Some(seed),
            };
            let weight = match random_smooth_log_concave(seed, length) {
                Ok(w) => w,
                Err(e) => {
                    return BoundCertificate::failed(
                        kind,
                        p.get(),
                        length,
                        f64::NAN,
                        tolerances,
                        fallback,
                        &e,
                    )
                }
            };
            let provenance = Provenance {
                input: describe(&weight),
                seed: Some(seed),
            };
            match kappa_reduction_check(&EigenProblem::new(weight, p), config.solver_tol) {
                Ok(r) => {
                    let mut c = BoundCertificate::new(
                        kind,
                        p.get(),
                        length,
                        r.lambda_weight,
                        r.lambda_exponential,
                        tolerances,
                        provenance,
                    );
                    c.pass &= r.lambda_exponential >= r.bound * (1.0 - REDUCTION_SLACK);
                    c
                }
                Err(e) => BoundCertificate::failed(
                    kind,
                    p.get(),
                    length,
                    wirtinger_bound(p, length),
                    tolerances,
                    provenance,
                    &e,
                ),
            }
        })
        .collect();
    sort_certificates(&mut certs);
    Ok(certs)
}

/// Largest distance between two points of the polygon.
pub fn diameter(poly: &ConvexPolygon) -> f64 {
    poly.diameter()
}

/// Discrete first nontrivial eigenvalue on a P1 triangulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrete2d {
    pub lambda_h: f64,
    pub mesh_h: f64,
    pub n_nodes: usize,
    pub n_triangles: usize,
    pub converged: bool,
}

/// Minimal discrete quotient over P1 functions on a Delaunay mesh of
/// `poly`: inverse iteration at `p = 2`, preconditioned descent from the
/// `p = 2` eigenvector otherwise.
pub fn discrete_eigenvalue_2d(
    poly: &ConvexPolygon,
    w: &PlanarWeight,
    p: PExponent,
    mesh_h: f64,
    tol: f64,
) -> Result<Discrete2d> {
    w.validate()?;
    let mesh = triangulate(poly, mesh_h)?;
    // Normalise the weight at the centroid; the quotient is scale-free.
    let c = poly.centroid();
    let log_ref = w.log_value(c);
    let space = P1Space::triangles(&mesh.points, &mesh.triangles, |x| {
        (w.log_value(x) - log_ref).exp()
    })?;
    let (k, m) = space.assemble();
    let d = poly.diameter();
    let sigma = 0.1 * (std::f64::consts::PI / d).powi(2);
    let dir = {
        let v = poly.vertices();
        let mut best = (0.0, [1.0, 0.0]);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let e = [v[j][0] - v[i][0], v[j][1] - v[i][1]];
                let l = e[0].hypot(e[1]);
                if l > best.0 {
                    best = (l, [e[0] / l, e[1] / l]);
                }
            }
        }
        best.1
    };
    let start: Vec<f64> = mesh
        .points
        .iter()
        .map(|&x| dot2([x[0] - c[0], x[1] - c[1]], dir))
        .collect();
    let pair = smallest_nontrivial(&k, &m, sigma, &start, tol.max(1e-13), 5000)?;
    let (lambda_h, converged) = if p.get() == 2.0 {
        (pair.lambda, pair.converged)
    } else {
        let q = PQuotient::new(&space, p.get());
        let run = descend(&q, &pair.vector, tol, 2000)?;
        (run.value, run.converged)
    };
    Ok(Discrete2d {
        lambda_h,
        mesh_h,
        n_nodes: mesh.points.len(),
        n_triangles: mesh.triangles.len(),
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct TheoremInput<'a> {
    polygon: &'a ConvexPolygon,
    weight: &'a PlanarWeight,
    mesh_h: f64,
}

/// Certificate of `λ_h ≥ (π_p / d)^p - tol_h` on a triangulation with
/// target edge length `mesh_h`. Conforming P1 quotients bound the
/// continuum infimum from above, so `tol_h = 0` is sound.
pub fn verify_theorem_2d(
    poly: &ConvexPolygon,
    w: &PlanarWeight,
    p: PExponent,
    mesh_h: f64,
    tol: f64,
    tol_h: f64,
    seed: Option<u64>,
) -> BoundCertificate {
    let d = diameter(poly);
    let bound = wirtinger_bound(p, d);
    let tolerances = Tolerances {
        rel_tol: 1e-9,
        solver_tol: tol,
        discretization: tol_h,
    };
    let provenance = Provenance {
        input: describe(&TheoremInput {
            polygon: poly,
            weight: w,
            mesh_h,
        }),
        seed,
    };
    let kind = CertificateKind::Theorem2d;
    match discrete_eigenvalue_2d(poly, w, p, mesh_h, tol) {
        Ok(r) => {
            let mut c =
                BoundCertificate::new(kind, p.get(), d, r.lambda_h, bound, tolerances, provenance);
            if !r.converged {
                c.diagnostics = Some(
                    "discrete solver stopped before convergence; λ_h is still a discrete quotient"
                        .into(),
                );
            }
            c
        }
        Err(e) => BoundCertificate::failed(kind, p.get(), d, bound, tolerances, provenance, &e),
    }
}

/// Seeded (polygon, weight) pairs.
pub fn verify_theorem_batch(
    seeds: &[u64],
    p: PExponent,
    mesh_h: f64,
    tol: f64,
) -> Vec<BoundCertificate> {
    let mut certs: Vec<BoundCertificate> = seeds
        .par_iter()
        .map(|&s| {
            verify_theorem_2d(
                &ConvexPolygon::random(s),
                &PlanarWeight::random(s),
                p,
                mesh_h,
                tol,
                0.0,
                Some(s),
            )
        })
        .collect();
    sort_certificates(&mut certs);
    certs
}

/// Row of the slicing convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicingRow {
    pub epsilon: f64,
    pub slices: usize,
    pub area_error: f64,
    pub max_moment: f64,
    pub max_width: f64,
    pub min_margin: f64,
    /// `max (r1 + r2 + r3) / area` over the slices.
    pub max_residual_ratio: f64,
    pub residual_total: f64,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlicingReport {
    pub p: f64,
    pub diameter: f64,
    pub bound: f64,
    pub shift: f64,
    pub rows: Vec<SlicingRow>,
    pub certificates: Vec<BoundCertificate>,
    /// Residual ratios nonincreasing along the rows (ε decreasing).
    pub residuals_monotone: bool,
}

/// Residual ratios below this are rounding noise of an exactly vanishing
/// residual and compare as equal.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

/// `r[k+1] ≤ r[k]` up to [`RESIDUAL_FLOOR`].
pub fn residuals_nonincreasing(ratios: &[f64]) -> bool {
    ratios.windows(2).all(|r| r[1] <= r[0] + RESIDUAL_FLOOR)
}

/// Decomposes `poly` for each `ε`, solves every slice's reduced problem
/// and checks `λ_i ≥ (π_p / d)^p` with `d` the diameter of `poly`. The
/// field is shifted to zero moment first.
pub fn verify_slicing_bound(
    poly: &ConvexPolygon,
    u: &dyn ScalarField,
    w: &PlanarWeight,
    p: PExponent,
    epsilons: &[f64],
    moment_tol: f64,
    solver_tol: f64,
) -> Result<SlicingReport> {
    let d = diameter(poly);
    let bound = wirtinger_bound(p, d);
    let shift = zero_moment_shift(poly, u, w, p)?;
    let shifted = Shifted { inner: u, shift };
    let tolerances = Tolerances {
        rel_tol: 1e-6,
        solver_tol,
        discretization: 0.0,
    };
    let mut eps: Vec<f64> = epsilons.to_vec();
    eps.sort_by(|a, b| b.total_cmp(a));
    let mut rows = Vec::new();
    let mut certificates = Vec::new();
    for &epsilon in &eps {
        let dec = decompose(poly, &shifted, w, p, epsilon, moment_tol)?;
        let per_slice: Vec<(BoundCertificate, f64, f64)> = dec
            .slices
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let provenance = Provenance {
                    input: format!("{{\"epsilon\":{epsilon},\"slice\":{i}}}"),
                    seed: None,
                };
                let kind = CertificateKind::Proposition1d;
                let cert = match reduce_to_1d(s, w, p)
                    .and_then(|prob| first_nontrivial_eigenvalue(&prob, solver_tol))
                {
                    Ok(r) => BoundCertificate::new(
                        kind,
                        p.get(),
                        d,
                        r.lambda,
                        bound,
                        tolerances,
                        provenance,
                    ),
                    Err(e) => BoundCertificate::failed(
                        kind,
                        p.get(),
                        d,
                        bound,
                        tolerances,
                        provenance,
                        &e,
                    ),
                };
                let r = reduction_residuals(s, &shifted, w, p);
                (cert, r.sum() / s.area, r.sum())
            })
            .collect();
        let area = poly.area();
        rows.push(SlicingRow {
            epsilon,
            slices: dec.slices.len(),
            area_error: (dec.total_area() - area).abs() / area,
            max_moment: dec
                .slices
                .iter()
                .map(|s| s.moment.abs())
                .fold(0.0, f64::max),
            max_width: dec.slices.iter().map(|s| s.width).fold(0.0, f64::max),
            min_margin: per_slice
                .iter()
                .map(|c| c.0.margin.unwrap_or(f64::NEG_INFINITY))
                .fold(f64::INFINITY, f64::min),
            max_residual_ratio: per_slice.iter().map(|c| c.1).fold(0.0, f64::max),
            residual_total: per_slice.iter().map(|c| c.2).sum(),
            all_pass: per_slice.iter().all(|c| c.0.holds()),
        });
        certificates.extend(per_slice.into_iter().map(|c| c.0));
    }
    let residuals_monotone = residuals_nonincreasing(
        &rows
            .iter()
            .map(|r| r.max_residual_ratio)
            .collect::<Vec<_>>(),
    );
    Ok(SlicingReport {
        p: p.get(),
        diameter: d,
        bound,
        shift,
        rows,
        certificates,
        residuals_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::AffineField;
    use std::f64::consts::PI;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn margin_is_exact_difference() {
        let t = Tolerances {
            rel_tol: 1e-6,
            solver_tol: 1e-10,
            discretization: 0.0,
        };
        let prov = Provenance {
            input: "{}".into(),
            seed: None,
        };
        let c = BoundCertificate::new(
            CertificateKind::Proposition1d,
            2.0,
            1.0,
            10.0,
            PI * PI,
            t,
            prov.clone(),
        );
        assert_eq!(c.margin, Some(10.0 - PI * PI));
        assert!(c.pass);
        let bad = BoundCertificate::new(
            CertificateKind::Proposition1d,
            2.0,
            1.0,
            PI * PI * (1.0 - 2e-6),
            PI * PI,
            t,
            prov,
        );
        assert!(!bad.pass);
    }

    #[test]
    fn constant_weight_is_sharp() {
        let cfg = BatchConfig::default();
        for pv in [1.5, 2.0, 3.0] {
            let c = certify_weight(
                &WeightFunction::constant(1.0).unwrap(),
                p(pv),
                &cfg,
                None,
                None,
            );
            assert!(c.margin.unwrap().abs() <= 1e-6 * c.bound, "{c:?}");
            assert!(c.holds());
        }
    }

    #[test]
    fn exponential_margin_is_quarter_kappa_squared() {
        let cfg = BatchConfig::default();
        let certs = verify_exponential(&[4.0], &[2.0], &cfg).unwrap();
        let c = &certs[0];
        assert!((c.margin.unwrap() - 4.0).abs() < 1e-6, "{c:?}");
        assert!(c.holds());
    }

    #[test]
    fn small_proposition_batch_is_sorted_and_passes() {
        let cfg = BatchConfig {
            oracle_nodes: 401,
            oracle_limit: 1e-3,
            subsample: 0,
            ..Default::default()
        };
        let certs = verify_proposition(&[3, 1, 2], &[2.0, 1.5], &cfg).unwrap();
        assert_eq!(certs.len(), 6);
        let seeds: Vec<_> = certs.iter().map(|c| c.provenance.seed.unwrap()).collect();
        assert_eq!(seeds, vec![1, 1, 2, 2, 3, 3]);
        assert!(certs.iter().all(|c| c.holds()), "{}", to_json_lines(&certs));
        assert!(to_csv(&certs).starts_with(CSV_HEADER));
    }

    #[test]
    fn diameters() {
        assert!((diameter(&ConvexPolygon::unit_square()) - 2f64.sqrt()).abs() < 1e-15);
        assert!((diameter(&ConvexPolygon::regular(6, 1.0).unwrap()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_theorem_certificate() {
        let c = verify_theorem_2d(
            &ConvexPolygon::unit_square(),
            &PlanarWeight::Constant { c: 1.0 },
            p(2.0),
            0.1,
            1e-12,
            0.0,
            None,
        );
        let lam = c.computed_lambda.unwrap();
        assert!((lam / (PI * PI) - 1.0).abs() < 0.02, "{lam}");
        assert!(c.holds());
    }

    #[test]
    fn square_slicing_report() {
        let u = AffineField {
            a: 1.0,
            b: 0.0,
            c: 0.0,
        };
        let rep = verify_slicing_bound(
            &ConvexPolygon::unit_square(),
            &u,
            &PlanarWeight::Constant { c: 1.0 },
            p(2.0),
            &[0.5, 0.4],
            1e-10,
            1e-10,
        )
        .unwrap();
        assert!((rep.shift - 0.5).abs() < 1e-12);
        assert!(rep.rows.iter().all(|r| r.all_pass));
        // Horizontal strips of length 1: slice eigenvalues are π².
        for c in &rep.certificates {
            assert!(
                (c.computed_lambda.unwrap() / (PI * PI) - 1.0).abs() < 1e-8,
                "{c:?}"
            );
        }
    }
}
