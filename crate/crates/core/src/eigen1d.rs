//! First nontrivial Neumann eigenvalue of the weighted one-dimensional
//! p-Laplacian
//!
//! ```text
//! (f |u'|^{p-2} u')' = -λ f |u|^{p-2} u  on (0, L),   u'(0) = u'(L) = 0,
//! ```
//!
//! computed by shooting in the momentum variables `(u, w = f |u'|^{p-2} u')`.
//! Dividing through by `f` gives the form with the `h'(x) = (log f)'` drift
//! term; the momentum form never differentiates `f`, tolerates weights that
//! vanish at an endpoint, and turns the Neumann condition into `w = 0`.
//!
//! For exponential weights `e^{κx}` the Riccati variable `v = u/u'` solves
//! the autonomous equation `v' = 1 + (μ|v|^p + κv)/(p-1)`, and the interval
//! length equals the blow-up time `∫ dv / v'` over the real line. Solving
//! that length identity for `μ` gives an independent route to the same
//! eigenvalue, see [`exponential_eigenvalue`].
//!
//! The solver treats every `p > 1` the same way: it integrates the
//! equation and never relies on its derivation as an Euler–Lagrange
//! equation, which needs extra care when `1 < p < 2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Dopri5;
use crate::ptrig::{pi_p_closed, wirtinger_bound, PExponent};
use crate::quad;
use crate::weights::WeightFunction;

/// Geometric ratio of the upward eigenvalue scan.
pub const SCAN_RATIO: f64 = 1.5;

const RTOL: f64 = 1e-12;
const ATOL: f64 = 1e-14;
const SCAN_STEPS: usize = 64;
const TRACE_STEPS: usize = 1000;

/// A weight on `[0, L]` together with the exponent `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenProblem {
    pub weight: WeightFunction,
    pub p: PExponent,
}

impl EigenProblem {
    pub fn new(weight: WeightFunction, p: PExponent) -> Self {
        Self { weight, p }
    }

    pub fn length(&self) -> f64 {
        self.weight.length()
    }

    /// `(π_p / L)^p`.
    pub fn wirtinger_bound(&self) -> f64 {
        wirtinger_bound(self.p, self.length())
    }
}

/// Shooting state at a point: eigenfunction value and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingState {
    pub u: f64,
    pub w: f64,
}

impl ShootingState {
    /// Neumann start `u(0) = 1, w(0) = 0`.
    pub const START: Self = Self { u: 1.0, w: 0.0 };
}

/// Sampled eigenfunction.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
}

impl Trace {
    fn push(&mut self, x: f64, u: f64) {
        self.x.push(x);
        self.u.push(u);
    }

    /// Location of the first sign change of `u`, linearly interpolated.
    pub fn first_zero(&self) -> Option<f64> {
        for i in 1..self.u.len() {
            let (u0, u1) = (self.u[i - 1], self.u[i]);
            if u0 == 0.0 {
                return Some(self.x[i - 1]);
            }
            if (u0 > 0.0) != (u1 > 0.0) && u1 != 0.0 {
                let t = u0 / (u0 - u1);
                return Some(self.x[i - 1] + t * (self.x[i] - self.x[i - 1]));
            }
        }
        None
    }

    /// `x,u` rows with nine decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,u\n");
        for (x, u) in self.x.iter().zip(&self.u) {
            out.push_str(&format!("{x:.9},{u:.9}\n"));
        }
        out
    }
}

/// Outcome of one shot at a trial eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    /// Terminal momentum `w(L)`.
    pub w_end: f64,
    /// Number of sign changes of `u` on `[0, L]`.
    pub zero_count: usize,
    pub trace: Trace,
}

/// Converged first nontrivial eigenpair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub lambda: f64,
    /// The unique interior zero of the eigenfunction.
    pub x_zero: f64,
    pub bracket: [f64; 2],
    /// `|w(L)|` at the returned eigenvalue.
    #[serde(rename = "residual")]
    pub shoot_residual: f64,
    pub trace: Trace,
}

/// Weight rescaled to unit maximum so the momentum tolerances do not
/// depend on the overall size of `f`.
struct Normalized<'a> {
    weight: &'a WeightFunction,
    scale: f64,
}

impl<'a> Normalized<'a> {
    fn new(weight: &'a WeightFunction) -> Result<Self> {
        let length = weight.length();
        let n = 256;
        let mut scale: f64 = 0.0;
        for i in 0..=n {
            let x = length * i as f64 / n as f64;
            let f = weight.value_at(x);
            if !f.is_finite() {
                return Err(Error::Degenerate(format!(
                    "weight is not finite at x = {x}"
                )));
            }
            if f <= 0.0 && i > 0 && i < n {
                return Err(Error::SingularWeight { x });
            }
            scale = scale.max(f);
        }
        for k in weight.kinks() {
            scale = scale.max(weight.value_at(k));
        }
        if scale <= 0.0 {
            return Err(Error::SingularWeight { x: 0.0 });
        }
        Ok(Self { weight, scale })
    }

    #[inline]
    fn f(&self, x: f64) -> f64 {
        self.weight.value_at(x) / self.scale
    }
}

#[inline]
fn signed_pow(v: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().powf(e)
    }
}

fn shoot_normalized(
    prob: &EigenProblem,
    norm: &Normalized<'_>,
    lambda: f64,
    steps: usize,
    keep_trace: bool,
) -> Result<Shot> {
    let p = prob.p.get();
    let length = prob.length();
    let inv = 1.0 / (p - 1.0);
    let rhs = |x: f64, y: &[f64; 2]| {
        let f = norm.f(x);
        let du = if y[1] == 0.0 || f <= 0.0 {
            0.0
        } else {
            signed_pow(y[1] / f, inv)
        };
        let dw = -lambda * f * signed_pow(y[0], p - 1.0);
        [du, dw]
    };
    let solver = Dopri5 {
        rtol: RTOL,
        atol: [ATOL, ATOL * lambda.max(1e-300) * length],
        h_max: length / steps.max(1) as f64,
        max_steps: 2_000_000,
    };

    let mut trace = Trace::default();
    let mut zero_count = 0usize;
    let mut positive = true;
    let mut observe = |x: f64, y: &[f64; 2]| {
        if y[0] != 0.0 && (y[0] > 0.0) != positive {
            positive = y[0] > 0.0;
            zero_count += 1;
        }
        if keep_trace {
            trace.push(x, y[0]);
        }
    };
    observe(0.0, &[1.0, 0.0]);

    let mut y = [ShootingState::START.u, ShootingState::START.w];
    let mut x = 0.0;
    let mut h = solver.h_max.min(1e-3 * length);
    for end in prob
        .weight
        .kinks()
        .into_iter()
        .chain(std::iter::once(length))
    {
        let (y_end, h_next) = solver.integrate(rhs, x, y, end, h, &mut observe)?;
        y = y_end;
        x = end;
        h = h_next;
    }
    Ok(Shot {
        w_end: y[1] * norm.scale,
        zero_count,
        trace,
    })
}

/// Integrates from the Neumann start `(u, w) = (1, 0)` at `x = 0` to `x = L`
/// at trial eigenvalue `lambda`. The step never exceeds `L / steps`.
pub fn shoot(prob: &EigenProblem, lambda: f64, steps: usize) -> Result<Shot> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "trial eigenvalue must be >= 0, got {lambda}"
        )));
    }
    let norm = Normalized::new(&prob.weight)?;
    shoot_normalized(prob, &norm, lambda, steps, true)
}

/// Smallest positive `λ` with `w(L; λ) = 0` whose eigenfunction has exactly
/// one zero.
///
/// Scans upward from `(π_p/(2L))^p` by factors of [`SCAN_RATIO`] up to
/// `(100 π_p / L)^p`, then bisects to relative width `tol`. A trial value
/// counts as below the eigenvalue when `u` has at most one zero and
/// `w(L) < 0`, which by Sturm ordering holds exactly on `(0, λ_1)`.
pub fn first_nontrivial_eigenvalue(prob: &EigenProblem, tol: f64) -> Result<EigenResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let p = prob.p.get();
    let length = prob.length();
    let norm = Normalized::new(&prob.weight)?;
    let pi_p = pi_p_closed(prob.p);
    let cap = (100.0 * pi_p / length).powf(p);

    let below = |lambda: f64| -> Result<(bool, usize)> {
        let shot = shoot_normalized(prob, &norm, lambda, SCAN_STEPS, false)?;
        Ok((shot.zero_count <= 1 && shot.w_end < 0.0, shot.zero_count))
    };

    let mut lo = (pi_p / (2.0 * length)).powf(p);
    let (ok, mut last_count) = below(lo)?;
    if !ok {
        return Err(Error::Solver(format!(
            "trial value {lo:e} below the Wirtinger bound is not below the first eigenvalue"
        )));
    }
    let mut hi = lo * SCAN_RATIO;
    loop {
        if hi > cap {
            return Err(Error::BracketFailure { cap });
        }
        let (is_below, count) = below(hi)?;
        if count < last_count {
            return Err(Error::Solver(format!(
                "zero count decreased from {last_count} to {count} at lambda = {hi:e}"
            )));
        }
        last_count = count;
        if !is_below {
            break;
        }
        lo = hi;
        hi *= SCAN_RATIO;
    }

    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid)?.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // A weight nearly vanishing at an end pushes the next mixed eigenvalue
    // within the bracket width; `lo` is always below the eigenvalue.
    let mut lambda = 0.5 * (lo + hi);
    let mut shot = shoot_normalized(prob, &norm, lambda, TRACE_STEPS, true)?;
    if shot.zero_count != 1 {
        lambda = lo;
        shot = shoot_normalized(prob, &norm, lambda, TRACE_STEPS, true)?;
    }
    if shot.zero_count != 1 {
        return Err(Error::Solver(format!(
            "eigenfunction at lambda = {lambda:e} has {} zeros, expected 1",
            shot.zero_count
        )));
    }
    let x_zero = shot
        .trace
        .first_zero()
        .ok_or_else(|| Error::Solver("converged eigenfunction has no zero".into()))?;
    Ok(EigenResult {
        lambda,
        x_zero,
        bracket: [lo, hi],
        shoot_residual: shot.w_end.abs(),
        trace: shot.trace,
    })
}

/// Riccati blow-up length `Λ(μ) = ∫_ℝ dv / (1 + (μ|v|^p + κv)/(p-1))`, or
/// `None` when the denominator has a real root (`μ ≤ (|κ|/p)^p`).
pub fn riccati_length(p: PExponent, kappa: f64, mu: f64, tol: f64) -> Result<Option<f64>> {
    let pv = p.get();
    if !(mu > admissible_floor(p, kappa)) {
        return Ok(None);
    }
    // s = (μ/(p-1))^{1/p} v turns the denominator into 1 + s^p ± k s.
    let c = ((pv - 1.0) / mu).powf(1.0 / pv);
    let k = kappa.abs() * c / (pv - 1.0);
    let s_star = (k / pv).powf(1.0 / (pv - 1.0));
    let split = if s_star > 0.0 {
        (2.0 * s_star).max(1.0)
    } else {
        1.0
    };
    let breaks = if s_star > 0.0 { vec![s_star] } else { vec![] };
    let inner_tol = 0.25 * tol / c;
    let plus = quad::half_line(
        |s| 1.0 / (1.0 + s.powf(pv) + k * s),
        split,
        &breaks,
        pv,
        inner_tol,
    )?;
    let minus = quad::half_line(
        |s| 1.0 / (1.0 + s.powf(pv) - k * s),
        split,
        &breaks,
        pv,
        inner_tol,
    )?;
    Ok(Some(c * (plus.value + minus.value)))
}

/// `(|κ|/p)^p`: the Riccati denominator is positive on ℝ iff `μ` exceeds it.
pub fn admissible_floor(p: PExponent, kappa: f64) -> f64 {
    (kappa.abs() / p.get()).powf(p.get())
}

/// Eigenvalue for the weight `e^{κx}` on `[0, L]`, obtained by solving the
/// length identity `Λ(μ) = L` for `μ` by bisection to relative width `tol`.
pub fn exponential_eigenvalue(p: PExponent, kappa: f64, length: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(length > 0.0) || !kappa.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need tol > 0, L > 0 and finite kappa (got {tol}, {length}, {kappa})"
        )));
    }
    let quad_tol = 1e-14 * length;
    let floor = admissible_floor(p, kappa);
    // Λ > L marks μ below the root; inadmissible μ act as Λ = ∞.
    let too_small = |mu: f64| -> Result<bool> {
        Ok(match riccati_length(p, kappa, mu, quad_tol)? {
            Some(len) => len > length,
            None => true,
        })
    };
    let mut lo = floor;
    let mut hi = floor.max(0.0) + wirtinger_bound(p, length);
    let mut doublings = 0;
    while too_small(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::InfeasibleBracket(format!(
                "length {length} not reached for kappa = {kappa}, p = {p}"
            )));
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if too_small(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Numerical check of the reduction `λ(f) ≥ λ(e^{κx}) ≥ (π_p/L)^p` with
/// `κ = (log f)'(x_λ)` at the zero of the eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub lambda_weight: f64,
    pub x_zero: f64,
    pub kappa: f64,
    pub lambda_exponential: f64,
    pub bound: f64,
    pub rel_slack: f64,
    pub holds: bool,
}

/// Relative slack used for the verdict of [`kappa_reduction_check`].
pub const REDUCTION_SLACK: f64 = 1e-6;

pub fn kappa_reduction_check(prob: &EigenProblem, tol: f64) -> Result<ReductionReport> {
    let res = first_nontrivial_eigenvalue(prob, tol)?;
    let kappa = prob.weight.log_derivative(res.x_zero)?;
    let lambda_exponential = exponential_eigenvalue(prob.p, kappa, prob.length(), tol)?;
    let bound = prob.wirtinger_bound();
    let s = REDUCTION_SLACK;
    let holds =
        res.lambda >= lambda_exponential * (1.0 - s) && lambda_exponential >= bound * (1.0 - s);
    Ok(ReductionReport {
        lambda_weight: res.lambda,
        x_zero: res.x_zero,
        kappa,
        lambda_exponential,
        bound,
        rel_slack: s,
        holds,
    })
}
