//! Nonnegative log-concave weights on an interval `[0, L]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed when certifying that piecewise slopes are nonincreasing.
const SLOPE_SLACK: f64 = 1e-12;

/// Parametric weight families. All constructors producing a
/// [`WeightFunction`] check the parameter constraints that make the family
/// log-concave.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum WeightFamily {
    /// `c`.
    Constant { c: f64 },
    /// `exp(κ x)`; `log f = κ x` exactly.
    Exponential { kappa: f64 },
    /// `exp(-a (x - m)^2)`.
    LogQuadratic { a: f64, m: f64 },
    /// `max(x - x0, 0)^α`.
    Power { alpha: f64, x0: f64 },
    /// `exp` of the piecewise-linear interpolant of `logvalues` at
    /// `breakpoints`, extended linearly beyond the first and last breakpoint.
    PiecewiseLogLinear {
        breakpoints: Vec<f64>,
        logvalues: Vec<f64>,
    },
    /// Pointwise product of the factors.
    Product { factors: Vec<WeightFamily> },
}

fn slopes(breakpoints: &[f64], logvalues: &[f64]) -> Vec<f64> {
    breakpoints
        .windows(2)
        .zip(logvalues.windows(2))
        .map(|(b, v)| (v[1] - v[0]) / (b[1] - b[0]))
        .collect()
}

fn segment(breakpoints: &[f64], x: f64) -> usize {
    // Right-hand segment at a breakpoint; the outer segments extend to ±∞.
    let idx = breakpoints.partition_point(|&b| b <= x);
    idx.saturating_sub(1).min(breakpoints.len() - 2)
}

impl WeightFamily {
    fn check(&self, certify: bool) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {v}"
                )))
            }
        };
        match self {
            WeightFamily::Constant { c } => {
                finite("c", *c)?;
                if *c <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "constant weight must be positive, got {c}"
                    )));
                }
            }
            WeightFamily::Exponential { kappa } => finite("kappa", *kappa)?,
            WeightFamily::LogQuadratic { a, m } => {
                finite("a", *a)?;
                finite("m", *m)?;
                if *a < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "log-quadratic needs a >= 0, got {a}"
                    )));
                }
            }
            WeightFamily::Power { alpha, x0 } => {
                finite("alpha", *alpha)?;
                finite("x0", *x0)?;
                if *alpha < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "power weight needs alpha >= 0, got {alpha}"
                    )));
                }
            }
            WeightFamily::PiecewiseLogLinear {
                breakpoints,
                logvalues,
            } => {
                if breakpoints.len() < 2 || breakpoints.len() != logvalues.len() {
                    return Err(Error::InvalidParameter(
                        "piecewise weight needs >= 2 breakpoints and one log-value per breakpoint"
                            .into(),
                    ));
                }
                for (&b, &v) in breakpoints.iter().zip(logvalues) {
                    finite("breakpoint", b)?;
                    finite("log-value", v)?;
                }
                if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::InvalidParameter(
                        "breakpoints must be strictly ascending".into(),
                    ));
                }
                if certify {
                    let s = slopes(breakpoints, logvalues);
                    for (i, w) in s.windows(2).enumerate() {
                        if w[1] > w[0] + SLOPE_SLACK * (1.0 + w[0].abs()) {
                            return Err(Error::Validation(format!(
                                "slope increases at breakpoint {}: {} -> {}",
                                i + 1,
                                w[0],
                                w[1]
                            )));
                        }
                    }
                }
            }
            WeightFamily::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidParameter(
                        "product weight needs at least one factor".into(),
                    ));
                }
                for f in factors {
                    f.check(certify)?;
                }
            }
        }
        Ok(())
    }

    /// `f(x)`, without domain checks.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            WeightFamily::Constant { c } => *c,
            WeightFamily::Power { alpha, x0 } => {
                if *alpha == 0.0 {
                    1.0
                } else if x > *x0 {
                    (x - x0).powf(*alpha)
                } else {
                    0.0
                }
            }
            WeightFamily::Product { factors } => factors.iter().map(|f| f.value(x)).product(),
            _ => self.log_value(x).exp(),
        }
    }

    /// `log f(x)`; `-∞` where the weight vanishes.
    pub fn log_value(&self, x: f64) -> f64 {
        match self {
            WeightFamily::Constant { c } => c.ln(),
            WeightFamily::Exponential { kappa } => kappa * x,
            WeightFamily::LogQuadratic { a, m } => -a * (x - m) * (x - m),
            WeightFamily::Power { alpha, x0 } => {
                if *alpha == 0.0 {
                    0.0
                } else if x > *x0 {
                    alpha * (x - x0).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            WeightFamily::PiecewiseLogLinear {
                breakpoints,
                logvalues,
            } => {
                let k = segment(breakpoints, x);
                let slope =
                    (logvalues[k + 1] - logvalues[k]) / (breakpoints[k + 1] - breakpoints[k]);
                logvalues[k] + slope * (x - breakpoints[k])
            }
            WeightFamily::Product { factors } => factors.iter().map(|f| f.log_value(x)).sum(),
        }
    }

    /// `d/dx log f(x)`, or `None` where `f(x) = 0`.
    pub fn log_derivative(&self, x: f64) -> Option<f64> {
        match self {
            WeightFamily::Constant { .. } => Some(0.0),
            WeightFamily::Exponential { kappa } => Some(*kappa),
            WeightFamily::LogQuadratic { a, m } => Some(-2.0 * a * (x - m)),
            WeightFamily::Power { alpha, x0 } => {
                if *alpha == 0.0 {
                    Some(0.0)
                } else if x > *x0 {
                    Some(alpha / (x - x0))
                } else {
                    None
                }
            }
            WeightFamily::PiecewiseLogLinear {
                breakpoints,
                logvalues,
            } => {
                let k = segment(breakpoints, x);
                Some((logvalues[k + 1] - logvalues[k]) / (breakpoints[k + 1] - breakpoints[k]))
            }
            WeightFamily::Product { factors } => factors.iter().map(|f| f.log_derivative(x)).sum(),
        }
    }

    fn collect_kinks(&self, out: &mut Vec<f64>) {
        match self {
            WeightFamily::PiecewiseLogLinear { breakpoints, .. } => {
                out.extend_from_slice(breakpoints)
            }
            WeightFamily::Power { alpha, x0 } if *alpha != 0.0 => out.push(*x0),
            WeightFamily::Product { factors } => factors.iter().for_each(|f| f.collect_kinks(out)),
            _ => {}
        }
    }

    /// Rate `κ` if the family is (a positive multiple of) `exp(κ x)`.
    pub fn exponential_rate(&self) -> Option<f64> {
        match self {
            WeightFamily::Constant { .. } => Some(0.0),
            WeightFamily::Exponential { kappa } => Some(*kappa),
            WeightFamily::LogQuadratic { a, .. } if *a == 0.0 => Some(0.0),
            WeightFamily::Power { alpha, .. } if *alpha == 0.0 => Some(0.0),
            WeightFamily::Product { factors } => factors.iter().map(|f| f.exponential_rate()).sum(),
            _ => None,
        }
    }
}

/// A log-concave weight together with its domain length `L`.
///
/// Serialises as `{"family": ..., "params": {...}, "L": ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeight")]
pub struct WeightFunction {
    #[serde(flatten)]
    family: WeightFamily,
    #[serde(rename = "L")]
    length: f64,
}

#[derive(Deserialize)]
struct RawWeight {
    #[serde(flatten)]
    family: WeightFamily,
    #[serde(rename = "L")]
    length: f64,
}

impl TryFrom<RawWeight> for WeightFunction {
    type Error = Error;
    fn try_from(raw: RawWeight) -> Result<Self> {
        WeightFunction::new(raw.family, raw.length)
    }
}

impl WeightFunction {
    /// Builds a weight on `[0, length]`, certifying log-concavity of the
    /// parameters.
    pub fn new(family: WeightFamily, length: f64) -> Result<Self> {
        Self::build(family, length, true)
    }

    /// Builds a weight without certifying that piecewise slopes decrease.
    /// Structural checks still apply. Meant for exercising the validator.
    pub fn new_uncertified(family: WeightFamily, length: f64) -> Result<Self> {
        Self::build(family, length, false)
    }

    fn build(family: WeightFamily, length: f64, certify: bool) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "domain length must be positive, got {length}"
            )));
        }
        family.check(certify)?;
        Ok(Self { family, length })
    }

    pub fn constant(length: f64) -> Result<Self> {
        Self::new(WeightFamily::Constant { c: 1.0 }, length)
    }

    pub fn exponential(kappa: f64, length: f64) -> Result<Self> {
        Self::new(WeightFamily::Exponential { kappa }, length)
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Same family restricted to (or extended onto) `[0, length]`.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::build(self.family.clone(), length, false)
    }

    /// `c · f` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let family = WeightFamily::Product {
            factors: vec![WeightFamily::Constant { c }, self.family.clone()],
        };
        Self::build(family, self.length, false)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x >= 0.0 && x <= self.length {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                length: self.length,
            })
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.family.value(x))
    }

    pub fn log_derivative(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        match self.family.log_derivative(x) {
            Some(d) if self.family.value(x) > 0.0 => Ok(d),
            _ => Err(Error::SingularWeight { x }),
        }
    }

    /// Unchecked `f(x)` for solver inner loops.
    #[inline]
    pub(crate) fn value_at(&self, x: f64) -> f64 {
        self.family.value(x)
    }

    /// Points in the open interval `(0, L)` where `log f` has a kink.
    pub fn kinks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.family.collect_kinks(&mut out);
        out.retain(|&k| k > 0.0 && k < self.length);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `κ` if this weight is `c · exp(κ x)`.
    pub fn exponential_rate(&self) -> Option<f64> {
        self.family.exponential_rate()
    }
}

/// Midpoint test `log f((x_i + x_{i+2})/2) ≥ (log f(x_i) + log f(x_{i+2}))/2 - tol`
/// on a uniform grid of `grid_size` points, skipping triples touching a zero.
pub fn validate_log_concavity(w: &WeightFunction, grid_size: usize, tol: f64) -> bool {
    if grid_size < 3 {
        return false;
    }
    let h = w.length() / (grid_size - 1) as f64;
    let logs: Vec<f64> = (0..grid_size)
        .map(|i| {
            let x = if i + 1 == grid_size {
                w.length()
            } else {
                i as f64 * h
            };
            w.family().log_value(x)
        })
        .collect();
    logs.windows(3).all(|t| {
        if t.iter().any(|v| !v.is_finite()) {
            return true;
        }
        t[1] >= 0.5 * (t[0] + t[2]) - tol
    })
}

fn random_simple(rng: &mut ChaCha8Rng, length: f64, smooth: bool) -> WeightFamily {
    let kinds = if smooth { 4 } else { 5 };
    match rng.gen_range(0..kinds) {
        0 => WeightFamily::Constant {
            c: rng.gen_range(0.1..10.0),
        },
        1 => WeightFamily::Exponential {
            kappa: rng.gen_range(-10.0..=10.0),
        },
        2 => WeightFamily::LogQuadratic {
            a: rng.gen_range(0.0..=20.0),
            m: rng.gen_range(-length..=2.0 * length),
        },
        3 => {
            let alpha = rng.gen_range(0.0..=4.0);
            let x0 = if smooth {
                rng.gen_range(-length..=-0.05 * length)
            } else if rng.gen_bool(1.0 / 3.0) {
                0.0
            } else {
                rng.gen_range(-length..=0.0)
            };
            WeightFamily::Power { alpha, x0 }
        }
        _ => {
            let n = rng.gen_range(2..=8usize);
            let mut breakpoints: Vec<f64> =
                (0..n - 2).map(|_| rng.gen_range(0.0..length)).collect();
            breakpoints.push(0.0);
            breakpoints.push(length);
            breakpoints.sort_by(f64::total_cmp);
            breakpoints.dedup();
            let mut s: Vec<f64> = (0..breakpoints.len() - 1)
                .map(|_| rng.gen_range(-10.0..=10.0))
                .collect();
            s.sort_by(|a, b| b.total_cmp(a));
            let mut logvalues = vec![rng.gen_range(-1.0..=1.0)];
            for (k, slope) in s.iter().enumerate() {
                let next = logvalues[k] + slope * (breakpoints[k + 1] - breakpoints[k]);
                logvalues.push(next);
            }
            WeightFamily::PiecewiseLogLinear {
                breakpoints,
                logvalues,
            }
        }
    }
}

fn random_family(seed: u64, length: f64, smooth: bool) -> WeightFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.gen_bool(0.25) {
        let n = rng.gen_range(2..=3);
        WeightFamily::Product {
            factors: (0..n)
                .map(|_| random_simple(&mut rng, length, smooth))
                .collect(),
        }
    } else {
        random_simple(&mut rng, length, smooth)
    }
}

/// Deterministic random log-concave weight on `[0, length]`.
///
/// Ranges: `κ ∈ [-10, 10]`, `a ∈ [0, 20]`, `m ∈ [-L, 2L]`, `α ∈ [0, 4]`,
/// `x0 ∈ [-L, 0]` (exactly `0`, i.e. vanishing at the left end, with
/// probability 1/3), piecewise weights with at most 8 breakpoints and
/// decreasing slopes in `[-10, 10]`, and products of two or three of these.
pub fn random_log_concave(seed: u64, length: f64) -> Result<WeightFunction> {
    WeightFunction::new(random_family(seed, length, false), length)
}

/// Like [`random_log_concave`] but restricted to smooth weights that are
/// strictly positive on the closed interval (no piecewise families, power
/// weights with `x0 ≤ -L/20`).
pub fn random_smooth_log_concave(seed: u64, length: f64) -> Result<WeightFunction> {
    WeightFunction::new(random_family(seed, length, true), length)
}
