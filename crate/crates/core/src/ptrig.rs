//! The generalized constant `π_p`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Estimate};

/// Exponent `p > 1` of the p-Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PExponent(f64);

impl PExponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p > 1.0 {
            Ok(Self(p))
        } else {
            Err(Error::InvalidParameter(format!(
                "exponent p must satisfy p > 1, got {p}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// Hölder conjugate `p / (p - 1)`.
    pub fn conjugate(self) -> Self {
        Self(self.0 / (self.0 - 1.0))
    }
}

impl TryFrom<f64> for PExponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<PExponent> for f64 {
    fn from(p: PExponent) -> f64 {
        p.0
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `π_p = 2π (p-1)^{1/p} / (p sin(π/p))`.
pub fn pi_p_closed(p: PExponent) -> f64 {
    let p = p.get();
    2.0 * PI * (p - 1.0).powf(1.0 / p) / (p * (PI / p).sin())
}

/// `π_p` from its defining integral `2 ∫_0^∞ ds / (1 + s^p/(p-1))`,
/// to absolute accuracy `tol`.
pub fn pi_p_quadrature(p: PExponent, tol: f64) -> Result<Estimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let pv = p.get();
    let inv = 1.0 / (pv - 1.0);
    let integrand = |s: f64| 1.0 / (1.0 + inv * s.powf(pv));
    let half = quad::half_line(integrand, 1.0, &[], pv, 0.5 * tol)?;
    Ok(Estimate {
        value: 2.0 * half.value,
        error: 2.0 * half.error,
    })
}

/// Lower bound `(π_p / L)^p` on the first nontrivial Neumann eigenvalue of
/// any log-concave weight on an interval of length `length`.
pub fn wirtinger_bound(p: PExponent, length: f64) -> f64 {
    (pi_p_closed(p) / length).powf(p.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: f64) -> PExponent {
        PExponent::new(v).unwrap()
    }

    #[test]
    fn rejects_p_at_most_one() {
        assert!(PExponent::new(1.0).is_err());
        assert!(PExponent::new(0.5).is_err());
        assert!(PExponent::new(f64::NAN).is_err());
        assert!(serde_json::from_str::<PExponent>("1.0").is_err());
    }

    #[test]
    fn closed_form_at_two_is_pi() {
        assert_eq!(pi_p_closed(p(2.0)), PI);
    }

    #[test]
    fn conjugate_exponents_share_pi_p() {
        assert!((pi_p_closed(p(3.0)) - pi_p_closed(p(1.5))).abs() < 1e-12);
        assert_eq!(p(3.0).conjugate().get(), 1.5);
    }

    #[test]
    fn quadrature_matches_pi_at_two() {
        let est = pi_p_quadrature(p(2.0), 1e-10).unwrap();
        assert!((est.value - PI).abs() < 1e-10, "{est:?}");
        assert!(est.error <= 1e-10);
    }

    #[test]
    fn quadrature_matches_closed_form_at_extremes() {
        for (pv, tol) in [(10.0, 1e-9), (1.1, 1e-9), (3.0, 1e-10)] {
            let est = pi_p_quadrature(p(pv), tol).unwrap();
            let closed = pi_p_closed(p(pv));
            assert!(
                (est.value - closed).abs() <= tol,
                "p={pv}: {} vs {closed}",
                est.value
            );
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        assert!(pi_p_quadrature(p(2.0), 0.0).is_err());
    }
}
