//! Scalar fields and log-concave weights on the plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Continuously differentiable test function `u` on a planar domain.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: Point) -> f64;
    fn gradient(&self, x: Point) -> Point;
}

/// `u(x, y) = a x + b y + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineField {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ScalarField for AffineField {
    fn value(&self, x: Point) -> f64 {
        self.a * x[0] + self.b * x[1] + self.c
    }
    fn gradient(&self, _x: Point) -> Point {
        [self.a, self.b]
    }
}

/// `u(x, y) = sin(k·x + φ) + c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    pub k: Point,
    pub phase: f64,
    pub c: f64,
}

impl ScalarField for WaveField {
    fn value(&self, x: Point) -> f64 {
        (self.k[0] * x[0] + self.k[1] * x[1] + self.phase).sin() + self.c
    }
    fn gradient(&self, x: Point) -> Point {
        let d = (self.k[0] * x[0] + self.k[1] * x[1] + self.phase).cos();
        [self.k[0] * d, self.k[1] * d]
    }
}

/// `u - t` for a wrapped field.
pub struct Shifted<'a> {
    pub inner: &'a dyn ScalarField,
    pub shift: f64,
}

impl ScalarField for Shifted<'_> {
    fn value(&self, x: Point) -> f64 {
        self.inner.value(x) - self.shift
    }
    fn gradient(&self, x: Point) -> Point {
        self.inner.gradient(x)
    }
}

/// Log-concave weight `ω` on the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum PlanarWeight {
    Constant {
        c: f64,
    },
    /// `exp(kx x + ky y)`.
    Exponential {
        kx: f64,
        ky: f64,
    },
    /// `exp(-a |x - center|^2)`.
    Gaussian {
        a: f64,
        center: Point,
    },
    Product {
        factors: Vec<PlanarWeight>,
    },
}

impl PlanarWeight {
    pub fn validate(&self) -> Result<()> {
        match self {
            PlanarWeight::Constant { c } if !(*c > 0.0 && c.is_finite()) => Err(
                Error::InvalidParameter(format!("constant weight must be positive, got {c}")),
            ),
            PlanarWeight::Exponential { kx, ky } if !(kx.is_finite() && ky.is_finite()) => Err(
                Error::InvalidParameter("exponential rates must be finite".into()),
            ),
            PlanarWeight::Gaussian { a, center }
                if !(*a >= 0.0 && a.is_finite() && center.iter().all(|c| c.is_finite())) =>
            {
                Err(Error::InvalidParameter(format!(
                    "gaussian weight needs finite a >= 0, got {a}"
                )))
            }
            PlanarWeight::Product { factors } => {
                if factors.is_empty() {
                    return Err(Error::InvalidParameter("empty product weight".into()));
                }
                factors.iter().try_for_each(|f| f.validate())
            }
            _ => Ok(()),
        }
    }

    pub fn log_value(&self, x: Point) -> f64 {
        match self {
            PlanarWeight::Constant { c } => c.ln(),
            PlanarWeight::Exponential { kx, ky } => kx * x[0] + ky * x[1],
            PlanarWeight::Gaussian { a, center } => {
                let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
                -a * (dx * dx + dy * dy)
            }
            PlanarWeight::Product { factors } => factors.iter().map(|f| f.log_value(x)).sum(),
        }
    }

    pub fn value(&self, x: Point) -> f64 {
        match self {
            PlanarWeight::Constant { c } => *c,
            _ => self.log_value(x).exp(),
        }
    }

    /// Seeded random weight: exponential rates in `[-3, 3]`, Gaussian
    /// `a ∈ [0, 5]` centred in `[-1, 1]^2`, or a product of both.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let exp = |rng: &mut ChaCha8Rng| PlanarWeight::Exponential {
            kx: rng.gen_range(-3.0..=3.0),
            ky: rng.gen_range(-3.0..=3.0),
        };
        let gauss = |rng: &mut ChaCha8Rng| PlanarWeight::Gaussian {
            a: rng.gen_range(0.0..=5.0),
            center: [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)],
        };
        match rng.gen_range(0..4) {
            0 => PlanarWeight::Constant { c: 1.0 },
            1 => exp(&mut rng),
            2 => gauss(&mut rng),
            _ => {
                let e = exp(&mut rng);
                let g = gauss(&mut rng);
                PlanarWeight::Product {
                    factors: vec![e, g],
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_weight_values() {
        let w = PlanarWeight::Product {
            factors: vec![
                PlanarWeight::Exponential { kx: 1.0, ky: 0.0 },
                PlanarWeight::Gaussian {
                    a: 1.0,
                    center: [0.0, 0.0],
                },
            ],
        };
        assert!((w.value([1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!(PlanarWeight::Constant { c: 0.0 }.validate().is_err());
        for seed in 0..10 {
            let w = PlanarWeight::random(seed);
            w.validate().unwrap();
            // midpoint log-concavity along a segment
            let (a, b) = ([-0.5, 0.3], [0.7, -0.2]);
            let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            assert!(w.log_value(m) >= 0.5 * (w.log_value(a) + w.log_value(b)) - 1e-14);
        }
    }

    #[test]
    fn wave_gradient_matches_difference() {
        let u = WaveField {
            k: [2.0, -1.0],
            phase: 0.3,
            c: 0.0,
        };
        let x = [0.2, 0.4];
        let h = 1e-6;
        let g = u.gradient(x);
        let fd = (u.value([x[0] + h, x[1]]) - u.value([x[0] - h, x[1]])) / (2.0 * h);
        assert!((g[0] - fd).abs() < 1e-8);
    }
}
