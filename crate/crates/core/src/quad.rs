//! Numerical quadrature: adaptive Gauss–Kronrod on finite intervals, a
//! mapped variant for the half line, and fixed rules used per element.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value of an integral together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `tol` (absolute). The 15-point rule never samples
/// the endpoints, so integrable endpoint singularities are tolerated.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_pieces: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod15(&f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    heap.push(Piece { a, b, est: first });
    while error > tol {
        if heap.len() >= max_pieces {
            return Err(Error::Quadrature {
                value,
                estimate: error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Quadrature {
                value,
                estimate: error,
            });
        }
        let left = kronrod15(&f, worst.a, mid);
        let right = kronrod15(&f, mid, worst.b);
        value += left.value + right.value - worst.est.value;
        error += left.error + right.error - worst.est.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            est: right,
        });
        if !value.is_finite() {
            return Err(Error::Quadrature {
                value,
                estimate: f64::INFINITY,
            });
        }
    }
    // Recompute the sum from the pieces to shed accumulated rounding.
    let mut total = 0.0;
    let mut total_err = 0.0;
    for piece in heap.iter() {
        total += piece.est.value;
        total_err += piece.est.error;
    }
    Ok(Estimate {
        value: total,
        error: total_err,
    })
}

/// Default subdivision budget for [`adaptive`].
pub const DEFAULT_BUDGET: usize = 4000;

/// Integrates `f` over `[0, ∞)`, where `f(s)` decays at least like `s^{-decay}`
/// with `decay > 1`.
///
/// The finite part `[0, split]` is further cut at the interior `breaks`; the
/// tail `[split, ∞)` is mapped onto `(0, 1]` by `s = split · σ^{-m}`, with the
/// integer `m` chosen so the mapped integrand vanishes at `σ = 0`.
pub fn half_line<F: Fn(f64) -> f64>(
    f: F,
    split: f64,
    breaks: &[f64],
    decay: f64,
    tol: f64,
) -> Result<Estimate> {
    if !(decay > 1.0) || !(split > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "half-line quadrature needs decay > 1 and split > 0 (got {decay}, {split})"
        )));
    }
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&b| b > 0.0 && b < split)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let n_pieces = cuts.len() + 2;
    let piece_tol = tol / n_pieces as f64;

    let mut value = 0.0;
    let mut error = 0.0;
    let mut lo = 0.0;
    for &hi in cuts.iter().chain(std::iter::once(&split)) {
        let est = adaptive(&f, lo, hi, piece_tol, DEFAULT_BUDGET)?;
        value += est.value;
        error += est.error;
        lo = hi;
    }

    let m = (2.0 / (decay - 1.0)).ceil().clamp(1.0, 64.0) as i32;
    let mf = m as f64;
    let tail = |sigma: f64| {
        let s = split * sigma.powi(-m);
        let jac = split * mf * sigma.powi(-m - 1);
        if !s.is_finite() || !jac.is_finite() {
            return 0.0;
        }
        let v = f(s) * jac;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let est = adaptive(tail, 0.0, 1.0, piece_tol, DEFAULT_BUDGET)?;
    value += est.value;
    error += est.error;
    Ok(Estimate { value, error })
}

/// Gauss–Legendre nodes/weights on `[-1, 1]`, three points.
pub const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
    (0.0, 0.888_888_888_888_889),
    (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
];

/// Gauss–Legendre nodes/weights on `[-1, 1]`, five points.
pub const GAUSS5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_47),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Fixed-order Gauss–Legendre integral over `[a, b]`.
pub fn gauss<F: Fn(f64) -> f64>(rule: &[(f64, f64)], f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

/// Seven-point degree-5 symmetric triangle rule: barycentric coordinates
/// and weights normalised to sum to one (multiply by the triangle area).
pub const TRIANGLE7: [([f64; 3], f64); 7] = {
    const A1: f64 = 0.101_286_507_323_456_34;
    const B1: f64 = 1.0 - 2.0 * A1;
    const W1: f64 = 0.125_939_180_544_827_15;
    const A2: f64 = 0.470_142_064_105_115_1;
    const B2: f64 = 1.0 - 2.0 * A2;
    const W2: f64 = 0.132_394_152_788_506_2;
    [
        ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
        ([A1, A1, B1], W1),
        ([A1, B1, A1], W1),
        ([B1, A1, A1], W1),
        ([A2, A2, B2], W2),
        ([A2, B2, A2], W2),
        ([B2, A2, A2], W2),
    ]
};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_polynomial_is_exact() {
        let est = adaptive(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, 1e-13, 100).unwrap();
        assert!((est.value - (64.0 / 6.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let est = adaptive(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, DEFAULT_BUDGET).unwrap();
        assert!((est.value - 2.0).abs() < 1e-9, "{est:?}");
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        let err = adaptive(|x| (1.0 / x).sin() / x, 0.0, 1.0, 1e-14, 8).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn half_line_lorentzian() {
        let est = half_line(|s| 1.0 / (1.0 + s * s), 1.0, &[], 2.0, 1e-11).unwrap();
        assert!(
            (est.value - std::f64::consts::FRAC_PI_2).abs() < 1e-10,
            "{est:?}"
        );
    }

    #[test]
    fn triangle_rule_integrates_quintics() {
        // ∫ over the unit right triangle of x^2 y^3 = 2!3!/7! = 1/420
        let area = 0.5;
        let v: f64 = TRIANGLE7
            .iter()
            .map(|&(b, w)| {
                let (x, y) = (b[1], b[2]);
                w * x * x * y * y * y
            })
            .sum::<f64>()
            * area;
        assert!((v - 1.0 / 420.0).abs() < 1e-15);
    }

    #[test]
    fn gauss5_is_exact_for_degree_nine() {
        let v = gauss(&GAUSS5, |x| x.powi(9) + x.powi(8), -1.0, 1.0);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }
}
