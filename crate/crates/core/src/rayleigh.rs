//! Discrete oracle for the weighted Wirtinger quotient: minimises
//! `∫ |u'|^p f / inf_t ∫ |u - t|^p f` over continuous piecewise-linear `u`.
//!
//! Conforming elements give an upper bound on the continuum infimum, which
//! makes this an independent check on the shooting solver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{self, P1Space, PQuotient};
use crate::ptrig::PExponent;
use crate::weights::WeightFunction;

/// Number of descent starts for `p ≠ 2`.
pub const STARTS: usize = 5;
/// Relative size of the seeded perturbations.
pub const PERTURBATION: f64 = 0.1;

/// Nodal values of a continuous piecewise-linear function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFunction {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes.len() != values.len() {
            return Err(Error::InvalidParameter(
                "a discrete function needs at least 3 nodes and one value per node".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter(
                "node spacing must be positive".into(),
            ));
        }
        Ok(Self { nodes, values })
    }

    /// Samples `g` on `n` uniform nodes of `[0, length]`.
    pub fn sample<G: Fn(f64) -> f64>(length: f64, n: usize, g: G) -> Result<Self> {
        let nodes = uniform_nodes(length, n);
        let values = nodes.iter().map(|&x| g(x)).collect();
        Self::new(nodes, values)
    }
}

fn uniform_nodes(length: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                length
            } else {
                length * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn space_for(u: &DiscreteFunction, w: &WeightFunction) -> Result<P1Space> {
    let (a, b) = (u.nodes[0], *u.nodes.last().expect("at least 3 nodes"));
    if a < 0.0 || b > w.length() {
        return Err(Error::Domain {
            x: if a < 0.0 { a } else { b },
            length: w.length(),
        });
    }
    P1Space::interval(&u.nodes, |x| w.value_at(x))
}

/// The `t*` with `∫ |u - t*|^{p-2}(u - t*) f = 0`.
pub fn optimal_shift(u: &DiscreteFunction, w: &WeightFunction, p: PExponent) -> Result<f64> {
    let space = space_for(u, w)?;
    PQuotient::new(&space, p.get()).optimal_shift(&u.values)
}

/// `∫ |u'|^p f / ∫ |u - t*|^p f`.
pub fn quotient(u: &DiscreteFunction, w: &WeightFunction, p: PExponent) -> Result<f64> {
    let space = space_for(u, w)?;
    Ok(PQuotient::new(&space, p.get()).value(&u.values)?.0)
}

/// Quotient together with its gradient in the nodal values.
pub fn quotient_gradient(
    u: &DiscreteFunction,
    w: &WeightFunction,
    p: PExponent,
) -> Result<(f64, Vec<f64>)> {
    let space = space_for(u, w)?;
    PQuotient::new(&space, p.get()).value_and_gradient(&u.values)
}

/// Discrete minimiser of the quotient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayleighResult {
    pub lambda_h: f64,
    pub n_nodes: usize,
    pub converged: bool,
    pub u: DiscreteFunction,
}

/// `Σ_k c_k cos((k+1) π s)` on `s ∈ [0, 1]`: the low-frequency Neumann
/// modes used to perturb descent starts.
fn smooth_bump(coeffs: &[f64], s: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * ((k + 1) as f64 * std::f64::consts::PI * s).cos())
        .sum()
}

/// Smallest discrete quotient on `n_nodes` uniform nodes.
///
/// `p = 2` is a generalized symmetric eigenproblem solved by inverse
/// iteration. Other exponents start from the `p = 2` minimiser and four
/// seeded low-frequency perturbations of it and run preconditioned descent from each;
/// the best local minimum is returned.
pub fn minimize_quotient(
    w: &WeightFunction,
    p: PExponent,
    n_nodes: usize,
    tol: f64,
    seed: u64,
) -> Result<RayleighResult> {
    if n_nodes < 17 {
        return Err(Error::InvalidParameter(format!(
            "need at least 17 nodes, got {n_nodes}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let length = w.length();
    let nodes = uniform_nodes(length, n_nodes);
    let space = P1Space::interval(&nodes, |x| w.value_at(x))?;
    let (k, m) = space.assemble();
    let sigma = 0.1 * (std::f64::consts::PI / length).powi(2);
    let start: Vec<f64> = nodes.iter().map(|&x| x - 0.5 * length).collect();
    let pair = fem::smallest_nontrivial(&k, &m, sigma, &start, tol.max(1e-13), 5000)?;

    if p.get() == 2.0 {
        return Ok(RayleighResult {
            lambda_h: pair.lambda,
            n_nodes,
            converged: pair.converged,
            u: DiscreteFunction::new(nodes, pair.vector)?,
        });
    }

    let quotient = PQuotient::new(&space, p.get());
    let scale = pair.vector.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<fem::Descent> = None;
    for start_idx in 0..STARTS {
        let mut u0 = pair.vector.clone();
        if start_idx > 0 {
            let modes: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let bump: Vec<f64> = nodes
                .iter()
                .map(|&x| smooth_bump(&modes, x / length))
                .collect();
            let bmax = bump
                .iter()
                .fold(0.0f64, |a, &b| a.max(b.abs()))
                .max(f64::MIN_POSITIVE);
            for (v, b) in u0.iter_mut().zip(&bump) {
                *v += PERTURBATION * scale * b / bmax;
            }
        }
        let run = fem::descend(&quotient, &u0, tol, 5_000)?;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    Ok(RayleighResult {
        lambda_h: best.value,
        n_nodes,
        converged: best.converged,
        u: DiscreteFunction::new(nodes, best.u)?,
    })
}
