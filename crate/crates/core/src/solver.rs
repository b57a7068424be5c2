//! Interchangeable first-eigenvalue solvers, registered by name.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::eigen1d::{self, EigenProblem};
use crate::error::{Error, Result};
use crate::rayleigh;

/// Solver output in a solver-independent shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenEstimate {
    pub solver: String,
    pub lambda: f64,
    pub converged: bool,
    /// Solver-specific result record.
    pub detail: serde_json::Value,
}

pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn solve(&self, problem: &EigenProblem, tol: f64) -> Result<EigenEstimate>;
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("result records serialize")
}

/// Momentum-form shooting with scan and bisection.
pub struct Shooting;

impl EigenSolver for Shooting {
    fn name(&self) -> &'static str {
        "shooting"
    }
    fn description(&self) -> &'static str {
        "adaptive Runge-Kutta shooting on (u, f|u'|^{p-2}u'), bisection on the terminal momentum"
    }
    fn solve(&self, problem: &EigenProblem, tol: f64) -> Result<EigenEstimate> {
        let res = eigen1d::first_nontrivial_eigenvalue(problem, tol)?;
        Ok(EigenEstimate {
            solver: self.name().into(),
            lambda: res.lambda,
            converged: true,
            detail: to_value(&res),
        })
    }
}

/// Riccati length identity; exponential weights only.
pub struct Riccati;

impl EigenSolver for Riccati {
    fn name(&self) -> &'static str {
        "riccati"
    }
    fn description(&self) -> &'static str {
        "root of the Riccati blow-up length; weights c*exp(kappa x) only"
    }
    fn solve(&self, problem: &EigenProblem, tol: f64) -> Result<EigenEstimate> {
        let kappa = problem.weight.exponential_rate().ok_or_else(|| {
            Error::InvalidParameter(
                "the riccati solver only accepts exponential (or constant) weights".into(),
            )
        })?;
        let lambda = eigen1d::exponential_eigenvalue(problem.p, kappa, problem.length(), tol)?;
        Ok(EigenEstimate {
            solver: self.name().into(),
            lambda,
            converged: true,
            detail: serde_json::json!({ "kappa": kappa, "mu": lambda }),
        })
    }
}

/// Conforming P1 minimisation of the discrete quotient.
pub struct FiniteElement {
    pub n_nodes: usize,
    pub seed: u64,
}

impl Default for FiniteElement {
    fn default() -> Self {
        Self {
            n_nodes: 2001,
            seed: 0,
        }
    }
}

impl EigenSolver for FiniteElement {
    fn name(&self) -> &'static str {
        "fem"
    }
    fn description(&self) -> &'static str {
        "piecewise-linear Rayleigh quotient minimisation (upper bound)"
    }
    fn solve(&self, problem: &EigenProblem, tol: f64) -> Result<EigenEstimate> {
        let res =
            rayleigh::minimize_quotient(&problem.weight, problem.p, self.n_nodes, tol, self.seed)?;
        Ok(EigenEstimate {
            solver: self.name().into(),
            lambda: res.lambda_h,
            converged: res.converged,
            detail: to_value(&res),
        })
    }
}

/// Name-keyed collection of solvers.
pub struct SolverRegistry {
    solvers: BTreeMap<&'static str, Box<dyn EigenSolver>>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            solvers: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, solver: Box<dyn EigenSolver>) {
        self.solvers.insert(solver.name(), solver);
    }

    pub fn get(&self, name: &str) -> Option<&dyn EigenSolver> {
        self.solvers.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.keys().copied().collect()
    }

    pub fn solve(&self, name: &str, problem: &EigenProblem, tol: f64) -> Result<EigenEstimate> {
        let solver = self.get(name).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "unknown solver {name:?}; known: {:?}",
                self.names()
            ))
        })?;
        solver.solve(problem, tol)
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Shooting));
        r.register(Box::new(Riccati));
        r.register(Box::new(FiniteElement::default()));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ptrig::PExponent;
    use crate::weights::{WeightFamily, WeightFunction};

    #[test]
    fn default_registry_agrees_on_exponential_weight() {
        let reg = SolverRegistry::default();
        assert_eq!(reg.names(), vec!["fem", "riccati", "shooting"]);
        let prob = EigenProblem::new(
            WeightFunction::exponential(2.0, 1.0).unwrap(),
            PExponent::new(2.0).unwrap(),
        );
        let a = reg.solve("shooting", &prob, 1e-10).unwrap().lambda;
        let b = reg.solve("riccati", &prob, 1e-12).unwrap().lambda;
        let c = reg.solve("fem", &prob, 1e-12).unwrap().lambda;
        assert!((a / b - 1.0).abs() < 1e-8);
        assert!(c >= b && (c / b - 1.0) < 1e-4);
    }

    #[test]
    fn riccati_rejects_other_families() {
        let reg = SolverRegistry::default();
        let w = WeightFunction::new(WeightFamily::LogQuadratic { a: 1.0, m: 0.0 }, 1.0).unwrap();
        let prob = EigenProblem::new(w, PExponent::new(2.0).unwrap());
        assert!(reg.solve("riccati", &prob, 1e-10).is_err());
        assert!(reg.solve("nope", &prob, 1e-10).is_err());
    }
}
