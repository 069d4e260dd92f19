// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Least-squares fitting of a single elastica segment.
//!
//! Unconstrained problems use a trust-region Newton method on `F`;
//! constrained problems use a trust-region SQP method on the Lagrangian with
//! an exact-penalty merit function. Both use analytic second derivatives.

mod chart;
mod constraints;
pub mod objective;
mod optimizer;
mod trust_region;

pub use constraints::Constraints;
pub use objective::{gradient_hessian, objective, r4, r4_from_objective, Gradient, Hessian};

use crate::curve::CurveSamples;
use crate::elastica::ElasticaParams;
use crate::{Error, Result};

/// Smallest distance of `k` from 1 the optimizer allows.
pub const EPS_K: f64 = 1e-6;
/// Default upper bound on `k`; raised when the initial point lies above it.
pub const K_MAX: f64 = 10.0;
/// Converged constrained fits satisfy their constraints to this level.
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// Stopping rules.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Converged when the (projected) gradient norm falls below this.
    pub grad_tol: f64,
    /// Stop when the trust region shrinks below this relative size.
    pub step_tol: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            grad_tol: 1e-8,
            step_tol: 1e-15,
            max_iter: 1000,
        }
    }
}

/// A single-segment fitting problem.
#[derive(Clone, Debug)]
pub struct FitProblem {
    pub target: CurveSamples,
    pub init: ElasticaParams,
    pub constraints: Constraints,
    pub tolerances: Tolerances,
}

impl FitProblem {
    pub fn new(target: CurveSamples, init: ElasticaParams) -> Self {
        FitProblem {
            target,
            init,
            constraints: Constraints::None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn with_constraints(mut self, constraints: Constraints) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if t.max_iter < 1 || !(t.grad_tol > 0.0) || !(t.step_tol >= 0.0) {
            return Err(Error::Usage(format!("invalid tolerances {t:?}")));
        }
        if self.target.is_empty() || !(self.target.length() > 0.0) {
            return Err(Error::DegenerateInput("target has zero length".into()));
        }
        for v in self.init.to_array() {
            if !v.is_finite() {
                return Err(Error::Domain {
                    what: "initial parameter",
                    value: v,
                });
            }
        }
        Ok(())
    }
}

/// Why the optimizer stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Gradient (and constraint) tolerances met.
    Converged,
    /// The trust region collapsed before the tolerances were met.
    StepTolerance,
    MaxIterations,
    /// Objective or derivatives became non-finite at the current point.
    NumericalFailure,
}

/// Outcome of [`fit`].
#[derive(Clone, Debug, PartialEq)]
pub struct FitResult {
    pub params: ElasticaParams,
    pub objective: f64,
    /// `‖∇F‖`, or the norm of the Lagrangian gradient when constrained.
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest absolute constraint residual; zero when unconstrained.
    pub constraint_violation: f64,
    pub termination: Termination,
}

impl FitResult {
    /// Normalized distance `√(2F/L³)` for a target of length `length`.
    pub fn r4(&self, length: f64) -> f64 {
        r4_from_objective(self.objective, length)
    }
}

/// Fit an elastica segment to the target, starting from `problem.init`.
///
/// The initial point is first projected into the admissible parameter set.
/// Unconstrained fits never increase `F`; constrained fits never increase
/// the merit function `F + ν‖c‖`.
pub fn fit(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    optimizer::run(problem)
}
