// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Equality constraints pinning the segment ends to the target.

use nalgebra::{DMatrix, DVector};

use crate::curve::CurveSamples;
use crate::elastica::{segment_partials_unchecked, tangent_partials, ElasticaParams, PlanePoint, N_PARAMS};
use crate::elliptic::Modulus;

use super::objective::Hessian;

/// Which end conditions a fit must satisfy exactly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Constraints {
    #[default]
    None,
    /// Segment endpoints equal the target endpoints.
    Endpoints,
    /// Endpoints and the directions of the end tangents.
    EndpointsAndTangents,
}

impl Constraints {
    pub fn count(self) -> usize {
        match self {
            Constraints::None => 0,
            Constraints::Endpoints => 4,
            Constraints::EndpointsAndTangents => 6,
        }
    }

    pub fn has_tangents(self) -> bool {
        self == Constraints::EndpointsAndTangents
    }
}

/// The end data a constrained fit matches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct EndData {
    pub start: PlanePoint,
    pub end: PlanePoint,
    pub start_tangent: PlanePoint,
    pub end_tangent: PlanePoint,
}

impl EndData {
    pub fn of(target: &CurveSamples) -> Self {
        EndData {
            start: target.start(),
            end: target.end(),
            start_tangent: target.start_tangent(),
            end_tangent: target.end_tangent(),
        }
    }
}

/// Constraint values, Jacobian rows and Hessians at `p`.
///
/// Endpoint rows are `y_p(t) − x(t)` for `t = 0, 1`; tangent rows are
/// `T_p(t) × τ(t)`, which vanish when the unit tangents are parallel.
pub(crate) struct ConstraintEval {
    pub values: DVector<f64>,
    pub jacobian: DMatrix<f64>,
    pub hessians: Vec<Hessian>,
}

pub(crate) fn evaluate(p: &ElasticaParams, m: Modulus, kind: Constraints, ends: &EndData) -> ConstraintEval {
    let n = kind.count();
    let mut values = DVector::zeros(n);
    let mut jacobian = DMatrix::zeros(n, N_PARAMS);
    let mut hessians = Vec::with_capacity(n);
    let mut row = 0;
    for (t, target) in [(0.0, ends.start), (1.0, ends.end)] {
        let sp = segment_partials_unchecked(p, m, t);
        let d = sp.value - target;
        for (comp, val) in [(0usize, d.x), (1, d.y)] {
            let pick = |v: PlanePoint| if comp == 0 { v.x } else { v.y };
            values[row] = val;
            for j in 0..N_PARAMS {
                jacobian[(row, j)] = pick(sp.first[j]);
            }
            hessians.push(Hessian::from_fn(|i, j| pick(sp.second[i][j])));
            row += 1;
        }
    }
    if kind.has_tangents() {
        for (t, tau) in [(0.0, ends.start_tangent), (1.0, ends.end_tangent)] {
            let (tan, grad, hess) = tangent_partials(p, t);
            values[row] = tan.cross(tau);
            for j in 0..N_PARAMS {
                jacobian[(row, j)] = grad[j].cross(tau);
            }
            hessians.push(Hessian::from_fn(|i, j| hess[i][j].cross(tau)));
            row += 1;
        }
    }
    ConstraintEval {
        values,
        jacobian,
        hessians,
    }
}

/// Largest absolute constraint value, plus a unit penalty when a matched
/// tangent points backwards (the cross product alone cannot see that).
pub(crate) fn violation(p: &ElasticaParams, m: Modulus, kind: Constraints, ends: &EndData) -> f64 {
    if kind == Constraints::None {
        return 0.0;
    }
    let c = evaluate(p, m, kind, ends).values;
    let mut v = c.amax();
    if kind.has_tangents() {
        for (t, tau) in [(0.0, ends.start_tangent), (1.0, ends.end_tangent)] {
            let (tan, _, _) = tangent_partials(p, t);
            if tan.dot(tau) < 0.0 {
                v = v.max(1.0);
            }
        }
    }
    v
}
