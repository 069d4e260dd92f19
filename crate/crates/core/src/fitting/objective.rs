// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! The L² distance between an elastica segment and a sampled target.

use nalgebra::{SMatrix, SVector};

use crate::curve::CurveSamples;
use crate::elastica::{segment_eval_unchecked, segment_partials_unchecked, ElasticaParams, N_PARAMS};
use crate::elliptic::Modulus;
use crate::{Error, Result};

pub type Gradient = SVector<f64, N_PARAMS>;
pub type Hessian = SMatrix<f64, N_PARAMS, N_PARAMS>;

/// Segment parameter `t_i = s_i / L` at each node.
fn node_params(target: &CurveSamples) -> impl Iterator<Item = f64> + '_ {
    let l = target.length();
    target.s().iter().map(move |s| s / l)
}

fn check(p: &ElasticaParams, target: &CurveSamples) -> Result<Modulus> {
    if target.is_empty() || !(target.length() > 0.0) {
        return Err(Error::DegenerateInput("target has zero length".into()));
    }
    p.validate()
}

/// `F(p) = ½ ∫ ‖y_p(s/L) − x(s)‖² ds` over the target's quadrature nodes.
pub fn objective(p: &ElasticaParams, target: &CurveSamples) -> Result<f64> {
    let m = check(p, target)?;
    Ok(objective_unchecked(p, m, target))
}

pub(crate) fn objective_unchecked(p: &ElasticaParams, m: Modulus, target: &CurveSamples) -> f64 {
    let pts = target.points();
    let wts = target.ds_weights();
    let mut f = 0.0;
    for (i, t) in node_params(target).enumerate() {
        let d = segment_eval_unchecked(p, m, t) - pts[i];
        f += wts[i] * d.norm_sq();
    }
    0.5 * f
}

/// Normalized distance `R4 = √(2F/L³)`.
pub fn r4(p: &ElasticaParams, target: &CurveSamples) -> Result<f64> {
    let f = objective(p, target)?;
    Ok(r4_from_objective(f, target.length()))
}

pub fn r4_from_objective(f: f64, length: f64) -> f64 {
    (2.0 * f.max(0.0) / length.powi(3)).sqrt()
}

/// Objective, gradient and Hessian. The Hessian is exactly symmetric.
///
/// Requires `k > 0`, as the second `k` derivative of the basic elastica is
/// singular at zero.
pub fn gradient_hessian(p: &ElasticaParams, target: &CurveSamples) -> Result<(Gradient, Hessian)> {
    let (_, g, h) = value_gradient_hessian(p, target)?;
    Ok((g, h))
}

pub(crate) fn value_gradient_hessian(p: &ElasticaParams, target: &CurveSamples) -> Result<(f64, Gradient, Hessian)> {
    let m = check(p, target)?;
    if p.k == 0.0 {
        return Err(Error::Domain {
            what: "second k-derivative modulus",
            value: p.k,
        });
    }
    let pts = target.points();
    let wts = target.ds_weights();
    let mut f = 0.0;
    let mut g = Gradient::zeros();
    let mut h = Hessian::zeros();
    for (n, t) in node_params(target).enumerate() {
        let sp = segment_partials_unchecked(p, m, t);
        let d = sp.value - pts[n];
        let wn = wts[n];
        f += wn * d.norm_sq();
        for i in 0..N_PARAMS {
            g[i] += wn * d.dot(sp.first[i]);
            for j in 0..=i {
                h[(i, j)] += wn * (sp.first[i].dot(sp.first[j]) + d.dot(sp.second[i][j]));
            }
        }
    }
    for i in 0..N_PARAMS {
        for j in 0..i {
            h[(j, i)] = h[(i, j)];
        }
    }
    Ok((0.5 * f, g, h))
}
