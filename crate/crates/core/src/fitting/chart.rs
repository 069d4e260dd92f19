// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Intrinsic working coordinates for the optimizer.
//!
//! The modulus, phase and scale of a segment trade off against each other
//! along long curved valleys of the objective, most visibly for nearly
//! circular arcs. The curvature state at the segment midpoint straightens
//! those valleys. The chart uses
//!
//! * `a = κ`, `b = κ'` and `c`, the curvature, its arclength derivative and
//!   the constant of `κ'' = −κ³/2 + cκ`, all at the midpoint and measured in
//!   the orientation of the basic elastica,
//! * the signed arclength `σ = wℓ`,
//! * the tangent angle `θ` and position `(X, Y)` of the midpoint.

use nalgebra::{Matrix3, Vector3};

use super::objective::{Gradient, Hessian};
use crate::elastica::{
    derivatives_state, elliptic_state, param, segment_eval_unchecked, segment_partials_unchecked, wrap_angle,
    ElasticaParams, N_PARAMS,
};
use crate::elliptic::Modulus;

pub(super) const A: usize = 0;
pub(super) const B: usize = 1;
pub(super) const C: usize = 2;
pub(super) const SIGMA: usize = 3;
pub(super) const THETA: usize = 4;
pub(super) const X: usize = 5;
pub(super) const Y: usize = 6;

const NEWTON_STEPS: usize = 40;

/// Typical size of each chart coordinate for a target of length `length`.
pub(super) fn scaling(length: f64) -> [f64; N_PARAMS] {
    let mut d = [1.0; N_PARAMS];
    d[A] = 1.0 / length;
    d[B] = 1.0 / (length * length);
    d[C] = 1.0 / (length * length);
    d[SIGMA] = length;
    d[X] = length;
    d[Y] = length;
    d
}

/// Curvature state `(a, b, c)` of the basic elastica point `s` scaled by
/// `w`, with its Jacobian in `(k, s, w)`.
fn curvature_state(k: f64, s: f64, w: f64, m: Modulus) -> (Vector3<f64>, Matrix3<f64>) {
    let bd = derivatives_state(&elliptic_state(s, m));
    let w2 = w * w;
    let a = (2.0 * k - bd.point.y) / w;
    let b = -bd.d_s.y / w2;
    let c = (2.0 * k * k - 1.0) / w2;
    let jac = Matrix3::new(
        (2.0 - bd.d_k.y) / w,
        -bd.d_s.y / w,
        -a / w,
        -bd.d_sk.y / w2,
        -bd.d_ss.y / w2,
        -2.0 * b / w,
        4.0 * k / w2,
        0.0,
        -2.0 * c / w,
    );
    (Vector3::new(a, b, c), jac)
}

/// Tangent angle of the basic elastica at `s`, unwrapped next to `near`.
fn tangent_angle(s: f64, m: Modulus, near: f64) -> f64 {
    let t = derivatives_state(&elliptic_state(s, m)).d_s;
    near + wrap_angle(t.y.atan2(t.x) - near)
}

/// Chart coordinates of `p` and their Jacobian `∂z/∂p`.
fn forward(p: &ElasticaParams, m: Modulus, psi_near: f64) -> ([f64; N_PARAMS], Hessian, f64) {
    use param::*;
    let sm = p.s0 + 0.5 * p.ell;
    let (abc, j3) = curvature_state(p.k, sm, p.w, m);
    let bd = derivatives_state(&elliptic_state(sm, m));
    let psi = psi_near + wrap_angle(bd.d_s.y.atan2(bd.d_s.x) - psi_near);
    let mid = segment_partials_unchecked(p, m, 0.5);

    let mut z = [0.0; N_PARAMS];
    z[A] = abc[0];
    z[B] = abc[1];
    z[C] = abc[2];
    z[SIGMA] = p.w * p.ell;
    z[THETA] = p.phi + psi;
    z[X] = mid.value.x;
    z[Y] = mid.value.y;

    let mut jac = Hessian::zeros();
    for r in 0..3 {
        jac[(r, K)] = j3[(r, 0)];
        jac[(r, S0)] = j3[(r, 1)];
        jac[(r, ELL)] = 0.5 * j3[(r, 1)];
        jac[(r, W)] = j3[(r, 2)];
    }
    jac[(SIGMA, ELL)] = p.w;
    jac[(SIGMA, W)] = p.ell;
    jac[(THETA, K)] = bd.d_s.cross(bd.d_sk);
    jac[(THETA, S0)] = bd.d_s.cross(bd.d_ss);
    jac[(THETA, ELL)] = 0.5 * jac[(THETA, S0)];
    jac[(THETA, PHI)] = 1.0;
    for j in 0..N_PARAMS {
        jac[(X, j)] = mid.first[j].x;
        jac[(Y, j)] = mid.first[j].y;
    }
    (z, jac, psi)
}

/// Working coordinates around a parameter point.
pub(super) struct Chart {
    pub z: [f64; N_PARAMS],
    p: ElasticaParams,
    psi: f64,
    /// `∂p/∂z`.
    pub jac: Hessian,
    /// Second derivatives `∂²z_l/∂p²` of each coordinate.
    curv: [Hessian; N_PARAMS],
}

impl Chart {
    pub fn at(p: &ElasticaParams, m: Modulus) -> Option<Self> {
        let (z, fwd, psi) = forward(p, m, 0.0);
        let jac = fwd.try_inverse()?;
        if !jac.iter().all(|v| v.is_finite()) {
            return None;
        }
        let mut curv = [Hessian::zeros(); N_PARAMS];
        // Central differences of the analytic Jacobian; the position rows
        // are exact.
        let base = p.to_array();
        for j in [param::K, param::S0, param::ELL, param::W, param::PHI] {
            let h = match j {
                param::K => 1e-7 * p.k.min(1.0),
                param::W => 1e-6 * p.w,
                _ => 1e-6 * base[j].abs().max(1.0),
            };
            let mut hi = base;
            let mut lo = base;
            hi[j] += h;
            lo[j] -= h;
            let (hi, lo) = (ElasticaParams::from_array(hi), ElasticaParams::from_array(lo));
            let (Ok(mh), Ok(ml)) = (hi.validate(), lo.validate()) else {
                return None;
            };
            let jh = forward(&hi, mh, psi).1;
            let jl = forward(&lo, ml, psi).1;
            for (l, c) in curv.iter_mut().enumerate().take(THETA + 1) {
                for i in 0..N_PARAMS {
                    c[(i, j)] = (jh[(l, i)] - jl[(l, i)]) / (2.0 * h);
                }
            }
        }
        for c in curv.iter_mut().take(THETA + 1) {
            *c = (*c + c.transpose()) * 0.5;
        }
        let mid = segment_partials_unchecked(p, m, 0.5);
        for i in 0..N_PARAMS {
            for j in 0..N_PARAMS {
                curv[X][(i, j)] = mid.second[i][j].x;
                curv[Y][(i, j)] = mid.second[i][j].y;
            }
        }
        Some(Chart {
            z,
            p: *p,
            psi,
            jac,
            curv,
        })
    }

    pub fn gradient(&self, g: &Gradient) -> Gradient {
        self.jac.transpose() * g
    }

    /// Hessian in chart coordinates of a function with parameter gradient
    /// `g` and Hessian `h`.
    pub fn hessian(&self, g: &Gradient, h: &Hessian) -> Hessian {
        let gz = self.gradient(g);
        let mut m = *h;
        for (l, c) in self.curv.iter().enumerate() {
            m -= c * gz[l];
        }
        self.jac.transpose() * m * self.jac
    }

    /// First and second directional derivatives of `p` along the chart
    /// direction `dz`.
    pub fn directional(&self, dz: &Gradient) -> (Gradient, Gradient) {
        let pv = self.jac * dz;
        let q = Gradient::from_fn(|l, _| (pv.transpose() * self.curv[l] * pv)[0]);
        (pv, -(self.jac * q))
    }

    /// Parameters with chart coordinates `z`, or `None` when `z` lies
    /// outside the image of the chart near this point.
    pub fn params(
        &self,
        z: &[f64; N_PARAMS],
        project: impl Fn(ElasticaParams) -> ElasticaParams,
    ) -> Option<ElasticaParams> {
        let goal = Vector3::new(z[A], z[B], z[C]);
        let mut u = Vector3::new(self.p.k, self.p.s0 + 0.5 * self.p.ell, self.p.w);
        // Newton on the curvature state, with one polishing step after the
        // update becomes small.
        let mut done = false;
        let mut polish = false;
        for _ in 0..NEWTON_STEPS {
            if !(u[0] > 0.0 && u[2] > 0.0) {
                return None;
            }
            let m = Modulus::new(u[0]).ok()?;
            let (val, jac) = curvature_state(u[0], u[1], u[2], m);
            let du = jac.lu().solve(&(goal - val))?;
            u += du;
            if polish {
                done = true;
                break;
            }
            polish = du[0].abs() <= 1e-12 * u[0].max(1.0)
                && du[1].abs() <= 1e-12 * u[1].abs().max(1.0)
                && du[2].abs() <= 1e-12 * u[2];
        }
        if !done || !(u[0] > 0.0 && u[2] > 0.0) || !u.iter().all(|v| v.is_finite()) {
            return None;
        }
        let (k, sm, w) = (u[0], u[1], u[2]);
        let m = Modulus::new(k).ok()?;
        let (val, _) = curvature_state(k, sm, w, m);
        let kappa = self.curvature_scale();
        let resid = (val - goal)
            .component_div(&Vector3::new(kappa, kappa * kappa, kappa * kappa))
            .amax();
        if !(resid <= 1e-10) {
            return None;
        }
        let ell = z[SIGMA] / w;
        let phi = z[THETA] - tangent_angle(sm, m, self.psi);
        let p = ElasticaParams::new(k, sm - 0.5 * ell, ell, w, phi, 0.0, 0.0);
        let mut p = project(p);
        let m = p.validate().ok()?;
        let mid = segment_eval_unchecked(&p, m, 0.5);
        p.x0 = z[X] - mid.x;
        p.y0 = z[Y] - mid.y;
        Some(p)
    }

    /// Chart coordinates of a nearby parameter point.
    pub fn coords(&self, p: &ElasticaParams) -> Option<[f64; N_PARAMS]> {
        let m = p.validate().ok()?;
        Some(forward(p, m, self.psi).0)
    }

    /// Curvature magnitude used to judge the accuracy of the inverse map.
    fn curvature_scale(&self) -> f64 {
        self.z[A].abs() + 1.0 / self.z[SIGMA].abs()
    }
}
