// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::chart::{self, Chart};
use super::constraints::{self, Constraints, EndData};
use super::objective::{objective_unchecked, value_gradient_hessian, Gradient, Hessian};
use super::trust_region::{model, solve, solve_with_shift};
use super::{FitProblem, FitResult, Termination, CONSTRAINT_TOL, EPS_K, K_MAX};
use crate::curve::CurveSamples;
use crate::elastica::{segment_partials_unchecked, wrap_angle, ElasticaParams, PlanePoint, N_PARAMS};
use crate::elliptic::Modulus;
use crate::recovery::K_MIN;
use crate::{Error, Result};

const INITIAL_RADIUS: f64 = 1.0;
const MAX_RADIUS: f64 = 1e3;
const ACCEPT: f64 = 1e-4;
/// Constrained iterations continue below `CONSTRAINT_TOL` so that two
/// pieces pinned to the same target point are within it of each other.
const STOP_VIOLATION: f64 = 0.25 * CONSTRAINT_TOL;

/// Admissible parameter set.
struct Bounds {
    k_max: f64,
    w_min: f64,
}

impl Bounds {
    fn new(init: &ElasticaParams, length: f64) -> Self {
        Bounds {
            k_max: K_MAX.max(2.0 * init.k),
            w_min: 1e-9 * length,
        }
    }

    fn project(&self, mut p: ElasticaParams) -> ElasticaParams {
        p.k = if p.k < 1.0 {
            p.k.clamp(K_MIN, 1.0 - EPS_K)
        } else {
            p.k.clamp(1.0 + EPS_K, self.k_max)
        };
        p.w = p.w.max(self.w_min);
        if p.ell == 0.0 {
            p.ell = f64::EPSILON;
        }
        p
    }
}

fn scale_vec(d: &[f64; N_PARAMS], g: &Gradient) -> DVector<f64> {
    DVector::from_fn(N_PARAMS, |i, _| d[i] * g[i])
}

fn scale_mat(d: &[f64; N_PARAMS], h: &Hessian) -> DMatrix<f64> {
    DMatrix::from_fn(N_PARAMS, N_PARAMS, |i, j| d[i] * h[(i, j)] * d[j])
}

/// Parameters at the scaled chart offset `v`, projected into `bounds`.
fn offset(chart: &Chart, bounds: &Bounds, d: &[f64; N_PARAMS], v: &DVector<f64>) -> Option<ElasticaParams> {
    let mut z = chart.z;
    for i in 0..N_PARAMS {
        z[i] += d[i] * v[i];
    }
    chart.params(&z, |p| bounds.project(p))
}

/// Scaled chart step from the chart centre to `p`.
fn step_to(chart: &Chart, p: &ElasticaParams, d: &[f64; N_PARAMS]) -> Option<DVector<f64>> {
    let z = chart.coords(p)?;
    let v = DVector::from_fn(N_PARAMS, |i, _| (z[i] - chart.z[i]) / d[i]);
    v.iter().all(|x| x.is_finite()).then_some(v)
}

/// Largest accepted ratio `‖a‖/‖v‖` of acceleration to velocity.
const ACCEL_RATIO: f64 = 0.375;

/// Geodesic acceleration for the scaled step `v`: the solution of
/// `(H + μI) a = −Jᵀ r_vv`, where `r_vv` is the second directional
/// derivative of the residual along `v`. Adding `a/2` bends the step along
/// curved valleys of `F`.
fn acceleration(
    at: &Point,
    chart: &Chart,
    target: &CurveSamples,
    d: &[f64; N_PARAMS],
    v: &DVector<f64>,
    shifted: DMatrix<f64>,
) -> Option<DVector<f64>> {
    let dz = Gradient::from_fn(|i, _| v[i] * d[i]);
    let (pv, pvv) = chart.directional(&dz);
    let l = target.length();
    let mut rhs = Gradient::zeros();
    for (&s, &wt) in target.s().iter().zip(target.ds_weights()) {
        let sp = segment_partials_unchecked(&at.p, at.m, s / l);
        let mut yvv = PlanePoint::ZERO;
        for i in 0..N_PARAMS {
            yvv += sp.first[i] * pvv[i];
            for j in 0..N_PARAMS {
                yvv += sp.second[i][j] * (pv[i] * pv[j]);
            }
        }
        for i in 0..N_PARAMS {
            rhs[i] += wt * sp.first[i].dot(yvv);
        }
    }
    let rhs = scale_vec(d, &chart.gradient(&rhs));
    let a = shifted.cholesky()?.solve(&(-rhs));
    a.iter().all(|x| x.is_finite()).then_some(a)
}

fn scaled_norm(q: &[f64; N_PARAMS], d: &[f64; N_PARAMS]) -> f64 {
    q.iter().zip(d).map(|(v, s)| (v / s).powi(2)).sum::<f64>().sqrt()
}

fn value(p: &ElasticaParams, target: &CurveSamples) -> Option<(Modulus, f64)> {
    let m = p.validate().ok()?;
    let f = objective_unchecked(p, m, target);
    f.is_finite().then_some((m, f))
}

struct Point {
    p: ElasticaParams,
    m: Modulus,
    f: f64,
    g: Gradient,
    h: Hessian,
}

fn point(p: ElasticaParams, target: &CurveSamples) -> Option<Point> {
    let (f, g, h) = value_gradient_hessian(&p, target).ok()?;
    let finite = f.is_finite() && g.iter().all(|v| v.is_finite()) && h.iter().all(|v| v.is_finite());
    finite.then(|| Point {
        m: p.validate().expect("evaluated"),
        p,
        f,
        g,
        h,
    })
}

fn update_radius(radius: f64, rho: f64, step: f64) -> f64 {
    if rho < 0.25 {
        0.25 * step.min(radius)
    } else if rho > 0.75 && step >= 0.99 * radius {
        (2.0 * radius).min(MAX_RADIUS)
    } else {
        radius
    }
}

/// Model decrease of the unrestricted Newton step.
fn newton_decrement(h: &DMatrix<f64>, g: &DVector<f64>) -> f64 {
    -model(h, g, &solve(h, g, MAX_RADIUS))
}

/// The gradient test alone stops too early in flat valleys, so convergence
/// also requires that a full Newton step would gain almost nothing.
fn decrement_floor(f: f64, length: f64) -> f64 {
    1e-12 * f + 1e-24 * length.powi(3)
}

/// Trapezoidal estimate of `F(b) − F(a)` from the end gradients, accurate
/// well below the roundoff of `F` itself for short steps.
fn gradient_change(a: &Point, b: &Point) -> f64 {
    let dp = DVector::from_iterator(N_PARAMS, b.p.to_array().iter().zip(a.p.to_array()).map(|(x, y)| x - y));
    0.5 * (a.g + b.g).dot(&dp)
}

/// Reductions this small are below the roundoff of the objective sum.
fn negligible(pred: f64, f: f64) -> bool {
    pred <= 1e-14 * f.abs()
}

pub(super) fn run(problem: &FitProblem) -> Result<FitResult> {
    let target = &problem.target;
    let bounds = Bounds::new(&problem.init, target.length());
    let start = bounds.project(problem.init);
    let Some(at) = point(start, target) else {
        return Err(Error::Domain {
            what: "objective at the initial point",
            value: f64::NAN,
        });
    };
    let mut out = match problem.constraints {
        Constraints::None => unconstrained(problem, &bounds, at),
        kind => constrained(problem, &bounds, at, kind),
    };
    out.params.phi = wrap_angle(out.params.phi);
    Ok(out)
}

fn unconstrained(problem: &FitProblem, bounds: &Bounds, mut at: Point) -> FitResult {
    let target = &problem.target;
    let tol = problem.tolerances;
    let length = target.length();
    let d = chart::scaling(length);
    let mut radius = INITIAL_RADIUS;
    let mut iterations = 0;
    let mut termination = Termination::MaxIterations;
    while iterations < tol.max_iter {
        let Some(chart) = Chart::at(&at.p, at.m) else {
            termination = Termination::NumericalFailure;
            break;
        };
        let gz = scale_vec(&d, &chart.gradient(&at.g));
        let hz = scale_mat(&d, &chart.hessian(&at.g, &at.h));
        if at.g.norm() <= tol.grad_tol && newton_decrement(&hz, &gz) <= decrement_floor(at.f, length) {
            termination = Termination::Converged;
            break;
        }
        if radius <= tol.step_tol * (1.0 + scaled_norm(&chart.z, &d)) {
            termination = Termination::StepTolerance;
            break;
        }
        iterations += 1;
        let (v, mu) = solve_with_shift(&hz, &gz, radius);
        let shifted = &hz + DMatrix::identity(N_PARAMS, N_PARAMS) * mu;
        let sz = match acceleration(&at, &chart, target, &d, &v, shifted) {
            Some(a) if a.norm() <= ACCEL_RATIO * v.norm() => &v + a * 0.5,
            _ => v,
        };
        let Some(trial) = offset(&chart, bounds, &d, &sz) else {
            radius *= 0.25;
            continue;
        };
        let Some(taken) = step_to(&chart, &trial, &d) else {
            radius *= 0.25;
            continue;
        };
        let pred = -model(&hz, &gz, &taken);
        let Some((_, ft)) = value(&trial, target) else {
            radius *= 0.25;
            continue;
        };
        if !(pred > 0.0) || negligible(pred, at.f) {
            // At the noise floor of F the change in F is estimated from the
            // gradients instead, and a step that lowers the gradient is kept.
            if pred >= 0.0 && taken.norm() > 0.0 {
                if let Some(next) = point(trial, target) {
                    let better = next.g.norm() < at.g.norm();
                    if better && gradient_change(&at, &next) <= 0.0 {
                        at = next;
                        continue;
                    }
                    if ft <= at.f {
                        at = next;
                    }
                }
            }
            radius *= 0.25;
            continue;
        }
        let rho = (at.f - ft) / pred;
        radius = update_radius(radius, rho, taken.norm());
        if rho > ACCEPT && ft <= at.f {
            match point(trial, target) {
                Some(next) => at = next,
                None => radius *= 0.25,
            }
        }
    }
    let converged = at.g.norm() <= tol.grad_tol;
    FitResult {
        params: at.p,
        objective: at.f,
        grad_norm: at.g.norm(),
        iterations,
        converged,
        constraint_violation: 0.0,
        termination: if converged { Termination::Converged } else { termination },
    }
}

/// Pseudo-inverse and null-space basis of a short, wide matrix.
struct Decomposition {
    range: Vec<(DVector<f64>, f64)>,
    null: DMatrix<f64>,
    jac: DMatrix<f64>,
}

impl Decomposition {
    fn new(jac: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(jac.transpose() * &jac);
        let top = eig.eigenvalues.amax();
        let mut range = Vec::new();
        let mut null = Vec::new();
        for (i, &s2) in eig.eigenvalues.iter().enumerate() {
            let v = eig.eigenvectors.column(i).into_owned();
            if s2 > 1e-20 * top && top > 0.0 {
                range.push((v, s2));
            } else {
                null.push(v);
            }
        }
        // Keep at most `rows` range directions.
        range.sort_by(|a, b| b.1.total_cmp(&a.1));
        while range.len() > jac.nrows() {
            null.push(range.pop().unwrap().0);
        }
        let null = if null.is_empty() {
            DMatrix::zeros(N_PARAMS, 0)
        } else {
            DMatrix::from_columns(&null)
        };
        Decomposition { range, null, jac }
    }

    /// Minimum-norm least-squares solution of `J x = b`.
    fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let jtb = self.jac.transpose() * b;
        let mut x = DVector::zeros(N_PARAMS);
        for (v, s2) in &self.range {
            x += v * (v.dot(&jtb) / s2);
        }
        x
    }

    /// Least-squares multipliers `μ` minimizing `‖g + Jᵀμ‖`.
    fn multipliers(&self, g: &DVector<f64>) -> DVector<f64> {
        // μ = −(J Jᵀ)⁺ J g, computed via the right singular vectors.
        let m = self.jac.nrows();
        let mut mu = DVector::zeros(m);
        for (v, s2) in &self.range {
            let u = &self.jac * v;
            mu -= u * (v.dot(g) / s2);
        }
        mu
    }
}

/// `min_μ ‖g + Jᵀμ‖`, the Lagrangian gradient norm in the caller's
/// parameters at the best multipliers for that metric.
fn stationarity(g: &Gradient, jac: &DMatrix<f64>) -> f64 {
    let g = DVector::from_column_slice(g.as_slice());
    let jt = jac.transpose();
    match jt.clone().svd(true, true).solve(&(-&g), 1e-14) {
        Ok(mu) => (g + jt * mu).norm(),
        Err(_) => g.norm(),
    }
}

struct ConstrainedPoint {
    at: Point,
    c: constraints::ConstraintEval,
}

fn constrained(problem: &FitProblem, bounds: &Bounds, at: Point, kind: Constraints) -> FitResult {
    let target = &problem.target;
    let tol = problem.tolerances;
    let length = target.length();
    let d = chart::scaling(length);
    let ends = EndData::of(target);
    // Endpoint rows are measured in units of the target length.
    let row_scale: Vec<f64> = (0..kind.count())
        .map(|i| if i < 4 { 1.0 / length } else { 1.0 })
        .collect();
    let scale_rows = |c: &DVector<f64>| DVector::from_fn(c.len(), |i, _| c[i] * row_scale[i]);
    let constraint_values =
        |p: &ElasticaParams, m: Modulus| scale_rows(&constraints::evaluate(p, m, kind, &ends).values);
    let eval = |at: Point| {
        let c = constraints::evaluate(&at.p, at.m, kind, &ends);
        ConstrainedPoint { at, c }
    };

    let mut cur = eval(at);
    let mut nu = 0.0f64;
    let mut radius = INITIAL_RADIUS;
    let mut iterations = 0;
    let mut termination = Termination::MaxIterations;
    let mut grad_norm = cur.at.g.norm();
    loop {
        let Some(chart) = Chart::at(&cur.at.p, cur.at.m) else {
            termination = Termination::NumericalFailure;
            break;
        };
        let gz = scale_vec(&d, &chart.gradient(&cur.at.g));
        let cz = scale_rows(&cur.c.values);
        let jq = &cur.c.jacobian * DMatrix::from_fn(N_PARAMS, N_PARAMS, |i, j| chart.jac[(i, j)]);
        let jz = DMatrix::from_fn(kind.count(), N_PARAMS, |i, j| row_scale[i] * jq[(i, j)] * d[j]);
        let dec = Decomposition::new(jz.clone());
        let mu = dec.multipliers(&gz);
        // Multipliers of the unscaled constraints for the step.
        let mu_p: Vec<f64> = (0..kind.count()).map(|i| mu[i] * row_scale[i]).collect();
        let mut lag = cur.at.g;
        let mut hl = cur.at.h;
        for (i, hc) in cur.c.hessians.iter().enumerate() {
            for j in 0..N_PARAMS {
                lag[j] += mu_p[i] * cur.c.jacobian[(i, j)];
            }
            hl += hc * mu_p[i];
        }
        grad_norm = stationarity(&cur.at.g, &cur.c.jacobian);
        let violation = constraints::violation(&cur.at.p, cur.at.m, kind, &ends);
        let hz = scale_mat(&d, &chart.hessian(&lag, &hl));
        let z = &dec.null;
        if grad_norm <= tol.grad_tol && violation <= STOP_VIOLATION {
            let hr = z.transpose() * &hz * z;
            let gr = z.transpose() * &gz;
            if newton_decrement(&hr, &gr) <= decrement_floor(cur.at.f, length) {
                termination = Termination::Converged;
                break;
            }
        }
        if iterations >= tol.max_iter {
            break;
        }
        if radius <= tol.step_tol * (1.0 + scaled_norm(&chart.z, &d)) {
            termination = Termination::StepTolerance;
            break;
        }
        iterations += 1;

        // Normal step towards feasibility, then a tangential step in the
        // null space of the linearized constraints.
        let mut v = -dec.solve(&cz);
        if v.norm() > 0.8 * radius {
            v *= 0.8 * radius / v.norm();
        }
        let gr = z.transpose() * (&gz + &hz * &v);
        let hr = z.transpose() * &hz * z;
        let rt = (radius * radius - v.norm_squared()).max(0.0).sqrt();
        let step = &v + z * solve(&hr, &gr, rt);

        nu = nu.max(2.0 * mu.norm());
        let Some(trial) = offset(&chart, bounds, &d, &step) else {
            radius *= 0.25;
            continue;
        };
        let Some(taken) = step_to(&chart, &trial, &d) else {
            radius *= 0.25;
            continue;
        };
        let q = model(&hz, &gz, &taken);
        let vpred = cz.norm() - (&cz + &jz * &taken).norm();
        if vpred > 1e-8 * cz.norm() && q > 0.0 {
            nu = nu.max(q / (0.7 * vpred));
        }
        let pred = -q + nu * vpred;
        let merit_cur = cur.at.f + nu * cz.norm();
        let merit_at = |p: &ElasticaParams| -> Option<f64> {
            let (m, f) = value(p, target)?;
            let c = constraint_values(p, m);
            let mt = f + nu * c.norm();
            mt.is_finite().then_some(mt)
        };
        let Some(mut merit_t) = merit_at(&trial) else {
            radius *= 0.25;
            continue;
        };
        let mut candidate = trial;
        let ratio = |mt: f64| (merit_cur - mt) / pred;
        if !(pred > 0.0) {
            radius *= 0.25;
            continue;
        }
        if ratio(merit_t) < ACCEPT {
            // Second-order correction against the curvature of c.
            let ct = trial.validate().map(|m| constraint_values(&trial, m));
            if let Ok(ct) = ct {
                let corr = &step - dec.solve(&ct);
                let soc = offset(&chart, bounds, &d, &corr);
                if let Some((soc, ms)) = soc.and_then(|p| Some((p, merit_at(&p)?))) {
                    if ms < merit_t {
                        merit_t = ms;
                        candidate = soc;
                    }
                }
            }
        }
        let rho = ratio(merit_t);
        let accept = (rho > ACCEPT || (negligible(pred, merit_cur) && merit_t <= merit_cur)) && merit_t <= merit_cur;
        radius = update_radius(radius, rho, taken.norm());
        if accept {
            match point(candidate, target) {
                Some(next) => cur = eval(next),
                None => radius *= 0.25,
            }
        }
    }
    let violation = constraints::violation(&cur.at.p, cur.at.m, kind, &ends);
    let converged = grad_norm <= tol.grad_tol && violation <= CONSTRAINT_TOL;
    FitResult {
        params: cur.at.p,
        objective: cur.at.f,
        grad_norm,
        iterations,
        converged,
        constraint_violation: violation,
        termination: if converged { Termination::Converged } else { termination },
    }
}
