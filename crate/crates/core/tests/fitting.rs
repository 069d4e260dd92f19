// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

mod common;

use common::{random_segment, rng};
use elastica::curve::{CubicBez, CurveSamples, PlaneCurve};
use elastica::elastica::{segment_eval, segment_tangent, ElasticaParams, PlanePoint, N_PARAMS};
use elastica::fitting::{fit, gradient_hessian, objective, Constraints, FitProblem};
use elastica::recovery::initial_guess;
use rand::Rng;

fn perturbed(p: &ElasticaParams, rng: &mut rand_chacha::ChaCha8Rng, rel: f64) -> ElasticaParams {
    let mut a = p.to_array();
    for v in a.iter_mut() {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        *v += sign * rel * v.abs().max(0.1);
    }
    ElasticaParams::from_array(a)
}

/// A target that is not an elastica: a nearby segment plus a smooth bump.
fn bumpy_target(p: &ElasticaParams, n: usize) -> CurveSamples {
    let base = CurveSamples::from_elastica(p, n).unwrap();
    let l = base.length();
    let p = *p;
    CurveSamples::from_jet(n, move |t| {
        let h = 1e-4;
        let pos = |t: f64| {
            let b = segment_eval(&p, t).unwrap();
            b + PlanePoint::new(0.0, 0.02 * l * (3.0 * t).sin())
        };
        let x = pos(t);
        let xp = (pos(t + h) - pos(t - h)) * (0.5 / h);
        let xpp = (pos(t + h) - x * 2.0 + pos(t - h)) * (1.0 / (h * h));
        [x, xp, xpp]
    })
    .unwrap()
}

#[test]
fn objective_matches_refined_quadrature() {
    let mut rng = rng(11);
    for i in 0..20 {
        let p = random_segment(&mut rng, i % 2 == 0);
        let q = perturbed(&p, &mut rng, 0.05);
        let coarse = CurveSamples::from_elastica(&p, 1024).unwrap();
        let fine = CurveSamples::from_elastica(&p, 4096).unwrap();
        let (a, b) = (objective(&q, &coarse).unwrap(), objective(&q, &fine).unwrap());
        assert!((a - b).abs() <= 1e-8 * b, "{a} vs {b}");
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let mut rng = rng(12);
    for i in 0..100 {
        let p = random_segment(&mut rng, i % 2 == 0);
        let target = CurveSamples::from_elastica(&perturbed(&p, &mut rng, 0.05), 128).unwrap();
        let (g, h) = gradient_hessian(&p, &target).unwrap();
        let base = p.to_array();
        let step = |j: usize, h: f64| {
            let mut a = base;
            a[j] += h;
            ElasticaParams::from_array(a)
        };
        let gscale = g.norm();
        let hscale = h.norm();
        for j in 0..N_PARAMS {
            let hh = 1e-6 * base[j].abs().max(1.0);
            let fd =
                (objective(&step(j, hh), &target).unwrap() - objective(&step(j, -hh), &target).unwrap()) / (2.0 * hh);
            assert!((fd - g[j]).abs() <= 1e-5 * gscale, "grad {j}: {fd} vs {} ({p:?})", g[j]);
            let (gp, _) = gradient_hessian(&step(j, hh), &target).unwrap();
            let (gm, _) = gradient_hessian(&step(j, -hh), &target).unwrap();
            for r in 0..N_PARAMS {
                let fdh = (gp[r] - gm[r]) / (2.0 * hh);
                assert!(
                    (fdh - h[(r, j)]).abs() <= 1e-4 * hscale,
                    "hess ({r},{j}): {fdh} vs {} ({p:?})",
                    h[(r, j)]
                );
            }
        }
    }
}

#[test]
fn refits_perturbed_segments() {
    let mut rng = rng(13);
    let mut failed = Vec::new();
    for i in 0..20 {
        let p = random_segment(&mut rng, i % 2 == 0);
        let target = CurveSamples::from_elastica(&p, 1024).unwrap();
        let init = perturbed(&p, &mut rng, 0.01);
        let res = fit(&FitProblem::new(target.clone(), init)).unwrap();
        let l3 = target.length().powi(3);
        if !(res.converged && res.objective <= 1e-10 * l3 && res.grad_norm <= 1e-8 && res.iterations <= 50) {
            failed.push(format!("{p:?} -> {res:?}"));
        }
    }
    assert!(failed.len() <= 1, "{}", failed.join("\n"));
}

#[test]
fn descent_from_recovered_guess() {
    let mut rng = rng(14);
    for i in 0..10 {
        let p = random_segment(&mut rng, i % 2 == 0);
        let target = bumpy_target(&p, 1024);
        let guess = initial_guess(&target).unwrap();
        let f0 = objective(&guess.params, &target).unwrap();
        let res = fit(&FitProblem::new(target.clone(), guess.params)).unwrap();
        assert!(res.objective <= f0 + 1e-12, "{} > {f0}", res.objective);
        assert!(res.converged, "{res:?}");
    }
}

#[test]
fn constrained_fits_pin_the_ends() {
    let bez = PlaneCurve::Bezier(vec![CubicBez::new(
        PlanePoint::new(0.0, 0.0),
        PlanePoint::new(1.0, 1.5),
        PlanePoint::new(2.2, -0.8),
        PlanePoint::new(3.0, 0.3),
    )]);
    let target = bez.sample(1024).unwrap();
    let guess = initial_guess(&target).unwrap();
    let free = fit(&FitProblem::new(target.clone(), guess.params)).unwrap();
    assert!(free.converged, "{free:?}");
    for kind in [Constraints::Endpoints, Constraints::EndpointsAndTangents] {
        let res = fit(&FitProblem::new(target.clone(), guess.params).with_constraints(kind)).unwrap();
        assert!(res.converged, "{kind:?}: {res:?}");
        let p = res.params;
        let gap0 = (segment_eval(&p, 0.0).unwrap() - target.start()).norm();
        let gap1 = (segment_eval(&p, 1.0).unwrap() - target.end()).norm();
        assert!(gap0 <= 1e-10 && gap1 <= 1e-10, "{gap0} {gap1}");
        if kind == Constraints::EndpointsAndTangents {
            let t0 = segment_tangent(&p, 0.0).unwrap();
            let t1 = segment_tangent(&p, 1.0).unwrap();
            assert!(t0.cross(target.start_tangent()).abs() <= 1e-8 && t0.dot(target.start_tangent()) > 0.0);
            assert!(t1.cross(target.end_tangent()).abs() <= 1e-8 && t1.dot(target.end_tangent()) > 0.0);
        }
        assert!(res.objective >= free.objective - 1e-12);
    }
}
