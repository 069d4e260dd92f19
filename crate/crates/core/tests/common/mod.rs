// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

use std::path::PathBuf;

use elastica::curve::{CubicBez, PlaneCurve};
use elastica::elastica::{segment_jet, wrap_angle, ElasticaParams};
use elastica::elliptic::{quarter_period, Modulus};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full period `4K(k)` of the curvature along the basic elastica.
pub fn period(k: f64) -> f64 {
    4.0 * quarter_period(Modulus::new(k).unwrap()).unwrap()
}

/// Distance between `a` and `b` modulo the period for modulus `k`.
pub fn period_distance(a: f64, b: f64, k: f64) -> f64 {
    let p = period(k);
    let r = (a - b).rem_euclid(p);
    r.min(p - r)
}

pub fn angle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Random segment spanning between 1 and 4 monotone runs of the curvature,
/// alternating inflectional and non-inflectional moduli. Non-inflectional
/// segments get either orientation.
pub fn random_segment(rng: &mut ChaCha8Rng, inflectional: bool) -> ElasticaParams {
    let k = if inflectional {
        rng.gen_range(0.15..0.95)
    } else {
        rng.gen_range(1.05..2.5)
    };
    let p = period(k);
    let run = 0.5 * p;
    let s0 = rng.gen_range(0.03..0.97) * p;
    let mut ell = rng.gen_range(0.25..3.0) * run;
    if !inflectional && rng.gen_bool(0.5) {
        ell = -ell;
    }
    ElasticaParams::new(
        k,
        s0,
        ell,
        rng.gen_range(0.3..3.0),
        rng.gen_range(-PI..PI),
        rng.gen_range(-5.0..5.0),
        rng.gen_range(-5.0..5.0),
    )
}

/// C¹ cubic Hermite interpolant of an elastica segment with `pieces`
/// Bézier pieces.
pub fn elastica_bezier(p: &ElasticaParams, pieces: usize) -> PlaneCurve {
    let h = 1.0 / pieces as f64;
    let jet = |t: f64| segment_jet(p, t).unwrap();
    let out = (0..pieces)
        .map(|i| {
            let [a, da, _] = jet(i as f64 * h);
            let [b, db, _] = jet((i + 1) as f64 * h);
            CubicBez::new(a, a + da * (h / 3.0), b - db * (h / 3.0), b)
        })
        .collect();
    PlaneCurve::Bezier(out)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus")
}

/// The Bézier corpus as `(name, curve)`, sorted by name.
pub fn corpus() -> Vec<(String, PlaneCurve)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|f| {
            let name = f.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&f).unwrap();
            (name, PlaneCurve::from_json(&text).unwrap())
        })
        .collect()
}

pub fn corpus_curve(name: &str) -> PlaneCurve {
    let text = std::fs::read_to_string(corpus_dir().join(format!("{name}.json"))).unwrap();
    PlaneCurve::from_json(&text).unwrap()
}
