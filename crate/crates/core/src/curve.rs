// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Input curves and their discretization.
//!
//! A [`PlaneCurve`] is either a chain of cubic Bézier pieces or a dense
//! polyline, parameterized over `[0, 1]` with every Bézier piece taking an
//! equal share of the parameter range. [`CurveSamples`] holds everything the
//! fitting stages need at a fixed set of nodes, together with composite
//! Simpson weights so that `∫ f ds = ∫₀¹ f(t) |x'(t)| dt` becomes a weighted
//! sum.
//!
//! Bézier chains are sampled piece by piece with an even number of intervals
//! per piece, and the node at each join is stored twice (once as the end of
//! the left piece, once as the start of the right piece) so that a jump in
//! speed or curvature at a join does not spoil the quadrature.

use serde::{Deserialize, Serialize};

use crate::elastica::{segment_jet, ElasticaParams, PlanePoint};
use crate::error::{Error, Result};

/// Minimum number of sampling intervals.
pub const MIN_SAMPLES: usize = 16;

/// Default number of sampling intervals.
pub const DEFAULT_SAMPLES: usize = 1024;

// 5-point Gauss-Legendre on [-1, 1].
const GL_X: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

/// A cubic Bézier piece. Serialized as four `[x, y]` control points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[PlanePoint; 4]", into = "[PlanePoint; 4]")]
pub struct CubicBez {
    pub p: [PlanePoint; 4],
}

impl From<[PlanePoint; 4]> for CubicBez {
    fn from(p: [PlanePoint; 4]) -> Self {
        CubicBez { p }
    }
}

impl From<CubicBez> for [PlanePoint; 4] {
    fn from(c: CubicBez) -> Self {
        c.p
    }
}

impl CubicBez {
    pub fn new(p0: PlanePoint, p1: PlanePoint, p2: PlanePoint, p3: PlanePoint) -> Self {
        CubicBez { p: [p0, p1, p2, p3] }
    }

    pub fn eval(&self, t: f64) -> PlanePoint {
        let mt = 1.0 - t;
        let [a, b, c, d] = self.p;
        a * (mt * mt * mt) + b * (3.0 * mt * mt * t) + c * (3.0 * mt * t * t) + d * (t * t * t)
    }

    pub fn deriv(&self, t: f64) -> PlanePoint {
        let mt = 1.0 - t;
        let [a, b, c, d] = self.p;
        (b - a) * (3.0 * mt * mt) + (c - b) * (6.0 * mt * t) + (d - c) * (3.0 * t * t)
    }

    pub fn deriv2(&self, t: f64) -> PlanePoint {
        let [a, b, c, d] = self.p;
        (c - b * 2.0 + a) * (6.0 * (1.0 - t)) + (d - c * 2.0 + b) * (6.0 * t)
    }

    /// Split at `t` by de Casteljau.
    pub fn split(&self, t: f64) -> (CubicBez, CubicBez) {
        let lerp = |a: PlanePoint, b: PlanePoint| a + (b - a) * t;
        let [a, b, c, d] = self.p;
        let ab = lerp(a, b);
        let bc = lerp(b, c);
        let cd = lerp(c, d);
        let abc = lerp(ab, bc);
        let bcd = lerp(bc, cd);
        let m = lerp(abc, bcd);
        (CubicBez::new(a, ab, abc, m), CubicBez::new(m, bcd, cd, d))
    }

    /// The piece restricted to `[a, b] ⊂ [0, 1]`, reparameterized to `[0, 1]`.
    pub fn subsegment(&self, a: f64, b: f64) -> CubicBez {
        let right = if a > 0.0 { self.split(a).1 } else { *self };
        if b >= 1.0 {
            right
        } else {
            right.split((b - a) / (1.0 - a)).0
        }
    }

    fn arclength(&self, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|i| {
                let mid = a + (i as f64 + 0.5) * h;
                GL_X.iter()
                    .zip(GL_W)
                    .map(|(x, w)| w * self.deriv(mid + 0.5 * h * x).norm())
                    .sum::<f64>()
                    * 0.5
                    * h
            })
            .sum()
    }
}

/// An input curve over the parameter domain `[0, 1]`.
///
/// The JSON form is `{"bezier": [[[x,y],[x,y],[x,y],[x,y]], ...]}` or
/// `{"polyline": [[x,y], ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum PlaneCurve {
    Bezier(Vec<CubicBez>),
    Polyline(Vec<PlanePoint>),
}

impl PlaneCurve {
    /// Parse and validate the JSON curve description.
    pub fn from_json(text: &str) -> Result<Self> {
        let c: PlaneCurve = serde_json::from_str(text).map_err(|e| Error::InvalidCurve(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = match self {
            PlaneCurve::Bezier(pieces) => {
                if pieces.is_empty() {
                    return Err(Error::InvalidCurve("no Bézier pieces".into()));
                }
                pieces.iter().all(|c| c.p.iter().all(|p| p.is_finite()))
            }
            PlaneCurve::Polyline(pts) => {
                if pts.len() < 2 {
                    return Err(Error::InvalidCurve("polyline needs at least two points".into()));
                }
                pts.iter().all(|p| p.is_finite())
            }
        };
        if finite {
            Ok(())
        } else {
            Err(Error::InvalidCurve("non-finite coordinate".into()))
        }
    }

    pub fn start(&self) -> PlanePoint {
        match self {
            PlaneCurve::Bezier(pieces) => pieces[0].p[0],
            PlaneCurve::Polyline(pts) => pts[0],
        }
    }

    pub fn end(&self) -> PlanePoint {
        match self {
            PlaneCurve::Bezier(pieces) => pieces[pieces.len() - 1].p[3],
            PlaneCurve::Polyline(pts) => pts[pts.len() - 1],
        }
    }

    fn bezier_locate(pieces: &[CubicBez], t: f64) -> (usize, f64) {
        let m = pieces.len();
        let x = t.clamp(0.0, 1.0) * m as f64;
        let i = (x.floor() as usize).min(m - 1);
        (i, x - i as f64)
    }

    /// Point at parameter `t`.
    pub fn eval(&self, t: f64) -> PlanePoint {
        match self {
            PlaneCurve::Bezier(pieces) => {
                let (i, tau) = Self::bezier_locate(pieces, t);
                pieces[i].eval(tau)
            }
            PlaneCurve::Polyline(pts) => {
                let m = pts.len() - 1;
                let x = t.clamp(0.0, 1.0) * m as f64;
                let i = (x.floor() as usize).min(m - 1);
                let f = x - i as f64;
                pts[i] + (pts[i + 1] - pts[i]) * f
            }
        }
    }

    /// Arclength from the start to parameter `t`.
    pub fn arclength_to(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            PlaneCurve::Bezier(pieces) => {
                let (i, tau) = Self::bezier_locate(pieces, t);
                pieces[..i].iter().map(|c| c.arclength(0.0, 1.0, 64)).sum::<f64>() + pieces[i].arclength(0.0, tau, 64)
            }
            PlaneCurve::Polyline(pts) => {
                let m = pts.len() - 1;
                let x = t * m as f64;
                let i = (x.floor() as usize).min(m - 1);
                pts.windows(2).take(i).map(|w| (w[1] - w[0]).norm()).sum::<f64>()
                    + (pts[i + 1] - pts[i]).norm() * (x - i as f64)
            }
        }
    }

    pub fn length(&self) -> f64 {
        self.arclength_to(1.0)
    }

    /// Parameter where the arclength from the start reaches `target`.
    pub fn param_at_arclength(&self, target: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if self.arclength_to(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The part of the curve between parameters `a < b`, reparameterized
    /// over `[0, 1]`.
    pub fn subcurve(&self, a: f64, b: f64) -> PlaneCurve {
        match self {
            PlaneCurve::Bezier(pieces) => {
                let (ia, ta) = Self::bezier_locate(pieces, a);
                let (mut ib, mut tb) = Self::bezier_locate(pieces, b);
                if tb == 0.0 && ib > ia {
                    ib -= 1;
                    tb = 1.0;
                }
                let out = (ia..=ib)
                    .map(|i| {
                        let lo = if i == ia { ta } else { 0.0 };
                        let hi = if i == ib { tb } else { 1.0 };
                        pieces[i].subsegment(lo, hi)
                    })
                    .collect();
                PlaneCurve::Bezier(out)
            }
            PlaneCurve::Polyline(pts) => {
                let m = (pts.len() - 1) as f64;
                let first = (a * m).floor() as usize + 1;
                let last = ((b * m).ceil() as usize).min(pts.len() - 1);
                let mut out = vec![self.eval(a)];
                out.extend(pts[first.min(last)..last].iter().copied());
                out.push(self.eval(b));
                out.dedup();
                PlaneCurve::Polyline(out)
            }
        }
    }

    /// Split at the arclength midpoint; returns both halves and the split
    /// parameter.
    pub fn split_at_arclength_midpoint(&self) -> (PlaneCurve, PlaneCurve, f64) {
        let t = self.param_at_arclength(0.5 * self.length());
        (self.subcurve(0.0, t), self.subcurve(t, 1.0), t)
    }

    /// Image under `p ↦ scale R_angle p + shift`.
    pub fn transformed(&self, scale: f64, angle: f64, shift: PlanePoint) -> PlaneCurve {
        let f = |p: PlanePoint| p.rotate(angle) * scale + shift;
        match self {
            PlaneCurve::Bezier(pieces) => {
                PlaneCurve::Bezier(pieces.iter().map(|c| CubicBez { p: c.p.map(f) }).collect())
            }
            PlaneCurve::Polyline(pts) => PlaneCurve::Polyline(pts.iter().map(|&p| f(p)).collect()),
        }
    }

    /// Sample with `n` intervals (rounded up so each Bézier piece gets an
    /// even count). Polylines are sampled at their vertices and ignore `n`.
    pub fn sample(&self, n: usize) -> Result<CurveSamples> {
        sample(self, n)
    }
}

/// Discretized curve: nodes with position, speed, cumulative arclength,
/// unwrapped tangent angle and curvature, plus quadrature weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveSamples {
    t: Vec<f64>,
    points: Vec<PlanePoint>,
    speed: Vec<f64>,
    s: Vec<f64>,
    theta: Vec<f64>,
    kappa: Vec<f64>,
    /// Quadrature weights in `t`; `ds_weights[i] = weights[i] * speed[i]`.
    ds_weights: Vec<f64>,
}

impl CurveSamples {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn speed(&self) -> &[f64] {
        &self.speed
    }

    /// Cumulative arclength at each node.
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// Per-node weights `w_i` with `∫ f ds ≈ Σ w_i f_i`.
    pub fn ds_weights(&self) -> &[f64] {
        &self.ds_weights
    }

    pub fn length(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    pub fn start(&self) -> PlanePoint {
        self.points[0]
    }

    pub fn end(&self) -> PlanePoint {
        self.points[self.points.len() - 1]
    }

    pub fn start_tangent(&self) -> PlanePoint {
        let (s, c) = self.theta[0].sin_cos();
        PlanePoint::new(c, s)
    }

    pub fn end_tangent(&self) -> PlanePoint {
        let (s, c) = self.theta[self.theta.len() - 1].sin_cos();
        PlanePoint::new(c, s)
    }

    /// `∫ f ds` for per-node values `f`.
    pub fn integrate_ds(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.len() {
            return Err(Error::Usage(format!(
                "integrand has {} values for {} samples",
                f.len(),
                self.len()
            )));
        }
        Ok(self.integrate_with(|i| f[i]))
    }

    /// `∫ f ds` with `f` given per node index.
    pub fn integrate_with(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.ds_weights.iter().enumerate().map(|(i, w)| w * f(i)).sum()
    }

    /// Arclength mean of `f`, normalized by the quadrature of `1` so that a
    /// constant averages to itself exactly.
    pub fn mean_with(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.integrate_with(f) / self.ds_weights.iter().sum::<f64>()
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> CurveSamples {
        let l = self.length();
        let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<_>>();
        CurveSamples {
            t: self.t.iter().rev().map(|t| 1.0 - t).collect(),
            points: self.points.iter().rev().copied().collect(),
            speed: rev(&self.speed),
            s: self.s.iter().rev().map(|s| l - s).collect(),
            theta: self.theta.iter().rev().map(|th| th + std::f64::consts::PI).collect(),
            kappa: self.kappa.iter().rev().map(|k| -k).collect(),
            ds_weights: rev(&self.ds_weights),
        }
    }

    /// Samples of an exact elastica segment, `n` intervals.
    pub fn from_elastica(p: &ElasticaParams, n: usize) -> Result<CurveSamples> {
        p.validate()?;
        let n = even_at_least(n);
        sample_smooth(1, n, |_, tau| segment_jet(p, tau).expect("validated"))
    }

    /// Samples of a smooth curve given by its jet `t ↦ (x, x', x'')` on
    /// `[0, 1]`, `n` intervals.
    pub fn from_jet(n: usize, jet: impl Fn(f64) -> [PlanePoint; 3]) -> Result<CurveSamples> {
        sample_smooth(1, even_at_least(n), |_, tau| jet(tau))
    }
}

fn even_at_least(n: usize) -> usize {
    let n = n.max(2);
    n + (n & 1)
}

/// Sample a curve. See [`PlaneCurve::sample`].
pub fn sample(curve: &PlaneCurve, n: usize) -> Result<CurveSamples> {
    if n < MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "need at least {MIN_SAMPLES} sampling intervals, got {n}"
        )));
    }
    curve.validate()?;
    match curve {
        PlaneCurve::Bezier(pieces) => {
            let m = pieces.len();
            let per_piece = even_at_least(n.div_ceil(m));
            let mf = m as f64;
            sample_smooth(m, per_piece, |i, tau| {
                let c = &pieces[i];
                [c.eval(tau), c.deriv(tau) * mf, c.deriv2(tau) * (mf * mf)]
            })
        }
        PlaneCurve::Polyline(pts) => sample_polyline(pts),
    }
}

/// Integrate `f` over the free-form integration segment with Simpson
/// weights `h/3 (1, 4, 2, ..., 4, 1)` over `q` (even) intervals.
fn simpson_weights(q: usize, h: f64) -> impl Iterator<Item = f64> {
    (0..=q).map(move |j| {
        let c = if j == 0 || j == q {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        c * h / 3.0
    })
}

fn sample_smooth(pieces: usize, per_piece: usize, jet: impl Fn(usize, f64) -> [PlanePoint; 3]) -> Result<CurveSamples> {
    let total = pieces * per_piece;
    let cap = pieces * (per_piece + 1);
    let mut out = CurveSamples {
        t: Vec::with_capacity(cap),
        points: Vec::with_capacity(cap),
        speed: Vec::with_capacity(cap),
        s: Vec::with_capacity(cap),
        theta: Vec::with_capacity(cap),
        kappa: Vec::with_capacity(cap),
        ds_weights: Vec::with_capacity(cap),
    };
    let dt = 1.0 / total as f64;
    let dtau = 1.0 / per_piece as f64;
    let mut s_acc = 0.0;
    for i in 0..pieces {
        let speed_at = |tau: f64| jet(i, tau)[1].norm();
        for (j, wq) in simpson_weights(per_piece, dt).enumerate() {
            let tau = j as f64 * dtau;
            if j > 0 {
                let a = (j - 1) as f64 * dtau;
                // Gauss-Legendre on the interval, in global t units.
                let seg: f64 = GL_X
                    .iter()
                    .zip(GL_W)
                    .map(|(x, w)| w * speed_at(a + 0.5 * dtau * (1.0 + x)))
                    .sum::<f64>()
                    * 0.5
                    * dt;
                s_acc += seg;
            }
            let [x, d1, d2] = jet(i, tau);
            let speed = d1.norm();
            if !(x.is_finite() && d1.is_finite() && d2.is_finite()) {
                return Err(Error::DegenerateInput("non-finite curve sample".into()));
            }
            let kappa = if speed > 0.0 {
                d1.cross(d2) / (speed * speed * speed)
            } else {
                0.0
            };
            out.t.push((i * per_piece + j) as f64 * dt);
            out.points.push(x);
            out.speed.push(speed);
            out.s.push(s_acc);
            out.theta.push(d1.y.atan2(d1.x));
            out.kappa.push(kappa);
            out.ds_weights.push(wq * speed);
        }
    }
    finish(out)
}

fn sample_polyline(pts: &[PlanePoint]) -> Result<CurveSamples> {
    let m = pts.len() - 1;
    let dt = 1.0 / m as f64;
    let mut s = Vec::with_capacity(pts.len());
    let mut acc = 0.0;
    s.push(0.0);
    for w in pts.windows(2) {
        acc += (w[1] - w[0]).norm();
        s.push(acc);
    }
    let diff = |i: usize| -> (PlanePoint, f64) {
        let (a, b) = if i == 0 {
            (0, 1)
        } else if i == m {
            (m - 1, m)
        } else {
            (i - 1, i + 1)
        };
        let span = (b - a) as f64 * dt;
        (pts[b] - pts[a], (s[b] - s[a]) / span)
    };
    let circumcurvature = |i: usize| -> f64 {
        let (a, b, c) = (pts[i - 1], pts[i], pts[i + 1]);
        let den = (b - a).norm() * (c - b).norm() * (c - a).norm();
        if den > 0.0 {
            2.0 * (b - a).cross(c - b) / den
        } else {
            0.0
        }
    };
    let mut kappa: Vec<f64> = (0..=m)
        .map(|i| if i == 0 || i == m { 0.0 } else { circumcurvature(i) })
        .collect();
    if m >= 2 {
        kappa[0] = kappa[1];
        kappa[m] = kappa[m - 1];
    }
    let weights = polyline_weights(m, dt);
    let (theta, speed): (Vec<f64>, Vec<f64>) = (0..=m)
        .map(|i| {
            let (chord, speed) = diff(i);
            (chord.y.atan2(chord.x), speed)
        })
        .unzip();
    let ds_weights = weights.iter().zip(&speed).map(|(w, v)| w * v).collect();
    let out = CurveSamples {
        t: (0..=m).map(|i| i as f64 * dt).collect(),
        points: pts.to_vec(),
        speed,
        s,
        theta,
        kappa,
        ds_weights,
    };
    finish(out)
}

/// Simpson weights for `m` intervals; odd counts close with the 3/8 rule.
fn polyline_weights(m: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; m + 1];
    match m {
        1 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
        }
        _ if m.is_multiple_of(2) => {
            for (j, v) in simpson_weights(m, h).enumerate() {
                w[j] = v;
            }
        }
        3 => {
            for (j, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
                w[j] = 3.0 * h / 8.0 * c;
            }
        }
        _ => {
            let q = m - 3;
            for (j, v) in simpson_weights(q, h).enumerate() {
                w[j] += v;
            }
            for (j, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
                w[q + j] += 3.0 * h / 8.0 * c;
            }
        }
    }
    w
}

fn finish(mut out: CurveSamples) -> Result<CurveSamples> {
    let l = out.length();
    if !(l > 0.0) || !l.is_finite() {
        return Err(Error::DegenerateInput("curve has zero length".into()));
    }
    unwrap_angles(&mut out.theta);
    Ok(out)
}

fn unwrap_angles(theta: &mut [f64]) {
    use std::f64::consts::{PI, TAU};
    for i in 1..theta.len() {
        let d = theta[i] - theta[i - 1];
        if d.abs() > PI {
            theta[i] -= TAU * (d / TAU).round();
        }
    }
}

/// `∫ f ds` over `samples`. See [`CurveSamples::integrate_ds`].
pub fn integrate_ds(samples: &CurveSamples, f: &[f64]) -> Result<f64> {
    samples.integrate_ds(f)
}
