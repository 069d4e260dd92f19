// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form initial guess for the elastica approximating a curve.
//!
//! On an elastica the curvature is an affine function of the coordinate
//! `u = x sin φ − y cos φ`, and `cos(θ − φ)` is a quadratic `P(u)`. Fitting
//! both relations by least squares recovers `w`, `φ` and `k`; the range of
//! `u` visited by the curve then gives the arc interval `[s0, s0 + ℓ]`, and
//! the translation follows from a mean.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::curve::CurveSamples;
use crate::elastica::{segment_eval, segment_tangent, ElasticaParams, PlanePoint};
use crate::elliptic::{incomplete_f, quarter_period, Modulus, K_GUARD};
use crate::fitting::objective::r4;
use crate::{Error, Result};

/// `λ` below `LAMBDA_MIN_FACTOR / L²` is treated as constant curvature.
pub const LAMBDA_MIN_FACTOR: f64 = 1e-8;
/// Smallest modulus returned by the recovery.
pub const K_MIN: f64 = 1e-6;
/// Modulus used to represent a circular arc.
pub const K_CIRCLE: f64 = 10.0;

/// Steps of `u` smaller than this fraction of the largest step are flat.
const FLAT_FRACTION: f64 = 1e-6;
/// Relative slack on `[u_min, u_max]` before a sample counts as out of range.
const RANGE_SLACK: f64 = 1e-8;
/// Total turning below which a constant-curvature curve is a line.
const LINE_TURNING: f64 = 1e-6;

/// Tunable parts of the recovery.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecoveryConfig {
    /// A monotone run of `u` counts as an oscillation when its height is at
    /// least this fraction of `u_max − u_min`.
    pub oscillation_fraction: f64,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            oscillation_fraction: 0.5,
        }
    }
}

/// Least-squares fit of `κ = λ2 x − λ1 y + α` and of `P(u) = ½λu² + αu + β`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineCurvatureFit {
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha: f64,
    /// Zero when the curvature is constant.
    pub beta: f64,
    pub lambda: f64,
    /// `1/√λ`; infinite when `λ = 0`.
    pub w: f64,
    pub phi: f64,
    pub r1: f64,
    /// Zero when the curvature is constant.
    pub r2: f64,
    length: f64,
    /// The same fit in coordinates centred at the arclength centroid.
    centroid: PlanePoint,
    alpha_c: f64,
    beta_c: f64,
}

impl AffineCurvatureFit {
    /// True when `λ ≤ λ_min`, i.e. the input is a line or circular arc.
    pub fn is_constant_curvature(&self) -> bool {
        !(self.lambda > LAMBDA_MIN_FACTOR / (self.length * self.length))
    }

    /// `u = (λ2 x − λ1 y)/λ`.
    pub fn u(&self, p: PlanePoint) -> f64 {
        (self.lambda2 * p.x - self.lambda1 * p.y) / self.lambda
    }

    fn u_centred(&self, p: PlanePoint) -> f64 {
        self.u(p - self.centroid)
    }

    /// `P(u) = ½λu² + αu + β`.
    pub fn parabola(&self, u: f64) -> f64 {
        (0.5 * self.lambda * u + self.alpha) * u + self.beta
    }

    /// `min P = β − α²/(2λ)`.
    pub fn parabola_min(&self) -> f64 {
        self.beta_c - self.alpha_c * self.alpha_c / (2.0 * self.lambda)
    }

    /// `δ₋ = √(α² − 2λ(β − 1))`, with roundoff clamped at zero.
    pub fn delta_minus(&self) -> f64 {
        (self.alpha_c * self.alpha_c - 2.0 * self.lambda * (self.beta_c - 1.0))
            .max(0.0)
            .sqrt()
    }

    /// `u_max = (−α + δ₋)/λ`, where `P(u) = 1`.
    pub fn u_max(&self) -> f64 {
        self.u_max_centred() + self.u(self.centroid)
    }

    fn u_max_centred(&self) -> f64 {
        (-self.alpha_c + self.delta_minus()) / self.lambda
    }

    /// The fit of the same curve traversed backwards: curvature and `u`
    /// change sign, `β` is unchanged.
    fn reversed(&self) -> Self {
        AffineCurvatureFit {
            lambda1: -self.lambda1,
            lambda2: -self.lambda2,
            alpha: -self.alpha,
            phi: (-self.lambda2).atan2(-self.lambda1),
            alpha_c: -self.alpha_c,
            ..*self
        }
    }
}

/// Fit the affine curvature model and the parabola `P(u)`.
///
/// Fails only when the normal equations are singular (collinear samples).
/// A constant-curvature input yields a fit with
/// [`AffineCurvatureFit::is_constant_curvature`] set.
pub fn affine_curvature_fit(samples: &CurveSamples) -> Result<AffineCurvatureFit> {
    let l = samples.length();
    if !(l > 0.0) {
        return Err(Error::DegenerateInput("curve has zero length".into()));
    }
    let pts = samples.points();
    let kappa = samples.kappa();
    let theta = samples.theta();
    let mean = |f: &dyn Fn(usize) -> f64| samples.mean_with(f);
    let centroid = PlanePoint::new(mean(&|i| pts[i].x), mean(&|i| pts[i].y));
    let d = |i: usize| pts[i] - centroid;

    // Normal equations in centred coordinates; the first moments vanish, so
    // α decouples as the mean curvature.
    let sxx = samples.integrate_with(|i| d(i).x * d(i).x);
    let syy = samples.integrate_with(|i| d(i).y * d(i).y);
    let sxy = samples.integrate_with(|i| d(i).x * d(i).y);
    let kx = samples.integrate_with(|i| kappa[i] * d(i).x);
    let ky = samples.integrate_with(|i| kappa[i] * d(i).y);
    let det = sxx * syy - sxy * sxy;
    if !(det > 1e-14 * (sxx + syy) * (sxx + syy)) {
        return Err(Error::DegenerateInput("samples are collinear".into()));
    }
    let lambda1 = (sxy * kx - sxx * ky) / det;
    let lambda2 = (syy * kx - sxy * ky) / det;
    let alpha_c = mean(&|i| kappa[i]);
    let alpha = alpha_c - lambda2 * centroid.x + lambda1 * centroid.y;
    let lambda = lambda1.hypot(lambda2);

    let model = |i: usize| lambda2 * d(i).x - lambda1 * d(i).y + alpha_c;
    let k2 = samples.integrate_with(|i| kappa[i] * kappa[i]);
    let res = samples.integrate_with(|i| (kappa[i] - model(i)).powi(2));
    let r1 = if k2 > 0.0 { (res / k2).sqrt() } else { 0.0 };

    let mut fit = AffineCurvatureFit {
        lambda1,
        lambda2,
        alpha,
        beta: 0.0,
        lambda,
        w: 1.0 / lambda.sqrt(),
        phi: lambda2.atan2(lambda1),
        r1,
        r2: 0.0,
        length: l,
        centroid,
        alpha_c,
        beta_c: 0.0,
    };
    if fit.is_constant_curvature() {
        return Ok(fit);
    }

    let u: Vec<f64> = pts.iter().map(|&p| fit.u_centred(p)).collect();
    let cos_rel: Vec<f64> = theta
        .iter()
        .map(|th| (lambda1 * th.cos() + lambda2 * th.sin()) / lambda)
        .collect();
    let p0 = |i: usize| (0.5 * lambda * u[i] + alpha_c) * u[i];
    let beta_c = mean(&|i| cos_rel[i] - p0(i));
    let r2 = mean(&|i| (cos_rel[i] - p0(i) - beta_c).powi(2)).sqrt();
    let shift = fit.u(centroid);
    fit.beta_c = beta_c;
    fit.beta = beta_c + 0.5 * lambda * shift * shift - alpha_c * shift;
    fit.r2 = r2;
    Ok(fit)
}

fn require_elastic(fit: &AffineCurvatureFit) -> Result<()> {
    if fit.is_constant_curvature() {
        Err(Error::DegenerateInput(format!(
            "curvature is constant (λ = {:e})",
            fit.lambda
        )))
    } else {
        Ok(())
    }
}

/// Classify the fit and recover the modulus `k = δ₋/(2√λ)`.
///
/// The curve is inflectional when `min P ≥ −1`. The modulus is kept above
/// [`K_MIN`] and outside the singular band on the side matching the class.
pub fn classify_and_modulus(fit: &AffineCurvatureFit) -> Result<(bool, f64)> {
    require_elastic(fit)?;
    let inflectional = fit.parabola_min() >= -1.0;
    let k = (fit.delta_minus() / (2.0 * fit.lambda.sqrt())).max(K_MIN);
    let k = if inflectional {
        k.min(1.0 - 2.0 * K_GUARD)
    } else {
        k.max(1.0 + 2.0 * K_GUARD)
    };
    Ok((inflectional, k))
}

/// The recovered interval on the basic elastica and its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcInterval {
    /// Start parameter, reduced to one period `[0, 4K)`.
    pub s0: f64,
    pub ell: f64,
    /// Number of monotone runs of `u` counted as oscillations.
    pub n_segments: usize,
    pub u_increasing_at_start: bool,
    /// Fraction of samples whose `u` left the admissible range.
    pub clamped_fraction: f64,
    /// Fraction of arclength where `u` left the admissible range.
    pub r3: f64,
}

/// Recover `s0` and `ℓ` from the range of `u` visited by the samples.
///
/// A non-inflectional curve with negative curvature is traversed backwards
/// and the interval is reversed afterwards, giving `ℓ < 0`: the rotated
/// copies of such an elastica all turn counterclockwise. Use
/// [`arc_fit_for`] to obtain the matching `φ`.
pub fn recover_arc_interval(
    samples: &CurveSamples,
    fit: &AffineCurvatureFit,
    inflectional: bool,
    k: f64,
    config: &RecoveryConfig,
) -> Result<ArcInterval> {
    require_elastic(fit)?;
    let m = Modulus::new(k)?;
    if m.is_inflectional() != inflectional {
        return Err(Error::Usage(format!(
            "modulus {k} does not match the inflectional flag {inflectional}"
        )));
    }
    if needs_reversal(samples, inflectional) {
        let rev = recover_positive(&samples.reversed(), &fit.reversed(), m, config)?;
        let a = rev.interval;
        // Keep s0 in the same canonical period as the forward case.
        let period = 4.0 * quarter_period(m)?;
        Ok(ArcInterval {
            s0: (a.s0 + a.ell).rem_euclid(period),
            ell: -a.ell,
            u_increasing_at_start: !rev.u_increasing_at_end,
            ..a
        })
    } else {
        Ok(recover_positive(samples, fit, m, config)?.interval)
    }
}

/// The fit whose `φ` pairs with [`recover_arc_interval`]'s output.
pub fn arc_fit_for(samples: &CurveSamples, fit: &AffineCurvatureFit, inflectional: bool) -> AffineCurvatureFit {
    if needs_reversal(samples, inflectional) {
        fit.reversed()
    } else {
        *fit
    }
}

fn needs_reversal(samples: &CurveSamples, inflectional: bool) -> bool {
    let kappa = samples.kappa();
    !inflectional && samples.integrate_with(|i| kappa[i]) < 0.0
}

struct PositiveArc {
    interval: ArcInterval,
    u_increasing_at_end: bool,
}

fn recover_positive(
    samples: &CurveSamples,
    fit: &AffineCurvatureFit,
    m: Modulus,
    config: &RecoveryConfig,
) -> Result<PositiveArc> {
    let k = m.k();
    let w = fit.w;
    let inflectional = m.is_inflectional();
    let span = 2.0 * k * w;
    // cn ranges over [cn_min, 1]; u = u_max − 2kw (1 − cn).
    let cn_min = if inflectional {
        -1.0
    } else {
        ((k - 1.0) * (k + 1.0)).sqrt() / k
    };
    let u_hi = fit.u_max_centred();
    let u_lo = u_hi - span * (1.0 - cn_min);
    let slack = RANGE_SLACK * (u_hi - u_lo);

    let u: Vec<f64> = samples.points().iter().map(|&p| fit.u_centred(p)).collect();
    let outside: Vec<f64> = u
        .iter()
        .map(|&v| f64::from(v > u_hi + slack || v < u_lo - slack))
        .collect();
    let clamped_fraction = outside.iter().sum::<f64>() / u.len() as f64;
    let r3 = samples.mean_with(|i| outside[i]);

    let runs = merge_runs(&u, monotone_runs(&u), u_lo, u_hi, config.oscillation_fraction);
    let n = runs.len();
    let inc_start = runs[0].increasing;
    let inc_end = runs[n - 1].increasing;

    // Angle in [0, half period] on the monotone piece through `v`.
    let base_angle = |v: f64| -> f64 {
        let cn = (1.0 - (u_hi - v) / span).clamp(cn_min, 1.0);
        if inflectional {
            cn.acos()
        } else {
            // sin am(ks, 1/k) = k sn(s, k)
            (k * (1.0 - cn * cn).max(0.0).sqrt()).clamp(0.0, 1.0).asin()
        }
    };
    let half = if inflectional { PI } else { FRAC_PI_2 };
    // Piece index `j` covers angles [j·half, (j+1)·half]; u decreases on
    // even pieces.
    let assemble = |j: usize, x: f64| -> f64 {
        if j.is_multiple_of(2) {
            j as f64 * half + x
        } else {
            (j + 1) as f64 * half - x
        }
    };
    let j0 = usize::from(inc_start);
    let j1 = j0 + n - 1;
    let a0 = assemble(j0, base_angle(u[0]));
    let a1 = assemble(j1, base_angle(u[u.len() - 1]));
    let param = |a: f64| -> Result<f64> {
        if inflectional {
            incomplete_f(a, m)
        } else {
            Ok(incomplete_f(a, Modulus::new(1.0 / k)?)? / k)
        }
    };
    let s0 = param(a0)?;
    let mut ell = param(a1)? - s0;
    if !(ell > 1e-12 * samples.length() / w) {
        // Both ends clamped onto the same extreme; fall back to the
        // length-matched extent.
        ell = samples.length() / w;
    }
    Ok(PositiveArc {
        interval: ArcInterval {
            s0,
            ell,
            n_segments: n,
            u_increasing_at_start: inc_start,
            clamped_fraction,
            r3,
        },
        u_increasing_at_end: inc_end,
    })
}

/// Maximal run of samples `start..=end` on which `u` is monotone.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Run {
    start: usize,
    end: usize,
    increasing: bool,
}

fn monotone_runs(u: &[f64]) -> Vec<Run> {
    let max_step = u.windows(2).map(|p| (p[1] - p[0]).abs()).fold(0.0, f64::max);
    let flat = FLAT_FRACTION * max_step;
    let dirs: Vec<Option<bool>> = u
        .windows(2)
        .map(|p| {
            let du = p[1] - p[0];
            (du.abs() > flat).then_some(du > 0.0)
        })
        .collect();
    let mut current = dirs.iter().flatten().next().copied().unwrap_or(false);
    let mut runs = Vec::new();
    let mut start = 0;
    for (i, d) in dirs.iter().enumerate() {
        if let Some(d) = *d {
            if d != current {
                runs.push(Run {
                    start,
                    end: i,
                    increasing: current,
                });
                start = i;
                current = d;
            }
        }
    }
    runs.push(Run {
        start,
        end: u.len() - 1,
        increasing: current,
    });
    runs
}

/// Absorb runs too small to count as oscillations into their neighbours,
/// smallest first.
///
/// Interior runs count when their height reaches `fraction·(u_hi − u_lo)`.
/// End runs may be cut short by the ends of the curve, so they also count
/// when their turning point lies in the half of the range where a full
/// oscillation would turn.
fn merge_runs(u: &[f64], mut runs: Vec<Run>, u_lo: f64, u_hi: f64, fraction: f64) -> Vec<Run> {
    let h = fraction * (u_hi - u_lo);
    let height = |r: &Run| (u[r.end] - u[r.start]).abs();
    let merged_any = runs.len() > 1;
    while runs.len() > 1 {
        let last = runs.len() - 1;
        let counts = |i: usize| -> bool {
            let r = &runs[i];
            if height(r) >= h {
                return true;
            }
            let turn_high = |v: f64| v >= u_hi - h;
            let turn_low = |v: f64| v <= u_lo + h;
            if i == 0 {
                let v = u[r.end];
                if r.increasing {
                    turn_high(v)
                } else {
                    turn_low(v)
                }
            } else if i == last {
                let v = u[r.start];
                if r.increasing {
                    turn_low(v)
                } else {
                    turn_high(v)
                }
            } else {
                false
            }
        };
        let weakest = (0..runs.len())
            .filter(|&i| !counts(i))
            .min_by(|&a, &b| height(&runs[a]).total_cmp(&height(&runs[b])));
        let Some(i) = weakest else { break };
        if i == 0 {
            let next = runs[1];
            runs.splice(0..2, [Run { start: 0, ..next }]);
        } else if i == last {
            let prev = runs[i - 1];
            runs.splice(
                i - 1..=i,
                [Run {
                    end: runs[i].end,
                    ..prev
                }],
            );
        } else {
            let prev = runs[i - 1];
            let end = runs[i + 1].end;
            runs.splice(i - 1..=i + 1, [Run { end, ..prev }]);
        }
    }
    if merged_any && runs.len() == 1 {
        // Only ripples: use the net direction.
        let r = &mut runs[0];
        let net = u[r.end] - u[r.start];
        if net != 0.0 {
            r.increasing = net > 0.0;
        }
    }
    runs
}

/// Least-squares translation `(1/L) ∫ (x(s) − y(s)) ds` for a segment whose
/// own translation is zero.
pub fn recover_translation(samples: &CurveSamples, partial: &ElasticaParams) -> Result<PlanePoint> {
    let mut p = *partial;
    p.x0 = 0.0;
    p.y0 = 0.0;
    p.validate()?;
    let l = samples.length();
    if !(l > 0.0) {
        return Err(Error::DegenerateInput("curve has zero length".into()));
    }
    let diffs = samples
        .s()
        .iter()
        .zip(samples.points())
        .map(|(s, &x)| Ok(x - segment_eval(&p, s / l)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlanePoint::new(
        samples.mean_with(|i| diffs[i].x),
        samples.mean_with(|i| diffs[i].y),
    ))
}

/// Which constant-curvature shape replaced the elastica guess.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degenerate {
    /// Straight segment, represented with `k = 0`.
    Line,
    /// Circular arc, represented with `k =` [`K_CIRCLE`].
    Circle,
}

/// Output of [`initial_guess`].
#[derive(Clone, Debug, PartialEq)]
pub struct RecoveryReport {
    pub params: ElasticaParams,
    pub inflectional: bool,
    pub n_segments: usize,
    pub u_increasing_at_start: bool,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub clamped_fraction: f64,
    /// Set when the input has constant curvature.
    pub degenerate: Option<Degenerate>,
    /// The underlying curvature fit, absent for collinear input.
    pub fit: Option<AffineCurvatureFit>,
}

/// Initial guess with the default configuration.
pub fn initial_guess(samples: &CurveSamples) -> Result<RecoveryReport> {
    initial_guess_with(samples, &RecoveryConfig::default())
}

pub fn initial_guess_with(samples: &CurveSamples, config: &RecoveryConfig) -> Result<RecoveryReport> {
    let l = samples.length();
    if !(l > 0.0) {
        return Err(Error::DegenerateInput("curve has zero length".into()));
    }
    let fit = match affine_curvature_fit(samples) {
        Ok(fit) => fit,
        Err(Error::DegenerateInput(_)) => return line_report(samples, None),
        Err(e) => return Err(e),
    };
    if fit.is_constant_curvature() {
        let kappa = samples.kappa();
        let turning = samples.integrate_with(|i| kappa[i]);
        return if turning.abs() <= LINE_TURNING {
            line_report(samples, Some(fit))
        } else {
            circle_report(samples, fit, turning / l)
        };
    }
    let (inflectional, k) = classify_and_modulus(&fit)?;
    let arc = recover_arc_interval(samples, &fit, inflectional, k, config)?;
    let oriented = arc_fit_for(samples, &fit, inflectional);
    let mut params = ElasticaParams::new(k, arc.s0, arc.ell, fit.w, oriented.phi, 0.0, 0.0);
    let t = recover_translation(samples, &params)?;
    params.x0 = t.x;
    params.y0 = t.y;
    Ok(RecoveryReport {
        params,
        inflectional,
        n_segments: arc.n_segments,
        u_increasing_at_start: arc.u_increasing_at_start,
        r1: fit.r1,
        r2: fit.r2,
        r3: arc.r3,
        r4: r4(&params, samples)?,
        clamped_fraction: arc.clamped_fraction,
        degenerate: None,
        fit: Some(fit),
    })
}

fn finish_degenerate(
    samples: &CurveSamples,
    mut params: ElasticaParams,
    kind: Degenerate,
    fit: Option<AffineCurvatureFit>,
) -> Result<RecoveryReport> {
    let t = recover_translation(samples, &params)?;
    params.x0 = t.x;
    params.y0 = t.y;
    Ok(RecoveryReport {
        params,
        inflectional: kind == Degenerate::Line,
        n_segments: 1,
        u_increasing_at_start: false,
        r1: fit.map_or(0.0, |f| f.r1),
        r2: 0.0,
        r3: 0.0,
        r4: r4(&params, samples)?,
        clamped_fraction: 0.0,
        degenerate: Some(kind),
        fit,
    })
}

fn line_report(samples: &CurveSamples, fit: Option<AffineCurvatureFit>) -> Result<RecoveryReport> {
    let theta = samples.theta();
    let c = samples.integrate_with(|i| theta[i].cos());
    let s = samples.integrate_with(|i| theta[i].sin());
    let params = ElasticaParams::new(0.0, 0.0, 1.0, samples.length(), s.atan2(c), 0.0, 0.0);
    finish_degenerate(samples, params, Degenerate::Line, fit)
}

fn circle_report(samples: &CurveSamples, fit: AffineCurvatureFit, mean_curvature: f64) -> Result<RecoveryReport> {
    let k = K_CIRCLE;
    let w = 2.0 * k / mean_curvature.abs();
    let ell = mean_curvature.signum() * samples.length() / w;
    // Centre the interval on the curvature maximum at s = 0.
    let mut params = ElasticaParams::new(k, -0.5 * ell, ell, w, 0.0, 0.0, 0.0);
    let start = segment_tangent(&params, 0.0)?;
    params.phi = samples.theta()[0] - start.y.atan2(start.x);
    finish_degenerate(samples, params, Degenerate::Circle, Some(fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CubicBez, PlaneCurve};
    use crate::elastica::{wrap_angle, N_PARAMS};

    const P: ElasticaParams = ElasticaParams {
        k: 0.8,
        s0: 0.2,
        ell: 3.0,
        w: 1.5,
        phi: 0.7,
        x0: 2.0,
        y0: -1.0,
    };

    fn angle_diff(a: f64, b: f64) -> f64 {
        wrap_angle(a - b).abs()
    }

    fn period(k: f64) -> f64 {
        4.0 * quarter_period(Modulus::new(k).unwrap()).unwrap()
    }

    fn mod_period(s: f64, k: f64) -> f64 {
        let p = period(k);
        let r = s.rem_euclid(p);
        r.min(p - r)
    }

    fn check_round_trip(p: &ElasticaParams) -> RecoveryReport {
        let samples = CurveSamples::from_elastica(p, 2048).unwrap();
        let rep = initial_guess(&samples).unwrap();
        let q = rep.params;
        assert!((q.k - p.k).abs() < 1e-4, "k {} vs {}", q.k, p.k);
        assert!((q.w - p.w).abs() < 1e-4, "w {} vs {}", q.w, p.w);
        assert!(angle_diff(q.phi, p.phi) < 1e-4, "phi {} vs {}", q.phi, p.phi);
        assert!(mod_period(q.s0 - p.s0, p.k) < 1e-3, "s0 {} vs {}", q.s0, p.s0);
        assert!((q.ell - p.ell).abs() < 1e-3, "ell {} vs {}", q.ell, p.ell);
        assert!(
            (q.x0 - p.x0).abs() < 1e-4 && (q.y0 - p.y0).abs() < 1e-4,
            "{q:?} vs {p:?}"
        );
        assert!(rep.r1 <= 1e-5 && rep.r2 <= 1e-5, "{} {}", rep.r1, rep.r2);
        assert_eq!(rep.r3, 0.0);
        assert_eq!(rep.clamped_fraction, 0.0);
        assert!(rep.r4 <= 1e-4, "{}", rep.r4);
        rep
    }

    #[test]
    fn affine_fit_on_exact_elastica() {
        let samples = CurveSamples::from_elastica(&P, 2048).unwrap();
        let fit = affine_curvature_fit(&samples).unwrap();
        assert!((fit.lambda - 1.0 / 2.25).abs() < 1e-8, "{}", fit.lambda);
        assert!(angle_diff(fit.phi, 0.7) < 1e-8);
        assert!(fit.r1 < 1e-5 && fit.r2 < 1e-5, "{} {}", fit.r1, fit.r2);
        // α² − 2λ(β − 1) = 4k²/w²
        let lhs = fit.alpha * fit.alpha - 2.0 * fit.lambda * (fit.beta - 1.0);
        assert!((lhs - 4.0 * 0.64 / 2.25).abs() < 1e-7, "{lhs}");
        let u_max = P.x0 * P.phi.sin() - P.y0 * P.phi.cos();
        assert!((fit.u_max() - u_max).abs() < 1e-4);
    }

    #[test]
    fn affine_fit_similarity() {
        let samples = CurveSamples::from_elastica(&P, 1024).unwrap();
        let fit = affine_curvature_fit(&samples).unwrap();
        let (rho, c) = (1.1, 2.5);
        let mut q = P;
        q.w *= c;
        q.phi += rho;
        let t = q.translation().rotate(rho) * c;
        q.x0 = t.x;
        q.y0 = t.y;
        let moved = affine_curvature_fit(&CurveSamples::from_elastica(&q, 1024).unwrap()).unwrap();
        assert!(angle_diff(moved.phi, fit.phi + rho) < 1e-10);
        assert!((moved.lambda * c * c - fit.lambda).abs() < 1e-10 * fit.lambda);
        assert!((moved.r1 - fit.r1).abs() < 1e-10);
    }

    #[test]
    fn full_circle_has_constant_curvature() {
        let r = 2.0;
        let circle = CurveSamples::from_jet(1024, |t| {
            let a = std::f64::consts::TAU * t;
            let da = std::f64::consts::TAU;
            let (s, c) = a.sin_cos();
            [
                PlanePoint::new(r * c, r * s),
                PlanePoint::new(-r * s, r * c) * da,
                PlanePoint::new(-r * c, -r * s) * (da * da),
            ]
        })
        .unwrap();
        let fit = affine_curvature_fit(&circle).unwrap();
        assert!(fit.lambda1.abs() < 1e-12 && fit.lambda2.abs() < 1e-12);
        assert!((fit.alpha - 1.0 / r).abs() < 1e-12);
        assert!(fit.is_constant_curvature());
        assert!(classify_and_modulus(&fit).is_err());
        let rep = initial_guess(&circle).unwrap();
        assert_eq!(rep.degenerate, Some(Degenerate::Circle));
        assert!(rep.r4 < 1e-2, "{}", rep.r4);
    }

    #[test]
    fn classification() {
        let samples = CurveSamples::from_elastica(&P, 2048).unwrap();
        let fit = affine_curvature_fit(&samples).unwrap();
        let (infl, k) = classify_and_modulus(&fit).unwrap();
        assert!(infl && (k - 0.8).abs() < 1e-4);

        let q = ElasticaParams::new(1.3, 0.4, 1.2, 1.0, -0.3, 0.5, 0.5);
        let fit = affine_curvature_fit(&CurveSamples::from_elastica(&q, 2048).unwrap()).unwrap();
        let (infl, k) = classify_and_modulus(&fit).unwrap();
        assert!(!infl && (k - 1.3).abs() < 1e-4, "{k}");
    }

    #[test]
    fn arc_interval_of_reference_segment() {
        let samples = CurveSamples::from_elastica(&P, 2048).unwrap();
        let fit = affine_curvature_fit(&samples).unwrap();
        let (infl, k) = classify_and_modulus(&fit).unwrap();
        let arc = recover_arc_interval(&samples, &fit, infl, k, &RecoveryConfig::default()).unwrap();
        assert!((arc.s0 - 0.2).abs() < 1e-3 && (arc.ell - 3.0).abs() < 1e-3, "{arc:?}");
        assert_eq!(arc.r3, 0.0);
        assert_eq!(arc.clamped_fraction, 0.0);
        assert_eq!(arc.n_segments, 1);
    }

    #[test]
    fn round_trips() {
        check_round_trip(&P);
        // several oscillations
        let rep = check_round_trip(&ElasticaParams::new(0.6, 1.0, 12.0, 0.7, -2.0, -3.0, 4.0));
        assert_eq!(rep.n_segments, 4);
        // starting exactly at a turning point
        check_round_trip(&ElasticaParams::new(0.9, 0.0, 4.0, 1.0, 0.1, 0.0, 0.0));
        // non-inflectional, both orientations
        let rep = check_round_trip(&ElasticaParams::new(1.4, 0.3, 2.5, 2.0, 2.5, 1.0, 1.0));
        assert!(!rep.inflectional);
        let rep = check_round_trip(&ElasticaParams::new(1.4, 0.3, -2.5, 2.0, 2.5, 1.0, 1.0));
        assert!(!rep.inflectional && rep.params.ell < 0.0);
    }

    #[test]
    fn out_of_range_fraction() {
        // Symmetric segment around the curvature maximum.
        let p = ElasticaParams::new(0.7, -1.0, 2.0, 1.0, 0.3, 0.0, 0.0);
        let samples = CurveSamples::from_elastica(&p, 2048).unwrap();
        let mut fit = affine_curvature_fit(&samples).unwrap();
        let u: Vec<f64> = samples.points().iter().map(|&x| fit.u_centred(x)).collect();
        // Threshold above which 10% of the arclength lies.
        let mut sorted = u.clone();
        sorted.sort_by(f64::total_cmp);
        let cut = sorted[(0.9 * (sorted.len() - 1) as f64) as usize];
        let delta = fit.lambda * cut + fit.alpha_c;
        fit.beta_c = 1.0 - (delta * delta - fit.alpha_c * fit.alpha_c) / (2.0 * fit.lambda);
        assert!((fit.u_max_centred() - cut).abs() < 1e-12);
        let arc = recover_arc_interval(&samples, &fit, true, 0.7, &RecoveryConfig::default()).unwrap();
        // Direct arclength measurement of the region above the cut.
        let s = samples.s();
        let above: f64 = (1..u.len())
            .filter(|&i| u[i] > cut && u[i - 1] > cut)
            .map(|i| s[i] - s[i - 1])
            .sum::<f64>()
            / samples.length();
        assert!((above - 0.1).abs() < 2e-3, "{above}");
        assert!((arc.r3 - above).abs() < 2e-3, "{} vs {above}", arc.r3);
        assert!(arc.clamped_fraction > 0.0);
    }

    #[test]
    fn translation_is_a_mean() {
        let samples = CurveSamples::from_elastica(&P, 512).unwrap();
        let t = recover_translation(&samples, &P).unwrap();
        assert!((t.x - 2.0).abs() < 1e-10 && (t.y + 1.0).abs() < 1e-10);
        let mut q = P;
        q.x0 += 0.5;
        q.y0 -= 3.0;
        let moved = CurveSamples::from_elastica(&q, 512).unwrap();
        let tq = recover_translation(&moved, &P).unwrap();
        assert!((tq.x - t.x - 0.5).abs() < 1e-12 && (tq.y - t.y + 3.0).abs() < 1e-12);
    }

    #[test]
    fn straight_line_is_degenerate() {
        let line = PlaneCurve::Bezier(vec![CubicBez::new(
            PlanePoint::new(1.0, 1.0),
            PlanePoint::new(2.0, 2.0),
            PlanePoint::new(3.0, 3.0),
            PlanePoint::new(4.0, 4.0),
        )]);
        let rep = initial_guess(&line.sample(256).unwrap()).unwrap();
        assert_eq!(rep.degenerate, Some(Degenerate::Line));
        assert_eq!(rep.params.k, 0.0);
        assert!(rep.r4 < 1e-10, "{}", rep.r4);
    }

    #[test]
    fn s_shaped_bezier_gives_finite_report() {
        let bez = PlaneCurve::Bezier(vec![CubicBez::new(
            PlanePoint::new(0.0, 0.0),
            PlanePoint::new(1.0, 1.5),
            PlanePoint::new(2.2, -0.8),
            PlanePoint::new(3.0, 0.3),
        )]);
        let rep = initial_guess(&bez.sample(1024).unwrap()).unwrap();
        let vals = rep.params.to_array();
        assert_eq!(vals.len(), N_PARAMS);
        assert!(vals.iter().all(|v| v.is_finite()));
        for r in [rep.r1, rep.r2, rep.r3, rep.r4] {
            assert!(r.is_finite() && r >= 0.0);
        }
        assert!(rep.r4 > 0.0);
    }

    #[test]
    fn ripples_merge_into_neighbours() {
        let u = [0.0, 1.0, 2.0, 1.9, 2.5, 3.0, 2.0, 1.0, 0.0];
        let runs = merge_runs(&u, monotone_runs(&u), 0.0, 3.0, 0.5);
        assert_eq!(runs.len(), 2);
        assert_eq!((runs[0].start, runs[0].end, runs[0].increasing), (0, 5, true));
        assert_eq!((runs[1].start, runs[1].end, runs[1].increasing), (5, 8, false));
        // A short end run turning at the wrong extreme is dropped.
        let u = [2.6, 2.5, 2.8, 3.0];
        let runs = merge_runs(&u, monotone_runs(&u), 0.0, 3.0, 0.5);
        assert_eq!(runs.len(), 1);
        assert!(runs[0].increasing);
        // A short end run turning at the right extreme is kept.
        let u = [0.1, 0.0, 1.0, 2.0, 3.0];
        let runs = merge_runs(&u, monotone_runs(&u), 0.0, 3.0, 0.5);
        assert_eq!(runs.len(), 2);
    }
}
