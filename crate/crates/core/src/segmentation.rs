// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Piecewise elastica approximation by recursive bisection.
//!
//! A piece whose fit misses the R4 threshold is split at its arclength
//! midpoint and both halves are refitted. With endpoint constraints every
//! piece passes through the target at its breakpoints, and with tangent
//! constraints it also takes the target's tangent there, so neighbouring
//! pieces join continuously without being coupled.

use crate::curve::PlaneCurve;
use crate::elastica::{segment_eval, segment_tangent};
use crate::fitting::{fit, Constraints, FitProblem, FitResult, Tolerances};
use crate::recovery::{initial_guess, RecoveryReport};
use crate::{Error, Result};

/// Sampling intervals per piece unless configured otherwise.
pub const DEFAULT_SAMPLES: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentationConfig {
    pub r4_threshold: f64,
    pub max_depth: usize,
    pub constraints: Constraints,
    /// Sampling intervals used for each piece.
    pub samples: usize,
    pub tolerances: Tolerances,
}

impl SegmentationConfig {
    pub fn new(r4_threshold: f64, max_depth: usize, constraints: Constraints) -> Self {
        SegmentationConfig {
            r4_threshold,
            max_depth,
            constraints,
            samples: DEFAULT_SAMPLES,
            tolerances: Tolerances::default(),
        }
    }
}

/// One leaf of the bisection.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceFit {
    /// Arclength fractions of the whole curve covered by this piece.
    pub start: f64,
    pub end: f64,
    pub depth: usize,
    /// Arclength of the target piece.
    pub length: f64,
    pub guess: RecoveryReport,
    pub fit: FitResult,
    /// R4 of the optimized segment against its piece.
    pub r4: f64,
}

/// Continuity of two consecutive pieces at their shared breakpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JoinContinuity {
    pub position_gap: f64,
    /// Angle between the incoming and outgoing tangents, in `[0, π]`.
    pub tangent_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFit {
    /// Arclength fractions from 0 to 1, one more than there are pieces.
    pub breakpoints: Vec<f64>,
    pub segments: Vec<PieceFit>,
    pub joins: Vec<JoinContinuity>,
    /// Every piece reaches the R4 threshold. When false, some piece stopped
    /// at the depth limit.
    pub meets_threshold: bool,
}

impl PiecewiseFit {
    pub fn max_r4(&self) -> f64 {
        self.segments.iter().map(|s| s.r4).fold(0.0, f64::max)
    }

    pub fn all_converged(&self) -> bool {
        self.segments.iter().all(|s| s.fit.converged)
    }
}

/// Fit `curve` by elastica pieces with the default sampling and tolerances.
pub fn fit_piecewise(
    curve: &PlaneCurve,
    r4_threshold: f64,
    max_depth: usize,
    constraints: Constraints,
) -> Result<PiecewiseFit> {
    fit_piecewise_with(curve, &SegmentationConfig::new(r4_threshold, max_depth, constraints))
}

pub fn fit_piecewise_with(curve: &PlaneCurve, config: &SegmentationConfig) -> Result<PiecewiseFit> {
    if !(config.r4_threshold > 0.0) {
        return Err(Error::Usage(format!(
            "R4 threshold must be positive, got {}",
            config.r4_threshold
        )));
    }
    curve.validate()?;
    let segments = fit_range(curve, 0.0, 1.0, 0, config)?;
    let mut breakpoints = vec![0.0];
    breakpoints.extend(segments.iter().map(|s| s.end));
    let joins = segments
        .windows(2)
        .map(|w| join(&w[0].fit, &w[1].fit))
        .collect::<Result<Vec<_>>>()?;
    let meets_threshold = segments.iter().all(|s| s.r4 <= config.r4_threshold);
    Ok(PiecewiseFit {
        breakpoints,
        segments,
        joins,
        meets_threshold,
    })
}

fn fit_range(
    curve: &PlaneCurve,
    start: f64,
    end: f64,
    depth: usize,
    config: &SegmentationConfig,
) -> Result<Vec<PieceFit>> {
    let piece = fit_piece(curve, start, end, depth, config)?;
    if piece.r4 <= config.r4_threshold || depth >= config.max_depth {
        return Ok(vec![piece]);
    }
    let (left, right, _) = curve.split_at_arclength_midpoint();
    let mid = 0.5 * (start + end);
    let (a, b) = rayon::join(
        || fit_range(&left, start, mid, depth + 1, config),
        || fit_range(&right, mid, end, depth + 1, config),
    );
    let mut out = a?;
    out.extend(b?);
    Ok(out)
}

fn fit_piece(curve: &PlaneCurve, start: f64, end: f64, depth: usize, config: &SegmentationConfig) -> Result<PieceFit> {
    let samples = curve.sample(config.samples)?;
    let guess = initial_guess(&samples)?;
    let problem = FitProblem::new(samples, guess.params)
        .with_constraints(config.constraints)
        .with_tolerances(config.tolerances);
    let result = fit(&problem)?;
    let length = problem.target.length();
    Ok(PieceFit {
        start,
        end,
        depth,
        length,
        r4: result.r4(length),
        guess,
        fit: result,
    })
}

fn join(a: &FitResult, b: &FitResult) -> Result<JoinContinuity> {
    let position_gap = (segment_eval(&a.params, 1.0)? - segment_eval(&b.params, 0.0)?).norm();
    let ta = segment_tangent(&a.params, 1.0)?;
    let tb = segment_tangent(&b.params, 0.0)?;
    let tangent_gap = ta.cross(tb).atan2(ta.dot(tb)).abs();
    Ok(JoinContinuity {
        position_gap,
        tangent_gap,
    })
}
