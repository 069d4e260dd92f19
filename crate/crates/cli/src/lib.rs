// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Front end of the `elastica-fit` tool: read a curve, run one of the
//! pipelines and write a JSON report plus an optional SVG plot.

pub mod report;
pub mod svg;

use std::fmt;
use std::fs;
use std::path::PathBuf;

use elastica::curve::{CurveSamples, PlaneCurve};
use elastica::fitting::{fit, gradient_hessian, Constraints, FitProblem, Tolerances};
use elastica::recovery::initial_guess;
use elastica::segmentation::{fit_piecewise_with, SegmentationConfig};
use elastica::Error;
use serde::Serialize;

use report::{PiecewiseReport, SegmentReport};
use svg::{Plot, Style};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Initial guess from the curvature fit only.
    Guess,
    /// Initial guess refined by the optimizer.
    Fit,
    /// Recursive split-and-fit into tangent-continuous pieces.
    Piecewise,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Guess => "guess",
            Mode::Fit => "fit",
            Mode::Piecewise => "piecewise",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub mode: Mode,
    pub endpoints: bool,
    pub tangents: bool,
    pub samples: usize,
    pub r4_threshold: f64,
    pub max_depth: usize,
    /// Optimizer iteration limit per segment.
    pub max_iter: usize,
    /// Report destination; standard output when absent.
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            max_iter: self.max_iter,
            ..Tolerances::default()
        }
    }

    pub fn constraints(&self) -> Constraints {
        if self.tangents {
            Constraints::EndpointsAndTangents
        } else if self.endpoints {
            Constraints::Endpoints
        } else {
            Constraints::None
        }
    }
}

/// Process exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Failure,
    ParseError,
    Degenerate,
    Unconverged,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Failure => 1,
            Status::ParseError => 2,
            Status::Degenerate => 3,
            Status::Unconverged => 4,
        }
    }
}

/// A run that produced no report.
#[derive(Debug)]
pub struct RunError {
    pub status: Status,
    pub message: String,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidCurve(_) => Status::ParseError,
            Error::DegenerateInput(_) => Status::Degenerate,
            _ => Status::Failure,
        };
        RunError {
            status,
            message: e.to_string(),
        }
    }
}

fn failure(status: Status, message: impl Into<String>) -> RunError {
    RunError {
        status,
        message: message.into(),
    }
}

/// What a run writes.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub status: Status,
    pub report: String,
    pub svg: Option<String>,
}

#[derive(Serialize)]
struct Tagged<T: Serialize> {
    mode: &'static str,
    #[serde(flatten)]
    body: T,
}

fn tagged<T: Serialize>(mode: Mode, body: T) -> String {
    report::to_json(&Tagged {
        mode: mode.name(),
        body,
    })
}

/// Read the input curve. Every failure here is a parse error.
pub fn read_curve(config: &RunConfig) -> Result<PlaneCurve, RunError> {
    let text = fs::read_to_string(&config.input)
        .map_err(|e| failure(Status::ParseError, format!("{}: {e}", config.input.display())))?;
    PlaneCurve::from_json(&text).map_err(|e| failure(Status::ParseError, e.to_string()))
}

fn check(config: &RunConfig) -> Result<(), RunError> {
    if config.r4_threshold.is_nan() || config.r4_threshold <= 0.0 {
        return Err(failure(Status::ParseError, "--r4-threshold must be positive"));
    }
    if config.max_iter == 0 {
        return Err(failure(Status::ParseError, "--max-iter must be at least 1"));
    }
    Ok(())
}

/// Run the pipeline and produce the report and plot without touching the
/// file system.
pub fn evaluate(config: &RunConfig, curve: &PlaneCurve) -> Result<Output, RunError> {
    check(config)?;
    let samples = curve.sample(config.samples).map_err(|e| match e {
        Error::Usage(m) => failure(Status::ParseError, m),
        e => e.into(),
    })?;
    let mut plot = Plot::default();
    plot.polyline(Style::Target, samples.points().to_vec());
    match config.mode {
        Mode::Guess => single(config, &samples, false, plot),
        Mode::Fit => single(config, &samples, true, plot),
        Mode::Piecewise => piecewise(config, curve, plot),
    }
}

fn single(config: &RunConfig, samples: &CurveSamples, optimize: bool, mut plot: Plot) -> Result<Output, RunError> {
    let length = samples.length();
    let guess = initial_guess(samples)?;
    plot.segment(Style::Guess, &guess.params);
    // Constant-curvature input has no elastica chart and is not optimized.
    let (body, status) = if !optimize || guess.degenerate.is_some() {
        let grad = gradient_hessian(&guess.params, samples).ok().map(|(g, _)| g.norm());
        let status = if guess.degenerate.is_some() {
            Status::Degenerate
        } else {
            Status::Success
        };
        (SegmentReport::guess(&guess, length, grad), status)
    } else {
        let problem = FitProblem::new(samples.clone(), guess.params)
            .with_constraints(config.constraints())
            .with_tolerances(config.tolerances());
        let result = fit(&problem)?;
        plot.segment(Style::Optimized, &result.params);
        let status = if result.converged {
            Status::Success
        } else {
            Status::Unconverged
        };
        (SegmentReport::fitted(&guess, &result, length), status)
    };
    Ok(Output {
        status,
        report: tagged(config.mode, body),
        svg: config.svg.as_ref().map(|_| plot.render()),
    })
}

fn piecewise(config: &RunConfig, curve: &PlaneCurve, mut plot: Plot) -> Result<Output, RunError> {
    let mut seg = SegmentationConfig::new(config.r4_threshold, config.max_depth, config.constraints());
    seg.samples = config.samples;
    seg.tolerances = config.tolerances();
    let pw = fit_piecewise_with(curve, &seg)?;
    for s in &pw.segments {
        plot.segment(Style::Guess, &s.guess.params);
    }
    for s in &pw.segments {
        plot.segment(Style::Optimized, &s.fit.params);
    }
    let status = if pw.all_converged() {
        Status::Success
    } else {
        Status::Unconverged
    };
    Ok(Output {
        status,
        report: tagged(config.mode, PiecewiseReport::from(&pw)),
        svg: config.svg.as_ref().map(|_| plot.render()),
    })
}

/// Full run: read, evaluate, write. Nothing is written unless the
/// pipeline produced a report.
pub fn run(config: &RunConfig) -> Result<Output, RunError> {
    let curve = read_curve(config)?;
    let output = evaluate(config, &curve)?;
    let write = |path: &PathBuf, text: &str| {
        fs::write(path, text).map_err(|e| failure(Status::Failure, format!("{}: {e}", path.display())))
    };
    match &config.out {
        Some(path) => write(path, &output.report)?,
        None => print!("{}", output.report),
    }
    if let (Some(path), Some(text)) = (&config.svg, &output.svg) {
        write(path, text)?;
    }
    Ok(output)
}
