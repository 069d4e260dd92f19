// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! JSON run reports.

use std::io;

use elastica::elastica::ElasticaParams;
use elastica::fitting::FitResult;
use elastica::recovery::{Degenerate, RecoveryReport};
use elastica::segmentation::PiecewiseFit;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

#[derive(Clone, Debug, Serialize)]
pub struct Params {
    pub k: f64,
    pub s0: f64,
    pub ell: f64,
    pub w: f64,
    pub phi: f64,
    pub x0: f64,
    pub y0: f64,
}

impl From<&ElasticaParams> for Params {
    fn from(p: &ElasticaParams) -> Self {
        Params {
            k: p.k,
            s0: p.s0,
            ell: p.ell,
            w: p.w,
            phi: p.phi,
            x0: p.x0,
            y0: p.y0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Residuals {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "R3")]
    pub r3: f64,
    #[serde(rename = "R4_init")]
    pub r4_init: f64,
    #[serde(rename = "R4_opt")]
    pub r4_opt: Option<f64>,
}

/// Result for one fitted (or guessed) segment.
#[derive(Clone, Debug, Serialize)]
pub struct SegmentReport {
    pub params: Params,
    pub initial_params: Params,
    pub residuals: Residuals,
    pub grad_norm: Option<f64>,
    pub iterations: usize,
    pub converged: Option<bool>,
    pub termination: Option<String>,
    pub constraint_violation: Option<f64>,
    pub inflectional: bool,
    pub n_segments: usize,
    pub degenerate: Option<&'static str>,
    pub length: f64,
}

fn degenerate_name(d: Option<Degenerate>) -> Option<&'static str> {
    d.map(|d| match d {
        Degenerate::Line => "line",
        Degenerate::Circle => "circle",
    })
}

impl SegmentReport {
    /// Report of an initial guess alone.
    pub fn guess(guess: &RecoveryReport, length: f64, grad_norm: Option<f64>) -> Self {
        SegmentReport {
            params: (&guess.params).into(),
            initial_params: (&guess.params).into(),
            residuals: Residuals {
                r1: guess.r1,
                r2: guess.r2,
                r3: guess.r3,
                r4_init: guess.r4,
                r4_opt: None,
            },
            grad_norm,
            iterations: 0,
            converged: None,
            termination: None,
            constraint_violation: None,
            inflectional: guess.inflectional,
            n_segments: guess.n_segments,
            degenerate: degenerate_name(guess.degenerate),
            length,
        }
    }

    pub fn fitted(guess: &RecoveryReport, fit: &FitResult, length: f64) -> Self {
        SegmentReport {
            params: (&fit.params).into(),
            residuals: Residuals {
                r4_opt: Some(fit.r4(length)),
                ..Self::guess(guess, length, None).residuals
            },
            grad_norm: Some(fit.grad_norm),
            iterations: fit.iterations,
            converged: Some(fit.converged),
            termination: Some(format!("{:?}", fit.termination)),
            constraint_violation: Some(fit.constraint_violation),
            ..Self::guess(guess, length, None)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JoinReport {
    pub position_gap: f64,
    pub tangent_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PiecewiseReport {
    pub breakpoints: Vec<f64>,
    pub segments: Vec<SegmentReport>,
    pub joins: Vec<JoinReport>,
    pub meets_threshold: bool,
    pub converged: bool,
    pub max_r4: f64,
}

impl From<&PiecewiseFit> for PiecewiseReport {
    fn from(pw: &PiecewiseFit) -> Self {
        PiecewiseReport {
            breakpoints: pw.breakpoints.clone(),
            segments: pw
                .segments
                .iter()
                .map(|s| SegmentReport::fitted(&s.guess, &s.fit, s.length))
                .collect(),
            joins: pw
                .joins
                .iter()
                .map(|j| JoinReport {
                    position_gap: j.position_gap,
                    tangent_gap: j.tangent_gap,
                })
                .collect(),
            meets_threshold: pw.meets_threshold,
            converged: pw.all_converged(),
            max_r4: pw.max_r4(),
        }
    }
}

/// Pretty printing with every float written to 17 significant digits.
struct Digits17(PrettyFormatter<'static>);

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serialize `value` as pretty JSON with 17 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report serialization");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}
