// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use elastica_cli::{run, Mode, RunConfig, Status};

/// Approximate a planar curve by Euler elastica.
///
/// Exit status: 0 success, 2 unreadable input or bad arguments, 3 degenerate
/// input, 4 fit did not converge (the report is still written).
#[derive(Debug, Parser)]
#[command(name = "elastica-fit", version)]
struct Args {
    /// Curve file: {"bezier": [[[x,y] x4], ...]} or {"polyline": [[x,y], ...]}.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "fit")]
    mode: Mode,
    /// Pin the segment endpoints to the curve endpoints.
    #[arg(long)]
    endpoints: bool,
    /// Also pin the end tangent directions (implies --endpoints).
    #[arg(long)]
    tangents: bool,
    /// Sampling intervals along the curve (per piece in piecewise mode).
    #[arg(long, default_value_t = 1024)]
    samples: usize,
    /// Largest acceptable R4 of a piece in piecewise mode.
    #[arg(long, default_value_t = 1e-3)]
    r4_threshold: f64,
    /// Deepest bisection level in piecewise mode.
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    /// Optimizer iteration limit per segment.
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG overlay of target, initial guess and optimized curve.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        input: args.input,
        mode: args.mode,
        endpoints: args.endpoints,
        tangents: args.tangents,
        samples: args.samples,
        r4_threshold: args.r4_threshold,
        max_depth: args.max_depth,
        max_iter: args.max_iter,
        out: args.out,
        svg: args.svg,
    };
    let status = match run(&config) {
        Ok(out) => {
            match out.status {
                Status::Degenerate => eprintln!("elastica-fit: constant-curvature input, reported the line/arc guess"),
                Status::Unconverged => eprintln!("elastica-fit: fit did not converge"),
                _ => {}
            }
            out.status
        }
        Err(e) => {
            eprintln!("elastica-fit: {e}");
            e.status
        }
    };
    ExitCode::from(status.code() as u8)
}
