// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced anywhere in the elastica pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("{what}: argument {value} outside domain")]
    Domain { what: &'static str, value: f64 },
    /// The modulus is within the guard band around k = 1, where K diverges.
    #[error("modulus k = {k} lies in the singular band around 1")]
    Singular { k: f64 },
    /// The input curve is degenerate (zero length, collinear data, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// Mismatched or otherwise invalid call arguments.
    #[error("invalid usage: {0}")]
    Usage(String),
    /// Invalid input curve description.
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
