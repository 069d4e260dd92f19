// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Approximation of planar curves by segments of Euler elastica.

// Comparisons are written so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Matrix code reads better with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod curve;
pub mod elastica;
pub mod elliptic;
pub mod error;
pub mod fitting;
pub mod recovery;
pub mod segmentation;

pub use error::{Error, Result};
