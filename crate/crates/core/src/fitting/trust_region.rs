// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact solution of the trust-region subproblem
//! `min gᵀs + ½ sᵀHs` subject to `‖s‖ ≤ Δ`, for small dense `H`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Minimizer of the quadratic model inside the ball of radius `radius`.
///
/// Uses the eigendecomposition of `h`, so indefinite models and the "hard
/// case" (gradient orthogonal to the lowest eigenvector) are handled.
pub(crate) fn solve(h: &DMatrix<f64>, g: &DVector<f64>, radius: f64) -> DVector<f64> {
    solve_with_shift(h, g, radius).0
}

/// As [`solve`], also returning the shift `μ ≥ 0` with `(H + μI) s = −g`.
pub(crate) fn solve_with_shift(h: &DMatrix<f64>, g: &DVector<f64>, radius: f64) -> (DVector<f64>, f64) {
    let n = g.len();
    if n == 0 {
        return (DVector::zeros(0), 0.0);
    }
    let eig = SymmetricEigen::new(h.clone());
    let q = &eig.eigenvectors;
    let lam = &eig.eigenvalues;
    let gt = q.transpose() * g;
    let (imin, lmin) = lam
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let scale = lam.amax().max(f64::MIN_POSITIVE);
    let step_norm = |mu: f64| -> f64 {
        gt.iter()
            .zip(lam.iter())
            .map(|(gi, li)| (gi / (li + mu)).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let build = |mu: f64| -> DVector<f64> {
        let coef = DVector::from_iterator(n, gt.iter().zip(lam.iter()).map(|(gi, li)| -gi / (li + mu)));
        q * coef
    };

    if lmin > 1e-14 * scale && step_norm(0.0) <= radius {
        return (build(0.0), 0.0);
    }
    let lo0 = (-lmin).max(0.0);
    let gnorm = g.norm();
    // Hard case: the secular function stays below the radius at the pole.
    let pole_gap = 1e-12 * scale.max(lo0);
    let others = |mu: f64| -> DVector<f64> {
        let coef = DVector::from_iterator(
            n,
            gt.iter().zip(lam.iter()).enumerate().map(|(i, (gi, li))| {
                if i == imin || (li + mu).abs() <= pole_gap {
                    0.0
                } else {
                    -gi / (li + mu)
                }
            }),
        );
        q * coef
    };
    if gt[imin].abs() <= 1e-12 * gnorm.max(f64::MIN_POSITIVE) {
        let s = others(lo0);
        if s.norm() <= radius {
            let tau = (radius * radius - s.norm_squared()).max(0.0).sqrt();
            return (s + q.column(imin) * tau, lo0);
        }
    }
    // Safeguarded Newton on 1/‖s(μ)‖ − 1/Δ over the bracket.
    let mut lo = lo0;
    let mut hi = lo0 + gnorm / radius + f64::MIN_POSITIVE;
    let mut mu = hi;
    for _ in 0..200 {
        let sn = step_norm(mu);
        if (sn - radius).abs() <= 1e-10 * radius {
            break;
        }
        if sn > radius {
            lo = mu;
        } else {
            hi = mu;
        }
        // d‖s‖/dμ = −Σ g̃²/(λ+μ)³ / ‖s‖
        let d = -gt
            .iter()
            .zip(lam.iter())
            .map(|(gi, li)| gi * gi / (li + mu).powi(3))
            .sum::<f64>()
            / sn;
        let next = mu - (sn - radius) / d * (sn / radius);
        mu = if next > lo && next < hi && next.is_finite() {
            next
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    (build(mu), mu)
}

/// Value of the quadratic model at `s`.
pub(crate) fn model(h: &DMatrix<f64>, g: &DVector<f64>, s: &DVector<f64>) -> f64 {
    g.dot(s) + 0.5 * s.dot(&(h * s))
}
