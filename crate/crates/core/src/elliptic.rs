// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Jacobi elliptic functions and elliptic integrals.
//!
//! Conventions follow the modulus `k` (not the parameter `m = k²`). The
//! second-kind integral [`incomplete_e`] takes the *argument* `u` and
//! returns `∫₀ᵘ dn²(t, k) dt`, which is what the elastica formulas need.
//!
//! For `k > 1` every function is defined through the reciprocal-modulus
//! transfer identities
//!
//! ```text
//! sn(u,k) = sn(ku,1/k)/k    cn(u,k) = dn(ku,1/k)    dn(u,k) = cn(ku,1/k)
//! E(u,k)  = k E(ku,1/k) + u (1 - k²)
//! ```
//!
//! and the quarter period is extended as `K(k) = K(1/k) / 2k` so that `cn`
//! keeps period `4K`. That extension is not the analytic continuation of `K`.
//!
//! `K` and the amplitude come from the arithmetic-geometric mean; the
//! incomplete integrals on a reduced range come from Carlson's symmetric
//! forms.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Half-width of the excluded band around `k = 1`.
pub const K_GUARD: f64 = 1e-9;

const AGM_MAX_STEPS: usize = 40;

/// Elliptic modulus `k ≥ 0`, excluding the singular band around 1.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Modulus(f64);

impl Modulus {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() || k < 0.0 {
            return Err(Error::Domain {
                what: "modulus",
                value: k,
            });
        }
        if (k - 1.0).abs() <= K_GUARD {
            return Err(Error::Singular { k });
        }
        Ok(Modulus(k))
    }

    #[inline]
    pub fn k(self) -> f64 {
        self.0
    }

    /// `k'² = 1 − k²`; negative when `k > 1`.
    #[inline]
    pub fn k_prime_sq(self) -> f64 {
        (1.0 - self.0) * (1.0 + self.0)
    }

    /// True for `k < 1`: the elastica built on this modulus has inflections.
    #[inline]
    pub fn is_inflectional(self) -> bool {
        self.0 < 1.0
    }

    fn reciprocal(self) -> Modulus {
        Modulus(1.0 / self.0)
    }

    fn require_below_one(self, what: &'static str) -> Result<()> {
        if self.0 < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain { what, value: self.0 })
        }
    }
}

impl TryFrom<f64> for Modulus {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Modulus::new(k)
    }
}

/// The values `(sn, cn, dn)` at one argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

fn finite(what: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain { what, value: x })
    }
}

/// Jacobi elliptic functions `sn`, `cn`, `dn` for any real `u`.
pub fn jacobi(u: f64, k: Modulus) -> Result<EllipticTriple> {
    finite("jacobi argument", u)?;
    Ok(jacobi_unchecked(u, k))
}

pub(crate) fn jacobi_unchecked(u: f64, k: Modulus) -> EllipticTriple {
    if k.is_inflectional() {
        let phi = amplitude(u, k.k());
        let (sn, cn) = phi.sin_cos();
        let kk = k.k();
        // pick the better-conditioned of the two equivalent forms
        let dn = if sn * sn < 0.5 {
            ((1.0 - kk * sn) * (1.0 + kk * sn)).sqrt()
        } else {
            (k.k_prime_sq() + kk * kk * cn * cn).sqrt()
        };
        EllipticTriple { sn, cn, dn }
    } else {
        let kk = k.k();
        let r = jacobi_unchecked(kk * u, k.reciprocal());
        EllipticTriple {
            sn: r.sn / kk,
            cn: r.dn,
            dn: r.cn,
        }
    }
}

/// Jacobi amplitude `am(u, k)`, the inverse of `F(·, k)`. Requires `k < 1`.
pub fn am(u: f64, k: Modulus) -> Result<f64> {
    finite("amplitude argument", u)?;
    k.require_below_one("amplitude modulus")?;
    Ok(amplitude(u, k.k()))
}

/// Descending AGM recursion for the amplitude.
fn amplitude(u: f64, k: f64) -> f64 {
    if k == 0.0 {
        return u;
    }
    let mut a = [0.0; AGM_MAX_STEPS + 1];
    let mut c = [0.0; AGM_MAX_STEPS + 1];
    a[0] = 1.0;
    c[0] = k;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut n = 0;
    while n < AGM_MAX_STEPS && c[n].abs() > f64::EPSILON * a[n] {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    phi
}

fn agm_quarter_period(k: f64) -> f64 {
    let mut a = 1.0;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    for _ in 0..AGM_MAX_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    FRAC_PI_2 / a
}

/// Quarter period `K(k)`; for `k > 1` the extension `K(1/k) / 2k`.
pub fn quarter_period(k: Modulus) -> Result<f64> {
    Ok(quarter_period_unchecked(k))
}

pub(crate) fn quarter_period_unchecked(k: Modulus) -> f64 {
    if k.is_inflectional() {
        agm_quarter_period(k.k())
    } else {
        agm_quarter_period(1.0 / k.k()) / (2.0 * k.k())
    }
}

/// Incomplete integral of the first kind `F(φ, k)` for any real `φ`, `k < 1`.
pub fn incomplete_f(phi: f64, k: Modulus) -> Result<f64> {
    finite("incomplete_f angle", phi)?;
    k.require_below_one("incomplete_f modulus")?;
    Ok(legendre_f(phi, k.k()))
}

fn legendre_f(phi: f64, k: f64) -> f64 {
    if k == 0.0 {
        return phi;
    }
    let m = (phi / PI).round();
    let r = phi - m * PI;
    let reduced = {
        let (s, c) = r.sin_cos();
        s * carlson_rf(c * c, (1.0 - k * s) * (1.0 + k * s), 1.0)
    };
    if m == 0.0 {
        reduced
    } else {
        2.0 * m * agm_quarter_period(k) + reduced
    }
}

/// Legendre form `∫₀^φ √(1 − k² sin²θ) dθ` for any real `φ`, `k < 1`.
fn legendre_e(phi: f64, k: f64) -> f64 {
    if k == 0.0 {
        return phi;
    }
    let m = (phi / PI).round();
    let r = phi - m * PI;
    let (s, c) = r.sin_cos();
    let q = (1.0 - k * s) * (1.0 + k * s);
    let k2 = k * k;
    let reduced = s * carlson_rf(c * c, q, 1.0) - k2 * s * s * s / 3.0 * carlson_rd(c * c, q, 1.0);
    if m == 0.0 {
        reduced
    } else {
        let kp2 = (1.0 - k) * (1.0 + k);
        let complete = carlson_rf(0.0, kp2, 1.0) - k2 / 3.0 * carlson_rd(0.0, kp2, 1.0);
        2.0 * m * complete + reduced
    }
}

/// `E(u, k) = ∫₀ᵘ dn²(t, k) dt`, extended to `k > 1` by the transfer identity.
pub fn incomplete_e(u: f64, k: Modulus) -> Result<f64> {
    finite("incomplete_e argument", u)?;
    Ok(incomplete_e_unchecked(u, k))
}

pub(crate) fn incomplete_e_unchecked(u: f64, k: Modulus) -> f64 {
    let kk = k.k();
    if kk == 0.0 {
        u
    } else if k.is_inflectional() {
        legendre_e(amplitude(u, kk), kk)
    } else {
        kk * incomplete_e_unchecked(kk * u, k.reciprocal()) + u * k.k_prime_sq()
    }
}

/// Carlson's `R_F(x, y, z)` by duplication.
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const TOL: f64 = 1e-3;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let mu = (x + y + z) / 3.0;
        let (dx, dy, dz) = (1.0 - x / mu, 1.0 - y / mu, 1.0 - z / mu);
        if dx.abs().max(dy.abs()).max(dz.abs()) < TOL {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
    }
}

/// Carlson's `R_D(x, y, z)` by duplication.
fn carlson_rd(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const TOL: f64 = 1e-3;
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;
    let mut sum = 0.0;
    let mut fac = 1.0;
    loop {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lam));
        fac *= 0.25;
        x = 0.25 * (x + lam);
        y = 0.25 * (y + lam);
        z = 0.25 * (z + lam);
        let ave = 0.2 * (x + y + 3.0 * z);
        let (dx, dy, dz) = ((ave - x) / ave, (ave - y) / ave, (ave - z) / ave);
        if dx.abs().max(dy.abs()).max(dz.abs()) < TOL {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            return 3.0 * sum
                + fac * (1.0 + ed * (-C1 + C5 * ed - C6 * dz * ee) + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea)))
                    / (ave * ave.sqrt());
        }
    }
}
