// Copyright 2026 the Elastica Fit Authors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form elastica segments.
//!
//! The basic elastica with modulus `k` is
//!
//! ```text
//! ζ_k(s) = (2 E(s,k) − s, 2k (1 − cn(s,k)))
//! ```
//!
//! which is unit speed, starts at the origin heading along +x, and has
//! curvature `2k cn(s,k)`. Every elastica segment is a similarity image of a
//! piece of some `ζ_k`:
//!
//! ```text
//! y(t) = w R_φ ζ_k(s0 + ℓ t) + (x0, y0),   t ∈ [0, 1]
//! ```

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::elliptic::{self, EllipticTriple, Modulus};
use crate::error::{Error, Result};

/// A point or vector in the plane. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const ZERO: PlanePoint = PlanePoint { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        PlanePoint { x, y }
    }

    #[inline]
    pub fn dot(self, o: PlanePoint) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: PlanePoint) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    /// Rotate counterclockwise by the angle with the given cosine and sine.
    #[inline]
    pub fn rotate_cs(self, c: f64, s: f64) -> PlanePoint {
        PlanePoint::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    #[inline]
    pub fn rotate(self, angle: f64) -> PlanePoint {
        let (s, c) = angle.sin_cos();
        self.rotate_cs(c, s)
    }

    /// Rotation by a quarter turn.
    #[inline]
    pub fn perp(self) -> PlanePoint {
        PlanePoint::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for PlanePoint {
    type Output = PlanePoint;
    #[inline]
    fn add(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for PlanePoint {
    #[inline]
    fn add_assign(&mut self, o: PlanePoint) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for PlanePoint {
    type Output = PlanePoint;
    #[inline]
    fn sub(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for PlanePoint {
    type Output = PlanePoint;
    #[inline]
    fn neg(self) -> PlanePoint {
        PlanePoint::new(-self.x, -self.y)
    }
}

impl Mul<f64> for PlanePoint {
    type Output = PlanePoint;
    #[inline]
    fn mul(self, a: f64) -> PlanePoint {
        PlanePoint::new(a * self.x, a * self.y)
    }
}

impl Mul<PlanePoint> for f64 {
    type Output = PlanePoint;
    #[inline]
    fn mul(self, p: PlanePoint) -> PlanePoint {
        p * self
    }
}

impl From<[f64; 2]> for PlanePoint {
    fn from(a: [f64; 2]) -> Self {
        PlanePoint::new(a[0], a[1])
    }
}

impl From<PlanePoint> for [f64; 2] {
    fn from(p: PlanePoint) -> Self {
        [p.x, p.y]
    }
}

/// Number of control parameters of an elastica segment.
pub const N_PARAMS: usize = 7;

/// Index of each control parameter in [`ElasticaParams::to_array`] order.
pub mod param {
    pub const K: usize = 0;
    pub const S0: usize = 1;
    pub const ELL: usize = 2;
    pub const W: usize = 3;
    pub const PHI: usize = 4;
    pub const X0: usize = 5;
    pub const Y0: usize = 6;
}

/// The seven control parameters of an elastica segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElasticaParams {
    /// Elliptic modulus.
    pub k: f64,
    /// Start parameter on the basic elastica.
    pub s0: f64,
    /// Signed parameter extent on the basic elastica.
    pub ell: f64,
    /// Scale factor.
    pub w: f64,
    /// Rotation angle.
    pub phi: f64,
    pub x0: f64,
    pub y0: f64,
}

impl ElasticaParams {
    pub fn new(k: f64, s0: f64, ell: f64, w: f64, phi: f64, x0: f64, y0: f64) -> Self {
        ElasticaParams {
            k,
            s0,
            ell,
            w,
            phi,
            x0,
            y0,
        }
    }

    pub fn to_array(&self) -> [f64; N_PARAMS] {
        [self.k, self.s0, self.ell, self.w, self.phi, self.x0, self.y0]
    }

    pub fn from_array(a: [f64; N_PARAMS]) -> Self {
        ElasticaParams::new(a[0], a[1], a[2], a[3], a[4], a[5], a[6])
    }

    /// Segment length `|ℓ| w`.
    pub fn length(&self) -> f64 {
        self.ell.abs() * self.w
    }

    pub fn modulus(&self) -> Result<Modulus> {
        Modulus::new(self.k)
    }

    pub fn translation(&self) -> PlanePoint {
        PlanePoint::new(self.x0, self.y0)
    }

    /// Check the chart invariants: finite values, `w > 0`, `ℓ ≠ 0` and a
    /// modulus outside the singular band.
    pub fn validate(&self) -> Result<Modulus> {
        for (what, v) in [
            ("s0", self.s0),
            ("ell", self.ell),
            ("w", self.w),
            ("phi", self.phi),
            ("x0", self.x0),
            ("y0", self.y0),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain { what, value: v });
            }
        }
        if self.w <= 0.0 {
            return Err(Error::Domain {
                what: "scale w",
                value: self.w,
            });
        }
        if self.ell == 0.0 {
            return Err(Error::Domain {
                what: "extent ell",
                value: self.ell,
            });
        }
        Modulus::new(self.k)
    }

    /// `φ` reduced to `(−π, π]`.
    pub fn normalized_phi(&self) -> f64 {
        wrap_angle(self.phi)
    }
}

/// Reduce an angle to `(−π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `(sn, cn, dn)` together with `E(s, k)`, sharing one amplitude evaluation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct EllipticState {
    pub s: f64,
    pub k: f64,
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
    pub e: f64,
}

pub(crate) fn elliptic_state(s: f64, k: Modulus) -> EllipticState {
    let EllipticTriple { sn, cn, dn } = elliptic::jacobi_unchecked(s, k);
    let e = elliptic::incomplete_e_unchecked(s, k);
    EllipticState {
        s,
        k: k.k(),
        sn,
        cn,
        dn,
        e,
    }
}

fn finite_arg(what: &'static str, s: f64) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value: s })
    }
}

/// Point on the basic elastica `ζ_k(s)`.
pub fn basic_point(s: f64, k: f64) -> Result<PlanePoint> {
    finite_arg("basic elastica parameter", s)?;
    let m = Modulus::new(k)?;
    Ok(basic_point_state(&elliptic_state(s, m)))
}

fn basic_point_state(st: &EllipticState) -> PlanePoint {
    PlanePoint::new(2.0 * st.e - st.s, 2.0 * st.k * (1.0 - st.cn))
}

/// Derivatives of the basic elastica with respect to arclength `s` and
/// modulus `k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasicDerivatives {
    pub point: PlanePoint,
    pub d_s: PlanePoint,
    pub d_ss: PlanePoint,
    pub d_k: PlanePoint,
    pub d_sk: PlanePoint,
    pub d_kk: PlanePoint,
}

/// All five derivative blocks of `ζ_k` at `(s, k)`.
///
/// The `k`-derivatives divide by `1 − k²` and the second one also by `k`,
/// so `k = 0` is rejected.
pub fn basic_derivatives(s: f64, k: f64) -> Result<BasicDerivatives> {
    finite_arg("basic elastica parameter", s)?;
    let m = Modulus::new(k)?;
    if k == 0.0 {
        return Err(Error::Domain {
            what: "second k-derivative modulus",
            value: k,
        });
    }
    Ok(derivatives_state(&elliptic_state(s, m)))
}

/// First-order blocks only: `(ζ_s, ζ_ss)`.
fn s_derivatives(st: &EllipticState) -> (PlanePoint, PlanePoint) {
    let EllipticState { k, sn, cn, dn, .. } = *st;
    let tangent = PlanePoint::new(2.0 * dn * dn - 1.0, 2.0 * k * sn * dn);
    let d_ss = PlanePoint::new(-2.0 * k * sn * dn, 2.0 * dn * dn - 1.0) * (2.0 * k * cn);
    (tangent, d_ss)
}

pub(crate) fn derivatives_state(st: &EllipticState) -> BasicDerivatives {
    let EllipticState {
        s,
        k,
        sn: ss,
        cn: c,
        dn: d,
        e,
    } = *st;
    let k2 = k * k;
    let kp2 = (1.0 - k) * (1.0 + k);
    let (d_s, d_ss) = s_derivatives(st);

    let d_k = PlanePoint::new(
        k * (ss * c * d - e * c * c - s * kp2 * ss * ss),
        kp2 + c * (k2 - d * d) - ss * d * (e - s * kp2),
    ) * (2.0 / kp2);

    let normal = PlanePoint::new(-2.0 * k * ss * d, 2.0 * d * d - 1.0);
    let d_sk = normal * (2.0 / kp2 * (ss * d - c * (e - s * kp2)));

    let em = e - s;
    let a = PlanePoint::new(
        2.0 * ss * d * c * (d * d - k2 * e * e + kp2 * (s * s * k2 - em * em - 0.5)),
        ((1.0 - 2.0 * k2 * ss * ss) * em * (2.0 * s * k2 + em) * c + d * ss * (s * kp2 - e) * (4.0 * k2 * c * c + kp2))
            / k,
    );
    let b = PlanePoint::new(
        em * (c * c + d * d - 4.0 * c * c * d * d) + 2.0 * s * k2 * (2.0 * ss * ss - 1.0) * d * d - s * kp2,
        -s * k * kp2 * d * ss
            + s * s * k2 * k * c
            + k * c * ss * ss * (2.0 - 2.0 * s * s * k2 * k2 - 2.0 * k2 * ss * ss + k2),
    );
    let d_kk = (a + b) * (2.0 / (kp2 * kp2));

    BasicDerivatives {
        point: basic_point_state(st),
        d_s,
        d_ss,
        d_k,
        d_sk,
        d_kk,
    }
}

/// Point on the segment at `t ∈ [0, 1]`.
pub fn segment_eval(p: &ElasticaParams, t: f64) -> Result<PlanePoint> {
    let m = p.validate()?;
    finite_arg("segment parameter", t)?;
    Ok(segment_eval_unchecked(p, m, t))
}

pub(crate) fn segment_eval_unchecked(p: &ElasticaParams, m: Modulus, t: f64) -> PlanePoint {
    let z = basic_point_state(&elliptic_state(p.s0 + p.ell * t, m));
    let (sp, cp) = p.phi.sin_cos();
    z.rotate_cs(cp, sp) * p.w + p.translation()
}

/// Point, velocity and acceleration of the segment with respect to `t`.
pub fn segment_jet(p: &ElasticaParams, t: f64) -> Result<[PlanePoint; 3]> {
    let m = p.validate()?;
    finite_arg("segment parameter", t)?;
    let st = elliptic_state(p.s0 + p.ell * t, m);
    let (d_s, d_ss) = s_derivatives(&st);
    let (sp, cp) = p.phi.sin_cos();
    Ok([
        basic_point_state(&st).rotate_cs(cp, sp) * p.w + p.translation(),
        d_s.rotate_cs(cp, sp) * (p.w * p.ell),
        d_ss.rotate_cs(cp, sp) * (p.w * p.ell * p.ell),
    ])
}

/// Signed curvature of the segment at `t`: `sign(ℓ) (2k/w) cn(s0 + ℓt)`.
pub fn segment_curvature(p: &ElasticaParams, t: f64) -> Result<f64> {
    let m = p.validate()?;
    finite_arg("segment parameter", t)?;
    let cn = elliptic::jacobi_unchecked(p.s0 + p.ell * t, m).cn;
    Ok(p.ell.signum() * 2.0 * p.k / p.w * cn)
}

/// Unit tangent of the segment at `t`, in the direction of increasing `t`.
pub fn segment_tangent(p: &ElasticaParams, t: f64) -> Result<PlanePoint> {
    let m = p.validate()?;
    finite_arg("segment parameter", t)?;
    let (d_s, _) = s_derivatives(&elliptic_state(p.s0 + p.ell * t, m));
    Ok(d_s.rotate(p.phi) * p.ell.signum())
}

/// Value plus first and second partial derivatives of `y(t)` with respect
/// to the control parameters, indexed as in [`param`].
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentPartials {
    pub value: PlanePoint,
    pub first: [PlanePoint; N_PARAMS],
    pub second: [[PlanePoint; N_PARAMS]; N_PARAMS],
}

/// Partial derivatives of the segment point with respect to all seven
/// control parameters. Requires `k > 0`.
pub fn segment_partials(p: &ElasticaParams, t: f64) -> Result<SegmentPartials> {
    let m = p.validate()?;
    finite_arg("segment parameter", t)?;
    if p.k == 0.0 {
        return Err(Error::Domain {
            what: "second k-derivative modulus",
            value: p.k,
        });
    }
    Ok(segment_partials_unchecked(p, m, t))
}

pub(crate) fn segment_partials_unchecked(p: &ElasticaParams, m: Modulus, t: f64) -> SegmentPartials {
    use param::*;
    let bd = derivatives_state(&elliptic_state(p.s0 + p.ell * t, m));
    let (sp, cp) = p.phi.sin_cos();
    let rot = |v: PlanePoint| v.rotate_cs(cp, sp);
    let w = p.w;

    let z = rot(bd.point);
    let zs = rot(bd.d_s);
    let zss = rot(bd.d_ss);
    let zk = rot(bd.d_k);
    let zsk = rot(bd.d_sk);
    let zkk = rot(bd.d_kk);

    let mut first = [PlanePoint::ZERO; N_PARAMS];
    first[K] = zk * w;
    first[S0] = zs * w;
    first[ELL] = zs * (w * t);
    first[W] = z;
    first[PHI] = z.perp() * w;
    first[X0] = PlanePoint::new(1.0, 0.0);
    first[Y0] = PlanePoint::new(0.0, 1.0);

    let mut second = [[PlanePoint::ZERO; N_PARAMS]; N_PARAMS];
    let mut set = |i: usize, j: usize, v: PlanePoint| {
        second[i][j] = v;
        second[j][i] = v;
    };
    set(K, K, zkk * w);
    set(K, S0, zsk * w);
    set(K, ELL, zsk * (w * t));
    set(K, W, zk);
    set(K, PHI, zk.perp() * w);
    set(S0, S0, zss * w);
    set(S0, ELL, zss * (w * t));
    set(S0, W, zs);
    set(S0, PHI, zs.perp() * w);
    set(ELL, ELL, zss * (w * t * t));
    set(ELL, W, zs * t);
    set(ELL, PHI, zs.perp() * (w * t));
    set(W, PHI, z.perp());
    set(PHI, PHI, -z * w);

    SegmentPartials {
        value: z * w + p.translation(),
        first,
        second,
    }
}

/// Unit tangent `sign(ℓ) R_φ ζ_s(s0 + ℓt)` with its gradient and Hessian
/// with respect to the parameters. Only `k`, `s0`, `ℓ`, `φ` enter.
///
/// Third-order derivatives of `ζ` are not available in closed form here, so
/// the Hessian is a central difference of the analytic gradient.
pub(crate) fn tangent_partials(
    p: &ElasticaParams,
    t: f64,
) -> (PlanePoint, [PlanePoint; N_PARAMS], [[PlanePoint; N_PARAMS]; N_PARAMS]) {
    let grad_at = |q: &ElasticaParams| -> Option<(PlanePoint, [PlanePoint; N_PARAMS])> {
        use param::*;
        let m = Modulus::new(q.k).ok()?;
        let bd = derivatives_state(&elliptic_state(q.s0 + q.ell * t, m));
        let sgn = q.ell.signum();
        let (sp, cp) = q.phi.sin_cos();
        let rot = |v: PlanePoint| v.rotate_cs(cp, sp) * sgn;
        let tan = rot(bd.d_s);
        let mut g = [PlanePoint::ZERO; N_PARAMS];
        g[K] = rot(bd.d_sk);
        g[S0] = rot(bd.d_ss);
        g[ELL] = rot(bd.d_ss) * t;
        g[PHI] = tan.perp();
        Some((tan, g))
    };
    let (tan, grad) = grad_at(p).expect("validated parameters");
    let mut hess = [[PlanePoint::ZERO; N_PARAMS]; N_PARAMS];
    let base = p.to_array();
    for j in [param::K, param::S0, param::ELL, param::PHI] {
        let h = 1e-6 * base[j].abs().max(1.0);
        let mut hi = base;
        let mut lo = base;
        hi[j] += h;
        lo[j] -= h;
        if let (Some((_, gp)), Some((_, gm))) = (
            grad_at(&ElasticaParams::from_array(hi)),
            grad_at(&ElasticaParams::from_array(lo)),
        ) {
            for i in 0..N_PARAMS {
                hess[i][j] = (gp[i] - gm[i]) * (0.5 / h);
            }
        }
    }
    for i in 0..N_PARAMS {
        for j in 0..i {
            let v = (hess[i][j] + hess[j][i]) * 0.5;
            hess[i][j] = v;
            hess[j][i] = v;
        }
    }
    (tan, grad, hess)
}
