//! The quenching function of a data interval: closed form in the upper half
//! plane and its boundary trace on the real line.
//!
//! With `xi = ln(1 + lambda) / (2 pi)` the quenching function is
//!
//! ```text
//! h(z) = exp( i xi [ Log(hi - z) - Log(lo - z) - C ] ),   C = ln((1 + hi^2) / (1 + lo^2)) / 2
//! ```
//!
//! Its modulus on the real line is `(1 + lambda)^(-1/2)` on the interval and
//! `1` off it; its boundary phase is [`phase_g`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An open interval `(lo, hi)` of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::domain(format!(
                "interval endpoints must be finite, got ({lo}, {hi})"
            )));
        }
        if !(lo < hi) {
            return Err(Error::domain(format!("interval needs lo < hi, got ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    /// The symmetric interval `(-a, a)`.
    pub fn symmetric(a: f64) -> Result<Self> {
        Interval::new(-a, a)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_symmetric(&self) -> bool {
        self.lo == -self.hi
    }

    /// Membership in the open interval.
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn is_endpoint(&self, x: f64) -> bool {
        x == self.lo || x == self.hi
    }

    /// Distance from `x` to the nearer endpoint.
    pub fn endpoint_distance(&self, x: f64) -> f64 {
        (x - self.lo).abs().min((x - self.hi).abs())
    }

    /// `ln((1 + hi^2) / (1 + lo^2)) / 2`, the constant the nonsymmetric phase
    /// carries. Exactly zero for symmetric intervals.
    pub fn phase_offset(&self) -> f64 {
        0.5 * ((1.0 + self.hi * self.hi) / (1.0 + self.lo * self.lo)).ln()
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// The quenching strength `lambda >= 0`. The frequency `xi` is always
/// recomputed from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchParams {
    lambda: f64,
}

impl QuenchParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!(
                "lambda must be finite and non-negative, got {lambda}"
            )));
        }
        Ok(QuenchParams { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn xi(&self) -> f64 {
        self.lambda.ln_1p() / (2.0 * PI)
    }

    /// `(1 + lambda)^(-1/2)`, the modulus of the quenching trace on the
    /// interval.
    pub fn inner_modulus(&self) -> f64 {
        (1.0 + self.lambda).sqrt().recip()
    }
}

pub fn xi_of_lambda(lambda: f64) -> Result<f64> {
    if lambda < 0.0 || lambda.is_nan() {
        return Err(Error::domain(format!("lambda must be non-negative, got {lambda}")));
    }
    Ok(lambda.ln_1p() / (2.0 * PI))
}

/// Boundary phase of the quenching function,
/// `xi [ -C + ln|(hi - x) / (lo - x)| ]`.
pub fn phase_g(x: f64, p: &QuenchParams, interval: &Interval) -> Result<f64> {
    if interval.is_endpoint(x) || !x.is_finite() {
        return Err(Error::domain(format!(
            "phase undefined at x = {x} for interval ({}, {})",
            interval.lo, interval.hi
        )));
    }
    let ratio = ((interval.hi - x) / (interval.lo - x)).abs();
    Ok(p.xi() * (ratio.ln() - interval.phase_offset()))
}

/// Quenching function at `z` with `Im z > 0`.
pub fn quench_interior(z: Complex64, p: &QuenchParams, interval: &Interval) -> Result<Complex64> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!("quench_interior needs Im z > 0, got {z}")));
    }
    // Both differences sit in the open lower half plane, so the principal
    // logs never meet the cut. The log of their quotient could.
    let hi_log = (Complex64::new(interval.hi, 0.0) - z).ln();
    let lo_log = (Complex64::new(interval.lo, 0.0) - z).ln();
    let bracket = hi_log - lo_log - interval.phase_offset();
    Ok((Complex64::i() * p.xi() * bracket).exp())
}

/// Boundary trace `(1 + lambda chi_I(x))^(-1/2) exp(i G(x))`.
pub fn quench_boundary(x: f64, p: &QuenchParams, interval: &Interval) -> Result<Complex64> {
    let phase = phase_g(x, p, interval)?;
    let modulus = if interval.contains(x) { p.inner_modulus() } else { 1.0 };
    Ok(Complex64::from_polar(modulus, phase))
}

/// Conjugate of the boundary trace on the interval, `(1 + lambda)^(-1/2) exp(-i G(t))`.
pub fn quench_boundary_conj(t: f64, p: &QuenchParams, interval: &Interval) -> Result<Complex64> {
    quench_boundary(t, p, interval).map(|h| h.conj())
}
