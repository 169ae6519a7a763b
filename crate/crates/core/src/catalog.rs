//! Reference signals with their analytic strip data.
//!
//! * `example1`: `g(x) = sqrt(a^2 - x^2) - i x` on `(-a, a)`. Its pullback
//!   `a (sech(u/2) - i tanh(u/2))` has a single pole on `Im u = pi` (at
//!   `i pi`) and none below, so the predicted exponent is zero.
//! * `example2`: `g(x) = (1 - i x) / (1 + x^2)` on `(-1, 1)`. Its pullback has
//!   a simple pole at `i pi / 2`, predicting growth like `(1 + lambda)^{1/4}`.
//! * `h2pole`: `F(z) = 1 / (z - w)` with `Im w < 0`, a Hardy-space function
//!   with a known interior value, used for convergence checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approximant::{BoundarySignal, ReferencePair};
use crate::asymptotics::{predict_growth_exponent, StripSingularity};
use crate::error::{Error, Result};
use crate::quadrature::DecayCertificate;
use crate::quench::Interval;

pub const ENTRY_NAMES: [&str; 3] = ["example1", "example2", "h2pole"];

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub interval: Interval,
    pub signal: BoundarySignal,
    pub reference: Option<ReferencePair>,
    pub expected_exponent: f64,
}

/// Optional parameters of the catalog families.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryParams {
    /// Half width for `example1`.
    pub a: Option<f64>,
    /// Pole `[re, im]` for `h2pole`.
    pub w: Option<[f64; 2]>,
}

/// One line of `catalog list`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogInfo {
    pub name: &'static str,
    pub interval: [f64; 2],
    pub expected_exponent: f64,
    pub has_reference: bool,
    pub singularities: Vec<StripSingularity>,
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `2 e^{-u/2} / (1 + e^{-u}) + i (e^{-u} - 1) / (e^{-u} + 1)` for `a = 1`,
/// evaluated through `e^{-|Re u|}`.
fn example1_unit_pullback(u: Complex64) -> Complex64 {
    if u.re >= 0.0 {
        let e = (-u).exp();
        2.0 * (-0.5 * u).exp() / (ONE + e) + I * (e - ONE) / (e + ONE)
    } else {
        let e = u.exp();
        2.0 * (0.5 * u).exp() / (ONE + e) + I * (ONE - e) / (ONE + e)
    }
}

pub fn example1(a: f64) -> Result<CatalogEntry> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("example1 needs a > 0, got {a}")));
    }
    let interval = Interval::symmetric(a)?;
    // g_a(x) = a g_1(x / a) and phi_a = a phi_1, so the pullback scales by a.
    let pole = StripSingularity::new(Complex64::new(0.0, PI), 1, Complex64::new(0.0, -4.0 * a))?;
    let singularities = vec![pole];
    let expected_exponent = predict_growth_exponent(&singularities)?;
    let signal = BoundarySignal::new(move |x| Complex64::new((a * a - x * x).max(0.0).sqrt(), -x))
        .with_pullback(a, move |u| a * example1_unit_pullback(u))
        .with_singularities(singularities)?
        .with_certificate(DecayCertificate::new(0.51, 8.0 * a)?)?;
    Ok(CatalogEntry {
        name: "example1".into(),
        interval,
        signal,
        reference: None,
        expected_exponent,
    })
}

/// `((1 + e^{-u})^2 / (1 + e^{-2u}) - i (1 - e^{-2u}) / (1 + e^{-2u})) / 2`,
/// written in the factored form `(1 - i)(1 + e^{-u}) / (2 (1 - i e^{-u}))`
/// that has no removable 0/0 at `3 i pi / 2`.
fn example2_pullback(u: Complex64) -> Complex64 {
    let c = Complex64::new(0.5, -0.5);
    if u.re >= 0.0 {
        let e = (-u).exp();
        c * (ONE + e) / (ONE - I * e)
    } else {
        let e = u.exp();
        c * (e + ONE) / (e - I)
    }
}

/// The pullback of `example2` exactly as the product of the two quoted
/// fractions, for cross-checking the factored form.
pub fn example2_pullback_quoted(u: Complex64) -> Complex64 {
    let e = (-u).exp();
    let e2 = (-2.0 * u).exp();
    0.5 * ((ONE + e) * (ONE + e) / (ONE + e2) - I * (ONE - e2) / (ONE + e2))
}

pub fn example2() -> Result<CatalogEntry> {
    let interval = Interval::symmetric(1.0)?;
    // (1 - i e^{-z}) has derivative i e^{-z} = 1 at i pi / 2, so the
    // coefficient is (1 - i)(1 - i) / 2 = -i.
    let pole = StripSingularity::new(Complex64::new(0.0, PI / 2.0), 1, Complex64::new(0.0, -1.0))?;
    let singularities = vec![pole];
    let expected_exponent = predict_growth_exponent(&singularities)?;
    let signal = BoundarySignal::new(|x| Complex64::new(1.0, -x) / (1.0 + x * x))
        .with_pullback(1.0, example2_pullback)
        .with_singularities(singularities)?
        .with_certificate(DecayCertificate::new(0.1, 4.0)?)?;
    Ok(CatalogEntry {
        name: "example2".into(),
        interval,
        signal,
        reference: None,
        expected_exponent,
    })
}

/// Poles of `u -> 1 / (tanh(u / 2) - w)` in `0 < Im u <= pi`.
fn h2pole_singularities(w: Complex64) -> Result<Vec<StripSingularity>> {
    let base = 2.0 * w.atanh();
    let period = 2.0 * PI;
    let mut k = (-base.im / period).ceil();
    if base.im + k * period <= 0.0 {
        k += 1.0;
    }
    let beta = Complex64::new(base.re, base.im + k * period);
    if beta.im > PI {
        return Ok(Vec::new());
    }
    // phi'(u) = (1 - tanh^2(u/2)) / 2 = (1 - w^2) / 2 at the pole.
    let coeff = 2.0 / (ONE - w * w);
    Ok(vec![StripSingularity::new(beta, 1, coeff)?])
}

pub fn h2_reference_pole(w: Complex64) -> Result<CatalogEntry> {
    if !(w.im < 0.0) || !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::domain(format!("h2pole needs Im w < 0, got {w}")));
    }
    let interval = Interval::symmetric(1.0)?;
    let singularities = h2pole_singularities(w)?;
    let expected_exponent = predict_growth_exponent(&singularities)?;
    let signal = BoundarySignal::new(move |x| ONE / (x - w))
        .with_pullback(1.0, move |u| ONE / ((0.5 * u).tanh() - w))
        .with_singularities(singularities)?
        .with_certificate(DecayCertificate::new(0.1, 2.0 / -w.im)?)?;
    let reference = ReferencePair::new(move |z| ONE / (z - w), move |x| ONE / (x - w));
    Ok(CatalogEntry {
        name: "h2pole".into(),
        interval,
        signal,
        reference: Some(reference),
        expected_exponent,
    })
}

/// Build an entry by name; unused parameters are rejected.
pub fn lookup(name: &str, params: &EntryParams) -> Result<CatalogEntry> {
    match name {
        "example1" => {
            if params.w.is_some() {
                return Err(Error::domain("example1 takes no parameter w"));
            }
            example1(params.a.unwrap_or(1.0))
        }
        "example2" => {
            if params.a.is_some() || params.w.is_some() {
                return Err(Error::domain("example2 takes no parameters"));
            }
            example2()
        }
        "h2pole" => {
            if params.a.is_some() {
                return Err(Error::domain("h2pole takes no parameter a"));
            }
            let [re, im] = params.w.unwrap_or([0.0, -1.0]);
            h2_reference_pole(Complex64::new(re, im))
        }
        other => Err(Error::domain(format!(
            "unknown catalog entry '{other}', expected one of {}",
            ENTRY_NAMES.join(", ")
        ))),
    }
}

pub fn list() -> Result<Vec<CatalogInfo>> {
    ENTRY_NAMES
        .iter()
        .map(|&name| {
            let e = lookup(name, &EntryParams::default())?;
            Ok(CatalogInfo {
                name,
                interval: [e.interval.lo(), e.interval.hi()],
                expected_exponent: e.expected_exponent,
                has_reference: e.reference.is_some(),
                singularities: e.signal.singularities().to_vec(),
            })
        })
        .collect()
}
