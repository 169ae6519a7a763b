//! The quenched Cauchy approximant
//!
//! ```text
//! g_lambda(z) = lambda h(z) / (2 pi i) ∫_I conj(h(t)) g(t) / (t - z) dt
//! ```
//!
//! evaluated in the upper half plane and through its boundary values on the
//! real line. Every integral over `I` can be taken either directly in `t` or
//! after the substitution `t = c + w tanh(u / 2)` (`c` the center and `w` the
//! half width of `I`), under which the quenching phase on the interval becomes
//! exactly `e^{i xi (C + u)}` and the endpoints move to infinity.
//!
//! Boundary limits are taken at continuity points of `g`; nothing is claimed
//! at points where `g` jumps.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::asymptotics::{kernel_real, StripSingularity};
use crate::error::{Error, Result};
use crate::quadrature::{
    integrate_adaptive, integrate_real_line, pv_integrate, DecayCertificate, QuadTolerance, PV_ENDPOINT_GUARD,
};
use crate::quench::{phase_g, quench_interior, Interval, QuenchParams};

pub type RealEvaluator = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type ComplexEvaluator = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// Analytic continuation of `g(a tanh(u / 2))` into the strip.
#[derive(Clone)]
pub struct StripPullback {
    pub half_width: f64,
    pub eval: ComplexEvaluator,
}

/// Data `g` on the recovery interval, optionally with the analytic strip
/// data the residue analysis needs.
#[derive(Clone)]
pub struct BoundarySignal {
    eval_on_i: RealEvaluator,
    strip_pullback: Option<StripPullback>,
    singularities: Vec<StripSingularity>,
    decay_cert: Option<DecayCertificate>,
}

impl fmt::Debug for BoundarySignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundarySignal")
            .field("has_strip_pullback", &self.strip_pullback.is_some())
            .field("singularities", &self.singularities)
            .field("decay_cert", &self.decay_cert)
            .finish()
    }
}

impl BoundarySignal {
    pub fn new<F>(eval_on_i: F) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        BoundarySignal {
            eval_on_i: Arc::new(eval_on_i),
            strip_pullback: None,
            singularities: Vec::new(),
            decay_cert: None,
        }
    }

    pub fn with_pullback<F>(mut self, half_width: f64, pullback: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        self.strip_pullback = Some(StripPullback {
            half_width,
            eval: Arc::new(pullback),
        });
        self
    }

    pub fn with_singularities(mut self, singularities: Vec<StripSingularity>) -> Result<Self> {
        for s in &singularities {
            s.validate()?;
        }
        self.singularities = singularities;
        Ok(self)
    }

    pub fn with_certificate(mut self, cert: DecayCertificate) -> Result<Self> {
        cert.validate()?;
        self.decay_cert = Some(cert);
        Ok(self)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        (self.eval_on_i)(x)
    }

    pub fn evaluator(&self) -> &RealEvaluator {
        &self.eval_on_i
    }

    pub fn pullback(&self) -> Option<&StripPullback> {
        self.strip_pullback.as_ref()
    }

    pub fn singularities(&self) -> &[StripSingularity] {
        &self.singularities
    }

    pub fn certificate(&self) -> Option<&DecayCertificate> {
        self.decay_cert.as_ref()
    }

    /// The signal multiplied by a constant. Strip data is carried along;
    /// the certificate bound scales with `|c|`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let eval = self.eval_on_i.clone();
        let strip_pullback = self.strip_pullback.as_ref().map(|p| {
            let inner = p.eval.clone();
            StripPullback {
                half_width: p.half_width,
                eval: Arc::new(move |z| c * inner(z)) as ComplexEvaluator,
            }
        });
        let singularities = self
            .singularities
            .iter()
            .map(|s| StripSingularity {
                coeff: s.coeff * c,
                ..*s
            })
            .collect();
        let decay_cert = self.decay_cert.map(|cert| DecayCertificate {
            bound: cert.bound * c.norm().max(f64::MIN_POSITIVE),
            ..cert
        });
        BoundarySignal {
            eval_on_i: Arc::new(move |x| c * eval(x)),
            strip_pullback,
            singularities,
            decay_cert,
        }
    }

    /// Largest `|pullback(u) - g(phi(u))|` over `grid`.
    pub fn pullback_deviation(&self, grid: &[f64]) -> Option<f64> {
        let p = self.strip_pullback.as_ref()?;
        Some(grid.iter().fold(0.0f64, |m, &u| {
            let t = p.half_width * (0.5 * u).tanh();
            m.max(((p.eval)(Complex64::new(u, 0.0)) - self.eval(t)).norm())
        }))
    }

    /// Certificate for `g(t(u))` on the real line: the shipped one, or a
    /// sampled bound with `delta = 1/2` when none was given.
    fn real_line_certificate(&self, interval: &Interval) -> Result<DecayCertificate> {
        if let Some(cert) = self.decay_cert {
            return Ok(cert);
        }
        let map = TanhMap::new(interval);
        let sup = (0..=4000)
            .map(|k| map.t(-40.0 + 0.02 * k as f64))
            .filter(|&t| interval.contains(t))
            .map(|t| self.eval(t).norm())
            .fold(0.0f64, f64::max);
        if !sup.is_finite() {
            return Err(Error::domain("signal is not bounded on the interval"));
        }
        DecayCertificate::new(0.5, 2.0 * sup + f64::MIN_POSITIVE)
    }
}

/// A Hardy-space function with its boundary trace, used as ground truth.
#[derive(Clone)]
pub struct ReferencePair {
    interior: ComplexEvaluator,
    boundary: RealEvaluator,
}

impl fmt::Debug for ReferencePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ReferencePair { .. }")
    }
}

impl ReferencePair {
    pub fn new<F, B>(interior: F, boundary: B) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        B: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        ReferencePair {
            interior: Arc::new(interior),
            boundary: Arc::new(boundary),
        }
    }

    pub fn interior(&self, z: Complex64) -> Complex64 {
        (self.interior)(z)
    }

    pub fn boundary(&self, x: f64) -> Complex64 {
        (self.boundary)(x)
    }
}

/// Which variable an interval integral is evaluated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationPath {
    /// Directly over `t` in the interval.
    TDomain,
    /// Over `u` on the real line after `t = c + w tanh(u / 2)`.
    UDomain,
}

/// `t = center + half tanh(u / 2)`.
#[derive(Debug, Clone, Copy)]
struct TanhMap {
    center: f64,
    half: f64,
}

impl TanhMap {
    fn new(interval: &Interval) -> Self {
        TanhMap {
            center: interval.center(),
            half: interval.half_width(),
        }
    }

    fn t(&self, u: f64) -> f64 {
        self.center + self.half * (0.5 * u).tanh()
    }

    /// `dt/du = (half / 2) sech^2(u / 2)`, via `e^{-|u|}` to stay finite.
    fn dt(&self, u: f64) -> f64 {
        let e = (-u.abs()).exp();
        2.0 * self.half * e / ((1.0 + e) * (1.0 + e))
    }
}

/// Boundary phase without endpoint checks, for use inside integrands.
fn phase_inside(t: f64, xi: f64, interval: &Interval) -> f64 {
    xi * (((interval.hi() - t) / (interval.lo() - t)).abs().ln() - interval.phase_offset())
}

/// `∫_I conj(h(t)) g(t) / (t - z) dt` for `Im z > 0`.
pub fn cauchy_integral(
    z: Complex64,
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    tol: &QuadTolerance,
    path: IntegrationPath,
) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::domain(format!("Cauchy integral needs Im z > 0, got {z}")));
    }
    let xi = p.xi();
    let modulus = p.inner_modulus();
    match path {
        IntegrationPath::TDomain => integrate_adaptive(
            |t| {
                let h_conj = Complex64::from_polar(modulus, -phase_inside(t, xi, interval));
                h_conj * g.eval(t) / (t - z)
            },
            interval.lo(),
            interval.hi(),
            tol,
        ),
        IntegrationPath::UDomain => {
            let map = TanhMap::new(interval);
            let cert = g.real_line_certificate(interval)?.scaled(2.0 * map.half / z.im)?;
            let integral = integrate_real_line(
                |u| {
                    let t = map.t(u);
                    Complex64::from_polar(map.dt(u), xi * u) * g.eval(t) / (t - z)
                },
                &cert,
                tol,
            )?;
            Ok(modulus * Complex64::from_polar(1.0, xi * interval.phase_offset()) * integral)
        }
    }
}

/// The approximant at an interior point, with the integral taken in the
/// `u` variable. The absolute tolerance applies to the returned value.
pub fn approximant_interior(
    z: Complex64,
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    tol: &QuadTolerance,
) -> Result<Complex64> {
    approximant_interior_with(z, p, interval, g, tol, IntegrationPath::UDomain)
}

pub fn approximant_interior_with(
    z: Complex64,
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    tol: &QuadTolerance,
    path: IntegrationPath,
) -> Result<Complex64> {
    let h = quench_interior(z, p, interval)?;
    if p.lambda() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let gain = p.lambda() * h.norm() / (2.0 * PI);
    let integral = cauchy_integral(z, p, interval, g, &absolute_for(tol, gain), path)?;
    Ok(p.lambda() * h * integral / (2.0 * PI * Complex64::i()))
}

/// `∫_I e^{-i G(t)} g(t) / (x - t) dt` for `x` outside the closed interval.
pub fn outer_integral(
    x: f64,
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    tol: &QuadTolerance,
    path: IntegrationPath,
) -> Result<Complex64> {
    if !(x < interval.lo() || x > interval.hi()) {
        return Err(Error::domain(format!(
            "outer integral needs x outside [{}, {}], got {x}",
            interval.lo(),
            interval.hi()
        )));
    }
    let xi = p.xi();
    match path {
        IntegrationPath::TDomain => integrate_adaptive(
            |t| Complex64::from_polar(1.0, -phase_inside(t, xi, interval)) * g.eval(t) / (x - t),
            interval.lo(),
            interval.hi(),
            tol,
        ),
        IntegrationPath::UDomain => {
            let map = TanhMap::new(interval);
            let shifted = x - map.center;
            let alpha = (map.half + shifted) / (shifted - map.half);
            let cert = g.real_line_certificate(interval)?.scaled(alpha.recip().max(1.0))?;
            let prefactor = 2.0 * map.half / (shifted - map.half);
            let integral = integrate_real_line(
                |u| kernel_real(u, xi, alpha) * g.eval(map.t(u)),
                &cert,
                &absolute_for(tol, prefactor.abs()),
            )?;
            Ok(Complex64::from_polar(prefactor, xi * interval.phase_offset()) * integral)
        }
    }
}

/// Boundary value of the approximant at `x` off the interval endpoints:
/// the principal-value formula inside the interval, the `u`-domain outer
/// integral outside it.
pub fn approximant_boundary(
    x: f64,
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    tol: &QuadTolerance,
) -> Result<Complex64> {
    approximant_boundary_with(x, p, interval, g, tol, IntegrationPath::UDomain)
}

/// As [`approximant_boundary`]; `path` selects the variable used outside
/// the interval. The principal value inside is always taken in `t`.
pub fn approximant_boundary_with(
    x: f64,
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    tol: &QuadTolerance,
    path: IntegrationPath,
) -> Result<Complex64> {
    let phase = phase_g(x, p, interval)?;
    let lambda = p.lambda();
    if lambda == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let xi = p.xi();
    let i = Complex64::i();
    if interval.contains(x) {
        // h conj(h) = 1 / (1 + lambda) on the interval.
        let local = lambda / (2.0 * (1.0 + lambda)) * g.eval(x);
        let pv = pv_integrate(
            |t| Complex64::from_polar(1.0, -phase_inside(t, xi, interval)) * g.eval(t),
            interval.lo(),
            interval.hi(),
            x,
            tol,
        )?;
        let coeff = i * lambda / (2.0 * PI * (1.0 + lambda));
        Ok(local + coeff * Complex64::from_polar(1.0, phase) * pv)
    } else {
        let coeff = i * lambda / (2.0 * PI * (1.0 + lambda).sqrt());
        let integral = outer_integral(x, p, interval, g, &absolute_for(tol, coeff.norm()), path)?;
        Ok(coeff * Complex64::from_polar(1.0, phase) * integral)
    }
}

/// Tolerance whose absolute target, after multiplication by `gain`, meets
/// the caller's absolute target.
fn absolute_for(tol: &QuadTolerance, gain: f64) -> QuadTolerance {
    tol.with_abs_tol(tol.abs_tol / gain.max(1.0))
}

/// `max |g_lambda(z) - F(z)|` over `pts`.
pub fn sup_error_on_compact(
    pts: &[Complex64],
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    reference: &ReferencePair,
    tol: &QuadTolerance,
) -> Result<f64> {
    let errors: Vec<Result<f64>> = pts
        .par_iter()
        .map(|&z| Ok((approximant_interior(z, p, interval, g, tol)? - reference.interior(z)).norm()))
        .collect();
    errors.into_iter().try_fold(0.0f64, |m, e| e.map(|v| m.max(v)))
}

/// Midpoints of `n` equal cells of `window`, dropping any that fall within
/// the principal-value guard of an endpoint of `interval`.
pub fn window_samples(window: &Interval, interval: &Interval, n: usize) -> Vec<f64> {
    let step = window.len() / n as f64;
    let guard = PV_ENDPOINT_GUARD * interval.len();
    (0..n)
        .map(|k| window.lo() + (k as f64 + 0.5) * step)
        .filter(|&x| interval.endpoint_distance(x) >= guard)
        .collect()
}

/// Discrete L2 norm `sqrt(step Σ |g_lambda(x) - f(x)|^2)` over the
/// [`window_samples`] of `window`.
pub fn l2_error_on_window(
    p: &QuenchParams,
    interval: &Interval,
    g: &BoundarySignal,
    reference: &ReferencePair,
    window: &Interval,
    n_samples: usize,
    tol: &QuadTolerance,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::domain("window needs at least one sample"));
    }
    let step = window.len() / n_samples as f64;
    let squares: Vec<Result<f64>> = window_samples(window, interval, n_samples)
        .par_iter()
        .map(|&x| Ok((approximant_boundary(x, p, interval, g, tol)? - reference.boundary(x)).norm_sqr()))
        .collect();
    let total = squares.into_iter().try_fold(0.0f64, |acc, e| e.map(|v| acc + v))?;
    Ok((step * total).sqrt())
}
