//! Residue calculus for the approximant outside a symmetric interval `(-a, a)`.
//!
//! With `t = phi(u) = a tanh(u / 2)` and `alpha = (a + x) / (x - a)` the
//! off-interval Cauchy integral becomes `∫ k(u) g(phi(u)) du` over the real
//! line, where
//!
//! ```text
//! k(z) = exp(i xi z) e^z / ((e^z + 1)(e^z + alpha))
//! ```
//!
//! Shifting the line of integration up to `Im z = b` with `pi < b <= 3 pi / 2`
//! picks up the kernel poles at `i pi` and `i pi + ln alpha` (weight
//! `e^{-xi pi}`) plus any pole `beta` of the pullback in the strip (weight
//! `e^{-xi Im beta}`). Against the `e^{xi pi}` prefactor this predicts the
//! growth exponent `(pi - Im beta) / (2 pi)` of the approximant in `1 + lambda`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_adaptive, integrate_truncated, QuadTolerance};

/// Points closer than this to a pole count as sitting on it.
const POLE_EPS: f64 = 1e-12;

/// Minimum `|alpha - 1|` accepted by the kernel residues.
pub const ALPHA_GUARD: f64 = 1e-6;

/// Minimum distance between a singularity and the rectangle edges.
pub const CONTOUR_GUARD: f64 = 1e-6;

/// Largest circle radius used for numerical residues.
pub const MAX_CIRCLE_RADIUS: f64 = 0.2;

/// A pole of the pullback in the strip `0 < Im z <= pi`.
///
/// `coeff` is `lim (z - beta)^order g(phi(z))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripSingularity {
    pub beta: Complex64,
    pub order: u32,
    pub coeff: Complex64,
}

impl StripSingularity {
    pub fn new(beta: Complex64, order: u32, coeff: Complex64) -> Result<Self> {
        let s = StripSingularity { beta, order, coeff };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.im > 0.0 && self.beta.im <= PI + POLE_EPS) || !self.beta.re.is_finite() {
            return Err(Error::domain(format!(
                "strip singularity must satisfy 0 < Im beta <= pi, got {}",
                self.beta
            )));
        }
        if self.order < 1 {
            return Err(Error::domain("pole order must be at least 1"));
        }
        if !(self.coeff.re.is_finite() && self.coeff.im.is_finite()) || self.coeff.norm() == 0.0 {
            return Err(Error::domain(format!(
                "pole coefficient must be finite and nonzero, got {}",
                self.coeff
            )));
        }
        Ok(())
    }

    /// True for poles on the top line `Im z = pi` of the strip.
    pub fn on_boundary_line(&self) -> bool {
        (self.beta.im - PI).abs() <= 1e-9
    }
}

/// Rectangle `[-R, R] x [0, height]` used to shift the line of integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub half_width: f64,
    pub height: f64,
}

impl ContourSpec {
    pub fn new(half_width: f64, height: f64) -> Result<Self> {
        let spec = ContourSpec { half_width, height };
        spec.validate()?;
        Ok(spec)
    }

    /// The default height `3 pi / 2`.
    pub fn with_default_height(half_width: f64) -> Result<Self> {
        ContourSpec::new(half_width, 1.5 * PI)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::domain(format!(
                "contour half width must be positive, got {}",
                self.half_width
            )));
        }
        if !(self.height > PI && self.height <= 1.5 * PI) {
            return Err(Error::domain(format!(
                "contour height must lie in (pi, 3 pi / 2], got {}",
                self.height
            )));
        }
        Ok(())
    }

    /// The second kernel pole `ln alpha + i pi` has to sit well inside.
    pub fn validate_for_alpha(&self, alpha: f64) -> Result<()> {
        self.validate()?;
        check_alpha(alpha)?;
        if !(self.half_width > alpha.ln().abs() + 1.0) {
            return Err(Error::domain(format!(
                "contour half width {} must exceed |ln alpha| + 1 = {}",
                self.half_width,
                alpha.ln().abs() + 1.0
            )));
        }
        Ok(())
    }
}

/// Distance from `z` to the nearest point of `re + i pi (2k + 1)`.
fn distance_to_pole_column(z: Complex64, re: f64) -> f64 {
    let k = ((z.im - PI) / (2.0 * PI)).round();
    let dy = z.im - PI - 2.0 * PI * k;
    (z.re - re).hypot(dy)
}

/// `a (1 - e^{-u}) / (1 + e^{-u})` on the real line.
pub fn phi(u: f64, a: f64) -> f64 {
    a * (0.5 * u).tanh()
}

/// `a (1 - e^{-z}) / (1 + e^{-z})` on the complex plane.
pub fn phi_complex(z: Complex64, a: f64) -> Result<Complex64> {
    if distance_to_pole_column(z, 0.0) < POLE_EPS {
        return Err(Error::Pole { at: z });
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(if z.re >= 0.0 {
        let e = (-z).exp();
        a * (one - e) / (one + e)
    } else {
        let e = z.exp();
        a * (e - one) / (e + one)
    })
}

/// Inverse of [`phi`] on `(-a, a)`.
pub fn phi_inv(t: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("half width must be positive, got {a}")));
    }
    if !(t.abs() < a) {
        return Err(Error::domain(format!("phi_inv needs |t| < a, got t = {t}, a = {a}")));
    }
    Ok(((a + t) / (a - t)).ln())
}

/// `(a + x) / (x - a)` for `|x| > a`.
pub fn alpha_of(x: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::domain(format!("half width must be positive, got {a}")));
    }
    if !(x.abs() > a) {
        return Err(Error::domain(format!("alpha needs |x| > a, got x = {x}, a = {a}")));
    }
    Ok((a + x) / (x - a))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// Kernel value without pole checks. Written in terms of `e^{-|Re z|}` so
/// that it neither overflows nor cancels for large `|Re z|`.
pub(crate) fn kernel_unchecked(z: Complex64, xi: f64, alpha: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let phase = (Complex64::i() * xi * z).exp();
    if z.re > 0.0 {
        let e = (-z).exp();
        phase * e / ((one + e) * (one + alpha * e))
    } else {
        let e = z.exp();
        phase * e / ((e + one) * (e + alpha))
    }
}

/// Kernel on the real line.
pub(crate) fn kernel_real(u: f64, xi: f64, alpha: f64) -> Complex64 {
    let phase = Complex64::from_polar(1.0, xi * u);
    let w = if u > 0.0 {
        let e = (-u).exp();
        e / ((1.0 + e) * (1.0 + alpha * e))
    } else {
        let e = u.exp();
        e / ((e + 1.0) * (e + alpha))
    };
    phase * w
}

/// `k(z) = e^{i xi z} e^z / ((e^z + 1)(e^z + alpha))`.
pub fn kernel_k(z: Complex64, xi: f64, alpha: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    if distance_to_pole_column(z, 0.0) < POLE_EPS || distance_to_pole_column(z, alpha.ln()) < POLE_EPS {
        return Err(Error::Pole { at: z });
    }
    Ok(kernel_unchecked(z, xi, alpha))
}

/// The two kernel poles inside the strip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPole {
    AtIPi,
    AtIPiPlusLnAlpha,
}

impl KernelPole {
    pub fn location(&self, alpha: f64) -> Complex64 {
        match self {
            KernelPole::AtIPi => Complex64::new(0.0, PI),
            KernelPole::AtIPiPlusLnAlpha => Complex64::new(alpha.ln(), PI),
        }
    }
}

/// Residue `(1 / 2 pi i) ∮ f` over the circle of `radius` around `center`
/// by the `n`-point trapezoid rule, which converges geometrically for
/// functions analytic on an annulus around the circle.
pub fn circle_residue<F>(f: F, center: Complex64, radius: f64, n: usize) -> Complex64
where
    F: Fn(Complex64) -> Complex64,
{
    let n = n.max(8);
    let sum = (0..n).fold(Complex64::new(0.0, 0.0), |acc, j| {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        acc + f(center + radius * w) * w
    });
    sum * radius / n as f64
}

/// Heuristic singularity probe: an analytic `g` looks the same on two small
/// rings around `at`, a pole of order `m` grows by `10^m` between them.
fn looks_singular<G>(g: &G, at: Complex64) -> bool
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    let ring_max = |r: f64| {
        (0..8)
            .map(|j| g(at + Complex64::from_polar(r, PI * j as f64 / 4.0 + 0.3)).norm())
            .fold(0.0f64, |m, v| if v.is_finite() { m.max(v) } else { f64::INFINITY })
    };
    let inner = ring_max(1e-4);
    let outer = ring_max(1e-3);
    !inner.is_finite() || inner > 5.0 * outer + 1e-300
}

/// Closed-form residue of `k g` at a kernel pole where `g` is analytic:
/// `e^{-xi pi} g(i pi) / (alpha - 1)` and
/// `e^{-xi pi} e^{i xi ln alpha} g(i pi + ln alpha) / (1 - alpha)`.
pub fn residue_kernel_pole<G>(which: KernelPole, xi: f64, alpha: f64, g_strip: &G) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    check_alpha(alpha)?;
    if (alpha - 1.0).abs() <= ALPHA_GUARD {
        return Err(Error::domain(format!(
            "alpha = {alpha} too close to 1; kernel poles merge"
        )));
    }
    let at = which.location(alpha);
    if looks_singular(g_strip, at) {
        return Err(Error::MergedPole { at });
    }
    let g = g_strip(at);
    let decay = (-xi * PI).exp();
    Ok(match which {
        KernelPole::AtIPi => decay * g / (alpha - 1.0),
        KernelPole::AtIPiPlusLnAlpha => decay * Complex64::from_polar(1.0, xi * alpha.ln()) * g / (1.0 - alpha),
    })
}

/// Kernel poles near the strip plus the supplied extra singularities,
/// excluding anything at `center` itself.
fn nearest_other_singularity(center: Complex64, alpha: f64, extra: &[Complex64]) -> Option<(Complex64, f64)> {
    let ln_alpha = alpha.ln();
    let kernel = (-2..=2).flat_map(|k| {
        let y = PI * (2 * k + 1) as f64;
        [Complex64::new(0.0, y), Complex64::new(ln_alpha, y)]
    });
    kernel
        .chain(extra.iter().copied())
        .map(|p| (p, (p - center).norm()))
        .filter(|&(_, d)| d > 1e-9)
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

fn circle_points_for(order: u32) -> usize {
    128 * (order.max(1) as usize + 1)
}

/// Residue of `k g` at `center` by small-circle quadrature. `order` is the
/// combined pole order there; `extra` lists singularities of `g` other than
/// `center`.
fn numeric_residue<G>(
    center: Complex64,
    xi: f64,
    alpha: f64,
    g_strip: &G,
    order: u32,
    extra: &[Complex64],
    radius: Option<f64>,
) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    check_alpha(alpha)?;
    if order < 1 {
        return Err(Error::domain("pole order must be at least 1"));
    }
    let nearest = nearest_other_singularity(center, alpha, extra);
    let r = match (radius, nearest) {
        (Some(r), Some((p, d))) if r >= d => return Err(Error::RadiusTooLarge { radius: r, nearest: p }),
        (Some(r), _) => r,
        (None, Some((_, d))) => (0.5 * d).min(MAX_CIRCLE_RADIUS),
        (None, None) => MAX_CIRCLE_RADIUS,
    };
    if !(r > 0.0) {
        return Err(Error::domain(format!("circle radius must be positive, got {r}")));
    }
    Ok(circle_residue(
        |z| kernel_unchecked(z, xi, alpha) * g_strip(z),
        center,
        r,
        circle_points_for(order),
    ))
}

/// Residue of `k g` at a point of the line `Im z = pi`, where a pole of `g`
/// may coincide with a kernel pole. Computed by small-circle quadrature with
/// radius half the distance to the nearest other singularity (at most
/// [`MAX_CIRCLE_RADIUS`]) unless `radius` is given.
pub fn residue_merged<G>(
    pole: Complex64,
    xi: f64,
    alpha: f64,
    g_strip: &G,
    order: u32,
    extra: &[Complex64],
    radius: Option<f64>,
) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    if (pole.im - PI).abs() > 1e-9 {
        return Err(Error::domain(format!("merged residues live on Im z = pi, got {pole}")));
    }
    numeric_residue(pole, xi, alpha, g_strip, order, extra, radius)
}

/// Closed-form residue of `k g` at a simple pole `beta` of `g` inside the
/// open strip:
/// `e^{i xi beta} e^{-beta} coeff / ((1 + e^{-beta})(1 + alpha e^{-beta}))`.
pub fn residue_strip_pole(s: &StripSingularity, xi: f64, alpha: f64) -> Result<Complex64> {
    s.validate()?;
    check_alpha(alpha)?;
    if s.order != 1 {
        return Err(Error::UnsupportedOrder(s.order));
    }
    if s.on_boundary_line() {
        return Err(Error::domain(format!(
            "pole {} lies on Im z = pi; use residue_merged",
            s.beta
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let e = (-s.beta).exp();
    let phase = (Complex64::i() * xi * s.beta).exp();
    Ok(phase * e * s.coeff / ((one + e) * (one + alpha * e)))
}

/// Residue at a strip pole of any order by small-circle quadrature.
pub fn residue_strip_pole_numeric<G>(
    s: &StripSingularity,
    xi: f64,
    alpha: f64,
    g_strip: &G,
    others: &[StripSingularity],
) -> Result<Complex64>
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    s.validate()?;
    let extra: Vec<Complex64> = others.iter().map(|o| o.beta).collect();
    numeric_residue(s.beta, xi, alpha, g_strip, s.order, &extra, None)
}

/// Edge integrals and residues of one contour check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourReport {
    /// Bottom, right, top and left edges in counter-clockwise order.
    pub edges: [Complex64; 4],
    pub contour_integral: Complex64,
    pub residue_sum: Complex64,
    pub residual: f64,
    /// `|I_2| + |I_4|`, the part that vanishes as the half width grows.
    pub side_edge_magnitude: f64,
    /// `|I_3|`, the shifted line carrying the `e^{-xi height}` decay.
    pub top_edge_magnitude: f64,
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = ((p - a) * d.conj()).re / d.norm_sqr();
    let q = a + d * t.clamp(0.0, 1.0);
    (p - q).norm()
}

fn kernel_poles_near(alpha: f64, height: f64) -> Vec<Complex64> {
    let ln_alpha = alpha.ln();
    (-1..=1)
        .flat_map(|k| {
            let y = PI * (2 * k + 1) as f64;
            [Complex64::new(0.0, y), Complex64::new(ln_alpha, y)]
        })
        .filter(|p| p.im > -1.0 && p.im < height + 1.0)
        .collect()
}

/// `|∮ k g - 2 pi i Σ Res|` over the rectangle of `spec`.
pub fn contour_identity_check<G>(
    g_strip: &G,
    xi: f64,
    alpha: f64,
    spec: &ContourSpec,
    sing: &[StripSingularity],
    tol: &QuadTolerance,
) -> Result<f64>
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    contour_identity_report(g_strip, xi, alpha, spec, sing, tol).map(|r| r.residual)
}

pub fn contour_identity_report<G>(
    g_strip: &G,
    xi: f64,
    alpha: f64,
    spec: &ContourSpec,
    sing: &[StripSingularity],
    tol: &QuadTolerance,
) -> Result<ContourReport>
where
    G: Fn(Complex64) -> Complex64 + ?Sized,
{
    spec.validate_for_alpha(alpha)?;
    for s in sing {
        s.validate()?;
    }
    if (alpha - 1.0).abs() <= ALPHA_GUARD {
        return Err(Error::domain(format!(
            "alpha = {alpha} too close to 1; kernel poles merge"
        )));
    }
    let (r, b) = (spec.half_width, spec.height);
    let corners = [
        Complex64::new(-r, 0.0),
        Complex64::new(r, 0.0),
        Complex64::new(r, b),
        Complex64::new(-r, b),
    ];
    let kernel_poles = kernel_poles_near(alpha, b);
    for p in kernel_poles.iter().copied().chain(sing.iter().map(|s| s.beta)) {
        for j in 0..4 {
            if segment_distance(p, corners[j], corners[(j + 1) % 4]) < CONTOUR_GUARD {
                return Err(Error::PoleOnContour { at: p });
            }
        }
    }

    let f = |z: Complex64| kernel_unchecked(z, xi, alpha) * g_strip(z);
    let i = Complex64::i();
    let bottom = integrate_truncated(|u| f(Complex64::new(u, 0.0)), r, tol)?;
    let right = i * integrate_adaptive(|y| f(Complex64::new(r, y)), 0.0, b, tol)?;
    let top = -integrate_truncated(|u| f(Complex64::new(u, b)), r, tol)?;
    let left = -i * integrate_adaptive(|y| f(Complex64::new(-r, y)), 0.0, b, tol)?;
    let edges = [bottom, right, top, left];
    let contour_integral = edges.iter().sum::<Complex64>();

    let inside = |p: Complex64| p.im > 0.0 && p.im < b && p.re.abs() < r;
    let all_betas: Vec<Complex64> = sing.iter().map(|s| s.beta).collect();
    let mut residue_sum = Complex64::new(0.0, 0.0);
    let mut merged_with_kernel = vec![false; sing.len()];
    for which in [KernelPole::AtIPi, KernelPole::AtIPiPlusLnAlpha] {
        let at = which.location(alpha);
        if !inside(at) {
            continue;
        }
        match sing.iter().position(|s| (s.beta - at).norm() < 1e-9) {
            Some(j) => {
                merged_with_kernel[j] = true;
                let extra: Vec<Complex64> = all_betas.iter().copied().filter(|p| (p - at).norm() > 1e-9).collect();
                residue_sum += residue_merged(at, xi, alpha, g_strip, sing[j].order + 1, &extra, None)?;
            }
            None => residue_sum += residue_kernel_pole(which, xi, alpha, g_strip)?,
        }
    }
    for (j, s) in sing.iter().enumerate() {
        if merged_with_kernel[j] || !inside(s.beta) {
            continue;
        }
        let others: Vec<StripSingularity> = sing
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != j)
            .map(|(_, o)| *o)
            .collect();
        residue_sum += if s.order == 1 && !s.on_boundary_line() {
            residue_strip_pole(s, xi, alpha)?
        } else {
            residue_strip_pole_numeric(s, xi, alpha, g_strip, &others)?
        };
    }
    let residue_term = 2.0 * PI * i * residue_sum;
    Ok(ContourReport {
        edges,
        contour_integral,
        residue_sum,
        residual: (contour_integral - residue_term).norm(),
        side_edge_magnitude: right.norm() + left.norm(),
        top_edge_magnitude: top.norm(),
    })
}

/// Predicted exponent `p` in `|g_lambda(x)| ~ (1 + lambda)^p`: the largest
/// `(pi - Im beta) / (2 pi)` over strip poles, zero when there are none or
/// all sit on `Im z = pi`.
pub fn predict_growth_exponent(sing: &[StripSingularity]) -> Result<f64> {
    let mut exponent = 0.0f64;
    for s in sing {
        if !(s.beta.im > 0.0 && s.beta.im <= PI + POLE_EPS) {
            return Err(Error::domain(format!("strip pole {} outside 0 < Im z <= pi", s.beta)));
        }
        if !s.on_boundary_line() {
            exponent = exponent.max((PI - s.beta.im) / (2.0 * PI));
        }
    }
    Ok(exponent)
}

/// Residual standard deviation of `ln |g|` above which a fit is flagged.
pub const HIGH_VARIANCE_THRESHOLD: f64 = 0.25;

/// Least-squares line through `(ln(1 + lambda), ln magnitude)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual_std: f64,
    pub high_variance: bool,
}

pub fn fit_growth(samples: &[(f64, f64)]) -> Result<GrowthFit> {
    if samples.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "need at least 4 samples, got {}",
            samples.len()
        )));
    }
    for (index, &(lambda, magnitude)) in samples.iter().enumerate() {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InsufficientData(format!(
                "sample {index} has invalid lambda {lambda}"
            )));
        }
        if !(magnitude > 0.0 && magnitude.is_finite()) {
            return Err(Error::NonPositiveMagnitude {
                index,
                value: magnitude,
            });
        }
    }
    let (min, max) = samples
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(l, _)| (lo.min(l), hi.max(l)));
    if (max / min).log10() < 4.0 - 1e-9 {
        return Err(Error::InsufficientData(format!(
            "lambdas span {:.3} decades, need at least 4",
            (max / min).log10()
        )));
    }

    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|&(l, _)| l.ln_1p()).collect();
    let ys: Vec<f64> = samples.iter().map(|&(_, m)| m.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let residual_std = (sse / (n - 2.0)).sqrt();
    Ok(GrowthFit {
        slope,
        intercept,
        residual_std,
        high_variance: residual_std > HIGH_VARIANCE_THRESHOLD,
    })
}

/// Slope of `ln magnitude` against `ln(1 + lambda)`.
pub fn fit_growth_exponent(samples: &[(f64, f64)]) -> Result<f64> {
    fit_growth(samples).map(|f| f.slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Bounded,
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub lambda: f64,
    pub magnitude: f64,
}

/// Measured and predicted growth of `|g_lambda(x)|` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub x: f64,
    pub samples: Vec<GrowthSample>,
    pub fitted_exponent: f64,
    pub predicted_exponent: f64,
    pub verdict: Verdict,
    pub residual_std: f64,
    pub high_variance: bool,
}

impl GrowthReport {
    pub fn from_samples(x: f64, samples: Vec<GrowthSample>, sing: &[StripSingularity]) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.lambda, s.magnitude)).collect();
        let fit = fit_growth(&pairs)?;
        let predicted = predict_growth_exponent(sing)?;
        Ok(GrowthReport {
            x,
            samples,
            fitted_exponent: fit.slope,
            predicted_exponent: predicted,
            verdict: if predicted == 0.0 {
                Verdict::Bounded
            } else {
                Verdict::Divergent
            },
            residual_std: fit.residual_std,
            high_variance: fit.high_variance,
        })
    }

    /// Whether the fitted exponent is within `tolerance` of the prediction.
    pub fn agrees(&self, tolerance: f64) -> bool {
        (self.fitted_exponent - self.predicted_exponent).abs() <= tolerance
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn one(_: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0, 1.0), 0.0);
        assert_abs_diff_eq!(phi(3f64.ln(), 1.0), 0.5, epsilon = 1e-15);
        assert_eq!(phi(-2.5, 1.0), -phi(2.5, 1.0));
        let z = Complex64::new(0.3, 0.4);
        let direct = (Complex64::new(1.0, 0.0) - (-z).exp()) / (Complex64::new(1.0, 0.0) + (-z).exp());
        assert_abs_diff_eq!((phi_complex(z, 1.0).unwrap() - direct).norm(), 0.0, epsilon = 1e-15);
        assert!(matches!(
            phi_complex(Complex64::new(0.0, PI), 1.0),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            phi_complex(Complex64::new(0.0, -3.0 * PI), 1.0),
            Err(Error::Pole { .. })
        ));
        assert!(phi_complex(Complex64::new(-800.0, 1.0), 1.0).unwrap().re.is_finite());
    }

    #[test]
    fn phi_inv_examples() {
        assert_eq!(phi_inv(0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(phi_inv(0.5, 1.0).unwrap(), 3f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(phi_inv(phi(-1.7, 2.0), 2.0).unwrap(), -1.7, epsilon = 1e-12);
        assert!(phi_inv(1.0, 1.0).is_err());
        assert!(phi_inv(-1.5, 1.0).is_err());
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_of(3.0, 1.0).unwrap(), 2.0);
        assert_eq!(alpha_of(-3.0, 1.0).unwrap(), 0.5);
        assert_abs_diff_eq!(
            alpha_of(-5.0, 1.0).unwrap(),
            1.0 / alpha_of(5.0, 1.0).unwrap(),
            epsilon = 1e-15
        );
        assert!(alpha_of(0.5, 1.0).is_err());
        assert!(alpha_of(1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_examples() {
        let k0 = kernel_k(Complex64::new(0.0, 0.0), 1.3, 2.0).unwrap();
        assert_abs_diff_eq!(k0.re, 1.0 / 6.0, epsilon = 1e-15);
        for u in [-30.0, -1.0, 0.0, 2.0, 40.0] {
            let k = kernel_k(Complex64::new(u, 0.0), 0.0, 3.0).unwrap();
            assert!(k.re > 0.0 && k.im == 0.0);
            assert_abs_diff_eq!((k - kernel_real(u, 0.0, 3.0)).norm(), 0.0, epsilon = 1e-16);
        }
        let (xi, b) = (0.7, 2.0);
        let base = kernel_k(Complex64::new(0.4, b), 0.0, 2.0).unwrap();
        let damped = kernel_k(Complex64::new(0.4, b), xi, 2.0).unwrap();
        assert_abs_diff_eq!(damped.norm() / base.norm(), (-xi * b).exp(), epsilon = 1e-14);
        assert!(matches!(
            kernel_k(Complex64::new(0.0, PI), 1.0, 2.0),
            Err(Error::Pole { .. })
        ));
        assert!(matches!(
            kernel_k(Complex64::new(2f64.ln(), PI), 1.0, 2.0),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn kernel_stable_far_out() {
        let far = kernel_k(Complex64::new(900.0, 0.5), 1.0, 2.0).unwrap();
        assert!(far.norm() == 0.0 || far.norm().is_finite());
        let near = kernel_k(Complex64::new(-900.0, 0.5), 1.0, 2.0).unwrap();
        assert!(near.norm().is_finite());
    }

    #[test]
    fn kernel_residues_for_constant_signal() {
        let r1 = residue_kernel_pole(KernelPole::AtIPi, 0.0, 2.0, &one).unwrap();
        assert_abs_diff_eq!((r1 - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        let r2 = residue_kernel_pole(KernelPole::AtIPiPlusLnAlpha, 0.0, 2.0, &one).unwrap();
        assert_abs_diff_eq!((r2 - Complex64::new(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert!(residue_kernel_pole(KernelPole::AtIPi, 0.0, 1.0 + 1e-8, &one).is_err());
    }

    #[test]
    fn merged_pole_detected() {
        let g = |z: Complex64| Complex64::new(1.0, 0.0) / (z - Complex64::new(0.0, PI));
        assert!(matches!(
            residue_kernel_pole(KernelPole::AtIPi, 1.0, 2.0, &g),
            Err(Error::MergedPole { .. })
        ));
        assert!(residue_kernel_pole(KernelPole::AtIPiPlusLnAlpha, 1.0, 2.0, &g).is_ok());
    }

    #[test]
    fn merged_degenerates_to_closed_form() {
        for (xi, alpha) in [(0.0, 2.0), (1.0, 2.0), (2.5, 0.3)] {
            let closed = residue_kernel_pole(KernelPole::AtIPi, xi, alpha, &one).unwrap();
            let merged = residue_merged(Complex64::new(0.0, PI), xi, alpha, &one, 1, &[], None).unwrap();
            assert_abs_diff_eq!((closed - merged).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn merged_radius_guard() {
        let r = residue_merged(Complex64::new(0.0, PI), 1.0, 2.0, &one, 1, &[], Some(0.8));
        assert!(matches!(r, Err(Error::RadiusTooLarge { .. })));
        let r = residue_merged(Complex64::new(0.0, 2.0), 1.0, 2.0, &one, 1, &[], None);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn strip_residue_direct_substitution() {
        let beta = Complex64::new(0.0, PI / 2.0);
        let s = StripSingularity::new(beta, 1, Complex64::new(1.0, 0.0)).unwrap();
        let r = residue_strip_pole(&s, 0.0, 2.0).unwrap();
        // e^{-beta} = -i, so the value is -i / ((1 - i)(1 - 2i)) = (3 + i) / 10.
        assert_abs_diff_eq!((r - Complex64::new(0.3, 0.1)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn strip_residue_matches_circle() {
        let beta = Complex64::new(0.4, 1.1);
        let coeff = Complex64::new(0.5, -2.0);
        let g = move |z: Complex64| coeff / (z - beta) + Complex64::new(0.3, 0.0) * z;
        let s = StripSingularity::new(beta, 1, coeff).unwrap();
        for (xi, alpha) in [(0.5, 2.0), (2.0, 0.4)] {
            let closed = residue_strip_pole(&s, xi, alpha).unwrap();
            let numeric = residue_strip_pole_numeric(&s, xi, alpha, &g, &[]).unwrap();
            assert_abs_diff_eq!((closed - numeric).norm(), 0.0, epsilon = 1e-12);
        }
        let double = StripSingularity::new(beta, 2, coeff).unwrap();
        assert!(matches!(
            residue_strip_pole(&double, 1.0, 2.0),
            Err(Error::UnsupportedOrder(2))
        ));
    }

    #[test]
    fn strip_singularity_validation() {
        assert!(StripSingularity::new(Complex64::new(0.0, 0.0), 1, Complex64::new(1.0, 0.0)).is_err());
        assert!(StripSingularity::new(Complex64::new(0.0, 3.5), 1, Complex64::new(1.0, 0.0)).is_err());
        assert!(StripSingularity::new(Complex64::new(0.0, 1.0), 0, Complex64::new(1.0, 0.0)).is_err());
        assert!(StripSingularity::new(Complex64::new(0.0, 1.0), 1, Complex64::new(0.0, 0.0)).is_err());
        assert!(StripSingularity::new(Complex64::new(0.0, PI), 1, Complex64::new(1.0, 0.0)).is_ok());
    }

    #[test]
    fn contour_spec_validation() {
        assert!(ContourSpec::new(20.0, PI).is_err());
        assert!(ContourSpec::new(20.0, 1.6 * PI).is_err());
        assert!(ContourSpec::new(0.0, 1.2 * PI).is_err());
        let spec = ContourSpec::with_default_height(1.0).unwrap();
        assert!(spec.validate_for_alpha(2.0).is_err());
        assert!(ContourSpec::with_default_height(20.0)
            .unwrap()
            .validate_for_alpha(2.0)
            .is_ok());
    }

    #[test]
    fn contour_identity_for_constant_signal() {
        let tol = QuadTolerance::default();
        let spec = ContourSpec::with_default_height(20.0).unwrap();
        let residual = contour_identity_check(&one, 1.0, 2.0, &spec, &[], &tol).unwrap();
        assert!(residual < 1e-6, "residual {residual}");
        let short = ContourSpec::with_default_height(10.0).unwrap();
        let near = contour_identity_report(&one, 1.0, 2.0, &short, &[], &tol).unwrap();
        let far = contour_identity_report(&one, 1.0, 2.0, &spec, &[], &tol).unwrap();
        assert!(near.residual < 1e-6);
        assert!(far.side_edge_magnitude < near.side_edge_magnitude);
        assert!(far.side_edge_magnitude < 1e-7);
    }

    #[test]
    fn contour_rejects_pole_on_edge() {
        let beta = Complex64::new(0.0, 0.5);
        let s = StripSingularity::new(beta, 1, Complex64::new(1.0, 0.0)).unwrap();
        let g = move |z: Complex64| Complex64::new(1.0, 0.0) / (z - beta);
        let spec = ContourSpec::new(20.0, 1.5 * PI).unwrap();
        assert!(contour_identity_check(&g, 1.0, 2.0, &spec, &[s], &QuadTolerance::default()).is_ok());
        // Move the pole onto the right edge.
        let edge = StripSingularity::new(Complex64::new(20.0, 0.5), 1, Complex64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            contour_identity_check(&g, 1.0, 2.0, &spec, &[edge], &QuadTolerance::default()),
            Err(Error::PoleOnContour { .. })
        ));
    }

    #[test]
    fn growth_prediction_examples() {
        assert_eq!(predict_growth_exponent(&[]).unwrap(), 0.0);
        let half = StripSingularity::new(Complex64::new(0.0, PI / 2.0), 1, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(predict_growth_exponent(&[half]).unwrap(), 0.25, epsilon = 1e-15);
        let three_quarter = StripSingularity::new(Complex64::new(0.0, 0.75 * PI), 1, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(
            predict_growth_exponent(&[three_quarter, half]).unwrap(),
            0.25,
            epsilon = 1e-15
        );
        let top = StripSingularity::new(Complex64::new(0.0, PI), 1, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(predict_growth_exponent(&[top]).unwrap(), 0.0);
        let bad = StripSingularity {
            beta: Complex64::new(0.0, -1.0),
            order: 1,
            coeff: Complex64::new(1.0, 0.0),
        };
        assert!(predict_growth_exponent(&[bad]).is_err());
    }

    fn grid() -> Vec<f64> {
        (1..=8).map(|k| 10f64.powi(k)).collect()
    }

    #[test]
    fn fit_examples() {
        let exact: Vec<(f64, f64)> = grid().into_iter().map(|l| (l, (1.0 + l).powf(0.25))).collect();
        assert_abs_diff_eq!(fit_growth_exponent(&exact).unwrap(), 0.25, epsilon = 1e-12);
        let flat: Vec<(f64, f64)> = grid().into_iter().map(|l| (l, 3.0)).collect();
        assert_abs_diff_eq!(fit_growth_exponent(&flat).unwrap(), 0.0, epsilon = 1e-14);
        let wobbly: Vec<(f64, f64)> = grid()
            .into_iter()
            .map(|l| (l, (1.0 + l).powf(0.25) * (1.0 + 0.3 * l.ln_1p().sin())))
            .collect();
        assert!((fit_growth_exponent(&wobbly).unwrap() - 0.25).abs() < 0.05);
    }

    #[test]
    fn fit_errors() {
        let few: Vec<(f64, f64)> = grid().into_iter().take(3).map(|l| (l, 1.0)).collect();
        assert!(matches!(fit_growth_exponent(&few), Err(Error::InsufficientData(_))));
        let narrow: Vec<(f64, f64)> = (0..6).map(|k| (10.0 + k as f64, 1.0)).collect();
        assert!(matches!(fit_growth_exponent(&narrow), Err(Error::InsufficientData(_))));
        let mut zero: Vec<(f64, f64)> = grid().into_iter().map(|l| (l, 1.0)).collect();
        zero[2].1 = 0.0;
        assert!(matches!(
            fit_growth_exponent(&zero),
            Err(Error::NonPositiveMagnitude { index: 2, .. })
        ));
    }

    #[test]
    fn report_verdict_follows_prediction() {
        let samples: Vec<GrowthSample> = grid()
            .into_iter()
            .map(|l| GrowthSample {
                lambda: l,
                magnitude: 1.0,
            })
            .collect();
        let r = GrowthReport::from_samples(2.0, samples.clone(), &[]).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded);
        assert!(r.agrees(0.05));
        let half = StripSingularity::new(Complex64::new(0.0, PI / 2.0), 1, Complex64::new(1.0, 0.0)).unwrap();
        let r = GrowthReport::from_samples(2.0, samples, &[half]).unwrap();
        assert_eq!(r.verdict, Verdict::Divergent);
        assert!(!r.agrees(0.05));
    }
}
