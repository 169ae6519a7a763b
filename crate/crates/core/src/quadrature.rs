//! Adaptive Gauss-Kronrod quadrature for complex-valued integrands of a real
//! variable.
//!
//! Every routine bisects panels globally (largest error first) and estimates
//! the error of a panel from the embedded 7-point Gauss rule inside the
//! 15-point Kronrod rule. Real and imaginary parts share the same panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kronrod abscissae on [-1, 1], non-negative half, descending. Odd indices
/// are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

/// Gauss weights matching XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Error targets and work budget for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadTolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadTolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let tol = QuadTolerance {
            abs_tol,
            rel_tol,
            max_subdivisions,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidTolerance(format!(
                "abs_tol must be positive, got {}",
                self.abs_tol
            )));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidTolerance(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidTolerance("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }

    /// Error target for an integral of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value)
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }
}

impl Default for QuadTolerance {
    fn default() -> Self {
        QuadTolerance {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 5000,
        }
    }
}

/// Growth certificate for an integrand on the real line: `|f(u)|` is bounded
/// by `bound * exp((delta - 1) |u|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub delta: f64,
    pub bound: f64,
}

impl DecayCertificate {
    pub fn new(delta: f64, bound: f64) -> Result<Self> {
        let cert = DecayCertificate { delta, bound };
        cert.validate()?;
        Ok(cert)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidCertificate(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(Error::InvalidCertificate(format!(
                "bound must be positive and finite, got {}",
                self.bound
            )));
        }
        Ok(())
    }

    /// Same growth rate with the bound multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        DecayCertificate::new(self.delta, self.bound * factor)
    }

    /// Smallest `U` with `bound * exp((delta - 1) U) / (1 - delta) < abs_tol / 2`,
    /// so that both tails together stay below `abs_tol`.
    pub fn truncation_radius(&self, abs_tol: f64) -> f64 {
        let rate = 1.0 - self.delta;
        let u = (2.0 * self.bound / (rate * abs_tol)).ln() / rate;
        u.max(1.0)
    }

    /// Bound on the mass of one tail beyond `radius`.
    pub fn tail_bound(&self, radius: f64) -> f64 {
        let rate = 1.0 - self.delta;
        self.bound * (-rate * radius).exp() / rate
    }
}

/// Result of an adaptive integration together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub subdivisions: usize,
}

struct Panel {
    lo: f64,
    hi: f64,
    value: Complex64,
    error: f64,
    abs_mass: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn finite_or_err(v: Complex64, at: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { at })
    }
}

/// One application of the 7/15 pair on `[lo, hi]`.
fn gauss_kronrod<F>(f: &F, lo: f64, hi: f64) -> Result<Panel>
where
    F: Fn(f64) -> Complex64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);

    let fc = finite_or_err(f(center), center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_mass = fc.norm() * WGK[7];

    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let (l, r) = (center - dx, center + dx);
        let fl = finite_or_err(f(l), l)?;
        let fr = finite_or_err(f(r), r)?;
        let sum = fl + fr;
        kronrod += sum * wk;
        abs_mass += (fl.norm() + fr.norm()) * wk;
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }

    let scale = half.abs();
    Ok(Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).norm(),
        abs_mass: abs_mass * scale,
    })
}

/// Adaptive integration over the partition given by sorted `breakpoints`.
///
/// The integrand is never evaluated at a breakpoint, which makes this the
/// entry point for integrands with removable or integrable trouble at known
/// locations.
pub fn adaptive_estimate<F>(f: F, breakpoints: &[f64], tol: &QuadTolerance) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    tol.validate()?;
    if breakpoints.len() < 2 {
        return Err(Error::domain("need at least two breakpoints"));
    }
    for w in breakpoints.windows(2) {
        if !(w[0] < w[1]) || !w[0].is_finite() || !w[1].is_finite() {
            return Err(Error::domain(format!(
                "breakpoints must be finite and strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }

    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    for w in breakpoints.windows(2) {
        heap.push(gauss_kronrod(&f, w[0], w[1])?);
    }

    let mut subdivisions = 0usize;
    loop {
        let (value, error, mass) = heap
            .iter()
            .chain(frozen.iter())
            .fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |acc, p| {
                (acc.0 + p.value, acc.1 + p.error, acc.2 + p.abs_mass)
            });
        let target = tol.target(value.norm());
        let roundoff = 50.0 * f64::EPSILON * mass;
        if error <= target.max(roundoff) {
            return Ok(Estimate {
                value: ordered_sum(heap.into_iter().chain(frozen)),
                error,
                subdivisions,
            });
        }
        if subdivisions >= tol.max_subdivisions {
            return Err(Error::NonConvergence {
                error,
                target,
                subdivisions,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::NonConvergence {
                error,
                target,
                subdivisions,
            });
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            frozen.push(worst);
            continue;
        }
        heap.push(gauss_kronrod(&f, worst.lo, mid)?);
        heap.push(gauss_kronrod(&f, mid, worst.hi)?);
        subdivisions += 1;
    }
}

/// Sum panel values left to right so the result does not depend on heap
/// layout.
fn ordered_sum(panels: impl Iterator<Item = Panel>) -> Complex64 {
    let mut panels: Vec<Panel> = panels.collect();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    panels.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.value)
}

/// Integrate `f` over `[lo, hi]`.
pub fn integrate_adaptive<F>(f: F, lo: f64, hi: f64, tol: &QuadTolerance) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "integration bounds must satisfy lo < hi, got ({lo}, {hi})"
        )));
    }
    adaptive_estimate(f, &[lo, hi], tol).map(|e| e.value)
}

/// Relative distance from the endpoints below which a principal value point
/// is rejected.
pub const PV_ENDPOINT_GUARD: f64 = 1e-6;

/// Principal value of `∫ w(t) / (x - t) dt` over `[lo, hi]`.
///
/// Subtracts `w(x)` so the remaining integrand is bounded, and adds back the
/// exact principal value `w(x) ln((x - lo) / (hi - x))`. The smooth part is
/// split at `x` so the difference quotient is never evaluated there.
pub fn pv_integrate<F>(w: F, lo: f64, hi: f64, x: f64, tol: &QuadTolerance) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(lo < hi) {
        return Err(Error::domain(format!(
            "integration bounds must satisfy lo < hi, got ({lo}, {hi})"
        )));
    }
    if !(lo < x && x < hi) {
        return Err(Error::domain(format!(
            "principal value point {x} must lie inside ({lo}, {hi})"
        )));
    }
    let guard = PV_ENDPOINT_GUARD * (hi - lo);
    if (x - lo).min(hi - x) < guard {
        return Err(Error::SingularityAtEndpoint { x, lo, hi });
    }
    let wx = finite_or_err(w(x), x)?;
    let smooth = adaptive_estimate(|t| (w(t) - wx) / (x - t), &[lo, x, hi], tol)?;
    Ok(smooth.value + wx * ((x - lo) / (hi - x)).ln())
}

/// Integrate over the whole real line using the certificate to pick the
/// truncation radius.
pub fn integrate_real_line<F>(f: F, cert: &DecayCertificate, tol: &QuadTolerance) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    cert.validate()?;
    tol.validate()?;
    let radius = cert.truncation_radius(tol.abs_tol);
    integrate_truncated(f, radius, &tol.with_abs_tol(0.5 * tol.abs_tol))
}

/// Integrate over `[-radius, radius]`, starting from unit-width panels so
/// that oscillatory integrands are resolved from the first pass.
pub fn integrate_truncated<F>(f: F, radius: f64, tol: &QuadTolerance) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::domain(format!(
            "truncation radius must be positive and finite, got {radius}"
        )));
    }
    let panels = (2.0 * radius).ceil().max(2.0) as usize;
    let breakpoints: Vec<f64> = (0..=panels)
        .map(|k| -radius + 2.0 * radius * k as f64 / panels as f64)
        .collect();
    let budget = tol.max_subdivisions.max(4 * panels);
    adaptive_estimate(f, &breakpoints, &tol.with_max_subdivisions(budget)).map(|e| e.value)
}
