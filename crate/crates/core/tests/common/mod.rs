//! Independent oracles for the integration tests: adaptive Gauss-Legendre
//! quadrature with nodes computed by Newton iteration, and trapezoidal
//! circle integrals. Nothing here calls into the crate's quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for k in 0..n {
            let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        GaussLegendre { nodes, weights }
    }

    pub fn panel<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64) -> Complex64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(c + h * x))
            .sum::<Complex64>()
            * h
    }

    /// Recursive bisection until a panel agrees with its two halves to
    /// `tol`, or to a few ulps of the panel value.
    pub fn adaptive<F: Fn(f64) -> Complex64>(&self, f: &F, a: f64, b: f64, tol: f64) -> Complex64 {
        let whole = self.panel(f, a, b);
        self.refine(f, a, b, whole, tol, 0)
    }

    fn refine<F: Fn(f64) -> Complex64>(
        &self,
        f: &F,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let m = 0.5 * (a + b);
        let left = self.panel(f, a, m);
        let right = self.panel(f, m, b);
        let diff = (left + right - whole).norm();
        if diff <= tol || diff <= 1e-15 * whole.norm() || depth >= 40 {
            return left + right;
        }
        self.refine(f, a, m, left, tol, depth + 1) + self.refine(f, m, b, right, tol, depth + 1)
    }
}

/// `(1 / 2 pi i) ∮ f` over the circle of `radius` around `center`, by the
/// trapezoidal rule in the angle.
pub fn circle_residue<F: Fn(Complex64) -> Complex64>(f: F, center: Complex64, radius: f64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        acc += f(center + radius * e) * radius * e;
    }
    acc / n as f64
}

/// `e^{i xi z} e^z / ((e^z + 1)(e^z + alpha))` written directly.
pub fn kernel(z: Complex64, xi: f64, alpha: f64) -> Complex64 {
    let e = z.exp();
    (Complex64::i() * xi * z).exp() * e / ((e + 1.0) * (e + alpha))
}

/// Least-squares slope of `ln m` against `ln(1 + lambda)`.
pub fn loglog_slope(samples: &[(f64, f64)]) -> f64 {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|(l, _)| l.ln_1p()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, m)| m.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
