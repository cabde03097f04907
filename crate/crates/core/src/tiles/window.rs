//! The base window `φ = g²`, where `ĝ(ξ) = Π_j b(ξ_j/a)` with
//! `b(t) = exp(−s/(1 − t²))` on `(−1, 1)`, `a = 9/32`, `s = 4`.
//!
//! `φ ≥ 0` and `φ̂ = ĝ ⋆ ĝ` is supported in `[−9/16, 9/16]^d`. The
//! one-dimensional factor of `φ̂` is tabulated once by trapezoid quadrature
//! and read back with cubic interpolation; it is scaled so `‖φ‖₂ = 1`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::grid::{GridFunction, GridSpec};

/// Half-width of the support of `ĝ` per axis.
pub const BUMP_HALF_WIDTH: f64 = 9.0 / 32.0;
/// Half-width of the support of `φ̂` per axis.
pub const SUPPORT: f64 = 9.0 / 16.0;
const STEEPNESS: f64 = 4.0;
const TABLE_INTERVALS: usize = 16384;
const QUAD_NODES: usize = 512;

pub struct Window {
    step: f64,
    /// Values of the normalized factor at `i·step`, `i = 0..=TABLE_INTERVALS`.
    table: Vec<f64>,
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-STEEPNESS / (1.0 - t * t)).exp()
    }
}

/// `∫ b(η/a) b((η − t)/a) dη` by the trapezoid rule with `nodes` panels.
pub(crate) fn autocorrelation(t: f64, nodes: usize) -> f64 {
    let a = BUMP_HALF_WIDTH;
    let t = t.abs();
    if t >= 2.0 * a {
        return 0.0;
    }
    let (lo, hi) = (t - a, a);
    let dx = (hi - lo) / nodes as f64;
    // The integrand vanishes to all orders at both ends.
    (1..nodes)
        .map(|i| {
            let eta = lo + i as f64 * dx;
            bump(eta / a) * bump((eta - t) / a)
        })
        .sum::<f64>()
        * dx
}

impl Window {
    fn build() -> Self {
        let step = SUPPORT / TABLE_INTERVALS as f64;
        let raw: Vec<f64> = (0..=TABLE_INTERVALS).map(|i| autocorrelation(i as f64 * step, QUAD_NODES)).collect();
        // ∫ φ̂₁² over the line, by the trapezoid rule on the even extension.
        let energy = 2.0 * raw.iter().skip(1).map(|v| v * v).sum::<f64>() * step + raw[0] * raw[0] * step;
        let scale = 1.0 / energy.sqrt();
        Self { step, table: raw.into_iter().map(|v| v * scale).collect() }
    }

    fn node(&self, i: i64) -> f64 {
        let i = i.unsigned_abs() as usize;
        self.table.get(i).copied().unwrap_or(0.0)
    }

    /// The normalized one-dimensional factor of `φ̂`.
    pub fn hat1(&self, t: f64) -> f64 {
        let t = t.abs();
        if t >= SUPPORT {
            return 0.0;
        }
        let x = t / self.step;
        let i = x.floor() as i64;
        let u = x - i as f64;
        let (p0, p1, p2, p3) = (self.node(i - 1), self.node(i), self.node(i + 1), self.node(i + 2));
        // Cubic Lagrange interpolation through nodes i−1..i+2.
        let w0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let w1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let w2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let w3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        w0 * p0 + w1 * p1 + w2 * p2 + w3 * p3
    }

    /// `φ̂` at a point of `R^d`.
    pub fn hat(&self, xi: &[f64]) -> f64 {
        xi.iter().map(|&t| self.hat1(t)).product()
    }

    /// Samples of `φ` (periodized) on a grid.
    pub fn sample(&self, spec: &GridSpec) -> GridFunction {
        let d = spec.dim();
        let mut s = crate::grid::Spectrum::zeros(*spec);
        for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
            *c = Complex64::new(self.hat(&spec.frequency(i)[..d]), 0.0);
        }
        s.inverse()
    }
}

/// The shared window.
pub fn window() -> &'static Window {
    static W: OnceLock<Window> = OnceLock::new();
    W.get_or_init(Window::build)
}
