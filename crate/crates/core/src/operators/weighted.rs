use num_complex::Complex64;

use super::{maximal, sharp_restrict, square_function, MaximalSpec, MultiplierProfile};
use crate::decompose::{well_rect, DEFAULT_K_MAX};
use crate::error::{LabError, Result};
use crate::geometry::{Direction, Interval, Parallelepiped};
use crate::grid::GridFunction;

/// Both sides of the one-dimensional weighted square-function inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedCheck {
    /// `∫ |S_ω f|² g`
    pub lhs: f64,
    /// `∫ |S^{Well(ω)} f|² (M g^{1+ε})^{1/(1+ε)}`
    pub rhs: f64,
}

impl WeightedCheck {
    /// `lhs / rhs`, or zero when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.lhs == 0.0 && self.rhs == 0.0 {
            0.0
        } else {
            self.lhs / self.rhs
        }
    }
}

/// Default lengths for the weight's maximal function: one sub-cell length
/// (so `M g ≥ g`) and the dyadic multiples of the grid step up to `L/2`.
fn default_lengths(h: f64, period: f64) -> Vec<f64> {
    let mut out = vec![0.25 * h];
    let mut e = h;
    while e <= 0.5 * period {
        out.push(e);
        e *= 2.0;
    }
    out
}

/// [`weighted_check_with`] with the default truncation depth and the
/// dyadic segment maximal function.
pub fn weighted_check(f: &GridFunction, g: &GridFunction, omega: &Interval, eps: f64) -> Result<WeightedCheck> {
    let spec = f.spec();
    let m = MaximalSpec::segment(vec![Direction::basis(1, 0)], default_lengths(spec.spacing(), spec.period()))?;
    weighted_check_with(f, g, omega, eps, DEFAULT_K_MAX, &m)
}

pub fn weighted_check_with(
    f: &GridFunction,
    g: &GridFunction,
    omega: &Interval,
    eps: f64,
    k_max: usize,
    maximal_spec: &MaximalSpec,
) -> Result<WeightedCheck> {
    if f.spec().dim() != 1 {
        return Err(LabError::Dimension { expected: 1, got: f.spec().dim() });
    }
    if !(eps > 0.0) {
        return Err(LabError::Parameter(format!("ε = {eps} must be positive")));
    }
    if f.spec() != g.spec() {
        return Err(LabError::Shape("f and g live on different grids".into()));
    }
    if g.samples().iter().any(|z| z.re < 0.0 || z.im != 0.0) {
        return Err(LabError::Precondition("weight g must be real and nonnegative".into()));
    }
    let w = f.spec().cell_volume();
    let parent = Parallelepiped::axis_aligned(&[(omega.lo, omega.hi)])?;
    let restricted = sharp_restrict(f, &parent)?;
    let lhs: f64 = restricted.samples().iter().zip(g.samples()).map(|(s, gv)| s.norm_sqr() * gv.re).sum::<f64>() * w;

    let well = well_rect(&parent, k_max)?;
    let sq = square_function(f, &well, MultiplierProfile::sharp())?;
    let p = 1.0 + eps;
    let gp = g.map(|z| Complex64::new(z.re.powf(p), 0.0));
    let mg = maximal(&gp, maximal_spec)?;
    let rhs: f64 = sq
        .samples()
        .iter()
        .zip(mg.samples())
        .map(|(s, m)| s.re * s.re * m.re.powf(1.0 / p))
        .sum::<f64>()
        * w;
    Ok(WeightedCheck { lhs, rhs })
}
