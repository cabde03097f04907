use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{PassBand, ScalingReport};
use crate::decompose::well_collection;
use crate::error::{LabError, Result};
use crate::geometry::{Direction, Parallelepiped};
use crate::grid::{GridFunction, GridSpec, Spectrum};
use crate::operators::{maximal, square_function, MultiplierProfile};
use crate::tiles::directional_maximal_spec;

/// Function whose coefficients are independent standard complex Gaussians
/// on the lattice frequencies of `⋃Ω` and zero elsewhere. Trial `t` of seed
/// `s` is stream `t` of the ChaCha8 generator seeded with `s`.
pub fn shaped_gaussian(spec: &GridSpec, omegas: &[Parallelepiped], seed: u64, trial: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let d = spec.dim();
    let mut s = Spectrum::zeros(*spec);
    for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
        let xi = spec.frequency(i);
        if omegas.iter().any(|w| w.contains(&xi[..d])) {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *c = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    s.inverse()
}

/// Largest ratios over the trials.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRatio {
    pub trials: usize,
    /// `max ‖S^Ω f‖_q / ‖f‖_q`.
    pub square: f64,
    /// `max ‖S^{Well(Ω)} f‖_q / ‖f‖_q`.
    pub well: f64,
    /// `max ‖M f‖_q / ‖f‖_q` for the segment maximal function along the
    /// axes of `Ω`.
    pub maximal: f64,
}

fn directions_of(omegas: &[Parallelepiped]) -> Vec<Direction> {
    let mut out: Vec<Direction> = Vec::new();
    for w in omegas {
        for a in w.frame.axes() {
            let dup = out.iter().any(|b| {
                let dot: f64 = a.components().iter().zip(b.components()).map(|(x, y)| x * y).sum();
                dot.abs() > 1.0 - 1e-12
            });
            if !dup {
                out.push(a);
            }
        }
    }
    out
}

/// Empirical operator norms over `trials` shaped Gaussian functions; `None`
/// when `trials` is zero. Trials run in parallel and are reduced by maximum.
pub fn norm_ratio_run(omegas: &[Parallelepiped], q: f64, trials: usize, spec: &GridSpec, seed: u64, k_max: usize) -> Result<Option<NormRatio>> {
    if !(q >= 2.0) {
        return Err(LabError::Parameter(format!("exponent {q} must be at least 2")));
    }
    if trials == 0 {
        return Ok(None);
    }
    if omegas.is_empty() {
        return Err(LabError::Parameter("the family is empty".into()));
    }
    let well = well_collection(omegas, k_max)?.rects;
    let mspec = directional_maximal_spec(spec, directions_of(omegas))?;
    let ratios = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let f = shaped_gaussian(spec, omegas, seed, t);
            let norm = f.lq_norm(q)?;
            if norm == 0.0 {
                return Err(LabError::Resolution("the family holds no lattice frequency".into()));
            }
            let s = square_function(&f, omegas, MultiplierProfile::sharp())?.lq_norm(q)?;
            let w = square_function(&f, &well, MultiplierProfile::sharp())?.lq_norm(q)?;
            let m = maximal(&f, &mspec)?.lq_norm(q)?;
            Ok([s / norm, w / norm, m / norm])
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |k: usize| ratios.iter().map(|r| r[k]).fold(0.0, f64::max);
    Ok(Some(NormRatio { trials, square: max(0), well: max(1), maximal: max(2) }))
}

/// Norm ratios against a parameter of the family, such as its size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRatioReport {
    pub param_name: String,
    pub q: f64,
    pub points: Vec<(f64, NormRatio)>,
}

impl NormRatioReport {
    /// Reports for the square function, its Well refinement and the maximal
    /// proxy. The first carries `square_band`; the others are reported only.
    pub fn reports(&self, square_band: PassBand) -> Vec<ScalingReport> {
        if self.points.is_empty() {
            return Vec::new();
        }
        let q = self.q;
        let series = |f: fn(&NormRatio) -> f64| self.points.iter().map(|(p, r)| (*p, f(r))).collect::<Vec<_>>();
        vec![
            ScalingReport::new(&format!("square_ratio_q{q}"), &self.param_name, series(|r| r.square), square_band),
            ScalingReport::new(&format!("well_ratio_q{q}"), &self.param_name, series(|r| r.well), PassBand::None),
            ScalingReport::new(&format!("maximal_ratio_q{q}"), &self.param_name, series(|r| r.maximal), PassBand::None),
        ]
    }
}
