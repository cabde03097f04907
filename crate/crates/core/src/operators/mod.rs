//! Fourier restriction and smooth multipliers over parallelepipeds, square
//! functions over families of them, directional maximal functions and the
//! weighted square-function check.

mod maximal;
mod weighted;

pub use maximal::{maximal, MaximalMode, MaximalSpec, RectShape};
pub use weighted::{weighted_check, weighted_check_with, WeightedCheck};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::geometry::{Parallelepiped, MAX_DIM};
use crate::grid::{GridFunction, GridSpec, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Sharp,
    Smooth,
}

/// How the multiplier of a parallelepiped `ω` is built: the indicator
/// `1_ω`, or a smooth symbol `m_ω` with `1_ω ≤ m_ω ≤ 1_{2ω}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiplierProfile {
    pub kind: ProfileKind,
}

impl MultiplierProfile {
    pub fn sharp() -> Self {
        Self { kind: ProfileKind::Sharp }
    }

    pub fn smooth() -> Self {
        Self { kind: ProfileKind::Smooth }
    }

    /// Symbol of `ω` at frequency `ξ`.
    pub fn symbol(&self, omega: &Parallelepiped, xi: &[f64]) -> f64 {
        match self.kind {
            ProfileKind::Sharp => {
                if omega.contains(xi) {
                    1.0
                } else {
                    0.0
                }
            }
            ProfileKind::Smooth => smooth_symbol(omega, xi),
        }
    }
}

impl std::str::FromStr for MultiplierProfile {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(Self::sharp()),
            "smooth" => Ok(Self::smooth()),
            _ => Err(LabError::Parameter(format!("unknown profile {s:?}"))),
        }
    }
}

/// `exp(−1/x)` for `x > 0`, zero otherwise.
fn flat(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// The transition profile: 1 on `[0, 1/2]`, 0 on `[1, ∞)`, smooth and
/// decreasing in between.
pub fn transition(t: f64) -> f64 {
    let t = t.abs();
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let a = flat(1.0 - t);
        let b = flat(t - 0.5);
        a / (a + b)
    }
}

/// `Π_j ρ(2·dist(c_j, ω_j)/|ω_j|)` in the frame coordinates `c` of `ξ`.
fn smooth_symbol(omega: &Parallelepiped, xi: &[f64]) -> f64 {
    let c = omega.frame.coords(xi);
    omega
        .sides()
        .iter()
        .zip(c)
        .map(|(s, cj)| transition(2.0 * s.distance(cj) / s.length()))
        .product()
}

/// Lattice points of the spectrum of `spec` that lie in `ω`.
pub fn lattice_mask(omega: &Parallelepiped, spec: &GridSpec) -> Vec<bool> {
    let d = spec.dim();
    (0..spec.len()).map(|i| omega.contains(&spec.frequency(i)[..d])).collect()
}

/// Applies a multiplier with the given symbol.
pub fn apply_multiplier(f: &GridFunction, symbol: impl Fn(&[f64]) -> f64) -> GridFunction {
    let mut s = f.transform();
    s.apply_symbol(symbol);
    s.inverse()
}

fn check_dims(f: &GridFunction, omega: &Parallelepiped) -> Result<()> {
    if omega.dim() != f.spec().dim() {
        return Err(LabError::Dimension { expected: f.spec().dim(), got: omega.dim() });
    }
    Ok(())
}

/// The Fourier restriction `S_ω f`.
pub fn sharp_restrict(f: &GridFunction, omega: &Parallelepiped) -> Result<GridFunction> {
    check_dims(f, omega)?;
    Ok(restrict_spectrum(&f.transform(), omega, MultiplierProfile::sharp()))
}

/// The multiplier operator of the smooth symbol of `ω`.
pub fn smooth_convolve(f: &GridFunction, omega: &Parallelepiped, profile: MultiplierProfile) -> Result<GridFunction> {
    if profile.kind != ProfileKind::Smooth {
        return Err(LabError::Parameter("smooth_convolve needs a smooth profile".into()));
    }
    check_dims(f, omega)?;
    Ok(restrict_spectrum(&f.transform(), omega, profile))
}

fn restrict_spectrum(spectrum: &Spectrum, omega: &Parallelepiped, profile: MultiplierProfile) -> GridFunction {
    let mut s = spectrum.clone();
    s.apply_symbol(|xi| profile.symbol(omega, xi));
    s.inverse()
}

/// Largest number of members of a family claiming one lattice frequency,
/// with a witness frequency and the claimants.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeOverlap {
    pub max_multiplicity: usize,
    pub witness: Option<([i64; MAX_DIM], Vec<usize>)>,
}

impl LatticeOverlap {
    pub fn is_disjoint(&self) -> bool {
        self.max_multiplicity <= 1
    }
}

/// Multiplicity of the family on the lattice, counted through the
/// multiplier supports (`ω` for sharp, the open `2ω` for smooth).
pub fn lattice_overlap(omegas: &[Parallelepiped], spec: &GridSpec, profile: MultiplierProfile) -> LatticeOverlap {
    let d = spec.dim();
    let mut counts = vec![0usize; spec.len()];
    for w in omegas {
        for (i, c) in counts.iter_mut().enumerate() {
            if profile.symbol(w, &spec.frequency(i)[..d]) > 0.0 {
                *c += 1;
            }
        }
    }
    let (best, &max) = counts.iter().enumerate().max_by_key(|(i, c)| (**c, std::cmp::Reverse(*i))).unwrap_or((0, &0));
    let witness = (max > 1).then(|| {
        let xi = spec.frequency(best);
        let who = omegas
            .iter()
            .enumerate()
            .filter(|(_, w)| profile.symbol(w, &xi[..d]) > 0.0)
            .map(|(k, _)| k)
            .collect();
        (spec.mode(best), who)
    });
    LatticeOverlap { max_multiplicity: max, witness }
}

/// `S^Ω f = (Σ_ω |S_ω f|²)^{1/2}`, with `S_ω` the multiplier of `profile`.
///
/// A sharp family must be disjoint on the lattice. The sum runs as a fixed
/// binary tree over `Ω` so the result does not depend on scheduling.
pub fn square_function(f: &GridFunction, omegas: &[Parallelepiped], profile: MultiplierProfile) -> Result<GridFunction> {
    for w in omegas {
        check_dims(f, w)?;
    }
    if profile.kind == ProfileKind::Sharp {
        let overlap = lattice_overlap(omegas, f.spec(), profile);
        if let Some((m, who)) = overlap.witness {
            return Err(LabError::Parameter(format!(
                "sharp family overlaps at lattice point {:?} (members {who:?})",
                &m[..f.spec().dim()]
            )));
        }
    }
    let spectrum = f.transform();
    let sum = tree_sum(omegas, &|w| {
        restrict_spectrum(&spectrum, w, profile).samples().iter().map(|z| z.norm_sqr()).collect()
    })
    .unwrap_or_else(|| vec![0.0; f.spec().len()]);
    GridFunction::new(*f.spec(), sum.into_iter().map(|s| Complex64::new(s.sqrt(), 0.0)).collect())
}

/// Pointwise sum of `term(x)` over `items`, reduced along a fixed binary tree.
pub(crate) fn tree_sum<T: Sync>(items: &[T], term: &(dyn Fn(&T) -> Vec<f64> + Sync)) -> Option<Vec<f64>> {
    match items.len() {
        0 => None,
        1 => Some(term(&items[0])),
        len => {
            let (left, right) = items.split_at(len / 2);
            let (a, b) = rayon::join(|| tree_sum(left, term), || tree_sum(right, term));
            let mut a = a.expect("nonempty half");
            let b = b.expect("nonempty half");
            a.par_iter_mut().zip(b.par_iter()).for_each(|(x, y)| *x += y);
            Some(a)
        }
    }
}
