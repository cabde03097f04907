use num_complex::Complex64;

use super::{coefficients, masked_energy, tiles_for_omega, Tile};
use crate::error::{LabError, Result};
use crate::geometry::{Direction, Parallelepiped, Region};
use crate::grid::{GridFunction, GridSpec};
use crate::operators::{maximal, MaximalSpec};

/// Relative mass of `f` tolerated where it should vanish.
const SUPPORT_TOL: f64 = 1e-12;

/// Segment maximal function along `directions`, with lengths `h/4` and the
/// dyadic multiples of `h` up to a quarter of the period.
pub fn directional_maximal_spec(spec: &GridSpec, directions: Vec<Direction>) -> Result<MaximalSpec> {
    let h = spec.spacing();
    let mut lengths = vec![0.25 * h];
    let mut e = h;
    while e <= 0.25 * spec.period() {
        lengths.push(e);
        e *= 2.0;
    }
    MaximalSpec::segment(directions, lengths)
}

/// Grid mask of `{M 1_U > level}` for the maximal function along
/// `directions`.
pub fn excluded_set(spec: &GridSpec, directions: Vec<Direction>, u: &Parallelepiped, level: f64) -> Result<Vec<bool>> {
    let mut ind = vec![0.0; spec.len()];
    for i in spec.indices_in(u) {
        ind[i] = 1.0;
    }
    let m = maximal(&GridFunction::from_real(*spec, &ind)?, &directional_maximal_spec(spec, directions)?)?;
    Ok(m.samples().iter().map(|z| z.re > level).collect())
}

fn level(spec: &GridSpec, a: f64) -> f64 {
    a.powi(spec.dim() as i32)
}

/// `f` with its samples on `{M 1_U > a^d}` set to zero.
pub fn zero_near(f: &GridFunction, omega: &Parallelepiped, u: &Parallelepiped, a: f64) -> Result<GridFunction> {
    let mask = excluded_set(f.spec(), omega.frame.axes(), u, level(f.spec(), a))?;
    let s = f.samples().iter().zip(&mask).map(|(z, m)| if *m { Complex64::new(0.0, 0.0) } else { *z }).collect();
    GridFunction::new(*f.spec(), s)
}

pub(crate) fn rect_inside(r: &Parallelepiped, u: &Parallelepiped) -> bool {
    const TOL: f64 = 1e-12;
    r.vertices().iter().all(|v| {
        let c = u.frame.coords(&v[..u.dim()]);
        (0..u.dim()).all(|j| {
            let s = u.side(j);
            let slack = TOL * (1.0 + s.lo.abs().max(s.hi.abs()));
            c[j] >= s.lo - slack && c[j] <= s.hi + slack
        })
    })
}

/// One point of the decay audit.
#[derive(Clone, Debug, PartialEq)]
pub struct ElemAudit {
    pub a: f64,
    /// `Σ_{R_s ⊆ U, ω_s = ω} |⟨f, φ_s⟩|² / ‖f‖₂²`
    pub lhs: f64,
    /// Number of tiles with `R_s ⊆ U`.
    pub tiles: usize,
}

/// Tile mass inside `U` of a function that vanishes on `{M 1_U > a^d}`.
pub fn elem_decay_audit(omega: &Parallelepiped, u: &Parallelepiped, a: f64, f: &GridFunction) -> Result<ElemAudit> {
    if !(a > 0.0 && a < 1.0) {
        return Err(LabError::Parameter(format!("a = {a} must lie in (0, 1)")));
    }
    let spec = f.spec();
    let energy = f.lq_norm(2.0)?.powi(2);
    let mask = excluded_set(spec, omega.frame.axes(), u, level(spec, a))?;
    let stray = masked_energy(f, &mask);
    if stray > SUPPORT_TOL * energy {
        return Err(LabError::Precondition(format!(
            "f carries mass {stray:.3e} on {{M 1_U > a^d}} (total {energy:.3e})"
        )));
    }
    let inside: Vec<Tile> = tiles_for_omega(omega, 0, 0, &Region::Box(*u))?
        .into_iter()
        .filter(|t| rect_inside(&t.spatial(), u))
        .collect();
    if energy == 0.0 {
        return Ok(ElemAudit { a, lhs: 0.0, tiles: inside.len() });
    }
    let table = coefficients(f, &inside)?;
    Ok(ElemAudit { a, lhs: table.total_mass() / energy, tiles: inside.len() })
}

/// The audit over several `a`, each time zeroing the same base function.
#[derive(Clone, Debug, PartialEq)]
pub struct ElemSweep {
    pub points: Vec<ElemAudit>,
    /// Least-squares slope of `ln lhs` against `ln a` over points with
    /// positive `lhs`; `NaN` with fewer than two such points.
    pub exponent: f64,
}

impl ElemSweep {
    /// `lhs` strictly decreases as `a` decreases.
    pub fn strictly_decreasing(&self) -> bool {
        let mut p: Vec<&ElemAudit> = self.points.iter().collect();
        p.sort_by(|x, y| y.a.total_cmp(&x.a));
        p.windows(2).all(|w| w[1].lhs < w[0].lhs)
    }
}

pub fn elem_decay_sweep(omega: &Parallelepiped, u: &Parallelepiped, a_values: &[f64], base: &GridFunction) -> Result<ElemSweep> {
    let points = a_values
        .iter()
        .map(|&a| elem_decay_audit(omega, u, a, &zero_near(base, omega, u, a)?))
        .collect::<Result<Vec<_>>>()?;
    let logs: Vec<(f64, f64)> = points.iter().filter(|p| p.lhs > 0.0).map(|p| (p.a.ln(), p.lhs.ln())).collect();
    let exponent = if logs.len() < 2 {
        f64::NAN
    } else {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    Ok(ElemSweep { points, exponent })
}

/// `Σ_s |⟨f, φ_s⟩|² / ‖f‖₂²` over the given tiles.
pub fn bessel_ratio(f: &GridFunction, tiles: &[Tile]) -> Result<f64> {
    let energy = f.lq_norm(2.0)?.powi(2);
    if energy == 0.0 {
        return Ok(0.0);
    }
    Ok(coefficients(f, tiles)?.total_mass() / energy)
}
