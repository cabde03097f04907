use serde::{Deserialize, Serialize};

use super::{PassBand, ScalingReport, SharpnessDefaults};
use crate::error::{LabError, Result};
use crate::geometry::{Frame, Interval, Parallelepiped, Sector};
use crate::grid::{GridFunction, GridSpec, Spectrum};
use crate::operators::{sharp_restrict, square_function, MultiplierProfile};

/// Spectral tolerance outside the declared annulus, relative to the energy.
const ANNULUS_LEAK: f64 = 1e-9;
/// Fan offset, as a fraction of the opening, keeping lattice points off the
/// sector boundaries.
const FAN_OFFSET: f64 = 0.381_966_011_250_105_1;

/// How the annulus width depends on the sector count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnulusWidth {
    /// `width · radius`.
    Fixed,
    /// `width · radius · 8/N`, equal to `Fixed` at `N = 8`.
    InverseN,
}

/// Quantity fitted against `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharpnessMetric {
    /// `‖S^Γφ‖_q²`.
    NormSq,
    /// `(‖φ‖_q / ‖S^Γφ‖_q)²`.
    ReverseRatio,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpnessSetup {
    pub grid: GridSpec,
    pub radius: f64,
    /// Full width of the annulus relative to the radius.
    pub width: f64,
    pub width_mode: AnnulusWidth,
    pub min_points_per_sector: usize,
}

impl SharpnessSetup {
    pub fn from_defaults(d: &SharpnessDefaults) -> Result<Self> {
        Ok(Self {
            grid: GridSpec::new(2, d.grid_n, d.grid_period)?,
            radius: d.annulus_radius,
            width: d.annulus_width,
            width_mode: d.width_mode,
            min_points_per_sector: d.min_points_per_sector,
        })
    }

    fn half_width(&self, n_sectors: usize) -> f64 {
        let w = match self.width_mode {
            AnnulusWidth::Fixed => self.width,
            AnnulusWidth::InverseN => self.width * 8.0 / n_sectors as f64,
        };
        0.5 * w * self.radius
    }
}

fn bump(t: f64) -> f64 {
    if t.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

/// Spectrum of the radial test function: a smooth bump in `|ξ|` centred at
/// `radius` and vanishing outside `|‖ξ| − radius| < half_width`.
pub fn annular_bump(grid: &GridSpec, radius: f64, half_width: f64) -> Result<Spectrum> {
    if grid.dim() != 2 {
        return Err(LabError::Dimension { expected: 2, got: grid.dim() });
    }
    if !(radius > 0.0 && half_width > 0.0 && half_width < radius) {
        return Err(LabError::Parameter(format!("annulus {radius} ± {half_width} is degenerate")));
    }
    if radius + half_width >= grid.nyquist() {
        return Err(LabError::Resolution(format!(
            "annulus reaches {} beyond the Nyquist frequency {}",
            radius + half_width,
            grid.nyquist()
        )));
    }
    let mut s = Spectrum::zeros(*grid);
    for (i, c) in s.coeffs_mut().iter_mut().enumerate() {
        let xi = grid.frequency(i);
        c.re = bump((xi[0].hypot(xi[1]) - radius) / half_width);
    }
    let energy = s.energy();
    let outside = s.energy_where(|xi| (xi[0].hypot(xi[1]) - radius).abs() >= half_width);
    if !(energy > 0.0) || outside > ANNULUS_LEAK * energy {
        return Err(LabError::Resolution(format!("annulus {radius} ± {half_width} misses the lattice")));
    }
    Ok(s)
}

/// The `N` sectors of opening `2π/N`, as parallelepipeds reaching every
/// lattice frequency, after checking the resolution preconditions.
pub fn sector_family(grid: &GridSpec, spectrum: &Spectrum, n_sectors: usize, min_points: usize) -> Result<Vec<Parallelepiped>> {
    if n_sectors < 4 || n_sectors % 2 != 0 {
        return Err(LabError::Parameter(format!("sector count {n_sectors} must be even and at least 4")));
    }
    let step = std::f64::consts::TAU / n_sectors as f64;
    let reach = std::f64::consts::SQRT_2 * grid.nyquist() / step.sin() + 1.0;
    let fan: Vec<Parallelepiped> =
        Sector::uniform_fan(n_sectors, reach, FAN_OFFSET * step)?.iter().map(Sector::to_parallelepiped).collect();
    let mut counts = vec![0usize; n_sectors];
    for (i, c) in spectrum.coeffs().iter().enumerate() {
        if c.norm_sqr() > 0.0 {
            let xi = grid.frequency(i);
            for (k, w) in fan.iter().enumerate() {
                if w.contains(&xi[..2]) {
                    counts[k] += 1;
                }
            }
        }
    }
    let fewest = counts.iter().copied().min().unwrap_or(0);
    if fewest < min_points {
        return Err(LabError::Resolution(format!(
            "a sector of {n_sectors} holds {fewest} annulus lattice points, fewer than {min_points}"
        )));
    }
    Ok(fan)
}

/// Norms for one sector count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub n_sectors: usize,
    pub q: f64,
    /// `‖S^Γφ‖_q`.
    pub square_norm: f64,
    /// `‖φ‖_q`.
    pub phi_norm: f64,
}

impl SharpnessRow {
    pub fn metric(&self, metric: SharpnessMetric) -> f64 {
        match metric {
            SharpnessMetric::NormSq => self.square_norm.powi(2),
            SharpnessMetric::ReverseRatio => (self.phi_norm / self.square_norm).powi(2),
        }
    }
}

/// `‖S^Γφ‖_q` and `‖φ‖_q` for every `(N, q)`, sorted by `N` then `q`.
pub fn sharpness_run(setup: &SharpnessSetup, n_list: &[usize], q_list: &[f64]) -> Result<Vec<SharpnessRow>> {
    if let Some(q) = q_list.iter().find(|q| !(**q >= 1.0 && q.is_finite())) {
        return Err(LabError::Parameter(format!("exponent {q} must be finite and at least 1")));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut rows = Vec::new();
    for &n in &ns {
        let spectrum = annular_bump(&setup.grid, setup.radius, setup.half_width(n))?;
        let fan = sector_family(&setup.grid, &spectrum, n, setup.min_points_per_sector)?;
        let phi = spectrum.inverse();
        let s = square_function(&phi, &fan, MultiplierProfile::sharp())?;
        let mut qs = q_list.to_vec();
        qs.sort_by(f64::total_cmp);
        qs.dedup();
        for q in qs {
            rows.push(SharpnessRow { n_sectors: n, q, square_norm: s.lq_norm(q)?, phi_norm: phi.lq_norm(q)? });
        }
    }
    Ok(rows)
}

/// One report per `q`. For `q ≥ 4` the band is the slope `1 − 4/q` (`0` at
/// `q = 4`) within `slope_tolerance`; below 4 it is the ratio of the norm at
/// the largest `N` to that at the smallest, under `log_regime_max_ratio`.
pub fn sharpness_reports(rows: &[SharpnessRow], metric: SharpnessMetric, slope_tolerance: f64, log_regime_max_ratio: f64) -> Vec<ScalingReport> {
    let mut qs: Vec<f64> = rows.iter().map(|r| r.q).collect();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let tag = match metric {
        SharpnessMetric::NormSq => "square_norm",
        SharpnessMetric::ReverseRatio => "reverse_ratio",
    };
    qs.into_iter()
        .map(|q| {
            let of_q = rows.iter().filter(|r| r.q == q);
            if q >= 4.0 {
                let pts = of_q.map(|r| (r.n_sectors as f64, r.metric(metric))).collect();
                let band = PassBand::Slope { target: 1.0 - 4.0 / q, tolerance: slope_tolerance };
                ScalingReport::new(&format!("{tag}_sq_q{q}"), "N", pts, band)
            } else {
                let pts = of_q.map(|r| (r.n_sectors as f64, r.metric(metric).sqrt())).collect();
                ScalingReport::new(&format!("{tag}_q{q}"), "N", pts, PassBand::RatioBelow { max: log_regime_max_ratio })
            }
        })
        .collect()
}

/// Result of the pointwise lower bound on the sector pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorBound {
    pub n_sectors: usize,
    /// `min_{R_γ} N·|S_γφ|` for each sector in fan order.
    pub per_sector: Vec<f64>,
    /// Minimum over sectors.
    pub value: f64,
    /// Largest difference between a sector and its quarter-turn partner.
    pub symmetry_defect: f64,
}

/// For each sector `γ`, the minimum of `N·|S_γφ|` over grid points of the
/// rectangle `R_γ` centred at the origin, of side 1 along the bisectrix of
/// `γ` and `N/(4π)` across it.
pub fn sector_lower_bound_check(setup: &SharpnessSetup, n_sectors: usize) -> Result<SectorBound> {
    let spectrum = annular_bump(&setup.grid, setup.radius, setup.half_width(n_sectors))?;
    let fan = sector_family(&setup.grid, &spectrum, n_sectors, setup.min_points_per_sector)?;
    let phi = spectrum.inverse();
    let step = std::f64::consts::TAU / n_sectors as f64;
    let across = n_sectors as f64 / (4.0 * std::f64::consts::PI);
    if across > setup.grid.period() {
        return Err(LabError::Resolution(format!("R_γ of length {across} exceeds the period")));
    }
    let mut per_sector = Vec::with_capacity(n_sectors);
    for (k, w) in fan.iter().enumerate() {
        let piece: GridFunction = sharp_restrict(&phi, w)?;
        let theta = (FAN_OFFSET + k as f64 + 0.5) * step;
        let frame = Frame::rotated(theta);
        let rect = Parallelepiped::new(frame, &[Interval::new(-0.5, 0.5)?, Interval::new(-0.5 * across, 0.5 * across)?])?;
        let pts = setup.grid.indices_in(&rect);
        if pts.is_empty() {
            return Err(LabError::Resolution(format!("R_γ for sector {k} holds no grid point")));
        }
        let m = pts.iter().map(|&i| piece.samples()[i].norm()).fold(f64::INFINITY, f64::min);
        per_sector.push(n_sectors as f64 * m);
    }
    let value = per_sector.iter().copied().fold(f64::INFINITY, f64::min);
    let symmetry_defect = if n_sectors % 4 == 0 {
        (0..n_sectors).map(|k| (per_sector[k] - per_sector[(k + n_sectors / 4) % n_sectors]).abs()).fold(0.0, f64::max)
    } else {
        f64::NAN
    };
    Ok(SectorBound { n_sectors, per_sector, value, symmetry_defect })
}
