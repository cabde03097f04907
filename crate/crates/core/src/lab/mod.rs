//! Experiment harness: configuration, scaling reports with log–log fits,
//! CSV emission, the sector sharpness experiment and empirical norm ratios.

mod norm_ratio;
mod sharpness;

pub use norm_ratio::{norm_ratio_run, shaped_gaussian, NormRatio, NormRatioReport};
pub use sharpness::{
    annular_bump, sector_family, sector_lower_bound_check, sharpness_run, sharpness_reports, AnnulusWidth, SectorBound,
    SharpnessMetric, SharpnessRow, SharpnessSetup,
};

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LabError, Result};
use crate::grid::GridSpec;

const DEFAULTS: &str = include_str!("defaults.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessDefaults {
    pub grid_n: usize,
    pub grid_period: f64,
    pub n_list: Vec<usize>,
    pub q_list: Vec<f64>,
    pub annulus_radius: f64,
    pub annulus_width: f64,
    pub width_mode: AnnulusWidth,
    pub metric: SharpnessMetric,
    pub slope_tolerance: f64,
    pub log_regime_max_ratio: f64,
    pub min_points_per_sector: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorBoundDefaults {
    pub max_drift: f64,
    pub symmetry_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormRatioDefaults {
    pub trials: usize,
    pub max_drift: f64,
    pub l2_contraction_slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TileDefaults {
    pub mu_factor: f64,
    pub shadow_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonDefaults {
    /// Pinned `C_q` for `‖F_U‖_q/|U|^{1/q} ≤ C_q ‖Λ‖_CM`, keyed by `q`.
    pub jn_constants: BTreeMap<String, f64>,
}

/// Pass bands and experiment parameters, from the bundled defaults with
/// optional overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Defaults {
    pub version: u32,
    pub sharpness: SharpnessDefaults,
    pub sector_lower_bound: SectorBoundDefaults,
    pub norm_ratio: NormRatioDefaults,
    pub tiles: TileDefaults,
    pub carleson: CarlesonDefaults,
}

fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

impl Defaults {
    pub fn bundled() -> Self {
        serde_json::from_str(DEFAULTS).expect("bundled defaults parse")
    }

    /// Bundled defaults with the members of `overrides` replacing theirs.
    pub fn with_overrides(overrides: &str) -> Result<Self> {
        let mut base: Value = serde_json::from_str(DEFAULTS)?;
        merge(&mut base, serde_json::from_str(overrides)?);
        Ok(serde_json::from_value(base)?)
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::bundled()),
            Some(p) => Self::with_overrides(&std::fs::read_to_string(p)?),
        }
    }

    pub fn jn_constant(&self, q: f64) -> Option<f64> {
        self.carleson.jn_constants.iter().find(|(k, _)| k.parse::<f64>().ok() == Some(q)).map(|(_, v)| *v)
    }
}

/// Name, grid, seed and named parameters of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub grid: GridSpec,
    pub seed: u64,
    pub parameters: BTreeMap<String, Value>,
}

/// Least-squares line `y = slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 2 {
        return Err(LabError::Parameter("a fit needs at least two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(LabError::Parameter("a fit needs two distinct abscissae".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(Fit { slope, intercept: my - slope * mx })
}

/// How a report decides pass or fail.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PassBand {
    /// `|slope − target| ≤ tolerance` for the log–log fit.
    Slope { target: f64, tolerance: f64 },
    /// Last value over first value below `max`.
    RatioBelow { max: f64 },
    /// `|value/first − 1| ≤ max` for every row.
    Drift { max: f64 },
    /// Every value at most `max`.
    AtMost { max: f64 },
    /// Every value at least `min`.
    AtLeast { min: f64 },
    /// Reported only.
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub param: f64,
    pub value: f64,
    /// `value` over the first row's value.
    pub ratio: f64,
}

/// Rows of one metric against one parameter, with the log–log fit of
/// `value` against `param` and a pass band.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub metric: String,
    pub param_name: String,
    pub rows: Vec<ScalingRow>,
    pub fit: Option<Fit>,
    pub band: PassBand,
}

impl ScalingReport {
    /// Builds the report, computing ratios and (with two or more positive
    /// rows) the fit. Rows are sorted by parameter.
    pub fn new(metric: &str, param_name: &str, mut points: Vec<(f64, f64)>, band: PassBand) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let first = points.first().map_or(1.0, |p| p.1);
        let rows: Vec<ScalingRow> =
            points.iter().map(|&(param, value)| ScalingRow { param, value, ratio: value / first }).collect();
        let logs: Vec<(f64, f64)> =
            rows.iter().filter(|r| r.param > 0.0 && r.value > 0.0).map(|r| (r.param.ln(), r.value.ln())).collect();
        let fit = fit_line(&logs).ok();
        Self { metric: metric.to_string(), param_name: param_name.to_string(), rows, fit, band }
    }

    /// Statistic compared against the band.
    pub fn statistic(&self) -> Option<f64> {
        match self.band {
            PassBand::Slope { .. } => self.fit.map(|f| f.slope),
            PassBand::RatioBelow { .. } => self.rows.last().map(|r| r.ratio),
            PassBand::Drift { .. } => self.rows.iter().map(|r| (r.ratio - 1.0).abs()).reduce(f64::max),
            PassBand::AtMost { .. } => self.rows.iter().map(|r| r.value).reduce(f64::max),
            PassBand::AtLeast { .. } => self.rows.iter().map(|r| r.value).reduce(f64::min),
            PassBand::None => None,
        }
    }

    pub fn pass(&self) -> bool {
        let s = self.statistic();
        match self.band {
            PassBand::Slope { target, tolerance } => s.is_some_and(|v| (v - target).abs() <= tolerance),
            PassBand::RatioBelow { max } => s.is_some_and(|v| v < max),
            PassBand::Drift { max } => s.is_some_and(|v| v <= max),
            PassBand::AtMost { max } => s.is_some_and(|v| v <= max),
            PassBand::AtLeast { min } => s.is_some_and(|v| v >= min),
            PassBand::None => true,
        }
    }

    fn band_value(&self) -> f64 {
        match self.band {
            PassBand::Slope { target, .. } => target,
            PassBand::RatioBelow { max } | PassBand::Drift { max } | PassBand::AtMost { max } => max,
            PassBand::AtLeast { min } => min,
            PassBand::None => f64::NAN,
        }
    }
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        v.to_string()
    }
}

/// Writes `param,value,metric,fit_slope,fit_intercept,pass`: one row per
/// data point, then one summary row per report whose value is the band's
/// target or bound and whose `pass` column is filled.
pub fn emit_to<W: Write>(reports: &[ScalingReport], writer: W) -> Result<bool> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["param", "value", "metric", "fit_slope", "fit_intercept", "pass"])?;
    let mut all = true;
    for r in reports {
        for row in &r.rows {
            w.write_record([format!("{}={}", r.param_name, row.param), num(row.value), r.metric.clone(), String::new(), String::new(), String::new()])?;
        }
        let pass = r.pass();
        all &= pass;
        let (slope, intercept) = r.fit.map_or((f64::NAN, f64::NAN), |f| (f.slope, f.intercept));
        let label = match r.band {
            PassBand::Slope { .. } => "fit",
            PassBand::RatioBelow { .. } => "ratio_bound",
            PassBand::Drift { .. } => "drift_bound",
            PassBand::AtMost { .. } => "upper_bound",
            PassBand::AtLeast { .. } => "lower_bound",
            PassBand::None => "report",
        };
        w.write_record([label.to_string(), num(r.band_value()), r.metric.clone(), num(slope), num(intercept), pass.to_string()])?;
    }
    w.flush()?;
    Ok(all)
}

/// [`emit_to`] a file; returns whether every band was met.
pub fn emit(reports: &[ScalingReport], path: &Path) -> Result<bool> {
    emit_to(reports, std::fs::File::create(path)?)
}
