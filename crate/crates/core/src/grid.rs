//! Complex samples on the periodic grid `(L/n)·{0..n-1}^d` and their
//! spectra on the centered lattice `{m/L : −n/2 ≤ m_j < n/2}`.
//!
//! The transform pair is
//!
//! ```text
//! c(m) = (L/n)^d Σ_x f(x) e^{−2πi x·m/L},      f(x) = L^{−d} Σ_m c(m) e^{2πi x·m/L},
//! ```
//!
//! so `(L/n)^d Σ|f|² = L^{−d} Σ|c|²`. Samples are stored row-major (the
//! first axis varies slowest); spectra are stored in the same layout with
//! each axis in transform order `0, 1, …, n/2−1, −n/2, …, −1`.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::geometry::{Parallelepiped, MAX_DIM};

/// Below this many samples a transform runs on the calling thread.
const PARALLEL_MIN: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct GridSpec {
    d: usize,
    n: usize,
    period: f64,
}

#[derive(Deserialize)]
struct RawSpec {
    d: usize,
    n: usize,
    period: f64,
}

impl TryFrom<RawSpec> for GridSpec {
    type Error = LabError;

    fn try_from(r: RawSpec) -> Result<Self> {
        Self::new(r.d, r.n, r.period)
    }
}

impl GridSpec {
    pub fn new(d: usize, n: usize, period: f64) -> Result<Self> {
        crate::geometry::check_dim(d)?;
        if n < 4 || !n.is_power_of_two() {
            return Err(LabError::Parameter(format!("n = {n} must be a power of two ≥ 4")));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(LabError::Parameter(format!("period {period} must be positive")));
        }
        Ok(Self { d, n, period })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of samples, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid step `L/n`.
    pub fn spacing(&self) -> f64 {
        self.period / self.n as f64
    }

    /// Riemann weight `(L/n)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.d as i32)
    }

    /// `L^d`.
    pub fn volume(&self) -> f64 {
        self.period.powi(self.d as i32)
    }

    /// Per-axis sample indices of a flat index.
    #[inline]
    pub fn multi_index(&self, idx: usize) -> [usize; MAX_DIM] {
        match self.d {
            1 => [idx, 0],
            _ => [idx / self.n, idx % self.n],
        }
    }

    #[inline]
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        match self.d {
            1 => multi[0],
            _ => multi[0] * self.n + multi[1],
        }
    }

    /// Flat index of the sample at integer offsets, wrapped periodically.
    #[inline]
    pub fn wrapped_index(&self, multi: &[i64]) -> usize {
        let n = self.n as i64;
        match self.d {
            1 => multi[0].rem_euclid(n) as usize,
            _ => (multi[0].rem_euclid(n) * n + multi[1].rem_euclid(n)) as usize,
        }
    }

    /// Position of a sample.
    #[inline]
    pub fn point(&self, idx: usize) -> [f64; MAX_DIM] {
        let h = self.spacing();
        let m = self.multi_index(idx);
        match self.d {
            1 => [m[0] as f64 * h, 0.0],
            _ => [m[0] as f64 * h, m[1] as f64 * h],
        }
    }

    /// Centered integer frequency of a per-axis transform index.
    #[inline]
    pub fn signed_mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Integer lattice point `m` of a flat spectrum index.
    #[inline]
    pub fn mode(&self, idx: usize) -> [i64; MAX_DIM] {
        let m = self.multi_index(idx);
        match self.d {
            1 => [self.signed_mode(m[0]), 0],
            _ => [self.signed_mode(m[0]), self.signed_mode(m[1])],
        }
    }

    /// Frequency `m/L` of a flat spectrum index.
    #[inline]
    pub fn frequency(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.mode(idx);
        [m[0] as f64 / self.period, m[1] as f64 / self.period]
    }

    /// Flat spectrum index of a lattice point, if representable.
    pub fn mode_index(&self, m: &[i64]) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m.len() != self.d || m.iter().any(|&k| k < -half || k >= half) {
            return None;
        }
        Some(self.wrapped_index(m))
    }

    /// Largest representable frequency magnitude per axis, `n/(2L)`.
    pub fn nyquist(&self) -> f64 {
        self.n as f64 / (2.0 * self.period)
    }

    /// Flat indices of the grid points lying in `p`, scanning the plane
    /// (not the torus) and wrapping each hit; a point whose images meet `p`
    /// several times is listed that many times.
    pub fn indices_in(&self, p: &Parallelepiped) -> Vec<usize> {
        let h = self.spacing();
        let bb = p.bounding_box();
        let range = |j: usize| (bb[j].0 / h).floor() as i64 - 1..=(bb[j].1 / h).ceil() as i64 + 1;
        let mut out = Vec::new();
        match self.d {
            1 => {
                for i in range(0) {
                    if p.contains(&[i as f64 * h]) {
                        out.push(self.wrapped_index(&[i]));
                    }
                }
            }
            _ => {
                for i in range(0) {
                    for k in range(1) {
                        if p.contains(&[i as f64 * h, k as f64 * h]) {
                            out.push(self.wrapped_index(&[i, k]));
                        }
                    }
                }
            }
        }
        out
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self != other {
            return Err(LabError::Shape(format!("grid {self:?} does not match {other:?}")));
        }
        Ok(())
    }
}

/// Samples of a function on a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<Complex64>,
}

/// Transform coefficients on the frequency lattice of a [`GridSpec`].
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    spec: GridSpec,
    coeffs: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(LabError::Shape(format!("{} samples for a grid of {}", samples.len(), spec.len())));
        }
        Ok(Self { spec, samples })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, samples: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn constant(spec: GridSpec, c: Complex64) -> Self {
        Self { spec, samples: vec![c; spec.len()] }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d = spec.dim();
        let samples = (0..spec.len()).map(|i| f(&spec.point(i)[..d])).collect();
        Self { spec, samples }
    }

    pub fn from_real(spec: GridSpec, values: &[f64]) -> Result<Self> {
        Self::new(spec, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Pointwise modulus as a real-valued grid function.
    pub fn modulus(&self) -> GridFunction {
        self.map(|z| Complex64::new(z.norm(), 0.0))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        Self { spec: self.spec, samples: self.samples.iter().map(|&z| f(z)).collect() }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<GridFunction> {
        self.spec.check_same(&other.spec)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { spec: self.spec, samples })
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn transform(&self) -> Spectrum {
        let mut coeffs = self.samples.clone();
        fft_nd(&self.spec, &mut coeffs, Direction::Forward);
        let w = self.spec.cell_volume();
        coeffs.iter_mut().for_each(|c| *c *= w);
        Spectrum { spec: self.spec, coeffs }
    }

    /// `((L/n)^d Σ |f|^q)^{1/q}`, or `max |f|` for `q = ∞`.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        lq_norm_of(&self.spec, self.samples.iter().map(|z| z.norm()), q)
    }

    /// `(L/n)^d Σ f · conj(g)`.
    pub fn inner_product(&self, other: &GridFunction) -> Result<Complex64> {
        self.spec.check_same(&other.spec)?;
        let s: Complex64 = self.samples.iter().zip(&other.samples).map(|(f, g)| f * g.conj()).sum();
        Ok(s * self.spec.cell_volume())
    }

    /// Inner product evaluated on the spectral side.
    pub fn inner_product_spectral(&self, other: &GridFunction) -> Result<Complex64> {
        self.transform().inner_product(&other.transform())
    }

    pub fn write_lpgrid(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        out.write_all(self.to_lpgrid().as_bytes())?;
        out.flush()?;
        Ok(())
    }

    pub fn to_lpgrid(&self) -> String {
        let mut s = String::with_capacity(self.samples.len() * 24);
        writeln!(s, "LPGRID {} {} {}", self.spec.d, self.spec.n, self.spec.period).unwrap();
        for z in &self.samples {
            writeln!(s, "{} {}", z.re, z.im).unwrap();
        }
        s
    }

    pub fn read_lpgrid(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::parse_lpgrid(file)
    }

    pub fn parse_lpgrid(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| LabError::Parse("empty LPGRID input".into()))??;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 || fields[0] != "LPGRID" {
            return Err(LabError::Parse(format!("bad LPGRID header {header:?}")));
        }
        let bad = |what: &str| LabError::Parse(format!("bad LPGRID {what} in header {header:?}"));
        let d: usize = fields[1].parse().map_err(|_| bad("dimension"))?;
        let n: usize = fields[2].parse().map_err(|_| bad("size"))?;
        let period: f64 = fields[3].parse().map_err(|_| bad("period"))?;
        let spec = GridSpec::new(d, n, period)?;
        let mut samples = Vec::with_capacity(spec.len());
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let mut next = || -> Result<f64> {
                it.next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| LabError::Parse(format!("bad sample on line {}", k + 2)))
            };
            samples.push(Complex64::new(next()?, next()?));
        }
        Self::new(spec, samples)
    }
}

impl Spectrum {
    pub fn new(spec: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != spec.len() {
            return Err(LabError::Shape(format!("{} coefficients for a grid of {}", coeffs.len(), spec.len())));
        }
        Ok(Self { spec, coeffs })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, coeffs: vec![Complex64::new(0.0, 0.0); spec.len()] }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at lattice point `m`, zero when not representable.
    pub fn coeff(&self, m: &[i64]) -> Complex64 {
        self.spec.mode_index(m).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn inverse(&self) -> GridFunction {
        let mut samples = self.coeffs.clone();
        fft_nd(&self.spec, &mut samples, Direction::Inverse);
        let w = 1.0 / self.spec.volume();
        samples.iter_mut().for_each(|c| *c *= w);
        GridFunction { spec: self.spec, samples }
    }

    /// `L^{−d} Σ c · conj(c')`, the spectral form of the inner product.
    pub fn inner_product(&self, other: &Spectrum) -> Result<Complex64> {
        self.spec.check_same(&other.spec)?;
        let s: Complex64 = self.coeffs.iter().zip(&other.coeffs).map(|(f, g)| f * g.conj()).sum();
        Ok(s / self.spec.volume())
    }

    /// `L^{−d} Σ |c|²`, equal to the squared L² norm of the inverse.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.spec.volume()
    }

    /// Energy restricted to lattice points where `keep(ξ)` holds.
    pub fn energy_where(&self, keep: impl Fn(&[f64]) -> bool) -> f64 {
        let d = self.spec.dim();
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(&self.spec.frequency(*i)[..d]))
            .map(|(_, c)| c.norm_sqr())
            .sum();
        s / self.spec.volume()
    }

    /// Multiplies each coefficient by `symbol(ξ)`.
    pub fn apply_symbol(&mut self, symbol: impl Fn(&[f64]) -> f64) {
        let d = self.spec.dim();
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c *= symbol(&self.spec.frequency(i)[..d]);
        }
    }
}

pub(crate) fn lq_norm_of(spec: &GridSpec, moduli: impl Iterator<Item = f64>, q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(LabError::Parameter(format!("norm exponent {q} must be ≥ 1")));
    }
    if q == f64::INFINITY {
        return Ok(moduli.fold(0.0, f64::max));
    }
    let w = spec.cell_volume();
    let s: f64 = if q == 2.0 { moduli.map(|a| a * a).sum() } else { moduli.map(|a| a.powf(q)).sum() };
    Ok((w * s).powf(1.0 / q))
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match dir {
            Direction::Forward => p.plan_fft_forward(n),
            Direction::Inverse => p.plan_fft_inverse(n),
        }
    })
}

/// Unnormalized transform along every axis, in place.
fn fft_nd(spec: &GridSpec, data: &mut [Complex64], dir: Direction) {
    let n = spec.n();
    let fft = plan(n, dir);
    let rows = |data: &mut [Complex64]| {
        if data.len() >= PARALLEL_MIN {
            data.par_chunks_mut(n).for_each_init(
                || vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()],
                |scratch, row| fft.process_with_scratch(row, scratch),
            );
        } else {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(data, &mut scratch);
        }
    };
    rows(data);
    if spec.dim() == 2 {
        transpose(data, n);
        rows(data);
        transpose(data, n);
    }
}

fn transpose(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}
