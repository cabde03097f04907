//! Tiles `R × ω` with their wave packets
//! `φ_s = Mod_{c(ω)} Dil²_R φ`, coefficient tables `⟨f, φ_s⟩`, the
//! space–frequency square function, and the size and shadow functionals.
//!
//! With `R = x_R + A·D·[−1/2, 1/2]^d` (frame matrix `A`, side lengths `D`),
//! the packet is `φ_s(x) = e^{2πi c·x} |R|^{−1/2} φ(D^{−1}Aᵀ(x − x_R))` and
//! its transform is `|R|^{1/2} e^{−2πi x_R·(ξ − c)} φ̂(D Aᵀ(ξ − c))`. Packets
//! are synthesized from that transform on the lattice, which gives the
//! periodization of `φ_s` to the torus with no leakage outside `2ω`.
//! Frames must be orthonormal.

mod elem;
mod size;
mod window;

pub use elem::{
    bessel_ratio, directional_maximal_spec, elem_decay_audit, elem_decay_sweep, excluded_set, zero_near, ElemAudit, ElemSweep,
};
pub(crate) use elem::rect_inside;
pub use size::{shadow, size, size_decompose, Extraction, Shadow, SizeDecomposition, SizeEstimate, SizeLevel};
pub use window::{window, Window, SUPPORT};

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::geometry::{dual_scales, dyadic_rects_meeting, DyadicRect, Parallelepiped, Region, MAX_DIM};
use crate::grid::{GridFunction, GridSpec, Spectrum};

/// Orthonormality tolerance for tile frames.
const ORTHO_TOL: f64 = 1e-12;
/// Relative slack in the duality check `1 ≤ |R_j||ω_j| ≤ 2`.
const DUAL_TOL: f64 = 1e-12;

/// A dual pair `R × ω` sharing a frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tile {
    pub rect: DyadicRect,
    pub omega: Parallelepiped,
    /// Index of `ω` in the family it came from.
    pub omega_id: usize,
}

impl Tile {
    pub fn new(rect: DyadicRect, omega: Parallelepiped, omega_id: usize) -> Result<Self> {
        if rect.frame != omega.frame {
            return Err(LabError::Parameter("tile rect and frequency box use different frames".into()));
        }
        if !rect.frame.is_orthonormal(ORTHO_TOL) {
            return Err(LabError::Parameter("tiles need an orthonormal frame".into()));
        }
        for j in 0..rect.dim() {
            let p = rect.side_length(j) * omega.side(j).length();
            if !((1.0 - DUAL_TOL)..=(2.0 + DUAL_TOL)).contains(&p) {
                return Err(LabError::Parameter(format!("side {j}: |R|·|ω| = {p} is outside [1, 2]")));
            }
        }
        Ok(Self { rect, omega, omega_id })
    }

    pub fn dim(&self) -> usize {
        self.rect.dim()
    }

    pub fn spatial(&self) -> Parallelepiped {
        self.rect.to_parallelepiped()
    }

    /// Ordering key: frame index, scales, offsets, then `ω` index.
    fn key(&self) -> (DyadicRect, usize) {
        (self.rect, self.omega_id)
    }

    /// Lattice points where the packet's transform may be nonzero, with
    /// the transform values there.
    pub fn packet_spectrum(&self, spec: &GridSpec) -> Result<Vec<(usize, Complex64)>> {
        let d = self.dim();
        if spec.dim() != d {
            return Err(LabError::Dimension { expected: spec.dim(), got: d });
        }
        let frame = self.rect.frame;
        let c = self.omega.center();
        let xr = self.spatial().center();
        let lens: Vec<f64> = (0..d).map(|j| self.rect.side_length(j)).collect();
        if lens.iter().any(|&l| l > spec.period()) {
            return Err(LabError::Resolution(format!("tile side {lens:?} exceeds the period {}", spec.period())));
        }
        // Support: |frame coordinate of ξ − c| < SUPPORT/|R_j|.
        let sides: Vec<crate::geometry::Interval> = lens
            .iter()
            .enumerate()
            .map(|(j, l)| {
                let cj = frame.coords(&c[..d])[j];
                crate::geometry::Interval::new(cj - SUPPORT / l, cj + SUPPORT / l)
            })
            .collect::<Result<_>>()?;
        let support = Parallelepiped::new(frame, &sides)?;
        let nyq = spec.nyquist();
        for (lo, hi) in support.bounding_box() {
            if lo <= -nyq || hi >= nyq {
                return Err(LabError::OutOfBand(format!(
                    "packet support [{lo}, {hi}] exceeds the representable band (−{nyq}, {nyq})"
                )));
            }
        }
        let volume: f64 = lens.iter().product();
        let amp = volume.sqrt();
        let w = window();
        let l = spec.period();
        let bb = support.bounding_box();
        let range = |j: usize| (bb[j].0 * l).ceil() as i64..=(bb[j].1 * l).floor() as i64;
        let mut out = Vec::new();
        let mut visit = |m: [i64; MAX_DIM]| {
            let xi = [m[0] as f64 / l, m[1] as f64 / l];
            let rel = [xi[0] - c[0], xi[1] - c[1]];
            let fc = frame.coords(&rel[..d]);
            let mut value = 1.0;
            for j in 0..d {
                value *= w.hat1(lens[j] * fc[j]);
                if value == 0.0 {
                    return;
                }
            }
            let phase: f64 = (0..d).map(|j| xr[j] * rel[j]).sum();
            let idx = spec.mode_index(&m[..d]).expect("inside band");
            out.push((idx, Complex64::from_polar(amp * value, -2.0 * PI * phase)));
        };
        match d {
            1 => range(0).for_each(|a| visit([a, 0])),
            _ => {
                for a in range(0) {
                    for b in range(1) {
                        visit([a, b]);
                    }
                }
            }
        }
        Ok(out)
    }
}

impl PartialOrd for Tile {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.key().cmp(&other.key()))
    }
}

/// Samples of the packet `φ_s` on the grid.
pub fn build_packet(tile: &Tile, spec: &GridSpec) -> Result<GridFunction> {
    let mut s = Spectrum::zeros(*spec);
    for (i, v) in tile.packet_spectrum(spec)? {
        s.coeffs_mut()[i] = v;
    }
    Ok(s.inverse())
}

/// All tiles `R × ω` with `R` at the dual scales of `ω` meeting `window`,
/// sorted.
pub fn tiles_for_omega(omega: &Parallelepiped, omega_id: usize, frame_id: usize, window: &Region) -> Result<Vec<Tile>> {
    let scales = dual_scales(omega)?;
    let rects = dyadic_rects_meeting(frame_id, &omega.frame, &scales, window)?;
    rects.into_iter().map(|r| Tile::new(r, *omega, omega_id)).collect()
}

/// Tiles for a whole family. Frames are numbered in order of first
/// appearance.
pub fn tiles_for_family(omegas: &[Parallelepiped], window: &Region) -> Result<Vec<Tile>> {
    let mut frames: Vec<crate::geometry::Frame> = Vec::new();
    let mut out = Vec::new();
    for (id, w) in omegas.iter().enumerate() {
        let frame_id = match frames.iter().position(|f| *f == w.frame) {
            Some(i) => i,
            None => {
                frames.push(w.frame);
                frames.len() - 1
            }
        };
        out.extend(tiles_for_omega(w, id, frame_id, window)?);
    }
    sort_tiles(&mut out);
    Ok(out)
}

pub fn sort_tiles(tiles: &mut [Tile]) {
    tiles.sort_by(|a, b| a.key().cmp(&b.key()));
}

/// Tiles with their coefficients `⟨f, φ_s⟩` against a function on `spec`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    pub spec: GridSpec,
    pub tiles: Vec<Tile>,
    pub coeffs: Vec<Complex64>,
}

impl CoefficientTable {
    pub fn new(spec: GridSpec, tiles: Vec<Tile>, coeffs: Vec<Complex64>) -> Result<Self> {
        if tiles.len() != coeffs.len() {
            return Err(LabError::Shape(format!("{} tiles but {} coefficients", tiles.len(), coeffs.len())));
        }
        Ok(Self { spec, tiles, coeffs })
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    /// `|⟨f, φ_s⟩|²` per tile.
    pub fn masses(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The sub-table of the listed tiles.
    pub fn select(&self, idx: &[usize]) -> CoefficientTable {
        CoefficientTable {
            spec: self.spec,
            tiles: idx.iter().map(|&i| self.tiles[i]).collect(),
            coeffs: idx.iter().map(|&i| self.coeffs[i]).collect(),
        }
    }

    /// Writes `frame_id,k1,n1[,k2,n2],omega_id,re,im`, one line per tile.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for (t, c) in self.tiles.iter().zip(&self.coeffs) {
            let mut row = vec![t.rect.frame_id.to_string()];
            for j in 0..t.dim() {
                row.push(t.rect.scales()[j].to_string());
                row.push(t.rect.offsets()[j].to_string());
            }
            row.extend([t.omega_id.to_string(), c.re.to_string(), c.im.to_string()]);
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads lines written by [`CoefficientTable::write_csv`]; `omegas`
    /// supplies each tile's frequency box and frame.
    pub fn read_csv<R: Read>(reader: R, omegas: &[Parallelepiped], spec: GridSpec) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let d = spec.dim();
        let mut tiles = Vec::new();
        let mut coeffs = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.len() != 2 * d + 4 {
                return Err(LabError::Parse(format!("expected {} fields, found {}", 2 * d + 4, rec.len())));
            }
            let int = |i: usize| -> Result<i64> { rec[i].parse().map_err(|_| LabError::Parse(format!("bad integer {:?}", &rec[i]))) };
            let real = |i: usize| -> Result<f64> { rec[i].parse().map_err(|_| LabError::Parse(format!("bad number {:?}", &rec[i]))) };
            let omega_id = int(2 * d + 1)? as usize;
            let omega = *omegas.get(omega_id).ok_or_else(|| LabError::Parse(format!("ω {omega_id} is not defined")))?;
            let scales: Vec<i32> = (0..d).map(|j| int(1 + 2 * j).map(|k| k as i32)).collect::<Result<_>>()?;
            let offsets: Vec<i64> = (0..d).map(|j| int(2 + 2 * j)).collect::<Result<_>>()?;
            let rect = DyadicRect::new(int(0)? as usize, omega.frame, &scales, &offsets)?;
            tiles.push(Tile::new(rect, omega, omega_id)?);
            coeffs.push(Complex64::new(real(2 * d + 2)?, real(2 * d + 3)?));
        }
        Self::new(spec, tiles, coeffs)
    }
}

/// `⟨f, φ_s⟩` for every tile, evaluated on the spectral side as
/// `L^{−d} Σ f̂ · conj(φ̂_s)` over each packet's support.
pub fn coefficients(f: &GridFunction, tiles: &[Tile]) -> Result<CoefficientTable> {
    let spec = *f.spec();
    let fhat = f.transform();
    let vol = spec.volume();
    let coeffs = tiles
        .par_iter()
        .map(|t| {
            let ps = t.packet_spectrum(&spec)?;
            let s: Complex64 = ps.iter().map(|(i, v)| fhat.coeffs()[*i] * v.conj()).sum();
            Ok(s / vol)
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientTable::new(spec, tiles.to_vec(), coeffs)
}

/// Grid points of `R_s` (listed on the plane and wrapped to the torus) and
/// the grid measure `count · (L/n)^d`.
pub(crate) fn rect_cells(rect: &Parallelepiped, spec: &GridSpec) -> (Vec<usize>, f64) {
    let idx = spec.indices_in(rect);
    let m = idx.len() as f64 * spec.cell_volume();
    (idx, m)
}

/// `SF(x) = (Σ_s |⟨f, φ_s⟩|² 1_{R_s}(x) / |R_s|)^{1/2}`, where `1_{R_s}` is
/// sampled at grid points and `|R_s|` is the matching grid measure, so
/// `‖SF‖₂² = Σ_s |⟨f, φ_s⟩|²` holds on the grid.
pub fn sf_square_function(table: &CoefficientTable) -> Result<GridFunction> {
    let spec = table.spec;
    let mut acc = vec![0.0f64; spec.len()];
    for (t, c) in table.tiles.iter().zip(&table.coeffs) {
        let (cells, measure) = rect_cells(&t.spatial(), &spec);
        if cells.is_empty() {
            return Err(LabError::Resolution("a tile rect contains no grid point".into()));
        }
        let density = c.norm_sqr() / measure;
        for i in cells {
            acc[i] += density;
        }
    }
    GridFunction::new(spec, acc.into_iter().map(|v| Complex64::new(v.sqrt(), 0.0)).collect())
}

/// Mass of `f` (in `L²`) at grid points where `mask` holds.
pub(crate) fn masked_energy(f: &GridFunction, mask: &[bool]) -> f64 {
    f.samples().iter().zip(mask).filter(|(_, m)| **m).map(|(z, _)| z.norm_sqr()).sum::<f64>() * f.spec().cell_volume()
}
