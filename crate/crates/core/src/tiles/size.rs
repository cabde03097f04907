use crate::density::DensityEngine;
use crate::error::{LabError, Result};
use crate::geometry::Parallelepiped;

use super::{CoefficientTable, Tile};

/// Levels above this index are refused; reaching it means a positive mass
/// below `2^{−2·MAX_LEVEL}μ²` per unit shadow.
const MAX_LEVEL: i64 = 2000;

/// The union of the spatial rects of a tile collection.
#[derive(Clone, Debug, PartialEq)]
pub struct Shadow {
    pub rects: Vec<Parallelepiped>,
    pub measure: f64,
    /// Sampling spacing when the rects use more than one frame; `None`
    /// means the measure is exact up to rounding.
    pub resolution: Option<f64>,
    /// Bound on `|measure − |sh(S)||`.
    pub error_bound: f64,
}

/// `sh(S)`. Rects in one shared frame are measured exactly; otherwise cells
/// of side `spacing` are counted by their centers.
pub fn shadow(tiles: &[Tile], spacing: f64) -> Result<Shadow> {
    let rects: Vec<Parallelepiped> = tiles.iter().map(Tile::spatial).collect();
    if rects.is_empty() {
        return Ok(Shadow { rects, measure: 0.0, resolution: None, error_bound: 0.0 });
    }
    let engine = DensityEngine::new(&rects, &vec![0.0; rects.len()], &[], Some(spacing))?;
    let all: Vec<usize> = (0..rects.len()).collect();
    let measure = engine.union_measure(&all);
    let resolution = engine.resolution();
    let error_bound = match resolution {
        None => 0.0,
        Some(h) => {
            let d = rects[0].dim() as i32;
            rects
                .iter()
                .map(|r| {
                    let boundary = if d == 1 { 2.0 } else { 2.0 * (r.side(0).length() + r.side(1).length()) };
                    boundary * std::f64::consts::SQRT_2 * h + 4.0 * h.powi(d)
                })
                .sum()
        }
    };
    Ok(Shadow { rects, measure, resolution, error_bound })
}

/// `size(S)` with the subcollection attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct SizeEstimate {
    pub value: f64,
    /// Indices into the table.
    pub tiles: Vec<usize>,
    /// Sampling spacing of the shadow measure, if not exact.
    pub resolution: Option<f64>,
}

fn engine_for(table: &CoefficientTable) -> Result<DensityEngine> {
    let rects: Vec<Parallelepiped> = table.tiles.iter().map(Tile::spatial).collect();
    let engine = DensityEngine::new(&rects, &table.masses(), &[], Some(table.spec.spacing()))?;
    if let Some(i) = (0..rects.len()).find(|&i| engine.item_measure(i) == 0.0) {
        return Err(LabError::Resolution(format!("tile {i} is smaller than the sampling cell")));
    }
    Ok(engine)
}

/// `size(S) = sup_{S′ ⊆ S} (|sh(S′)|^{−1} Σ_{s∈S′} |⟨f, φ_s⟩|²)^{1/2}`, the
/// sup taken over the candidate family of the density search (exact when
/// any two rects are nested or disjoint).
pub fn size(table: &CoefficientTable) -> Result<SizeEstimate> {
    if table.is_empty() {
        return Ok(SizeEstimate { value: 0.0, tiles: Vec::new(), resolution: None });
    }
    let engine = engine_for(table)?;
    let all: Vec<usize> = (0..table.len()).collect();
    let best = engine.best(&all);
    Ok(SizeEstimate { value: best.density.sqrt(), tiles: best.items, resolution: engine.resolution() })
}

/// One extracted subcollection.
#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub tiles: Vec<usize>,
    pub mass: f64,
    pub shadow: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeLevel {
    pub k: i64,
    /// Tiles of `S_k`, in index order.
    pub tiles: Vec<usize>,
    pub extractions: Vec<Extraction>,
    /// `Σ_{s∈S_k} |⟨f, φ_s⟩|²`
    pub mass: f64,
    /// `|sh(S_k)|`
    pub shadow: f64,
    /// `size(S_k)`
    pub size: f64,
}

impl SizeLevel {
    /// `½ (2^{−k}μ)²`, the density every extraction at this level reaches.
    pub fn threshold(&self, mu: f64) -> f64 {
        level_threshold(self.k, mu)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeDecomposition {
    pub mu: f64,
    /// Nonempty levels in increasing `k`.
    pub levels: Vec<SizeLevel>,
    /// Tiles with zero coefficient, which no level can take.
    pub null_tiles: Vec<usize>,
    /// `max_k size(S_k) / (2^{−k}μ)`.
    pub size_constant: f64,
}

impl SizeDecomposition {
    /// Checks that the levels and the null set partition `0..n`.
    pub fn is_partition(&self, n: usize) -> bool {
        let mut seen = vec![false; n];
        for &i in self.levels.iter().flat_map(|l| &l.tiles).chain(&self.null_tiles) {
            if i >= n || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// `max_k |sh(S_k)| μ² / (2^{2k} ‖f‖²)`.
    pub fn shadow_constant(&self, f_energy: f64) -> f64 {
        self.levels
            .iter()
            .map(|l| l.shadow * self.mu * self.mu / (4f64.powi(l.k as i32) * f_energy))
            .fold(0.0, f64::max)
    }
}

fn level_threshold(k: i64, mu: f64) -> f64 {
    let t = mu * 2f64.powi(-(k as i32));
    0.5 * t * t
}

/// Smallest `k ≥ from` with `½(2^{−k}μ)² ≤ density`.
fn first_level(from: i64, mu: f64, density: f64) -> i64 {
    let mut k = ((mu * mu / (2.0 * density)).log2() / 2.0).ceil() as i64;
    k = k.max(from);
    while k > from && level_threshold(k - 1, mu) <= density {
        k -= 1;
    }
    while level_threshold(k, mu) > density {
        k += 1;
    }
    k
}

/// Splits the tiles into levels `S_k`, `k ≥ 0`. At level `k` the densest
/// candidate subcollection of the remaining tiles is removed while its
/// density reaches `½(2^{−k}μ)²`; what is left moves to the next level.
/// Levels with nothing to extract are skipped.
pub fn size_decompose(table: &CoefficientTable, mu: f64) -> Result<SizeDecomposition> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(LabError::Parameter(format!("μ = {mu} must be finite and nonnegative")));
    }
    let mut out = SizeDecomposition { mu, levels: Vec::new(), null_tiles: Vec::new(), size_constant: 0.0 };
    if table.is_empty() {
        return Ok(out);
    }
    let engine = engine_for(table)?;
    let masses = table.masses();
    let all: Vec<usize> = (0..table.len()).collect();
    let top = engine.best(&all);
    if top.density.sqrt() > mu {
        return Err(LabError::SizeBound { mu, size: top.density.sqrt(), witness: top.items });
    }
    let (mut active, null): (Vec<usize>, Vec<usize>) = all.into_iter().partition(|&i| masses[i] > 0.0);
    out.null_tiles = null;
    let mut k = 0i64;
    while !active.is_empty() {
        let best = engine.best(&active);
        k = first_level(k, mu, best.density);
        if k > MAX_LEVEL {
            return Err(LabError::Parameter(format!("level index exceeds {MAX_LEVEL}")));
        }
        let threshold = level_threshold(k, mu);
        let mut level = SizeLevel { k, tiles: Vec::new(), extractions: Vec::new(), mass: 0.0, shadow: 0.0, size: 0.0 };
        let mut c = best;
        while !c.items.is_empty() && c.density >= threshold {
            active.retain(|i| c.items.binary_search(i).is_err());
            level.tiles.extend(&c.items);
            level.extractions.push(Extraction { tiles: c.items, mass: c.mass, shadow: c.measure });
            if active.is_empty() {
                break;
            }
            c = engine.best(&active);
        }
        level.tiles.sort_unstable();
        level.mass = level.tiles.iter().map(|&i| masses[i]).sum();
        level.shadow = engine.union_measure(&level.tiles);
        level.size = engine.best(&level.tiles).density.sqrt();
        out.size_constant = out.size_constant.max(level.size / (mu * 2f64.powi(-(k as i32))));
        out.levels.push(level);
        k += 1;
    }
    Ok(out)
}
