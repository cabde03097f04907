use super::{Parallelepiped, MAX_DIM};
use crate::error::{LabError, Result};

/// A decomposition of the plane (or line) into cells that resolves a fixed
/// list of rects, used to measure unions of those rects and to decide
/// containment of one rect in a union of others.
///
/// When every rect shares one frame the cells are the coordinate-compressed
/// boxes in frame coordinates and all answers are exact. Otherwise the cells
/// are grid cells of a declared spacing, and a cell belongs to a rect when
/// its center does.
#[derive(Clone, Debug)]
pub struct Arrangement {
    cell_measure: Vec<f64>,
    own: Vec<Vec<usize>>,
    resolution: Option<f64>,
}

impl Arrangement {
    /// Exact arrangement when the rects share a frame; otherwise a sampled
    /// one at `spacing` (which must then be given).
    pub fn build(rects: &[Parallelepiped], spacing: Option<f64>) -> Result<Self> {
        let shared = rects.windows(2).all(|w| w[0].frame == w[1].frame);
        if shared {
            Ok(Self::exact(rects))
        } else {
            let h = spacing.ok_or_else(|| {
                LabError::Parameter("rects in several frames need a sampling resolution".into())
            })?;
            Self::sampled(rects, h)
        }
    }

    fn exact(rects: &[Parallelepiped]) -> Self {
        if rects.is_empty() {
            return Self { cell_measure: Vec::new(), own: Vec::new(), resolution: None };
        }
        let d = rects[0].dim();
        let det = rects[0].frame.det().abs();
        let cuts: Vec<Vec<f64>> = (0..d)
            .map(|j| {
                let mut v: Vec<f64> = rects.iter().flat_map(|r| [r.side(j).lo, r.side(j).hi]).collect();
                v.sort_by(f64::total_cmp);
                v.dedup();
                v
            })
            .collect();
        let counts: Vec<usize> = cuts.iter().map(|c| c.len() - 1).collect();
        let stride1 = if d == 2 { counts[1] } else { 1 };
        let total: usize = counts.iter().product();
        let mut cell_measure = vec![det; total];
        for (idx, m) in cell_measure.iter_mut().enumerate() {
            let i0 = idx / stride1;
            *m *= cuts[0][i0 + 1] - cuts[0][i0];
            if d == 2 {
                let i1 = idx % stride1;
                *m *= cuts[1][i1 + 1] - cuts[1][i1];
            }
        }
        let locate = |j: usize, t: f64| cuts[j].partition_point(|&c| c < t);
        let own: Vec<Vec<usize>> = rects
            .iter()
            .map(|r| {
                let (a0, a1) = (locate(0, r.side(0).lo), locate(0, r.side(0).hi));
                if d == 1 {
                    (a0..a1).collect()
                } else {
                    let (b0, b1) = (locate(1, r.side(1).lo), locate(1, r.side(1).hi));
                    (a0..a1).flat_map(|i| (b0..b1).map(move |k| i * stride1 + k)).collect()
                }
            })
            .collect();
        Self { cell_measure, own, resolution: None }
    }

    fn sampled(rects: &[Parallelepiped], h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(LabError::Parameter(format!("sampling spacing {h} must be positive")));
        }
        let d = rects[0].dim();
        let mut lo = [f64::INFINITY; MAX_DIM];
        let mut hi = [f64::NEG_INFINITY; MAX_DIM];
        for r in rects {
            for (j, (a, b)) in r.bounding_box().into_iter().enumerate() {
                lo[j] = lo[j].min(a);
                hi[j] = hi[j].max(b);
            }
        }
        let start: Vec<i64> = (0..d).map(|j| (lo[j] / h).floor() as i64 - 1).collect();
        let count: Vec<usize> = (0..d).map(|j| ((hi[j] / h).ceil() as i64 + 1 - start[j]) as usize + 1).collect();
        let stride1 = if d == 2 { count[1] } else { 1 };
        let total: usize = count.iter().product();
        let cell_box = |idx: usize| {
            let i0 = (idx / stride1) as i64 + start[0];
            let i1 = if d == 2 { (idx % stride1) as i64 + start[1] } else { 0 };
            [i0 as f64 * h, i1 as f64 * h]
        };
        let mut own = Vec::with_capacity(rects.len());
        for r in rects {
            let bb = r.bounding_box();
            let range = |j: usize| {
                let a = ((bb[j].0 / h).floor() as i64 - 1 - start[j]).max(0) as usize;
                let b = (((bb[j].1 / h).ceil() as i64 + 1 - start[j]) as usize).min(count[j] - 1);
                a..=b
            };
            let mut o = Vec::new();
            let rows: Vec<usize> = range(0).collect();
            let cols: Vec<usize> = if d == 2 { range(1).collect() } else { vec![0] };
            for &i in &rows {
                for &k in &cols {
                    let idx = i * stride1 + k;
                    let corner = cell_box(idx);
                    let center = [corner[0] + 0.5 * h, corner[1] + 0.5 * h];
                    if r.contains(&center[..d]) {
                        o.push(idx);
                    }
                }
            }
            own.push(o);
        }
        Ok(Self { cell_measure: vec![h.powi(d as i32); total], own, resolution: Some(h) })
    }

    pub fn len(&self) -> usize {
        self.own.len()
    }

    pub fn is_empty(&self) -> bool {
        self.own.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.resolution.is_none()
    }

    /// Sampling spacing, when the arrangement is not exact.
    pub fn resolution(&self) -> Option<f64> {
        self.resolution
    }

    /// Cell mask of the union of the listed rects.
    pub fn union_mask<I: IntoIterator<Item = usize>>(&self, items: I) -> Vec<bool> {
        let mut mask = vec![false; self.cell_measure.len()];
        for i in items {
            self.extend_mask(&mut mask, i);
        }
        mask
    }

    pub fn extend_mask(&self, mask: &mut [bool], item: usize) {
        for &c in &self.own[item] {
            mask[c] = true;
        }
    }

    pub fn measure(&self, mask: &[bool]) -> f64 {
        mask.iter().zip(&self.cell_measure).filter(|(m, _)| **m).map(|(_, w)| w).sum()
    }

    pub fn item_measure(&self, item: usize) -> f64 {
        self.own[item].iter().map(|&c| self.cell_measure[c]).sum()
    }

    pub fn contained(&self, item: usize, mask: &[bool]) -> bool {
        !self.own[item].is_empty() && self.own[item].iter().all(|&c| mask[c])
    }
}
