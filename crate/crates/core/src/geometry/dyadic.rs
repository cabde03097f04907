use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use super::{Bounds, Frame, Interval, Parallelepiped, Region, MAX_DIM};
use crate::error::{LabError, Result};

/// A rectangle that is dyadic in the coordinates of a frame: side `j` is
/// `[2^k_j · n_j, 2^k_j · (n_j + 1))`.
///
/// `frame_id` names the frame inside whatever family the rect belongs to;
/// equality, hashing and ordering use `(frame_id, scales, offsets)` only.
#[derive(Clone, Copy, Debug)]
pub struct DyadicRect {
    pub frame_id: usize,
    pub frame: Frame,
    scales: [i32; MAX_DIM],
    offsets: [i64; MAX_DIM],
}

impl DyadicRect {
    pub fn new(frame_id: usize, frame: Frame, scales: &[i32], offsets: &[i64]) -> Result<Self> {
        let d = frame.dim();
        if scales.len() != d || offsets.len() != d {
            return Err(LabError::Dimension { expected: d, got: scales.len().min(offsets.len()) });
        }
        let mut s = [0; MAX_DIM];
        let mut o = [0; MAX_DIM];
        s[..d].copy_from_slice(scales);
        o[..d].copy_from_slice(offsets);
        Ok(Self { frame_id, frame, scales: s, offsets: o })
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn scales(&self) -> &[i32] {
        &self.scales[..self.dim()]
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets[..self.dim()]
    }

    pub fn side(&self, j: usize) -> Interval {
        let len = pow2(self.scales[j]);
        let lo = len * self.offsets[j] as f64;
        Interval { lo, hi: lo + len, bounds: Bounds::HalfOpen }
    }

    pub fn side_length(&self, j: usize) -> f64 {
        pow2(self.scales[j])
    }

    pub fn to_parallelepiped(&self) -> Parallelepiped {
        let sides: Vec<Interval> = (0..self.dim()).map(|j| self.side(j)).collect();
        Parallelepiped::new(self.frame, &sides).expect("dyadic sides match frame")
    }

    pub fn volume(&self) -> f64 {
        self.frame.det().abs() * (0..self.dim()).map(|j| self.side_length(j)).product::<f64>()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.to_parallelepiped().contains(x)
    }

    /// Dyadic nesting `self ⊆ other` (same frame id required).
    pub fn is_subset_of(&self, other: &DyadicRect) -> bool {
        if self.frame_id != other.frame_id || self.dim() != other.dim() {
            return false;
        }
        (0..self.dim()).all(|j| {
            let gap = other.scales[j] - self.scales[j];
            gap >= 0 && shift_floor(self.offsets[j], gap as u32) == other.offsets[j]
        })
    }

    /// The ancestor obtained by raising the scale of axis `j` by `steps`.
    pub fn ancestor(&self, j: usize, steps: u32) -> DyadicRect {
        let mut out = *self;
        out.scales[j] += steps as i32;
        out.offsets[j] = shift_floor(self.offsets[j], steps);
        out
    }

    /// The unique rect at the given scales containing the point with frame
    /// coordinates `c`.
    pub fn containing_coords(frame_id: usize, frame: Frame, scales: &[i32], c: &[f64]) -> Self {
        let offsets: Vec<i64> = scales
            .iter()
            .zip(c)
            .map(|(&k, &t)| (t / pow2(k)).floor() as i64)
            .collect();
        Self::new(frame_id, frame, scales, &offsets).expect("dimensions match")
    }

    fn key(&self) -> (usize, usize, [i32; MAX_DIM], [i64; MAX_DIM]) {
        (self.frame_id, self.dim(), self.scales, self.offsets)
    }
}

impl PartialEq for DyadicRect {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for DyadicRect {}

impl Hash for DyadicRect {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for DyadicRect {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRect {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

#[inline]
pub(crate) fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

fn shift_floor(n: i64, steps: u32) -> i64 {
    if steps >= 63 {
        if n < 0 {
            -1
        } else {
            0
        }
    } else {
        n >> steps
    }
}

/// Scales `k_j` with `1 ≤ 2^k_j · |ω_j| < 2` for each side of `ω`.
pub fn dual_scales(omega: &Parallelepiped) -> Result<Vec<i32>> {
    omega
        .sides()
        .iter()
        .map(|s| {
            let len = s.length();
            if !(len > 0.0) || !len.is_finite() {
                return Err(LabError::Degenerate(format!("side length {len} is not positive")));
            }
            let mut k = (-len.log2()).ceil() as i32;
            while pow2(k) * len < 1.0 {
                k += 1;
            }
            while pow2(k) * len >= 2.0 {
                k -= 1;
            }
            Ok(k)
        })
        .collect()
}

/// All dyadic rects at the given scales in `frame` whose interiors meet
/// `region`, sorted and duplicate-free.
pub fn dyadic_rects_meeting(frame_id: usize, frame: &Frame, scales: &[i32], region: &Region) -> Result<Vec<DyadicRect>> {
    let d = frame.dim();
    if scales.len() != d || region.dim() != d {
        return Err(LabError::Dimension { expected: d, got: scales.len() });
    }
    let bounds = region.coord_bounds(frame);
    let ranges: Vec<(i64, i64)> = bounds
        .iter()
        .zip(scales)
        .map(|(&(lo, hi), &k)| {
            let len = pow2(k);
            ((lo / len).floor() as i64 - 1, (hi / len).ceil() as i64 + 1)
        })
        .collect();
    let mut out = Vec::new();
    let mut offsets = vec![0i64; d];
    let mut visit = |offsets: &[i64]| {
        let r = DyadicRect::new(frame_id, *frame, scales, offsets).expect("dimensions match");
        if region.meets(&r.to_parallelepiped()) {
            out.push(r);
        }
    };
    match d {
        1 => {
            for a in ranges[0].0..=ranges[0].1 {
                offsets[0] = a;
                visit(&offsets);
            }
        }
        _ => {
            for a in ranges[0].0..=ranges[0].1 {
                for b in ranges[1].0..=ranges[1].1 {
                    offsets[0] = a;
                    offsets[1] = b;
                    visit(&offsets);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}
