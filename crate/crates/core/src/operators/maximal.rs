use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::geometry::{Direction, Frame, MAX_DIM};
use crate::grid::{GridFunction, GridSpec};

/// Slack on `ε/h` before taking the floor, so lengths that are exact
/// multiples of the grid step keep their sample count.
const STEP_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaximalMode {
    /// Centered averages over segments `x − v·y`, `|y| ≤ ε`.
    Segment,
    /// Averages over translates of parallelepipeds containing `x`.
    Rect,
}

/// A parallelepiped shape: a frame whose first axis is one of the spec's
/// directions, and full side lengths along its axes.
#[derive(Clone, Debug, PartialEq)]
pub struct RectShape {
    pub frame: Frame,
    pub sides: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximalSpec {
    pub mode: MaximalMode,
    pub directions: Vec<Direction>,
    /// Segment half-lengths `ε`, for segment mode.
    pub lengths: Vec<f64>,
    /// Shapes, for rect mode.
    pub shapes: Vec<RectShape>,
}

impl MaximalSpec {
    pub fn segment(directions: Vec<Direction>, mut lengths: Vec<f64>) -> Result<Self> {
        lengths.sort_by(f64::total_cmp);
        let spec = Self { mode: MaximalMode::Segment, directions, lengths, shapes: Vec::new() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rect(directions: Vec<Direction>, shapes: Vec<RectShape>) -> Result<Self> {
        let spec = Self { mode: MaximalMode::Rect, directions, lengths: Vec::new(), shapes };
        spec.validate()?;
        Ok(spec)
    }

    /// Rect-mode spec with, for each direction `v` and each `ε`, the shape
    /// `2ε × thickness` in the frame `(v, v⊥)` (or `2ε` in one dimension).
    pub fn rect_from_segments(directions: Vec<Direction>, lengths: &[f64], thickness: f64) -> Result<Self> {
        let mut shapes = Vec::new();
        for v in &directions {
            let frame = match v.dim() {
                1 => Frame::new(&[*v])?,
                _ => {
                    let c = v.components();
                    Frame::new(&[*v, Direction::new(&[-c[1], c[0]])?])?
                }
            };
            for &e in lengths {
                let sides = if v.dim() == 1 { vec![2.0 * e] } else { vec![2.0 * e, thickness] };
                shapes.push(RectShape { frame, sides });
            }
        }
        Self::rect(directions, shapes)
    }

    pub fn validate(&self) -> Result<()> {
        if self.directions.is_empty() {
            return Err(LabError::Parameter("maximal function needs at least one direction".into()));
        }
        let d = self.directions[0].dim();
        if self.directions.iter().any(|v| v.dim() != d) {
            return Err(LabError::Parameter("directions of mixed dimension".into()));
        }
        match self.mode {
            MaximalMode::Segment => {
                if self.lengths.is_empty() || self.lengths.iter().any(|&e| !(e > 0.0) || !e.is_finite()) {
                    return Err(LabError::Parameter("segment lengths must be positive".into()));
                }
                if self.lengths.windows(2).any(|w| w[0] > w[1]) {
                    return Err(LabError::Parameter("segment lengths must be sorted".into()));
                }
            }
            MaximalMode::Rect => {
                if self.shapes.is_empty() {
                    return Err(LabError::Parameter("rect mode needs at least one shape".into()));
                }
                for s in &self.shapes {
                    if s.frame.dim() != d || s.sides.len() != d {
                        return Err(LabError::Dimension { expected: d, got: s.sides.len() });
                    }
                    if s.sides.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                        return Err(LabError::Parameter("rect sides must be positive".into()));
                    }
                    let a = s.frame.axis(0);
                    let drawn = self.directions.iter().any(|v| {
                        let dot: f64 = a.components().iter().zip(v.components()).map(|(x, y)| x * y).sum();
                        (dot.abs() - 1.0).abs() < 1e-12
                    });
                    if !drawn {
                        return Err(LabError::Parameter("first axis of a rect frame must be one of the directions".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.directions[0].dim()
    }
}

/// Number of samples on each side of the center covering half-length `e`
/// at grid step `h`.
pub(crate) fn half_count(e: f64, h: f64) -> i64 {
    (e / h + STEP_SLACK).floor() as i64
}

/// Grid offsets `round(v·j)`, `j = −m..=m`, of a centered segment.
pub(crate) fn segment_offsets(v: &Direction, m: i64) -> Vec<[i64; MAX_DIM]> {
    let c = v.components();
    (-m..=m)
        .map(|j| {
            let mut o = [0i64; MAX_DIM];
            for (k, ck) in c.iter().enumerate() {
                o[k] = (ck * j as f64).round() as i64;
            }
            o
        })
        .collect()
}

/// Grid offsets of a centered rect: samples at steps of one grid cell along
/// each frame axis, rounded to the grid, listed with multiplicity.
pub(crate) fn rect_offsets(shape: &RectShape, h: f64) -> Vec<[i64; MAX_DIM]> {
    let d = shape.frame.dim();
    let m: Vec<i64> = shape.sides.iter().map(|&s| half_count(0.5 * s, h)).collect();
    let axes = shape.frame.axes();
    let mut out = Vec::new();
    let outer = if d == 2 { m[1] } else { 0 };
    for j0 in -m[0]..=m[0] {
        for j1 in -outer..=outer {
            let mut o = [0i64; MAX_DIM];
            for (k, ok) in o.iter_mut().enumerate().take(d) {
                let mut y = axes[0].components()[k] * j0 as f64;
                if d == 2 {
                    y += axes[1].components()[k] * j1 as f64;
                }
                *ok = y.round() as i64;
            }
            out.push(o);
        }
    }
    out
}

/// Averages of `|f|` over `x + offsets`, summed in list order.
fn centered_averages(spec: &GridSpec, abs: &[f64], offsets: &[[i64; MAX_DIM]]) -> Vec<f64> {
    let count = offsets.len() as f64;
    let d = spec.dim();
    let mut out = vec![0.0; spec.len()];
    out.par_iter_mut().enumerate().for_each(|(idx, o)| {
        let base = spec.multi_index(idx);
        let mut s = 0.0;
        for off in offsets {
            let p = match d {
                1 => spec.wrapped_index(&[base[0] as i64 + off[0]]),
                _ => spec.wrapped_index(&[base[0] as i64 + off[0], base[1] as i64 + off[1]]),
            };
            s += abs[p];
        }
        *o = s / count;
    });
    out
}

/// The directional maximal function of `f` over the finite family in `spec`.
pub fn maximal(f: &GridFunction, spec: &MaximalSpec) -> Result<GridFunction> {
    spec.validate()?;
    let grid = *f.spec();
    if spec.dim() != grid.dim() {
        return Err(LabError::Dimension { expected: grid.dim(), got: spec.dim() });
    }
    let h = grid.spacing();
    let abs: Vec<f64> = f.samples().iter().map(|z| z.norm()).collect();
    let mut best = vec![0.0f64; grid.len()];
    match spec.mode {
        MaximalMode::Segment => {
            for v in &spec.directions {
                for &e in &spec.lengths {
                    let avg = centered_averages(&grid, &abs, &segment_offsets(v, half_count(e, h)));
                    best.iter_mut().zip(&avg).for_each(|(b, a)| *b = b.max(*a));
                }
            }
        }
        MaximalMode::Rect => {
            let d = grid.dim();
            for shape in &spec.shapes {
                let offsets = rect_offsets(shape, h);
                let avg = centered_averages(&grid, &abs, &offsets);
                let mut distinct = offsets.clone();
                distinct.sort();
                distinct.dedup();
                best.par_iter_mut().enumerate().for_each(|(idx, b)| {
                    let base = grid.multi_index(idx);
                    for o in &distinct {
                        // x lies in the rect centered at x − o.
                        let c = match d {
                            1 => grid.wrapped_index(&[base[0] as i64 - o[0]]),
                            _ => grid.wrapped_index(&[base[0] as i64 - o[0], base[1] as i64 - o[1]]),
                        };
                        *b = b.max(avg[c]);
                    }
                });
            }
        }
    }
    GridFunction::new(grid, best.into_iter().map(|b| Complex64::new(b, 0.0)).collect())
}
