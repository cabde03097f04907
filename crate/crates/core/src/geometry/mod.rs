//! Directions, frames, rotated parallelepipeds and sectors, dyadic
//! rectangles, and the duality relation between frequency boxes and
//! spatial rectangles.
//!
//! All shapes are products of intervals in the coordinates of a [`Frame`]:
//! a point `x` has frame coordinates `c` with `x = Σ c_j · axis_j`.
//! Dimensions 1 and 2 are supported; storage uses fixed arrays of length
//! [`MAX_DIM`] with unused trailing entries set to zero.

mod arrangement;
mod dyadic;
mod json;

pub use arrangement::Arrangement;
pub use dyadic::{dual_scales, dyadic_rects_meeting, DyadicRect};

use crate::error::{LabError, Result};

pub const MAX_DIM: usize = 2;

/// Tolerance on `|v| = 1` for directions.
pub const UNIT_TOL: f64 = 1e-12;
/// Smallest admissible `|det|` of a frame.
pub const MIN_DET: f64 = 1e-9;
/// Largest admissible condition number of a frame.
pub const MAX_CONDITION: f64 = 1e9;

/// Frame coordinates this close to zero (relative to the point's size) are
/// snapped to zero, so lattice points on a boundary ray get one consistent
/// decision from every frame that shares the ray.
const SNAP_REL: f64 = 1e-12;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 || d > MAX_DIM {
        return Err(LabError::Parameter(format!("dimension {d} not in {{1, 2}}")));
    }
    Ok(())
}

/// A unit vector in `R^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    dim: usize,
    comps: [f64; MAX_DIM],
}

impl Direction {
    pub fn new(components: &[f64]) -> Result<Self> {
        check_dim(components.len())?;
        let norm = components.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(LabError::Parameter(format!(
                "direction {components:?} has norm {norm}, expected 1"
            )));
        }
        let mut comps = [0.0; MAX_DIM];
        comps[..components.len()].copy_from_slice(components);
        Ok(Self { dim: components.len(), comps })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LabError::Degenerate("zero direction".into()));
        }
        let scaled: Vec<f64> = v.iter().map(|c| c / norm).collect();
        Self::new(&scaled)
    }

    pub fn from_angle(theta: f64) -> Self {
        Self { dim: 2, comps: [theta.cos(), theta.sin()] }
    }

    /// The `j`-th standard basis vector of `R^d`.
    pub fn basis(d: usize, j: usize) -> Self {
        let mut comps = [0.0; MAX_DIM];
        comps[j] = 1.0;
        Self { dim: d, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.comps[..self.dim]
    }
}

/// An ordered basis of unit directions with its precomputed inverse.
#[derive(Clone, Copy, Debug)]
pub struct Frame {
    dim: usize,
    /// `axes[j]` is the `j`-th axis.
    axes: [[f64; MAX_DIM]; MAX_DIM],
    /// `inv[j]` is the row mapping a point to its `j`-th frame coordinate.
    inv: [[f64; MAX_DIM]; MAX_DIM],
    det: f64,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.axes == other.axes
    }
}

impl Frame {
    pub fn new(axes: &[Direction]) -> Result<Self> {
        let dim = axes.len();
        check_dim(dim)?;
        if axes.iter().any(|a| a.dim != dim) {
            return Err(LabError::Dimension { expected: dim, got: axes[0].dim });
        }
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        for (j, a) in axes.iter().enumerate() {
            m[j] = a.comps;
        }
        match dim {
            1 => {
                let det = m[0][0];
                if det.abs() < MIN_DET {
                    return Err(LabError::Degenerate("zero axis".into()));
                }
                Ok(Self { dim, axes: m, inv: [[1.0 / det, 0.0], [0.0, 0.0]], det })
            }
            _ => {
                // Columns of the axis matrix are the axes: A = [a0 a1].
                let (a, b, c, d) = (m[0][0], m[1][0], m[0][1], m[1][1]);
                let det = a * d - b * c;
                if det.abs() < MIN_DET {
                    return Err(LabError::Degenerate(format!(
                        "axes are linearly dependent (det = {det:.3e})"
                    )));
                }
                let inv = [[d / det, -b / det], [-c / det, a / det]];
                let cond = spectral_norm2(a, b, c, d) * spectral_norm2(inv[0][0], inv[0][1], inv[1][0], inv[1][1]);
                if cond > MAX_CONDITION {
                    return Err(LabError::IllConditioned(cond));
                }
                Ok(Self { dim, axes: m, inv, det })
            }
        }
    }

    pub fn standard(d: usize) -> Self {
        let axes: Vec<Direction> = (0..d).map(|j| Direction::basis(d, j)).collect();
        Self::new(&axes).expect("standard frame is valid")
    }

    /// Orthonormal frame with first axis at angle `theta`.
    pub fn rotated(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(&[
            Direction { dim: 2, comps: [c, s] },
            Direction { dim: 2, comps: [-s, c] },
        ])
        .expect("rotation frame is valid")
    }

    /// Frame spanned by two unit directions at the given angles.
    pub fn from_angles(theta0: f64, theta1: f64) -> Result<Self> {
        Self::new(&[Direction::from_angle(theta0), Direction::from_angle(theta1)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn axis(&self, j: usize) -> Direction {
        Direction { dim: self.dim, comps: self.axes[j] }
    }

    pub fn axes(&self) -> Vec<Direction> {
        (0..self.dim).map(|j| self.axis(j)).collect()
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn is_orthonormal(&self, tol: f64) -> bool {
        if self.dim == 1 {
            return true;
        }
        let dot = self.axes[0][0] * self.axes[1][0] + self.axes[0][1] * self.axes[1][1];
        dot.abs() <= tol
    }

    /// Frame coordinates of a point.
    #[inline]
    pub fn coords(&self, x: &[f64]) -> [f64; MAX_DIM] {
        let mut c = [0.0; MAX_DIM];
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..self.dim {
            let mut s = 0.0;
            for (i, xi) in x.iter().enumerate().take(self.dim) {
                s += self.inv[j][i] * xi;
            }
            if s.abs() <= SNAP_REL * scale {
                s = 0.0;
            }
            c[j] = s;
        }
        c
    }

    /// Point with the given frame coordinates.
    #[inline]
    pub fn point(&self, c: &[f64]) -> [f64; MAX_DIM] {
        let mut x = [0.0; MAX_DIM];
        for (j, cj) in c.iter().enumerate().take(self.dim) {
            for (i, xi) in x.iter_mut().enumerate().take(self.dim) {
                *xi += cj * self.axes[j][i];
            }
        }
        x
    }

    /// Row `j` of the inverse map.
    pub(crate) fn inverse_row(&self, j: usize) -> [f64; MAX_DIM] {
        self.inv[j]
    }
}

/// Largest singular value of the 2×2 matrix [[a, b], [c, d]].
fn spectral_norm2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let s1 = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = (s1 * s1 - 4.0 * det * det).max(0.0).sqrt();
    ((s1 + disc) / 2.0).sqrt()
}

/// Which endpoints belong to an [`Interval`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Bounds {
    /// `[lo, hi)`
    #[default]
    HalfOpen,
    /// `[lo, hi]`
    Closed,
    /// `(lo, hi)`
    Open,
    /// `(lo, hi]`
    LeftOpen,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub bounds: Bounds,
}

impl Interval {
    /// Half-open interval `[lo, hi)`.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::with_bounds(lo, hi, Bounds::HalfOpen)
    }

    pub fn with_bounds(lo: f64, hi: f64, bounds: Bounds) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(LabError::Degenerate(format!("interval [{lo}, {hi}) has no length")));
        }
        Ok(Self { lo, hi, bounds })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        let lo_ok = match self.bounds {
            Bounds::HalfOpen | Bounds::Closed => t >= self.lo,
            Bounds::Open | Bounds::LeftOpen => t > self.lo,
        };
        let hi_ok = match self.bounds {
            Bounds::HalfOpen | Bounds::Open => t < self.hi,
            Bounds::Closed | Bounds::LeftOpen => t <= self.hi,
        };
        lo_ok && hi_ok
    }

    /// Concentric dilate by `factor` with the same endpoint convention.
    pub fn dilate(&self, factor: f64) -> Self {
        let c = self.center();
        let half = 0.5 * factor * self.length();
        Self { lo: c - half, hi: c + half, bounds: self.bounds }
    }

    /// Distance from `t` to the interval (zero inside or on the boundary).
    pub fn distance(&self, t: f64) -> f64 {
        (self.lo - t).max(t - self.hi).max(0.0)
    }
}

/// A product of intervals in the coordinates of a frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parallelepiped {
    pub frame: Frame,
    sides: [Interval; MAX_DIM],
}

impl Parallelepiped {
    pub fn new(frame: Frame, sides: &[Interval]) -> Result<Self> {
        if sides.len() != frame.dim() {
            return Err(LabError::Dimension { expected: frame.dim(), got: sides.len() });
        }
        let mut s = [sides[0]; MAX_DIM];
        s[..sides.len()].copy_from_slice(sides);
        Ok(Self { frame, sides: s })
    }

    /// Axis-aligned box `Π [lo_j, hi_j)` in the standard frame.
    pub fn axis_aligned(bounds: &[(f64, f64)]) -> Result<Self> {
        let sides = bounds
            .iter()
            .map(|&(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        Self::new(Frame::standard(bounds.len()), &sides)
    }

    pub fn dim(&self) -> usize {
        self.frame.dim()
    }

    pub fn sides(&self) -> &[Interval] {
        &self.sides[..self.dim()]
    }

    pub fn side(&self, j: usize) -> Interval {
        self.sides[j]
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        let c = self.frame.coords(x);
        self.contains_coords(&c)
    }

    #[inline]
    pub fn contains_coords(&self, c: &[f64]) -> bool {
        self.sides().iter().zip(c).all(|(s, &t)| s.contains(t))
    }

    pub fn volume(&self) -> f64 {
        self.frame.det().abs() * self.sides().iter().map(Interval::length).product::<f64>()
    }

    pub fn center(&self) -> [f64; MAX_DIM] {
        let c: Vec<f64> = self.sides().iter().map(Interval::center).collect();
        self.frame.point(&c)
    }

    /// Concentric dilate of every side by `factor`.
    pub fn dilate(&self, factor: f64) -> Self {
        let mut out = *self;
        for j in 0..self.dim() {
            out.sides[j] = self.sides[j].dilate(factor);
        }
        out
    }

    /// The concentric double `2P`.
    pub fn doubled(&self) -> Self {
        self.dilate(2.0)
    }

    /// Corner points in counterclockwise order (for `d = 2`, when the frame
    /// has positive orientation).
    pub fn vertices(&self) -> Vec<[f64; MAX_DIM]> {
        let s = self.sides();
        match self.dim() {
            1 => vec![self.frame.point(&[s[0].lo]), self.frame.point(&[s[0].hi])],
            _ => {
                let mut v = vec![
                    self.frame.point(&[s[0].lo, s[1].lo]),
                    self.frame.point(&[s[0].hi, s[1].lo]),
                    self.frame.point(&[s[0].hi, s[1].hi]),
                    self.frame.point(&[s[0].lo, s[1].hi]),
                ];
                if self.frame.det() < 0.0 {
                    v.reverse();
                }
                v
            }
        }
    }

    /// Bounding box in standard coordinates, per axis `(min, max)`.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let verts = self.vertices();
        (0..self.dim())
            .map(|i| {
                verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v[i]), hi.max(v[i]))
                })
            })
            .collect()
    }

    /// Whether the interiors intersect (positive-measure overlap).
    pub fn interiors_intersect(&self, other: &Parallelepiped) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        if self.dim() == 1 {
            let (a0, a1) = self.bounding_box()[0];
            let (b0, b1) = other.bounding_box()[0];
            return a0.max(b0) < a1.min(b1);
        }
        convex_interiors_intersect(&self.vertices(), &other.vertices())
    }
}

/// Separating-axis test for two convex polygons; touching boundaries count
/// as disjoint.
pub(crate) fn convex_interiors_intersect(a: &[[f64; MAX_DIM]], b: &[[f64; MAX_DIM]]) -> bool {
    let scale = a
        .iter()
        .chain(b)
        .fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()))
        .max(1.0);
    let eps = 1e-12 * scale;
    for poly in [a, b] {
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let normal = [-(q[1] - p[1]), q[0] - p[0]];
            let project = |pts: &[[f64; MAX_DIM]]| {
                pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    let t = normal[0] * v[0] + normal[1] * v[1];
                    (lo.min(t), hi.max(t))
                })
            };
            let (a0, a1) = project(a);
            let (b0, b1) = project(b);
            let nlen = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
            if a1.min(b1) - a0.max(b0) <= eps * nlen {
                return false;
            }
        }
    }
    true
}

/// A sector with vertex at the origin, represented by its truncation to
/// frame coordinates in `(0, T]` on the first axis and `[0, T]` on the rest.
///
/// The endpoint convention makes a fan of sectors whose consecutive frames
/// share an axis a partition of the punctured plane: each sector owns the
/// ray along its first axis and none of the others.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sector {
    pub frame: Frame,
    pub truncation: f64,
}

impl Sector {
    pub fn new(frame: Frame, truncation: f64) -> Result<Self> {
        if !(truncation > 0.0) {
            return Err(LabError::Parameter(format!("sector truncation {truncation} must be positive")));
        }
        Ok(Self { frame, truncation })
    }

    pub fn to_parallelepiped(&self) -> Parallelepiped {
        let t = self.truncation;
        let mut sides = vec![Interval { lo: 0.0, hi: t, bounds: Bounds::LeftOpen }];
        for _ in 1..self.frame.dim() {
            sides.push(Interval { lo: 0.0, hi: t, bounds: Bounds::Closed });
        }
        Parallelepiped::new(self.frame, &sides).expect("sector sides match frame")
    }

    /// The `count` sectors of a uniform fan with opening `2π/count`, the
    /// first starting at angle `phase`.
    pub fn uniform_fan(count: usize, truncation: f64, phase: f64) -> Result<Vec<Sector>> {
        if count < 3 {
            return Err(LabError::Parameter("a sector fan needs at least 3 sectors".into()));
        }
        let step = std::f64::consts::TAU / count as f64;
        (0..count)
            .map(|j| {
                let frame = Frame::from_angles(phase + j as f64 * step, phase + (j + 1) as f64 * step)?;
                Sector::new(frame, truncation)
            })
            .collect()
    }
}

/// A bounded region used to enumerate dyadic rectangles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    Box(Parallelepiped),
    Disk { center: [f64; MAX_DIM], radius: f64, dim: usize },
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Box(p) => p.dim(),
            Region::Disk { dim, .. } => *dim,
        }
    }

    /// Whether the open region and the interior of `p` intersect.
    pub fn meets(&self, p: &Parallelepiped) -> bool {
        match self {
            Region::Box(b) => b.interiors_intersect(p),
            Region::Disk { center, radius, dim } => {
                if *dim == 1 {
                    let (lo, hi) = p.bounding_box()[0];
                    return center[0] + radius > lo && center[0] - radius < hi;
                }
                polygon_distance(&p.vertices(), center) < *radius
            }
        }
    }

    /// Frame-coordinate bounding box of the region.
    pub(crate) fn coord_bounds(&self, frame: &Frame) -> Vec<(f64, f64)> {
        match self {
            Region::Box(b) => {
                let verts = b.vertices();
                (0..frame.dim())
                    .map(|j| {
                        verts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                            let c = frame.coords(&v[..frame.dim()])[j];
                            (lo.min(c), hi.max(c))
                        })
                    })
                    .collect()
            }
            Region::Disk { center, radius, dim } => {
                let c = frame.coords(&center[..*dim]);
                (0..frame.dim())
                    .map(|j| {
                        let row = frame.inverse_row(j);
                        let r = radius * (row[0] * row[0] + row[1] * row[1]).sqrt();
                        (c[j] - r, c[j] + r)
                    })
                    .collect()
            }
        }
    }
}

/// Euclidean distance from `x` to a closed convex polygon.
fn polygon_distance(poly: &[[f64; MAX_DIM]], x: &[f64; MAX_DIM]) -> f64 {
    let inside = (0..poly.len()).all(|i| {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        (q[0] - p[0]) * (x[1] - p[1]) - (q[1] - p[1]) * (x[0] - p[0]) >= 0.0
    });
    if inside {
        return 0.0;
    }
    (0..poly.len())
        .map(|i| segment_distance(poly[i], poly[(i + 1) % poly.len()], *x))
        .fold(f64::INFINITY, f64::min)
}

fn segment_distance(p: [f64; MAX_DIM], q: [f64; MAX_DIM], x: [f64; MAX_DIM]) -> f64 {
    let d = [q[0] - p[0], q[1] - p[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = (((x[0] - p[0]) * d[0] + (x[1] - p[1]) * d[1]) / len2).clamp(0.0, 1.0);
    let e = [p[0] + t * d[0] - x[0], p[1] + t * d[1] - x[1]];
    (e[0] * e[0] + e[1] * e[1]).sqrt()
}

/// Number of rects whose concentric double contains `x`.
pub fn overlap_count(rects: &[Parallelepiped], x: &[f64]) -> usize {
    rects.iter().filter(|p| p.doubled().contains(x)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_square() -> Parallelepiped {
        Parallelepiped::axis_aligned(&[(0.0, 1.0), (0.0, 1.0)]).unwrap()
    }

    #[test]
    fn contains_interior_and_half_open_boundary() {
        let p = unit_square();
        assert!(p.contains(&[0.5, 0.5]));
        assert!(!p.contains(&[1.0, 0.5]));
        assert!(p.contains(&[0.0, 0.0]));
    }

    #[test]
    fn contains_in_skew_frame() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let frame = Frame::new(&[Direction::new(&[1.0, 0.0]).unwrap(), Direction::new(&[s, s]).unwrap()]).unwrap();
        let p = Parallelepiped::new(frame, &[Interval::new(0.0, 1.0).unwrap(), Interval::new(0.0, 1.0).unwrap()]).unwrap();
        // (1.2, 0.5) = 0.7·(1,0) + (0.5·√2)·(1/√2, 1/√2)
        let c = frame.coords(&[1.2, 0.5]);
        assert!((c[0] - 0.7).abs() < 1e-15);
        assert!((c[1] - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        assert!(p.contains(&[1.2, 0.5]));
    }

    #[test]
    fn frame_rejects_degenerate_axes() {
        let a = Direction::new(&[1.0, 0.0]).unwrap();
        assert!(matches!(Frame::new(&[a, a]), Err(LabError::Degenerate(_))));
        let b = Direction::from_angle(1e-10);
        assert!(matches!(Frame::new(&[a, b]), Err(LabError::Degenerate(_))));
        let c = Direction::from_angle(1.5e-9);
        assert!(matches!(Frame::new(&[a, c]), Err(LabError::IllConditioned(_))));
        assert!(Frame::new(&[a, Direction::from_angle(1e-8)]).is_ok());
    }

    #[test]
    fn frame_inverse_is_exact_enough() {
        let f = Frame::from_angles(0.3, 1.9).unwrap();
        for c in [[1.0, 0.0], [0.0, 1.0], [0.3, -2.0]] {
            let x = f.point(&c);
            let back = f.coords(&x);
            assert!((back[0] - c[0]).abs() < 1e-9 && (back[1] - c[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn direction_requires_unit_norm() {
        assert!(Direction::new(&[1.0, 1.0]).is_err());
        assert!(Direction::normalized(&[3.0, 4.0]).is_ok());
    }

    #[test]
    fn overlap_count_examples() {
        let a = Parallelepiped::axis_aligned(&[(0.0, 1.0)]).unwrap();
        let b = Parallelepiped::axis_aligned(&[(1.0, 2.0)]).unwrap();
        assert_eq!(overlap_count(&[a], &[-0.4]), 1);
        assert_eq!(overlap_count(&[a, b], &[0.9]), 2);
        assert_eq!(overlap_count(&[], &[0.0]), 0);
    }

    #[test]
    fn double_contains_original() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let frame = Frame::from_angles(0.4, 1.3).unwrap();
        let p = Parallelepiped::new(frame, &[Interval::new(-0.3, 0.8).unwrap(), Interval::new(0.1, 0.4).unwrap()]).unwrap();
        let d = p.doubled();
        for _ in 0..10_000 {
            let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            if p.contains(&x) {
                assert!(d.contains(&x));
            }
        }
    }

    #[test]
    fn contains_matches_explicit_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (t0, t1) = (0.35f64, 1.7f64);
        let frame = Frame::from_angles(t0, t1).unwrap();
        let p = Parallelepiped::new(frame, &[Interval::new(-0.5, 0.7).unwrap(), Interval::new(0.2, 1.1).unwrap()]).unwrap();
        for _ in 0..10_000 {
            let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
            // Cramer's rule on [a0 a1] c = x.
            let (a, b, c, d) = (t0.cos(), t1.cos(), t0.sin(), t1.sin());
            let det = a * d - b * c;
            let c0 = (x[0] * d - b * x[1]) / det;
            let c1 = (a * x[1] - c * x[0]) / det;
            let expect = (-0.5..0.7).contains(&c0) && (0.2..1.1).contains(&c1);
            assert_eq!(p.contains(&x), expect, "x = {x:?}");
        }
    }

    #[test]
    fn fan_partitions_lattice_points() {
        for count in [8usize, 12, 16] {
            let fan: Vec<Parallelepiped> = Sector::uniform_fan(count, 100.0, 0.0)
                .unwrap()
                .iter()
                .map(Sector::to_parallelepiped)
                .collect();
            for i in -20..=20 {
                for j in -20..=20 {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let x = [i as f64, j as f64];
                    let owners = fan.iter().filter(|p| p.contains(&x)).count();
                    assert_eq!(owners, 1, "count {count}, point {x:?}");
                }
            }
        }
    }

    #[test]
    fn interiors_intersect_touching_is_disjoint() {
        let a = Parallelepiped::axis_aligned(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let b = Parallelepiped::axis_aligned(&[(1.0, 2.0), (0.0, 1.0)]).unwrap();
        let c = Parallelepiped::axis_aligned(&[(0.5, 2.0), (0.5, 1.0)]).unwrap();
        assert!(!a.interiors_intersect(&b));
        assert!(a.interiors_intersect(&c));
        let r = Parallelepiped::new(Frame::rotated(0.7), &[Interval::new(0.0, 0.5).unwrap(), Interval::new(0.0, 0.5).unwrap()]).unwrap();
        assert!(a.interiors_intersect(&r));
    }
}
