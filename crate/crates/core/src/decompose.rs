//! Well-distributed refinements.
//!
//! The unit family is the center interval `[−1/18, 1/18)` together with
//! `±[1/2 − (4/9)(4/5)^k, 1/2 − (4/9)(4/5)^{k+1})` for `k ≥ 0`. Each member
//! sits at distance four times its length from `±1/2`. Families on other
//! intervals are affine images, and families on parallelepipeds are
//! products of the per-side families in the parallelepiped's frame.
//!
//! Endpoints are computed in exact rationals and rounded to `f64` only when
//! members are handed out as intervals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{LabError, Result};
use crate::geometry::{Bounds, Interval, Parallelepiped};

/// Default truncation depth of the geometric chains.
pub const DEFAULT_K_MAX: usize = 24;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

/// An exact closed interval `[lo, hi]` with rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl ExactInterval {
    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }

    /// Concentric double.
    pub fn doubled(&self) -> ExactInterval {
        let half = self.length() / BigInt::from(2);
        ExactInterval { lo: &self.lo - &half, hi: &self.hi + &half }
    }

    pub fn is_subset_of(&self, other: &ExactInterval) -> bool {
        self.lo >= other.lo && self.hi <= other.hi
    }

    /// Distance to the nearer endpoint of `parent`, which must contain it.
    pub fn boundary_distance(&self, parent: &ExactInterval) -> BigRational {
        let left = &self.lo - &parent.lo;
        let right = &parent.hi - &self.hi;
        if left < right {
            left
        } else {
            right
        }
    }

    fn map(&self, f: &impl Fn(&BigRational) -> BigRational) -> ExactInterval {
        ExactInterval { lo: f(&self.lo), hi: f(&self.hi) }
    }
}

/// The refinement of one interval, truncated at depth `k_max`.
#[derive(Clone, Debug)]
pub struct WellFamily {
    pub parent: Interval,
    pub k_max: usize,
    exact_parent: ExactInterval,
    /// Sorted left to right.
    exact: Vec<ExactInterval>,
}

impl WellFamily {
    /// Members as half-open `f64` intervals, sorted left to right.
    pub fn members(&self) -> Vec<Interval> {
        self.exact
            .iter()
            .map(|m| Interval { lo: to_f64(&m.lo), hi: to_f64(&m.hi), bounds: Bounds::HalfOpen })
            .collect()
    }

    pub fn exact_members(&self) -> &[ExactInterval] {
        &self.exact
    }

    pub fn exact_parent(&self) -> &ExactInterval {
        &self.exact_parent
    }

    /// The member in the center.
    pub fn center(&self) -> &ExactInterval {
        &self.exact[self.k_max + 1]
    }

    /// The `k`-th member of the chain toward the right (`sign > 0`) or
    /// left endpoint.
    pub fn chain_member(&self, k: usize, sign: i32) -> Option<&ExactInterval> {
        if k > self.k_max {
            return None;
        }
        if sign > 0 {
            self.exact.get(self.k_max + 2 + k)
        } else {
            self.exact.get(self.k_max - k)
        }
    }

    /// Checks, exactly, that members are disjoint, at distance four times
    /// their length from the parent's boundary, and doubled inside it.
    pub fn verify_exact(&self) -> Result<()> {
        let four = BigRational::from_integer(BigInt::from(4));
        for (i, m) in self.exact.iter().enumerate() {
            if m.length() <= BigRational::zero() {
                return Err(LabError::Degenerate(format!("member {i} has no length")));
            }
            if m.boundary_distance(&self.exact_parent) != &four * m.length() {
                return Err(LabError::Precondition(format!("member {i} is not at distance 4×length")));
            }
            if !m.doubled().is_subset_of(&self.exact_parent) {
                return Err(LabError::Precondition(format!("double of member {i} leaves the parent")));
            }
        }
        for (i, w) in self.exact.windows(2).enumerate() {
            if w[0].hi > w[1].lo {
                return Err(LabError::Precondition(format!("members {i} and {} overlap", i + 1)));
            }
        }
        Ok(())
    }

    /// Exact fraction of the parent not covered by members.
    pub fn uncovered_fraction(&self) -> BigRational {
        let covered: BigRational = self.exact.iter().map(|m| m.length()).fold(BigRational::zero(), |a, b| a + b);
        BigRational::one() - covered / self.exact_parent.length()
    }
}

/// The unit family on `[−1/2, 1/2]`.
pub fn well_unit(k_max: usize) -> WellFamily {
    let half = rat(1, 2);
    let four_ninths = rat(4, 9);
    let ratio = rat(4, 5);
    let mut right = Vec::with_capacity(k_max + 1);
    let mut p = BigRational::one();
    for _ in 0..=k_max {
        let next = &p * &ratio;
        right.push(ExactInterval { lo: &half - &four_ninths * &p, hi: &half - &four_ninths * &next });
        p = next;
    }
    let mut exact: Vec<ExactInterval> =
        right.iter().rev().map(|m| ExactInterval { lo: -m.hi.clone(), hi: -m.lo.clone() }).collect();
    exact.push(ExactInterval { lo: rat(-1, 18), hi: rat(1, 18) });
    exact.extend(right);
    WellFamily {
        parent: Interval { lo: -0.5, hi: 0.5, bounds: Bounds::HalfOpen },
        k_max,
        exact_parent: ExactInterval { lo: -half.clone(), hi: half },
        exact,
    }
}

/// The family of `I`, the image of the unit family under the affine map
/// from `[−1/2, 1/2]` onto `I`.
pub fn well_interval(parent: &Interval, k_max: usize) -> Result<WellFamily> {
    if !(parent.lo < parent.hi) || !parent.lo.is_finite() || !parent.hi.is_finite() {
        return Err(LabError::Degenerate(format!("interval [{}, {}) has no length", parent.lo, parent.hi)));
    }
    let lo = BigRational::from_float(parent.lo).expect("finite");
    let hi = BigRational::from_float(parent.hi).expect("finite");
    let len = &hi - &lo;
    let mid = (&lo + &hi) / BigInt::from(2);
    let unit = well_unit(k_max);
    let alpha = |t: &BigRational| &mid + t * &len;
    Ok(WellFamily {
        parent: *parent,
        k_max,
        exact_parent: unit.exact_parent.map(&alpha),
        exact: unit.exact.iter().map(|m| m.map(&alpha)).collect(),
    })
}

/// Products of the per-side families of `ω`, in `ω`'s frame.
pub fn well_rect(omega: &Parallelepiped, k_max: usize) -> Result<Vec<Parallelepiped>> {
    let per_axis: Vec<Vec<Interval>> = omega
        .sides()
        .iter()
        .map(|s| well_interval(s, k_max).map(|w| w.members()))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    match per_axis.len() {
        1 => {
            for a in &per_axis[0] {
                out.push(Parallelepiped::new(omega.frame, &[*a])?);
            }
        }
        _ => {
            for a in &per_axis[0] {
                for b in &per_axis[1] {
                    out.push(Parallelepiped::new(omega.frame, &[*a, *b])?);
                }
            }
        }
    }
    Ok(out)
}

/// Refinement of a whole collection.
#[derive(Clone, Debug)]
pub struct WellCollection {
    pub rects: Vec<Parallelepiped>,
    /// Index in the input of each rect's parent.
    pub parents: Vec<usize>,
    /// Overlapping input pairs, as `(i, j)` with a point of `ω_i ∩ ω_j`.
    pub warnings: Vec<OverlapWarning>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapWarning {
    pub first: usize,
    pub second: usize,
    pub witness: Vec<f64>,
}

impl std::fmt::Display for OverlapWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "inputs {} and {} overlap near {:?}", self.first, self.second, self.witness)
    }
}

/// Union of the refinements of every member of `Ω`, with a warning for
/// each pair of members whose interiors meet.
pub fn well_collection(omegas: &[Parallelepiped], k_max: usize) -> Result<WellCollection> {
    let mut rects = Vec::new();
    let mut parents = Vec::new();
    for (i, w) in omegas.iter().enumerate() {
        let r = well_rect(w, k_max)?;
        parents.extend(std::iter::repeat(i).take(r.len()));
        rects.extend(r);
    }
    let mut warnings = Vec::new();
    for i in 0..omegas.len() {
        for j in i + 1..omegas.len() {
            if omegas[i].interiors_intersect(&omegas[j]) {
                warnings.push(OverlapWarning { first: i, second: j, witness: overlap_witness(&omegas[i], &omegas[j]) });
            }
        }
    }
    Ok(WellCollection { rects, parents, warnings })
}

/// A point in both parallelepipeds, found among vertex/center averages.
fn overlap_witness(a: &Parallelepiped, b: &Parallelepiped) -> Vec<f64> {
    let d = a.dim();
    let mut candidates: Vec<[f64; 2]> = vec![a.center(), b.center()];
    for u in a.vertices() {
        for v in b.vertices() {
            candidates.push([0.5 * (u[0] + v[0]), 0.5 * (u[1] + v[1])]);
        }
    }
    for u in a.vertices().iter().chain(b.vertices().iter()) {
        let c = a.center();
        candidates.push([0.5 * (u[0] + c[0]), 0.5 * (u[1] + c[1])]);
        let c = b.center();
        candidates.push([0.5 * (u[0] + c[0]), 0.5 * (u[1] + c[1])]);
    }
    candidates
        .into_iter()
        .find(|p| a.contains(&p[..d]) && b.contains(&p[..d]))
        .map(|p| p[..d].to_vec())
        .unwrap_or_else(|| a.center()[..d].to_vec())
}

/// Exact uncovered fraction of `ω` after refinement: `1 − Π_j (1 − δ_j)`
/// where `δ_j` is the per-side uncovered fraction.
pub fn rect_uncovered_fraction(d: usize, k_max: usize) -> BigRational {
    let per_axis = well_unit(k_max).uncovered_fraction();
    let covered = (0..d).fold(BigRational::one(), |acc, _| acc * (BigRational::one() - &per_axis));
    BigRational::one() - covered
}

/// Pointwise count `Σ_r 1_{2r}` at `count` points
/// `lo + (i + 1/2)(hi − lo)/count` of a line, for one-dimensional rects.
pub fn double_overlap_profile_1d(rects: &[Parallelepiped], lo: f64, hi: f64, count: usize) -> Result<Vec<u32>> {
    if rects.iter().any(|r| r.dim() != 1) {
        return Err(LabError::Dimension { expected: 1, got: 2 });
    }
    let step = (hi - lo) / count as f64;
    let points: Vec<f64> = (0..count).map(|i| lo + (i as f64 + 0.5) * step).collect();
    let mut diff = vec![0i64; count + 1];
    for r in rects {
        let dbl = r.doubled();
        // Frame coordinate of a point on the line is t / axis.
        let axis = r.frame.axis(0).components()[0];
        let side = dbl.side(0);
        let mid = side.center() * axis;
        let first = points.partition_point(|&p| !side.contains(p / axis) && p < mid);
        let mut last = first;
        while last < count && side.contains(points[last] / axis) {
            last += 1;
        }
        if first < last {
            diff[first] += 1;
            diff[last] -= 1;
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut acc = 0i64;
    for d in diff.iter().take(count) {
        acc += d;
        out.push(acc as u32);
    }
    Ok(out)
}

/// Maximum of `Σ_r 1_{2r}` over a point set, with a maximizing point.
pub fn double_overlap_max(rects: &[Parallelepiped], points: &[Vec<f64>]) -> (usize, Option<Vec<f64>>) {
    let doubles: Vec<Parallelepiped> = rects.iter().map(|r| r.doubled()).collect();
    let boxes: Vec<Vec<(f64, f64)>> = doubles.iter().map(|r| r.bounding_box()).collect();
    let mut best = (0, None);
    for p in points {
        let c = doubles
            .iter()
            .zip(&boxes)
            .filter(|(r, bb)| bb.iter().zip(p).all(|((a, b), x)| a <= x && x <= b) && r.contains(p))
            .count();
        if c > best.0 {
            best = (c, Some(p.clone()));
        }
    }
    best
}

/// Points of the lattice `spacing·Z^d` inside the bounding box of the
/// doubles of `rects`.
pub fn lattice_points_near(rects: &[Parallelepiped], spacing: f64) -> Vec<Vec<f64>> {
    if rects.is_empty() {
        return Vec::new();
    }
    let d = rects[0].dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for r in rects {
        for (j, (a, b)) in r.doubled().bounding_box().into_iter().enumerate() {
            lo[j] = lo[j].min(a);
            hi[j] = hi[j].max(b);
        }
    }
    let range = |j: usize| (lo[j] / spacing).floor() as i64..=(hi[j] / spacing).ceil() as i64;
    let mut out = Vec::new();
    for i in range(0) {
        if d == 1 {
            out.push(vec![i as f64 * spacing]);
        } else {
            for k in range(1) {
                out.push(vec![i as f64 * spacing, k as f64 * spacing]);
            }
        }
    }
    out
}
