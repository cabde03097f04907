//! Carleson functionals on dyadic rects in several frames: the CM norm,
//! the John–Nirenberg sum `F_U` and its `L^q` profile, the functional
//! built from tile coefficients, and the `f_k` splitting audit.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::density::{DensityEngine, Origin};
use crate::error::{LabError, Result};
use crate::geometry::{DyadicRect, Frame, Parallelepiped, Region};
use crate::grid::{GridFunction, GridSpec};
use crate::tiles::{coefficients, excluded_set, rect_inside, tiles_for_omega, CoefficientTable, Tile};

/// `Λ`, finitely supported on dyadic rects.
#[derive(Clone, Debug, PartialEq)]
pub struct CarlesonFunctional {
    entries: Vec<(DyadicRect, f64)>,
}

impl CarlesonFunctional {
    pub fn new(entries: Vec<(DyadicRect, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (r, v) in &entries {
            if !(*v >= 0.0) || !v.is_finite() {
                return Err(LabError::Parameter(format!("Λ value {v} must be finite and nonnegative")));
            }
            if !seen.insert(*r) {
                return Err(LabError::Parameter(format!("rect {r:?} appears twice")));
            }
        }
        if let Some((r, _)) = entries.first() {
            if entries.iter().any(|(s, _)| s.dim() != r.dim()) {
                return Err(LabError::Dimension { expected: r.dim(), got: 0 });
            }
        }
        Ok(Self { entries })
    }

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn entries(&self) -> &[(DyadicRect, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn value(&self, r: &DyadicRect) -> f64 {
        self.entries.iter().find(|(s, _)| s == r).map_or(0.0, |e| e.1)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.entries.iter().map(|(r, v)| (*r, v * c)).collect())
    }

    /// `Λ₁ + Λ₂`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        let mut out = self.entries.clone();
        for (r, v) in &other.entries {
            match out.iter_mut().find(|(s, _)| s == r) {
                Some(e) => e.1 += v,
                None => out.push((*r, *v)),
            }
        }
        Self::new(out)
    }

    /// Reads `frame_id,k1,n1[,k2,n2],value` lines; `frames[frame_id]` gives
    /// each frame. A header line starting with `frame_id` is skipped.
    pub fn read_csv<R: Read>(reader: R, frames: &[Frame]) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut entries = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            if rec.get(0).is_some_and(|f| f.starts_with("frame")) {
                continue;
            }
            let fields: Vec<&str> = rec.iter().collect();
            let d = match fields.len() {
                4 => 1,
                6 => 2,
                n => return Err(LabError::Parse(format!("expected 4 or 6 fields, found {n}"))),
            };
            let num = |i: usize| -> Result<i64> {
                fields[i].parse().map_err(|_| LabError::Parse(format!("bad integer {:?}", fields[i])))
            };
            let frame_id = num(0)? as usize;
            let frame = *frames
                .get(frame_id)
                .ok_or_else(|| LabError::Parse(format!("frame {frame_id} is not defined")))?;
            if frame.dim() != d {
                return Err(LabError::Dimension { expected: frame.dim(), got: d });
            }
            let scales: Vec<i32> = (0..d).map(|j| num(1 + 2 * j).map(|k| k as i32)).collect::<Result<_>>()?;
            let offsets: Vec<i64> = (0..d).map(|j| num(2 + 2 * j)).collect::<Result<_>>()?;
            let value: f64 = fields[1 + 2 * d]
                .parse()
                .map_err(|_| LabError::Parse(format!("bad value {:?}", fields[1 + 2 * d])))?;
            entries.push((DyadicRect::new(frame_id, frame, &scales, &offsets)?, value));
        }
        Self::new(entries)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for (r, v) in &self.entries {
            let mut row = vec![r.frame_id.to_string()];
            for j in 0..r.dim() {
                row.push(r.scales()[j].to_string());
                row.push(r.offsets()[j].to_string());
            }
            row.push(format!("{v:e}"));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path, frames: &[Frame]) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?, frames)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Which candidate produced a CM estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmFamily {
    SingleRect,
    DyadicAncestor,
    FullUnion,
    DensityPrefix,
    GreedyUnion,
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMEstimate {
    pub value: f64,
    /// Support entries `R ⊆ U`, in index order.
    pub witness: Vec<usize>,
    /// Rects whose union is `U`.
    pub region: Vec<Parallelepiped>,
    pub family: CmFamily,
    /// `false` only when the estimate is provably the supremum: one frame
    /// and support rects pairwise nested or disjoint.
    pub lower_bound: bool,
    /// Sampling spacing used for measures, if not exact.
    pub resolution: Option<f64>,
}

/// Dyadic ancestors of the support, raising the scale on any subset of
/// axes, kept while they fit in `window` (or, without a window, while each
/// side is at most twice the extent of the support in that frame).
fn ancestors(lambda: &CarlesonFunctional, window: Option<&Parallelepiped>) -> Vec<DyadicRect> {
    let support: HashSet<DyadicRect> = lambda.entries.iter().map(|e| e.0).collect();
    let mut out: Vec<DyadicRect> = Vec::new();
    let mut seen = HashSet::new();
    for (r, _) in &lambda.entries {
        let d = r.dim();
        let extent: Vec<f64> = (0..d)
            .map(|j| {
                let same = lambda.entries.iter().filter(|e| e.0.frame_id == r.frame_id);
                let lo = same.clone().map(|e| e.0.side(j).lo).fold(f64::INFINITY, f64::min);
                let hi = same.map(|e| e.0.side(j).hi).fold(f64::NEG_INFINITY, f64::max);
                hi - lo
            })
            .collect();
        let fits = |a: &DyadicRect| match window {
            Some(w) => rect_inside(&a.to_parallelepiped(), w),
            None => (0..d).all(|j| a.side_length(j) <= 2.0 * extent[j]),
        };
        let mut frontier = vec![*r];
        while let Some(a) = frontier.pop() {
            for j in 0..d {
                let up = a.ancestor(j, 1);
                if fits(&up) && seen.insert(up) {
                    frontier.push(up);
                    if !support.contains(&up) {
                        out.push(up);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn laminar(rects: &[DyadicRect]) -> bool {
    let one_frame = rects.windows(2).all(|w| w[0].frame_id == w[1].frame_id);
    one_frame
        && rects.iter().enumerate().all(|(i, a)| {
            rects[i + 1..].iter().all(|b| {
                a.is_subset_of(b) || b.is_subset_of(a) || !a.to_parallelepiped().interiors_intersect(&b.to_parallelepiped())
            })
        })
}

/// `‖Λ‖_CM ≈ max_U |U|^{−1} Σ_{R⊆U} Λ(R)` over single support rects, dyadic
/// ancestors, the full union, density-ordered prefixes and greedy unions.
/// `spacing` is needed when the support uses several frames.
pub fn cm_norm(lambda: &CarlesonFunctional, window: Option<&Parallelepiped>, spacing: Option<f64>) -> Result<CMEstimate> {
    if lambda.is_empty() {
        return Ok(CMEstimate {
            value: 0.0,
            witness: Vec::new(),
            region: Vec::new(),
            family: CmFamily::Empty,
            lower_bound: false,
            resolution: None,
        });
    }
    let rects: Vec<DyadicRect> = lambda.entries.iter().map(|e| e.0).collect();
    let items: Vec<Parallelepiped> = rects.iter().map(DyadicRect::to_parallelepiped).collect();
    let masses: Vec<f64> = lambda.entries.iter().map(|e| e.1).collect();
    let extras: Vec<Parallelepiped> = ancestors(lambda, window).iter().map(DyadicRect::to_parallelepiped).collect();
    let engine = DensityEngine::new(&items, &masses, &extras, spacing)?;
    let all: Vec<usize> = (0..items.len()).collect();
    let best = engine.best(&all);
    let family = match best.origin {
        Origin::Single(_) => CmFamily::SingleRect,
        Origin::Extra(_) => CmFamily::DyadicAncestor,
        Origin::Full => CmFamily::FullUnion,
        Origin::Prefix(_) => CmFamily::DensityPrefix,
        Origin::Greedy(_) => CmFamily::GreedyUnion,
        Origin::Empty => CmFamily::Empty,
    };
    let region = best
        .regions
        .iter()
        .map(|&i| if i < items.len() { items[i] } else { extras[i - items.len()] })
        .collect();
    Ok(CMEstimate {
        value: best.density,
        witness: best.items,
        region,
        family,
        lower_bound: !(engine.resolution().is_none() && laminar(&rects)),
        resolution: engine.resolution(),
    })
}

/// `F_U = Σ_{R⊆U} Λ(R)/|R| · 1_R` on the grid, with `|R|` the grid measure
/// of `R` so that `∫ F_U = Σ_{R⊆U} Λ(R)`.
pub fn f_u(lambda: &CarlesonFunctional, u: &Parallelepiped, spec: &GridSpec) -> Result<GridFunction> {
    let mut acc = vec![0.0f64; spec.len()];
    for (r, v) in &lambda.entries {
        let p = r.to_parallelepiped();
        if !rect_inside(&p, u) {
            continue;
        }
        let idx = spec.indices_in(&p);
        if idx.is_empty() {
            return Err(LabError::Resolution(format!("rect {r:?} contains no grid point")));
        }
        let density = v / (idx.len() as f64 * spec.cell_volume());
        for i in idx {
            acc[i] += density;
        }
    }
    GridFunction::from_real(*spec, &acc)
}

/// `(q, ‖F_U‖_q / |U|^{1/q})` for each `q`, with `|U|` the grid measure.
pub fn jn_profile(lambda: &CarlesonFunctional, u: &Parallelepiped, spec: &GridSpec, qs: &[f64]) -> Result<Vec<(f64, f64)>> {
    if let Some(q) = qs.iter().find(|&&q| !(q >= 1.0) || !q.is_finite()) {
        return Err(LabError::Parameter(format!("q = {q} must lie in [1, ∞)")));
    }
    let fu = f_u(lambda, u, spec)?;
    let measure = spec.indices_in(u).len() as f64 * spec.cell_volume();
    if measure == 0.0 {
        return Err(LabError::Resolution("U contains no grid point".into()));
    }
    qs.iter().map(|&q| Ok((q, fu.lq_norm(q)? / measure.powf(1.0 / q)))).collect()
}

/// The John–Nirenberg constant pinned for `q`: `(q!)^{1/q}` (Gamma
/// function for fractional `q`), the dyadic one-parameter bound.
pub fn jn_constant(q: f64) -> f64 {
    statrs::function::gamma::gamma(q + 1.0).powf(1.0 / q)
}

/// `Λ(R) = Σ_{s: R_s = R} |⟨f, φ_s⟩|²` for a function bounded by one.
pub fn lcm_functional(f: &GridFunction, table: &CoefficientTable) -> Result<CarlesonFunctional> {
    let sup = f.max_abs();
    if sup > 1.0 + 1e-12 {
        return Err(LabError::Precondition(format!("‖f‖_∞ = {sup} exceeds 1")));
    }
    if f.spec() != &table.spec {
        return Err(LabError::Shape("table was computed on another grid".into()));
    }
    let mut entries: Vec<(DyadicRect, f64)> = Vec::new();
    for (t, c) in table.tiles.iter().zip(&table.coeffs) {
        match entries.iter_mut().find(|e| e.0 == t.rect) {
            Some(e) => e.1 += c.norm_sqr(),
            None => entries.push((t.rect, c.norm_sqr())),
        }
    }
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    CarlesonFunctional::new(entries)
}

/// One step of the `f_k` audit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FkPoint {
    pub k: u32,
    /// `Σ_{R_s ⊆ U} |⟨f_k, φ_s⟩|²`
    pub mass: f64,
    /// `‖f_k‖₂²`
    pub energy: f64,
}

/// Tile mass over `R_s ⊆ U` of `f_k = f · 1{M 1_U ≤ 2^{−k}}`, the maximal
/// function running along the axes of every frame in `omegas`.
pub fn fk_audit(omegas: &[Parallelepiped], u: &Parallelepiped, f: &GridFunction, ks: &[u32]) -> Result<Vec<FkPoint>> {
    let spec = f.spec();
    let mut directions = Vec::new();
    for w in omegas {
        for a in w.frame.axes() {
            if !directions.contains(&a) {
                directions.push(a);
            }
        }
    }
    let mut tiles: Vec<Tile> = Vec::new();
    for (id, w) in omegas.iter().enumerate() {
        tiles.extend(
            tiles_for_omega(w, id, 0, &Region::Box(*u))?
                .into_iter()
                .filter(|t| rect_inside(&t.spatial(), u)),
        );
    }
    ks.iter()
        .map(|&k| {
            let mask = excluded_set(spec, directions.clone(), u, 2f64.powi(-(k as i32)))?;
            let s = f.samples().iter().zip(&mask).map(|(z, m)| if *m { Complex64::new(0.0, 0.0) } else { *z }).collect();
            let fk = GridFunction::new(*spec, s)?;
            let energy = fk.lq_norm(2.0)?.powi(2);
            let mass = if tiles.is_empty() { 0.0 } else { coefficients(&fk, &tiles)?.total_mass() };
            Ok(FkPoint { k, mass, energy })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiles::{build_packet, Tile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dy(k: i32, n: i64) -> DyadicRect {
        DyadicRect::new(0, Frame::standard(1), &[k], &[n]).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Parallelepiped {
        Parallelepiped::axis_aligned(&[(lo, hi)]).unwrap()
    }

    /// `Λ(R) = |R|` on all dyadic subintervals of `[0, 1)` at depths `0..=j`.
    fn uniform(j: i32) -> CarlesonFunctional {
        let mut e = Vec::new();
        for depth in 0..=j {
            for n in 0..(1i64 << depth) {
                e.push((dy(-depth, n), 2f64.powi(-depth)));
            }
        }
        CarlesonFunctional::new(e).unwrap()
    }

    fn random_lambda(rng: &mut ChaCha8Rng, count: usize) -> CarlesonFunctional {
        let mut e: Vec<(DyadicRect, f64)> = Vec::new();
        while e.len() < count {
            let k = rng.random_range(-3..=1);
            let span = (8.0 / 2f64.powi(k)) as i64;
            let r = dy(k, rng.random_range(0..span));
            if !e.iter().any(|x| x.0 == r) {
                e.push((r, rng.random_range(0.0..1.0)));
            }
        }
        CarlesonFunctional::new(e).unwrap()
    }

    /// Maximal components of a union of 1-D intervals.
    fn components(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (a, b) in v {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        out
    }

    fn union_length(v: Vec<(f64, f64)>) -> f64 {
        components(v).iter().map(|(a, b)| b - a).sum()
    }

    /// Sup over every dyadic interval in `[0, 8)` at scales `−3..=3` and
    /// every union of support intervals. Shrinking `U` to the union of the
    /// rects it contains never lowers the density, so the unions suffice.
    fn oracle(l: &CarlesonFunctional) -> f64 {
        let mass_in = |parts: &[(f64, f64)]| -> f64 {
            l.entries()
                .iter()
                .filter(|(r, _)| parts.iter().any(|&(a, b)| r.side(0).lo >= a && r.side(0).hi <= b))
                .map(|e| e.1)
                .sum()
        };
        let mut best = 0.0f64;
        for k in -3..=3 {
            let len = 2f64.powi(k);
            for n in 0..(8.0 / len) as i64 {
                let lo = n as f64 * len;
                best = best.max(mass_in(&[(lo, lo + len)]) / len);
            }
        }
        let n = l.len();
        for s in 1u32..(1 << n) {
            let chosen: Vec<(f64, f64)> =
                (0..n).filter(|i| s >> i & 1 == 1).map(|i| (l.entries()[i].0.side(0).lo, l.entries()[i].0.side(0).hi)).collect();
            let parts = components(chosen);
            let m: f64 = parts.iter().map(|(a, b)| b - a).sum();
            best = best.max(mass_in(&parts) / m);
        }
        best
    }

    #[test]
    fn single_rect() {
        let l = CarlesonFunctional::new(vec![(dy(-2, 1), 1.0)]).unwrap();
        let e = cm_norm(&l, None, None).unwrap();
        assert_eq!(e.value, 4.0);
        assert_eq!(e.witness, vec![0]);
        assert_eq!(e.region, vec![iv(0.25, 0.5)]);
        assert!(!e.lower_bound);
        let z = cm_norm(&CarlesonFunctional::empty(), None, None).unwrap();
        assert_eq!((z.value, z.witness.len()), (0.0, 0));
    }

    #[test]
    fn uniform_functional() {
        for j in 0..=4 {
            let l = uniform(j);
            let e = cm_norm(&l, Some(&iv(0.0, 1.0)), None).unwrap();
            assert_eq!(e.value, (j + 1) as f64);
            assert_eq!(e.region, vec![iv(0.0, 1.0)]);
            let spec = GridSpec::new(1, 256, 4.0).unwrap();
            let fu = f_u(&l, &iv(0.0, 1.0), &spec).unwrap();
            for i in 0..spec.len() {
                let x = spec.point(i)[0];
                let want = if x < 1.0 { (j + 1) as f64 } else { 0.0 };
                assert!((fu.samples()[i].re - want).abs() < 1e-12);
            }
            for (_, v) in jn_profile(&l, &iv(0.0, 1.0), &spec, &[1.0, 2.0, 4.0]).unwrap() {
                assert!((v - (j + 1) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn matches_the_union_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let n = rng.random_range(1..=8);
            let l = random_lambda(&mut rng, n);
            let e = cm_norm(&l, Some(&iv(0.0, 8.0)), None).unwrap();
            let want = oracle(&l);
            assert!((e.value - want).abs() <= 1e-12 * want, "{} vs {want}", e.value);
            // The witness recomputes the value.
            let m = union_length(e.region.iter().map(|p| (p.side(0).lo, p.side(0).hi)).collect());
            let mass: f64 = e.witness.iter().map(|&i| l.entries()[i].1).sum();
            assert!((mass / m - e.value).abs() <= 1e-12 * e.value);
        }
    }

    #[test]
    fn homogeneous_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..20 {
            let l = random_lambda(&mut rng, 10);
            let a = cm_norm(&l, None, None).unwrap();
            let b = cm_norm(&l.scaled(3.5).unwrap(), None, None).unwrap();
            assert!((b.value - 3.5 * a.value).abs() <= 1e-12 * b.value);
            assert_eq!(a.witness, b.witness);
            let bigger = CarlesonFunctional::new(l.entries().iter().map(|(r, v)| (*r, v * rng.random_range(1.0..2.0))).collect())
                .unwrap();
            assert!(cm_norm(&bigger, None, None).unwrap().value >= a.value);
        }
    }

    #[test]
    fn f_u_is_additive_and_integrates_to_the_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let spec = GridSpec::new(1, 512, 16.0).unwrap();
        let u = iv(0.0, 6.0);
        for _ in 0..10 {
            let a = random_lambda(&mut rng, 12);
            let b = random_lambda(&mut rng, 12);
            let fa = f_u(&a, &u, &spec).unwrap();
            let fb = f_u(&b, &u, &spec).unwrap();
            let fab = f_u(&a.sum(&b).unwrap(), &u, &spec).unwrap();
            for i in 0..spec.len() {
                assert!((fab.samples()[i] - fa.samples()[i] - fb.samples()[i]).norm() < 1e-12);
            }
            let integral: f64 = fa.samples().iter().map(|z| z.re).sum::<f64>() * spec.cell_volume();
            let mass: f64 = a.entries().iter().filter(|(r, _)| r.side(0).hi <= 6.0).map(|e| e.1).sum();
            assert!((integral - mass).abs() < 1e-10);
            let p = jn_profile(&a, &u, &spec, &[1.0, 1.5, 2.0, 3.0, 4.0]).unwrap();
            assert!(p.windows(2).all(|w| w[1].1 >= w[0].1 * (1.0 - 1e-12)));
        }
        let far = CarlesonFunctional::new(vec![(dy(0, 10), 1.0)]).unwrap();
        assert_eq!(f_u(&far, &u, &spec).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn jn_profile_stays_below_the_pinned_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let spec = GridSpec::new(1, 256, 16.0).unwrap();
        let u = iv(0.0, 8.0);
        for _ in 0..20 {
            let l = random_lambda(&mut rng, 30);
            let cm = cm_norm(&l, Some(&u), None).unwrap().value;
            for (q, v) in jn_profile(&l, &u, &spec, &[1.0, 2.0, 4.0]).unwrap() {
                assert!(v <= jn_constant(q) * cm * (1.0 + 1e-12), "q = {q}: {v} vs {cm}");
            }
        }
        assert!((jn_constant(4.0) - 24f64.powf(0.25)).abs() < 1e-12);
        assert!((jn_constant(1.0) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let l = random_lambda(&mut rng, 7);
        let mut buf = Vec::new();
        l.write_csv(&mut buf).unwrap();
        let back = CarlesonFunctional::read_csv(&buf[..], &[Frame::standard(1)]).unwrap();
        assert_eq!(back, l);
        let two = "frame_id,k1,n1,k2,n2,value\n0,1,-2,0,3,0.5\n";
        let p = CarlesonFunctional::read_csv(two.as_bytes(), &[Frame::standard(2)]).unwrap();
        assert_eq!(p.entries()[0].0.offsets(), &[-2, 3]);
        assert!(CarlesonFunctional::read_csv("0,1,2\n".as_bytes(), &[Frame::standard(1)]).is_err());
        assert!(CarlesonFunctional::read_csv("3,1,2,1.0\n".as_bytes(), &[Frame::standard(1)]).is_err());
        assert!(CarlesonFunctional::new(vec![(dy(0, 0), -1.0)]).is_err());
        assert!(CarlesonFunctional::new(vec![(dy(0, 0), 1.0), (dy(0, 0), 2.0)]).is_err());
    }

    #[test]
    fn lcm_functional_from_a_table() {
        let spec = GridSpec::new(1, 512, 128.0).unwrap();
        let omega = iv(0.25, 0.5);
        let t = Tile::new(dy(2, 3), omega, 0).unwrap();
        let other = Tile::new(dy(2, 3), iv(0.5, 0.75), 1).unwrap();
        let p = build_packet(&t, &spec).unwrap();
        let f = p.map(|z| z / p.max_abs());
        let table = coefficients(&f, &[t, other]).unwrap();
        let l = lcm_functional(&f, &table).unwrap();
        assert_eq!(l.len(), 1);
        let direct = f.inner_product(&p).unwrap().norm_sqr() + f.inner_product(&build_packet(&other, &spec).unwrap()).unwrap().norm_sqr();
        assert!((l.value(&t.rect) - direct).abs() < 1e-10);
        let zero = GridFunction::zeros(spec);
        let zl = lcm_functional(&zero, &coefficients(&zero, &[t]).unwrap()).unwrap();
        assert_eq!(zl.value(&t.rect), 0.0);
        let big = f.map(|z| z * 2.0);
        assert!(matches!(lcm_functional(&big, &table), Err(LabError::Precondition(_))));
    }

    #[test]
    fn fk_mass_decays() {
        let spec = GridSpec::new(1, 4096, 4096.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        let s: Vec<f64> = (0..spec.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = GridFunction::from_real(spec, &s).unwrap();
        let omegas = [iv(0.0625, 0.125), iv(0.125, 0.25)];
        let u = iv(-64.0, 64.0);
        let pts = fk_audit(&omegas, &u, &f, &[1, 2, 3, 4, 5]).unwrap();
        assert!(pts.windows(2).all(|w| w[1].mass < w[0].mass), "{pts:?}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn entries() -> impl Strategy<Value = Vec<(i32, i64, f64)>> {
            prop::collection::vec((-3i32..=0, 0i64..8, 0.0..4.0f64), 1..8)
        }

        fn functional(v: &[(i32, i64, f64)]) -> CarlesonFunctional {
            let mut seen = std::collections::BTreeMap::new();
            for &(k, n, w) in v {
                let n = n % (1i64 << (-k));
                *seen.entry((k, n)).or_insert(0.0) += w;
            }
            CarlesonFunctional::new(seen.into_iter().map(|((k, n), w)| (dy(k, n), w)).collect()).unwrap()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn cm_norm_is_homogeneous(v in entries(), c in 0.1..10.0f64) {
                let l = functional(&v);
                let a = cm_norm(&l, Some(&iv(0.0, 1.0)), None).unwrap().value;
                let b = cm_norm(&l.scaled(c).unwrap(), Some(&iv(0.0, 1.0)), None).unwrap().value;
                prop_assert!((b - c * a).abs() <= 1e-12 * (c * a).max(1e-300));
            }

            #[test]
            fn cm_norm_is_monotone(v in entries(), extra in entries()) {
                let l = functional(&v);
                let bigger = l.sum(&functional(&extra)).unwrap();
                let a = cm_norm(&l, Some(&iv(0.0, 1.0)), None).unwrap().value;
                let b = cm_norm(&bigger, Some(&iv(0.0, 1.0)), None).unwrap().value;
                prop_assert!(b >= a * (1.0 - 1e-12));
            }
        }
    }
}
