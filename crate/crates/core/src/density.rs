//! Maximal mass density over unions of rects.
//!
//! Items are rects carrying nonnegative mass. For a region `U` the mass is
//! the total over items contained in `U`, and the density is that mass over
//! `|U|`. Both the size of a tile collection and the Carleson norm of a
//! functional are suprema of such densities; adding an item contained in a
//! region never lowers its density, so only closed collections
//! `{items ⊆ U}` need to be searched.
//!
//! The search runs over a declared family of regions: each item rect
//! alone, each extra region, the union of all items, the unions of the
//! densest single-rect closures taken in decreasing order, and greedy
//! growth from the densest closure found. On families where any two rects
//! are nested or have disjoint interiors the first member of the family
//! is already optimal.

use crate::error::Result;
use crate::geometry::{Arrangement, Parallelepiped};

/// Greedy growth stops after this many additions.
pub(crate) const GREEDY_STEPS: usize = 48;

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    /// Items contained in the region, in index order.
    pub items: Vec<usize>,
    /// Items and extras (numbered after the items) whose union is the region.
    pub regions: Vec<usize>,
    pub mass: f64,
    pub measure: f64,
    pub density: f64,
    /// How the region was produced.
    pub origin: Origin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Single(usize),
    Extra(usize),
    Full,
    Prefix(usize),
    Greedy(usize),
    Empty,
}

impl Candidate {
    fn empty() -> Self {
        Self { items: Vec::new(), regions: Vec::new(), mass: 0.0, measure: 0.0, density: 0.0, origin: Origin::Empty }
    }
}

pub(crate) struct DensityEngine {
    arr: Arrangement,
    masses: Vec<f64>,
    items: usize,
}

impl DensityEngine {
    /// `extras` are additional candidate regions; they carry no mass.
    pub fn new(items: &[Parallelepiped], masses: &[f64], extras: &[Parallelepiped], spacing: Option<f64>) -> Result<Self> {
        let all: Vec<Parallelepiped> = items.iter().chain(extras).copied().collect();
        Ok(Self { arr: Arrangement::build(&all, spacing)?, masses: masses.to_vec(), items: items.len() })
    }

    pub fn resolution(&self) -> Option<f64> {
        self.arr.resolution()
    }

    /// Measure of one item as resolved by the arrangement.
    pub fn item_measure(&self, item: usize) -> f64 {
        self.arr.item_measure(item)
    }

    /// Measure of the union of the given items.
    pub fn union_measure(&self, items: &[usize]) -> f64 {
        self.arr.measure(&self.arr.union_mask(items.iter().copied()))
    }

    fn evaluate(&self, mask: &[bool], regions: Vec<usize>, active: &[usize], origin: Origin) -> Candidate {
        let items: Vec<usize> = active.iter().copied().filter(|&i| self.arr.contained(i, mask)).collect();
        let mass: f64 = items.iter().map(|&i| self.masses[i]).sum();
        let measure = self.arr.measure(mask);
        let density = if measure > 0.0 { mass / measure } else { 0.0 };
        Candidate { items, regions, mass, measure, density, origin }
    }

    /// Densest region in the family, restricted to the `active` items (in
    /// increasing index order). Ties keep the first region found.
    pub fn best(&self, active: &[usize]) -> Candidate {
        let mut best = Candidate::empty();
        let consider = |c: Candidate, best: &mut Candidate| {
            if c.density > best.density {
                *best = c;
            }
        };
        let mut singles = Vec::with_capacity(active.len());
        for &i in active {
            let c = self.evaluate(&self.arr.union_mask([i]), vec![i], active, Origin::Single(i));
            singles.push((i, c.density));
            consider(c, &mut best);
        }
        for e in self.items..self.arr.len() {
            let c = self.evaluate(&self.arr.union_mask([e]), vec![e], active, Origin::Extra(e - self.items));
            consider(c, &mut best);
        }
        if active.len() > 1 {
            consider(self.evaluate(&self.arr.union_mask(active.iter().copied()), active.to_vec(), active, Origin::Full), &mut best);
            singles.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let mut mask = self.arr.union_mask([singles[0].0]);
            let mut regions = vec![singles[0].0];
            for (t, &(i, _)) in singles.iter().enumerate().skip(1).take(active.len().saturating_sub(2)) {
                self.arr.extend_mask(&mut mask, i);
                regions.push(i);
                consider(self.evaluate(&mask, regions.clone(), active, Origin::Prefix(t + 1)), &mut best);
            }
            let grown = self.grow(&best, active);
            consider(grown, &mut best);
        }
        best
    }

    /// Greedy growth: repeatedly add the active rect whose addition gives
    /// the densest closure, while that improves the density.
    fn grow(&self, start: &Candidate, active: &[usize]) -> Candidate {
        let mut current = start.clone();
        if current.items.is_empty() {
            return current;
        }
        let mut mask = self.arr.union_mask(current.regions.iter().copied());
        for step in 0..GREEDY_STEPS {
            let mut pick: Option<(Candidate, usize)> = None;
            for &i in active {
                if current.items.binary_search(&i).is_ok() {
                    continue;
                }
                let mut trial = mask.clone();
                self.arr.extend_mask(&mut trial, i);
                let mut regions = current.regions.clone();
                regions.push(i);
                let c = self.evaluate(&trial, regions, active, Origin::Greedy(step + 1));
                if c.density > pick.as_ref().map_or(current.density, |p| p.0.density) {
                    pick = Some((c, i));
                }
            }
            match pick {
                Some((c, i)) => {
                    self.arr.extend_mask(&mut mask, i);
                    current = c;
                }
                None => break,
            }
        }
        current
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Parallelepiped {
        Parallelepiped::axis_aligned(&[(lo, hi)]).unwrap()
    }

    #[test]
    fn nested_intervals() {
        let items = [iv(0.0, 4.0), iv(0.0, 1.0), iv(2.0, 3.0), iv(8.0, 9.0)];
        let masses = [1.0, 2.0, 0.5, 0.1];
        let e = DensityEngine::new(&items, &masses, &[], None).unwrap();
        let all: Vec<usize> = (0..4).collect();
        let b = e.best(&all);
        assert_eq!(b.items, vec![1]);
        assert_eq!(b.density, 2.0);
        let b = e.best(&[0, 2, 3]);
        assert_eq!(b.density, 0.5);
        assert_eq!(b.items, vec![2]);
        let b = e.best(&[0, 3]);
        assert_eq!(b.density, 0.25);
        assert_eq!(b.items, vec![0]);
    }

    #[test]
    fn extras_extend_the_family() {
        let items = [iv(0.0, 1.0), iv(1.0, 2.0)];
        let e = DensityEngine::new(&items, &[1.0, 1.0], &[iv(0.0, 2.0), iv(0.0, 8.0)], None).unwrap();
        let b = e.best(&[0, 1]);
        assert_eq!(b.density, 1.0);
        assert_eq!(b.origin, Origin::Single(0));
        assert_eq!(e.best(&[]).density, 0.0);
    }

    #[test]
    fn greedy_finds_a_union() {
        // Two overlapping rects whose union beats each alone.
        let items = [iv(0.0, 2.0), iv(1.0, 3.0), iv(1.0, 2.0)];
        let masses = [1.0, 1.0, 0.9];
        let e = DensityEngine::new(&items, &masses, &[], None).unwrap();
        let b = e.best(&[0, 1, 2]);
        assert!((b.density - 2.9 / 3.0).abs() < 1e-15);
        assert_eq!(b.items, vec![0, 1, 2]);
    }
}
