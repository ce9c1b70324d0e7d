//! Finite posets stored as their strict order relation, transitively closed.
//!
//! Elements are the dense indices `0..n`. Each element keeps two bitset rows:
//! the elements strictly above it and the elements strictly below it.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    n: usize,
    above: Vec<FixedBitSet>,
    below: Vec<FixedBitSet>,
}

impl Poset {
    /// Builds the poset generated by `pairs` (each `(x, y)` meaning `x < y`),
    /// closing the relation transitively.
    pub fn from_relations<I>(n: usize, pairs: I) -> Result<Poset>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for (x, y) in pairs {
            for idx in [x, y] {
                if idx >= n {
                    return Err(Error::Index { index: idx, n });
                }
            }
            if x == y {
                return Err(Error::Cycle { element: x });
            }
            above[x].insert(y);
        }
        // Warshall over bitset rows.
        for k in 0..n {
            let row_k = above[k].clone();
            for row in above.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        if let Some(x) = (0..n).find(|&x| above[x].contains(x)) {
            return Err(Error::Cycle { element: x });
        }
        Ok(Self::from_closed_above(above))
    }

    fn from_closed_above(above: Vec<FixedBitSet>) -> Poset {
        let n = above.len();
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (x, row) in above.iter().enumerate() {
            for y in row.ones() {
                below[y].insert(x);
            }
        }
        Poset { n, above, below }
    }

    pub fn antichain(n: usize) -> Poset {
        Self::from_closed_above(vec![FixedBitSet::with_capacity(n); n])
    }

    /// The chain `0 < 1 < ... < n-1`.
    pub fn chain(n: usize) -> Poset {
        let above = (0..n)
            .map(|x| {
                let mut row = FixedBitSet::with_capacity(n);
                row.insert_range(x + 1..n);
                row
            })
            .collect();
        Self::from_closed_above(above)
    }

    /// The standard example `S_m`: elements `0..m` are `a_1..a_m`, elements
    /// `m..2m` are `b_1..b_m`, and `a_i < b_j` exactly when `i != j`.
    pub fn standard_example(m: usize) -> Result<Poset> {
        if m < 2 {
            return Err(Error::Argument(format!(
                "standard example needs m >= 2, got {m}"
            )));
        }
        let pairs = (0..m).flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, m + j)));
        Poset::from_relations(2 * m, pairs)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `x < y`.
    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        self.above[x].contains(y)
    }

    /// `x <= y`.
    #[inline]
    pub fn le(&self, x: usize, y: usize) -> bool {
        x == y || self.lt(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        x == y || self.lt(x, y) || self.lt(y, x)
    }

    #[inline]
    pub fn incomparable(&self, x: usize, y: usize) -> bool {
        !self.comparable(x, y)
    }

    /// Bitset of elements strictly above `x`.
    #[inline]
    pub fn above(&self, x: usize) -> &FixedBitSet {
        &self.above[x]
    }

    /// Bitset of elements strictly below `x`.
    #[inline]
    pub fn below(&self, x: usize) -> &FixedBitSet {
        &self.below[x]
    }

    fn check_index(&self, x: usize) -> Result<()> {
        if x >= self.n {
            return Err(Error::Index { index: x, n: self.n });
        }
        Ok(())
    }

    /// `U(x) = {y : y > x}` in ascending order.
    pub fn upset(&self, x: usize) -> Result<Vec<usize>> {
        self.check_index(x)?;
        Ok(self.above[x].ones().collect())
    }

    /// `D(x) = {y : y < x}` in ascending order.
    pub fn downset(&self, x: usize) -> Result<Vec<usize>> {
        self.check_index(x)?;
        Ok(self.below[x].ones().collect())
    }

    /// All pairs `(x, y)` with `x < y`, lexicographically sorted.
    pub fn relations(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|x| self.above[x].ones().map(move |y| (x, y)))
            .collect()
    }

    pub fn relation_count(&self) -> usize {
        self.above.iter().map(|r| r.count_ones(..)).sum()
    }

    /// Cover pairs `x ⋖ y`, lexicographically sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.n {
            for y in self.above[x].ones() {
                if self.above[x].is_disjoint(&self.below[y]) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    pub fn is_minimal(&self, x: usize) -> bool {
        self.below[x].is_clear()
    }

    pub fn is_maximal(&self, x: usize) -> bool {
        self.above[x].is_clear()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.is_minimal(x)).collect()
    }

    /// Same ground set, every relation reversed.
    pub fn dual(&self) -> Poset {
        Poset {
            n: self.n,
            above: self.below.clone(),
            below: self.above.clone(),
        }
    }

    /// Subposet induced on `elems`; element `i` of the result is `elems[i]`.
    pub fn induced(&self, elems: &[usize]) -> Poset {
        let m = elems.len();
        let above = elems
            .iter()
            .map(|&x| {
                let mut row = FixedBitSet::with_capacity(m);
                for (j, &y) in elems.iter().enumerate() {
                    if self.lt(x, y) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect();
        Self::from_closed_above(above)
    }

    /// A topological order that always emits the smallest available index.
    pub fn topological_order(&self) -> Vec<usize> {
        topological_order_by(self.n, |x| self.below[x].ones(), |x| self.above[x].ones())
    }

    /// Size of a maximum chain (0 for the empty poset).
    pub fn height(&self) -> usize {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&x| self.below[x].count_ones(..));
        let mut h = vec![0usize; self.n];
        for &x in &order {
            h[x] = 1 + self.below[x].ones().map(|y| h[y]).max().unwrap_or(0);
        }
        h.into_iter().max().unwrap_or(0)
    }

    /// The default bipartition when the height is at most 2: `A` holds every
    /// minimal element (isolated ones included), `B` the rest; both ascending.
    pub fn bipartition(&self) -> Option<BipartitePoset> {
        if self.height() > 2 {
            return None;
        }
        let (a, b): (Vec<usize>, Vec<usize>) = (0..self.n).partition(|&x| self.is_minimal(x));
        Some(BipartitePoset {
            poset: self.clone(),
            a_order: a,
            b_order: b,
        })
    }

    /// Kimble split: index `i` is `x_i'`, index `n + i` is `x_i''`, and
    /// `x_i' < x_j''` exactly when `x_i <= x_j`.
    pub fn kimble_split(&self) -> Poset {
        let n = self.n;
        let mut above = vec![FixedBitSet::with_capacity(2 * n); 2 * n];
        for (i, row) in above.iter_mut().take(n).enumerate() {
            row.insert(n + i);
            for j in self.above[i].ones() {
                row.insert(n + j);
            }
        }
        Self::from_closed_above(above)
    }

    /// Searches for an induced copy of `S_k`. Returns the lexicographically
    /// first embedding under `(a_elems, b_elems)`, or `None` if the poset is
    /// `S_k`-free.
    pub fn find_standard_example(&self, k: usize) -> Option<Embedding> {
        if k < 2 || 2 * k > self.n {
            return None;
        }
        let candidates: Vec<usize> = (0..self.n)
            .filter(|&x| self.above[x].count_ones(..) >= k - 1)
            .collect();
        let mut search = SkSearch {
            poset: self,
            k,
            candidates: &candidates,
            chosen: Vec::with_capacity(k),
        };
        search.choose_a(0)
    }
}

/// Kahn's algorithm with a min-heap, so ties go to the smallest index.
pub(crate) fn topological_order_by<P, S, PI, SI>(n: usize, preds: P, succs: S) -> Vec<usize>
where
    P: Fn(usize) -> PI,
    S: Fn(usize) -> SI,
    PI: Iterator<Item = usize>,
    SI: Iterator<Item = usize>,
{
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut indeg: Vec<usize> = (0..n).map(|x| preds(x).count()).collect();
    let mut heap: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&x| indeg[x] == 0).map(Reverse).collect();
    let mut out = Vec::with_capacity(n);
    while let Some(Reverse(x)) = heap.pop() {
        out.push(x);
        for y in succs(x) {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(Reverse(y));
            }
        }
    }
    out
}

struct SkSearch<'a> {
    poset: &'a Poset,
    k: usize,
    candidates: &'a [usize],
    chosen: Vec<usize>,
}

impl SkSearch<'_> {
    fn choose_a(&mut self, from: usize) -> Option<Embedding> {
        if self.chosen.len() == self.k {
            return self.choose_b();
        }
        let need = self.k - self.chosen.len();
        for ci in from..self.candidates.len() {
            if self.candidates.len() - ci < need {
                break;
            }
            let x = self.candidates[ci];
            if self.chosen.iter().any(|&a| self.poset.comparable(a, x)) {
                continue;
            }
            self.chosen.push(x);
            if self.feasible() {
                if let Some(found) = self.choose_a(ci + 1) {
                    return Some(found);
                }
            }
            self.chosen.pop();
        }
        None
    }

    /// Partial a-sets must leave room for the remaining b's and give every
    /// chosen position at least one candidate b.
    fn feasible(&self) -> bool {
        let m = self.chosen.len();
        let common = self.common_above(None);
        if m < self.k && common.count_ones(..) < self.k - m {
            return false;
        }
        if m >= 2 {
            for i in 0..m {
                if self.b_candidates(i).is_clear() {
                    return false;
                }
            }
        }
        true
    }

    fn common_above(&self, skip: Option<usize>) -> FixedBitSet {
        let n = self.poset.len();
        let mut acc = FixedBitSet::with_capacity(n);
        acc.insert_range(..);
        for (j, &a) in self.chosen.iter().enumerate() {
            if Some(j) != skip {
                acc.intersect_with(self.poset.above(a));
            }
        }
        acc
    }

    fn b_candidates(&self, i: usize) -> FixedBitSet {
        let a = self.chosen[i];
        let mut c = self.common_above(Some(i));
        c.difference_with(self.poset.above(a));
        c.set(a, false);
        c
    }

    fn choose_b(&self) -> Option<Embedding> {
        let cands: Vec<Vec<usize>> = (0..self.k).map(|i| self.b_candidates(i).ones().collect()).collect();
        let mut picked = Vec::with_capacity(self.k);
        if self.pick_b(&cands, &mut picked) {
            Some(Embedding {
                a_elems: self.chosen.clone(),
                b_elems: picked,
            })
        } else {
            None
        }
    }

    fn pick_b(&self, cands: &[Vec<usize>], picked: &mut Vec<usize>) -> bool {
        let i = picked.len();
        if i == cands.len() {
            return true;
        }
        for &b in &cands[i] {
            if picked.iter().all(|&p| self.poset.incomparable(p, b)) {
                picked.push(b);
                if self.pick_b(cands, picked) {
                    return true;
                }
                picked.pop();
            }
        }
        false
    }
}

/// A height-at-most-2 poset with an ordered bipartition `(A, B)`; every
/// relation runs from `A` to `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitePoset {
    poset: Poset,
    a_order: Vec<usize>,
    b_order: Vec<usize>,
}

impl BipartitePoset {
    pub fn new(poset: Poset, a_order: Vec<usize>, b_order: Vec<usize>) -> Result<Self> {
        let n = poset.len();
        let mut side = vec![None; n];
        for (part, elems) in [(0u8, &a_order), (1u8, &b_order)] {
            for &x in elems.iter() {
                if x >= n {
                    return Err(Error::Index { index: x, n });
                }
                if side[x].is_some() {
                    return Err(Error::Argument(format!(
                        "element {x} listed twice in the bipartition"
                    )));
                }
                side[x] = Some(part);
            }
        }
        if let Some(x) = side.iter().position(Option::is_none) {
            return Err(Error::Argument(format!(
                "element {x} missing from the bipartition"
            )));
        }
        for (x, y) in poset.relations() {
            if side[x] != Some(0) || side[y] != Some(1) {
                return Err(Error::Argument(format!(
                    "relation {x} < {y} does not run from A to B"
                )));
            }
        }
        Ok(BipartitePoset {
            poset,
            a_order,
            b_order,
        })
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn a_order(&self) -> &[usize] {
        &self.a_order
    }

    pub fn b_order(&self) -> &[usize] {
        &self.b_order
    }

    pub fn into_poset(self) -> Poset {
        self.poset
    }

    /// The dual poset with the parts swapped, so the old `B` becomes the new `A`.
    pub fn dual(&self) -> BipartitePoset {
        BipartitePoset {
            poset: self.poset.dual(),
            a_order: self.b_order.clone(),
            b_order: self.a_order.clone(),
        }
    }

    /// Removes `removed` (indices of the current poset). Returns the remaining
    /// bipartite poset together with the map from new indices to old ones.
    /// Both parts keep their relative order.
    pub fn remove(&self, removed: &[usize]) -> (BipartitePoset, Vec<usize>) {
        let n = self.poset.len();
        let mut gone = FixedBitSet::with_capacity(n);
        for &x in removed {
            gone.insert(x);
        }
        let keep: Vec<usize> = (0..n).filter(|&x| !gone.contains(x)).collect();
        let mut new_index = vec![usize::MAX; n];
        for (i, &x) in keep.iter().enumerate() {
            new_index[x] = i;
        }
        let remap = |order: &[usize]| -> Vec<usize> {
            order
                .iter()
                .filter(|&&x| !gone.contains(x))
                .map(|&x| new_index[x])
                .collect()
        };
        let bp = BipartitePoset {
            poset: self.poset.induced(&keep),
            a_order: remap(&self.a_order),
            b_order: remap(&self.b_order),
        };
        (bp, keep)
    }
}

/// An induced copy of `S_k`: `a_elems[i] < b_elems[j]` exactly when `i != j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub a_elems: Vec<usize>,
    pub b_elems: Vec<usize>,
}

impl Embedding {
    /// Re-checks every defining property against `poset`.
    pub fn verify(&self, poset: &Poset) -> bool {
        let k = self.a_elems.len();
        if self.b_elems.len() != k || k == 0 {
            return false;
        }
        let all: Vec<usize> = self.a_elems.iter().chain(&self.b_elems).copied().collect();
        if all.iter().any(|&x| x >= poset.len()) {
            return false;
        }
        let mut seen = FixedBitSet::with_capacity(poset.len());
        for &x in &all {
            if seen.put(x) {
                return false;
            }
        }
        for i in 0..k {
            for j in 0..k {
                let (a, b) = (self.a_elems[i], self.b_elems[j]);
                if (i != j) != poset.lt(a, b) {
                    return false;
                }
                if i == j && !poset.incomparable(a, b) {
                    return false;
                }
                if i < j
                    && (poset.comparable(self.a_elems[i], self.a_elems[j])
                        || poset.comparable(self.b_elems[i], self.b_elems[j]))
                {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closes_a_three_chain() {
        let p = Poset::from_relations(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(p.relations(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(p, Poset::chain(3));
    }

    #[test]
    fn empty_relation_is_antichain() {
        let p = Poset::from_relations(2, []).unwrap();
        assert!(p.relations().is_empty());
    }

    #[test]
    fn rejects_cycles_and_bad_indices() {
        assert!(matches!(
            Poset::from_relations(2, [(0, 1), (1, 0)]),
            Err(Error::Cycle { .. })
        ));
        assert!(matches!(
            Poset::from_relations(2, [(0, 0)]),
            Err(Error::Cycle { .. })
        ));
        assert!(matches!(
            Poset::from_relations(2, [(0, 2)]),
            Err(Error::Index { index: 2, n: 2 })
        ));
    }

    #[test]
    fn standard_example_shape() {
        let s3 = Poset::standard_example(3).unwrap();
        assert_eq!(s3.len(), 6);
        assert_eq!(s3.relation_count(), 6);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(s3.lt(i, 3 + j), i != j);
            }
        }
        let s2 = Poset::standard_example(2).unwrap();
        assert_eq!(s2.relations(), vec![(0, 3), (1, 2)]);
        assert!(matches!(Poset::standard_example(1), Err(Error::Argument(_))));
    }

    #[test]
    fn upsets_and_downsets() {
        let s3 = Poset::standard_example(3).unwrap();
        assert_eq!(s3.upset(0).unwrap(), vec![4, 5]);
        assert_eq!(Poset::chain(3).downset(2).unwrap(), vec![0, 1]);
        assert!(Poset::antichain(3).upset(1).unwrap().is_empty());
        assert!(matches!(s3.upset(6), Err(Error::Index { .. })));
        assert!(matches!(s3.downset(9), Err(Error::Index { .. })));
    }

    #[test]
    fn dual_reverses() {
        let c = Poset::chain(2);
        let d = c.dual();
        assert!(d.lt(1, 0) && !d.lt(0, 1));
        assert_eq!(d.dual(), c);
        // S_3 dual is S_3 with the sides swapped: b_i < a_j iff i != j.
        let s3 = Poset::standard_example(3).unwrap();
        let relabel: Vec<usize> = vec![3, 4, 5, 0, 1, 2];
        let iso = s3.dual().induced(&relabel);
        assert_eq!(iso, s3);
    }

    #[test]
    fn heights() {
        assert_eq!(Poset::chain(5).height(), 5);
        assert_eq!(Poset::antichain(4).height(), 1);
        assert_eq!(Poset::standard_example(3).unwrap().height(), 2);
    }

    #[test]
    fn bipartitions() {
        let s3 = Poset::standard_example(3).unwrap();
        let bp = s3.bipartition().unwrap();
        assert_eq!(bp.a_order(), &[0, 1, 2]);
        assert_eq!(bp.b_order(), &[3, 4, 5]);
        assert!(Poset::chain(3).bipartition().is_none());
        let anti = Poset::antichain(4).bipartition().unwrap();
        assert_eq!(anti.a_order(), &[0, 1, 2, 3]);
        assert!(anti.b_order().is_empty());
    }

    #[test]
    fn bipartite_validation() {
        let s2 = Poset::standard_example(2).unwrap();
        assert!(BipartitePoset::new(s2.clone(), vec![0, 1], vec![2, 3]).is_ok());
        assert!(BipartitePoset::new(s2.clone(), vec![2, 3], vec![0, 1]).is_err());
        assert!(BipartitePoset::new(s2.clone(), vec![0, 1, 1], vec![2, 3]).is_err());
        assert!(BipartitePoset::new(s2, vec![0], vec![2, 3]).is_err());
    }

    #[test]
    fn detects_standard_examples() {
        let s3 = Poset::standard_example(3).unwrap();
        let e = s3.find_standard_example(3).unwrap();
        assert_eq!(e.a_elems, vec![0, 1, 2]);
        assert_eq!(e.b_elems, vec![3, 4, 5]);
        assert!(e.verify(&s3));
        assert!(s3.find_standard_example(4).is_none());
        assert!(Poset::chain(10).find_standard_example(3).is_none());
        // S_3 contains S_2 as well.
        let e2 = s3.find_standard_example(2).unwrap();
        assert!(e2.verify(&s3));
        assert_eq!(e2.a_elems, vec![0, 1]);
    }

    #[test]
    fn split_examples() {
        let one = Poset::antichain(1).kimble_split();
        assert_eq!(one.relations(), vec![(0, 1)]);
        let two = Poset::chain(2).kimble_split();
        assert_eq!(two.relations(), vec![(0, 2), (0, 3), (1, 3)]);
        assert_eq!(two.height(), 2);
        // S_3 itself is not S_3-free, and its split keeps the copy on
        // (a_i', b_j'').
        let s3 = Poset::standard_example(3).unwrap();
        let e = s3.kimble_split().find_standard_example(3).unwrap();
        assert_eq!(e.a_elems, vec![0, 1, 2]);
        assert_eq!(e.b_elems, vec![9, 10, 11]);
        // Split of an S_3-free poset (the 4-antichain) stays S_3-free.
        assert!(Poset::antichain(4).kimble_split().find_standard_example(3).is_none());
    }

    #[test]
    fn remove_keeps_orders() {
        let s3 = Poset::standard_example(3).unwrap();
        let bp = BipartitePoset::new(s3, vec![2, 0, 1], vec![3, 4, 5]).unwrap();
        let (rest, map) = bp.remove(&[0]);
        assert_eq!(map, vec![1, 2, 3, 4, 5]);
        assert_eq!(rest.a_order(), &[1, 0]);
        assert_eq!(rest.b_order(), &[2, 3, 4]);
        assert!(rest.poset().lt(0, 2) && !rest.poset().lt(0, 3));
    }

    #[test]
    fn covers_of_chain() {
        assert_eq!(Poset::chain(4).covers(), vec![(0, 1), (1, 2), (2, 3)]);
    }
}
