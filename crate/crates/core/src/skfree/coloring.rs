//! Mates, valid colors and upset-based colorings of the `k`-subsets of `A`.
//!
//! Subsets are given as element indices listed in `a_order`. Positions inside
//! a subset are 0-based; colors are 1-based, so color `c` names position
//! `c - 1`.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::poset::{BipartitePoset, Embedding};

fn part_bits(bp: &BipartitePoset, part: &[usize]) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(bp.poset().len());
    for &x in part {
        bits.insert(x);
    }
    bits
}

/// Mates of `subset[pos]`: elements `b` of `B` incomparable to `subset[pos]`
/// and above every other member of `subset`.
pub fn mates(bp: &BipartitePoset, subset: &[usize], pos: usize) -> Vec<usize> {
    let poset = bp.poset();
    let mut acc = part_bits(bp, bp.b_order());
    for (j, &a) in subset.iter().enumerate() {
        if j != pos {
            acc.intersect_with(poset.above(a));
        }
    }
    acc.difference_with(poset.above(subset[pos]));
    acc.set(subset[pos], false);
    acc.ones().collect()
}

/// Colors `c` such that position `c - 1` of `subset` has no mate.
///
/// An empty answer means `subset` together with one mate per position is an
/// induced standard example, returned inside [`Error::NoValidColor`].
pub fn valid_colors(bp: &BipartitePoset, subset: &[usize]) -> Result<Vec<usize>> {
    let all_mates: Vec<Vec<usize>> = (0..subset.len()).map(|i| mates(bp, subset, i)).collect();
    let colors: Vec<usize> = all_mates
        .iter()
        .enumerate()
        .filter(|(_, m)| m.is_empty())
        .map(|(i, _)| i + 1)
        .collect();
    if colors.is_empty() {
        return Err(Error::NoValidColor {
            embedding: Embedding {
                a_elems: subset.to_vec(),
                b_elems: all_mates.iter().map(|m| m[0]).collect(),
            },
        });
    }
    Ok(colors)
}

/// `C(n, k)` as u64; saturates instead of overflowing.
pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

/// Colex rank of a strictly increasing tuple of positions.
fn colex_rank(positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .map(|(i, &p)| binomial(p, i + 1) as usize)
        .sum()
}

/// Steps `c` to the next `k`-combination of `0..n` in colex order.
fn next_colex(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in 0..k {
        let limit = if i + 1 < k { c[i + 1] } else { n };
        if c[i] + 1 < limit {
            c[i] += 1;
            for (j, slot) in c.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return true;
        }
    }
    false
}

/// A color in `1..=k` for every `k`-subset of `A`, keyed by the subset's
/// positions in `a_order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UBColoring {
    k: usize,
    a_order: Vec<usize>,
    colors: Vec<u8>,
}

impl UBColoring {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn a_order(&self) -> &[usize] {
        &self.a_order
    }

    pub fn subset_count(&self) -> usize {
        self.colors.len()
    }

    /// Color of the subset at strictly increasing `positions` of `a_order`.
    pub fn color(&self, positions: &[usize]) -> usize {
        debug_assert_eq!(positions.len(), self.k);
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        self.colors[colex_rank(positions)] as usize
    }

    /// Every `(positions, color)` pair, in colex order of the positions.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, usize)> + '_ {
        let n = self.a_order.len();
        let mut cur: Vec<usize> = (0..self.k).collect();
        let mut idx = 0;
        std::iter::from_fn(move || {
            if idx >= self.colors.len() {
                return None;
            }
            let item = (cur.clone(), self.colors[idx] as usize);
            idx += 1;
            next_colex(&mut cur, n);
            Some(item)
        })
    }

    /// Element indices of the subset at `positions`.
    pub fn elements(&self, positions: &[usize]) -> Vec<usize> {
        positions.iter().map(|&p| self.a_order[p]).collect()
    }
}

/// Colors every `k`-subset of `A` with its smallest valid color. Fails with
/// the witness embedding as soon as a subset has no valid color.
pub fn ub_coloring(bp: &BipartitePoset, k: usize) -> Result<UBColoring> {
    if k < 2 || k > u8::MAX as usize {
        return Err(Error::Argument(format!("subset size k = {k} out of range")));
    }
    let a = bp.a_order();
    let poset = bp.poset();
    let b_bits = part_bits(bp, bp.b_order());
    let total = binomial(a.len(), k);
    if total > (1 << 32) {
        return Err(Error::Argument(format!("{total} subsets is too many to color")));
    }
    let mut colors = Vec::with_capacity(total as usize);
    if total == 0 {
        return Ok(UBColoring {
            k,
            a_order: a.to_vec(),
            colors,
        });
    }

    let blocks = b_bits.as_slice().len();
    let rows: Vec<&[usize]> = a.iter().map(|&x| poset.above(x).as_slice()).collect();
    let b_words = b_bits.as_slice();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        let color = (0..k).find(|&i| {
            (0..blocks).all(|w| {
                let mut word = b_words[w] & !rows[cur[i]][w];
                for (j, &p) in cur.iter().enumerate() {
                    if j != i {
                        word &= rows[p][w];
                    }
                }
                word == 0
            })
        });
        match color {
            Some(i) => colors.push(i as u8 + 1),
            None => {
                let subset: Vec<usize> = cur.iter().map(|&p| a[p]).collect();
                return Err(valid_colors(bp, &subset).unwrap_err());
            }
        }
        if !next_colex(&mut cur, a.len()) {
            break;
        }
    }
    Ok(UBColoring {
        k,
        a_order: a.to_vec(),
        colors,
    })
}

/// A `q`-subset of `A` all of whose `k`-subsets share one color, as element
/// indices in `a_order` together with that color.
///
/// Colors are tried in increasing order; for each, a depth-first search over
/// `a_order` extends the current set with the next position whose every new
/// `k`-subset has the color. Sets smaller than `k` contain no `k`-subsets and
/// are reported with color 1.
pub fn find_monochromatic(coloring: &UBColoring, q: usize) -> Option<(Vec<usize>, usize)> {
    let n = coloring.a_order.len();
    let k = coloring.k;
    if q > n {
        return None;
    }
    if q < k {
        return Some((coloring.a_order[..q].to_vec(), 1));
    }
    for color in 1..=k {
        let mut chosen = Vec::with_capacity(q);
        if extend_mono(coloring, color, q, 0, &mut chosen) {
            return Some((coloring.elements(&chosen), color));
        }
    }
    None
}

fn extend_mono(coloring: &UBColoring, color: usize, q: usize, from: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == q {
        return true;
    }
    let n = coloring.a_order.len();
    for p in from..n {
        if n - p < q - chosen.len() {
            break;
        }
        if fits(coloring, color, chosen, p) {
            chosen.push(p);
            if extend_mono(coloring, color, q, p + 1, chosen) {
                return true;
            }
            chosen.pop();
        }
    }
    false
}

/// Every `k`-subset of `chosen ∪ {p}` that contains `p` has `color`.
fn fits(coloring: &UBColoring, color: usize, chosen: &[usize], p: usize) -> bool {
    let k = coloring.k;
    if chosen.len() + 1 < k {
        return true;
    }
    let mut idx: Vec<usize> = (0..k - 1).collect();
    let mut tuple = vec![0; k];
    loop {
        for (slot, &i) in tuple.iter_mut().zip(&idx) {
            *slot = chosen[i];
        }
        tuple[k - 1] = p;
        if coloring.color(&tuple) != color {
            return false;
        }
        if !next_colex(&mut idx, chosen.len()) {
            return true;
        }
    }
}
