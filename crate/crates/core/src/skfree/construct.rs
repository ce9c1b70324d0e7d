//! Linear extensions that reverse every critical pair `(a, b)` with `a` in a
//! monochromatic set `Q` and `b` in `B`.
//!
//! Each matrix row yields two column permutations. A permutation `σ` becomes
//! the extension (top to bottom)
//! `U_1 > a_σ(1) > U_2 > a_σ(2) > ... > U_q > a_σ(q) > R`, where `U_i` holds
//! the elements above `a_σ(i)` not already placed in an earlier `U_j`.

use fixedbitset::FixedBitSet;

use crate::dimension::{CriticalPair, LinearExtension};
use crate::error::{Error, Result};
use crate::poset::BipartitePoset;
use crate::skfree::matrix::{acquire_event_matrix, required_rows, BinaryMatrix};

const MATRIX_TRIES: usize = 10_000;

/// `(σ₁, σ₂)` for a matrix row, as 0-based column indices. `σ₁` lists the
/// 1-columns left to right and then the 0-columns left to right; `σ₂` does
/// the same scanning right to left.
pub fn sigma_permutations(row: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let ones = row.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j);
    let zeros = row.iter().enumerate().filter(|(_, &b)| !b).map(|(j, _)| j);
    let sigma1: Vec<usize> = ones.clone().chain(zeros.clone()).collect();
    let sigma2: Vec<usize> = ones.rev().chain(zeros.rev()).collect();
    (sigma1, sigma2)
}

/// Builds the extension for `sigma` over the ordered set `q_elems`.
/// Within each `U_i` elements go bottom to top by ascending index; `R` is
/// placed at the bottom in smallest-index-first topological order.
pub fn extension_from_sigma(bp: &BipartitePoset, q_elems: &[usize], sigma: &[usize]) -> LinearExtension {
    let poset = bp.poset();
    let n = poset.len();
    let mut placed = FixedBitSet::with_capacity(n);
    for &a in q_elems {
        placed.insert(a);
    }
    // Blocks from the top down: U_1, a_σ(1), U_2, a_σ(2), ...
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(2 * sigma.len());
    for &s in sigma {
        let a = q_elems[s];
        let mut u = poset.above(a).clone();
        u.difference_with(&placed);
        placed.union_with(&u);
        blocks.push(u.ones().collect());
        blocks.push(vec![a]);
    }
    let rest: Vec<usize> = (0..n).filter(|&x| !placed.contains(x)).collect();
    let mut order: Vec<usize> = poset
        .induced(&rest)
        .topological_order()
        .into_iter()
        .map(|i| rest[i])
        .collect();
    for block in blocks.into_iter().rev() {
        order.extend(block);
    }
    LinearExtension::new(order)
}

/// Number of matrix rows used for a set of size `q`: `⌈k 2^k ln q⌉`.
pub fn rows_for(k: usize, q: usize) -> usize {
    required_rows(k, q)
}

/// Tuple size of the matrix event for color `color`: `max(color - 1, k - color)`,
/// capped at `q` since the event is only defined for tuples of columns.
pub fn event_width(k: usize, color: usize, q: usize) -> usize {
    (color - 1).max(k - color).min(q).max(1)
}

#[derive(Clone, Debug)]
pub struct ReversingFamily {
    pub matrix: BinaryMatrix,
    pub t: usize,
    pub extensions: Vec<LinearExtension>,
}

/// Two extensions per row of a `⌈k 2^k ln q⌉ x q` event-E matrix, checked to
/// reverse every incomparable pair `(a, b)` with `a ∈ Q`, `b ∈ B`.
///
/// `q_elems` must be listed in `a_order`. A pair left unreversed is reported
/// as [`Error::VerificationFailed`] together with `|M1|` and `|M2|`, the
/// numbers of members of `Q` before and after `a` that lie below `b`.
pub fn build_reversing_extensions(
    bp: &BipartitePoset,
    q_elems: &[usize],
    color: usize,
    k: usize,
    seed: u64,
) -> Result<ReversingFamily> {
    let q = q_elems.len();
    if q < 2 {
        return Err(Error::Argument(format!("need |Q| >= 2, got {q}")));
    }
    if color == 0 || color > k {
        return Err(Error::Argument(format!("color {color} not in 1..={k}")));
    }
    let r = rows_for(k, q);
    let t = event_width(k, color, q);
    let matrix = acquire_event_matrix(t, q, r, seed, MATRIX_TRIES)?;

    let mut extensions = Vec::with_capacity(2 * r);
    for row in matrix.iter_rows() {
        let (s1, s2) = sigma_permutations(row);
        extensions.push(extension_from_sigma(bp, q_elems, &s1));
        extensions.push(extension_from_sigma(bp, q_elems, &s2));
    }

    let poset = bp.poset();
    let positions: Vec<Vec<usize>> = extensions.iter().map(LinearExtension::positions).collect();
    for (i, &a) in q_elems.iter().enumerate() {
        for &b in bp.b_order() {
            if !poset.incomparable(a, b) {
                continue;
            }
            let pair = CriticalPair::new(a, b);
            if !positions.iter().any(|pos| pos[pair.y] < pos[pair.x]) {
                let m1 = q_elems[..i].iter().filter(|&&m| poset.lt(m, b)).count();
                let m2 = q_elems[i + 1..].iter().filter(|&&m| poset.lt(m, b)).count();
                return Err(Error::VerificationFailed { a, b, m1, m2 });
            }
        }
    }
    Ok(ReversingFamily { matrix, t, extensions })
}
