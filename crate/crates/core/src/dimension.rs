//! Critical pairs, realizer verification and exact order dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::{topological_order_by, Poset};

/// Ordered pair `(x, y)` with `x ‖ y`, `D(x) ⊆ D(y)` and `U(y) ⊆ U(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CriticalPair {
    pub x: usize,
    pub y: usize,
}

impl CriticalPair {
    pub fn new(x: usize, y: usize) -> Self {
        CriticalPair { x, y }
    }

    pub fn is_critical_in(&self, poset: &Poset) -> bool {
        let (x, y) = (self.x, self.y);
        x < poset.len()
            && y < poset.len()
            && poset.incomparable(x, y)
            && poset.below(x).is_subset(poset.below(y))
            && poset.above(y).is_subset(poset.above(x))
    }
}

/// A total order listed bottom to top.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearExtension {
    order: Vec<usize>,
}

impl LinearExtension {
    pub fn new(order: Vec<usize>) -> Self {
        LinearExtension { order }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn into_order(self) -> Vec<usize> {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `positions()[x]` is the height of `x` in this order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![usize::MAX; self.order.len()];
        for (i, &x) in self.order.iter().enumerate() {
            if x < pos.len() {
                pos[x] = i;
            }
        }
        pos
    }

    /// The same order read top to bottom; an extension of the dual poset.
    pub fn reversed(&self) -> LinearExtension {
        LinearExtension {
            order: self.order.iter().rev().copied().collect(),
        }
    }

    /// True iff `y` comes before `x`.
    pub fn reverses(&self, pair: CriticalPair) -> bool {
        let pos = self.positions();
        pos[pair.y] < pos[pair.x]
    }

    /// Checks that this is a permutation of the ground set respecting every
    /// relation of `poset`. `index` labels the extension in error reports.
    pub fn check_against(&self, poset: &Poset, index: usize) -> Result<Vec<usize>> {
        let n = poset.len();
        if self.order.len() != n {
            return Err(Error::Argument(format!(
                "extension {index} lists {} elements, poset has {n}",
                self.order.len()
            )));
        }
        let pos = self.positions();
        if let Some(x) = pos.iter().position(|&p| p == usize::MAX) {
            return Err(Error::Argument(format!(
                "extension {index} is not a permutation: element {x} missing"
            )));
        }
        for (lower, upper) in poset.relations() {
            if pos[lower] > pos[upper] {
                return Err(Error::NotAnExtension {
                    extension: index,
                    lower,
                    upper,
                });
            }
        }
        Ok(pos)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realizer {
    pub extensions: Vec<LinearExtension>,
}

impl Realizer {
    pub fn len(&self) -> usize {
        self.extensions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extensions.is_empty()
    }

    /// Realizer of the dual poset.
    pub fn reversed(&self) -> Realizer {
        Realizer {
            extensions: self.extensions.iter().map(LinearExtension::reversed).collect(),
        }
    }
}

/// Outcome of a dimension computation. Serializes as
/// `{"n", "dimension", "extensions", "optimal"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionResult {
    pub n: usize,
    pub dimension: usize,
    #[serde(flatten)]
    pub realizer: Realizer,
    pub optimal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizerCheck {
    pub valid: bool,
    pub unreversed: Vec<CriticalPair>,
}

/// All critical pairs in lexicographic order.
pub fn critical_pairs(poset: &Poset) -> Vec<CriticalPair> {
    let n = poset.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let c = CriticalPair::new(x, y);
            if x != y && c.is_critical_in(poset) {
                out.push(c);
            }
        }
    }
    out
}

/// Verifies `extensions` against `poset` and lists the critical pairs no
/// extension reverses. An empty family is never a realizer.
pub fn is_realizer(poset: &Poset, extensions: &[LinearExtension]) -> Result<RealizerCheck> {
    let positions = extensions
        .iter()
        .enumerate()
        .map(|(i, l)| l.check_against(poset, i))
        .collect::<Result<Vec<_>>>()?;
    let unreversed: Vec<CriticalPair> = critical_pairs(poset)
        .into_iter()
        .filter(|c| !positions.iter().any(|pos| pos[c.y] < pos[c.x]))
        .collect();
    Ok(RealizerCheck {
        valid: !extensions.is_empty() && unreversed.is_empty(),
        unreversed,
    })
}

fn check_incomparable(poset: &Poset, pairs: &[CriticalPair]) -> Result<()> {
    for c in pairs {
        if c.x >= poset.len() || c.y >= poset.len() {
            return Err(Error::Index {
                index: c.x.max(c.y),
                n: poset.len(),
            });
        }
        if poset.comparable(c.x, c.y) {
            return Err(Error::ComparablePair { x: c.x, y: c.y });
        }
    }
    Ok(())
}

/// A single linear extension reversing every pair in `pairs`, if one exists:
/// the smallest-index-first topological order of `P ∪ {y < x}`.
pub fn reversing_extension(poset: &Poset, pairs: &[CriticalPair]) -> Result<Option<LinearExtension>> {
    check_incomparable(poset, pairs)?;
    let mut rows = ClassRows::new(poset);
    for &c in pairs {
        if !rows.can_reverse(c) {
            return Ok(None);
        }
        rows.reverse(c);
    }
    Ok(Some(rows.extension()))
}

pub fn is_reversible(poset: &Poset, pairs: &[CriticalPair]) -> Result<bool> {
    Ok(reversing_extension(poset, pairs)?.is_some())
}

/// Transitively closed relation of `P` plus the reversals assigned to one
/// extension, stored as flat bitset rows.
#[derive(Clone)]
struct ClassRows {
    n: usize,
    words: usize,
    above: Vec<u64>,
    below: Vec<u64>,
}

impl ClassRows {
    fn new(poset: &Poset) -> Self {
        let n = poset.len();
        let words = n.div_ceil(64).max(1);
        let mut above = vec![0u64; n * words];
        let mut below = vec![0u64; n * words];
        for x in 0..n {
            for y in poset.above(x).ones() {
                above[x * words + y / 64] |= 1 << (y % 64);
                below[y * words + x / 64] |= 1 << (x % 64);
            }
        }
        ClassRows {
            n,
            words,
            above,
            below,
        }
    }

    #[inline]
    fn lt(&self, x: usize, y: usize) -> bool {
        self.above[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    /// `y < x` can be added without creating a cycle.
    #[inline]
    fn can_reverse(&self, c: CriticalPair) -> bool {
        !self.lt(c.x, c.y)
    }

    fn reverse(&mut self, c: CriticalPair) {
        let w = self.words;
        let mut low = self.below[c.y * w..(c.y + 1) * w].to_vec();
        low[c.y / 64] |= 1 << (c.y % 64);
        let mut high = self.above[c.x * w..(c.x + 1) * w].to_vec();
        high[c.x / 64] |= 1 << (c.x % 64);
        for u in ones(&low) {
            for (dst, src) in self.above[u * w..(u + 1) * w].iter_mut().zip(&high) {
                *dst |= src;
            }
        }
        for v in ones(&high) {
            for (dst, src) in self.below[v * w..(v + 1) * w].iter_mut().zip(&low) {
                *dst |= src;
            }
        }
    }

    fn extension(&self) -> LinearExtension {
        let w = self.words;
        let order = topological_order_by(
            self.n,
            |x| ones(&self.below[x * w..(x + 1) * w]),
            |x| ones(&self.above[x * w..(x + 1) * w]),
        );
        LinearExtension::new(order)
    }
}

fn ones(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut bits = w;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i * 64 + b)
        })
    })
}

/// First-fit packing of `pairs` into reversible classes, one extension per
/// class. Pairs must be incomparable.
pub fn greedy_reversing_extensions(poset: &Poset, pairs: &[CriticalPair]) -> Result<Vec<LinearExtension>> {
    check_incomparable(poset, pairs)?;
    let mut classes: Vec<ClassRows> = Vec::new();
    for &c in pairs {
        match classes.iter_mut().find(|cls| cls.can_reverse(c)) {
            Some(cls) => cls.reverse(c),
            None => {
                let mut cls = ClassRows::new(poset);
                cls.reverse(c);
                classes.push(cls);
            }
        }
    }
    Ok(classes.iter().map(ClassRows::extension).collect())
}

/// Two critical pairs fit in one extension unless `x1 <= y2` and `x2 <= y1`.
fn conflict(poset: &Poset, p: CriticalPair, q: CriticalPair) -> bool {
    poset.le(p.x, q.y) && poset.le(q.x, p.y)
}

/// Minimum realizer size with a witness.
///
/// Critical pairs are colored so that each color class is reversible; the
/// search deepens from a clique lower bound towards a first-fit upper bound,
/// always branching on the pair with the fewest admissible classes. A new
/// class may only be opened after all lower-numbered classes are in use.
///
/// With a `budget` (search nodes), running out returns
/// [`Error::BudgetExceeded`] carrying the best realizer found so far.
pub fn exact_dimension(poset: &Poset, budget: Option<u64>) -> Result<DimensionResult> {
    let n = poset.len();
    if n == 0 {
        return Err(Error::Argument("dimension of the empty poset is undefined".into()));
    }
    let pairs = critical_pairs(poset);
    if pairs.is_empty() {
        return Ok(DimensionResult {
            n,
            dimension: 1,
            realizer: Realizer {
                extensions: vec![LinearExtension::new(poset.topological_order())],
            },
            optimal: true,
        });
    }

    let m = pairs.len();
    let mut conflicts = vec![vec![false; m]; m];
    for i in 0..m {
        for j in i + 1..m {
            let c = conflict(poset, pairs[i], pairs[j]);
            conflicts[i][j] = c;
            conflicts[j][i] = c;
        }
    }
    let degree: Vec<usize> = conflicts.iter().map(|row| row.iter().filter(|&&c| c).count()).collect();
    let mut by_degree: Vec<usize> = (0..m).collect();
    by_degree.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));

    let mut clique: Vec<usize> = Vec::new();
    for &i in &by_degree {
        if clique.iter().all(|&j| conflicts[i][j]) {
            clique.push(i);
        }
    }
    let lower = clique.len().max(2);

    let ordered: Vec<CriticalPair> = by_degree.iter().map(|&i| pairs[i]).collect();
    let greedy = greedy_reversing_extensions(poset, &ordered)?;
    let upper = greedy.len();
    let greedy_result = |optimal| DimensionResult {
        n,
        dimension: upper,
        realizer: Realizer {
            extensions: greedy.clone(),
        },
        optimal,
    };

    let mut search = ColoringSearch {
        base: ClassRows::new(poset),
        pairs: &pairs,
        degree: &degree,
        assigned: vec![None; m],
        classes: Vec::new(),
        nodes: 0,
        budget: budget.unwrap_or(u64::MAX),
    };
    for d in lower..upper {
        match search.run(d) {
            Search::Found(extensions) => {
                return Ok(DimensionResult {
                    n,
                    dimension: d,
                    realizer: Realizer { extensions },
                    optimal: true,
                })
            }
            Search::Exhausted => continue,
            Search::OutOfBudget => {
                return Err(Error::BudgetExceeded {
                    budget: search.budget,
                    best: Box::new(greedy_result(false)),
                })
            }
        }
    }
    Ok(greedy_result(true))
}

enum Search {
    Found(Vec<LinearExtension>),
    Exhausted,
    OutOfBudget,
}

struct ColoringSearch<'a> {
    base: ClassRows,
    pairs: &'a [CriticalPair],
    degree: &'a [usize],
    assigned: Vec<Option<usize>>,
    classes: Vec<ClassRows>,
    nodes: u64,
    budget: u64,
}

impl ColoringSearch<'_> {
    fn run(&mut self, colors: usize) -> Search {
        self.assigned.iter_mut().for_each(|a| *a = None);
        self.classes.clear();
        match self.dfs(colors) {
            Some(true) => Search::Found(self.classes.iter().map(ClassRows::extension).collect()),
            Some(false) => Search::Exhausted,
            None => Search::OutOfBudget,
        }
    }

    /// `Some(found)`, or `None` once the node budget is spent.
    fn dfs(&mut self, colors: usize) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let can_open = self.classes.len() < colors;
        let mut pick: Option<(usize, usize)> = None;
        for (i, &c) in self.pairs.iter().enumerate() {
            if self.assigned[i].is_some() {
                continue;
            }
            let avail = self.classes.iter().filter(|cls| cls.can_reverse(c)).count() + usize::from(can_open);
            if avail == 0 {
                return Some(false);
            }
            let better = match pick {
                None => true,
                Some((best, best_avail)) => {
                    avail < best_avail || (avail == best_avail && self.degree[i] > self.degree[best])
                }
            };
            if better {
                pick = Some((i, avail));
            }
        }
        let Some((i, _)) = pick else {
            return Some(true);
        };
        let c = self.pairs[i];

        for cls in 0..self.classes.len() {
            if !self.classes[cls].can_reverse(c) {
                continue;
            }
            let saved = self.classes[cls].clone();
            self.classes[cls].reverse(c);
            self.assigned[i] = Some(cls);
            match self.dfs(colors) {
                Some(false) => {}
                other => return other,
            }
            self.assigned[i] = None;
            self.classes[cls] = saved;
        }
        if can_open {
            let mut fresh = self.base.clone();
            fresh.reverse(c);
            self.classes.push(fresh);
            self.assigned[i] = Some(self.classes.len() - 1);
            match self.dfs(colors) {
                Some(false) => {}
                other => return other,
            }
            self.assigned[i] = None;
            self.classes.pop();
        }
        Some(false)
    }
}

pub const BRUTE_FORCE_MAX: usize = 7;

/// Dimension by exhaustion over subsets of all linear extensions, testing
/// whether their intersection equals the order. Independent of critical pairs.
pub fn brute_force_dimension(poset: &Poset) -> Result<usize> {
    let n = poset.len();
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge {
            n,
            max: BRUTE_FORCE_MAX,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let mut target = 0u64;
    for (x, y) in poset.relations() {
        target |= 1 << (x * n + y);
    }
    let masks: Vec<u64> = all_linear_extensions(poset)
        .iter()
        .map(|order| {
            let mut mask = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    mask |= 1 << (order[i] * n + order[j]);
                }
            }
            mask
        })
        .collect();
    for d in 1..=masks.len() {
        if subset_meets(&masks, d, 0, !0u64, target) {
            return Ok(d);
        }
    }
    unreachable!("the family of all linear extensions realizes the poset")
}

fn subset_meets(masks: &[u64], d: usize, start: usize, acc: u64, target: u64) -> bool {
    if d == 0 {
        return acc == target;
    }
    (start..masks.len()).any(|i| subset_meets(masks, d - 1, i + 1, acc & masks[i], target))
}

/// Every linear extension, bottom to top.
pub fn all_linear_extensions(poset: &Poset) -> Vec<Vec<usize>> {
    fn rec(poset: &Poset, placed: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = poset.len();
        if placed.len() == n {
            out.push(placed.clone());
            return;
        }
        for x in 0..n {
            if !used[x] && poset.below(x).ones().all(|y| used[y]) {
                used[x] = true;
                placed.push(x);
                rec(poset, placed, used, out);
                placed.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(poset, &mut Vec::new(), &mut vec![false; poset.len()], &mut out);
    out
}
