//! Seeded random poset generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)` in a fixed
//! order, so the output is a pure function of the arguments:
//!
//! * [`random_poset`]: shuffle `0..n` (Fisher-Yates, `SliceRandom::shuffle`)
//!   to get a topological order `t`; then for `i < j` in lexicographic order
//!   add `t[i] < t[j]` with probability `edge_prob`; close transitively.
//! * [`random_bipartite`]: `A = 0..nA`, `B = nA..nA+nB`; for each `a` in `A`
//!   and then each `b` in `B`, add `a < b` with probability `edge_prob`.
//! * [`random_skfree_bipartite`]: the same stream, one bipartite draw per
//!   attempt, until a draw is `S_k`-free.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poset::{BipartitePoset, Poset};

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Argument(format!("edge probability {p} not in [0, 1]")));
    }
    Ok(())
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent seed for sub-task `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.gen()
}

pub fn random_poset(n: usize, edge_prob: f64, seed: u64) -> Result<Poset> {
    check_prob(edge_prob)?;
    random_poset_with(n, edge_prob, &mut rng_from_seed(seed))
}

pub(crate) fn random_poset_with<R: Rng>(n: usize, edge_prob: f64, rng: &mut R) -> Result<Poset> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_prob) {
                pairs.push((order[i], order[j]));
            }
        }
    }
    Poset::from_relations(n, pairs)
}

pub fn random_bipartite(n_a: usize, n_b: usize, edge_prob: f64, seed: u64) -> Result<BipartitePoset> {
    check_prob(edge_prob)?;
    Ok(random_bipartite_with(n_a, n_b, edge_prob, &mut rng_from_seed(seed)))
}

fn random_bipartite_with<R: Rng>(n_a: usize, n_b: usize, edge_prob: f64, rng: &mut R) -> BipartitePoset {
    let mut pairs = Vec::new();
    for a in 0..n_a {
        for b in n_a..n_a + n_b {
            if rng.gen_bool(edge_prob) {
                pairs.push((a, b));
            }
        }
    }
    let poset = Poset::from_relations(n_a + n_b, pairs).expect("bipartite relation is acyclic");
    BipartitePoset::new(poset, (0..n_a).collect(), (n_a..n_a + n_b).collect())
        .expect("parts cover the ground set")
}

pub fn random_skfree_bipartite(
    n_a: usize,
    n_b: usize,
    edge_prob: f64,
    k: usize,
    seed: u64,
    max_tries: usize,
) -> Result<BipartitePoset> {
    check_prob(edge_prob)?;
    if max_tries == 0 {
        return Err(Error::Argument("max_tries must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..max_tries {
        let bp = random_bipartite_with(n_a, n_b, edge_prob, &mut rng);
        if bp.poset().find_standard_example(k).is_none() {
            return Ok(bp);
        }
    }
    Err(Error::GenerationExhausted { tries: max_tries, k })
}

/// Random poset conditioned on being `S_k`-free, by rejection.
pub fn random_skfree_poset(
    n: usize,
    edge_prob: f64,
    k: usize,
    seed: u64,
    max_tries: usize,
) -> Result<Poset> {
    check_prob(edge_prob)?;
    let mut rng = rng_from_seed(seed);
    for _ in 0..max_tries {
        let p = random_poset_with(n, edge_prob, &mut rng)?;
        if p.find_standard_example(k).is_none() {
            return Ok(p);
        }
    }
    Err(Error::GenerationExhausted { tries: max_tries, k })
}
