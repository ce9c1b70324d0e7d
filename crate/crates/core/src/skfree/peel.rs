//! Peeling monochromatic sets off an `S_k`-free bipartite poset.
//!
//! One step removes a monochromatic `Q ⊆ A` and pays for it with the
//! reversing family of [`build_reversing_extensions`], one extension with the
//! minimal elements in reverse order, and greedy cleanup extensions for
//! anything still unreversed. Iterating the step and finishing with the exact
//! solver yields a realizer of the whole poset together with an auditable
//! certificate.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};

use crate::dimension::{
    critical_pairs, exact_dimension, greedy_reversing_extensions, is_realizer, CriticalPair, LinearExtension,
    Realizer,
};
use crate::error::{Error, Result};
use crate::generate::derive_seed;
use crate::poset::{BipartitePoset, Poset};
use crate::skfree::coloring::{find_monochromatic, ub_coloring};
use crate::skfree::construct::build_reversing_extensions;

/// `⌊3 k 2^k ln q⌋`, the most extensions a single step may spend.
pub fn step_limit(k: usize, q: usize) -> usize {
    (3.0 * k as f64 * 2f64.powi(k as i32) * (q as f64).ln()).floor() as usize
}

#[derive(Clone, Debug)]
pub struct PeelStepOutcome {
    /// Removed set, as indices of the input poset listed in `a_order`.
    pub removed: Vec<usize>,
    pub color: usize,
    pub matrix_rows: usize,
    /// Reversing family, then the minimal-element extension, then cleanup.
    pub extensions: Vec<LinearExtension>,
    pub cleanup: usize,
}

/// Minimal elements at the bottom (those of `A` in descending `a_order`, then
/// isolated elements of `B` in descending `b_order`), everything else above
/// by ascending index.
pub fn minimal_set_extension(bp: &BipartitePoset) -> LinearExtension {
    let poset = bp.poset();
    let mut order: Vec<usize> = bp.a_order().iter().rev().copied().collect();
    order.extend(bp.b_order().iter().rev().filter(|&&b| poset.is_minimal(b)));
    order.extend((0..poset.len()).filter(|&x| !poset.is_minimal(x)));
    LinearExtension::new(order)
}

/// One peeling step on `bp`.
///
/// The step's extensions reverse every critical pair `(x, y)` with `x ∈ Q`.
/// Pairs `(x, y)` with `y ∈ Q` and `x ∉ Q` are left to the caller: lifting
/// any realizer of `P - Q` by placing `Q` at the very bottom reverses them.
pub fn peel_step(bp: &BipartitePoset, k: usize, q: usize, seed: u64) -> Result<PeelStepOutcome> {
    if k < 2 || q < 2 {
        return Err(Error::Argument(format!("need k >= 2 and q >= 2, got k = {k}, q = {q}")));
    }
    if q > bp.a_order().len() {
        return Err(Error::NoMonochromaticSet { q });
    }
    let (removed, color) = if q >= k {
        let coloring = ub_coloring(bp, k)?;
        find_monochromatic(&coloring, q).ok_or(Error::NoMonochromaticSet { q })?
    } else {
        // No k-subsets inside Q: every color is vacuously shared.
        (bp.a_order()[..q].to_vec(), 1)
    };

    let family = build_reversing_extensions(bp, &removed, color, k, seed)?;
    let matrix_rows = family.matrix.rows();
    let mut extensions = family.extensions;
    extensions.push(minimal_set_extension(bp));

    let poset = bp.poset();
    let positions: Vec<Vec<usize>> = extensions.iter().map(LinearExtension::positions).collect();
    let unreversed: Vec<CriticalPair> = removed
        .iter()
        .flat_map(|&x| (0..poset.len()).map(move |y| CriticalPair::new(x, y)))
        .filter(|c| c.x != c.y && c.is_critical_in(poset))
        .filter(|c| !positions.iter().any(|pos| pos[c.y] < pos[c.x]))
        .collect();
    let cleanup = greedy_reversing_extensions(poset, &unreversed)?;
    let cleanup_count = cleanup.len();
    extensions.extend(cleanup);

    let limit = step_limit(k, q);
    if extensions.len() > limit {
        return Err(Error::BoundExceeded {
            used: extensions.len(),
            limit,
        });
    }
    Ok(PeelStepOutcome {
        removed,
        color,
        matrix_rows,
        extensions,
        cleanup: cleanup_count,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelStep {
    /// Removed elements, as indices of the original poset.
    pub removed: Vec<usize>,
    pub q: usize,
    pub color: usize,
    pub matrix_rows: usize,
    /// All extensions paid at this step, cleanup included.
    pub extensions: usize,
    pub cleanup: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelCertificate {
    pub steps: Vec<PeelStep>,
    pub base_size: usize,
    pub base_dimension: usize,
    pub total_size: usize,
    pub realizer: Realizer,
}

impl PeelCertificate {
    /// `base_dimension + steps * ⌊3 k 2^k ln q⌋`.
    pub fn guaranteed_bound(&self, k: usize, q: usize) -> usize {
        self.base_dimension + self.steps.len() * step_limit(k, q)
    }

    /// The size identity `total_size = base_dimension + Σ step extensions`.
    pub fn sizes_consistent(&self) -> bool {
        let paid: usize = self.steps.iter().map(|s| s.extensions).sum();
        self.total_size == self.base_dimension + paid && self.total_size == self.realizer.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeelConfig {
    pub k: usize,
    pub q: usize,
    pub base_threshold: usize,
    pub seed: u64,
    /// Node budget for the exact solver on the base.
    pub budget: Option<u64>,
}

enum Side {
    Bottom,
    Top,
}

struct Level {
    side: Side,
    /// Removed elements (original indices) in the bottom-to-top order they
    /// take when lifted.
    lift: Vec<usize>,
    extensions: Vec<Vec<usize>>,
}

/// Repeated peeling down to `base_threshold` elements, then the exact solver.
///
/// Each level peels the larger side: when `|A| < |B|` the step runs on the
/// dual and its extensions are read backwards. The returned realizer is
/// checked against `bp` before returning.
pub fn peel_realizer(bp: &BipartitePoset, cfg: &PeelConfig) -> Result<PeelCertificate> {
    if cfg.q < 2 || cfg.base_threshold < cfg.q {
        return Err(Error::Argument(format!(
            "need q >= 2 and base_threshold >= q, got q = {}, base_threshold = {}",
            cfg.q, cfg.base_threshold
        )));
    }
    if let Some(embedding) = bp.poset().find_standard_example(cfg.k) {
        return Err(Error::ContainsSk { embedding });
    }

    let mut current = bp.clone();
    let mut to_original: Vec<usize> = (0..bp.poset().len()).collect();
    let mut levels: Vec<Level> = Vec::new();
    let mut steps: Vec<PeelStep> = Vec::new();

    while current.poset().len() > cfg.base_threshold {
        let dual = current.a_order().len() < current.b_order().len();
        let oriented = if dual { current.dual() } else { current.clone() };
        let seed = derive_seed(cfg.seed, levels.len() as u64);
        let outcome = match peel_step(&oriented, cfg.k, cfg.q, seed) {
            Ok(o) => o,
            Err(Error::NoMonochromaticSet { .. }) => break,
            Err(e) => return Err(e),
        };

        let to_orig = |x: usize| to_original[x];
        let extensions: Vec<Vec<usize>> = outcome
            .extensions
            .iter()
            .map(|l| {
                let l = if dual { l.reversed() } else { l.clone() };
                l.order().iter().map(|&x| to_orig(x)).collect()
            })
            .collect();
        // In the oriented poset Q sits at the bottom in descending a_order.
        let bottom_up: Vec<usize> = outcome.removed.iter().rev().map(|&x| to_orig(x)).collect();
        let (side, lift) = if dual {
            (Side::Top, bottom_up.into_iter().rev().collect())
        } else {
            (Side::Bottom, bottom_up)
        };
        steps.push(PeelStep {
            removed: outcome.removed.iter().map(|&x| to_orig(x)).collect(),
            q: cfg.q,
            color: outcome.color,
            matrix_rows: outcome.matrix_rows,
            extensions: extensions.len(),
            cleanup: outcome.cleanup,
        });
        levels.push(Level { side, lift, extensions });

        let (rest, kept) = current.remove(&outcome.removed);
        to_original = kept.iter().map(|&x| to_original[x]).collect();
        current = rest;
    }

    let base = exact_dimension(current.poset(), cfg.budget)?;
    let mut family: Vec<Vec<usize>> = base
        .realizer
        .extensions
        .iter()
        .map(|l| l.order().iter().map(|&x| to_original[x]).collect())
        .collect();
    for level in levels.into_iter().rev() {
        for ext in family.iter_mut() {
            match level.side {
                Side::Bottom => {
                    let mut lifted = level.lift.clone();
                    lifted.append(ext);
                    *ext = lifted;
                }
                Side::Top => ext.extend_from_slice(&level.lift),
            }
        }
        family.extend(level.extensions);
    }

    let realizer = Realizer {
        extensions: family.into_iter().map(LinearExtension::new).collect(),
    };
    let check = is_realizer(bp.poset(), &realizer.extensions)?;
    if let Some(c) = check.unreversed.first() {
        return Err(Error::VerificationFailed {
            a: c.x,
            b: c.y,
            m1: 0,
            m2: 0,
        });
    }
    let paid: usize = steps.iter().map(|s| s.extensions).sum();
    Ok(PeelCertificate {
        steps,
        base_size: current.poset().len(),
        base_dimension: base.dimension,
        total_size: base.dimension + paid,
        realizer,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralBound {
    /// Size of the peeled realizer of the split; an upper bound on `dim(P)`.
    pub bound: usize,
    pub certificate: PeelCertificate,
    /// Verified realizer of `P` itself.
    pub realizer: Realizer,
    /// Extensions appended after projection to cover leftover pairs.
    pub projection_cleanup: usize,
}

/// Reads a split extension back onto `P`: repeatedly emit the available
/// element whose `x''` copy sits lowest in `split_ext`.
pub fn project_split_extension(poset: &Poset, split_ext: &LinearExtension) -> LinearExtension {
    let n = poset.len();
    let pos = split_ext.positions();
    let key = |x: usize| Reverse((pos[n + x], x));
    let mut indeg: Vec<usize> = (0..n).map(|x| poset.below(x).count_ones(..)).collect();
    let mut heap: BinaryHeap<_> = (0..n).filter(|&x| indeg[x] == 0).map(key).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse((_, x))) = heap.pop() {
        order.push(x);
        for y in poset.above(x).ones() {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(key(y));
            }
        }
    }
    LinearExtension::new(order)
}

/// Dimension upper bound for an `S_k`-free poset through its Kimble split.
///
/// The split is bipartite and `S_k`-free with dimension at least `dim(P)`, so
/// the size of its peeled realizer bounds `dim(P)`. A realizer of `P` is read
/// off the split's extensions (duplicates dropped) and completed greedily.
pub fn general_upper_bound(poset: &Poset, cfg: &PeelConfig) -> Result<GeneralBound> {
    if let Some(embedding) = poset.find_standard_example(cfg.k) {
        return Err(Error::ContainsSk { embedding });
    }
    let n = poset.len();
    let split = BipartitePoset::new(poset.kimble_split(), (0..n).collect(), (n..2 * n).collect())?;
    let certificate = peel_realizer(&split, cfg)?;

    let mut seen = HashSet::new();
    let mut extensions: Vec<LinearExtension> = certificate
        .realizer
        .extensions
        .iter()
        .map(|l| project_split_extension(poset, l))
        .filter(|l| seen.insert(l.clone()))
        .collect();
    let leftover = is_realizer(poset, &extensions)?.unreversed;
    let cleanup = greedy_reversing_extensions(poset, &leftover)?;
    let projection_cleanup = cleanup.len();
    extensions.extend(cleanup);
    debug_assert!(critical_pairs(poset).is_empty() || !extensions.is_empty());

    Ok(GeneralBound {
        bound: certificate.total_size,
        certificate,
        realizer: Realizer { extensions },
        projection_cleanup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::exact_dimension;
    use crate::generate::{random_bipartite, random_skfree_bipartite};

    fn cfg(q: usize, threshold: usize) -> PeelConfig {
        PeelConfig {
            k: 3,
            q,
            base_threshold: threshold,
            seed: 17,
            budget: Some(2_000_000),
        }
    }

    #[test]
    fn step_limits() {
        assert_eq!(step_limit(3, 2), 49);
        assert_eq!(step_limit(3, 3), 79);
    }

    #[test]
    fn step_on_complete_bipartite() {
        let bp = random_bipartite(6, 4, 1.0, 0).unwrap();
        for q in 2..=6 {
            let step = peel_step(&bp, 3, q, 1).unwrap();
            assert_eq!(step.color, 1);
            assert_eq!(step.removed, (0..q).collect::<Vec<_>>());
            assert!(step.extensions.len() <= step_limit(3, q));
        }
        assert!(matches!(peel_step(&bp, 3, 7, 1), Err(Error::NoMonochromaticSet { q: 7 })));
    }

    #[test]
    fn step_count_for_pairs() {
        let bp = random_skfree_bipartite(8, 8, 0.4, 3, 2, 1000).unwrap();
        let step = peel_step(&bp, 3, 2, 0).unwrap();
        assert_eq!(step.matrix_rows, 17);
        assert_eq!(step.extensions.len(), 34 + 1 + step.cleanup);
        assert!(step.extensions.len() <= 49);
    }

    #[test]
    fn minimal_extension_shape() {
        let p = Poset::from_relations(5, [(0, 3), (1, 3)]).unwrap();
        let bp = BipartitePoset::new(p, vec![0, 1, 2], vec![3, 4]).unwrap();
        let l = minimal_set_extension(&bp);
        assert_eq!(l.order(), &[2, 1, 0, 4, 3]);
        l.check_against(bp.poset(), 0).unwrap();
    }

    #[test]
    fn threshold_short_circuits_to_exact() {
        let bp = Poset::standard_example(2).unwrap().bipartition().unwrap();
        let cert = peel_realizer(&bp, &cfg(2, 4)).unwrap();
        assert!(cert.steps.is_empty());
        assert_eq!(cert.base_dimension, 2);
        assert_eq!(cert.total_size, 2);
        assert!(cert.sizes_consistent());
    }

    #[test]
    fn complete_bipartite_ten_by_ten() {
        let bp = random_bipartite(10, 10, 1.0, 0).unwrap();
        let cert = peel_realizer(&bp, &cfg(2, 4)).unwrap();
        assert!(!cert.steps.is_empty());
        assert!(cert.steps.iter().all(|s| s.removed.len() == 2));
        assert!(is_realizer(bp.poset(), &cert.realizer.extensions).unwrap().valid);
        assert!(cert.sizes_consistent());
        assert!(cert.total_size <= cert.guaranteed_bound(3, 2));
    }

    #[test]
    fn peels_both_sides() {
        // |B| > |A| forces dual steps.
        let bp = random_skfree_bipartite(5, 14, 0.3, 3, 3, 2000).unwrap();
        let cert = peel_realizer(&bp, &cfg(2, 6)).unwrap();
        assert!(cert.steps.iter().any(|s| s.removed.iter().all(|&x| x >= 5)));
        assert!(is_realizer(bp.poset(), &cert.realizer.extensions).unwrap().valid);
        assert!(cert.sizes_consistent());
    }

    #[test]
    fn rejects_posets_with_sk() {
        let bp = Poset::standard_example(3).unwrap().bipartition().unwrap();
        assert!(matches!(peel_realizer(&bp, &cfg(2, 2)), Err(Error::ContainsSk { .. })));
        assert!(matches!(
            peel_realizer(&bp, &PeelConfig { base_threshold: 1, ..cfg(2, 2) }),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn general_bound_examples() {
        let chain = Poset::chain(4);
        let g = general_upper_bound(&chain, &cfg(2, 8)).unwrap();
        assert!(g.bound >= 1);
        assert_eq!(g.realizer.extensions, vec![LinearExtension::new(vec![0, 1, 2, 3])]);

        let anti = Poset::antichain(4);
        let g = general_upper_bound(&anti, &cfg(2, 4)).unwrap();
        assert!(is_realizer(&anti, &g.realizer.extensions).unwrap().valid);
        assert!(g.bound >= exact_dimension(&anti, None).unwrap().dimension);

        let s3 = Poset::standard_example(3).unwrap();
        assert!(matches!(general_upper_bound(&s3, &cfg(2, 4)), Err(Error::ContainsSk { .. })));
    }

    #[test]
    fn certificate_json_fields() {
        let bp = random_bipartite(6, 6, 1.0, 0).unwrap();
        let cert = peel_realizer(&bp, &cfg(2, 8)).unwrap();
        let v = serde_json::to_value(&cert).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["base_dimension", "base_size", "realizer", "steps", "total_size"]);
        let step = &v["steps"][0];
        for key in ["removed", "q", "color", "matrix_rows", "extensions", "cleanup"] {
            assert!(step.get(key).is_some(), "missing {key}");
        }
        let back: PeelCertificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, cert);
    }
}
