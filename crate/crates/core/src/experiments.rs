//! Seeded scans of known inequalities and the growth study.
//!
//! Instance `i` of a run seeded with `s` draws everything (sizes, edge
//! probabilities, the poset itself) from `derive_seed(s, i)`, so any single
//! instance can be regenerated without replaying the others. Work fans out
//! over rayon; results are collected in index order.

use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::dimension::{exact_dimension, is_realizer};
use crate::error::{Error, Result};
use crate::format::write_poset;
use crate::generate::{derive_seed, random_poset, random_skfree_bipartite, random_skfree_poset, rng_from_seed};
use crate::poset::Poset;
use crate::skfree::coloring::{find_monochromatic, ub_coloring};
use crate::skfree::construct::{build_reversing_extensions, rows_for};
use crate::skfree::matrix::{event_e_holds, event_probability_bound, BinaryMatrix};
use crate::skfree::peel::{general_upper_bound, peel_realizer, step_limit, PeelConfig};

/// Failed check on one scan instance; `poset` is the instance in POSET v1
/// text so it can be replayed with the CLI.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub index: usize,
    pub message: String,
    pub poset: String,
}

impl Violation {
    fn new(index: usize, poset: &Poset, message: impl Into<String>) -> Self {
        Violation {
            index,
            message: message.into(),
            poset: write_poset(poset),
        }
    }
}

const SKFREE_TRIES: usize = 10_000;
const SCAN_BUDGET: u64 = 50_000_000;

/// Fraction of fair-coin `r x q` matrices with event E for `t`, alongside the
/// union bound. Trial `i` samples from `derive_seed(seed, i)`.
pub fn run_prob_lemma_trials(t: usize, q: usize, r: usize, trials: usize, seed: u64) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::Argument("trials must be at least 1".into()));
    }
    if t == 0 || t > q || r == 0 {
        return Err(Error::Argument(format!(
            "need 1 <= t <= q and r >= 1, got t = {t}, q = {q}, r = {r}"
        )));
    }
    let hits = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let m = BinaryMatrix::random(r, q, &mut rng)?;
            event_e_holds(&m, t)
        })
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&hit| hit)
        .count();
    Ok((hits as f64 / trials as f64, event_probability_bound(t, q, r)))
}

fn scan<F>(count: usize, seed: u64, check: F) -> Vec<Violation>
where
    F: Fn(usize, u64) -> Option<Violation> + Sync,
{
    (0..count)
        .into_par_iter()
        .filter_map(|i| check(i, derive_seed(seed, i as u64)))
        .collect()
}

fn exact(p: &Poset) -> Result<usize> {
    Ok(exact_dimension(p, Some(SCAN_BUDGET))?.dimension)
}

/// `dim(P) <= ⌊n/2⌋` for random posets with `4 <= n <= 8`.
pub fn run_hiraguchi_scan(count: usize, seed: u64) -> Vec<Violation> {
    scan(count, seed, |i, s| {
        let mut rng = rng_from_seed(s);
        let n = rng.gen_range(4..=8);
        let p = random_poset(n, rng.gen_range(0.05..0.95), rng.gen()).ok()?;
        match exact(&p) {
            Ok(d) if d <= n / 2 => None,
            Ok(d) => Some(Violation::new(i, &p, format!("dimension {d} exceeds {}", n / 2))),
            Err(e) => Some(Violation::new(i, &p, e.to_string())),
        }
    })
}

/// `dim(P) <= dim(split(P)) <= dim(P) + 1` for random posets with `n <= 7`.
pub fn run_split_sandwich_scan(count: usize, seed: u64) -> Vec<Violation> {
    scan(count, seed, |i, s| {
        let mut rng = rng_from_seed(s);
        let n = rng.gen_range(1..=7);
        let p = random_poset(n, rng.gen_range(0.05..0.95), rng.gen()).ok()?;
        match exact(&p).and_then(|d| Ok((d, exact(&p.kimble_split())?))) {
            Ok((d, ds)) if d <= ds && ds <= d + 1 => None,
            Ok((d, ds)) => Some(Violation::new(i, &p, format!("dim {d}, split dim {ds}"))),
            Err(e) => Some(Violation::new(i, &p, e.to_string())),
        }
    })
}

/// `dim(P) = dim(P^d)` for random posets with `n <= 8`.
pub fn run_dual_scan(count: usize, seed: u64) -> Vec<Violation> {
    scan(count, seed, |i, s| {
        let mut rng = rng_from_seed(s);
        let n = rng.gen_range(1..=8);
        let p = random_poset(n, rng.gen_range(0.05..0.95), rng.gen()).ok()?;
        match exact(&p).and_then(|d| Ok((d, exact(&p.dual())?))) {
            Ok((d, dd)) if d == dd => None,
            Ok((d, dd)) => Some(Violation::new(i, &p, format!("dim {d}, dual dim {dd}"))),
            Err(e) => Some(Violation::new(i, &p, e.to_string())),
        }
    })
}

/// The split of a random `S_k`-free poset (`n <= 10`) is again `S_k`-free.
pub fn run_split_freeness_scan(count: usize, k: usize, seed: u64) -> Vec<Violation> {
    scan(count, seed, |i, s| {
        let mut rng = rng_from_seed(s);
        let n = rng.gen_range(2..=10);
        let p = match random_skfree_poset(n, rng.gen_range(0.05..0.6), k, rng.gen(), SKFREE_TRIES) {
            Ok(p) => p,
            Err(e) => return Some(Violation::new(i, &Poset::antichain(0), e.to_string())),
        };
        let embedding = p.kimble_split().find_standard_example(k)?;
        Some(Violation::new(i, &p, format!("split contains S_{k} at {embedding:?}")))
    })
}

/// Reversing families for monochromatic `Q` (`|Q| = 2 + i mod 2`) in random
/// `S_k`-free bipartite posets with both parts of size at most 12: every
/// incomparable `(a ∈ Q, b ∈ B)` is reversed and the family has exactly
/// `2⌈k 2^k ln q⌉` members. Instances without a monochromatic set of the
/// requested size are redrawn from the next stream.
pub fn run_reversing_scan(count: usize, k: usize, seed: u64) -> Vec<Violation> {
    scan(count, seed, |i, s| {
        let q = 2 + i % 2;
        for attempt in 0u64.. {
            let mut rng = rng_from_seed(derive_seed(s, attempt));
            let (na, nb) = (rng.gen_range(q.max(k)..=12), rng.gen_range(2..=12));
            let bp = match random_skfree_bipartite(na, nb, rng.gen_range(0.1..0.6), k, rng.gen(), SKFREE_TRIES) {
                Ok(bp) => bp,
                Err(_) => continue,
            };
            let coloring = match ub_coloring(&bp, k) {
                Ok(c) => c,
                Err(e) => return Some(Violation::new(i, bp.poset(), e.to_string())),
            };
            let Some((set, color)) = find_monochromatic(&coloring, q) else {
                continue;
            };
            return match build_reversing_extensions(&bp, &set, color, k, rng.gen()) {
                Ok(fam) if fam.extensions.len() == 2 * rows_for(k, q) => None,
                Ok(fam) => Some(Violation::new(
                    i,
                    bp.poset(),
                    format!("{} extensions for q = {q}", fam.extensions.len()),
                )),
                Err(e) => Some(Violation::new(i, bp.poset(), e.to_string())),
            };
        }
        unreachable!()
    })
}

/// Peeling on random `S_k`-free bipartite posets with up to `max_n` elements:
/// the realizer verifies and `total_size <= base + steps ⌊3k2^k ln q⌋`.
pub fn run_peel_scan(count: usize, k: usize, max_n: usize, seed: u64) -> Vec<Violation> {
    scan(count, seed, |i, s| {
        let mut rng = rng_from_seed(s);
        let half = (max_n / 2).max(2);
        let (na, nb) = (rng.gen_range(2..=half), rng.gen_range(2..=half));
        // Denser draws at this size almost always contain S_3.
        let edge_prob = rng.gen_range(0.02..0.2f64).min(1.2 / na.max(nb) as f64);
        let q = rng.gen_range(2..=3);
        let bp = match random_skfree_bipartite(na, nb, edge_prob, k, rng.gen(), SKFREE_TRIES) {
            Ok(bp) => bp,
            Err(e) => return Some(Violation::new(i, &Poset::antichain(0), e.to_string())),
        };
        let cfg = PeelConfig {
            k,
            q,
            base_threshold: 10,
            seed: rng.gen(),
            budget: Some(SCAN_BUDGET),
        };
        let cert = match peel_realizer(&bp, &cfg) {
            Ok(c) => c,
            Err(e) => return Some(Violation::new(i, bp.poset(), e.to_string())),
        };
        let valid = is_realizer(bp.poset(), &cert.realizer.extensions).is_ok_and(|c| c.valid);
        let limit = cert.base_dimension + cert.steps.len() * step_limit(k, q);
        if !valid {
            Some(Violation::new(i, bp.poset(), "peeled realizer does not verify"))
        } else if cert.total_size > limit || !cert.sizes_consistent() {
            Some(Violation::new(
                i,
                bp.poset(),
                format!("total size {} exceeds {limit}", cert.total_size),
            ))
        } else {
            None
        }
    })
}

/// General pipeline on random `S_k`-free posets with `n <= 7`:
/// `dim(P) <= bound` and the projected realizer verifies.
pub fn run_pipeline_scan(count: usize, k: usize, seed: u64) -> Vec<Violation> {
    scan(count, seed, |i, s| {
        let mut rng = rng_from_seed(s);
        let n = rng.gen_range(1..=7);
        let p = match random_skfree_poset(n, rng.gen_range(0.05..0.6), k, rng.gen(), SKFREE_TRIES) {
            Ok(p) => p,
            Err(e) => return Some(Violation::new(i, &Poset::antichain(0), e.to_string())),
        };
        let cfg = PeelConfig {
            k,
            q: 2,
            base_threshold: 6,
            seed: rng.gen(),
            budget: Some(SCAN_BUDGET),
        };
        let result = exact(&p).and_then(|d| Ok((d, general_upper_bound(&p, &cfg)?)));
        match result {
            Ok((d, g)) => {
                let valid = is_realizer(&p, &g.realizer.extensions).is_ok_and(|c| c.valid);
                if !valid {
                    Some(Violation::new(i, &p, "projected realizer does not verify"))
                } else if d > g.bound {
                    Some(Violation::new(i, &p, format!("dimension {d} exceeds bound {}", g.bound)))
                } else {
                    None
                }
            }
            Err(e) => Some(Violation::new(i, &p, e.to_string())),
        }
    })
}

/// `%g`-style rendering with 6 significant digits.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent");
        return format!("{}e{e}", trim_zeros(mantissa));
    }
    trim_zeros(&format!("{x:.*}", (5 - exp).max(0) as usize)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig6<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(format_sig6(*x).parse().unwrap_or(*x))
}

fn sig6_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => sig6(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthRecord {
    pub n: usize,
    /// Samples that generated and peeled successfully.
    pub samples: usize,
    #[serde(serialize_with = "sig6")]
    pub mean_bound: f64,
    pub max_bound: usize,
    /// Only for `n <= 14`, and only when every exact run finished in budget.
    #[serde(serialize_with = "sig6_opt")]
    pub mean_exact: Option<f64>,
    #[serde(serialize_with = "sig6")]
    pub bound_over_n: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleFailure {
    pub n: usize,
    pub sample: usize,
    pub error: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub records: Vec<GrowthRecord>,
    pub failures: Vec<SampleFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthConfig {
    pub k: usize,
    pub sizes: Vec<usize>,
    pub samples: usize,
    pub q: usize,
    pub edge_prob: f64,
    pub seed: u64,
    pub base_threshold: usize,
    pub max_tries: usize,
    pub budget: Option<u64>,
}

impl GrowthConfig {
    pub fn new(k: usize, sizes: Vec<usize>, samples: usize, q: usize, edge_prob: f64, seed: u64) -> Self {
        GrowthConfig {
            k,
            sizes,
            samples,
            q,
            edge_prob,
            seed,
            base_threshold: (2 * q).max(10),
            max_tries: SKFREE_TRIES,
            budget: Some(5_000_000),
        }
    }
}

/// Largest ground size that also gets an exact dimension.
pub const GROWTH_EXACT_MAX: usize = 14;

struct SampleOutcome {
    bound: usize,
    exact: Option<usize>,
}

fn growth_sample(cfg: &GrowthConfig, n: usize, seed: u64) -> Result<SampleOutcome> {
    let bp = random_skfree_bipartite(n / 2, n - n / 2, cfg.edge_prob, cfg.k, derive_seed(seed, 0), cfg.max_tries)?;
    let peel = PeelConfig {
        k: cfg.k,
        q: cfg.q,
        base_threshold: cfg.base_threshold,
        seed: derive_seed(seed, 1),
        budget: cfg.budget,
    };
    let cert = peel_realizer(&bp, &peel)?;
    let exact = if n <= GROWTH_EXACT_MAX {
        match exact_dimension(bp.poset(), cfg.budget) {
            Ok(r) => Some(r.dimension),
            Err(Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(SampleOutcome {
        bound: cert.total_size,
        exact,
    })
}

/// Peels `samples` random `S_k`-free bipartite posets (parts `⌊n/2⌋` and
/// `⌈n/2⌉`) per size. Sample `j` of size index `i` uses
/// `derive_seed(seed, i << 32 | j)`. Failed samples are reported, not fatal;
/// sizes without a single success produce no record.
pub fn run_growth_experiment(cfg: &GrowthConfig) -> Result<GrowthReport> {
    if cfg.samples == 0 {
        return Err(Error::Argument("samples must be at least 1".into()));
    }
    if cfg.sizes.windows(2).any(|w| w[0] >= w[1]) || cfg.sizes.first() == Some(&0) {
        return Err(Error::Argument("sizes must be positive and strictly ascending".into()));
    }
    let jobs: Vec<(usize, usize, usize)> = cfg
        .sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| (0..cfg.samples).map(move |j| (i, n, j)))
        .collect();
    let outcomes: Vec<(usize, usize, Result<SampleOutcome>)> = jobs
        .into_par_iter()
        .map(|(i, n, j)| (n, j, growth_sample(cfg, n, derive_seed(cfg.seed, (i as u64) << 32 | j as u64))))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &n in &cfg.sizes {
        let mut bounds = Vec::new();
        let mut exacts = Vec::new();
        let mut exact_complete = n <= GROWTH_EXACT_MAX;
        for (_, j, outcome) in outcomes.iter().filter(|(m, _, _)| *m == n) {
            match outcome {
                Ok(o) => {
                    bounds.push(o.bound);
                    match o.exact {
                        Some(d) => exacts.push(d),
                        None => exact_complete = false,
                    }
                }
                Err(e) => failures.push(SampleFailure {
                    n,
                    sample: *j,
                    error: e.name().to_string(),
                    message: e.to_string(),
                }),
            }
        }
        if bounds.is_empty() {
            continue;
        }
        let mean = |v: &[usize]| v.iter().sum::<usize>() as f64 / v.len() as f64;
        let mean_bound = mean(&bounds);
        records.push(GrowthRecord {
            n,
            samples: bounds.len(),
            mean_bound,
            max_bound: *bounds.iter().max().expect("non-empty"),
            mean_exact: (exact_complete && !exacts.is_empty()).then(|| mean(&exacts)),
            bound_over_n: mean_bound / n as f64,
        });
    }
    Ok(GrowthReport { records, failures })
}

pub const GROWTH_CSV_HEADER: &str = "n,samples,mean_bound,max_bound,mean_exact,bound_over_n";

pub fn growth_csv(records: &[GrowthRecord]) -> String {
    let mut out = format!("{GROWTH_CSV_HEADER}\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.samples,
            format_sig6(r.mean_bound),
            r.max_bound,
            r.mean_exact.map(format_sig6).unwrap_or_default(),
            format_sig6(r.bound_over_n),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(2.5), "2.5");
        assert_eq!(format_sig6(1.0 / 3.0), "0.333333");
        assert_eq!(format_sig6(123456.7), "123457");
        assert_eq!(format_sig6(1234567.0), "1.23457e6");
        assert_eq!(format_sig6(9.9999996), "10");
        assert_eq!(format_sig6(0.000012345678), "1.23457e-5");
        assert_eq!(format_sig6(-0.5), "-0.5");
    }

    #[test]
    fn prob_lemma_examples() {
        let (freq, bound) = run_prob_lemma_trials(2, 4, 12, 2000, 1).unwrap();
        assert!(freq >= 0.59, "{freq}");
        assert!((bound - 0.619884).abs() < 1e-5);
        let (freq, _) = run_prob_lemma_trials(1, 1, 1, 4000, 2).unwrap();
        assert!((freq - 0.5).abs() < 0.05, "{freq}");
        let (freq, _) = run_prob_lemma_trials(2, 4, 200, 1000, 3).unwrap();
        assert_eq!(freq, 1.0);
        assert!(matches!(run_prob_lemma_trials(2, 4, 12, 0, 1), Err(Error::Argument(_))));
        assert_eq!(
            run_prob_lemma_trials(2, 4, 12, 500, 9).unwrap(),
            run_prob_lemma_trials(2, 4, 12, 500, 9).unwrap()
        );
    }

    #[test]
    fn scans_are_clean_and_reproducible() {
        assert!(run_hiraguchi_scan(0, 1).is_empty());
        assert!(run_hiraguchi_scan(60, 1).is_empty());
        assert!(run_split_sandwich_scan(30, 2).is_empty());
        assert!(run_dual_scan(30, 3).is_empty());
        assert!(run_split_freeness_scan(30, 3, 4).is_empty());
        assert!(run_reversing_scan(10, 3, 5).is_empty());
        assert!(run_pipeline_scan(10, 3, 6).is_empty());
        assert!(run_peel_scan(4, 3, 30, 7).is_empty());
    }

    #[test]
    fn violations_carry_poset_text() {
        let v = Violation::new(3, &Poset::chain(2), "x");
        assert_eq!(v.poset, "poset 2\nrel 0 1\n");
    }

    #[test]
    fn growth_is_deterministic() {
        let cfg = GrowthConfig::new(3, vec![12], 1, 2, 0.2, 42);
        let a = run_growth_experiment(&cfg).unwrap();
        assert_eq!(a, run_growth_experiment(&cfg).unwrap());
        assert_eq!(a.records.len(), 1);
        let r = &a.records[0];
        assert!(r.mean_bound <= r.max_bound as f64 && r.bound_over_n > 0.0);
        assert!(r.mean_exact.is_some());
        let csv = growth_csv(&a.records);
        assert!(csv.starts_with("n,samples,mean_bound,max_bound,mean_exact,bound_over_n\n12,1,"));
    }

    #[test]
    fn growth_rejects_bad_sizes() {
        let cfg = GrowthConfig::new(3, vec![20, 10], 1, 2, 0.2, 42);
        assert!(run_growth_experiment(&cfg).is_err());
        let cfg = GrowthConfig::new(3, vec![10], 0, 2, 0.2, 42);
        assert!(run_growth_experiment(&cfg).is_err());
    }
}
