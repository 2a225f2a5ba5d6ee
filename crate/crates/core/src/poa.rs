//! Equilibrium censuses over ownership-resolved states and the resulting
//! anarchy and stability ratios.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::{social_cost, GameConfig};
use crate::error::{Error, Result};
use crate::families::{build_family, optimum_bruteforce, FamilyKind, FamilySpec};
use crate::graph::{pair_list, Edge, OwnedMultiGraph, MAX_NODES};
use crate::moves::is_nash;
use crate::rational::{ExtCost, Rational};

/// Ownership splits `(a, b)` of one pair, `a + b <= cap`.
fn splits(cap: usize) -> Vec<(usize, usize)> {
    (0..=cap).flat_map(|a| (0..=cap - a).map(move |b| (a, b))).collect()
}

fn profile_from(n: usize, pairs: &[(usize, usize)], opts: &[(usize, usize)], digits: &[usize]) -> OwnedMultiGraph {
    let mut edges = Vec::new();
    for (&(u, v), &d) in pairs.iter().zip(digits) {
        let (a, b) = opts[d];
        edges.extend(std::iter::repeat_n(Edge::new(u, v, u), a));
        edges.extend(std::iter::repeat_n(Edge::new(u, v, v), b));
    }
    OwnedMultiGraph::from_parts_unchecked(n, edges)
}

/// Number of ownership-resolved states with `n` agents under `cap`.
pub fn profile_count(n: usize, cap: usize) -> u128 {
    let per_pair = ((cap + 1) * (cap + 2) / 2) as u128;
    per_pair.checked_pow((n * n.saturating_sub(1) / 2) as u32).unwrap_or(u128::MAX)
}

/// Every state: each pair `u < v` carries `a` instances owned by `u` and `b`
/// owned by `v` with `a + b <= cap`. Errors when the count exceeds `budget`.
pub fn ownership_profiles(n: usize, cap: usize, budget: u64) -> Result<impl Iterator<Item = OwnedMultiGraph>> {
    if n > MAX_NODES {
        return Err(Error::TooManyNodes { n, max: MAX_NODES });
    }
    let needed = profile_count(n, cap);
    if needed > budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let pairs = pair_list(n);
    let opts = splits(cap);
    let mut digits = vec![0usize; pairs.len()];
    let mut finished = false;
    Ok(std::iter::from_fn(move || {
        if finished {
            return None;
        }
        let g = profile_from(n, &pairs, &opts, &digits);
        let mut i = 0;
        loop {
            if i == digits.len() {
                finished = true;
                break;
            }
            digits[i] += 1;
            if digits[i] < opts.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        Some(g)
    }))
}

/// One uniformly random ownership-resolved state.
pub fn random_profile(n: usize, cap: usize, rng: &mut impl Rng) -> OwnedMultiGraph {
    let pairs = pair_list(n);
    let opts = splits(cap);
    let digits: Vec<usize> = pairs.iter().map(|_| rng.gen_range(0..opts.len())).collect();
    profile_from(n, &pairs, &opts, &digits)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeCensus {
    pub n: usize,
    pub alpha: Rational,
    pub states: u64,
    pub opt_cost: ExtCost,
    pub worst: Option<ExtCost>,
    pub best: Option<ExtCost>,
    pub equilibria: Vec<OwnedMultiGraph>,
}

/// Checks every state for equilibrium; the optimum is the cheapest state.
pub fn ne_census(n: usize, cfg: &GameConfig) -> Result<NeCensus> {
    let mut opt = ExtCost::Infinite;
    let mut equilibria = Vec::new();
    let mut states = 0u64;
    for g in ownership_profiles(n, cfg.cap, cfg.budget)? {
        states += 1;
        let c = social_cost(&g, cfg);
        if c < opt {
            opt = c.clone();
        }
        if is_nash(&g, cfg)? {
            equilibria.push(g);
        }
    }
    let costs: Vec<ExtCost> = equilibria.iter().map(|g| social_cost(g, cfg)).collect();
    Ok(NeCensus {
        n,
        alpha: cfg.alpha,
        states,
        opt_cost: opt,
        worst: costs.iter().max().cloned(),
        best: costs.iter().min().cloned(),
        equilibria,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoAGridCell {
    pub n: usize,
    pub alpha: Rational,
    pub opt_cost: ExtCost,
    pub worst_ne_cost: Option<ExtCost>,
    pub best_ne_cost: Option<ExtCost>,
    /// Only when `search_complete`.
    pub poa: Option<Rational>,
    /// Only when `search_complete`.
    pub pos: Option<Rational>,
    pub ne_count: u64,
    pub search_complete: bool,
    /// Worst equilibrium found over the optimum; a lower bound on the true ratio.
    pub poa_lower_bound: Option<Rational>,
    /// Best equilibrium found over the optimum; an upper bound on the true ratio.
    pub pos_upper_bound: Option<Rational>,
    /// Equilibria found; the full list when the search is complete.
    #[serde(skip)]
    pub equilibria: Vec<OwnedMultiGraph>,
}

fn ratio(num: &Option<ExtCost>, den: &ExtCost) -> Option<Rational> {
    match (num.as_ref()?.finite(), den.finite()) {
        (Some(a), Some(b)) if *b > Rational::from_integer(0) => Some(a / b),
        _ => None,
    }
}

fn cell(
    n: usize,
    alpha: Rational,
    opt_cost: ExtCost,
    equilibria: Vec<OwnedMultiGraph>,
    cfg: &GameConfig,
    complete: bool,
) -> PoAGridCell {
    let costs: Vec<ExtCost> = equilibria.iter().map(|g| social_cost(g, cfg)).collect();
    let worst = costs.iter().max().cloned();
    let best = costs.iter().min().cloned();
    let lower = ratio(&worst, &opt_cost);
    let upper = ratio(&best, &opt_cost);
    PoAGridCell {
        n,
        alpha,
        poa: if complete { lower } else { None },
        pos: if complete { upper } else { None },
        poa_lower_bound: lower,
        pos_upper_bound: upper,
        opt_cost,
        worst_ne_cost: worst,
        best_ne_cost: best,
        ne_count: equilibria.len() as u64,
        search_complete: complete,
        equilibria,
    }
}

/// Exact ratios from a full census.
pub fn poa_cell_exhaustive(n: usize, cfg: &GameConfig) -> Result<PoAGridCell> {
    let c = ne_census(n, cfg)?;
    Ok(cell(n, cfg.alpha, c.opt_cost, c.equilibria, cfg, true))
}

/// Candidate states for the sampled mode: every family that fits `n`, with
/// its canonical ownership.
pub fn family_witnesses(n: usize, cap: usize) -> Vec<OwnedMultiGraph> {
    let kinds = [
        FamilyKind::DoubleClique,
        FamilyKind::Clique,
        FamilyKind::DoubleStar,
        FamilyKind::Fan,
        FamilyKind::Cycle,
        FamilyKind::Path,
        FamilyKind::DoublePath,
    ];
    kinds
        .into_iter()
        .filter_map(|kind| build_family(&FamilySpec::new(kind, n)).ok())
        .filter(|g| g.check_cap(cap).is_ok())
        .collect()
}

/// Bounds from the family witnesses plus `samples` random states; the
/// optimum still comes from a full multigraph search.
pub fn poa_cell_sampled(n: usize, cfg: &GameConfig, samples: u64, seed: u64) -> Result<PoAGridCell> {
    let opt = optimum_bruteforce(n, &cfg.alpha, cfg.cap, cfg.budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = family_witnesses(n, cfg.cap);
    candidates.extend((0..samples).map(|_| random_profile(n, cfg.cap, &mut rng)));
    let mut equilibria: Vec<OwnedMultiGraph> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for g in candidates {
        if seen.insert(g.canonical_key()) && is_nash(&g, cfg)? {
            equilibria.push(g);
        }
    }
    Ok(cell(n, cfg.alpha, opt.cost, equilibria, cfg, false))
}
