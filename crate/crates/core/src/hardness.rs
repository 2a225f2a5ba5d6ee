//! Connected dominating sets and the reduction behind the best-response
//! hardness result.
//!
//! A set `S` is `m`-connected `k`-dominating when every vertex outside `S`
//! has at least `k` neighbours in `S` and the subgraph induced by `S` has
//! vertex connectivity at least `m`. Adding a universal vertex to `G` turns a
//! minimum dominating set `D` into a minimum 1-connected 2-dominating set
//! `D + u`, and a fresh agent's best response inside the right price window
//! buys exactly such a set.

use serde::Serialize;

use crate::cost::GameConfig;
use crate::error::{Error, Result};
use crate::graph::{Edge, OwnedMultiGraph, MAX_NODES};
use crate::moves::{best_response_exact, in_open_window, purchase_window, WindowReading};
use crate::rational::{frac, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::TooManyNodes { n, max: MAX_NODES });
        }
        let mut adj = vec![0u64; n];
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        Ok(SimpleGraph { n, adj })
    }

    /// Support graph of an owned multigraph; owners and multiplicities dropped.
    pub fn from_multigraph(g: &OwnedMultiGraph) -> Self {
        let pairs: Vec<(usize, usize)> = g.edges().iter().map(Edge::pair).collect();
        SimpleGraph::new(g.n(), &pairs).expect("valid graph")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n).flat_map(|u| (u + 1..self.n).filter(move |&v| self.has_edge(u, v)).map(move |v| (u, v))).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn cycle(n: usize) -> Self {
        SimpleGraph::new(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>()).expect("cycle")
    }

    pub fn path(n: usize) -> Self {
        SimpleGraph::new(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>()).expect("path")
    }

    pub fn complete(n: usize) -> Self {
        SimpleGraph::new(n, &crate::graph::pair_list(n)).expect("complete")
    }

    pub fn star(leaves: usize) -> Self {
        SimpleGraph::new(leaves + 1, &(1..=leaves).map(|l| (0, l)).collect::<Vec<_>>()).expect("star")
    }

    /// Outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i -- i+5`.
    pub fn petersen() -> Self {
        let mut e: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
        e.extend((0..5).map(|i| (5 + i, 5 + (i + 2) % 5)));
        e.extend((0..5).map(|i| (i, i + 5)));
        SimpleGraph::new(10, &e).expect("petersen")
    }

    /// Subgraph induced by `nodes`, relabelled in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut e = Vec::new();
        for (i, &a) in nodes.iter().enumerate() {
            for (j, &b) in nodes.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    e.push((i, j));
                }
            }
        }
        SimpleGraph::new(nodes.len(), &e).expect("induced")
    }

    fn connected_within(&self, mask: u64) -> bool {
        if mask == 0 {
            return false;
        }
        let start = mask & mask.wrapping_neg();
        let mut seen = start;
        let mut frontier = start;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[x];
            }
            next &= mask & !seen;
            seen |= next;
            frontier = next;
        }
        seen == mask
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.connected_within(full_mask(self.n))
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn set_mask(g: &SimpleGraph, s: &[usize]) -> Result<u64> {
    s.iter().try_fold(
        0u64,
        |acc, &x| {
            if x >= g.n {
                Err(Error::NodeOutOfRange { node: x, n: g.n })
            } else {
                Ok(acc | 1 << x)
            }
        },
    )
}

fn valid_mask(g: &SimpleGraph, mask: u64, m: usize, k: usize) -> bool {
    let outside = full_mask(g.n) & !mask;
    let mut o = outside;
    while o != 0 {
        let x = o.trailing_zeros() as usize;
        o &= o - 1;
        if ((g.adj[x] & mask).count_ones() as usize) < k {
            return false;
        }
    }
    match m {
        1 => g.connected_within(mask),
        _ => {
            if mask.count_ones() < 3 || !g.connected_within(mask) {
                return false;
            }
            let mut rest = mask;
            while rest != 0 {
                let x = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if !g.connected_within(mask & !(1 << x)) {
                    return false;
                }
            }
            true
        }
    }
}

fn check_params(m: usize, k: usize) -> Result<()> {
    if !(1..=2).contains(&m) {
        return Err(Error::UnsupportedConnectivity(m));
    }
    if k == 0 {
        return Err(Error::InvalidMove("k must be at least 1".into()));
    }
    Ok(())
}

/// `m = 1`: induced subgraph connected and nonempty. `m = 2`: at least three
/// vertices and no cut vertex.
pub fn is_k_dominating_m_connected(g: &SimpleGraph, s: &[usize], m: usize, k: usize) -> Result<bool> {
    check_params(m, k)?;
    Ok(valid_mask(g, set_mask(g, s)?, m, k))
}

/// Visits subsets in order of size, lexicographically within a size, and
/// returns the first one accepted.
fn first_subset(g: &SimpleGraph, budget: u64, mut accept: impl FnMut(u64) -> bool) -> Result<Option<Vec<usize>>> {
    let n = g.n;
    let mut visited: u64 = 0;
    for size in 1..=n {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            visited += 1;
            if visited > budget {
                return Err(Error::BudgetExceeded { needed: 1u128 << n, budget });
            }
            let mask = idx.iter().fold(0u64, |acc, &i| acc | 1 << i);
            if accept(mask) {
                return Ok(Some(idx));
            }
            // next combination
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(None)
}

/// Lexicographically least minimum `m`-connected `k`-dominating set.
pub fn min_mk_cds_bruteforce(g: &SimpleGraph, m: usize, k: usize, budget: u64) -> Result<Vec<usize>> {
    check_params(m, k)?;
    first_subset(g, budget, |mask| valid_mask(g, mask, m, k))?.ok_or(Error::Infeasible)
}

/// Lexicographically least minimum dominating set.
pub fn min_dominating_set(g: &SimpleGraph, budget: u64) -> Result<Vec<usize>> {
    if g.n == 0 {
        return Ok(Vec::new());
    }
    let all = full_mask(g.n);
    let found = first_subset(g, budget, |mask| {
        let mut covered = mask;
        let mut s = mask;
        while s != 0 {
            let x = s.trailing_zeros() as usize;
            s &= s - 1;
            covered |= g.adj[x];
        }
        covered & all == all
    })?;
    found.ok_or(Error::Infeasible)
}

/// `G` plus a new vertex `n` adjacent to every original vertex.
pub fn reduction_add_universal(g: &SimpleGraph) -> Result<SimpleGraph> {
    let mut edges = g.edges();
    edges.extend((0..g.n).map(|v| (v, g.n)));
    SimpleGraph::new(g.n + 1, &edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionCheck {
    pub domination_number: usize,
    pub cds_size: usize,
    pub dominating_set: Vec<usize>,
    pub cds: Vec<usize>,
    /// `cds_size == domination_number + 1`.
    pub holds: bool,
}

pub fn verify_reduction_identity(g: &SimpleGraph, budget: u64) -> Result<ReductionCheck> {
    let dominating_set = min_dominating_set(g, budget)?;
    let cds = min_mk_cds_bruteforce(&reduction_add_universal(g)?, 1, 2, budget)?;
    Ok(ReductionCheck {
        domination_number: dominating_set.len(),
        cds_size: cds.len(),
        holds: cds.len() == dominating_set.len() + 1,
        dominating_set,
        cds,
    })
}

/// The game instance: `g`'s edges owned by their smaller endpoint plus a
/// fresh agent `g.n()` that owns nothing and that nobody links to.
pub fn correspondence_instance(g: &SimpleGraph) -> Result<OwnedMultiGraph> {
    let edges = g.edges().into_iter().map(|(u, v)| Edge::new(u, v, u)).collect();
    OwnedMultiGraph::new(g.n + 1, edges, 2)
}

/// Midpoint of the open price window under `reading`. Before the purchase the
/// window uses `|E(g)|`; after it, `|E(g)|` plus the minimum 1,2-CDS size.
pub fn correspondence_alpha(g: &SimpleGraph, reading: WindowReading, budget: u64) -> Result<Rational> {
    let edges = match reading {
        WindowReading::BeforePurchase => g.edge_count(),
        WindowReading::AfterPurchase => g.edge_count() + min_mk_cds_bruteforce(g, 1, 2, budget)?.len(),
    };
    let (lo, hi) = purchase_window(edges).ok_or(Error::WindowEmpty(edges))?;
    Ok((lo + hi) * frac(1, 2))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondenceReport {
    pub alpha: Rational,
    pub best_response: Vec<usize>,
    pub min12cds: Vec<usize>,
    /// Best response buys single edges only.
    pub single_edges: bool,
    /// Targets of the best response form a 1-connected 2-dominating set of `g`.
    pub best_response_is_cds: bool,
    /// The two sets have equal size.
    pub sizes_match: bool,
    pub in_window_before_purchase: bool,
    pub in_window_after_purchase: bool,
}

impl CorrespondenceReport {
    pub fn passes(&self) -> bool {
        self.single_edges && self.best_response_is_cds && self.sizes_match
    }

    pub fn readings(&self) -> Vec<WindowReading> {
        let mut r = Vec::new();
        if self.in_window_before_purchase {
            r.push(WindowReading::BeforePurchase);
        }
        if self.in_window_after_purchase {
            r.push(WindowReading::AfterPurchase);
        }
        r
    }
}

/// Computes the fresh agent's exhaustive best response at `alpha` and checks
/// it buys exactly a minimum 1-connected 2-dominating set of `g`.
pub fn best_response_cds_correspondence(
    g: &SimpleGraph,
    alpha: &Rational,
    budget: u64,
) -> Result<CorrespondenceReport> {
    let instance = correspondence_instance(g)?;
    let agent = g.n;
    let cfg = GameConfig::adv(*alpha).with_budget(budget);
    let br = best_response_exact(&instance, &cfg, agent)?;
    let min12cds = min_mk_cds_bruteforce(g, 1, 2, budget)?;

    let mut distinct = br.strategy.clone();
    distinct.dedup();
    let single_edges = distinct.len() == br.strategy.len();
    let best_response_is_cds = !distinct.is_empty() && is_k_dominating_m_connected(g, &distinct, 1, 2)?;
    let m_before = g.edge_count();
    let m_after = m_before + min12cds.len();
    let inside = |m| purchase_window(m).is_some_and(|w| in_open_window(alpha, &w));
    Ok(CorrespondenceReport {
        alpha: *alpha,
        sizes_match: distinct.len() == min12cds.len(),
        best_response: br.strategy,
        min12cds,
        single_edges,
        best_response_is_cds,
        in_window_before_purchase: inside(m_before),
        in_window_after_purchase: inside(m_after),
    })
}
