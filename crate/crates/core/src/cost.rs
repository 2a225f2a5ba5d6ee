//! Exact cost evaluation for the three supported models.
//!
//! * `AdvNcg`: `alpha * |S_u|` plus the expected distance sum after one edge
//!   instance is deleted uniformly at random.
//! * `Ncg`: `alpha * |S_u|` plus the plain distance sum.
//! * `Kliemann`: `alpha * |S_u|` plus the expected number of nodes `u` can no
//!   longer reach after the random deletion.
//!
//! Every parallel instance is its own deletion event with probability `1/|E|`.

use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{OwnedMultiGraph, Topology, UNREACHED};
use crate::rational::{frac, int, ExtCost, Rational};
use crate::DEFAULT_BUDGET;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CostModel {
    AdvNcg,
    Ncg,
    Kliemann,
}

impl FromStr for CostModel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "adv-ncg" | "advncg" | "adv" => Ok(CostModel::AdvNcg),
            "ncg" => Ok(CostModel::Ncg),
            "kliemann" => Ok(CostModel::Kliemann),
            other => Err(format!("unknown cost model {other:?} (adv-ncg, ncg, kliemann)")),
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostModel::AdvNcg => "adv-ncg",
            CostModel::Ncg => "ncg",
            CostModel::Kliemann => "kliemann",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameConfig {
    pub alpha: Rational,
    pub model: CostModel,
    /// Maximum number of parallel instances per node pair.
    pub cap: usize,
    /// Candidate limit for any single exhaustive search.
    pub budget: u64,
}

impl GameConfig {
    pub fn new(alpha: Rational, model: CostModel, cap: usize) -> Result<Self> {
        if alpha.is_negative() {
            return Err(Error::NegativeAlpha(alpha.to_string()));
        }
        if cap == 0 {
            return Err(Error::ZeroCap);
        }
        Ok(GameConfig { alpha, model, cap, budget: DEFAULT_BUDGET })
    }

    /// Adv-NCG with the default cap of 2.
    pub fn adv(alpha: Rational) -> Self {
        GameConfig::new(alpha, CostModel::AdvNcg, crate::graph::DEFAULT_CAP).expect("nonnegative alpha")
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        assert!(cap >= 1);
        self.cap = cap;
        self
    }

    pub fn with_model(mut self, model: CostModel) -> Self {
        self.model = model;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

fn check_node(g: &OwnedMultiGraph, u: usize) -> Result<()> {
    if u >= g.n() {
        return Err(Error::NodeOutOfRange { node: u, n: g.n() });
    }
    Ok(())
}

/// Plain distance sum from `u`; `None` when some node is unreachable.
pub(crate) fn delta_total(t: &Topology, u: usize) -> Option<u64> {
    let (sum, reached) = t.distance_sum(u, None);
    (reached == t.n).then_some(sum)
}

/// Visits every deletion event from `u`'s point of view. The callback gets the
/// number of instances that share the outcome and the deleted pair when the
/// deletion changes `u`'s distances (`None` means "same as the intact graph").
///
/// A single-instance pair can only change `u`'s distances if it is the sole
/// link from its deeper endpoint to the previous BFS layer.
fn for_each_deletion(t: &Topology, dist: &[u32], mut visit: impl FnMut(u64, Option<(usize, usize)>)) {
    let mut layer_mask = vec![0u64; t.n + 1];
    for (x, &d) in dist.iter().enumerate() {
        if d != UNREACHED {
            layer_mask[d as usize] |= 1 << x;
        }
    }
    for a in 0..t.n {
        let mut higher = t.adj[a] & (u64::MAX << a << 1);
        while higher != 0 {
            let b = higher.trailing_zeros() as usize;
            higher &= higher - 1;
            let k = t.mult(a, b) as u64;
            if k >= 2 || dist[a] == dist[b] || dist[a] == UNREACHED {
                visit(k, None);
                continue;
            }
            let far = if dist[a] > dist[b] { a } else { b };
            let parents = t.adj[far] & layer_mask[dist[far] as usize - 1];
            if parents.count_ones() >= 2 {
                visit(1, None);
            } else {
                visit(1, Some((a, b)));
            }
        }
    }
}

/// `sum_e delta_{G-e}(u)` over all edge instances; `None` if some deletion
/// disconnects `u` from a node.
pub(crate) fn expected_distance_total(t: &Topology, u: usize) -> Option<u64> {
    if t.n <= 1 {
        return Some(0);
    }
    if t.m == 0 {
        return None;
    }
    let dist = t.distances(u, None);
    if dist.contains(&UNREACHED) {
        return None;
    }
    let base: u64 = dist.iter().map(|&d| d as u64).sum();
    let mut total = 0u64;
    let mut finite = true;
    for_each_deletion(t, &dist, |k, cut| match cut {
        None => total += k * base,
        Some(cut) => {
            let (sum, reached) = t.distance_sum(u, Some(cut));
            if reached < t.n {
                finite = false;
            }
            total += sum;
        }
    });
    finite.then_some(total)
}

/// `sum_e (number of nodes unreachable from u in G-e)`.
pub(crate) fn unreachable_total(t: &Topology, u: usize) -> u64 {
    let dist = t.distances(u, None);
    let base = dist.iter().filter(|&&d| d == UNREACHED).count() as u64;
    let mut total = 0u64;
    for_each_deletion(t, &dist, |k, cut| match cut {
        None => total += k * base,
        Some(cut) => total += (t.n - t.distance_sum(u, Some(cut)).1) as u64,
    });
    total
}

/// Distance term of `u`'s cost under `model`.
pub(crate) fn distance_term(t: &Topology, model: CostModel, u: usize) -> ExtCost {
    if t.n <= 1 {
        return ExtCost::zero();
    }
    match model {
        CostModel::AdvNcg => match expected_distance_total(t, u) {
            Some(total) => ExtCost::Finite(frac(total as i128, t.m as i128)),
            None => ExtCost::Infinite,
        },
        CostModel::Ncg => match delta_total(t, u) {
            Some(total) => ExtCost::Finite(int(total as i128)),
            None => ExtCost::Infinite,
        },
        CostModel::Kliemann => {
            if t.m == 0 {
                // No edge to delete: u simply misses everyone else.
                ExtCost::Finite(int(t.n as i128 - 1))
            } else {
                ExtCost::Finite(frac(unreachable_total(t, u) as i128, t.m as i128))
            }
        }
    }
}

pub(crate) fn agent_cost_topo(t: &Topology, cfg: &GameConfig, u: usize, owned: usize) -> ExtCost {
    distance_term(t, cfg.model, u) + cfg.alpha * int(owned as i128)
}

pub(crate) fn social_cost_topo(t: &Topology, cfg: &GameConfig) -> ExtCost {
    let mut total = ExtCost::Finite(cfg.alpha * int(t.m as i128));
    for u in 0..t.n {
        total += distance_term(t, cfg.model, u);
        if !total.is_finite() {
            break;
        }
    }
    total
}

/// `delta_G(u)`, the plain sum of hop distances.
pub fn delta_sum(g: &OwnedMultiGraph, u: usize) -> Result<ExtCost> {
    check_node(g, u)?;
    Ok(distance_term(&g.topology(), CostModel::Ncg, u))
}

/// `dist_G(u)`: mean of `delta_{G-e}(u)` over all edge instances `e`.
///
/// A graph with `n > 1` and no edges has no deletion distribution and is
/// reported as `+inf`; a single node costs 0.
pub fn expected_distance_cost(g: &OwnedMultiGraph, u: usize) -> Result<ExtCost> {
    check_node(g, u)?;
    Ok(distance_term(&g.topology(), CostModel::AdvNcg, u))
}

pub fn agent_cost(g: &OwnedMultiGraph, cfg: &GameConfig, u: usize) -> Result<ExtCost> {
    check_node(g, u)?;
    Ok(agent_cost_topo(&g.topology(), cfg, u, g.owned_count(u)))
}

pub fn social_cost(g: &OwnedMultiGraph, cfg: &GameConfig) -> ExtCost {
    social_cost_topo(&g.topology(), cfg)
}

/// Expected distance from `u` to every node after the random deletion.
pub fn expected_distances_from(g: &OwnedMultiGraph, u: usize) -> Result<Vec<ExtCost>> {
    check_node(g, u)?;
    let t = g.topology();
    if t.m == 0 {
        return Ok((0..t.n).map(|v| if v == u { ExtCost::zero() } else { ExtCost::Infinite }).collect());
    }
    let dist = t.distances(u, None);
    let mut totals: Vec<Option<u64>> = vec![Some(0); t.n];
    let mut accumulate = |k: u64, d: &[u32]| {
        for (slot, &dv) in totals.iter_mut().zip(d) {
            *slot = match (*slot, dv) {
                (Some(s), dv) if dv != UNREACHED => Some(s + k * dv as u64),
                _ => None,
            };
        }
    };
    let mut cuts = Vec::new();
    for_each_deletion(&t, &dist, |k, cut| match cut {
        None => accumulate(k, &dist),
        Some(cut) => cuts.push(cut),
    });
    for cut in cuts {
        accumulate(1, &t.distances(u, Some(cut)));
    }
    Ok(totals
        .into_iter()
        .map(|s| match s {
            Some(s) => ExtCost::Finite(frac(s as i128, t.m as i128)),
            None => ExtCost::Infinite,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_from_strategies, Edge, StrategyVector};

    fn cycle4() -> OwnedMultiGraph {
        OwnedMultiGraph::new(4, (0..4).map(|i| Edge::new(i, (i + 1) % 4, i)).collect(), 2).unwrap()
    }

    fn dg3() -> OwnedMultiGraph {
        build_from_strategies(3, &StrategyVector::new(vec![vec![1, 2], vec![0, 2], vec![0, 1]]), 2).unwrap()
    }

    /// Center 0; each leaf connection doubled, one instance owned by each side.
    fn ds3() -> OwnedMultiGraph {
        OwnedMultiGraph::new(3, vec![Edge::new(0, 1, 0), Edge::new(0, 1, 1), Edge::new(0, 2, 0), Edge::new(0, 2, 2)], 2)
            .unwrap()
    }

    fn fin(p: i128, q: i128) -> ExtCost {
        ExtCost::Finite(frac(p, q))
    }

    #[test]
    fn delta_sum_examples() {
        for u in 0..4 {
            assert_eq!(delta_sum(&cycle4(), u).unwrap(), fin(4, 1));
        }
        assert_eq!(delta_sum(&ds3(), 1).unwrap(), fin(3, 1));
        assert_eq!(delta_sum(&OwnedMultiGraph::empty(3).unwrap(), 0).unwrap(), ExtCost::Infinite);
    }

    #[test]
    fn expected_distance_examples() {
        let g = dg3();
        for u in 0..3 {
            assert_eq!(expected_distance_cost(&g, u).unwrap(), fin(2, 1));
        }
        // one instance of pair {0,1} removed
        let g = g.without_edge(crate::graph::EdgeId(0)).unwrap();
        assert_eq!(expected_distance_cost(&g, 0).unwrap(), fin(11, 5));
        for u in 0..4 {
            assert_eq!(expected_distance_cost(&cycle4(), u).unwrap(), fin(5, 1));
        }
        let g = ds3().with_edge_unchecked(Edge::new(1, 2, 1));
        assert_eq!(expected_distance_cost(&g, 1).unwrap(), fin(11, 5));
        let path = OwnedMultiGraph::new(3, vec![Edge::new(0, 1, 0), Edge::new(1, 2, 1)], 2).unwrap();
        assert_eq!(expected_distance_cost(&path, 0).unwrap(), ExtCost::Infinite);
    }

    #[test]
    fn degenerate_graphs() {
        let single = OwnedMultiGraph::empty(1).unwrap();
        assert_eq!(expected_distance_cost(&single, 0).unwrap(), ExtCost::zero());
        let cfg = GameConfig::adv(int(1));
        assert_eq!(social_cost(&single, &cfg), ExtCost::zero());
        let two = OwnedMultiGraph::empty(2).unwrap();
        assert_eq!(expected_distance_cost(&two, 0).unwrap(), ExtCost::Infinite);
        let k = cfg.clone().with_model(CostModel::Kliemann);
        assert_eq!(agent_cost(&two, &k, 0).unwrap(), fin(1, 1));
    }

    #[test]
    fn agent_cost_examples() {
        // leaf 1 owning both instances of its connection
        let g = OwnedMultiGraph::new(
            3,
            vec![Edge::new(0, 1, 1), Edge::new(0, 1, 1), Edge::new(0, 2, 0), Edge::new(0, 2, 2)],
            2,
        )
        .unwrap();
        assert_eq!(agent_cost(&g, &GameConfig::adv(int(1)), 1).unwrap(), fin(5, 1));

        let k = GameConfig::adv(int(1)).with_model(CostModel::Kliemann);
        assert_eq!(agent_cost(&dg3(), &k, 0).unwrap(), fin(2, 1));

        let ncg = GameConfig::adv(int(2)).with_model(CostModel::Ncg);
        assert_eq!(agent_cost(&cycle4(), &ncg, 0).unwrap(), fin(6, 1));
    }

    #[test]
    fn social_cost_examples() {
        for alpha in [int(0), int(1), frac(103, 10)] {
            let cfg = GameConfig::adv(alpha);
            assert_eq!(social_cost(&dg3(), &cfg), ExtCost::Finite(alpha * int(6) + int(6)));
            assert_eq!(social_cost(&cycle4(), &cfg), ExtCost::Finite(alpha * int(4) + int(20)));
            let dg31 = OwnedMultiGraph::new(
                3,
                vec![Edge::new(0, 1, 0), Edge::new(0, 1, 1), Edge::new(0, 2, 0), Edge::new(1, 2, 1)],
                2,
            )
            .unwrap();
            assert_eq!(social_cost(&dg31, &cfg), ExtCost::Finite(alpha * int(4) + int(7)));
        }
    }

    #[test]
    fn per_target_expected_distances_sum_to_total() {
        let g = cycle4();
        let per = expected_distances_from(&g, 0).unwrap();
        assert_eq!(per.into_iter().sum::<ExtCost>(), fin(5, 1));
        // wheel-free sanity: the neighbour of a 4-cycle is at 1 + 2/4
        assert_eq!(expected_distances_from(&g, 0).unwrap()[1], fin(3, 2));
    }

    #[test]
    fn model_parsing() {
        assert_eq!("Adv-NCG".parse::<CostModel>().unwrap(), CostModel::AdvNcg);
        assert_eq!("kliemann".parse::<CostModel>().unwrap(), CostModel::Kliemann);
        assert!("foo".parse::<CostModel>().is_err());
    }
}
