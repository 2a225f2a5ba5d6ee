//! Moves, exhaustive best responses and equilibrium checks.
//!
//! A strategy is a sorted multiset of targets. The strategy space of agent
//! `u` is every multiset whose combined multiplicity with the edges other
//! agents already own towards `u` stays within the cap. Searches walk that
//! space with a mixed-radix counter while patching one `Topology` in place.

use serde::Serialize;

use crate::cost::{agent_cost_topo, GameConfig};
use crate::error::{Error, Result};
use crate::graph::{Edge, OwnedMultiGraph, Topology};
use crate::rational::{frac, ExtCost, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Move {
    Buy(usize),
    /// Drop one owned instance towards the target.
    Delete(usize),
    Swap {
        from: usize,
        to: usize,
    },
    MultiSwap {
        removed: Vec<usize>,
        added: Vec<usize>,
    },
    Replace(Vec<usize>),
}

fn multiset_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    // a and b sorted; returns a \ b as multisets
    let mut out = Vec::new();
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j < b.len() && b[j] == x {
            j += 1;
        } else {
            out.push(x);
        }
    }
    out
}

impl Move {
    /// The smallest move kind that turns `old` into `new`.
    pub fn classify(old: &[usize], new: &[usize]) -> Move {
        let removed = multiset_diff(old, new);
        let added = multiset_diff(new, old);
        match (removed.as_slice(), added.as_slice()) {
            ([], [t]) => Move::Buy(*t),
            ([t], []) => Move::Delete(*t),
            ([f], [t]) => Move::Swap { from: *f, to: *t },
            (r, a) if r.len() == a.len() && !r.is_empty() => Move::MultiSwap { removed: removed.clone(), added },
            _ => Move::Replace(new.to_vec()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Move::Buy(_) => "buy",
            Move::Delete(_) => "delete",
            Move::Swap { .. } => "swap",
            Move::MultiSwap { .. } => "multi-swap",
            Move::Replace(_) => "replace",
        }
    }

    pub fn detail(&self) -> String {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        match self {
            Move::Buy(t) | Move::Delete(t) => t.to_string(),
            Move::Swap { from, to } => format!("{from}->{to}"),
            Move::MultiSwap { removed, added } => format!("{}->{}", list(removed), list(added)),
            Move::Replace(s) => format!("{{{}}}", list(s)),
        }
    }

    /// Strategy of an agent whose current strategy is `current` after this move.
    pub fn resulting_strategy(&self, agent: usize, current: &[usize]) -> Result<Vec<usize>> {
        let remove = |s: &mut Vec<usize>, t: usize| -> Result<()> {
            let pos = s.iter().position(|&x| x == t).ok_or(Error::NotOwner { agent, target: t })?;
            s.remove(pos);
            Ok(())
        };
        let mut s = current.to_vec();
        match self {
            Move::Buy(t) => s.push(*t),
            Move::Delete(t) => remove(&mut s, *t)?,
            Move::Swap { from, to } => {
                if from == to {
                    return Err(Error::InvalidMove("swap must change its target".into()));
                }
                remove(&mut s, *from)?;
                s.push(*to);
            }
            Move::MultiSwap { removed, added } => {
                if removed.len() != added.len() {
                    return Err(Error::InvalidMove("multi-swap must preserve the strategy size".into()));
                }
                for &t in removed {
                    remove(&mut s, t)?;
                }
                s.extend_from_slice(added);
            }
            Move::Replace(new) => s = new.clone(),
        }
        s.sort_unstable();
        Ok(s)
    }
}

/// Graph with `agent`'s owned edges replaced by `strategy`.
pub fn with_strategy(g: &OwnedMultiGraph, agent: usize, strategy: &[usize], cap: usize) -> Result<OwnedMultiGraph> {
    if agent >= g.n() {
        return Err(Error::NodeOutOfRange { node: agent, n: g.n() });
    }
    let mut edges: Vec<Edge> = g.edges().iter().copied().filter(|e| e.owner != agent).collect();
    let mut sorted = strategy.to_vec();
    sorted.sort_unstable();
    edges.extend(sorted.into_iter().map(|v| Edge::new(agent, v, agent)));
    OwnedMultiGraph::new(g.n(), edges, cap)
}

pub fn apply_move(g: &OwnedMultiGraph, agent: usize, m: &Move, cap: usize) -> Result<OwnedMultiGraph> {
    if agent >= g.n() {
        return Err(Error::NodeOutOfRange { node: agent, n: g.n() });
    }
    let s = m.resulting_strategy(agent, &g.strategy_of(agent))?;
    with_strategy(g, agent, &s, cap)
}

/// The exhaustive search space of one agent.
struct StrategySpace {
    agent: usize,
    targets: Vec<usize>,
    limits: Vec<usize>,
    /// Graph without the agent's own edges.
    base: Topology,
}

impl StrategySpace {
    fn new(g: &OwnedMultiGraph, agent: usize, cap: usize) -> Result<Self> {
        if agent >= g.n() {
            return Err(Error::NodeOutOfRange { node: agent, n: g.n() });
        }
        let base = Topology::from_edges(g.n(), g.edges().iter().filter(|e| e.owner != agent).map(Edge::pair));
        let targets: Vec<usize> = (0..g.n()).filter(|&v| v != agent).collect();
        let limits = targets.iter().map(|&v| cap.saturating_sub(base.mult(agent, v))).collect();
        Ok(StrategySpace { agent, targets, limits, base })
    }

    fn size(&self) -> u128 {
        self.limits.iter().map(|&l| l as u128 + 1).product()
    }

    fn check_budget(&self, budget: u64) -> Result<()> {
        let needed = self.size();
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok(())
    }

    fn strategy(&self, counts: &[usize]) -> Vec<usize> {
        self.targets.iter().zip(counts).flat_map(|(&v, &c)| std::iter::repeat_n(v, c)).collect()
    }

    /// Calls `visit(counts, topology, owned)` for every count vector; stops
    /// early when `visit` returns `false`.
    fn walk(&self, mut visit: impl FnMut(&[usize], &Topology, usize) -> bool) {
        let mut t = self.base.clone();
        let mut counts = vec![0usize; self.targets.len()];
        let mut owned = 0usize;
        loop {
            if !visit(&counts, &t, owned) {
                return;
            }
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return;
                }
                let v = self.targets[i];
                if counts[i] < self.limits[i] {
                    counts[i] += 1;
                    owned += 1;
                    t.add(self.agent, v, 1);
                    break;
                }
                t.remove(self.agent, v, counts[i]);
                owned -= counts[i];
                counts[i] = 0;
                i += 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BestResponseResult {
    pub agent: usize,
    pub strategy: Vec<usize>,
    pub cost: ExtCost,
    pub current_cost: ExtCost,
    /// `cost < current_cost`.
    pub improving: bool,
    /// Number of distinct optimal strategies.
    pub ties: u64,
}

impl BestResponseResult {
    pub fn gain(&self) -> Option<Rational> {
        self.current_cost.checked_sub(&self.cost)
    }
}

fn search_best(
    g: &OwnedMultiGraph,
    cfg: &GameConfig,
    agent: usize,
    mut admissible: impl FnMut(&[usize], usize) -> bool,
) -> Result<BestResponseResult> {
    let space = StrategySpace::new(g, agent, cfg.cap)?;
    space.check_budget(cfg.budget)?;
    let current = g.strategy_of(agent);
    let current_cost = agent_cost_topo(&g.topology(), cfg, agent, current.len());

    let mut best_cost: Option<ExtCost> = None;
    let mut best: Vec<Vec<usize>> = Vec::new();
    space.walk(|counts, t, owned| {
        if !admissible(counts, owned) {
            return true;
        }
        let c = agent_cost_topo(t, cfg, agent, owned);
        match best_cost.as_ref().map(|b| c.cmp(b)) {
            None | Some(std::cmp::Ordering::Less) => {
                best_cost = Some(c);
                best.clear();
                best.push(space.strategy(counts));
            }
            Some(std::cmp::Ordering::Equal) => best.push(space.strategy(counts)),
            Some(std::cmp::Ordering::Greater) => {}
        }
        true
    });
    let cost = best_cost.ok_or(Error::Infeasible)?;
    let ties = best.len() as u64;
    let improving = cost < current_cost;
    let (strategy, cost) = if improving {
        (best.into_iter().min().expect("nonempty"), cost)
    } else {
        // the current strategy wins ties, and beats an admissible set that excludes it
        (current, current_cost.clone())
    };
    Ok(BestResponseResult { agent, strategy, cost, current_cost, improving, ties })
}

/// Exact best response of `agent` over its whole strategy space.
///
/// Ties keep the current strategy; otherwise the lexicographically smallest
/// optimal multiset is reported.
pub fn best_response_exact(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize) -> Result<BestResponseResult> {
    search_best(g, cfg, agent, |_, _| true)
}

/// Best multi-swap: strategies of the current size that replace at most
/// `max_changes` targets (all of them when `None`).
pub fn best_multi_swap(
    g: &OwnedMultiGraph,
    cfg: &GameConfig,
    agent: usize,
    max_changes: Option<usize>,
) -> Result<BestResponseResult> {
    let current = g.strategy_of(agent);
    let size = current.len();
    let targets: Vec<usize> = (0..g.n()).filter(|&v| v != agent).collect();
    let current_counts: Vec<usize> = targets.iter().map(|&v| current.iter().filter(|&&x| x == v).count()).collect();
    let limit = max_changes.unwrap_or(size);
    search_best(g, cfg, agent, |counts, owned| {
        if owned != size {
            return false;
        }
        let kept: usize = counts.iter().zip(&current_counts).map(|(&a, &b)| a.min(b)).sum();
        size - kept <= limit
    })
}

/// True when some strategy of `agent` is strictly cheaper than the current one.
pub(crate) fn has_improving_move(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize) -> Result<bool> {
    let space = StrategySpace::new(g, agent, cfg.cap)?;
    space.check_budget(cfg.budget)?;
    let current_cost = agent_cost_topo(&g.topology(), cfg, agent, g.owned_count(agent));
    let mut found = false;
    space.walk(|_, t, owned| {
        if agent_cost_topo(t, cfg, agent, owned) < current_cost {
            found = true;
            return false;
        }
        true
    });
    Ok(found)
}

/// Every strictly improving strategy of `agent`.
pub fn improving_strategies(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize) -> Result<Vec<(Vec<usize>, ExtCost)>> {
    let space = StrategySpace::new(g, agent, cfg.cap)?;
    space.check_budget(cfg.budget)?;
    let current_cost = agent_cost_topo(&g.topology(), cfg, agent, g.owned_count(agent));
    let mut out = Vec::new();
    space.walk(|counts, t, owned| {
        let c = agent_cost_topo(t, cfg, agent, owned);
        if c < current_cost {
            out.push((space.strategy(counts), c));
        }
        true
    });
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub agent: usize,
    pub strategy: Vec<usize>,
    pub current_cost: ExtCost,
    pub new_cost: ExtCost,
}

impl Witness {
    /// Cost decrease; `None` when the current cost is infinite.
    pub fn delta(&self) -> Option<Rational> {
        self.current_cost.checked_sub(&self.new_cost)
    }

    pub fn as_move(&self, g: &OwnedMultiGraph) -> Move {
        Move::classify(&g.strategy_of(self.agent), &self.strategy)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NashVerdict {
    pub is_nash: bool,
    pub witness: Option<Witness>,
}

/// NE iff no agent has a strictly improving strategy. The witness is the best
/// response of the lowest-numbered agent that can improve.
pub fn is_nash_equilibrium(g: &OwnedMultiGraph, cfg: &GameConfig) -> Result<NashVerdict> {
    for agent in 0..g.n() {
        if has_improving_move(g, cfg, agent)? {
            let br = best_response_exact(g, cfg, agent)?;
            let witness = Witness { agent, strategy: br.strategy, current_cost: br.current_cost, new_cost: br.cost };
            return Ok(NashVerdict { is_nash: false, witness: Some(witness) });
        }
    }
    Ok(NashVerdict { is_nash: true, witness: None })
}

/// Boolean-only equilibrium test with early exit.
pub fn is_nash(g: &OwnedMultiGraph, cfg: &GameConfig) -> Result<bool> {
    for agent in 0..g.n() {
        if has_improving_move(g, cfg, agent)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneReport {
    pub agent: usize,
    pub single_buy_improves: bool,
    pub multi_buy_improves: bool,
    pub single_delete_improves: bool,
    pub multi_delete_improves: bool,
    /// Cost of the agent before any change is finite.
    pub finite_start: bool,
}

impl MonotoneReport {
    /// (no single buy improves => no multi-buy improves) and the same for deletes.
    pub fn holds(&self) -> bool {
        (self.single_buy_improves || !self.multi_buy_improves)
            && (self.single_delete_improves || !self.multi_delete_improves)
    }
}

/// Exhaustively compares single buys/deletes against pure multi-buys/deletes.
pub fn check_monotone_buy_delete(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize) -> Result<MonotoneReport> {
    if agent >= g.n() {
        return Err(Error::NodeOutOfRange { node: agent, n: g.n() });
    }
    let n = g.n();
    let t0 = g.topology();
    let owned0 = g.owned_count(agent);
    let current = agent_cost_topo(&t0, cfg, agent, owned0);
    let targets: Vec<usize> = (0..n).filter(|&v| v != agent).collect();
    let strategy = g.strategy_of(agent);

    let buy_limits: Vec<usize> = targets.iter().map(|&v| cfg.cap.saturating_sub(t0.mult(agent, v))).collect();
    let del_limits: Vec<usize> = targets.iter().map(|&v| strategy.iter().filter(|&&x| x == v).count()).collect();
    let space_size = |limits: &[usize]| limits.iter().map(|&l| l as u128 + 1).product::<u128>();
    let needed = space_size(&buy_limits) + space_size(&del_limits);
    if needed > cfg.budget as u128 {
        return Err(Error::BudgetExceeded { needed, budget: cfg.budget });
    }

    // (single improves, multi improves) over all nonzero count vectors
    let scan = |limits: &[usize], sign: bool| -> (bool, bool) {
        let mut t = t0.clone();
        let mut counts = vec![0usize; limits.len()];
        let mut total = 0usize;
        let (mut single, mut multi) = (false, false);
        loop {
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return (single, multi);
                }
                let v = targets[i];
                if counts[i] < limits[i] {
                    counts[i] += 1;
                    total += 1;
                    if sign {
                        t.add(agent, v, 1)
                    } else {
                        t.remove(agent, v, 1)
                    }
                    break;
                }
                if sign {
                    t.remove(agent, v, counts[i])
                } else {
                    t.add(agent, v, counts[i])
                }
                total -= counts[i];
                counts[i] = 0;
                i += 1;
            }
            let owned = if sign { owned0 + total } else { owned0 - total };
            if agent_cost_topo(&t, cfg, agent, owned) < current {
                if total == 1 {
                    single = true;
                } else {
                    multi = true;
                }
            }
        }
    };
    let (single_buy_improves, multi_buy_improves) = scan(&buy_limits, true);
    let (single_delete_improves, multi_delete_improves) = scan(&del_limits, false);
    Ok(MonotoneReport {
        agent,
        single_buy_improves,
        multi_buy_improves,
        single_delete_improves,
        multi_delete_improves,
        finite_start: current.is_finite(),
    })
}

/// Which edge count the best-response alpha window refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum WindowReading {
    /// `|E|` of the graph the agent faces before buying.
    BeforePurchase,
    /// `|E|` after the agent's purchase.
    AfterPurchase,
}

impl WindowReading {
    pub const ALL: [WindowReading; 2] = [WindowReading::BeforePurchase, WindowReading::AfterPurchase];
}

/// Open window `(1 - 1/(m+1), 1 + 1/(m(m-1)))`; empty for `m < 2`.
pub fn purchase_window(edges: usize) -> Option<(Rational, Rational)> {
    if edges < 2 {
        return None;
    }
    let m = edges as i128;
    Some((frac(m, m + 1), frac(m * (m - 1) + 1, m * (m - 1))))
}

pub fn in_open_window(alpha: &Rational, window: &(Rational, Rational)) -> bool {
    &window.0 < alpha && alpha < &window.1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PurchaseWindowProfile {
    pub agent: usize,
    /// No incident pair carries two or more instances.
    pub hypothesis_holds: bool,
    /// Neighbours at exactly `1 + 1/|E|`, non-neighbours at exactly 2.
    pub satisfied: bool,
    pub violating: Vec<usize>,
    pub edges_after_purchase: usize,
    pub edges_before_purchase: usize,
    pub window_after: Option<(Rational, Rational)>,
    pub window_before: Option<(Rational, Rational)>,
}

impl PurchaseWindowProfile {
    pub fn window(&self, reading: WindowReading) -> Option<&(Rational, Rational)> {
        match reading {
            WindowReading::BeforePurchase => self.window_before.as_ref(),
            WindowReading::AfterPurchase => self.window_after.as_ref(),
        }
    }
}

/// Compares `agent`'s expected distances with the shape the best response
/// takes inside the window: `1 + 1/|E|` to neighbours and 2 to everyone else.
pub fn purchase_window_profile(g: &OwnedMultiGraph, agent: usize) -> Result<PurchaseWindowProfile> {
    let expected = crate::cost::expected_distances_from(g, agent)?;
    let t = g.topology();
    let m = g.edge_count();
    let hypothesis_holds = (0..g.n()).all(|v| v == agent || t.mult(agent, v) < 2);
    let neighbour_target = if m == 0 { ExtCost::Infinite } else { ExtCost::Finite(frac(m as i128 + 1, m as i128)) };
    let far_target = ExtCost::Finite(frac(2, 1));
    let violating: Vec<usize> = (0..g.n())
        .filter(|&v| v != agent)
        .filter(|&v| {
            let target = if t.mult(agent, v) > 0 { &neighbour_target } else { &far_target };
            &expected[v] != target
        })
        .collect();
    let before = m - g.owned_count(agent);
    Ok(PurchaseWindowProfile {
        agent,
        hypothesis_holds,
        satisfied: violating.is_empty(),
        violating,
        edges_after_purchase: m,
        edges_before_purchase: before,
        window_after: purchase_window(m),
        window_before: purchase_window(before),
    })
}
