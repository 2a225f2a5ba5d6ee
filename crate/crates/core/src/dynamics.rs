//! Sequential improving-move dynamics, cycle detection and searches over the
//! improving-move graph of game states.
//!
//! A state is an owned multigraph identified by its canonical key, so two
//! states with the same edges but different owners are distinct.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::{agent_cost_topo, GameConfig};
use crate::error::{Error, Result};
use crate::graph::{OwnedMultiGraph, StateKey};
use crate::moves::{apply_move, best_response_exact, improving_strategies, with_strategy, Move};
use crate::poa::ownership_profiles;
use crate::rational::ExtCost;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Schedule {
    RoundRobin,
    UniformRandom {
        seed: u64,
    },
    /// Depth-first search over the policy's moves of every agent for a
    /// revisited state; `max_steps` bounds the number of agent expansions.
    ExhaustiveAdversarial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Policy {
    BestResponse,
    /// Deletes, then buys, then swaps, each in increasing target order; the
    /// first strictly improving one is played. When none improves the full
    /// best response is tried, so a pass always means no improving move.
    FirstImproving,
}

#[derive(Clone, Debug)]
pub struct DynamicsRun {
    pub initial: OwnedMultiGraph,
    pub schedule: Schedule,
    pub policy: Policy,
    pub max_steps: u64,
}

impl DynamicsRun {
    pub fn new(initial: OwnedMultiGraph, schedule: Schedule, policy: Policy, max_steps: u64) -> Self {
        DynamicsRun { initial, schedule, policy, max_steps }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// 1-based.
    pub step: u64,
    pub agent: usize,
    pub mv: Move,
    pub cost_before: ExtCost,
    pub cost_after: ExtCost,
    /// Key of the state after the move.
    pub key: StateKey,
}

impl TraceStep {
    pub const HEADER: [&'static str; 7] =
        ["step", "agent", "move-kind", "move-detail", "cost-before", "cost-after", "canonical-key-hash"];

    pub fn record(&self) -> [String; 7] {
        [
            self.step.to_string(),
            self.agent.to_string(),
            self.mv.kind().to_string(),
            self.mv.detail(),
            self.cost_before.exact(),
            self.cost_after.exact(),
            self.key.hash_hex(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DynamicsOutcome {
    Converged {
        graph: OwnedMultiGraph,
        steps: u64,
    },
    /// The state reached after `start` moves was reached again `length` moves later.
    CycleDetected {
        key: StateKey,
        start: u64,
        length: u64,
    },
    BudgetExhausted {
        steps: u64,
    },
}

impl DynamicsOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            DynamicsOutcome::Converged { .. } => "converged",
            DynamicsOutcome::CycleDetected { .. } => "cycle",
            DynamicsOutcome::BudgetExhausted { .. } => "budget-exhausted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DynamicsReport {
    pub initial: OwnedMultiGraph,
    pub outcome: DynamicsOutcome,
    pub trace: Vec<TraceStep>,
}

struct Choice {
    strategy: Vec<usize>,
    before: ExtCost,
    after: ExtCost,
}

fn first_improving(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize) -> Result<Option<Choice>> {
    let t = g.topology();
    let current = g.strategy_of(agent);
    let before = agent_cost_topo(&t, cfg, agent, current.len());
    let mut owned: Vec<usize> = current.clone();
    owned.dedup();
    let targets: Vec<usize> = (0..g.n()).filter(|&v| v != agent).collect();
    let try_move = |remove: Option<usize>, add: Option<usize>| -> Option<ExtCost> {
        let mut t = t.clone();
        let mut count = current.len();
        if let Some(x) = remove {
            t.remove(agent, x, 1);
            count -= 1;
        }
        if let Some(y) = add {
            if t.mult(agent, y) >= cfg.cap {
                return None;
            }
            t.add(agent, y, 1);
            count += 1;
        }
        Some(agent_cost_topo(&t, cfg, agent, count)).filter(|c| *c < before)
    };
    let found = |m: Move, after: ExtCost| -> Result<Option<Choice>> {
        let strategy = m.resulting_strategy(agent, &current)?;
        Ok(Some(Choice { strategy, before: before.clone(), after }))
    };
    for &x in &owned {
        if let Some(c) = try_move(Some(x), None) {
            return found(Move::Delete(x), c);
        }
    }
    for &y in &targets {
        if let Some(c) = try_move(None, Some(y)) {
            return found(Move::Buy(y), c);
        }
    }
    for &x in &owned {
        for &y in targets.iter().filter(|&&y| y != x) {
            if let Some(c) = try_move(Some(x), Some(y)) {
                return found(Move::Swap { from: x, to: y }, c);
            }
        }
    }
    best_response_choice(g, cfg, agent)
}

fn best_response_choice(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize) -> Result<Option<Choice>> {
    let br = best_response_exact(g, cfg, agent)?;
    Ok(br.improving.then_some(Choice { strategy: br.strategy, before: br.current_cost, after: br.cost }))
}

fn choose(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize, policy: Policy) -> Result<Option<Choice>> {
    match policy {
        Policy::BestResponse => best_response_choice(g, cfg, agent),
        Policy::FirstImproving => first_improving(g, cfg, agent),
    }
}

fn play(
    g: &OwnedMultiGraph,
    cfg: &GameConfig,
    agent: usize,
    choice: Choice,
    step: u64,
) -> Result<(OwnedMultiGraph, TraceStep)> {
    assert!(choice.after < choice.before, "non-improving move by agent {agent}");
    let mv = Move::classify(&g.strategy_of(agent), &choice.strategy);
    let next = with_strategy(g, agent, &choice.strategy, cfg.cap)?;
    let key = next.canonical_key();
    Ok((next, TraceStep { step, agent, mv, cost_before: choice.before, cost_after: choice.after, key }))
}

/// Plays the run. Agents without an improving move are skipped; the run stops
/// at an equilibrium, at the first revisited state, or after `max_steps` moves.
pub fn run_dynamics(run: &DynamicsRun, cfg: &GameConfig) -> Result<DynamicsReport> {
    if run.schedule == Schedule::ExhaustiveAdversarial {
        return adversarial(run, cfg);
    }
    let n = run.initial.n();
    let mut rng = match run.schedule {
        Schedule::UniformRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut g = run.initial.clone();
    let mut seen: HashMap<StateKey, u64> = HashMap::from([(g.canonical_key(), 0)]);
    let mut trace: Vec<TraceStep> = Vec::new();
    // agents known to have no improving move in the current state
    let mut stable = vec![false; n];
    let mut stable_count = 0;
    let mut next_agent = 0;
    let finish = |outcome, trace| Ok(DynamicsReport { initial: run.initial.clone(), outcome, trace });
    if n == 0 {
        return finish(DynamicsOutcome::Converged { graph: g, steps: 0 }, trace);
    }
    loop {
        let agent = match rng.as_mut() {
            Some(r) => r.gen_range(0..n),
            None => {
                let a = next_agent;
                next_agent = (next_agent + 1) % n;
                a
            }
        };
        if stable[agent] {
            continue;
        }
        let steps = trace.len() as u64;
        match choose(&g, cfg, agent, run.policy)? {
            None => {
                stable[agent] = true;
                stable_count += 1;
                if stable_count == n {
                    assert!(crate::moves::is_nash(&g, cfg)?, "converged state is not an equilibrium");
                    return finish(DynamicsOutcome::Converged { graph: g, steps }, trace);
                }
            }
            Some(_) if steps >= run.max_steps => {
                return finish(DynamicsOutcome::BudgetExhausted { steps }, trace);
            }
            Some(choice) => {
                let (next, step) = play(&g, cfg, agent, choice, steps + 1)?;
                let key = step.key.clone();
                trace.push(step);
                g = next;
                stable.iter_mut().for_each(|s| *s = false);
                stable_count = 0;
                if let Some(&start) = seen.get(&key) {
                    let length = steps + 1 - start;
                    return finish(DynamicsOutcome::CycleDetected { key, start, length }, trace);
                }
                seen.insert(key, steps + 1);
            }
        }
    }
}

fn adversarial(run: &DynamicsRun, cfg: &GameConfig) -> Result<DynamicsReport> {
    struct Frame {
        g: OwnedMultiGraph,
        key: StateKey,
        next_agent: usize,
        moved: bool,
    }
    let n = run.initial.n();
    let root_key = run.initial.canonical_key();
    let mut stack = vec![Frame { g: run.initial.clone(), key: root_key.clone(), next_agent: 0, moved: false }];
    let mut depth_of: HashMap<StateKey, usize> = HashMap::from([(root_key, 0)]);
    let mut done: HashSet<StateKey> = HashSet::new();
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut first_ne: Option<(OwnedMultiGraph, Vec<TraceStep>)> = None;
    let mut expansions = 0u64;
    let finish = |outcome, trace| Ok(DynamicsReport { initial: run.initial.clone(), outcome, trace });

    while let Some(top) = stack.last_mut() {
        if top.next_agent == n {
            let frame = stack.pop().expect("nonempty");
            if !frame.moved && first_ne.is_none() {
                first_ne = Some((frame.g, trace.clone()));
            }
            depth_of.remove(&frame.key);
            done.insert(frame.key);
            trace.pop();
            continue;
        }
        let agent = top.next_agent;
        top.next_agent += 1;
        if expansions >= run.max_steps {
            return finish(DynamicsOutcome::BudgetExhausted { steps: expansions }, trace);
        }
        expansions += 1;
        let Some(choice) = choose(&top.g, cfg, agent, run.policy)? else {
            continue;
        };
        top.moved = true;
        let (next, step) = play(&top.g, cfg, agent, choice, trace.len() as u64 + 1)?;
        let key = step.key.clone();
        if let Some(&start) = depth_of.get(&key) {
            trace.push(step);
            let length = (trace.len() - start) as u64;
            return finish(DynamicsOutcome::CycleDetected { key, start: start as u64, length }, trace);
        }
        if done.contains(&key) {
            continue;
        }
        trace.push(step);
        depth_of.insert(key.clone(), stack.len());
        stack.push(Frame { g: next, key, next_agent: 0, moved: false });
    }
    let (graph, trace) = first_ne.expect("an acyclic finite search ends in an equilibrium");
    let steps = trace.len() as u64;
    finish(DynamicsOutcome::Converged { graph, steps }, trace)
}

/// Applies the moves of `steps` in order.
pub fn replay(initial: &OwnedMultiGraph, steps: &[TraceStep], cap: usize) -> Result<OwnedMultiGraph> {
    steps.iter().try_fold(initial.clone(), |g, s| apply_move(&g, s.agent, &s.mv, cap))
}

/// For a detected cycle: replays the trace up to the cycle start and then
/// around the cycle, and checks both states carry the repeated key. Every
/// replayed step must also reproduce its recorded key. Other outcomes check
/// only the per-step keys.
pub fn verify_replay(report: &DynamicsReport, cap: usize) -> Result<bool> {
    let mut g = report.initial.clone();
    let mut keys = vec![g.canonical_key()];
    for s in &report.trace {
        g = apply_move(&g, s.agent, &s.mv, cap)?;
        let key = g.canonical_key();
        if key != s.key {
            return Ok(false);
        }
        keys.push(key);
    }
    Ok(match &report.outcome {
        DynamicsOutcome::CycleDetected { key, start, length } => {
            let (a, b) = (*start as usize, (*start + *length) as usize);
            b < keys.len() && keys[a] == *key && keys[b] == *key && *length > 0
        }
        DynamicsOutcome::Converged { graph, .. } => graph.canonical_key() == *keys.last().expect("nonempty"),
        DynamicsOutcome::BudgetExhausted { .. } => true,
    })
}

/// One arc of the improving-move graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImprovingStep {
    pub agent: usize,
    pub strategy: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum WeakAcyclicityVerdict {
    /// Improving moves leading from the start to an equilibrium; empty when
    /// the start already is one.
    ReachesNE(Vec<ImprovingStep>),
    NoNEReachable {
        exhausted: bool,
        states: u64,
    },
    Inconclusive {
        explored: u64,
    },
}

/// Every (agent, improving strategy) arc out of `g`.
fn improving_arcs(g: &OwnedMultiGraph, cfg: &GameConfig) -> Result<Vec<ImprovingStep>> {
    let mut out = Vec::new();
    for agent in 0..g.n() {
        for (strategy, _) in improving_strategies(g, cfg, agent)? {
            out.push(ImprovingStep { agent, strategy });
        }
    }
    Ok(out)
}

/// Breadth-first search over the improving-move graph from `g0`; `budget`
/// bounds the number of expanded states. The returned path is a shortest one.
pub fn probe_weak_acyclicity(g0: &OwnedMultiGraph, cfg: &GameConfig, budget: u64) -> Result<WeakAcyclicityVerdict> {
    let mut parent: HashMap<StateKey, Option<(StateKey, ImprovingStep)>> = HashMap::new();
    let mut queue: VecDeque<OwnedMultiGraph> = VecDeque::new();
    parent.insert(g0.canonical_key(), None);
    queue.push_back(g0.clone());
    let mut explored = 0u64;
    while let Some(g) = queue.pop_front() {
        if explored >= budget {
            return Ok(WeakAcyclicityVerdict::Inconclusive { explored });
        }
        explored += 1;
        let key = g.canonical_key();
        let arcs = improving_arcs(&g, cfg)?;
        if arcs.is_empty() {
            let mut path = Vec::new();
            let mut k = key;
            while let Some(Some((prev, step))) = parent.get(&k) {
                path.push(step.clone());
                k = prev.clone();
            }
            path.reverse();
            return Ok(WeakAcyclicityVerdict::ReachesNE(path));
        }
        for arc in arcs {
            let next = with_strategy(&g, arc.agent, &arc.strategy, cfg.cap)?;
            let nk = next.canonical_key();
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(nk) {
                e.insert(Some((key.clone(), arc)));
                queue.push_back(next);
            }
        }
    }
    Ok(WeakAcyclicityVerdict::NoNEReachable { exhausted: true, states: explored })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateSpaceReport {
    pub n: usize,
    pub cap: usize,
    pub states: u64,
    pub equilibria: u64,
    /// States from which some improving sequence reaches an equilibrium.
    pub reach_equilibrium: u64,
    /// States from which no improving sequence reaches an equilibrium.
    pub trapped: Vec<StateKey>,
}

impl StateSpaceReport {
    pub fn weakly_acyclic(&self) -> bool {
        self.trapped.is_empty()
    }
}

/// Classifies every ownership-resolved state with `n` agents: backward search
/// from the equilibria over improving-move arcs.
pub fn classify_state_space(n: usize, cfg: &GameConfig) -> Result<StateSpaceReport> {
    let states: Vec<OwnedMultiGraph> = ownership_profiles(n, cfg.cap, cfg.budget)?.collect();
    let index: HashMap<StateKey, usize> = states.iter().enumerate().map(|(i, g)| (g.canonical_key(), i)).collect();
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    let mut good = vec![false; states.len()];
    let mut queue = VecDeque::new();
    for (i, g) in states.iter().enumerate() {
        let arcs = improving_arcs(g, cfg)?;
        if arcs.is_empty() {
            good[i] = true;
            queue.push_back(i);
        }
        for arc in arcs {
            let next = with_strategy(g, arc.agent, &arc.strategy, cfg.cap)?;
            let j = *index
                .get(&next.canonical_key())
                .ok_or_else(|| Error::InvalidMove("successor outside state space".into()))?;
            preds[j].push(i);
        }
    }
    let equilibria = queue.len() as u64;
    while let Some(j) = queue.pop_front() {
        for &i in &preds[j] {
            if !good[i] {
                good[i] = true;
                queue.push_back(i);
            }
        }
    }
    let trapped: Vec<StateKey> =
        states.iter().zip(&good).filter(|(_, &ok)| !ok).map(|(g, _)| g.canonical_key()).collect();
    Ok(StateSpaceReport {
        n,
        cap: cfg.cap,
        states: states.len() as u64,
        equilibria,
        reach_equilibrium: good.iter().filter(|&&ok| ok).count() as u64,
        trapped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build_family, FamilyKind, FamilySpec};
    use crate::rational::{frac, int};

    fn fam(kind: FamilyKind, n: usize) -> OwnedMultiGraph {
        build_family(&FamilySpec::new(kind, n)).unwrap()
    }

    #[test]
    fn dg3_is_already_stable() {
        let run = DynamicsRun::new(fam(FamilyKind::DoubleClique, 3), Schedule::RoundRobin, Policy::BestResponse, 100);
        let r = run_dynamics(&run, &GameConfig::adv(frac(1, 6))).unwrap();
        assert!(matches!(r.outcome, DynamicsOutcome::Converged { steps: 0, .. }));
        assert!(r.trace.is_empty());
    }

    #[test]
    fn path_converges_quickly() {
        let cfg = GameConfig::adv(int(1));
        for policy in [Policy::BestResponse, Policy::FirstImproving] {
            let run = DynamicsRun::new(fam(FamilyKind::Path, 3), Schedule::RoundRobin, policy, 100);
            let r = run_dynamics(&run, &cfg).unwrap();
            let DynamicsOutcome::Converged { graph, steps } = &r.outcome else { panic!("{:?}", r.outcome) };
            assert!(*steps <= 3);
            assert!(crate::moves::is_nash(graph, &cfg).unwrap());
            assert!(verify_replay(&r, cfg.cap).unwrap());
            assert!(r.trace.iter().all(|s| s.cost_after < s.cost_before));
        }
    }

    #[test]
    fn zero_budget() {
        let run = DynamicsRun::new(fam(FamilyKind::Path, 3), Schedule::RoundRobin, Policy::BestResponse, 0);
        let r = run_dynamics(&run, &GameConfig::adv(int(1))).unwrap();
        assert_eq!(r.outcome, DynamicsOutcome::BudgetExhausted { steps: 0 });
    }

    #[test]
    fn random_schedule_is_deterministic() {
        let cfg = GameConfig::adv(int(1));
        let run = DynamicsRun::new(
            OwnedMultiGraph::empty(4).unwrap(),
            Schedule::UniformRandom { seed: 7 },
            Policy::FirstImproving,
            50,
        );
        let a = run_dynamics(&run, &cfg).unwrap();
        let b = run_dynamics(&run, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn probe_examples() {
        let dg3 = fam(FamilyKind::DoubleClique, 3);
        let v = probe_weak_acyclicity(&dg3, &GameConfig::adv(frac(1, 6)), 10).unwrap();
        assert_eq!(v, WeakAcyclicityVerdict::ReachesNE(Vec::new()));
        let v = probe_weak_acyclicity(&dg3, &GameConfig::adv(frac(1, 4)), 1000).unwrap();
        assert!(matches!(v, WeakAcyclicityVerdict::ReachesNE(ref p) if !p.is_empty()));
        let v = probe_weak_acyclicity(&OwnedMultiGraph::empty(5).unwrap(), &GameConfig::adv(int(1)), 1).unwrap();
        assert_eq!(v, WeakAcyclicityVerdict::Inconclusive { explored: 1 });
    }

    #[test]
    fn small_state_space() {
        let r = classify_state_space(3, &GameConfig::adv(int(1))).unwrap();
        assert_eq!(r.states, 216);
        assert!(r.equilibria > 0);
        assert_eq!(r.reach_equilibrium + r.trapped.len() as u64, r.states);
    }
}
