//! Owned multigraphs, the strategy-vector bijection and shortest paths.
//!
//! Nodes are labelled `0..n`. Every edge instance records its owner, and
//! parallel instances are allowed up to a multiplicity cap. Distances are hop
//! counts on the simple support graph: parallel instances never shorten a
//! path, they only matter to the deletion adversary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rational::ExtCost;

/// Adjacency rows are `u64` bitsets.
pub const MAX_NODES: usize = 64;

/// Default cap on parallel instances per node pair.
pub const DEFAULT_CAP: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub owner: usize,
}

impl Edge {
    pub fn new(u: usize, v: usize, owner: usize) -> Self {
        Edge { u, v, owner }
    }

    /// `(min, max)` endpoints.
    pub fn pair(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Index of an edge instance inside [`OwnedMultiGraph::edges`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct EdgeId(pub usize);

/// Per-agent multisets of targets. Each multiset is kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct StrategyVector {
    strategies: Vec<Vec<usize>>,
}

impl StrategyVector {
    pub fn new(mut strategies: Vec<Vec<usize>>) -> Self {
        for s in &mut strategies {
            s.sort_unstable();
        }
        StrategyVector { strategies }
    }

    pub fn empty(n: usize) -> Self {
        StrategyVector { strategies: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.strategies.len()
    }

    pub fn of(&self, agent: usize) -> &[usize] {
        &self.strategies[agent]
    }

    pub fn set(&mut self, agent: usize, mut strategy: Vec<usize>) {
        strategy.sort_unstable();
        self.strategies[agent] = strategy;
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.strategies.iter().map(Vec::as_slice)
    }
}

/// Game state: a labelled multigraph with edge ownership.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OwnedMultiGraph {
    n: usize,
    edges: Vec<Edge>,
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_NODES {
        return Err(Error::TooManyNodes { n, max: MAX_NODES });
    }
    Ok(())
}

impl OwnedMultiGraph {
    /// Validates endpoints, owners and the per-pair cap.
    pub fn new(n: usize, edges: Vec<Edge>, cap: usize) -> Result<Self> {
        check_n(n)?;
        if cap == 0 {
            return Err(Error::ZeroCap);
        }
        for e in &edges {
            for x in [e.u, e.v, e.owner] {
                if x >= n {
                    return Err(Error::NodeOutOfRange { node: x, n });
                }
            }
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
            if e.owner != e.u && e.owner != e.v {
                return Err(Error::OwnerNotEndpoint { u: e.u, v: e.v, owner: e.owner });
            }
        }
        let g = OwnedMultiGraph { n, edges };
        g.check_cap(cap)?;
        Ok(g)
    }

    /// Graph on `n` nodes without edges.
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(OwnedMultiGraph { n, edges: Vec::new() })
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if cap == 0 {
            return Err(Error::ZeroCap);
        }
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in &self.edges {
            *counts.entry(e.pair()).or_default() += 1;
        }
        match counts.into_iter().find(|&(_, m)| m > cap) {
            Some(((u, v), multiplicity)) => Err(Error::CapExceeded { u, v, multiplicity, cap }),
            None => Ok(()),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Result<Edge> {
        self.edges.get(id.0).copied().ok_or(Error::EdgeOutOfRange { index: id.0, len: self.edges.len() })
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let p = (u.min(v), u.max(v));
        self.edges.iter().filter(|e| e.pair() == p).count()
    }

    pub fn owned_count(&self, agent: usize) -> usize {
        self.edges.iter().filter(|e| e.owner == agent).count()
    }

    /// Sorted multiset of agent's targets.
    pub fn strategy_of(&self, agent: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.edges.iter().filter(|e| e.owner == agent).map(|e| e.other(agent)).collect();
        s.sort_unstable();
        s
    }

    pub fn strategies_of(&self) -> StrategyVector {
        StrategyVector::new((0..self.n).map(|u| self.strategy_of(u)).collect())
    }

    /// Copy with the instance `id` removed.
    pub fn without_edge(&self, id: EdgeId) -> Result<OwnedMultiGraph> {
        self.edge(id)?;
        let mut edges = self.edges.clone();
        edges.remove(id.0);
        Ok(OwnedMultiGraph { n: self.n, edges })
    }

    #[cfg(test)]
    pub(crate) fn with_edge_unchecked(&self, e: Edge) -> OwnedMultiGraph {
        let mut edges = self.edges.clone();
        edges.push(e);
        OwnedMultiGraph { n: self.n, edges }
    }

    pub(crate) fn from_parts_unchecked(n: usize, edges: Vec<Edge>) -> OwnedMultiGraph {
        OwnedMultiGraph { n, edges }
    }

    pub fn topology(&self) -> Topology {
        Topology::from_edges(self.n, self.edges.iter().map(Edge::pair))
    }

    /// Forgets ownership.
    pub fn multigraph(&self) -> Multigraph {
        let mut m = Multigraph::empty(self.n);
        for e in &self.edges {
            let idx = m.pair_index(e.u, e.v);
            m.mult[idx] += 1;
        }
        m
    }

    pub fn canonical_key(&self) -> StateKey {
        let mut triples: Vec<(u8, u8, u8)> =
            self.edges.iter().map(|e| (e.pair().0 as u8, e.pair().1 as u8, e.owner as u8)).collect();
        triples.sort_unstable();
        StateKey { n: self.n as u8, triples }
    }
}

/// Builds the graph whose edge multiset is the union of all strategies.
pub fn build_from_strategies(n: usize, s: &StrategyVector, cap: usize) -> Result<OwnedMultiGraph> {
    check_n(n)?;
    if s.n() != n {
        return Err(Error::InvalidMove(format!("strategy vector has {} agents, graph has {n}", s.n())));
    }
    let mut edges = Vec::new();
    for (u, strategy) in s.iter().enumerate() {
        for &v in strategy {
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            if v == u {
                return Err(Error::SelfLoop(u));
            }
            edges.push(Edge::new(u, v, u));
        }
    }
    OwnedMultiGraph::new(n, edges, cap)
}

/// State identity for dynamics: node count plus the sorted multiset of
/// `(min, max, owner)` triples. Ownership-sensitive, label-sensitive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StateKey {
    n: u8,
    triples: Vec<(u8, u8, u8)>,
}

impl StateKey {
    /// Stable 64-bit digest rendered as hex, used in trace exports.
    pub fn hash_hex(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update([self.n]);
        for &(a, b, o) in &self.triples {
            hasher.update([a, b, o]);
        }
        let digest = hasher.finalize();
        digest[..8].iter().fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

/// Multigraph without ownership, stored as multiplicities over the
/// lexicographically ordered node pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    n: usize,
    mult: Vec<u8>,
}

impl Multigraph {
    pub fn empty(n: usize) -> Self {
        Multigraph { n, mult: vec![0; n * n.saturating_sub(1) / 2] }
    }

    pub fn from_multiplicities(n: usize, mult: Vec<u8>) -> Self {
        assert_eq!(mult.len(), n * n.saturating_sub(1) / 2, "one multiplicity per pair");
        Multigraph { n, mult }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        pair_list(self.n).into_iter()
    }

    pub fn pair_index(&self, u: usize, v: usize) -> usize {
        pair_index(self.n, u, v)
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        self.mult[self.pair_index(u, v)] as usize
    }

    pub fn multiplicities(&self) -> &[u8] {
        &self.mult
    }

    pub fn edge_count(&self) -> usize {
        self.mult.iter().map(|&m| m as usize).sum()
    }

    pub fn topology(&self) -> Topology {
        let pairs = pair_list(self.n);
        Topology::from_edges(
            self.n,
            pairs.iter().zip(&self.mult).flat_map(|(&p, &m)| std::iter::repeat_n(p, m as usize)),
        )
    }

    /// Attaches ownership: every instance is owned by the smaller endpoint.
    pub fn with_canonical_ownership(&self) -> OwnedMultiGraph {
        let edges = pair_list(self.n)
            .into_iter()
            .zip(&self.mult)
            .flat_map(|((u, v), &m)| std::iter::repeat_n(Edge::new(u, v, u), m as usize))
            .collect();
        OwnedMultiGraph { n: self.n, edges }
    }
}

/// Node pairs `(u, v)`, `u < v`, in lexicographic order.
pub fn pair_list(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    let (a, b) = (u.min(v), u.max(v));
    debug_assert!(a != b && b < n);
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Support graph plus multiplicities: the compact form the cost kernels run on.
#[derive(Clone, Debug)]
pub struct Topology {
    pub(crate) n: usize,
    /// Total number of edge instances.
    pub(crate) m: usize,
    mult: Vec<u8>,
    pub(crate) adj: Vec<u64>,
}

pub(crate) const UNREACHED: u32 = u32::MAX;

impl Topology {
    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut t = Topology { n, m: 0, mult: vec![0; n * n], adj: vec![0; n] };
        for (u, v) in pairs {
            t.add(u, v, 1);
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn mult(&self, u: usize, v: usize) -> usize {
        self.mult[u * self.n + v] as usize
    }

    #[inline]
    pub(crate) fn add(&mut self, u: usize, v: usize, k: usize) {
        if k == 0 {
            return;
        }
        self.mult[u * self.n + v] += k as u8;
        self.mult[v * self.n + u] += k as u8;
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        self.m += k;
    }

    #[inline]
    pub(crate) fn remove(&mut self, u: usize, v: usize, k: usize) {
        if k == 0 {
            return;
        }
        self.mult[u * self.n + v] -= k as u8;
        self.mult[v * self.n + u] -= k as u8;
        if self.mult[u * self.n + v] == 0 {
            self.adj[u] &= !(1 << v);
            self.adj[v] &= !(1 << u);
        }
        self.m -= k;
    }

    #[inline]
    fn neighbours(&self, x: usize, cut: Option<(usize, usize)>) -> u64 {
        let nb = self.adj[x];
        match cut {
            Some((a, b)) if x == a => nb & !(1 << b),
            Some((a, b)) if x == b => nb & !(1 << a),
            _ => nb,
        }
    }

    /// Sum of hop distances from `u` and the number of nodes reached
    /// (including `u`), optionally with the whole pair `cut` removed.
    pub(crate) fn distance_sum(&self, u: usize, cut: Option<(usize, usize)>) -> (u64, usize) {
        let mut visited = 1u64 << u;
        let mut frontier = visited;
        let mut level = 0u64;
        let mut sum = 0u64;
        let mut reached = 1usize;
        while frontier != 0 {
            level += 1;
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.neighbours(x, cut);
            }
            next &= !visited;
            let c = next.count_ones() as usize;
            sum += level * c as u64;
            reached += c;
            visited |= next;
            frontier = next;
        }
        (sum, reached)
    }

    /// Hop distances from `u`, `UNREACHED` for other components.
    pub(crate) fn distances(&self, u: usize, cut: Option<(usize, usize)>) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.n];
        dist[u] = 0;
        let mut visited = 1u64 << u;
        let mut frontier = visited;
        let mut level = 0u32;
        while frontier != 0 {
            level += 1;
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.neighbours(x, cut);
            }
            next &= !visited;
            let mut bits = next;
            while bits != 0 {
                let y = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                dist[y] = level;
            }
            visited |= next;
            frontier = next;
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.distance_sum(0, None).1 == self.n
    }

    pub(crate) fn is_connected_without(&self, cut: (usize, usize)) -> bool {
        self.n <= 1 || self.distance_sum(0, Some(cut)).1 == self.n
    }

    /// Connected, and no single-instance pair disconnects it when removed.
    pub fn is_two_edge_connected(&self) -> bool {
        if !self.is_connected() {
            return false;
        }
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.mult(u, v) == 1 && !self.is_connected_without((u, v)) {
                    return false;
                }
            }
        }
        true
    }

    /// Largest hop distance between two nodes; `None` when disconnected.
    pub(crate) fn diameter(&self, cut: Option<(usize, usize)>) -> Option<u32> {
        let mut best = 0;
        for u in 0..self.n {
            let d = self.distances(u, cut);
            if d.contains(&UNREACHED) {
                return None;
            }
            best = best.max(d.into_iter().max().unwrap_or(0));
        }
        Some(best)
    }
}

fn hops(d: u32) -> ExtCost {
    if d == UNREACHED {
        ExtCost::Infinite
    } else {
        ExtCost::Finite(crate::rational::int(d as i128))
    }
}

pub fn graph_distance(g: &OwnedMultiGraph, u: usize, v: usize) -> Result<ExtCost> {
    for x in [u, v] {
        if x >= g.n() {
            return Err(Error::NodeOutOfRange { node: x, n: g.n() });
        }
    }
    Ok(hops(g.topology().distances(u, None)[v]))
}

pub fn is_connected(g: &OwnedMultiGraph) -> bool {
    g.topology().is_connected()
}

pub fn is_two_edge_connected(g: &OwnedMultiGraph) -> bool {
    g.topology().is_two_edge_connected()
}

pub fn diameter(g: &OwnedMultiGraph) -> ExtCost {
    match g.topology().diameter(None) {
        Some(d) => hops(d),
        None => ExtCost::Infinite,
    }
}

pub fn canonical_key(g: &OwnedMultiGraph) -> StateKey {
    g.canonical_key()
}

/// Text format: `advncg-graph v1`, `n <count>`, then `e <u> <v> <owner>` per
/// edge instance. `#` starts a comment; blank lines are ignored.
pub mod io {
    use super::*;

    pub const HEADER: &str = "advncg-graph v1";

    pub fn parse_graph(text: &str) -> Result<OwnedMultiGraph> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };

        let (line, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        if header != HEADER {
            return Err(err(line, &format!("expected header `{HEADER}`")));
        }
        let (line, count) = lines.next().ok_or_else(|| err(line + 1, "missing `n <count>` line"))?;
        let n = match count.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["n", c] => c.parse::<usize>().map_err(|_| err(line, "node count is not a nonnegative integer"))?,
            _ => return Err(err(line, "expected `n <count>`")),
        };
        if n > MAX_NODES {
            return Err(err(line, &format!("at most {MAX_NODES} nodes supported")));
        }
        let mut edges = Vec::new();
        for (line, body) in lines {
            let fields: Vec<&str> = body.split_whitespace().collect();
            let ids = match fields.as_slice() {
                ["e", u, v, o] => [u, v, o].map(|f| f.parse::<usize>()),
                _ => return Err(err(line, "expected `e <u> <v> <owner>`")),
            };
            let [u, v, owner] = match ids {
                [Ok(u), Ok(v), Ok(o)] => [u, v, o],
                _ => return Err(err(line, "node ids must be nonnegative integers")),
            };
            if u >= n || v >= n || owner >= n {
                return Err(err(line, "node id out of range"));
            }
            if u == v {
                return Err(err(line, "self-loop"));
            }
            if owner != u && owner != v {
                return Err(err(line, "owner must be an endpoint"));
            }
            edges.push(Edge::new(u, v, owner));
        }
        Ok(OwnedMultiGraph::from_parts_unchecked(n, edges))
    }

    pub fn write_graph(g: &OwnedMultiGraph) -> String {
        let mut s = format!("{HEADER}\nn {}\n", g.n());
        for e in g.edges() {
            let _ = writeln!(s, "e {} {} {}", e.u, e.v, e.owner);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn cycle4() -> OwnedMultiGraph {
        OwnedMultiGraph::new(4, (0..4).map(|i| Edge::new(i, (i + 1) % 4, i)).collect(), 2).unwrap()
    }

    fn dg3() -> OwnedMultiGraph {
        let s = StrategyVector::new(vec![vec![1, 2], vec![0, 2], vec![0, 1]]);
        build_from_strategies(3, &s, 2).unwrap()
    }

    #[test]
    fn build_examples() {
        let g = build_from_strategies(2, &StrategyVector::empty(2), 2).unwrap();
        assert_eq!(g.edge_count(), 0);

        let g = dg3();
        assert_eq!(g.edge_count(), 6);
        assert!((0..3).all(|u| g.owned_count(u) == 2));

        let s = StrategyVector::new(vec![vec![1, 1], vec![0]]);
        assert!(matches!(build_from_strategies(2, &s, 2), Err(Error::CapExceeded { multiplicity: 3, .. })));
    }

    #[test]
    fn build_rejects_bad_targets() {
        let s = StrategyVector::new(vec![vec![0], vec![]]);
        assert_eq!(build_from_strategies(2, &s, 2), Err(Error::SelfLoop(0)));
        let s = StrategyVector::new(vec![vec![5], vec![]]);
        assert!(matches!(build_from_strategies(2, &s, 2), Err(Error::NodeOutOfRange { node: 5, .. })));
    }

    #[test]
    fn distance_examples() {
        assert_eq!(graph_distance(&cycle4(), 0, 2).unwrap(), ExtCost::Finite(int(2)));
        let g = dg3();
        for (u, v) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(graph_distance(&g, u, v).unwrap(), ExtCost::Finite(int(1)));
        }
        let g = OwnedMultiGraph::empty(2).unwrap();
        assert_eq!(graph_distance(&g, 0, 1).unwrap(), ExtCost::Infinite);
        assert_eq!(graph_distance(&g, 1, 1).unwrap(), ExtCost::zero());
        assert!(graph_distance(&g, 0, 2).is_err());
    }

    #[test]
    fn two_edge_connectivity_examples() {
        assert!(is_two_edge_connected(&cycle4()));
        let path = OwnedMultiGraph::new(3, vec![Edge::new(0, 1, 0), Edge::new(1, 2, 1)], 2).unwrap();
        assert!(!is_two_edge_connected(&path));
        let ds4 = OwnedMultiGraph::new(4, (1..4).flat_map(|l| [Edge::new(0, l, 0), Edge::new(0, l, l)]).collect(), 2)
            .unwrap();
        assert!(is_two_edge_connected(&ds4));
    }

    #[test]
    fn canonical_key_examples() {
        let a = OwnedMultiGraph::new(3, vec![Edge::new(0, 1, 0), Edge::new(1, 2, 2)], 2).unwrap();
        let b = OwnedMultiGraph::new(3, vec![Edge::new(2, 1, 2), Edge::new(1, 0, 0)], 2).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
        assert_eq!(a.canonical_key().hash_hex(), b.canonical_key().hash_hex());

        let c = OwnedMultiGraph::new(3, vec![Edge::new(0, 1, 1), Edge::new(1, 2, 2)], 2).unwrap();
        assert_ne!(a.canonical_key(), c.canonical_key());

        let g = dg3();
        assert_ne!(g.canonical_key(), g.without_edge(EdgeId(0)).unwrap().canonical_key());
    }

    #[test]
    fn pair_indexing_matches_list() {
        for n in 2..7 {
            for (i, (u, v)) in pair_list(n).into_iter().enumerate() {
                assert_eq!(pair_index(n, u, v), i);
                assert_eq!(pair_index(n, v, u), i);
            }
        }
    }

    #[test]
    fn file_format_round_trip_and_errors() {
        let g = dg3();
        let text = io::write_graph(&g);
        assert_eq!(io::parse_graph(&text).unwrap(), g);

        let commented = "# a triangle\nadvncg-graph v1\nn 3 # three\n\ne 0 1 0\ne 1 2 2\ne 0 2 2\n";
        assert_eq!(io::parse_graph(commented).unwrap().edge_count(), 3);

        let bad_owner = "advncg-graph v1\nn 3\ne 0 1 2\n";
        assert_eq!(io::parse_graph(bad_owner), Err(Error::Parse { line: 3, msg: "owner must be an endpoint".into() }));
        assert!(matches!(io::parse_graph("advncg-graph v2\nn 3\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(io::parse_graph("advncg-graph v1\nn x\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(io::parse_graph("advncg-graph v1\nn 2\ne 0 0 0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(io::parse_graph("advncg-graph v1\nn 2\ne 0 1\n"), Err(Error::Parse { line: 3, .. })));
    }
}
