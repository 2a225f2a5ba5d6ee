//! Slow reference implementations. Nothing here calls into the library's
//! search or cost code; graphs are plain edge lists and adjacency lists.

#![allow(dead_code)]

use std::collections::VecDeque;

use advncg::graph::Edge;
use advncg::{OwnedMultiGraph, Rational};
use rand::Rng;

pub fn pairs_of(g: &OwnedMultiGraph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|e| (e.u, e.v)).collect()
}

pub fn bfs(n: usize, edges: &[(usize, usize)], src: usize) -> Vec<Option<u64>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut q = VecDeque::from([src]);
    while let Some(x) = q.pop_front() {
        let d = dist[x].unwrap();
        for &y in &adj[x] {
            if dist[y].is_none() {
                dist[y] = Some(d + 1);
                q.push_back(y);
            }
        }
    }
    dist
}

/// Sum of distances from `src`, `None` if something is unreachable.
pub fn delta(n: usize, edges: &[(usize, usize)], src: usize) -> Option<u64> {
    bfs(n, edges, src).into_iter().sum()
}

/// Average over every edge instance of the distance sum without it.
pub fn expected_distance(n: usize, edges: &[(usize, usize)], src: usize) -> Option<Rational> {
    if edges.is_empty() {
        return if n == 1 { Some(Rational::from_integer(0)) } else { None };
    }
    let mut total = 0u64;
    for i in 0..edges.len() {
        let mut rest = edges.to_vec();
        rest.remove(i);
        total += delta(n, &rest, src)?;
    }
    Some(Rational::new(total as i128, edges.len() as i128))
}

/// `alpha * owned + dist`, `None` for infinite cost.
pub fn agent_cost(n: usize, edges: &[(usize, usize)], owned: usize, src: usize, alpha: &Rational) -> Option<Rational> {
    Some(alpha * Rational::from_integer(owned as i128) + expected_distance(n, edges, src)?)
}

pub fn social_cost(n: usize, edges: &[(usize, usize)], alpha: &Rational) -> Option<Rational> {
    let mut total = alpha * Rational::from_integer(edges.len() as i128);
    for u in 0..n {
        total += expected_distance(n, edges, u)?;
    }
    Some(total)
}

pub fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    n == 0 || bfs(n, edges, 0).iter().all(Option::is_some)
}

pub fn two_edge_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    connected(n, edges)
        && (0..edges.len()).all(|i| {
            let mut rest = edges.to_vec();
            rest.remove(i);
            connected(n, &rest)
        })
}

/// Indices of edge instances whose removal disconnects a connected graph.
pub fn bridges(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let comps = components(n, edges);
    (0..edges.len())
        .filter(|&i| {
            let mut rest = edges.to_vec();
            rest.remove(i);
            components(n, &rest) > comps
        })
        .collect()
}

pub fn components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for s in 0..n {
        if !seen[s] {
            count += 1;
            for (x, d) in bfs(n, edges, s).into_iter().enumerate() {
                if d.is_some() {
                    seen[x] = true;
                }
            }
        }
    }
    count
}

pub fn two_cut_edges(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    (0..edges.len())
        .filter(|&i| {
            let mut rest = edges.to_vec();
            rest.remove(i);
            !bridges(n, &rest).is_empty()
        })
        .collect()
}

pub fn diameter(n: usize, edges: &[(usize, usize)]) -> Option<u64> {
    (0..n).map(|s| bfs(n, edges, s).into_iter().max().flatten()).try_fold(0, |acc, d| Some(acc.max(d?)))
}

/// Every strategy of `agent`: multisets over the other nodes such that the
/// agent's edges plus everyone else's stay within `cap` per pair.
pub fn strategies(g: &OwnedMultiGraph, agent: usize, cap: usize) -> Vec<Vec<usize>> {
    let n = g.n();
    let others: Vec<(usize, usize)> = g.edges().iter().filter(|e| e.owner != agent).map(|e| (e.u, e.v)).collect();
    let mut out = vec![Vec::new()];
    for v in (0..n).filter(|&v| v != agent) {
        let used = others.iter().filter(|&&(a, b)| (a, b) == (agent, v) || (a, b) == (v, agent)).count();
        let room = cap.saturating_sub(used);
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                (0..=room).map(move |c| {
                    let mut s = s.clone();
                    s.extend(std::iter::repeat_n(v, c));
                    s
                })
            })
            .collect();
    }
    out
}

pub fn edges_with_strategy(g: &OwnedMultiGraph, agent: usize, s: &[usize]) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = g.edges().iter().filter(|e| e.owner != agent).map(|e| (e.u, e.v)).collect();
    e.extend(s.iter().map(|&v| (agent, v)));
    e
}

fn lt(a: &Option<Rational>, b: &Option<Rational>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Minimum cost over all strategies and whether it beats the current one.
pub fn best_cost(g: &OwnedMultiGraph, agent: usize, cap: usize, alpha: &Rational) -> (Option<Rational>, bool) {
    let n = g.n();
    let current = agent_cost(n, &pairs_of(g), g.strategy_of(agent).len(), agent, alpha);
    let mut best = current;
    for s in strategies(g, agent, cap) {
        let c = agent_cost(n, &edges_with_strategy(g, agent, &s), s.len(), agent, alpha);
        if lt(&c, &best) {
            best = c;
        }
    }
    let improves = lt(&best, &current);
    (best, improves)
}

pub fn is_nash(g: &OwnedMultiGraph, cap: usize, alpha: &Rational) -> bool {
    (0..g.n()).all(|a| !best_cost(g, a, cap, alpha).1)
}

/// Random owned multigraph: each pair gets `0..=cap` instances, each owned by
/// a random endpoint.
pub fn random_graph(rng: &mut impl Rng, n: usize, cap: usize, density: f64) -> OwnedMultiGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                let k = rng.gen_range(1..=cap);
                for _ in 0..k {
                    let owner = if rng.gen_bool(0.5) { u } else { v };
                    edges.push(Edge::new(u, v, owner));
                }
            }
        }
    }
    OwnedMultiGraph::new(n, edges, cap).unwrap()
}

/// Random 2-edge-connected multigraph: a random Hamiltonian cycle plus extra
/// random instances.
pub fn random_two_edge_connected(rng: &mut impl Rng, n: usize, cap: usize) -> OwnedMultiGraph {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut mult = vec![vec![0usize; n]; n];
    let mut edges = Vec::new();
    let mut add = |a: usize, b: usize, edges: &mut Vec<Edge>, rng: &mut dyn rand::RngCore| {
        if mult[a][b] < cap {
            mult[a][b] += 1;
            mult[b][a] += 1;
            let owner = if rng.gen_bool(0.5) { a } else { b };
            edges.push(Edge::new(a, b, owner));
        }
    };
    if n == 2 {
        add(0, 1, &mut edges, rng);
        add(0, 1, &mut edges, rng);
    } else {
        for i in 0..n {
            add(order[i], order[(i + 1) % n], &mut edges, rng);
        }
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b {
            add(a, b, &mut edges, rng);
        }
    }
    OwnedMultiGraph::new(n, edges, cap).unwrap()
}

/// Random connected simple graph: random spanning tree plus extra edges.
pub fn random_connected_simple(rng: &mut impl Rng, n: usize, extra_p: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for u in 0..n {
        for v in u + 1..n {
            if !edges.contains(&(u, v)) && rng.gen_bool(extra_p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

pub fn simple_adj(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for &(a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

/// Size of a minimum set that dominates every vertex, by subset enumeration.
pub fn domination_number(n: usize, edges: &[(usize, usize)]) -> usize {
    let adj = simple_adj(n, edges);
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|x| s >> x & 1 == 1 || (0..n).any(|y| s >> y & 1 == 1 && adj[x][y])))
        .map(u32::count_ones)
        .min()
        .unwrap_or(0) as usize
}

/// Size of a minimum connected set that 2-dominates every outside vertex.
pub fn min_connected_two_dominating(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let adj = simple_adj(n, edges);
    (1u32..1 << n)
        .filter(|&s| {
            let dominated =
                (0..n).all(|x| s >> x & 1 == 1 || (0..n).filter(|&y| s >> y & 1 == 1 && adj[x][y]).count() >= 2);
            let inner: Vec<(usize, usize)> =
                edges.iter().copied().filter(|&(a, b)| s >> a & 1 == 1 && s >> b & 1 == 1).collect();
            let members: Vec<usize> = (0..n).filter(|&x| s >> x & 1 == 1).collect();
            let d = bfs(n, &inner, members[0]);
            dominated && members.iter().all(|&m| d[m].is_some())
        })
        .map(u32::count_ones)
        .min()
        .map(|c| c as usize)
}
