//! Robustness structure: bridges, 2-cut-edges, cut-cycles and diameters under
//! single deletions. Edge instances are the unit everywhere, so one instance
//! of a doubled pair is a 2-cut-edge exactly when its partner alone would be
//! a bridge.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeId, OwnedMultiGraph, Topology, UNREACHED};
use crate::rational::{int, ExtCost};

/// Pairs `(u, v)`, `u < v`, that are bridges of the support graph.
fn support_bridges(t: &Topology) -> Vec<(usize, usize)> {
    struct Dfs<'a> {
        t: &'a Topology,
        disc: Vec<u32>,
        low: Vec<u32>,
        time: u32,
        out: Vec<(usize, usize)>,
    }
    impl Dfs<'_> {
        fn visit(&mut self, x: usize, parent: Option<usize>) {
            self.time += 1;
            self.disc[x] = self.time;
            self.low[x] = self.time;
            let mut nb = self.t.adj[x];
            while nb != 0 {
                let y = nb.trailing_zeros() as usize;
                nb &= nb - 1;
                if Some(y) == parent {
                    continue;
                }
                if self.disc[y] == 0 {
                    self.visit(y, Some(x));
                    self.low[x] = self.low[x].min(self.low[y]);
                    if self.low[y] > self.disc[x] {
                        self.out.push((x.min(y), x.max(y)));
                    }
                } else {
                    self.low[x] = self.low[x].min(self.disc[y]);
                }
            }
        }
    }
    let mut dfs = Dfs { t, disc: vec![0; t.n], low: vec![0; t.n], time: 0, out: Vec::new() };
    for x in 0..t.n {
        if dfs.disc[x] == 0 {
            dfs.visit(x, None);
        }
    }
    dfs.out
}

/// Single-instance bridge pairs of the topology.
fn bridge_pairs(t: &Topology) -> Vec<(usize, usize)> {
    let mut pairs: Vec<_> = support_bridges(t).into_iter().filter(|&(u, v)| t.mult(u, v) == 1).collect();
    pairs.sort_unstable();
    pairs
}

/// Edge instances whose removal increases the number of components.
pub fn bridges(g: &OwnedMultiGraph) -> Vec<EdgeId> {
    let pairs: BTreeSet<(usize, usize)> = bridge_pairs(&g.topology()).into_iter().collect();
    g.edges().iter().enumerate().filter(|(_, e)| pairs.contains(&e.pair())).map(|(i, _)| EdgeId(i)).collect()
}

fn require_two_edge_connected(t: &Topology) -> Result<()> {
    if !t.is_two_edge_connected() {
        return Err(Error::NotTwoEdgeConnected);
    }
    Ok(())
}

fn without_instance(t: &Topology, e: &Edge) -> Topology {
    let mut t = t.clone();
    t.remove(e.u, e.v, 1);
    t
}

/// Edge instances `e` such that `G - e` has at least one bridge.
pub fn two_cut_edges(g: &OwnedMultiGraph) -> Result<Vec<EdgeId>> {
    let t = g.topology();
    require_two_edge_connected(&t)?;
    Ok(g.edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| !bridge_pairs(&without_instance(&t, e)).is_empty())
        .map(|(i, _)| EdgeId(i))
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutCycle {
    /// Starts at the smaller endpoint of the 2-cut-edge and ends at the other
    /// one; the 2-cut-edge closes the cycle.
    pub nodes: Vec<usize>,
    /// The 2-cut-edge first, then one instance per hop along `nodes`.
    pub edges: Vec<EdgeId>,
}

impl CutCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Shortest cycle through the 2-cut-edge `id`; it necessarily contains every
/// bridge of `G - id`. Ties go to the lexicographically smallest node sequence.
pub fn cut_cycle_of(g: &OwnedMultiGraph, id: EdgeId) -> Result<CutCycle> {
    let e = g.edge(id)?;
    let t = g.topology();
    require_two_edge_connected(&t)?;
    let rest = without_instance(&t, &e);
    if bridge_pairs(&rest).is_empty() {
        return Err(Error::NotTwoCutEdge(id.0));
    }
    let (a, b) = e.pair();
    let to_b = rest.distances(b, None);
    debug_assert_ne!(to_b[a], UNREACHED);
    let mut nodes = vec![a];
    let mut x = a;
    while x != b {
        let want = to_b[x] - 1;
        let next = (0..g.n()).find(|&y| rest.mult(x, y) > 0 && to_b[y] == want).expect("shortest path step");
        nodes.push(next);
        x = next;
    }
    let mut edges = vec![id];
    for w in nodes.windows(2) {
        let pair = (w[0].min(w[1]), w[0].max(w[1]));
        let inst =
            g.edges().iter().enumerate().position(|(i, f)| i != id.0 && f.pair() == pair).expect("instance on path");
        edges.push(EdgeId(inst));
    }
    Ok(CutCycle { nodes, edges })
}

/// Maximum diameter of `G - e` over all instances `e`.
///
/// Panics if the result exceeds twice the diameter of `G`, which cannot happen
/// for 2-edge-connected graphs.
pub fn diameter_after_worst_removal(g: &OwnedMultiGraph) -> Result<ExtCost> {
    let t = g.topology();
    require_two_edge_connected(&t)?;
    let d = t.diameter(None).expect("connected");
    let mut worst = d;
    let mut seen = BTreeSet::new();
    for e in g.edges() {
        if !seen.insert(e.pair()) {
            continue;
        }
        let rest = without_instance(&t, e);
        let dd = rest.diameter(None).expect("2-edge-connected");
        worst = worst.max(dd);
    }
    assert!(worst <= 2 * d, "post-deletion diameter {worst} exceeds 2 * {d}");
    Ok(ExtCost::Finite(int(worst as i128)))
}

/// Nodes `w` whose every shortest path from `v` needs the pair of instance
/// `id`; empty when that pair has a parallel instance.
pub fn dependents(g: &OwnedMultiGraph, v: usize, id: EdgeId) -> Result<Vec<usize>> {
    let e = g.edge(id)?;
    if v >= g.n() {
        return Err(Error::NodeOutOfRange { node: v, n: g.n() });
    }
    let t = g.topology();
    if t.mult(e.u, e.v) >= 2 {
        return Ok(Vec::new());
    }
    let before = t.distances(v, None);
    let after = t.distances(v, Some(e.pair()));
    Ok((0..g.n()).filter(|&w| before[w] != UNREACHED && after[w] > before[w]).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub n: usize,
    pub edges: usize,
    pub two_edge_connected: bool,
    pub bridges: Vec<EdgeId>,
    /// Empty unless the graph is 2-edge-connected.
    pub two_cut_edges: Vec<EdgeId>,
    pub diameter: ExtCost,
    pub worst_post_deletion_diameter: ExtCost,
}

pub fn structure_report(g: &OwnedMultiGraph) -> StructureReport {
    let t = g.topology();
    let two_ec = t.is_two_edge_connected();
    let diameter = crate::graph::diameter(g);
    let (two_cut, worst) = if two_ec {
        (two_cut_edges(g).expect("checked"), diameter_after_worst_removal(g).expect("checked"))
    } else {
        (Vec::new(), ExtCost::Infinite)
    };
    StructureReport {
        n: g.n(),
        edges: g.edge_count(),
        two_edge_connected: two_ec,
        bridges: bridges(g),
        two_cut_edges: two_cut,
        diameter,
        worst_post_deletion_diameter: worst,
    }
}
