//! Canonical network families, their closed-form costs, and brute-force
//! optimum search over unowned multigraphs.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cost::{distance_term, CostModel};
use crate::error::{Error, Result};
use crate::graph::{pair_list, Edge, Multigraph, OwnedMultiGraph, Topology, MAX_NODES};
use crate::rational::{frac, int, ExtCost, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    /// Every pair doubled.
    DoubleClique,
    /// Clique whose first `k` pairs (lexicographic) are doubled.
    PartialDoubleClique {
        k: usize,
    },
    Clique,
    /// Node 0 joined to every leaf by a double edge.
    DoubleStar,
    /// Triangles `(0, 2i-1, 2i)` sharing hub 0; odd `n`.
    Fan,
    Cycle,
    Path,
    /// Path whose consecutive nodes are joined by double edges.
    DoublePath,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub n: usize,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, n: usize) -> Self {
        FamilySpec { kind, n }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |msg: String| Err(Error::InvalidFamily(msg));
        if n > MAX_NODES {
            return Err(Error::TooManyNodes { n, max: MAX_NODES });
        }
        match self.kind {
            FamilyKind::PartialDoubleClique { k } if k > n * n.saturating_sub(1) / 2 => {
                bad(format!("k = {k} exceeds C({n}, 2)"))
            }
            FamilyKind::Fan if n < 3 || n.is_multiple_of(2) => bad(format!("fan needs odd n >= 3, got {n}")),
            FamilyKind::Cycle if n < 3 => bad(format!("cycle needs n >= 3, got {n}")),
            FamilyKind::DoubleStar | FamilyKind::Path | FamilyKind::DoublePath if n < 2 => {
                bad(format!("needs n >= 2, got {n}"))
            }
            _ if n == 0 => bad("n must be positive".into()),
            _ => Ok(()),
        }
    }

    /// Expected number of edge instances.
    pub fn edge_count(&self) -> usize {
        let n = self.n;
        let pairs = n * n.saturating_sub(1) / 2;
        match self.kind {
            FamilyKind::DoubleClique => 2 * pairs,
            FamilyKind::PartialDoubleClique { k } => pairs + k,
            FamilyKind::Clique => pairs,
            FamilyKind::DoubleStar | FamilyKind::DoublePath => 2 * (n - 1),
            FamilyKind::Fan => 3 * (n - 1) / 2,
            FamilyKind::Cycle => n,
            FamilyKind::Path => n - 1,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        match self.kind {
            FamilyKind::DoubleClique => write!(f, "DG_{n}"),
            FamilyKind::PartialDoubleClique { k } => write!(f, "DG_{{{n},{k}}}"),
            FamilyKind::Clique => write!(f, "G_{n}"),
            FamilyKind::DoubleStar => write!(f, "DS_{n}"),
            FamilyKind::Fan => write!(f, "F_{n}"),
            FamilyKind::Cycle => write!(f, "C_{n}"),
            FamilyKind::Path => write!(f, "P_{n}"),
            FamilyKind::DoublePath => write!(f, "DP_{n}"),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    /// Accepts `path3`, `path-3`, `dg-4`, `dgk-4-2`, `double-path-4`, `ds5`,
    /// `fan-5`, `cycle4`, `c4`, `clique-4`, `g4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFamily(format!("unknown family {s:?}"));
        let lower = s.trim().to_ascii_lowercase();
        let mut tokens: Vec<String> = lower.split(['-', '_', ',']).map(str::to_string).collect();
        let mut numbers = Vec::new();
        while let Some(last) = tokens.last() {
            if !last.is_empty() && last.chars().all(|c| c.is_ascii_digit()) {
                numbers.insert(0, last.parse::<usize>().map_err(|_| bad())?);
                tokens.pop();
            } else {
                break;
            }
        }
        let mut name = tokens.join("-");
        let digits_at = name.find(|c: char| c.is_ascii_digit());
        if let Some(pos) = digits_at {
            let tail = name[pos..].to_string();
            numbers.insert(0, tail.parse::<usize>().map_err(|_| bad())?);
            name.truncate(pos);
        }
        let kind = match (name.as_str(), numbers.len()) {
            ("dg", 1) => FamilyKind::DoubleClique,
            ("dg" | "dgk", 2) => FamilyKind::PartialDoubleClique { k: numbers[1] },
            ("g" | "clique" | "k", 1) => FamilyKind::Clique,
            ("ds" | "double-star", 1) => FamilyKind::DoubleStar,
            ("f" | "fan", 1) => FamilyKind::Fan,
            ("c" | "cycle", 1) => FamilyKind::Cycle,
            ("p" | "path", 1) => FamilyKind::Path,
            ("dp" | "double-path", 1) => FamilyKind::DoublePath,
            _ => return Err(bad()),
        };
        let spec = FamilySpec { kind, n: numbers[0] };
        spec.validate()?;
        Ok(spec)
    }
}

/// Builds a family member with its canonical ownership:
/// doubled pairs give one instance to each endpoint, except in the double
/// star whose centre owns everything (a leaf owning a spoke instance could
/// swap it to another leaf and gain). Single clique edges belong to the
/// smaller endpoint, cycle and path node `i` owns `(i, i+1)`, the fan hub
/// owns its spokes.
pub fn build_family(spec: &FamilySpec) -> Result<OwnedMultiGraph> {
    spec.validate()?;
    let n = spec.n;
    let doubled = |u: usize, v: usize| [Edge::new(u, v, u), Edge::new(u, v, v)];
    let edges: Vec<Edge> = match spec.kind {
        FamilyKind::DoubleClique => pair_list(n).into_iter().flat_map(|(u, v)| doubled(u, v)).collect(),
        FamilyKind::PartialDoubleClique { k } => pair_list(n)
            .into_iter()
            .enumerate()
            .flat_map(|(i, (u, v))| if i < k { doubled(u, v).to_vec() } else { vec![Edge::new(u, v, u)] })
            .collect(),
        FamilyKind::Clique => pair_list(n).into_iter().map(|(u, v)| Edge::new(u, v, u)).collect(),
        FamilyKind::DoubleStar => (1..n).flat_map(|l| [Edge::new(0, l, 0); 2]).collect(),
        FamilyKind::Fan => (0..(n - 1) / 2)
            .flat_map(|i| {
                let (a, b) = (2 * i + 1, 2 * i + 2);
                [Edge::new(0, a, 0), Edge::new(0, b, 0), Edge::new(a, b, a)]
            })
            .collect(),
        FamilyKind::Cycle => (0..n).map(|i| Edge::new(i, (i + 1) % n, i)).collect(),
        FamilyKind::Path => (0..n - 1).map(|i| Edge::new(i, i + 1, i)).collect(),
        FamilyKind::DoublePath => (0..n - 1).flat_map(|i| doubled(i, i + 1)).collect(),
    };
    OwnedMultiGraph::new(n, edges, 2)
}

fn choose2(n: usize) -> i128 {
    (n * n.saturating_sub(1) / 2) as i128
}

/// Closed-form social cost of a clique with `k` doubled pairs:
/// `alpha*|E| + n(n-1) + 2(C(n,2) - k) / (C(n,2) + k)`, `|E| = C(n,2) + k`.
pub fn analytic_cost_dgnk(n: usize, k: usize, alpha: &Rational) -> Result<ExtCost> {
    let c = choose2(n);
    if k as i128 > c {
        return Err(Error::InvalidFamily(format!("k = {k} exceeds C({n}, 2) = {c}")));
    }
    if n <= 1 {
        return Ok(ExtCost::zero());
    }
    let k = k as i128;
    let n = n as i128;
    let edges = c + k;
    Ok(ExtCost::Finite(alpha * int(edges) + int(n * (n - 1)) + frac(2 * (c - k), c + k)))
}

/// Expected distance of a double-clique agent after deleting `k` of its own
/// edges towards distinct agents: `n - 1 + k / (n(n-1) - k)`.
pub fn dg_deletion_expected_distance(n: usize, k: usize) -> Rational {
    let (n, k) = (n as i128, k as i128);
    int(n - 1) + frac(k, n * (n - 1) - k)
}

/// Expected distance of a double-star leaf after buying `k` single edges to
/// other leaves: `2n - 3 - k + k / (2(n-1) + k)`.
pub fn ds_purchase_expected_distance(n: usize, k: usize) -> Rational {
    let (n, k) = (n as i128, k as i128);
    int(2 * n - 3 - k) + frac(k, 2 * (n - 1) + k)
}

/// Closed window `[lo, hi]` of edge prices where the clique with `k` doubled
/// pairs is optimal, `1 <= k < C(n,2)`.
pub fn partial_double_window(n: usize, k: usize) -> Option<(Rational, Rational)> {
    let c = choose2(n);
    let k = k as i128;
    if k < 1 || k >= c {
        return None;
    }
    let top = (2 * n * (n - 1)) as i128;
    Some((frac(top, (c + k) * (c + k + 1)), frac(top, (c + k) * (c + k - 1))))
}

/// Prices up to which the doubled clique is optimal: `2 / (n(n-1) - 1)`.
pub fn double_clique_optimal_up_to(n: usize) -> Rational {
    frac(2, (n * (n - 1)) as i128 - 1)
}

/// Prices up to which the doubled clique is an equilibrium: `1 / (n(n-1) - 1)`.
pub fn double_clique_nash_up_to(n: usize) -> Rational {
    frac(1, (n * (n - 1)) as i128 - 1)
}

/// Prices from which the centre-owned double star is an equilibrium. The
/// binding deviation is a leaf buying single edges to all `n - 2` other
/// leaves, which pays off below `1 - 1/(3n - 4)`.
pub fn double_star_nash_from(n: usize) -> Rational {
    if n <= 2 {
        return int(0);
    }
    int(1) - frac(1, 3 * n as i128 - 4)
}

/// Half-open window `[4/(C(n,2)+1), 2 - 2/C(n,2))` where the simple clique is optimal.
pub fn clique_window(n: usize) -> (Rational, Rational) {
    let c = choose2(n);
    (frac(4, c + 1), int(2) - frac(2, c))
}

/// Best-effort family name of an unowned multigraph; `"other"` if none fits.
pub fn family_label(g: &Multigraph) -> String {
    let n = g.n();
    let mult = g.multiplicities();
    let pairs = pair_list(n);
    let c = pairs.len();
    if n >= 2 && mult.iter().all(|&m| (1..=2).contains(&m)) {
        let k = mult.iter().filter(|&&m| m == 2).count();
        return if k == c {
            format!("DG_{n}")
        } else if k == 0 {
            format!("G_{n}")
        } else {
            format!("DG_{{{n},{k}}}")
        };
    }
    let degree = |x: usize| (0..n).filter(|&y| y != x && g.multiplicity(x, y) > 0).count();
    if n >= 3 {
        for hub in 0..n {
            let spokes_double = (0..n).filter(|&y| y != hub).all(|y| g.multiplicity(hub, y) == 2);
            let rest_empty = pairs.iter().all(|&(a, b)| a == hub || b == hub || g.multiplicity(a, b) == 0);
            if spokes_double && rest_empty {
                return format!("DS_{n}");
            }
        }
        if n % 2 == 1 && mult.iter().all(|&m| m <= 1) {
            for hub in 0..n {
                let spokes = (0..n).filter(|&y| y != hub).all(|y| g.multiplicity(hub, y) == 1);
                let matching = (0..n).filter(|&y| y != hub).all(|y| degree(y) == 2);
                if spokes && matching {
                    return format!("F_{n}");
                }
            }
        }
        if mult.iter().all(|&m| m <= 1) && (0..n).all(|x| degree(x) == 2) && g.topology().is_connected() {
            return format!("C_{n}");
        }
    }
    "other".to_string()
}

/// Every finite-cost multigraph on `n` nodes up to `cap`, with its edge count
/// and total expected distance, so optima for many prices come from one pass.
#[derive(Clone, Debug)]
pub struct OptimumTable {
    pub n: usize,
    pub cap: usize,
    entries: Vec<(Multigraph, usize, Rational)>,
}

impl OptimumTable {
    pub fn build(n: usize, cap: usize, budget: u64) -> Result<Self> {
        if n > MAX_NODES {
            return Err(Error::TooManyNodes { n, max: MAX_NODES });
        }
        let pairs = pair_list(n);
        let needed = (cap as u128 + 1).checked_pow(pairs.len() as u32).unwrap_or(u128::MAX);
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let mut entries = Vec::new();
        let mut counts = vec![0u8; pairs.len()];
        let mut t = Topology::from_edges(n, std::iter::empty());
        loop {
            if t.m >= n && t.is_two_edge_connected() {
                let mut dist = Rational::from_integer(0);
                for u in 0..n {
                    match distance_term(&t, CostModel::AdvNcg, u) {
                        ExtCost::Finite(d) => dist += d,
                        ExtCost::Infinite => unreachable!("2-edge-connected graphs have finite cost"),
                    }
                }
                entries.push((Multigraph::from_multiplicities(n, counts.clone()), t.m, dist));
            } else if n == 1 {
                entries.push((Multigraph::from_multiplicities(n, counts.clone()), 0, int(0)));
            }
            let mut i = 0;
            loop {
                if i == counts.len() {
                    return Ok(OptimumTable { n, cap, entries });
                }
                let (u, v) = pairs[i];
                if (counts[i] as usize) < cap {
                    counts[i] += 1;
                    t.add(u, v, 1);
                    break;
                }
                t.remove(u, v, counts[i] as usize);
                counts[i] = 0;
                i += 1;
            }
        }
    }

    /// Number of finite-cost multigraphs.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn optimum(&self, alpha: &Rational) -> OptimumResult {
        let mut best: Option<Rational> = None;
        let mut minimizers = Vec::new();
        for (g, m, dist) in &self.entries {
            let c = alpha * int(*m as i128) + dist;
            match best.as_ref().map(|b| c.cmp(b)) {
                None | Some(std::cmp::Ordering::Less) => {
                    best = Some(c);
                    minimizers.clear();
                    minimizers.push(g.clone());
                }
                Some(std::cmp::Ordering::Equal) => minimizers.push(g.clone()),
                Some(std::cmp::Ordering::Greater) => {}
            }
        }
        OptimumResult { alpha: *alpha, cost: best.map_or(ExtCost::Infinite, ExtCost::Finite), minimizers }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimumResult {
    pub alpha: Rational,
    pub cost: ExtCost,
    pub minimizers: Vec<Multigraph>,
}

impl OptimumResult {
    pub fn min_edges(&self) -> Option<usize> {
        self.minimizers.iter().map(Multigraph::edge_count).min()
    }

    pub fn max_edges(&self) -> Option<usize> {
        self.minimizers.iter().map(Multigraph::edge_count).max()
    }

    /// Distinct family labels of the minimizers, in first-seen order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for g in &self.minimizers {
            let l = family_label(g);
            if !out.contains(&l) {
                out.push(l);
            }
        }
        out
    }
}

/// All social-cost minimizers among multigraphs with multiplicities `<= cap`.
pub fn optimum_bruteforce(n: usize, alpha: &Rational, cap: usize, budget: u64) -> Result<OptimumResult> {
    Ok(OptimumTable::build(n, cap, budget)?.optimum(alpha))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityRow {
    pub alpha: Rational,
    pub cost: ExtCost,
    pub min_edges: usize,
    pub max_edges: usize,
    pub minimizers: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotonicityReport {
    /// `max_edges(alpha_i) >= min_edges(alpha_{i+1})` along the sorted grid.
    pub holds: bool,
    /// `min_edges(alpha_i) >= max_edges(alpha_{i+1})`: every optimum at the
    /// smaller price has at least as many edges as every optimum at the larger.
    pub holds_strongly: bool,
    pub rows: Vec<MonotonicityRow>,
}

pub fn check_edge_monotonicity(n: usize, alphas: &[Rational], cap: usize, budget: u64) -> Result<MonotonicityReport> {
    let table = OptimumTable::build(n, cap, budget)?;
    let mut grid = alphas.to_vec();
    grid.sort();
    grid.dedup();
    let rows: Vec<MonotonicityRow> = grid
        .iter()
        .map(|a| {
            let opt = table.optimum(a);
            MonotonicityRow {
                alpha: *a,
                min_edges: opt.min_edges().unwrap_or(0),
                max_edges: opt.max_edges().unwrap_or(0),
                minimizers: opt.minimizers.len(),
                cost: opt.cost,
            }
        })
        .collect();
    let holds = rows.windows(2).all(|w| w[0].max_edges >= w[1].min_edges);
    let holds_strongly = rows.windows(2).all(|w| w[0].min_edges >= w[1].max_edges);
    Ok(MonotonicityReport { holds, holds_strongly, rows })
}
