use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("node {node} out of range for a graph on {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(usize),
    #[error("owner {owner} is not an endpoint of edge ({u}, {v})")]
    OwnerNotEndpoint { u: usize, v: usize, owner: usize },
    #[error("pair ({u}, {v}) would carry {multiplicity} edges, cap is {cap}")]
    CapExceeded { u: usize, v: usize, multiplicity: usize, cap: usize },
    #[error("multiplicity cap must be at least 1")]
    ZeroCap,
    #[error("graphs are limited to {max} nodes, got {n}")]
    TooManyNodes { n: usize, max: usize },
    #[error("agent {agent} owns no edge towards {target}")]
    NotOwner { agent: usize, target: usize },
    #[error("invalid move: {0}")]
    InvalidMove(String),
    #[error("search space of {needed} candidates exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("graph is not 2-edge-connected")]
    NotTwoEdgeConnected,
    #[error("edge {0} is not a 2-cut-edge")]
    NotTwoCutEdge(usize),
    #[error("edge index {index} out of range ({len} edges)")]
    EdgeOutOfRange { index: usize, len: usize },
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("unsupported connectivity m = {0} (only 1 and 2)")]
    UnsupportedConnectivity(usize),
    #[error("no feasible set exists")]
    Infeasible,
    #[error("alpha window is empty for |E| = {0}")]
    WindowEmpty(usize),
    #[error("negative edge price {0}")]
    NegativeAlpha(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cannot parse number {0:?}")]
    BadNumber(String),
}
