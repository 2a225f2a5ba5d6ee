//! `advncg`: batch experiments for the adversary network creation game.
//!
//! Every subcommand prints a table (CSV with a header row, or JSON lines)
//! on stdout. Rationals appear as `p/q` plus a `-decimal` column with 12
//! significant digits; infinite costs print as `inf`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 parse error,
//! 4 search budget exceeded, 5 precondition violated.

mod output;

use std::io::{self, Read};
use std::process::ExitCode;
use std::str::FromStr;

use advncg::dynamics::{run_dynamics, verify_replay, DynamicsOutcome, DynamicsRun, Policy, Schedule, TraceStep};
use advncg::families::{build_family, partial_double_window, FamilySpec, OptimumTable};
use advncg::graph::io::parse_graph;
use advncg::hardness::{min_mk_cds_bruteforce, verify_reduction_identity, SimpleGraph};
use advncg::moves::{best_response_exact, is_nash_equilibrium, Move};
use advncg::poa::{poa_cell_exhaustive, poa_cell_sampled, PoAGridCell};
use advncg::rational::{int, parse_alpha};
use advncg::structure::structure_report;
use advncg::{agent_cost, social_cost, CostModel, Error, ExtCost, GameConfig, OwnedMultiGraph, Rational};
use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{cost, list, opt_cost, opt_rat, pair_header, rat, Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Parse { .. } | Error::BadNumber(_)) => 3,
            Failure::Core(Error::BudgetExceeded { .. }) => 4,
            Failure::Core(_) => 5,
            Failure::Usage(_) => 2,
            Failure::Io(_) | Failure::Csv(_) | Failure::Json(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(name = "advncg", version, about = "Exact experiments for the adversary network creation game")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,
    /// Candidate limit for any single exhaustive search.
    #[arg(long, env = "ADVNCG_BUDGET", default_value_t = advncg::DEFAULT_BUDGET, global = true)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

/// Price, cost model and multiplicity cap.
#[derive(Args, Clone)]
struct Game {
    /// Edge price: `p/q`, integer, decimal (converted exactly), `1e-3` or `10^6`.
    #[arg(long, value_parser = alpha_arg)]
    alpha: Rational,
    /// adv-ncg, ncg or kliemann.
    #[arg(long, default_value = "adv-ncg")]
    model: CostModel,
    /// Maximum parallel edges per node pair.
    #[arg(long, default_value_t = 2)]
    cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Per-agent and social cost of a network.
    Eval {
        /// Graph file, `-` for stdin, or a family name such as `dg3`, `c4`, `ds-5`.
        graph: String,
        #[command(flatten)]
        game: Game,
        /// Only report this agent (the social row is always printed).
        #[arg(long)]
        agent: Option<usize>,
    },
    /// Exact best response of one agent.
    Br {
        graph: String,
        #[command(flatten)]
        game: Game,
        #[arg(long)]
        agent: usize,
    },
    /// Equilibrium test with an improving deviation as witness.
    NeCheck {
        graph: String,
        #[command(flatten)]
        game: Game,
    },
    /// Sequential improving-move dynamics; the trace goes to stdout, the
    /// outcome to stderr.
    Dynamics {
        /// Starting network: graph file, `-` or family name.
        #[arg(long)]
        start: String,
        #[command(flatten)]
        game: Game,
        #[arg(long, value_enum, default_value_t = PolicyArg::BestResponse)]
        policy: PolicyArg,
        #[arg(long, value_enum, default_value_t = ScheduleArg::RoundRobin)]
        schedule: ScheduleArg,
        /// Seed for the random schedule.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        max_steps: u64,
    },
    /// Social optimum over all multigraphs on `n` nodes, per price.
    OptSweep {
        #[arg(long)]
        n: usize,
        /// Comma-separated prices, or `partial-double-windows` for the
        /// midpoints of the windows where a clique with `k` doubled pairs is
        /// optimal, `k = 1..C(n,2)-1`.
        #[arg(long)]
        alpha_grid: String,
        #[arg(long, default_value_t = 2)]
        cap: usize,
    },
    /// Price of anarchy and stability per price.
    Poa {
        #[arg(long)]
        n: usize,
        /// Comma-separated prices.
        #[arg(long)]
        alpha_grid: String,
        #[arg(long, default_value_t = 2)]
        cap: usize,
        /// Bounds from family witnesses and random states instead of a full census.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bridges, 2-cut-edges and diameters.
    Structure { graph: String },
    /// Minimum `k`-dominating `m`-connected set of the underlying simple graph.
    Domset {
        graph: String,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Also check that adding a universal vertex raises the minimum
        /// (1,2) set size to the domination number plus one.
        #[arg(long)]
        verify_reduction: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    BestResponse,
    FirstImproving,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    RoundRobin,
    Random,
    Adversarial,
}

fn alpha_arg(s: &str) -> Result<Rational, String> {
    parse_alpha(s).map_err(|e| e.to_string())
}

impl Game {
    fn config(&self, budget: u64) -> Result<GameConfig, Failure> {
        Ok(GameConfig::new(self.alpha, self.model, self.cap)?.with_budget(budget))
    }
}

/// A file path, `-` for stdin, or a family name.
fn load_graph(source: &str, cap: usize) -> Result<OwnedMultiGraph, Failure> {
    let text = if source == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Some(s)
    } else if std::path::Path::new(source).exists() {
        Some(std::fs::read_to_string(source)?)
    } else {
        None
    };
    let g = match text {
        Some(t) => parse_graph(&t)?,
        None => {
            let spec = FamilySpec::from_str(source)
                .map_err(|_| Failure::Usage(format!("{source:?} is neither a file nor a family name")))?;
            build_family(&spec)?
        }
    };
    g.check_cap(cap)?;
    Ok(g)
}

fn alpha_grid(text: &str, n: usize) -> Result<Vec<Rational>, Failure> {
    if matches!(text, "partial-double-windows" | "lemma2-windows") {
        let c = n * n.saturating_sub(1) / 2;
        return Ok((1..c).filter_map(|k| partial_double_window(n, k)).map(|(lo, hi)| (lo + hi) / int(2)).collect());
    }
    let grid = text.split(',').map(parse_alpha).collect::<Result<Vec<_>, _>>()?;
    if grid.is_empty() {
        return Err(Failure::Usage("empty alpha grid".into()));
    }
    Ok(grid)
}

/// Integral values without the `/1`.
fn whole(c: &ExtCost) -> String {
    match c {
        ExtCost::Finite(r) if r.is_integer() => r.numer().to_string(),
        other => other.exact(),
    }
}

fn header(parts: &[&[String]]) -> Vec<String> {
    parts.concat()
}

fn s(x: impl ToString) -> Vec<String> {
    vec![x.to_string()]
}

fn eval(g: &OwnedMultiGraph, cfg: &GameConfig, only: Option<usize>) -> Result<Table, Failure> {
    let mut t = Table::new(&header(&[&s("scope"), &s("edges"), &pair_header("distance"), &pair_header("cost")]));
    if let Some(a) = only.filter(|&a| a >= g.n()) {
        return Err(Error::NodeOutOfRange { node: a, n: g.n() }.into());
    }
    let mut total_distance = ExtCost::zero();
    for a in 0..g.n() {
        let owned = g.owned_count(a);
        let c = agent_cost(g, cfg, a)?;
        let d = match &c {
            ExtCost::Finite(r) => ExtCost::Finite(r - cfg.alpha * int(owned as i128)),
            ExtCost::Infinite => ExtCost::Infinite,
        };
        total_distance += d.clone();
        if only.is_none_or(|x| x == a) {
            t.push([s(a), s(owned), cost(&d).to_vec(), cost(&c).to_vec()].concat());
        }
    }
    let sc = social_cost(g, cfg);
    t.push([s("social"), s(g.edge_count()), cost(&total_distance).to_vec(), cost(&sc).to_vec()].concat());
    Ok(t)
}

fn br(g: &OwnedMultiGraph, cfg: &GameConfig, agent: usize) -> Result<Table, Failure> {
    let mut t = Table::new(&header(&[
        &["agent", "current-strategy", "best-strategy", "move-kind", "move-detail"].map(String::from),
        &pair_header("current-cost"),
        &pair_header("best-cost"),
        &pair_header("gain"),
        &["improving", "ties"].map(String::from),
    ]));
    if agent >= g.n() {
        return Err(Error::NodeOutOfRange { node: agent, n: g.n() }.into());
    }
    let r = best_response_exact(g, cfg, agent)?;
    let current = g.strategy_of(agent);
    let (kind, detail) = if r.improving {
        let m = Move::classify(&current, &r.strategy);
        (m.kind().to_string(), m.detail())
    } else {
        ("none".to_string(), String::new())
    };
    let gain = r.gain();
    t.push(
        [
            vec![agent.to_string(), list(&current), list(&r.strategy), kind, detail],
            cost(&r.current_cost).to_vec(),
            cost(&r.cost).to_vec(),
            opt_rat(gain.as_ref()).to_vec(),
            vec![r.improving.to_string(), r.ties.to_string()],
        ]
        .concat(),
    );
    Ok(t)
}

fn ne_check(g: &OwnedMultiGraph, cfg: &GameConfig) -> Result<Table, Failure> {
    let mut t = Table::new(&header(&[
        &["is-nash", "agent", "strategy", "move-kind", "move-detail"].map(String::from),
        &pair_header("current-cost"),
        &pair_header("new-cost"),
        &pair_header("delta"),
    ]));
    let v = is_nash_equilibrium(g, cfg)?;
    let row = match &v.witness {
        None => [s(true), vec![String::new(); 4], vec![String::new(); 6]].concat(),
        Some(w) => {
            let m = w.as_move(g);
            let delta = match w.delta() {
                Some(d) => rat(&d).to_vec(),
                None => vec!["inf".into(), "inf".into()],
            };
            [
                vec![false.to_string(), w.agent.to_string(), list(&w.strategy), m.kind().into(), m.detail()],
                cost(&w.current_cost).to_vec(),
                cost(&w.new_cost).to_vec(),
                delta,
            ]
            .concat()
        }
    };
    t.push(row);
    Ok(t)
}

fn dynamics(run: &DynamicsRun, cfg: &GameConfig) -> Result<Table, Failure> {
    let report = run_dynamics(run, cfg)?;
    let mut t = Table::new(&TraceStep::HEADER);
    for step in &report.trace {
        t.push(step.record().to_vec());
    }
    let summary = match &report.outcome {
        DynamicsOutcome::Converged { steps, .. } => format!("converged after {steps} steps"),
        DynamicsOutcome::CycleDetected { key, start, length } => {
            let exact = verify_replay(&report, cfg.cap)?;
            format!("cycle of length {length} from step {start} (state {}), replay exact: {exact}", key.hash_hex())
        }
        DynamicsOutcome::BudgetExhausted { steps } => format!("budget-exhausted after {steps} steps"),
    };
    eprintln!("outcome: {summary}");
    Ok(t)
}

fn opt_sweep(n: usize, grid: &[Rational], cap: usize, budget: u64) -> Result<Table, Failure> {
    let table = OptimumTable::build(n, cap, budget)?;
    let mut t = Table::new(&header(&[
        &pair_header("alpha"),
        &pair_header("opt-cost"),
        &["edge-count", "minimizer-count", "family-label"].map(String::from),
    ]));
    for alpha in grid {
        let opt = table.optimum(alpha);
        let edges = match (opt.min_edges(), opt.max_edges()) {
            (Some(lo), Some(hi)) if lo == hi => lo.to_string(),
            (Some(lo), Some(hi)) => format!("{lo}..{hi}"),
            _ => String::new(),
        };
        t.push(
            [
                rat(alpha).to_vec(),
                cost(&opt.cost).to_vec(),
                vec![edges, opt.minimizers.len().to_string(), opt.labels().join(";")],
            ]
            .concat(),
        );
    }
    Ok(t)
}

/// Cells are computed on worker threads and assembled in grid order.
fn poa(n: usize, grid: &[Rational], cfg: &GameConfig, sampled: Option<(u64, u64)>) -> Result<Table, Failure> {
    let workers = std::thread::available_parallelism().map_or(1, |p| p.get()).min(grid.len()).max(1);
    let mut cells: Vec<Option<advncg::Result<PoAGridCell>>> = vec![None; grid.len()];
    std::thread::scope(|scope| {
        for (w, chunk) in cells.chunks_mut(grid.len().div_ceil(workers)).enumerate() {
            let offset = w * grid.len().div_ceil(workers);
            scope.spawn(move || {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    let cfg = GameConfig { alpha: grid[offset + i], ..cfg.clone() };
                    *slot = Some(match sampled {
                        Some((samples, seed)) => poa_cell_sampled(n, &cfg, samples, seed),
                        None => poa_cell_exhaustive(n, &cfg),
                    });
                }
            });
        }
    });
    let mut t = Table::new(&header(&[
        &s("n"),
        &pair_header("alpha"),
        &pair_header("opt-cost"),
        &pair_header("worst-ne-cost"),
        &pair_header("best-ne-cost"),
        &pair_header("poa"),
        &pair_header("pos"),
        &["ne-count", "search-complete"].map(String::from),
        &pair_header("poa-lower-bound"),
        &pair_header("pos-upper-bound"),
    ]));
    for c in cells {
        let c = c.expect("every cell computed")?;
        t.push(
            [
                s(c.n),
                rat(&c.alpha).to_vec(),
                cost(&c.opt_cost).to_vec(),
                opt_cost(c.worst_ne_cost.as_ref()).to_vec(),
                opt_cost(c.best_ne_cost.as_ref()).to_vec(),
                opt_rat(c.poa.as_ref()).to_vec(),
                opt_rat(c.pos.as_ref()).to_vec(),
                vec![c.ne_count.to_string(), c.search_complete.to_string()],
                opt_rat(c.poa_lower_bound.as_ref()).to_vec(),
                opt_rat(c.pos_upper_bound.as_ref()).to_vec(),
            ]
            .concat(),
        );
    }
    Ok(t)
}

fn structure(g: &OwnedMultiGraph) -> Table {
    let r = structure_report(g);
    let mut t = Table::new(&[
        "n",
        "edges",
        "two-edge-connected",
        "bridge-count",
        "bridges",
        "two-cut-edge-count",
        "two-cut-edges",
        "diameter",
        "worst-post-deletion-diameter",
    ]);
    let ids = |v: &[advncg::EdgeId]| v.iter().map(|e| e.0.to_string()).collect::<Vec<_>>().join(" ");
    t.push(vec![
        r.n.to_string(),
        r.edges.to_string(),
        r.two_edge_connected.to_string(),
        r.bridges.len().to_string(),
        ids(&r.bridges),
        r.two_cut_edges.len().to_string(),
        ids(&r.two_cut_edges),
        whole(&r.diameter),
        whole(&r.worst_post_deletion_diameter),
    ]);
    t
}

fn domset(g: &SimpleGraph, m: usize, k: usize, verify: bool, budget: u64) -> Result<Table, Failure> {
    let mut cols = vec!["m", "k", "size", "set"];
    if verify {
        cols.extend(["domination-number", "dominating-set", "universal-cds-size", "universal-cds", "holds"]);
    }
    let mut t = Table::new(&cols);
    let set = min_mk_cds_bruteforce(g, m, k, budget)?;
    let mut row = vec![m.to_string(), k.to_string(), set.len().to_string(), list(&set)];
    if verify {
        let r = verify_reduction_identity(g, budget)?;
        row.extend([
            r.domination_number.to_string(),
            list(&r.dominating_set),
            r.cds_size.to_string(),
            list(&r.cds),
            r.holds.to_string(),
        ]);
    }
    t.push(row);
    Ok(t)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let budget = cli.budget;
    let table = match cli.command {
        Command::Eval { graph, game, agent } => eval(&load_graph(&graph, game.cap)?, &game.config(budget)?, agent)?,
        Command::Br { graph, game, agent } => br(&load_graph(&graph, game.cap)?, &game.config(budget)?, agent)?,
        Command::NeCheck { graph, game } => ne_check(&load_graph(&graph, game.cap)?, &game.config(budget)?)?,
        Command::Dynamics { start, game, policy, schedule, seed, max_steps } => {
            let policy = match policy {
                PolicyArg::BestResponse => Policy::BestResponse,
                PolicyArg::FirstImproving => Policy::FirstImproving,
            };
            let schedule = match schedule {
                ScheduleArg::RoundRobin => Schedule::RoundRobin,
                ScheduleArg::Random => Schedule::UniformRandom { seed },
                ScheduleArg::Adversarial => Schedule::ExhaustiveAdversarial,
            };
            let run = DynamicsRun::new(load_graph(&start, game.cap)?, schedule, policy, max_steps);
            dynamics(&run, &game.config(budget)?)?
        }
        Command::OptSweep { n, alpha_grid: grid, cap } => opt_sweep(n, &alpha_grid(&grid, n)?, cap, budget)?,
        Command::Poa { n, alpha_grid: grid, cap, sampled, samples, seed } => {
            let cfg = GameConfig::new(int(0), CostModel::AdvNcg, cap)?.with_budget(budget);
            poa(n, &alpha_grid(&grid, n)?, &cfg, sampled.then_some((samples, seed)))?
        }
        Command::Structure { graph } => structure(&load_graph(&graph, usize::MAX)?),
        Command::Domset { graph, m, k, verify_reduction } => {
            let g = SimpleGraph::from_multigraph(&load_graph(&graph, usize::MAX)?);
            domset(&g, m, k, verify_reduction, budget)?
        }
    };
    table.write(cli.format, io::stdout().lock())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
