//! Dichotomy driver for subgraph-monotone parameters: a perfect bramble whose
//! union forces the parameter above `k`, or an exact value computed over a
//! tree decomposition.

mod dp;
mod nice;

pub use dp::{longest_path_width_dp, vc_width_dp, PATH_WIDTH_CAP, VC_WIDTH_CAP};

use serde::{Deserialize, Serialize};

use crate::config::Constants;
use crate::decomposition::{approximate_treewidth, exact_treewidth, TreeDecomposition};
use crate::error::{input, Error, Result};
use crate::graph::{Graph, Path, VertexSet};
use crate::perfect::{bounded_degree_subgraph, PerfectBramble};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Solution {
    Cover(VertexSet),
    Path(Path),
}

impl Solution {
    /// Re-checks the witness and returns the value it certifies.
    pub fn value_in(&self, g: &Graph) -> Option<usize> {
        match self {
            Solution::Cover(c) => {
                let ok = g.check_set(c).is_ok() && g.edges().all(|(u, v)| c.contains(u) || c.contains(v));
                ok.then_some(c.len())
            }
            Solution::Path(p) if p.is_empty() => (g.n() == 0).then_some(0),
            Solution::Path(p) => p.is_valid_in(g).then_some(p.edge_len()),
        }
    }
}

/// `pi(H) >= c * m^alpha` on the union `H` of a perfect bramble with `m`
/// elements, in its declared asymptotic form. `guaranteed` is the exact
/// bound the driver relies on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrambleBound {
    pub c: f64,
    pub alpha: f64,
    /// Structural facts the bound is derived from.
    pub basis: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct ParameterPlugin {
    pub name: &'static str,
    pub subgraph_monotone: bool,
    pub bound: BrambleBound,
    /// Guaranteed value on the union of a perfect bramble with this many elements.
    pub guaranteed: fn(usize) -> usize,
    pub width_solver: fn(&Graph, &TreeDecomposition) -> Result<(usize, Solution)>,
}

impl ParameterPlugin {
    pub fn vertex_cover() -> Self {
        ParameterPlugin {
            name: "vertex-cover",
            subgraph_monotone: true,
            bound: BrambleBound { c: 0.25, alpha: 2.0, basis: "at least m(m-2) edges, maximum degree 4" },
            guaranteed: |m| (m * m.saturating_sub(2)).div_ceil(4),
            width_solver: |g, td| vc_width_dp(g, td).map(|(v, c)| (v, Solution::Cover(c))),
        }
    }

    pub fn longest_path() -> Self {
        ParameterPlugin {
            name: "longest-path",
            subgraph_monotone: true,
            bound: BrambleBound { c: 0.5, alpha: 1.0, basis: "connected union of treewidth at least ceil(m/2) - 1" },
            // A graph whose longest path has L edges has treewidth at most L.
            guaranteed: |m| m.div_ceil(2).saturating_sub(1),
            width_solver: |g, td| longest_path_width_dp(g, td).map(|(v, p)| (v, Solution::Path(p))),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "vc" | "vertex-cover" => Ok(Self::vertex_cover()),
            "longest-path" | "lp" => Ok(Self::longest_path()),
            _ => input(format!("unknown parameter {name:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum Verdict {
    /// `pi(G) >= pi(H) >= guaranteed > k` with `H` the union of the bramble.
    Exceeds { guaranteed: usize, bramble: PerfectBramble },
    Exact { value: usize, solution: Solution },
    /// The decomposition found is too wide for the solver.
    BeyondSolver { width: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyResult {
    pub parameter: String,
    pub k: usize,
    /// Bramble order attempted; `None` when no order can beat `k`.
    pub order_tried: Option<usize>,
    /// Why the bramble branch did not fire.
    pub bramble_note: Option<String>,
    pub verdict: Verdict,
    pub decomposition_used: Option<TreeDecomposition>,
}

impl DichotomyResult {
    /// `Some(true)` when `pi(G) <= k` is established, `Some(false)` when refuted.
    pub fn at_most_k(&self) -> Option<bool> {
        match &self.verdict {
            Verdict::Exceeds { .. } => Some(false),
            Verdict::Exact { value, .. } => Some(*value <= self.k),
            Verdict::BeyondSolver { .. } => None,
        }
    }
}

/// Largest order tried before the driver gives up on the bramble branch.
const MAX_ORDER: usize = 64;

/// Decides `pi(G) <= k`.
pub fn decide(g: &Graph, plugin: &ParameterPlugin, k: usize, cfg: &Constants, seed: u64) -> Result<DichotomyResult> {
    if !plugin.subgraph_monotone {
        return input(format!("{} is not declared subgraph-monotone", plugin.name));
    }
    let order = (1..=MAX_ORDER).find(|&l| (plugin.guaranteed)(2 * l) > k);
    let mut result = DichotomyResult {
        parameter: plugin.name.into(),
        k,
        order_tried: order,
        bramble_note: None,
        verdict: Verdict::BeyondSolver { width: 0, limit: 0 },
        decomposition_used: None,
    };
    match order {
        None => result.bramble_note = Some(format!("no order up to {MAX_ORDER} beats k")),
        Some(l) => match bounded_degree_subgraph(g, l, cfg, seed) {
            Ok(r) => match r.bramble {
                Some(pb) => {
                    let guaranteed = (plugin.guaranteed)(pb.len());
                    if guaranteed <= k {
                        return Err(Error::Internal(format!("bramble of {} elements guarantees only {guaranteed}", pb.len())));
                    }
                    result.verdict = Verdict::Exceeds { guaranteed, bramble: pb };
                    return Ok(result);
                }
                None => result.bramble_note = Some(format!("no perfect bramble of order {l}: {}", outcome_name(&r.pipeline.outcome))),
            },
            Err(e @ Error::Internal(_)) => return Err(e),
            Err(e) => result.bramble_note = Some(format!("no perfect bramble of order {l}: {e}")),
        },
    }
    let td = best_decomposition(g, cfg)?;
    result.verdict = match (plugin.width_solver)(g, &td) {
        Ok((value, solution)) => {
            if solution.value_in(g) != Some(value) {
                return Err(Error::Internal(format!("{} witness does not certify {value}", plugin.name)));
            }
            Verdict::Exact { value, solution }
        }
        Err(Error::Capacity { limit, .. }) => Verdict::BeyondSolver { width: td.width, limit },
        Err(e) => return Err(e),
    };
    result.decomposition_used = Some(td);
    Ok(result)
}

fn outcome_name(o: &crate::gridlike::PipelineOutcome) -> String {
    use crate::gridlike::PipelineOutcome::*;
    match o {
        GridLike { minor, .. } => format!("grid-like minor of order {} only", minor.order),
        Clique { .. } => "clique model too small".into(),
        Failed(f) => format!("pipeline failed at {:?}: {}", f.stage, f.reason),
    }
}

/// Narrowest of: exact (small graphs), the separator-based approximation,
/// and a min-degree elimination.
pub fn best_decomposition(g: &Graph, cfg: &Constants) -> Result<TreeDecomposition> {
    let mut best = heuristic_decomposition(g);
    match exact_treewidth(g, cfg) {
        Ok((_, td)) => return Ok(if td.width <= best.width { td } else { best }),
        Err(Error::Capacity { .. }) => {}
        Err(e) => return Err(e),
    }
    if g.n() > 0 {
        let (_, td) = approximate_treewidth(g, cfg)?;
        if td.width < best.width {
            best = td;
        }
    }
    Ok(best)
}

/// Min-degree elimination on the fill graph.
pub fn heuristic_decomposition(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    let mut fill: Vec<std::collections::BTreeSet<usize>> =
        (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (fill[v].len(), v)).expect("vertex left");
        let nb: Vec<usize> = fill[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            fill[a].remove(&v);
            for &b in &nb[i + 1..] {
                fill[a].insert(b);
                fill[b].insert(a);
            }
        }
        alive[v] = false;
        order.push(v);
    }
    TreeDecomposition::from_elimination_order(g, &order)
}
