//! Maximum concurrent vertex flow between terminal pairs.
//!
//! Flows are symmetric: the flow from `v` to `u` is the reversal of the flow
//! from `u` to `v`, and a vertex is charged once per unordered pair. Exact
//! rational LP on small instances, multiplicative weights otherwise.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Constants;
use crate::error::{input, Error, Result};
use crate::graph::{Graph, Path, VertexSet};
use crate::lp::{int, Cmp, Lp, LpOutcome};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathFlow {
    pub from: usize,
    pub to: usize,
    pub path: Path,
    pub amount: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcurrentFlow {
    pub w: VertexSet,
    pub value: f64,
    /// Rational optimum when the LP was solved exactly.
    pub exact_value: Option<String>,
    /// One entry per path, `from < to`.
    pub path_flows: Vec<PathFlow>,
}

const TOL: f64 = 1e-9;

impl ConcurrentFlow {
    /// Re-sums every pair and every vertex from the path flows.
    pub fn validate(&self, g: &Graph) -> std::result::Result<(), String> {
        let mut pair: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut load = vec![0.0f64; g.n()];
        for pf in &self.path_flows {
            if !(pf.from < pf.to && self.w.contains(pf.from) && self.w.contains(pf.to)) {
                return Err(format!("bad terminal pair ({}, {})", pf.from, pf.to));
            }
            if !pf.path.is_valid_in(g) || pf.path.first() != Some(pf.from) || pf.path.last() != Some(pf.to) {
                return Err(format!("path for ({}, {}) is not a simple path between them", pf.from, pf.to));
            }
            if !(pf.amount.is_finite() && pf.amount > 0.0) {
                return Err("path amounts must be positive".into());
            }
            *pair.entry((pf.from, pf.to)).or_default() += pf.amount;
            for &v in pf.path.vertices() {
                load[v] += pf.amount;
            }
        }
        if let Some(v) = (0..g.n()).find(|&v| load[v] > 1.0 + TOL) {
            return Err(format!("vertex {v} carries {}", load[v]));
        }
        let ws = self.w.as_slice();
        for i in 0..ws.len() {
            for j in i + 1..ws.len() {
                let got = pair.get(&(ws[i], ws[j])).copied().unwrap_or(0.0);
                if (got - self.value).abs() > TOL * self.value.max(1.0) {
                    return Err(format!("pair ({}, {}) carries {got}, expected {}", ws[i], ws[j], self.value));
                }
            }
        }
        Ok(())
    }

    /// Paths and amounts between one pair, in either orientation.
    pub fn paths_between(&self, u: usize, v: usize) -> Vec<(Path, f64)> {
        self.path_flows
            .iter()
            .filter(|pf| (pf.from, pf.to) == (u.min(v), u.max(v)))
            .map(|pf| {
                let p = if u <= v { pf.path.clone() } else { pf.path.reversed() };
                (p, pf.amount)
            })
            .collect()
    }
}

pub fn max_concurrent_flow(g: &Graph, w: &VertexSet, cfg: &Constants) -> Result<ConcurrentFlow> {
    g.check_set(w)?;
    if w.len() < 2 {
        return input("concurrent flow needs at least two terminals");
    }
    let comp = g.components_of(&g.all_vertices());
    let same = comp.iter().any(|c| w.is_subset(c));
    if !same {
        return Ok(ConcurrentFlow { w: w.clone(), value: 0.0, exact_value: None, path_flows: Vec::new() });
    }
    let t = w.len();
    let arcs = 2 * g.m();
    let cols = 1 + (t - 1) * arcs + g.n();
    let rows = (t - 1) * g.n() + g.n();
    if rows.saturating_mul(cols) <= cfg.exact_flow_budget {
        exact(g, w)
    } else {
        approximate(g, w, cfg.flow_delta)
    }
}

fn exact(g: &Graph, w: &VertexSet) -> Result<ConcurrentFlow> {
    let ws = w.as_slice();
    let t = ws.len();
    let arcs: Vec<(usize, usize)> = g.edges().flat_map(|(a, b)| [(a, b), (b, a)]).collect();
    // var[c][a]: commodity c (source ws[c]) on arc a; None on arcs into the source.
    let mut var = vec![vec![None; arcs.len()]; t - 1];
    let mut n_vars = 1;
    for (c, row) in var.iter_mut().enumerate() {
        for (a, &(_, head)) in arcs.iter().enumerate() {
            if head != ws[c] {
                row[a] = Some(n_vars);
                n_vars += 1;
            }
        }
    }
    let mut lp = Lp::new(n_vars);
    lp.objective = vec![(0, int(1))];
    let mut load: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); g.n()];
    for c in 0..t - 1 {
        let mut cons: Vec<Vec<(usize, BigRational)>> = vec![Vec::new(); g.n()];
        for (a, &(tail, head)) in arcs.iter().enumerate() {
            let Some(x) = var[c][a] else { continue };
            cons[head].push((x, int(1)));
            cons[tail].push((x, int(-1)));
            load[head].push((x, int(1)));
            if tail == ws[c] {
                load[tail].push((x, int(1)));
            }
        }
        for (u, mut row) in cons.into_iter().enumerate() {
            if u == ws[c] {
                continue;
            }
            if ws[c + 1..].contains(&u) {
                row.push((0, int(-1)));
            }
            if !row.is_empty() {
                lp.add_row(row, Cmp::Eq, int(0));
            }
        }
    }
    for row in load.into_iter().filter(|r| !r.is_empty()) {
        lp.add_row(row, Cmp::Le, int(1));
    }
    let (eps, x) = match lp.solve() {
        LpOutcome::Optimal { value, x } => (value, x),
        other => return Err(Error::Internal(format!("flow LP returned {other:?}"))),
    };
    let mut path_flows = Vec::new();
    for c in 0..t - 1 {
        let mut f: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
        for (a, &arc) in arcs.iter().enumerate() {
            if let Some(i) = var[c][a] {
                if x[i].is_positive() {
                    f.insert(arc, x[i].clone());
                }
            }
        }
        cancel_cycles(&mut f);
        for &y in &ws[c + 1..] {
            let mut demand = eps.clone();
            while demand.is_positive() {
                let (path, amount) = peel(&f, ws[c], y, &demand)?;
                for e in path.windows(2) {
                    let left = f.get_mut(&(e[0], e[1])).expect("on support");
                    *left -= &amount;
                    if left.is_zero() {
                        f.remove(&(e[0], e[1]));
                    }
                }
                demand -= &amount;
                path_flows.push(PathFlow {
                    from: ws[c],
                    to: y,
                    path: Path::new(path),
                    amount: amount.to_f64().unwrap_or(0.0),
                });
            }
        }
    }
    Ok(ConcurrentFlow {
        w: w.clone(),
        value: eps.to_f64().unwrap_or(0.0),
        exact_value: Some(eps.to_string()),
        path_flows,
    })
}

/// Walks back from `y` along positive arcs until the source is reached.
fn peel(
    f: &BTreeMap<(usize, usize), BigRational>,
    source: usize,
    y: usize,
    demand: &BigRational,
) -> Result<(Vec<usize>, BigRational)> {
    let mut rev = vec![y];
    let mut amount = demand.clone();
    let mut cur = y;
    while cur != source {
        let (&(tail, _), val) = f
            .iter()
            .find(|(&(_, h), _)| h == cur)
            .ok_or_else(|| Error::Internal("flow decomposition lost conservation".into()))?;
        if val < &amount {
            amount = val.clone();
        }
        cur = tail;
        rev.push(cur);
        if rev.len() > f.len() + 1 {
            return Err(Error::Internal("cycle survived cancellation".into()));
        }
    }
    rev.reverse();
    Ok((rev, amount))
}

/// Removes directed cycles from the support, lowering flow along each.
fn cancel_cycles(f: &mut BTreeMap<(usize, usize), BigRational>) {
    loop {
        let Some(cycle) = find_cycle(f) else { return };
        let m = cycle
            .windows(2)
            .map(|e| f[&(e[0], e[1])].clone())
            .min()
            .expect("cycle has arcs");
        for e in cycle.windows(2) {
            let v = f.get_mut(&(e[0], e[1])).expect("on cycle");
            *v -= &m;
            if v.is_zero() {
                f.remove(&(e[0], e[1]));
            }
        }
    }
}

/// A closed walk `v0 .. v0` in the support, if any.
fn find_cycle(f: &BTreeMap<(usize, usize), BigRational>) -> Option<Vec<usize>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in f.keys() {
        out.entry(a).or_default().push(b);
    }
    // 0 unseen, 1 on stack, 2 done
    let mut color: BTreeMap<usize, u8> = BTreeMap::new();
    let starts: Vec<usize> = out.keys().copied().collect();
    for s in starts {
        if color.get(&s).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(s, 0)];
        color.insert(s, 1);
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let next = out.get(&v).and_then(|n| n.get(*i)).copied();
            *i += 1;
            match next {
                None => {
                    color.insert(v, 2);
                    stack.pop();
                }
                Some(u) => match color.get(&u).copied().unwrap_or(0) {
                    0 => {
                        color.insert(u, 1);
                        stack.push((u, 0));
                    }
                    1 => {
                        let pos = stack.iter().position(|&(x, _)| x == u).expect("on stack");
                        let mut cyc: Vec<usize> = stack[pos..].iter().map(|&(x, _)| x).collect();
                        cyc.push(u);
                        return Some(cyc);
                    }
                    _ => {}
                },
            }
        }
    }
    None
}

/// Garg-Koenemann style multiplicative weights on vertex lengths, then
/// rescaled to be feasible and trimmed so every pair carries the same value.
fn approximate(g: &Graph, w: &VertexSet, e: f64) -> Result<ConcurrentFlow> {
    let n = g.n();
    let ws = w.as_slice();
    let big_l = n as f64;
    let delta = (1.0 + e) / ((1.0 + e) * big_l).powf(1.0 / e);
    let mut len = vec![delta; n];
    let mut routed: BTreeMap<(usize, usize, Vec<usize>), f64> = BTreeMap::new();
    let mut load = vec![0.0f64; n];
    let mut phases = 0usize;
    let max_phases = 20_000;
    while len.iter().sum::<f64>() < 1.0 && phases < max_phases {
        for (i, &x) in ws.iter().enumerate() {
            let parent = dijkstra(g, x, &len);
            for &y in &ws[i + 1..] {
                let mut p = vec![y];
                let mut cur = y;
                while cur != x {
                    cur = parent[cur].ok_or_else(|| Error::Internal("terminal unreachable".into()))?;
                    p.push(cur);
                }
                p.reverse();
                for &v in &p {
                    load[v] += 1.0;
                    len[v] *= 1.0 + e;
                }
                *routed.entry((x, y, p)).or_default() += 1.0;
            }
        }
        phases += 1;
    }
    let max_load = load.iter().cloned().fold(0.0, f64::max);
    if max_load <= 0.0 {
        return Err(Error::Internal("no flow routed".into()));
    }
    // Every pair was routed once per phase, so each carries `phases`.
    let value = phases as f64 / max_load;
    let path_flows = routed
        .into_iter()
        .map(|((from, to, p), amt)| PathFlow { from, to, path: Path::new(p), amount: amt / max_load })
        .collect();
    Ok(ConcurrentFlow { w: w.clone(), value, exact_value: None, path_flows })
}

/// Shortest-path tree from `s` where a path costs the sum of its vertex lengths.
fn dijkstra(g: &Graph, s: usize, len: &[f64]) -> Vec<Option<usize>> {
    let n = g.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    dist[s] = len[s];
    for _ in 0..n {
        let Some(v) = (0..n).filter(|&v| !done[v] && dist[v].is_finite()).min_by(|&a, &b| {
            dist[a].partial_cmp(&dist[b]).expect("finite").then(a.cmp(&b))
        }) else {
            break;
        };
        done[v] = true;
        for &u in g.neighbors(v) {
            let d = dist[v] + len[u];
            if d < dist[u] {
                dist[u] = d;
                parent[u] = Some(v);
            }
        }
    }
    parent
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from(v.to_vec())
    }

    #[test]
    fn path_endpoints() {
        let g = generate(GraphKind::Path(3)).unwrap();
        let f = max_concurrent_flow(&g, &vs(&[0, 2]), &Constants::default()).unwrap();
        assert_eq!(f.exact_value.as_deref(), Some("1"));
        assert_eq!(f.path_flows.len(), 1);
        assert_eq!(f.paths_between(2, 0)[0].0.vertices(), &[2, 1, 0]);
        f.validate(&g).unwrap();
    }

    #[test]
    fn complete_graph_bracket() {
        let g = generate(GraphKind::Complete(4)).unwrap();
        let w = g.all_vertices();
        let f = max_concurrent_flow(&g, &w, &Constants::default()).unwrap();
        f.validate(&g).unwrap();
        // Each vertex meets three pairs and direct edges are optimal.
        assert_eq!(f.exact_value.as_deref(), Some("1/3"));
        assert!(f.value >= 1.0 / 4.0);
    }

    #[test]
    fn split_terminals_give_zero() {
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let f = max_concurrent_flow(&g, &vs(&[0, 3]), &Constants::default()).unwrap();
        assert_eq!(f.value, 0.0);
        assert!(f.path_flows.is_empty());
    }

    #[test]
    fn cycle_needs_decomposition() {
        // Two routes around a 6-cycle share the load of opposite terminals.
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        let f = max_concurrent_flow(&g, &vs(&[0, 3]), &Constants::default()).unwrap();
        assert_eq!(f.exact_value.as_deref(), Some("1"));
        f.validate(&g).unwrap();
    }

    #[test]
    fn approximation_is_feasible_and_close() {
        let g = generate(GraphKind::Grid(4)).unwrap();
        let w = vs(&[0, 3, 12, 15, 5]);
        let exact_f = max_concurrent_flow(&g, &w, &Constants::default()).unwrap();
        let cfg = Constants { exact_flow_budget: 0, ..Constants::default() };
        let approx_f = max_concurrent_flow(&g, &w, &cfg).unwrap();
        assert!(approx_f.exact_value.is_none());
        approx_f.validate(&g).unwrap();
        exact_f.validate(&g).unwrap();
        assert!(approx_f.value <= exact_f.value + 1e-9);
        assert!(approx_f.value >= exact_f.value / (1.0 + 3.0 * cfg.flow_delta));
    }

    #[test]
    fn validator_catches_overload() {
        let g = generate(GraphKind::Path(3)).unwrap();
        let mut f = max_concurrent_flow(&g, &vs(&[0, 2]), &Constants::default()).unwrap();
        f.path_flows[0].amount = 1.5;
        f.value = 1.5;
        assert!(f.validate(&g).is_err());
    }
}
