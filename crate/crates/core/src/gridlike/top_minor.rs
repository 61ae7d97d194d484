//! Topological `K_p` in a dense graph: a highly connected part, branch
//! candidates with private neighbour sets, and linkages between those sets.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::complete;
use crate::config::Constants;
use crate::error::{Error, Result};
use crate::graph::{min_vertex_cut, Graph, Path, SubdivisionModel, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopMinorStep {
    /// `e(G) >= c_deg p^2 n` fails.
    Density,
    /// No `kappa`-connected part was reached.
    Connected,
    /// Fewer than `p` vertices remain.
    Branches,
    /// Too few linkable neighbours survived.
    Linkable,
    /// No `p` candidates with enough linkable neighbours.
    Indices,
    /// Routing the demanded pairs failed.
    Paths,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopMinorFailure {
    pub step: TopMinorStep,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopMinorReport {
    pub p: usize,
    /// `c_deg p^2 n`.
    pub edges_needed: f64,
    pub density_ok: bool,
    /// Connectivity sought for the dense part, `ceil(c_deg p^2 / 2)`.
    pub kappa: usize,
    pub g1: Option<VertexSet>,
    /// Whether the `3p`, `5p`, `7p^2` sizes fit; otherwise `p - 1`
    /// neighbours per candidate and all of them in `Z`.
    pub full_sizes: bool,
    pub x: Vec<usize>,
    pub z: Vec<usize>,
    pub result: std::result::Result<SubdivisionModel, TopMinorFailure>,
}

impl TopMinorReport {
    pub fn model(&self) -> Option<&SubdivisionModel> {
        self.result.as_ref().ok()
    }
}

pub fn top_minor(g: &Graph, p: usize, cfg: &Constants) -> Result<TopMinorReport> {
    let n = g.n();
    let pp = (p * p) as f64;
    let half = cfg.c_deg * pp / 2.0;
    let mut report = TopMinorReport {
        p,
        edges_needed: cfg.c_deg * pp * n as f64,
        density_ok: false,
        kappa: (half - 1e-9).ceil().max(1.0) as usize,
        g1: None,
        full_sizes: false,
        x: Vec::new(),
        z: Vec::new(),
        result: Err(TopMinorFailure { step: TopMinorStep::Density, reason: String::new() }),
    };
    report.density_ok = g.m() as f64 + 1e-9 >= report.edges_needed;
    if !report.density_ok {
        let reason = format!("{} edges, need {:.1}", g.m(), report.edges_needed);
        report.result = Err(TopMinorFailure { step: TopMinorStep::Density, reason });
        return Ok(report);
    }
    if p <= 1 {
        let branch = (0..p).map(|_| 0).collect();
        report.result = Ok(SubdivisionModel { branch_vertices: branch, edge_paths: Vec::new() });
        return Ok(report);
    }
    let fail = |mut report: TopMinorReport, step, reason: String| {
        report.result = Err(TopMinorFailure { step, reason });
        Ok(report)
    };

    // Highly connected part.
    let g1 = match connected_part(g, half, report.kappa) {
        Some(s) => s,
        None => {
            let reason = format!("no {}-connected part", report.kappa);
            return fail(report, TopMinorStep::Connected, reason);
        }
    };
    let n1 = g1.len();
    report.g1 = Some(g1.clone());
    if n1 < p {
        return fail(report, TopMinorStep::Branches, format!("G1 has {n1} < {p} vertices"));
    }

    // Steps 2 and 3.
    report.full_sizes = 3 * p * (1 + 5 * p) <= n1;
    let (nx, ny, nz) = if report.full_sizes {
        (3 * p, 5 * p, 7 * p * p)
    } else {
        let nx = (n1 / (2 * p)).clamp(p, 3 * p);
        (nx, p - 1, nx * (p - 1))
    };
    let x: Vec<usize> = g1.iter().take(nx).collect();
    let mut g2 = g1.mask(n);
    for &v in &x {
        g2[v] = false;
    }
    let mut taken = vec![false; n];
    let mut y: Vec<Vec<usize>> = vec![Vec::new(); nx];
    for _ in 0..ny {
        for (i, &xi) in x.iter().enumerate() {
            if let Some(&w) = g.neighbors(xi).iter().find(|&&w| g2[w] && !taken[w]) {
                taken[w] = true;
                y[i].push(w);
            }
        }
    }
    report.x = x.clone();

    // Z taken evenly across the Y_i.
    let mut z = Vec::new();
    for round in 0..ny {
        for yi in &y {
            if z.len() < nz {
                if let Some(&w) = yi.get(round) {
                    z.push(w);
                }
            }
        }
    }
    if z.len() <= 12 {
        z = prune_to_linkable(g, &g2, z);
    }

    // Steps 5 and 6, dropping a blocking Z vertex after each routing failure.
    let adj = |a: usize, b: usize| g.has_edge(x[a], x[b]);
    loop {
        report.z = z.clone();
        let zs: Vec<Vec<usize>> = y.iter().map(|yi| yi.iter().copied().filter(|v| z.contains(v)).collect()).collect();
        let Some(chosen) = select_indices(p, &zs, &adj) else {
            let reason = format!("no {p} candidates with enough linkable neighbours");
            return fail(report, TopMinorStep::Indices, reason);
        };
        let mut next = vec![0usize; nx];
        let mut demands = Vec::new();
        let mut ends = Vec::new();
        for a in 0..p {
            for b in a + 1..p {
                let (ja, jb) = (chosen[a], chosen[b]);
                if adj(ja, jb) {
                    continue;
                }
                let za = zs[ja][next[ja]];
                let zb = zs[jb][next[jb]];
                next[ja] += 1;
                next[jb] += 1;
                demands.push((a, b));
                ends.push((za, zb));
            }
        }
        match route(g, &g2, &ends, &[]) {
            Ok(paths) => {
                let mut by_pair = std::collections::BTreeMap::new();
                for ((a, b), path) in demands.into_iter().zip(paths) {
                    by_pair.insert((a, b), path);
                }
                let edge_paths = complete(p)
                    .edges()
                    .map(|(a, b)| {
                        let (xa, xb) = (x[chosen[a]], x[chosen[b]]);
                        let mut vs = vec![xa];
                        if let Some(mid) = by_pair.get(&(a, b)) {
                            vs.extend_from_slice(mid.vertices());
                        }
                        vs.push(xb);
                        ((a, b), Path::new(vs))
                    })
                    .collect();
                let model = SubdivisionModel { branch_vertices: chosen.iter().map(|&j| x[j]).collect(), edge_paths };
                model
                    .validate(g, &complete(p))
                    .map_err(|e| Error::Internal(format!("topological minor check: {e}")))?;
                report.result = Ok(model);
                return Ok(report);
            }
            Err(i) => {
                let blocker = ends[i].0;
                z.retain(|&v| v != blocker);
                if z.is_empty() {
                    return fail(report, TopMinorStep::Paths, "every Z vertex was discarded".into());
                }
            }
        }
    }
}

/// Minimal-style reduction of `g`: while the current part is not
/// `kappa`-connected, replace it by a side of a small cut or drop a
/// minimum-degree vertex, as long as `n1 >= 2h` and `e1 >= 2h(n1 - h)` hold.
fn connected_part(g: &Graph, half: f64, kappa: usize) -> Option<VertexSet> {
    let dense = |s: &VertexSet| {
        let mask = s.mask(g.n());
        let e = s.iter().map(|v| g.neighbors(v).iter().filter(|&&w| mask[w]).count()).sum::<usize>() / 2;
        let n1 = s.len() as f64;
        n1 + 1e-9 >= 2.0 * half && e as f64 + 1e-9 >= 2.0 * half * (n1 - half)
    };
    let mut s = g.all_vertices();
    loop {
        if s.len() <= kappa {
            return None;
        }
        let Some(cut) = small_cut(g, &s, kappa) else { return Some(s) };
        let rest = s.difference(&cut);
        let side = g
            .components_of(&rest)
            .into_iter()
            .map(|c| c.union(&cut))
            .find(|c| dense(c));
        if let Some(c) = side {
            s = c;
            continue;
        }
        let mask = s.mask(g.n());
        let v = s.iter().min_by_key(|&v| (g.neighbors(v).iter().filter(|&&w| mask[w]).count(), v))?;
        let mut smaller = s.clone();
        smaller.remove(v);
        if !dense(&smaller) {
            return None;
        }
        s = smaller;
    }
}

/// A vertex cut of `G[s]` with fewer than `kappa` vertices, if any.
fn small_cut(g: &Graph, s: &VertexSet, kappa: usize) -> Option<VertexSet> {
    if g.components_of(s).len() > 1 {
        return Some(VertexSet::new());
    }
    let mask = s.mask(g.n());
    for a in s.iter().take(kappa) {
        for b in s.iter() {
            if b == a || g.has_edge(a, b) {
                continue;
            }
            if let Some(cut) = min_vertex_cut(g, a, b, &mask) {
                if cut.len() < kappa {
                    return Some(cut);
                }
            }
        }
    }
    None
}

/// Drops blocking vertices until every pairing of `z` routes.
fn prune_to_linkable(g: &Graph, allowed: &[bool], mut z: Vec<usize>) -> Vec<usize> {
    'retry: while z.len() >= 2 {
        let even = z.len() & !1;
        let mut failed = None;
        for_each_pairing(&z[..even], &mut |pairs| {
            if failed.is_none() {
                if let Err(i) = route(g, allowed, pairs, &z) {
                    failed = Some(pairs[i].0);
                }
            }
        });
        match failed {
            Some(v) => {
                z.retain(|&w| w != v);
                continue 'retry;
            }
            None => break,
        }
    }
    z
}

fn for_each_pairing(items: &[usize], f: &mut impl FnMut(&[(usize, usize)])) {
    fn rec(rest: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, f: &mut impl FnMut(&[(usize, usize)])) {
        if rest.is_empty() {
            f(acc);
            return;
        }
        let a = rest.remove(0);
        for i in 0..rest.len() {
            let b = rest.remove(i);
            acc.push((a, b));
            rec(rest, acc, f);
            acc.pop();
            rest.insert(i, b);
        }
        rest.insert(0, a);
    }
    rec(&mut items.to_vec(), &mut Vec::new(), f);
}

/// Chooses `p` candidates, each with at least as many linkable neighbours
/// as chosen partners it is not adjacent to.
fn select_indices(p: usize, zs: &[Vec<usize>], adj: &impl Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn rec(
        start: usize,
        p: usize,
        zs: &[Vec<usize>],
        adj: &impl Fn(usize, usize) -> bool,
        chosen: &mut Vec<usize>,
        budget: &mut usize,
    ) -> bool {
        if chosen.len() == p {
            return true;
        }
        for j in start..zs.len() {
            if *budget == 0 || zs.len() - j < p - chosen.len() {
                return false;
            }
            *budget -= 1;
            chosen.push(j);
            let ok = chosen.iter().all(|&c| {
                let apart = chosen.iter().filter(|&&d| d != c && !adj(c, d)).count();
                apart <= zs[c].len()
            });
            if ok && rec(j + 1, p, zs, adj, chosen, budget) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let mut chosen = Vec::new();
    let mut budget = 100_000;
    rec(0, p, zs, adj, &mut chosen, &mut budget).then_some(chosen)
}

/// Vertex-disjoint paths joining each pair inside `allowed`, avoiding
/// `blocked` away from their own ends. Shortest paths in order; a failing
/// pair moves to the front and the routing restarts, once per pair.
/// `Err(i)` names the pair that could not be routed.
fn route(
    g: &Graph,
    allowed: &[bool],
    pairs: &[(usize, usize)],
    blocked: &[usize],
) -> std::result::Result<Vec<Path>, usize> {
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut last_fail = 0;
    for _ in 0..=pairs.len() {
        let mut used = vec![false; g.n()];
        for &v in blocked {
            used[v] = true;
        }
        for &(a, b) in pairs {
            used[a] = true;
            used[b] = true;
        }
        let mut out = vec![None; pairs.len()];
        let mut failed = None;
        for (pos, &i) in order.iter().enumerate() {
            let (a, b) = pairs[i];
            match bfs(g, allowed, &used, a, b) {
                Some(path) => {
                    for &v in &path {
                        used[v] = true;
                    }
                    out[i] = Some(Path::new(path));
                }
                None => {
                    failed = Some(pos);
                    break;
                }
            }
        }
        match failed {
            None => return Ok(out.into_iter().map(|p| p.expect("routed")).collect()),
            Some(pos) => {
                last_fail = order[pos];
                if pos == 0 {
                    break;
                }
                let i = order.remove(pos);
                order.insert(0, i);
            }
        }
    }
    Err(last_fail)
}

fn bfs(g: &Graph, allowed: &[bool], used: &[bool], a: usize, b: usize) -> Option<Vec<usize>> {
    if a == b {
        return Some(vec![a]);
    }
    let mut prev = vec![usize::MAX; g.n()];
    prev[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            if prev[w] != usize::MAX {
                continue;
            }
            if w == b {
                let mut path = vec![b, v];
                let mut u = v;
                while u != a {
                    u = prev[u];
                    path.push(u);
                }
                path.reverse();
                return Some(path);
            }
            if allowed[w] && !used[w] {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}
