//! Vertex-disjoint paths via unit vertex capacities on a split auxiliary digraph.
//!
//! Every vertex `v` becomes `in(v) -> out(v)`; each undirected edge `uv` becomes
//! `out(u) -> in(v)` and `out(v) -> in(u)`. Augmenting paths are found by BFS that
//! scans arcs in ascending vertex order, so results are reproducible.

use std::collections::VecDeque;

use super::{Graph, Path, VertexSet};
use crate::error::{input, Result};

const INF: u32 = u32::MAX / 4;

struct Arc {
    to: usize,
    cap: u32,
    orig: u32,
    rev: usize,
}

struct Network {
    arcs: Vec<Vec<Arc>>,
    source: usize,
    sink: usize,
}

impl Network {
    fn add(&mut self, from: usize, to: usize, cap: u32) {
        let rf = self.arcs[to].len();
        let rt = self.arcs[from].len();
        self.arcs[from].push(Arc { to, cap, orig: cap, rev: rf });
        self.arcs[to].push(Arc { to: from, cap: 0, orig: 0, rev: rt });
    }

    /// Builds the split network; `cap[v] == 0` removes `v` entirely.
    fn build(g: &Graph, cap: &[u32], sources: &[usize], sinks: &[usize]) -> Self {
        let n = g.n();
        let mut net = Network {
            arcs: (0..2 * n + 2).map(|_| Vec::new()).collect(),
            source: 2 * n,
            sink: 2 * n + 1,
        };
        for &s in sources {
            net.add(net.source, 2 * s, INF);
        }
        for v in 0..n {
            if cap[v] == 0 {
                continue;
            }
            net.add(2 * v, 2 * v + 1, cap[v]);
            for &w in g.neighbors(v) {
                if cap[w] > 0 {
                    net.add(2 * v + 1, 2 * w, INF);
                }
            }
        }
        for &t in sinks {
            net.add(2 * t + 1, net.sink, INF);
        }
        net
    }

    fn augment(&mut self) -> bool {
        let nodes = self.arcs.len();
        let mut prev: Vec<Option<(usize, usize)>> = vec![None; nodes];
        let mut seen = vec![false; nodes];
        seen[self.source] = true;
        let mut queue = VecDeque::from([self.source]);
        while let Some(x) = queue.pop_front() {
            if x == self.sink {
                break;
            }
            for (i, a) in self.arcs[x].iter().enumerate() {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    prev[a.to] = Some((x, i));
                    queue.push_back(a.to);
                }
            }
        }
        if !seen[self.sink] {
            return false;
        }
        let mut bottleneck = INF;
        let mut c = self.sink;
        while let Some((p, i)) = prev[c] {
            bottleneck = bottleneck.min(self.arcs[p][i].cap);
            c = p;
        }
        let mut c = self.sink;
        while let Some((p, i)) = prev[c] {
            self.arcs[p][i].cap -= bottleneck;
            let (to, rev) = (self.arcs[p][i].to, self.arcs[p][i].rev);
            self.arcs[to][rev].cap += bottleneck;
            c = p;
        }
        true
    }

    fn run(&mut self, limit: usize) -> usize {
        let mut flow = 0;
        while flow < limit && self.augment() {
            flow += 1;
        }
        flow
    }

    fn flow_on(&self, x: usize, i: usize) -> u32 {
        let a = &self.arcs[x][i];
        a.orig.saturating_sub(a.cap)
    }

    fn residual_reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.arcs.len()];
        seen[self.source] = true;
        let mut queue = VecDeque::from([self.source]);
        while let Some(x) = queue.pop_front() {
            for a in &self.arcs[x] {
                if a.cap > 0 && !seen[a.to] {
                    seen[a.to] = true;
                    queue.push_back(a.to);
                }
            }
        }
        seen
    }

    /// Decomposes the flow into source-to-sink vertex sequences.
    fn paths(&self, count: usize) -> Vec<Vec<usize>> {
        let mut used: Vec<Vec<u32>> = self
            .arcs
            .iter()
            .enumerate()
            .map(|(x, list)| (0..list.len()).map(|i| self.flow_on(x, i)).collect())
            .collect();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let mut walk = Vec::new();
            let mut x = self.source;
            let mut guard = 0;
            while x != self.sink && guard <= self.arcs.len() * 2 {
                guard += 1;
                let Some(i) = (0..self.arcs[x].len()).find(|&i| used[x][i] > 0) else {
                    break;
                };
                used[x][i] -= 1;
                x = self.arcs[x][i].to;
                if x < self.source && x % 2 == 0 {
                    walk.push(x / 2);
                }
            }
            out.push(walk);
        }
        out
    }
}

/// Result of [`disjoint_paths`]: a maximum path family and a Menger separator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisjointPaths {
    pub paths: Vec<Path>,
    /// Separates `a` from `b`; `|separator| == paths.len()`.
    pub separator: VertexSet,
}

/// Removes cycles from a walk (the flow may route through a vertex only once,
/// but a walk can still revisit vertices through uncapacitated endpoints).
fn simplify_walk(walk: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    for v in walk {
        if let Some(pos) = out.iter().position(|&x| x == v) {
            out.truncate(pos + 1);
        } else {
            out.push(v);
        }
    }
    out
}

/// Maximum family of pairwise vertex-disjoint `a`–`b` paths whose internal
/// vertices avoid `internal_forbidden`, plus a separator of equal size.
///
/// Each returned path meets `a` only in its first vertex and `b` only in its
/// last. A vertex in `a ∩ b` is a trivial one-vertex path and belongs to the
/// separator.
pub fn disjoint_paths(
    g: &Graph,
    a: &VertexSet,
    b: &VertexSet,
    internal_forbidden: &VertexSet,
) -> Result<DisjointPaths> {
    g.check_set(a)?;
    g.check_set(b)?;
    g.check_set(internal_forbidden)?;
    if a.is_empty() || b.is_empty() {
        return input("disjoint_paths needs nonempty endpoint sets");
    }
    if !internal_forbidden.is_disjoint(&a.union(b)) {
        return input("forbidden set meets the endpoint sets");
    }
    let shared = a.intersection(b);
    let mut cap = vec![1u32; g.n()];
    for v in internal_forbidden.iter().chain(shared.iter()) {
        cap[v] = 0;
    }
    let sources: Vec<usize> = a.difference(&shared).into_vec();
    let sinks: Vec<usize> = b.difference(&shared).into_vec();
    let mut net = Network::build(g, &cap, &sources, &sinks);
    let flow = net.run(usize::MAX);

    let a_mask = a.mask(g.n());
    let b_mask = b.mask(g.n());
    let mut paths: Vec<Path> = shared.iter().map(|v| Path::new(vec![v])).collect();
    for walk in net.paths(flow) {
        let walk = simplify_walk(walk);
        let start = walk.iter().rposition(|&v| a_mask[v]).unwrap_or(0);
        let rest = &walk[start..];
        let end = rest.iter().position(|&v| b_mask[v]).unwrap_or(rest.len() - 1);
        paths.push(Path::new(rest[..=end].to_vec()));
    }
    paths.sort();

    let reach = net.residual_reachable();
    let mut sep: Vec<usize> = shared.into_vec();
    for v in 0..g.n() {
        if cap[v] > 0 && reach[2 * v] && !reach[2 * v + 1] {
            sep.push(v);
        }
    }
    let separator = VertexSet::from(sep);
    debug_assert_eq!(separator.len(), paths.len());
    Ok(DisjointPaths { paths, separator })
}

/// Minimum vertex cut separating `s` from `t` that contains neither; `None`
/// when they are adjacent (no such cut exists).
pub fn min_vertex_cut(g: &Graph, s: usize, t: usize, allowed: &[bool]) -> Option<VertexSet> {
    if s == t || g.has_edge(s, t) {
        return None;
    }
    let mut cap: Vec<u32> = allowed.iter().map(|&ok| u32::from(ok)).collect();
    cap[s] = INF;
    cap[t] = INF;
    let mut net = Network::build(g, &cap, &[s], &[t]);
    net.run(usize::MAX);
    let reach = net.residual_reachable();
    Some(
        (0..g.n())
            .filter(|&v| cap[v] == 1 && reach[2 * v] && !reach[2 * v + 1])
            .collect(),
    )
}
