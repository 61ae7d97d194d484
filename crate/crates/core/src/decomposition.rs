//! Tree decompositions: validation, an exact subset-DP oracle for small
//! graphs, and a width bracket derived from the separator-based driver.

use serde::{Deserialize, Serialize};

use crate::config::Constants;
use crate::error::{Error, Result};
use crate::graph::{forest_is_connected, Graph, VertexSet};
use crate::separators::doubling_driver;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    /// Edges of the decomposition tree over nodes `0..bags.len()`.
    pub tree_edges: Vec<(usize, usize)>,
    pub bags: Vec<VertexSet>,
    /// Largest bag size minus one; zero when every bag is empty.
    pub width: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DecompositionViolation {
    #[error("decomposition tree is not a tree")]
    NotATree,
    #[error("bag {0} contains a vertex outside the graph")]
    BagOutOfRange(usize),
    #[error("vertex {0} appears in no bag")]
    VertexUncovered(usize),
    #[error("edge {0}-{1} is covered by no bag")]
    EdgeUncovered(usize, usize),
    #[error("bags containing vertex {0} do not form a subtree")]
    NotConnected(usize),
    #[error("stored width {stored} differs from actual {actual}")]
    WrongWidth { stored: usize, actual: usize },
}

impl TreeDecomposition {
    /// Builds a decomposition and fills in its width.
    pub fn new(tree_edges: Vec<(usize, usize)>, bags: Vec<VertexSet>) -> Self {
        let width = Self::width_of(&bags);
        TreeDecomposition { tree_edges, bags, width }
    }

    fn width_of(bags: &[VertexSet]) -> usize {
        bags.iter().map(VertexSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn single_bag(g: &Graph) -> Self {
        Self::new(Vec::new(), vec![g.all_vertices()])
    }

    pub fn tree(&self) -> Result<Graph> {
        Graph::new(self.bags.len(), &self.tree_edges)
    }

    /// Checks the three decomposition conditions and the stored width.
    pub fn validate(&self, g: &Graph) -> std::result::Result<(), DecompositionViolation> {
        let nodes: VertexSet = (0..self.bags.len()).collect();
        let tree_ok = !self.bags.is_empty()
            && self.tree_edges.len() + 1 == self.bags.len()
            && self
                .tree_edges
                .iter()
                .all(|&(a, b)| a != b && a < self.bags.len() && b < self.bags.len())
            && forest_is_connected(&nodes, &self.tree_edges);
        if !tree_ok {
            return Err(DecompositionViolation::NotATree);
        }
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
        for (i, bag) in self.bags.iter().enumerate() {
            if g.check_set(bag).is_err() {
                return Err(DecompositionViolation::BagOutOfRange(i));
            }
            for v in bag.iter() {
                holders[v].push(i);
            }
        }
        if let Some(v) = holders.iter().position(Vec::is_empty) {
            return Err(DecompositionViolation::VertexUncovered(v));
        }
        for (u, v) in g.edges() {
            if !self.bags.iter().any(|b| b.contains(u) && b.contains(v)) {
                return Err(DecompositionViolation::EdgeUncovered(u, v));
            }
        }
        for (v, hs) in holders.iter().enumerate() {
            let set = VertexSet::from(hs.clone());
            let sub: Vec<(usize, usize)> = self
                .tree_edges
                .iter()
                .copied()
                .filter(|&(a, b)| set.contains(a) && set.contains(b))
                .collect();
            if !forest_is_connected(&set, &sub) {
                return Err(DecompositionViolation::NotConnected(v));
            }
        }
        let actual = Self::width_of(&self.bags);
        if actual != self.width {
            return Err(DecompositionViolation::WrongWidth { stored: self.width, actual });
        }
        Ok(())
    }

    /// Decomposition from an elimination order (first eliminated first).
    pub fn from_elimination_order(g: &Graph, order: &[usize]) -> Self {
        let n = g.n();
        if n == 0 {
            return Self::new(Vec::new(), vec![VertexSet::new()]);
        }
        let mut pos = vec![0; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let mut fill: Vec<std::collections::BTreeSet<usize>> =
            (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
        let mut bags = Vec::with_capacity(n);
        let mut parent = vec![None; n];
        for (i, &v) in order.iter().enumerate() {
            let higher: Vec<usize> = fill[v].iter().copied().filter(|&w| pos[w] > i).collect();
            for (x, &a) in higher.iter().enumerate() {
                for &b in &higher[x + 1..] {
                    fill[a].insert(b);
                    fill[b].insert(a);
                }
            }
            parent[i] = higher.iter().map(|&w| pos[w]).min();
            let mut bag = higher;
            bag.push(v);
            bags.push(VertexSet::from_iter_unsorted(bag));
        }
        let mut edges = Vec::with_capacity(n - 1);
        let mut last_root: Option<usize> = None;
        for i in 0..n {
            match parent[i] {
                Some(p) => edges.push((i, p)),
                None => {
                    if let Some(r) = last_root {
                        edges.push((r, i));
                    }
                    last_root = Some(i);
                }
            }
        }
        Self::new(edges, bags)
    }
}

/// Exact treewidth by dynamic programming over vertex subsets.
///
/// `TW(S) = min_{v in S} max(TW(S - v), |Q(S - v, v)|)` where `Q(S, v)` is the
/// set of vertices outside `S ∪ {v}` reachable from `v` through `S`.
pub fn exact_treewidth(g: &Graph, cfg: &Constants) -> Result<(usize, TreeDecomposition)> {
    let n = g.n();
    if n > cfg.exact_tw_cap || n > 25 {
        return Err(Error::Capacity {
            what: "vertices for exact treewidth",
            limit: cfg.exact_tw_cap.min(25),
            actual: n,
        });
    }
    if n == 0 {
        return Ok((0, TreeDecomposition::from_elimination_order(g, &[])));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let q = |s: u32, v: usize| -> u32 {
        // Component of v in G[s ∪ {v}], then its outside neighbourhood.
        let mut comp = 1u32 << v;
        let mut frontier = comp;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let x = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= adj[x];
            }
            next &= s & !comp;
            comp |= next;
            frontier = next;
        }
        let mut out = 0u32;
        let mut c = comp;
        while c != 0 {
            let x = c.trailing_zeros() as usize;
            c &= c - 1;
            out |= adj[x];
        }
        (out & !comp & !s).count_ones()
    };
    let size = 1usize << n;
    let mut tw = vec![u8::MAX; size];
    let mut choice = vec![0u8; size];
    tw[0] = 0;
    for s in 1..size as u32 {
        let mut best = u8::MAX;
        let mut arg = 0u8;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            let prev = tw[rest as usize];
            if prev >= best {
                continue;
            }
            let val = prev.max(q(rest, v) as u8);
            if val < best {
                best = val;
                arg = v as u8;
            }
        }
        tw[s as usize] = best;
        choice[s as usize] = arg;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let v = choice[s as usize] as usize;
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    let td = TreeDecomposition::from_elimination_order(g, &order);
    let width = tw[full as usize] as usize;
    if td.width != width {
        return Err(Error::Internal(format!(
            "elimination order gives width {} but the table says {width}",
            td.width
        )));
    }
    Ok((width, td))
}

/// Upper bound `k1` from a constructed decomposition plus the conditional
/// lower figure `k2 = floor(k1 / (c0 * sqrt(log2 k1)))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WidthBracket {
    pub k1: usize,
    pub k2: usize,
    pub c0: f64,
    /// `k2` holds only if the configured `c0` is valid for the underlying
    /// approximation; it is never certified.
    pub conditional: bool,
}

impl WidthBracket {
    pub fn from_k1(k1: usize, c0: f64) -> Self {
        let k2 = if k1 < 2 {
            k1
        } else {
            let denom = c0 * (k1 as f64).log2().sqrt();
            ((k1 as f64) / denom).floor() as usize
        };
        WidthBracket { k1, k2: k2.min(k1), c0, conditional: true }
    }
}

pub fn approximate_treewidth(g: &Graph, cfg: &Constants) -> Result<(WidthBracket, TreeDecomposition)> {
    let outcome = doubling_driver(g, cfg)?;
    let td = outcome.decomposition;
    Ok((WidthBracket::from_k1(td.width, cfg.c0), td))
}
