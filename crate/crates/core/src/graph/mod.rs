//! Undirected simple graphs and the primitives every other module builds on.
//!
//! Vertices are `0..n`. Graphs are immutable after construction; derived graphs
//! ([`Graph::induced`]) carry an explicit mapping back to the host identifiers.
//! All set-valued outputs are sorted and ties are broken by the smallest vertex.

mod flow;
mod generate;
pub mod io;
mod model;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

pub use flow::{disjoint_paths, min_vertex_cut, DisjointPaths};
pub use generate::{generate, GraphKind};
pub use model::{MinorModel, ModelViolation, SubdivisionModel};

/// Sorted, duplicate-free set of vertex identifiers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    /// Builds a set from arbitrary vertices, sorting and deduplicating.
    pub fn from_iter_unsorted<I: IntoIterator<Item = usize>>(it: I) -> Self {
        let mut v: Vec<usize> = it.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }

    pub fn singleton(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn insert(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: usize) -> bool {
        match self.0.binary_search(&v) {
            Ok(pos) => {
                self.0.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        Self::from_iter_unsorted(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| other.contains(v)).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(self.iter().filter(|&v| !other.contains(v)).collect())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    /// Number of members of `self` that lie in `other`.
    pub fn count_in(&self, other: &VertexSet) -> usize {
        self.iter().filter(|&v| other.contains(v)).count()
    }

    /// Boolean membership mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for v in self.iter() {
            if v < n {
                m[v] = true;
            }
        }
        m
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::from_iter_unsorted(iter)
    }
}

impl From<Vec<usize>> for VertexSet {
    fn from(v: Vec<usize>) -> Self {
        Self::from_iter_unsorted(v)
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// An ordered sequence of distinct vertices, consecutive ones adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<usize>);

impl Path {
    /// Wraps a vertex sequence without checking it; use [`Path::is_valid_in`].
    pub fn new(vertices: Vec<usize>) -> Self {
        Self(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Length in edges.
    pub fn edge_len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet::from_iter_unsorted(self.0.iter().copied())
    }

    pub fn reversed(&self) -> Path {
        let mut v = self.0.clone();
        v.reverse();
        Path(v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    /// Nonempty, distinct vertices, every step an edge of `g`.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        if self.0.is_empty() || self.0.iter().any(|&v| v >= g.n()) {
            return false;
        }
        let set = self.vertex_set();
        set.len() == self.0.len() && self.edges().all(|(a, b)| g.has_edge(a, b))
    }
}

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return input(format!("edge ({u},{v}) out of range for n={n}"));
            }
            if u == v {
                return input(format!("self-loop at {u}"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return input(format!("duplicate edge at vertex {v}"));
            }
        }
        Ok(Self {
            adj,
            m: edges.len(),
        })
    }

    /// Like [`Graph::new`] but silently drops duplicates; loops still rejected.
    pub fn from_edges_dedup(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(u, v)| if u < v { (u, v) } else { (v, u) })
            .collect();
        norm.sort_unstable();
        norm.dedup();
        Self::new(n, &norm)
    }

    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<usize> {
        0..self.n()
    }

    pub fn all_vertices(&self) -> VertexSet {
        VertexSet((0..self.n()).collect())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_set(&self, u: &VertexSet) -> Result<()> {
        match u.iter().find(|&v| v >= self.n()) {
            Some(v) => input(format!("vertex {v} out of range for n={}", self.n())),
            None => Ok(()),
        }
    }

    /// `G[u]` relabeled to `0..|u|`; the returned map sends new ids to host ids.
    pub fn induced(&self, u: &VertexSet) -> Result<(Graph, Vec<usize>)> {
        self.check_set(u)?;
        let map: Vec<usize> = u.iter().collect();
        let mut back = vec![usize::MAX; self.n()];
        for (i, &v) in map.iter().enumerate() {
            back[v] = i;
        }
        let mut edges = Vec::new();
        for (i, &v) in map.iter().enumerate() {
            for &w in &self.adj[v] {
                let j = back[w];
                if j != usize::MAX && j > i {
                    edges.push((i, j));
                }
            }
        }
        Ok((Graph::new(map.len(), &edges)?, map))
    }

    /// Same vertex set, with every edge inside `within` removed.
    pub fn without_edges_inside(&self, within: &VertexSet) -> Graph {
        let mask = within.mask(self.n());
        let edges: Vec<_> = self.edges().filter(|&(u, v)| !(mask[u] && mask[v])).collect();
        Graph::new(self.n(), &edges).expect("subgraph of a simple graph is simple")
    }

    /// Vertices adjacent to `set` but not in it.
    pub fn neighborhood(&self, set: &VertexSet) -> VertexSet {
        let mask = set.mask(self.n());
        set.iter()
            .flat_map(|v| self.adj[v].iter().copied())
            .filter(|&w| !mask[w])
            .collect()
    }

    /// Connected components of `G - removed`, each sorted, ordered by minimum member.
    pub fn components(&self, removed: &VertexSet) -> Vec<VertexSet> {
        let allowed: Vec<bool> = {
            let mask = removed.mask(self.n());
            mask.iter().map(|b| !b).collect()
        };
        self.components_within(&allowed)
    }

    /// Components of the subgraph induced by the `allowed` mask.
    pub fn components_within(&self, allowed: &[bool]) -> Vec<VertexSet> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if !allowed[s] || seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if allowed[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(VertexSet(comp));
        }
        out
    }

    /// Components of `G[u]`.
    pub fn components_of(&self, u: &VertexSet) -> Vec<VertexSet> {
        self.components_within(&u.mask(self.n()))
    }

    /// Whether `G[u]` is connected. The empty set is not connected.
    pub fn is_connected_set(&self, u: &VertexSet) -> bool {
        !u.is_empty() && self.components_of(u).len() == 1
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.components(&VertexSet::new()).len() == 1
    }

    /// Shortest path inside `allowed` from any vertex of `from` to any vertex of
    /// `to`, scanning neighbours in ascending order.
    pub fn bfs_path(&self, from: &VertexSet, to: &VertexSet, allowed: &[bool]) -> Option<Path> {
        let n = self.n();
        let target = to.mask(n);
        let mut prev = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for s in from.iter().filter(|&s| allowed[s]) {
            seen[s] = true;
            queue.push_back(s);
        }
        while let Some(v) = queue.pop_front() {
            if target[v] {
                let mut p = vec![v];
                let mut c = v;
                while prev[c] != usize::MAX {
                    c = prev[c];
                    p.push(c);
                }
                p.reverse();
                return Some(Path(p));
            }
            for &w in &self.adj[v] {
                if allowed[w] && !seen[w] {
                    seen[w] = true;
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Whether the edge list `edges` over vertex set `vs` forms a tree.
    pub fn is_tree_on(&self, vs: &VertexSet, edges: &[(usize, usize)]) -> bool {
        if vs.is_empty() || edges.len() + 1 != vs.len() {
            return false;
        }
        if edges
            .iter()
            .any(|&(a, b)| !vs.contains(a) || !vs.contains(b) || !self.has_edge(a, b))
        {
            return false;
        }
        forest_is_connected(vs, edges)
    }
}

/// Connectivity of an explicit edge list over `vs` (union-find).
pub(crate) fn forest_is_connected(vs: &VertexSet, edges: &[(usize, usize)]) -> bool {
    let idx = |v: usize| vs.as_slice().binary_search(&v).ok();
    let mut parent: Vec<usize> = (0..vs.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    let mut comps = vs.len();
    for &(a, b) in edges {
        let (Some(ia), Some(ib)) = (idx(a), idx(b)) else {
            return false;
        };
        let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}
