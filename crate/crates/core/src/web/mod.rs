//! k-webs: sub-cubic trees with flat terminal sets pairwise linked through a
//! body that meets the tree only in those terminals.

mod preweb;
mod split;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{Graph, Path, VertexSet};

pub use preweb::{build_web_or_decomposition, web_or_quadratic_decomposition, PreWeb, WebOrDecomposition, WebRun};
pub use split::split_flat_subtrees;

/// A tree given by its vertices and edges, both in host identifiers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeGraph {
    pub vertices: VertexSet,
    /// Normalised `(min, max)`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl TreeGraph {
    pub fn singleton(v: usize) -> Self {
        TreeGraph { vertices: VertexSet::singleton(v), edges: Vec::new() }
    }

    pub fn from_parts(vertices: VertexSet, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        edges.sort_unstable();
        edges.dedup();
        TreeGraph { vertices, edges }
    }

    pub fn degrees(&self) -> BTreeMap<usize, usize> {
        let mut d: BTreeMap<usize, usize> = self.vertices.iter().map(|v| (v, 0)).collect();
        for &(a, b) in &self.edges {
            *d.entry(a).or_default() += 1;
            *d.entry(b).or_default() += 1;
        }
        d
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn adjacency(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut adj: BTreeMap<usize, Vec<usize>> = self.vertices.iter().map(|v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        adj
    }

    /// A tree of `g` with maximum degree at most 3.
    pub fn is_subcubic_tree_in(&self, g: &Graph) -> bool {
        g.check_set(&self.vertices).is_ok()
            && g.is_tree_on(&self.vertices, &self.edges)
            && self.degrees().values().all(|&d| d <= 3)
    }

    pub fn is_flat(&self, x: &VertexSet) -> bool {
        let d = self.degrees();
        x.iter().all(|v| d.get(&v).is_some_and(|&k| k <= 2))
    }

    /// Restriction to `vs`; a subtree when `vs` induces a connected part.
    pub fn restrict(&self, vs: &VertexSet) -> TreeGraph {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| vs.contains(a) && vs.contains(b))
            .collect();
        TreeGraph { vertices: vs.clone(), edges }
    }

    /// Smallest subtree containing `keep`, by pruning leaves outside it.
    pub fn minimal_subtree(&self, keep: &VertexSet) -> TreeGraph {
        let mut adj = self.adjacency();
        let mut queue: Vec<usize> = adj
            .iter()
            .filter(|(v, n)| n.len() <= 1 && !keep.contains(**v))
            .map(|(v, _)| *v)
            .collect();
        while let Some(v) = queue.pop() {
            if adj.len() <= 1 || keep.contains(v) {
                continue;
            }
            let Some(nbrs) = adj.remove(&v) else { continue };
            for u in nbrs {
                let list = adj.get_mut(&u).expect("symmetric");
                list.retain(|&x| x != v);
                if list.len() <= 1 && !keep.contains(u) {
                    queue.push(u);
                }
            }
        }
        let vertices: VertexSet = adj.keys().copied().collect();
        self.restrict(&vertices)
    }

    pub fn union(&self, other: &TreeGraph) -> TreeGraph {
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().copied());
        TreeGraph::from_parts(self.vertices.union(&other.vertices), edges)
    }

    pub fn add_path(&self, p: &[usize]) -> TreeGraph {
        let mut edges = self.edges.clone();
        edges.extend(p.windows(2).map(|w| (w[0], w[1])));
        TreeGraph::from_parts(self.vertices.union(&VertexSet::from_iter_unsorted(p.iter().copied())), edges)
    }
}

/// `(T, (T_i), (A_i), B)` together with `k` linkage paths for each pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KWeb {
    pub k: usize,
    pub t: TreeGraph,
    pub subtrees: Vec<VertexSet>,
    pub flats: Vec<VertexSet>,
    pub body: VertexSet,
    /// `((i, j), paths)` for `i < j`, each path running from `A_i` to `A_j`.
    pub linkages: Vec<((usize, usize), Vec<Path>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WebViolation {
    #[error("T is not a sub-cubic tree of the graph")]
    NotSubcubicTree,
    #[error("need as many flats as subtrees")]
    Shape,
    #[error("subtree {0} is not a connected part of T")]
    BadSubtree(usize),
    #[error("subtrees {0} and {1} overlap")]
    SubtreesOverlap(usize, usize),
    #[error("A_{0} is not a flat subset of T_{0}")]
    BadFlat(usize),
    #[error("body meets T outside the flats")]
    BodyMismatch,
    #[error("pair ({0}, {1}) has the wrong number of linkage paths")]
    LinkageCount(usize, usize),
    #[error("linkage path of pair ({0}, {1}) is invalid")]
    BadLinkage(usize, usize),
    #[error("linkage paths of pair ({0}, {1}) intersect")]
    LinkagesOverlap(usize, usize),
}

impl KWeb {
    pub fn order(&self) -> usize {
        self.subtrees.len()
    }

    pub fn validate(&self, g: &Graph) -> std::result::Result<(), WebViolation> {
        use WebViolation::*;
        if !self.t.is_subcubic_tree_in(g) {
            return Err(NotSubcubicTree);
        }
        let h = self.subtrees.len();
        if self.flats.len() != h {
            return Err(Shape);
        }
        for (i, st) in self.subtrees.iter().enumerate() {
            if !st.is_subset(&self.t.vertices) || !g.is_tree_on(st, &self.t.restrict(st).edges) {
                return Err(BadSubtree(i));
            }
            for j in 0..i {
                if !st.is_disjoint(&self.subtrees[j]) {
                    return Err(SubtreesOverlap(j, i));
                }
            }
            if !self.flats[i].is_subset(st) || !self.t.is_flat(&self.flats[i]) {
                return Err(BadFlat(i));
            }
        }
        let all_flats = self.flats.iter().fold(VertexSet::new(), |acc, a| acc.union(a));
        if g.check_set(&self.body).is_err() || self.body.intersection(&self.t.vertices) != all_flats {
            return Err(BodyMismatch);
        }
        let expected: Vec<(usize, usize)> = (0..h).flat_map(|i| (i + 1..h).map(move |j| (i, j))).collect();
        let got: Vec<(usize, usize)> = self.linkages.iter().map(|(ij, _)| *ij).collect();
        if got != expected {
            return Err(Shape);
        }
        for ((i, j), paths) in &self.linkages {
            let (i, j) = (*i, *j);
            if paths.len() != self.k {
                return Err(LinkageCount(i, j));
            }
            let mut used = VertexSet::new();
            for p in paths {
                let vs = p.vertices();
                let ok = p.is_valid_in(g)
                    && vs.len() >= 2
                    && self.flats[i].contains(vs[0])
                    && self.flats[j].contains(vs[vs.len() - 1])
                    && vs.iter().all(|&v| self.body.contains(v))
                    && vs[1..vs.len() - 1].iter().all(|&v| !self.t.vertices.contains(v));
                if !ok {
                    return Err(BadLinkage(i, j));
                }
                let ps = p.vertex_set();
                if !used.is_disjoint(&ps) {
                    return Err(LinkagesOverlap(i, j));
                }
                used = used.union(&ps);
            }
        }
        Ok(())
    }

    /// Linkage family between `i` and `j`, oriented from `A_i` to `A_j`.
    pub fn paths_between(&self, i: usize, j: usize) -> Vec<Path> {
        let (a, b) = (i.min(j), i.max(j));
        let fam = self
            .linkages
            .iter()
            .find(|(ij, _)| *ij == (a, b))
            .map(|(_, p)| p.clone())
            .unwrap_or_default();
        if i < j {
            fam
        } else {
            fam.iter().map(Path::reversed).collect()
        }
    }
}

/// Treewidth lower bound `min(k, h) - 1` from the largest `(k'+1)`-web of
/// order `k'+1` contained in a valid web.
pub fn web_width_lower_bound(g: &Graph, web: &KWeb) -> Result<usize> {
    if let Err(v) = web.validate(g) {
        return input(format!("invalid web: {v}"));
    }
    Ok(web.k.min(web.order()).saturating_sub(1))
}
