//! Growing a pre-web until it covers the graph or a k-web appears.

use serde::{Deserialize, Serialize};

use super::{split_flat_subtrees, KWeb, TreeGraph};
use crate::decomposition::TreeDecomposition;
use crate::error::{input, Error, Result};
use crate::graph::{disjoint_paths, Graph, Path, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WebOrDecomposition {
    Web(KWeb),
    Decomposition(TreeDecomposition),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WebRun {
    pub outcome: WebOrDecomposition,
    /// `|U|` after every step, per connected component of the input.
    pub domain_sizes: Vec<usize>,
}

/// A component of `G - U` with its tree and the node whose bag holds `N(C)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTree {
    pub component: VertexSet,
    pub tree: TreeGraph,
    pub node: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreWeb {
    pub u: VertexSet,
    /// Decomposition of `G[U]` in host identifiers.
    pub decomposition: TreeDecomposition,
    pub component_trees: Vec<ComponentTree>,
}

impl PreWeb {
    /// All pre-web conditions, recomputed from the raw sets.
    pub fn validate(&self, g: &Graph, k: usize, h: usize) -> std::result::Result<(), String> {
        let l = 2 * k * h;
        let (gu, map) = g.induced(&self.u).map_err(|e| e.to_string())?;
        let local = |v: usize| map.binary_search(&v).map_err(|_| format!("bag vertex {v} outside U"));
        let bags = self
            .decomposition
            .bags
            .iter()
            .map(|b| b.iter().map(local).collect::<std::result::Result<VertexSet, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        TreeDecomposition::new(self.decomposition.tree_edges.clone(), bags)
            .validate(&gu)
            .map_err(|e| format!("decomposition of G[U]: {e}"))?;
        if self.decomposition.width + 2 > l + k {
            return Err(format!("width {} exceeds l + k - 2", self.decomposition.width));
        }
        let comps = g.components(&self.u);
        let listed: Vec<&VertexSet> = self.component_trees.iter().map(|c| &c.component).collect();
        let mut sorted = listed.clone();
        sorted.sort();
        if sorted != comps.iter().collect::<Vec<_>>() {
            return Err("component list does not match G - U".into());
        }
        for ct in &self.component_trees {
            let c = &ct.component;
            let x = g.neighborhood(c);
            if !ct.tree.is_subcubic_tree_in(g) || !ct.tree.vertices.is_disjoint(c) {
                return Err(format!("tree of component at {:?} is not a sub-cubic tree avoiding it", c.first()));
            }
            let bag_ok = self.decomposition.bags.get(ct.node).is_some_and(|b| x.is_subset(b));
            if !bag_ok {
                return Err("no recorded bag holds N(C)".into());
            }
            if !x.is_subset(&ct.tree.vertices) || !ct.tree.is_flat(&x) {
                return Err("N(C) is not flat in its tree".into());
            }
            if !x.iter().any(|v| ct.tree.degree(v) <= 1) {
                return Err("tree has no leaf in N(C)".into());
            }
        }
        Ok(())
    }
}

/// Either a `k`-web of order `h` or a tree decomposition of width at most
/// `(2h + 1)k - 2`. With `debug_validate`, every intermediate pre-web is
/// re-checked.
pub fn build_web_or_decomposition(g: &Graph, k: usize, h: usize, debug_validate: bool) -> Result<WebRun> {
    if k == 0 || h == 0 {
        return input("k and h must be positive");
    }
    let comps = g.components(&VertexSet::new());
    if comps.is_empty() {
        let td = TreeDecomposition::new(Vec::new(), vec![VertexSet::new()]);
        return Ok(WebRun { outcome: WebOrDecomposition::Decomposition(td), domain_sizes: Vec::new() });
    }
    let mut domain_sizes = Vec::new();
    let mut edges = Vec::new();
    let mut bags: Vec<VertexSet> = Vec::new();
    for comp in comps {
        let (sub, map) = g.induced(&comp)?;
        let lift = |s: &VertexSet| VertexSet::from_iter_unsorted(s.iter().map(|v| map[v]));
        let lift_path = |p: &Path| Path::new(p.vertices().iter().map(|&v| map[v]).collect());
        match Run::new(&sub, k, h, debug_validate).finish(&mut domain_sizes)? {
            WebOrDecomposition::Web(w) => {
                let web = KWeb {
                    k: w.k,
                    t: TreeGraph::from_parts(lift(&w.t.vertices), w.t.edges.iter().map(|&(a, b)| (map[a], map[b])).collect()),
                    subtrees: w.subtrees.iter().map(lift).collect(),
                    flats: w.flats.iter().map(lift).collect(),
                    body: lift(&w.body),
                    linkages: w
                        .linkages
                        .iter()
                        .map(|(ij, ps)| (*ij, ps.iter().map(lift_path).collect()))
                        .collect(),
                };
                return Ok(WebRun { outcome: WebOrDecomposition::Web(web), domain_sizes });
            }
            WebOrDecomposition::Decomposition(td) => {
                let offset = bags.len();
                if offset > 0 {
                    edges.push((0, offset));
                }
                edges.extend(td.tree_edges.iter().map(|&(a, b)| (a + offset, b + offset)));
                bags.extend(td.bags.iter().map(lift));
            }
        }
    }
    let td = TreeDecomposition::new(edges, bags);
    if td.width + 2 > (2 * h + 1) * k {
        return Err(Error::Internal(format!("decomposition width {} too large", td.width)));
    }
    Ok(WebRun { outcome: WebOrDecomposition::Decomposition(td), domain_sizes })
}

/// With `h = k + 1` webs of linkage `k + 1`: a certificate for treewidth at
/// least `k`, or a decomposition of width at most `(2k + 3)(k + 1) - 2`.
pub fn web_or_quadratic_decomposition(g: &Graph, k: usize, debug_validate: bool) -> Result<WebRun> {
    build_web_or_decomposition(g, k + 1, k + 1, debug_validate)
}

struct Run<'a> {
    g: &'a Graph,
    k: usize,
    h: usize,
    l: usize,
    debug: bool,
    u: Vec<bool>,
    bags: Vec<VertexSet>,
    edges: Vec<(usize, usize)>,
    comps: Vec<ComponentTree>,
}

impl<'a> Run<'a> {
    /// Starts from the smallest vertex of a connected graph.
    fn new(g: &'a Graph, k: usize, h: usize, debug: bool) -> Self {
        let mut u = vec![false; g.n()];
        u[0] = true;
        let comps = g
            .components(&VertexSet::singleton(0))
            .into_iter()
            .map(|c| ComponentTree { component: c, tree: TreeGraph::singleton(0), node: 0 })
            .collect();
        Run { g, k, h, l: 2 * k * h, debug, u, bags: vec![VertexSet::singleton(0)], edges: Vec::new(), comps }
    }

    fn domain(&self) -> VertexSet {
        (0..self.g.n()).filter(|&v| self.u[v]).collect()
    }

    fn snapshot(&self) -> PreWeb {
        PreWeb {
            u: self.domain(),
            decomposition: TreeDecomposition::new(self.edges.clone(), self.bags.clone()),
            component_trees: self.comps.clone(),
        }
    }

    fn check(&self) -> Result<()> {
        if self.debug {
            self.snapshot()
                .validate(self.g, self.k, self.h)
                .map_err(|e| Error::Internal(format!("pre-web invariant broken: {e}")))?;
        }
        Ok(())
    }

    fn finish(mut self, sizes: &mut Vec<usize>) -> Result<WebOrDecomposition> {
        self.check()?;
        let mut last = 1;
        sizes.push(last);
        while !self.comps.is_empty() {
            // Most recent bag first, then the smallest vertex.
            let idx = (0..self.comps.len())
                .max_by(|&a, &b| {
                    let (ca, cb) = (&self.comps[a], &self.comps[b]);
                    ca.node.cmp(&cb.node).then(cb.component.first().cmp(&ca.component.first()))
                })
                .expect("nonempty");
            let comp = self.comps.swap_remove(idx);
            let x = self.g.neighborhood(&comp.component);
            if x.len() < self.l {
                self.grow(comp, &x)?;
            } else if x.len() == self.l {
                if let Some(web) = self.separate_or_web(comp, &x)? {
                    return Ok(WebOrDecomposition::Web(web));
                }
            } else {
                return Err(Error::Internal(format!("|N(C)| = {} exceeds l = {}", x.len(), self.l)));
            }
            let size = self.u.iter().filter(|&&b| b).count();
            if size <= last {
                return Err(Error::Internal("pre-web did not grow".into()));
            }
            last = size;
            sizes.push(size);
            self.check()?;
        }
        Ok(WebOrDecomposition::Decomposition(TreeDecomposition::new(self.edges, self.bags)))
    }

    fn add_bag(&mut self, bag: VertexSet, parent: usize) -> usize {
        self.bags.push(bag);
        let id = self.bags.len() - 1;
        self.edges.push((parent, id));
        id
    }

    fn grow(&mut self, comp: ComponentTree, x: &VertexSet) -> Result<()> {
        let t = &comp.tree;
        let v = x
            .iter()
            .find(|&v| t.degree(v) <= 1)
            .ok_or_else(|| Error::Internal("tree has no leaf in N(C)".into()))?;
        let u = *self
            .g
            .neighbors(v)
            .iter()
            .find(|&&w| comp.component.contains(w))
            .ok_or_else(|| Error::Internal("N(C) vertex without a neighbour in C".into()))?;
        let grown = t.add_path(&[v, u]);
        let mut bag = x.clone();
        bag.insert(u);
        let s = self.add_bag(bag, comp.node);
        self.u[u] = true;
        let mut rest = comp.component.clone();
        rest.remove(u);
        for c in self.g.components_of(&rest) {
            let nc = self.g.neighborhood(&c);
            let tree = grown.minimal_subtree(&nc);
            self.comps.push(ComponentTree { component: c, tree, node: s });
        }
        Ok(())
    }

    /// Linkages between the split flats; a web when all have `k` paths,
    /// otherwise the pre-web grows by a small separator.
    fn separate_or_web(&mut self, comp: ComponentTree, x: &VertexSet) -> Result<Option<KWeb>> {
        let (k, h) = (self.k, self.h);
        let subtrees = split_flat_subtrees(&comp.tree, x, k, h)?;
        let flats: Vec<VertexSet> = subtrees.iter().map(|t| t.intersection(x)).collect();
        let mut linkages = Vec::new();
        for i in 0..h {
            for j in i + 1..h {
                let (paths, sep) = self.link(&comp.component, &flats[i], &flats[j])?;
                if paths.len() < k {
                    self.separate(comp, x, &flats[i], &flats[j], &paths, &sep)?;
                    return Ok(None);
                }
                linkages.push(((i, j), paths.into_iter().take(k).collect()));
            }
        }
        let body = flats.iter().fold(comp.component.clone(), |acc, a| acc.union(a));
        Ok(Some(KWeb { k, t: comp.tree, subtrees, flats, body, linkages }))
    }

    /// Maximum disjoint `a`-`b` paths in `G[C ∪ a ∪ b]` without the edges
    /// inside `a ∪ b`, plus a separator of the same size, in host ids.
    fn link(&self, c: &VertexSet, a: &VertexSet, b: &VertexSet) -> Result<(Vec<Path>, VertexSet)> {
        let ab = a.union(b);
        let dom = c.union(&ab);
        let (sub, map) = self.g.induced(&dom)?;
        let local = |s: &VertexSet| -> VertexSet {
            s.iter().map(|v| map.binary_search(&v).expect("inside the domain")).collect()
        };
        let h = sub.without_edges_inside(&local(&ab));
        let dp = disjoint_paths(&h, &local(a), &local(b), &VertexSet::new())?;
        let paths = dp
            .paths
            .iter()
            .map(|p| Path::new(p.vertices().iter().map(|&v| map[v]).collect()))
            .collect();
        let sep = VertexSet::from_iter_unsorted(dp.separator.iter().map(|v| map[v]));
        Ok((paths, sep))
    }

    fn separate(
        &mut self,
        comp: ComponentTree,
        x: &VertexSet,
        ai: &VertexSet,
        aj: &VertexSet,
        paths: &[Path],
        sep: &VertexSet,
    ) -> Result<()> {
        // The path through each separator vertex and its position on it.
        let mut through = std::collections::BTreeMap::new();
        for p in paths {
            let hits: Vec<usize> = (0..p.len()).filter(|&i| sep.contains(p.vertices()[i])).collect();
            if hits.len() != 1 {
                return Err(Error::Internal("separator does not meet each path once".into()));
            }
            through.insert(p.vertices()[hits[0]], (p, hits[0]));
        }
        if through.len() != sep.len() {
            return Err(Error::Internal("separator vertex off every path".into()));
        }
        let r = self.add_bag(x.union(sep), comp.node);
        for v in sep.iter() {
            self.u[v] = true;
        }
        let ai_free = ai.difference(sep);
        let aj_free = aj.difference(sep);
        let rest = comp.component.difference(sep);
        for c in self.g.components_of(&rest) {
            let nc = self.g.neighborhood(&c);
            let from_i = nc.is_disjoint(&ai_free);
            if !from_i && !nc.is_disjoint(&aj_free) {
                return Err(Error::Internal("component sees both sides of the separator".into()));
            }
            let mut tree = comp.tree.clone();
            for s in sep.iter().filter(|&s| comp.component.contains(s) && nc.contains(s)) {
                let (p, pos) = through[&s];
                let vs = p.vertices();
                let piece = if from_i { &vs[..=pos] } else { &vs[pos..] };
                tree = tree.add_path(piece);
            }
            self.comps.push(ComponentTree { component: c, tree, node: r });
        }
        Ok(())
    }
}
