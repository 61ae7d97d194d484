//! Perfect brambles: pairwise intersecting connected subgraphs, each vertex in
//! at most two of them, maximum degree 4 in their union.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bramble::{min_hitting_set, Bramble, OrderCertificate, OrderMethod};
use crate::config::Constants;
use crate::decomposition::exact_treewidth;
use crate::error::{input, Error, Result};
use crate::graph::{Graph, Path, VertexSet};
use crate::gridlike::{gridlike_pipeline_with, validate_gridlike, GridLikeMinor, GridModel, PipelineOutcome, PipelineReport};
use crate::web::TreeGraph;

fn norm(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Elements are subgraphs: a vertex set with its own edge list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerfectBramble {
    pub elements: Vec<VertexSet>,
    /// Normalised, sorted edges of each element.
    pub element_edges: Vec<Vec<(usize, usize)>>,
    /// Edge set of `H`, the union of all elements.
    pub host_union: Vec<(usize, usize)>,
    pub order: Option<OrderCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PerfectViolation {
    #[error("no elements")]
    Empty,
    #[error("element and edge lists differ in length")]
    Shape,
    #[error("element {0} has a vertex outside the graph")]
    OutOfRange(usize),
    #[error("element {0} has an edge that is not in the graph or leaves the element")]
    BadEdge(usize),
    #[error("element {0} is empty or not connected by its edges")]
    Disconnected(usize),
    #[error("elements {0} and {1} share no vertex")]
    Disjoint(usize, usize),
    #[error("vertex {0} lies in more than two elements")]
    Crowded(usize),
    #[error("vertex {0} has degree {1} in the union")]
    Degree(usize, usize),
    #[error("stored union differs from the union of the element edges")]
    UnionMismatch,
    #[error("order certificate {0} differs from ceil(k/2) = {1}")]
    Order(usize, usize),
}

impl PerfectBramble {
    /// Normalises the edge lists, fills in the union and the structural order.
    pub fn new(elements: Vec<VertexSet>, element_edges: Vec<Vec<(usize, usize)>>) -> Self {
        let element_edges: Vec<Vec<(usize, usize)>> = element_edges
            .into_iter()
            .map(|es| {
                let set: BTreeSet<_> = es.into_iter().map(|(u, v)| norm(u, v)).collect();
                set.into_iter().collect()
            })
            .collect();
        let host_union: BTreeSet<_> = element_edges.iter().flatten().copied().collect();
        let k = elements.len();
        PerfectBramble {
            elements,
            element_edges,
            host_union: host_union.into_iter().collect(),
            order: Some(OrderCertificate { lower_bound: k.div_ceil(2), method: OrderMethod::Structural }),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn support(&self) -> VertexSet {
        VertexSet::from_iter_unsorted(self.elements.iter().flat_map(|e| e.iter()))
    }

    pub fn to_bramble(&self) -> Bramble {
        Bramble { elements: self.elements.clone(), order: self.order }
    }

    /// `H` relabelled onto `0..|support|`, plus the map back.
    pub fn host(&self) -> (Graph, Vec<usize>) {
        let support = self.support();
        let idx = |v: usize| support.as_slice().binary_search(&v).expect("edge inside support");
        let edges: Vec<_> = self.host_union.iter().map(|&(u, v)| (idx(u), idx(v))).collect();
        let h = Graph::new(support.len(), &edges).expect("normalised simple edges");
        (h, support.into_vec())
    }

    /// `H` on the vertex ids of an `n`-vertex host.
    pub fn subgraph(&self, n: usize) -> Result<Graph> {
        Graph::new(n, &self.host_union)
    }

    pub fn validate(&self, g: &Graph) -> std::result::Result<(), PerfectViolation> {
        use PerfectViolation::*;
        let k = self.elements.len();
        if k == 0 {
            return Err(Empty);
        }
        if self.element_edges.len() != k {
            return Err(Shape);
        }
        let mut count = BTreeMap::new();
        for (i, (e, es)) in self.elements.iter().zip(&self.element_edges).enumerate() {
            if g.check_set(e).is_err() {
                return Err(OutOfRange(i));
            }
            if es.iter().any(|&(u, v)| !e.contains(u) || !e.contains(v) || !g.has_edge(u, v)) {
                return Err(BadEdge(i));
            }
            if e.is_empty() || !edges_connect(e, es) {
                return Err(Disconnected(i));
            }
            for v in e.iter() {
                *count.entry(v).or_insert(0usize) += 1;
            }
        }
        for i in 0..k {
            for j in i + 1..k {
                if self.elements[i].is_disjoint(&self.elements[j]) {
                    return Err(Disjoint(i, j));
                }
            }
        }
        if let Some((&v, _)) = count.iter().find(|(_, &c)| c > 2) {
            return Err(Crowded(v));
        }
        let union: BTreeSet<_> = self.element_edges.iter().flatten().map(|&(u, v)| norm(u, v)).collect();
        let mut stored = self.host_union.clone();
        stored.sort_unstable();
        if union.into_iter().collect::<Vec<_>>() != stored {
            return Err(UnionMismatch);
        }
        let mut deg = BTreeMap::new();
        for &(u, v) in &self.host_union {
            *deg.entry(u).or_insert(0usize) += 1;
            *deg.entry(v).or_insert(0usize) += 1;
        }
        if let Some((&v, &d)) = deg.iter().find(|(_, &d)| d > 4) {
            return Err(Degree(v, d));
        }
        if let Some(c) = self.order {
            if c.lower_bound != k.div_ceil(2) {
                return Err(Order(c.lower_bound, k.div_ceil(2)));
            }
        }
        Ok(())
    }
}

fn edges_connect(vs: &VertexSet, es: &[(usize, usize)]) -> bool {
    let mut parent: BTreeMap<usize, usize> = vs.iter().map(|v| (v, v)).collect();
    fn find(p: &mut BTreeMap<usize, usize>, v: usize) -> usize {
        let mut r = v;
        while p[&r] != r {
            r = p[&r];
        }
        p.insert(v, r);
        r
    }
    let mut parts = vs.len();
    for &(u, v) in es {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a != b {
            parent.insert(a, b);
            parts -= 1;
        }
    }
    parts == 1
}

fn checked(g: &Graph, pb: PerfectBramble) -> Result<PerfectBramble> {
    match pb.validate(g) {
        Ok(()) => Ok(pb),
        Err(e) => input(format!("construction is not a perfect bramble: {e}")),
    }
}

/// One element per branch set of the clique model: the union of the paths
/// whose intersection-graph vertices the branch set holds.
pub fn perfect_from_gridlike(g: &Graph, glm: &GridLikeMinor) -> Result<PerfectBramble> {
    if let Err(e) = validate_gridlike(g, glm) {
        return input(format!("grid-like minor: {e}"));
    }
    if glm.order == 0 {
        return input("grid-like minor of order 0");
    }
    let branch_sets = match &glm.model {
        GridModel::Minor(m) => m.branch_sets.clone(),
        GridModel::Subdivision(s) => s.to_minor_model().branch_sets,
    };
    let left = glm.ig.left.len();
    let path = |x: usize| if x < left { &glm.ig.left[x] } else { &glm.ig.right[x - left] };
    let mut elements = Vec::new();
    let mut edges = Vec::new();
    for set in &branch_sets {
        elements.push(VertexSet::from_iter_unsorted(set.iter().flat_map(|x| path(x).vertices().iter().copied())));
        edges.push(set.iter().flat_map(|x| path(x).edges().collect::<Vec<_>>()).collect());
    }
    checked(g, PerfectBramble::new(elements, edges))
}

/// Default `v_ij`: the vertex at position `ceil(m/2)` of a path with `m` edges,
/// counted from the `T_i` end.
pub fn default_halfpoints(qpaths: &[((usize, usize), Path)]) -> Vec<usize> {
    qpaths.iter().map(|(_, q)| q.vertices()[q.edge_len().div_ceil(2)]).collect()
}

/// `B_i` is `T_i` with the part of every `Q_ij` between `T_i` and `v_ij`.
/// `v_ij` itself goes to both sides. A path end outside its tree is attached
/// to the tree by its smallest neighbour there.
pub fn perfect_from_k2k_model(
    g: &Graph,
    trees: &[TreeGraph],
    qpaths: &[((usize, usize), Path)],
    halfpoints: &[usize],
) -> Result<PerfectBramble> {
    let h = trees.len();
    if h == 0 {
        return input("no trees");
    }
    if halfpoints.len() != qpaths.len() {
        return input("need one halfpoint per path");
    }
    let mut owner = vec![usize::MAX; g.n()];
    for (i, t) in trees.iter().enumerate() {
        if !t.is_subcubic_tree_in(g) {
            return input(format!("T_{i} is not a sub-cubic tree"));
        }
        for v in t.vertices.iter() {
            if owner[v] != usize::MAX {
                return input(format!("trees {} and {i} overlap", owner[v]));
            }
            owner[v] = i;
        }
    }
    let pairs: BTreeSet<(usize, usize)> = qpaths.iter().map(|((i, j), _)| norm(*i, *j)).collect();
    if pairs.len() != qpaths.len() || pairs.len() != h * (h - 1) / 2 || pairs.iter().any(|&(i, j)| i == j || j >= h) {
        return input("need exactly one path per pair of trees");
    }
    let mut elements: Vec<Vec<usize>> = trees.iter().map(|t| t.vertices.iter().collect()).collect();
    let mut edges: Vec<Vec<(usize, usize)>> = trees.iter().map(|t| t.edges.clone()).collect();
    for (idx, (((i, j), q), &v)) in qpaths.iter().zip(halfpoints).enumerate() {
        let vs = q.vertices();
        if vs.is_empty() || !q.is_valid_in(g) {
            return input(format!("Q_{i}{j} is not a path"));
        }
        for (pos, &x) in vs.iter().enumerate() {
            let end_ok = (pos == 0 && owner[x] == *i) || (pos == vs.len() - 1 && owner[x] == *j);
            if owner[x] != usize::MAX && !end_ok {
                return input(format!("Q_{i}{j} meets another path or tree at {x}"));
            }
        }
        for &x in vs {
            if owner[x] == usize::MAX {
                owner[x] = h + idx;
            }
        }
        let Some(cut) = vs.iter().position(|&x| x == v) else {
            return input(format!("halfpoint {v} is not on Q_{i}{j}"));
        };
        for (side, part) in [(*i, &vs[..=cut]), (*j, &vs[cut..])] {
            let end = if side == *i { part[0] } else { part[part.len() - 1] };
            elements[side].extend_from_slice(part);
            edges[side].extend(part.windows(2).map(|w| (w[0], w[1])));
            if !trees[side].vertices.contains(end) {
                let Some(&t) = g.neighbors(end).iter().filter(|&&t| trees[side].vertices.contains(t)).min() else {
                    return input(format!("Q_{i}{j} does not reach T_{side}"));
                };
                edges[side].push((t, end));
            }
        }
    }
    let elements = elements.into_iter().map(VertexSet::from_iter_unsorted).collect();
    checked(g, PerfectBramble::new(elements, edges))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub k: usize,
    pub min_element_vertices: usize,
    pub min_private_edges: usize,
    pub host_vertices: usize,
    pub host_edges: usize,
    /// Minimum hitting set, when within the exact caps.
    pub exact_order: Option<usize>,
    /// Exact treewidth of `H`, when within the exact cap.
    pub host_treewidth: Option<usize>,
}

/// Re-derives the structural consequences of perfectness. A failure on a
/// validated bramble is reported as an internal error.
pub fn check_structure(pb: &PerfectBramble, cfg: &Constants) -> Result<StructureReport> {
    let k = pb.len();
    if k == 0 {
        return input("empty perfect bramble");
    }
    let fail = |what: String| Err(Error::Internal(format!("perfect bramble with {k} elements: {what}")));
    let mut uses: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for es in &pb.element_edges {
        for &e in es {
            *uses.entry(e).or_insert(0) += 1;
        }
    }
    let min_element_vertices = pb.elements.iter().map(VertexSet::len).min().unwrap_or(0);
    let private: Vec<usize> = pb.element_edges.iter().map(|es| es.iter().filter(|e| uses[e] == 1).count()).collect();
    let min_private_edges = private.iter().copied().min().unwrap_or(0);
    let (host, _) = pb.host();
    let report = StructureReport {
        k,
        min_element_vertices,
        min_private_edges,
        host_vertices: host.n(),
        host_edges: host.m(),
        exact_order: capped(min_hitting_set(&pb.to_bramble(), cfg).map(|s| s.len()))?,
        host_treewidth: capped(exact_treewidth(&host, cfg).map(|(tw, _)| tw))?,
    };
    let half = k.div_ceil(2);
    if min_element_vertices + 1 < k {
        return fail(format!("an element has {min_element_vertices} vertices"));
    }
    if min_private_edges + 2 < k {
        return fail(format!("an element has {min_private_edges} private edges"));
    }
    if 2 * report.host_vertices < k * (k - 1) {
        return fail(format!("H has {} vertices", report.host_vertices));
    }
    if report.host_edges < k * k.saturating_sub(2) {
        return fail(format!("H has {} edges", report.host_edges));
    }
    if report.exact_order.is_some_and(|o| o != half) {
        return fail(format!("order {:?}, not {half}", report.exact_order));
    }
    if report.host_treewidth.is_some_and(|tw| tw + 1 < half) {
        return fail(format!("tw(H) = {:?}", report.host_treewidth));
    }
    Ok(report)
}

fn capped(r: Result<usize>) -> Result<Option<usize>> {
    match r {
        Ok(x) => Ok(Some(x)),
        Err(Error::Capacity { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PerfectRoute {
    GridLike,
    CliqueModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundedDegreeReport {
    /// Requested order; the pipeline is run with `p = h = 2 * order`.
    pub order: usize,
    pub pipeline: PipelineReport,
    pub route: Option<PerfectRoute>,
    pub bramble: Option<PerfectBramble>,
    pub max_degree: Option<usize>,
}

impl BoundedDegreeReport {
    pub fn found(&self) -> bool {
        self.bramble.is_some()
    }
}

/// A perfect bramble of the given order, and with it a subgraph of maximum
/// degree 4 whose treewidth is at least `order - 1`.
pub fn bounded_degree_subgraph(g: &Graph, order: usize, cfg: &Constants, seed: u64) -> Result<BoundedDegreeReport> {
    if order == 0 {
        return input("order must be positive");
    }
    let h = (2 * order).max(2);
    let pipeline = gridlike_pipeline_with(g, h, h, cfg, seed)?;
    let built = if let Some(c) = &pipeline.clique {
        let halves = default_halfpoints(&c.paths);
        Some((PerfectRoute::CliqueModel, perfect_from_k2k_model(g, &c.trees, &c.paths, &halves)?))
    } else {
        match &pipeline.outcome {
            PipelineOutcome::GridLike { minor, .. } if minor.order >= h => {
                Some((PerfectRoute::GridLike, perfect_from_gridlike(g, minor)?))
            }
            _ => None,
        }
    };
    let mut report = BoundedDegreeReport { order, pipeline, route: None, bramble: None, max_degree: None };
    if let Some((route, pb)) = built {
        pb.validate(g).map_err(|e| Error::Internal(format!("bounded-degree bramble: {e}")))?;
        let d = pb.subgraph(g.n())?.max_degree();
        if d > 4 {
            return Err(Error::Internal(format!("bounded-degree subgraph has degree {d}")));
        }
        report.route = Some(route);
        report.bramble = Some(pb);
        report.max_degree = Some(d);
    }
    Ok(report)
}
