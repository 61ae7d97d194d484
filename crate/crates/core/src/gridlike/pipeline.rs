//! From a k-web to a topological grid-like minor: a dense pair of linkages
//! gives one directly, otherwise an independent transversal of the linkage
//! intersection graph gives a clique minor, which is turned into a grid-like
//! minor through a sub-cubic template.

use serde::{Deserialize, Serialize};

use super::{
    complete, intersection_graph, lll_transversal, top_minor, validate_gridlike, GridLikeMinor, GridModel,
    TransversalReport,
};
use crate::config::Constants;
use crate::decomposition::TreeDecomposition;
use crate::error::{input, Error, Result};
use crate::graph::{disjoint_paths, Graph, MinorModel, Path, SubdivisionModel, VertexSet};
use crate::web::{build_web_or_decomposition, KWeb, TreeGraph, WebOrDecomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineStage {
    Web,
    Dense,
    Transversal,
    Template,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineFailure {
    pub stage: PipelineStage,
    pub reason: String,
    /// Counter-witness when the web stage found none.
    pub decomposition: Option<TreeDecomposition>,
}

/// Disjoint sub-cubic trees joined pairwise by disjoint paths, and the
/// clique minor model they form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueModel {
    pub trees: Vec<TreeGraph>,
    /// `((i, j), Q_ij)` for `i < j`, running from `T_i` to `T_j`.
    pub paths: Vec<((usize, usize), Path)>,
    pub model: MinorModel,
}

impl CliqueModel {
    pub fn validate(&self, g: &Graph) -> std::result::Result<(), String> {
        let h = self.trees.len();
        let mut owner = vec![usize::MAX; g.n()];
        for (i, t) in self.trees.iter().enumerate() {
            if !t.is_subcubic_tree_in(g) {
                return Err(format!("T_{i} is not a sub-cubic tree"));
            }
            for v in t.vertices.iter() {
                if owner[v] != usize::MAX {
                    return Err(format!("T_{} and T_{i} overlap", owner[v]));
                }
                owner[v] = i;
            }
        }
        let pairs: Vec<(usize, usize)> = complete(h).edges().collect();
        if self.paths.iter().map(|(ij, _)| *ij).collect::<Vec<_>>() != pairs {
            return Err("need one path per pair of trees".into());
        }
        for (idx, ((i, j), q)) in self.paths.iter().enumerate() {
            let vs = q.vertices();
            if vs.len() < 2 || !q.is_valid_in(g) {
                return Err(format!("Q_{i}{j} is not a path"));
            }
            if owner[vs[0]] != *i || owner[vs[vs.len() - 1]] != *j {
                return Err(format!("Q_{i}{j} does not join T_{i} and T_{j}"));
            }
            for &v in &vs[1..vs.len() - 1] {
                if owner[v] != usize::MAX {
                    return Err(format!("Q_{i}{j} meets another path or tree"));
                }
                owner[v] = h + idx;
            }
        }
        let mut ends = std::collections::BTreeSet::new();
        for (_, q) in &self.paths {
            for v in [q.first(), q.last()].into_iter().flatten() {
                if !ends.insert(v) {
                    return Err(format!("vertex {v} ends two paths"));
                }
            }
        }
        self.model.validate(g, &complete(h)).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PipelineOutcome {
    GridLike { minor: GridLikeMinor, stage: PipelineStage },
    Clique { model: CliqueModel },
    Failed(PipelineFailure),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub p: usize,
    pub h: usize,
    pub k: usize,
    pub seed: u64,
    pub web: Option<KWeb>,
    /// Average-degree threshold `c_top p^2` for a pair of linkages.
    pub dense_threshold: f64,
    pub max_pair_degree: f64,
    pub dense_pairs_tried: usize,
    pub transversal: Option<TransversalReport>,
    pub clique: Option<CliqueModel>,
    pub outcome: PipelineOutcome,
}

impl PipelineReport {
    pub fn gridlike(&self) -> Option<&GridLikeMinor> {
        match &self.outcome {
            PipelineOutcome::GridLike { minor, .. } => Some(minor),
            _ => None,
        }
    }
}

/// Pipeline with `h = p^2`, so that a clique minor from the transversal
/// stage always converts to order `p`.
pub fn gridlike_pipeline(g: &Graph, p: usize, cfg: &Constants, seed: u64) -> Result<PipelineReport> {
    gridlike_pipeline_with(g, p, (p * p).max(2), cfg, seed)
}

/// Web of order `h` with `k = max(min_web_k, ceil(c_web h^2 p^2), h)`.
pub fn gridlike_pipeline_with(g: &Graph, p: usize, h: usize, cfg: &Constants, seed: u64) -> Result<PipelineReport> {
    if p == 0 || h < 2 {
        return input("need p >= 1 and h >= 2");
    }
    let pp = (p * p) as f64;
    let k = ((cfg.c_web * (h * h) as f64 * pp - 1e-9).ceil() as usize).max(cfg.min_web_k).max(h);
    let mut report = PipelineReport {
        p,
        h,
        k,
        seed,
        web: None,
        dense_threshold: cfg.c_top * pp,
        max_pair_degree: 0.0,
        dense_pairs_tried: 0,
        transversal: None,
        clique: None,
        outcome: PipelineOutcome::Failed(PipelineFailure {
            stage: PipelineStage::Web,
            reason: String::new(),
            decomposition: None,
        }),
    };
    let failed = |mut report: PipelineReport, stage, reason: String, decomposition| {
        report.outcome = PipelineOutcome::Failed(PipelineFailure { stage, reason, decomposition });
        Ok(report)
    };

    // Web.
    let web = match build_web_or_decomposition(g, k, h, false)?.outcome {
        WebOrDecomposition::Web(w) => w,
        WebOrDecomposition::Decomposition(td) => {
            let reason = format!("no {k}-web of order {h}; decomposition of width {}", td.width);
            return failed(report, PipelineStage::Web, reason, Some(td));
        }
    };
    // Linkages spread over the web.
    let web = spread_linkages(g, &web)?;
    let families: Vec<Vec<Path>> = web.linkages.iter().map(|(_, ps)| ps.clone()).collect();
    report.web = Some(web.clone());

    // Dense pair of linkages.
    for a in 0..families.len() {
        for b in a + 1..families.len() {
            let ig = intersection_graph(&families[a], &families[b])?;
            let avg = 2.0 * ig.edges.len() as f64 / (families[a].len() + families[b].len()) as f64;
            report.max_pair_degree = report.max_pair_degree.max(avg);
            if avg + 1e-9 < report.dense_threshold {
                continue;
            }
            report.dense_pairs_tried += 1;
            if let Some(model) = top_minor(&ig.base(), p, cfg)?.result.ok() {
                let minor = GridLikeMinor { ig, order: p, model: GridModel::Subdivision(model), topological: true };
                validate_gridlike(g, &minor).map_err(|e| Error::Internal(format!("dense grid-like minor: {e}")))?;
                report.outcome = PipelineOutcome::GridLike { minor, stage: PipelineStage::Dense };
                return Ok(report);
            }
        }
    }

    // Transversal of the linkage classes.
    let mut offsets = vec![0];
    for f in &families {
        offsets.push(offsets.last().unwrap() + f.len());
    }
    let all: Vec<&Path> = families.iter().flatten().collect();
    let sets: Vec<VertexSet> = all.iter().map(|p| p.vertex_set()).collect();
    let mut edges = Vec::new();
    for (x, fx) in offsets.windows(2).enumerate() {
        for u in fx[0]..fx[1] {
            for v in offsets[x + 1]..all.len() {
                if !sets[u].is_disjoint(&sets[v]) {
                    edges.push((u, v));
                }
            }
        }
    }
    let ih = Graph::new(all.len(), &edges)?;
    let classes: Vec<VertexSet> = offsets.windows(2).map(|w| (w[0]..w[1]).collect()).collect();
    let d = (cfg.c_lll * pp - 1e-9).ceil().max(1.0) as usize;
    let tr = lll_transversal(&ih, &classes, d, seed, cfg.max_resamplings)?;
    let picks = tr.transversal.as_ref().map(|t| t.picks.clone());
    report.transversal = Some(tr);
    let Some(picks) = picks else {
        let reason = format!("no independent transversal of the {} linkages", families.len());
        return failed(report, PipelineStage::Transversal, reason, None);
    };
    let trees: Vec<TreeGraph> = web.subtrees.iter().map(|s| web.t.restrict(s)).collect();
    let paths: Vec<((usize, usize), Path)> =
        web.linkages.iter().zip(&picks).map(|((ij, _), &v)| (*ij, all[v].clone())).collect();
    let clique = clique_model(trees, paths);
    clique.validate(g).map_err(|e| Error::Internal(format!("clique model from transversal: {e}")))?;
    report.clique = Some(clique.clone());

    // Template.
    let l = h.isqrt();
    if l < p {
        report.outcome = PipelineOutcome::Clique { model: clique };
        return Ok(report);
    }
    match gridlike_from_clique(g, &clique.model, l) {
        Ok(minor) => {
            report.outcome = PipelineOutcome::GridLike { minor, stage: PipelineStage::Template };
        }
        Err(e) => return failed(report, PipelineStage::Template, e.to_string(), None),
    }
    Ok(report)
}

/// Re-extracts the linkages by max-flow in the web body, each family
/// avoiding the inner vertices of the families before it where that still
/// leaves `k` paths. Max-flow tends to reuse the same low-numbered vertices
/// for every pair, which no transversal can get around.
fn spread_linkages(g: &Graph, web: &KWeb) -> Result<KWeb> {
    let mut out = web.clone();
    let mut used = VertexSet::new();
    for ((i, j), fam) in out.linkages.iter_mut() {
        let (a, b) = (&web.flats[*i], &web.flats[*j]);
        let ab = a.union(b);
        let dom = web.body.difference(&web.t.vertices).union(&ab);
        let (sub, map) = g.induced(&dom)?;
        let local = |s: &VertexSet| -> VertexSet { s.iter().filter_map(|v| map.binary_search(&v).ok()).collect() };
        let sub = sub.without_edges_inside(&local(&ab));
        let dp = disjoint_paths(&sub, &local(a), &local(b), &local(&used.difference(&ab)))?;
        if dp.paths.len() >= web.k {
            *fam = dp
                .paths
                .iter()
                .take(web.k)
                .map(|p| Path::new(p.vertices().iter().map(|&v| map[v]).collect()))
                .collect();
        }
        for p in fam.iter() {
            let vs = p.vertices();
            used = used.union(&VertexSet::from_iter_unsorted(vs[1..vs.len() - 1].iter().copied()));
        }
    }
    out.validate(g).map_err(|e| Error::Internal(format!("re-extracted linkages: {e}")))?;
    Ok(out)
}

/// Branch set `i` is `T_i` plus the inner vertices of `Q_ij` for `j > i`.
fn clique_model(trees: Vec<TreeGraph>, paths: Vec<((usize, usize), Path)>) -> CliqueModel {
    let mut sets: Vec<Vec<usize>> = trees.iter().map(|t| t.vertices.iter().collect()).collect();
    for ((i, _), q) in &paths {
        let vs = q.vertices();
        sets[*i].extend_from_slice(&vs[1..vs.len() - 1]);
    }
    let model = MinorModel::new(sets.into_iter().map(VertexSet::from_iter_unsorted).collect());
    CliqueModel { trees, paths, model }
}

/// `l` horizontal paths on `l` vertices each and one vertical edge per pair
/// of them. Vertex `i*l + s` is slot `s` of path `i`; the edge for `i < j`
/// leaves path `i` at slot `j - 1` and enters path `j` at slot `i`.
pub fn template_h(l: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..l {
        for s in 0..l.saturating_sub(1) {
            edges.push((i * l + s, i * l + s + 1));
        }
        for j in i + 1..l {
            edges.push((i * l + j - 1, j * l + i));
        }
    }
    Graph::new(l * l, &edges).expect("template is simple")
}

/// Realises `template_h(l)` topologically inside a `K_m` model (`m >= l^2`)
/// and reads off the grid-like minor of order `l`.
pub(crate) fn gridlike_from_clique(g: &Graph, model: &MinorModel, l: usize) -> Result<GridLikeMinor> {
    if model.branch_sets.len() < l * l {
        return input(format!("K_{} model is too small for order {l}", model.branch_sets.len()));
    }
    let th = template_h(l);
    let sets: Vec<VertexSet> = model.branch_sets[..l * l].to_vec();
    let sub = subdivide(g, &sets, &th)?;
    sub.validate(g, &th).map_err(|e| Error::Internal(format!("template subdivision: {e}")))?;
    let path_of = |a: usize, b: usize| -> &Path {
        &sub.edge_paths.iter().find(|(e, _)| *e == (a, b)).expect("template edge").1
    };
    let horizontal: Vec<Path> = (0..l)
        .map(|i| {
            let mut vs = vec![sub.branch_vertices[i * l]];
            for s in 0..l - 1 {
                vs.extend_from_slice(&path_of(i * l + s, i * l + s + 1).vertices()[1..]);
            }
            Path::new(vs)
        })
        .collect();
    let vertical: Vec<Path> = complete(l).edges().map(|(i, j)| path_of(i * l + j - 1, j * l + i).clone()).collect();
    let ig = intersection_graph(&horizontal, &vertical)?;
    let edge_paths = complete(l)
        .edges()
        .enumerate()
        .map(|(q, (i, j))| ((i, j), Path::new(vec![i, l + q, j])))
        .collect();
    let minor = GridLikeMinor {
        ig,
        order: l,
        model: GridModel::Subdivision(SubdivisionModel { branch_vertices: (0..l).collect(), edge_paths }),
        topological: true,
    };
    validate_gridlike(g, &minor).map_err(|e| Error::Internal(format!("template grid-like minor: {e}")))?;
    Ok(minor)
}

/// Subdivision of a max-degree-3 template from a minor model of it: the
/// branch vertex of each part is the median of its attachment points in a
/// spanning tree, and tree paths lead from it to the attachments.
fn subdivide(g: &Graph, sets: &[VertexSet], template: &Graph) -> Result<SubdivisionModel> {
    if template.max_degree() > 3 {
        return input("template must have maximum degree 3");
    }
    let n = g.n();
    let mut owner = vec![usize::MAX; n];
    for (i, s) in sets.iter().enumerate() {
        for v in s.iter() {
            owner[v] = i;
        }
    }
    // Attachment (a in B_u, b in B_w) for every template edge u-w.
    let mut attach = Vec::new();
    for (u, w) in template.edges() {
        let pair = sets[u]
            .iter()
            .find_map(|a| g.neighbors(a).iter().find(|&&b| owner[b] == w).map(|&b| (a, b)))
            .ok_or_else(|| Error::Internal(format!("parts {u} and {w} are not adjacent")))?;
        attach.push(((u, w), pair));
    }
    let trees: Vec<SpanningTree> = sets.iter().map(|s| SpanningTree::new(g, s, &owner)).collect();
    let mut centre = Vec::with_capacity(sets.len());
    for (u, s) in sets.iter().enumerate() {
        let ends: Vec<usize> = attach
            .iter()
            .filter_map(|((a, b), (x, y))| {
                if *a == u {
                    Some(*x)
                } else if *b == u {
                    Some(*y)
                } else {
                    None
                }
            })
            .collect();
        centre.push(match ends.as_slice() {
            [] => s.first().ok_or_else(|| Error::Internal(format!("part {u} is empty")))?,
            [x] | [x, _] => *x,
            [x, y, z] => trees[u].median(*x, *y, *z),
            _ => unreachable!("degree at most 3"),
        });
    }
    let edge_paths = attach
        .iter()
        .map(|&((u, w), (a, b))| {
            let mut vs = trees[u].path(centre[u], a);
            vs.extend(trees[w].path(b, centre[w]));
            ((u, w), Path::new(vs))
        })
        .collect();
    Ok(SubdivisionModel { branch_vertices: centre, edge_paths })
}

/// BFS tree of a connected part, rooted at its smallest vertex.
struct SpanningTree {
    parent: std::collections::HashMap<usize, usize>,
    depth: std::collections::HashMap<usize, usize>,
}

impl SpanningTree {
    fn new(g: &Graph, s: &VertexSet, owner: &[usize]) -> Self {
        let mut parent = std::collections::HashMap::new();
        let mut depth = std::collections::HashMap::new();
        if let Some(root) = s.first() {
            let part = owner[root];
            parent.insert(root, root);
            depth.insert(root, 0);
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &w in g.neighbors(v) {
                    if owner[w] == part && !parent.contains_key(&w) {
                        parent.insert(w, v);
                        depth.insert(w, depth[&v] + 1);
                        queue.push_back(w);
                    }
                }
            }
        }
        SpanningTree { parent, depth }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        while self.depth[&a] > self.depth[&b] {
            a = self.parent[&a];
        }
        while self.depth[&b] > self.depth[&a] {
            b = self.parent[&b];
        }
        while a != b {
            a = self.parent[&a];
            b = self.parent[&b];
        }
        a
    }

    /// Deepest of the pairwise common ancestors.
    fn median(&self, x: usize, y: usize, z: usize) -> usize {
        [self.lca(x, y), self.lca(y, z), self.lca(x, z)]
            .into_iter()
            .max_by_key(|v| self.depth[v])
            .expect("three candidates")
    }

    /// Tree path from `a` to `b`.
    fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let c = self.lca(a, b);
        let mut up = vec![a];
        let mut v = a;
        while v != c {
            v = self.parent[&v];
            up.push(v);
        }
        let mut down = Vec::new();
        let mut v = b;
        while v != c {
            down.push(v);
            v = self.parent[&v];
        }
        up.extend(down.into_iter().rev());
        up
    }
}
