//! Grid-like minors: two families of disjoint paths whose intersection graph
//! has a large clique minor.

mod lll;
mod pipeline;
mod top_minor;

pub use lll::{
    encode_transversal_cnf, lll_transversal, moser_resample, CnfInstance, Lit, MoserReport, Transversal,
    TransversalMethod, TransversalReport,
};
pub use pipeline::{
    gridlike_pipeline, gridlike_pipeline_with, template_h, CliqueModel, PipelineFailure, PipelineOutcome,
    PipelineReport, PipelineStage,
};
pub use top_minor::{top_minor, TopMinorFailure, TopMinorReport, TopMinorStep};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::graph::{generate, Graph, GraphKind, MinorModel, ModelViolation, Path, SubdivisionModel, VertexSet};

/// Bipartite intersection graph `I(P, Q)`. Vertex `i` of `base` is `left[i]`,
/// vertex `left.len() + j` is `right[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionGraph {
    pub left: Vec<Path>,
    pub right: Vec<Path>,
    /// Edge list of the base graph, `(i, j)` with `i < j`.
    pub edges: Vec<(usize, usize)>,
}

impl IntersectionGraph {
    pub fn base(&self) -> Graph {
        Graph::new(self.left.len() + self.right.len(), &self.edges).expect("built from a simple edge list")
    }
}

/// Index of the first pair of overlapping paths in a family.
fn family_overlap(paths: &[Path]) -> Option<(usize, usize)> {
    let mut owner = std::collections::HashMap::new();
    for (i, p) in paths.iter().enumerate() {
        for &v in p.vertices() {
            if let Some(&j) = owner.get(&v) {
                return Some((j, i));
            }
            owner.insert(v, i);
        }
    }
    None
}

fn intersection_edges(p: &[Path], q: &[Path]) -> Vec<(usize, usize)> {
    let sets: Vec<VertexSet> = q.iter().map(Path::vertex_set).collect();
    let mut edges = Vec::new();
    for (i, a) in p.iter().enumerate() {
        let a = a.vertex_set();
        for (j, b) in sets.iter().enumerate() {
            if !a.is_disjoint(b) {
                edges.push((i, p.len() + j));
            }
        }
    }
    edges
}

pub fn intersection_graph(p: &[Path], q: &[Path]) -> Result<IntersectionGraph> {
    for (name, fam) in [("P", p), ("Q", q)] {
        if let Some((a, b)) = family_overlap(fam) {
            return input(format!("paths {a} and {b} of family {name} overlap"));
        }
        if fam.iter().any(Path::is_empty) {
            return input(format!("family {name} has an empty path"));
        }
    }
    Ok(IntersectionGraph { left: p.to_vec(), right: q.to_vec(), edges: intersection_edges(p, q) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "model")]
pub enum GridModel {
    Minor(MinorModel),
    Subdivision(SubdivisionModel),
}

/// `K_order` modelled in the intersection graph of two path families.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridLikeMinor {
    pub ig: IntersectionGraph,
    pub order: usize,
    pub model: GridModel,
    pub topological: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GridLikeViolation {
    #[error("path {1} of family {0} is not a path of the graph")]
    BadPath(char, usize),
    #[error("paths {1} and {2} of family {0} overlap")]
    FamilyOverlap(char, usize, usize),
    #[error("stored intersection graph differs from the recomputed one")]
    IntersectionMismatch,
    #[error("topological flag disagrees with the model kind")]
    FlagMismatch,
    #[error("model: {0}")]
    Model(ModelViolation),
}

pub fn validate_gridlike(g: &Graph, glm: &GridLikeMinor) -> std::result::Result<(), GridLikeViolation> {
    use GridLikeViolation::*;
    for (name, fam) in [('P', &glm.ig.left), ('Q', &glm.ig.right)] {
        if let Some(i) = fam.iter().position(|p| p.is_empty() || !p.is_valid_in(g)) {
            return Err(BadPath(name, i));
        }
        if let Some((a, b)) = family_overlap(fam) {
            return Err(FamilyOverlap(name, a, b));
        }
    }
    let mut stored = glm.ig.edges.clone();
    stored.sort_unstable();
    if stored != intersection_edges(&glm.ig.left, &glm.ig.right) {
        return Err(IntersectionMismatch);
    }
    if glm.topological != matches!(glm.model, GridModel::Subdivision(_)) {
        return Err(FlagMismatch);
    }
    let base = glm.ig.base();
    let template = complete(glm.order);
    match &glm.model {
        GridModel::Minor(m) => m.validate(&base, &template),
        GridModel::Subdivision(s) => s.validate(&base, &template),
    }
    .map_err(Model)
}

/// `K_n`, with `K_0` as the empty graph.
pub(crate) fn complete(n: usize) -> Graph {
    if n == 0 {
        Graph::empty(0)
    } else {
        generate(GraphKind::Complete(n)).expect("n > 0")
    }
}
