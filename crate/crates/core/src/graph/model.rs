use serde::{Deserialize, Serialize};

use super::{Graph, Path, VertexSet};

/// Why a minor or subdivision model fails to embed its template.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelViolation {
    #[error("model has {actual} parts, template has {expected} vertices")]
    WrongSize { expected: usize, actual: usize },
    #[error("part {0} refers to a vertex outside the host")]
    OutOfRange(usize),
    #[error("branch set {0} is empty")]
    EmptyBranchSet(usize),
    #[error("branch set {0} is not connected")]
    Disconnected(usize),
    #[error("parts {0} and {1} overlap")]
    Overlap(usize, usize),
    #[error("no host edge realises template edge {0}-{1}")]
    MissingEdge(usize, usize),
    #[error("edge path for {0}-{1} is missing, duplicated, or not a path")]
    BadPath(usize, usize),
    #[error("edge path for {0}-{1} does not join its branch vertices")]
    WrongEnds(usize, usize),
}

/// Branch sets indexed by template vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub branch_sets: Vec<VertexSet>,
}

impl MinorModel {
    pub fn new(branch_sets: Vec<VertexSet>) -> Self {
        MinorModel { branch_sets }
    }

    pub fn validate(&self, host: &Graph, template: &Graph) -> Result<(), ModelViolation> {
        let k = template.n();
        if self.branch_sets.len() != k {
            return Err(ModelViolation::WrongSize {
                expected: k,
                actual: self.branch_sets.len(),
            });
        }
        let mut owner = vec![usize::MAX; host.n()];
        for (i, b) in self.branch_sets.iter().enumerate() {
            if b.is_empty() {
                return Err(ModelViolation::EmptyBranchSet(i));
            }
            if host.check_set(b).is_err() {
                return Err(ModelViolation::OutOfRange(i));
            }
            for v in b.iter() {
                if owner[v] != usize::MAX {
                    return Err(ModelViolation::Overlap(owner[v], i));
                }
                owner[v] = i;
            }
            if !host.is_connected_set(b) {
                return Err(ModelViolation::Disconnected(i));
            }
        }
        for (i, j) in template.edges() {
            let touches = self.branch_sets[i]
                .iter()
                .any(|v| host.neighbors(v).iter().any(|&w| owner[w] == j));
            if !touches {
                return Err(ModelViolation::MissingEdge(i, j));
            }
        }
        Ok(())
    }
}

/// Branch vertices plus one host path per template edge, listed in
/// `template.edges()` order and oriented from the smaller template vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubdivisionModel {
    pub branch_vertices: Vec<usize>,
    pub edge_paths: Vec<((usize, usize), Path)>,
}

impl SubdivisionModel {
    pub fn validate(&self, host: &Graph, template: &Graph) -> Result<(), ModelViolation> {
        let k = template.n();
        if self.branch_vertices.len() != k {
            return Err(ModelViolation::WrongSize {
                expected: k,
                actual: self.branch_vertices.len(),
            });
        }
        let mut owner = vec![usize::MAX; host.n()];
        for (i, &v) in self.branch_vertices.iter().enumerate() {
            if v >= host.n() {
                return Err(ModelViolation::OutOfRange(i));
            }
            if owner[v] != usize::MAX {
                return Err(ModelViolation::Overlap(owner[v], i));
            }
            owner[v] = i;
        }
        let edges: Vec<_> = template.edges().collect();
        if self.edge_paths.len() != edges.len() {
            return Err(ModelViolation::WrongSize {
                expected: edges.len(),
                actual: self.edge_paths.len(),
            });
        }
        for (idx, (&(i, j), (key, path))) in edges.iter().zip(&self.edge_paths).enumerate() {
            if *key != (i, j) || !path.is_valid_in(host) || path.len() < 2 {
                return Err(ModelViolation::BadPath(i, j));
            }
            let verts = path.vertices();
            if verts[0] != self.branch_vertices[i] || verts[verts.len() - 1] != self.branch_vertices[j]
            {
                return Err(ModelViolation::WrongEnds(i, j));
            }
            let tag = k + idx;
            for &v in &verts[1..verts.len() - 1] {
                if owner[v] != usize::MAX {
                    return Err(ModelViolation::Overlap(owner[v], tag));
                }
                owner[v] = tag;
            }
        }
        Ok(())
    }

    /// Contracts each edge path onto its lower endpoint's side, giving a minor model.
    pub fn to_minor_model(&self) -> MinorModel {
        let mut sets: Vec<Vec<usize>> = self.branch_vertices.iter().map(|&v| vec![v]).collect();
        for ((i, _), p) in &self.edge_paths {
            let inner = &p.vertices()[1..p.len() - 1];
            sets[*i].extend_from_slice(inner);
        }
        MinorModel::new(sets.into_iter().map(VertexSet::from_iter_unsorted).collect())
    }
}
