//! Certificate files: a hash of the input graph, a typed payload, and the
//! run that produced it. Verification recomputes everything from raw data.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bramble::{certify_order, Bramble, OrderMethod};
use crate::config::Constants;
use crate::decomposition::{exact_treewidth, TreeDecomposition};
use crate::error::{Error, Result};
use crate::fpt::{DichotomyResult, ParameterPlugin, Verdict};
use crate::graph::{io, Graph};
use crate::gridlike::{validate_gridlike, GridLikeMinor};
use crate::perfect::{check_structure, StructureReport, PerfectBramble};
use crate::separators::UnsplittableSet;
use crate::web::KWeb;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRef {
    /// SHA-256 of the graph written canonically in `format`.
    pub sha256: String,
    pub format: io::Format,
    pub n: usize,
    pub m: usize,
}

impl GraphRef {
    pub fn of(g: &Graph, format: io::Format) -> Self {
        let digest = Sha256::digest(io::write(g, format).as_bytes());
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        GraphRef { sha256, format, n: g.n(), m: g.m() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "payload")]
pub enum Certificate {
    Bramble(Bramble),
    Kweb(KWeb),
    Gridlike(GridLikeMinor),
    PerfectBramble { bramble: PerfectBramble, structure: Option<StructureReport> },
    /// `exact` claims the width equals the treewidth.
    TreeDecomposition { decomposition: TreeDecomposition, exact: bool },
    UnsplittableSet(UnsplittableSet),
    Dichotomy(DichotomyResult),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Bramble(_) => "bramble",
            Certificate::Kweb(_) => "kweb",
            Certificate::Gridlike(_) => "gridlike",
            Certificate::PerfectBramble { .. } => "perfect-bramble",
            Certificate::TreeDecomposition { .. } => "tree-decomposition",
            Certificate::UnsplittableSet(_) => "unsplittable-set",
            Certificate::Dichotomy(_) => "dichotomy",
        }
    }

    pub fn validate(&self, g: &Graph, cfg: &Constants) -> std::result::Result<(), String> {
        match self {
            Certificate::Bramble(b) => {
                b.validate(g).map_err(|e| e.to_string())?;
                if let Some(claim) = b.order {
                    // Structural claims are re-derived by exact search, which
                    // can afford the full 64-vertex support here.
                    let wide = Constants { exact_order_max_vertices: 64, ..cfg.clone() };
                    let again = certify_order(b, &wide).map_err(|e| e.to_string())?;
                    let unchecked = claim.method == OrderMethod::Structural && again.method != OrderMethod::ExactHittingSet;
                    if unchecked || again.lower_bound < claim.lower_bound {
                        return Err(format!("order {} not reproduced (got {})", claim.lower_bound, again.lower_bound));
                    }
                }
                Ok(())
            }
            Certificate::Kweb(w) => w.validate(g).map_err(|e| e.to_string()),
            Certificate::Gridlike(m) => validate_gridlike(g, m).map_err(|e| e.to_string()),
            Certificate::PerfectBramble { bramble, structure } => {
                bramble.validate(g).map_err(|e| e.to_string())?;
                let again = check_structure(bramble, cfg).map_err(|e| e.to_string())?;
                match structure {
                    Some(l) if *l != again => Err("structural report differs on recomputation".into()),
                    _ => Ok(()),
                }
            }
            Certificate::TreeDecomposition { decomposition, exact } => {
                decomposition.validate(g).map_err(|e| e.to_string())?;
                if *exact {
                    let (tw, _) = exact_treewidth(g, cfg).map_err(|e| e.to_string())?;
                    if tw != decomposition.width {
                        return Err(format!("claimed exact width {} but treewidth is {tw}", decomposition.width));
                    }
                }
                Ok(())
            }
            Certificate::UnsplittableSet(u) => u.validate(g, cfg),
            Certificate::Dichotomy(d) => validate_dichotomy(g, d),
        }
    }
}

fn validate_dichotomy(g: &Graph, d: &DichotomyResult) -> std::result::Result<(), String> {
    let plugin = ParameterPlugin::by_name(&d.parameter).map_err(|e| e.to_string())?;
    if let Some(td) = &d.decomposition_used {
        td.validate(g).map_err(|e| e.to_string())?;
    }
    match &d.verdict {
        Verdict::Exceeds { guaranteed, bramble } => {
            bramble.validate(g).map_err(|e| e.to_string())?;
            if *guaranteed != (plugin.guaranteed)(bramble.len()) || *guaranteed <= d.k {
                return Err(format!("bramble of {} elements does not force the parameter above {}", bramble.len(), d.k));
            }
            Ok(())
        }
        Verdict::Exact { value, solution } => {
            if solution.value_in(g) != Some(*value) {
                return Err(format!("solution does not certify value {value}"));
            }
            let td = d.decomposition_used.as_ref().ok_or("exact value without a decomposition")?;
            let (again, _) = (plugin.width_solver)(g, td).map_err(|e| e.to_string())?;
            if again != *value {
                return Err(format!("recomputed value {again}, claimed {value}"));
            }
            Ok(())
        }
        Verdict::BeyondSolver { width, .. } => match &d.decomposition_used {
            Some(td) if td.width == *width => Ok(()),
            _ => Err("width claim does not match the decomposition".into()),
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub algorithm: String,
    pub seed: Option<u64>,
    pub constants: Constants,
    /// Outcome of the validator run when the file was written.
    pub validated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub graph_ref: GraphRef,
    pub certificate: Certificate,
    pub provenance: Provenance,
}

impl WitnessFile {
    /// Validates the certificate and records the result.
    pub fn new(g: &Graph, format: io::Format, certificate: Certificate, algorithm: &str, seed: Option<u64>, cfg: &Constants) -> Self {
        let validated = certificate.validate(g, cfg).is_ok();
        WitnessFile {
            graph_ref: GraphRef::of(g, format),
            certificate,
            provenance: Provenance { algorithm: algorithm.into(), seed, constants: cfg.clone(), validated },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("witness serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), msg: e.to_string() })
    }

    /// Checks the graph hash, then re-validates the payload under the
    /// recorded constants.
    pub fn verify(&self, g: &Graph) -> std::result::Result<(), String> {
        if GraphRef::of(g, self.graph_ref.format) != self.graph_ref {
            return Err("graph does not match the recorded hash".into());
        }
        self.certificate.validate(g, &self.provenance.constants)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bramble::grid_bramble;
    use crate::graph::{generate, GraphKind, VertexSet};

    fn grid3() -> Graph {
        generate(GraphKind::Grid(3)).unwrap()
    }

    #[test]
    fn round_trip_and_verify() {
        let g = grid3();
        let cfg = Constants::desk();
        let mut b = grid_bramble(3);
        b.order = Some(certify_order(&b, &cfg).unwrap());
        let w = WitnessFile::new(&g, io::Format::Edgelist, Certificate::Bramble(b), "grid-crosses", None, &cfg);
        assert!(w.provenance.validated);
        let text = w.to_json();
        let back = WitnessFile::from_json(&text).unwrap();
        assert_eq!(back, w);
        assert_eq!(back.to_json(), text);
        back.verify(&g).unwrap();
        assert!(text.contains("\"kind\": \"bramble\""));
    }

    #[test]
    fn other_graph_is_rejected() {
        let g = grid3();
        let cfg = Constants::desk();
        let td = TreeDecomposition::single_bag(&g);
        let w = WitnessFile::new(&g, io::Format::Dimacs, Certificate::TreeDecomposition { decomposition: td, exact: false }, "single-bag", None, &cfg);
        w.verify(&g).unwrap();
        assert!(w.verify(&generate(GraphKind::Path(9)).unwrap()).is_err());
    }

    #[test]
    fn exact_width_claim_is_checked() {
        let g = grid3();
        let cfg = Constants::desk();
        let (_, td) = exact_treewidth(&g, &cfg).unwrap();
        let good = Certificate::TreeDecomposition { decomposition: td, exact: true };
        assert!(good.validate(&g, &cfg).is_ok());
        let bad = Certificate::TreeDecomposition { decomposition: TreeDecomposition::single_bag(&g), exact: true };
        assert!(bad.validate(&g, &cfg).is_err());
    }

    #[test]
    fn corrupted_payload_fails() {
        let g = grid3();
        let cfg = Constants::desk();
        let w = WitnessFile::new(&g, io::Format::Edgelist, Certificate::Bramble(grid_bramble(3)), "grid-crosses", None, &cfg);
        let mut bad = w.clone();
        if let Certificate::Bramble(b) = &mut bad.certificate {
            b.elements.push(VertexSet::from(vec![0, 8]));
        }
        assert!(bad.verify(&g).is_err());
        let mut inflated = w;
        if let Certificate::Bramble(b) = &mut inflated.certificate {
            b.order = Some(crate::bramble::OrderCertificate { lower_bound: 9, method: OrderMethod::ExactHittingSet });
        }
        assert!(inflated.verify(&g).is_err());
    }
}
