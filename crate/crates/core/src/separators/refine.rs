use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{assemble, oracle::sparse_separator_oracle, sparsity, Separator};
use crate::config::Constants;
use crate::decomposition::TreeDecomposition;
use crate::error::{input, Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaProvenance {
    /// The oracle searched exhaustively; `alpha_lb` is the true minimum.
    Exact,
    /// Found sparsity divided by `beta0`; valid only if the heuristic oracle
    /// is within that factor of optimal.
    HeuristicConditional,
}

/// A connected `u` and `w ⊆ u` for which no sparse separator was found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsplittableSet {
    pub u: VertexSet,
    pub w: VertexSet,
    pub k: usize,
    /// Separator budget `ceil(beta1 * k)` in force when the set was found.
    pub s: usize,
    /// Sparsest separator of `G[u]` the oracle found, and its sparsity.
    pub sep: Separator,
    pub alpha_found: Rational64,
    pub alpha_lb: f64,
    pub provenance: AlphaProvenance,
}

impl UnsplittableSet {
    /// Re-checks connectivity, containment and size bounds; when the set is
    /// small enough, also recomputes the sparsest separator exhaustively.
    pub fn validate(&self, g: &Graph, cfg: &Constants) -> std::result::Result<(), String> {
        if g.check_set(&self.u).is_err() || !g.is_connected_set(&self.u) {
            return Err("u is not a connected vertex set".into());
        }
        if !self.w.is_subset(&self.u) {
            return Err("w is not inside u".into());
        }
        if self.s != cfg.sep_budget(self.k) {
            return Err("recorded budget does not match k".into());
        }
        if self.w.len() < 3 * self.s || self.w.len() > 4 * self.s {
            return Err(format!("|w| = {} outside [3s, 4s] for s = {}", self.w.len(), self.s));
        }
        self.sep.check(g)?;
        if self.sep.universe() != self.u {
            return Err("recorded separator does not partition u".into());
        }
        if sparsity(g, &self.sep, &self.w).map_err(|e| e.to_string())? != self.alpha_found {
            return Err("recorded sparsity does not match the recorded separator".into());
        }
        let found = self.alpha_found.to_f64().unwrap_or(0.0);
        let lb = match self.provenance {
            AlphaProvenance::Exact => found,
            AlphaProvenance::HeuristicConditional => found / cfg.beta0,
        };
        if (lb - self.alpha_lb).abs() > 1e-9 * lb.abs().max(1.0) {
            return Err(format!("alpha_lb {} does not follow from {}", self.alpha_lb, self.alpha_found));
        }
        if self.provenance == AlphaProvenance::Exact && self.u.len() <= cfg.exact_cut_cap {
            let exact_cfg = Constants { exact_cut_cap: self.u.len(), ..cfg.clone() };
            let best = sparse_separator_oracle(g, &self.u, &self.w, &exact_cfg)
                .map_err(|e| e.to_string())?;
            if best.alpha != self.alpha_found {
                return Err(format!(
                    "claimed optimum {} but exhaustive search gives {}",
                    self.alpha_found, best.alpha
                ));
            }
        }
        Ok(())
    }
}

/// Outcome of the refinement loop.
#[derive(Clone, Debug, PartialEq)]
pub enum Refined {
    Separator(Separator),
    Unsplittable(UnsplittableSet),
}

/// Orients a separator so that `a ∪ s` carries at least as much of `w` as `b ∪ s`.
fn orient(sep: Separator, w: &VertexSet) -> Separator {
    if sep.a.count_in(w) < sep.b.count_in(w) {
        sep.swap_sides()
    } else {
        sep
    }
}

/// Puts components on side `a`, heaviest first, until `a` holds a quarter of
/// `w`; when no component exceeds three quarters, both sides stay within it.
fn pack_three_quarters(g: &Graph, u0: &VertexSet, acc: VertexSet, w0: &VertexSet) -> Separator {
    let mut comps = g.components_of(&u0.difference(&acc));
    comps.sort_by_key(|c| std::cmp::Reverse(c.count_in(w0)));
    let mut side = vec![false; comps.len()];
    let mut load = 0;
    for (i, c) in comps.iter().enumerate() {
        if 4 * load >= w0.len() {
            break;
        }
        side[i] = true;
        load += c.count_in(w0);
    }
    assemble(comps, &side, acc)
}

pub(crate) fn refine(
    g: &Graph,
    u0: &VertexSet,
    w0: &VertexSet,
    k: usize,
    s: usize,
    cfg: &Constants,
) -> Result<Refined> {
    let mut u = u0.clone();
    let mut w = w0.clone();
    let mut acc = VertexSet::new();
    loop {
        let rep = sparse_separator_oracle(g, &u, &w, cfg)?;
        let sep = orient(rep.sep.clone(), &w);
        let light = sep.b.union(&sep.s).count_in(&w);
        if sep.s.len() * w0.len() > s * light {
            let alpha_lb = match rep.exact {
                true => rep.alpha.to_f64().unwrap_or(0.0),
                false => rep.alpha.to_f64().unwrap_or(0.0) / cfg.beta0,
            };
            return Ok(Refined::Unsplittable(UnsplittableSet {
                u,
                w,
                k,
                s,
                sep: rep.sep,
                alpha_found: rep.alpha,
                alpha_lb,
                provenance: if rep.exact {
                    AlphaProvenance::Exact
                } else {
                    AlphaProvenance::HeuristicConditional
                },
            }));
        }
        acc = acc.union(&sep.s);
        let heavy = g
            .components_of(&u.difference(&acc))
            .into_iter()
            .find(|c| 4 * c.count_in(w0) > 3 * w0.len());
        match heavy {
            Some(c) => {
                w = w0.intersection(&c);
                u = c;
            }
            None => break,
        }
    }
    let sep = pack_three_quarters(g, u0, acc, w0);
    if sep.s.len() > s || !sep.is_balanced(w0, Rational64::new(3, 4)) {
        return Err(Error::Internal(format!(
            "refinement produced |S| = {} with budget {s}",
            sep.s.len()
        )));
    }
    Ok(Refined::Separator(sep))
}

/// Either a 3/4-balanced separator of `w0` in `G[u0]` of size at most
/// `ceil(beta1 * k)`, or a set with no sparse separator.
pub fn refine_or_unsplittable(
    g: &Graph,
    u0: &VertexSet,
    w0: &VertexSet,
    k: usize,
    cfg: &Constants,
) -> Result<Refined> {
    let s = cfg.sep_budget(k);
    if w0.len() != 4 * s {
        return input(format!("|W0| must be 4*ceil(beta1*k) = {}, got {}", 4 * s, w0.len()));
    }
    if !w0.is_subset(u0) || !g.is_connected_set(u0) {
        return input("W0 must lie inside a connected U0");
    }
    refine(g, u0, w0, k, s, cfg)
}

struct Builder<'a> {
    g: &'a Graph,
    k: usize,
    s: usize,
    cfg: &'a Constants,
    bags: Vec<VertexSet>,
    edges: Vec<(usize, usize)>,
}

impl Builder<'_> {
    fn add(&mut self, bag: VertexSet, parent: Option<usize>) -> usize {
        let id = self.bags.len();
        self.bags.push(bag);
        if let Some(p) = parent {
            self.edges.push((p, id));
        }
        id
    }

    /// Decomposes region `u` whose boundary `w` (at most `4s` vertices) must
    /// sit in the region's root bag.
    fn region(&mut self, u: VertexSet, w: VertexSet, parent: Option<usize>) -> Result<Option<UnsplittableSet>> {
        let mut stack = vec![(u, w, parent)];
        while let Some((u, w, parent)) = stack.pop() {
            if u.len() <= 5 * self.s + 1 {
                self.add(u, parent);
                continue;
            }
            let interior = u.difference(&w);
            let v = interior.first().expect("region larger than its boundary");
            let w_bal = if w.len() >= 4 * self.s {
                w.clone()
            } else {
                let fill = interior.iter().take(4 * self.s - w.len());
                w.union(&fill.collect())
            };
            let sep = match refine(self.g, &u, &w_bal, self.k, self.s, self.cfg)? {
                Refined::Separator(sep) => sep,
                Refined::Unsplittable(x) => return Ok(Some(x)),
            };
            let mut bag = w.union(&sep.s);
            bag.insert(v);
            let id = self.add(bag.clone(), parent);
            for c in self.g.components_of(&u.difference(&bag)).into_iter().rev() {
                let boundary = self.g.neighborhood(&c);
                if boundary.len() > 4 * self.s || !boundary.is_subset(&bag) {
                    return Err(Error::Internal(format!(
                        "child boundary of size {} exceeds 4s = {}",
                        boundary.len(),
                        4 * self.s
                    )));
                }
                stack.push((c.union(&boundary), boundary, Some(id)));
            }
        }
        Ok(None)
    }
}

/// Recursive balanced-separator decomposition with budget `s = ceil(beta1 * k)`.
/// Width at most `5s`; the first set without a sparse separator aborts it.
pub fn decompose_or_unsplittable(
    g: &Graph,
    k: usize,
    cfg: &Constants,
) -> Result<std::result::Result<TreeDecomposition, UnsplittableSet>> {
    let s = cfg.sep_budget(k);
    if s == 0 {
        return input("separator budget must be positive");
    }
    let mut b = Builder { g, k, s, cfg, bags: Vec::new(), edges: Vec::new() };
    if g.n() == 0 {
        return Ok(Ok(TreeDecomposition::new(Vec::new(), vec![VertexSet::new()])));
    }
    let mut prev_root: Option<usize> = None;
    for comp in g.components(&VertexSet::new()) {
        let root = b.bags.len();
        if let Some(x) = b.region(comp, VertexSet::new(), None)? {
            return Ok(Err(x));
        }
        if let Some(p) = prev_root {
            b.edges.push((p, root));
        }
        prev_root = Some(root);
    }
    Ok(Ok(TreeDecomposition::new(b.edges, b.bags)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoublingOutcome {
    /// Largest tried `k` that produced a set without a sparse separator.
    pub failed_k: Option<usize>,
    pub witness: Option<UnsplittableSet>,
    /// First `k` at which a decomposition was built.
    pub success_k: usize,
    pub decomposition: TreeDecomposition,
    /// Every `(k, succeeded)` in the order tried.
    pub attempts: Vec<(usize, bool)>,
}

/// Runs the decomposition at `k = 1, 2, 4, ...` until it succeeds.
pub fn doubling_driver(g: &Graph, cfg: &Constants) -> Result<DoublingOutcome> {
    cfg.check()?;
    let mut witness = None;
    let mut failed_k = None;
    let mut attempts = Vec::new();
    let mut k = 1usize;
    loop {
        match decompose_or_unsplittable(g, k, cfg)? {
            Ok(td) => {
                attempts.push((k, true));
                return Ok(DoublingOutcome { failed_k, witness, success_k: k, decomposition: td, attempts });
            }
            Err(x) => {
                attempts.push((k, false));
                failed_k = Some(k);
                witness = Some(x);
            }
        }
        k = k
            .checked_mul(2)
            .ok_or_else(|| Error::Internal("doubling overflowed".into()))?;
    }
}
