use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::{assemble, best_split, Separator};
use crate::config::Constants;
use crate::error::{input, Error, Result};
use crate::graph::{disjoint_paths, min_vertex_cut, Graph, VertexSet};

/// A separator of `G[u]` together with its sparsity with respect to `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub sep: Separator,
    pub w: VertexSet,
    pub alpha: Rational64,
    /// True when the search was exhaustive, so `alpha` is the optimum.
    pub exact: bool,
}

type Candidate = (Rational64, usize, Separator);

/// Best split of `h - s` for the given cut, in local identifiers, with the
/// smaller of the two side weights as a tie-breaker.
fn evaluate(h: &Graph, wmask: &[bool], s: VertexSet) -> Option<Candidate> {
    let comps = h.components(&s);
    let counts: Vec<usize> = comps
        .iter()
        .map(|c| c.iter().filter(|&v| wmask[v]).count())
        .collect();
    let sw = s.iter().filter(|&v| wmask[v]).count();
    let (product, side) = best_split(&counts, sw)?;
    let alpha = Rational64::new(s.len() as i64, product as i64);
    let a: usize = counts.iter().zip(&side).filter(|(_, &x)| x).map(|(c, _)| c).sum();
    let total: usize = counts.iter().sum();
    let balance = (a + sw).min(total - a + sw);
    Some((alpha, balance, assemble(comps, &side, s)))
}

/// Keeps the sparsest candidate; among equals, the smaller cut, then the
/// more balanced one.
fn consider(best: &mut Option<Candidate>, cand: Option<Candidate>) {
    if let Some((alpha, bal, sep)) = cand {
        let key = |a: Rational64, b: usize, s: &Separator| (a, s.s.len(), std::cmp::Reverse(b));
        let better = best
            .as_ref()
            .map_or(true, |(b, bb, bs)| key(alpha, bal, &sep) < key(*b, *bb, bs));
        if better {
            *best = Some((alpha, bal, sep));
        }
    }
}

fn exhaustive(h: &Graph, wmask: &[bool]) -> Option<Candidate> {
    let n = h.n();
    let mut best = None;
    for bits in 1u64..(1u64 << n) {
        let s: VertexSet = (0..n).filter(|&v| bits >> v & 1 == 1).collect();
        consider(&mut best, evaluate(h, wmask, s));
    }
    best
}

/// Pairs of terminals to cut. All pairs for small `w`, otherwise a fixed set
/// of strides through the sorted terminal list.
fn terminal_pairs(w: &[usize]) -> Vec<(usize, usize)> {
    let t = w.len();
    if t * t.saturating_sub(1) / 2 <= 256 {
        return (0..t)
            .flat_map(|i| (i + 1..t).map(move |j| (w[i], w[j])))
            .collect();
    }
    let mut pairs = Vec::new();
    for stride in [1, t / 4, t / 2] {
        for i in 0..t {
            let j = (i + stride.max(1)) % t;
            if i != j {
                pairs.push((w[i.min(j)], w[i.max(j)]));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn heuristic(h: &Graph, w: &[usize], wmask: &[bool]) -> Option<Candidate> {
    let mut best = None;
    for &x in w {
        consider(&mut best, evaluate(h, wmask, VertexSet::singleton(x)));
    }
    let allowed = vec![true; h.n()];
    for (x, y) in terminal_pairs(w) {
        if let Some(cut) = min_vertex_cut(h, x, y, &allowed) {
            consider(&mut best, evaluate(h, wmask, cut));
        }
    }
    // Menger separators between the two halves of the terminal list.
    let t = w.len();
    for shift in [0, t / 4] {
        let rot: Vec<usize> = (0..t).map(|i| w[(i + shift) % t]).collect();
        let (lo, hi) = rot.split_at(t / 2);
        if lo.is_empty() || hi.is_empty() {
            continue;
        }
        let a = VertexSet::from_iter_unsorted(lo.iter().copied());
        let b = VertexSet::from_iter_unsorted(hi.iter().copied());
        if let Ok(r) = disjoint_paths(h, &a, &b, &VertexSet::new()) {
            consider(&mut best, evaluate(h, wmask, r.separator));
        }
    }
    best
}

/// Finds a sparse separator of `G[u]` with respect to `w`. Exhaustive when
/// `|u| <= cfg.exact_cut_cap`; otherwise the best of single-vertex cuts,
/// pairwise minimum vertex cuts between terminals, and half-versus-half
/// Menger cuts.
pub fn sparse_separator_oracle(
    g: &Graph,
    u: &VertexSet,
    w: &VertexSet,
    cfg: &Constants,
) -> Result<SparsityReport> {
    if w.is_empty() {
        return input("sparse separator oracle needs a nonempty W");
    }
    if !w.is_subset(u) {
        return input("W must lie inside U");
    }
    if !g.is_connected_set(u) {
        return input("G[U] must be connected");
    }
    let (h, map) = g.induced(u)?;
    let local_w: Vec<usize> = w
        .iter()
        .map(|v| u.as_slice().binary_search(&v).expect("w is inside u"))
        .collect();
    let mut wmask = vec![false; h.n()];
    for &x in &local_w {
        wmask[x] = true;
    }
    let exact = h.n() <= cfg.exact_cut_cap;
    let found = if exact {
        exhaustive(&h, &wmask)
    } else {
        heuristic(&h, &local_w, &wmask)
    };
    let (alpha, _, sep) = found.ok_or_else(|| Error::Internal("no separator evaluated".into()))?;
    let lift = |s: &VertexSet| VertexSet::from_iter_unsorted(s.iter().map(|v| map[v]));
    Ok(SparsityReport {
        sep: Separator {
            a: lift(&sep.a),
            b: lift(&sep.b),
            s: lift(&sep.s),
        },
        w: w.clone(),
        alpha,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::separators::sparsity;
    use proptest::prelude::*;

    fn vs(v: &[usize]) -> VertexSet {
        VertexSet::from(v.to_vec())
    }

    #[test]
    fn path_endpoints() {
        let g = generate(GraphKind::Path(5)).unwrap();
        let w = vs(&[0, 4]);
        let r = sparse_separator_oracle(&g, &g.all_vertices(), &w, &Constants::default()).unwrap();
        assert!(r.exact);
        // Every internal cut scores 1, but cutting at a terminal scores 1/|W|.
        for c in 1..4 {
            let sep = Separator {
                a: (0..c).collect(),
                b: (c + 1..5).collect(),
                s: VertexSet::singleton(c),
            };
            assert_eq!(sparsity(&g, &sep, &w).unwrap(), Rational64::from_integer(1));
        }
        assert_eq!(r.alpha, Rational64::new(1, 2));
        assert_eq!(r.sep.s.len(), 1);
    }

    #[test]
    fn two_triangles_share_a_cut_vertex() {
        let g = Graph::new(5, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)]).unwrap();
        let r = sparse_separator_oracle(&g, &g.all_vertices(), &vs(&[0, 1, 3, 4]), &Constants::default())
            .unwrap();
        assert_eq!(r.sep.s, vs(&[2]));
        assert_eq!(r.alpha, Rational64::new(1, 4));
    }

    #[test]
    fn heuristic_reports_true_sparsity() {
        let cfg = Constants { exact_cut_cap: 0, ..Constants::default() };
        let g = generate(GraphKind::Grid(4)).unwrap();
        let w = g.all_vertices();
        let r = sparse_separator_oracle(&g, &w, &w, &cfg).unwrap();
        assert!(!r.exact);
        assert_eq!(sparsity(&g, &r.sep, &w).unwrap(), r.alpha);
        assert_eq!(r.sep.universe(), w);
    }

    #[test]
    fn rejects_bad_preconditions() {
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        let cfg = Constants::default();
        assert!(sparse_separator_oracle(&g, &g.all_vertices(), &vs(&[0]), &cfg).is_err());
        assert!(sparse_separator_oracle(&g, &vs(&[0, 1]), &VertexSet::new(), &cfg).is_err());
        assert!(sparse_separator_oracle(&g, &vs(&[0, 1]), &vs(&[2]), &cfg).is_err());
    }

    /// Minimum over all separators computed independently of the oracle's
    /// subset-sum split: every assignment of components to sides is tried.
    fn brute_alpha(g: &Graph, w: &VertexSet) -> Rational64 {
        let n = g.n();
        let mut best: Option<Rational64> = None;
        for bits in 1u32..(1 << n) {
            let s: VertexSet = (0..n).filter(|&v| bits >> v & 1 == 1).collect();
            let comps = g.components(&s);
            for assign in 0u32..(1 << comps.len()) {
                let mut a = VertexSet::new();
                let mut b = VertexSet::new();
                for (i, c) in comps.iter().enumerate() {
                    let side = if assign >> i & 1 == 1 { &mut a } else { &mut b };
                    *side = side.union(c);
                }
                let sep = Separator { a, b, s: s.clone() };
                if let Ok(x) = sparsity(g, &sep, w) {
                    best = Some(best.map_or(x, |b: Rational64| b.min(x)));
                }
            }
        }
        best.unwrap()
    }

    fn connected_random(n: usize, extra: usize, seed: u64) -> Graph {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
        for _ in 0..extra {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a != b {
                edges.push((a.min(b), a.max(b)));
            }
        }
        Graph::from_edges_dedup(n, &edges).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn exhaustive_oracle_matches_brute_force(n in 2usize..9, extra in 0usize..12, seed in 0u64..1000, wbits in 1u32..512) {
            let g = connected_random(n, extra, seed);
            let mut w: VertexSet = (0..n).filter(|&v| wbits >> v & 1 == 1).collect();
            if w.is_empty() { w.insert(0); }
            let r = sparse_separator_oracle(&g, &g.all_vertices(), &w, &Constants::default()).unwrap();
            prop_assert_eq!(r.alpha, brute_alpha(&g, &w));
            prop_assert_eq!(sparsity(&g, &r.sep, &w).unwrap(), r.alpha);
        }

        #[test]
        fn sparsity_bracket_on_connected_hosts(n in 2usize..11, extra in 0usize..15, seed in 0u64..1000, wbits in 1u32..2048) {
            let g = connected_random(n, extra, seed);
            let mut w: VertexSet = (0..n).filter(|&v| wbits >> v & 1 == 1).collect();
            if w.is_empty() { w.insert(n - 1); }
            let r = sparse_separator_oracle(&g, &g.all_vertices(), &w, &Constants::default()).unwrap();
            let t = w.len() as i64;
            prop_assert!(r.alpha >= Rational64::new(1, t * t));
            prop_assert!(r.alpha <= Rational64::new(1, t));
        }
    }
}
