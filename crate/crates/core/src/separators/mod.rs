//! Vertex separators, the sparsity measure, and the refinement machinery that
//! either decomposes a graph or isolates a set with no sparse separator.

mod oracle;
mod refine;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::config::Constants;
use crate::error::{input, Error, Result};
use crate::graph::{Graph, VertexSet};

pub use oracle::{sparse_separator_oracle, SparsityReport};
pub use refine::{
    decompose_or_unsplittable, doubling_driver, refine_or_unsplittable, AlphaProvenance,
    DoublingOutcome, Refined, UnsplittableSet,
};

/// A partition `(a, b, s)` of some vertex universe with no edge between `a` and `b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separator {
    pub a: VertexSet,
    pub b: VertexSet,
    pub s: VertexSet,
}

impl Separator {
    pub fn universe(&self) -> VertexSet {
        self.a.union(&self.b).union(&self.s)
    }

    /// Checks disjointness and the absence of `a`–`b` edges.
    pub fn check(&self, g: &Graph) -> std::result::Result<(), String> {
        for part in [&self.a, &self.b, &self.s] {
            if g.check_set(part).is_err() {
                return Err("separator part leaves the vertex range".into());
            }
        }
        if !self.a.is_disjoint(&self.b) || !self.a.is_disjoint(&self.s) || !self.b.is_disjoint(&self.s)
        {
            return Err("separator parts overlap".into());
        }
        let bmask = self.b.mask(g.n());
        for u in self.a.iter() {
            if let Some(&v) = g.neighbors(u).iter().find(|&&v| bmask[v]) {
                return Err(format!("edge {u}-{v} joins the two sides"));
            }
        }
        Ok(())
    }

    /// `|a ∩ w|, |b ∩ w| <= gamma * |w|`.
    pub fn is_balanced(&self, w: &VertexSet, gamma: Rational64) -> bool {
        let cap = gamma * Rational64::from_integer(w.len() as i64);
        let ok = |x: usize| Rational64::from_integer(x as i64) <= cap;
        ok(self.a.count_in(w)) && ok(self.b.count_in(w))
    }

    pub(crate) fn swap_sides(self) -> Self {
        Separator { a: self.b, b: self.a, s: self.s }
    }
}

/// `|S| / (|(A∪S)∩W| * |(B∪S)∩W|)`.
pub fn sparsity(g: &Graph, sep: &Separator, w: &VertexSet) -> Result<Rational64> {
    sep.check(g).map_err(Error::Input)?;
    let sw = sep.s.count_in(w);
    let da = sep.a.count_in(w) + sw;
    let db = sep.b.count_in(w) + sw;
    if da == 0 || db == 0 {
        return input("sparsity undefined: one side meets no vertex of W");
    }
    Ok(Rational64::new(sep.s.len() as i64, (da * db) as i64))
}

/// Splits components with the given `W`-counts into two sides so that the
/// product `(a + sw) * (b + sw)` is as large as possible. Returns the product
/// and, per component, whether it goes to side `a`. `None` when every split
/// leaves one factor at zero.
pub(crate) fn best_split(counts: &[usize], sw: usize) -> Option<(usize, Vec<bool>)> {
    let total: usize = counts.iter().sum();
    // reach[i][x]: sum x reachable using the first i components.
    let mut reach = vec![vec![false; total + 1]; counts.len() + 1];
    reach[0][0] = true;
    for (i, &c) in counts.iter().enumerate() {
        for x in 0..=total {
            if reach[i][x] {
                reach[i + 1][x] = true;
                reach[i + 1][x + c] = true;
            }
        }
    }
    let mut best: Option<(usize, usize)> = None;
    for x in 0..=total {
        if !reach[counts.len()][x] {
            continue;
        }
        let p = (x + sw) * (total - x + sw);
        if p > 0 && best.map_or(true, |(bp, _)| p > bp) {
            best = Some((p, x));
        }
    }
    let (product, mut x) = best?;
    let mut side = vec![false; counts.len()];
    for i in (0..counts.len()).rev() {
        if !reach[i][x] {
            side[i] = true;
            x -= counts[i];
        }
    }
    Some((product, side))
}

/// Splits components into two sides so that each holds at most `gamma * |w|`
/// vertices of `w`, if possible.
fn balanced_split(counts: &[usize], limit: usize) -> Option<Vec<bool>> {
    let total: usize = counts.iter().sum();
    if total > 2 * limit {
        return None;
    }
    let mut reach = vec![vec![false; total + 1]; counts.len() + 1];
    reach[0][0] = true;
    for (i, &c) in counts.iter().enumerate() {
        for x in 0..=total {
            if reach[i][x] {
                reach[i + 1][x] = true;
                reach[i + 1][x + c] = true;
            }
        }
    }
    let mut x = (total.saturating_sub(limit)..=limit.min(total)).find(|&x| reach[counts.len()][x])?;
    let mut side = vec![false; counts.len()];
    for i in (0..counts.len()).rev() {
        if !reach[i][x] {
            side[i] = true;
            x -= counts[i];
        }
    }
    Some(side)
}

pub(crate) fn assemble(comps: Vec<VertexSet>, side: &[bool], s: VertexSet) -> Separator {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (c, &in_a) in comps.into_iter().zip(side) {
        if in_a {
            a.extend(c.into_vec());
        } else {
            b.extend(c.into_vec());
        }
    }
    Separator {
        a: VertexSet::from_iter_unsorted(a),
        b: VertexSet::from_iter_unsorted(b),
        s,
    }
}

/// Iterates over all subsets of `0..n` of size at most `k`, smallest first,
/// each size in lexicographic order.
pub(crate) fn subsets_up_to(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..=k.min(n)).flat_map(move |size| Combinations::new(n, size))
}

struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.cur = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Exhaustive search for a separator with `|S| <= size_cap` leaving at most
/// `gamma * |w|` vertices of `w` on either side. `Ok(None)` proves none exists.
pub fn balanced_separator_exact(
    g: &Graph,
    w: &VertexSet,
    size_cap: usize,
    gamma: Rational64,
    cfg: &Constants,
) -> Result<Option<Separator>> {
    g.check_set(w)?;
    if g.n() > cfg.exact_cut_cap {
        return Err(Error::Capacity {
            what: "vertices for exhaustive separator search",
            limit: cfg.exact_cut_cap,
            actual: g.n(),
        });
    }
    let limit = (gamma * Rational64::from_integer(w.len() as i64)).floor().to_integer();
    let limit = limit.max(0) as usize;
    let wmask = w.mask(g.n());
    for s in subsets_up_to(g.n(), size_cap) {
        let s = VertexSet::from(s);
        let comps = g.components(&s);
        let counts: Vec<usize> = comps
            .iter()
            .map(|c| c.iter().filter(|&v| wmask[v]).count())
            .collect();
        if let Some(side) = balanced_split(&counts, limit) {
            return Ok(Some(assemble(comps, &side, s)));
        }
    }
    Ok(None)
}
