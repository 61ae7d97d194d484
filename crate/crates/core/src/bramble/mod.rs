//! Brambles: validation, order (exact and fractional), randomized and
//! web-based constructions, and the weak web of paths a bramble contains.

mod find;
mod flow;
mod from_web;
mod weak_web;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Constants;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::lp::{int, Cmp, Lp, LpOutcome};

pub use find::{find_bramble, FindBrambleReport};
pub use flow::{max_concurrent_flow, ConcurrentFlow, PathFlow};
pub use from_web::bramble_from_web;
pub use weak_web::{hitting_path, weak_web_from_bramble, WeakKWebOfPaths, WeakWebOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderMethod {
    ExactHittingSet,
    LpFractional,
    Structural,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCertificate {
    pub lower_bound: usize,
    pub method: OrderMethod,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bramble {
    pub elements: Vec<VertexSet>,
    pub order: Option<OrderCertificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BrambleViolation {
    #[error("element {0} has a vertex outside the graph")]
    OutOfRange(usize),
    #[error("element {0} is empty or not connected")]
    Disconnected(usize),
    #[error("elements {0} and {1} do not touch")]
    NotTouching(usize, usize),
}

/// Two vertex sets touch if they share a vertex or an edge joins them.
pub fn touches(g: &Graph, a: &VertexSet, b: &VertexSet) -> bool {
    if !a.is_disjoint(b) {
        return true;
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .any(|v| g.neighbors(v).iter().any(|&w| large.contains(w)))
}

impl Bramble {
    pub fn new(elements: Vec<VertexSet>) -> Self {
        Bramble { elements, order: None }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Connectivity of every element and pairwise touching, from raw sets.
    pub fn validate(&self, g: &Graph) -> std::result::Result<(), BrambleViolation> {
        for (i, e) in self.elements.iter().enumerate() {
            if g.check_set(e).is_err() {
                return Err(BrambleViolation::OutOfRange(i));
            }
            if !g.is_connected_set(e) {
                return Err(BrambleViolation::Disconnected(i));
            }
        }
        for i in 0..self.elements.len() {
            for j in i + 1..self.elements.len() {
                if !touches(g, &self.elements[i], &self.elements[j]) {
                    return Err(BrambleViolation::NotTouching(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn hits_all(&self, set: &VertexSet) -> bool {
        self.elements.iter().all(|e| !e.is_disjoint(set))
    }

    /// Union of all elements.
    pub fn support(&self) -> VertexSet {
        VertexSet::from_iter_unsorted(self.elements.iter().flat_map(|e| e.iter()))
    }
}

/// Minimum hitting set by branch and bound. Elements and the vertices of
/// their union must fit within the configured caps (and 64 vertices).
pub fn bramble_order_exact(b: &Bramble, cfg: &Constants) -> Result<usize> {
    Ok(min_hitting_set(b, cfg)?.len())
}

pub fn min_hitting_set(b: &Bramble, cfg: &Constants) -> Result<VertexSet> {
    if b.elements.len() > cfg.exact_order_max_elements {
        return Err(Error::Capacity {
            what: "bramble elements for exact order",
            limit: cfg.exact_order_max_elements,
            actual: b.elements.len(),
        });
    }
    let support = b.support();
    let vcap = cfg.exact_order_max_vertices.min(64);
    if support.len() > vcap {
        return Err(Error::Capacity {
            what: "bramble vertices for exact order",
            limit: vcap,
            actual: support.len(),
        });
    }
    let idx = |v: usize| support.as_slice().binary_search(&v).expect("in support");
    let mut masks: Vec<u64> = b
        .elements
        .iter()
        .map(|e| e.iter().fold(0u64, |m, v| m | 1 << idx(v)))
        .collect();
    if masks.iter().any(|&m| m == 0) {
        return Err(Error::Input("an empty element cannot be hit".into()));
    }
    // An element containing another is hit whenever the smaller one is.
    masks.sort_unstable_by_key(|m| m.count_ones());
    masks.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for &m in &masks {
        if !kept.iter().any(|&k| k & m == k) {
            kept.push(m);
        }
    }
    let mut best: Option<u64> = None;
    let mut chosen = 0u64;
    search(&kept, &mut chosen, &mut best);
    let best = best.unwrap_or(0);
    Ok((0..support.len())
        .filter(|&i| best >> i & 1 == 1)
        .map(|i| support.as_slice()[i])
        .collect())
}

/// Disjoint unhit elements each need their own hitting vertex.
fn packing_bound(unhit: &[u64]) -> u32 {
    let mut used = 0u64;
    let mut count = 0;
    for &m in unhit {
        if m & used == 0 {
            used |= m;
            count += 1;
        }
    }
    count
}

fn search(masks: &[u64], chosen: &mut u64, best: &mut Option<u64>) {
    let unhit: Vec<u64> = masks.iter().copied().filter(|&m| m & *chosen == 0).collect();
    let have = chosen.count_ones();
    if unhit.is_empty() {
        if best.map_or(true, |b| have < b.count_ones()) {
            *best = Some(*chosen);
        }
        return;
    }
    if let Some(b) = best {
        if have + packing_bound(&unhit) >= b.count_ones() {
            return;
        }
    }
    let pivot = *unhit.iter().min_by_key(|m| m.count_ones()).expect("nonempty");
    let mut cands: Vec<u32> = (0..64).filter(|&i| pivot >> i & 1 == 1).collect();
    cands.sort_by_key(|&i| std::cmp::Reverse(unhit.iter().filter(|&&m| m >> i & 1 == 1).count()));
    for i in cands {
        *chosen |= 1 << i;
        search(masks, chosen, best);
        *chosen &= !(1 << i);
    }
}

/// Optimum of the fractional hitting-set program, solved through its
/// packing dual: maximise the sum of element weights with every vertex
/// carrying total weight at most 1.
pub fn bramble_order_lp(b: &Bramble) -> Result<BigRational> {
    if b.elements.is_empty() {
        return Ok(BigRational::zero());
    }
    if b.elements.iter().any(VertexSet::is_empty) {
        return Err(Error::Input("an empty element cannot be hit".into()));
    }
    let support = b.support();
    let mut lp = Lp::new(b.elements.len());
    lp.objective = (0..b.elements.len()).map(|j| (j, int(1))).collect();
    for v in support.iter() {
        let row: Vec<_> = b
            .elements
            .iter()
            .enumerate()
            .filter(|(_, e)| e.contains(v))
            .map(|(j, _)| (j, int(1)))
            .collect();
        lp.add_row(row, Cmp::Le, int(1));
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Internal(format!("hitting-set LP returned {other:?}"))),
    }
}

/// Best certified lower bound on the order: exact when within caps,
/// otherwise the rounded-up fractional optimum.
pub fn certify_order(b: &Bramble, cfg: &Constants) -> Result<OrderCertificate> {
    match bramble_order_exact(b, cfg) {
        Ok(order) => Ok(OrderCertificate { lower_bound: order, method: OrderMethod::ExactHittingSet }),
        Err(Error::Capacity { .. }) => {
            let v = bramble_order_lp(b)?;
            Ok(OrderCertificate {
                lower_bound: v.ceil().to_integer().to_usize().unwrap_or(0),
                method: OrderMethod::LpFractional,
            })
        }
        Err(e) => Err(e),
    }
}

/// Crosses of the `l x l` grid: row `i` together with column `j`.
pub fn grid_crosses(l: usize) -> Bramble {
    let mut elements = Vec::with_capacity(l * l);
    for i in 0..l {
        for j in 0..l {
            let cross = VertexSet::from_iter_unsorted((0..l).map(|c| i * l + c).chain((0..l).map(|r| r * l + j)));
            elements.push(cross);
        }
    }
    Bramble::new(elements)
}

/// Crosses of the top-left `(l-1) x (l-1)` subgrid together with the last
/// row (without its corner) and the last column. Order `l + 1`, one more
/// than the plain crosses.
pub fn grid_bramble(l: usize) -> Bramble {
    if l < 2 {
        return Bramble::new((0..l * l).map(VertexSet::singleton).collect());
    }
    let m = l - 1;
    let mut elements = Vec::with_capacity(m * m + 2);
    for i in 0..m {
        for j in 0..m {
            elements.push(VertexSet::from_iter_unsorted((0..m).map(|c| i * l + c).chain((0..m).map(|r| r * l + j))));
        }
    }
    elements.push((0..m).map(|c| m * l + c).collect());
    elements.push((0..l).map(|r| r * l + m).collect());
    Bramble::new(elements)
}
