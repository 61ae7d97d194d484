use super::{bramble_order_exact, Bramble, OrderCertificate, OrderMethod};
use crate::config::Constants;
use crate::error::{input, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::web::KWeb;

/// From a web of order `h` whose linkages have at least `h^2` paths: for
/// every `i` and every `t < h^2`, the subtree `T_i` together with the `t`-th
/// path towards every other flat, each stopped one vertex short of it.
///
/// Gives `h^3` elements. A vertex off the subtrees lies on at most one path
/// of each family, so it meets at most `h` of the `h^2` sets belonging to an
/// unhit subtree; hence the order is at least `h`. For `h <= 3` this is also
/// recomputed exactly when within the configured caps.
pub fn bramble_from_web(g: &Graph, web: &KWeb, cfg: &Constants) -> Result<Bramble> {
    if let Err(v) = web.validate(g) {
        return input(format!("invalid web: {v}"));
    }
    let h = web.order();
    if web.k < h * h {
        return input(format!("a web of order {h} needs {} linkage paths per pair, has {}", h * h, web.k));
    }
    let families: Vec<Vec<Vec<_>>> = (0..h)
        .map(|i| (0..h).map(|j| if i == j { Vec::new() } else { web.paths_between(i, j) }).collect())
        .collect();
    let mut elements = Vec::with_capacity(h * h * h);
    for i in 0..h {
        for t in 0..h * h {
            let mut members: Vec<usize> = web.subtrees[i].iter().collect();
            for (j, fam) in families[i].iter().enumerate() {
                if j != i {
                    let p = fam[t].vertices();
                    members.extend_from_slice(&p[..p.len() - 1]);
                }
            }
            elements.push(VertexSet::from_iter_unsorted(members));
        }
    }
    let mut b = Bramble::new(elements);
    if let Err(v) = b.validate(g) {
        return Err(Error::Internal(format!("web bramble failed validation: {v}")));
    }
    if h <= 3 {
        match bramble_order_exact(&b, cfg) {
            Ok(order) if order < h => {
                return Err(Error::Internal(format!("web bramble has order {order} < {h}")));
            }
            Ok(_) | Err(Error::Capacity { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    b.order = Some(OrderCertificate { lower_bound: h, method: OrderMethod::Structural });
    Ok(b)
}
