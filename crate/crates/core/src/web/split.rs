use super::TreeGraph;
use crate::error::{input, Error, Result};
use crate::graph::{forest_is_connected, VertexSet};

/// `l` disjoint subtrees of `t`, each holding exactly `k` vertices of `x`.
///
/// Post-order from a leaf: once the part still hanging below `v` holds at
/// least `k` members of `x`, `v` takes whole child parts while they fit and
/// grows into the next one vertex by vertex until the count is exactly `k`.
/// Everything below `v` is then dropped, which costs at most `2k - 1` members.
pub fn split_flat_subtrees(t: &TreeGraph, x: &VertexSet, k: usize, l: usize) -> Result<Vec<VertexSet>> {
    if k == 0 {
        return input("k must be positive");
    }
    if x.len() < 2 * k * l {
        return input(format!("need at least {} marked vertices, got {}", 2 * k * l, x.len()));
    }
    if !x.is_subset(&t.vertices) {
        return input("marked vertices must lie on the tree");
    }
    let degrees = t.degrees();
    if t.vertices.is_empty()
        || t.edges.len() + 1 != t.vertices.len()
        || !forest_is_connected(&t.vertices, &t.edges)
        || degrees.values().any(|&d| d > 3)
    {
        return input("not a sub-cubic tree");
    }
    if l == 0 {
        return Ok(Vec::new());
    }
    let adj = t.adjacency();
    let root = *degrees.iter().find(|(_, &d)| d <= 1).expect("a finite tree has a leaf").0;
    // Parent pointers and a top-down order.
    let mut order = vec![root];
    let mut parent = std::collections::BTreeMap::from([(root, usize::MAX)]);
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for &u in &adj[&v] {
            if u != parent[&v] {
                parent.insert(u, v);
                order.push(u);
            }
        }
        i += 1;
    }
    let (adj, parent) = (&adj, &parent);
    let children = |v: usize| adj[&v].iter().copied().filter(move |&u| u != parent[&v]);
    let mut removed = std::collections::BTreeSet::new();
    let mut cnt = std::collections::BTreeMap::new();
    let mut pieces = Vec::new();
    for &v in order.iter().rev() {
        let c: usize = usize::from(x.contains(v)) + children(v).map(|u| cnt[&u]).sum::<usize>();
        cnt.insert(v, c);
        if c < k {
            continue;
        }
        let mut piece = vec![v];
        let mut count = usize::from(x.contains(v));
        for u in children(v).filter(|u| !removed.contains(u)) {
            if count == k {
                break;
            }
            let below = hanging(u, &children, &removed);
            if count + cnt[&u] <= k {
                count += cnt[&u];
                piece.extend(below);
            } else {
                // `below` is in top-down order, so every prefix is connected.
                for w in below {
                    if count == k {
                        break;
                    }
                    count += usize::from(x.contains(w));
                    piece.push(w);
                }
            }
        }
        if count != k {
            return Err(Error::Internal("subtree split overshot".into()));
        }
        let dropped = hanging(v, &children, &removed);
        removed.extend(dropped);
        cnt.insert(v, 0);
        pieces.push(VertexSet::from_iter_unsorted(piece));
        if pieces.len() == l {
            return Ok(pieces);
        }
    }
    Err(Error::Internal(format!("found only {} of {l} subtrees", pieces.len())))
}

/// Vertices below and including `v` that are still attached, top-down.
fn hanging<I: Iterator<Item = usize>>(
    v: usize,
    children: &impl Fn(usize) -> I,
    removed: &std::collections::BTreeSet<usize>,
) -> Vec<usize> {
    let mut out = vec![v];
    let mut i = 0;
    while i < out.len() {
        let w = out[i];
        out.extend(children(w).filter(|u| !removed.contains(u)));
        i += 1;
    }
    out
}
