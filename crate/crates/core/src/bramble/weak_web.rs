//! A path through every element of a bramble, cut into pieces that each hit
//! a sub-bramble of order at least `k`, and linked pairwise.

use serde::{Deserialize, Serialize};

use super::{certify_order, Bramble};
use crate::config::Constants;
use crate::error::{input, Error, Result};
use crate::graph::{disjoint_paths, Graph, Path, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakKWebOfPaths {
    pub k: usize,
    pub paths: Vec<Path>,
    /// `((i, j), family)` for every `i < j`, in lexicographic order.
    pub linkages: Vec<((usize, usize), Vec<Path>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakWebOutcome {
    Complete(WeakKWebOfPaths),
    /// Fewer than the requested number of paths could be cut off.
    Partial { web: WeakKWebOfPaths, requested: usize },
}

impl WeakKWebOfPaths {
    pub fn order(&self) -> usize {
        self.paths.len()
    }

    pub fn validate(&self, g: &Graph) -> std::result::Result<(), String> {
        let mut owner = vec![usize::MAX; g.n()];
        for (i, p) in self.paths.iter().enumerate() {
            if p.is_empty() || !p.is_valid_in(g) {
                return Err(format!("path {i} is not a simple path"));
            }
            for &v in p.vertices() {
                if owner[v] != usize::MAX {
                    return Err(format!("paths {} and {i} meet at {v}", owner[v]));
                }
                owner[v] = i;
            }
        }
        let h = self.paths.len();
        let expected: Vec<(usize, usize)> = (0..h).flat_map(|i| (i + 1..h).map(move |j| (i, j))).collect();
        let got: Vec<(usize, usize)> = self.linkages.iter().map(|(ij, _)| *ij).collect();
        if got != expected {
            return Err("linkages must list every pair i < j once, in order".into());
        }
        for ((i, j), family) in &self.linkages {
            if family.len() != self.k {
                return Err(format!("pair ({i}, {j}) has {} linkage paths, expected {}", family.len(), self.k));
            }
            let mut used = VertexSet::new();
            for q in family {
                if !q.is_valid_in(g) {
                    return Err(format!("linkage of ({i}, {j}) is not a simple path"));
                }
                let vs = q.vertices();
                let (first, last) = (vs[0], vs[vs.len() - 1]);
                if owner[first] != *i || owner[last] != *j {
                    return Err(format!("linkage of ({i}, {j}) has wrong ends"));
                }
                if vs[1..vs.len() - 1].iter().any(|&v| owner[v] == *i || owner[v] == *j) {
                    return Err(format!("linkage of ({i}, {j}) re-enters its own paths"));
                }
                let qs = q.vertex_set();
                if !used.is_disjoint(&qs) {
                    return Err(format!("linkages of ({i}, {j}) are not disjoint"));
                }
                used = used.union(&qs);
            }
        }
        Ok(())
    }
}

/// Greedy path hitting every element: from the endpoint, which lies in an
/// element met only there, walk inside that element to the first unhit one.
pub fn hitting_path(g: &Graph, b: &Bramble) -> Result<Path> {
    let Some(first) = b.elements.first() else {
        return input("an empty bramble has no hitting path");
    };
    if let Err(v) = b.validate(g) {
        return input(format!("not a bramble: {v}"));
    }
    let start = first.first().expect("validated elements are nonempty");
    let mut path = vec![start];
    let mut on_path = vec![false; g.n()];
    on_path[start] = true;
    let mut current = 0usize;
    loop {
        let Some(next) = (0..b.len()).find(|&i| b.elements[i].iter().all(|v| !on_path[v])) else {
            return Ok(Path::new(path));
        };
        let v = *path.last().expect("nonempty");
        let target = &b.elements[next];
        let mut allowed = vec![false; g.n()];
        for x in b.elements[current].iter().chain(target.iter()) {
            allowed[x] = !on_path[x];
        }
        allowed[v] = true;
        let ext = bfs_into(g, v, &b.elements[current], target, &allowed)
            .ok_or_else(|| Error::Internal(format!("elements {current} and {next} do not touch off the path")))?;
        for &x in &ext[1..] {
            on_path[x] = true;
            path.push(x);
        }
        current = next;
    }
}

/// Shortest walk from `v` through `inside` (minus the target) ending at the
/// first vertex of `target`.
fn bfs_into(g: &Graph, v: usize, inside: &VertexSet, target: &VertexSet, allowed: &[bool]) -> Option<Vec<usize>> {
    let mut region = vec![false; g.n()];
    for x in inside.iter() {
        region[x] = allowed[x] && !target.contains(x);
    }
    for x in target.iter() {
        region[x] = allowed[x];
    }
    region[v] = true;
    // Target vertices may only end the walk.
    let n = g.n();
    let mut prev = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([v]);
    seen[v] = true;
    while let Some(x) = queue.pop_front() {
        if target.contains(x) {
            let mut p = vec![x];
            let mut c = x;
            while prev[c] != usize::MAX {
                c = prev[c];
                p.push(c);
            }
            p.reverse();
            return Some(p);
        }
        for &y in g.neighbors(x) {
            if region[y] && !seen[y] {
                seen[y] = true;
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Cuts the hitting path into pieces whose newly hit sub-brambles have
/// certified order at least `k`, keeps the first `h`, and links every pair
/// with `k` disjoint paths.
pub fn weak_web_from_bramble(g: &Graph, b: &Bramble, k: usize, h: usize, cfg: &Constants) -> Result<WeakWebOutcome> {
    if k == 0 || h == 0 {
        return input("k and h must be positive");
    }
    let path = hitting_path(g, b)?;
    let vs = path.vertices();
    let mut remaining: Vec<usize> = (0..b.len()).collect();
    let mut pieces: Vec<Path> = Vec::new();
    let mut start = 0;
    let mut hit: Vec<usize> = Vec::new();
    for end in 0..vs.len() {
        if pieces.len() == h {
            break;
        }
        let v = vs[end];
        let fresh: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| b.elements[i].contains(v) && !hit.contains(&i))
            .collect();
        if fresh.is_empty() {
            continue;
        }
        hit.extend(fresh);
        let sub = Bramble::new(hit.iter().map(|&i| b.elements[i].clone()).collect());
        if certify_order(&sub, cfg)?.lower_bound >= k {
            pieces.push(Path::new(vs[start..=end].to_vec()));
            remaining.retain(|i| !hit.contains(i));
            hit.clear();
            start = end + 1;
        }
    }
    let mut linkages = Vec::new();
    for i in 0..pieces.len() {
        for j in i + 1..pieces.len() {
            let dp = disjoint_paths(g, &pieces[i].vertex_set(), &pieces[j].vertex_set(), &VertexSet::new())?;
            if dp.paths.len() < k {
                return Err(Error::Internal(format!(
                    "pieces {i} and {j} have only {} disjoint links",
                    dp.paths.len()
                )));
            }
            linkages.push(((i, j), dp.paths.into_iter().take(k).collect()));
        }
    }
    let web = WeakKWebOfPaths { k, paths: pieces, linkages };
    if web.order() < h {
        Ok(WeakWebOutcome::Partial { web, requested: h })
    } else {
        Ok(WeakWebOutcome::Complete(web))
    }
}
