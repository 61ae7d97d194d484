//! Width-bounded dynamic programs over nice tree decompositions.
//!
//! Edges are decided when their first endpoint is forgotten; at that moment
//! the other endpoint is still in the bag.

use std::collections::HashMap;
use std::rc::Rc;

use super::nice::{NiceTd, Node, Trail};
use crate::decomposition::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{Graph, Path, VertexSet};

pub const VC_WIDTH_CAP: usize = 16;
pub const PATH_WIDTH_CAP: usize = 8;

fn over_cap(what: &'static str, limit: usize, actual: usize) -> Error {
    Error::Capacity { what, limit, actual }
}

fn pos(bag: &[usize], v: usize) -> usize {
    bag.binary_search(&v).expect("vertex in bag")
}

type VcTable = HashMap<u32, (usize, Rc<Trail<usize>>)>;

fn keep_min(t: &mut VcTable, k: u32, val: usize, trail: Rc<Trail<usize>>) {
    match t.get(&k) {
        Some((old, _)) if *old <= val => {}
        _ => {
            t.insert(k, (val, trail));
        }
    }
}

/// Minimum vertex cover and a cover attaining it.
pub fn vc_width_dp(g: &Graph, td: &TreeDecomposition) -> Result<(usize, VertexSet)> {
    let nice = NiceTd::build(g, td)?;
    if td.width > VC_WIDTH_CAP {
        return Err(over_cap("width for the vertex cover DP", VC_WIDTH_CAP, td.width));
    }
    let nil = Rc::new(Trail::Nil);
    let mut tables: Vec<Option<VcTable>> = Vec::new();
    tables.resize_with(nice.nodes.len(), || None);
    for i in 0..nice.nodes.len() {
        let mut t = VcTable::new();
        match nice.nodes[i] {
            Node::Leaf => {
                t.insert(0, (0, nil.clone()));
            }
            Node::Introduce(v, c) => {
                let p = pos(&nice.bags[i], v);
                let low = (1u32 << p) - 1;
                for (s, (val, tr)) in tables[c].take().expect("child first") {
                    let base = (s & low) | ((s & !low) << 1);
                    keep_min(&mut t, base, val, tr.clone());
                    keep_min(&mut t, base | (1 << p), val + 1, Rc::new(Trail::Cons(v, tr)));
                }
            }
            Node::Forget(v, c) => {
                let bag = &nice.bags[c];
                let p = pos(bag, v);
                let nbrs: Vec<usize> =
                    bag.iter().enumerate().filter(|&(_, &u)| g.has_edge(u, v)).map(|(q, _)| q).collect();
                let low = (1u32 << p) - 1;
                for (s, (val, tr)) in tables[c].take().expect("child first") {
                    if s & (1 << p) == 0 && nbrs.iter().any(|&q| s & (1 << q) == 0) {
                        continue;
                    }
                    keep_min(&mut t, (s & low) | ((s >> (p + 1)) << p), val, tr);
                }
            }
            Node::Join(a, b) => {
                let (ta, tb) = (tables[a].take().expect("child first"), tables[b].take().expect("child first"));
                for (s, (va, ra)) in &ta {
                    if let Some((vb, rb)) = tb.get(s) {
                        let val = va + vb - s.count_ones() as usize;
                        keep_min(&mut t, *s, val, Rc::new(Trail::Both(ra.clone(), rb.clone())));
                    }
                }
            }
        }
        tables[i] = Some(t);
    }
    let root = tables.pop().flatten().expect("root table");
    let (val, tr) = root.get(&0).cloned().ok_or_else(|| Error::Internal("no vertex cover state at the root".into()))?;
    let cover = VertexSet::from_iter_unsorted(Trail::collect(&tr));
    if cover.len() != val {
        return Err(Error::Internal(format!("cover trail has {} vertices, value {val}", cover.len())));
    }
    Ok((val, cover))
}

const NONE: u8 = u8::MAX;

/// Partial linear forest seen from the bag: degree of each bag vertex,
/// the other end of its path for degree-one vertices (`NONE` if forgotten),
/// and how many path ends are already forgotten.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct PathState {
    deg: Vec<u8>,
    partner: Vec<u8>,
    ends: u8,
}

impl PathState {
    /// Far end of the path through `x` after `x` gains an edge.
    fn far_end(&self, x: usize) -> u8 {
        if self.deg[x] == 0 {
            x as u8
        } else {
            self.partner[x]
        }
    }

    fn link(&mut self, a: u8, b: u8) {
        if a != NONE {
            self.partner[a as usize] = b;
        }
        if b != NONE {
            self.partner[b as usize] = a;
        }
    }

    fn bump(&mut self, x: usize) {
        self.deg[x] += 1;
        if self.deg[x] == 2 {
            self.partner[x] = NONE;
        }
    }

    /// Adds an edge `x-y`, or a tail at `x` whose far end is forgotten.
    fn attach(&self, x: usize, y: Option<usize>) -> Option<PathState> {
        if self.deg[x] >= 2 {
            return None;
        }
        let mut s = self.clone();
        let ex = s.far_end(x);
        let ey = match y {
            Some(y) => {
                if s.deg[y] >= 2 || (s.deg[x] == 1 && s.partner[x] == y as u8) {
                    return None;
                }
                s.far_end(y)
            }
            None => NONE,
        };
        s.bump(x);
        if let Some(y) = y {
            s.bump(y);
        }
        s.link(ex, ey);
        Some(s)
    }
}

type PathTable = HashMap<PathState, (usize, Rc<Trail<(usize, usize)>>)>;

fn keep_max(t: &mut PathTable, k: PathState, val: usize, trail: Rc<Trail<(usize, usize)>>) {
    match t.get(&k) {
        Some((old, _)) if *old >= val => {}
        _ => {
            t.insert(k, (val, trail));
        }
    }
}

/// Longest simple path, in edges, and a path attaining it.
pub fn longest_path_width_dp(g: &Graph, td: &TreeDecomposition) -> Result<(usize, Path)> {
    let nice = NiceTd::build(g, td)?;
    if td.width > PATH_WIDTH_CAP {
        return Err(over_cap("width for the longest path DP", PATH_WIDTH_CAP, td.width));
    }
    if g.n() == 0 {
        return Ok((0, Path::new(Vec::new())));
    }
    let nil = Rc::new(Trail::Nil);
    let mut tables: Vec<Option<PathTable>> = Vec::new();
    tables.resize_with(nice.nodes.len(), || None);
    for i in 0..nice.nodes.len() {
        let mut t = PathTable::new();
        match nice.nodes[i] {
            Node::Leaf => {
                t.insert(PathState { deg: vec![], partner: vec![], ends: 0 }, (0, nil.clone()));
            }
            Node::Introduce(v, c) => {
                let p = pos(&nice.bags[i], v);
                for (mut s, (val, tr)) in tables[c].take().expect("child first") {
                    for q in s.partner.iter_mut().filter(|q| **q != NONE && **q as usize >= p) {
                        *q += 1;
                    }
                    s.deg.insert(p, 0);
                    s.partner.insert(p, NONE);
                    keep_max(&mut t, s, val, tr);
                }
            }
            Node::Forget(v, c) => {
                let bag = &nice.bags[c];
                let p = pos(bag, v);
                let mut cur = tables[c].take().expect("child first");
                for (q, &u) in bag.iter().enumerate() {
                    if u == v || !g.has_edge(u, v) {
                        continue;
                    }
                    let mut next = cur.clone();
                    for (s, (val, tr)) in &cur {
                        if let Some(s2) = s.attach(p, Some(q)) {
                            keep_max(&mut next, s2, val + 1, Rc::new(Trail::Cons((v, u), tr.clone())));
                        }
                    }
                    cur = next;
                }
                for (mut s, (val, tr)) in cur {
                    if s.deg[p] == 1 {
                        if s.ends == 2 {
                            continue;
                        }
                        s.ends += 1;
                        let other = s.partner[p];
                        s.link(other, NONE);
                    }
                    s.deg.remove(p);
                    s.partner.remove(p);
                    for q in s.partner.iter_mut().filter(|q| **q != NONE && **q as usize > p) {
                        *q -= 1;
                    }
                    keep_max(&mut t, s, val, tr);
                }
            }
            Node::Join(a, b) => {
                let (ta, tb) = (tables[a].take().expect("child first"), tables[b].take().expect("child first"));
                for (sa, (va, ra)) in &ta {
                    'pair: for (sb, (vb, rb)) in &tb {
                        if sa.ends + sb.ends > 2 {
                            continue;
                        }
                        let mut s = sa.clone();
                        s.ends += sb.ends;
                        for x in 0..s.deg.len() {
                            if sb.deg[x] == 2 {
                                if s.deg[x] != 0 {
                                    continue 'pair;
                                }
                                s.deg[x] = 2;
                            }
                        }
                        for x in 0..sb.deg.len() {
                            if sb.deg[x] != 1 {
                                continue;
                            }
                            let y = sb.partner[x];
                            let step = if y == NONE {
                                s.attach(x, None)
                            } else if (y as usize) > x {
                                s.attach(x, Some(y as usize))
                            } else {
                                continue;
                            };
                            match step {
                                Some(next) => s = next,
                                None => continue 'pair,
                            }
                        }
                        keep_max(&mut t, s, va + vb, Rc::new(Trail::Both(ra.clone(), rb.clone())));
                    }
                }
            }
        }
        tables[i] = Some(t);
    }
    let root = tables.pop().flatten().expect("root table");
    let (val, tr) = root
        .into_iter()
        .map(|(_, x)| x)
        .max_by_key(|(v, _)| *v)
        .ok_or_else(|| Error::Internal("no path state at the root".into()))?;
    let path = assemble(g, &Trail::collect(&tr))?;
    if path.edge_len() != val {
        return Err(Error::Internal(format!("path trail has {} edges, value {val}", path.edge_len())));
    }
    Ok((val, path))
}

/// Orders the edges of a single path.
fn assemble(g: &Graph, edges: &[(usize, usize)]) -> Result<Path> {
    if edges.is_empty() {
        return Ok(Path::new(vec![0]));
    }
    let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let start = adj
        .iter()
        .filter(|(_, n)| n.len() == 1)
        .map(|(&v, _)| v)
        .min()
        .ok_or_else(|| Error::Internal("path trail has no endpoint".into()))?;
    let mut walk = vec![start];
    let mut prev = usize::MAX;
    let mut at = start;
    while let Some(&next) = adj[&at].iter().find(|&&w| w != prev) {
        if walk.len() > edges.len() {
            break;
        }
        walk.push(next);
        prev = at;
        at = next;
    }
    let path = Path::new(walk);
    if path.edge_len() != edges.len() || !path.is_valid_in(g) {
        return Err(Error::Internal("path trail is not a single simple path".into()));
    }
    Ok(path)
}
