//! Nice tree decompositions, built bottom-up in post-order.

use crate::decomposition::TreeDecomposition;
use crate::error::{input, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Node {
    Leaf,
    Introduce(usize, usize),
    Forget(usize, usize),
    Join(usize, usize),
}

/// Nodes in post-order, so every child precedes its parent. The last node is
/// the root and has an empty bag. `bags[i]` is sorted.
#[derive(Clone, Debug)]
pub(crate) struct NiceTd {
    pub nodes: Vec<Node>,
    pub bags: Vec<Vec<usize>>,
}

impl NiceTd {
    pub fn build(g: &Graph, td: &TreeDecomposition) -> Result<NiceTd> {
        if let Err(e) = td.validate(g) {
            return input(format!("tree decomposition: {e}"));
        }
        let t = td.bags.len();
        let mut adj = vec![Vec::new(); t];
        for &(a, b) in &td.tree_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        // Post-order over the decomposition tree rooted at bag 0.
        let mut parent = vec![usize::MAX; t];
        let mut order = vec![0];
        let mut seen = vec![false; t];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = x;
                    order.push(y);
                }
            }
            i += 1;
        }
        let mut nice = NiceTd { nodes: Vec::new(), bags: Vec::new() };
        let mut top = vec![usize::MAX; t];
        for &x in order.iter().rev() {
            let bag = td.bags[x].as_slice().to_vec();
            let mut node: Option<usize> = None;
            for &y in &adj[x] {
                if parent[y] != x {
                    continue;
                }
                let c = nice.morph(top[y], &bag);
                node = Some(match node {
                    None => c,
                    Some(a) => nice.push(Node::Join(a, c), bag.clone()),
                });
            }
            top[x] = match node {
                Some(n) => n,
                None => {
                    let leaf = nice.push(Node::Leaf, Vec::new());
                    nice.morph(leaf, &bag)
                }
            };
        }
        nice.morph(top[0], &[]);
        Ok(nice)
    }

    fn push(&mut self, node: Node, bag: Vec<usize>) -> usize {
        self.nodes.push(node);
        self.bags.push(bag);
        self.nodes.len() - 1
    }

    /// Forgets, then introduces, until the bag of `from` equals `target`.
    fn morph(&mut self, mut from: usize, target: &[usize]) -> usize {
        let current = self.bags[from].clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            let bag: Vec<usize> = self.bags[from].iter().copied().filter(|&w| w != v).collect();
            from = self.push(Node::Forget(v, from), bag);
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let mut bag = self.bags[from].clone();
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            from = self.push(Node::Introduce(v, from), bag);
        }
        from
    }
}

/// Persistent list of picks, shared between DP states.
#[derive(Debug)]
pub(crate) enum Trail<T> {
    Nil,
    Cons(T, std::rc::Rc<Trail<T>>),
    Both(std::rc::Rc<Trail<T>>, std::rc::Rc<Trail<T>>),
}

impl<T: Copy> Trail<T> {
    pub fn collect(this: &std::rc::Rc<Trail<T>>) -> Vec<T> {
        let mut out = Vec::new();
        let mut stack = vec![this.clone()];
        while let Some(t) = stack.pop() {
            match &*t {
                Trail::Nil => {}
                Trail::Cons(x, rest) => {
                    out.push(*x);
                    stack.push(rest.clone());
                }
                Trail::Both(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn check(g: &Graph, td: &TreeDecomposition) {
        let nice = NiceTd::build(g, td).unwrap();
        let root = nice.nodes.len() - 1;
        assert!(nice.bags[root].is_empty());
        let mut forgotten = vec![0; g.n()];
        for (i, node) in nice.nodes.iter().enumerate() {
            let bag = &nice.bags[i];
            assert!(bag.len() <= td.width + 1);
            match *node {
                Node::Leaf => assert!(bag.is_empty()),
                Node::Introduce(v, c) => {
                    assert!(c < i && !nice.bags[c].contains(&v) && bag.contains(&v));
                    assert_eq!(bag.len(), nice.bags[c].len() + 1);
                }
                Node::Forget(v, c) => {
                    assert!(c < i && nice.bags[c].contains(&v) && !bag.contains(&v));
                    forgotten[v] += 1;
                }
                Node::Join(a, b) => assert!(nice.bags[a] == *bag && nice.bags[b] == *bag),
            }
        }
        assert!(forgotten.iter().all(|&f| f == 1));
    }

    #[test]
    fn nice_forms() {
        let g = generate(GraphKind::Grid(3)).unwrap();
        check(&g, &TreeDecomposition::single_bag(&g));
        let order: Vec<usize> = (0..9).collect();
        check(&g, &TreeDecomposition::from_elimination_order(&g, &order));
        let s = generate(GraphKind::Star(4)).unwrap();
        check(&s, &TreeDecomposition::from_elimination_order(&s, &[1, 2, 3, 4, 0]));
    }

    #[test]
    fn invalid_decomposition_rejected() {
        let g = generate(GraphKind::Path(3)).unwrap();
        let td = TreeDecomposition::new(vec![], vec![crate::graph::VertexSet::from(vec![0, 1])]);
        assert!(NiceTd::build(&g, &td).is_err());
    }
}
