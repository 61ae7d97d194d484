use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{input, Result};

/// Graph families the generator knows about.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    /// ℓ×ℓ grid; vertex `r*ℓ + c` sits at row `r`, column `c`.
    Grid(usize),
    Complete(usize),
    /// `m` distinct edges chosen uniformly; deterministic in `seed`.
    Random { n: usize, m: usize, seed: u64 },
    Path(usize),
    /// Center `0` joined to leaves `1..=leaves`.
    Star(usize),
}

pub fn generate(kind: GraphKind) -> Result<Graph> {
    match kind {
        GraphKind::Grid(l) => {
            if l == 0 {
                return input("grid side must be positive");
            }
            let mut edges = Vec::with_capacity(2 * l * (l - 1));
            for r in 0..l {
                for c in 0..l {
                    let v = r * l + c;
                    if c + 1 < l {
                        edges.push((v, v + 1));
                    }
                    if r + 1 < l {
                        edges.push((v, v + l));
                    }
                }
            }
            Graph::new(l * l, &edges)
        }
        GraphKind::Complete(n) => {
            if n == 0 {
                return input("complete graph needs n > 0");
            }
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            Graph::new(n, &edges)
        }
        GraphKind::Path(n) => {
            if n == 0 {
                return input("path needs n > 0");
            }
            let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
            Graph::new(n, &edges)
        }
        GraphKind::Star(leaves) => {
            let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
            Graph::new(leaves + 1, &edges)
        }
        GraphKind::Random { n, m, seed } => {
            if n == 0 {
                return input("random graph needs n > 0");
            }
            let total = n * (n - 1) / 2;
            if m > total {
                return input(format!("m={m} exceeds n(n-1)/2={total}"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut picks = index::sample(&mut rng, total, m).into_vec();
            picks.sort_unstable();
            let edges: Vec<_> = picks.into_iter().map(|i| pair_from_index(n, i)).collect();
            Graph::new(n, &edges)
        }
    }
}

/// Inverse of the row-major enumeration of pairs `u < v`.
fn pair_from_index(n: usize, mut i: usize) -> (usize, usize) {
    for u in 0..n {
        let row = n - 1 - u;
        if i < row {
            return (u, u + 1 + i);
        }
        i -= row;
    }
    unreachable!("pair index out of range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        let g = generate(GraphKind::Grid(3)).unwrap();
        assert_eq!((g.n(), g.m()), (9, 12));
        assert_eq!(generate(GraphKind::Complete(4)).unwrap().m(), 6);
        assert_eq!(generate(GraphKind::Path(5)).unwrap().m(), 4);
        assert_eq!(generate(GraphKind::Star(5)).unwrap().max_degree(), 5);
    }

    #[test]
    fn random_is_deterministic() {
        let k = GraphKind::Random { n: 10, m: 20, seed: 1 };
        let a = generate(k).unwrap();
        let b = generate(k).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.m(), 20);
        let c = generate(GraphKind::Random { n: 10, m: 20, seed: 2 }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(generate(GraphKind::Grid(0)).is_err());
        assert!(generate(GraphKind::Random { n: 4, m: 7, seed: 0 }).is_err());
        assert!(generate(GraphKind::Complete(0)).is_err());
    }

    #[test]
    fn pair_index_roundtrip() {
        let n = 7;
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                assert_eq!(pair_from_index(n, k), (u, v));
                k += 1;
            }
        }
    }
}
