//! Independent transversals of coloured graphs through a CNF encoding and
//! Moser's resampling algorithm, with a greedy fallback.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lit {
    pub var: usize,
    pub negated: bool,
}

impl Lit {
    pub fn holds(&self, a: &[bool]) -> bool {
        a[self.var] != self.negated
    }
}

/// CNF formula. When built by [`encode_transversal_cnf`], variable `i*t + l`
/// is bit `l` of the index chosen in class `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<Lit>>,
    pub t: usize,
    /// Classes cut down to `2^t` vertices; `classes[i][y]` has index `y`.
    pub classes: Vec<Vec<usize>>,
    /// Host edge behind each clause.
    pub edge_origin: Vec<(usize, usize)>,
}

impl CnfInstance {
    pub fn from_clauses(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        if clauses.iter().flatten().any(|l| l.var >= num_vars) {
            return input("literal refers to a missing variable");
        }
        Ok(CnfInstance { num_vars, clauses, t: 0, classes: Vec::new(), edge_origin: Vec::new() })
    }

    fn violated(&self, c: usize, a: &[bool]) -> bool {
        !self.clauses[c].iter().any(|l| l.holds(a))
    }

    pub fn satisfied_by(&self, a: &[bool]) -> bool {
        a.len() == self.num_vars && (0..self.clauses.len()).all(|c| !self.violated(c, a))
    }

    /// Vertex picked in each class by an assignment.
    pub fn decode(&self, a: &[bool]) -> Vec<usize> {
        (0..self.classes.len())
            .map(|i| {
                let y = (0..self.t).filter(|&l| a[i * self.t + l]).map(|l| 1usize << l).sum::<usize>();
                self.classes[i][y]
            })
            .collect()
    }

    /// Other clauses sharing a variable with each clause.
    pub fn neighbourhoods(&self) -> Vec<Vec<usize>> {
        let mut by_var = vec![Vec::new(); self.num_vars];
        for (c, cl) in self.clauses.iter().enumerate() {
            for l in cl {
                if by_var[l.var].last() != Some(&c) {
                    by_var[l.var].push(c);
                }
            }
        }
        self.clauses
            .iter()
            .enumerate()
            .map(|(c, cl)| {
                let mut nb: Vec<usize> = cl.iter().flat_map(|l| by_var[l.var].iter().copied()).filter(|&d| d != c).collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect()
    }
}

fn check_classes(h: &Graph, classes: &[VertexSet]) -> Result<()> {
    let mut seen = vec![false; h.n()];
    for (i, c) in classes.iter().enumerate() {
        if c.is_empty() {
            return input(format!("class {i} is empty"));
        }
        h.check_set(c)?;
        for v in c.iter() {
            if std::mem::replace(&mut seen[v], true) {
                return input(format!("vertex {v} lies in two classes"));
            }
        }
    }
    Ok(())
}

/// One clause per edge between distinct classes, forbidding the pair of
/// indices of its endpoints. Classes keep their `2^t` smallest vertices,
/// `2^t` being the largest power of two not above the smallest class.
pub fn encode_transversal_cnf(h: &Graph, classes: &[VertexSet]) -> Result<CnfInstance> {
    check_classes(h, classes)?;
    let smallest = classes.iter().map(VertexSet::len).min().unwrap_or(1);
    let t = smallest.ilog2() as usize;
    let kept: Vec<Vec<usize>> = classes.iter().map(|c| c.as_slice()[..1 << t].to_vec()).collect();
    let mut slot = vec![None; h.n()];
    for (i, c) in kept.iter().enumerate() {
        for (y, &v) in c.iter().enumerate() {
            slot[v] = Some((i, y));
        }
    }
    let bits = |(i, y): (usize, usize)| (0..t).map(move |l| Lit { var: i * t + l, negated: (y >> l) & 1 == 1 });
    let mut clauses = Vec::new();
    let mut edge_origin = Vec::new();
    for (u, v) in h.edges() {
        let (Some(a), Some(b)) = (slot[u], slot[v]) else { continue };
        if a.0 == b.0 {
            continue;
        }
        let (a, b) = if a.0 < b.0 { (a, b) } else { (b, a) };
        clauses.push(bits(a).chain(bits(b)).collect());
        edge_origin.push((u, v));
    }
    Ok(CnfInstance { num_vars: classes.len() * t, clauses, t, classes: kept, edge_origin })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoserReport {
    pub seed: u64,
    /// Satisfying assignment, checked by evaluation; `None` when the cap hit.
    pub assignment: Option<Vec<bool>>,
    pub resamples: usize,
    pub max_neighbours: usize,
    /// `2^(w-5) - 1` for the narrowest clause width `w`, when `w >= 5`.
    pub neighbour_bound: Option<usize>,
    pub bound_holds: bool,
}

/// Moser's fix procedure: the lowest violated clause is resampled, then the
/// lowest violated clause sharing a variable with it, depth first.
pub fn moser_resample(f: &CnfInstance, seed: u64, cap: usize) -> Result<MoserReport> {
    let nb = f.neighbourhoods();
    let max_neighbours = nb.iter().map(Vec::len).max().unwrap_or(0);
    let width = f.clauses.iter().map(Vec::len).min();
    let neighbour_bound = width.filter(|&w| w >= 5).map(|w| (1usize << (w - 5)) - 1);
    let bound_holds = match (width, neighbour_bound) {
        (None, _) => true,
        (_, Some(b)) => max_neighbours <= b,
        _ => false,
    };
    let mut report = MoserReport { seed, assignment: None, resamples: 0, max_neighbours, neighbour_bound, bound_holds };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a: Vec<bool> = (0..f.num_vars).map(|_| rng.gen()).collect();
    let closed: Vec<Vec<usize>> = nb
        .into_iter()
        .enumerate()
        .map(|(c, mut v)| {
            let at = v.partition_point(|&d| d < c);
            v.insert(at, c);
            v
        })
        .collect();
    for c in 0..f.clauses.len() {
        if !f.violated(c, &a) {
            continue;
        }
        let mut stack = Vec::new();
        let mut next = Some(c);
        loop {
            if let Some(d) = next {
                if report.resamples >= cap {
                    return Ok(report);
                }
                report.resamples += 1;
                for l in &f.clauses[d] {
                    a[l.var] = rng.gen();
                }
                stack.push(d);
            }
            let Some(&top) = stack.last() else { break };
            next = closed[top].iter().copied().find(|&d| f.violated(d, &a));
            if next.is_none() {
                stack.pop();
                if stack.is_empty() {
                    break;
                }
            }
        }
    }
    if !f.satisfied_by(&a) {
        return Err(Error::Internal("resampling finished with a violated clause".into()));
    }
    report.assignment = Some(a);
    Ok(report)
}

/// One vertex per class, pairwise non-adjacent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transversal {
    pub picks: Vec<usize>,
}

impl Transversal {
    pub fn validate(&self, h: &Graph, classes: &[VertexSet]) -> std::result::Result<(), String> {
        if self.picks.len() != classes.len() {
            return Err(format!("{} picks for {} classes", self.picks.len(), classes.len()));
        }
        for (i, (&v, c)) in self.picks.iter().zip(classes).enumerate() {
            if !c.contains(v) {
                return Err(format!("pick {v} is not in class {i}"));
            }
            if let Some(&w) = self.picks[..i].iter().find(|&&w| h.has_edge(v, w)) {
                return Err(format!("picks {w} and {v} are adjacent"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransversalMethod {
    Lll,
    Greedy,
    /// Bounded min-conflicts local search.
    Search,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransversalReport {
    pub transversal: Option<Transversal>,
    pub method: Option<TransversalMethod>,
    /// `2^(t+1) > |V_i| >= 64(2r-3)d >= 2^t` for every class.
    pub lemma_sizes: bool,
    /// Smallest class has more than `r(r-1)d` vertices.
    pub greedy_sizes: bool,
    /// `2(2r-3)dn`, the clause-neighbourhood count a `d`-degenerate input allows.
    pub proof_count: Option<usize>,
    pub moser: Option<MoserReport>,
}

/// Independent transversal of the classes in `h`. Moser's algorithm when the
/// size condition for it holds, the min-degree greedy when classes are large
/// enough for it, and both as a best effort otherwise. A bounded local
/// search is the last resort; `None` from it proves nothing.
pub fn lll_transversal(h: &Graph, classes: &[VertexSet], d: usize, seed: u64, cap: usize) -> Result<TransversalReport> {
    check_classes(h, classes)?;
    let r = classes.len();
    let smallest = classes.iter().map(VertexSet::len).min().unwrap_or(0);
    let mut report = TransversalReport {
        transversal: None,
        method: None,
        lemma_sizes: false,
        greedy_sizes: smallest > r.saturating_sub(1) * r * d,
        proof_count: None,
        moser: None,
    };
    if r >= 2 {
        let t = smallest.ilog2();
        let n = 1usize << t;
        let need = 64 * (2 * r - 3) * d;
        report.lemma_sizes = need >= n && classes.iter().all(|c| c.len() >= need && c.len() < 2 * n);
        report.proof_count = Some(2 * (2 * r - 3) * d * n);
    }
    let lll = |report: &mut TransversalReport| -> Result<Option<Vec<usize>>> {
        let f = encode_transversal_cnf(h, classes)?;
        let m = moser_resample(&f, seed, cap)?;
        let picks = m.assignment.as_ref().map(|a| f.decode(a));
        report.moser = Some(m);
        Ok(picks)
    };
    use TransversalMethod::*;
    let order = if report.lemma_sizes || !report.greedy_sizes { [Lll, Greedy, Search] } else { [Greedy, Lll, Search] };
    for method in order {
        let picks = match method {
            Lll => lll(&mut report)?,
            Greedy => greedy(h, classes),
            Search => search(h, classes, seed, SEARCH_BUDGET),
        };
        if let Some(picks) = picks {
            let tr = Transversal { picks };
            tr.validate(h, classes).map_err(|e| Error::Internal(format!("transversal check: {e}")))?;
            report.transversal = Some(tr);
            report.method = Some(method);
            break;
        }
    }
    Ok(report)
}

const SEARCH_BUDGET: usize = 200_000;

/// Min-conflicts local search: a random class in conflict moves to its
/// member with fewest clashes, or to a random member one time in ten.
fn search(h: &Graph, classes: &[VertexSet], seed: u64, budget: usize) -> Option<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = vec![false; h.n()];
    let mut picks: Vec<usize> = classes
        .iter()
        .map(|c| {
            let v = c.as_slice()[rng.gen_range(0..c.len())];
            picked[v] = true;
            v
        })
        .collect();
    let clashes = |v: usize, picked: &[bool]| h.neighbors(v).iter().filter(|&&w| picked[w]).count();
    for _ in 0..budget {
        let bad: Vec<usize> = (0..classes.len()).filter(|&i| clashes(picks[i], &picked) > 0).collect();
        if bad.is_empty() {
            return Some(picks);
        }
        let i = bad[rng.gen_range(0..bad.len())];
        picked[picks[i]] = false;
        let members = classes[i].as_slice();
        let v = if rng.gen_bool(0.1) {
            members[rng.gen_range(0..members.len())]
        } else {
            let best = members.iter().map(|&v| clashes(v, &picked)).min().expect("nonempty class");
            let ties: Vec<usize> = members.iter().copied().filter(|&v| clashes(v, &picked) == best).collect();
            ties[rng.gen_range(0..ties.len())]
        };
        picked[v] = true;
        picks[i] = v;
    }
    None
}

/// Repeatedly takes the live vertex with fewest live neighbours in other open
/// classes, closes its class and kills its neighbours.
fn greedy(h: &Graph, classes: &[VertexSet]) -> Option<Vec<usize>> {
    let mut class_of = vec![usize::MAX; h.n()];
    for (i, c) in classes.iter().enumerate() {
        for v in c.iter() {
            class_of[v] = i;
        }
    }
    let mut alive = vec![false; h.n()];
    for c in classes {
        for v in c.iter() {
            alive[v] = true;
        }
    }
    let mut open = vec![true; classes.len()];
    let mut picks = vec![usize::MAX; classes.len()];
    for _ in 0..classes.len() {
        let live_deg = |v: usize| {
            h.neighbors(v)
                .iter()
                .filter(|&&w| alive[w] && class_of[w] != class_of[v] && open[class_of[w]])
                .count()
        };
        if classes.iter().enumerate().any(|(i, c)| open[i] && !c.iter().any(|v| alive[v])) {
            return None;
        }
        let v = (0..h.n()).filter(|&v| alive[v] && open[class_of[v]]).min_by_key(|&v| (live_deg(v), v))?;
        let i = class_of[v];
        picks[i] = v;
        open[i] = false;
        for u in classes[i].iter() {
            alive[u] = false;
        }
        for &w in h.neighbors(v) {
            alive[w] = false;
        }
    }
    Some(picks)
}
