//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Runs without the libtest harness so the
//! lines always reach the terminal.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use bramble_core::bramble::{
    bramble_from_web, bramble_order_exact, certify_order, find_bramble, grid_bramble, Bramble,
};
use bramble_core::decomposition::{exact_treewidth, TreeDecomposition};
use bramble_core::fpt::{
    best_decomposition, decide, heuristic_decomposition, longest_path_width_dp, vc_width_dp, ParameterPlugin, Verdict,
};
use bramble_core::graph::{generate, io, GraphKind, MinorModel};
use bramble_core::gridlike::{
    encode_transversal_cnf, gridlike_pipeline, gridlike_pipeline_with, intersection_graph, moser_resample, top_minor,
    validate_gridlike, CnfInstance, GridLikeMinor, GridModel, Lit, TopMinorStep,
};
use bramble_core::perfect::{
    bounded_degree_subgraph, check_structure, default_halfpoints, perfect_from_gridlike, perfect_from_k2k_model,
    PerfectBramble,
};
use bramble_core::separators::{balanced_separator_exact, doubling_driver, sparse_separator_oracle};
use bramble_core::web::{build_web_or_decomposition, web_or_quadratic_decomposition, KWeb, TreeGraph, WebOrDecomposition};
use bramble_core::witness::{Certificate, WitnessFile};
use bramble_core::{Constants, Error, Graph, Path, VertexSet};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// Tolerances.
const GRID_BUDGET: Duration = Duration::from_secs(60);
const FIND_BUDGET: Duration = Duration::from_secs(600);
const FIND_SEEDS: u64 = 10;
const FIND_MIN_VALID: usize = 8;
const LLL_INSTANCES: u64 = 100;
const LLL_RESAMPLE_FACTOR: f64 = 10.0;
const SEPARATOR_RANDOM_GRAPHS: usize = 500;
const WEB_RANDOM_GRAPHS: u64 = 200;
const DP_MIN_INSTANCES: usize = 300;
const MIN_MUTATIONS: usize = 50;

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("grid duality", grid_duality),
        ("balanced separators force sparsity", separator_sparsity),
        ("web dichotomy is total", web_totality),
        ("webs imply treewidth", web_soundness),
        ("brambles from webs", web_brambles),
        ("randomized bramble on grid(8)", randomized_bramble),
        ("transversal CNF and resampling", lll_engine),
        ("topological clique minors", topological_minors),
        ("perfect brambles", perfect_brambles),
        ("width DPs and the dichotomy driver", fpt_dichotomy),
        ("witness round trip", witness_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = match catch_unwind(AssertUnwindSafe(run)) {
            Ok(r) => r,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- helpers

fn g_of(kind: GraphKind) -> Graph {
    generate(kind).unwrap()
}

fn wide() -> Constants {
    Constants { exact_order_max_vertices: 64, ..Constants::default() }
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, max_m: usize) -> Graph {
    let full = n * n.saturating_sub(1) / 2;
    let m = rng.gen_range(0..=full.min(max_m));
    g_of(GraphKind::Random { n, m, seed: rng.gen() })
}

fn adjacency_masks(g: &Graph) -> Vec<u32> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | 1 << u)).collect()
}

/// Smallest vertex set meeting every element, by increasing size.
fn brute_hitting_set(b: &Bramble, n: usize) -> usize {
    let masks: Vec<u64> = b.elements.iter().map(|e| e.iter().fold(0u64, |m, v| m | 1 << v)).collect();
    for size in 0..=n {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let chosen = idx.iter().fold(0u64, |m, &v| m | 1 << v);
            if masks.iter().all(|&e| e & chosen != 0) {
                return size;
            }
            let mut i = size;
            while i > 0 && idx[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..size {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    n
}

fn brute_vc(g: &Graph) -> usize {
    let n = g.n();
    let edges: Vec<(usize, usize)> = g.edges().collect();
    (0u32..1 << n)
        .filter(|s| edges.iter().all(|&(u, v)| s >> u & 1 == 1 || s >> v & 1 == 1))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

/// Longest simple path, in edges, by a subset DP over endpoints.
fn brute_longest_path(g: &Graph) -> usize {
    let n = g.n();
    if n == 0 {
        return 0;
    }
    let adj = adjacency_masks(g);
    let mut ends = vec![0u32; 1 << n];
    let mut best = 0;
    for v in 0..n {
        ends[1 << v] |= 1 << v;
    }
    for s in 1usize..1 << n {
        let e = ends[s];
        if e == 0 {
            continue;
        }
        best = best.max(s.count_ones() as usize - 1);
        for v in 0..n {
            if e >> v & 1 == 1 {
                let mut next = adj[v] & !(s as u32);
                while next != 0 {
                    let u = next.trailing_zeros() as usize;
                    next &= next - 1;
                    ends[s | 1 << u] |= 1 << u;
                }
            }
        }
    }
    best
}

fn rows_and_columns(l: usize) -> (Vec<Path>, Vec<Path>) {
    let rows = (0..l).map(|r| Path::new((0..l).map(|c| r * l + c).collect())).collect();
    let cols = (0..l).map(|c| Path::new((0..l).map(|r| r * l + c).collect())).collect();
    (rows, cols)
}

/// Rows and columns of grid(l); branch set `i` is row `i` with column `i`.
fn diagonal(l: usize) -> (Graph, GridLikeMinor) {
    let g = g_of(GraphKind::Grid(l));
    let (rows, cols) = rows_and_columns(l);
    let ig = intersection_graph(&rows, &cols).unwrap();
    let model = MinorModel::new((0..l).map(|i| VertexSet::from(vec![i, l + i])).collect());
    (g, GridLikeMinor { ig, order: l, model: GridModel::Minor(model), topological: false })
}

// ---------------------------------------------------------------- 1

fn grid_duality() -> Outcome {
    let start = Instant::now();
    let cfg = Constants::default();
    let mut seen = Vec::new();
    for l in 2..=4 {
        let g = g_of(GraphKind::Grid(l));
        let (tw, td) = exact_treewidth(&g, &cfg).map_err(|e| e.to_string())?;
        td.validate(&g).map_err(|e| e.to_string())?;
        ensure!(tw == l, "tw(grid({l})) = {tw}");
        let b = grid_bramble(l);
        b.validate(&g).map_err(|e| e.to_string())?;
        let order = bramble_order_exact(&b, &cfg).map_err(|e| e.to_string())?;
        ensure!(order == l + 1, "bramble order {order} on grid({l})");
        let brute = brute_hitting_set(&b, g.n());
        ensure!(brute == order, "branch and bound {order}, brute force {brute}");
        seen.push(format!("l={l}: tw {tw}, order {order}"));
    }
    let took = start.elapsed();
    ensure!(took < GRID_BUDGET, "took {took:?}");
    Ok(seen.join("; "))
}

// ---------------------------------------------------------------- 2

/// Every `(A, B, S)` with no `A`-`B` edge, as bit masks.
fn all_separators(g: &Graph) -> Vec<(u32, u32, u32)> {
    let n = g.n();
    let adj = adjacency_masks(g);
    let mut out = Vec::new();
    let mut label = vec![0u8; n];
    loop {
        let (mut a, mut b, mut s) = (0u32, 0u32, 0u32);
        for (v, &x) in label.iter().enumerate() {
            match x {
                0 => a |= 1 << v,
                1 => b |= 1 << v,
                _ => s |= 1 << v,
            }
        }
        if (0..n).all(|v| a >> v & 1 == 0 || adj[v] & b == 0) {
            out.push((a, b, s));
        }
        let mut i = 0;
        while i < n && label[i] == 2 {
            label[i] = 0;
            i += 1;
        }
        if i == n {
            return out;
        }
        label[i] += 1;
    }
}

struct SepCheck {
    pairs: usize,
    unbalanced: usize,
    violations: Vec<String>,
    oracle_checks: usize,
}

fn check_balanced_vs_sparse(g: &Graph, seps: &[(u32, u32, u32)], st: &mut SepCheck, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = g.n();
    let pc = |x: u32| x.count_ones() as i64;
    for k in 1..=2usize {
        let size = 2 * k + 1;
        if size > n {
            continue;
        }
        for w in (0u32..1 << n).filter(|w| w.count_ones() as usize == size) {
            st.pairs += 1;
            let half = (size / 2) as i64;
            let balanced = seps
                .iter()
                .any(|&(a, b, s)| pc(s) <= k as i64 && pc(a & w) <= half && pc(b & w) <= half);
            let alpha = seps
                .iter()
                .filter_map(|&(a, b, s)| {
                    let (da, db) = (pc((a | s) & w), pc((b | s) & w));
                    (da > 0 && db > 0).then(|| Rational64::new(pc(s), da * db))
                })
                .min()
                .ok_or("no separator with both sides weighted")?;
            let wset: VertexSet = (0..n).filter(|&v| w >> v & 1 == 1).collect();
            // Cross-check the crate's exhaustive searches on a sample.
            if rng.gen_bool(0.05) {
                st.oracle_checks += 1;
                let cfg = Constants::default();
                let found = balanced_separator_exact(g, &wset, k, Rational64::new(1, 2), &cfg).map_err(|e| e.to_string())?;
                ensure!(found.is_some() == balanced, "balanced search disagrees on {wset:?}");
                let rep = sparse_separator_oracle(g, &g.all_vertices(), &wset, &cfg).map_err(|e| e.to_string())?;
                ensure!(rep.exact && rep.alpha == alpha, "oracle alpha {} vs {alpha} on {wset:?}", rep.alpha);
            }
            if !balanced {
                st.unbalanced += 1;
                if alpha < Rational64::new(1, 4 * k as i64 + 1) {
                    st.violations.push(format!("n={n} edges={:?} W={wset:?} alpha={alpha}", g.edges().collect::<Vec<_>>()));
                }
            }
        }
    }
    Ok(())
}

/// Smallest edge mask over all relabellings.
fn canonical(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut e: Vec<(usize, usize)> = edges.iter().map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v]))).collect();
        e.sort_unstable();
        if best.as_ref().map_or(true, |b| e < *b) {
            best = Some(e);
        }
        // Next permutation.
        let mut i = n;
        while i > 1 && perm[i - 2] >= perm[i - 1] {
            i -= 1;
        }
        if i <= 1 {
            return best.unwrap();
        }
        let mut j = n - 1;
        while perm[j] <= perm[i - 2] {
            j -= 1;
        }
        perm.swap(i - 2, j);
        perm[i - 1..].reverse();
    }
}

fn separator_sparsity() -> Outcome {
    let mut st = SepCheck { pairs: 0, unbalanced: 0, violations: Vec::new(), oracle_checks: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut exhaustive = 0;
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut classes = BTreeSet::new();
        for bits in 0u32..1 << pairs.len() {
            let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::new(n, &edges).unwrap();
            if g.is_connected() {
                classes.insert(canonical(n, &edges));
            }
        }
        for edges in classes {
            let g = Graph::new(n, &edges).unwrap();
            exhaustive += 1;
            check_balanced_vs_sparse(&g, &all_separators(&g), &mut st, &mut rng)?;
        }
    }
    let mut sampled = 0;
    while sampled < SEPARATOR_RANDOM_GRAPHS {
        let n = rng.gen_range(7..=8);
        let g = random_graph(&mut rng, n, 3 * n);
        if !g.is_connected() {
            continue;
        }
        sampled += 1;
        check_balanced_vs_sparse(&g, &all_separators(&g), &mut st, &mut rng)?;
    }
    ensure!(st.violations.is_empty(), "{} violations, first {}", st.violations.len(), st.violations[0]);
    ensure!(st.unbalanced > 0, "no W without a balanced separator was met");
    Ok(format!(
        "{exhaustive} graphs up to isomorphism (n<=6) + {sampled} random (n=7,8); {} (G,W) pairs, {} without a balanced separator, 0 violations; {} oracle cross-checks",
        st.pairs, st.unbalanced, st.oracle_checks
    ))
}

// ---------------------------------------------------------------- 3

fn check_web_run(g: &Graph, k: usize, h: usize) -> Result<bool, String> {
    let run = build_web_or_decomposition(g, k, h, false).map_err(|e| format!("k={k} h={h}: {e}"))?;
    match run.outcome {
        WebOrDecomposition::Web(web) => {
            web.validate(g).map_err(|e| format!("web invalid: {e}"))?;
            ensure!(web.k == k && web.order() == h, "web has k={} order={}", web.k, web.order());
            Ok(true)
        }
        WebOrDecomposition::Decomposition(td) => {
            td.validate(g).map_err(|e| format!("decomposition invalid: {e}"))?;
            let bound = (2 * h + 1) * k - 2;
            ensure!(td.width <= bound, "width {} above {bound} for k={k} h={h}", td.width);
            Ok(false)
        }
    }
}

fn web_totality() -> Outcome {
    let params = [(2, 2), (2, 3), (3, 3)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut webs, mut tds) = (0, 0);
    let mut graphs: Vec<Graph> = (0..WEB_RANDOM_GRAPHS)
        .map(|_| {
            let n = rng.gen_range(1..=40);
            random_graph(&mut rng, n, 4 * n)
        })
        .collect();
    graphs.extend((1..=12).map(|l| g_of(GraphKind::Grid(l))));
    for g in &graphs {
        for &(k, h) in &params {
            if check_web_run(g, k, h)? {
                webs += 1;
            } else {
                tds += 1;
            }
        }
    }
    ensure!(webs > 0 && tds > 0, "only one side seen ({webs} webs, {tds} decompositions)");
    Ok(format!("{} runs: {webs} webs, {tds} decompositions, all validated", graphs.len() * params.len()))
}

// ---------------------------------------------------------------- 4

fn web_soundness() -> Outcome {
    let cfg = Constants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut graphs: Vec<Graph> = (0..300)
        .map(|_| {
            let n = rng.gen_range(2..=cfg.exact_tw_cap);
            random_graph(&mut rng, n, n * (n - 1) / 2)
        })
        .collect();
    graphs.extend((2..=4).map(|l| g_of(GraphKind::Grid(l))));
    graphs.extend((2..=cfg.exact_tw_cap).map(|n| g_of(GraphKind::Complete(n))));
    let mut found = BTreeMap::new();
    for g in &graphs {
        for k in 1..=3 {
            let run = web_or_quadratic_decomposition(g, k, false).map_err(|e| e.to_string())?;
            if let WebOrDecomposition::Web(web) = run.outcome {
                web.validate(g).map_err(|e| e.to_string())?;
                let (tw, _) = exact_treewidth(g, &cfg).map_err(|e| e.to_string())?;
                ensure!(tw >= k, "a {}-web of order {} on a graph of treewidth {tw}", k + 1, web.order());
                *found.entry(k).or_insert(0) += 1;
            }
        }
    }
    // Within the cap only k = 1 can be forced: a graph on at most 18
    // vertices has treewidth below the k >= 2 decomposition bound.
    ensure!(found.get(&1).is_some_and(|&c| c >= 10), "too few webs to test: {found:?}");
    Ok(format!("{} graphs, webs found per k {found:?}, 0 violations", graphs.len()))
}

// ---------------------------------------------------------------- 5

/// Three `h^2`-vertex stretches of a Hamiltonian path of `K_{h^3}`, pairwise
/// matched by direct edges.
fn hand_web(h: usize) -> (Graph, KWeb) {
    let kk = h * h;
    let n = h * kk;
    let g = g_of(GraphKind::Complete(n));
    let t = TreeGraph::from_parts((0..n).collect(), (1..n).map(|v| (v - 1, v)).collect());
    let block = |i: usize| -> VertexSet { (kk * i..kk * i + kk).collect() };
    let linkages = (0..h)
        .flat_map(|i| (i + 1..h).map(move |j| (i, j)))
        .map(|(i, j)| ((i, j), (0..kk).map(|t| Path::new(vec![kk * i + t, kk * j + t])).collect()))
        .collect();
    let web = KWeb { k: kk, t, subtrees: (0..h).map(block).collect(), flats: (0..h).map(block).collect(), body: (0..n).collect(), linkages };
    (g, web)
}

fn check_web_bramble(g: &Graph, web: &KWeb, h: usize) -> Result<String, String> {
    web.validate(g).map_err(|e| e.to_string())?;
    let b = bramble_from_web(g, web, &Constants::default()).map_err(|e| e.to_string())?;
    ensure!(b.len() == h * h * h, "{} elements for h={h}", b.len());
    b.validate(g).map_err(|e| e.to_string())?;
    let hit = min_hit_up_to(&b, h);
    ensure!(hit.map_or(true, |x| x >= h), "a set of {hit:?} vertices hits every element");
    match bramble_order_exact(&b, &wide()) {
        Ok(order) => {
            ensure!(order >= h && hit.map_or(true, |x| x == order), "order {order}, brute force {hit:?}");
            Ok(format!("h={h}: {} elements, order {order}", b.len()))
        }
        Err(Error::Capacity { .. }) => Ok(format!("h={h}: {} elements, no hitting set below {h}", b.len())),
        Err(e) => Err(e.to_string()),
    }
}

fn web_brambles() -> Outcome {
    let mut seen = Vec::new();
    for h in [2, 3] {
        let (g, web) = hand_web(h);
        seen.push(format!("hand {}", check_web_bramble(&g, &web, h)?));
    }
    // (2h+1)h^2 - 2 must stay below n - 1 for a clique to force a web.
    for (h, n) in [(2usize, 40usize), (3, 64)] {
        let g = g_of(GraphKind::Complete(n));
        let run = build_web_or_decomposition(&g, h * h, h, false).map_err(|e| e.to_string())?;
        let WebOrDecomposition::Web(web) = run.outcome else {
            return Err(format!("K{n} gave a decomposition for k={} h={h}", h * h));
        };
        seen.push(format!("K{n} {}", check_web_bramble(&g, &web, h)?));
    }
    Ok(seen.join("; "))
}

/// Size of a smallest hitting set if it is at most `limit`.
fn min_hit_up_to(b: &Bramble, limit: usize) -> Option<usize> {
    let support: Vec<usize> = b.support().iter().collect();
    let masks: Vec<Vec<bool>> = b.elements.iter().map(|e| support.iter().map(|&v| e.contains(v)).collect()).collect();
    fn go(masks: &[Vec<bool>], from: usize, left: usize, chosen: &mut Vec<usize>, n: usize) -> bool {
        if masks.iter().all(|m| chosen.iter().any(|&i| m[i])) {
            return true;
        }
        if left == 0 {
            return false;
        }
        (from..n).any(|i| {
            chosen.push(i);
            let ok = go(masks, i + 1, left - 1, chosen, n);
            chosen.pop();
            ok
        })
    }
    (0..=limit).find(|&size| go(&masks, 0, size, &mut Vec::new(), support.len()))
}

// ---------------------------------------------------------------- 6

fn randomized_bramble() -> Outcome {
    let start = Instant::now();
    let g = g_of(GraphKind::Grid(8));
    // Under the default separator constants grid(8) is too small to hold a
    // set without sparse separators; the desk preset is sized for it.
    let cfg = Constants::desk();
    let mut valid = 0;
    let mut ks = BTreeSet::new();
    for seed in 0..FIND_SEEDS {
        let r = find_bramble(&g, &cfg, seed).map_err(|e| e.to_string())?;
        ensure!(r.degenerate.is_none(), "seed {seed}: {:?}", r.degenerate);
        let expected = ((r.k as f64).powf(1.5).floor() as usize) * ((g.n() as f64).ln().floor() as usize);
        ensure!(r.constructed == expected, "seed {seed}: {} sets built, expected {expected}", r.constructed);
        ks.insert(r.k);
        let ok = r.bramble.validate(&g).is_ok();
        ensure!(ok == r.is_valid(), "seed {seed}: report and validator disagree");
        if ok && !r.bramble.is_empty() {
            valid += 1;
        }
    }
    let took = start.elapsed();
    ensure!(took < FIND_BUDGET, "took {took:?}");
    ensure!(valid >= FIND_MIN_VALID, "{valid} of {FIND_SEEDS} seeds gave a bramble");
    Ok(format!("{valid}/{FIND_SEEDS} valid, k in {ks:?}"))
}

// ---------------------------------------------------------------- 7

fn is_transversal(h: &Graph, classes: &[Vec<usize>], picks: &[usize]) -> bool {
    picks.len() == classes.len()
        && picks.iter().zip(classes).all(|(p, c)| c.contains(p))
        && picks.iter().enumerate().all(|(i, &u)| picks[i + 1..].iter().all(|&v| !h.has_edge(u, v)))
}

fn lll_encoding() -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut instances = 0;
    for r in 1..=3usize {
        for t in 0..=3usize {
            let size = 1 << t;
            let classes: Vec<Vec<usize>> = (0..r).map(|i| (i * size..(i + 1) * size).collect()).collect();
            let cross: Vec<(usize, usize)> = (0..r * size)
                .flat_map(|u| (u + 1..r * size).map(move |v| (u, v)))
                .filter(|&(u, v)| u / size != v / size)
                .collect();
            // Every edge set when there are few cross pairs, a sample otherwise.
            let sets: Vec<Vec<(usize, usize)>> = if cross.len() <= 12 {
                (0u32..1 << cross.len())
                    .map(|b| cross.iter().enumerate().filter(|(i, _)| b >> i & 1 == 1).map(|(_, &e)| e).collect())
                    .collect()
            } else {
                (0..300)
                    .map(|_| {
                        let p = rng.gen_range(0.0..0.6);
                        cross.iter().copied().filter(|_| rng.gen_bool(p)).collect()
                    })
                    .collect()
            };
            let vsets: Vec<VertexSet> = classes.iter().map(|c| VertexSet::from(c.clone())).collect();
            for edges in sets {
                instances += 1;
                let h = Graph::new(r * size, &edges).unwrap();
                let f = encode_transversal_cnf(&h, &vsets).map_err(|e| e.to_string())?;
                ensure!(f.t == t && f.num_vars == r * t, "r={r} t={t}: bad shape");
                let mut any_sat = false;
                for bits in 0u32..1 << (r * t) {
                    let a: Vec<bool> = (0..r * t).map(|i| bits >> i & 1 == 1).collect();
                    let sat = f.satisfied_by(&a);
                    ensure!(sat == is_transversal(&h, &classes, &f.decode(&a)), "r={r} t={t} edges={edges:?}: assignment {bits:b}");
                    any_sat |= sat;
                }
                let mut exists = false;
                let mut picks = vec![0; r];
                'all: loop {
                    let chosen: Vec<usize> = picks.iter().enumerate().map(|(i, &y)| classes[i][y]).collect();
                    if is_transversal(&h, &classes, &chosen) {
                        exists = true;
                        break;
                    }
                    for i in 0..r {
                        picks[i] += 1;
                        if picks[i] < size {
                            continue 'all;
                        }
                        picks[i] = 0;
                    }
                    break;
                }
                ensure!(any_sat == exists, "r={r} t={t} edges={edges:?}: satisfiable {any_sat}, transversal {exists}");
            }
        }
    }
    Ok(instances)
}

/// Random width-8 formula where every clause shares variables with at most
/// 7 others.
fn sparse_eight_cnf(seed: u64, target: usize) -> CnfInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let num_vars = 4 * target;
    let mut clauses: Vec<Vec<Lit>> = Vec::new();
    let mut tries = 0;
    while clauses.len() < target && tries < 100 * target {
        tries += 1;
        let vars = rand::seq::index::sample(&mut rng, num_vars, 8);
        let c: Vec<Lit> = vars.iter().map(|v| Lit { var: v, negated: rng.gen() }).collect();
        let mut cand = clauses.clone();
        cand.push(c);
        let f = CnfInstance::from_clauses(num_vars, cand.clone()).unwrap();
        if f.neighbourhoods().iter().all(|n| n.len() <= 7) {
            clauses = cand;
        }
    }
    CnfInstance::from_clauses(num_vars, clauses).unwrap()
}

fn lll_engine() -> Outcome {
    let encoded = lll_encoding()?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut resamples, mut clauses) = (0usize, 0usize);
    for seed in 0..LLL_INSTANCES {
        let f = sparse_eight_cnf(seed, rng.gen_range(20..=120));
        let worst = f.neighbourhoods().iter().map(Vec::len).max().unwrap_or(0);
        ensure!(worst <= (1 << (8 - 5)) - 1, "instance {seed} breaks the neighbourhood bound");
        let r = moser_resample(&f, seed, 1_000_000).map_err(|e| e.to_string())?;
        let a = r.assignment.ok_or(format!("instance {seed}: no assignment"))?;
        ensure!(f.clauses.iter().all(|c| c.iter().any(|l| a[l.var] != l.negated)), "instance {seed}: clause violated");
        resamples += r.resamples;
        clauses += f.clauses.len();
    }
    let mean = resamples as f64 / LLL_INSTANCES as f64;
    let mean_clauses = clauses as f64 / LLL_INSTANCES as f64;
    ensure!(mean <= LLL_RESAMPLE_FACTOR * mean_clauses, "mean resamples {mean} vs {mean_clauses} clauses");
    Ok(format!("(a) {encoded} instances agree; (b) {LLL_INSTANCES} solved, mean {mean:.2} resamples for {mean_clauses:.1} clauses"))
}

// ---------------------------------------------------------------- 8

fn topological_minors() -> Outcome {
    let cfg = Constants::desk();
    let mut solved = 0;
    for n in [15, 20, 30] {
        let g = g_of(GraphKind::Complete(n));
        for p in [3, 4, 5] {
            let r = top_minor(&g, p, &cfg).map_err(|e| e.to_string())?;
            let m = r.model().ok_or_else(|| format!("K{n}, p={p}: {:?}", r.result))?;
            m.validate(&g, &g_of(GraphKind::Complete(p))).map_err(|e| format!("K{n}, p={p}: {e}"))?;
            solved += 1;
        }
    }
    let g = g_of(GraphKind::Path(50));
    let r = top_minor(&g, 3, &cfg).map_err(|e| e.to_string())?;
    ensure!(!r.density_ok, "path(50) passed the density check");
    match &r.result {
        Err(f) if f.step == TopMinorStep::Density => {}
        other => return Err(format!("path(50): {other:?}")),
    }
    Ok(format!("{solved}/9 models validated; path(50) stops at the density check"))
}

// ---------------------------------------------------------------- 9

/// Minimum hitting set of a perfect bramble from vertex membership patterns.
fn perfect_order(pb: &PerfectBramble) -> usize {
    let k = pb.len();
    let mut patterns: BTreeSet<u64> = BTreeSet::new();
    for v in pb.support().iter() {
        patterns.insert(pb.elements.iter().enumerate().filter(|(_, e)| e.contains(v)).fold(0, |m, (i, _)| m | 1 << i));
    }
    let patterns: Vec<u64> = patterns.into_iter().collect();
    let all = (1u64 << k) - 1;
    let mut reach: BTreeSet<u64> = BTreeSet::from([0]);
    for size in 0..=k {
        if reach.contains(&all) {
            return size;
        }
        reach = reach.iter().flat_map(|&r| patterns.iter().map(move |&p| r | p)).collect();
    }
    k
}

fn check_perfect(g: &Graph, pb: &PerfectBramble, label: &str) -> Result<String, String> {
    pb.validate(g).map_err(|e| format!("{label}: {e}"))?;
    let k = pb.len();
    let half = k.div_ceil(2);
    let r = check_structure(pb, &wide()).map_err(|e| format!("{label}: {e}"))?;
    ensure!(r.min_element_vertices + 1 >= k, "{label}: small element");
    ensure!(r.min_private_edges + 2 >= k, "{label}: few private edges");
    ensure!(2 * r.host_vertices >= k * (k - 1), "{label}: small host");
    ensure!(r.host_edges >= k * k.saturating_sub(2), "{label}: sparse host");
    let order = perfect_order(pb);
    ensure!(order == half, "{label}: order {order}, expected {half}");
    ensure!(r.exact_order.map_or(true, |o| o == order), "{label}: structure report order {:?}", r.exact_order);
    let (host, _) = pb.host();
    ensure!(host.max_degree() <= 4, "{label}: host degree {}", host.max_degree());
    if host.n() <= Constants::default().exact_tw_cap {
        let tw = r.host_treewidth.ok_or(format!("{label}: host treewidth not computed"))?;
        ensure!(tw + 1 >= half, "{label}: tw(H) = {tw}");
    }
    Ok(format!("{label} k={k} order {order}"))
}

fn perfect_brambles() -> Outcome {
    let cfg = Constants::default();
    let mut seen = Vec::new();
    let mut tw_checks = 0;
    for l in 2..=6 {
        let (g, glm) = diagonal(l);
        validate_gridlike(&g, &glm).map_err(|e| e.to_string())?;
        let pb = perfect_from_gridlike(&g, &glm).map_err(|e| e.to_string())?;
        seen.push(check_perfect(&g, &pb, &format!("grid({l}) diagonal"))?);
        if g.n() <= cfg.exact_tw_cap {
            let (tw, _) = exact_treewidth(&g, &cfg).map_err(|e| e.to_string())?;
            ensure!(tw + 1 >= l.div_ceil(2), "grid({l}): tw {tw} below the grid-like bound");
            tw_checks += 1;
        }
    }
    // Four singleton trees in K10, each pair joined through its own vertex.
    let g = g_of(GraphKind::Complete(10));
    let trees: Vec<TreeGraph> = (0..4).map(TreeGraph::singleton).collect();
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    let q: Vec<((usize, usize), Path)> = pairs.iter().enumerate().map(|(x, &(i, j))| ((i, j), Path::new(vec![i, 4 + x, j]))).collect();
    let pb = perfect_from_k2k_model(&g, &trees, &q, &default_halfpoints(&q)).map_err(|e| e.to_string())?;
    seen.push(check_perfect(&g, &pb, "K4 model in K10")?);

    let k60 = g_of(GraphKind::Complete(60));
    let dense = Constants { c_web: 0.01, c_top: 4.0, ..Constants::desk() };
    let rep = gridlike_pipeline(&k60, 2, &dense, 2).map_err(|e| e.to_string())?;
    let glm = rep.gridlike().ok_or("pipeline on K60 gave no grid-like minor")?;
    let pb = perfect_from_gridlike(&k60, glm).map_err(|e| e.to_string())?;
    seen.push(check_perfect(&k60, &pb, "K60 pipeline grid-like")?);

    let rep = gridlike_pipeline_with(&k60, 3, 4, &Constants { c_web: 0.01, ..Constants::desk() }, 2).map_err(|e| e.to_string())?;
    let c = rep.clique.ok_or("pipeline on K60 gave no clique model")?;
    let pb = perfect_from_k2k_model(&k60, &c.trees, &c.paths, &default_halfpoints(&c.paths)).map_err(|e| e.to_string())?;
    seen.push(check_perfect(&k60, &pb, "K60 clique model")?);

    let rep = bounded_degree_subgraph(&k60, 2, &dense, 2).map_err(|e| e.to_string())?;
    let pb = rep.bramble.ok_or("no bounded-degree subgraph in K60")?;
    seen.push(check_perfect(&k60, &pb, "K60 bounded degree")?);

    // Pipeline outputs on graphs within the exact cap.
    for n in 12..=cfg.exact_tw_cap {
        let g = g_of(GraphKind::Complete(n));
        let small = Constants { c_web: 0.01, c_top: 4.0, ..Constants::desk() };
        let Ok(rep) = gridlike_pipeline(&g, 2, &small, 1) else { continue };
        if let Some(glm) = rep.gridlike() {
            let (tw, _) = exact_treewidth(&g, &cfg).map_err(|e| e.to_string())?;
            ensure!(tw + 1 >= glm.order.div_ceil(2), "K{n}: grid-like order {} vs tw {tw}", glm.order);
            tw_checks += 1;
        }
    }
    Ok(format!("{}; {tw_checks} treewidth bounds checked", seen.join("; ")))
}

// ---------------------------------------------------------------- 10

fn fpt_corpus() -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut out = Vec::new();
    for n in 0..=5usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        if pairs.len() <= 6 {
            for bits in 0u32..1 << pairs.len() {
                let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, &e)| e).collect();
                out.push(Graph::new(n, &edges).unwrap());
            }
        }
    }
    for l in 1..=3 {
        out.push(g_of(GraphKind::Grid(l)));
    }
    for n in 1..=12 {
        out.push(g_of(GraphKind::Path(n)));
        out.push(g_of(GraphKind::Complete(n.min(9))));
        out.push(g_of(GraphKind::Star(n - 1)));
    }
    for _ in 0..300 {
        let n = rng.gen_range(1..=12);
        out.push(random_graph(&mut rng, n, 2 * n));
    }
    out
}

fn fpt_dichotomy() -> Outcome {
    let cfg = Constants::desk();
    let corpus = fpt_corpus();
    ensure!(corpus.len() >= DP_MIN_INSTANCES, "corpus of {}", corpus.len());
    let vc = ParameterPlugin::vertex_cover();
    let lp = ParameterPlugin::longest_path();
    let (mut dp_checks, mut decided) = (0, 0);
    for (i, g) in corpus.iter().enumerate() {
        let (bv, bl) = (brute_vc(g), brute_longest_path(g));
        for td in [heuristic_decomposition(g), best_decomposition(g, &cfg).map_err(|e| e.to_string())?] {
            let (v, cover) = vc_width_dp(g, &td).map_err(|e| e.to_string())?;
            ensure!(v == bv && cover.len() == v, "graph {i}: vc {v}, brute {bv}");
            ensure!(g.edges().all(|(a, b)| cover.contains(a) || cover.contains(b)), "graph {i}: cover misses an edge");
            let (l, path) = longest_path_width_dp(g, &td).map_err(|e| e.to_string())?;
            let shape = if g.n() == 0 { path.is_empty() } else { path.edge_len() == l && path.is_valid_in(g) };
            ensure!(l == bl && shape, "graph {i}: path {l}, brute {bl}");
            dp_checks += 1;
        }
        if i % 4 == 0 {
            for (plugin, truth) in [(&vc, bv), (&lp, bl)] {
                for k in [truth.saturating_sub(1), truth] {
                    let d = decide(g, plugin, k, &cfg, i as u64).map_err(|e| e.to_string())?;
                    if let Some(ans) = d.at_most_k() {
                        ensure!(ans == (truth <= k), "graph {i}: {} <= {k} answered {ans}, truth {truth}", plugin.name);
                        decided += 1;
                    }
                }
            }
        }
    }
    // Bramble branch on a clique, whose cover number is n - 1.
    let k60 = g_of(GraphKind::Complete(60));
    let dense = Constants { c_web: 0.01, c_top: 4.0, ..Constants::desk() };
    let d = decide(&k60, &vc, 1, &dense, 2).map_err(|e| e.to_string())?;
    let Verdict::Exceeds { guaranteed, .. } = &d.verdict else {
        return Err(format!("K60 verdict {:?}", d.at_most_k()));
    };
    ensure!(*guaranteed > 1 && *guaranteed <= 59, "K60 guarantee {guaranteed}");
    Ok(format!("{} graphs, {dp_checks} DP runs match brute force, {decided} verdicts agree, K60 exceeds with guarantee {guaranteed}", corpus.len()))
}

// ---------------------------------------------------------------- 11

fn emitted() -> Result<Vec<(Graph, WitnessFile)>, String> {
    let cfg = Constants::desk();
    let dense = Constants { c_web: 0.01, c_top: 4.0, ..Constants::desk() };
    let e = |x: Error| x.to_string();
    let mut out = Vec::new();
    let fmt = io::Format::Edgelist;

    let g3 = g_of(GraphKind::Grid(3));
    let mut b = grid_bramble(3);
    b.order = Some(certify_order(&b, &cfg).map_err(e)?);
    out.push((g3.clone(), WitnessFile::new(&g3, fmt, Certificate::Bramble(b), "grid", None, &cfg)));
    let (_, td) = exact_treewidth(&g3, &cfg).map_err(e)?;
    out.push((g3.clone(), WitnessFile::new(&g3, io::Format::Dimacs, Certificate::TreeDecomposition { decomposition: td, exact: true }, "exact", None, &cfg)));

    let g8 = g_of(GraphKind::Grid(8));
    let r = find_bramble(&g8, &cfg, 5).map_err(e)?;
    let mut b = r.bramble;
    b.order = Some(certify_order(&b, &cfg).map_err(e)?);
    out.push((g8.clone(), WitnessFile::new(&g8, fmt, Certificate::Bramble(b), "find-bramble", Some(5), &cfg)));
    let set = doubling_driver(&g8, &cfg).map_err(e)?.witness.ok_or("grid(8) gave no unsplittable set")?;
    out.push((g8.clone(), WitnessFile::new(&g8, fmt, Certificate::UnsplittableSet(set), "doubling", None, &cfg)));

    let k40 = g_of(GraphKind::Complete(40));
    let WebOrDecomposition::Web(web) = build_web_or_decomposition(&k40, 4, 2, false).map_err(e)?.outcome else {
        return Err("K40 gave no web".into());
    };
    let mut b = bramble_from_web(&k40, &web, &cfg).map_err(e)?;
    b.order = Some(certify_order(&b, &cfg).map_err(e)?);
    out.push((k40.clone(), WitnessFile::new(&k40, fmt, Certificate::Kweb(web), "web", None, &cfg)));
    out.push((k40.clone(), WitnessFile::new(&k40, fmt, Certificate::Bramble(b), "from-web", None, &cfg)));

    let k60 = g_of(GraphKind::Complete(60));
    let rep = gridlike_pipeline(&k60, 2, &dense, 2).map_err(e)?;
    let glm = rep.gridlike().ok_or("no grid-like minor")?.clone();
    out.push((k60.clone(), WitnessFile::new(&k60, fmt, Certificate::Gridlike(glm), "pipeline", Some(2), &dense)));
    let pb = bounded_degree_subgraph(&k60, 2, &dense, 2).map_err(e)?.bramble.ok_or("no perfect bramble")?;
    let structure = Some(check_structure(&pb, &dense).map_err(e)?);
    out.push((k60.clone(), WitnessFile::new(&k60, fmt, Certificate::PerfectBramble { bramble: pb, structure }, "perfect", Some(2), &dense)));
    let d = decide(&k60, &ParameterPlugin::vertex_cover(), 1, &dense, 2).map_err(e)?;
    out.push((k60.clone(), WitnessFile::new(&k60, fmt, Certificate::Dichotomy(d), "fpt", Some(2), &dense)));

    let p20 = g_of(GraphKind::Path(20));
    let d = decide(&p20, &ParameterPlugin::longest_path(), 30, &cfg, 0).map_err(e)?;
    out.push((p20.clone(), WitnessFile::new(&p20, fmt, Certificate::Dichotomy(d), "fpt", Some(0), &cfg)));
    let td = TreeDecomposition::from_elimination_order(&p20, &(0..20).collect::<Vec<_>>());
    out.push((p20.clone(), WitnessFile::new(&p20, fmt, Certificate::TreeDecomposition { decomposition: td, exact: false }, "order", None, &cfg)));
    Ok(out)
}

/// Pointers to every array of numbers inside the payload.
fn number_arrays(v: &Value, at: String, out: &mut Vec<String>) {
    match v {
        Value::Array(items) => {
            if !items.is_empty() && items.iter().all(Value::is_u64) {
                out.push(at.clone());
            }
            for (i, x) in items.iter().enumerate() {
                number_arrays(x, format!("{at}/{i}"), out);
            }
        }
        Value::Object(map) => {
            for (k, x) in map {
                number_arrays(x, format!("{at}/{k}"), out);
            }
        }
        _ => {}
    }
}

fn rejected(json: &Value, g: &Graph) -> bool {
    match WitnessFile::from_json(&json.to_string()) {
        Ok(w) => w.verify(g).is_err(),
        Err(_) => true,
    }
}

fn witness_round_trip() -> Outcome {
    let first = emitted()?;
    let second = emitted()?;
    for ((g, w), (_, again)) in first.iter().zip(&second) {
        let kind = w.certificate.kind();
        ensure!(w.provenance.validated, "{kind} ({}) not validated on emission", w.provenance.algorithm);
        let text = w.to_json();
        ensure!(text == again.to_json(), "{kind} ({}) differs between identical runs", w.provenance.algorithm);
        let back = WitnessFile::from_json(&text).map_err(|e| e.to_string())?;
        ensure!(back == *w && back.to_json() == text, "{kind} does not round-trip");
        back.verify(g).map_err(|e| format!("{kind}: {e}"))?;
    }

    let mut mutations = 0;
    let mut survivors = Vec::new();
    let mut check = |json: Value, g: &Graph, what: String| {
        mutations += 1;
        if !rejected(&json, g) {
            survivors.push(what);
        }
    };
    for (wi, (g, w)) in first.iter().enumerate() {
        let base: Value = serde_json::from_str(&w.to_json()).unwrap();
        let kind = w.certificate.kind();
        let out_of_range = Value::from(g.n() + 3);

        let mut j = base.clone();
        let sha = j["graph_ref"]["sha256"].as_str().unwrap().to_string();
        let flipped = if sha.starts_with('0') { format!("1{}", &sha[1..]) } else { format!("0{}", &sha[1..]) };
        j["graph_ref"]["sha256"] = flipped.into();
        check(j, g, format!("{kind}: hash"));
        let mut j = base.clone();
        j["graph_ref"]["n"] = (g.n() + 1).into();
        check(j, g, format!("{kind}: n"));

        let mut arrays = Vec::new();
        number_arrays(&base["certificate"]["payload"], String::new(), &mut arrays);
        let mut rng = ChaCha8Rng::seed_from_u64(wi as u64);
        for _ in 0..4.min(arrays.len()) {
            let at = &arrays[rng.gen_range(0..arrays.len())];
            let mut j = base.clone();
            let arr = j["certificate"]["payload"].pointer_mut(at).unwrap().as_array_mut().unwrap();
            let i = rng.gen_range(0..arr.len());
            arr[i] = out_of_range.clone();
            check(j, g, format!("{kind}: vertex at {at}/{i}"));
        }
    }
    // Semantic corruptions.
    let find = |kind: &str, alg: &str| first.iter().find(|(_, w)| w.certificate.kind() == kind && w.provenance.algorithm == alg).unwrap();
    let (g, w) = find("bramble", "grid");
    let base: Value = serde_json::from_str(&w.to_json()).unwrap();
    let mut j = base.clone();
    j["certificate"]["payload"]["order"]["lower_bound"] = 5.into();
    check(j, g, "bramble order inflated".into());
    let mut j = base.clone();
    j["certificate"]["payload"]["elements"][0] = serde_json::json!([0]);
    j["certificate"]["payload"]["elements"][1] = serde_json::json!([8]);
    check(j, g, "bramble elements far apart".into());
    let mut j = base.clone();
    j["certificate"]["payload"]["elements"][0] = serde_json::json!([0, 8]);
    check(j, g, "bramble element disconnected".into());

    let (g, w) = find("tree-decomposition", "exact");
    let base: Value = serde_json::from_str(&w.to_json()).unwrap();
    let mut j = base.clone();
    j["certificate"]["payload"]["decomposition"]["width"] = 2.into();
    check(j, g, "decomposition width lowered".into());
    let mut j = base.clone();
    j["certificate"]["payload"]["decomposition"]["bags"][0] = serde_json::json!([]);
    check(j, g, "decomposition bag emptied".into());
    let mut j = base.clone();
    j["graph_ref"]["format"] = "edgelist".into();
    check(j, g, "decomposition format switched".into());

    let (g, w) = find("tree-decomposition", "order");
    let mut j: Value = serde_json::from_str(&w.to_json()).unwrap();
    j["certificate"]["payload"]["exact"] = true.into();
    let claimed = j["certificate"]["payload"]["decomposition"]["width"].as_u64().unwrap();
    if claimed > 1 {
        check(j, g, "inexact decomposition marked exact".into());
    }

    let (g, w) = find("kweb", "web");
    let base: Value = serde_json::from_str(&w.to_json()).unwrap();
    let mut j = base.clone();
    j["certificate"]["payload"]["k"] = 5.into();
    check(j, g, "web k raised".into());
    let mut j = base.clone();
    j["certificate"]["payload"]["linkages"][0][1].as_array_mut().unwrap().pop();
    check(j, g, "web linkage path dropped".into());

    let (g, w) = find("gridlike", "pipeline");
    let mut j: Value = serde_json::from_str(&w.to_json()).unwrap();
    let order = j["certificate"]["payload"]["order"].as_u64().unwrap();
    j["certificate"]["payload"]["order"] = (order + 1).into();
    check(j, g, "grid-like order raised".into());

    let (g, w) = find("perfect-bramble", "perfect");
    let base: Value = serde_json::from_str(&w.to_json()).unwrap();
    let mut j = base.clone();
    j["certificate"]["payload"]["bramble"]["element_edges"][0].as_array_mut().unwrap().clear();
    check(j, g, "perfect element edges cleared".into());
    let mut j = base.clone();
    let hv = j["certificate"]["payload"]["structure"]["host_vertices"].as_u64().unwrap();
    j["certificate"]["payload"]["structure"]["host_vertices"] = (hv + 1).into();
    check(j, g, "perfect structure report altered".into());

    let (g, w) = find("dichotomy", "fpt");
    let mut j: Value = serde_json::from_str(&w.to_json()).unwrap();
    j["certificate"]["payload"]["k"] = 5000.into();
    check(j, g, "dichotomy k raised above the guarantee".into());
    let (g, w) = first.iter().filter(|(_, w)| w.certificate.kind() == "dichotomy").nth(1).unwrap();
    let mut j: Value = serde_json::from_str(&w.to_json()).unwrap();
    j["certificate"]["payload"]["verdict"]["value"] = 18.into();
    check(j, g, "dichotomy value lowered".into());

    ensure!(survivors.is_empty(), "{} of {mutations} mutations accepted: {survivors:?}", survivors.len());
    ensure!(mutations >= MIN_MUTATIONS, "only {mutations} mutations");
    Ok(format!("{} witnesses verify and reproduce byte for byte; {mutations} mutations rejected", first.len()))
}
