//! Randomized bramble from a set without sparse separators and a
//! concurrent flow on it.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{certify_order, max_concurrent_flow, Bramble};
use crate::config::Constants;
use crate::error::{input, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::separators::doubling_driver;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FindBrambleReport {
    pub seed: u64,
    pub k: usize,
    pub u: VertexSet,
    pub w0: VertexSet,
    pub w: VertexSet,
    /// Number of random subsets, `floor(k^1.5)`.
    pub d: usize,
    /// Subset size, `floor(sqrt(k) ln k)`.
    pub s: usize,
    /// Repetitions per subset, `floor(ln n)`.
    pub rounds: usize,
    pub flow_value: f64,
    /// Sets built before duplicates were merged; always `d * rounds`.
    pub constructed: usize,
    pub bramble: Bramble,
    /// First validator complaint, if any. A failed trial, not an error.
    pub violation: Option<String>,
    /// Set when the parameters leave nothing to sample.
    pub degenerate: Option<String>,
}

impl FindBrambleReport {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

fn stream(i: usize, j: usize) -> u64 {
    ((i as u64) << 32) | j as u64
}

pub fn find_bramble(g: &Graph, cfg: &Constants, seed: u64) -> Result<FindBrambleReport> {
    if g.n() == 0 || !g.is_connected() {
        return input("find_bramble needs a nonempty connected graph");
    }
    let outcome = doubling_driver(g, cfg)?;
    let n = g.n();
    let rounds = (n as f64).ln().floor() as usize;
    let mut report = FindBrambleReport {
        seed,
        k: 0,
        u: g.all_vertices(),
        w0: VertexSet::new(),
        w: VertexSet::new(),
        d: 0,
        s: 0,
        rounds,
        flow_value: 0.0,
        constructed: 0,
        bramble: Bramble::default(),
        violation: None,
        degenerate: None,
    };
    let Some(wit) = outcome.witness else {
        return Ok(degenerate(g, report, "no set without a sparse separator at any k".into(), cfg));
    };
    let k = wit.k;
    report.k = k;
    report.u = wit.u.clone();
    report.w0 = wit.w.clone();
    let kf = k as f64;
    report.d = kf.powf(1.5).floor() as usize;
    report.s = (kf.sqrt() * kf.ln()).floor() as usize;
    if report.s == 0 || rounds == 0 || wit.w.len() < k {
        let why = format!("k = {k}, n = {n} leave no paths to sample");
        return Ok(degenerate(g, report, why, cfg));
    }
    if report.s >= k {
        return Err(Error::Internal(format!("subset size {} leaves no z outside it", report.s)));
    }
    let (h, map) = g.induced(&wit.u)?;
    let local = |v: usize| wit.u.as_slice().binary_search(&v).expect("inside u");
    let w0_local: VertexSet = wit.w.iter().map(local).collect();
    let flow = max_concurrent_flow(&h, &w0_local, cfg)?;
    report.flow_value = flow.value;
    let w: Vec<usize> = w0_local.as_slice()[..k].to_vec();
    report.w = w.iter().map(|&v| map[v]).collect();

    let mut elements = Vec::with_capacity(report.d * rounds);
    for i in 1..=report.d {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream(i, 0));
        let picked = index::sample(&mut rng, k, report.s).into_vec();
        let rest: Vec<usize> = (0..k).filter(|x| !picked.contains(x)).collect();
        let z = w[rest[rng.gen_range(0..rest.len())]];
        let targets: Vec<usize> = picked.iter().map(|&x| w[x]).collect();
        for j in 1..=rounds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream(i, j));
            let mut b = Vec::new();
            for &u in &targets {
                let options = flow.paths_between(z, u);
                let total: f64 = options.iter().map(|(_, a)| a).sum();
                if options.is_empty() || total <= 0.0 {
                    return Err(Error::Internal(format!("no flow between {z} and {u}")));
                }
                let mut r = rng.gen::<f64>() * total;
                let mut chosen = &options[options.len() - 1].0;
                for (p, a) in &options {
                    if r < *a {
                        chosen = p;
                        break;
                    }
                    r -= a;
                }
                b.extend(chosen.vertices().iter().map(|&v| map[v]));
            }
            elements.push(VertexSet::from_iter_unsorted(b));
        }
    }
    report.constructed = elements.len();
    elements.sort();
    elements.dedup();
    report.bramble = Bramble::new(elements);
    finish(g, report, cfg)
}

fn degenerate(g: &Graph, mut report: FindBrambleReport, why: String, cfg: &Constants) -> FindBrambleReport {
    report.degenerate = Some(why);
    report.bramble = Bramble::new(vec![report.u.clone()]);
    report.constructed = 1;
    finish(g, report, cfg).expect("a single connected element certifies")
}

fn finish(g: &Graph, mut report: FindBrambleReport, cfg: &Constants) -> Result<FindBrambleReport> {
    report.violation = report.bramble.validate(g).err().map(|v| v.to_string());
    if report.violation.is_none() {
        report.bramble.order = Some(certify_order(&report.bramble, cfg)?);
    }
    Ok(report)
}
