//! `bramble`: build, emit and re-check treewidth certificates.
//!
//! Exit status: 0 on success, 1 when a certificate fails validation or no
//! witness could be produced, 2 on malformed input or exceeded capacity.

use std::path::PathBuf;
use std::process::ExitCode;

use bramble_core::bramble::{bramble_from_web, certify_order, find_bramble};
use bramble_core::decomposition::{approximate_treewidth, exact_treewidth};
use bramble_core::fpt::{decide, ParameterPlugin};
use bramble_core::graph::io::{self, Format};
use bramble_core::graph::{generate, GraphKind};
use bramble_core::gridlike::{gridlike_pipeline_with, PipelineOutcome};
use bramble_core::perfect::{bounded_degree_subgraph, check_structure};
use bramble_core::separators::doubling_driver;
use bramble_core::web::{build_web_or_decomposition, WebOrDecomposition};
use bramble_core::witness::{Certificate, WitnessFile};
use bramble_core::{Constants, Error, Graph};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bramble", version, about = "Certified witnesses for large and small treewidth")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML file overriding individual constants of the preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Preset::Desk)]
    preset: Preset,
    /// Graph format for input files and for `generate` output.
    #[arg(long, global = true, default_value = "edgelist")]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Validate intermediate objects and round-trip every witness.
    #[arg(long, global = true)]
    debug_validate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Default,
    Desk,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph.
    Generate {
        #[command(subcommand)]
        kind: GenKind,
    },
    Bramble {
        #[command(subcommand)]
        how: BrambleCmd,
    },
    /// A web of order `h` with `k` paths per linkage, or a decomposition.
    Web {
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        h: usize,
    },
    /// Grid-like minor of order `p`.
    Gridlike {
        graph: PathBuf,
        #[arg(long)]
        p: usize,
        /// Web order; defaults to `p^2`.
        #[arg(long)]
        h: Option<usize>,
    },
    /// Perfect bramble of the given order and its bounded-degree union.
    Perfect {
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    Treewidth {
        #[arg(value_enum)]
        mode: TwMode,
        graph: PathBuf,
        /// With `approx`: emit the set without a sparse separator instead.
        #[arg(long)]
        unsplittable: bool,
    },
    /// Re-validate a witness against its graph.
    Verify {
        witness: PathBuf,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Decide `pi(G) <= k`.
    FptSolve {
        graph: PathBuf,
        #[arg(long, default_value = "vc")]
        parameter: String,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Grid { l: usize },
    Complete { n: usize },
    Path { n: usize },
    Star { leaves: usize },
    /// `m` uniform edges on `n` vertices, from `--seed`.
    Random { n: usize, m: usize },
}

#[derive(Subcommand)]
enum BrambleCmd {
    FindBramble {
        graph: PathBuf,
    },
    FromWeb {
        graph: PathBuf,
        #[arg(long)]
        h: usize,
        /// Paths per linkage; at least `h^2`.
        #[arg(long)]
        k: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TwMode {
    Exact,
    Approx,
}

/// Failure with its exit status.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Fail(1, e.to_string()),
            _ => Fail(2, e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn constants(opts: &Opts) -> Result<Constants, Fail> {
    let base = match opts.preset {
        Preset::Default => Constants::default(),
        Preset::Desk => Constants::desk(),
    };
    let Some(path) = &opts.config else {
        return Ok(base);
    };
    let text = std::fs::read_to_string(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    let over: toml::Table = text.parse().map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    let mut table = toml::Table::try_from(&base).expect("constants serialize");
    table.extend(over);
    let cfg: Constants = toml::Value::Table(table)
        .try_into()
        .map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    cfg.check()?;
    Ok(cfg)
}

fn read_graph(path: &PathBuf, format: Format) -> Result<Graph, Fail> {
    let text = std::fs::read_to_string(path).map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
    Ok(io::parse(&text, format)?)
}

fn emit(opts: &Opts, text: &str) -> Result<(), Fail> {
    match &opts.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail(2, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes the witness; a payload that failed validation is still written,
/// for inspection, but the run fails.
fn write_witness(opts: &Opts, g: &Graph, w: WitnessFile) -> Result<(), Fail> {
    let text = w.to_json();
    if opts.debug_validate {
        let back = WitnessFile::from_json(&text)?;
        if back != w || back.to_json() != text {
            return Err(Fail(1, "witness does not round-trip".into()));
        }
        back.verify(g).map_err(|e| Fail(1, format!("round-tripped witness: {e}")))?;
    }
    emit(opts, &text)?;
    eprintln!("wrote {} witness", w.certificate.kind());
    if w.provenance.validated {
        Ok(())
    } else {
        Err(Fail(1, format!("{} witness failed validation", w.certificate.kind())))
    }
}

fn run(cli: &Cli) -> Result<(), Fail> {
    let opts = &cli.opts;
    let cfg = constants(opts)?;
    let seed = opts.seed;
    let witness =
        |g: &Graph, c: Certificate, alg: &str, seed: Option<u64>| WitnessFile::new(g, opts.format, c, alg, seed, &cfg);
    match &cli.cmd {
        Cmd::Generate { kind } => {
            let kind = match *kind {
                GenKind::Grid { l } => GraphKind::Grid(l),
                GenKind::Complete { n } => GraphKind::Complete(n),
                GenKind::Path { n } => GraphKind::Path(n),
                GenKind::Star { leaves } => GraphKind::Star(leaves),
                GenKind::Random { n, m } => GraphKind::Random { n, m, seed },
            };
            emit(opts, &io::write(&generate(kind)?, opts.format))
        }
        Cmd::Bramble { how: BrambleCmd::FindBramble { graph } } => {
            let g = read_graph(graph, opts.format)?;
            let r = find_bramble(&g, &cfg, seed)?;
            if let Some(why) = &r.degenerate {
                eprintln!("degenerate: {why}");
            }
            if let Some(c) = r.bramble.order {
                eprintln!("bramble with {} elements, order >= {}", r.bramble.len(), c.lower_bound);
            }
            write_witness(opts, &g, witness(&g, Certificate::Bramble(r.bramble), "find-bramble", Some(seed)))
        }
        Cmd::Bramble { how: BrambleCmd::FromWeb { graph, h, k } } => {
            let g = read_graph(graph, opts.format)?;
            let k = k.unwrap_or(h * h);
            match build_web_or_decomposition(&g, k, *h, opts.debug_validate)?.outcome {
                WebOrDecomposition::Web(web) => {
                    let mut b = bramble_from_web(&g, &web, &cfg)?;
                    if b.order.is_none() {
                        b.order = Some(certify_order(&b, &cfg)?);
                    }
                    eprintln!("bramble with {} elements, order >= {}", b.len(), b.order.map_or(0, |c| c.lower_bound));
                    write_witness(opts, &g, witness(&g, Certificate::Bramble(b), "bramble-from-web", None))
                }
                WebOrDecomposition::Decomposition(td) => {
                    eprintln!("no web; decomposition of width {}", td.width);
                    let c = Certificate::TreeDecomposition { decomposition: td, exact: false };
                    write_witness(opts, &g, witness(&g, c, "web-or-decomposition", None))
                }
            }
        }
        Cmd::Web { graph, k, h } => {
            let g = read_graph(graph, opts.format)?;
            let c = match build_web_or_decomposition(&g, *k, *h, opts.debug_validate)?.outcome {
                WebOrDecomposition::Web(web) => {
                    eprintln!("web of order {} with {} paths per linkage", web.order(), web.k);
                    Certificate::Kweb(web)
                }
                WebOrDecomposition::Decomposition(td) => {
                    eprintln!("no web; decomposition of width {}", td.width);
                    Certificate::TreeDecomposition { decomposition: td, exact: false }
                }
            };
            write_witness(opts, &g, witness(&g, c, "web-or-decomposition", None))
        }
        Cmd::Gridlike { graph, p, h } => {
            let g = read_graph(graph, opts.format)?;
            let h = h.unwrap_or((p * p).max(2));
            let r = gridlike_pipeline_with(&g, *p, h, &cfg, seed)?;
            match r.outcome {
                PipelineOutcome::GridLike { minor, stage } => {
                    eprintln!("grid-like minor of order {} via {stage:?}", minor.order);
                    write_witness(opts, &g, witness(&g, Certificate::Gridlike(minor), "gridlike-pipeline", Some(seed)))
                }
                PipelineOutcome::Clique { model } => {
                    Err(Fail(1, format!("clique minor on {} trees is too small for order {p}", model.trees.len())))
                }
                PipelineOutcome::Failed(f) => match f.decomposition {
                    Some(td) => {
                        eprintln!("no web; decomposition of width {}", td.width);
                        let c = Certificate::TreeDecomposition { decomposition: td, exact: false };
                        write_witness(opts, &g, witness(&g, c, "gridlike-pipeline", Some(seed)))
                    }
                    None => Err(Fail(1, format!("pipeline failed at {:?}: {}", f.stage, f.reason))),
                },
            }
        }
        Cmd::Perfect { graph, order } => {
            let g = read_graph(graph, opts.format)?;
            let r = bounded_degree_subgraph(&g, *order, &cfg, seed)?;
            match r.bramble {
                Some(pb) => {
                    let structure = check_structure(&pb, &cfg)?;
                    eprintln!(
                        "perfect bramble with {} elements, order {}, union of {} vertices and {} edges, max degree {}",
                        pb.len(),
                        pb.len().div_ceil(2),
                        structure.host_vertices,
                        structure.host_edges,
                        r.max_degree.unwrap_or(0)
                    );
                    let c = Certificate::PerfectBramble { bramble: pb, structure: Some(structure) };
                    write_witness(opts, &g, witness(&g, c, "bounded-degree-subgraph", Some(seed)))
                }
                None => match r.pipeline.outcome {
                    PipelineOutcome::Failed(f) if f.decomposition.is_some() => {
                        let td = f.decomposition.expect("checked");
                        eprintln!("no web; decomposition of width {}", td.width);
                        let c = Certificate::TreeDecomposition { decomposition: td, exact: false };
                        write_witness(opts, &g, witness(&g, c, "bounded-degree-subgraph", Some(seed)))
                    }
                    _ => Err(Fail(1, format!("no perfect bramble of order {order}"))),
                },
            }
        }
        Cmd::Treewidth { mode: TwMode::Exact, graph, .. } => {
            let g = read_graph(graph, opts.format)?;
            let (tw, td) = exact_treewidth(&g, &cfg)?;
            eprintln!("treewidth {tw}");
            let c = Certificate::TreeDecomposition { decomposition: td, exact: true };
            write_witness(opts, &g, witness(&g, c, "exact-treewidth", None))
        }
        Cmd::Treewidth { mode: TwMode::Approx, graph, unsplittable } => {
            let g = read_graph(graph, opts.format)?;
            if *unsplittable {
                let out = doubling_driver(&g, &cfg)?;
                let set = out.witness.ok_or_else(|| Fail(1, "every tried k gave a decomposition".into()))?;
                eprintln!("set without a sparse separator at k = {}", set.k);
                return write_witness(opts, &g, witness(&g, Certificate::UnsplittableSet(set), "doubling-driver", None));
            }
            let (bracket, td) = approximate_treewidth(&g, &cfg)?;
            let cond = if bracket.conditional { "conditional " } else { "" };
            eprintln!("treewidth <= {}; {cond}lower figure {}", bracket.k1, bracket.k2);
            let c = Certificate::TreeDecomposition { decomposition: td, exact: false };
            write_witness(opts, &g, witness(&g, c, "approximate-treewidth", None))
        }
        Cmd::Verify { witness: wpath, graph } => {
            let text = std::fs::read_to_string(wpath).map_err(|e| Fail(2, format!("{}: {e}", wpath.display())))?;
            let w = WitnessFile::from_json(&text)?;
            let g = read_graph(graph, w.graph_ref.format)?;
            match w.verify(&g) {
                Ok(()) => {
                    eprintln!("{} witness ok", w.certificate.kind());
                    Ok(())
                }
                Err(e) => Err(Fail(1, format!("{} witness invalid: {e}", w.certificate.kind()))),
            }
        }
        Cmd::FptSolve { graph, parameter, k } => {
            let g = read_graph(graph, opts.format)?;
            let plugin = ParameterPlugin::by_name(parameter)?;
            let r = decide(&g, &plugin, *k, &cfg, seed)?;
            match r.at_most_k() {
                Some(true) => eprintln!("{} <= {k}", plugin.name),
                Some(false) => eprintln!("{} > {k}", plugin.name),
                None => eprintln!("undecided: decomposition too wide for the solver"),
            }
            let decided = r.at_most_k().is_some();
            write_witness(opts, &g, witness(&g, Certificate::Dichotomy(r), "fpt-decide", Some(seed)))?;
            if decided {
                Ok(())
            } else {
                Err(Fail(1, "no verdict".into()))
            }
        }
    }
}
