//! Command-line surface for the cubic graph-TSP toolkit.
//!
//! Exit codes: 0 success, 1 input error, 2 invariant breach (a breach
//! falsifies a shipped guarantee and must be loud). Errors are written to
//! stderr as one JSON object.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use cubic_tsp::batch;
use cubic_tsp::cubic3::{self, TourProvider};
use cubic_tsp::error::Error;
use cubic_tsp::factor::{initial_two_factor, TwoFactorJson};
use cubic_tsp::gen;
use cubic_tsp::graph::Graph;
use cubic_tsp::improve::ImproveConfig;
use cubic_tsp::oracle;
use cubic_tsp::rational::{to_f64, to_frac_string};
use cubic_tsp::reduce4;
use cubic_tsp::tour::{self, SolveReport};

#[derive(Parser)]
#[command(
    name = "cubic-tsp",
    version,
    about = "Graph-TSP approximations on cubic graphs"
)]
struct Cli {
    /// Thread count for batch runs (single instances always run
    /// single-threaded).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

/// Exactly one input source: an edge-list file or a named fixture.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct InputSource {
    /// Edge-list file: first line "n m", then m lines "u v" (0-based).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Named fixture: appendix48, k33, q3, heawood, diamond-pair,
    /// petersen, k4.
    #[arg(long)]
    fixture: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Full bipartite pipeline: reduce, improve, certify, build the tour.
    Solve {
        /// Edge-list files; several inputs run as a parallel batch.
        #[arg(long, num_args = 1.., conflicts_with = "fixture")]
        input: Vec<PathBuf>,
        #[arg(long)]
        fixture: Option<String>,
        /// Run the full per-step alternation and path-structure scans.
        #[arg(long)]
        debug_invariants: bool,
        /// Emit one JSON line per modification on stderr.
        #[arg(long)]
        trace: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Initial 2-factor (complement of a perfect matching) as JSON.
    TwoFactor {
        #[command(flatten)]
        source: InputSource,
    },
    /// Contract all potential 4-cycles; emit the reduced edge list and the
    /// record stack.
    Reduce {
        #[command(flatten)]
        source: InputSource,
    },
    /// Re-verify a solve report against its graph without re-running.
    Verify {
        #[command(flatten)]
        source: InputSource,
        /// Solve report JSON produced by `solve`.
        #[arg(long)]
        report: PathBuf,
    },
    /// Exhaustive ground truth on small instances.
    Oracle {
        #[command(flatten)]
        source: InputSource,
        #[arg(long, value_enum)]
        what: OracleWhat,
        /// Four node ids "a,b,c,d" (external labels) for potential4.
        #[arg(long)]
        nodes: Option<String>,
    },
    /// Exact guarantee arithmetic for general cubic graphs.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        b: Option<usize>,
    },
    /// Chorded-4-cycle gadget pipeline on a general cubic graph.
    Cubic3 {
        #[command(subcommand)]
        action: Cubic3Action,
    },
    /// Seeded random cubic bipartite instances (edge-list format).
    Generate {
        /// Nodes per side; the instance has twice as many.
        #[arg(long)]
        half_n: usize,
        /// Defaults to the CUBIC_TSP_SEED environment variable, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Output file (single instance) or directory (count > 1).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Dump a named fixture and its published data as JSON.
    Fixture {
        #[arg(long)]
        name: String,
    },
}

#[derive(Subcommand)]
enum Cubic3Action {
    /// Detect, contract, build a tour multigraph, uncontract, shortcut.
    Solve {
        #[command(flatten)]
        source: InputSource,
        #[arg(long, value_enum, default_value = "doubled-tree")]
        provider: ProviderArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleWhat {
    TwoFactors,
    MinCover,
    Tsp,
    Potential4,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderArg {
    DoubledTree,
    FactorPlusTree,
}

impl From<ProviderArg> for TourProvider {
    fn from(p: ProviderArg) -> Self {
        match p {
            ProviderArg::DoubledTree => TourProvider::DoubledTree,
            ProviderArg::FactorPlusTree => TourProvider::FactorPlusTree,
        }
    }
}

/// A loaded instance plus the label offset its output should use.
struct Instance {
    graph: Graph,
    label_offset: usize,
}

fn load_file(path: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(Error::Parse(format!("{}: {e}", path.display()))))?;
    let graph = Graph::parse_edge_list(&text).map_err(CliError::input)?;
    Ok(Instance {
        graph,
        label_offset: 0,
    })
}

fn load_source(source: &InputSource) -> Result<Instance, CliError> {
    if let Some(path) = &source.input {
        return load_file(path);
    }
    let name = source.fixture.as_deref().expect("clap enforces one source");
    let fx = gen::fixture(name).map_err(CliError::input)?;
    Ok(Instance {
        graph: fx.graph,
        label_offset: fx.label_offset,
    })
}

/// Error plus the exit code it maps to.
struct CliError {
    error: Error,
    code: u8,
}

impl CliError {
    fn input(error: Error) -> Self {
        CliError { error, code: 1 }
    }

    fn classify(error: Error) -> Self {
        let code = if error.is_invariant_breach() { 2 } else { 1 };
        CliError { error, code }
    }
}

fn emit(value: &serde_json::Value, output: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::input(Error::Parse(format!("{}: {e}", path.display())))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        batch::configure_jobs(jobs);
    }
    match cli.command {
        Command::Solve {
            input,
            fixture,
            debug_invariants,
            trace,
            output,
        } => {
            let cfg = ImproveConfig { debug_invariants };
            if let Some(name) = fixture {
                let fx = gen::fixture(&name).map_err(CliError::input)?;
                let out = tour::solve_bipartite(&fx.graph, cfg).map_err(CliError::classify)?;
                if trace {
                    for ev in &out.trace {
                        eprintln!("{}", serde_json::to_string(ev).expect("serializable"));
                    }
                }
                let report = SolveReport::from_outcome(&out, fx.label_offset);
                return emit(
                    &serde_json::to_value(&report).expect("serializable"),
                    output.as_deref(),
                );
            }
            if input.is_empty() {
                return Err(CliError::input(Error::Parse(
                    "solve needs --input or --fixture".into(),
                )));
            }
            if input.len() == 1 {
                let inst = load_file(&input[0])?;
                let out = tour::solve_bipartite(&inst.graph, cfg).map_err(CliError::classify)?;
                if trace {
                    for ev in &out.trace {
                        eprintln!("{}", serde_json::to_string(ev).expect("serializable"));
                    }
                }
                let report = SolveReport::from_outcome(&out, inst.label_offset);
                return emit(
                    &serde_json::to_value(&report).expect("serializable"),
                    output.as_deref(),
                );
            }
            // Batch mode: independent instances, parallel across --jobs.
            let instances: Vec<Instance> = input
                .iter()
                .map(|p| load_file(p))
                .collect::<Result<_, _>>()?;
            let graphs: Vec<Graph> = instances.iter().map(|i| i.graph.clone()).collect();
            let results = batch::solve_batch(&graphs, cfg);
            let mut reports = Vec::new();
            for (path, result) in input.iter().zip(results) {
                let out = result.map_err(CliError::classify)?;
                if trace {
                    for ev in &out.trace {
                        eprintln!("{}", serde_json::to_string(ev).expect("serializable"));
                    }
                }
                reports.push(json!({
                    "input": path.display().to_string(),
                    "report": SolveReport::from_outcome(&out, 0),
                }));
            }
            emit(&json!({ "schema": 1, "runs": reports }), output.as_deref())
        }
        Command::TwoFactor { source } => {
            let inst = load_source(&source)?;
            let f = initial_two_factor(&inst.graph).map_err(CliError::classify)?;
            let value = json!({
                "schema": 1,
                "components": f.component_count(),
                "factor": TwoFactorJson::from_factor(&f, inst.label_offset),
            });
            emit(&value, None)
        }
        Command::Reduce { source } => {
            let inst = load_source(&source)?;
            inst.graph
                .validate_cubic_bipartite()
                .map_err(CliError::input)?;
            let (reduced, records) =
                reduce4::reduce_all(&inst.graph).map_err(CliError::classify)?;
            let value = json!({
                "schema": 1,
                "n": inst.graph.node_count(),
                "reduced_n": reduced.node_count(),
                "contractions": records.len(),
                "edge_list": reduced.to_edge_list(),
                "records": records,
            });
            emit(&value, None)
        }
        Command::Verify { source, report } => {
            let inst = load_source(&source)?;
            let text = fs::read_to_string(&report)
                .map_err(|e| CliError::input(Error::Parse(format!("{}: {e}", report.display()))))?;
            let parsed: SolveReport = serde_json::from_str(&text)
                .map_err(|e| CliError::input(Error::Parse(format!("report: {e}"))))?;
            let passed = tour::verify_report(&inst.graph, &parsed).map_err(CliError::classify)?;
            emit(
                &json!({ "schema": 1, "verified": true, "checks": passed }),
                None,
            )
        }
        Command::Oracle {
            source,
            what,
            nodes,
        } => {
            let inst = load_source(&source)?;
            let g = &inst.graph;
            let off = inst.label_offset;
            let value = match what {
                OracleWhat::TwoFactors => {
                    let all = oracle::enumerate_two_factors(g).map_err(CliError::classify)?;
                    json!({
                        "schema": 1,
                        "count": all.len(),
                        "two_factors": all
                            .iter()
                            .map(|f| TwoFactorJson::from_factor(f, off))
                            .collect::<Vec<_>>(),
                    })
                }
                OracleWhat::MinCover => {
                    let (k, witness) =
                        oracle::min_cycle_cover_components(g).map_err(CliError::classify)?;
                    json!({
                        "schema": 1,
                        "min_components": k,
                        "witness": TwoFactorJson::from_factor(&witness, off),
                    })
                }
                OracleWhat::Tsp => {
                    let opt = oracle::exact_tsp(g).map_err(CliError::classify)?;
                    json!({ "schema": 1, "optimal_tour_length": opt })
                }
                OracleWhat::Potential4 => {
                    let spec = nodes.ok_or_else(|| {
                        CliError::input(Error::Parse("potential4 needs --nodes a,b,c,d".into()))
                    })?;
                    let ids: Vec<usize> = spec
                        .split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<Result<_, _>>()
                        .map_err(|_| {
                            CliError::input(Error::Parse(format!("bad --nodes {spec:?}")))
                        })?;
                    if ids.len() != 4 || ids.iter().any(|&v| v < off) {
                        return Err(CliError::input(Error::Parse(
                            "--nodes needs exactly four valid labels".into(),
                        )));
                    }
                    let s = [ids[0] - off, ids[1] - off, ids[2] - off, ids[3] - off];
                    let potential =
                        oracle::is_potential_4cycle_exact(g, &s).map_err(CliError::classify)?;
                    json!({ "schema": 1, "nodes": ids, "potential_4cycle": potential })
                }
            };
            emit(&value, None)
        }
        Command::Bounds { n, b } => {
            let combined = cubic3::combined_bound(n);
            let rational = |r: &cubic_tsp::rational::BigRational| json!({ "rational": to_frac_string(r), "decimal": to_f64(r) });
            let mut value = json!({
                "schema": 1,
                "n": n,
                "combined": {
                    "b_star": rational(&combined.b_star),
                    "coefficient": rational(&combined.coefficient),
                },
            });
            if let Some(b) = b {
                if b > n {
                    return Err(CliError::input(Error::Parse(
                        "--b must be at most --n".into(),
                    )));
                }
                value["at_b"] = json!({
                    "b": b,
                    "bound_cls": rational(&cubic3::bound_cls(n, b)),
                    "bound_ms": rational(&cubic3::bound_ms(n, b)),
                });
            }
            emit(&value, None)
        }
        Command::Cubic3 { action } => match action {
            Cubic3Action::Solve { source, provider } => {
                let inst = load_source(&source)?;
                let report = cubic3::solve_cubic(&inst.graph, provider.into())
                    .map_err(CliError::classify)?;
                emit(&serde_json::to_value(&report).expect("serializable"), None)
            }
        },
        Command::Generate {
            half_n,
            seed,
            count,
            output,
        } => {
            let base_seed = seed.unwrap_or_else(gen::seed_from_env);
            if count == 1 {
                let g =
                    gen::random_cubic_bipartite(half_n, base_seed).map_err(CliError::classify)?;
                match output {
                    Some(path) => fs::write(&path, g.to_edge_list()).map_err(|e| {
                        CliError::input(Error::Parse(format!("{}: {e}", path.display())))
                    })?,
                    None => print!("{}", g.to_edge_list()),
                }
                Ok(())
            } else {
                let dir = output.ok_or_else(|| {
                    CliError::input(Error::Parse(
                        "--output directory required for count > 1".into(),
                    ))
                })?;
                fs::create_dir_all(&dir).map_err(|e| {
                    CliError::input(Error::Parse(format!("{}: {e}", dir.display())))
                })?;
                for i in 0..count {
                    let s = base_seed + i as u64;
                    let g = gen::random_cubic_bipartite(half_n, s).map_err(CliError::classify)?;
                    let path = dir.join(format!("cubic-bipartite-h{half_n}-s{s}.txt"));
                    fs::write(&path, g.to_edge_list()).map_err(|e| {
                        CliError::input(Error::Parse(format!("{}: {e}", path.display())))
                    })?;
                }
                Ok(())
            }
        }
        Command::Fixture { name } => {
            let fx = gen::fixture(&name).map_err(CliError::input)?;
            let off = fx.label_offset;
            let cycles = |f: &cubic_tsp::factor::TwoFactor| TwoFactorJson::from_factor(f, off);
            let value = json!({
                "schema": 1,
                "name": fx.name,
                "n": fx.graph.node_count(),
                "m": fx.graph.edge_count(),
                "label_offset": off,
                "edge_list": fx.graph.to_edge_list(),
                "known": {
                    "f1": fx.known.f1.as_ref().map(cycles),
                    "f2": fx.known.f2.as_ref().map(cycles),
                    "hamilton": fx
                        .known
                        .hamilton
                        .as_ref()
                        .map(|h| h.iter().map(|&v| v + off).collect::<Vec<_>>()),
                    "expected_components": fx.known.expected_components,
                },
            });
            emit(&value, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { error, code }) => {
            let payload = json!({
                "schema": 1,
                "error": { "kind": error.kind(), "message": error.to_string() },
            });
            eprintln!("{}", serde_json::to_string(&payload).expect("serializable"));
            ExitCode::from(code)
        }
    }
}
