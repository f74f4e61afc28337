//! Command-line front end: parse inputs, orchestrate the pipeline, and emit
//! machine-readable results (JSON for single runs, CSV for sweeps).
//!
//! Exit codes: 0 success, 2 parse error, 3 parameter violation, 4 internal
//! invariant violation, 5 resource limit. With a fixed seed every subcommand
//! is byte-deterministic except the elapsed_ms column of sweeps.

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use medianqs::function::random_polynomial;
use medianqs::median::largest_odd_k;
use medianqs::reeb::build_reeb;
use medianqs::triangulation::{build_triangulation, min_angle_bound};
use medianqs::wasserstein::{random_node_measure, verify_theorem2};
use medianqs::{Error, InputFunction, ScalarField};

/// Boundary sampling density for the partition audits.
const AUDIT_PER_EDGE: usize = 16;
/// Arc sampling density for the triangulation diameter audit.
const AUDIT_PER_ARC: usize = 8;

#[derive(Parser)]
#[command(name = "medianqs", version, about = "Median quasi-state solver on the unit sphere")]
struct Cli {
    /// Seed for all randomized subcommands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a quasi-state value with its certified error bound.
    Compute {
        /// Builtin name (z, one, z-shift-sq) or path to a JSON function file.
        #[arg(long)]
        function: String,
        /// Target error bound; the solver picks the smallest admissible depth.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Subdivision depth (exactly one of --epsilon / --N).
        #[arg(long = "N")]
        n: Option<u32>,
        /// Region count: an odd integer, or "auto" for the densest admissible.
        #[arg(long, default_value = "auto")]
        k: String,
    },
    /// Run compute over several depths; emits CSV rows ordered by N.
    Convergence {
        /// Builtin name or path to a JSON function file.
        #[arg(long)]
        function: String,
        /// Comma-separated subdivision depths.
        #[arg(long = "N-list", value_delimiter = ',', required = true, value_name = "N,N,...")]
        n_list: Vec<u32>,
    },
    /// Audit the equal-area partition against its certified bounds.
    AuditPartition {
        /// Region count (odd, at least 237).
        #[arg(long)]
        k: u32,
    },
    /// Audit the subdivided icosahedron against its certified bounds.
    AuditTriangulation {
        #[arg(long = "N")]
        n: u32,
    },
    /// Build the contour tree of a function; print a summary or a JSON dump.
    Reeb {
        /// Builtin name or path to a JSON function file.
        #[arg(long)]
        function: String,
        #[arg(long = "N")]
        n: u32,
        /// Emit the collapsed tree as JSON {nodes, edges}.
        #[arg(long)]
        dump: bool,
    },
    /// Empirical verification suites.
    Verify {
        /// Quasi-state continuity: lhs <= pl_lip_bound * W_inf on random pairs.
        #[arg(long)]
        theorem2: bool,
        #[arg(long = "N", default_value_t = 8)]
        n: u32,
        #[arg(long, default_value_t = 200)]
        trials: u32,
    },
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> medianqs::Result<()> {
    let mut out = writer(&cli.output)?;
    match cli.command {
        Command::Compute { function, epsilon, n, k } => {
            let f = load_function(&function)?;
            let (n, k) = match (epsilon, n) {
                (Some(eps), None) => {
                    if k != "auto" {
                        return Err(Error::Parse(
                            "--k is only meaningful together with --N".into(),
                        ));
                    }
                    medianqs::select_parameters(eps, f.lip_bound()?)?
                }
                (None, Some(n)) => (n, parse_k(&k, n)?),
                _ => {
                    return Err(Error::Parse(
                        "compute needs exactly one of --epsilon or --N".into(),
                    ))
                }
            };
            let res = medianqs::compute(&f, n, k)?;
            emit_json(&mut out, &res)
        }
        Command::Convergence { function, n_list } => {
            let f = load_function(&function)?;
            convergence(&mut out, &f, n_list)
        }
        Command::AuditPartition { k } => {
            let p = medianqs::partition::build_partition(k)?;
            #[derive(Serialize)]
            struct PartitionAudit {
                k: u32,
                n: u32,
                max_diameter: f64,
                bound_7_over_sqrt_k: f64,
                min_inradius: f64,
                inradius_bound: f64,
                area_max_rel_err: f64,
            }
            emit_json(
                &mut out,
                &PartitionAudit {
                    k: p.k(),
                    n: p.interior_bands(),
                    max_diameter: p.diameter_audit(AUDIT_PER_EDGE),
                    bound_7_over_sqrt_k: p.diameter_bound(),
                    min_inradius: p.inradius_audit(AUDIT_PER_EDGE),
                    inradius_bound: p.inradius_bound(),
                    area_max_rel_err: p.area_max_rel_err(),
                },
            )
        }
        Command::AuditTriangulation { n } => {
            let t = build_triangulation(n)?;
            #[derive(Serialize)]
            struct TriangulationAudit {
                #[serde(rename = "N")]
                n: u32,
                faces: usize,
                vertices: usize,
                max_curv_diameter: f64,
                diameter_bound: f64,
                min_angle: f64,
                theta0: f64,
            }
            emit_json(
                &mut out,
                &TriangulationAudit {
                    n: t.n(),
                    faces: t.face_count(),
                    vertices: t.vertex_count(),
                    max_curv_diameter: t.max_curvilinear_diameter(AUDIT_PER_ARC),
                    diameter_bound: t.diameter_bound(),
                    min_angle: t.min_planar_angle(),
                    theta0: min_angle_bound(),
                },
            )
        }
        Command::Reeb { function, n, dump } => {
            let tri = build_triangulation(n)?;
            let f = load_function(&function)?;
            let field = ScalarField::sample(&tri, &f)?;
            let tree = build_reeb(&field)?;
            let c = tree.collapsed();
            if dump {
                #[derive(Serialize)]
                struct DumpNode {
                    id: u32,
                    value: f64,
                    degree: u32,
                }
                #[derive(Serialize)]
                struct ReebDump {
                    nodes: Vec<DumpNode>,
                    edges: Vec<[u32; 2]>,
                }
                let nodes = c
                    .nodes
                    .iter()
                    .zip(&c.values)
                    .zip(&c.degrees)
                    .map(|((&id, &value), &degree)| DumpNode { id, value, degree })
                    .collect();
                let edges = c.edges.iter().map(|&(a, b)| [a, b]).collect();
                emit_json(&mut out, &ReebDump { nodes, edges })
            } else {
                let leaves = c.degrees.iter().filter(|&&d| d == 1).count();
                writeln!(
                    out,
                    "collapsed contour tree: {} nodes, {} edges, {} leaves",
                    c.nodes.len(),
                    c.edges.len(),
                    leaves
                )
                .map_err(io_err)
            }
        }
        Command::Verify { theorem2, n, trials } => {
            if !theorem2 {
                return Err(Error::Parse("verify needs a suite flag (--theorem2)".into()));
            }
            verify_t2(&mut out, n, trials, cli.seed)
        }
    }
}

/// Resolves the function argument: builtin names first, then a file path.
fn load_function(src: &str) -> medianqs::Result<InputFunction> {
    if let Ok(f) = InputFunction::builtin(src) {
        return Ok(f);
    }
    let text = std::fs::read_to_string(src).map_err(|e| {
        Error::Parse(format!(
            "cannot read function file {src:?}: {e} (builtins: z, one, z-shift-sq)"
        ))
    })?;
    InputFunction::from_json_str(&text)
}

fn parse_k(k: &str, n: u32) -> medianqs::Result<u32> {
    if k == "auto" {
        return Ok(largest_odd_k(n));
    }
    k.parse::<u32>()
        .map_err(|e| Error::Parse(format!("--k must be \"auto\" or an odd integer: {e}")))
}

fn writer(path: &Option<PathBuf>) -> medianqs::Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(std::io::stdout())),
        Some(p) => {
            let f = std::fs::File::create(p).map_err(|e| {
                Error::Parameter(format!("cannot create output file {}: {e}", p.display()))
            })?;
            Ok(Box::new(f))
        }
    }
}

fn emit_json<T: Serialize>(out: &mut Box<dyn Write>, value: &T) -> medianqs::Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Invariant(format!("serialization failed: {e}")))?;
    writeln!(out, "{text}").map_err(io_err)
}

fn io_err(e: std::io::Error) -> Error {
    // A reader closing the pipe early (e.g. `| head`) is not an error.
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        std::process::exit(0);
    }
    Error::Parameter(format!("cannot write output: {e}"))
}

/// One CSV row per depth, computed by a worker pool capped by
/// MEDIANQS_THREADS, printed in ascending N regardless of completion order.
fn convergence(
    out: &mut Box<dyn Write>,
    f: &InputFunction,
    mut n_list: Vec<u32>,
) -> medianqs::Result<()> {
    if n_list.is_empty() {
        return Err(Error::Parse("--N-list needs at least one depth".into()));
    }
    n_list.sort_unstable();
    n_list.dedup();
    let threads = match std::env::var("MEDIANQS_THREADS") {
        Ok(s) => s
            .parse::<usize>()
            .ok()
            .filter(|&t| t >= 1)
            .ok_or_else(|| {
                Error::Parameter(format!("MEDIANQS_THREADS must be a positive integer, got {s:?}"))
            })?,
        Err(_) => std::thread::available_parallelism().map_or(1, |p| p.get()),
    }
    .min(n_list.len());

    type Row = (u32, u32, f64, f64, u64);
    let results: Vec<Mutex<Option<medianqs::Result<Row>>>> =
        n_list.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n_list.len() {
                    break;
                }
                let n = n_list[i];
                let k = largest_odd_k(n);
                let start = Instant::now();
                let row = medianqs::compute(f, n, k)
                    .map(|r| (n, k, r.value, r.error_bound, start.elapsed().as_millis() as u64));
                *results[i].lock().expect("worker never panics holding the lock") = Some(row);
            });
        }
    });

    writeln!(out, "N,k,value,error_bound,elapsed_ms").map_err(io_err)?;
    for cell in results {
        let row = cell
            .into_inner()
            .expect("workers finished")
            .expect("every index was claimed")?;
        let (n, k, value, error_bound, ms) = row;
        writeln!(out, "{n},{k},{value},{error_bound},{ms}").map_err(io_err)?;
    }
    Ok(())
}

/// Random quasi-state continuity trials: per-trial (lhs, rhs) plus a summary.
fn verify_t2(out: &mut Box<dyn Write>, n: u32, trials: u32, seed: u64) -> medianqs::Result<()> {
    let tri = build_triangulation(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0u32;
    for trial in 0..trials {
        let f = InputFunction::Polynomial(random_polynomial(&mut rng, 3));
        let field = ScalarField::sample(&tri, &f)?;
        let tree = build_reeb(&field)?;
        let mu = random_node_measure(&mut rng, tri.vertex_count(), 8);
        let nu = random_node_measure(&mut rng, tri.vertex_count(), 8);
        let (lhs, rhs) = verify_theorem2(&field, &tree, &mu, &nu)?;
        let flag = if lhs <= rhs {
            ""
        } else {
            violations += 1;
            "  VIOLATION"
        };
        writeln!(out, "trial {trial:03}: lhs = {lhs:.12}, rhs = {rhs:.12}{flag}").map_err(io_err)?;
    }
    let verdict = if violations == 0 { "PASS" } else { "FAIL" };
    writeln!(out, "theorem2: {trials} trials, {violations} violations: {verdict}")
        .map_err(io_err)?;
    if violations > 0 {
        return Err(Error::Invariant(format!(
            "{violations} of {trials} trials violated the continuity bound"
        )));
    }
    Ok(())
}
