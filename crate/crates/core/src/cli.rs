//! The `gwloc` command line.
//!
//! Exit codes: 0 on success, 1 when the mathematics fails (degenerate
//! weights, unsupported genus, a failing check), 2 for malformed input.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::algebra::{format_rational, parse_rational};
use crate::axioms::{render_table, run_suite, wdvv_quantum_product, Manifest};
use crate::error::{GwError, Result};
use crate::gkm::{builtin, space_from_str, space_to_json, GkmSpace, BUILTIN_NAMES};
use crate::graphs::{enumerate_graphs, graph_count};
use crate::localize::{
    compute_invariant, nonequivariant_value, ComputeOptions, Insertion, InvariantRequest,
};

#[derive(Parser, Debug)]
#[command(
    name = "gwloc",
    version,
    about = "Equivariant Gromov-Witten invariants of GKM spaces by localization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute an invariant <tau_k1 a1, ..., tau_kn an>_{g,n,A}.
    Compute(ComputeArgs),
    /// List or count the decorated graphs of a moduli space.
    Graphs(GraphsArgs),
    /// Run an axiom manifest.
    Check(CheckArgs),
    /// Builtin spaces.
    #[command(subcommand)]
    Spaces(SpacesCommand),
    /// Small quantum product and its associativity.
    Quantum(QuantumArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SpaceSource {
    /// A builtin space, `builtin:NAME`.
    #[arg(long)]
    space: Option<String>,
    /// A space description in JSON.
    #[arg(long)]
    space_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Target {
    #[command(flatten)]
    source: SpaceSource,
    #[arg(long, default_value_t = 0)]
    genus: u32,
    /// Curve class as comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    class: String,
    /// `NAME`, `NAME^k` or `tau:K:NAME`; repeatable.
    #[arg(long = "insert")]
    insert: Vec<String>,
    /// Repeat the whole insertion list this many times.
    #[arg(long, default_value_t = 1)]
    repeat: usize,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    target: Target,
    /// Print the equivariant rational function instead of the constant.
    #[arg(long)]
    equivariant: bool,
    /// Also report every graph's contribution.
    #[arg(long)]
    per_graph: bool,
    #[arg(long)]
    json: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Args, Debug)]
struct GraphsArgs {
    #[command(flatten)]
    target: Target,
    /// Number of markings when no insertions are given.
    #[arg(long)]
    markings: Option<usize>,
    /// Print only the number of graphs.
    #[arg(long)]
    count: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Manifest file; `bundled` runs the shipped suite.
    #[arg(long)]
    suite: String,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum SpacesCommand {
    List,
    /// Print a builtin space as JSON.
    Export {
        name: String,
    },
}

#[derive(Args, Debug)]
struct QuantumArgs {
    #[command(flatten)]
    source: SpaceSource,
    /// Comma-separated class names.
    #[arg(long)]
    basis: String,
    /// Novikov area bound.
    #[arg(long, default_value = "3")]
    area: String,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    parallel: Option<usize>,
}

/// Runs one command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        // the reader went away (`gwloc graphs ... | head`)
        Err(GwError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}

fn io(e: std::io::Error) -> GwError {
    GwError::Io(e)
}

fn load_space(src: &SpaceSource) -> Result<GkmSpace> {
    let space = match (&src.space, &src.space_file) {
        (Some(name), None) => {
            let name = name
                .strip_prefix("builtin:")
                .ok_or_else(|| GwError::Parse(format!("expected builtin:NAME, got '{name}'")))?;
            builtin(name)?
        }
        (None, Some(path)) => space_from_str(&std::fs::read_to_string(path)?)?,
        _ => {
            return Err(GwError::Parse(
                "give exactly one of --space and --space-file".into(),
            ))
        }
    };
    let report = space.validate();
    if !report.passed() {
        return Err(GwError::Schema(format!(
            "space fails validation:\n{report}"
        )));
    }
    Ok(space)
}

fn parse_class(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map_err(|_| GwError::Parse(format!("bad class coordinate '{c}'")))
        })
        .collect()
}

fn insertions(space: &GkmSpace, t: &Target) -> Result<Vec<Insertion>> {
    let one: Vec<Insertion> = t
        .insert
        .iter()
        .map(|s| Insertion::parse(space, s))
        .collect::<Result<_>>()?;
    Ok(std::iter::repeat_n(one, t.repeat).flatten().collect())
}

/// Runs `f` on a pool of the requested size, or on the default pool.
fn with_threads<R: Send>(n: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match n {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| GwError::Parse(format!("thread pool: {e}")))?
            .install(f)),
    }
}

fn print_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?).map_err(io)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Compute(a) => compute(a, out),
        Command::Graphs(a) => graphs(a, out),
        Command::Check(a) => check(a, out),
        Command::Spaces(SpacesCommand::List) => {
            for name in BUILTIN_NAMES {
                let s = builtin(name)?;
                writeln!(
                    out,
                    "builtin:{name}\tdim {}\t{} points\t{} spheres\th2 rank {}",
                    s.dim,
                    s.points.len(),
                    s.spheres.len(),
                    s.h2_rank
                )
                .map_err(io)?;
            }
            Ok(0)
        }
        Command::Spaces(SpacesCommand::Export { name }) => {
            print_json(out, &space_to_json(&builtin(&name)?))?;
            Ok(0)
        }
        Command::Quantum(a) => quantum(a, out),
    }
}

fn compute(a: ComputeArgs, out: &mut dyn Write) -> Result<i32> {
    let space = load_space(&a.target.source)?;
    let class = parse_class(&a.target.class)?;
    let ins = insertions(&space, &a.target)?;
    let labels: Vec<String> = ins.iter().map(Insertion::label).collect();
    let req = InvariantRequest::new(&space, a.target.genus, class.clone(), ins);
    let opts = ComputeOptions {
        per_graph: a.per_graph,
        ..Default::default()
    };
    let res = with_threads(a.parallel, || compute_invariant(&req, &opts))??;
    if a.json {
        let mut v = res.to_json(&space);
        v["genus"] = json!(a.target.genus);
        v["class"] = json!(class);
        v["insertions"] = json!(labels);
        print_json(out, &v)?;
        return Ok(0);
    }
    if let Some(parts) = &res.per_graph {
        for c in parts {
            writeln!(
                out,
                "{}  aut {}  cover {}  {}",
                c.graph.describe(&space),
                c.aut_order,
                c.cover_factor,
                c.value
            )
            .map_err(io)?;
        }
    }
    if a.equivariant {
        writeln!(out, "{}", res.equivariant).map_err(io)?;
    } else {
        let c = nonequivariant_value(&res.equivariant)?;
        writeln!(out, "{}", format_rational(&c)).map_err(io)?;
    }
    Ok(0)
}

fn graphs(a: GraphsArgs, out: &mut dyn Write) -> Result<i32> {
    let space = load_space(&a.target.source)?;
    let class = parse_class(&a.target.class)?;
    let n = match a.markings {
        Some(n) => n,
        None => insertions(&space, &a.target)?.len(),
    };
    if a.count {
        writeln!(out, "{}", graph_count(&space, a.target.genus, n, &class)?).map_err(io)?;
        return Ok(0);
    }
    let gs = enumerate_graphs(&space, a.target.genus, n, &class)?;
    if a.json {
        let list: Vec<Value> = gs
            .iter()
            .map(|g| {
                let mut v = g.to_json(&space);
                v["aut_order"] = json!(g.aut_order());
                v
            })
            .collect();
        print_json(out, &Value::Array(list))?;
    } else {
        for g in &gs {
            writeln!(out, "{}  aut {}", g.describe(&space), g.aut_order()).map_err(io)?;
        }
    }
    Ok(0)
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let manifest = if a.suite == "bundled" {
        Manifest::bundled()
    } else {
        Manifest::from_path(a.suite.as_ref())?
    };
    let reports = with_threads(a.parallel, || {
        run_suite(&manifest, &ComputeOptions::default())
    })??;
    if a.json {
        print_json(
            out,
            &Value::Array(reports.iter().map(|r| r.to_json()).collect()),
        )?;
    } else {
        write!(out, "{}", render_table(&reports)).map_err(io)?;
    }
    Ok(if reports.iter().all(|r| r.pass()) {
        0
    } else {
        1
    })
}

fn quantum(a: QuantumArgs, out: &mut dyn Write) -> Result<i32> {
    let space = load_space(&a.source)?;
    let basis: Vec<&str> = a.basis.split(',').map(str::trim).collect();
    let bound = parse_rational(&a.area)?;
    let (table, report) = with_threads(a.parallel, || {
        wdvv_quantum_product(&space, &basis, &bound, &ComputeOptions::default())
    })??;
    if a.json {
        let mut v = table.to_json();
        v["associative"] = json!(report.pass());
        v["triples"] = json!(report.triples);
        print_json(out, &v)?;
    } else {
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let terms: Vec<String> = table
                    .multiply(i, j)
                    .iter()
                    .flat_map(|(class, v)| {
                        let q = if class.iter().all(|&c| c == 0) {
                            String::new()
                        } else {
                            let c: Vec<String> = class.iter().map(|x| x.to_string()).collect();
                            format!("q^({})*", c.join(","))
                        };
                        let basis = &basis;
                        v.iter()
                            .enumerate()
                            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
                            .map(move |(k, c)| match format_rational(c).as_str() {
                                "1" => format!("{q}{}", basis[k]),
                                "-1" => format!("-{q}{}", basis[k]),
                                c => format!("{c}*{q}{}", basis[k]),
                            })
                    })
                    .collect();
                let rhs = if terms.is_empty() {
                    "0".to_string()
                } else {
                    terms.join(" + ")
                };
                writeln!(out, "{} * {} = {}", basis[i], basis[j], rhs).map_err(io)?;
            }
        }
        writeln!(
            out,
            "associativity: {} ({} triples)",
            if report.pass() { "PASS" } else { "FAIL" },
            report.triples
        )
        .map_err(io)?;
    }
    Ok(if report.pass() { 0 } else { 1 })
}
