use std::io::{IsTerminal, Read};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use temporal_branchings::exact::oracle_enumerate;
use temporal_branchings::gen::{generate, GenConfig};
use temporal_branchings::io::{
    parse_cnf, parse_instance, parse_solution, parse_wdp, serialize_instance, serialize_solution,
};
use temporal_branchings::reach::verify_solution;
use temporal_branchings::reductions::{
    lift_roots_output, normalize_wdp, reduce_nae3sat_star, reduce_nae3sat_vertex, reduce_wdp,
    to_single_source,
};
use temporal_branchings::{
    solve, Disjointness, Method, Outcome, ProblemVariant, RootSet, SolveError, Spanning,
    TemporalDigraph,
};

const INFEASIBLE: u8 = 3;
const USAGE: u8 = 2;
const CAPABILITY: u8 = 4;

/// Disjoint spanning branchings in temporal digraphs.
#[derive(Parser)]
#[command(name = "tbranch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find k disjoint spanning branchings; exit 3 if there are none.
    Solve {
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Instance document, or `-` for stdin.
        instance: String,
    },
    /// Check a solution document; exit 3 if it is not a solution.
    Verify {
        #[arg(long)]
        spanning: Option<SpanningArg>,
        #[arg(long = "disjoint")]
        disjointness: Option<DisjointArg>,
        /// Number of branchings; defaults to the number in the solution.
        #[arg(long)]
        k: Option<usize>,
        instance: String,
        solution: String,
    },
    /// Write a reduced instance document.
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        /// DIMACS CNF, WDP document or instance document, by kind.
        input: String,
        /// Appearances added by `lift-roots`.
        #[arg(long, value_enum, default_value_t = SpanningArg::Temporal)]
        spanning: SpanningArg,
    },
    /// Decide by brute-force enumeration (small instances only).
    Oracle {
        #[command(flatten)]
        variant: VariantArgs,
        instance: String,
    },
    /// Write a random instance document.
    Gen {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        lifetime: u32,
        #[arg(long)]
        edge_prob: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        interval_activity: bool,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 0.3)]
        root_prob: f64,
        #[arg(long, default_value_t = 0.6)]
        activity_prob: f64,
    },
}

#[derive(Args)]
struct VariantArgs {
    #[arg(long, value_enum)]
    spanning: SpanningArg,
    #[arg(long = "disjoint", value_enum)]
    disjointness: DisjointArg,
    /// Number of branchings; defaults to the number of root sets. A single
    /// root set is used for all k branchings.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpanningArg {
    Temporal,
    Vertex,
}

#[derive(Clone, Copy, ValueEnum)]
enum DisjointArg {
    Edge,
    #[value(name = "t-edge")]
    TEdge,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Poly,
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceKind {
    NaeStar,
    NaeVertex,
    Wdp,
    SingleSource,
    LiftRoots,
}

impl From<SpanningArg> for Spanning {
    fn from(s: SpanningArg) -> Self {
        match s {
            SpanningArg::Temporal => Spanning::Temporal,
            SpanningArg::Vertex => Spanning::Vertex,
        }
    }
}

impl From<DisjointArg> for Disjointness {
    fn from(d: DisjointArg) -> Self {
        match d {
            DisjointArg::Edge => Disjointness::Edge,
            DisjointArg::TEdge => Disjointness::TEdge,
        }
    }
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure {
        code: USAGE,
        message: message.to_string(),
    }
}

fn from_solve(e: SolveError) -> Failure {
    let code = match e {
        SolveError::Unsupported { .. } | SolveError::ScaleGuard { .. } => CAPABILITY,
        SolveError::Model(_) | SolveError::NotInterval { .. } => USAGE,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn read(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
    }
}

fn resolve_k(roots: Vec<RootSet>, k: Option<usize>) -> Result<Vec<RootSet>, Failure> {
    match (k, roots.len()) {
        (None, _) => Ok(roots),
        (Some(k), n) if k == n => Ok(roots),
        (Some(k), 1) => Ok(vec![roots[0].clone(); k]),
        (Some(k), n) => Err(usage(format!(
            "--k {k} does not match the {n} root sets of the instance"
        ))),
    }
}

fn load(path: &str, k: Option<usize>) -> Result<(TemporalDigraph, Vec<RootSet>), Failure> {
    let (g, roots) = parse_instance(&read(path)?).map_err(|e| usage(format!("{path}: {e}")))?;
    Ok((g, resolve_k(roots, k)?))
}

fn report(outcome: Outcome, g: &TemporalDigraph, variant: ProblemVariant) -> Result<(), Failure> {
    match outcome {
        Outcome::Feasible(bs) => {
            print!("{}", serialize_solution(g, Some(variant), &bs));
            Ok(())
        }
        Outcome::Infeasible(reason) => {
            println!("INFEASIBLE");
            Err(Failure {
                code: INFEASIBLE,
                message: reason,
            })
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            variant,
            method,
            instance,
        } => {
            let (g, roots) = load(&instance, variant.k)?;
            let v = ProblemVariant::new(variant.spanning.into(), variant.disjointness.into());
            let method = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Poly => Method::Poly,
                MethodArg::Exact => Method::Exact,
            };
            let outcome = solve(&g, &roots, v, method).map_err(from_solve)?;
            report(outcome, &g, v)
        }
        Command::Oracle { variant, instance } => {
            let (g, roots) = load(&instance, variant.k)?;
            let v = ProblemVariant::new(variant.spanning.into(), variant.disjointness.into());
            let outcome = oracle_enumerate(&g, &roots, v).map_err(from_solve)?;
            report(outcome, &g, v)
        }
        Command::Verify {
            spanning,
            disjointness,
            k,
            instance,
            solution,
        } => {
            let text = read(&solution)?;
            let blocks = text
                .lines()
                .filter(|l| l.split_whitespace().next() == Some("branching"))
                .count();
            let (g, roots) = load(&instance, k.or((blocks > 0).then_some(blocks)))?;
            let (declared, bs) =
                parse_solution(&text, &g, &roots).map_err(|e| usage(format!("{solution}: {e}")))?;
            let variant = match (spanning, disjointness, declared) {
                (Some(s), Some(d), _) => ProblemVariant::new(s.into(), d.into()),
                (s, d, Some(v)) => ProblemVariant::new(
                    s.map_or(v.spanning, Into::into),
                    d.map_or(v.disjointness, Into::into),
                ),
                _ => {
                    return Err(usage(
                        "pass --spanning and --disjoint or a `variant` line in the solution",
                    ))
                }
            };
            match verify_solution(&g, &roots, &bs, variant) {
                Ok(()) => {
                    println!("VALID");
                    Ok(())
                }
                Err(reason) => {
                    println!("INVALID");
                    Err(Failure {
                        code: INFEASIBLE,
                        message: reason,
                    })
                }
            }
        }
        Command::Reduce {
            kind,
            input,
            spanning,
        } => {
            let text = read(&input)?;
            let at = |e: &dyn std::fmt::Display| usage(format!("{input}: {e}"));
            let out = match kind {
                ReduceKind::NaeStar => reduce_nae3sat_star(&parse_cnf(&text).map_err(|e| at(&e))?),
                ReduceKind::NaeVertex => {
                    reduce_nae3sat_vertex(&parse_cnf(&text).map_err(|e| at(&e))?)
                }
                ReduceKind::Wdp => {
                    let w = parse_wdp(&text).map_err(|e| at(&e))?;
                    if let Some(issue) = w.normalization_issue() {
                        eprintln!("note: normalizing: {issue}");
                    }
                    let w = normalize_wdp(&w).map_err(|e| at(&e))?;
                    reduce_wdp(&w).map_err(|e| at(&e))?
                }
                ReduceKind::SingleSource | ReduceKind::LiftRoots => {
                    let (g, roots) = parse_instance(&text).map_err(|e| at(&e))?;
                    if matches!(kind, ReduceKind::SingleSource) {
                        to_single_source(&g, &roots).map_err(|e| at(&e))?
                    } else {
                        lift_roots_output(&g, &roots, spanning.into()).map_err(|e| at(&e))?
                    }
                }
            };
            print!("{}", serialize_instance(&out.instance, &out.roots));
            Ok(())
        }
        Command::Gen {
            vertices,
            lifetime,
            edge_prob,
            seed,
            interval_activity,
            k,
            root_prob,
            activity_prob,
        } => {
            for (name, p) in [
                ("--edge-prob", edge_prob),
                ("--root-prob", root_prob),
                ("--activity-prob", activity_prob),
            ] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(usage(format!("{name} must lie in [0, 1], got {p}")));
                }
            }
            let (g, roots) = generate(&GenConfig {
                vertices,
                lifetime,
                edge_prob,
                seed,
                interval_activity,
                activity_prob,
                k,
                root_prob,
            });
            print!("{}", serialize_instance(&g, &roots));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let color = std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal();
            let label = match (f.code, color) {
                (INFEASIBLE, false) => "reason",
                (INFEASIBLE, true) => "\x1b[33mreason\x1b[0m",
                (_, false) => "error",
                (_, true) => "\x1b[31merror\x1b[0m",
            };
            eprintln!("{label}: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
