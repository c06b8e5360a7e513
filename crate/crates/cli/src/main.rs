use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quatgraph_core::report::{self, BoundProp, LocusTarget};
use quatgraph_core::{AlgebraSpec, Error, RunConfig};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "quatgraph",
    version,
    about = "Classifying graphs of definite quaternion orders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Places where the algebra (a, b) ramifies.
    Ramify {
        #[arg(short, allow_negative_numbers = true)]
        a: i64,
        #[arg(short, allow_negative_numbers = true)]
        b: i64,
        #[command(flatten)]
        out: Output,
    },
    /// Classifying graph of a genus of maximal or Eichler orders.
    Graph {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        tree: TreeArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Tree vertices whose orders contain a quadratic root or given elements.
    Locus {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        tree: TreeArgs,
        /// Root of x^2 - t x + n, given as `t,n`.
        #[arg(
            long,
            value_name = "T,N",
            allow_hyphen_values = true,
            conflicts_with = "gen"
        )]
        poly: Option<String>,
        /// Element with coordinates in 1, i, j, k, e.g. `1/2,0,1/2,0` (repeatable).
        #[arg(long = "gen", value_name = "C0,C1,C2,C3", allow_hyphen_values = true)]
        gen: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Random property checks of the endpoint bounds.
    Props {
        #[arg(long, value_enum, default_value = "general")]
        kind: PropKind,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Full pipeline for the maximal orders of the algebra ramified at {q, inf}.
    Report {
        #[arg(long = "ramified-prime", value_name = "Q")]
        ramified_prime: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
struct AlgebraArgs {
    #[arg(
        short,
        allow_negative_numbers = true,
        requires = "b",
        conflicts_with = "ramified_prime"
    )]
    a: Option<i64>,
    #[arg(short, allow_negative_numbers = true, requires = "a")]
    b: Option<i64>,
    /// Use the definite algebra ramified exactly at {Q, inf}.
    #[arg(
        long = "ramified-prime",
        value_name = "Q",
        required_unless_present = "a"
    )]
    ramified_prime: Option<u64>,
}

#[derive(Args, Debug)]
struct TreeArgs {
    #[arg(long, default_value_t = 2)]
    prime: u64,
    #[arg(long, default_value_t = 1)]
    level: u64,
    #[arg(long, default_value_t = 6)]
    radius: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Output {
    /// Write JSON here instead of standard output.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Also write a Graphviz drawing (graph and report only).
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PropKind {
    General,
    Bipartite,
}

enum Failure {
    Usage(String),
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn config(algebra: &AlgebraArgs, tree: &TreeArgs) -> RunConfig {
    let spec = match (algebra.a, algebra.b, algebra.ramified_prime) {
        (Some(a), Some(b), _) => AlgebraSpec::Pair(a, b),
        (_, _, Some(q)) => AlgebraSpec::RamifiedPrime(q),
        _ => unreachable!("clap enforces an algebra choice"),
    };
    RunConfig {
        algebra: spec,
        prime: tree.prime,
        level: tree.level,
        radius: tree.radius,
        seed: tree.seed,
    }
}

fn parse_int(s: &str) -> Result<i64, Failure> {
    s.trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("not an integer: {s:?}")))
}

fn parse_rational(s: &str) -> Result<(i64, i64), Failure> {
    match s.split_once('/') {
        Some((n, d)) => Ok((parse_int(n)?, parse_int(d)?)),
        None => Ok((parse_int(s)?, 1)),
    }
}

fn parse_target(poly: Option<&str>, gens: &[String]) -> Result<LocusTarget, Failure> {
    if let Some(p) = poly {
        let parts: Vec<&str> = p.split(',').collect();
        let [t, n] = parts[..] else {
            return Err(Failure::Usage(format!("expected T,N, got {p:?}")));
        };
        return Ok(LocusTarget::Polynomial {
            trace: parse_int(t)?,
            norm: parse_int(n)?,
        });
    }
    if gens.is_empty() {
        return Err(Failure::Usage("give --poly or at least one --gen".into()));
    }
    let list = gens
        .iter()
        .map(|g| {
            let c: Vec<(i64, i64)> = g.split(',').map(parse_rational).collect::<Result<_, _>>()?;
            <[(i64, i64); 4]>::try_from(c)
                .map_err(|_| Failure::Usage(format!("expected 4 coordinates, got {g:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(LocusTarget::Generators(list))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(doc: &T, dot: Option<&str>, out: &Output) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(doc)
        .map_err(|e| Failure::Core(Error::Internal(e.to_string())))?
        + "\n";
    match &out.json {
        Some(path) => write_text(path, &json)?,
        None => print!("{json}"),
    }
    match (&out.dot, dot) {
        (Some(path), Some(text)) => write_text(path, text),
        (Some(_), None) => Err(Failure::Usage(
            "--dot is only available for graph and report".into(),
        )),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ramify { a, b, out } => emit(&report::cmd_ramify(a, b)?, None, &out),
        Command::Graph { algebra, tree, out } => {
            let (doc, dot) = report::cmd_graph(&config(&algebra, &tree))?;
            emit(&doc, Some(&dot), &out)
        }
        Command::Locus {
            algebra,
            tree,
            poly,
            gen,
            out,
        } => {
            let target = parse_target(poly.as_deref(), &gen)?;
            emit(
                &report::cmd_locus(&config(&algebra, &tree), &target)?,
                None,
                &out,
            )
        }
        Command::Props {
            kind,
            samples,
            seed,
            out,
        } => {
            let prop = match kind {
                PropKind::General => BoundProp::General,
                PropKind::Bipartite => BoundProp::Bipartite,
            };
            emit(&report::cmd_props(prop, samples, seed)?, None, &out)
        }
        Command::Report {
            ramified_prime,
            out,
        } => {
            let (doc, dot) = report::cmd_report(ramified_prime)?;
            emit(&doc, Some(&dot), &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_precondition() { 2 } else { 3 })
        }
    }
}
