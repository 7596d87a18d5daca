//! Command-line front end for `allen-metric`.
//!
//! [`run`] is the whole program; `main` only forwards the process
//! arguments and streams.

use std::fmt::Display;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use allen_metric::catalog::{algebra, AlgebraId, WitnessName};
use allen_metric::closure::{close, verify_closed, verify_maximality, MaximalityMode, MaximalityOptions};
use allen_metric::composition::{compose, CompositionTable};
use allen_metric::instance::{MIsatInstance, Model};
use allen_metric::oracle::{
    brute_force_isat, derive_composition_table, end_relation_by_enumeration, start_relation_by_enumeration,
    OracleVerdict,
};
use allen_metric::relation::{BasicRelation, IntervalRelation};
use allen_metric::solver::{check_model, solve_with, Backend, SolveError, SolveOptions, Verdict};
use allen_metric::text::parse_instance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "allen-metric", version, about = "Allen's interval algebra with metric constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BackendArg {
    Auto,
    Horn,
    Points,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Horn => Backend::HornDlr,
            BackendArg::Points => Backend::PointAlgebra,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide an instance file and print a model if it is satisfiable.
    Solve {
        file: PathBuf,
        /// Only decide; do not build a model.
        #[arg(long)]
        no_model: bool,
        #[arg(long, value_enum, default_value = "auto")]
        backend: BackendArg,
    },
    /// Inspect the eight algebras.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Close a set of relations under converse, intersection and composition.
    Closure {
        #[arg(required = true)]
        relations: Vec<String>,
        /// Print the size only.
        #[arg(long)]
        size: bool,
    },
    /// Check that every single-relation extension of an algebra is NP-hard.
    Maximality {
        algebra: String,
        /// Number of extensions to test.
        #[arg(long, default_value_t = 200, conflicts_with = "full")]
        sample: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Test every relation outside the algebra.
        #[arg(long)]
        full: bool,
        /// Worker threads; 0 uses one per core.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        /// Close each extension completely instead of stopping at a witness.
        #[arg(long)]
        full_closure: bool,
        /// Print every extension, not just the summary.
        #[arg(long)]
        verbose: bool,
    },
    /// Compose two relations.
    Compose { r1: String, r2: String },
    /// Converse of a relation.
    Converse { r: String },
    /// Brute-force decision for small instances.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Re-derive the composition table and the endpoint projections.
    Selftest,
}

#[derive(Debug, Subcommand)]
enum CatalogCommand {
    /// Print each algebra's size and whether it is closed.
    Verify,
    /// Print whether a relation belongs to an algebra.
    Member { algebra: String, relation: String },
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    Solve { file: PathBuf },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn line(&mut self, s: impl Display) -> io::Result<()> {
        writeln!(self.out, "{s}")
    }

    fn fail(&mut self, code: i32, s: impl Display) -> io::Result<i32> {
        writeln!(self.err, "error: {s}")?;
        Ok(code)
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            EXIT_INTERNAL
        }
    }
}

fn dispatch(command: Command, io: &mut Io<'_>) -> io::Result<i32> {
    match command {
        Command::Solve { file, no_model, backend } => solve_file(&file, no_model, backend.into(), io),
        Command::Catalog { command: CatalogCommand::Verify } => catalog_verify(io),
        Command::Catalog {
            command: CatalogCommand::Member { algebra: name, relation },
        } => {
            let (id, r) = match (name.parse::<AlgebraId>(), relation.parse::<IntervalRelation>()) {
                (Ok(id), Ok(r)) => (id, r),
                (Err(e), _) => return io.fail(EXIT_INPUT, e),
                (_, Err(e)) => return io.fail(EXIT_INPUT, format!("`{relation}`: {e}")),
            };
            io.line(algebra(id).contains(r))?;
            Ok(EXIT_OK)
        }
        Command::Closure { relations, size } => {
            let mut input = Vec::new();
            for text in &relations {
                match text.parse::<IntervalRelation>() {
                    Ok(r) => input.push(r),
                    Err(e) => return io.fail(EXIT_INPUT, format!("`{text}`: {e}")),
                }
            }
            let report = close(&input);
            io.line(format!("size={}", report.closed_set.len()))?;
            if !size {
                for r in report.closed_set.iter() {
                    io.line(r)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Maximality {
            algebra: name,
            sample,
            seed,
            full,
            jobs,
            full_closure,
            verbose,
        } => {
            let id = match name.parse::<AlgebraId>() {
                Ok(id) => id,
                Err(e) => return io.fail(EXIT_INPUT, e),
            };
            let mode = if full { MaximalityMode::Full } else { MaximalityMode::Sample { n: sample, seed } };
            let options = MaximalityOptions {
                mode,
                early_exit: !full_closure,
            };
            maximality(id, options, jobs, verbose, io)
        }
        Command::Compose { r1, r2 } => match (r1.parse::<IntervalRelation>(), r2.parse::<IntervalRelation>()) {
            (Ok(a), Ok(b)) => {
                io.line(compose(a, b))?;
                Ok(EXIT_OK)
            }
            (Err(e), _) => io.fail(EXIT_INPUT, format!("`{r1}`: {e}")),
            (_, Err(e)) => io.fail(EXIT_INPUT, format!("`{r2}`: {e}")),
        },
        Command::Converse { r } => match r.parse::<IntervalRelation>() {
            Ok(a) => {
                io.line(a.converse())?;
                Ok(EXIT_OK)
            }
            Err(e) => io.fail(EXIT_INPUT, format!("`{r}`: {e}")),
        },
        Command::Oracle {
            command: OracleCommand::Solve { file },
        } => oracle_solve(&file, io),
        Command::Selftest => selftest(io),
    }
}

fn read_instance(path: &Path, io: &mut Io<'_>) -> io::Result<Result<MIsatInstance, i32>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return io.fail(EXIT_INPUT, format!("{}: {e}", path.display())).map(Err),
    };
    match parse_instance(&text) {
        Ok(inst) => Ok(Ok(inst)),
        Err(e) => io.fail(EXIT_INPUT, format!("{}: {e}", path.display())).map(Err),
    }
}

fn print_model(inst: &MIsatInstance, m: &Model, io: &mut Io<'_>) -> io::Result<()> {
    for id in inst.intervals() {
        io.line(format!("{} = [{}, {}]", inst.name(id), m.start(id), m.end(id)))?;
    }
    Ok(())
}

fn solve_file(path: &Path, no_model: bool, backend: Backend, io: &mut Io<'_>) -> io::Result<i32> {
    let inst = match read_instance(path, io)? {
        Ok(inst) => inst,
        Err(code) => return Ok(code),
    };
    let options = SolveOptions {
        backend,
        build_model: !no_model,
    };
    match solve_with(&inst, options) {
        Ok(report) => match report.verdict {
            Verdict::Sat(m) => {
                if let Err(v) = check_model(&inst, &m) {
                    return io.fail(EXIT_INTERNAL, format!("constructed model fails verification: {v}"));
                }
                io.line("SAT")?;
                print_model(&inst, &m, io)?;
                Ok(EXIT_OK)
            }
            Verdict::Accepted => {
                io.line("SAT")?;
                Ok(EXIT_OK)
            }
            Verdict::Unsat(stage) => {
                io.line(format!("UNSAT stage={stage}"))?;
                Ok(EXIT_UNSAT)
            }
        },
        Err(SolveError::Validation(e)) => {
            io.line("UNSAT stage=validation")?;
            io.fail(EXIT_INPUT, e)
        }
        Err(e @ SolveError::Internal(_)) => io.fail(EXIT_INTERNAL, e),
    }
}

fn catalog_verify(io: &mut Io<'_>) -> io::Result<i32> {
    let mut ok = true;
    for id in AlgebraId::ALL {
        let set = algebra(id);
        let closed = verify_closed(set.as_set());
        let size_ok = set.len() == id.expected_size();
        ok &= size_ok && closed.is_ok();
        let closed_text = match &closed {
            Ok(()) => "closed".to_string(),
            Err(v) => format!("not-closed ({v})"),
        };
        io.line(format!(
            "{:<6} size={} expected={} {}",
            id.name(),
            set.len(),
            id.expected_size(),
            closed_text
        ))?;
    }
    io.line(if ok { "catalog ok" } else { "catalog MISMATCH" })?;
    Ok(if ok { EXIT_OK } else { EXIT_UNSAT })
}

fn maximality(id: AlgebraId, options: MaximalityOptions, jobs: usize, verbose: bool, io: &mut Io<'_>) -> io::Result<i32> {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool,
        Err(e) => return io.fail(EXIT_INTERNAL, e),
    };
    let report = pool.install(|| verify_maximality(id, options));
    io.line(format!("algebra={}", report.algebra))?;
    io.line(format!("candidates={}", report.candidates))?;
    io.line(format!("tested={}", report.extensions.len()))?;
    for w in WitnessName::ALL {
        io.line(format!("witness {w}: {}", report.count(w)))?;
    }
    if verbose {
        for e in &report.extensions {
            io.line(e)?;
        }
    }
    for e in report.counterexamples() {
        io.line(format!("counterexample {e}"))?;
    }
    io.line(format!("verdict={}", report.verdict()))?;
    Ok(if report.counterexamples().next().is_none() { EXIT_OK } else { EXIT_UNSAT })
}

fn oracle_solve(path: &Path, io: &mut Io<'_>) -> io::Result<i32> {
    let inst = match read_instance(path, io)? {
        Ok(inst) => inst,
        Err(code) => return Ok(code),
    };
    match brute_force_isat(&inst) {
        Ok(OracleVerdict::Sat(model)) => {
            io.line("SAT")?;
            for (id, (s, e)) in inst.intervals().zip(model) {
                io.line(format!("{} = [{s}, {e}]", inst.name(id)))?;
            }
            Ok(EXIT_OK)
        }
        Ok(OracleVerdict::Unsat) => {
            io.line("UNSAT")?;
            Ok(EXIT_UNSAT)
        }
        Err(e) => io.fail(EXIT_INPUT, e),
    }
}

fn selftest(io: &mut Io<'_>) -> io::Result<i32> {
    let mut ok = true;
    let derived = derive_composition_table();
    let standard = CompositionTable::standard();
    let table_ok = derived == standard;
    ok &= table_ok;
    io.line(format!("composition table vs enumeration: {}", if table_ok { "ok" } else { "MISMATCH" }))?;
    for b in BasicRelation::ALL {
        let start = start_relation_by_enumeration(b);
        let end = end_relation_by_enumeration(b);
        let row_ok = start == b.start_relation() && end == b.end_relation();
        ok &= row_ok;
        io.line(format!(
            "{:<2} start {} end {}: {}",
            b.symbol(),
            start.symbol(),
            end.symbol(),
            if row_ok { "ok" } else { "MISMATCH" }
        ))?;
    }
    io.line(if ok { "selftest ok" } else { "selftest FAILED" })?;
    Ok(if ok { EXIT_OK } else { EXIT_INTERNAL })
}
