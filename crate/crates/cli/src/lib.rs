//! `pcdecomp` command implementation. [`run`] takes the full argument list
//! and writes to the supplied streams so it can be driven from tests.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pcdecomp_core::decomp::decompose;
use pcdecomp_core::extend::{approximate_once, iterate_to_consistency};
use pcdecomp_core::io::{parse, serialize, Format, MatrixDocument};
use pcdecomp_core::report::build_report;
use pcdecomp_core::weights::{geometric_mean_weights, rank_entities};
use pcdecomp_core::{PcError, PcMatrix, Tolerance};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "pcdecomp", version, about = "Analyze multiplicative pairwise comparison matrices")]
pub struct Cli {
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,

    /// Tolerance for |m_ij * m_ji - 1| when reading a matrix.
    #[arg(long, global = true, default_value_t = 1e-9)]
    recip_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the file holds a valid PC matrix.
    Validate(Input),
    /// Geometric-mean weights, listed by rank.
    Weights(Input),
    /// Inconsistency indicator and the worst triad.
    Inconsistency(Input),
    /// Split a 3x3 matrix into its orthogonal and consistent factors.
    Decompose(Input),
    /// Apply one submatrix reconstruction step and print the result.
    Approximate(Input),
    /// Repeat the reconstruction step until the matrix is consistent.
    Iterate {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        iteration: IterationArgs,
    },
    /// Everything above as one JSON document.
    Report {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        iteration: IterationArgs,
    },
}

#[derive(Debug, Args)]
struct Input {
    /// Matrix file, or `-` for standard input.
    file: PathBuf,
}

#[derive(Debug, Args)]
struct IterationArgs {
    /// Stop once the inconsistency indicator is at most this value.
    #[arg(long, default_value_t = Tolerance::DEFAULT_CONSISTENCY_EPS)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: pcdecomp_core::io::FormatError| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<PcError> for Failure {
    fn from(e: PcError) -> Self {
        match e {
            PcError::Overflow { .. } | PcError::NonFiniteEntry { .. } => Failure::Numeric(e.to_string()),
            PcError::InvalidTolerance { .. } | PcError::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

struct Loaded {
    doc: MatrixDocument,
    matrix: PcMatrix,
    format: Format,
}

fn load(cli: &Cli, path: &Path) -> Result<Loaded, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    let format = cli.format.unwrap_or_else(|| Format::from_path(path));
    let doc = parse(&text, format).map_err(|e| Failure::Validation(e.to_string()))?;
    let matrix = doc.to_pc_matrix(cli.recip_tol)?;
    Ok(Loaded { doc, matrix, format })
}

fn tolerance(args: &IterationArgs) -> Result<Tolerance, Failure> {
    if args.max_iter == 0 {
        return Err(Failure::Usage("--max-iter must be at least 1".into()));
    }
    Ok(Tolerance::default().with_consistency_eps(args.tol)?)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate(input) => {
            let l = load(cli, &input.file)?;
            writeln!(out, "valid {n}x{n} pairwise comparison matrix", n = l.matrix.n())?;
        }
        Command::Weights(input) => {
            let l = load(cli, &input.file)?;
            let labels = l.doc.labels_or_default();
            let w = geometric_mean_weights(&l.matrix);
            let ranking = rank_entities(&w, &labels)?;
            for name in &ranking {
                let idx = labels.iter().position(|x| x == name).expect("ranked label exists");
                writeln!(out, "{name} {:.2}", w.values()[idx])?;
            }
        }
        Command::Inconsistency(input) => {
            let l = load(cli, &input.file)?;
            writeln!(out, "inconsistency {:.6}", l.matrix.inconsistency())?;
            if l.matrix.n() >= 3 {
                let (t, v) = l.matrix.worst_triad()?;
                writeln!(out, "worst triad ({}, {}, {}) {v:.6}", t.i + 1, t.j + 1, t.k + 1)?;
            }
        }
        Command::Decompose(input) => {
            let l = load(cli, &input.file)?;
            let d = decompose(&l.matrix)?;
            writeln!(out, "k = {:.6}", d.ortho.k())?;
            writeln!(out, "Y = {:.6}", d.consistent.y())?;
            writeln!(out, "Z = {:.6}", d.consistent.z())?;
            writeln!(out, "A_H (orthogonal component):")?;
            write!(out, "{}", d.ortho.matrix())?;
            writeln!(out, "A_L (consistent approximation):")?;
            write!(out, "{}", d.consistent.matrix())?;
        }
        Command::Approximate(input) => {
            let l = load(cli, &input.file)?;
            let s = approximate_once(&l.matrix)?;
            let doc = MatrixDocument::from_pc_matrix(&s, l.doc.labels.clone());
            write!(out, "{}", serialize(&doc, l.format))?;
        }
        Command::Iterate { input, iteration } => {
            let l = load(cli, &input.file)?;
            let tol = tolerance(iteration)?;
            let trace = iterate_to_consistency(&l.matrix, &tol, iteration.max_iter)?;
            writeln!(out, "step inconsistency max_change")?;
            for s in &trace.steps {
                writeln!(out, "{} {:.6e} {:.6e}", s.iteration, s.inconsistency, s.max_change)?;
            }
            writeln!(out, "converged {}", trace.converged)?;
            let doc = MatrixDocument::from_pc_matrix(&trace.final_matrix, l.doc.labels.clone());
            write!(out, "{}", serialize(&doc, l.format))?;
            if !trace.converged {
                return Err(Failure::Numeric(format!(
                    "no convergence within {} iterations",
                    iteration.max_iter
                )));
            }
        }
        Command::Report { input, iteration } => {
            let l = load(cli, &input.file)?;
            let tol = tolerance(iteration)?;
            let report = build_report(&l.matrix, l.doc.labels_or_default(), &tol, iteration.max_iter)?;
            let json = serde_json::to_string_pretty(&report).expect("reports always serialize");
            writeln!(out, "{json}")?;
        }
    }
    Ok(())
}
