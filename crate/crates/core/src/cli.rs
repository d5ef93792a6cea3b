//! The `qwalk` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::decompose::{decompose, Decomposition, Summand};
use crate::dynamics::{
    empirical_moment, evolve, limit_law, position_distribution, State, DEFAULT_BINS,
};
use crate::error::{Error, Result};
use crate::fixtures;
use crate::intertwine::{classify, IntertwinerSpace};
use crate::realize::is_ct_realizable;
use crate::report::analyze;
use crate::spectral::DEFAULT_GRID;
use crate::walkspec::WalkSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNRESOLVED: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "qwalk",
    version,
    about = "Band analysis, decomposition and simulation of homogeneous quantum walks",
    after_help = "A SPEC is a JSON file or builtin:NAME, e.g. builtin:grover4 or builtin:coined:0.5.\n\
                  Exit codes: 0 success, 1 other failure, 2 invalid input, 3 unresolved band crossing."
)]
pub struct Cli {
    /// Grid points per 2π for band sampling (power of two, at least 64).
    #[arg(long, global = true, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    /// Seed for random built-in states.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bands, decomposition, commutant and realizability in one report.
    Analyze { spec: String },
    /// Constant walks and prime model walks.
    Decompose { spec: String },
    /// Continuous-time realizability verdict.
    Realizable {
        spec: String,
        /// Write one `k,h` CSV per band of the witness into this directory.
        #[arg(long)]
        witness_dir: Option<PathBuf>,
    },
    /// Classify uniform intertwiners between the summands of two walks.
    Intertwine { spec1: String, spec2: String },
    /// Evolve a finitely supported state.
    Simulate {
        spec: String,
        /// Initial state file.
        #[arg(long, conflicts_with = "builtin")]
        state: Option<PathBuf>,
        /// Built-in initial state: e1..en, uniform or random.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Steps at which to record the distribution (default: the last).
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<usize>,
        /// Write the distribution CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Output the limit law predicted from the bands.
        #[arg(long)]
        limit_law: bool,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Malformed(_)
        | Error::Shape { .. }
        | Error::DuplicateShift(_)
        | Error::Empty
        | Error::NotUnitary { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidArgument(_)
        | Error::Json(_) => EXIT_VALIDATION,
        Error::UnresolvedCrossing { .. } => EXIT_UNRESOLVED,
        _ => EXIT_OTHER,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("qwalk: error: {e}");
            exit_code(&e)
        }
    }
}

pub fn load_spec(arg: &str) -> Result<WalkSpec> {
    match arg.strip_prefix("builtin:") {
        Some(name) => fixtures::by_name(name),
        None => WalkSpec::from_json(&read(Path::new(arg))?),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.out {
        Some(p) => write(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze { spec } => cmd_analyze(cli, spec),
        Command::Decompose { spec } => cmd_decompose(cli, spec),
        Command::Realizable { spec, witness_dir } => cmd_realizable(cli, spec, witness_dir.as_deref()),
        Command::Intertwine { spec1, spec2 } => cmd_intertwine(cli, spec1, spec2),
        Command::Simulate {
            spec,
            state,
            builtin,
            steps,
            checkpoints,
            csv,
            limit_law,
            bins,
        } => cmd_simulate(
            cli,
            &SimulateArgs {
                spec,
                state: state.as_deref(),
                builtin: builtin.as_deref(),
                steps: *steps,
                checkpoints,
                csv: csv.as_deref(),
                limit_law: *limit_law,
                bins: *bins,
            },
        ),
    }
}

fn cmd_analyze(cli: &Cli, spec: &str) -> Result<()> {
    let spec = load_spec(spec)?;
    let report = analyze(&spec, cli.grid)?.report();
    match cli.format {
        Format::Json => emit(cli, &report.to_json()),
        Format::Csv => {
            let mut out = String::from("band,degree,multiplicity,winding,min_period,constant\n");
            for (i, b) in report.bands.iter().enumerate() {
                let period = b.min_period.map(|m| m.to_string()).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{i},{},{},{},{period},{}",
                    b.degree, b.multiplicity, b.winding, b.constant
                );
            }
            emit(cli, &out)
        }
    }
}

fn decomposition_csv(dec: &Decomposition) -> String {
    let mut out = String::from("kind,alpha_re,alpha_im,rate_num,rate_den,mult,winding\n");
    for c in &dec.constants {
        let _ = writeln!(out, "constant,{},{},,,{},", c.alpha.re, c.alpha.im, c.multiplicity);
    }
    for p in &dec.primes {
        let _ = writeln!(
            out,
            "prime,,,{},{},{},{}",
            p.rate.numer(),
            p.rate.denom(),
            p.multiplicity,
            p.winding
        );
    }
    out
}

fn cmd_decompose(cli: &Cli, spec: &str) -> Result<()> {
    let dec = decompose(&load_spec(spec)?, cli.grid)?;
    match cli.format {
        Format::Json => emit(cli, &dec.to_json()),
        Format::Csv => emit(cli, &decomposition_csv(&dec)),
    }
}

fn cmd_realizable(cli: &Cli, spec: &str, witness_dir: Option<&Path>) -> Result<()> {
    let v = is_ct_realizable(&load_spec(spec)?, cli.grid)?;
    if let (Some(dir), Some(ws)) = (witness_dir, &v.witness) {
        std::fs::create_dir_all(dir)?;
        for w in ws {
            write(&dir.join(format!("band_{}.csv", w.band_index)), &w.to_csv())?;
        }
    }
    match cli.format {
        Format::Json => emit(cli, &v.to_json()),
        Format::Csv => {
            let mut out = String::from("band,degree,winding\n");
            for ((i, w), d) in v.band_windings.iter().zip(&v.band_degrees) {
                let _ = writeln!(out, "{i},{d},{w}");
            }
            emit(cli, &out)
        }
    }
}

fn summand_label(s: &Summand<'_>) -> String {
    match s {
        Summand::Constant(c) => format!("constant({:.6}{:+.6}i) x{}", c.alpha.re, c.alpha.im, c.multiplicity),
        Summand::Prime(p) => format!("prime(rate {}) x{}", p.rate, p.multiplicity),
    }
}

#[derive(Serialize)]
struct IntertwineDoc {
    summands_1: Vec<String>,
    summands_2: Vec<String>,
    entries: Vec<Vec<IntertwinerSpace>>,
    nonzero: bool,
}

fn cmd_intertwine(cli: &Cli, spec1: &str, spec2: &str) -> Result<()> {
    let d1 = decompose(&load_spec(spec1)?, cli.grid)?;
    let d2 = decompose(&load_spec(spec2)?, cli.grid)?;
    let report = classify(&d1, &d2);
    match cli.format {
        Format::Json => {
            let doc = IntertwineDoc {
                summands_1: d1.summands().iter().map(summand_label).collect(),
                summands_2: d2.summands().iter().map(summand_label).collect(),
                entries: report.entries,
                nonzero: report.nonzero,
            };
            emit(cli, &serde_json::to_string_pretty(&doc)?)
        }
        Format::Csv => {
            let mut out = String::from("i,j,kind,alpha\n");
            for (i, row) in report.entries.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    let (kind, alpha) = match e {
                        IntertwinerSpace::Zero { .. } => ("zero", String::new()),
                        IntertwinerSpace::ModelTranslation { alpha, .. } => ("model_translation", alpha.to_string()),
                        IntertwinerSpace::BandAlgebra { .. } => ("band_algebra", String::new()),
                    };
                    let _ = writeln!(out, "{i},{j},{kind},{alpha}");
                }
            }
            emit(cli, &out)
        }
    }
}

struct SimulateArgs<'a> {
    spec: &'a str,
    state: Option<&'a Path>,
    builtin: Option<&'a str>,
    steps: usize,
    checkpoints: &'a [usize],
    csv: Option<&'a Path>,
    limit_law: bool,
    bins: usize,
}

#[derive(Serialize)]
struct CheckpointDoc {
    t: usize,
    norm: f64,
    moments: Vec<f64>,
}

#[derive(Serialize)]
struct SimulationDoc {
    steps: usize,
    checkpoints: Vec<CheckpointDoc>,
}

const TABLE_MOMENTS: u32 = 4;

fn cmd_simulate(cli: &Cli, args: &SimulateArgs<'_>) -> Result<()> {
    let spec = load_spec(args.spec)?;
    let initial = match (args.state, args.builtin) {
        (Some(p), _) => State::from_json(&read(p)?)?,
        (None, Some(name)) => State::builtin(name, spec.n(), cli.seed)?,
        (None, None) => State::builtin("e1", spec.n(), cli.seed)?,
    };
    if initial.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            found: initial.n(),
        });
    }
    let mut checkpoints: Vec<usize> = if args.checkpoints.is_empty() {
        vec![args.steps]
    } else {
        args.checkpoints.to_vec()
    };
    checkpoints.sort_unstable();
    checkpoints.dedup();
    if checkpoints[0] == 0 || *checkpoints.last().unwrap() > args.steps {
        return Err(Error::InvalidArgument(format!(
            "checkpoints must lie in 1..={}",
            args.steps
        )));
    }

    let mut csv = String::from("t,x,x_over_t,mass\n");
    let mut docs = Vec::new();
    let mut table = String::from("t");
    for m in 1..=TABLE_MOMENTS {
        let _ = write!(table, "\tm{m}");
    }
    table.push('\n');
    let mut state = initial.clone();
    let mut t = 0;
    for &c in &checkpoints {
        state = evolve(&spec, &state, c - t)?;
        t = c;
        let snap = position_distribution(&state, t as u64)?;
        csv.push_str(&snap.to_csv(false));
        let moments: Vec<f64> = (1..=TABLE_MOMENTS).map(|m| empirical_moment(&snap, m)).collect();
        let _ = write!(table, "{t}");
        for m in &moments {
            let _ = write!(table, "\t{m:.6}");
        }
        table.push('\n');
        docs.push(CheckpointDoc {
            t,
            norm: state.norm(),
            moments,
        });
    }

    let law = if args.limit_law {
        let dec = decompose(&spec, cli.grid)?;
        let law = limit_law(&dec, &initial, args.bins)?;
        let _ = write!(table, "limit");
        for m in 1..=TABLE_MOMENTS {
            let _ = write!(table, "\t{:.6}", law.moment(m));
        }
        table.push('\n');
        Some(law)
    } else {
        None
    };
    eprint!("{table}");

    if let Some(p) = args.csv {
        write(p, &csv)?;
    }
    match (cli.format, law) {
        (Format::Csv, _) => emit(cli, &csv),
        (Format::Json, Some(law)) => emit(cli, &law.to_json()),
        (Format::Json, None) => emit(
            cli,
            &serde_json::to_string_pretty(&SimulationDoc {
                steps: args.steps,
                checkpoints: docs,
            })?,
        ),
    }
}
