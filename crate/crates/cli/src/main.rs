//! Command-line front end: build dual polar instances, emit spectra, frame
//! and Norton reports, export graph tables, and run the verification suite.
//!
//! Exit codes: 0 success, 1 failed verification check, 2 invalid invocation
//! or malformed input, 3 instance over the enumeration budget. All exact
//! rationals are serialized as `p` / `p/q` strings, never floats.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigInt;
use serde::Serialize;

use dualpolar::forms::{make_space, Family, Params};
use dualpolar::frames;
use dualpolar::lattice::{LatticeJson, PolarLattice};
use dualpolar::matrix::rational_string;
use dualpolar::norton;
use dualpolar::qseries;
use dualpolar::scheme::DualPolarGraph;
use dualpolar::spectral::SpectralDecomposition;
use dualpolar::verify;

const DEFAULT_BUDGET: u64 = 1000;
const BUDGET_ENV: &str = "DUALPOLAR_BUDGET";

#[derive(Parser)]
#[command(
    name = "dualpolar",
    version,
    about = "Exact toolkit for dual polar graphs: lattice enumeration, spectra, \
             tight frames, and Norton products over finite formed spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate an instance; emit parameters, lattice levels, and edge list
    Build(BuildArgs),
    /// Eigenvalues, multiplicities, and the full eigenvalue table
    Spectrum(InstanceArgs),
    /// Verify one tight-frame level and report its frame constant
    Frame(FrameArgs),
    /// Verify the Norton product laws on the first eigenspace
    Norton(InstanceArgs),
    /// Run every verification check on one instance or the default matrix
    Verify(VerifyArgs),
    /// Export the graph (DOT) or its tables (CSV)
    Export(ExportArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Family tag: C, B, D, 2D, 2A-odd, or 2A-even
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    /// Witt index (graph diameter)
    #[arg(long)]
    d: Option<usize>,
    /// Base prime power; Hermitian families work over GF(r^2)
    #[arg(long)]
    r: Option<u64>,
    /// Load a lattice JSON written by `build` instead of enumerating
    #[arg(long, value_name = "FILE", conflicts_with_all = ["family", "d", "r"])]
    lattice: Option<PathBuf>,
    /// Maximum number of maximal isotropics to enumerate
    /// (default 1000; the DUALPOLAR_BUDGET variable overrides the default)
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Write the JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FrameArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Frame level (an eigenspace index, 0..=d)
    #[arg(long)]
    j: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Verify the whole default instance matrix
    #[arg(long, conflicts_with_all = ["family", "d", "r", "lattice"])]
    all: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Output format
    #[arg(long, value_enum)]
    format: ExportFormat,
    /// Which table to emit when the format is CSV
    #[arg(long, value_enum, default_value_t = ExportTable::Intersection)]
    table: ExportTable,
    /// Write the export here instead of stdout
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy)]
enum ExportFormat {
    Dot,
    Csv,
}

#[derive(ValueEnum, Clone, Copy)]
enum ExportTable {
    Intersection,
    Eigenvalues,
}

/// A terminal failure: message for stderr plus the process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::ALL
        .iter()
        .copied()
        .find(|f| f.tag().eq_ignore_ascii_case(s))
        .ok_or_else(|| format!("unknown family '{s}' (expected C, B, D, 2D, 2A-odd, 2A-even)"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Build(args) => cmd_build(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Frame(args) => cmd_frame(args),
        Command::Norton(args) => cmd_norton(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Export(args) => cmd_export(args),
    }
}

fn budget(args: &InstanceArgs) -> Result<u64, Failure> {
    if let Some(b) = args.budget {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| fail(2, format!("{BUDGET_ENV} must be an integer, got '{text}'"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn check_budget(params: &Params, budget: u64) -> Result<(), Failure> {
    let coatoms = qseries::coatom_count(params, 0);
    if coatoms > BigInt::from(budget) {
        return Err(fail(
            3,
            format!(
                "{} has {} maximal isotropics, over the budget of {} \
                 (raise it with --budget or {})",
                params.label(),
                coatoms,
                budget,
                BUDGET_ENV
            ),
        ));
    }
    Ok(())
}

/// Builds the lattice from either an explicit (family, d, r) triple or a
/// lattice JSON file; both paths enforce the enumeration budget and the
/// loaded path revalidates every level.
fn resolve_lattice(args: &InstanceArgs) -> Result<PolarLattice, Failure> {
    let budget = budget(args)?;
    if let Some(path) = &args.lattice {
        let text = fs::read_to_string(path)
            .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| fail(2, format!("{} is not JSON: {e}", path.display())))?;
        // Accept either a bare lattice document or the full `build` output.
        let lattice_value = value.get("lattice").cloned().unwrap_or(value);
        let json: LatticeJson = serde_json::from_value(lattice_value)
            .map_err(|e| fail(2, format!("{} is not a lattice document: {e}", path.display())))?;
        check_budget(&json.params, budget)?;
        PolarLattice::from_json(json)
            .map_err(|e| fail(2, format!("lattice document rejected: {e}")))
    } else {
        let (family, d, r) = match (args.family, args.d, args.r) {
            (Some(f), Some(d), Some(r)) => (f, d, r),
            _ => {
                return Err(fail(
                    2,
                    "provide --family, --d, and --r together, or --lattice FILE",
                ))
            }
        };
        let params = Params::new(family, d, r);
        check_budget(&params, budget)?;
        let space = make_space(family, d, r).map_err(|e| fail(2, e.to_string()))?;
        PolarLattice::enumerate(space).map_err(|e| fail(2, e.to_string()))
    }
}

fn graph_of(lattice: &PolarLattice) -> Result<DualPolarGraph, Failure> {
    DualPolarGraph::from_lattice(lattice).map_err(|e| fail(1, e.to_string()))
}

fn decomposition_of(graph: &DualPolarGraph) -> Result<SpectralDecomposition, Failure> {
    SpectralDecomposition::decompose(graph).map_err(|e| fail(1, e.to_string()))
}

#[derive(Serialize)]
struct InstanceMeta {
    label: String,
    family: String,
    d: usize,
    r: u64,
    q: u64,
    e: String,
    num_vertices: usize,
}

fn meta(lattice: &PolarLattice) -> InstanceMeta {
    let params = lattice.params();
    InstanceMeta {
        label: params.label(),
        family: params.family.tag().to_string(),
        d: params.d,
        r: params.r,
        q: params.q(),
        e: params.e_string(),
        num_vertices: lattice.num_vertices(),
    }
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serialization cannot fail")
}

#[derive(Serialize)]
struct BuildOutput {
    #[serde(flatten)]
    meta: InstanceMeta,
    level_sizes: Vec<usize>,
    edges: Vec<(u32, u32)>,
    lattice: LatticeJson,
}

fn cmd_build(args: BuildArgs) -> Result<(), Failure> {
    let lattice = resolve_lattice(&args.instance)?;
    let graph = graph_of(&lattice)?;
    let n = graph.num_vertices();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if graph.dist(i, j) == 1 {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let output = BuildOutput {
        meta: meta(&lattice),
        level_sizes: lattice.levels().iter().map(Vec::len).collect(),
        edges,
        lattice: lattice.to_json(),
    };
    emit(&args.out, &to_pretty(&output))
}

#[derive(Serialize)]
struct SpectrumOutput {
    #[serde(flatten)]
    meta: InstanceMeta,
    mu: Vec<String>,
    multiplicities: Vec<usize>,
    lambda1: String,
    valencies: Vec<String>,
    p: Vec<Vec<String>>,
    u: Vec<Vec<String>>,
}

fn cmd_spectrum(args: InstanceArgs) -> Result<(), Failure> {
    let lattice = resolve_lattice(&args)?;
    let params = lattice.params();
    let graph = graph_of(&lattice)?;
    let decomposition = decomposition_of(&graph)?;
    let table = qseries::eigen_table(&params).map_err(|e| fail(1, e.to_string()))?;
    let lambda1 = frames::frame_constant(&params, 1).map_err(|e| fail(1, e.to_string()))?;
    let output = SpectrumOutput {
        meta: meta(&lattice),
        mu: (0..=params.d)
            .map(|j| decomposition.eigenvalue_int(j).to_string())
            .collect(),
        multiplicities: decomposition.multiplicities().to_vec(),
        lambda1: lambda1.to_string(),
        valencies: table.k.iter().map(BigInt::to_string).collect(),
        p: table
            .p
            .iter()
            .map(|row| row.iter().map(rational_string).collect())
            .collect(),
        u: table
            .u
            .iter()
            .map(|row| row.iter().map(rational_string).collect())
            .collect(),
    };
    emit(&None, &to_pretty(&output))
}

#[derive(Serialize)]
struct FrameOutput {
    #[serde(flatten)]
    meta: InstanceMeta,
    j: usize,
    lambda: String,
    frame_size: usize,
    space_dim: usize,
    reconstruction_samples: usize,
}

fn cmd_frame(args: FrameArgs) -> Result<(), Failure> {
    let lattice = resolve_lattice(&args.instance)?;
    let d = lattice.d();
    if args.j > d {
        return Err(fail(2, format!("--j must be at most d = {d}, got {}", args.j)));
    }
    let graph = graph_of(&lattice)?;
    let decomposition = decomposition_of(&graph)?;
    let report = frames::verify_tight_frame(&lattice, &graph, &decomposition, args.j)
        .map_err(|e| fail(1, e.to_string()))?;
    let output = FrameOutput {
        meta: meta(&lattice),
        j: report.j,
        lambda: report.lambda.to_string(),
        frame_size: report.frame_size,
        space_dim: report.space_dim,
        reconstruction_samples: report.reconstruction_samples,
    };
    emit(&None, &to_pretty(&output))
}

#[derive(Serialize)]
struct NortonOutput {
    #[serde(flatten)]
    meta: InstanceMeta,
    lambda1: String,
    pairs: usize,
    exhaustive: bool,
    diagonal_pairs: usize,
    top_join_pairs: usize,
    rank2_join_pairs: usize,
    three_case_checked: bool,
    three_case_skip_reason: Option<String>,
}

fn cmd_norton(args: InstanceArgs) -> Result<(), Failure> {
    let lattice = resolve_lattice(&args)?;
    let params = lattice.params();
    let graph = graph_of(&lattice)?;
    let decomposition = decomposition_of(&graph)?;
    let report =
        norton::verify_norton(&lattice, &decomposition).map_err(|e| fail(1, e.to_string()))?;
    let lambda1 = frames::frame_constant(&params, 1).map_err(|e| fail(1, e.to_string()))?;
    let output = NortonOutput {
        meta: meta(&lattice),
        lambda1: lambda1.to_string(),
        pairs: report.pairs,
        exhaustive: report.exhaustive,
        diagonal_pairs: report.diagonal_pairs,
        top_join_pairs: report.top_join_pairs,
        rank2_join_pairs: report.rank2_join_pairs,
        three_case_checked: report.three_case_checked,
        three_case_skip_reason: report.three_case_skip_reason,
    };
    emit(&None, &to_pretty(&output))
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let reports = if args.all {
        verify::run_default_matrix().map_err(|e| fail(2, e.to_string()))?
    } else {
        let lattice = resolve_lattice(&args.instance)?;
        vec![verify::verify_lattice(&lattice)]
    };
    if args.all {
        emit(&None, &to_pretty(&reports))?;
    } else {
        emit(&None, &to_pretty(&reports[0]))?;
    }
    let failed: usize = reports.iter().map(|r| r.failures().len()).sum();
    if failed > 0 {
        let instances: Vec<&str> = reports
            .iter()
            .filter(|r| !r.passed)
            .map(|r| r.label.as_str())
            .collect();
        return Err(fail(
            1,
            format!("{failed} check(s) failed on {}", instances.join(", ")),
        ));
    }
    Ok(())
}

fn eigenvalue_csv(params: &Params) -> Result<String, Failure> {
    let table = qseries::eigen_table(params).map_err(|e| fail(1, e.to_string()))?;
    let mut csv = String::new();
    for row in &table.p {
        let cells: Vec<String> = row.iter().map(rational_string).collect();
        writeln!(csv, "{}", cells.join(",")).expect("string writes cannot fail");
    }
    Ok(csv)
}

fn cmd_export(args: ExportArgs) -> Result<(), Failure> {
    let lattice = resolve_lattice(&args.instance)?;
    let graph = graph_of(&lattice)?;
    let content = match (args.format, args.table) {
        (ExportFormat::Dot, _) => graph.to_dot(),
        (ExportFormat::Csv, ExportTable::Intersection) => graph
            .intersection_csv()
            .map_err(|e| fail(1, e.to_string()))?,
        (ExportFormat::Csv, ExportTable::Eigenvalues) => eigenvalue_csv(&lattice.params())?,
    };
    emit(&args.out, &content)
}
