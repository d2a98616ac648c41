use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qwalk_core::bounds::{certify, leading_pair, min_potential};
use qwalk_core::graph::{partition_vertices, validate_involution, Graph, Violation};
use qwalk_core::hamiltonian::{assemble_hamiltonian, block_reduce, Sector};
use qwalk_core::matrix::Matrix;
use qwalk_core::oracle::{eigenvalues_bisection, enumerate_involutions, matexp_i};
use qwalk_core::spectral::{eig_symmetric, tagged_spectrum, transfer_probability, Spectrum};
use qwalk_core::walks::{default_truncation, gap_certificate_check, well_system_residual, GapCertificate, WellResidual};
use qwalk_core::well::DoubleWell;
use qwalk_core::Complex;
use serde::Serialize;

use crate::error::{CliError, EXIT_INVALID, EXIT_OK, EXIT_USAGE};
use crate::io::{load_graph, LoadedGraph};
use crate::sweep::{q_values, sweep, threads_from_env, write_csv};

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Quantum walks and state-transfer bounds on graphs with an involution")]
pub struct Cli {
    /// Pretty-print JSON output
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph file and its involution
    Validate { path: PathBuf },
    /// Eigenvalues, sectors and optionally eigenvectors of H
    Spectrum(SpectrumArgs),
    /// Transfer probability from the well to its partner
    Transfer(TransferArgs),
    /// Every certified bound next to the value it bounds
    Bounds {
        path: PathBuf,
        #[arg(long)]
        q: f64,
    },
    /// Potential sufficient for fidelity 1 - epsilon
    #[command(name = "min-q")]
    MinQ(MinQArgs),
    /// Evaluate the transfer and its bounds over a range of potentials (CSV)
    Sweep(SweepArgs),
    /// List every involution of a graph with at most 12 vertices
    #[command(name = "find-involution")]
    FindInvolution { path: PathBuf },
    /// Walk-series residuals of the well equations and the gap certificate
    Residual {
        path: PathBuf,
        #[arg(long)]
        q: f64,
        /// Maximum walk length; chosen from the tail bound when omitted
        #[arg(long)]
        length: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    path: PathBuf,
    /// Replace the potentials by q on the well pair and 0 elsewhere
    #[arg(long)]
    q: Option<f64>,
    /// Include eigenvectors (one array per eigenvalue)
    #[arg(long)]
    vectors: bool,
    /// Include H and the reduced blocks
    #[arg(long)]
    blocks: bool,
    #[arg(long, hide = true)]
    oracle: bool,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    path: PathBuf,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, allow_negative_numbers = true, conflicts_with = "optimal", required_unless_present = "optimal")]
    t: Option<f64>,
    /// Use t* = pi / (lambda1 - lambda2)
    #[arg(long)]
    optimal: bool,
    /// Start vertex (defaults to the well)
    #[arg(long, conflicts_with = "optimal")]
    from: Option<usize>,
    /// Target vertex (defaults to the image of the well)
    #[arg(long, conflicts_with = "optimal")]
    to: Option<usize>,
    #[arg(long, hide = true)]
    oracle: bool,
}

#[derive(Debug, Args)]
pub struct MinQArgs {
    /// Read the maximum degree from this graph file
    #[arg(conflicts_with = "m", required_unless_present = "m")]
    path: Option<PathBuf>,
    /// Maximum degree
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    epsilon: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    path: PathBuf,
    #[arg(long = "q-min")]
    q_min: f64,
    #[arg(long = "q-max")]
    q_max: f64,
    /// Number of potentials, endpoints included
    #[arg(long)]
    steps: usize,
    /// Output file (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("qwalk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn emit<T: Serialize>(value: &T, pretty: bool) -> Result<(), CliError> {
    let text = if pretty { serde_json::to_string_pretty(value)? } else { serde_json::to_string(value)? };
    let mut out = io::stdout().lock();
    writeln!(out, "{text}")?;
    Ok(())
}

/// Runs a parsed command and returns the exit code for outcomes that are not errors.
pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let pretty = cli.pretty;
    match &cli.command {
        Command::Validate { path } => validate(path, pretty),
        Command::Spectrum(args) => spectrum(args, pretty).map(|_| EXIT_OK),
        Command::Transfer(args) => transfer(args, pretty).map(|_| EXIT_OK),
        Command::Bounds { path, q } => {
            let loaded = load_graph(path)?;
            let report = certify(&loaded.graph, loaded.require_involution()?, loaded.require_well()?, *q)?;
            emit(&report, pretty).map(|_| EXIT_OK)
        }
        Command::MinQ(args) => min_q(args, pretty).map(|_| EXIT_OK),
        Command::Sweep(args) => run_sweep(args).map(|_| EXIT_OK),
        Command::FindInvolution { path } => {
            let loaded = load_graph(path)?;
            emit(&enumerate_involutions(&loaded.graph)?, pretty).map(|_| EXIT_OK)
        }
        Command::Residual { path, q, length } => residual(path, *q, *length, pretty).map(|_| EXIT_OK),
    }
}

#[derive(Serialize)]
struct Verdict {
    ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    violations: Vec<Violation>,
}

fn validate(path: &PathBuf, pretty: bool) -> Result<u8, CliError> {
    let fail = |error: String, violations: Vec<Violation>| -> Result<u8, CliError> {
        emit(&Verdict { ok: false, error: Some(error), violations }, pretty)?;
        Ok(EXIT_INVALID)
    };
    let loaded = match load_graph(path) {
        Ok(l) => l,
        Err(e @ (CliError::Invalid(_) | CliError::Core(_))) => return fail(e.to_string(), Vec::new()),
        Err(e) => return Err(e),
    };
    if let Some(inv) = &loaded.involution {
        let verdict = validate_involution(&loaded.graph, inv)?;
        if !verdict.is_ok() {
            return fail("involution conditions violated".into(), verdict.violations);
        }
        if let Some(well) = loaded.well {
            if let Err(e) = partition_vertices(&loaded.graph, inv, well) {
                return fail(e.to_string(), Vec::new());
            }
        }
    }
    emit(&Verdict { ok: true, error: None, violations: Vec::new() }, pretty)?;
    Ok(EXIT_OK)
}

/// The graph with potentials replaced when `q` is given.
fn with_q(loaded: &LoadedGraph, q: Option<f64>) -> Result<Graph, CliError> {
    match q {
        None => Ok(loaded.graph.clone()),
        Some(q) => {
            let well = loaded.require_well()?;
            let dw = DoubleWell::new(&loaded.graph, loaded.require_involution()?, well, q)?;
            Ok(dw.graph)
        }
    }
}

#[derive(Serialize)]
struct Blocks {
    hamiltonian: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plus_asym: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    plus_sym: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    minus: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct SpectrumReport {
    values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sectors: Option<Vec<Sector>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocks: Option<Blocks>,
}

fn spectrum(args: &SpectrumArgs, pretty: bool) -> Result<(), CliError> {
    let loaded = load_graph(&args.path)?;
    let graph = with_q(&loaded, args.q)?;
    let h = assemble_hamiltonian(&graph);
    // tag by sector whenever the involution and well allow a reduction
    let reduction = match (&loaded.involution, loaded.well) {
        (Some(inv), Some(well)) => match partition_vertices(&graph, inv, well) {
            Ok(part) => Some(block_reduce(&h, &part)?),
            Err(e) if args.q.is_some() => return Err(e.into()),
            Err(_) => None,
        },
        _ => None,
    };
    let spec: Spectrum = match &reduction {
        Some(red) => tagged_spectrum(red)?,
        None => eig_symmetric(h.matrix())?,
    };
    let values = if args.oracle { eigenvalues_bisection(h.matrix())? } else { spec.values().to_vec() };
    let report = SpectrumReport {
        values,
        sectors: spec.sectors().map(|s| s.to_vec()),
        vectors: args.vectors.then(|| (0..spec.len()).map(|j| spec.vector(j)).collect()),
        blocks: args.blocks.then(|| Blocks {
            hamiltonian: h.matrix().to_rows(),
            plus_asym: reduction.as_ref().map(|r| r.plus_asym.to_rows()),
            plus_sym: reduction.as_ref().map(|r| r.plus_sym.to_rows()),
            minus: reduction.as_ref().map(|r| r.minus.to_rows()),
        }),
    };
    emit(&report, pretty)
}

#[derive(Debug, Serialize)]
struct TransferReport {
    t: f64,
    p: f64,
    amplitude_re: f64,
    amplitude_im: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    phase_resolved: Option<bool>,
}

fn oracle_amplitude(h: &Matrix, u: usize, v: usize, t: f64) -> Complex {
    let (re, im) = matexp_i(h, t).entry(v, u);
    Complex::new(re, im)
}

/// `q` from the file when it already holds a double well: equal potential on
/// the well pair and zero elsewhere.
fn file_double_well(loaded: &LoadedGraph) -> Result<DoubleWell, CliError> {
    let (inv, well) = (loaded.require_involution()?, loaded.require_well()?);
    let partner = inv.apply(well);
    let pot = loaded.graph.potentials();
    let q = pot[well];
    let shaped = pot[partner] == q && pot.iter().enumerate().all(|(i, &x)| i == well || i == partner || x == 0.0);
    if !shaped {
        return Err(CliError::Invalid(
            "--optimal needs --q or potentials that are equal on the well pair and zero elsewhere".into(),
        ));
    }
    Ok(DoubleWell::new(&loaded.graph, inv, well, q)?)
}

fn transfer(args: &TransferArgs, pretty: bool) -> Result<(), CliError> {
    if let Some(t) = args.t {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(CliError::Usage(format!("--t must be a finite non-negative time, got {t}")));
        }
    }
    let loaded = load_graph(&args.path)?;
    let report = if args.optimal {
        let dw = match args.q {
            Some(q) => DoubleWell::new(&loaded.graph, loaded.require_involution()?, loaded.require_well()?, q)?,
            None => file_double_well(&loaded)?,
        };
        let lead = leading_pair(&dw)?;
        let o = lead.transfer()?;
        let h = lead.reduction.hamiltonian().matrix();
        let amplitude = if args.oracle {
            oracle_amplitude(h, dw.well(), dw.partner(), o.t)
        } else {
            o.amplitude * Complex::cis(o.t * lead.lambda1())
        };
        let p = if args.oracle { amplitude.norm_sqr() } else { o.probability };
        TransferReport {
            t: o.t,
            p,
            amplitude_re: amplitude.re,
            amplitude_im: amplitude.im,
            phase_resolved: Some(o.phase_resolved),
        }
    } else {
        let t = args.t.expect("clap requires --t without --optimal");
        let graph = with_q(&loaded, args.q)?;
        let u = match args.from {
            Some(u) => u,
            None => loaded.require_well()?,
        };
        let v = match args.to {
            Some(v) => v,
            None => loaded.require_involution()?.apply(loaded.require_well()?),
        };
        if u >= graph.n() || v >= graph.n() {
            return Err(CliError::Usage(format!("vertices {u}, {v} out of range for n = {}", graph.n())));
        }
        let h = assemble_hamiltonian(&graph);
        let amplitude = if args.oracle {
            oracle_amplitude(h.matrix(), u, v, t)
        } else {
            transfer_probability(&eig_symmetric(h.matrix())?, u, v, t)?.amplitude
        };
        TransferReport {
            t,
            p: amplitude.norm_sqr(),
            amplitude_re: amplitude.re,
            amplitude_im: amplitude.im,
            phase_resolved: None,
        }
    };
    emit(&report, pretty)
}

#[derive(Serialize)]
struct MinQReport {
    q_formula: f64,
    q_sufficient_256: f64,
}

fn min_q(args: &MinQArgs, pretty: bool) -> Result<(), CliError> {
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(CliError::Usage(format!("--epsilon must lie in (0, 1), got {}", args.epsilon)));
    }
    let m = match (&args.path, args.m) {
        (_, Some(m)) => m,
        (Some(path), None) => load_graph(path)?.graph.max_degree(),
        (None, None) => return Err(CliError::Usage("give a graph file or --m".into())),
    };
    let mp = min_potential(args.epsilon, m)?;
    emit(&MinQReport { q_formula: mp.q_formula, q_sufficient_256: mp.q_sufficient_256 }, pretty)
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let qs = q_values(args.q_min, args.q_max, args.steps)?;
    let threads = threads_from_env()?;
    let loaded = load_graph(&args.path)?;
    let rows = sweep(&loaded.graph, loaded.require_involution()?, loaded.require_well()?, &qs, threads)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
            write_csv(&rows, BufWriter::new(file))
        }
        None => write_csv(&rows, io::stdout().lock()),
    }
}

#[derive(Serialize)]
struct ResidualReport {
    length: usize,
    lambda1: WellResidual,
    lambda2: WellResidual,
    certificate: GapCertificate,
}

fn residual(path: &PathBuf, q: f64, length: Option<usize>, pretty: bool) -> Result<(), CliError> {
    let loaded = load_graph(path)?;
    let (inv, well) = (loaded.require_involution()?, loaded.require_well()?);
    let dw = DoubleWell::new(&loaded.graph, inv, well, q)?;
    let lead = leading_pair(&dw)?;
    let (l1, l2) = (lead.lambda1(), lead.lambda2());
    let length = match length {
        Some(l) => l,
        None => default_truncation(dw.max_degree, l2)?,
    };
    let report = ResidualReport {
        length,
        lambda1: well_system_residual(&loaded.graph, inv, well, l1, q, length)?,
        lambda2: well_system_residual(&loaded.graph, inv, well, l2, q, length)?,
        certificate: gap_certificate_check(&loaded.graph, inv, well, q, length)?,
    };
    emit(&report, pretty)
}
