//! Command-line interface.
//!
//! Exit codes: 0 ok, 1 i/o, 2 usage or configuration, 3 parse or validation,
//! 4 resource limit, 5 numerical or domain failure.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{
    analyze, fit_power_law, near_zero_fraction, orbital_marginals, values_csv, AnalysisOptions, PowerLawFit,
    TOOL_VERSION,
};
use crate::error::{Error, Result, StageExt};
use crate::fock::{full_spectrum, SectorBasis};
use crate::haar::{eigenstate_error_distribution, haar_error_distribution, Ensemble, HaarReport};
use crate::hamiltonian::{
    build_trotter_sequence, parse_fcidump, read_manifest, FixtureEntry, MolecularSystem, OrbitalBasis, OrderingStrategy, SCHEMA_VERSION,
};
use crate::stateprep::{prep_cost, StatePrepCost, DEFAULT_SUPPORT_THRESHOLD};
use crate::trotter::{build_error_operator, ErrorOperator};

#[derive(Debug, Parser)]
#[command(name = "trotterr", version, about = "Trotter error analysis for molecular Hamiltonians")]
pub struct Cli {
    /// Worker threads (falls back to TROTTERR_THREADS, then all cores).
    #[arg(long, global = true, env = "TROTTERR_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state error, error-operator norm, ansatz errors and Trotter number.
    Analyze(AnalyzeArgs),
    /// Eigenvalues of the error operator, one per line.
    Spectrum(SpectrumArgs),
    /// Distribution of the error over Haar-random states.
    Haar(HaarArgs),
    /// Orbital-pair marginals of the error-operator coefficients.
    Marginals(MarginalsArgs),
    /// Power-law fit of x,y data.
    Fit(FitArgs),
    /// Clifford+T cost of preparing the CISD ground state.
    PrepCost(PrepCostArgs),
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub fcidump: PathBuf,
    #[arg(long)]
    pub basis_kind: Option<OrbitalBasis>,
    /// Molecule label recorded in reports.
    #[arg(long)]
    pub label: Option<String>,
    /// Basis-set name recorded in reports, e.g. STO-6G.
    #[arg(long)]
    pub basis_label: Option<String>,
    #[arg(long)]
    pub z_max: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ErrorArgs {
    #[arg(long, default_value = "diagonal-first")]
    pub ordering: OrderingStrategy,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub error: ErrorArgs,
    /// Comma-separated CI excitation levels.
    #[arg(long, value_delimiter = ',', default_value = "0,2")]
    pub ci_levels: Vec<usize>,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub target_delta: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub time: f64,
    /// Spectral norm over the full Fock space instead of the electron sector.
    #[arg(long)]
    pub full_fock: bool,
    /// Also report the CISD state-preparation cost at this error.
    #[arg(long, allow_negative_numbers = true)]
    pub prep_delta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    /// Restrict to the electron-number sector (default).
    #[arg(long, conflicts_with = "full_fock")]
    pub sector: bool,
    #[arg(long)]
    pub full_fock: bool,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub error: ErrorArgs,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HaarArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub error: ErrorArgs,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "complex")]
    pub ensemble: EnsembleArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum EnsembleArg {
    Real,
    Complex,
}

#[derive(Debug, Args)]
pub struct MarginalsArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub error: ErrorArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with x,y columns; `#` lines and a non-numeric header are skipped.
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrepCostArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1e-3, allow_negative_numbers = true)]
    pub delta: f64,
    /// Count D from the CISD configuration formula instead of solving for amplitudes.
    #[arg(long)]
    pub formula: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct LoadedSystem {
    sys: MolecularSystem,
    sha256: String,
}

fn load(args: &SystemArgs) -> Result<LoadedSystem> {
    let bytes = std::fs::read(&args.fcidump).map_err(|e| Error::io(&args.fcidump, e))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Error::Parse { line: 0, message: "file is not UTF-8".into() })?;
    let mut sys = parse_fcidump(&text).stage("fcidump")?;
    if let Some(entry) = manifest_entry(&args.fcidump)? {
        sys.metadata = entry.metadata();
    } else {
        sys.metadata.label = args.fcidump.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    }
    let meta = &mut sys.metadata;
    if let Some(l) = &args.label {
        meta.label = l.clone();
    }
    if let Some(b) = &args.basis_label {
        meta.basis = b.clone();
    }
    if let Some(k) = args.basis_kind {
        meta.basis_kind = k;
    }
    if args.z_max.is_some() {
        meta.z_max = args.z_max;
    }
    Ok(LoadedSystem {
        sys,
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Entry for `path` in a `manifest.json` next to it, if any.
fn manifest_entry(path: &Path) -> Result<Option<FixtureEntry>> {
    let manifest = path.with_file_name("manifest.json");
    if !manifest.is_file() {
        return Ok(None);
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
    let entries = read_manifest(&manifest).stage("manifest")?;
    Ok(entries.into_iter().find(|e| Some(&e.file) == name.as_ref()))
}

fn error_operator(sys: &MolecularSystem, args: &ErrorArgs) -> Result<ErrorOperator> {
    let seq = build_trotter_sequence(sys, args.ordering);
    build_error_operator(&seq, args.dt).stage("error operator")
}

fn space(sys: &MolecularSystem, full_fock: bool) -> Result<Arc<SectorBasis>> {
    let basis = if full_fock {
        SectorBasis::full(sys.n_spin_orbitals)
    } else {
        SectorBasis::sector(sys.n_spin_orbitals, sys.n_electrons)
    };
    Ok(Arc::new(basis.stage("basis")?))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Common provenance block of JSON outputs.
#[derive(Debug, Serialize)]
struct Envelope<T: Serialize> {
    schema_version: u32,
    tool_version: &'static str,
    molecule: String,
    fixture_sha256: String,
    #[serde(flatten)]
    body: T,
}

fn envelope<T: Serialize>(loaded: &LoadedSystem, body: T) -> Envelope<T> {
    Envelope {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        molecule: loaded.sys.metadata.label.clone(),
        fixture_sha256: loaded.sha256.clone(),
        body,
    }
}

#[derive(Debug, Serialize)]
struct HaarOutput {
    ordering: &'static str,
    delta_t: f64,
    space: String,
    seeds: Vec<u64>,
    haar: HaarReport,
    /// Std-dev of ⟨ψ_i|V|ψ_i⟩ over eigenstates of H in the same space.
    eigenstate_std: f64,
}

#[derive(Debug, Serialize)]
struct PrepOutput {
    n_electrons: usize,
    #[serde(flatten)]
    cost: StatePrepCost,
}

fn run_analyze(a: &AnalyzeArgs) -> Result<()> {
    let loaded = load(&a.system)?;
    let opts = AnalysisOptions {
        ordering: a.error.ordering,
        delta_t: a.error.dt,
        ci_levels: a.ci_levels.clone(),
        target_delta: a.target_delta,
        time: a.time,
        full_fock: a.full_fock,
        prep_delta: a.prep_delta,
    };
    let mut report = analyze(&loaded.sys, &opts)?;
    report.fixture_sha256 = Some(loaded.sha256);
    write_output(a.out.as_deref(), &report.to_json()?)
}

fn run_spectrum(a: &SpectrumArgs) -> Result<()> {
    let loaded = load(&a.system)?;
    let v = error_operator(&loaded.sys, &a.error)?;
    let basis = space(&loaded.sys, a.space.full_fock)?;
    let values = full_spectrum(&v.op, &basis).stage("spectrum")?;
    let header = format!(
        "eigenvalue (hartree), ascending; {} {} ordering={} dt={} space={} near_zero_fraction={:.4}",
        loaded.sys.metadata.label,
        loaded.sys.metadata.basis_kind.label(),
        a.error.ordering.label(),
        a.error.dt,
        basis.label(),
        near_zero_fraction(&values, 0.01)
    );
    write_output(a.out.as_deref(), &values_csv(&header, &values))
}

fn run_haar(a: &HaarArgs) -> Result<()> {
    let loaded = load(&a.system)?;
    let seq = build_trotter_sequence(&loaded.sys, a.error.ordering);
    let v = build_error_operator(&seq, a.error.dt).stage("error operator")?;
    let basis = space(&loaded.sys, a.space.full_fock)?;
    let values = full_spectrum(&v.op, &basis).stage("spectrum")?;
    let ensemble = match a.ensemble {
        EnsembleArg::Real => Ensemble::Real,
        EnsembleArg::Complex => Ensemble::Complex,
    };
    let haar = haar_error_distribution(&values, a.samples, a.seed, ensemble).stage("haar sampling")?;
    let eig = eigenstate_error_distribution(&v.op, &seq.total(), basis.clone()).stage("eigenstates")?;
    let out = HaarOutput {
        ordering: a.error.ordering.label(),
        delta_t: a.error.dt,
        space: basis.label(),
        seeds: vec![a.seed],
        haar,
        eigenstate_std: eig.std_dev,
    };
    write_output(a.out.as_deref(), &json(&envelope(&loaded, out))?)
}

fn run_marginals(a: &MarginalsArgs) -> Result<()> {
    let loaded = load(&a.system)?;
    let v = error_operator(&loaded.sys, &a.error)?;
    let m = orbital_marginals(&v.op);
    if let Some(d) = m.dominant_orbital() {
        eprintln!("dominant orbital: {d}");
    }
    write_output(a.out.as_deref(), &m.to_csv())
}

pub fn read_points(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parse = |s: &str| s.parse::<f64>();
        match (fields.as_slice(), points.is_empty()) {
            ([x, y, ..], _) if parse(x).is_ok() && parse(y).is_ok() => {
                points.push((parse(x).unwrap(), parse(y).unwrap()))
            }
            // column header
            ([_, _, ..], true) => {}
            _ => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected two numeric columns, got {line:?}"),
                })
            }
        }
    }
    Ok(points)
}

fn run_fit(a: &FitArgs) -> Result<()> {
    let points = read_points(&a.csv)?;
    let fit: PowerLawFit = fit_power_law(&points).stage("fit")?;
    #[derive(Serialize)]
    struct FitOutput {
        schema_version: u32,
        tool_version: &'static str,
        n_points: usize,
        #[serde(flatten)]
        fit: PowerLawFit,
    }
    let out = FitOutput {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        n_points: points.len(),
        fit,
    };
    write_output(a.out.as_deref(), &json(&out)?)
}

fn run_prep_cost(a: &PrepCostArgs) -> Result<()> {
    let loaded = load(&a.system)?;
    let sys = &loaded.sys;
    let vector = if a.formula {
        None
    } else {
        let level = 2.min(sys.n_spin_orbitals - sys.n_electrons);
        let trunc = crate::ci::CiTruncation::new(sys, level)?;
        Some(crate::ci::ci_ground_state(sys, &trunc).stage("ci ground state")?.vector)
    };
    let cost = prep_cost(sys.n_spin_orbitals, sys.n_electrons, a.delta, vector.as_ref(), DEFAULT_SUPPORT_THRESHOLD)
        .stage("state preparation")?;
    let out = PrepOutput {
        n_electrons: sys.n_electrons,
        cost,
    };
    write_output(a.out.as_deref(), &json(&envelope(&loaded, out))?)
}

fn configure_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        // a pool may already exist when called from tests; the cap is advisory then
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<()> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Spectrum(a) => run_spectrum(a),
        Command::Haar(a) => run_haar(a),
        Command::Marginals(a) => run_marginals(a),
        Command::Fit(a) => run_fit(a),
        Command::PrepCost(a) => run_prep_cost(a),
    }
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn main_exit_code() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("trotterr: {e}");
            e.exit_code()
        }
    }
}
