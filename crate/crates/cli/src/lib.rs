//! Command implementations behind the `uwe` binary.
//!
//! Each `cmd_*` function takes a validated [`RunConfig`] and returns the text
//! to emit; `main` only parses flags, writes output and maps errors to exit
//! codes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;

use uwe::collective::{
    moment_cycle, moment_via_x, moments_collective, outcome_probabilities, projection_count,
    projector_algebra_defect, spectrum_x, symmetrized_commutator_norm, symmetrized_projection_gap,
    SpectralLevel,
};
use uwe::invariants::{decompose, makhlin, moments_via_invariants, InvariantSet};
use uwe::measurement::{simulate, ShotRecord, WitnessEstimate, DEFAULT_BOOTSTRAP_RESAMPLES};
use uwe::states::{named_state, sample, EnsembleKind, NamedState, RandomEnsembleSpec, Sampler, StateFile};
use uwe::witness::{
    bounds, concurrence, det_partial_transpose, moments_direct, negativity, report, rescaled_witness,
    witness_value, MomentSet, WitnessReport,
};
use uwe::DensityMatrix;

/// Slack on each link of the bound chain checked by `scatter`.
pub const CHAIN_TOL: f64 = 1e-9;
/// Tolerance for the moment and Makhlin identities in `verify`.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Tolerance for the operator identities in `verify`.
pub const OPERATOR_TOL: f64 = 1e-12;
/// Tolerance for invariance under local unitaries in `verify`.
pub const LOCAL_UNITARY_TOL: f64 = 1e-9;

const DEFAULT_SCATTER_SAMPLES: usize = 10_000;
const DEFAULT_VERIFY_SAMPLES: usize = 200;
const DEFAULT_SHOTS: u64 = 100_000;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("invalid state: {0}")]
    Invalid(String),
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error("verification failed: {0}")]
    SuiteFailure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Invalid(_) | CliError::BoundViolation(_) | CliError::SuiteFailure(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Report,
    Scatter,
    Verify,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ensemble {
    /// Hilbert-Schmidt mixed states
    Hs,
    /// Haar-random pure states
    Pure,
}

impl From<Ensemble> for EnsembleKind {
    fn from(e: Ensemble) -> Self {
        match e {
            Ensemble::Hs => EnsembleKind::HilbertSchmidtMixed,
            Ensemble::Pure => EnsembleKind::HaarPure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "uwe", version, about = "Two-qubit entanglement witness from partial-transpose moments")]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Command,
    /// Named state (`singlet`, `phi_plus`, `werner:P`, `product:THETA`,
    /// `pure_schmidt:L1`) or path to a state file
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, value_enum, default_value = "hs")]
    pub ensemble: Ensemble,
    /// Random states for scatter (default 10000) and verify (default 200)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Shots per moment for simulate
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    pub shots: u64,
    /// Base seed; sample i of scatter and verify uses seed + i
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP_RESAMPLES)]
    pub bootstrap: usize,
    /// Relative weights `w2,w3,w4` for dividing the 3 × shots budget over the moments
    #[arg(long, value_delimiter = ',')]
    pub split: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Named(NamedState),
    File(PathBuf),
}

impl StateSource {
    /// An existing path is read as a state file; anything else must be a named state.
    pub fn parse(text: &str) -> CliResult<Self> {
        if Path::new(text).is_file() {
            return Ok(StateSource::File(PathBuf::from(text)));
        }
        match text.parse::<NamedState>() {
            Ok(state) => Ok(StateSource::Named(state)),
            Err(uwe::Error::UnknownState(_)) => Err(CliError::Usage(format!(
                "'{text}' is neither a readable file nor a named state"
            ))),
            Err(e) => Err(CliError::Usage(e.to_string())),
        }
    }

    pub fn label(&self) -> String {
        match self {
            StateSource::Named(s) => s.to_string(),
            StateSource::File(p) => p.display().to_string(),
        }
    }

    pub fn load(&self) -> CliResult<DensityMatrix> {
        match self {
            StateSource::Named(s) => named_state(*s).map_err(|e| CliError::Usage(e.to_string())),
            StateSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
                let file = StateFile::parse(&text).map_err(|e| CliError::Invalid(e.to_string()))?;
                file.to_state().map_err(|e| CliError::Invalid(e.to_string()))
            }
        }
    }

    pub fn analytic_witness(&self) -> Option<f64> {
        match self {
            StateSource::Named(s) => Some(s.analytic_witness()),
            StateSource::File(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub state: Option<StateSource>,
    pub ensemble: Ensemble,
    pub samples: usize,
    pub shots: [u64; 3],
    pub seed: Option<u64>,
    pub bootstrap: usize,
    pub out: Option<PathBuf>,
    /// `None` means the command's default: csv for scatter, text for verify,
    /// json otherwise.
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_args(args: Args) -> CliResult<Self> {
        let needs_state = matches!(args.command, Command::Report | Command::Simulate);
        let state = args.state.as_deref().map(StateSource::parse).transpose()?;
        if needs_state && state.is_none() {
            return Err(CliError::Usage(format!("--state is required for {:?}", args.command).to_lowercase()));
        }
        if matches!(args.command, Command::Scatter | Command::Simulate) && args.seed.is_none() {
            return Err(CliError::Usage("--seed is required for scatter and simulate".into()));
        }
        let samples = args.samples.unwrap_or(match args.command {
            Command::Verify => DEFAULT_VERIFY_SAMPLES,
            _ => DEFAULT_SCATTER_SAMPLES,
        });
        if samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        if args.shots == 0 {
            return Err(CliError::Usage("--shots must be at least 1".into()));
        }
        let shots = split_shots(args.shots, args.split.as_deref())?;
        if args.command != Command::Scatter && args.format == Some(Format::Csv) {
            return Err(CliError::Usage("csv output is only available for scatter".into()));
        }
        Ok(Self {
            command: args.command,
            state,
            ensemble: args.ensemble,
            samples,
            shots,
            seed: args.seed,
            bootstrap: args.bootstrap,
            out: args.out,
            format: args.format,
        })
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn state(&self) -> CliResult<&StateSource> {
        self.state
            .as_ref()
            .ok_or_else(|| CliError::Usage("--state is required".into()))
    }

    /// Random state `index` of the configured ensemble, seeded with `seed + index`.
    fn random_state(&self, index: usize) -> DensityMatrix {
        sample(RandomEnsembleSpec {
            kind: self.ensemble.into(),
            seed: self.seed().wrapping_add(index as u64),
        })
    }
}

/// Shots for `(Π₂, Π₃, Π₄)`. Without weights every moment gets `shots`;
/// with weights the total `3 · shots` is shared proportionally, each moment
/// keeping at least one shot.
pub fn split_shots(shots: u64, weights: Option<&[f64]>) -> CliResult<[u64; 3]> {
    let Some(w) = weights else {
        return Ok([shots; 3]);
    };
    if w.len() != 3 || w.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return Err(CliError::Usage("--split needs three positive weights w2,w3,w4".into()));
    }
    let total = 3 * shots;
    let sum: f64 = w.iter().sum();
    let mut out = [0u64; 3];
    for (o, x) in out.iter_mut().zip(w) {
        *o = ((total as f64 * x / sum).round() as u64).max(1);
    }
    Ok(out)
}

pub fn run(config: &RunConfig) -> CliResult<String> {
    match config.command {
        Command::Report => cmd_report(config),
        Command::Scatter => cmd_scatter(config),
        Command::Verify => cmd_verify(config),
        Command::Simulate => cmd_simulate(config),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
struct RouteMoments {
    direct: MomentSet,
    collective: MomentSet,
    invariants: MomentSet,
}

#[derive(Debug, Serialize)]
struct ReportOutput {
    state: String,
    #[serde(flatten)]
    report: WitnessReport,
    moments: RouteMoments,
    max_route_deviation: f64,
}

pub fn cmd_report(config: &RunConfig) -> CliResult<String> {
    let source = config.state()?;
    let rho = source.load()?;
    let moments = RouteMoments {
        direct: moments_direct(&rho),
        collective: moments_collective(&rho).expect("two to four copies are supported"),
        invariants: moments_via_invariants(&rho),
    };
    let max_route_deviation = moments
        .direct
        .max_deviation(&moments.collective)
        .max(moments.direct.max_deviation(&moments.invariants))
        .max(moments.collective.max_deviation(&moments.invariants));
    Ok(to_json(&ReportOutput {
        state: source.label(),
        report: report(&rho),
        moments,
        max_route_deviation,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterRow {
    pub w: f64,
    pub negativity: f64,
    pub concurrence: f64,
}

impl ScatterRow {
    pub fn of(rho: &DensityMatrix) -> Self {
        Self {
            w: rescaled_witness(witness_value(&moments_direct(rho))),
            negativity: negativity(rho),
            concurrence: concurrence(rho),
        }
    }

    /// Description of the first broken link of `f(w) ≤ N ≤ C ≤ w^{1/4}`.
    pub fn chain_violation(&self) -> Option<String> {
        let b = match bounds(self.w) {
            Ok(b) => b,
            Err(e) => return Some(e.to_string()),
        };
        let (n, c) = (self.negativity, self.concurrence);
        if b.lower - CHAIN_TOL > n {
            Some(format!("f(w) = {} > N = {n}", b.lower))
        } else if n > c + CHAIN_TOL {
            Some(format!("N = {n} > C = {c}"))
        } else if c > b.upper + CHAIN_TOL {
            Some(format!("C = {c} > w^1/4 = {}", b.upper))
        } else {
            None
        }
    }
}

pub const SCATTER_HEADER: &str = "w,negativity,concurrence";

pub fn cmd_scatter(config: &RunConfig) -> CliResult<String> {
    let mut rows = Vec::with_capacity(config.samples);
    for i in 0..config.samples {
        let rho = config.random_state(i);
        let row = ScatterRow::of(&rho);
        if let Some(why) = row.chain_violation() {
            return Err(CliError::BoundViolation(format!(
                "sample {i} (seed {}): {why}; state {:?}",
                config.seed().wrapping_add(i as u64),
                rho.to_state_file()
            )));
        }
        rows.push(row);
    }
    Ok(match config.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut out = String::with_capacity(64 * rows.len());
            out.push_str(SCATTER_HEADER);
            out.push('\n');
            for r in &rows {
                writeln!(out, "{},{},{}", r.w, r.negativity, r.concurrence).unwrap();
            }
            out
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SuiteResult {
    fn new(name: &'static str, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name,
            max_deviation,
            tolerance,
            pass: max_deviation < tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub samples: usize,
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub spectrum_x3: Vec<SpectralLevel>,
    pub spectrum_x4: Vec<SpectralLevel>,
    pub projection_count: usize,
    pub pass: bool,
}

fn invariant_drift(a: &InvariantSet, b: &InvariantSet) -> f64 {
    let pairs = a.nine().into_iter().zip(b.nine()).chain(a.x.into_iter().zip(b.x)).chain(a.y.into_iter().zip(b.y));
    pairs.map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

pub fn verify(config: &RunConfig) -> VerifySummary {
    let (mut routes, mut det, mut appendix, mut makhlin_id, mut local): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut unitaries = Sampler::new(RandomEnsembleSpec {
        kind: EnsembleKind::HaarPure,
        seed: config.seed() ^ 0x5eed_10ca1,
    });
    for i in 0..config.samples {
        let rho = config.random_state(i);
        let direct = moments_direct(&rho);
        det = det.max((witness_value(&direct) - det_partial_transpose(&rho)).abs());
        for n in 2..=4 {
            let mut values = vec![
                direct.get(n).unwrap(),
                moment_cycle(&rho, n).unwrap(),
                outcome_probabilities(&rho, n).unwrap().moment(),
            ];
            if n >= 3 {
                values.push(moment_via_x(&rho, n).unwrap());
            }
            for a in &values {
                for b in &values {
                    routes = routes.max((a - b).abs());
                }
            }
            appendix = appendix
                .max(symmetrized_commutator_norm(&rho, n).unwrap())
                .max(symmetrized_projection_gap(&rho, n).unwrap());
        }
        let inv = makhlin(&decompose(&rho));
        makhlin_id = makhlin_id.max(uwe::invariants::moments_from_invariants(&inv).max_deviation(&direct));
        let u = unitaries.haar_unitary(2).kron(&unitaries.haar_unitary(2));
        let rotated = rho.transformed(&u).expect("unitary conjugation keeps a valid state");
        local = local.max(invariant_drift(&inv, &makhlin(&decompose(&rotated))));
    }
    let algebra = (2..=4).map(|n| projector_algebra_defect(n).unwrap()).fold(0.0, f64::max);
    let spectrum_x3 = spectrum_x(3).unwrap();
    let spectrum_x4 = spectrum_x(4).unwrap();
    let projection_count = projection_count().unwrap();
    let suites = vec![
        SuiteResult::new("moment routes", routes, IDENTITY_TOL),
        SuiteResult::new("witness vs determinant", det, IDENTITY_TOL),
        SuiteResult::new("projector algebra", algebra, OPERATOR_TOL),
        SuiteResult::new("symmetrized state", appendix, OPERATOR_TOL),
        SuiteResult::new("makhlin identity", makhlin_id, IDENTITY_TOL),
        SuiteResult::new("local unitary invariance", local, LOCAL_UNITARY_TOL),
    ];
    let values = |levels: &[SpectralLevel]| levels.iter().map(|l| l.value).collect::<Vec<_>>();
    let pass = suites.iter().all(|s| s.pass)
        && values(&spectrum_x3) == [1.0, 4.0]
        && values(&spectrum_x4) == [0.0, 2.0, 4.0]
        && projection_count == 7;
    VerifySummary {
        samples: config.samples,
        seed: config.seed(),
        suites,
        spectrum_x3,
        spectrum_x4,
        projection_count,
        pass,
    }
}

fn spectrum_line(levels: &[SpectralLevel]) -> String {
    let values: Vec<String> = levels.iter().map(|l| l.value.to_string()).collect();
    format!("{{{}}}", values.join(", "))
}

impl VerifySummary {
    pub fn to_text(&self) -> String {
        let mut out = format!("verify: {} random states, seed {}\n", self.samples, self.seed);
        for s in &self.suites {
            writeln!(
                out,
                "{:<26} max deviation {:.3e}  (tol {:.0e})  {}",
                s.name,
                s.max_deviation,
                s.tolerance,
                if s.pass { "ok" } else { "FAIL" }
            )
            .unwrap();
        }
        writeln!(out, "{:<26} {}", "spectrum X3", spectrum_line(&self.spectrum_x3)).unwrap();
        writeln!(out, "{:<26} {}", "spectrum X4", spectrum_line(&self.spectrum_x4)).unwrap();
        writeln!(out, "{:<26} {}", "projections", self.projection_count).unwrap();
        writeln!(out, "{}", if self.pass { "all suites pass" } else { "FAILED" }).unwrap();
        out
    }
}

/// Text summary (or JSON with `--format json`); fails if any suite is out of tolerance.
pub fn cmd_verify(config: &RunConfig) -> CliResult<String> {
    let summary = verify(config);
    if !summary.pass {
        return Err(CliError::SuiteFailure(summary.to_text()));
    }
    Ok(match config.format {
        Some(Format::Json) => to_json(&summary),
        _ => summary.to_text(),
    })
}

#[derive(Debug, Serialize)]
struct Reference {
    witness: f64,
    moments: MomentSet,
}

#[derive(Debug, Serialize)]
struct SimulateOutput {
    state: String,
    seed: u64,
    estimate: WitnessEstimate,
    records: Vec<ShotRecord>,
    reference: Reference,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic_witness: Option<f64>,
}

pub fn cmd_simulate(config: &RunConfig) -> CliResult<String> {
    let source = config.state()?;
    let rho = source.load()?;
    let seed = config.seed.ok_or_else(|| CliError::Usage("--seed is required for simulate".into()))?;
    let (records, estimate) =
        simulate(&rho, config.shots, seed, config.bootstrap).map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(to_json(&SimulateOutput {
        state: source.label(),
        seed,
        estimate,
        records,
        reference: Reference {
            witness: det_partial_transpose(&rho),
            moments: moments_direct(&rho),
        },
        analytic_witness: source.analytic_witness(),
    }))
}
