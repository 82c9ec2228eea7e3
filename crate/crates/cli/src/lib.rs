//! Command-line front end. [`run`] parses arguments, writes data to `out`
//! and diagnostics to `err`, and returns the process exit code.

use std::ffi::OsString;
use std::io::{self, Write};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use symext::bellstate::{AlphaCoords, BellProbs};
use symext::distill::{bstep_parity, d_c, rounds_to_break, run_bsteps, ExtReal, ParityCoords};
use symext::matrix::MatrixRows;
use symext::output::{g17, to_json};
use symext::qkd::{
    classify_region, region_scan, threshold_search, Region, ScanGrid, Scheme, SchemeState,
    ThresholdSearch, CSV_HEADER, FIBER_SAMPLES,
};
use symext::sampling;
use symext::sdp::{
    check_extendible_with, solve_simplified_dual_with, solve_simplified_primal_with,
    BarrierOptions, NumericMethod, NumericOptions, SdpProblem, SdpStatus, SdpVerdict, DEFAULT_TOL,
    DYKSTRA_MAX_ITER,
};
use symext::symext::{
    check_extension, extension_certificate, has_symext, lift_extension, symext_margin,
    CertificateRecord, ExtensionCheck,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;

/// States with an analytic margin below this are not counted by the
/// `verify-sdp` self-check.
const SELF_CHECK_BAND: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Core(#[from] symext::Error),
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("{0}")]
    Failure(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_PARSE,
            CliError::Core(symext::Error::NonConvergence(_)) | CliError::Undecided(_) => {
                EXIT_NONCONVERGENCE
            }
            _ => EXIT_FAILURE,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "symext",
    version,
    about = "Symmetric extendibility of Bell-diagonal states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,
    /// Seed for randomized self-checks.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    InteriorPoint,
    Dykstra,
}

impl From<MethodArg> for NumericMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::InteriorPoint => NumericMethod::InteriorPoint,
            MethodArg::Dykstra => NumericMethod::Dykstra,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coordinates, D_C, separability, extendibility and certificate summary.
    Analyze(StateArgs),
    /// B-step trace as JSON lines.
    Distill {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 20)]
        max_rounds: u32,
    },
    /// Largest QBER with D_C > 0.
    Threshold {
        /// six-state or bb84
        #[arg(long, value_parser = parse_scheme)]
        scheme: Scheme,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Region labels over the projected (alpha1, alpha2) plane.
    RegionScan {
        /// Grid points per axis.
        #[arg(long, default_value_t = 256)]
        resolution: usize,
        /// Cover alpha2 in [-sqrt2, sqrt2] instead of [0, sqrt2].
        #[arg(long)]
        both_signs: bool,
        #[arg(long, default_value_t = FIBER_SAMPLES)]
        fiber_samples: usize,
    },
    /// Analytic, reduced SDP and full SDP verdicts side by side.
    VerifySdp {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::InteriorPoint)]
        method: MethodArg,
        /// Iteration cap for the Dykstra method.
        #[arg(long, default_value_t = DYKSTRA_MAX_ITER)]
        max_iter: usize,
        /// Also compare the oracles on this many random states.
        #[arg(long, default_value_t = 0)]
        self_check: usize,
    },
    /// Certificate Z, dual witness and verification of the lifted extension.
    Certificate {
        #[command(flatten)]
        state: StateArgs,
        /// Include the full 8x8 extension.
        #[arg(long)]
        full: bool,
    },
}

/// Exactly one of `--p`, `--alpha`, or `--scheme` with `--q`.
#[derive(Debug, Clone, Args)]
pub struct StateArgs {
    /// Bell probabilities p_I,p_x,p_y,p_z.
    #[arg(long, value_parser = parse_list::<4>, allow_hyphen_values = true)]
    pub p: Option<[f64; 4]>,
    /// Coordinates alpha1,alpha2,alpha3.
    #[arg(long, value_parser = parse_list::<3>, allow_hyphen_values = true)]
    pub alpha: Option<[f64; 3]>,
    /// Worst-case state of a protocol family: six-state or bb84
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    /// QBER for --scheme.
    #[arg(long)]
    pub q: Option<f64>,
    /// BB84 family parameter in [0, q/2].
    #[arg(long)]
    pub t: Option<f64>,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    s.parse().map_err(|e: symext::Error| e.to_string())
}

/// Parses `N` comma-separated reals, naming the offending entry on failure.
pub fn parse_list<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != N {
        return Err(format!(
            "expected {N} comma-separated numbers, found {}",
            parts.len()
        ));
    }
    let mut out = [0.0; N];
    for (i, part) in parts.iter().enumerate() {
        out[i] = part
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("entry {} ('{}') is not a finite number", i + 1, part.trim()))?;
    }
    Ok(out)
}

impl StateArgs {
    pub fn resolve(&self) -> CliResult<BellProbs<f64>> {
        let given = [
            self.p.is_some(),
            self.alpha.is_some(),
            self.scheme.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::Input(
                "give exactly one of --p, --alpha, or --scheme with --q".into(),
            ));
        }
        if self.scheme.is_none() && (self.q.is_some() || self.t.is_some()) {
            return Err(CliError::Input("--q and --t require --scheme".into()));
        }
        let input = |e: symext::Error| CliError::Input(e.to_string());
        if let Some(p) = self.p {
            return BellProbs::new(p).map_err(input);
        }
        if let Some([a1, a2, a3]) = self.alpha {
            return AlphaCoords::new(a1, a2, a3).to_probs().map_err(input);
        }
        let scheme = self.scheme.expect("checked above");
        let q = self
            .q
            .ok_or_else(|| CliError::Input("--scheme needs --q".into()))?;
        SchemeState::new(scheme, q, self.t.unwrap_or(0.0))
            .and_then(|s| s.probs())
            .map_err(input)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    #[serde(flatten)]
    pub certificate: CertificateRecord,
    pub lift_passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub p: [f64; 4],
    pub alpha: [f64; 3],
    pub qber: [f64; 3],
    /// `null` where D_C is 0/0.
    pub d_c: Option<ExtReal<f64>>,
    pub separable: bool,
    pub extendible: bool,
    pub margin: f64,
    pub region: Region,
    pub rounds_to_break: Option<u32>,
    pub certificate: Option<CertificateSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub status: SdpStatus,
    pub extendible: Option<bool>,
    #[serde(with = "nan_as_null")]
    pub margin: f64,
    #[serde(with = "nan_as_null")]
    pub objective: f64,
    #[serde(with = "nan_as_null")]
    pub gap: f64,
    pub iterations: usize,
}

/// Undecided solver runs carry NaN fields; JSON has no NaN, so they travel as null.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

impl From<&SdpVerdict<f64>> for VerdictSummary {
    fn from(v: &SdpVerdict<f64>) -> Self {
        Self {
            status: v.status,
            extendible: v.decision(),
            margin: v.margin,
            objective: v.objective,
            gap: v.gap,
            iterations: v.iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSummary {
    pub extendible: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyStage {
    /// B-steps applied to the input state.
    pub rounds: u32,
    pub p: [f64; 4],
    pub analytic: AnalyticSummary,
    pub simplified_primal: VerdictSummary,
    pub simplified_dual: VerdictSummary,
    pub full: VerdictSummary,
    /// All decided numerical verdicts agree with the analytic one.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfCheck {
    pub seed: u64,
    pub samples: usize,
    pub compared: usize,
    pub disagreements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// The input state, then (when D_C > 0) the state after the B-steps
    /// that provably break its extension.
    pub stages: Vec<VerifyStage>,
    pub consistent: bool,
    pub self_check: Option<SelfCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub p: [f64; 4],
    pub alpha: [f64; 3],
    #[serde(flatten)]
    pub certificate: CertificateRecord,
    pub min_eigenvalue: f64,
    pub constraint_residual: f64,
    pub lift: ExtensionCheck,
    pub passes: bool,
    pub extension: Option<MatrixRows>,
}

/// Parses `args` (including the program name) and executes the command.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    writeln!(out, "{}", to_json(value)?)?;
    Ok(())
}

fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Failure(e.to_string()))?;
    out.write_all(&bytes)?;
    Ok(())
}

fn f(x: f64) -> String {
    g17(x)
}

fn ext(d: Option<ExtReal<f64>>) -> String {
    match d {
        None => "nan".into(),
        Some(ExtReal::Finite(x)) => g17(x),
        Some(other) => other.to_string(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn dc_or_undefined(p: &BellProbs<f64>) -> CliResult<Option<ExtReal<f64>>> {
    match d_c(p) {
        Ok(d) => Ok(Some(d)),
        Err(symext::Error::UndefinedDc) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Analyze(state) => analyze(&state.resolve()?, cli.output, out),
        Command::Distill { state, max_rounds } => {
            distill(&state.resolve()?, *max_rounds, cli.output, out)
        }
        Command::Threshold { scheme, tol } => {
            let s = threshold_search::<f64>(*scheme, *tol)?;
            match cli.output {
                Output::Json => write_json(out, &s),
                Output::Csv => threshold_csv(&s, out),
            }
        }
        Command::RegionScan {
            resolution,
            both_signs,
            fiber_samples,
        } => {
            let grid = ScanGrid {
                n_alpha1: *resolution,
                n_alpha2: *resolution,
                both_signs: *both_signs,
                fiber_samples: *fiber_samples,
            };
            if *resolution < 2 || *fiber_samples < 2 {
                return Err(CliError::Input(
                    "--resolution and --fiber-samples must be at least 2".into(),
                ));
            }
            let recs = region_scan::<f64>(&grid)?;
            match cli.output {
                Output::Csv => {
                    let header: Vec<&str> = CSV_HEADER.split(',').collect();
                    let rows: Vec<Vec<String>> =
                        recs.iter().map(|r| r.csv_fields().to_vec()).collect();
                    write_csv(out, &header, &rows)
                }
                Output::Json => {
                    for r in &recs {
                        writeln!(out, "{}", to_json(r)?)?;
                    }
                    Ok(())
                }
            }
        }
        Command::VerifySdp {
            state,
            tol,
            method,
            max_iter,
            self_check,
        } => verify(
            &state.resolve()?,
            NumericOptions {
                method: (*method).into(),
                tol: *tol,
                barrier: BarrierOptions::default(),
                max_iter: *max_iter,
            },
            *self_check,
            cli.seed,
            cli.output,
            out,
        ),
        Command::Certificate { state, full } => {
            certificate(&state.resolve()?, *full, cli.output, out)
        }
    }
}

fn analyze(p: &BellProbs<f64>, output: Output, out: &mut dyn Write) -> CliResult<()> {
    let alpha = p.to_alpha();
    let extendible = has_symext(&alpha)?;
    let dc = dc_or_undefined(p)?;
    let certificate = if extendible {
        let cert = extension_certificate(&alpha)?;
        let lift = lift_extension(&cert, p)?;
        let check = check_extension(&lift, &p.to_density_matrix())?;
        Some(CertificateSummary {
            certificate: CertificateRecord::from(&cert),
            lift_passes: check.passes(),
        })
    } else {
        None
    };
    let report = AnalyzeReport {
        p: p.as_array(),
        alpha: alpha.xyz(),
        qber: p.qber(),
        d_c: dc,
        separable: p.is_separable()?,
        extendible,
        margin: symext_margin(&alpha)?,
        region: classify_region(alpha.a1(), alpha.a2())?.region,
        rounds_to_break: if dc.is_some() {
            rounds_to_break(p)?
        } else {
            None
        },
        certificate,
    };
    match output {
        Output::Json => write_json(out, &report),
        Output::Csv => {
            let r = &report;
            let header = [
                "p_i",
                "p_x",
                "p_y",
                "p_z",
                "alpha1",
                "alpha2",
                "alpha3",
                "qber_x",
                "qber_y",
                "qber_z",
                "d_c",
                "separable",
                "extendible",
                "margin",
                "region",
                "rounds_to_break",
                "certificate",
            ];
            let mut row: Vec<String> =
                r.p.iter()
                    .chain(&r.alpha)
                    .chain(&r.qber)
                    .map(|&x| f(x))
                    .collect();
            row.extend([
                ext(r.d_c),
                r.separable.to_string(),
                r.extendible.to_string(),
                f(r.margin),
                r.region.to_string(),
                opt(r.rounds_to_break),
                opt(r.certificate.as_ref().map(|c| kind_name(&c.certificate))),
            ]);
            write_csv(out, &header, &[row])
        }
    }
}

fn kind_name(c: &CertificateRecord) -> String {
    serde_json::to_value(c.kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn distill(
    p: &BellProbs<f64>,
    max_rounds: u32,
    output: Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let trace = run_bsteps(p, max_rounds)?;
    match output {
        Output::Json => {
            out.write_all(trace.to_json_lines()?.as_bytes())?;
            Ok(())
        }
        Output::Csv => {
            let header = [
                "round",
                "kind",
                "p_i",
                "p_x",
                "p_y",
                "p_z",
                "d_c",
                "success_prob",
                "extendible",
            ];
            let rows: Vec<Vec<String>> = trace
                .steps
                .iter()
                .map(|s| {
                    let kind = serde_json::to_value(s.kind)
                        .ok()
                        .and_then(|v| v.as_str().map(str::to_string))
                        .unwrap_or_default();
                    let mut row = vec![s.round.to_string(), kind];
                    row.extend(s.p.as_array().iter().map(|&x| f(x)));
                    row.extend([
                        ext(Some(s.d_c)),
                        f(s.success_prob),
                        s.extendible.to_string(),
                    ]);
                    row
                })
                .collect();
            write_csv(out, &header, &rows)
        }
    }
}

fn threshold_csv(s: &ThresholdSearch<f64>, out: &mut dyn Write) -> CliResult<()> {
    write_csv(
        out,
        &["scheme", "q_max", "lo", "hi", "iterations"],
        &[vec![
            s.scheme.to_string(),
            f(s.q_max),
            f(s.lo),
            f(s.hi),
            s.iterations.to_string(),
        ]],
    )
}

fn verify_state(p: &BellProbs<f64>, rounds: u32, opts: &NumericOptions) -> CliResult<VerifyStage> {
    let alpha = p.to_alpha();
    let analytic = AnalyticSummary {
        extendible: has_symext(&alpha)?,
        margin: symext_margin(&alpha)?,
    };
    let primal = solve_simplified_primal_with(&alpha, opts.tol, &opts.barrier)?;
    let dual = solve_simplified_dual_with(&alpha, opts.tol, &opts.barrier)?;
    let full = check_extendible_with(&SdpProblem::new(&p.to_density_matrix())?, opts)?;
    let consistent = [&primal, &dual, &full]
        .iter()
        .filter_map(|v| v.decision())
        .all(|d| d == analytic.extendible);
    Ok(VerifyStage {
        rounds,
        p: p.as_array(),
        analytic,
        simplified_primal: (&primal).into(),
        simplified_dual: (&dual).into(),
        full: (&full).into(),
        consistent,
    })
}

fn verify(
    p: &BellProbs<f64>,
    opts: NumericOptions,
    self_check: usize,
    seed: u64,
    output: Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(CliError::Input(format!(
            "--tol {} must be positive",
            opts.tol
        )));
    }
    let mut stages = vec![verify_state(p, 0, &opts)?];
    let rounds = match dc_or_undefined(p)? {
        Some(_) => rounds_to_break(p)?,
        None => None,
    };
    if let Some(r) = rounds.filter(|&r| r > 0) {
        let mut c = ParityCoords::from_probs(p);
        for _ in 0..r {
            c = bstep_parity(&c)?.parity;
        }
        stages.push(verify_state(&c.to_probs()?, r, &opts)?);
    }
    let self_check = (self_check > 0)
        .then(|| run_self_check(self_check, seed, &opts))
        .transpose()?;
    let report = VerifyReport {
        consistent: stages.iter().all(|s| s.consistent)
            && self_check.as_ref().is_none_or(|c| c.disagreements == 0),
        stages,
        self_check,
    };
    match output {
        Output::Json => write_json(out, &report)?,
        Output::Csv => {
            let header = [
                "rounds",
                "method",
                "status",
                "extendible",
                "margin",
                "objective",
                "gap",
            ];
            let mut rows = Vec::new();
            for s in &report.stages {
                rows.push(vec![
                    s.rounds.to_string(),
                    "analytic".into(),
                    String::new(),
                    s.analytic.extendible.to_string(),
                    f(s.analytic.margin),
                    String::new(),
                    String::new(),
                ]);
                for (name, v) in [
                    ("simplified_primal", &s.simplified_primal),
                    ("simplified_dual", &s.simplified_dual),
                    ("full", &s.full),
                ] {
                    let status = serde_json::to_value(v.status)?
                        .as_str()
                        .unwrap_or_default()
                        .to_string();
                    rows.push(vec![
                        s.rounds.to_string(),
                        name.into(),
                        status,
                        opt(v.extendible),
                        f(v.margin),
                        f(v.objective),
                        f(v.gap),
                    ]);
                }
            }
            write_csv(out, &header, &rows)?;
        }
    }
    let undecided = report
        .stages
        .iter()
        .any(|s| s.full.status == SdpStatus::Undecided);
    if undecided {
        return Err(CliError::Undecided(
            "the full SDP did not reach a verdict".into(),
        ));
    }
    Ok(())
}

fn run_self_check(samples: usize, seed: u64, opts: &NumericOptions) -> CliResult<SelfCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut compared, mut disagreements) = (0, 0);
    for _ in 0..samples {
        let p = sampling::uniform_state(&mut rng);
        if symext_margin(&p.to_alpha())?.abs() <= SELF_CHECK_BAND {
            continue;
        }
        compared += 1;
        if !verify_state(&p, 0, opts)?.consistent {
            disagreements += 1;
        }
    }
    Ok(SelfCheck {
        seed,
        samples,
        compared,
        disagreements,
    })
}

fn certificate(
    p: &BellProbs<f64>,
    full: bool,
    output: Output,
    out: &mut dyn Write,
) -> CliResult<()> {
    let alpha = p.to_alpha();
    if !has_symext(&alpha)? {
        return Err(CliError::Failure(format!(
            "state {:?} has no symmetric extension",
            p.as_array()
        )));
    }
    let cert = extension_certificate(&alpha)?;
    let ext_state = lift_extension(&cert, p)?;
    let lift = check_extension(&ext_state, &p.to_density_matrix())?;
    let report = CertificateReport {
        p: p.as_array(),
        alpha: alpha.xyz(),
        certificate: CertificateRecord::from(&cert),
        min_eigenvalue: cert.min_eigenvalue()?,
        constraint_residual: cert.constraint_residual(&alpha),
        passes: lift.passes(),
        lift,
        extension: full.then(|| MatrixRows::from(&ext_state)),
    };
    match output {
        Output::Json => write_json(out, &report),
        Output::Csv => {
            let r = &report;
            let header = [
                "kind",
                "trace",
                "min_eigenvalue",
                "constraint_residual",
                "lift_min_eigenvalue",
                "lift_trace_error",
                "lift_swap_residual",
                "lift_marginal_error",
                "passes",
            ];
            let row = vec![
                kind_name(&r.certificate),
                f(r.certificate.trace),
                f(r.min_eigenvalue),
                f(r.constraint_residual),
                f(r.lift.min_eigenvalue),
                f(r.lift.trace_error),
                f(r.lift.swap_residual),
                f(r.lift.marginal_error),
                r.passes.to_string(),
            ];
            write_csv(out, &header, &[row])
        }
    }
}
