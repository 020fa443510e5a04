//! Command-line surface: `build`, `sweep`, `enumerate`, `jordan`, `verify`.
//!
//! Every command renders to a `String` so the same code path serves the
//! binary and the tests. Floats are printed with 15 significant digits in
//! lowercase scientific notation; JSON numbers are rounded to the same
//! precision before serialization.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{self, ClassifyError};
use crate::epn::{self, EpnError};
use crate::hubbard::{self, ModelConfig, ModelError, GAMMA_EPN};
use crate::linalg::{self, ComplexMatrix, ComplexScalar, LinalgError, DEFAULT_RANK_TOL};

/// Largest `N` accepted by `enumerate` unless `--max-n` says otherwise.
pub const DEFAULT_MAX_N: usize = 20;

/// Largest `N_max` accepted by `verify`.
pub const VERIFY_LIMIT: usize = 20;

/// Relative nilpotency defect below which a sweep reports the exact
/// all-zero spectrum at `gamma = 1` instead of QR output.
const EPN_NILPOTENT_GATE: f64 = 1e-12;

/// Published values of `P(N)`, `N = 2..=20`.
pub const REFERENCE_PARTITION_COUNTS: [usize; 19] = [
    1, 1, 2, 2, 4, 4, 7, 8, 12, 14, 21, 24, 34, 41, 55, 66, 88, 105, 137,
];

/// Published values of `a(N)`, `N = 2..=15`.
pub const REFERENCE_MODEL_COUNTS: [usize; 14] = [1, 1, 2, 3, 3, 6, 4, 11, 6, 17, 7, 32, 8, 47];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Epn(#[from] EpnError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for bad input, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_)
            | CliError::Model(_)
            | CliError::Classify(_)
            | CliError::Io(_) => 1,
            CliError::Epn(EpnError::Model(_)) => 1,
            CliError::Epn(_) | CliError::Linalg(_) => 2,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "ptbh",
    version,
    about = "PT-symmetric Bose-Hubbard models and their exceptional points"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the Hamiltonian matrix of a model at one coupling.
    Build {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Eigenvalues along a coupling grid, as CSV.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        /// `start:end:steps`, endpoints included.
        #[arg(long = "gamma-range")]
        gamma_range: String,
    },
    /// List every admissible model of dimension N.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_MAX_N)]
        max_n: usize,
    },
    /// Jordan structure and transition matrix at gamma = 1.
    Jordan {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run the invariant suite for all N up to --n.
    Verify {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Model as inline JSON or a path to a JSON file:
    /// {"N": 4, "partition": [2, 2], "scales": [1, 3]}
    #[arg(long, conflicts_with = "n")]
    pub config: Option<String>,
    /// Shorthand for the single block {[N], (1)}.
    #[arg(long)]
    pub n: Option<usize>,
    /// Accept inadmissible models (output is tagged).
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// On-disk / inline model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub partition: Vec<usize>,
    pub scales: Vec<u32>,
}

impl ConfigFile {
    pub fn from_config(config: &ModelConfig) -> Self {
        Self {
            n: config.dimension(),
            partition: config.partition(),
            scales: config.scales(),
        }
    }

    pub fn to_config(&self) -> Result<ModelConfig, CliError> {
        Ok(ModelConfig::from_parts(
            self.n,
            &self.partition,
            &self.scales,
        )?)
    }
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
pub fn parse_config(arg: &str) -> Result<ModelConfig, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg)
            .map_err(|e| invalid(format!("cannot read config {arg}: {e}")))?
    };
    let file: ConfigFile =
        serde_json::from_str(&text).map_err(|e| invalid(format!("cannot parse config: {e}")))?;
    file.to_config()
}

impl ModelArgs {
    pub fn resolve(&self) -> Result<ModelConfig, CliError> {
        match (&self.config, self.n) {
            (Some(c), None) => parse_config(c),
            (None, Some(n)) => Ok(ModelConfig::single_block(n)?),
            (None, None) => Err(invalid("either --config or --n is required")),
            (Some(_), Some(_)) => Err(invalid("--config and --n are mutually exclusive")),
        }
    }
}

/// 15 significant digits, lowercase scientific; negative zero prints as zero.
pub fn fmt15(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

fn round15(x: f64) -> f64 {
    fmt15(x).parse().expect("formatted float parses")
}

#[derive(Debug, Serialize)]
struct EntryDump {
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct MatrixDump {
    rows: usize,
    cols: usize,
    entries: Vec<EntryDump>,
}

impl From<&ComplexMatrix> for MatrixDump {
    fn from(m: &ComplexMatrix) -> Self {
        let entries = (0..m.n_rows())
            .flat_map(|i| (0..m.n_cols()).map(move |j| (i, j)))
            .map(|(row, col)| EntryDump {
                row,
                col,
                re: round15(m[(row, col)].re),
                im: round15(m[(row, col)].im),
            })
            .collect();
        Self {
            rows: m.n_rows(),
            cols: m.n_cols(),
            entries,
        }
    }
}

#[derive(Debug, Serialize)]
struct BuildMetadata {
    #[serde(rename = "N")]
    n: usize,
    partition: Vec<usize>,
    scales: Vec<u32>,
    gamma: f64,
    admissible: bool,
}

#[derive(Debug, Serialize)]
struct BuildDump {
    metadata: BuildMetadata,
    matrix: MatrixDump,
}

pub fn cmd_build(
    config: &ModelConfig,
    gamma: f64,
    format: Format,
    force: bool,
) -> Result<String, CliError> {
    let ham = hubbard::direct_sum_hamiltonian(config, gamma, force)?;
    let meta = BuildMetadata {
        n: config.dimension(),
        partition: config.partition(),
        scales: config.scales(),
        gamma: round15(gamma),
        admissible: ham.admissible,
    };
    match format {
        Format::Json => {
            let dump = BuildDump {
                metadata: meta,
                matrix: MatrixDump::from(&ham.matrix),
            };
            Ok(serde_json::to_string_pretty(&dump).expect("plain data serializes") + "\n")
        }
        Format::Csv => {
            let join = |v: Vec<String>| v.join(" ");
            let mut out = String::new();
            writeln!(out, "# N={}", meta.n).unwrap();
            writeln!(
                out,
                "# partition={}",
                join(meta.partition.iter().map(ToString::to_string).collect())
            )
            .unwrap();
            writeln!(
                out,
                "# scales={}",
                join(meta.scales.iter().map(ToString::to_string).collect())
            )
            .unwrap();
            writeln!(out, "# gamma={}", fmt15(gamma)).unwrap();
            writeln!(out, "# admissible={}", meta.admissible).unwrap();
            writeln!(out, "row,col,re,im").unwrap();
            let m = &ham.matrix;
            for i in 0..m.n_rows() {
                for j in 0..m.n_cols() {
                    writeln!(
                        out,
                        "{i},{j},{},{}",
                        fmt15(m[(i, j)].re),
                        fmt15(m[(i, j)].im)
                    )
                    .unwrap();
                }
            }
            Ok(out)
        }
        Format::Plain => Err(invalid("build supports --format json or csv")),
    }
}

/// A coupling grid over one model.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub config: ModelConfig,
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub steps: usize,
}

impl SweepRequest {
    pub fn new(
        config: ModelConfig,
        gamma_min: f64,
        gamma_max: f64,
        steps: usize,
    ) -> Result<Self, CliError> {
        if !(gamma_min.is_finite() && gamma_max.is_finite()) {
            return Err(invalid("gamma range must be finite"));
        }
        if !(0.0 <= gamma_min && gamma_min < gamma_max && gamma_max <= GAMMA_EPN) {
            return Err(invalid(format!(
                "gamma range must satisfy 0 <= min < max <= 1, got {gamma_min}:{gamma_max}"
            )));
        }
        if steps < 2 {
            return Err(invalid(format!(
                "sweep needs at least 2 steps, got {steps}"
            )));
        }
        Ok(Self {
            config,
            gamma_min,
            gamma_max,
            steps,
        })
    }

    /// Grid points with both endpoints hit exactly.
    pub fn gammas(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == last {
                    self.gamma_max
                } else {
                    self.gamma_min + (self.gamma_max - self.gamma_min) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// `start:end:steps`.
pub fn parse_gamma_range(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(invalid(format!(
            "gamma range must be start:end:steps, got {s:?}"
        )));
    };
    let a = a
        .trim()
        .parse::<f64>()
        .map_err(|_| invalid(format!("bad gamma start {a:?}")))?;
    let b = b
        .trim()
        .parse::<f64>()
        .map_err(|_| invalid(format!("bad gamma end {b:?}")))?;
    let n = n
        .trim()
        .parse::<usize>()
        .map_err(|_| invalid(format!("bad step count {n:?}")))?;
    Ok((a, b, n))
}

/// Eigenvalues at one coupling, sorted by real then imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSample {
    pub gamma: f64,
    pub eigenvalues: Vec<ComplexScalar>,
}

/// Spectrum of a model at `gamma`. At the EPN itself the matrix is checked
/// for nilpotency and, if it passes, the exact all-zero spectrum is returned.
pub fn spectrum_sample(
    config: &ModelConfig,
    gamma: f64,
    force: bool,
) -> Result<SpectrumSample, CliError> {
    let h = hubbard::direct_sum_hamiltonian(config, gamma, force)?.matrix;
    let n = h.n_rows();
    let mut eigenvalues =
        if gamma.abs() == GAMMA_EPN && epn::nilpotency_defect(&h)? <= EPN_NILPOTENT_GATE {
            vec![ComplexScalar::new(0.0, 0.0); n]
        } else {
            linalg::eigenvalues(&h)?
        };
    linalg::sort_spectrum(&mut eigenvalues);
    Ok(SpectrumSample { gamma, eigenvalues })
}

pub fn cmd_sweep(request: &SweepRequest, force: bool) -> Result<String, CliError> {
    let mut out = String::from("gamma,level_index,re,im\n");
    for gamma in request.gammas() {
        let sample = spectrum_sample(&request.config, gamma, force)?;
        for (k, z) in sample.eigenvalues.iter().enumerate() {
            writeln!(out, "{},{k},{},{}", fmt15(gamma), fmt15(z.re), fmt15(z.im)).unwrap();
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct EnumeratedModel {
    partition: Vec<usize>,
    scales: Vec<u32>,
    #[serde(rename = "K")]
    k: usize,
    index_notation: String,
}

#[derive(Debug, Serialize)]
struct Totals {
    #[serde(rename = "P")]
    p: usize,
    a: usize,
}

#[derive(Debug, Serialize)]
struct EnumerationDump {
    #[serde(rename = "N")]
    n: usize,
    models: Vec<EnumeratedModel>,
    totals: Totals,
}

pub fn cmd_enumerate(n: usize, format: Format, max_n: usize) -> Result<String, CliError> {
    if n < 2 || n > max_n {
        return Err(invalid(format!("N must lie in 2..={max_n}, got {n}")));
    }
    let models = classify::enumerate_models(n)?;
    let p = classify::count_partitions(n)?;
    let rows = models
        .iter()
        .map(|c| {
            Ok(EnumeratedModel {
                partition: c.partition(),
                scales: c.scales(),
                k: c.multiplicity(),
                index_notation: classify::render_index_notation(c)?,
            })
        })
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    let dump = EnumerationDump {
        n,
        totals: Totals { p, a: rows.len() },
        models: rows,
    };
    match format {
        Format::Json => {
            Ok(serde_json::to_string_pretty(&dump).expect("plain data serializes") + "\n")
        }
        Format::Plain => {
            let mut out = String::new();
            writeln!(
                out,
                "N = {n}    P(N) = {}    a(N) = {}",
                dump.totals.p, dump.totals.a
            )
            .unwrap();
            writeln!(
                out,
                "{:>3}  {:>2}  {:<16} {:<16} index",
                "#", "K", "partition", "scales"
            )
            .unwrap();
            for (i, m) in dump.models.iter().enumerate() {
                let list = |v: Vec<String>| v.join(",");
                writeln!(
                    out,
                    "{:>3}  {:>2}  {:<16} {:<16} {}",
                    i + 1,
                    m.k,
                    format!(
                        "[{}]",
                        list(m.partition.iter().map(ToString::to_string).collect())
                    ),
                    format!(
                        "{{{}}}",
                        list(m.scales.iter().map(ToString::to_string).collect())
                    ),
                    m.index_notation
                )
                .unwrap();
            }
            Ok(out)
        }
        Format::Csv => Err(invalid("enumerate supports --format json or plain")),
    }
}

#[derive(Debug, Serialize)]
struct JordanDump {
    #[serde(rename = "N")]
    n: usize,
    partition: Vec<usize>,
    scales: Vec<u32>,
    eta: f64,
    #[serde(rename = "K")]
    k: usize,
    segre: Vec<usize>,
    residual: f64,
    condition_estimate: f64,
    transition_matrix: MatrixDump,
}

pub fn cmd_jordan(config: &ModelConfig) -> Result<String, CliError> {
    let report = epn::transition_matrix(config)?;
    let dump = JordanDump {
        n: report.dimension,
        partition: config.partition(),
        scales: config.scales(),
        eta: report.eta,
        k: report.geometric_multiplicity,
        segre: report.segre.clone(),
        residual: round15(report.residual),
        condition_estimate: round15(report.condition_estimate),
        transition_matrix: MatrixDump::from(&report.transition_matrix),
    };
    Ok(serde_json::to_string_pretty(&dump).expect("plain data serializes") + "\n")
}

/// Outcome of one verification check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub model_counts: Vec<(usize, usize)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(out, "{tag} {}: {}", c.name, c.detail).unwrap();
        }
        let counts: Vec<String> = self
            .model_counts
            .iter()
            .map(|(_, a)| a.to_string())
            .collect();
        writeln!(
            out,
            "a(N) for N = 2..={}: {{{}}}",
            self.model_counts.len() + 1,
            counts.join(",")
        )
        .unwrap();
        writeln!(
            out,
            "{}",
            if self.passed() {
                "all checks passed"
            } else {
                "verification FAILED"
            }
        )
        .unwrap();
        out
    }
}

/// Tracks the worst defect seen by a check and the model that produced it.
struct Worst {
    defect: f64,
    failures: Vec<String>,
}

impl Worst {
    fn new() -> Self {
        Self {
            defect: 0.0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, defect: f64, tol: f64, label: impl FnOnce() -> String) {
        self.defect = self.defect.max(defect);
        if defect.is_nan() || defect > tol {
            self.failures
                .push(format!("{} (defect {:.3e})", label(), defect));
        }
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    fn finish(self, name: &str, scope: &str) -> CheckResult {
        let passed = self.failures.is_empty();
        let detail = if passed {
            format!("{scope}, worst defect {:.3e}", self.defect)
        } else {
            format!("{scope}; {}", self.failures.join("; "))
        };
        CheckResult {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).map_or(f64::INFINITY, |d| d.max_abs())
}

/// Runs the invariant suite. Counts are checked for every `N <= n_max`;
/// spectral checks are limited to `N <= 12` and transition matrices to
/// `N <= 10`, the ranges the double-precision tolerances are pinned for.
pub fn verify(n_max: usize) -> Result<VerifyReport, CliError> {
    if !(2..=VERIFY_LIMIT).contains(&n_max) {
        return Err(invalid(format!(
            "verify needs 2 <= N_max <= {VERIFY_LIMIT}, got {n_max}"
        )));
    }
    let spectral_max = n_max.min(12);
    let jordan_max = n_max.min(10);
    let mut checks = Vec::new();

    let mut models = Vec::new();
    for n in 2..=n_max {
        models.push(classify::enumerate_models(n)?);
    }
    let model_counts: Vec<(usize, usize)> = models
        .iter()
        .enumerate()
        .map(|(i, m)| (i + 2, m.len()))
        .collect();

    // counts against the published tables
    let mut p_check = Worst::new();
    for n in 2..=n_max {
        let got = classify::count_partitions(n)?;
        let want = REFERENCE_PARTITION_COUNTS[n - 2];
        if got != want {
            p_check.fail(format!("P({n}) = {got}, table says {want}"));
        }
    }
    checks.push(p_check.finish("partition counts P(N)", &format!("N = 2..={n_max}")));

    let mut a_check = Worst::new();
    let a_max = n_max.min(REFERENCE_MODEL_COUNTS.len() + 1);
    for &(n, got) in model_counts.iter().take(a_max - 1) {
        let want = REFERENCE_MODEL_COUNTS[n - 2];
        if got != want {
            a_check.fail(format!("a({n}) = {got}, table says {want}"));
        }
    }
    checks.push(a_check.finish("model counts a(N)", &format!("N = 2..={a_max}")));

    let mut adm = Worst::new();
    for m in models.iter().flatten() {
        if !classify::is_admissible(m) {
            adm.fail(format!("{m} enumerated but not admissible"));
        }
    }
    checks.push(adm.finish("enumerated models admissible", &format!("N = 2..={n_max}")));

    let mut oracle = Worst::new();
    for n in 2..=n_max {
        for gamma in [0.0, 0.3, 0.7, 1.0] {
            let d = max_abs_diff(
                &hubbard::fock_block(n - 1, gamma)?,
                &hubbard::bh_block(n, gamma)?,
            );
            oracle.record(d, 1e-12, || format!("N={n} gamma={gamma}"));
        }
    }
    checks.push(oracle.finish(
        "Fock-sector oracle equals tridiagonal block",
        &format!("N = 2..={n_max}"),
    ));

    let spectral_models: Vec<&ModelConfig> =
        models.iter().take(spectral_max - 1).flatten().collect();

    let mut sym = Worst::new();
    for &m in &spectral_models {
        for gamma in [0.0, 0.5, 1.0] {
            let r = hubbard::symmetry_report(&hubbard::model_matrix(m, gamma)?)?;
            sym.record(r.max_defect, hubbard::SYMMETRY_TOL, || {
                format!("{m} gamma={gamma}")
            });
        }
    }
    checks.push(sym.finish(
        "complex and PT symmetry",
        &format!("N = 2..={spectral_max}"),
    ));

    let mut iso = Worst::new();
    for &m in &spectral_models {
        for gamma in [0.1, 0.5, 0.9] {
            let exact = hubbard::closed_form_spectrum(m.dimension(), gamma)?;
            let mut ev = linalg::eigenvalues(&hubbard::model_matrix(m, gamma)?)?;
            linalg::sort_spectrum(&mut ev);
            let d = ev
                .iter()
                .zip(&exact)
                .map(|(z, &e)| (z - ComplexScalar::new(e, 0.0)).norm())
                .fold(0.0, f64::max);
            iso.record(d, 1e-8, || format!("{m} gamma={gamma}"));
        }
    }
    checks.push(iso.finish(
        "isospectrality with closed form",
        &format!("N = 2..={spectral_max}"),
    ));

    let mut nil = Worst::new();
    let mut mult = Worst::new();
    let mut segre = Worst::new();
    for &m in &spectral_models {
        let h = hubbard::model_matrix(m, GAMMA_EPN)?;
        nil.record(epn::nilpotency_defect(&h)?, 1e-12, || m.to_string());
        let k = epn::geometric_multiplicity(&h, DEFAULT_RANK_TOL)?.value;
        if k != m.multiplicity() {
            mult.fail(format!("{m}: K = {k}, expected {}", m.multiplicity()));
        }
        match epn::segre_characteristic(&h, DEFAULT_RANK_TOL) {
            Ok(s) if s == m.partition() => {}
            Ok(s) => segre.fail(format!("{m}: Segre {s:?}")),
            Err(e) => segre.fail(format!("{m}: {e}")),
        }
    }
    let scope = format!("N = 2..={spectral_max}, gamma = 1");
    checks.push(nil.finish("nilpotency at the EPN", &scope));
    checks.push(mult.finish("geometric multiplicity equals K", &scope));
    checks.push(segre.finish("Segre characteristic equals partition", &scope));

    let mut tm = Worst::new();
    for m in models.iter().take(jordan_max - 1).flatten() {
        match epn::transition_matrix(m) {
            Ok(r) => tm.record(r.residual, epn::RESIDUAL_TOL, || m.to_string()),
            Err(e) => tm.fail(format!("{m}: {e}")),
        }
    }
    checks.push(tm.finish(
        "transition-matrix residual",
        &format!("N = 2..={jordan_max}"),
    ));

    Ok(VerifyReport {
        checks,
        model_counts,
    })
}

/// Rendered command output plus whether the run counts as a success.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    pub success: bool,
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let ok = |text: String| Output {
        text,
        success: true,
    };
    match &cli.command {
        Command::Build {
            model,
            gamma,
            format,
        } => {
            let config = model.resolve()?;
            cmd_build(&config, *gamma, *format, model.force).map(ok)
        }
        Command::Sweep { model, gamma_range } => {
            let (a, b, steps) = parse_gamma_range(gamma_range)?;
            let request = SweepRequest::new(model.resolve()?, a, b, steps)?;
            cmd_sweep(&request, model.force).map(ok)
        }
        Command::Enumerate { n, format, max_n } => cmd_enumerate(*n, *format, *max_n).map(ok),
        Command::Jordan { model } => cmd_jordan(&model.resolve()?).map(ok),
        Command::Verify { n } => {
            let report = verify(*n)?;
            Ok(Output {
                text: report.render(),
                success: report.passed(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt15(1.0), "1.00000000000000e0");
        assert_eq!(fmt15(-0.0), "0.00000000000000e0");
        assert_eq!(fmt15(-7.5e-3), "-7.50000000000000e-3");
        assert_eq!(round15(0.1 + 0.2), 0.3);
    }

    #[test]
    fn config_parsing() {
        let c = parse_config(r#"{"N": 4, "partition": [2, 2], "scales": [1, 3]}"#).unwrap();
        assert_eq!(c.scales(), vec![1, 3]);
        assert!(matches!(
            parse_config(r#"{"N": 4}"#),
            Err(CliError::Validation(_))
        ));
        assert!(matches!(
            parse_config(r#"{"N": 5, "partition": [2, 2], "scales": [1, 3]}"#),
            Err(CliError::Model(ModelError::SizeMismatch { .. }))
        ));
        assert!(parse_config("/nonexistent/config.json").is_err());
    }

    #[test]
    fn gamma_range_parsing() {
        assert_eq!(parse_gamma_range("0:1:11").unwrap(), (0.0, 1.0, 11));
        assert!(parse_gamma_range("0:1").is_err());
        assert!(parse_gamma_range("0:x:3").is_err());
        let c = ModelConfig::single_block(3).unwrap();
        assert!(SweepRequest::new(c.clone(), 0.5, 0.5, 3).is_err());
        assert!(SweepRequest::new(c.clone(), 0.0, 1.2, 3).is_err());
        assert!(SweepRequest::new(c.clone(), 0.0, 1.0, 1).is_err());
        let r = SweepRequest::new(c, 0.0, 1.0, 5).unwrap();
        assert_eq!(r.gammas(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(invalid("x").exit_code(), 1);
        assert_eq!(CliError::Epn(EpnError::Residual(1.0)).exit_code(), 2);
        assert_eq!(CliError::Model(ModelError::NoBlocks).exit_code(), 1);
    }
}
