//! Batch command-line front end.
//!
//! Every command resolves a [`RunConfig`] (defaults, then `--config`, then
//! flags), runs one experiment and returns an [`Artifact`] whose bytes are a
//! pure function of that config. JSON artifacts embed the config and a
//! format version; CSV artifacts carry them in a sidecar file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{builtin_corpus, load_sampled_csv, lookup, CorpusFunction, Regularity};
use crate::diagnostics::{
    a_norm, estimate_bessel_constant, gram_matrix, minimal_truncation, permutation_probe,
    projection_defect, random_functional, sampled_sup_norm, sampling_level, scaled_paire,
    sign_probe, tail_probe, BesselReport, FunctionalSample, UnconditionalityReport,
    MAX_SCALED_TERMS, PROJECTION_TOLERANCE,
};
use crate::dyadic::DyadicRational;
use crate::error::FrameError;
use crate::frame::{
    convergence_bound, synthesize, CoefficientRow, CoefficientSequence, FrameSystem,
    LambdaSchedule, PointMassFunctional,
};

pub const FORMAT_VERSION: u32 = 1;

/// Slack added to the uniform error bound for float accumulation.
pub const BOUND_SLACK: f64 = 1e-9;

/// Relative slack of the scaled-paire besselian bound.
pub const SCALED_BOUND_SLACK: f64 = 1e-9;

/// Tolerance of the not-a-basis witness.
pub const WITNESS_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 2 for configuration problems, 4 for capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Frame(FrameError::Capacity(_)) => 4,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "faber",
    version,
    about = "Faber–Schauder frame experiments on C[0,1]"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand a function in the frame and write its coefficients.
    Expand(RunArgs),
    /// Uniform error of S_{2^m}(f) against the 2·ω_f(2^{-(m-1)}) bound.
    ErrorTable(RunArgs),
    /// Besselian sums, the empirical L_F estimate and the scaled-paire check.
    Bessel(RunArgs),
    /// Permutation, sign and finite-tail probes of the expansion.
    Uncond(RunArgs),
    /// Idempotence defect of the truncated Gram matrix.
    Gram(RunArgs),
    /// The coefficient sequence (c_3, c_4) = (1, -1) that synthesizes to zero.
    DemoNonbasis(RunArgs),
    /// Built-in test functions.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CorpusAction {
    List(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_level: Option<u32>,
    /// A constant in [0, 1], `seed:<int>`, or a file of explicit values.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Corpus id, or a CSV of `point_numerator,point_level,value` rows.
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    /// Number of expansion terms N (default: the whole built system).
    #[arg(long)]
    pub terms: Option<usize>,
}

/// Fully resolved run parameters; echoed into every artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub max_level: u32,
    pub lambda: LambdaSchedule,
    pub function: String,
    pub terms: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub window: Option<usize>,
    pub cutoffs: Option<Vec<usize>>,
    pub subsets_per_cutoff: usize,
    pub sample_level: u32,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            max_level: 8,
            lambda: LambdaSchedule::default(),
            function: "takagi".into(),
            terms: None,
            trials: 32,
            seed: 0,
            window: None,
            cutoffs: None,
            subsets_per_cutoff: 64,
            sample_level: 14,
            format: None,
        }
    }
}

/// Parses `--lambda`: a float, `seed:<u64>`, or a path to a file holding a
/// JSON array or whitespace/comma separated values.
pub fn parse_lambda(spec: &str) -> CliResult<LambdaSchedule> {
    if let Some(seed) = spec.strip_prefix("seed:") {
        return seed
            .trim()
            .parse()
            .map(LambdaSchedule::SeededRandom)
            .map_err(|e| CliError::Config(format!("bad lambda seed {seed:?}: {e}")));
    }
    if let Ok(value) = spec.parse::<f64>() {
        return Ok(LambdaSchedule::Constant(value));
    }
    let text = fs::read_to_string(spec).map_err(|e| {
        CliError::Config(format!(
            "lambda {spec:?} is neither a number nor a readable file: {e}"
        ))
    })?;
    let values = match serde_json::from_str::<Vec<f64>>(&text) {
        Ok(values) => values,
        Err(_) => text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| CliError::Config(format!("bad lambda value {t:?}: {e}")))
            })
            .collect::<CliResult<_>>()?,
    };
    Ok(LambdaSchedule::Explicit(values))
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> CliResult<Self> {
        let mut config = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::Config(format!("invalid config {}: {e}", path.display()))
                })?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = args.max_level {
            config.max_level = v;
        }
        if let Some(v) = &args.lambda {
            config.lambda = parse_lambda(v)?;
        }
        if let Some(v) = &args.function {
            config.function = v.clone();
        }
        if let Some(v) = args.terms {
            config.terms = Some(v);
        }
        if let Some(v) = args.trials {
            config.trials = v;
        }
        if let Some(v) = args.seed {
            config.seed = v;
        }
        if let Some(v) = args.window {
            config.window = Some(v);
        }
        if let Some(v) = args.format {
            config.format = Some(v);
        }
        Ok(config)
    }

    fn system(&self) -> CliResult<FrameSystem> {
        Ok(FrameSystem::build(self.max_level, self.lambda.clone())?)
    }

    fn terms(&self, system: &FrameSystem) -> CliResult<usize> {
        let terms = self.terms.unwrap_or(system.len());
        system.check_capacity(terms)?;
        if terms == 0 {
            return Err(CliError::Config("terms must be at least 1".into()));
        }
        Ok(terms)
    }

    pub fn corpus_function(&self) -> CliResult<CorpusFunction> {
        if let Some(f) = lookup(&self.function) {
            return Ok(f);
        }
        let path = Path::new(&self.function);
        if path.is_file() {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("custom");
            return Ok(load_sampled_csv(id, fs::File::open(path)?)?);
        }
        let known: Vec<String> = builtin_corpus()
            .iter()
            .map(|f| f.id().to_string())
            .collect();
        Err(CliError::Config(format!(
            "unknown function {:?}; available: {}",
            self.function,
            known.join(", ")
        )))
    }
}

/// What a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub body: Vec<u8>,
    /// Companion file written next to `--out`, as `(suffix, bytes)`.
    pub sidecar: Option<(String, Vec<u8>)>,
    /// False when an embedded bound or identity failed.
    pub contract_ok: bool,
}

impl Artifact {
    pub fn exit_code(&self) -> i32 {
        if self.contract_ok {
            0
        } else {
            3
        }
    }

    /// Writes the body to `out` (or stdout) and the sidecar next to it.
    pub fn write(&self, out: Option<&Path>) -> CliResult<()> {
        match out {
            Some(path) => {
                fs::write(path, &self.body)?;
                if let Some((suffix, bytes)) = &self.sidecar {
                    let mut name = path.as_os_str().to_owned();
                    name.push(suffix);
                    fs::write(PathBuf::from(name), bytes)?;
                }
            }
            None => std::io::stdout().write_all(&self.body)?,
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    format_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    #[serde(flatten)]
    payload: T,
}

fn json_bytes<T: Serialize>(command: &str, config: &RunConfig, payload: T) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(&Envelope {
        format_version: FORMAT_VERSION,
        command,
        config,
        payload,
    })?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn meta_sidecar(command: &str, config: &RunConfig) -> CliResult<Option<(String, Vec<u8>)>> {
    #[derive(Serialize)]
    struct Empty {}
    Ok(Some((
        ".meta.json".into(),
        json_bytes(command, config, Empty {})?,
    )))
}

fn csv_bytes<F>(write: F) -> CliResult<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut out = csv::Writer::from_writer(&mut buf);
        write(&mut out)?;
        out.flush()?;
    }
    Ok(buf)
}

fn artifact<T: Serialize, F>(
    command: &str,
    config: &RunConfig,
    default: Format,
    payload: T,
    csv: F,
    contract_ok: bool,
) -> CliResult<Artifact>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    match config.format.unwrap_or(default) {
        Format::Json => Ok(Artifact {
            body: json_bytes(command, config, payload)?,
            sidecar: None,
            contract_ok,
        }),
        Format::Csv => Ok(Artifact {
            body: csv_bytes(csv)?,
            sidecar: meta_sidecar(command, config)?,
            contract_ok,
        }),
    }
}

pub fn execute(command: &Command) -> CliResult<(Artifact, Option<PathBuf>)> {
    let (args, run): (&RunArgs, fn(&RunConfig) -> CliResult<Artifact>) = match command {
        Command::Expand(a) => (a, cmd_expand),
        Command::ErrorTable(a) => (a, cmd_error_table),
        Command::Bessel(a) => (a, cmd_bessel),
        Command::Uncond(a) => (a, cmd_uncond),
        Command::Gram(a) => (a, cmd_gram),
        Command::DemoNonbasis(a) => (a, cmd_demo_nonbasis),
        Command::Corpus {
            action: CorpusAction::List(a),
        } => (a, cmd_corpus_list),
    };
    let config = RunConfig::resolve(args)?;
    Ok((run(&config)?, args.out.clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorSample {
    pub n: usize,
    pub sup_error: f64,
}

#[derive(Serialize)]
struct ExpandPayload<'a> {
    function: &'a str,
    terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<CoefficientRow>>,
    errors: Vec<ErrorSample>,
}

/// Coefficients `A_n(f)` for `n ≤ N`, with `‖f − S_n(f)‖` for `n = 2, 4, …, N`.
pub fn cmd_expand(config: &RunConfig) -> CliResult<Artifact> {
    let system = config.system()?;
    let terms = config.terms(&system)?;
    let f = config.corpus_function()?;
    let coeffs = system.analyze(&f, terms)?;
    let errors_all = system.reconstruction_errors(&f, terms, config.sample_level)?;
    let errors: Vec<ErrorSample> = std::iter::successors(Some(2usize), |n| n.checked_mul(2))
        .take_while(|&n| n <= terms)
        .map(|n| ErrorSample {
            n,
            sup_error: errors_all[n - 1],
        })
        .collect();
    let payload = |with_coeffs: bool| ExpandPayload {
        function: f.id(),
        terms,
        coefficients: with_coeffs.then(|| coeffs.rows()),
        errors: errors.clone(),
    };
    match config.format.unwrap_or(Format::Csv) {
        Format::Json => Ok(Artifact {
            body: json_bytes("expand", config, payload(true))?,
            sidecar: None,
            contract_ok: true,
        }),
        Format::Csv => {
            let mut body = Vec::new();
            coeffs.write_csv(&mut body)?;
            Ok(Artifact {
                body,
                sidecar: Some((
                    ".errors.json".into(),
                    json_bytes("expand", config, payload(false))?,
                )),
                contract_ok: true,
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTableRow {
    pub m: u32,
    pub n: usize,
    pub error: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Rows `(m, 2^m, ‖f − S_{2^m}(f)‖, 2·ω_f(2^{−(m−1)}), pass)` for `m = 1..=L`.
pub fn error_table(
    system: &FrameSystem,
    f: &CorpusFunction,
    sample_level: u32,
) -> CliResult<Vec<ErrorTableRow>> {
    let top = 1usize << system.max_level();
    let errors = system.reconstruction_errors(f, top, sample_level)?;
    (1..=system.max_level())
        .map(|m| {
            let n = 1usize << m;
            let bound = convergence_bound(f, n, sample_level)?;
            let error = errors[n - 1];
            Ok(ErrorTableRow {
                m,
                n,
                error,
                bound,
                pass: error <= bound + BOUND_SLACK,
            })
        })
        .collect()
}

pub fn cmd_error_table(config: &RunConfig) -> CliResult<Artifact> {
    let system = config.system()?;
    let f = config.corpus_function()?;
    let rows = error_table(&system, &f, config.sample_level)?;
    let ok = rows.iter().all(|r| r.pass);
    #[derive(Serialize)]
    struct Payload<'a> {
        function: &'a str,
        rows: &'a [ErrorTableRow],
    }
    artifact(
        "error-table",
        config,
        Format::Csv,
        Payload {
            function: f.id(),
            rows: &rows,
        },
        |out| rows.iter().try_for_each(|r| out.serialize(r)),
        ok,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledCheck {
    pub terms: usize,
    pub pairs: usize,
    pub max_ratio: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

/// Point masses at 0, 1/2, 1 plus `count` seeded random unit-mass functionals.
pub fn functional_corpus(
    count: usize,
    seed: u64,
    level: u32,
) -> CliResult<Vec<(String, FunctionalSample)>> {
    let mut fs = vec![
        (
            "delta_0".to_string(),
            PointMassFunctional::point_mass(DyadicRational::ZERO),
        ),
        (
            "delta_1/2".to_string(),
            PointMassFunctional::point_mass(DyadicRational::HALF),
        ),
        (
            "delta_1".to_string(),
            PointMassFunctional::point_mass(DyadicRational::ONE),
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        fs.push((
            format!("random_{i}"),
            random_functional(&mut rng, 8, level)?,
        ));
    }
    Ok(fs)
}

/// Checks that the rescaled paire satisfies
/// `Σ |g_n(x)| |f(y_n)| ≤ ‖x‖ ‖f‖` on every (x, f) pair.
pub fn scaled_check(
    system: &FrameSystem,
    xs: &[CorpusFunction],
    fs: &[(String, FunctionalSample)],
    terms: usize,
) -> CliResult<ScaledCheck> {
    let terms = terms.min(MAX_SCALED_TERMS);
    let paire = match scaled_paire(system, terms) {
        Ok(p) => p,
        Err(FrameError::ZeroFunctional(n)) => {
            return Ok(ScaledCheck {
                terms,
                pairs: 0,
                max_ratio: 0.0,
                pass: true,
                skipped: Some(format!("A_{n} is zero for this schedule")),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let level = sampling_level(terms);
    let (mut max_ratio, mut pairs, mut pass) = (0.0f64, 0, true);
    for x in xs {
        let x_norm = sampled_sup_norm(x, level)?;
        for (_, f) in fs {
            let bound = x_norm * f.norm();
            let sum = paire.besselian_sum(x, f)?;
            pass &= sum <= bound * (1.0 + SCALED_BOUND_SLACK);
            if bound > 0.0 {
                max_ratio = max_ratio.max(sum / bound);
            }
            pairs += 1;
        }
    }
    Ok(ScaledCheck {
        terms,
        pairs,
        max_ratio,
        pass,
        skipped: None,
    })
}

pub fn cmd_bessel(config: &RunConfig) -> CliResult<Artifact> {
    let system = config.system()?;
    let terms = config.terms(&system)?;
    let xs = if config.function == "all" {
        builtin_corpus()
    } else {
        vec![config.corpus_function()?]
    };
    let fs = functional_corpus(config.trials, config.seed, sampling_level(terms))?;
    let report = estimate_bessel_constant(&system, &xs, &fs, terms)?;
    let scaled = scaled_check(&system, &xs, &fs, terms)?;
    #[derive(Serialize)]
    struct Payload<'a> {
        terms: usize,
        #[serde(flatten)]
        report: &'a BesselReport,
        scaled: &'a ScaledCheck,
    }
    artifact(
        "bessel",
        config,
        Format::Json,
        Payload {
            terms,
            report: &report,
            scaled: &scaled,
        },
        |out| report.pairs.iter().try_for_each(|r| out.serialize(r)),
        scaled.pass,
    )
}

/// Default tail cutoffs: the first index of every level, `2^j + 1`.
pub fn default_cutoffs(terms: usize) -> Vec<usize> {
    std::iter::successors(Some(3usize), |k| Some(2 * k - 1))
        .take_while(|&k| k <= terms)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncondSummary {
    pub function: String,
    pub terms: usize,
    pub a_norm: f64,
    pub synthesis_norm: f64,
    pub permutation: UnconditionalityReport,
    pub signs: UnconditionalityReport,
    pub tail: UnconditionalityReport,
    /// `a_tilde ≥ a_norm ≥ ‖synthesis‖`, which holds by construction.
    pub ordering_ok: bool,
}

pub fn uncond_summary(config: &RunConfig) -> CliResult<UncondSummary> {
    let system = config.system()?;
    let terms = config.terms(&system)?;
    let f = config.corpus_function()?;
    let coeffs = system.analyze(&f, terms)?;
    let trials = config.trials.max(1);
    let cutoffs = config
        .cutoffs
        .clone()
        .unwrap_or_else(|| default_cutoffs(terms));
    let a = a_norm(&coeffs);
    let synthesis_norm = synthesize(&coeffs)?.sup_norm();
    let permutation = permutation_probe(&coeffs, trials, config.seed)?;
    let signs = sign_probe(&coeffs, trials, config.seed)?;
    let tail = tail_probe(
        &coeffs,
        &cutoffs,
        config.subsets_per_cutoff.max(1),
        config.seed,
    )?;
    let ordering_ok =
        permutation.observed_sup >= a && signs.observed_sup >= a && a >= synthesis_norm;
    Ok(UncondSummary {
        function: f.id().to_string(),
        terms,
        a_norm: a,
        synthesis_norm,
        permutation,
        signs,
        tail,
        ordering_ok,
    })
}

pub fn cmd_uncond(config: &RunConfig) -> CliResult<Artifact> {
    let summary = uncond_summary(config)?;
    let ok = summary.ordering_ok;
    artifact(
        "uncond",
        config,
        Format::Json,
        &summary,
        |out| {
            out.write_record(["probe", "trial", "n", "norm"])?;
            summary.permutation.write_csv_rows(out)?;
            summary.signs.write_csv_rows(out)?;
            for (k, v) in &summary.tail.tail_sups {
                out.write_record([
                    "tail".to_string(),
                    k.to_string(),
                    String::new(),
                    v.to_string(),
                ])?;
            }
            Ok(())
        },
        ok,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramRow {
    pub window: usize,
    pub terms: usize,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub stored_entries: usize,
}

pub fn gram_rows(
    system: &FrameSystem,
    windows: &[usize],
    terms: Option<usize>,
) -> CliResult<Vec<GramRow>> {
    windows
        .iter()
        .map(|&window| {
            let terms = terms.unwrap_or_else(|| minimal_truncation(window).max(window));
            let gram = gram_matrix(system, terms)?;
            let defect = projection_defect(&gram, window)?;
            Ok(GramRow {
                window,
                terms,
                defect,
                tolerance: PROJECTION_TOLERANCE,
                pass: defect <= PROJECTION_TOLERANCE,
                stored_entries: gram.stored_entries(),
            })
        })
        .collect()
}

pub fn cmd_gram(config: &RunConfig) -> CliResult<Artifact> {
    let system = config.system()?;
    let windows = config.window.map_or_else(|| vec![4, 8, 16], |w| vec![w]);
    let rows = gram_rows(&system, &windows, config.terms)?;
    let ok = rows.iter().all(|r| r.pass);
    #[derive(Serialize)]
    struct Payload<'a> {
        rows: &'a [GramRow],
    }
    artifact(
        "gram",
        config,
        Format::Csv,
        Payload { rows: &rows },
        |out| rows.iter().try_for_each(|r| out.serialize(r)),
        ok,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonBasisWitness {
    pub coefficients: Vec<f64>,
    pub nonzero_coeffs: bool,
    pub synthesis_sup_norm: f64,
    pub a_norm_prefix: f64,
    pub pass: bool,
}

/// `φ_3 = φ_4`, so `(0, 0, 1, −1)` is a non-zero expansion of zero.
pub fn nonbasis_witness() -> CliResult<NonBasisWitness> {
    let coefficients = vec![0.0, 0.0, 1.0, -1.0];
    let coeffs = CoefficientSequence::from_values(coefficients.clone())?;
    let synthesis_sup_norm = synthesize(&coeffs)?.sup_norm();
    let a_norm_prefix = a_norm(&coeffs);
    let nonzero_coeffs = coefficients.iter().any(|c| *c != 0.0);
    Ok(NonBasisWitness {
        coefficients,
        nonzero_coeffs,
        synthesis_sup_norm,
        a_norm_prefix,
        pass: nonzero_coeffs
            && synthesis_sup_norm <= WITNESS_TOLERANCE
            && (a_norm_prefix - 1.0).abs() <= WITNESS_TOLERANCE,
    })
}

pub fn cmd_demo_nonbasis(config: &RunConfig) -> CliResult<Artifact> {
    let witness = nonbasis_witness()?;
    let ok = witness.pass;
    artifact(
        "demo-nonbasis",
        config,
        Format::Json,
        &witness,
        |out| out.serialize(witness_row(&witness)),
        ok,
    )
}

#[derive(Serialize)]
struct WitnessRow {
    nonzero_coeffs: bool,
    synthesis_sup_norm: f64,
    a_norm_prefix: f64,
    pass: bool,
}

fn witness_row(w: &NonBasisWitness) -> WitnessRow {
    WitnessRow {
        nonzero_coeffs: w.nonzero_coeffs,
        synthesis_sup_norm: w.synthesis_sup_norm,
        a_norm_prefix: w.a_norm_prefix,
        pass: w.pass,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub id: String,
    pub regularity: String,
}

fn describe(r: &Regularity) -> String {
    match r {
        Regularity::Affine => "affine".into(),
        Regularity::Lipschitz { constant } => format!("lipschitz({constant})"),
        Regularity::Holder { exponent, constant } => format!("holder({exponent}, {constant})"),
        Regularity::Continuous => "continuous".into(),
    }
}

pub fn cmd_corpus_list(config: &RunConfig) -> CliResult<Artifact> {
    let rows: Vec<CorpusRow> = builtin_corpus()
        .iter()
        .map(|f| CorpusRow {
            id: f.id().to_string(),
            regularity: describe(f.regularity()),
        })
        .collect();
    #[derive(Serialize)]
    struct Payload<'a> {
        functions: &'a [CorpusRow],
    }
    artifact(
        "corpus-list",
        config,
        Format::Csv,
        Payload { functions: &rows },
        |out| rows.iter().try_for_each(|r| out.serialize(r)),
        true,
    )
}
