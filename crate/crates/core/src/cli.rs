//! The `curvlab` command line.
//!
//! Exit codes: 0 pass, 1 negative verdict, 2 usage or configuration error,
//! 3 unreliable numerics.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::acceptance;
use crate::classify::{
    classify_rank2, fit_C, reconstruct_phi, ClassifyError, FitReport, Rank2Class, ReconstructConfig,
};
use crate::geometry::{verify_model, GeometryError, ModelConfig, ModelReport, VerifyOptions};
use crate::io::{
    read_tensor, read_text, to_json, write_text, IoError, MapJson, TensorFile, SCHEMA,
};
use crate::probe::{probe, ProbeError, ProbeMode, ProbeReport, Verdict};
use crate::pseudo::CausalType;
use crate::tol::Tolerances;
use crate::zoo::{catalogue, example_zoo};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNRELIABLE: i32 = 3;

const DEFAULT_PROBE_SAMPLES: usize = 1000;
const DEFAULT_FIT_SAMPLES: usize = 64;

#[derive(Debug, Parser)]
#[command(
    name = "curvlab",
    version,
    about = "Algebraic curvature tensors on indefinite inner-product spaces"
)]
pub struct Cli {
    /// Master seed of every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random samples (planes for probe and fit, planes per class for verify).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Relative rank threshold.
    #[arg(long, global = true)]
    pub tol_rank: Option<f64>,
    /// Eigenvalue clustering radius, relative to the operator scale.
    #[arg(long, global = true)]
    pub tol_cluster: Option<f64>,
    /// Finite-difference step for verify.
    #[arg(long, global = true)]
    pub fd_step: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the output here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    CsvSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlaneClass {
    Spacelike,
    Timelike,
    Mixed,
}

impl From<PlaneClass> for CausalType {
    fn from(c: PlaneClass) -> Self {
        match c {
            PlaneClass::Spacelike => CausalType::Spacelike,
            PlaneClass::Timelike => CausalType::Timelike,
            PlaneClass::Mixed => CausalType::Mixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rank,
    Jordan,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a named example tensor.
    Gen {
        name: String,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        /// Parameter of nilpotent-phik (default q).
        #[arg(long)]
        k: Option<usize>,
        /// Store all n⁴ components instead of the construction.
        #[arg(long)]
        dense: bool,
    },
    /// Probe the operator rank or Jordan form over random planes of a class.
    Probe {
        tensor: PathBuf,
        #[arg(long, value_enum)]
        class: PlaneClass,
        #[arg(long, value_enum, default_value = "rank")]
        mode: Mode,
    },
    /// Sort a tensor into isometry, para-isometry, nilpotent or none.
    Classify { tensor: PathBuf },
    /// Fit the constant C with Tr(R(π)²) = −2C².
    Fit { tensor: PathBuf },
    /// Check a model geometry against its closed-form curvature.
    Verify {
        config: PathBuf,
        /// Number of generated points when the config lists none.
        #[arg(long)]
        points: Option<usize>,
        /// Accepted relative residual.
        #[arg(long, default_value_t = 1e-5)]
        threshold: f64,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Criterion id, name (or part of one), or group.
        #[arg(long)]
        filter: Option<String>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.to_string(),
        }
    }

    fn unreliable(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_UNRELIABLE,
            message: message.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::config(e)
    }
}

struct Output {
    text: String,
    code: i32,
}

fn help_footer() -> String {
    let mut s = String::from("Examples (gen):\n");
    for (name, aliases, summary) in catalogue() {
        let alias = if aliases.is_empty() {
            String::new()
        } else {
            format!(" (alias {})", aliases.join(", "))
        };
        s.push_str(&format!("  {name}{alias}\n      {summary}\n"));
    }
    s.push_str(
        "\nExit codes:\n  0  pass or constant verdict\n  1  negative verdict\n  \
         2  usage or configuration error\n  3  unreliable numerics\n",
    );
    s
}

pub fn command() -> clap::Command {
    Cli::command().after_help(help_footer())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match command()
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    EXIT_PASS
                }
                _ => EXIT_CONFIG,
            };
        }
    };
    let result = execute(&cli).and_then(|o| {
        match &cli.output {
            Some(path) => write_text(path, &o.text)?,
            None => {
                let _ = out.write_all(o.text.as_bytes());
            }
        }
        Ok(o.code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn tolerances(cli: &Cli, base: Tolerances) -> Result<Tolerances, Failure> {
    let mut t = base;
    if let Some(r) = cli.tol_rank {
        t.rank = r;
    }
    if let Some(c) = cli.tol_cluster {
        t.cluster = c;
    }
    for (name, v) in [("--tol-rank", t.rank), ("--tol-cluster", t.cluster)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Failure::config(format!(
                "{name} must lie in (0, 1), got {v}"
            )));
        }
    }
    Ok(t)
}

fn samples(cli: &Cli, default: usize) -> Result<usize, Failure> {
    match cli.samples {
        Some(0) => Err(Failure::config("--samples must be at least 1")),
        Some(n) => Ok(n),
        None => Ok(default),
    }
}

fn execute(cli: &Cli) -> Result<Output, Failure> {
    tolerances(cli, Tolerances::default())?;
    samples(cli, 1)?;
    match &cli.command {
        Command::Gen {
            name,
            p,
            q,
            k,
            dense,
        } => gen(cli, name, *p, *q, *k, *dense),
        Command::Probe {
            tensor,
            class,
            mode,
        } => cmd_probe(cli, tensor, (*class).into(), *mode),
        Command::Classify { tensor } => classify(cli, tensor),
        Command::Fit { tensor } => fit(cli, tensor),
        Command::Verify {
            config,
            points,
            threshold,
        } => verify(cli, config, *points, *threshold),
        Command::Selftest { filter } => selftest(cli, filter.as_deref()),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        let fields: Vec<String> = r.iter().map(|f| csv_field(f)).collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

fn gen(
    cli: &Cli,
    name: &str,
    p: usize,
    q: usize,
    k: Option<usize>,
    dense: bool,
) -> Result<Output, Failure> {
    let entry = example_zoo(name, p, q, k).map_err(Failure::config)?;
    let mut file = TensorFile::from_entry(&entry);
    if dense {
        file.body = TensorFile::dense(&entry.tensor).body;
    }
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&file),
        Format::CsvSummary => csv(
            &["name", "p", "q", "max_abs"],
            &[vec![
                entry.name.to_string(),
                p.to_string(),
                q.to_string(),
                entry.tensor.max_abs().to_string(),
            ]],
        ),
    };
    Ok(Output {
        text,
        code: EXIT_PASS,
    })
}

#[derive(Serialize)]
struct ProbeOutput<'a> {
    schema: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    #[serde(flatten)]
    report: &'a ProbeReport,
}

fn verdict_code(v: &Verdict) -> i32 {
    match v {
        Verdict::ConstantRank { .. } | Verdict::JordanConstant { .. } => EXIT_PASS,
        Verdict::NonConstantRank | Verdict::JordanNonConstant => EXIT_NEGATIVE,
        Verdict::Unreliable { .. } => EXIT_UNRELIABLE,
    }
}

fn cmd_probe(cli: &Cli, path: &Path, class: CausalType, mode: Mode) -> Result<Output, Failure> {
    let loaded = read_tensor(path)?;
    let tol = tolerances(cli, Tolerances::default())?;
    let mode = match mode {
        Mode::Rank => ProbeMode::Rank,
        Mode::Jordan => ProbeMode::Jordan,
    };
    let report = probe(
        &loaded.tensor,
        class,
        samples(cli, DEFAULT_PROBE_SAMPLES)?,
        mode,
        cli.seed,
        &tol,
        &loaded.witnesses,
    )
    .map_err(|e| match e {
        ProbeError::RetryExhausted { .. } => Failure::unreliable(e),
        _ => Failure::config(e),
    })?;
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&ProbeOutput {
            schema: SCHEMA,
            name: loaded.name.as_deref(),
            report: &report,
        }),
        Format::CsvSummary => {
            let structure = match &report.verdict {
                Verdict::JordanConstant { structure } => {
                    serde_json::to_string(structure).expect("structures serialize")
                }
                _ => String::new(),
            };
            let ranks: Vec<String> = report
                .rank_histogram
                .iter()
                .map(|(r, n)| format!("{r}:{n}"))
                .collect();
            csv(
                &["class", "samples", "verdict", "ranks", "structure"],
                &[vec![
                    class.to_string(),
                    report.samples.to_string(),
                    report.verdict.name().to_string(),
                    ranks.join(" "),
                    structure,
                ]],
            )
        }
    };
    Ok(Output {
        text,
        code: verdict_code(&report.verdict),
    })
}

#[derive(Serialize)]
struct ClassifyProvenance {
    seed: u64,
    fit_samples: usize,
    tolerances: Tolerances,
}

#[derive(Serialize)]
struct ClassifyOutput {
    schema: u32,
    class: Rank2Class,
    /// Where `(φ, C)` came from: `"file"`, or the reconstruction route.
    source: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(rename = "C")]
    c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<MapJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    provenance: ClassifyProvenance,
}

fn classify(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let loaded = read_tensor(path)?;
    let tol = tolerances(cli, Tolerances::default())?;
    let fit_samples = samples(cli, ReconstructConfig::default().fit_samples)?;
    let provenance = ClassifyProvenance {
        seed: cli.seed,
        fit_samples,
        tolerances: tol,
    };
    let (phi, c, source, residual) = match loaded.phi {
        Some((phi, c)) => (phi, c, "file".to_string(), None),
        None => {
            let cfg = ReconstructConfig {
                tol,
                seed: cli.seed,
                fit_samples,
                ..ReconstructConfig::default()
            };
            match reconstruct_phi(&loaded.tensor, &cfg) {
                Ok(rec) => (rec.phi, rec.c, rec.method.to_string(), Some(rec.residual)),
                Err(ClassifyError::NotDecomposable(reason)) => {
                    let out = ClassifyOutput {
                        schema: SCHEMA,
                        class: Rank2Class::NotRank2JordanIp { reason },
                        source: "reconstruction".into(),
                        c: None,
                        phi: None,
                        residual: None,
                        provenance,
                    };
                    return Ok(classify_output(cli, &out));
                }
                Err(e) => return Err(Failure::unreliable(e)),
            }
        }
    };
    let out = ClassifyOutput {
        schema: SCHEMA,
        class: classify_rank2(&phi, c, &tol),
        source,
        c: Some(c),
        phi: Some(MapJson::from(&phi)),
        residual,
        provenance,
    };
    Ok(classify_output(cli, &out))
}

fn classify_output(cli: &Cli, out: &ClassifyOutput) -> Output {
    let code = match out.class {
        Rank2Class::NotRank2JordanIp { .. } => EXIT_NEGATIVE,
        _ => EXIT_PASS,
    };
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(out),
        Format::CsvSummary => csv(
            &["class", "C", "residual"],
            &[vec![
                out.class.name().to_string(),
                out.c.map(|c| c.to_string()).unwrap_or_default(),
                out.residual.map(|r| r.to_string()).unwrap_or_default(),
            ]],
        ),
    };
    Output { text, code }
}

#[derive(Serialize)]
struct FitOutput {
    schema: u32,
    #[serde(flatten)]
    fit: FitReport,
    consistent: bool,
    seed: u64,
    tolerances: Tolerances,
}

fn fit(cli: &Cli, path: &Path) -> Result<Output, Failure> {
    let loaded = read_tensor(path)?;
    let tol = tolerances(cli, Tolerances::default())?;
    let n = samples(cli, DEFAULT_FIT_SAMPLES)?;
    let report = match fit_C(&loaded.tensor, n, cli.seed, &tol) {
        Ok(r) => r,
        Err(e @ ClassifyError::NegativeTraceSquare { .. }) => {
            return Err(Failure {
                code: EXIT_NEGATIVE,
                message: e.to_string(),
            })
        }
        Err(ClassifyError::Probe(e @ ProbeError::UnachievableClass { .. })) => {
            return Err(Failure::config(e))
        }
        Err(e) => return Err(Failure::unreliable(e)),
    };
    let out = FitOutput {
        schema: SCHEMA,
        fit: report,
        consistent: report.is_consistent(),
        seed: cli.seed,
        tolerances: tol,
    };
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&out),
        Format::CsvSummary => csv(
            &["C", "std_dev", "samples", "consistent"],
            &[vec![
                report.c.to_string(),
                report.std_dev.to_string(),
                report.samples.to_string(),
                out.consistent.to_string(),
            ]],
        ),
    };
    Ok(Output {
        text,
        code: if out.consistent {
            EXIT_PASS
        } else {
            EXIT_NEGATIVE
        },
    })
}

fn geometry_failure(e: GeometryError) -> Failure {
    match e {
        GeometryError::Curvature(_) | GeometryError::Classify(_) | GeometryError::Probe(_) => {
            Failure::unreliable(e)
        }
        _ => Failure::config(e),
    }
}

fn verify(
    cli: &Cli,
    path: &Path,
    points: Option<usize>,
    threshold: f64,
) -> Result<Output, Failure> {
    let cfg: ModelConfig = serde_json::from_str(&read_text(path)?).map_err(IoError::from)?;
    let defaults = VerifyOptions::default();
    if !(threshold > 0.0) {
        return Err(Failure::config(format!(
            "--threshold must be positive, got {threshold}"
        )));
    }
    if points == Some(0) {
        return Err(Failure::config("--points must be at least 1"));
    }
    let opts = VerifyOptions {
        h: cli.fd_step.unwrap_or(defaults.h),
        n_points: points.unwrap_or(defaults.n_points),
        seed: cli.seed,
        probe_samples: samples(cli, defaults.probe_samples)?,
        threshold,
        tol: tolerances(cli, defaults.tol)?,
    };
    let report = verify_model(&cfg, &opts).map_err(geometry_failure)?;
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&report),
        Format::CsvSummary => verify_csv(&report),
    };
    Ok(Output {
        text,
        code: if report.pass {
            EXIT_PASS
        } else {
            EXIT_NEGATIVE
        },
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn verify_csv(r: &ModelReport) -> String {
    let rows: Vec<Vec<String>> = r
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            vec![
                r.kind.clone(),
                i.to_string(),
                p.residual.to_string(),
                opt(p.measured),
                opt(p.closed_form),
                opt(p.gauss_residual),
                r.pass.to_string(),
            ]
        })
        .collect();
    csv(
        &[
            "kind",
            "point",
            "residual",
            "measured",
            "closed_form",
            "gauss_residual",
            "pass",
        ],
        &rows,
    )
}

#[derive(Serialize)]
struct SelftestOutput<'a> {
    schema: u32,
    pass: bool,
    criteria: &'a [acceptance::Outcome],
}

fn selftest(cli: &Cli, filter: Option<&str>) -> Result<Output, Failure> {
    if let Some(f) = filter {
        if !acceptance::CRITERIA
            .iter()
            .any(|c| acceptance::selects(c, f))
        {
            return Err(Failure::config(format!("no criterion matches `{f}`")));
        }
    }
    let outcomes = acceptance::run(filter);
    let pass = outcomes.iter().all(|o| o.pass);
    let text = match cli.format {
        Some(Format::Json) => to_json(&SelftestOutput {
            schema: SCHEMA,
            pass,
            criteria: &outcomes,
        }),
        Some(Format::CsvSummary) => csv(
            &["id", "name", "group", "pass"],
            &outcomes
                .iter()
                .map(|o| {
                    vec![
                        o.id.to_string(),
                        o.name.to_string(),
                        o.group.to_string(),
                        o.pass.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        None => selftest_table(&outcomes, pass),
    };
    Ok(Output {
        text,
        code: if pass { EXIT_PASS } else { EXIT_NEGATIVE },
    })
}

fn clipped(s: &str, max: usize) -> String {
    match s.char_indices().nth(max) {
        Some((i, _)) => format!("{}…", &s[..i]),
        None => s.to_string(),
    }
}

fn selftest_table(outcomes: &[acceptance::Outcome], pass: bool) -> String {
    let mut s = String::new();
    for o in outcomes {
        s.push_str(&format!(
            "{:>2}  {:<22} {:<9} {}\n",
            o.id,
            o.name,
            o.group,
            if o.pass { "PASS" } else { "FAIL" }
        ));
        for c in o.failures() {
            s.push_str(&format!(
                "      failed: {}: {}\n",
                c.label,
                clipped(&c.detail, 300)
            ));
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    s.push_str(&format!(
        "{passed}/{} criteria passed{}\n",
        outcomes.len(),
        if pass { "" } else { " (FAIL)" }
    ));
    s
}
