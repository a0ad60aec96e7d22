//! Command-line frontend: `compute`, `evolve`, `surface` and `verify`.
//!
//! Exit codes: 0 ok, 1 runtime or domain error, 2 usage error, 3 verification
//! failure. Machine-readable output always echoes the effective configuration.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::channels::p_from_time;
use crate::correlations::{concurrence, gmqd_xstate};
use crate::error::Error;
use crate::factorization::factorization_bound;
use crate::geometry::{
    export_field, export_mesh, extract_isosurface, sample_field, FieldFormat, Measure,
};
use crate::par::{with_threads, Execution};
use crate::state::{XStateParams, PSD_TOL};
use crate::verify::{
    channel_oracle_equivalence, closed_form_equivalence, formula_equivalence, unit_grid,
    verify_theorem, ChannelPair, Ensemble, VerifyConfig, SCHEMA_VERSION,
};

#[derive(Debug, Parser)]
#[command(
    name = "gmqd",
    version,
    about = "Geometric quantum discord of two-qubit X-states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discord, concurrence, spectrum and physicality of one X-state.
    Compute(ComputeArgs),
    /// Discord and factorization bound along a decoherence sweep (CSV).
    Evolve(EvolveArgs),
    /// Sample a measure over the correlation cube and extract a level surface.
    Surface(SurfaceArgs),
    /// Monte-Carlo check of the factorization bound and the equivalence suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct StateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c2: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c3: f64,
}

impl StateArgs {
    pub fn params(&self) -> XStateParams {
        XStateParams::new(self.r, self.s, self.c1, self.c2, self.c3)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ComputeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Report values for unphysical parameters instead of failing.
    #[arg(long)]
    pub allow_unphysical: bool,
    /// Tolerance on negative eigenvalues.
    #[arg(long, default_value_t = PSD_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct EvolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub state: StateArgs,
    /// Channel on qubit A and qubit B, e.g. `adc,adc` or `pdc,id`.
    #[arg(long, default_value = "adc,adc", value_parser = parse_pair)]
    #[serde(serialize_with = "serialize_display")]
    pub channels: ChannelPair,
    /// Number of sweep points.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Largest channel strength of a p sweep.
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    /// Decay rate; switches to a time sweep with `p = 1 − exp(−γt)`.
    #[arg(long, requires = "t_max")]
    pub gamma: Option<f64>,
    /// End of the time sweep.
    #[arg(long, requires = "gamma")]
    pub t_max: Option<f64>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args, Serialize)]
pub struct SurfaceArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub r: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, value_parser = parse_measure)]
    #[serde(serialize_with = "serialize_display")]
    pub measure: Measure,
    /// Samples per axis.
    #[arg(long, default_value_t = crate::geometry::DEFAULT_RESOLUTION)]
    pub n: usize,
    /// Level of the surface to extract; no mesh is written without it.
    #[arg(long, allow_negative_numbers = true)]
    pub level: Option<f64>,
    /// Field output path.
    #[arg(long, default_value = "field.csv")]
    pub out: PathBuf,
    /// Field format; defaults to JSON for `.json` paths and CSV otherwise.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Mesh output path; defaults to the field path with an `.obj` extension.
    #[arg(long)]
    pub mesh_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// States per ensemble.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 2012)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Points of the uniform p grid on [0, 1].
    #[arg(long, default_value_t = 11)]
    pub p_steps: usize,
    /// Channel pair to check; repeat for several. Defaults to
    /// pdc,pdc dpc,dpc pdc,dpc pdc,id dpc,id adc,adc.
    #[arg(long = "channels", value_parser = parse_pair)]
    pub channels: Vec<ChannelPair>,
    /// Sample only Bell-diagonal states.
    #[arg(long)]
    pub bell_diagonal_only: bool,
    /// States per channel kind for the Kraus-oracle comparison.
    #[arg(long, default_value_t = 1000)]
    pub oracle_samples: usize,
    /// Worker threads; does not affect the output.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> Result<ChannelPair, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_measure(s: &str) -> Result<Measure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Runtime(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) | CliError::Runtime(_) => 1,
        }
    }
}

/// Result of a successful command run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::VerificationFailed => 3,
        }
    }
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<Status, CliError> {
    match cli.command {
        Command::Compute(args) => cmd_compute(&args, stdout),
        Command::Evolve(args) => cmd_evolve(&args, stdout),
        Command::Surface(args) => cmd_surface(&args, stdout),
        Command::Verify(args) => cmd_verify(&args, stdout),
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| {
        CliError::Runtime(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn stdout_error(source: std::io::Error) -> CliError {
    CliError::Runtime(Error::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn emit_json(
    value: &serde_json::Value,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(io_error(path)),
        None => writeln!(stdout, "{text}").map_err(stdout_error),
    }
}

fn check_state(state: &XStateParams, tol: f64, allow_unphysical: bool) -> Result<bool, CliError> {
    let physical = state.is_physical(tol);
    if !physical && !allow_unphysical {
        return Err(CliError::Domain(format!(
            "state {state:?} is unphysical (min eigenvalue {:e}); pass --allow-unphysical to report anyway",
            state.min_eigenvalue()
        )));
    }
    Ok(physical)
}

pub fn cmd_compute(args: &ComputeArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    if args.tol.is_nan() || args.tol < 0.0 {
        return Err(CliError::Usage("--tol must be non-negative".into()));
    }
    let state = args.state.params();
    let physical = check_state(&state, args.tol, args.allow_unphysical)?;
    let concurrence = concurrence(&state.to_density()).ok();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "compute",
        "config": args,
        "gmqd": gmqd_xstate(&state),
        "concurrence": concurrence,
        "eigenvalues": state.eigenvalues(),
        "physical": physical,
    });
    emit_json(&doc, None, stdout)?;
    Ok(Status::Ok)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveRow {
    pub p: f64,
    pub t: Option<f64>,
    pub gmqd: f64,
    pub bound: f64,
}

/// The sweep behind `evolve`: discord of the evolved state and the
/// factorization bound at each point.
pub fn evolve_rows(args: &EvolveArgs) -> Result<Vec<EvolveRow>, CliError> {
    if args.steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    if !(0.0..=1.0).contains(&args.p_max) {
        return Err(CliError::Usage("--p-max must lie in [0, 1]".into()));
    }
    let state = args.state.params();
    check_state(&state, PSD_TOL, false)?;
    let last = (args.steps - 1) as f64;
    (0..args.steps)
        .map(|k| {
            let (p, t) = match (args.gamma, args.t_max) {
                (Some(gamma), Some(t_max)) => {
                    let t = t_max * k as f64 / last;
                    (
                        p_from_time(gamma, t).map_err(|e| CliError::Usage(e.to_string()))?,
                        Some(t),
                    )
                }
                _ => (args.p_max * k as f64 / last, None),
            };
            let (a, b) = args.channels.transfers(p, p)?;
            let bound = factorization_bound(&state, &a, &b);
            Ok(EvolveRow {
                p,
                t,
                gmqd: bound.lhs,
                bound: bound.rhs,
            })
        })
        .collect()
}

pub fn cmd_evolve(args: &EvolveArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let rows = evolve_rows(args)?;
    let config = json!({ "schema_version": SCHEMA_VERSION, "command": "evolve", "config": args });
    let mut text = format!("# {config}\np,t,gmqd,bound\n");
    for row in rows {
        let t = row.t.map(|t| t.to_string()).unwrap_or_default();
        text.push_str(&format!("{},{},{},{}\n", row.p, t, row.gmqd, row.bound));
    }
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(io_error(path))?,
        None => stdout.write_all(text.as_bytes()).map_err(stdout_error)?,
    }
    Ok(Status::Ok)
}

pub fn cmd_surface(args: &SurfaceArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    if args.n < 2 {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    if args.level.is_some_and(|l| !l.is_finite()) {
        return Err(CliError::Usage("--level must be finite".into()));
    }
    let exec = Execution::default();
    let field = sample_field(args.r, args.s, args.measure, args.n, exec)?;
    let format = match args.format {
        Some(FormatArg::Csv) => FieldFormat::Csv,
        Some(FormatArg::Json) => FieldFormat::Json,
        None => FieldFormat::from_path(&args.out),
    };
    export_field(&field, &args.out, format)?;

    let mesh = match args.level {
        Some(level) => {
            let mesh = extract_isosurface(&field, level, exec);
            let path = args
                .mesh_out
                .clone()
                .unwrap_or_else(|| args.out.with_extension("obj"));
            export_mesh(&mesh, &path)?;
            json!({
                "path": path,
                "level": level,
                "vertices": mesh.vertices.len(),
                "triangles": mesh.triangles.len(),
            })
        }
        None => serde_json::Value::Null,
    };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "surface",
        "config": args,
        "field": {
            "path": args.out,
            "finite_samples": field.values.iter().filter(|v| v.is_finite()).count(),
        },
        "mesh": mesh,
    });
    emit_json(&doc, None, stdout)?;
    Ok(Status::Ok)
}

impl VerifyArgs {
    pub fn config(&self) -> Result<VerifyConfig, CliError> {
        if self.samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        if self.p_steps == 0 {
            return Err(CliError::Usage("--p-steps must be at least 1".into()));
        }
        if self.oracle_samples == 0 {
            return Err(CliError::Usage(
                "--oracle-samples must be at least 1".into(),
            ));
        }
        let config = VerifyConfig {
            n_states: self.samples,
            p_grid: unit_grid(self.p_steps),
            pairs: if self.channels.is_empty() {
                ChannelPair::defaults()
            } else {
                self.channels.clone()
            },
            ensembles: if self.bell_diagonal_only {
                vec![Ensemble::BellDiagonal]
            } else {
                vec![Ensemble::XStates, Ensemble::BellDiagonal]
            },
            seed: self.seed,
            tol: self.tol,
            ..VerifyConfig::default()
        };
        config
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(config)
    }
}

/// Full verification document; identical for every thread count.
pub fn verify_document(args: &VerifyArgs) -> Result<(serde_json::Value, bool), CliError> {
    let config = args.config()?;
    let exec = Execution::default();
    with_threads(args.threads, || -> Result<_, CliError> {
        let report = verify_theorem(&config, exec)?;
        let formulas = formula_equivalence(config.n_states, config.seed, config.tol, exec);
        let closed = closed_form_equivalence(
            config.n_states,
            config.seed,
            &config.p_grid,
            config.tol,
            exec,
        )?;
        let oracle =
            channel_oracle_equivalence(args.oracle_samples, config.seed, config.tol, exec)?;
        let passed = report.passed() && formulas.passed && closed.passed && oracle.passed;
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": "verify",
            "config": {
                "samples": config.n_states,
                "seed": config.seed,
                "tol": config.tol,
                "p_grid": config.p_grid,
                "channels": config.pairs,
                "ensembles": config.ensembles,
                "oracle_samples": args.oracle_samples,
            },
            "passed": passed,
            "factorization": report,
            "formula_equivalence": formulas,
            "closed_form_equivalence": closed,
            "oracle_equivalence": oracle,
        });
        Ok((doc, passed))
    })
    .map_err(|e| CliError::Usage(e.to_string()))?
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<Status, CliError> {
    let (doc, passed) = verify_document(args)?;
    emit_json(&doc, args.out.as_deref(), stdout)?;
    Ok(if passed {
        Status::Ok
    } else {
        Status::VerificationFailed
    })
}
