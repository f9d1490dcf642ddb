//! Command-line front end: argument model, command runners and output
//! formatting. The binary in `src/bin/infoorder.rs` is a thin wrapper.

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::context::{contextual_distance_with_tol, qubit_distance_curve};
use crate::measures::{verify_axioms, MeasurementFn};
use crate::poset::{PosetError, PosetFile};
use crate::quantum::{run_sequence, BasisFile, BlochAxis, NBasis, QuantumError, QubitState};
use crate::sims::{boxes_experiment, determinism_check, qubit_experiment, SimError};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRIALS: u64 = 10_000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Input(_) => EXIT_INPUT,
            CliError::Resource(_) => EXIT_RESOURCE,
            CliError::Output(_) => EXIT_CHECK_FAILED,
        }
    }
}

impl From<PosetError> for CliError {
    fn from(e: PosetError) -> Self {
        match e {
            PosetError::SizeLimit { .. } => CliError::Resource(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<QuantumError> for CliError {
    fn from(e: QuantumError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::NoTrials | SimError::InvalidEpsilon(_) => CliError::Config(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser, Serialize)]
#[command(
    name = "infoorder",
    version,
    about = "Information orders, entropy measures and basis contextuality"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Root seed for every randomized computation.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Trials (or samples, for `axioms`).
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,

    /// Classification tolerance for contextual distances, in bits.
    #[arg(long, global = true, default_value_t = crate::context::CONTEXT_TOL)]
    pub tolerance: f64,

    /// Entropy threshold (bits) for the approximately-deterministic verdict.
    #[arg(long, global = true, default_value_t = crate::sims::DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Also write the result to this file (atomically).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// Randomized entropy-axiom checks for Shannon, Hartley and a mixture.
    Axioms,
    /// Analyze a poset file: maximal and compact elements, way-below
    /// relation, directed completeness and the context proposition.
    Poset {
        file: PathBuf,
        /// Write the Hasse diagram in DOT format to this path.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Contextual distance between two bases: `z`, `x`, `y`, `-z`, a
    /// `theta,phi` pair, or a JSON basis file.
    Context {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Qubit contextual distance on an evenly spaced angle grid.
    Sweep {
        #[arg(long, default_value_t = 0.0)]
        start: f64,
        #[arg(long, default_value_t = PI / 2.0)]
        stop: f64,
        #[arg(long, default_value_t = 19)]
        points: usize,
    },
    /// Search boxes for a ball by elimination.
    Boxes {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        ball: usize,
        /// Comma-separated opening order; defaults to 0,1,...,n-1.
        #[arg(long)]
        order: Option<String>,
    },
    /// Sequential spin measurements.
    Qubit {
        #[arg(long, default_value = "z", allow_hyphen_values = true)]
        input: String,
        /// Measurement axes, e.g. `z,x,z,x` or `0.5,1.0 z`.
        #[arg(long, num_args = 1.., required = true)]
        axes: Vec<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Axioms => "axioms",
            Command::Poset { .. } => "poset",
            Command::Context { .. } => "context",
            Command::Sweep { .. } => "sweep",
            Command::Boxes { .. } => "boxes",
            Command::Qubit { .. } => "qubit",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Cli,
    pub payload: Value,
    /// Not part of the reproducible payload.
    pub duration_ms: f64,
}

/// Everything a command produces.
#[derive(Debug, Clone)]
pub struct Output {
    pub document: ResultDocument,
    pub csv: Option<String>,
    pub exit_code: i32,
    /// Extra files to write (DOT export).
    pub side_files: Vec<(PathBuf, String)>,
}

impl Output {
    /// The text printed to stdout and written to `--out`.
    pub fn rendered(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                Ok(serde_json::to_string_pretty(&self.document).expect("serializable") + "\n")
            }
            Format::Csv => self.csv.clone().ok_or_else(|| {
                CliError::Config(format!(
                    "`{}` has no CSV output",
                    self.document.config.command.name()
                ))
            }),
        }
    }
}

/// Formats with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 {
            format!("{:.11}", 0.0)
        } else {
            x.to_string()
        };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn joined(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt_sig(v))
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses one or more axis arguments. An argument is either a single
/// `theta,phi` pair or a comma-separated list of named axes.
pub fn parse_axes(args: &[String]) -> Result<Vec<BlochAxis>, QuantumError> {
    let mut out = Vec::new();
    for arg in args {
        let parts: Vec<&str> = arg.split(',').map(str::trim).collect();
        let numeric_pair = parts.len() == 2 && parts.iter().all(|p| p.parse::<f64>().is_ok());
        if numeric_pair {
            out.push(BlochAxis::parse(arg)?);
        } else {
            for p in parts.into_iter().filter(|p| !p.is_empty()) {
                out.push(BlochAxis::parse(p)?);
            }
        }
    }
    if out.is_empty() {
        return Err(QuantumError::EmptyAxes);
    }
    Ok(out)
}

fn parse_basis(arg: &str) -> Result<NBasis, CliError> {
    if let Ok(axis) = BlochAxis::parse(arg) {
        return Ok(NBasis::qubit(&axis));
    }
    let text = std::fs::read_to_string(arg).map_err(|e| {
        CliError::Input(format!(
            "`{arg}` is neither an axis nor a readable basis file: {e}"
        ))
    })?;
    let file: BasisFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    Ok(file.into_basis()?)
}

fn parse_order(order: &str) -> Result<Vec<usize>, CliError> {
    order
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Input(format!("bad box index `{s}` in opening order")))
        })
        .collect()
}

fn validate(cli: &Cli) -> Result<(), CliError> {
    if cli.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    if !cli.tolerance.is_finite() || cli.tolerance <= 0.0 {
        return Err(CliError::Config("--tolerance must be positive".into()));
    }
    if !cli.epsilon.is_finite() || cli.epsilon < 0.0 {
        return Err(CliError::Config("--epsilon must be nonnegative".into()));
    }
    if cli.format == Format::Csv && matches!(cli.command, Command::Poset { .. }) {
        return Err(CliError::Config("`poset` has no CSV output".into()));
    }
    Ok(())
}

struct Produced {
    payload: Value,
    csv: Option<String>,
    exit_code: i32,
    side_files: Vec<(PathBuf, String)>,
}

impl Produced {
    fn new(payload: Value, csv: Option<String>) -> Self {
        Self {
            payload,
            csv,
            exit_code: EXIT_OK,
            side_files: Vec::new(),
        }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    validate(cli)?;
    let started = Instant::now();
    let produced = match &cli.command {
        Command::Axioms => cmd_axioms(cli)?,
        Command::Poset { file, dot } => cmd_poset(file, dot.as_deref())?,
        Command::Context { a, b } => cmd_context(cli, a, b)?,
        Command::Sweep {
            start,
            stop,
            points,
        } => cmd_sweep(*start, *stop, *points)?,
        Command::Boxes { n, ball, order } => cmd_boxes(cli, *n, *ball, order.as_deref())?,
        Command::Qubit { input, axes } => cmd_qubit(cli, input, axes)?,
    };
    Ok(Output {
        document: ResultDocument {
            tool: "infoorder",
            version: env!("CARGO_PKG_VERSION"),
            config: cli.clone(),
            payload: produced.payload,
            duration_ms: started.elapsed().as_secs_f64() * 1e3,
        },
        csv: produced.csv,
        exit_code: produced.exit_code,
        side_files: produced.side_files,
    })
}

fn cmd_axioms(cli: &Cli) -> Result<Produced, CliError> {
    let samples =
        usize::try_from(cli.trials).map_err(|_| CliError::Config("--trials too large".into()))?;
    let measures = [
        MeasurementFn::Shannon,
        MeasurementFn::Hartley,
        MeasurementFn::linear_combo(0.5, 0.5).expect("valid weights"),
    ];
    let reports: Vec<_> = measures
        .iter()
        .map(|m| verify_axioms(m, samples, cli.seed).map_err(|e| CliError::Config(e.to_string())))
        .collect::<Result<_, _>>()?;
    let shannon_ok = reports[0].all_pass();
    let mut rows = Vec::new();
    for r in &reports {
        for (axiom, check) in [
            ("expansibility", &r.expansibility),
            ("symmetry", &r.symmetry),
            ("subadditivity", &r.subadditivity),
            ("additivity", &r.additivity),
            ("normalization", &r.normalization),
            ("monotone_on_bayesian", &r.monotone_on_bayesian),
        ] {
            rows.push(vec![
                r.measure.clone(),
                axiom.to_string(),
                check.passed.to_string(),
            ]);
        }
    }
    let mut p = Produced::new(
        json!({ "shannon_all_pass": shannon_ok, "reports": reports }),
        Some(csv_table(&["measure", "axiom", "passed"], rows)),
    );
    if !shannon_ok {
        p.exit_code = EXIT_CHECK_FAILED;
    }
    Ok(p)
}

fn cmd_poset(file: &Path, dot: Option<&Path>) -> Result<Produced, CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let spec: PosetFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", file.display())))?;
    let poset = spec.into_poset()?;
    let report = poset.analyze()?;
    let way_below = poset.way_below_relation()?.rows();
    let mut payload = json!({
        "elements": poset.labels(),
        "covers": poset.to_file().covers,
        "report": report,
        "way_below": way_below,
    });
    let mut p = Produced::new(Value::Null, None);
    if let Some(path) = dot {
        let rendered = poset.to_dot();
        payload["dot"] = Value::String(rendered.clone());
        p.side_files.push((path.to_path_buf(), rendered));
    }
    p.payload = payload;
    Ok(p)
}

fn cmd_context(cli: &Cli, a: &str, b: &str) -> Result<Produced, CliError> {
    let (ba, bb) = (parse_basis(a)?, parse_basis(b)?);
    let report = contextual_distance_with_tol(&ba, &bb, cli.tolerance)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let csv = csv_table(
        &["value_bits", "sup_bits", "classification", "normalized"],
        [vec![
            fmt_sig(report.value_bits),
            fmt_sig(report.sup_bits),
            format!("{:?}", report.classification),
            fmt_sig(report.normalized),
        ]],
    );
    Ok(Produced::new(
        json!({ "a": a, "b": b, "report": report }),
        Some(csv),
    ))
}

fn cmd_sweep(start: f64, stop: f64, points: usize) -> Result<Produced, CliError> {
    if points < 2
        || !(0.0..=PI / 2.0).contains(&start)
        || !(0.0..=PI / 2.0).contains(&stop)
        || start >= stop
    {
        return Err(CliError::Config(
            "sweep needs 0 <= start < stop <= pi/2 and at least 2 points".into(),
        ));
    }
    let step = (stop - start) / (points - 1) as f64;
    let grid: Vec<f64> = (0..points)
        .map(|i| {
            if i + 1 == points {
                stop
            } else {
                start + step * i as f64
            }
        })
        .collect();
    let curve = qubit_distance_curve(&grid);
    let csv = csv_table(
        &["theta_radians", "value_bits"],
        curve.iter().map(|&(t, v)| vec![fmt_sig(t), fmt_sig(v)]),
    );
    let rows: Vec<Value> = curve
        .iter()
        .map(|&(t, v)| json!({ "theta_radians": t, "value_bits": v }))
        .collect();
    Ok(Produced::new(json!({ "curve": rows }), Some(csv)))
}

fn cmd_boxes(cli: &Cli, n: usize, ball: usize, order: Option<&str>) -> Result<Produced, CliError> {
    let order = match order {
        Some(o) => parse_order(o)?,
        None => (0..n).collect(),
    };
    let trace = boxes_experiment(n, ball, &order)?;
    let verdict = determinism_check(&trace, cli.epsilon)?;
    let csv = csv_table(
        &[
            "step",
            "box_or_axis",
            "outcome",
            "entropy_bits",
            "state_components",
        ],
        trace.steps.iter().enumerate().map(|(k, s)| {
            vec![
                k.to_string(),
                s.opened_box
                    .map_or_else(|| "-".to_string(), |b| b.to_string()),
                match (s.opened_box, s.found) {
                    (None, _) => "start".to_string(),
                    (Some(_), true) => "found".to_string(),
                    (Some(_), false) => "empty".to_string(),
                },
                fmt_sig(s.entropy_bits),
                joined(s.state.probs()),
            ]
        }),
    );
    Ok(Produced::new(
        json!({ "trace": trace, "determinism": verdict }),
        Some(csv),
    ))
}

fn cmd_qubit(cli: &Cli, input: &str, axes: &[String]) -> Result<Produced, CliError> {
    let input_axis = BlochAxis::parse(input)?;
    let input_state = QubitState::along(&input_axis, crate::quantum::Outcome::Plus);
    let axes = parse_axes(axes)?;
    let aggregate = qubit_experiment(&input_state, &axes, cli.trials, cli.seed)?;
    let verdict = determinism_check(&aggregate, cli.epsilon)?;
    // Trial 0 of the aggregate, for the trace CSV.
    let sample = run_sequence(&input_state, &axes, cli.seed)?;
    let csv = csv_table(
        &[
            "step",
            "box_or_axis",
            "outcome",
            "entropy_bits",
            "state_components",
        ],
        sample.steps.iter().enumerate().map(|(k, s)| {
            vec![
                (k + 1).to_string(),
                joined(&[s.axis.theta(), s.axis.phi()]),
                s.outcome.sign().to_string(),
                fmt_sig(aggregate.per_step_entropy_bits[k]),
                joined(&s.post_state.bloch()),
            ]
        }),
    );
    Ok(Produced::new(
        json!({
            "input": input,
            "axes": axes,
            "aggregate": aggregate,
            "determinism": verdict,
            "sample_trace": sample,
        }),
        Some(csv),
    ))
}

/// Writes `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
