//! Command implementations and the flag > config file > default resolution.

use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use irf_core::covariance::CovarianceError;
use irf_core::equivalence::{
    differenced_stationarity_test, negative_control, shift_invariance_test, HarnessConfig,
    InvarianceReport,
};
use irf_core::io::{
    format_float, read_path_csv, read_replicates_csv, write_path_csv, write_replicates_csv,
    CsvError,
};
use irf_core::kriging::{build_system, predict, solve_closed_form, solve_kkt, KrigingError};
use irf_core::measure::{construct_allowable, finite_difference_measure, Measure, MeasureError};
use irf_core::process::{
    empirical_structure_function, PathError, PolynomialTrend, SampledPath, TimeGrid,
};
use irf_core::spectral::{
    theoretical_structure_function, FrequencyGrid, SpectralError, SpectralModel,
    SpectralSynthesizer,
};
use irf_core::KrigingProblem;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn usage(msg: impl Into<String>) -> CliError {
        CliError::Usage(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o failure: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Usage(format!("invalid JSON: {e}"))
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Usage(format!("invalid CSV: {e}"))
    }
}

impl From<MeasureError> for CliError {
    fn from(e: MeasureError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PathError> for CliError {
    fn from(e: PathError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::NonIntegrable | SpectralError::QuadratureResidual { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<KrigingError> for CliError {
    fn from(e: KrigingError) -> Self {
        match e {
            KrigingError::SingularSystem { .. }
            | KrigingError::ConstraintResidual { .. }
            | KrigingError::NegativeVariance { .. } => CliError::Numerical(e.to_string()),
            KrigingError::Covariance(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<CovarianceError> for CliError {
    fn from(e: CovarianceError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<irf_core::equivalence::EquivalenceError> for CliError {
    fn from(e: irf_core::equivalence::EquivalenceError) -> Self {
        use irf_core::equivalence::EquivalenceError as E;
        match e {
            E::Spectral(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Optional config file: global seed/jobs plus per-command sections keyed by
/// flag names. Flags override these values; these override defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    simulate: SimulateArgs,
    #[serde(default)]
    difference: DifferenceArgs,
    #[serde(default)]
    structfn: StructfnArgs,
    #[serde(default)]
    krige: KrigeArgs,
    #[serde(default)]
    verify: VerifyArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid {what} {}: {e}", path.display())))
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("missing required --{flag}")))
}

/// Echo the fully resolved configuration next to the output file.
fn write_sidecar(out: &Path, resolved: &serde_json::Value) -> Result<(), CliError> {
    let sidecar = out.with_extension("config.json");
    fs::write(&sidecar, format!("{:#}\n", resolved))?;
    Ok(())
}

fn parse_float_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| CliError::usage(format!("cannot parse '{f}' as a number")))
        })
        .collect()
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|f| {
            f.trim()
                .parse::<i64>()
                .map_err(|_| CliError::usage(format!("cannot parse '{f}' as an integer")))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateArgs {
    /// Spectral model JSON file.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Frequency grid JSON file (default: log grid, eps 1e-4, T 1e3, n 4096).
    #[arg(long)]
    fgrid: Option<PathBuf>,
    /// Grid origin (default 0).
    #[arg(long)]
    t0: Option<f64>,
    /// Grid step (default 0.01).
    #[arg(long)]
    dt: Option<f64>,
    /// Points per path (default 1000).
    #[arg(long)]
    n: Option<usize>,
    /// Number of replicates (default 1).
    #[arg(long)]
    reps: Option<usize>,
    /// Output CSV (replicate,t,value).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SimulateArgs {
    fn merged(self, file: &SimulateArgs) -> SimulateArgs {
        SimulateArgs {
            model: self.model.or_else(|| file.model.clone()),
            fgrid: self.fgrid.or_else(|| file.fgrid.clone()),
            t0: self.t0.or(file.t0),
            dt: self.dt.or(file.dt),
            n: self.n.or(file.n),
            reps: self.reps.or(file.reps),
            out: self.out.or_else(|| file.out.clone()),
        }
    }
}

pub fn run_simulate(args: SimulateArgs, cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let args = args.merged(&cfg.simulate);
    let model_path = require(args.model, "model")?;
    let out = require(args.out, "out")?;
    let model: SpectralModel = read_json(&model_path, "model")?;
    let fgrid: FrequencyGrid = match &args.fgrid {
        Some(p) => read_json(p, "frequency grid")?,
        None => FrequencyGrid::default(),
    };
    let grid = TimeGrid {
        t0: args.t0.unwrap_or(0.0),
        dt: args.dt.unwrap_or(0.01),
        n: args.n.unwrap_or(1000),
    };
    let reps = args.reps.unwrap_or(1);
    if reps == 0 {
        return Err(CliError::usage("--reps must be at least 1"));
    }
    if !(grid.dt > 0.0) || grid.n == 0 {
        return Err(CliError::usage("need --dt > 0 and --n >= 1"));
    }

    let synth = SpectralSynthesizer::new(&model, grid, &fgrid)?;
    let paths = synth.sample_many(seed, reps);
    let mut file = fs::File::create(&out)?;
    write_replicates_csv(&mut file, &paths)?;

    write_sidecar(
        &out,
        &json!({
            "command": "simulate",
            "seed": seed,
            "t0": grid.t0,
            "dt": grid.dt,
            "n": grid.n,
            "reps": reps,
            "model": serde_json::to_value(&model)?,
            "fgrid": serde_json::to_value(&fgrid)?,
            "out": out,
        }),
    )
}

// ---------------------------------------------------------------------------
// difference

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DifferenceArgs {
    /// Input CSV, either `t,value` or `replicate,t,value`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Differencing order d.
    #[arg(long)]
    d: Option<usize>,
    /// Lag in grid steps (default 1), so iota = m * dt.
    #[arg(long)]
    m: Option<usize>,
    /// Output CSV in the same shape as the input.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl DifferenceArgs {
    fn merged(self, file: &DifferenceArgs) -> DifferenceArgs {
        DifferenceArgs {
            input: self.input.or_else(|| file.input.clone()),
            d: self.d.or(file.d),
            m: self.m.or(file.m),
            out: self.out.or_else(|| file.out.clone()),
        }
    }
}

fn load_paths(path: &Path) -> Result<(Vec<SampledPath>, bool), CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read paths {}: {e}", path.display())))?;
    let multi = text
        .lines()
        .next()
        .is_some_and(|h| h.trim().starts_with("replicate"));
    if multi {
        Ok((read_replicates_csv(BufReader::new(text.as_bytes()))?, true))
    } else {
        Ok((vec![read_path_csv(BufReader::new(text.as_bytes()))?], false))
    }
}

pub fn run_difference(args: DifferenceArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let args = args.merged(&cfg.difference);
    let input = require(args.input, "input")?;
    let d = require(args.d, "d")?;
    let out = require(args.out, "out")?;
    let m = args.m.unwrap_or(1);
    if m == 0 {
        return Err(CliError::usage("--m must be at least 1"));
    }
    let (paths, multi) = load_paths(&input)?;
    let differenced: Vec<SampledPath> = paths
        .iter()
        .map(|p| p.difference(d, m))
        .collect::<Result<_, _>>()?;
    let mut file = fs::File::create(&out)?;
    if multi {
        write_replicates_csv(&mut file, &differenced)?;
    } else {
        write_path_csv(&mut file, &differenced[0])?;
    }
    write_sidecar(
        &out,
        &json!({
            "command": "difference",
            "input": input,
            "d": d,
            "m": m,
            "out": out,
        }),
    )
}

// ---------------------------------------------------------------------------
// structfn

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructfnArgs {
    /// Replicate CSV with sample paths (enables the empirical columns).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Spectral model JSON (enables the theoretical column).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Frequency grid JSON for the quadrature.
    #[arg(long)]
    fgrid: Option<PathBuf>,
    /// Differencing order d.
    #[arg(long)]
    d: Option<usize>,
    /// Lag multiplier, iota = m * dt (default 1).
    #[arg(long)]
    m: Option<usize>,
    /// Comma-separated lags in grid steps, e.g. 0,1,2,5.
    #[arg(long)]
    lags: Option<String>,
    /// Grid step for theoretical-only mode (default 1.0).
    #[arg(long)]
    dt: Option<f64>,
    /// Output CSV `h,empirical,se,theoretical`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl StructfnArgs {
    fn merged(self, file: &StructfnArgs) -> StructfnArgs {
        StructfnArgs {
            input: self.input.or_else(|| file.input.clone()),
            model: self.model.or_else(|| file.model.clone()),
            fgrid: self.fgrid.or_else(|| file.fgrid.clone()),
            d: self.d.or(file.d),
            m: self.m.or(file.m),
            lags: self.lags.or_else(|| file.lags.clone()),
            dt: self.dt.or(file.dt),
            out: self.out.or_else(|| file.out.clone()),
        }
    }
}

pub fn run_structfn(args: StructfnArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let args = args.merged(&cfg.structfn);
    let out = require(args.out, "out")?;
    let d = require(args.d, "d")?;
    let m = args.m.unwrap_or(1);
    let lag_steps = parse_int_list(&require(args.lags, "lags")?)?;
    if lag_steps.is_empty() {
        return Err(CliError::usage("--lags must name at least one lag"));
    }
    if m == 0 {
        return Err(CliError::usage("--m must be at least 1"));
    }
    if args.input.is_none() && args.model.is_none() {
        return Err(CliError::usage("need --input paths, --model, or both"));
    }

    let loaded = match &args.input {
        Some(path) => Some(load_paths(path)?.0),
        None => None,
    };
    let empirical = match &loaded {
        Some(paths) => Some(empirical_structure_function(paths, d, m, &lag_steps)?),
        None => None,
    };

    let dt = match (&loaded, args.dt) {
        (Some(paths), _) => paths[0].dt(),
        (None, Some(dt)) if dt > 0.0 => dt,
        (None, Some(dt)) => {
            return Err(CliError::usage(format!("--dt must be positive, got {dt}")))
        }
        (None, None) => 1.0,
    };

    let theoretical = match &args.model {
        Some(path) => {
            let model: SpectralModel = read_json(path, "model")?;
            if model.order() != d {
                return Err(CliError::usage(format!(
                    "model order {} does not match --d {d}",
                    model.order()
                )));
            }
            let fgrid: FrequencyGrid = match &args.fgrid {
                Some(p) => read_json(p, "frequency grid")?,
                None => FrequencyGrid::default(),
            };
            let iota = m as f64 * dt;
            let mut values = Vec::with_capacity(lag_steps.len());
            for &lag in &lag_steps {
                values.push(theoretical_structure_function(
                    &model,
                    iota,
                    iota,
                    lag as f64 * dt,
                    &fgrid,
                )?);
            }
            Some(values)
        }
        None => None,
    };

    let mut file = fs::File::create(&out)?;
    writeln!(file, "h,empirical,se,theoretical")?;
    for (i, &lag) in lag_steps.iter().enumerate() {
        let h = lag as f64 * dt;
        let (emp, se) = match &empirical {
            Some(est) => (
                format_float(est[i].estimate),
                format_float(est[i].std_error),
            ),
            None => (String::new(), String::new()),
        };
        let theo = match &theoretical {
            Some(v) => format_float(v[i]),
            None => String::new(),
        };
        writeln!(file, "{},{},{},{}", format_float(h), emp, se, theo)?;
    }

    write_sidecar(
        &out,
        &json!({
            "command": "structfn",
            "input": args.input,
            "model": args.model,
            "d": d,
            "m": m,
            "dt": dt,
            "lags": lag_steps,
            "out": out,
        }),
    )
}

// ---------------------------------------------------------------------------
// krige

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KrigeArgs {
    /// Kriging problem JSON: {"t":[...],"x":[...],"d":..,"icf":{...},"nugget":..}.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Comma-separated target locations.
    #[arg(long)]
    targets: Option<String>,
    /// File with one target location per line.
    #[arg(long)]
    targets_file: Option<PathBuf>,
    /// Cross-check closed-form weights against the augmented KKT solve.
    #[arg(long)]
    check_kkt: bool,
    /// Output CSV `t0,prediction,kriging_variance`.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl KrigeArgs {
    fn merged(self, file: &KrigeArgs) -> KrigeArgs {
        KrigeArgs {
            problem: self.problem.or_else(|| file.problem.clone()),
            targets: self.targets.or_else(|| file.targets.clone()),
            targets_file: self.targets_file.or_else(|| file.targets_file.clone()),
            check_kkt: self.check_kkt || file.check_kkt,
            out: self.out.or_else(|| file.out.clone()),
        }
    }
}

pub fn run_krige(args: KrigeArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let args = args.merged(&cfg.krige);
    let problem_path = require(args.problem, "problem")?;
    let out = require(args.out, "out")?;
    let problem: KrigingProblem = read_json(&problem_path, "kriging problem")?;

    let mut targets: Vec<f64> = Vec::new();
    if let Some(list) = &args.targets {
        targets.extend(parse_float_list(list)?);
    }
    if let Some(path) = &args.targets_file {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read targets {}: {e}", path.display())))?;
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            targets.push(
                line.trim().parse::<f64>().map_err(|_| {
                    CliError::usage(format!("cannot parse target '{}'", line.trim()))
                })?,
            );
        }
    }
    if targets.is_empty() {
        return Err(CliError::usage("no prediction targets given"));
    }

    let mut kkt_gap: f64 = 0.0;
    let mut file = fs::File::create(&out)?;
    writeln!(file, "t0,prediction,kriging_variance")?;
    for &t0 in &targets {
        let sol = predict(&problem, t0)?;
        if args.check_kkt {
            let center: f64 = problem.obs_t().iter().sum::<f64>() / problem.obs_t().len() as f64;
            let sys = build_system(&problem.shifted(-center), t0 - center)?;
            let eta = solve_closed_form(&sys, problem.nugget())?;
            let (eta_kkt, _) = solve_kkt(&sys, problem.nugget())?;
            let scale = 1.0 + eta_kkt.amax();
            for i in 0..eta.len() {
                kkt_gap = kkt_gap.max((eta[i] - eta_kkt[i]).abs() / scale);
            }
        }
        writeln!(
            file,
            "{},{},{}",
            format_float(t0),
            format_float(sol.prediction),
            format_float(sol.kriging_variance)
        )?;
    }

    if args.check_kkt {
        eprintln!("check-kkt: max relative weight discrepancy {kkt_gap:.3e}");
        if kkt_gap > 1e-8 {
            return Err(CliError::Numerical(format!(
                "closed-form and KKT weights disagree by {kkt_gap:.3e}"
            )));
        }
    }

    write_sidecar(
        &out,
        &json!({
            "command": "krige",
            "problem": serde_json::to_value(&problem)?,
            "targets": targets,
            "check_kkt": args.check_kkt,
            "kkt_gap": if args.check_kkt { Some(kkt_gap) } else { None },
            "out": out,
        }),
    )
}

// ---------------------------------------------------------------------------
// measure

#[derive(Debug, Clone, clap::Subcommand)]
pub enum MeasureCmd {
    /// Report per-degree annihilation defects of a measure file.
    Check {
        /// Measure JSON: {"order": d, "atoms": [[x, w], ...]}.
        #[arg(long)]
        file: PathBuf,
        /// Order to check against.
        #[arg(long)]
        order: usize,
        /// Output JSON (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the alternating-binomial finite-difference measure.
    Fd {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        iota: f64,
        #[arg(long, default_value_t = 0.0)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an allowable measure on the given support points.
    Construct {
        /// Comma-separated support points.
        #[arg(long)]
        points: String,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit_json(value: &serde_json::Value, out: Option<&Path>) -> Result<(), CliError> {
    let text = format!("{:#}\n", value);
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Write the value, plus the resolved-config sidecar when writing a file.
fn emit_json_with_config(
    value: &serde_json::Value,
    config: &serde_json::Value,
    out: Option<&Path>,
) -> Result<(), CliError> {
    emit_json(value, out)?;
    match out {
        Some(path) => write_sidecar(path, config),
        None => Ok(()),
    }
}

pub fn run_measure(cmd: MeasureCmd) -> Result<(), CliError> {
    match cmd {
        MeasureCmd::Check { file, order, out } => {
            // Load leniently: the claimed order is reported, not enforced,
            // so a failing measure still gets its defect table.
            let raw: serde_json::Value = read_json(&file, "measure")?;
            let atoms: Vec<(f64, f64)> = serde_json::from_value(
                raw.get("atoms")
                    .cloned()
                    .ok_or_else(|| CliError::usage("measure file lacks 'atoms'"))?,
            )?;
            let claimed = raw.get("order").and_then(|v| v.as_u64()).unwrap_or(0);
            let measure = Measure::new(atoms, 0)?;
            let report = measure.is_allowable(order, irf_core::TOL_ANNIHILATION)?;
            emit_json_with_config(
                &json!({
                    "claimed_order": claimed,
                    "checked_order": order,
                    "report": serde_json::to_value(&report)?,
                }),
                &json!({"command": "measure check", "file": file, "order": order}),
                out.as_deref(),
            )
        }
        MeasureCmd::Fd { d, iota, t, out } => {
            if !(iota > 0.0) {
                return Err(CliError::usage("--iota must be positive"));
            }
            let m = finite_difference_measure(d, iota, t);
            emit_json_with_config(
                &serde_json::to_value(&m)?,
                &json!({"command": "measure fd", "d": d, "iota": iota, "t": t}),
                out.as_deref(),
            )
        }
        MeasureCmd::Construct { points, order, out } => {
            let points = parse_float_list(&points)?;
            let m = construct_allowable(&points, order)?;
            emit_json_with_config(
                &serde_json::to_value(&m)?,
                &json!({"command": "measure construct", "points": points, "order": order}),
                out.as_deref(),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// verify

#[derive(Debug, Default, Clone, Args, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyArgs {
    /// Spectral model JSON; its order drives the suites.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Which suite to run: all, shift, difference, negative.
    #[arg(long)]
    suite: Option<String>,
    /// Monte Carlo replicates per suite (default 400).
    #[arg(long)]
    reps: Option<usize>,
    /// Standardized-gap threshold (default 4).
    #[arg(long)]
    z_threshold: Option<f64>,
    /// Report JSON (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl VerifyArgs {
    fn merged(self, file: &VerifyArgs) -> VerifyArgs {
        VerifyArgs {
            model: self.model.or_else(|| file.model.clone()),
            suite: self.suite.or_else(|| file.suite.clone()),
            reps: self.reps.or(file.reps),
            z_threshold: self.z_threshold.or(file.z_threshold),
            out: self.out.or_else(|| file.out.clone()),
        }
    }
}

#[derive(Serialize)]
struct VerifyReport {
    model: SpectralModel,
    suite: String,
    seed: u64,
    n_replicates: usize,
    z_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    shift_invariance: Option<InvarianceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    differenced_stationarity: Option<InvarianceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    negative_control: Option<InvarianceReport>,
    /// Pass means: both directions pass and the negative control fails.
    overall_pass: bool,
}

pub fn run_verify(args: VerifyArgs, cfg: &FileConfig, seed: u64) -> Result<(), CliError> {
    let args = args.merged(&cfg.verify);
    let model_path = require(args.model, "model")?;
    let model: SpectralModel = read_json(&model_path, "model")?;
    let d = model.order();
    if d == 0 {
        return Err(CliError::usage(
            "verification needs a model of order d >= 1",
        ));
    }
    let suite = args.suite.unwrap_or_else(|| "all".into());
    if !["all", "shift", "difference", "negative"].contains(&suite.as_str()) {
        return Err(CliError::usage(format!(
            "unknown suite '{suite}': expected all, shift, difference or negative"
        )));
    }
    let reps = args.reps.unwrap_or(400);
    let z_threshold = args.z_threshold.unwrap_or(4.0);

    let shifts = [0.0, 5.0, 20.0];
    let mut config = HarnessConfig {
        z_threshold,
        ..HarnessConfig::default()
    };

    let shift_report = if suite == "all" || suite == "shift" {
        let measure = finite_difference_measure(d, 1.0, d as f64);
        Some(shift_invariance_test(
            &model,
            &measure,
            &shifts,
            &[1.0, 3.0],
            reps,
            seed,
            &config,
        )?)
    } else {
        None
    };

    let diff_report = if suite == "all" || suite == "difference" {
        config.grid.n = 160;
        let r = differenced_stationarity_test(&model, d, 1, &[0, 1], reps, seed + 1, &config)?;
        config.grid.n = HarnessConfig::default().grid.n;
        Some(r)
    } else {
        None
    };

    let negative_report = if suite == "all" || suite == "negative" {
        // Linear trend plus a measure with nonzero total mass: the leaked
        // mean moves with the shift, so the report must FAIL.
        let trend = PolynomialTrend::new(vec![0.0, 5.0]);
        let bad = Measure::new(vec![(0.0, 1.0), (1.0, 1.0)], 0)?;
        Some(negative_control(
            &model,
            &trend,
            &bad,
            &shifts,
            reps,
            seed + 2,
            &config,
        )?)
    } else {
        None
    };

    let overall_pass = shift_report.as_ref().is_none_or(|r| r.pass)
        && diff_report.as_ref().is_none_or(|r| r.pass)
        && negative_report.as_ref().is_none_or(|r| !r.pass);

    let report = VerifyReport {
        model,
        suite,
        seed,
        n_replicates: reps,
        z_threshold,
        shift_invariance: shift_report,
        differenced_stationarity: diff_report,
        negative_control: negative_report,
        overall_pass,
    };
    let value = serde_json::to_value(&report)?;
    emit_json(&value, args.out.as_deref())?;

    if report.overall_pass {
        Ok(())
    } else {
        Err(CliError::Numerical(
            "verification suite failed (see report)".into(),
        ))
    }
}
