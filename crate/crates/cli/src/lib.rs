//! `retire`: command-line front end for the lifecycle retirement model.
//!
//! Every subcommand resolves a calibration (a preset or a TOML file), runs one
//! computation and writes CSV or JSON. Each document carries the SHA-256 of
//! the run manifest, so identical manifests give byte-identical files.

pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use retire_core::analytics::{CurveKind, Curves};
use retire_core::dual::solve_nu;
use retire_core::lifecycle::{
    comparative_statics_at, figure, optimize_tau, reference_sign, FigureId,
};
use retire_core::model::{ModelParams, ParamName, TimeGrid};
use retire_core::montecarlo::{simulate, verify_identities, SimConfig};
use retire_core::ModelError;

use output::{columns, json_document, sig12, Csv, RunManifest, Sink};

#[derive(Debug, Parser)]
#[command(
    name = "retire",
    version,
    about = "Lifecycle consumption and retirement timing under habit persistence"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Named calibration.
    #[arg(long, global = true, env = "RETIRE_PRESET", conflicts_with = "config")]
    pub preset: Option<String>,
    /// TOML file with one `key = value` line per parameter.
    #[arg(long, global = true, env = "RETIRE_CONFIG")]
    pub config: Option<PathBuf>,
    /// Retirement time in years since the start of working life.
    #[arg(long, global = true, env = "RETIRE_TAU", default_value_t = 40.0)]
    pub tau: f64,
    /// Spacing of time and retirement-time grids, in years.
    #[arg(long, global = true, env = "RETIRE_GRID_STEP", default_value_t = 0.5)]
    pub grid_step: f64,
    /// Number of simulated paths.
    #[arg(long, global = true, env = "RETIRE_PATHS", default_value_t = 10_000)]
    pub paths: usize,
    /// Simulation time step, in years.
    #[arg(long, global = true, env = "RETIRE_DT", default_value_t = 0.02)]
    pub dt: f64,
    #[arg(long, global = true, env = "RETIRE_SEED", default_value_t = 20_240_521)]
    pub seed: u64,
    /// Directory for output files. Without it, documents go to stdout.
    #[arg(long, global = true, env = "RETIRE_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the static budget problem at one retirement time.
    Solve,
    /// Dump F, N, O, the discount factor and the benefit annuity.
    Curves,
    /// Value of every retirement time and the optimum.
    Retire,
    /// Sign of the retirement-time response to each table parameter.
    Statics,
    /// Data behind one figure, or all of them.
    Figures {
        #[arg(long, default_value = "all")]
        figure: String,
    },
    /// Per-path trajectories of the first simulated paths.
    Paths {
        #[arg(long, default_value_t = 10)]
        record: usize,
    },
    /// Monte Carlo check of the budget, martingale and wealth identities.
    Verify,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Curves => "curves",
            Command::Retire => "retire",
            Command::Statics => "statics",
            Command::Figures { .. } => "figures",
            Command::Paths { .. } => "paths",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Model(ModelError),
    Io(std::io::Error),
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(ModelError::Infeasible { .. } | ModelError::NoFeasibleTau { .. }) => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("retire: {e}");
            e.exit_code()
        }
    }
}

fn resolve_params(common: &Common) -> Result<(ModelParams, String, String), CliError> {
    match (&common.config, &common.preset) {
        (Some(path), _) => {
            let bytes = std::fs::read(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| CliError::Usage(format!("config {} is not UTF-8", path.display())))?;
            let params = ModelParams::from_config_str(&text).map_err(|e| match e {
                ModelError::Config(m) => CliError::Usage(format!("config {}: {m}", path.display())),
                other => CliError::Model(other),
            })?;
            let hash = output::hex(&Sha256::digest(&bytes));
            Ok((params, format!("config:{}", path.display()), hash))
        }
        (None, preset) => {
            let name = preset.as_deref().unwrap_or("baseline");
            let params = ModelParams::preset(name).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok((params, format!("preset:{name}"), format!("preset:{name}")))
        }
    }
}

struct Run<'a> {
    common: &'a Common,
    params: ModelParams,
    manifest: RunManifest,
    sink: Sink,
}

impl Run<'_> {
    fn hash(&self) -> String {
        self.manifest.hash()
    }

    fn emit(&self, file_name: &str, contents: &str) -> Result<(), CliError> {
        Ok(self.sink.emit(file_name, contents)?)
    }

    fn emit_json(&self, file_name: &str, body: Value) -> Result<(), CliError> {
        self.emit(file_name, &json_document(&self.manifest, body))
    }

    fn sim_config(&self, record: usize) -> SimConfig {
        SimConfig {
            n_paths: self.common.paths,
            dt: self.common.dt,
            seed: self.common.seed,
            record,
            ..SimConfig::default()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let common = &cli.common;
    let (params, source, config_hash) = resolve_params(common)?;
    params.validate().map_err(CliError::Model)?;
    if !(common.grid_step > 0.0) {
        return Err(CliError::Usage(format!(
            "--grid-step must be positive, got {}",
            common.grid_step
        )));
    }
    let uses_tau = matches!(
        cli.command,
        Command::Solve
            | Command::Curves
            | Command::Figures { .. }
            | Command::Paths { .. }
            | Command::Verify
    );
    let uses_grid = matches!(
        cli.command,
        Command::Curves | Command::Retire | Command::Statics | Command::Figures { .. }
    );
    let uses_sim = matches!(cli.command, Command::Paths { .. } | Command::Verify);
    let extra = match &cli.command {
        Command::Figures { figure } => Some(format!("figure={figure}")),
        Command::Paths { record } => Some(format!("record={record}")),
        _ => None,
    };
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        subcommand: cli.command.name().to_string(),
        params,
        source,
        config_hash,
        tau: uses_tau.then_some(common.tau),
        grid_step: uses_grid.then_some(common.grid_step),
        paths: uses_sim.then_some(common.paths),
        dt: uses_sim.then_some(common.dt),
        seed: uses_sim.then_some(common.seed),
        extra,
    };
    let run = Run {
        common,
        params,
        sink: Sink::new(common.out.as_deref())?,
        manifest,
    };
    if let Sink::Dir(dir) = &run.sink {
        write_manifest(dir, &run.manifest)?;
    }
    match &cli.command {
        Command::Solve => solve(&run),
        Command::Curves => curves(&run),
        Command::Retire => retire(&run),
        Command::Statics => statics(&run),
        Command::Figures { figure } => figures(&run, figure),
        Command::Paths { record } => paths(&run, *record),
        Command::Verify => verify(&run),
    }
}

fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<(), CliError> {
    let body = json!({ "hash": manifest.hash(), "manifest": manifest });
    let mut text = serde_json::to_string_pretty(&body).expect("manifest serializes");
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn solve(run: &Run) -> Result<(), CliError> {
    let sol = solve_nu(&run.params, run.common.tau)?;
    let body = json!({
        "tau": sol.tau,
        "nu": num(sol.nu),
        "floor_only": sol.is_floor(),
        "q_star": sol.q_star,
        "A": sol.a_val,
        "z": sol.z_val,
        "A_minus_h0_z": sol.a_val - run.params.h0 * sol.z_val,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "value": sol.value(),
    });
    run.emit_json("solve.json", body)
}

fn curves(run: &Run) -> Result<(), CliError> {
    let curves = Curves::new(&run.params, run.common.tau)?;
    let grid = TimeGrid::for_model(&run.params, run.common.tau, run.common.grid_step)?;
    let units = |k: CurveKind| match k {
        CurveKind::O => "years",
        CurveKind::Benefit => "currency",
        _ => "1",
    };
    let mut cols = vec![("t".to_string(), "years".to_string())];
    cols.extend(
        CurveKind::EXPORTED
            .iter()
            .map(|&k| (k.label().to_string(), units(k).to_string())),
    );
    let mut csv = Csv::new(&run.hash(), &cols);
    for &t in grid.nodes() {
        let mut row = vec![t];
        row.extend(
            CurveKind::EXPORTED
                .iter()
                .map(|&k| curves.eval(k, t).expect("closed-form curve")),
        );
        csv.numbers(&row);
    }
    run.emit("curves.csv", &csv.into_string())
}

fn retire(run: &Run) -> Result<(), CliError> {
    let report = optimize_tau(&run.params, run.common.grid_step)?;
    let points: Vec<Value> = report
        .points
        .iter()
        .map(|p| json!({ "tau": p.tau, "V": num(p.value), "A": p.a }))
        .collect();
    let statics: serde_json::Map<String, Value> = report
        .statics
        .values()
        .map(|s| {
            (
                s.name.key().to_string(),
                json!({
                    "tau_star": s.tau_star,
                    "mixed_difference": s.mixed_difference,
                    "sign": s.sign.label(),
                    "reference_sign": reference_sign(s.name).label(),
                }),
            )
        })
        .collect();
    let body = json!({
        "tau_star": report.tau_star,
        "value_star": report.value_star,
        "points": points,
        "statics": statics,
    });
    run.emit_json("retire.json", body)
}

fn statics(run: &Run) -> Result<(), CliError> {
    let report = retire_core::lifecycle::optimize_tau_with(
        &run.params,
        run.common.grid_step,
        retire_core::lifecycle::value_of_tau,
    )?;
    let mut csv = Csv::new(
        &run.hash(),
        &columns(&[
            ("parameter", "-"),
            ("tau_star", "years"),
            ("mixed_difference", "value/(param*year)"),
            ("sign", "-"),
            ("reference_sign", "-"),
            ("match", "-"),
        ]),
    );
    for name in ParamName::TABLE {
        let s = comparative_statics_at(&run.params, report.tau_star, name, 0.01, 1.0)?;
        let reference = reference_sign(name);
        csv.row(&[
            name.key().to_string(),
            sig12(s.tau_star),
            sig12(s.mixed_difference),
            s.sign.label().to_string(),
            reference.label().to_string(),
            (s.sign == reference).to_string(),
        ]);
    }
    run.emit("statics.csv", &csv.into_string())
}

fn figures(run: &Run, which: &str) -> Result<(), CliError> {
    let ids: Vec<FigureId> = if which == "all" {
        if run.sink.is_stdout() {
            return Err(CliError::Usage(
                "--figure all writes one file per figure and needs --out".into(),
            ));
        }
        FigureId::ALL.to_vec()
    } else {
        let id = FigureId::parse(which).ok_or_else(|| {
            let names: Vec<&str> = FigureId::ALL.iter().map(|f| f.name()).collect();
            CliError::Usage(format!(
                "unknown figure `{which}`; expected one of all, {}",
                names.join(", ")
            ))
        })?;
        vec![id]
    };
    for id in ids {
        let table = figure(id, &run.params, run.common.tau, run.common.grid_step)?;
        let mut csv = Csv::new(&run.hash(), &table.columns);
        for row in &table.rows {
            csv.numbers(row);
        }
        run.emit(&format!("{}.csv", id.name()), &csv.into_string())?;
    }
    Ok(())
}

fn paths(run: &Run, record: usize) -> Result<(), CliError> {
    let sol = solve_nu(&run.params, run.common.tau)?;
    let cfg = run.sim_config(record.min(run.common.paths));
    cfg.validate()?;
    let ensemble = simulate(&run.params, run.common.tau, &sol, &cfg)?;
    let mut csv = Csv::new(
        &run.hash(),
        &columns(&[
            ("path", "-"),
            ("t", "years"),
            ("B", "1"),
            ("H", "1"),
            ("W", "currency/year"),
            ("C", "currency/year"),
            ("h", "currency/year"),
            ("X_sim", "currency"),
            ("X_formula", "currency"),
            ("pi", "currency"),
        ]),
    );
    for (i, traj) in ensemble.trajectories.iter().enumerate() {
        for s in traj {
            let mut cells = vec![i.to_string()];
            cells.extend(
                [
                    s.t,
                    s.b,
                    s.state_price,
                    s.wage,
                    s.consumption,
                    s.habit,
                    s.x_sim,
                    s.x_formula,
                    s.portfolio,
                ]
                .iter()
                .map(|&v| sig12(v)),
            );
            csv.row(&cells);
        }
    }
    run.emit("paths.csv", &csv.into_string())
}

fn verify(run: &Run) -> Result<(), CliError> {
    let sol = solve_nu(&run.params, run.common.tau)?;
    let cfg = run.sim_config(0);
    cfg.validate()?;
    let ensemble = simulate(&run.params, run.common.tau, &sol, &cfg)?;
    let report = verify_identities(&ensemble);
    let body = serde_json::to_value(&report).expect("report serializes");
    run.emit_json("verify.json", body)
}
