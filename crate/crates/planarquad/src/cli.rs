//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or IO error, 2 the simulation
//! diverged (outputs up to the failure are still written).

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use planarquad_core::analysis::{closed_loop_axis_metrics, DEFAULT_PROBE_TOL, DEFAULT_PROBE_T_END};
use planarquad_core::linear_model::{symbolic_tf, INPUT_LABELS, OUTPUT_LABELS};
use planarquad_core::poly::format_number;
use planarquad_core::sim::{DEFAULT_DT, OPEN_LOOP_T_END};
use planarquad_core::{
    compare_models, equilibrium, integrate, linearize, stability_probe, tf_from_ss, CascadedPd,
    Channel, InputSignal, ModelComparison, Plant, QuadParams, Setpoint, SimConfig, SimError, State,
    Trajectory,
};
use thiserror::Error;

use crate::export::{
    to_json, write_csv, ComparisonRecord, MetricsRecord, OpenLoopRecord, ProbeRecord,
};
use crate::scenario::{resolve, OutputKind, Scenario, ScenarioError};

pub const DEFAULT_OUT_DIR: &str = "out";
pub const CLOSED_LOOP_T_END: f64 = 5.0;

#[derive(Debug, Parser)]
#[command(
    name = "planarquad",
    version,
    about = "Planar quadrotor simulation and analysis"
)]
pub struct Cli {
    /// Integration step (s); overrides the scenario or command default.
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Simulation horizon (s); overrides the scenario or command default.
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    /// Accepted for compatibility; every run is deterministic.
    #[arg(long, global = true)]
    pub seedless: bool,
    /// Output directory for CSV and JSON files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and write its CSV/JSON outputs.
    Simulate {
        /// Path, or a name looked up in the scenario directory.
        #[arg(long)]
        scenario: String,
    },
    /// Print the transfer-function matrix of the linearized model.
    Tf {
        /// Express gains in terms of m, g and J.
        #[arg(long)]
        symbolic: bool,
    },
    /// Print the hover equilibrium.
    Equilibrium,
    /// Canonical open- and closed-loop unit steps with a metrics report.
    Step {
        #[arg(long, value_enum, default_value = "nonlinear")]
        plant: PlantArg,
        #[arg(long, value_enum)]
        channel: StepArg,
    },
    /// Run a scenario on both plants and report their deviation.
    Compare {
        #[arg(long)]
        scenario: String,
    },
    /// Closed-loop recovery from a list of initial angles.
    Probe {
        /// Comma-separated initial angles (rad).
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            default_value = "-0.5,1.0"
        )]
        phi0: Vec<f64>,
        #[arg(long, value_enum, default_value = "nonlinear")]
        plant: PlantArg,
        /// Convergence tolerance on the state-error norm.
        #[arg(long, default_value_t = DEFAULT_PROBE_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlantArg {
    Linear,
    Nonlinear,
}

impl From<PlantArg> for Plant {
    fn from(p: PlantArg) -> Self {
        match p {
            PlantArg::Linear => Plant::Linear,
            PlantArg::Nonlinear => Plant::Nonlinear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepArg {
    U1,
    U2,
    ClosedX,
    ClosedY,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("simulation diverged at t = {0} s")]
    Divergence(f64),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Divergence(_) => 2,
            _ => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut say = |text: String| writeln!(stdout, "{text}").map_err(io_err(Path::new("<stdout>")));
    match &cli.command {
        Command::Simulate { scenario } => {
            let sc = load_scenario(scenario)?;
            let out = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            simulate(&sc, cli.dt, cli.t_end, &out, &mut say)
        }
        Command::Tf { symbolic } => say(render_tf(*symbolic)?),
        Command::Equilibrium => say(render_equilibrium(&QuadParams::default())),
        Command::Step { plant, channel } => {
            let sc = step_scenario((*plant).into(), *channel, cli.dt, cli.t_end);
            step(&sc, cli.out.as_deref(), &mut say)
        }
        Command::Compare { scenario } => {
            let sc = load_scenario(scenario)?;
            compare(&sc, cli.dt, cli.t_end, cli.out.as_deref(), &mut say)
        }
        Command::Probe { phi0, plant, tol } => {
            let dt = cli.dt.unwrap_or(DEFAULT_DT);
            let t_end = cli.t_end.unwrap_or(DEFAULT_PROBE_T_END);
            probe(
                phi0,
                (*plant).into(),
                *tol,
                dt,
                t_end,
                cli.out.as_deref(),
                &mut say,
            )
        }
    }
}

fn load_scenario(arg: &str) -> Result<Scenario, CliError> {
    Ok(Scenario::load(&resolve(arg))?)
}

/// Runs `integrate`, returning the partial trajectory and failure time when
/// the run diverges.
fn run_sim(
    config: &SimConfig,
    signal: &InputSignal,
    params: &QuadParams,
) -> Result<(Trajectory, Option<f64>), CliError> {
    match integrate(config, signal, params) {
        Ok(tr) => Ok((tr, None)),
        Err(SimError::Divergence { time, partial }) => Ok((*partial, Some(time))),
        Err(e) => Err(config_err(e)),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(io_err(path))
}

fn write_traj(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    write_csv(traj, file).map_err(io_err(path))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

/// JSON metrics for a finished run: one flat record per stepped axis for
/// closed-loop runs, an open-loop summary otherwise.
fn metrics_json(sc: &Scenario, traj: &Trajectory, diverged: Option<f64>) -> String {
    match sc.signal().ok() {
        Some(InputSignal::ClosedLoop { setpoint, .. }) => {
            to_json(&closed_loop_records(&sc.name, sc.plant, traj, &setpoint))
        }
        _ => to_json(&OpenLoopRecord::new(&sc.name, sc.plant, traj, diverged)),
    }
}

fn closed_loop_records(
    name: &str,
    plant: Plant,
    traj: &Trajectory,
    setpoint: &Setpoint,
) -> Vec<MetricsRecord> {
    let axes = closed_loop_axis_metrics(traj, setpoint);
    [
        (Channel::X, setpoint.x_des, axes.x),
        (Channel::Y, setpoint.y_des, axes.y),
    ]
    .into_iter()
    .filter_map(|(ch, target, m)| {
        m.map(|m| MetricsRecord::new(name, plant, ch, target, &m, traj.dt))
    })
    .collect()
}

fn simulate(
    sc: &Scenario,
    dt: Option<f64>,
    t_end: Option<f64>,
    out: &Path,
    say: &mut dyn FnMut(String) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let config = sc.sim_config(dt, t_end);
    let signal = sc.signal()?;
    let (traj, diverged) = run_sim(&config, &signal, &sc.params())?;
    ensure_dir(out)?;
    let mut diverged_any = diverged;
    for kind in &sc.outputs {
        match kind {
            OutputKind::Csv => {
                let path = out.join(format!("{}.csv", sc.name));
                write_traj(&path, &traj)?;
                say(format!("wrote {}", path.display()))?;
            }
            OutputKind::Metrics => {
                let path = out.join(format!("{}_metrics.json", sc.name));
                write_file(&path, &metrics_json(sc, &traj, diverged))?;
                say(format!("wrote {}", path.display()))?;
            }
            OutputKind::Comparison => {
                let (record, report_div) = comparison(sc, dt, t_end)?;
                let path = out.join(format!("{}_comparison.json", sc.name));
                write_file(&path, &to_json(&record))?;
                say(format!("wrote {}", path.display()))?;
                diverged_any = diverged_any.or(report_div);
            }
        }
    }
    match diverged_any {
        Some(t) => Err(CliError::Divergence(t)),
        None => Ok(()),
    }
}

/// Built-in unit-step scenarios: open-loop `u1`/`u2` over 2 s, closed-loop
/// unit position steps over 5 s.
pub fn step_scenario(
    plant: Plant,
    channel: StepArg,
    dt: Option<f64>,
    t_end: Option<f64>,
) -> Scenario {
    use crate::scenario::{SignalSpec, SimSpec};
    let (suffix, signal, setpoint, horizon) = match channel {
        StepArg::U1 => (
            "u1",
            SignalSpec::Step {
                u1_amp: 1.0,
                u2_amp: 0.0,
                hover_offset: false,
            },
            None,
            OPEN_LOOP_T_END,
        ),
        StepArg::U2 => (
            "u2",
            SignalSpec::Step {
                u1_amp: 0.0,
                u2_amp: 1.0,
                hover_offset: true,
            },
            None,
            OPEN_LOOP_T_END,
        ),
        StepArg::ClosedX => (
            "closed_x",
            SignalSpec::ClosedLoop,
            Some(Setpoint::new(1.0, 0.0)),
            CLOSED_LOOP_T_END,
        ),
        StepArg::ClosedY => (
            "closed_y",
            SignalSpec::ClosedLoop,
            Some(Setpoint::new(0.0, 1.0)),
            CLOSED_LOOP_T_END,
        ),
    };
    Scenario {
        name: format!("step_{}_{suffix}", crate::export::plant_name(plant)),
        plant,
        outputs: vec![OutputKind::Csv, OutputKind::Metrics],
        sim: SimSpec {
            dt: dt.unwrap_or(DEFAULT_DT),
            t_end: t_end.unwrap_or(horizon),
            initial_state: None,
        },
        signal,
        gains: None,
        setpoint,
        params: None,
        comparison: None,
    }
}

fn step(
    sc: &Scenario,
    out: Option<&Path>,
    say: &mut dyn FnMut(String) -> Result<(), CliError>,
) -> Result<(), CliError> {
    sc.validate()?;
    let (traj, diverged) = run_sim(&sc.sim_config(None, None), &sc.signal()?, &sc.params())?;
    let json = match sc.setpoint {
        Some(sp) => {
            let mut records = closed_loop_records(&sc.name, sc.plant, &traj, &sp);
            if records.len() != 1 {
                return Err(config_err(
                    "closed-loop step needs exactly one stepped axis",
                ));
            }
            to_json(&records.remove(0))
        }
        None => to_json(&OpenLoopRecord::new(&sc.name, sc.plant, &traj, diverged)),
    };
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_traj(&dir.join(format!("{}.csv", sc.name)), &traj)?;
        write_file(&dir.join(format!("{}_metrics.json", sc.name)), &json)?;
    }
    say(json)?;
    diverged.map_or(Ok(()), |t| Err(CliError::Divergence(t)))
}

fn comparison(
    sc: &Scenario,
    dt: Option<f64>,
    t_end: Option<f64>,
) -> Result<(ComparisonRecord, Option<f64>), CliError> {
    let cfg = sc.sim_config(dt, t_end);
    cfg.validate().map_err(config_err)?;
    let spec = sc.comparison();
    let cmp = ModelComparison {
        dt: cfg.dt,
        t_end: cfg.t_end,
        initial_state: cfg.initial_state,
        signal: sc.signal()?,
        divergence_channel: spec.channel,
        divergence_threshold: spec.threshold,
    };
    let report = compare_models(&cmp, &sc.params()).map_err(config_err)?;
    let div = report.linear_diverged_at.or(report.nonlinear_diverged_at);
    Ok((ComparisonRecord::new(&sc.name, &report), div))
}

fn compare(
    sc: &Scenario,
    dt: Option<f64>,
    t_end: Option<f64>,
    out: Option<&Path>,
    say: &mut dyn FnMut(String) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let (record, diverged) = comparison(sc, dt, t_end)?;
    let json = to_json(&record);
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_file(&dir.join(format!("{}_comparison.json", sc.name)), &json)?;
    }
    say(json)?;
    diverged.map_or(Ok(()), |t| Err(CliError::Divergence(t)))
}

fn probe(
    phi0: &[f64],
    plant: Plant,
    tol: f64,
    dt: f64,
    t_end: f64,
    out: Option<&Path>,
    say: &mut dyn FnMut(String) -> Result<(), CliError>,
) -> Result<(), CliError> {
    if phi0.iter().any(|p| !p.is_finite()) {
        return Err(config_err("initial angles must be finite"));
    }
    let params = QuadParams::default();
    let controller = CascadedPd::default();
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = phi0
            .iter()
            .map(|&phi| {
                s.spawn(move || {
                    let init = State { phi, ..State::ZERO };
                    let cfg = SimConfig::new(plant, dt, t_end, init);
                    stability_probe(&cfg, &controller, Setpoint::default(), tol, &params)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("probe thread panicked"))
            .collect()
    });
    let mut records = Vec::with_capacity(results.len());
    for (&phi, r) in phi0.iter().zip(results) {
        let v = r.map_err(config_err)?;
        records.push(ProbeRecord::new(phi, plant, &v, tol, t_end));
    }
    let json = to_json(&records);
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_file(&dir.join("probe.json"), &json)?;
    }
    say(json)?;
    match records.iter().find_map(|r| r.diverged_at_s) {
        Some(t) => Err(CliError::Divergence(t)),
        None => Ok(()),
    }
}

pub fn render_tf(symbolic: bool) -> Result<String, CliError> {
    let params = QuadParams::default();
    if !symbolic {
        let h = tf_from_ss(&linearize(&params)).map_err(config_err)?;
        return Ok(h.render().trim_end().to_string());
    }
    let sym = symbolic_tf(&params).map_err(config_err)?;
    let mut lines = Vec::new();
    for (i, row) in sym.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            lines.push(format!("H[{},{}] = {g}", OUTPUT_LABELS[i], INPUT_LABELS[j]));
        }
    }
    Ok(lines.join("\n"))
}

pub fn render_equilibrium(params: &QuadParams) -> String {
    let (state, input) = equilibrium(params);
    let state_text = if state == State::ZERO {
        "origin".to_string()
    } else {
        format!("{state:?}")
    };
    format!(
        "u1 = {} N, u2 = {}, state = {state_text}",
        format_number(input.u1),
        format_number(input.u2)
    )
}
