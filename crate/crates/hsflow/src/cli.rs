//! Deterministic front end: a JSON scenario config in, `result.json` plus CSV
//! tables out. No clock and no ambient randomness touch the outputs, so a
//! fixed config always produces byte-identical files.
//!
//! Exit protocol (used by the binary): 0 when every asserted contract passed,
//! 1 when a contract failed, 2 when the config did not validate.

use crate::csvio;
use crate::energy;
use crate::experiments;
use crate::flow::FlowState;
use crate::metric::{self, MetricParams};
use crate::plfunc::{PeakonConfig, PiecewiseLinearFn};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

/// Scenario subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Energy,
    Distance,
    Experiment,
}

/// Input function: a named builtin, inline breakpoints, or a peakon
/// configuration.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Builtin { builtin: String },
    Inline { x: Vec<f64>, y: Vec<f64> },
    Peakons { alpha: Vec<f64>, pos: Vec<f64> },
}

/// One or several times.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum TimesSpec {
    One(f64),
    Many(Vec<f64>),
}

impl TimesSpec {
    fn to_vec(&self) -> Vec<f64> {
        match self {
            TimesSpec::One(t) => vec![*t],
            TimesSpec::Many(ts) => ts.clone(),
        }
    }
}

/// JSON scenario config. `builtin` is shorthand for `function`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: Command,
    #[serde(default)]
    pub builtin: Option<String>,
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub function2: Option<FunctionSpec>,
    /// Experiment name for `command = experiment`.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub t: Option<TimesSpec>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub kappa0: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub steps: Option<usize>,
    /// Peakon parameters for the peakon experiments.
    #[serde(default)]
    pub alpha: Option<Vec<f64>>,
    #[serde(default)]
    pub pos: Option<Vec<f64>>,
    #[serde(default)]
    pub out_dir: Option<String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if let Some(ts) = &self.t {
            if ts.to_vec().iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(invalid("times must be finite and nonnegative"));
            }
        }
        if let Some(eps) = self.eps {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(invalid("eps must be positive"));
            }
        }
        if let Some(k) = self.kappa0 {
            if !(k.is_finite() && k > 0.0) {
                return Err(invalid("kappa0 must be positive"));
            }
        }
        if self.n == Some(0) || self.m == Some(0) {
            return Err(invalid("n and m must be at least 1"));
        }
        Ok(())
    }

    fn function_spec(&self) -> Option<FunctionSpec> {
        if let Some(b) = &self.builtin {
            Some(FunctionSpec::Builtin { builtin: b.clone() })
        } else {
            self.function.clone()
        }
    }

    fn resolve_function(&self, spec: &FunctionSpec) -> Result<PiecewiseLinearFn, CliError> {
        match spec {
            FunctionSpec::Inline { x, y } => PiecewiseLinearFn::new(x.clone(), y.clone())
                .map_err(|e| invalid(e.to_string())),
            FunctionSpec::Peakons { alpha, pos } => PeakonConfig::new(alpha.clone(), pos.clone())
                .map(|c| c.to_piecewise_linear())
                .map_err(|e| invalid(e.to_string())),
            FunctionSpec::Builtin { builtin } => match builtin.as_str() {
                "hat" => Ok(experiments::hat()),
                "example1_u" => Ok(experiments::example1_u(self.n.ok_or_else(|| {
                    invalid("builtin example1_u needs parameter n")
                })?)),
                "example1_v" => Ok(experiments::example1_v(self.n.ok_or_else(|| {
                    invalid("builtin example1_v needs parameter n")
                })?)),
                "example2" => Ok(experiments::example2_sawtooth(self.m.ok_or_else(|| {
                    invalid("builtin example2 needs parameter m")
                })?)),
                "witness112" => {
                    let t = match &self.t {
                        Some(TimesSpec::One(t)) => *t,
                        Some(TimesSpec::Many(ts)) if !ts.is_empty() => ts[0],
                        _ => return Err(invalid("builtin witness112 needs parameter t")),
                    };
                    Ok(energy::conservative_witness(t))
                }
                other => Err(invalid(format!("unknown builtin '{other}'"))),
            },
        }
    }

    fn peakons(&self) -> Result<PeakonConfig, CliError> {
        let alpha = self
            .alpha
            .clone()
            .unwrap_or_else(|| vec![0.5, -0.5]);
        let pos = self.pos.clone().unwrap_or_else(|| vec![-1.0, 1.0]);
        PeakonConfig::new(alpha, pos).map_err(|e| invalid(e.to_string()))
    }
}

/// Everything `run` reports back; serialized as `result.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub scenario: Option<String>,
    pub passed: bool,
    pub seed: Option<u64>,
    pub scalars: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub artifacts: Vec<String>,
}

impl RunReport {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            scenario: None,
            passed: false,
            seed: None,
            scalars: BTreeMap::new(),
            flags: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }
}

fn log(msg: &str) {
    if std::env::var_os("HSFLOW_LOG").is_some() {
        eprintln!("hsflow: {msg}");
    }
}

/// Run a validated config, writing `result.json` and the CSV artifacts into
/// `out_dir`. Returns the report; the caller maps `passed` onto the exit
/// status.
pub fn run(config: &ScenarioConfig, out_dir: &Path, seed: Option<u64>) -> Result<RunReport, CliError> {
    fs::create_dir_all(out_dir)?;
    let mut report = match config.command {
        Command::Solve => run_solve(config, out_dir)?,
        Command::Energy => run_energy(config, out_dir)?,
        Command::Distance => run_distance(config, out_dir)?,
        Command::Experiment => run_experiment(config, out_dir)?,
    };
    report.seed = seed;
    report.passed = report.flags.values().all(|&ok| ok);
    let json = serde_json::to_string_pretty(&report).map_err(|e| invalid(e.to_string()))?;
    fs::write(out_dir.join("result.json"), json + "\n")?;
    log(&format!(
        "{} finished, passed={}",
        report.command, report.passed
    ));
    Ok(report)
}

fn run_solve(config: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, CliError> {
    let spec = config
        .function_spec()
        .ok_or_else(|| invalid("solve needs a function"))?;
    let f = config.resolve_function(&spec)?;
    let times = config
        .t
        .as_ref()
        .ok_or_else(|| invalid("solve needs times t"))?
        .to_vec();
    if times.is_empty() {
        return Err(invalid("solve needs at least one time"));
    }
    let state = FlowState::new(f);
    let mut report = RunReport::new("solve");
    let mut identity_ok = true;
    for (idx, &t) in times.iter().enumerate() {
        let u = state.solve(t);
        let name = format!("solution_{idx:02}.csv");
        csvio::write_function_csv(&out_dir.join(&name), &u)?;
        report.artifacts.push(name);
        let e = u.energy();
        report.scalars.insert(format!("energy_{idx:02}"), e);
        identity_ok &= (e - state.surviving_mass(t)).abs() <= 1e-12 * e.max(1.0);
    }
    // energy step curve over the requested horizon, with a row at each epoch
    // (energy is right-continuous: the epoch row carries the dropped value)
    let horizon = times.iter().cloned().fold(0.0, f64::max);
    let mut curve_times: Vec<f64> = times.clone();
    curve_times.extend(state.epochs().iter().copied().filter(|&e| e <= horizon));
    curve_times.push(0.0);
    curve_times.sort_by(f64::total_cmp);
    curve_times.dedup();
    let rows: Vec<(f64, f64)> = curve_times
        .into_iter()
        .map(|t| (t, state.surviving_mass(t)))
        .collect();
    csvio::write_curve_csv(&out_dir.join("energy_curve.csv"), "energy", &rows)?;
    report.artifacts.push("energy_curve.csv".to_string());
    report
        .scalars
        .insert("total_energy".to_string(), state.total_mass());
    report
        .flags
        .insert("energy_identity".to_string(), identity_ok);
    Ok(report)
}

fn run_energy(config: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, CliError> {
    let spec = config
        .function_spec()
        .ok_or_else(|| invalid("energy needs a function"))?;
    let f = config.resolve_function(&spec)?;
    let state = FlowState::new(f);
    let mut report = RunReport::new("energy");
    let atoms = energy::dissipation_atoms(&state);
    csvio::write_atoms_csv(&out_dir.join("atoms.csv"), &atoms)?;
    report.artifacts.push("atoms.csv".to_string());

    // balance table over the windows cut by the epochs
    let mut cuts = vec![0.0];
    cuts.extend(state.epochs().iter().copied());
    cuts.push(state.epochs().last().copied().unwrap_or(0.0) + 1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut rows = Vec::new();
    let mut balance_ok = true;
    for w in cuts.windows(2) {
        let (lhs, rhs) = energy::energy_balance(&state, w[0], w[1])
            .map_err(|e| invalid(e.to_string()))?;
        balance_ok &= (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0);
        rows.push(vec![
            csvio::format_float(w[0]),
            csvio::format_float(w[1]),
            csvio::format_float(lhs),
            csvio::format_float(rhs),
        ]);
    }
    csvio::write_csv(
        &out_dir.join("balance.csv"),
        &["t1", "t2", "lhs", "rhs"],
        &rows,
    )?;
    report.artifacts.push("balance.csv".to_string());
    report
        .scalars
        .insert("total_energy".to_string(), state.total_mass());
    report
        .scalars
        .insert("atom_count".to_string(), atoms.len() as f64);
    report.scalars.insert(
        "dissipated_total".to_string(),
        atoms.iter().map(|a| a.mass).sum(),
    );
    report.flags.insert("balance_exact".to_string(), balance_ok);
    Ok(report)
}

fn run_distance(config: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, CliError> {
    // the example2 pair is addressed by builtin name plus (m, n)
    if config.builtin.as_deref() == Some("example2") && config.function2.is_none() {
        let m = config.m.ok_or_else(|| invalid("example2 needs m"))?;
        let n = config.n.ok_or_else(|| invalid("example2 needs n"))?;
        if m >= n {
            return Err(invalid("example2 needs m < n"));
        }
        let eps = config.eps.unwrap_or(1.0 / (8.0 * n as f64));
        let mp = MetricParams::new(config.kappa0.unwrap_or(1.0));
        let scenario = experiments::example2(m, n, eps, &mp, Some(out_dir))
            .map_err(|e| invalid(e.to_string()))?;
        return Ok(scenario_report("distance", scenario));
    }
    let spec = config
        .function_spec()
        .ok_or_else(|| invalid("distance needs a function"))?;
    let u = config.resolve_function(&spec)?;
    let spec2 = config
        .function2
        .as_ref()
        .ok_or_else(|| invalid("distance needs function2"))?;
    let v = config.resolve_function(spec2)?;
    let eps = config.eps.unwrap_or(0.05);
    let mp = MetricParams::new(config.kappa0.unwrap_or_else(|| u.energy().max(1.0)));
    let forward = metric::j_upper_dp(&u, &v, eps, &mp);
    let backward = metric::j_upper_dp(&v, &u, eps, &mp);
    let slack = 2.0 * eps * mp.kappa0() * std::f64::consts::PI;
    let mut report = RunReport::new("distance");
    csvio::write_energy_atoms_csv(&out_dir.join("atoms_u.csv"), &forward.left.atoms)?;
    csvio::write_energy_atoms_csv(&out_dir.join("atoms_v.csv"), &forward.right.atoms)?;
    report.artifacts.push("atoms_u.csv".to_string());
    report.artifacts.push("atoms_v.csv".to_string());
    report.scalars.insert("value".to_string(), forward.value);
    report
        .scalars
        .insert("value_reversed".to_string(), backward.value);
    report.scalars.insert("slack".to_string(), slack);
    report
        .scalars
        .insert("matched_pairs".to_string(), forward.plan.matched.len() as f64);
    report.flags.insert(
        "symmetry_within_slack".to_string(),
        (forward.value - backward.value).abs() <= slack,
    );
    report
        .flags
        .insert("value_nonnegative".to_string(), forward.value >= 0.0);
    Ok(report)
}

fn run_experiment(config: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, CliError> {
    let name = config
        .name
        .as_deref()
        .ok_or_else(|| invalid("experiment needs a name"))?;
    let scenario = match name {
        "example1" => experiments::example1(
            config.n.unwrap_or(16),
            single_time(config).unwrap_or(0.8),
            Some(out_dir),
        ),
        "example2" => {
            let m = config.m.unwrap_or(4);
            let n = config.n.unwrap_or(8);
            if m >= n {
                return Err(invalid("example2 needs m < n"));
            }
            let eps = config.eps.unwrap_or(1.0 / (8.0 * n as f64));
            let mp = MetricParams::new(config.kappa0.unwrap_or(1.0));
            experiments::example2(m, n, eps, &mp, Some(out_dir))
        }
        "peakon_drift" => experiments::peakon_drift(
            &config.peakons()?,
            single_time(config).unwrap_or(0.3),
            Some(out_dir),
        ),
        "hamiltonian" => experiments::hamiltonian_crosscheck(
            &config.peakons()?,
            single_time(config).unwrap_or(0.2),
            config.steps.unwrap_or(200),
            Some(out_dir),
        ),
        "zero_data" => experiments::zero_data_suite(Some(out_dir)),
        other => return Err(invalid(format!("unknown experiment '{other}'"))),
    }
    .map_err(|e| invalid(e.to_string()))?;
    Ok(scenario_report("experiment", scenario))
}

fn single_time(config: &ScenarioConfig) -> Option<f64> {
    config.t.as_ref().and_then(|ts| ts.to_vec().first().copied())
}

fn scenario_report(command: &str, scenario: experiments::ScenarioResult) -> RunReport {
    let mut report = RunReport::new(command);
    report.scenario = Some(scenario.name.clone());
    for (k, v) in &scenario.params {
        report.scalars.insert(format!("param_{k}"), *v);
    }
    report.scalars.extend(scenario.scalars);
    report.flags.extend(scenario.flags);
    report.artifacts.extend(scenario.artifacts);
    report
}
