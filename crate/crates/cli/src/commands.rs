//! Subcommand configurations and pipelines.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use nlqm_core::gaussian::ExactScalar;
use nlqm_core::locality::{
    appendix_signal_iterations, werner_test, GaussianState, SignalReport, SignalValue, WernerObservable,
    WernerSettings,
};
use nlqm_core::models::{decimal_rational, DgParams, RFunctional};
use nlqm_sim::dump::write_dump;
use nlqm_sim::{
    apply_gauge, evolve_with, gauge_residual_run, identical_particle_experiment, lambda_sensitivity, moment,
    EvolveParams, Grid2D, IdenticalConfig, IdenticalRow, InitialSpec, Observable, PotentialSpec,
    Region, RunStats, SensitivitySettings, SimSetup, Weight,
};

use crate::output::{fmt_f64, Table};
use crate::CliError;

/// Classification of one signal row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// Zero within the error bar.
    Null,
    /// Nonzero and resolved.
    Signal,
    /// Nonzero but the error bar exceeds half the magnitude.
    Inconclusive,
}

impl Status {
    pub fn of(r: &SignalReport) -> Status {
        match &r.value {
            SignalValue::Exact { value } if value.is_zero() => Status::Null,
            SignalValue::Exact { .. } => Status::Signal,
            SignalValue::Numeric { value, error } if value.abs() <= *error => Status::Null,
            SignalValue::Numeric { .. } if r.is_inconclusive() => Status::Inconclusive,
            SignalValue::Numeric { .. } => Status::Signal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Null => "null",
            Status::Signal => "signal",
            Status::Inconclusive => "inconclusive",
        }
    }
}

fn value_cell(r: &SignalReport) -> String {
    match &r.value {
        SignalValue::Exact { value } => value.to_string(),
        SignalValue::Numeric { value, .. } => fmt_f64(*value),
    }
}

fn signal_text(r: &SignalReport) -> String {
    match &r.value {
        SignalValue::Exact { value } => format!("{value} (exact)"),
        SignalValue::Numeric { value, error } => format!("{value:.6e} ± {error:.1e}"),
    }
}

/// Everything a subcommand hands back for emission.
#[derive(Clone, Debug)]
pub struct Report<T> {
    pub data: T,
    pub table: Table,
    pub text: String,
    /// Rows that fail under `--strict`.
    pub failures: Vec<String>,
}

// bbm-signal

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BbmConfig {
    /// Coupling at which the exact signal is echoed.
    pub b: Option<f64>,
    /// Number of `i d/dt` iterations.
    pub iterations: usize,
}

impl Default for BbmConfig {
    fn default() -> Self {
        BbmConfig { b: None, iterations: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BbmReport {
    pub raw: ExactScalar,
    pub norm: ExactScalar,
    pub ratio: ExactScalar,
    pub signal: String,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_at_b: Option<ExactScalar>,
}

pub fn bbm_signal(cfg: &BbmConfig) -> Result<Report<BbmReport>, CliError> {
    if cfg.iterations > 6 {
        return Err(CliError::Config(format!("iterations must be at most 6, got {}", cfg.iterations)));
    }
    let s = appendix_signal_iterations(cfg.iterations)?;
    let signal = if s.coefficient.is_zero() { "0".to_string() } else { format!("{}*b", s.coefficient) };
    let signal_at_b = cfg.b.map(|b| s.at(&decimal_rational(b)));
    let data = BbmReport {
        raw: s.raw,
        norm: s.normalization,
        ratio: s.ratio,
        signal,
        iterations: s.iterations,
        b: cfg.b,
        signal_at_b,
    };
    let mut table = Table::new(&["quantity", "value"]);
    let mut text = String::new();
    let mut line = |name: &str, value: String| {
        text.push_str(&format!("{name:<14} {value}\n"));
        table.push(vec![name.to_string(), value]);
    };
    line("raw", data.raw.to_string());
    line("norm", data.norm.to_string());
    line("ratio", data.ratio.to_string());
    line("signal", data.signal.clone());
    if let (Some(b), Some(v)) = (data.b, &data.signal_at_b) {
        line(&format!("signal(b={b})"), v.to_string());
    }
    Ok(Report { data, table, text, failures: Vec::new() })
}

// dg-werner

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WernerObs {
    #[default]
    SecondMoment,
    FirstMoment,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WernerConfig {
    /// Real part of `C₀`; `γ` is fixed by normalization.
    pub c0: [[f64; 2]; 2],
    /// Imaginary part of `C₀`.
    pub c0_imag: Option<[[f64; 2]; 2]>,
    pub n: usize,
    pub observable: WernerObs,
    pub lambda: f64,
    pub delta: f64,
    pub tuples: Vec<DgParams>,
}

impl Default for WernerConfig {
    fn default() -> Self {
        WernerConfig {
            c0: [[2.0, 1.0], [1.0, 2.0]],
            c0_imag: None,
            n: 3,
            observable: WernerObs::SecondMoment,
            lambda: 1.0,
            delta: 1e-4,
            tuples: vec![
                DgParams::from_gauge(1.0),
                DgParams::new(1.0, [0.5, 0.3, 0.0, -0.5, 0.2]),
                DgParams::new(0.0, [0.0; 5]),
                DgParams::new(1.0, [1.0, -0.5, 1.0, -1.0, 0.25]),
                DgParams::new(1.0, [1.0, -0.5, 0.0, 0.0, 0.25]),
            ],
        }
    }
}

impl WernerConfig {
    pub fn state(&self) -> Result<GaussianState, CliError> {
        let real = GaussianState::normalized_real(self.c0)?;
        let Some(im) = self.c0_imag else { return Ok(real) };
        if im[0][1] != im[1][0] {
            return Err(CliError::Config("c0_imag must be symmetric".into()));
        }
        let z = |i: usize, j: usize| Complex64::new(self.c0[i][j], im[i][j]);
        Ok(GaussianState::new(real.gamma, z(0, 0), z(0, 1), z(1, 1))?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WernerRow {
    #[serde(rename = "D")]
    pub d: f64,
    pub c: [f64; 5],
    pub galilei: bool,
    pub linearizable: bool,
    pub report: SignalReport,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WernerReport {
    pub rows: Vec<WernerRow>,
}

pub fn dg_werner(cfg: &WernerConfig) -> Result<Report<WernerReport>, CliError> {
    let state = cfg.state()?;
    let obs = match cfg.observable {
        WernerObs::SecondMoment => WernerObservable::SecondMoment,
        WernerObs::FirstMoment => WernerObservable::FirstMoment,
    };
    let settings = WernerSettings { lambda: cfg.lambda, delta: cfg.delta };
    let rows: Vec<WernerRow> = cfg
        .tuples
        .par_iter()
        .map(|p| {
            let report = werner_test(&RFunctional::DoebnerGoldin(*p), &state, cfg.n, obs, settings)?;
            Ok(WernerRow {
                d: p.d,
                c: p.c,
                galilei: p.is_galilei_covariant(),
                linearizable: p.is_linearizable().is_some(),
                status: Status::of(&report),
                report,
            })
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = Table::new(&["D", "c1", "c2", "c3", "c4", "c5", "galilei", "linearizable", "test", "n", "lambda", "value", "error", "status"]);
    let mut text = format!("{:>6} {:>28} {:>8} {:>12}  {:<26} status\n", "D", "c", "galilei", "linearizable", "signal");
    let mut failures = Vec::new();
    for r in &rows {
        let mut row = vec![fmt_f64(r.d)];
        row.extend(r.c.iter().map(|c| fmt_f64(*c)));
        row.extend([
            r.galilei.to_string(),
            r.linearizable.to_string(),
            serde_json::to_value(r.report.test)?.as_str().unwrap_or_default().to_string(),
            r.report.n.to_string(),
            fmt_f64(cfg.lambda),
            value_cell(&r.report),
            fmt_f64(r.report.error()),
            r.status.as_str().to_string(),
        ]);
        table.push(row);
        let c = r.c.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(", ");
        text.push_str(&format!(
            "{:>6} {:>28} {:>8} {:>12}  {:<26} {}\n",
            r.d,
            format!("({c})"),
            r.galilei,
            r.linearizable,
            signal_text(&r.report),
            r.status.as_str()
        ));
        if r.status == Status::Inconclusive {
            failures.push(format!("D = {}, c = ({c}): inconclusive", r.d));
        }
    }
    Ok(Report { data: WernerReport { rows }, table, text, failures })
}

// simulate

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub grid: Grid2D,
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
    pub nonlinearity: RFunctional,
    pub evolve: EvolveParams,
    pub observable: Observable,
    /// Time-derivative orders of the λ-sensitivity rows.
    pub orders: Vec<usize>,
    pub sensitivity: SensitivitySettings,
    /// Steps between trace rows.
    pub trace_every: usize,
    /// Raw dump of the final field.
    pub dump: Option<PathBuf>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            grid: Grid2D::default(),
            potential: PotentialSpec::Harmonic2 { lambda: 1.0, x0: 0.0 },
            initial: InitialSpec::ClosedForm { expr: "exp(-x^2 - y^2 - x*y)".into() },
            nonlinearity: RFunctional::None,
            evolve: EvolveParams::default(),
            observable: Observable::SecondMoment,
            orders: vec![1, 2, 3],
            sensitivity: SensitivitySettings::default(),
            trace_every: 100,
            dump: None,
        }
    }
}

impl SimulateConfig {
    pub fn setup(&self) -> SimSetup {
        SimSetup {
            grid: self.grid,
            potential: self.potential,
            initial: self.initial.clone(),
            nonlinearity: self.nonlinearity,
            evolve: self.evolve,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub norm: f64,
    pub x1: f64,
    pub x1_squared: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignalRow {
    pub report: SignalReport,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulateReport {
    pub stats: RunStats,
    pub trace: Vec<TraceRow>,
    pub signals: Vec<SignalRow>,
}

pub fn simulate(cfg: &SimulateConfig) -> Result<Report<SimulateReport>, CliError> {
    if cfg.trace_every == 0 {
        return Err(CliError::Config("trace_every must be positive".into()));
    }
    cfg.grid.validate()?;
    let psi0 = cfg.initial.sample(&cfg.grid)?;
    let mut trace = Vec::new();
    let steps = cfg.evolve.steps;
    let (last, stats) = evolve_with(&psi0, &cfg.potential, cfg.nonlinearity, cfg.evolve, |step, t, psi| {
        if step % cfg.trace_every == 0 || step == steps {
            trace.push(TraceRow {
                t,
                norm: psi.norm_sq(),
                x1: moment(psi, Weight::X1, Region::All)?.re,
                x1_squared: moment(psi, Weight::X1Squared, Region::All)?.re,
            });
        }
        Ok(())
    })?;
    if let Some(path) = &cfg.dump {
        let mut w = BufWriter::new(File::create(path)?);
        write_dump(&mut w, &last, steps as f64 * cfg.evolve.dt)?;
    }
    let setup = cfg.setup();
    let signals: Vec<SignalRow> = cfg
        .orders
        .par_iter()
        .map(|&n| {
            let report = lambda_sensitivity(&setup, &cfg.observable, n, &cfg.sensitivity)?;
            Ok(SignalRow { status: Status::of(&report), report })
        })
        .collect::<Result<_, CliError>>()?;

    let mut table = Table::new(&["test", "n", "lambda", "k", "value", "error", "status"]);
    let mut text = format!(
        "{} steps, dt = {}, norm drift {:.3e} (max {:.3e}), floored nodes {}\n",
        stats.steps, cfg.evolve.dt, stats.final_drift, stats.max_drift, stats.max_floored
    );
    let mut failures = Vec::new();
    for s in &signals {
        let r = &s.report;
        table.push(vec![
            serde_json::to_value(r.test)?.as_str().unwrap_or_default().to_string(),
            r.n.to_string(),
            fmt_f64(cfg.potential.lambda()),
            r.k.map(fmt_f64).unwrap_or_default(),
            value_cell(r),
            fmt_f64(r.error()),
            s.status.as_str().to_string(),
        ]);
        text.push_str(&format!("n = {}: {}  {}\n", r.n, signal_text(r), s.status.as_str()));
        if s.status == Status::Inconclusive {
            failures.push(format!("n = {}: inconclusive", r.n));
        }
    }
    Ok(Report { data: SimulateReport { stats, trace, signals }, table, text, failures })
}

// gauge-check

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaugeConfig {
    pub grid: Grid2D,
    pub potential: PotentialSpec,
    pub initial: InitialSpec,
    pub d: f64,
    pub dt: f64,
    pub steps: usize,
    /// Also evolve `N_D Ψ₀` under the Doebner-Goldin equation and compare moduli.
    pub compare_evolution: bool,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        GaugeConfig {
            grid: Grid2D::default(),
            potential: PotentialSpec::Harmonic2 { lambda: 1.0, x0: 0.0 },
            initial: InitialSpec::ClosedForm { expr: "exp(-x^2 - y^2 - x*y + I*(x/2 - y/5))".into() },
            d: 1.0,
            dt: 1e-4,
            steps: 1000,
            compare_evolution: true,
        }
    }
}

/// Accepted range of the residual ratio under `dt` halving.
pub const ORDER_RATIO_RANGE: (f64, f64) = (3.5, 4.5);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeReport {
    pub d: f64,
    pub dt: f64,
    pub steps: usize,
    pub residual: f64,
    pub residual_half_dt: f64,
    pub order_ratio: f64,
    /// Residual of the linear equation itself (`D = 0`).
    pub baseline_residual: f64,
    /// `‖|N_D Ψ(t)| − |Φ(t)|‖₂` with `Φ` the Doebner-Goldin evolution of `N_D Ψ₀`.
    pub modulus_gap: Option<f64>,
}

pub fn gauge_check(cfg: &GaugeConfig) -> Result<Report<GaugeReport>, CliError> {
    if cfg.steps == 0 {
        return Err(CliError::Config("steps must be positive".into()));
    }
    cfg.grid.validate()?;
    let psi0 = cfg.initial.sample(&cfg.grid)?;
    let params = |dt: f64, steps: usize| EvolveParams { dt, steps, ..Default::default() };
    let residual = gauge_residual_run(&psi0, &cfg.potential, cfg.d, params(cfg.dt, cfg.steps))?;
    let residual_half_dt = gauge_residual_run(&psi0, &cfg.potential, cfg.d, params(cfg.dt / 2.0, 2 * cfg.steps))?;
    let baseline_residual = gauge_residual_run(&psi0, &cfg.potential, 0.0, params(cfg.dt, cfg.steps))?;
    let modulus_gap = if cfg.compare_evolution {
        let p = params(cfg.dt, cfg.steps);
        let (linear, _) = evolve_with(&psi0, &cfg.potential, RFunctional::None, p, |_, _, _| Ok(()))?;
        let dg = RFunctional::DoebnerGoldin(DgParams::from_gauge(cfg.d));
        let (phi, _) = evolve_with(&apply_gauge(&psi0, cfg.d)?, &cfg.potential, dg, p, |_, _, _| Ok(()))?;
        Some(apply_gauge(&linear, cfg.d)?.modulus_l2_distance(&phi))
    } else {
        None
    };
    let data = GaugeReport {
        d: cfg.d,
        dt: cfg.dt,
        steps: cfg.steps,
        residual,
        residual_half_dt,
        order_ratio: residual / residual_half_dt,
        baseline_residual,
        modulus_gap,
    };
    let mut table = Table::new(&["quantity", "value"]);
    let mut text = String::new();
    let mut line = |name: &str, v: f64| {
        text.push_str(&format!("{name:<18} {v:.6e}\n"));
        table.push(vec![name.to_string(), fmt_f64(v)]);
    };
    line("residual", data.residual);
    line("residual_half_dt", data.residual_half_dt);
    line("order_ratio", data.order_ratio);
    line("baseline_residual", data.baseline_residual);
    if let Some(gap) = data.modulus_gap {
        line("modulus_gap", gap);
    }
    let (lo, hi) = ORDER_RATIO_RANGE;
    let mut failures = Vec::new();
    if !(lo..=hi).contains(&data.order_ratio) {
        failures.push(format!("residual ratio {} outside [{lo}, {hi}]", data.order_ratio));
    }
    Ok(Report { data, table, text, failures })
}

// identical

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdenticalRowOut {
    #[serde(flatten)]
    pub row: IdenticalRow,
    /// `|χ − φ| ≤ err(χ) + err(φ)`.
    pub chi_phi_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdenticalReport {
    pub rows: Vec<IdenticalRowOut>,
    /// `|cross term|` strictly decreasing in `d` for every `σ`.
    pub cross_term_decreasing: bool,
}

pub fn identical(cfg: &IdenticalConfig) -> Result<Report<IdenticalReport>, CliError> {
    cfg.grid.validate()?;
    let rows: Vec<IdenticalRowOut> = identical_particle_experiment(cfg)?
        .into_iter()
        .map(|row| {
            let (a, b) = (&row.signal_chi, &row.signal_phi);
            let chi_phi_agree = (a.value_f64() - b.value_f64()).abs() <= a.error() + b.error();
            IdenticalRowOut { row, chi_phi_agree }
        })
        .collect();
    let cross_term_decreasing = cfg.sigmas.iter().all(|&sigma| {
        let mut col: Vec<(f64, f64)> =
            rows.iter().filter(|r| r.row.sigma == sigma).map(|r| (r.row.d, r.row.cross_term.abs())).collect();
        col.sort_by(|a, b| a.0.total_cmp(&b.0));
        col.windows(2).all(|w| w[1].1 < w[0].1)
    });

    let mut table = Table::new(&[
        "d", "sigma", "lambda", "n", "cross_term", "psi_value", "psi_error", "chi_value", "chi_error", "phi_value",
        "phi_error", "chi_phi_agree",
    ]);
    let mut text = format!("{:>6} {:>5} {:>14}  {:<24} {:<24} {:<24} agree\n", "d", "sigma", "cross", "psi", "chi", "phi");
    let mut failures = Vec::new();
    for r in &rows {
        let row = &r.row;
        table.push(vec![
            fmt_f64(row.d),
            fmt_f64(row.sigma),
            fmt_f64(cfg.lambda),
            cfg.n.to_string(),
            fmt_f64(row.cross_term),
            fmt_f64(row.signal_psi.value_f64()),
            fmt_f64(row.signal_psi.error()),
            fmt_f64(row.signal_chi.value_f64()),
            fmt_f64(row.signal_chi.error()),
            fmt_f64(row.signal_phi.value_f64()),
            fmt_f64(row.signal_phi.error()),
            r.chi_phi_agree.to_string(),
        ]);
        text.push_str(&format!(
            "{:>6} {:>5} {:>14.6e}  {:<24} {:<24} {:<24} {}\n",
            row.d,
            row.sigma,
            row.cross_term,
            signal_text(&row.signal_psi),
            signal_text(&row.signal_chi),
            signal_text(&row.signal_phi),
            r.chi_phi_agree
        ));
        if !r.chi_phi_agree {
            failures.push(format!("d = {}: chi and phi signals disagree", row.d));
        }
        if Status::of(&row.signal_psi) == Status::Inconclusive {
            failures.push(format!("d = {}, sigma = {}: inconclusive", row.d, row.sigma));
        }
    }
    if !cross_term_decreasing {
        failures.push("cross term is not strictly decreasing in d".into());
    }
    text.push_str(&format!("cross term decreasing: {cross_term_decreasing}\n"));
    Ok(Report { data: IdenticalReport { rows, cross_term_decreasing }, table, text, failures })
}
