//! Command-line orchestration for the exact and simulated nonlocality tests:
//! configuration loading and validation, the subcommand pipelines and report
//! emission.

pub mod commands;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use nlqm_core::locality::LocalityError;
use nlqm_sim::SimError;

use commands::Report;
use output::{to_json_string, validate, SchemaKind};

#[derive(Clone, Debug, Parser)]
#[command(name = "nlqm", version, about = "Locality tests for nonlinear Schrödinger equations")]
pub struct Cli {
    /// JSON run configuration; defaults apply to omitted fields.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Report destination; `.csv` writes the table, anything else JSON.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the text summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Exit with status 4 when any row is inconclusive or fails its check.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for independent sweep points.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exact second-moment signal of the logarithmic model.
    BbmSignal,
    /// Gaussian-ansatz test over Doebner-Goldin parameter tuples.
    DgWerner,
    /// Evolve one configuration and estimate λ-sensitivities.
    Simulate,
    /// Gauge-equivalence residuals and modulus comparison.
    GaugeCheck,
    /// Symmetrized two-particle experiment in the displaced potential.
    Identical,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::BbmSignal => "bbm-signal",
            Command::DgWerner => "dg-werner",
            Command::Simulate => "simulate",
            Command::GaugeCheck => "gauge-check",
            Command::Identical => "identical",
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Locality(#[from] LocalityError),
    #[error("report does not match its schema: {0}")]
    Report(String),
    #[error("thread pool: {0}")]
    Threads(String),
    #[error("strict mode: {0}")]
    Strict(String),
}

impl CliError {
    /// 2 configuration or input, 3 numerical guard, 4 strict failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) | CliError::Csv(_) | CliError::Json(_) | CliError::Threads(_) => 2,
            CliError::Sim(e) => match e {
                SimError::DensityFloor { .. }
                | SimError::NormDrift { .. }
                | SimError::Margin { .. }
                | SimError::NonFinite { .. } => 3,
                _ => 2,
            },
            CliError::Locality(e) => match e {
                LocalityError::NonFinite | LocalityError::Exact(_) | LocalityError::Gaussian(_) => 3,
                _ => 2,
            },
            CliError::Report(_) => 1,
            CliError::Strict(_) => 4,
        }
    }
}

/// Reads, schema-validates and deserializes the configuration of `command`.
pub fn load_config<T: DeserializeOwned>(command: Command, path: Option<&Path>) -> Result<T, CliError> {
    let value = match path {
        Some(p) => {
            let src = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&src).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Value::Object(Default::default()),
    };
    parse_config(command, value)
}

pub fn parse_config<T: DeserializeOwned>(command: Command, value: Value) -> Result<T, CliError> {
    validate(command.name(), SchemaKind::Config, &value).map_err(CliError::Config)?;
    serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))
}

/// A finished report, validated and ready to print.
#[derive(Clone, Debug)]
pub struct Emitted {
    pub json: String,
    pub csv: String,
    pub text: String,
    pub failures: Vec<String>,
}

pub fn emit<T: Serialize>(command: Command, report: Report<T>) -> Result<Emitted, CliError> {
    let value = serde_json::to_value(&report.data)?;
    validate(command.name(), SchemaKind::Report, &value).map_err(CliError::Report)?;
    Ok(Emitted { json: to_json_string(&value), csv: report.table.to_csv()?, text: report.text, failures: report.failures })
}

/// Runs the pipeline of `command` on the configuration at `config`.
pub fn execute(command: Command, config: Option<&Path>) -> Result<Emitted, CliError> {
    match command {
        Command::BbmSignal => emit(command, commands::bbm_signal(&load_config(command, config)?)?),
        Command::DgWerner => emit(command, commands::dg_werner(&load_config(command, config)?)?),
        Command::Simulate => emit(command, commands::simulate(&load_config(command, config)?)?),
        Command::GaugeCheck => emit(command, commands::gauge_check(&load_config(command, config)?)?),
        Command::Identical => emit(command, commands::identical(&load_config(command, config)?)?),
    }
}

/// Full invocation: runs, prints to `stdout`, writes `--out` and applies `--strict`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let threads = cli.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| CliError::Threads(e.to_string()))?;
    let emitted = pool.install(|| execute(cli.command, cli.config.as_deref()))?;
    finish(cli, &emitted, stdout)
}

/// Prints and writes an emitted report, then applies `--strict`.
pub fn finish(cli: &Cli, emitted: &Emitted, stdout: &mut dyn Write) -> Result<(), CliError> {
    if cli.json {
        stdout.write_all(emitted.json.as_bytes())?;
    } else {
        stdout.write_all(emitted.text.as_bytes())?;
    }
    if let Some(path) = &cli.out {
        let body = if path.extension().is_some_and(|e| e == "csv") { &emitted.csv } else { &emitted.json };
        std::fs::write(path, body)?;
    }
    if cli.strict && !emitted.failures.is_empty() {
        return Err(CliError::Strict(emitted.failures.join("; ")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn tmp(name: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("nlqm-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("nlqm").chain(args.iter().copied())).unwrap()
    }

    fn run_to_string(args: &[&str]) -> (Result<(), CliError>, String) {
        let mut out = Vec::new();
        let r = run(&cli(args), &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn bbm_signal_default_matches_golden_file() {
        let (r, out) = run_to_string(&["bbm-signal", "--json"]);
        r.unwrap();
        assert_eq!(out, include_str!("../tests/golden/bbm-signal.json"));
    }

    #[test]
    fn bbm_signal_text_prints_exact_chain() {
        let path = tmp("bbm-half.json");
        std::fs::write(&path, r#"{"b": 0.5}"#).unwrap();
        let (r, out) = run_to_string(&["bbm-signal", "--config", path.to_str().unwrap()]);
        r.unwrap();
        assert!(out.contains("raw            -32/3*pi*sqrt(3)"), "{out}");
        assert!(out.contains("norm           1/3*pi*sqrt(3)"), "{out}");
        assert!(out.contains("signal         32*b"), "{out}");
        assert!(out.contains("signal(b=0.5)  16"), "{out}");
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let a = execute(Command::DgWerner, None).unwrap();
        let b = execute(Command::DgWerner, None).unwrap();
        assert_eq!(a.json, b.json);
        assert_eq!(a.csv, b.csv);
    }

    #[test]
    fn json_report_is_schema_valid() {
        let (r, out) = run_to_string(&["dg-werner", "--json", "--threads", "1"]);
        r.unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        validate("dg-werner", SchemaKind::Report, &v).unwrap();
        assert_eq!(v["rows"][0]["linearizable"], true);
    }

    #[test]
    fn every_subcommand_emits_schema_valid_json() {
        let small = json!({"grid": {"n": 64, "l": 10.0}});
        let configs = [
            (Command::BbmSignal, json!({"b": 0.25})),
            (Command::DgWerner, json!({"n": 2, "observable": "first-moment", "c0_imag": [[1.0, 0.5], [0.5, -0.5]]})),
            (Command::Simulate, json!({"grid": {"n": 64, "l": 8.0}, "evolve": {"dt": 1e-3, "steps": 40}, "orders": [1],
                "observable": {"type": "moment", "weight": {"type": "x2-squared"}, "region": {"type": "all"}}})),
            (Command::GaugeCheck, json!({"grid": {"n": 64, "l": 8.0}, "dt": 5e-4, "steps": 10})),
            (Command::Identical, json!({"grid": small["grid"], "ds": [2.0], "sigmas": [-1.0]})),
        ];
        for (cmd, cfg) in configs {
            let path = tmp(&format!("{}.json", cmd.name()));
            std::fs::write(&path, cfg.to_string()).unwrap();
            let emitted = execute(cmd, Some(&path)).unwrap();
            let v: Value = serde_json::from_str(&emitted.json).unwrap();
            validate(cmd.name(), SchemaKind::Report, &v).unwrap();
            assert!(emitted.csv.lines().count() >= 2, "{}: {}", cmd.name(), emitted.csv);
        }
    }

    #[test]
    fn out_path_extension_selects_format() {
        let csv_path = tmp("bbm.csv");
        let json_path = tmp("bbm.json");
        run_to_string(&["bbm-signal", "--out", csv_path.to_str().unwrap()]).0.unwrap();
        run_to_string(&["bbm-signal", "--out", json_path.to_str().unwrap()]).0.unwrap();
        let csv = std::fs::read_to_string(&csv_path).unwrap();
        assert!(csv.starts_with("quantity,value\nraw,-32/3*pi*sqrt(3)\n"), "{csv}");
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
        assert_eq!(v["signal"], "32*b");
    }

    #[test]
    fn invalid_configs_exit_with_two() {
        let cases = [
            json!({"b": "half"}),
            json!({"unknown": 1}),
            json!({"iterations": 9}),
        ];
        for c in cases {
            let e = parse_config::<commands::BbmConfig>(Command::BbmSignal, c.clone()).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{c}: {e}");
        }
        let path = tmp("broken.json");
        std::fs::write(&path, "{ not json").unwrap();
        let e = run_to_string(&["bbm-signal", "--config", path.to_str().unwrap()]).0.unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = run_to_string(&["bbm-signal", "--config", "/nonexistent/cfg.json"]).0.unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let bad_grid = json!({"grid": {"n": 48, "l": 8.0}, "orders": []});
        let cfg: commands::SimulateConfig = parse_config(Command::Simulate, bad_grid).unwrap();
        assert_eq!(commands::simulate(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn numerical_guard_exits_with_three() {
        let cfg = json!({
            "grid": {"n": 32, "l": 4.0},
                        "evolve": {"dt": 1e-3, "steps": 200, "drift_guard": 1e-14},
            "nonlinearity": {"type": "logarithmic", "b": 5.0},
            "orders": []
        });
        let cfg: commands::SimulateConfig = parse_config(Command::Simulate, cfg).unwrap();
        let e = commands::simulate(&cfg).unwrap_err();
        assert_eq!(e.exit_code(), 3, "{e}");
    }

    #[test]
    fn strict_mode_fails_only_with_failing_rows() {
        let mut emitted = execute(Command::BbmSignal, None).unwrap();
        let mut sink = Vec::new();
        finish(&cli(&["bbm-signal", "--strict"]), &emitted, &mut sink).unwrap();
        emitted.failures.push("n = 3: inconclusive".into());
        finish(&cli(&["bbm-signal"]), &emitted, &mut sink).unwrap();
        let e = finish(&cli(&["bbm-signal", "--strict"]), &emitted, &mut sink).unwrap_err();
        assert_eq!(e.exit_code(), 4);
        assert!(e.to_string().contains("inconclusive"), "{e}");
    }

    #[test]
    fn dump_is_written_for_simulate() {
        let dump = tmp("final.bin");
        let cfg = json!({
            "grid": {"n": 32, "l": 6.0},
            "evolve": {"dt": 1e-3, "steps": 10},
            "orders": [],
            "dump": dump.to_str().unwrap()
        });
        let cfg: commands::SimulateConfig = parse_config(Command::Simulate, cfg).unwrap();
        let r = commands::simulate(&cfg).unwrap();
        assert_eq!(r.data.trace.len(), 2);
        let bytes = std::fs::read(&dump).unwrap();
        assert_eq!(bytes.len(), 24 + 32 * 32 * 16);
        let (psi, t) = nlqm_sim::dump::read_dump(&mut bytes.as_slice()).unwrap();
        assert_eq!(t, 10.0 * 1e-3);
        assert!((psi.norm_sq() - r.data.trace[1].norm).abs() < 1e-15);
    }
}
