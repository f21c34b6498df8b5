use std::fmt::Write as _;

use resiliency_core::pointproc::{analytic_expected_count, Estimate};
use resiliency_core::{Error as CoreError, SimulationConfig, Simulator};
use serde_json::json;

use super::{Report, RunContext};
use crate::error::{CliError, CliResult};
use crate::io::{event_log_csv, num, SCHEMA_VERSION};
use crate::spec;

pub const DEFAULT_SEED: u64 = 42;

/// `--seed` if given, else `sim.seed`, else 42. `-1` draws a seed from the
/// operating system.
pub fn resolve_seed(ctx: &RunContext) -> CliResult<u64> {
    let cfg = &ctx.config;
    let (raw, key) = match ctx.seed {
        Some(s) => (s, "--seed"),
        None => match cfg.i64("sim.seed")? {
            Some(s) => (s, "sim.seed"),
            None => return Ok(DEFAULT_SEED),
        },
    };
    match raw {
        -1 => {
            let s = getrandom::u64().map_err(|e| CliError::Io {
                context: "seed from entropy".into(),
                source: std::io::Error::other(e.to_string()),
            })?;
            // Keep it representable as a non-negative `--seed` for replay.
            Ok(s >> 1)
        }
        s if s >= 0 => Ok(s as u64),
        s if key == "--seed" => Err(CliError::Config(format!(
            "--seed {s}: must be a non-negative integer or -1"
        ))),
        s => Err(cfg.invalid(key, format!("= {s}: must be a non-negative integer or -1"))),
    }
}

pub fn run(ctx: &RunContext) -> CliResult<Report> {
    let cfg = &ctx.config;
    let horizon = cfg.positive_or("sim.horizon", 10.0)?;
    let trajectories = cfg.usize_or("sim.trajectories", 1000)?;
    if trajectories == 0 {
        return Err(cfg.invalid("sim.trajectories", "must be at least 1"));
    }
    let mode = cfg.str("sim.mode")?.unwrap_or("summary");
    if mode != "summary" && mode != "histories" {
        return Err(cfg.invalid("sim.mode", format!("= {mode:?}: expected summary or histories")));
    }
    let points = cfg.usize_or("sim.points", 101)?;
    if points < 2 {
        return Err(cfg.invalid("sim.points", "must be at least 2"));
    }
    let seed = resolve_seed(ctx)?;
    let model = spec::model(cfg)?;
    let repair = spec::repair(cfg)?;
    let mut sc = SimulationConfig::new(horizon, trajectories, seed).map_err(|e| cfg.core_error("sim", e))?;
    if let Some(w) = cfg.f64("sim.rocof_window")? {
        sc = sc
            .with_rocof_window(w)
            .map_err(|_| cfg.invalid("sim.rocof_window", format!("= {w}: must be positive")))?;
    }
    let sim = Simulator::new(model, repair, sc).map_err(|e| match e {
        CoreError::ModelValidity(_) => CliError::core("simulate", e),
        other => cfg.core_error("model", other),
    })?;

    let mut report = Report::default();
    let mut files = Vec::new();
    let mut summary = serde_json::Value::Null;
    if mode == "histories" {
        let width = (trajectories - 1).to_string().len().max(6);
        for i in 0..trajectories {
            let h = sim.simulate_history(i).map_err(|e| CliError::core("simulate", e))?;
            let name = format!("histories/trajectory_{i:0width$}.csv");
            report.outputs.add(name.clone(), event_log_csv(&h, model.name()));
            files.push(name);
        }
        report
            .lines
            .push(format!("simulated {trajectories} histories of {} up to t = {horizon}", model.name()));
    } else {
        let times: Vec<f64> = (0..points)
            .map(|i| if i + 1 == points { horizon } else { horizon * i as f64 / (points - 1) as f64 })
            .collect();
        let fail = |e| CliError::core("simulate", e);
        let counts = sim.expected_count_curve(&times).map_err(fail)?;
        let avail = sim.availability_curve(&times).map_err(fail)?;
        let rocof = rocof_curve(&sim, &times)?;

        let mut count_csv = String::from("t,mean,std_error,analytic\n");
        for (t, e) in times.iter().zip(&counts) {
            let exact = if sim.policy().is_instantaneous() {
                analytic_expected_count(&model, *t).map_err(fail)?
            } else {
                None
            };
            let exact = exact.map(num).unwrap_or_default();
            writeln!(count_csv, "{},{},{},{exact}", num(*t), num(e.value), num(e.std_error)).unwrap();
        }
        report.outputs.add("count_curve.csv", count_csv.into_bytes());
        report.outputs.add("availability_curve.csv", curve_csv(&times, &avail));
        report.outputs.add("rocof_curve.csv", curve_csv(&times, &rocof));
        files.extend(["count_curve.csv", "availability_curve.csv", "rocof_curve.csv"].map(String::from));

        let last = counts.last().expect("grid has at least two points");
        let last_avail = avail.last().expect("grid has at least two points");
        report.lines.push(format!(
            "expected failures by t = {horizon}: {} (se {})",
            num(last.value),
            num(last.std_error)
        ));
        summary = json!({
            "expected_count": {"mean": last.value, "std_error": last.std_error},
            "availability": {"mean": last_avail.value, "std_error": last_avail.std_error},
        });
    }
    files.push("simulate.json".into());
    report.outputs.add_json(
        "simulate.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "simulate",
            "model": spec::model_json(&model),
            "repair": spec::repair_json(&repair),
            "horizon": horizon,
            "trajectories": trajectories,
            "seed": seed,
            "mode": mode,
            "points": if mode == "summary" { json!(points) } else { json!(null) },
            "rocof_window": sim.config().rocof_window(),
            "at_horizon": summary,
            "files": files,
        }),
    );
    Ok(report)
}

/// ROCOF curve; a singular analytic value at `t = 0` is written as `inf`.
fn rocof_curve(sim: &Simulator, times: &[f64]) -> CliResult<Vec<Estimate>> {
    match sim.rocof_curve(times) {
        Ok(c) => Ok(c),
        Err(CoreError::Singularity(_)) => times
            .iter()
            .map(|&t| match sim.rocof_at(t) {
                Err(CoreError::Singularity(_)) => Ok(Estimate {
                    value: f64::INFINITY,
                    std_error: 0.0,
                    method: resiliency_core::pointproc::EstimateMethod::Analytic,
                }),
                other => other.map_err(|e| CliError::core("simulate", e)),
            })
            .collect(),
        Err(e) => Err(CliError::core("simulate", e)),
    }
}

fn curve_csv(times: &[f64], est: &[Estimate]) -> Vec<u8> {
    let mut s = String::from("t,mean,std_error\n");
    for (t, e) in times.iter().zip(est) {
        writeln!(s, "{},{},{}", num(*t), num(e.value), num(e.std_error)).unwrap();
    }
    s.into_bytes()
}
