use resiliency_core::resiliency::{mission_resiliency, recovered_reliability, AssessmentFlag};
use resiliency_core::{Error as CoreError, LifetimeDistribution, MissionContext, ResiliencyEvent};
use serde_json::{json, Value};

use super::{Report, RunContext};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::io::{num, SCHEMA_VERSION};
use crate::spec;

pub const DEFAULT_T_MISSION: f64 = 100.0;

/// The `[[event]]` blocks, in file order.
pub fn events(cfg: &Config) -> CliResult<Vec<ResiliencyEvent>> {
    (0..cfg.event_count())
        .map(|i| {
            let key = |k: &str| format!("event[{i}].{k}");
            let ev = ResiliencyEvent::new(
                cfg.require_f64(&key("t_fail"))?,
                cfg.require_f64(&key("t_res"))?,
                cfg.require_f64(&key("q_res"))?,
            );
            ev.map_err(|e| cfg.core_error(&format!("event[{i}]"), e))
        })
        .collect()
}

pub fn mission(cfg: &Config, baseline: Option<LifetimeDistribution>) -> CliResult<MissionContext> {
    let t = cfg.positive_or("mission.t_mission", DEFAULT_T_MISSION)?;
    MissionContext::new(t, baseline).map_err(|e| cfg.core_error("mission", e))
}

/// Events outside the mission window are event-validation failures here.
pub fn event_error(context: &str, e: CoreError) -> CliError {
    match e {
        CoreError::Domain(msg) => CliError::core(context, CoreError::EventValidation(msg)),
        other => CliError::core(context, other),
    }
}

pub fn run(ctx: &RunContext) -> CliResult<Report> {
    let cfg = &ctx.config;
    let baseline = spec::distribution(cfg, "dist", false)?;
    let mission = mission(cfg, baseline)?;
    let evs = events(cfg)?;
    let a = mission_resiliency(&evs, &mission).map_err(|e| event_error("resiliency", e))?;

    let per_event: Vec<Value> = a
        .per_event
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let ev = e.event;
            let rec = recovered_reliability(ev.q_res()).expect("validated degree");
            json!({
                "index": i,
                "t_fail": ev.t_fail(),
                "t_res": ev.t_res(),
                "q_res": ev.q_res(),
                "t_recovered": ev.t_recovered(),
                "rho_r": e.rho_r,
                "degree": e.degree.map(|d| d.label()),
                "recovered_reliability": rec.value,
                "better_than_new": rec.better_than_new,
            })
        })
        .collect();
    let flags: Vec<Value> = a
        .flags
        .iter()
        .map(|f| match f {
            AssessmentFlag::NoEvents => json!({"kind": "no_events"}),
            AssessmentFlag::BetterThanNew { event } => json!({"kind": "better_than_new", "event": event}),
        })
        .collect();

    let mut report = Report::default();
    report.outputs.add_json(
        "resiliency.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "resiliency",
            "t_mission": mission.t_mission(),
            "baseline": mission.baseline().map(spec::dist_json),
            "events": per_event,
            "mission_rho": a.mission_rho,
            "flags": flags,
        }),
    );
    report.lines.push(format!(
        "mission resiliency {} over {} event(s)",
        num(a.mission_rho),
        evs.len()
    ));
    Ok(report)
}
