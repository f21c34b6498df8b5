use std::fmt::Write as _;

use resiliency_core::resiliency::{performance_trajectory, TrajectoryOptions};
use resiliency_core::{LifetimeDistribution, ResiliencyEvent};

use super::resiliency::{event_error, events, mission};
use super::{Report, RunContext};
use crate::error::CliResult;
use crate::io::num;
use crate::spec;

/// Baseline used when the config has no `[dist]` section.
pub fn default_baseline() -> LifetimeDistribution {
    LifetimeDistribution::weibull(2.0, 100.0).expect("valid default")
}

/// Event used when the config has no `[[event]]` blocks.
pub fn default_event() -> ResiliencyEvent {
    ResiliencyEvent::new(40.0, 15.0, 0.2).expect("valid default")
}

pub fn run(ctx: &RunContext) -> CliResult<Report> {
    let cfg = &ctx.config;
    let baseline = spec::distribution(cfg, "dist", false)?.unwrap_or_else(default_baseline);
    let mission = mission(cfg, Some(baseline))?;
    let evs = events(cfg)?;
    let index = cfg.usize_or("trajectory.event", 0)?;
    let event = if evs.is_empty() && index == 0 {
        default_event()
    } else {
        *evs.get(index).ok_or_else(|| {
            cfg.invalid(
                "trajectory.event",
                format!("= {index}: only {} [[event]] block(s) given", evs.len()),
            )
        })?
    };
    let options = TrajectoryOptions {
        resolution: cfg.usize_or("trajectory.resolution", 101)?,
        outage_level: cfg.f64("trajectory.outage_level")?.unwrap_or(0.0),
    };
    if options.resolution < 2 {
        return Err(cfg.invalid("trajectory.resolution", "must be at least 2"));
    }
    let traj = performance_trajectory(&mission, &event, options).map_err(|e| match e {
        resiliency_core::Error::InvalidParameter { .. } => cfg.core_error("trajectory", e),
        other => event_error("trajectory", other),
    })?;

    let mut csv = String::from("t,level,segment\n");
    for s in &traj.samples {
        writeln!(csv, "{},{},{}", num(s.t), num(s.level), s.segment.label()).unwrap();
    }
    let mut report = Report::default();
    report.outputs.add("trajectory.csv", csv.into_bytes());
    report.lines.push(format!(
        "{} trajectory samples over [0, {}]",
        traj.samples.len(),
        num(mission.t_mission())
    ));
    Ok(report)
}
