use resiliency_core::RiskPortfolio;
use serde_json::{json, Value};

use super::{Report, RunContext};
use crate::error::{CliError, CliResult};
use crate::io::{num, read_portfolio, SCHEMA_VERSION};

pub fn run(ctx: &RunContext) -> CliResult<Report> {
    let cfg = &ctx.config;
    let path = cfg
        .existing_path("risk.portfolio")?
        .ok_or_else(|| cfg.missing("risk.portfolio"))?;
    let normalized = cfg.bool("risk.normalized")?.unwrap_or(false);
    let want_proxy = cfg.bool("risk.proxy")?.unwrap_or(normalized);
    let scenarios = read_portfolio(&path)?;
    let portfolio = RiskPortfolio::new(scenarios, normalized)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let proxy = if want_proxy {
        let p = portfolio
            .reliability_proxy()
            .map_err(|e| CliError::core(cfg.locate("risk.proxy"), e))?;
        json!({"value": p.value, "saturated": p.saturated})
    } else {
        Value::Null
    };
    let rows: Vec<Value> = portfolio
        .scenarios()
        .iter()
        .map(|s| {
            json!({
                "id": s.id(),
                "description": s.description(),
                "consequence": s.consequence(),
                "probability": s.probability(),
                "risk": s.risk(),
            })
        })
        .collect();
    let system_risk = portfolio.system_risk();

    let mut report = Report::default();
    report.outputs.add_json(
        "risk.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "risk",
            "portfolio": path.display().to_string(),
            "normalized": normalized,
            "scenarios": rows,
            "system_risk": system_risk,
            "reliability_proxy": proxy,
        }),
    );
    report.lines.push(format!(
        "system risk {} over {} scenario(s)",
        num(system_risk),
        portfolio.len()
    ));
    Ok(report)
}
