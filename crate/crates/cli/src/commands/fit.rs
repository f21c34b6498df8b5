use std::fmt::Write as _;

use resiliency_core::estimation::{
    fit_grp_with, model_select, trend_test, Candidate, FitResult, GrpSearch, ObservedEvents, Trend,
    Truncation, MIN_FAILURES_GRP, MIN_FAILURES_HPP, MIN_FAILURES_NHPP, MIN_FAILURES_RENEWAL,
};
use resiliency_core::Error as CoreError;
use serde_json::{json, Value};

use super::{Report, RunContext};
use crate::error::{core_exit_code, CliError, CliResult};
use crate::io::{num, read_event_log, SCHEMA_VERSION};
use crate::spec;

pub const DEFAULT_CANDIDATES: &[&str] = &[
    "hpp",
    "crow_amsaa",
    "rp_exponential",
    "rp_weibull",
    "rp_gamma",
    "rp_lognormal",
    "grp_weibull",
];

pub fn min_failures(c: &Candidate) -> usize {
    match c {
        Candidate::Hpp => MIN_FAILURES_HPP,
        Candidate::CrowAmsaa => MIN_FAILURES_NHPP,
        Candidate::Renewal(_) => MIN_FAILURES_RENEWAL,
        Candidate::Grp(..) => MIN_FAILURES_GRP,
    }
}

fn minima(cands: &[Candidate]) -> String {
    cands
        .iter()
        .map(|c| format!("{} needs {}", c.name(), min_failures(c)))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn run(ctx: &RunContext) -> CliResult<Report> {
    let cfg = &ctx.config;
    let path = cfg.existing_path("fit.events")?.ok_or_else(|| cfg.missing("fit.events"))?;
    let variant = spec::variant(cfg, "fit.variant")?;
    let names = cfg
        .str_list("fit.candidates")?
        .unwrap_or_else(|| DEFAULT_CANDIDATES.iter().map(|s| s.to_string()).collect());
    if names.is_empty() {
        return Err(cfg.invalid("fit.candidates", "must name at least one model"));
    }
    let mut candidates = Vec::with_capacity(names.len());
    for n in &names {
        let c = Candidate::parse(n, variant).ok_or_else(|| {
            cfg.invalid(
                "fit.candidates",
                format!("names unknown model {n:?}: expected hpp, crow_amsaa, rp_<family> or grp_<family>"),
            )
        })?;
        if !candidates.contains(&c) {
            candidates.push(c);
        }
    }
    let search = GrpSearch {
        q_min: cfg.f64("fit.q_min")?.unwrap_or(0.0),
        q_max: cfg.f64("fit.q_max")?.unwrap_or(2.0),
        grid_points: cfg.usize_or("fit.grid_points", 21)?,
        fixed_q: cfg.f64("fit.fixed_q")?,
        ..GrpSearch::default()
    };

    let log = read_event_log(&path)?;
    let truncation = match cfg.str("fit.truncation")? {
        None if log.horizon.is_some() || cfg.has("fit.observation_end") => Truncation::TimeTruncated,
        None | Some("failure") => Truncation::FailureTruncated,
        Some("time") => Truncation::TimeTruncated,
        Some(other) => {
            return Err(cfg.invalid("fit.truncation", format!("= {other:?}: expected time or failure")))
        }
    };
    if log.failures.is_empty() {
        return Err(CliError::InsufficientData(format!(
            "{}: no failures in the event log; {}",
            path.display(),
            minima(&candidates)
        )));
    }
    let end = match (cfg.f64("fit.observation_end")?, truncation) {
        (Some(t), _) => t,
        (None, Truncation::FailureTruncated) => *log.failures.last().expect("non-empty"),
        (None, Truncation::TimeTruncated) => log.horizon.ok_or_else(|| {
            cfg.invalid(
                "fit.truncation",
                "= \"time\" needs `fit.observation_end` or a `# horizon=` line in the event log",
            )
        })?,
    };
    let obs = match &log.repairs {
        Some(r) => ObservedEvents::with_repairs(log.failures.clone(), r.clone(), end, truncation),
        None => ObservedEvents::new(log.failures.clone(), end, truncation),
    }
    .map_err(|e| match e {
        CoreError::EventValidation(_) => CliError::core(path.display().to_string(), e),
        other => cfg.core_error("fit", other),
    })?;

    let mut selection = model_select(&obs, &candidates).map_err(|e| CliError::core("fit", e))?;
    // Custom GRP search settings replace the default-search fits.
    if search != GrpSearch::default() {
        selection = reselect_grp(&obs, &candidates, &search, selection);
    }
    if selection.ranked.is_empty() {
        let (_, first) = &selection.failed[0];
        if selection
            .failed
            .iter()
            .any(|(_, e)| matches!(e, CoreError::InsufficientData { .. }))
        {
            return Err(CliError::InsufficientData(format!(
                "{}: {} failures are too few for every candidate; {}",
                path.display(),
                obs.len(),
                minima(&candidates)
            )));
        }
        return Err(CliError::core("fit", first.clone()));
    }

    let n = obs.len();
    let best_aic = selection.ranked[0].1.aic;
    let fits: Vec<Value> = selection
        .ranked
        .iter()
        .enumerate()
        .map(|(i, (c, f))| fit_json(i + 1, c, f, n, best_aic))
        .collect();
    let failed: Vec<Value> = selection
        .failed
        .iter()
        .map(|(c, e)| json!({"candidate": c.name(), "error": e.to_string(), "exit_code": core_exit_code(e)}))
        .collect();
    let trend = match trend_test(&obs) {
        Ok(t) => json!({
            "beta": t.beta,
            "laplace": t.laplace,
            "p_value": t.p_value,
            "trend": match t.trend {
                Trend::TrendFree => "trend_free",
                Trend::Deteriorating => "deteriorating",
                Trend::Improving => "improving",
            },
        }),
        Err(_) => Value::Null,
    };

    let mut report = Report::default();
    report.outputs.add_json(
        "fit.json",
        &json!({
            "schema_version": SCHEMA_VERSION,
            "command": "fit",
            "events": path.display().to_string(),
            "failures": n,
            "observation_end": end,
            "truncation": match truncation {
                Truncation::TimeTruncated => "time",
                Truncation::FailureTruncated => "failure",
            },
            "fits": fits,
            "failed": failed,
            "ranking": selection.ranked.iter().map(|(c, _)| c.name()).collect::<Vec<_>>(),
            "trend": trend,
        }),
    );
    let mut csv = String::from("rank,candidate,aic,delta_aic,log_likelihood,free_parameters\n");
    for (i, (c, f)) in selection.ranked.iter().enumerate() {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            i + 1,
            c.name(),
            num(f.aic),
            num(f.aic - best_aic),
            num(f.log_likelihood),
            f.free_parameters
        )
        .unwrap();
    }
    report.outputs.add("ranking.csv", csv.into_bytes());
    let (best, best_fit) = &selection.ranked[0];
    report.lines.push(format!(
        "best model: {} (AIC {}) from {n} failures",
        best.name(),
        num(best_fit.aic)
    ));
    for (c, e) in &selection.failed {
        report.warnings.push(format!("{} not fitted: {e}", c.name()));
    }
    Ok(report)
}

fn reselect_grp(
    obs: &ObservedEvents,
    candidates: &[Candidate],
    search: &GrpSearch,
    mut sel: resiliency_core::estimation::Selection,
) -> resiliency_core::estimation::Selection {
    sel.ranked.retain(|(c, _)| !matches!(c, Candidate::Grp(..)));
    sel.failed.retain(|(c, _)| !matches!(c, Candidate::Grp(..)));
    for c in candidates {
        if let Candidate::Grp(f, v) = *c {
            match fit_grp_with(obs, f, v, search) {
                Ok(fit) => sel.ranked.push((*c, fit)),
                Err(e) => sel.failed.push((*c, e)),
            }
        }
    }
    let order = |c: &Candidate| candidates.iter().position(|x| x == c).unwrap_or(usize::MAX);
    sel.failed.sort_by_key(|(c, _)| order(c));
    sel.ranked.sort_by(|(ca, a), (cb, b)| {
        let tie = 1e-9 * a.aic.abs().max(1.0);
        if (a.aic - b.aic).abs() <= tie {
            a.free_parameters.cmp(&b.free_parameters).then(order(ca).cmp(&order(cb)))
        } else {
            a.aic.total_cmp(&b.aic)
        }
    });
    sel
}

fn fit_json(rank: usize, c: &Candidate, f: &FitResult, n: usize, best_aic: f64) -> Value {
    json!({
        "rank": rank,
        "candidate": c.name(),
        "model": spec::model_json(&f.model),
        "log_likelihood": f.log_likelihood,
        "aic": f.aic,
        "delta_aic": f.aic - best_aic,
        "bic": f.bic(n),
        "free_parameters": f.free_parameters,
        "convergence": {
            "iterations": f.convergence.iterations,
            "bracket_width": f.convergence.bracket_width,
            "gradient_norm": f.convergence.gradient_norm,
        },
        "notes": f.notes.iter().map(|n| n.label()).collect::<Vec<_>>(),
    })
}
