//! Builds core model values from configuration sections, and their JSON
//! descriptions for output files.

use resiliency_core::lifetime::Family;
use resiliency_core::{
    KijimaVariant, LifetimeDistribution, PointProcessModel, RepairPolicy, Rocof,
};
use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::error::CliResult;

const ALL_PARAMS: &[&str] = &["rate", "shape", "scale", "log_mean", "log_sd"];

/// `<section>.family` plus that family's named parameters. `None` when the
/// section has no family and `required` is false.
pub fn distribution(cfg: &Config, section: &str, required: bool) -> CliResult<Option<LifetimeDistribution>> {
    let key = format!("{section}.family");
    let Some(name) = cfg.str(&key)? else {
        return if required { Err(cfg.missing(&key)) } else { Ok(None) };
    };
    let family = Family::from_name(name).ok_or_else(|| {
        cfg.invalid(
            &key,
            format!("= {name:?}: expected one of exponential, weibull, gamma, lognormal"),
        )
    })?;
    let names = LifetimeDistribution::parameter_names(family);
    for p in ALL_PARAMS {
        let k = format!("{section}.{p}");
        if !names.contains(p) && cfg.has(&k) {
            return Err(cfg.invalid(&k, format!("is not a parameter of {name} (expects {})", names.join(", "))));
        }
    }
    let values = names
        .iter()
        .map(|p| cfg.require_f64(&format!("{section}.{p}")))
        .collect::<CliResult<Vec<_>>>()?;
    LifetimeDistribution::from_parameters(family, &values)
        .map(Some)
        .map_err(|e| cfg.core_error(section, e))
}

pub fn model(cfg: &Config) -> CliResult<PointProcessModel> {
    let kind = cfg.str("model.kind")?.unwrap_or("hpp");
    let m = match kind {
        "hpp" => PointProcessModel::Hpp {
            rate: cfg.require_f64("model.rate")?,
        },
        "rp" => PointProcessModel::Renewal {
            ttf: required_dist(cfg)?,
        },
        "nhpp" => PointProcessModel::Nhpp { rocof: rocof(cfg)? },
        "grp" => PointProcessModel::Grp {
            ttf: required_dist(cfg)?,
            q: cfg.require_f64("model.q")?,
            variant: variant(cfg, "model.variant")?,
        },
        other => {
            return Err(cfg.invalid("model.kind", format!("= {other:?}: expected hpp, rp, nhpp or grp")))
        }
    };
    m.validate(None).map_err(|e| cfg.core_error("model", e))?;
    Ok(m)
}

fn required_dist(cfg: &Config) -> CliResult<LifetimeDistribution> {
    Ok(distribution(cfg, "dist", true)?.expect("required distribution"))
}

fn rocof(cfg: &Config) -> CliResult<Rocof> {
    let kind = cfg.str("model.rocof")?.unwrap_or("power_law");
    let (a, b) = match kind {
        "power_law" => ("lambda", "beta"),
        "log_linear" => ("alpha", "beta"),
        "linear" => ("a", "b"),
        other => {
            return Err(cfg.invalid(
                "model.rocof",
                format!("= {other:?}: expected power_law, log_linear or linear"),
            ))
        }
    };
    for p in ["lambda", "beta", "alpha", "a", "b"] {
        let k = format!("model.{p}");
        if p != a && p != b && cfg.has(&k) {
            return Err(cfg.invalid(&k, format!("is not a parameter of the {kind} ROCOF")));
        }
    }
    let x = cfg.require_f64(&format!("model.{a}"))?;
    let y = cfg.require_f64(&format!("model.{b}"))?;
    Ok(match kind {
        "power_law" => Rocof::PowerLaw { lambda: x, beta: y },
        "log_linear" => Rocof::LogLinear { alpha: x, beta: y },
        _ => Rocof::Linear { a: x, b: y },
    })
}

pub fn variant(cfg: &Config, key: &str) -> CliResult<KijimaVariant> {
    match cfg.str(key)? {
        None => Ok(KijimaVariant::KijimaI),
        Some(v) => KijimaVariant::from_name(v)
            .ok_or_else(|| cfg.invalid(key, format!("= {v:?}: expected kijima1 or kijima2"))),
    }
}

pub fn repair(cfg: &Config) -> CliResult<RepairPolicy> {
    let kind = cfg.str("repair.kind")?.unwrap_or("instantaneous");
    let policy = match kind {
        "instantaneous" => RepairPolicy::Instantaneous,
        "fixed" => RepairPolicy::Fixed {
            duration: cfg.require_f64("repair.duration")?,
        },
        "distributed" => RepairPolicy::Distributed {
            dist: distribution(cfg, "repair", true)?.expect("required distribution"),
        },
        other => {
            return Err(cfg.invalid(
                "repair.kind",
                format!("= {other:?}: expected instantaneous, fixed or distributed"),
            ))
        }
    };
    if kind != "fixed" && cfg.has("repair.duration") {
        return Err(cfg.invalid("repair.duration", format!("does not apply to {kind} repair")));
    }
    if kind != "distributed" && cfg.has("repair.family") {
        return Err(cfg.invalid("repair.family", format!("does not apply to {kind} repair")));
    }
    policy.validate().map_err(|e| cfg.core_error("repair", e))?;
    Ok(policy)
}

pub fn dist_json(d: &LifetimeDistribution) -> Value {
    let mut m = Map::new();
    m.insert("family".into(), json!(d.family().name()));
    for (name, v) in d.parameters() {
        m.insert(name.into(), json!(v));
    }
    Value::Object(m)
}

pub fn rocof_json(r: &Rocof) -> Value {
    match *r {
        Rocof::PowerLaw { lambda, beta } => json!({"kind": "power_law", "lambda": lambda, "beta": beta}),
        Rocof::LogLinear { alpha, beta } => json!({"kind": "log_linear", "alpha": alpha, "beta": beta}),
        Rocof::Linear { a, b } => json!({"kind": "linear", "a": a, "b": b}),
    }
}

pub fn model_json(m: &PointProcessModel) -> Value {
    match m {
        PointProcessModel::Hpp { rate } => json!({"kind": "hpp", "rate": rate}),
        PointProcessModel::Renewal { ttf } => json!({"kind": "rp", "dist": dist_json(ttf)}),
        PointProcessModel::Nhpp { rocof } => json!({"kind": "nhpp", "rocof": rocof_json(rocof)}),
        PointProcessModel::Grp { ttf, q, variant } => json!({
            "kind": "grp",
            "dist": dist_json(ttf),
            "q": q,
            "variant": variant.name(),
        }),
    }
}

pub fn repair_json(p: &RepairPolicy) -> Value {
    match p {
        RepairPolicy::Instantaneous => json!({"kind": "instantaneous"}),
        RepairPolicy::Fixed { duration } => json!({"kind": "fixed", "duration": duration}),
        RepairPolicy::Distributed { dist } => json!({"kind": "distributed", "dist": dist_json(dist)}),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(sets: &[&str]) -> Config {
        let sets: Vec<String> = sets.iter().map(|s| s.to_string()).collect();
        Config::load(None, &sets).unwrap()
    }

    #[test]
    fn builds_each_model_kind() {
        assert_eq!(model(&cfg(&["model.rate=0.5"])).unwrap(), PointProcessModel::Hpp { rate: 0.5 });
        let rp = model(&cfg(&["model.kind=rp", "dist.family=weibull", "dist.shape=2", "dist.scale=3"])).unwrap();
        assert_eq!(rp.name(), "rp");
        let nhpp = model(&cfg(&["model.kind=nhpp", "model.rocof=linear", "model.a=1", "model.b=0.1"])).unwrap();
        assert_eq!(nhpp, PointProcessModel::Nhpp { rocof: Rocof::Linear { a: 1.0, b: 0.1 } });
        let grp = model(&cfg(&[
            "model.kind=grp",
            "model.q=0.3",
            "model.variant=kijima2",
            "dist.family=exponential",
            "dist.rate=1",
        ]))
        .unwrap();
        assert!(matches!(grp, PointProcessModel::Grp { variant: KijimaVariant::KijimaII, .. }));
    }

    #[test]
    fn parameter_errors_point_at_the_key() {
        let e = model(&cfg(&["model.kind=rp", "dist.family=weibull", "dist.shape=-1", "dist.scale=3"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("dist.shape"), "{e}");
        let e = model(&cfg(&["model.kind=rp", "dist.family=weibull", "dist.rate=1", "dist.scale=3"])).unwrap_err();
        assert!(e.to_string().contains("dist.rate"), "{e}");
        let e = repair(&cfg(&["repair.kind=sometimes"])).unwrap_err();
        assert!(e.to_string().contains("repair.kind"), "{e}");
    }
}
