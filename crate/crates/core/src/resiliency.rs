//! Reactive resiliency of a system that fails during a mission and recovers.
//!
//! A recovery is described by when the failure happened (`t_fail`), how long
//! the resiliency actions took (`t_res`) and the resiliency degree `q_res`,
//! which is one minus the reliability the system is restored to:
//!
//! ```text
//! ρ_r = (1 - q_res) · (1 - t_res / (t_mission - t_fail))
//! ```
//!
//! clamped to zero once the recovery takes at least the remaining mission.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lifetime::LifetimeDistribution;

/// Absolute tolerance for degree classification boundaries.
pub const DEGREE_TOLERANCE: f64 = 1e-9;

/// One failure and its recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResiliencyEvent {
    t_fail: f64,
    t_res: f64,
    q_res: f64,
}

impl ResiliencyEvent {
    pub fn new(t_fail: f64, t_res: f64, q_res: f64) -> Result<Self> {
        if !(t_fail.is_finite() && t_fail >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_fail",
                value: t_fail,
                reason: "must be finite and non-negative",
            });
        }
        if !(t_res >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_res",
                value: t_res,
                reason: "must be non-negative",
            });
        }
        check_degree(q_res)?;
        Ok(Self { t_fail, t_res, q_res })
    }

    pub fn t_fail(&self) -> f64 {
        self.t_fail
    }

    pub fn t_res(&self) -> f64 {
        self.t_res
    }

    pub fn q_res(&self) -> f64 {
        self.q_res
    }

    /// Time operation resumes.
    pub fn t_recovered(&self) -> f64 {
        self.t_fail + self.t_res
    }

    pub fn is_better_than_new(&self) -> bool {
        self.q_res < 0.0
    }
}

fn check_degree(q_res: f64) -> Result<()> {
    if q_res.is_nan() || q_res > 1.0 || q_res == f64::NEG_INFINITY {
        return Err(Error::Domain(format!(
            "resiliency degree {q_res} must be at most 1 (recovered reliability cannot be negative)"
        )));
    }
    Ok(())
}

/// Mission lifetime and, optionally, the baseline lifetime law used for
/// degree classification and performance trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionContext {
    t_mission: f64,
    baseline: Option<LifetimeDistribution>,
}

impl MissionContext {
    pub fn new(t_mission: f64, baseline: Option<LifetimeDistribution>) -> Result<Self> {
        crate::error::check_positive("t_mission", t_mission)?;
        Ok(Self { t_mission, baseline })
    }

    pub fn t_mission(&self) -> f64 {
        self.t_mission
    }

    pub fn baseline(&self) -> Option<&LifetimeDistribution> {
        self.baseline.as_ref()
    }

    fn require_baseline(&self) -> Result<&LifetimeDistribution> {
        self.baseline.as_ref().ok_or_else(|| {
            Error::Precondition("a baseline lifetime distribution is required".into())
        })
    }
}

/// Reactive resiliency `ρ_r` of one event.
///
/// Exactly `0` when `t_res >= t_mission - t_fail` and exactly `1 - q_res`
/// when `t_res = 0`. Exceeds one only for better-than-new recoveries.
pub fn reactive_resiliency(event: &ResiliencyEvent, ctx: &MissionContext) -> Result<f64> {
    let remaining = ctx.t_mission - event.t_fail;
    if !(remaining > 0.0) {
        return Err(Error::Domain(format!(
            "failure at {} is not inside the mission [0, {})",
            event.t_fail, ctx.t_mission
        )));
    }
    if event.t_res >= remaining {
        return Ok(0.0);
    }
    Ok((1.0 - event.q_res) * (1.0 - event.t_res / remaining))
}

/// Reliability restored by the resiliency actions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveredReliability {
    pub value: f64,
    /// Set when `value > 1`, which has no probability interpretation.
    pub better_than_new: bool,
}

pub fn recovered_reliability(q_res: f64) -> Result<RecoveredReliability> {
    check_degree(q_res)?;
    Ok(RecoveredReliability {
        value: 1.0 - q_res,
        better_than_new: q_res < 0.0,
    })
}

/// Resiliency degrees, ordered from best to worst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ResiliencyDegree {
    BetterThanNew,
    GoodAsNew,
    /// Restored above the reliability held just before the failure but not
    /// to as-new.
    PartialRecovery,
    SameAsOld,
    WorseThanOld,
}

impl ResiliencyDegree {
    pub fn label(self) -> &'static str {
        match self {
            ResiliencyDegree::BetterThanNew => "BetterThanNew",
            ResiliencyDegree::GoodAsNew => "GoodAsNew",
            ResiliencyDegree::PartialRecovery => "PartialRecovery",
            ResiliencyDegree::SameAsOld => "SameAsOld",
            ResiliencyDegree::WorseThanOld => "WorseThanOld",
        }
    }
}

/// Classifies `q_res` against `F(t_fail)` of the baseline: restoring
/// reliability `1 - F(t_fail)` is same-as-old.
pub fn classify_degree(q_res: f64, ctx: &MissionContext, t_fail: f64) -> Result<ResiliencyDegree> {
    let baseline = ctx.require_baseline()?;
    check_degree(q_res)?;
    if !(t_fail >= 0.0 && t_fail < ctx.t_mission) {
        return Err(Error::Domain(format!(
            "failure at {t_fail} is not inside the mission [0, {})",
            ctx.t_mission
        )));
    }
    let f_prior = baseline.cdf_at(t_fail)?;
    let tol = DEGREE_TOLERANCE;
    Ok(if q_res.abs() <= tol {
        ResiliencyDegree::GoodAsNew
    } else if q_res < 0.0 {
        ResiliencyDegree::BetterThanNew
    } else if (q_res - f_prior).abs() <= tol {
        ResiliencyDegree::SameAsOld
    } else if q_res < f_prior {
        ResiliencyDegree::PartialRecovery
    } else {
        ResiliencyDegree::WorseThanOld
    })
}

/// Virtual age matching a resiliency degree: the age `v` with
/// `R(v) = 1 - q_res`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeAge {
    pub age: f64,
    /// `q_res < 0`: no age below new exists, so `age` is 0.
    pub better_than_new: bool,
}

pub fn virtual_age_of_degree(q_res: f64, baseline: &LifetimeDistribution) -> Result<DegreeAge> {
    check_degree(q_res)?;
    if q_res >= 1.0 {
        return Err(Error::Domain(
            "resiliency degree 1 leaves zero reliability; no finite virtual age".into(),
        ));
    }
    if q_res < 0.0 {
        return Ok(DegreeAge {
            age: 0.0,
            better_than_new: true,
        });
    }
    Ok(DegreeAge {
        age: baseline.quantile(q_res)?,
        better_than_new: false,
    })
}

/// Diagnostics attached to an assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssessmentFlag {
    NoEvents,
    /// Event at this index recovered above as-new reliability.
    BetterThanNew { event: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventAssessment {
    pub event: ResiliencyEvent,
    pub rho_r: f64,
    /// Present when the mission context has a baseline.
    pub degree: Option<ResiliencyDegree>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResiliencyAssessment {
    pub per_event: Vec<EventAssessment>,
    /// Minimum of the per-event values; 1 for an event-free mission.
    pub mission_rho: f64,
    pub flags: Vec<AssessmentFlag>,
}

/// Assesses every event of a mission and aggregates with the minimum.
///
/// Events must be sorted by failure time and each outage must end before
/// the next failure.
pub fn mission_resiliency(events: &[ResiliencyEvent], ctx: &MissionContext) -> Result<ResiliencyAssessment> {
    for (i, pair) in events.windows(2).enumerate() {
        if pair[1].t_fail < pair[0].t_fail {
            return Err(Error::EventValidation(format!(
                "events {i} and {} are not sorted by failure time",
                i + 1
            )));
        }
        if pair[0].t_recovered() > pair[1].t_fail {
            return Err(Error::EventValidation(format!(
                "outage of event {i} (ends {}) overlaps failure {} at {}",
                pair[0].t_recovered(),
                i + 1,
                pair[1].t_fail
            )));
        }
    }
    for (i, e) in events.iter().enumerate() {
        if e.t_fail >= ctx.t_mission {
            return Err(Error::EventValidation(format!(
                "event {i} fails at {} outside the mission [0, {})",
                e.t_fail, ctx.t_mission
            )));
        }
    }

    let mut flags = Vec::new();
    if events.is_empty() {
        flags.push(AssessmentFlag::NoEvents);
    }
    let mut per_event = Vec::with_capacity(events.len());
    for (i, e) in events.iter().enumerate() {
        let rho_r = reactive_resiliency(e, ctx)?;
        let degree = match ctx.baseline {
            Some(_) => Some(classify_degree(e.q_res, ctx, e.t_fail)?),
            None => None,
        };
        if e.is_better_than_new() {
            flags.push(AssessmentFlag::BetterThanNew { event: i });
        }
        per_event.push(EventAssessment {
            event: *e,
            rho_r,
            degree,
        });
    }
    let mission_rho = if per_event.is_empty() {
        1.0
    } else {
        per_event.iter().map(|a| a.rho_r).fold(f64::INFINITY, f64::min)
    };
    Ok(ResiliencyAssessment {
        per_event,
        mission_rho,
        flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Nominal,
    Outage,
    Recovered,
}

impl Segment {
    pub fn label(self) -> &'static str {
        match self {
            Segment::Nominal => "nominal",
            Segment::Outage => "outage",
            Segment::Recovered => "recovered",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub level: f64,
    pub segment: Segment,
}

/// Performance over a mission with one failure/recovery, in reliability
/// units.
#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceTrajectory {
    pub samples: Vec<TrajectorySample>,
}

impl PerformanceTrajectory {
    /// Sample at the moment operation resumes, if it does so within the
    /// mission.
    pub fn recovery_onset(&self) -> Option<&TrajectorySample> {
        self.samples.iter().find(|s| s.segment == Segment::Recovered)
    }
}

/// Options for [`performance_trajectory`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryOptions {
    /// Number of evenly spaced samples over `[0, t_mission]`; the failure and
    /// recovery instants are always added.
    pub resolution: usize,
    /// Performance held during the outage, in `[0, 1)`.
    pub outage_level: f64,
}

impl Default for TrajectoryOptions {
    fn default() -> Self {
        Self {
            resolution: 101,
            outage_level: 0.0,
        }
    }
}

/// Builds the nominal / outage / recovered performance curve for one event.
///
/// - nominal on `[0, t_fail)`: `R(t)`
/// - outage on `[t_fail, t_fail + t_res)`: the outage level
/// - recovered afterwards: `(1 - q_res) · R(v + Δt) / R(v)` where `v` is the
///   virtual age of the degree and `Δt` the time since recovery, so the
///   curve resumes at exactly `1 - q_res`.
///
/// A recovery that does not finish within the mission leaves the outage
/// running to the end.
pub fn performance_trajectory(
    ctx: &MissionContext,
    event: &ResiliencyEvent,
    options: TrajectoryOptions,
) -> Result<PerformanceTrajectory> {
    let baseline = ctx.require_baseline()?;
    if options.resolution < 2 {
        return Err(Error::Domain("trajectory resolution must be at least 2".into()));
    }
    if !(options.outage_level >= 0.0 && options.outage_level < 1.0) {
        return Err(Error::InvalidParameter {
            name: "outage_level",
            value: options.outage_level,
            reason: "must lie in [0, 1)",
        });
    }
    let t_mission = ctx.t_mission;
    if event.t_fail >= t_mission {
        return Err(Error::Domain(format!(
            "failure at {} is not inside the mission [0, {t_mission})",
            event.t_fail
        )));
    }
    let t_rec = event.t_recovered();
    let recovers = t_rec < t_mission;

    let mut times: Vec<f64> = (0..options.resolution)
        .map(|k| t_mission * k as f64 / (options.resolution - 1) as f64)
        .collect();
    times.push(event.t_fail);
    if recovers {
        times.push(t_rec);
    }
    times.sort_by(f64::total_cmp);
    times.dedup();

    let recovered_level = 1.0 - event.q_res;
    let age = if recovers {
        virtual_age_of_degree(event.q_res.max(0.0), baseline)
            .map(|a| a.age)
            .unwrap_or(0.0)
    } else {
        0.0
    };
    let r_age = baseline.reliability_at(age)?;

    let mut samples = Vec::with_capacity(times.len());
    for t in times {
        let sample = if t < event.t_fail {
            TrajectorySample {
                t,
                level: baseline.reliability_at(t)?,
                segment: Segment::Nominal,
            }
        } else if !recovers || t < t_rec {
            TrajectorySample {
                t,
                level: options.outage_level,
                segment: Segment::Outage,
            }
        } else {
            let dt = t - t_rec;
            let ratio = if dt == 0.0 {
                1.0
            } else if r_age > 0.0 {
                baseline.reliability_at(age + dt)? / r_age
            } else {
                0.0
            };
            TrajectorySample {
                t,
                level: recovered_level * ratio,
                segment: Segment::Recovered,
            }
        };
        samples.push(sample);
    }
    Ok(PerformanceTrajectory { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ctx(t: f64) -> MissionContext {
        MissionContext::new(t, None).unwrap()
    }

    fn with_baseline(t: f64) -> MissionContext {
        MissionContext::new(t, Some(LifetimeDistribution::weibull(1.5, 80.0).unwrap())).unwrap()
    }

    #[test]
    fn perfectly_resilient() {
        let e = ResiliencyEvent::new(30.0, 0.0, 0.0).unwrap();
        assert_eq!(reactive_resiliency(&e, &ctx(100.0)).unwrap(), 1.0);
    }

    #[test]
    fn perfectly_non_resilient() {
        for t_res in [60.0, 60.000_001, 1e9, f64::INFINITY] {
            let e = ResiliencyEvent::new(40.0, t_res, 0.1).unwrap();
            assert_eq!(reactive_resiliency(&e, &ctx(100.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn worked_example() {
        let e = ResiliencyEvent::new(40.0, 15.0, 0.2).unwrap();
        let rho = reactive_resiliency(&e, &ctx(100.0)).unwrap();
        assert!((rho - 0.6).abs() < 1e-15);
    }

    #[test]
    fn better_than_new_exceeds_one() {
        let e = ResiliencyEvent::new(10.0, 0.0, -0.1).unwrap();
        let rho = reactive_resiliency(&e, &ctx(100.0)).unwrap();
        assert!((rho - 1.1).abs() < 1e-15);
        assert!(e.is_better_than_new());
        let a = mission_resiliency(&[e], &ctx(100.0)).unwrap();
        assert_eq!(a.flags, vec![AssessmentFlag::BetterThanNew { event: 0 }]);
    }

    #[test]
    fn failure_outside_mission_is_domain_error() {
        let e = ResiliencyEvent::new(100.0, 0.0, 0.0).unwrap();
        assert!(matches!(reactive_resiliency(&e, &ctx(100.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn event_validation() {
        assert!(ResiliencyEvent::new(-1.0, 0.0, 0.0).is_err());
        assert!(ResiliencyEvent::new(1.0, -0.1, 0.0).is_err());
        assert!(ResiliencyEvent::new(1.0, 0.0, 1.01).is_err());
        assert!(ResiliencyEvent::new(1.0, 0.0, f64::NAN).is_err());
        assert!(ResiliencyEvent::new(1.0, 0.0, 1.0).is_ok());
    }

    #[test]
    fn recovered_values() {
        assert_eq!(recovered_reliability(0.0).unwrap().value, 1.0);
        assert!((recovered_reliability(0.3).unwrap().value - 0.7).abs() < 1e-15);
        let btn = recovered_reliability(-0.1).unwrap();
        assert!((btn.value - 1.1).abs() < 1e-15 && btn.better_than_new);
        assert!(recovered_reliability(1.2).is_err());
    }

    #[test]
    fn degree_table() {
        let c = with_baseline(100.0);
        let f = c.baseline().unwrap().cdf_at(50.0).unwrap();
        assert_eq!(classify_degree(0.0, &c, 50.0).unwrap(), ResiliencyDegree::GoodAsNew);
        assert_eq!(classify_degree(-0.05, &c, 50.0).unwrap(), ResiliencyDegree::BetterThanNew);
        assert_eq!(classify_degree(f, &c, 50.0).unwrap(), ResiliencyDegree::SameAsOld);
        assert_eq!(classify_degree(f * 0.5, &c, 50.0).unwrap(), ResiliencyDegree::PartialRecovery);
        assert_eq!(classify_degree(f + 0.01, &c, 50.0).unwrap(), ResiliencyDegree::WorseThanOld);
        let r_prior = c.baseline().unwrap().reliability_at(50.0).unwrap();
        assert!((1.0 - f - r_prior).abs() < 1e-15);
    }

    #[test]
    fn classification_needs_baseline() {
        assert!(matches!(classify_degree(0.1, &ctx(10.0), 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn degree_ages() {
        let exp = LifetimeDistribution::exponential(1.0).unwrap();
        assert_eq!(virtual_age_of_degree(0.0, &exp).unwrap().age, 0.0);
        let a = virtual_age_of_degree(1.0 - libm::exp(-1.0), &exp).unwrap();
        assert!((a.age - 1.0).abs() < 1e-12);
        let btn = virtual_age_of_degree(-0.2, &exp).unwrap();
        assert_eq!(btn.age, 0.0);
        assert!(btn.better_than_new);
        assert!(virtual_age_of_degree(1.0, &exp).is_err());
    }

    #[test]
    fn mission_aggregation() {
        let c = ctx(100.0);
        let none = mission_resiliency(&[], &c).unwrap();
        assert_eq!(none.mission_rho, 1.0);
        assert_eq!(none.flags, vec![AssessmentFlag::NoEvents]);

        let a = ResiliencyEvent::new(40.0, 15.0, 0.2).unwrap();
        let single = mission_resiliency(&[a], &c).unwrap();
        assert_eq!(single.mission_rho, single.per_event[0].rho_r);

        let b = ResiliencyEvent::new(60.0, 0.0, 0.1).unwrap();
        let both = mission_resiliency(&[a, b], &c).unwrap();
        assert!((both.per_event[1].rho_r - 0.9).abs() < 1e-15);
        assert!((both.mission_rho - 0.6).abs() < 1e-15);
        assert!(both.per_event.iter().all(|e| e.degree.is_none()));
    }

    #[test]
    fn overlapping_outages_rejected() {
        let a = ResiliencyEvent::new(10.0, 20.0, 0.0).unwrap();
        let b = ResiliencyEvent::new(25.0, 1.0, 0.0).unwrap();
        assert!(matches!(mission_resiliency(&[a, b], &ctx(100.0)), Err(Error::EventValidation(_))));
        assert!(matches!(mission_resiliency(&[b, a], &ctx(100.0)), Err(Error::EventValidation(_))));
    }

    #[test]
    fn trajectory_segments() {
        let c = with_baseline(100.0);
        let e = ResiliencyEvent::new(30.0, 10.0, 0.25).unwrap();
        let tr = performance_trajectory(&c, &e, TrajectoryOptions::default()).unwrap();
        assert_eq!(tr.samples[0].t, 0.0);
        assert_eq!(tr.samples[0].level, 1.0);
        for w in tr.samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        for s in &tr.samples {
            match s.segment {
                Segment::Nominal => assert!(s.t < 30.0),
                Segment::Outage => {
                    assert!(s.t >= 30.0 && s.t < 40.0);
                    assert_eq!(s.level, 0.0);
                }
                Segment::Recovered => assert!(s.t >= 40.0 && s.level <= 0.75),
            }
        }
        let onset = tr.recovery_onset().unwrap();
        assert_eq!(onset.t, 40.0);
        assert_eq!(onset.level, 0.75);
    }

    #[test]
    fn trajectory_without_recovery_ends_in_outage() {
        let c = with_baseline(100.0);
        let e = ResiliencyEvent::new(50.0, 80.0, 0.0).unwrap();
        let tr = performance_trajectory(&c, &e, TrajectoryOptions::default()).unwrap();
        assert!(tr.recovery_onset().is_none());
        assert_eq!(tr.samples.last().unwrap().segment, Segment::Outage);
    }

    #[test]
    fn instant_good_as_new_has_no_outage() {
        let c = with_baseline(100.0);
        let e = ResiliencyEvent::new(30.0, 0.0, 0.0).unwrap();
        let tr = performance_trajectory(&c, &e, TrajectoryOptions::default()).unwrap();
        assert!(tr.samples.iter().all(|s| s.segment != Segment::Outage));
        let onset = tr.recovery_onset().unwrap();
        assert_eq!((onset.t, onset.level), (30.0, 1.0));
    }
}
