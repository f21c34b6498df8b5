//! Maximum-likelihood fitting of the point-process models to observed
//! failure logs, AIC ranking, and a Laplace trend test.
//!
//! HPP, renewal and GRP likelihoods run on operating time: the gap before a
//! failure is measured from the end of the previous repair, matching the
//! simulator. Renewal and GRP likelihoods are conditional on the observed
//! gaps; HPP uses the total operating exposure. Crow-AMSAA runs on calendar
//! failure times.

mod fits;
mod likelihood;
mod optimize;

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lifetime::Family;
use crate::math::normal_sf;
use crate::pointproc::{EventHistory, KijimaVariant, PointProcessModel};

pub use fits::{fit_crow_amsaa, fit_grp, fit_grp_with, fit_hpp, fit_renewal, GrpSearch};
pub use likelihood::{
    crow_amsaa_log_likelihood, grp_log_likelihood, hpp_log_likelihood, renewal_log_likelihood,
};

/// Minimum failure counts per model.
pub const MIN_FAILURES_HPP: usize = 1;
pub const MIN_FAILURES_NHPP: usize = 3;
pub const MIN_FAILURES_RENEWAL: usize = 3;
pub const MIN_FAILURES_GRP: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Observation stopped at a fixed time `T`.
    TimeTruncated,
    /// Observation stopped at the last failure, `T = tₙ`.
    FailureTruncated,
}

/// A failure log: strictly increasing failure times, optional repair
/// completion times, and the end of observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedEvents {
    failure_times: Vec<f64>,
    repair_times: Vec<f64>,
    observation_end: f64,
    truncation: Truncation,
}

impl ObservedEvents {
    /// Log with instantaneous repairs.
    pub fn new(failure_times: Vec<f64>, observation_end: f64, truncation: Truncation) -> Result<Self> {
        let repairs = failure_times.clone();
        Self::with_repairs(failure_times, repairs, observation_end, truncation)
    }

    /// Log with explicit repair completion times (same length as failures).
    pub fn with_repairs(
        failure_times: Vec<f64>,
        repair_times: Vec<f64>,
        observation_end: f64,
        truncation: Truncation,
    ) -> Result<Self> {
        if repair_times.len() != failure_times.len() {
            return Err(Error::EventValidation(format!(
                "{} failure times but {} repair times",
                failure_times.len(),
                repair_times.len()
            )));
        }
        if !(observation_end.is_finite() && observation_end > 0.0) {
            return Err(Error::EventValidation(format!(
                "observation end {observation_end} must be positive"
            )));
        }
        let mut prev_repair = 0.0;
        let mut prev_fail = 0.0;
        for (i, (&t, &r)) in failure_times.iter().zip(&repair_times).enumerate() {
            if !(t > prev_fail && t > prev_repair && r >= t && t <= observation_end) {
                return Err(Error::EventValidation(format!(
                    "failure {i} at {t} (repaired {r}) breaks 0 < t1 < t2 < ... <= T = {observation_end} \
                     or starts before the previous repair ended"
                )));
            }
            prev_fail = t;
            prev_repair = r;
        }
        if truncation == Truncation::FailureTruncated {
            match failure_times.last() {
                Some(&last) if last == observation_end => {}
                _ => {
                    return Err(Error::EventValidation(
                        "failure-truncated data must end at its last failure".into(),
                    ))
                }
            }
        }
        Ok(Self {
            failure_times,
            repair_times,
            observation_end,
            truncation,
        })
    }

    /// Time-truncated log over the history's horizon.
    pub fn from_history(history: &EventHistory) -> Result<Self> {
        let fails: Vec<f64> = history.failure_times().collect();
        let repairs: Vec<f64> = history.events().iter().map(|e| e.repair_complete_time).collect();
        Self::with_repairs(fails, repairs, history.horizon(), Truncation::TimeTruncated)
    }

    pub fn failure_times(&self) -> &[f64] {
        &self.failure_times
    }

    pub fn repair_times(&self) -> &[f64] {
        &self.repair_times
    }

    pub fn observation_end(&self) -> f64 {
        self.observation_end
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.failure_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.failure_times.is_empty()
    }

    /// Operating durations before each failure.
    pub fn operating_gaps(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.failure_times
            .iter()
            .zip(&self.repair_times)
            .map(|(&t, &r)| {
                let x = t - prev;
                prev = r;
                x
            })
            .collect()
    }

    /// Operating time between the last repair and the end of observation.
    pub fn censored_tail(&self) -> f64 {
        let last = self.repair_times.last().copied().unwrap_or(0.0);
        (self.observation_end - last).max(0.0)
    }

    /// Total operating time observed.
    pub fn exposure(&self) -> f64 {
        crate::math::compensated_sum(
            self.operating_gaps()
                .into_iter()
                .chain(core::iter::once(self.censored_tail())),
        )
    }

    pub(crate) fn require(&self, model: &'static str, required: usize) -> Result<()> {
        if self.len() < required {
            Err(Error::InsufficientData {
                model,
                required,
                found: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// Notes recorded alongside a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitNote {
    ClosedForm,
    /// Failure-truncated Crow-AMSAA: shape numerator uses `n - 1`.
    FailureTruncatedNMinusOne,
    /// Time-truncated Crow-AMSAA: shape numerator uses `n`.
    TimeTruncatedN,
    /// Likelihood is flat in `q` (exponential lifetimes); the fit reduces to
    /// a renewal process and `q` is reported as 0.
    QUnidentifiable,
    /// The best `q` sits on the edge of the search range.
    QAtSearchBoundary,
    /// `q` was held fixed rather than estimated.
    QFixed,
}

impl FitNote {
    pub fn label(self) -> &'static str {
        match self {
            FitNote::ClosedForm => "closed_form",
            FitNote::FailureTruncatedNMinusOne => "failure_truncated_n_minus_1",
            FitNote::TimeTruncatedN => "time_truncated_n",
            FitNote::QUnidentifiable => "q_unidentifiable",
            FitNote::QAtSearchBoundary => "q_at_search_boundary",
            FitNote::QFixed => "q_fixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Convergence {
    pub iterations: usize,
    /// Final bracket width of the outermost search, in its own coordinate.
    pub bracket_width: f64,
    /// Gradient norm at the reported optimum in the optimizer's coordinates.
    pub gradient_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: PointProcessModel,
    pub log_likelihood: f64,
    pub aic: f64,
    pub free_parameters: usize,
    pub convergence: Convergence,
    pub notes: Vec<FitNote>,
}

impl FitResult {
    pub(crate) fn new(
        model: PointProcessModel,
        log_likelihood: f64,
        free_parameters: usize,
        convergence: Convergence,
        notes: Vec<FitNote>,
    ) -> Self {
        Self {
            model,
            log_likelihood,
            aic: 2.0 * free_parameters as f64 - 2.0 * log_likelihood,
            free_parameters,
            convergence,
            notes,
        }
    }

    /// BIC for `n` observed failures; reported alongside AIC only.
    pub fn bic(&self, n: usize) -> f64 {
        self.free_parameters as f64 * libm::log(n as f64) - 2.0 * self.log_likelihood
    }
}

/// A model family to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    Hpp,
    CrowAmsaa,
    Renewal(Family),
    Grp(Family, KijimaVariant),
}

impl Candidate {
    pub fn name(&self) -> alloc::string::String {
        match self {
            Candidate::Hpp => "hpp".into(),
            Candidate::CrowAmsaa => "crow_amsaa".into(),
            Candidate::Renewal(f) => format!("rp_{}", f.name()),
            Candidate::Grp(f, v) => format!("grp_{}_{}", f.name(), v.name()),
        }
    }

    /// Parses `hpp`, `crow_amsaa`, `rp_<family>` and `grp_<family>`; GRP takes
    /// the given Kijima variant.
    pub fn parse(name: &str, variant: KijimaVariant) -> Option<Self> {
        match name {
            "hpp" => Some(Candidate::Hpp),
            "crow_amsaa" | "nhpp" => Some(Candidate::CrowAmsaa),
            _ => {
                if let Some(f) = name.strip_prefix("rp_") {
                    Family::from_name(f).map(Candidate::Renewal)
                } else if let Some(f) = name.strip_prefix("grp_") {
                    Family::from_name(f).map(|f| Candidate::Grp(f, variant))
                } else {
                    None
                }
            }
        }
    }

    pub fn fit(&self, obs: &ObservedEvents) -> Result<FitResult> {
        match *self {
            Candidate::Hpp => fit_hpp(obs),
            Candidate::CrowAmsaa => fit_crow_amsaa(obs),
            Candidate::Renewal(f) => fit_renewal(obs, f),
            Candidate::Grp(f, v) => fit_grp(obs, f, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Successful fits, best AIC first.
    pub ranked: Vec<(Candidate, FitResult)>,
    /// Candidates that could not be fitted.
    pub failed: Vec<(Candidate, Error)>,
}

/// Fits every candidate and ranks by AIC, ties going to fewer parameters.
/// A failing candidate is reported, not fatal.
pub fn model_select(obs: &ObservedEvents, candidates: &[Candidate]) -> Result<Selection> {
    if candidates.is_empty() {
        return Err(Error::Domain("candidate set is empty".into()));
    }
    let mut ranked = Vec::new();
    let mut failed = Vec::new();
    for c in candidates {
        match c.fit(obs) {
            Ok(fit) => ranked.push((*c, fit)),
            Err(e) => failed.push((*c, e)),
        }
    }
    ranked.sort_by(|(_, a), (_, b)| {
        let tie = 1e-9 * a.aic.abs().max(1.0);
        if (a.aic - b.aic).abs() <= tie {
            a.free_parameters.cmp(&b.free_parameters)
        } else {
            a.aic.total_cmp(&b.aic)
        }
    });
    Ok(Selection { ranked, failed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    /// Consistent with a homogeneous Poisson process.
    TrendFree,
    /// Failures arriving faster over time.
    Deteriorating,
    /// Failures arriving slower over time.
    Improving,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendReport {
    /// Crow-AMSAA shape estimate.
    pub beta: f64,
    /// Laplace test statistic, standard normal under no trend.
    pub laplace: f64,
    /// Two-sided p-value of the Laplace statistic.
    pub p_value: f64,
    pub trend: Trend,
}

/// Significance level of [`trend_test`].
pub const TREND_ALPHA: f64 = 0.05;

/// Laplace trend test backed by the Crow-AMSAA shape estimate.
pub fn trend_test(obs: &ObservedEvents) -> Result<TrendReport> {
    obs.require("trend test", MIN_FAILURES_NHPP)?;
    let fit = fit_crow_amsaa(obs)?;
    let beta = match fit.model {
        PointProcessModel::Nhpp {
            rocof: crate::pointproc::Rocof::PowerLaw { beta, .. },
        } => beta,
        _ => unreachable!("crow-amsaa fit yields a power-law NHPP"),
    };
    let (times, end) = match obs.truncation {
        Truncation::TimeTruncated => (&obs.failure_times[..], obs.observation_end),
        Truncation::FailureTruncated => {
            let n = obs.len();
            (&obs.failure_times[..n - 1], obs.failure_times[n - 1])
        }
    };
    let m = times.len() as f64;
    let sum = crate::math::compensated_sum(times.iter().copied());
    let laplace = (sum - 0.5 * m * end) / (end * libm::sqrt(m / 12.0));
    let p_value = (2.0 * normal_sf(laplace.abs())).min(1.0);
    let trend = if p_value >= TREND_ALPHA {
        Trend::TrendFree
    } else if laplace > 0.0 {
        Trend::Deteriorating
    } else {
        Trend::Improving
    };
    Ok(TrendReport {
        beta,
        laplace,
        p_value,
        trend,
    })
}
