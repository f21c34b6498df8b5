use alloc::vec::Vec;

use super::ObservedEvents;
use crate::error::{check_positive, Error, Result};
use crate::lifetime::LifetimeDistribution;
use crate::math::{compensated_sum, CompensatedSum};
use crate::pointproc::KijimaVariant;

/// One observed operating cycle: the unit starts at virtual age `start` and
/// fails after operating for `gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cycle {
    pub start: f64,
    pub gap: f64,
}

impl Cycle {
    pub fn end(&self) -> f64 {
        self.start + self.gap
    }
}

pub(crate) fn cycles(gaps: &[f64], q: f64, variant: KijimaVariant) -> Vec<Cycle> {
    let mut age = 0.0;
    gaps.iter()
        .map(|&x| {
            let c = Cycle { start: age, gap: x };
            age = variant.next_age(age, x, q);
            c
        })
        .collect()
}

pub(crate) fn cycles_log_likelihood(ttf: &LifetimeDistribution, cycles: &[Cycle]) -> f64 {
    let mut acc = CompensatedSum::default();
    for c in cycles {
        acc.add(ttf.ln_conditional_density(c.start, c.gap));
    }
    acc.value()
}

/// `n ln λ − λ E` with `E` the total operating exposure.
pub fn hpp_log_likelihood(obs: &ObservedEvents, rate: f64) -> Result<f64> {
    check_positive("rate", rate)?;
    let n = obs.len() as f64;
    Ok(n * libm::log(rate) - rate * obs.exposure())
}

/// Power-law NHPP log-likelihood on `(0, T]`:
/// `n ln λ + n ln β + (β − 1) Σ ln tᵢ − λ T^β`.
pub fn crow_amsaa_log_likelihood(obs: &ObservedEvents, lambda: f64, beta: f64) -> Result<f64> {
    check_positive("lambda", lambda)?;
    check_positive("beta", beta)?;
    let n = obs.len() as f64;
    let sum_ln = compensated_sum(obs.failure_times().iter().map(|&t| libm::log(t)));
    Ok(n * (libm::log(lambda) + libm::log(beta)) + (beta - 1.0) * sum_ln
        - lambda * libm::pow(obs.observation_end(), beta))
}

/// `Σ ln f(xᵢ)` over the operating gaps.
pub fn renewal_log_likelihood(obs: &ObservedEvents, ttf: &LifetimeDistribution) -> f64 {
    cycles_log_likelihood(ttf, &cycles(&obs.operating_gaps(), 0.0, KijimaVariant::KijimaI))
}

/// `Σ ln f(vᵢ₋₁ + xᵢ) − ln R(vᵢ₋₁)` with `vᵢ` the Kijima virtual ages.
pub fn grp_log_likelihood(
    obs: &ObservedEvents,
    ttf: &LifetimeDistribution,
    q: f64,
    variant: KijimaVariant,
) -> Result<f64> {
    if !q.is_finite() {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "must be finite",
        });
    }
    Ok(cycles_log_likelihood(ttf, &cycles(&obs.operating_gaps(), q, variant)))
}
