//! Risk triplets and their aggregation.
//!
//! A scenario's risk is consequence times probability; system risk is the
//! sum over scenarios. When consequences are normalized to `[0, 1]` the
//! complement of system risk serves as a reliability proxy.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::compensated_sum;

/// One accident sequence with its consequence and per-mission probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    id: String,
    description: String,
    consequence: f64,
    probability: f64,
}

impl Scenario {
    pub fn new(
        id: impl Into<String>,
        description: impl Into<String>,
        consequence: f64,
        probability: f64,
    ) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::Domain("scenario id must be non-empty".into()));
        }
        if !(consequence.is_finite() && consequence >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "consequence",
                value: consequence,
                reason: "must be finite and non-negative",
            });
        }
        if !(0.0..=1.0).contains(&probability) {
            return Err(Error::InvalidParameter {
                name: "probability",
                value: probability,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(Self {
            id,
            description: description.into(),
            consequence,
            probability,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn consequence(&self) -> f64 {
        self.consequence
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// `C(s) × Pr(s)`.
    pub fn risk(&self) -> f64 {
        self.consequence * self.probability
    }
}

/// Free-function form of [`Scenario::risk`].
pub fn scenario_risk(s: &Scenario) -> f64 {
    s.risk()
}

/// A set of scenarios with unique ids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RiskPortfolio {
    scenarios: Vec<Scenario>,
    normalized: bool,
}

/// Result of [`RiskPortfolio::reliability_proxy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReliabilityProxy {
    pub value: f64,
    /// System risk exceeded one and the proxy was clamped to zero.
    pub saturated: bool,
}

impl RiskPortfolio {
    /// `normalized` asserts that every consequence lies in `[0, 1]`; it is
    /// checked here.
    pub fn new(scenarios: Vec<Scenario>, normalized: bool) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &scenarios {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Domain(format!("duplicate scenario id `{}`", s.id)));
            }
            if normalized && s.consequence > 1.0 {
                return Err(Error::InvalidParameter {
                    name: "consequence",
                    value: s.consequence,
                    reason: "normalized portfolios need consequences in [0, 1]",
                });
            }
        }
        Ok(Self {
            scenarios,
            normalized,
        })
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Appends another portfolio. Fails on id collisions, and the result is
    /// normalized only if both inputs are.
    pub fn concat(&self, other: &RiskPortfolio) -> Result<Self> {
        let mut all = self.scenarios.clone();
        all.extend(other.scenarios.iter().cloned());
        Self::new(all, self.normalized && other.normalized)
    }

    /// `Σ C(sᵢ) Pr(sᵢ)` with compensated summation.
    pub fn system_risk(&self) -> f64 {
        compensated_sum(self.scenarios.iter().map(Scenario::risk))
    }

    /// `max(0, 1 - system_risk)` with unit proportionality constant.
    pub fn reliability_proxy(&self) -> Result<ReliabilityProxy> {
        if !self.normalized {
            return Err(Error::Precondition(
                "reliability proxy needs consequences normalized to [0, 1]".into(),
            ));
        }
        let risk = self.system_risk();
        Ok(ReliabilityProxy {
            value: (1.0 - risk).max(0.0),
            saturated: risk > 1.0,
        })
    }
}
