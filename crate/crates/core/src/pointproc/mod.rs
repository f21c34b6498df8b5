//! Stochastic point-process models of repairable systems.
//!
//! Four models are supported:
//!
//! | model | failure law | repair |
//! |-------|-------------|--------|
//! | HPP   | exponential gaps, constant ROCOF | perfect |
//! | RP    | i.i.d. gaps from any lifetime law | perfect |
//! | NHPP  | time-dependent ROCOF | minimal |
//! | GRP   | conditional on a Kijima virtual age | governed by `q` |
//!
//! HPP, RP and GRP run on an operating-time clock that is frozen during
//! repairs. NHPP intensity runs on calendar time.

mod history;
mod kijima;
mod measures;
mod simulate;

use alloc::format;

use crate::error::{check_finite, check_positive, Error, Result};
use crate::lifetime::LifetimeDistribution;

pub use history::{EventHistory, FailureEvent, Provenance};
pub use kijima::{kijima_virtual_ages, KijimaVariant};
pub use measures::{analytic_expected_count, analytic_rocof, Estimate, EstimateMethod};
pub use simulate::Simulator;

/// NHPP intensity functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rocof {
    /// Crow-AMSAA: `λ β t^(β-1)`, cumulative `λ t^β`.
    PowerLaw { lambda: f64, beta: f64 },
    /// Cox-Lewis: `exp(α + β t)`.
    LogLinear { alpha: f64, beta: f64 },
    /// `a + b t`; must stay non-negative over the horizon.
    Linear { a: f64, b: f64 },
}

impl Rocof {
    fn validate(&self, horizon: Option<f64>) -> Result<()> {
        match *self {
            Rocof::PowerLaw { lambda, beta } => {
                check_positive("lambda", lambda)?;
                check_positive("beta", beta)?;
            }
            Rocof::LogLinear { alpha, beta } => {
                check_finite("alpha", alpha)?;
                check_finite("beta", beta)?;
            }
            Rocof::Linear { a, b } => {
                check_finite("a", a)?;
                check_finite("b", b)?;
                if a < 0.0 {
                    return Err(Error::ModelValidity(format!(
                        "linear ROCOF intercept a = {a} is negative"
                    )));
                }
                if let Some(h) = horizon {
                    if a + b * h < 0.0 {
                        return Err(Error::ModelValidity(format!(
                            "linear ROCOF a + b t = {a} + {b} t turns negative before the horizon {h}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Intensity at `t`. Zero-time singularities are handled by
    /// [`analytic_rocof`].
    pub fn intensity(&self, t: f64) -> f64 {
        match *self {
            Rocof::PowerLaw { lambda, beta } => lambda * beta * libm::pow(t, beta - 1.0),
            Rocof::LogLinear { alpha, beta } => libm::exp(alpha + beta * t),
            Rocof::Linear { a, b } => a + b * t,
        }
    }

    /// Cumulative intensity `Λ(t) = ∫₀ᵗ λ(u) du`.
    pub fn cumulative(&self, t: f64) -> f64 {
        match *self {
            Rocof::PowerLaw { lambda, beta } => lambda * libm::pow(t, beta),
            Rocof::LogLinear { alpha, beta } => {
                if beta == 0.0 {
                    libm::exp(alpha) * t
                } else {
                    libm::exp(alpha) * libm::expm1(beta * t) / beta
                }
            }
            Rocof::Linear { a, b } => a * t + 0.5 * b * t * t,
        }
    }

    /// Inverse of [`cumulative`](Self::cumulative); `∞` when the process
    /// never accumulates that much intensity.
    pub fn inverse_cumulative(&self, level: f64) -> f64 {
        if level <= 0.0 {
            return 0.0;
        }
        match *self {
            Rocof::PowerLaw { lambda, beta } => libm::pow(level / lambda, 1.0 / beta),
            Rocof::LogLinear { alpha, beta } => {
                let scaled = level * libm::exp(-alpha);
                if beta == 0.0 {
                    scaled
                } else {
                    let arg = beta * scaled;
                    if arg <= -1.0 {
                        f64::INFINITY
                    } else {
                        libm::log1p(arg) / beta
                    }
                }
            }
            Rocof::Linear { a, b } => {
                if b == 0.0 {
                    if a > 0.0 {
                        level / a
                    } else {
                        f64::INFINITY
                    }
                } else {
                    let disc = a * a + 2.0 * b * level;
                    if disc < 0.0 {
                        return f64::INFINITY;
                    }
                    let root = libm::sqrt(disc);
                    if a + root <= 0.0 {
                        f64::INFINITY
                    } else {
                        // Smaller positive root of b/2 t² + a t - level, in the
                        // cancellation-free form.
                        2.0 * level / (a + root)
                    }
                }
            }
        }
    }
}

/// One of the four repairable-system models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointProcessModel {
    Hpp {
        rate: f64,
    },
    Renewal {
        ttf: LifetimeDistribution,
    },
    Nhpp {
        rocof: Rocof,
    },
    Grp {
        ttf: LifetimeDistribution,
        q: f64,
        variant: KijimaVariant,
    },
}

impl PointProcessModel {
    pub fn name(&self) -> &'static str {
        match self {
            PointProcessModel::Hpp { .. } => "hpp",
            PointProcessModel::Renewal { .. } => "rp",
            PointProcessModel::Nhpp { .. } => "nhpp",
            PointProcessModel::Grp { .. } => "grp",
        }
    }

    /// Checks parameter invariants. With a horizon, also checks that a linear
    /// ROCOF stays non-negative up to it.
    pub fn validate(&self, horizon: Option<f64>) -> Result<()> {
        match *self {
            PointProcessModel::Hpp { rate } => check_positive("rate", rate),
            PointProcessModel::Renewal { .. } => Ok(()),
            PointProcessModel::Nhpp { rocof } => rocof.validate(horizon),
            PointProcessModel::Grp { q, .. } => check_finite("q", q),
        }
    }
}

/// How long a repair takes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RepairPolicy {
    #[default]
    Instantaneous,
    Fixed {
        duration: f64,
    },
    Distributed {
        dist: LifetimeDistribution,
    },
}

impl RepairPolicy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RepairPolicy::Fixed { duration } if !(duration.is_finite() && duration >= 0.0) => {
                Err(Error::InvalidParameter {
                    name: "duration",
                    value: duration,
                    reason: "fixed repair duration must be finite and non-negative",
                })
            }
            _ => Ok(()),
        }
    }

    pub fn is_instantaneous(&self) -> bool {
        matches!(
            self,
            RepairPolicy::Instantaneous | RepairPolicy::Fixed { duration: 0.0 }
        )
    }
}

/// Horizon, trajectory count and master seed of a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    horizon: f64,
    trajectories: usize,
    seed: u64,
    rocof_window: Option<f64>,
}

impl SimulationConfig {
    pub fn new(horizon: f64, trajectories: usize, seed: u64) -> Result<Self> {
        check_positive("horizon", horizon)?;
        if trajectories == 0 {
            return Err(Error::Domain("at least one trajectory is required".into()));
        }
        Ok(Self {
            horizon,
            trajectories,
            seed,
            rocof_window: None,
        })
    }

    /// Width of the finite-difference window used for Monte Carlo ROCOF.
    pub fn with_rocof_window(mut self, window: f64) -> Result<Self> {
        check_positive("rocof_window", window)?;
        self.rocof_window = Some(window);
        Ok(self)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn trajectories(&self) -> usize {
        self.trajectories
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Defaults to one hundredth of the horizon.
    pub fn rocof_window(&self) -> f64 {
        self.rocof_window.unwrap_or(self.horizon / 100.0)
    }
}
