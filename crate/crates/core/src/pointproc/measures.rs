//! Expected counts, ROCOF, MTBF and availability: analytic where a closed
//! form exists, Monte Carlo otherwise.
//!
//! Monte Carlo aggregates are combined in trajectory order (scalars) or in
//! fixed-size trajectory blocks merged in block order (curves), so results do
//! not depend on thread scheduling.

use alloc::format;
use alloc::vec::Vec;

use super::history::EventHistory;
use super::{PointProcessModel, Rocof, Simulator};
use crate::error::{Error, Result};
use crate::lifetime::Family;
use crate::math::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Analytic,
    MonteCarlo { trajectories: usize },
}

/// A value with its standard error (zero for analytic results).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub method: EstimateMethod,
}

impl Estimate {
    fn analytic(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            method: EstimateMethod::Analytic,
        }
    }

    /// Sample mean and standard error of the mean.
    pub(crate) fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = compensated_sum(samples.iter().copied()) / n as f64;
        let var = if n > 1 {
            compensated_sum(samples.iter().map(|&x| (x - mean) * (x - mean))) / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            value: mean,
            std_error: libm::sqrt(var / n as f64),
            method: EstimateMethod::MonteCarlo { trajectories: n },
        }
    }
}

/// Closed-form mean number of failures by `t` under instantaneous repair,
/// or `None` when the model has none.
pub fn analytic_expected_count(model: &PointProcessModel, t: f64) -> Result<Option<f64>> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time {t} must be non-negative")));
    }
    model.validate(None)?;
    Ok(match *model {
        PointProcessModel::Hpp { rate } => Some(rate * t),
        PointProcessModel::Nhpp { rocof } => Some(rocof.cumulative(t)),
        PointProcessModel::Renewal { ttf } => match ttf.family() {
            Family::Exponential => Some(ttf.parameters()[0].1 * t),
            Family::Gamma if ttf.parameters()[0].1 == 2.0 => {
                // Erlang-2 renewal function.
                let mu = ttf.parameters()[1].1;
                Some(0.5 * mu * t - 0.25 + 0.25 * libm::exp(-2.0 * mu * t))
            }
            _ => None,
        },
        PointProcessModel::Grp { .. } => None,
    })
}

/// Closed-form ROCOF for HPP and NHPP models, `None` for RP and GRP.
pub fn analytic_rocof(model: &PointProcessModel, t: f64) -> Result<Option<f64>> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time {t} must be non-negative")));
    }
    model.validate(None)?;
    Ok(match *model {
        PointProcessModel::Hpp { rate } => Some(rate),
        PointProcessModel::Nhpp { rocof } => {
            if let Rocof::PowerLaw { lambda, beta } = rocof {
                if t == 0.0 {
                    if beta < 1.0 {
                        return Err(Error::Singularity(format!(
                            "power-law ROCOF with beta = {beta} < 1 is unbounded at t = 0"
                        )));
                    }
                    return Ok(Some(if beta == 1.0 { lambda } else { 0.0 }));
                }
            }
            Some(rocof.intensity(t))
        }
        _ => None,
    })
}

impl Simulator {
    fn check_in_horizon(&self, t: f64) -> Result<()> {
        let h = self.config().horizon();
        if t >= 0.0 && t <= h {
            Ok(())
        } else {
            Err(Error::Domain(format!("time {t} outside [0, {h}]")))
        }
    }

    /// Mean failure count by `t`. Analytic when the repair policy is
    /// instantaneous and the model has a closed form; Monte Carlo otherwise.
    pub fn expected_count(&self, t: f64) -> Result<Estimate> {
        self.check_in_horizon(t)?;
        if self.policy().is_instantaneous() {
            if let Some(v) = analytic_expected_count(self.model(), t)? {
                return Ok(Estimate::analytic(v));
            }
        }
        self.expected_count_monte_carlo(t)
    }

    /// Monte Carlo mean failure count by `t`, regardless of closed forms.
    pub fn expected_count_monte_carlo(&self, t: f64) -> Result<Estimate> {
        self.check_in_horizon(t)?;
        let counts = self.map_trajectories(|h| h.count_until(t) as f64);
        Ok(Estimate::from_samples(&counts))
    }

    /// Monte Carlo mean counts on a whole grid of times from one set of
    /// trajectories.
    pub fn expected_count_curve(&self, times: &[f64]) -> Result<Vec<Estimate>> {
        for &t in times {
            self.check_in_horizon(t)?;
        }
        Ok(self.summarize(times.len(), |h, out| {
            for (o, &t) in out.iter_mut().zip(times) {
                *o = h.count_until(t) as f64;
            }
        }))
    }

    /// Monte Carlo means of `width` per-trajectory statistics.
    ///
    /// `f` fills one row per trajectory. Trajectories are processed in blocks
    /// of fixed size whose moments are merged in block order, so memory stays
    /// proportional to `width` and the result is independent of the number
    /// of threads.
    pub fn summarize<F>(&self, width: usize, f: F) -> Vec<Estimate>
    where
        F: Fn(&EventHistory, &mut [f64]) + Sync + Send,
    {
        let n = self.config().trajectories();
        let blocks = n.div_ceil(BLOCK);
        let block = |b: usize| {
            let lo = b * BLOCK;
            let hi = (lo + BLOCK).min(n);
            let mut rows = alloc::vec![0.0; (hi - lo) * width];
            for (i, row) in (lo..hi).zip(rows.chunks_mut(width.max(1))) {
                f(&self.generate(i), &mut row[..width]);
            }
            (0..width)
                .map(|j| Moments::of(rows.iter().skip(j).step_by(width).copied(), hi - lo))
                .collect::<Vec<_>>()
        };
        #[cfg(feature = "parallel")]
        let parts: Vec<Vec<Moments>> = {
            use rayon::prelude::*;
            (0..blocks).into_par_iter().map(block).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Vec<Vec<Moments>> = (0..blocks).map(block).collect();
        (0..width)
            .map(|j| {
                let mut acc = Moments::default();
                for p in &parts {
                    acc.merge(&p[j]);
                }
                acc.estimate(n)
            })
            .collect()
    }

    /// Rate of occurrence of failures at `t`.
    ///
    /// Analytic for HPP and NHPP under instantaneous repair. Otherwise the
    /// mean number of failures in a window of width
    /// [`SimulationConfig::rocof_window`](super::SimulationConfig::rocof_window)
    /// around `t` (clipped to the horizon) divided by its width.
    pub fn rocof_at(&self, t: f64) -> Result<Estimate> {
        self.check_in_horizon(t)?;
        if self.policy().is_instantaneous() {
            if let Some(v) = analytic_rocof(self.model(), t)? {
                return Ok(Estimate::analytic(v));
            }
        }
        let h = self.config().horizon();
        let half = 0.5 * self.config().rocof_window();
        let lo = (t - half).max(0.0);
        let hi = (t + half).min(h);
        let width = hi - lo;
        let rates = self.map_trajectories(|hist| hist.count_between(lo, hi) as f64 / width);
        Ok(Estimate::from_samples(&rates))
    }

    /// Mean time between failures over `(t0, t1]`.
    ///
    /// HPP gives `1/λ`. Other models: window length times trajectories over
    /// total failures in the window, with a delta-method standard error.
    pub fn mtbf(&self, t0: f64, t1: f64) -> Result<Estimate> {
        if !(t0 >= 0.0 && t0 < t1 && t1 <= self.config().horizon()) {
            return Err(Error::Domain(format!(
                "MTBF window ({t0}, {t1}] must satisfy 0 <= t0 < t1 <= {}",
                self.config().horizon()
            )));
        }
        if let PointProcessModel::Hpp { rate } = self.model() {
            return Ok(Estimate::analytic(1.0 / rate));
        }
        let counts = self.map_trajectories(|h| h.count_between(t0, t1) as f64);
        let n = counts.len();
        let mean = Estimate::from_samples(&counts);
        if mean.value == 0.0 {
            return Err(Error::InsufficientEvents { trajectories: n });
        }
        let width = t1 - t0;
        Ok(Estimate {
            value: width / mean.value,
            std_error: width * mean.std_error / (mean.value * mean.value),
            method: EstimateMethod::MonteCarlo { trajectories: n },
        })
    }

    /// Probability the system is up at `t`.
    pub fn availability(&self, t: f64) -> Result<Estimate> {
        self.check_in_horizon(t)?;
        if self.policy().is_instantaneous() {
            return Ok(Estimate::analytic(1.0));
        }
        let up = self.map_trajectories(|h| h.is_operating(t));
        Ok(binomial_estimate(&up))
    }

    /// Availability on a grid of times from one set of trajectories.
    pub fn availability_curve(&self, times: &[f64]) -> Result<Vec<Estimate>> {
        for &t in times {
            self.check_in_horizon(t)?;
        }
        if self.policy().is_instantaneous() {
            return Ok(times.iter().map(|_| Estimate::analytic(1.0)).collect());
        }
        let mut out = self.summarize(times.len(), |h, row| {
            for (o, &t) in row.iter_mut().zip(times) {
                *o = if h.is_operating(t) { 1.0 } else { 0.0 };
            }
        });
        let n = self.config().trajectories() as f64;
        for e in &mut out {
            let p = e.value;
            e.std_error = libm::sqrt(p * (1.0 - p) / n);
        }
        Ok(out)
    }

    /// ROCOF on a grid of times. Analytic where [`Simulator::rocof_at`] is,
    /// otherwise windowed Monte Carlo rates from one set of trajectories.
    pub fn rocof_curve(&self, times: &[f64]) -> Result<Vec<Estimate>> {
        let mut windows = Vec::with_capacity(times.len());
        for &t in times {
            self.check_in_horizon(t)?;
            if self.policy().is_instantaneous() && analytic_rocof(self.model(), t)?.is_some() {
                return times.iter().map(|&t| self.rocof_at(t)).collect();
            }
            let h = self.config().horizon();
            let half = 0.5 * self.config().rocof_window();
            windows.push(((t - half).max(0.0), (t + half).min(h)));
        }
        Ok(self.summarize(times.len(), |h, row| {
            for (o, &(lo, hi)) in row.iter_mut().zip(&windows) {
                *o = h.count_between(lo, hi) as f64 / (hi - lo);
            }
        }))
    }
}

const BLOCK: usize = 1024;

/// Count, sum and sum of squared deviations of a sample. Sums rather than
/// means are merged so integer-valued statistics stay exact.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    sum: f64,
    m2: f64,
}

impl Moments {
    fn of<I: Iterator<Item = f64> + Clone>(xs: I, n: usize) -> Self {
        if n == 0 {
            return Self::default();
        }
        let sum = compensated_sum(xs.clone());
        let mean = sum / n as f64;
        let m2 = compensated_sum(xs.map(|x| (x - mean) * (x - mean)));
        Self { n: n as f64, sum, m2 }
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0.0 {
            return;
        }
        if self.n > 0.0 {
            let d = o.sum / o.n - self.sum / self.n;
            self.m2 += d * d * self.n * o.n / (self.n + o.n);
        }
        self.m2 += o.m2;
        self.sum += o.sum;
        self.n += o.n;
    }

    fn estimate(&self, trajectories: usize) -> Estimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        Estimate {
            value: self.sum / self.n.max(1.0),
            std_error: libm::sqrt(var / self.n.max(1.0)),
            method: EstimateMethod::MonteCarlo { trajectories },
        }
    }
}

fn binomial_estimate(up: &[bool]) -> Estimate {
    let n = up.len();
    let k = up.iter().filter(|&&b| b).count();
    let p = k as f64 / n as f64;
    Estimate {
        value: p,
        std_error: libm::sqrt(p * (1.0 - p) / n as f64),
        method: EstimateMethod::MonteCarlo { trajectories: n },
    }
}
