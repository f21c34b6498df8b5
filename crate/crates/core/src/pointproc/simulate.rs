use alloc::format;
use alloc::vec::Vec;

use super::history::{EventHistory, FailureEvent, Provenance};
use super::{PointProcessModel, RepairPolicy, SimulationConfig};
use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// A validated (model, repair policy, config) triple that generates
/// trajectories.
///
/// Model validity over the horizon is checked here, before any trajectory
/// is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simulator {
    model: PointProcessModel,
    policy: RepairPolicy,
    cfg: SimulationConfig,
}

impl Simulator {
    pub fn new(model: PointProcessModel, policy: RepairPolicy, cfg: SimulationConfig) -> Result<Self> {
        model.validate(Some(cfg.horizon()))?;
        policy.validate()?;
        Ok(Self { model, policy, cfg })
    }

    pub fn model(&self) -> &PointProcessModel {
        &self.model
    }

    pub fn policy(&self) -> &RepairPolicy {
        &self.policy
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.cfg
    }

    /// Trajectory `index` of the run. Depends only on the master seed and
    /// `index`.
    pub fn simulate_history(&self, index: usize) -> Result<EventHistory> {
        if index >= self.cfg.trajectories() {
            return Err(Error::Domain(format!(
                "trajectory index {index} out of range for {} trajectories",
                self.cfg.trajectories()
            )));
        }
        Ok(self.generate(index))
    }

    pub(crate) fn generate(&self, index: usize) -> EventHistory {
        let seed = self.cfg.seed();
        let mut stream = RandomStream::new(seed, index as u64);
        let horizon = self.cfg.horizon();
        let events = match self.model {
            PointProcessModel::Nhpp { rocof } => {
                self.calendar_clock(&mut stream, |from, s| {
                    let level = rocof.cumulative(from) + s.standard_exponential();
                    rocof.inverse_cumulative(level)
                })
            }
            PointProcessModel::Hpp { rate } => self.operating_clock(&mut stream, |_, s| {
                s.standard_exponential() / rate
            }),
            PointProcessModel::Renewal { ttf } => {
                self.operating_clock(&mut stream, |_, s| ttf.sample_ttf(s))
            }
            PointProcessModel::Grp { ttf, q, variant } => {
                let mut age = 0.0;
                self.operating_clock(&mut stream, move |last, s| {
                    if let Some(x) = last {
                        age = variant.next_age(age, x, q);
                    }
                    // Pr(X > x | age v) = R(v + x) / R(v): invert in log space.
                    let ln_target = libm::log(s.uniform()) + ttf.ln_survival(age);
                    let t = ttf.inverse_ln_survival(ln_target).unwrap_or(f64::INFINITY);
                    t - age
                })
            }
        };
        debug_assert!(events.iter().all(|e| e.repair_complete_time <= horizon));
        EventHistory::from_parts_unchecked(
            events,
            horizon,
            Provenance::Simulated {
                seed,
                trajectory: index as u64,
            },
        )
    }

    fn repair_duration(&self, stream: &mut RandomStream) -> f64 {
        match self.policy {
            RepairPolicy::Instantaneous => 0.0,
            RepairPolicy::Fixed { duration } => duration,
            RepairPolicy::Distributed { dist } => dist.sample_ttf(stream),
        }
    }

    /// Failure clock frozen while under repair. `draw` receives the previous
    /// operating duration (None for the first) and returns the next one.
    fn operating_clock<F>(&self, stream: &mut RandomStream, mut draw: F) -> Vec<FailureEvent>
    where
        F: FnMut(Option<f64>, &mut RandomStream) -> f64,
    {
        let horizon = self.cfg.horizon();
        let mut events = Vec::new();
        let mut now = 0.0;
        let mut last = None;
        loop {
            let x = draw(last, stream).max(0.0);
            let fail = push_forward(now + x, events.last());
            if !(fail <= horizon) {
                break;
            }
            let repaired = fail + self.repair_duration(stream);
            events.push(FailureEvent {
                fail_time: fail,
                repair_complete_time: repaired.min(horizon),
            });
            last = Some(fail - now);
            now = repaired;
            if now >= horizon {
                break;
            }
        }
        events
    }

    /// Intensity on calendar time; `next` maps the restart time to the next
    /// failure time.
    fn calendar_clock<F>(&self, stream: &mut RandomStream, mut next: F) -> Vec<FailureEvent>
    where
        F: FnMut(f64, &mut RandomStream) -> f64,
    {
        let horizon = self.cfg.horizon();
        let mut events = Vec::new();
        let mut now = 0.0;
        loop {
            let fail = push_forward(next(now, stream).max(now), events.last());
            if !(fail <= horizon) {
                break;
            }
            let repaired = fail + self.repair_duration(stream);
            events.push(FailureEvent {
                fail_time: fail,
                repair_complete_time: repaired.min(horizon),
            });
            now = repaired;
            if now >= horizon {
                break;
            }
        }
        events
    }

    /// Applies `f` to every trajectory and returns the results in trajectory
    /// order. Runs on the rayon pool with the `parallel` feature; the output
    /// is identical either way.
    pub fn map_trajectories<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&EventHistory) -> T + Sync + Send,
    {
        let n = self.cfg.trajectories();
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..n)
                .into_par_iter()
                .map(|i| f(&self.generate(i)))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..n).map(|i| f(&self.generate(i))).collect()
        }
    }
}

// Keeps failure times strictly increasing when a zero-length gap rounds away.
fn push_forward(fail: f64, prev: Option<&FailureEvent>) -> f64 {
    match prev {
        Some(p) if fail <= p.fail_time => p.fail_time.next_up(),
        _ => fail,
    }
}
