use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_positive, Error, Result};

/// One failure and the time its repair completed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureEvent {
    pub fail_time: f64,
    /// Equal to `fail_time` for instantaneous repair. Repairs still running
    /// at the horizon are cut off at the horizon.
    pub repair_complete_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Simulated { seed: u64, trajectory: u64 },
    Observed,
}

/// A failure/repair timeline over `[0, horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EventHistory {
    events: Vec<FailureEvent>,
    horizon: f64,
    provenance: Provenance,
}

impl EventHistory {
    /// Validates ordering: failure times strictly increase, each repair ends
    /// no earlier than its failure and no later than the next failure, and
    /// everything lies in `[0, horizon]`.
    pub fn new(events: Vec<FailureEvent>, horizon: f64, provenance: Provenance) -> Result<Self> {
        check_positive("horizon", horizon)?;
        let mut prev_fail = f64::NEG_INFINITY;
        let mut prev_complete = 0.0;
        for (i, e) in events.iter().enumerate() {
            let ok = e.fail_time >= 0.0
                && e.fail_time > prev_fail
                && e.fail_time >= prev_complete
                && e.repair_complete_time >= e.fail_time
                && e.repair_complete_time <= horizon;
            if !ok {
                return Err(Error::EventValidation(format!(
                    "event {i} (fail {}, repaired {}) breaks ordering or lies outside [0, {horizon}]",
                    e.fail_time, e.repair_complete_time
                )));
            }
            prev_fail = e.fail_time;
            prev_complete = e.repair_complete_time;
        }
        Ok(Self {
            events,
            horizon,
            provenance,
        })
    }

    pub(crate) fn from_parts_unchecked(
        events: Vec<FailureEvent>,
        horizon: f64,
        provenance: Provenance,
    ) -> Self {
        Self {
            events,
            horizon,
            provenance,
        }
    }

    pub fn events(&self) -> &[FailureEvent] {
        &self.events
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn failure_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.events.iter().map(|e| e.fail_time)
    }

    /// `N(t)`: failures at or before `t`.
    pub fn count_until(&self, t: f64) -> usize {
        self.events.partition_point(|e| e.fail_time <= t)
    }

    /// Failures in `(t0, t1]`.
    pub fn count_between(&self, t0: f64, t1: f64) -> usize {
        self.count_until(t1) - self.count_until(t0)
    }

    /// Whether the system is up at `t`, i.e. not inside `[fail, repaired)`.
    /// A repair cut off at the horizon counts as still running there.
    pub fn is_operating(&self, t: f64) -> bool {
        let idx = self.count_until(t);
        if idx == 0 {
            return true;
        }
        let e = self.events[idx - 1];
        if t < e.repair_complete_time {
            return false;
        }
        !(t == self.horizon
            && e.repair_complete_time == self.horizon
            && e.fail_time < e.repair_complete_time)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ev(f: f64, r: f64) -> FailureEvent {
        FailureEvent {
            fail_time: f,
            repair_complete_time: r,
        }
    }

    #[test]
    fn ordering_is_checked() {
        assert!(EventHistory::new(vec![ev(1.0, 2.0), ev(3.0, 3.5)], 10.0, Provenance::Observed).is_ok());
        assert!(EventHistory::new(vec![ev(1.0, 2.0), ev(1.5, 3.0)], 10.0, Provenance::Observed).is_err());
        assert!(EventHistory::new(vec![ev(2.0, 1.0)], 10.0, Provenance::Observed).is_err());
        assert!(EventHistory::new(vec![ev(1.0, 11.0)], 10.0, Provenance::Observed).is_err());
        assert!(EventHistory::new(vec![ev(1.0, 1.0), ev(1.0, 1.0)], 10.0, Provenance::Observed).is_err());
        assert!(EventHistory::new(vec![], 10.0, Provenance::Observed).is_ok());
    }

    #[test]
    fn counting_and_operating() {
        let h = EventHistory::new(vec![ev(1.0, 2.0), ev(3.0, 10.0)], 10.0, Provenance::Observed).unwrap();
        assert_eq!(h.count_until(0.5), 0);
        assert_eq!(h.count_until(1.0), 1);
        assert_eq!(h.count_between(1.0, 3.0), 1);
        assert!(h.is_operating(0.0));
        assert!(!h.is_operating(1.0));
        assert!(!h.is_operating(1.999));
        assert!(h.is_operating(2.0));
        assert!(!h.is_operating(10.0));
    }
}
