use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Kijima virtual-age recursions.
///
/// With operating duration `xₙ` since the previous repair:
/// - type I: `vₙ = vₙ₋₁ + q xₙ` (repair undoes damage of the last cycle only)
/// - type II: `vₙ = q (vₙ₋₁ + xₙ)` (repair scales the whole accumulated age)
///
/// `q = 0` is perfect repair and `q = 1` minimal repair. Negative `q` is
/// allowed and the age is floored at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KijimaVariant {
    #[default]
    KijimaI,
    KijimaII,
}

impl KijimaVariant {
    pub fn name(self) -> &'static str {
        match self {
            KijimaVariant::KijimaI => "kijima1",
            KijimaVariant::KijimaII => "kijima2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "kijima1" | "kijima_i" | "I" | "1" => Some(KijimaVariant::KijimaI),
            "kijima2" | "kijima_ii" | "II" | "2" => Some(KijimaVariant::KijimaII),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn next_age(self, age: f64, duration: f64, q: f64) -> f64 {
        let v = match self {
            KijimaVariant::KijimaI => age + q * duration,
            KijimaVariant::KijimaII => q * (age + duration),
        };
        v.max(0.0)
    }
}

/// Virtual age after each repair, starting from `v₀ = 0`.
pub fn kijima_virtual_ages(durations: &[f64], q: f64, variant: KijimaVariant) -> Result<Vec<f64>> {
    if !q.is_finite() {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "must be finite",
        });
    }
    let mut age = 0.0;
    durations
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Domain(format!(
                    "operating duration {i} = {x} must be positive"
                )));
            }
            age = variant.next_age(age, x, q);
            Ok(age)
        })
        .collect()
}
