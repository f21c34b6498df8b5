//! Parametric time-to-failure laws and bathtub hazard profiles.
//!
//! [`LifetimeDistribution`] carries the survival, distribution, density,
//! hazard and quantile functions for four families. Every other module only
//! touches lifetimes through this interface.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_finite, check_positive, Error, Result};
use crate::math::{self, find_root};
use crate::rng::RandomStream;

/// Below this survival probability the hazard is reported as singular.
pub const HAZARD_SURVIVAL_FLOOR: f64 = 1e-300;

/// Family tag without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Exponential,
    Weibull,
    Gamma,
    Lognormal,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Exponential,
        Family::Weibull,
        Family::Gamma,
        Family::Lognormal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Weibull => "weibull",
            Family::Gamma => "gamma",
            Family::Lognormal => "lognormal",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Number of free parameters.
    pub fn arity(self) -> usize {
        match self {
            Family::Exponential => 1,
            _ => 2,
        }
    }
}

/// A parametric time-to-failure distribution on `[0, ∞)`.
///
/// Build through the checked constructors; the fields are private so every
/// value in circulation satisfies the parameter invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeDistribution {
    kind: Kind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Exponential { rate: f64 },
    Weibull { shape: f64, scale: f64 },
    Gamma { shape: f64, rate: f64 },
    Lognormal { log_mean: f64, log_sd: f64 },
}

impl LifetimeDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        check_positive("rate", rate)?;
        Ok(Self {
            kind: Kind::Exponential { rate },
        })
    }

    pub fn weibull(shape: f64, scale: f64) -> Result<Self> {
        check_positive("shape", shape)?;
        check_positive("scale", scale)?;
        Ok(Self {
            kind: Kind::Weibull { shape, scale },
        })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        check_positive("shape", shape)?;
        check_positive("rate", rate)?;
        Ok(Self {
            kind: Kind::Gamma { shape, rate },
        })
    }

    pub fn lognormal(log_mean: f64, log_sd: f64) -> Result<Self> {
        check_finite("log_mean", log_mean)?;
        check_positive("log_sd", log_sd)?;
        Ok(Self {
            kind: Kind::Lognormal { log_mean, log_sd },
        })
    }

    /// Builds a distribution from its family and parameters in the order
    /// reported by [`parameters`](Self::parameters).
    pub fn from_parameters(family: Family, params: &[f64]) -> Result<Self> {
        if params.len() != family.arity() {
            return Err(Error::Domain(format!(
                "{} takes {} parameters, got {}",
                family.name(),
                family.arity(),
                params.len()
            )));
        }
        match family {
            Family::Exponential => Self::exponential(params[0]),
            Family::Weibull => Self::weibull(params[0], params[1]),
            Family::Gamma => Self::gamma(params[0], params[1]),
            Family::Lognormal => Self::lognormal(params[0], params[1]),
        }
    }

    pub fn family(&self) -> Family {
        match self.kind {
            Kind::Exponential { .. } => Family::Exponential,
            Kind::Weibull { .. } => Family::Weibull,
            Kind::Gamma { .. } => Family::Gamma,
            Kind::Lognormal { .. } => Family::Lognormal,
        }
    }

    /// Named parameters, e.g. `[("shape", 2.0), ("scale", 1.0)]`.
    pub fn parameters(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            Kind::Exponential { rate } => alloc::vec![("rate", rate)],
            Kind::Weibull { shape, scale } => alloc::vec![("shape", shape), ("scale", scale)],
            Kind::Gamma { shape, rate } => alloc::vec![("shape", shape), ("rate", rate)],
            Kind::Lognormal { log_mean, log_sd } => {
                alloc::vec![("log_mean", log_mean), ("log_sd", log_sd)]
            }
        }
    }

    pub fn parameter_names(family: Family) -> &'static [&'static str] {
        match family {
            Family::Exponential => &["rate"],
            Family::Weibull => &["shape", "scale"],
            Family::Gamma => &["shape", "rate"],
            Family::Lognormal => &["log_mean", "log_sd"],
        }
    }

    /// `(F(t), R(t))`, each computed directly so neither loses precision in
    /// its own small tail. Assumes `t >= 0`.
    pub(crate) fn cdf_sf(&self, t: f64) -> (f64, f64) {
        if t <= 0.0 {
            return (0.0, 1.0);
        }
        match self.kind {
            Kind::Exponential { rate } => {
                let x = rate * t;
                (-libm::expm1(-x), libm::exp(-x))
            }
            Kind::Weibull { shape, scale } => {
                let z = libm::pow(t / scale, shape);
                (-libm::expm1(-z), libm::exp(-z))
            }
            Kind::Gamma { shape, rate } => math::regularized_gamma(shape, rate * t),
            Kind::Lognormal { log_mean, log_sd } => {
                let z = (libm::log(t) - log_mean) / log_sd;
                (math::normal_cdf(z), math::normal_sf(z))
            }
        }
    }

    pub(crate) fn survival(&self, t: f64) -> f64 {
        match self.kind {
            Kind::Exponential { rate } => libm::exp(-rate * t.max(0.0)),
            Kind::Weibull { shape, scale } => libm::exp(-libm::pow(t.max(0.0) / scale, shape)),
            _ => self.cdf_sf(t).1,
        }
    }

    /// `ln R(t)`, i.e. minus the cumulative hazard.
    pub(crate) fn ln_survival(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.kind {
            Kind::Exponential { rate } => -rate * t,
            Kind::Weibull { shape, scale } => -libm::pow(t / scale, shape),
            _ => libm::log(self.cdf_sf(t).1),
        }
    }

    pub(crate) fn density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        libm::exp(self.ln_density(t))
    }

    pub(crate) fn ln_density(&self, t: f64) -> f64 {
        if t < 0.0 {
            return f64::NEG_INFINITY;
        }
        match self.kind {
            Kind::Exponential { rate } => libm::log(rate) - rate * t,
            Kind::Weibull { shape, scale } => {
                if t == 0.0 {
                    return power_at_zero(shape, libm::log(shape / scale));
                }
                let lz = libm::log(t / scale);
                libm::log(shape / scale) + (shape - 1.0) * lz - libm::exp(shape * lz)
            }
            Kind::Gamma { shape, rate } => {
                if t == 0.0 {
                    return power_at_zero(shape, libm::log(rate) - math::ln_gamma(shape));
                }
                shape * libm::log(rate) + (shape - 1.0) * libm::log(t)
                    - rate * t
                    - math::ln_gamma(shape)
            }
            Kind::Lognormal { log_mean, log_sd } => {
                if t == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let lt = libm::log(t);
                let z = (lt - log_mean) / log_sd;
                -0.5 * z * z - lt - libm::log(log_sd) - 0.5 * libm::log(2.0 * core::f64::consts::PI)
            }
        }
    }

    /// `ln f(age + x) - ln R(age)`: log-density of a further life `x` given
    /// survival to `age`.
    pub(crate) fn ln_conditional_density(&self, age: f64, x: f64) -> f64 {
        match self.kind {
            Kind::Exponential { rate } => libm::log(rate) - rate * x,
            Kind::Weibull { shape, scale } if age > 0.0 => {
                // H(a + x) - H(a) = (a/η)^k expm1(k log1p(x/a)), free of cancellation.
                let growth = libm::expm1(shape * libm::log1p(x / age));
                let dh = libm::exp(shape * libm::log(age / scale) + libm::log(growth));
                libm::log(shape / scale) + (shape - 1.0) * libm::log((age + x) / scale) - dh
            }
            _ if age > 0.0 => self.ln_density(age + x) - self.ln_survival(age),
            _ => self.ln_density(x),
        }
    }

    /// Reliability `R(t) = Pr(T > t)`.
    pub fn reliability_at(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.survival(t))
    }

    /// `F(t) = 1 - R(t)`, computed as the complement so the two always sum
    /// to one.
    pub fn cdf_at(&self, t: f64) -> Result<f64> {
        Ok(1.0 - self.reliability_at(t)?)
    }

    pub fn pdf_at(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.density(t))
    }

    /// Hazard rate `f(t) / R(t)`; errors once `R(t)` drops below
    /// [`HAZARD_SURVIVAL_FLOOR`].
    pub fn hazard_at(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let r = self.survival(t);
        if r < HAZARD_SURVIVAL_FLOOR {
            return Err(Error::Singularity(format!(
                "reliability {r:e} at t = {t} is indistinguishable from zero"
            )));
        }
        match self.kind {
            Kind::Exponential { rate } => Ok(rate),
            Kind::Weibull { shape, scale } => {
                if t == 0.0 {
                    return Ok(libm::exp(power_at_zero(shape, libm::log(shape / scale))));
                }
                Ok(shape / scale * libm::pow(t / scale, shape - 1.0))
            }
            _ => Ok(self.density(t) / r),
        }
    }

    /// Time `t` with `F(t) = p`, for `p` in `[0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Domain(format!("quantile probability {p} not in [0, 1)")));
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        match self.kind {
            Kind::Exponential { rate } => Ok(-libm::log1p(-p) / rate),
            Kind::Weibull { shape, scale } => Ok(scale * libm::pow(-libm::log1p(-p), 1.0 / shape)),
            _ if p < 0.5 => self.solve_cdf(p),
            // 1 - p is exact for p >= 1/2.
            _ => self.solve_survival(1.0 - p),
        }
    }

    /// Time `t` with `R(t) = s`, for `s` in `(0, 1]`. This is the sampler's
    /// primitive: it stays accurate when `s` is tiny, where `quantile(1 - s)`
    /// would round to `quantile(1)`.
    pub fn inverse_survival(&self, s: f64) -> Result<f64> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain(format!("survival probability {s} not in (0, 1]")));
        }
        if s == 1.0 {
            return Ok(0.0);
        }
        match self.kind {
            Kind::Exponential { rate } => Ok(-libm::log(s) / rate),
            Kind::Weibull { shape, scale } => Ok(scale * libm::pow(-libm::log(s), 1.0 / shape)),
            _ if s > 0.5 => self.solve_cdf(1.0 - s),
            _ => self.solve_survival(s),
        }
    }

    /// Time `t` with `ln R(t) = ln_s` for `ln_s <= 0`. Equivalent to
    /// `inverse_survival(exp(ln_s))` without underflow for very old units.
    pub(crate) fn inverse_ln_survival(&self, ln_s: f64) -> Result<f64> {
        if !(ln_s <= 0.0) {
            return Err(Error::Domain(format!("log-survival {ln_s} must be <= 0")));
        }
        if ln_s == 0.0 {
            return Ok(0.0);
        }
        match self.kind {
            Kind::Exponential { rate } => Ok(-ln_s / rate),
            Kind::Weibull { shape, scale } => Ok(scale * libm::pow(-ln_s, 1.0 / shape)),
            _ if ln_s > -core::f64::consts::LN_2 => self.solve_cdf(-libm::expm1(ln_s)),
            _ => self.solve_monotone(|t| ln_s - libm::log(self.cdf_sf(t).1)),
        }
    }

    fn solve_cdf(&self, p: f64) -> Result<f64> {
        self.solve_monotone(|t| self.cdf_sf(t).0 - p)
    }

    fn solve_survival(&self, s: f64) -> Result<f64> {
        let target = libm::log(s);
        // ln R is decreasing; negate to keep the increasing convention.
        self.solve_monotone(|t| target - libm::log(self.cdf_sf(t).1))
    }

    /// Root of an increasing function of `t` on `(0, ∞)`.
    fn solve_monotone<G: Fn(f64) -> f64>(&self, g: G) -> Result<f64> {
        let guess = self.median_guess();
        let mut lo = guess;
        let mut hi = guess;
        let mut steps = 0;
        while g(lo) > 0.0 {
            lo *= 0.25;
            steps += 1;
            if steps > 600 || lo == 0.0 {
                return Err(self.bracket_error());
            }
        }
        steps = 0;
        while g(hi) < 0.0 {
            hi *= 4.0;
            steps += 1;
            if steps > 600 || !hi.is_finite() {
                return Err(self.bracket_error());
            }
        }
        find_root(&g, lo, hi, 4.0 * f64::EPSILON, 1e-300, 300)
    }

    fn median_guess(&self) -> f64 {
        match self.kind {
            Kind::Lognormal { log_mean, .. } => libm::exp(log_mean),
            _ => self.mttf(),
        }
    }

    fn bracket_error(&self) -> Error {
        Error::Convergence {
            reason: format!("could not bracket quantile of {:?}", self.family()),
            iterations: 600,
            width: f64::INFINITY,
        }
    }

    /// One draw by inversion of the survival function; consumes exactly one
    /// uniform from the stream.
    pub fn sample_ttf(&self, stream: &mut RandomStream) -> f64 {
        let u = stream.uniform();
        // Cannot fail: u is in (0, 1) and every family is bracketable there.
        self.inverse_ln_survival(libm::log(u))
            .unwrap_or(f64::INFINITY)
    }

    /// Mean time to failure.
    pub fn mttf(&self) -> f64 {
        match self.kind {
            Kind::Exponential { rate } => 1.0 / rate,
            Kind::Weibull { shape, scale } => scale * math::gamma_fn(1.0 + 1.0 / shape),
            Kind::Gamma { shape, rate } => shape / rate,
            Kind::Lognormal { log_mean, log_sd } => libm::exp(log_mean + 0.5 * log_sd * log_sd),
        }
    }
}

// ln of `c * t^(shape - 1)` as t -> 0+.
fn power_at_zero(shape: f64, ln_c: f64) -> f64 {
    if shape < 1.0 {
        f64::INFINITY
    } else if shape == 1.0 {
        ln_c
    } else {
        f64::NEG_INFINITY
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("time {t} must be non-negative")))
    }
}

/// Hazard law of one bathtub segment, in time measured from the segment's
/// start (`τ = t - start`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HazardLaw {
    /// Burn-in: `h(τ) = c (1 + τ)^exponent` with `exponent < 0`. The unit
    /// shift keeps the hazard finite at the segment start, where it equals `c`.
    DecreasingPower { c: f64, exponent: f64 },
    /// Useful life: `h(τ) = rate`.
    Constant { rate: f64 },
    /// Wear-out: `h(τ) = c τ^exponent` with `exponent > 0`.
    IncreasingPower { c: f64, exponent: f64 },
}

impl HazardLaw {
    fn validate(&self) -> Result<()> {
        match *self {
            HazardLaw::DecreasingPower { c, exponent } => {
                check_positive("c", c)?;
                if !(exponent.is_finite() && exponent < 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "exponent",
                        value: exponent,
                        reason: "decreasing segment needs a negative exponent",
                    });
                }
            }
            HazardLaw::Constant { rate } => check_positive("rate", rate)?,
            HazardLaw::IncreasingPower { c, exponent } => {
                check_positive("c", c)?;
                check_positive("exponent", exponent)?;
            }
        }
        Ok(())
    }

    fn hazard(&self, tau: f64) -> f64 {
        match *self {
            HazardLaw::DecreasingPower { c, exponent } => c * libm::pow(1.0 + tau, exponent),
            HazardLaw::Constant { rate } => rate,
            HazardLaw::IncreasingPower { c, exponent } => c * libm::pow(tau, exponent),
        }
    }

    /// `∫₀^τ h(u) du`.
    fn integrated(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        match *self {
            HazardLaw::DecreasingPower { c, exponent } => {
                let k1 = exponent + 1.0;
                let l = libm::log1p(tau);
                if k1 == 0.0 {
                    c * l
                } else {
                    c * libm::expm1(k1 * l) / k1
                }
            }
            HazardLaw::Constant { rate } => rate * tau,
            HazardLaw::IncreasingPower { c, exponent } => {
                c * libm::pow(tau, exponent + 1.0) / (exponent + 1.0)
            }
        }
    }
}

/// Piecewise hazard profile: burn-in, useful life and wear-out segments.
///
/// The hazard may jump at a segment boundary; the cumulative hazard is
/// integrated piecewise and is therefore continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct BathtubProfile {
    segments: Vec<(f64, HazardLaw)>,
}

impl BathtubProfile {
    pub fn new(segments: Vec<(f64, HazardLaw)>) -> Result<Self> {
        let Some(&(first, _)) = segments.first() else {
            return Err(Error::Domain("bathtub profile needs at least one segment".into()));
        };
        if first != 0.0 {
            return Err(Error::Domain(format!(
                "first bathtub segment must start at 0, not {first}"
            )));
        }
        for pair in segments.windows(2) {
            if !(pair[1].0 > pair[0].0) || !pair[1].0.is_finite() {
                return Err(Error::Domain(format!(
                    "segment starts must be strictly increasing ({} then {})",
                    pair[0].0, pair[1].0
                )));
            }
        }
        for (_, law) in &segments {
            law.validate()?;
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[(f64, HazardLaw)] {
        &self.segments
    }

    fn segment_index(&self, t: f64) -> usize {
        self.segments
            .iter()
            .rposition(|&(start, _)| start <= t)
            .unwrap_or(0)
    }

    pub fn hazard_at(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let (start, law) = self.segments[self.segment_index(t)];
        Ok(law.hazard(t - start))
    }

    /// Cumulative hazard `H(t)`.
    pub fn cumulative_hazard(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let idx = self.segment_index(t);
        let mut acc = math::CompensatedSum::default();
        for (i, &(start, law)) in self.segments[..idx].iter().enumerate() {
            let end = self.segments[i + 1].0;
            acc.add(law.integrated(end - start));
        }
        let (start, law) = self.segments[idx];
        acc.add(law.integrated(t - start));
        Ok(acc.value())
    }

    /// `R(t) = exp(-H(t))`.
    pub fn bathtub_reliability(&self, t: f64) -> Result<f64> {
        Ok(libm::exp(-self.cumulative_hazard(t)?))
    }
}
