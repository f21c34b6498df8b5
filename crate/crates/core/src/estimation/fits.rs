use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::likelihood::{cycles, cycles_log_likelihood, Cycle};
use super::optimize::{derivative, maximize, Search, COORD_TOL};
use super::{
    crow_amsaa_log_likelihood, hpp_log_likelihood, Convergence, FitNote, FitResult, ObservedEvents,
    Truncation, MIN_FAILURES_GRP, MIN_FAILURES_HPP, MIN_FAILURES_NHPP, MIN_FAILURES_RENEWAL,
};
use crate::error::{Error, Result};
use crate::lifetime::{Family, LifetimeDistribution};
use crate::math::{compensated_sum, minimize_bounded};
use crate::pointproc::{KijimaVariant, PointProcessModel, Rocof};

/// Closed form `λ̂ = n / E`, with `E` the operating exposure (`T` under
/// instantaneous repair).
pub fn fit_hpp(obs: &ObservedEvents) -> Result<FitResult> {
    obs.require("hpp", MIN_FAILURES_HPP)?;
    let rate = obs.len() as f64 / obs.exposure();
    let ll = hpp_log_likelihood(obs, rate)?;
    Ok(FitResult::new(
        PointProcessModel::Hpp { rate },
        ll,
        1,
        Convergence::default(),
        vec![FitNote::ClosedForm],
    ))
}

/// Power-law NHPP by the closed-form conditional MLE.
///
/// Time-truncated: `β̂ = n / Σ ln(T/tᵢ)`. Failure-truncated: the `i = n` term
/// vanishes and the numerator becomes `n − 1`. In both cases `λ̂ = n / T^β̂`.
pub fn fit_crow_amsaa(obs: &ObservedEvents) -> Result<FitResult> {
    obs.require("crow-amsaa", MIN_FAILURES_NHPP)?;
    let t_end = obs.observation_end();
    let n = obs.len();
    let (numerator, times, note) = match obs.truncation() {
        Truncation::TimeTruncated => {
            if let Some(i) = obs.failure_times().iter().position(|&t| t == t_end) {
                return Err(Error::Domain(format!(
                    "degenerate term: failure {i} coincides with the observation end {t_end}"
                )));
            }
            (n as f64, obs.failure_times(), FitNote::TimeTruncatedN)
        }
        Truncation::FailureTruncated => (
            (n - 1) as f64,
            &obs.failure_times()[..n - 1],
            FitNote::FailureTruncatedNMinusOne,
        ),
    };
    let denom = compensated_sum(times.iter().map(|&t| libm::log(t_end / t)));
    let beta = numerator / denom;
    let lambda = n as f64 / libm::pow(t_end, beta);
    let ll = crow_amsaa_log_likelihood(obs, lambda, beta)?;
    let rocof = Rocof::PowerLaw { lambda, beta };
    Ok(FitResult::new(
        PointProcessModel::Nhpp { rocof },
        ll,
        2,
        Convergence::default(),
        vec![FitNote::ClosedForm, note],
    ))
}

/// Renewal-process fit on the operating gaps.
pub fn fit_renewal(obs: &ObservedEvents, family: Family) -> Result<FitResult> {
    obs.require("renewal", MIN_FAILURES_RENEWAL)?;
    let cyc = cycles(&obs.operating_gaps(), 0.0, KijimaVariant::KijimaI);
    let (ttf, conv, closed) = match family {
        Family::Lognormal => (lognormal_closed_form(&cyc)?, Convergence::default(), true),
        _ => fit_family(family, &cyc)?,
    };
    let ll = cycles_log_likelihood(&ttf, &cyc);
    let notes = if closed { vec![FitNote::ClosedForm] } else { Vec::new() };
    Ok(FitResult::new(
        PointProcessModel::Renewal { ttf },
        ll,
        family.arity(),
        conv,
        notes,
    ))
}

/// Search settings for [`fit_grp_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrpSearch {
    pub q_min: f64,
    pub q_max: f64,
    /// Grid points over `[q_min, q_max]` before refinement.
    pub grid_points: usize,
    /// Relative tolerance of the final refinement in `q`.
    pub q_tolerance: f64,
    /// Hold `q` at this value instead of estimating it.
    pub fixed_q: Option<f64>,
}

impl Default for GrpSearch {
    fn default() -> Self {
        Self {
            q_min: 0.0,
            q_max: 2.0,
            grid_points: 21,
            q_tolerance: 1e-6,
            fixed_q: None,
        }
    }
}

impl GrpSearch {
    fn validate(&self) -> Result<()> {
        if let Some(q) = self.fixed_q {
            crate::error::check_finite("fixed_q", q)?;
            return Ok(());
        }
        crate::error::check_finite("q_min", self.q_min)?;
        crate::error::check_finite("q_max", self.q_max)?;
        if !(self.q_max > self.q_min) {
            return Err(Error::Domain(format!(
                "empty q range [{}, {}]",
                self.q_min, self.q_max
            )));
        }
        if self.grid_points < 3 {
            return Err(Error::Domain("q grid needs at least 3 points".into()));
        }
        crate::error::check_positive("q_tolerance", self.q_tolerance)
    }
}

/// GRP fit with the default `q` search over `[0, 2]`.
pub fn fit_grp(obs: &ObservedEvents, family: Family, variant: KijimaVariant) -> Result<FitResult> {
    fit_grp_with(obs, family, variant, &GrpSearch::default())
}

/// GRP fit: family parameters are profiled out for each `q`; `q` is located
/// on a grid and refined with a bracketed minimiser.
pub fn fit_grp_with(
    obs: &ObservedEvents,
    family: Family,
    variant: KijimaVariant,
    search: &GrpSearch,
) -> Result<FitResult> {
    obs.require("grp", MIN_FAILURES_GRP)?;
    search.validate()?;
    let gaps = obs.operating_gaps();
    let grp = |ttf, q| PointProcessModel::Grp { ttf, q, variant };

    if family == Family::Exponential {
        let q = search.fixed_q.unwrap_or(search.q_min.max(0.0).min(search.q_max));
        let cyc = cycles(&gaps, q, variant);
        let (ttf, conv, _) = fit_family(family, &cyc)?;
        let ll = cycles_log_likelihood(&ttf, &cyc);
        let note = if search.fixed_q.is_some() { FitNote::QFixed } else { FitNote::QUnidentifiable };
        return Ok(FitResult::new(grp(ttf, q), ll, 1, conv, vec![FitNote::ClosedForm, note]));
    }

    if let Some(q) = search.fixed_q {
        let cyc = cycles(&gaps, q, variant);
        let (ttf, conv, _) = fit_family(family, &cyc)?;
        let ll = cycles_log_likelihood(&ttf, &cyc);
        return Ok(FitResult::new(grp(ttf, q), ll, family.arity(), conv, vec![FitNote::QFixed]));
    }

    let mut iterations = 0usize;
    let mut profile = |q: f64| -> Option<(LifetimeDistribution, Convergence, f64)> {
        let cyc = cycles(&gaps, q, variant);
        let (ttf, conv, _) = fit_family(family, &cyc).ok()?;
        iterations += conv.iterations;
        let ll = cycles_log_likelihood(&ttf, &cyc);
        ll.is_finite().then_some((ttf, conv, ll))
    };

    let n = search.grid_points;
    let step = (search.q_max - search.q_min) / (n - 1) as f64;
    let grid: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let q = if i + 1 == n { search.q_max } else { search.q_min + step * i as f64 };
            (q, profile(q).map_or(f64::NEG_INFINITY, |p| p.2))
        })
        .collect();
    let (best_i, &(_, best_ll)) = grid
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("grid is non-empty");
    if !best_ll.is_finite() {
        return Err(Error::Convergence {
            reason: format!("no q in [{}, {}] gave a finite likelihood", search.q_min, search.q_max),
            iterations,
            width: search.q_max - search.q_min,
        });
    }
    let worst_ll = grid.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    let mut notes = Vec::new();
    let q_hat = if best_ll - worst_ll <= 1e-9 * (1.0 + best_ll.abs()) {
        notes.push(FitNote::QUnidentifiable);
        search.q_min.max(0.0).min(search.q_max)
    } else {
        let lo = grid[best_i.saturating_sub(1)].0;
        let hi = grid[(best_i + 1).min(n - 1)].0;
        let (q, neg_ll, _) = minimize_bounded(
            |q| profile(q).map_or(f64::INFINITY, |p| -p.2),
            lo,
            hi,
            search.q_tolerance,
            200,
        );
        if -neg_ll >= best_ll {
            q
        } else {
            grid[best_i].0
        }
    };
    let edge = search.q_tolerance * (search.q_max - search.q_min).max(1.0);
    if !notes.contains(&FitNote::QUnidentifiable)
        && ((q_hat - search.q_min).abs() <= edge || (search.q_max - q_hat).abs() <= edge)
    {
        notes.push(FitNote::QAtSearchBoundary);
    }
    let last = profile(q_hat);
    drop(profile);
    let (ttf, conv, ll) = last.ok_or_else(|| Error::Convergence {
        reason: format!("profile likelihood failed at q = {q_hat}"),
        iterations,
        width: step,
    })?;
    let conv = Convergence {
        iterations: iterations + conv.iterations,
        ..conv
    };
    let k = if notes.contains(&FitNote::QUnidentifiable) { family.arity() } else { family.arity() + 1 };
    Ok(FitResult::new(grp(ttf, q_hat), ll, k, conv, notes))
}

fn lognormal_closed_form(cyc: &[Cycle]) -> Result<LifetimeDistribution> {
    let n = cyc.len() as f64;
    let mu = compensated_sum(cyc.iter().map(|c| libm::log(c.end()))) / n;
    let var = compensated_sum(cyc.iter().map(|c| {
        let d = libm::log(c.end()) - mu;
        d * d
    })) / n;
    if !(var > 0.0) {
        return Err(near_deterministic("lognormal", 0, 0.0));
    }
    LifetimeDistribution::lognormal(mu, libm::sqrt(var))
}

fn near_deterministic(family: &str, iterations: usize, at: f64) -> Error {
    Error::Convergence {
        reason: format!(
            "near-deterministic data: {family} shape estimate diverges (search stopped at log-shape {at:.3})"
        ),
        iterations,
        width: f64::INFINITY,
    }
}

/// Limit on the log-shape coordinate.
const LOG_SHAPE_LIMIT: f64 = 18.0;

/// Maximum-likelihood family parameters for the given cycles. Returns the
/// distribution, diagnostics, and whether a closed form was used.
fn fit_family(
    family: Family,
    cyc: &[Cycle],
) -> Result<(LifetimeDistribution, Convergence, bool)> {
    let n = cyc.len() as f64;
    match family {
        Family::Exponential => {
            let exposure = compensated_sum(cyc.iter().map(|c| c.gap));
            Ok((LifetimeDistribution::exponential(n / exposure)?, Convergence::default(), true))
        }
        Family::Weibull => weibull_profile(cyc),
        Family::Gamma | Family::Lognormal => nested(family, cyc),
    }
}

/// Weibull: the scale has the closed form `η^β = Σ (bᵢ^β − aᵢ^β) / n`, which
/// leaves a one-dimensional equation in the shape.
fn weibull_profile(cyc: &[Cycle]) -> Result<(LifetimeDistribution, Convergence, bool)> {
    let n = cyc.len() as f64;
    let m = cyc.iter().map(|c| c.end()).fold(0.0, f64::max);
    let sum_ln_end = compensated_sum(cyc.iter().map(|c| libm::log(c.end())));
    // (ln Σ(bᵢ^β − aᵢ^β) − β ln m, S'/S), computed on times scaled by m. Each
    // increment is aᵢ^β expm1(β ln(bᵢ/aᵢ)) so huge virtual ages do not cancel.
    let sums = |beta: f64| {
        let mut s = crate::math::CompensatedSum::default();
        let mut ds = crate::math::CompensatedSum::default();
        for c in cyc {
            if c.start > 0.0 {
                let l = libm::log1p(c.gap / c.start);
                let wa = libm::exp(beta * libm::log(c.start / m));
                let growth = libm::expm1(beta * l);
                s.add(wa * growth);
                ds.add(wa * (libm::log(c.start) * growth + l * (growth + 1.0)));
            } else {
                let wb = libm::exp(beta * libm::log(c.gap / m));
                s.add(wb);
                ds.add(wb * libm::log(c.gap));
            }
        }
        (libm::log(s.value()), ds.value() / s.value())
    };
    // d/dθ of the profile log-likelihood, θ = ln β.
    let grad = |theta: f64| {
        let beta = libm::exp(theta);
        let (_, ratio) = sums(beta);
        beta * (n / beta + sum_ln_end - n * ratio)
    };
    let gaps: Vec<f64> = cyc.iter().map(|c| c.gap).collect();
    let theta0 = libm::log(initial_shape(&gaps).clamp(0.05, 50.0));
    match maximize(grad, theta0, -LOG_SHAPE_LIMIT, LOG_SHAPE_LIMIT)? {
        Search::Found {
            x,
            evaluations,
            gradient,
        } => {
            let beta = libm::exp(x);
            let (ln_s_scaled, _) = sums(beta);
            let ln_eta = (ln_s_scaled - libm::log(n)) / beta + libm::log(m);
            let dist = LifetimeDistribution::weibull(beta, libm::exp(ln_eta))?;
            Ok((
                dist,
                Convergence {
                    iterations: evaluations,
                    bracket_width: COORD_TOL,
                    gradient_norm: gradient.abs(),
                },
                false,
            ))
        }
        Search::Unbounded { last, evaluations, upward } => {
            if upward {
                Err(near_deterministic("weibull", evaluations, last))
            } else {
                Err(Error::Convergence {
                    reason: format!("weibull shape estimate collapses toward zero (log-shape {last:.3})"),
                    iterations: evaluations,
                    width: f64::INFINITY,
                })
            }
        }
    }
}

/// Weibull shape from the coefficient of variation (Justus approximation).
fn initial_shape(gaps: &[f64]) -> f64 {
    let (mean, var) = moments(gaps);
    if !(var > 0.0) {
        return 50.0;
    }
    libm::pow(libm::sqrt(var) / mean, -1.086)
}

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = compensated_sum(xs.iter().copied()) / n;
    let var = compensated_sum(xs.iter().map(|&x| (x - mean) * (x - mean))) / n;
    (mean, var)
}

/// Gamma `(ln k, ln rate)` and lognormal `(ln σ, μ)`: the inner coordinate is
/// maximised for each outer value, and the outer derivative is taken at the
/// inner optimum.
fn nested(family: Family, cyc: &[Cycle]) -> Result<(LifetimeDistribution, Convergence, bool)> {
    let build = |outer: f64, inner: f64| match family {
        Family::Gamma => LifetimeDistribution::gamma(libm::exp(outer), libm::exp(inner)),
        Family::Lognormal => LifetimeDistribution::lognormal(inner, libm::exp(outer)),
        _ => unreachable!("nested fit covers gamma and lognormal"),
    };
    let ll = |outer: f64, inner: f64| match build(outer, inner) {
        Ok(d) => {
            let v = cycles_log_likelihood(&d, cyc);
            if v.is_nan() {
                f64::NEG_INFINITY
            } else {
                v
            }
        }
        Err(_) => f64::NEG_INFINITY,
    };

    let gaps: Vec<f64> = cyc.iter().map(|c| c.gap).collect();
    let (outer0, inner0) = match family {
        Family::Gamma => {
            let (mean, var) = moments(&gaps);
            let k = if var > 0.0 { (mean * mean / var).clamp(0.05, 1e3) } else { 1e3 };
            (libm::log(k), libm::log(k / mean))
        }
        _ => {
            let logs: Vec<f64> = gaps.iter().map(|&g| libm::log(g)).collect();
            let (mu, var) = moments(&logs);
            (libm::log(libm::sqrt(var).max(1e-3)), mu)
        }
    };

    let inner_span = 60.0;
    let mut total = 0usize;
    let mut inner_at = |outer: f64, start: f64| -> Result<f64> {
        let mut f = |inner: f64| ll(outer, inner);
        let grad = |inner: f64| derivative(&mut f, inner);
        match maximize(grad, start, start - inner_span, start + inner_span)? {
            Search::Found { x, evaluations, .. } => {
                total += evaluations;
                Ok(x)
            }
            Search::Unbounded { evaluations, last, .. } => {
                total += evaluations;
                Err(Error::Convergence {
                    reason: format!("{} scale search unbounded near {last:.3}", family.name()),
                    iterations: total,
                    width: f64::INFINITY,
                })
            }
        }
    };

    let mut warm = inner0;
    let mut inner_failure = None;
    let outer_grad = |outer: f64| match inner_at(outer, warm) {
        Ok(inner) => {
            warm = inner;
            let mut f = |o: f64| ll(o, inner);
            derivative(&mut f, outer)
        }
        Err(e) => {
            inner_failure = Some(e);
            f64::NAN
        }
    };
    let search = maximize(outer_grad, outer0, -LOG_SHAPE_LIMIT, LOG_SHAPE_LIMIT);
    let search = match search {
        Ok(s) => s,
        Err(e) => return Err(inner_failure.take().unwrap_or(e)),
    };
    match search {
        Search::Found { x, evaluations, gradient } => {
            let inner = inner_at(x, warm)?;
            let dist = build(x, inner)?;
            Ok((
                dist,
                Convergence {
                    iterations: evaluations + total,
                    bracket_width: COORD_TOL,
                    gradient_norm: gradient.abs(),
                },
                false,
            ))
        }
        Search::Unbounded { upward, last, evaluations } => {
            if let Some(e) = inner_failure {
                return Err(e);
            }
            if upward && family == Family::Gamma {
                Err(near_deterministic("gamma", evaluations, last))
            } else {
                Err(Error::Convergence {
                    reason: format!(
                        "{} log-{} search unbounded near {last:.3}",
                        family.name(),
                        if family == Family::Gamma { "shape" } else { "sd" }
                    ),
                    iterations: evaluations,
                    width: f64::INFINITY,
                })
            }
        }
    }
}
