//! Numerical building blocks shared by the modules: compensated summation,
//! special functions and bracketed one-dimensional solvers.

use crate::error::{Error, Result};
use alloc::format;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub(crate) fn gamma_fn(x: f64) -> f64 {
    libm::tgamma(x)
}

const GAMMA_EPS: f64 = 1e-16;
const GAMMA_MAX_ITER: usize = 10_000;

/// Regularized incomplete gamma functions `(P(a, x), Q(a, x))`.
///
/// The power series is used below `x = a + 1` and a Lentz continued fraction
/// above it, so whichever of the pair is small is computed directly rather
/// than as `1 - other`.
pub(crate) fn regularized_gamma(a: f64, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let ln_prefactor = a * libm::log(x) - x - ln_gamma(a);
    if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        for _ in 0..GAMMA_MAX_ITER {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * GAMMA_EPS {
                break;
            }
        }
        let p = (libm::log(sum) + ln_prefactor).exp_clamped();
        (p, 1.0 - p)
    } else {
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..GAMMA_MAX_ITER {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < GAMMA_EPS {
                break;
            }
        }
        let q = (libm::log(h) + ln_prefactor).exp_clamped();
        (1.0 - q, q)
    }
}

trait ExpClamped {
    fn exp_clamped(self) -> f64;
}

impl ExpClamped for f64 {
    fn exp_clamped(self) -> f64 {
        libm::exp(self).min(1.0)
    }
}

/// Standard normal upper tail `1 - Φ(z)`.
pub(crate) fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Standard normal CDF `Φ(z)`.
pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// Brent's bracketed root finder for a function with `f(lo)` and `f(hi)` of
/// opposite sign. Stops when the bracket is narrower than
/// `rel_tol * |x| + abs_tol` or the residual vanishes.
pub(crate) fn find_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Convergence {
            reason: format!("root not bracketed on [{a}, {b}]"),
            iterations: 0,
            width: (b - a).abs(),
        });
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (rel_tol * b.abs() + abs_tol);
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
    }
    Err(Error::Convergence {
        reason: format!("root finder exhausted its iteration budget near {b}"),
        iterations: max_iter,
        width: (c - b).abs(),
    })
}

/// Brent's derivative-free minimiser on `[a, b]`.
///
/// Returns `(x_min, f(x_min), iterations)`.
pub(crate) fn minimize_bounded<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64, usize) {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    for iter in 0..max_iter {
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return (x, fx, iter);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = tol1.copysign(m - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    (x, fx, max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incomplete_gamma_shape_one_is_exponential() {
        for &x in &[0.01, 0.5, 1.0, 2.0, 7.5, 40.0] {
            let (p, q) = regularized_gamma(1.0, x);
            assert!((q - libm::exp(-x)).abs() <= 1e-14 * libm::exp(-x).max(1e-300));
            assert!((p + q - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn incomplete_gamma_shape_two_closed_form() {
        // Q(2, x) = (1 + x) e^-x
        for &x in &[0.1, 1.0, 3.0, 10.0, 50.0] {
            let (_, q) = regularized_gamma(2.0, x);
            let exact = (1.0 + x) * libm::exp(-x);
            assert!(((q - exact) / exact).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }

    #[test]
    fn root_finder_on_cubic() {
        let r = find_root(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 0.0, 200).unwrap();
        assert!((r - libm::cbrt(2.0)).abs() < 1e-14);
    }

    #[test]
    fn root_finder_reports_missing_bracket() {
        assert!(find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0, 50).is_err());
    }

    #[test]
    fn minimiser_on_parabola() {
        let (x, _, _) = minimize_bounded(|x| (x - 0.3) * (x - 0.3), 0.0, 2.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-8);
    }
}
