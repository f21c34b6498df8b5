//! One-dimensional maximisation by bracketing the root of the derivative.

use crate::error::Result;
use crate::math::find_root;

/// Absolute tolerance on the optimiser coordinate.
pub(crate) const COORD_TOL: f64 = 1e-12;
const MAX_EXPANSIONS: usize = 60;
const MAX_ROOT_ITER: usize = 300;

/// Fourth-order central difference.
pub(crate) fn derivative<F: FnMut(f64) -> f64>(f: &mut F, x: f64) -> f64 {
    let h = 1e-3 * (1.0 + x.abs());
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Search {
    Found {
        x: f64,
        evaluations: usize,
        gradient: f64,
    },
    /// The derivative kept its sign up to the search limit.
    Unbounded { upward: bool, last: f64, evaluations: usize },
}

/// Maximises a function whose derivative `grad` decreases through zero once
/// inside `[lo, hi]`, starting from `x0`.
pub(crate) fn maximize<G: FnMut(f64) -> f64>(mut grad: G, x0: f64, lo: f64, hi: f64) -> Result<Search> {
    let mut evaluations = 0usize;
    let mut g = |x: f64| {
        evaluations += 1;
        grad(x)
    };
    let x0 = x0.clamp(lo, hi);
    let g0 = g(x0);
    if g0 == 0.0 {
        return Ok(Search::Found {
            x: x0,
            evaluations: 1,
            gradient: 0.0,
        });
    }
    let upward = !(g0 < 0.0);
    let mut step = 0.5;
    let mut near = x0;
    let mut far = x0;
    let mut bracketed = false;
    for _ in 0..MAX_EXPANSIONS {
        let next = if upward { (near + step).min(hi) } else { (near - step).max(lo) };
        let gn = g(next);
        if gn.is_nan() || (upward && gn <= 0.0) || (!upward && gn >= 0.0) {
            far = next;
            bracketed = !gn.is_nan();
            if gn.is_nan() {
                // Shrink toward the last finite point.
                step *= 0.25;
                continue;
            }
            break;
        }
        near = next;
        if near == hi || near == lo {
            break;
        }
        step *= 2.0;
    }
    if !bracketed {
        drop(g);
        return Ok(Search::Unbounded {
            upward,
            last: near,
            evaluations,
        });
    }
    let (a, b) = if near < far { (near, far) } else { (far, near) };
    let x = find_root(&mut g, a, b, 0.0, COORD_TOL, MAX_ROOT_ITER)?;
    let gradient = g(x);
    drop(g);
    Ok(Search::Found {
        x,
        evaluations,
        gradient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_peak() {
        match maximize(|x| -2.0 * (x - 3.25), 0.0, -50.0, 50.0).unwrap() {
            Search::Found { x, .. } => assert!((x - 3.25).abs() < 1e-11),
            s => panic!("{s:?}"),
        }
        match maximize(|x| -(x + 7.5), 0.0, -50.0, 50.0).unwrap() {
            Search::Found { x, .. } => assert!((x + 7.5).abs() < 1e-11),
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn reports_monotone_objective() {
        match maximize(|_| 1.0, 0.0, -10.0, 10.0).unwrap() {
            Search::Unbounded { upward, last, .. } => {
                assert!(upward);
                assert_eq!(last, 10.0);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn derivative_is_accurate() {
        let mut f = |x: f64| libm::sin(x);
        assert!((derivative(&mut f, 0.7) - libm::cos(0.7)).abs() < 1e-11);
    }
}
