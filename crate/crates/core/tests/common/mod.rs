//! Independent reference computations used by the integration tests. Nothing
//! here calls into the library's numerics.

#![allow(dead_code)]

/// Adaptive Simpson quadrature.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Nelder-Mead simplex minimiser with restarts.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], scale: f64, tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let mut best = x0.to_vec();
    let mut best_f = f(&best);
    for _restart in 0..6 {
        let (x, fx) = nm_once(&f, &best, scale, tol, max_iter);
        let improved = fx < best_f - 1e-15 * best_f.abs().max(1.0);
        best = x;
        best_f = fx.min(best_f);
        if !improved {
            break;
        }
    }
    (best, best_f)
}

fn nm_once<F: Fn(&[f64]) -> f64>(f: &F, x0: &[f64], scale: f64, tol: f64, max_iter: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += scale * (1.0 + p[i].abs());
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    for _ in 0..max_iter {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let spread = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())))
            .fold(0.0, f64::max);
        if spread < tol && (vals[n] - vals[0]).abs() <= tol * (1.0 + vals[0].abs()) {
            break;
        }
        let centroid: Vec<f64> = (0..n).map(|j| pts[..n].iter().map(|p| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (pts[n][j] - centroid[j])).collect() };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let x = along(-0.5);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(0.5);
                let v = f(&x);
                (x, v)
            };
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let p: Vec<f64> = (0..n).map(|j| pts[0][j] + 0.5 * (pts[i][j] - pts[0][j])).collect();
                    vals[i] = f(&p);
                    pts[i] = p;
                }
            }
        }
    }
    let i = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[i].clone(), vals[i])
}

/// Golden-section maximiser on `[a, b]` for unimodal functions.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol * (1.0 + c.abs()) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// One-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov coefficient at the 1% level.
pub const KS_C_1PCT: f64 = 1.627_61;

pub fn ks_critical_one_sample(n: usize) -> f64 {
    KS_C_1PCT / (n as f64).sqrt()
}

pub fn ks_critical_two_sample(n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    KS_C_1PCT * ((n + m) / (n * m)).sqrt()
}

/// `Pr(Poisson(m) >= k)` by summing the lower tail.
pub fn poisson_upper(m: f64, k: usize) -> f64 {
    let mut term = (-m).exp();
    let mut lower = 0.0;
    for j in 0..k {
        lower += term;
        term *= m / (j + 1) as f64;
    }
    (1.0 - lower).max(0.0)
}

/// Renewal function of gamma(2, μ) gaps: the n-th arrival is Erlang(2n, μ),
/// so `M(t) = Σₙ Pr(Poisson(μt) ≥ 2n)`.
pub fn erlang2_renewal(mu: f64, t: f64) -> f64 {
    let m = mu * t;
    let mut total = 0.0;
    for n in 1..400 {
        let p = poisson_upper(m, 2 * n);
        total += p;
        if p < 1e-18 {
            break;
        }
    }
    total
}

/// Independent gamma CDF by quadrature of the density.
pub fn gamma_cdf_quad(shape: f64, rate: f64, t: f64) -> f64 {
    let ln_norm = shape * rate.ln() - ln_gamma_lanczos(shape);
    integrate(|x| if x <= 0.0 { if shape == 1.0 { (ln_norm).exp() } else { 0.0 } } else { (ln_norm + (shape - 1.0) * x.ln() - rate * x).exp() }, 0.0, t, 1e-13)
}

/// Lanczos approximation (g = 7, n = 9).
pub fn ln_gamma_lanczos(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma_lanczos(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = C[0];
    let t = x + G + 0.5;
    for (i, &c) in C.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Independent standard normal CDF by quadrature of the density.
pub fn normal_cdf_quad(z: f64) -> f64 {
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if z < 0.0 {
        integrate(phi, z - 40.0, z, 1e-15)
    } else {
        1.0 - integrate(phi, z, z + 40.0, 1e-15)
    }
}

pub fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Small deterministic generator for test inputs (SplitMix64).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn exponential(&mut self, rate: f64) -> f64 {
        -self.uniform().ln() / rate
    }

    pub fn weibull(&mut self, shape: f64, scale: f64) -> f64 {
        scale * (-self.uniform().ln()).powf(1.0 / shape)
    }
}

#[test]
fn oracle_self_checks() {
    let v = integrate(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
    assert!((v - 2.0).abs() < 1e-10);
    let (x, _) = nelder_mead(|p| (p[0] - 1.5).powi(2) + 3.0 * (p[1] + 0.5).powi(2), &[0.0, 0.0], 0.5, 1e-12, 5000);
    assert!((x[0] - 1.5).abs() < 1e-6 && (x[1] + 0.5).abs() < 1e-6);
    assert!((ln_gamma_lanczos(5.0) - 24f64.ln()).abs() < 1e-12);
    assert!((erlang2_renewal(2.0, 1.0) - 0.754_579).abs() < 1e-6);
    assert!((normal_cdf_quad(1.0) - 0.841_344_746_068_542_9).abs() < 1e-12);
}
