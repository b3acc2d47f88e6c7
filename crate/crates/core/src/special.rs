//! Special functions shared by the closed forms and the Fock oracle.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

const LN_FACT_TABLE: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..LN_FACT_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < LN_FACT_TABLE {
        ln_fact_table()[n]
    } else {
        // Stirling series, far beyond any cutoff used here
        let x = n as f64 + 1.0;
        (x - 0.5) * x.ln() - x + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
    }
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * f64::from(n - i) / f64::from(i + 1);
    }
    acc.round()
}

/// `(2i-1)!!` with the convention `(-1)!! = 1`.
pub fn odd_double_factorial(i: u32) -> f64 {
    (1..=i).fold(1.0, |acc, k| acc * f64::from(2 * k - 1))
}

/// Rising factorial `(x)_n = x (x+1) ... (x+n-1)`.
pub fn pochhammer(x: f64, n: u32) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + f64::from(k)))
}

/// Stirling numbers of the second kind `S(n, k)`.
pub fn stirling2(n: u32, k: u32) -> f64 {
    let n = n as usize;
    let k = k as usize;
    if k > n {
        return 0.0;
    }
    let mut row = vec![0.0f64; n + 1];
    row[0] = 1.0;
    for i in 1..=n {
        for j in (1..=i).rev() {
            row[j] = j as f64 * row[j] + row[j - 1];
        }
        row[0] = 0.0;
    }
    row[k]
}

/// `e^{i theta}` with exact values on multiples of π/2.
///
/// Canonical phase triples sit on quadrantal angles; exact unit phases keep
/// the mod-4 photon-number selection rules free of rounding residue.
pub fn unit_phase(theta: f64) -> Complex64 {
    let quarter = theta / (0.5 * PI);
    let nearest = quarter.round();
    if (quarter - nearest).abs() < 1e-13 {
        match (nearest as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, theta)
    }
}

/// Dense number-basis matrix of the displacement operator,
/// `out[m * dim + n] = <m| D(delta) |n>` for `m, n < dim`.
///
/// Elements are normalized associated-Laguerre functions
/// `sqrt(k!/(k+a)!) x^{a/2} e^{-x/2} L_k^{(a)}(x)`, `x = |delta|^2`, generated
/// by an upward three-term recurrence seeded in log space so that no
/// intermediate factorial or power is ever formed.
pub fn displacement_matrix(delta: Complex64, dim: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    let x = delta.norm_sqr();
    let phase = if x > 0.0 {
        delta / x.sqrt()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut f = vec![0.0f64; dim];
    let mut phase_pow = Complex64::new(1.0, 0.0);
    for a in 0..dim {
        let len = dim - a;
        normalized_laguerre_column(x, a, &mut f[..len]);
        let lower = phase_pow;
        let upper = if a % 2 == 0 {
            phase_pow.conj()
        } else {
            -phase_pow.conj()
        };
        for k in 0..len {
            out[(k + a) * dim + k] = lower * f[k];
            if a > 0 {
                out[k * dim + k + a] = upper * f[k];
            }
        }
        phase_pow *= phase;
    }
    out
}

fn normalized_laguerre_column(x: f64, a: usize, f: &mut [f64]) {
    if f.is_empty() {
        return;
    }
    let af = a as f64;
    f[0] = if x == 0.0 {
        if a == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        (-0.5 * x + 0.5 * af * x.ln() - 0.5 * ln_factorial(a)).exp()
    };
    if f.len() > 1 {
        f[1] = (1.0 + af - x) * f[0] / (1.0 + af).sqrt();
    }
    for k in 1..f.len().saturating_sub(1) {
        let kf = k as f64;
        f[k + 1] = ((2.0 * kf + 1.0 + af - x) * f[k] - (kf * (kf + af)).sqrt() * f[k - 1])
            / ((kf + 1.0) * (kf + 1.0 + af)).sqrt();
    }
}

/// Normalized harmonic-oscillator eigenfunctions `<x|n>` for `n = 0..len`,
/// in the convention `<x|0> = pi^{-1/4} e^{-x^2/2}`.
pub fn hermite_functions(x: f64, len: usize) -> Vec<f64> {
    let mut h = vec![0.0f64; len];
    if len == 0 {
        return h;
    }
    h[0] = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if len > 1 {
        h[1] = std::f64::consts::SQRT_2 * x * h[0];
    }
    for n in 1..len.saturating_sub(1) {
        let nf = n as f64;
        h[n + 1] = (2.0 / (nf + 1.0)).sqrt() * x * h[n] - (nf / (nf + 1.0)).sqrt() * h[n - 1];
    }
    h
}

/// Composite Simpson weights for `n` equally spaced samples (unit spacing).
/// An odd number of intervals closes with Simpson's 3/8 rule on the last three.
pub fn simpson_weights(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two samples");
    let intervals = n - 1;
    let mut w = vec![0.0f64; n];
    if intervals == 1 {
        w[0] = 0.5;
        w[1] = 0.5;
        return w;
    }
    let (simpson_intervals, tail) = if intervals.is_multiple_of(2) {
        (intervals, false)
    } else {
        (intervals - 3, true)
    };
    if simpson_intervals > 0 {
        w[0] += 1.0 / 3.0;
        w[simpson_intervals] += 1.0 / 3.0;
        for (i, wi) in w.iter_mut().enumerate().take(simpson_intervals).skip(1) {
            *wi += if i % 2 == 1 { 4.0 / 3.0 } else { 2.0 / 3.0 };
        }
    }
    if tail {
        let s = simpson_intervals;
        w[s] += 3.0 / 8.0;
        w[s + 1] += 9.0 / 8.0;
        w[s + 2] += 9.0 / 8.0;
        w[s + 3] += 3.0 / 8.0;
    }
    w
}

/// Bisection on a bracketing interval `[lo, hi]` with `f(lo)`, `f(hi)` of
/// opposite sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= tol {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn stirling_table() {
        let expected = [
            (1, 1, 1.0),
            (2, 1, 1.0),
            (2, 2, 1.0),
            (3, 1, 1.0),
            (3, 2, 3.0),
            (3, 3, 1.0),
            (4, 1, 1.0),
            (4, 2, 7.0),
            (4, 3, 6.0),
            (4, 4, 1.0),
            (4, 0, 0.0),
        ];
        for (n, k, s) in expected {
            assert_eq!(stirling2(n, k), s, "S({n},{k})");
        }
    }

    #[test]
    fn combinatorics() {
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(3, 5), 0.0);
        assert_eq!(odd_double_factorial(0), 1.0);
        assert_eq!(odd_double_factorial(3), 15.0);
        assert_eq!(pochhammer(0.5, 2), 0.75);
        assert!(close(ln_factorial(10), 3628800f64.ln(), 1e-12));
    }

    #[test]
    fn unit_phase_is_exact_on_quadrants() {
        assert_eq!(unit_phase(PI), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_phase(1.5 * PI), Complex64::new(0.0, -1.0));
        assert_eq!(unit_phase(-0.5 * PI), Complex64::new(0.0, -1.0));
        let z = unit_phase(0.3);
        assert!(close(z.re, 0.3f64.cos(), 1e-15));
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let delta = Complex64::new(0.7, -0.4);
        let dim = 30;
        let d = displacement_matrix(delta, dim);
        let mut amp = Complex64::new((-0.5 * delta.norm_sqr()).exp(), 0.0);
        for m in 0..dim {
            let got = d[m * dim];
            assert!((got - amp).norm() < 1e-14, "m={m}: {got} vs {amp}");
            amp = amp * delta / ((m + 1) as f64).sqrt();
        }
        // <0|D|n> = (-delta*)^n/sqrt(n!) e^{-|delta|^2/2}
        let mut amp = Complex64::new((-0.5 * delta.norm_sqr()).exp(), 0.0);
        for (n, got) in d.iter().take(dim).enumerate() {
            assert!((got - amp).norm() < 1e-14, "n={n}");
            amp = amp * (-delta.conj()) / ((n + 1) as f64).sqrt();
        }
    }

    #[test]
    fn displacement_columns_are_nearly_unit() {
        // columns with n well below the cutoff keep their full norm
        let delta = Complex64::new(1.3, 2.1);
        let dim = 80;
        let d = displacement_matrix(delta, dim);
        for n in 0..20 {
            let norm: f64 = (0..dim).map(|m| d[m * dim + n].norm_sqr()).sum();
            assert!(close(norm, 1.0, 1e-12), "column {n}: {norm}");
        }
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let n = 12;
        let samples = 2001;
        let (a, b) = (-12.0, 12.0);
        let h = (b - a) / (samples - 1) as f64;
        let w = simpson_weights(samples);
        let rows: Vec<Vec<f64>> = (0..samples)
            .map(|i| hermite_functions(a + h * i as f64, n))
            .collect();
        for p in 0..n {
            for q in 0..n {
                let s: f64 = (0..samples)
                    .map(|i| w[i] * rows[i][p] * rows[i][q])
                    .sum::<f64>()
                    * h;
                let expect = if p == q { 1.0 } else { 0.0 };
                assert!(close(s, expect, 1e-10), "<{p}|{q}> = {s}");
            }
        }
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        for n in [3usize, 4, 5, 8, 11] {
            let w = simpson_weights(n);
            let h = 2.0 / (n - 1) as f64;
            let s: f64 = (0..n)
                .map(|i| {
                    let x = -1.0 + h * i as f64;
                    w[i] * (x * x * x + 2.0 * x * x + 1.0)
                })
                .sum::<f64>()
                * h;
            assert!(close(s, 4.0 / 3.0 + 2.0, 1e-13), "n={n}: {s}");
        }
    }
}
