//! Brute-force evaluation of every observable on a truncated number-basis
//! vector. This is the ground truth the closed forms are checked against;
//! it shares nothing with them beyond the state's Fock coefficients.

use std::f64::consts::FRAC_2_PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{PhaseSpaceGrid, ScalarField};
use crate::special::{displacement_matrix, hermite_functions, ln_factorial};
use crate::states::{fock_coefficients_with, FockVector, GcsParams};

/// Highest quadrature moment the dense-operator route will build.
pub const MAX_X_MOMENT: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationBudget {
    cutoff: usize,
    tail_tolerance: f64,
}

impl TruncationBudget {
    pub fn new(cutoff: usize, tail_tolerance: f64) -> Result<Self> {
        if cutoff < 8 {
            return Err(Error::InvalidBudget(format!("cutoff {cutoff} < 8")));
        }
        if !(tail_tolerance > 0.0 && tail_tolerance <= 1e-6) {
            return Err(Error::InvalidBudget(format!(
                "tail tolerance {tail_tolerance:e} outside (0, 1e-6]"
            )));
        }
        Ok(Self {
            cutoff,
            tail_tolerance,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Expand `p` within this budget.
    pub fn expand(&self, p: &GcsParams) -> Result<FockVector> {
        fock_coefficients_with(p, self.cutoff, self.tail_tolerance)
    }
}

impl Default for TruncationBudget {
    fn default() -> Self {
        Self {
            cutoff: 80,
            tail_tolerance: 1e-12,
        }
    }
}

fn sqrt_falling(n: usize, k: usize) -> f64 {
    // sqrt(n!/(n-k)!)
    (0.5 * (ln_factorial(n) - ln_factorial(n - k))).exp()
}

/// `⟨â^{†j} â^{k}⟩` by ladder algebra on the coefficients.
pub fn oracle_general_moment(v: &FockVector, j: usize, k: usize) -> Result<Complex64> {
    v.check_truncation()?;
    let c = v.coeffs();
    let len = c.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for n in k..len {
        let target = n - k + j;
        if target >= len {
            break;
        }
        let w = sqrt_falling(n, k) * sqrt_falling(target, j);
        acc += c[target].conj() * c[n] * w;
    }
    Ok(acc)
}

/// `⟨n̂^j⟩ = Σ n^j |cₙ|²`.
pub fn oracle_number_moment(v: &FockVector, j: u32) -> Result<f64> {
    v.check_truncation()?;
    Ok(v.coeffs()
        .iter()
        .enumerate()
        .map(|(n, c)| (n as f64).powi(j as i32) * c.norm_sqr())
        .sum())
}

/// `W(z) = (2/π) Σ_{m,n} c*_m cₙ (−1)ⁿ ⟨m|D(2z)|n⟩`, the displaced-parity
/// form `(2/π)⟨D(z) Π D†(z)⟩` using `D(z)ΠD(−z) = D(2z)Π`.
pub fn oracle_wigner(v: &FockVector, z: Complex64) -> Result<f64> {
    v.check_truncation()?;
    Ok(wigner_unchecked(v, z))
}

fn wigner_unchecked(v: &FockVector, z: Complex64) -> f64 {
    let c = v.coeffs();
    let dim = c.len();
    let d = displacement_matrix(2.0 * z, dim);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..dim {
        if c[m].norm_sqr() == 0.0 {
            continue;
        }
        let row = &d[m * dim..(m + 1) * dim];
        let mut inner = Complex64::new(0.0, 0.0);
        for n in 0..dim {
            let t = row[n] * c[n];
            if n % 2 == 0 {
                inner += t;
            } else {
                inner -= t;
            }
        }
        acc += c[m].conj() * inner;
    }
    FRAC_2_PI * acc.re
}

/// Oracle Wigner function sampled over a grid.
pub fn oracle_wigner_field(v: &FockVector, grid: &PhaseSpaceGrid) -> Result<ScalarField> {
    v.check_truncation()?;
    Ok(ScalarField::from_fn(grid, |x, y| {
        wigner_unchecked(v, Complex64::new(x, y))
    }))
}

/// `P(n) = |cₙ|²` (zero above the cutoff).
pub fn oracle_pnd(v: &FockVector, n: usize) -> f64 {
    v.coeffs().get(n).map_or(0.0, |c| c.norm_sqr())
}

/// `⟨v|D(δ)|v⟩` through the number-basis displacement matrix.
pub fn oracle_displacement_overlap(v: &FockVector, delta: Complex64) -> Result<Complex64> {
    v.check_truncation()?;
    let c = v.coeffs();
    let dim = c.len();
    let d = displacement_matrix(delta, dim);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..dim {
        let row = &d[m * dim..(m + 1) * dim];
        let inner: Complex64 = row.iter().zip(c).map(|(dmn, cn)| dmn * cn).sum();
        acc += c[m].conj() * inner;
    }
    Ok(acc)
}

/// `|Σ cₙ ⟨x|n⟩|²` with normalized Hermite functions.
pub fn oracle_quadrature_density(v: &FockVector, x: f64) -> f64 {
    let h = hermite_functions(x, v.coeffs().len());
    let amp: Complex64 = v.coeffs().iter().zip(&h).map(|(c, hn)| c * hn).sum();
    amp.norm_sqr()
}

/// `⟨(X̂ − ⟨X̂⟩)^l⟩` for `X̂ = (â e^{−iθ'} + â† e^{iθ'})/2`, built as a dense
/// matrix on a space padded by `l + 1` levels so every power is exact.
pub fn oracle_x_moment(v: &FockVector, l: u32, theta_prime: f64) -> Result<f64> {
    if l > MAX_X_MOMENT {
        return Err(Error::UnsupportedOrder(l));
    }
    v.check_truncation()?;
    let dim = v.coeffs().len() + l as usize + 1;
    let x = dense_quadrature(dim, theta_prime);
    let mut psi = vec![Complex64::new(0.0, 0.0); dim];
    psi[..v.coeffs().len()].copy_from_slice(v.coeffs());
    let mean = inner(&psi, &mat_vec(&x, &psi, dim)).re;
    let mut shifted = x;
    for i in 0..dim {
        shifted[i * dim + i] -= mean;
    }
    let lo = l / 2;
    let mut left = psi.clone();
    for _ in 0..lo {
        left = mat_vec(&shifted, &left, dim);
    }
    let mut right = left.clone();
    if l % 2 == 1 {
        right = mat_vec(&shifted, &right, dim);
    }
    Ok(inner(&left, &right).re)
}

fn dense_quadrature(dim: usize, theta_prime: f64) -> Vec<Complex64> {
    let mut x = vec![Complex64::new(0.0, 0.0); dim * dim];
    let e_minus = Complex64::from_polar(0.5, -theta_prime);
    let e_plus = Complex64::from_polar(0.5, theta_prime);
    for n in 1..dim {
        let s = (n as f64).sqrt();
        // â|n⟩ = √n|n−1⟩, â†|n−1⟩ = √n|n⟩
        x[(n - 1) * dim + n] += e_minus * s;
        x[n * dim + n - 1] += e_plus * s;
    }
    x
}

fn mat_vec(m: &[Complex64], v: &[Complex64], dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|i| {
            m[i * dim..(i + 1) * dim]
                .iter()
                .zip(v)
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{canonical_pscs, ComplexAmplitude, SubtractionIndex};

    fn psi_vec(alpha: f64, l: u8, cutoff: usize) -> FockVector {
        let p = canonical_pscs(
            ComplexAmplitude::real(alpha).unwrap(),
            SubtractionIndex::new(l).unwrap(),
        )
        .unwrap();
        crate::states::fock_coefficients(&p, cutoff).unwrap()
    }

    #[test]
    fn budget_invariants() {
        assert!(TruncationBudget::new(7, 1e-12).is_err());
        assert!(TruncationBudget::new(8, 1e-5).is_err());
        assert!(TruncationBudget::new(8, 0.0).is_err());
        assert!(TruncationBudget::new(40, 1e-6).is_ok());
    }

    #[test]
    fn coherent_mean_photon_number() {
        let v = FockVector::coherent(Complex64::new(1.5, 0.0), 60).unwrap();
        let m = oracle_general_moment(&v, 1, 1).unwrap();
        assert!((m.re - 2.25).abs() < 1e-12 && m.im.abs() < 1e-14);
        let norm = oracle_general_moment(&v, 0, 0).unwrap();
        assert!((norm.re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vacuum_wigner_peak() {
        let v = FockVector::vacuum(10);
        assert!((oracle_wigner(&v, Complex64::new(0.0, 0.0)).unwrap() - FRAC_2_PI).abs() < 1e-15);
        let z = Complex64::new(0.3, -0.5);
        let expect = FRAC_2_PI * (-2.0 * z.norm_sqr()).exp();
        assert!((oracle_wigner(&v, z).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn coherent_wigner_is_displaced_gaussian() {
        let a = Complex64::new(1.2, -0.7);
        let v = FockVector::coherent(a, 60).unwrap();
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, -1.0),
            Complex64::new(-2.0, 0.5),
        ] {
            let expect = FRAC_2_PI * (-2.0 * (z - a).norm_sqr()).exp();
            assert!((oracle_wigner(&v, z).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_at_origin_follows_support() {
        let origin = Complex64::new(0.0, 0.0);
        for (l, sign) in [(0u8, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)] {
            let v = psi_vec(2.0, l, 60);
            let w = oracle_wigner(&v, origin).unwrap();
            assert!((w - sign * FRAC_2_PI).abs() < 1e-12, "l={l}: {w}");
        }
    }

    #[test]
    fn pnd_support_at_large_amplitude() {
        let v = psi_vec(5.0, 0, 150);
        assert_eq!(oracle_pnd(&v, 17), 0.0);
        let peak: Vec<f64> = [16, 20, 24, 28]
            .iter()
            .map(|&n| oracle_pnd(&v, n))
            .collect();
        assert!(peak.iter().sum::<f64>() >= 0.5);
        let argmax = (0..=v.cutoff())
            .max_by(|&a, &b| oracle_pnd(&v, a).total_cmp(&oracle_pnd(&v, b)))
            .unwrap();
        assert!([16, 20, 24, 28].contains(&argmax), "argmax {argmax}");
        assert_eq!(oracle_pnd(&FockVector::vacuum(4), 0), 1.0);
    }

    #[test]
    fn displacement_overlap_of_coherent_state() {
        let a = Complex64::new(0.8, 0.3);
        let v = FockVector::coherent(a, 60).unwrap();
        let d = Complex64::new(0.25, -0.4);
        let expect = Complex64::from_polar((-0.5 * d.norm_sqr()).exp(), 2.0 * (d * a.conj()).im);
        assert!((oracle_displacement_overlap(&v, d).unwrap() - expect).norm() < 1e-12);
        let one = oracle_displacement_overlap(&v, Complex64::new(0.0, 0.0)).unwrap();
        assert!((one - 1.0).norm() < 1e-14);
    }

    #[test]
    fn vacuum_quadrature_density() {
        let v = FockVector::vacuum(5);
        let expect = std::f64::consts::PI.powf(-0.5);
        assert!((oracle_quadrature_density(&v, 0.0) - expect).abs() < 1e-15);
    }

    #[test]
    fn vacuum_quadrature_moments() {
        let v = FockVector::vacuum(10);
        for theta in [0.0, 0.7, 2.0] {
            assert!((oracle_x_moment(&v, 2, theta).unwrap() - 0.25).abs() < 1e-15);
            assert!((oracle_x_moment(&v, 4, theta).unwrap() - 0.1875).abs() < 1e-15);
            assert!(oracle_x_moment(&v, 3, theta).unwrap().abs() < 1e-15);
        }
        assert!(matches!(
            oracle_x_moment(&v, 9, 0.0),
            Err(Error::UnsupportedOrder(9))
        ));
        let v = psi_vec(2.0, 0, 60);
        assert!(oracle_x_moment(&v, 4, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn starved_vector_is_rejected() {
        let v = FockVector::coherent(Complex64::new(3.0, 0.0), 12).unwrap();
        assert!(matches!(
            oracle_general_moment(&v, 1, 1),
            Err(Error::TruncationInadequate { .. })
        ));
    }
}
