//! Sensitivity to phase-space displacements, `F(δ) = |⟨ψ|D(δ)|ψ⟩|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_oracle::oracle_displacement_overlap;
use crate::grid::{PhaseSpaceGrid, ScalarField};
use crate::states::{coherent_overlap, fock_coefficients_with, GcsParams, Route};

pub const DEFAULT_SENSITIVITY_HALF_WIDTH: f64 = 1.5;
pub const DEFAULT_SENSITIVITY_POINTS: usize = 301;

/// `δ = δ_x + iδ_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Displacement(Complex64);

impl Displacement {
    pub fn new(dx: f64, dp: f64) -> Result<Self> {
        if !(dx.is_finite() && dp.is_finite()) {
            return Err(Error::NonFinite("displacement"));
        }
        Ok(Self(Complex64::new(dx, dp)))
    }

    pub fn zero() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl TryFrom<[f64; 2]> for Displacement {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::new(v[0], v[1])
    }
}

impl From<Displacement> for [f64; 2] {
    fn from(d: Displacement) -> Self {
        [d.0.re, d.0.im]
    }
}

/// `⟨γ|D(δ)|σ⟩ = e^{i Im(δσ*)} ⟨γ|σ+δ⟩`.
fn displaced_overlap(gamma: Complex64, sigma: Complex64, delta: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, (delta * sigma.conj()).im) * coherent_overlap(gamma, sigma + delta)
}

/// `⟨ψ|D(δ)|ψ⟩` as the sixteen-term sum over pairs of coherent components.
pub fn displacement_overlap(p: &GcsParams, d: Displacement) -> Complex64 {
    let delta = d.value();
    if p.bracket_route() == Route::Series {
        let v = fock_coefficients_with(p, p.series_len(), 1e-6)
            .expect("series length always exhausts the state");
        return oracle_displacement_overlap(&v, delta).expect("series vector is faithful");
    }
    let kets = p.kets();
    let mut sum = Complex64::new(0.0, 0.0);
    for bra in &kets {
        for ket in &kets {
            sum += bra.weight.conj()
                * ket.weight
                * displaced_overlap(bra.amplitude, ket.amplitude, delta);
        }
    }
    sum * p.norm_sqr()
}

pub fn sensitivity(p: &GcsParams, d: Displacement) -> f64 {
    displacement_overlap(p, d).norm_sqr()
}

/// The four diagonal terms `Σ_{σ=±1, α_j∈{α,β}} ⟨σα_j|D(δ)|σα_j⟩`, which
/// carry no phase parameters.
pub fn dominant_term(p: &GcsParams, d: Displacement) -> Complex64 {
    let delta = d.value();
    let mut sum = Complex64::new(0.0, 0.0);
    for aj in [p.alpha(), p.beta()] {
        for sigma in [1.0, -1.0] {
            let exponent = Complex64::new(0.0, sigma * (delta * aj.conj()).im)
                - 0.5 * aj.norm_sqr()
                - 0.5 * (sigma * aj + delta).norm_sqr()
                + aj.conj() * (aj + sigma * delta);
            sum += exponent.exp();
        }
    }
    sum
}

/// `F` over a `(δ_x, δ_p)` grid.
pub fn sensitivity_map(p: &GcsParams, grid: &PhaseSpaceGrid) -> ScalarField {
    if p.bracket_route() == Route::Series {
        let v = fock_coefficients_with(p, p.series_len(), 1e-6)
            .expect("series length always exhausts the state");
        return ScalarField::from_fn(grid, |x, y| {
            oracle_displacement_overlap(&v, Complex64::new(x, y))
                .expect("series vector is faithful")
                .norm_sqr()
        });
    }
    ScalarField::from_fn(grid, |x, y| {
        sensitivity(p, Displacement(Complex64::new(x, y)))
    })
}

/// `[−1.5, 1.5]²` with 301 points per axis.
pub fn default_sensitivity_grid() -> PhaseSpaceGrid {
    PhaseSpaceGrid::square(DEFAULT_SENSITIVITY_HALF_WIDTH, DEFAULT_SENSITIVITY_POINTS)
        .expect("static grid")
}

/// `F` at `count` equally spaced directions on the ring `|δ| = radius`.
pub fn angular_profile(p: &GcsParams, radius: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let phi = 2.0 * PI * i as f64 / count as f64;
            sensitivity(p, Displacement(Complex64::from_polar(radius, phi)))
        })
        .collect()
}

/// Location and depth of the first local minimum of `F` along a ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirstNull {
    pub distance: f64,
    pub value: f64,
}

/// First local minimum of `F(t·e^{i·angle})` for `t ∈ (0, max_distance]`.
///
/// Zeros of `F` are touching zeros of a nonnegative function, so they are
/// located by a scan followed by golden-section refinement.
pub fn first_null(p: &GcsParams, angle: f64, max_distance: f64) -> Result<FirstNull> {
    let dir = Complex64::from_polar(1.0, angle);
    let f = |t: f64| sensitivity(p, Displacement(dir * t));
    let scale = p.alpha().norm().max(p.beta().norm()).max(1.0);
    let step = 0.01 / scale;
    let mut prev = f(0.0);
    let mut t = step;
    let mut cur = f(t);
    while t < max_distance {
        let next = f(t + step);
        if cur <= prev && cur <= next && cur < 1.0 {
            let distance = golden_min(&f, t - step, t + step);
            return Ok(FirstNull {
                distance,
                value: f(distance),
            });
        }
        prev = cur;
        cur = next;
        t += step;
    }
    Err(Error::RootNotFound {
        radius: max_distance,
    })
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if fc < fd {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        canonical_pscs, fock_coefficients, ComplexAmplitude, PhaseTriple, SubtractionIndex,
    };

    fn psi(alpha: f64, l: u8) -> GcsParams {
        canonical_pscs(
            ComplexAmplitude::real(alpha).unwrap(),
            SubtractionIndex::new(l).unwrap(),
        )
        .unwrap()
    }

    fn d(x: f64, y: f64) -> Displacement {
        Displacement::new(x, y).unwrap()
    }

    #[test]
    fn identity_displacement() {
        for l in 0..4 {
            let p = psi(2.5, l);
            assert!((displacement_overlap(&p, Displacement::zero()) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn matches_oracle_and_hermiticity() {
        let p = psi(4.0, 0);
        let v = fock_coefficients(&p, 120).unwrap();
        let a = displacement_overlap(&p, d(0.1, 0.0));
        let b = oracle_displacement_overlap(&v, Complex64::new(0.1, 0.0)).unwrap();
        assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        let g = GcsParams::from_complex(
            Complex64::new(0.7, 1.1),
            Complex64::new(-1.5, 0.2),
            PhaseTriple::new(0.3, 4.0, 1.0).unwrap(),
        )
        .unwrap();
        let plus = displacement_overlap(&g, d(0.3, -0.2));
        let minus = displacement_overlap(&g, d(-0.3, 0.2));
        assert!((plus.conj() - minus).norm() < 1e-12);
    }

    #[test]
    fn dominant_term_captures_large_amplitude_overlap() {
        let p = psi(4.0, 0);
        let q = psi(4.0, 2);
        let delta = d(0.05, 0.03);
        let full = displacement_overlap(&p, delta);
        let dom = dominant_term(&p, delta) * p.norm_sqr();
        assert!((full - dom).norm() < 1e-5 * full.norm());
        assert_eq!(dominant_term(&p, delta), dominant_term(&q, delta));
        assert_eq!(
            dominant_term(&p, Displacement::zero()),
            Complex64::new(4.0, 0.0)
        );
    }

    #[test]
    fn first_null_is_sub_planck() {
        let n = first_null(&psi(4.0, 0), 0.0, 1.5).unwrap();
        assert!((n.distance - PI / 8.0).abs() < 1e-3, "{n:?}");
        assert!(n.value < 1e-6);
    }

    #[test]
    fn anisotropy_for_unequal_cats() {
        let a = Complex64::new(4.0, 0.0);
        let p = GcsParams::from_complex(
            a,
            Complex64::new(0.0, 2.0) * a,
            PhaseTriple::new(0.0, 0.0, 0.0).unwrap(),
        )
        .unwrap();
        let prof = angular_profile(&p, 0.3, 360);
        let max = prof.iter().copied().fold(f64::MIN, f64::max);
        let min = prof.iter().copied().fold(f64::MAX, f64::min);
        assert!(max / min > 1.1);
    }
}
