//! Closed-form Wigner function of the generalized compass state, negative
//! volume, and the central chessboard tiles.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_oracle::oracle_wigner;
use crate::grid::{PhaseSpaceGrid, ScalarField};
use crate::special::bisect;
use crate::states::{fock_coefficients_with, GcsParams, Route};
use crate::WIGNER_PREFACTOR;

/// Boundary level below which a field is taken to cover the state.
pub const BOUNDARY_THRESHOLD: f64 = 1e-8;

/// Points per axis of the default negativity grid.
pub const DEFAULT_NEGATIVITY_POINTS: usize = 401;

/// `(i, j)` pairing of the shifted amplitudes `a₁..a₄` behind `m₁..m₆`.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// The six interference terms at one phase-space point:
/// `ξ_l + i k_l = a_i a_j*` and `m_l = 2 e^{…} e^{−ξ_l} cos(φ_l − k_l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceTerms {
    pub xi: [f64; 6],
    pub k: [f64; 6],
    pub m: [f64; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TileReport {
    pub center_value: f64,
    pub center_sign: i8,
    pub first_zero_x: f64,
    pub first_zero_y: f64,
    pub tile_area: f64,
    /// `π²/(8|α|²)`, the central tile area of `cos(4x₀x) + cos(4x₀y)`.
    pub predicted_area_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativeVolume {
    pub value: f64,
    /// Richardson `h` vs `2h` estimate; `None` if the grid cannot be halved.
    pub error: Option<f64>,
}

/// Coherent component `c |γ⟩` listed in the order of `a₁..a₄`, so that
/// `a = 2z − γ`.
struct Lobe {
    gamma: Complex64,
    phase: f64,
}

fn lobes(p: &GcsParams) -> [Lobe; 4] {
    let ph = p.phases();
    let (a, b) = (p.alpha(), p.beta());
    [
        Lobe {
            gamma: -a,
            phase: ph.theta(),
        },
        Lobe {
            gamma: a,
            phase: 0.0,
        },
        Lobe {
            gamma: -b,
            phase: ph.phi() + ph.chi(),
        },
        Lobe {
            gamma: b,
            phase: ph.phi(),
        },
    ]
}

/// Relative phase entering `m_l`.
fn pair_phase(l: &[Lobe; 4], i: usize, j: usize) -> f64 {
    l[i].phase - l[j].phase
}

/// `ln` of `e^{2|z|²} e^{−(|γᵢ|²+|γⱼ|²)/2} e^{−Re(aᵢaⱼ*)}` and `Im(aᵢaⱼ*)`.
fn pair_exponent(z: Complex64, gi: Complex64, gj: Complex64) -> (f64, f64) {
    let ai = 2.0 * z - gi;
    let aj = 2.0 * z - gj;
    let w = ai * aj.conj();
    let e = 2.0 * z.norm_sqr() - 0.5 * (gi.norm_sqr() + gj.norm_sqr()) - w.re;
    (e, w.im)
}

/// `ξ_l`, `k_l` and the unscaled `m_l` (which carries no `e^{2|z|²}`).
pub fn interference_terms(p: &GcsParams, z: Complex64) -> InterferenceTerms {
    let l = lobes(p);
    let mut out = InterferenceTerms {
        xi: [0.0; 6],
        k: [0.0; 6],
        m: [0.0; 6],
    };
    for (n, &(i, j)) in PAIRS.iter().enumerate() {
        let ai = 2.0 * z - l[i].gamma;
        let aj = 2.0 * z - l[j].gamma;
        let w = ai * aj.conj();
        let log_pref = -0.5 * (l[i].gamma.norm_sqr() + l[j].gamma.norm_sqr());
        out.xi[n] = w.re;
        out.k[n] = w.im;
        out.m[n] = 2.0 * (log_pref - w.re).exp() * (pair_phase(&l, i, j) - w.im).cos();
    }
    out
}

/// Unnormalized bracket of the closed form and the magnitude scale of its
/// terms, all exponents combined with `e^{2|z|²}`.
fn bracket_terms(p: &GcsParams, z: Complex64, which: impl Fn(usize) -> bool) -> f64 {
    let l = lobes(p);
    let mut sum = 0.0;
    if which(usize::MAX) {
        for lobe in &l {
            let (e, _) = pair_exponent(z, lobe.gamma, lobe.gamma);
            sum += e.exp();
        }
    }
    for (n, &(i, j)) in PAIRS.iter().enumerate() {
        if which(n) {
            let (e, k) = pair_exponent(z, l[i].gamma, l[j].gamma);
            sum += 2.0 * e.exp() * (pair_phase(&l, i, j) - k).cos();
        }
    }
    sum
}

/// Closed-form `W(z)` with `∫W d²z = 1`, `z = x + iy`.
///
/// Near-null states (bracket evaluated from its series) are summed in the
/// number basis instead, where the closed form loses all precision.
pub fn wigner_closed_form(p: &GcsParams, z: Complex64) -> f64 {
    if p.bracket_route() == Route::Series {
        return wigner_series(p, z);
    }
    WIGNER_PREFACTOR * p.norm_sqr() * bracket_terms(p, z, |_| true)
}

fn wigner_series(p: &GcsParams, z: Complex64) -> f64 {
    let v = fock_coefficients_with(p, p.series_len(), 1e-6)
        .expect("series length always exhausts the state");
    oracle_wigner(&v, z).expect("series vector is faithful")
}

/// `W` sampled on a grid.
pub fn wigner_grid(p: &GcsParams, grid: &PhaseSpaceGrid) -> ScalarField {
    if p.bracket_route() == Route::Series {
        let v = fock_coefficients_with(p, p.series_len(), 1e-6)
            .expect("series length always exhausts the state");
        return ScalarField::from_fn(grid, |x, y| {
            oracle_wigner(&v, Complex64::new(x, y)).expect("series vector is faithful")
        });
    }
    let n2 = p.norm_sqr();
    ScalarField::from_fn(grid, |x, y| {
        WIGNER_PREFACTOR * n2 * bracket_terms(p, Complex64::new(x, y), |_| true)
    })
}

/// `[−(r+4), r+4]²` with 401 points per axis, `r = max(|α|, |β|)`.
pub fn default_negativity_grid(p: &GcsParams) -> PhaseSpaceGrid {
    let half = p.alpha().norm().max(p.beta().norm()) + 4.0;
    PhaseSpaceGrid::square(half, DEFAULT_NEGATIVITY_POINTS).expect("positive half width")
}

/// `∫∫|W| dx dy − 1` by composite Simpson.
pub fn negative_volume(field: &ScalarField) -> Result<NegativeVolume> {
    let boundary_max = field.boundary_max();
    if boundary_max >= BOUNDARY_THRESHOLD {
        return Err(Error::DomainTooSmall { boundary_max });
    }
    let q = field.map(f64::abs).integrate();
    Ok(NegativeVolume {
        value: q.value - 1.0,
        error: q.error,
    })
}

/// Negative volume on the default grid.
pub fn negativity(p: &GcsParams) -> Result<NegativeVolume> {
    negative_volume(&wigner_grid(p, &default_negativity_grid(p)))
}

/// The `m₁ + m₆` chessboard contribution `(2N²/π) e^{2|z|²}(m₁ + m₆)`.
pub fn interference_pattern(p: &GcsParams, z: Complex64) -> f64 {
    p.norm_sqr() * interference_bracket(p, z)
}

/// [`interference_pattern`] without the `N²` factor. The four canonical
/// states share this up to an exact sign.
pub fn interference_bracket(p: &GcsParams, z: Complex64) -> f64 {
    WIGNER_PREFACTOR * bracket_terms(p, z, |n| n == 0 || n == 5)
}

/// First sign change of `W` from the origin along `dir`, or `None`.
fn first_zero_along(p: &GcsParams, dir: Complex64, step: f64, radius: f64) -> Option<f64> {
    let w = |t: f64| wigner_closed_form(p, dir * t);
    let w0 = w(0.0);
    let mut lo = 0.0;
    while lo < radius {
        let hi = lo + step;
        if (w(hi) > 0.0) != (w0 > 0.0) {
            return Some(bisect(w, lo, hi, 1e-14 * hi.max(1.0)));
        }
        lo = hi;
    }
    None
}

/// Central tile of the chessboard.
///
/// Along the axes of `α` the pattern `cos(4x₀x) + cos(4x₀y)` only touches
/// zero, so the tile is measured along the two diagonals `arg α ∓ π/4`,
/// where the zeros are simple. `first_zero_x/y` are the half-diagonals of
/// the central diamond and `tile_area = 4·first_zero_x·first_zero_y`.
pub fn tile_metrics(p: &GcsParams) -> Result<TileReport> {
    let r = p.alpha().norm();
    if r == 0.0 {
        return Err(Error::RootNotFound { radius: 0.0 });
    }
    let expected = PI / (4.0 * std::f64::consts::SQRT_2 * r);
    let radius = 4.0 * expected;
    let step = expected / 32.0;
    let base = p.alpha().arg();
    let dir_x = Complex64::from_polar(1.0, base - FRAC_PI_4);
    let dir_y = Complex64::from_polar(1.0, base + FRAC_PI_4);
    let fx = first_zero_along(p, dir_x, step, radius).ok_or(Error::RootNotFound { radius })?;
    let fy = first_zero_along(p, dir_y, step, radius).ok_or(Error::RootNotFound { radius })?;
    let center_value = wigner_closed_form(p, Complex64::new(0.0, 0.0));
    Ok(TileReport {
        center_value,
        center_sign: if center_value >= 0.0 { 1 } else { -1 },
        first_zero_x: fx,
        first_zero_y: fy,
        tile_area: 4.0 * fx * fy,
        predicted_area_scale: PI * PI / (8.0 * r * r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_oracle::oracle_wigner;
    use crate::states::{
        canonical_pscs, fock_default, ComplexAmplitude, PhaseTriple, SubtractionIndex,
    };

    fn psi(alpha: f64, l: u8) -> GcsParams {
        canonical_pscs(
            ComplexAmplitude::real(alpha).unwrap(),
            SubtractionIndex::new(l).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn vacuum_convention() {
        let p = psi(0.0, 0);
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.7, -1.1)] {
            let w = wigner_closed_form(&p, z);
            let expect = WIGNER_PREFACTOR * (-2.0 * z.norm_sqr()).exp();
            assert!((w - expect).abs() < 1e-15, "{w} vs {expect}");
        }
    }

    #[test]
    fn parity_at_origin() {
        for (l, sign) in [(0, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)] {
            let w = wigner_closed_form(&psi(2.0, l), Complex64::new(0.0, 0.0));
            assert!((w - sign * WIGNER_PREFACTOR).abs() < 1e-10, "l={l}: {w}");
        }
    }

    #[test]
    fn matches_oracle_for_general_state() {
        let p = GcsParams::from_complex(
            Complex64::new(1.2, 0.5),
            Complex64::new(-0.3, 1.7),
            PhaseTriple::new(0.4, 2.2, 5.0).unwrap(),
        )
        .unwrap();
        let v = fock_default(&p).unwrap();
        for z in [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, -0.8),
            Complex64::new(-2.0, 1.4),
        ] {
            let a = wigner_closed_form(&p, z);
            let b = oracle_wigner(&v, z).unwrap();
            assert!((a - b).abs() < 1e-10, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn terms_reassemble_the_closed_form() {
        let p = psi(1.5, 1);
        let z = Complex64::new(0.2, 0.1);
        let t = interference_terms(&p, z);
        let grow = (2.0 * z.norm_sqr()).exp();
        let m16 = WIGNER_PREFACTOR * p.norm_sqr() * grow * (t.m[0] + t.m[5]);
        assert!((m16 - interference_pattern(&p, z)).abs() < 1e-12);
    }

    #[test]
    fn near_null_state_is_summed_in_number_basis() {
        let p = psi(1e-3, 1);
        let w = wigner_closed_form(&p, Complex64::new(0.0, 0.0));
        assert!((w + WIGNER_PREFACTOR).abs() < 1e-6, "{w}");
    }

    #[test]
    fn bracket_antisymmetry() {
        for l in 0..3u8 {
            let (a, b) = (psi(3.0, l), psi(3.0, l + 1));
            for z in [Complex64::new(0.05, 0.1), Complex64::new(-0.3, 0.2)] {
                let s = interference_bracket(&a, z) + interference_bracket(&b, z);
                assert!(s.abs() < 1e-12, "l={l}: {s}");
            }
        }
    }

    #[test]
    fn vacuum_has_no_negativity() {
        let p = psi(0.0, 0);
        let g = PhaseSpaceGrid::square(5.0, 101).unwrap();
        let nv = negative_volume(&wigner_grid(&p, &g)).unwrap();
        assert!(nv.value.abs() < 1e-6, "{nv:?}");
    }

    #[test]
    fn small_domain_is_rejected() {
        let g = PhaseSpaceGrid::square(1.0, 21).unwrap();
        let r = negative_volume(&wigner_grid(&psi(2.0, 0), &g));
        assert!(matches!(r, Err(Error::DomainTooSmall { .. })));
    }

    #[test]
    fn tile_sign_flips_and_area_tracks_prediction() {
        let t0 = tile_metrics(&psi(4.0, 0)).unwrap();
        let t1 = tile_metrics(&psi(4.0, 1)).unwrap();
        assert_eq!(t0.center_sign, 1);
        assert_eq!(t1.center_sign, -1);
        assert!((t0.tile_area / t0.predicted_area_scale - 1.0).abs() < 1e-3);
        assert!((t0.tile_area / t1.tile_area - 1.0).abs() < 1e-2);
    }
}
