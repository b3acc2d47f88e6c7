//! Photon statistics: normally ordered moments, Mandel Q, g²(0), the
//! Agarwal–Tara A₃ determinant criterion and the photon-number distribution.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_oracle::oracle_number_moment;
use crate::special::{ln_factorial, stirling2};
use crate::states::{
    apply_annihilation, fock_default, normalization, photon_amplitude, GcsParams, Route,
    CANCELLATION_GUARD, EPS_NULL,
};

/// Relative size below which the A₃ denominator counts as zero.
pub const DEGENERACY_TOLERANCE: f64 = 1e-14;

/// `m_i = ⟨â†ⁱâⁱ⟩` and `μ_j = ⟨(â†â)ʲ⟩` for `i, j = 1..4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub m: [f64; 4],
    pub mu: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatReport {
    pub q: f64,
    pub g2: f64,
    pub a3: f64,
    pub mean_n: f64,
}

impl MomentTable {
    /// Builds `μ` from `m` through Stirling numbers of the second kind.
    pub fn from_normal(m: [f64; 4]) -> Self {
        let mut mu = [0.0; 4];
        for (j, slot) in mu.iter_mut().enumerate() {
            *slot = (1..=j + 1)
                .map(|k| stirling2(j as u32 + 1, k as u32) * m[k - 1])
                .sum();
        }
        Self { m, mu }
    }

    pub fn of(p: &GcsParams) -> Self {
        Self::from_normal([1, 2, 3, 4].map(|m| normally_ordered_moment(p, m)))
    }

    pub fn mean_n(&self) -> f64 {
        self.m[0]
    }
}

fn eq9_terms(p: &GcsParams, m: u32) -> [f64; 8] {
    let ph = p.phases();
    let (theta, phi, chi) = (ph.theta(), ph.phi(), ph.chi());
    let xa = p.alpha().norm_sqr();
    let xb = p.beta().norm_sqr();
    let (xi, k) = p.xi_k();
    let mf = f64::from(m);
    let sgn = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    let (c, s) = (xi * k.cos(), xi * k.sin());
    let half = -0.5 * (xa + xb);
    let xim = xi.powi(m as i32);
    let km = k * mf;
    [
        2.0 * xa.powi(m as i32),
        2.0 * xa.powi(m as i32) * sgn * (-2.0 * xa).exp() * theta.cos(),
        2.0 * xb.powi(m as i32),
        2.0 * xb.powi(m as i32) * sgn * (-2.0 * xb).exp() * chi.cos(),
        2.0 * xim * (half + c).exp() * (phi + km + s).cos(),
        2.0 * xim * sgn * (half - c).exp() * (phi - theta + km - s).cos(),
        2.0 * xim * sgn * (half - c).exp() * (phi + chi + km - s).cos(),
        2.0 * xim * (half + c).exp() * (phi + chi - theta + km + s).cos(),
    ]
}

/// Normalized photon-number amplitudes long enough to exhaust the state.
pub(crate) fn series_coefficients(p: &GcsParams) -> Vec<Complex64> {
    let n = normalization(p);
    p.unnormalized_series(p.series_len())
        .into_iter()
        .map(|c| c * n)
        .collect()
}

/// `⟨â†ᵐâᵐ⟩` with the route that produced it.
pub fn normally_ordered_moment_routed(p: &GcsParams, m: u32) -> (f64, Route) {
    if m == 0 {
        return (1.0, Route::ClosedForm);
    }
    let terms = eq9_terms(p, m);
    let sum: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if sum.abs() >= CANCELLATION_GUARD * scale {
        return (p.norm_sqr() * sum, Route::ClosedForm);
    }
    let c = series_coefficients(p);
    let mu = m as usize;
    let value = c
        .iter()
        .enumerate()
        .skip(mu)
        .map(|(n, cn)| cn.norm_sqr() * (ln_factorial(n) - ln_factorial(n - mu)).exp())
        .sum();
    (value, Route::Series)
}

/// `⟨â†ᵐâᵐ⟩` in closed form, re-summed over photon numbers when the
/// closed form cancels.
pub fn normally_ordered_moment(p: &GcsParams, m: u32) -> f64 {
    normally_ordered_moment_routed(p, m).0
}

/// `⟨â†ʲâᵏ⟩` for arbitrary `j, k` by summing over pairs of coherent
/// components, with the same cancellation fallback.
pub fn general_moment_routed(p: &GcsParams, j: u32, k: u32) -> (Complex64, Route) {
    let kets = p.kets();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for bra in &kets {
        for ket in &kets {
            let ov = crate::states::coherent_overlap(bra.amplitude, ket.amplitude);
            let t = bra.weight.conj()
                * ket.weight
                * ov
                * bra.amplitude.conj().powu(j)
                * ket.amplitude.powu(k);
            sum += t;
            scale += t.norm();
        }
    }
    if sum.norm() >= CANCELLATION_GUARD * scale {
        return (sum * p.norm_sqr(), Route::CoherentPairs);
    }
    (series_general_moment(p, j, k), Route::Series)
}

/// `⟨â†ʲâᵏ⟩` summed over photon numbers.
pub(crate) fn series_general_moment(p: &GcsParams, j: u32, k: u32) -> Complex64 {
    let c = series_coefficients(p);
    let (ju, ku) = (j as usize, k as usize);
    (0..c.len().saturating_sub(ju.max(ku)))
        .map(|n| {
            let w = (0.5 * (ln_factorial(n + ju) + ln_factorial(n + ku)) - ln_factorial(n)).exp();
            c[n + ju].conj() * c[n + ku] * w
        })
        .sum()
}

pub fn general_moment(p: &GcsParams, j: u32, k: u32) -> Complex64 {
    general_moment_routed(p, j, k).0
}

fn require_photons(mean_n: f64) -> Result<()> {
    if mean_n > EPS_NULL {
        Ok(())
    } else {
        Err(Error::UndefinedForVacuum { mean_n })
    }
}

/// `Q = (⟨n̂²⟩ − ⟨n̂⟩²)/⟨n̂⟩ − 1 = m₂/m₁ − m₁`.
pub fn mandel_q(p: &GcsParams) -> Result<f64> {
    let m1 = normally_ordered_moment(p, 1);
    require_photons(m1)?;
    Ok(normally_ordered_moment(p, 2) / m1 - m1)
}

/// `g²(0) = m₂/m₁²`.
pub fn g2_zero(p: &GcsParams) -> Result<f64> {
    let m1 = normally_ordered_moment(p, 1);
    require_photons(m1)?;
    Ok(normally_ordered_moment(p, 2) / (m1 * m1))
}

/// `⟨(â†â)ʲ⟩ = Σₖ S(j,k) mₖ`.
pub fn mu_moment(p: &GcsParams, j: u32) -> f64 {
    (1..=j)
        .map(|k| stirling2(j, k) * normally_ordered_moment(p, k))
        .sum()
}

/// Determinant of the Hankel matrix `[[1,a,b],[a,b,c],[b,c,d]]` and the
/// summed magnitude of its products.
fn hankel3(v: [f64; 4]) -> (f64, f64) {
    let [a, b, c, d] = v;
    let products = [b * d, -c * c, -a * a * d, 2.0 * a * b * c, -b * b * b];
    (
        products.iter().sum(),
        products.iter().map(|t| t.abs()).sum(),
    )
}

/// `det μ⁽³⁾` as the nonnegative sum `Σ_{a<b<c} p_a p_b p_c Δ²` over the
/// photon-number distribution, free of the cancellation that cripples the
/// direct determinant for nearly two-level states.
fn hankel3_from_distribution(probs: &[f64]) -> f64 {
    let mut total = 0.0;
    for a in 0..probs.len() {
        if probs[a] == 0.0 {
            continue;
        }
        for b in a + 1..probs.len() {
            if probs[b] == 0.0 {
                continue;
            }
            let ab = (b - a) as f64;
            for c in b + 1..probs.len() {
                if probs[c] == 0.0 {
                    continue;
                }
                let (ac, bc) = ((c - a) as f64, (c - b) as f64);
                total += probs[a] * probs[b] * probs[c] * (ab * ac * bc).powi(2);
            }
        }
    }
    total
}

/// `A₃ = det m⁽³⁾ / (det μ⁽³⁾ − det m⁽³⁾)` from a moment table.
pub fn agarwal_tara_from_table(t: &MomentTable) -> Result<f64> {
    a3_ratio(hankel3(t.m).0, hankel3(t.mu).0)
}

fn a3_ratio(det_m: f64, det_mu: f64) -> Result<f64> {
    let denominator = det_mu - det_m;
    if denominator == 0.0
        || denominator.abs() <= DEGENERACY_TOLERANCE * (det_mu.abs() + det_m.abs())
    {
        return Err(Error::DegenerateDenominator { denominator });
    }
    Ok(det_m / denominator)
}

/// Agarwal–Tara `A₃`. When `det μ⁽³⁾` cancels below the guard it is
/// re-evaluated from the photon-number distribution.
pub fn agarwal_tara_a3(p: &GcsParams) -> Result<f64> {
    agarwal_tara_with(p, &MomentTable::of(p))
}

fn agarwal_tara_with(p: &GcsParams, t: &MomentTable) -> Result<f64> {
    let (det_m, _) = hankel3(t.m);
    let (mut det_mu, smu) = hankel3(t.mu);
    if det_mu.abs() < CANCELLATION_GUARD * smu {
        let probs: Vec<f64> = series_coefficients(p)
            .iter()
            .map(|c| c.norm_sqr())
            .collect();
        det_mu = hankel3_from_distribution(&probs);
    }
    a3_ratio(det_m, det_mu)
}

/// `P(n) = |⟨n|ψ⟩|²`.
pub fn pnd(p: &GcsParams, n: usize) -> f64 {
    photon_amplitude(p, n).norm_sqr()
}

/// `P(0..=n_max)`.
pub fn pnd_table(p: &GcsParams, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| pnd(p, n)).collect()
}

/// Change of the mean photon number under one photon subtraction, from the
/// truncated number-basis vector.
pub fn mean_photon_shift(p: &GcsParams) -> Result<f64> {
    let v = fock_default(p)?;
    let before = oracle_number_moment(&v, 1)?;
    require_photons(before)?;
    let (after, _) = apply_annihilation(&v, 1)?;
    Ok(oracle_number_moment(&after, 1)? - before)
}

/// `Q`, `g²(0)`, `A₃` and `⟨n̂⟩` from one shared moment table.
pub fn stat_report(p: &GcsParams) -> Result<StatReport> {
    let t = MomentTable::of(p);
    let m1 = t.m[0];
    require_photons(m1)?;
    Ok(StatReport {
        q: t.m[1] / m1 - m1,
        g2: t.m[1] / (m1 * m1),
        a3: agarwal_tara_with(p, &t)?,
        mean_n: m1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_oracle::{oracle_general_moment, oracle_pnd};
    use crate::states::{
        canonical_pscs, ComplexAmplitude, FockVector, PhaseTriple, SubtractionIndex,
    };

    fn psi(alpha: f64, l: u8) -> GcsParams {
        canonical_pscs(
            ComplexAmplitude::real(alpha).unwrap(),
            SubtractionIndex::new(l).unwrap(),
        )
        .unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn stirling_route_matches_identity() {
        let p = psi(1.3, 2);
        let t = MomentTable::of(&p);
        assert_eq!(t.mu[0], t.m[0]);
        assert!((t.mu[1] - (t.m[1] + t.m[0])).abs() < 1e-14);
    }

    #[test]
    fn moments_match_oracle() {
        let p = GcsParams::from_complex(
            Complex64::new(1.1, -0.6),
            Complex64::new(0.4, 1.9),
            PhaseTriple::new(1.0, 2.0, 3.0).unwrap(),
        )
        .unwrap();
        let v = fock_default(&p).unwrap();
        for m in 1..=4u32 {
            let a = normally_ordered_moment(&p, m);
            let b = oracle_general_moment(&v, m as usize, m as usize)
                .unwrap()
                .re;
            assert!(rel(a, b) < 1e-10, "m={m}: {a} vs {b}");
        }
        for (j, k) in [(0, 1), (1, 3), (2, 0)] {
            let a = general_moment(&p, j, k);
            let b = oracle_general_moment(&v, j as usize, k as usize).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "({j},{k})");
        }
    }

    #[test]
    fn small_amplitude_limits() {
        let p1 = psi(1e-3, 1);
        assert!((normally_ordered_moment(&p1, 1) - 3.0).abs() < 1e-5);
        assert!((mandel_q(&p1).unwrap() + 1.0).abs() < 1e-5);
        assert!((g2_zero(&p1).unwrap() - 2.0 / 3.0).abs() < 1e-5);
        assert!((agarwal_tara_a3(&p1).unwrap() + 1.0).abs() < 1e-5);
        let p0 = psi(1e-3, 0);
        assert!((mandel_q(&p0).unwrap() - 3.0).abs() < 1e-5);
        for l in 0..4 {
            let a3 = agarwal_tara_a3(&psi(1e-3, l)).unwrap();
            assert!((a3 + 1.0).abs() < 1e-3, "l={l}: {a3}");
        }
    }

    #[test]
    fn vacuum_statistics_are_undefined() {
        let p = psi(0.0, 0);
        assert_eq!(normally_ordered_moment(&p, 1), 0.0);
        assert!(matches!(
            mandel_q(&p),
            Err(Error::UndefinedForVacuum { .. })
        ));
        assert!(matches!(g2_zero(&p), Err(Error::UndefinedForVacuum { .. })));
    }

    #[test]
    fn g2_identity_and_shift() {
        for l in 0..4 {
            let p = psi(1.0, l);
            let q = mandel_q(&p).unwrap();
            let n = normally_ordered_moment(&p, 1);
            assert!((g2_zero(&p).unwrap() - 1.0 - q / n).abs() < 1e-12);
            assert!((mean_photon_shift(&p).unwrap() - q).abs() < 1e-10, "l={l}");
        }
        assert!(mean_photon_shift(&psi(1.0, 0)).unwrap() > 0.0);
        assert!(mean_photon_shift(&psi(1.0, 1)).unwrap() < 0.0);
    }

    #[test]
    fn pnd_support_and_oracle() {
        for l in 0..4u8 {
            let p = psi(5.0, l);
            let v = fock_default(&p).unwrap();
            let residue = (4 - l as usize) % 4;
            let mut total = 0.0;
            for n in 0..=v.cutoff() {
                let pn = pnd(&p, n);
                total += pn;
                assert!((pn - oracle_pnd(&v, n)).abs() < 1e-12);
                if n % 4 != residue {
                    assert!(pn < 1e-14, "l={l} n={n}: {pn}");
                }
            }
            assert!((total - 1.0).abs() < 1e-10);
        }
        let p1 = psi(5.0, 1);
        for n in [15, 19, 23, 27] {
            assert!(pnd(&p1, n) > 1e-3);
        }
        assert_eq!(oracle_pnd(&FockVector::vacuum(3), 0), 1.0);
    }

    #[test]
    fn a3_is_negative_for_canonical_states() {
        for l in 0..4 {
            for a in [0.1, 0.5, 1.0, 2.0, 3.0, 4.0] {
                let v = agarwal_tara_a3(&psi(a, l)).unwrap();
                assert!(v < 0.0, "l={l} |α|={a}: {v}");
            }
        }
    }
}
