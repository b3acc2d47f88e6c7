//! Quadrature variances, Hong–Mandel higher-order moments and the
//! quadrature distribution.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock_oracle::{oracle_quadrature_density, MAX_X_MOMENT};
use crate::special::{binomial, odd_double_factorial, pochhammer, unit_phase};
use crate::states::{FockVector, GcsParams, Route, CANCELLATION_GUARD};
use crate::statistics::{
    general_moment_routed, normally_ordered_moment, series_coefficients, series_general_moment,
};

/// Quadrature angle `θ′`, reduced to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QuadratureAngle(f64);

impl QuadratureAngle {
    pub fn new(theta_prime: f64) -> Result<Self> {
        if !theta_prime.is_finite() {
            return Err(Error::NonFinite("quadrature angle"));
        }
        let r = theta_prime.rem_euclid(PI);
        Ok(Self(if r >= PI { 0.0 } else { r }))
    }

    pub fn zero() -> Self {
        Self(0.0)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for QuadratureAngle {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<QuadratureAngle> for f64 {
    fn from(a: QuadratureAngle) -> Self {
        a.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeReport {
    pub var_x: f64,
    pub var_y: f64,
    pub s_x: f64,
    pub s_y: f64,
    /// Route behind `⟨â⟩`.
    pub route_a: Route,
    /// Route behind `⟨â²⟩`.
    pub route_a2: Route,
}

fn guarded(terms: &[Complex64], p: &GcsParams, j: u32, k: u32) -> (Complex64, Route) {
    let sum: Complex64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    if sum.norm() >= CANCELLATION_GUARD * scale {
        (sum * p.norm_sqr(), Route::ClosedForm)
    } else {
        (series_general_moment(p, j, k), Route::Series)
    }
}

/// `⟨â⟩`: zero by the mod-4 selection rule for the canonical states,
/// the β = iα closed form otherwise when it applies, and the coherent-pair
/// sum for general β.
pub fn expectation_a_routed(p: &GcsParams) -> (Complex64, Route) {
    if p.canonical_index().is_some() {
        return (Complex64::new(0.0, 0.0), Route::SelectionRule);
    }
    if !p.is_beta_i_alpha() {
        return general_moment_routed(p, 0, 1);
    }
    let ph = p.phases();
    let (theta, phi, chi) = (ph.theta(), ph.phi(), ph.chi());
    let a = p.alpha();
    let x = a.norm_sqr();
    let i = Complex64::new(0.0, 1.0);
    let e = unit_phase;
    let up = Complex64::new(-x, x).exp();
    let down = Complex64::new(-x, -x).exp();
    let terms = [
        2.0 * a * (-2.0 * x).exp() * (-i * theta.sin()),
        2.0 * a * (-2.0 * x).exp() * chi.sin(),
        a * up * i * e(phi),
        -a * up * i * e(phi + chi - theta),
        -a * up * e(theta - phi),
        a * up * e(-(phi + chi)),
        a * down * e(-phi),
        -a * down * e(-(phi + chi - theta)),
        a * down * i * e(-(theta - phi)),
        -a * down * i * e(phi + chi),
    ];
    guarded(&terms, p, 0, 1)
}

pub fn expectation_a(p: &GcsParams) -> Complex64 {
    expectation_a_routed(p).0
}

/// `⟨â²⟩` with the same routing as [`expectation_a_routed`].
pub fn expectation_a2_routed(p: &GcsParams) -> (Complex64, Route) {
    if p.canonical_index().is_some() {
        return (Complex64::new(0.0, 0.0), Route::SelectionRule);
    }
    if !p.is_beta_i_alpha() {
        return general_moment_routed(p, 0, 2);
    }
    let ph = p.phases();
    let (theta, phi, chi) = (ph.theta(), ph.phi(), ph.chi());
    let a2 = p.alpha() * p.alpha();
    let x = p.alpha().norm_sqr();
    let mi = Complex64::new(0.0, -2.0) * a2 * (-x).exp();
    let terms = [
        2.0 * a2 * (-2.0 * x).exp() * theta.cos(),
        -2.0 * a2 * (-2.0 * x).exp() * chi.cos(),
        mi * (phi + x).sin(),
        mi * (phi + chi - theta + x).sin(),
        mi * (phi - theta - x).sin(),
        mi * (phi + chi - x).sin(),
    ];
    guarded(&terms, p, 0, 2)
}

pub fn expectation_a2(p: &GcsParams) -> Complex64 {
    expectation_a2_routed(p).0
}

/// `(ΔX̂)²` and `(ΔŶ)²` at angle `θ′`, with `S = 4·var − 1`.
pub fn quadrature_variances(p: &GcsParams, angle: QuadratureAngle) -> SqueezeReport {
    let (a1, route_a) = expectation_a_routed(p);
    let (a2, route_a2) = expectation_a2_routed(p);
    let n = normally_ordered_moment(p, 1);
    let rot = unit_phase(-2.0 * angle.get());
    let s2 = 2.0 * (rot * a2).re;
    let s1 = 2.0 * (rot * a1 * a1).re;
    let mean_sq = 2.0 * a1.norm_sqr();
    let var_x = 0.25 * (s2 + 2.0 * n - s1 - mean_sq + 1.0);
    let var_y = 0.25 * (-s2 + 2.0 * n + s1 - mean_sq + 1.0);
    SqueezeReport {
        var_x,
        var_y,
        s_x: 4.0 * var_x - 1.0,
        s_y: 4.0 * var_y - 1.0,
        route_a,
        route_a2,
    }
}

fn check_order(l: u32) -> Result<()> {
    if l > MAX_X_MOMENT {
        Err(Error::UnsupportedOrder(l))
    } else {
        Ok(())
    }
}

/// `⟨(ΔX̂)^l⟩` from normally ordered moments:
/// `2^{−l} Σ_r C(l,r)(−⟨Ŷ⟩)^{l−r}⟨Ŷ^r⟩`, `Ŷ = 2X̂ = âe^{−iθ′} + â†e^{iθ′}`, with
/// `⟨Ŷ^r⟩ = Σ_i C(r,2i)(2i−1)!! Σ_k C(r−2i,k) e^{i(2k−r+2i)θ′}⟨â†ᵏâ^{r−2i−k}⟩`.
pub fn x_central_moment_closed(p: &GcsParams, l: u32, angle: QuadratureAngle) -> Result<f64> {
    check_order(l)?;
    let t = angle.get();
    let mut y_pow = vec![0.0f64; (l + 1) as usize];
    for r in 0..=l {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..=r / 2 {
            let s = r - 2 * i;
            let outer = binomial(r, 2 * i) * odd_double_factorial(i);
            for k in 0..=s {
                let phase = unit_phase((2.0 * f64::from(k) - f64::from(s)) * t);
                let (m, _) = general_moment_routed(p, k, s - k);
                acc += outer * binomial(s, k) * phase * m;
            }
        }
        y_pow[r as usize] = acc.re;
    }
    let mean_y = y_pow[1];
    let mut total = 0.0;
    for r in 0..=l {
        total += binomial(l, r) * (-mean_y).powi((l - r) as i32) * y_pow[r as usize];
    }
    Ok(total / 2f64.powi(l as i32))
}

/// Gaussian central moment `(1/2)_{l/2}·2^{−l/2}` of the vacuum quadrature.
pub fn vacuum_reference(l: u32) -> f64 {
    pochhammer(0.5, l / 2) / 2f64.powi((l / 2) as i32)
}

/// Hong–Mandel `S(l) = (⟨(ΔX̂)^l⟩ − r_l)/r_l` with `r_l` the vacuum moment.
pub fn hong_mandel_s(p: &GcsParams, l: u32, angle: QuadratureAngle) -> Result<f64> {
    if l % 2 == 1 || l == 0 || l > MAX_X_MOMENT {
        return Err(Error::UnsupportedOrder(l));
    }
    let m = x_central_moment_closed(p, l, angle)?;
    let r = vacuum_reference(l);
    Ok((m - r) / r)
}

/// `P(x) = |⟨x|ψ⟩|²` with `⟨x|0⟩ = π^{−1/4} e^{−x²/2}`.
pub fn quadrature_density(p: &GcsParams, x: f64) -> f64 {
    let ph = p.phases();
    let lead = -0.5 * x * x;
    let comp = |g: Complex64, sign: f64| -> Complex64 {
        (lead - 0.5 * g * g - 0.5 * g.norm_sqr() + sign * SQRT_2 * x * g).exp()
    };
    let (a, b) = (p.alpha(), p.beta());
    let terms = [
        comp(a, 1.0),
        unit_phase(ph.theta()) * comp(a, -1.0),
        unit_phase(ph.phi()) * comp(b, 1.0),
        unit_phase(ph.phi() + ph.chi()) * comp(b, -1.0),
    ];
    let sum: Complex64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.norm()).sum();
    if sum.norm() < CANCELLATION_GUARD * scale {
        let v = FockVector::from_coeffs(series_coefficients(p)).expect("finite series");
        return oracle_quadrature_density(&v, x);
    }
    p.norm_sqr() * PI.powf(-0.5) * sum.norm_sqr()
}
