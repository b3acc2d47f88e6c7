//! Generalized compass states
//! `N{(|α⟩ + e^{iθ}|−α⟩) + e^{iφ}(|β⟩ + e^{iχ}|−β⟩)}`, their normalization,
//! the four photon-subtracted specializations, number-basis expansions and
//! overlaps.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_factorial, unit_phase};

/// Brackets (squared norms of the unnormalized superposition) at or below
/// this value are null states. It sits at the squared rounding level of the
/// unit-modulus ket weights.
pub const EPS_NULL: f64 = 1e-30;

/// A closed-form sum whose magnitude falls below this fraction of the sum of
/// its term magnitudes is re-evaluated from its photon-number series.
pub const CANCELLATION_GUARD: f64 = 1e-6;

/// Tail-mass tolerance a [`FockVector`] must meet to count as faithful.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Number of top coefficients inspected by the truncation-adequacy check.
pub const TAIL_WINDOW: usize = 5;

const PHASE_EQ_TOL: f64 = 1e-12;

/// A finite complex scalar (α, β, z or δ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct ComplexAmplitude(Complex64);

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        Self::try_from(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Result<Self> {
        Self::new(re, 0.0)
    }

    pub fn zero() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn re(self) -> f64 {
        self.0.re
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn norm(self) -> f64 {
        self.0.norm()
    }
}

impl TryFrom<Complex64> for ComplexAmplitude {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(Self(z))
        } else {
            Err(Error::NonFinite("complex amplitude"))
        }
    }
}

impl TryFrom<[f64; 2]> for ComplexAmplitude {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::new(v[0], v[1])
    }
}

impl From<ComplexAmplitude> for [f64; 2] {
    fn from(a: ComplexAmplitude) -> Self {
        [a.0.re, a.0.im]
    }
}

impl From<ComplexAmplitude> for Complex64 {
    fn from(a: ComplexAmplitude) -> Self {
        a.0
    }
}

impl fmt::Display for ComplexAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i", self.0.re, self.0.im)
    }
}

fn canonical_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Relative phases (θ, φ, χ), stored reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct PhaseTriple {
    theta: f64,
    phi: f64,
    chi: f64,
}

impl PhaseTriple {
    pub fn new(theta: f64, phi: f64, chi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite() && chi.is_finite()) {
            return Err(Error::NonFinite("phase triple"));
        }
        Ok(Self {
            theta: canonical_angle(theta),
            phi: canonical_angle(phi),
            chi: canonical_angle(chi),
        })
    }

    /// Phase triple of the compass state with `l` photons subtracted.
    pub fn canonical(l: SubtractionIndex) -> Self {
        let (theta, phi, chi) = match l.get() {
            0 => (0.0, 0.0, 0.0),
            1 => (PI, FRAC_PI_2, PI),
            2 => (0.0, PI, 0.0),
            _ => (PI, 3.0 * FRAC_PI_2, PI),
        };
        Self { theta, phi, chi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    fn angle_eq(a: f64, b: f64) -> bool {
        let d = (a - b).abs();
        d.min(TAU - d) <= PHASE_EQ_TOL
    }
}

impl PartialEq for PhaseTriple {
    fn eq(&self, other: &Self) -> bool {
        Self::angle_eq(self.theta, other.theta)
            && Self::angle_eq(self.phi, other.phi)
            && Self::angle_eq(self.chi, other.chi)
    }
}

impl TryFrom<[f64; 3]> for PhaseTriple {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<PhaseTriple> for [f64; 3] {
    fn from(p: PhaseTriple) -> Self {
        [p.theta, p.phi, p.chi]
    }
}

/// Number of photons subtracted from the compass state, modulo 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct SubtractionIndex(u8);

impl SubtractionIndex {
    pub const ALL: [SubtractionIndex; 4] = [Self(0), Self(1), Self(2), Self(3)];

    pub fn new(l: u8) -> Result<Self> {
        if l < 4 {
            Ok(Self(l))
        } else {
            Err(Error::InvalidSubtraction(l))
        }
    }

    /// Reduce an arbitrary subtraction count modulo 4.
    pub fn wrapping(l: u32) -> Self {
        Self((l % 4) as u8)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn next(self) -> Self {
        Self((self.0 + 1) % 4)
    }

    /// Residue class `n mod 4` carrying the photon-number support.
    pub fn support_residue(self) -> usize {
        (4 - self.0 as usize) % 4
    }
}

impl TryFrom<u8> for SubtractionIndex {
    type Error = Error;

    fn try_from(l: u8) -> Result<Self> {
        Self::new(l)
    }
}

impl From<SubtractionIndex> for u8 {
    fn from(l: SubtractionIndex) -> Self {
        l.0
    }
}

/// Full specification of a generalized compass state.
///
/// The normalization bracket is evaluated once at construction and
/// construction fails for null states. Equality compares components with a
/// tolerance of `1e-12`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(try_from = "GcsRepr", into = "GcsRepr")]
pub struct GcsParams {
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    phases: PhaseTriple,
    bracket: f64,
}

#[derive(Serialize, Deserialize)]
struct GcsRepr {
    alpha: ComplexAmplitude,
    beta: ComplexAmplitude,
    phases: PhaseTriple,
}

impl TryFrom<GcsRepr> for GcsParams {
    type Error = Error;

    fn try_from(r: GcsRepr) -> Result<Self> {
        Self::new(r.alpha, r.beta, r.phases)
    }
}

impl From<GcsParams> for GcsRepr {
    fn from(p: GcsParams) -> Self {
        Self {
            alpha: p.alpha,
            beta: p.beta,
            phases: p.phases,
        }
    }
}

impl PartialEq for GcsParams {
    fn eq(&self, other: &Self) -> bool {
        (self.alpha.value() - other.alpha.value()).norm() <= PHASE_EQ_TOL
            && (self.beta.value() - other.beta.value()).norm() <= PHASE_EQ_TOL
            && self.phases == other.phases
    }
}

/// One coherent component `weight · |amplitude⟩` of the superposition.
#[derive(Debug, Clone, Copy)]
pub struct Ket {
    pub amplitude: Complex64,
    pub weight: Complex64,
}

/// Outcome of a guarded closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// The printed closed-form expression.
    ClosedForm,
    /// The closed form cancelled below [`CANCELLATION_GUARD`]; the same
    /// quantity was summed from its photon-number series instead.
    Series,
    /// Generic sum over pairs of coherent components.
    CoherentPairs,
    /// Value fixed by the mod-4 photon-number selection rule.
    SelectionRule,
}

impl GcsParams {
    pub fn new(
        alpha: ComplexAmplitude,
        beta: ComplexAmplitude,
        phases: PhaseTriple,
    ) -> Result<Self> {
        let mut p = Self {
            alpha,
            beta,
            phases,
            bracket: 0.0,
        };
        let (bracket, _) = p.bracket_guarded();
        if !bracket.is_finite() {
            return Err(Error::NonFinite("normalization bracket"));
        }
        if bracket <= EPS_NULL {
            return Err(Error::NullState { bracket });
        }
        p.bracket = bracket;
        Ok(p)
    }

    pub fn from_complex(alpha: Complex64, beta: Complex64, phases: PhaseTriple) -> Result<Self> {
        Self::new(alpha.try_into()?, beta.try_into()?, phases)
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha.value()
    }

    pub fn beta(&self) -> Complex64 {
        self.beta.value()
    }

    pub fn phases(&self) -> PhaseTriple {
        self.phases
    }

    /// `‖unnormalized superposition‖²`, i.e. `N⁻²`.
    pub fn bracket(&self) -> f64 {
        self.bracket
    }

    /// `N²`.
    pub fn norm_sqr(&self) -> f64 {
        1.0 / self.bracket
    }

    /// `(ξ, k)` with `α*β = ξ e^{ik}`, `k` the principal value in `(−π, π]`.
    pub fn xi_k(&self) -> (f64, f64) {
        let w = self.alpha().conj() * self.beta();
        (w.norm(), w.arg())
    }

    pub fn kets(&self) -> [Ket; 4] {
        let ph = &self.phases;
        let a = self.alpha();
        let b = self.beta();
        [
            Ket {
                amplitude: a,
                weight: Complex64::new(1.0, 0.0),
            },
            Ket {
                amplitude: -a,
                weight: unit_phase(ph.theta),
            },
            Ket {
                amplitude: b,
                weight: unit_phase(ph.phi),
            },
            Ket {
                amplitude: -b,
                weight: unit_phase(ph.phi) * unit_phase(ph.chi),
            },
        ]
    }

    /// Is this one of the four canonical photon-subtracted compass states
    /// (β = iα and a canonical phase triple)? Returns its index if so.
    pub fn canonical_index(&self) -> Option<SubtractionIndex> {
        let i_alpha = Complex64::new(0.0, 1.0) * self.alpha();
        if (self.beta() - i_alpha).norm() > PHASE_EQ_TOL {
            return None;
        }
        SubtractionIndex::ALL
            .into_iter()
            .find(|&l| PhaseTriple::canonical(l) == self.phases)
    }

    pub fn is_beta_i_alpha(&self) -> bool {
        (self.beta() - Complex64::new(0.0, 1.0) * self.alpha()).norm() <= PHASE_EQ_TOL
    }

    /// Largest of `|α|²`, `|β|²`.
    pub fn max_intensity(&self) -> f64 {
        self.alpha().norm_sqr().max(self.beta().norm_sqr())
    }

    /// Number of photon-number terms after which every series over this
    /// state is exhausted to double precision.
    pub fn series_len(&self) -> usize {
        default_cutoff(self.max_intensity()) + 24
    }

    fn bracket_guarded(&self) -> (f64, Route) {
        let terms = self.bracket_terms();
        let value: f64 = terms.iter().sum();
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        if value.abs() >= CANCELLATION_GUARD * scale {
            (value, Route::ClosedForm)
        } else {
            let series: f64 = self
                .unnormalized_series(self.series_len())
                .iter()
                .map(|c| c.norm_sqr())
                .sum();
            (series, Route::Series)
        }
    }

    /// Terms of the closed-form bracket `N⁻²`.
    fn bracket_terms(&self) -> [f64; 7] {
        let ph = &self.phases;
        let (theta, phi, chi) = (ph.theta, ph.phi, ph.chi);
        let xa = self.alpha().norm_sqr();
        let xb = self.beta().norm_sqr();
        let (xi, k) = self.xi_k();
        let (c, s) = (xi * k.cos(), xi * k.sin());
        let half = -0.5 * (xa + xb);
        [
            4.0,
            2.0 * (-2.0 * xa).exp() * theta.cos(),
            2.0 * (-2.0 * xb).exp() * chi.cos(),
            2.0 * (half + c).exp() * (phi + s).cos(),
            2.0 * (half - c).exp() * (phi - theta - s).cos(),
            2.0 * (half - c).exp() * (phi + chi - s).cos(),
            2.0 * (half + c).exp() * (phi + chi - theta + s).cos(),
        ]
    }

    /// Route used for the bracket (closed form unless it cancelled).
    pub fn bracket_route(&self) -> Route {
        self.bracket_guarded().1
    }

    /// Unnormalized photon-number amplitudes `⟨n|ψ⟩/N` for `n < len`, by
    /// the ratio recurrence of each coherent component.
    pub fn unnormalized_series(&self, len: usize) -> Vec<Complex64> {
        let ph = &self.phases;
        let a = self.alpha();
        let b = self.beta();
        let w_theta = unit_phase(ph.theta);
        let w_phi = unit_phase(ph.phi);
        let w_chi = unit_phase(ph.chi);
        let mut ca = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
        let mut cb = Complex64::new((-0.5 * b.norm_sqr()).exp(), 0.0);
        let mut out = Vec::with_capacity(len);
        for n in 0..len {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let ta = ca * (Complex64::new(1.0, 0.0) + w_theta * sign);
            let tb = w_phi * cb * (Complex64::new(1.0, 0.0) + w_chi * sign);
            out.push(ta + tb);
            let s = ((n + 1) as f64).sqrt();
            ca = ca * a / s;
            cb = cb * b / s;
        }
        out
    }
}

/// `⌈m + 10√m + 20⌉`, the default Fock cutoff for peak intensity `m`.
pub fn default_cutoff(m: f64) -> usize {
    (m + 10.0 * m.sqrt() + 20.0).ceil() as usize
}

/// Compass state (`l = 0`) or its `l`-photon-subtracted descendant, with
/// β = iα.
pub fn canonical_pscs(alpha: ComplexAmplitude, l: SubtractionIndex) -> Result<GcsParams> {
    let beta = ComplexAmplitude::try_from(Complex64::new(0.0, 1.0) * alpha.value())?;
    GcsParams::new(alpha, beta, PhaseTriple::canonical(l))
}

/// Normalization constant `N`.
pub fn normalization(p: &GcsParams) -> f64 {
    p.bracket().sqrt().recip()
}

/// Coherent overlap `⟨γ|σ⟩`.
pub fn coherent_overlap(gamma: Complex64, sigma: Complex64) -> Complex64 {
    (-0.5 * gamma.norm_sqr() - 0.5 * sigma.norm_sqr() + gamma.conj() * sigma).exp()
}

/// `⟨p|q⟩` from coherent overlaps of the eight components.
pub fn inner_product(p: &GcsParams, q: &GcsParams) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for u in p.kets() {
        for v in q.kets() {
            acc += u.weight.conj() * v.weight * coherent_overlap(u.amplitude, v.amplitude);
        }
    }
    acc * normalization(p) * normalization(q)
}

/// Truncated number-basis expansion of a pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
    renormalization: f64,
    tail_tolerance: f64,
}

impl FockVector {
    /// Normalize arbitrary coefficients; fails if their norm is null.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::NullState { bracket: 0.0 });
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::NonFinite("Fock coefficients"));
        }
        let norm_sqr: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
        if norm_sqr <= EPS_NULL {
            return Err(Error::NullState { bracket: norm_sqr });
        }
        let norm = norm_sqr.sqrt();
        Ok(Self {
            coeffs: coeffs.into_iter().map(|c| c / norm).collect(),
            renormalization: norm,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        Self::number_state(0, cutoff)
    }

    pub fn number_state(n: usize, cutoff: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); cutoff.max(n) + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        Self {
            coeffs,
            renormalization: 1.0,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }

    /// Coherent state `|α⟩` truncated at `cutoff` and renormalized.
    pub fn coherent(alpha: Complex64, cutoff: usize) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(cutoff + 1);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..=cutoff {
            coeffs.push(c);
            c = c * alpha / ((n + 1) as f64).sqrt();
        }
        Self::from_coeffs(coeffs)
    }

    pub fn with_tail_tolerance(mut self, tol: f64) -> Self {
        self.tail_tolerance = tol;
        self
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Norm of the coefficients before renormalization to unit norm.
    pub fn renormalization(&self) -> f64 {
        self.renormalization
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    /// Probability mass in the top [`TAIL_WINDOW`] coefficients.
    pub fn tail_mass(&self) -> f64 {
        let start = self.coeffs.len().saturating_sub(TAIL_WINDOW);
        self.coeffs[start..].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_faithful(&self) -> bool {
        self.tail_mass() < self.tail_tolerance
    }

    pub fn check_truncation(&self) -> Result<()> {
        if self.is_faithful() {
            Ok(())
        } else {
            Err(Error::TruncationInadequate {
                tail_mass: self.tail_mass(),
                cutoff: self.cutoff(),
            })
        }
    }

    pub fn dot(&self, other: &FockVector) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &FockVector) -> f64 {
        self.dot(other).norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Number-basis coefficients of `p` up to `cutoff`, renormalized; fails if
/// more than the tail tolerance of probability sits in the top few levels.
pub fn fock_coefficients(p: &GcsParams, cutoff: usize) -> Result<FockVector> {
    fock_coefficients_with(p, cutoff, DEFAULT_TAIL_TOLERANCE)
}

pub fn fock_coefficients_with(
    p: &GcsParams,
    cutoff: usize,
    tail_tolerance: f64,
) -> Result<FockVector> {
    let n = normalization(p);
    let coeffs: Vec<Complex64> = p
        .unnormalized_series(cutoff + 1)
        .into_iter()
        .map(|c| c * n)
        .collect();
    let v = FockVector::from_coeffs(coeffs)?.with_tail_tolerance(tail_tolerance);
    v.check_truncation()?;
    Ok(v)
}

/// [`fock_coefficients`] at the default cutoff `⌈m + 10√m + 20⌉`.
pub fn fock_default(p: &GcsParams) -> Result<FockVector> {
    fock_coefficients(p, default_cutoff(p.max_intensity()))
}

/// Apply `â^times` and renormalize. Also returns the norm of `â^times |v⟩`.
pub fn apply_annihilation(v: &FockVector, times: u32) -> Result<(FockVector, f64)> {
    let t = times as usize;
    let len = v.coeffs.len();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for (n, slot) in out.iter_mut().enumerate() {
        let src = n + t;
        if src < len {
            let factor = (0.5 * (ln_factorial(src) - ln_factorial(n))).exp();
            *slot = v.coeffs[src] * factor;
        }
    }
    let norm_sqr: f64 = out.iter().map(|c| c.norm_sqr()).sum();
    if norm_sqr <= EPS_NULL {
        return Err(Error::NullState { bracket: norm_sqr });
    }
    let norm = norm_sqr.sqrt();
    let w = FockVector {
        coeffs: out.into_iter().map(|c| c / norm).collect(),
        renormalization: 1.0,
        tail_tolerance: v.tail_tolerance,
    };
    Ok((w, norm))
}

/// Closed-form photon-number amplitude `⟨n|ψ⟩` (log-space powers).
pub fn photon_amplitude(p: &GcsParams, n: usize) -> Complex64 {
    let ph = p.phases();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let one = Complex64::new(1.0, 0.0);
    let term = |amp: Complex64| -> Complex64 {
        let r = amp.norm();
        if r == 0.0 {
            return if n == 0 {
                one
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        let log_mag = n as f64 * r.ln() - 0.5 * ln_factorial(n) - 0.5 * r * r;
        Complex64::from_polar(log_mag.exp(), n as f64 * amp.arg())
    };
    let a = term(p.alpha()) * (one + unit_phase(ph.theta()) * sign);
    let b = unit_phase(ph.phi()) * term(p.beta()) * (one + unit_phase(ph.chi()) * sign);
    (a + b) * normalization(p)
}
