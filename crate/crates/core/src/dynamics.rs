//! Exact time evolution of the Bell pair in the thermodynamic limit.
//!
//! The initial state `(a†ₘ + e^{iφ} a†ₘ₊₁)|0⟩/√2` lives in the
//! single-fermion sector, so its evolution is diagonal in momentum space:
//!
//! ```text
//! |ψ(t)⟩ = (2N)^{-1/2} Σₖ f(k) a†ₖ|0⟩,   f(k) = e^{i(km − ε(k)t)} (1 + e^{i(k+φ)})
//! ```
//!
//! Site amplitudes are Fourier integrals of `f`, evaluated with the uniform
//! trapezoidal rule on `[-π, π)`. The integrand is smooth and periodic, so the
//! rule converges spectrally; it is also identical to exact evolution on a
//! ring of `n_k` sites. There is no time stepping anywhere: every time point
//! is computed independently.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams};

/// A Bell pair on sites `m`, `m+1` embedded in the fully polarized chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuenchState {
    /// Left site of the initially entangled pair.
    pub m: i64,
    /// Relative phase of the Bell superposition.
    pub phi: f64,
    pub params: ModelParams,
}

impl QuenchState {
    pub fn new(m: i64, phi: f64, params: ModelParams) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::params("phase φ must be finite"));
        }
        let params = validate_params(params)?;
        Ok(Self { m, phi, params })
    }

    /// `m = 0`, `φ = 0`.
    pub fn bell(params: ModelParams) -> Result<Self> {
        Self::new(0, 0.0, params)
    }
}

/// The five independent two-site correlators of a nearest-neighbour pair
/// `(i, i+1)` together with the derived populations of the reduced density
/// matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCorrelators {
    /// `⟨a†ᵢ aᵢ₊₁⟩`.
    pub z: Complex64,
    pub n_i: f64,
    pub n_j: f64,
    /// `⟨nᵢ⟩⟨nⱼ⟩ − |Z|²`.
    pub x_plus: f64,
    /// `1 − ⟨nᵢ⟩ − ⟨nⱼ⟩ + X⁺`.
    pub x_minus: f64,
    /// `⟨nᵢ⟩ − X⁺`.
    pub y_plus: f64,
    /// `⟨nⱼ⟩ − X⁺`.
    pub y_minus: f64,
}

/// Tolerance used by [`PairCorrelators::check`].
pub const CORRELATOR_TOL: f64 = 1e-9;

impl PairCorrelators {
    /// Correlators from `Z`, `⟨nᵢ⟩`, `⟨nⱼ⟩`, with `X⁺ = ⟨nᵢ⟩⟨nⱼ⟩ − |Z|²`.
    /// A difference within a few ulps of the operands is set to zero.
    pub fn from_moments(z: Complex64, n_i: f64, n_j: f64) -> Self {
        let product = n_i * n_j;
        let z2 = z.norm_sqr();
        let mut x_plus = product - z2;
        if x_plus.abs() <= 8.0 * f64::EPSILON * product.max(z2) {
            x_plus = 0.0;
        }
        Self::from_parts(z, n_i, n_j, x_plus)
    }

    /// Correlators of a single-excitation state with amplitudes `ψᵢ`, `ψⱼ`
    /// on the two sites.
    pub fn from_amplitudes(psi_i: Complex64, psi_j: Complex64) -> Self {
        Self::from_moments(psi_i.conj() * psi_j, psi_i.norm_sqr(), psi_j.norm_sqr())
    }

    /// General correlators with an explicit `X⁺ = ⟨nᵢnⱼ⟩`.
    pub fn from_parts(z: Complex64, n_i: f64, n_j: f64, x_plus: f64) -> Self {
        Self {
            z,
            n_i,
            n_j,
            x_plus,
            x_minus: 1.0 - n_i - n_j + x_plus,
            y_plus: n_i - x_plus,
            y_minus: n_j - x_plus,
        }
    }

    /// Both sites empty (spin down).
    pub fn vacuum() -> Self {
        Self::from_parts(Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0)
    }

    /// Verifies trace, positivity and Cauchy–Schwarz within
    /// [`CORRELATOR_TOL`].
    pub fn check(&self) -> Result<()> {
        let tol = CORRELATOR_TOL;
        let fail = |what: String| Err(Error::CorrelatorConsistency(what));
        let values = [
            self.n_i,
            self.n_j,
            self.x_plus,
            self.x_minus,
            self.y_plus,
            self.y_minus,
        ];
        if values.iter().any(|v| !v.is_finite()) || !self.z.re.is_finite() || !self.z.im.is_finite()
        {
            return fail("non-finite correlator".into());
        }
        let trace = self.x_plus + self.y_plus + self.y_minus + self.x_minus;
        if (trace - 1.0).abs() > tol {
            return fail(format!("populations sum to {trace}"));
        }
        for (name, v) in [("n_i", self.n_i), ("n_j", self.n_j)] {
            if !(-tol..=1.0 + tol).contains(&v) {
                return fail(format!("{name} = {v} outside [0, 1]"));
            }
        }
        for (name, v) in [
            ("X+", self.x_plus),
            ("X-", self.x_minus),
            ("Y+", self.y_plus),
            ("Y-", self.y_minus),
        ] {
            if v < -tol {
                return fail(format!("{name} = {v} is negative"));
            }
        }
        let z2 = self.z.norm_sqr();
        if z2 > self.y_plus * self.y_minus + tol {
            return fail(format!(
                "|Z|² = {z2} exceeds Y+·Y- = {}",
                self.y_plus * self.y_minus
            ));
        }
        if z2 > self.n_i * self.n_j + tol {
            return fail(format!(
                "|Z|² = {z2} exceeds n_i·n_j = {}",
                self.n_i * self.n_j
            ));
        }
        Ok(())
    }
}

/// `f(k) = e^{i(km − ε(k)t)} (1 + e^{i(k+φ)})`.
pub fn momentum_amplitude(k: f64, t: f64, state: &QuenchState) -> Complex64 {
    let eps = state.params.dispersion().eval(k);
    Complex64::cis(k * state.m as f64 - eps * t) * (1.0 + Complex64::cis(k + state.phi))
}

/// `ψⱼ(t) = ⟨0|aⱼ|ψ(t)⟩`.
///
/// Builds a fresh [`Evolver`]; use one directly when many amplitudes are
/// needed.
pub fn site_amplitude(j: i64, t: f64, state: &QuenchState) -> Complex64 {
    Evolver::new(state).at(t).amplitude(j)
}

/// Correlators of the pair `(i, i+1)` at time `t` via the factorization
/// `Z = ψᵢ*ψᵢ₊₁`, `⟨nᵢ⟩ = |ψᵢ|²`.
pub fn pair_correlators(i: i64, t: f64, state: &QuenchState) -> PairCorrelators {
    Evolver::new(state).at(t).correlators(i)
}

/// Correlators of the pair `(i, i+1)` from the momentum double integrals
///
/// ```text
/// Z    = (1/8π²) ∬ f*(k) f(k') e^{i[(k−k')i − k']} dk dk'
/// ⟨nᵢ⟩ = (1/8π²) ∬ f*(k) f(k') e^{i(k−k')i} dk dk'
/// ```
///
/// The integrands separate, so each is a product of two trapezoidal single
/// integrals over `f` evaluated through [`momentum_amplitude`].
pub fn pair_correlators_integral(i: i64, t: f64, state: &QuenchState) -> PairCorrelators {
    let n = state.params.n_k;
    let mut left = Complex64::new(0.0, 0.0);
    let mut right = Complex64::new(0.0, 0.0);
    for q in 0..n {
        let k = momentum(q, n);
        let f = momentum_amplitude(k, t, state);
        left += f * Complex64::cis(-k * i as f64);
        right += f * Complex64::cis(-k * (i + 1) as f64);
    }
    left /= n as f64;
    right /= n as f64;
    let z = 0.5 * left.conj() * right;
    PairCorrelators::from_moments(z, 0.5 * left.norm_sqr(), 0.5 * right.norm_sqr())
}

#[inline]
fn momentum(q: usize, n: usize) -> f64 {
    -PI + 2.0 * PI * q as f64 / n as f64
}

/// Precomputed momentum grid for repeated evaluation of one [`QuenchState`].
///
/// Grid points are `k_q = −π + 2πq/n`. Since `ε` is even and `k_{n−q} = −k_q`,
/// only `n/2 + 1` phases are computed per time.
#[derive(Clone, Debug)]
pub struct Evolver {
    state: QuenchState,
    energy: Vec<f64>,
    weight: Vec<Complex64>,
    // e^{-2πi r/n}
    roots: Vec<Complex64>,
}

impl Evolver {
    pub fn new(state: &QuenchState) -> Self {
        let n = state.params.n_k;
        let dispersion = state.params.dispersion();
        let energy = (0..=n / 2)
            .map(|q| dispersion.eval(momentum(q, n)))
            .collect();
        let weight = (0..n)
            .map(|q| 1.0 + Complex64::cis(momentum(q, n) + state.phi))
            .collect();
        let roots = (0..n)
            .map(|r| Complex64::cis(-2.0 * PI * r as f64 / n as f64))
            .collect();
        Self {
            state: *state,
            energy,
            weight,
            roots,
        }
    }

    pub fn state(&self) -> &QuenchState {
        &self.state
    }

    /// The momentum amplitudes at time `t`, relative to site `m`.
    pub fn at(&self, t: f64) -> Snapshot<'_> {
        let n = self.weight.len();
        let phases: Vec<Complex64> = self
            .energy
            .iter()
            .map(|&e| Complex64::cis(-e * t))
            .collect();
        let g = (0..n)
            .map(|q| self.weight[q] * phases[q.min(n - q)])
            .collect();
        Snapshot { evolver: self, g }
    }
}

/// The evolved state at one instant.
#[derive(Clone, Debug)]
pub struct Snapshot<'a> {
    evolver: &'a Evolver,
    g: Vec<Complex64>,
}

impl Snapshot<'_> {
    /// `ψⱼ = (1/√2 n) Σ_q e^{−ik_q (j−m)} g_q`.
    pub fn amplitude(&self, j: i64) -> Complex64 {
        let n = self.g.len();
        let d = j - self.evolver.state.m;
        // e^{-ik_q d} = (-1)^d e^{-2πi qd/n}
        let step = d.rem_euclid(n as i64) as usize;
        let roots = &self.evolver.roots;
        let mut idx = 0usize;
        let mut sum = Complex64::new(0.0, 0.0);
        for g in &self.g {
            sum += roots[idx] * g;
            idx += step;
            if idx >= n {
                idx -= n;
            }
        }
        let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        sum * (sign * FRAC_1_SQRT_2 / n as f64)
    }

    pub fn correlators(&self, i: i64) -> PairCorrelators {
        PairCorrelators::from_amplitudes(self.amplitude(i), self.amplitude(i + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DispersionConvention;
    use crate::oracle::bessel::bessel_j;
    use proptest::prelude::*;

    fn state(alpha: f64) -> QuenchState {
        QuenchState::bell(ModelParams::new(alpha).unwrap()).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn momentum_amplitude_values() {
        let s = state(0.7);
        assert!(close(
            momentum_amplitude(0.0, 0.0, &s),
            Complex64::new(2.0, 0.0),
            1e-15
        ));
        assert!(close(
            momentum_amplitude(PI, 0.0, &s),
            Complex64::new(0.0, 0.0),
            1e-15
        ));
        assert!(close(
            momentum_amplitude(PI / 2.0, 0.0, &s),
            Complex64::new(1.0, 1.0),
            1e-15
        ));
    }

    #[test]
    fn initial_amplitudes() {
        let s = QuenchState::new(3, 0.4, ModelParams::new(1.3).unwrap()).unwrap();
        let ev = Evolver::new(&s);
        let snap = ev.at(0.0);
        assert!((snap.amplitude(3).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(close(
            snap.amplitude(4),
            Complex64::cis(0.4) * FRAC_1_SQRT_2,
            1e-12
        ));
        for j in [-5, 0, 2, 5, 10] {
            assert!(snap.amplitude(j).norm() < 1e-12, "site {j}");
        }
    }

    #[test]
    fn nearest_neighbour_propagator_is_bessel() {
        // ε = cos k: ψ_m = (J₀(t) − i e^{iφ} J₁(t))/√2
        let phi = 0.3;
        let s = QuenchState::new(0, phi, ModelParams::new(0.0).unwrap()).unwrap();
        for t in [0.5, 2.40483, 5.0, 17.0] {
            let expected = (Complex64::new(bessel_j(0, t), 0.0)
                - Complex64::i() * Complex64::cis(phi) * bessel_j(1, t))
                * FRAC_1_SQRT_2;
            assert!(close(site_amplitude(0, t, &s), expected, 1e-13), "t = {t}");
        }
    }

    #[test]
    fn pure_tsi_amplitude_is_bessel() {
        let s = QuenchState::bell(ModelParams::pure_tsi()).unwrap();
        let t = 4.8097;
        let c = pair_correlators(0, t, &s);
        let j0 = bessel_j(0, t / 2.0);
        assert!((c.z.norm() - 0.5 * j0 * j0).abs() < 1e-14);
        assert!(c.z.norm() < 1e-8);
    }

    #[test]
    fn bell_and_vacuum_correlators() {
        let s = state(1.0);
        let c = pair_correlators(0, 0.0, &s);
        assert!(close(c.z, Complex64::new(0.5, 0.0), 1e-12));
        assert!((c.n_i - 0.5).abs() < 1e-12 && (c.n_j - 0.5).abs() < 1e-12);
        assert!(c.x_plus.abs() < 1e-12 && c.x_minus.abs() < 1e-12);
        assert!((c.y_plus - 0.5).abs() < 1e-12 && (c.y_minus - 0.5).abs() < 1e-12);

        let far = pair_correlators(4, 0.0, &s);
        assert!(far.z.norm() < 1e-12 && far.n_i.abs() < 1e-12 && far.n_j.abs() < 1e-12);
        assert!((far.x_minus - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_enters_initial_coherence() {
        let s = QuenchState::new(0, 1.1, ModelParams::new(2.0).unwrap()).unwrap();
        let c = pair_correlators(0, 0.0, &s);
        assert!(close(c.z, Complex64::cis(1.1) * 0.5, 1e-12));
    }

    #[test]
    fn integral_path_matches_factorized_path() {
        for alpha in [0.0, 0.8, 2.0] {
            let s = QuenchState::new(0, 0.2, ModelParams::new(alpha).unwrap()).unwrap();
            for t in [0.0, 1.7, 12.5, 39.0] {
                for i in [-1, 0, 1, 2] {
                    let a = pair_correlators(i, t, &s);
                    let b = pair_correlators_integral(i, t, &s);
                    assert!((a.z - b.z).norm() < 1e-10);
                    assert!((a.n_i - b.n_i).abs() < 1e-10);
                    assert!((a.n_j - b.n_j).abs() < 1e-10);
                    assert!(a.x_plus.abs() < 1e-10 && b.x_plus.abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn translation_invariance() {
        let params = ModelParams::new(1.4).unwrap();
        let a = QuenchState::new(0, 0.0, params).unwrap();
        let b = QuenchState::new(10, 0.0, params).unwrap();
        for t in [0.3, 7.0, 25.0] {
            let ca = pair_correlators(0, t, &a);
            let cb = pair_correlators(10, t, &b);
            assert!((ca.z - cb.z).norm() < 1e-12);
            assert!((ca.n_i - cb.n_i).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_inside_light_cone() {
        let s = state(2.0);
        let ev = Evolver::new(&s);
        for t in [1.0, 10.0, 40.0] {
            let snap = ev.at(t);
            let reach = (s.params.velocity_bound() * t) as i64 + 40;
            let norm: f64 = (-reach..=reach).map(|j| snap.amplitude(j).norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-9, "t = {t}: {norm}");
        }
    }

    #[test]
    fn quadrature_is_converged() {
        for alpha in [0.0, 1.0, 2.0] {
            let coarse = state(alpha);
            let fine = QuenchState {
                params: coarse.params.with_n_k(8192).unwrap(),
                ..coarse
            };
            for t in [5.0, 20.0, 40.0] {
                let a = pair_correlators(2, t, &coarse);
                let b = pair_correlators(2, t, &fine);
                assert!((a.z - b.z).norm() < 1e-10);
                assert!((a.n_i - b.n_i).abs() < 1e-10);
                assert!((a.x_minus - b.x_minus).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn correlator_checks_reject_unphysical_sets() {
        assert!(PairCorrelators::vacuum().check().is_ok());
        let bad = PairCorrelators::from_parts(Complex64::new(0.6, 0.0), 0.5, 0.5, 0.0);
        assert!(bad.check().is_err());
        let bad = PairCorrelators::from_parts(Complex64::new(0.0, 0.0), 0.9, 0.9, 0.0);
        assert!(bad.check().is_err());
    }

    #[test]
    fn conventions_are_related_by_a_phase_flip() {
        // k → k + π maps one dispersion onto minus the other and φ onto φ + π
        let fermionized = QuenchState::new(0, 0.0, ModelParams::new(1.5).unwrap()).unwrap();
        let printed = QuenchState::new(
            0,
            PI,
            ModelParams::new(1.5)
                .unwrap()
                .with_convention(DispersionConvention::Printed),
        )
        .unwrap();
        for t in [0.7, 3.3, 18.0] {
            let a = pair_correlators(0, t, &fermionized);
            let b = pair_correlators(0, t, &printed);
            assert!((a.z.norm() - b.z.norm()).abs() < 1e-12);
            assert!((a.n_i - b.n_i).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn evolved_correlators_are_physical(
            alpha in -2.5f64..2.5,
            t in 0.0f64..40.0,
            phi in 0.0f64..(2.0 * PI),
            i in -3i64..4,
        ) {
            let s = QuenchState::new(0, phi, ModelParams::new(alpha).unwrap().with_n_k(1024).unwrap()).unwrap();
            let c = pair_correlators(i, t, &s);
            prop_assert!(c.check().is_ok(), "{:?}", c);
            prop_assert!(c.x_plus.abs() < 1e-10);
        }
    }
}
