//! Couplings, unit conventions and the single-fermion dispersion of the
//! XX chain with three-spin interaction.
//!
//! After the Jordan-Wigner mapping the chain is a free-fermion hopping model
//! with nearest- and next-nearest-neighbour amplitudes, so every quantity
//! downstream is fixed by the dispersion
//!
//! ```text
//! ε(k) = J cos k + s · (J'/2) cos 2k
//! ```
//!
//! where `s` is the sign selected by [`DispersionConvention`]. In units of
//! `J` this is `cos k + s (α/2) cos 2k`; in the pure three-spin limit
//! (`J = 0`, `J' = 1`) it is `s (1/2) cos 2k`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Default number of momentum quadrature points.
pub const DEFAULT_N_K: usize = 4096;

/// Smallest admissible momentum grid.
pub const MIN_N_K: usize = 64;

/// Which coupling is set to one, fixing the unit of time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EnergyUnit {
    /// `|J| = 1`.
    J,
    /// `J' = 1`, used for the pure three-spin limit.
    JPrime,
}

/// Sign of the next-nearest-neighbour term in the dispersion.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DispersionConvention {
    /// `ε(k) = J cos k − (J'/2) cos 2k`, i.e. the fermion hopping
    /// Hamiltonian with NNN amplitude `−J'/4`.
    #[default]
    Fermionized,
    /// `ε(k) = J cos k + (J'/2) cos 2k`.
    Printed,
}

impl DispersionConvention {
    /// Sign multiplying the `cos 2k` term.
    pub fn nnn_sign(self) -> f64 {
        match self {
            Self::Fermionized => -1.0,
            Self::Printed => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fermionized => "fermionized",
            Self::Printed => "printed",
        }
    }
}

impl fmt::Display for DispersionConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Model couplings plus momentum resolution.
///
/// Raw parameter sets go through [`validate_params`] before use; the
/// constructors below already do.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    /// Nearest-neighbour XX coupling `J`.
    pub j_nn: f64,
    /// Three-spin coupling `J'`.
    pub j_tsi: f64,
    /// `J'/J`. Set to `+∞` in the pure three-spin limit, where it is never
    /// used numerically.
    pub alpha: f64,
    /// `J = 0`, `J' = 1`.
    pub pure_tsi: bool,
    pub energy_unit: EnergyUnit,
    /// Number of momentum quadrature points (even, at least [`MIN_N_K`]).
    pub n_k: usize,
    pub convention: DispersionConvention,
}

impl ModelParams {
    /// `J = 1`, `J' = α`.
    pub fn new(alpha: f64) -> Result<Self> {
        Self::from_couplings(1.0, alpha)
    }

    /// Raw couplings in units of `|J|`.
    pub fn from_couplings(j_nn: f64, j_tsi: f64) -> Result<Self> {
        validate_params(Self {
            j_nn,
            j_tsi,
            alpha: f64::NAN,
            pure_tsi: false,
            energy_unit: EnergyUnit::J,
            n_k: DEFAULT_N_K,
            convention: DispersionConvention::default(),
        })
    }

    /// The `α → ∞` limit: `J = 0`, `J' = 1`.
    pub fn pure_tsi() -> Self {
        Self {
            j_nn: 0.0,
            j_tsi: 1.0,
            alpha: f64::INFINITY,
            pure_tsi: true,
            energy_unit: EnergyUnit::JPrime,
            n_k: DEFAULT_N_K,
            convention: DispersionConvention::default(),
        }
    }

    pub fn with_n_k(self, n_k: usize) -> Result<Self> {
        validate_params(Self { n_k, ..self })
    }

    pub fn with_convention(self, convention: DispersionConvention) -> Self {
        Self { convention, ..self }
    }

    /// Upper bound on the group velocity `|dε/dk|`, in sites per unit time.
    pub fn velocity_bound(&self) -> f64 {
        self.j_nn.abs() + self.j_tsi.abs()
    }

    pub fn dispersion(&self) -> Dispersion {
        Dispersion::new(self)
    }

    /// Human-readable `α`, `"inf"` in the pure three-spin limit.
    pub fn alpha_label(&self) -> String {
        if self.pure_tsi {
            "inf".to_string()
        } else {
            format!("{}", self.alpha)
        }
    }
}

/// Checks a raw parameter set and returns it normalized (`α` recomputed from
/// the couplings, unit convention forced by the pure-TSI flag).
pub fn validate_params(params: ModelParams) -> Result<ModelParams> {
    let ModelParams {
        j_nn, j_tsi, n_k, ..
    } = params;
    if !j_nn.is_finite() || !j_tsi.is_finite() {
        return Err(Error::params("couplings must be finite"));
    }
    if n_k < MIN_N_K {
        return Err(Error::params(format!(
            "n_k = {n_k} is below the minimum {MIN_N_K}"
        )));
    }
    if n_k % 2 != 0 {
        return Err(Error::params(format!("n_k = {n_k} must be even")));
    }
    if params.pure_tsi {
        if j_nn != 0.0 {
            return Err(Error::params("pure three-spin mode requires J = 0"));
        }
        if j_tsi != 1.0 {
            return Err(Error::params(
                "pure three-spin mode measures energy in units of J' = 1",
            ));
        }
        return Ok(ModelParams {
            alpha: f64::INFINITY,
            energy_unit: EnergyUnit::JPrime,
            ..params
        });
    }
    if j_nn == 0.0 {
        return Err(Error::params("J = 0 requires the pure three-spin flag"));
    }
    match params.energy_unit {
        EnergyUnit::J if j_nn.abs() != 1.0 => {
            return Err(Error::params(format!(
                "energy unit J requires |J| = 1, got J = {j_nn}"
            )))
        }
        EnergyUnit::JPrime if j_tsi != 1.0 => {
            return Err(Error::params(format!(
                "energy unit J' requires J' = 1, got J' = {j_tsi}"
            )))
        }
        _ => {}
    }
    Ok(ModelParams {
        alpha: j_tsi / j_nn,
        ..params
    })
}

/// Evaluates `ε(k)` for a fixed parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dispersion {
    nn: f64,
    nnn: f64,
}

impl Dispersion {
    pub fn new(params: &ModelParams) -> Self {
        Self {
            nn: params.j_nn,
            nnn: params.convention.nnn_sign() * 0.5 * params.j_tsi,
        }
    }

    #[inline]
    pub fn eval(&self, k: f64) -> f64 {
        let k = reduce_angle(k);
        self.nn * k.cos() + self.nnn * (2.0 * k).cos()
    }

    /// Real-space hopping amplitudes `(t₁, t₂)` of the fermion Hamiltonian
    /// `Σ t₁ (a†ₙaₙ₊₁ + h.c.) + t₂ (a†ₙaₙ₊₂ + h.c.)` with this dispersion.
    pub fn hopping(&self) -> (f64, f64) {
        (0.5 * self.nn, 0.5 * self.nnn)
    }
}

/// `ε(k)` after validating `params`.
pub fn dispersion_eval(k: f64, params: &ModelParams) -> Result<f64> {
    let params = validate_params(*params)?;
    Ok(Dispersion::new(&params).eval(k))
}

/// Maps an angle onto `[-π, π)`.
pub(crate) fn reduce_angle(k: f64) -> f64 {
    if (-PI..PI).contains(&k) {
        k
    } else {
        (k + PI).rem_euclid(2.0 * PI) - PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn printed(alpha: f64) -> ModelParams {
        ModelParams::new(alpha)
            .unwrap()
            .with_convention(DispersionConvention::Printed)
    }

    #[test]
    fn printed_dispersion_values() {
        assert!((dispersion_eval(0.0, &printed(1.0)).unwrap() - 1.5).abs() < 1e-15);
        assert!(dispersion_eval(PI, &printed(2.0)).unwrap().abs() < 1e-15);
        assert!((dispersion_eval(PI / 2.0, &printed(1.0)).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn fermionized_flips_nnn_term() {
        let p = ModelParams::new(1.0).unwrap();
        assert!((dispersion_eval(0.0, &p).unwrap() - 0.5).abs() < 1e-15);
        assert!((dispersion_eval(PI / 2.0, &p).unwrap() - 0.5).abs() < 1e-15);
        let pure = ModelParams::pure_tsi();
        assert!((dispersion_eval(0.0, &pure).unwrap() + 0.5).abs() < 1e-15);
        let pure = pure.with_convention(DispersionConvention::Printed);
        assert!((dispersion_eval(0.0, &pure).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        let p = ModelParams::from_couplings(1.0, 2.0).unwrap();
        assert_eq!(p.alpha, 2.0);
        assert_eq!(p.energy_unit, EnergyUnit::J);

        let pure = validate_params(ModelParams {
            energy_unit: EnergyUnit::J,
            ..ModelParams::pure_tsi()
        })
        .unwrap();
        assert_eq!(pure.energy_unit, EnergyUnit::JPrime);
        assert!(pure.alpha.is_infinite());

        assert!(ModelParams::from_couplings(0.0, 1.0).is_err());
        assert!(ModelParams::from_couplings(2.0, 1.0).is_err());
        assert!(ModelParams::new(f64::NAN).is_err());
        assert!(ModelParams::new(1.0).unwrap().with_n_k(63).is_err());
        assert!(ModelParams::new(1.0).unwrap().with_n_k(100).is_ok());
        assert!(ModelParams::new(1.0).unwrap().with_n_k(101).is_err());

        // negative couplings are accepted as given
        let neg = ModelParams::from_couplings(-1.0, 0.5).unwrap();
        assert_eq!(neg.alpha, -0.5);

        let mixed = ModelParams {
            j_nn: 0.5,
            energy_unit: EnergyUnit::JPrime,
            ..ModelParams::new(1.0).unwrap()
        };
        assert_eq!(validate_params(mixed).unwrap().alpha, 2.0);
        let bad_pure = ModelParams {
            j_nn: 1.0,
            ..ModelParams::pure_tsi()
        };
        assert!(validate_params(bad_pure).is_err());
    }

    #[test]
    fn angle_reduction() {
        assert_eq!(reduce_angle(0.3), 0.3);
        assert!((reduce_angle(0.3 + 4.0 * PI) - 0.3).abs() < 1e-14);
        assert!((reduce_angle(PI) + PI).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn dispersion_symmetries(k in -20.0f64..20.0, alpha in -3.0f64..3.0) {
            let d = ModelParams::new(alpha).unwrap().dispersion();
            let e = d.eval(k);
            prop_assert!((e - d.eval(k + 2.0 * PI)).abs() < 1e-12);
            prop_assert!((e - d.eval(-k)).abs() < 1e-12);
            prop_assert!(e.abs() <= 1.0 + alpha.abs() / 2.0 + 1e-12);
        }
    }
}
