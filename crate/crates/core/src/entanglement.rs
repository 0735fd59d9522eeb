//! Two-spin reduced density matrix and its concurrence.
//!
//! For a nearest-neighbour pair the Jordan-Wigner strings cancel and the
//! reduced state is an X-state in the basis `{↑↑, ↑↓, ↓↑, ↓↓}`:
//!
//! ```text
//!     ⎡X⁺  0   0   0 ⎤
//! ρ = ⎢0   Y⁺  Z*  0 ⎥
//!     ⎢0   Z   Y⁻  0 ⎥
//!     ⎣0   0   0   X⁻⎦
//! ```
//!
//! Its concurrence has the closed form `max(0, 2(|Z| − √(X⁺X⁻)))`. The
//! general Wootters recipe is implemented independently and used as a
//! cross-check.

use nalgebra::{Complex, Matrix2, Matrix4};
use num_complex::Complex64;

use crate::dynamics::{PairCorrelators, CORRELATOR_TOL};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;
// Eigenvalues of ρ below this are rounding noise; their square roots would
// otherwise feed ~1e-8 into the Wootters spectrum.
const RANK_FLOOR: f64 = 64.0 * f64::EPSILON;

/// A validated two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSpinDensityMatrix {
    rho: Matrix4<Complex64>,
}

impl TwoSpinDensityMatrix {
    /// Hermitian within 1e-12, unit trace within 1e-9, eigenvalues ≥ −1e-9.
    pub fn new(rho: Matrix4<Complex64>) -> Result<Self> {
        let asym = (rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if !asym.is_finite() || asym > HERMITIAN_TOL {
            return Err(Error::DensityMatrix(format!(
                "not Hermitian (deviation {asym:e})"
            )));
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::DensityMatrix(format!("trace is {trace}")));
        }
        let out = Self { rho };
        let min = out
            .eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::DensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(out)
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Result<Self> {
        Self::new(a.kronecker(b))
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.rho
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let mut ev: Vec<f64> = self
            .rho
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        [ev[0], ev[1], ev[2], ev[3]]
    }

    fn sqrt(&self) -> Matrix4<Complex64> {
        let eig = self.rho.symmetric_eigen();
        let roots = eig.eigenvalues.map(|l| {
            let r = if l > RANK_FLOOR { l.sqrt() } else { 0.0 };
            Complex::new(r, 0.0)
        });
        let v = eig.eigenvectors;
        v * Matrix4::from_diagonal(&roots) * v.adjoint()
    }
}

/// Assembles the X-state from pair correlators. No renormalization is
/// applied.
pub fn build_density_matrix(c: &PairCorrelators) -> Result<TwoSpinDensityMatrix> {
    c.check()?;
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    #[rustfmt::skip]
    let rho = Matrix4::new(
        re(c.x_plus), zero,         zero,          zero,
        zero,         re(c.y_plus), c.z.conj(),    zero,
        zero,         c.z,          re(c.y_minus), zero,
        zero,         zero,         zero,          re(c.x_minus),
    );
    TwoSpinDensityMatrix::new(rho).map_err(|e| Error::CorrelatorConsistency(e.to_string()))
}

/// `2(|Z| − √(X⁺X⁻))` before clamping at zero. Negative values signal a
/// separable state.
pub fn raw_concurrence(c: &PairCorrelators) -> Result<f64> {
    for (name, v) in [("X+", c.x_plus), ("X-", c.x_minus)] {
        if v < -CORRELATOR_TOL || !v.is_finite() {
            return Err(Error::CorrelatorConsistency(format!(
                "{name} = {v} is negative"
            )));
        }
    }
    Ok(2.0 * (c.z.norm() - (c.x_plus.max(0.0) * c.x_minus.max(0.0)).sqrt()))
}

/// Closed-form X-state concurrence `max(0, 2(|Z| − √(X⁺X⁻)))`.
pub fn concurrence_closed_form(c: &PairCorrelators) -> Result<f64> {
    raw_concurrence(c).map(|r| r.max(0.0))
}

/// Wootters concurrence `max(0, λ₁ − λ₂ − λ₃ − λ₄)`.
///
/// The `λᵢ` are the square roots of the eigenvalues of `ρρ̃`, with
/// `ρ̃ = (σʸ⊗σʸ)ρ*(σʸ⊗σʸ)`. They are obtained as the singular values of
/// `√ρ (σʸ⊗σʸ) √ρ*`, whose Gram matrix `√ρ ρ̃ √ρ` is similar to `ρρ̃`; this
/// avoids taking square roots of rounding-level eigenvalues of `ρρ̃`.
pub fn concurrence_wootters(rho: &TwoSpinDensityMatrix) -> f64 {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    #[rustfmt::skip]
    let sigma_yy = Matrix4::new(
        zero,  zero, zero, -one,
        zero,  zero, one,  zero,
        zero,  one,  zero, zero,
        -one,  zero, zero, zero,
    );
    let root = rho.sqrt();
    let m = root * sigma_yy * root.conjugate();
    let mut lambda: Vec<f64> = m.singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    (lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0)
}
