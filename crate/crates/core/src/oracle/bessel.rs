//! Integer-order Bessel functions of the first kind by Miller's downward
//! recurrence, normalized with `J₀ + 2 Σ J₂ₖ = 1`.
//!
//! Shares nothing with the momentum quadrature.

use num_complex::Complex64;

use crate::model::DispersionConvention;

const RESCALE: f64 = 1e200;

/// `[J₀(x), J₁(x), …, J_{n_max}(x)]` for `x ≥ 0`.
pub fn bessel_j_all(n_max: usize, x: f64) -> Vec<f64> {
    assert!(
        x >= 0.0 && x.is_finite(),
        "bessel_j_all needs a finite x ≥ 0, got {x}"
    );
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    // Past the turning point J_n(x) decays like Ai((n − x)/(x/2)^{1/3});
    // fifteen Airy lengths put the start below 1e-17.
    let turning = (n_max as f64).max(x);
    let mut start = (turning + 20.0 + 15.0 * (0.5 * x).cbrt()).ceil() as usize;
    start += start % 2;

    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur is now J_{k-1}
        let order = k - 1;
        if order <= n_max {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            norm /= RESCALE;
            for v in out.iter_mut() {
                *v /= RESCALE;
            }
        }
    }
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

/// `J_n(x)` for any integer order and real argument.
pub fn bessel_j(n: i64, x: f64) -> f64 {
    let order = n.unsigned_abs() as usize;
    let value = bessel_j_all(order, x.abs())[order];
    // J_{-n} = (-1)^n J_n, J_n(-x) = (-1)^n J_n(x)
    let flips = (n < 0) as u32 + (x < 0.0) as u32;
    if order % 2 == 1 && flips == 1 {
        -value
    } else {
        value
    }
}

/// The two limits with closed-form concurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceCase {
    /// `J' = 0`: `ε = cos k`.
    AlphaZero,
    /// `J = 0`, `J' = 1`: `ε = ±(1/2) cos 2k`.
    PureTsi,
}

/// Closed-form concurrence of the initial pair (`φ = 0`):
/// `J₀(t)² + J₁(t)²` without three-spin coupling, `J₀(t/2)²` in the pure
/// three-spin limit.
pub fn bessel_reference(case: ReferenceCase, t: f64) -> f64 {
    match case {
        ReferenceCase::AlphaZero => {
            let j = bessel_j_all(1, t);
            j[0] * j[0] + j[1] * j[1]
        }
        ReferenceCase::PureTsi => {
            let j0 = bessel_j_all(0, 0.5 * t)[0];
            j0 * j0
        }
    }
}

/// Site-to-site propagator `⟨j + d| e^{−iHt} |j⟩` of the infinite chain.
///
/// `(−i)^d J_d(t)` for `ε = cos k`; for `ε = s (1/2) cos 2k` only even
/// offsets `d = 2n` are reached, with amplitude `(−is)^n J_n(t/2)`.
pub fn bessel_propagator(
    case: ReferenceCase,
    convention: DispersionConvention,
    d: i64,
    t: f64,
) -> Complex64 {
    let (order, x, unit) = match case {
        ReferenceCase::AlphaZero => (d, t, Complex64::new(0.0, -1.0)),
        ReferenceCase::PureTsi => {
            if d % 2 != 0 {
                return Complex64::new(0.0, 0.0);
            }
            (d / 2, 0.5 * t, Complex64::new(0.0, -convention.nnn_sign()))
        }
    };
    unit.powi(order as i32) * bessel_j(order, x)
}
