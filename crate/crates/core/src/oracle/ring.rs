//! Single-particle dynamics on a finite periodic ring by dense
//! diagonalization of the hopping matrix.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{validate_params, ModelParams};

/// Ring size used for the reference comparisons.
pub const DEFAULT_RING_SITES: usize = 4096;

/// Real symmetric `n × n` hopping matrix with periodic wrap-around:
/// `H[i][i±1] = hop_nn`, `H[i][i±2] = hop_nnn`.
#[derive(Clone, Debug)]
pub struct RingHamiltonian {
    pub n_sites: usize,
    pub hop_nn: f64,
    pub hop_nnn: f64,
    matrix: Mat<f64>,
}

/// Builds the ring whose spectrum is `{ε(2πq/n)}` for the dispersion of
/// `params`.
pub fn build_ring(n_sites: usize, params: &ModelParams) -> Result<RingHamiltonian> {
    if n_sites < 16 || !n_sites.is_multiple_of(2) {
        return Err(Error::Oracle(format!(
            "ring needs an even number of sites ≥ 16, got {n_sites}"
        )));
    }
    let params = validate_params(*params).map_err(|e| Error::Oracle(e.to_string()))?;
    let (hop_nn, hop_nnn) = params.dispersion().hopping();
    let mut matrix = Mat::<f64>::zeros(n_sites, n_sites);
    for i in 0..n_sites {
        for (d, h) in [(1, hop_nn), (2, hop_nnn)] {
            let j = (i + d) % n_sites;
            matrix[(i, j)] += h;
            matrix[(j, i)] += h;
        }
    }
    Ok(RingHamiltonian {
        n_sites,
        hop_nn,
        hop_nnn,
        matrix,
    })
}

impl RingHamiltonian {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// `H v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n_sites;
        (0..n)
            .map(|i| {
                let at = |d: isize| v[(i as isize + d).rem_euclid(n as isize) as usize];
                (at(1) + at(-1)) * self.hop_nn + (at(2) + at(-2)) * self.hop_nnn
            })
            .collect()
    }

    /// `⟨v|H|v⟩`.
    pub fn energy(&self, v: &[Complex64]) -> f64 {
        self.apply(v)
            .iter()
            .zip(v)
            .map(|(hv, x)| (x.conj() * hv).re)
            .sum()
    }

    pub fn diagonalize(&self) -> Result<RingSpectrum> {
        let eig = self
            .matrix
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Oracle(format!("eigendecomposition failed: {e:?}")))?;
        let s = eig.S();
        let energies = (0..self.n_sites).map(|i| s[i]).collect();
        Ok(RingSpectrum {
            energies,
            vectors: eig.U().to_owned(),
        })
    }
}

/// Eigenpairs of a [`RingHamiltonian`].
#[derive(Clone, Debug)]
pub struct RingSpectrum {
    /// Ascending.
    pub energies: Vec<f64>,
    vectors: Mat<f64>,
}

impl RingSpectrum {
    pub fn n_sites(&self) -> usize {
        self.energies.len()
    }

    /// Expands a normalized initial state in the eigenbasis.
    pub fn evolution(&self, initial: &[Complex64]) -> Result<RingEvolution<'_>> {
        let n = self.n_sites();
        if initial.len() != n {
            return Err(Error::Oracle(format!(
                "initial state has {} sites, ring has {n}",
                initial.len()
            )));
        }
        let norm: f64 = initial.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Oracle(format!(
                "initial state is not normalized (norm² = {norm})"
            )));
        }
        let support: Vec<(usize, Complex64)> = initial
            .iter()
            .copied()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() > 0.0)
            .collect();
        let coeffs = (0..n)
            .map(|k| support.iter().map(|&(j, z)| z * self.vectors[(j, k)]).sum())
            .collect();
        Ok(RingEvolution {
            spectrum: self,
            coeffs,
        })
    }
}

/// A state evolving under `e^{−iHt}`, kept in the eigenbasis.
#[derive(Clone, Debug)]
pub struct RingEvolution<'a> {
    spectrum: &'a RingSpectrum,
    coeffs: Vec<Complex64>,
}

impl RingEvolution<'_> {
    /// `⟨site| e^{−iHt} |ψ₀⟩`.
    pub fn amplitude(&self, site: usize, t: f64) -> Complex64 {
        let v = &self.spectrum.vectors;
        self.spectrum
            .energies
            .iter()
            .zip(&self.coeffs)
            .enumerate()
            .map(|(k, (&e, &c))| c * Complex64::cis(-e * t) * v[(site, k)])
            .sum()
    }

    /// Full state at time `t`.
    pub fn state(&self, t: f64) -> Vec<Complex64> {
        let n = self.spectrum.n_sites();
        let v = &self.spectrum.vectors;
        let phased: Vec<Complex64> = self
            .spectrum
            .energies
            .iter()
            .zip(&self.coeffs)
            .map(|(&e, &c)| c * Complex64::cis(-e * t))
            .collect();
        (0..n)
            .map(|j| (0..n).map(|k| phased[k] * v[(j, k)]).sum())
            .collect()
    }
}

/// `e^{−iHt} ψ₀` on the ring.
pub fn ring_propagate(
    h: &RingHamiltonian,
    initial: &[Complex64],
    t: f64,
) -> Result<Vec<Complex64>> {
    let spectrum = h.diagonalize()?;
    let state = spectrum.evolution(initial)?.state(t);
    Ok(state)
}

/// `(|m⟩ + e^{iφ}|m+1⟩)/√2` on an `n`-site ring.
pub fn bell_pair(n_sites: usize, m: usize, phi: f64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); n_sites];
    v[m % n_sites] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[(m + 1) % n_sites] = Complex64::cis(phi) * std::f64::consts::FRAC_1_SQRT_2;
    v
}

/// Refuses ring comparisons where the light cone `v·t` reaches within eight
/// sites of the antipode.
pub fn check_light_cone(n_sites: usize, velocity: f64, t: f64) -> Result<()> {
    let reach = velocity * t;
    let limit = n_sites as f64 / 2.0 - 8.0;
    if reach > limit {
        return Err(Error::Oracle(format!(
            "light cone {reach:.1} sites exceeds the safe radius {limit:.1} of a {n_sites}-site ring"
        )));
    }
    Ok(())
}
