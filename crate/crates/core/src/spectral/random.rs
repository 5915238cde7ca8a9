//! Seeded random band-limited fields.
//!
//! Coefficients are drawn in a fixed lattice order that depends only on the
//! band radius, never on the grid size, so the same seed yields the same
//! continuum function on every grid that resolves the band.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{ScalarField, VectorField};
use super::grid::Grid;
use super::ops::partial;
use crate::error::{Error, Result};

/// Random real field with integer wavenumbers |k|∞ ≤ `kmax`, amplitude
/// decaying like (1 + |k|²)^{-decay/2}, and zero mean.
pub fn band_limited(grid: &Grid, kmax: i64, decay: f64, seed: u64) -> Result<ScalarField> {
    if kmax < 1 || 2 * kmax >= grid.n() as i64 {
        return Err(Error::Config(format!(
            "band radius {kmax} not resolved on n = {}",
            grid.n()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n() as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for k1 in -kmax..=kmax {
        for k2 in -kmax..=kmax {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            // keep one representative of each ±k pair
            if (k1, k2) <= (0, 0) {
                continue;
            }
            let amp = (1.0 + (k1 * k1 + k2 * k2) as f64).powf(-decay / 2.0);
            let c = Complex64::new(re, im) * amp;
            let idx = (k1.rem_euclid(n) * n + k2.rem_euclid(n)) as usize;
            coeffs[idx] = c;
            coeffs[grid.conjugate_index(idx)] = c.conj();
        }
    }
    ScalarField::from_coeffs(grid, coeffs)
}

/// Random field with the same decay profile restricted to the dealiasing
/// mask of `grid` (band depends on the grid, unlike [`band_limited`]).
pub fn dealiased(grid: &Grid, decay: f64, seed: u64) -> Result<ScalarField> {
    band_limited(grid, grid.dealias_cutoff(), decay, seed)
}

/// Divergence-free field ∇^⊥ψ = (−∂₂ψ, ∂₁ψ) built from a random stream
/// function.
pub fn solenoidal(grid: &Grid, kmax: i64, decay: f64, seed: u64) -> Result<VectorField> {
    let psi = band_limited(grid, kmax, decay, seed)?;
    VectorField::new(partial(&psi, 1).scale(-1.0), partial(&psi, 0))
}

/// Random field spectrally supported in the closed shell a ≤ |ξ| ≤ b,
/// excluding Nyquist indices.
pub fn annulus(grid: &Grid, inner: f64, outer: f64, seed: u64) -> Result<ScalarField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let half = (n / 2) as i64;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut count = 0usize;
    for idx in 0..grid.len() {
        let (k1, k2) = grid.lattice_point(idx);
        if k1 == -half || k2 == -half || (k1, k2) <= (0, 0) {
            continue;
        }
        let (x1, x2) = grid.xi(idx);
        let r = (x1 * x1 + x2 * x2).sqrt();
        if r < inner || r > outer {
            continue;
        }
        let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        coeffs[idx] = c;
        coeffs[grid.conjugate_index(idx)] = c.conj();
        count += 1;
    }
    if count == 0 {
        return Err(Error::Diagnostic(format!(
            "annulus {inner} <= |xi| <= {outer} contains no lattice modes"
        )));
    }
    ScalarField::from_coeffs(grid, coeffs)
}
