use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic square collocation grid with its integer wavenumber lattice.
///
/// Storage is row-major with the first axis (x₁) as the slow index: the
/// sample at `(i1, i2)` lives at `i1 * n + i2` and sits at `x = (i1 h, i2 h)`.
/// Coefficients use the same layout in FFT order.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n: usize,
    length: f64,
    wavenumbers: Vec<i64>,
    dealias_mask: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid size must be a power of two >= 16, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Config(format!("domain length must be positive, got {length}")));
        }
        let half = n as i64 / 2;
        let wavenumbers: Vec<i64> = (0..n as i64)
            .map(|i| if i < half { i } else { i - n as i64 })
            .collect();
        let mut dealias_mask = vec![false; n * n];
        for (i1, &k1) in wavenumbers.iter().enumerate() {
            for (i2, &k2) in wavenumbers.iter().enumerate() {
                // |k| <= n/3 on both axes, in exact integer arithmetic
                dealias_mask[i1 * n + i2] =
                    3 * k1.unsigned_abs() <= n as u64 && 3 * k2.unsigned_abs() <= n as u64;
            }
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                n,
                length,
                wavenumbers,
                dealias_mask,
                forward,
                inverse,
            }),
        })
    }

    /// Grid on the standard torus [0, 2π)².
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn len(&self) -> usize {
        self.inner.n * self.inner.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.inner.length
    }

    pub fn spacing(&self) -> f64 {
        self.inner.length / self.inner.n as f64
    }

    /// Cell area, the quadrature weight of each collocation point.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Integer wavenumbers along one axis in FFT order.
    pub fn wavenumbers(&self) -> &[i64] {
        &self.inner.wavenumbers
    }

    /// Ratio between physical and integer wavenumbers.
    pub fn wavenumber_scale(&self) -> f64 {
        2.0 * PI / self.inner.length
    }

    /// Integer lattice point for a flat coefficient index.
    pub fn lattice_point(&self, idx: usize) -> (i64, i64) {
        let n = self.inner.n;
        (self.inner.wavenumbers[idx / n], self.inner.wavenumbers[idx % n])
    }

    /// Physical wavenumber ξ for a flat coefficient index.
    pub fn xi(&self, idx: usize) -> (f64, f64) {
        let (k1, k2) = self.lattice_point(idx);
        let s = self.wavenumber_scale();
        (k1 as f64 * s, k2 as f64 * s)
    }

    /// Flat index of the lattice point −k.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let n = self.inner.n;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    pub fn dealias_mask(&self) -> &[bool] {
        &self.inner.dealias_mask
    }

    /// Largest integer wavenumber kept by the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        self.inner.n as i64 / 3
    }

    /// Largest |ξ| on the lattice.
    pub fn max_wavenumber(&self) -> f64 {
        let half = (self.inner.n / 2) as f64 * self.wavenumber_scale();
        half * std::f64::consts::SQRT_2
    }

    /// Collocation coordinates of a flat sample index.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        let n = self.inner.n;
        let h = self.spacing();
        ((idx / n) as f64 * h, (idx % n) as f64 * h)
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n == other.inner.n && self.inner.length == other.inner.length)
    }

    /// Normalized forward transform: returns Fourier coefficients `f̂(k)` such
    /// that `f(x) = Σ f̂(k) e^{i ξ·x}`.
    pub(crate) fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform_2d(&mut buf, &self.inner.forward);
        let norm = 1.0 / self.len() as f64;
        for c in &mut buf {
            *c *= norm;
        }
        buf
    }

    /// Inverse of [`Grid::forward`], keeping the real part.
    pub(crate) fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.transform_2d(&mut buf, &self.inner.inverse);
        buf.into_iter().map(|c| c.re).collect()
    }

    fn transform_2d(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.inner.n;
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose(buf, n);
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    const TILE: usize = 16;
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + TILE).min(n) {
                    buf.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.inner.n)
            .field("length", &self.inner.length)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}
