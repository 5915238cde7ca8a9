use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real scalar field on a periodic grid.
///
/// Either representation may be the source of truth; the other is filled in
/// on first access. Coefficients are always stored conjugate-symmetric so the
/// two views agree exactly.
#[derive(Clone)]
pub struct ScalarField {
    grid: Grid,
    values: OnceLock<Arc<Vec<f64>>>,
    coeffs: OnceLock<Arc<Vec<Complex64>>>,
}

impl ScalarField {
    pub fn from_values(grid: &Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        let values_cell = OnceLock::new();
        let _ = values_cell.set(Arc::new(values));
        Ok(Self {
            grid: grid.clone(),
            values: values_cell,
            coeffs: OnceLock::new(),
        })
    }

    pub fn from_coeffs(grid: &Grid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        hermitian_symmetrize(grid, &mut coeffs);
        let cell = OnceLock::new();
        let _ = cell.set(Arc::new(coeffs));
        Ok(Self {
            grid: grid.clone(),
            values: OnceLock::new(),
            coeffs: cell,
        })
    }

    pub(crate) fn from_values_unchecked(grid: &Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self::from_values(grid, values).expect("length checked by caller")
    }

    pub(crate) fn from_coeffs_unchecked(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self::from_coeffs(grid, coeffs).expect("length checked by caller")
    }

    /// Wraps coefficients the caller knows to be conjugate-symmetric.
    pub(crate) fn from_coeffs_hermitian(grid: &Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        let cell = OnceLock::new();
        let _ = cell.set(Arc::new(coeffs));
        Self {
            grid: grid.clone(),
            values: OnceLock::new(),
            coeffs: cell,
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x1, x2) = grid.point(idx);
                f(x1, x2)
            })
            .collect();
        Self::from_values_unchecked(grid, values)
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: &Grid, c: f64) -> Self {
        Self::from_values_unchecked(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        self.values
            .get_or_init(|| {
                let coeffs = self.coeffs.get().expect("field holds neither representation");
                Arc::new(self.grid.inverse(coeffs))
            })
            .as_slice()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs
            .get_or_init(|| {
                let values = self.values.get().expect("field holds neither representation");
                let mut c = self.grid.forward(values);
                hermitian_symmetrize(&self.grid, &mut c);
                Arc::new(c)
            })
            .as_slice()
    }

    pub fn has_values(&self) -> bool {
        self.values.get().is_some()
    }

    pub fn has_coeffs(&self) -> bool {
        self.coeffs.get().is_some()
    }

    /// Applies a Fourier multiplier given as a function of the physical
    /// wavenumber ξ.
    pub fn apply_symbol(&self, symbol: impl Fn(f64, f64) -> Complex64) -> Self {
        let coeffs = self.coeffs();
        let out = coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| {
                let (x1, x2) = self.grid.xi(idx);
                c * symbol(x1, x2)
            })
            .collect();
        Self::from_coeffs_unchecked(&self.grid, out)
    }

    /// Applies a real multiplier tabulated on the lattice. The table must be
    /// even under k ↦ −k on the index lattice, as radial tables are.
    pub fn apply_table(&self, table: &[f64]) -> Self {
        debug_assert_eq!(table.len(), self.grid.len());
        let out = self.coeffs().iter().zip(table).map(|(&c, &m)| c * m).collect();
        Self::from_coeffs_hermitian(&self.grid, out)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_values_unchecked(&self.grid, self.values().iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, a: f64) -> Self {
        self.lincomb_with(&[(a, self)])
    }

    /// Σ aᵢ fᵢ; works in coefficient space when every term already has
    /// coefficients, otherwise in real space.
    pub fn lincomb(terms: &[(f64, &ScalarField)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::Precondition("empty linear combination".into()))?;
        for (_, f) in terms {
            check_same_grid(first.1, f)?;
        }
        Ok(first.1.lincomb_with(terms))
    }

    fn lincomb_with(&self, terms: &[(f64, &ScalarField)]) -> Self {
        let grid = &self.grid;
        if terms.iter().all(|(_, f)| f.has_coeffs()) {
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            for (a, f) in terms {
                for (o, c) in out.iter_mut().zip(f.coeffs()) {
                    *o += c * *a;
                }
            }
            Self::from_coeffs_hermitian(grid, out)
        } else {
            let mut out = vec![0.0; grid.len()];
            for (a, f) in terms {
                for (o, v) in out.iter_mut().zip(f.values()) {
                    *o += a * v;
                }
            }
            Self::from_values_unchecked(grid, out)
        }
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        Self::lincomb(&[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        Self::lincomb(&[(1.0, self), (-1.0, other)])
    }

    /// Pointwise product on the collocation lattice (no dealiasing).
    pub fn pointwise_mul(&self, other: &ScalarField) -> Result<Self> {
        check_same_grid(self, other)?;
        let out = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self::from_values_unchecked(&self.grid, out))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Quadrature L² norm over the periodic cell.
    pub fn l2_norm(&self) -> f64 {
        (self.values().iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    /// L² norm evaluated from coefficients via Parseval.
    pub fn l2_norm_spectral(&self) -> f64 {
        let area = self.grid.length() * self.grid.length();
        (self.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * area).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.coeffs()[0].re
    }

    /// ∫ f g over the periodic cell.
    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        check_same_grid(self, other)?;
        let area = self.grid.length() * self.grid.length();
        if self.has_coeffs() && other.has_coeffs() {
            Ok(self
                .coeffs()
                .iter()
                .zip(other.coeffs())
                .map(|(a, b)| (a * b.conj()).re)
                .sum::<f64>()
                * area)
        } else {
            Ok(self
                .values()
                .iter()
                .zip(other.values())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                * self.grid.cell_area())
        }
    }

    /// Max pointwise |f − g|.
    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64> {
        check_same_grid(self, other)?;
        Ok(self
            .values()
            .iter()
            .zip(other.values())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Σ |f̂(k)|, an upper bound for the sup norm that needs no transform.
    pub fn coeff_l1(&self) -> f64 {
        self.coeffs().iter().map(|c| c.norm()).sum()
    }

    pub fn is_finite(&self) -> bool {
        if let Some(v) = self.values.get() {
            v.iter().all(|x| x.is_finite())
        } else {
            self.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite())
        }
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("has_values", &self.has_values())
            .field("has_coeffs", &self.has_coeffs())
            .finish()
    }
}

pub(crate) fn check_same_grid(a: &ScalarField, b: &ScalarField) -> Result<()> {
    if a.grid.same_as(&b.grid) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!("{:?} vs {:?}", a.grid, b.grid)))
    }
}

fn hermitian_symmetrize(grid: &Grid, coeffs: &mut [Complex64]) {
    let n = grid.n();
    // rows i1 and (n − i1) mod n mirror each other
    for i1 in 0..=n / 2 {
        let r1 = (n - i1) % n;
        for i2 in 0..n {
            let r2 = (n - i2) % n;
            let (a, b) = (i1 * n + i2, r1 * n + r2);
            if a == b {
                coeffs[a].im = 0.0;
            } else if i1 != r1 || i2 < r2 {
                let avg = (coeffs[a] + coeffs[b].conj()) * 0.5;
                coeffs[a] = avg;
                coeffs[b] = avg.conj();
            }
        }
    }
}

/// Two-component vector field on a shared grid.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: [ScalarField; 2],
}

impl VectorField {
    pub fn new(c1: ScalarField, c2: ScalarField) -> Result<Self> {
        check_same_grid(&c1, &c2)?;
        Ok(Self { components: [c1, c2] })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            components: [ScalarField::zeros(grid), ScalarField::zeros(grid)],
        }
    }

    pub fn constant(grid: &Grid, c: [f64; 2]) -> Self {
        Self {
            components: [ScalarField::constant(grid, c[0]), ScalarField::constant(grid, c[1])],
        }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        Self {
            components: [
                ScalarField::from_fn(grid, |x, y| f(x, y)[0]),
                ScalarField::from_fn(grid, |x, y| f(x, y)[1]),
            ],
        }
    }

    pub fn grid(&self) -> &Grid {
        self.components[0].grid()
    }

    pub fn components(&self) -> &[ScalarField; 2] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &ScalarField {
        &self.components[a]
    }

    pub fn into_components(self) -> [ScalarField; 2] {
        self.components
    }

    pub fn map(&self, f: impl Fn(&ScalarField) -> ScalarField) -> Self {
        Self {
            components: [f(&self.components[0]), f(&self.components[1])],
        }
    }

    pub fn lincomb(terms: &[(f64, &VectorField)]) -> Result<Self> {
        let c = |a: usize| {
            let t: Vec<(f64, &ScalarField)> =
                terms.iter().map(|(w, v)| (*w, &v.components[a])).collect();
            ScalarField::lincomb(&t)
        };
        Ok(Self {
            components: [c(0)?, c(1)?],
        })
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        Self::lincomb(&[(1.0, self), (1.0, other)])
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        Self::lincomb(&[(1.0, self), (-1.0, other)])
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|c| c.scale(a))
    }

    /// Max over points and components of |fₐ(x)|.
    pub fn sup_norm(&self) -> f64 {
        self.components[0].sup_norm().max(self.components[1].sup_norm())
    }

    /// L² norm of the Euclidean magnitude.
    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &VectorField) -> Result<f64> {
        Ok(self.components[0].inner(&other.components[0])?
            + self.components[1].inner(&other.components[1])?)
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> Result<f64> {
        Ok(self.components[0]
            .max_abs_diff(&other.components[0])?
            .max(self.components[1].max_abs_diff(&other.components[1])?))
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(ScalarField::is_finite)
    }
}
