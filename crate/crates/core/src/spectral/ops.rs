use num_complex::Complex64;

use super::field::{check_same_grid, ScalarField, VectorField};
use crate::error::{Error, Result};

pub const MAX_DERIVATIVE_ORDER: u32 = 4;

/// ∂ₐ^order f, computed as (i ξₐ)^order f̂.
pub fn spectral_derivative(f: &ScalarField, axis: usize, order: u32) -> Result<ScalarField> {
    if !(1..=2).contains(&axis) {
        return Err(Error::Config(format!("axis must be 1 or 2, got {axis}")));
    }
    if order == 0 || order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Config(format!(
            "derivative order must be in 1..={MAX_DERIVATIVE_ORDER}, got {order}"
        )));
    }
    Ok(derivative(f, axis - 1, order))
}

/// Zero-based axis variant used internally.
pub(crate) fn derivative(f: &ScalarField, axis: usize, order: u32) -> ScalarField {
    f.apply_symbol(|x1, x2| {
        let k = if axis == 0 { x1 } else { x2 };
        Complex64::new(0.0, k).powu(order)
    })
}

pub fn partial(f: &ScalarField, axis: usize) -> ScalarField {
    derivative(f, axis, 1)
}

/// Returns g with ĝ(k) = −f̂(k)/|ξ|² and ĝ(0) = 0, so that Δg = f − mean(f).
pub fn invert_laplacian(f: &ScalarField) -> ScalarField {
    f.apply_symbol(|x1, x2| {
        let k2 = x1 * x1 + x2 * x2;
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(-1.0 / k2, 0.0)
        }
    })
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.apply_symbol(|x1, x2| Complex64::new(-(x1 * x1 + x2 * x2), 0.0))
}

/// Zeroes every coefficient outside the 2/3-rule mask.
pub fn dealias(f: &ScalarField) -> ScalarField {
    let mask = f.grid().dealias_mask();
    let out = f
        .coeffs()
        .iter()
        .zip(mask)
        .map(|(&c, &keep)| if keep { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    ScalarField::from_coeffs_hermitian(f.grid(), out)
}

pub fn dealias_vector(f: &VectorField) -> VectorField {
    f.map(dealias)
}

/// Quadratic product a·b on the lattice, dealiased unless disabled.
pub fn product(a: &ScalarField, b: &ScalarField, dealiased: bool) -> Result<ScalarField> {
    let p = a.pointwise_mul(b)?;
    Ok(if dealiased { dealias(&p) } else { p })
}

/// Gradient of a scalar: (∂₁f, ∂₂f).
pub fn gradient(f: &ScalarField) -> VectorField {
    VectorField::new(partial(f, 0), partial(f, 1)).expect("same grid")
}

/// Jacobian entries `[a][k] = ∂ₖ fₐ`.
pub fn jacobian(f: &VectorField) -> [[ScalarField; 2]; 2] {
    let [f1, f2] = f.components();
    [[partial(f1, 0), partial(f1, 1)], [partial(f2, 0), partial(f2, 1)]]
}

pub fn divergence(f: &VectorField) -> ScalarField {
    let [f1, f2] = f.components();
    let grid = f.grid();
    let out = f1
        .coeffs()
        .iter()
        .zip(f2.coeffs())
        .enumerate()
        .map(|(idx, (&a, &b))| {
            let (x1, x2) = grid.xi(idx);
            Complex64::new(0.0, 1.0) * (a * x1 + b * x2)
        })
        .collect();
    ScalarField::from_coeffs_unchecked(grid, out)
}

/// Σ_k |ξ·f̂(k)|: bounds sup |div f| without an inverse transform.
pub fn divergence_bound(f: &VectorField) -> f64 {
    let [f1, f2] = f.components();
    let grid = f.grid();
    f1.coeffs()
        .iter()
        .zip(f2.coeffs())
        .enumerate()
        .map(|(idx, (&a, &b))| {
            let (x1, x2) = grid.xi(idx);
            (a * x1 + b * x2).norm()
        })
        .sum()
}

/// Σ_k |ξ||f̂(k)|, the matching scale for [`divergence_bound`].
pub fn gradient_bound(f: &VectorField) -> f64 {
    let grid = f.grid();
    f.components()
        .iter()
        .map(|c| {
            c.coeffs()
                .iter()
                .enumerate()
                .map(|(idx, z)| {
                    let (x1, x2) = grid.xi(idx);
                    (x1 * x1 + x2 * x2).sqrt() * z.norm()
                })
                .sum::<f64>()
        })
        .sum()
}

/// Relative tolerance for solenoidality preconditions.
pub const SOLENOIDAL_TOL: f64 = 1e-9;

pub fn is_solenoidal(f: &VectorField) -> bool {
    divergence_bound(f) <= SOLENOIDAL_TOL * (1.0 + gradient_bound(f))
}

pub fn require_solenoidal(f: &VectorField, what: &str) -> Result<()> {
    if is_solenoidal(f) {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "{what} is not divergence-free (spectral bound {:.3e})",
            divergence_bound(f)
        )))
    }
}

/// Transport term (v·∇)f for a scalar f, computed as Σₖ vₖ ∂ₖf in real space.
pub fn advect_scalar(v: &VectorField, f: &ScalarField, dealiased: bool) -> Result<ScalarField> {
    check_same_grid(v.component(0), f)?;
    let g = gradient(f);
    let out = advect_values(v, g.components());
    let p = ScalarField::from_values_unchecked(f.grid(), out);
    Ok(if dealiased { dealias(&p) } else { p })
}

/// (v·∇)f componentwise for a vector f.
pub fn advect_vector(v: &VectorField, f: &VectorField, dealiased: bool) -> Result<VectorField> {
    VectorField::new(
        advect_scalar(v, f.component(0), dealiased)?,
        advect_scalar(v, f.component(1), dealiased)?,
    )
}

/// Real-space Σₖ vₖ gₖ without any transform of the result.
pub(crate) fn advect_values(v: &VectorField, grad: &[ScalarField; 2]) -> Vec<f64> {
    let v1 = v.component(0).values();
    let v2 = v.component(1).values();
    let g1 = grad[0].values();
    let g2 = grad[1].values();
    v1.iter()
        .zip(v2)
        .zip(g1.iter().zip(g2))
        .map(|((a1, a2), (b1, b2))| a1 * b1 + a2 * b2)
        .collect()
}
