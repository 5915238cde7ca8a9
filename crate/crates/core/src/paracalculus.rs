//! Leray projection, Biot-Savart, Bony paraproducts and commutators.
//!
//! Block sums run over the finite range j ∈ {−1, …, j_max}. With
//! Sⱼ₋₁ = Σ_{k ≤ j−2} Δₖ the decomposition uv = T_u v + T_v u + R(u, v)
//! is exact on the lattice when
//!
//! * T_u v = Σ_{j ≥ 1} Sⱼ₋₁u · Δⱼv, and
//! * R(u, v) = Σⱼ Σ_{|k−j| ≤ 1} Δⱼu · Δₖv with both indices in range.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::littlewood_paley::{all_blocks, chi, DyadicPartition};
use crate::spectral::ops::{
    advect_scalar, advect_vector, dealias, divergence_bound, partial, require_solenoidal,
};
use crate::spectral::{ScalarField, VectorField};

/// Pf with (Pf)ₐ = fₐ − ξₐ(ξ·f̂)/|ξ|²; the mean mode is left unchanged.
pub fn leray_project(f: &VectorField) -> VectorField {
    leray_project_with_sign(f, 1.0)
}

/// Leray-type symbol with an adjustable sign on the gradient part; only
/// `sign = 1` is a projector. Exposed so verification can run mutants.
pub fn leray_project_with_sign(f: &VectorField, sign: f64) -> VectorField {
    let grid = f.grid();
    let [f1, f2] = f.components();
    let (c1, c2) = (f1.coeffs(), f2.coeffs());
    let mut o1 = Vec::with_capacity(grid.len());
    let mut o2 = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let (x1, x2) = grid.xi(idx);
        let k2 = x1 * x1 + x2 * x2;
        if k2 == 0.0 {
            o1.push(c1[idx]);
            o2.push(c2[idx]);
            continue;
        }
        let dot = (c1[idx] * x1 + c2[idx] * x2) / k2;
        o1.push(c1[idx] - dot * (sign * x1));
        o2.push(c2[idx] - dot * (sign * x2));
    }
    VectorField::new(
        ScalarField::from_coeffs_unchecked(grid, o1),
        ScalarField::from_coeffs_unchecked(grid, o2),
    )
    .expect("same grid")
}

/// ∂₁f₂ − ∂₂f₁.
pub fn curl2d(f: &VectorField) -> ScalarField {
    let grid = f.grid();
    let [f1, f2] = f.components();
    let out = f1
        .coeffs()
        .iter()
        .zip(f2.coeffs())
        .enumerate()
        .map(|(idx, (&a, &b))| {
            let (x1, x2) = grid.xi(idx);
            Complex64::new(0.0, 1.0) * (b * x1 - a * x2)
        })
        .collect();
    ScalarField::from_coeffs_unchecked(grid, out)
}

/// v = −∇^⊥(−Δ)^{-1}Ω = (∂₂ψ, −∂₁ψ) with ψ = (−Δ)^{-1}Ω; the mean of Ω
/// is discarded.
pub fn biot_savart(omega: &ScalarField) -> VectorField {
    let psi = omega.apply_symbol(|x1, x2| {
        let k2 = x1 * x1 + x2 * x2;
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(1.0 / k2, 0.0)
        }
    });
    VectorField::new(partial(&psi, 1), partial(&psi, 0).scale(-1.0)).expect("same grid")
}

fn low_cutoff_table(part: &DyadicPartition, j: i32) -> Vec<f64> {
    let s = 2f64.powi(-j);
    part.radii().iter().map(|&r| chi(s * r)).collect()
}

fn accumulate(acc: &mut [f64], a: &ScalarField, b: &ScalarField) {
    for ((o, x), y) in acc.iter_mut().zip(a.values()).zip(b.values()) {
        *o += x * y;
    }
}

fn check_pair(u: &ScalarField, v: &ScalarField, part: &DyadicPartition) -> Result<()> {
    if !u.grid().same_as(v.grid()) || !u.grid().same_as(part.grid()) {
        return Err(Error::GridMismatch("paraproduct operands on different grids".into()));
    }
    Ok(())
}

/// T_u(v) = Σ_{j ≥ 1} Sⱼ₋₁u · Δⱼv, dealiased.
pub fn paraproduct(u: &ScalarField, v: &ScalarField, part: &DyadicPartition) -> Result<ScalarField> {
    check_pair(u, v, part)?;
    let grid = u.grid();
    let mut acc = vec![0.0; grid.len()];
    for j in 1..=part.j_max() {
        let low = u.apply_table(&low_cutoff_table(part, j - 1));
        let high = v.apply_table(part.block_table(j)?);
        accumulate(&mut acc, &low, &high);
    }
    Ok(dealias(&ScalarField::from_values(grid, acc)?))
}

/// R(u, v) = Σⱼ Σ_{|k−j| ≤ 1} Δⱼu · Δₖv, dealiased.
pub fn remainder(u: &ScalarField, v: &ScalarField, part: &DyadicPartition) -> Result<ScalarField> {
    check_pair(u, v, part)?;
    let bu = all_blocks(u, part)?;
    let bv = all_blocks(v, part)?;
    let mut acc = vec![0.0; u.grid().len()];
    let last = bu.len() - 1;
    for j in 0..=last {
        for k in j.saturating_sub(1)..=(j + 1).min(last) {
            accumulate(&mut acc, &bu[j], &bv[k]);
        }
    }
    Ok(dealias(&ScalarField::from_values(u.grid(), acc)?))
}

/// Outcome of checking uv = T_u v + T_v u + R(u, v).
#[derive(Clone, Debug, PartialEq)]
pub struct BonyReport {
    /// max pointwise |uv − T_u v − T_v u − R(u, v)|.
    pub residual: f64,
    /// sup |uv|, for relative comparisons.
    pub product_sup: f64,
}

fn is_dealiased(f: &ScalarField) -> bool {
    let mask = f.grid().dealias_mask();
    let outside: f64 = f
        .coeffs()
        .iter()
        .zip(mask)
        .filter(|(_, &keep)| !keep)
        .map(|(c, _)| c.norm())
        .sum();
    outside <= 1e-12 * (1.0 + f.coeff_l1())
}

pub fn bony_reconstruct(u: &ScalarField, v: &ScalarField, part: &DyadicPartition) -> Result<BonyReport> {
    if !is_dealiased(u) || !is_dealiased(v) {
        return Err(Error::Precondition("Bony reconstruction expects dealiased inputs".into()));
    }
    let uv = dealias(&u.pointwise_mul(v)?);
    let tuv = paraproduct(u, v, part)?;
    let tvu = paraproduct(v, u, part)?;
    let r = remainder(u, v, part)?;
    let recon = ScalarField::lincomb(&[(1.0, &tuv), (1.0, &tvu), (1.0, &r)])?;
    Ok(BonyReport {
        residual: uv.max_abs_diff(&recon)?,
        product_sup: uv.sup_norm(),
    })
}

/// [v·∇, Δⱼ]f = (v·∇)Δⱼf − Δⱼ((v·∇)f), dealiased.
pub fn commutator_block(
    v: &VectorField,
    f: &ScalarField,
    j: i32,
    part: &DyadicPartition,
) -> Result<ScalarField> {
    require_solenoidal(v, "transport field")?;
    let table = part.block_table(j)?;
    let first = advect_scalar(v, &f.apply_table(table), true)?;
    let second = advect_scalar(v, f, true)?.apply_table(table);
    first.sub(&second)
}

/// Fourier multipliers smooth away from the origin and homogeneous there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HomogeneousSymbol {
    /// κ ≡ 1.
    Identity,
    /// i ξₐ / |ξ|.
    Riesz(usize),
    /// δₐᵦ − ξₐξᵦ/|ξ|², one entry of the Leray symbol.
    Leray(usize, usize),
    /// i ξₐ.
    Derivative(usize),
    /// |ξ|^m.
    AbsPower(f64),
}

impl HomogeneousSymbol {
    pub fn degree(&self) -> f64 {
        match *self {
            Self::Identity | Self::Riesz(_) | Self::Leray(..) => 0.0,
            Self::Derivative(_) => 1.0,
            Self::AbsPower(m) => m,
        }
    }

    /// Parses `identity`, `riesz1`, `riesz2`, `leray11`…`leray22`, `d1`, `d2`
    /// or `abs:<m>` with |m| ≤ 4.
    pub fn parse(name: &str) -> Result<Self> {
        let axis = |c: u8| match c {
            b'1' => Ok(0usize),
            b'2' => Ok(1usize),
            _ => Err(Error::Config(format!("unsupported multiplier symbol '{name}'"))),
        };
        let bytes = name.as_bytes();
        match name {
            "identity" => Ok(Self::Identity),
            _ if name.starts_with("abs:") => {
                let m: f64 = name[4..]
                    .parse()
                    .map_err(|_| Error::Config(format!("bad degree in '{name}'")))?;
                Self::AbsPower(m).validated()
            }
            _ if name.len() == 6 && name.starts_with("riesz") => Ok(Self::Riesz(axis(bytes[5])?)),
            _ if name.len() == 7 && name.starts_with("leray") => {
                Ok(Self::Leray(axis(bytes[5])?, axis(bytes[6])?))
            }
            _ if name.len() == 2 && name.starts_with('d') => Ok(Self::Derivative(axis(bytes[1])?)),
            _ => Err(Error::Config(format!("unsupported multiplier symbol '{name}'"))),
        }
    }

    pub fn validated(self) -> Result<Self> {
        let ok = match self {
            Self::Identity => true,
            Self::Riesz(a) | Self::Derivative(a) => a < 2,
            Self::Leray(a, b) => a < 2 && b < 2,
            Self::AbsPower(m) => m.is_finite() && m.abs() <= 4.0,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Config(format!("unsupported multiplier symbol {self:?}")))
        }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> Complex64 {
        let xi = [x1, x2];
        let k2 = x1 * x1 + x2 * x2;
        match *self {
            Self::Identity => Complex64::new(1.0, 0.0),
            _ if k2 == 0.0 => Complex64::new(0.0, 0.0),
            Self::Riesz(a) => Complex64::new(0.0, xi[a] / k2.sqrt()),
            Self::Leray(a, b) => {
                let delta = if a == b { 1.0 } else { 0.0 };
                Complex64::new(delta - xi[a] * xi[b] / k2, 0.0)
            }
            Self::Derivative(a) => Complex64::new(0.0, xi[a]),
            Self::AbsPower(m) => Complex64::new(k2.sqrt().powf(m), 0.0),
        }
    }

    pub fn apply(&self, f: &ScalarField) -> ScalarField {
        f.apply_symbol(|x1, x2| self.eval(x1, x2))
    }
}

/// [T_{vₐ}, κ(D)]f for each component vₐ of v.
pub fn commutator_para_multiplier(
    v: &VectorField,
    f: &ScalarField,
    symbol: HomogeneousSymbol,
    part: &DyadicPartition,
) -> Result<VectorField> {
    let symbol = symbol.validated()?;
    let kf = symbol.apply(f);
    let comp = |c: &ScalarField| -> Result<ScalarField> {
        let a = paraproduct(c, &kf, part)?;
        let b = symbol.apply(&paraproduct(c, f, part)?);
        a.sub(&b)
    };
    VectorField::new(comp(v.component(0))?, comp(v.component(1))?)
}

/// [f·∇, P]g = (f·∇)Pg − P((f·∇)g) for solenoidal f, g.
pub fn commutator_leray(f: &VectorField, g: &VectorField) -> Result<VectorField> {
    require_solenoidal(f, "f")?;
    require_solenoidal(g, "g")?;
    let first = advect_vector(f, &leray_project(g), true)?;
    let second = leray_project(&advect_vector(f, g, true)?);
    first.sub(&second)
}

/// sup-norm of div, evaluated in real space.
pub fn divergence_sup(f: &VectorField) -> f64 {
    crate::spectral::ops::divergence(f).sup_norm()
}

/// Cheap spectral bound on sup |div f|.
pub fn divergence_spectral_bound(f: &VectorField) -> f64 {
    divergence_bound(f)
}

pub mod estimates {
    //! Bounded-ratio measurements for the paraproduct and commutator
    //! estimates. Every suite draws the same continuum fields on every grid
    //! (band radius fixed), so constants are comparable across resolutions.

    use super::*;
    use crate::littlewood_paley::{besov_norm, besov_norm_multi, besov_norm_vector, BesovSpec};
    use crate::spectral::ops::jacobian;
    use crate::spectral::{random, Grid};

    /// Band radius shared by every random suite.
    pub const SUITE_BAND: i64 = 8;

    #[derive(Clone, Debug, PartialEq)]
    pub struct RatioEstimate {
        pub n: usize,
        pub samples: usize,
        /// Largest observed ratio: the empirical constant.
        pub constant: f64,
        pub min_ratio: f64,
    }

    impl RatioEstimate {
        fn new(n: usize) -> Self {
            Self {
                n,
                samples: 0,
                constant: 0.0,
                min_ratio: f64::INFINITY,
            }
        }

        fn push(&mut self, ratio: f64) {
            self.samples += 1;
            self.constant = self.constant.max(ratio);
            self.min_ratio = self.min_ratio.min(ratio);
        }

        pub fn is_finite(&self) -> bool {
            self.samples > 0 && self.constant.is_finite()
        }
    }

    fn jacobian_sup(v: &VectorField) -> f64 {
        jacobian(v)
            .iter()
            .flatten()
            .map(ScalarField::sup_norm)
            .fold(0.0, f64::max)
    }

    fn setup(n: usize) -> Result<(Grid, DyadicPartition)> {
        let grid = Grid::periodic(n)?;
        let part = DyadicPartition::new(&grid);
        Ok((grid, part))
    }

    fn scalar(grid: &Grid, seed: u64) -> Result<ScalarField> {
        random::band_limited(grid, SUITE_BAND, 1.0, seed)
    }

    fn vector(grid: &Grid, seed: u64) -> Result<VectorField> {
        random::solenoidal(grid, SUITE_BAND, 2.0, seed)
    }

    /// ‖T_u v‖_{B¹∞,1} / (‖u‖∞ ‖v‖_{B¹∞,1}).
    pub fn paraproduct_constant(n: usize, samples: usize, seed: u64) -> Result<RatioEstimate> {
        let (grid, part) = setup(n)?;
        let spec = BesovSpec::inf_one(1.0);
        let mut est = RatioEstimate::new(n);
        for s in 0..samples as u64 {
            let u = scalar(&grid, seed + 2 * s)?;
            let v = scalar(&grid, seed + 2 * s + 1)?;
            let t = paraproduct(&u, &v, &part)?;
            est.push(besov_norm(&t, spec, &part)? / (u.sup_norm() * besov_norm(&v, spec, &part)?));
        }
        Ok(est)
    }

    /// Σⱼ 2^j‖[v·∇, Δⱼ]f‖∞ / (‖∇v‖∞‖f‖_{B¹∞,1} + ‖∇v‖_{B⁰∞,1}‖∇f‖∞).
    pub fn transport_commutator_constant(n: usize, samples: usize, seed: u64) -> Result<RatioEstimate> {
        let (grid, part) = setup(n)?;
        let mut est = RatioEstimate::new(n);
        for s in 0..samples as u64 {
            let v = vector(&grid, seed + 2 * s)?;
            let f = scalar(&grid, seed + 2 * s + 1)?;
            let mut lhs = 0.0;
            for j in part.block_indices() {
                lhs += 2f64.powi(j) * commutator_block(&v, &f, j, &part)?.sup_norm();
            }
            let jac = jacobian(&v);
            let jac_refs: Vec<&ScalarField> = jac.iter().flatten().collect();
            let grad_f = crate::spectral::ops::gradient(&f);
            let rhs = jacobian_sup(&v) * besov_norm(&f, BesovSpec::inf_one(1.0), &part)?
                + besov_norm_multi(&jac_refs, BesovSpec::inf_one(0.0), &part)? * grad_f.sup_norm();
            est.push(lhs / rhs);
        }
        Ok(est)
    }

    /// ‖[T_v, κ(D)]f‖_{B^{s−m+1}∞,1} / (‖∇v‖∞ ‖f‖_{B^s∞,1}) with s = 1.
    pub fn para_multiplier_constant(
        n: usize,
        samples: usize,
        seed: u64,
        symbol: HomogeneousSymbol,
    ) -> Result<RatioEstimate> {
        let (grid, part) = setup(n)?;
        let s_reg = 1.0;
        let mut est = RatioEstimate::new(n);
        for s in 0..samples as u64 {
            let v = vector(&grid, seed + 2 * s)?;
            let f = scalar(&grid, seed + 2 * s + 1)?;
            let c = commutator_para_multiplier(&v, &f, symbol, &part)?;
            let lhs = besov_norm_vector(&c, BesovSpec::inf_one(s_reg - symbol.degree() + 1.0), &part)?;
            let rhs = jacobian_sup(&v) * besov_norm(&f, BesovSpec::inf_one(s_reg), &part)?;
            est.push(lhs / rhs);
        }
        Ok(est)
    }

    /// ‖[f·∇, P]g‖_{B¹∞,1} / (‖f‖_{B¹∞,1} ‖g‖_{B¹∞,1}).
    pub fn leray_commutator_constant(n: usize, samples: usize, seed: u64) -> Result<RatioEstimate> {
        let (grid, part) = setup(n)?;
        let b1 = BesovSpec::inf_one(1.0);
        let mut est = RatioEstimate::new(n);
        for s in 0..samples as u64 {
            let f = vector(&grid, seed + 2 * s)?;
            let g = vector(&grid, seed + 2 * s + 1)?;
            let c = commutator_leray(&f, &g)?;
            est.push(
                besov_norm_vector(&c, b1, &part)?
                    / (besov_norm_vector(&f, b1, &part)? * besov_norm_vector(&g, b1, &part)?),
            );
        }
        Ok(est)
    }

    /// ‖P(f·∇)v‖_{B¹∞,1} / (‖f‖_{B¹∞,1} ‖v‖_{B²∞,1}).
    pub fn projected_transport_constant(n: usize, samples: usize, seed: u64) -> Result<RatioEstimate> {
        let (grid, part) = setup(n)?;
        let b1 = BesovSpec::inf_one(1.0);
        let b2 = BesovSpec::inf_one(2.0);
        let mut est = RatioEstimate::new(n);
        for s in 0..samples as u64 {
            let f = vector(&grid, seed + 2 * s)?;
            let v = vector(&grid, seed + 2 * s + 1)?;
            let p = leray_project(&advect_vector(&f, &v, true)?);
            est.push(
                besov_norm_vector(&p, b1, &part)?
                    / (besov_norm_vector(&f, b1, &part)? * besov_norm_vector(&v, b2, &part)?),
            );
        }
        Ok(est)
    }

    /// Ratio of constants between two resolutions, fine over coarse.
    pub fn growth(coarse: &RatioEstimate, fine: &RatioEstimate) -> f64 {
        fine.constant / coarse.constant
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::{divergence, gradient, is_solenoidal, jacobian};
    use crate::spectral::{random, Grid};

    fn setup(n: usize) -> (Grid, DyadicPartition) {
        let g = Grid::periodic(n).unwrap();
        let p = DyadicPartition::new(&g);
        (g, p)
    }

    #[test]
    fn leray_kills_gradients() {
        let (g, _) = setup(32);
        let phi = random::band_limited(&g, 8, 1.0, 1).unwrap();
        let p = leray_project(&gradient(&phi));
        assert!(p.sup_norm() <= 1e-12);
    }

    #[test]
    fn leray_fixes_solenoidal_fields() {
        let (g, _) = setup(32);
        let v = random::solenoidal(&g, 8, 1.0, 2).unwrap();
        assert!(leray_project(&v).max_abs_diff(&v).unwrap() <= 1e-12);
    }

    #[test]
    fn leray_is_idempotent_projection() {
        let (g, _) = setup(32);
        let f = VectorField::new(
            random::band_limited(&g, 10, 0.5, 3).unwrap(),
            random::band_limited(&g, 10, 0.5, 4).unwrap(),
        )
        .unwrap();
        let p = leray_project(&f);
        assert!(divergence(&p).sup_norm() <= 1e-10);
        assert!(leray_project(&p).max_abs_diff(&p).unwrap() <= 1e-12);
        // mean mode untouched
        let c = VectorField::constant(&g, [1.5, -0.5]);
        assert!(leray_project(&c).max_abs_diff(&c).unwrap() < 1e-14);
    }

    #[test]
    fn sign_mutant_is_not_idempotent() {
        let (g, _) = setup(32);
        let f = VectorField::new(
            random::band_limited(&g, 6, 0.5, 3).unwrap(),
            random::band_limited(&g, 6, 0.5, 4).unwrap(),
        )
        .unwrap();
        let p = leray_project_with_sign(&f, -1.0);
        let pp = leray_project_with_sign(&p, -1.0);
        assert!(pp.max_abs_diff(&p).unwrap() > 1e-3);
    }

    #[test]
    fn curl_examples() {
        let (g, _) = setup(32);
        let phi = random::band_limited(&g, 8, 1.0, 5).unwrap();
        assert!(curl2d(&gradient(&phi)).sup_norm() <= 1e-12);
        let f = VectorField::from_fn(&g, |_, y| [-y.sin(), 0.0]);
        let expected = ScalarField::from_fn(&g, |_, y| y.cos());
        assert!(curl2d(&f).max_abs_diff(&expected).unwrap() < 1e-13);
    }

    #[test]
    fn biot_savart_examples() {
        let (g, _) = setup(32);
        assert!(biot_savart(&ScalarField::zeros(&g)).sup_norm() == 0.0);
        let omega = ScalarField::from_fn(&g, |x, _| x.cos());
        let v = biot_savart(&omega);
        let expected = VectorField::from_fn(&g, |x, _| [0.0, x.sin()]);
        assert!(v.max_abs_diff(&expected).unwrap() < 1e-13);
        assert!(curl2d(&v).max_abs_diff(&omega).unwrap() < 1e-13);
        assert!(divergence(&v).sup_norm() < 1e-13);
    }

    #[test]
    fn biot_savart_inverts_curl_on_zero_mean() {
        let (g, _) = setup(64);
        let omega = random::dealiased(&g, 1.0, 6).unwrap();
        let v = biot_savart(&omega);
        assert!(curl2d(&v).max_abs_diff(&omega).unwrap() <= 1e-10);
        // mean is projected out
        let shifted = omega.add(&ScalarField::constant(&g, 2.0)).unwrap();
        let w = curl2d(&biot_savart(&shifted));
        assert!(w.max_abs_diff(&omega).unwrap() <= 1e-10);
    }

    #[test]
    fn bony_identity_examples() {
        let (g, p) = setup(64);
        let c = ScalarField::constant(&g, 1.25);
        let rep = bony_reconstruct(&c, &c, &p).unwrap();
        assert!(rep.residual <= 1e-13);
        let u = ScalarField::from_fn(&g, |x, y| (3.0 * x + y).cos());
        let v = ScalarField::from_fn(&g, |_, y| (5.0 * y).sin());
        assert!(bony_reconstruct(&u, &v, &p).unwrap().residual <= 1e-10);
        // constant factor: T_c v + T_v c + R(c, v) = c v
        let w = random::dealiased(&g, 1.0, 8).unwrap();
        assert!(bony_reconstruct(&c, &w, &p).unwrap().residual <= 1e-12);
    }

    #[test]
    fn bony_rejects_aliased_input() {
        let (g, p) = setup(32);
        let high = ScalarField::from_fn(&g, |x, _| (15.0 * x).cos());
        assert!(matches!(bony_reconstruct(&high, &high, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn paraproduct_low_high_pair() {
        let (g, p) = setup(64);
        let u = ScalarField::from_fn(&g, |x, _| x.cos());
        let v = ScalarField::from_fn(&g, |x, _| (8.0 * x).cos());
        let t = paraproduct(&u, &v, &p).unwrap();
        let uv = u.pointwise_mul(&v).unwrap();
        let tail = paraproduct(&v, &u, &p)
            .unwrap()
            .add(&remainder(&u, &v, &p).unwrap())
            .unwrap();
        let recon = t.add(&tail).unwrap();
        assert!(recon.max_abs_diff(&uv).unwrap() <= 1e-12);
        // frequency 1 is far below frequency 8, so the low-high part carries the product
        assert!(t.max_abs_diff(&uv).unwrap() <= 1e-12);
    }

    #[test]
    fn remainder_is_symmetric() {
        let (g, p) = setup(64);
        let u = random::dealiased(&g, 1.0, 10).unwrap();
        let v = random::dealiased(&g, 1.0, 11).unwrap();
        let a = remainder(&u, &v, &p).unwrap();
        let b = remainder(&v, &u, &p).unwrap();
        assert!(a.max_abs_diff(&b).unwrap() <= 1e-12);
        assert!(a.sup_norm().is_finite());
    }

    #[test]
    fn constant_transport_commutes_with_blocks() {
        let (g, p) = setup(32);
        let v = VectorField::constant(&g, [0.7, -1.3]);
        let f = random::dealiased(&g, 1.0, 12).unwrap();
        for j in p.block_indices() {
            assert!(commutator_block(&v, &f, j, &p).unwrap().sup_norm() <= 1e-12);
        }
    }

    #[test]
    fn commutator_block_requires_solenoidal_field() {
        let (g, p) = setup(32);
        let v = VectorField::from_fn(&g, |x, _| [x.sin(), 0.0]);
        let f = ScalarField::zeros(&g);
        assert!(matches!(commutator_block(&v, &f, 0, &p), Err(Error::Precondition(_))));
    }

    #[test]
    fn para_multiplier_commutator_trivial_cases() {
        let (g, p) = setup(32);
        let f = random::dealiased(&g, 1.0, 13).unwrap();
        let v = random::solenoidal(&g, 6, 1.0, 14).unwrap();
        let id = commutator_para_multiplier(&v, &f, HomogeneousSymbol::Identity, &p).unwrap();
        assert!(id.sup_norm() == 0.0 || id.sup_norm() <= 1e-14);
        let c = VectorField::constant(&g, [2.0, -1.0]);
        for sym in [
            HomogeneousSymbol::Riesz(0),
            HomogeneousSymbol::Leray(0, 1),
            HomogeneousSymbol::AbsPower(1.0),
        ] {
            let r = commutator_para_multiplier(&c, &f, sym, &p).unwrap();
            assert!(r.sup_norm() <= 1e-12, "{sym:?}");
        }
    }

    #[test]
    fn symbol_parsing() {
        assert_eq!(HomogeneousSymbol::parse("riesz2").unwrap(), HomogeneousSymbol::Riesz(1));
        assert_eq!(HomogeneousSymbol::parse("leray12").unwrap(), HomogeneousSymbol::Leray(0, 1));
        assert_eq!(HomogeneousSymbol::parse("abs:-1").unwrap(), HomogeneousSymbol::AbsPower(-1.0));
        assert_eq!(HomogeneousSymbol::parse("d1").unwrap(), HomogeneousSymbol::Derivative(0));
        for bad in ["riesz3", "abs:9", "abs:x", "laplace", "leray13"] {
            assert!(matches!(HomogeneousSymbol::parse(bad), Err(Error::Config(_))), "{bad}");
        }
        assert_eq!(HomogeneousSymbol::AbsPower(2.0).degree(), 2.0);
    }

    #[test]
    fn leray_commutator_examples() {
        let (g, _) = setup(32);
        let c = VectorField::constant(&g, [0.3, 0.8]);
        let v = random::solenoidal(&g, 6, 1.0, 15).unwrap();
        assert!(commutator_leray(&c, &v).unwrap().sup_norm() <= 1e-12);
        let f = random::solenoidal(&g, 6, 1.0, 16).unwrap();
        let direct = commutator_leray(&f, &v).unwrap();
        let adv = advect_vector(&f, &v, true).unwrap();
        let complement = adv.sub(&leray_project(&adv)).unwrap();
        assert!(direct.max_abs_diff(&complement).unwrap() <= 1e-12);
        assert!(curl2d(&direct).sup_norm() <= 1e-10);
        let bad = VectorField::from_fn(&g, |x, _| [x.sin(), 0.0]);
        assert!(commutator_leray(&bad, &v).is_err());
    }

    #[test]
    fn suite_helpers_produce_finite_constants() {
        let e = estimates::paraproduct_constant(64, 2, 1).unwrap();
        assert!(e.is_finite() && e.constant > 0.0);
        let v = random::solenoidal(&Grid::periodic(32).unwrap(), 4, 1.0, 1).unwrap();
        assert!(is_solenoidal(&v));
        assert_eq!(jacobian(&v).len(), 2);
    }
}
