//! Dyadic frequency decomposition and Besov norms.
//!
//! The radial cutoff χ equals 1 on |ξ| ≤ 1.1 and vanishes for |ξ| ≥ 1.9,
//! joined by the smooth exp(−1/t) step. Blocks are φⱼ(ξ) = χ(2^{-j-1}ξ) −
//! χ(2^{-j}ξ) for j ≥ 0 and Δ₋₁ = χ(D), so that χ + Σⱼ φⱼ telescopes to 1
//! and Sⱼ = χ(2^{-j}D) = Σ_{k ≤ j−1} Δₖ.

use crate::error::{Error, Result};
use crate::spectral::{random, Grid, ScalarField, VectorField};
use crate::spectral::ops::gradient;

pub const CHI_INNER: f64 = 1.1;
pub const CHI_OUTER: f64 = 1.9;

fn smooth_step_kernel(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Radial profile of χ at radius `r`.
pub fn chi(r: f64) -> f64 {
    if r <= CHI_INNER {
        1.0
    } else if r >= CHI_OUTER {
        0.0
    } else {
        let t = (r - CHI_INNER) / (CHI_OUTER - CHI_INNER);
        let a = smooth_step_kernel(1.0 - t);
        let b = smooth_step_kernel(t);
        a / (a + b)
    }
}

/// φⱼ at radius `r` for j ≥ 0; supported in 2^j·1.1 < r < 2^j·3.8.
pub fn phi_j(j: i32, r: f64) -> f64 {
    let s = 2f64.powi(-j);
    chi(0.5 * s * r) - chi(s * r)
}

/// Symbol of Δⱼ (j ≥ −1) at radius `r`.
pub fn block_symbol(j: i32, r: f64) -> f64 {
    if j == -1 {
        chi(r)
    } else {
        phi_j(j, r)
    }
}

/// χ and the φⱼ tabulated on a grid's frequency lattice.
#[derive(Clone, Debug)]
pub struct DyadicPartition {
    grid: Grid,
    radii: Vec<f64>,
    chi: Vec<f64>,
    phi: Vec<Vec<f64>>,
    j_max: i32,
}

impl DyadicPartition {
    pub fn new(grid: &Grid) -> Self {
        let radii: Vec<f64> = (0..grid.len())
            .map(|idx| {
                let (x1, x2) = grid.xi(idx);
                (x1 * x1 + x2 * x2).sqrt()
            })
            .collect();
        let j_max = grid.max_wavenumber().log2().ceil() as i32 + 1;
        let chi_table = radii.iter().map(|&r| chi(r)).collect();
        let phi = (0..=j_max)
            .map(|j| radii.iter().map(|&r| phi_j(j, r)).collect())
            .collect();
        Self {
            grid: grid.clone(),
            radii,
            chi: chi_table,
            phi,
            j_max,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn chi_table(&self) -> &[f64] {
        &self.chi
    }

    /// Tabulated φⱼ for 0 ≤ j ≤ j_max.
    pub fn phi_table(&self, j: i32) -> Result<&[f64]> {
        self.check_index(j, 0)?;
        Ok(&self.phi[j as usize])
    }

    /// Tabulated symbol of Δⱼ for −1 ≤ j ≤ j_max.
    pub fn block_table(&self, j: i32) -> Result<&[f64]> {
        self.check_index(j, -1)?;
        Ok(if j == -1 { &self.chi } else { &self.phi[j as usize] })
    }

    /// |ξ| at every lattice point.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// max over the lattice of |χ + Σⱼ φⱼ − 1|.
    pub fn unity_residual(&self) -> f64 {
        (0..self.grid.len())
            .map(|idx| {
                let s: f64 = self.chi[idx] + self.phi.iter().map(|p| p[idx]).sum::<f64>();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    fn check_index(&self, j: i32, min: i32) -> Result<()> {
        if j < min || j > self.j_max {
            Err(Error::Index {
                index: j,
                min,
                max: self.j_max,
            })
        } else {
            Ok(())
        }
    }

    fn check_grid(&self, f: &ScalarField) -> Result<()> {
        if self.grid.same_as(f.grid()) {
            Ok(())
        } else {
            Err(Error::GridMismatch("partition built for a different grid".into()))
        }
    }

    pub fn block_indices(&self) -> std::ops::RangeInclusive<i32> {
        -1..=self.j_max
    }
}

pub fn build_partition(grid: &Grid) -> DyadicPartition {
    DyadicPartition::new(grid)
}

/// Δⱼ f.
pub fn dyadic_block(f: &ScalarField, j: i32, part: &DyadicPartition) -> Result<ScalarField> {
    part.check_grid(f)?;
    Ok(f.apply_table(part.block_table(j)?))
}

/// Every block Δ₋₁f, …, Δ_{j_max}f, in order.
pub fn all_blocks(f: &ScalarField, part: &DyadicPartition) -> Result<Vec<ScalarField>> {
    part.check_grid(f)?;
    Ok(part
        .block_indices()
        .map(|j| f.apply_table(part.block_table(j).expect("index in range")))
        .collect())
}

/// Sⱼ f = χ(2^{-j}D) f for 0 ≤ j ≤ j_max.
pub fn low_cutoff(f: &ScalarField, j: i32, part: &DyadicPartition) -> Result<ScalarField> {
    part.check_grid(f)?;
    part.check_index(j, 0)?;
    let s = 2f64.powi(-j);
    let table: Vec<f64> = part.radii.iter().map(|&r| chi(s * r)).collect();
    Ok(f.apply_table(&table))
}

/// Implemented integrability exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lebesgue {
    Two,
    Infinity,
}

/// Implemented summation exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Summation {
    One,
    Infinity,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovSpec {
    pub s: f64,
    pub p: Lebesgue,
    pub r: Summation,
}

impl BesovSpec {
    pub const fn new(s: f64, p: Lebesgue, r: Summation) -> Self {
        Self { s, p, r }
    }

    /// B^s_{∞,1}.
    pub const fn inf_one(s: f64) -> Self {
        Self::new(s, Lebesgue::Infinity, Summation::One)
    }

    /// Builds a spec from numeric exponents; only p ∈ {2, ∞}, r ∈ {1, ∞}.
    pub fn from_exponents(s: f64, p: f64, r: f64) -> Result<Self> {
        let p = if p == 2.0 {
            Lebesgue::Two
        } else if p == f64::INFINITY {
            Lebesgue::Infinity
        } else {
            return Err(Error::Config(format!("unsupported integrability exponent p = {p}")));
        };
        let r = if r == 1.0 {
            Summation::One
        } else if r == f64::INFINITY {
            Summation::Infinity
        } else {
            return Err(Error::Config(format!("unsupported summation exponent r = {r}")));
        };
        Ok(Self { s, p, r })
    }
}

/// L^p norm of a multi-component field: the componentwise max for p = ∞
/// and the L² norm of the Euclidean magnitude for p = 2.
pub fn lebesgue_norm(components: &[&ScalarField], p: Lebesgue) -> f64 {
    match p {
        Lebesgue::Infinity => components.iter().map(|c| c.sup_norm()).fold(0.0, f64::max),
        Lebesgue::Two => components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt(),
    }
}

/// ℓ^r norm over j ∈ {−1, …, j_max} of 2^{js}‖Δⱼf‖_{L^p}; multi-component
/// inputs use [`lebesgue_norm`] blockwise.
pub fn besov_norm_multi(
    components: &[&ScalarField],
    spec: BesovSpec,
    part: &DyadicPartition,
) -> Result<f64> {
    let mut acc = 0.0f64;
    for j in part.block_indices() {
        let table = part.block_table(j)?;
        let blocks: Vec<ScalarField> = components
            .iter()
            .map(|c| {
                part.check_grid(c)?;
                Ok(c.apply_table(table))
            })
            .collect::<Result<_>>()?;
        let refs: Vec<&ScalarField> = blocks.iter().collect();
        let term = 2f64.powf(j as f64 * spec.s) * lebesgue_norm(&refs, spec.p);
        acc = match spec.r {
            Summation::One => acc + term,
            Summation::Infinity => acc.max(term),
        };
    }
    Ok(acc)
}

pub fn besov_norm(f: &ScalarField, spec: BesovSpec, part: &DyadicPartition) -> Result<f64> {
    besov_norm_multi(&[f], spec, part)
}

pub fn besov_norm_vector(f: &VectorField, spec: BesovSpec, part: &DyadicPartition) -> Result<f64> {
    let [a, b] = f.components();
    besov_norm_multi(&[a, b], spec, part)
}

/// Empirical Bernstein constants for fields localized in the j-th annulus.
#[derive(Clone, Debug, PartialEq)]
pub struct BernsteinReport {
    pub j: i32,
    pub samples: usize,
    /// min / max of ‖∇f‖_{L^p} / (2^j ‖f‖_{L^p}).
    pub derivative_min: f64,
    pub derivative_max: f64,
    /// Smallest C with C⁻¹ ≤ ratio ≤ C over every sample.
    pub constant: f64,
    /// min / max of ‖f‖_{L^q} / (2^{2j(1/p − 1/q)} ‖f‖_{L^p}).
    pub embedding_min: f64,
    pub embedding_max: f64,
}

fn inverse_exponent(p: Lebesgue) -> f64 {
    match p {
        Lebesgue::Two => 0.5,
        Lebesgue::Infinity => 0.0,
    }
}

/// Sweeps `sample_count` random fields supported in supp φⱼ and measures
/// both Bernstein ratios; requires p ≤ q.
pub fn bernstein_ratio(
    part: &DyadicPartition,
    j: i32,
    p: Lebesgue,
    q: Lebesgue,
    sample_count: usize,
    seed: u64,
) -> Result<BernsteinReport> {
    if j < 0 {
        return Err(Error::Index {
            index: j,
            min: 0,
            max: part.j_max,
        });
    }
    if inverse_exponent(p) < inverse_exponent(q) {
        return Err(Error::Config("Bernstein embedding needs p <= q".into()));
    }
    if sample_count == 0 {
        return Err(Error::Config("sample_count must be positive".into()));
    }
    let lambda = 2f64.powi(j);
    let scale_pq = lambda.powf(2.0 * (inverse_exponent(p) - inverse_exponent(q)));
    let mut report = BernsteinReport {
        j,
        samples: sample_count,
        derivative_min: f64::INFINITY,
        derivative_max: 0.0,
        constant: 0.0,
        embedding_min: f64::INFINITY,
        embedding_max: 0.0,
    };
    for s in 0..sample_count {
        let f = random::annulus(
            part.grid(),
            CHI_INNER * lambda,
            2.0 * CHI_OUTER * lambda,
            seed.wrapping_add(s as u64),
        )?;
        let g = gradient(&f);
        let fp = lebesgue_norm(&[&f], p);
        let ratio = lebesgue_norm(&[g.component(0), g.component(1)], p) / (lambda * fp);
        let emb = lebesgue_norm(&[&f], q) / (scale_pq * fp);
        report.derivative_min = report.derivative_min.min(ratio);
        report.derivative_max = report.derivative_max.max(ratio);
        report.embedding_min = report.embedding_min.min(emb);
        report.embedding_max = report.embedding_max.max(emb);
    }
    report.constant = report.derivative_max.max(1.0 / report.derivative_min);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::band_limited;

    fn grid(n: usize) -> Grid {
        Grid::periodic(n).unwrap()
    }

    #[test]
    fn chi_profile_shape() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(CHI_INNER), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert_eq!(chi(CHI_OUTER), 0.0);
        let mut prev = 1.0;
        for i in 0..=400 {
            let v = chi(i as f64 * 0.005);
            assert!(v <= prev);
            prev = v;
        }
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn j_max_for_n64() {
        assert_eq!(DyadicPartition::new(&grid(64)).j_max(), 7);
    }

    #[test]
    fn zero_frequency_belongs_to_low_block() {
        let p = DyadicPartition::new(&grid(64));
        assert_eq!(p.chi_table()[0], 1.0);
        for j in 0..=p.j_max() {
            assert_eq!(p.phi_table(j).unwrap()[0], 0.0);
        }
        assert!(p.unity_residual() <= 1e-12);
    }

    #[test]
    fn phi_support_is_dyadic() {
        for j in 0..8 {
            let lo = 2f64.powi(j);
            let hi = 2f64.powi(j + 2);
            for i in 0..2000 {
                let r = i as f64 * 0.2;
                if phi_j(j, r) != 0.0 {
                    assert!(r >= lo && r <= hi, "j = {j}, r = {r}");
                }
            }
        }
    }

    #[test]
    fn blocks_of_constant() {
        let g = grid(32);
        let p = DyadicPartition::new(&g);
        let f = ScalarField::constant(&g, 2.5);
        let low = dyadic_block(&f, -1, &p).unwrap();
        assert!(low.max_abs_diff(&f).unwrap() < 1e-14);
        for j in 0..=p.j_max() {
            assert!(dyadic_block(&f, j, &p).unwrap().sup_norm() < 1e-15);
        }
        for j in 0..=p.j_max() {
            assert!(low_cutoff(&f, j, &p).unwrap().max_abs_diff(&f).unwrap() < 1e-14);
        }
    }

    #[test]
    fn block_index_errors() {
        let g = grid(16);
        let p = DyadicPartition::new(&g);
        let f = ScalarField::zeros(&g);
        assert!(matches!(dyadic_block(&f, -2, &p), Err(Error::Index { .. })));
        assert!(matches!(dyadic_block(&f, p.j_max() + 1, &p), Err(Error::Index { .. })));
        assert!(matches!(low_cutoff(&f, -1, &p), Err(Error::Index { .. })));
    }

    #[test]
    fn cos8_blocks_follow_tabulated_symbol() {
        let g = grid(64);
        let p = DyadicPartition::new(&g);
        let f = ScalarField::from_fn(&g, |x, _| (8.0 * x).cos());
        let expected: Vec<i32> = (0..=p.j_max()).filter(|&j| phi_j(j, 8.0) != 0.0).collect();
        let nonzero: Vec<i32> = (0..=p.j_max())
            .filter(|&j| dyadic_block(&f, j, &p).unwrap().sup_norm() > 1e-13)
            .collect();
        assert_eq!(nonzero, expected);
        // with χ ≡ 1 on [0, 1.1], the power-of-two frequency 8 sits in one block
        assert_eq!(expected, vec![2]);
        let sum = all_blocks(&f, &p).unwrap();
        let refs: Vec<(f64, &ScalarField)> = sum.iter().map(|b| (1.0, b)).collect();
        let total = ScalarField::lincomb(&refs).unwrap();
        assert!(total.max_abs_diff(&f).unwrap() <= 1e-12);
        assert!(low_cutoff(&f, 0, &p).unwrap().sup_norm() < 1e-15);
    }

    #[test]
    fn low_cutoff_matches_block_sum() {
        let g = grid(64);
        let p = DyadicPartition::new(&g);
        let f = band_limited(&g, 20, 0.5, 42).unwrap();
        let blocks = all_blocks(&f, &p).unwrap();
        for j in 0..=p.j_max() {
            let sj = low_cutoff(&f, j, &p).unwrap();
            let terms: Vec<(f64, &ScalarField)> =
                blocks[..j as usize + 1].iter().map(|b| (1.0, b)).collect();
            let sum = ScalarField::lincomb(&terms).unwrap();
            assert!(sj.max_abs_diff(&sum).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn block_orthogonality() {
        let g = grid(64);
        let p = DyadicPartition::new(&g);
        let f = band_limited(&g, 30, 0.0, 5).unwrap();
        for j in -1..=p.j_max() {
            for k in -1..=p.j_max() {
                if (j - k).abs() >= 2 {
                    let bj = dyadic_block(&f, j, &p).unwrap();
                    let bjk = dyadic_block(&bj, k, &p).unwrap();
                    assert!(bjk.sup_norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn besov_norm_of_constant_uses_low_weight() {
        let g = grid(32);
        let p = DyadicPartition::new(&g);
        let f = ScalarField::constant(&g, -3.0);
        for s in [0.0, 1.0, 2.0] {
            let spec = BesovSpec::inf_one(s);
            let got = besov_norm(&f, spec, &p).unwrap();
            assert!((got - 3.0 * 2f64.powf(-s)).abs() < 1e-12);
        }
        let s0 = BesovSpec::new(0.0, Lebesgue::Two, Summation::Infinity);
        let got = besov_norm(&f, s0, &p).unwrap();
        assert!((got - f.l2_norm()).abs() < 1e-10);
    }

    #[test]
    fn besov_norm_cos8() {
        let g = grid(64);
        let p = DyadicPartition::new(&g);
        let f = ScalarField::from_fn(&g, |x, _| (8.0 * x).cos());
        let spec = BesovSpec::new(0.0, Lebesgue::Infinity, Summation::Infinity);
        let expected = (0..=p.j_max()).map(|j| phi_j(j, 8.0)).fold(0.0, f64::max);
        let got = besov_norm(&f, spec, &p).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!(got > 0.0 && got <= 1.0 + 1e-12);
    }

    #[test]
    fn unsupported_exponents_rejected() {
        assert!(BesovSpec::from_exponents(1.0, 3.0, 1.0).is_err());
        assert!(BesovSpec::from_exponents(1.0, 2.0, 2.0).is_err());
        assert!(BesovSpec::from_exponents(1.0, f64::INFINITY, 1.0).is_ok());
    }

    #[test]
    fn bernstein_single_mode_exact() {
        let g = grid(64);
        for j in 0..5 {
            let k = 2f64.powi(j);
            let f = ScalarField::from_fn(&g, |x, _| (k * x).cos());
            let d = gradient(&f);
            let ratio = d.sup_norm() / f.sup_norm();
            assert!((ratio - k).abs() < 1e-10 * k);
        }
    }

    #[test]
    fn bernstein_sweep_j3() {
        let p = DyadicPartition::new(&grid(64));
        let r = bernstein_ratio(&p, 3, Lebesgue::Infinity, Lebesgue::Infinity, 20, 7).unwrap();
        assert!(r.constant <= 4.0, "{r:?}");
        let r2 = bernstein_ratio(&p, 3, Lebesgue::Two, Lebesgue::Infinity, 20, 7).unwrap();
        assert!(r2.embedding_max.is_finite() && r2.embedding_max > 0.0);
        assert!(bernstein_ratio(&p, 3, Lebesgue::Infinity, Lebesgue::Two, 1, 0).is_err());
        assert!(bernstein_ratio(&p, 12, Lebesgue::Infinity, Lebesgue::Infinity, 1, 0).is_err());
    }
}
