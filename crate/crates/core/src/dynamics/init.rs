use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_norm_vector, BesovSpec, DyadicPartition};
use crate::spectral::{random, Grid, VectorField};

/// Catalog of initial data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// u = A(−sin x₂, sin x₁), b = A(−sin x₂, sin 2x₁).
    OrszagTang,
    /// u = A(sin x₁ cos x₂, −cos x₁ sin x₂), b = A(cos x₁ sin x₂, −sin x₁ cos x₂).
    TaylorGreen,
    /// u = A(sin x₂, 0), b = A(cos x₂, 0); a steady state.
    Shear,
    /// u = b = A(−sin x₂ + ½cos 2x₂, sin x₁); steady unless b is rescaled.
    Alfven,
    /// Seeded random solenoidal fields with |k|∞ ≤ kmax.
    Random,
}

impl Profile {
    pub const ALL: [Profile; 5] = [
        Profile::OrszagTang,
        Profile::TaylorGreen,
        Profile::Shear,
        Profile::Alfven,
        Profile::Random,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Profile::OrszagTang => "orszag_tang",
            Profile::TaylorGreen => "taylor_green",
            Profile::Shear => "shear",
            Profile::Alfven => "alfven",
            Profile::Random => "random",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown initial-data profile '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub profile: Profile,
    pub amplitude: f64,
    /// When set, b₀ is rescaled so that ‖b₀‖_{B¹∞,1} equals this value.
    pub epsilon: Option<f64>,
    pub seed: u64,
    /// Band radius of the random profile.
    pub kmax: i64,
}

impl Default for InitSpec {
    fn default() -> Self {
        Self {
            profile: Profile::OrszagTang,
            amplitude: 1.0,
            epsilon: None,
            seed: 0,
            kmax: 4,
        }
    }
}

/// Spectral decay of the random stream functions.
const RANDOM_DECAY: f64 = 3.0;

/// Builds (u₀, b₀) for `spec` on `grid`.
pub fn make_initial_data(grid: &Grid, spec: &InitSpec) -> Result<(VectorField, VectorField)> {
    if !spec.amplitude.is_finite() {
        return Err(Error::Config("amplitude must be finite".into()));
    }
    let a = spec.amplitude;
    let (u, b) = match spec.profile {
        Profile::OrszagTang => (
            VectorField::from_fn(grid, |x, y| [-a * y.sin(), a * x.sin()]),
            VectorField::from_fn(grid, |x, y| [-a * y.sin(), a * (2.0 * x).sin()]),
        ),
        Profile::TaylorGreen => (
            VectorField::from_fn(grid, |x, y| [a * x.sin() * y.cos(), -a * x.cos() * y.sin()]),
            VectorField::from_fn(grid, |x, y| [a * x.cos() * y.sin(), -a * x.sin() * y.cos()]),
        ),
        Profile::Shear => (
            VectorField::from_fn(grid, |_, y| [a * y.sin(), 0.0]),
            VectorField::from_fn(grid, |_, y| [a * y.cos(), 0.0]),
        ),
        Profile::Alfven => {
            let f = VectorField::from_fn(grid, |x, y| [a * (-y.sin() + 0.5 * (2.0 * y).cos()), a * x.sin()]);
            (f.clone(), f)
        }
        Profile::Random => {
            let u = random::solenoidal(grid, spec.kmax, RANDOM_DECAY, spec.seed)?;
            let b = random::solenoidal(grid, spec.kmax, RANDOM_DECAY, spec.seed.wrapping_add(1))?;
            (normalize_sup(&u, a), normalize_sup(&b, a))
        }
    };
    let b = match spec.epsilon {
        None => b,
        Some(eps) => rescale_magnetic(&b, eps)?,
    };
    Ok((u, b))
}

fn normalize_sup(f: &VectorField, target: f64) -> VectorField {
    let s = f.sup_norm();
    if s == 0.0 { f.clone() } else { f.scale(target / s) }
}

/// Rescales `b` so that ‖b‖_{B¹∞,1} = `eps`; `eps = 0` gives the zero field.
pub fn rescale_magnetic(b: &VectorField, eps: f64) -> Result<VectorField> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::Config(format!("epsilon must be finite and >= 0, got {eps}")));
    }
    if eps == 0.0 {
        return Ok(VectorField::zeros(b.grid()));
    }
    let part = DyadicPartition::new(b.grid());
    let norm = besov_norm_vector(b, BesovSpec::inf_one(1.0), &part)?;
    if norm == 0.0 {
        return Err(Error::Config(format!(
            "cannot rescale a zero magnetic profile to epsilon = {eps}"
        )));
    }
    Ok(b.scale(eps / norm))
}
