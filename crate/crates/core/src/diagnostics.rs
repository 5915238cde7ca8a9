//! Continuation-criterion monitors, lifespan lower bounds and the
//! Euler-comparison quantities E(T), φ(T) and T*.

use serde::{Deserialize, Serialize};

use crate::dynamics::{EulerState, MhdState};
use crate::error::{Error, Result};
use crate::littlewood_paley::{besov_norm, besov_norm_vector, BesovSpec, DyadicPartition};
use crate::paracalculus::curl2d;
use crate::spectral::ops::{derivative, jacobian};
use crate::spectral::{ScalarField, VectorField};

/// One row of `diagnostics.csv`.
///
/// Running integrals use the trapezoidal rule at record cadence. Euler
/// columns are NaN when no reference flow is attached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// ‖u‖²_{L²} + ‖b‖²_{L²}.
    pub energy: f64,
    pub grad_u_sup: f64,
    /// Max over the second partials of both velocity components.
    pub hess_u_sup: f64,
    pub b_sup: f64,
    pub grad_b_sup: f64,
    /// ‖ω + j‖_{B⁰∞,1}.
    pub omega_plus_j_b0: f64,
    /// ‖ω − j‖_{B⁰∞,1}.
    pub omega_minus_j_b0: f64,
    /// ‖j‖_{B¹∞,1}.
    pub j_b1: f64,
    pub int_hess_u: f64,
    /// ∫ ‖∇u‖∞ + ‖∇b‖∞.
    pub int_lipschitz: f64,
    pub int_omega_plus_j: f64,
    pub int_omega_minus_j: f64,
    /// ∫ ‖j‖²_{B¹∞,1}.
    pub int_j_b1_sq: f64,
    /// ‖u‖_{L²} + ‖u‖_{B²∞,1}.
    pub u_l2_b2: f64,
    /// ‖u + b − v‖_{B¹∞,1} + ‖u − b − v‖_{B¹∞,1}.
    pub delta_b1: f64,
    /// Running sup of `delta_b1`.
    pub e_sup: f64,
    /// ‖v‖_{L²} + ‖v‖_{B²∞,1}.
    pub v_l2_b2: f64,
    /// Running sup of ‖v‖_{B²∞,1}.
    pub phi: f64,
    pub tail_fraction: f64,
}

pub const CSV_COLUMNS: [&str; 21] = [
    "t",
    "energy",
    "grad_u_sup",
    "hess_u_sup",
    "b_sup",
    "grad_b_sup",
    "omega_plus_j_b0",
    "omega_minus_j_b0",
    "j_b1",
    "int_hess_u",
    "int_lipschitz",
    "int_omega_plus_j",
    "int_omega_minus_j",
    "int_j_b1_sq",
    "u_l2_b2",
    "delta_b1",
    "e_sup",
    "v_l2_b2",
    "phi",
    "tail_fraction",
    "lipschitz",
];

impl DiagnosticsRecord {
    /// ‖∇u‖∞ + ‖∇b‖∞, the blow-up surrogate.
    pub fn lipschitz(&self) -> f64 {
        self.grad_u_sup + self.grad_b_sup
    }

    pub fn values(&self) -> [f64; 21] {
        [
            self.t,
            self.energy,
            self.grad_u_sup,
            self.hess_u_sup,
            self.b_sup,
            self.grad_b_sup,
            self.omega_plus_j_b0,
            self.omega_minus_j_b0,
            self.j_b1,
            self.int_hess_u,
            self.int_lipschitz,
            self.int_omega_plus_j,
            self.int_omega_minus_j,
            self.int_j_b1_sq,
            self.u_l2_b2,
            self.delta_b1,
            self.e_sup,
            self.v_l2_b2,
            self.phi,
            self.tail_fraction,
            self.lipschitz(),
        ]
    }

    pub fn has_reference(&self) -> bool {
        !self.delta_b1.is_nan()
    }
}

/// Instantaneous norms of one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub t: f64,
    pub energy: f64,
    pub grad_u_sup: f64,
    pub hess_u_sup: f64,
    pub b_sup: f64,
    pub grad_b_sup: f64,
    pub omega_plus_j_b0: f64,
    pub omega_minus_j_b0: f64,
    pub j_b1: f64,
    pub u_l2_b2: f64,
    pub tail_fraction: f64,
    pub reference: Option<ReferenceMeasurement>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceMeasurement {
    pub delta_b1: f64,
    pub v_b2: f64,
    pub v_l2: f64,
}

fn max_sup<'a>(fields: impl IntoIterator<Item = &'a ScalarField>) -> f64 {
    fields.into_iter().map(ScalarField::sup_norm).fold(0.0, f64::max)
}

fn jacobian_sup(f: &VectorField) -> f64 {
    max_sup(jacobian(f).iter().flatten())
}

/// Max over ∂₁₁, ∂₁₂, ∂₂₂ of both components.
pub fn hessian_sup(f: &VectorField) -> f64 {
    let mut out = 0.0f64;
    for c in f.components() {
        out = out
            .max(derivative(c, 0, 2).sup_norm())
            .max(derivative(&crate::spectral::ops::partial(c, 0), 1, 1).sup_norm())
            .max(derivative(c, 1, 2).sup_norm());
    }
    out
}

/// ‖f‖_{L²} + ‖f‖_{B^s∞,1}.
pub fn l2_besov(f: &VectorField, s: f64, part: &DyadicPartition) -> Result<f64> {
    Ok(f.l2_norm() + besov_norm_vector(f, BesovSpec::inf_one(s), part)?)
}

/// Pair norm ‖(δα, δβ)‖_{B¹∞,1} with δα = u + b − v, δβ = u − b − v.
pub fn delta_norm(state: &MhdState, v: &VectorField, part: &DyadicPartition) -> Result<f64> {
    let b1 = BesovSpec::inf_one(1.0);
    let da = VectorField::lincomb(&[(1.0, &state.u), (1.0, &state.b), (-1.0, v)])?;
    let db = VectorField::lincomb(&[(1.0, &state.u), (-1.0, &state.b), (-1.0, v)])?;
    Ok(besov_norm_vector(&da, b1, part)? + besov_norm_vector(&db, b1, part)?)
}

/// Fraction of ‖u‖² + ‖b‖² carried by retained modes in the outer third
/// of the dealiased band, max(|k₁|, |k₂|) > 2N/9.
pub fn tail_fraction(state: &MhdState) -> f64 {
    let grid = state.u.grid();
    let edge = 2.0 * grid.dealias_cutoff() as f64 / 3.0;
    let (mut tail, mut total) = (0.0, 0.0);
    for f in [&state.u, &state.b] {
        for c in f.components() {
            for (idx, z) in c.coeffs().iter().enumerate() {
                let (k1, k2) = grid.lattice_point(idx);
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                let e = z.norm_sqr();
                total += e;
                if k1.abs().max(k2.abs()) as f64 > edge {
                    tail += e;
                }
            }
        }
    }
    if total == 0.0 { 0.0 } else { tail / total }
}

pub fn measure(state: &MhdState, reference: Option<&EulerState>, part: &DyadicPartition) -> Result<Measurement> {
    let omega = curl2d(&state.u);
    let j = curl2d(&state.b);
    let b0 = BesovSpec::inf_one(0.0);
    let reference = match reference {
        None => None,
        Some(r) => Some(ReferenceMeasurement {
            delta_b1: delta_norm(state, &r.v, part)?,
            v_b2: besov_norm_vector(&r.v, BesovSpec::inf_one(2.0), part)?,
            v_l2: r.v.l2_norm(),
        }),
    };
    Ok(Measurement {
        t: state.t,
        energy: state.energy(),
        grad_u_sup: jacobian_sup(&state.u),
        hess_u_sup: hessian_sup(&state.u),
        b_sup: state.b.sup_norm(),
        grad_b_sup: jacobian_sup(&state.b),
        omega_plus_j_b0: besov_norm(&omega.add(&j)?, b0, part)?,
        omega_minus_j_b0: besov_norm(&omega.sub(&j)?, b0, part)?,
        j_b1: besov_norm(&j, BesovSpec::inf_one(1.0), part)?,
        u_l2_b2: l2_besov(&state.u, 2.0, part)?,
        tail_fraction: tail_fraction(state),
        reference,
    })
}

/// Turns a stream of measurements into records with running integrals
/// and running sups.
#[derive(Clone, Debug, Default)]
pub struct Monitor {
    last: Option<DiagnosticsRecord>,
}

impl Monitor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, m: &Measurement) -> Result<DiagnosticsRecord> {
        let (delta, v_b2, v_l2) = match m.reference {
            Some(r) => (r.delta_b1, r.v_b2, r.v_l2),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        let mut rec = DiagnosticsRecord {
            t: m.t,
            energy: m.energy,
            grad_u_sup: m.grad_u_sup,
            hess_u_sup: m.hess_u_sup,
            b_sup: m.b_sup,
            grad_b_sup: m.grad_b_sup,
            omega_plus_j_b0: m.omega_plus_j_b0,
            omega_minus_j_b0: m.omega_minus_j_b0,
            j_b1: m.j_b1,
            int_hess_u: 0.0,
            int_lipschitz: 0.0,
            int_omega_plus_j: 0.0,
            int_omega_minus_j: 0.0,
            int_j_b1_sq: 0.0,
            u_l2_b2: m.u_l2_b2,
            delta_b1: delta,
            e_sup: delta,
            v_l2_b2: v_l2 + v_b2,
            phi: v_b2,
            tail_fraction: m.tail_fraction,
        };
        if let Some(prev) = &self.last {
            let h = m.t - prev.t;
            if !(h > 0.0) {
                return Err(Error::Diagnostic(format!(
                    "record times must increase ({} after {})",
                    m.t, prev.t
                )));
            }
            let trap = |a: f64, b: f64| 0.5 * h * (a + b);
            rec.int_hess_u = prev.int_hess_u + trap(prev.hess_u_sup, rec.hess_u_sup);
            rec.int_lipschitz = prev.int_lipschitz + trap(prev.lipschitz(), rec.lipschitz());
            rec.int_omega_plus_j = prev.int_omega_plus_j + trap(prev.omega_plus_j_b0, rec.omega_plus_j_b0);
            rec.int_omega_minus_j = prev.int_omega_minus_j + trap(prev.omega_minus_j_b0, rec.omega_minus_j_b0);
            rec.int_j_b1_sq = prev.int_j_b1_sq + trap(prev.j_b1.powi(2), rec.j_b1.powi(2));
            rec.e_sup = prev.e_sup.max(delta);
            rec.phi = prev.phi.max(v_b2);
        }
        self.last = Some(rec.clone());
        Ok(rec)
    }
}

/// Cumulative trapezoidal integral of `values` over `times`.
pub fn running_integral(times: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    if times.len() != values.len() {
        return Err(Error::Diagnostic("times and values differ in length".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            let h = times[i] - times[i - 1];
            if !(h > 0.0) {
                return Err(Error::Diagnostic("time grid must be strictly increasing".into()));
            }
            acc += 0.5 * h * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    Ok(out)
}

fn integral_of(records: &[DiagnosticsRecord], f: impl Fn(&DiagnosticsRecord) -> f64) -> Result<Vec<f64>> {
    if records.is_empty() {
        return Err(Error::Diagnostic("empty trajectory".into()));
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let v: Vec<f64> = records.iter().map(f).collect();
    running_integral(&t, &v)
}

/// ∫₀ᵗ ‖∇²u‖∞.
pub fn continuation_integral_u(records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    integral_of(records, |r| r.hess_u_sup)
}

/// ∫₀ᵗ ‖ω ± j‖_{B⁰∞,1}, returned as (plus, minus).
pub fn continuation_integral_elsasser(records: &[DiagnosticsRecord]) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok((
        integral_of(records, |r| r.omega_plus_j_b0)?,
        integral_of(records, |r| r.omega_minus_j_b0)?,
    ))
}

/// ∫₀ᵗ ‖∇u‖∞ + ‖∇b‖∞.
pub fn continuation_integral_lipschitz(records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    integral_of(records, DiagnosticsRecord::lipschitz)
}

/// ∫₀ᵗ ‖j‖²_{B¹∞,1}.
pub fn continuation_integral_b2d(records: &[DiagnosticsRecord]) -> Result<Vec<f64>> {
    integral_of(records, |r| r.j_b1 * r.j_b1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Velocity in L² ∩ B²∞,1, magnetic field in B¹∞,1.
    New,
    /// Both fields in L² ∩ B²∞,1.
    Old,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LifespanEstimate {
    pub kind: BoundKind,
    /// Lower bound on the lifespan; +∞ when b₀ = 0.
    pub bound: f64,
    pub constant: f64,
    /// ‖u₀‖_{L²∩B²∞,1} for the new bound, ‖(u₀, b₀)‖_{L²∩B²∞,1} for the old.
    pub prefactor_norm: f64,
    /// ‖u₀‖_{L²∩B²∞,1} for the new bound, ‖(u₀, b₀)‖_{L²∩B¹∞,1} for the old.
    pub ratio_norm: f64,
    pub b0_norm: f64,
}

fn triple_log(c: f64, x: f64) -> f64 {
    (c * (c * x.ln_1p()).ln_1p()).ln_1p()
}

fn check_bound_inputs(values: &[(f64, &str)], b0_norm: f64, c: f64) -> Result<()> {
    for &(v, what) in values {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Precondition(format!("{what} must be positive, got {v}")));
        }
    }
    if !(b0_norm.is_finite() && b0_norm >= 0.0) {
        return Err(Error::Precondition(format!("b0 norm must be >= 0, got {b0_norm}")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Precondition(format!("constant C must be positive, got {c}")));
    }
    Ok(())
}

/// (C/U) log{1 + C log[1 + C log(1 + C U/B)]}, U = ‖u₀‖_{L²∩B²∞,1},
/// B = ‖b₀‖_{B¹∞,1}.
pub fn lifespan_bound_new(u0_norm: f64, b0_norm: f64, c: f64) -> Result<LifespanEstimate> {
    check_bound_inputs(&[(u0_norm, "u0 norm")], b0_norm, c)?;
    let bound = if b0_norm == 0.0 {
        f64::INFINITY
    } else {
        c / u0_norm * triple_log(c, c * u0_norm / b0_norm)
    };
    Ok(LifespanEstimate {
        kind: BoundKind::New,
        bound,
        constant: c,
        prefactor_norm: u0_norm,
        ratio_norm: u0_norm,
        b0_norm,
    })
}

/// (C/P₂) log{1 + C log[1 + C log(1 + C P₁/B)]} with pair norms
/// P₂ = ‖(u₀, b₀)‖_{L²∩B²∞,1}, P₁ = ‖(u₀, b₀)‖_{L²∩B¹∞,1}.
pub fn lifespan_bound_old(pair_b2: f64, pair_b1: f64, b0_norm: f64, c: f64) -> Result<LifespanEstimate> {
    check_bound_inputs(&[(pair_b2, "B2 pair norm"), (pair_b1, "B1 pair norm")], b0_norm, c)?;
    let bound = if b0_norm == 0.0 {
        f64::INFINITY
    } else {
        c / pair_b2 * triple_log(c, c * pair_b1 / b0_norm)
    };
    Ok(LifespanEstimate {
        kind: BoundKind::Old,
        bound,
        constant: c,
        prefactor_norm: pair_b2,
        ratio_norm: pair_b1,
        b0_norm,
    })
}

/// Input norms of both bounds for initial data (u₀, b₀).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialNorms {
    /// ‖u₀‖_{L²∩B²∞,1}.
    pub u0_l2_b2: f64,
    /// ‖b₀‖_{B¹∞,1}.
    pub b0_b1: f64,
    /// ‖(u₀, b₀)‖_{L²∩B²∞,1}.
    pub pair_l2_b2: f64,
    /// ‖(u₀, b₀)‖_{L²∩B¹∞,1}.
    pub pair_l2_b1: f64,
}

pub fn initial_norms(u0: &VectorField, b0: &VectorField, part: &DyadicPartition) -> Result<InitialNorms> {
    let u2 = l2_besov(u0, 2.0, part)?;
    Ok(InitialNorms {
        u0_l2_b2: u2,
        b0_b1: besov_norm_vector(b0, BesovSpec::inf_one(1.0), part)?,
        pair_l2_b2: u2 + l2_besov(b0, 2.0, part)?,
        pair_l2_b1: l2_besov(u0, 1.0, part)? + l2_besov(b0, 1.0, part)?,
    })
}

/// C V₀ exp(C T V₀ exp(C T V₀)); overflow gives +∞.
pub fn euler_growth_bound(v0: f64, t: f64, c: f64) -> Result<f64> {
    for (x, what) in [(v0, "V0"), (c, "C")] {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Precondition(format!("{what} must be positive, got {x}")));
        }
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Precondition(format!("T must be >= 0, got {t}")));
    }
    let inner = c * t * v0;
    let value = c * v0 * (inner * inner.exp()).exp();
    Ok(if value.is_nan() { f64::INFINITY } else { value })
}

/// Solves g(C) = target for increasing g by bisection in log C.
fn solve_increasing(g: impl Fn(f64) -> f64, target: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    if g(lo.exp()) >= target {
        return lo.exp();
    }
    if g(hi.exp()) <= target {
        return hi.exp();
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid.exp()) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

/// One sweep point used to fit the lifespan constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LifespanSample {
    pub u0_norm: f64,
    pub b0_norm: f64,
    pub t_star: f64,
}

/// Largest C for which the new bound stays below every observed T*.
/// The bound increases with C, so every smaller constant is also valid.
/// Returns `None` without samples.
pub fn fit_lifespan_constant(samples: &[LifespanSample]) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for s in samples {
        if !(s.t_star.is_finite() && s.t_star > 0.0) {
            return Err(Error::Diagnostic(format!("T* must be positive, got {}", s.t_star)));
        }
        check_bound_inputs(&[(s.u0_norm, "u0 norm"), (s.b0_norm, "b0 norm")], s.b0_norm, 1.0)?;
        let c = solve_increasing(
            |c| c / s.u0_norm * triple_log(c, c * s.u0_norm / s.b0_norm),
            s.t_star,
        );
        best = Some(best.map_or(c, |b: f64| b.min(c)));
    }
    Ok(best)
}

/// Smallest C with C V₀ exp(C t V₀ exp(C t V₀)) ≥ norm(t) at every sample.
pub fn fit_euler_growth_constant(v0: f64, times: &[f64], norms: &[f64]) -> Result<f64> {
    if times.len() != norms.len() || times.is_empty() {
        return Err(Error::Diagnostic("need matching, nonempty time and norm series".into()));
    }
    let mut c_min = 0.0f64;
    for (&t, &y) in times.iter().zip(norms) {
        if y <= 0.0 {
            continue;
        }
        // the bound is increasing in C, so the dominating set is [c, ∞)
        let c = solve_increasing(|c| euler_growth_bound(v0, t, c).unwrap_or(f64::INFINITY), y);
        let c = if euler_growth_bound(v0, t, c)? < y { c * (1.0 + 1e-12) } else { c };
        c_min = c_min.max(c);
    }
    Ok(c_min)
}

/// E(t) for MHD states against Euler states, interpolating v linearly in
/// time between the bracketing reference states when grids differ.
pub fn delta_elsasser(mhd: &[MhdState], euler: &[EulerState], part: &DyadicPartition) -> Result<Vec<(f64, f64)>> {
    if euler.is_empty() {
        return Err(Error::Diagnostic("empty Euler trajectory".into()));
    }
    let tol = 1e-12;
    mhd.iter()
        .map(|s| {
            let k = euler.partition_point(|e| e.t < s.t - tol);
            let v = if k < euler.len() && (euler[k].t - s.t).abs() <= tol {
                euler[k].v.clone()
            } else if k == 0 || k == euler.len() {
                return Err(Error::Diagnostic(format!(
                    "time {} outside the Euler trajectory [{}, {}]",
                    s.t,
                    euler[0].t,
                    euler[euler.len() - 1].t
                )));
            } else {
                let (a, b) = (&euler[k - 1], &euler[k]);
                let lam = (s.t - a.t) / (b.t - a.t);
                VectorField::lincomb(&[(1.0 - lam, &a.v), (lam, &b.v)])?
            };
            Ok((s.t, delta_norm(s, &v, part)?))
        })
        .collect()
}

/// Running sup of a series.
pub fn running_sup(values: &[f64]) -> Vec<f64> {
    let mut acc = f64::NEG_INFINITY;
    values
        .iter()
        .map(|&v| {
            acc = acc.max(v);
            acc
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TStar {
    pub t_star: f64,
    /// True when ∫E² never exceeded E₀; `t_star` is then the run end.
    pub censored: bool,
}

/// sup{T : ∫₀ᵀ E² ≤ E₀}. Within the crossing interval E² is taken
/// linear, consistent with the trapezoidal rule.
pub fn t_star_empirical(times: &[f64], e: &[f64], e0: f64) -> Result<TStar> {
    if times.is_empty() || times.len() != e.len() {
        return Err(Error::Diagnostic("E series must be nonempty and match its time grid".into()));
    }
    if !(e0.is_finite() && e0 > 0.0) {
        return Err(Error::Precondition(format!("E0 must be positive, got {e0}")));
    }
    let mut acc = 0.0;
    for i in 1..times.len() {
        let h = times[i] - times[i - 1];
        if !(h > 0.0) {
            return Err(Error::Diagnostic("time grid must be strictly increasing".into()));
        }
        let (a, c) = (e[i - 1] * e[i - 1], e[i] * e[i]);
        let step = 0.5 * h * (a + c);
        if acc + step > e0 {
            // a τ + (c − a) τ² / (2h) = rest
            let rest = e0 - acc;
            let q = (c - a) / (2.0 * h);
            let tau = if q.abs() <= 1e-300 {
                rest / a
            } else {
                (-a + (a * a + 4.0 * q * rest).sqrt()) / (2.0 * q)
            };
            return Ok(TStar { t_star: times[i - 1] + tau.clamp(0.0, h), censored: false });
        }
        acc += step;
    }
    Ok(TStar { t_star: times[times.len() - 1], censored: true })
}
