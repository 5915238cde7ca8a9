//! Self-check suite run by `lpmhd verify`.
//!
//! `Fast` runs every check at N = 64 with small sample counts; `Full` uses
//! N = 128, the complete sample counts, and also compares estimate
//! constants between N = 64 and N = 128.

use std::fmt::Write as _;

use crate::diagnostics::{lifespan_bound_new, t_star_empirical};
use crate::dynamics::{
    elsasser_tendency, make_initial_data, mhd_tendency, rk4_step, run_simulation, to_elsasser, InitSpec, MhdState,
    Profile, SimConfig,
};
use crate::error::Result;
use crate::littlewood_paley::{all_blocks, bernstein_ratio, DyadicPartition, Lebesgue};
use crate::paracalculus::estimates::{self, RatioEstimate};
use crate::paracalculus::{biot_savart, bony_reconstruct, curl2d, leray_project_with_sign, HomogeneousSymbol};
use crate::spectral::ops::{divergence, gradient};
use crate::spectral::{random, Grid, ScalarField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyLevel {
    Fast,
    Full,
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub level: VerifyLevel,
    /// Sign of the gradient part of the Leray symbol under test; anything
    /// other than 1 is a deliberately broken projector.
    pub leray_sign: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { level: VerifyLevel::Fast, leray_sign: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Measured residual or ratio.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<36} {:<6} {:>14} {:>12}  detail", "check", "status", "value", "threshold");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<36} {:<6} {:>14.6e} {:>12.3e}  {}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.value,
                c.threshold,
                c.detail
            );
        }
        s
    }
}

struct Ctx {
    full: bool,
    n: usize,
    grid: Grid,
    part: DyadicPartition,
    samples: usize,
    leray_sign: f64,
}

/// Passes when `value <= threshold`.
fn at_most(name: &'static str, value: f64, threshold: f64, detail: impl Into<String>) -> CheckResult {
    CheckResult { name, passed: value <= threshold, value, threshold, detail: detail.into() }
}

fn random_vector(grid: &Grid, seed: u64) -> Result<VectorField> {
    VectorField::new(random::dealiased(grid, 1.0, seed)?, random::dealiased(grid, 1.0, seed + 1)?)
}

fn partition_of_unity(c: &Ctx) -> Result<CheckResult> {
    Ok(at_most("partition_of_unity", c.part.unity_residual(), 1e-12, format!("N = {}", c.n)))
}

fn lp_reconstruction(c: &Ctx) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for s in 0..c.samples as u64 {
        let f = random::dealiased(&c.grid, 0.5, 10 + s)?;
        let blocks = all_blocks(&f, &c.part)?;
        let terms: Vec<(f64, &ScalarField)> = blocks.iter().map(|b| (1.0, b)).collect();
        worst = worst.max(ScalarField::lincomb(&terms)?.max_abs_diff(&f)?);
    }
    Ok(at_most("littlewood_paley_reconstruction", worst, 1e-12, format!("{} fields", c.samples)))
}

fn bony(c: &Ctx) -> Result<CheckResult> {
    let count = if c.full { 50 } else { 10 };
    let mut worst = 0.0f64;
    for s in 0..count as u64 {
        let u = random::dealiased(&c.grid, 1.0, 100 + 2 * s)?;
        let v = random::dealiased(&c.grid, 1.0, 101 + 2 * s)?;
        worst = worst.max(bony_reconstruct(&u, &v, &c.part)?.residual);
    }
    Ok(at_most("bony_decomposition", worst, 1e-10, format!("{count} pairs")))
}

fn leray_checks(c: &Ctx) -> Result<Vec<CheckResult>> {
    let p = |f: &VectorField| leray_project_with_sign(f, c.leray_sign);
    let (mut idem, mut div, mut grad) = (0.0f64, 0.0f64, 0.0f64);
    for s in 0..c.samples as u64 {
        let f = random_vector(&c.grid, 200 + 2 * s)?;
        let pf = p(&f);
        idem = idem.max(p(&pf).max_abs_diff(&pf)?);
        div = div.max(divergence(&pf).sup_norm());
        let phi = random::dealiased(&c.grid, 1.0, 300 + s)?;
        grad = grad.max(p(&gradient(&phi)).sup_norm());
    }
    Ok(vec![
        at_most("leray_idempotency", idem, 1e-12, "sup |P(Pf) - Pf|"),
        at_most("leray_divergence_free", div, 1e-10, "sup |div Pf|"),
        at_most("leray_annihilates_gradients", grad, 1e-12, "sup |P grad phi|"),
    ])
}

fn biot_savart_check(c: &Ctx) -> Result<CheckResult> {
    let mut worst = 0.0f64;
    for s in 0..c.samples as u64 {
        let omega = random::dealiased(&c.grid, 1.0, 400 + s)?;
        worst = worst.max(curl2d(&biot_savart(&omega)).max_abs_diff(&omega)?);
    }
    Ok(at_most("biot_savart_inverts_curl", worst, 1e-10, "zero-mean vorticity"))
}

fn bernstein(c: &Ctx) -> Result<CheckResult> {
    let count = if c.full { 20 } else { 5 };
    let mut consts = Vec::new();
    for j in 2..=(c.part.j_max() - 2) {
        consts.push(bernstein_ratio(&c.part, j, Lebesgue::Infinity, Lebesgue::Infinity, count, 500 + j as u64)?.constant);
    }
    let max = consts.iter().copied().fold(0.0, f64::max);
    let min = consts.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max / min;
    let mut r = at_most("bernstein_constant", max, 8.0, format!("spread across j = {spread:.3}"));
    r.passed &= spread <= 2.0;
    Ok(r)
}

fn ratio_check(
    c: &Ctx,
    name: &'static str,
    f: impl Fn(usize, usize, u64) -> Result<RatioEstimate>,
    seed: u64,
) -> Result<CheckResult> {
    if c.full {
        let coarse = f(64, c.samples, seed)?;
        let fine = f(128, c.samples, seed)?;
        let g = estimates::growth(&coarse, &fine);
        let mut r = at_most(
            name,
            g,
            1.5,
            format!("C(64) = {:.4e}, C(128) = {:.4e}", coarse.constant, fine.constant),
        );
        r.passed &= coarse.is_finite() && fine.is_finite();
        Ok(r)
    } else {
        let e = f(c.n, c.samples, seed)?;
        Ok(CheckResult {
            name,
            passed: e.is_finite() && e.constant > 0.0,
            value: e.constant,
            threshold: f64::INFINITY,
            detail: format!("C(N = {}) over {} samples", c.n, e.samples),
        })
    }
}

fn tendency_checks(c: &Ctx) -> Result<Vec<CheckResult>> {
    let (mut energy, mut equiv, mut div) = (0.0f64, 0.0f64, 0.0f64);
    for s in 0..c.samples as u64 {
        let st = MhdState {
            u: random::solenoidal(&c.grid, 8, 2.0, 600 + 2 * s)?,
            b: random::solenoidal(&c.grid, 8, 2.0, 601 + 2 * s)?,
            t: 0.0,
        };
        let (du, db) = mhd_tendency(&st, true)?;
        let rate = st.u.inner(&du)? + st.b.inner(&db)?;
        let scale = st.u.l2_norm() * du.l2_norm() + st.b.l2_norm() * db.l2_norm();
        energy = energy.max(rate.abs() / scale);
        let (da, dbeta) = elsasser_tendency(&to_elsasser(&st), true)?;
        equiv = equiv
            .max(du.add(&db)?.max_abs_diff(&da)?)
            .max(du.sub(&db)?.max_abs_diff(&dbeta)?);
        div = div.max(divergence(&db).sup_norm());
    }
    Ok(vec![
        at_most("tendency_energy_balance", energy, 1e-10, "relative <u,du> + <b,db>"),
        at_most("elsasser_equivariance", equiv, 1e-10, "sup difference of tendencies"),
        at_most("induction_solenoidal", div, 1e-10, "sup |div db/dt| without projection"),
    ])
}

fn alfven_steady(c: &Ctx) -> Result<CheckResult> {
    let steps = if c.full { 1000 } else { 50 };
    let (u, b) = make_initial_data(&c.grid, &InitSpec { profile: Profile::Alfven, ..InitSpec::default() })?;
    let start = MhdState { u, b, t: 0.0 };
    let mut s = start.clone();
    for _ in 0..steps {
        s = rk4_step(&s, 1e-3)?;
    }
    let drift = s.u.max_abs_diff(&start.u)?.max(s.b.max_abs_diff(&start.b)?);
    Ok(at_most("alfven_state_steady", drift, 1e-8, format!("{steps} RK4 steps")))
}

fn energy_conservation(c: &Ctx) -> Result<CheckResult> {
    let t_end = if c.full { 1.0 } else { 0.1 };
    let cfg = SimConfig { n: c.n, dt: 1e-3, t_end, cadence: t_end, ..SimConfig::default() };
    let traj = run_simulation(&cfg)?;
    let mut r = at_most("energy_conservation", traj.energy_drift(), 1e-6, format!("Orszag-Tang, t = {t_end}"));
    r.passed &= !traj.termination.is_failure();
    Ok(r)
}

/// ln(1 + ln(1 + ln 2)) to 20 digits, evaluated in arbitrary precision.
const UNIT_LIFESPAN: f64 = 0.423_035_857_164_402_05;

fn lifespan_unit(_: &Ctx) -> Result<CheckResult> {
    let b = lifespan_bound_new(1.0, 1.0, 1.0)?.bound;
    Ok(at_most("lifespan_bound_unit_inputs", (b - UNIT_LIFESPAN).abs(), 1e-12, format!("bound = {b:.12}")))
}

fn t_star_oracle(_: &Ctx) -> Result<CheckResult> {
    let (a, rate, e0) = (0.2f64, 1.0f64, 0.2f64);
    let times: Vec<f64> = (0..=4000).map(|i| i as f64 * 1e-3).collect();
    let e: Vec<f64> = times.iter().map(|t| a * (rate * t).exp()).collect();
    let exact = (1.0 + 2.0 * rate * e0 / (a * a)).ln() / (2.0 * rate);
    let got = t_star_empirical(&times, &e, e0)?;
    Ok(at_most("t_star_exponential_oracle", (got.t_star - exact).abs(), 1e-3, format!("T* = {:.6}", got.t_star)))
}

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let full = opts.level == VerifyLevel::Full;
    let n = if full { 128 } else { 64 };
    let grid = Grid::periodic(n).expect("valid size");
    let part = DyadicPartition::new(&grid);
    let ctx = Ctx { full, n, grid, part, samples: if full { 20 } else { 4 }, leray_sign: opts.leray_sign };
    let mut report = VerifyReport::default();
    let mut push = |name: &'static str, r: Result<Vec<CheckResult>>| match r {
        Ok(v) => report.checks.extend(v),
        Err(e) => report.checks.push(CheckResult {
            name,
            passed: false,
            value: f64::NAN,
            threshold: f64::NAN,
            detail: format!("error: {e}"),
        }),
    };
    let one = |r: Result<CheckResult>| r.map(|x| vec![x]);
    push("partition_of_unity", one(partition_of_unity(&ctx)));
    push("littlewood_paley_reconstruction", one(lp_reconstruction(&ctx)));
    push("bony_decomposition", one(bony(&ctx)));
    push("leray_idempotency", leray_checks(&ctx));
    push("biot_savart_inverts_curl", one(biot_savart_check(&ctx)));
    push("bernstein_constant", one(bernstein(&ctx)));
    push(
        "paraproduct_estimate",
        one(ratio_check(&ctx, "paraproduct_estimate", estimates::paraproduct_constant, 700)),
    );
    push(
        "transport_commutator_estimate",
        one(ratio_check(&ctx, "transport_commutator_estimate", estimates::transport_commutator_constant, 710)),
    );
    for (name, sym) in [
        ("para_multiplier_commutator_riesz", HomogeneousSymbol::Riesz(0)),
        ("para_multiplier_commutator_abs1", HomogeneousSymbol::AbsPower(1.0)),
    ] {
        push(
            name,
            one(ratio_check(&ctx, name, move |n, k, s| estimates::para_multiplier_constant(n, k, s, sym), 720)),
        );
    }
    push(
        "leray_commutator_estimate",
        one(ratio_check(&ctx, "leray_commutator_estimate", estimates::leray_commutator_constant, 730)),
    );
    push(
        "projected_transport_estimate",
        one(ratio_check(&ctx, "projected_transport_estimate", estimates::projected_transport_constant, 740)),
    );
    push("tendency_energy_balance", tendency_checks(&ctx));
    push("alfven_state_steady", one(alfven_steady(&ctx)));
    push("energy_conservation", one(energy_conservation(&ctx)));
    push("lifespan_bound_unit_inputs", one(lifespan_unit(&ctx)));
    push("t_star_exponential_oracle", one(t_star_oracle(&ctx)));
    report
}
