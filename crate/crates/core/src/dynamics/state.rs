use crate::error::{Error, Result};
use crate::paracalculus::leray_project;
use crate::spectral::ops::{advect_values, dealias, jacobian, laplacian, require_solenoidal};
use crate::spectral::{Grid, ScalarField, VectorField, invert_laplacian};

/// Velocity and magnetic field at time `t`.
#[derive(Clone, Debug)]
pub struct MhdState {
    pub u: VectorField,
    pub b: VectorField,
    pub t: f64,
}

/// Elsässer variables α = u + b, β = u − b.
#[derive(Clone, Debug)]
pub struct ElsasserState {
    pub alpha: VectorField,
    pub beta: VectorField,
    pub t: f64,
}

#[derive(Clone, Debug)]
pub struct EulerState {
    pub v: VectorField,
    pub t: f64,
}

/// Floor on the transport speed in the CFL limit.
pub const CFL_SPEED_FLOOR: f64 = 1e-8;
/// Courant number of the step-size guard.
pub const CFL_NUMBER: f64 = 0.5;

/// Common interface for the evolved systems, enough for a generic RK4.
pub trait Evolution: Clone + Send + Sync {
    fn time(&self) -> f64;
    fn grid(&self) -> &Grid;
    fn fields(&self) -> Vec<&VectorField>;
    fn rebuild(&self, fields: Vec<VectorField>, t: f64) -> Self;
    fn tendency(&self, dealiased: bool) -> Result<Vec<VectorField>>;
    /// ‖u‖∞ + ‖b‖∞ for the physical fields.
    fn transport_speed(&self) -> f64;
    /// (u, b) view of the state; Euler states report b = 0.
    fn to_mhd(&self) -> MhdState;
}

/// (v·∇)f from a precomputed Jacobian `jac[a][k] = ∂ₖfₐ`.
fn transport(v: &VectorField, jac: &[[ScalarField; 2]; 2], dealiased: bool) -> VectorField {
    let grid = v.grid();
    let comp = |a: usize| {
        let p = ScalarField::from_values_unchecked(grid, advect_values(v, &jac[a]));
        if dealiased { dealias(&p) } else { p }
    };
    VectorField::new(comp(0), comp(1)).expect("same grid")
}

/// du/dt = P[(b·∇)b − (u·∇)u], db/dt = (b·∇)u − (u·∇)b.
///
/// With dealiasing the induction term is divergence-free on the lattice and
/// is returned as computed; without it, aliasing leaks into the divergence
/// and the term is projected.
pub fn mhd_tendency(s: &MhdState, dealiased: bool) -> Result<(VectorField, VectorField)> {
    require_solenoidal(&s.u, "velocity")?;
    require_solenoidal(&s.b, "magnetic field")?;
    let ju = jacobian(&s.u);
    let jb = jacobian(&s.b);
    let du = leray_project(&transport(&s.b, &jb, dealiased).sub(&transport(&s.u, &ju, dealiased))?);
    let db = transport(&s.b, &ju, dealiased).sub(&transport(&s.u, &jb, dealiased))?;
    let db = if dealiased { db } else { leray_project(&db) };
    Ok((du, db))
}

/// dα/dt = −P(β·∇)α, dβ/dt = −P(α·∇)β.
pub fn elsasser_tendency(s: &ElsasserState, dealiased: bool) -> Result<(VectorField, VectorField)> {
    require_solenoidal(&s.alpha, "alpha")?;
    require_solenoidal(&s.beta, "beta")?;
    let ja = jacobian(&s.alpha);
    let jb = jacobian(&s.beta);
    let da = leray_project(&transport(&s.beta, &ja, dealiased)).scale(-1.0);
    let db = leray_project(&transport(&s.alpha, &jb, dealiased)).scale(-1.0);
    Ok((da, db))
}

/// dv/dt = −P(v·∇)v.
pub fn euler_tendency(s: &EulerState, dealiased: bool) -> Result<VectorField> {
    require_solenoidal(&s.v, "velocity")?;
    let jv = jacobian(&s.v);
    Ok(leray_project(&transport(&s.v, &jv, dealiased)).scale(-1.0))
}

pub fn to_elsasser(s: &MhdState) -> ElsasserState {
    ElsasserState {
        alpha: s.u.add(&s.b).expect("same grid"),
        beta: s.u.sub(&s.b).expect("same grid"),
        t: s.t,
    }
}

pub fn from_elsasser(e: &ElsasserState) -> MhdState {
    MhdState {
        u: VectorField::lincomb(&[(0.5, &e.alpha), (0.5, &e.beta)]).expect("same grid"),
        b: VectorField::lincomb(&[(0.5, &e.alpha), (-0.5, &e.beta)]).expect("same grid"),
        t: e.t,
    }
}

/// Total pressure Π + ½|b|² with zero mean, from
/// −Δq = div((u·∇)u − (b·∇)b).
pub fn recover_pressure(s: &MhdState) -> Result<ScalarField> {
    require_solenoidal(&s.u, "velocity")?;
    require_solenoidal(&s.b, "magnetic field")?;
    let m = transport(&s.b, &jacobian(&s.b), true).sub(&transport(&s.u, &jacobian(&s.u), true))?;
    let div = crate::spectral::ops::divergence(&m);
    Ok(invert_laplacian(&div))
}

/// Residual Δq − div M for a pressure q of state `s`, used in tests.
#[doc(hidden)]
pub fn pressure_poisson_residual(s: &MhdState, q: &ScalarField) -> Result<f64> {
    let m = transport(&s.b, &jacobian(&s.b), true).sub(&transport(&s.u, &jacobian(&s.u), true))?;
    laplacian(q).max_abs_diff(&crate::spectral::ops::divergence(&m))
}

impl MhdState {
    pub fn new(u: VectorField, b: VectorField, t: f64) -> Result<Self> {
        if !u.grid().same_as(b.grid()) {
            return Err(Error::GridMismatch("u and b on different grids".into()));
        }
        Ok(Self { u, b, t })
    }

    /// ‖u‖²_{L²} + ‖b‖²_{L²}.
    pub fn energy(&self) -> f64 {
        self.u.l2_norm().powi(2) + self.b.l2_norm().powi(2)
    }
}

impl Evolution for MhdState {
    fn time(&self) -> f64 {
        self.t
    }
    fn grid(&self) -> &Grid {
        self.u.grid()
    }
    fn fields(&self) -> Vec<&VectorField> {
        vec![&self.u, &self.b]
    }
    fn rebuild(&self, mut fields: Vec<VectorField>, t: f64) -> Self {
        let b = fields.pop().expect("two fields");
        let u = fields.pop().expect("two fields");
        Self { u, b, t }
    }
    fn tendency(&self, dealiased: bool) -> Result<Vec<VectorField>> {
        let (du, db) = mhd_tendency(self, dealiased)?;
        Ok(vec![du, db])
    }
    fn transport_speed(&self) -> f64 {
        self.u.sup_norm() + self.b.sup_norm()
    }
    fn to_mhd(&self) -> MhdState {
        self.clone()
    }
}

impl Evolution for ElsasserState {
    fn time(&self) -> f64 {
        self.t
    }
    fn grid(&self) -> &Grid {
        self.alpha.grid()
    }
    fn fields(&self) -> Vec<&VectorField> {
        vec![&self.alpha, &self.beta]
    }
    fn rebuild(&self, mut fields: Vec<VectorField>, t: f64) -> Self {
        let beta = fields.pop().expect("two fields");
        let alpha = fields.pop().expect("two fields");
        Self { alpha, beta, t }
    }
    fn tendency(&self, dealiased: bool) -> Result<Vec<VectorField>> {
        let (da, db) = elsasser_tendency(self, dealiased)?;
        Ok(vec![da, db])
    }
    fn transport_speed(&self) -> f64 {
        self.to_mhd().transport_speed()
    }
    fn to_mhd(&self) -> MhdState {
        from_elsasser(self)
    }
}

impl Evolution for EulerState {
    fn time(&self) -> f64 {
        self.t
    }
    fn grid(&self) -> &Grid {
        self.v.grid()
    }
    fn fields(&self) -> Vec<&VectorField> {
        vec![&self.v]
    }
    fn rebuild(&self, mut fields: Vec<VectorField>, t: f64) -> Self {
        Self {
            v: fields.pop().expect("one field"),
            t,
        }
    }
    fn tendency(&self, dealiased: bool) -> Result<Vec<VectorField>> {
        Ok(vec![euler_tendency(self, dealiased)?])
    }
    fn transport_speed(&self) -> f64 {
        self.v.sup_norm()
    }
    fn to_mhd(&self) -> MhdState {
        MhdState {
            u: self.v.clone(),
            b: VectorField::zeros(self.v.grid()),
            t: self.t,
        }
    }
}

/// Largest step allowed by the CFL guard for `state`.
pub fn cfl_limit<S: Evolution>(state: &S) -> f64 {
    CFL_NUMBER * state.grid().spacing() / state.transport_speed().max(CFL_SPEED_FLOOR)
}

fn axpy<S: Evolution>(base: &S, k: &[VectorField], h: f64) -> Result<S> {
    let fields = base
        .fields()
        .into_iter()
        .zip(k)
        .map(|(f, d)| VectorField::lincomb(&[(1.0, f), (h, d)]))
        .collect::<Result<Vec<_>>>()?;
    Ok(base.rebuild(fields, base.time() + h))
}

/// Classical fourth-order Runge-Kutta step with dealiased products.
pub fn rk4_step<S: Evolution>(state: &S, dt: f64) -> Result<S> {
    rk4_step_with(state, dt, true)
}

pub fn rk4_step_with<S: Evolution>(state: &S, dt: f64, dealiased: bool) -> Result<S> {
    let limit = cfl_limit(state);
    if !(dt > 0.0 && dt.is_finite()) || dt > limit {
        return Err(Error::StepSize { dt, limit });
    }
    let k1 = state.tendency(dealiased)?;
    let k2 = axpy(state, &k1, 0.5 * dt)?.tendency(dealiased)?;
    let k3 = axpy(state, &k2, 0.5 * dt)?.tendency(dealiased)?;
    let k4 = axpy(state, &k3, dt)?.tendency(dealiased)?;
    let fields = state
        .fields()
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            VectorField::lincomb(&[
                (1.0, f),
                (dt / 6.0, &k1[i]),
                (dt / 3.0, &k2[i]),
                (dt / 3.0, &k3[i]),
                (dt / 6.0, &k4[i]),
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(state.rebuild(fields, state.time() + dt))
}

/// True when every field is finite in its stored representation.
pub fn state_is_finite<S: Evolution>(state: &S) -> bool {
    state.fields().iter().all(|f| f.is_finite())
}
