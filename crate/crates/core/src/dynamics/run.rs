use serde::{Deserialize, Serialize};

use super::config::{SimConfig, SystemKind};
use super::init::make_initial_data;
use super::state::{rk4_step_with, state_is_finite, to_elsasser, ElsasserState, EulerState, Evolution, MhdState};
use crate::diagnostics::{initial_norms, measure, DiagnosticsRecord, InitialNorms, Monitor};
use crate::error::Result;
use crate::littlewood_paley::DyadicPartition;

/// Why a run stopped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed { t: f64 },
    /// ‖∇u‖∞ + ‖∇b‖∞ exceeded θ.
    BlowupThreshold { t: f64, lipschitz: f64 },
    /// Spectral tail fraction exceeded its threshold.
    ResolutionLost { t: f64, tail_fraction: f64 },
    NumericalFailure { t: f64, message: String },
}

impl Termination {
    pub fn time(&self) -> f64 {
        match self {
            Termination::Completed { t }
            | Termination::BlowupThreshold { t, .. }
            | Termination::ResolutionLost { t, .. }
            | Termination::NumericalFailure { t, .. } => *t,
        }
    }

    pub fn is_failure(&self) -> bool {
        matches!(self, Termination::NumericalFailure { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Termination::Completed { .. } => "completed",
            Termination::BlowupThreshold { .. } => "blowup_threshold",
            Termination::ResolutionLost { .. } => "resolution_lost",
            Termination::NumericalFailure { .. } => "numerical_failure",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub termination: Termination,
    pub initial: MhdState,
    pub initial_norms: InitialNorms,
    /// Last state reached, in (u, b) form.
    pub final_state: MhdState,
    pub final_reference: Option<EulerState>,
    /// States at multiples of `snapshot_cadence`, when requested.
    pub snapshots: Vec<MhdState>,
    pub steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    /// Relative change of ‖u‖² + ‖b‖² between the first and last record.
    pub fn energy_drift(&self) -> f64 {
        match (self.records.first(), self.records.last()) {
            (Some(a), Some(b)) if a.energy > 0.0 => (b.energy - a.energy).abs() / a.energy,
            _ => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub keep_snapshots: bool,
}

pub fn run_simulation(config: &SimConfig) -> Result<Trajectory> {
    run_simulation_with(config, RunOptions::default())
}

pub fn run_simulation_with(config: &SimConfig, opts: RunOptions) -> Result<Trajectory> {
    config.validate()?;
    let grid = config.grid()?;
    let (u0, b0) = make_initial_data(&grid, &config.init_spec())?;
    let b0 = if config.system == SystemKind::Euler {
        crate::spectral::VectorField::zeros(&grid)
    } else {
        b0
    };
    let initial = MhdState::new(u0, b0, 0.0)?;
    match config.system {
        SystemKind::Mhd => drive(config, opts, initial.clone(), initial),
        SystemKind::Elsasser => {
            let e: ElsasserState = to_elsasser(&initial);
            drive(config, opts, e, initial)
        }
        SystemKind::Euler => {
            let e = EulerState { v: initial.u.clone(), t: 0.0 };
            drive(config, opts, e, initial)
        }
    }
}

fn drive<S: Evolution>(config: &SimConfig, opts: RunOptions, start: S, initial: MhdState) -> Result<Trajectory> {
    let grid = start.grid().clone();
    let part = DyadicPartition::new(&grid);
    let norms = initial_norms(&initial.u, &initial.b, &part)?;
    let mut reference = config
        .euler_reference
        .then(|| EulerState { v: initial.u.clone(), t: 0.0 });
    let mut state = start;
    let mut monitor = Monitor::new();
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let total = config.total_steps();
    let every = config.record_every();
    let snap_every = config.snapshot_every();

    records.push(monitor.push(&measure(&state.to_mhd(), reference.as_ref(), &part)?)?);
    if opts.keep_snapshots {
        snapshots.push(state.to_mhd());
    }

    let mut termination = Termination::Completed { t: 0.0 };
    let mut steps = 0;
    for step in 1..=total {
        let t_prev = state.time();
        let advanced = rk4_step_with(&state, config.dt, config.dealias).and_then(|next| {
            let next_ref = match &reference {
                Some(r) => Some(rk4_step_with(r, config.dt, config.dealias)?),
                None => None,
            };
            Ok((next, next_ref))
        });
        let (next, next_ref) = match advanced {
            Ok(pair) => pair,
            Err(e) => {
                termination = Termination::NumericalFailure { t: t_prev, message: e.to_string() };
                break;
            }
        };
        // pin the clock to the step count so records land on exact multiples
        let t = step as f64 * config.dt;
        state = next.rebuild(next.fields().into_iter().cloned().collect(), t);
        reference = next_ref.map(|r| EulerState { v: r.v, t });
        steps = step;
        if !state_is_finite(&state) || reference.as_ref().is_some_and(|r| !state_is_finite(r)) {
            termination = Termination::NumericalFailure { t, message: "non-finite values in state".into() };
            break;
        }
        if opts.keep_snapshots && step % snap_every == 0 {
            snapshots.push(state.to_mhd());
        }
        if step % every == 0 {
            let rec = monitor.push(&measure(&state.to_mhd(), reference.as_ref(), &part)?)?;
            let lip = rec.lipschitz();
            let tail = rec.tail_fraction;
            let core_ok = rec.values()[..15].iter().all(|v| v.is_finite()) && tail.is_finite();
            let ref_ok = reference.is_none()
                || [rec.delta_b1, rec.e_sup, rec.v_l2_b2, rec.phi].iter().all(|v| v.is_finite());
            let bad = !(core_ok && ref_ok);
            records.push(rec);
            if bad {
                termination = Termination::NumericalFailure { t, message: "non-finite diagnostics".into() };
                break;
            }
            if lip > config.theta {
                termination = Termination::BlowupThreshold { t, lipschitz: lip };
                break;
            }
            if tail > config.tail_threshold {
                termination = Termination::ResolutionLost { t, tail_fraction: tail };
                break;
            }
        }
        if step == total {
            termination = Termination::Completed { t };
        }
    }
    Ok(Trajectory {
        records,
        termination,
        initial,
        initial_norms: norms,
        final_state: state.to_mhd(),
        final_reference: reference,
        snapshots,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::init::Profile;

    fn small(system: SystemKind) -> SimConfig {
        SimConfig {
            n: 32,
            dt: 0.01,
            t_end: 0.2,
            cadence: 0.05,
            system,
            ..SimConfig::default()
        }
    }

    #[test]
    fn record_count_and_times() {
        let traj = run_simulation(&small(SystemKind::Mhd)).unwrap();
        assert_eq!(traj.records.len(), 5);
        assert!(matches!(traj.termination, Termination::Completed { .. }));
        assert!(traj.records.windows(2).all(|w| w[1].t > w[0].t));
        assert!((traj.records[4].t - 0.2).abs() < 1e-15);
        assert!(traj.records.windows(2).all(|w| w[1].int_lipschitz >= w[0].int_lipschitz));
    }

    #[test]
    fn blowup_threshold_stops_run() {
        let cfg = SimConfig { theta: 0.5, ..small(SystemKind::Mhd) };
        let traj = run_simulation(&cfg).unwrap();
        assert!(matches!(traj.termination, Termination::BlowupThreshold { .. }));
        assert_eq!(traj.records.len(), 2);
    }

    #[test]
    fn cfl_violation_is_recorded_not_raised() {
        let cfg = SimConfig { amplitude: 50.0, dt: 0.05, t_end: 0.2, ..small(SystemKind::Mhd) };
        let traj = run_simulation(&cfg).unwrap();
        assert!(traj.termination.is_failure());
        assert_eq!(traj.records.len(), 1);
    }

    #[test]
    fn zero_magnetic_field_matches_euler_system() {
        let base = SimConfig { epsilon: Some(0.0), profile: Profile::Random, seed: 4, ..small(SystemKind::Mhd) };
        let mhd = run_simulation(&base).unwrap();
        let euler = run_simulation(&SimConfig { system: SystemKind::Euler, ..base }).unwrap();
        assert!(mhd.final_state.u.max_abs_diff(&euler.final_state.u).unwrap() <= 1e-12);
    }

    #[test]
    fn reference_columns_present_when_requested() {
        let cfg = SimConfig { euler_reference: true, epsilon: Some(0.01), ..small(SystemKind::Mhd) };
        let traj = run_simulation_with(&cfg, RunOptions { keep_snapshots: true }).unwrap();
        let r0 = &traj.records[0];
        assert!((r0.delta_b1 - 0.02).abs() < 1e-12);
        assert!(traj.records.iter().all(|r| r.has_reference()));
        assert!(traj.records.windows(2).all(|w| w[1].e_sup >= w[0].e_sup));
        assert_eq!(traj.snapshots.len(), 1);
    }
}
