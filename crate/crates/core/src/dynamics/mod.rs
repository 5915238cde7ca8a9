//! Ideal MHD, Elsässer and Euler dynamics on the periodic grid.

mod config;
mod init;
mod run;
pub mod snapshot;
mod state;

pub use config::{SimConfig, SystemKind};
pub use init::{make_initial_data, rescale_magnetic, InitSpec, Profile};
pub use run::{run_simulation, run_simulation_with, RunOptions, Termination, Trajectory};
pub use state::{
    cfl_limit, elsasser_tendency, euler_tendency, from_elsasser, mhd_tendency, pressure_poisson_residual,
    recover_pressure, rk4_step, rk4_step_with, state_is_finite, to_elsasser, ElsasserState, EulerState,
    Evolution, MhdState, CFL_NUMBER, CFL_SPEED_FLOOR,
};
