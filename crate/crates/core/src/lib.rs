//! Viscous 3-shock waves of the one-dimensional non-isentropic Navier-Stokes
//! system in Lagrangian coordinates: Hugoniot construction, traveling-wave
//! profiles, weighted relative-entropy diagnostics, a shifted-profile solver in
//! scaled variables, and sweep studies of the vanishing-dissipation limit.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod entropy;
pub mod error;
pub mod field;
pub mod fit;
pub mod gas;
pub mod hugoniot;
pub mod ode;
pub mod profile;
pub mod solver;
pub mod study;

pub use config::{load_config, StudyConfig};
pub use error::{Error, Result};
pub use field::{Field, Grid};
pub use gas::{GasParams, State};
pub use hugoniot::ShockWave;
pub use profile::Profile;
pub use solver::{RunOutput, SolverConfig};
