//! Two-species competition dynamics on time scales: step maps, root
//! operators of the nullclines, phase-plane regions, simulation and
//! property verification.

pub mod error;
pub mod model;
pub mod ode;
pub mod roots;
pub mod simulate;
pub mod timescale;
pub mod verify;

pub use error::{Error, Result};
pub use model::{ModelParams, Regime, State};
pub use timescale::TimeScale;
