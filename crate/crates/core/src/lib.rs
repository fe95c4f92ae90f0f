//! Weak shock diffraction at a right-angled wedge in a covolume gas.
//!
//! The solution is assembled from matched pieces: exact and series
//! Rankine–Hugoniot states ([`hugoniot`]), the linearized diffracted field
//! ([`linear_field`]), the nonlinear layer at the diffracted front
//! ([`wavefront`]) and the inner expansion at the wedge-corner singular
//! point ([`corner`]). [`field`] composes them on a (ξ, β) grid.

pub mod corner;
pub mod emit;
pub mod error;
pub mod field;
pub mod gas;
pub mod hugoniot;
pub mod linear_field;
pub mod verify;
pub mod wavefront;

pub use error::{Error, Result};
pub use gas::{GasModel, ThermoState};
pub use field::{assemble_field, FieldReport, FieldSample, Regime, Scenario};
pub use hugoniot::Region;
