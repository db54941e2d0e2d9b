//! Light storage, retrieval and stationary light pulses in EIT media made of
//! motionless three-level Λ atoms.
//!
//! The crate is organised in tiers:
//!
//! * [`model`]: medium constants, coupling schedules, grids.
//! * [`analytic`]: closed-form polariton evolution and Raman harmonics.
//! * [`adiabatic`]: numerical integration of the coupled polariton equations.
//! * [`full`]: non-adiabatic Maxwell–Bloch model with truncated spatial harmonics.
//! * [`thermal`]: phenomenological drift–diffusion reference for a thermal gas.
//! * [`scenario`]: run configuration, snapshot output and run comparison.

pub mod adiabatic;
pub mod analytic;
pub mod error;
pub mod field;
pub mod full;
pub mod model;
pub mod numerics;
pub mod observables;
pub mod scenario;
pub mod thermal;

pub use error::{Error, Result};
pub use field::{InitialPulse, PolaritonField, PulseShape};
pub use model::{CouplingSchedule, GridSpec, MediumParams, ScheduleKind, ScheduleSample, ScheduleTable};
