//! Classical dipole chains under the undamped Landau-Lifshitz equation.
//!
//! The crate is organised bottom-up:
//!
//! * [`chain`] holds the state types ([`Spin`], [`SpinChain`]) and the initial-configuration presets.
//! * [`field`] evaluates the long-range dipolar field, by direct summation and by FFT convolution.
//! * [`integrator`] advances a chain with norm-exact Rodrigues rotations inside a Heun step.
//! * [`observables`] turns snapshots into per-site fidelity and normal-component matrices.
//! * [`frontkit`] detects the propagation front and fits the precursor and linear regimes.
//!
//! Units: lattice spacing `a` and coupling `C_M` default to one, so time is measured in
//! units of `a³ / C_M`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod config;
mod error;
pub mod field;
pub mod frontkit;
pub mod integrator;
pub mod observables;

pub use chain::{make_preset, Preset, Spin, SpinChain, Vec3};
pub use config::{FieldSign, Interval, SimConfig};
pub use error::{Error, Result};
pub use field::{field_direct, field_fft, total_energy, FieldArray, FieldKernel, FieldSolver};
pub use frontkit::{
    detect_front, fit_linear, fit_precursor, master_rescale, predicted_b, FitReport, FrontTrace,
    LinearFit, MasterPlot, PrecursorFit,
};
pub use integrator::{
    heun_step, rodrigues_rotate, run_simulation, run_simulation_from, StepStats, Trajectory,
};
pub use observables::{fidelity, normal_component, Observable, ObservableMatrix, ObservableSeries};
