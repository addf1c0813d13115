//! Simulation and inference toolkit for two-color differential laser ranging.
//!
//! The crate models frequency-dependent light propagation over segmented
//! optical paths (a candidate quadratic vacuum dispersion law, cold plasma,
//! Cauchy air), synthesizes photon arrival data for a two-color ranging
//! session, and estimates or bounds the dispersion coefficient k' from that
//! data.
//!
//! Everything is built around two representation rules:
//!
//! * refractive indices are carried as refractivities `n - 1`, never as `n`,
//!   so sub-picosecond structure survives in `f64`;
//! * photon timestamps are carried as residuals against the geometric
//!   baseline `sum(L_i)/c`, never as absolute ~2.5 s flight times.

pub mod dispersion;
pub mod inference;
pub mod montecarlo;
pub mod physconst;
pub mod propagation;

pub use dispersion::{DispersionError, DispersionModel, Refractivity};
pub use inference::{DelayEstimate, InferenceError, KPrimeBound, SensitivityReport};
pub use montecarlo::{
    Channel, DetectorModel, EventSet, PulseModel, RangingScenario, SimulationError,
};
pub use physconst::{AngularFrequency, ConstantError, PhysicalConstants, Wavelength};
pub use propagation::{BeamPair, OpticalPath, PathSegment, PropagationError, TimeOfFlight};
