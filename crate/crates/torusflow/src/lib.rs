//! Deterministic pseudo-spectral simulator for incompressible viscous
//! non-Newtonian two-phase flow on the flat torus `T^d` (d = 2, optionally
//! d = 3), coupling a Galerkin-truncated momentum equation with blended
//! power-law stress to a transported Allen-Cahn phase field, with runtime
//! monitors for every quantity the underlying energy analysis tracks
//! (dissipation budget, diffuse surface measure, ball density ratio,
//! Brakke-type inequality).
//!
//! Numerical kernels are generic over the scalar type via [`real::Real`];
//! the aliases at the crate root fix f64, which is what the CLI and the
//! acceptance tolerances use.

pub mod acceptance;
pub mod config;
pub mod constitutive;
pub mod contour;
pub mod diagnostics;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod modes;
pub mod mollifier;
pub mod output;
pub mod phase_init;
pub mod real;
pub mod runner;
pub mod scenario;
pub mod spectral;
pub mod stepper;

pub use error::Error;
pub use grid::GridSpec;
pub use real::Real;

/// f64 instantiations of the generic field and state types.
pub type ScalarField64 = field::ScalarField<f64>;
pub type VectorField64 = field::VectorField<f64>;
pub type SpectralScalar64 = field::SpectralScalar<f64>;
pub type SpectralVector64 = field::SpectralVector<f64>;
pub type SimState64 = stepper::SimState<f64>;
pub type Scenario64 = scenario::Scenario<f64>;
pub type StressLaw64 = constitutive::StressLaw<f64>;
pub type EnergyRecord64 = diagnostics::EnergyRecord<f64>;
