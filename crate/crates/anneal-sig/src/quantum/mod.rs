//! Time-dependent quantum dynamics of the interpolating Hamiltonian:
//! instantaneous spectra, closed Schrödinger evolution, the adiabatic
//! weak-coupling Lindblad master equation, the singular-coupling master
//! equation, and the KMS-obeying bath spectral function.
//!
//! Unit conventions: ħ = 1, energies enter in GHz and are converted to
//! angular rad/ns internally (multiply by 2π); time is in ns. A bath
//! temperature quoted as `f` GHz gives `β = 1/(2π·f)` ns.

pub mod bath;
pub mod closed;
pub mod expm;
pub mod hamiltonian;
pub mod reduction;
pub mod scl;
pub mod schedule;
pub mod state;
pub mod wcl;

/// Conversion from GHz to angular rad/ns.
pub const GHZ_TO_ANGULAR: f64 = 2.0 * std::f64::consts::PI;

pub use bath::BathSpec;
pub use closed::evolve_closed;
pub use hamiltonian::{hamiltonian_at, instantaneous_spectrum, HamiltonianBuilder, SpectralDecomposition};
pub use reduction::diagonal_reduction;
pub use schedule::AnnealScheduleQ;
pub use scl::{evolve_scl, SclCoupling, SclOptions};
pub use state::{DensityMatrix, StateVector};
pub use wcl::{build_wcl_generator, evolve_wcl, WclCoupling, WclGenerator, WclOptions};
