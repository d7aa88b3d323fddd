//! Classical limit of the WCL master equation at the end of the anneal.
//!
//! At `t = T` the Hamiltonian is diagonal, so with per-qubit `σ^±` coupling
//! the WCL population generator collapses to a classical single-spin-flip
//! master equation in the computational basis whose flip rate is the bath
//! spectral function at the (angular) energy drop: `rate(ΔE) = γ(−ΔE)`. This
//! is a KMS-weighted acceptance rule of the same shape as the simulated
//! annealing generator.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::ising::IsingModel;
use crate::quantum::bath::BathSpec;
use crate::quantum::wcl::{WclCoupling, WclGenerator};
use crate::quantum::GHZ_TO_ANGULAR;

/// Builds the `t = T` WCL population generator for `H = B·H_Ising` with
/// per-qubit `σ^±` coupling, in the computational basis. `b_ghz` is the final
/// longitudinal schedule value.
///
/// Because `H` is diagonal the eigenbasis is the computational basis itself;
/// it is passed explicitly (identity) rather than through an eigensolver,
/// which would be free to mix degenerate eigenvectors.
pub fn diagonal_reduction(
    model: &IsingModel,
    bath: &BathSpec,
    b_ghz: f64,
) -> Result<DMatrix<f64>> {
    let dim = 1usize << model.n;
    let b_ang = GHZ_TO_ANGULAR * b_ghz;
    let energies = DVector::from_iterator(
        dim,
        model.all_energies().into_iter().map(|e| b_ang * e),
    );
    let basis = DMatrix::identity(dim, dim);
    let gen = WclGenerator::from_spectrum(
        energies,
        basis,
        bath,
        WclCoupling::SigmaPmPerQubit,
        model.n,
    );
    Ok(gen.population_generator())
}
