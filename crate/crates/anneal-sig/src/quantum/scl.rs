//! The singular-coupling-limit (SCL) master equation.
//!
//! In the singular-coupling derivation the bath correlation time is taken to
//! zero, so the dissipator acts with the flat-spectrum rate `γ(0)` in the
//! *computational* basis regardless of `H(t)`:
//! `dρ/dt = −i[H + H_LS, ρ] + γ(0)·Σ_α (A_α ρ A_α − ½{A_α², ρ})` with
//! diagonal coupling operators `A_α` and Lamb shift `H_LS = −κ·Σ_α A_α²`,
//! `κ = PV∫γ(ω)/ω dω / (2π) · 2π = 2π·η|g|²·ω_c` for the Ohmic form. The
//! integrator is Strang splitting: an elementwise half-step of dephasing, a
//! frozen-midpoint unitary step, and another dephasing half-step.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::quantum::bath::BathSpec;
use crate::quantum::hamiltonian::{sorted_eigh, HamiltonianBuilder};
use crate::quantum::schedule::AnnealScheduleQ;
use crate::quantum::state::DensityMatrix;

/// Diagonal system-bath coupling operators for the SCL dissipator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SclCoupling {
    /// The collective operator `A = Σ_j σ_j^z` (total magnetization). This is
    /// the default.
    Collective,
    /// Independent per-qubit operators `A_j = σ_j^z`.
    PerQubit,
}

/// Options for [`evolve_scl`].
#[derive(Debug, Clone)]
pub struct SclOptions {
    pub coupling: SclCoupling,
    /// Total unitary/dephasing Strang steps.
    pub n_steps: usize,
    /// Number of intervals on which the midpoint unitary is refreshed; must
    /// divide `n_steps`.
    pub n_refresh: usize,
    /// Include the Lamb shift `H_LS = −κ·Σ A²` in the coherent part.
    pub include_lamb_shift: bool,
    /// Anneal fractions at which to emit the density matrix.
    pub sample_fractions: Vec<f64>,
}

impl Default for SclOptions {
    fn default() -> Self {
        SclOptions {
            coupling: SclCoupling::Collective,
            n_steps: 2000,
            n_refresh: 200,
            include_lamb_shift: true,
            sample_fractions: Vec::new(),
        }
    }
}

/// A sampled density matrix along an SCL run.
#[derive(Debug, Clone)]
pub struct SclSample {
    /// Anneal fraction `t/T`.
    pub s: f64,
    pub rho: DensityMatrix,
}

/// Result of [`evolve_scl`].
#[derive(Debug, Clone)]
pub struct SclRun {
    pub samples: Vec<SclSample>,
    pub final_rho: DensityMatrix,
}

/// Integrates the SCL master equation from the ground state of
/// `H(0) + H_LS`.
pub fn evolve_scl(
    model: &IsingModel,
    sched: &AnnealScheduleQ,
    bath: &BathSpec,
    opts: &SclOptions,
) -> Result<SclRun> {
    if opts.n_refresh == 0 || opts.n_steps % opts.n_refresh != 0 {
        return Err(Error::Spec("n_refresh must be positive and divide n_steps".into()));
    }
    let builder = HamiltonianBuilder::new(model);
    let dim = builder.dim;
    let n = model.n;
    let total = sched.total_time_ns;
    let steps_per = opts.n_steps / opts.n_refresh;
    let dt = total / opts.n_steps as f64;

    // Diagonals of the coupling operators.
    let diag_z = |j: usize, k: usize| -> f64 {
        if (k >> (n - 1 - j)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    let coup_diags: Vec<DVector<f64>> = match opts.coupling {
        SclCoupling::Collective => {
            vec![DVector::from_fn(dim, |k, _| (0..n).map(|j| diag_z(j, k)).sum())]
        }
        SclCoupling::PerQubit => {
            (0..n).map(|j| DVector::from_fn(dim, |k, _| diag_z(j, k))).collect()
        }
    };

    // Lamb shift diagonal −κ·Σ A² and elementwise dephasing rates
    // ½γ(0)·Σ (d_a − d_b)².
    let kappa = if opts.include_lamb_shift { bath.lamb_shift_analytic() } else { 0.0 };
    let mut lamb: DVector<f64> = DVector::zeros(dim);
    let gamma0 = bath.gamma(0.0);
    let mut dep: DMatrix<f64> = DMatrix::zeros(dim, dim);
    for d in &coup_diags {
        for k in 0..dim {
            lamb[k] -= kappa * d[k] * d[k];
        }
        for a in 0..dim {
            for b in 0..dim {
                let x = d[a] - d[b];
                dep[(a, b)] += 0.5 * gamma0 * x * x;
            }
        }
    }
    // Half-step elementwise decay factors.
    let dhalf = dep.map(|r: f64| (-r * dt / 2.0).exp());

    let h_at = |t: f64| -> Result<DMatrix<f64>> {
        let mut h = builder.at(sched, t)?;
        for k in 0..dim {
            h[(k, k)] += lamb[k];
        }
        Ok(h)
    };

    // Initial state: ground of the shifted H(0).
    let (_, v0) = sorted_eigh(&h_at(0.0)?);
    let psi0 = v0.column(0);
    let mut re: DMatrix<f64> = DMatrix::from_fn(dim, dim, |a, b| psi0[a] * psi0[b]);
    let mut im: DMatrix<f64> = DMatrix::zeros(dim, dim);

    let mut fractions = opts.sample_fractions.clone();
    fractions.sort_by(f64::total_cmp);
    let mut next_sample = 0usize;
    let mut samples = Vec::new();

    for m in 0..opts.n_refresh {
        let t_mid = (m as f64 + 0.5) * (total / opts.n_refresh as f64);
        let (energies, basis) = sorted_eigh(&h_at(t_mid)?);
        // U = V·e^{−iE dt}·Vᵀ split into real and imaginary parts.
        let mut vc = basis.clone();
        let mut vs = basis.clone();
        for c in 0..dim {
            let (sin, cos) = (-energies[c] * dt).sin_cos();
            for r in 0..dim {
                vc[(r, c)] *= cos;
                vs[(r, c)] *= sin;
            }
        }
        let u_re = vc * basis.transpose();
        let u_im = vs * basis.transpose();

        for _ in 0..steps_per {
            re.component_mul_assign(&dhalf);
            im.component_mul_assign(&dhalf);
            // ρ ← U ρ U†, with U = Ur + i·Ui and U† = Urᵀ − i·Uiᵀ.
            let wr = &u_re * &re - &u_im * &im;
            let wi = &u_re * &im + &u_im * &re;
            re = &wr * u_re.transpose() + &wi * u_im.transpose();
            im = &wi * u_re.transpose() - &wr * u_im.transpose();
            re.component_mul_assign(&dhalf);
            im.component_mul_assign(&dhalf);
        }

        let s_end = (m + 1) as f64 / opts.n_refresh as f64;
        while next_sample < fractions.len() && fractions[next_sample] <= s_end + 1e-12 {
            samples.push(SclSample { s: fractions[next_sample], rho: pack(&re, &im) });
            next_sample += 1;
        }
    }

    let final_rho = pack(&re, &im);
    final_rho.validate()?;
    Ok(SclRun { samples, final_rho })
}

fn pack(re: &DMatrix<f64>, im: &DMatrix<f64>) -> DensityMatrix {
    let (r, c) = re.shape();
    DensityMatrix { rho: DMatrix::from_fn(r, c, |i, j| Complex64::new(re[(i, j)], im[(i, j)])) }
}
