//! Closed-system Schrödinger evolution along the annealing schedule.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::quantum::hamiltonian::{sorted_eigh, HamiltonianBuilder};
use crate::quantum::schedule::AnnealScheduleQ;
use crate::quantum::state::StateVector;

/// A sampled point of a closed evolution.
#[derive(Debug, Clone)]
pub struct ClosedSample {
    /// Time, ns.
    pub t: f64,
    pub state: StateVector,
}

/// Result of [`evolve_closed`].
#[derive(Debug, Clone)]
pub struct ClosedRun {
    /// States at the requested sample times (always includes the final time).
    pub samples: Vec<ClosedSample>,
    pub final_state: StateVector,
}

/// Integrates `i·dψ/dt = H(t)ψ` (ħ = 1) from the ground state of `H(0)`
/// (the uniform superposition) with a piecewise-frozen midpoint-exponential
/// propagator: on each of `n_steps` intervals, `ψ ← V·e^(−iE·dt)·Vᵀψ` with
/// `(E, V)` the eigensystem of `H` at the interval midpoint. Exactly
/// norm-preserving; the error contract is checked at every step.
pub fn evolve_closed(
    model: &IsingModel,
    sched: &AnnealScheduleQ,
    n_steps: usize,
    sample_times: &[f64],
) -> Result<ClosedRun> {
    if n_steps == 0 {
        return Err(Error::Spec("n_steps must be >= 1".into()));
    }
    let builder = HamiltonianBuilder::new(model);
    let dim = builder.dim;
    let total = sched.total_time_ns;
    let dt = total / n_steps as f64;

    let mut psi: DVector<Complex64> = StateVector::uniform(dim).amplitudes;
    let mut samples = Vec::new();
    let mut sample_idx: Vec<f64> = sample_times.to_vec();
    sample_idx.sort_by(f64::total_cmp);
    let mut next_sample = 0usize;

    let mut scratch: DVector<Complex64> = DVector::zeros(dim);
    for step in 0..n_steps {
        let t_mid = (step as f64 + 0.5) * dt;
        let (energies, basis) = sorted_eigh(&builder.at(sched, t_mid.min(total))?);
        // ψ ← V e^{−iE dt} Vᵀ ψ, with real V applied to re/im parts.
        apply_real(&basis, true, &psi, &mut scratch); // scratch = Vᵀψ
        for i in 0..dim {
            let phase = Complex64::from_polar(1.0, -energies[i] * dt);
            scratch[i] *= phase;
        }
        apply_real(&basis, false, &scratch, &mut psi); // ψ = V·scratch

        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::Numerical(format!(
                "norm drift {:.3e} at step {step}",
                (norm - 1.0).abs()
            )));
        }
        let t_end = (step as f64 + 1.0) * dt;
        while next_sample < sample_idx.len() && sample_idx[next_sample] <= t_end + 1e-12 {
            samples.push(ClosedSample { t: t_end, state: StateVector { amplitudes: psi.clone() } });
            next_sample += 1;
        }
    }
    let final_state = StateVector { amplitudes: psi };
    final_state.validate()?;
    Ok(ClosedRun {
        samples,
        final_state,
    })
}

/// `out = V·x` or `out = Vᵀ·x` for real `V` and complex `x`.
fn apply_real(
    v: &nalgebra::DMatrix<f64>,
    transpose: bool,
    x: &DVector<Complex64>,
    out: &mut DVector<Complex64>,
) {
    let dim = v.nrows();
    let re = DVector::from_iterator(dim, x.iter().map(|c| c.re));
    let im = DVector::from_iterator(dim, x.iter().map(|c| c.im));
    let (re2, im2) = if transpose {
        (v.tr_mul(&re), v.tr_mul(&im))
    } else {
        (v * re, v * im)
    };
    for i in 0..dim {
        out[i] = Complex64::new(re2[i], im2[i]);
    }
}
