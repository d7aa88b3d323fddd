//! Two-qubit concurrence along annealing trajectories.
//!
//! Concurrence is computed by the standard spin-flip construction,
//! `C = max(0, λ₁ − λ₂ − λ₃ − λ₄)` with `λ_i` the decreasing square roots of
//! the eigenvalues of `ρρ̃`, `ρ̃ = (σ_y⊗σ_y)ρ*(σ_y⊗σ_y)`. The `λ_i` are
//! obtained through the Hermitian form `√ρ·ρ̃·√ρ` so only Hermitian
//! eigensolves are needed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::quantum::bath::BathSpec;
use crate::quantum::hamiltonian::{sorted_eigh, HamiltonianBuilder};
use crate::quantum::schedule::AnnealScheduleQ;
use crate::quantum::state::DensityMatrix;
use crate::quantum::wcl::{evolve_wcl, WclOptions};

/// Reduced state of a designated qubit pair; index bit 1 is qubit `i`, bit 0
/// is qubit `j`.
#[derive(Debug, Clone)]
pub struct TwoQubitState {
    pub rho2: DMatrix<Complex64>,
}

/// Partial trace of an `n`-qubit density matrix onto qubits `(i, j)`.
pub fn reduce_pair(rho: &DensityMatrix, n: usize, i: usize, j: usize) -> Result<TwoQubitState> {
    let dim = 1usize << n;
    if rho.rho.nrows() != dim || i >= n || j >= n || i == j {
        return Err(Error::Dimension(format!("invalid pair ({i}, {j}) for n = {n}")));
    }
    let bit_i = 1usize << (n - 1 - i);
    let bit_j = 1usize << (n - 1 - j);
    let mut rho2: DMatrix<Complex64> = DMatrix::zeros(4, 4);
    let embed = |p: usize| -> usize {
        (if p & 2 != 0 { bit_i } else { 0 }) | (if p & 1 != 0 { bit_j } else { 0 })
    };
    for p in 0..4usize {
        for q in 0..4usize {
            let (pa, qa) = (embed(p), embed(q));
            let mut acc = Complex64::new(0.0, 0.0);
            for rest in 0..dim {
                if rest & (bit_i | bit_j) != 0 {
                    continue;
                }
                acc += rho.rho[(pa | rest, qa | rest)];
            }
            rho2[(p, q)] = acc;
        }
    }
    Ok(TwoQubitState { rho2 })
}

/// Hermitian eigendecomposition of a complex matrix (ascending eigenvalues).
fn herm_eigh(m: &DMatrix<Complex64>) -> (DVector<f64>, DMatrix<Complex64>) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(m.nrows(), order.iter().map(|&k| eig.eigenvalues[k]));
    let vecs = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Hermitian square root with eigenvalue clipping at −1e−10 (density matrices
/// may carry tiny negative numerical eigenvalues).
fn herm_sqrt(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (vals, vecs) = herm_eigh(m);
    let mut scaled = vecs.clone();
    for c in 0..vals.len() {
        if vals[c] < -1e-10 {
            return Err(Error::Numerical(format!("eigenvalue {:.3e} below -1e-10", vals[c])));
        }
        let s = vals[c].max(0.0).sqrt();
        for r in 0..vals.len() {
            scaled[(r, c)] *= Complex64::new(s, 0.0);
        }
    }
    Ok(&scaled * vecs.adjoint())
}

/// The Wootters concurrence of a two-qubit state.
pub fn concurrence(pair: &TwoQubitState) -> Result<f64> {
    let rho = &pair.rho2;
    // (σ_y⊗σ_y)[p, q] = s(p)·δ_{q,3−p} with signs s = (−1, +1, +1, −1).
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let mut rho_tilde: DMatrix<Complex64> = DMatrix::zeros(4, 4);
    for p in 0..4usize {
        for q in 0..4usize {
            rho_tilde[(p, q)] = rho[(3 - p, 3 - q)].conj() * (sign[p] * sign[q]);
        }
    }
    let sqrt_rho = herm_sqrt(rho)?;
    let inner = &sqrt_rho * rho_tilde * &sqrt_rho;
    let (vals, _) = herm_eigh(&inner);
    let mut lambdas: Vec<f64> = vals.iter().map(|&v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Concurrence baselines and trajectory for one edge: `(c_ground, c_gibbs,
/// c_trajectory)` on the given grid of anneal fractions.
///
/// The "ground" curve uses the equal-weight mixture over the instantaneous
/// ground multiplet (degeneracy resolved by binning at `1e−8·‖H‖`), which is
/// the β→∞ Gibbs limit; the Gibbs curve uses `exp(−βH(t))/Z`.
pub fn baseline_curves(
    model: &IsingModel,
    sched: &AnnealScheduleQ,
    bath: &BathSpec,
    pair: (usize, usize),
    grid: &[f64],
    wcl_opts: &WclOptions,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let builder = HamiltonianBuilder::new(model);
    let dim = builder.dim;
    let mut opts = wcl_opts.clone();
    opts.sample_fractions = grid.to_vec();
    let run = evolve_wcl(model, sched, bath, &opts)?;
    if run.samples.len() != grid.len() {
        return Err(Error::Spec("trajectory sampling did not cover the grid".into()));
    }

    let mut c_ground = Vec::with_capacity(grid.len());
    let mut c_gibbs = Vec::with_capacity(grid.len());
    let mut c_traj = Vec::with_capacity(grid.len());
    for (idx, &s) in grid.iter().enumerate() {
        let h = builder.at(sched, s * sched.total_time_ns)?;
        let hnorm = h.amax();
        let (vals, vecs) = sorted_eigh(&h);

        // Ground multiplet mixture.
        let tol = 1e-8 * hnorm.max(1.0);
        let mult = vals.iter().take_while(|&&e| e - vals[0] <= tol).count();
        let mut rho_g: DMatrix<f64> = DMatrix::zeros(dim, dim);
        for k in 0..mult {
            let v = vecs.column(k);
            rho_g += v * v.transpose() / mult as f64;
        }
        c_ground.push(concurrence(&reduce_pair(
            &DensityMatrix { rho: rho_g.map(|x| Complex64::new(x, 0.0)) },
            model.n,
            pair.0,
            pair.1,
        )?)?);

        // Instantaneous Gibbs state.
        let w: Vec<f64> = vals.iter().map(|&e| (-bath.beta * (e - vals[0])).exp()).collect();
        let z: f64 = w.iter().sum();
        let mut rho_th: DMatrix<f64> = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            let v = vecs.column(k);
            rho_th += v * v.transpose() * (w[k] / z);
        }
        c_gibbs.push(concurrence(&reduce_pair(
            &DensityMatrix { rho: rho_th.map(|x| Complex64::new(x, 0.0)) },
            model.n,
            pair.0,
            pair.1,
        )?)?);

        c_traj.push(concurrence(&reduce_pair(&run.samples[idx].rho, model.n, pair.0, pair.1)?)?);
    }
    Ok((c_ground, c_gibbs, c_traj))
}
