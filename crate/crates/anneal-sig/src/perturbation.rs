//! Degenerate perturbation theory of the transverse field on the ground
//! space.
//!
//! Late in the anneal the transverse field is a small perturbation `ε` on the
//! classical Hamiltonian, and its first-order effect on the degenerate ground
//! space is the projected operator `P_g = Π₀(−Σ_j σ_j^x)Π₀`. On the reference
//! model `σ^x` on a core spin leaves the ground space, so `P_g` reduces to
//! `−Σ σ^x` over the four ancillae on the 16-state cluster, plus a decoupled
//! zero row for the isolated state: eigenvalues −4, −2 (×4), 0 (×7), +2 (×4),
//! +4 (×1). The isolated state stays pinned at 0 — the top of the lowest-7
//! perturbed levels — which is the mechanism that suppresses it in the
//! quantum dynamics.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ising::{ground_space, IsingModel, SpinConfig};
use crate::quantum::hamiltonian::sorted_eigh;

/// Orthogonal projector onto the classical ground space (diagonal in the
/// computational basis).
#[derive(Debug, Clone)]
pub struct GroundProjector {
    /// Hilbert-space dimension `2^n`.
    pub dim: usize,
    /// Sorted computational indices of the ground configurations.
    pub states: Vec<usize>,
    /// Computational index of the isolated ground state, if the ground space
    /// splits into a cluster plus one isolated configuration.
    pub isolated: Option<usize>,
}

impl GroundProjector {
    /// The dense projector matrix `Π₀`.
    pub fn matrix(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.dim, self.dim);
        for &k in &self.states {
            p[(k, k)] = 1.0;
        }
        p
    }

    pub fn rank(&self) -> usize {
        self.states.len()
    }
}

/// Builds the ground projector by exhaustive enumeration.
pub fn ground_projector(model: &IsingModel) -> Result<GroundProjector> {
    let gs = ground_space(model)?;
    let isolated = match gs.isolated.as_slice() {
        [k] => Some(*k),
        _ => None,
    };
    Ok(GroundProjector { dim: 1 << model.n, states: gs.states.clone(), isolated })
}

/// The spectrum of the projected transverse field `P_g`.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationSpectrum {
    /// All eigenvalues of `P_g`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues grouped to 1e−9 with their multiplicities.
    pub multiplicities: Vec<(f64, usize)>,
    /// Squared overlap of each eigenvector with the isolated state (in the
    /// same order as `eigenvalues`); empty when there is no isolated state.
    pub isolated_overlap: Vec<f64>,
}

/// Diagonalizes `P_g = Π₀(−Σ_j σ_j^x)Π₀` restricted to the ground space.
///
/// `σ^x` hops between computational states at Hamming distance one, so the
/// restricted matrix is minus the adjacency matrix of the single-flip graph
/// on the ground configurations.
pub fn project_transverse(model: &IsingModel, proj: &GroundProjector) -> Result<PerturbationSpectrum> {
    let r = proj.rank();
    if r == 0 {
        return Err(Error::Spec("empty ground space".into()));
    }
    let mut pg = DMatrix::zeros(r, r);
    for u in 0..r {
        let cu = SpinConfig::from_index(proj.states[u], model.n);
        for v in u + 1..r {
            let cv = SpinConfig::from_index(proj.states[v], model.n);
            if cu.hamming(&cv) == 1 {
                pg[(u, v)] = -1.0;
                pg[(v, u)] = -1.0;
            }
        }
    }
    let (vals, vecs) = sorted_eigh(&pg);
    let eigenvalues: Vec<f64> = vals.iter().copied().collect();
    let multiplicities = group_eigenvalues(&eigenvalues, 1e-9);
    let isolated_overlap = match proj.isolated {
        Some(k) => {
            let pos = proj
                .states
                .iter()
                .position(|&s| s == k)
                .ok_or_else(|| Error::Spec("isolated state not in ground space".into()))?;
            (0..r).map(|i| vecs[(pos, i)] * vecs[(pos, i)]).collect()
        }
        None => Vec::new(),
    };
    Ok(PerturbationSpectrum { eigenvalues, multiplicities, isolated_overlap })
}

/// Groups a sorted eigenvalue list into `(value, multiplicity)` runs.
fn group_eigenvalues(vals: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in vals {
        match out.last_mut() {
            Some((rep, count)) if (v - *rep).abs() <= tol => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use crate::ising::flip_index;

    #[test]
    fn projector_invariants() {
        let model = IsingModel::reference();
        let proj = ground_projector(&model).unwrap();
        assert_eq!(proj.rank(), 17);
        let p = proj.matrix();
        // Idempotent, symmetric, and commutes with the diagonal H_Ising.
        let p2 = &p * &p;
        assert!((&p2 - &p).amax() < 1e-12);
        assert_eq!(p, p.transpose());
        let h = DMatrix::from_diagonal(&DVector::from_vec(model.all_energies()));
        assert!((&p * &h - &h * &p).amax() < 1e-12);
    }

    #[test]
    fn projected_spectrum_multiplicities() {
        let model = IsingModel::reference();
        let proj = ground_projector(&model).unwrap();
        let spec = project_transverse(&model, &proj).unwrap();
        let m: Vec<(i64, usize)> =
            spec.multiplicities.iter().map(|&(v, c)| (v.round() as i64, c)).collect();
        assert_eq!(m, vec![(-4, 1), (-2, 4), (0, 7), (2, 4), (4, 1)]);
        for (i, &(v, _)) in spec.multiplicities.iter().enumerate() {
            assert!((v - v.round()).abs() < 1e-9, "eigenvalue {i} not integral: {v}");
        }
    }

    #[test]
    fn isolated_state_confined_to_one_zero_eigenvector() {
        let model = IsingModel::reference();
        let proj = ground_projector(&model).unwrap();
        let spec = project_transverse(&model, &proj).unwrap();
        let mut full = 0;
        for (i, &ov) in spec.isolated_overlap.iter().enumerate() {
            let val = spec.eigenvalues[i];
            if ov > 1e-12 {
                // All isolated weight lives at eigenvalue 0.
                assert!(val.abs() < 1e-9, "overlap {ov} at eigenvalue {val}");
            }
            if (ov - 1.0).abs() < 1e-9 {
                full += 1;
            }
        }
        assert_eq!(full, 1, "isolated state must be carried by exactly one eigenvector");
        let total: f64 = spec.isolated_overlap.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        // The lowest eigenvector (the −4 level) has zero isolated overlap.
        assert!(spec.isolated_overlap[0] < 1e-12);
    }

    #[test]
    fn first_order_agreement_with_full_spectrum() {
        // Lowest 17 eigenvalues of H_Ising + ε·(−Σσ^x) must match
        // −8 + ε·eig(P_g) with O(ε²) residual: halving ε quarters it.
        let model = IsingModel::reference();
        let proj = ground_projector(&model).unwrap();
        let spec = project_transverse(&model, &proj).unwrap();
        let n = model.n;
        let dim = 1usize << n;
        let energies = model.all_energies();
        let residual = |eps: f64| -> f64 {
            let mut h = DMatrix::from_diagonal(&DVector::from_vec(energies.clone()));
            for k in 0..dim {
                for j in 0..n {
                    h[(k, flip_index(k, n, &[j]))] -= eps;
                }
            }
            let (vals, _) = sorted_eigh(&h);
            (0..17)
                .map(|i| (vals[i] - (-8.0 + eps * spec.eigenvalues[i])).abs())
                .fold(0.0f64, f64::max)
        };
        let r1 = residual(0.02);
        let r2 = residual(0.01);
        assert!(r1 < 1e-2);
        let ratio = r1 / r2;
        assert!((3.5..=4.5).contains(&ratio), "ratio = {ratio:.3}");
    }

    #[test]
    fn no_isolated_overlap_report_without_isolated_state() {
        // A plain ferromagnet has a connected two-state ground space.
        let model = IsingModel::new(2, vec![0.0, 0.0], vec![(0, 1, 1.0)]).unwrap();
        let proj = ground_projector(&model).unwrap();
        assert_eq!(proj.rank(), 2);
        assert!(proj.isolated.is_none());
        let spec = project_transverse(&model, &proj).unwrap();
        assert!(spec.isolated_overlap.is_empty());
        assert_eq!(spec.eigenvalues.len(), 2);
    }
}
