//! Dense interpolating Hamiltonians and instantaneous spectral data.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ising::IsingModel;
use crate::quantum::schedule::AnnealScheduleQ;
use crate::quantum::GHZ_TO_ANGULAR;

/// Builder caching the model-dependent pieces of
/// `H(t) = A(t)·(−Σσ_x) + B(t)·H_Ising` (all entries real).
#[derive(Debug, Clone)]
pub struct HamiltonianBuilder {
    pub n: usize,
    pub dim: usize,
    /// Classical Ising energies by configuration index (dimensionless).
    pub ising_energies: Vec<f64>,
    /// The transverse part `−Σ_j σ_j^x` (dimensionless).
    transverse: DMatrix<f64>,
}

impl HamiltonianBuilder {
    pub fn new(model: &IsingModel) -> Self {
        let n = model.n;
        let dim = 1usize << n;
        let mut transverse = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            for j in 0..n {
                transverse[(k, k ^ (1 << (n - 1 - j)))] = -1.0;
            }
        }
        HamiltonianBuilder { n, dim, ising_energies: model.all_energies(), transverse }
    }

    /// `H(t)` in angular units (rad/ns) at time `t ∈ [0, T]` (ns).
    pub fn at(&self, sched: &AnnealScheduleQ, t: f64) -> Result<DMatrix<f64>> {
        if !(0.0..=sched.total_time_ns).contains(&t) {
            return Err(Error::Spec(format!(
                "time {t} outside anneal range 0..={}",
                sched.total_time_ns
            )));
        }
        let a = GHZ_TO_ANGULAR * sched.a_ghz(t);
        let b = GHZ_TO_ANGULAR * sched.b_ghz(t);
        let mut h = &self.transverse * a;
        for k in 0..self.dim {
            h[(k, k)] += b * self.ising_energies[k];
        }
        Ok(h)
    }
}

/// Convenience wrapper building `H(t)` for a model and schedule.
pub fn hamiltonian_at(model: &IsingModel, sched: &AnnealScheduleQ, t: f64) -> Result<DMatrix<f64>> {
    HamiltonianBuilder::new(model).at(sched, t)
}

/// Eigendecomposition of a real symmetric matrix with ascending eigenvalues.
pub fn sorted_eigh(h: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let se = h.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let energies = DVector::from_iterator(h.nrows(), order.iter().map(|&i| se.eigenvalues[i]));
    let mut basis = DMatrix::zeros(h.nrows(), h.ncols());
    for (col, &i) in order.iter().enumerate() {
        basis.set_column(col, &se.eigenvectors.column(i));
    }
    (energies, basis)
}

/// Rebuilds the eigenvector columns inside each (near-)degenerate eigenvalue
/// bin as a deterministic orthonormal basis of the same subspace, aligned
/// with the computational basis.
///
/// Within a degenerate eigenspace the eigensolver's basis choice is
/// arbitrary, and constructions that treat eigenvectors individually (such as
/// per-pair dissipative channels) would otherwise depend on that choice.
/// Aligning each bin with the computational basis removes the ambiguity: the
/// result depends only on the subspace, so spin relabelings map the basis of
/// the permuted problem onto the permuted basis of the original.
///
/// The alignment picks, per bin of dimension `m`, the `m` computational
/// directions with the largest projection onto the bin subspace (greatest
/// diagonal projector weight, ties broken by index), projects them into the
/// subspace, and orthonormalizes by modified Gram-Schmidt.
pub fn canonicalize_degenerate(energies: &DVector<f64>, basis: &mut DMatrix<f64>) {
    let d = energies.len();
    if d == 0 {
        return;
    }
    let scale = energies.iter().fold(1.0_f64, |m, &e| m.max(e.abs()));
    let tol = 1e-8 * scale;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && energies[end] - energies[end - 1] <= tol {
            end += 1;
        }
        let m = end - start;
        if m > 1 {
            let v = basis.columns(start, m).into_owned();
            // Diagonal of the bin projector P = VVᵀ per computational index.
            let weight: Vec<f64> = (0..d).map(|r| v.row(r).norm_squared()).collect();
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&a, &b| weight[b].total_cmp(&weight[a]));
            let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(m);
            for &r in &order {
                if accepted.len() == m {
                    break;
                }
                // u = P e_r, then orthogonalize against the accepted columns.
                let mut u = &v * v.row(r).transpose();
                for a in &accepted {
                    let p = a.dot(&u);
                    u -= a * p;
                }
                let norm = u.norm();
                if norm > 1e-6 {
                    u /= norm;
                    accepted.push(u);
                }
            }
            // Replace the block only if the alignment spanned the full bin.
            if accepted.len() == m {
                for (c, u) in accepted.iter().enumerate() {
                    basis.set_column(start + c, u);
                }
            }
        }
        start = end;
    }
}

/// Spectral data of an instantaneous Hamiltonian: ascending eigenvalues, the
/// orthogonal eigenbasis, and Bohr frequencies binned to a tolerance.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending eigenvalues, rad/ns.
    pub energies: DVector<f64>,
    /// Columns are eigenvectors, matching `energies`.
    pub basis: DMatrix<f64>,
    /// Distinct Bohr frequencies `ω_ab = E_b − E_a`, ascending, merged when
    /// closer than the binning tolerance.
    pub bohr_bins: Vec<f64>,
    /// The binning tolerance used.
    pub bin_tolerance: f64,
}

impl SpectralDecomposition {
    /// Decomposes `h`, verifying the reconstruction error is below
    /// `1e−9·‖H‖` and binning Bohr frequencies at `1e−8·‖H‖`.
    pub fn new(h: &DMatrix<f64>) -> Result<Self> {
        let (energies, basis) = sorted_eigh(h);
        let norm = h.norm().max(1e-300);
        let recon = &basis * DMatrix::from_diagonal(&energies) * basis.transpose();
        let err = (h - &recon).norm();
        if err > 1e-9 * norm {
            return Err(Error::Numerical(format!(
                "eigendecomposition reconstruction error {err:.3e} exceeds 1e-9·‖H‖"
            )));
        }
        let tol = 1e-8 * norm;
        let mut freqs: Vec<f64> = Vec::with_capacity(h.nrows() * h.nrows());
        for a in 0..h.nrows() {
            for b in 0..h.nrows() {
                freqs.push(energies[b] - energies[a]);
            }
        }
        freqs.sort_by(f64::total_cmp);
        let mut bohr_bins: Vec<f64> = Vec::new();
        for f in freqs {
            match bohr_bins.last() {
                Some(&last) if (f - last).abs() <= tol => {}
                _ => bohr_bins.push(f),
            }
        }
        Ok(SpectralDecomposition { energies, basis, bohr_bins, bin_tolerance: tol })
    }
}

/// The lowest `k` eigenpairs of `H(t)`.
pub fn instantaneous_spectrum(
    model: &IsingModel,
    sched: &AnnealScheduleQ,
    t: f64,
    k: usize,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let builder = HamiltonianBuilder::new(model);
    if k > builder.dim {
        return Err(Error::Spec(format!("requested {k} levels of a {}-dim space", builder.dim)));
    }
    let (energies, basis) = sorted_eigh(&builder.at(sched, t)?);
    Ok((
        energies.iter().take(k).copied().collect(),
        basis.columns(0, k).into_owned(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::full_spectrum;
    use approx::assert_relative_eq;

    #[test]
    fn endpoint_hamiltonians() {
        let model = IsingModel::reference();
        let sched = AnnealScheduleQ::linear(100.0);
        let b = HamiltonianBuilder::new(&model);
        // t = T: diagonal, equal to B(T)·H_Ising.
        let h_end = b.at(&sched, 100.0).unwrap();
        let b_ang = GHZ_TO_ANGULAR * 5.3;
        for k in 0..b.dim {
            for l in 0..b.dim {
                let expect = if k == l { b_ang * b.ising_energies[k] } else { 0.0 };
                assert_relative_eq!(h_end[(k, l)], expect, max_relative = 1e-12, epsilon = 1e-12);
            }
        }
        // Diagonal of H(T)/B(T) equals the classical spectrum.
        let spec = full_spectrum(&model).unwrap();
        let mut diag: Vec<f64> = (0..b.dim).map(|k| h_end[(k, k)] / b_ang).collect();
        diag.sort_by(f64::total_cmp);
        let mut classical: Vec<f64> = spec
            .entries
            .iter()
            .flat_map(|(e, cs)| std::iter::repeat(*e).take(cs.len()))
            .collect();
        classical.sort_by(f64::total_cmp);
        for (d, c) in diag.iter().zip(&classical) {
            assert_relative_eq!(d, c, max_relative = 1e-12, epsilon = 1e-12);
        }
        // t outside range errors.
        assert!(b.at(&sched, 100.5).is_err());
    }

    #[test]
    fn initial_gap_and_uniform_ground_state() {
        let model = IsingModel::reference();
        let sched = AnnealScheduleQ::linear(100.0);
        let (levels, basis) = instantaneous_spectrum(&model, &sched, 0.0, 2).unwrap();
        // Gap at t = 0 is 2·A(0) (one spin flipped in the x basis).
        assert_relative_eq!(levels[1] - levels[0], 2.0 * GHZ_TO_ANGULAR * 10.0, max_relative = 1e-9);
        // Ground state is the uniform superposition.
        let g = basis.column(0);
        let expect = 1.0 / 16.0;
        for a in g.iter() {
            assert_relative_eq!(a.abs(), expect, max_relative = 1e-9);
        }
    }

    #[test]
    fn canonicalized_basis_still_diagonalizes() {
        let model = IsingModel::reference();
        let sched = AnnealScheduleQ::linear(100.0);
        let h = hamiltonian_at(&model, &sched, 100.0).unwrap();
        let (energies, mut basis) = sorted_eigh(&h);
        canonicalize_degenerate(&energies, &mut basis);
        // Still orthonormal.
        let gram = basis.tr_mul(&basis);
        for k in 0..h.nrows() {
            for l in 0..h.ncols() {
                let expect = if k == l { 1.0 } else { 0.0 };
                assert_relative_eq!(gram[(k, l)], expect, epsilon = 1e-10);
            }
        }
        // Still an eigenbasis: VᵀHV diagonal with the sorted eigenvalues.
        let d = basis.tr_mul(&h) * &basis;
        for k in 0..h.nrows() {
            for l in 0..h.ncols() {
                let expect = if k == l { energies[k] } else { 0.0 };
                assert_relative_eq!(d[(k, l)], expect, epsilon = 1e-7);
            }
        }
        // At s = 1, H is diagonal, so the canonical degenerate basis is the
        // computational basis itself (up to ordering within each bin).
        for c in 0..h.ncols() {
            let col = basis.column(c);
            let max = col.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
            assert_relative_eq!(max, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn final_ground_degeneracy() {
        let model = IsingModel::reference();
        let sched = AnnealScheduleQ::linear(100.0);
        let (levels, _) = instantaneous_spectrum(&model, &sched, 100.0, 18).unwrap();
        // 17-fold degenerate lowest level, then a gap.
        assert_relative_eq!(levels[16], levels[0], epsilon = 1e-9);
        assert!(levels[17] - levels[16] > 1.0);
    }

    #[test]
    fn spectral_decomposition_contract() {
        let model = IsingModel::reference();
        let sched = AnnealScheduleQ::linear(100.0);
        let h = hamiltonian_at(&model, &sched, 37.5).unwrap();
        let sd = SpectralDecomposition::new(&h).unwrap();
        // Bins are pairwise separated by more than the tolerance.
        for w in sd.bohr_bins.windows(2) {
            assert!(w[1] - w[0] > sd.bin_tolerance);
        }
        // ω = 0 is always a bin (diagonal pairs).
        assert!(sd.bohr_bins.iter().any(|&f| f.abs() <= sd.bin_tolerance));
        // Basis is orthogonal.
        let eye = &sd.basis * sd.basis.transpose();
        assert!((eye - DMatrix::<f64>::identity(256, 256)).norm() < 1e-9);
    }
}
