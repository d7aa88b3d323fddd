//! Quantum state containers with validation contracts.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sa::Distribution;

/// A pure state of the `n`-qubit register in the computational basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Builds a state, checking unit norm to 1e−10.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let s = StateVector { amplitudes };
        s.validate()?;
        Ok(s)
    }

    /// The uniform superposition over all basis states.
    pub fn uniform(dim: usize) -> Self {
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        StateVector { amplitudes: DVector::from_element(dim, a) }
    }

    pub fn validate(&self) -> Result<()> {
        let norm = self.amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Numerical(format!("state norm {norm} drifted from 1")));
        }
        Ok(())
    }

    /// Computational-basis populations `|ψ_k|²`.
    pub fn populations(&self) -> Distribution {
        Distribution { p: self.amplitudes.iter().map(|a| a.norm_sqr()).collect() }
    }

    /// The rank-one density matrix `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let d = self.amplitudes.len();
        let mut rho = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                rho[(i, j)] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        DensityMatrix { rho }
    }
}

/// A density matrix in the computational basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Checks Hermiticity and unit trace to 1e−10 (cheap invariants; the
    /// eigenvalue positivity bound is enforced where populations are read).
    pub fn validate(&self) -> Result<()> {
        let d = self.rho.nrows();
        let mut herm_err: f64 = 0.0;
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..d {
            tr += self.rho[(i, i)];
            for j in i..d {
                herm_err = herm_err.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        if herm_err > 1e-10 {
            return Err(Error::Numerical(format!("density matrix non-Hermitian by {herm_err:.3e}")));
        }
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!("density matrix trace {tr} drifted from 1")));
        }
        Ok(())
    }

    /// Diagonal populations, clipped at 0; errors if total clipping exceeds
    /// 1e−8, renormalizes otherwise.
    pub fn populations(&self) -> Result<Distribution> {
        let mut clipped = 0.0;
        let mut p: Vec<f64> = Vec::with_capacity(self.rho.nrows());
        for i in 0..self.rho.nrows() {
            let v = self.rho[(i, i)].re;
            if v < 0.0 {
                clipped -= v;
                p.push(0.0);
            } else {
                p.push(v);
            }
        }
        if clipped > 1e-8 {
            return Err(Error::Numerical(format!(
                "negative populations clipped by {clipped:.3e} (beyond 1e-8)"
            )));
        }
        let s: f64 = p.iter().sum();
        Ok(Distribution { p: p.into_iter().map(|x| x / s).collect() })
    }
}
