//! Block density matrices on the truncated two-ladder space.

use crate::basis::LadderBasis;
use crate::{C64, CMatrix, Error, Result};

/// Reduced density matrix stored as electronic blocks: `rho0` on level `|0>`,
/// `rho1` on level `|1>` and the coherence block `rho01 = <0|rho|1>` (its
/// mirror `<1|rho|0>` is `rho01^dagger` by Hermiticity and is not stored).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDensity {
    n_max: usize,
    pub rho0: CMatrix,
    pub rho1: CMatrix,
    pub rho01: CMatrix,
}

impl BlockDensity {
    pub fn zeros(n_max: usize) -> Self {
        Self {
            n_max,
            rho0: CMatrix::zeros(n_max, n_max),
            rho1: CMatrix::zeros(n_max, n_max),
            rho01: CMatrix::zeros(n_max, n_max),
        }
    }

    /// Pure eigenstate `|phi_k^level, level>`.
    pub fn eigenstate(n_max: usize, level: usize, k: usize) -> Result<Self> {
        if level > 1 || k >= n_max {
            return Err(Error::InvalidParams(format!(
                "eigenstate (level {level}, k {k}) outside basis with n_max {n_max}"
            )));
        }
        let mut rho = Self::zeros(n_max);
        let one = C64::new(1.0, 0.0);
        if level == 0 {
            rho.rho0[(k, k)] = one;
        } else {
            rho.rho1[(k, k)] = one;
        }
        Ok(rho)
    }

    /// Diagonal state with populations `lambda` on level 0 and `theta` on
    /// level 1; normalized to unit total trace.
    pub fn from_populations(lambda: &[f64], theta: &[f64]) -> Result<Self> {
        if lambda.len() != theta.len() {
            return Err(Error::DimensionMismatch(format!(
                "population vectors differ in length: {} vs {}",
                lambda.len(),
                theta.len()
            )));
        }
        let n = lambda.len();
        let total: f64 = lambda.iter().chain(theta.iter()).sum();
        if !(total > 0.0) || lambda.iter().chain(theta.iter()).any(|&p| p < 0.0) {
            return Err(Error::InvalidParams(
                "populations must be nonnegative with positive sum".into(),
            ));
        }
        let mut rho = Self::zeros(n);
        for k in 0..n {
            rho.rho0[(k, k)] = C64::new(lambda[k] / total, 0.0);
            rho.rho1[(k, k)] = C64::new(theta[k] / total, 0.0);
        }
        Ok(rho)
    }

    /// Thermal state `exp(-beta H_s) / Z` over both truncated ladders.
    pub fn thermal(basis: &LadderBasis) -> Self {
        let beta = basis.params().beta;
        let h = basis.hamiltonian_diag();
        let e_min = h.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = h.iter().map(|&e| (-beta * (e - e_min)).exp()).collect();
        let z: f64 = weights.iter().sum();
        let n = basis.n_max();
        let mut rho = Self::zeros(n);
        for k in 0..n {
            rho.rho0[(k, k)] = C64::new(weights[k] / z, 0.0);
            rho.rho1[(k, k)] = C64::new(weights[n + k] / z, 0.0);
        }
        rho
    }

    /// Rebuilds the blocks from a full `2 n_max x 2 n_max` matrix.
    pub fn from_full(full: &CMatrix) -> Result<Self> {
        let dim = full.nrows();
        if dim % 2 != 0 || full.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "full density matrix must be square of even dimension, got {}x{}",
                full.nrows(),
                full.ncols()
            )));
        }
        let n = dim / 2;
        Ok(Self {
            n_max: n,
            rho0: full.view((0, 0), (n, n)).into_owned(),
            rho1: full.view((n, n), (n, n)).into_owned(),
            rho01: full.view((0, n), (n, n)).into_owned(),
        })
    }

    /// Full matrix with blocks `[[rho0, rho01], [rho01^dagger, rho1]]`.
    pub fn to_full(&self) -> CMatrix {
        let n = self.n_max;
        let mut full = CMatrix::zeros(2 * n, 2 * n);
        full.view_mut((0, 0), (n, n)).copy_from(&self.rho0);
        full.view_mut((n, n), (n, n)).copy_from(&self.rho1);
        full.view_mut((0, n), (n, n)).copy_from(&self.rho01);
        full.view_mut((n, 0), (n, n)).copy_from(&self.rho01.adjoint());
        full
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn trace(&self) -> C64 {
        self.rho0.trace() + self.rho1.trace()
    }

    pub fn trace0(&self) -> f64 {
        self.rho0.trace().re
    }

    pub fn trace1(&self) -> f64 {
        self.rho1.trace().re
    }

    /// Eigenbasis populations `lambda_k = Re rho0[k][k]`.
    pub fn lambda(&self) -> Vec<f64> {
        (0..self.n_max).map(|k| self.rho0[(k, k)].re).collect()
    }

    /// Eigenbasis populations `theta_k = Re rho1[k][k]`.
    pub fn theta(&self) -> Vec<f64> {
        (0..self.n_max).map(|k| self.rho1[(k, k)].re).collect()
    }

    /// Frobenius norm of the electronic coherence block.
    pub fn coherence_norm(&self) -> f64 {
        self.rho01.norm()
    }

    /// Largest off-diagonal magnitude within the two ladder blocks.
    pub fn max_block_offdiagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n_max {
            for j in 0..self.n_max {
                if i != j {
                    m = m.max(self.rho0[(i, j)].norm());
                    m = m.max(self.rho1[(i, j)].norm());
                }
            }
        }
        m
    }

    /// `||rho - rho^dagger||_F` on the full matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        crate::linalg::hermiticity_residual(&self.to_full())
    }

    /// Smallest eigenvalue of the full Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::hermitian_min_eigenvalue(&self.to_full())
    }

    /// Scales the state to unit trace.
    pub fn normalized(mut self) -> Result<Self> {
        let t = self.trace().re;
        if !(t > 0.0) {
            return Err(Error::InvalidParams(format!(
                "cannot normalize state with trace {t}"
            )));
        }
        let s = C64::new(1.0 / t, 0.0);
        self.rho0 *= s;
        self.rho1 *= s;
        self.rho01 *= s;
        Ok(self)
    }
}
