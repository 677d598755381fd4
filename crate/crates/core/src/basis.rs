//! Truncated two-ladder eigenbasis of the system Hamiltonian.
//!
//! The system Hamiltonian is diagonal on the product basis
//! `|phi_k^0, 0>` (harmonic ladder centered at the origin) and
//! `|phi_k^1, 1>` (ladder shifted by `-sqrt(2) g`, offset by `ebar0`).
//! The two ladders are connected by the annihilation operator `d`, whose
//! matrix elements are Franck-Condon overlaps. Resolving `d` by the number of
//! oscillator quanta exchanged yields the eigen-operators `D(omega)` that
//! carry the whole dissipative structure of the master equations.

use crate::{C64, CMatrix, Error, ModelParams, Result};
use nalgebra::DMatrix;

/// Log-factorial `ln(n!)` by direct summation.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Franck-Condon overlap `<phi_n^0 | phi_m^1>` between eigenstates of the two
/// displaced harmonic surfaces.
///
/// Evaluated in closed form through the generalized Laguerre polynomial
/// `L_N^{(M-N)}(g^2/eps)` with `N = min(n, m)`, `M = max(n, m)`, combining
/// log-space factorials with an ascending three-term recurrence so the result
/// stays finite for level indices up to a few hundred.
pub fn franck_condon(params: &ModelParams, n: usize, m: usize) -> Result<f64> {
    params.validate()?;
    let s = params.displacement_ratio();
    if s == 0.0 {
        return Ok(if n == m { 1.0 } else { 0.0 });
    }
    let (nn, mm) = (n.min(m), n.max(m));
    let d = (mm - nn) as f64;
    let sign = if n > m && (n - m) % 2 == 1 { -1.0 } else { 1.0 };

    // Ascending Laguerre recurrence with overflow rescaling.
    let mut scale_ln = 0.0_f64;
    let (mut prev, mut cur) = (1.0_f64, 1.0 + d - s);
    if nn == 0 {
        cur = 1.0;
    } else {
        for j in 1..nn {
            let jf = j as f64;
            let next = ((2.0 * jf + 1.0 + d - s) * cur - (jf + d) * prev) / (jf + 1.0);
            prev = cur;
            cur = next;
            if cur.abs() > 1e150 {
                prev *= 1e-150;
                cur *= 1e-150;
                scale_ln += 150.0 * std::f64::consts::LN_10;
            }
        }
    }
    if cur == 0.0 {
        return Ok(0.0);
    }
    let ln_pref = 0.5 * (ln_factorial(nn) - ln_factorial(mm)) + 0.5 * d * s.ln() - 0.5 * s;
    let value = sign * cur.signum() * (ln_pref + scale_ln + cur.abs().ln()).exp();
    if !value.is_finite() {
        return Err(Error::InvalidParams(format!(
            "Franck-Condon overlap overflowed for n = {n}, m = {m}, g^2/eps = {s}"
        )));
    }
    Ok(value)
}

/// Eigen-operator `D(omega)`: the part of the annihilation operator that
/// lowers the electronic level while exchanging `omega` oscillator quanta,
/// `|phi_{k+omega}^1, 1> -> fc[k][k+omega] |phi_k^0, 0>`.
///
/// Stored sparsely as the list of `(k, fc[k][k+omega])` pairs.
#[derive(Debug, Clone)]
pub struct DOperator {
    pub omega: i64,
    pub n_max: usize,
    /// `(k, value)`: matrix element at row `k`, column `n_max + k + omega`.
    pub entries: Vec<(usize, f64)>,
}

impl DOperator {
    /// Dense `2 n_max x 2 n_max` matrix representation.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = 2 * self.n_max;
        let mut m = CMatrix::zeros(dim, dim);
        for &(k, v) in &self.entries {
            let col = (k as i64 + self.omega) as usize;
            m[(k, self.n_max + col)] = C64::new(v, 0.0);
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }
}

/// Truncated eigenbasis: `n_max` levels on each ladder, Franck-Condon overlap
/// matrix and eigenenergies.
#[derive(Debug, Clone)]
pub struct LadderBasis {
    params: ModelParams,
    n_max: usize,
    /// `fc[(n, m)] = <phi_n^0 | phi_m^1>`.
    fc: DMatrix<f64>,
    energies0: Vec<f64>,
    energies1: Vec<f64>,
}

impl LadderBasis {
    pub fn new(params: ModelParams, n_max: usize) -> Result<Self> {
        params.validate()?;
        if n_max < 2 {
            return Err(Error::InvalidParams(format!(
                "n_max must be at least 2, got {n_max}"
            )));
        }
        let mut fc = DMatrix::<f64>::zeros(n_max, n_max);
        for n in 0..n_max {
            for m in 0..n_max {
                fc[(n, m)] = franck_condon(&params, n, m)?;
            }
        }
        let energies0 = (0..n_max)
            .map(|k| params.epsilon * (k as f64 + 0.5))
            .collect();
        let energies1 = (0..n_max)
            .map(|k| params.epsilon * (k as f64 + 0.5) + params.ebar0)
            .collect();
        Ok(Self { params, n_max, fc, energies0, energies1 })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of the full truncated Hilbert space, `2 n_max`.
    pub fn dim(&self) -> usize {
        2 * self.n_max
    }

    /// Franck-Condon overlap `<phi_n^0 | phi_m^1>` from the precomputed table.
    pub fn fc(&self, n: usize, m: usize) -> f64 {
        self.fc[(n, m)]
    }

    pub fn fc_matrix(&self) -> &DMatrix<f64> {
        &self.fc
    }

    pub fn energies0(&self) -> &[f64] {
        &self.energies0
    }

    pub fn energies1(&self) -> &[f64] {
        &self.energies1
    }

    /// Diagonal of the system Hamiltonian on the full `2 n_max` space,
    /// level-0 ladder first.
    pub fn hamiltonian_diag(&self) -> Vec<f64> {
        let mut h = Vec::with_capacity(self.dim());
        h.extend_from_slice(&self.energies0);
        h.extend_from_slice(&self.energies1);
        h
    }

    /// Largest Bohr frequency index carried by the truncated basis.
    pub fn omega_max(&self) -> i64 {
        self.n_max as i64 - 1
    }

    /// Eigen-operator `D(omega)`. Out-of-range `omega` yields the zero
    /// operator rather than an error.
    pub fn d_operator(&self, omega: i64) -> DOperator {
        let n = self.n_max as i64;
        let mut entries = Vec::new();
        if omega.abs() < n {
            let k_lo = (-omega).max(0);
            let k_hi = (n - 1).min(n - 1 - omega);
            for k in k_lo..=k_hi {
                let (kk, mm) = (k as usize, (k + omega) as usize);
                let v = self.fc[(kk, mm)];
                if v != 0.0 {
                    entries.push((kk, v));
                }
            }
        }
        DOperator { omega, n_max: self.n_max, entries }
    }

    /// Full annihilation block `d = sum_omega D(omega)`.
    pub fn d_total(&self) -> CMatrix {
        let dim = self.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for n in 0..self.n_max {
            for k in 0..self.n_max {
                m[(n, self.n_max + k)] = C64::new(self.fc[(n, k)], 0.0);
            }
        }
        m
    }

    /// Truncated completeness defect `1 - sum_m fc[n][m]^2` of row `n`.
    pub fn completeness_defect(&self, n: usize) -> f64 {
        1.0 - self.fc.row(n).iter().map(|v| v * v).sum::<f64>()
    }

    /// Frobenius norm of `[H_s, D(omega)] + eps omega D(omega)` restricted to
    /// the interior rows `k <= n_max - 1 - |omega|`.
    ///
    /// Zero (to rounding) when `ebar0 = 0`; equal to `ebar0 ||D(omega)||_F`
    /// otherwise, since every transition gap picks up the uniform shift.
    pub fn commutator_residual(&self, omega: i64) -> f64 {
        let d = self.d_operator(omega);
        let interior_max = self.n_max as i64 - 1 - omega.abs();
        let mut sum = 0.0;
        for &(k, v) in &d.entries {
            if (k as i64) > interior_max {
                continue;
            }
            let col = (k as i64 + omega) as usize;
            // H diagonal: ([H, D] + eps omega D)_{k, n+col}
            let r = (self.energies0[k] - self.energies1[col]
                + self.params.epsilon * omega as f64)
                * v;
            sum += r * r;
        }
        sum.sqrt()
    }
}
