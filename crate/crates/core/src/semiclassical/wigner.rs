//! Wigner transforms of harmonic eigenprojectors on phase-space grids.

use super::grid::PhaseGrid;
use crate::basis::LadderBasis;
use crate::par::{map_collect, map_collect_seq};
use crate::{Error, Result};

/// Orthonormal harmonic eigenfunctions `psi_k(x)` for `k < k_count`, eigenbasis
/// of `-eps^2/2 d^2/dx^2 + x^2/2`. Evaluated by the normalized Hermite-function
/// recurrence, which stays bounded for arbitrary level and argument.
pub fn eigenfunction_ladder(eps: f64, k_count: usize, x: f64) -> Vec<f64> {
    let u = x / eps.sqrt();
    let norm = eps.powf(-0.25);
    let mut out = Vec::with_capacity(k_count);
    let mut prev = 0.0f64;
    let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * u * u).exp();
    for j in 0..k_count {
        out.push(norm * cur);
        let jf = j as f64;
        let next = u * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

/// Single eigenfunction `psi_k(x)`.
pub fn eigenfunction(eps: f64, k: usize, x: f64) -> f64 {
    eigenfunction_ladder(eps, k + 1, x)[k]
}

/// Quadrature rule for the Wigner `y`-integral: trapezoid over
/// `|y| <= 10 sqrt(eps)` with step `sqrt(eps)/20`.
struct YQuad {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl YQuad {
    fn new(eps: f64) -> Self {
        let half_width = 10.0 * eps.sqrt();
        let step = eps.sqrt() / 20.0;
        let n = (2.0 * half_width / step).round() as usize;
        let mut nodes = Vec::with_capacity(n + 1);
        let mut weights = Vec::with_capacity(n + 1);
        for j in 0..=n {
            nodes.push(-half_width + j as f64 * step);
            weights.push(if j == 0 || j == n { 0.5 * step } else { step });
        }
        Self { nodes, weights }
    }
}

/// Weighted sums of eigenprojector Wigner functions on the grid:
/// `sum_k weights0[k] W_k^0(x, p)` and `sum_k weights1[k] W_k^1(x, p)`,
/// where `W_k^m = (1/2 pi eps) (|phi_k^m><phi_k^m|)_W` and the level-1 ladder
/// is centered at `-sqrt(2) g`.
///
/// Each `W_k` integrates to one, so the weights carry the physical units.
/// Columns of constant `x` are independent and run in parallel.
pub fn weighted_wigner_fields(
    basis: &LadderBasis,
    weights0: &[f64],
    weights1: &[f64],
    grid: &PhaseGrid,
) -> Result<(Vec<f64>, Vec<f64>)> {
    weighted_fields_impl(basis, weights0, weights1, grid, false)
}

/// Sequential variant of [`weighted_wigner_fields`] for benchmarking.
pub fn weighted_wigner_fields_seq(
    basis: &LadderBasis,
    weights0: &[f64],
    weights1: &[f64],
    grid: &PhaseGrid,
) -> Result<(Vec<f64>, Vec<f64>)> {
    weighted_fields_impl(basis, weights0, weights1, grid, true)
}

fn weighted_fields_impl(
    basis: &LadderBasis,
    weights0: &[f64],
    weights1: &[f64],
    grid: &PhaseGrid,
    sequential: bool,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let params = basis.params();
    let eps = params.epsilon;
    if weights0.len() > basis.n_max() || weights1.len() > basis.n_max() {
        return Err(Error::DimensionMismatch(format!(
            "weight vectors exceed basis size {}",
            basis.n_max()
        )));
    }
    grid.check_resolution(eps)?;
    let quad = YQuad::new(eps);
    let nj = quad.nodes.len();
    let shift = std::f64::consts::SQRT_2 * params.g;

    // cos(p y / eps) table shared by all columns.
    let mut cos_table = vec![0.0f64; grid.np * nj];
    for ip in 0..grid.np {
        let p = grid.p(ip);
        for (j, y) in quad.nodes.iter().enumerate() {
            cos_table[ip * nj + j] = (p * y / eps).cos();
        }
    }

    let k_count = weights0.len().max(weights1.len());
    let norm = 1.0 / (2.0 * std::f64::consts::PI * eps);
    let columns = |ix: usize| -> (Vec<f64>, Vec<f64>) {
        let x = grid.x(ix);
        // Accumulated integrand a_m[j] = sum_k w_k psi_k(x + y/2) psi_k(x - y/2).
        let mut a0 = vec![0.0f64; nj];
        let mut a1 = vec![0.0f64; nj];
        for (j, y) in quad.nodes.iter().enumerate() {
            let plus = eigenfunction_ladder(eps, k_count, x + 0.5 * y);
            let minus = eigenfunction_ladder(eps, k_count, x - 0.5 * y);
            let mut acc0 = 0.0;
            for (k, w) in weights0.iter().enumerate() {
                acc0 += w * plus[k] * minus[k];
            }
            a0[j] = acc0 * quad.weights[j];
            if !weights1.is_empty() {
                let plus = eigenfunction_ladder(eps, k_count, x + shift + 0.5 * y);
                let minus = eigenfunction_ladder(eps, k_count, x + shift - 0.5 * y);
                let mut acc1 = 0.0;
                for (k, w) in weights1.iter().enumerate() {
                    acc1 += w * plus[k] * minus[k];
                }
                a1[j] = acc1 * quad.weights[j];
            }
        }
        let mut col0 = vec![0.0f64; grid.np];
        let mut col1 = vec![0.0f64; grid.np];
        for ip in 0..grid.np {
            let row = &cos_table[ip * nj..(ip + 1) * nj];
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            for j in 0..nj {
                s0 += a0[j] * row[j];
                s1 += a1[j] * row[j];
            }
            col0[ip] = norm * s0;
            col1[ip] = norm * s1;
        }
        (col0, col1)
    };

    let cols: Vec<(Vec<f64>, Vec<f64>)> = if sequential {
        map_collect_seq(grid.nx, columns)
    } else {
        map_collect(grid.nx, columns)
    };

    let mut f0 = vec![0.0f64; grid.len()];
    let mut f1 = vec![0.0f64; grid.len()];
    for (ix, (c0, c1)) in cols.into_iter().enumerate() {
        for ip in 0..grid.np {
            f0[grid.idx(ix, ip)] = c0[ip];
            f1[grid.idx(ix, ip)] = c1[ip];
        }
    }
    Ok((f0, f1))
}

/// Wigner function of the eigenprojector `|phi_k^m><phi_k^m|`, normalized to
/// unit phase-space integral. `m = 1` selects the displaced ladder.
pub fn wigner_projector(
    basis: &LadderBasis,
    k: usize,
    m: usize,
    grid: &PhaseGrid,
) -> Result<Vec<f64>> {
    if k >= basis.n_max() || m > 1 {
        return Err(Error::InvalidParams(format!(
            "projector (k = {k}, m = {m}) outside basis with n_max {}",
            basis.n_max()
        )));
    }
    let mut w = vec![0.0; k + 1];
    w[k] = 1.0;
    let (f0, f1) = if m == 0 {
        weighted_wigner_fields(basis, &w, &[], grid)?
    } else {
        weighted_wigner_fields(basis, &[], &w, grid)?
    };
    Ok(if m == 0 { f0 } else { f1 })
}
