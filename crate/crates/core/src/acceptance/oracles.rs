//! Independent reference computations used to pin expected values.
//!
//! Everything here deliberately avoids the implementation paths it checks:
//! overlaps come from Gauss-Hermite quadrature instead of the Laguerre closed
//! form, Wigner ground states from the Gaussian closed form instead of the
//! y-integral, two-state relaxation from the analytic exponential instead of
//! the ODE integrator.

use crate::quad::gauss_hermite;
use crate::ModelParams;

/// Franck-Condon overlap `<phi_n^0 | phi_m^1>` by Gauss-Hermite quadrature of
/// the product of the two displaced eigenfunctions.
///
/// In oscillator units the overlap reduces to
/// `exp(-b^2/4) * int h_n(t - b/2) h_m(t + b/2) exp(-t^2) dt` with
/// `b = sqrt(2) g / sqrt(eps)` and `h_k` the orthonormal Hermite polynomials,
/// which an 80-node rule integrates exactly for `n + m <= 159`.
pub fn franck_condon_quadrature(params: &ModelParams, n: usize, m: usize) -> f64 {
    let b = std::f64::consts::SQRT_2 * params.g / params.epsilon.sqrt();
    let (nodes, weights) = gauss_hermite(80);
    let mut acc = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        acc += w * hermite_orthonormal(n, t - 0.5 * b) * hermite_orthonormal(m, t + 0.5 * b);
    }
    (-0.25 * b * b).exp() * acc
}

/// Orthonormal Hermite polynomial `h_k` (unit norm against `exp(-t^2)`).
fn hermite_orthonormal(k: usize, u: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for j in 0..k {
        let jf = j as f64;
        let next = u * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Closed-form Wigner function of the oscillator ground state,
/// `(1/(pi eps)) exp(-(x^2 + p^2)/eps)`.
pub fn ground_state_wigner(eps: f64, x: f64, p: f64) -> f64 {
    (-(x * x + p * p) / eps).exp() / (std::f64::consts::PI * eps)
}

/// Analytic solution of the closed two-state exchange
/// `dp0/dt = -k01 p0 + k10 p1`, `p0 + p1` conserved.
pub fn two_state_relaxation(p0_init: f64, total: f64, k01: f64, k10: f64, t: f64) -> f64 {
    let rate = k01 + k10;
    if rate == 0.0 {
        return p0_init;
    }
    let equilibrium = total * k10 / rate;
    equilibrium + (p0_init - equilibrium) * (-rate * t).exp()
}
