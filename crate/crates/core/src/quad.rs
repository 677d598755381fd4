//! Quadrature building blocks: adaptive Simpson integration, regularized
//! principal-value integrals and Gauss-Hermite nodes.

use crate::{Error, Result};
use nalgebra::DMatrix;

/// Adaptive Simpson integration of `f` over `[a, b]` to absolute tolerance
/// `tol`. Returns an error when the recursion depth is exhausted before the
/// local error estimate falls below the tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fb, fm, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::NonConvergent(format!(
            "adaptive Simpson depth exhausted on [{a:.4e}, {b:.4e}], residual {:.3e}",
            err.abs()
        )));
    }
    let l = simpson_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Principal value of `\int_a^b f(e) / (e - x) de` for `x` strictly inside
/// `(a, b)`.
///
/// The singularity is subtracted: the regular part `(f(e) - f(x))/(e - x)` is
/// integrated adaptively on the two panels meeting at `x`, and the subtracted
/// pole integrates to `f(x) ln((b - x)/(x - a))` exactly. `df_at_x` supplies
/// the limit `f'(x)` of the regular part at the singular point.
pub fn principal_value<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    x: f64,
    df_at_x: f64,
    tol: f64,
) -> Result<f64> {
    if !(a < x && x < b) {
        // No singularity inside the interval: plain adaptive quadrature.
        let g = |e: f64| f(e) / (e - x);
        return adaptive_simpson(&g, a, b, tol);
    }
    let fx = f(x);
    let reg = move |e: f64| {
        let d = e - x;
        if d.abs() < 1e-9 {
            df_at_x
        } else {
            (f(e) - fx) / d
        }
    };
    let left = adaptive_simpson(&reg, a, x, 0.5 * tol)?;
    let right = adaptive_simpson(&reg, x, b, 0.5 * tol)?;
    Ok(left + right + fx * ((b - x) / (x - a)).ln())
}

/// Nodes and weights of `n`-point Gauss-Hermite quadrature for the weight
/// `exp(-t^2)`.
///
/// Golub-Welsch eigenvalues seed the nodes; each is then polished by Newton
/// iteration on the orthonormal Hermite recurrence (the raw eigenvalues are
/// only good to ~1e-8 at n = 80, which is not enough for the quadrature
/// oracles). Weights use `w_i = 1 / (n h_{n-1}(x_i)^2)`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for j in 1..n {
        let b = (j as f64 / 2.0).sqrt();
        jac[(j - 1, j)] = b;
        jac[(j, j - 1)] = b;
    }
    let mut nodes: Vec<f64> = jac.symmetric_eigen().eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (hn, hn1) = hermite_pair(n, *x);
            // h_n'(x) = sqrt(2n) h_{n-1}(x)
            let step = hn / ((2.0 * n as f64).sqrt() * hn1);
            *x -= step;
            if step.abs() < 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
        let (_, hn1) = hermite_pair(n, *x);
        weights.push(1.0 / (n as f64 * hn1 * hn1));
    }
    (nodes, weights)
}

/// Orthonormal Hermite polynomials `(h_n(u), h_{n-1}(u))` by the three-term
/// recurrence.
fn hermite_pair(n: usize, u: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = std::f64::consts::PI.powf(-0.25);
    for j in 0..n {
        let jf = j as f64;
        let next = u * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}
