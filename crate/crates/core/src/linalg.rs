//! Small dense linear-algebra helpers on top of nalgebra.

use crate::{C64, CMatrix};
use nalgebra::DMatrix;

/// Frobenius norm of `A - A^dagger`.
pub fn hermiticity_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(a: &CMatrix) -> f64 {
    a.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Real embedding `[[Re A, -Im A], [Im A, Re A]]` of a complex matrix.
///
/// The embedding's spectrum is the spectrum of `A` together with its complex
/// conjugate, so real parts of eigenvalues are preserved.
pub fn real_embedding(a: &CMatrix) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
            out[(i + n, j + n)] = z.re;
        }
    }
    out
}

/// Spectrum of a general complex matrix.
///
/// nalgebra's real Schur iteration stalls on the doubled (exactly
/// degenerate) spectrum of the real embedding, so the non-Hermitian
/// eigenproblem is delegated to faer.
pub fn complex_spectrum(a: &CMatrix) -> Vec<C64> {
    let n = a.nrows();
    let m = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| {
        let z = a[(i, j)];
        faer::c64::new(z.re, z.im)
    });
    m.eigenvalues()
        .expect("eigenvalue iteration failed")
        .into_iter()
        .map(|z: faer::c64| C64::new(z.re, z.im))
        .collect()
}
