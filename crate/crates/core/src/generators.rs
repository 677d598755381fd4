//! Redfield and Lindblad generators on the truncated basis, plus the
//! first-order hopping-rate matrices connecting them.
//!
//! The Redfield dissipator is kept in factored operator form. Summing the
//! double frequency sum against the full annihilation block `d = sum D(omega)`
//! collapses it to eight triple products with two dense weighted operators
//! `A_F = sum F(omega) D^dag(omega)` and `A_G = sum G(omega) D^dag(omega)`:
//!
//! ```text
//! R(rho) = -B_F rho + A_F rho d - rho B_G + d rho A_G
//!          - rho B_F^dag + d^dag rho A_F^dag - B_G^dag rho + A_G^dag rho d^dag
//! ```
//!
//! with `B_F = d A_F`, `B_G = A_G d`. This is `O(n^3)` per application
//! instead of the `O(n^4)` of a stored superoperator. The Lindblad dissipator
//! keeps its GKLS shape: jump operators `D^dag(omega)` weighted by
//! `a_F(omega)` and `D(omega)` weighted by `a_G(omega)`, with the diagonal
//! anticommutator absorbed into per-level weight vectors.
//!
//! The Hermitian-conjugate halves are implemented as `rho -> (X(rho^dag))^dag`,
//! which agrees with `+ h.c.` on Hermitian states and makes both generators
//! complex-linear, so they matricize column by column on matrix units.

use crate::basis::{DOperator, LadderBasis};
use crate::bath::CoeffSet;
use crate::density::BlockDensity;
use crate::{C64, CMatrix, Error, Result};
use nalgebra::DMatrix;

/// Which master equation a [`Generator`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    VonNeumann,
    Redfield,
    Lindblad,
}

/// Diagonal energy corrections `alpha^2 H` induced by the principal-value
/// coefficients: `diag0[k] = sum_omega b_F(omega) fc[k][k+omega]^2` on level 0
/// and `diag1[k] = -sum_omega b_G(omega) fc[k-omega][k]^2` on level 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedHamiltonian {
    pub diag0: Vec<f64>,
    pub diag1: Vec<f64>,
}

impl CorrectedHamiltonian {
    pub fn new(basis: &LadderBasis, coeffs: &CoeffSet) -> Self {
        let n = basis.n_max();
        let mut diag0 = vec![0.0; n];
        let mut diag1 = vec![0.0; n];
        for omega in -basis.omega_max()..=basis.omega_max() {
            let d = basis.d_operator(omega);
            let (bf, bg) = (coeffs.b_f(omega), coeffs.b_g(omega));
            for &(k, v) in &d.entries {
                let j = (k as i64 + omega) as usize;
                diag0[k] += bf * v * v;
                diag1[j] -= bg * v * v;
            }
        }
        Self { diag0, diag1 }
    }

    pub fn is_zero(&self) -> bool {
        self.diag0.iter().chain(self.diag1.iter()).all(|&v| v == 0.0)
    }
}

/// First-order hopping rates between eigenstates:
/// `k01[i][f] = (alpha^2/eps) a_F(f-i) fc[i][f]^2` for
/// `|phi_i^0, 0> -> |phi_f^1, 1>` and
/// `k10[i][f] = (alpha^2/eps) a_G(i-f) fc[f][i]^2` for the reverse direction.
#[derive(Debug, Clone)]
pub struct RateMatrix {
    pub k01: DMatrix<f64>,
    pub k10: DMatrix<f64>,
}

impl RateMatrix {
    pub fn build(basis: &LadderBasis, coeffs: &CoeffSet) -> Self {
        let n = basis.n_max();
        let scale = basis.params().dissipative_scale();
        let mut k01 = DMatrix::<f64>::zeros(n, n);
        let mut k10 = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for f in 0..n {
                let fc_if = basis.fc(i, f);
                k01[(i, f)] = scale * coeffs.a_f(f as i64 - i as i64) * fc_if * fc_if;
                let fc_fi = basis.fc(f, i);
                k10[(i, f)] = scale * coeffs.a_g(i as i64 - f as i64) * fc_fi * fc_fi;
            }
        }
        Self { k01, k10 }
    }

    pub fn n_max(&self) -> usize {
        self.k01.nrows()
    }

    /// Total escape rate out of `|phi_i^0, 0>`.
    pub fn escape_rate0(&self, i: usize) -> f64 {
        self.k01.row(i).sum()
    }

    /// Total escape rate out of `|phi_i^1, 1>`.
    pub fn escape_rate1(&self, i: usize) -> f64 {
        self.k10.row(i).sum()
    }

    /// Markov generator `Q` of the population dynamics `dp/dt = Q p` with
    /// `p = (lambda, theta)` stacked.
    pub fn markov_generator(&self) -> DMatrix<f64> {
        let n = self.n_max();
        let mut q = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            for f in 0..n {
                // level 0 state i hops to level 1 state f
                q[(n + f, i)] += self.k01[(i, f)];
                q[(i, i)] -= self.k01[(i, f)];
                // level 1 state i hops to level 0 state f
                q[(f, n + i)] += self.k10[(i, f)];
                q[(n + i, n + i)] -= self.k10[(i, f)];
            }
        }
        q
    }

    /// Stationary populations of the Markov chain (replaces one balance row
    /// with the normalization constraint and solves).
    pub fn stationary(&self) -> Result<Vec<f64>> {
        let n2 = 2 * self.n_max();
        let mut a = self.markov_generator();
        for c in 0..n2 {
            a[(n2 - 1, c)] = 1.0;
        }
        let mut rhs = nalgebra::DVector::<f64>::zeros(n2);
        rhs[n2 - 1] = 1.0;
        let lu = a.lu();
        let sol = lu
            .solve(&rhs)
            .ok_or_else(|| Error::InvalidParams("balance system is singular".into()))?;
        Ok(sol.iter().copied().collect())
    }
}

#[derive(Debug, Clone)]
struct RedfieldOps {
    d: CMatrix,
    d_adj: CMatrix,
    af: CMatrix,
    af_adj: CMatrix,
    ag: CMatrix,
    ag_adj: CMatrix,
    bf: CMatrix,
    bf_adj: CMatrix,
    bg: CMatrix,
    bg_adj: CMatrix,
}

#[derive(Debug, Clone)]
struct LindbladOps {
    /// `(D(omega), a_F(omega), a_G(omega))` for every omega carried by the
    /// basis, skipping empty operators.
    jumps: Vec<(DOperator, f64, f64)>,
    /// Diagonal anticommutator weights: `sum_omega a_F D D^dag` on level-0
    /// slots, `sum_omega a_G D^dag D` on level-1 slots.
    anti: Vec<f64>,
}

/// A master-equation generator acting on block density matrices.
#[derive(Debug, Clone)]
pub struct Generator {
    kind: GeneratorKind,
    basis: LadderBasis,
    coeffs: Option<CoeffSet>,
    scale: f64,
    h_bare: Vec<f64>,
    h_eff: Vec<f64>,
    corrected: Option<CorrectedHamiltonian>,
    redfield: Option<RedfieldOps>,
    lindblad: Option<LindbladOps>,
}

impl Generator {
    /// Closed-system generator `-(i/eps)[H_s, .]`.
    pub fn von_neumann(basis: LadderBasis) -> Self {
        let h = basis.hamiltonian_diag();
        Self {
            kind: GeneratorKind::VonNeumann,
            basis,
            coeffs: None,
            scale: 0.0,
            h_bare: h.clone(),
            h_eff: h,
            corrected: None,
            redfield: None,
            lindblad: None,
        }
    }

    /// Redfield generator with the full double frequency sum.
    pub fn redfield(basis: LadderBasis, coeffs: CoeffSet) -> Result<Self> {
        check_compatible(&basis, &coeffs)?;
        let n = basis.n_max();
        let dim = 2 * n;
        let mut af = CMatrix::zeros(dim, dim);
        let mut ag = CMatrix::zeros(dim, dim);
        for omega in -basis.omega_max()..=basis.omega_max() {
            let (f, g) = (coeffs.f(omega), coeffs.g(omega));
            for &(k, v) in &basis.d_operator(omega).entries {
                let m = (k as i64 + omega) as usize;
                // D^dag(omega) has its entry at (n + m, k).
                af[(n + m, k)] += f * v;
                ag[(n + m, k)] += g * v;
            }
        }
        let d = basis.d_total();
        let bf = &d * &af;
        let bg = &ag * &d;
        let ops = RedfieldOps {
            d_adj: d.adjoint(),
            af_adj: af.adjoint(),
            ag_adj: ag.adjoint(),
            bf_adj: bf.adjoint(),
            bg_adj: bg.adjoint(),
            d,
            af,
            ag,
            bf,
            bg,
        };
        let h = basis.hamiltonian_diag();
        let scale = basis.params().dissipative_scale();
        Ok(Self {
            kind: GeneratorKind::Redfield,
            basis,
            coeffs: Some(coeffs),
            scale,
            h_bare: h.clone(),
            h_eff: h,
            corrected: None,
            redfield: Some(ops),
            lindblad: None,
        })
    }

    /// Lindblad generator: GKLS dissipator plus the corrected Hamiltonian.
    pub fn lindblad(basis: LadderBasis, coeffs: CoeffSet) -> Result<Self> {
        check_compatible(&basis, &coeffs)?;
        let n = basis.n_max();
        let mut jumps = Vec::new();
        let mut anti = vec![0.0; 2 * n];
        for omega in -basis.omega_max()..=basis.omega_max() {
            let d = basis.d_operator(omega);
            if d.is_zero() {
                continue;
            }
            let (wf, wg) = (coeffs.a_f(omega), coeffs.a_g(omega));
            if wf < 0.0 {
                return Err(Error::NegativeWeight { omega, value: wf });
            }
            if wg < 0.0 {
                return Err(Error::NegativeWeight { omega, value: wg });
            }
            if wf == 0.0 && wg == 0.0 {
                continue;
            }
            for &(k, v) in &d.entries {
                let j = (k as i64 + omega) as usize;
                anti[k] += wf * v * v;
                anti[n + j] += wg * v * v;
            }
            jumps.push((d, wf, wg));
        }
        let corrected = CorrectedHamiltonian::new(&basis, &coeffs);
        let alpha2 = basis.params().alpha * basis.params().alpha;
        let h_bare = basis.hamiltonian_diag();
        let mut h_eff = h_bare.clone();
        for k in 0..n {
            h_eff[k] += alpha2 * corrected.diag0[k];
            h_eff[n + k] += alpha2 * corrected.diag1[k];
        }
        let scale = basis.params().dissipative_scale();
        Ok(Self {
            kind: GeneratorKind::Lindblad,
            basis,
            coeffs: Some(coeffs),
            scale,
            h_bare,
            h_eff,
            corrected: Some(corrected),
            redfield: None,
            lindblad: Some(LindbladOps { jumps, anti }),
        })
    }

    /// Secular projection: drops every `omega' != omega` cross term of the
    /// Redfield generator, yielding the Lindblad generator on the same basis
    /// and coefficients. Already-secular generators are returned unchanged.
    pub fn secular_projected(&self) -> Result<Generator> {
        match self.kind {
            GeneratorKind::Redfield => {
                Generator::lindblad(self.basis.clone(), self.coeffs.clone().unwrap())
            }
            _ => Ok(self.clone()),
        }
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn basis(&self) -> &LadderBasis {
        &self.basis
    }

    pub fn coeffs(&self) -> Option<&CoeffSet> {
        self.coeffs.as_ref()
    }

    /// Dissipative prefactor `alpha^2/eps`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Diagonal of the Hamiltonian the generator actually commutes with
    /// (`H_s` for Redfield, `H_s + alpha^2 H` for Lindblad).
    pub fn effective_hamiltonian_diag(&self) -> &[f64] {
        &self.h_eff
    }

    pub fn corrected_hamiltonian(&self) -> Option<&CorrectedHamiltonian> {
        self.corrected.as_ref()
    }

    /// Time derivative `d rho / dt` on a block density.
    pub fn apply(&self, rho: &BlockDensity) -> Result<BlockDensity> {
        if rho.n_max() != self.basis.n_max() {
            return Err(Error::DimensionMismatch(format!(
                "state has n_max {} but generator expects {}",
                rho.n_max(),
                self.basis.n_max()
            )));
        }
        BlockDensity::from_full(&self.apply_full(&rho.to_full()))
    }

    /// Time derivative on the full `2 n_max x 2 n_max` matrix.
    pub fn apply_full(&self, rho: &CMatrix) -> CMatrix {
        let mut out = commutator_with_diagonal(&self.h_eff, self.basis.params().epsilon, rho);
        match self.kind {
            GeneratorKind::VonNeumann => {}
            GeneratorKind::Redfield => {
                let r = self.redfield_dissipator(rho);
                out.zip_apply(&r, |o, v| *o += C64::new(self.scale, 0.0) * v);
            }
            GeneratorKind::Lindblad => {
                let d = self.gkls_dissipator(rho);
                out.zip_apply(&d, |o, v| *o += C64::new(self.scale, 0.0) * v);
            }
        }
        out
    }

    /// Dissipative part of the action: [`Generator::apply_full`] minus the
    /// bare von Neumann commutator. For Lindblad this includes the corrected
    /// Hamiltonian commutator.
    pub fn dissipative_action_full(&self, rho: &CMatrix) -> CMatrix {
        self.apply_full(rho) - commutator_with_diagonal(&self.h_bare, self.basis.params().epsilon, rho)
    }

    fn redfield_dissipator(&self, rho: &CMatrix) -> CMatrix {
        let ops = self.redfield.as_ref().expect("redfield ops present");
        let mut out = -(&ops.bf * rho);
        out += &ops.af * rho * &ops.d;
        out -= rho * &ops.bg;
        out += &ops.d * rho * &ops.ag;
        out -= rho * &ops.bf_adj;
        out += &ops.d_adj * rho * &ops.af_adj;
        out -= &ops.bg_adj * rho;
        out += &ops.ag_adj * rho * &ops.d_adj;
        out
    }

    fn gkls_dissipator(&self, rho: &CMatrix) -> CMatrix {
        let ops = self.lindblad.as_ref().expect("lindblad ops present");
        let n = self.basis.n_max();
        let dim = 2 * n;
        let mut out = CMatrix::zeros(dim, dim);
        for (d, wf, wg) in &ops.jumps {
            let off = d.omega;
            for &(k, vk) in &d.entries {
                let row1 = n + (k as i64 + off) as usize;
                for &(k2, vk2) in &d.entries {
                    let col1 = n + (k2 as i64 + off) as usize;
                    let w = vk * vk2;
                    // a_F D^dag rho D: reads the (0,0) block, feeds (1,1).
                    out[(row1, col1)] += C64::new(wf * w, 0.0) * rho[(k, k2)];
                    // a_G D rho D^dag: reads the (1,1) block, feeds (0,0).
                    out[(k, k2)] += C64::new(wg * w, 0.0) * rho[(row1, col1)];
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let w = 0.5 * (ops.anti[i] + ops.anti[j]);
                out[(i, j)] -= C64::new(w, 0.0) * rho[(i, j)];
            }
        }
        out
    }

    /// Dense superoperator matrix of dimension `(2 n_max)^2`, column `j`
    /// being the column-major vectorization of `apply(E_j)` for the matrix
    /// unit `E_j`. Guarded to `n_max <= 16`.
    pub fn matricize(&self) -> Result<CMatrix> {
        const LIMIT: usize = 16;
        let n = self.basis.n_max();
        if n > LIMIT {
            return Err(Error::SizeGuard { n_max: n, limit: LIMIT });
        }
        let dim = 2 * n;
        let sdim = dim * dim;
        let mut sup = CMatrix::zeros(sdim, sdim);
        let mut unit = CMatrix::zeros(dim, dim);
        for c in 0..dim {
            for r in 0..dim {
                unit[(r, c)] = C64::new(1.0, 0.0);
                let image = self.apply_full(&unit);
                unit[(r, c)] = C64::new(0.0, 0.0);
                let j = c * dim + r;
                sup.column_mut(j).copy_from_slice(image.as_slice());
            }
        }
        Ok(sup)
    }
}

/// `-(i/eps) [diag(h), rho]`, elementwise `-(i/eps)(h_i - h_j) rho_ij`.
fn commutator_with_diagonal(h: &[f64], eps: f64, rho: &CMatrix) -> CMatrix {
    let dim = h.len();
    let mut out = CMatrix::zeros(dim, dim);
    for j in 0..dim {
        for i in 0..dim {
            let gap = (h[i] - h[j]) / eps;
            out[(i, j)] = C64::new(0.0, -gap) * rho[(i, j)];
        }
    }
    out
}

fn check_compatible(basis: &LadderBasis, coeffs: &CoeffSet) -> Result<()> {
    if coeffs.omega_max() < basis.omega_max() {
        return Err(Error::DimensionMismatch(format!(
            "coefficients tabulated to |omega| <= {} but the basis needs {}",
            coeffs.omega_max(),
            basis.omega_max()
        )));
    }
    if coeffs.eps() != basis.params().epsilon || coeffs.ebar0() != basis.params().ebar0 {
        return Err(Error::DimensionMismatch(
            "coefficient table was evaluated for different (eps, ebar0)".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::WideBand;
    use crate::ModelParams;
    use approx::assert_abs_diff_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn setup(n_max: usize, g: f64, alpha: f64, band: Option<f64>) -> (LadderBasis, CoeffSet) {
        let params = ModelParams { epsilon: 0.5, alpha, g, ebar0: 0.0, beta: 1.0 };
        let basis = LadderBasis::new(params, n_max).unwrap();
        let wb = WideBand::new(1.0, band, 1.0).unwrap();
        let coeffs = CoeffSet::wideband(&wb, params.epsilon, params.ebar0, basis.omega_max()).unwrap();
        (basis, coeffs)
    }

    fn max_entry_norm(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn random_hermitian(n: usize, rng: &mut StdRng) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
            for j in (i + 1)..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn decoupled_generator_is_von_neumann() {
        let (basis, coeffs) = setup(4, 0.7, 0.0, None);
        let red = Generator::redfield(basis.clone(), coeffs.clone()).unwrap();
        let vn = Generator::von_neumann(basis.clone());
        let mut rng = StdRng::seed_from_u64(7);
        let rho = random_hermitian(8, &mut rng);
        let diff = (red.apply_full(&rho) - vn.apply_full(&rho)).norm();
        assert_abs_diff_eq!(diff, 0.0, epsilon = 1e-15);

        // Eigenprojectors are stationary under the closed dynamics.
        let proj = BlockDensity::eigenstate(4, 0, 2).unwrap();
        let dot = vn.apply(&proj).unwrap();
        assert_abs_diff_eq!(dot.to_full().norm(), 0.0, epsilon = 1e-15);
    }

    /// Independent Kronecker-product assembly of the Redfield superoperator,
    /// term by term from the double frequency sum with explicit h.c.
    /// expansion; column-major convention `vec(A X B) = (B^T kron A) vec(X)`.
    fn kron_redfield_oracle(basis: &LadderBasis, coeffs: &CoeffSet) -> CMatrix {
        let n = basis.n_max();
        let dim = 2 * n;
        let sdim = dim * dim;
        let eye = CMatrix::identity(dim, dim);
        let mut sup = CMatrix::zeros(sdim, sdim);

        // von Neumann part.
        let h = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(basis.hamiltonian_diag()[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let mi_eps = C64::new(0.0, -1.0 / basis.params().epsilon);
        sup += (eye.transpose().kronecker(&h) - h.transpose().kronecker(&eye)) * mi_eps;

        let scale = C64::new(basis.params().dissipative_scale(), 0.0);
        for omega in -basis.omega_max()..=basis.omega_max() {
            let d_w = basis.d_operator(omega).to_matrix();
            let f = coeffs.f(omega);
            let g = coeffs.g(omega);
            for omega_p in -basis.omega_max()..=basis.omega_max() {
                let d_wp = basis.d_operator(omega_p).to_matrix();
                let mut term = CMatrix::zeros(sdim, sdim);
                // F(w) (D' D^dag rho - D^dag rho D')
                let dd = &d_wp * d_w.adjoint();
                term += eye.transpose().kronecker(&dd) * f;
                term -= d_wp.transpose().kronecker(&d_w.adjoint()) * f;
                // G(w) (rho D^dag D' - D' rho D^dag)
                let dd = d_w.adjoint() * &d_wp;
                term += dd.transpose().kronecker(&eye) * g;
                term -= d_w.adjoint().transpose().kronecker(&d_wp) * g;
                // h.c.: F*(w) (rho D D'^dag - D'^dag rho D)
                let dd = &d_w * d_wp.adjoint();
                term += dd.transpose().kronecker(&eye) * f.conj();
                term -= d_w.transpose().kronecker(&d_wp.adjoint()) * f.conj();
                // h.c.: G*(w) (D'^dag D rho - D rho D'^dag)
                let dd = d_wp.adjoint() * &d_w;
                term += eye.transpose().kronecker(&dd) * g.conj();
                term -= d_wp.adjoint().transpose().kronecker(&d_w) * g.conj();
                sup -= term * scale;
            }
        }
        sup
    }

    #[test]
    fn toy_superoperator_matches_kron_oracle() {
        let (basis, coeffs) = setup(2, 0.6, 0.2, Some(10.0));
        let gen = Generator::redfield(basis.clone(), coeffs.clone()).unwrap();
        let sup = gen.matricize().unwrap();
        let oracle = kron_redfield_oracle(&basis, &coeffs);
        let diff = (&sup - &oracle).norm();
        assert!(diff < 1e-13, "superoperator mismatch {diff}");

        // apply agrees with the matricized action on random Hermitian states.
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let rho = random_hermitian(4, &mut rng);
            let direct = gen.apply_full(&rho);
            let vec = CMatrix::from_column_slice(16, 1, rho.as_slice());
            let mapped = &sup * vec;
            let diff: f64 = direct
                .as_slice()
                .iter()
                .zip(mapped.as_slice())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-12);
        }
    }

    /// Secular restriction of the Kronecker oracle: same assembly with only
    /// the `omega' = omega` terms kept.
    fn kron_secular_oracle(basis: &LadderBasis, coeffs: &CoeffSet) -> CMatrix {
        let n = basis.n_max();
        let dim = 2 * n;
        let sdim = dim * dim;
        let eye = CMatrix::identity(dim, dim);
        let mut sup = CMatrix::zeros(sdim, sdim);
        let h = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                C64::new(basis.hamiltonian_diag()[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let mi_eps = C64::new(0.0, -1.0 / basis.params().epsilon);
        sup += (eye.transpose().kronecker(&h) - h.transpose().kronecker(&eye)) * mi_eps;
        let scale = C64::new(basis.params().dissipative_scale(), 0.0);
        for omega in -basis.omega_max()..=basis.omega_max() {
            let d_w = basis.d_operator(omega).to_matrix();
            let f = coeffs.f(omega);
            let g = coeffs.g(omega);
            let mut term = CMatrix::zeros(sdim, sdim);
            let dd = &d_w * d_w.adjoint();
            term += eye.transpose().kronecker(&dd) * f;
            term -= d_w.transpose().kronecker(&d_w.adjoint()) * f;
            let dd = d_w.adjoint() * &d_w;
            term += dd.transpose().kronecker(&eye) * g;
            term -= d_w.adjoint().transpose().kronecker(&d_w) * g;
            let dd = &d_w * d_w.adjoint();
            term += dd.transpose().kronecker(&eye) * f.conj();
            term -= d_w.transpose().kronecker(&d_w.adjoint()) * f.conj();
            let dd = d_w.adjoint() * &d_w;
            term += eye.transpose().kronecker(&dd) * g.conj();
            term -= d_w.adjoint().transpose().kronecker(&d_w) * g.conj();
            sup -= term * scale;
        }
        sup
    }

    #[test]
    fn lindblad_matches_secular_restricted_redfield() {
        let (basis, coeffs) = setup(3, 0.8, 0.2, Some(10.0));
        let lind = Generator::lindblad(basis.clone(), coeffs.clone()).unwrap();
        let sup = lind.matricize().unwrap();
        let oracle = kron_secular_oracle(&basis, &coeffs);
        let diff = max_entry_norm(&(&sup - &oracle));
        assert!(diff < 1e-14, "secular mismatch {diff}");

        // And the projection API routes Redfield to exactly this generator.
        let red = Generator::redfield(basis, coeffs).unwrap();
        let projected = red.secular_projected().unwrap();
        assert_eq!(projected.kind(), GeneratorKind::Lindblad);
        let diff = max_entry_norm(&(projected.matricize().unwrap() - sup));
        assert_abs_diff_eq!(diff, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn undisplaced_secular_projection_is_identity() {
        // g = 0: only omega = 0 contributes, so the cross terms the secular
        // approximation drops are absent and both generators coincide.
        let (basis, coeffs) = setup(3, 0.0, 0.2, Some(10.0));
        let red = Generator::redfield(basis.clone(), coeffs.clone()).unwrap();
        let lind = Generator::lindblad(basis, coeffs).unwrap();
        let diff = max_entry_norm(&(red.matricize().unwrap() - lind.matricize().unwrap()));
        assert!(diff < 1e-14, "g = 0 generators differ by {diff}");
    }

    #[test]
    fn trace_and_hermiticity_preserved() {
        let (basis, coeffs) = setup(6, 0.9, 0.2, Some(10.0));
        let red = Generator::redfield(basis.clone(), coeffs.clone()).unwrap();
        let lind = Generator::lindblad(basis, coeffs).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for gen in [&red, &lind] {
            for _ in 0..10 {
                let rho = random_hermitian(12, &mut rng);
                let out = gen.apply_full(&rho);
                assert!(out.trace().norm() < 1e-12 * rho.norm());
                assert!(crate::linalg::hermiticity_residual(&out) < 1e-12 * out.norm().max(1.0));
            }
        }
    }

    #[test]
    fn lindblad_preserves_diagonality_exactly() {
        let (basis, coeffs) = setup(6, 1.1, 0.2, Some(10.0));
        let lind = Generator::lindblad(basis, coeffs).unwrap();
        let rho = BlockDensity::from_populations(&[0.3, 0.2, 0.1, 0.1, 0.05, 0.05], &[0.1, 0.05, 0.03, 0.01, 0.01, 0.0]).unwrap();
        let out = lind.apply(&rho).unwrap();
        assert_eq!(out.coherence_norm(), 0.0);
        assert_eq!(out.max_block_offdiagonal(), 0.0);
    }

    #[test]
    fn redfield_diagonal_behavior() {
        // The electronic coherence block stays exactly zero for any g, while
        // cross-frequency terms do populate in-block off-diagonals once the
        // ladders are displaced; that is precisely what the secular
        // approximation removes.
        let rho = BlockDensity::from_populations(&[0.5, 0.3, 0.2], &[0.0, 0.0, 0.0]).unwrap();

        let (basis, coeffs) = setup(3, 0.9, 0.2, Some(10.0));
        let red = Generator::redfield(basis, coeffs).unwrap();
        let out = red.apply(&rho).unwrap();
        assert_eq!(out.coherence_norm(), 0.0);
        assert!(out.max_block_offdiagonal() > 1e-6);

        let (basis, coeffs) = setup(3, 0.0, 0.2, Some(10.0));
        let red = Generator::redfield(basis, coeffs).unwrap();
        let out = red.apply(&rho).unwrap();
        assert_eq!(out.coherence_norm(), 0.0);
        assert_abs_diff_eq!(out.max_block_offdiagonal(), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn corrected_hamiltonian_matches_dense_assembly() {
        let (basis, coeffs) = setup(5, 0.7, 0.15, Some(10.0));
        let lind = Generator::lindblad(basis.clone(), coeffs.clone()).unwrap();
        let corr = lind.corrected_hamiltonian().unwrap();

        let dim = basis.dim();
        let mut dense = CMatrix::zeros(dim, dim);
        for omega in -basis.omega_max()..=basis.omega_max() {
            let d = basis.d_operator(omega).to_matrix();
            dense += &d * d.adjoint() * C64::new(coeffs.b_f(omega), 0.0);
            dense -= d.adjoint() * &d * C64::new(coeffs.b_g(omega), 0.0);
        }
        for k in 0..basis.n_max() {
            assert_abs_diff_eq!(dense[(k, k)].re, corr.diag0[k], epsilon = 1e-13);
            assert_abs_diff_eq!(
                dense[(basis.n_max() + k, basis.n_max() + k)].re,
                corr.diag1[k],
                epsilon = 1e-13
            );
        }
        // Off-diagonal elements vanish: the eigenstates are unchanged.
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    assert_abs_diff_eq!(dense[(i, j)].norm(), 0.0, epsilon = 1e-15);
                }
            }
        }

        // All b's zero (infinite band): corrected Hamiltonian is H_s.
        let (basis, coeffs) = setup(5, 0.7, 0.15, None);
        let lind = Generator::lindblad(basis.clone(), coeffs).unwrap();
        assert!(lind.corrected_hamiltonian().unwrap().is_zero());
        assert_eq!(lind.effective_hamiltonian_diag(), &basis.hamiltonian_diag()[..]);
    }

    #[test]
    fn rate_matrix_limits() {
        // g = 0: only the omega = 0 channel survives.
        let (basis, coeffs) = setup(4, 0.0, 0.1, None);
        let rates = RateMatrix::build(&basis, &coeffs);
        let scale = basis.params().dissipative_scale();
        for i in 0..4 {
            for f in 0..4 {
                let expect = if i == f { scale * coeffs.a_f(0) } else { 0.0 };
                assert_abs_diff_eq!(rates.k01[(i, f)], expect, epsilon = 1e-15);
            }
        }

        // Cold bath: upward hops blocked by the Fermi step, downward hops at
        // full width.
        let params = ModelParams { epsilon: 0.5, alpha: 0.1, g: 0.8, ebar0: 0.0, beta: 1e9 };
        let basis = LadderBasis::new(params, 4).unwrap();
        let wb = WideBand::new(1.0, None, 1e9).unwrap();
        let coeffs = CoeffSet::wideband(&wb, 0.5, 0.0, 3).unwrap();
        let rates = RateMatrix::build(&basis, &coeffs);
        let scale = params.dissipative_scale();
        for i in 0..4 {
            for f in 0..4 {
                if f > i {
                    assert_abs_diff_eq!(rates.k01[(i, f)], 0.0, epsilon = 1e-12);
                }
                if i > f {
                    let fc = basis.fc(f, i);
                    assert_abs_diff_eq!(rates.k10[(i, f)], scale * fc * fc, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn thermal_state_is_stationary_for_wideband_lindblad() {
        // Detailed balance a_F(w) = exp(-beta eps w) a_G(w) makes the
        // Boltzmann state an exact fixed point when ebar0 = 0.
        let (basis, coeffs) = setup(8, 0.9, 0.1, None);
        let lind = Generator::lindblad(basis.clone(), coeffs).unwrap();
        let rho = BlockDensity::thermal(&basis);
        let out = lind.apply(&rho).unwrap();
        assert!(out.to_full().norm() < 1e-14);
    }

    #[test]
    fn stationary_populations_annihilate_lindblad_diagonal() {
        let (basis, coeffs) = setup(4, 0.8, 0.2, None);
        let rates = RateMatrix::build(&basis, &coeffs);
        let stat = rates.stationary().unwrap();
        let (lambda, theta) = stat.split_at(4);
        let rho = BlockDensity::from_populations(lambda, theta).unwrap();
        let lind = Generator::lindblad(basis, coeffs).unwrap();
        let out = lind.apply(&rho).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(out.rho0[(k, k)].re, 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(out.rho1[(k, k)].re, 0.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn matricize_trace_row_and_spectrum() {
        let (basis, coeffs) = setup(6, 0.8, 0.1, None);
        let lind = Generator::lindblad(basis, coeffs).unwrap();
        let sup = lind.matricize().unwrap();
        let dim = 12;

        // vec(I) is a left null vector: trace preservation.
        let mut residual = 0.0f64;
        for col in 0..dim * dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..dim {
                acc += sup[(k * dim + k, col)];
            }
            residual = residual.max(acc.norm());
        }
        assert!(residual < 1e-10, "trace row residual {residual}");

        // GKLS contractivity: no eigenvalue in the right half plane.
        let max_re = crate::linalg::complex_spectrum(&sup)
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_re <= 1e-10, "eigenvalue with Re = {max_re}");
    }

    #[test]
    fn matricize_size_guard() {
        let (basis, coeffs) = setup(17, 0.5, 0.1, None);
        let lind = Generator::lindblad(basis, coeffs).unwrap();
        assert!(matches!(lind.matricize(), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn incompatible_coefficients_rejected() {
        let params = ModelParams { epsilon: 0.5, alpha: 0.1, g: 0.5, ebar0: 0.0, beta: 1.0 };
        let basis = LadderBasis::new(params, 8).unwrap();
        let wb = WideBand::new(1.0, None, 1.0).unwrap();
        let short = CoeffSet::wideband(&wb, 0.5, 0.0, 3).unwrap();
        assert!(Generator::redfield(basis.clone(), short).is_err());
        let wrong_eps = CoeffSet::wideband(&wb, 0.4, 0.0, 7).unwrap();
        assert!(Generator::lindblad(basis, wrong_eps).is_err());
    }
}
