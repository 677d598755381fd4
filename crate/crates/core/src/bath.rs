//! Fermionic reservoirs and the half-Fourier coefficients they induce.
//!
//! The bath enters the master equations only through the Laplace transforms
//! `F(omega)`, `G(omega)` of its time correlation functions, split into real
//! and imaginary parts: `F = a_F/2 + i b_F`, `G = a_G/2 + i b_G`. The `a`
//! coefficients are broadened spectral densities (hopping weights), the `b`
//! coefficients are principal-value integrals (energy shifts).
//!
//! Broadening uses the matched Lorentzian pair `delta_sigma(x) =
//! (sigma/pi)/(x^2 + sigma^2)` and PV kernel `x/(x^2 + sigma^2)`: real and
//! imaginary parts of `1/(x - i sigma)`, so the Kramers-Kronig relation
//! between the two survives regularization.

use crate::par::{map_collect, map_collect_seq};
use crate::quad::principal_value;
use crate::{Error, Result};

/// Fermi-Dirac occupation `1 / (1 + exp(beta z))`, overflow-safe.
pub fn fermi(beta: f64, z: f64) -> f64 {
    let bz = beta * z;
    if bz > 0.0 {
        let e = (-bz).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + bz.exp())
    }
}

/// Derivative `d fermi / dz = -beta f (1 - f)`.
pub fn fermi_derivative(beta: f64, z: f64) -> f64 {
    let f = fermi(beta, z);
    -beta * f * (1.0 - f)
}

/// Explicit bath: discrete levels `(E_k, V_k)` with Lorentzian broadening of
/// width `sigma`.
#[derive(Debug, Clone)]
pub struct DiscreteBath {
    /// `(energy, coupling)` pairs; couplings are real.
    pub levels: Vec<(f64, f64)>,
    pub beta: f64,
    pub sigma: f64,
}

impl DiscreteBath {
    pub fn new(levels: Vec<(f64, f64)>, beta: f64, sigma: f64) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidParams("bath needs at least one level".into()));
        }
        if !(sigma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "broadening sigma must be positive, got {sigma}"
            )));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { levels, beta, sigma })
    }

    /// `n` uniformly spaced levels on `[e_min, e_max]` (cell midpoints) with
    /// couplings `V^2 = Gamma dE / (2 pi)` matching a flat level-width
    /// `Gamma`, and `sigma = sigma_factor * spacing`.
    pub fn uniform(
        n: usize,
        e_min: f64,
        e_max: f64,
        gamma: f64,
        beta: f64,
        sigma_factor: f64,
    ) -> Result<Self> {
        if n == 0 || !(e_max > e_min) || !(gamma > 0.0) {
            return Err(Error::InvalidParams(
                "uniform bath needs n > 0, e_max > e_min, gamma > 0".into(),
            ));
        }
        let de = (e_max - e_min) / n as f64;
        let v = (gamma * de / (2.0 * std::f64::consts::PI)).sqrt();
        let levels = (0..n)
            .map(|k| (e_min + (k as f64 + 0.5) * de, v))
            .collect();
        Self::new(levels, beta, sigma_factor * de)
    }

    pub fn mean_spacing(&self) -> f64 {
        if self.levels.len() < 2 {
            return f64::INFINITY;
        }
        let (lo, hi) = self
            .levels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(e, _)| {
                (lo.min(e), hi.max(e))
            });
        (hi - lo) / (self.levels.len() - 1) as f64
    }
}

/// Flat-band reservoir: constant level width `Gamma` over `[-D, D]`;
/// `half_width = None` means an infinite band.
#[derive(Debug, Clone)]
pub struct WideBand {
    pub gamma: f64,
    pub half_width: Option<f64>,
    pub beta: f64,
}

impl WideBand {
    pub fn new(gamma: f64, half_width: Option<f64>, beta: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
        }
        if let Some(d) = half_width {
            if !(d > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "band half-width must be positive, got {d}"
                )));
            }
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { gamma, half_width, beta })
    }
}

/// Bath description accepted by generator assembly.
#[derive(Debug, Clone)]
pub enum BathSpectrum {
    Discrete(DiscreteBath),
    WideBand(WideBand),
}

impl BathSpectrum {
    pub fn beta(&self) -> f64 {
        match self {
            BathSpectrum::Discrete(b) => b.beta,
            BathSpectrum::WideBand(w) => w.beta,
        }
    }

    pub fn coeffs(&self, eps: f64, ebar0: f64, omega_max: i64) -> Result<CoeffSet> {
        match self {
            BathSpectrum::Discrete(b) => CoeffSet::discrete(b, eps, ebar0, omega_max),
            BathSpectrum::WideBand(w) => CoeffSet::wideband(w, eps, ebar0, omega_max),
        }
    }
}

/// Tabulated coefficient quadruple over `omega in [-omega_max, omega_max]`.
///
/// Coefficients are evaluated at the transition energy `eps * omega + ebar0`,
/// the Bohr gap of the `D(omega)` transitions. Lookups outside the tabulated
/// range return zero, matching the omega-sum truncation of the generators.
#[derive(Debug, Clone)]
pub struct CoeffSet {
    eps: f64,
    ebar0: f64,
    omega_max: i64,
    band: Option<f64>,
    a_f: Vec<f64>,
    b_f: Vec<f64>,
    a_g: Vec<f64>,
    b_g: Vec<f64>,
}

/// Absolute tolerance of the principal-value quadratures behind the
/// wide-band `b` coefficients.
pub const PV_TOL: f64 = 1e-10;

impl CoeffSet {
    /// Coefficients of a discrete broadened bath.
    pub fn discrete(bath: &DiscreteBath, eps: f64, ebar0: f64, omega_max: i64) -> Result<CoeffSet> {
        check_tab_args(eps, omega_max)?;
        let count = (2 * omega_max + 1) as usize;
        let rows = map_collect(count, |idx| discrete_row(bath, eps, ebar0, omega_max, idx));
        CoeffSet::from_rows(eps, ebar0, omega_max, None, rows)
    }

    /// Sequential variant of [`CoeffSet::discrete`] for benchmarking.
    pub fn discrete_seq(
        bath: &DiscreteBath,
        eps: f64,
        ebar0: f64,
        omega_max: i64,
    ) -> Result<CoeffSet> {
        check_tab_args(eps, omega_max)?;
        let count = (2 * omega_max + 1) as usize;
        let rows = map_collect_seq(count, |idx| discrete_row(bath, eps, ebar0, omega_max, idx));
        CoeffSet::from_rows(eps, ebar0, omega_max, None, rows)
    }

    /// Wide-band coefficients: `a` in closed form (`Gamma f` inside the band,
    /// zero outside), `b` by principal-value quadrature over the band.
    ///
    /// An infinite band has no finite `b`: the occupied side of the PV
    /// integral grows logarithmically with the band width, so the energy
    /// shift is dropped (`b = 0`) in that limit.
    pub fn wideband(wb: &WideBand, eps: f64, ebar0: f64, omega_max: i64) -> Result<CoeffSet> {
        check_tab_args(eps, omega_max)?;
        let count = (2 * omega_max + 1) as usize;
        let rows = map_collect(count, |idx| wideband_row(wb, eps, ebar0, omega_max, idx));
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        CoeffSet::from_rows(eps, ebar0, omega_max, wb.half_width, rows)
    }

    /// Sequential variant of [`CoeffSet::wideband`] for benchmarking.
    pub fn wideband_seq(wb: &WideBand, eps: f64, ebar0: f64, omega_max: i64) -> Result<CoeffSet> {
        check_tab_args(eps, omega_max)?;
        let count = (2 * omega_max + 1) as usize;
        let rows = map_collect_seq(count, |idx| wideband_row(wb, eps, ebar0, omega_max, idx));
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
        CoeffSet::from_rows(eps, ebar0, omega_max, wb.half_width, rows)
    }

    fn from_rows(
        eps: f64,
        ebar0: f64,
        omega_max: i64,
        band: Option<f64>,
        rows: Vec<[f64; 4]>,
    ) -> Result<CoeffSet> {
        let mut set = CoeffSet {
            eps,
            ebar0,
            omega_max,
            band,
            a_f: Vec::with_capacity(rows.len()),
            b_f: Vec::with_capacity(rows.len()),
            a_g: Vec::with_capacity(rows.len()),
            b_g: Vec::with_capacity(rows.len()),
        };
        for (idx, row) in rows.into_iter().enumerate() {
            for value in [row[0], row[2]] {
                if value < 0.0 {
                    return Err(Error::NegativeWeight {
                        omega: idx as i64 - omega_max,
                        value,
                    });
                }
            }
            set.a_f.push(row[0]);
            set.b_f.push(row[1]);
            set.a_g.push(row[2]);
            set.b_g.push(row[3]);
        }
        Ok(set)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn ebar0(&self) -> f64 {
        self.ebar0
    }

    pub fn omega_max(&self) -> i64 {
        self.omega_max
    }

    fn idx(&self, omega: i64) -> Option<usize> {
        (omega.abs() <= self.omega_max).then_some((omega + self.omega_max) as usize)
    }

    pub fn a_f(&self, omega: i64) -> f64 {
        self.idx(omega).map_or(0.0, |i| self.a_f[i])
    }

    pub fn b_f(&self, omega: i64) -> f64 {
        self.idx(omega).map_or(0.0, |i| self.b_f[i])
    }

    pub fn a_g(&self, omega: i64) -> f64 {
        self.idx(omega).map_or(0.0, |i| self.a_g[i])
    }

    pub fn b_g(&self, omega: i64) -> f64 {
        self.idx(omega).map_or(0.0, |i| self.b_g[i])
    }

    /// Complex `F(omega) = a_F/2 + i b_F`.
    pub fn f(&self, omega: i64) -> crate::C64 {
        crate::C64::new(0.5 * self.a_f(omega), self.b_f(omega))
    }

    /// Complex `G(omega) = a_G/2 + i b_G`.
    pub fn g(&self, omega: i64) -> crate::C64 {
        crate::C64::new(0.5 * self.a_g(omega), self.b_g(omega))
    }

    /// True when the transition energy of `omega` falls on or outside the
    /// edge of a finite band, i.e. the tabulated coefficients were cut off
    /// to zero.
    pub fn outside_band(&self, omega: i64) -> bool {
        match self.band {
            Some(d) => (self.eps * omega as f64 + self.ebar0).abs() >= d,
            None => false,
        }
    }
}

fn discrete_row(
    bath: &DiscreteBath,
    eps: f64,
    ebar0: f64,
    omega_max: i64,
    idx: usize,
) -> [f64; 4] {
    let omega = idx as i64 - omega_max;
    let x = eps * omega as f64 + ebar0;
    let sigma = bath.sigma;
    let mut row = [0.0f64; 4];
    for &(e, v) in &bath.levels {
        let v2 = v * v;
        let f = fermi(bath.beta, e);
        // 1 - f(e) evaluated as f(-e) to keep relative precision in the
        // exponential tails.
        let g = fermi(bath.beta, -e);
        let d = e - x;
        let denom = d * d + sigma * sigma;
        let delta = sigma / std::f64::consts::PI / denom;
        let pv = d / denom;
        row[0] += 2.0 * std::f64::consts::PI * v2 * f * delta;
        row[1] += v2 * f * pv;
        row[2] += 2.0 * std::f64::consts::PI * v2 * g * delta;
        row[3] += v2 * g * pv;
    }
    row
}

fn wideband_row(
    wb: &WideBand,
    eps: f64,
    ebar0: f64,
    omega_max: i64,
    idx: usize,
) -> Result<[f64; 4]> {
    let omega = idx as i64 - omega_max;
    let x = eps * omega as f64 + ebar0;
    // Strictly inside: on the band edge the PV integral diverges, so edge
    // frequencies are treated as cut off along with everything beyond.
    let inside = wb.half_width.map_or(true, |d| x.abs() < d);
    if !inside {
        return Ok([0.0, 0.0, 0.0, 0.0]);
    }
    let a_f = wb.gamma * fermi(wb.beta, x);
    let a_g = wb.gamma * fermi(wb.beta, -x);
    let (b_f, b_g) = match wb.half_width {
        None => (0.0, 0.0),
        Some(d) => {
            let beta = wb.beta;
            let scale = wb.gamma / (2.0 * std::f64::consts::PI);
            let bf = principal_value(
                &|e| fermi(beta, e),
                -d,
                d,
                x,
                fermi_derivative(beta, x),
                PV_TOL,
            )?;
            let bg = principal_value(
                &|e| fermi(beta, -e),
                -d,
                d,
                x,
                -fermi_derivative(beta, x),
                PV_TOL,
            )?;
            (scale * bf, scale * bg)
        }
    };
    Ok([a_f, b_f, a_g, b_g])
}

fn check_tab_args(eps: f64, omega_max: i64) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    if omega_max < 0 {
        return Err(Error::InvalidParams(format!(
            "omega_max must be nonnegative, got {omega_max}"
        )));
    }
    Ok(())
}

/// Supremum over the tabulated `omega` range of
/// `|a_F_discrete(omega) - Gamma f(eps omega + ebar0)| / Gamma`.
///
/// When the Fermi step is sharper than the bath broadening resolves
/// (`1/beta < sigma`), frequencies within `5 sigma` of the step are skipped;
/// no finite broadening can reproduce the step there.
pub fn convergence_to_wideband(
    bath: &DiscreteBath,
    wb: &WideBand,
    eps: f64,
    ebar0: f64,
    omega_max: i64,
) -> Result<f64> {
    let coeffs = CoeffSet::discrete(bath, eps, ebar0, omega_max)?;
    let step_unresolved = 1.0 / bath.beta < bath.sigma;
    let mut sup = 0.0f64;
    for omega in -omega_max..=omega_max {
        let x = eps * omega as f64 + ebar0;
        if step_unresolved && x.abs() <= 5.0 * bath.sigma {
            continue;
        }
        let target = wb.gamma * fermi(wb.beta, x);
        sup = sup.max((coeffs.a_f(omega) - target).abs() / wb.gamma);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn fermi_values() {
        assert_abs_diff_eq!(fermi(1.0, 0.0), 0.5);
        assert_abs_diff_eq!(fermi(2.0, 1e6), 0.0);
        assert_abs_diff_eq!(fermi(2.0, -1e6), 1.0);
        assert_abs_diff_eq!(fermi(1.0, 1.0), 1.0 / (1.0 + std::f64::consts::E), epsilon = 1e-15);
        assert!(fermi(1e12, 1e12).is_finite());
    }

    #[test]
    fn single_level_peak_value() {
        // One level at E = 0 with V = 1, beta = 1, sigma = 0.1. At omega = 0
        // the Lorentzian peak gives a_F(0) = 2 pi f(0) delta_sigma(0)
        // = 2 pi * 0.5 / (pi sigma) = 1/sigma.
        let bath = DiscreteBath::new(vec![(0.0, 1.0)], 1.0, 0.1).unwrap();
        let c = CoeffSet::discrete(&bath, 0.5, 0.0, 4).unwrap();
        assert_abs_diff_eq!(c.a_f(0), 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.a_g(0), 10.0, epsilon = 1e-12);
        // PV kernel is odd: b vanishes exactly on resonance.
        assert_eq!(c.b_f(0), 0.0);
        assert_eq!(c.b_g(0), 0.0);
    }

    #[test]
    fn decoupled_bath_gives_zero() {
        let bath = DiscreteBath::new(vec![(0.3, 0.0), (-0.7, 0.0)], 1.0, 0.05).unwrap();
        let c = CoeffSet::discrete(&bath, 0.5, 0.0, 6).unwrap();
        for omega in -6..=6 {
            assert_eq!(c.a_f(omega), 0.0);
            assert_eq!(c.b_f(omega), 0.0);
            assert_eq!(c.a_g(omega), 0.0);
            assert_eq!(c.b_g(omega), 0.0);
        }
    }

    #[test]
    fn wideband_closed_form_values() {
        let wb = WideBand::new(1.0, None, 1.0).unwrap();
        let c = CoeffSet::wideband(&wb, 0.5, 0.0, 8).unwrap();
        assert_abs_diff_eq!(c.a_f(0), 0.5, epsilon = 1e-15);
        // Infinite band: energy shifts dropped.
        assert_eq!(c.b_f(3), 0.0);

        // Effectively zero temperature: step function of the gap energy.
        let cold = WideBand::new(2.0, None, 1e9).unwrap();
        let c = CoeffSet::wideband(&cold, 1.0, 0.0, 4).unwrap();
        assert_abs_diff_eq!(c.a_f(-1), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.a_g(-1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn wideband_pv_quadrature_frozen_value() {
        // Gamma = 1, beta = 1, eps = 0.5, omega = 3, D = 10; reference from
        // an independent high-precision PV evaluation.
        let wb = WideBand::new(1.0, Some(10.0), 1.0).unwrap();
        let c = CoeffSet::wideband(&wb, 0.5, 0.0, 6).unwrap();
        assert_abs_diff_eq!(c.b_f(3), -0.34592814878703807, epsilon = 1e-9);
    }

    #[test]
    fn wideband_band_cutoff_flags() {
        let wb = WideBand::new(1.0, Some(2.0), 1.0).unwrap();
        let c = CoeffSet::wideband(&wb, 1.0, 0.0, 5).unwrap();
        assert!(c.outside_band(3));
        assert_eq!(c.a_f(3), 0.0);
        assert_eq!(c.b_f(3), 0.0);
        // The band edge itself counts as cut off: the PV integral diverges
        // there.
        assert!(c.outside_band(2));
        assert!(!c.outside_band(1));
        assert!(c.a_f(1) > 0.0);
    }

    #[test]
    fn b_parity_under_symmetric_band() {
        let wb = WideBand::new(1.3, Some(10.0), 1.0).unwrap();
        let c = CoeffSet::wideband(&wb, 0.5, 0.0, 8).unwrap();
        for omega in -8i64..=8 {
            assert_abs_diff_eq!(c.b_f(omega), -c.b_g(-omega), epsilon = 1e-8);
        }
    }

    #[test]
    fn sequential_and_parallel_tabulation_agree_bitwise() {
        let wb = WideBand::new(1.0, Some(8.0), 2.0).unwrap();
        let a = CoeffSet::wideband(&wb, 0.5, 0.0, 10).unwrap();
        let b = CoeffSet::wideband_seq(&wb, 0.5, 0.0, 10).unwrap();
        for omega in -10..=10 {
            assert_eq!(a.a_f(omega), b.a_f(omega));
            assert_eq!(a.b_f(omega), b.b_f(omega));
            assert_eq!(a.a_g(omega), b.a_g(omega));
            assert_eq!(a.b_g(omega), b.b_g(omega));
        }
    }

    #[test]
    fn discrete_converges_to_wideband() {
        let wb = WideBand::new(1.0, None, 1.0).unwrap();
        let bath = DiscreteBath::uniform(4000, -5.0, 5.0, 1.0, 1.0, 2.0).unwrap();
        let err = convergence_to_wideband(&bath, &wb, 0.5, 0.0, 6).unwrap();
        assert!(err < 0.02, "sup relative error {err}");
        // Small bath: diagnostic only, just has to produce a finite number.
        let small = DiscreteBath::uniform(10, -5.0, 5.0, 1.0, 1.0, 2.0).unwrap();
        let err = convergence_to_wideband(&small, &wb, 0.5, 0.0, 6).unwrap();
        assert!(err.is_finite());
    }

    #[test]
    fn uniform_bath_normalization() {
        let bath = DiscreteBath::uniform(100, -5.0, 5.0, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(bath.levels.len(), 100);
        assert_abs_diff_eq!(bath.mean_spacing(), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(bath.sigma, 0.2, epsilon = 1e-12);
        let v2_sum: f64 = bath.levels.iter().map(|&(_, v)| v * v).sum();
        assert_abs_diff_eq!(v2_sum, 10.0 / (2.0 * std::f64::consts::PI), epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn wideband_sum_rule_and_detailed_balance(
            omega in -20i64..=20,
            beta in 0.2f64..5.0,
            gamma in 0.1f64..3.0,
        ) {
            let wb = WideBand::new(gamma, None, beta).unwrap();
            let c = CoeffSet::wideband(&wb, 0.5, 0.0, 20).unwrap();
            let (af, ag) = (c.a_f(omega), c.a_g(omega));
            prop_assert!((af + ag - gamma).abs() < 1e-12);
            // Detailed balance a_F = exp(-beta eps omega) a_G, written in the
            // product form that avoids dividing by denormals.
            let x = 0.5 * omega as f64;
            prop_assert!((af - (-beta * x).exp() * ag).abs() < 1e-12 * gamma.max(ag));
        }

        #[test]
        fn broadened_densities_nonnegative(
            e1 in -3.0f64..3.0,
            e2 in -3.0f64..3.0,
            v in 0.0f64..2.0,
            beta in 0.2f64..5.0,
        ) {
            let bath = DiscreteBath::new(vec![(e1, v), (e2, 0.7)], beta, 0.05).unwrap();
            let c = CoeffSet::discrete(&bath, 0.4, 0.0, 12).unwrap();
            for omega in -12..=12 {
                prop_assert!(c.a_f(omega) >= 0.0);
                prop_assert!(c.a_g(omega) >= 0.0);
            }
        }
    }
}
