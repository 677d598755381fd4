//! Time propagation of block density matrices and classical rate equations.

use crate::density::BlockDensity;
use crate::generators::{Generator, RateMatrix};
use crate::{CMatrix, Error, Result};

/// Integration method: fixed-step classical RK4 or an embedded Dormand-Prince
/// 5(4) pair with step rejection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Rk4 { dt: f64 },
    Adaptive { rtol: f64, atol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    pub t_end: f64,
    /// Record every `record_stride`-th step (the final state is always
    /// recorded).
    pub record_stride: usize,
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, t_end: f64, record_stride: usize) -> Self {
        Self { method: Method::Rk4 { dt }, t_end, record_stride }
    }

    pub fn adaptive(rtol: f64, atol: f64, t_end: f64) -> Self {
        Self { method: Method::Adaptive { rtol, atol }, t_end, record_stride: 1 }
    }

    /// Default fixed step for a given model: `min(0.01, 5e-5 tau_R)`, capped
    /// by `2/n_max` to stay inside the RK4 stability region of the fastest
    /// Bohr frequency.
    pub fn default_dt(params: &crate::ModelParams, n_max: usize) -> f64 {
        let tau_r = params.relaxation_time();
        let mut dt = 0.01f64;
        if tau_r.is_finite() {
            dt = dt.min(5e-5 * tau_r);
        }
        dt.min(2.0 / n_max as f64)
    }

    fn validate(&self) -> Result<()> {
        match self.method {
            Method::Rk4 { dt } if !(dt > 0.0) => {
                return Err(Error::InvalidParams(format!("dt must be positive, got {dt}")))
            }
            Method::Adaptive { rtol, atol } if !(rtol > 0.0) || !(atol > 0.0) => {
                return Err(Error::InvalidParams("tolerances must be positive".into()))
            }
            _ => {}
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParams("record_stride must be at least 1".into()));
        }
        Ok(())
    }
}

/// Scalar observables of one recorded state.
#[derive(Debug, Clone)]
pub struct ObservableRecord {
    pub t: f64,
    pub trace: f64,
    pub trace0: f64,
    pub trace1: f64,
    pub lambda: Vec<f64>,
    pub theta: Vec<f64>,
    pub coherence_norm: f64,
    pub max_block_offdiagonal: f64,
    pub min_eigenvalue: f64,
}

/// Observables of a block density matrix; the minimum eigenvalue is computed
/// on the full Hermitian matrix.
pub fn observables(t: f64, rho: &BlockDensity) -> ObservableRecord {
    ObservableRecord {
        t,
        trace: rho.trace().re,
        trace0: rho.trace0(),
        trace1: rho.trace1(),
        lambda: rho.lambda(),
        theta: rho.theta(),
        coherence_norm: rho.coherence_norm(),
        max_block_offdiagonal: rho.max_block_offdiagonal(),
        min_eigenvalue: rho.min_eigenvalue(),
    }
}

/// Recorded quantum trajectory with conservation diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlockDensity>,
    pub observables: Vec<ObservableRecord>,
    /// `max_t |Tr rho(t) - 1|` over every step taken.
    pub max_trace_drift: f64,
    /// Largest `||rho - rho^dagger||_F` seen before re-symmetrization.
    pub max_hermiticity_residual: f64,
    /// `(t, min_eigenvalue)` at recorded points where the state dipped below
    /// `-1e-6`. Expected empty for Lindblad; for Redfield these are reported,
    /// not failed.
    pub positivity_findings: Vec<(f64, f64)>,
    /// Accepted integration steps.
    pub steps: usize,
    /// Rejected adaptive steps.
    pub rejected_steps: usize,
}

/// Threshold below which a recorded minimum eigenvalue counts as a
/// positivity violation finding.
pub const POSITIVITY_FINDING_THRESHOLD: f64 = -1e-6;

struct Recorder {
    traj: Trajectory,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            traj: Trajectory {
                times: Vec::new(),
                states: Vec::new(),
                observables: Vec::new(),
                max_trace_drift: 0.0,
                max_hermiticity_residual: 0.0,
                positivity_findings: Vec::new(),
                steps: 0,
                rejected_steps: 0,
            },
        }
    }

    fn record(&mut self, t: f64, full: &CMatrix) -> Result<()> {
        let rho = BlockDensity::from_full(full)?;
        let obs = observables(t, &rho);
        if obs.min_eigenvalue < POSITIVITY_FINDING_THRESHOLD {
            self.traj.positivity_findings.push((t, obs.min_eigenvalue));
        }
        self.traj.times.push(t);
        self.traj.observables.push(obs);
        self.traj.states.push(rho);
        Ok(())
    }
}

/// Propagates `rho_init` under `gen` and records states, observables and
/// conservation diagnostics.
///
/// After every accepted step the state is re-symmetrized
/// (`rho <- (rho + rho^dagger)/2`); the Hermiticity drift is measured before
/// symmetrization so the reported residual is meaningful. No positivity
/// projection is ever applied.
pub fn propagate(
    gen: &Generator,
    rho_init: &BlockDensity,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    if rho_init.n_max() != gen.basis().n_max() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has n_max {} but generator expects {}",
            rho_init.n_max(),
            gen.basis().n_max()
        )));
    }
    let herm0 = rho_init.hermiticity_residual();
    if herm0 > 1e-8 {
        return Err(Error::InvalidParams(format!(
            "initial state is not Hermitian (residual {herm0:.3e})"
        )));
    }
    let tr0 = rho_init.trace().re;
    if (tr0 - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParams(format!(
            "initial state has trace {tr0}, expected 1"
        )));
    }

    match cfg.method {
        Method::Rk4 { dt } => propagate_rk4(gen, rho_init, cfg, dt),
        Method::Adaptive { rtol, atol } => propagate_adaptive(gen, rho_init, cfg, rtol, atol),
    }
}

fn post_step(full: &mut CMatrix, t: f64, t_last: f64, rec: &mut Recorder) -> Result<()> {
    if full.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { t, t_last });
    }
    let herm = crate::linalg::hermiticity_residual(full);
    rec.traj.max_hermiticity_residual = rec.traj.max_hermiticity_residual.max(herm);
    let sym = (&*full + full.adjoint()) * crate::C64::new(0.5, 0.0);
    full.copy_from(&sym);
    let drift = (full.trace().re - 1.0).abs();
    rec.traj.max_trace_drift = rec.traj.max_trace_drift.max(drift);
    Ok(())
}

fn propagate_rk4(
    gen: &Generator,
    rho_init: &BlockDensity,
    cfg: &IntegratorConfig,
    dt: f64,
) -> Result<Trajectory> {
    let mut rec = Recorder::new();
    let mut full = rho_init.to_full();
    rec.record(0.0, &full)?;
    let n_steps = (cfg.t_end / dt).ceil() as usize;
    let mut t = 0.0;
    for step in 1..=n_steps {
        let h = dt.min(cfg.t_end - t);
        if h <= 0.0 {
            break;
        }
        let t_last = t;
        rk4_step(gen, &mut full, h);
        t += h;
        post_step(&mut full, t, t_last, &mut rec)?;
        rec.traj.steps += 1;
        if step % cfg.record_stride == 0 || step == n_steps {
            rec.record(t, &full)?;
        }
    }
    Ok(rec.traj)
}

fn rk4_step(gen: &Generator, y: &mut CMatrix, h: f64) {
    let ch = |x: f64| crate::C64::new(x, 0.0);
    let k1 = gen.apply_full(y);
    let k2 = gen.apply_full(&(&*y + &k1 * ch(0.5 * h)));
    let k3 = gen.apply_full(&(&*y + &k2 * ch(0.5 * h)));
    let k4 = gen.apply_full(&(&*y + &k3 * ch(h)));
    *y += (k1 + k2 * ch(2.0) + k3 * ch(2.0) + k4) * ch(h / 6.0);
}

/// Dormand-Prince 5(4) tableau (autonomous right-hand side, so the stage
/// times are not needed).
const DP_A: [[f64; 6]; 6] = [
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn propagate_adaptive(
    gen: &Generator,
    rho_init: &BlockDensity,
    cfg: &IntegratorConfig,
    rtol: f64,
    atol: f64,
) -> Result<Trajectory> {
    let mut rec = Recorder::new();
    let mut y = rho_init.to_full();
    rec.record(0.0, &y)?;
    let mut t = 0.0;
    let mut h = (cfg.t_end / 100.0).min(0.01).max(1e-8);
    let mut accepted = 0usize;
    let ch = |x: f64| crate::C64::new(x, 0.0);

    while t < cfg.t_end {
        h = h.min(cfg.t_end - t);
        if h < 1e-14 * cfg.t_end.max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
        let mut k: Vec<CMatrix> = Vec::with_capacity(7);
        k.push(gen.apply_full(&y));
        for s in 0..6 {
            let mut stage = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = DP_A[s][j];
                if a != 0.0 {
                    stage += kj * ch(a * h);
                }
            }
            k.push(gen.apply_full(&stage));
        }
        let mut y5 = y.clone();
        let mut err = CMatrix::zeros(y.nrows(), y.ncols());
        for (j, kj) in k.iter().enumerate() {
            if DP_B5[j] != 0.0 {
                y5 += kj * ch(DP_B5[j] * h);
            }
            let db = DP_B5[j] - DP_B4[j];
            if db != 0.0 {
                err += kj * ch(db * h);
            }
        }
        let mut err_norm = 0.0f64;
        for (e, (a, b)) in err.iter().zip(y.iter().zip(y5.iter())) {
            let scale = atol + rtol * a.norm().max(b.norm());
            err_norm = err_norm.max(e.norm() / scale);
        }
        if err_norm <= 1.0 {
            let t_last = t;
            t += h;
            y = y5;
            post_step(&mut y, t, t_last, &mut rec)?;
            rec.traj.steps += 1;
            accepted += 1;
            if accepted % cfg.record_stride == 0 || t >= cfg.t_end {
                rec.record(t, &y)?;
            }
        } else {
            rec.traj.rejected_steps += 1;
        }
        let factor = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= factor;
    }
    Ok(rec.traj)
}

/// Population trajectories of the classical rate equations.
#[derive(Debug, Clone)]
pub struct RateTrajectory {
    pub times: Vec<f64>,
    pub lambda: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub max_mass_drift: f64,
}

/// Propagates the Markov population dynamics
/// `d lambda_f/dt = -lambda_f sum k01[f][.] + sum_i theta_i k10[i][f]` (and
/// symmetrically for `theta`) with fixed-step RK4.
pub fn propagate_rates(
    rates: &RateMatrix,
    lambda0: &[f64],
    theta0: &[f64],
    cfg: &IntegratorConfig,
) -> Result<RateTrajectory> {
    cfg.validate()?;
    let n = rates.n_max();
    if lambda0.len() != n || theta0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "population vectors must have length {n}"
        )));
    }
    if lambda0.iter().chain(theta0.iter()).any(|&p| p < 0.0) {
        return Err(Error::InvalidParams("populations must be nonnegative".into()));
    }
    let total: f64 = lambda0.iter().chain(theta0.iter()).sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParams(format!(
            "populations must sum to 1, got {total}"
        )));
    }
    let dt = match cfg.method {
        Method::Rk4 { dt } => dt,
        Method::Adaptive { .. } => {
            return Err(Error::InvalidParams(
                "rate propagation supports fixed-step RK4 only".into(),
            ))
        }
    };

    let q = rates.markov_generator();
    let mut p = nalgebra::DVector::<f64>::from_iterator(
        2 * n,
        lambda0.iter().chain(theta0.iter()).copied(),
    );
    let mut out = RateTrajectory {
        times: vec![0.0],
        lambda: vec![lambda0.to_vec()],
        theta: vec![theta0.to_vec()],
        max_mass_drift: 0.0,
    };
    let n_steps = (cfg.t_end / dt).ceil() as usize;
    let mut t = 0.0;
    for step in 1..=n_steps {
        let h = dt.min(cfg.t_end - t);
        if h <= 0.0 {
            break;
        }
        let k1 = &q * &p;
        let k2 = &q * &(&p + &k1 * (0.5 * h));
        let k3 = &q * &(&p + &k2 * (0.5 * h));
        let k4 = &q * &(&p + &k3 * h);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        t += h;
        if let Some(&bad) = p.iter().find(|&&v| v < -1e-10) {
            return Err(Error::NegativePopulation { t, value: bad });
        }
        out.max_mass_drift = out.max_mass_drift.max((p.sum() - 1.0).abs());
        if step % cfg.record_stride == 0 || step == n_steps {
            out.times.push(t);
            out.lambda.push(p.as_slice()[..n].to_vec());
            out.theta.push(p.as_slice()[n..].to_vec());
        }
    }
    Ok(out)
}

/// Largest relative deviation between two population trajectories sampled at
/// the same times, with an absolute floor below which populations are
/// compared absolutely.
pub fn max_population_deviation(a: &[Vec<f64>], b: &[Vec<f64>], floor: f64) -> f64 {
    let mut worst = 0.0f64;
    for (ra, rb) in a.iter().zip(b) {
        for (va, vb) in ra.iter().zip(rb) {
            worst = worst.max((va - vb).abs() / vb.abs().max(floor));
        }
    }
    worst
}
