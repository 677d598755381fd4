//! Rectangular phase-space grids and density fields.

use crate::{Error, ModelParams, Result};

/// Cell-centered rectangular grid over `[x_min, x_max] x [p_min, p_max]`.
///
/// Cell `(ix, ip)` is centered at `(x_min + (ix + 1/2) dx, p_min + (ip + 1/2) dp)`;
/// fields are stored row-major with `x` fastest: `index = ip * nx + ix`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, nx: usize, np: usize) -> Result<Self> {
        if !(x_max > x_min) || !(p_max > p_min) {
            return Err(Error::InvalidParams(
                "grid bounds must satisfy x_max > x_min and p_max > p_min".into(),
            ));
        }
        if nx < 16 || np < 16 {
            return Err(Error::InvalidParams(format!(
                "grid needs at least 16 points per axis, got {nx} x {np}"
            )));
        }
        Ok(Self { x_min, x_max, p_min, p_max, nx, np })
    }

    /// Grid sized to cover the classical turning points of both surfaces for
    /// levels up to `k_max`, extended by `6 sqrt(eps)` on every side.
    pub fn covering(params: &ModelParams, k_max: usize, nx: usize, np: usize) -> Result<Self> {
        let eps = params.epsilon;
        let r = ((2 * k_max + 1) as f64 * eps).sqrt();
        let margin = 6.0 * eps.sqrt();
        let shift = std::f64::consts::SQRT_2 * params.g;
        let x_min = (-r).min(-shift - r) - margin;
        let x_max = r.max(-shift + r) + margin;
        let p_half = r + margin;
        Self::new(x_min, x_max, -p_half, p_half, nx, np)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    /// Cell area `dx * dp`.
    pub fn cell(&self) -> f64 {
        self.dx() * self.dp()
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x_min + (ix as f64 + 0.5) * self.dx()
    }

    pub fn p(&self, ip: usize) -> f64 {
        self.p_min + (ip as f64 + 0.5) * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn idx(&self, ix: usize, ip: usize) -> usize {
        ip * self.nx + ix
    }

    /// Phase-space structures live on the scale `sqrt(eps)`; spacings above
    /// half of that cannot resolve them.
    pub fn check_resolution(&self, eps: f64) -> Result<()> {
        let limit = 0.5 * eps.sqrt();
        if self.dx() > limit || self.dp() > limit {
            return Err(Error::GridTooCoarse { dx: self.dx(), dp: self.dp(), limit });
        }
        Ok(())
    }

    /// Verifies the grid covers the turning points of both surfaces for
    /// levels up to `k_max` with the `6 sqrt(eps)` margin.
    pub fn check_support(&self, params: &ModelParams, k_max: usize) -> Result<()> {
        let eps = params.epsilon;
        let r = ((2 * k_max + 1) as f64 * eps).sqrt();
        let margin = 6.0 * eps.sqrt();
        let shift = std::f64::consts::SQRT_2 * params.g;
        let x_lo = (-r).min(-shift - r) - margin;
        let x_hi = r.max(-shift + r) + margin;
        let p_half = r + margin;
        if self.x_min > x_lo || self.x_max < x_hi || self.p_min > -p_half || self.p_max < p_half {
            return Err(Error::GridTooSmall(format!(
                "need x in [{x_lo:.3}, {x_hi:.3}], |p| <= {p_half:.3} for k_max = {k_max}"
            )));
        }
        Ok(())
    }
}

/// A pair of phase-space densities, one per electronic level.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    pub grid: PhaseGrid,
    pub rho0: Vec<f64>,
    pub rho1: Vec<f64>,
}

impl PhaseField {
    pub fn zeros(grid: PhaseGrid) -> Self {
        let n = grid.len();
        Self { grid, rho0: vec![0.0; n], rho1: vec![0.0; n] }
    }

    /// Midpoint-rule mass of level 0.
    pub fn mass0(&self) -> f64 {
        self.rho0.iter().sum::<f64>() * self.grid.cell()
    }

    /// Midpoint-rule mass of level 1.
    pub fn mass1(&self) -> f64 {
        self.rho1.iter().sum::<f64>() * self.grid.cell()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass0() + self.mass1()
    }

    /// Scales both levels so the total mass is exactly 1, absorbing the
    /// quadrature defect of sampled initial data.
    pub fn normalized(mut self) -> Result<Self> {
        let m = self.total_mass();
        if !(m > 0.0) {
            return Err(Error::InvalidParams(format!(
                "cannot normalize phase-space field with mass {m}"
            )));
        }
        for v in self.rho0.iter_mut().chain(self.rho1.iter_mut()) {
            *v /= m;
        }
        Ok(self)
    }
}
