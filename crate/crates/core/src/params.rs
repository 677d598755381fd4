use crate::{Error, Result};

/// Dimensionless physical configuration of the model.
///
/// `epsilon` is the semiclassical parameter (ratio of the oscillator quantum
/// to the classical energy scale), `alpha` the system-bath coupling strength,
/// `g` the electron-phonon coupling that shifts the second potential surface,
/// `ebar0` the renormalized energy offset of that surface and `beta` the
/// inverse temperature of the fermionic reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub g: f64,
    pub ebar0: f64,
    pub beta: f64,
}

impl ModelParams {
    pub fn new(epsilon: f64, alpha: f64, g: f64, ebar0: f64, beta: f64) -> Result<Self> {
        let p = Self { epsilon, alpha, g, ebar0, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParams(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParams(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha must be nonnegative and finite, got {}",
                self.alpha
            )));
        }
        if !self.g.is_finite() || !self.ebar0.is_finite() {
            return Err(Error::InvalidParams(
                "g and ebar0 must be finite".to_string(),
            ));
        }
        Ok(())
    }

    /// Dissipative prefactor `alpha^2 / epsilon` shared by all generators.
    pub fn dissipative_scale(&self) -> f64 {
        self.alpha * self.alpha / self.epsilon
    }

    /// Relaxation time `epsilon / alpha^2` of the dissipative dynamics.
    ///
    /// Diagnostic only; no dynamics depends on it. Infinite when `alpha = 0`.
    pub fn relaxation_time(&self) -> f64 {
        if self.alpha == 0.0 {
            f64::INFINITY
        } else {
            self.epsilon / (self.alpha * self.alpha)
        }
    }

    /// Displacement ratio `g^2 / epsilon` controlling the Franck-Condon
    /// suppression `exp(-g^2/epsilon)`.
    pub fn displacement_ratio(&self) -> f64 {
        self.g * self.g / self.epsilon
    }

    /// Potential-surface gap `U(x) = sqrt(2) g x + g^2 + ebar0`.
    pub fn surface_gap(&self, x: f64) -> f64 {
        std::f64::consts::SQRT_2 * self.g * x + self.g * self.g + self.ebar0
    }

    /// Non-fatal diagnostics. The weak-coupling derivation assumes
    /// `alpha^2/epsilon` small; a value >= 0.1 is flagged but allowed.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dissipative_scale() >= 0.1 {
            out.push(format!(
                "alpha^2/epsilon = {:.3} is outside the weak-coupling regime (< 0.1); \
                 second-order master equations may be inaccurate",
                self.dissipative_scale()
            ));
        }
        out
    }
}

impl Default for ModelParams {
    /// `epsilon = 1`, `alpha = 0.1`, `g = 0`, `ebar0 = 0`, `beta = 1`.
    fn default() -> Self {
        Self { epsilon: 1.0, alpha: 0.1, g: 0.0, ebar0: 0.0, beta: 1.0 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(ModelParams::new(0.0, 0.1, 0.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -0.1, 0.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.0, 0.0, 0.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn warns_outside_weak_coupling() {
        let weak = ModelParams::new(0.5, 0.05, 0.0, 0.0, 1.0).unwrap();
        assert!(weak.warnings().is_empty());
        let strong = ModelParams::new(0.5, 0.3, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(strong.warnings().len(), 1);
    }

    #[test]
    fn relaxation_time_diagnostic() {
        let p = ModelParams::new(0.5, 0.05, 0.0, 0.0, 1.0).unwrap();
        assert!((p.relaxation_time() - 200.0).abs() < 1e-12);
        let iso = ModelParams::new(0.5, 0.0, 0.0, 0.0, 1.0).unwrap();
        assert!(iso.relaxation_time().is_infinite());
    }
}
