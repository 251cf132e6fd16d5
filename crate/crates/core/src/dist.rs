//! Inverse-Gamma law with the shape/scale convention
//! `x ↦ β^α / Γ(α) · x^{−α−1} e^{−β/x}`.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGamma {
    shape: f64,
    scale: f64,
}

impl InverseGamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!(
                "inverse gamma needs positive finite shape and scale, got ({shape}, {scale})"
            )));
        }
        Ok(InverseGamma { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.shape * self.scale.ln() - ln_gamma(self.shape) - (self.shape + 1.0) * x.ln() - self.scale / x
    }

    pub fn mean(&self) -> Option<f64> {
        (self.shape > 1.0).then(|| self.scale / (self.shape - 1.0))
    }
}

impl Distribution<f64> for InverseGamma {
    /// Reciprocal of a `Gamma(shape, rate = scale)` draw.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // Gamma::new only fails for non-positive parameters, excluded in `new`.
        let gamma = Gamma::new(self.shape, 1.0 / self.scale).expect("validated gamma parameters");
        1.0 / gamma.sample(rng)
    }
}
