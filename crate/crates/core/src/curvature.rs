//! Ricci-scalar change when a fraction `ξ` of a perfect fluid goes from
//! isotropic to directed motion: `ΔR = ξ·32·G·p₀/c⁴`.

use serde::Serialize;

use crate::constants::{C, G};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureInput {
    xi: f64,
    /// Pa
    pressure: f64,
}

impl CurvatureInput {
    pub fn new(xi: f64, pressure: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return invalid(format!("ξ must lie in [0, 1], got {xi}"));
        }
        if !(pressure >= 0.0 && pressure.is_finite()) {
            return invalid(format!("pressure must be non-negative and finite, got {pressure}"));
        }
        Ok(Self { xi, pressure })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn pressure(&self) -> f64 {
        self.pressure
    }
}

/// `ΔR` in m⁻².
pub fn delta_ricci(input: &CurvatureInput) -> f64 {
    input.xi * 32.0 * G * input.pressure / C.powi(4)
}
