//! CODATA 2018 physical constants, SI units.
//!
//! Every module reads constants from here so that emitted results can echo
//! one consistent table.

use serde::Serialize;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const K_B: f64 = 1.380_649e-23;
/// Newtonian constant of gravitation, m³·kg⁻¹·s⁻².
pub const G: f64 = 6.674_30e-11;
/// Speed of light in vacuum, m/s (exact).
pub const C: f64 = 299_792_458.0;

/// Constants table in serializable form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub hbar: f64,
    pub k_b: f64,
    pub g: f64,
    pub c: f64,
    pub source: &'static str,
}

pub const CODATA_2018: Constants = Constants {
    hbar: HBAR,
    k_b: K_B,
    g: G,
    c: C,
    source: "CODATA 2018",
};
