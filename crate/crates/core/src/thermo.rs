//! Entropy, measurement-induced work, and the entanglement degree `ξ(r)`.
//!
//! The engine mode `a` starts in equilibrium with its bath, `σ_a^eq =
//! (n̄ + ½)·I`. Measuring the entangled partner `b` leaves `a` with the
//! conditional covariance `σ_a^πb`; re-thermalising returns the entropy
//! difference as work,
//!
//! ```text
//! W = k_B T [S(σ_a^eq) − S(σ_a^πb)].
//! ```
//!
//! At low temperature and `λ = 1` this approaches `ξ(r)·n̄ℏω` with
//! `ξ(r) = 1 − 2/(1 + cosh 2r)`. The approach is only logarithmic in `n̄`:
//! the leading correction to the ratio is
//! `[ξ − (1−ξ)·ln(1/(1−ξ))] / (ξ·ln(1/n̄))`.

use serde::Serialize;

use crate::constants::{HBAR, K_B};
use crate::error::{invalid, Result};
use crate::gaussian::{symplectic_eigenvalues, CovarianceMatrix, PHYSICALITY_TOL};
use crate::measurement::{conditional_covariance, GaussianMeasurement};
use crate::states::{block_decompose, thermal_state, two_mode_squeezed_thermal, ThermalOccupation};

/// Denominator floor for [`WorkReport::relative_deviation`].
pub const DEVIATION_FLOOR: f64 = 1e-300;

/// Result of one run of [`eiwe_pipeline`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkReport {
    /// nats
    pub entropy_eq: f64,
    /// nats
    pub entropy_cond: f64,
    /// J
    pub work: f64,
    /// `ξ(r)·n̄ℏω`, J
    pub work_closed_form: f64,
    pub xi: f64,
    pub n_bar: f64,
    pub omega: f64,
    pub temperature: f64,
    pub lambda: f64,
    pub phi: f64,
    pub r: f64,
    pub relative_deviation: f64,
}

/// `h(ν) = (ν+½)ln(ν+½) − (ν−½)ln(ν−½)`, with `h(½) = 0`.
pub fn bosonic_entropy(nu: f64) -> f64 {
    let plus = nu + 0.5;
    let minus = nu - 0.5;
    let tail = if minus > 0.0 { minus * minus.ln() } else { 0.0 };
    plus * plus.ln() - tail
}

/// Von Neumann entropy in nats, summed over symplectic eigenvalues.
pub fn von_neumann_entropy(cov: &CovarianceMatrix) -> Result<f64> {
    let nus = symplectic_eigenvalues(cov)?;
    if let Some(nu) = nus.iter().find(|&&nu| nu < 0.5 - PHYSICALITY_TOL) {
        return invalid(format!("symplectic eigenvalue {nu} is below the vacuum value 1/2"));
    }
    Ok(nus.into_iter().map(bosonic_entropy).sum())
}

/// Entanglement degree `ξ(r) = 1 − 2/(1 + cosh 2r)`.
pub fn xi(r: f64) -> f64 {
    1.0 - 2.0 / (1.0 + (2.0 * r).cosh())
}

/// Non-negative squeezing with `ξ(r) = target`, found by bisection.
pub fn squeezing_for_xi(target: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&target) {
        return invalid(format!("ξ must lie in [0, 1), got {target}"));
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while xi(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if xi(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `W = k_B T (S_eq − S_cond)`. The sign is kept.
pub fn extracted_work(entropy_eq: f64, entropy_cond: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return invalid(format!("temperature must be positive, got {temperature}"));
    }
    Ok(K_B * temperature * (entropy_eq - entropy_cond))
}

/// `ξ(r)·n̄·ℏω`.
pub fn eiwe_closed_form(n_bar: f64, omega: f64, r: f64) -> f64 {
    xi(r) * n_bar * HBAR * omega
}

/// Work extracted from mode `a` of a TMST state when mode `b` is measured.
pub fn eiwe_pipeline(
    thermal: &ThermalOccupation,
    r: f64,
    measurement: &GaussianMeasurement,
) -> Result<WorkReport> {
    if !thermal.is_consistent() {
        return invalid(format!(
            "n̄ = {} is not consistent with ω = {}, T = {} under {:?}",
            thermal.n_bar, thermal.omega, thermal.temperature, thermal.model
        ));
    }
    let n_bar = thermal.n_bar;
    let omega = thermal.omega;
    let tmst = two_mode_squeezed_thermal(n_bar, r, omega)?;
    let blocks = block_decompose(&tmst)?;

    let eq = thermal_state(n_bar, 1, omega)?;
    let entropy_eq = von_neumann_entropy(eq.cov())?;
    let cond = CovarianceMatrix::single_mode(conditional_covariance(&blocks, measurement)?)?;
    let entropy_cond = von_neumann_entropy(&cond)?;

    let work = extracted_work(entropy_eq, entropy_cond, thermal.temperature)?;
    let work_closed_form = eiwe_closed_form(n_bar, omega, r);
    Ok(WorkReport {
        entropy_eq,
        entropy_cond,
        work,
        work_closed_form,
        xi: xi(r),
        n_bar,
        omega,
        temperature: thermal.temperature,
        lambda: measurement.lambda(),
        phi: measurement.phi(),
        r,
        relative_deviation: (work - work_closed_form).abs() / work_closed_form.max(DEVIATION_FLOOR),
    })
}

/// Work from the discrete maximally entangled benchmark `P(|00⟩⟨00| + x|e⟩⟨e|)`
/// after a photon-number measurement of `b` returns `|1⟩`: `x·ℏω`.
pub fn discrete_comparison(x: f64, omega: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return invalid(format!("Boltzmann weight must lie in [0, 1), got {x}"));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return invalid(format!("angular frequency must be positive, got {omega}"));
    }
    Ok(x * HBAR * omega)
}
