//! General-dyne Gaussian measurements on mode `b` of a two-mode state.
//!
//! A measurement is a displaced pure Gaussian POVM whose seed covariance is
//! `γ = R(φ)·diag(λ/2, 1/(2λ))·R(φ)ᵀ`. `λ = 1` is heterodyne (projection on
//! coherent states); `λ → 0` and `λ → ∞` are homodyne detection of `x_b`
//! and `p_b`.
//!
//! The conditional covariance of mode `a` is the Schur complement
//! `σ_a − c_ab·(σ_b + γ)⁻¹·c_abᵀ` and never depends on the outcome. Only the
//! conditional mean moves with the outcome.
//!
//! Outcomes are stored as real quadrature pairs `(x_b, p_b)`; the complex
//! amplitude is `α = (x + i p)/√2`.

use std::f64::consts::PI;

use nalgebra::{DVector, Matrix2, Vector2};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, EiweError, Result};
use crate::gaussian::{rotation_2x2, CovarianceMatrix, GaussianState};
use crate::states::{block_decompose, TwoModeBlocks};

/// Index of the measured mode in a two-mode state.
pub const MEASURED_MODE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianMeasurement {
    lambda: f64,
    phi: f64,
    target: usize,
}

impl GaussianMeasurement {
    pub fn new(lambda: f64, phi: f64, target: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return invalid(format!("measurement strength must be positive and finite, got {lambda}"));
        }
        if !phi.is_finite() {
            return invalid("measurement angle must be finite");
        }
        Ok(Self { lambda, phi, target })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Seed covariance `γ` of the POVM.
    pub fn gamma(&self) -> Matrix2<f64> {
        let rot = rotation_2x2(self.phi);
        let d = Matrix2::new(self.lambda / 2.0, 0.0, 0.0, 0.5 / self.lambda);
        let g = rot * d * rot.transpose();
        (g + g.transpose()) * 0.5
    }
}

/// A measured value of the `b` quadratures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementOutcome {
    /// `(x_b, p_b)` in quadrature units.
    pub alpha: (f64, f64),
    pub log_density: f64,
}

impl MeasurementOutcome {
    /// Complex amplitude `α = (x + i p)/√2`.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.alpha.0, self.alpha.1) / 2f64.sqrt()
    }
}

pub fn povm_covariance(m: &GaussianMeasurement) -> Matrix2<f64> {
    m.gamma()
}

/// The environment's measurement: projection onto coherent states (`λ = 1`).
pub fn eiwe_measurement(target: usize) -> GaussianMeasurement {
    GaussianMeasurement {
        lambda: 1.0,
        phi: 0.0,
        target,
    }
}

fn check_target(m: &GaussianMeasurement) -> Result<()> {
    if m.target != MEASURED_MODE {
        return invalid(format!(
            "measurement must target mode {MEASURED_MODE} (b), got {}",
            m.target
        ));
    }
    Ok(())
}

fn inverse_2x2(m: &Matrix2<f64>) -> Result<Matrix2<f64>> {
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if !(det.abs() > f64::MIN_POSITIVE) || !det.is_finite() {
        return Err(EiweError::NumericalFailure(format!(
            "σ_b + γ is singular (det {det:e})"
        )));
    }
    Ok(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

fn schur_complement(blocks: &TwoModeBlocks, inv: &Matrix2<f64>) -> Matrix2<f64> {
    let s = blocks.sigma_a - blocks.c_ab * inv * blocks.c_ab.transpose();
    (s + s.transpose()) * 0.5
}

/// Post-measurement covariance of mode `a`.
pub fn conditional_covariance(
    blocks: &TwoModeBlocks,
    m: &GaussianMeasurement,
) -> Result<Matrix2<f64>> {
    check_target(m)?;
    let inv = inverse_2x2(&(blocks.sigma_b + m.gamma()))?;
    Ok(schur_complement(blocks, &inv))
}

/// Bivariate normal law of the outcome `(x_b, p_b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl OutcomeDistribution {
    /// Log of the density with respect to `dx dp`.
    pub fn log_density(&self, point: &Vector2<f64>) -> f64 {
        let det = self.cov.determinant();
        // cov is positive definite, so the inverse exists.
        let inv = inverse_2x2(&self.cov).expect("outcome covariance is positive definite");
        let d = point - self.mean;
        -0.5 * d.dot(&(inv * d)) - (2.0 * PI).ln() - 0.5 * det.ln()
    }

    pub fn density(&self, point: &Vector2<f64>) -> f64 {
        self.log_density(point).exp()
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Vector2<f64> {
        let l = self
            .cov
            .cholesky()
            .expect("outcome covariance is positive definite")
            .l();
        let z = Vector2::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
        self.mean + l * z
    }
}

fn require_two_modes(state: &GaussianState) -> Result<()> {
    if state.n_modes() != 2 {
        return invalid(format!("expected a two-mode state, got {} modes", state.n_modes()));
    }
    Ok(())
}

fn mode_mean(state: &GaussianState, mode: usize) -> Vector2<f64> {
    Vector2::new(state.mean()[2 * mode], state.mean()[2 * mode + 1])
}

pub fn outcome_distribution(
    state: &GaussianState,
    m: &GaussianMeasurement,
) -> Result<OutcomeDistribution> {
    require_two_modes(state)?;
    check_target(m)?;
    Ok(OutcomeDistribution {
        mean: mode_mean(state, MEASURED_MODE),
        cov: state.cov().block(MEASURED_MODE, MEASURED_MODE) + m.gamma(),
    })
}

/// Conditions mode `a` on a given outcome.
pub fn condition_on(
    state: &GaussianState,
    m: &GaussianMeasurement,
    outcome: &Vector2<f64>,
) -> Result<GaussianState> {
    require_two_modes(state)?;
    check_target(m)?;
    let blocks = block_decompose(state)?;
    let inv = inverse_2x2(&(blocks.sigma_b + m.gamma()))?;
    let cov = schur_complement(&blocks, &inv);
    let shift = blocks.c_ab * inv * (outcome - mode_mean(state, MEASURED_MODE));
    let mean = mode_mean(state, 0) + shift;
    GaussianState::new(
        CovarianceMatrix::single_mode(cov)?,
        DVector::from_column_slice(mean.as_slice()),
        vec![state.omegas()[0]],
    )
}

/// Draws an outcome with a seeded RNG and returns it with the conditional
/// state of mode `a`.
pub fn sample_and_condition(
    state: &GaussianState,
    m: &GaussianMeasurement,
    seed: u64,
) -> Result<(MeasurementOutcome, GaussianState)> {
    let dist = outcome_distribution(state, m)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let point = dist.sample(&mut rng);
    let conditioned = condition_on(state, m, &point)?;
    Ok((
        MeasurementOutcome {
            alpha: (point.x, point.y),
            log_density: dist.log_density(&point),
        },
        conditioned,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrature {
    X,
    P,
}

/// Conditional covariance of mode `a` after ideal homodyne detection of one
/// `b` quadrature: `σ_a − c_ab·(Π σ_b Π)⁺·c_abᵀ`.
pub fn homodyne_limit(blocks: &TwoModeBlocks, quadrature: Quadrature) -> Matrix2<f64> {
    let idx = match quadrature {
        Quadrature::X => 0,
        Quadrature::P => 1,
    };
    let v = blocks.sigma_b[(idx, idx)];
    let mut pinv = Matrix2::zeros();
    if v > 0.0 {
        pinv[(idx, idx)] = 1.0 / v;
    }
    schur_complement(blocks, &pinv)
}
