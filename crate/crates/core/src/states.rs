//! Thermal and two-mode squeezed thermal (TMST) states, and the block form
//! `σ = [[σ_a, c_ab], [c_abᵀ, σ_b]]` of two-mode covariances.

use nalgebra::{DMatrix, DVector, Matrix2};
use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{invalid, Result};
use crate::gaussian::{
    apply_symplectic, build_symplectic, CovarianceMatrix, GaussianState, SymplecticKind,
};

/// Above this value of `ℏω/k_BT` the occupation is reported as zero.
pub const OCCUPATION_UNDERFLOW: f64 = 700.0;
/// Largest squeezing accepted by [`two_mode_squeezed_thermal`].
pub const MAX_SQUEEZING: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OccupationModel {
    /// `n̄ = 1/(e^{ℏω/k_BT} − 1)`.
    BoseEinstein,
    /// `n̄ ≈ e^{−ℏω/k_BT}`, the low-temperature form.
    BoltzmannApprox,
}

/// Mean photon number of a mode together with the `(ω, T)` pair it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalOccupation {
    pub n_bar: f64,
    /// rad/s
    pub omega: f64,
    /// K
    pub temperature: f64,
    pub model: OccupationModel,
    /// Set when `ℏω/k_BT` exceeded [`OCCUPATION_UNDERFLOW`] and `n_bar` was
    /// clamped to zero.
    pub underflow: bool,
}

impl ThermalOccupation {
    /// Derives the temperature that produces `n_bar` at `omega` under `model`.
    ///
    /// The Boltzmann form needs `0 < n̄ < 1`; Bose–Einstein accepts any
    /// `n̄ > 0`.
    pub fn from_n_bar(n_bar: f64, omega: f64, model: OccupationModel) -> Result<Self> {
        check_omega(omega)?;
        let log_ratio = match model {
            OccupationModel::BoseEinstein => {
                if !(n_bar > 0.0 && n_bar.is_finite()) {
                    return invalid(format!("Bose-Einstein occupation must be positive, got {n_bar}"));
                }
                (1.0 / n_bar).ln_1p()
            }
            OccupationModel::BoltzmannApprox => {
                if !(n_bar > 0.0 && n_bar < 1.0) {
                    return invalid(format!("Boltzmann occupation must lie in (0, 1), got {n_bar}"));
                }
                -n_bar.ln()
            }
        };
        Ok(Self {
            n_bar,
            omega,
            temperature: HBAR * omega / (K_B * log_ratio),
            model,
            underflow: false,
        })
    }

    /// `ℏω / k_BT`.
    pub fn reduced_energy(&self) -> f64 {
        HBAR * self.omega / (K_B * self.temperature)
    }

    /// Whether `n_bar` matches `(omega, temperature)` within 1e-12 relative.
    pub fn is_consistent(&self) -> bool {
        match mean_occupation(self.omega, self.temperature, self.model) {
            Ok(fresh) => {
                let scale = self.n_bar.abs().max(f64::MIN_POSITIVE);
                self.n_bar >= 0.0 && (fresh.n_bar - self.n_bar).abs() <= 1e-12 * scale
            }
            Err(_) => false,
        }
    }

    /// `n̄ℏω`, the thermal energy above the vacuum, J.
    pub fn thermal_energy(&self) -> f64 {
        self.n_bar * HBAR * self.omega
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega.is_finite()) {
        return invalid(format!("angular frequency must be positive, got {omega}"));
    }
    Ok(())
}

fn check_n_bar(n_bar: f64) -> Result<()> {
    if !(n_bar >= 0.0 && n_bar.is_finite()) {
        return invalid(format!("mean occupation must be non-negative, got {n_bar}"));
    }
    Ok(())
}

/// Mean occupation of a mode at angular frequency `omega` and temperature
/// `temperature`.
pub fn mean_occupation(
    omega: f64,
    temperature: f64,
    model: OccupationModel,
) -> Result<ThermalOccupation> {
    check_omega(omega)?;
    if !(temperature > 0.0 && temperature.is_finite()) {
        return invalid(format!("temperature must be positive, got {temperature}"));
    }
    let x = HBAR * omega / (K_B * temperature);
    let (n_bar, underflow) = if x > OCCUPATION_UNDERFLOW {
        (0.0, true)
    } else {
        let n = match model {
            OccupationModel::BoseEinstein => 1.0 / x.exp_m1(),
            OccupationModel::BoltzmannApprox => (-x).exp(),
        };
        (n, false)
    };
    Ok(ThermalOccupation {
        n_bar,
        omega,
        temperature,
        model,
        underflow,
    })
}

/// `n_modes` independent thermal modes with covariance `(n̄ + 1/2)·I`.
pub fn thermal_state(n_bar: f64, n_modes: usize, omega: f64) -> Result<GaussianState> {
    check_n_bar(n_bar)?;
    if n_modes == 0 {
        return invalid("thermal state needs at least one mode");
    }
    GaussianState::centered(CovarianceMatrix::isotropic(n_modes, n_bar + 0.5), omega)
}

fn check_tmst_args(n_bar: f64, r: f64) -> Result<()> {
    check_n_bar(n_bar)?;
    if !(r.is_finite() && r.abs() <= MAX_SQUEEZING) {
        return invalid(format!("squeezing must satisfy |r| <= {MAX_SQUEEZING}, got {r}"));
    }
    Ok(())
}

/// Two-mode squeezed thermal state in closed form:
/// `σ_a = σ_b = (n̄+½)cosh 2r·I`, `c_ab = (n̄+½)sinh 2r·diag(1, −1)`.
pub fn two_mode_squeezed_thermal(n_bar: f64, r: f64, omega: f64) -> Result<GaussianState> {
    check_tmst_args(n_bar, r)?;
    let t = n_bar + 0.5;
    let diag = t * (2.0 * r).cosh();
    let off = t * (2.0 * r).sinh();
    let blocks = TwoModeBlocks {
        sigma_a: Matrix2::identity() * diag,
        sigma_b: Matrix2::identity() * diag,
        c_ab: Matrix2::new(off, 0.0, 0.0, -off),
    };
    GaussianState::centered(blocks.reassemble()?, omega)
}

/// The same state built as `S_tms(r)·(thermal ⊗ thermal)·S_tms(r)ᵀ`.
pub fn two_mode_squeezed_thermal_via_symplectic(
    n_bar: f64,
    r: f64,
    omega: f64,
) -> Result<GaussianState> {
    check_tmst_args(n_bar, r)?;
    let s = build_symplectic(SymplecticKind::TwoModeSqueeze, r, &[0, 1], 2)?;
    apply_symplectic(&s, &thermal_state(n_bar, 2, omega)?)
}

/// The three 2×2 blocks of a two-mode covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeBlocks {
    pub sigma_a: Matrix2<f64>,
    pub sigma_b: Matrix2<f64>,
    pub c_ab: Matrix2<f64>,
}

impl TwoModeBlocks {
    pub fn reassemble(&self) -> Result<CovarianceMatrix> {
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&self.sigma_a);
        m.view_mut((2, 2), (2, 2)).copy_from(&self.sigma_b);
        m.view_mut((0, 2), (2, 2)).copy_from(&self.c_ab);
        m.view_mut((2, 0), (2, 2)).copy_from(&self.c_ab.transpose());
        CovarianceMatrix::from_matrix(m)
    }
}

fn require_two_modes(state: &GaussianState) -> Result<()> {
    if state.n_modes() != 2 {
        return invalid(format!("expected a two-mode state, got {} modes", state.n_modes()));
    }
    Ok(())
}

pub fn block_decompose(state: &GaussianState) -> Result<TwoModeBlocks> {
    require_two_modes(state)?;
    let cov = state.cov();
    Ok(TwoModeBlocks {
        sigma_a: cov.block(0, 0),
        sigma_b: cov.block(1, 1),
        c_ab: cov.block(0, 1),
    })
}

/// Reduced state of mode `keep` (0 = a, 1 = b).
pub fn partial_trace(state: &GaussianState, keep: usize) -> Result<GaussianState> {
    require_two_modes(state)?;
    if keep >= 2 {
        return invalid(format!("mode index {keep} out of range for a two-mode state"));
    }
    let cov = CovarianceMatrix::single_mode(state.cov().block(keep, keep))?;
    let mean = DVector::from_column_slice(&state.mean().as_slice()[2 * keep..2 * keep + 2]);
    GaussianState::new(cov, mean, vec![state.omegas()[keep]])
}
