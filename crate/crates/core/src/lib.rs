//! Gaussian covariance-matrix engine for work extracted from an entangled
//! cavity mode when its partner is measured, plus a truncated Fock-space
//! oracle that checks the Gaussian results independently.
//!
//! The usual entry point is [`thermo::eiwe_pipeline`]: build a two-mode
//! squeezed thermal state, condition mode `a` on a Gaussian measurement of
//! mode `b`, and turn the entropy drop into work.
//!
//! ```
//! use eiwe_core::{eiwe_measurement, eiwe_pipeline, OccupationModel, ThermalOccupation};
//!
//! let occ = ThermalOccupation::from_n_bar(1e-4, 1.2e15, OccupationModel::BoltzmannApprox)?;
//! let report = eiwe_pipeline(&occ, 0.6, &eiwe_measurement(1))?;
//! assert!(report.relative_deviation < 0.05);
//! # Ok::<(), eiwe_core::EiweError>(())
//! ```

// `!(x > 0.0)` is used on purpose so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod curvature;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod measurement;
pub mod states;
pub mod thermo;

pub use curvature::{delta_ricci, CurvatureInput};
pub use error::{EiweError, Result};
pub use fock::{
    coherent_condition, fock_entropy, oracle_evaluate, oracle_work, thermal_fock, tmst_fock,
    FockDensityMatrix, OracleReport,
};
pub use gaussian::{
    apply_symplectic, build_symplectic, purity, symplectic_eigenvalues, symplectic_form,
    validate_covariance, CovarianceMatrix, GaussianState, SymplecticKind, SymplecticMatrix,
    ValidityReport,
};
pub use measurement::{
    conditional_covariance, eiwe_measurement, homodyne_limit, outcome_distribution,
    povm_covariance, sample_and_condition, GaussianMeasurement, MeasurementOutcome,
    OutcomeDistribution, Quadrature,
};
pub use states::{
    block_decompose, mean_occupation, partial_trace, thermal_state, two_mode_squeezed_thermal,
    OccupationModel, ThermalOccupation, TwoModeBlocks,
};
pub use thermo::{
    discrete_comparison, eiwe_closed_form, eiwe_pipeline, extracted_work, squeezing_for_xi,
    von_neumann_entropy, xi, WorkReport,
};

// Re-exported so downstream crates share one set of matrix types.
pub use nalgebra;
pub use num_complex;
