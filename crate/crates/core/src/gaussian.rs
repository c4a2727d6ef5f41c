//! Symplectic linear algebra on quadrature covariance matrices.
//!
//! Conventions used throughout the crate:
//!
//! * quadratures are interleaved, `(x₁, p₁, x₂, p₂, …)`;
//! * the vacuum has variance `1/2` in every quadrature, so a pure mode has
//!   symplectic eigenvalue `1/2` and a thermal mode with occupation `n̄` has
//!   `n̄ + 1/2`.

use nalgebra::{DMatrix, DVector, Matrix2, Schur};
use serde::Serialize;

use crate::error::{invalid, EiweError, Result};

/// Tolerance for symmetry and symplectic-identity checks.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Slack below `1/2` tolerated in the uncertainty principle.
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// Real symmetric `2n × 2n` matrix of quadrature second moments.
///
/// Construction only checks the shape; use [`CovarianceMatrix::validate`]
/// (or [`CovarianceMatrix::physical`]) when the bona-fide condition matters.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return invalid(format!("covariance must be square, got {rows}x{cols}"));
        }
        if rows == 0 || rows % 2 != 0 {
            return invalid(format!("covariance dimension must be even and positive, got {rows}"));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return invalid("covariance has non-finite entries");
        }
        Ok(Self {
            n_modes: rows / 2,
            entries,
        })
    }

    /// Like [`from_matrix`](Self::from_matrix) but rejects matrices that are
    /// not symmetric or violate the uncertainty principle.
    pub fn physical(entries: DMatrix<f64>) -> Result<Self> {
        let cov = Self::from_matrix(entries)?;
        let report = cov.validate()?;
        if !report.valid {
            return invalid(format!(
                "unphysical covariance: min symplectic eigenvalue {:.6e}, symmetry defect {:.3e}",
                report.min_symplectic_eigenvalue, report.symmetry_defect
            ));
        }
        Ok(cov)
    }

    pub fn single_mode(block: Matrix2<f64>) -> Result<Self> {
        Self::from_matrix(DMatrix::from_iterator(2, 2, block.iter().copied()))
    }

    /// `(n̄ + 1/2)·I` on `n_modes` modes.
    pub fn isotropic(n_modes: usize, variance: f64) -> Self {
        Self {
            n_modes,
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes) * variance,
        }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::isotropic(n_modes, 0.5)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.entries
    }

    /// 2×2 block of mode `i` (row) against mode `j` (column).
    pub fn block(&self, i: usize, j: usize) -> Matrix2<f64> {
        let b = self.entries.fixed_view::<2, 2>(2 * i, 2 * j);
        Matrix2::new(b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)])
    }

    /// Block-diagonal direct sum, i.e. the covariance of a product state.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> CovarianceMatrix {
        let (d1, d2) = (2 * self.n_modes, 2 * other.n_modes);
        let mut entries = DMatrix::zeros(d1 + d2, d1 + d2);
        entries.view_mut((0, 0), (d1, d1)).copy_from(&self.entries);
        entries.view_mut((d1, d1), (d2, d2)).copy_from(&other.entries);
        CovarianceMatrix {
            n_modes: self.n_modes + other.n_modes,
            entries,
        }
    }

    pub fn validate(&self) -> Result<ValidityReport> {
        validate_covariance(&self.entries)
    }
}

/// Outcome of [`validate_covariance`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityReport {
    pub valid: bool,
    pub min_symplectic_eigenvalue: f64,
    pub symmetry_defect: f64,
}

/// Real `2n × 2n` matrix `S` with `S·Ω·Sᵀ = Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n_modes: usize,
    entries: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            n_modes,
            entries: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Wraps an arbitrary matrix after checking the symplectic identity. The
    /// tolerance scales with `‖S‖²` so strongly squeezing maps are accepted.
    pub fn from_matrix(entries: DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols || rows == 0 || rows % 2 != 0 {
            return invalid(format!("symplectic matrix must be 2n x 2n, got {rows}x{cols}"));
        }
        let n_modes = rows / 2;
        let s = Self { n_modes, entries };
        let scale = s.entries.amax().powi(2).max(1.0);
        let defect = s.symplectic_defect();
        if defect > SYMMETRY_TOL * scale * rows as f64 {
            return invalid(format!("matrix is not symplectic: defect {defect:.3e}"));
        }
        Ok(s)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `max |S·Ω·Sᵀ − Ω|`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = omega_unchecked(self.n_modes);
        (&self.entries * &omega * self.entries.transpose() - omega).amax()
    }

    /// Matrix product `self · other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &SymplecticMatrix) -> Result<SymplecticMatrix> {
        if self.n_modes != other.n_modes {
            return invalid(format!(
                "cannot compose {}-mode and {}-mode symplectic maps",
                self.n_modes, other.n_modes
            ));
        }
        Ok(SymplecticMatrix {
            n_modes: self.n_modes,
            entries: &self.entries * &other.entries,
        })
    }
}

/// A Gaussian state: covariance, first moments and per-mode angular frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    cov: CovarianceMatrix,
    mean: DVector<f64>,
    omegas: Vec<f64>,
}

impl GaussianState {
    pub fn new(cov: CovarianceMatrix, mean: DVector<f64>, omegas: Vec<f64>) -> Result<Self> {
        let n = cov.n_modes();
        if mean.len() != 2 * n {
            return invalid(format!("mean has length {}, expected {}", mean.len(), 2 * n));
        }
        if omegas.len() != n {
            return invalid(format!("{} frequencies given for {n} modes", omegas.len()));
        }
        if let Some(w) = omegas.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return invalid(format!("mode frequency must be positive and finite, got {w}"));
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return invalid("mean vector has non-finite entries");
        }
        Ok(Self { cov, mean, omegas })
    }

    /// Zero-mean state with the same frequency on every mode.
    pub fn centered(cov: CovarianceMatrix, omega: f64) -> Result<Self> {
        let n = cov.n_modes();
        Self::new(cov, DVector::zeros(2 * n), vec![omega; n])
    }

    pub fn n_modes(&self) -> usize {
        self.cov.n_modes()
    }

    pub fn cov(&self) -> &CovarianceMatrix {
        &self.cov
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    /// Product state `self ⊗ other`.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let mean = DVector::from_iterator(
            self.mean.len() + other.mean.len(),
            self.mean.iter().chain(other.mean.iter()).copied(),
        );
        let omegas = self.omegas.iter().chain(&other.omegas).copied().collect();
        GaussianState {
            cov: self.cov.direct_sum(&other.cov),
            mean,
            omegas,
        }
    }
}

fn omega_unchecked(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Standard symplectic form: `n` copies of `[[0, 1], [−1, 0]]` on the diagonal.
pub fn symplectic_form(n_modes: usize) -> Result<DMatrix<f64>> {
    if n_modes == 0 {
        return invalid("symplectic form needs at least one mode");
    }
    Ok(omega_unchecked(n_modes))
}

fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

/// Symplectic eigenvalues `ν₁ ≤ … ≤ νₙ` of a symmetric covariance.
///
/// These are the moduli of the eigenvalues of `i·Ω·σ`, which come in `±ν`
/// pairs. Single-mode inputs use the closed form `ν = √|det σ|`.
pub fn symplectic_eigenvalues(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    let m = cov.as_matrix();
    let defect = symmetry_defect(m);
    if defect > SYMMETRY_TOL * m.amax().max(1.0) {
        return invalid(format!("covariance is not symmetric (defect {defect:.3e})"));
    }
    symplectic_eigenvalues_unchecked(m)
}

fn symplectic_eigenvalues_unchecked(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows() / 2;
    if n == 1 {
        let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
        return Ok(vec![det.abs().sqrt()]);
    }
    let product = omega_unchecked(n) * m;
    let schur = Schur::try_new(product, f64::EPSILON, 10_000).ok_or_else(|| {
        EiweError::NumericalFailure("Schur decomposition of Ω·σ did not converge".into())
    })?;
    let mut moduli: Vec<f64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .collect();
    moduli.sort_by(f64::total_cmp);
    Ok(moduli.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

/// Checks symmetry and the bona-fide condition `min ν ≥ 1/2 − 1e-10`.
pub fn validate_covariance(m: &DMatrix<f64>) -> Result<ValidityReport> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return invalid(format!("covariance must be square, got {rows}x{cols}"));
    }
    if rows == 0 || rows % 2 != 0 {
        return invalid(format!("covariance dimension must be even, got {rows}"));
    }
    let defect = symmetry_defect(m);
    let symmetric_part = (m + m.transpose()) * 0.5;
    let nus = symplectic_eigenvalues_unchecked(&symmetric_part)?;
    let min_nu = nus.first().copied().unwrap_or(f64::NAN);
    // A symmetric matrix with all ν ≥ 1/2 must also be positive definite;
    // indefinite matrices can still produce large |eigenvalues| of Ω·σ.
    let positive = symmetric_part
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .all(|&v| v > 0.0);
    Ok(ValidityReport {
        valid: defect <= SYMMETRY_TOL && positive && min_nu >= 0.5 - PHYSICALITY_TOL,
        min_symplectic_eigenvalue: min_nu,
        symmetry_defect: defect,
    })
}

/// Generator families for [`build_symplectic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SymplecticKind {
    /// Phase rotation `R(φ)` on one mode.
    Rotation,
    /// `diag(e⁻ʳ, eʳ)` on one mode.
    SingleModeSqueeze,
    /// Two-mode squeezer; x-quadratures correlate, p-quadratures anticorrelate.
    TwoModeSqueeze,
    /// Lossless beam splitter with mixing angle `θ`.
    BeamSplitter,
}

impl SymplecticKind {
    fn arity(self) -> usize {
        match self {
            Self::Rotation | Self::SingleModeSqueeze => 1,
            Self::TwoModeSqueeze | Self::BeamSplitter => 2,
        }
    }
}

/// Planar rotation `[[cos φ, −sin φ], [sin φ, cos φ]]` in the (x, p) plane.
pub fn rotation_2x2(phi: f64) -> Matrix2<f64> {
    let (s, c) = phi.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Builds a generator acting on `targets` and embeds it into `n_modes` modes.
pub fn build_symplectic(
    kind: SymplecticKind,
    parameter: f64,
    targets: &[usize],
    n_modes: usize,
) -> Result<SymplecticMatrix> {
    if !parameter.is_finite() {
        return invalid(format!("{kind:?} parameter must be finite"));
    }
    if targets.len() != kind.arity() {
        return invalid(format!(
            "{kind:?} acts on {} mode(s), got {} target(s)",
            kind.arity(),
            targets.len()
        ));
    }
    if let Some(&t) = targets.iter().find(|&&t| t >= n_modes) {
        return invalid(format!("target mode {t} out of range for {n_modes} modes"));
    }
    if targets.len() == 2 && targets[0] == targets[1] {
        return invalid(format!("repeated target mode {}", targets[0]));
    }

    let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
    let mut put = |i: usize, j: usize, b: Matrix2<f64>| {
        s.view_mut((2 * i, 2 * j), (2, 2)).copy_from(&b);
    };
    match kind {
        SymplecticKind::Rotation => put(targets[0], targets[0], rotation_2x2(parameter)),
        SymplecticKind::SingleModeSqueeze => put(
            targets[0],
            targets[0],
            Matrix2::new((-parameter).exp(), 0.0, 0.0, parameter.exp()),
        ),
        SymplecticKind::TwoModeSqueeze => {
            let (a, b) = (targets[0], targets[1]);
            let ch = Matrix2::identity() * parameter.cosh();
            let sh = Matrix2::new(1.0, 0.0, 0.0, -1.0) * parameter.sinh();
            put(a, a, ch);
            put(b, b, ch);
            put(a, b, sh);
            put(b, a, sh);
        }
        SymplecticKind::BeamSplitter => {
            let (a, b) = (targets[0], targets[1]);
            let (sn, cs) = parameter.sin_cos();
            put(a, a, Matrix2::identity() * cs);
            put(b, b, Matrix2::identity() * cs);
            put(a, b, Matrix2::identity() * sn);
            put(b, a, Matrix2::identity() * -sn);
        }
    }
    Ok(SymplecticMatrix {
        n_modes,
        entries: s,
    })
}

/// Gaussian unitary action: `σ → S·σ·Sᵀ`, `d → S·d`.
///
/// The output covariance is re-symmetrized to absorb roundoff.
pub fn apply_symplectic(s: &SymplecticMatrix, state: &GaussianState) -> Result<GaussianState> {
    if s.n_modes() != state.n_modes() {
        return invalid(format!(
            "symplectic map acts on {} modes, state has {}",
            s.n_modes(),
            state.n_modes()
        ));
    }
    let m = s.as_matrix();
    let raw = m * state.cov.as_matrix() * m.transpose();
    let cov = CovarianceMatrix::from_matrix((&raw + raw.transpose()) * 0.5)?;
    Ok(GaussianState {
        cov,
        mean: m * &state.mean,
        omegas: state.omegas.clone(),
    })
}

/// `Tr ρ² = (1/2)ⁿ / √det σ`.
pub fn purity(cov: &CovarianceMatrix) -> Result<f64> {
    let det = cov.as_matrix().clone().determinant();
    if !(det > 0.0) {
        return Err(EiweError::NumericalFailure(format!(
            "covariance determinant is not positive ({det:e})"
        )));
    }
    Ok(0.5f64.powi(cov.n_modes() as i32) / det.sqrt())
}
