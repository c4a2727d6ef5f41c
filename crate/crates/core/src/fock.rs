//! Truncated Fock-space oracle.
//!
//! Rebuilds the TMST state as an explicit density matrix, conditions it on a
//! coherent-state outcome of mode `b`, and computes entropies by direct
//! diagonalization. None of this reuses the covariance-matrix code path, so
//! agreement between the two is a genuine cross-check.
//!
//! Two-mode states are stored by sector of constant photon-number difference
//! `d = n_a − n_b`. The two-mode squeezer and thermal inputs both conserve
//! `d`, so the density matrix is block diagonal in `d` and a cutoff of 60
//! needs a few hundred thousand entries instead of 60⁴.

use nalgebra::{DMatrix, DVector, Matrix2};
use num_complex::Complex64;

use crate::constants::K_B;
use crate::error::{invalid, EiweError, Result};
use crate::gaussian::CovarianceMatrix;

/// Maximum trace defect accepted by [`thermal_fock`].
pub const THERMAL_DEFECT_BOUND: f64 = 1e-8;
/// Maximum trace defect accepted by [`tmst_fock`].
pub const TMST_DEFECT_BOUND: f64 = 1e-6;
/// Eigenvalues below this are dropped from entropy sums.
pub const EIGEN_FLOOR: f64 = 1e-14;
/// Most negative eigenvalue tolerated before a state is declared broken.
pub const NEGATIVITY_TOL: f64 = 1e-10;

/// Basis label `(n_a, n_b)`; single-mode states use `(n, 0)`.
pub type FockIndex = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
enum Storage {
    Dense(DMatrix<Complex64>),
    /// `sectors[d + cutoff − 1]` holds the block with `n_a − n_b = d`;
    /// within a block, index `k` is `min(n_a, n_b)`.
    Sectors(Vec<DMatrix<Complex64>>),
}

/// Density matrix on a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    cutoff: usize,
    storage: Storage,
    trace_defect: f64,
}

impl FockDensityMatrix {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_modes(&self) -> usize {
        match self.storage {
            Storage::Dense(_) => 1,
            Storage::Sectors(_) => 2,
        }
    }

    pub fn dimension(&self) -> usize {
        self.cutoff.pow(self.n_modes() as u32)
    }

    /// Probability that fell outside the truncated space.
    pub fn trace_defect(&self) -> f64 {
        self.trace_defect
    }

    fn sector_of(&self, idx: FockIndex) -> (usize, usize) {
        let (na, nb) = idx;
        (na + self.cutoff - 1 - nb, na.min(nb))
    }

    /// `⟨row|ρ|col⟩`.
    pub fn element(&self, row: FockIndex, col: FockIndex) -> Complex64 {
        let c = self.cutoff;
        match &self.storage {
            Storage::Dense(m) => {
                if row.1 != 0 || col.1 != 0 || row.0 >= c || col.0 >= c {
                    return Complex64::new(0.0, 0.0);
                }
                m[(row.0, col.0)]
            }
            Storage::Sectors(blocks) => {
                if row.0 >= c || row.1 >= c || col.0 >= c || col.1 >= c {
                    return Complex64::new(0.0, 0.0);
                }
                let (sr, kr) = self.sector_of(row);
                let (sc, kc) = self.sector_of(col);
                if sr != sc {
                    return Complex64::new(0.0, 0.0);
                }
                blocks[sr][(kr, kc)]
            }
        }
    }

    fn blocks(&self) -> Vec<&DMatrix<Complex64>> {
        match &self.storage {
            Storage::Dense(m) => vec![m],
            Storage::Sectors(b) => b.iter().collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        self.blocks().iter().map(|m| m.trace().re).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.blocks()
            .iter()
            .map(|m| (*m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of `ρ / Tr ρ`, unsorted.
    pub fn normalized_eigenvalues(&self) -> Vec<f64> {
        let tr = self.trace();
        let mut out = Vec::with_capacity(self.dimension());
        for m in self.blocks() {
            let herm = (m + m.adjoint()) * Complex64::new(0.5 / tr, 0.0);
            out.extend(herm.symmetric_eigenvalues().iter().copied());
        }
        out
    }

    fn basis(&self) -> Vec<FockIndex> {
        let c = self.cutoff;
        match self.storage {
            Storage::Dense(_) => (0..c).map(|n| (n, 0)).collect(),
            Storage::Sectors(_) => (0..c).flat_map(|a| (0..c).map(move |b| (a, b))).collect(),
        }
    }

    /// `Tr(ρ·O)/Tr ρ` for a product of ladder operators, written left to right
    /// as in the operator expression (the rightmost acts first).
    fn expect(&self, ops: &[Ladder]) -> Complex64 {
        let tr = self.trace();
        let mut acc = Complex64::new(0.0, 0.0);
        for ket in self.basis() {
            if let Some((coeff, image)) = apply_ladders(ket, ops, self.cutoff) {
                acc += self.element(ket, image) * coeff;
            }
        }
        acc / tr
    }

    pub fn mean_photon_number(&self, mode: usize) -> f64 {
        self.expect(&[Ladder::Raise(mode), Ladder::Lower(mode)]).re
    }

    /// Quadrature covariance and mean (vacuum variance 1/2) of the normalized
    /// state.
    pub fn quadrature_moments(&self) -> Result<(CovarianceMatrix, DVector<f64>)> {
        let n = self.n_modes();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // q = u·a + conj(u)·a†
        let weights = [Complex64::new(s, 0.0), Complex64::new(0.0, -s)];

        let mut first = vec![Complex64::new(0.0, 0.0); n];
        let mut second = vec![Complex64::new(0.0, 0.0); n];
        let mut number = vec![0.0; n];
        for m in 0..n {
            first[m] = self.expect(&[Ladder::Lower(m)]);
            second[m] = self.expect(&[Ladder::Lower(m), Ladder::Lower(m)]);
            number[m] = self.mean_photon_number(m);
        }
        let (ab, adag_b) = if n == 2 {
            (
                self.expect(&[Ladder::Lower(0), Ladder::Lower(1)]),
                self.expect(&[Ladder::Raise(0), Ladder::Lower(1)]),
            )
        } else {
            Default::default()
        };

        let mut mean = DVector::zeros(2 * n);
        for m in 0..n {
            for (q, u) in weights.iter().enumerate() {
                mean[2 * m + q] = 2.0 * (u * first[m]).re;
            }
        }
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..2 * n {
            for j in 0..2 * n {
                let (mi, qi) = (i / 2, i % 2);
                let (mj, qj) = (j / 2, j % 2);
                let (u, v) = (weights[qi], weights[qj]);
                let raw = if mi == mj {
                    2.0 * (u * v * second[mi]).re + (u * v.conj()).re * (2.0 * number[mi] + 1.0)
                } else {
                    // ⟨q_a q_b⟩ with a the lower-index mode.
                    let (ua, ub) = if mi < mj { (u, v) } else { (v, u) };
                    2.0 * (ua * ub * ab).re + 2.0 * (ua.conj() * ub * adag_b).re
                };
                cov[(i, j)] = raw - mean[i] * mean[j];
            }
        }
        Ok((CovarianceMatrix::from_matrix(cov)?, mean))
    }
}

#[derive(Debug, Clone, Copy)]
enum Ladder {
    Lower(usize),
    Raise(usize),
}

fn apply_ladders(ket: FockIndex, ops: &[Ladder], cutoff: usize) -> Option<(f64, FockIndex)> {
    let mut occ = [ket.0, ket.1];
    let mut coeff = 1.0;
    for op in ops.iter().rev() {
        match *op {
            Ladder::Lower(m) => {
                if occ[m] == 0 {
                    return None;
                }
                coeff *= (occ[m] as f64).sqrt();
                occ[m] -= 1;
            }
            Ladder::Raise(m) => {
                if occ[m] + 1 >= cutoff {
                    return None;
                }
                occ[m] += 1;
                coeff *= (occ[m] as f64).sqrt();
            }
        }
    }
    Some((coeff, (occ[0], occ[1])))
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return invalid(format!("Fock cutoff must be at least 2, got {cutoff}"));
    }
    Ok(())
}

/// `pₙ = n̄ⁿ/(n̄+1)ⁿ⁺¹`.
fn thermal_populations(n_bar: f64, len: usize) -> Vec<f64> {
    let q = n_bar / (n_bar + 1.0);
    let mut p = Vec::with_capacity(len);
    let mut cur = 1.0 / (n_bar + 1.0);
    for _ in 0..len {
        p.push(cur);
        cur *= q;
    }
    p
}

/// Bose–Einstein mixture `Σ pₙ |n⟩⟨n|` truncated at `cutoff` levels.
pub fn thermal_fock(n_bar: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_cutoff(cutoff)?;
    if !(n_bar >= 0.0 && n_bar.is_finite()) {
        return invalid(format!("mean occupation must be non-negative, got {n_bar}"));
    }
    let p = thermal_populations(n_bar, cutoff);
    let defect = (n_bar / (n_bar + 1.0)).powi(cutoff as i32);
    if defect > THERMAL_DEFECT_BOUND {
        return Err(EiweError::Truncation {
            defect,
            bound: THERMAL_DEFECT_BOUND,
        });
    }
    let diag = DVector::from_iterator(cutoff, p.iter().map(|&v| Complex64::new(v, 0.0)));
    Ok(FockDensityMatrix {
        cutoff,
        storage: Storage::Dense(DMatrix::from_diagonal(&diag)),
        trace_defect: defect,
    })
}

/// Two-mode squeezed thermal state `S(r)·(ρ_th ⊗ ρ_th)·S(r)†` with
/// `S(r) = exp[r(a†b† − ab)]`.
///
/// The squeezer is exponentiated on a space padded to twice the cutoff and
/// the result projected back, so probability pushed past the cutoff shows up
/// in [`FockDensityMatrix::trace_defect`] instead of reflecting off the edge.
/// Returns [`EiweError::Truncation`] when the defect exceeds
/// [`TMST_DEFECT_BOUND`]; see [`tmst_fock_unchecked`] for the raw state.
pub fn tmst_fock(n_bar: f64, r: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    let rho = tmst_fock_unchecked(n_bar, r, cutoff)?;
    if rho.trace_defect > TMST_DEFECT_BOUND {
        return Err(EiweError::Truncation {
            defect: rho.trace_defect,
            bound: TMST_DEFECT_BOUND,
        });
    }
    Ok(rho)
}

/// [`tmst_fock`] without the truncation bound.
pub fn tmst_fock_unchecked(n_bar: f64, r: f64, cutoff: usize) -> Result<FockDensityMatrix> {
    check_cutoff(cutoff)?;
    if !(n_bar >= 0.0 && n_bar.is_finite()) {
        return invalid(format!("mean occupation must be non-negative, got {n_bar}"));
    }
    if !r.is_finite() {
        return invalid("squeezing must be finite");
    }
    let padded = 2 * cutoff;
    let p = thermal_populations(n_bar, padded);

    let mut sectors = Vec::with_capacity(2 * cutoff - 1);
    let mut trace = 0.0;
    for d in -(cutoff as isize - 1)..=(cutoff as isize - 1) {
        let shift = d.unsigned_abs();
        let len = padded - shift;
        // Basis k ↦ (k + shift, k) (or mirrored); a†b† raises k by one.
        let mut gen = DMatrix::<f64>::zeros(len, len);
        for k in 0..len - 1 {
            let amp = r * (((k + shift + 1) * (k + 1)) as f64).sqrt();
            gen[(k + 1, k)] = amp;
            gen[(k, k + 1)] = -amp;
        }
        let u = gen.exp();
        let thermal = DVector::from_iterator(len, (0..len).map(|k| p[k + shift] * p[k]));
        let full = &u * DMatrix::from_diagonal(&thermal) * u.transpose();
        let keep = cutoff - shift;
        let block = full.view((0, 0), (keep, keep));
        trace += block.trace();
        sectors.push(block.map(|v| Complex64::new(v, 0.0)));
    }
    Ok(FockDensityMatrix {
        cutoff,
        storage: Storage::Sectors(sectors),
        trace_defect: (1.0 - trace).max(0.0),
    })
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n < cutoff`.
fn coherent_amplitudes(alpha: Complex64, cutoff: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(cutoff);
    let mut cur = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..cutoff {
        c.push(cur);
        cur = cur * alpha / ((n + 1) as f64).sqrt();
    }
    c
}

/// State of mode `a` after mode `b` is projected on the coherent state `|α⟩`,
/// `⟨α|ρ|α⟩_b / p(α)`.
///
/// The returned defect is the parent's plus the part of `|α⟩` lost to the
/// cutoff.
pub fn coherent_condition(rho: &FockDensityMatrix, alpha: Complex64) -> Result<FockDensityMatrix> {
    if rho.n_modes() != 2 {
        return invalid("coherent conditioning needs a two-mode state");
    }
    let c = rho.cutoff;
    if !(alpha.norm_sqr() <= c as f64 / 4.0) {
        return invalid(format!(
            "|α|² = {} is not representable at cutoff {c} (limit {})",
            alpha.norm_sqr(),
            c as f64 / 4.0
        ));
    }
    let amp = coherent_amplitudes(alpha, c);
    let mut out = DMatrix::<Complex64>::zeros(c, c);
    for m in 0..c {
        for mp in 0..c {
            let mut acc = Complex64::new(0.0, 0.0);
            for n in 0..c {
                // Sector conservation forces n' = n + m' − m.
                let np = n as isize + mp as isize - m as isize;
                if np < 0 || np >= c as isize {
                    continue;
                }
                let np = np as usize;
                acc += amp[n].conj() * amp[np] * rho.element((m, n), (mp, np));
            }
            out[(m, mp)] = acc;
        }
    }
    let prob = out.trace().re;
    if !(prob > 1e-300) {
        return Err(EiweError::DegenerateOutcome(prob.max(0.0)));
    }
    let lost = (1.0 - amp.iter().map(|z| z.norm_sqr()).sum::<f64>()).max(0.0);
    Ok(FockDensityMatrix {
        cutoff: c,
        storage: Storage::Dense(out / Complex64::new(prob, 0.0)),
        trace_defect: rho.trace_defect + lost,
    })
}

/// `−Σ λᵢ ln λᵢ` over the eigenvalues of the normalized state.
pub fn fock_entropy(rho: &FockDensityMatrix) -> Result<f64> {
    let eig = rho.normalized_eigenvalues();
    if let Some(v) = eig.iter().find(|&&v| v < -NEGATIVITY_TOL) {
        return Err(EiweError::NumericalFailure(format!(
            "density matrix has eigenvalue {v:e}"
        )));
    }
    Ok(eig
        .into_iter()
        .filter(|&v| v > EIGEN_FLOOR)
        .map(|v| -v * v.ln())
        .sum())
}

/// Everything [`oracle_work`] computes along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub entropy_eq: f64,
    pub entropy_cond: f64,
    pub work: f64,
    pub trace_defect: f64,
    /// Quadrature covariance of the conditional state of mode `a`.
    pub conditional_covariance: Matrix2<f64>,
}

pub fn oracle_evaluate(
    n_bar: f64,
    temperature: f64,
    r: f64,
    alpha: Complex64,
    cutoff: usize,
) -> Result<OracleReport> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return invalid(format!("temperature must be positive, got {temperature}"));
    }
    let thermal = thermal_fock(n_bar, cutoff)?;
    let joint = tmst_fock(n_bar, r, cutoff)?;
    let cond = coherent_condition(&joint, alpha)?;
    let entropy_eq = fock_entropy(&thermal)?;
    let entropy_cond = fock_entropy(&cond)?;
    let (cov, _) = cond.quadrature_moments()?;
    Ok(OracleReport {
        entropy_eq,
        entropy_cond,
        work: K_B * temperature * (entropy_eq - entropy_cond),
        trace_defect: joint.trace_defect.max(thermal.trace_defect),
        conditional_covariance: cov.block(0, 0),
    })
}

/// `k_B T [S(ρ_th) − S(ρ_a|α)]` computed entirely in the number basis.
///
/// `omega` only enters through `(n̄, T)`; it is accepted so the signature
/// mirrors the Gaussian pipeline.
pub fn oracle_work(
    n_bar: f64,
    omega: f64,
    temperature: f64,
    r: f64,
    alpha: Complex64,
    cutoff: usize,
) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return invalid(format!("angular frequency must be positive, got {omega}"));
    }
    Ok(oracle_evaluate(n_bar, temperature, r, alpha, cutoff)?.work)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{conditional_covariance, eiwe_measurement};
    use crate::states::{block_decompose, two_mode_squeezed_thermal};
    use crate::thermo::bosonic_entropy;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn thermal_cases() {
        let vac = thermal_fock(0.0, 5).unwrap();
        assert_eq!(vac.element((0, 0), (0, 0)), c(1.0, 0.0));
        assert_eq!(vac.trace(), 1.0);
        assert_eq!(fock_entropy(&vac).unwrap(), 0.0);

        let th = thermal_fock(1.0, 60).unwrap();
        assert_abs_diff_eq!(th.element((0, 0), (0, 0)).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(th.element((1, 0), (1, 0)).re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(fock_entropy(&th).unwrap(), 2.0 * 2f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(th.mean_photon_number(0), 1.0, epsilon = 1e-8);

        assert!(matches!(thermal_fock(1.0, 10), Err(EiweError::Truncation { .. })));
        assert!(thermal_fock(0.1, 1).is_err());
    }

    #[test]
    fn tmst_without_squeezing_is_a_product() {
        let rho = tmst_fock(0.3, 0.0, 30).unwrap();
        let p = thermal_populations(0.3, 30);
        for a in 0..5 {
            for b in 0..5 {
                assert_abs_diff_eq!(rho.element((a, b), (a, b)).re, p[a] * p[b], epsilon = 1e-15);
            }
        }
        assert_eq!(rho.element((1, 0), (0, 1)), c(0.0, 0.0));
    }

    #[test]
    fn tmsv_schmidt_coefficients() {
        let r: f64 = 0.5;
        let rho = tmst_fock(0.0, r, 40).unwrap();
        for n in 0..15 {
            let expected = r.tanh().powi(2 * n as i32) / r.cosh().powi(2);
            assert_abs_diff_eq!(rho.element((n, n), (n, n)).re, expected, epsilon = 1e-12);
        }
        assert!(rho.trace_defect() < 1e-12);
        assert!(rho.hermiticity_defect() < 1e-14);
        assert_abs_diff_eq!(fock_entropy(&rho).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn tmst_moments_match_gaussian() {
        let rho = tmst_fock(0.2, 0.5, 60).unwrap();
        let (cov, mean) = rho.quadrature_moments().unwrap();
        let gauss = two_mode_squeezed_thermal(0.2, 0.5, 1.0).unwrap();
        assert!((cov.as_matrix() - gauss.cov().as_matrix()).amax() < 1e-5);
        assert!(mean.amax() < 1e-12);
    }

    #[test]
    fn truncation_is_flagged() {
        let err = tmst_fock(0.0, 1.0, 8).unwrap_err();
        match err {
            EiweError::Truncation { defect, .. } => assert!(defect > 1e-3, "{defect}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(tmst_fock_unchecked(0.0, 1.0, 8).unwrap().trace_defect() > 1e-6);
    }

    #[test]
    fn conditioning_product_state() {
        let rho = tmst_fock(0.4, 0.0, 30).unwrap();
        let th = thermal_fock(0.4, 30).unwrap();
        for alpha in [c(0.0, 0.0), c(0.7, -0.4)] {
            let cond = coherent_condition(&rho, alpha).unwrap();
            for m in 0..6 {
                for mp in 0..6 {
                    let want = th.element((m, 0), (mp, 0)) / th.trace();
                    assert!((cond.element((m, 0), (mp, 0)) - want).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn conditioning_tmsv_on_vacuum_outcome_gives_vacuum() {
        let rho = tmst_fock(0.0, 0.8, 50).unwrap();
        let cond = coherent_condition(&rho, c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(cond.element((0, 0), (0, 0)).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fock_entropy(&cond).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn conditional_covariance_is_outcome_independent() {
        let rho = tmst_fock(0.2, 0.5, 60).unwrap();
        let blocks = block_decompose(&two_mode_squeezed_thermal(0.2, 0.5, 1.0).unwrap()).unwrap();
        let gauss = conditional_covariance(&blocks, &eiwe_measurement(1)).unwrap();
        let nu = gauss[(0, 0)];
        for alpha in [c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.3)] {
            let cond = coherent_condition(&rho, alpha).unwrap();
            let (cov, _) = cond.quadrature_moments().unwrap();
            assert!((cov.block(0, 0) - gauss).amax() < 1e-5);
            assert!(cond.hermiticity_defect() < 1e-12);
            assert!(cond.normalized_eigenvalues().iter().all(|&v| v > -NEGATIVITY_TOL));
            assert_abs_diff_eq!(fock_entropy(&cond).unwrap(), bosonic_entropy(nu), epsilon = 1e-6);
        }
    }

    #[test]
    fn conditioning_errors() {
        let rho = tmst_fock(0.1, 0.2, 12).unwrap();
        assert!(coherent_condition(&rho, c(3.0, 0.0)).is_err());
        let th = thermal_fock(0.1, 12).unwrap();
        assert!(coherent_condition(&th, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn oracle_work_vanishes_without_squeezing() {
        let w = oracle_work(0.2, 1e15, 300.0, 0.0, c(0.3, 0.1), 40).unwrap();
        assert!(w.abs() < 1e-10 * K_B * 300.0);
    }
}
