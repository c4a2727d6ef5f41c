//! Acceptance suite. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p eiwe-core --test acceptance -- --nocapture --test-threads=1`
//! to see them in order.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use eiwe_core::fock::{coherent_condition, fock_entropy, tmst_fock, tmst_fock_unchecked};
use eiwe_core::nalgebra::Matrix2;
use eiwe_core::num_complex::Complex64;
use eiwe_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const OMEGA: f64 = 1.2e15;

fn verdict(id: &str, pass: bool, elapsed: Duration, limit: Duration, detail: &str) -> bool {
    let ok = pass && elapsed < limit;
    println!(
        "[{id}] {} ({:.3} s, limit {:.0} s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    ok
}

fn boltzmann(n_bar: f64) -> ThermalOccupation {
    ThermalOccupation::from_n_bar(n_bar, OMEGA, OccupationModel::BoltzmannApprox).unwrap()
}

fn bose(n_bar: f64) -> ThermalOccupation {
    ThermalOccupation::from_n_bar(n_bar, OMEGA, OccupationModel::BoseEinstein).unwrap()
}

fn sci(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.3e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn max_pairwise(mats: &[Matrix2<f64>]) -> f64 {
    let mut spread = 0.0f64;
    for a in mats {
        for b in mats {
            spread = spread.max((a - b).amax());
        }
    }
    spread
}

#[test]
fn a1_asymptotic_law_at_r_0_6() {
    let start = Instant::now();
    let m = eiwe_measurement(1);
    let grid = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];
    let devs: Vec<f64> = grid
        .iter()
        .map(|&n| eiwe_pipeline(&boltzmann(n), 0.6, &m).unwrap().relative_deviation)
        .collect();
    let bounds = [(1, 0.10), (2, 0.05), (4, 0.02)];
    let within = bounds.iter().all(|&(i, b)| devs[i] <= b);
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    let detail = format!("ξ(0.6)={:.5}, rel_dev over n̄=1e-2..1e-6: {}", xi(0.6), sci(&devs));
    let ok = verdict("A1", within && decreasing, start.elapsed(), Duration::from_secs(1), &detail);
    assert!(ok, "{detail}");
}

#[test]
fn a2_xi_sweep_at_n_1e_5() {
    let start = Instant::now();
    let m = eiwe_measurement(1);
    let occ = boltzmann(1e-5);
    let mut rows = Vec::new();
    let mut all = true;
    for target in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let r = squeezing_for_xi(target).unwrap();
        let dev = eiwe_pipeline(&occ, r, &m).unwrap().relative_deviation;
        let ok = dev <= 0.05;
        all &= ok;
        rows.push(format!("ξ={target}: r={r:.6} dev={dev:.4e}{}", if ok { "" } else { " (>5%)" }));
    }
    let detail = rows.join("; ");
    let ok = verdict("A2", all, start.elapsed(), Duration::from_secs(1), &detail);
    assert!(ok, "{detail}");
}

#[test]
fn a3_outcome_independence() {
    let start = Instant::now();
    let state = two_mode_squeezed_thermal(0.2, 0.5, OMEGA).unwrap();
    let m = eiwe_measurement(1);

    let mut gaussian = Vec::with_capacity(1000);
    let mut outcomes = Vec::with_capacity(1000);
    for seed in 0..1000u64 {
        let (outcome, cond) = sample_and_condition(&state, &m, seed).unwrap();
        gaussian.push(cond.cov().block(0, 0));
        outcomes.push(outcome);
    }
    let reference = gaussian[0];
    let gaussian_spread = gaussian
        .iter()
        .map(|c| (c - reference).amax())
        .fold(0.0, f64::max);

    let rho = tmst_fock(0.2, 0.5, 60).unwrap();
    let fock: Vec<Matrix2<f64>> = outcomes[..5]
        .iter()
        .map(|o| {
            let cond = coherent_condition(&rho, o.amplitude()).unwrap();
            cond.quadrature_moments().unwrap().0.block(0, 0)
        })
        .collect();
    let fock_spread = max_pairwise(&fock);
    let oracle_vs_gaussian = fock.iter().map(|c| (c - reference).amax()).fold(0.0, f64::max);

    let pass = gaussian_spread <= 1e-12 && fock_spread <= 1e-5;
    let detail = format!(
        "gaussian spread over 1000 outcomes {gaussian_spread:.2e}, fock spread over 5 outcomes \
         {fock_spread:.2e}, fock vs gaussian {oracle_vs_gaussian:.2e}"
    );
    let ok = verdict("A3", pass, start.elapsed(), Duration::from_secs(30), &detail);
    assert!(ok, "{detail}");
}

#[test]
fn a4_oracle_equivalence() {
    let start = Instant::now();
    let occ = bose(0.2);
    let r = 0.5;
    let gaussian = eiwe_pipeline(&occ, r, &eiwe_measurement(1)).unwrap();
    let oracle = oracle_evaluate(0.2, occ.temperature, r, Complex64::new(0.0, 0.0), 60).unwrap();
    let work_rel = (oracle.work - gaussian.work).abs() / gaussian.work.abs();
    let entropy_dev = (oracle.entropy_eq - gaussian.entropy_eq)
        .abs()
        .max((oracle.entropy_cond - gaussian.entropy_cond).abs());

    // Convergence of the conditional entropy in the cutoff.
    let target = gaussian.entropy_cond;
    let cutoffs = [8usize, 16, 32, 64];
    let errors: Vec<f64> = cutoffs
        .iter()
        .map(|&c| {
            let rho = tmst_fock_unchecked(0.2, r, c).unwrap();
            let cond = coherent_condition(&rho, Complex64::new(0.0, 0.0)).unwrap();
            (fock_entropy(&cond).unwrap() - target).abs()
        })
        .collect();
    let floor = 1e-9;
    let converges = errors
        .windows(2)
        .all(|w| w[0] <= floor || w[1] <= floor || w[0] / w[1] >= 10.0);
    let pass = work_rel <= 1e-5 && entropy_dev <= 1e-6 && converges;
    let detail = format!(
        "work rel dev {work_rel:.2e}, entropy dev {entropy_dev:.2e} nats, \
         cutoff {cutoffs:?} entropy errors {}",
        sci(&errors)
    );
    let ok = verdict("A4", pass, start.elapsed(), Duration::from_secs(60), &detail);
    assert!(ok, "{detail}");
}

#[test]
fn a5_homodyne_limits() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let x_meas = GaussianMeasurement::new(1e-9, 0.0, 1).unwrap();
    let p_meas = GaussianMeasurement::new(1e9, 0.0, 1).unwrap();
    let mut worst = 0.0f64;
    let mut valid = true;
    // The gap to the homodyne limit is 2λ·c_pp² in absolute terms, so the
    // sampled domain keeps |c_ab| ≤ 1.5·sinh 3 ≈ 15.
    for _ in 0..50 {
        let n = rng.random_range(0.0..1.0);
        let r = rng.random_range(-1.5..1.5);
        let state = two_mode_squeezed_thermal(n, r, OMEGA).unwrap();
        valid &= state.cov().validate().unwrap().valid;
        let blocks = block_decompose(&state).unwrap();
        let dx = (conditional_covariance(&blocks, &x_meas).unwrap()
            - homodyne_limit(&blocks, Quadrature::X))
        .amax();
        let dp = (conditional_covariance(&blocks, &p_meas).unwrap()
            - homodyne_limit(&blocks, Quadrature::P))
        .amax();
        worst = worst.max(dx).max(dp);
    }
    let detail = format!("worst deviation over 50 TMST inputs {worst:.2e}");
    let ok = verdict("A5", valid && worst <= 1e-6, start.elapsed(), Duration::from_secs(1), &detail);
    assert!(ok, "{detail}");
}

#[test]
fn a6_phi_invariance_at_unit_strength() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let occ = bose(rng.random_range(1e-3..1.0));
        let r = rng.random_range(0.05..2.0);
        let works: Vec<f64> = [0.0, 0.37, PI / 3.0, PI / 2.0]
            .iter()
            .map(|&phi| {
                let m = GaussianMeasurement::new(1.0, phi, 1).unwrap();
                eiwe_pipeline(&occ, r, &m).unwrap().work
            })
            .collect();
        let scale = works[0].abs();
        for w in &works {
            worst = worst.max((w - works[0]).abs() / scale);
        }
    }
    let detail = format!("worst relative work spread over φ {worst:.2e}");
    let ok = verdict("A6", worst <= 1e-12, start.elapsed(), Duration::from_secs(1), &detail);
    assert!(ok, "{detail}");
}

#[test]
fn a7_discrete_comparison() {
    let start = Instant::now();
    let xi_gap = 1.0 - xi(20.0);
    let mut worst = 0.0f64;
    for x in [1e-6, 1e-4, 0.01, 0.2, 0.9] {
        for omega in [1e12, OMEGA, 3e15] {
            let discrete = discrete_comparison(x, omega).unwrap();
            let limit = eiwe_closed_form(x, omega, 20.0);
            worst = worst.max((discrete - limit).abs() / limit);
        }
    }
    let detail = format!("1 − ξ(20) = {xi_gap:.1e}, worst relative gap {worst:.2e}");
    let ok = verdict(
        "A7",
        xi_gap < 1e-17 && worst <= 1e-8,
        start.elapsed(),
        Duration::from_secs(1),
        &detail,
    );
    assert!(ok, "{detail}");
}

#[test]
fn a8_curvature_formula() {
    let start = Instant::now();
    // Independent evaluation from literal CODATA 2018 values.
    let g = 6.674_30e-11_f64;
    let c2 = 299_792_458.0_f64 * 299_792_458.0;
    let expected = 32.0 * g / (c2 * c2);
    let got = delta_ricci(&CurvatureInput::new(1.0, 1.0).unwrap());
    let rel = (got - expected).abs() / expected;

    let mut rng = StdRng::seed_from_u64(8);
    let mut linear = true;
    for _ in 0..200 {
        let x = rng.random_range(0.0..=1.0);
        let p = rng.random_range(0.0..1e9);
        let k = rng.random_range(0.0..1.0);
        let base = delta_ricci(&CurvatureInput::new(x, p).unwrap());
        let tol = 4.0 * f64::EPSILON * base;
        linear &= (delta_ricci(&CurvatureInput::new(k * x, p).unwrap()) - k * base).abs() <= tol;
        linear &= (delta_ricci(&CurvatureInput::new(x, k * p).unwrap()) - k * base).abs() <= tol;
    }
    let detail = format!("ΔR(ξ=1, p₀=1 Pa) = {got:.6e} m⁻², rel dev {rel:.1e}, linear: {linear}");
    let ok = verdict("A8", rel <= 1e-10 && linear, start.elapsed(), Duration::from_secs(1), &detail);
    assert!(ok, "{detail}");
}

fn random_physical_state(rng: &mut StdRng) -> GaussianState {
    let n1 = rng.random_range(0.0..3.0);
    let n2 = rng.random_range(0.0..3.0);
    let base = thermal_state(n1, 1, OMEGA)
        .unwrap()
        .tensor(&thermal_state(n2, 1, OMEGA).unwrap());
    let ops = [
        build_symplectic(SymplecticKind::TwoModeSqueeze, rng.random_range(-1.5..1.5), &[0, 1], 2),
        build_symplectic(SymplecticKind::BeamSplitter, rng.random_range(-PI..PI), &[0, 1], 2),
        build_symplectic(SymplecticKind::SingleModeSqueeze, rng.random_range(-1.0..1.0), &[1], 2),
        build_symplectic(SymplecticKind::Rotation, rng.random_range(-PI..PI), &[0], 2),
    ];
    ops.into_iter()
        .fold(base, |st, s| apply_symplectic(&s.unwrap(), &st).unwrap())
}

#[test]
fn a9_property_suites() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(9);
    let mut cases = 0usize;
    let mut failures = Vec::new();

    // Symplectic-form preservation.
    let kinds = [
        (SymplecticKind::Rotation, vec![1]),
        (SymplecticKind::SingleModeSqueeze, vec![0]),
        (SymplecticKind::TwoModeSqueeze, vec![0, 1]),
        (SymplecticKind::BeamSplitter, vec![1, 0]),
    ];
    for i in 0..150 {
        let (kind, targets) = &kinds[i % kinds.len()];
        let s = build_symplectic(*kind, rng.random_range(-3.0..3.0), targets, 2).unwrap();
        cases += 1;
        if s.symplectic_defect() > 1e-12 {
            failures.push(format!("symplectic defect {:.2e} for {kind:?}", s.symplectic_defect()));
        }
    }

    // Bona-fide checks: random Gaussian unitaries of thermal states are valid,
    // shrinking a state below the vacuum is not.
    for _ in 0..100 {
        let st = random_physical_state(&mut rng);
        cases += 1;
        if !st.cov().validate().unwrap().valid {
            failures.push("physical state rejected".into());
        }
        let shrink = rng.random_range(0.05..0.9);
        let squashed = CovarianceMatrix::from_matrix(CovarianceMatrix::vacuum(2).into_matrix() * shrink)
            .unwrap();
        cases += 1;
        if squashed.validate().unwrap().valid {
            failures.push(format!("sub-vacuum state {shrink} accepted"));
        }
    }

    // Entropy non-negativity and additivity.
    for _ in 0..100 {
        let a = random_physical_state(&mut rng);
        let b = random_physical_state(&mut rng);
        let sa = von_neumann_entropy(a.cov()).unwrap();
        let sb = von_neumann_entropy(b.cov()).unwrap();
        let sab = von_neumann_entropy(a.tensor(&b).cov()).unwrap();
        cases += 1;
        if sa < 0.0 || sb < 0.0 || (sab - sa - sb).abs() > 1e-12 * sab.max(1.0) {
            failures.push(format!("entropy {sa} + {sb} vs {sab}"));
        }
    }

    // ξ: even, zero at the origin, strictly increasing on [0, 5].
    let mut grid: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..5.0)).collect();
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    for w in grid.windows(2) {
        cases += 1;
        if !(xi(w[1]) > xi(w[0]) && xi(-w[1]) == xi(w[1]) && (0.0..1.0).contains(&xi(w[1]))) {
            failures.push(format!("ξ not monotone/even at {} -> {}", w[0], w[1]));
        }
    }
    if xi(0.0) != 0.0 {
        failures.push("ξ(0) != 0".into());
    }

    // Work non-negativity on the EIWE grid.
    let m = eiwe_measurement(1);
    for _ in 0..100 {
        let n = rng.random_range(1e-6..=1.0);
        let r = rng.random_range(0.0..=3.0);
        let w = eiwe_pipeline(&bose(n), r, &m).unwrap().work;
        cases += 1;
        if w < -1e-14 {
            failures.push(format!("negative work {w:e} at n̄={n}, r={r}"));
        }
    }

    let detail = format!("{cases} randomized cases, {} failures {:?}", failures.len(), failures);
    let ok = verdict(
        "A9",
        cases >= 500 && failures.is_empty(),
        start.elapsed(),
        Duration::from_secs(30),
        &detail,
    );
    assert!(ok, "{detail}");
}
