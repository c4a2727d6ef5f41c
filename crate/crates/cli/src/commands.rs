//! The four subcommands. Each builds a [`Table`] and leaves I/O to `main`.

use eiwe_core::constants::K_B;
use eiwe_core::fock::{coherent_condition, fock_entropy, thermal_fock, tmst_fock};
use eiwe_core::nalgebra::Matrix2;
use eiwe_core::{
    delta_ricci, eiwe_measurement, eiwe_pipeline, mean_occupation, sample_and_condition,
    two_mode_squeezed_thermal, CurvatureInput, EiweError, GaussianMeasurement, OccupationModel,
    ThermalOccupation,
};
use log::{debug, info, warn};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{SweepConfig, ThermalGrid};
use crate::table::{Cell, Table};

/// Failure modes mapped onto exit codes by `main`.
#[derive(Debug)]
pub enum CmdError {
    /// Bad configuration or arguments (exit 2).
    Usage(String),
    /// The engine failed on valid input (exit 1).
    Numeric(String),
}

impl From<EiweError> for CmdError {
    fn from(e: EiweError) -> Self {
        match e {
            EiweError::InvalidArgument(_) => CmdError::Usage(e.to_string()),
            _ => CmdError::Numeric(e.to_string()),
        }
    }
}

/// Smallest oracle/Gaussian rel_dev denominator, in units of `k_BT`.
const WORK_FLOOR: f64 = 1e-10;
pub const ORACLE_REL_TOL: f64 = 1e-4;
pub const ORACLE_SPREAD_TOL: f64 = 1e-5;
pub const ORACLE_MIN_N_BAR: f64 = 0.05;
/// Outcomes drawn per oracle row.
pub const ORACLE_OUTCOMES: usize = 5;

fn model_name(m: OccupationModel) -> &'static str {
    match m {
        OccupationModel::BoltzmannApprox => "boltzmann",
        OccupationModel::BoseEinstein => "bose_einstein",
    }
}

fn parameters(cfg: &SweepConfig) -> Value {
    let (key, values) = match &cfg.thermal {
        ThermalGrid::NBar(v) => ("n_bar", v),
        ThermalGrid::Temperature(v) => ("temperature", v),
    };
    let mut p = json!({
        "r": cfg.r,
        "model": model_name(cfg.model),
        "omega": cfg.omega,
        "lambda": cfg.lambda,
        "phi": cfg.phi,
        "seed": cfg.seed,
        "oracle_cutoff": cfg.oracle,
    });
    p[key] = json!(values);
    p
}

fn occupations(cfg: &SweepConfig) -> Result<Vec<ThermalOccupation>, CmdError> {
    let occ: Vec<ThermalOccupation> = match &cfg.thermal {
        ThermalGrid::NBar(v) => v
            .iter()
            .map(|&n| ThermalOccupation::from_n_bar(n, cfg.omega, cfg.model))
            .collect::<Result<_, _>>()?,
        ThermalGrid::Temperature(v) => v
            .iter()
            .map(|&t| mean_occupation(cfg.omega, t, cfg.model))
            .collect::<Result<_, _>>()?,
    };
    for o in occ.iter().filter(|o| o.underflow) {
        warn!("T = {} K underflows to n_bar = 0", o.temperature);
    }
    Ok(occ)
}

/// Relative-deviation gate for the asymptotic law at occupation `n_bar`;
/// `None` above 1e-3, where the law is not expected to hold.
pub fn eq4_threshold(n_bar: f64) -> Option<f64> {
    if n_bar <= 1e-6 {
        Some(0.02)
    } else if n_bar <= 1e-4 {
        Some(0.05)
    } else if n_bar <= 1e-3 {
        Some(0.10)
    } else {
        None
    }
}

pub fn verify_eq4(cfg: &SweepConfig) -> Result<Table, CmdError> {
    if cfg.model != OccupationModel::BoltzmannApprox {
        return Err(CmdError::Usage("verify-eq4 needs model = boltzmann".into()));
    }
    for key in ["lambda", "phi", "oracle", "cutoff"] {
        if cfg.is_set(key) {
            warn!("verify-eq4 always uses lambda = 1, phi = 0; ignoring '{key}'");
        }
    }
    let occ = occupations(cfg)?;
    let m = eiwe_measurement(1);
    let mut table = Table::new(
        "verify-eq4",
        vec!["r", "xi", "n_bar", "S_eq", "S_cond", "W", "W_closed", "rel_dev"],
        parameters(cfg),
    );
    for &r in &cfg.r {
        let mut by_n: Vec<(f64, f64)> = Vec::with_capacity(occ.len());
        for o in &occ {
            let rep = eiwe_pipeline(o, r, &m)?;
            debug!("r = {r}, n_bar = {}: W = {:e} J", rep.n_bar, rep.work);
            if let Some(limit) = eq4_threshold(rep.n_bar) {
                if rep.relative_deviation > limit {
                    warn!(
                        "r = {r}, n_bar = {:e}: rel_dev {:e} exceeds {limit}",
                        rep.n_bar, rep.relative_deviation
                    );
                    table.passed = false;
                }
            }
            by_n.push((rep.n_bar, rep.relative_deviation));
            table.push(vec![
                r.into(),
                rep.xi.into(),
                rep.n_bar.into(),
                rep.entropy_eq.into(),
                rep.entropy_cond.into(),
                rep.work.into(),
                rep.work_closed_form.into(),
                rep.relative_deviation.into(),
            ]);
        }
        if r != 0.0 {
            by_n.sort_by(|a, b| b.0.total_cmp(&a.0));
            by_n.dedup_by(|a, b| a.0 == b.0);
            if let Some(w) = by_n.windows(2).find(|w| w[1].1 >= w[0].1) {
                warn!(
                    "r = {r}: rel_dev does not decrease from n_bar = {:e} to {:e}",
                    w[0].0, w[1].0
                );
                table.passed = false;
            }
        }
    }
    Ok(table)
}

pub fn sweep(cfg: &SweepConfig) -> Result<Table, CmdError> {
    if cfg.oracle.is_some() {
        warn!("sweep does not run the oracle; use oracle-compare");
    }
    let occ = occupations(cfg)?;
    let mut grid = Vec::new();
    for &r in &cfg.r {
        for o in &occ {
            for &lambda in &cfg.lambda {
                for &phi in &cfg.phi {
                    grid.push((r, *o, GaussianMeasurement::new(lambda, phi, 1)?));
                }
            }
        }
    }
    info!("sweep over {} grid points", grid.len());
    let rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .enumerate()
        .map(|(i, (r, o, m))| {
            let rep = eiwe_pipeline(o, *r, m)?;
            let seed = cfg.seed.wrapping_add(i as u64);
            let state = two_mode_squeezed_thermal(o.n_bar, *r, o.omega)?;
            let (outcome, _) = sample_and_condition(&state, m, seed)?;
            Ok(vec![
                rep.r.into(),
                rep.n_bar.into(),
                rep.temperature.into(),
                rep.omega.into(),
                rep.lambda.into(),
                rep.phi.into(),
                rep.xi.into(),
                rep.entropy_eq.into(),
                rep.entropy_cond.into(),
                rep.work.into(),
                rep.work_closed_form.into(),
                rep.relative_deviation.into(),
                Cell::Int(seed),
                outcome.alpha.0.into(),
                outcome.alpha.1.into(),
                outcome.log_density.into(),
            ])
        })
        .collect::<Result<_, EiweError>>()?;
    let mut table = Table::new(
        "sweep",
        vec![
            "r", "n_bar", "temperature", "omega", "lambda", "phi", "xi", "S_eq", "S_cond", "W",
            "W_closed", "rel_dev", "seed", "alpha_x", "alpha_p", "log_density",
        ],
        parameters(cfg),
    );
    for row in rows {
        table.push(row);
    }
    Ok(table)
}

/// Oracle result for one `(r, n̄)` point; `None` fields mean the cutoff was
/// too small.
struct OracleRow {
    w_gaussian: f64,
    w_oracle: Option<f64>,
    trace_defect: f64,
    alpha_spread: Option<f64>,
}

fn oracle_row(o: &ThermalOccupation, r: f64, cutoff: usize, seed: u64) -> Result<OracleRow, EiweError> {
    let m = eiwe_measurement(1);
    let w_gaussian = eiwe_pipeline(o, r, &m)?.work;
    let truncated = |defect: f64| OracleRow {
        w_gaussian,
        w_oracle: None,
        trace_defect: defect,
        alpha_spread: None,
    };
    let (thermal, joint) = match (thermal_fock(o.n_bar, cutoff), tmst_fock(o.n_bar, r, cutoff)) {
        (Ok(t), Ok(j)) => (t, j),
        (Err(EiweError::Truncation { defect, .. }), _) | (_, Err(EiweError::Truncation { defect, .. })) => {
            return Ok(truncated(defect));
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let entropy_eq = fock_entropy(&thermal)?;
    let state = two_mode_squeezed_thermal(o.n_bar, r, o.omega)?;
    let mut defect = thermal.trace_defect().max(joint.trace_defect());
    let mut works = Vec::with_capacity(ORACLE_OUTCOMES);
    let mut covs: Vec<Matrix2<f64>> = Vec::with_capacity(ORACLE_OUTCOMES);
    for k in 0..ORACLE_OUTCOMES {
        let (outcome, _) = sample_and_condition(&state, &m, seed.wrapping_add(k as u64))?;
        let cond = match coherent_condition(&joint, outcome.amplitude()) {
            Ok(c) => c,
            // The outcome lies beyond what the cutoff can represent.
            Err(EiweError::InvalidArgument(msg)) => {
                warn!("{msg}");
                return Ok(truncated(defect));
            }
            Err(e) => return Err(e),
        };
        defect = defect.max(cond.trace_defect());
        works.push(K_B * o.temperature * (entropy_eq - fock_entropy(&cond)?));
        covs.push(cond.quadrature_moments()?.0.block(0, 0));
    }
    let mut spread = 0.0f64;
    for (i, a) in covs.iter().enumerate() {
        for b in &covs[i + 1..] {
            spread = spread.max((a - b).amax());
        }
    }
    Ok(OracleRow {
        w_gaussian,
        w_oracle: Some(works.iter().sum::<f64>() / works.len() as f64),
        trace_defect: defect,
        alpha_spread: Some(spread),
    })
}

pub fn oracle_compare(cfg: &SweepConfig) -> Result<Table, CmdError> {
    let Some(cutoff) = cfg.oracle else {
        return Err(CmdError::Usage(
            "oracle-compare needs 'oracle = on' with 'cutoff', or --cutoff".into(),
        ));
    };
    for key in ["lambda", "phi"] {
        if cfg.is_set(key) {
            warn!("oracle-compare always uses lambda = 1, phi = 0; ignoring '{key}'");
        }
    }
    let occ = occupations(cfg)?;
    if let Some(o) = occ.iter().find(|o| o.n_bar < ORACLE_MIN_N_BAR) {
        return Err(CmdError::Usage(format!(
            "oracle-compare needs n_bar >= {ORACLE_MIN_N_BAR}, got {}",
            o.n_bar
        )));
    }
    let grid: Vec<(f64, ThermalOccupation)> = cfg
        .r
        .iter()
        .flat_map(|&r| occ.iter().map(move |o| (r, *o)))
        .collect();
    let rows: Vec<OracleRow> = grid
        .par_iter()
        .enumerate()
        .map(|(i, (r, o))| {
            let seed = cfg.seed.wrapping_add((i * ORACLE_OUTCOMES) as u64);
            oracle_row(o, *r, cutoff, seed)
        })
        .collect::<Result<_, _>>()?;

    let mut table = Table::new(
        "oracle-compare",
        vec![
            "r", "n_bar", "W_gaussian", "W_oracle", "abs_dev", "rel_dev", "trace_defect",
            "alpha_spread", "truncated",
        ],
        parameters(cfg),
    );
    for ((r, o), row) in grid.iter().zip(rows) {
        let abs_dev = row.w_oracle.map(|w| (w - row.w_gaussian).abs());
        let floor = K_B * o.temperature * WORK_FLOOR;
        let rel_dev = abs_dev.map(|d| d / row.w_gaussian.abs().max(floor));
        let truncated = row.w_oracle.is_none();
        let ok = !truncated
            && rel_dev.is_some_and(|d| d <= ORACLE_REL_TOL)
            && row.alpha_spread.is_some_and(|s| s <= ORACLE_SPREAD_TOL);
        if truncated {
            warn!("r = {r}, n_bar = {}: truncated at cutoff {cutoff} (defect {:e})", o.n_bar, row.trace_defect);
        } else if !ok {
            warn!("r = {r}, n_bar = {}: oracle disagreement", o.n_bar);
        }
        table.passed &= ok;
        table.push(vec![
            (*r).into(),
            o.n_bar.into(),
            row.w_gaussian.into(),
            row.w_oracle.into(),
            abs_dev.into(),
            rel_dev.into(),
            row.trace_defect.into(),
            row.alpha_spread.into(),
            Cell::Bool(truncated),
        ]);
    }
    Ok(table)
}

pub fn curvature(xi: f64, p0: f64) -> Result<Value, CmdError> {
    let input = CurvatureInput::new(xi, p0)?;
    Ok(json!({
        "xi": xi,
        "p0": p0,
        "delta_R": delta_ricci(&input),
        "constants": eiwe_core::constants::CODATA_2018,
    }))
}
