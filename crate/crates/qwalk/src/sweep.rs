//! Potential sweeps, evaluated in parallel and written as CSV in `q` order.

use std::io::Write;

use qwalk_core::bounds::{fidelity_lower, gap_lower, leading_pair};
use qwalk_core::graph::{Graph, Involution};
use qwalk_core::well::DoubleWell;
use rayon::prelude::*;

use crate::error::CliError;

pub const THREADS_VAR: &str = "QWALK_THREADS";

pub const HEADER: [&str; 8] = ["q", "lambda1", "lambda2", "gap", "gap_lower", "p_at_tstar", "fidelity_lower", "tstar"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub q: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
    pub gap_lower: f64,
    pub p_at_tstar: f64,
    /// `None` where the bound does not apply.
    pub fidelity_lower: Option<f64>,
    pub tstar: f64,
}

/// `steps` evenly spaced values from `q_min` to `q_max` inclusive.
pub fn q_values(q_min: f64, q_max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(q_min.is_finite() && q_max.is_finite()) {
        return Err(CliError::Usage("--q-min and --q-max must be finite".into()));
    }
    if q_min > q_max {
        return Err(CliError::Usage(format!("--q-min {q_min} exceeds --q-max {q_max}")));
    }
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if steps == 1 {
        return Ok(vec![q_min]);
    }
    let width = q_max - q_min;
    Ok((0..steps)
        .map(|i| if i + 1 == steps { q_max } else { q_min + width * i as f64 / (steps - 1) as f64 })
        .collect())
}

pub fn sweep_row(g: &Graph, inv: &Involution, well: usize, q: f64) -> Result<SweepRow, CliError> {
    let dw = DoubleWell::new(g, inv, well, q)?;
    let lead = leading_pair(&dw)?;
    let transfer = lead.transfer()?;
    let fidelity = match fidelity_lower(q, dw.max_degree) {
        Ok(f) => f,
        Err(qwalk_core::Error::Precondition(_)) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(SweepRow {
        q,
        lambda1: lead.lambda1(),
        lambda2: lead.lambda2(),
        gap: lead.gap,
        gap_lower: gap_lower(q, dw.max_degree, dw.well_distance())?.gap,
        p_at_tstar: transfer.probability,
        fidelity_lower: fidelity,
        tstar: transfer.t,
    })
}

/// Worker count from `QWALK_THREADS`; unset or `0` means one per core.
pub fn threads_from_env() -> Result<usize, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(0),
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_VAR} must be a non-negative integer, got {s:?}"))),
    }
}

/// Rows in the order of `qs`, whatever order the workers finish in.
pub fn sweep(g: &Graph, inv: &Involution, well: usize, qs: &[f64], threads: usize) -> Result<Vec<SweepRow>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    pool.install(|| qs.par_iter().map(|&q| sweep_row(g, inv, well, q)).collect())
}

/// 17 significant digits, enough to recover the exact double.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            format_float(r.q),
            format_float(r.lambda1),
            format_float(r.lambda2),
            format_float(r.gap),
            format_float(r.gap_lower),
            format_float(r.p_at_tstar),
            r.fidelity_lower.map(format_float).unwrap_or_default(),
            format_float(r.tstar),
        ])?;
    }
    w.flush()?;
    Ok(())
}
