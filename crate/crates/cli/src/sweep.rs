//! Parallel evaluation of a sweep and CSV assembly in grid order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use anyhow::Result;
use mad_capacity::capacity::mad3::{anchors, slice_point};
use mad_capacity::structure::{classify, monotonicity_certificate};
use mad_capacity::{CertifyOptions, TransitionMatrix, certify_with};
use rayon::prelude::*;

use crate::spec::{Analysis, Coords, Instance, Sweep};

pub const BASE_COLUMNS: [&str; 5] = ["degradable", "antidegradable", "min_eig", "cert_kind", "cert_value"];
const MONO_COLUMNS: [&str; 2] = ["mono_cp", "mono_min_eig"];
const MAD3_COLUMNS: [&str; 3] = ["slice_lower", "slice_upper", "slice_status"];

/// Output of one admissible grid point.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub coords: Coords,
    pub cells: Vec<String>,
    pub wall_time: Duration,
}

#[derive(Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub skipped: Vec<(Coords, String)>,
}

/// Shortest round-trip representation, in exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) { format!("{x}") } else { format!("{x:e}") }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn header(sweep: &Sweep) -> Vec<String> {
    let mut h: Vec<String> = sweep.slot_names().into_iter().map(String::from).collect();
    h.extend(BASE_COLUMNS.iter().map(|s| s.to_string()));
    if sweep.spec.analyses.contains(&Analysis::Monotonicity) {
        h.extend(MONO_COLUMNS.iter().map(|s| s.to_string()));
    }
    if sweep.spec.analyses.contains(&Analysis::Mad3) {
        h.extend(MAD3_COLUMNS.iter().map(|s| s.to_string()));
    }
    h
}

fn evaluate(
    sweep: &Sweep,
    gamma: &TransitionMatrix,
    raised: Option<&std::result::Result<TransitionMatrix, String>>,
    opts: &CertifyOptions,
) -> Result<Vec<String>> {
    let analyses = &sweep.spec.analyses;
    let mut cells = vec![String::new(); BASE_COLUMNS.len()];
    if analyses.contains(&Analysis::Classify) {
        let c = classify(gamma, opts.tol_psd);
        cells[0] = c.degradable.as_str().into();
        cells[1] = if c.antidegradable { "1" } else { "0" }.into();
        cells[2] = fmt_opt(c.min_eig);
    }
    if analyses.contains(&Analysis::Capacity) {
        let c = certify_with(gamma, opts);
        cells[3] = c.kind.as_str().into();
        cells[4] = fmt_opt(c.value);
    }
    if analyses.contains(&Analysis::Monotonicity) {
        let side = sweep.spec.monotonicity.as_ref().expect("checked when compiling").side.into();
        match raised {
            Some(Ok(more)) => match monotonicity_certificate(gamma, more, side, opts.tol_psd) {
                Ok(m) => cells.extend([if m.cp { "1" } else { "0" }.into(), fmt_f64(m.min_eig)]),
                Err(e) => cells.extend(["n/a".into(), format!("{e}")]),
            },
            Some(Err(e)) => cells.extend(["n/a".into(), e.clone()]),
            None => cells.extend(["n/a".into(), String::new()]),
        }
    }
    if analyses.contains(&Analysis::Mad3) {
        let (g10, g20, g21) = (gamma.get(1, 0), gamma.get(2, 0), gamma.get(2, 1));
        let a = anchors(g10, sweep.spec.mad3_iterations, opts)?;
        let p = slice_point(g10, g20, g21, &a, opts)?;
        cells.extend([fmt_f64(p.lower), fmt_opt(p.upper), format!("{:?}", p.status)]);
    }
    Ok(cells)
}

/// Evaluates every admissible grid point. The result is ordered by grid
/// position regardless of scheduling.
pub fn run(sweep: &Sweep, opts: &CertifyOptions, progress: bool) -> Result<SweepOutcome> {
    let grid = sweep.grid();
    let total = grid.len();
    let done = AtomicUsize::new(0);
    let report_every = (total / 20).max(1);
    let results: Vec<Result<std::result::Result<SweepRecord, (Coords, String)>>> = grid
        .into_par_iter()
        .map(|coords| {
            let start = Instant::now();
            let out = match sweep.instantiate(&coords) {
                Instance::Skipped(reason) => Ok(Err((coords, reason))),
                Instance::Admissible { gamma, raised } => {
                    let cells = evaluate(sweep, &gamma, raised.as_ref(), opts)?;
                    Ok(Ok(SweepRecord { coords, cells, wall_time: start.elapsed() }))
                }
            };
            let n = done.fetch_add(1, Ordering::Relaxed) + 1;
            if progress && (n.is_multiple_of(report_every) || n == total) {
                eprintln!("progress: {n}/{total} grid points");
            }
            out
        })
        .collect();
    let mut outcome = SweepOutcome::default();
    for r in results {
        match r? {
            Ok(rec) => outcome.records.push(rec),
            Err(skip) => outcome.skipped.push(skip),
        }
    }
    Ok(outcome)
}

pub fn write_csv<W: std::io::Write>(sweep: &Sweep, outcome: &SweepOutcome, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header(sweep))?;
    for rec in &outcome.records {
        let row: Vec<String> = rec.coords.iter().map(|&x| fmt_f64(x)).chain(rec.cells.iter().cloned()).collect();
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}
