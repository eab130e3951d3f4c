use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, anyhow};
use clap::Args;
use mad_capacity::capacity::mad3::SliceStatus;
use mad_capacity::capacity::{Mad3Options, mad3_acge_verification, max_diagonal_coherent_info_with};
use mad_capacity::structure::{capacity_positive_witness, classify};
use mad_capacity::{ChannelSpec, TransitionMatrix, certify_with};
use serde::Serialize;

use crate::output::emit;
use crate::spec::Sweep;
use crate::sweep::{self, fmt_f64};
use crate::{CmdResult, Failure, GlobalOpts, InputContext};

fn read_input(path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).input()
}

#[derive(Debug, Serialize)]
struct Witness {
    level: usize,
    value: f64,
}

#[derive(Debug, Serialize)]
struct AnalyzeReport {
    channel: ChannelSpec,
    kind: &'static str,
    value: Option<f64>,
    provenance: Vec<String>,
    degradable: &'static str,
    antidegradable: bool,
    degrading_min_eig: Option<f64>,
    ladder: bool,
    witnesses: Vec<Witness>,
    diagonal_max: f64,
    diagonal_argmax: Vec<f64>,
}

pub fn analyze(path: &Path, g: &GlobalOpts) -> CmdResult {
    let opts = g.certify()?;
    let text = read_input(path)?;
    let gamma: TransitionMatrix =
        serde_json::from_str(&text).with_context(|| format!("malformed channel in {}", path.display())).input()?;
    let class = classify(&gamma, opts.tol_psd);
    let cert = certify_with(&gamma, &opts);
    let witnesses = (1..gamma.dim())
        .filter(|&j| gamma.get(j, 0) < gamma.survival(j))
        .map(|j| capacity_positive_witness(&gamma, j).map(|value| Witness { level: j, value }))
        .collect::<Result<Vec<_>, _>>()
        .numeric()?;
    let (diagonal_max, argmax) = max_diagonal_coherent_info_with(&gamma, opts.grid_step);
    let report = AnalyzeReport {
        channel: gamma.to_spec(),
        kind: cert.kind.as_str(),
        value: cert.value,
        provenance: cert.provenance,
        degradable: class.degradable.as_str(),
        antidegradable: class.antidegradable,
        degrading_min_eig: class.min_eig,
        ladder: class.ladder,
        witnesses,
        diagonal_max,
        diagonal_argmax: argmax.as_slice().to_vec(),
    };
    if report.value.is_some_and(|v| !v.is_finite()) {
        return Err(Failure::Numeric(anyhow!("certificate value is not finite")));
    }
    emit(g.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })
    .numeric()
}

pub fn sweep(path: &Path, g: &GlobalOpts, progress: bool) -> CmdResult {
    let opts = g.certify()?;
    let sweep = Sweep::from_json(&read_input(path)?).input()?;
    let start = Instant::now();
    let outcome = sweep::run(&sweep, &opts, progress).numeric()?;
    for (coords, reason) in &outcome.skipped {
        let c: Vec<String> = coords.iter().map(|&x| fmt_f64(x)).collect();
        eprintln!("skipped [{}]: {reason}", c.join(", "));
    }
    emit(g.out.as_deref(), |w| sweep::write_csv(&sweep, &outcome, w)).numeric()?;
    if progress {
        let busy: f64 = outcome.records.iter().map(|r| r.wall_time.as_secs_f64()).sum();
        eprintln!(
            "{} rows, {} skipped, {:.2} s elapsed ({:.2} s of point evaluations)",
            outcome.records.len(),
            outcome.skipped.len(),
            start.elapsed().as_secs_f64(),
            busy
        );
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct Mad3Args {
    /// Shared decay probability γ10, in [0, 1/2].
    #[arg(long)]
    pub gamma10: f64,
    /// Last index n of the sequence γ21 = 1 − 2^{−n}.
    #[arg(long, default_value_t = 4)]
    pub iterations: usize,
    /// Comma-separated slopes k in [1, 2).
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 1.1, 1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9])]
    pub k_values: Vec<f64>,
    /// ω21 intervals per boundary scan.
    #[arg(long, default_value_t = 256)]
    pub omega_points: usize,
    /// Grid spacing of the slice.
    #[arg(long, default_value_t = 0.05)]
    pub slice_step: f64,
    /// Optional CSV with one row per slice point.
    #[arg(long)]
    pub slice_out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Mad3Summary {
    gamma10: f64,
    adc_value: f64,
    boundary_agrees: bool,
    values_match: bool,
    slice_points: usize,
    certified: usize,
    lower_bound_only: usize,
    anchors: Vec<mad_capacity::capacity::mad3::Anchor>,
}

pub fn mad3(args: &Mad3Args, g: &GlobalOpts) -> CmdResult {
    let certify = g.certify()?;
    if !(0.0..=0.5).contains(&args.gamma10) {
        return Err(Failure::Input(anyhow!("gamma10 = {} outside [0, 1/2]", args.gamma10)));
    }
    if let Some(k) = args.k_values.iter().find(|k| !(1.0..2.0).contains(*k)) {
        return Err(Failure::Input(anyhow!("k = {k} outside [1, 2)")));
    }
    if args.omega_points == 0 || !(args.slice_step > 0.0 && args.slice_step <= 1.0) {
        return Err(Failure::Input(anyhow!("omega-points must be positive and slice-step in (0, 1]")));
    }
    let opts = Mad3Options {
        gamma10: args.gamma10,
        iterations: args.iterations,
        k_values: args.k_values.clone(),
        omega_points: args.omega_points,
        slice_step: args.slice_step,
        certify,
    };
    let report = mad3_acge_verification(&opts).numeric()?;

    emit(g.out.as_deref(), |w| {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["n", "k", "gamma21", "predicted_boundary", "found_boundary", "resolution", "agrees"])?;
        for s in &report.scans {
            wtr.write_record([
                s.n.to_string(),
                fmt_f64(s.k),
                fmt_f64(s.gamma21),
                fmt_f64(s.predicted),
                s.found.map(fmt_f64).unwrap_or_default(),
                fmt_f64(s.resolution),
                (s.agrees as u8).to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    })
    .numeric()?;
    if let Some(path) = &args.slice_out {
        crate::output::write_atomically(path, |w| {
            let mut wtr = csv::Writer::from_writer(w);
            wtr.write_record(["gamma20", "gamma21", "lower", "upper", "diagonal_max", "value", "status", "via"])?;
            for p in &report.slice {
                wtr.write_record([
                    fmt_f64(p.gamma20),
                    fmt_f64(p.gamma21),
                    fmt_f64(p.lower),
                    p.upper.map(fmt_f64).unwrap_or_default(),
                    fmt_f64(p.diagonal_max),
                    fmt_f64(p.value),
                    format!("{:?}", p.status),
                    p.via.clone(),
                ])?;
            }
            wtr.flush()?;
            Ok(())
        })
        .numeric()?;
    }

    let summary = Mad3Summary {
        gamma10: report.gamma10,
        adc_value: report.adc_value,
        boundary_agrees: report.boundary_agrees,
        values_match: report.values_match,
        slice_points: report.slice.len(),
        certified: report.certified,
        lower_bound_only: report.slice.iter().filter(|p| p.status == SliceStatus::LowerBoundOnly).count(),
        anchors: report.anchors.clone(),
    };
    let text = serde_json::to_string_pretty(&summary).numeric()?;
    if g.out.is_some() {
        println!("{text}");
    } else {
        eprintln!("{text}");
    }
    if !report.boundary_agrees || !report.values_match {
        return Err(Failure::Numeric(anyhow!(
            "slice check failed: boundary_agrees = {}, values_match = {}",
            report.boundary_agrees,
            report.values_match
        )));
    }
    Ok(())
}
