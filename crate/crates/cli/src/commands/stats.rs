//! `bancoex stats`: outage/LCR/AOD curves (empirical and, where the fitted
//! family supports it, theoretical), ML fit reports, signal/interference
//! correlation and independence summaries, and per-variant averages.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter};
use std::path::Path;

use serde::Serialize;

use bancoex_core::link::{read_series_csv, Scheme, SinrSeries};
use bancoex_core::scalar::db_to_linear;
use bancoex_core::stats::{
    aod_curve, cross_correlation, fit_best_distribution, independence_check, lcr_curve,
    outage_probability, read_curve_csv, theoretical_aod, theoretical_lcr, threshold_grid,
    write_curve_csv, CurveKind, Family, FitOutcome, FittedDistribution, IndependenceScore,
    ThresholdCurve,
};

use crate::commands::{jobs_of, set_names, variant_names, Job};
use crate::config::{Plan, Variant};
use crate::jobs::parallel_foreach;
use crate::layout::{avg_dir, job_metadata, set_dir, stats_dir};
use crate::manifest::Manifest;
use crate::{CliError, CommonArgs};

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let plan = Plan::load(&args.config, args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let manifest = Manifest::new(
        "stats",
        &args.config,
        &plan.config_hash,
        plan.seed,
        args.workers,
        variant_names(&plan),
        set_names(&plan),
    );
    manifest.write(&args.out)?;

    let jobs = jobs_of(&plan);
    parallel_foreach(&jobs, args.workers, |job| stats_job(&plan, job, args))?;
    for variant in &plan.variants {
        write_variant_averages(&plan, variant, args)?;
    }
    manifest.finalize(&args.out)?;
    println!("stats: processed {} job(s) under {}", jobs.len(), args.out.display());
    Ok(())
}

const CURVE_KINDS: [(&str, CurveKind); 3] =
    [("outage", CurveKind::Outage), ("lcr", CurveKind::Lcr), ("aod", CurveKind::Aod)];

#[derive(Serialize)]
struct FitReport<'a> {
    scheme: &'a str,
    n: usize,
    best: &'a FittedDistribution<f64>,
    candidates: &'a [FittedDistribution<f64>],
    skipped: Vec<&'static str>,
    theoretical_curves: String,
}

#[derive(Serialize)]
struct Summary {
    variant: String,
    set: String,
    seed: u64,
    config_hash: String,
    n_packets: usize,
    cross_correlation_signal_interference: Option<f64>,
    independence: Option<IndependenceScore<f64>>,
    mean_transmissions_opportunistic: f64,
    direct_fraction: f64,
    note: Option<String>,
}

fn stats_job(plan: &Plan, job: &Job, args: &CommonArgs) -> Result<(), CliError> {
    let sdir = set_dir(&args.out, &job.variant, &job.set);
    let out_dir = stats_dir(&args.out, &job.variant, &job.set);
    std::fs::create_dir_all(&out_dir)?;
    let metadata = job_metadata(plan, &job.variant, &job.set);
    let grid = threshold_grid(
        plan.threshold_start_db,
        plan.threshold_stop_db,
        plan.threshold_step_db,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;

    for &scheme in plan.schemes() {
        let series_path = sdir.join(format!("series_{}.csv", scheme.name()));
        let series: SinrSeries<f64> = read_series_csv(&series_path).map_err(|e| {
            CliError::Data(format!("{}: {e}", series_path.display()))
        })?;

        let outage = outage_probability(&series, &grid).map_err(CliError::data)?;
        let lcr = lcr_curve(&series, &grid).map_err(CliError::data)?;
        let aod = aod_curve(&series, &grid).map_err(CliError::data)?;
        for (name, curve) in [("outage", &outage), ("lcr", &lcr), ("aod", &aod)] {
            let path = out_dir.join(format!("{name}_{}.csv", scheme.name()));
            let file = BufWriter::new(File::create(path)?);
            write_curve_csv(curve, &metadata, file).map_err(CliError::data)?;
        }

        let linear: Vec<f64> = series.values.iter().map(|&v| db_to_linear(v)).collect();
        let fit = fit_best_distribution(&linear, &plan.families).map_err(CliError::data)?;
        let theoretical_note = write_theoretical_curves(
            &fit, scheme, &grid, plan, &out_dir, &metadata,
        )?;
        let report = FitReport {
            scheme: scheme.name(),
            n: fit.best.n,
            best: &fit.best,
            candidates: &fit.candidates,
            skipped: fit.skipped.iter().map(|f| f.name()).collect(),
            theoretical_curves: theoretical_note,
        };
        let json = serde_json::to_string_pretty(&report)
            .map_err(|e| CliError::Data(format!("fit report: {e}")))?;
        std::fs::write(out_dir.join(format!("fit_{}.json", scheme.name())), json + "\n")?;
    }

    write_summary(plan, job, &sdir, &out_dir)
}

/// Emits theoretical LCR/AOD curves when the fitted family has the closed
/// forms; returns the note recorded in the fit report.
fn write_theoretical_curves(
    fit: &FitOutcome<f64>,
    scheme: Scheme,
    grid: &[f64],
    plan: &Plan,
    out_dir: &Path,
    metadata: &[(String, String)],
) -> Result<String, CliError> {
    let family = fit.best.family();
    if !matches!(family, Family::Lognormal | Family::Gamma) {
        return Ok(format!(
            "skipped: {} has no closed-form LCR/AOD",
            family.name()
        ));
    }
    let mut lcr_points = Vec::new();
    let mut aod_points = Vec::new();
    for &th in grid {
        if let Ok(rate) = theoretical_lcr(&fit.best, th, plan.stats_doppler_hz) {
            lcr_points.push((th, rate));
            if let Ok(duration) = theoretical_aod(&fit.best, th, plan.stats_doppler_hz) {
                aod_points.push((th, duration));
            }
        }
    }
    if lcr_points.is_empty() {
        return Ok("skipped: no computable grid point".into());
    }
    let to_curve = |kind, points: &[(f64, f64)]| ThresholdCurve {
        kind,
        thresholds_db: points.iter().map(|p| p.0).collect(),
        values: points.iter().map(|p| p.1).collect(),
    };
    let lcr = to_curve(CurveKind::Lcr, &lcr_points);
    let file =
        BufWriter::new(File::create(out_dir.join(format!("theoretical_lcr_{}.csv", scheme.name())))?);
    write_curve_csv(&lcr, metadata, file).map_err(CliError::data)?;
    if !aod_points.is_empty() {
        let aod = to_curve(CurveKind::Aod, &aod_points);
        let file = BufWriter::new(File::create(
            out_dir.join(format!("theoretical_aod_{}.csv", scheme.name())),
        )?);
        write_curve_csv(&aod, metadata, file).map_err(CliError::data)?;
    }
    Ok("written".into())
}

struct PacketRow {
    path: String,
    signal_dbm: f64,
    interference_dbm: f64,
}

fn read_packets(path: &Path) -> Result<Vec<PacketRow>, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !header_seen {
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(CliError::Data(format!(
                "{}: line {}: expected 7 fields",
                path.display(),
                idx + 1
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.parse().map_err(|_| {
                CliError::Data(format!("{}: line {}: bad number '{s}'", path.display(), idx + 1))
            })
        };
        rows.push(PacketRow {
            path: fields[3].to_string(),
            signal_dbm: parse(fields[4])?,
            interference_dbm: parse(fields[5])?,
        });
    }
    Ok(rows)
}

fn write_summary(
    plan: &Plan,
    job: &Job,
    sdir: &Path,
    out_dir: &Path,
) -> Result<(), CliError> {
    let packets = read_packets(&sdir.join("packets.csv"))?;
    let signal: Vec<f64> = packets.iter().map(|p| db_to_linear(p.signal_dbm)).collect();
    let interference: Vec<f64> =
        packets.iter().map(|p| db_to_linear(p.interference_dbm)).collect();

    let mut note = None;
    let rho = match cross_correlation(&signal, &interference) {
        Ok(r) => Some(r),
        Err(e) => {
            note = Some(format!("correlation unavailable: {e}"));
            None
        }
    };
    let independence = independence_check(&signal, &interference, plan.bins).ok();

    let transmissions: u32 = packets
        .iter()
        .map(|p| if p.path == "direct" { 1 } else { 2 })
        .sum();
    let direct = packets.iter().filter(|p| p.path == "direct").count();
    let n = packets.len();
    let summary = Summary {
        variant: job.variant.dir_name(),
        set: format!("{}_{}", job.set.subject_of_interest, job.set.interferer),
        seed: plan.seed,
        config_hash: plan.config_hash.clone(),
        n_packets: n,
        cross_correlation_signal_interference: rho,
        independence,
        mean_transmissions_opportunistic: transmissions as f64 / n.max(1) as f64,
        direct_fraction: direct as f64 / n.max(1) as f64,
        note,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Data(format!("summary: {e}")))?;
    std::fs::write(out_dir.join("summary.json"), json + "\n")?;
    Ok(())
}

/// Per-variant mean curves across analysis sets, written under `avg/`.
fn write_variant_averages(plan: &Plan, variant: &Variant, args: &CommonArgs) -> Result<(), CliError> {
    let dir = avg_dir(&args.out, variant);
    std::fs::create_dir_all(&dir)?;
    for &scheme in plan.schemes() {
        for (name, kind) in CURVE_KINDS {
            let mut thresholds: Option<Vec<f64>> = None;
            let mut acc: Vec<f64> = Vec::new();
            for set in &plan.sets {
                let path = stats_dir(&args.out, variant, set)
                    .join(format!("{name}_{}.csv", scheme.name()));
                let curve: ThresholdCurve<f64> =
                    read_curve_csv(&path).map_err(|e| CliError::Data(format!(
                        "{}: {e}",
                        path.display()
                    )))?;
                match &thresholds {
                    None => {
                        thresholds = Some(curve.thresholds_db.clone());
                        acc = curve.values.clone();
                    }
                    Some(grid) => {
                        if *grid != curve.thresholds_db {
                            return Err(CliError::Data(format!(
                                "threshold grid mismatch in {}",
                                path.display()
                            )));
                        }
                        for (a, v) in acc.iter_mut().zip(&curve.values) {
                            *a += v;
                        }
                    }
                }
            }
            let thresholds = thresholds.expect("at least one analysis set");
            let n = plan.sets.len() as f64;
            let avg = ThresholdCurve {
                kind,
                thresholds_db: thresholds,
                values: acc.into_iter().map(|v| v / n).collect(),
            };
            let metadata = vec![
                ("seed".to_string(), plan.seed.to_string()),
                ("config_hash".to_string(), plan.config_hash.clone()),
                ("variant".to_string(), variant.dir_name()),
                ("sets_averaged".to_string(), plan.sets.len().to_string()),
            ];
            let file = BufWriter::new(File::create(
                dir.join(format!("{name}_{}.csv", scheme.name())),
            )?);
            write_curve_csv(&avg, &metadata, file).map_err(CliError::data)?;
        }
    }
    Ok(())
}
