//! `bancoex report`: bundle the averaged per-variant curves into
//! plot-ready tables, one CSV per figure.

use std::fs::File;
use std::io::{BufWriter, Write};

use bancoex_core::link::Scheme;
use bancoex_core::stats::{read_curve_csv, ThresholdCurve};

use crate::commands::{set_names, variant_names};
use crate::config::{Plan, Variant};
use crate::layout::{avg_dir, figures_dir};
use crate::manifest::Manifest;
use crate::{CliError, CommonArgs};

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let plan = Plan::load(&args.config, args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let manifest = Manifest::new(
        "report",
        &args.config,
        &plan.config_hash,
        plan.seed,
        args.workers,
        variant_names(&plan),
        set_names(&plan),
    );
    manifest.write(&args.out)?;

    let dir = figures_dir(&args.out);
    std::fs::create_dir_all(&dir)?;

    // Per-variant scheme comparison for each statistic.
    for variant in &plan.variants {
        for kind in ["outage", "lcr", "aod"] {
            let curves = load_scheme_curves(&plan, variant, kind, args)?;
            let path = dir.join(format!("{kind}_{}.csv", variant.dir_name()));
            let mut out = BufWriter::new(File::create(path)?);
            writeln!(out, "# seed={}", plan.seed)?;
            writeln!(out, "# config_hash={}", plan.config_hash)?;
            writeln!(out, "# variant={}", variant.dir_name())?;
            write!(out, "threshold_db")?;
            for scheme in plan.schemes() {
                write!(out, ",{}", scheme.name())?;
            }
            writeln!(out)?;
            let grid = &curves[0].thresholds_db;
            for (i, th) in grid.iter().enumerate() {
                write!(out, "{th}")?;
                for curve in &curves {
                    write!(out, ",{}", curve.values[i])?;
                }
                writeln!(out)?;
            }
        }
    }

    // Cross-variant outage comparison (hub sites × shadowing levels).
    let compared: Vec<Scheme> = [Scheme::SingleLink, Scheme::Opportunistic]
        .into_iter()
        .filter(|s| plan.schemes().contains(s))
        .collect();
    let mut columns: Vec<(String, ThresholdCurve<f64>)> = Vec::new();
    for variant in &plan.variants {
        for &scheme in &compared {
            let path = avg_dir(&args.out, variant).join(format!("outage_{}.csv", scheme.name()));
            let curve = read_curve_csv(&path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            columns.push((format!("{}_{}", variant.dir_name(), scheme.name()), curve));
        }
    }
    if let Some((_, first)) = columns.first() {
        let grid = first.thresholds_db.clone();
        for (name, curve) in &columns {
            if curve.thresholds_db != grid {
                return Err(CliError::Data(format!("threshold grid mismatch in column {name}")));
            }
        }
        let mut out = BufWriter::new(File::create(dir.join("outage_by_variant.csv"))?);
        writeln!(out, "# seed={}", plan.seed)?;
        writeln!(out, "# config_hash={}", plan.config_hash)?;
        write!(out, "threshold_db")?;
        for (name, _) in &columns {
            write!(out, ",{name}")?;
        }
        writeln!(out)?;
        for (i, th) in grid.iter().enumerate() {
            write!(out, "{th}")?;
            for (_, curve) in &columns {
                write!(out, ",{}", curve.values[i])?;
            }
            writeln!(out)?;
        }
    }

    manifest.finalize(&args.out)?;
    println!("report: figures written under {}", dir.display());
    Ok(())
}

fn load_scheme_curves(
    plan: &Plan,
    variant: &Variant,
    kind: &str,
    args: &CommonArgs,
) -> Result<Vec<ThresholdCurve<f64>>, CliError> {
    let mut curves = Vec::new();
    for &scheme in plan.schemes() {
        let path = avg_dir(&args.out, variant).join(format!("{kind}_{}.csv", scheme.name()));
        let curve: ThresholdCurve<f64> = read_curve_csv(&path).map_err(|e| {
            CliError::Data(format!(
                "{}: {e}; run `bancoex stats` first",
                path.display()
            ))
        })?;
        curves.push(curve);
    }
    let grid = &curves[0].thresholds_db;
    for curve in &curves[1..] {
        if &curve.thresholds_db != grid {
            return Err(CliError::Data(format!(
                "threshold grids differ across schemes for {kind}/{}",
                variant.dir_name()
            )));
        }
    }
    Ok(curves)
}
