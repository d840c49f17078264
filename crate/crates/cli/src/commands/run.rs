//! `bancoex run`: replay the TDMA schedule over the traces for every job
//! and write packet logs plus per-scheme SINR series.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use bancoex_core::channel::load_trace;
use bancoex_core::link::{
    run_experiment, write_packet_log_csv, write_series_csv, ExperimentOptions, ExperimentResult,
    TraceSet,
};
use bancoex_core::mac::{build_superframe, schedule_cycles, write_schedule_csv};
use bancoex_core::scenario::ScenarioConfig;
use bancoex_core::seed::derive_seed;
use bancoex_core::synth::{synthesize_traces, SynthParams};

use crate::commands::{jobs_of, set_names, variant_names, Job};
use crate::config::Plan;
use crate::jobs::parallel_foreach;
use crate::layout::{job_metadata, scenario_for, set_dir, trace_file_name, traces_dir};
use crate::manifest::Manifest;
use crate::{CliError, CommonArgs};

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let plan = Plan::load(&args.config, args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let manifest = Manifest::new(
        "run",
        &args.config,
        &plan.config_hash,
        plan.seed,
        args.workers,
        variant_names(&plan),
        set_names(&plan),
    );
    manifest.write(&args.out)?;

    let jobs = jobs_of(&plan);
    parallel_foreach(&jobs, args.workers, |job| run_job(&plan, job, args).map(|_| ()))?;
    manifest.finalize(&args.out)?;
    println!("run: completed {} job(s) under {}", jobs.len(), args.out.display());
    Ok(())
}

/// Loads traces from disk when present; otherwise synthesizes them in
/// memory when the plan allows it.
fn gather_traces(
    plan: &Plan,
    job: &Job,
    scenario: &ScenarioConfig<f64>,
    dir: &Path,
) -> Result<TraceSet<f64>, CliError> {
    let on_disk = scenario
        .required_links
        .iter()
        .all(|link| dir.join(trace_file_name(link)).is_file());
    if on_disk {
        let mut traces = TraceSet::new();
        for link in &scenario.required_links {
            let trace = load_trace(&dir.join(trace_file_name(link)), *link)
                .map_err(CliError::data)?;
            traces.insert(*link, trace);
        }
        return Ok(traces);
    }
    if !plan.synth_inline {
        return Err(CliError::Data(format!(
            "traces missing under {} and synth_inline is off; run `bancoex synth` first",
            dir.display()
        )));
    }
    let params = SynthParams { duration: plan.duration_s, ..plan.synth };
    let seed = derive_seed(plan.set_seed(&job.variant, &job.set), "traces");
    synthesize_traces(scenario, &params, seed).map_err(CliError::data)
}

pub fn run_job(plan: &Plan, job: &Job, args: &CommonArgs) -> Result<ExperimentResult<f64>, CliError> {
    let scenario = scenario_for(plan, &job.variant, &job.set)?;
    let traces = gather_traces(plan, job, &scenario, &traces_dir(&args.out, &job.variant, &job.set))?;

    let frames = scenario
        .networks
        .iter()
        .map(|cfg| build_superframe(cfg, plan.slot_len_s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::data)?;
    let set_seed = plan.set_seed(&job.variant, &job.set);
    let schedule = schedule_cycles(&frames, plan.duration_s, derive_seed(set_seed, "schedule"))
        .map_err(CliError::data)?;

    let options = ExperimentOptions {
        decision_block: plan.decision_block,
        noise_dbm: plan.noise_dbm,
        seed: set_seed,
    };
    let result = run_experiment(&scenario, &traces, &schedule, &options).map_err(CliError::data)?;

    let dir = set_dir(&args.out, &job.variant, &job.set);
    std::fs::create_dir_all(&dir)?;
    let metadata = job_metadata(plan, &job.variant, &job.set);

    let packets = BufWriter::new(File::create(dir.join("packets.csv"))?);
    write_packet_log_csv(&result.packets, &metadata, packets).map_err(CliError::data)?;

    let sched_out = BufWriter::new(File::create(dir.join("schedule.csv"))?);
    write_schedule_csv(&schedule, &metadata, sched_out).map_err(CliError::data)?;

    for &scheme in plan.schemes() {
        let series = result.series_for(scheme);
        let out =
            BufWriter::new(File::create(dir.join(format!("series_{}.csv", scheme.name())))?);
        write_series_csv(series, &metadata, out).map_err(CliError::data)?;
    }
    Ok(result)
}
