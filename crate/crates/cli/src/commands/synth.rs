//! `bancoex synth`: write synthetic trace CSVs for every required link of
//! every (variant, analysis set) job.

use bancoex_core::channel::save_trace;
use bancoex_core::seed::derive_seed;
use bancoex_core::synth::{synthesize_traces, SynthParams};

use crate::commands::{jobs_of, set_names, variant_names, Job};
use crate::config::Plan;
use crate::jobs::parallel_foreach;
use crate::layout::{job_metadata, scenario_for, trace_file_name, traces_dir};
use crate::manifest::Manifest;
use crate::{CliError, CommonArgs};

pub fn run(args: &CommonArgs) -> Result<(), CliError> {
    let plan = Plan::load(&args.config, args.seed)?;
    std::fs::create_dir_all(&args.out)?;
    let manifest = Manifest::new(
        "synth",
        &args.config,
        &plan.config_hash,
        plan.seed,
        args.workers,
        variant_names(&plan),
        set_names(&plan),
    );
    manifest.write(&args.out)?;

    let jobs = jobs_of(&plan);
    parallel_foreach(&jobs, args.workers, |job| synth_job(&plan, job, args))?;
    manifest.finalize(&args.out)?;
    println!("synth: wrote traces for {} job(s) under {}", jobs.len(), args.out.display());
    Ok(())
}

pub fn synth_job(plan: &Plan, job: &Job, args: &CommonArgs) -> Result<(), CliError> {
    let scenario = scenario_for(plan, &job.variant, &job.set)?;
    let params = SynthParams { duration: plan.duration_s, ..plan.synth };
    let seed = derive_seed(plan.set_seed(&job.variant, &job.set), "traces");
    let traces = synthesize_traces(&scenario, &params, seed).map_err(CliError::data)?;

    let dir = traces_dir(&args.out, &job.variant, &job.set);
    std::fs::create_dir_all(&dir)?;
    let metadata = job_metadata(plan, &job.variant, &job.set);
    for (link, trace) in &traces {
        save_trace(trace, &dir.join(trace_file_name(link)), &metadata)
            .map_err(CliError::data)?;
    }
    Ok(())
}
