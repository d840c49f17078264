pub mod report;
pub mod run;
pub mod stats;
pub mod synth;

use bancoex_core::scenario::AnalysisSet;

use crate::config::{Plan, Variant};

/// One unit of work: a (variant, analysis set) pairing.
#[derive(Debug, Clone, Copy)]
pub struct Job {
    pub variant: Variant,
    pub set: AnalysisSet,
}

pub fn jobs_of(plan: &Plan) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &variant in &plan.variants {
        for &set in &plan.sets {
            jobs.push(Job { variant, set });
        }
    }
    jobs
}

pub fn variant_names(plan: &Plan) -> Vec<String> {
    plan.variants.iter().map(|v| v.dir_name()).collect()
}

pub fn set_names(plan: &Plan) -> Vec<String> {
    plan.sets
        .iter()
        .map(|s| format!("{}_{}", s.subject_of_interest, s.interferer))
        .collect()
}
