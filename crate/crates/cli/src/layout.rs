//! Output directory layout and scenario assembly shared by the subcommands.

use std::path::{Path, PathBuf};

use bancoex_core::scenario::{
    build_scenario, AnalysisSet, ChannelSource, LinkId, ScenarioConfig, WbanConfig,
};
use bancoex_core::Error;

use crate::config::{Plan, Variant};
use crate::CliError;

pub fn variant_dir(out: &Path, variant: &Variant) -> PathBuf {
    out.join(variant.dir_name())
}

pub fn set_dir(out: &Path, variant: &Variant, set: &AnalysisSet) -> PathBuf {
    variant_dir(out, variant).join(format!("set_{}_{}", set.subject_of_interest, set.interferer))
}

pub fn traces_dir(out: &Path, variant: &Variant, set: &AnalysisSet) -> PathBuf {
    set_dir(out, variant, set).join("traces")
}

pub fn stats_dir(out: &Path, variant: &Variant, set: &AnalysisSet) -> PathBuf {
    set_dir(out, variant, set).join("stats")
}

pub fn avg_dir(out: &Path, variant: &Variant) -> PathBuf {
    variant_dir(out, variant).join("avg")
}

pub fn figures_dir(out: &Path) -> PathBuf {
    out.join("figures")
}

/// File name for one link's trace: `1:sensor:left_wrist>1:hub:chest`
/// becomes `1-sensor-left_wrist__1-hub-chest.csv`.
pub fn trace_file_name(link: &LinkId) -> String {
    let sanitize = |s: String| s.replace(':', "-");
    format!("{}__{}.csv", sanitize(link.src.to_string()), sanitize(link.dst.to_string()))
}

/// Builds the scenario for one (variant, analysis set) pairing: the
/// subject-of-interest's WBAN first, the interferer's second.
pub fn scenario_for(
    plan: &Plan,
    variant: &Variant,
    set: &AnalysisSet,
) -> Result<ScenarioConfig<f64>, CliError> {
    let mut interest = WbanConfig::new(
        set.subject_of_interest,
        variant.hub_site,
        plan.sensor_sites.clone(),
        plan.relay_mode,
    );
    interest.tx_power_dbm = plan.tx_power_dbm;
    let mut interferer = WbanConfig::new(
        set.interferer,
        plan.interferer_hub_site,
        plan.sensor_sites.clone(),
        plan.interferer_relay_mode,
    );
    interferer.tx_power_dbm = plan.tx_power_dbm;
    build_scenario(
        vec![interest, interferer],
        Some(plan.motion),
        variant.shadowing,
        ChannelSource::Synthetic,
        plan.set_seed(variant, set),
    )
    .map_err(|e| match e {
        // Topology problems come from the configuration.
        Error::Validation(msg) | Error::InvalidParameter(msg) => CliError::Config(msg),
        other => CliError::data(other),
    })
}

/// Metadata pairs embedded in every output file of a job.
pub fn job_metadata(plan: &Plan, variant: &Variant, set: &AnalysisSet) -> Vec<(String, String)> {
    vec![
        ("seed".into(), plan.seed.to_string()),
        ("config_hash".into(), plan.config_hash.clone()),
        ("variant".into(), variant.dir_name()),
        ("set".into(), format!("{}_{}", set.subject_of_interest, set.interferer)),
    ]
}
