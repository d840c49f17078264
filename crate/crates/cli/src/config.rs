//! Experiment configuration: a flat `key = value` file with `[section]`
//! headers and `#` comments. Keys are documented in `docs/config.md`;
//! unknown keys are rejected so typos surface as configuration errors.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use bancoex_core::channel::FadingSpec;
use bancoex_core::link::DecisionBlock;
use bancoex_core::scenario::{
    enumerate_analysis_sets, AnalysisSet, BodySite, MotionModel, RelayMode, ShadowingLevel,
};
use bancoex_core::stats::Family;
use bancoex_core::synth::SynthParams;

use crate::CliError;

/// Raw parsed file: section -> key -> value.
#[derive(Debug, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
    /// SHA-256 of the file bytes, hex.
    pub hash: String,
}

impl RawConfig {
    pub fn load(path: &Path) -> Result<RawConfig, CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Config("config file is not UTF-8".into()))?;
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.trim_end_matches('\r');
            let line = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::Config(format!("line {line_no}: unterminated section header")))?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {line_no}: expected 'key = value', found '{line}'"))
            })?;
            if current.is_empty() {
                return Err(CliError::Config(format!(
                    "line {line_no}: key '{}' outside any [section]",
                    key.trim()
                )));
            }
            sections
                .get_mut(&current)
                .expect("section exists")
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        let hash = format!("{:x}", Sha256::digest(&bytes));
        Ok(RawConfig { sections, hash })
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    fn require(&self, section: &str, key: &str) -> Result<&str, CliError> {
        self.get(section, key).ok_or_else(|| {
            CliError::Config(format!("missing required key [{section}] {key}"))
        })
    }

    fn parse_as<T: FromStr>(&self, section: &str, key: &str, raw: &str) -> Result<T, CliError> {
        raw.parse().map_err(|_| {
            CliError::Config(format!("[{section}] {key}: cannot parse '{raw}'"))
        })
    }

    fn get_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T, CliError> {
        match self.get(section, key) {
            Some(raw) => self.parse_as(section, key, raw),
            None => Ok(default),
        }
    }

    fn list<T: FromStr>(&self, section: &str, key: &str, raw: &str) -> Result<Vec<T>, CliError> {
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|item| self.parse_as(section, key, item))
            .collect()
    }

    fn require_list<T: FromStr>(&self, section: &str, key: &str) -> Result<Vec<T>, CliError> {
        let raw = self.require(section, key)?.to_string();
        let items = self.list(section, key, &raw)?;
        if items.is_empty() {
            return Err(CliError::Config(format!("[{section}] {key}: empty list")));
        }
        Ok(items)
    }

    fn list_or<T: FromStr>(
        &self,
        section: &str,
        key: &str,
        default: Vec<T>,
    ) -> Result<Vec<T>, CliError> {
        match self.get(section, key) {
            Some(raw) => {
                let raw = raw.to_string();
                let items = self.list(section, key, &raw)?;
                if items.is_empty() {
                    return Err(CliError::Config(format!("[{section}] {key}: empty list")));
                }
                Ok(items)
            }
            None => Ok(default),
        }
    }

    /// Rejects any key outside the documented set.
    fn check_known_keys(&self) -> Result<(), CliError> {
        const KNOWN: &[(&str, &[&str])] = &[
            (
                "experiment",
                &[
                    "subjects_of_interest",
                    "subjects",
                    "hub_sites",
                    "shadowing_levels",
                    "duration_s",
                    "seed",
                    "decision_block",
                    "synth_inline",
                ],
            ),
            (
                "scenario",
                &[
                    "sensor_sites",
                    "relay_mode",
                    "interferer_relay_mode",
                    "interferer_hub_site",
                    "tx_power_dbm",
                    "noise_dbm",
                ],
            ),
            (
                "channel",
                &[
                    "onbody_doppler_hz",
                    "interbody_doppler_hz",
                    "onbody_path_loss_exponent",
                    "interbody_path_loss_exponent",
                    "onbody_reference_gain_db",
                    "interbody_reference_gain_db",
                    "shadow_offset_db",
                    "onbody_dt_s",
                    "interbody_dt_s",
                    "target_dt_s",
                ],
            ),
            (
                "motion",
                &["corridor_length_m", "corridor_width_m", "walking_speed_mps", "min_separation_m"],
            ),
            ("mac", &["slot_len_s"]),
            (
                "stats",
                &[
                    "threshold_start_db",
                    "threshold_stop_db",
                    "threshold_step_db",
                    "doppler_hz",
                    "bins",
                    "families",
                ],
            ),
        ];
        for (section, keys) in &self.sections {
            let allowed = KNOWN
                .iter()
                .find(|(name, _)| name == section)
                .map(|(_, keys)| *keys)
                .ok_or_else(|| CliError::Config(format!("unknown section [{section}]")))?;
            for key in keys.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(CliError::Config(format!("unknown key [{section}] {key}")));
                }
            }
        }
        Ok(())
    }
}

/// One (hub site, shadowing level) combination the experiment sweeps over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub hub_site: BodySite,
    pub shadowing: ShadowingLevel,
}

impl Variant {
    pub fn dir_name(&self) -> String {
        format!("{}_{}", self.hub_site, self.shadowing)
    }
}

/// Fully typed experiment plan.
#[derive(Debug, Clone)]
pub struct Plan {
    pub seed: u64,
    pub config_hash: String,
    pub duration_s: f64,
    pub decision_block: DecisionBlock,
    pub synth_inline: bool,

    pub sets: Vec<AnalysisSet>,
    pub variants: Vec<Variant>,

    pub sensor_sites: Vec<BodySite>,
    pub relay_mode: RelayMode,
    pub interferer_relay_mode: RelayMode,
    pub interferer_hub_site: BodySite,
    pub tx_power_dbm: f64,
    pub noise_dbm: f64,

    pub synth: SynthParams<f64>,
    pub motion: MotionModel<f64>,
    pub slot_len_s: f64,

    pub threshold_start_db: f64,
    pub threshold_stop_db: f64,
    pub threshold_step_db: f64,
    pub stats_doppler_hz: f64,
    pub bins: usize,
    pub families: Vec<Family>,
}

fn parse_relay_mode(raw: &str) -> Result<RelayMode, CliError> {
    match raw {
        "varying" => Ok(RelayMode::Varying),
        "fixed_hips" => Ok(RelayMode::FixedHips),
        "none" => Ok(RelayMode::None),
        other => Err(CliError::Config(format!("unknown relay mode: {other}"))),
    }
}

fn parse_family(raw: &str) -> Result<Family, CliError> {
    Family::ALL
        .iter()
        .copied()
        .find(|f| f.name() == raw)
        .ok_or_else(|| CliError::Config(format!("unknown distribution family: {raw}")))
}

impl Plan {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Plan, CliError> {
        let cfg = RawConfig::load(path)?;
        cfg.check_known_keys()?;

        let soi: Vec<u32> = cfg.require_list("experiment", "subjects_of_interest")?;
        let subjects: Vec<u32> = cfg.require_list("experiment", "subjects")?;
        let sets = enumerate_analysis_sets(&soi, &subjects)
            .map_err(|e| CliError::Config(e.to_string()))?;
        if sets.is_empty() {
            return Err(CliError::Config("configuration produces no analysis sets".into()));
        }
        let duration_s: f64 = {
            let raw = cfg.require("experiment", "duration_s")?.to_string();
            cfg.parse_as("experiment", "duration_s", &raw)?
        };

        let hub_sites: Vec<BodySite> =
            cfg.list_or("experiment", "hub_sites", vec![BodySite::Chest])?;
        let shadowing_levels: Vec<ShadowingLevel> =
            cfg.list_or("experiment", "shadowing_levels", vec![ShadowingLevel::Full])?;
        let mut variants = Vec::new();
        for &hub_site in &hub_sites {
            for &shadowing in &shadowing_levels {
                variants.push(Variant { hub_site, shadowing });
            }
        }

        let decision_block = match cfg.get_or(
            "experiment",
            "decision_block",
            "start_of_superframe".to_string(),
        )? {
            s if s == "start_of_superframe" => DecisionBlock::StartOfSuperframe,
            s if s == "same" => DecisionBlock::Same,
            s => return Err(CliError::Config(format!("unknown decision_block: {s}"))),
        };

        let sensor_sites: Vec<BodySite> = cfg.list_or(
            "scenario",
            "sensor_sites",
            vec![BodySite::LeftWrist, BodySite::Head, BodySite::LeftAnkle],
        )?;
        let relay_mode = parse_relay_mode(&cfg.get_or(
            "scenario",
            "relay_mode",
            "varying".to_string(),
        )?)?;
        let interferer_relay_mode = parse_relay_mode(&cfg.get_or(
            "scenario",
            "interferer_relay_mode",
            "none".to_string(),
        )?)?;
        let interferer_hub_site: BodySite = {
            let raw = cfg.get_or("scenario", "interferer_hub_site", "chest".to_string())?;
            raw.parse().map_err(|e: bancoex_core::Error| CliError::Config(e.to_string()))?
        };

        let defaults = SynthParams::<f64>::default();
        let synth = SynthParams {
            onbody: FadingSpec {
                doppler_hz: cfg.get_or("channel", "onbody_doppler_hz", defaults.onbody.doppler_hz)?,
                path_loss_exponent: cfg.get_or(
                    "channel",
                    "onbody_path_loss_exponent",
                    defaults.onbody.path_loss_exponent,
                )?,
                shadow_offset_db: cfg.get_or(
                    "channel",
                    "shadow_offset_db",
                    defaults.onbody.shadow_offset_db,
                )?,
                reference_gain_db: cfg.get_or(
                    "channel",
                    "onbody_reference_gain_db",
                    defaults.onbody.reference_gain_db,
                )?,
            },
            interbody: FadingSpec {
                doppler_hz: cfg.get_or(
                    "channel",
                    "interbody_doppler_hz",
                    defaults.interbody.doppler_hz,
                )?,
                path_loss_exponent: cfg.get_or(
                    "channel",
                    "interbody_path_loss_exponent",
                    defaults.interbody.path_loss_exponent,
                )?,
                shadow_offset_db: cfg.get_or(
                    "channel",
                    "shadow_offset_db",
                    defaults.interbody.shadow_offset_db,
                )?,
                reference_gain_db: cfg.get_or(
                    "channel",
                    "interbody_reference_gain_db",
                    defaults.interbody.reference_gain_db,
                )?,
            },
            onbody_dt: cfg.get_or("channel", "onbody_dt_s", defaults.onbody_dt)?,
            interbody_dt: cfg.get_or("channel", "interbody_dt_s", defaults.interbody_dt)?,
            target_dt: cfg.get_or("channel", "target_dt_s", defaults.target_dt)?,
            duration: duration_s,
        };

        let motion_defaults = MotionModel::<f64>::default();
        let motion = MotionModel {
            corridor_length: cfg.get_or(
                "motion",
                "corridor_length_m",
                motion_defaults.corridor_length,
            )?,
            corridor_width: cfg.get_or(
                "motion",
                "corridor_width_m",
                motion_defaults.corridor_width,
            )?,
            walking_speed: cfg.get_or(
                "motion",
                "walking_speed_mps",
                motion_defaults.walking_speed,
            )?,
            min_separation: cfg.get_or(
                "motion",
                "min_separation_m",
                motion_defaults.min_separation,
            )?,
        };

        let families = match cfg.get("stats", "families") {
            Some(raw) => raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(parse_family)
                .collect::<Result<Vec<_>, _>>()?,
            None => Family::ALL.to_vec(),
        };

        let seed = match seed_override {
            Some(seed) => seed,
            None => cfg.get_or("experiment", "seed", 42u64)?,
        };

        let plan = Plan {
            seed,
            config_hash: cfg.hash.clone(),
            duration_s,
            decision_block,
            synth_inline: cfg.get_or("experiment", "synth_inline", true)?,
            sets,
            variants,
            sensor_sites,
            relay_mode,
            interferer_relay_mode,
            interferer_hub_site,
            tx_power_dbm: cfg.get_or("scenario", "tx_power_dbm", 0.0)?,
            noise_dbm: cfg.get_or("scenario", "noise_dbm", -95.0)?,
            synth,
            motion,
            slot_len_s: cfg.get_or("mac", "slot_len_s", 0.01)?,
            threshold_start_db: cfg.get_or("stats", "threshold_start_db", -40.0)?,
            threshold_stop_db: cfg.get_or("stats", "threshold_stop_db", 70.0)?,
            threshold_step_db: cfg.get_or("stats", "threshold_step_db", 0.5)?,
            stats_doppler_hz: cfg.get_or("stats", "doppler_hz", 1.0)?,
            bins: cfg.get_or("stats", "bins", 20usize)?,
            families,
        };
        if plan.duration_s <= 0.0 {
            return Err(CliError::Config("[experiment] duration_s must be > 0".into()));
        }
        if plan.slot_len_s <= 0.0 {
            return Err(CliError::Config("[mac] slot_len_s must be > 0".into()));
        }
        Ok(plan)
    }

    /// Schemes produced by a run: a single-link star has no relayed schemes.
    pub fn schemes(&self) -> &'static [bancoex_core::link::Scheme] {
        use bancoex_core::link::Scheme;
        match self.relay_mode {
            RelayMode::None => &[Scheme::SingleLink],
            _ => &Scheme::ALL,
        }
    }

    /// Deterministic sub-seed for one (variant, analysis set) job.
    pub fn set_seed(&self, variant: &Variant, set: &AnalysisSet) -> u64 {
        bancoex_core::seed::derive_seed(
            self.seed,
            &format!(
                "variant:{}:set:{}:{}",
                variant.dir_name(),
                set.subject_of_interest,
                set.interferer
            ),
        )
    }
}
