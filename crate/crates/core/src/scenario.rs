//! WBAN topologies, relay modes, motion, and analysis-set enumeration.
//!
//! A scenario is one WBAN-of-interest plus zero or more interfering WBANs,
//! a shadowing level for the inter-body channels, and (for synthetic
//! channels) a corridor motion model for the two subjects. Building a
//! scenario enumerates every link the experiment engine will query, so a
//! run can be validated for trace coverage up front.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// On-body channel-sounder locations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BodySite {
    Chest,
    LeftHip,
    RightHip,
    LeftAnkle,
    RightAnkle,
    LeftWrist,
    RightWrist,
    LeftUpperArm,
    Head,
    Back,
}

impl BodySite {
    pub const ALL: [BodySite; 10] = [
        BodySite::Chest,
        BodySite::LeftHip,
        BodySite::RightHip,
        BodySite::LeftAnkle,
        BodySite::RightAnkle,
        BodySite::LeftWrist,
        BodySite::RightWrist,
        BodySite::LeftUpperArm,
        BodySite::Head,
        BodySite::Back,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BodySite::Chest => "chest",
            BodySite::LeftHip => "left_hip",
            BodySite::RightHip => "right_hip",
            BodySite::LeftAnkle => "left_ankle",
            BodySite::RightAnkle => "right_ankle",
            BodySite::LeftWrist => "left_wrist",
            BodySite::RightWrist => "right_wrist",
            BodySite::LeftUpperArm => "left_upper_arm",
            BodySite::Head => "head",
            BodySite::Back => "back",
        }
    }
}

impl fmt::Display for BodySite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BodySite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BodySite::ALL
            .iter()
            .copied()
            .find(|site| site.name() == s)
            .ok_or_else(|| Error::param(format!("unknown body site: {s}")))
    }
}

pub type NetworkId = u32;
pub type SubjectId = u32;

/// Functional role of a device at a body site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceKind {
    Hub,
    Sensor,
    Relay,
}

impl DeviceKind {
    pub fn name(self) -> &'static str {
        match self {
            DeviceKind::Hub => "hub",
            DeviceKind::Sensor => "sensor",
            DeviceKind::Relay => "relay",
        }
    }
}

impl fmt::Display for DeviceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A device in a specific network: `<network>:<kind>:<site>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId {
    pub network: NetworkId,
    pub kind: DeviceKind,
    pub site: BodySite,
}

impl NodeId {
    pub fn new(network: NetworkId, kind: DeviceKind, site: BodySite) -> Self {
        NodeId { network, kind, site }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.network, self.kind, self.site)
    }
}

impl FromStr for NodeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let network = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| Error::param(format!("bad node id: {s}")))?;
        let kind = match parts.next() {
            Some("hub") => DeviceKind::Hub,
            Some("sensor") => DeviceKind::Sensor,
            Some("relay") => DeviceKind::Relay,
            _ => return Err(Error::param(format!("bad node id: {s}"))),
        };
        let site =
            parts.next().ok_or_else(|| Error::param(format!("bad node id: {s}")))?.parse()?;
        Ok(NodeId { network, kind, site })
    }
}

/// Directed link between two nodes: `<src>><dst>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinkId {
    pub src: NodeId,
    pub dst: NodeId,
}

impl LinkId {
    pub fn new(src: NodeId, dst: NodeId) -> Self {
        LinkId { src, dst }
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}>{}", self.src, self.dst)
    }
}

impl FromStr for LinkId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (src, dst) = s
            .split_once('>')
            .ok_or_else(|| Error::param(format!("bad link id: {s}")))?;
        Ok(LinkId { src: src.parse()?, dst: dst.parse()? })
    }
}

/// How the second-hop relays are provided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayMode {
    /// Idle sensors of the same WBAN act as relay candidates; the
    /// assignment rotates with the TDMA slot order.
    Varying,
    /// Two dedicated relays at the left and right hips.
    FixedHips,
    /// Single-link star, no relaying.
    None,
}

/// Shadowing level applied to the inter-body (interference) channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShadowingLevel {
    None,
    Partial,
    Full,
}

impl ShadowingLevel {
    pub fn name(self) -> &'static str {
        match self {
            ShadowingLevel::None => "none",
            ShadowingLevel::Partial => "partial",
            ShadowingLevel::Full => "full",
        }
    }
}

impl fmt::Display for ShadowingLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShadowingLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ShadowingLevel::None),
            "partial" => Ok(ShadowingLevel::Partial),
            "full" => Ok(ShadowingLevel::Full),
            _ => Err(Error::param(format!("unknown shadowing level: {s}"))),
        }
    }
}

/// One WBAN: a hub, its sensors, and the relay provisioning.
#[derive(Debug, Clone, Serialize)]
pub struct WbanConfig<F> {
    pub network_id: NetworkId,
    pub hub_site: BodySite,
    pub sensor_sites: Vec<BodySite>,
    pub relay_mode: RelayMode,
    /// Transmit power of every node, dBm. Defaults to 0 dBm.
    pub tx_power_dbm: F,
}

impl<F: Real> WbanConfig<F> {
    pub fn new(
        network_id: NetworkId,
        hub_site: BodySite,
        sensor_sites: Vec<BodySite>,
        relay_mode: RelayMode,
    ) -> Self {
        WbanConfig { network_id, hub_site, sensor_sites, relay_mode, tx_power_dbm: F::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensor_sites.is_empty() {
            return Err(Error::validation(format!(
                "network {}: sensor list is empty",
                self.network_id
            )));
        }
        if self.sensor_sites.contains(&self.hub_site) {
            return Err(Error::validation(format!(
                "network {}: hub site {} also appears as a sensor",
                self.network_id, self.hub_site
            )));
        }
        let mut seen = self.sensor_sites.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.sensor_sites.len() {
            return Err(Error::validation(format!(
                "network {}: duplicate sensor sites",
                self.network_id
            )));
        }
        match self.relay_mode {
            RelayMode::FixedHips => {
                for hip in [BodySite::LeftHip, BodySite::RightHip] {
                    if self.sensor_sites.contains(&hip) || self.hub_site == hip {
                        return Err(Error::validation(format!(
                            "network {}: fixed relays occupy {}, which is already in use",
                            self.network_id, hip
                        )));
                    }
                }
            }
            RelayMode::Varying => {
                if self.sensor_sites.len() < 3 {
                    return Err(Error::validation(format!(
                        "network {}: varying relay mode needs at least 3 sensors",
                        self.network_id
                    )));
                }
            }
            RelayMode::None => {}
        }
        Ok(())
    }

    pub fn hub(&self) -> NodeId {
        NodeId::new(self.network_id, DeviceKind::Hub, self.hub_site)
    }

    pub fn sensor(&self, site: BodySite) -> NodeId {
        NodeId::new(self.network_id, DeviceKind::Sensor, site)
    }

    /// The two relay candidates for the sensor in slot `active_idx`,
    /// or `None` in single-link mode.
    pub fn relay_candidates(&self, active_idx: usize) -> Option<(NodeId, NodeId)> {
        match self.relay_mode {
            RelayMode::None => None,
            RelayMode::FixedHips => Some((
                NodeId::new(self.network_id, DeviceKind::Relay, BodySite::LeftHip),
                NodeId::new(self.network_id, DeviceKind::Relay, BodySite::RightHip),
            )),
            RelayMode::Varying => {
                let n = self.sensor_sites.len();
                let r1 = self.sensor_sites[(active_idx + 1) % n];
                let r2 = self.sensor_sites[(active_idx + 2) % n];
                Some((self.sensor(r1), self.sensor(r2)))
            }
        }
    }

    /// Every node of this network that transmits in some slot; these are the
    /// interference sources seen by a neighboring WBAN.
    pub fn transmitter_nodes(&self) -> Vec<NodeId> {
        let mut nodes: Vec<NodeId> =
            self.sensor_sites.iter().map(|&s| self.sensor(s)).collect();
        if self.relay_mode == RelayMode::FixedHips {
            nodes.push(NodeId::new(self.network_id, DeviceKind::Relay, BodySite::LeftHip));
            nodes.push(NodeId::new(self.network_id, DeviceKind::Relay, BodySite::RightHip));
        }
        nodes
    }

    /// Every node of this network that decodes packets in some hop; these
    /// are the victims of interference from neighboring WBANs.
    pub fn victim_nodes(&self) -> Vec<NodeId> {
        let mut nodes = vec![self.hub()];
        match self.relay_mode {
            RelayMode::None => {}
            RelayMode::FixedHips => {
                nodes.push(NodeId::new(self.network_id, DeviceKind::Relay, BodySite::LeftHip));
                nodes.push(NodeId::new(self.network_id, DeviceKind::Relay, BodySite::RightHip));
            }
            RelayMode::Varying => {
                nodes.extend(self.sensor_sites.iter().map(|&s| self.sensor(s)));
            }
        }
        nodes
    }

    /// Intra-WBAN links the experiment engine reads for this network when it
    /// is the WBAN-of-interest.
    pub fn intra_links(&self) -> Vec<LinkId> {
        let hub = self.hub();
        let mut links = Vec::new();
        for (i, &site) in self.sensor_sites.iter().enumerate() {
            let sensor = self.sensor(site);
            links.push(LinkId::new(sensor, hub));
            if let Some((r1, r2)) = self.relay_candidates(i) {
                for relay in [r1, r2] {
                    links.push(LinkId::new(sensor, relay));
                    links.push(LinkId::new(relay, hub));
                }
            }
        }
        links.sort();
        links.dedup();
        links
    }
}

/// Two-subject corridor motion for the simulated inter-body channel.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MotionModel<F> {
    /// Corridor length, meters.
    pub corridor_length: F,
    /// Lateral offset between the subjects' walking lanes, meters.
    pub corridor_width: F,
    /// Walking speed of each subject, m/s.
    pub walking_speed: F,
    /// Lower bound on the inter-subject distance, meters.
    pub min_separation: F,
}

impl<F: Real> Default for MotionModel<F> {
    fn default() -> Self {
        MotionModel {
            corridor_length: c(6.0),
            corridor_width: c(0.5),
            walking_speed: c(1.2),
            min_separation: c(0.5),
        }
    }
}

impl<F: Real> MotionModel<F> {
    pub fn validate(&self) -> Result<()> {
        if self.corridor_length <= F::zero()
            || self.corridor_width <= F::zero()
            || self.walking_speed <= F::zero()
            || self.min_separation <= F::zero()
        {
            return Err(Error::param("motion model lengths and speed must be > 0"));
        }
        if self.min_separation > self.corridor_length {
            return Err(Error::param("min_separation exceeds corridor length"));
        }
        Ok(())
    }
}

/// Inter-subject distance over time: the subjects start at opposite ends of
/// the corridor, walk toward each other, pass at the lateral offset, walk to
/// the far ends, and hold there.
pub fn simulate_motion<F: Real>(model: &MotionModel<F>, duration: F, dt: F) -> Result<Vec<F>> {
    if dt <= F::zero() {
        return Err(Error::param("motion: dt must be > 0"));
    }
    if duration < dt {
        return Err(Error::param("motion: duration must be >= dt"));
    }
    model.validate()?;
    let floor = model.min_separation.max(model.corridor_width);
    let length = model.corridor_length;
    let closing_speed = c::<F>(2.0) * model.walking_speed;
    let n = (duration / dt).to_usize().ok_or_else(|| Error::param("motion: duration too long"))?;
    let series = (0..=n)
        .map(|k| {
            let t = dt * c(k as f64);
            let gap = (length - closing_speed * t).abs().min(length);
            gap.max(floor)
        })
        .collect();
    Ok(series)
}

/// One (subject-of-interest, interferer) pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AnalysisSet {
    pub subject_of_interest: SubjectId,
    pub interferer: SubjectId,
}

/// Cross product of subjects-of-interest and all subjects, minus self-pairs,
/// in deterministic order.
pub fn enumerate_analysis_sets(
    subjects_of_interest: &[SubjectId],
    all_subjects: &[SubjectId],
) -> Result<Vec<AnalysisSet>> {
    for ids in [subjects_of_interest, all_subjects] {
        let mut sorted = ids.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != ids.len() {
            return Err(Error::param("analysis sets: duplicate subject ids"));
        }
    }
    let mut sets = Vec::new();
    for &soi in subjects_of_interest {
        for &other in all_subjects {
            if other != soi {
                sets.push(AnalysisSet { subject_of_interest: soi, interferer: other });
            }
        }
    }
    Ok(sets)
}

/// Where channel traces come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ChannelSource {
    /// Traces are synthesized from the motion model and fading parameters.
    Synthetic,
    /// Traces are loaded from files; the listed links are available.
    Traces { available: Vec<LinkId> },
}

/// A validated scenario: networks (first entry is the WBAN-of-interest),
/// motion, shadowing, and the closed set of links the engine will read.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig<F> {
    pub networks: Vec<WbanConfig<F>>,
    pub motion: Option<MotionModel<F>>,
    pub shadowing: ShadowingLevel,
    pub channel_source: ChannelSource,
    pub seed: u64,
    pub required_links: Vec<LinkId>,
}

impl<F: Real> ScenarioConfig<F> {
    pub fn of_interest(&self) -> &WbanConfig<F> {
        &self.networks[0]
    }

    pub fn interferers(&self) -> &[WbanConfig<F>] {
        &self.networks[1..]
    }
}

/// Every link the engine queries for the WBAN-of-interest: its own intra
/// links plus one link from each interfering transmitter to each victim.
pub fn required_links<F: Real>(networks: &[WbanConfig<F>]) -> Vec<LinkId> {
    let interest = &networks[0];
    let mut links = interest.intra_links();
    let victims = interest.victim_nodes();
    for other in &networks[1..] {
        for tx in other.transmitter_nodes() {
            for &victim in &victims {
                links.push(LinkId::new(tx, victim));
            }
        }
    }
    links.sort();
    links.dedup();
    links
}

/// Validates the network set and closes over the link requirements.
pub fn build_scenario<F: Real>(
    networks: Vec<WbanConfig<F>>,
    motion: Option<MotionModel<F>>,
    shadowing: ShadowingLevel,
    channel_source: ChannelSource,
    seed: u64,
) -> Result<ScenarioConfig<F>> {
    if networks.is_empty() {
        return Err(Error::validation("scenario needs at least one network"));
    }
    let mut ids: Vec<NetworkId> = networks.iter().map(|n| n.network_id).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != networks.len() {
        return Err(Error::validation("duplicate network_id in scenario"));
    }
    for network in &networks {
        network.validate()?;
    }
    if let Some(m) = &motion {
        m.validate()?;
    }
    let required = required_links(&networks);
    if let ChannelSource::Traces { available } = &channel_source {
        for link in &required {
            if !available.contains(link) {
                return Err(Error::validation(format!("missing trace for link {link}")));
            }
        }
    }
    Ok(ScenarioConfig {
        networks,
        motion,
        shadowing,
        channel_source,
        seed,
        required_links: required,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interest_fixed() -> WbanConfig<f64> {
        WbanConfig::new(
            1,
            BodySite::Chest,
            vec![BodySite::LeftWrist, BodySite::Head, BodySite::LeftAnkle],
            RelayMode::FixedHips,
        )
    }

    fn interferer() -> WbanConfig<f64> {
        WbanConfig::new(
            2,
            BodySite::Chest,
            vec![BodySite::LeftWrist, BodySite::Head, BodySite::LeftAnkle],
            RelayMode::None,
        )
    }

    #[test]
    fn body_site_round_trip() {
        for site in BodySite::ALL {
            assert_eq!(site.name().parse::<BodySite>().unwrap(), site);
        }
        assert!("knee".parse::<BodySite>().is_err());
    }

    #[test]
    fn node_and_link_ids_round_trip() {
        let link = LinkId::new(
            NodeId::new(1, DeviceKind::Sensor, BodySite::LeftWrist),
            NodeId::new(1, DeviceKind::Hub, BodySite::Chest),
        );
        let s = link.to_string();
        assert_eq!(s, "1:sensor:left_wrist>1:hub:chest");
        assert_eq!(s.parse::<LinkId>().unwrap(), link);
    }

    #[test]
    fn analysis_sets_table_pattern() {
        // Two subjects-of-interest against six subjects: 5 + 5 sets.
        let sets = enumerate_analysis_sets(&[1, 2], &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(sets.len(), 10);
        assert!(sets.iter().all(|s| s.subject_of_interest != s.interferer));
    }

    #[test]
    fn analysis_sets_edges() {
        assert!(enumerate_analysis_sets(&[1], &[1]).unwrap().is_empty());
        assert_eq!(
            enumerate_analysis_sets(&[1], &[1, 2]).unwrap(),
            vec![AnalysisSet { subject_of_interest: 1, interferer: 2 }]
        );
        assert!(enumerate_analysis_sets(&[1, 1], &[2]).is_err());
    }

    #[test]
    fn analysis_set_count_formula() {
        // |SOI|·(|ALL|-1) when SOI is a subset of ALL.
        for k in 1..=4u32 {
            let soi: Vec<u32> = (1..=k).collect();
            let all: Vec<u32> = (1..=6).collect();
            let sets = enumerate_analysis_sets(&soi, &all).unwrap();
            assert_eq!(sets.len(), (k * 5) as usize);
        }
    }

    #[test]
    fn motion_geometry() {
        let model = MotionModel::<f64>::default();
        let dt = 0.05;
        let series = simulate_motion(&model, 6.0, dt).unwrap();
        assert_eq!(series[0], 6.0);
        // Passing instant: L / (2v) = 2.5 s.
        let idx_pass = (2.5 / dt) as usize;
        assert_eq!(series[idx_pass], 0.5);
        let min = series.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(min, 0.5);
        // V-shape: non-increasing then non-decreasing.
        let min_first = series.iter().position(|&d| d == min).unwrap();
        let min_last = series.iter().rposition(|&d| d == min).unwrap();
        assert!(series[..min_first].windows(2).all(|w| w[1] <= w[0]));
        assert!(series[min_last..].windows(2).all(|w| w[1] >= w[0]));
        // Symmetric about the passing instant while both subjects walk.
        let walk_end = (6.0_f64 / 1.2 / dt) as usize;
        for k in 0..=walk_end.min(series.len() - 1) {
            let mirror = 2 * idx_pass - k.min(2 * idx_pass);
            if mirror < series.len() && k <= 2 * idx_pass {
                assert!(
                    (series[k] - series[mirror]).abs() < 1e-9,
                    "asymmetry at {k}/{mirror}"
                );
            }
        }
    }

    #[test]
    fn motion_distance_never_below_floor() {
        let model = MotionModel { min_separation: 0.8, ..MotionModel::<f64>::default() };
        let series = simulate_motion(&model, 10.0, 0.01).unwrap();
        assert!(series.iter().all(|&d| d >= 0.8));
    }

    #[test]
    fn motion_bad_params() {
        let model = MotionModel::<f64>::default();
        assert!(simulate_motion(&model, 1.0, 0.0).is_err());
        assert!(simulate_motion(&model, 0.001, 0.01).is_err());
    }

    #[test]
    fn fixed_hips_interference_links() {
        // One interfering single-link WBAN: 3 transmitters × 3 victims.
        let networks = vec![interest_fixed(), interferer()];
        let links = required_links(&networks);
        let inter: Vec<_> = links.iter().filter(|l| l.src.network == 2).collect();
        assert_eq!(inter.len(), 9);
        // Victims are exactly hub + both fixed relays.
        let victims: std::collections::BTreeSet<_> = inter.iter().map(|l| l.dst).collect();
        assert_eq!(victims.len(), 3);
        assert!(victims.iter().all(|v| v.network == 1));
        assert!(victims.iter().any(|v| v.kind == DeviceKind::Hub));
    }

    #[test]
    fn none_mode_has_no_relay_links() {
        let cfg = WbanConfig::<f64>::new(
            1,
            BodySite::Chest,
            vec![BodySite::LeftWrist],
            RelayMode::None,
        );
        let links = cfg.intra_links();
        assert_eq!(links.len(), 1);
        assert_eq!(links[0].dst.kind, DeviceKind::Hub);
    }

    #[test]
    fn duplicate_network_id_rejected() {
        let mut second = interest_fixed();
        second.relay_mode = RelayMode::None;
        let err = build_scenario(
            vec![interest_fixed(), second],
            None,
            ShadowingLevel::Full,
            ChannelSource::Synthetic,
            1,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn traces_source_requires_closure() {
        let networks = vec![interest_fixed(), interferer()];
        let required = required_links(&networks);
        let mut available = required.clone();
        let dropped = available.pop().unwrap();
        let err = build_scenario(
            networks.clone(),
            None,
            ShadowingLevel::Full,
            ChannelSource::Traces { available },
            1,
        )
        .unwrap_err();
        assert!(err.to_string().contains(&dropped.to_string()));
        // With full coverage the same scenario builds.
        build_scenario(
            networks,
            None,
            ShadowingLevel::Full,
            ChannelSource::Traces { available: required },
            1,
        )
        .unwrap();
    }

    #[test]
    fn varying_mode_rotates_relays() {
        let cfg = WbanConfig::<f64>::new(
            1,
            BodySite::Chest,
            vec![BodySite::LeftHip, BodySite::RightHip, BodySite::LeftWrist],
            RelayMode::Varying,
        );
        let (r1, r2) = cfg.relay_candidates(0).unwrap();
        assert_eq!(r1.site, BodySite::RightHip);
        assert_eq!(r2.site, BodySite::LeftWrist);
        let (r1, r2) = cfg.relay_candidates(2).unwrap();
        assert_eq!(r1.site, BodySite::LeftHip);
        assert_eq!(r2.site, BodySite::RightHip);
    }

    #[test]
    fn config_validation_rules() {
        let mut cfg = interest_fixed();
        cfg.sensor_sites.push(BodySite::LeftHip);
        assert!(cfg.validate().is_err(), "fixed relays collide with hip sensor");

        let empty = WbanConfig::<f64>::new(1, BodySite::Chest, vec![], RelayMode::None);
        assert!(empty.validate().is_err());

        let varying_small = WbanConfig::<f64>::new(
            1,
            BodySite::Chest,
            vec![BodySite::Head, BodySite::Back],
            RelayMode::Varying,
        );
        assert!(varying_small.validate().is_err());
    }
}
