//! The experiment engine: walks the schedule, evaluates per-packet SINR for
//! the WBAN-of-interest, and produces aligned per-scheme series.
//!
//! For every sensor slot of every superframe: path metrics are evaluated at
//! the superframe start (the decision instant), the opportunistic path is
//! chosen, and realized SINRs are computed at the slot's transmission
//! instants under block fading with interference summed over concurrently
//! transmitting interferer nodes at the relevant receiver per hop. The
//! single-link and selection-combining series come from the identical
//! channel and interference states.
//!
//! In `DecisionBlock::Same` mode the realized values are literally the
//! decision-time values, which makes opportunistic-over-direct dominance an
//! exact per-packet property.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::channel::ChannelTrace;
use crate::error::{Error, Result};
use crate::link::{
    aggregate_interference_dbm, compute_sinr, path_metric, select_path_or, ChosenPath,
    PacketRecord, PathMetrics, Scheme, SinrSeries, DEFAULT_NOISE_DBM,
};
use crate::mac::{Cycle, Hop, SuperframeSchedule};
use crate::scalar::{c, Real};
use crate::scenario::{LinkId, NodeId, ScenarioConfig, WbanConfig};

/// Traces keyed by link, in deterministic order.
pub type TraceSet<F> = BTreeMap<LinkId, ChannelTrace<F>>;

/// Channel state used for the realized packet SINR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionBlock {
    /// Decision at the superframe start, transmission at the slot instants
    /// (they may fall in different fading blocks).
    StartOfSuperframe,
    /// Realized values reuse the decision-time state exactly.
    Same,
}

/// Engine configuration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExperimentOptions<F> {
    pub decision_block: DecisionBlock,
    pub noise_dbm: F,
    /// Seed recorded for provenance; the randomness itself lives in the
    /// schedule's cycle offsets.
    pub seed: u64,
}

impl<F: Real> Default for ExperimentOptions<F> {
    fn default() -> Self {
        ExperimentOptions {
            decision_block: DecisionBlock::StartOfSuperframe,
            noise_dbm: c(DEFAULT_NOISE_DBM),
            seed: 0,
        }
    }
}

/// Output of one experiment run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult<F> {
    pub single_link: SinrSeries<F>,
    pub opportunistic: SinrSeries<F>,
    pub selection_combining: SinrSeries<F>,
    /// Packet log of the opportunistic scheme.
    pub packets: Vec<PacketRecord<F>>,
    pub seed: u64,
}

impl<F: Real> ExperimentResult<F> {
    pub fn series_for(&self, scheme: Scheme) -> &SinrSeries<F> {
        match scheme {
            Scheme::SingleLink => &self.single_link,
            Scheme::Opportunistic => &self.opportunistic,
            Scheme::SelectionCombining => &self.selection_combining,
        }
    }
}

/// One evaluated hop: endpoints, powers, and the resulting SINR.
#[derive(Debug, Clone, Copy)]
struct HopState<F> {
    tx: NodeId,
    rx: NodeId,
    signal_dbm: F,
    interference_dbm: F,
    sinr_db: F,
}

/// All three candidate paths evaluated at given instants.
#[derive(Debug, Clone, Copy)]
struct PathsState<F> {
    direct: HopState<F>,
    relays: Option<[(HopState<F>, HopState<F>); 2]>,
}

impl<F: Real> PathsState<F> {
    fn metrics(&self) -> PathMetrics<F> {
        let relay = |pair: &(HopState<F>, HopState<F>)| {
            path_metric(pair.0.sinr_db, pair.1.sinr_db)
        };
        match &self.relays {
            Some([r1, r2]) => PathMetrics {
                direct_db: self.direct.sinr_db,
                relay1_db: relay(r1),
                relay2_db: relay(r2),
            },
            None => PathMetrics {
                direct_db: self.direct.sinr_db,
                relay1_db: F::neg_infinity(),
                relay2_db: F::neg_infinity(),
            },
        }
    }

    /// Bottleneck hop of a path; for relays the hop with the lower SINR.
    fn bottleneck(&self, path: ChosenPath) -> HopState<F> {
        match (path, &self.relays) {
            (ChosenPath::Direct, _) | (_, None) => self.direct,
            (ChosenPath::Relay1, Some([r1, _])) => {
                if r1.0.sinr_db <= r1.1.sinr_db {
                    r1.0
                } else {
                    r1.1
                }
            }
            (ChosenPath::Relay2, Some([_, r2])) => {
                if r2.0.sinr_db <= r2.1.sinr_db {
                    r2.0
                } else {
                    r2.1
                }
            }
        }
    }
}

struct Engine<'a, F: Real> {
    scenario: &'a ScenarioConfig<F>,
    traces: &'a TraceSet<F>,
    schedule: &'a SuperframeSchedule<F>,
    noise_dbm: F,
}

impl<'a, F: Real> Engine<'a, F> {
    fn network(&self, id: u32) -> Result<&WbanConfig<F>> {
        self.scenario
            .networks
            .iter()
            .find(|n| n.network_id == id)
            .ok_or_else(|| Error::validation(format!("schedule references unknown network {id}")))
    }

    fn trace(&self, link: LinkId) -> Result<&ChannelTrace<F>> {
        self.traces
            .get(&link)
            .ok_or_else(|| Error::validation(format!("missing trace for link {link}")))
    }

    /// The node actually radiating in a slot. First-hop slots transmit from
    /// the assigned sensor. Forwarding sub-slots of interfering networks are
    /// attributed to a relay candidate rotating with the slot order (their
    /// per-packet choice is not modeled).
    fn slot_transmitter(&self, cfg: &WbanConfig<F>, node: NodeId, hop: Hop) -> Result<NodeId> {
        match hop {
            Hop::First => Ok(node),
            Hop::Second => {
                let idx = cfg
                    .sensor_sites
                    .iter()
                    .position(|&s| s == node.site)
                    .ok_or_else(|| {
                        Error::validation(format!("slot node {node} is not a sensor of its network"))
                    })?;
                let (r1, r2) = cfg.relay_candidates(idx).ok_or_else(|| {
                    Error::validation(format!(
                        "network {} has second-hop slots without relays",
                        cfg.network_id
                    ))
                })?;
                Ok(if idx % 2 == 0 { r1 } else { r2 })
            }
        }
    }

    /// Interferer powers (dBm) arriving at `victim` at instant `t` from
    /// every concurrently transmitting node outside the WBAN-of-interest.
    fn interference_at(&self, victim: NodeId, t: F) -> Result<Vec<F>> {
        let interest_id = self.scenario.of_interest().network_id;
        let mut powers = Vec::new();
        for slot in self.schedule.transmitting_at(t) {
            if slot.network_id == interest_id {
                continue;
            }
            let cfg = self.network(slot.network_id)?;
            let tx = self.slot_transmitter(cfg, slot.node_id, slot.hop)?;
            let gain = self.trace(LinkId::new(tx, victim))?.gain_at(t)?;
            powers.push(cfg.tx_power_dbm + gain);
        }
        Ok(powers)
    }

    fn hop(&self, tx: NodeId, rx: NodeId, t: F) -> Result<HopState<F>> {
        let interest = self.scenario.of_interest();
        let gain = self.trace(LinkId::new(tx, rx))?.gain_at(t)?;
        let signal_dbm = interest.tx_power_dbm + gain;
        let interferers = self.interference_at(rx, t)?;
        let sinr_db = compute_sinr(signal_dbm, &interferers, self.noise_dbm);
        Ok(HopState {
            tx,
            rx,
            signal_dbm,
            interference_dbm: aggregate_interference_dbm(&interferers),
            sinr_db,
        })
    }

    /// Evaluates all candidate paths for one sensor with the first hop at
    /// `t1` and the forwarding hop at `t2`.
    fn paths(
        &self,
        sensor: NodeId,
        sensor_idx: usize,
        t1: F,
        t2: F,
    ) -> Result<PathsState<F>> {
        let interest = self.scenario.of_interest();
        let hub = interest.hub();
        let direct = self.hop(sensor, hub, t1)?;
        let relays = match interest.relay_candidates(sensor_idx) {
            None => None,
            Some((r1, r2)) => {
                let pair1 = (self.hop(sensor, r1, t1)?, self.hop(r1, hub, t2)?);
                let pair2 = (self.hop(sensor, r2, t1)?, self.hop(r2, hub, t2)?);
                Some([pair1, pair2])
            }
        };
        Ok(PathsState { direct, relays })
    }
}

/// Checks that every required link has a trace, that all traces share one
/// sampling interval, and that they cover the scheduled span.
fn validate_traces<F: Real>(
    scenario: &ScenarioConfig<F>,
    traces: &TraceSet<F>,
    schedule: &SuperframeSchedule<F>,
) -> Result<()> {
    let covered_end = schedule.period() * c(schedule.window_count() as f64);
    let mut common_dt: Option<F> = None;
    for link in &scenario.required_links {
        let trace = traces
            .get(link)
            .ok_or_else(|| Error::validation(format!("missing trace for link {link}")))?;
        match common_dt {
            None => common_dt = Some(trace.dt),
            Some(dt) => {
                if ((trace.dt - dt) / dt).abs() > c(1e-9) {
                    return Err(Error::validation(format!(
                        "trace for {link} has dt {} but the run uses {dt}",
                        trace.dt
                    )));
                }
            }
        }
        if trace.t0 > F::zero() || trace.end_time() < covered_end {
            return Err(Error::validation(format!(
                "trace for {link} covers [{}, {}) s but the schedule needs [0, {covered_end}) s",
                trace.t0,
                trace.end_time()
            )));
        }
    }
    Ok(())
}

/// Runs the full per-packet pipeline over the schedule.
pub fn run_experiment<F: Real>(
    scenario: &ScenarioConfig<F>,
    traces: &TraceSet<F>,
    schedule: &SuperframeSchedule<F>,
    options: &ExperimentOptions<F>,
) -> Result<ExperimentResult<F>> {
    validate_traces(scenario, traces, schedule)?;
    let interest = scenario.of_interest();
    let engine = Engine { scenario, traces, schedule, noise_dbm: options.noise_dbm };

    let cycles: Vec<&Cycle<F>> = schedule
        .cycles
        .iter()
        .filter(|cy| cy.network_id == interest.network_id)
        .collect();
    if cycles.is_empty() {
        return Err(Error::validation(format!(
            "schedule has no cycles for network {}",
            interest.network_id
        )));
    }

    let packets_per_cycle = interest.sensor_sites.len();
    let dt_packet = schedule.period() / c(packets_per_cycle as f64);

    let mut single = Vec::with_capacity(cycles.len() * packets_per_cycle);
    let mut opportunistic = Vec::with_capacity(single.capacity());
    let mut combining = Vec::with_capacity(single.capacity());
    let mut packets = Vec::with_capacity(single.capacity());

    for cycle in cycles {
        let t_decision = cycle.start;
        let mut slots = cycle.slots.iter().peekable();
        while let Some(first) = slots.next() {
            if first.hop != Hop::First {
                continue;
            }
            let sensor = first.node_id;
            let sensor_idx = interest
                .sensor_sites
                .iter()
                .position(|&s| s == sensor.site)
                .ok_or_else(|| {
                    Error::validation(format!("slot node {sensor} is not a configured sensor"))
                })?;
            // The forwarding sub-slot, when the mode has one, follows
            // immediately and carries the same owning sensor.
            let forward_start = match slots.peek() {
                Some(next) if next.hop == Hop::Second && next.node_id == sensor => {
                    Some(next.slot_start)
                }
                _ => None,
            };

            let decision = engine.paths(sensor, sensor_idx, t_decision, t_decision)?;
            let chosen = select_path_or(&decision.metrics());

            let realized = match options.decision_block {
                DecisionBlock::Same => decision,
                DecisionBlock::StartOfSuperframe => {
                    let t1 = first.slot_start;
                    let t2 = forward_start.unwrap_or(t1);
                    engine.paths(sensor, sensor_idx, t1, t2)?
                }
            };
            let realized_metrics = realized.metrics();
            let or_value = match chosen {
                ChosenPath::Direct => realized_metrics.direct_db,
                ChosenPath::Relay1 => realized_metrics.relay1_db,
                ChosenPath::Relay2 => realized_metrics.relay2_db,
            };
            let sc_value = realized_metrics
                .direct_db
                .max(realized_metrics.relay1_db)
                .max(realized_metrics.relay2_db);

            single.push(realized_metrics.direct_db);
            opportunistic.push(or_value);
            combining.push(sc_value);

            let hop = realized.bottleneck(chosen);
            packets.push(PacketRecord {
                t: first.slot_start,
                tx: hop.tx,
                rx: hop.rx,
                signal_dbm: hop.signal_dbm,
                interference_dbm: hop.interference_dbm,
                noise_dbm: options.noise_dbm,
                sinr_db: hop.sinr_db,
                chosen_path: chosen,
            });
        }
    }

    Ok(ExperimentResult {
        single_link: SinrSeries { scheme: Scheme::SingleLink, dt_packet, values: single },
        opportunistic: SinrSeries {
            scheme: Scheme::Opportunistic,
            dt_packet,
            values: opportunistic,
        },
        selection_combining: SinrSeries {
            scheme: Scheme::SelectionCombining,
            dt_packet,
            values: combining,
        },
        packets,
        seed: options.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::{build_superframe, schedule_cycles};
    use crate::scalar::db_to_linear;
    use crate::scenario::{
        build_scenario, BodySite, ChannelSource, RelayMode, ShadowingLevel,
    };

    /// Constant-gain trace for a link over a span.
    fn flat_trace(link: LinkId, gain_db: f64, duration: f64) -> ChannelTrace<f64> {
        let dt = 0.12;
        let n = (duration / dt).ceil() as usize + 1;
        ChannelTrace::new(link, 0.0, dt, vec![gain_db; n]).unwrap()
    }

    fn fixed_relay_scenario(direct_gain: f64) -> (ScenarioConfig<f64>, TraceSet<f64>) {
        let interest = WbanConfig::new(
            1,
            BodySite::Chest,
            vec![BodySite::LeftWrist],
            RelayMode::FixedHips,
        );
        let scenario = build_scenario(
            vec![interest],
            None,
            ShadowingLevel::None,
            ChannelSource::Synthetic,
            1,
        )
        .unwrap();
        // Hand-set gains: s->h, s->r1, r1->h, s->r2, r2->h.
        let gains = [
            (direct_gain, "1:sensor:left_wrist>1:hub:chest"),
            (-55.0, "1:sensor:left_wrist>1:relay:left_hip"),
            (-70.0, "1:relay:left_hip>1:hub:chest"),
            (-50.0, "1:sensor:left_wrist>1:relay:right_hip"),
            (-65.0, "1:relay:right_hip>1:hub:chest"),
        ];
        let mut traces = TraceSet::new();
        for (gain, link) in gains {
            let link: LinkId = link.parse().unwrap();
            traces.insert(link, flat_trace(link, gain, 10.0));
        }
        (scenario, traces)
    }

    #[test]
    fn hand_fixture_direct_wins() {
        let (scenario, traces) = fixed_relay_scenario(-60.0);
        let frame = build_superframe(scenario.of_interest(), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 1.0, 3).unwrap();
        let result =
            run_experiment(&scenario, &traces, &schedule, &ExperimentOptions::default()).unwrap();

        // Independent arithmetic: SNRs are 35 / min(40,25)=25 / min(45,30)=30.
        for packet in &result.packets {
            assert_eq!(packet.chosen_path, ChosenPath::Direct);
            assert!((packet.sinr_db - 35.0).abs() < 1e-9, "sinr {}", packet.sinr_db);
            assert_eq!(packet.tx.site, BodySite::LeftWrist);
            assert_eq!(packet.rx.site, BodySite::Chest);
        }
        for v in &result.opportunistic.values {
            assert!((v - 35.0).abs() < 1e-9);
        }
        assert_eq!(result.single_link.values, result.opportunistic.values);
        assert_eq!(result.single_link.values, result.selection_combining.values);
    }

    #[test]
    fn hand_fixture_relay2_wins() {
        // Direct gain -75 dB: metrics become (20, 25, 30) and relay 2 wins;
        // its bottleneck is the forwarding hop at -65 dB (30 dB SINR).
        let (scenario, traces) = fixed_relay_scenario(-75.0);
        let frame = build_superframe(scenario.of_interest(), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 1.0, 3).unwrap();
        let result =
            run_experiment(&scenario, &traces, &schedule, &ExperimentOptions::default()).unwrap();

        for packet in &result.packets {
            assert_eq!(packet.chosen_path, ChosenPath::Relay2);
            assert!((packet.sinr_db - 30.0).abs() < 1e-9);
            assert_eq!(packet.tx.site, BodySite::RightHip);
            assert_eq!(packet.rx.site, BodySite::Chest);
            assert!((packet.signal_dbm + 65.0).abs() < 1e-9);
            assert_eq!(packet.interference_dbm, f64::NEG_INFINITY);
        }
        for v in &result.single_link.values {
            assert!((v - 20.0).abs() < 1e-9);
        }
        for v in &result.selection_combining.values {
            assert!((v - 30.0).abs() < 1e-9);
        }
    }

    #[test]
    fn packet_records_satisfy_sinr_consistency() {
        let (scenario, traces) = fixed_relay_scenario(-75.0);
        let frame = build_superframe(scenario.of_interest(), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 1.0, 3).unwrap();
        let result =
            run_experiment(&scenario, &traces, &schedule, &ExperimentOptions::default()).unwrap();
        for p in &result.packets {
            let recomputed = compute_sinr(p.signal_dbm, &[p.interference_dbm], p.noise_dbm);
            let rel = (db_to_linear(recomputed) / db_to_linear(p.sinr_db) - 1.0).abs();
            assert!(rel < 1e-9, "record inconsistent: {rel}");
        }
    }

    #[test]
    fn missing_trace_is_named() {
        let (scenario, mut traces) = fixed_relay_scenario(-60.0);
        let removed: LinkId = "1:relay:left_hip>1:hub:chest".parse().unwrap();
        traces.remove(&removed);
        let frame = build_superframe(scenario.of_interest(), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 1.0, 3).unwrap();
        let err = run_experiment(&scenario, &traces, &schedule, &ExperimentOptions::default())
            .unwrap_err();
        assert!(err.to_string().contains(&removed.to_string()));
    }

    #[test]
    fn short_trace_coverage_gap_is_named() {
        let (scenario, mut traces) = fixed_relay_scenario(-60.0);
        let link: LinkId = "1:sensor:left_wrist>1:hub:chest".parse().unwrap();
        traces.insert(link, flat_trace(link, -60.0, 0.3));
        let frame = build_superframe(scenario.of_interest(), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 1.0, 3).unwrap();
        let err = run_experiment(&scenario, &traces, &schedule, &ExperimentOptions::default())
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(&link.to_string()) && msg.contains("covers"), "{msg}");
    }

    #[test]
    fn series_lengths_align() {
        let (scenario, traces) = fixed_relay_scenario(-60.0);
        let frame = build_superframe(scenario.of_interest(), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 2.0, 9).unwrap();
        let result =
            run_experiment(&scenario, &traces, &schedule, &ExperimentOptions::default()).unwrap();
        let n = result.single_link.values.len();
        assert!(n > 0);
        assert_eq!(result.opportunistic.values.len(), n);
        assert_eq!(result.selection_combining.values.len(), n);
        assert_eq!(result.packets.len(), n);
        assert_eq!(result.single_link.dt_packet, result.opportunistic.dt_packet);
    }
}
