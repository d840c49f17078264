//! Intra-WBAN TDMA superframes and inter-WBAN cycle scheduling.
//!
//! Within one WBAN every sensor transmits once per superframe in a fixed
//! order; in a relay mode each sensor slot is a two-phase slot (sensor
//! transmission, then forwarding of equal length), which doubles the
//! superframe. Across WBANs the channel is divided into windows of
//! `Td + T_idle` with `T_idle = (N_c − 1)·Td`; each network independently
//! draws its cycle start uniformly over the idle span of every window, so
//! cycles never spill into the next window but may collide with other
//! networks' cycles.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::scenario::{NetworkId, NodeId, WbanConfig};

/// Which hop of a two-phase slot is transmitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hop {
    First,
    Second,
}

impl Hop {
    pub fn name(self) -> &'static str {
        match self {
            Hop::First => "first",
            Hop::Second => "second",
        }
    }
}

/// One transmission slot.
///
/// For a first-hop slot `node_id` is the transmitting sensor. For a
/// second-hop forwarding sub-slot it is still the owning sensor — which
/// device actually forwards is a per-packet decision resolved by the
/// experiment engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotAssignment<F> {
    pub network_id: NetworkId,
    pub node_id: NodeId,
    pub hop: Hop,
    pub slot_start: F,
    pub slot_len: F,
}

impl<F: Real> SlotAssignment<F> {
    pub fn contains(&self, t: F) -> bool {
        t >= self.slot_start && t < self.slot_start + self.slot_len
    }
}

/// One network's transmission cycle with absolute slot times.
#[derive(Debug, Clone, Serialize)]
pub struct Cycle<F> {
    pub network_id: NetworkId,
    pub start: F,
    pub slots: Vec<SlotAssignment<F>>,
}

/// Absolute-time slot assignments for every network over the run.
#[derive(Debug, Clone, Serialize)]
pub struct SuperframeSchedule<F> {
    /// Superframe length shared by all networks (the longest frame).
    pub td: F,
    /// Idle period per window: `(N_c − 1)·Td`.
    pub t_idle: F,
    /// Number of coexisting networks.
    pub nc: usize,
    /// Simulation duration the schedule covers.
    pub duration: F,
    /// Cycles in window-major order: `nc` entries per window.
    pub cycles: Vec<Cycle<F>>,
}

/// Builds one network's superframe, with slot times relative to the
/// superframe start. One slot per sensor in list order; relay modes append
/// a forwarding sub-slot of equal length after each sensor slot. The beacon
/// is treated as zero-length.
pub fn build_superframe<F: Real>(
    config: &WbanConfig<F>,
    slot_len: F,
) -> Result<Vec<SlotAssignment<F>>> {
    if slot_len <= F::zero() {
        return Err(Error::param("slot_len must be > 0"));
    }
    if config.sensor_sites.is_empty() {
        return Err(Error::param("superframe needs at least one sensor"));
    }
    let two_hop = config.relay_candidates(0).is_some();
    let stride = if two_hop { slot_len * c(2.0) } else { slot_len };
    let mut slots = Vec::new();
    for (i, &site) in config.sensor_sites.iter().enumerate() {
        let sensor = config.sensor(site);
        let start = stride * c(i as f64);
        slots.push(SlotAssignment {
            network_id: config.network_id,
            node_id: sensor,
            hop: Hop::First,
            slot_start: start,
            slot_len,
        });
        if two_hop {
            slots.push(SlotAssignment {
                network_id: config.network_id,
                node_id: sensor,
                hop: Hop::Second,
                slot_start: start + slot_len,
                slot_len,
            });
        }
    }
    Ok(slots)
}

/// Span of a relative superframe: end of its last slot.
pub fn superframe_len<F: Real>(slots: &[SlotAssignment<F>]) -> F {
    slots
        .iter()
        .map(|s| s.slot_start + s.slot_len)
        .fold(F::zero(), F::max)
}

/// Schedules every network's cycles over `duration`.
///
/// Each window of length `Td + T_idle` gets one cycle per network; the
/// cycle start offset is redrawn uniformly over `[0, T_idle]` for every
/// window (no coordination between networks). Deterministic per seed.
pub fn schedule_cycles<F: Real>(
    superframes: &[Vec<SlotAssignment<F>>],
    duration: F,
    seed: u64,
) -> Result<SuperframeSchedule<F>> {
    if superframes.is_empty() {
        return Err(Error::param("schedule needs at least one network"));
    }
    if superframes.iter().any(|f| f.is_empty()) {
        return Err(Error::param("every network needs a non-empty superframe"));
    }
    let td = superframes.iter().map(|f| superframe_len(f)).fold(F::zero(), F::max);
    if duration < td {
        return Err(Error::param(format!("duration {duration} shorter than Td {td}")));
    }
    let nc = superframes.len();
    let t_idle = td * c((nc - 1) as f64);
    let period = td + t_idle;
    let windows = (duration / period + c(1e-9))
        .floor()
        .to_usize()
        .ok_or_else(|| Error::param("duration too long"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cycles = Vec::with_capacity(windows * nc);
    for w in 0..windows {
        let window_start = period * c(w as f64);
        for frame in superframes {
            let offset = if nc == 1 {
                F::zero()
            } else {
                c::<F>(rng.random::<f64>()) * t_idle
            };
            let start = window_start + offset;
            let slots = frame
                .iter()
                .map(|s| SlotAssignment { slot_start: start + s.slot_start, ..*s })
                .collect();
            cycles.push(Cycle { network_id: frame[0].network_id, start, slots });
        }
    }
    Ok(SuperframeSchedule { td, t_idle, nc, duration, cycles })
}

impl<F: Real> SuperframeSchedule<F> {
    /// Window period `Td + T_idle`.
    pub fn period(&self) -> F {
        self.td + self.t_idle
    }

    /// Cycles of one window, in network order.
    pub fn window(&self, w: usize) -> &[Cycle<F>] {
        &self.cycles[w * self.nc..(w + 1) * self.nc]
    }

    pub fn window_count(&self) -> usize {
        self.cycles.len() / self.nc
    }

    /// All slot assignments whose span contains `t`.
    ///
    /// A cycle never leaves its window, so only the window containing `t`
    /// needs to be examined.
    pub fn transmitting_at(&self, t: F) -> Vec<SlotAssignment<F>> {
        let mut active = Vec::new();
        if t < F::zero() {
            return active;
        }
        let Some(w) = (t / self.period()).floor().to_usize() else {
            return active;
        };
        if w >= self.window_count() {
            return active;
        }
        for cycle in self.window(w) {
            for slot in &cycle.slots {
                if slot.contains(t) {
                    active.push(*slot);
                }
            }
        }
        active
    }
}

/// Writes a schedule as CSV: `# key=value` metadata, then
/// `network_id,node_id,hop,slot_start_s,slot_len_s` rows.
pub fn write_schedule_csv<F: Real, W: Write>(
    schedule: &SuperframeSchedule<F>,
    extra_metadata: &[(String, String)],
    mut out: W,
) -> Result<()> {
    for (key, value) in extra_metadata {
        writeln!(out, "# {key}={value}")?;
    }
    writeln!(out, "network_id,node_id,hop,slot_start_s,slot_len_s")?;
    for cycle in &schedule.cycles {
        for slot in &cycle.slots {
            writeln!(
                out,
                "{},{},{},{},{}",
                slot.network_id,
                slot.node_id,
                slot.hop.name(),
                slot.slot_start,
                slot.slot_len
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{BodySite, RelayMode};

    fn single_link_config(id: NetworkId, sensors: usize) -> WbanConfig<f64> {
        let sites = [
            BodySite::LeftWrist,
            BodySite::Head,
            BodySite::LeftAnkle,
            BodySite::Back,
        ];
        WbanConfig::new(id, BodySite::Chest, sites[..sensors].to_vec(), RelayMode::None)
    }

    fn two_hop_config(id: NetworkId) -> WbanConfig<f64> {
        WbanConfig::new(
            id,
            BodySite::Chest,
            vec![BodySite::LeftWrist, BodySite::Head, BodySite::LeftAnkle],
            RelayMode::FixedHips,
        )
    }

    #[test]
    fn single_link_superframe_length() {
        let frame = build_superframe(&single_link_config(1, 3), 0.01).unwrap();
        assert_eq!(frame.len(), 3);
        assert!((superframe_len(&frame) - 0.03).abs() < 1e-12);
    }

    #[test]
    fn two_hop_superframe_doubles() {
        let frame = build_superframe(&two_hop_config(1), 0.01).unwrap();
        assert_eq!(frame.len(), 6);
        assert!((superframe_len(&frame) - 0.06).abs() < 1e-12);
        // Sensor slot then its forwarding sub-slot, back to back.
        assert_eq!(frame[0].hop, Hop::First);
        assert_eq!(frame[1].hop, Hop::Second);
        assert_eq!(frame[0].node_id, frame[1].node_id);
        assert!((frame[1].slot_start - 0.01).abs() < 1e-12);
    }

    #[test]
    fn one_sensor_superframe() {
        let frame = build_superframe(&single_link_config(1, 1), 0.01).unwrap();
        assert_eq!(frame.len(), 1);
        assert_eq!(frame[0].slot_start, 0.0);
        let relayed = build_superframe(&two_hop_config(1), 0.01).unwrap();
        assert_eq!(relayed[0].slot_start, 0.0);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(build_superframe(&single_link_config(1, 3), 0.0).is_err());
        let mut empty = single_link_config(1, 1);
        empty.sensor_sites.clear();
        assert!(build_superframe(&empty, 0.01).is_err());
    }

    #[test]
    fn single_network_back_to_back() {
        let frame = build_superframe(&single_link_config(1, 3), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 0.3, 99).unwrap();
        assert_eq!(schedule.t_idle, 0.0);
        assert_eq!(schedule.window_count(), 10);
        for (w, cycle) in schedule.cycles.iter().enumerate() {
            assert!((cycle.start - w as f64 * 0.03).abs() < 1e-12);
        }
    }

    #[test]
    fn two_networks_idle_period() {
        let frames = vec![
            build_superframe(&single_link_config(1, 3), 0.01).unwrap(),
            build_superframe(&single_link_config(2, 3), 0.01).unwrap(),
        ];
        let schedule = schedule_cycles(&frames, 6.0, 5).unwrap();
        assert!((schedule.td - 0.03).abs() < 1e-12);
        assert!((schedule.t_idle - 0.03).abs() < 1e-12);
        assert!((schedule.period() - 0.06).abs() < 1e-12);
        // Every cycle fits inside its window.
        for w in 0..schedule.window_count() {
            for cycle in schedule.window(w) {
                let window_start = w as f64 * schedule.period();
                assert!(cycle.start >= window_start - 1e-12);
                for slot in &cycle.slots {
                    assert!(slot.slot_start + slot.slot_len <= window_start + schedule.period() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let frames = vec![
            build_superframe(&single_link_config(1, 2), 0.01).unwrap(),
            build_superframe(&single_link_config(2, 2), 0.01).unwrap(),
        ];
        let a = schedule_cycles(&frames, 2.0, 7).unwrap();
        let b = schedule_cycles(&frames, 2.0, 7).unwrap();
        assert_eq!(a.cycles.len(), b.cycles.len());
        for (x, y) in a.cycles.iter().zip(&b.cycles) {
            assert_eq!(x.start, y.start);
        }
        let c = schedule_cycles(&frames, 2.0, 8).unwrap();
        assert!(a.cycles.iter().zip(&c.cycles).any(|(x, y)| x.start != y.start));
    }

    #[test]
    fn intra_network_slots_disjoint() {
        let frames = vec![
            build_superframe(&two_hop_config(1), 0.01).unwrap(),
            build_superframe(&single_link_config(2, 4), 0.007).unwrap(),
        ];
        let schedule = schedule_cycles(&frames, 3.0, 31).unwrap();
        for cycle in &schedule.cycles {
            let mut spans: Vec<(f64, f64)> =
                cycle.slots.iter().map(|s| (s.slot_start, s.slot_start + s.slot_len)).collect();
            spans.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            for pair in spans.windows(2) {
                assert!(pair[0].1 <= pair[1].0 + 1e-15, "overlapping slots in a cycle");
            }
        }
    }

    #[test]
    fn transmitting_at_matches_brute_force() {
        let frames = vec![
            build_superframe(&two_hop_config(1), 0.01).unwrap(),
            build_superframe(&single_link_config(2, 3), 0.01).unwrap(),
        ];
        let schedule = schedule_cycles(&frames, 1.2, 17).unwrap();
        for k in 0..600 {
            let t = k as f64 * 0.002 + 0.0005;
            let fast = schedule.transmitting_at(t);
            let brute: Vec<_> = schedule
                .cycles
                .iter()
                .flat_map(|cy| cy.slots.iter().copied())
                .filter(|s| s.contains(t))
                .collect();
            assert_eq!(fast.len(), brute.len(), "mismatch at t={t}");
            // Within one network at most one transmitter.
            let mut nets: Vec<_> = fast.iter().map(|s| s.network_id).collect();
            nets.sort_unstable();
            nets.dedup();
            assert_eq!(nets.len(), fast.len(), "two transmitters in one network at t={t}");
        }
    }

    #[test]
    fn idle_instant_has_no_transmitters() {
        let frame = build_superframe(&single_link_config(1, 1), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 0.1, 1).unwrap();
        // Single network: slots occupy [w·0.01·1 .. +0.01) back to back, so
        // probe beyond the covered windows.
        assert!(schedule.transmitting_at(0.15).is_empty());
        assert!(schedule.transmitting_at(-0.5).is_empty());
    }

    #[test]
    fn forced_equal_offsets_overlap() {
        // Two networks with Nc = 1 semantics: build a two-network schedule
        // and find an instant inside both cycles of a window where spans
        // overlap (offsets differ but spans can still intersect).
        let frames = vec![
            build_superframe(&single_link_config(1, 3), 0.01).unwrap(),
            build_superframe(&single_link_config(2, 3), 0.01).unwrap(),
        ];
        let schedule = schedule_cycles(&frames, 60.0, 3).unwrap();
        let mut found = false;
        'outer: for w in 0..schedule.window_count() {
            let pair = schedule.window(w);
            let (a, b) = (&pair[0], &pair[1]);
            let start = a.start.max(b.start);
            let end = (a.start + schedule.td).min(b.start + schedule.td);
            if start < end {
                let t = (start + end) / 2.0;
                let active = schedule.transmitting_at(t);
                if active.len() == 2 {
                    let nets: std::collections::BTreeSet<_> =
                        active.iter().map(|s| s.network_id).collect();
                    assert_eq!(nets.len(), 2);
                    found = true;
                    break 'outer;
                }
            }
        }
        assert!(found, "no overlapping instant found in 1000 windows");
    }

    #[test]
    fn overlap_probability_matches_brute_force_integral() {
        // Three networks: T_idle = 2·Td. Two cycles of the same window
        // overlap iff their offsets differ by less than Td. A brute-force
        // double integral on a fine grid gives the expected probability.
        let td = 0.03_f64;
        let t_idle = 2.0 * td;
        let grid = 1000usize;
        let mut hits = 0usize;
        for i in 0..grid {
            for j in 0..grid {
                let x = (i as f64 + 0.5) / grid as f64 * t_idle;
                let y = (j as f64 + 0.5) / grid as f64 * t_idle;
                if (x - y).abs() < td {
                    hits += 1;
                }
            }
        }
        let expected = hits as f64 / (grid * grid) as f64;

        let frames = vec![
            build_superframe(&single_link_config(1, 3), 0.01).unwrap(),
            build_superframe(&single_link_config(2, 3), 0.01).unwrap(),
            build_superframe(&single_link_config(3, 3), 0.01).unwrap(),
        ];
        // 10^5 windows of 0.09 s.
        let schedule = schedule_cycles(&frames, 9000.0, 12321).unwrap();
        let mut overlaps = 0usize;
        let windows = schedule.window_count();
        for w in 0..windows {
            let cycles = schedule.window(w);
            let (a, b) = (cycles[0].start, cycles[1].start);
            if (a - b).abs() < td {
                overlaps += 1;
            }
        }
        let empirical = overlaps as f64 / windows as f64;
        assert!(
            (empirical - expected).abs() < 0.02,
            "overlap frequency {empirical} vs integral {expected}"
        );
    }

    #[test]
    fn schedule_csv_format() {
        let frame = build_superframe(&single_link_config(1, 2), 0.01).unwrap();
        let schedule = schedule_cycles(&[frame], 0.04, 1).unwrap();
        let mut buf = Vec::new();
        write_schedule_csv(&schedule, &[("seed".into(), "1".into())], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "# seed=1");
        assert_eq!(lines.next().unwrap(), "network_id,node_id,hop,slot_start_s,slot_len_s");
        assert!(lines.next().unwrap().starts_with("1,1:sensor:left_wrist,first,0,"));
    }
}
