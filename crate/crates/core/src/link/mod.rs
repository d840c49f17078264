//! Per-packet SINR and opportunistic path selection.
//!
//! SINR is computed in linear milliwatts from dBm inputs: signal over noise
//! plus the sum of interferer powers. A relayed (decode-and-forward) path is
//! only as good as its weaker hop, so its metric is the minimum of the two
//! hop SINRs. Opportunistic relaying picks the best of {direct, relay 1,
//! relay 2} before transmission and activates only that path; selection
//! combining transmits on all three and keeps the best received copy.

pub mod engine;

pub use engine::{
    run_experiment, DecisionBlock, ExperimentOptions, ExperimentResult, TraceSet,
};

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::scalar::{c, db_to_linear, linear_to_db, Real};
use crate::scenario::NodeId;

/// Receiver noise power assumed throughout, dBm.
pub const DEFAULT_NOISE_DBM: f64 = -95.0;

/// Communication scheme a SINR series belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SingleLink,
    Opportunistic,
    SelectionCombining,
}

impl Scheme {
    pub const ALL: [Scheme; 3] =
        [Scheme::SingleLink, Scheme::Opportunistic, Scheme::SelectionCombining];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::SingleLink => "single_link",
            Scheme::Opportunistic => "opportunistic",
            Scheme::SelectionCombining => "selection_combining",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .iter()
            .copied()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| crate::error::Error::param(format!("unknown scheme: {s}")))
    }
}

/// Which of the three paths carried (or would carry) a packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChosenPath {
    Direct,
    Relay1,
    Relay2,
}

impl ChosenPath {
    pub fn name(self) -> &'static str {
        match self {
            ChosenPath::Direct => "direct",
            ChosenPath::Relay1 => "relay1",
            ChosenPath::Relay2 => "relay2",
        }
    }
}

/// Per-path SINR metrics at decision time, dB. Relay metrics are already
/// the minimum over their two hops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathMetrics<F> {
    pub direct_db: F,
    pub relay1_db: F,
    pub relay2_db: F,
}

/// One received packet of the opportunistic scheme. For a relayed packet
/// the transmitter, receiver, and powers describe the bottleneck hop, so
/// the record is always consistent with its own SINR.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PacketRecord<F> {
    pub t: F,
    pub tx: NodeId,
    pub rx: NodeId,
    pub signal_dbm: F,
    /// Aggregate interference, dBm; `-inf` when no interferer was active.
    pub interference_dbm: F,
    pub noise_dbm: F,
    pub sinr_db: F,
    pub chosen_path: ChosenPath,
}

/// Time-ordered packet SINR values of one scheme at a uniform cadence.
#[derive(Debug, Clone, Serialize)]
pub struct SinrSeries<F> {
    pub scheme: Scheme,
    /// Nominal packet cadence, seconds.
    pub dt_packet: F,
    pub values: Vec<F>,
}

/// SINR in dB: linear signal over (noise + Σ interferers).
///
/// Interferer entries of `-inf` dBm contribute zero power, so "no active
/// interferer" needs no special casing.
pub fn compute_sinr<F: Real>(signal_dbm: F, interferer_powers_dbm: &[F], noise_dbm: F) -> F {
    let signal = db_to_linear(signal_dbm);
    let mut denom = db_to_linear(noise_dbm);
    for &p in interferer_powers_dbm {
        denom += db_to_linear(p);
    }
    linear_to_db(signal / denom)
}

/// Decode-and-forward path metric: the weaker of the two hop SINRs.
pub fn path_metric<F: Real>(first_hop_db: F, second_hop_db: F) -> F {
    first_hop_db.min(second_hop_db)
}

/// Aggregates individual interferer powers into one dBm figure
/// (`-inf` when the list is empty).
pub fn aggregate_interference_dbm<F: Real>(interferer_powers_dbm: &[F]) -> F {
    let total = interferer_powers_dbm
        .iter()
        .fold(F::zero(), |acc, &p| acc + db_to_linear(p));
    linear_to_db(total)
}

fn argmax_path<F: Real>(direct: F, relay1: F, relay2: F) -> ChosenPath {
    // Ties resolve toward the fewest transmissions: direct, then relay 1.
    if direct >= relay1 && direct >= relay2 {
        ChosenPath::Direct
    } else if relay1 >= relay2 {
        ChosenPath::Relay1
    } else {
        ChosenPath::Relay2
    }
}

/// Opportunistic relaying decision: the best path by decision-time metric;
/// only that path is activated.
pub fn select_path_or<F: Real>(metrics: &PathMetrics<F>) -> ChosenPath {
    argmax_path(metrics.direct_db, metrics.relay1_db, metrics.relay2_db)
}

/// Selection combining at the hub: all three paths transmit and the best
/// realized copy is kept.
pub fn select_path_sc<F: Real>(realized: &PathMetrics<F>) -> ChosenPath {
    argmax_path(realized.direct_db, realized.relay1_db, realized.relay2_db)
}

/// Transmissions spent on one packet under a scheme.
pub fn transmission_count(scheme: Scheme, path: ChosenPath) -> u32 {
    match scheme {
        Scheme::SingleLink => 1,
        Scheme::Opportunistic => match path {
            ChosenPath::Direct => 1,
            ChosenPath::Relay1 | ChosenPath::Relay2 => 2,
        },
        // Sensor broadcast plus both relays forwarding.
        Scheme::SelectionCombining => 3,
    }
}

/// Writes a packet log as CSV: `# key=value` metadata, then
/// `t_s,tx,rx,path,signal_dbm,interf_dbm,sinr_db` rows.
pub fn write_packet_log_csv<F: Real, W: Write>(
    packets: &[PacketRecord<F>],
    extra_metadata: &[(String, String)],
    mut out: W,
) -> Result<()> {
    for (key, value) in extra_metadata {
        writeln!(out, "# {key}={value}")?;
    }
    writeln!(out, "t_s,tx,rx,path,signal_dbm,interf_dbm,sinr_db")?;
    for p in packets {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            p.t,
            p.tx,
            p.rx,
            p.chosen_path.name(),
            p.signal_dbm,
            p.interference_dbm,
            p.sinr_db
        )?;
    }
    Ok(())
}

/// Writes a SINR series with its metadata: `# key=value` lines, then
/// `t_s,sinr_db` rows at the nominal cadence.
pub fn write_series_csv<F: Real, W: Write>(
    series: &SinrSeries<F>,
    extra_metadata: &[(String, String)],
    mut out: W,
) -> Result<()> {
    writeln!(out, "# scheme={}", series.scheme.name())?;
    writeln!(out, "# dt_packet_s={}", series.dt_packet)?;
    for (key, value) in extra_metadata {
        writeln!(out, "# {key}={value}")?;
    }
    writeln!(out, "t_s,sinr_db")?;
    for (k, &v) in series.values.iter().enumerate() {
        let t = series.dt_packet * c(k as f64);
        writeln!(out, "{t},{v}")?;
    }
    Ok(())
}

/// Reads a SINR series written by [`write_series_csv`].
pub fn read_series_csv<F: Real>(path: &std::path::Path) -> Result<SinrSeries<F>> {
    use std::io::BufRead;
    let file = std::fs::File::open(path)?;
    let mut scheme: Option<Scheme> = None;
    let mut dt_packet: Option<f64> = None;
    let mut header_seen = false;
    let mut values = Vec::new();
    for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((key, value)) = rest.trim().split_once('=') {
                match key.trim() {
                    "scheme" => scheme = Some(value.trim().parse()?),
                    "dt_packet_s" => dt_packet = value.trim().parse().ok(),
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            if line != "t_s,sinr_db" {
                return Err(crate::error::Error::Parse {
                    line: line_no,
                    message: format!("expected header 't_s,sinr_db', found '{line}'"),
                });
            }
            header_seen = true;
            continue;
        }
        let (_, v_str) = line.split_once(',').ok_or_else(|| crate::error::Error::Parse {
            line: line_no,
            message: "expected 't,sinr' row".into(),
        })?;
        let v: f64 = v_str.trim().parse().map_err(|_| crate::error::Error::Parse {
            line: line_no,
            message: format!("bad SINR value: {v_str}"),
        })?;
        values.push(c(v));
    }
    let scheme = scheme.ok_or_else(|| crate::error::Error::Parse {
        line: 1,
        message: "missing '# scheme=' metadata".into(),
    })?;
    let dt_packet = dt_packet.ok_or_else(|| crate::error::Error::Parse {
        line: 1,
        message: "missing '# dt_packet_s=' metadata".into(),
    })?;
    if values.is_empty() {
        return Err(crate::error::Error::Validation(format!(
            "series file {} has no samples",
            path.display()
        )));
    }
    Ok(SinrSeries { scheme, dt_packet: c(dt_packet), values })
}
