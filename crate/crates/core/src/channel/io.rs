//! Trace CSV format.
//!
//! Layout: `# key=value` metadata lines, then the header `time_s,gain_db`,
//! then one row per sample. Times must increase with a constant step
//! (validated to a relative tolerance of 1e-6). UTF-8, LF or CRLF. The
//! writer records `t0_s` and `dt_s` in the metadata so single-sample traces
//! and exact round-trips work; the reader falls back to the time column
//! when they are absent.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::channel::ChannelTrace;
use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::scenario::LinkId;

const HEADER: &str = "time_s,gain_db";
const STEP_REL_TOL: f64 = 1e-6;

/// Writes a trace with its link id and any extra metadata pairs.
pub fn save_trace<F: Real>(
    trace: &ChannelTrace<F>,
    path: &Path,
    extra_metadata: &[(String, String)],
) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "# link={}", trace.link_id)?;
    writeln!(w, "# t0_s={}", trace.t0)?;
    writeln!(w, "# dt_s={}", trace.dt)?;
    for (key, value) in extra_metadata {
        writeln!(w, "# {key}={value}")?;
    }
    writeln!(w, "{HEADER}")?;
    for (k, &gain) in trace.samples.iter().enumerate() {
        let t = trace.t0 + trace.dt * c(k as f64);
        writeln!(w, "{t},{gain}")?;
    }
    w.flush()?;
    Ok(())
}

/// Reads only the `# key=value` metadata header of a trace file.
pub fn trace_metadata(path: &Path) -> Result<Vec<(String, String)>> {
    let file = File::open(path)?;
    let mut pairs = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            let (key, value) = rest.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("metadata line is not key=value: {rest}"),
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        } else {
            break;
        }
    }
    Ok(pairs)
}

/// Loads and validates a trace, assigning it to `link_id`.
pub fn load_trace<F: Real>(path: &Path, link_id: LinkId) -> Result<ChannelTrace<F>> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);

    let mut meta_t0: Option<f64> = None;
    let mut meta_dt: Option<f64> = None;
    let mut header_seen = false;
    let mut times: Vec<f64> = Vec::new();
    let mut samples: Vec<F> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if header_seen {
                return Err(Error::Parse {
                    line: line_no,
                    message: "metadata after the CSV header".into(),
                });
            }
            let rest = rest.trim();
            if let Some((key, value)) = rest.split_once('=') {
                match key.trim() {
                    "t0_s" => meta_t0 = value.trim().parse().ok(),
                    "dt_s" => meta_dt = value.trim().parse().ok(),
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            if line != HEADER {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header '{HEADER}', found '{line}'"),
                });
            }
            header_seen = true;
            continue;
        }
        let (t_str, g_str) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected 'time,gain' row".into(),
        })?;
        let t: f64 = t_str.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad time value: {t_str}"),
        })?;
        let g: f64 = g_str.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad gain value: {g_str}"),
        })?;
        if !g.is_finite() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("gain must be finite, got {g}"),
            });
        }
        times.push(t);
        samples.push(c(g));
    }

    if !header_seen {
        return Err(Error::Parse { line: 1, message: format!("missing header '{HEADER}'") });
    }
    if samples.is_empty() {
        return Err(Error::Parse { line: 1, message: "trace has no samples".into() });
    }

    let t0 = meta_t0.unwrap_or(times[0]);
    let dt = match meta_dt {
        Some(dt) => dt,
        None if times.len() >= 2 => times[1] - times[0],
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "single-sample trace without a dt_s metadata line".into(),
            })
        }
    };
    if dt <= 0.0 {
        return Err(Error::Parse { line: 1, message: format!("non-positive step {dt}") });
    }

    // Uniform spacing check against the nominal grid.
    for (k, &t) in times.iter().enumerate() {
        let expected = t0 + k as f64 * dt;
        let tol = STEP_REL_TOL * dt.max(expected.abs());
        if (t - expected).abs() > tol {
            return Err(Error::Parse {
                line: k + 2, // header offset; metadata lines only shift further
                message: format!("time {t} deviates from uniform grid (expected {expected})"),
            });
        }
    }

    ChannelTrace::new(link_id, c(t0), c(dt), samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{BodySite, DeviceKind, NodeId};

    fn test_link() -> LinkId {
        LinkId::new(
            NodeId::new(2, DeviceKind::Sensor, BodySite::Back),
            NodeId::new(1, DeviceKind::Hub, BodySite::Chest),
        )
    }

    fn tmp_file(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("bancoex-io-tests");
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn round_trip_bit_identical() {
        let samples = vec![-55.123456789012, -60.0, -47.25, -90.000000001];
        let trace = ChannelTrace::new(test_link(), 0.5, 0.12, samples.clone()).unwrap();
        let path = tmp_file("round_trip.csv");
        save_trace(&trace, &path, &[("seed".into(), "42".into())]).unwrap();
        let loaded: ChannelTrace<f64> = load_trace(&path, test_link()).unwrap();
        assert_eq!(loaded.samples, samples);
        assert_eq!(loaded.t0, 0.5);
        assert_eq!(loaded.dt, 0.12);

        let meta = trace_metadata(&path).unwrap();
        assert!(meta.iter().any(|(k, v)| k == "seed" && v == "42"));
        assert!(meta.iter().any(|(k, _)| k == "link"));
    }

    #[test]
    fn single_sample_trace_round_trips() {
        let trace = ChannelTrace::new(test_link(), 0.0, 0.04, vec![-33.0]).unwrap();
        let path = tmp_file("single.csv");
        save_trace(&trace, &path, &[]).unwrap();
        let loaded: ChannelTrace<f64> = load_trace(&path, test_link()).unwrap();
        assert_eq!(loaded.samples, vec![-33.0]);
        assert_eq!(loaded.dt, 0.04);
    }

    #[test]
    fn rejects_malformed_rows_with_line_numbers() {
        let path = tmp_file("malformed.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "time_s,gain_db").unwrap();
        writeln!(f, "0.0,-50.0").unwrap();
        writeln!(f, "0.12,not_a_number").unwrap();
        drop(f);
        match load_trace::<f64>(&path, test_link()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_non_uniform_times() {
        let path = tmp_file("nonuniform.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "time_s,gain_db").unwrap();
        writeln!(f, "0.0,-50.0").unwrap();
        writeln!(f, "0.12,-51.0").unwrap();
        writeln!(f, "0.30,-52.0").unwrap();
        drop(f);
        assert!(matches!(
            load_trace::<f64>(&path, test_link()),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn accepts_crlf_and_unknown_metadata() {
        let path = tmp_file("crlf.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        write!(f, "# subject=1\r\n# dt_s=0.12\r\ntime_s,gain_db\r\n0,-50\r\n0.12,-51\r\n").unwrap();
        drop(f);
        let loaded: ChannelTrace<f64> = load_trace(&path, test_link()).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded.dt, 0.12);
    }

    #[test]
    fn missing_header_is_an_error() {
        let path = tmp_file("noheader.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "0.0,-50.0").unwrap();
        drop(f);
        assert!(matches!(
            load_trace::<f64>(&path, test_link()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn split_at_40000_of_100000() {
        // The stable/unstable split scenario: prefix 40000, suffix 60000.
        let samples = vec![-50.0_f64; 100_000];
        let trace = ChannelTrace::new(test_link(), 0.0, 0.015, samples).unwrap();
        let (stable, unstable) = trace.split(40_000).unwrap();
        assert_eq!(stable.len(), 40_000);
        assert_eq!(unstable.len(), 60_000);
        assert!((unstable.t0 - 600.0).abs() < 1e-9);
    }
}
