//! First- and second-order SINR statistics.
//!
//! Outage probability is the empirical CDF of a packet-SINR series at a
//! threshold grid. The level crossing rate counts downward threshold
//! crossings per unit time; the average outage duration is the mean length
//! of below-threshold runs. Both have theoretical counterparts derived from
//! a fitted lognormal or gamma distribution, and the theoretical AOD is the
//! fitted CDF over the theoretical LCR by construction.

pub mod fit;
pub mod special;

pub use fit::{fit_best_distribution, Family, FitOutcome, FittedDistribution, Params};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::link::SinrSeries;
use crate::scalar::{c, db_to_linear, Real};

/// What a threshold curve measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// Probability, in [0, 1].
    Outage,
    /// Crossings per second (Hz).
    Lcr,
    /// Seconds.
    Aod,
}

/// Values evaluated over an ascending dB threshold grid.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdCurve<F> {
    pub kind: CurveKind,
    pub thresholds_db: Vec<F>,
    pub values: Vec<F>,
}

impl<F: Real> ThresholdCurve<F> {
    /// Checks the structural invariants of the curve.
    pub fn validate(&self) -> Result<()> {
        if self.thresholds_db.len() != self.values.len() {
            return Err(Error::validation("threshold/value length mismatch"));
        }
        if self.thresholds_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("thresholds must be strictly ascending"));
        }
        match self.kind {
            CurveKind::Outage => {
                if self
                    .values
                    .iter()
                    .any(|&v| v < F::zero() || v > F::one())
                {
                    return Err(Error::validation("outage values must lie in [0, 1]"));
                }
                if self.values.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::validation("outage values must be non-decreasing"));
                }
            }
            CurveKind::Lcr | CurveKind::Aod => {
                if self.values.iter().any(|&v| v < F::zero()) {
                    return Err(Error::validation("rates and durations must be >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Builds an ascending threshold grid `[start, start+step, ..] <= stop`.
pub fn threshold_grid<F: Real>(start_db: F, stop_db: F, step_db: F) -> Result<Vec<F>> {
    if step_db <= F::zero() || stop_db < start_db {
        return Err(Error::param("threshold grid needs step > 0 and stop >= start"));
    }
    let n = ((stop_db - start_db) / step_db)
        .to_usize()
        .ok_or_else(|| Error::param("threshold grid too large"))?;
    Ok((0..=n).map(|k| start_db + step_db * c(k as f64)).collect())
}

/// Empirical outage probability Pr(ν < ν_th) at each threshold.
pub fn outage_probability<F: Real>(
    series: &SinrSeries<F>,
    thresholds_db: &[F],
) -> Result<ThresholdCurve<F>> {
    if series.values.is_empty() {
        return Err(Error::param("outage probability of an empty series"));
    }
    let mut sorted = series.values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite SINR values"));
    let n = c::<F>(sorted.len() as f64);
    let values = thresholds_db
        .iter()
        .map(|&th| {
            // Count of samples strictly below the threshold.
            let idx = sorted.partition_point(|&v| v < th);
            c::<F>(idx as f64) / n
        })
        .collect();
    let curve = ThresholdCurve {
        kind: CurveKind::Outage,
        thresholds_db: thresholds_db.to_vec(),
        values,
    };
    curve.validate()?;
    Ok(curve)
}

/// Indices i with value(i-1) >= threshold and value(i) < threshold.
fn downward_crossings<F: Real>(values: &[F], threshold_db: F) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0] >= threshold_db && w[1] < threshold_db)
        .map(|(i, _)| i + 1)
        .collect()
}

/// Empirical level crossing rate at a threshold, in Hz.
///
/// With n >= 2 crossings the rate is n over the span between the first and
/// last crossing; with fewer it degrades to n over the total observation
/// time, which keeps the zero- and one-crossing cases finite.
pub fn empirical_lcr<F: Real>(series: &SinrSeries<F>, threshold_db: F) -> Result<F> {
    if series.values.len() < 2 {
        return Err(Error::param("LCR needs at least two samples"));
    }
    let crossings = downward_crossings(&series.values, threshold_db);
    let n = c::<F>(crossings.len() as f64);
    if crossings.len() >= 2 {
        let first = c::<F>(crossings[0] as f64) * series.dt_packet;
        let last = c::<F>(*crossings.last().unwrap() as f64) * series.dt_packet;
        Ok(n / (last - first))
    } else {
        let total = c::<F>(series.values.len() as f64) * series.dt_packet;
        Ok(n / total)
    }
}

/// Empirical average outage duration at a threshold, in seconds.
pub fn empirical_aod<F: Real>(series: &SinrSeries<F>, threshold_db: F) -> Result<F> {
    if series.values.is_empty() {
        return Err(Error::param("AOD of an empty series"));
    }
    let mut runs = 0usize;
    let mut below_samples = 0usize;
    let mut in_run = false;
    for &v in &series.values {
        if v < threshold_db {
            below_samples += 1;
            if !in_run {
                runs += 1;
                in_run = true;
            }
        } else {
            in_run = false;
        }
    }
    if runs == 0 {
        return Ok(F::zero());
    }
    Ok(c::<F>(below_samples as f64) * series.dt_packet / c(runs as f64))
}

/// Evaluates an empirical curve operation across a grid.
pub fn lcr_curve<F: Real>(series: &SinrSeries<F>, thresholds_db: &[F]) -> Result<ThresholdCurve<F>> {
    let values = thresholds_db
        .iter()
        .map(|&th| empirical_lcr(series, th))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve { kind: CurveKind::Lcr, thresholds_db: thresholds_db.to_vec(), values })
}

/// Evaluates the empirical AOD across a grid.
pub fn aod_curve<F: Real>(series: &SinrSeries<F>, thresholds_db: &[F]) -> Result<ThresholdCurve<F>> {
    let values = thresholds_db
        .iter()
        .map(|&th| empirical_aod(series, th))
        .collect::<Result<Vec<_>>>()?;
    Ok(ThresholdCurve { kind: CurveKind::Aod, thresholds_db: thresholds_db.to_vec(), values })
}

/// Theoretical level crossing rate of a fitted distribution, in Hz.
///
/// Lognormal: `f_D·exp(-(ln ν - μ)²/(2σ²))`.
/// Gamma: `f_D·√(2π)·ν^(a-1/2) / (Γ(a)·b^(a-1/2)) · exp(-ν/b)`.
/// The threshold is converted to linear scale before evaluation; other
/// families have no closed form here and are rejected.
pub fn theoretical_lcr<F: Real>(
    dist: &FittedDistribution<F>,
    threshold_db: F,
    doppler_hz: F,
) -> Result<F> {
    let nu = db_to_linear(threshold_db);
    if nu <= F::zero() {
        return Err(Error::param("theoretical LCR needs a finite threshold"));
    }
    match dist.params {
        Params::Lognormal { mu, sigma } => {
            let z = nu.ln() - mu;
            Ok(doppler_hz * (-(z * z) / (c::<F>(2.0) * sigma * sigma)).exp())
        }
        Params::Gamma { shape, scale } => {
            let half = c::<F>(0.5);
            let ln_rate = doppler_hz.ln()
                + half * c::<F>(std::f64::consts::TAU).ln()
                + (shape - half) * (nu.ln() - scale.ln())
                - special::ln_gamma(shape)
                - nu / scale;
            Ok(ln_rate.exp())
        }
        _ => Err(Error::UnsupportedFamily(dist.family().name().to_string())),
    }
}

/// Theoretical average outage duration: fitted CDF over theoretical LCR.
pub fn theoretical_aod<F: Real>(
    dist: &FittedDistribution<F>,
    threshold_db: F,
    doppler_hz: F,
) -> Result<F> {
    let lcr = theoretical_lcr(dist, threshold_db, doppler_hz)?;
    if lcr <= F::zero() {
        return Err(Error::Undefined(format!(
            "theoretical LCR is zero at {threshold_db} dB"
        )));
    }
    let cdf = dist.cdf(db_to_linear(threshold_db))?;
    Ok(cdf / lcr)
}

/// Pearson cross-correlation coefficient between two equal-length series.
pub fn cross_correlation<F: Real>(xs: &[F], ys: &[F]) -> Result<F> {
    if xs.len() != ys.len() {
        return Err(Error::param("cross-correlation needs equal lengths"));
    }
    if xs.len() < 2 {
        return Err(Error::param("cross-correlation needs at least two samples"));
    }
    let n = c::<F>(xs.len() as f64);
    let mean_x = xs.iter().cloned().sum::<F>() / n;
    let mean_y = ys.iter().cloned().sum::<F>() / n;
    let mut cov = F::zero();
    let mut var_x = F::zero();
    let mut var_y = F::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x <= F::zero() || var_y <= F::zero() {
        return Err(Error::degenerate("cross-correlation of a constant series"));
    }
    Ok(cov / (var_x.sqrt() * var_y.sqrt()))
}

/// Result of the joint-vs-marginal histogram comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IndependenceScore<F> {
    /// Total-variation distance between the joint histogram and the product
    /// of the marginals, in [0, 1]. Small values support independence.
    pub tv_distance: F,
    /// Set when the sample is too small for the binning (n < bins²).
    pub undersampled: bool,
    pub bins: usize,
}

/// Compares the empirical joint distribution of two series against the
/// product of their marginals on a `bins`×`bins` grid.
pub fn independence_check<F: Real>(
    xs: &[F],
    ys: &[F],
    bins: usize,
) -> Result<IndependenceScore<F>> {
    if xs.len() != ys.len() {
        return Err(Error::param("independence check needs equal lengths"));
    }
    if bins < 2 {
        return Err(Error::param("independence check needs at least 2 bins per axis"));
    }
    if xs.is_empty() {
        return Err(Error::param("independence check of empty series"));
    }
    let bin_index = |v: F, lo: F, hi: F| -> Result<usize> {
        if hi <= lo {
            return Err(Error::degenerate("independence check: constant axis"));
        }
        let frac = (v - lo) / (hi - lo);
        let idx = (frac * c(bins as f64)).to_usize().unwrap_or(0);
        Ok(idx.min(bins - 1))
    };
    let (min_x, max_x) = min_max(xs);
    let (min_y, max_y) = min_max(ys);

    let mut joint = vec![0u64; bins * bins];
    for (&x, &y) in xs.iter().zip(ys) {
        let i = bin_index(x, min_x, max_x)?;
        let j = bin_index(y, min_y, max_y)?;
        joint[i * bins + j] += 1;
    }
    let n = c::<F>(xs.len() as f64);
    let mut marg_x = vec![F::zero(); bins];
    let mut marg_y = vec![F::zero(); bins];
    for i in 0..bins {
        for j in 0..bins {
            let f = c::<F>(joint[i * bins + j] as f64) / n;
            marg_x[i] += f;
            marg_y[j] += f;
        }
    }
    let mut tv = F::zero();
    for i in 0..bins {
        for j in 0..bins {
            let f = c::<F>(joint[i * bins + j] as f64) / n;
            tv += (f - marg_x[i] * marg_y[j]).abs();
        }
    }
    Ok(IndependenceScore {
        tv_distance: tv / c(2.0),
        undersampled: xs.len() < bins * bins,
        bins,
    })
}

fn min_max<F: Real>(xs: &[F]) -> (F, F) {
    let mut lo = F::infinity();
    let mut hi = F::neg_infinity();
    for &x in xs {
        if x < lo {
            lo = x;
        }
        if x > hi {
            hi = x;
        }
    }
    (lo, hi)
}

/// Writes a curve as CSV: `# key=value` metadata, then `threshold_db,value`.
pub fn write_curve_csv<F: Real, W: std::io::Write>(
    curve: &ThresholdCurve<F>,
    extra_metadata: &[(String, String)],
    mut out: W,
) -> Result<()> {
    let kind = match curve.kind {
        CurveKind::Outage => "outage",
        CurveKind::Lcr => "lcr",
        CurveKind::Aod => "aod",
    };
    writeln!(out, "# kind={kind}")?;
    for (key, value) in extra_metadata {
        writeln!(out, "# {key}={value}")?;
    }
    writeln!(out, "threshold_db,value")?;
    for (&th, &v) in curve.thresholds_db.iter().zip(&curve.values) {
        writeln!(out, "{th},{v}")?;
    }
    Ok(())
}

/// Reads a curve written by [`write_curve_csv`].
pub fn read_curve_csv<F: Real>(path: &std::path::Path) -> Result<ThresholdCurve<F>> {
    use std::io::BufRead;
    let file = std::fs::File::open(path)?;
    let mut kind: Option<CurveKind> = None;
    let mut header_seen = false;
    let mut thresholds = Vec::new();
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
                if key.trim() == "kind" {
                    kind = Some(match value.trim() {
                        "outage" => CurveKind::Outage,
                        "lcr" => CurveKind::Lcr,
                        "aod" => CurveKind::Aod,
                        other => {
                            return Err(Error::Parse {
                                line: line_no,
                                message: format!("unknown curve kind: {other}"),
                            })
                        }
                    });
                }
            }
            continue;
        }
        if !header_seen {
            if line != "threshold_db,value" {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected header 'threshold_db,value', found '{line}'"),
                });
            }
            header_seen = true;
            continue;
        }
        let (th_str, v_str) = line.split_once(',').ok_or_else(|| Error::Parse {
            line: line_no,
            message: "expected 'threshold,value' row".into(),
        })?;
        let th: f64 = th_str.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad threshold: {th_str}"),
        })?;
        let v: f64 = v_str.trim().parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("bad value: {v_str}"),
        })?;
        thresholds.push(c(th));
        values.push(c(v));
    }
    let kind = kind.ok_or_else(|| Error::Parse {
        line: 1,
        message: "missing '# kind=' metadata".into(),
    })?;
    let curve = ThresholdCurve { kind, thresholds_db: thresholds, values };
    curve.validate()?;
    Ok(curve)
}
