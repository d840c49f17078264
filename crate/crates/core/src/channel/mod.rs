//! Link-gain traces and their transforms.
//!
//! A [`ChannelTrace`] is a uniformly sampled time series of power gain in
//! dB, tagged with the link it describes. Gains stay in dB everywhere;
//! conversion to linear power happens only inside SINR arithmetic. The
//! transforms here cover the measurement-processing chain: shadowing
//! offsets, block-mean down-sampling, coherence time, large-scale (shadow)
//! extraction, and overlaying an inter-body channel with the shadowed
//! component of an on-body channel.

pub mod io;
pub mod jakes;

pub use io::{load_trace, save_trace, trace_metadata};
pub use jakes::small_scale;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::scenario::{LinkId, ShadowingLevel};

/// Fading and large-scale parameters of a channel model.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FadingSpec<F> {
    /// Doppler frequency of the small-scale process, Hz.
    pub doppler_hz: F,
    /// Path-loss exponent (2 for an open environment).
    pub path_loss_exponent: F,
    /// Full-shadowing offset, dB (non-positive).
    pub shadow_offset_db: F,
    /// Gain at the 1 m reference distance, dB.
    pub reference_gain_db: F,
}

impl<F: Real> Default for FadingSpec<F> {
    fn default() -> Self {
        FadingSpec {
            doppler_hz: c(2.0),
            path_loss_exponent: c(2.0),
            shadow_offset_db: c(-40.0),
            reference_gain_db: F::zero(),
        }
    }
}

impl<F: Real> FadingSpec<F> {
    pub fn validate(&self) -> Result<()> {
        if self.doppler_hz <= F::zero() {
            return Err(Error::param("doppler_hz must be > 0"));
        }
        if self.path_loss_exponent < F::zero() {
            return Err(Error::param("path_loss_exponent must be >= 0"));
        }
        if self.shadow_offset_db > F::zero() {
            return Err(Error::param("shadow_offset_db must be <= 0"));
        }
        Ok(())
    }

    /// Offset applied for a shadowing level: nothing, half, or the full
    /// offset. The half-offset reading of "partial" is a modeling choice;
    /// swap it here if better data ever pins it down.
    pub fn shadow_offset_for(&self, level: ShadowingLevel) -> F {
        match level {
            ShadowingLevel::None => F::zero(),
            ShadowingLevel::Partial => self.shadow_offset_db / c(2.0),
            ShadowingLevel::Full => self.shadow_offset_db,
        }
    }
}

/// Uniformly sampled link power gain in dB.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelTrace<F> {
    pub link_id: LinkId,
    /// Time of the first sample, seconds.
    pub t0: F,
    /// Sampling interval, seconds (> 0).
    pub dt: F,
    /// Gain samples, dB; sample k sits at `t0 + k·dt`.
    pub samples: Vec<F>,
}

impl<F: Real> ChannelTrace<F> {
    pub fn new(link_id: LinkId, t0: F, dt: F, samples: Vec<F>) -> Result<Self> {
        if dt <= F::zero() {
            return Err(Error::param("trace dt must be > 0"));
        }
        if samples.is_empty() {
            return Err(Error::param("trace must have at least one sample"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::param("trace samples must be finite"));
        }
        Ok(ChannelTrace { link_id, t0, dt, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Time just past the last sample's block.
    pub fn end_time(&self) -> F {
        self.t0 + self.dt * c(self.samples.len() as f64)
    }

    /// True when instant `t` falls inside some sample's block.
    pub fn covers(&self, t: F) -> bool {
        t >= self.t0 && t < self.end_time()
    }

    /// Block-fading lookup: the gain of the sample whose block contains `t`.
    pub fn gain_at(&self, t: F) -> Result<F> {
        let pos = (t - self.t0) / self.dt;
        // Forgive sub-nanosecond drift at the first boundary.
        let pos = if pos < F::zero() && pos > c(-1e-9) { F::zero() } else { pos };
        let idx = pos
            .floor()
            .to_usize()
            .filter(|&i| i < self.samples.len() && pos >= F::zero())
            .ok_or_else(|| {
                Error::validation(format!(
                    "trace for {} does not cover t = {t} s",
                    self.link_id
                ))
            })?;
        Ok(self.samples[idx])
    }

    /// Adds the shadowing offset of `level` to every sample.
    pub fn with_shadowing(&self, level: ShadowingLevel, spec: &FadingSpec<F>) -> ChannelTrace<F> {
        let offset = spec.shadow_offset_for(level);
        let samples = self.samples.iter().map(|&s| s + offset).collect();
        ChannelTrace { link_id: self.link_id, t0: self.t0, dt: self.dt, samples }
    }

    /// Block-mean down-sampling to `target_dt`, in the dB domain; a trailing
    /// partial block is dropped.
    pub fn resample(&self, target_dt: F) -> Result<ChannelTrace<F>> {
        if target_dt < self.dt {
            return Err(Error::param(format!(
                "resample target_dt {target_dt} is below trace dt {}",
                self.dt
            )));
        }
        if target_dt == self.dt {
            return Ok(self.clone());
        }
        let span = self.dt * c(self.samples.len() as f64);
        let n_out = (span / target_dt + c(1e-9))
            .floor()
            .to_usize()
            .ok_or_else(|| Error::param("resample target produces no samples"))?;
        if n_out == 0 {
            return Err(Error::param("trace shorter than one output block"));
        }
        let mut sums = vec![F::zero(); n_out];
        let mut counts = vec![0usize; n_out];
        let half = self.dt / c(2.0);
        for (k, &s) in self.samples.iter().enumerate() {
            // Assign each input sample by its block midpoint.
            let mid = self.dt * c(k as f64) + half;
            let j = (mid / target_dt).floor().to_usize().unwrap_or(usize::MAX);
            if j < n_out {
                sums[j] += s;
                counts[j] += 1;
            }
        }
        let samples = sums
            .into_iter()
            .zip(counts)
            .map(|(sum, count)| sum / c(count.max(1) as f64))
            .collect();
        ChannelTrace::new(self.link_id, self.t0, target_dt, samples)
    }

    /// The smallest lag at which the autocorrelation coefficient of the dB
    /// samples drops below 0.7, in seconds.
    pub fn coherence_time(&self) -> Result<F> {
        let n = self.samples.len();
        if n < 3 {
            return Err(Error::param("coherence time needs at least 3 samples"));
        }
        let mean = self.samples.iter().cloned().sum::<F>() / c(n as f64);
        let denom: F = self.samples.iter().map(|&x| (x - mean) * (x - mean)).sum();
        if denom <= F::zero() {
            return Err(Error::degenerate("coherence time of a constant trace"));
        }
        let threshold = c::<F>(0.7);
        for lag in 1..n {
            let mut num = F::zero();
            for i in 0..n - lag {
                num += (self.samples[i] - mean) * (self.samples[i + lag] - mean);
            }
            if num / denom < threshold {
                return Ok(self.dt * c(lag as f64));
            }
        }
        Err(Error::degenerate(
            "autocorrelation never drops below 0.7 within the trace",
        ))
    }

    /// Centered moving average over `window` seconds, same length as the
    /// input; windows shrink at the edges instead of fabricating data.
    pub fn large_scale(&self, window: F) -> Result<ChannelTrace<F>> {
        if window < self.dt {
            return Err(Error::param("large-scale window must be >= dt"));
        }
        let w = (window / self.dt)
            .round()
            .to_usize()
            .ok_or_else(|| Error::param("large-scale window too long"))?
            .max(1);
        let lo = (w - 1) / 2;
        let hi = w / 2;
        let n = self.samples.len();
        let samples = (0..n)
            .map(|i| {
                let a = i.saturating_sub(lo);
                let b = (i + hi).min(n - 1);
                let sum: F = self.samples[a..=b].iter().cloned().sum();
                sum / c((b - a + 1) as f64)
            })
            .collect();
        ChannelTrace::new(self.link_id, self.t0, self.dt, samples)
    }

    /// Splits at a sample index: prefix `[0, idx)` keeps `t0`, suffix
    /// `[idx, end)` starts at `t0 + idx·dt`.
    pub fn split(&self, idx: usize) -> Result<(ChannelTrace<F>, ChannelTrace<F>)> {
        if idx == 0 || idx >= self.samples.len() {
            return Err(Error::param(format!(
                "split index {idx} outside (0, {})",
                self.samples.len()
            )));
        }
        let prefix = ChannelTrace {
            link_id: self.link_id,
            t0: self.t0,
            dt: self.dt,
            samples: self.samples[..idx].to_vec(),
        };
        let suffix = ChannelTrace {
            link_id: self.link_id,
            t0: self.t0 + self.dt * c(idx as f64),
            dt: self.dt,
            samples: self.samples[idx..].to_vec(),
        };
        Ok((prefix, suffix))
    }

    /// Subtracts the trace mean from every sample, leaving the zero-mean
    /// variation. Used to isolate a shadow component before overlaying.
    pub fn zero_mean(&self) -> ChannelTrace<F> {
        let mean = self.samples.iter().cloned().sum::<F>() / c(self.samples.len() as f64);
        let samples = self.samples.iter().map(|&s| s - mean).collect();
        ChannelTrace { link_id: self.link_id, t0: self.t0, dt: self.dt, samples }
    }
}

/// Free-space style path loss: `reference_gain_db − 10·n·log10(d / 1 m)`.
pub fn path_loss_db<F: Real>(distance_m: F, spec: &FadingSpec<F>) -> Result<F> {
    if distance_m <= F::zero() {
        return Err(Error::param("path loss distance must be > 0"));
    }
    Ok(spec.reference_gain_db - c::<F>(10.0) * spec.path_loss_exponent * distance_m.log10())
}

/// Element-wise dB sum of two traces over their overlapping support.
///
/// Both traces must share `dt` and sit on the same time grid; the caller
/// resamples first if they do not.
pub fn overlay<F: Real>(
    interbody: &ChannelTrace<F>,
    onbody_shadow: &ChannelTrace<F>,
) -> Result<ChannelTrace<F>> {
    let dt = interbody.dt;
    let rel = ((onbody_shadow.dt - dt) / dt).abs();
    if rel > c(1e-9) {
        return Err(Error::param(format!(
            "overlay dt mismatch: {} vs {} (resample first)",
            dt, onbody_shadow.dt
        )));
    }
    let shift = (onbody_shadow.t0 - interbody.t0) / dt;
    let shift_rounded = shift.round();
    if (shift - shift_rounded).abs() > c(1e-6) {
        return Err(Error::param("overlay traces are not grid-aligned"));
    }
    let shift = shift_rounded.to_isize().ok_or_else(|| Error::param("overlay offset too large"))?;
    let a_start = shift.max(0) as usize;
    let b_start = (-shift).max(0) as usize;
    if a_start >= interbody.len() || b_start >= onbody_shadow.len() {
        return Err(Error::param("overlay traces have no overlapping support"));
    }
    let count = (interbody.len() - a_start).min(onbody_shadow.len() - b_start);
    let samples = (0..count)
        .map(|k| interbody.samples[a_start + k] + onbody_shadow.samples[b_start + k])
        .collect();
    ChannelTrace::new(
        interbody.link_id,
        interbody.t0 + dt * c(a_start as f64),
        dt,
        samples,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{BodySite, DeviceKind, NodeId};

    fn test_link() -> LinkId {
        LinkId::new(
            NodeId::new(1, DeviceKind::Sensor, BodySite::LeftWrist),
            NodeId::new(1, DeviceKind::Hub, BodySite::Chest),
        )
    }

    fn trace(samples: Vec<f64>, dt: f64) -> ChannelTrace<f64> {
        ChannelTrace::new(test_link(), 0.0, dt, samples).unwrap()
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(ChannelTrace::new(test_link(), 0.0, 0.0, vec![1.0]).is_err());
        assert!(ChannelTrace::<f64>::new(test_link(), 0.0, 1.0, vec![]).is_err());
        assert!(ChannelTrace::new(test_link(), 0.0, 1.0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn path_loss_reference_points() {
        let spec = FadingSpec::<f64>::default();
        assert_eq!(path_loss_db(1.0, &spec).unwrap(), 0.0);
        // Doubling the distance with exponent 2 costs 20·log10(2) dB.
        let d1 = path_loss_db(2.0, &spec).unwrap();
        assert!((d1 + 6.0205999132796240).abs() < 1e-12);
        let spec40 = FadingSpec { reference_gain_db: -40.0, ..spec };
        let d3 = path_loss_db(3.0, &spec40).unwrap();
        assert!((d3 + 49.542425094393249).abs() < 1e-12);
        assert!(path_loss_db(0.0, &spec).is_err());
    }

    #[test]
    fn path_loss_strictly_decreasing() {
        let spec = FadingSpec::<f64>::default();
        let mut prev = f64::INFINITY;
        for k in 1..100 {
            let g = path_loss_db(k as f64 * 0.25, &spec).unwrap();
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn shadowing_levels() {
        let spec = FadingSpec::<f64>::default();
        let t = trace(vec![-50.0, -60.0], 1.0);
        let full = t.with_shadowing(ShadowingLevel::Full, &spec);
        assert_eq!(full.samples, vec![-90.0, -100.0]);
        let none = t.with_shadowing(ShadowingLevel::None, &spec);
        assert_eq!(none.samples, t.samples);
        let partial = t.with_shadowing(ShadowingLevel::Partial, &spec);
        assert_eq!(partial.samples, vec![-70.0, -80.0]);
    }

    #[test]
    fn shadow_then_unshadow_recovers() {
        let spec = FadingSpec::<f64>::default();
        let t = trace(vec![-50.0, -63.25, -41.5], 1.0);
        let back: Vec<f64> = t
            .with_shadowing(ShadowingLevel::Full, &spec)
            .samples
            .iter()
            .map(|s| s - spec.shadow_offset_db)
            .collect();
        for (a, b) in back.iter().zip(&t.samples) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn resample_block_mean() {
        let t = trace(vec![-10.0, -20.0], 1.0);
        let out = t.resample(2.0).unwrap();
        assert_eq!(out.samples, vec![-15.0]);
        assert_eq!(out.dt, 2.0);
    }

    #[test]
    fn resample_identity_and_idempotence() {
        let t = trace((0..16).map(|k| -(k as f64)).collect(), 0.015);
        assert_eq!(t.resample(0.015).unwrap(), t);
        let once = t.resample(0.12).unwrap();
        // 15 ms -> 120 ms means 8 input samples per output sample.
        assert_eq!(once.len(), 2);
        let twice = once.resample(0.12).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn resample_drops_partial_block() {
        let t = trace(vec![0.0, -2.0, -4.0, -6.0, -8.0], 1.0);
        let out = t.resample(2.0).unwrap();
        assert_eq!(out.samples, vec![-1.0, -5.0]);
        assert!(t.resample(0.5).is_err());
    }

    #[test]
    fn coherence_time_white_noise() {
        // A fixed pseudo-random sequence decorrelates at lag 1.
        let mut state = 0x243F_6A88_85A3_08D3u64;
        let samples: Vec<f64> = (0..4000)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as f64) / (1u64 << 31) as f64 - 0.5
            })
            .collect();
        let t = trace(samples, 0.25);
        assert_eq!(t.coherence_time().unwrap(), 0.25);
    }

    #[test]
    fn coherence_time_ar1_oracle() {
        // AR(1) with coefficient 0.95 decorrelates below 0.7 near lag
        // ceil(ln 0.7 / ln 0.95) = 7; brute-force autocorrelation of a long
        // generated sequence pins the expected lag.
        let rho = 0.95_f64;
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        let mut next_uniform = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (1u64 << 31) as f64 - 0.5
        };
        let n = 400_000;
        let mut x = 0.0;
        let samples: Vec<f64> = (0..n)
            .map(|_| {
                x = rho * x + next_uniform();
                x
            })
            .collect();

        // Independent oracle: direct autocorrelation scan.
        let mean = samples.iter().sum::<f64>() / n as f64;
        let denom: f64 = samples.iter().map(|v| (v - mean).powi(2)).sum();
        let mut oracle_lag = 0;
        for lag in 1..50 {
            let num: f64 = (0..n - lag).map(|i| (samples[i] - mean) * (samples[i + lag] - mean)).sum();
            if num / denom < 0.7 {
                oracle_lag = lag;
                break;
            }
        }
        assert_eq!(oracle_lag, 7, "AR(1) oracle lag");

        let t = trace(samples, 1.0);
        assert_eq!(t.coherence_time().unwrap(), oracle_lag as f64);
    }

    #[test]
    fn coherence_time_errors() {
        let constant = trace(vec![-5.0; 100], 1.0);
        assert!(matches!(constant.coherence_time(), Err(Error::DegenerateInput(_))));
        let short = trace(vec![1.0, 2.0], 1.0);
        assert!(short.coherence_time().is_err());
    }

    #[test]
    fn large_scale_fixtures() {
        let t = trace(vec![0.0, -10.0, 0.0], 1.0);
        let out = t.large_scale(3.0).unwrap();
        assert!((out.samples[1] + 10.0 / 3.0).abs() < 1e-12);
        // Edges use truncated windows.
        assert!((out.samples[0] + 5.0).abs() < 1e-12);

        let constant = trace(vec![-7.0; 10], 1.0);
        assert_eq!(constant.large_scale(4.0).unwrap().samples, vec![-7.0; 10]);
        assert_eq!(t.large_scale(1.0).unwrap().samples, t.samples);
        assert!(t.large_scale(0.5).is_err());
    }

    #[test]
    fn overlay_fixtures() {
        let a = trace(vec![-60.0, -62.0, -64.0], 1.0);
        let zeros = trace(vec![0.0, 0.0, 0.0], 1.0);
        assert_eq!(overlay(&a, &zeros).unwrap().samples, a.samples);

        let shadow = trace(vec![-15.0, -15.0, -15.0], 1.0);
        assert_eq!(overlay(&a, &shadow).unwrap().samples, vec![-75.0, -77.0, -79.0]);

        // Length mismatch: output is the overlap.
        let long = trace(vec![-1.0; 5], 1.0);
        assert_eq!(overlay(&a, &long).unwrap().len(), 3);
        assert_eq!(overlay(&long, &a).unwrap().len(), 3);

        let coarse = trace(vec![-1.0; 3], 2.0);
        assert!(overlay(&a, &coarse).is_err());
    }

    #[test]
    fn overlay_commutes_exactly() {
        let a = trace(vec![-60.25, -61.5, -59.125, -63.0], 0.12);
        let b = trace(vec![-3.5, 2.25, -1.125, 0.5], 0.12);
        let ab = overlay(&a, &b).unwrap();
        let ba = overlay(&b, &a).unwrap();
        assert_eq!(ab.samples, ba.samples);
    }

    #[test]
    fn overlay_with_offset_support() {
        let a = ChannelTrace::new(test_link(), 0.0, 1.0, vec![-60.0, -61.0, -62.0, -63.0]).unwrap();
        let b = ChannelTrace::new(test_link(), 2.0, 1.0, vec![-1.0, -2.0, -3.0]).unwrap();
        let out = overlay(&a, &b).unwrap();
        assert_eq!(out.t0, 2.0);
        assert_eq!(out.samples, vec![-63.0, -65.0]);
        let disjoint = ChannelTrace::new(test_link(), 10.0, 1.0, vec![-1.0]).unwrap();
        assert!(overlay(&a, &disjoint).is_err());
    }

    #[test]
    fn split_fixtures() {
        let t = trace((0..10).map(|k| k as f64).collect(), 0.5);
        let (prefix, suffix) = t.split(4).unwrap();
        assert_eq!(prefix.len(), 4);
        assert_eq!(suffix.len(), 6);
        assert_eq!(suffix.t0, 2.0);
        assert_eq!(suffix.samples[0], 4.0);

        let (one, _) = t.split(1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(t.split(0).is_err());
        assert!(t.split(10).is_err());
    }

    #[test]
    fn gain_lookup_block_fading() {
        let t = trace(vec![-10.0, -20.0, -30.0], 0.5);
        assert_eq!(t.gain_at(0.0).unwrap(), -10.0);
        assert_eq!(t.gain_at(0.49).unwrap(), -10.0);
        assert_eq!(t.gain_at(0.5).unwrap(), -20.0);
        assert_eq!(t.gain_at(1.49).unwrap(), -30.0);
        assert!(t.gain_at(1.5).is_err());
        assert!(t.gain_at(-0.1).is_err());
    }
}
