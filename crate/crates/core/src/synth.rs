//! Synthetic channel generation for whole scenarios.
//!
//! On-body links get distance-based path loss from a fixed body geometry
//! plus Rayleigh small-scale fading. Inter-body (interference) links follow
//! the corridor motion: free-space path loss with exponent 2 around a
//! -40 dB reference, the scenario's shadowing offset, and Jakes fading at
//! 2 Hz. Victim-side inter-body links additionally carry the zero-mean
//! shadow component extracted from the victim's own on-body channel,
//! mirroring how unmeasured interference channels are derived from
//! measured ones. Everything is generated at measurement-like rates
//! (15 ms on-body, 40 ms inter-body) and block-averaged down to 120 ms.
//!
//! Reciprocal on-body links share one fading realization; every other link
//! draws an independent seeded realization.

use crate::channel::{overlay, path_loss_db, small_scale, ChannelTrace, FadingSpec};
use crate::error::{Error, Result};
use crate::link::TraceSet;
use crate::scalar::{c, Real};
use crate::scenario::{
    simulate_motion, BodySite, DeviceKind, LinkId, MotionModel, ScenarioConfig,
};
use crate::seed::derive_seed;

/// Generation parameters; the defaults mirror the measurement setup.
#[derive(Debug, Clone, Copy)]
pub struct SynthParams<F> {
    /// On-body fading: slow movement, lossier-than-free-space path loss.
    pub onbody: FadingSpec<F>,
    /// Inter-body fading: open-space model around a -40 dB reference.
    pub interbody: FadingSpec<F>,
    /// On-body generation interval, seconds.
    pub onbody_dt: F,
    /// Inter-body generation interval, seconds.
    pub interbody_dt: F,
    /// Common block-fading interval after down-sampling, seconds.
    pub target_dt: F,
    /// Span every generated trace must cover, seconds.
    pub duration: F,
}

impl<F: Real> Default for SynthParams<F> {
    fn default() -> Self {
        SynthParams {
            onbody: FadingSpec {
                doppler_hz: c(1.0),
                path_loss_exponent: c(3.0),
                shadow_offset_db: c(-40.0),
                reference_gain_db: c(-50.0),
            },
            interbody: FadingSpec {
                doppler_hz: c(2.0),
                path_loss_exponent: c(2.0),
                shadow_offset_db: c(-40.0),
                reference_gain_db: c(-40.0),
            },
            onbody_dt: c(0.015),
            interbody_dt: c(0.040),
            target_dt: c(0.120),
            duration: c(60.0),
        }
    }
}

/// Approximate standing-body coordinates of each sounder site, meters.
pub fn site_position(site: BodySite) -> [f64; 3] {
    match site {
        BodySite::Chest => [0.00, 0.10, 1.25],
        BodySite::LeftHip => [-0.12, 0.00, 0.95],
        BodySite::RightHip => [0.12, 0.00, 0.95],
        BodySite::LeftAnkle => [-0.10, 0.00, 0.10],
        BodySite::RightAnkle => [0.10, 0.00, 0.10],
        BodySite::LeftWrist => [-0.35, 0.05, 0.85],
        BodySite::RightWrist => [0.35, 0.05, 0.85],
        BodySite::LeftUpperArm => [-0.22, 0.00, 1.30],
        BodySite::Head => [0.00, 0.05, 1.65],
        BodySite::Back => [0.00, -0.12, 1.20],
    }
}

/// Euclidean distance between two body sites, meters.
pub fn site_distance_m<F: Real>(a: BodySite, b: BodySite) -> F {
    let pa = site_position(a);
    let pb = site_position(b);
    let sq: f64 = pa.iter().zip(&pb).map(|(x, y)| (x - y) * (x - y)).sum();
    c(sq.sqrt())
}

fn is_intra(link: &LinkId) -> bool {
    link.src.network == link.dst.network
}

/// Generates one on-body trace: path loss by site distance + small-scale
/// fading, down-sampled to the target interval. Reciprocal directions share
/// the same realization.
fn onbody_trace<F: Real>(
    link: LinkId,
    params: &SynthParams<F>,
    master_seed: u64,
) -> Result<ChannelTrace<F>> {
    let (a, b) = if link.src.site <= link.dst.site {
        (link.src.site, link.dst.site)
    } else {
        (link.dst.site, link.src.site)
    };
    let seed = derive_seed(master_seed, &format!("onbody:{}:{}:{}", link.src.network, a, b));
    let pad = params.target_dt * c(2.0);
    let fading = small_scale(&params.onbody, link, params.duration + pad, params.onbody_dt, seed)?;
    let loss = path_loss_db(site_distance_m(link.src.site, link.dst.site), &params.onbody)?;
    let samples = fading.samples.iter().map(|&g| g + loss).collect();
    ChannelTrace::new(link, fading.t0, fading.dt, samples)?.resample(params.target_dt)
}

/// Generates one inter-body trace: motion-driven path loss, the scenario's
/// shadowing offset, independent fading, and the victim-side on-body shadow
/// component when the victim is not the hub.
fn interbody_trace<F: Real>(
    link: LinkId,
    scenario: &ScenarioConfig<F>,
    params: &SynthParams<F>,
    motion: &MotionModel<F>,
    onbody_pool: &TraceSet<F>,
    master_seed: u64,
) -> Result<ChannelTrace<F>> {
    let pad = params.target_dt * c(2.0);
    let span = params.duration + pad;
    let distances = simulate_motion(motion, span, params.interbody_dt)?;
    let spec = params.interbody;
    let offset = spec.shadow_offset_for(scenario.shadowing);
    let large_scale: Vec<F> = distances
        .iter()
        .map(|&d| path_loss_db(d, &spec).map(|g| g + offset))
        .collect::<Result<_>>()?;
    let base = ChannelTrace::new(link, F::zero(), params.interbody_dt, large_scale)?;

    let seed = derive_seed(master_seed, &format!("interbody:{link}"));
    let fading = small_scale(&spec, link, span, params.interbody_dt, seed)?;
    let combined = overlay(&base, &fading)?.resample(params.target_dt)?;

    if link.dst.kind == DeviceKind::Hub {
        return Ok(combined);
    }
    // Victim-side body shadow: overlay the zero-mean slow component of the
    // victim's own channel to the hub.
    let interest = scenario.of_interest();
    let victim_to_hub = LinkId::new(link.dst, interest.hub());
    let onbody = onbody_pool.get(&victim_to_hub).ok_or_else(|| {
        Error::validation(format!("no on-body trace for victim link {victim_to_hub}"))
    })?;
    let window = onbody.coherence_time().unwrap_or(params.target_dt) * c(2.0);
    let shadow = onbody.large_scale(window.max(params.target_dt))?.zero_mean();
    overlay(&combined, &shadow)
}

/// Synthesizes every trace a scenario requires.
pub fn synthesize_traces<F: Real>(
    scenario: &ScenarioConfig<F>,
    params: &SynthParams<F>,
    master_seed: u64,
) -> Result<TraceSet<F>> {
    params.onbody.validate()?;
    params.interbody.validate()?;
    if params.target_dt < params.onbody_dt || params.target_dt < params.interbody_dt {
        return Err(Error::param("target_dt must be >= the generation intervals"));
    }

    let mut traces = TraceSet::new();
    for link in &scenario.required_links {
        if is_intra(link) {
            traces.insert(*link, onbody_trace(*link, params, master_seed)?);
        }
    }
    let needs_motion = scenario.required_links.iter().any(|l| !is_intra(l));
    if needs_motion {
        let motion = scenario.motion.as_ref().ok_or_else(|| {
            Error::validation("synthetic inter-body channels need a motion model")
        })?;
        for link in &scenario.required_links {
            if !is_intra(link) {
                let trace =
                    interbody_trace(*link, scenario, params, motion, &traces, master_seed)?;
                traces.insert(*link, trace);
            }
        }
    }
    Ok(traces)
}
