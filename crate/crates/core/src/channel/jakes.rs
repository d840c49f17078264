//! Sum-of-sinusoids Rayleigh fading synthesizer.
//!
//! The complex envelope is a sum of 128 unit sinusoids whose Doppler shifts
//! come from equally spaced arrival angles on (0, π) — the arcsine density
//! that gives the Jakes autocorrelation J₀(2π·f_D·τ) — with independent
//! seeded random phases. Distinct per-oscillator frequencies keep the
//! time-averaged envelope power at one, and for N = 128 the quadrature sums
//! are Gaussian enough that the envelope is Rayleigh to well inside the
//! tolerances tested downstream.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{ChannelTrace, FadingSpec};
use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::scenario::LinkId;

/// Number of sinusoids in the synthesizer.
pub const NUM_OSCILLATORS: usize = 128;

/// Complex baseband fading taps at `n` instants spaced `dt` apart.
///
/// Returns the in-phase and quadrature components; `|h|² = i² + q²` has unit
/// mean. Exposed so the autocorrelation of the complex envelope can be
/// checked directly against J₀.
pub fn complex_taps<F: Real>(
    doppler_hz: F,
    n: usize,
    dt: F,
    seed: u64,
) -> Result<(Vec<F>, Vec<F>)> {
    if doppler_hz <= F::zero() {
        return Err(Error::param("doppler_hz must be > 0"));
    }
    if dt <= F::zero() {
        return Err(Error::param("dt must be > 0"));
    }
    if n == 0 {
        return Err(Error::param("need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = c::<F>(std::f64::consts::TAU);
    let pi = c::<F>(std::f64::consts::PI);
    let n_osc = c::<F>(NUM_OSCILLATORS as f64);

    // Angular Doppler frequency and phase per oscillator. Angles sit at the
    // midpoints of an even grid on (0, π): distinct cosines, arcsine density.
    let mut omega = Vec::with_capacity(NUM_OSCILLATORS);
    let mut phase = Vec::with_capacity(NUM_OSCILLATORS);
    for k in 0..NUM_OSCILLATORS {
        let angle = pi * (c::<F>(k as f64) + c(0.5)) / n_osc;
        omega.push(tau * doppler_hz * angle.cos());
        phase.push(c::<F>(rng.random::<f64>()) * tau);
    }

    let scale = (F::one() / n_osc).sqrt();
    let mut re = Vec::with_capacity(n);
    let mut im = Vec::with_capacity(n);
    for k in 0..n {
        let t = dt * c(k as f64);
        let mut i_sum = F::zero();
        let mut q_sum = F::zero();
        for (&w, &p) in omega.iter().zip(&phase) {
            let (s, cs) = (w * t + p).sin_cos();
            i_sum += cs;
            q_sum += s;
        }
        re.push(i_sum * scale);
        im.push(q_sum * scale);
    }
    Ok((re, im))
}

/// Zero-mean-normalized Rayleigh power-gain trace in dB.
///
/// The mean linear power is 1 (0 dB) and the complex-envelope
/// autocorrelation follows J₀(2π·f_D·τ). Deterministic per seed.
pub fn small_scale<F: Real>(
    spec: &FadingSpec<F>,
    link_id: LinkId,
    duration: F,
    dt: F,
    seed: u64,
) -> Result<ChannelTrace<F>> {
    spec.validate()?;
    if dt <= F::zero() {
        return Err(Error::param("dt must be > 0"));
    }
    if duration < dt {
        return Err(Error::param("duration must be >= dt"));
    }
    let n = (duration / dt + c(1e-9))
        .floor()
        .to_usize()
        .ok_or_else(|| Error::param("duration too long"))?;
    let (re, im) = complex_taps(spec.doppler_hz, n, dt, seed)?;
    let ten = c::<F>(10.0);
    let samples = re
        .into_iter()
        .zip(im)
        .map(|(i, q)| ten * (i * i + q * q).log10())
        .collect();
    ChannelTrace::new(link_id, F::zero(), dt, samples)
}
