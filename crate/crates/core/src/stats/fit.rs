//! Maximum-likelihood distribution fitting over six families.
//!
//! Families and parametrizations follow the usual conventions: normal
//! (mean, std dev), lognormal (log-mean, log-std dev), gamma (shape, scale),
//! Weibull (shape, scale), Nakagami-m (shape m, spread w = E[X²]), Rayleigh
//! (scale). Normal, lognormal, and Rayleigh have closed-form ML estimates;
//! gamma and Weibull use damped Newton on the profiled likelihood
//! (tolerance 1e-8, at most 200 iterations); Nakagami-m reduces to the gamma
//! shape equation on the squared samples with a Greenwood–Durand start.
//!
//! Model selection ranks by negative log-likelihood. Because Rayleigh is
//! nested inside both Weibull (k = 2) and Nakagami (m = 1), a raw NLL
//! minimum can never land on it; a one-parameter family therefore receives
//! a 0.5·ln(n) slack per parameter saved when ranked against richer
//! families. Families with equal parameter counts are still ordered by raw
//! NLL alone.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::stats::special::{digamma, ln_gamma, reg_lower_gamma, std_normal_cdf, trigamma};

const NEWTON_TOL: f64 = 1e-8;
const NEWTON_MAX_ITER: usize = 200;

/// The six candidate distribution families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Normal,
    Lognormal,
    Gamma,
    Weibull,
    NakagamiM,
    Rayleigh,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Normal,
        Family::Lognormal,
        Family::Gamma,
        Family::Weibull,
        Family::NakagamiM,
        Family::Rayleigh,
    ];

    /// Number of free parameters.
    pub fn param_count(self) -> usize {
        match self {
            Family::Rayleigh => 1,
            _ => 2,
        }
    }

    /// True when the family's support is the positive half-line.
    pub fn requires_positive(self) -> bool {
        !matches!(self, Family::Normal)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Normal => "normal",
            Family::Lognormal => "lognormal",
            Family::Gamma => "gamma",
            Family::Weibull => "weibull",
            Family::NakagamiM => "nakagami_m",
            Family::Rayleigh => "rayleigh",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Family-specific parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Params<F> {
    Normal { mean: F, std_dev: F },
    Lognormal { mu: F, sigma: F },
    Gamma { shape: F, scale: F },
    Weibull { shape: F, scale: F },
    NakagamiM { m: F, spread: F },
    Rayleigh { scale: F },
}

impl<F: Real> Params<F> {
    pub fn family(&self) -> Family {
        match self {
            Params::Normal { .. } => Family::Normal,
            Params::Lognormal { .. } => Family::Lognormal,
            Params::Gamma { .. } => Family::Gamma,
            Params::Weibull { .. } => Family::Weibull,
            Params::NakagamiM { .. } => Family::NakagamiM,
            Params::Rayleigh { .. } => Family::Rayleigh,
        }
    }
}

/// A fitted family with its ML parameters and negative log-likelihood.
#[derive(Debug, Clone, Serialize)]
pub struct FittedDistribution<F> {
    pub params: Params<F>,
    pub nll: F,
    pub n: usize,
}

impl<F: Real> FittedDistribution<F> {
    pub fn family(&self) -> Family {
        self.params.family()
    }

    /// Exact CDF of the fitted family at a linear-domain point.
    pub fn cdf(&self, x: F) -> Result<F> {
        let zero = F::zero();
        match self.params {
            Params::Normal { mean, std_dev } => Ok(std_normal_cdf((x - mean) / std_dev)),
            Params::Lognormal { mu, sigma } => {
                if x <= zero {
                    Ok(zero)
                } else {
                    Ok(std_normal_cdf((x.ln() - mu) / sigma))
                }
            }
            Params::Gamma { shape, scale } => {
                if x <= zero {
                    Ok(zero)
                } else {
                    reg_lower_gamma(shape, x / scale)
                }
            }
            Params::Weibull { shape, scale } => {
                if x <= zero {
                    Ok(zero)
                } else {
                    Ok(F::one() - (-(x / scale).powf(shape)).exp())
                }
            }
            Params::NakagamiM { m, spread } => {
                if x <= zero {
                    Ok(zero)
                } else {
                    reg_lower_gamma(m, m * x * x / spread)
                }
            }
            Params::Rayleigh { scale } => {
                if x <= zero {
                    Ok(zero)
                } else {
                    Ok(F::one() - (-(x * x) / (c::<F>(2.0) * scale * scale)).exp())
                }
            }
        }
    }
}

/// Result of fitting a sample against several families.
#[derive(Debug, Clone, Serialize)]
pub struct FitOutcome<F> {
    /// Selected family (minimum NLL with the nested-family slack).
    pub best: FittedDistribution<F>,
    /// Every family that was fitted, in request order.
    pub candidates: Vec<FittedDistribution<F>>,
    /// Families skipped because the sample leaves their support
    /// (or the solver failed to converge).
    pub skipped: Vec<Family>,
}

struct SampleStats<F> {
    n: usize,
    sum: F,
    sum_sq: F,
    sum_ln: F,
    sum_ln_sq: F,
    min: F,
}

fn sample_stats<F: Real>(samples: &[F]) -> SampleStats<F> {
    let mut sum = F::zero();
    let mut sum_sq = F::zero();
    let mut sum_ln = F::zero();
    let mut sum_ln_sq = F::zero();
    let mut min = F::infinity();
    for &x in samples {
        sum += x;
        sum_sq += x * x;
        if x > F::zero() {
            let lx = x.ln();
            sum_ln += lx;
            sum_ln_sq += lx * lx;
        }
        if x < min {
            min = x;
        }
    }
    SampleStats { n: samples.len(), sum, sum_sq, sum_ln, sum_ln_sq, min }
}

/// ML-fit every requested family and return the selected one.
///
/// Preconditions: at least 30 finite samples with non-zero variance.
/// Positive-support families are skipped (and noted in the outcome) when any
/// sample is non-positive.
pub fn fit_best_distribution<F: Real>(
    samples: &[F],
    families: &[Family],
) -> Result<FitOutcome<F>> {
    if samples.len() < 30 {
        return Err(Error::param(format!(
            "distribution fit needs at least 30 samples, got {}",
            samples.len()
        )));
    }
    if families.is_empty() {
        return Err(Error::param("no families requested"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::param("samples must all be finite"));
    }
    let stats = sample_stats(samples);
    let n = c::<F>(stats.n as f64);
    let mean = stats.sum / n;
    let var = stats.sum_sq / n - mean * mean;
    if var <= F::zero() {
        return Err(Error::degenerate("zero sample variance"));
    }

    let mut candidates = Vec::new();
    let mut skipped = Vec::new();
    for &family in families {
        if family.requires_positive() && stats.min <= F::zero() {
            skipped.push(family);
            continue;
        }
        match fit_family(family, samples, &stats) {
            Ok(fit) => candidates.push(fit),
            Err(_) => skipped.push(family),
        }
    }
    if candidates.is_empty() {
        return Err(Error::validation(
            "no requested family is fittable on this sample",
        ));
    }

    // NLL plus 0.5·ln(n) per parameter; identical-arity families keep their
    // raw NLL order, nested one-parameter families get the slack they need
    // to beat their own supersets on their own data.
    let slack = c::<F>(0.5) * n.ln();
    let mut best_idx = 0;
    let mut best_score = F::infinity();
    for (i, cand) in candidates.iter().enumerate() {
        let score = cand.nll + slack * c(cand.family().param_count() as f64);
        if score < best_score {
            best_score = score;
            best_idx = i;
        }
    }
    Ok(FitOutcome { best: candidates[best_idx].clone(), candidates, skipped })
}

fn fit_family<F: Real>(
    family: Family,
    samples: &[F],
    stats: &SampleStats<F>,
) -> Result<FittedDistribution<F>> {
    match family {
        Family::Normal => Ok(fit_normal(stats)),
        Family::Lognormal => Ok(fit_lognormal(stats)),
        Family::Gamma => fit_gamma(stats),
        Family::Weibull => fit_weibull(samples, stats),
        Family::NakagamiM => fit_nakagami(stats),
        Family::Rayleigh => Ok(fit_rayleigh(stats)),
    }
}

fn fit_normal<F: Real>(s: &SampleStats<F>) -> FittedDistribution<F> {
    let n = c::<F>(s.n as f64);
    let mean = s.sum / n;
    let var = s.sum_sq / n - mean * mean;
    let two_pi = c::<F>(std::f64::consts::TAU);
    let nll = c::<F>(0.5) * n * ((two_pi * var).ln() + F::one());
    FittedDistribution {
        params: Params::Normal { mean, std_dev: var.sqrt() },
        nll,
        n: s.n,
    }
}

fn fit_lognormal<F: Real>(s: &SampleStats<F>) -> FittedDistribution<F> {
    let n = c::<F>(s.n as f64);
    let mu = s.sum_ln / n;
    let var = s.sum_ln_sq / n - mu * mu;
    let two_pi = c::<F>(std::f64::consts::TAU);
    let nll = s.sum_ln + c::<F>(0.5) * n * ((two_pi * var).ln() + F::one());
    FittedDistribution {
        params: Params::Lognormal { mu, sigma: var.sqrt() },
        nll,
        n: s.n,
    }
}

/// Solves ln a − ψ(a) = delta via damped Newton, the gamma profiled-ML
/// shape equation. Also used for Nakagami m on squared samples.
fn solve_gamma_shape<F: Real>(delta: F) -> Result<F> {
    if delta <= F::zero() {
        return Err(Error::degenerate("gamma shape equation: non-positive delta"));
    }
    // Greenwood–Durand style starting point.
    let three = c::<F>(3.0);
    let mut a = (three - delta + ((delta - three) * (delta - three) + c::<F>(24.0) * delta).sqrt())
        / (c::<F>(12.0) * delta);
    if !a.is_finite() || a <= F::zero() {
        a = F::one();
    }
    let tol = c::<F>(NEWTON_TOL);
    for _ in 0..NEWTON_MAX_ITER {
        let f = a.ln() - digamma(a) - delta;
        let fp = F::one() / a - trigamma(a);
        let mut step = f / fp;
        // Damp steps that would leave the domain.
        while a - step <= F::zero() {
            step = step / c(2.0);
        }
        a = a - step;
        if step.abs() <= tol * a.abs().max(F::one()) {
            return Ok(a);
        }
    }
    Err(Error::degenerate("gamma shape equation did not converge"))
}

fn fit_gamma<F: Real>(s: &SampleStats<F>) -> Result<FittedDistribution<F>> {
    let n = c::<F>(s.n as f64);
    let mean = s.sum / n;
    let mean_ln = s.sum_ln / n;
    let delta = mean.ln() - mean_ln;
    let shape = solve_gamma_shape(delta)?;
    let scale = mean / shape;
    let nll = n * (shape * scale.ln() + ln_gamma(shape)) - (shape - F::one()) * s.sum_ln
        + s.sum / scale;
    Ok(FittedDistribution { params: Params::Gamma { shape, scale }, nll, n: s.n })
}

fn fit_weibull<F: Real>(samples: &[F], s: &SampleStats<F>) -> Result<FittedDistribution<F>> {
    let n = c::<F>(s.n as f64);
    let mean_ln = s.sum_ln / n;
    let var_ln = s.sum_ln_sq / n - mean_ln * mean_ln;
    if var_ln <= F::zero() {
        return Err(Error::degenerate("weibull fit: zero log-variance"));
    }
    // Method-of-moments start from the log-sample: var(ln X) = π²/(6k²).
    let mut k = c::<F>(std::f64::consts::PI) / (c::<F>(6.0).sqrt() * var_ln.sqrt());
    let log_xs: Vec<F> = samples.iter().map(|x| x.ln()).collect();
    let max_lx = log_xs.iter().cloned().fold(F::neg_infinity(), F::max);

    let tol = c::<F>(NEWTON_TOL);
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        // Weighted moments of ln x under weights x^k, computed shift-safely.
        let mut w_sum = F::zero();
        let mut w_lx = F::zero();
        let mut w_lx2 = F::zero();
        for &lx in &log_xs {
            let w = (k * (lx - max_lx)).exp();
            w_sum += w;
            w_lx += w * lx;
            w_lx2 += w * lx * lx;
        }
        let m1 = w_lx / w_sum;
        let m2 = w_lx2 / w_sum;
        let f = m1 - F::one() / k - mean_ln;
        let fp = (m2 - m1 * m1) + F::one() / (k * k);
        let mut step = f / fp;
        while k - step <= F::zero() {
            step = step / c(2.0);
        }
        k = k - step;
        if step.abs() <= tol * k.abs().max(F::one()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::degenerate("weibull shape equation did not converge"));
    }

    let mut w_sum = F::zero();
    for &lx in &log_xs {
        w_sum += (k * (lx - max_lx)).exp();
    }
    // λ^k = Σ x^k / n, assembled in log space.
    let ln_lambda = (k * max_lx + (w_sum / n).ln()) / k;
    let scale = ln_lambda.exp();
    let sum_pow = (k * (max_lx - ln_lambda)).exp() * w_sum;
    let nll = -n * k.ln() + n * k * ln_lambda - (k - F::one()) * s.sum_ln + sum_pow;
    Ok(FittedDistribution { params: Params::Weibull { shape: k, scale }, nll, n: s.n })
}

fn fit_nakagami<F: Real>(s: &SampleStats<F>) -> Result<FittedDistribution<F>> {
    let n = c::<F>(s.n as f64);
    let spread = s.sum_sq / n;
    // X² ~ Gamma(m, w/m): same shape equation on the squared samples.
    let delta = spread.ln() - c::<F>(2.0) * s.sum_ln / n;
    let m = solve_gamma_shape(delta)?.max(c(0.5));
    let nll = -n * (c::<F>(2.0).ln() + m * (m / spread).ln() - ln_gamma(m))
        - (c::<F>(2.0) * m - F::one()) * s.sum_ln
        + (m / spread) * s.sum_sq;
    Ok(FittedDistribution { params: Params::NakagamiM { m, spread }, nll, n: s.n })
}

fn fit_rayleigh<F: Real>(s: &SampleStats<F>) -> FittedDistribution<F> {
    let n = c::<F>(s.n as f64);
    let scale_sq = s.sum_sq / (c::<F>(2.0) * n);
    let scale = scale_sq.sqrt();
    let nll = -s.sum_ln + n * scale_sq.ln() + s.sum_sq / (c::<F>(2.0) * scale_sq);
    FittedDistribution { params: Params::Rayleigh { scale }, nll, n: s.n }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
        assert!(
            (got - want).abs() <= tol * want.abs().max(1.0),
            "{what}: got {got}, want {want}"
        );
    }

    #[test]
    fn normal_closed_form() {
        let samples = [1.0_f64, 2.0, 3.0, 4.0];
        let stats = sample_stats(&samples);
        let fit = fit_normal(&stats);
        match fit.params {
            Params::Normal { mean, std_dev } => {
                assert_close(mean, 2.5, 1e-12, "mean");
                assert_close(std_dev, (1.25_f64).sqrt(), 1e-12, "std_dev");
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn lognormal_scale_shift() {
        // Fitting c·x shifts mu by ln c and leaves sigma unchanged.
        let base: Vec<f64> = (1..=200).map(|i| (i as f64 / 20.0).exp()).collect();
        let scaled: Vec<f64> = base.iter().map(|x| 3.0 * x).collect();
        let f1 = fit_best_distribution(&base, &[Family::Lognormal]).unwrap().best;
        let f2 = fit_best_distribution(&scaled, &[Family::Lognormal]).unwrap().best;
        match (f1.params, f2.params) {
            (Params::Lognormal { mu: m1, sigma: s1 }, Params::Lognormal { mu: m2, sigma: s2 }) => {
                assert_close(m2 - m1, 3.0_f64.ln(), 1e-10, "mu shift");
                assert_close(s2, s1, 1e-10, "sigma unchanged");
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn constant_samples_are_degenerate() {
        let samples = vec![2.0_f64; 100];
        let err = fit_best_distribution(&samples, &Family::ALL).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
    }

    #[test]
    fn too_few_samples_rejected() {
        let samples = vec![1.0_f64, 2.0];
        assert!(fit_best_distribution(&samples, &Family::ALL).is_err());
    }

    #[test]
    fn non_positive_samples_skip_positive_families() {
        let mut samples: Vec<f64> = (0..100).map(|i| i as f64 / 10.0 - 2.0).collect();
        samples.push(5.0);
        let outcome = fit_best_distribution(&samples, &Family::ALL).unwrap();
        assert_eq!(outcome.best.family(), Family::Normal);
        assert_eq!(outcome.skipped.len(), 5);
        assert!(outcome.skipped.contains(&Family::Lognormal));
    }

    #[test]
    fn gamma_cdf_exponential_special_case() {
        // Gamma with shape 1 is exponential: F(x) = 1 - exp(-x/b).
        let fit = FittedDistribution {
            params: Params::Gamma { shape: 1.0_f64, scale: 2.5 },
            nll: 0.0,
            n: 0,
        };
        for &x in &[0.1, 1.0, 5.0, 20.0] {
            let want = 1.0 - (-x / 2.5_f64).exp();
            assert_close(fit.cdf(x).unwrap(), want, 1e-12, "exp cdf");
        }
    }

    #[test]
    fn lognormal_median() {
        let fit = FittedDistribution {
            params: Params::Lognormal { mu: 2.1292_f64, sigma: 0.6879 },
            nll: 0.0,
            n: 0,
        };
        let med = (2.1292_f64).exp();
        assert_close(fit.cdf(med).unwrap(), 0.5, 1e-12, "median");
    }

    #[test]
    fn cdf_monotone_and_bounded() {
        let fits = [
            Params::Normal { mean: 1.0_f64, std_dev: 2.0 },
            Params::Lognormal { mu: 0.5, sigma: 0.7 },
            Params::Gamma { shape: 2.2, scale: 1.3 },
            Params::Weibull { shape: 1.7, scale: 2.0 },
            Params::NakagamiM { m: 1.3618, spread: 254.5702 },
            Params::Rayleigh { scale: 3.0 },
        ];
        for params in fits {
            let fit = FittedDistribution { params, nll: 0.0, n: 0 };
            let mut prev = -1.0;
            for i in 0..200 {
                let x = -5.0 + i as f64 * 0.5;
                let v = fit.cdf(x).unwrap();
                assert!((0.0..=1.0).contains(&v), "{params:?} cdf out of range at {x}");
                assert!(v >= prev - 1e-15, "{params:?} cdf not monotone at {x}");
                prev = v;
            }
            assert!(fit.cdf(1e9).unwrap() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn nakagami_cdf_quadrature_oracle() {
        // Simpson integration of the Nakagami pdf, written out independently.
        let (m, w) = (1.3618_f64, 254.5702);
        let pdf = |x: f64| {
            2.0 * (m / w).powf(m) * x.powf(2.0 * m - 1.0) * (-m * x * x / w).exp()
                / (ln_gamma(m)).exp()
        };
        let upper = w.sqrt();
        let n_panels = 20_000;
        let h = upper / n_panels as f64;
        let mut integral = pdf(0.0) + pdf(upper);
        for i in 1..n_panels {
            let x = i as f64 * h;
            integral += if i % 2 == 1 { 4.0 * pdf(x) } else { 2.0 * pdf(x) };
        }
        integral *= h / 3.0;
        let fit = FittedDistribution {
            params: Params::NakagamiM { m, spread: w },
            nll: 0.0,
            n: 0,
        };
        let got = fit.cdf(upper).unwrap();
        assert!(
            (got - integral).abs() < 1e-6,
            "nakagami cdf {got} vs quadrature {integral}"
        );
    }
}
