//! Estimation and testing for the θ-families: method-of-moments and maximum
//! likelihood for both, the normal-approximation reliability factor of the
//! tpoisson MOM estimator, and the most-powerful test between two tgeometric
//! parameters. Estimators take plain slices so data can come from a
//! [`crate::sample::SampleBatch`], a file, or a foreign caller alike.

use std::collections::BTreeMap;
use std::f64::consts::E;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::law::TelescopingLaw;
use crate::sample::{derive_seed, sample};

/// Batches simulated under the null when a critical value is calibrated by
/// Monte Carlo.
pub const NP_CALIBRATION_REPLICATES: usize = 100_000;

/// Grid resolution for the numerical tpoisson likelihood scan.
const MLE_GRID_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mom,
    MleClosed,
    MleNumeric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub theta_hat: f64,
    pub method: Method,
    /// True when a domain boundary bound the estimate (only the tpoisson
    /// MOM estimator can clamp, at θ̂ = 1).
    pub clamped: bool,
    pub sample_mean: f64,
}

/// Method-of-moments estimate for the tpoisson family: θ̂ = ln(x̄ + 1),
/// clamped to 1 when the log reaches it.
pub fn mom_tpoisson(values: &[u64]) -> Result<EstimationResult> {
    let mean = sample_mean(values)?;
    let raw = (mean + 1.0).ln();
    let clamped = raw >= 1.0;
    Ok(EstimationResult {
        theta_hat: if clamped { 1.0 } else { raw },
        method: Method::Mom,
        clamped,
        sample_mean: mean,
    })
}

/// Maximum-likelihood estimate for the tpoisson family by direct search:
/// a 200-point scan over (0, 1] followed by golden-section refinement of
/// the bracketing interval, down to width `tol`. No unimodality assumption;
/// the grid guards against stray local maxima.
pub fn mle_tpoisson_numeric(values: &[u64], tol: f64) -> Result<EstimationResult> {
    let mean = sample_mean(values)?;
    if !(tol > 0.0) {
        return Err(Error::ParameterOutOfRange {
            what: "tol",
            value: tol,
            requirement: "tol > 0",
        });
    }

    // the likelihood only sees the frequency table, so fold duplicates once
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for &x in values {
        *counts.entry(x).or_insert(0) += 1;
    }
    let terms: Vec<(f64, f64, f64)> = counts
        .into_iter()
        .map(|(x, c)| (x as f64, (x + 1) as f64, c as f64))
        .collect();
    let log_lik = |theta: f64| -> f64 {
        terms
            .iter()
            .map(|&(x, succ, c)| {
                c * (x * theta.ln() + (1.0 - theta / succ).ln() - ln_gamma(x + 1.0))
            })
            .sum()
    };

    let grid = |j: usize| j as f64 / MLE_GRID_POINTS as f64;
    let mut best_j = 1;
    let mut best_ll = f64::NEG_INFINITY;
    for j in 1..=MLE_GRID_POINTS {
        let ll = log_lik(grid(j));
        if ll > best_ll {
            best_ll = ll;
            best_j = j;
        }
    }
    let lo = grid(best_j.max(2) - 1);
    let hi = grid((best_j + 1).min(MLE_GRID_POINTS));
    let (theta_hat, refined_ll) = golden_section_max(&log_lik, lo, hi, tol);
    let theta_hat = if refined_ll >= best_ll {
        theta_hat
    } else {
        grid(best_j)
    };

    Ok(EstimationResult {
        theta_hat,
        method: Method::MleNumeric,
        clamped: false,
        sample_mean: mean,
    })
}

/// Maximum-likelihood estimate for the tgeometric family, in closed form:
/// θ̂ = 1 + 2/(x̄ − 1). An all-ones batch has no interior maximum (the
/// likelihood grows without bound in θ) and is refused as degenerate.
pub fn mle_tgeometric(values: &[u64]) -> Result<EstimationResult> {
    tgeometric_estimate(values, Method::MleClosed)
}

/// Method-of-moments estimate for the tgeometric family. The moment
/// equation inverts to the same closed form as the likelihood score, so
/// this agrees with [`mle_tgeometric`] bit for bit; only the tag differs.
pub fn mom_tgeometric(values: &[u64]) -> Result<EstimationResult> {
    tgeometric_estimate(values, Method::Mom)
}

fn tgeometric_estimate(values: &[u64], method: Method) -> Result<EstimationResult> {
    let mean = sample_mean(values)?;
    check_tgeometric_support(values)?;
    if mean == 1.0 {
        return Err(Error::DegenerateSample(
            "every observation is 1, so the likelihood increases without bound as theta grows"
                .into(),
        ));
    }
    Ok(EstimationResult {
        theta_hat: 1.0 + 2.0 / (mean - 1.0),
        method,
        clamped: false,
        sample_mean: mean,
    })
}

/// Log-likelihood of a tgeometric batch: 2n·ln(θ−1) + Σln xᵢ − (n+Σxᵢ)·ln θ.
pub fn log_likelihood_tgeometric(values: &[u64], theta: f64) -> Result<f64> {
    let n = values.len() as f64;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    check_tgeometric_support(values)?;
    if !(theta > 1.0) {
        return Err(Error::ParameterOutOfRange {
            what: "theta",
            value: theta,
            requirement: "theta > 1",
        });
    }
    let total: f64 = values.iter().map(|&x| x as f64).sum();
    let log_product: f64 = values.iter().map(|&x| (x as f64).ln()).sum();
    Ok(2.0 * n * (theta - 1.0).ln() + log_product - (n + total) * theta.ln())
}

/// The reliability factor k_θ = (e − e^θ)/(e^{θ/2}·√(2θ+1−e^θ)) of the
/// tpoisson MOM estimator: √n·k_θ is the normal deviate of the event that
/// the estimate stays unclamped. Positive everywhere on 0 < θ < 1, falling
/// to 0 as θ → 1.
pub fn k_theta(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::ParameterOutOfRange {
            what: "theta",
            value: theta,
            requirement: "0 < theta < 1",
        });
    }
    let variance_factor = 2.0 * theta + 1.0 - theta.exp();
    debug_assert!(variance_factor > 0.0);
    Ok((E - theta.exp()) / ((theta / 2.0).exp() * variance_factor.sqrt()))
}

/// Probability that the tpoisson MOM estimate of θ stays below its clamp
/// after n observations, by the normal approximation: Φ(√n·k_θ).
pub fn mom_coverage_probability(theta: f64, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::EmptySample);
    }
    Ok(normal_cdf((n as f64).sqrt() * k_theta(theta)?))
}

/// The same probability by simulation: the fraction of `replicates`
/// batches of size n under tpoisson(θ) whose mean stays below e − 1.
pub fn mom_coverage_monte_carlo(theta: f64, n: usize, replicates: usize, seed: u64) -> Result<f64> {
    if replicates < 1 {
        return Err(Error::ParameterOutOfRange {
            what: "replicates",
            value: replicates as f64,
            requirement: "replicates >= 1",
        });
    }
    let law = TelescopingLaw::tpoisson(theta)?;
    if !(theta < 1.0) {
        return Err(Error::ParameterOutOfRange {
            what: "theta",
            value: theta,
            requirement: "0 < theta < 1",
        });
    }
    let mut hits = 0usize;
    for r in 0..replicates {
        let batch = sample(law, derive_seed(seed, r as u64), n)?;
        if batch.mean() < E - 1.0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / replicates as f64)
}

/// Standard normal CDF via the Abramowitz–Stegun 26.2.17 rational tail
/// approximation; absolute error below 7.5e−8 everywhere.
pub fn normal_cdf(x: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    if x < 0.0 {
        return 1.0 - normal_cdf(-x);
    }
    const P: f64 = 0.231_641_9;
    const B: [f64; 5] = [
        0.319_381_530,
        -0.356_563_782,
        1.781_477_937,
        -1.821_255_978,
        1.330_274_429,
    ];
    let t = 1.0 / (1.0 + P * x);
    let poly = t * (B[0] + t * (B[1] + t * (B[2] + t * (B[3] + t * B[4]))));
    let density = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    1.0 - density * poly
}

/// Standard normal quantile by bisection on [`normal_cdf`]; inherits its
/// absolute error, which is ample for critical values.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidLevel(p));
    }
    let (mut lo, mut hi) = (-12.0f64, 12.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calibration {
    MonteCarlo,
    Clt,
}

/// A calibrated rejection threshold for the tgeometric mean test. Bound to
/// the sample size it was calibrated for; apply it to many batches of that
/// size without paying for recalibration.
#[derive(Debug, Clone, PartialEq)]
pub struct NpThreshold {
    pub theta0: f64,
    pub theta1: f64,
    pub alpha: f64,
    pub sample_size: usize,
    pub critical_value: f64,
    pub calibration: Calibration,
    /// Root seed of the simulated null batches; absent under CLT.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NpTestResult {
    pub reject: bool,
    pub statistic: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub calibration: Calibration,
}

/// Calibrates the critical value c with P(X̄ < c | θ₀) ≈ α. The likelihood
/// ratio against any θ₁ > θ₀ is decreasing in Σxᵢ, so the most powerful
/// test rejects for small means and only c depends on the calibration.
///
/// Monte Carlo draws [`NP_CALIBRATION_REPLICATES`] null batches and picks
/// the empirical threshold whose rejection rate lands nearest α; CLT uses
/// c = μ₀ + z_α·σ₀/√n from the closed-form null moments.
pub fn np_threshold_tgeometric(
    sample_size: usize,
    theta0: f64,
    theta1: f64,
    alpha: f64,
    calibration: Calibration,
    seed: u64,
) -> Result<NpThreshold> {
    np_threshold_tgeometric_with_replicates(
        sample_size,
        theta0,
        theta1,
        alpha,
        calibration,
        seed,
        NP_CALIBRATION_REPLICATES,
    )
}

pub fn np_threshold_tgeometric_with_replicates(
    sample_size: usize,
    theta0: f64,
    theta1: f64,
    alpha: f64,
    calibration: Calibration,
    seed: u64,
    replicates: usize,
) -> Result<NpThreshold> {
    if !(theta0 > 1.0 && theta1 > theta0) {
        return Err(Error::HypothesisOrder { theta0, theta1 });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidLevel(alpha));
    }
    if sample_size < 1 {
        return Err(Error::EmptySample);
    }
    let null = TelescopingLaw::tgeometric(theta0)?;
    let (critical_value, seed) = match calibration {
        Calibration::Clt => {
            let mu = null.mean().finite().expect("tgeometric mean is finite");
            let sd = null.variance().finite().expect("finite").sqrt();
            let z = normal_quantile(alpha)?;
            (mu + z * sd / (sample_size as f64).sqrt(), None)
        }
        Calibration::MonteCarlo => {
            if replicates < 1 {
                return Err(Error::ParameterOutOfRange {
                    what: "replicates",
                    value: replicates as f64,
                    requirement: "replicates >= 1",
                });
            }
            let mut means: Vec<f64> = (0..replicates)
                .map(|r| Ok(sample(null, derive_seed(seed, r as u64), sample_size)?.mean()))
                .collect::<Result<_>>()?;
            means.sort_unstable_by(f64::total_cmp);
            // at c = means[i] (i the first index of its run) the rejection
            // rate is exactly i/replicates; scan runs for the closest hit
            let mut best_c = means[0];
            let mut best_gap = alpha;
            let mut i = 0;
            while i < means.len() {
                let rate = i as f64 / replicates as f64;
                let gap = (rate - alpha).abs();
                if gap < best_gap {
                    best_gap = gap;
                    best_c = means[i];
                }
                let run = means[i];
                while i < means.len() && means[i] == run {
                    i += 1;
                }
            }
            (best_c, Some(seed))
        }
    };
    Ok(NpThreshold {
        theta0,
        theta1,
        alpha,
        sample_size,
        critical_value,
        calibration,
        seed,
    })
}

impl NpThreshold {
    /// Runs the test on one batch of the calibrated size.
    pub fn apply(&self, values: &[u64]) -> Result<NpTestResult> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if values.len() != self.sample_size {
            return Err(Error::SampleSizeMismatch {
                expected: self.sample_size,
                actual: values.len(),
            });
        }
        check_tgeometric_support(values)?;
        let statistic = values.iter().map(|&x| x as f64).sum::<f64>() / values.len() as f64;
        Ok(NpTestResult {
            reject: statistic < self.critical_value,
            statistic,
            critical_value: self.critical_value,
            alpha: self.alpha,
            calibration: self.calibration,
        })
    }
}

/// Calibrate-and-apply in one call, for a single batch.
pub fn np_test_tgeometric(
    values: &[u64],
    theta0: f64,
    theta1: f64,
    alpha: f64,
    calibration: Calibration,
    seed: u64,
) -> Result<NpTestResult> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    np_threshold_tgeometric(values.len(), theta0, theta1, alpha, calibration, seed)?.apply(values)
}

fn sample_mean(values: &[u64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(values.iter().map(|&x| x as f64).sum::<f64>() / values.len() as f64)
}

fn check_tgeometric_support(values: &[u64]) -> Result<()> {
    match values.iter().find(|&&x| x < 1) {
        Some(&x) => Err(Error::SampleBelowSupport { x, start: 1 }),
        None => Ok(()),
    }
}

/// Golden-section maximization on [lo, hi], returning the best point seen.
/// The interval shrinks by the golden ratio each step, so the loop always
/// terminates for tol > 0.
fn golden_section_max(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
            if fd > best.1 {
                best = (d, fd);
            }
        }
        iterations += 1;
    }
    best
}
