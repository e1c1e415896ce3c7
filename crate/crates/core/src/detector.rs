//! Energy detection: the test statistic, the threshold decision, and the
//! closed-form false-alarm and detection probabilities.
//!
//! Two unit conventions meet here. The Gaussian-approximation forms
//! ([`pf_gaussian`], [`pd_gaussian`]) describe the per-sample average energy,
//! whose mean under H0 is `σ²`. The exact forms ([`pd_marcum`], [`pf_gamma`],
//! [`pd_rayleigh`]) take the raw, noise-normalized sum with `2u` degrees of
//! freedom. [`DetectorConfig`] carries its threshold in whichever convention
//! its `normalized` flag selects and converts on demand.

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::signal::SampleFrame;
use crate::special::{gaussian_q, gaussian_q_inv, marcum_q, reg_lower_gamma, reg_upper_gamma, Probability};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub n_samples: usize,
    /// Threshold in the units of the configured statistic.
    pub threshold: f64,
    /// `true`: statistic is `(1/N) Σ z²`; `false`: raw `Σ z²`.
    pub normalized: bool,
}

impl DetectorConfig {
    pub fn new(n_samples: usize, threshold: f64, normalized: bool) -> Result<Self> {
        let cfg = DetectorConfig {
            n_samples,
            threshold,
            normalized,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn raw(n_samples: usize, threshold: f64) -> Result<Self> {
        Self::new(n_samples, threshold, false)
    }

    pub fn normalized(n_samples: usize, threshold: f64) -> Result<Self> {
        Self::new(n_samples, threshold, true)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::validation("n_samples", "must be at least 1"));
        }
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(Error::validation("threshold", "must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn with_threshold(self, threshold: f64) -> Self {
        DetectorConfig { threshold, ..self }
    }

    /// Threshold on the raw sum `Σ z²`.
    pub fn threshold_raw(&self) -> f64 {
        if self.normalized {
            self.threshold * self.n_samples as f64
        } else {
            self.threshold
        }
    }

    /// Threshold on the per-sample average `(1/N) Σ z²`.
    pub fn threshold_normalized(&self) -> f64 {
        if self.normalized {
            self.threshold
        } else {
            self.threshold / self.n_samples as f64
        }
    }
}

/// A user's 1-bit local decision and the energy that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalReport {
    pub occupied: bool,
    pub energy: f64,
}

impl LocalReport {
    pub fn bit(&self) -> u8 {
        self.occupied as u8
    }
}

/// Energy of a frame, `Σ z²` or `(1/N) Σ z²` depending on the config.
pub fn energy_statistic(frame: &SampleFrame, config: &DetectorConfig) -> Result<f64> {
    if frame.len() != config.n_samples {
        return Err(Error::domain(format!(
            "frame has {} samples, detector expects {}",
            frame.len(),
            config.n_samples
        )));
    }
    let sum: f64 = frame.samples.iter().map(|z| z * z).sum();
    Ok(if config.normalized {
        sum / config.n_samples as f64
    } else {
        sum
    })
}

/// Strict comparison: energy equal to the threshold reports idle.
pub fn decide(energy: f64, threshold: f64) -> LocalReport {
    LocalReport {
        occupied: energy > threshold,
        energy,
    }
}

fn check_power(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {value}")))
    }
}

/// Gaussian-approximation false-alarm probability,
/// `Q((λ − σ²) / sqrt(2σ⁴/N))` with `λ` the per-sample threshold.
pub fn pf_gaussian(config: &DetectorConfig, noise_power: f64) -> Result<Probability> {
    config.validate()?;
    check_power("noise power", noise_power)?;
    let n = config.n_samples as f64;
    let sd = (2.0 / n).sqrt() * noise_power;
    gaussian_q((config.threshold_normalized() - noise_power) / sd)
}

/// Gaussian-approximation detection probability. The H1 energy is taken as
/// Gaussian with mean `P + σ²` and variance `(2/N)(P + σ²)²`.
pub fn pd_gaussian(config: &DetectorConfig, noise_power: f64, signal_power: f64) -> Result<Probability> {
    config.validate()?;
    check_power("noise power", noise_power)?;
    if !(signal_power >= 0.0 && signal_power.is_finite()) {
        return Err(Error::domain(format!("signal power must be non-negative, got {signal_power}")));
    }
    let n = config.n_samples as f64;
    let total = signal_power + noise_power;
    let sd = (2.0 / n).sqrt() * total;
    gaussian_q((config.threshold_normalized() - total) / sd)
}

/// Detection probability of the Gaussian approximation averaged over an
/// exponentially distributed SNR with mean `mean_snr`.
pub fn pd_gaussian_rayleigh(config: &DetectorConfig, noise_power: f64, mean_snr: f64) -> Result<Probability> {
    config.validate()?;
    check_power("noise power", noise_power)?;
    check_power("mean SNR", mean_snr)?;
    // substitute γ = γ̄ t, density e^{-t}
    let integrand = |t: f64| {
        let p = pd_gaussian(config, noise_power, mean_snr * t * noise_power)
            .map(Probability::get)
            .unwrap_or(0.0);
        p * (-t).exp()
    };
    let head = adaptive_simpson(&integrand, 0.0, 10.0, 1e-11);
    let tail = adaptive_simpson(&integrand, 10.0, 60.0, 1e-12);
    Ok(Probability::clamped(head + tail))
}

/// Minimum sample count meeting `(target_pf, target_pd)` at linear `snr`,
/// `N = 2[Q⁻¹(P_f) − Q⁻¹(P_d)(1 + snr)]² / snr²`, rounded up and floored at 1.
pub fn required_samples(target_pf: Probability, target_pd: Probability, snr: f64) -> Result<usize> {
    check_power("snr", snr)?;
    let qf = gaussian_q_inv(target_pf)?;
    let qd = gaussian_q_inv(target_pd)?;
    let root = qf - qd * (1.0 + snr);
    let n = 2.0 * root * root / (snr * snr);
    Ok((n.ceil() as usize).max(1))
}

/// Per-sample threshold that achieves `target_pf` under the Gaussian
/// approximation with `n_samples` samples.
pub fn implied_threshold(target_pf: Probability, n_samples: usize, noise_power: f64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::domain("n_samples must be at least 1"));
    }
    check_power("noise power", noise_power)?;
    let q = gaussian_q_inv(target_pf)?;
    Ok(noise_power * (1.0 + q * (2.0 / n_samples as f64).sqrt()))
}

fn marcum_order(config: &DetectorConfig) -> Result<u32> {
    u32::try_from(config.n_samples).map_err(|_| Error::domain("n_samples too large for Marcum order"))
}

/// Exact detection probability `Q_N(sqrt(2γ), sqrt(λ))` for a raw,
/// noise-normalized threshold `λ`.
pub fn pd_marcum(config: &DetectorConfig, snr: f64) -> Result<Probability> {
    config.validate()?;
    if !(snr >= 0.0 && snr.is_finite()) {
        return Err(Error::domain(format!("snr must be non-negative, got {snr}")));
    }
    marcum_q(marcum_order(config)?, (2.0 * snr).sqrt(), config.threshold_raw().sqrt())
}

/// Exact false-alarm probability `Γ(u, λ/2) / Γ(u)`.
pub fn pf_gamma(config: &DetectorConfig, u: f64) -> Result<Probability> {
    config.validate()?;
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain(format!("time-bandwidth product must be positive, got {u}")));
    }
    reg_upper_gamma(u, 0.5 * config.threshold_raw())
}

/// Detection probability averaged over Rayleigh fading with mean SNR `γ̄`:
///
/// `e^{-λ/2} Σ_{k=0}^{N-2} (λ/2)^k/k! + ((1+γ̄)/γ̄)^{N-1} [e^{-λ/(2(1+γ̄))} − e^{-λ/2} Σ_{k=0}^{N-2} (λγ̄/(2(1+γ̄)))^k/k!]`
///
/// The first sum is `Q(N−1, λ/2)` and the bracket equals
/// `e^{-λ/(2(1+γ̄))} · P(N−1, λγ̄/(2(1+γ̄)))`, which avoids the cancellation
/// the printed bracket suffers at small `γ̄`.
pub fn pd_rayleigh(config: &DetectorConfig, mean_snr: f64) -> Result<Probability> {
    config.validate()?;
    check_power("mean SNR", mean_snr)?;
    let lambda = config.threshold_raw();
    if lambda == 0.0 {
        return Ok(Probability::ONE);
    }
    let c = lambda / (2.0 * (1.0 + mean_snr));
    if config.n_samples == 1 {
        return Ok(Probability::clamped((-c).exp()));
    }
    let order = (config.n_samples - 1) as f64;
    let d = lambda * mean_snr / (2.0 * (1.0 + mean_snr));
    let first = reg_upper_gamma(order, 0.5 * lambda)?.get();
    let lower = reg_lower_gamma(order, d)?.get();
    let second = if lower > 0.0 {
        (order * ((1.0 + mean_snr) / mean_snr).ln() - c + lower.ln()).exp()
    } else {
        0.0
    };
    Ok(Probability::clamped(first + second))
}
