//! Sample-frame generation for the two sensing hypotheses.
//!
//! Noise and signal are both real zero-mean Gaussians, so the energy of an
//! `N`-sample frame is an exactly scaled chi-square variable. Randomness comes
//! from [`SeededRng`], a ChaCha8 stream cipher keyed by a 64-bit seed and
//! addressed by a 64-bit stream id, so every trial can own an independent
//! stream without sharing state.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};

/// Deterministic counter-based generator.
///
/// `(seed, stream)` fully determines the output sequence.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::for_stream(seed, 0)
    }

    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.inner.get_stream()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn standard_exponential(&mut self) -> f64 {
        Exp1.sample(&mut self.inner)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// Noise only, channel idle.
    H0,
    /// Primary signal present.
    H1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleFrame {
    pub samples: Vec<f64>,
    pub hypothesis: Hypothesis,
}

impl SampleFrame {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Adds `other` sample-wise. The result is H1 if either operand is.
    pub fn superpose(&self, other: &SampleFrame) -> Result<SampleFrame> {
        if self.len() != other.len() {
            return Err(Error::domain(format!(
                "cannot superpose frames of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        let hypothesis = if self.hypothesis == Hypothesis::H1 || other.hypothesis == Hypothesis::H1 {
            Hypothesis::H1
        } else {
            Hypothesis::H0
        };
        Ok(SampleFrame {
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            hypothesis,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    Constant,
    /// Per-trial SNR drawn from an exponential law with the given linear mean.
    Rayleigh { mean_snr: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub snr_db: f64,
    pub noise_power: f64,
    pub fading: Fading,
}

impl ChannelSpec {
    pub fn new(snr_db: f64, noise_power: f64, fading: Fading) -> Result<Self> {
        let spec = ChannelSpec {
            snr_db,
            noise_power,
            fading,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn constant(snr_db: f64, noise_power: f64) -> Result<Self> {
        Self::new(snr_db, noise_power, Fading::Constant)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_power > 0.0 && self.noise_power.is_finite()) {
            return Err(Error::validation("noise_power", "must be positive and finite"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::validation("snr_db", "must be finite"));
        }
        if let Fading::Rayleigh { mean_snr } = self.fading {
            if !(mean_snr > 0.0 && mean_snr.is_finite()) {
                return Err(Error::validation("mean_snr", "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Linear SNR. For Rayleigh channels this is the mean SNR.
    pub fn snr_linear(&self) -> f64 {
        match self.fading {
            Fading::Constant => 10f64.powf(self.snr_db / 10.0),
            Fading::Rayleigh { mean_snr } => mean_snr,
        }
    }

    /// Average signal power `P = σ² · snr`.
    pub fn signal_power(&self) -> f64 {
        self.noise_power * self.snr_linear()
    }
}

fn gaussian_frame(n: usize, power: f64, hypothesis: Hypothesis, rng: &mut SeededRng) -> SampleFrame {
    let sd = power.sqrt();
    SampleFrame {
        samples: (0..n).map(|_| sd * rng.standard_normal()).collect(),
        hypothesis,
    }
}

/// `n` i.i.d. zero-mean Gaussian samples of variance `noise_power`, tagged H0.
pub fn generate_noise(n: usize, noise_power: f64, rng: &mut SeededRng) -> Result<SampleFrame> {
    if n == 0 {
        return Err(Error::domain("frame length must be at least 1"));
    }
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(Error::domain(format!("noise power must be positive, got {noise_power}")));
    }
    Ok(gaussian_frame(n, noise_power, Hypothesis::H0, rng))
}

/// Gaussian signal of power `signal_power` plus independent noise, tagged H1.
pub fn generate_signal_plus_noise(
    n: usize,
    signal_power: f64,
    noise_power: f64,
    rng: &mut SeededRng,
) -> Result<SampleFrame> {
    if !(signal_power > 0.0 && signal_power.is_finite()) {
        return Err(Error::domain(format!("signal power must be positive, got {signal_power}")));
    }
    let noise = generate_noise(n, noise_power, rng)?;
    let signal = gaussian_frame(n, signal_power, Hypothesis::H1, rng);
    signal.superpose(&noise)
}

/// Pure signal component (no noise) used when a trial reuses its H0 noise.
pub(crate) fn generate_signal(n: usize, signal_power: f64, rng: &mut SeededRng) -> SampleFrame {
    gaussian_frame(n, signal_power, Hypothesis::H1, rng)
}

/// One draw of the instantaneous SNR under Rayleigh fading, `γ ~ Exp(mean γ̄)`.
pub fn sample_rayleigh_snr(mean_snr: f64, rng: &mut SeededRng) -> Result<f64> {
    if !(mean_snr > 0.0 && mean_snr.is_finite()) {
        return Err(Error::domain(format!("mean SNR must be positive, got {mean_snr}")));
    }
    Ok(mean_snr * rng.standard_exponential())
}
