//! Cooperative spectrum sensing.
//!
//! Single-user energy detection with closed-form false-alarm and detection
//! probabilities, hard-decision fusion (AND, OR, K-of-N), sequential
//! probability ratio fusion under report-falsifying users, a reputation
//! counter, and a Monte Carlo harness that sweeps detection thresholds and
//! emits ROC tables.
//!
//! ```
//! use coopsense::{fused_probability, pd_gaussian, pf_gaussian, DetectorConfig, FusionRule};
//!
//! // 100 samples, raw-sum threshold 460, noise power 4, SNR -8 dB
//! let cfg = DetectorConfig::raw(100, 460.0).unwrap();
//! let signal = 4.0 * 10f64.powf(-0.8);
//! let pf = pf_gaussian(&cfg, 4.0).unwrap();
//! let pd = pd_gaussian(&cfg, 4.0, signal).unwrap();
//! assert!(pd > pf);
//!
//! let fused = fused_probability(&[pd; 3], FusionRule::Or).unwrap();
//! assert!(fused > pd);
//! ```
//!
//! The `book/` directory next to this crate explains the model chapter by
//! chapter; its code listings are compiled and run as doc-tests.

pub mod cli;
pub mod config;
pub mod detector;
pub mod error;
pub mod fusion;
pub mod montecarlo;
mod quad;
pub mod report;
pub mod signal;
pub mod special;

pub use config::{parse_config, Mode, RunConfig};
pub use detector::{
    decide, energy_statistic, implied_threshold, pd_gaussian, pd_gaussian_rayleigh, pd_marcum, pd_rayleigh,
    pf_gamma, pf_gaussian, required_samples, DetectorConfig, LocalReport,
};
pub use error::{Error, Result};
pub use fusion::{
    apply_attacker, brute_force_fused_probability, fuse_bits, fuse_reports, fuse_with_trust, fused_probability,
    majority_vote_sample_size, sprt_run, update_reputation, FusionRule, Reputation, SprtConfig, SprtOutcome,
    SprtState, UserProfile,
};
pub use montecarlo::{
    compare_theory, run_cooperative, run_cooperative_with_trust, run_single_user, run_sprt_attack, run_trial,
    simulate_sprt_bernoulli, train_reputations, Counting, CurvePoint, DeviationReport, ExperimentSpec,
    ThresholdSweep,
};
pub use report::emit_csv;
pub use signal::{
    generate_noise, generate_signal_plus_noise, sample_rayleigh_snr, ChannelSpec, Fading, Hypothesis, SampleFrame,
    SeededRng,
};
pub use special::{gaussian_q, gaussian_q_inv, marcum_q, reg_lower_gamma, reg_upper_gamma, Probability};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/special_functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/energy_detection.md")]
    mod energy_detection {}
    #[doc = include_str!("../../../book/src/fusion.md")]
    mod fusion {}
    #[doc = include_str!("../../../book/src/sprt_and_reputation.md")]
    mod sprt_and_reputation {}
    #[doc = include_str!("../../../book/src/monte_carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
