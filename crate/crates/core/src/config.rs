//! Experiment configuration files.
//!
//! The format is TOML with three section kinds: `[experiment]`, one
//! `[channel.N]` table per user numbered from 1, and an optional `[sprt]`.
//! Unknown keys are rejected so that a misspelt sweep bound cannot silently
//! fall back to a default.
//!
//! ```toml
//! [experiment]
//! mode = "cooperative"
//! output = "out/and.csv"
//! rule = "and"
//! threshold_start = 500.0
//! threshold_stop = 900.0
//! threshold_step = 20.0
//!
//! [channel.1]
//! snr_db = -8.0
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::{FusionRule, SprtConfig, UserProfile};
use crate::montecarlo::{Counting, ExperimentSpec, ThresholdSweep};
use crate::signal::{ChannelSpec, Fading};

pub const DEFAULT_TRIALS: usize = 5000;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_NOISE_POWER: f64 = 4.0;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_MAX_REPORTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    SingleUser,
    Cooperative,
    SprtAttack,
    TheoryOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub experiment: ExperimentSpec,
    pub output_path: PathBuf,
    pub sprt: Option<SprtConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawCounting {
    Standard,
    PaperConditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawRule {
    And,
    Or,
    KRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawFading {
    Constant,
    Rayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawProfile {
    Honest,
    AlwaysBusy,
    AlwaysFree,
    Intermittent,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    mode: Option<Mode>,
    output: Option<String>,
    n_trials: Option<usize>,
    n_samples: Option<usize>,
    normalized: Option<bool>,
    seed: Option<u64>,
    counting: Option<RawCounting>,
    rule: Option<RawRule>,
    k: Option<usize>,
    threshold_start: Option<f64>,
    threshold_stop: Option<f64>,
    threshold_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    snr_db: Option<f64>,
    noise_power: Option<f64>,
    fading: Option<RawFading>,
    profile: Option<RawProfile>,
    lie_probability: Option<f64>,
    threshold_start: Option<f64>,
    threshold_stop: Option<f64>,
    threshold_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSprt {
    alpha: Option<f64>,
    beta: Option<f64>,
    p_h1: Option<f64>,
    p_h0: Option<f64>,
    max_reports: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Option<RawExperiment>,
    #[serde(default)]
    channel: BTreeMap<String, RawChannel>,
    sprt: Option<RawSprt>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

fn require<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::validation(field, "is required"))
}

fn sweep_from(
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    prefix: &str,
) -> Result<Option<ThresholdSweep>> {
    match (start, stop, step) {
        (None, None, None) => Ok(None),
        (start, stop, step) => {
            let start = require(start, &format!("{prefix}threshold_start"))?;
            let stop = require(stop, &format!("{prefix}threshold_stop"))?;
            let step = require(step, &format!("{prefix}threshold_step"))?;
            let sweep = ThresholdSweep { start, stop, step };
            sweep.validate().map_err(|e| prefix_field(e, prefix))?;
            Ok(Some(sweep))
        }
    }
}

fn prefix_field(err: Error, prefix: &str) -> Error {
    match err {
        Error::Validation { field, message } => Error::Validation {
            field: format!("{prefix}{field}"),
            message,
        },
        other => other,
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map(|s| line_of(text, s.start)).unwrap_or(1),
        message: e.message().to_string(),
    })?;
    build(raw)
}

fn build(raw: RawConfig) -> Result<RunConfig> {
    let exp = require(raw.experiment, "experiment")?;
    let mode = require(exp.mode, "experiment.mode")?;
    let output = require(exp.output, "experiment.output")?;
    if output.trim().is_empty() {
        return Err(Error::validation("experiment.output", "must not be empty"));
    }

    let rule = match exp.rule {
        None => {
            if exp.k.is_some() {
                return Err(Error::validation("experiment.k", "only valid with rule = \"k_rank\""));
            }
            None
        }
        Some(RawRule::And) | Some(RawRule::Or) if exp.k.is_some() => {
            return Err(Error::validation("experiment.k", "only valid with rule = \"k_rank\""));
        }
        Some(RawRule::And) => Some(FusionRule::And),
        Some(RawRule::Or) => Some(FusionRule::Or),
        Some(RawRule::KRank) => Some(FusionRule::KRank(require(exp.k, "experiment.k")?)),
    };

    if raw.channel.is_empty() {
        return Err(Error::validation("channel", "at least one [channel.N] section is required"));
    }
    let mut numbered = Vec::with_capacity(raw.channel.len());
    for (key, ch) in raw.channel {
        let index: usize = key
            .parse()
            .map_err(|_| Error::validation(format!("channel.{key}"), "channel sections are numbered 1, 2, ..."))?;
        numbered.push((index, ch));
    }
    numbered.sort_by_key(|(i, _)| *i);
    for (expected, (index, _)) in numbered.iter().enumerate() {
        if *index != expected + 1 {
            return Err(Error::validation(
                format!("channel.{index}"),
                format!("channel sections must be numbered 1..={} without gaps", numbered.len()),
            ));
        }
    }

    let shared = sweep_from(exp.threshold_start, exp.threshold_stop, exp.threshold_step, "experiment.")?;
    let fused_mode = matches!(mode, Mode::Cooperative | Mode::SprtAttack) || (mode == Mode::TheoryOnly && rule.is_some());

    let mut channels = Vec::new();
    let mut sweeps = Vec::new();
    let mut profiles = Vec::new();
    for (index, ch) in &numbered {
        let prefix = format!("channel.{index}.");
        let snr_db = require(ch.snr_db, &format!("{prefix}snr_db"))?;
        let noise_power = ch.noise_power.unwrap_or(DEFAULT_NOISE_POWER);
        let fading = match ch.fading.unwrap_or(RawFading::Constant) {
            RawFading::Constant => Fading::Constant,
            RawFading::Rayleigh => Fading::Rayleigh {
                mean_snr: 10f64.powf(snr_db / 10.0),
            },
        };
        let spec = ChannelSpec {
            snr_db,
            noise_power,
            fading,
        };
        spec.validate().map_err(|e| prefix_field(e, &prefix))?;
        channels.push(spec);

        let own = sweep_from(ch.threshold_start, ch.threshold_stop, ch.threshold_step, &prefix)?;
        let sweep = if fused_mode {
            if own.is_some() {
                return Err(Error::validation(
                    format!("{prefix}threshold_start"),
                    "fused runs share the [experiment] threshold grid",
                ));
            }
            require(shared, "experiment.threshold_start")?
        } else {
            match own.or(shared) {
                Some(s) => s,
                None => return Err(Error::validation(format!("{prefix}threshold_start"), "is required")),
            }
        };
        sweeps.push(sweep);

        let profile = match ch.profile.unwrap_or(RawProfile::Honest) {
            RawProfile::Honest => UserProfile::Honest,
            RawProfile::AlwaysBusy => UserProfile::AlwaysBusy,
            RawProfile::AlwaysFree => UserProfile::AlwaysFree,
            RawProfile::Intermittent => UserProfile::Intermittent {
                lie_probability: require(ch.lie_probability, &format!("{prefix}lie_probability"))?,
            },
        };
        if ch.lie_probability.is_some() && !matches!(profile, UserProfile::Intermittent { .. }) {
            return Err(Error::validation(
                format!("{prefix}lie_probability"),
                "only valid with profile = \"intermittent\"",
            ));
        }
        profile.validate().map_err(|e| prefix_field(e, &prefix))?;
        profiles.push(profile);
    }

    let experiment = ExperimentSpec {
        channels,
        n_samples: exp.n_samples.unwrap_or(DEFAULT_SAMPLES),
        normalized: exp.normalized.unwrap_or(false),
        sweeps,
        n_trials: exp.n_trials.unwrap_or(DEFAULT_TRIALS),
        seed: exp.seed.unwrap_or(DEFAULT_SEED),
        rule,
        counting: match exp.counting.unwrap_or(RawCounting::Standard) {
            RawCounting::Standard => Counting::Standard,
            RawCounting::PaperConditional => Counting::PaperConditional,
        },
        profiles,
    };
    experiment.validate().map_err(|e| prefix_field(e, "experiment."))?;

    let sprt = raw
        .sprt
        .map(|s| -> Result<SprtConfig> {
            let cfg = SprtConfig {
                alpha: require(s.alpha, "sprt.alpha")?,
                beta: require(s.beta, "sprt.beta")?,
                p_h1: require(s.p_h1, "sprt.p_h1")?,
                p_h0: require(s.p_h0, "sprt.p_h0")?,
                max_reports: s.max_reports.unwrap_or(DEFAULT_MAX_REPORTS),
            };
            cfg.validate().map_err(|e| prefix_field(e, "sprt."))?;
            Ok(cfg)
        })
        .transpose()?;

    match mode {
        Mode::SingleUser if rule.is_some() => {
            return Err(Error::validation("experiment.rule", "single_user runs take no fusion rule"))
        }
        Mode::Cooperative if rule.is_none() => {
            return Err(Error::validation("experiment.rule", "cooperative runs need a fusion rule"))
        }
        Mode::SprtAttack if sprt.is_none() => {
            return Err(Error::validation("sprt", "sprt_attack runs need an [sprt] section"))
        }
        _ => {}
    }

    Ok(RunConfig {
        mode,
        experiment,
        output_path: PathBuf::from(output),
        sprt,
    })
}

impl RunConfig {
    /// Serializes the config with every default written out.
    pub fn to_document(&self) -> String {
        let e = &self.experiment;
        let fused = matches!(self.mode, Mode::Cooperative | Mode::SprtAttack)
            || (self.mode == Mode::TheoryOnly && e.rule.is_some());
        let (rule, k) = match e.rule {
            None => (None, None),
            Some(FusionRule::And) => (Some(RawRule::And), None),
            Some(FusionRule::Or) => (Some(RawRule::Or), None),
            Some(FusionRule::KRank(k)) => (Some(RawRule::KRank), Some(k)),
        };
        let shared = fused.then(|| e.sweeps[0]);
        let experiment = RawExperiment {
            mode: Some(self.mode),
            output: Some(self.output_path.to_string_lossy().into_owned()),
            n_trials: Some(e.n_trials),
            n_samples: Some(e.n_samples),
            normalized: Some(e.normalized),
            seed: Some(e.seed),
            counting: Some(match e.counting {
                Counting::Standard => RawCounting::Standard,
                Counting::PaperConditional => RawCounting::PaperConditional,
            }),
            rule,
            k,
            threshold_start: shared.map(|s| s.start),
            threshold_stop: shared.map(|s| s.stop),
            threshold_step: shared.map(|s| s.step),
        };
        let channel = e
            .channels
            .iter()
            .enumerate()
            .map(|(i, ch)| {
                let own = (!fused).then(|| e.sweeps[i]);
                let (profile, lie) = match e.profile(i) {
                    UserProfile::Honest => (RawProfile::Honest, None),
                    UserProfile::AlwaysBusy => (RawProfile::AlwaysBusy, None),
                    UserProfile::AlwaysFree => (RawProfile::AlwaysFree, None),
                    UserProfile::Intermittent { lie_probability } => (RawProfile::Intermittent, Some(lie_probability)),
                };
                let raw = RawChannel {
                    snr_db: Some(ch.snr_db),
                    noise_power: Some(ch.noise_power),
                    fading: Some(match ch.fading {
                        Fading::Constant => RawFading::Constant,
                        Fading::Rayleigh { .. } => RawFading::Rayleigh,
                    }),
                    profile: Some(profile),
                    lie_probability: lie,
                    threshold_start: own.map(|s| s.start),
                    threshold_stop: own.map(|s| s.stop),
                    threshold_step: own.map(|s| s.step),
                };
                ((i + 1).to_string(), raw)
            })
            .collect();
        let sprt = self.sprt.map(|s| RawSprt {
            alpha: Some(s.alpha),
            beta: Some(s.beta),
            p_h1: Some(s.p_h1),
            p_h0: Some(s.p_h0),
            max_reports: Some(s.max_reports),
        });
        let raw = RawConfig {
            experiment: Some(experiment),
            channel,
            sprt,
        };
        toml::to_string(&raw).expect("config values are always representable in TOML")
    }
}
