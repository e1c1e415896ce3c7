//! Monte Carlo threshold sweeps for single users and fused groups.
//!
//! Every trial draws, per channel, one noise frame and one signal frame from
//! streams addressed by `(seed, trial, channel)`. The H0 energy is the noise
//! frame alone; the H1 energy is the same noise plus the signal. Energies do
//! not depend on the threshold, so each trial is generated once and scored
//! against the whole grid. Trials run in parallel and their integer counts
//! are summed, which keeps results identical for any worker count.

use rayon::prelude::*;

use crate::detector::{
    decide, energy_statistic, pd_gaussian, pd_gaussian_rayleigh, pf_gaussian, DetectorConfig, LocalReport,
};
use crate::error::{Error, Result};
use crate::fusion::{
    apply_attacker, fuse_bits, fuse_with_trust, fused_probability, update_reputation, FusionRule, Reputation,
    SprtConfig, SprtOutcome, SprtState, UserProfile,
};
use crate::signal::{generate_noise, generate_signal, sample_rayleigh_snr, ChannelSpec, Fading, SeededRng};
use crate::special::Probability;

const STREAM_NOISE: u64 = 0;
const STREAM_SIGNAL: u64 = 1;
const STREAM_FADING: u64 = 2;
const STREAM_ATTACK: u64 = 3;
/// Trial-index offset for reputation training rounds, disjoint from sweep trials.
const TRAINING_OFFSET: u64 = 1 << 42;
/// Trial-index offset for SPRT sensing slots.
const SPRT_OFFSET: u64 = 1 << 43;

fn stream_id(trial: u64, channel: usize, purpose: u64) -> u64 {
    (trial << 20) | ((channel as u64) << 4) | purpose
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Counting {
    /// Detection is counted only when the noise-only energy stayed at or
    /// below the threshold and the signal-plus-noise energy exceeded it.
    PaperConditional,
    /// Detection counted whenever the signal-plus-noise energy exceeds the threshold.
    #[default]
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSweep {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ThresholdSweep {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let sweep = ThresholdSweep { start, stop, step };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::validation("threshold_step", "must be positive"));
        }
        if !(self.start.is_finite() && self.start >= 0.0) {
            return Err(Error::validation("threshold_start", "must be finite and non-negative"));
        }
        if !(self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::validation("threshold_stop", "must exceed threshold_start"));
        }
        Ok(())
    }

    /// Grid points `start, start + step, …` up to and including `stop`.
    pub fn thresholds(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub channels: Vec<ChannelSpec>,
    pub n_samples: usize,
    /// Statistic convention; thresholds are expressed in its units.
    pub normalized: bool,
    /// One sweep per channel. Cooperative runs require them all equal.
    pub sweeps: Vec<ThresholdSweep>,
    pub n_trials: usize,
    pub seed: u64,
    pub rule: Option<FusionRule>,
    pub counting: Counting,
    /// Empty means everyone is honest.
    pub profiles: Vec<UserProfile>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.channels.is_empty() {
            return Err(Error::validation("channels", "at least one channel is required"));
        }
        for ch in &self.channels {
            ch.validate()?;
        }
        if self.n_samples == 0 {
            return Err(Error::validation("n_samples", "must be at least 1"));
        }
        if self.n_trials == 0 {
            return Err(Error::validation("n_trials", "must be at least 1"));
        }
        if self.sweeps.len() != self.channels.len() {
            return Err(Error::validation(
                "threshold_start",
                format!("{} sweeps for {} channels", self.sweeps.len(), self.channels.len()),
            ));
        }
        for sweep in &self.sweeps {
            sweep.validate()?;
        }
        if !self.profiles.is_empty() && self.profiles.len() != self.channels.len() {
            return Err(Error::validation(
                "profile",
                format!("{} profiles for {} channels", self.profiles.len(), self.channels.len()),
            ));
        }
        for p in &self.profiles {
            p.validate()?;
        }
        if let Some(rule) = self.rule {
            rule.quorum(self.channels.len())
                .map_err(|e| Error::validation("k", e.to_string()))?;
        }
        Ok(())
    }

    pub fn profile(&self, channel: usize) -> UserProfile {
        self.profiles.get(channel).copied().unwrap_or_default()
    }

    fn detector(&self, threshold: f64) -> DetectorConfig {
        DetectorConfig {
            n_samples: self.n_samples,
            threshold,
            normalized: self.normalized,
        }
    }

    fn shared_sweep(&self) -> Result<ThresholdSweep> {
        let first = self.sweeps[0];
        if self.sweeps.iter().any(|s| *s != first) {
            return Err(Error::Config("cooperative runs need one shared threshold grid".into()));
        }
        Ok(first)
    }
}

/// One row of a ROC sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub threshold: f64,
    pub pf_sim: Probability,
    pub pd_sim: Probability,
    pub pf_theory: Probability,
    pub pd_theory: Probability,
}

/// Per-channel result of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTrial {
    pub noise_energy: f64,
    pub total_energy: f64,
    /// Transmitted report for the noise-only frame.
    pub h0_report: LocalReport,
    /// Transmitted report for the signal-plus-noise frame, per the counting mode.
    pub h1_report: LocalReport,
}

/// Noise-only and signal-plus-noise energies of one channel in one trial.
fn channel_energies(spec: &ExperimentSpec, channel: usize, trial: u64) -> Result<(f64, f64)> {
    let ch = &spec.channels[channel];
    let cfg = spec.detector(0.0);
    let mut noise_rng = SeededRng::for_stream(spec.seed, stream_id(trial, channel, STREAM_NOISE));
    let noise = generate_noise(spec.n_samples, ch.noise_power, &mut noise_rng)?;
    let signal_power = match ch.fading {
        Fading::Constant => ch.signal_power(),
        Fading::Rayleigh { mean_snr } => {
            let mut rng = SeededRng::for_stream(spec.seed, stream_id(trial, channel, STREAM_FADING));
            sample_rayleigh_snr(mean_snr, &mut rng)? * ch.noise_power
        }
    };
    let mut signal_rng = SeededRng::for_stream(spec.seed, stream_id(trial, channel, STREAM_SIGNAL));
    let signal = generate_signal(spec.n_samples, signal_power, &mut signal_rng);
    let total = noise.superpose(&signal)?;
    Ok((energy_statistic(&noise, &cfg)?, energy_statistic(&total, &cfg)?))
}

fn transmit(spec: &ExperimentSpec, channel: usize, trial: u64, bit: bool) -> bool {
    let profile = spec.profile(channel);
    if profile.is_honest() {
        return bit;
    }
    let mut rng = SeededRng::for_stream(spec.seed, stream_id(trial, channel, STREAM_ATTACK));
    apply_attacker(bit, profile, &mut rng)
}

/// Runs trial `trial_index` of `spec` against one threshold per channel.
pub fn run_trial(spec: &ExperimentSpec, thresholds: &[f64], trial_index: u64) -> Result<Vec<ChannelTrial>> {
    if thresholds.len() != spec.channels.len() {
        return Err(Error::domain(format!(
            "{} thresholds for {} channels",
            thresholds.len(),
            spec.channels.len()
        )));
    }
    thresholds
        .iter()
        .enumerate()
        .map(|(ch, &th)| {
            let (noise_energy, total_energy) = channel_energies(spec, ch, trial_index)?;
            let h0 = decide(noise_energy, th).occupied;
            let h1 = match spec.counting {
                Counting::Standard => decide(total_energy, th).occupied,
                Counting::PaperConditional => !h0 && decide(total_energy, th).occupied,
            };
            Ok(ChannelTrial {
                noise_energy,
                total_energy,
                h0_report: LocalReport {
                    occupied: transmit(spec, ch, trial_index, h0),
                    energy: noise_energy,
                },
                h1_report: LocalReport {
                    occupied: transmit(spec, ch, trial_index, h1),
                    energy: total_energy,
                },
            })
        })
        .collect()
}

/// Theory companions `(pf, pd)` of one honest channel at one threshold.
fn channel_theory(spec: &ExperimentSpec, channel: usize, threshold: f64) -> Result<(Probability, Probability)> {
    let ch = &spec.channels[channel];
    let cfg = spec.detector(threshold);
    let pf = pf_gaussian(&cfg, ch.noise_power)?;
    let pd = match ch.fading {
        Fading::Constant => pd_gaussian(&cfg, ch.noise_power, ch.signal_power())?,
        Fading::Rayleigh { mean_snr } => pd_gaussian_rayleigh(&cfg, ch.noise_power, mean_snr)?,
    };
    Ok((pf, pd))
}

/// Theory companions after the channel's attacker profile.
fn transmitted_theory(spec: &ExperimentSpec, channel: usize, threshold: f64) -> Result<(Probability, Probability)> {
    let (pf, pd) = channel_theory(spec, channel, threshold)?;
    let profile = spec.profile(channel);
    Ok((
        Probability::clamped(profile.transmitted_probability(pf.get())),
        Probability::clamped(profile.transmitted_probability(pd.get())),
    ))
}

/// Outcome counter for one threshold.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    false_alarms: u64,
    detections: u64,
}

fn add_tallies(mut a: Vec<Tally>, b: Vec<Tally>) -> Vec<Tally> {
    for (x, y) in a.iter_mut().zip(b) {
        x.false_alarms += y.false_alarms;
        x.detections += y.detections;
    }
    a
}

fn count(counting: Counting, false_alarm: bool, detected: bool, tally: &mut Tally) {
    if false_alarm {
        tally.false_alarms += 1;
    }
    let hit = match counting {
        Counting::Standard => detected,
        Counting::PaperConditional => !false_alarm && detected,
    };
    if hit {
        tally.detections += 1;
    }
}

fn ratio(count: u64, trials: usize) -> Probability {
    Probability::clamped(count as f64 / trials as f64)
}

/// Per-channel ROC sweeps of independent single users.
pub fn run_single_user(spec: &ExperimentSpec) -> Result<Vec<Vec<CurvePoint>>> {
    spec.validate()?;
    if spec.rule.is_some() {
        return Err(Error::Config("single-user runs take no fusion rule".into()));
    }
    let grids: Vec<Vec<f64>> = spec.sweeps.iter().map(ThresholdSweep::thresholds).collect();
    let offsets: Vec<usize> = grids
        .iter()
        .scan(0, |acc, g| {
            let start = *acc;
            *acc += g.len();
            Some(start)
        })
        .collect();
    let total_points: usize = grids.iter().map(Vec::len).sum();

    let tallies = (0..spec.n_trials as u64)
        .into_par_iter()
        .try_fold(
            || vec![Tally::default(); total_points],
            |mut acc, trial| -> Result<Vec<Tally>> {
                for (ch, grid) in grids.iter().enumerate() {
                    let (e0, e1) = channel_energies(spec, ch, trial)?;
                    for (i, &th) in grid.iter().enumerate() {
                        let fa = transmit(spec, ch, trial, decide(e0, th).occupied);
                        let det = transmit(spec, ch, trial, decide(e1, th).occupied);
                        count(spec.counting, fa, det, &mut acc[offsets[ch] + i]);
                    }
                }
                Ok(acc)
            },
        )
        .try_reduce(|| vec![Tally::default(); total_points], |a, b| Ok(add_tallies(a, b)))?;

    grids
        .iter()
        .enumerate()
        .map(|(ch, grid)| {
            grid.iter()
                .enumerate()
                .map(|(i, &th)| {
                    let t = tallies[offsets[ch] + i];
                    let (pf_theory, pd_theory) = transmitted_theory(spec, ch, th)?;
                    Ok(CurvePoint {
                        threshold: th,
                        pf_sim: ratio(t.false_alarms, spec.n_trials),
                        pd_sim: ratio(t.detections, spec.n_trials),
                        pf_theory,
                        pd_theory,
                    })
                })
                .collect()
        })
        .collect()
}

/// Shared engine for fused sweeps. `fuse` maps the transmitted bits of all
/// users to the fused decision.
fn fused_sweep<F>(spec: &ExperimentSpec, grid: &[f64], fuse: F) -> Result<Vec<Tally>>
where
    F: Fn(&[bool]) -> Result<bool> + Sync,
{
    let users = spec.channels.len();
    (0..spec.n_trials as u64)
        .into_par_iter()
        .try_fold(
            || vec![Tally::default(); grid.len()],
            |mut acc, trial| -> Result<Vec<Tally>> {
                let energies = (0..users)
                    .map(|ch| channel_energies(spec, ch, trial))
                    .collect::<Result<Vec<_>>>()?;
                let mut h0_bits = vec![false; users];
                let mut h1_bits = vec![false; users];
                for (i, &th) in grid.iter().enumerate() {
                    for (ch, &(e0, e1)) in energies.iter().enumerate() {
                        h0_bits[ch] = transmit(spec, ch, trial, decide(e0, th).occupied);
                        h1_bits[ch] = transmit(spec, ch, trial, decide(e1, th).occupied);
                    }
                    count(spec.counting, fuse(&h0_bits)?, fuse(&h1_bits)?, &mut acc[i]);
                }
                Ok(acc)
            },
        )
        .try_reduce(|| vec![Tally::default(); grid.len()], |a, b| Ok(add_tallies(a, b)))
}

fn fused_theory(spec: &ExperimentSpec, users: &[usize], rule: FusionRule, threshold: f64) -> Result<(Probability, Probability)> {
    let mut pfs = Vec::with_capacity(users.len());
    let mut pds = Vec::with_capacity(users.len());
    for &ch in users {
        let (pf, pd) = transmitted_theory(spec, ch, threshold)?;
        pfs.push(pf);
        pds.push(pd);
    }
    Ok((fused_probability(&pfs, rule)?, fused_probability(&pds, rule)?))
}

/// Fused ROC sweep over all channels under the spec's rule.
pub fn run_cooperative(spec: &ExperimentSpec) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let rule = spec
        .rule
        .ok_or_else(|| Error::Config("cooperative runs need a fusion rule".into()))?;
    let grid = spec.shared_sweep()?.thresholds();
    let tallies = fused_sweep(spec, &grid, |bits| fuse_bits(bits, rule))?;
    let users: Vec<usize> = (0..spec.channels.len()).collect();
    grid.iter()
        .zip(tallies)
        .map(|(&th, t)| {
            let (pf_theory, pd_theory) = fused_theory(spec, &users, rule, th)?;
            Ok(CurvePoint {
                threshold: th,
                pf_sim: ratio(t.false_alarms, spec.n_trials),
                pd_sim: ratio(t.detections, spec.n_trials),
                pf_theory,
                pd_theory,
            })
        })
        .collect()
}

/// Runs `rounds` sensing rounds with the primary user active and updates
/// every user's reputation against the fused decision of `feedback_rule`.
pub fn train_reputations(
    spec: &ExperimentSpec,
    threshold: f64,
    rounds: usize,
    feedback_rule: FusionRule,
) -> Result<Vec<Reputation>> {
    spec.validate()?;
    let users = spec.channels.len();
    let mut reps = vec![Reputation::default(); users];
    let mut bits = vec![false; users];
    for round in 0..rounds as u64 {
        let trial = TRAINING_OFFSET + round;
        for (ch, bit) in bits.iter_mut().enumerate() {
            let (_, e1) = channel_energies(spec, ch, trial)?;
            *bit = transmit(spec, ch, trial, decide(e1, threshold).occupied);
        }
        let fused = fuse_bits(&bits, feedback_rule)?;
        for (rep, &bit) in reps.iter_mut().zip(&bits) {
            *rep = update_reputation(*rep, bit, fused);
        }
    }
    Ok(reps)
}

/// Like [`run_cooperative`], but each fused decision only counts users
/// whose trust is at least `trust_floor`.
pub fn run_cooperative_with_trust(
    spec: &ExperimentSpec,
    reputations: &[Reputation],
    trust_floor: f64,
) -> Result<Vec<CurvePoint>> {
    spec.validate()?;
    let rule = spec
        .rule
        .ok_or_else(|| Error::Config("cooperative runs need a fusion rule".into()))?;
    if reputations.len() != spec.channels.len() {
        return Err(Error::domain("one reputation per channel is required"));
    }
    let grid = spec.shared_sweep()?.thresholds();
    let tallies = fused_sweep(spec, &grid, |bits| {
        let reports: Vec<LocalReport> = bits
            .iter()
            .map(|&occupied| LocalReport { occupied, energy: 0.0 })
            .collect();
        fuse_with_trust(&reports, reputations, rule, trust_floor)
    })?;
    let survivors: Vec<usize> = reputations
        .iter()
        .enumerate()
        .filter(|(_, r)| r.trust() >= trust_floor)
        .map(|(i, _)| i)
        .collect();
    if survivors.is_empty() {
        return Err(Error::DegenerateQuorum { floor: trust_floor });
    }
    let clipped = match rule {
        FusionRule::KRank(k) => FusionRule::KRank(k.min(survivors.len())),
        other => other,
    };
    grid.iter()
        .zip(tallies)
        .map(|(&th, t)| {
            let (pf_theory, pd_theory) = fused_theory(spec, &survivors, clipped, th)?;
            Ok(CurvePoint {
                threshold: th,
                pf_sim: ratio(t.false_alarms, spec.n_trials),
                pd_sim: ratio(t.detections, spec.n_trials),
                pf_theory,
                pd_theory,
            })
        })
        .collect()
}

/// Closed-form curve row with no simulation attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryPoint {
    pub threshold: f64,
    pub pf: Probability,
    pub pd: Probability,
}

/// Per-channel closed-form curves over each channel's own sweep.
pub fn theory_single_user(spec: &ExperimentSpec) -> Result<Vec<Vec<TheoryPoint>>> {
    spec.validate()?;
    spec.sweeps
        .iter()
        .enumerate()
        .map(|(ch, sweep)| {
            sweep
                .thresholds()
                .into_iter()
                .map(|th| {
                    let (pf, pd) = transmitted_theory(spec, ch, th)?;
                    Ok(TheoryPoint { threshold: th, pf, pd })
                })
                .collect()
        })
        .collect()
}

/// Closed-form fused curve under the spec's rule.
pub fn theory_cooperative(spec: &ExperimentSpec) -> Result<Vec<TheoryPoint>> {
    spec.validate()?;
    let rule = spec
        .rule
        .ok_or_else(|| Error::Config("cooperative theory needs a fusion rule".into()))?;
    let users: Vec<usize> = (0..spec.channels.len()).collect();
    spec.shared_sweep()?
        .thresholds()
        .into_iter()
        .map(|th| {
            let (pf, pd) = fused_theory(spec, &users, rule, th)?;
            Ok(TheoryPoint { threshold: th, pf, pd })
        })
        .collect()
}

/// SPRT fusion result at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprtPoint {
    /// `pf_sim`/`pd_sim` are the rates of accepting H1 under H0/H1;
    /// the theory columns hold the design targets `α` and `1 − β`.
    pub curve: CurvePoint,
    pub mean_reports_h0: f64,
    pub mean_reports_h1: f64,
    pub undecided: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct SprtTally {
    accept_h1_under_h0: u64,
    accept_h1_under_h1: u64,
    reports_h0: u64,
    reports_h1: u64,
    undecided: u64,
}

/// Sequential fusion sweep: users report in round-robin order, one fresh
/// sensing slot per report, until the SPRT stops. An undecided run counts
/// as idle.
pub fn run_sprt_attack(spec: &ExperimentSpec, sprt: &SprtConfig) -> Result<Vec<SprtPoint>> {
    spec.validate()?;
    sprt.validate()?;
    let grid = spec.shared_sweep()?.thresholds();
    let users = spec.channels.len();
    let slots_per_run = sprt.max_reports as u64;

    let tallies = (0..spec.n_trials as u64)
        .into_par_iter()
        .try_fold(
            || vec![SprtTally::default(); grid.len()],
            |mut acc, run| -> Result<Vec<SprtTally>> {
                let mut cache: Vec<(f64, f64)> = Vec::new();
                let mut energy = |slot: usize| -> Result<(f64, f64)> {
                    while cache.len() <= slot {
                        let s = cache.len();
                        let trial = SPRT_OFFSET + run * slots_per_run + s as u64;
                        cache.push(channel_energies(spec, s % users, trial)?);
                    }
                    Ok(cache[slot])
                };
                for (i, &th) in grid.iter().enumerate() {
                    for under_h1 in [false, true] {
                        let mut state = SprtState::new(sprt)?;
                        let mut slot = 0;
                        let outcome = loop {
                            let (e0, e1) = energy(slot)?;
                            let e = if under_h1 { e1 } else { e0 };
                            let trial = SPRT_OFFSET + run * slots_per_run + slot as u64;
                            let bit = transmit(spec, slot % users, trial, decide(e, th).occupied);
                            slot += 1;
                            if let Some(o) = state.push(bit) {
                                break o;
                            }
                        };
                        let t = &mut acc[i];
                        if matches!(outcome, SprtOutcome::Undecided { .. }) {
                            t.undecided += 1;
                        }
                        if under_h1 {
                            t.reports_h1 += outcome.consumed() as u64;
                            t.accept_h1_under_h1 += outcome.accepts_h1() as u64;
                        } else {
                            t.reports_h0 += outcome.consumed() as u64;
                            t.accept_h1_under_h0 += outcome.accepts_h1() as u64;
                        }
                    }
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![SprtTally::default(); grid.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.accept_h1_under_h0 += y.accept_h1_under_h0;
                    x.accept_h1_under_h1 += y.accept_h1_under_h1;
                    x.reports_h0 += y.reports_h0;
                    x.reports_h1 += y.reports_h1;
                    x.undecided += y.undecided;
                }
                Ok(a)
            },
        )?;

    let n = spec.n_trials as f64;
    Ok(grid
        .iter()
        .zip(tallies)
        .map(|(&th, t)| SprtPoint {
            curve: CurvePoint {
                threshold: th,
                pf_sim: ratio(t.accept_h1_under_h0, spec.n_trials),
                pd_sim: ratio(t.accept_h1_under_h1, spec.n_trials),
                pf_theory: Probability::clamped(sprt.alpha),
                pd_theory: Probability::clamped(1.0 - sprt.beta),
            },
            mean_reports_h0: t.reports_h0 as f64 / n,
            mean_reports_h1: t.reports_h1 as f64 / n,
            undecided: t.undecided,
        })
        .collect())
}

/// Aggregate of many SPRT runs over i.i.d. Bernoulli reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprtSummary {
    pub runs: usize,
    pub accept_h1: usize,
    pub accept_h0: usize,
    pub undecided: usize,
    pub mean_reports: f64,
}

/// Runs the SPRT `runs` times on reports drawn i.i.d. with
/// `P(1) = p_h1` (when `under_h1`) or `p_h0`.
pub fn simulate_sprt_bernoulli(config: &SprtConfig, under_h1: bool, runs: usize, seed: u64) -> Result<SprtSummary> {
    config.validate()?;
    let p_one = if under_h1 { config.p_h1 } else { config.p_h0 };
    let outcomes = (0..runs as u64)
        .into_par_iter()
        .map(|run| -> Result<SprtOutcome> {
            let mut rng = SeededRng::for_stream(seed, run);
            let mut state = SprtState::new(config)?;
            loop {
                if let Some(o) = state.push(rng.uniform() < p_one) {
                    return Ok(o);
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut summary = SprtSummary {
        runs,
        accept_h1: 0,
        accept_h0: 0,
        undecided: 0,
        mean_reports: 0.0,
    };
    let mut consumed = 0u64;
    for o in &outcomes {
        consumed += o.consumed() as u64;
        match o {
            SprtOutcome::AcceptH1 { .. } => summary.accept_h1 += 1,
            SprtOutcome::AcceptH0 { .. } => summary.accept_h0 += 1,
            SprtOutcome::Undecided { .. } => summary.undecided += 1,
        }
    }
    summary.mean_reports = consumed as f64 / runs.max(1) as f64;
    Ok(summary)
}

/// Simulation-versus-theory gap at one curve point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub threshold: f64,
    pub pf_gap: f64,
    pub pf_std_err: f64,
    pub pd_gap: f64,
    pub pd_std_err: f64,
    /// Either gap exceeds three standard errors.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub rows: Vec<Deviation>,
    pub flagged: usize,
}

impl DeviationReport {
    /// Share of points whose both gaps stay within three standard errors.
    pub fn fraction_within(&self) -> f64 {
        if self.rows.is_empty() {
            return 1.0;
        }
        1.0 - self.flagged as f64 / self.rows.len() as f64
    }
}

/// Binomial standard error `sqrt(p(1 − p)/n)` of a rate estimated from `n` trials.
pub fn binomial_std_err(p: f64, n_trials: usize) -> f64 {
    (p * (1.0 - p) / n_trials as f64).sqrt()
}

/// Compares each simulated rate with its theory companion. Standard errors
/// use the theoretical probability.
pub fn compare_theory(points: &[CurvePoint], n_trials: usize) -> Result<DeviationReport> {
    if n_trials == 0 {
        return Err(Error::domain("n_trials must be at least 1"));
    }
    let rows: Vec<Deviation> = points
        .iter()
        .map(|p| {
            let pf_gap = (p.pf_sim.get() - p.pf_theory.get()).abs();
            let pd_gap = (p.pd_sim.get() - p.pd_theory.get()).abs();
            let pf_std_err = binomial_std_err(p.pf_theory.get(), n_trials);
            let pd_std_err = binomial_std_err(p.pd_theory.get(), n_trials);
            Deviation {
                threshold: p.threshold,
                pf_gap,
                pf_std_err,
                pd_gap,
                pd_std_err,
                flagged: pf_gap > 3.0 * pf_std_err || pd_gap > 3.0 * pd_std_err,
            }
        })
        .collect();
    let flagged = rows.iter().filter(|r| r.flagged).count();
    Ok(DeviationReport { rows, flagged })
}
