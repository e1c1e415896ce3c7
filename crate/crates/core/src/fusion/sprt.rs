//! Sequential probability ratio test over a stream of 1-bit reports.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprtConfig {
    /// Target false-alarm rate.
    pub alpha: f64,
    /// Target miss rate.
    pub beta: f64,
    /// P(report = 1 | H1).
    pub p_h1: f64,
    /// P(report = 1 | H0).
    pub p_h0: f64,
    pub max_reports: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SprtOutcome {
    AcceptH1 { at: usize },
    AcceptH0 { at: usize },
    Undecided { consumed: usize },
}

impl SprtOutcome {
    pub fn consumed(&self) -> usize {
        match *self {
            SprtOutcome::AcceptH1 { at } | SprtOutcome::AcceptH0 { at } => at,
            SprtOutcome::Undecided { consumed } => consumed,
        }
    }

    pub fn accepts_h1(&self) -> bool {
        matches!(self, SprtOutcome::AcceptH1 { .. })
    }
}

impl SprtConfig {
    pub fn validate(&self) -> Result<()> {
        let open_half = |v: f64| v > 0.0 && v < 0.5;
        if !open_half(self.alpha) {
            return Err(Error::validation("alpha", "must lie in (0, 0.5)"));
        }
        if !open_half(self.beta) {
            return Err(Error::validation("beta", "must lie in (0, 0.5)"));
        }
        if !(self.p_h0 > 0.0 && self.p_h0 < self.p_h1 && self.p_h1 < 1.0) {
            return Err(Error::validation("p_h1", "need 0 < p_h0 < p_h1 < 1"));
        }
        if self.max_reports == 0 {
            return Err(Error::validation("max_reports", "must be at least 1"));
        }
        Ok(())
    }

    /// Wald acceptance boundaries `(A, B)` on the likelihood ratio.
    pub fn boundaries(&self) -> (f64, f64) {
        ((1.0 - self.beta) / self.alpha, self.beta / (1.0 - self.alpha))
    }

    /// Likelihood ratio `P(d | H1) / P(d | H0)` of one report.
    pub fn report_ratio(&self, report: bool) -> f64 {
        if report {
            self.p_h1 / self.p_h0
        } else {
            (1.0 - self.p_h1) / (1.0 - self.p_h0)
        }
    }
}

/// Incremental form of [`sprt_run`] for report streams produced on demand.
#[derive(Debug, Clone)]
pub struct SprtState {
    ln_upper: f64,
    ln_lower: f64,
    ln_one: f64,
    ln_zero: f64,
    max_reports: usize,
    llr: f64,
    consumed: usize,
}

impl SprtState {
    pub fn new(config: &SprtConfig) -> Result<Self> {
        config.validate()?;
        let (upper, lower) = config.boundaries();
        Ok(SprtState {
            ln_upper: upper.ln(),
            ln_lower: lower.ln(),
            ln_one: config.report_ratio(true).ln(),
            ln_zero: config.report_ratio(false).ln(),
            max_reports: config.max_reports,
            llr: 0.0,
            consumed: 0,
        })
    }

    /// Log of the running statistic `S_n`.
    pub fn log_statistic(&self) -> f64 {
        self.llr
    }

    /// Feeds one report; returns the outcome once the test has stopped.
    pub fn push(&mut self, report: bool) -> Option<SprtOutcome> {
        if self.consumed >= self.max_reports {
            return Some(SprtOutcome::Undecided { consumed: self.consumed });
        }
        self.llr += if report { self.ln_one } else { self.ln_zero };
        self.consumed += 1;
        if self.llr >= self.ln_upper {
            Some(SprtOutcome::AcceptH1 { at: self.consumed })
        } else if self.llr <= self.ln_lower {
            Some(SprtOutcome::AcceptH0 { at: self.consumed })
        } else if self.consumed == self.max_reports {
            Some(SprtOutcome::Undecided { consumed: self.consumed })
        } else {
            None
        }
    }
}

/// Runs Wald's test: the running product `S_n = Π P(d_i|H1)/P(d_i|H0)` is
/// compared with `A = (1−β)/α` and `B = β/(1−α)` after every report. Stops
/// at `max_reports` or when the reports run out.
pub fn sprt_run(reports: &[bool], config: &SprtConfig) -> Result<SprtOutcome> {
    let mut state = SprtState::new(config)?;
    for &report in reports {
        if let Some(outcome) = state.push(report) {
            return Ok(outcome);
        }
    }
    Ok(SprtOutcome::Undecided {
        consumed: state.consumed,
    })
}

/// Smallest odd report count `n` for which a fixed majority vote over i.i.d.
/// reports meets both error targets, found by summing the binomial tails
/// over every count. `None` if no `n ≤ max_n` suffices.
pub fn majority_vote_sample_size(config: &SprtConfig, max_n: usize) -> Result<Option<usize>> {
    config.validate()?;
    for n in (1..=max_n).step_by(2) {
        let quorum = n / 2 + 1;
        let false_alarm = binomial_upper_tail(n, quorum, config.p_h0);
        let miss = 1.0 - binomial_upper_tail(n, quorum, config.p_h1);
        if false_alarm <= config.alpha && miss <= config.beta {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// `P(X ≥ k)` for `X ~ Binomial(n, p)`.
fn binomial_upper_tail(n: usize, k: usize, p: f64) -> f64 {
    let mut total = 0.0;
    let mut coeff = 1.0f64;
    for j in 0..=n {
        if j > 0 {
            coeff *= (n - j + 1) as f64 / j as f64;
        }
        if j >= k {
            total += coeff * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
        }
    }
    total
}
