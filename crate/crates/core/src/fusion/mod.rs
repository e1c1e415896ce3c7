//! Decision fusion at the fusion center.
//!
//! Hard fusion combines 1-bit local reports with AND, OR or K-rank (at least
//! `k` of `n`) voting. [`fused_probability`] gives the closed-form fused rate
//! for independent, possibly heterogeneous users; [`brute_force_fused_probability`]
//! recomputes it by enumerating every joint outcome and is kept as an oracle.

mod sprt;
mod ssdf;

pub use sprt::{majority_vote_sample_size, sprt_run, SprtConfig, SprtOutcome, SprtState};
pub use ssdf::{apply_attacker, fuse_with_trust, update_reputation, Reputation, UserProfile};

use crate::detector::LocalReport;
use crate::error::{Error, Result};
use crate::special::Probability;

/// Largest user count [`brute_force_fused_probability`] enumerates.
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FusionRule {
    And,
    Or,
    /// Occupied when at least `k` users report occupied.
    KRank(usize),
}

impl FusionRule {
    /// Minimum number of occupied reports out of `n` that yields occupied.
    pub fn quorum(&self, n: usize) -> Result<usize> {
        if n == 0 {
            return Err(Error::domain("fusion needs at least one report"));
        }
        match *self {
            FusionRule::And => Ok(n),
            FusionRule::Or => Ok(1),
            FusionRule::KRank(k) if (1..=n).contains(&k) => Ok(k),
            FusionRule::KRank(k) => Err(Error::domain(format!("K-rank k = {k} is outside 1..={n}"))),
        }
    }

    /// Majority vote over `n` users.
    pub fn majority(n: usize) -> FusionRule {
        FusionRule::KRank(n / 2 + 1)
    }
}

impl std::fmt::Display for FusionRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FusionRule::And => f.write_str("and"),
            FusionRule::Or => f.write_str("or"),
            FusionRule::KRank(k) => write!(f, "k_rank({k})"),
        }
    }
}

pub fn fuse_bits(bits: &[bool], rule: FusionRule) -> Result<bool> {
    let quorum = rule.quorum(bits.len())?;
    Ok(bits.iter().filter(|&&b| b).count() >= quorum)
}

pub fn fuse_reports(reports: &[LocalReport], rule: FusionRule) -> Result<bool> {
    let bits: Vec<bool> = reports.iter().map(|r| r.occupied).collect();
    fuse_bits(&bits, rule)
}

/// Fused probability of an occupied decision for independent users with
/// the given per-user probabilities. Feed detection probabilities to get
/// `Q_d`, false-alarm probabilities to get `Q_f`.
pub fn fused_probability(probs: &[Probability], rule: FusionRule) -> Result<Probability> {
    let quorum = rule.quorum(probs.len())?;
    let value = match rule {
        FusionRule::And => probs.iter().map(|p| p.get()).product(),
        FusionRule::Or => 1.0 - probs.iter().map(|p| 1.0 - p.get()).product::<f64>(),
        FusionRule::KRank(_) => {
            // Poisson-binomial distribution of the occupied count.
            let mut dist = vec![0.0; probs.len() + 1];
            dist[0] = 1.0;
            for (i, p) in probs.iter().enumerate() {
                let p = p.get();
                for c in (0..=i + 1).rev() {
                    let stay = dist[c] * (1.0 - p);
                    let rise = if c > 0 { dist[c - 1] * p } else { 0.0 };
                    dist[c] = stay + rise;
                }
            }
            dist[quorum..].iter().sum()
        }
    };
    Ok(Probability::clamped(value))
}

/// Fused probability by summing over all `2^n` report vectors.
pub fn brute_force_fused_probability(probs: &[Probability], rule: FusionRule) -> Result<Probability> {
    if probs.len() > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            len: probs.len(),
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    rule.quorum(probs.len())?;
    let n = probs.len();
    let mut bits = vec![false; n];
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        let mut weight = 1.0;
        for (i, (bit, p)) in bits.iter_mut().zip(probs).enumerate() {
            *bit = mask >> i & 1 == 1;
            weight *= if *bit { p.get() } else { 1.0 - p.get() };
        }
        if fuse_bits(&bits, rule)? {
            total += weight;
        }
    }
    Ok(Probability::clamped(total))
}
