//! Falsified reports and the affirmation/complaint reputation counter.

use crate::detector::LocalReport;
use crate::error::{Error, Result};
use crate::signal::SeededRng;

use super::{fuse_reports, FusionRule};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum UserProfile {
    #[default]
    Honest,
    /// Always reports occupied.
    AlwaysBusy,
    /// Always reports idle.
    AlwaysFree,
    /// Flips the true report with the given probability, independently per round.
    Intermittent { lie_probability: f64 },
}

impl UserProfile {
    pub fn validate(&self) -> Result<()> {
        if let UserProfile::Intermittent { lie_probability } = *self {
            if !(0.0..=1.0).contains(&lie_probability) {
                return Err(Error::validation("lie_probability", "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn is_honest(&self) -> bool {
        matches!(self, UserProfile::Honest)
    }

    /// Probability that the transmitted bit is 1 when the true bit is 1 with
    /// probability `p`.
    pub fn transmitted_probability(&self, p: f64) -> f64 {
        match *self {
            UserProfile::Honest => p,
            UserProfile::AlwaysBusy => 1.0,
            UserProfile::AlwaysFree => 0.0,
            UserProfile::Intermittent { lie_probability: q } => p * (1.0 - q) + (1.0 - p) * q,
        }
    }
}

/// The bit a user actually sends given its true local decision.
pub fn apply_attacker(true_report: bool, profile: UserProfile, rng: &mut SeededRng) -> bool {
    match profile {
        UserProfile::Honest => true_report,
        UserProfile::AlwaysBusy => true,
        UserProfile::AlwaysFree => false,
        UserProfile::Intermittent { lie_probability } => {
            let lie = rng.uniform() < lie_probability;
            true_report ^ lie
        }
    }
}

/// Affirmation and complaint counts for one user.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Reputation {
    pub affirmations: u64,
    pub complaints: u64,
}

impl Reputation {
    /// Laplace-smoothed trust `(a + 1) / (a + c + 2)`.
    pub fn trust(&self) -> f64 {
        (self.affirmations as f64 + 1.0) / ((self.affirmations + self.complaints) as f64 + 2.0)
    }
}

/// Affirms the user when its report agrees with the fused decision,
/// complains otherwise.
pub fn update_reputation(rep: Reputation, report: bool, fused_decision: bool) -> Reputation {
    if report == fused_decision {
        Reputation {
            affirmations: rep.affirmations + 1,
            ..rep
        }
    } else {
        Reputation {
            complaints: rep.complaints + 1,
            ..rep
        }
    }
}

/// Fuses only the reports of users whose trust is at least `trust_floor`.
/// A K-rank quorum is clipped to the number of surviving users.
pub fn fuse_with_trust(
    reports: &[LocalReport],
    reputations: &[Reputation],
    rule: FusionRule,
    trust_floor: f64,
) -> Result<bool> {
    if reports.len() != reputations.len() {
        return Err(Error::domain(format!(
            "{} reports but {} reputations",
            reports.len(),
            reputations.len()
        )));
    }
    if reports.is_empty() {
        return Err(Error::domain("fusion needs at least one report"));
    }
    let trusted: Vec<LocalReport> = reports
        .iter()
        .zip(reputations)
        .filter(|(_, rep)| rep.trust() >= trust_floor)
        .map(|(r, _)| *r)
        .collect();
    if trusted.is_empty() {
        return Err(Error::DegenerateQuorum { floor: trust_floor });
    }
    let rule = match rule {
        FusionRule::KRank(k) => FusionRule::KRank(k.min(trusted.len())),
        other => other,
    };
    fuse_reports(&trusted, rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(b: bool) -> LocalReport {
        LocalReport {
            occupied: b,
            energy: 0.0,
        }
    }

    #[test]
    fn attacker_behaviours() {
        let mut rng = SeededRng::new(0);
        assert!(apply_attacker(false, UserProfile::AlwaysBusy, &mut rng));
        assert!(!apply_attacker(true, UserProfile::AlwaysFree, &mut rng));
        for x in [false, true] {
            assert_eq!(apply_attacker(x, UserProfile::Honest, &mut rng), x);
            let honest_liar = UserProfile::Intermittent { lie_probability: 0.0 };
            assert_eq!(apply_attacker(x, honest_liar, &mut rng), x);
            let liar = UserProfile::Intermittent { lie_probability: 1.0 };
            assert_eq!(apply_attacker(x, liar, &mut rng), !x);
        }
    }

    #[test]
    fn intermittent_lie_rate() {
        let mut rng = SeededRng::new(5);
        let profile = UserProfile::Intermittent { lie_probability: 0.3 };
        let n = 20_000;
        let lies = (0..n).filter(|_| !apply_attacker(true, profile, &mut rng)).count();
        let rate = lies as f64 / n as f64;
        assert!((rate - 0.3).abs() < 4.0 * (0.21f64 / n as f64).sqrt());
        assert!(UserProfile::Intermittent { lie_probability: 1.5 }.validate().is_err());
    }

    #[test]
    fn reputation_updates() {
        let fresh = Reputation::default();
        assert_eq!(fresh.trust(), 0.5);
        let up = update_reputation(fresh, true, true);
        assert_eq!((up.affirmations, up.complaints), (1, 0));
        assert!((up.trust() - 2.0 / 3.0).abs() < 1e-15);
        let down = update_reputation(fresh, true, false);
        assert_eq!((down.affirmations, down.complaints), (0, 1));
        assert!((down.trust() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn trust_filtering() {
        let reports = [report(true), report(false), report(true)];
        let fresh = [Reputation::default(); 3];
        for rule in [FusionRule::And, FusionRule::Or, FusionRule::KRank(2)] {
            assert_eq!(
                fuse_with_trust(&reports, &fresh, rule, 0.3).unwrap(),
                fuse_reports(&reports, rule).unwrap()
            );
        }
        assert!(matches!(
            fuse_with_trust(&reports, &fresh, FusionRule::Or, 0.99),
            Err(Error::DegenerateQuorum { .. })
        ));
        assert!(fuse_with_trust(&reports, &fresh[..2], FusionRule::Or, 0.3).is_err());
    }

    #[test]
    fn always_free_user_is_excluded_after_twenty_rounds() {
        // Five users, user 4 always reports idle while the channel is busy and
        // the honest majority detects it, so the fused decision is occupied.
        let mut reps = [Reputation::default(); 5];
        for _ in 0..20 {
            let bits = [true, true, true, true, false];
            let reports: Vec<LocalReport> = bits.iter().map(|&b| report(b)).collect();
            let fused = fuse_reports(&reports, FusionRule::majority(5)).unwrap();
            for (rep, &bit) in reps.iter_mut().zip(&bits) {
                *rep = update_reputation(*rep, bit, fused);
            }
        }
        assert!(reps[4].trust() < 0.1);
        // attacker would otherwise force And to idle
        let reports: Vec<LocalReport> = [true, true, true, true, false].iter().map(|&b| report(b)).collect();
        assert!(!fuse_reports(&reports, FusionRule::And).unwrap());
        assert!(fuse_with_trust(&reports, &reps, FusionRule::And, 0.3).unwrap());
        // K-rank clipped to the surviving four
        assert!(fuse_with_trust(&reports, &reps, FusionRule::KRank(5), 0.3).unwrap());
    }
}
