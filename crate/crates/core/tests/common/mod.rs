//! Numerical oracles shared by the integration tests. Apart from
//! [`rayleigh_average`], none of these call into the crate.

#![allow(dead_code)]

use coopsense::{ChannelSpec, Counting, ExperimentSpec, FusionRule, ThresholdSweep, UserProfile};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Composite 20-point Gauss-Legendre quadrature over `panels` equal panels.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    thread_local! {
        static RULE: Vec<(f64, f64)> = gauss_legendre(20);
    }
    RULE.with(|rule| {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for i in 0..panels {
            let mid = a + (i as f64 + 0.5) * h;
            total += rule.iter().map(|&(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h;
        }
        total
    })
}

/// Gaussian tail `∫_x^∞ φ(t) dt`.
pub fn q_oracle(x: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    if x >= 0.0 {
        integrate_panels(&phi, x, x + 40.0, 200)
    } else {
        1.0 - q_oracle(-x)
    }
}

/// `Γ(a, x) / Γ(a)` from two quadratures of the gamma integrand, scaled by
/// its peak. For `a < 1` the lower piece substitutes `t = s^(1/a)` to remove
/// the singularity at 0.
pub fn upper_gamma_oracle(a: f64, x: f64) -> f64 {
    let mode = (a - 1.0).max(0.0);
    let ln_peak = if mode > 0.0 { (a - 1.0) * mode.ln() - mode } else { 0.0 };
    let h = |t: f64| if t <= 0.0 { 0.0 } else { ((a - 1.0) * t.ln() - t - ln_peak).exp() };
    let lower = if x == 0.0 {
        0.0
    } else if a < 1.0 {
        let g = |s: f64| (-(s.powf(1.0 / a)) - ln_peak).exp() / a;
        integrate_panels(&g, 0.0, x.powf(a), 400)
    } else {
        integrate_panels(&h, 0.0, x, 400)
    };
    let end = x.max(a) + 60.0 + 20.0 * a.sqrt();
    let upper = integrate_panels(&h, x, end, 800);
    upper / (lower + upper)
}

/// `e^{-z} I_ν(z)` by its power series, summed in the log domain.
pub fn bessel_i_scaled(nu: u32, z: f64) -> f64 {
    if z == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let ln_half = (0.5 * z).ln();
    let terms = (0.5 * z + 20.0 * z.sqrt() + 60.0) as u32;
    let mut ln_term = nu as f64 * ln_half - ln_factorial(nu) - z;
    let mut sum = 0.0;
    for k in 0..terms {
        sum += ln_term.exp();
        ln_term += 2.0 * ln_half - ((k + 1) as f64).ln() - ((k + 1 + nu) as f64).ln();
    }
    sum
}

pub fn ln_factorial(n: u32) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// Marcum `Q_m(a, b)` as the upper-tail integral of the noncentral
/// chi density written with a Bessel function.
pub fn marcum_oracle(m: u32, a: f64, b: f64) -> f64 {
    marcum_oracle_panels(m, a, b, 600)
}

pub fn marcum_oracle_panels(m: u32, a: f64, b: f64, panels: usize) -> f64 {
    if a == 0.0 {
        return upper_gamma_oracle(m as f64, 0.5 * b * b);
    }
    let f = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        // x (x/a)^{m-1} exp(-(x² + a²)/2) I_{m-1}(ax), with e^{ax} pulled out
        let ln = x.ln() + (m as f64 - 1.0) * (x / a).ln() - 0.5 * (x - a) * (x - a);
        ln.exp() * bessel_i_scaled(m - 1, a * x)
    };
    let end = b.max(a) + 40.0 + 3.0 * (m as f64).sqrt();
    integrate_panels(&f, b, end, panels)
}

/// Rayleigh-averaged detection probability by quadrature of the Bessel
/// Marcum integral over the exponential SNR density.
pub fn rayleigh_oracle(n: u32, mean_snr: f64, lambda: f64) -> f64 {
    let f = |g: f64| marcum_oracle_panels(n, (2.0 * g).sqrt(), lambda.sqrt(), 80) * (-g / mean_snr).exp() / mean_snr;
    integrate_panels(&f, 0.0, 40.0 * mean_snr, 40)
}

/// Same average with the crate's `marcum_q` as the integrand, which is fast
/// enough for dense grids. `marcum_q` itself is checked against
/// [`marcum_oracle`].
pub fn rayleigh_average(n: u32, mean_snr: f64, lambda: f64) -> f64 {
    let f = |g: f64| {
        coopsense::marcum_q(n, (2.0 * g).sqrt(), lambda.sqrt()).unwrap().get() * (-g / mean_snr).exp() / mean_snr
    };
    integrate_panels(&f, 0.0, 40.0 * mean_snr, 200)
}

pub fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `users` identical constant channels at `snr_db` with noise power 4.
pub fn identical_users(users: usize, snr_db: f64, sweep: ThresholdSweep, n_trials: usize, rule: Option<FusionRule>) -> ExperimentSpec {
    ExperimentSpec {
        channels: vec![ChannelSpec::constant(snr_db, 4.0).unwrap(); users],
        n_samples: 100,
        normalized: false,
        sweeps: vec![sweep; users],
        n_trials,
        seed: 20_240_601,
        rule,
        counting: Counting::Standard,
        profiles: Vec::new(),
    }
}

/// The three single users at 5, -8 and -10 dB with their own sweeps.
pub fn three_channel_spec(n_trials: usize, counting: Counting) -> ExperimentSpec {
    ExperimentSpec {
        channels: [5.0, -8.0, -10.0].iter().map(|&s| ChannelSpec::constant(s, 4.0).unwrap()).collect(),
        n_samples: 100,
        normalized: false,
        sweeps: vec![
            ThresholdSweep::new(200.0, 600.0, 20.0).unwrap(),
            ThresholdSweep::new(500.0, 900.0, 20.0).unwrap(),
            ThresholdSweep::new(700.0, 1300.0, 20.0).unwrap(),
        ],
        n_trials,
        seed: 1,
        rule: None,
        counting,
        profiles: Vec::new(),
    }
}

pub fn with_last_attacker(mut spec: ExperimentSpec, profile: UserProfile) -> ExperimentSpec {
    let n = spec.channels.len();
    spec.profiles = vec![UserProfile::Honest; n];
    spec.profiles[n - 1] = profile;
    spec
}
