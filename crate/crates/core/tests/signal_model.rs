use coopsense::{generate_noise, generate_signal_plus_noise, sample_rayleigh_snr, ChannelSpec, Fading, SeededRng};
use proptest::prelude::*;

fn mean_square(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64
}

#[test]
fn noise_variance_is_within_chi_square_bound() {
    let frame = generate_noise(100, 1.0, &mut SeededRng::new(42)).unwrap();
    assert!((mean_square(&frame.samples) - 1.0).abs() <= 3.0 * (2.0f64 / 100.0).sqrt());
}

#[test]
fn single_sample_frame_is_finite() {
    let frame = generate_noise(1, 1.0, &mut SeededRng::new(9)).unwrap();
    assert_eq!(frame.len(), 1);
    assert!(frame.samples[0].is_finite());
}

#[test]
fn frames_are_reproducible() {
    let a = generate_noise(64, 2.0, &mut SeededRng::new(5)).unwrap();
    let b = generate_noise(64, 2.0, &mut SeededRng::new(5)).unwrap();
    assert_eq!(a, b);
    let a = generate_signal_plus_noise(64, 0.5, 2.0, &mut SeededRng::for_stream(5, 3)).unwrap();
    let b = generate_signal_plus_noise(64, 0.5, 2.0, &mut SeededRng::for_stream(5, 3)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn distinct_streams_differ() {
    let a = generate_noise(8, 1.0, &mut SeededRng::for_stream(5, 0)).unwrap();
    let b = generate_noise(8, 1.0, &mut SeededRng::for_stream(5, 1)).unwrap();
    assert_ne!(a.samples, b.samples);
}

#[test]
fn signal_plus_noise_energy_matches_total_power() {
    let n = 10_000;
    let frame = generate_signal_plus_noise(n, 1.0, 1.0, &mut SeededRng::new(7)).unwrap();
    assert!((mean_square(&frame.samples) - 2.0).abs() <= 3.0 * (2.0 * 4.0 / n as f64).sqrt());
}

/// Two-sample Kolmogorov-Smirnov distance between sorted samples.
fn ks_distance(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn vanishing_signal_is_indistinguishable_from_noise() {
    let frames = 2000;
    let mut h1: Vec<f64> = (0..frames)
        .map(|t| mean_square(&generate_signal_plus_noise(100, 1e-12, 1.0, &mut SeededRng::for_stream(1, t)).unwrap().samples))
        .collect();
    let mut h0: Vec<f64> = (0..frames)
        .map(|t| mean_square(&generate_noise(100, 1.0, &mut SeededRng::for_stream(2, t)).unwrap().samples))
        .collect();
    // 1% critical value of the two-sample KS statistic
    let critical = 1.628 * (2.0 / frames as f64).sqrt();
    assert!(ks_distance(&mut h1, &mut h0) < critical);
}

#[test]
fn rayleigh_snr_passes_kolmogorov_smirnov_against_exponential() {
    let n = 20_000;
    let mean = 2.0;
    let mut rng = SeededRng::new(123);
    let mut draws: Vec<f64> = (0..n).map(|_| sample_rayleigh_snr(mean, &mut rng).unwrap()).collect();
    draws.sort_by(f64::total_cmp);
    let d = draws
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - (-x / mean).exp();
            (cdf - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - cdf).abs())
        })
        .fold(0.0, f64::max);
    // 1% critical value of the one-sample statistic
    assert!(d < 1.628 / (n as f64).sqrt(), "D = {d}");
}

#[test]
fn rayleigh_snr_mean() {
    let mut rng = SeededRng::new(77);
    let n = 100_000;
    let mean = (0..n).map(|_| sample_rayleigh_snr(2.0, &mut rng).unwrap()).sum::<f64>() / n as f64;
    assert!((mean - 2.0).abs() <= 3.0 * 2.0 / (n as f64).sqrt());
}

#[test]
fn invalid_inputs_are_rejected() {
    let mut rng = SeededRng::new(0);
    assert!(generate_noise(0, 1.0, &mut rng).is_err());
    assert!(generate_noise(4, 0.0, &mut rng).is_err());
    assert!(generate_signal_plus_noise(4, 0.0, 1.0, &mut rng).is_err());
    assert!(generate_signal_plus_noise(4, 1.0, -1.0, &mut rng).is_err());
    assert!(sample_rayleigh_snr(0.0, &mut rng).is_err());
    assert!(ChannelSpec::new(0.0, 0.0, Fading::Constant).is_err());
    assert!(ChannelSpec::new(0.0, 1.0, Fading::Rayleigh { mean_snr: -1.0 }).is_err());
}

proptest! {
    #[test]
    fn snr_and_signal_power_agree(snr_db in -30.0f64..30.0, noise in 0.01f64..100.0) {
        let ch = ChannelSpec::constant(snr_db, noise).unwrap();
        prop_assert!((ch.snr_linear() - 10f64.powf(snr_db / 10.0)).abs() <= 1e-12 * ch.snr_linear());
        prop_assert!((ch.signal_power() - ch.snr_linear() * noise).abs() <= 1e-12 * ch.signal_power());
    }

    #[test]
    fn frame_length_and_determinism(n in 1usize..300, seed in any::<u64>(), stream in any::<u64>()) {
        let a = generate_noise(n, 1.0, &mut SeededRng::for_stream(seed, stream)).unwrap();
        let b = generate_noise(n, 1.0, &mut SeededRng::for_stream(seed, stream)).unwrap();
        prop_assert_eq!(a.len(), n);
        prop_assert_eq!(a, b);
    }
}
