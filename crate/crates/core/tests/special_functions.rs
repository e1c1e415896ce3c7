mod common;

use common::{marcum_oracle, q_oracle, upper_gamma_oracle};
use coopsense::special::ln_gamma;
use coopsense::{gaussian_q, gaussian_q_inv, marcum_q, reg_lower_gamma, reg_upper_gamma, Probability};
use proptest::prelude::*;

fn p(v: f64) -> Probability {
    Probability::new(v).unwrap()
}

#[test]
fn q_examples() {
    assert_eq!(gaussian_q(0.0).unwrap().get(), 0.5);
    assert!(gaussian_q(8.0).unwrap().get() < 1e-15);
    let oracle = q_oracle(1.281552);
    assert!((oracle - 0.1).abs() < 1e-6);
    assert!((gaussian_q(1.281552).unwrap().get() - oracle).abs() < 1e-12);
    assert!(gaussian_q(f64::NAN).is_err());
    assert!(gaussian_q(f64::INFINITY).is_err());
}

#[test]
fn q_matches_quadrature_on_a_grid() {
    for i in -60..=80 {
        let x = i as f64 * 0.1;
        let got = gaussian_q(x).unwrap().get();
        let want = q_oracle(x);
        assert!((got - want).abs() <= 1e-13 + 1e-10 * want, "x = {x}: {got} vs {want}");
    }
}

#[test]
fn q_inverse_examples() {
    assert_eq!(gaussian_q_inv(p(0.5)).unwrap(), 0.0);
    // bisection on the quadrature oracle
    let (mut lo, mut hi) = (0.0, 5.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if q_oracle(mid) > 0.1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = gaussian_q_inv(p(0.1)).unwrap();
    assert!((x - 0.5 * (lo + hi)).abs() < 1e-9);
    assert!((x - 1.281552).abs() < 1e-6);
    assert!((gaussian_q_inv(p(0.9)).unwrap() + x).abs() < 1e-12);
    assert!(gaussian_q_inv(p(0.0)).is_err());
    assert!(gaussian_q_inv(p(1.0)).is_err());
}

#[test]
#[allow(clippy::approx_constant)]
fn upper_gamma_examples() {
    assert_eq!(reg_upper_gamma(3.0, 0.0).unwrap().get(), 1.0);
    assert!((reg_upper_gamma(1.0, 0.693147).unwrap().get() - 0.5).abs() < 1e-6);
    let want = upper_gamma_oracle(2.5, 3.0);
    assert!((reg_upper_gamma(2.5, 3.0).unwrap().get() - want).abs() < 1e-10, "{want}");
    assert!(reg_upper_gamma(0.0, 1.0).is_err());
    assert!(reg_upper_gamma(1.0, -1.0).is_err());
}

#[test]
fn upper_gamma_matches_quadrature_on_a_grid() {
    for &a in &[0.5, 1.0, 2.5, 5.0, 10.0, 37.5, 100.0] {
        for &x in &[0.1, 0.5, 1.0, 3.0, 7.0, 12.0, 40.0, 95.0, 130.0] {
            let got = reg_upper_gamma(a, x).unwrap().get();
            let want = upper_gamma_oracle(a, x);
            assert!((got - want).abs() < 1e-9, "a = {a}, x = {x}: {got} vs {want}");
        }
    }
}

#[test]
fn ln_gamma_on_integers_and_half_integers() {
    let mut fact = 0.0;
    for n in 1..60u32 {
        assert!((ln_gamma(n as f64) - fact).abs() < 1e-10 * fact.max(1.0));
        fact += (n as f64).ln();
    }
    assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
}

#[test]
fn marcum_examples() {
    assert_eq!(marcum_q(5, 3.0, 0.0).unwrap().get(), 1.0);
    assert!((marcum_q(1, 0.0, 1.0).unwrap().get() - (-0.5f64).exp()).abs() < 1e-14);
    for b in [1.0, 2.0, 3.0] {
        let direct = reg_upper_gamma(4.0, 0.5 * b * b).unwrap().get();
        assert_eq!(marcum_q(4, 0.0, b).unwrap().get(), direct);
        assert!((direct - upper_gamma_oracle(4.0, 0.5 * b * b)).abs() < 1e-10);
    }
    assert!(marcum_q(0, 1.0, 1.0).is_err());
    assert!(marcum_q(1, -1.0, 1.0).is_err());
}

#[test]
fn marcum_matches_bessel_quadrature() {
    for &m in &[1u32, 2, 5, 10, 20] {
        for &a in &[0.3, 1.0, 2.5, 6.0, 12.0] {
            for &b in &[0.5, 1.5, 3.0, 6.0, 10.0, 16.0] {
                let got = marcum_q(m, a, b).unwrap().get();
                let want = marcum_oracle(m, a, b);
                assert!((got - want).abs() < 1e-9, "m = {m}, a = {a}, b = {b}: {got} vs {want}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn q_is_symmetric(x in -30.0f64..30.0) {
        let s = gaussian_q(x).unwrap().get() + gaussian_q(-x).unwrap().get();
        prop_assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn q_is_non_increasing(x in -30.0f64..30.0, dx in 0.0f64..2.0) {
        prop_assert!(gaussian_q(x + dx).unwrap().get() <= gaussian_q(x).unwrap().get());
    }

    #[test]
    fn q_inverse_round_trips(v in 1e-12f64..(1.0 - 1e-12)) {
        let x = gaussian_q_inv(p(v)).unwrap();
        let back = gaussian_q(x).unwrap().get();
        prop_assert!((back - v).abs() <= 1e-12 * v.min(1.0 - v).max(1e-300) + 1e-15, "{v} -> {x} -> {back}");
    }

    #[test]
    fn gamma_halves_sum_to_one(a in 0.05f64..300.0, x in 0.0f64..400.0) {
        let s = reg_upper_gamma(a, x).unwrap().get() + reg_lower_gamma(a, x).unwrap().get();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn upper_gamma_is_non_increasing_in_x(a in 0.05f64..200.0, x in 0.0f64..300.0, dx in 0.0f64..5.0) {
        prop_assert!(reg_upper_gamma(a, x + dx).unwrap().get() <= reg_upper_gamma(a, x).unwrap().get() + 1e-15);
    }

    #[test]
    fn marcum_is_monotone(m in 1u32..40, a in 0.0f64..20.0, b in 0.0f64..25.0, d in 0.0f64..2.0) {
        let base = marcum_q(m, a, b).unwrap().get();
        prop_assert!(marcum_q(m, a + d, b).unwrap().get() >= base - 1e-13);
        prop_assert!(marcum_q(m, a, b + d).unwrap().get() <= base + 1e-13);
        prop_assert!(marcum_q(m + 1, a, b).unwrap().get() >= base - 1e-13);
    }
}
