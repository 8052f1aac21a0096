// SPDX-License-Identifier: Apache-2.0

use cheb_core::PrimeTable;
use proptest::prelude::*;
use std::sync::OnceLock;

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::build(100_000).unwrap())
}

fn naive_is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[test]
fn psi_minus_theta_is_higher_power_logs() {
    let t = table();
    let mut higher = 0.0;
    let mut n_prev = 1u64;
    for x in (1..=100_000u64).step_by(7).chain([100_000]) {
        for n in n_prev + 1..=x {
            if !naive_is_prime(n) && t.von_mangoldt(n) > 0.0 {
                higher += t.von_mangoldt(n);
            }
        }
        n_prev = x;
        let lhs = t.psi(x as f64).unwrap() - t.theta(x as f64).unwrap();
        assert!((lhs - higher).abs() < 1e-8, "x = {x}: {lhs} vs {higher}");
    }
}

#[test]
fn big_pi_minus_pi_is_r_x1_everywhere() {
    let t = table();
    for x in 1..=100_000u64 {
        let x = x as f64;
        let r = t.big_pi(x).unwrap() - t.pi(x).unwrap() as f64;
        assert!((r - t.r_x1(x).unwrap()).abs() < 1e-9, "x = {x}");
    }
}

/// R(x,1) − π(√x)/2 = Σ_{k≥3} π(x^{1/k})/k, bounded termwise by π(y) < 1.25506·y/log y.
#[test]
fn r_x1_first_order() {
    let t = table();
    for k in 0..50 {
        let x = 1e3 * 100f64.powf(k as f64 / 49.0);
        let main = t.pi(x.sqrt()).unwrap() as f64 / 2.0;
        let bound = 1.25506 / x.ln() * (x.cbrt() + x.log2() * x.powf(0.25));
        assert!((t.r_x1(x).unwrap() - main).abs() <= bound, "x = {x}");
    }
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("primes.bin");
    let t = PrimeTable::build(50_000).unwrap();
    t.write_cache(&path).unwrap();
    let back = PrimeTable::read_cache(&path).unwrap();
    assert_eq!(back.x_max(), 50_000);
    assert_eq!(back.primes(), t.primes());
    assert_eq!(back.psi(50_000.0).unwrap(), t.psi(50_000.0).unwrap());
}

proptest! {
    #[test]
    fn pi_matches_trial_division(n in 0u64..100_000) {
        let t = table();
        prop_assert_eq!(t.is_prime(n), naive_is_prime(n));
        let direct = t.primes().iter().filter(|&&p| p <= n).count() as u64;
        prop_assert_eq!(t.pi(n as f64).unwrap(), direct);
    }

    #[test]
    fn counting_functions_are_monotone(a in 0.0f64..1e5, b in 0.0f64..1e5) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let t = table();
        prop_assert!(t.pi(lo).unwrap() <= t.pi(hi).unwrap());
        prop_assert!(t.psi(lo).unwrap() <= t.psi(hi).unwrap());
        prop_assert!(t.theta(lo).unwrap() <= t.psi(lo).unwrap() + 1e-12);
    }

    #[test]
    fn small_tables_agree_with_large(x_max in 2u64..5000, x in 0u64..5000) {
        let small = PrimeTable::build(x_max).unwrap();
        let x = x.min(x_max) as f64;
        prop_assert_eq!(small.pi(x).unwrap(), table().pi(x).unwrap());
        prop_assert!((small.big_pi(x).unwrap() - table().big_pi(x).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn beyond_range_is_an_error() {
    assert!(table().pi(100_001.0).is_err());
}
