// SPDX-License-Identifier: Apache-2.0

use cheb_core::explicit::{build_model, dirichlet_integral_check, Discrepancy, DiscrepancyModel};
use cheb_core::{Complex64, ModelOptions, PrimeSetSpec, PrimeTable, Reference, ZeroDb};
use proptest::prelude::*;
use std::sync::{Mutex, OnceLock};

fn table() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::build(10_000_000).unwrap())
}

fn db() -> &'static Mutex<ZeroDb> {
    static DB: OnceLock<Mutex<ZeroDb>> = OnceLock::new();
    DB.get_or_init(|| Mutex::new(ZeroDb::new()))
}

fn model(set: &str, reference: &str, height: f64) -> DiscrepancyModel {
    let set: PrimeSetSpec = set.parse().unwrap();
    let reference: Reference = reference.parse().unwrap();
    build_model(table(), &set, &reference, &mut db().lock().unwrap(), height, ModelOptions::default()).unwrap()
}

/// Composite Simpson on each unit interval, where Δ is smooth; 10⁶ panels to x = 10⁴.
fn simpson_oracle(d: &Discrepancy, x: f64, panels_per_unit: usize) -> f64 {
    let n = x as usize;
    let mut pts = Vec::new();
    for k in 2..n {
        let (a, b) = (k as f64 + 1e-12, (k + 1) as f64 - 1e-12);
        let h = (b - a) / panels_per_unit as f64;
        for j in 0..=panels_per_unit {
            pts.push(a + j as f64 * h);
        }
    }
    let vals = d.delta_on_grid(&pts).unwrap();
    let m = panels_per_unit + 1;
    let mut total = 0.0;
    for chunk in vals.chunks(m) {
        let h = (1.0 - 2e-12) / panels_per_unit as f64;
        let mut s = chunk[0].re + chunk[m - 1].re;
        for (j, v) in chunk.iter().enumerate().take(m - 1).skip(1) {
            s += if j % 2 == 1 { 4.0 } else { 2.0 } * v.re;
        }
        total += s * h / 3.0;
    }
    total / x
}

#[test]
fn m_average_matches_quadrature_oracle() {
    for (set, reference, panels) in
        [("residue q=4 classes=3", "pi-half", 100), ("residue q=4 classes=3", "li", 20), ("podd", "pi-half", 100)]
    {
        let d = Discrepancy::new(table(), &set.parse().unwrap(), &reference.parse().unwrap()).unwrap();
        let exact = d.m_average(1e4).unwrap();
        let oracle = simpson_oracle(&d, 1e4, panels);
        assert!((exact - oracle).abs() < 1e-6, "{set} vs {reference}: {exact} vs {oracle}");
    }
}

#[test]
fn jump_census_sees_every_prime() {
    let t = table();
    for (set, density) in [("residue q=4 classes=3", 0.5), ("residue q=5 classes=1,4", 0.5), ("residue q=12 classes=5", 0.25)] {
        let d = Discrepancy::new(t, &set.parse().unwrap(), &"pi".parse().unwrap()).unwrap();
        let jumps = d.jump_census(1e5).unwrap() as f64;
        let pi = t.pi(1e5).unwrap() as f64;
        assert!(jumps >= (1.0 - density) * pi - 2.0, "{set}: {jumps} jumps, pi = {pi}");
    }
}

#[test]
fn predictions_are_positive_unless_degenerate() {
    for (q, classes) in [(3, "1"), (3, "2"), (4, "1"), (5, "1,4"), (5, "2"), (8, "1,3"), (8, "7")] {
        let m = model(&format!("residue q={q} classes={classes}"), "pi", 30.0);
        assert!(!m.is_degenerate());
        assert!(m.prediction(false) > 0.0 && m.prediction(true) > 0.0, "q = {q}, classes {classes}");
    }
    let full = model("residue q=4 classes=1,3 add=2", "pi", 30.0);
    assert!(full.is_degenerate());
    assert_eq!(full.prediction(false), 0.0);
}

#[test]
fn zero_sums_are_real_for_real_sets() {
    for set in ["residue q=5 classes=2", "residue q=7 classes=1,2,4", "residue q=12 classes=1,11"] {
        let m = model(set, "li", 40.0);
        for k in 0..50 {
            let y = 1.0 + 0.3 * k as f64;
            let s: Complex64 =
                m.terms.iter().map(|t| t.alpha * Complex64::from_polar(1.0, t.gamma * y) / t.rho()).sum::<Complex64>() + m.nu;
            assert!(s.im.abs() <= 1e-9, "{set}, y = {y}: {s}");
        }
    }
}

#[test]
fn alpha_bounded_by_character_weights() {
    for set in ["residue q=5 classes=2", "residue q=8 classes=3,5", "residue q=11 classes=1,3,4,5,9"] {
        let m = model(set, "li", 40.0);
        let bound = m.alpha_bound();
        assert!(m.terms.iter().all(|t| t.alpha.norm() <= bound + 1e-12), "{set}");
    }
}

/// Changing the reference from π/2 to li/2 only touches ζ's zeros and ν.
#[test]
fn reference_swap_keeps_nonprincipal_alphas() {
    let a = model("residue q=4 classes=3", "pi-half", 100.0);
    let b = model("residue q=4 classes=3", "li*1/2", 100.0);
    let coeff = |m: &DiscrepancyModel, q: u64| m.coefficients.iter().find(|(d, _)| d.modulus == q).map(|(_, c)| *c);
    assert_eq!(coeff(&a, 4), coeff(&b, 4));
    assert!((a.nu - b.nu - 0.5).norm() < 1e-15, "{} vs {}", a.nu, b.nu);
    // the two discrepancies differ by exactly (li − π)/2 in normalized units
    for k in 0..200 {
        let x = 2.0 + k as f64 * 49_999.3;
        let gap = a.delta(x).unwrap() - b.delta(x).unwrap();
        let expect = 0.5 * (cheb_core::sieve::li(x).unwrap() - table().pi(x).unwrap() as f64) * x.ln() / x.sqrt();
        assert!((gap - expect).abs() <= 1e-9 * (1.0 + expect.abs()), "x = {x}: {gap} vs {expect}");
    }
}

#[test]
fn dirichlet_gap_shrinks_with_real_part() {
    let t = table();
    let set: PrimeSetSpec = "residue q=4 classes=3".parse().unwrap();
    let two = dirichlet_integral_check(t, &set, Complex64::new(2.0, 0.0), 1e6).unwrap();
    let three = dirichlet_integral_check(t, &set, Complex64::new(3.0, 0.0), 1e6).unwrap();
    assert!(two.gap <= two.tail_bound && three.gap <= three.tail_bound);
    assert!(three.tail_bound * 10.0 <= two.tail_bound);
    let empty = dirichlet_integral_check(t, &"residue q=4 classes=".parse().unwrap(), Complex64::new(2.0, 1.0), 1e5);
    if let Ok(c) = empty {
        assert!(c.lhs.norm() < 1e-15 && c.rhs.norm() < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_vanishes_for_the_full_set(x in 2.0f64..1e7) {
        let d = Discrepancy::new(table(), &"residue q=4 classes=1,3 add=2".parse().unwrap(), &"pi".parse().unwrap()).unwrap();
        prop_assert_eq!(d.delta(x).unwrap(), 0.0);
    }

    #[test]
    fn podd_delta_is_tiny(x in 1e3f64..1e7) {
        let d = Discrepancy::new(table(), &PrimeSetSpec::OddIndexed, &"pi-half".parse().unwrap()).unwrap();
        prop_assert!(d.delta(x).unwrap().abs() <= 0.5 * x.ln() / x.sqrt() + 1e-15);
    }
}
