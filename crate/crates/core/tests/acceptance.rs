// SPDX-License-Identifier: Apache-2.0

//! Acceptance criteria, each run at its stated tolerance. Prints one line per
//! criterion and exits non-zero if any fails.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use cheb_core::arith::{euler_phi, gcd, kronecker};
use cheb_core::characters::cyclotomic::CyclotomicSum;
use cheb_core::counting::{pi_progression, psi_chi, psi_progression};
use cheb_core::explicit::{
    build_model, calibrate_truncation, dirichlet_integral_check, empirical_mean_squares, Discrepancy, ModelOptions,
    Reference,
};
use cheb_core::frobenius::{census, classify_quadratic, dedekind_pi, lookup, QuadraticField, Splitting};
use cheb_core::lfunc::{find_zeros, zero_count_estimate, ZeroDb};
use cheb_core::primesets::{podd_identity_check, PrimeSetSpec};
use cheb_core::sieve::li;
use cheb_core::{character_group, Complex64, PrimeTable};

type Outcome = Result<String, String>;
type Check = Result<(), String>;

fn table_1e7() -> &'static PrimeTable {
    static T: OnceLock<PrimeTable> = OnceLock::new();
    T.get_or_init(|| PrimeTable::build(10_000_000).expect("sieve"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// 1. P_odd(x) − π(x)/2 ∈ {0, 1/2} with the parity case split, all x ≤ 10⁶.
fn podd_identity() -> Outcome {
    let t = PrimeTable::build(1_000_000).map_err(e)?;
    let members = PrimeSetSpec::OddIndexed.members(&t, 1e6).map_err(e)?;
    let primes = t.primes();
    let (mut ip, mut im) = (0usize, 0usize);
    for x in 1..=1_000_000u64 {
        while ip < primes.len() && primes[ip] <= x {
            ip += 1;
        }
        while im < members.len() && members[im] <= x {
            im += 1;
        }
        let diff = im as f64 - ip as f64 / 2.0;
        // p_{2j−1} ≤ x < p_{2j}  ⇔  π(x) odd
        let expect = if ip % 2 == 1 { 0.5 } else { 0.0 };
        ensure(diff == expect, || format!("x = {x}: difference {diff}, expected {expect}"))?;
        let lib = podd_identity_check(&t, x as f64).map_err(e)?;
        ensure(lib == expect, || format!("library check at x = {x} returned {lib}"))?;
    }
    Ok("all 10^6 integer points".into())
}

/// 2. Small counts and the partition identity for x ≤ 10⁵.
fn counting_cross_checks() -> Outcome {
    let t = PrimeTable::build(100_000).map_err(e)?;
    let small = (t.pi(100.0).map_err(e)?, pi_progression(&t, 100.0, 4, 1).map_err(e)?, pi_progression(&t, 100.0, 4, 3).map_err(e)?);
    ensure(small == (25, 11, 13), || format!("pi(100), pi(100;4,1), pi(100;4,3) = {small:?}"))?;
    use rayon::prelude::*;
    for q in [3u64, 4, 5, 12] {
        let ramified = |x: u64| t.primes().iter().take_while(|&&p| p <= x).filter(|&&p| q % p == 0).count() as u64;
        // both sides only change at primes
        let bad = t.primes().par_iter().find_any(|&&p| {
            let x = p as f64;
            let total: u64 = (0..q as i64).filter(|&a| gcd(a as u64, q) == 1).map(|a| pi_progression(&t, x, q, a).unwrap()).sum();
            total + ramified(p) != t.pi(x).unwrap()
        });
        ensure(bad.is_none(), || format!("partition identity fails at q = {q}, x = {bad:?}"))?;
    }
    Ok("pi(100)=25, 11, 13; partition exact at every prime <= 10^5".into())
}

/// 3. Exact orthogonality for q ≤ 100 and the extraction identity for x ≤ 10⁴.
fn characters_and_extraction() -> Outcome {
    for q in 1..=100u64 {
        let g = character_group(q).map_err(e)?;
        ensure(g.len() as u64 == euler_phi(q), || format!("q = {q}: {} characters", g.len()))?;
        for a in &g {
            for b in &g {
                let mut m = 1u64;
                for r in 1..=q {
                    if let (Some(u), Some(v)) = (a.eval_exact(r as i64), b.eval_exact(r as i64)) {
                        m = num_integer_lcm(m, num_integer_lcm(u.den, v.den));
                    }
                }
                let mut s = CyclotomicSum::new(m);
                for r in 0..q {
                    if let (Some(u), Some(v)) = (a.eval_exact(r as i64), b.eval_exact(r as i64)) {
                        s.add_root(u * v.conj(), 1);
                    }
                }
                let expect = if a.index() == b.index() { euler_phi(q) as i64 } else { 0 };
                ensure(s.equals_integer(expect), || format!("orthogonality fails for {} and {}", a.descriptor(), b.descriptor()))?;
            }
        }
    }
    let t = PrimeTable::build(10_000).map_err(e)?;
    let mut worst = 0.0f64;
    for q in [3u64, 4, 5, 7, 8, 12] {
        let g = character_group(q).map_err(e)?;
        let points: Vec<f64> = t.prime_powers().map(|pp| pp.value as f64).chain([10_000.0]).collect();
        for &x in &points {
            let psis: Vec<Complex64> = g.iter().map(|chi| psi_chi(&t, chi, x).unwrap()).collect();
            for a in (1..q).filter(|&a| gcd(a, q) == 1) {
                let via: Complex64 = g.iter().zip(&psis).map(|(chi, p)| chi.eval_u64(a).conj() * p).sum::<Complex64>()
                    / euler_phi(q) as f64;
                let direct = psi_progression(&t, x, q, a as i64).map_err(e)?;
                worst = worst.max((via - direct).norm());
            }
        }
    }
    ensure(worst <= 1e-8, || format!("extraction identity error {worst:e}"))?;
    Ok(format!("orthogonality exact for q <= 100; extraction error {worst:.1e}"))
}

fn num_integer_lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `L(s, χ₄) = Σ (−1)^k (2k+1)^{−s}` by Cohen–Villegas–Zagier acceleration.
fn l_chi4_alternating(s: Complex64) -> Complex64 {
    let n = 60;
    let d0 = (3.0 + 8f64.sqrt()).powi(n);
    let d = (d0 + 1.0 / d0) / 2.0;
    let (mut b, mut c) = (-1.0f64, -d);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        c = b - c;
        sum += c * Complex64::new(2.0 * k as f64 + 1.0, 0.0).powc(-s);
        b *= (k as f64 + n as f64) * (k as f64 - n as f64) / ((k as f64 + 0.5) * (k as f64 + 1.0));
    }
    sum / d
}

/// 4. Certified zeros for q ∈ {1, 3, 4} to T = 100.
fn zero_certification() -> Outcome {
    let height: f64 = 100.0;
    let slack = 3.0 + height.ln();
    let mut report = Vec::new();
    for q in [1u64, 3, 4] {
        for chi in character_group(q).map_err(e)?.iter().filter(|c| c.is_primitive()) {
            let z = find_zeros(chi, height).map_err(e)?;
            let count = z.count_both_signs(height) as f64;
            let main = zero_count_estimate(q, height);
            ensure(z.certified, || format!("{} not certified: {:?}", chi.descriptor(), z.diagnostics))?;
            ensure(z.residual_bound <= 1e-8, || format!("{} residual {:e}", chi.descriptor(), z.residual_bound))?;
            ensure((count - main).abs() <= slack, || format!("{}: N = {count}, main term {main:.2}", chi.descriptor()))?;
            report.push(format!("{}: N={count} main={main:.2}", chi.descriptor()));
        }
    }
    // lowest zero of L(s, χ₄): coarse grid on |L|, then ternary search with an independent series
    let chi4 = &character_group(4).map_err(e)?[1];
    let lowest = find_zeros(chi4, 10.0).map_err(e)?.ordinates[0];
    let f = |t: f64| l_chi4_alternating(Complex64::new(0.5, t)).norm();
    let grid: Vec<f64> = (0..100).map(|k| 1.0 + k as f64 * 0.1).collect();
    let k = (1..grid.len() - 1)
        .find(|&k| f(grid[k]) < f(grid[k - 1]) && f(grid[k]) < f(grid[k + 1]) && f(grid[k]) < 0.1)
        .ok_or("oracle found no minimum")?;
    let (mut a, mut b) = (grid[k - 1], grid[k + 1]);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let oracle = (a + b) / 2.0;
    ensure((lowest - oracle).abs() <= 1e-6, || format!("lowest chi_4 zero {lowest} vs oracle {oracle}"))?;
    report.push(format!("lowest chi_4 zero {lowest:.9} (oracle {oracle:.9})"));
    Ok(report.join("; "))
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| (a.ln() + (b.ln() - a.ln()) * k as f64 / (n - 1) as f64).exp().clamp(a, b)).collect()
}

/// 5. Truncation error of the explicit formula for χ₄ shrinks by ≥ 1.5 when T doubles.
fn truncation_convergence() -> Outcome {
    let t = PrimeTable::build(100_000).map_err(e)?;
    let chi4 = &character_group(4).map_err(e)?[1];
    let zeros = find_zeros(chi4, 200.0).map_err(e)?;
    let xs = log_grid(100.0, 1e5, 2000);
    let (e100, c100) = calibrate_truncation(&t, chi4, &zeros, 100.0, &xs).map_err(e)?;
    let (e200, c200) = calibrate_truncation(&t, chi4, &zeros, 200.0, &xs).map_err(e)?;
    let m100 = e100.iter().cloned().fold(0.0, f64::max);
    let m200 = e200.iter().cloned().fold(0.0, f64::max);
    let ratio = m100 / m200;
    let detail = format!("max error {m100:.3} (T=100) vs {m200:.3} (T=200), ratio {ratio:.3}; C_q {c100:.2e}/{c200:.2e}");
    ensure(ratio >= 1.5, || detail.clone())?;
    Ok(detail)
}

/// 6 and 7. Mean squares for {3 mod 4} vs π/2 and for P_odd, x_max = 10⁷, T = 100.
fn mean_squares() -> (Outcome, Outcome) {
    let run = || -> Result<(String, String, Check, Check), String> {
        let t = table_1e7();
        let set = PrimeSetSpec::residue(4, &[3]).map_err(e)?;
        let mut db = ZeroDb::new();
        let model = build_model(t, &set, &"pi-half".parse().map_err(e)?, &mut db, 100.0, ModelOptions::default())
            .map_err(e)?;
        let y = 1e7f64.ln();
        let un = model.mean_square_unsmoothed(y).map_err(e)?;
        let sm = model.mean_square_smoothed(y).map_err(e)?;
        let podd = Discrepancy::new(t, &PrimeSetSpec::OddIndexed, &"pi-half".parse().map_err(e)?).map_err(e)?;
        let (podd_sm, podd_un) = empirical_mean_squares(&podd, y, 1e-3).map_err(e)?;
        let r_un = un.empirical / un.prediction;
        let r_sm = sm.empirical / sm.prediction;
        let detail6 = format!(
            "nu {}; unsmoothed {:.4} vs {:.4} (ratio {r_un:.3}); smoothed {:.4} vs {:.4} (ratio {r_sm:.3}); P_odd {podd_un:.2e}/{podd_sm:.2e}",
            model.nu.re,
            un.empirical, un.prediction, sm.empirical, sm.prediction
        );
        let within = |r: f64| (0.5..=2.0).contains(&r);
        let nu_ok = (model.nu - Complex64::new(0.5, 0.0)).norm() < 1e-12;
        let ok6 = if nu_ok && within(r_un) && within(r_sm) && podd_un < 0.01 && podd_sm < 0.01 {
            Ok(())
        } else {
            Err(detail6.clone())
        };
        let bound = 50.0 * 100f64.ln().powi(2) / 100.0;
        let detail7 = format!("residual mean square {:.4} <= {bound:.3}", un.residual);
        let ok7 = if un.residual <= bound { Ok(()) } else { Err(detail7.clone()) };
        Ok((detail6, detail7, ok6, ok7))
    };
    match run() {
        Ok((d6, d7, ok6, ok7)) => (ok6.map(|_| d6), ok7.map(|_| d7)),
        Err(err) => (Err(err.clone()), Err(err)),
    }
}

/// 8. Class frequencies for x³ − 2 and the quadratic residue reduction.
fn chebotarev_census() -> Outcome {
    let t = PrimeTable::build(1_000_000).map_err(e)?;
    let s3 = lookup("s3_x3m2").map_err(e)?;
    let rows = census(&t, &s3, 1e6).map_err(e)?;
    let mut parts = Vec::new();
    for r in &rows {
        ensure((r.frequency - r.expected).abs() <= 0.01, || format!("{}: {} vs {}", r.class_id, r.frequency, r.expected))?;
        parts.push(format!("{} {:.4}", r.class_id, r.frequency));
    }
    let f = QuadraticField::new(-1).map_err(e)?;
    for &p in t.primes() {
        let split = classify_quadratic(p, &f) == Splitting::Split;
        ensure(split == (p % 4 == 1), || format!("Q(i) classifier disagrees at p = {p}"))?;
    }
    for d in [-1i64, -2, -3, -5, -7, 2, 3, 5] {
        let field = QuadraticField::new(d).map_err(e)?;
        let disc = field.discriminant();
        for &p in t.primes().iter().filter(|&&p| disc.unsigned_abs() % p != 0) {
            let class = classify_quadratic(p, &field);
            let residue = kronecker(disc, p % disc.unsigned_abs());
            ensure((class == Splitting::Split) == (residue == 1), || format!("d = {d}, p = {p}"))?;
        }
    }
    Ok(parts.join(", "))
}

/// 9. Prime ideals of ℚ(i).
fn dedekind_counting() -> Outcome {
    let t = table_1e7();
    let f = QuadraticField::new(-1).map_err(e)?;
    let small = dedekind_pi(t, &f, 10.0).map_err(e)?;
    ensure(small == 4, || format!("pi(10, Q(i)) = {small}"))?;
    let ratio = dedekind_pi(t, &f, 1e7).map_err(e)? as f64 / li(1e7).map_err(e)?;
    ensure((0.98..=1.02).contains(&ratio), || format!("ratio {ratio}"))?;
    Ok(format!("pi(10, Q(i)) = 4; pi(10^7, Q(i))/Li(10^7) = {ratio:.5}"))
}

/// 10. Dirichlet-series identity at s = 2.
fn dirichlet_identity() -> Outcome {
    let t = PrimeTable::build(1_000_000).map_err(e)?;
    let set = PrimeSetSpec::residue(4, &[3]).map_err(e)?;
    let c = dirichlet_integral_check(&t, &set, Complex64::new(2.0, 0.0), 1e6).map_err(e)?;
    ensure(c.gap <= 1e-3, || format!("gap {:e}", c.gap))?;
    Ok(format!("lhs {:.12}, rhs {:.12}, gap {:.2e} (tail bound {:.2e})", c.lhs.re, c.rhs.re, c.gap, c.tail_bound))
}

/// 11. Full set of primes: zero discrepancy, zero predictions.
fn degenerate_guard() -> Outcome {
    let t = table_1e7();
    let set: PrimeSetSpec = "residue q=4 classes=1,3 add=2".parse().map_err(e)?;
    let mut db = ZeroDb::new();
    let model = build_model(t, &set, &Reference::Pi(None), &mut db, 100.0, ModelOptions::default()).map_err(e)?;
    ensure(model.is_degenerate(), || "model not degenerate".into())?;
    ensure(model.discrepancy.is_identically_zero(), || "discrepancy has jumps".into())?;
    for k in 0..1000 {
        let x = 2.0 + k as f64 * 9999.0;
        ensure(model.delta(x).map_err(e)? == 0.0, || format!("delta({x}) != 0"))?;
    }
    let y = 1e7f64.ln();
    let un = model.mean_square_unsmoothed(y).map_err(e)?;
    let sm = model.mean_square_smoothed(y).map_err(e)?;
    let all = [un.empirical, un.prediction, un.residual, sm.empirical, sm.prediction];
    ensure(all.iter().all(|&v| v == 0.0), || format!("statistics {all:?}"))?;
    Ok("Delta = 0, mean squares (0, 0, 0), smoothed (0, 0): the proof fails in this case".into())
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome, elapsed: Duration, limit: Option<Duration>| {
        let over = limit.is_some_and(|l| elapsed > l);
        let (tag, detail) = match &outcome {
            Ok(d) if !over => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; runtime {:.1}s over limit", elapsed.as_secs_f64())),
            Err(d) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!("[{tag}] {n:>2}. {name}: {detail} ({:.1}s)", elapsed.as_secs_f64());
    };
    let timed = |f: fn() -> Outcome| {
        let t0 = Instant::now();
        let out = f();
        (out, t0.elapsed())
    };
    let secs = Duration::from_secs;
    let (o, d) = timed(podd_identity);
    report(1, "P_odd exact identity", o, d, Some(secs(10)));
    let (o, d) = timed(counting_cross_checks);
    report(2, "counting cross-checks", o, d, Some(secs(5)));
    let (o, d) = timed(characters_and_extraction);
    report(3, "character orthogonality and extraction", o, d, None);
    let (o, d) = timed(zero_certification);
    report(4, "zero certification", o, d, Some(secs(120)));
    let (o, d) = timed(truncation_convergence);
    report(5, "explicit-formula truncation", o, d, None);
    let t0 = Instant::now();
    let _ = table_1e7();
    let (o6, o7) = mean_squares();
    let d = t0.elapsed();
    report(6, "mean-square witness", o6, d, Some(secs(300)));
    report(7, "residual bound", o7, d, None);
    let (o, d) = timed(chebotarev_census);
    report(8, "Chebotarev census", o, d, None);
    let (o, d) = timed(dedekind_counting);
    report(9, "Dedekind counting", o, d, None);
    let (o, d) = timed(dirichlet_identity);
    report(10, "Dirichlet-integral identity", o, d, None);
    let (o, d) = timed(degenerate_guard);
    report(11, "degenerate guard", o, d, None);
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
