// SPDX-License-Identifier: Apache-2.0

//! Primes and prime powers in arithmetic progressions, and the coefficients
//! `c_χ` and `κ` attached to a union of residue classes.

use num_complex::Complex64;
use num_rational::Rational64;

use crate::arith::{euler_phi, gcd};
use crate::characters::DirichletCharacter;
use crate::error::{ChebError, Result};
use crate::quad::NeumaierAcc;
use crate::sieve::PrimeTable;

/// Reduces residues to `[0, q)`, rejecting duplicates and residues sharing a
/// factor with `q`. The output is sorted.
pub fn canonical_classes(q: u64, classes: &[i64]) -> Result<Vec<u64>> {
    if q == 0 {
        return Err(ChebError::invalid("modulus must be positive"));
    }
    let mut out: Vec<u64> = Vec::with_capacity(classes.len());
    for &a in classes {
        let r = a.rem_euclid(q as i64) as u64;
        if gcd(r, q) != 1 {
            return Err(ChebError::invalid(format!("residue {a} is not coprime to {q}")));
        }
        if out.contains(&r) {
            return Err(ChebError::invalid(format!("residue class {r} mod {q} listed twice")));
        }
        out.push(r);
    }
    out.sort_unstable();
    Ok(out)
}

fn residue_of(a: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(ChebError::invalid("modulus must be positive"));
    }
    Ok(a.rem_euclid(q as i64) as u64)
}

/// `π(x; q, a)`.
pub fn pi_progression(table: &PrimeTable, x: f64, q: u64, a: i64) -> Result<u64> {
    let a = residue_of(a, q)?;
    let n = table.floor_checked(x)?;
    let end = table.pi_int(n) as usize;
    Ok(table.primes()[..end].iter().filter(|&&p| p % q == a).count() as u64)
}

/// `R(x; q, a) = Σ 1/k` over `p^k ≤ x`, `k ≥ 2`, `p^k ≡ a (mod q)`.
pub fn r_progression(table: &PrimeTable, x: f64, q: u64, a: i64) -> Result<f64> {
    let a = residue_of(a, q)?;
    let n = table.floor_checked(x)?;
    let mut acc = NeumaierAcc::default();
    for pp in table.higher_powers().iter().take_while(|pp| pp.value <= n) {
        if pp.value % q == a {
            acc.add(1.0 / pp.exponent as f64);
        }
    }
    Ok(acc.value())
}

/// `ψ(x; q, a) = Σ_{n ≤ x, n ≡ a} Λ(n)`.
pub fn psi_progression(table: &PrimeTable, x: f64, q: u64, a: i64) -> Result<f64> {
    let a = residue_of(a, q)?;
    let n = table.floor_checked(x)?;
    let mut acc = NeumaierAcc::default();
    for pp in table.prime_powers().take_while(|pp| pp.value <= n) {
        if pp.value % q == a {
            acc.add((pp.prime as f64).ln());
        }
    }
    Ok(acc.value())
}

/// `ψ(x, χ) = Σ_{n ≤ x} χ(n) Λ(n)`.
pub fn psi_chi(table: &PrimeTable, chi: &DirichletCharacter, x: f64) -> Result<Complex64> {
    let n = table.floor_checked(x)?;
    let (mut re, mut im) = (NeumaierAcc::default(), NeumaierAcc::default());
    for pp in table.prime_powers().take_while(|pp| pp.value <= n) {
        let v = chi.eval_u64(pp.value);
        if v.re != 0.0 || v.im != 0.0 {
            let l = (pp.prime as f64).ln();
            re.add(v.re * l);
            im.add(v.im * l);
        }
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Counting functions of one progression at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressionCount {
    pub q: u64,
    pub a: u64,
    pub x: f64,
    pub pi_value: u64,
    pub big_pi_value: f64,
    pub r_value: f64,
    pub psi_value: f64,
}

pub fn progression_count(table: &PrimeTable, x: f64, q: u64, a: i64) -> Result<ProgressionCount> {
    let pi_value = pi_progression(table, x, q, a)?;
    let r_value = r_progression(table, x, q, a)?;
    Ok(ProgressionCount {
        q,
        a: residue_of(a, q)?,
        x,
        pi_value,
        big_pi_value: pi_value as f64 + r_value,
        r_value,
        psi_value: psi_progression(table, x, q, a)?,
    })
}

/// `c_χ = (1/φ(q)) Σ_j conj(χ)(a_j)`.
pub fn c_chi(classes: &[i64], q: u64, chi: &DirichletCharacter) -> Result<Complex64> {
    let classes = canonical_classes(q, classes)?;
    let weights: Vec<(u64, Complex64)> = classes.into_iter().map(|a| (a, Complex64::new(1.0, 0.0))).collect();
    c_chi_weighted(&weights, q, chi)
}

/// `(1/φ(q)) Σ_a w_a conj(χ)(a)` for weighted residues.
pub fn c_chi_weighted(weights: &[(u64, Complex64)], q: u64, chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.modulus() != q {
        return Err(ChebError::invalid(format!("character modulus {} differs from {q}", chi.modulus())));
    }
    let sum: Complex64 = weights.iter().map(|&(a, w)| w * chi.eval_u64(a).conj()).sum();
    Ok(sum / euler_phi(q) as f64)
}

/// Number of `b` coprime to `q` with `b² ≡ a (mod q)`, for every `a`.
pub fn square_root_counts(q: u64) -> Vec<u64> {
    let mut counts = vec![0u64; q as usize];
    for b in 0..q {
        if gcd(b, q) == 1 {
            counts[((b as u128 * b as u128) % q as u128) as usize] += 1;
        }
    }
    if q == 1 {
        counts[0] = 1;
    }
    counts
}

/// `κ = (1/φ(q)) Σ_j #{b : b² ≡ a_j}`.
pub fn kappa_residue(classes: &[i64], q: u64) -> Result<Rational64> {
    let classes = canonical_classes(q, classes)?;
    let roots = square_root_counts(q);
    let total: u64 = classes.iter().map(|&a| roots[a as usize]).sum();
    Ok(Rational64::new(total as i64, euler_phi(q) as i64))
}

/// Weighted `κ = (1/φ(q)) Σ_a w_a #{b : b² ≡ a}`.
pub fn kappa_weighted(weights: &[(u64, Complex64)], q: u64) -> Complex64 {
    let roots = square_root_counts(q);
    let sum: Complex64 = weights.iter().map(|&(a, w)| w * roots[(a % q) as usize] as f64).sum();
    sum / euler_phi(q) as f64
}
