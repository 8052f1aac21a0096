// SPDX-License-Identifier: Apache-2.0

//! Dirichlet characters with exact values.
//!
//! `(ℤ/q)*` is split by the CRT into cyclic factors with explicit generators:
//! a primitive root for each odd prime power, `-1` for `4`, and `{-1, 5}` for
//! `2^k` with `k ≥ 3`. A character is a tuple of exponents on those
//! generators; its canonical index is the tuple read as a mixed-radix number
//! with the first factor most significant, so the principal character is
//! always index 0.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::arith::{factorize, gcd, lcm, primitive_root_odd_prime_power};
use crate::error::{ChebError, Result};

/// Textual `q:index` label of a character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharacterDescriptor {
    pub modulus: u64,
    pub index: u64,
}

impl fmt::Display for CharacterDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.modulus, self.index)
    }
}

impl FromStr for CharacterDescriptor {
    type Err = ChebError;

    fn from_str(s: &str) -> Result<Self> {
        let (q, i) = s.split_once(':').ok_or_else(|| ChebError::Parse {
            pos: 0,
            msg: format!("expected `q:index`, got `{s}`"),
        })?;
        let modulus = q.trim().parse::<u64>().map_err(|e| ChebError::Parse { pos: 0, msg: e.to_string() })?;
        let index = i
            .trim()
            .parse::<u64>()
            .map_err(|e| ChebError::Parse { pos: q.len() + 1, msg: e.to_string() })?;
        if modulus == 0 {
            return Err(ChebError::Parse { pos: 0, msg: "modulus must be positive".into() });
        }
        Ok(CharacterDescriptor { modulus, index })
    }
}

/// An exact root of unity `exp(2πi · num/den)` with `0 ≤ num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    pub num: u64,
    pub den: u64,
}

impl RootOfUnity {
    pub fn new(num: u64, den: u64) -> Self {
        let num = num % den;
        let g = gcd(num, den).max(1);
        let (num, den) = if num == 0 { (0, 1) } else { (num / g, den / g) };
        RootOfUnity { num, den }
    }

    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (n, d) => Complex64::from_polar(1.0, std::f64::consts::TAU * n as f64 / d as f64),
        }
    }

    pub fn conj(self) -> Self {
        RootOfUnity::new(self.den - self.num, self.den)
    }

}

impl std::ops::Mul for RootOfUnity {
    type Output = RootOfUnity;

    fn mul(self, other: Self) -> Self {
        let den = lcm(self.den, other.den);
        RootOfUnity::new(self.num * (den / self.den) + other.num * (den / other.den), den)
    }
}

/// One cyclic factor of `(ℤ/q)*`.
#[derive(Debug, Clone)]
struct CyclicFactor {
    order: u64,
    /// Discrete logarithm of each residue modulo `q` on this factor's
    /// generator; `None` for residues sharing a factor with `q`.
    logs: Vec<Option<u64>>,
}

#[derive(Debug, Clone)]
struct GroupStructure {
    q: u64,
    factors: Vec<CyclicFactor>,
    exponent: u64,
}

impl GroupStructure {
    fn new(q: u64) -> Self {
        let mut factors = Vec::new();
        for (p, e) in factorize(q) {
            let pe = p.pow(e);
            // Logs modulo the prime power; lifted to residues mod q below.
            let mut local: Vec<(u64, Vec<Option<u64>>)> = Vec::new();
            if p == 2 {
                if e == 2 {
                    let mut l = vec![None; 4];
                    l[1] = Some(0);
                    l[3] = Some(1);
                    local.push((2, l));
                } else if e >= 3 {
                    let half = pe / 4;
                    let mut sign = vec![None; pe as usize];
                    let mut five = vec![None; pe as usize];
                    let mut v = 1u64;
                    for b in 0..half {
                        sign[v as usize] = Some(0);
                        five[v as usize] = Some(b);
                        let neg = pe - v;
                        sign[neg as usize] = Some(1);
                        five[neg as usize] = Some(b);
                        v = v * 5 % pe;
                    }
                    local.push((2, sign));
                    local.push((half, five));
                }
            } else {
                let g = primitive_root_odd_prime_power(p, e);
                let order = pe / p * (p - 1);
                let mut l = vec![None; pe as usize];
                let mut v = 1u64;
                for k in 0..order {
                    l[v as usize] = Some(k);
                    v = v * g % pe;
                }
                local.push((order, l));
            }
            for (order, l) in local {
                let logs = (0..q)
                    .map(|n| if gcd(n, q) == 1 { l[(n % pe) as usize] } else { None })
                    .collect();
                factors.push(CyclicFactor { order, logs });
            }
        }
        let exponent = factors.iter().fold(1, |acc, f| lcm(acc, f.order));
        GroupStructure { q, factors, exponent }
    }

    fn size(&self) -> u64 {
        self.factors.iter().map(|f| f.order).product()
    }

    fn exponents_of(&self, mut index: u64) -> Vec<u64> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(&self.factors).rev() {
            *slot = index % f.order;
            index /= f.order;
        }
        out
    }

    /// Character values as numerators over `self.exponent`.
    fn values(&self, exps: &[u64]) -> Vec<Option<u64>> {
        let m = self.exponent;
        (0..self.q)
            .map(|n| {
                let mut acc = 0u64;
                for (f, &k) in self.factors.iter().zip(exps) {
                    let log = f.logs[n as usize]?;
                    acc = (acc + k * log % f.order * (m / f.order)) % m;
                }
                if self.q == 1 || gcd(n, self.q) == 1 {
                    Some(acc)
                } else {
                    None
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    index: u64,
    exponents: Vec<u64>,
    /// Common denominator of all values.
    denominator: u64,
    /// Numerator of `χ(n)` over `denominator` for each residue, `None` when
    /// `gcd(n, q) > 1`.
    values: Vec<Option<u64>>,
    parity: u8,
    conductor: u64,
    inducer: CharacterDescriptor,
}

impl DirichletCharacter {
    pub fn descriptor(&self) -> CharacterDescriptor {
        CharacterDescriptor { modulus: self.modulus, index: self.index }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Exponents on the canonical generators.
    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// `𝔞_χ`: 1 when `χ(-1) = -1`, else 0.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Descriptor of the primitive character inducing this one.
    pub fn inducer(&self) -> CharacterDescriptor {
        self.inducer
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.modulus
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().flatten().all(|&v| 2 * v % self.denominator == 0)
    }

    /// Exact value, or `None` when `gcd(n, q) > 1`.
    pub fn eval_exact(&self, n: i64) -> Option<RootOfUnity> {
        let r = n.rem_euclid(self.modulus as i64) as usize;
        self.values[r].map(|v| RootOfUnity::new(v, self.denominator))
    }

    pub fn eval(&self, n: i64) -> Complex64 {
        self.eval_exact(n).map_or(Complex64::new(0.0, 0.0), RootOfUnity::to_complex)
    }

    pub fn eval_u64(&self, n: u64) -> Complex64 {
        let r = (n % self.modulus) as usize;
        self.values[r].map_or(Complex64::new(0.0, 0.0), |v| RootOfUnity::new(v, self.denominator).to_complex())
    }

    /// The character `n ↦ conj(χ(n))`, looked up in the same group.
    pub fn conj_descriptor(&self) -> CharacterDescriptor {
        let group = GroupStructure::new(self.modulus);
        let mut index = 0;
        for (f, &k) in group.factors.iter().zip(&self.exponents) {
            index = index * f.order + (f.order - k) % f.order;
        }
        CharacterDescriptor { modulus: self.modulus, index }
    }
}

fn same_values_on(a: &DirichletCharacter, b: &DirichletCharacter, q: u64) -> bool {
    (1..=q).filter(|&n| gcd(n, q) == 1).all(|n| a.eval_exact(n as i64) == b.eval_exact(n as i64))
}

fn build_group(q: u64, resolve_inducers: bool) -> Vec<DirichletCharacter> {
    let structure = GroupStructure::new(q);
    let divisors = crate::arith::divisors(q);
    let mut sub_groups: HashMap<u64, Vec<DirichletCharacter>> = HashMap::new();
    (0..structure.size())
        .map(|index| {
            let exponents = structure.exponents_of(index);
            let values = structure.values(&exponents);
            let denominator = structure.exponent;
            let parity = match values[((q as i64 - 1).rem_euclid(q as i64)) as usize] {
                Some(v) if v != 0 => 1,
                _ => 0,
            };
            let conductor = *divisors
                .iter()
                .find(|&&d| {
                    (1..q).filter(|&n| n % d == 1 % d && gcd(n, q) == 1).all(|n| values[n as usize] == Some(0))
                })
                .unwrap_or(&q);
            let mut chi = DirichletCharacter {
                modulus: q,
                index,
                exponents,
                denominator,
                values,
                parity,
                conductor,
                inducer: CharacterDescriptor { modulus: q, index },
            };
            if conductor != q && resolve_inducers {
                let sub = sub_groups.entry(conductor).or_insert_with(|| build_group(conductor, false));
                let found = sub
                    .iter()
                    .find(|psi| same_values_on(psi, &chi, q))
                    .expect("a character of the conductor induces chi");
                chi.inducer = found.descriptor();
            }
            chi
        })
        .collect()
}

/// All `φ(q)` characters modulo `q`, principal character first.
pub fn character_group(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 {
        return Err(ChebError::invalid("modulus q must be positive"));
    }
    Ok(build_group(q, true))
}

/// Looks up a character by its `q:index` descriptor.
pub fn character(desc: CharacterDescriptor) -> Result<DirichletCharacter> {
    let group = character_group(desc.modulus)?;
    let n = group.len();
    group.into_iter().nth(desc.index as usize).ok_or_else(|| {
        ChebError::invalid(format!("index {} out of range: there are {} characters mod {}", desc.index, n, desc.modulus))
    })
}

/// The conductor of `χ` and the primitive character inducing it.
pub fn conductor_and_inducer(chi: &DirichletCharacter) -> (u64, DirichletCharacter) {
    if chi.is_primitive() {
        return (chi.conductor, chi.clone());
    }
    let primitive = character(chi.inducer).expect("inducer descriptor is valid");
    (chi.conductor, primitive)
}

/// Exact sums of roots of unity, reduced modulo the cyclotomic polynomial.
pub mod cyclotomic {
    use super::RootOfUnity;
    use crate::arith::divisors;

    /// Integer coefficients of `Φ_m(x)`, lowest degree first.
    pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
        let mut num = vec![0i64; m as usize + 1];
        num[0] = -1;
        num[m as usize] = 1;
        for d in divisors(m) {
            if d < m {
                num = poly_div_exact(&num, &cyclotomic_polynomial(d));
            }
        }
        num
    }

    fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
        let mut rem = num.to_vec();
        let dn = den.len() - 1;
        let lead = *den.last().expect("nonzero polynomial");
        let mut quot = vec![0i64; rem.len() - dn];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dn] / lead;
            quot[i] = c;
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
        debug_assert!(rem.iter().all(|&r| r == 0));
        quot
    }

    /// `Σ c_k ζ_m^k` as an element of `ℤ[x]/(Φ_m)`.
    #[derive(Debug, Clone)]
    pub struct CyclotomicSum {
        m: u64,
        counts: Vec<i64>,
    }

    impl CyclotomicSum {
        pub fn new(m: u64) -> Self {
            CyclotomicSum { m, counts: vec![0; m as usize] }
        }

        pub fn add_root(&mut self, root: RootOfUnity, mult: i64) {
            assert_eq!(self.m % root.den, 0, "root order must divide m");
            let k = root.num * (self.m / root.den);
            self.counts[k as usize] += mult;
        }

        pub fn add_integer(&mut self, n: i64) {
            self.counts[0] += n;
        }

        /// Canonical representative: coefficients of degree `< φ(m)`.
        pub fn reduced(&self) -> Vec<i64> {
            let phi = cyclotomic_polynomial(self.m);
            let deg = phi.len() - 1;
            let mut r = self.counts.clone();
            for i in (deg..r.len()).rev() {
                let c = r[i];
                if c != 0 {
                    for (j, &p) in phi.iter().enumerate() {
                        r[i - deg + j] -= c * p;
                    }
                }
            }
            r.truncate(deg);
            r
        }

        pub fn is_zero(&self) -> bool {
            self.reduced().iter().all(|&c| c == 0)
        }

        pub fn equals_integer(&self, n: i64) -> bool {
            let mut c = self.clone();
            c.add_integer(-n);
            c.is_zero()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::cyclotomic::*;
    use super::*;

    #[test]
    fn group_of_four() {
        let g = character_group(4).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g[0].is_principal());
        assert_eq!(g[1].eval(3), Complex64::new(-1.0, 0.0));
        assert_eq!(g[1].eval(1), Complex64::new(1.0, 0.0));
        assert_eq!(g[0].eval(6), Complex64::new(0.0, 0.0));
        assert_eq!(g[1].parity(), 1);
        assert_eq!(g[0].conductor(), 1);
        assert_eq!(g[1].conductor(), 4);
        assert!(g[1].is_primitive());
    }

    #[test]
    fn trivial_modulus() {
        let g = character_group(1).unwrap();
        assert_eq!(g.len(), 1);
        for n in -5..20 {
            assert_eq!(g[0].eval(n), Complex64::new(1.0, 0.0));
        }
        assert!(g[0].is_primitive());
        assert!(matches!(character_group(0), Err(ChebError::InvalidArgument(_))));
    }

    #[test]
    fn group_of_twelve_is_real() {
        let g = character_group(12).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(DirichletCharacter::is_real));
        let conductors: Vec<u64> = g.iter().map(|c| c.conductor()).collect();
        let mut sorted = conductors.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 3, 4, 12]);
    }

    #[test]
    fn mod_eight_character_lifted_from_four() {
        let g8 = character_group(8).unwrap();
        let odd4 = &character_group(4).unwrap()[1];
        let lifted: Vec<&DirichletCharacter> =
            g8.iter().filter(|c| [1, 3, 5, 7].iter().all(|&n| c.eval(n) == odd4.eval(n))).collect();
        assert_eq!(lifted.len(), 1);
        let (cond, prim) = conductor_and_inducer(lifted[0]);
        assert_eq!(cond, 4);
        assert_eq!(prim.descriptor(), CharacterDescriptor { modulus: 4, index: 1 });
        assert!(prim.is_primitive());
    }

    #[test]
    fn principal_has_trivial_inducer() {
        let g = character_group(15).unwrap();
        let (cond, prim) = conductor_and_inducer(&g[0]);
        assert_eq!(cond, 1);
        assert_eq!(prim.modulus(), 1);
    }

    #[test]
    fn descriptor_parsing() {
        let d: CharacterDescriptor = "4:1".parse().unwrap();
        assert_eq!(d, CharacterDescriptor { modulus: 4, index: 1 });
        assert_eq!(d.to_string(), "4:1");
        assert!("4-1".parse::<CharacterDescriptor>().is_err());
        assert!("0:0".parse::<CharacterDescriptor>().is_err());
        match "4:x".parse::<CharacterDescriptor>() {
            Err(ChebError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero_exactly() {
        let mut s = CyclotomicSum::new(6);
        for k in 0..6 {
            s.add_root(RootOfUnity::new(k, 6), 1);
        }
        assert!(s.is_zero());
        let mut t = CyclotomicSum::new(6);
        t.add_root(RootOfUnity::new(1, 3), 1);
        assert!(!t.is_zero());
    }

    #[test]
    fn parity_matches_value_at_minus_one() {
        for q in 1..=60 {
            for chi in character_group(q).unwrap() {
                let expected = if chi.parity() == 1 { -1.0 } else { 1.0 };
                assert_eq!(chi.eval(-1), Complex64::new(expected, 0.0), "{}", chi.descriptor());
            }
        }
    }

    #[test]
    fn conjugate_descriptor_conjugates_values() {
        for q in [5u64, 7, 13, 16, 21] {
            let g = character_group(q).unwrap();
            for chi in &g {
                let bar = &g[chi.conj_descriptor().index as usize];
                for n in 0..q as i64 {
                    assert_eq!(chi.eval_exact(n).map(RootOfUnity::conj), bar.eval_exact(n));
                }
            }
        }
    }
}
