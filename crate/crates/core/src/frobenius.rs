// SPDX-License-Identifier: Apache-2.0

//! Frobenius classes of rational primes in a closed catalog of Galois
//! extensions of ℚ, Chebotarev counting, and prime-ideal counts for
//! quadratic fields.

use std::sync::OnceLock;

use num_rational::Rational64;
use rayon::prelude::*;

use crate::arith::{factorize, gcd, is_prime, is_squarefree, kronecker, pow_mod};
use crate::error::{ChebError, Result};
use crate::quad::NeumaierAcc;
use crate::sieve::PrimeTable;

/// A conjugacy class: stable id plus its elements (indices into the group).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub id: String,
    pub elements: Vec<usize>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Fixed representative used for class arithmetic.
    pub fn representative(&self) -> usize {
        self.elements[0]
    }
}

/// Finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    classes: Vec<ConjugacyClass>,
    class_of: Vec<usize>,
}

impl FiniteGroup {
    /// Builds a group from its table; `name` labels each class given its sorted elements.
    pub fn from_table(table: Vec<Vec<usize>>, name: impl Fn(&[usize]) -> String) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n || row.iter().any(|&g| g >= n)) {
            return Err(ChebError::invalid("malformed group table"));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| ChebError::invalid("group table has no identity"))?;
        let inverse: Vec<usize> = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == identity).ok_or_else(|| ChebError::invalid("element without inverse")))
            .collect::<Result<_>>()?;
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if class_of[g] != usize::MAX {
                continue;
            }
            let mut elems: Vec<usize> = (0..n).map(|h| table[table[h][g]][inverse[h]]).collect();
            elems.sort_unstable();
            elems.dedup();
            for &e in &elems {
                class_of[e] = classes.len();
            }
            classes.push(ConjugacyClass { id: name(&elems), elements: elems });
        }
        Ok(FiniteGroup { table, identity, classes, class_of })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn pow(&self, g: usize, m: u32) -> usize {
        (0..m).fold(self.identity, |acc, _| self.mul(acc, g))
    }

    pub fn classes(&self) -> &[ConjugacyClass] {
        &self.classes
    }

    pub fn class_of(&self, g: usize) -> usize {
        self.class_of[g]
    }

    pub fn is_abelian(&self) -> bool {
        self.classes.len() == self.order()
    }

    pub fn class_index(&self, id: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.id == id)
    }

    /// `#{b : b² = g}`.
    pub fn square_roots(&self, g: usize) -> usize {
        (0..self.order()).filter(|&b| self.mul(b, b) == g).count()
    }
}

/// The multiplicative group `(ℤ/q)*`; each element is its own class, named by its residue.
fn unit_group(q: u64) -> FiniteGroup {
    let units: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
    let pos = |r: u64| units.binary_search(&r).expect("unit");
    let table = units.iter().map(|&a| units.iter().map(|&b| pos(a * b % q)).collect()).collect();
    FiniteGroup::from_table(table, |e| units[e[0]].to_string()).expect("valid unit group")
}

/// Permutations of three points: e, (01), (02), (12), (012), (021).
const S3_PERMS: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];

fn symmetric_group_3() -> FiniteGroup {
    let pos = |p: [usize; 3]| S3_PERMS.iter().position(|&q| q == p).expect("permutation");
    let table = S3_PERMS
        .iter()
        .map(|a| S3_PERMS.iter().map(|b| pos([a[b[0]], a[b[1]], a[b[2]]])).collect())
        .collect();
    FiniteGroup::from_table(table, |e| match e.len() {
        1 => "identity".to_string(),
        3 => "transposition".to_string(),
        _ => "three_cycle".to_string(),
    })
    .expect("valid S3")
}

fn c2(split: &str, inert: &str) -> FiniteGroup {
    let (s, i) = (split.to_string(), inert.to_string());
    FiniteGroup::from_table(vec![vec![0, 1], vec![1, 0]], move |e| if e[0] == 0 { s.clone() } else { i.clone() })
        .expect("valid C2")
}

/// Quadratic field `ℚ(√d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticField {
    d: i64,
    disc: i64,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d.unsigned_abs()) {
            return Err(ChebError::invalid(format!("d = {d} must be squarefree and not 0 or 1")));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(QuadraticField { d, disc })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Fundamental discriminant.
    pub fn discriminant(&self) -> i64 {
        self.disc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

pub fn classify_quadratic(p: u64, field: &QuadraticField) -> Splitting {
    match kronecker(field.disc, p) {
        1 => Splitting::Split,
        -1 => Splitting::Inert,
        _ => Splitting::Ramified,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S3Class {
    Identity,
    Transposition,
    ThreeCycle,
    Ramified,
}

impl S3Class {
    pub fn id(self) -> &'static str {
        match self {
            S3Class::Identity => "identity",
            S3Class::Transposition => "transposition",
            S3Class::ThreeCycle => "three_cycle",
            S3Class::Ramified => "ramified",
        }
    }
}

/// Roots of `x³ − 2` modulo the prime `p`, counted directly.
pub fn cube_roots_of_two(p: u64) -> usize {
    (0..p).filter(|&x| (x * x % p) * x % p == 2 % p).count()
}

const DIRECT_ROOT_LIMIT: u64 = 10_000;

/// Root counts of `x³ − 2` for every `n < 10⁴`, filled once by direct evaluation.
fn small_root_counts() -> &'static [u8] {
    static COUNTS: OnceLock<Vec<u8>> = OnceLock::new();
    COUNTS.get_or_init(|| {
        let mut counts = vec![0u8; DIRECT_ROOT_LIMIT as usize];
        for p in 2..DIRECT_ROOT_LIMIT {
            if is_prime(p) {
                counts[p as usize] = cube_roots_of_two(p) as u8;
            }
        }
        counts
    })
}

/// Frobenius class of `p` in the splitting field of `x³ − 2`.
pub fn classify_s3(p: u64) -> S3Class {
    if p == 2 || p == 3 {
        return S3Class::Ramified;
    }
    let roots = if p < DIRECT_ROOT_LIMIT {
        small_root_counts()[p as usize] as usize
    } else if p % 3 == 2 {
        1
    } else if pow_mod(2, (p - 1) / 3, p) == 1 {
        3
    } else {
        0
    };
    match roots {
        3 => S3Class::Identity,
        1 => S3Class::Transposition,
        _ => S3Class::ThreeCycle,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classifier {
    Quadratic(QuadraticField),
    Cyclotomic(u64),
    PureCubic,
}

/// Reduction of an abelian extension to residue classes mod `q`: class `j`
/// corresponds to the primes in `residues[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianReduction {
    pub modulus: u64,
    pub residues: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionCatalogEntry {
    pub id: String,
    pub description: String,
    pub group: FiniteGroup,
    pub ramified: Vec<u64>,
    pub classifier: Classifier,
    pub abelian_reduction: Option<AbelianReduction>,
}

impl ExtensionCatalogEntry {
    fn quadratic(id: &str, d: i64) -> Self {
        let field = QuadraticField::new(d).expect("catalog field");
        let q = field.disc.unsigned_abs();
        let split: Vec<u64> = (1..q).filter(|&a| gcd(a, q) == 1 && kronecker(field.disc, a) == 1).collect();
        let inert: Vec<u64> = (1..q).filter(|&a| gcd(a, q) == 1 && kronecker(field.disc, a) == -1).collect();
        ExtensionCatalogEntry {
            id: id.to_string(),
            description: format!("Q(sqrt({d})), discriminant {}", field.disc),
            group: c2("split", "inert"),
            ramified: factorize(q).into_iter().map(|(p, _)| p).collect(),
            classifier: Classifier::Quadratic(field),
            abelian_reduction: Some(AbelianReduction { modulus: q, residues: vec![split, inert] }),
        }
    }

    fn cyclotomic(q: u64) -> Self {
        let group = unit_group(q);
        let residues = group.classes().iter().map(|c| vec![c.id.parse().expect("residue id")]).collect();
        ExtensionCatalogEntry {
            id: format!("cyclo_{q}"),
            description: format!("Q(zeta_{q}), Galois group (Z/{q})*"),
            group,
            ramified: factorize(q).into_iter().map(|(p, _)| p).collect(),
            classifier: Classifier::Cyclotomic(q),
            abelian_reduction: Some(AbelianReduction { modulus: q, residues }),
        }
    }

    fn pure_cubic() -> Self {
        ExtensionCatalogEntry {
            id: "s3_x3m2".to_string(),
            description: "splitting field of x^3 - 2, Galois group S3".to_string(),
            group: symmetric_group_3(),
            ramified: vec![2, 3],
            classifier: Classifier::PureCubic,
            abelian_reduction: None,
        }
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        self.ramified.contains(&p)
    }

    /// Frobenius element of an unramified prime (a fixed representative of its class).
    pub fn frobenius_element(&self, p: u64) -> Option<usize> {
        if self.is_ramified(p) {
            return None;
        }
        let class = match &self.classifier {
            Classifier::Quadratic(f) => match classify_quadratic(p, f) {
                Splitting::Split => self.group.class_index("split")?,
                Splitting::Inert => self.group.class_index("inert")?,
                Splitting::Ramified => return None,
            },
            Classifier::Cyclotomic(q) => self.group.class_index(&(p % q).to_string())?,
            Classifier::PureCubic => match classify_s3(p) {
                S3Class::Ramified => return None,
                c => self.group.class_index(c.id())?,
            },
        };
        Some(self.group.classes()[class].representative())
    }

    pub fn frobenius_class(&self, p: u64) -> Option<usize> {
        self.frobenius_element(p).map(|g| self.group.class_of(g))
    }

    pub fn class_ids(&self) -> Vec<&str> {
        self.group.classes().iter().map(|c| c.id.as_str()).collect()
    }

    /// Resolves class ids to class indices.
    pub fn resolve_classes(&self, ids: &[&str]) -> Result<Vec<usize>> {
        ids.iter()
            .map(|id| {
                self.group
                    .class_index(id)
                    .ok_or_else(|| ChebError::UnknownClass { ext: self.id.clone(), class: id.to_string() })
            })
            .collect()
    }

    /// `|C|/|G|` summed over the given classes.
    pub fn density(&self, classes: &[usize]) -> Rational64 {
        let size: usize = classes.iter().map(|&c| self.group.classes()[c].size()).sum();
        Rational64::new(size as i64, self.group.order() as i64)
    }
}

/// The closed catalog: quadratic fields, cyclotomic fields `ℚ(ζ_q)` for
/// `3 ≤ q ≤ 60`, `q ≢ 2 (mod 4)`, and the `S₃` field of `x³ − 2`.
pub fn catalog() -> Vec<ExtensionCatalogEntry> {
    let mut out = vec![ExtensionCatalogEntry::quadratic("gauss_i", -1)];
    for d in [-2i64, -3, -5, -7, 2, 3, 5] {
        let id = if d < 0 { format!("quad_m{}", -d) } else { format!("quad_{d}") };
        out.push(ExtensionCatalogEntry::quadratic(&id, d));
    }
    out.extend((3..=60).filter(|q| q % 4 != 2).map(ExtensionCatalogEntry::cyclotomic));
    out.push(ExtensionCatalogEntry::pure_cubic());
    out
}

pub fn lookup(id: &str) -> Result<ExtensionCatalogEntry> {
    if let Some(q) = id.strip_prefix("cyclo_").and_then(|s| s.parse::<u64>().ok()) {
        if (3..=60).contains(&q) && q % 4 != 2 {
            return Ok(ExtensionCatalogEntry::cyclotomic(q));
        }
    }
    catalog()
        .into_iter()
        .find(|e| e.id == id)
        .ok_or_else(|| ChebError::UnknownExtension(id.to_string()))
}

/// `π(x, L/ℚ, C)` summed over the given classes.
pub fn pi_chebotarev(table: &PrimeTable, ext: &ExtensionCatalogEntry, class_ids: &[&str], x: f64) -> Result<u64> {
    let targets = ext.resolve_classes(class_ids)?;
    let n = table.floor_checked(x)?;
    let primes = &table.primes()[..table.pi_int(n) as usize];
    Ok(primes
        .par_iter()
        .filter(|&&p| ext.frobenius_class(p).is_some_and(|c| targets.contains(&c)))
        .count() as u64)
}

/// `R(x, L/ℚ, C) = Σ 1/m` over `p^m ≤ x`, `m ≥ 2`, `p` unramified, `Frob_p^m ∈ C`.
pub fn r_chebotarev(table: &PrimeTable, ext: &ExtensionCatalogEntry, class_ids: &[&str], x: f64) -> Result<f64> {
    let targets = ext.resolve_classes(class_ids)?;
    let n = table.floor_checked(x)?;
    let mut acc = NeumaierAcc::default();
    for pp in table.higher_powers().iter().take_while(|pp| pp.value <= n) {
        if let Some(g) = ext.frobenius_element(pp.prime) {
            let powered = ext.group.pow(g, pp.exponent);
            if targets.contains(&ext.group.class_of(powered)) {
                acc.add(1.0 / pp.exponent as f64);
            }
        }
    }
    Ok(acc.value())
}

/// `κ = (1/|G|) Σ_j |C_j| · #{b : b² = g_j}` with `g_j` the class representative.
pub fn kappa_chebotarev(ext: &ExtensionCatalogEntry, class_ids: &[&str]) -> Result<Rational64> {
    let targets = ext.resolve_classes(class_ids)?;
    let g = &ext.group;
    let total: usize = targets
        .iter()
        .map(|&c| {
            let class = &g.classes()[c];
            class.size() * g.square_roots(class.representative())
        })
        .sum();
    Ok(Rational64::new(total as i64, g.order() as i64))
}

/// `π(x, F)`: prime ideals of norm at most `x`.
pub fn dedekind_pi(table: &PrimeTable, field: &QuadraticField, x: f64) -> Result<u64> {
    let n = table.floor_checked(x)?;
    let primes = &table.primes()[..table.pi_int(n) as usize];
    Ok(primes
        .par_iter()
        .map(|&p| match classify_quadratic(p, field) {
            Splitting::Split => 2,
            Splitting::Ramified => 1,
            Splitting::Inert => u64::from(p.checked_mul(p).is_some_and(|pp| pp <= n)),
        })
        .sum())
}

/// `Π(x, F) = Σ_{N𝔭^m ≤ x} 1/m`.
pub fn dedekind_big_pi(table: &PrimeTable, field: &QuadraticField, x: f64) -> Result<f64> {
    let n = table.floor_checked(x)?;
    let mut acc = NeumaierAcc::default();
    for pp in table.prime_powers().take_while(|pp| pp.value <= n) {
        let m = pp.exponent as f64;
        match classify_quadratic(pp.prime, field) {
            Splitting::Split => acc.add(2.0 / m),
            Splitting::Ramified => acc.add(1.0 / m),
            // the inert ideal has norm p², so p^k is a norm power only for even k
            Splitting::Inert if pp.exponent % 2 == 0 => acc.add(2.0 / m),
            Splitting::Inert => {}
        }
    }
    Ok(acc.value())
}

/// `R(x, F) = Π(x, F) − π(x, F)`.
pub fn dedekind_r(table: &PrimeTable, field: &QuadraticField, x: f64) -> Result<f64> {
    Ok(dedekind_big_pi(table, field, x)? - dedekind_pi(table, field, x)? as f64)
}

/// One row of a class census.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusRow {
    pub class_id: String,
    pub count: u64,
    pub frequency: f64,
    pub expected: f64,
}

/// Frequencies of Frobenius classes among unramified primes up to `x`.
pub fn census(table: &PrimeTable, ext: &ExtensionCatalogEntry, x: f64) -> Result<Vec<CensusRow>> {
    let n = table.floor_checked(x)?;
    let primes = &table.primes()[..table.pi_int(n) as usize];
    let k = ext.group.classes().len();
    let counts = primes
        .par_chunks(1 << 14)
        .map(|chunk| {
            let mut c = vec![0u64; k];
            for &p in chunk {
                if let Some(j) = ext.frobenius_class(p) {
                    c[j] += 1;
                }
            }
            c
        })
        .reduce(|| vec![0u64; k], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let total: u64 = counts.iter().sum();
    Ok(ext
        .group
        .classes()
        .iter()
        .zip(counts)
        .map(|(class, count)| CensusRow {
            class_id: class.id.clone(),
            count,
            frequency: if total == 0 { 0.0 } else { count as f64 / total as f64 },
            expected: class.size() as f64 / ext.group.order() as f64,
        })
        .collect())
}
