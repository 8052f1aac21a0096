// SPDX-License-Identifier: Apache-2.0

//! Declarative prime sets: unions of residue classes or Frobenius classes
//! with finite exception lists, weighted class combinations, the set of
//! odd-indexed primes, and callback-defined sets for testing.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;

use crate::arith::{euler_phi, gcd, is_prime, lcm};
use crate::counting::canonical_classes;
use crate::error::{ChebError, Result};
use crate::frobenius::{lookup, ExtensionCatalogEntry};
use crate::sieve::PrimeTable;

/// Finite exception lists: `added` primes join the set, `removed` primes leave it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Exceptions {
    pub added: Vec<u64>,
    pub removed: Vec<u64>,
}

impl Exceptions {
    pub fn new(added: &[u64], removed: &[u64]) -> Result<Self> {
        let mut added = added.to_vec();
        let mut removed = removed.to_vec();
        added.sort_unstable();
        removed.sort_unstable();
        for list in [&added, &removed] {
            if let Some(&n) = list.iter().find(|&&n| !is_prime(n)) {
                return Err(ChebError::invalid(format!("exception {n} is not prime")));
            }
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(ChebError::invalid("exception listed twice"));
            }
        }
        if let Some(p) = added.iter().find(|p| removed.binary_search(p).is_ok()) {
            return Err(ChebError::invalid(format!("prime {p} is both added and removed")));
        }
        Ok(Exceptions { added, removed })
    }

    /// `λ = |P₀| − |P₁|`.
    pub fn lambda(&self) -> i64 {
        self.added.len() as i64 - self.removed.len() as i64
    }

    fn apply(&self, p: u64, base: bool) -> bool {
        if base {
            self.removed.binary_search(&p).is_err()
        } else {
            self.added.binary_search(&p).is_ok()
        }
    }

    fn validate(&self, base: impl Fn(u64) -> bool) -> Result<()> {
        if let Some(p) = self.added.iter().find(|&&p| base(p)) {
            return Err(ChebError::invalid(format!("added prime {p} already lies in the set")));
        }
        if let Some(p) = self.removed.iter().find(|&&p| !base(p)) {
            return Err(ChebError::invalid(format!("removed prime {p} does not lie in the set")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueUnion {
    pub q: u64,
    pub classes: Vec<u64>,
    pub exceptions: Exceptions,
}

impl ResidueUnion {
    pub fn new(q: u64, classes: &[i64], exceptions: Exceptions) -> Result<Self> {
        let classes = canonical_classes(q, classes)?;
        let set = ResidueUnion { q, classes, exceptions: Exceptions::default() };
        exceptions.validate(|p| set.base_contains(p))?;
        Ok(ResidueUnion { exceptions, ..set })
    }

    pub fn simple(q: u64, classes: &[i64]) -> Result<Self> {
        Self::new(q, classes, Exceptions::default())
    }

    fn base_contains(&self, p: u64) -> bool {
        self.classes.binary_search(&(p % self.q)).is_ok()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.exceptions.apply(p, self.base_contains(p))
    }

    pub fn density(&self) -> Rational64 {
        Rational64::new(self.classes.len() as i64, euler_phi(self.q) as i64)
    }

    /// True when every class coprime to `q` is present.
    pub fn is_full(&self) -> bool {
        self.classes.len() as u64 == euler_phi(self.q)
    }

    /// Equivalent union at a multiple `modulus` of `q`.
    pub fn lift_to(&self, modulus: u64) -> Result<ResidueUnion> {
        if modulus == 0 || modulus % self.q != 0 {
            return Err(ChebError::invalid(format!("{modulus} is not a multiple of {}", self.q)));
        }
        let classes: Vec<i64> = (0..modulus)
            .filter(|&b| gcd(b, modulus) == 1 && self.base_contains(b))
            .map(|b| b as i64)
            .collect();
        // primes dividing the new modulus but not q leave the class union,
        // so their membership moves into the exception lists
        let fresh: Vec<u64> = crate::arith::factorize(modulus)
            .into_iter()
            .map(|(p, _)| p)
            .filter(|p| self.q % p != 0)
            .collect();
        let mut ex = self.exceptions.clone();
        ex.removed.retain(|r| !fresh.contains(r));
        for &p in &fresh {
            if self.base_contains(p) && self.contains(p) {
                ex.added.push(p);
            }
        }
        ex.added.sort_unstable();
        let lifted = ResidueUnion::new(modulus, &classes, ex)?;
        Ok(lifted)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusUnion {
    pub ext: ExtensionCatalogEntry,
    pub classes: Vec<usize>,
    pub exceptions: Exceptions,
}

impl FrobeniusUnion {
    pub fn new(ext_id: &str, class_ids: &[&str], exceptions: Exceptions) -> Result<Self> {
        let ext = lookup(ext_id)?;
        let mut classes = ext.resolve_classes(class_ids)?;
        classes.sort_unstable();
        if classes.windows(2).any(|w| w[0] == w[1]) {
            return Err(ChebError::invalid("conjugacy class listed twice"));
        }
        let set = FrobeniusUnion { ext, classes, exceptions: Exceptions::default() };
        exceptions.validate(|p| set.base_contains(p))?;
        Ok(FrobeniusUnion { exceptions, ..set })
    }

    fn base_contains(&self, p: u64) -> bool {
        self.ext.frobenius_class(p).is_some_and(|c| self.classes.contains(&c))
    }

    pub fn contains(&self, p: u64) -> bool {
        self.exceptions.apply(p, self.base_contains(p))
    }

    pub fn density(&self) -> Rational64 {
        self.ext.density(&self.classes)
    }

    pub fn class_ids(&self) -> Vec<&str> {
        self.classes.iter().map(|&c| self.ext.group.classes()[c].id.as_str()).collect()
    }
}

/// `F(x) = Σ_j λ_j π(x, L/ℚ, C_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedClasses {
    pub ext: ExtensionCatalogEntry,
    pub weights: Vec<(usize, Complex64)>,
}

impl WeightedClasses {
    pub fn new(ext_id: &str, weights: &[(&str, Complex64)]) -> Result<Self> {
        let ext = lookup(ext_id)?;
        let mut out: Vec<(usize, Complex64)> = Vec::new();
        for (id, w) in weights {
            let c = ext.resolve_classes(&[id])?[0];
            if out.iter().any(|(k, _)| *k == c) {
                return Err(ChebError::invalid(format!("class `{id}` weighted twice")));
            }
            out.push((c, *w));
        }
        out.sort_by_key(|(c, _)| *c);
        Ok(WeightedClasses { ext, weights: out })
    }

    pub fn weight_of(&self, p: u64) -> Complex64 {
        self.ext
            .frobenius_class(p)
            .and_then(|c| self.weights.iter().find(|(k, _)| *k == c))
            .map_or(Complex64::new(0.0, 0.0), |(_, w)| *w)
    }

    /// `λ = (1/|G|) Σ_j λ_j |C_j|`.
    pub fn mean_weight(&self) -> Complex64 {
        let g = &self.ext.group;
        self.weights.iter().map(|&(c, w)| w * g.classes()[c].size() as f64).sum::<Complex64>() / g.order() as f64
    }
}

pub type MembershipFn = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// Set defined by a membership callback. Never admitted to explicit-formula models.
#[derive(Clone)]
pub struct ProceduralSet {
    pub name: String,
    pub member: MembershipFn,
}

impl fmt::Debug for ProceduralSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProceduralSet").field("name", &self.name).finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum PrimeSetSpec {
    ResidueUnion(ResidueUnion),
    FrobeniusUnion(FrobeniusUnion),
    Weighted(WeightedClasses),
    /// `{p_1, p_3, p_5, …} = {2, 5, 11, 17, 23, …}`.
    OddIndexed,
    Procedural(ProceduralSet),
}

impl PrimeSetSpec {
    pub fn residue(q: u64, classes: &[i64]) -> Result<Self> {
        Ok(PrimeSetSpec::ResidueUnion(ResidueUnion::simple(q, classes)?))
    }

    pub fn procedural(name: &str, member: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        PrimeSetSpec::Procedural(ProceduralSet { name: name.to_string(), member: Arc::new(member) })
    }

    /// Weight of the `index`-th prime (0-based) `p`; 0 or 1 except for weighted sets.
    pub fn weight(&self, index: usize, p: u64) -> Complex64 {
        let one = |b: bool| Complex64::new(if b { 1.0 } else { 0.0 }, 0.0);
        match self {
            PrimeSetSpec::ResidueUnion(r) => one(r.contains(p)),
            PrimeSetSpec::FrobeniusUnion(f) => one(f.contains(p)),
            PrimeSetSpec::Weighted(w) => w.weight_of(p),
            PrimeSetSpec::OddIndexed => one(index % 2 == 0),
            PrimeSetSpec::Procedural(s) => one((s.member)(p)),
        }
    }

    pub fn is_weighted(&self) -> bool {
        matches!(self, PrimeSetSpec::Weighted(_))
    }

    /// Rational density `a/b`; `None` for weighted and procedural sets.
    pub fn density(&self) -> Option<Rational64> {
        match self {
            PrimeSetSpec::ResidueUnion(r) => Some(r.density()),
            PrimeSetSpec::FrobeniusUnion(f) => Some(f.density()),
            PrimeSetSpec::OddIndexed => Some(Rational64::new(1, 2)),
            PrimeSetSpec::Weighted(_) | PrimeSetSpec::Procedural(_) => None,
        }
    }

    /// `λ = |P₀| − |P₁|`.
    pub fn lambda(&self) -> i64 {
        match self {
            PrimeSetSpec::ResidueUnion(r) => r.exceptions.lambda(),
            PrimeSetSpec::FrobeniusUnion(f) => f.exceptions.lambda(),
            _ => 0,
        }
    }

    /// Members up to `x`.
    pub fn members(&self, table: &PrimeTable, x: f64) -> Result<Vec<u64>> {
        if self.is_weighted() {
            return Err(ChebError::Unsupported("a weighted class combination has no member list".into()));
        }
        let n = table.floor_checked(x)?;
        let primes = &table.primes()[..table.pi_int(n) as usize];
        Ok(primes.iter().enumerate().filter(|&(i, &p)| self.weight(i, p).re == 1.0).map(|(_, &p)| p).collect())
    }

    /// `P(x)`; for weighted sets use [`PrimeSetSpec::weighted_count`].
    pub fn count(&self, table: &PrimeTable, x: f64) -> Result<u64> {
        if let PrimeSetSpec::OddIndexed = self {
            return Ok(table.pi(x)?.div_ceil(2));
        }
        Ok(self.members(table, x)?.len() as u64)
    }

    /// `Σ_{p ≤ x} w(p)`, which is `F(x)` for weighted sets and `P(x)` otherwise.
    pub fn weighted_count(&self, table: &PrimeTable, x: f64) -> Result<Complex64> {
        let n = table.floor_checked(x)?;
        let primes = &table.primes()[..table.pi_int(n) as usize];
        Ok(primes.iter().enumerate().map(|(i, &p)| self.weight(i, p)).sum())
    }

    /// Residue-class weights `(q, [(a, w_a)])` of an abelian set; exceptions are
    /// not included. Refuses sets without L-function structure.
    pub fn residue_weights(&self) -> Result<(u64, Vec<(u64, Complex64)>)> {
        let one = Complex64::new(1.0, 0.0);
        let reduce = |ext: &ExtensionCatalogEntry, pairs: Vec<(usize, Complex64)>| {
            let red = ext.abelian_reduction.as_ref().ok_or_else(|| {
                ChebError::Unsupported(format!("extension `{}` is not abelian; no Dirichlet reduction", ext.id))
            })?;
            let mut out: Vec<(u64, Complex64)> =
                pairs.into_iter().flat_map(|(c, w)| red.residues[c].iter().map(move |&a| (a, w))).collect();
            out.sort_by_key(|&(a, _)| a);
            Ok((red.modulus, out))
        };
        match self {
            PrimeSetSpec::ResidueUnion(r) => Ok((r.q, r.classes.iter().map(|&a| (a, one)).collect())),
            PrimeSetSpec::FrobeniusUnion(f) => reduce(&f.ext, f.classes.iter().map(|&c| (c, one)).collect()),
            PrimeSetSpec::Weighted(w) => reduce(&w.ext, w.weights.clone()),
            PrimeSetSpec::OddIndexed => {
                Err(ChebError::Unsupported("the odd-indexed prime set has no explicit formula".into()))
            }
            PrimeSetSpec::Procedural(s) => {
                Err(ChebError::Unsupported(format!("procedural set `{}` has no explicit formula", s.name)))
            }
        }
    }

    pub fn exceptions(&self) -> Exceptions {
        match self {
            PrimeSetSpec::ResidueUnion(r) => r.exceptions.clone(),
            PrimeSetSpec::FrobeniusUnion(f) => f.exceptions.clone(),
            _ => Exceptions::default(),
        }
    }
}

/// Union of classes `a_j mod q_j` expressed at the common modulus `lcm(q_j)`.
pub fn unify_moduli(specs: &[(i64, u64)]) -> Result<ResidueUnion> {
    if specs.is_empty() {
        return Err(ChebError::invalid("no residue classes given"));
    }
    for &(a, q) in specs {
        if q == 0 || gcd(a.rem_euclid(q.max(1) as i64) as u64, q) != 1 {
            return Err(ChebError::invalid(format!("{a} mod {q} is not a reduced residue class")));
        }
    }
    let modulus = specs.iter().fold(1, |l, &(_, q)| lcm(l, q));
    let classes: Vec<i64> = (0..modulus)
        .filter(|&b| gcd(b, modulus) == 1 && specs.iter().any(|&(a, q)| b % q == a.rem_euclid(q as i64) as u64))
        .map(|b| b as i64)
        .collect();
    ResidueUnion::simple(modulus, &classes)
}

/// `#(A △ B)` among primes up to `x`.
pub fn symmetric_difference_count(a: &PrimeSetSpec, b: &PrimeSetSpec, table: &PrimeTable, x: f64) -> Result<u64> {
    if a.is_weighted() || b.is_weighted() {
        return Err(ChebError::Unsupported("symmetric difference of weighted combinations".into()));
    }
    let n = table.floor_checked(x)?;
    let primes = &table.primes()[..table.pi_int(n) as usize];
    Ok(primes.iter().enumerate().filter(|&(i, &p)| a.weight(i, p) != b.weight(i, p)).count() as u64)
}

/// `P(x)/π(x)`.
pub fn density_estimate(spec: &PrimeSetSpec, table: &PrimeTable, x: f64) -> Result<f64> {
    let pi = table.pi(x)?;
    if pi == 0 {
        return Err(ChebError::invalid("density needs x ≥ 2"));
    }
    Ok(spec.count(table, x)? as f64 / pi as f64)
}

/// `P_odd(x) − π(x)/2`, checked against the exact case split: `1/2` when
/// `p_{2j−1} ≤ x < p_{2j}`, otherwise `0`.
pub fn podd_identity_check(table: &PrimeTable, x: f64) -> Result<f64> {
    let pi = table.pi(x)?;
    let value = PrimeSetSpec::OddIndexed.count(table, x)? as f64 - pi as f64 / 2.0;
    let expected = if pi % 2 == 1 { 0.5 } else { 0.0 };
    if value != expected {
        return Err(ChebError::IdentityViolation(format!(
            "P_odd({x}) - pi({x})/2 = {value}, expected {expected}"
        )));
    }
    Ok(value)
}

fn parse_err(pos: usize, msg: impl Into<String>) -> ChebError {
    ChebError::Parse { pos, msg: msg.into() }
}

fn parse_list<T: FromStr>(value: &str, pos: usize) -> Result<Vec<T>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for item in value.split(',') {
        if !item.is_empty() {
            out.push(item.trim().parse().map_err(|_| parse_err(pos + offset, format!("bad list item `{item}`")))?);
        }
        offset += item.len() + 1;
    }
    Ok(out)
}

fn parse_weight(text: &str, pos: usize) -> Result<Complex64> {
    if let Some((n, d)) = text.split_once('/') {
        let n: f64 = n.parse().map_err(|_| parse_err(pos, format!("bad weight `{text}`")))?;
        let d: f64 = d.parse().map_err(|_| parse_err(pos, format!("bad weight `{text}`")))?;
        if d == 0.0 {
            return Err(parse_err(pos, "zero denominator"));
        }
        return Ok(Complex64::new(n / d, 0.0));
    }
    text.parse::<Complex64>().map_err(|_| parse_err(pos, format!("bad weight `{text}`")))
}

impl FromStr for PrimeSetSpec {
    type Err = ChebError;

    /// Formats: `residue q=12 classes=1,5,11 add= remove=`,
    /// `frobenius ext=s3_x3m2 classes=transposition`, `podd`,
    /// `weighted ext=gauss_i split:1/2,inert:-1/2`.
    fn from_str(text: &str) -> Result<Self> {
        let base = text.as_ptr() as usize;
        let tokens: Vec<(usize, &str)> = text.split_whitespace().map(|t| (t.as_ptr() as usize - base, t)).collect();
        let (kpos, kind) = *tokens.first().ok_or_else(|| parse_err(0, "empty set specification"))?;
        if !matches!(kind, "residue" | "frobenius" | "weighted" | "podd") {
            return Err(parse_err(kpos, format!("unknown set kind `{kind}`")));
        }
        let mut q = None;
        let mut ext = None;
        let mut classes: Option<(usize, &str)> = None;
        let mut added = Vec::new();
        let mut removed = Vec::new();
        let mut weights: Option<(usize, &str)> = None;
        for &(pos, tok) in &tokens[1..] {
            let Some((key, value)) = tok.split_once('=') else {
                if kind == "weighted" && weights.is_none() {
                    weights = Some((pos, tok));
                    continue;
                }
                return Err(parse_err(pos, format!("expected key=value, got `{tok}`")));
            };
            let vpos = pos + key.len() + 1;
            match (kind, key) {
                ("residue", "q") => {
                    q = Some(value.parse::<u64>().map_err(|_| parse_err(vpos, format!("bad modulus `{value}`")))?)
                }
                ("residue" | "frobenius", "classes") => classes = Some((vpos, value)),
                ("residue" | "frobenius", "add") => added = parse_list(value, vpos)?,
                ("residue" | "frobenius", "remove") => removed = parse_list(value, vpos)?,
                ("frobenius" | "weighted", "ext") => ext = Some((vpos, value)),
                ("weighted", "weights") => weights = Some((vpos, value)),
                _ => return Err(parse_err(pos, format!("unexpected key `{key}` for `{kind}`"))),
            }
        }
        let end = text.trim_end().len();
        let ctx = |pos: usize| move |e: ChebError| match e {
            ChebError::Parse { .. } => e,
            other => parse_err(pos, other.to_string()),
        };
        match kind {
            "podd" => {
                if tokens.len() > 1 {
                    return Err(parse_err(tokens[1].0, "`podd` takes no arguments"));
                }
                Ok(PrimeSetSpec::OddIndexed)
            }
            "residue" => {
                let q = q.ok_or_else(|| parse_err(end, "missing `q=`"))?;
                let (cpos, cls) = classes.ok_or_else(|| parse_err(end, "missing `classes=`"))?;
                let cls: Vec<i64> = parse_list(cls, cpos)?;
                let ex = Exceptions::new(&added, &removed).map_err(ctx(kpos))?;
                Ok(PrimeSetSpec::ResidueUnion(ResidueUnion::new(q, &cls, ex).map_err(ctx(cpos))?))
            }
            "frobenius" => {
                let (epos, ext) = ext.ok_or_else(|| parse_err(end, "missing `ext=`"))?;
                lookup(ext).map_err(ctx(epos))?;
                let (cpos, cls) = classes.ok_or_else(|| parse_err(end, "missing `classes=`"))?;
                let ids: Vec<&str> = cls.split(',').filter(|s| !s.is_empty()).collect();
                let ex = Exceptions::new(&added, &removed).map_err(ctx(kpos))?;
                Ok(PrimeSetSpec::FrobeniusUnion(FrobeniusUnion::new(ext, &ids, ex).map_err(ctx(cpos))?))
            }
            "weighted" => {
                let (epos, ext) = ext.ok_or_else(|| parse_err(end, "missing `ext=`"))?;
                lookup(ext).map_err(ctx(epos))?;
                let (wpos, list) = weights.ok_or_else(|| parse_err(end, "missing class:weight list"))?;
                let mut pairs = Vec::new();
                let mut offset = 0;
                for item in list.split(',') {
                    let ipos = wpos + offset;
                    let (id, w) =
                        item.split_once(':').ok_or_else(|| parse_err(ipos, format!("expected class:weight, got `{item}`")))?;
                    pairs.push((id, parse_weight(w, ipos + id.len() + 1)?));
                    offset += item.len() + 1;
                }
                Ok(PrimeSetSpec::Weighted(WeightedClasses::new(ext, &pairs).map_err(ctx(wpos))?))
            }
            _ => unreachable!("kind checked above"),
        }
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for PrimeSetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeSetSpec::ResidueUnion(r) => write!(
                f,
                "residue q={} classes={} add={} remove={}",
                r.q,
                join(&r.classes),
                join(&r.exceptions.added),
                join(&r.exceptions.removed)
            ),
            PrimeSetSpec::FrobeniusUnion(u) => write!(
                f,
                "frobenius ext={} classes={} add={} remove={}",
                u.ext.id,
                u.class_ids().join(","),
                join(&u.exceptions.added),
                join(&u.exceptions.removed)
            ),
            PrimeSetSpec::Weighted(w) => {
                let items: Vec<String> = w
                    .weights
                    .iter()
                    .map(|&(c, z)| {
                        let id = &w.ext.group.classes()[c].id;
                        if z.im == 0.0 {
                            format!("{id}:{}", z.re)
                        } else {
                            format!("{id}:{z}")
                        }
                    })
                    .collect();
                write!(f, "weighted ext={} {}", w.ext.id, items.join(","))
            }
            PrimeSetSpec::OddIndexed => write!(f, "podd"),
            PrimeSetSpec::Procedural(s) => write!(f, "procedural {}", s.name),
        }
    }
}
