// SPDX-License-Identifier: Apache-2.0

//! Discrepancy of a prime set against a reference count, and the truncated
//! explicit formula that predicts it.
//!
//! For a set with residue weights `w_a (mod q)` and density `s`, the
//! normalized discrepancy `Δ(x) = (log x/√x)(P(x) − ref(x))` is modelled by
//! `ν + Σ_ρ α_ρ x^{iγ}/ρ`. A zero of the primitive `L(s, χ₁)` inducing
//! `χ (mod q)` receives `α = −c_χ` with `c_χ = (1/φ(q)) Σ_a w_a conj(χ)(a)`,
//! and `ν = −κ` before reference corrections:
//!
//! | reference     | ν          | α                                   |
//! |---------------|------------|-------------------------------------|
//! | `s·Li(x)`     | `+0`       | unchanged                           |
//! | `s·π(x)`      | `+s`       | `+s` on zeros of ζ                  |
//! | `s·π(x, F)`   | `+s`       | `+s` on zeros of ζ and `L(s, χ_D)`  |
//! | `σ·Q(x)`      | `+σ·κ_Q`   | `+σ·c^Q_χ`                          |

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{euler_phi, factorize, kronecker};
use crate::characters::{character, character_group, CharacterDescriptor, DirichletCharacter};
use crate::counting::{c_chi_weighted, kappa_weighted};
use crate::error::{ChebError, Result};
use crate::frobenius::{classify_quadratic, QuadraticField, Splitting};
use crate::lfunc::{l_value, ZeroDb, ZeroSet};
use crate::primesets::PrimeSetSpec;
use crate::quad::{self, NeumaierAcc};
use crate::sieve::{li_between, PrimeTable};

/// Ordinates closer than this are treated as one zero.
pub const MERGE_TOLERANCE: f64 = 1e-6;
/// Default y-step for mean-square trapezoid rules.
pub const Y_STEP: f64 = 1e-3;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Reference count subtracted from the set count. A missing scale means
/// "the density of the set".
#[derive(Debug, Clone)]
pub enum Reference {
    Pi(Option<Complex64>),
    Li(Option<Complex64>),
    Dedekind(QuadraticField, Option<Complex64>),
    Set(Box<PrimeSetSpec>, Option<Complex64>),
}

/// Natural scale of a set: its density, or the mean weight of a weighted combination.
pub fn set_scale(set: &PrimeSetSpec) -> Option<Complex64> {
    match set {
        PrimeSetSpec::Weighted(w) => Some(w.mean_weight()),
        other => other.density().map(|r| Complex64::new(*r.numer() as f64 / *r.denom() as f64, 0.0)),
    }
}

impl Reference {
    fn explicit_scale(&self) -> Option<Complex64> {
        match self {
            Reference::Pi(s) | Reference::Li(s) | Reference::Dedekind(_, s) | Reference::Set(_, s) => *s,
        }
    }

    /// Scale used against `set`.
    pub fn scale_for(&self, set: &PrimeSetSpec) -> Result<Complex64> {
        let natural = set_scale(set);
        match self {
            Reference::Set(other, s) => match s {
                Some(s) => Ok(*s),
                None => {
                    let (a, b) = (natural, set_scale(other));
                    match (a, b) {
                        (Some(a), Some(b)) if b.norm() > 0.0 => Ok(a / b),
                        _ => Err(ChebError::invalid("reference set scale cannot be inferred; give `*scale`")),
                    }
                }
            },
            _ => self
                .explicit_scale()
                .or(natural)
                .ok_or_else(|| ChebError::invalid(format!("set `{set}` has no density; give the reference scale"))),
        }
    }
}

fn parse_scale(text: &str) -> Result<Complex64> {
    let bad = || ChebError::Parse { pos: 0, msg: format!("bad scale `{text}`") };
    if let Some((n, d)) = text.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| bad())?;
        let d: f64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0.0 {
            return Err(bad());
        }
        return Ok(Complex64::new(n / d, 0.0));
    }
    text.trim().parse::<Complex64>().map_err(|_| bad())
}

impl FromStr for Reference {
    type Err = ChebError;

    /// `pi`, `pi-half`, `pi*1/3`, `li`, `li*1/2`, `dedekind:-1`, `dedekind:5*1/2`, `set:<spec>`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(spec) = text.strip_prefix("set:") {
            let (spec, scale) = match spec.rsplit_once('*') {
                Some((a, b)) => (a, Some(parse_scale(b)?)),
                None => (spec, None),
            };
            let inner: PrimeSetSpec = spec.parse().map_err(|e| match e {
                ChebError::Parse { pos, msg } => ChebError::Parse { pos: pos + 4, msg },
                other => other,
            })?;
            return Ok(Reference::Set(Box::new(inner), scale));
        }
        let (head, scale) = match text.split_once('*') {
            Some((h, s)) => (h, Some(parse_scale(s).map_err(|_| ChebError::Parse {
                pos: h.len() + 1,
                msg: format!("bad scale `{s}`"),
            })?)),
            None => (text, None),
        };
        match head {
            "pi" => Ok(Reference::Pi(scale)),
            "pi-half" if scale.is_none() => Ok(Reference::Pi(Some(Complex64::new(0.5, 0.0)))),
            "li" => Ok(Reference::Li(scale)),
            _ => {
                if let Some(d) = head.strip_prefix("dedekind:") {
                    let d: i64 = d.parse().map_err(|_| ChebError::Parse { pos: 9, msg: format!("bad d `{d}`") })?;
                    let field = QuadraticField::new(d).map_err(|e| ChebError::Parse { pos: 9, msg: e.to_string() })?;
                    return Ok(Reference::Dedekind(field, scale));
                }
                Err(ChebError::Parse { pos: 0, msg: format!("unknown reference `{head}`") })
            }
        }
    }
}

fn fmt_scale(s: &Option<Complex64>) -> String {
    match s {
        None => String::new(),
        Some(z) if z.im == 0.0 => format!("*{}", z.re),
        Some(z) => format!("*{z}"),
    }
}

impl fmt::Display for Reference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reference::Pi(s) => write!(f, "pi{}", fmt_scale(s)),
            Reference::Li(s) => write!(f, "li{}", fmt_scale(s)),
            Reference::Dedekind(field, s) => write!(f, "dedekind:{}{}", field.d(), fmt_scale(s)),
            Reference::Set(spec, s) => write!(f, "set:{spec}{}", fmt_scale(s)),
        }
    }
}

/// `G(t) = 2√t (log t − 2)`, an antiderivative of `log t/√t`.
fn g_anti(t: f64) -> f64 {
    2.0 * t.sqrt() * (t.ln() - 2.0)
}

/// Exact set-minus-reference difference `D(x) = S(x) − c·Li(x)`, where `S` is a
/// right-continuous step function with jumps at prime powers.
#[derive(Debug, Clone)]
pub struct Discrepancy {
    x_max: u64,
    positions: Vec<u64>,
    values: Vec<Complex64>,
    /// `∫_2^{positions[k]} S(t) log t/√t dt`.
    step_integral: Vec<Complex64>,
    li_coeff: Complex64,
}

impl Discrepancy {
    pub fn new(table: &PrimeTable, set: &PrimeSetSpec, reference: &Reference) -> Result<Self> {
        let scale = reference.scale_for(set)?;
        let primes = table.primes();
        let mut jumps: Vec<(u64, Complex64)> = primes
            .par_iter()
            .enumerate()
            .map(|(i, &p)| {
                let mut j = set.weight(i, p);
                match reference {
                    Reference::Pi(_) => j -= scale,
                    Reference::Li(_) => {}
                    Reference::Dedekind(field, _) => match classify_quadratic(p, field) {
                        Splitting::Split => j -= 2.0 * scale,
                        Splitting::Ramified => j -= scale,
                        Splitting::Inert => {}
                    },
                    Reference::Set(other, _) => j -= scale * other.weight(i, p),
                }
                (p, j)
            })
            .collect();
        if let Reference::Dedekind(field, _) = reference {
            for &p in primes.iter().take_while(|&&p| p.saturating_mul(p) <= table.x_max()) {
                if classify_quadratic(p, field) == Splitting::Inert {
                    jumps.push((p * p, -scale));
                }
            }
            jumps.sort_by_key(|&(n, _)| n);
        }
        let li_coeff = if matches!(reference, Reference::Li(_)) { scale } else { ZERO };
        let (mut re, mut im) = (NeumaierAcc::default(), NeumaierAcc::default());
        let mut positions = Vec::new();
        let mut values = Vec::new();
        for (n, j) in jumps {
            if j == ZERO {
                continue;
            }
            re.add(j.re);
            im.add(j.im);
            positions.push(n);
            values.push(Complex64::new(re.value(), im.value()));
        }
        let mut step_integral = Vec::with_capacity(positions.len());
        let (mut ire, mut iim) = (NeumaierAcc::default(), NeumaierAcc::default());
        for k in 0..positions.len() {
            if k > 0 {
                let piece = values[k - 1] * (g_anti(positions[k] as f64) - g_anti(positions[k - 1] as f64));
                ire.add(piece.re);
                iim.add(piece.im);
            }
            step_integral.push(Complex64::new(ire.value(), iim.value()));
        }
        Ok(Discrepancy { x_max: table.x_max(), positions, values, step_integral, li_coeff })
    }

    pub fn x_max(&self) -> u64 {
        self.x_max
    }

    fn check(&self, x: f64) -> Result<()> {
        if !(x >= 0.0 && x <= self.x_max as f64) {
            return Err(ChebError::OutOfRange { x, x_max: self.x_max });
        }
        Ok(())
    }

    /// Index of the last jump at or below `x`.
    fn last_jump(&self, x: f64) -> Option<usize> {
        let n = x.floor() as u64;
        self.positions.partition_point(|&p| p <= n).checked_sub(1)
    }

    fn step(&self, x: f64) -> Complex64 {
        self.last_jump(x).map_or(ZERO, |k| self.values[k])
    }

    /// Number of discontinuities in `[2, x]`.
    pub fn jump_census(&self, x: f64) -> Result<usize> {
        self.check(x)?;
        Ok(self.last_jump(x).map_or(0, |k| k + 1))
    }

    /// `D(x)` given `Li(x)`.
    fn difference_with_li(&self, x: f64, li_x: f64) -> Complex64 {
        self.step(x) - self.li_coeff * li_x
    }

    fn li_if_needed(&self, x: f64) -> f64 {
        if self.li_coeff == ZERO || x <= 2.0 {
            0.0
        } else {
            li_between(2.0, x)
        }
    }

    /// `D(x) = P(x) − ref(x)`.
    pub fn difference(&self, x: f64) -> Result<Complex64> {
        self.check(x)?;
        Ok(self.difference_with_li(x, self.li_if_needed(x)))
    }

    /// `Δ(x) = (log x/√x) D(x)`, complex for weighted sets.
    pub fn delta_complex(&self, x: f64) -> Result<Complex64> {
        if x < 2.0 {
            return Err(ChebError::invalid(format!("Δ(x) needs x ≥ 2, got {x}")));
        }
        Ok(self.difference(x)? * (x.ln() / x.sqrt()))
    }

    pub fn delta(&self, x: f64) -> Result<f64> {
        Ok(self.delta_complex(x)?.re)
    }

    /// `Δ` on an ascending grid, with `Li` accumulated panel by panel.
    pub fn delta_on_grid(&self, xs: &[f64]) -> Result<Vec<Complex64>> {
        for &x in xs {
            self.check(x)?;
            if x < 2.0 {
                return Err(ChebError::invalid("Δ(x) needs x ≥ 2"));
            }
        }
        let li = self.cumulative(xs, li_between);
        Ok(xs.par_iter().zip(li).map(|(&x, l)| self.difference_with_li(x, l) * (x.ln() / x.sqrt())).collect())
    }

    /// `∫_2^{x_k} f` for ascending `x_k ≥ 2`, or zeros when no `Li` part exists.
    fn cumulative(&self, xs: &[f64], piece: impl Fn(f64, f64) -> f64 + Sync) -> Vec<f64> {
        if self.li_coeff == ZERO {
            return vec![0.0; xs.len()];
        }
        let pieces: Vec<f64> = (0..xs.len())
            .into_par_iter()
            .map(|k| {
                let a = if k == 0 { 2.0 } else { xs[k - 1].max(2.0) };
                let b = xs[k].max(2.0);
                if b > a {
                    piece(a, b)
                } else {
                    0.0
                }
            })
            .collect();
        let mut acc = NeumaierAcc::default();
        pieces.into_iter().map(|p| {
            acc.add(p);
            acc.value()
        }).collect()
    }

    /// `∫_2^x S(t) log t/√t dt`, exact piecewise.
    fn step_part_integral(&self, x: f64) -> Complex64 {
        match self.last_jump(x) {
            None => ZERO,
            Some(k) => self.step_integral[k] + self.values[k] * (g_anti(x) - g_anti(self.positions[k] as f64)),
        }
    }

    /// `∫_2^x Li(t) log t/√t dt = Li(x) G(x) − (4/3)(x^{3/2} − 2^{3/2}) + 4 ∫_2^x √t/log t dt`.
    fn li_part_integral(x: f64, li_x: f64, sqrt_over_log: f64) -> f64 {
        li_x * g_anti(x) - 4.0 / 3.0 * (x.powf(1.5) - 2f64.powf(1.5)) + 4.0 * sqrt_over_log
    }

    fn sqrt_over_log(a: f64, b: f64) -> f64 {
        quad::integrate(|u: f64| (1.5 * u).exp() / u, a.ln(), b.ln(), 1e-9 * b.powf(1.5) / b.ln() * 1e-3)
    }

    /// `M(x) = (1/x) ∫_2^x Δ(t) dt`.
    pub fn m_average_complex(&self, x: f64) -> Result<Complex64> {
        self.check(x)?;
        if x <= 2.0 {
            return Ok(ZERO);
        }
        let mut integral = self.step_part_integral(x);
        if self.li_coeff != ZERO {
            let li_x = li_between(2.0, x);
            integral -= self.li_coeff * Self::li_part_integral(x, li_x, Self::sqrt_over_log(2.0, x));
        }
        Ok(integral / x)
    }

    pub fn m_average(&self, x: f64) -> Result<f64> {
        Ok(self.m_average_complex(x)?.re)
    }

    /// `M` on an ascending grid.
    pub fn m_average_on_grid(&self, xs: &[f64]) -> Result<Vec<Complex64>> {
        for &x in xs {
            self.check(x)?;
        }
        let li = self.cumulative(xs, li_between);
        let sl = self.cumulative(xs, Self::sqrt_over_log);
        Ok(xs
            .par_iter()
            .enumerate()
            .map(|(k, &x)| {
                if x <= 2.0 {
                    return ZERO;
                }
                let mut integral = self.step_part_integral(x);
                if self.li_coeff != ZERO {
                    integral -= self.li_coeff * Self::li_part_integral(x, li[k], sl[k]);
                }
                integral / x
            })
            .collect())
    }

    /// True when the difference vanishes identically.
    pub fn is_identically_zero(&self) -> bool {
        self.positions.is_empty() && self.li_coeff == ZERO
    }
}

/// One zero `ρ = 1/2 + iγ` of the combined explicit formula.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTerm {
    pub gamma: f64,
    pub alpha: Complex64,
    pub sources: Vec<CharacterDescriptor>,
}

impl ZeroTerm {
    pub fn rho(&self) -> Complex64 {
        Complex64::new(0.5, self.gamma)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ModelOptions {
    pub allow_uncertified: bool,
}

/// Explicit-formula data for a set/reference pair.
#[derive(Debug, Clone)]
pub struct DiscrepancyModel {
    pub set: PrimeSetSpec,
    pub reference: Reference,
    pub modulus: u64,
    pub density: Complex64,
    pub kappa: Complex64,
    pub nu: Complex64,
    pub height: f64,
    /// `c_χ` for every character mod `q`.
    pub c_chi: Vec<(CharacterDescriptor, Complex64)>,
    /// Coefficient attached to all zeros of each primitive L-function.
    pub coefficients: Vec<(CharacterDescriptor, Complex64)>,
    pub terms: Vec<ZeroTerm>,
    pub certified: bool,
    pub diagnostics: Vec<String>,
    pub discrepancy: Discrepancy,
}

/// Primitive real character `n ↦ (D/n)` for a fundamental discriminant `D`.
pub fn kronecker_character(disc: i64) -> Result<DirichletCharacter> {
    let m = disc.unsigned_abs();
    character_group(m)?
        .into_iter()
        .find(|chi| chi.is_primitive() && (1..m).all(|n| chi.eval_u64(n).re == kronecker(disc, n) as f64))
        .ok_or_else(|| ChebError::invalid(format!("{disc} is not a fundamental discriminant")))
}

fn add_coefficient(map: &mut BTreeMap<CharacterDescriptor, Complex64>, desc: CharacterDescriptor, c: Complex64) {
    *map.entry(desc).or_insert(ZERO) += c;
}

/// Adds `sign · c_χ` of a residue-weighted set to the coefficient map and returns its `(density, κ)`.
fn add_residue_data(
    map: &mut BTreeMap<CharacterDescriptor, Complex64>,
    c_list: Option<&mut Vec<(CharacterDescriptor, Complex64)>>,
    q: u64,
    weights: &[(u64, Complex64)],
    sign: Complex64,
) -> Result<(Complex64, Complex64)> {
    let mut list = Vec::new();
    for chi in character_group(q)? {
        let c = c_chi_weighted(weights, q, &chi)?;
        list.push((chi.descriptor(), c));
        if c.norm() > 1e-14 {
            add_coefficient(map, chi.inducer(), sign * c);
        }
    }
    let density = weights.iter().map(|&(_, w)| w).sum::<Complex64>() / euler_phi(q) as f64;
    if let Some(out) = c_list {
        *out = list;
    }
    Ok((density, kappa_weighted(weights, q)))
}

fn is_negligible(z: Complex64) -> bool {
    z.norm() <= 1e-12
}

/// Assembles the truncated explicit formula for `set − reference` using zeros up to `height`.
pub fn build_model(
    table: &PrimeTable,
    set: &PrimeSetSpec,
    reference: &Reference,
    zeros: &mut ZeroDb,
    height: f64,
    options: ModelOptions,
) -> Result<DiscrepancyModel> {
    let (q, weights) = set.residue_weights()?;
    let scale = reference.scale_for(set)?;
    let mut coeffs: BTreeMap<CharacterDescriptor, Complex64> = BTreeMap::new();
    let mut c_list = Vec::new();
    let (density, kappa) = add_residue_data(&mut coeffs, Some(&mut c_list), q, &weights, Complex64::new(-1.0, 0.0))?;
    let mut nu = -kappa;
    let zeta = CharacterDescriptor { modulus: 1, index: 0 };
    let mut diagnostics = Vec::new();
    match reference {
        Reference::Pi(_) | Reference::Li(_) | Reference::Dedekind(..) if (scale - density).norm() > 1e-12 => {
            return Err(ChebError::invalid(format!(
                "reference scale {scale} differs from the set density {density}; the main terms would not cancel"
            )));
        }
        Reference::Pi(_) => {
            add_coefficient(&mut coeffs, zeta, scale);
            nu += scale;
        }
        Reference::Li(_) => {}
        Reference::Dedekind(field, _) => {
            add_coefficient(&mut coeffs, zeta, scale);
            add_coefficient(&mut coeffs, kronecker_character(field.discriminant())?.descriptor(), scale);
            nu += scale;
        }
        Reference::Set(other, _) => {
            let (q2, w2) = other.residue_weights()?;
            let (d2, k2) = add_residue_data(&mut coeffs, None, q2, &w2, scale)?;
            if (scale * d2 - density).norm() > 1e-12 {
                return Err(ChebError::invalid("scaled reference set has a different density"));
            }
            nu += scale * k2;
        }
    }
    let coefficients: Vec<(CharacterDescriptor, Complex64)> =
        coeffs.into_iter().filter(|(_, c)| !is_negligible(*c)).collect();
    let mut raw: Vec<ZeroTerm> = Vec::new();
    let mut certified = true;
    for &(desc, c) in &coefficients {
        let zs: &ZeroSet = zeros.ensure(desc, height)?;
        if !zs.certified {
            if !options.allow_uncertified {
                return Err(ChebError::Uncertified(desc.to_string()));
            }
            certified = false;
            diagnostics.push(format!("zeros of L(s, {desc}) are not certified"));
        }
        for g in zs.signed_ordinates_below(height) {
            if g.abs() < MERGE_TOLERANCE {
                nu += 2.0 * c;
                diagnostics.push(format!("zero of L(s, {desc}) at s = 1/2 folded into nu"));
                continue;
            }
            raw.push(ZeroTerm { gamma: g, alpha: c, sources: vec![desc] });
        }
    }
    raw.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
    let mut terms: Vec<ZeroTerm> = Vec::with_capacity(raw.len());
    for t in raw {
        match terms.last_mut() {
            Some(last) if (t.gamma - last.gamma).abs() < MERGE_TOLERANCE => {
                diagnostics.push(format!(
                    "ordinate {:.9} shared by {} and {}; coefficients summed",
                    t.gamma, last.sources[0], t.sources[0]
                ));
                last.alpha += t.alpha;
                last.sources.extend(t.sources);
            }
            _ => terms.push(t),
        }
    }
    let discrepancy = Discrepancy::new(table, set, reference)?;
    Ok(DiscrepancyModel {
        set: set.clone(),
        reference: reference.clone(),
        modulus: q,
        density,
        kappa,
        nu,
        height,
        c_chi: c_list,
        coefficients,
        terms,
        certified,
        diagnostics,
        discrepancy,
    })
}

/// Trapezoid rule on a uniform grid.
fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let mut acc = NeumaierAcc::default();
            acc.add(0.5 * values[0]);
            for v in &values[1..n - 1] {
                acc.add(*v);
            }
            acc.add(0.5 * values[n - 1]);
            acc.value() * h
        }
    }
}

fn uniform_grid(a: f64, b: f64, step: f64) -> (Vec<f64>, f64) {
    let n = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    ((0..=n).map(|k| if k == n { b } else { a + k as f64 * h }).collect(), h)
}

/// A sampled statistic: `(y, empirical, predicted, residual)` rows plus totals.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanSquare {
    pub empirical: f64,
    pub prediction: f64,
    /// Mean square of the residual series (`r(y, T)` for the unsmoothed statistic).
    pub residual: f64,
    pub y_start: f64,
    pub y_end: f64,
    pub step: f64,
    pub rows: Vec<(f64, f64, f64, f64)>,
    pub warnings: Vec<String>,
}

impl DiscrepancyModel {
    pub fn delta(&self, x: f64) -> Result<f64> {
        self.discrepancy.delta(x)
    }

    pub fn m_average(&self, x: f64) -> Result<f64> {
        self.discrepancy.m_average(x)
    }

    /// All α and ν vanish: the full-set case, where no Ω-bound follows.
    pub fn is_degenerate(&self) -> bool {
        self.terms.iter().all(|t| is_negligible(t.alpha)) && is_negligible(self.nu)
    }

    /// `Σ_χ |c_χ|`, an upper bound for every `|α_ρ|` coming from the set itself.
    pub fn alpha_bound(&self) -> f64 {
        self.c_chi.iter().map(|(_, c)| c.norm()).sum()
    }

    /// `ν + Σ_{|γ| < T} α e^{iγy} / (ρ · (1 + iγ)^smooth)`.
    fn zero_sum(&self, y: f64, smooth: bool) -> Complex64 {
        let mut acc = self.nu;
        for t in &self.terms {
            let mut denom = t.rho();
            if smooth {
                denom *= Complex64::new(1.0, t.gamma);
            }
            acc += t.alpha * Complex64::from_polar(1.0, t.gamma * y) / denom;
        }
        acc
    }

    /// `ν² + Σ |α|²/|ρ|²` (unsmoothed) or `ν² + Σ |α|²/|ρ(1+iγ)|²` (smoothed).
    pub fn prediction(&self, smooth: bool) -> f64 {
        let mut acc = NeumaierAcc::default();
        acc.add(self.nu.norm_sqr());
        for t in &self.terms {
            let mut d = t.rho().norm_sqr();
            if smooth {
                d *= 1.0 + t.gamma * t.gamma;
            }
            acc.add(t.alpha.norm_sqr() / d);
        }
        acc.value()
    }

    fn check_y(&self, y_end: f64) -> Result<()> {
        if y_end.exp() > self.discrepancy.x_max() as f64 * (1.0 + 1e-12) {
            return Err(ChebError::OutOfRange { x: y_end.exp(), x_max: self.discrepancy.x_max() });
        }
        Ok(())
    }

    /// `(1/Y) ∫_{log 2}^{Y} |M(e^y)|² dy` against `ν² + Σ |α|²/|ρ(1+iγ)|²`.
    pub fn mean_square_smoothed(&self, y_end: f64) -> Result<MeanSquare> {
        self.mean_square_smoothed_with_step(y_end, Y_STEP)
    }

    pub fn mean_square_smoothed_with_step(&self, y_end: f64, step: f64) -> Result<MeanSquare> {
        self.check_y(y_end)?;
        let y0 = 2f64.ln();
        let (ys, h) = uniform_grid(y0, y_end, step);
        let xs: Vec<f64> = ys.iter().map(|y| y.exp().clamp(2.0, self.discrepancy.x_max() as f64)).collect();
        let m = self.discrepancy.m_average_on_grid(&xs)?;
        let rows: Vec<(f64, f64, f64, f64)> = ys
            .par_iter()
            .zip(&m)
            .map(|(&y, &mv)| {
                let model = self.zero_sum(y, true);
                (y, mv.re, model.re, (mv - model).re)
            })
            .collect();
        let sq: Vec<f64> = m.iter().map(|z| z.norm_sqr()).collect();
        let res: Vec<f64> = m.iter().zip(&ys).map(|(mv, &y)| (mv - self.zero_sum(y, true)).norm_sqr()).collect();
        Ok(MeanSquare {
            empirical: trapezoid(&sq, h) / y_end,
            prediction: self.prediction(true),
            residual: trapezoid(&res, h) / y_end,
            y_start: y0,
            y_end,
            step: h,
            rows,
            warnings: Vec::new(),
        })
    }

    /// `(2/Y) ∫_{Y/2}^{Y} |Δ(e^y)|² dy` against `ν² + Σ_{|γ|<T} |α|²/|ρ|²`, with
    /// the mean square of `r(y, T) = Δ(e^y) − Σ α e^{iγy}/ρ − ν`.
    pub fn mean_square_unsmoothed(&self, y_end: f64) -> Result<MeanSquare> {
        self.mean_square_unsmoothed_with_step(y_end, Y_STEP)
    }

    pub fn mean_square_unsmoothed_with_step(&self, y_end: f64, step: f64) -> Result<MeanSquare> {
        self.check_y(y_end)?;
        let mut warnings = Vec::new();
        let t = self.height;
        if t > 1.0 && y_end <= t.sqrt() / t.ln() {
            warnings.push(format!("Y = {y_end} does not exceed sqrt(T)/log T = {:.3}", t.sqrt() / t.ln()));
        }
        let y0 = (y_end / 2.0).max(2f64.ln());
        let (ys, h) = uniform_grid(y0, y_end, step);
        let xs: Vec<f64> = ys.iter().map(|y| y.exp().clamp(2.0, self.discrepancy.x_max() as f64)).collect();
        let d = self.discrepancy.delta_on_grid(&xs)?;
        let model: Vec<Complex64> = ys.par_iter().map(|&y| self.zero_sum(y, false)).collect();
        let rows = ys.iter().zip(&d).zip(&model).map(|((&y, dv), mv)| (y, dv.re, mv.re, (dv - mv).re)).collect();
        let sq: Vec<f64> = d.iter().map(|z| z.norm_sqr()).collect();
        let res: Vec<f64> = d.iter().zip(&model).map(|(a, b)| (a - b).norm_sqr()).collect();
        let len = y_end - y0;
        Ok(MeanSquare {
            empirical: trapezoid(&sq, h) / len,
            prediction: self.prediction(false),
            residual: trapezoid(&res, h) / len,
            y_start: y0,
            y_end,
            step: h,
            rows,
            warnings,
        })
    }
}

/// Empirical mean squares of `Δ` and `M` for a set without a model (for
/// example the odd-indexed primes); `prediction` is NaN.
pub fn empirical_mean_squares(disc: &Discrepancy, y_end: f64, step: f64) -> Result<(f64, f64)> {
    if y_end.exp() > disc.x_max() as f64 * (1.0 + 1e-12) {
        return Err(ChebError::OutOfRange { x: y_end.exp(), x_max: disc.x_max() });
    }
    let clamp = |y: f64| y.exp().clamp(2.0, disc.x_max() as f64);
    let (ys, h) = uniform_grid((y_end / 2.0).max(2f64.ln()), y_end, step);
    let xs: Vec<f64> = ys.iter().map(|&y| clamp(y)).collect();
    let d: Vec<f64> = disc.delta_on_grid(&xs)?.iter().map(|z| z.norm_sqr()).collect();
    let unsmoothed = trapezoid(&d, h) / (ys[ys.len() - 1] - ys[0]);
    let (ys, h) = uniform_grid(2f64.ln(), y_end, step);
    let xs: Vec<f64> = ys.iter().map(|&y| clamp(y)).collect();
    let m: Vec<f64> = disc.m_average_on_grid(&xs)?.iter().map(|z| z.norm_sqr()).collect();
    Ok((trapezoid(&m, h) / y_end, unsmoothed))
}

/// `[x if χ principal] − Σ_{|γ|<T} x^ρ/ρ` over the zeros of a primitive χ.
pub fn truncated_psi_chi(chi: &DirichletCharacter, x: f64, height: f64, zeros: &ZeroSet) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(ChebError::NotPrimitive(chi.descriptor().to_string()));
    }
    if zeros.character != chi.descriptor() {
        return Err(ChebError::invalid(format!("zero set belongs to {}, not {}", zeros.character, chi.descriptor())));
    }
    if !zeros.certified {
        return Err(ChebError::Uncertified(chi.descriptor().to_string()));
    }
    if zeros.height < height {
        return Err(ChebError::invalid(format!("zeros only known to height {}", zeros.height)));
    }
    if x < 2.0 {
        return Err(ChebError::invalid("truncated explicit formula needs x ≥ 2"));
    }
    let lx = x.ln();
    let sqrt_x = x.sqrt();
    let mut acc = if chi.is_principal() { Complex64::new(x, 0.0) } else { ZERO };
    for g in zeros.signed_ordinates_below(height) {
        let rho = Complex64::new(0.5, g);
        acc -= Complex64::from_polar(sqrt_x, g * lx) / rho;
    }
    Ok(acc)
}

/// Error shape `x log(xT)²/T + log x` of the truncated explicit formula.
pub fn truncation_envelope(x: f64, height: f64) -> f64 {
    x * (x * height).ln().powi(2) / height + x.ln()
}

/// Truncation errors `|ψ(x, χ) − truncated|` on a grid and the calibrated
/// constant `C = max error/envelope`.
pub fn calibrate_truncation(
    table: &PrimeTable,
    chi: &DirichletCharacter,
    zeros: &ZeroSet,
    height: f64,
    xs: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let errors: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let exact = crate::counting::psi_chi(table, chi, x)?;
            Ok((exact - truncated_psi_chi(chi, x, height, zeros)?).norm())
        })
        .collect::<Result<Vec<_>>>()?;
    let c = errors.iter().zip(xs).map(|(e, &x)| e / truncation_envelope(x, height)).fold(0.0, f64::max);
    Ok((errors, c))
}

/// Both sides of the Dirichlet-series identity for `Σ_j Π(x,q,a_j) − (r/φ(q)) Π(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub gap: f64,
    /// Bound on the part of the integral beyond `x_cut`.
    pub tail_bound: f64,
}

/// `log L(s, χ)` for any χ with `Re s ≥ 1.5`, via the primitive inducer and
/// the missing Euler factors.
pub fn log_l(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    let inducer = character(chi.inducer())?;
    let mut value = l_value(&inducer, s)?.ln();
    for (p, _) in factorize(chi.modulus()) {
        let c = inducer.eval_u64(p);
        if c != ZERO {
            value += (1.0 - c * Complex64::new(p as f64, 0.0).powc(-s)).ln();
        }
    }
    Ok(value)
}

pub fn dirichlet_integral_check(table: &PrimeTable, set: &PrimeSetSpec, s: Complex64, x_cut: f64) -> Result<DirichletCheck> {
    if s.re < 1.5 {
        return Err(ChebError::invalid(format!("Re s must be at least 1.5, got {s}")));
    }
    let n_cut = table.floor_checked(x_cut)?;
    let (q, weights) = set.residue_weights()?;
    let phi = euler_phi(q) as f64;
    let density: Complex64 = weights.iter().map(|&(_, w)| w).sum::<Complex64>() / phi;
    let mut wmap = vec![ZERO; q as usize];
    for &(a, w) in &weights {
        wmap[a as usize] += w;
    }
    let xs = Complex64::new(x_cut, 0.0).powc(-s);
    let terms: Vec<Complex64> = table
        .prime_powers()
        .take_while(|pp| pp.value <= n_cut)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|pp| {
            let w = wmap[(pp.value % q) as usize] - density;
            w / pp.exponent as f64 * (Complex64::new(pp.value as f64, 0.0).powc(-s) - xs) / s
        })
        .collect();
    let (mut re, mut im) = (NeumaierAcc::default(), NeumaierAcc::default());
    for t in terms {
        re.add(t.re);
        im.add(t.im);
    }
    let lhs = Complex64::new(re.value(), im.value());
    let mut rhs = ZERO;
    for chi in character_group(q)?.iter().filter(|c| !c.is_principal()) {
        let c = c_chi_weighted(&weights, q, chi)?;
        if c != ZERO {
            rhs += c * log_l(chi, s)?;
        }
    }
    for (p, _) in factorize(q) {
        rhs += density * (1.0 - Complex64::new(p as f64, 0.0).powc(-s)).ln();
    }
    rhs /= s;
    let sigma = s.re;
    let wmax = weights.iter().map(|(_, w)| w.norm()).fold(0.0, f64::max) + density.norm();
    let tail_bound = wmax * 2.0 * x_cut.powf(1.0 - sigma) / ((sigma - 1.0) * x_cut.ln()) / s.norm();
    Ok(DirichletCheck { lhs, rhs, gap: (lhs - rhs).norm(), tail_bound })
}
