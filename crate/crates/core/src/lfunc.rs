// SPDX-License-Identifier: Apache-2.0

//! Dirichlet L-functions on the critical line and isolation of their zeros.
//!
//! `L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q)` with the Hurwitz zeta function
//! evaluated by Euler–Maclaurin summation. Zeros are located as sign changes
//! of the rotated function `Z(t) = e^{-iφ} e^{iθ(t)} L(1/2 + it, χ)`, where
//! `θ(t) = (t/2) log(q/π) + arg Γ((1/2 + 𝔞 + it)/2)` and the constant `φ`
//! absorbs the square root of the root number. `Z` is real for every
//! primitive character.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::characters::{character, CharacterDescriptor, DirichletCharacter};
use crate::error::{ChebError, Result};

/// `B_2, B_4, …, B_24`.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Largest `|Im s|` accepted by the evaluators.
pub const MAX_HEIGHT: f64 = 500.0;
/// Largest zero-search height.
pub const MAX_ZERO_HEIGHT: f64 = 200.0;
pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const ORDINATE_TOLERANCE: f64 = 1e-11;
pub const RESIDUAL_LIMIT: f64 = 1e-8;

#[inline]
fn cpow_neg(x: f64, s: Complex64) -> Complex64 {
    // x^{-s}
    let l = x.ln();
    Complex64::from_polar((-s.re * l).exp(), -s.im * l)
}

/// `(x^{1-s} - 1)/(s - 1)`, finite at `s = 1`.
fn pole_regular_part(x: f64, s: Complex64) -> Complex64 {
    let l = x.ln();
    let w = (Complex64::new(1.0, 0.0) - s) * l;
    let ratio = if w.norm() < 1e-3 {
        // (e^w - 1)/w
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for k in 2..8 {
            term = term * w / k as f64;
            acc += term;
        }
        acc
    } else {
        (w.exp() - 1.0) / w
    };
    -ratio * l
}

fn check_hurwitz_args(s: Complex64, a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(ChebError::invalid(format!("Hurwitz parameter a = {a} must lie in (0, 1]")));
    }
    if s.im.is_nan() || s.im.abs() > MAX_HEIGHT || !s.re.is_finite() {
        return Err(ChebError::invalid(format!("|Im s| must be at most {MAX_HEIGHT}, got s = {s}")));
    }
    Ok(())
}

/// `ζ(s, a) − 1/(s − 1)`, which is entire in `s`.
fn hurwitz_regular(s: Complex64, a: f64) -> Complex64 {
    let n_terms = 30usize.max((1.3 * s.im.abs()).ceil() as usize);
    let mut direct = Complex64::new(0.0, 0.0);
    for n in 0..n_terms {
        direct += cpow_neg(n as f64 + a, s);
    }
    let x = n_terms as f64 + a;
    let xs = cpow_neg(x, s);
    let mut tail = xs * 0.5;
    let mut rising = s;
    let mut factorial = 2.0;
    let mut xpow = xs / x;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        tail += rising * xpow * (b / factorial);
        let j = 2.0 * (k as f64 + 1.0);
        rising *= (s + (j - 1.0)) * (s + j);
        factorial *= (j + 1.0) * (j + 2.0);
        xpow /= x * x;
    }
    direct + tail + pole_regular_part(x, s)
}

/// Hurwitz zeta `ζ(s, a) = Σ_{n≥0} (n + a)^{-s}` for `0 < a ≤ 1`, `|Im s| ≤ 500`.
pub fn hurwitz_zeta(s: Complex64, a: f64) -> Result<Complex64> {
    check_hurwitz_args(s, a)?;
    if s == Complex64::new(1.0, 0.0) {
        return Err(ChebError::Pole);
    }
    Ok(hurwitz_regular(s, a) + 1.0 / (s - 1.0))
}

/// `L(s, χ)` for a primitive character.
pub fn l_value(chi: &DirichletCharacter, s: Complex64) -> Result<Complex64> {
    if !chi.is_primitive() {
        return Err(ChebError::NotPrimitive(chi.descriptor().to_string()));
    }
    let q = chi.modulus();
    if q == 1 {
        return hurwitz_zeta(s, 1.0);
    }
    check_hurwitz_args(s, 1.0)?;
    // Σ χ(a) = 0, so the 1/(s-1) parts cancel.
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 1..q {
        let c = chi.eval_u64(a);
        if c.norm_sqr() > 0.0 {
            acc += c * hurwitz_regular(s, a as f64 / q as f64);
        }
    }
    Ok(acc * cpow_neg(q as f64, s))
}

/// Principal-branch `log Γ(z)` for `Re z > 0`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for (k, b) in BERNOULLI_EVEN.iter().take(10).enumerate() {
        let k = k as f64 + 1.0;
        series += pow * (b / (2.0 * k * (2.0 * k - 1.0)));
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * std::f64::consts::TAU.ln() + series - shift
}

/// Phase `θ(t)` making `e^{iθ(t)} L(1/2 + it, χ)` a constant multiple of a real number.
pub fn theta(q: u64, parity: u8, t: f64) -> f64 {
    let z = Complex64::new((0.5 + parity as f64) / 2.0, t / 2.0);
    0.5 * t * (q as f64 / std::f64::consts::PI).ln() + ln_gamma(z).im
}

/// Smooth main term `(T/π) log(qT/2π) − T/π` of the zero count `N(T, χ)`,
/// which counts zeros with `|γ| ≤ T`.
pub fn zero_count_estimate(q: u64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let pi = std::f64::consts::PI;
    t / pi * (q as f64 * t / (2.0 * pi)).ln() - t / pi
}

/// Evaluator for the rotated real function on the critical line.
#[derive(Debug, Clone)]
pub struct CriticalLine {
    chi: DirichletCharacter,
    rotation: Complex64,
}

impl CriticalLine {
    pub fn new(chi: &DirichletCharacter) -> Result<Self> {
        if !chi.is_primitive() {
            return Err(ChebError::NotPrimitive(chi.descriptor().to_string()));
        }
        let mut line = CriticalLine { chi: chi.clone(), rotation: Complex64::new(1.0, 0.0) };
        // The constant phase is read off wherever |L| is comfortably large.
        let best = (0..40)
            .map(|k| line.unrotated(0.37 + 0.5 * k as f64))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("nonempty sample");
        line.rotation = (best / best.norm()).conj();
        Ok(line)
    }

    pub fn character(&self) -> &DirichletCharacter {
        &self.chi
    }

    fn unrotated(&self, t: f64) -> Result<Complex64> {
        let l = l_value(&self.chi, Complex64::new(0.5, t))?;
        let th = theta(self.chi.modulus(), self.chi.parity(), t);
        Ok(Complex64::from_polar(1.0, th) * l)
    }

    /// `e^{-iφ} e^{iθ(t)} L(1/2 + it)`; its imaginary part vanishes up to rounding.
    pub fn rotated(&self, t: f64) -> Result<Complex64> {
        Ok(self.rotation * self.unrotated(t)?)
    }

    pub fn z(&self, t: f64) -> Result<f64> {
        Ok(self.rotated(t)?.re)
    }
}

/// Zeros of one primitive L-function up to a height.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    /// Descriptor of the primitive character.
    pub character: CharacterDescriptor,
    pub conductor: u64,
    pub parity: u8,
    /// Real characters store positive ordinates only; complex ones are signed.
    pub real: bool,
    pub height: f64,
    pub ordinates: Vec<f64>,
    pub certified: bool,
    /// Largest `|L(1/2 + iγ)|` over the claimed zeros.
    pub residual_bound: f64,
    pub diagnostics: Vec<String>,
}

impl ZeroSet {
    /// Zero count in the convention `|γ| ≤ T` (both signs).
    pub fn count_both_signs(&self, t: f64) -> usize {
        let n = self.ordinates.iter().filter(|g| g.abs() <= t).count();
        if self.real {
            2 * n
        } else {
            n
        }
    }

    /// All ordinates with `|γ| < t`, both signs, ascending.
    pub fn signed_ordinates_below(&self, t: f64) -> Vec<f64> {
        let mut out: Vec<f64> = if self.real {
            self.ordinates
                .iter()
                .filter(|g| g.abs() < t)
                .flat_map(|&g| [-g, g])
                .collect()
        } else {
            self.ordinates.iter().copied().filter(|g| g.abs() < t).collect()
        };
        out.sort_by(f64::total_cmp);
        out
    }

    /// Zero set of the conjugate character: ordinates negated.
    pub fn conjugate(&self, conj: CharacterDescriptor) -> ZeroSet {
        let mut z = self.clone();
        z.character = conj;
        if !self.real {
            z.ordinates = self.ordinates.iter().rev().map(|g| -g).collect();
        }
        z
    }

    pub fn header(&self) -> String {
        format!(
            "# CHEBZEROS1 q={} index={} conductor={} parity={} T={} certified={}",
            self.character.modulus, self.character.index, self.conductor, self.parity, self.height, self.certified
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = self.header();
        s.push('\n');
        let _ = writeln!(s, "# residual_bound={:e}", self.residual_bound);
        for d in &self.diagnostics {
            let _ = writeln!(s, "# note: {}", d.replace('\n', " "));
        }
        for g in &self.ordinates {
            let _ = writeln!(s, "{g:.12}");
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(self.to_text().as_bytes())?;
        f.sync_all()?;
        fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<ZeroSet> {
        fs::read_to_string(path)?.parse()
    }
}

impl FromStr for ZeroSet {
    type Err = ChebError;

    fn from_str(text: &str) -> Result<ZeroSet> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| ChebError::Format("empty zero file".into()))?;
        let rest = header
            .strip_prefix("# CHEBZEROS1 ")
            .ok_or_else(|| ChebError::Format("missing `# CHEBZEROS1` header".into()))?;
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for kv in rest.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| ChebError::Format(format!("bad header field `{kv}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| ChebError::Format(format!("header lacks `{k}`")));
        let num = |k: &str| -> Result<u64> { get(k)?.parse().map_err(|_| ChebError::Format(format!("bad `{k}`"))) };
        let character = CharacterDescriptor { modulus: num("q")?, index: num("index")? };
        let conductor = num("conductor")?;
        let parity = num("parity")? as u8;
        let height: f64 = get("T")?.parse().map_err(|_| ChebError::Format("bad `T`".into()))?;
        let certified: bool = get("certified")?.parse().map_err(|_| ChebError::Format("bad `certified`".into()))?;
        let mut residual_bound = f64::NAN;
        let mut diagnostics = Vec::new();
        let mut ordinates = Vec::new();
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                let c = c.trim();
                if let Some(v) = c.strip_prefix("residual_bound=") {
                    residual_bound = v.parse().unwrap_or(f64::NAN);
                } else if let Some(n) = c.strip_prefix("note: ") {
                    diagnostics.push(n.to_string());
                }
                continue;
            }
            ordinates.push(line.parse::<f64>().map_err(|_| ChebError::Format(format!("bad ordinate `{line}`")))?);
        }
        if ordinates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ChebError::Format("ordinates must be strictly increasing".into()));
        }
        let real = crate::characters::character(character)?.is_real();
        Ok(ZeroSet { character, conductor, parity, real, height, ordinates, certified, residual_bound, diagnostics })
    }
}

fn locate_on_grid(line: &CriticalLine, lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    let n = ((hi - lo) / step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect();
    let values: Vec<f64> = grid.par_iter().map(|&t| line.z(t)).collect::<Result<Vec<_>>>()?;
    let brackets: Vec<(f64, f64, f64, f64)> = (0..n)
        .filter(|&k| values[k] == 0.0 || values[k].signum() != values[k + 1].signum() && values[k + 1] != 0.0)
        .map(|k| (grid[k], grid[k + 1], values[k], values[k + 1]))
        .collect();
    brackets
        .par_iter()
        .map(|&(mut a, mut b, mut fa, _fb)| {
            if fa == 0.0 {
                return Ok(a);
            }
            while b - a > ORDINATE_TOLERANCE {
                let m = 0.5 * (a + b);
                let fm = line.z(m)?;
                if fm == 0.0 {
                    return Ok(m);
                }
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            Ok(0.5 * (a + b))
        })
        .collect()
}

fn scan(chi: &DirichletCharacter, height: f64, step: f64) -> Result<(Vec<f64>, f64, f64)> {
    let line = CriticalLine::new(chi)?;
    let mut ordinates = if chi.is_real() {
        locate_on_grid(&line, step / 2.0, height, step)?
    } else {
        locate_on_grid(&line, -height, height, step)?
    };
    ordinates.retain(|g| g.abs() <= height);
    ordinates.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let residuals: Vec<f64> = ordinates
        .par_iter()
        .map(|&g| Ok(l_value(chi, Complex64::new(0.5, g))?.norm()))
        .collect::<Result<Vec<_>>>()?;
    let residual = residuals.into_iter().fold(0.0, f64::max);
    // Imaginary leakage of the rotated function measures the phase model.
    let probes: Vec<Complex64> =
        (1..=8).map(|k| line.rotated(height * k as f64 / 8.0)).collect::<Result<Vec<_>>>()?;
    let leak = probes.iter().map(|z| z.im.abs() / (1.0 + z.norm())).fold(0.0, f64::max);
    Ok((ordinates, residual, leak))
}

/// Allowed deviation of the zero count from its smooth main term.
pub fn count_slack(q: u64, t: f64) -> f64 {
    3.0 + t.max(1.0).ln() + (q as f64).ln()
}

/// Locates every zero `1/2 + iγ` of `L(s, χ)` with `0 < γ ≤ T` (or
/// `|γ| ≤ T` for complex characters). The result is certified when the zero
/// count lies within [`count_slack`] of [`zero_count_estimate`] and all
/// residuals are below `1e-8`; otherwise the grid step is halved once and the
/// search retried.
pub fn find_zeros(chi: &DirichletCharacter, height: f64) -> Result<ZeroSet> {
    find_zeros_with_step(chi, height, DEFAULT_GRID_STEP)
}

pub fn find_zeros_with_step(chi: &DirichletCharacter, height: f64, step: f64) -> Result<ZeroSet> {
    if !chi.is_primitive() {
        return Err(ChebError::NotPrimitive(chi.descriptor().to_string()));
    }
    if !(height > 0.0 && height <= MAX_ZERO_HEIGHT) {
        return Err(ChebError::invalid(format!("zero height must lie in (0, {MAX_ZERO_HEIGHT}], got {height}")));
    }
    let q = chi.modulus();
    let real = chi.is_real();
    let mut diagnostics = Vec::new();
    let mut step = step;
    let mut attempt = 0;
    loop {
        let (ordinates, residual, leak) = scan(chi, height, step)?;
        let found = if real { 2 * ordinates.len() } else { ordinates.len() } as f64;
        let expected = zero_count_estimate(q, height);
        let count_ok = (found - expected).abs() <= count_slack(q, height);
        let residual_ok = residual <= RESIDUAL_LIMIT;
        let phase_ok = leak <= 1e-6;
        if !count_ok {
            diagnostics.push(format!(
                "step {step}: {found} zeros with |gamma| <= {height}, main term {expected:.3}, slack {:.3}",
                count_slack(q, height)
            ));
        }
        if !residual_ok {
            diagnostics.push(format!("step {step}: residual {residual:e} exceeds {RESIDUAL_LIMIT:e}"));
        }
        if !phase_ok {
            diagnostics.push(format!("step {step}: rotated function leaks imaginary part {leak:e}"));
        }
        let certified = count_ok && residual_ok && phase_ok;
        if certified || attempt == 1 {
            return Ok(ZeroSet {
                character: chi.descriptor(),
                conductor: chi.conductor(),
                parity: chi.parity(),
                real,
                height,
                ordinates,
                certified,
                residual_bound: residual,
                diagnostics,
            });
        }
        attempt += 1;
        step /= 2.0;
    }
}

/// In-memory store of zero sets keyed by primitive character, optionally
/// backed by a cache directory of `CHEBZEROS1` files.
#[derive(Debug, Default)]
pub struct ZeroDb {
    sets: HashMap<CharacterDescriptor, ZeroSet>,
    cache_dir: Option<PathBuf>,
}

impl ZeroDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cache_dir(dir: impl Into<PathBuf>) -> Self {
        ZeroDb { sets: HashMap::new(), cache_dir: Some(dir.into()) }
    }

    pub fn insert(&mut self, set: ZeroSet) {
        self.sets.insert(set.character, set);
    }

    pub fn get(&self, desc: &CharacterDescriptor) -> Option<&ZeroSet> {
        self.sets.get(desc)
    }

    /// File name derived from a hash of the generating parameters.
    pub fn cache_key(desc: CharacterDescriptor, height: f64) -> String {
        let mut h = Sha256::new();
        h.update(format!("CHEBZEROS1|q={}|index={}|T={}|step={}", desc.modulus, desc.index, height, DEFAULT_GRID_STEP));
        let digest = h.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        format!("zeros-q{}-i{}-{hex}.txt", desc.modulus, desc.index)
    }

    /// Returns zeros of the primitive character `desc` to at least `height`,
    /// computing (and caching) them when needed.
    pub fn ensure(&mut self, desc: CharacterDescriptor, height: f64) -> Result<&ZeroSet> {
        if self.sets.get(&desc).is_some_and(|z| z.height >= height) {
            return Ok(&self.sets[&desc]);
        }
        let chi = character(desc)?;
        if !chi.is_primitive() {
            return Err(ChebError::NotPrimitive(desc.to_string()));
        }
        let conj = chi.conj_descriptor();
        if conj != desc {
            if let Some(z) = self.sets.get(&conj).filter(|z| z.height >= height) {
                let mirrored = z.conjugate(desc);
                self.sets.insert(desc, mirrored);
                return Ok(&self.sets[&desc]);
            }
        }
        let cached = self.cache_dir.as_ref().map(|d| d.join(Self::cache_key(desc, height)));
        if let Some(path) = cached.as_ref().filter(|p| p.exists()) {
            let set = ZeroSet::read(path)?;
            self.sets.insert(desc, set);
            return Ok(&self.sets[&desc]);
        }
        // round-trip through the file format so cached and fresh sets agree bit for bit
        let set: ZeroSet = find_zeros(&chi, height)?.to_text().parse()?;
        if let Some(path) = cached {
            set.write(&path)?;
        }
        self.sets.insert(desc, set);
        Ok(&self.sets[&desc])
    }
}
