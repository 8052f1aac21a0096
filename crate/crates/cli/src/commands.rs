// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::Write;
use std::path::Path;

use cheb_core::characters::character;
use cheb_core::explicit::{build_model, dirichlet_integral_check, empirical_mean_squares, MeanSquare, Y_STEP};
use cheb_core::frobenius::{catalog, census, lookup};
use cheb_core::primesets::podd_identity_check;
use cheb_core::{
    CharacterDescriptor, ChebError, Complex64, Discrepancy, DiscrepancyModel, ModelOptions, PrimeSetSpec, PrimeTable,
    Reference, ZeroDb,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::prime_table;
use crate::config::{CommandKind, RunConfig, Statistic};
use crate::error::CliError;

/// The caveat printed when every coefficient vanishes.
pub const DEGENERATE_WARNING: &str =
    "degenerate model: every alpha and nu vanish, so no Omega bound follows (the proof fails in this case)";

const DEFAULT_CONTROL: &str = "residue q=4 classes=3";

pub fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match cfg.command {
        CommandKind::Zeros => cmd_zeros(cfg, out),
        CommandKind::Catalog => cmd_catalog(out),
        CommandKind::Census => cmd_census(cfg, out),
        CommandKind::MeanSquare => cmd_mean_square(cfg, out),
        CommandKind::Witness => cmd_witness(cfg, out),
        CommandKind::DirichletCheck => cmd_dirichlet_check(cfg, out),
    }
}

fn require<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| CliError::Config(format!("`{key}` is required")))
}

fn parse_set(text: &str) -> Result<PrimeSetSpec, CliError> {
    text.parse().map_err(|e: ChebError| CliError::Config(format!("set `{text}`: {e}")))
}

fn parse_reference(text: &str) -> Result<Reference, CliError> {
    text.parse().map_err(|e: ChebError| CliError::Config(format!("reference `{text}`: {e}")))
}

fn zero_db(cfg: &RunConfig) -> ZeroDb {
    match cfg.effective_cache_dir() {
        Some(dir) => ZeroDb::with_cache_dir(dir.join("zeros")),
        None => ZeroDb::new(),
    }
}

fn table(cfg: &RunConfig, x_max: f64) -> Result<PrimeTable, CliError> {
    prime_table(x_max, cfg.effective_cache_dir().as_deref())
}

fn complex_json(z: Complex64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!({ "re": z.re, "im": z.im })
    }
}

fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut f = File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}

fn cmd_zeros(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let desc = CharacterDescriptor { modulus: *require(&cfg.q, "q")?, index: *require(&cfg.index, "index")? };
    let chi = character(desc)?;
    if !chi.is_primitive() {
        return Err(CliError::Config(format!(
            "character {desc} is not primitive (conductor {}); ask for {} instead",
            chi.conductor(),
            chi.inducer()
        )));
    }
    let height = cfg.height_or_default();
    let mut db = zero_db(cfg);
    let zeros = db.ensure(desc, height)?;
    match &cfg.out {
        Some(path) => {
            zeros.write(path)?;
            writeln!(out, "{}: {} zeros below {height}, written to {}", desc, zeros.ordinates.len(), path.display())?;
        }
        None => write!(out, "{}", zeros.to_text())?,
    }
    if !zeros.certified {
        return Err(CliError::Uncertified(format!("{desc}: {}", zeros.diagnostics.join("; "))));
    }
    Ok(())
}

fn cmd_catalog(out: &mut dyn Write) -> Result<(), CliError> {
    for ext in catalog() {
        let classes: Vec<String> =
            ext.group.classes().iter().map(|c| format!("{}({})", c.id, c.size())).collect();
        let ramified: Vec<String> = ext.ramified.iter().map(u64::to_string).collect();
        writeln!(
            out,
            "{:<10} |G|={:<3} ramified={:<8} classes={}  {}",
            ext.id,
            ext.group.order(),
            ramified.join(","),
            classes.join(","),
            ext.description
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CensusCsvRow<'a> {
    class: &'a str,
    count: u64,
    frequency: f64,
    expected: f64,
    deviation: f64,
}

fn cmd_census(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let ext = lookup(require(&cfg.ext, "ext")?)?;
    let x = cfg.x.or(cfg.x_max).unwrap_or(1e6);
    let t = table(cfg, x.max(2.0))?;
    let rows = census(&t, &ext, x)?;
    let total: u64 = rows.iter().map(|r| r.count).sum();
    writeln!(out, "{} up to x = {x}: {total} unramified primes", ext.id)?;
    if total < 100 {
        writeln!(out, "small sample: frequencies are not meaningful yet")?;
    }
    writeln!(out, "{:<14} {:>10} {:>10} {:>10} {:>10}", "class", "count", "frequency", "expected", "deviation")?;
    for r in &rows {
        writeln!(
            out,
            "{:<14} {:>10} {:>10.6} {:>10.6} {:>+10.6}",
            r.class_id,
            r.count,
            r.frequency,
            r.expected,
            r.frequency - r.expected
        )?;
    }
    if let Some(path) = &cfg.csv {
        let mut w = csv::Writer::from_path(path)?;
        for r in &rows {
            w.serialize(CensusCsvRow {
                class: &r.class_id,
                count: r.count,
                frequency: r.frequency,
                expected: r.expected,
                deviation: r.frequency - r.expected,
            })?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MeanSquareCsvRow {
    y: f64,
    empirical: f64,
    predicted: f64,
    residual: f64,
}

fn write_rows(path: &Path, rows: &[(f64, f64, f64, f64)]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for &(y, empirical, predicted, residual) in rows {
        w.serialize(MeanSquareCsvRow { y, empirical, predicted, residual })?;
    }
    w.flush()?;
    Ok(())
}

fn statistic_of(model: &DiscrepancyModel, which: Statistic, y_end: f64, step: f64) -> Result<MeanSquare, CliError> {
    Ok(match which {
        Statistic::Unsmoothed => model.mean_square_unsmoothed_with_step(y_end, step)?,
        Statistic::Smoothed => model.mean_square_smoothed_with_step(y_end, step)?,
    })
}

fn model_json(model: &DiscrepancyModel, x_max: f64, which: Statistic, ms: &MeanSquare) -> Value {
    let ratio = if ms.prediction > 0.0 { json!(ms.empirical / ms.prediction) } else { Value::Null };
    json!({
        "set": model.set.to_string(),
        "reference": model.reference.to_string(),
        "x_max": x_max,
        "T": model.height,
        "statistic": which.name(),
        "nu": complex_json(model.nu),
        "kappa": complex_json(model.kappa),
        "density": complex_json(model.density),
        "c_chi": model.c_chi.iter().map(|(d, c)| json!({ "character": d.to_string(), "value": complex_json(*c) })).collect::<Vec<_>>(),
        "zeros": model.terms.len(),
        "prediction": ms.prediction,
        "empirical": ms.empirical,
        "ratio": ratio,
        "residual": ms.residual,
        "certified": model.certified,
        "degenerate": model.is_degenerate(),
        "warnings": ms.warnings.iter().chain(&model.diagnostics).collect::<Vec<_>>(),
    })
}

fn cmd_mean_square(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let set = parse_set(require(&cfg.set, "set")?)?;
    let reference = parse_reference(cfg.reference.as_deref().unwrap_or("pi"))?;
    let x_max = cfg.x_max.unwrap_or(1e6);
    let height = cfg.height_or_default();
    let which = cfg.statistic.unwrap_or_default();
    let t = table(cfg, x_max)?;
    let mut db = zero_db(cfg);
    let options = ModelOptions { allow_uncertified: cfg.allow_uncertified };
    let model = build_model(&t, &set, &reference, &mut db, height, options)?;
    let ms = statistic_of(&model, which, x_max.ln(), cfg.step.unwrap_or(Y_STEP))?;

    writeln!(out, "set        {}", model.set)?;
    writeln!(out, "reference  {}", model.reference)?;
    writeln!(out, "x_max      {x_max}    T = {height}    zeros used: {}", model.terms.len())?;
    writeln!(out, "kappa      {}", model.kappa)?;
    writeln!(out, "nu         {}", model.nu)?;
    for (d, c) in model.c_chi.iter().filter(|(_, c)| c.norm() > 0.0) {
        writeln!(out, "c_chi {d:<6} {c}")?;
    }
    writeln!(out, "{} mean square: empirical {:.6}, predicted {:.6}", which.name(), ms.empirical, ms.prediction)?;
    if which == Statistic::Unsmoothed {
        writeln!(out, "residual mean square r(y, T): {:.6}", ms.residual)?;
    }
    if model.is_degenerate() {
        writeln!(out, "warning: {DEGENERATE_WARNING}")?;
    }
    for w in ms.warnings.iter().chain(&model.diagnostics) {
        writeln!(out, "note: {w}")?;
    }
    if let Some(path) = &cfg.csv {
        write_rows(path, &ms.rows)?;
    }
    if let Some(path) = &cfg.json {
        let mut v = model_json(&model, x_max, which, &ms);
        if model.is_degenerate() {
            v["warnings"].as_array_mut().expect("array").push(json!(DEGENERATE_WARNING));
        }
        write_json(path, &v)?;
    }
    if !model.certified {
        return Err(CliError::Uncertified("model built from uncertified zeros".into()));
    }
    Ok(())
}

fn cmd_witness(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let x_max = cfg.x_max.unwrap_or(1e6);
    if x_max < 1e4 {
        return Err(CliError::Config(format!("witness needs x_max >= 10^4, got {x_max}")));
    }
    let control = parse_set(cfg.control.as_deref().unwrap_or(DEFAULT_CONTROL))?;
    let t = table(cfg, x_max)?;

    // the identity only changes at primes
    let mut checked = 0usize;
    for &p in t.primes() {
        podd_identity_check(&t, p as f64)?;
        checked += 1;
    }
    podd_identity_check(&t, x_max)?;
    writeln!(out, "P_odd(x) - pi(x)/2 in {{0, 1/2}} at all {checked} primes up to {x_max}")?;

    let y_end = x_max.ln();
    let step = cfg.step.unwrap_or(Y_STEP);
    let podd = Discrepancy::new(&t, &PrimeSetSpec::OddIndexed, &parse_reference("pi-half")?)?;
    let (podd_smooth, podd_plain) = empirical_mean_squares(&podd, y_end, step)?;

    let reference = parse_reference(cfg.reference.as_deref().unwrap_or("pi"))?;
    let mut db = zero_db(cfg);
    let options = ModelOptions { allow_uncertified: cfg.allow_uncertified };
    let model = build_model(&t, &control, &reference, &mut db, cfg.height_or_default(), options)?;
    let plain = model.mean_square_unsmoothed_with_step(y_end, step)?;
    let smooth = model.mean_square_smoothed_with_step(y_end, step)?;

    writeln!(out, "{:<34} {:>12} {:>12} {:>12}", "set", "unsmoothed", "smoothed", "predicted")?;
    writeln!(out, "{:<34} {:>12.6} {:>12.6} {:>12}", "podd vs pi/2", podd_plain, podd_smooth, "0")?;
    writeln!(
        out,
        "{:<34} {:>12.6} {:>12.6} {:>12.6}",
        format!("{} vs {}", model.set, model.reference),
        plain.empirical,
        smooth.empirical,
        plain.prediction
    )?;
    let separated = plain.empirical > 0.05 && podd_plain < 0.01;
    writeln!(
        out,
        "{}",
        if separated {
            "control stays away from 0 while P_odd collapses: P_odd is not a Chebotarev set"
        } else {
            "separation not visible at this x_max"
        }
    )?;
    if let Some(path) = &cfg.json {
        write_json(
            path,
            &json!({
                "x_max": x_max,
                "identity_primes_checked": checked,
                "podd": { "unsmoothed": podd_plain, "smoothed": podd_smooth },
                "control": model_json(&model, x_max, Statistic::Unsmoothed, &plain),
                "control_smoothed": smooth.empirical,
                "separated": separated,
            }),
        )?;
    }
    if !model.certified {
        return Err(CliError::Uncertified("control model built from uncertified zeros".into()));
    }
    Ok(())
}

fn cmd_dirichlet_check(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let set = parse_set(require(&cfg.set, "set")?)?;
    let s_text = cfg.s.as_deref().unwrap_or("2");
    let s: Complex64 = s_text.parse().map_err(|_| CliError::Config(format!("`s` is not a complex number: `{s_text}`")))?;
    let x_cut = cfg.x_cut.or(cfg.x_max).unwrap_or(1e6);
    let t = table(cfg, x_cut)?;
    let c = dirichlet_integral_check(&t, &set, s, x_cut)?;
    writeln!(out, "s = {s}, x_cut = {x_cut}")?;
    writeln!(out, "lhs        {}", c.lhs)?;
    writeln!(out, "rhs        {}", c.rhs)?;
    writeln!(out, "gap        {:.3e}    tail bound {:.3e}", c.gap, c.tail_bound)?;
    if let Some(path) = &cfg.json {
        write_json(
            path,
            &json!({ "s": complex_json(s), "x_cut": x_cut, "lhs": complex_json(c.lhs), "rhs": complex_json(c.rhs),
                     "gap": c.gap, "tail_bound": c.tail_bound }),
        )?;
    }
    // rounding in the two sums is far below the tail bound at any supported s
    if c.gap > c.tail_bound + 1e-9 {
        return Err(CliError::Identity(format!("gap {:e} exceeds the tail bound {:e}", c.gap, c.tail_bound)));
    }
    Ok(())
}
