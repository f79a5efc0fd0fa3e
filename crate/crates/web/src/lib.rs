//! Browser bindings: growth tables, portraits and gamma certificates.

use wasm_bindgen::prelude::*;

use portrait_growth::asymptotics::{certify_double_exponential, gamma_certificate, grigorchuk_bounds, BoundsKind};
use portrait_growth::catalog::{apollonian, ggs, grigorchuk, GgsVector};
use portrait_growth::families::{apollonian_growth, ggs_growth, grigorchuk_growth};
use portrait_growth::portrait::build_portrait;
use portrait_growth::series::GrowthSeries;
use portrait_growth::GroupSpec;

/// Largest depth offered for each family; beyond it the integers get too long for a page.
const MAX_DEPTH: [(&str, usize); 3] = [("grigorchuk", 14), ("ggs", 5), ("apollonian", 7)];

/// Largest portrait depth rendered.
const MAX_PORTRAIT_DEPTH: usize = 24;

/// Digits shown before a value is abbreviated.
const SHOWN_DIGITS: usize = 40;

fn parse_vector(p: u32, e: &str) -> Result<GgsVector, String> {
    let entries = e
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| format!("`{t}` is not an integer")))
        .collect::<Result<Vec<_>, _>>()?;
    let v = GgsVector::new(u64::from(p), entries).map_err(|x| x.to_string())?;
    if v.is_symmetric() {
        return Err(format!("vector {:?} is symmetric; choose a non-symmetric one", v.e()));
    }
    Ok(v)
}

fn spec_for(group: &str, p: u32, e: &str) -> Result<GroupSpec, String> {
    match group {
        "grigorchuk" => Ok(grigorchuk()),
        "apollonian" => Ok(apollonian()),
        "ggs" => Ok(ggs(&parse_vector(p, e)?)),
        other => Err(format!("unknown group `{other}`")),
    }
}

fn series_for(group: &str, p: u32, e: &str, n: usize) -> Result<GrowthSeries, String> {
    let limit = MAX_DEPTH.iter().find(|(g, _)| *g == group).map(|(_, m)| *m).ok_or(format!("unknown group `{group}`"))?;
    if n > limit {
        return Err(format!("depth {n} is beyond the {limit} offered here"));
    }
    match group {
        "grigorchuk" => Ok(grigorchuk_growth(n)),
        "apollonian" => apollonian_growth(n).map_err(|x| x.to_string()),
        _ => ggs_growth(&parse_vector(p, e)?, n).map_err(|x| x.to_string()),
    }
}

fn abbreviate(text: &str) -> String {
    if text.len() <= SHOWN_DIGITS {
        text.to_string()
    } else {
        format!("{}... ({} digits)", &text[..SHOWN_DIGITS], text.len())
    }
}

/// Text table of `a_0..a_n`.
pub fn growth_text(group: &str, p: u32, e: &str, n: usize) -> Result<String, String> {
    let s = series_for(group, p, e, n)?;
    let mut out = format!("{} ({})\n", s.group, s.provenance);
    for (k, a) in s.totals.iter().enumerate() {
        out.push_str(&format!("a_{k} = {}\n", abbreviate(&a.to_string())));
    }
    Ok(out)
}

/// Indented portrait of a word, preceded by its depth.
pub fn portrait_text(group: &str, p: u32, e: &str, word: &str) -> Result<String, String> {
    let spec = spec_for(group, p, e)?;
    let w = spec.parse_word(word).map_err(|x| x.to_string())?;
    let portrait = build_portrait(&spec, &w, MAX_PORTRAIT_DEPTH).map_err(|x| x.to_string())?;
    Ok(format!("depth {}\n{}", portrait.depth(), portrait.to_ascii(&spec)))
}

/// Certificate summary for the series to depth `n`.
pub fn gamma_text(group: &str, p: u32, e: &str, n: usize) -> Result<String, String> {
    let s = series_for(group, p, e, n)?;
    let d = spec_for(group, p, e)?.degree() as u32;
    let cert = if group == "grigorchuk" {
        let (a, b) = grigorchuk_bounds();
        gamma_certificate(&s, d, &a, &b, BoundsKind::Proven, None)
    } else {
        certify_double_exponential(&s, d, None)
    }
    .map_err(|x| x.to_string())?;
    let kind = if cert.is_empirical() { "empirical" } else { "proven" };
    let mut out = format!("A = {}, B = {} ({kind}), d = {d}\n", cert.a, cert.b);
    out.push_str(&format!("M     = {}\nalpha = {}\nbeta  = {}\n", cert.m, cert.alpha, cert.beta));
    out.push_str(&format!("gamma = {}\n", cert.enclosure));
    for t in &cert.terms {
        let (g, _) = t.gamma.to_decimal(12);
        let (r, _) = t.error.to_decimal(12);
        let mark = if t.envelope_verified { "ok" } else { "FAILED" };
        out.push_str(&format!("n = {:>2}  gamma_n = {g}  +- {r}  {mark}\n", t.n));
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn growth(group: &str, p: u32, e: &str, n: usize) -> Result<String, JsValue> {
    growth_text(group, p, e, n).map_err(|m| JsValue::from_str(&m))
}

#[wasm_bindgen]
pub fn portrait(group: &str, p: u32, e: &str, word: &str) -> Result<String, JsValue> {
    portrait_text(group, p, e, word).map_err(|m| JsValue::from_str(&m))
}

#[wasm_bindgen]
pub fn gamma(group: &str, p: u32, e: &str, n: usize) -> Result<String, JsValue> {
    gamma_text(group, p, e, n).map_err(|m| JsValue::from_str(&m))
}
