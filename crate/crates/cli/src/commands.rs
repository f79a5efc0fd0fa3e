use std::fmt::Write as _;

use anyhow::{bail, Result};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use portrait_growth::asymptotics::{
    certify_double_exponential, gamma_certificate, grigorchuk_bounds, ratio_envelope, BoundsKind, GammaCertificate,
};
use portrait_growth::branch::{
    apollonian_kernel, check_first_level_bound, check_rows, grigorchuk_kernel, iterate_growth, RowCheck,
    APOLLONIAN_LEVEL, GRIGORCHUK_LEVEL,
};
use portrait_growth::catalog::{
    first_level_index, validate_contraction, APOLLONIAN_T, APOLLONIAN_TABLE, GRIGORCHUK_DECOMPOSITIONS,
    GRIGORCHUK_T,
};
use portrait_growth::census::{census as run_census, CensusConfig, Strategy};
use portrait_growth::families::{ggs_parameters, ggs_step_binomial, ggs_xy, z_counts};
use portrait_growth::portrait::build_portrait;
use portrait_growth::quotient::{CosetTable, QuotientTable};
use portrait_growth::series::GrowthSeries;
use portrait_growth::{GroupSpec, Word};

use crate::group::Group;
use crate::{BranchDataArgs, CensusArgs, Engine, Format, GammaArgs, GrowthArgs, PortraitArgs, SearchStrategy, SpecArgs, VerifyArgs};

/// Digits above which text output shows only the digit count.
const TEXT_DIGIT_LIMIT: usize = 60;

/// Enclosures wider than this get a low-precision note.
const WIDE_ENCLOSURE: f64 = 0.01;

pub fn growth(args: &GrowthArgs) -> Result<bool> {
    let group = Group::resolve(&args.group)?;
    let d = group.degree();
    let branch = args.branch_data.as_deref();
    let prefix = group.series(args.n.min(3), args.engine, branch, args.level)?;
    let projected = prefix.projected_bytes(d, args.n) / (1024.0 * 1024.0);
    eprintln!("projected memory for n = {}: {projected:.3} MiB", args.n);
    if projected > args.memory_limit_mib as f64 {
        bail!("projected {projected:.0} MiB exceeds --memory-limit-mib {}", args.memory_limit_mib);
    }
    let series = group.series(args.n, args.engine, branch, args.level)?;
    match args.format {
        Format::Csv => print!("{}", series.to_csv()),
        Format::Json => println!("{}", series.to_json()),
        Format::Text => print!("{}", series_text(&series)),
        Format::Dot => bail!("growth has no dot output"),
    }
    Ok(true)
}

fn series_text(s: &GrowthSeries) -> String {
    let mut out = format!("{} ({})\n", s.group, s.provenance);
    for (n, a) in s.totals.iter().enumerate() {
        let text = a.to_string();
        if text.len() > TEXT_DIGIT_LIMIT {
            let _ = writeln!(out, "a_{n} = {}... ({} digits)", &text[..20], text.len());
        } else {
            let _ = writeln!(out, "a_{n} = {text}");
        }
    }
    out
}

fn certificate(group: &Group, series: &GrowthSeries, empirical: bool, precision: Option<u32>) -> Result<GammaCertificate> {
    let d = group.degree();
    if matches!(group, Group::Grigorchuk) && !empirical {
        let (a, b) = grigorchuk_bounds();
        return Ok(gamma_certificate(series, d, &a, &b, BoundsKind::Proven, precision)?);
    }
    if series.len() >= 3 {
        return Ok(certify_double_exponential(series, d, precision)?);
    }
    let env = ratio_envelope(series, d)?;
    Ok(gamma_certificate(series, d, &env.a_emp, &env.b_emp, BoundsKind::Empirical, precision)?)
}

pub fn gamma(args: &GammaArgs) -> Result<bool> {
    let group = Group::resolve(&args.group)?;
    let series = group.series(args.n, args.engine, args.branch_data.as_deref(), args.level)?;
    let cert = certificate(&group, &series, args.empirical, args.precision)?;
    match args.format {
        Format::Json => println!("{}", cert.to_json()),
        Format::Csv => print!("{}", cert.to_csv()),
        Format::Text => print!("{}", certificate_text(&cert)),
        Format::Dot => bail!("gamma has no dot output"),
    }
    let width = cert.enclosure_width().to_f64().unwrap_or(f64::INFINITY);
    if width > WIDE_ENCLOSURE {
        eprintln!("note: low-precision enclosure of width {width:.3e}; raise --n to tighten it");
    }
    if cert.is_empirical() {
        eprintln!("note: ratio bounds are empirical and hold on the computed prefix only");
    }
    Ok(cert.all_verified())
}

fn certificate_text(c: &GammaCertificate) -> String {
    let kind = if c.is_empirical() { "empirical" } else { "proven" };
    let mut out = String::new();
    let _ = writeln!(out, "group      {}", c.group);
    let _ = writeln!(out, "d          {}", c.d);
    let _ = writeln!(out, "bounds     A = {}, B = {} ({kind})", c.a, c.b);
    let _ = writeln!(out, "precision  {} bits", c.precision_bits);
    let _ = writeln!(out, "M          {}", c.m);
    let _ = writeln!(out, "alpha      {}", c.alpha);
    let _ = writeln!(out, "beta       {}", c.beta);
    let _ = writeln!(out, "gamma      {}", c.enclosure);
    let _ = writeln!(out, "nested     {}", c.nested);
    let _ = writeln!(out, "{:>3}  {:<24}  {:<24}  envelope", "n", "gamma_n", "M/d^n");
    for t in &c.terms {
        let (g, _) = t.gamma.to_decimal(20);
        let (e, _) = t.error.to_decimal(20);
        let _ = writeln!(out, "{:>3}  {g:<24}  {e:<24}  {}", t.n, if t.envelope_verified { "verified" } else { "FAILED" });
    }
    out
}

struct Report {
    checks: Vec<Value>,
    pass: bool,
}

impl Report {
    fn new() -> Self {
        Report { checks: Vec::new(), pass: true }
    }

    fn add(&mut self, name: &str, outcome: Result<String>) {
        let (ok, detail) = match outcome {
            Ok(detail) => (true, detail),
            Err(e) => (false, format!("{e:#}")),
        };
        self.pass &= ok;
        self.checks.push(json!({ "check": name, "pass": ok, "detail": detail }));
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if !cond {
        bail!(msg());
    }
    Ok(())
}

fn parse_all(spec: &GroupSpec, words: &[&str]) -> Result<Vec<Word>> {
    Ok(words.iter().map(|w| spec.parse_word(w)).collect::<Result<_, _>>()?)
}

fn table_check(spec: &GroupSpec, rows: &[RowCheck], literal: bool) -> Result<String> {
    let mod_k = rows.iter().filter(|r| r.holds_mod_k()).count();
    let equal = rows.iter().filter(|r| r.sections_equal).count();
    let bad: Vec<&str> = rows.iter().filter(|r| !r.holds_mod_k() || (literal && !r.sections_equal)).map(|r| r.word.as_str()).collect();
    ensure(bad.is_empty(), || format!("rows failing in {}: {bad:?}", spec.name()))?;
    Ok(format!("{mod_k}/{} rows confirmed modulo the kernel, {equal} with literally equal sections", rows.len()))
}

fn census_check(spec: &GroupSpec, series: &GrowthSeries, depth: usize, strategy: Strategy, slack: usize) -> Result<String> {
    let mut cfg = CensusConfig::new(depth).strategy(strategy);
    if slack > 0 {
        cfg = cfg.prune_slack(slack);
    }
    let c = run_census(spec, &cfg, None)?;
    ensure(series.totals.len() > depth, || "series shorter than the census depth".into())?;
    ensure(c.totals[..] == series.totals[..=depth], || {
        format!("census {:?} against series {:?}", strings(&c.totals), strings(&series.totals[..=depth]))
    })?;
    Ok(format!("census to depth {depth} matches: {}", strings(&c.totals).join(", ")))
}

fn strings(v: &[BigUint]) -> Vec<String> {
    v.iter().map(BigUint::to_string).collect()
}

fn nucleus_check(spec: &GroupSpec) -> Result<String> {
    let r = validate_contraction(spec, 3)?;
    ensure(r.is_valid(), || format!("nucleus check failed: {} closure failures", r.closure_failures.len()))?;
    Ok(format!("nucleus of {} elements is closed and contracting", spec.nucleus().len()))
}

fn bound_check(group: &Group, series: &GrowthSeries) -> Result<String> {
    let spec = group.spec();
    let index = first_level_index(&spec) as u64;
    check_first_level_bound(series, group.degree(), index)?;
    Ok(format!("a_(n+1) <= {index} a_n^{} for n < {}", group.degree(), series.depth()))
}

fn certificate_check(group: &Group, series: &GrowthSeries) -> Result<String> {
    let c = certificate(group, series, false, None)?;
    ensure(c.all_verified(), || "an envelope inequality failed".into())?;
    ensure(c.nested, || "gamma brackets are not nested".into())?;
    Ok(format!("gamma in {}", c.enclosure))
}

fn coset_table<'a>(spec: &'a GroupSpec, kernel: &'a QuotientTable, t: &[&str]) -> Result<CosetTable<'a>> {
    Ok(CosetTable::new(spec, kernel, &parse_all(spec, t)?)?)
}

pub fn verify(args: &VerifyArgs) -> Result<bool> {
    let group = Group::resolve(&args.group)?;
    let spec = group.spec();
    let mut report = Report::new();
    let table_only = args.table;

    match &group {
        Group::Grigorchuk => {
            let kernel = grigorchuk_kernel(args.level.unwrap_or(GRIGORCHUK_LEVEL))?;
            let table = coset_table(&spec, &kernel, &GRIGORCHUK_T)?;
            report.add("decomposition table", check_rows(&spec, &GRIGORCHUK_DECOMPOSITIONS, &table).map_err(Into::into).and_then(|r| table_check(&spec, &r, false)));
            if !table_only {
                report.add("nucleus", nucleus_check(&spec));
                report.add("kernel index", Ok(format!("index {}", kernel.ambient_index())).and_then(|d| {
                    ensure(kernel.ambient_index() == 16, || d.clone())?;
                    Ok(d)
                }));
                let series = group.series(8, Engine::Auto, None, None)?;
                report.add("engines agree", (|| {
                    let generic = group.series(8, Engine::Generic, args.branch_data.as_deref(), args.level)?;
                    ensure(generic.per_coset == series.per_coset, || "generic and specialized series differ".into())?;
                    Ok("generic and specialized per-coset series agree for n <= 8".to_string())
                })());
                report.add("census", census_check(&spec, &series, args.oracle_depth.unwrap_or(2), Strategy::WordBfs, 0));
                report.add("first-level bound", bound_check(&group, &series));
                report.add("gamma certificate", certificate_check(&group, &group.series(10, Engine::Auto, None, None)?));
            }
        }
        Group::Apollonian => {
            let kernel = apollonian_kernel(args.level.unwrap_or(APOLLONIAN_LEVEL))?;
            let table = coset_table(&spec, &kernel, &APOLLONIAN_T)?;
            report.add("decomposition table", check_rows(&spec, &APOLLONIAN_TABLE, &table).map_err(Into::into).and_then(|r| table_check(&spec, &r, true)));
            if !table_only {
                report.add("nucleus", nucleus_check(&spec));
                let series = group.series(5, Engine::Auto, None, None)?;
                report.add("engines agree", (|| {
                    let generic = group.series(5, Engine::Generic, args.branch_data.as_deref(), args.level)?;
                    ensure(generic.totals == series.totals, || "generic and closed-form series differ".into())?;
                    Ok("generic engine matches the closed form for n <= 5".to_string())
                })());
                let slack = args.slack.unwrap_or(0);
                report.add("census", census_check(&spec, &series, args.oracle_depth.unwrap_or(1), Strategy::ProductClosure, slack));
                report.add("first-level bound", bound_check(&group, &series));
                report.add("gamma certificate", certificate_check(&group, &series));
            }
        }
        Group::Ggs(e) => {
            if table_only {
                bail!("GGS groups have no built-in decomposition table");
            }
            report.add("nucleus", nucleus_check(&spec));
            let p = e.p();
            report.add("parameters", (|| {
                let params = ggs_parameters(e)?;
                let xy = ggs_xy(&params, 4)?;
                for w in xy.windows(2) {
                    ensure(ggs_step_binomial(p, &w[0].0, &w[0].1) == w[1], || "binomial step differs".into())?;
                }
                Ok(format!("x_1 = {}, y_1 = {}; x/y recursion exact for n <= 4", params.x1, params.y1))
            })());
            report.add("z counts", (|| {
                for l in 0..=(p as usize).min(6) {
                    z_counts(p, l)?;
                }
                Ok(format!("closed form matches enumeration for l <= {}", (p as usize).min(6)))
            })());
            let series = group.series(4, Engine::Auto, None, None)?;
            let slack = args.slack.unwrap_or(if p == 3 { 1 } else { 0 });
            report.add("census", census_check(&spec, &series, args.oracle_depth.unwrap_or(1), Strategy::ProductClosure, slack));
            report.add("first-level bound", bound_check(&group, &series));
            report.add("gamma certificate", certificate_check(&group, &series));
        }
        Group::Custom(_) => {
            if table_only {
                bail!("user-defined groups have no built-in decomposition table");
            }
            report.add("nucleus", nucleus_check(&spec));
            if let Some(path) = &args.branch_data {
                let depth = args.oracle_depth.unwrap_or(1);
                match group.branch_data(Some(path), None).and_then(|bd| {
                    bd.validate()?;
                    Ok(iterate_growth(&bd, depth.max(2))?)
                }) {
                    Ok(series) => {
                        report.add("branch data", Ok(format!("{} cosets", series.labels.len())));
                        report.add("census", census_check(&spec, &series, depth, Strategy::ProductClosure, args.slack.unwrap_or(0)));
                        report.add("first-level bound", bound_check(&group, &series));
                    }
                    Err(e) => report.add("branch data", Err(e)),
                }
            }
        }
    }

    let out = json!({ "group": group.name(), "pass": report.pass, "checks": report.checks });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(report.pass)
}

pub fn portrait(args: &PortraitArgs) -> Result<bool> {
    let group = Group::resolve(&args.group)?;
    let spec = group.spec();
    let w = spec.parse_word(&args.word)?;
    let p = build_portrait(&spec, &w, args.max_depth)?;
    match args.format {
        Format::Text => print!("depth {}\n{}", p.depth(), p.to_ascii(&spec)),
        Format::Dot => print!("// depth {}\n{}", p.depth(), p.to_dot(&spec)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "word": args.word,
                "depth": p.depth(),
                "portrait": p.to_ascii(&spec),
            }))?
        ),
        Format::Csv => bail!("portrait has no csv output"),
    }
    Ok(true)
}

pub fn census(args: &CensusArgs) -> Result<bool> {
    let group = Group::resolve(&args.group)?;
    let spec = group.spec();
    let strategy = match args.strategy {
        SearchStrategy::Bfs => Strategy::WordBfs,
        SearchStrategy::Closure => Strategy::ProductClosure,
    };
    let mut cfg = CensusConfig::new(args.n)
        .strategy(strategy)
        .patience(args.patience)
        .radius_cap(args.radius_cap)
        .max_elements(args.max_elements);
    if let Some(s) = args.slack {
        cfg = cfg.prune_slack(s);
    }
    let result = if args.cosets {
        let (kernel, t): (QuotientTable, &[&str]) = match group {
            Group::Grigorchuk => (grigorchuk_kernel(args.level.unwrap_or(GRIGORCHUK_LEVEL))?, &GRIGORCHUK_T),
            Group::Apollonian => (apollonian_kernel(args.level.unwrap_or(APOLLONIAN_LEVEL))?, &APOLLONIAN_T),
            _ => bail!("--cosets needs a catalog group with a coset table (grigorchuk or apollonian)"),
        };
        let table = coset_table(&spec, &kernel, t)?;
        run_census(&spec, &cfg, Some(&table))?
    } else {
        run_census(&spec, &cfg, None)?
    };
    eprintln!(
        "visited {} elements, radius {}, {}",
        result.elements_visited,
        result.final_radius,
        if result.saturated { "saturated" } else { "NOT saturated" }
    );
    match args.format {
        Format::Csv => print!("{}", result.to_csv()),
        Format::Json => println!("{}", result.to_json()),
        Format::Text => println!("{}", strings(&result.totals).join(", ")),
        Format::Dot => bail!("census has no dot output"),
    }
    Ok(true)
}

pub fn spec(args: &SpecArgs) -> Result<bool> {
    let group = Group::resolve(&args.group)?;
    println!("{}", group.spec().to_json());
    Ok(true)
}

pub fn branch_data(args: &BranchDataArgs) -> Result<bool> {
    let group = Group::resolve(&args.group)?;
    println!("{}", group.branch_data(None, args.level)?.to_json());
    Ok(true)
}
