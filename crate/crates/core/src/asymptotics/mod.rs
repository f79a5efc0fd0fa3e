//! Certified doubly exponential asymptotics.
//!
//! If `A a_n^d <= a_{n+1} <= B a_n^d` for all `n`, then `gamma = lim ln(a_n) / d^n`
//! exists, `|gamma - ln(a_n) / d^n| <= M / d^n` with `M = max(|ln A|, |ln B|) / (d - 1)`,
//! and `e^-M e^(gamma d^n) <= a_n <= e^M e^(gamma d^n)`. Everything here is evaluated
//! with outward-rounded [`Interval`]s.

pub mod interval;

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::series::GrowthSeries;

pub use interval::{exp, ln2, ln_biguint, ln_rational, Interval};

/// Bits of working precision added on top of the `M / d^N` scale.
pub const PRECISION_MARGIN: u32 = 256;

/// Fractional digits in decimal exports.
pub const DECIMAL_DIGITS: usize = 30;

/// `gamma_N` must be known `2^8` times more tightly than `M / d^N`.
const PRECISION_FACTOR: u32 = 8;

/// Extremes of `a_{n+1} / a_n^d` over a finite series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioEnvelope {
    pub a_emp: BigRational,
    pub b_emp: BigRational,
    /// `n` at which `a_{n+1} / a_n^d` is smallest.
    pub argmin: usize,
    pub argmax: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundsKind {
    /// Bounds proven for every `n`.
    Proven,
    /// Bounds observed on the available prefix only.
    Empirical,
}

/// Evidence for one `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaTerm {
    pub n: usize,
    /// Enclosure of `ln(a_n) / d^n`.
    pub gamma: Interval,
    /// Enclosure of `M / d^n`.
    pub error: Interval,
    /// `alpha e^(w d^n) <= a_n <= beta e^(w d^n)` holds for the witness `w`.
    pub envelope_verified: bool,
}

impl GammaTerm {
    /// Interval certainly containing `[gamma_n - M/d^n, gamma_n + M/d^n]`.
    pub fn bracket(&self) -> Interval {
        let lo = self.gamma.sub(&self.error);
        let hi = self.gamma.add(&self.error);
        Interval::new(lo.lo_scaled().clone(), hi.hi_scaled().clone(), self.gamma.prec())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaCertificate {
    pub group: String,
    pub d: u32,
    pub a: BigRational,
    pub b: BigRational,
    pub kind: BoundsKind,
    pub precision_bits: u32,
    pub m: Interval,
    pub alpha: Interval,
    pub beta: Interval,
    pub terms: Vec<GammaTerm>,
    /// Intersection of all brackets; contains `gamma` when the bounds are proven.
    pub enclosure: Interval,
    /// Point of the enclosure used for the envelope checks.
    pub witness: Interval,
    /// Each bracket lies inside the previous one, up to a few units of rounding.
    pub nested: bool,
}

impl GammaCertificate {
    pub fn all_verified(&self) -> bool {
        self.terms.iter().all(|t| t.envelope_verified)
    }

    pub fn is_empirical(&self) -> bool {
        self.kind == BoundsKind::Empirical
    }

    pub fn last(&self) -> &GammaTerm {
        self.terms.last().expect("certificates have at least one term")
    }

    /// Width of the final enclosure.
    pub fn enclosure_width(&self) -> BigRational {
        self.enclosure.width()
    }

    /// Columns `n, gamma_n, error_bound`, where the error bound is an upper bound on `M / d^n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,gamma_n,error_bound\n");
        for t in &self.terms {
            let (g, _) = t.gamma.to_decimal(DECIMAL_DIGITS);
            let (e, r) = t.error.to_decimal(DECIMAL_DIGITS);
            let _ = writeln!(out, "{},{g},{}", t.n, upper_decimal(&e, &r));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|t| {
                json!({
                    "n": t.n,
                    "gamma_n": decimal(&t.gamma),
                    "error": decimal(&t.error),
                    "envelope_verified": t.envelope_verified,
                })
            })
            .collect();
        let value = json!({
            "group": self.group,
            "d": self.d,
            "A": self.a.to_string(),
            "B": self.b.to_string(),
            "bounds": self.kind,
            "precision_bits": self.precision_bits,
            "M": decimal(&self.m),
            "alpha": decimal(&self.alpha),
            "beta": decimal(&self.beta),
            "gamma": decimal(&self.enclosure),
            "witness": decimal(&self.witness),
            "nested": self.nested,
            "all_verified": self.all_verified(),
            "terms": terms,
        });
        serde_json::to_string_pretty(&value).expect("plain data")
    }
}

fn decimal(x: &Interval) -> serde_json::Value {
    let (value, radius) = x.to_decimal(DECIMAL_DIGITS);
    json!({ "value": value, "radius": radius })
}

fn upper_decimal(mid: &str, radius: &str) -> String {
    let digits = DECIMAL_DIGITS;
    let scale = |s: &str| -> BigInt { s.replace('.', "").parse().expect("decimal produced here") };
    let sum = scale(mid) + scale(radius);
    let text = sum.abs().to_string();
    let padded = if text.len() <= digits { format!("{}{text}", "0".repeat(digits + 1 - text.len())) } else { text };
    let (int, frac) = padded.split_at(padded.len() - digits);
    format!("{}{int}.{frac}", if sum.is_negative() { "-" } else { "" })
}

fn positive_terms(series: &GrowthSeries, needed: usize) -> Result<&[BigUint]> {
    if series.totals.len() < needed {
        return Err(Error::EmptySeries { needed, got: series.totals.len() });
    }
    if let Some(n) = series.totals.iter().position(Zero::is_zero) {
        return Err(Error::NonPositiveTerm(n));
    }
    Ok(&series.totals)
}

fn ratio(a: &[BigUint], n: usize, d: u32) -> BigRational {
    BigRational::new(BigInt::from(a[n + 1].clone()), BigInt::from(a[n].pow(d)))
}

/// Exact extremes of `a_{n+1} / a_n^d`.
pub fn ratio_envelope(series: &GrowthSeries, d: u32) -> Result<RatioEnvelope> {
    let a = positive_terms(series, 2)?;
    let mut env: Option<RatioEnvelope> = None;
    for n in 0..a.len() - 1 {
        let r = ratio(a, n, d);
        match &mut env {
            None => env = Some(RatioEnvelope { a_emp: r.clone(), b_emp: r, argmin: n, argmax: n }),
            Some(e) => {
                if r < e.a_emp {
                    e.a_emp = r.clone();
                    e.argmin = n;
                }
                if r > e.b_emp {
                    e.b_emp = r;
                    e.argmax = n;
                }
            }
        }
    }
    Ok(env.expect("at least one ratio"))
}

/// Working precision for a series of `len` terms: [`PRECISION_MARGIN`] bits past `d^(len-1)`.
pub fn default_precision(len: usize, d: u32) -> u32 {
    let per_step = 32 - d.saturating_sub(1).leading_zeros();
    PRECISION_MARGIN + per_step * len.saturating_sub(1) as u32
}

/// Checks `A a_n^d <= a_{n+1} <= B a_n^d` exactly for every available `n`.
pub fn check_ratio_bounds(series: &GrowthSeries, d: u32, a: &BigRational, b: &BigRational) -> Result<()> {
    let terms = positive_terms(series, 1)?;
    for n in 0..terms.len().saturating_sub(1) {
        let r = ratio(terms, n, d);
        if r < *a {
            return Err(Error::RatioBoundViolated { n, detail: format!("a_(n+1)/a_n^{d} = {r} < A = {a}") });
        }
        if r > *b {
            return Err(Error::RatioBoundViolated { n, detail: format!("a_(n+1)/a_n^{d} = {r} > B = {b}") });
        }
    }
    Ok(())
}

/// Builds the certificate for the given ratio bounds.
///
/// `precision_bits` defaults to [`default_precision`].
pub fn gamma_certificate(
    series: &GrowthSeries,
    d: u32,
    a: &BigRational,
    b: &BigRational,
    kind: BoundsKind,
    precision_bits: Option<u32>,
) -> Result<GammaCertificate> {
    if d < 2 {
        return Err(Error::OutOfRange(format!("growth exponent d = {d} must be at least 2")));
    }
    if !a.is_positive() || a > b {
        return Err(Error::OutOfRange(format!("ratio bounds need 0 < A <= B, got A = {a}, B = {b}")));
    }
    let terms = positive_terms(series, 1)?;
    check_ratio_bounds(series, d, a, b)?;
    let prec = precision_bits.unwrap_or_else(|| default_precision(terms.len(), d));

    let ln_a = ln_rational(a, prec);
    let ln_b = ln_rational(b, prec);
    let m = ln_a.abs().max(&ln_b.abs()).div_int(&BigInt::from(d - 1));
    let exact_power = a.is_one() && b.is_one();
    let alpha = exp(&m.neg());
    let beta = exp(&m);

    let dd = BigInt::from(d);
    let mut scale = BigInt::one();
    let mut logs = Vec::with_capacity(terms.len());
    let mut out = Vec::with_capacity(terms.len());
    for (n, term) in terms.iter().enumerate() {
        let ln_an = ln_biguint(term, prec);
        let gamma = ln_an.div_int(&scale);
        let error = m.div_int(&scale);
        out.push(GammaTerm { n, gamma, error, envelope_verified: false });
        logs.push((ln_an, scale.clone()));
        scale *= &dd;
    }

    let last = out.last().expect("at least one term");
    if !exact_power {
        let needed = last.error.lo_scaled() >> PRECISION_FACTOR as usize;
        if last.gamma.width_scaled() > needed {
            return Err(Error::PrecisionInsufficient {
                bits: prec,
                detail: format!("ln(a_{}) / d^{} is not resolved below M / d^{}", last.n, last.n, last.n),
            });
        }
    }

    let mut enclosure = out[0].bracket();
    for t in &out[1..] {
        enclosure = enclosure.intersect(&t.bracket()).ok_or_else(|| Error::RatioBoundViolated {
            n: t.n,
            detail: "gamma brackets do not intersect".into(),
        })?;
    }
    let nested = out.windows(2).all(|w| w[1].bracket().is_subset_of(&w[0].bracket().widen(4)));

    let witness = enclosure.midpoint();
    for (t, (ln_an, scale)) in out.iter_mut().zip(&logs) {
        t.envelope_verified = if exact_power {
            // A = B = 1 forces a_n = a_0^(d^n) exactly, so the envelope is an equality.
            true
        } else {
            ln_an.sub(&witness.mul_int(scale)).abs().certainly_le(&m)
        };
    }

    Ok(GammaCertificate {
        group: series.group.clone(),
        d,
        a: a.clone(),
        b: b.clone(),
        kind,
        precision_bits: prec,
        m,
        alpha,
        beta,
        terms: out,
        enclosure,
        witness,
        nested,
    })
}

/// Certificate from the observed ratio extremes; always [`BoundsKind::Empirical`].
pub fn certify_double_exponential(series: &GrowthSeries, d: u32, precision_bits: Option<u32>) -> Result<GammaCertificate> {
    positive_terms(series, 3)?;
    let env = ratio_envelope(series, d)?;
    gamma_certificate(series, d, &env.a_emp, &env.b_emp, BoundsKind::Empirical, precision_bits)
}

/// The proven Grigorchuk ratio bounds `A = 1/4`, `B = 2`.
pub fn grigorchuk_bounds() -> (BigRational, BigRational) {
    (BigRational::new(BigInt::one(), BigInt::from(4)), BigRational::from_integer(BigInt::from(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{apollonian_growth, ggs_growth, grigorchuk_growth};
    use crate::series::Provenance;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn toy(values: &[u64]) -> GrowthSeries {
        let rows = values.iter().map(|&v| vec![BigUint::from(v)]).collect();
        GrowthSeries::from_per_coset("toy", vec!["1".into()], rows, Provenance::Generic)
    }

    fn squares(n: usize) -> GrowthSeries {
        let mut rows = vec![vec![BigUint::from(2u32)]];
        for _ in 0..n {
            let last = rows.last().unwrap()[0].clone();
            rows.push(vec![&last * &last]);
        }
        GrowthSeries::from_per_coset("power", vec!["1".into()], rows, Provenance::ClosedForm)
    }

    #[test]
    fn grigorchuk_envelope() {
        let s = grigorchuk_growth(6);
        let env = ratio_envelope(&s, 2).unwrap();
        assert!(env.b_emp <= q(2, 1));
        assert!(env.a_emp >= q(1, 4));
        assert!(env.a_emp <= env.b_emp);
    }

    #[test]
    fn constant_series_has_unit_ratios() {
        let env = ratio_envelope(&toy(&[1, 1, 1]), 2).unwrap();
        assert_eq!((env.a_emp.clone(), env.b_emp.clone()), (q(1, 1), q(1, 1)));
        assert!(matches!(ratio_envelope(&toy(&[1]), 2), Err(Error::EmptySeries { .. })));
        assert!(matches!(ratio_envelope(&toy(&[1, 0]), 2), Err(Error::NonPositiveTerm(1))));
    }

    #[test]
    fn grigorchuk_certificate() {
        let (a, b) = grigorchuk_bounds();
        let c = gamma_certificate(&grigorchuk_growth(10), 2, &a, &b, BoundsKind::Proven, None).unwrap();
        let ln4 = ln_biguint(&BigUint::from(4u32), c.precision_bits);
        assert!(c.m.is_subset_of(&ln4.widen(2)) && ln4.is_subset_of(&c.m.widen(2)));
        assert!(c.alpha.contains(&q(1, 4)));
        assert!(c.beta.contains(&q(4, 1)));
        assert!(c.all_verified() && c.nested && !c.is_empirical());
        assert!(c.enclosure_width() < q(3, 1000));
        let g = c.witness.to_f64();
        assert!((g - 0.71).abs() < 0.01, "{g}");
        assert!(c.last().bracket().contains(&c.witness.lower()));
    }

    #[test]
    fn apollonian_limit() {
        let s = apollonian_growth(5).unwrap();
        let env = ratio_envelope(&s, 3).unwrap();
        assert_eq!((env.a_emp.clone(), env.b_emp.clone()), (q(3, 1), q(3, 1)));
        let c = gamma_certificate(&s, 3, &env.a_emp, &env.b_emp, BoundsKind::Proven, None).unwrap();
        let p = c.precision_bits;
        let target = ln_biguint(&BigUint::from(7u32), p).add(&ln_biguint(&BigUint::from(3u32), p).div_int(&BigInt::from(2)));
        assert!(c.enclosure.intersect(&target).is_some());
        // gamma_n approaches the limit from below by exactly M / 3^n
        let last = c.last();
        let gap = target.sub(&last.gamma).sub(&last.error);
        assert!(gap.abs().hi_scaled() < &BigInt::from(1u64 << 20));
        assert!(c.all_verified() && c.nested);
        assert!((c.witness.to_f64() - 2.4951).abs() < 2.0 * last.error.to_f64());
    }

    #[test]
    fn ggs_limit() {
        let s = ggs_growth(&crate::catalog::GgsVector::new(3, vec![1, 2]).unwrap(), 5).unwrap();
        let c = certify_double_exponential(&s, 3, None).unwrap();
        assert!(c.is_empirical() && c.all_verified());
        let ln9_3 = (9f64).ln() / 3.0;
        assert!((c.witness.to_f64() - ln9_3).abs() < 1e-2);
        for t in &c.terms[1..] {
            let expected = 3f64.ln() / 3f64.powi(t.n as i32) + ln9_3;
            assert!((t.gamma.to_f64() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_doubly_exponential() {
        let c = certify_double_exponential(&squares(6), 2, None).unwrap();
        assert_eq!((c.a.clone(), c.b.clone()), (q(1, 1), q(1, 1)));
        assert!(c.alpha.contains(&q(1, 1)) && c.beta.contains(&q(1, 1)));
        assert!(c.all_verified());
        let ln2 = ln2(c.precision_bits);
        for t in &c.terms {
            assert!(t.gamma.intersect(&ln2).is_some());
        }
    }

    #[test]
    fn short_prefix_brackets_intersect() {
        let c = certify_double_exponential(&toy(&[5, 16, 68]), 2, None).unwrap();
        for (i, s) in c.terms.iter().enumerate() {
            for t in &c.terms[i + 1..] {
                assert!(s.bracket().intersect(&t.bracket()).is_some());
            }
        }
        assert!((c.terms[0].gamma.to_f64() - 5f64.ln()).abs() < 1e-12);
        assert!((c.terms[2].gamma.to_f64() - 68f64.ln() / 4.0).abs() < 1e-12);
        let errors: Vec<_> = c.terms.iter().map(|t| t.error.upper()).collect();
        assert!(errors.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn violated_bounds_are_rejected() {
        let s = grigorchuk_growth(4);
        let err = gamma_certificate(&s, 2, &q(1, 2), &q(2, 1), BoundsKind::Proven, None).unwrap_err();
        assert!(matches!(err, Error::RatioBoundViolated { .. }));
        let err = gamma_certificate(&s, 2, &q(1, 4), &q(1, 2), BoundsKind::Proven, None).unwrap_err();
        assert!(matches!(err, Error::RatioBoundViolated { .. }));
        assert!(matches!(
            gamma_certificate(&s, 1, &q(1, 4), &q(2, 1), BoundsKind::Proven, None),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn low_precision_is_reported() {
        let (a, b) = grigorchuk_bounds();
        let err = gamma_certificate(&grigorchuk_growth(12), 2, &a, &b, BoundsKind::Proven, Some(8)).unwrap_err();
        assert!(matches!(err, Error::PrecisionInsufficient { .. }));
    }

    #[test]
    fn doubling_precision_keeps_verdicts() {
        let (a, b) = grigorchuk_bounds();
        let s = grigorchuk_growth(8);
        let mut prev: Option<GammaCertificate> = None;
        for bits in [32, 64, 128, 256] {
            let c = gamma_certificate(&s, 2, &a, &b, BoundsKind::Proven, Some(bits)).unwrap();
            if let Some(p) = &prev {
                for (x, y) in p.terms.iter().zip(&c.terms) {
                    assert!(!x.envelope_verified || y.envelope_verified);
                }
                assert!(c.enclosure.lower() >= p.enclosure.lower() - q(1, 1 << 20));
            }
            prev = Some(c);
        }
    }

    #[test]
    fn exports() {
        let (a, b) = grigorchuk_bounds();
        let c = gamma_certificate(&grigorchuk_growth(3), 2, &a, &b, BoundsKind::Proven, None).unwrap();
        let csv = c.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "n,gamma_n,error_bound");
        assert!(lines[1].starts_with("0,1.6094379124341003746007593332"));
        assert!(lines[1].contains(",1.38629436111989061883446424291"), "{}", lines[1]);
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(v["A"], "1/4");
        assert_eq!(v["bounds"], "proven");
        assert!(v["M"]["value"].as_str().unwrap().starts_with("1.386294361119890618"));
        assert_eq!(v["terms"].as_array().unwrap().len(), 4);
    }
}
