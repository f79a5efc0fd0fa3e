//! Dyadic interval arithmetic with outward rounding.
//!
//! An [`Interval`] at precision `p` is a pair of integers `lo <= hi` standing for the
//! real interval `[lo / 2^p, hi / 2^p]`. Every operation rounds `lo` down and `hi` up,
//! so the exact result of the real operation is always enclosed.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Extra bits carried by the transcendental functions before final rounding.
pub const GUARD_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k as usize
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn floor_shr(a: &BigInt, k: u32) -> BigInt {
    floor_div(a, &pow2(k))
}

fn ceil_shr(a: &BigInt, k: u32) -> BigInt {
    ceil_div(a, &pow2(k))
}

impl Interval {
    /// `[lo, hi] / 2^prec`; panics if `lo > hi`.
    pub fn new(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        assert!(lo <= hi, "empty interval");
        Interval { lo, hi, prec }
    }

    pub fn from_int(x: &BigInt, prec: u32) -> Self {
        let v = x << prec as usize;
        Interval { lo: v.clone(), hi: v, prec }
    }

    /// Tightest enclosure of `num / den` (`den > 0`).
    pub fn from_ratio(num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(den.is_positive());
        let scaled = num << prec as usize;
        Interval { lo: floor_div(&scaled, den), hi: ceil_div(&scaled, den), prec }
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Self::from_ratio(q.numer(), q.denom(), prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Scaled lower endpoint.
    pub fn lo_scaled(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_scaled(&self) -> &BigInt {
        &self.hi
    }

    pub fn lower(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.prec))
    }

    pub fn upper(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.prec))
    }

    /// Width in units of `2^-prec`.
    pub fn width_scaled(&self) -> BigInt {
        &self.hi - &self.lo
    }

    pub fn width(&self) -> BigRational {
        self.upper() - self.lower()
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        self.lower() <= *q && *q <= self.upper()
    }

    /// `self` is inside `other`, both at the same precision.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.same_prec(other);
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        self.same_prec(other);
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi, prec: self.prec })
    }

    /// Outward-widened copy by `ulps` units of `2^-prec` on each side.
    pub fn widen(&self, ulps: u64) -> Interval {
        Interval { lo: &self.lo - ulps, hi: &self.hi + ulps, prec: self.prec }
    }

    /// Re-expresses at another precision, rounding outward.
    pub fn with_prec(&self, prec: u32) -> Interval {
        match prec.cmp(&self.prec) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let k = (prec - self.prec) as usize;
                Interval { lo: &self.lo << k, hi: &self.hi << k, prec }
            }
            Ordering::Less => {
                let k = self.prec - prec;
                Interval { lo: floor_shr(&self.lo, k), hi: ceil_shr(&self.hi, k), prec }
            }
        }
    }

    /// Rounded-down midpoint, as a point interval.
    pub fn midpoint(&self) -> Interval {
        let m = floor_div(&(&self.lo + &self.hi), &BigInt::from(2));
        Interval { lo: m.clone(), hi: m, prec: self.prec }
    }

    fn same_prec(&self, other: &Interval) {
        assert_eq!(self.prec, other.prec, "precision mismatch");
    }

    pub fn add(&self, other: &Interval) -> Interval {
        self.same_prec(other);
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi, prec: self.prec }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.same_prec(other);
        Interval { lo: &self.lo - &other.hi, hi: &self.hi - &other.lo, prec: self.prec }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        self.same_prec(other);
        let c = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = c.iter().min().expect("four candidates");
        let hi = c.iter().max().expect("four candidates");
        Interval { lo: floor_shr(lo, self.prec), hi: ceil_shr(hi, self.prec), prec: self.prec }
    }

    pub fn mul_int(&self, k: &BigInt) -> Interval {
        let (a, b) = (&self.lo * k, &self.hi * k);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval { lo, hi, prec: self.prec }
    }

    /// Division by a positive integer.
    pub fn div_int(&self, k: &BigInt) -> Interval {
        assert!(k.is_positive());
        Interval { lo: floor_div(&self.lo, k), hi: ceil_div(&self.hi, k), prec: self.prec }
    }

    /// Division by an interval that excludes zero on the positive side.
    pub fn div(&self, other: &Interval) -> Interval {
        self.same_prec(other);
        assert!(other.lo.is_positive(), "divisor must be positive");
        let s = self.prec as usize;
        let c = [(&self.lo, &other.lo), (&self.lo, &other.hi), (&self.hi, &other.lo), (&self.hi, &other.hi)];
        let lo = c.iter().map(|(a, b)| floor_div(&(*a << s), b)).min().expect("four candidates");
        let hi = c.iter().map(|(a, b)| ceil_div(&(*a << s), b)).max().expect("four candidates");
        Interval { lo, hi, prec: self.prec }
    }

    /// Enclosure of `|x|` over the interval.
    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let hi = (-&self.lo).max(self.hi.clone());
            Interval { lo: BigInt::zero(), hi, prec: self.prec }
        }
    }

    /// Enclosure of `max(x, y)` over both intervals.
    pub fn max(&self, other: &Interval) -> Interval {
        self.same_prec(other);
        Interval { lo: (&self.lo).max(&other.lo).clone(), hi: (&self.hi).max(&other.hi).clone(), prec: self.prec }
    }

    /// `self <= other` holds for every pair of points.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.same_prec(other);
        self.hi <= other.lo
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Rough value for display only.
    pub fn to_f64(&self) -> f64 {
        let mid = &self.lo + &self.hi;
        let bits = mid.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&mid >> shift as usize).to_f64().unwrap_or(0.0);
        top * 2f64.powi((shift - self.prec as i64 - 1) as i32)
    }

    /// Decimal midpoint and radius with `digits` fractional digits; the decimal interval
    /// `[mid - radius, mid + radius]` contains this interval.
    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        let ten = BigInt::from(10).pow(digits as u32);
        let lo = floor_shr(&(&self.lo * &ten), self.prec);
        let hi = ceil_shr(&(&self.hi * &ten), self.prec);
        let mid = floor_div(&(&lo + &hi), &BigInt::from(2));
        let radius = (&hi - &mid).max(&mid - &lo);
        (format_fixed(&mid, digits), format_fixed(&radius, digits))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, r) = self.to_decimal(20);
        write!(f, "{m} ± {r}")
    }
}

fn format_fixed(x: &BigInt, digits: usize) -> String {
    let neg = x.sign() == Sign::Minus;
    let mut s = x.abs().to_string();
    if s.len() <= digits {
        s = format!("{}{s}", "0".repeat(digits + 1 - s.len()));
    }
    let (int, frac) = s.split_at(s.len() - digits);
    let body = if digits == 0 { int.to_string() } else { format!("{int}.{frac}") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `2 atanh(u) = 2 (u + u^3/3 + ...)` for `u` in `[u_lo, u_hi] / 2^p` within `[0, 1/3]`.
fn two_atanh(u_lo: &BigInt, u_hi: &BigInt, p: u32) -> (BigInt, BigInt) {
    let third = ceil_div(&pow2(p), &BigInt::from(3));
    assert!(!u_lo.is_negative() && *u_hi <= third, "series argument out of range");
    let lower = {
        let u2 = floor_shr(&(u_lo * u_lo), p);
        let mut pow = u_lo.clone();
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        while !pow.is_zero() {
            sum += floor_div(&pow, &BigInt::from(2 * k + 1));
            pow = floor_shr(&(&pow * &u2), p);
            k += 1;
        }
        sum * 2
    };
    let upper = {
        let u2 = ceil_shr(&(u_hi * u_hi), p);
        let mut pow = u_hi.clone();
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        loop {
            if pow <= BigInt::from(2) {
                // remaining terms sum to at most pow / ((2k+1)(1 - u^2)) <= 9 pow / (8 (2k+1))
                sum += ceil_div(&(&pow * 9), &BigInt::from(8 * (2 * k + 1)));
                break;
            }
            sum += ceil_div(&pow, &BigInt::from(2 * k + 1));
            pow = ceil_shr(&(&pow * &u2), p);
            k += 1;
        }
        sum * 2
    };
    (lower, upper)
}

/// Enclosure of `ln 2`.
pub fn ln2(prec: u32) -> Interval {
    let p = prec + GUARD_BITS;
    let u_lo = floor_div(&pow2(p), &BigInt::from(3));
    let u_hi = ceil_div(&pow2(p), &BigInt::from(3));
    let (lo, hi) = two_atanh(&u_lo, &u_hi, p);
    Interval { lo, hi, prec: p }.with_prec(prec)
}

/// `ln y` for `y` in `[y_lo, y_hi] / 2^p`, `1 <= y <= 2`.
fn ln_unit(y_lo: &BigInt, y_hi: &BigInt, p: u32) -> (BigInt, BigInt) {
    let one = pow2(p);
    let s = p as usize;
    let u_lo = floor_div(&((y_lo - &one) << s), &(y_lo + &one));
    let u_hi = ceil_div(&((y_hi - &one) << s), &(y_hi + &one));
    two_atanh(&u_lo.max(BigInt::zero()), &u_hi, p)
}

/// Enclosure of `ln x` for a positive integer, using only its leading bits.
pub fn ln_biguint(x: &BigUint, prec: u32) -> Interval {
    assert!(!x.is_zero(), "logarithm of zero");
    let p = prec + GUARD_BITS;
    let len = x.bits();
    let e = len - 1;
    let xi = BigInt::from(x.clone());
    // x = 2^e y with y in [1, 2)
    let (y_lo, y_hi) = if e <= p as u64 {
        let y = &xi << (p as u64 - e) as usize;
        (y.clone(), y)
    } else {
        let k = (e - p as u64) as usize;
        let y_lo = &xi >> k;
        let exact = (&y_lo << k) == xi;
        let y_hi = if exact { y_lo.clone() } else { &y_lo + 1 };
        (y_lo, y_hi)
    };
    let (l_lo, l_hi) = ln_unit(&y_lo, &y_hi, p);
    let ln2 = ln2(p);
    let eb = BigInt::from(e);
    let lo = &ln2.lo * &eb + l_lo;
    let hi = &ln2.hi * &eb + l_hi;
    Interval { lo, hi, prec: p }.with_prec(prec)
}

/// Enclosure of `ln q` for a positive rational.
pub fn ln_rational(q: &BigRational, prec: u32) -> Interval {
    assert!(q.is_positive(), "logarithm of a non-positive number");
    let num = q.numer().to_biguint().expect("positive");
    let den = q.denom().to_biguint().expect("positive");
    ln_biguint(&num, prec).sub(&ln_biguint(&den, prec))
}

fn exp_point_lower(x: &BigInt, p: u32) -> BigInt {
    let one = pow2(p);
    let half = pow2(p - 1);
    let mut s = 0u32;
    let mut r = x.clone();
    while r > half {
        r = floor_shr(&r, 1);
        s += 1;
    }
    let mut sum = one.clone();
    let mut term = one;
    let mut k = 1u64;
    loop {
        term = floor_div(&(&term * &r), &(pow2(p) * k));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..s {
        sum = floor_shr(&(&sum * &sum), p);
    }
    sum
}

fn exp_point_upper(x: &BigInt, p: u32) -> BigInt {
    let one = pow2(p);
    let half = pow2(p - 1);
    let mut s = 0u32;
    let mut r = x.clone();
    while r > half {
        r = ceil_shr(&r, 1);
        s += 1;
    }
    let mut sum = one.clone();
    let mut term = one;
    let mut k = 1u64;
    loop {
        term = ceil_div(&(&term * &r), &(pow2(p) * k));
        sum += &term;
        if term <= BigInt::one() {
            // ratio of consecutive terms is at most 1/4 from here on
            sum += &term;
            break;
        }
        k += 1;
    }
    for _ in 0..s {
        sum = ceil_shr(&(&sum * &sum), p);
    }
    sum
}

/// Enclosure of `e^x`.
pub fn exp(x: &Interval) -> Interval {
    let prec = x.prec;
    let p = prec + GUARD_BITS;
    let w = x.with_prec(p);
    let zero = BigInt::zero();
    let (lo, hi) = if !w.lo.is_negative() {
        (exp_point_lower(&w.lo, p), exp_point_upper(&w.hi, p))
    } else if !w.hi.is_positive() {
        // e^-y = 1 / e^y
        let up = exp_point_upper(&-&w.lo, p);
        let down = exp_point_lower(&-&w.hi, p);
        let sq = pow2(2 * p);
        (floor_div(&sq, &up), ceil_div(&sq, &down))
    } else {
        let up = exp_point_upper(&-&w.lo, p);
        let sq = pow2(2 * p);
        (floor_div(&sq, &up).min(pow2(p)), exp_point_upper(&w.hi.clone().max(zero), p))
    };
    Interval { lo, hi, prec: p }.with_prec(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ln2_digits() {
        let l = ln2(128);
        let (mid, _) = l.to_decimal(30);
        assert!(mid.starts_with("0.69314718055994530941723212145"), "{mid}");
        assert!(l.width_scaled() <= BigInt::from(2));
    }

    #[test]
    fn logs_of_integers() {
        let l = ln_biguint(&BigUint::from(1u32), 100);
        assert!(l.contains(&q(0, 1)));
        let l10 = ln_biguint(&BigUint::from(10u32), 100);
        assert!(l10.to_decimal(25).0.starts_with("2.302585092994045684017991"));
        let big = BigUint::from(3u32).pow(1000u32);
        let lb = ln_biguint(&big, 100);
        let l3 = ln_biguint(&BigUint::from(3u32), 100);
        assert!(lb.sub(&l3.mul_int(&BigInt::from(1000))).contains(&q(0, 1)));
    }

    #[test]
    fn ln_rationals_and_exp() {
        let quarter = ln_rational(&q(1, 4), 96);
        let four = ln_biguint(&BigUint::from(4u32), 96);
        assert!(quarter.add(&four).contains(&q(0, 1)));
        let e = exp(&four);
        assert!(e.contains(&q(4, 1)), "{e}");
        assert!(exp(&quarter).contains(&q(1, 4)));
        let e1 = exp(&Interval::from_int(&BigInt::one(), 100));
        assert!(e1.to_decimal(25).0.starts_with("2.718281828459045235360287"));
        let z = exp(&Interval::from_int(&BigInt::zero(), 64));
        assert!(z.contains(&q(1, 1)));
        let straddle = exp(&Interval::from_ratio(&BigInt::from(-1), &BigInt::from(2), 64).add(&Interval::new(
            BigInt::zero(),
            pow2(64),
            64,
        )));
        assert!(straddle.contains(&q(1, 1)));
    }

    #[test]
    fn arithmetic_rounds_outward() {
        let third = Interval::from_ratio(&BigInt::one(), &BigInt::from(3), 16);
        assert!(third.contains(&q(1, 3)));
        let prod = third.mul(&third);
        assert!(prod.contains(&q(1, 9)));
        let quo = third.div(&third);
        assert!(quo.contains(&q(1, 1)));
        assert!(third.neg().abs().contains(&q(1, 3)));
        assert!(third.with_prec(4).contains(&q(1, 3)));
        assert!(third.div_int(&BigInt::from(7)).contains(&q(1, 21)));
    }

    #[test]
    fn decimal_output() {
        let x = Interval::from_ratio(&BigInt::from(-5), &BigInt::from(4), 8);
        assert_eq!(x.to_decimal(3), ("-1.250".to_string(), "0.000".to_string()));
        assert_eq!(format_fixed(&BigInt::from(7), 3), "0.007");
        assert!((Interval::from_ratio(&BigInt::one(), &BigInt::from(3), 60).to_f64() - 1.0 / 3.0).abs() < 1e-15);
    }
}
