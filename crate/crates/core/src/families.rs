//! Exact solutions for the catalog families.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::{GgsVector, GRIGORCHUK_T};
use crate::error::{Error, Result};
use crate::series::{GrowthSeries, Provenance};

/// Default bound on `p^p` for [`ggs_parameters`].
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 100_000_000;

/// The six Grigorchuk counts at one depth `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrigorchukTerms {
    pub x: BigUint,
    pub y: BigUint,
    pub z: BigUint,
    pub big_x: BigUint,
    pub big_y: BigUint,
    pub big_z: BigUint,
}

impl GrigorchukTerms {
    pub fn initial() -> Self {
        let one = BigUint::one();
        GrigorchukTerms {
            x: one.clone(),
            y: one.clone(),
            z: one.clone(),
            big_x: BigUint::from(2u32),
            big_y: one,
            big_z: BigUint::zero(),
        }
    }

    pub fn next(&self) -> Self {
        let GrigorchukTerms { x, y, z, big_x, big_y, big_z } = self;
        let two = BigUint::from(2u32);
        GrigorchukTerms {
            x: x * x + &two * y * y + z * z,
            y: x * big_y + big_y * z + big_x * y + y * big_z,
            z: big_x * big_x + &two * big_y * big_y + big_z * big_z,
            big_x: &two * x * y + &two * y * z,
            big_y: x * big_x + &two * y * big_y + z * big_z,
            big_z: &two * big_x * big_y + &two * big_y * big_z,
        }
    }

    pub fn total(&self) -> BigUint {
        let two = BigUint::from(2u32);
        let four = BigUint::from(4u32);
        &two * &self.x + &four * &self.y + &two * &self.z + &two * &self.big_x + &four * &self.big_y + &two * &self.big_z
    }

    /// `x - z + X - Z`.
    pub fn defect(&self) -> BigInt {
        BigInt::from(self.x.clone()) - BigInt::from(self.z.clone()) + BigInt::from(self.big_x.clone())
            - BigInt::from(self.big_z.clone())
    }

    /// Counts for the 16 transversal cosets, in transversal order.
    pub fn per_coset(&self) -> Vec<BigUint> {
        GRIGORCHUK_T
            .iter()
            .map(|t| {
                match *t {
                    "1" | "a" => &self.x,
                    "c" | "ac" | "aca" | "ca" => &self.y,
                    "dada" | "dad" => &self.z,
                    "b" | "ba" => &self.big_x,
                    "d" | "ad" | "ada" | "da" => &self.big_y,
                    "cada" | "cad" => &self.big_z,
                    _ => unreachable!("fixed transversal"),
                }
                .clone()
            })
            .collect()
    }
}

/// Terms for `n = 1..=n_max`.
pub fn grigorchuk_terms(n_max: usize) -> Vec<GrigorchukTerms> {
    let mut out: Vec<GrigorchukTerms> = Vec::with_capacity(n_max);
    if n_max >= 1 {
        out.push(GrigorchukTerms::initial());
    }
    while out.len() < n_max {
        let next = out.last().expect("non-empty").next();
        out.push(next);
    }
    out
}

pub fn grigorchuk_growth(n_max: usize) -> GrowthSeries {
    let p0: Vec<BigUint> = GRIGORCHUK_T
        .iter()
        .map(|t| BigUint::from(u32::from(matches!(*t, "1" | "a" | "b" | "c" | "d"))))
        .collect();
    let mut rows = vec![p0];
    rows.extend(grigorchuk_terms(n_max).iter().map(GrigorchukTerms::per_coset));
    GrowthSeries::from_per_coset("grigorchuk", GRIGORCHUK_T.iter().map(|s| s.to_string()).collect(), rows, Provenance::Specialized)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GgsParameters {
    pub p: u64,
    pub e: Vec<u64>,
    pub x1: u64,
    pub y1: u64,
    /// Circulant matrix of `(0, e_1, ..., e_{p-1})`.
    pub circulant: Vec<Vec<u64>>,
}

impl GgsParameters {
    /// `x_1 + (p-1) y_1`.
    pub fn base(&self) -> BigUint {
        BigUint::from(self.x1) + BigUint::from(self.p - 1) * BigUint::from(self.y1)
    }
}

pub fn circulant(e: &GgsVector) -> Vec<Vec<u64>> {
    let p = e.p() as usize;
    let c: Vec<u64> = std::iter::once(0).chain(e.e().iter().copied()).collect();
    (0..p).map(|t| (0..p).map(|r| c[(r + p - t) % p]).collect()).collect()
}

pub fn ggs_parameters(e: &GgsVector) -> Result<GgsParameters> {
    ggs_parameters_with_budget(e, DEFAULT_ENUMERATION_BUDGET)
}

/// Counts `n in F_p^p` with `(nC)_r n_r = 0` for every `r`, split by coordinate sum 0
/// and 1.
pub fn ggs_parameters_with_budget(e: &GgsVector, budget: u128) -> Result<GgsParameters> {
    if e.is_symmetric() {
        return Err(Error::NonSymmetricRequired(e.e().to_vec()));
    }
    let p = e.p();
    let size = (p as u128).pow(p as u32);
    if size > budget {
        return Err(Error::EnumerationBudgetExceeded(size));
    }
    let c = circulant(e);
    let pu = p as usize;
    let mut n = vec![0u64; pu];
    let (mut x1, mut y1) = (0u64, 0u64);
    loop {
        let ok = (0..pu).all(|r| {
            if n[r] == 0 {
                return true;
            }
            let i_r: u64 = (0..pu).map(|t| n[t] * c[t][r]).sum::<u64>() % p;
            i_r == 0
        });
        if ok {
            match n.iter().sum::<u64>() % p {
                0 => x1 += 1,
                1 => y1 += 1,
                _ => {}
            }
        }
        // odometer step
        let mut pos = 0;
        while pos < pu {
            n[pos] += 1;
            if n[pos] < p {
                break;
            }
            n[pos] = 0;
            pos += 1;
        }
        if pos == pu {
            break;
        }
    }
    Ok(GgsParameters { p, e: e.e().to_vec(), x1, y1, circulant: c })
}

fn exact_div(num: BigInt, p: u64, context: &str) -> Result<BigInt> {
    let (q, r) = num.div_rem(&BigInt::from(p));
    if !r.is_zero() {
        return Err(Error::ExactDivisionFailure { divisor: p, context: context.to_string() });
    }
    Ok(q)
}

/// `(x_n, y_n)` for `n = 1..=n_max` from the explicit recursion, dividing exactly by `p`.
pub fn ggs_xy(params: &GgsParameters, n_max: usize) -> Result<Vec<(BigUint, BigUint)>> {
    let p = params.p;
    let pe = p as u32;
    let mut out = Vec::with_capacity(n_max);
    if n_max == 0 {
        return Ok(out);
    }
    let (mut x, mut y) = (BigInt::from(params.x1), BigInt::from(params.y1));
    for n in 1..=n_max {
        out.push((x.to_biguint().expect("counts are non-negative"), y.to_biguint().expect("counts are non-negative")));
        if n == n_max {
            break;
        }
        let s = (&x + BigInt::from(p - 1) * &y).pow(pe);
        let d = (&x - &y).pow(pe);
        let nx = exact_div(&s + BigInt::from(p - 1) * &d, p, &format!("x_{}", n + 1))?;
        let ny = exact_div(&s - &d, p, &format!("y_{}", n + 1))?;
        if nx.is_negative() || ny.is_negative() {
            return Err(Error::Internal(format!("negative count at n={}", n + 1)));
        }
        x = nx;
        y = ny;
    }
    Ok(out)
}

/// `(x_{n+1}, y_{n+1})` from the binomial expansion with `z_l`, `z'_l`.
pub fn ggs_step_binomial(p: u64, x: &BigUint, y: &BigUint) -> (BigUint, BigUint) {
    let pu = p as usize;
    let mut nx = BigUint::zero();
    let mut ny = BigUint::zero();
    let mut binom = BigUint::one();
    for l in 0..=pu {
        if l > 0 {
            binom = binom * BigUint::from((pu - l + 1) as u64) / BigUint::from(l as u64);
        }
        let (z, zp) = z_closed_form(p, l);
        let term = x.pow((pu - l) as u32) * y.pow(l as u32) * &binom;
        nx += &term * z;
        ny += term * zp;
    }
    (nx, ny)
}

/// Closed form of `(z_l, z'_l)`: nowhere-zero tuples in `F_p^l` summing to 0 and to 1.
pub fn z_closed_form(p: u64, l: usize) -> (BigUint, BigUint) {
    let pm1 = BigInt::from(p - 1);
    let power = pm1.pow(l as u32);
    let sign = |k: i64| if k.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
    let z = (&power - sign(l as i64 - 1) * &pm1) / BigInt::from(p);
    let zp = (&power - sign(l as i64)) / BigInt::from(p);
    (z.to_biguint().expect("non-negative"), zp.to_biguint().expect("non-negative"))
}

/// Enumerates nowhere-zero tuples directly.
pub fn z_brute_force(p: u64, l: usize) -> (u64, u64) {
    let mut n = vec![1u64; l];
    let (mut z, mut zp) = (0u64, 0u64);
    loop {
        match n.iter().sum::<u64>() % p {
            0 => z += 1,
            1 => zp += 1,
            _ => {}
        }
        let mut pos = 0;
        while pos < l {
            n[pos] += 1;
            if n[pos] < p {
                break;
            }
            n[pos] = 1;
            pos += 1;
        }
        if pos == l {
            break;
        }
    }
    (z, zp)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZCounts {
    pub z: BigUint,
    pub z_prime: BigUint,
    /// Present for `l <= 6`.
    pub brute_force: Option<(u64, u64)>,
}

/// `(z_l, z'_l)` from the closed form, cross-checked by enumeration for `l <= 6`.
pub fn z_counts(p: u64, l: usize) -> Result<ZCounts> {
    if l as u64 > p {
        return Err(Error::OutOfRange(format!("l = {l} exceeds p = {p}")));
    }
    let (z, z_prime) = z_closed_form(p, l);
    let brute_force = (l <= 6).then(|| z_brute_force(p, l));
    if let Some((bz, bzp)) = brute_force {
        if BigUint::from(bz) != z || BigUint::from(bzp) != z_prime {
            return Err(Error::Internal(format!("z counts disagree for p={p}, l={l}")));
        }
    }
    Ok(ZCounts { z, z_prime, brute_force })
}

/// `a_0 = 2p - 1`, `a_n = p (x_1 + (p-1) y_1)^(p^(n-1))`, cross-checked against the
/// explicit x/y recursion. Coset columns are `a^i b^j` for `i, j < p`.
pub fn ggs_growth(e: &GgsVector, n_max: usize) -> Result<GrowthSeries> {
    let params = ggs_parameters(e)?;
    ggs_growth_from(&params, n_max)
}

pub fn ggs_growth_from(params: &GgsParameters, n_max: usize) -> Result<GrowthSeries> {
    let p = params.p;
    let pu = p as usize;
    let xy = ggs_xy(params, n_max)?;
    let base = params.base();
    let mut rows = Vec::with_capacity(n_max + 1);
    rows.push((0..pu * pu).map(|c| BigUint::from(u32::from((c / pu) * (c % pu) == 0))).collect::<Vec<_>>());
    for (n, (x, y)) in xy.iter().enumerate().map(|(i, v)| (i + 1, v)) {
        let exponent = BigUint::from(p).pow((n - 1) as u32);
        let exponent = exponent.to_u32().ok_or_else(|| Error::OutOfRange(format!("p^{} too large", n - 1)))?;
        let closed = BigUint::from(p) * base.pow(exponent);
        let from_xy = BigUint::from(p) * (x + BigUint::from(p - 1) * y);
        if closed != from_xy {
            return Err(Error::Internal(format!("closed form and x/y recursion disagree at n={n}")));
        }
        rows.push((0..pu * pu).map(|c| if c % pu == 0 { x.clone() } else { y.clone() }).collect());
    }
    let labels = (0..pu * pu).map(|c| ggs_label(c / pu, c % pu)).collect();
    let name = format!("ggs(p={}, e=({}))", p, params.e.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
    Ok(GrowthSeries::from_per_coset(&name, labels, rows, Provenance::ClosedForm))
}

fn ggs_label(i: usize, j: usize) -> String {
    let part = |sym: &str, k: usize| match k {
        0 => String::new(),
        1 => sym.to_string(),
        _ => format!("{sym}^{k}"),
    };
    let s = format!("{}{}", part("a", i), part("b", j));
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

/// `3^((3^n - 1)/2) * 7^(3^n)`.
pub fn apollonian_closed_form(n: usize) -> BigUint {
    let e = 3u64.pow(n as u32);
    BigUint::from(3u32).pow(((e - 1) / 2) as u32) * BigUint::from(7u32).pow(e as u32)
}

/// Iterates `X_{n+1} = 3X^3 + 9XY^2`, `Y_{n+1} = 3Y^3 + 9X^2Y` from `X_0 = 1`, `Y_0 = 6`
/// and checks `X_n + Y_n` against the closed form.
pub fn apollonian_growth(n_max: usize) -> Result<GrowthSeries> {
    if n_max > 12 {
        return Err(Error::OutOfRange(format!("depth {n_max} is beyond the supported 12")));
    }
    let three = BigUint::from(3u32);
    let nine = BigUint::from(9u32);
    let (mut x, mut y) = (BigUint::one(), BigUint::from(6u32));
    let mut rows = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if &x + &y != apollonian_closed_form(n) {
            return Err(Error::Internal(format!("X/Y recursion disagrees with closed form at n={n}")));
        }
        rows.push(vec![x.clone(), y.clone()]);
        let nx = &three * x.pow(3u32) + &nine * &x * y.pow(2u32);
        let ny = &three * y.pow(3u32) + &nine * x.pow(2u32) * &y;
        x = nx;
        y = ny;
    }
    Ok(GrowthSeries::from_per_coset("apollonian", vec!["1".into(), "x".into()], rows, Provenance::ClosedForm))
}
