//! Exact growth series and their exports.

use std::fmt::{self, Write as _};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integers with more digits than this are written to CSV as blanks.
pub const CSV_DIGIT_LIMIT: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Iterated from coset decomposition data.
    Generic,
    /// A family-specific recursion.
    Specialized,
    ClosedForm,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Generic => "generic",
            Provenance::Specialized => "specialized",
            Provenance::ClosedForm => "closed-form",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthSeries {
    pub group: String,
    /// One label per coset column.
    pub labels: Vec<String>,
    /// `per_coset[n][i]` is `p_n(t_i)`.
    #[serde(with = "biguint_table")]
    pub per_coset: Vec<Vec<BigUint>>,
    #[serde(with = "biguint_list")]
    pub totals: Vec<BigUint>,
    pub provenance: Provenance,
}

impl GrowthSeries {
    /// Builds a series, summing the coset columns into totals.
    pub fn from_per_coset(group: &str, labels: Vec<String>, per_coset: Vec<Vec<BigUint>>, provenance: Provenance) -> Self {
        let totals = per_coset.iter().map(|row| row.iter().sum()).collect();
        GrowthSeries { group: group.to_string(), labels, per_coset, totals, provenance }
    }

    /// Largest `n` present.
    pub fn depth(&self) -> usize {
        self.totals.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.totals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.totals.is_empty()
    }

    /// Checks `a_n = sum_i p_n(t_i)` and the table shape.
    pub fn check_sums(&self) -> Result<()> {
        if self.per_coset.len() != self.totals.len() {
            return Err(Error::Internal("per-coset table and totals differ in length".into()));
        }
        for (n, (row, total)) in self.per_coset.iter().zip(&self.totals).enumerate() {
            if row.len() != self.labels.len() {
                return Err(Error::Internal(format!("row {n} has {} entries for {} labels", row.len(), self.labels.len())));
            }
            if row.iter().sum::<BigUint>() != *total {
                return Err(Error::Internal(format!("coset counts at n={n} do not sum to a_{n}")));
            }
        }
        Ok(())
    }

    /// Columns `n, a_n, digits`; `a_n` is left blank above [`CSV_DIGIT_LIMIT`] digits.
    pub fn to_csv(&self) -> String {
        self.to_csv_with_limit(CSV_DIGIT_LIMIT)
    }

    pub fn to_csv_with_limit(&self, limit: usize) -> String {
        let mut out = String::from("n,a_n,digits\n");
        for (n, a) in self.totals.iter().enumerate() {
            let text = a.to_string();
            let shown = if text.len() > limit { "" } else { text.as_str() };
            let _ = writeln!(out, "{n},{shown},{}", text.len());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// Estimated bytes held by a series of depth `n_max`, extrapolating past the last
    /// computed term with bit lengths growing by a factor `d` per step.
    pub fn projected_bytes(&self, d: u32, n_max: usize) -> f64 {
        let Some(last) = self.totals.last() else { return 0.0 };
        let last_bits = last.bits().max(1) as f64;
        let columns = self.labels.len().max(1) as f64;
        let bits: f64 = (0..=n_max)
            .map(|n| match self.totals.get(n) {
                Some(a) => a.bits().max(1) as f64,
                None => last_bits * f64::from(d).powi((n - self.depth()) as i32),
            })
            .sum();
        columns * bits / 8.0
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: GrowthSeries = serde_json::from_str(text)?;
        s.check_sums()?;
        Ok(s)
    }
}

/// Number of decimal digits of `x` (1 for zero).
pub fn decimal_digits(x: &BigUint) -> usize {
    if x.is_zero() {
        1
    } else {
        x.to_string().len()
    }
}

mod biguint_list {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|t| t.parse().map_err(D::Error::custom)).collect()
    }
}

mod biguint_table {
    use num_bigint::BigUint;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<BigUint>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|row| row.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigUint>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|row| row.iter().map(|t| t.parse().map_err(D::Error::custom)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> GrowthSeries {
        let rows = vec![vec![1u32, 2], vec![3, 4]]
            .into_iter()
            .map(|r| r.into_iter().map(BigUint::from).collect())
            .collect();
        GrowthSeries::from_per_coset("toy", vec!["1".into(), "x".into()], rows, Provenance::Generic)
    }

    #[test]
    fn totals_are_row_sums() {
        let s = small();
        assert_eq!(s.totals, vec![BigUint::from(3u32), BigUint::from(7u32)]);
        s.check_sums().unwrap();
        assert_eq!(s.depth(), 1);
    }

    #[test]
    fn json_round_trip_uses_decimal_strings() {
        let s = small();
        let json = s.to_json();
        assert!(json.contains("\"7\""));
        assert_eq!(GrowthSeries::from_json(&json).unwrap(), s);
        let broken = json.replace("\"7\"", "\"8\"");
        assert!(GrowthSeries::from_json(&broken).is_err());
    }

    #[test]
    fn projection_grows_with_depth() {
        let s = small();
        assert_eq!(s.projected_bytes(2, 1), 2.0 * 5.0 / 8.0);
        assert_eq!(s.projected_bytes(2, 2), 2.0 * (5.0 + 6.0) / 8.0);
    }

    #[test]
    fn csv_blanks_huge_values() {
        let s = small();
        assert_eq!(s.to_csv(), "n,a_n,digits\n0,3,1\n1,7,1\n");
        assert_eq!(s.to_csv_with_limit(0), "n,a_n,digits\n0,,1\n1,,1\n");
    }
}
