//! Portrait growth from coset decompositions.
//!
//! Let `K` be a finite-index subgroup the group branches over, `T = {t_i}` a left
//! transversal of `K` in `G` and `S = {s_j}` one of `psi^-1(K x ... x K)` in `K`.
//! Each product `t_i s_j` decomposes as `(g_1, ..., g_d) alpha` with `g_u` in coset
//! `t_{iju} K`, and the number `p_n(t)` of elements of depth at most `n` in `tK` obeys
//! `p_{n+1}(t_i) = sum_j p_n(t_{ij1}) ... p_n(t_{ijd})`.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::{apollonian, grigorchuk, DecompositionRow, APOLLONIAN_S, APOLLONIAN_T, GRIGORCHUK_S, GRIGORCHUK_T};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::perm::Permutation;
use crate::quotient::{commutator_seeds, normal_closure_image, pullback_index, CosetTable, LevelActions, QuotientTable};
use crate::series::{GrowthSeries, Provenance};
use crate::word::{inverse_word, Word};

/// Default quotient levels for the catalog families.
pub const GRIGORCHUK_LEVEL: usize = 3;
pub const GGS_LEVEL: usize = 2;
pub const APOLLONIAN_LEVEL: usize = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchEntry {
    /// Coset index of each first-level section.
    pub sections: Vec<usize>,
    /// Root permutation, 1-based images.
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchData {
    pub group: String,
    pub degree: usize,
    pub transversal: Vec<String>,
    pub subtransversal: Vec<String>,
    /// `table[i][j]` describes `t_i s_j`.
    pub table: Vec<Vec<BranchEntry>>,
    /// Nucleus elements per coset.
    pub p0: Vec<u64>,
}

impl BranchData {
    pub fn cosets(&self) -> usize {
        self.transversal.len()
    }

    pub fn subcosets(&self) -> usize {
        self.subtransversal.len()
    }

    pub fn nucleus_size(&self) -> u64 {
        self.p0.iter().sum()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BranchEntry {
        &self.table[i][j]
    }

    pub fn root_permutation(&self, i: usize, j: usize) -> Result<Permutation> {
        Permutation::from_one_based(&self.table[i][j].perm)
    }

    /// Shape and range checks.
    pub fn validate(&self) -> Result<()> {
        let (k, l) = (self.cosets(), self.subcosets());
        let bad = |m: String| Err(Error::BadBranchData(m));
        if self.degree < 2 {
            return bad(format!("degree {} < 2", self.degree));
        }
        if k == 0 || l == 0 {
            return bad("empty transversal".into());
        }
        if self.p0.len() != k {
            return bad(format!("{} initial values for {k} cosets", self.p0.len()));
        }
        if self.table.len() != k {
            return bad(format!("{} table rows for {k} cosets", self.table.len()));
        }
        for (i, row) in self.table.iter().enumerate() {
            if row.len() != l {
                return bad(format!("row {i} has {} entries, expected {l}", row.len()));
            }
            for (j, e) in row.iter().enumerate() {
                if e.sections.len() != self.degree {
                    return bad(format!("entry ({i},{j}) has {} sections", e.sections.len()));
                }
                if let Some(&x) = e.sections.iter().find(|&&x| x >= k) {
                    return bad(format!("entry ({i},{j}) refers to coset {x}"));
                }
                if e.perm.len() != self.degree || Permutation::from_one_based(&e.perm).is_err() {
                    return bad(format!("entry ({i},{j}) has an invalid permutation"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bd: BranchData = serde_json::from_str(text)?;
        bd.validate()?;
        Ok(bd)
    }
}

/// Computes the decomposition table and initial values, after checking that `S` lies
/// in `K`, represents distinct cosets of `psi^-1(K^d)`, and has the right size.
pub fn build_branch_data(spec: &GroupSpec, t: &[Word], s: &[Word], k: &QuotientTable) -> Result<BranchData> {
    let cosets = CosetTable::new(spec, k, t)?;
    let acts = cosets.actions();
    for w in s {
        if !k.contains(&acts.word(w)) {
            return Err(Error::BadBranchData(format!("`{}` is not in K", spec.format_word(w))));
        }
    }
    let upper = LevelActions::new(spec, k.level() + 1);
    let in_pullback = |w: &Word| {
        let a = upper.word(w);
        (0..spec.degree()).all(|x| a.restrict(x).is_some_and(|r| k.contains(&r)))
    };
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if in_pullback(&inverse_word(&s[i]).concat(&s[j])) {
                return Err(Error::BadBranchData(format!(
                    "`{}` and `{}` lie in the same coset of the pulled-back product",
                    spec.format_word(&s[i]),
                    spec.format_word(&s[j])
                )));
            }
        }
    }
    let index = pullback_index(spec, k)?;
    if index != s.len() {
        return Err(Error::BadBranchData(format!("{} representatives for a subgroup of index {index}", s.len())));
    }

    let mut table = Vec::with_capacity(t.len());
    for ti in t {
        let mut row = Vec::with_capacity(s.len());
        for sj in s {
            let (perm, sections) = spec.decompose(&ti.concat(sj))?;
            let sections = sections.iter().map(|g| cosets.classify(g)).collect::<Result<Vec<_>>>()?;
            row.push(BranchEntry { sections, perm: perm.one_based() });
        }
        table.push(row);
    }
    let mut p0 = vec![0u64; t.len()];
    for nu in spec.nucleus() {
        p0[cosets.classify(nu)?] += 1;
    }
    let bd = BranchData {
        group: spec.name().to_string(),
        degree: spec.degree(),
        transversal: t.iter().map(|w| spec.format_word(w)).collect(),
        subtransversal: s.iter().map(|w| spec.format_word(w)).collect(),
        table,
        p0,
    };
    bd.validate()?;
    Ok(bd)
}

/// Iterates the recursion from `p0` up to depth `n_max`.
pub fn iterate_growth(bd: &BranchData, n_max: usize) -> Result<GrowthSeries> {
    bd.validate()?;
    let mut rows: Vec<Vec<BigUint>> = vec![bd.p0.iter().map(|&x| BigUint::from(x)).collect()];
    for _ in 0..n_max {
        let prev = rows.last().expect("non-empty");
        let next = bd
            .table
            .iter()
            .map(|row| {
                let mut acc = BigUint::zero();
                for e in row {
                    if e.sections.iter().any(|&c| prev[c].is_zero()) {
                        continue;
                    }
                    let mut prod = BigUint::one();
                    for &c in &e.sections {
                        prod *= &prev[c];
                    }
                    acc += prod;
                }
                acc
            })
            .collect();
        rows.push(next);
    }
    Ok(GrowthSeries::from_per_coset(&bd.group, bd.transversal.clone(), rows, Provenance::Generic))
}

fn parse_all(spec: &GroupSpec, words: &[&str]) -> Result<Vec<Word>> {
    words.iter().map(|w| spec.parse_word(w)).collect()
}

/// `K = <[a,b]>^G` at quotient level `m`, checked to have index 16.
pub fn grigorchuk_kernel(m: usize) -> Result<QuotientTable> {
    let g = grigorchuk();
    let k = normal_closure_image(&g, &commutator_seeds(&g)[..1], m)?;
    expect_index(k, 16)
}

/// The even-length subgroup `E` of the Apollonian group at level `m`, index 2.
pub fn apollonian_kernel(m: usize) -> Result<QuotientTable> {
    let ap = apollonian();
    let k = normal_closure_image(&ap, &parse_all(&ap, &["xy", "yz", "xz", "xx"])?, m)?;
    expect_index(k, 2)
}

fn expect_index(k: QuotientTable, expected: usize) -> Result<QuotientTable> {
    if k.ambient_index() != expected {
        return Err(Error::BadBranchData(format!(
            "subgroup has index {} at level {}, expected {expected}",
            k.ambient_index(),
            k.level()
        )));
    }
    Ok(k)
}

pub fn grigorchuk_branch_data(m: usize) -> Result<BranchData> {
    let g = grigorchuk();
    build_branch_data(&g, &parse_all(&g, &GRIGORCHUK_T)?, &parse_all(&g, &GRIGORCHUK_S)?, &grigorchuk_kernel(m)?)
}

pub fn apollonian_branch_data(m: usize) -> Result<BranchData> {
    let ap = apollonian();
    build_branch_data(&ap, &parse_all(&ap, &APOLLONIAN_T)?, &parse_all(&ap, &APOLLONIAN_S)?, &apollonian_kernel(m)?)
}

/// Outcome of re-deriving one row of a published decomposition table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub word: String,
    pub perm_matches: bool,
    /// Computed sections equal the listed ones as automorphisms.
    pub sections_equal: bool,
    /// Computed and listed sections lie in the same cosets.
    pub section_cosets_match: bool,
    pub coset_matches: bool,
}

impl RowCheck {
    pub fn holds_mod_k(&self) -> bool {
        self.perm_matches && self.section_cosets_match && self.coset_matches
    }
}

pub fn check_rows(spec: &GroupSpec, rows: &[DecompositionRow], cosets: &CosetTable<'_>) -> Result<Vec<RowCheck>> {
    let transversal: Vec<String> = cosets.transversal().iter().map(|w| spec.format_word(w)).collect();
    rows.iter()
        .map(|row| {
            let w = spec.parse_word(row.word)?;
            let (perm, sections) = spec.decompose(&w)?;
            let listed = parse_all(spec, row.sections)?;
            if listed.len() != spec.degree() {
                return Err(Error::BadBranchData(format!("row `{}` lists {} sections", row.word, listed.len())));
            }
            let mut equal = true;
            let mut cosets_match = true;
            for (g, h) in sections.iter().zip(&listed) {
                equal &= spec.are_equal(g, h)?;
                cosets_match &= cosets.classify(g)? == cosets.classify(h)?;
            }
            let expected_coset = spec.parse_word(row.coset)?;
            let expected = transversal.iter().position(|t| *t == spec.format_word(&expected_coset));
            Ok(RowCheck {
                word: row.word.to_string(),
                perm_matches: perm == Permutation::from_cycles(spec.degree(), row.perm)?,
                sections_equal: equal,
                section_cosets_match: cosets_match,
                coset_matches: expected == Some(cosets.classify(&w)?),
            })
        })
        .collect()
}

/// Checks `a_{n+1} <= index * a_n^d` for every consecutive pair.
pub fn check_first_level_bound(series: &GrowthSeries, d: u32, index: u64) -> Result<()> {
    for (n, pair) in series.totals.windows(2).enumerate() {
        if pair[1] > BigUint::from(index) * pair[0].pow(d) {
            return Err(Error::RatioBoundViolated { n, detail: format!("a_{} > {index} a_{n}^{d}", n + 1) });
        }
    }
    Ok(())
}
