//! Brute-force portrait growth.
//!
//! The default search is breadth-first over the Cayley graph with the non-trivial
//! nucleus elements as alphabet, deduplicating by portrait, and it stops once
//! `patience` consecutive radii produced nothing of depth at most `n`. Some groups hide
//! shallow elements behind long words; [`Strategy::ProductClosure`] reaches them by
//! multiplying shallow elements with each other instead. Neither search proves
//! completeness.

use rustc_hash::FxHashSet as HashSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::algebra::{ElementId, PortraitStore};
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::quotient::CosetTable;

pub const DEFAULT_PATIENCE: usize = 3;
pub const DEFAULT_RADIUS_CAP: usize = 200;
pub const DEFAULT_MAX_ELEMENTS: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusConfig {
    pub depth: usize,
    pub radius_cap: usize,
    pub patience: usize,
    /// Budget on distinct elements reached by the search.
    pub max_elements: usize,
    /// Elements deeper than this are counted as reached but not expanded further.
    /// `None` expands everything.
    pub expand_depth_limit: Option<usize>,
    /// Order in which nucleus elements are tried; defaults to nucleus order.
    pub alphabet: Option<Vec<usize>>,
    pub strategy: Strategy,
}

/// How the search moves between elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Right multiplication by nucleus letters, radius by radius.
    #[default]
    WordBfs,
    /// Closes the set of elements of depth at most `expand_depth_limit` (default
    /// `depth`) under pairwise products, starting from the nucleus. Every round
    /// multiplies the newly found elements with everything found so far; the search
    /// ends when a round adds nothing, so `patience` and `radius_cap` are ignored
    /// except that `radius_cap` still bounds the number of rounds.
    ProductClosure,
}

impl CensusConfig {
    pub fn new(depth: usize) -> Self {
        CensusConfig {
            depth,
            radius_cap: DEFAULT_RADIUS_CAP,
            patience: DEFAULT_PATIENCE,
            max_elements: DEFAULT_MAX_ELEMENTS,
            expand_depth_limit: None,
            alphabet: None,
            strategy: Strategy::WordBfs,
        }
    }

    pub fn strategy(mut self, s: Strategy) -> Self {
        self.strategy = s;
        self
    }

    pub fn radius_cap(mut self, r: usize) -> Self {
        self.radius_cap = r;
        self
    }

    pub fn patience(mut self, p: usize) -> Self {
        self.patience = p;
        self
    }

    pub fn max_elements(mut self, m: usize) -> Self {
        self.max_elements = m;
        self
    }

    /// Expand only elements of depth at most `depth + slack`.
    pub fn prune_slack(mut self, slack: usize) -> Self {
        self.expand_depth_limit = Some(self.depth + slack);
        self
    }

    pub fn alphabet(mut self, order: Vec<usize>) -> Self {
        self.alphabet = Some(order);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthCensus {
    pub group: String,
    pub depth: usize,
    /// `a_0, ..., a_n`.
    pub totals: Vec<BigUint>,
    /// `per_coset[t][k]` counts elements of depth at most `k` in the `t`-th coset.
    pub per_coset: Option<Vec<Vec<BigUint>>>,
    pub coset_labels: Option<Vec<String>>,
    pub final_radius: usize,
    pub patience_used: usize,
    pub saturated: bool,
    pub elements_visited: usize,
}

impl DepthCensus {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a_n");
        if let Some(labels) = &self.coset_labels {
            for l in labels {
                let _ = write!(out, ",p_n({l})");
            }
        }
        out.push_str(",saturated\n");
        for (k, a) in self.totals.iter().enumerate() {
            let _ = write!(out, "{k},{a}");
            if let Some(pc) = &self.per_coset {
                for row in pc {
                    let _ = write!(out, ",{}", row[k]);
                }
            }
            let _ = writeln!(out, ",{}", self.saturated);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Counts elements of depth at most `config.depth`, optionally split by coset.
pub fn census(spec: &GroupSpec, config: &CensusConfig, cosets: Option<&CosetTable<'_>>) -> Result<DepthCensus> {
    let n = config.depth;
    let mut store = PortraitStore::new(spec)?;
    let identity = store.leaf(spec.identity_index());
    let alphabet: Vec<ElementId> = match &config.alphabet {
        Some(order) => {
            let mut seen = HashSet::default();
            for &i in order {
                if i >= spec.nucleus().len() || !seen.insert(i) {
                    return Err(Error::InvalidSpec(format!("bad census alphabet entry {i}")));
                }
            }
            order.iter().filter(|&&i| i != spec.identity_index()).map(|&i| store.leaf(i)).collect()
        }
        None => (0..spec.nucleus().len()).filter(|&i| i != spec.identity_index()).map(|i| store.leaf(i)).collect(),
    };

    let mut counts = vec![0u64; n + 1];
    let ncos = cosets.map_or(0, CosetTable::len);
    let mut coset_counts = vec![vec![0u64; n + 1]; ncos];
    let mut record = |store: &PortraitStore, g: ElementId, counts: &mut Vec<u64>| -> Result<bool> {
        let d = store.depth(g);
        if d > n {
            return Ok(false);
        }
        counts[d] += 1;
        if let Some(ct) = cosets {
            let action = ct.actions().portrait(&store.portrait(g), ct.actions().level());
            let t = ct.classify_action(&action).map_err(|hits| {
                if hits.is_empty() {
                    Error::NoCoset(format!("{:?}", store.portrait(g)))
                } else {
                    Error::AmbiguousTransversal { word: format!("{:?}", store.portrait(g)), indices: hits }
                }
            })?;
            coset_counts[t][d] += 1;
        }
        Ok(true)
    };

    let mut visited: HashSet<ElementId> = HashSet::default();
    let mut radius = 0usize;
    let mut quiet = 0usize;
    let mut saturated = true;
    match config.strategy {
        Strategy::WordBfs => {
            visited.insert(identity);
            record(&store, identity, &mut counts)?;
            let mut frontier = vec![identity];
            while !frontier.is_empty() && quiet < config.patience {
                if radius >= config.radius_cap {
                    saturated = false;
                    break;
                }
                radius += 1;
                let mut next = Vec::new();
                let mut found = false;
                for &g in &frontier {
                    if config.expand_depth_limit.is_some_and(|lim| store.depth(g) > lim) {
                        continue;
                    }
                    for &s in &alphabet {
                        let h = store.mul_uncached(g, s);
                        if visited.insert(h) {
                            if visited.len() > config.max_elements {
                                return Err(Error::MemoryBudgetExceeded(config.max_elements));
                            }
                            found |= record(&store, h, &mut counts)?;
                            next.push(h);
                        }
                    }
                }
                quiet = if found { 0 } else { quiet + 1 };
                frontier = next;
                store.clear_memo();
            }
        }
        Strategy::ProductClosure => {
            let limit = config.expand_depth_limit.unwrap_or(n).max(n);
            let mut found: Vec<ElementId> = vec![identity];
            visited.insert(identity);
            record(&store, identity, &mut counts)?;
            for &s in &alphabet {
                if visited.insert(s) {
                    record(&store, s, &mut counts)?;
                    found.push(s);
                }
            }
            let mut done = 0usize;
            while done < found.len() {
                if radius >= config.radius_cap {
                    saturated = false;
                    break;
                }
                radius += 1;
                let round_end = found.len();
                for i in done..round_end {
                    let x = found[i];
                    let mut j = 0;
                    while j <= i {
                        let y = found[j];
                        for (l, r) in [(x, y), (y, x)] {
                            let Some(h) = store.mul_bounded(l, r, limit) else { continue };
                            if visited.insert(h) {
                                if visited.len() > config.max_elements {
                                    return Err(Error::MemoryBudgetExceeded(config.max_elements));
                                }
                                record(&store, h, &mut counts)?;
                                found.push(h);
                            }
                        }
                        j += 1;
                    }
                }
                done = round_end;
                store.clear_memo();
            }
        }
    }

    let cumulative = |row: &[u64]| -> Vec<BigUint> {
        row.iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(BigUint::from(*acc))
            })
            .collect()
    };
    Ok(DepthCensus {
        group: spec.name().to_string(),
        depth: n,
        totals: cumulative(&counts),
        per_coset: cosets.map(|_| coset_counts.iter().map(|r| cumulative(r)).collect()),
        coset_labels: cosets.map(|ct| ct.transversal().iter().map(|t| spec.format_word(t)).collect()),
        final_radius: radius,
        patience_used: quiet,
        saturated,
        elements_visited: visited.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{apollonian, ggs, grigorchuk, GgsVector};

    fn totals(c: &DepthCensus) -> Vec<u64> {
        c.totals.iter().map(|x| x.try_into().unwrap()).collect()
    }

    #[test]
    fn grigorchuk_depth_two() {
        let c = census(&grigorchuk(), &CensusConfig::new(2), None).unwrap();
        assert_eq!(totals(&c), [5, 16, 68]);
        assert!(c.saturated);
    }

    #[test]
    fn ggs_depth_one() {
        let spec = ggs(&GgsVector::new(3, vec![1, 2]).unwrap());
        let cfg = CensusConfig::new(1).strategy(Strategy::ProductClosure).prune_slack(1);
        let c = census(&spec, &cfg, None).unwrap();
        assert_eq!(totals(&c), [5, 27]);
        assert!(c.saturated);
    }

    #[test]
    fn letter_search_misses_far_elements() {
        // (b, b, b) lies in the group but only behind long words.
        let spec = ggs(&GgsVector::new(3, vec![1, 2]).unwrap());
        let c = census(&spec, &CensusConfig::new(1), None).unwrap();
        assert_eq!(totals(&c), [5, 21]);
    }

    #[test]
    fn apollonian_depth_one() {
        let cfg = CensusConfig::new(1).strategy(Strategy::ProductClosure);
        let c = census(&apollonian(), &cfg, None).unwrap();
        assert_eq!(totals(&c), [7, 1029]);
        assert!(c.saturated);
    }

    #[test]
    fn strategies_agree_on_grigorchuk() {
        let g = grigorchuk();
        let closure = census(&g, &CensusConfig::new(3).strategy(Strategy::ProductClosure), None).unwrap();
        assert_eq!(totals(&closure), [5, 16, 68, 1160]);
        let bfs = census(&g, &CensusConfig::new(2), None).unwrap();
        assert_eq!(bfs.totals[..], closure.totals[..3]);
    }

    #[test]
    fn alphabet_order_does_not_matter() {
        let g = grigorchuk();
        let a = census(&g, &CensusConfig::new(2), None).unwrap();
        let b = census(&g, &CensusConfig::new(2).alphabet(vec![4, 3, 0, 2, 1]), None).unwrap();
        assert_eq!(a.totals, b.totals);
        assert!(census(&g, &CensusConfig::new(1).alphabet(vec![1, 1]), None).is_err());
    }

    #[test]
    fn budgets() {
        let g = grigorchuk();
        assert_eq!(census(&g, &CensusConfig::new(2).max_elements(50), None), Err(Error::MemoryBudgetExceeded(50)));
        let c = census(&g, &CensusConfig::new(2).radius_cap(2), None).unwrap();
        assert!(!c.saturated);
        assert_eq!(c.final_radius, 2);
    }

    #[test]
    fn csv_layout() {
        let c = census(&grigorchuk(), &CensusConfig::new(1), None).unwrap();
        let csv = c.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,a_n,saturated");
        assert_eq!(lines[2], "1,16,true");
    }
}
