//! Finite quotients `G / st_G(m)`: the action of elements on the first `m` levels.
//!
//! Membership in a finite-index subgroup `K` is decided in the image at level `m`,
//! which is exact whenever `st_G(m) <= K`. The computed index of `K` is reported so
//! callers can compare it against the known index before trusting a classification.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::portrait::Portrait;
use crate::word::{inverse_word, Letter, Word};

/// Default bound on the size of finite images.
pub const DEFAULT_SIZE_BUDGET: usize = 1_000_000;

/// Permutation of the `d^m` vertices of level `m`. Vertex `x_1 ... x_m` has index
/// `sum x_i d^(m-i)`, so the action on shallower levels is obtained by integer division.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LevelPermutation {
    degree: u32,
    level: u32,
    map: Vec<u32>,
}

impl LevelPermutation {
    pub fn identity(degree: usize, level: usize) -> Self {
        let n = degree.pow(level as u32);
        LevelPermutation { degree: degree as u32, level: level as u32, map: (0..n as u32).collect() }
    }

    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    pub fn level(&self) -> usize {
        self.level as usize
    }

    pub fn map(&self) -> &[u32] {
        &self.map
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v] as usize
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &LevelPermutation) -> LevelPermutation {
        debug_assert_eq!(self.map.len(), other.map.len());
        LevelPermutation {
            degree: self.degree,
            level: self.level,
            map: self.map.iter().map(|&v| other.map[v as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> LevelPermutation {
        let mut inv = vec![0u32; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j as usize] = i as u32;
        }
        LevelPermutation { degree: self.degree, level: self.level, map: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i as u32 == j)
    }

    /// Induced action on level `k <= m`.
    pub fn project(&self, k: usize) -> LevelPermutation {
        assert!(k <= self.level());
        let d = self.degree();
        let step = d.pow((self.level() - k) as u32);
        let n = d.pow(k as u32);
        LevelPermutation {
            degree: self.degree,
            level: k as u32,
            map: (0..n).map(|v| (self.map[v * step] as usize / step) as u32).collect(),
        }
    }

    /// For an element fixing level 1: the action of its section at first-level
    /// vertex `x` on levels `1..m-1` of the subtree.
    pub fn restrict(&self, x: usize) -> Option<LevelPermutation> {
        let block = self.degree().pow(self.level - 1);
        let base = x * block;
        let mut map = Vec::with_capacity(block);
        for v in 0..block {
            let img = self.map[base + v] as usize;
            if img / block != x {
                return None;
            }
            map.push((img - base) as u32);
        }
        Some(LevelPermutation { degree: self.degree, level: self.level - 1, map })
    }

    fn from_parts(degree: usize, level: usize, root: &[usize], children: &[&LevelPermutation]) -> Self {
        let block = degree.pow(level as u32 - 1);
        let mut map = vec![0u32; block * degree];
        for x in 0..degree {
            for r in 0..block {
                map[x * block + r] = (root[x] * block + children[x].map[r] as usize) as u32;
            }
        }
        LevelPermutation { degree: degree as u32, level: level as u32, map }
    }
}

/// Cached level-`m` actions of the letters of one spec.
pub struct LevelActions<'a> {
    spec: &'a GroupSpec,
    level: usize,
    // [level][gen][inverse]
    letters: Vec<Vec<[LevelPermutation; 2]>>,
}

impl<'a> LevelActions<'a> {
    pub fn new(spec: &'a GroupSpec, level: usize) -> Self {
        let d = spec.degree();
        let ngen = spec.generators().len();
        let mut letters: Vec<Vec<[LevelPermutation; 2]>> = Vec::with_capacity(level + 1);
        letters.push(
            (0..ngen).map(|_| [LevelPermutation::identity(d, 0), LevelPermutation::identity(d, 0)]).collect(),
        );
        for m in 1..=level {
            let prev = &letters[m - 1];
            let word_action = |w: &Word| {
                w.0.iter().fold(LevelPermutation::identity(d, m - 1), |acc, l| acc.then(&prev[l.gen as usize][l.inverse as usize]))
            };
            let row = (0..ngen)
                .map(|g| {
                    let mk = |inverse: bool| {
                        let l = Letter::new(g, inverse);
                        let kids: Vec<LevelPermutation> = (0..d).map(|x| word_action(spec.letter_section(l, x))).collect();
                        let refs: Vec<&LevelPermutation> = kids.iter().collect();
                        LevelPermutation::from_parts(d, m, spec.letter_perm(l).images(), &refs)
                    };
                    [mk(false), mk(true)]
                })
                .collect();
            letters.push(row);
        }
        LevelActions { spec, level, letters }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn spec(&self) -> &GroupSpec {
        self.spec
    }

    pub fn letter(&self, l: Letter) -> &LevelPermutation {
        &self.letters[self.level][l.gen as usize][l.inverse as usize]
    }

    pub fn word(&self, w: &Word) -> LevelPermutation {
        self.word_at(w, self.level)
    }

    pub fn word_at(&self, w: &Word, level: usize) -> LevelPermutation {
        let acts = &self.letters[level];
        w.0.iter().fold(LevelPermutation::identity(self.spec.degree(), level), |acc, l| {
            acc.then(&acts[l.gen as usize][l.inverse as usize])
        })
    }

    /// Level action of an element given by its portrait.
    pub fn portrait(&self, p: &Portrait, level: usize) -> LevelPermutation {
        let d = self.spec.degree();
        match p {
            Portrait::Leaf(i) => self.word_at(&self.spec.nucleus()[*i], level),
            _ if level == 0 => LevelPermutation::identity(d, 0),
            Portrait::Node(perm, kids) => {
                let acts: Vec<LevelPermutation> = kids.iter().map(|k| self.portrait(k, level - 1)).collect();
                let refs: Vec<&LevelPermutation> = acts.iter().collect();
                LevelPermutation::from_parts(d, level, perm.images(), &refs)
            }
        }
    }
}

/// The permutation `w` induces on levels `1..=m`.
pub fn truncated_action(spec: &GroupSpec, w: &Word, m: usize) -> LevelPermutation {
    LevelActions::new(spec, m).word(w)
}

fn closure(gens: &[LevelPermutation], start: LevelPermutation, budget: usize) -> Result<Vec<LevelPermutation>> {
    let mut index: HashMap<LevelPermutation, usize> = HashMap::new();
    let mut elements = vec![start.clone()];
    index.insert(start, 0);
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let next = elements[i].then(g);
            if !index.contains_key(&next) {
                if elements.len() >= budget {
                    return Err(Error::SizeBudgetExceeded(budget));
                }
                index.insert(next.clone(), elements.len());
                elements.push(next);
            }
        }
        i += 1;
    }
    Ok(elements)
}

/// Image at level `m` of the normal closure of some seed words.
#[derive(Clone, Debug)]
pub struct QuotientTable {
    level: usize,
    seeds: Vec<String>,
    elements: Vec<LevelPermutation>,
    members: HashMap<LevelPermutation, usize>,
    generator_images: Vec<LevelPermutation>,
    ambient_order: usize,
}

impl QuotientTable {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn seeds(&self) -> &[String] {
        &self.seeds
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[LevelPermutation] {
        &self.elements
    }

    pub fn generator_images(&self) -> &[LevelPermutation] {
        &self.generator_images
    }

    /// Order of the image of the whole group at this level.
    pub fn ambient_order(&self) -> usize {
        self.ambient_order
    }

    pub fn ambient_index(&self) -> usize {
        self.ambient_order / self.elements.len()
    }

    pub fn contains(&self, a: &LevelPermutation) -> bool {
        self.members.contains_key(a)
    }

    /// Re-checks closure under products and under conjugation by the generators.
    pub fn certify(&self) -> bool {
        let has_identity = self.elements.iter().any(LevelPermutation::is_identity);
        let products = self.elements.iter().all(|x| self.elements.iter().all(|y| self.contains(&x.then(y))));
        let conjugates = self
            .elements
            .iter()
            .all(|x| self.generator_images.iter().all(|g| self.contains(&g.inverse().then(x).then(g))));
        has_identity && products && conjugates
    }

    pub fn to_record(&self) -> QuotientRecord {
        QuotientRecord {
            level: self.level,
            seeds: self.seeds.clone(),
            element_count: self.order(),
            ambient_order: self.ambient_order,
            ambient_index: self.ambient_index(),
        }
    }

    /// Rebuilds a table from its record and checks the recorded counts.
    pub fn from_record(spec: &GroupSpec, rec: &QuotientRecord) -> Result<Self> {
        let seeds = rec.seeds.iter().map(|s| spec.parse_word(s)).collect::<Result<Vec<_>>>()?;
        let table = normal_closure_image(spec, &seeds, rec.level)?;
        if table.order() != rec.element_count || table.ambient_index() != rec.ambient_index {
            return Err(Error::Json(format!(
                "recorded quotient has {} elements and index {}, recomputed {} and {}",
                rec.element_count,
                rec.ambient_index,
                table.order(),
                table.ambient_index()
            )));
        }
        Ok(table)
    }
}

/// JSON form of a [`QuotientTable`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientRecord {
    pub level: usize,
    pub seeds: Vec<String>,
    pub element_count: usize,
    pub ambient_order: usize,
    pub ambient_index: usize,
}

pub fn normal_closure_image(spec: &GroupSpec, seeds: &[Word], m: usize) -> Result<QuotientTable> {
    normal_closure_image_with_budget(spec, seeds, m, DEFAULT_SIZE_BUDGET)
}

pub fn normal_closure_image_with_budget(
    spec: &GroupSpec,
    seeds: &[Word],
    m: usize,
    budget: usize,
) -> Result<QuotientTable> {
    let acts = LevelActions::new(spec, m);
    let d = spec.degree();
    let id = LevelPermutation::identity(d, m);
    let generator_images: Vec<LevelPermutation> =
        (0..spec.generators().len()).map(|g| acts.letter(Letter::new(g, false)).clone()).collect();
    let ambient_order = closure(&generator_images, id.clone(), budget)?.len();

    let mut gens: Vec<LevelPermutation> = seeds.iter().map(|w| acts.word(w)).filter(|a| !a.is_identity()).collect();
    let mut elements = closure(&gens, id.clone(), budget)?;
    loop {
        let members: HashMap<&LevelPermutation, ()> = elements.iter().map(|e| (e, ())).collect();
        let mut fresh = Vec::new();
        for g in &generator_images {
            let g_inv = g.inverse();
            for k in &gens {
                let c = g_inv.then(k).then(g);
                if !members.contains_key(&c) && !fresh.contains(&c) {
                    fresh.push(c);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        gens.extend(fresh);
        elements = closure(&gens, id.clone(), budget)?;
    }
    let members = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    Ok(QuotientTable {
        level: m,
        seeds: seeds.iter().map(|w| spec.format_word(w)).collect(),
        elements,
        members,
        generator_images,
        ambient_order,
    })
}

/// Classifies group elements into left cosets `t_i K` of a transversal.
pub struct CosetTable<'a> {
    actions: LevelActions<'a>,
    quotient: &'a QuotientTable,
    transversal: Vec<Word>,
    inverse_images: Vec<LevelPermutation>,
}

impl<'a> CosetTable<'a> {
    /// Checks that the transversal hits pairwise distinct cosets, and all of them.
    pub fn new(spec: &'a GroupSpec, quotient: &'a QuotientTable, transversal: &[Word]) -> Result<Self> {
        let actions = LevelActions::new(spec, quotient.level());
        let inverse_images: Vec<LevelPermutation> =
            transversal.iter().map(|t| actions.word(&inverse_word(t))).collect();
        let images: Vec<LevelPermutation> = transversal.iter().map(|t| actions.word(t)).collect();
        for i in 0..images.len() {
            for j in i + 1..images.len() {
                if quotient.contains(&inverse_images[i].then(&images[j])) {
                    return Err(Error::BadTransversal(format!(
                        "`{}` and `{}` lie in the same coset",
                        spec.format_word(&transversal[i]),
                        spec.format_word(&transversal[j])
                    )));
                }
            }
        }
        if images.len() != quotient.ambient_index() {
            return Err(Error::BadTransversal(format!(
                "{} representatives for a subgroup of index {}",
                images.len(),
                quotient.ambient_index()
            )));
        }
        Ok(CosetTable { actions, quotient, transversal: transversal.to_vec(), inverse_images })
    }

    pub fn len(&self) -> usize {
        self.transversal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transversal.is_empty()
    }

    pub fn transversal(&self) -> &[Word] {
        &self.transversal
    }

    pub fn actions(&self) -> &LevelActions<'a> {
        &self.actions
    }

    pub fn quotient(&self) -> &QuotientTable {
        self.quotient
    }

    pub fn classify_action(&self, a: &LevelPermutation) -> std::result::Result<usize, Vec<usize>> {
        let hits: Vec<usize> = self
            .inverse_images
            .iter()
            .enumerate()
            .filter(|(_, t_inv)| self.quotient.contains(&t_inv.then(a)))
            .map(|(i, _)| i)
            .collect();
        if hits.len() == 1 {
            Ok(hits[0])
        } else {
            Err(hits)
        }
    }

    pub fn classify(&self, w: &Word) -> Result<usize> {
        let spec = self.actions.spec();
        self.classify_action(&self.actions.word(w)).map_err(|hits| {
            if hits.is_empty() {
                Error::NoCoset(spec.format_word(w))
            } else {
                Error::AmbiguousTransversal { word: spec.format_word(w), indices: hits }
            }
        })
    }
}

/// Index `i` with `t_i^-1 w` in `K` (decided at the quotient's level).
pub fn coset_of(spec: &GroupSpec, w: &Word, k: &QuotientTable, transversal: &[Word]) -> Result<usize> {
    CosetTable::new(spec, k, transversal)?.classify(w)
}

/// Coset of the even-length subgroup containing `w`: 0 for even length, 1 for odd.
pub fn word_length_parity(w: &Word) -> usize {
    w.len() % 2
}

/// Seeds `[g_i, g_j]` for all pairs of generators; their normal closure is `G'`.
pub fn commutator_seeds(spec: &GroupSpec) -> Vec<Word> {
    let n = spec.generators().len();
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (Word::letter(i), Word::letter(j));
            seeds.push(inverse_word(&a).concat(&inverse_word(&b)).concat(&a).concat(&b));
        }
    }
    seeds
}

/// `|K : psi^-1(K x ... x K)|`, computed from the normal closure of the same seeds at
/// level `m + 1`. Exact when `st_G(m) <= K`.
pub fn pullback_index(spec: &GroupSpec, k: &QuotientTable) -> Result<usize> {
    let seeds = k.seeds.iter().map(|s| spec.parse_word(s)).collect::<Result<Vec<_>>>()?;
    let upper = normal_closure_image(spec, &seeds, k.level + 1)?;
    let d = spec.degree();
    let inside = upper
        .elements()
        .iter()
        .filter(|e| (0..d).all(|x| e.restrict(x).is_some_and(|r| k.contains(&r))))
        .count();
    Ok(upper.order() / inside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{apollonian, ggs, grigorchuk, GgsVector};

    #[test]
    fn truncated_action_examples() {
        let g = grigorchuk();
        let a = truncated_action(&g, &g.parse_word("a").unwrap(), 1);
        assert_eq!(a.map(), &[1, 0]);
        assert!(truncated_action(&g, &g.parse_word("dd").unwrap(), 3).is_identity());
        let ap = apollonian();
        assert_eq!(truncated_action(&ap, &ap.parse_word("z").unwrap(), 1).map(), &[0, 2, 1]);
    }

    #[test]
    fn projection_and_restriction() {
        let g = grigorchuk();
        let w = g.parse_word("bacabd").unwrap();
        let a3 = truncated_action(&g, &w, 3);
        assert_eq!(a3.project(2), truncated_action(&g, &w, 2));
        assert_eq!(a3.project(0), LevelPermutation::identity(2, 0));
        let b = g.parse_word("b").unwrap();
        let b3 = truncated_action(&g, &b, 3);
        assert_eq!(b3.restrict(0).unwrap(), truncated_action(&g, &g.parse_word("a").unwrap(), 2));
        assert_eq!(b3.restrict(1).unwrap(), truncated_action(&g, &g.parse_word("c").unwrap(), 2));
        assert!(truncated_action(&g, &g.parse_word("a").unwrap(), 2).restrict(0).is_none());
    }

    #[test]
    fn grigorchuk_k_has_index_16() {
        let g = grigorchuk();
        let seeds = vec![g.parse_word("a^-1b^-1ab").unwrap()];
        for m in [3, 4] {
            let k = normal_closure_image(&g, &seeds, m).unwrap();
            assert_eq!(k.ambient_index(), 16, "level {m}");
            assert!(k.certify());
        }
        let k3 = normal_closure_image(&g, &seeds, 3).unwrap();
        assert_eq!(pullback_index(&g, &k3).unwrap(), 4);
    }

    #[test]
    fn ggs_derived_subgroup_has_index_p_squared() {
        let s = ggs(&GgsVector::new(3, vec![1, 2]).unwrap());
        for m in [2, 3] {
            let k = normal_closure_image(&s, &commutator_seeds(&s), m).unwrap();
            assert_eq!(k.ambient_index(), 9, "level {m}");
        }
    }

    #[test]
    fn apollonian_even_subgroup() {
        let ap = apollonian();
        let seeds: Vec<Word> = ["xy", "yz", "xz", "xx"].iter().map(|s| ap.parse_word(s).unwrap()).collect();
        for m in [1, 2] {
            assert_eq!(normal_closure_image(&ap, &seeds, m).unwrap().ambient_index(), 2);
        }
        let e1 = normal_closure_image(&ap, &seeds, 1).unwrap();
        assert_eq!(pullback_index(&ap, &e1).unwrap(), 12);
        let t: Vec<Word> = ["1", "x"].iter().map(|s| ap.parse_word(s).unwrap()).collect();
        let table = CosetTable::new(&ap, &e1, &t).unwrap();
        for s in ["", "x", "yz", "xyz", "x^-1 y z^-1 x", "zzz"] {
            let w = ap.parse_word(s).unwrap();
            assert_eq!(table.classify(&w).unwrap(), word_length_parity(&w), "{s}");
        }
    }

    #[test]
    fn empty_seeds_give_trivial_table() {
        let g = grigorchuk();
        let k = normal_closure_image(&g, &[], 3).unwrap();
        assert_eq!(k.order(), 1);
        assert!(k.elements()[0].is_identity());
        assert_eq!(k.ambient_index(), k.ambient_order());
    }

    #[test]
    fn coset_examples() {
        let g = grigorchuk();
        let k = normal_closure_image(&g, &[g.parse_word("a^-1b^-1ab").unwrap()], 3).unwrap();
        let t: Vec<Word> = crate::catalog::GRIGORCHUK_T.iter().map(|s| g.parse_word(s).unwrap()).collect();
        let dac = coset_of(&g, &g.parse_word("dac").unwrap(), &k, &t).unwrap();
        let cad = coset_of(&g, &g.parse_word("cad").unwrap(), &k, &t).unwrap();
        assert_eq!(dac, cad);
        assert_eq!(coset_of(&g, &g.parse_word("b").unwrap(), &k, &t).unwrap(), 8);
    }

    #[test]
    fn bad_transversals_are_rejected() {
        let g = grigorchuk();
        let k = normal_closure_image(&g, &[g.parse_word("a^-1b^-1ab").unwrap()], 3).unwrap();
        let dup: Vec<Word> = ["1", "abab"].iter().map(|s| g.parse_word(s).unwrap()).collect();
        assert!(matches!(CosetTable::new(&g, &k, &dup), Err(Error::BadTransversal(_))));
        let short: Vec<Word> = ["1", "a"].iter().map(|s| g.parse_word(s).unwrap()).collect();
        assert!(matches!(CosetTable::new(&g, &k, &short), Err(Error::BadTransversal(_))));
    }

    #[test]
    fn no_coset_when_quotient_too_small() {
        // With K = {1} at level 1, only two cosets exist; a one-element transversal misses `a`.
        let g = grigorchuk();
        let k = normal_closure_image(&g, &[], 1).unwrap();
        let table = CosetTable { actions: LevelActions::new(&g, 1), quotient: &k, transversal: vec![Word::empty()], inverse_images: vec![LevelPermutation::identity(2, 1)] };
        assert!(matches!(table.classify(&g.parse_word("a").unwrap()), Err(Error::NoCoset(_))));
    }

    #[test]
    fn size_budget() {
        let g = grigorchuk();
        let r = normal_closure_image_with_budget(&g, &[g.parse_word("a^-1b^-1ab").unwrap()], 4, 10);
        assert_eq!(r.unwrap_err(), Error::SizeBudgetExceeded(10));
    }

    #[test]
    fn record_round_trip() {
        let g = grigorchuk();
        let k = normal_closure_image(&g, &[g.parse_word("a^-1b^-1ab").unwrap()], 3).unwrap();
        let json = serde_json::to_string(&k.to_record()).unwrap();
        let back = QuotientTable::from_record(&g, &serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.order(), k.order());
        let mut rec = k.to_record();
        rec.element_count += 1;
        assert!(QuotientTable::from_record(&g, &rec).is_err());
    }
}
