//! Self-similar groups given by wreath recursions.
//!
//! An element is a [`Word`] over the generators. Every generator carries a root
//! permutation and one section word per first-level vertex. Products act with the
//! left factor first: `perm(gh) = perm(g).then(perm(h))` and `(gh)_u = g_u h_{g(u)}`.
//! Sections of inverse letters follow from `(g^-1)_u = (g_{g^-1(u)})^-1`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::word::{format_word, inverse_word, parse_word, Letter, Word};

/// Default bound on distinct section words visited by [`GroupSpec::is_trivial`].
pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub symbol: String,
    pub perm: Permutation,
    pub sections: Vec<Word>,
}

/// A vertex of the rooted tree, stored as a 0-based path.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Vertex(pub Vec<usize>);

impl Vertex {
    pub fn root() -> Self {
        Vertex(Vec::new())
    }

    /// Parses 1-based digit paths such as `21`; the empty string or `root` is the root.
    pub fn parse(text: &str, degree: usize) -> Result<Self> {
        let t = text.trim();
        if t.is_empty() || t.eq_ignore_ascii_case("root") {
            return Ok(Vertex::root());
        }
        let path = t
            .chars()
            .filter(|c| !matches!(c, ' ' | ','))
            .map(|c| match c.to_digit(10) {
                Some(x) if x >= 1 && (x as usize) <= degree => Ok(x as usize - 1),
                _ => Err(Error::BadVertex(t.to_string(), degree)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Vertex(path))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        for x in &self.0 {
            write!(f, "{}", x + 1)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GroupSpec {
    name: String,
    degree: usize,
    generators: Vec<Generator>,
    nucleus: Vec<Word>,
    symbols: Vec<String>,
    // indexed by [gen][inverse as usize]
    letter_perms: Vec<[Permutation; 2]>,
    letter_sections: Vec<[Vec<Word>; 2]>,
}

impl GroupSpec {
    /// Builds a spec, checking its structure. Semantic nucleus properties are
    /// checked separately (see `catalog::validate_contraction`).
    pub fn new(name: impl Into<String>, degree: usize, generators: Vec<Generator>, nucleus: Vec<Word>) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidSpec(format!("degree {degree} < 2")));
        }
        if generators.is_empty() || generators.len() > u16::MAX as usize {
            return Err(Error::InvalidSpec("need at least one generator".into()));
        }
        let symbols: Vec<String> = generators.iter().map(|g| g.symbol.clone()).collect();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.contains(|c: char| c.is_whitespace() || "()^".contains(c)) {
                return Err(Error::InvalidSpec(format!("bad generator symbol `{s}`")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidSpec(format!("duplicate generator symbol `{s}`")));
            }
        }
        for g in &generators {
            if g.perm.degree() != degree || g.sections.len() != degree {
                return Err(Error::InvalidSpec(format!("generator `{}` does not match degree {degree}", g.symbol)));
            }
            for w in &g.sections {
                if w.0.iter().any(|l| l.gen as usize >= generators.len()) {
                    return Err(Error::InvalidSpec(format!("section of `{}` uses an undeclared generator", g.symbol)));
                }
            }
        }
        if !nucleus.iter().any(Word::is_empty) {
            return Err(Error::InvalidSpec("nucleus must contain the empty word".into()));
        }
        if nucleus.iter().flat_map(|w| w.0.iter()).any(|l| l.gen as usize >= generators.len()) {
            return Err(Error::InvalidSpec("nucleus word uses an undeclared generator".into()));
        }
        let letter_perms = generators.iter().map(|g| [g.perm.clone(), g.perm.inverse()]).collect();
        let letter_sections = generators
            .iter()
            .map(|g| {
                let inv = g.perm.inverse();
                let inv_sections = (0..degree).map(|u| inverse_word(&g.sections[inv.apply(u)])).collect();
                [g.sections.clone(), inv_sections]
            })
            .collect();
        Ok(GroupSpec { name: name.into(), degree, generators, nucleus, symbols, letter_perms, letter_sections })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn nucleus(&self) -> &[Word] {
        &self.nucleus
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    /// Index of the empty word inside the nucleus.
    pub fn identity_index(&self) -> usize {
        self.nucleus.iter().position(Word::is_empty).expect("checked at construction")
    }

    /// Same group with a different declared nucleus.
    pub fn with_nucleus(&self, nucleus: Vec<Word>) -> Result<Self> {
        GroupSpec::new(self.name.clone(), self.degree, self.generators.clone(), nucleus)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(&self.symbols, text)
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word(&self.symbols, w)
    }

    fn check(&self, w: &Word) -> Result<()> {
        match w.0.iter().find(|l| l.gen as usize >= self.generators.len()) {
            Some(l) => Err(Error::UnknownSymbol(l.to_string())),
            None => Ok(()),
        }
    }

    #[inline]
    pub fn letter_perm(&self, l: Letter) -> &Permutation {
        &self.letter_perms[l.gen as usize][l.inverse as usize]
    }

    #[inline]
    pub fn letter_section(&self, l: Letter, u: usize) -> &Word {
        &self.letter_sections[l.gen as usize][l.inverse as usize][u]
    }

    pub fn root_permutation(&self, w: &Word) -> Result<Permutation> {
        self.check(w)?;
        Ok(self.root_perm_unchecked(w))
    }

    fn root_perm_unchecked(&self, w: &Word) -> Permutation {
        let mut images: Vec<usize> = (0..self.degree).collect();
        for &l in &w.0 {
            let p = self.letter_perm(l);
            for x in images.iter_mut() {
                *x = p.apply(*x);
            }
        }
        Permutation::from_images(images).expect("composition of bijections")
    }

    /// First-level sections `w_1, ..., w_d` (0-based vector index).
    pub fn sections(&self, w: &Word) -> Result<Vec<Word>> {
        self.check(w)?;
        Ok(self.sections_unchecked(w))
    }

    fn sections_unchecked(&self, w: &Word) -> Vec<Word> {
        (0..self.degree)
            .map(|u| {
                let mut v = u;
                let mut out = Vec::new();
                for &l in &w.0 {
                    out.extend_from_slice(&self.letter_section(l, v).0);
                    v = self.letter_perm(l).apply(v);
                }
                Word(out)
            })
            .collect()
    }

    /// Root permutation and sections in one pass.
    pub fn decompose(&self, w: &Word) -> Result<(Permutation, Vec<Word>)> {
        self.check(w)?;
        Ok((self.root_perm_unchecked(w), self.sections_unchecked(w)))
    }

    pub fn section_at(&self, w: &Word, v: &Vertex) -> Result<Word> {
        self.check(w)?;
        if v.0.iter().any(|&x| x >= self.degree) {
            return Err(Error::BadVertex(v.to_string(), self.degree));
        }
        let mut cur = w.clone();
        for &x in &v.0 {
            let mut out = Vec::new();
            let mut u = x;
            for &l in &cur.0 {
                out.extend_from_slice(&self.letter_section(l, u).0);
                u = self.letter_perm(l).apply(u);
            }
            cur = Word(out);
        }
        Ok(cur)
    }

    pub fn is_trivial(&self, w: &Word) -> Result<bool> {
        self.is_trivial_with_budget(w, DEFAULT_STATE_BUDGET)
    }

    /// Decides triviality as a greatest fixed point: `w` is trivial iff no section word
    /// reachable from it has a nontrivial root permutation. States are freely reduced words.
    pub fn is_trivial_with_budget(&self, w: &Word, budget: usize) -> Result<bool> {
        self.check(w)?;
        let start = w.freely_reduced();
        let mut seen: HashSet<Word> = HashSet::new();
        let mut stack = vec![start.clone()];
        seen.insert(start);
        while let Some(cur) = stack.pop() {
            if cur.is_empty() {
                continue;
            }
            if !self.root_perm_unchecked(&cur).is_identity() {
                return Ok(false);
            }
            for s in self.sections_unchecked(&cur) {
                let s = s.freely_reduced();
                if !seen.contains(&s) {
                    if seen.len() >= budget {
                        return Err(Error::StateSpaceBudgetExceeded(budget));
                    }
                    seen.insert(s.clone());
                    stack.push(s);
                }
            }
        }
        Ok(true)
    }

    pub fn are_equal(&self, w1: &Word, w2: &Word) -> Result<bool> {
        self.is_trivial(&w1.concat(&inverse_word(w2)))
    }

    /// Index of the nucleus element equal to `w`, if any.
    pub fn nucleus_index(&self, w: &Word) -> Result<Option<usize>> {
        let perm = self.root_permutation(w)?;
        for (i, nu) in self.nucleus.iter().enumerate() {
            if self.root_perm_unchecked(nu) == perm && self.are_equal(w, nu)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    pub fn to_file(&self) -> GroupSpecFile {
        GroupSpecFile {
            name: self.name.clone(),
            degree: self.degree,
            generators: self
                .generators
                .iter()
                .map(|g| GeneratorFile {
                    symbol: g.symbol.clone(),
                    perm: g.perm.one_based(),
                    sections: g.sections.iter().map(|w| self.format_word(w)).collect(),
                })
                .collect(),
            nucleus: self.nucleus.iter().map(|w| self.format_word(w)).collect(),
        }
    }

    pub fn from_file(file: &GroupSpecFile) -> Result<Self> {
        let symbols: Vec<String> = file.generators.iter().map(|g| g.symbol.clone()).collect();
        let generators = file
            .generators
            .iter()
            .map(|g| {
                Ok(Generator {
                    symbol: g.symbol.clone(),
                    perm: Permutation::from_one_based(&g.perm)?,
                    sections: g.sections.iter().map(|s| parse_word(&symbols, s)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let nucleus = file.nucleus.iter().map(|s| parse_word(&symbols, s)).collect::<Result<Vec<_>>>()?;
        GroupSpec::new(file.name.clone(), file.degree, generators, nucleus)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

/// On-disk group spec: `{"name", "degree", "generators":[{"symbol","perm","sections"}], "nucleus"}`.
/// Permutation images are 1-based; words use the text syntax of [`crate::word`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpecFile {
    pub name: String,
    pub degree: usize,
    pub generators: Vec<GeneratorFile>,
    pub nucleus: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub symbol: String,
    pub perm: Vec<usize>,
    pub sections: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{apollonian, ggs, grigorchuk, GgsVector};

    #[test]
    fn root_permutations() {
        let g = grigorchuk();
        assert_eq!(g.root_permutation(&g.parse_word("a").unwrap()).unwrap().to_string(), "(1 2)");
        assert!(g.root_permutation(&Word::empty()).unwrap().is_identity());
        let ap = apollonian();
        assert_eq!(ap.root_permutation(&ap.parse_word("yx").unwrap()).unwrap().to_string(), "(1 3 2)");
    }

    #[test]
    fn sections_follow_left_first_convention() {
        let g = grigorchuk();
        let fmt = |ws: Vec<Word>| ws.iter().map(|w| g.format_word(w)).collect::<Vec<_>>();
        assert_eq!(fmt(g.sections(&g.parse_word("b").unwrap()).unwrap()), ["a", "c"]);
        assert_eq!(fmt(g.sections(&g.parse_word("abab").unwrap()).unwrap()), ["ca", "ac"]);
        let s = ggs(&GgsVector::new(3, vec![1, 2]).unwrap());
        let secs: Vec<String> = s.sections(&s.parse_word("b").unwrap()).unwrap().iter().map(|w| s.format_word(w)).collect();
        assert_eq!(secs, ["b", "a", "aa"]);
    }

    #[test]
    fn section_at_paths() {
        let g = grigorchuk();
        let w = g.parse_word("bacac").unwrap();
        assert_eq!(g.section_at(&w, &Vertex::root()).unwrap(), w);
        let d = g.parse_word("d").unwrap();
        assert_eq!(g.format_word(&g.section_at(&d, &Vertex::parse("2", 2).unwrap()).unwrap()), "b");
        // Figure-2 portrait: leaf c sits at vertex 211, the node (1 2)[c, a] = ab at vertex 21.
        let s211 = g.section_at(&w, &Vertex::parse("211", 2).unwrap()).unwrap();
        assert!(g.are_equal(&s211, &g.parse_word("c").unwrap()).unwrap());
        let s21 = g.section_at(&w, &Vertex::parse("21", 2).unwrap()).unwrap();
        assert!(g.are_equal(&s21, &g.parse_word("ab").unwrap()).unwrap());
        assert!(matches!(g.section_at(&w, &Vertex(vec![2])), Err(Error::BadVertex(..))));
        assert!(Vertex::parse("3", 2).is_err());
    }

    #[test]
    fn triviality_examples() {
        let g = grigorchuk();
        let t = |s: &str| g.is_trivial(&g.parse_word(s).unwrap()).unwrap();
        assert!(t("dd"));
        assert!(!t("a"));
        assert!(t("bcd"));
        assert!(t("aa"));
        assert!(t(""));
        assert!(!t("ad"));
        let w = g.parse_word("a").unwrap();
        assert!(g.are_equal(&w, &inverse_word(&w)).unwrap());
    }

    #[test]
    fn equality_examples() {
        let g = grigorchuk();
        let eq = |a: &str, b: &str| g.are_equal(&g.parse_word(a).unwrap(), &g.parse_word(b).unwrap()).unwrap();
        assert!(eq("dada", "adad"));
        assert!(eq("bacac", "bacac"));
        assert!(!eq("b", "c"));
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let g = grigorchuk();
        let w = g.parse_word("abacabadabacabad").unwrap();
        assert_eq!(g.is_trivial_with_budget(&w, 1), Err(Error::StateSpaceBudgetExceeded(1)));
    }

    #[test]
    fn spec_json_round_trip() {
        for spec in [grigorchuk(), apollonian(), ggs(&GgsVector::new(5, vec![1, 0, 2, 0]).unwrap())] {
            let back = GroupSpec::from_json(&spec.to_json()).unwrap();
            assert_eq!(back.to_file(), spec.to_file());
        }
        let bad = r#"{"name":"x","degree":2,"generators":[{"symbol":"a","perm":[1,1],"sections":["",""]}],"nucleus":[""]}"#;
        assert!(GroupSpec::from_json(bad).is_err());
        let no_identity = r#"{"name":"x","degree":2,"generators":[{"symbol":"a","perm":[2,1],"sections":["",""]}],"nucleus":["a"]}"#;
        assert!(matches!(GroupSpec::from_json(no_identity), Err(Error::InvalidSpec(_))));
    }
}
