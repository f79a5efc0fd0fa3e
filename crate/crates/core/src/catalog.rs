//! The three group families: the first Grigorchuk group, GGS-groups and the
//! Apollonian group, plus nucleus validation for any spec.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Generator, GroupSpec, Vertex};
use crate::perm::Permutation;
use crate::word::{Letter, Word};

fn gen(spec_symbols: &[&str], symbol: &str, perm: Permutation, sections: &[&str]) -> Generator {
    let symbols: Vec<String> = spec_symbols.iter().map(|s| s.to_string()).collect();
    Generator {
        symbol: symbol.to_string(),
        perm,
        sections: sections.iter().map(|s| crate::word::parse_word(&symbols, s).expect("catalog word")).collect(),
    }
}

/// The first Grigorchuk group: `a` swaps the two subtrees, `b=(a,c)`, `c=(a,d)`, `d=(1,b)`.
pub fn grigorchuk() -> GroupSpec {
    let s = ["a", "b", "c", "d"];
    let swap = Permutation::from_cycles(2, "(1 2)").unwrap();
    let id = Permutation::identity(2);
    let generators = vec![
        gen(&s, "a", swap, &["", ""]),
        gen(&s, "b", id.clone(), &["a", "c"]),
        gen(&s, "c", id.clone(), &["a", "d"]),
        gen(&s, "d", id, &["", "b"]),
    ];
    let nucleus = vec![Word::empty(), Word::letter(0), Word::letter(1), Word::letter(2), Word::letter(3)];
    GroupSpec::new("grigorchuk", 2, generators, nucleus).expect("catalog spec")
}

/// Defining vector of a GGS-group: an odd prime `p` and `p-1` residues mod `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GgsVector {
    p: u64,
    e: Vec<u64>,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

impl GgsVector {
    /// Entries may be any integers; they are reduced mod `p` (so `-1` becomes `p-1`).
    pub fn new(p: u64, e: Vec<i64>) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        if e.len() != p as usize - 1 {
            return Err(Error::BadVectorLength { expected: p as usize - 1, got: e.len() });
        }
        let e: Vec<u64> = e.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect();
        if e.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector);
        }
        Ok(GgsVector { p, e })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// `e_1, ..., e_{p-1}` as residues.
    pub fn e(&self) -> &[u64] {
        &self.e
    }

    /// `e_i = e_{p-i}` for every `i`.
    pub fn is_symmetric(&self) -> bool {
        let n = self.e.len();
        (0..n).all(|i| self.e[i] == self.e[n - 1 - i])
    }
}

pub fn is_symmetric(e: &GgsVector) -> bool {
    e.is_symmetric()
}

/// The GGS-group of `e`: `a` is the rooted cycle `(1 ... p)` and `b = (b, a^e1, ..., a^e_{p-1})`.
/// The nucleus is `{1, a, ..., a^{p-1}, b, ..., b^{p-1}}`.
pub fn ggs(e: &GgsVector) -> GroupSpec {
    let p = e.p() as usize;
    let cycle = Permutation::from_images((0..p).map(|i| (i + 1) % p).collect()).unwrap();
    let a = Generator { symbol: "a".into(), perm: cycle, sections: vec![Word::empty(); p] };
    let mut b_sections = vec![Word::letter(1)];
    b_sections.extend(e.e().iter().map(|&k| Word::letter(0).pow(k as u32)));
    let b = Generator { symbol: "b".into(), perm: Permutation::identity(p), sections: b_sections };
    let mut nucleus = vec![Word::empty()];
    nucleus.extend((1..p as u32).map(|k| Word::letter(0).pow(k)));
    nucleus.extend((1..p as u32).map(|k| Word::letter(1).pow(k)));
    let name = format!("ggs(p={}, e={:?})", e.p(), e.e());
    GroupSpec::new(name, p, vec![a, b], nucleus).expect("catalog spec")
}

/// The Apollonian group: `x=(1,y,1)(1 2)`, `y=(x,1,1)(1 3)`, `z=(1,1,z)(2 3)`.
pub fn apollonian() -> GroupSpec {
    let s = ["x", "y", "z"];
    let generators = vec![
        gen(&s, "x", Permutation::from_cycles(3, "(1 2)").unwrap(), &["", "y", ""]),
        gen(&s, "y", Permutation::from_cycles(3, "(1 3)").unwrap(), &["x", "", ""]),
        gen(&s, "z", Permutation::from_cycles(3, "(2 3)").unwrap(), &["", "", "z"]),
    ];
    let mut nucleus = vec![Word::empty()];
    nucleus.extend((0..3).map(Word::letter));
    nucleus.extend((0..3).map(|g| Word(vec![Letter::new(g, true)])));
    GroupSpec::new("apollonian", 3, generators, nucleus).expect("catalog spec")
}

/// Contraction witness for an ordered pair of nucleus elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairWitness {
    pub left: usize,
    pub right: usize,
    /// Least level at which every section of the product is nuclear; `None` if the
    /// level bound was reached first.
    pub level: Option<usize>,
}

/// A section of a nucleus element that is not itself nuclear.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureFailure {
    pub element: usize,
    pub vertex: usize,
    pub section: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NucleusReport {
    pub closed_under_sections: bool,
    pub pairwise_distinct: bool,
    pub contraction_witness: Vec<PairWitness>,
    pub closure_failures: Vec<ClosureFailure>,
    pub equal_pairs: Vec<(usize, usize)>,
    pub max_level_used: usize,
}

impl NucleusReport {
    pub fn all_witnessed(&self) -> bool {
        self.contraction_witness.iter().all(|w| w.level.is_some())
    }

    pub fn is_valid(&self) -> bool {
        self.closed_under_sections && self.pairwise_distinct && self.all_witnessed()
    }
}

/// Checks the declared nucleus: closure under first-level sections, pairwise
/// distinctness, and for every ordered pair `(nu, mu)` the least level `<= max_level`
/// at which all sections of `nu mu` are nuclear.
pub fn validate_contraction(spec: &GroupSpec, max_level: usize) -> Result<NucleusReport> {
    let nucleus = spec.nucleus();
    let d = spec.degree();

    let mut equal_pairs = Vec::new();
    for i in 0..nucleus.len() {
        for j in i + 1..nucleus.len() {
            if spec.are_equal(&nucleus[i], &nucleus[j])? {
                equal_pairs.push((i, j));
            }
        }
    }

    let mut closure_failures = Vec::new();
    for (i, nu) in nucleus.iter().enumerate() {
        for (u, s) in spec.sections(nu)?.iter().enumerate() {
            if spec.nucleus_index(s)?.is_none() {
                closure_failures.push(ClosureFailure { element: i, vertex: u + 1, section: spec.format_word(s) });
            }
        }
    }

    let mut witnesses = Vec::new();
    let mut max_level_used = 0;
    for i in 0..nucleus.len() {
        for j in 0..nucleus.len() {
            let prod = nucleus[i].concat(&nucleus[j]);
            let mut level = None;
            for lvl in 0..=max_level {
                max_level_used = max_level_used.max(lvl);
                if all_sections_nuclear(spec, &prod, lvl, d)? {
                    level = Some(lvl);
                    break;
                }
            }
            witnesses.push(PairWitness { left: i, right: j, level });
        }
    }

    Ok(NucleusReport {
        closed_under_sections: closure_failures.is_empty(),
        pairwise_distinct: equal_pairs.is_empty(),
        contraction_witness: witnesses,
        closure_failures,
        equal_pairs,
        max_level_used,
    })
}

fn all_sections_nuclear(spec: &GroupSpec, w: &Word, level: usize, d: usize) -> Result<bool> {
    let count = d.pow(level as u32);
    for idx in 0..count {
        let mut path = vec![0; level];
        let mut x = idx;
        for slot in path.iter_mut().rev() {
            *slot = x % d;
            x /= d;
        }
        let s = spec.section_at(w, &Vertex(path))?;
        if spec.nucleus_index(&s)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One row of a published coset-decomposition table: `word = (sections) perm`,
/// with `coset` the representative of the coset containing `word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionRow {
    pub word: &'static str,
    pub sections: &'static [&'static str],
    pub perm: &'static str,
    pub coset: &'static str,
}

/// Transversal of `K = <[a,b]>^G` in the Grigorchuk group (16 words).
pub const GRIGORCHUK_T: [&str; 16] =
    ["1", "d", "ada", "dada", "a", "ad", "da", "dad", "b", "c", "aca", "cada", "ba", "ac", "ca", "cad"];

/// Transversal of `psi^-1(K x K)` in `K` for the Grigorchuk group.
pub const GRIGORCHUK_S: [&str; 4] = ["1", "abab", "(abab)^2", "baba"];

/// The 24 first-level decompositions `t s = (g_1, g_2)` for `t` in `{1, c, dada, b, d, cada}`
/// and `s` in [`GRIGORCHUK_S`], with sections given by transversal representatives mod `K`.
pub const GRIGORCHUK_DECOMPOSITIONS: [DecompositionRow; 24] = {
    const fn row(word: &'static str, sections: &'static [&'static str], coset: &'static str) -> DecompositionRow {
        DecompositionRow { word, sections, perm: "()", coset }
    }
    [
        row("1", &["1", "1"], "1"),
        row("abab", &["ca", "ac"], "1"),
        row("(abab)^2", &["dada", "dada"], "1"),
        row("baba", &["ac", "ca"], "1"),
        row("c", &["a", "d"], "c"),
        row("cabab", &["aca", "cad"], "c"),
        row("c(abab)^2", &["dad", "ada"], "c"),
        row("cbaba", &["c", "ba"], "c"),
        row("dada", &["b", "b"], "dada"),
        row("dadaabab", &["da", "ad"], "dada"),
        row("dada(abab)^2", &["cada", "cada"], "dada"),
        row("dadababa", &["ad", "da"], "dada"),
        row("b", &["a", "c"], "b"),
        row("babab", &["aca", "dad"], "b"),
        row("b(abab)^2", &["dad", "aca"], "b"),
        row("bbaba", &["c", "a"], "b"),
        row("d", &["1", "b"], "d"),
        row("dabab", &["ca", "ad"], "d"),
        row("d(abab)^2", &["dada", "cada"], "d"),
        row("dbaba", &["ac", "da"], "d"),
        row("cada", &["ba", "d"], "cada"),
        row("cadaabab", &["ada", "cad"], "cada"),
        row("cada(abab)^2", &["cad", "ada"], "cada"),
        row("cadababa", &["d", "ba"], "cada"),
    ]
};

/// Transversal `{1, x}` of the even-length subgroup `E` in the Apollonian group.
pub const APOLLONIAN_T: [&str; 2] = ["1", "x"];

/// Transversal of `E x E x E` (pulled back) in `E`.
pub const APOLLONIAN_S: [&str; 12] = [
    "1", "yx", "(yx)^2", "x^2", "y^2", "z^2", "x^2yx", "y^3x", "z^2yx", "x^2(yx)^2", "y^2(yx)^2", "z^2(yx)^2",
];

/// The 24 rows `t s = (g_1, g_2, g_3) alpha`, `t` in `{1, x}`, `s` in [`APOLLONIAN_S`].
pub const APOLLONIAN_TABLE: [DecompositionRow; 24] = {
    const fn row(
        word: &'static str,
        sections: &'static [&'static str],
        perm: &'static str,
        coset: &'static str,
    ) -> DecompositionRow {
        DecompositionRow { word, sections, perm, coset }
    }
    [
        row("1", &["1", "1", "1"], "()", "1"),
        row("yx", &["x", "y", "1"], "(1 3 2)", "1"),
        row("(yx)^2", &["x", "yx", "y"], "(1 2 3)", "1"),
        row("x^2", &["y", "y", "1"], "()", "1"),
        row("y^2", &["x", "1", "x"], "()", "1"),
        row("z^2", &["1", "z", "z"], "()", "1"),
        row("x^2yx", &["yx", "y^2", "1"], "(1 3 2)", "1"),
        row("y^3x", &["x^2", "y", "x"], "(1 3 2)", "1"),
        row("z^2yx", &["x", "zy", "z"], "(1 3 2)", "1"),
        row("x^2(yx)^2", &["yx", "y^2x", "y"], "(1 2 3)", "1"),
        row("y^2(yx)^2", &["x^2", "yx", "xy"], "(1 2 3)", "1"),
        row("z^2(yx)^2", &["x", "zyx", "zy"], "(1 2 3)", "1"),
        row("x", &["1", "y", "1"], "(1 2)", "x"),
        row("xyx", &["y", "yx", "1"], "(2 3)", "x"),
        row("x(yx)^2", &["yx", "yx", "y"], "(1 3)", "x"),
        row("x^3", &["y", "y^2", "1"], "(1 2)", "x"),
        row("xy^2", &["1", "yx", "x"], "(1 2)", "x"),
        row("xz^2", &["z", "y", "z"], "(1 2)", "x"),
        row("x^3yx", &["y^2", "y^2x", "1"], "(2 3)", "x"),
        row("xy^3x", &["y", "yx^2", "x"], "(2 3)", "x"),
        row("xz^2yx", &["zy", "yx", "z"], "(2 3)", "x"),
        row("x^3(yx)^2", &["y^2x", "y^2x", "y"], "(1 3)", "x"),
        row("xy^2(yx)^2", &["yx", "yx^2", "xy"], "(1 3)", "x"),
        row("xz^2(yx)^2", &["zyx", "yx", "zy"], "(1 3)", "x"),
    ]
};

/// Index of the point stabiliser of level 1 for the catalog families: the order of
/// the group of root permutations (2 for Grigorchuk, `p` for GGS, 6 for Apollonian).
pub fn first_level_index(spec: &GroupSpec) -> usize {
    let d = spec.degree();
    let gens: Vec<Permutation> = spec.generators().iter().map(|g| g.perm.clone()).collect();
    let mut seen = vec![Permutation::identity(d)];
    let mut i = 0;
    while i < seen.len() {
        for g in &gens {
            let next = seen[i].then(g);
            if !seen.contains(&next) {
                seen.push(next);
            }
        }
        i += 1;
    }
    seen.len()
}
