//! Nucleus portraits.
//!
//! The portrait of a nuclear element is a single leaf labelled by that element. Any
//! other element `g = (g_1, ..., g_d) alpha` gets a root labelled `alpha` with the
//! portraits of `g_1, ..., g_d` attached below. Portraits are canonical: two words
//! give the same portrait exactly when they are equal as automorphisms.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::perm::Permutation;
use crate::word::Word;

/// Default depth budget for [`build_portrait`].
pub const DEFAULT_MAX_DEPTH: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Portrait {
    /// Index into the spec's nucleus.
    Leaf(usize),
    Node(Permutation, Vec<Portrait>),
}

impl Portrait {
    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        match self {
            Portrait::Leaf(_) => 0,
            Portrait::Node(_, kids) => 1 + kids.iter().map(Portrait::depth).max().unwrap_or(0),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Portrait::Leaf(_))
    }

    /// Indented text rendering; nucleus leaves use the spec's word syntax.
    pub fn to_ascii(&self, spec: &GroupSpec) -> String {
        let mut out = String::new();
        self.ascii_into(spec, "", "", &mut out);
        out
    }

    fn ascii_into(&self, spec: &GroupSpec, prefix: &str, child_prefix: &str, out: &mut String) {
        match self {
            Portrait::Leaf(i) => {
                let _ = writeln!(out, "{prefix}{}", spec.format_word(&spec.nucleus()[*i]));
            }
            Portrait::Node(p, kids) => {
                let _ = writeln!(out, "{prefix}{p}");
                for (k, kid) in kids.iter().enumerate() {
                    let last = k + 1 == kids.len();
                    let (branch, cont) = if last { ("└─", "   ") } else { ("├─", "│  ") };
                    kid.ascii_into(
                        spec,
                        &format!("{child_prefix}{branch}{} ", k + 1),
                        &format!("{child_prefix}{cont}"),
                        out,
                    );
                }
            }
        }
    }

    /// Graphviz rendering. Edges are labelled by the first-level vertex they lead to.
    pub fn to_dot(&self, spec: &GroupSpec) -> String {
        let mut out = String::from("digraph portrait {\n  node [shape=plaintext];\n");
        let mut next = 0usize;
        self.dot_into(spec, &mut next, &mut out);
        out.push_str("}\n");
        out
    }

    fn dot_into(&self, spec: &GroupSpec, next: &mut usize, out: &mut String) -> usize {
        let me = *next;
        *next += 1;
        match self {
            Portrait::Leaf(i) => {
                let label = spec.format_word(&spec.nucleus()[*i]);
                let _ = writeln!(out, "  n{me} [label=\"{}\"];", label.replace('"', "\\\""));
            }
            Portrait::Node(p, kids) => {
                let _ = writeln!(out, "  n{me} [label=\"{p}\"];");
                for (k, kid) in kids.iter().enumerate() {
                    let child = kid.dot_into(spec, next, out);
                    let _ = writeln!(out, "  n{me} -> n{child} [label=\"{}\"];", k + 1);
                }
            }
        }
        me
    }
}

/// Builds the nucleus portrait of `w`, failing if it is deeper than `max_depth`.
pub fn build_portrait(spec: &GroupSpec, w: &Word, max_depth: usize) -> Result<Portrait> {
    build_rec(spec, &w.freely_reduced(), max_depth, max_depth)
}

fn build_rec(spec: &GroupSpec, w: &Word, remaining: usize, budget: usize) -> Result<Portrait> {
    if let Some(i) = spec.nucleus_index(w)? {
        return Ok(Portrait::Leaf(i));
    }
    if remaining == 0 {
        return Err(Error::DepthBudgetExceeded(budget));
    }
    let (perm, sections) = spec.decompose(w)?;
    let kids = sections
        .iter()
        .map(|s| build_rec(spec, &s.freely_reduced(), remaining - 1, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(Portrait::Node(perm, kids))
}

pub fn depth(spec: &GroupSpec, w: &Word) -> Result<usize> {
    Ok(build_portrait(spec, w, DEFAULT_MAX_DEPTH)?.depth())
}

fn push_varint(out: &mut Vec<u8>, mut x: usize) {
    loop {
        let byte = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(byte);
            break;
        }
        out.push(byte | 0x80);
    }
}

/// Injective preorder serialisation. A leaf is `0x00, index`; a node is
/// `0x01, d, images..., children...` with integers as LEB128 varints.
pub fn canonical_key(p: &Portrait) -> Vec<u8> {
    let mut out = Vec::new();
    key_into(p, &mut out);
    out
}

fn key_into(p: &Portrait, out: &mut Vec<u8>) {
    match p {
        Portrait::Leaf(i) => {
            out.push(0);
            push_varint(out, *i);
        }
        Portrait::Node(perm, kids) => {
            out.push(1);
            push_varint(out, perm.degree());
            for &x in perm.images() {
                push_varint(out, x);
            }
            for k in kids {
                key_into(k, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{apollonian, grigorchuk};

    fn leaf(spec: &GroupSpec, s: &str) -> Portrait {
        let w = spec.parse_word(s).unwrap();
        Portrait::Leaf(spec.nucleus().iter().position(|n| *n == w).unwrap())
    }

    #[test]
    fn figure_two_portrait() {
        let g = grigorchuk();
        let p = build_portrait(&g, &g.parse_word("bacac").unwrap(), 10).unwrap();
        let id = Permutation::identity(2);
        let swap = Permutation::from_cycles(2, "(1 2)").unwrap();
        let expected = Portrait::Node(
            id.clone(),
            vec![
                Portrait::Node(id, vec![leaf(&g, "b"), leaf(&g, "")]),
                Portrait::Node(
                    swap.clone(),
                    vec![Portrait::Node(swap, vec![leaf(&g, "c"), leaf(&g, "a")]), leaf(&g, "d")],
                ),
            ],
        );
        assert_eq!(p, expected);
        assert_eq!(p.depth(), 3);
    }

    #[test]
    fn nuclear_elements_are_leaves() {
        let g = grigorchuk();
        assert_eq!(build_portrait(&g, &g.parse_word("b").unwrap(), 5).unwrap(), leaf(&g, "b"));
        assert_eq!(depth(&g, &g.parse_word("d").unwrap()).unwrap(), 0);
        assert_eq!(depth(&g, &g.parse_word("bc").unwrap()).unwrap(), 0);
        assert_eq!(depth(&g, &g.parse_word("ab").unwrap()).unwrap(), 1);
    }

    #[test]
    fn abab_has_depth_two_with_leaves_a_c_d() {
        let g = grigorchuk();
        let p = build_portrait(&g, &g.parse_word("abab").unwrap(), 5).unwrap();
        assert_eq!(p.depth(), 2);
        fn leaves(p: &Portrait, out: &mut Vec<usize>) {
            match p {
                Portrait::Leaf(i) => out.push(*i),
                Portrait::Node(_, k) => k.iter().for_each(|c| leaves(c, out)),
            }
        }
        let mut ls = Vec::new();
        leaves(&p, &mut ls);
        assert!(ls.iter().all(|&i| [1, 2, 3, 4].contains(&i) && i != 2));
    }

    #[test]
    fn depth_budget() {
        let g = grigorchuk();
        assert_eq!(build_portrait(&g, &g.parse_word("bacac").unwrap(), 2), Err(Error::DepthBudgetExceeded(2)));
    }

    #[test]
    fn canonical_keys() {
        let g = grigorchuk();
        let key = |s: &str| canonical_key(&build_portrait(&g, &g.parse_word(s).unwrap(), 10).unwrap());
        assert_eq!(key("dada"), key("adad"));
        assert_ne!(key("b"), key("c"));
        let id_key = key("");
        for s in ["a", "b", "ab", "abab", "bacac"] {
            assert!(id_key.len() <= key(s).len());
        }
        assert_eq!(id_key, vec![0, 0]);
    }

    #[test]
    fn renderings() {
        let ap = apollonian();
        let p = build_portrait(&ap, &ap.parse_word("xyz").unwrap(), 10).unwrap();
        let dot = p.to_dot(&ap);
        assert!(dot.starts_with("digraph portrait {"));
        assert!(dot.trim_end().ends_with('}'));
        let g = grigorchuk();
        let text = build_portrait(&g, &g.parse_word("bacac").unwrap(), 10).unwrap().to_ascii(&g);
        assert_eq!(text.lines().count(), 9);
        assert!(text.starts_with("()\n"));
    }
}
