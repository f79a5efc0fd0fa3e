//! Words over a generating set and their text syntax.
//!
//! A word is a sequence of signed generator letters; the empty word is the identity.
//! The text syntax is juxtaposition of generator symbols with optional whitespace,
//! `^-1` for inversion, and (as a convenience) integer exponents and parentheses:
//! `a b^-1 a`, `bacac`, `x^2(yx)^2`.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: u16,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen: gen as u16, inverse }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(gen: usize) -> Self {
        Word(vec![Letter::new(gen, false)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn pow(&self, k: u32) -> Word {
        Word(self.0.iter().copied().cycle().take(self.len() * k as usize).collect())
    }

    /// Cancels adjacent `s s^-1` pairs; no other relation is used.
    pub fn freely_reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }
}

/// Formal inverse: reversed letters with flipped signs.
pub fn inverse_word(w: &Word) -> Word {
    Word(w.0.iter().rev().map(|l| l.inv()).collect())
}

/// Parses a word given the generator symbols in declaration order.
pub fn parse_word(symbols: &[String], input: &str) -> Result<Word> {
    let mut parser = Parser { symbols, input, pos: 0 };
    let w = parser.sequence()?;
    parser.skip_ws();
    if parser.pos != input.len() {
        return Err(parser.error("unexpected `)`"));
    }
    Ok(w)
}

/// Prints a word. Symbols are juxtaposed when they are all single characters,
/// otherwise separated by spaces; the empty word prints as `1`.
pub fn format_word(symbols: &[String], w: &Word) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let compact = symbols.iter().all(|s| s.chars().count() == 1);
    let parts: Vec<String> = w
        .0
        .iter()
        .map(|l| {
            let s = &symbols[l.gen as usize];
            if l.inverse {
                format!("{s}^-1")
            } else {
                s.clone()
            }
        })
        .collect();
    if compact {
        parts.concat()
    } else {
        parts.join(" ")
    }
}

struct Parser<'a> {
    symbols: &'a [String],
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, reason: &str) -> Error {
        Error::ParseWord { input: self.input.to_string(), reason: format!("{reason} at byte {}", self.pos) }
    }

    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.input.len() - trimmed.len();
    }

    fn sequence(&mut self) -> Result<Word> {
        let mut letters = Vec::new();
        loop {
            self.skip_ws();
            let rest = self.rest();
            if rest.is_empty() || rest.starts_with(')') {
                break;
            }
            let atom = if rest.starts_with('(') {
                self.pos += 1;
                let inner = self.sequence()?;
                self.skip_ws();
                if !self.rest().starts_with(')') {
                    return Err(self.error("missing `)`"));
                }
                self.pos += 1;
                inner
            } else if rest.starts_with('1') && !self.symbols.iter().any(|s| rest.starts_with(s.as_str())) {
                // `1` denotes the identity when it is not itself a symbol.
                self.pos += 1;
                Word::empty()
            } else {
                let (gen, len) = self
                    .symbols
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| !s.is_empty() && rest.starts_with(s.as_str()))
                    .max_by_key(|(_, s)| s.len())
                    .map(|(i, s)| (i, s.len()))
                    .ok_or_else(|| {
                        let tok: String = rest.chars().take_while(|c| !c.is_whitespace()).collect();
                        Error::UnknownSymbol(tok)
                    })?;
                self.pos += len;
                Word::letter(gen)
            };
            let exp = self.exponent()?;
            let piece = if exp < 0 { inverse_word(&atom).pow((-exp) as u32) } else { atom.pow(exp as u32) };
            letters.extend(piece.0);
        }
        Ok(Word(letters))
    }

    fn exponent(&mut self) -> Result<i64> {
        let save = self.pos;
        self.skip_ws();
        if !self.rest().starts_with('^') {
            self.pos = save;
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let rest = self.rest();
        let (sign, digits_start) = match rest.as_bytes().first() {
            Some(b'-') => (-1, 1),
            Some(b'+') => (1, 1),
            _ => (1, 0),
        };
        let digits: String = rest[digits_start..].chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(self.error("expected integer exponent"));
        }
        self.pos += digits_start + digits.len();
        let value: i64 = digits.parse().map_err(|_| self.error("exponent out of range"))?;
        Ok(sign * value)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}{}", self.gen, if self.inverse { "^-1" } else { "" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_juxtaposition_and_inverses() {
        let s = syms(&["a", "b"]);
        let w = parse_word(&s, "a b^-1 a").unwrap();
        assert_eq!(w.0, vec![Letter::new(0, false), Letter::new(1, true), Letter::new(0, false)]);
        assert_eq!(format_word(&s, &w), "ab^-1a");
        assert_eq!(parse_word(&s, "").unwrap(), Word::empty());
        assert_eq!(parse_word(&s, "1").unwrap(), Word::empty());
    }

    #[test]
    fn parses_powers_and_groups() {
        let s = syms(&["x", "y", "z"]);
        let w = parse_word(&s, "x^2(yx)^2").unwrap();
        assert_eq!(format_word(&s, &w), "xxyxyx");
        let w = parse_word(&s, "(xy)^-1").unwrap();
        assert_eq!(format_word(&s, &w), "y^-1x^-1");
    }

    #[test]
    fn multi_character_symbols_use_longest_match() {
        let s = syms(&["t", "t2"]);
        let w = parse_word(&s, "t2 t").unwrap();
        assert_eq!(w.0, vec![Letter::new(1, false), Letter::new(0, false)]);
        assert_eq!(format_word(&s, &w), "t2 t");
    }

    #[test]
    fn unknown_symbols_and_bad_syntax_are_errors() {
        let s = syms(&["a", "b"]);
        assert!(matches!(parse_word(&s, "ac"), Err(Error::UnknownSymbol(t)) if t == "c"));
        assert!(parse_word(&s, "(ab").is_err());
        assert!(parse_word(&s, "ab)").is_err());
        assert!(parse_word(&s, "a^").is_err());
    }

    #[test]
    fn inverse_and_reduction() {
        let s = syms(&["a", "b"]);
        let ab = parse_word(&s, "ab").unwrap();
        assert_eq!(format_word(&s, &inverse_word(&ab)), "b^-1a^-1");
        assert_eq!(inverse_word(&Word::empty()), Word::empty());
        assert!(ab.concat(&inverse_word(&ab)).freely_reduced().is_empty());
        let w = parse_word(&s, "a a^-1 b b b^-1 a").unwrap();
        assert_eq!(format_word(&s, &w.freely_reduced()), "ba");
    }
}
