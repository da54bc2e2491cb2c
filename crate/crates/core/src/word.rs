//! Words in free groups.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::parse::ParseError;

/// A generator (0-based index) raised to the power ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, exp: i32) -> Letter {
        debug_assert!(exp == 1 || exp == -1);
        Letter { gen, inverse: exp < 0 }
    }

    pub fn pos(gen: usize) -> Letter {
        Letter { gen, inverse: false }
    }

    pub fn neg(gen: usize) -> Letter {
        Letter { gen, inverse: true }
    }

    pub fn exp(self) -> i32 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Letter {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    /// Signed 1-based encoding used in JSON: `3` for m3, `-3` for m3^-1.
    pub fn to_int(self) -> i64 {
        (self.gen as i64 + 1) * self.exp() as i64
    }

    pub fn from_int(v: i64) -> Option<Letter> {
        if v == 0 {
            return None;
        }
        Some(Letter { gen: (v.unsigned_abs() - 1) as usize, inverse: v < 0 })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<i64>", try_from = "Vec<i64>")]
pub struct Word(pub Vec<Letter>);

impl From<Word> for Vec<i64> {
    fn from(w: Word) -> Vec<i64> {
        w.0.iter().map(|l| l.to_int()).collect()
    }
}

impl TryFrom<Vec<i64>> for Word {
    type Error = String;
    fn try_from(v: Vec<i64>) -> Result<Word, String> {
        v.into_iter()
            .map(|x| Letter::from_int(x).ok_or_else(|| "0 is not a letter".to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Word)
    }
}

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn gen(g: usize) -> Word {
        Word(vec![Letter::pos(g)])
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

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// Appends `l` and cancels it against the last letter if they are inverse.
    pub fn push_reduced(&mut self, l: Letter) {
        if self.0.last() == Some(&l.inv()) {
            self.0.pop();
        } else {
            self.0.push(l);
        }
    }

    pub fn free_reduce(&self) -> Word {
        let mut out = Word(Vec::with_capacity(self.0.len()));
        for &l in &self.0 {
            out.push_reduced(l);
        }
        out
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1].inv())
    }

    /// `w^-1 u w` for `u = self`.
    pub fn conjugate_by(&self, w: &Word) -> Word {
        w.inverse().concat(self).concat(w)
    }

    /// Commutator `[a, b] = a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.0.iter().filter(|l| l.gen == gen).map(|l| l.exp() as i64).sum()
    }

    pub fn power(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Replaces every occurrence of generator `gen` (and its inverse) by `image` (and its inverse).
    pub fn substitute(&self, gen: usize, image: &Word) -> Word {
        let inv = image.inverse();
        let mut out = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if l.gen == gen {
                out.extend_from_slice(if l.inverse { &inv.0 } else { &image.0 });
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    /// Renders with the given generator prefix: `m2 m1^-1`; the identity renders as `1`.
    pub fn render(&self, prefix: &str) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|l| {
                if l.inverse {
                    format!("{prefix}{}^-1", l.gen + 1)
                } else {
                    format!("{prefix}{}", l.gen + 1)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Parses the `m2 m1^-1` style (any alphabetic prefix; `1` or empty is the identity).
    pub fn parse(text: &str) -> Result<Word, ParseError> {
        let mut out = Vec::new();
        let mut offset = 0;
        for tok in text.split_whitespace() {
            let pos = text[offset..].find(tok).map(|p| p + offset).unwrap_or(offset);
            offset = pos + tok.len();
            if tok == "1" {
                continue;
            }
            let bad = || ParseError::syntax(pos, format!("bad letter {tok:?}"));
            let body = tok.trim_start_matches(|c: char| c.is_ascii_alphabetic());
            if body.len() == tok.len() {
                return Err(bad());
            }
            let (num, exp) = match body.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let g: usize = num.parse().map_err(|_| bad())?;
            if g == 0 {
                return Err(bad());
            }
            for _ in 0..exp.unsigned_abs() {
                out.push(Letter { gen: g - 1, inverse: exp < 0 });
            }
        }
        Ok(Word(out))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("m"))
    }
}

pub fn free_reduce(w: &Word) -> Word {
    w.free_reduce()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(w("m1 m1^-1").free_reduce(), Word::identity());
        assert_eq!(w("m1 m2 m2^-1 m1").free_reduce(), w("m1^2"));
        assert_eq!(Word::identity().free_reduce(), Word::identity());
        assert_eq!(w("m1 m2 m3 m3^-1 m2^-1 m1^-1").free_reduce(), Word::identity());
    }

    #[test]
    fn render_and_parse() {
        let x = w("m2 m1^-1 m3^2");
        assert_eq!(x.to_string(), "m2 m1^-1 m3 m3");
        assert_eq!(Word::identity().to_string(), "1");
        assert_eq!(w("1"), Word::identity());
        assert!(Word::parse("m0").is_err());
        assert!(Word::parse("7").is_err());
    }

    #[test]
    fn json_letters() {
        let x = w("m2 m1^-1");
        assert_eq!(serde_json::to_string(&x).unwrap(), "[2,-1]");
        let back: Word = serde_json::from_str("[2,-1]").unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<Word>("[0]").is_err());
    }

    #[test]
    fn substitution() {
        let x = w("m1 m2^-1 m1");
        let img = w("m3 m2 m3^-1");
        assert_eq!(x.substitute(1, &img), w("m1 m3 m2^-1 m3^-1 m1"));
    }
}
