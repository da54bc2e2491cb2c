//! Braid words and their closures.

use std::fmt;

use crate::diagram::{End, GaussDiagram, RawDiagram, Sign};
use crate::parse::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidWord {
    strands: usize,
    /// Generator index (1-based, in `1..strands`) and sign.
    letters: Vec<(usize, Sign)>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<(usize, Sign)>) -> Result<Self, ParseError> {
        if strands == 0 {
            return Err(ParseError::syntax(0, "a braid needs at least one strand"));
        }
        for (k, &(g, _)) in letters.iter().enumerate() {
            if g == 0 || g >= strands {
                return Err(ParseError::syntax(
                    k,
                    format!("generator s{g} out of range for {strands} strands"),
                ));
            }
        }
        Ok(BraidWord { strands, letters })
    }

    /// Parses `s1 s1 s2^-1 ...`; also accepts `S2` as `s2^-1`.
    pub fn parse(strands: usize, text: &str) -> Result<Self, ParseError> {
        let mut letters = Vec::new();
        let mut offset = 0;
        for tok in text.split_whitespace() {
            let pos = text[offset..].find(tok).map(|p| p + offset).unwrap_or(offset);
            offset = pos + tok.len();
            let bad = || ParseError::syntax(pos, format!("bad braid letter {tok:?}"));
            let (inverse_case, body) = match tok.as_bytes()[0] {
                b's' => (false, &tok[1..]),
                b'S' => (true, &tok[1..]),
                _ => return Err(bad()),
            };
            let (num, exp) = match body.split_once('^') {
                Some((n, e)) => (n, e.parse::<i64>().map_err(|_| bad())?),
                None => (body, 1),
            };
            let g: usize = num.parse().map_err(|_| bad())?;
            if g == 0 || g >= strands {
                return Err(ParseError::syntax(pos, format!("generator s{g} out of range for {strands} strands")));
            }
            let exp = if inverse_case { -exp } else { exp };
            let sign = if exp > 0 { Sign::Pos } else { Sign::Neg };
            for _ in 0..exp.unsigned_abs() {
                letters.push((g, sign));
            }
        }
        BraidWord::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[(usize, Sign)] {
        &self.letters
    }

    /// Permutation sending a starting position to the ending position.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.strands).collect(); // at[pos] = strand
        for &(g, _) in &self.letters {
            at.swap(g - 1, g);
        }
        let mut perm = vec![0; self.strands];
        for (pos, &strand) in at.iter().enumerate() {
            perm[strand] = pos;
        }
        perm
    }

    /// Gauss diagram of the closure. At `s_k` the strand in position k
    /// passes over the one in position k+1; at `s_k^-1` the strand in
    /// position k+1 passes over. Each crossing becomes an arrow from the
    /// over-strand to the under-strand carrying the letter's sign.
    /// Components are the cycles of the permutation, ordered by their
    /// smallest strand, each starting at the top of that strand.
    pub fn closure(&self) -> GaussDiagram {
        let s = self.strands;
        // events[strand] = endpoints met along that strand, top to bottom
        let mut events: Vec<Vec<(usize, End)>> = vec![Vec::new(); s];
        let mut at: Vec<usize> = (0..s).collect();
        let mut raw = RawDiagram::default();
        for (key, &(g, sign)) in self.letters.iter().enumerate() {
            let left = at[g - 1];
            let right = at[g];
            let (over, under) = match sign {
                Sign::Pos => (left, right),
                Sign::Neg => (right, left),
            };
            events[over].push((key, End::Tail));
            events[under].push((key, End::Head));
            raw.signs.insert(key, sign);
            at.swap(g - 1, g);
        }
        let perm = self.permutation();
        let mut done = vec![false; s];
        for start in 0..s {
            if done[start] {
                continue;
            }
            let mut circle = Vec::new();
            let mut strand = start;
            while !done[strand] {
                done[strand] = true;
                circle.extend_from_slice(&events[strand]);
                strand = perm[strand];
            }
            raw.circles.push(circle);
        }
        GaussDiagram::from_raw(&raw).expect("braid closure is a valid diagram").0
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&(g, s)| match s {
                Sign::Pos => format!("s{g}"),
                Sign::Neg => format!("s{g}^-1"),
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn from_braid_closure(braid: &BraidWord) -> GaussDiagram {
    braid.closure()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_gauss_code;

    #[test]
    fn positive_hopf() {
        let b = BraidWord::parse(2, "s1 s1").unwrap();
        assert_eq!(b.closure().to_gauss_code(), "t1 h2+ / h1+ t2");
    }

    #[test]
    fn negative_hopf() {
        let b = BraidWord::parse(2, "s1^-1 s1^-1").unwrap();
        let d = b.closure();
        // Same diagram as "t1 h2- / h1- t2" with both basepoints moved.
        assert_eq!(d.to_gauss_code(), "h1- t2 / t1 h2-");
        assert_eq!(d.canonical_key(), parse_gauss_code("t1 h2- / h1- t2").unwrap().canonical_key());
    }

    #[test]
    fn empty_word_is_unlink() {
        let d = BraidWord::parse(3, "").unwrap().closure();
        assert_eq!(d.n(), 3);
        assert_eq!(d.arrow_count(), 0);
    }

    #[test]
    fn components_follow_cycles() {
        let d = BraidWord::parse(3, "s1").unwrap().closure();
        assert_eq!(d.n(), 2);
        let d = BraidWord::parse(3, "s1 s2").unwrap().closure();
        assert_eq!(d.n(), 1);
        let d = BraidWord::parse(3, "s2^-1 s1 s2^-1 s1 s2^-1 s1").unwrap().closure();
        assert_eq!(d.n(), 3);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(BraidWord::parse(2, "s2").is_err());
        assert!(BraidWord::parse(3, "s0").is_err());
        assert!(BraidWord::parse(3, "x1").is_err());
        assert!(BraidWord::new(2, vec![(2, Sign::Pos)]).is_err());
        let b = BraidWord::parse(3, "s2^-2 S1").unwrap();
        assert_eq!(b.letters().len(), 3);
        assert_eq!(b.to_string(), "s2^-1 s2^-1 s1^-1");
    }
}
