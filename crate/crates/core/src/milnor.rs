//! Milnor invariants with non-repeating indices, read off the reduced
//! Magnus expansion of the longitudes.
//!
//! Two routes produce the longitude expansions. For a sorted diagram the
//! longitudes are words in the meridians and expand directly. For any
//! diagram, each arc is written as a conjugate `W^-1 (1 + x_c) W` of its
//! circle's meridian and the conjugators are refined by sweeping the
//! Wirtinger relations until they stop changing; the ring is nilpotent, so
//! this settles after at most `n + 1` sweeps.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{End, GaussDiagram};
use crate::group::{sorted_longitudes, Arcs, GroupError};
use crate::magnus::{expand, MagnusError, Monomial, ReducedPoly, MAX_VARS};
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MilnorError {
    #[error(transparent)]
    Magnus(#[from] MagnusError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("invariant length {0} out of range: need 2 <= length <= n")]
    BadLength(usize),
    #[error("at most {MAX_VARS} components are supported, got {0}")]
    TooManyComponents(usize),
    #[error("tables cover different component counts ({0} vs {1})")]
    Mismatch(usize, usize),
}

/// How entries are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidueMode {
    /// `mu mod Delta`, the diagram invariant.
    #[default]
    Residue,
    /// The integer coefficient itself, which depends on basing.
    Raw,
}

/// Integers serialize as JSON numbers when they fit in 64 bits, else as strings.
mod big_serde {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(x) => ser.serialize_i64(x),
            None => ser.serialize_str(&v.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigInt, D::Error> {
        match Repr::deserialize(de)? {
            Repr::Int(x) => Ok(BigInt::from(x)),
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One invariant `mu(I; j)`; indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilnorEntry {
    #[serde(rename = "I")]
    pub i: Vec<usize>,
    pub j: usize,
    #[serde(with = "big_serde")]
    pub mu: BigInt,
    #[serde(with = "big_serde")]
    pub delta: BigInt,
    #[serde(with = "big_serde")]
    pub mubar: BigInt,
}

impl MilnorEntry {
    pub fn len(&self) -> usize {
        self.i.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.i.iter().map(|k| k.to_string()).collect();
        format!("({};{})", parts.join(","), self.j)
    }

    fn key(&self, mode: ResidueMode) -> (&BigInt, Option<&BigInt>) {
        match mode {
            ResidueMode::Residue => (&self.mubar, Some(&self.delta)),
            ResidueMode::Raw => (&self.mu, None),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MilnorTable {
    pub n: usize,
    pub max_length: usize,
    pub entries: Vec<MilnorEntry>,
}

/// First entry at which two tables disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableWitness {
    pub left: MilnorEntry,
    pub right: MilnorEntry,
}

impl MilnorTable {
    /// Builds the table from the expansions of `lambda_1..lambda_n`.
    pub fn from_expansions(longitudes: &[ReducedPoly], max_length: usize) -> Result<MilnorTable, MilnorError> {
        let n = longitudes.len();
        if max_length < 2 || max_length > n {
            return Err(MilnorError::BadLength(max_length));
        }
        check_n(n)?;
        let plan = Plan::get(n, max_length);
        let mu: Vec<BigInt> = plan.seqs.iter().map(|(seq, m)| longitudes[seq[seq.len() - 1]].coeff(m)).collect();
        let small: Option<Vec<i64>> = mu.iter().map(|m| m.to_i64()).collect();
        let mut entries = Vec::with_capacity(mu.len());
        for (k, (seq, _)) in plan.seqs.iter().enumerate() {
            let subs = &plan.subs[k];
            let delta = match &small {
                Some(v) => BigInt::from(subs.iter().fold(0i64, |g, &s| g.gcd(&v[s as usize]))),
                None => subs.iter().fold(BigInt::zero(), |g, &s| g.gcd(&mu[s as usize])),
            };
            let m = mu[k].clone();
            let mubar = if delta.is_zero() { m.clone() } else { m.mod_floor(&delta) };
            let (j, i) = seq.split_last().expect("length >= 2");
            entries.push(MilnorEntry { i: i.iter().map(|k| k + 1).collect(), j: j + 1, mu: m, delta, mubar });
        }
        Ok(MilnorTable { n, max_length, entries })
    }

    pub fn get(&self, i: &[usize], j: usize) -> Option<&MilnorEntry> {
        self.entries.iter().find(|e| e.i == i && e.j == j)
    }

    /// Lowest length at which a nonzero residue appears.
    pub fn first_nonvanishing(&self) -> Option<&MilnorEntry> {
        self.entries.iter().find(|e| !e.mubar.is_zero())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("tables serialize")
    }

    /// Plain text: one `(I;j) mu delta mubar` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!("mu{} = {}  delta = {}  residue = {}\n", e.label(), e.mu, e.delta, e.mubar));
        }
        out
    }
}

/// Sequences `(I, j)` of distinct 0-based indices with length in
/// `2..=max_length`, ordered by length, then `j`, then `I`.
fn sequences(n: usize, max_length: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for _ in 2..=max_length {
        let mut next = Vec::new();
        for s in &level {
            for k in 0..n {
                if !s.contains(&k) {
                    let mut t = s.clone();
                    t.push(k);
                    next.push(t);
                }
            }
        }
        let mut sorted = next.clone();
        sorted.sort_by(|a, b| (a.last(), &a[..a.len() - 1]).cmp(&(b.last(), &b[..b.len() - 1])));
        out.extend(sorted);
        level = next;
    }
    out
}

/// Table layout for one `(n, max_length)`: the sequences with the monomial
/// of their `I` part, and for each sequence the positions whose `mu` values
/// make up its indeterminacy, namely every cyclic rotation of every proper
/// subsequence of length at least two.
struct Plan {
    seqs: Vec<(Vec<usize>, Monomial)>,
    subs: Vec<Vec<u32>>,
}

static PLANS: [[OnceLock<Plan>; MAX_VARS + 1]; MAX_VARS + 1] = [const { [const { OnceLock::new() }; MAX_VARS + 1] }; MAX_VARS + 1];

impl Plan {
    fn get(n: usize, max_length: usize) -> &'static Plan {
        PLANS[n][max_length].get_or_init(|| Plan::build(n, max_length))
    }

    fn build(n: usize, max_length: usize) -> Plan {
        let seqs = sequences(n, max_length);
        let index: HashMap<&[usize], u32> = seqs.iter().enumerate().map(|(k, s)| (s.as_slice(), k as u32)).collect();
        let subs = seqs
            .iter()
            .map(|seq| {
                let k = seq.len();
                let mut out = Vec::new();
                for mask in 1u32..(1 << k) - 1 {
                    if mask.count_ones() < 2 {
                        continue;
                    }
                    let sub: Vec<usize> = (0..k).filter(|b| mask & (1 << b) != 0).map(|b| seq[b]).collect();
                    for r in 0..sub.len() {
                        let mut rot = sub.clone();
                        rot.rotate_left(r);
                        out.push(index[rot.as_slice()]);
                    }
                }
                out
            })
            .collect();
        let seqs = seqs
            .into_iter()
            .map(|s| {
                let m = Monomial::from_indices(&s[..s.len() - 1]).expect("indices are distinct");
                (s, m)
            })
            .collect();
        Plan { seqs, subs }
    }
}

pub fn tables_equal(a: &MilnorTable, b: &MilnorTable, mode: ResidueMode) -> Result<(), Box<TableWitness>> {
    for (x, y) in a.entries.iter().zip(&b.entries) {
        debug_assert_eq!((&x.i, x.j), (&y.i, y.j));
        if x.key(mode) != y.key(mode) {
            return Err(Box::new(TableWitness { left: x.clone(), right: y.clone() }));
        }
    }
    if a.entries.len() != b.entries.len() {
        let longer = if a.entries.len() > b.entries.len() { a } else { b };
        let e = longer.entries[a.entries.len().min(b.entries.len())].clone();
        return Err(Box::new(TableWitness { left: e.clone(), right: e }));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<(), MilnorError> {
    if n > MAX_VARS {
        Err(MilnorError::TooManyComponents(n))
    } else {
        Ok(())
    }
}

/// Expansions of words in the meridians.
pub fn word_expansions(n: usize, longitudes: &[Word]) -> Result<Vec<ReducedPoly>, MilnorError> {
    check_n(n)?;
    longitudes.iter().map(|w| expand(w, n).map_err(MilnorError::from)).collect()
}

/// Longitude expansions of a sorted diagram.
pub fn sorted_expansions(d: &GaussDiagram) -> Result<Vec<ReducedPoly>, MilnorError> {
    word_expansions(d.n(), &sorted_longitudes(d)?)
}

/// Longitude expansions of any diagram, basing each circle at arc 0.
pub fn direct_expansions(d: &GaussDiagram) -> Result<Vec<ReducedPoly>, MilnorError> {
    let n = d.n();
    check_n(n)?;
    let arcs = Arcs::new(d);
    let total = arcs.total();
    let circle_of: Vec<usize> = (0..n).flat_map(|c| std::iter::repeat_n(c, arcs.arcs_on(c))).collect();
    // Per circle: (tail arc, sign) at each head, in order.
    let heads: Vec<Vec<(usize, i32)>> = (0..n)
        .map(|c| {
            d.circle(c)
                .iter()
                .filter(|e| e.end == End::Head)
                .map(|e| (arcs.tail_generator(d, e.arrow), d.arrow(e.arrow).sign.value()))
                .collect()
        })
        .collect();
    let one = ReducedPoly::one(n);
    // Conjugator of each arc and its inverse.
    let mut w: Vec<ReducedPoly> = vec![one.clone(); total];
    let mut w_inv: Vec<ReducedPoly> = vec![one.clone(); total];
    // Image of arc `a` raised to `e`.
    let power = |w: &[ReducedPoly], w_inv: &[ReducedPoly], a: usize, e: i32| -> ReducedPoly {
        let mut p = w_inv[a].clone();
        p.mul_letter(Letter::new(circle_of[a], e));
        p.mul(&w[a])
    };
    // Updating in place still converges to the same fixed point, in fewer sweeps.
    for _ in 0..=n + 1 {
        let mut changed = false;
        for (c, hs) in heads.iter().enumerate() {
            let mut cur = one.clone();
            let mut cur_inv = one.clone();
            for (k, &(a, e)) in hs.iter().enumerate().take(hs.len().saturating_sub(1)) {
                cur = cur.mul(&power(&w, &w_inv, a, e));
                cur_inv = power(&w, &w_inv, a, -e).mul(&cur_inv);
                let g = arcs.generator(c, k + 1);
                if w[g] != cur {
                    w[g] = cur.clone();
                    w_inv[g] = cur_inv.clone();
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out = Vec::with_capacity(n);
    for (c, hs) in heads.iter().enumerate() {
        let mut lambda = one.clone();
        for &(a, e) in hs {
            lambda = lambda.mul(&power(&w, &w_inv, a, e));
        }
        let k = d.self_writhe(c);
        for _ in 0..k.unsigned_abs() {
            lambda.mul_letter(Letter::new(c, if k > 0 { -1 } else { 1 }));
        }
        out.push(lambda);
    }
    Ok(out)
}

/// Table of a diagram via the direct route.
pub fn milnor_table(d: &GaussDiagram, max_length: usize) -> Result<MilnorTable, MilnorError> {
    MilnorTable::from_expansions(&direct_expansions(d)?, max_length)
}

/// Table of a sorted diagram from its longitude words.
pub fn milnor_table_sorted(d: &GaussDiagram, max_length: usize) -> Result<MilnorTable, MilnorError> {
    MilnorTable::from_expansions(&sorted_expansions(d)?, max_length)
}

pub fn milnor_table_from_words(n: usize, longitudes: &[Word], max_length: usize) -> Result<MilnorTable, MilnorError> {
    MilnorTable::from_expansions(&word_expansions(n, longitudes)?, max_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::BraidWord;
    use crate::parse::parse_gauss_code;
    use crate::sort::sort_diagram;
    use num_traits::Signed;

    fn g(s: &str) -> GaussDiagram {
        parse_gauss_code(s).unwrap()
    }

    #[test]
    fn hopf_linking_numbers() {
        let t = milnor_table(&g("t1 h2+ / h1+ t2"), 2).unwrap();
        assert_eq!(t.entries.len(), 2);
        assert_eq!(t.get(&[1], 2).unwrap().mu, BigInt::from(1));
        assert_eq!(t.get(&[2], 1).unwrap().mu, BigInt::from(1));
        assert_eq!(t.get(&[1], 2).unwrap().delta, BigInt::zero());
        let neg = milnor_table(&g("t1 h2- / h1- t2"), 2).unwrap();
        assert_eq!(neg.get(&[1], 2).unwrap().mubar, BigInt::from(-1));
    }

    #[test]
    fn unlink_vanishes() {
        let t = milnor_table(&GaussDiagram::unlink(3), 3).unwrap();
        assert_eq!(t.entries.len(), 6 + 6);
        assert!(t.entries.iter().all(|e| e.mu.is_zero()));
    }

    #[test]
    fn borromean_triple_invariant() {
        let d = BraidWord::parse(3, "s2^-1 s1 s2^-1 s1 s2^-1 s1").unwrap().closure();
        let t = milnor_table(&d, 3).unwrap();
        for e in t.entries.iter().filter(|e| e.len() == 2) {
            assert!(e.mu.is_zero(), "{}", e.label());
        }
        let v = t.get(&[1, 2], 3).unwrap().mubar.clone();
        assert_eq!(v.abs(), BigInt::from(1));
        assert_eq!(t.get(&[2, 1], 3).unwrap().mubar, -v.clone());
        // Cyclic symmetry of the first non-vanishing invariant.
        assert_eq!(t.get(&[2, 3], 1).unwrap().mubar, v);
    }

    #[test]
    fn sorted_and_direct_routes_agree() {
        for code in ["t1 t2 / h1+ t3 / h2- h3+", "t1 h2+ t3 / h1- t2 h3+", "t1 h2+ / h1+ t2"] {
            let d = g(code);
            let s = sort_diagram(&d).unwrap().diagram;
            let a = milnor_table(&d, d.n()).unwrap();
            let b = milnor_table_sorted(&s, d.n()).unwrap();
            assert!(tables_equal(&a, &b, ResidueMode::Residue).is_ok(), "{code}");
            assert_eq!(direct_expansions(&s).unwrap(), sorted_expansions(&s).unwrap(), "{code}");
        }
    }

    #[test]
    fn delta_uses_all_shorter_subsequences() {
        // Linking numbers 2 and 4 give Delta = 2 for (1,2;3) etc.
        let ls = vec![Word::parse("m2 m2").unwrap(), Word::parse("m1 m1").unwrap(), Word::parse("m1^4").unwrap()];
        let t = milnor_table_from_words(3, &ls, 3).unwrap();
        assert_eq!(t.get(&[1, 2], 3).unwrap().delta, BigInt::from(2));
        assert_eq!(t.get(&[1], 2).unwrap().delta, BigInt::zero());
    }

    #[test]
    fn json_shape() {
        let t = milnor_table(&g("t1 h2+ / h1+ t2"), 2).unwrap();
        let v = t.to_json();
        assert_eq!(v["entries"][0], serde_json::json!({"I": [2], "j": 1, "mu": 1, "delta": 0, "mubar": 1}));
        let back: MilnorTable = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn bad_lengths() {
        assert!(milnor_table(&GaussDiagram::unlink(2), 3).is_err());
        assert!(milnor_table(&GaussDiagram::unlink(2), 1).is_err());
        assert!(milnor_table(&GaussDiagram::unlink(9), 2).is_err());
    }
}
