//! The Magnus expansion of the reduced free group.
//!
//! `μ_i ↦ 1 + x_i` into noncommuting integer polynomials, modulo every
//! monomial that repeats a variable. The quotient ring is finite-rank
//! (monomials are injective sequences in `{1..n}`), and the expansion is a
//! faithful model of RF(n), the quotient of the free group in which every
//! generator commutes with all of its conjugates. That faithfulness is a
//! classical fact taken as given here: equality in RF(n) is *defined* in this
//! crate as equality of expansions ([`rf_equal`]).

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::coeff::Coeff;
use crate::word::{Letter, Word};

/// Largest supported variable count; the dense basis has `Σ n!/(n-k)!` elements.
pub const MAX_VARS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MagnusError {
    #[error("polynomial is not a unit (constant term {0})")]
    NotUnit(BigInt),
    #[error("variable count {0} exceeds the supported maximum of {MAX_VARS}")]
    TooManyVariables(usize),
    #[error("letter index {0} out of range for {1} variables")]
    LetterOutOfRange(usize, usize),
}

/// A monomial `x_{i1} x_{i2} ... x_{ik}` with pairwise distinct indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    len: u8,
    packed: u64,
    mask: u16,
}

impl Monomial {
    pub const UNIT: Monomial = Monomial { len: 0, packed: 0, mask: 0 };

    pub fn var(i: usize) -> Monomial {
        Monomial { len: 1, packed: i as u64, mask: 1 << i }
    }

    /// `None` if an index repeats.
    pub fn from_indices(ix: &[usize]) -> Option<Monomial> {
        let mut m = Monomial::UNIT;
        for &i in ix {
            m = m.times_var(i)?;
        }
        Some(m)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_unit(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask & (1 << i) != 0
    }

    pub fn times_var(self, i: usize) -> Option<Monomial> {
        if self.contains(i) {
            return None;
        }
        Some(Monomial { len: self.len + 1, packed: (self.packed << 4) | i as u64, mask: self.mask | (1 << i) })
    }

    pub fn times(self, other: Monomial) -> Option<Monomial> {
        if self.mask & other.mask != 0 {
            return None;
        }
        Some(Monomial {
            len: self.len + other.len,
            packed: (self.packed << (4 * other.len)) | other.packed,
            mask: self.mask | other.mask,
        })
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.len as usize)
            .rev()
            .map(|k| ((self.packed >> (4 * k)) & 0xf) as usize)
            .collect()
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.indices().iter().map(|i| format!("x{}", i + 1)).collect();
        f.write_str(&parts.join(""))
    }
}

/// Monomial basis for a fixed variable count, ordered by length then lexicographically.
pub struct Basis {
    n: usize,
    monos: Vec<Monomial>,
    index: HashMap<Monomial, u32>,
    /// Full product table (ids), present for small `n`.
    table: Option<Vec<u32>>,
    right_var: Vec<u32>,
    left_var: Vec<u32>,
}

const NONE: u32 = u32::MAX;
const TABLE_MAX_VARS: usize = 6;

static BASES: [OnceLock<Basis>; MAX_VARS + 1] = [const { OnceLock::new() }; MAX_VARS + 1];

impl Basis {
    pub fn get(n: usize) -> &'static Basis {
        assert!(n <= MAX_VARS, "at most {MAX_VARS} variables");
        BASES[n].get_or_init(|| Basis::build(n))
    }

    fn build(n: usize) -> Basis {
        let mut monos = vec![Monomial::UNIT];
        let mut level = vec![Monomial::UNIT];
        for _ in 0..n {
            let mut next = Vec::new();
            for m in &level {
                for i in 0..n {
                    if let Some(mm) = m.times_var(i) {
                        next.push(mm);
                    }
                }
            }
            monos.extend_from_slice(&next);
            level = next;
        }
        let index: HashMap<Monomial, u32> = monos.iter().enumerate().map(|(k, m)| (*m, k as u32)).collect();
        let lookup = |m: Option<Monomial>| m.map(|m| index[&m]).unwrap_or(NONE);
        let mut right_var = Vec::with_capacity(monos.len() * n);
        let mut left_var = Vec::with_capacity(monos.len() * n);
        for m in &monos {
            for i in 0..n {
                right_var.push(lookup(m.times_var(i)));
                left_var.push(lookup(Monomial::var(i).times(*m)));
            }
        }
        let table = (n <= TABLE_MAX_VARS).then(|| {
            let mut t = Vec::with_capacity(monos.len() * monos.len());
            for a in &monos {
                for b in &monos {
                    t.push(lookup(a.times(*b)));
                }
            }
            t
        });
        Basis { n, monos, index, table, right_var, left_var }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    pub fn id(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).map(|&k| k as usize)
    }

    fn product(&self, a: usize, b: usize) -> u32 {
        match &self.table {
            Some(t) => t[a * self.monos.len() + b],
            None => self.monos[a].times(self.monos[b]).map(|m| self.index[&m]).unwrap_or(NONE),
        }
    }
}

/// Element of `Z<x_1..x_n>` modulo monomials with repeated variables,
/// stored densely over the monomial basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ReducedPoly {
    n: usize,
    c: Vec<Coeff>,
}

impl ReducedPoly {
    pub fn zero(n: usize) -> ReducedPoly {
        ReducedPoly { n, c: vec![Coeff::ZERO; Basis::get(n).len()] }
    }

    pub fn one(n: usize) -> ReducedPoly {
        let mut p = ReducedPoly::zero(n);
        p.c[0] = Coeff::Small(1);
        p
    }

    /// `1 + x_i`, the image of the i-th generator.
    pub fn generator(n: usize, i: usize) -> ReducedPoly {
        let mut p = ReducedPoly::one(n);
        p.mul_letter(Letter::pos(i));
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> ReducedPoly {
        let basis = Basis::get(n);
        let mut p = ReducedPoly::zero(n);
        for (m, v) in terms {
            let id = basis.id(&m).expect("monomial within the variable range");
            p.c[id].add_assign(&Coeff::from_big(v));
        }
        p
    }

    fn basis(&self) -> &'static Basis {
        Basis::get(self.n)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Nonzero terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, BigInt)> + '_ {
        let monos = self.basis().monomials();
        self.c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(move |(k, v)| (monos[k], v.to_big()))
    }

    pub fn term_count(&self) -> usize {
        self.c.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.basis().id(m).map(|k| self.c[k].to_big()).unwrap_or_default()
    }

    /// Coefficient of `x_{i1}...x_{ik}` (0-based indices); zero for repeated indices.
    pub fn coeff_of(&self, ix: &[usize]) -> BigInt {
        Monomial::from_indices(ix).map(|m| self.coeff(&m)).unwrap_or_default()
    }

    pub fn constant(&self) -> BigInt {
        self.c[0].to_big()
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == Coeff::Small(1) && self.c[1..].iter().all(Coeff::is_zero)
    }

    pub fn add(&self, other: &ReducedPoly) -> ReducedPoly {
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(&other.c) {
            a.add_assign(b);
        }
        out
    }

    pub fn sub(&self, other: &ReducedPoly) -> ReducedPoly {
        let mut out = self.clone();
        for (a, b) in out.c.iter_mut().zip(&other.c) {
            a.sub_assign(b);
        }
        out
    }

    pub fn neg(&self) -> ReducedPoly {
        ReducedPoly { n: self.n, c: self.c.iter().map(Coeff::neg).collect() }
    }

    pub fn mul(&self, other: &ReducedPoly) -> ReducedPoly {
        assert_eq!(self.n, other.n, "variable counts differ");
        let basis = self.basis();
        let lhs: Vec<usize> = (0..self.c.len()).filter(|&k| !self.c[k].is_zero()).collect();
        let rhs: Vec<usize> = (0..other.c.len()).filter(|&k| !other.c[k].is_zero()).collect();
        // A coefficient of the product sums at most n + 1 terms, one per
        // split of its monomial, so small inputs cannot overflow.
        if let (Some(x), Some(y)) = (self.small_max(), other.small_max()) {
            if (x as i128) * (y as i128) * (self.n as i128 + 1) <= i64::MAX as i128 {
                let small = |c: &Coeff| match c {
                    Coeff::Small(v) => *v,
                    Coeff::Big(_) => unreachable!("checked by small_max"),
                };
                let mut acc = vec![0i64; self.c.len()];
                for &a in &lhs {
                    let ca = small(&self.c[a]);
                    for &b in &rhs {
                        let k = basis.product(a, b);
                        if k != NONE {
                            acc[k as usize] += ca * small(&other.c[b]);
                        }
                    }
                }
                return ReducedPoly { n: self.n, c: acc.into_iter().map(Coeff::Small).collect() };
            }
        }
        let mut out = ReducedPoly::zero(self.n);
        for &a in &lhs {
            for &b in &rhs {
                let k = basis.product(a, b);
                if k != NONE {
                    out.c[k as usize].add_product(&self.c[a], &other.c[b]);
                }
            }
        }
        out
    }

    /// Largest absolute coefficient when every coefficient fits in an `i64`.
    fn small_max(&self) -> Option<u64> {
        self.c.iter().try_fold(0u64, |m, c| match c {
            Coeff::Small(v) => Some(m.max(v.unsigned_abs())),
            Coeff::Big(_) => None,
        })
    }

    /// Right multiplication by the image of a single letter: `(1 + x_g)` for
    /// `μ_g`, `(1 - x_g)` for its inverse.
    pub fn mul_letter(&mut self, l: Letter) {
        self.shift_by_var(l, &self.basis().right_var);
    }

    /// Left multiplication by the image of a letter.
    pub fn letter_mul(&mut self, l: Letter) {
        self.shift_by_var(l, &self.basis().left_var);
    }

    fn shift_by_var(&mut self, l: Letter, targets: &[u32]) {
        let n = self.n;
        // Longer monomials come later in the basis, so walking backwards
        // reads every source coefficient before it is updated.
        for k in (0..self.c.len()).rev() {
            if self.c[k].is_zero() {
                continue;
            }
            let t = targets[k * n + l.gen];
            if t != NONE {
                let v = if l.inverse { self.c[k].neg() } else { self.c[k].clone() };
                self.c[t as usize].add_assign(&v);
            }
        }
    }

    /// Multiplicative inverse of a polynomial with constant term 1:
    /// the geometric series `Σ (1 - p)^k`, which stops after `n` terms.
    pub fn inv(&self) -> Result<ReducedPoly, MagnusError> {
        let c = self.constant();
        if !c.is_one() {
            return Err(MagnusError::NotUnit(c));
        }
        let q = ReducedPoly::one(self.n).sub(self);
        let mut acc = ReducedPoly::one(self.n);
        let mut power = ReducedPoly::one(self.n);
        for _ in 0..self.n {
            power = power.mul(&q);
            if power.c.iter().all(Coeff::is_zero) {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc)
    }

    /// Sets `x_i = 0`: the image in the quotient by the normal closure of `μ_i`.
    pub fn kill_var(&self, i: usize) -> ReducedPoly {
        let monos = self.basis().monomials();
        let mut out = self.clone();
        for (k, m) in monos.iter().enumerate() {
            if m.contains(i) {
                out.c[k] = Coeff::ZERO;
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms().map(|(_, c)| c.abs()).max().unwrap_or_default()
    }
}

impl fmt::Debug for ReducedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ReducedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.c.iter().all(Coeff::is_zero) {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            if m.is_unit() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m:?}")?;
            } else {
                write!(f, "{abs}{m:?}")?;
            }
        }
        Ok(())
    }
}

/// Expansion of a word over `μ_1..μ_n`.
pub fn expand(word: &Word, n: usize) -> Result<ReducedPoly, MagnusError> {
    if n > MAX_VARS {
        return Err(MagnusError::TooManyVariables(n));
    }
    let mut p = ReducedPoly::one(n);
    for &l in word.letters() {
        if l.gen >= n {
            return Err(MagnusError::LetterOutOfRange(l.gen, n));
        }
        p.mul_letter(l);
    }
    Ok(p)
}

/// Equality in the reduced free group RF(n).
pub fn rf_equal(u: &Word, v: &Word, n: usize) -> Result<bool, MagnusError> {
    Ok(expand(u, n)? == expand(v, n)?)
}

/// Number of monomials without repeated indices in `n` variables: `Σ n!/(n-k)!`.
pub fn basis_size(n: usize) -> usize {
    let mut total = 0;
    let mut falling = 1;
    for k in 0..=n {
        total += falling;
        falling *= n - k;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(n: usize, terms: &[(&[usize], i64)]) -> ReducedPoly {
        ReducedPoly::from_terms(n, terms.iter().map(|(ix, c)| (Monomial::from_indices(ix).unwrap(), BigInt::from(*c))))
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn generator_images() {
        assert_eq!(expand(&w("m1"), 2).unwrap(), poly(2, &[(&[], 1), (&[0], 1)]));
        assert_eq!(expand(&w("m1^-1"), 2).unwrap(), poly(2, &[(&[], 1), (&[0], -1)]));
    }

    #[test]
    fn commutator_expansion() {
        // (1+x1)(1+x2)(1-x1)(1-x2), dropping x1x1 and x2x2 terms, by hand.
        let c = expand(&w("m1 m2 m1^-1 m2^-1"), 2).unwrap();
        assert_eq!(c, poly(2, &[(&[], 1), (&[0, 1], 1), (&[1, 0], -1)]));
    }

    #[test]
    fn mul_and_inverse() {
        let a = ReducedPoly::generator(2, 0);
        let b = poly(2, &[(&[], 1), (&[0], -1)]);
        assert!(a.mul(&b).is_one());
        assert_eq!(a.inv().unwrap(), b);
        let c = poly(2, &[(&[], 1), (&[0, 1], 1)]);
        assert_eq!(c.inv().unwrap(), poly(2, &[(&[], 1), (&[0, 1], -1)]));
        assert!(matches!(poly(2, &[(&[], 2)]).inv(), Err(MagnusError::NotUnit(_))));
        assert!(matches!(poly(2, &[(&[0], 1)]).inv(), Err(MagnusError::NotUnit(_))));
    }

    #[test]
    fn rf_equality_examples() {
        assert!(!rf_equal(&w("m1 m2"), &w("m2 m1"), 2).unwrap());
        // [m1, [m1, m2]] vanishes: every surviving monomial would need x1 twice.
        let inner = Word::commutator(&w("m1"), &w("m2"));
        let outer = Word::commutator(&w("m1"), &inner);
        assert!(rf_equal(&outer, &Word::identity(), 2).unwrap());
        assert!(rf_equal(&w("m2 m1 m3"), &w("m2 m1 m3"), 3).unwrap());
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(basis_size(0), 1);
        assert_eq!(basis_size(2), 5);
        assert_eq!(basis_size(4), 65);
        assert_eq!(basis_size(6), 1957);
    }

    #[test]
    fn letter_multiplication_matches_mul() {
        let p = expand(&w("m1 m3^-1 m2"), 3).unwrap();
        for l in [Letter::pos(0), Letter::neg(1), Letter::pos(2)] {
            let mut right = p.clone();
            right.mul_letter(l);
            assert_eq!(right, p.mul(&expand(&Word::letter(l), 3).unwrap()));
            let mut left = p.clone();
            left.letter_mul(l);
            assert_eq!(left, expand(&Word::letter(l), 3).unwrap().mul(&p));
        }
    }

    #[test]
    fn monomial_order_is_length_then_lex() {
        let a = Monomial::from_indices(&[2]).unwrap();
        let b = Monomial::from_indices(&[0, 1]).unwrap();
        let c = Monomial::from_indices(&[1, 0]).unwrap();
        assert!(a < b && b < c);
        assert_eq!(Monomial::from_indices(&[0, 0]), None);
        assert_eq!(c.indices(), vec![1, 0]);
    }
}
