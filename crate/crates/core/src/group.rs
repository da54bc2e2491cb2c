//! Wirtinger presentations and peripheral systems.
//!
//! Arcs run from head to head along a circle. Arc 0 of a circle is the one
//! through the basepoint (the incoming arc of its first head); arc `k` is
//! the outgoing arc of head `k - 1`. Generators are numbered circle by
//! circle, arc by arc.
//!
//! At a head of sign `e` whose arrow's tail lies on arc `a`, with incoming
//! arc `b` and outgoing arc `c`, the relation is `c = a^-e b a^e`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{End, EndpointRef, GaussDiagram, Sign};
use crate::snf::{abelian_group, AbelianGroup};
use crate::word::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("diagram is not sorted (circle {0} has a head before a tail)")]
    NotSorted(usize),
    #[error("basing arc {arc} out of range on circle {circle}")]
    BadBasing { circle: usize, arc: usize },
    #[error("expected {expected} basing arcs, got {got}")]
    BasingLength { expected: usize, got: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentation {
    /// Generator names; a word letter `k` refers to `generators[k - 1]`.
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn abelianization(&self) -> AbelianGroup {
        let cols = self.generators.len();
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| (0..cols).map(|g| r.exponent_sum(g)).collect()).collect();
        abelian_group(&rows, cols)
    }
}

/// Arc structure of a diagram.
#[derive(Clone, Debug)]
pub struct Arcs {
    /// First generator index of each circle.
    offset: Vec<usize>,
    /// Number of arcs on each circle (heads, or 1 when there are none).
    count: Vec<usize>,
    heads: Vec<usize>,
}

impl Arcs {
    pub fn new(d: &GaussDiagram) -> Arcs {
        let mut offset = Vec::with_capacity(d.n());
        let mut count = Vec::with_capacity(d.n());
        let mut heads = Vec::with_capacity(d.n());
        let mut total = 0;
        for c in d.circles() {
            let h = c.iter().filter(|e| e.end == End::Head).count();
            offset.push(total);
            count.push(h.max(1));
            heads.push(h);
            total += h.max(1);
        }
        Arcs { offset, count, heads }
    }

    pub fn total(&self) -> usize {
        self.offset.last().map_or(0, |&o| o + self.count[self.count.len() - 1])
    }

    pub fn arcs_on(&self, circle: usize) -> usize {
        self.count[circle]
    }

    /// Global generator index of arc `k` of `circle`.
    pub fn generator(&self, circle: usize, k: usize) -> usize {
        self.offset[circle] + k
    }

    /// Local arc index at a position: heads strictly before it, with the
    /// stretch after the last head folded into arc 0.
    pub fn arc_at(&self, d: &GaussDiagram, circle: usize, position: usize) -> usize {
        let k = d.circle(circle)[..position].iter().filter(|e| e.end == End::Head).count();
        if k == self.heads[circle] {
            0
        } else {
            k
        }
    }

    /// Global generator index of the arc carrying the tail of `arrow`.
    pub fn tail_generator(&self, d: &GaussDiagram, arrow: usize) -> usize {
        let (c, p) = d.locate(EndpointRef::tail(arrow));
        self.generator(c, self.arc_at(d, c, p))
    }

    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.total());
        for (c, &k) in self.count.iter().enumerate() {
            for a in 0..k {
                out.push(format!("x{}.{}", c + 1, a));
            }
        }
        out
    }
}

/// Heads of a circle in order from the basepoint: (arrow, sign).
fn heads_of(d: &GaussDiagram, c: usize) -> Vec<(usize, Sign)> {
    d.circle(c).iter().filter(|e| e.end == End::Head).map(|e| (e.arrow, d.arrow(e.arrow).sign)).collect()
}

pub fn wirtinger(d: &GaussDiagram) -> GroupPresentation {
    let arcs = Arcs::new(d);
    let mut relators = Vec::new();
    for c in 0..d.n() {
        let heads = heads_of(d, c);
        let r = heads.len();
        for (j, &(arrow, sign)) in heads.iter().enumerate() {
            let a = arcs.tail_generator(d, arrow);
            let b = arcs.generator(c, j);
            let out = arcs.generator(c, (j + 1) % r);
            let e = sign.value();
            relators.push(Word(vec![
                Letter::neg(out),
                Letter::new(a, -e),
                Letter::pos(b),
                Letter::new(a, e),
            ]));
        }
    }
    GroupPresentation { generators: arcs.names(), relators }
}

/// Meridians and longitudes of each component, as words in the arc generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeripheralSystem {
    pub n: usize,
    pub presentation: GroupPresentation,
    /// Generator index of each meridian.
    pub meridians: Vec<usize>,
    pub longitudes: Vec<Word>,
    pub self_writhe: Vec<i64>,
}

/// The peripheral system based at arc 0 of every circle.
pub fn peripheral_system(d: &GaussDiagram) -> PeripheralSystem {
    peripheral_system_based(d, &vec![0; d.n()]).expect("arc 0 exists on every circle")
}

/// The peripheral system based at the given arc of each circle. The
/// longitude reads the tail arcs at the heads met from the basing arc
/// onward, corrected by the self-writhe so that it is null-homologous on
/// its own component.
pub fn peripheral_system_based(d: &GaussDiagram, basing: &[usize]) -> Result<PeripheralSystem, GroupError> {
    if basing.len() != d.n() {
        return Err(GroupError::BasingLength { expected: d.n(), got: basing.len() });
    }
    let arcs = Arcs::new(d);
    let mut meridians = Vec::with_capacity(d.n());
    let mut longitudes = Vec::with_capacity(d.n());
    let mut writhes = Vec::with_capacity(d.n());
    for (c, &b) in basing.iter().enumerate() {
        if b >= arcs.arcs_on(c) {
            return Err(GroupError::BadBasing { circle: c, arc: b });
        }
        let mu = arcs.generator(c, b);
        let heads = heads_of(d, c);
        let r = heads.len();
        let mut lambda = Word::identity();
        for s in 0..r {
            let (arrow, sign) = heads[(b + s) % r];
            lambda.push(Letter::new(arcs.tail_generator(d, arrow), sign.value()));
        }
        let k = d.self_writhe(c);
        lambda = lambda.concat(&Word::letter(Letter::pos(mu)).power(-k));
        meridians.push(mu);
        longitudes.push(lambda);
        writhes.push(k);
    }
    Ok(PeripheralSystem { n: d.n(), presentation: wirtinger(d), meridians, longitudes, self_writhe: writhes })
}

/// Longitudes of a sorted diagram as freely reduced words in the meridians
/// `m1..mn`: on a circle whose tails all precede its heads, every tail sits
/// on the basing arc, so each head contributes the meridian of its tail's
/// circle.
pub fn sorted_longitudes(d: &GaussDiagram) -> Result<Vec<Word>, GroupError> {
    let mut out = Vec::with_capacity(d.n());
    for c in 0..d.n() {
        if d.circle(c).windows(2).any(|w| w[0].end == End::Head && w[1].end == End::Tail) {
            return Err(GroupError::NotSorted(c));
        }
    }
    for c in 0..d.n() {
        let mut w = Word::identity();
        for (arrow, sign) in heads_of(d, c) {
            w.push(Letter::new(d.arrow(arrow).tail_circle, sign.value()));
        }
        out.push(w.concat(&Word::gen(c).power(-d.self_writhe(c))).free_reduce());
    }
    Ok(out)
}

/// A sorted diagram whose longitudes are the given words in `m1..mn`: one
/// arrow per letter, from the letter's circle to the word's circle. Letters
/// of a word's own meridian become self-arrows.
pub fn build_sorted_from_longitudes(n: usize, longitudes: &[Word]) -> GaussDiagram {
    use crate::diagram::RawDiagram;
    let mut raw = RawDiagram { circles: vec![Vec::new(); n], signs: Default::default() };
    let mut heads: Vec<Vec<(usize, End)>> = vec![Vec::new(); n];
    let mut key = 0;
    for (i, w) in longitudes.iter().enumerate() {
        for l in w.letters() {
            assert!(l.gen < n, "letter m{} out of range for {n} components", l.gen + 1);
            raw.circles[l.gen].push((key, End::Tail));
            heads[i].push((key, End::Head));
            raw.signs.insert(key, if l.inverse { Sign::Neg } else { Sign::Pos });
            key += 1;
        }
    }
    for (c, h) in heads.into_iter().enumerate() {
        raw.circles[c].extend(h);
    }
    GaussDiagram::from_raw(&raw).expect("one tail and one head per letter").0
}

/// The reduced peripheral system of a sorted diagram: generators `m1..mn`,
/// finite relators `[m_i, l_i]`, and for each `i` the family
/// `[m_i, g^-1 m_i g]` over all words `g`, kept symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedPresentation {
    pub n: usize,
    pub longitudes: Vec<Word>,
    pub relators: Vec<Word>,
    pub families: Vec<String>,
}

pub fn reduced_presentation(d: &GaussDiagram) -> Result<ReducedPresentation, GroupError> {
    let longitudes = sorted_longitudes(d)?;
    let relators = longitudes.iter().enumerate().map(|(i, l)| Word::commutator(&Word::gen(i), l)).collect();
    let families = (0..d.n()).map(|i| format!("[m{0}, g^-1 m{0} g] for all g", i + 1)).collect();
    Ok(ReducedPresentation { n: d.n(), longitudes, relators, families })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_gauss_code;
    use num_bigint::BigInt;

    fn g(s: &str) -> GaussDiagram {
        parse_gauss_code(s).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn hopf_presentation() {
        let d = g("t1 h2+ / h1+ t2");
        let p = wirtinger(&d);
        assert_eq!(p.generators, vec!["x1.0", "x2.0"]);
        // Each circle has one arc; relators read x^-1 a^-1 x a.
        assert_eq!(p.relators, vec![w("m1^-1 m2^-1 m1 m2"), w("m2^-1 m1^-1 m2 m1")]);
        let ps = peripheral_system(&d);
        assert_eq!(ps.longitudes, vec![w("m2"), w("m1")]);
        assert_eq!(p.abelianization(), AbelianGroup { free_rank: 2, torsion: vec![] });
    }

    #[test]
    fn trefoil_like_kink_correction() {
        let d = g("t1 h2+ t3 h1+ t2 h3+");
        let ps = peripheral_system(&d);
        assert_eq!(ps.self_writhe, vec![3]);
        let arcs = ps.presentation.generators.len();
        assert_eq!((0..arcs).map(|a| ps.longitudes[0].exponent_sum(a)).sum::<i64>(), 0);
        assert_eq!(wirtinger(&d).abelianization().free_rank, 1);
    }

    #[test]
    fn abelianization_counts_components() {
        for code in ["/ /", "t1 h2+ / h1+ t2", "t1 t2 / h1- t3 / h2+ h3+"] {
            let d = g(code);
            let ab = wirtinger(&d).abelianization();
            assert_eq!(ab, AbelianGroup { free_rank: d.n(), torsion: Vec::<BigInt>::new() }, "{code}");
        }
    }

    #[test]
    fn sorted_longitude_words() {
        let d = g("t1 t2 / t3 h1+ / h2- h3+");
        assert_eq!(sorted_longitudes(&d).unwrap(), vec![w("1"), w("m1"), w("m1^-1 m2")]);
        assert!(sorted_longitudes(&g("h1+ t2 / t1 h2+")).is_err());
    }

    #[test]
    fn build_round_trip() {
        let ls = vec![w("m2 m3^-1"), w("1"), w("m1 m2^-1 m1")];
        let d = build_sorted_from_longitudes(3, &ls);
        assert!(d.is_sorted());
        let back = sorted_longitudes(&d).unwrap();
        assert_eq!(back[0], ls[0]);
        assert_eq!(back[1], ls[1]);
        // Own-meridian letters are self-arrows, cancelled by the writhe correction.
        assert_eq!(back[2].exponent_sum(2), 0);
        assert_eq!(back[2], w("m1 m2^-1 m1"));
    }

    #[test]
    fn basing_moves_the_longitude_by_conjugation() {
        let d = g("t1 h2+ h3- / h1+ t2 t3");
        let p0 = peripheral_system(&d);
        let p1 = peripheral_system_based(&d, &[1, 0]).unwrap();
        assert_eq!(p0.longitudes[0].len(), 2);
        assert_eq!(p1.longitudes[0], Word(vec![p0.longitudes[0].letters()[1], p0.longitudes[0].letters()[0]]));
        assert!(peripheral_system_based(&d, &[2, 0]).is_err());
        assert!(peripheral_system_based(&d, &[0]).is_err());
    }

    #[test]
    fn reduced_relators() {
        let d = g("t1 h2+ / t2 h1+");
        let r = reduced_presentation(&d).unwrap();
        assert_eq!(r.relators[0], w("m1 m2 m1^-1 m2^-1"));
        assert_eq!(r.families.len(), 2);
    }
}
