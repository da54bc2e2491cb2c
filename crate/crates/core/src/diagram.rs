//! Gauss diagrams: ordered oriented circles carrying signed arrows.
//!
//! Circles and arrows are indexed from zero in the API; the text format
//! numbers arrows from one. Every constructor funnels through
//! [`GaussDiagram::from_raw`], which validates the endpoint structure and
//! renumbers arrows densely in order of first appearance (circle by circle,
//! along each circle from its basepoint).

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sign of a classical crossing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn from_int(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    Tail,
    Head,
}

/// One endpoint of an arrow, as met along a circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EndpointRef {
    pub arrow: usize,
    pub end: End,
}

impl EndpointRef {
    pub fn tail(arrow: usize) -> Self {
        EndpointRef { arrow, end: End::Tail }
    }

    pub fn head(arrow: usize) -> Self {
        EndpointRef { arrow, end: End::Head }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub sign: Sign,
    pub tail_circle: usize,
    pub head_circle: usize,
}

impl Arrow {
    pub fn is_self_arrow(&self) -> bool {
        self.tail_circle == self.head_circle
    }
}

/// Position of an endpoint: (circle, index along the circle).
pub type Location = (usize, usize);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("arrow {0} has no tail")]
    MissingTail(usize),
    #[error("arrow {0} has no head")]
    MissingHead(usize),
    #[error("arrow {0} has more than one tail")]
    DuplicateTail(usize),
    #[error("arrow {0} has more than one head")]
    DuplicateHead(usize),
    #[error("arrow {0} has no sign")]
    MissingSign(usize),
    #[error("arrow {0} is declared with inconsistent signs")]
    InconsistentSign(usize),
    #[error("circle index {0} out of range")]
    CircleOutOfRange(usize),
}

/// A diagram under construction: endpoints keyed by arbitrary arrow keys.
#[derive(Clone, Debug, Default)]
pub struct RawDiagram {
    pub circles: Vec<Vec<(usize, End)>>,
    pub signs: HashMap<usize, Sign>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussDiagram {
    arrows: Vec<Arrow>,
    circles: Vec<Vec<EndpointRef>>,
    locs: Vec<[Location; 2]>,
}

impl GaussDiagram {
    /// `n` circles with no arrows.
    pub fn unlink(n: usize) -> Self {
        GaussDiagram { arrows: Vec::new(), circles: vec![Vec::new(); n], locs: Vec::new() }
    }

    /// Validates a raw diagram and renumbers its arrows. The returned map
    /// sends each raw key to its new arrow index.
    pub fn from_raw(raw: &RawDiagram) -> Result<(GaussDiagram, HashMap<usize, usize>), DiagramError> {
        let mut relabel: HashMap<usize, usize> = HashMap::new();
        let mut seen: Vec<[Option<Location>; 2]> = Vec::new();
        let mut circles = Vec::with_capacity(raw.circles.len());
        for (c, seq) in raw.circles.iter().enumerate() {
            let mut out = Vec::with_capacity(seq.len());
            for (pos, &(key, end)) in seq.iter().enumerate() {
                let next = relabel.len();
                let id = *relabel.entry(key).or_insert(next);
                if id == seen.len() {
                    seen.push([None, None]);
                }
                let slot = match end {
                    End::Tail => 0,
                    End::Head => 1,
                };
                if seen[id][slot].is_some() {
                    return Err(match end {
                        End::Tail => DiagramError::DuplicateTail(key),
                        End::Head => DiagramError::DuplicateHead(key),
                    });
                }
                seen[id][slot] = Some((c, pos));
                out.push(EndpointRef { arrow: id, end });
            }
            circles.push(out);
        }
        let mut keys = vec![0usize; relabel.len()];
        for (&k, &v) in &relabel {
            keys[v] = k;
        }
        let mut arrows = Vec::with_capacity(seen.len());
        let mut locs = Vec::with_capacity(seen.len());
        for (id, s) in seen.iter().enumerate() {
            let key = keys[id];
            let t = s[0].ok_or(DiagramError::MissingTail(key))?;
            let h = s[1].ok_or(DiagramError::MissingHead(key))?;
            let sign = *raw.signs.get(&key).ok_or(DiagramError::MissingSign(key))?;
            arrows.push(Arrow { sign, tail_circle: t.0, head_circle: h.0 });
            locs.push([t, h]);
        }
        Ok((GaussDiagram { arrows, circles, locs }, relabel))
    }

    pub fn to_raw(&self) -> RawDiagram {
        RawDiagram {
            circles: self
                .circles
                .iter()
                .map(|c| c.iter().map(|e| (e.arrow, e.end)).collect())
                .collect(),
            signs: self.arrows.iter().enumerate().map(|(i, a)| (i, a.sign)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.circles.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: usize) -> &Arrow {
        &self.arrows[id]
    }

    pub fn circles(&self) -> &[Vec<EndpointRef>] {
        &self.circles
    }

    pub fn circle(&self, c: usize) -> &[EndpointRef] {
        &self.circles[c]
    }

    pub fn locate(&self, ep: EndpointRef) -> Location {
        match ep.end {
            End::Tail => self.locs[ep.arrow][0],
            End::Head => self.locs[ep.arrow][1],
        }
    }

    /// Endpoint following `loc` cyclically on its circle.
    pub fn next_on_circle(&self, loc: Location) -> EndpointRef {
        let c = &self.circles[loc.0];
        c[(loc.1 + 1) % c.len()]
    }

    /// Whether two distinct endpoints are consecutive (in this order) on a circle.
    pub fn follows(&self, first: EndpointRef, second: EndpointRef) -> bool {
        let (c1, p1) = self.locate(first);
        let (c2, p2) = self.locate(second);
        c1 == c2 && first != second && (p1 + 1) % self.circles[c1].len() == p2
    }

    /// Whether two distinct endpoints are consecutive in either order.
    pub fn adjacent(&self, a: EndpointRef, b: EndpointRef) -> bool {
        self.follows(a, b) || self.follows(b, a)
    }

    /// Signed count of arrows whose both endpoints lie on circle `c`.
    pub fn self_writhe(&self, c: usize) -> i64 {
        self.arrows
            .iter()
            .filter(|a| a.tail_circle == c && a.head_circle == c)
            .map(|a| a.sign.value() as i64)
            .sum()
    }

    /// Every circle is one arc of tails followed (cyclically) by one arc of heads.
    pub fn is_sorted(&self) -> bool {
        self.circles.iter().all(|c| cyclic_block_count(c) <= 1)
    }

    pub fn is_circle_sorted(&self, c: usize) -> bool {
        cyclic_block_count(&self.circles[c]) <= 1
    }

    /// Gauss code text, e.g. `t1 h2+ / h1+ t2`.
    pub fn to_gauss_code(&self) -> String {
        let parts: Vec<String> = self
            .circles
            .iter()
            .map(|c| {
                c.iter()
                    .map(|e| match e.end {
                        End::Tail => format!("t{}", e.arrow + 1),
                        End::Head => format!("h{}{}", e.arrow + 1, self.arrows[e.arrow].sign.symbol()),
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        parts.join(" / ").split_whitespace().collect::<Vec<_>>().join(" ")
    }

    /// Key equal for two diagrams iff they agree up to arrow renumbering
    /// and a rotation of each circle's basepoint.
    pub fn canonical_key(&self) -> Vec<u8> {
        // Circles are settled in order; for each, every rotation is encoded
        // under the labels fixed so far (fresh arrows numbered in order of
        // appearance) and only the lexicographically least encodings survive.
        struct State {
            labels: Vec<u32>,
            next: u32,
            out: Vec<u32>,
        }
        let unset = u32::MAX;
        let mut states = vec![State { labels: vec![unset; self.arrows.len()], next: 0, out: Vec::new() }];
        for circle in &self.circles {
            let len = circle.len();
            let mut best: Option<Vec<u32>> = None;
            let mut next_states: Vec<State> = Vec::new();
            for st in &states {
                for rot in 0..len.max(1) {
                    let mut labels = st.labels.clone();
                    let mut next = st.next;
                    let mut enc = vec![len as u32];
                    for k in 0..len {
                        let e = circle[(rot + k) % len];
                        if labels[e.arrow] == unset {
                            labels[e.arrow] = next;
                            next += 1;
                        }
                        let sign = match self.arrows[e.arrow].sign {
                            Sign::Pos => 0,
                            Sign::Neg => 1,
                        };
                        let kind = match e.end {
                            End::Tail => 0,
                            End::Head => 1,
                        };
                        enc.push((labels[e.arrow] << 2) | (kind << 1) | sign);
                    }
                    let better = match &best {
                        None => true,
                        Some(b) => enc < *b,
                    };
                    if better {
                        best = Some(enc.clone());
                        next_states.clear();
                    }
                    if best.as_ref() == Some(&enc) {
                        let mut out = st.out.clone();
                        out.extend_from_slice(&enc);
                        if !next_states.iter().any(|s| s.labels == labels) {
                            next_states.push(State { labels, next, out });
                        }
                    }
                }
            }
            states = next_states;
        }
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&(self.circles.len() as u32).to_be_bytes());
        for w in &states[0].out {
            bytes.extend_from_slice(&w.to_be_bytes());
        }
        bytes
    }

    pub fn to_json(&self) -> DiagramJson {
        DiagramJson {
            n: self.n(),
            arrows: self
                .arrows
                .iter()
                .enumerate()
                .map(|(i, a)| ArrowJson {
                    id: i + 1,
                    sign: a.sign.value() as i64,
                    tail_circle: Some(a.tail_circle + 1),
                    head_circle: Some(a.head_circle + 1),
                })
                .collect(),
            circles: self
                .circles
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|e| match e.end {
                            End::Tail => format!("t{}", e.arrow + 1),
                            End::Head => format!("h{}", e.arrow + 1),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &DiagramJson) -> Result<GaussDiagram, crate::ParseError> {
        let mut raw = RawDiagram::default();
        for a in &json.arrows {
            let sign = Sign::from_int(a.sign).ok_or_else(|| {
                crate::ParseError::syntax(0, format!("arrow {} has sign {} (expected 1 or -1)", a.id, a.sign))
            })?;
            if raw.signs.insert(a.id, sign).is_some() {
                return Err(crate::ParseError::syntax(0, format!("arrow {} listed twice", a.id)));
            }
        }
        if json.circles.len() != json.n {
            return Err(crate::ParseError::syntax(
                0,
                format!("n = {} but {} circles given", json.n, json.circles.len()),
            ));
        }
        for c in &json.circles {
            let mut seq = Vec::new();
            for tok in c {
                let (end, rest) = match tok.split_at(1.min(tok.len())) {
                    ("t", r) => (End::Tail, r),
                    ("h", r) => (End::Head, r),
                    _ => return Err(crate::ParseError::syntax(0, format!("bad endpoint token {tok:?}"))),
                };
                let id: usize = rest
                    .parse()
                    .map_err(|_| crate::ParseError::syntax(0, format!("bad endpoint token {tok:?}")))?;
                seq.push((id, end));
            }
            raw.circles.push(seq);
        }
        let (d, relabel) = GaussDiagram::from_raw(&raw)?;
        for a in &json.arrows {
            let Some(&id) = relabel.get(&a.id) else {
                return Err(crate::ParseError::syntax(0, format!("arrow {} has no endpoints", a.id)));
            };
            let arrow = d.arrows[id];
            if a.tail_circle.is_some_and(|c| c != arrow.tail_circle + 1)
                || a.head_circle.is_some_and(|c| c != arrow.head_circle + 1)
            {
                return Err(crate::ParseError::syntax(0, format!("arrow {} declares the wrong circles", a.id)));
            }
        }
        Ok(d)
    }
}

impl fmt::Debug for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaussDiagram({:?})", self.to_gauss_code())
    }
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_gauss_code())
    }
}

/// Number of maximal tail runs counted cyclically.
fn cyclic_block_count(c: &[EndpointRef]) -> usize {
    let len = c.len();
    (0..len)
        .filter(|&k| c[k].end == End::Tail && c[(k + len - 1) % len].end == End::Head)
        .count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowJson {
    pub id: usize,
    pub sign: i64,
    #[serde(rename = "tail", default, skip_serializing_if = "Option::is_none")]
    pub tail_circle: Option<usize>,
    #[serde(rename = "head", default, skip_serializing_if = "Option::is_none")]
    pub head_circle: Option<usize>,
}

/// Machine form of a diagram: `{"n":2,"arrows":[{"id":1,"sign":1,...}],"circles":[["t1","h2"],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub n: usize,
    pub arrows: Vec<ArrowJson>,
    pub circles: Vec<Vec<String>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_gauss_code;

    fn g(s: &str) -> GaussDiagram {
        parse_gauss_code(s).unwrap()
    }

    fn raw(circles: Vec<Vec<(usize, End)>>, signs: &[(usize, Sign)]) -> RawDiagram {
        RawDiagram { circles, signs: signs.iter().copied().collect() }
    }

    #[test]
    fn signs() {
        assert_eq!(Sign::from_int(-1), Some(Sign::Neg));
        assert_eq!(Sign::from_int(0), None);
        assert_eq!(Sign::Pos * Sign::Neg, Sign::Neg);
        assert_eq!(Sign::Neg.flip().value(), 1);
    }

    #[test]
    fn from_raw_renumbers_by_first_appearance() {
        let r = raw(vec![vec![(7, End::Head), (3, End::Tail)], vec![(3, End::Head), (7, End::Tail)]], &[(7, Sign::Neg), (3, Sign::Pos)]);
        let (d, relabel) = GaussDiagram::from_raw(&r).unwrap();
        assert_eq!(relabel[&7], 0);
        assert_eq!(relabel[&3], 1);
        assert_eq!(d.to_gauss_code(), "h1- t2 / h2+ t1");
        assert_eq!(d.arrow(0).tail_circle, 1);
        assert_eq!(d.arrow(0).head_circle, 0);
    }

    #[test]
    fn from_raw_rejects_broken_arrows() {
        let e = |circles, signs: &[(usize, Sign)]| GaussDiagram::from_raw(&raw(circles, signs)).unwrap_err();
        assert_eq!(e(vec![vec![(0, End::Tail)]], &[(0, Sign::Pos)]), DiagramError::MissingHead(0));
        assert_eq!(e(vec![vec![(0, End::Head)]], &[(0, Sign::Pos)]), DiagramError::MissingTail(0));
        assert_eq!(e(vec![vec![(0, End::Tail), (0, End::Tail), (0, End::Head)]], &[(0, Sign::Pos)]), DiagramError::DuplicateTail(0));
        assert_eq!(e(vec![vec![(0, End::Tail), (0, End::Head)]], &[]), DiagramError::MissingSign(0));
    }

    #[test]
    fn neighbours_wrap_around() {
        let d = g("t1 h2+ t3 / h1- t2 h3+");
        let (t1, h3) = (EndpointRef::tail(0), EndpointRef::head(2));
        assert!(d.follows(EndpointRef::tail(2), t1));
        assert!(d.adjacent(t1, EndpointRef::tail(2)));
        assert!(!d.adjacent(t1, h3));
        assert_eq!(d.locate(h3), (1, 2));
        assert_eq!(d.next_on_circle((1, 2)), EndpointRef::head(0));
    }

    #[test]
    fn sortedness_is_cyclic() {
        assert!(g("t1 h2+ / h1+ t2").is_sorted());
        assert!(g("h1+ t2 t1 h2-").is_sorted());
        assert!(!g("t1 h1+ t2 h2+").is_sorted());
        assert!(GaussDiagram::unlink(3).is_sorted());
        let d = g("t1 h2+ t2 h3+ / t3 h1-");
        assert!(!d.is_circle_sorted(0));
        assert!(d.is_circle_sorted(1));
    }

    #[test]
    fn self_writhe_counts_self_arrows_only() {
        let d = g("t1 h1+ t2 h2+ t3 / h3-");
        assert_eq!(d.self_writhe(0), 2);
        assert_eq!(d.self_writhe(1), 0);
        assert!(d.arrow(0).is_self_arrow());
        assert!(!d.arrow(2).is_self_arrow());
    }

    #[test]
    fn canonical_key_examples() {
        assert_eq!(g("t1 h2+ / h1+ t2").canonical_key(), g("h2+ t1 / t2 h1+").canonical_key());
        assert_ne!(g("t1 h2+ / h1+ t2").canonical_key(), g("t1 h2- / h1+ t2").canonical_key());
        // Circle order matters.
        assert_ne!(g("t1 h1+ / ").canonical_key(), g(" / t1 h1+").canonical_key());
    }

    #[test]
    fn json_round_trip() {
        let d = g("t1 h2+ t3 / h1- t2 h3+ /");
        let j = d.to_json();
        assert_eq!(j.n, 3);
        assert_eq!(GaussDiagram::from_json(&j).unwrap(), d);
    }
}
