//! The welded move calculus on Gauss diagrams.
//!
//! Site conventions, transcribed from the local pictures into endpoint
//! adjacency (cyclic, along one circle):
//!
//! * **R1**: a self-arrow whose two endpoints are consecutive, in either
//!   order and with either sign.
//! * **R2**: two arrows of opposite signs whose tails are consecutive and
//!   whose heads are consecutive (each pair in either order).
//! * **R3**: arrows `upper` (strand 1 to strand 2), `long` (strand 1 to
//!   strand 3) and `lower` (strand 2 to strand 3) with consecutive tails of
//!   `upper`/`long`, consecutive head of `upper` and tail of `lower`, and
//!   consecutive heads of `long`/`lower`. The move swaps all three pairs.
//!   Writing `s2 = +1` when the head of `upper` comes first on strand 2 and
//!   `s3 = +1` when the head of `long` comes first on strand 3, the site must
//!   satisfy `sign(upper) * sign(long) = s2 * s3` (the oriented sign
//!   condition of the R3 picture).
//! * **OC**: two consecutive tails are exchanged.
//! * **SV**: a self-arrow is erased (or inserted anywhere on its circle).
//!
//! Insertions name *slots of the resulting circle*: a pair inserted at slot
//! `s` occupies `s` and `s + 1` (mod the new length), so a deletion is undone
//! exactly, basepoints included.
//!
//! Tail-across-head (TaH) and Slide are macros: they expand into R2, R3 and
//! OC steps, and traces record only primitive steps.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{End, EndpointRef, GaussDiagram, RawDiagram, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    #[serde(rename = "R1-add")]
    R1Add,
    #[serde(rename = "R1-del")]
    R1Del,
    #[serde(rename = "R2-add")]
    R2Add,
    #[serde(rename = "R2-del")]
    R2Del,
    #[serde(rename = "R3")]
    R3,
    #[serde(rename = "OC")]
    Oc,
    #[serde(rename = "SV-del")]
    SvDel,
    #[serde(rename = "SV-add")]
    SvAdd,
}

impl MoveKind {
    pub const ALL: [MoveKind; 8] = [
        MoveKind::R1Add,
        MoveKind::R1Del,
        MoveKind::R2Add,
        MoveKind::R2Del,
        MoveKind::R3,
        MoveKind::Oc,
        MoveKind::SvDel,
        MoveKind::SvAdd,
    ];

    /// Moves that generate welded equivalence (SV excluded).
    pub const WELDED: [MoveKind; 6] =
        [MoveKind::R1Add, MoveKind::R1Del, MoveKind::R2Add, MoveKind::R2Del, MoveKind::R3, MoveKind::Oc];
}

/// Signs travel through JSON as `1` / `-1`.
mod sign_serde {
    use super::Sign;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Sign, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_i64(s.value() as i64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Sign, D::Error> {
        let v = i64::deserialize(de)?;
        Sign::from_int(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {v}")))
    }
}

/// A move site. Circle and arrow indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MoveInstance {
    #[serde(rename = "R1-add")]
    R1Add {
        circle: usize,
        slot: usize,
        #[serde(with = "sign_serde")]
        sign: Sign,
        head_first: bool,
    },
    #[serde(rename = "R1-del")]
    R1Del { arrow: usize },
    /// Inserts arrows `a` (with `sign`) and `b` (opposite sign); tails in
    /// order `a, b`, heads in order `a, b` (or `b, a` when `crossed`).
    #[serde(rename = "R2-add")]
    R2Add {
        tail_circle: usize,
        tail_slot: usize,
        head_circle: usize,
        head_slot: usize,
        #[serde(with = "sign_serde")]
        sign: Sign,
        crossed: bool,
    },
    #[serde(rename = "R2-del")]
    R2Del { first: usize, second: usize },
    #[serde(rename = "R3")]
    R3 { upper: usize, long: usize, lower: usize },
    /// Tails of `first` and `second` are consecutive in that order.
    #[serde(rename = "OC")]
    Oc { first: usize, second: usize },
    #[serde(rename = "SV-del")]
    SvDel { arrow: usize },
    #[serde(rename = "SV-add")]
    SvAdd {
        circle: usize,
        tail_slot: usize,
        head_slot: usize,
        #[serde(with = "sign_serde")]
        sign: Sign,
    },
    /// Moves the basepoint of a circle forward by `shift` endpoints. Not a
    /// diagram move: it changes the basing (the longitude changes by a
    /// conjugation).
    #[serde(rename = "rebase")]
    Rebase { circle: usize, shift: usize },
}

impl MoveInstance {
    pub fn kind(&self) -> Option<MoveKind> {
        Some(match self {
            MoveInstance::R1Add { .. } => MoveKind::R1Add,
            MoveInstance::R1Del { .. } => MoveKind::R1Del,
            MoveInstance::R2Add { .. } => MoveKind::R2Add,
            MoveInstance::R2Del { .. } => MoveKind::R2Del,
            MoveInstance::R3 { .. } => MoveKind::R3,
            MoveInstance::Oc { .. } => MoveKind::Oc,
            MoveInstance::SvDel { .. } => MoveKind::SvDel,
            MoveInstance::SvAdd { .. } => MoveKind::SvAdd,
            MoveInstance::Rebase { .. } => return None,
        })
    }
}

impl fmt::Display for MoveInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("move does not apply: {0}")]
    Inapplicable(String),
    #[error("arrow index {0} out of range")]
    NoSuchArrow(usize),
    #[error("circle index {0} out of range")]
    NoSuchCircle(usize),
}

fn inapplicable(msg: impl Into<String>) -> MoveError {
    MoveError::Inapplicable(msg.into())
}

/// Result of applying a move, with arrow bookkeeping.
#[derive(Clone, Debug)]
pub struct Applied {
    pub diagram: GaussDiagram,
    /// New index of each old arrow (`None` if deleted).
    pub relabel: Vec<Option<usize>>,
    /// New indices of inserted arrows, in the order the move defines them.
    pub inserted: Vec<usize>,
}

pub fn apply_move(d: &GaussDiagram, m: &MoveInstance) -> Result<GaussDiagram, MoveError> {
    apply_tracked(d, m).map(|a| a.diagram)
}

fn check_arrow(d: &GaussDiagram, a: usize) -> Result<(), MoveError> {
    if a < d.arrow_count() {
        Ok(())
    } else {
        Err(MoveError::NoSuchArrow(a))
    }
}

fn check_circle(d: &GaussDiagram, c: usize) -> Result<(), MoveError> {
    if c < d.n() {
        Ok(())
    } else {
        Err(MoveError::NoSuchCircle(c))
    }
}

/// Places new endpoints at fixed slots of a circle of the result; the old
/// endpoints fill the remaining slots in their original order.
fn fill_slots(old: &[(usize, End)], placed: &[(usize, (usize, End))]) -> Result<Vec<(usize, End)>, MoveError> {
    let len = old.len() + placed.len();
    let mut out: Vec<Option<(usize, End)>> = vec![None; len];
    for &(slot, ep) in placed {
        if slot >= len {
            return Err(inapplicable(format!("slot {slot} out of range for a circle of length {len}")));
        }
        if out[slot].is_some() {
            return Err(inapplicable(format!("slot {slot} used twice")));
        }
        out[slot] = Some(ep);
    }
    let mut rest = old.iter();
    Ok(out.into_iter().map(|e| e.unwrap_or_else(|| *rest.next().expect("slot count matches"))).collect())
}

fn finish(raw: RawDiagram, old_count: usize, inserted_keys: &[usize]) -> Applied {
    let (diagram, map) = GaussDiagram::from_raw(&raw).expect("moves preserve diagram validity");
    Applied {
        relabel: (0..old_count).map(|k| map.get(&k).copied()).collect(),
        inserted: inserted_keys.iter().map(|k| map[k]).collect(),
        diagram,
    }
}

fn is_r1_site(d: &GaussDiagram, a: usize) -> bool {
    d.arrow(a).is_self_arrow() && d.adjacent(EndpointRef::tail(a), EndpointRef::head(a))
}

fn is_r2_site(d: &GaussDiagram, a: usize, b: usize) -> bool {
    a != b
        && d.arrow(a).sign != d.arrow(b).sign
        && d.adjacent(EndpointRef::tail(a), EndpointRef::tail(b))
        && d.adjacent(EndpointRef::head(a), EndpointRef::head(b))
}

/// Checks an R3 site; `Err` carries the reason it fails.
fn check_r3(d: &GaussDiagram, upper: usize, long: usize, lower: usize) -> Result<(), MoveError> {
    if upper == long || upper == lower || long == lower {
        return Err(inapplicable("R3 needs three distinct arrows"));
    }
    let (tu, hu) = (EndpointRef::tail(upper), EndpointRef::head(upper));
    let (tl, hl) = (EndpointRef::tail(long), EndpointRef::head(long));
    let (tw, hw) = (EndpointRef::tail(lower), EndpointRef::head(lower));
    if !d.adjacent(tu, tl) {
        return Err(inapplicable("tails of the upper and long arrows are not consecutive"));
    }
    if !d.adjacent(hu, tw) {
        return Err(inapplicable("head of the upper arrow and tail of the lower arrow are not consecutive"));
    }
    if !d.adjacent(hl, hw) {
        return Err(inapplicable("heads of the long and lower arrows are not consecutive"));
    }
    // On a circle of length two both orders are consecutive; either reading is allowed.
    let s2: Vec<i32> = [(d.follows(hu, tw), 1), (d.follows(tw, hu), -1)]
        .iter()
        .filter(|x| x.0)
        .map(|x| x.1)
        .collect();
    let s3: Vec<i32> = [(d.follows(hl, hw), 1), (d.follows(hw, hl), -1)]
        .iter()
        .filter(|x| x.0)
        .map(|x| x.1)
        .collect();
    let eps = d.arrow(upper).sign.value() * d.arrow(long).sign.value();
    if s2.iter().any(|a| s3.iter().any(|b| a * b == eps)) {
        Ok(())
    } else {
        Err(inapplicable("R3 sign condition fails"))
    }
}

fn swap_endpoints(raw: &mut RawDiagram, d: &GaussDiagram, a: EndpointRef, b: EndpointRef) {
    let (ca, pa) = d.locate(a);
    let (cb, pb) = d.locate(b);
    let ea = raw.circles[ca][pa];
    raw.circles[ca][pa] = raw.circles[cb][pb];
    raw.circles[cb][pb] = ea;
}

pub fn apply_tracked(d: &GaussDiagram, m: &MoveInstance) -> Result<Applied, MoveError> {
    let mut raw = d.to_raw();
    let count = d.arrow_count();
    let fresh_a = count;
    let fresh_b = count + 1;
    match *m {
        MoveInstance::R1Add { circle, slot, sign, head_first } => {
            check_circle(d, circle)?;
            let len = d.circle(circle).len() + 2;
            let (first, second) = if head_first { (End::Head, End::Tail) } else { (End::Tail, End::Head) };
            raw.circles[circle] =
                fill_slots(&raw.circles[circle], &[(slot, (fresh_a, first)), ((slot + 1) % len.max(1), (fresh_a, second))])?;
            raw.signs.insert(fresh_a, sign);
            Ok(finish(raw, count, &[fresh_a]))
        }
        MoveInstance::R1Del { arrow } => {
            check_arrow(d, arrow)?;
            if !is_r1_site(d, arrow) {
                return Err(inapplicable(format!("arrow {} is not an isolated kink", arrow + 1)));
            }
            delete_arrows(&mut raw, &[arrow]);
            Ok(finish(raw, count, &[]))
        }
        MoveInstance::R2Add { tail_circle, tail_slot, head_circle, head_slot, sign, crossed } => {
            check_circle(d, tail_circle)?;
            check_circle(d, head_circle)?;
            raw.signs.insert(fresh_a, sign);
            raw.signs.insert(fresh_b, sign.flip());
            let heads = if crossed { (fresh_b, fresh_a) } else { (fresh_a, fresh_b) };
            if tail_circle == head_circle {
                let len = d.circle(tail_circle).len() + 4;
                let placed = [
                    (tail_slot, (fresh_a, End::Tail)),
                    ((tail_slot + 1) % len, (fresh_b, End::Tail)),
                    (head_slot, (heads.0, End::Head)),
                    ((head_slot + 1) % len, (heads.1, End::Head)),
                ];
                raw.circles[tail_circle] = fill_slots(&raw.circles[tail_circle], &placed)?;
            } else {
                let lt = d.circle(tail_circle).len() + 2;
                let lh = d.circle(head_circle).len() + 2;
                raw.circles[tail_circle] = fill_slots(
                    &raw.circles[tail_circle],
                    &[(tail_slot, (fresh_a, End::Tail)), ((tail_slot + 1) % lt, (fresh_b, End::Tail))],
                )?;
                raw.circles[head_circle] = fill_slots(
                    &raw.circles[head_circle],
                    &[(head_slot, (heads.0, End::Head)), ((head_slot + 1) % lh, (heads.1, End::Head))],
                )?;
            }
            Ok(finish(raw, count, &[fresh_a, fresh_b]))
        }
        MoveInstance::R2Del { first, second } => {
            check_arrow(d, first)?;
            check_arrow(d, second)?;
            if !is_r2_site(d, first, second) {
                return Err(inapplicable(format!("arrows {} and {} do not form an R2 pair", first + 1, second + 1)));
            }
            delete_arrows(&mut raw, &[first, second]);
            Ok(finish(raw, count, &[]))
        }
        MoveInstance::R3 { upper, long, lower } => {
            check_arrow(d, upper)?;
            check_arrow(d, long)?;
            check_arrow(d, lower)?;
            check_r3(d, upper, long, lower)?;
            swap_endpoints(&mut raw, d, EndpointRef::tail(upper), EndpointRef::tail(long));
            swap_endpoints(&mut raw, d, EndpointRef::head(upper), EndpointRef::tail(lower));
            swap_endpoints(&mut raw, d, EndpointRef::head(long), EndpointRef::head(lower));
            Ok(finish(raw, count, &[]))
        }
        MoveInstance::Oc { first, second } => {
            check_arrow(d, first)?;
            check_arrow(d, second)?;
            if !d.follows(EndpointRef::tail(first), EndpointRef::tail(second)) {
                return Err(inapplicable(format!(
                    "tail of arrow {} is not followed by the tail of arrow {}",
                    first + 1,
                    second + 1
                )));
            }
            swap_endpoints(&mut raw, d, EndpointRef::tail(first), EndpointRef::tail(second));
            Ok(finish(raw, count, &[]))
        }
        MoveInstance::SvDel { arrow } => {
            check_arrow(d, arrow)?;
            if !d.arrow(arrow).is_self_arrow() {
                return Err(inapplicable(format!("arrow {} is not a self-arrow", arrow + 1)));
            }
            delete_arrows(&mut raw, &[arrow]);
            Ok(finish(raw, count, &[]))
        }
        MoveInstance::SvAdd { circle, tail_slot, head_slot, sign } => {
            check_circle(d, circle)?;
            raw.circles[circle] =
                fill_slots(&raw.circles[circle], &[(tail_slot, (fresh_a, End::Tail)), (head_slot, (fresh_a, End::Head))])?;
            raw.signs.insert(fresh_a, sign);
            Ok(finish(raw, count, &[fresh_a]))
        }
        MoveInstance::Rebase { circle, shift } => {
            check_circle(d, circle)?;
            let len = d.circle(circle).len();
            if shift >= len.max(1) {
                return Err(inapplicable(format!("shift {shift} out of range for a circle of length {len}")));
            }
            raw.circles[circle].rotate_left(shift);
            Ok(finish(raw, count, &[]))
        }
    }
}

fn delete_arrows(raw: &mut RawDiagram, arrows: &[usize]) {
    for c in raw.circles.iter_mut() {
        c.retain(|(k, _)| !arrows.contains(k));
    }
    for a in arrows {
        raw.signs.remove(a);
    }
}

/// The move undoing `m`, expressed on the diagram `m` produced.
pub fn inverse_move(before: &GaussDiagram, m: &MoveInstance, applied: &Applied) -> MoveInstance {
    let after = &applied.diagram;
    let new = |a: usize| applied.relabel[a].expect("arrow survives the move");
    match *m {
        MoveInstance::R1Add { .. } => MoveInstance::R1Del { arrow: applied.inserted[0] },
        MoveInstance::SvAdd { .. } => MoveInstance::SvDel { arrow: applied.inserted[0] },
        MoveInstance::R2Add { .. } => MoveInstance::R2Del { first: applied.inserted[0], second: applied.inserted[1] },
        MoveInstance::R1Del { arrow } => {
            let t = before.locate(EndpointRef::tail(arrow));
            let h = before.locate(EndpointRef::head(arrow));
            let head_first = before.follows(EndpointRef::head(arrow), EndpointRef::tail(arrow))
                && !before.follows(EndpointRef::tail(arrow), EndpointRef::head(arrow));
            let slot = if head_first { h.1 } else { t.1 };
            MoveInstance::R1Add { circle: t.0, slot, sign: before.arrow(arrow).sign, head_first }
        }
        MoveInstance::SvDel { arrow } => {
            let t = before.locate(EndpointRef::tail(arrow));
            let h = before.locate(EndpointRef::head(arrow));
            MoveInstance::SvAdd { circle: t.0, tail_slot: t.1, head_slot: h.1, sign: before.arrow(arrow).sign }
        }
        MoveInstance::R2Del { first, second } => {
            // `a` is the arrow whose tail comes first.
            let (a, b) = if before.follows(EndpointRef::tail(first), EndpointRef::tail(second)) {
                (first, second)
            } else {
                (second, first)
            };
            let ta = before.locate(EndpointRef::tail(a));
            let crossed = !before.follows(EndpointRef::head(a), EndpointRef::head(b));
            let first_head = if crossed { b } else { a };
            let hf = before.locate(EndpointRef::head(first_head));
            MoveInstance::R2Add {
                tail_circle: ta.0,
                tail_slot: ta.1,
                head_circle: hf.0,
                head_slot: hf.1,
                sign: before.arrow(a).sign,
                crossed,
            }
        }
        MoveInstance::R3 { upper, long, lower } => MoveInstance::R3 { upper: new(upper), long: new(long), lower: new(lower) },
        MoveInstance::Oc { first, second } => MoveInstance::Oc { first: new(second), second: new(first) },
        MoveInstance::Rebase { circle, shift } => {
            let len = after.circle(circle).len().max(1);
            MoveInstance::Rebase { circle, shift: (len - shift) % len }
        }
    }
}

/// All applicable instances of the requested kinds. Deletions, R3 and OC
/// are exhaustive; insertions range over every slot and both signs (and
/// both endpoint orders where the site has one).
pub fn enumerate_moves(d: &GaussDiagram, kinds: &[MoveKind]) -> Vec<MoveInstance> {
    let mut out = Vec::new();
    let m = d.arrow_count();
    let signs = [Sign::Pos, Sign::Neg];
    for &kind in kinds {
        match kind {
            MoveKind::R1Del => {
                out.extend((0..m).filter(|&a| is_r1_site(d, a)).map(|arrow| MoveInstance::R1Del { arrow }));
            }
            MoveKind::SvDel => {
                out.extend((0..m).filter(|&a| d.arrow(a).is_self_arrow()).map(|arrow| MoveInstance::SvDel { arrow }));
            }
            MoveKind::R2Del => {
                for a in 0..m {
                    for b in a + 1..m {
                        if is_r2_site(d, a, b) {
                            out.push(MoveInstance::R2Del { first: a, second: b });
                        }
                    }
                }
            }
            MoveKind::Oc => {
                for c in d.circles() {
                    let len = c.len();
                    if len < 2 {
                        continue;
                    }
                    for p in 0..len {
                        let (x, y) = (c[p], c[(p + 1) % len]);
                        if x.end == End::Tail && y.end == End::Tail && x != y {
                            out.push(MoveInstance::Oc { first: x.arrow, second: y.arrow });
                        }
                    }
                }
            }
            MoveKind::R3 => {
                for upper in 0..m {
                    for long in 0..m {
                        if long == upper || !d.adjacent(EndpointRef::tail(upper), EndpointRef::tail(long)) {
                            continue;
                        }
                        for lower in 0..m {
                            if lower != upper && lower != long && check_r3(d, upper, long, lower).is_ok() {
                                out.push(MoveInstance::R3 { upper, long, lower });
                            }
                        }
                    }
                }
            }
            MoveKind::R1Add => {
                for (circle, c) in d.circles().iter().enumerate() {
                    for slot in 0..c.len() + 2 {
                        for sign in signs {
                            for head_first in [false, true] {
                                out.push(MoveInstance::R1Add { circle, slot, sign, head_first });
                            }
                        }
                    }
                }
            }
            MoveKind::SvAdd => {
                for (circle, c) in d.circles().iter().enumerate() {
                    let len = c.len() + 2;
                    for tail_slot in 0..len {
                        for head_slot in 0..len {
                            if head_slot != tail_slot {
                                for sign in signs {
                                    out.push(MoveInstance::SvAdd { circle, tail_slot, head_slot, sign });
                                }
                            }
                        }
                    }
                }
            }
            MoveKind::R2Add => {
                for tail_circle in 0..d.n() {
                    for head_circle in 0..d.n() {
                        let same = tail_circle == head_circle;
                        let lt = d.circle(tail_circle).len() + if same { 4 } else { 2 };
                        let lh = d.circle(head_circle).len() + if same { 4 } else { 2 };
                        for tail_slot in 0..lt {
                            for head_slot in 0..lh {
                                if same {
                                    let ts = [tail_slot, (tail_slot + 1) % lt];
                                    let hs = [head_slot, (head_slot + 1) % lh];
                                    if ts.iter().any(|s| hs.contains(s)) {
                                        continue;
                                    }
                                }
                                for sign in signs {
                                    for crossed in [false, true] {
                                        out.push(MoveInstance::R2Add {
                                            tail_circle,
                                            tail_slot,
                                            head_circle,
                                            head_slot,
                                            sign,
                                            crossed,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Where a trace step came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    #[serde(rename = "primitive")]
    Primitive,
    #[serde(rename = "TaH")]
    Tah,
    #[serde(rename = "Slide")]
    Slide,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(flatten)]
    pub instance: MoveInstance,
    pub origin: Origin,
    /// Gauss code of the diagram after this step; filled in when the trace
    /// is written out, and checked on replay when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<String>,
}

/// A replayable sequence of moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveTrace {
    pub initial: GaussDiagram,
    pub steps: Vec<TraceStep>,
    current: GaussDiagram,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("trace step {step} fails: {reason}")]
pub struct TraceError {
    pub step: usize,
    pub reason: String,
}

impl MoveTrace {
    pub fn new(initial: GaussDiagram) -> Self {
        MoveTrace { current: initial.clone(), initial, steps: Vec::new() }
    }

    pub fn final_diagram(&self) -> &GaussDiagram {
        &self.current
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Applies `m` to the current diagram and records it.
    pub fn push(&mut self, m: MoveInstance, origin: Origin) -> Result<Applied, MoveError> {
        let applied = apply_tracked(&self.current, &m)?;
        self.steps.push(TraceStep { instance: m, origin, result: None });
        self.current = applied.diagram.clone();
        Ok(applied)
    }

    pub fn extend(&mut self, other: MoveTrace) {
        debug_assert_eq!(other.initial, self.current);
        self.current = other.current;
        self.steps.extend(other.steps);
    }

    /// Replays every step, checking that each applies and reproduces the recorded successor.
    pub fn verify(&self) -> Result<(), TraceError> {
        let mut d = self.initial.clone();
        for (step, s) in self.steps.iter().enumerate() {
            d = apply_move(&d, &s.instance).map_err(|e| TraceError { step, reason: e.to_string() })?;
            if let Some(recorded) = &s.result {
                let code = d.to_gauss_code();
                if &code != recorded {
                    return Err(TraceError { step, reason: format!("produced {code} but {recorded} was recorded") });
                }
            }
        }
        if d != self.current {
            return Err(TraceError { step: self.steps.len(), reason: "final diagram differs".into() });
        }
        Ok(())
    }

    /// One JSON object per line: a header with the initial diagram, then one
    /// line per step carrying the Gauss code it produces.
    pub fn to_json_lines(&self) -> String {
        let mut out = serde_json::json!({ "initial": self.initial.to_gauss_code() }).to_string();
        out.push('\n');
        let mut d = self.initial.clone();
        for s in &self.steps {
            d = apply_move(&d, &s.instance).expect("recorded steps apply");
            let step = TraceStep { result: Some(d.to_gauss_code()), ..s.clone() };
            out.push_str(&serde_json::to_string(&step).expect("trace steps serialize"));
            out.push('\n');
        }
        out
    }

    /// Reads the JSON-lines form back. The result is not verified; call [`MoveTrace::verify`].
    pub fn from_json_lines(text: &str) -> Result<MoveTrace, crate::ParseError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: serde_json::Value = lines
            .next()
            .ok_or_else(|| crate::ParseError::syntax(0, "empty trace"))
            .and_then(|l| serde_json::from_str(l).map_err(|e| crate::ParseError::syntax(0, e.to_string())))?;
        let initial = header
            .get("initial")
            .and_then(|v| v.as_str())
            .ok_or_else(|| crate::ParseError::syntax(0, "trace header lacks \"initial\""))?;
        let initial = crate::parse_gauss_code(initial)?;
        let mut steps = Vec::new();
        for (k, l) in lines.enumerate() {
            let s: TraceStep =
                serde_json::from_str(l).map_err(|e| crate::ParseError::syntax(k + 1, e.to_string()))?;
            steps.push(s);
        }
        // A trace that fails to replay keeps its last recorded diagram, so
        // that `verify` reports the failing step.
        let mut current = initial.clone();
        for s in &steps {
            match apply_move(&current, &s.instance) {
                Ok(d) => current = d,
                Err(_) => {
                    if let Some(code) = steps.last().and_then(|s| s.result.as_deref()) {
                        current = crate::parse_gauss_code(code)?;
                    }
                    break;
                }
            }
        }
        Ok(MoveTrace { initial, steps, current })
    }
}

pub fn verify_trace(trace: &MoveTrace) -> bool {
    trace.verify().is_ok()
}

/// Direction of a tail-across-head move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Crossing {
    /// The tail is followed by the head and moves forward across it.
    Forward,
    /// The tail is preceded by the head and moves backward across it.
    Backward,
}

/// Moves the tail of `tail_arrow` across the adjacent head on its circle.
///
/// Writing `y` for the arrow owning that head, two companion arrows `p`
/// (sign of `y`) and `q` (opposite sign) are created by R2 with tails next
/// to the tail of `y` and heads next to the head of `tail_arrow`; an R3 on
/// `(y, q, tail_arrow)` then carries the tail across while the head of
/// `tail_arrow` ends up flanked by `p` and `q`.
pub fn apply_tah(d: &GaussDiagram, tail_arrow: usize, dir: Crossing) -> Result<MoveTrace, MoveError> {
    check_arrow(d, tail_arrow)?;
    let x = tail_arrow;
    let (xc, xp) = d.locate(EndpointRef::tail(x));
    let len = d.circle(xc).len();
    let neighbour = match dir {
        Crossing::Forward => d.circle(xc)[(xp + 1) % len],
        Crossing::Backward => d.circle(xc)[(xp + len - 1) % len],
    };
    if neighbour.end != End::Head || len < 2 {
        return Err(inapplicable("the tail is not next to a head in that direction"));
    }
    let y = neighbour.arrow;
    if y == x {
        return Err(inapplicable("the tail is next to its own head (an R1 site, not TaH)"));
    }
    let eps_y = d.arrow(y).sign;
    let (tyc, typ) = d.locate(EndpointRef::tail(y));
    let (hxc, hxp) = d.locate(EndpointRef::head(x));
    // Insertion gaps (before index g of the current circle), then slots of the result.
    let (tail_gap, head_gap, sign_a) = match dir {
        Crossing::Forward => (typ, hxp, eps_y),
        Crossing::Backward => (typ + 1, hxp + 1, eps_y.flip()),
    };
    let (tail_slot, head_slot) = if tyc == hxc {
        (
            tail_gap + if head_gap < tail_gap { 2 } else { 0 },
            head_gap + if tail_gap < head_gap { 2 } else { 0 },
        )
    } else {
        (tail_gap, head_gap)
    };
    let mut trace = MoveTrace::new(d.clone());
    let r2 = MoveInstance::R2Add {
        tail_circle: tyc,
        tail_slot,
        head_circle: hxc,
        head_slot,
        sign: sign_a,
        crossed: false,
    };
    let applied = trace.push(r2, Origin::Tah)?;
    // Forward: a = p, b = q; backward: a = q, b = p.
    let q = match dir {
        Crossing::Forward => applied.inserted[1],
        Crossing::Backward => applied.inserted[0],
    };
    let map = |a: usize| applied.relabel[a].expect("existing arrows survive R2");
    let r3 = MoveInstance::R3 { upper: map(y), long: q, lower: map(x) };
    trace.push(r3, Origin::Tah)?;
    Ok(trace)
}

/// A Slide site: the tail of `moving` passes across the head of `across`,
/// while the head of `companion`, consecutive to the head of `moving`, is
/// carried to its other side. The tail of `companion` must lie on the same
/// arc as the tail of `across` (only tails between them).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideSite {
    pub moving: usize,
    pub across: usize,
    pub companion: usize,
}

/// Expands a Slide into OC steps bringing the companion tail next to the
/// tail of `across`, followed by one R3.
pub fn apply_slide(d: &GaussDiagram, site: SlideSite) -> Result<MoveTrace, MoveError> {
    let SlideSite { moving, across, companion } = site;
    check_arrow(d, moving)?;
    check_arrow(d, across)?;
    check_arrow(d, companion)?;
    if moving == across || moving == companion || across == companion {
        return Err(inapplicable("Slide needs three distinct arrows"));
    }
    if !d.adjacent(EndpointRef::tail(moving), EndpointRef::head(across)) {
        return Err(inapplicable("the moving tail is not next to the head it crosses"));
    }
    if !d.adjacent(EndpointRef::head(moving), EndpointRef::head(companion)) {
        return Err(inapplicable("the companion head is not next to the moving arrow's head"));
    }
    let mut trace = MoveTrace::new(d.clone());
    let mut ids: HashMap<usize, usize> = [(moving, moving), (across, across), (companion, companion)].into();
    // Walk the companion tail toward the tail of `across`, one OC at a time.
    loop {
        let cur = trace.final_diagram().clone();
        let (tc, tp) = cur.locate(EndpointRef::tail(ids[&companion]));
        let (ac, ap) = cur.locate(EndpointRef::tail(ids[&across]));
        if cur.adjacent(EndpointRef::tail(ids[&companion]), EndpointRef::tail(ids[&across])) {
            break;
        }
        if tc != ac {
            return Err(inapplicable("companion tail is not on the arc of the crossed tail"));
        }
        let len = cur.circle(tc).len();
        // Step in the direction of the shorter path that meets only tails.
        let forward_ok = (1..(ap + len - tp) % len).all(|k| cur.circle(tc)[(tp + k) % len].end == End::Tail);
        let backward_ok = (1..(tp + len - ap) % len).all(|k| cur.circle(tc)[(tp + len - k) % len].end == End::Tail);
        let step = if forward_ok {
            let next = cur.circle(tc)[(tp + 1) % len];
            MoveInstance::Oc { first: ids[&companion], second: next.arrow }
        } else if backward_ok {
            let prev = cur.circle(tc)[(tp + len - 1) % len];
            MoveInstance::Oc { first: prev.arrow, second: ids[&companion] }
        } else {
            return Err(inapplicable("a head separates the companion tail from the crossed tail"));
        };
        let applied = trace.push(step, Origin::Slide)?;
        for v in ids.values_mut() {
            *v = applied.relabel[*v].expect("OC keeps arrows");
        }
    }
    let r3 = MoveInstance::R3 { upper: ids[&across], long: ids[&companion], lower: ids[&moving] };
    check_r3(trace.final_diagram(), ids[&across], ids[&companion], ids[&moving])
        .map_err(|e| inapplicable(format!("Slide expansion: {e}")))?;
    trace.push(r3, Origin::Slide)?;
    Ok(trace)
}
