//! Refuting and certifying equivalence of reduced peripheral systems.
//!
//! A system is given by longitude words in the meridians `m1..mn` (as read
//! from a sorted diagram). A certificate is a list of steps replayed on the
//! second system `B` until each longitude equals the first system's in the
//! reduced free group:
//!
//! * `conjugate (i, j, e)`: with `c = m_j^e`, substitute `m_i -> c m_i c^-1`
//!   in every longitude, then replace `l_i` by `c^-1 l_i c`;
//! * `coset (i, p, g, s)`: insert `g m_i^s g^-1` into `l_i` at position `p`;
//! * move i: insert or delete a cancelling pair `m_j^s m_j^-s`;
//! * move ii: exchange `z^-1 m_j^a z` and `m_j^b` when adjacent;
//! * move iii: replace a letter `m_j^s` by `w^-p m_j^s w^p`, where `w` is
//!   the first system's longitude word `l_j` and `p = ±1`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::GaussDiagram;
use crate::group::{sorted_longitudes, GroupError};
use crate::magnus::{expand, MagnusError, ReducedPoly, MAX_VARS};
use crate::milnor::{tables_equal, MilnorError, MilnorTable, ResidueMode, TableWitness};
use crate::sort::sort_diagram;
use crate::word::{Letter, Word};

/// Longitudes of a reduced peripheral system, as words in `m1..mn`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LongitudeSystem {
    pub n: usize,
    pub longitudes: Vec<Word>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("systems have {0} and {1} components")]
    ComponentMismatch(usize, usize),
    #[error("at most {MAX_VARS} components are supported, got {0}")]
    TooManyComponents(usize),
    #[error("longitude {component} uses m{letter}, beyond {n} components")]
    LetterOutOfRange { component: usize, letter: usize, n: usize },
    #[error("system lists {got} longitudes for {n} components")]
    WrongCount { n: usize, got: usize },
    #[error("certificate step {step}: {reason}")]
    Malformed { step: usize, reason: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Milnor(#[from] MilnorError),
    #[error(transparent)]
    Move(#[from] crate::moves::MoveError),
}

impl From<MagnusError> for EquivalenceError {
    fn from(e: MagnusError) -> Self {
        EquivalenceError::Milnor(MilnorError::Magnus(e))
    }
}

impl LongitudeSystem {
    pub fn new(n: usize, longitudes: Vec<Word>) -> Result<Self, EquivalenceError> {
        let s = LongitudeSystem { n, longitudes };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), EquivalenceError> {
        if self.n > MAX_VARS {
            return Err(EquivalenceError::TooManyComponents(self.n));
        }
        if self.longitudes.len() != self.n {
            return Err(EquivalenceError::WrongCount { n: self.n, got: self.longitudes.len() });
        }
        for (i, w) in self.longitudes.iter().enumerate() {
            if let Some(g) = w.max_gen().filter(|&g| g >= self.n) {
                return Err(EquivalenceError::LetterOutOfRange { component: i + 1, letter: g + 1, n: self.n });
            }
        }
        Ok(())
    }

    /// The system of a sorted diagram.
    pub fn from_sorted(d: &GaussDiagram) -> Result<Self, EquivalenceError> {
        Ok(LongitudeSystem { n: d.n(), longitudes: sorted_longitudes(d)? })
    }

    /// Sorts `d` first.
    pub fn from_diagram(d: &GaussDiagram) -> Result<Self, EquivalenceError> {
        LongitudeSystem::from_sorted(&sort_diagram(d)?.diagram)
    }

    pub fn expansions(&self) -> Vec<ReducedPoly> {
        self.longitudes.iter().map(|w| expand(w, self.n).expect("validated system")).collect()
    }

    pub fn milnor_table(&self, max_length: usize) -> Result<MilnorTable, MilnorError> {
        MilnorTable::from_expansions(&self.expansions(), max_length)
    }
}

/// One certificate step. Components, generators and positions are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    Conjugate { component: usize, gen: usize, exp: i32 },
    Coset { component: usize, position: usize, g: Word, sign: i32 },
    /// Move i. With `insert` set, puts `insert insert^-1` at `position`;
    /// otherwise deletes the cancelling pair starting there.
    Cancel { component: usize, position: usize, insert: Option<Word> },
    /// Move ii: at `position` the word reads `z^-1 m_gen^a z m_gen^b`
    /// (`forward`) or `m_gen^b z^-1 m_gen^a z` (backward); the two blocks
    /// are exchanged.
    Commute { component: usize, position: usize, zeta: Word, gen: usize, a: i32, b: i32, forward: bool },
    /// Move iii on the letter at `position`.
    Longitude { component: usize, position: usize, power: i32 },
}

impl Step {
    pub fn component(&self) -> usize {
        match *self {
            Step::Conjugate { component, .. }
            | Step::Coset { component, .. }
            | Step::Cancel { component, .. }
            | Step::Commute { component, .. }
            | Step::Longitude { component, .. } => component,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub steps: Vec<Step>,
}

impl Certificate {
    /// Composed conjugator of each component: the product of its
    /// elementary conjugations, in order.
    pub fn conjugators(&self, n: usize) -> Vec<Word> {
        let mut out = vec![Word::identity(); n];
        for s in &self.steps {
            if let Step::Conjugate { component, gen, exp } = *s {
                out[component].push(Letter::new(gen, exp));
            }
        }
        out
    }

    pub fn coset_insertions(&self, component: usize) -> Vec<(Word, i32)> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                Step::Coset { component: c, g, sign, .. } if *c == component => Some((g.clone(), *sign)),
                _ => None,
            })
            .collect()
    }

    pub fn word_moves(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, Step::Cancel { .. } | Step::Commute { .. } | Step::Longitude { .. }))
            .count()
    }
}

fn malformed(step: usize, reason: impl Into<String>) -> EquivalenceError {
    EquivalenceError::Malformed { step, reason: reason.into() }
}

fn unit_exp(step: usize, e: i32) -> Result<(), EquivalenceError> {
    if e == 1 || e == -1 {
        Ok(())
    } else {
        Err(malformed(step, format!("exponent {e} is not ±1")))
    }
}

fn check_gen(step: usize, g: usize, n: usize) -> Result<(), EquivalenceError> {
    if g < n {
        Ok(())
    } else {
        Err(malformed(step, format!("generator m{} out of range", g + 1)))
    }
}

fn check_word(step: usize, w: &Word, n: usize) -> Result<(), EquivalenceError> {
    match w.max_gen() {
        Some(g) => check_gen(step, g, n),
        None => Ok(()),
    }
}

/// Applies one step to the longitudes of `b`; `a` supplies the words for move iii.
pub fn apply_step(a: &LongitudeSystem, words: &mut [Word], index: usize, step: &Step) -> Result<(), EquivalenceError> {
    let n = a.n;
    let comp = step.component();
    if comp >= n {
        return Err(malformed(index, format!("component {} out of range", comp + 1)));
    }
    match step {
        Step::Conjugate { component, gen, exp } => {
            check_gen(index, *gen, n)?;
            unit_exp(index, *exp)?;
            let c = Word::letter(Letter::new(*gen, *exp));
            if gen != component {
                let image = Word::gen(*component).conjugate_by(&c.inverse());
                for w in words.iter_mut() {
                    *w = w.substitute(*component, &image);
                }
            }
            words[*component] = words[*component].conjugate_by(&c);
        }
        Step::Coset { component, position, g, sign } => {
            unit_exp(index, *sign)?;
            check_word(index, g, n)?;
            let w = &words[*component];
            if *position > w.len() {
                return Err(malformed(index, "coset position beyond the word"));
            }
            let ins = g.concat(&Word::letter(Letter::new(*component, *sign))).concat(&g.inverse());
            let mut v = w.0[..*position].to_vec();
            v.extend_from_slice(&ins.0);
            v.extend_from_slice(&w.0[*position..]);
            words[*component] = Word(v);
        }
        Step::Cancel { component, position, insert } => {
            let w = &words[*component];
            let p = *position;
            match insert {
                Some(x) => {
                    check_word(index, x, n)?;
                    if x.len() != 1 {
                        return Err(malformed(index, "move i inserts a single letter and its inverse"));
                    }
                    if p > w.len() {
                        return Err(malformed(index, "insertion position beyond the word"));
                    }
                    let mut v = w.0[..p].to_vec();
                    v.push(x.0[0]);
                    v.push(x.0[0].inv());
                    v.extend_from_slice(&w.0[p..]);
                    words[*component] = Word(v);
                }
                None => {
                    if p + 1 >= w.len() || w.0[p] != w.0[p + 1].inv() {
                        return Err(malformed(index, "no cancelling pair at that position"));
                    }
                    let mut v = w.0.clone();
                    v.drain(p..p + 2);
                    words[*component] = Word(v);
                }
            }
        }
        Step::Commute { component, position, zeta, gen, a: ea, b: eb, forward } => {
            check_gen(index, *gen, n)?;
            check_word(index, zeta, n)?;
            unit_exp(index, *ea)?;
            unit_exp(index, *eb)?;
            let conj = Word::letter(Letter::new(*gen, *ea)).conjugate_by(zeta);
            let single = Word::letter(Letter::new(*gen, *eb));
            let (from, to) = if *forward {
                (conj.concat(&single), single.concat(&conj))
            } else {
                (single.concat(&conj), conj.concat(&single))
            };
            let w = &words[*component];
            let p = *position;
            if p + from.len() > w.len() || w.0[p..p + from.len()] != from.0[..] {
                return Err(malformed(index, "move ii pattern not found at that position"));
            }
            let mut v = w.0[..p].to_vec();
            v.extend_from_slice(&to.0);
            v.extend_from_slice(&w.0[p + from.len()..]);
            words[*component] = Word(v);
        }
        Step::Longitude { component, position, power } => {
            unit_exp(index, *power)?;
            let w = &words[*component];
            let p = *position;
            let Some(&l) = w.0.get(p) else {
                return Err(malformed(index, "no letter at that position"));
            };
            let omega = a.longitudes[l.gen].power(*power as i64);
            let mut v = w.0[..p].to_vec();
            v.extend_from_slice(&omega.inverse().0);
            v.push(l);
            v.extend_from_slice(&omega.0);
            v.extend_from_slice(&w.0[p + 1..]);
            words[*component] = Word(v);
        }
    }
    Ok(())
}

/// Replays `cert` on `b`; moves i and ii must keep each longitude's class
/// in the reduced free group, and the result must match `a` there.
pub fn verify_certificate(a: &LongitudeSystem, b: &LongitudeSystem, cert: &Certificate) -> Result<bool, EquivalenceError> {
    if a.n != b.n {
        return Err(EquivalenceError::ComponentMismatch(a.n, b.n));
    }
    a.validate()?;
    b.validate()?;
    let n = a.n;
    let mut words = b.longitudes.clone();
    for (k, step) in cert.steps.iter().enumerate() {
        let before = match step {
            Step::Cancel { component, .. } | Step::Commute { component, .. } if *component < n => {
                Some(expand(&words[*component], n)?)
            }
            _ => None,
        };
        apply_step(a, &mut words, k, step)?;
        if let Some(e) = before {
            if expand(&words[step.component()], n)? != e {
                return Err(malformed(k, "move changed the reduced class of the longitude"));
            }
        }
    }
    for (w, target) in words.iter().zip(&a.longitudes) {
        if expand(w, n)? != expand(target, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A differing residue entry up to `max_length`, if any.
pub fn refute(a: &LongitudeSystem, b: &LongitudeSystem, max_length: usize) -> Result<Option<Box<TableWitness>>, EquivalenceError> {
    if a.n != b.n {
        return Err(EquivalenceError::ComponentMismatch(a.n, b.n));
    }
    if a.n < 2 {
        return Ok(None);
    }
    let ta = a.milnor_table(max_length)?;
    let tb = b.milnor_table(max_length)?;
    Ok(tables_equal(&ta, &tb, ResidueMode::Residue).err())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    /// Elementary conjugations per component.
    pub conj_len: usize,
    /// Coset insertions per component.
    pub coset_max: usize,
    /// Move iii applications in total.
    pub depth: usize,
    /// Distinct states the search may visit.
    pub max_states: usize,
    /// Invariant length used for refutation (0 means the component count).
    pub max_length: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { conj_len: 4, coset_max: 4, depth: 64, max_states: 20_000, max_length: 0 }
    }
}

impl Bounds {
    fn length_for(&self, n: usize) -> usize {
        if self.max_length == 0 {
            n
        } else {
            self.max_length.min(n)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Distinct { witness: Box<TableWitness> },
    Equivalent { certificate: Certificate },
    Unknown { states: usize, bounds: Bounds },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Distinct { .. } => "distinct",
            Verdict::Equivalent { .. } => "equivalent",
            Verdict::Unknown { .. } => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Distinct { witness } => write!(
                f,
                "distinct: mu{} residue {} vs {}",
                witness.left.label(),
                witness.left.mubar,
                witness.right.mubar
            ),
            Verdict::Equivalent { certificate } => write!(f, "equivalent ({} steps)", certificate.steps.len()),
            Verdict::Unknown { states, .. } => write!(f, "unknown after {states} states"),
        }
    }
}

/// Deletes cancelling pairs one at a time, recording each as move i.
fn reduce_logged(component: usize, w: &mut Word, steps: &mut Vec<Step>) {
    loop {
        let Some(p) = (0..w.len().saturating_sub(1)).find(|&p| w.0[p] == w.0[p + 1].inv()) else {
            return;
        };
        w.0.drain(p..p + 2);
        steps.push(Step::Cancel { component, position: p, insert: None });
    }
}

/// Coset insertions turning `current` into `target` when they agree after
/// killing `m_i`: writing `current^-1 target = u0 m_i^e1 u1 ...`, the
/// prefixes `P_t = u0 ... u_{t-1}` give `P_t m_i^et P_t^-1`, and what is
/// left over is trivial in the reduced group on the other meridians.
/// Conjugates of `m_i` commute there, so terms whose prefixes agree in the
/// reduced group are merged and their exponents added.
fn coset_steps(i: usize, current: &Word, target: &Word, n: usize) -> Vec<(Word, i32)> {
    let u = current.inverse().concat(target).free_reduce();
    let mut prefix = Word::identity();
    let mut classes: Vec<(ReducedPoly, Word, i32)> = Vec::new();
    for &l in u.letters() {
        if l.gen != i {
            prefix.push(l);
            continue;
        }
        let key = expand(&prefix, n).expect("letters in range");
        match classes.iter_mut().find(|c| c.0 == key) {
            Some(c) => c.2 += l.exp(),
            None => classes.push((key, prefix.free_reduce(), l.exp())),
        }
    }
    classes
        .into_iter()
        .flat_map(|(_, g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
        .collect()
}

type Score = ((usize, usize), Option<Vec<Step>>);

struct Node {
    parent: usize,
    steps: Vec<Step>,
    words: Vec<Word>,
    conj_used: Vec<usize>,
    depth_used: usize,
}

fn state_key(n: usize, words: &[Word]) -> Vec<ReducedPoly> {
    words.iter().map(|w| expand(w, n).expect("letters in range")).collect()
}

/// States expanded together; each batch is processed in parallel.
const BATCH: usize = 32;

/// Bounded best-first search for a certificate. States are ranked by how
/// many expansion coefficients still differ from the targets once the own
/// meridian is killed, then by the coset insertions still needed, then by
/// discovery order. Batches of the best states
/// are expanded in parallel and their children merged in a fixed order, so
/// the verdict and certificate do not depend on the thread count.
pub fn search_certificate(a: &LongitudeSystem, b: &LongitudeSystem, bounds: &Bounds) -> Result<Verdict, EquivalenceError> {
    if a.n != b.n {
        return Err(EquivalenceError::ComponentMismatch(a.n, b.n));
    }
    a.validate()?;
    b.validate()?;
    let n = a.n;
    if let Some(witness) = refute(a, b, bounds.length_for(n))? {
        return Ok(Verdict::Distinct { witness });
    }
    let targets_killed: Vec<ReducedPoly> = a.expansions().iter().enumerate().map(|(i, p)| p.kill_var(i)).collect();
    let mut root_steps = Vec::new();
    let mut root_words = b.longitudes.clone();
    for (i, w) in root_words.iter_mut().enumerate() {
        reduce_logged(i, w, &mut root_steps);
    }
    let mut nodes = vec![Node {
        parent: usize::MAX,
        steps: root_steps,
        words: root_words,
        conj_used: vec![0; n],
        depth_used: 0,
    }];
    let mut seen: HashMap<Vec<ReducedPoly>, usize> = HashMap::new();
    seen.insert(state_key(n, &nodes[0].words), 0);

    // Ranks a state by (coefficients still differing after killing the own
    // meridian, coset insertions still needed) and returns the closing coset
    // steps when it is within reach.
    let score = |words: &[Word], key: &[ReducedPoly]| -> Score {
        let mut distance = 0;
        let mut cosets = 0;
        let mut steps = Some(Vec::new());
        for i in 0..n {
            let diff = key[i].kill_var(i).sub(&targets_killed[i]).term_count();
            if diff > 0 {
                distance += diff;
                steps = None;
                continue;
            }
            let ins = coset_steps(i, &words[i], &a.longitudes[i], n);
            cosets += ins.len();
            if ins.len() > bounds.coset_max {
                steps = None;
            }
            if let Some(steps) = steps.as_mut() {
                let mut pos = words[i].len();
                for (g, sign) in ins {
                    let len = 2 * g.len() + 1;
                    steps.push(Step::Coset { component: i, position: pos, g, sign });
                    pos += len;
                }
            }
        }
        ((distance, cosets), steps)
    };

    let finish = |nodes: &[Node], mut at: usize, tail: Vec<Step>| -> Certificate {
        let mut chunks = vec![tail];
        while at != usize::MAX {
            chunks.push(nodes[at].steps.clone());
            at = nodes[at].parent;
        }
        Certificate { steps: chunks.into_iter().rev().flatten().collect() }
    };

    let (h0, tail) = score(&nodes[0].words, &state_key(n, &nodes[0].words));
    if let Some(tail) = tail {
        let cert = finish(&nodes, 0, tail);
        return Ok(Verdict::Equivalent { certificate: cert });
    }
    let mut open = BinaryHeap::new();
    open.push(Reverse((h0, 0usize)));

    while !open.is_empty() {
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            match open.pop() {
                Some(Reverse((_, id))) => batch.push(id),
                None => break,
            }
        }
        #[allow(clippy::type_complexity)]
        let expanded: Vec<Vec<(Vec<Step>, Vec<Word>, Vec<usize>, usize, Vec<ReducedPoly>, Score)>> = batch
            .par_iter()
            .map(|&id| {
                let node = &nodes[id];
                let mut out = Vec::new();
                let mut push = |mut steps: Vec<Step>, mut words: Vec<Word>, conj: Vec<usize>, depth: usize| {
                    for (i, w) in words.iter_mut().enumerate() {
                        reduce_logged(i, w, &mut steps);
                    }
                    let key = state_key(n, &words);
                    let scored = score(&words, &key);
                    out.push((steps, words, conj, depth, key, scored));
                };
                for i in 0..n {
                    if node.conj_used[i] >= bounds.conj_len {
                        continue;
                    }
                    for j in 0..n {
                        for exp in [1, -1] {
                            let step = Step::Conjugate { component: i, gen: j, exp };
                            let mut words = node.words.clone();
                            apply_step(a, &mut words, 0, &step).expect("generated step is valid");
                            let mut conj = node.conj_used.clone();
                            conj[i] += 1;
                            push(vec![step], words, conj, node.depth_used);
                        }
                    }
                }
                if node.depth_used < bounds.depth {
                    for k in 0..n {
                        for position in 0..node.words[k].len() {
                            for power in [1, -1] {
                                let step = Step::Longitude { component: k, position, power };
                                let mut words = node.words.clone();
                                apply_step(a, &mut words, 0, &step).expect("generated step is valid");
                                push(vec![step], words, node.conj_used.clone(), node.depth_used + 1);
                            }
                        }
                    }
                    // Move iii on a fresh letter: insert `x x^-1` (move i), then
                    // conjugate the `x` by a longitude.
                    for k in 0..n {
                        for position in 0..=node.words[k].len() {
                            for j in (0..n).filter(|&j| !a.longitudes[j].is_empty()) {
                                for exp in [1, -1] {
                                    for power in [1, -1] {
                                        let fresh = Step::Cancel {
                                            component: k,
                                            position,
                                            insert: Some(Word::letter(Letter::new(j, exp))),
                                        };
                                        let step = Step::Longitude { component: k, position, power };
                                        let mut words = node.words.clone();
                                        apply_step(a, &mut words, 0, &fresh).expect("generated step is valid");
                                        apply_step(a, &mut words, 0, &step).expect("generated step is valid");
                                        push(vec![fresh, step], words, node.conj_used.clone(), node.depth_used + 1);
                                    }
                                }
                            }
                        }
                    }
                }
                out
            })
            .collect();
        for (&parent, children) in batch.iter().zip(expanded) {
            for (steps, words, conj_used, depth_used, key, (h, tail)) in children {
                if let Some(tail) = tail {
                    nodes.push(Node { parent, steps, words, conj_used, depth_used });
                    return Ok(Verdict::Equivalent { certificate: finish(&nodes, nodes.len() - 1, tail) });
                }
                if seen.contains_key(&key) {
                    continue;
                }
                let id = nodes.len();
                seen.insert(key, id);
                nodes.push(Node { parent, steps, words, conj_used, depth_used });
                if nodes.len() >= bounds.max_states {
                    return Ok(Verdict::Unknown { states: nodes.len(), bounds: *bounds });
                }
                open.push(Reverse((h, id)));
            }
        }
    }
    Ok(Verdict::Unknown { states: nodes.len(), bounds: *bounds })
}

/// Sorts both diagrams and searches for a certificate between their systems.
pub fn sv_equivalent(d1: &GaussDiagram, d2: &GaussDiagram, bounds: &Bounds) -> Result<Verdict, EquivalenceError> {
    if d1.n() != d2.n() {
        return Err(EquivalenceError::ComponentMismatch(d1.n(), d2.n()));
    }
    let a = LongitudeSystem::from_diagram(d1)?;
    let b = LongitudeSystem::from_diagram(d2)?;
    search_certificate(&a, &b, bounds)
}

fn random_word<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word((0..len).map(|_| Letter::new(rng.gen_range(0..n), if rng.gen_bool(0.5) { 1 } else { -1 })).collect())
        .free_reduce()
}

/// A random step that is valid on `words`, for building test pairs.
pub fn random_step<R: Rng>(rng: &mut R, a: &LongitudeSystem, words: &[Word]) -> Step {
    let n = a.n;
    loop {
        let component = rng.gen_range(0..n);
        let exp = if rng.gen_bool(0.5) { 1 } else { -1 };
        match rng.gen_range(0..3) {
            0 => return Step::Conjugate { component, gen: rng.gen_range(0..n), exp },
            1 => {
                return Step::Coset {
                    component,
                    position: words[component].len(),
                    g: random_word(rng, n, 2),
                    sign: exp,
                }
            }
            _ => {
                let len = words[component].len();
                if len > 0 {
                    return Step::Longitude { component, position: rng.gen_range(0..len), power: exp };
                }
            }
        }
    }
}

/// A random system: `n` components, longitudes of length at most `max_len`
/// avoiding their own meridian.
pub fn random_system<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> LongitudeSystem {
    let longitudes = (0..n)
        .map(|i| {
            let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            let len = rng.gen_range(0..=max_len);
            let w: Vec<Letter> = (0..len)
                .filter_map(|_| others.choose(rng).map(|&g| Letter::new(g, if rng.gen_bool(0.5) { 1 } else { -1 })))
                .collect();
            Word(w).free_reduce()
        })
        .collect();
    LongitudeSystem { n, longitudes }
}

/// `b` obtained from `a` by `count` random steps, reduced after each.
pub fn random_pair<R: Rng>(rng: &mut R, a: &LongitudeSystem, count: usize) -> LongitudeSystem {
    let mut words = a.longitudes.clone();
    for _ in 0..count {
        let step = random_step(rng, a, &words);
        apply_step(a, &mut words, 0, &step).expect("random steps are valid");
        for w in words.iter_mut() {
            *w = w.free_reduce();
        }
    }
    LongitudeSystem { n: a.n, longitudes: words }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_gauss_code;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn sys(ls: &[&str]) -> LongitudeSystem {
        LongitudeSystem::new(ls.len(), ls.iter().map(|s| w(s)).collect()).unwrap()
    }

    #[test]
    fn empty_certificate_on_equal_systems() {
        let a = sys(&["m2 m3", "m1^-1", "1"]);
        assert!(verify_certificate(&a, &a, &Certificate::default()).unwrap());
    }

    #[test]
    fn conjugated_longitude() {
        let a = sys(&["m2 m3^-1", "m3", "m1"]);
        let b = sys(&["m1 m2 m3^-1 m1^-1", "m3", "m1"]);
        let cert = Certificate { steps: vec![Step::Conjugate { component: 0, gen: 0, exp: 1 }] };
        assert!(verify_certificate(&a, &b, &cert).unwrap());
        assert_eq!(cert.conjugators(3)[0], w("m1"));
        assert!(!verify_certificate(&a, &b, &Certificate::default()).unwrap());
    }

    #[test]
    fn coset_insertion_by_hand() {
        // B's first longitude carries an extra g m1 g^-1 with g = m2.
        let a = sys(&["m2", "m1"]);
        let b = sys(&["m2 m2 m1 m2^-1", "m1"]);
        let cert = Certificate {
            steps: vec![Step::Coset { component: 0, position: 4, g: w("m2 m1^-1"), sign: -1 }],
        };
        // m2 m2 m1 m2^-1 . m2 m1^-1 m1^-1 m1 m2^-1 = m2 m2 m1 m1^-1 m2^-1 = m2
        assert!(verify_certificate(&a, &b, &cert).unwrap());
        assert_eq!(cert.coset_insertions(0), vec![(w("m2 m1^-1"), -1)]);
    }

    #[test]
    fn malformed_moves_are_rejected() {
        let a = sys(&["m2", "m1"]);
        let bad = Certificate { steps: vec![Step::Cancel { component: 0, position: 0, insert: None }] };
        assert!(verify_certificate(&a, &a, &bad).is_err());
        let far = Certificate { steps: vec![Step::Longitude { component: 1, position: 5, power: 1 }] };
        assert!(verify_certificate(&a, &a, &far).is_err());
        let comm = Certificate {
            steps: vec![Step::Commute { component: 0, position: 0, zeta: w("m2"), gen: 0, a: 1, b: 1, forward: true }],
        };
        assert!(verify_certificate(&a, &a, &comm).is_err());
    }

    #[test]
    fn moves_one_and_two_round_trip() {
        let a = sys(&["m2^-1 m1 m2 m1", "1"]);
        let cert = Certificate {
            steps: vec![
                Step::Commute { component: 0, position: 0, zeta: w("m2"), gen: 0, a: 1, b: 1, forward: true },
                Step::Cancel { component: 0, position: 1, insert: Some(w("m2")) },
                Step::Cancel { component: 0, position: 1, insert: None },
                Step::Commute { component: 0, position: 0, zeta: w("m2"), gen: 0, a: 1, b: 1, forward: false },
            ],
        };
        assert!(verify_certificate(&a, &a, &cert).unwrap());
    }

    #[test]
    fn hopf_signs_are_distinct() {
        let plus = LongitudeSystem::from_diagram(&parse_gauss_code("t1 h2+ / h1+ t2").unwrap()).unwrap();
        let minus = LongitudeSystem::from_diagram(&parse_gauss_code("t1 h2- / h1- t2").unwrap()).unwrap();
        let wit = refute(&plus, &minus, 2).unwrap().unwrap();
        assert_eq!((wit.left.i.clone(), wit.left.j), (vec![2], 1));
        assert_eq!(wit.left.mubar, BigInt::from(1));
        assert_eq!(wit.right.mubar, BigInt::from(-1));
        assert!(matches!(search_certificate(&plus, &minus, &Bounds::default()).unwrap(), Verdict::Distinct { .. }));
        let unlink = LongitudeSystem::from_diagram(&GaussDiagram::unlink(2)).unwrap();
        assert!(refute(&unlink, &plus, 2).unwrap().is_some());
        assert!(refute(&plus, &plus, 2).unwrap().is_none());
    }

    #[test]
    fn steps_preserve_residues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = random_system(&mut rng, 3, 5);
            let b = random_pair(&mut rng, &a, 1);
            assert!(refute(&a, &b, 3).unwrap().is_none(), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn search_recovers_random_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random_system(&mut rng, 3, 4);
            let b = random_pair(&mut rng, &a, 3);
            match search_certificate(&a, &b, &Bounds::default()).unwrap() {
                Verdict::Equivalent { certificate } => assert!(verify_certificate(&a, &b, &certificate).unwrap()),
                v => panic!("{a:?} vs {b:?}: {v}"),
            }
        }
    }

    #[test]
    fn sv_del_gives_equivalent_diagrams() {
        let d = parse_gauss_code("t1 h2+ t3 h3- / h1+ t2").unwrap();
        let e = crate::moves::apply_move(&d, &crate::moves::MoveInstance::SvDel { arrow: 2 }).unwrap();
        assert!(matches!(sv_equivalent(&d, &e, &Bounds::default()).unwrap(), Verdict::Equivalent { .. }));
        let hopf = parse_gauss_code("t1 h2+ / h1+ t2").unwrap();
        assert!(matches!(sv_equivalent(&hopf, &GaussDiagram::unlink(2), &Bounds::default()).unwrap(), Verdict::Distinct { .. }));
    }

    #[test]
    fn certificate_json_round_trip() {
        let cert = Certificate {
            steps: vec![
                Step::Conjugate { component: 0, gen: 1, exp: -1 },
                Step::Coset { component: 1, position: 0, g: w("m1"), sign: 1 },
                Step::Longitude { component: 0, position: 0, power: 1 },
            ],
        };
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"step\":\"conjugate\""));
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);
    }
}
