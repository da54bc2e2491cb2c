//! Acceptance checks, run in order by a single test so timings are not
//! distorted by parallel tests. Prints one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use weldkit::equivalence::{random_pair, random_system, refute, search_certificate, verify_certificate};
use weldkit::fixtures::{self, FixtureStatus};
use weldkit::milnor::{milnor_table, milnor_table_from_words, tables_equal, MilnorTable, ResidueMode};
use weldkit::moves::{apply_move, enumerate_moves, MoveInstance, MoveKind};
use weldkit::random::corpus;
use weldkit::{
    build_sorted_from_longitudes, expand, rf_equal, sort_diagram, sorted_longitudes, verify_trace, Bounds, GaussDiagram,
    Letter, LongitudeSystem, ReducedPoly, Verdict, Word,
};

const SEED: u64 = 20_240_601;
const CORPUS: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
    /// A failure that stems from missing input data rather than from the code.
    blocked: bool,
}

impl Outcome {
    fn check(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome { pass, detail: detail.into(), blocked: false }
    }
}

fn the_corpus() -> Vec<GaussDiagram> {
    corpus(SEED, CORPUS, 4, 12)
}

fn table(d: &GaussDiagram) -> MilnorTable {
    milnor_table(d, d.n()).expect("corpus diagrams have 2..=4 components")
}

fn same(a: &MilnorTable, b: &MilnorTable) -> bool {
    tables_equal(a, b, ResidueMode::Residue).is_ok()
}

fn sv_invariance() -> Outcome {
    let mut checks = 0;
    let mut bad = Vec::new();
    for d in the_corpus() {
        let t = table(&d);
        for a in (0..d.arrow_count()).filter(|&a| d.arrow(a).is_self_arrow()) {
            let e = apply_move(&d, &MoveInstance::SvDel { arrow: a }).unwrap();
            checks += 1;
            if !same(&t, &table(&e)) {
                bad.push(format!("{d} arrow {}", a + 1));
            }
        }
    }
    Outcome::check(bad.is_empty() && checks > 0, format!("{checks} self-arrow deletions, {} changed the table{}", bad.len(), first(&bad)))
}

fn move_invariance() -> Outcome {
    let per_diagram: Vec<(usize, Vec<String>)> = the_corpus()
        .par_iter()
        .map(|d| {
            let t = table(d);
            let moves = enumerate_moves(d, &MoveKind::WELDED);
            let bad = moves
                .iter()
                .filter(|m| !same(&t, &table(&apply_move(d, m).unwrap())))
                .map(|m| format!("{d} {m:?}"))
                .collect();
            (moves.len(), bad)
        })
        .collect();
    let checks: usize = per_diagram.iter().map(|(k, _)| k).sum();
    let bad: Vec<String> = per_diagram.into_iter().flat_map(|(_, b)| b).collect();
    Outcome::check(bad.is_empty() && checks > 0, format!("{checks} move instances, {} changed the table{}", bad.len(), first(&bad)))
}

fn sorting() -> Outcome {
    let mut bad = Vec::new();
    let diagrams = the_corpus();
    for d in &diagrams {
        let s = sort_diagram(d).unwrap();
        let traced = verify_trace(&s.trace) && s.trace.final_diagram() == &s.diagram;
        let tables = milnor_table_from_words(d.n(), &sorted_longitudes(&s.diagram).unwrap(), d.n())
            .map(|t| same(&t, &table(d)))
            .unwrap_or(false);
        if !(s.diagram.is_sorted() && traced && tables) {
            bad.push(d.to_gauss_code());
        }
    }
    Outcome::check(bad.is_empty(), format!("{} of {} diagrams sorted with a valid trace and equal table{}", diagrams.len() - bad.len(), diagrams.len(), first(&bad)))
}

fn hopf() -> Outcome {
    let (p, m) = fixtures::hopf().diagrams();
    let a = LongitudeSystem::from_diagram(&p).unwrap();
    let b = LongitudeSystem::from_diagram(&m).unwrap();
    match search_certificate(&a, &b, &Bounds::default()).unwrap() {
        Verdict::Distinct { witness } => {
            let ok = witness.left.i == [2] && witness.left.j == 1 && witness.left.mubar == 1.into() && witness.right.mubar == (-1).into();
            Outcome::check(ok, format!("witness mu{} = {} vs {}", witness.left.label(), witness.left.mubar, witness.right.mubar))
        }
        v => Outcome::check(false, format!("verdict {v}")),
    }
}

fn hughes() -> Outcome {
    let f = fixtures::hughes();
    let (d1, d2) = f.diagrams();
    let top = d1.n().min(4);
    let tables_agree = d1.n() == 4
        && d2.n() == 4
        && same(&milnor_table(&d1, top).unwrap(), &milnor_table(&d2, top).unwrap());
    let a = LongitudeSystem::from_diagram(&d1).unwrap();
    let b = LongitudeSystem::from_diagram(&d2).unwrap();
    let mut never_distinct = true;
    for k in 2..=top {
        never_distinct &= refute(&a, &b, k).unwrap().is_none();
        let bounds = Bounds { max_length: k, ..Bounds::default() };
        never_distinct &= !matches!(search_certificate(&a, &b, &bounds).unwrap(), Verdict::Distinct { .. });
    }
    let computed = tables_agree && never_distinct;
    let verified = f.status == FixtureStatus::Verified;
    let detail = format!(
        "fixtures {}; tables through length {top} {}, {}",
        f.status.name(),
        if tables_agree { "agree" } else { "differ" },
        if never_distinct { "never distinct" } else { "distinct at some length" }
    );
    Outcome { pass: computed && verified, detail, blocked: computed && !verified }
}

/// Heisenberg group: `x^a y^b z^c` with `z = [x, y] = x y x^-1 y^-1` central,
/// so `y^b x^a' = x^a' y^b z^(-b a')`.
fn heisenberg(w: &Word) -> (i64, i64, i64) {
    let (mut a, mut b, mut c) = (0i64, 0i64, 0i64);
    for l in w.letters() {
        let e = l.exp() as i64;
        if l.gen == 0 {
            c -= b * e;
            a += e;
        } else {
            b += e;
        }
    }
    (a, b, c)
}

fn heisenberg_word(a: i64, b: i64, c: i64) -> Word {
    let x = Word::gen(0);
    let y = Word::gen(1);
    let z = Word::commutator(&x, &y);
    x.power(a).concat(&y.power(b)).concat(&z.power(c))
}

fn random_word<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word((0..len).map(|_| Letter::new(rng.gen_range(0..n), if rng.gen_bool(0.5) { 1 } else { -1 })).collect())
}

fn magnus_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let (mut equal, mut disagreements) = (0, 0);
    for k in 0..1000 {
        let u = random_word(&mut rng, 2, 10);
        let v = match k % 3 {
            0 => random_word(&mut rng, 2, 10),
            // Same element, written differently: shuffle to the normal form.
            1 => {
                let (a, b, c) = heisenberg(&u);
                heisenberg_word(a, b, c)
            }
            // A near miss: change the central coordinate by one.
            _ => {
                let (a, b, c) = heisenberg(&u);
                heisenberg_word(a, b, c + 1)
            }
        };
        let oracle = heisenberg(&u) == heisenberg(&v);
        equal += oracle as usize;
        if rf_equal(&u, &v, 2).unwrap() != oracle {
            disagreements += 1;
        }
    }
    Outcome::check(disagreements == 0 && equal > 300, format!("1000 pairs ({equal} equal), {disagreements} disagreements"))
}

fn homomorphism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=5);
        let u = random_word(&mut rng, n, 12);
        let v = random_word(&mut rng, n, 12);
        let product = expand(&u, n).unwrap().mul(&expand(&v, n).unwrap());
        if expand(&u.concat(&v), n).unwrap() != product {
            bad += 1;
        }
        if !expand(&u.concat(&u.inverse()), n).unwrap().is_one() {
            bad += 1;
        }
    }
    Outcome::check(bad == 0, format!("1000 word pairs, {bad} violations"))
}

fn relators() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut bad = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=5);
        let i = rng.gen_range(0..n);
        let omega = random_word(&mut rng, n, 8);
        let mi = Word::gen(i);
        let r = Word::commutator(&mi, &mi.conjugate_by(&omega.inverse()));
        if expand(&r, n).unwrap() != ReducedPoly::one(n) {
            bad += 1;
        }
    }
    Outcome::check(bad == 0, format!("500 relators, {bad} nontrivial"))
}

fn certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 9);
    let mut failed = Vec::new();
    for k in 0..100 {
        let n = rng.gen_range(2..=4);
        let a = random_system(&mut rng, n, 4);
        let b = random_pair(&mut rng, &a, 3);
        let ok = match search_certificate(&a, &b, &Bounds::default()).unwrap() {
            Verdict::Equivalent { certificate } => verify_certificate(&a, &b, &certificate).unwrap(),
            _ => false,
        };
        if !ok {
            failed.push(k);
        }
    }
    Outcome::check(failed.is_empty(), format!("{} of 100 pairs certified and verified{}", 100 - failed.len(), first(&failed)))
}

fn longitude_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let mut bad = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=5);
        let words: Vec<Word> = (0..n)
            .map(|i| {
                // Own-meridian letters would be self-arrows; leave them out.
                let w = random_word(&mut rng, n, 12);
                Word(w.letters().iter().copied().filter(|l| l.gen != i).collect())
            })
            .collect();
        let d = build_sorted_from_longitudes(n, &words);
        let back = sorted_longitudes(&d).unwrap();
        let ok = d.is_sorted() && back.iter().zip(&words).all(|(x, w)| *x == w.free_reduce());
        bad += !ok as usize;
    }
    Outcome::check(bad == 0, format!("500 tuples, {bad} mismatches"))
}

#[test]
fn acceptance() {
    type Criterion = (u32, &'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        (1, "sv-invariance of residue tables", 60, sv_invariance),
        (2, "welded move invariance", 120, move_invariance),
        (3, "sorting with verified traces", 60, sorting),
        (4, "Hopf links distinguished", 1, hopf),
        (5, "Hughes pair not refuted", 60, hughes),
        (6, "reduced free group vs Heisenberg oracle", 10, magnus_oracle),
        (7, "expansion is a homomorphism", 10, homomorphism),
        (8, "reduction relators vanish", 10, relators),
        (9, "certificate round trip", 120, certificates),
        (10, "sorted form and longitudes round trip", 10, longitude_round_trip),
    ];
    // WELDKIT_ACCEPTANCE=3,9 runs a subset.
    let only: Option<Vec<u32>> =
        std::env::var("WELDKIT_ACCEPTANCE").ok().map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failures = Vec::new();
    for (id, name, limit, run) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = outcome.pass && in_time;
        println!(
            "{} criterion {id:>2} ({name}): {} [{:.2}s / {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
        if !pass && !(outcome.blocked && in_time) {
            failures.push(id);
        }
    }
    assert!(failures.is_empty(), "criteria failed: {failures:?}");
}

fn first<T: std::fmt::Debug>(bad: &[T]) -> String {
    bad.first().map(|b| format!("; first: {b:?}")).unwrap_or_default()
}
