//! Seeded random diagrams for fuzzing and test corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{End, GaussDiagram, RawDiagram, Sign};
use crate::moves::{apply_move, enumerate_moves, MoveKind};

/// A diagram with `n` circles and `arrows` arrows, each endpoint dropped at
/// a uniformly random position of a uniformly random circle.
pub fn random_diagram<R: Rng>(rng: &mut R, n: usize, arrows: usize) -> GaussDiagram {
    let mut raw = RawDiagram { circles: vec![Vec::new(); n], signs: Default::default() };
    for key in 0..arrows {
        for end in [End::Tail, End::Head] {
            let c = rng.gen_range(0..n);
            let p = rng.gen_range(0..=raw.circles[c].len());
            raw.circles[c].insert(p, (key, end));
        }
        raw.signs.insert(key, if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg });
    }
    GaussDiagram::from_raw(&raw).expect("every arrow has one tail and one head").0
}

/// `count` diagrams with 2..=max_n circles and at most `max_arrows` arrows.
pub fn corpus(seed: u64, count: usize, max_n: usize, max_arrows: usize) -> Vec<GaussDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_n.max(2));
            let m = rng.gen_range(0..=max_arrows);
            random_diagram(&mut rng, n, m)
        })
        .collect()
}

/// Applies `steps` random applicable moves of the given kinds.
pub fn random_walk<R: Rng>(rng: &mut R, d: &GaussDiagram, kinds: &[MoveKind], steps: usize) -> GaussDiagram {
    let mut cur = d.clone();
    for _ in 0..steps {
        let moves = enumerate_moves(&cur, kinds);
        if moves.is_empty() {
            break;
        }
        let m = &moves[rng.gen_range(0..moves.len())];
        cur = apply_move(&cur, m).expect("enumerated moves apply");
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic() {
        let a = corpus(7, 20, 4, 12);
        let b = corpus(7, 20, 4, 12);
        assert_eq!(a, b);
        assert!(a.iter().all(|d| (2..=4).contains(&d.n()) && d.arrow_count() <= 12));
        assert_ne!(corpus(8, 20, 4, 12), a);
    }

    #[test]
    fn walk_stays_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = random_diagram(&mut rng, 3, 5);
        let e = random_walk(&mut rng, &d, &MoveKind::WELDED, 10);
        assert_eq!(e.n(), 3);
    }
}
