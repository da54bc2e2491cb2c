//! Smith normal form over the integers, for abelianizations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Invariant factors of an integer matrix (nonzero diagonal entries of its
/// Smith form, each dividing the next) and its rank.
pub fn invariant_factors(rows: &[Vec<i64>], cols: usize) -> Vec<BigInt> {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            let mut v: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
            v.resize(cols, BigInt::zero());
            v
        })
        .collect();
    let nr = m.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nr && t < cols {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let pivot = (t..nr)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !m[i][j].is_zero())
            .min_by(|&(a, b), &(c, d)| m[a][b].abs().cmp(&m[c][d].abs()));
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..nr {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                let (top, rest) = m.split_at_mut(i);
                for (x, p) in rest[0][t..cols].iter_mut().zip(&top[t][t..cols]) {
                    *x -= p * &q;
                }
                if !m[i][t].is_zero() {
                    clean = false;
                    if m[i][t].abs() < m[t][t].abs() {
                        m.swap(t, i);
                    }
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                for row in m.iter_mut().skip(t) {
                    let v = &row[t] * &q;
                    row[j] -= v;
                }
                if !m[t][j].is_zero() {
                    clean = false;
                    if m[t][j].abs() < m[t][t].abs() {
                        for row in m.iter_mut() {
                            row.swap(t, j);
                        }
                    }
                }
            }
            if clean {
                // Divisibility: fold in any entry the pivot does not divide.
                let bad = (t + 1..nr)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
                match bad {
                    Some((i, _)) => {
                        let (top, rest) = m.split_at_mut(i);
                        for (x, v) in top[t][t..cols].iter_mut().zip(&rest[0][t..cols]) {
                            *x += v;
                        }
                    }
                    None => break,
                }
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    diag
}

/// Abelian group `Z^free ⊕ ⊕ Z/d` presented by `cols` generators and the given relation rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

pub fn abelian_group(rows: &[Vec<i64>], cols: usize) -> AbelianGroup {
    let d = invariant_factors(rows, cols);
    AbelianGroup {
        free_rank: cols - d.len(),
        torsion: d.into_iter().filter(|x| !x.is_one()).collect(),
    }
}
