//! Dense Gaussian elimination over an exact field.

use crate::exactscalar::Coeff;

/// Row-reduces `m` in place and returns the rank.
fn eliminate<C: Coeff>(m: &mut [Vec<C>], mut companion: Option<&mut [Vec<C>]>) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        if let Some(c) = companion.as_deref_mut() {
            c.swap(rank, pivot);
        }
        let inv = m[rank][col]
            .inv()
            .expect("pivot is nonzero by construction");
        for x in m[rank].iter_mut() {
            *x = x.clone() * &inv;
        }
        if let Some(c) = companion.as_deref_mut() {
            for x in c[rank].iter_mut() {
                *x = x.clone() * &inv;
            }
        }
        for r in 0..rows {
            if r == rank || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for k in col..cols {
                if !m[rank][k].is_zero() {
                    let d = m[rank][k].clone() * &factor;
                    m[r][k] = m[r][k].clone() - d;
                }
            }
            if let Some(c) = companion.as_deref_mut() {
                for k in 0..c[rank].len() {
                    if !c[rank][k].is_zero() {
                        let d = c[rank][k].clone() * &factor;
                        c[r][k] = c[r][k].clone() - d;
                    }
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

pub fn rank<C: Coeff>(m: &[Vec<C>]) -> usize {
    eliminate(&mut m.to_vec(), None)
}

/// Inverse of a square matrix, or `None` when it is singular.
pub fn inverse<C: Coeff>(m: &[Vec<C>]) -> Option<Vec<Vec<C>>> {
    let n = m.len();
    let mut work = m.to_vec();
    let mut inv = identity::<C>(n);
    (eliminate(&mut work, Some(&mut inv)) == n).then_some(inv)
}

pub fn identity<C: Coeff>(n: usize) -> Vec<Vec<C>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { C::one() } else { C::zero() }).collect())
        .collect()
}

pub fn mat_mul<C: Coeff>(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = C::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = acc + row[k].clone() * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}
