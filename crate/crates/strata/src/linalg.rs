//! Small exact linear algebra over a generic field scalar.
//!
//! Everything here is dense and tiny (dimension ≤ 9), so the implementation
//! favours clarity over asymptotics. The routines are generic over any exact
//! scalar implementing the `num_traits` field operations; the crate
//! instantiates them with [`crate::Rat`].

use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar bound for exact elimination.
pub trait Field:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Field for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref<T: Field>(rows: &mut Vec<Vec<T>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = T::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let sub = f.clone() * rows[r][j].clone();
                    rows[i][j] = rows[i][j].clone() - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.retain(|row| row.iter().any(|x| !x.is_zero()));
    pivots
}

/// Rank of a matrix given as rows.
pub fn rank<T: Field>(rows: &[Vec<T>]) -> usize {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    rref(&mut m);
    m.len()
}

/// Basis of the right null space of `rows` (vectors `v` with `rows · v = 0`).
pub fn nullspace<T: Field>(rows: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![T::zero(); ncols];
        v[f] = T::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -m[i][f].clone();
        }
        basis.push(v);
    }
    basis
}

/// Does `v` lie in the row span of `rows`?
pub fn in_span<T: Field>(rows: &[Vec<T>], v: &[T]) -> bool {
    let mut m: Vec<Vec<T>> = rows.to_vec();
    m.push(v.to_vec());
    rank(&m) == rank(rows)
}

/// Solve `a · x = b` for a single solution, if any.
pub fn solve<T: Field>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let ncols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&ncols) {
        return None; // inconsistent
    }
    let mut x = vec![T::zero(); ncols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = m[i][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;
    use num_traits::FromPrimitive;

    fn q(n: i64) -> Rat {
        Rat::from_i64(n).unwrap()
    }

    #[test]
    fn rref_and_nullspace() {
        let rows = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)]];
        assert_eq!(rank(&rows), 1);
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot: Rat = (0..3).map(|i| rows[0][i].clone() * v[i].clone()).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn solve_small_system() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(-1)]];
        let x = solve(&a, &[q(5), q(1)]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        assert!(solve(&[vec![q(1), q(1)], vec![q(1), q(1)]], &[q(0), q(1)]).is_none());
    }
}
