//! Fraction-free elimination over the integers.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Converts an `i64` matrix to big integers.
pub fn to_big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Determinant of a square matrix by Bareiss elimination; `None` if the
/// matrix is not square.
pub fn determinant(rows: &[Vec<BigInt>]) -> Option<BigInt> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return None;
    }
    if n == 0 {
        return Some(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut sign = 1;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return Some(BigInt::zero());
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    Some(if sign < 0 { -d } else { d })
}

/// Rank of a (possibly rectangular) matrix by fraction-free elimination.
pub fn rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let m = a.len();
    let n = a.iter().map(Vec::len).max().unwrap_or(0);
    for r in a.iter_mut() {
        r.resize(n, BigInt::zero());
    }
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..n {
        let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..m {
            for j in col + 1..n {
                let v = (&a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
        if rank == m {
            break;
        }
    }
    rank
}

/// Rank of an `i64` matrix.
pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    rank(&to_big(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn small_determinants() {
        assert_eq!(determinant(&to_big(&[vec![2, 1], vec![1, 3]])), Some(BigInt::from(5)));
        assert_eq!(determinant(&to_big(&[vec![0, 1], vec![1, 0]])), Some(BigInt::from(-1)));
        assert_eq!(determinant(&to_big(&[vec![1, 2], vec![2, 4]])), Some(BigInt::zero()));
        let m = to_big(&[vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]);
        assert_eq!(determinant(&m), Some(BigInt::from(4)));
        assert_eq!(determinant(&to_big(&[vec![1, 2]])), None);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![0, 0, 1]]), 2);
        assert_eq!(rank_i64(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(rank_i64(&[vec![0, 1], vec![1, 0], vec![1, 1]]), 2);
        assert_eq!(rank_i64(&[]), 0);
    }
}
