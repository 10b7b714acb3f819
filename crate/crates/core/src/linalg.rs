//! Small dense helpers used outside the simplex.

use crate::scalar::Scalar;

/// Rank of a row-major matrix by Gaussian elimination.
pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..cols {
        let piv = (r..a.len())
            .filter(|&i| !a[i][c].is_negligible())
            .max_by(|&i, &k| {
                a[i][c]
                    .abs()
                    .partial_cmp(&a[k][c].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
        let p = match piv {
            Some(p) => p,
            None => continue,
        };
        a.swap(r, p);
        for i in (r + 1)..a.len() {
            if a[i][c].is_zero() {
                continue;
            }
            let l = a[i][c].clone() / a[r][c].clone();
            for k in c..cols {
                let t = l.clone() * a[r][k].clone();
                a[i][k] = a[i][k].clone() - t;
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Inverse of a square matrix, or `None` if singular.
pub fn inverse<T: Scalar>(m: &[Vec<T>]) -> Option<Vec<Vec<T>>> {
    let n = m.len();
    let mut a: Vec<Vec<T>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|k| if k == i { T::one() } else { T::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n)
            .filter(|&i| !a[i][c].is_negligible())
            .max_by(|&i, &k| {
                a[i][c]
                    .abs()
                    .partial_cmp(&a[k][c].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })?;
        a.swap(c, p);
        let piv = a[c][c].clone();
        for k in 0..2 * n {
            a[c][k] = a[c][k].clone() / piv.clone();
        }
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let l = a[i][c].clone();
            for k in 0..2 * n {
                if a[c][k].is_zero() {
                    continue;
                }
                let t = l.clone() * a[c][k].clone();
                a[i][k] = a[i][k].clone() - t;
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves the square system `m x = b`.
pub fn solve<T: Scalar>(m: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let inv = inverse(m)?;
    Some(inv.iter().map(|row| crate::scalar::dot(row, b)).collect())
}
