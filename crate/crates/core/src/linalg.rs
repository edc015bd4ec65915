//! Small dense linear algebra over a [`Field`] and over F_p given as `i64`
//! residues.

use crate::error::{Error, Result};
use crate::ff::{Fe, Field};

/// Determinant by Gaussian elimination with row pivoting.
pub fn det(f: &Field, mut m: Vec<Vec<Fe>>) -> Fe {
    let n = m.len();
    let mut d = Fe::ONE;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Fe::ZERO;
        };
        if piv != col {
            m.swap(piv, col);
            d = f.neg(d);
        }
        let pv = m[col][col];
        d = f.mul(d, pv);
        let inv = f.inv(pv).expect("nonzero pivot");
        for r in col + 1..n {
            let factor = f.mul(m[r][col], inv);
            if factor.is_zero() {
                continue;
            }
            let nf = f.neg(factor);
            for c in col..n {
                let v = f.mul(nf, m[col][c]);
                m[r][c] = f.add(m[r][c], v);
            }
        }
    }
    d
}

/// Determinant of an integer matrix modulo the prime `p`.
pub fn det_mod_p(p: i64, m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<i64>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p)).collect())
        .collect();
    let mut d = 1i64;
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        if piv != col {
            a.swap(piv, col);
            d = (p - d) % p;
        }
        let pv = a[col][col];
        d = d * pv % p;
        let inv = inv_mod(pv, p);
        for r in col + 1..n {
            let factor = a[r][col] * inv % p;
            if factor == 0 {
                continue;
            }
            for c in col..n {
                a[r][c] = (a[r][c] - factor * a[col][c]).rem_euclid(p);
            }
        }
    }
    d
}

/// Inverse of an integer matrix modulo the prime `p`.
pub fn inverse_mod_p(p: i64, m: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = m.len();
    let mut a: Vec<Vec<i64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<i64> = r.iter().map(|&x| x.rem_euclid(p)).collect();
            row.extend((0..n).map(|j| i64::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| a[r][col] != 0)
            .ok_or(Error::SingularMatrix)?;
        a.swap(piv, col);
        let inv = inv_mod(a[col][col], p);
        for c in 0..2 * n {
            a[col][c] = a[col][c] * inv % p;
        }
        for r in 0..n {
            if r == col || a[r][col] == 0 {
                continue;
            }
            let factor = a[r][col];
            for c in 0..2 * n {
                a[r][c] = (a[r][c] - factor * a[col][c]).rem_euclid(p);
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Cofactor matrix `C` with `C_{ij} = (-1)^{i+j} det(M without row i, col j)`,
/// modulo `p`.
pub fn cofactor_mod_p(p: i64, m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<i64>> = (0..n)
                        .filter(|&r| r != i)
                        .map(|r| {
                            (0..n)
                                .filter(|&c| c != j)
                                .map(|c| m[r][c])
                                .collect()
                        })
                        .collect();
                    let d = det_mod_p(p, &minor);
                    if (i + j) % 2 == 1 {
                        (p - d) % p
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect()
}

pub(crate) fn inv_mod(a: i64, p: i64) -> i64 {
    let mut r = 1i64;
    let mut b = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_inverse() {
        let m = vec![vec![1, 1], vec![0, 1]];
        let inv = inverse_mod_p(3, &m).unwrap();
        assert_eq!(inv, vec![vec![1, 2], vec![0, 1]]);
        assert_eq!(det_mod_p(3, &m), 1);
    }
}
