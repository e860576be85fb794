//! Small exact linear algebra helpers shared by the field and spectral code.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// Characteristic polynomial `det(tI - M)` by Berkowitz' division-free algorithm.
///
/// Coefficients are ascending. Works over any commutative ring, which makes it a
/// useful oracle for the faster modular routine used on large matrices.
pub fn berkowitz<T>(m: &[Vec<T>]) -> Vec<T>
where
    T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T>,
{
    let n = m.len();
    // descending coefficients of the characteristic polynomial of the leading r x r block
    let mut poly = vec![T::one()];
    for r in 0..n {
        // split the (r+1) x (r+1) leading block as [[A, c], [row, a]]
        let a = m[r][r].clone();
        let row: Vec<T> = (0..r).map(|j| m[r][j].clone()).collect();
        let col: Vec<T> = (0..r).map(|i| m[i][r].clone()).collect();
        // Toeplitz column: 1, -a, -row*col, -row*A*col, ...
        let mut t = vec![T::one(), -a];
        let mut v = col;
        for _ in 0..r {
            let s = dot(&row, &v);
            t.push(-s);
            v = (0..r)
                .map(|i| {
                    (0..r).fold(T::zero(), |acc, j| acc + m[i][j].clone() * v[j].clone())
                })
                .collect();
        }
        let mut next = vec![T::zero(); r + 2];
        for (i, ti) in t.iter().enumerate() {
            for (j, pj) in poly.iter().enumerate() {
                if i + j < r + 2 {
                    next[i + j] = next[i + j].clone() + ti.clone() * pj.clone();
                }
            }
        }
        poly = next;
    }
    poly.reverse();
    poly
}

fn dot<T>(a: &[T], b: &[T]) -> T
where
    T: Clone + Zero + Add<Output = T> + Mul<Output = T>,
{
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// Solves `M x = b` over the rationals; `None` when `M` is singular.
pub fn solve_rational(m: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut().skip(c) {
            *x *= &inv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in c..=n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}
