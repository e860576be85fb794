use crate::poly::IntPoly;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // deterministic witness set for 64-bit integers
    'outer: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn primes_below(start: u64) -> impl Iterator<Item = u64> {
    (0..).map(move |k| start - 2 * k).filter(|&n| is_prime(n))
}

/// Characteristic polynomial of `m` modulo `p`, via Hessenberg reduction.
fn char_poly_mod(m: &[Vec<i64>], p: u64) -> Vec<u64> {
    let n = m.len();
    let mut h: Vec<Vec<u64>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
        .collect();
    let sub = |a: u64, b: u64| if a >= b { a - b } else { a + p - b };
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = pow_mod(h[j + 1][j], p - 2, p);
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let f = mul_mod(h[i][j], inv, p);
            // row_i -= f row_{j+1}
            for k in 0..n {
                let t = mul_mod(f, h[j + 1][k], p);
                h[i][k] = sub(h[i][k], t);
            }
            // col_{j+1} += f col_i keeps similarity
            for r in 0..n {
                let t = mul_mod(f, h[r][i], p);
                h[r][j + 1] = (h[r][j + 1] + t) % p;
            }
        }
    }
    // p_k(t) = (t - h_kk) p_{k-1} - sum_i h_ik prod(sub-diagonal) p_{i-1}
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let mut next = vec![0u64; k + 2];
        let prev = &polys[k];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % p;
            next[i] = sub(next[i], mul_mod(h[k][k], c, p));
        }
        let mut prod = 1u64;
        for i in (0..k).rev() {
            prod = mul_mod(prod, h[i + 1][i], p);
            if prod == 0 {
                break;
            }
            let coef = mul_mod(h[i][k], prod, p);
            if coef == 0 {
                continue;
            }
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] = sub(next[d], mul_mod(coef, c, p));
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// Exact `det(tI - M)` for an integer matrix by multi-modular Hessenberg reduction and CRT.
///
/// Enough primes are used to cover the coefficient bound `prod_i (1 + |row_i|_2)`.
pub fn char_poly(m: &[Vec<i64>]) -> IntPoly {
    let n = m.len();
    if n == 0 {
        return IntPoly::from_i64(&[1]);
    }
    let mut log_bound = 0.0f64;
    for r in m {
        let norm2: f64 = r.iter().map(|&x| (x as f64).powi(2)).sum();
        log_bound += (1.0 + norm2.sqrt()).log2();
    }
    // signed coefficients need twice the bound, plus margin
    let need_bits = log_bound + 4.0;
    let mut modulus = BigUint::one();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    for p in primes_below((1u64 << 62) - 1) {
        let r = char_poly_mod(m, p);
        let pb = BigUint::from(p);
        if modulus.is_one() {
            residues = r.iter().map(|&x| BigInt::from(x)).collect();
        } else {
            // x = x0 + M * ((r - x0) M^{-1} mod p)
            let minv = BigInt::from(pow_mod((&modulus % &pb).to_u64().unwrap(), p - 2, p));
            let mb = BigInt::from(modulus.clone());
            let pi = BigInt::from(p);
            for (x, &rk) in residues.iter_mut().zip(&r) {
                let t = ((BigInt::from(rk) - &*x) * &minv).mod_floor(&pi);
                *x += &mb * t;
            }
        }
        modulus *= pb;
        if modulus.bits() as f64 > need_bits {
            break;
        }
    }
    let m_int = BigInt::from(modulus);
    let half = &m_int >> 1;
    let coeffs = residues
        .into_iter()
        .map(|x| if x > half { x - &m_int } else { x })
        .collect();
    IntPoly::new(coeffs)
}

/// Largest absolute coefficient, for diagnostics.
pub fn height(p: &IntPoly) -> BigInt {
    p.coeffs().iter().map(|c| c.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::berkowitz;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        assert_eq!(char_poly(&[vec![1, 0], vec![0, 1]]).to_i64_vec().unwrap(), vec![1, -2, 1]);
        assert_eq!(char_poly(&[vec![1]]).to_i64_vec().unwrap(), vec![-1, 1]);
        assert_eq!(char_poly(&[]).to_i64_vec().unwrap(), vec![1]);
        let z3 = [vec![1, 0, 1], vec![1, 0, 0], vec![0, 1, 1]];
        assert_eq!(char_poly(&z3).to_i64_vec().unwrap(), vec![-1, 1, -2, 1]);
    }

    #[test]
    fn primes() {
        assert!(is_prime(2305843009213693951));
        assert!(!is_prime(2305843009213693953));
        assert!(is_prime(97) && !is_prime(91));
    }

    proptest! {
        #[test]
        fn matches_berkowitz(n in 1usize..9, seed in prop::collection::vec(-3i64..4, 64)) {
            let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[(i * 8 + j) % 64]).collect()).collect();
            let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let oracle = IntPoly::new(berkowitz(&big));
            prop_assert_eq!(char_poly(&m), oracle);
        }

        #[test]
        fn sparse_nonnegative_matches_berkowitz(n in 10usize..24, seed in prop::collection::vec(0i64..2, 600)) {
            let m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| if (i * 7 + j * 3) % 5 == 0 { seed[(i * 24 + j) % 600] } else { 0 }).collect()).collect();
            let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            prop_assert_eq!(char_poly(&m), IntPoly::new(berkowitz(&big)));
        }
    }
}
