use crate::numberfield::FieldElement;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn common_denominator(xs: &[FieldElement]) -> BigInt {
    xs.iter()
        .flat_map(|x| x.coeffs().iter())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// Integer row echelon form by repeated Euclidean reduction; returns the nonzero rows.
fn echelon(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut p = 0;
    for c in 0..ncols {
        loop {
            let Some(best) = (p..rows.len())
                .filter(|&r| !rows[r][c].is_zero())
                .min_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()))
            else {
                break;
            };
            rows.swap(p, best);
            let mut done = true;
            for r in p + 1..rows.len() {
                if rows[r][c].is_zero() {
                    continue;
                }
                let q = rows[r][c].div_floor(&rows[p][c]);
                let pivot = rows[p].clone();
                for (x, y) in rows[r].iter_mut().zip(&pivot) {
                    *x -= &q * y;
                }
                if !rows[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                p += 1;
                break;
            }
        }
        if p == rows.len() {
            break;
        }
    }
    rows.truncate(p);
    rows
}

/// A Z-basis of the subgroup of the field generated by `gens`.
pub fn module_basis(gens: &[FieldElement]) -> Vec<FieldElement> {
    let Some(first) = gens.first() else {
        return Vec::new();
    };
    let field = first.field_id();
    let den = common_denominator(gens);
    let dq = BigRational::from_integer(den.clone());
    let rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.coeffs().iter().map(|c| (c * &dq).to_integer()).collect())
        .collect();
    echelon(rows)
        .into_iter()
        .map(|r| {
            let c = r.into_iter().map(|x| BigRational::new(x, den.clone())).collect();
            FieldElement::new(field, c).expect("same field")
        })
        .collect()
}

/// Integer coefficients of `x` in the basis, if `x` lies in the generated lattice.
pub fn integer_coordinates(basis: &[FieldElement], x: &FieldElement) -> Option<Vec<BigInt>> {
    let n = x.coeffs().len();
    let r = basis.len();
    // augmented n x (r+1) system, solved by Gaussian elimination
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = basis.iter().map(|b| b.coeffs()[i].clone()).collect();
            row.push(x.coeffs()[i].clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut p = 0;
    for c in 0..r {
        let Some(k) = (p..n).find(|&k| !a[k][c].is_zero()) else {
            return None;
        };
        a.swap(p, k);
        let inv = a[p][c].recip();
        for v in a[p].iter_mut() {
            *v *= &inv;
        }
        for k in 0..n {
            if k != p && !a[k][c].is_zero() {
                let f = a[k][c].clone();
                for j in 0..=r {
                    let t = &f * &a[p][j];
                    a[k][j] -= t;
                }
            }
        }
        pivots.push(p);
        p += 1;
    }
    if a[p..].iter().any(|row| !row[r].is_zero()) {
        return None;
    }
    let sol: Vec<BigRational> = pivots.iter().map(|&k| a[k][r].clone()).collect();
    if sol.iter().all(|s| s.is_integer()) {
        Some(sol.into_iter().map(|s| s.to_integer()).collect())
    } else {
        None
    }
}

/// All `k` in `Z^r` with `|G k - c| <= rho`, by Fincke-Pohst enumeration. `G` must have full column rank.
pub fn lattice_points(g: &DMatrix<f64>, c: &DVector<f64>, rho: f64) -> Vec<Vec<i64>> {
    let r = g.ncols();
    let qr = g.clone().qr();
    let q = qr.q();
    let rm = qr.r();
    let cq = q.transpose() * c;
    let perp = (c - &q * &cq).norm_squared();
    let budget = rho * rho - perp;
    let mut out = Vec::new();
    if budget < 0.0 || r == 0 {
        return out;
    }
    let mut k = vec![0i64; r];
    search(&rm, &cq, r, budget, &mut k, &mut out);
    out
}

fn search(rm: &DMatrix<f64>, cq: &DVector<f64>, level: usize, budget: f64, k: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if level == 0 {
        out.push(k.clone());
        return;
    }
    let i = level - 1;
    let r = k.len();
    // residual of row i once coordinates above i are fixed
    let mut t = cq[i];
    for j in i + 1..r {
        t -= rm[(i, j)] * k[j] as f64;
    }
    let d = rm[(i, i)];
    let center = t / d;
    let half = budget.max(0.0).sqrt() / d.abs();
    let lo = (center - half - 1e-9).ceil() as i64;
    let hi = (center + half + 1e-9).floor() as i64;
    for v in lo..=hi {
        let e = d * v as f64 - t;
        let rest = budget - e * e;
        if rest < -1e-9 * (1.0 + budget.abs()) {
            continue;
        }
        k[i] = v;
        search(rm, cq, i, rest, k, out);
    }
    k[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_of_redundant_generators() {
        let f = |c: &[i64]| FieldElement::from_i64(3, c).unwrap();
        let gens = [f(&[2, 0, 0]), f(&[0, 1, 0]), f(&[4, 1, 0]), f(&[0, 0, 3]), f(&[0, 0, 6])];
        let b = module_basis(&gens);
        assert_eq!(b.len(), 3);
        assert!(integer_coordinates(&b, &f(&[6, -1, 9])).is_some());
        assert!(integer_coordinates(&b, &f(&[1, 0, 0])).is_none());
        assert!(integer_coordinates(&b, &f(&[0, 0, 1])).is_none());
    }

    #[test]
    fn rank_deficient_membership() {
        let f = |c: &[i64]| FieldElement::from_i64(1, c).unwrap();
        let basis = [f(&[-1, 1, 0]), f(&[-1, 0, 1])];
        assert_eq!(integer_coordinates(&basis, &f(&[-5, 2, 3])).unwrap(), vec![2.into(), 3.into()]);
        assert!(integer_coordinates(&basis, &f(&[0, 1, 0])).is_none());
    }

    #[test]
    fn fincke_pohst_matches_brute_force() {
        let g = DMatrix::from_row_slice(3, 2, &[1.0, 0.3, 0.2, 1.7, -0.5, 0.4]);
        let c = DVector::from_vec(vec![0.4, -0.2, 0.9]);
        let rho = 3.3;
        let mut fast = lattice_points(&g, &c, rho);
        fast.sort();
        let mut slow = Vec::new();
        for a in -20..=20i64 {
            for b in -20..=20i64 {
                let v = &g * DVector::from_vec(vec![a as f64, b as f64]) - &c;
                if v.norm() <= rho {
                    slow.push(vec![a, b]);
                }
            }
        }
        assert_eq!(fast, slow);
    }
}
