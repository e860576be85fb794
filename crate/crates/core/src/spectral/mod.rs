//! Characteristic polynomials, Perron data and the projection onto the contracting space.

mod charpoly;
mod graph;

pub use charpoly::{char_poly, height};
pub use graph::{dominant_eigenvalue, strongly_connected_components, DominantEigenvalue};

use crate::error::{Error, Result};
use crate::geometry::{EmbeddingMap, Mat, Vec3};
use crate::numberfield::{beta_of, FieldElement, SpecialPisotRecord};
use crate::poly::IntPoly;
use crate::substitution::{substitution_for, Family, Substitution};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Perron-Frobenius data of a family substitution.
#[derive(Clone, Debug)]
pub struct PerronData {
    pub record_index: i32,
    pub lambda0: FieldElement,
    /// left eigenvector, `u M = lambda0 u`
    pub u: Vec<FieldElement>,
    /// moduli of the conjugates of `lambda0` other than itself, largest first
    pub contracting: Vec<f64>,
    pub char_poly: IntPoly,
    /// characteristic polynomial of multiplication by `lambda0`
    pub lambda_poly: IntPoly,
    pub reducible: bool,
    /// `m - d`
    pub supplementary_dim: usize,
}

/// Exact projection class `z = <x, u>`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiClass {
    pub z: FieldElement,
}

fn to_int_poly(c: &[BigRational]) -> Result<IntPoly> {
    let mut out = Vec::with_capacity(c.len());
    for x in c {
        if !x.is_integer() {
            return Err(Error::EigenvectorCheck(format!("non-integral coefficient {x}")));
        }
        out.push(x.to_integer());
    }
    Ok(IntPoly::new(out))
}

fn family_u(family: Family, alpha: &FieldElement, beta: &FieldElement) -> Vec<FieldElement> {
    let powers = |x: &FieldElement, n: usize| -> Vec<FieldElement> {
        (0..n).map(|k| x.pow(k as i64).expect("nonzero base")).collect()
    };
    let doubled = |v: Vec<FieldElement>| -> Vec<FieldElement> { v.iter().chain(&v).cloned().collect() };
    match family {
        Family::Zeta(p) => {
            let mut v = powers(alpha, p);
            v[0] = beta.clone();
            v
        }
        Family::Theta(q) => doubled(powers(alpha, q)),
        Family::ThetaPrime(q) if q % 2 == 1 => doubled(powers(beta, q)),
        Family::ThetaPrime(q) => powers(beta, q),
        Family::ZetaPrime(p) => {
            let mut v = powers(beta, p);
            v[0] = alpha.clone();
            if p % 2 == 1 {
                doubled(v)
            } else {
                v
            }
        }
    }
}

/// `u M` with integer `M`.
pub fn left_multiply(u: &[FieldElement], m: &[Vec<i64>]) -> Vec<FieldElement> {
    let n = m.len();
    let zero = FieldElement::zero(u[0].field_id()).expect("field of u");
    (0..n)
        .map(|j| {
            (0..n).fold(zero.clone(), |acc, i| match m[i][j] {
                0 => acc,
                1 => &acc + &u[i],
                c => &acc + &u[i].scale(&BigRational::from_integer(BigInt::from(c))),
            })
        })
        .collect()
}

/// The family eigenvector of `sigma`, verified exactly.
pub fn perron_data(s: &Substitution, record: &SpecialPisotRecord) -> Result<PerronData> {
    let (expected, corr) = substitution_for(record)?;
    if &expected != s {
        return Err(Error::EigenvectorCheck(format!(
            "substitution is not {} for alpha_{}",
            corr.family.name(),
            record.index
        )));
    }
    let alpha = FieldElement::alpha(record.index)?;
    let beta = beta_of(record)?;
    let u = family_u(corr.family, &alpha, &beta);
    let m = s.incidence_matrix();
    let um = left_multiply(&u, &m);
    let lambda0 = corr.lambda0.clone();
    for (j, (l, r)) in um.iter().zip(&u).enumerate() {
        if *l != &lambda0 * r {
            return Err(Error::EigenvectorCheck(format!("entry {j} of uM")));
        }
    }
    if let Some(j) = u.iter().position(|x| x.sign() <= 0) {
        return Err(Error::EigenvectorCheck(format!("entry {j} of u is not positive")));
    }
    let mut contracting: Vec<f64> = lambda0
        .conjugates(64)
        .iter()
        .map(|c| c.value.norm())
        .collect();
    contracting.sort_by(|a, b| b.total_cmp(a));
    if contracting.first().is_some_and(|&x| x >= 1.0) {
        return Err(Error::EigenvectorCheck("lambda0 is not Pisot".into()));
    }
    let cp = char_poly(&m);
    let lambda_poly = to_int_poly(&lambda0.char_poly())?;
    if cp.div_exact(&lambda_poly).is_none() {
        return Err(Error::EigenvectorCheck("minimal polynomial does not divide".into()));
    }
    let deg = record.degree();
    Ok(PerronData {
        record_index: record.index,
        lambda0,
        u,
        contracting,
        reducible: cp.degree().unwrap_or(0) > deg,
        supplementary_dim: s.size() - deg,
        char_poly: cp,
        lambda_poly,
    })
}

impl PerronData {
    /// `|lambda_1|`
    pub fn lambda1(&self) -> f64 {
        self.contracting[0]
    }

    /// `|lambda_d|`
    pub fn lambda_d(&self) -> f64 {
        *self.contracting.last().expect("d >= 1")
    }

    pub fn size(&self) -> usize {
        self.u.len()
    }

    /// `<x, u>`
    pub fn pi_exact(&self, x: &[i64]) -> Result<PiClass> {
        if x.len() != self.u.len() {
            return Err(Error::DimensionMismatch(x.len(), self.u.len()));
        }
        let mut z = FieldElement::zero(self.record_index)?;
        for (c, ui) in x.iter().zip(&self.u) {
            match c {
                0 => {}
                1 => z = &z + ui,
                -1 => z = &z - ui,
                _ => z = &z + &ui.scale(&BigRational::from_integer(BigInt::from(*c))),
            }
        }
        Ok(PiClass { z })
    }

    /// `<l(w), u>` for a word.
    pub fn pi_word(&self, w: &[usize]) -> FieldElement {
        let zero = FieldElement::zero(self.record_index).expect("registry field");
        w.iter().fold(zero, |acc, &c| &acc + &self.u[c])
    }

    pub fn h_apply(&self, c: &PiClass) -> PiClass {
        PiClass {
            z: &self.lambda0 * &c.z,
        }
    }

    /// Numeric action of `h` on `K_c` coordinates.
    pub fn h_matrix(&self, emb: &EmbeddingMap) -> Result<Mat> {
        emb.mult_matrix(&self.lambda0)
    }

    /// `u` scaled by a positive rational; every downstream decision is invariant under this.
    pub fn rescaled(&self, s: &BigRational) -> PerronData {
        let mut out = self.clone();
        if *s > BigRational::zero() && !s.is_one() {
            out.u = self.u.iter().map(|x| x.scale(s)).collect();
        }
        out
    }
}

/// `K_c` coordinates of a class: `-Psi(z)`.
pub fn pi_numeric(c: &PiClass, emb: &EmbeddingMap) -> Result<Vec3> {
    Ok(-emb.psi(&c.z)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_matrices;
    use crate::numberfield::registry_lookup;
    use proptest::prelude::*;

    fn pd(i: i32) -> PerronData {
        let rec = registry_lookup(i).unwrap();
        let (s, _) = substitution_for(rec).unwrap();
        perron_data(&s, rec).unwrap()
    }

    #[test]
    fn eigenvectors_verify_for_all_records() {
        for i in [1, 2, 3, 4, 5, -1, -3, -4, -5] {
            let p = pd(i);
            assert!(p.lambda1() < 1.0, "alpha_{i}");
            let cp = &p.char_poly;
            let lam = &p.lambda0;
            // char_poly(M) at lambda0
            let mut acc = FieldElement::zero(i).unwrap();
            for c in cp.coeffs().iter().rev() {
                acc = &(&acc * lam) + &FieldElement::from_int(i, c.try_into().unwrap()).unwrap();
            }
            assert!(acc.is_zero(), "alpha_{i}");
        }
    }

    #[test]
    fn zeta3_data() {
        let p = pd(1);
        assert_eq!(p.char_poly.to_i64_vec().unwrap(), vec![-1, 1, -2, 1]);
        assert_eq!(p.lambda0, FieldElement::alpha(1).unwrap());
        assert!(!p.reducible);
        let z = p.pi_exact(&[1, 0, 0]).unwrap();
        assert_eq!(z.z, beta_of(registry_lookup(1).unwrap()).unwrap());
        assert!(p.pi_exact(&[0, 0, 0]).unwrap().z.is_zero());
    }

    #[test]
    fn theta_prime_4_squares_beta() {
        let p = pd(-4);
        assert!((p.lambda0.to_f64() - 1.90517).abs() < 1e-5);
        assert!(!p.reducible);
        assert_eq!(p.u.len(), 4);
        let zp = pd(-1);
        assert_eq!(zp.u[0], zp.u[3]);
        assert_eq!(zp.u[0], FieldElement::alpha(-1).unwrap());
    }

    #[test]
    fn reducible_flags() {
        for i in [3, 4, 5, -1, -3, -5] {
            let p = pd(i);
            assert!(p.reducible, "alpha_{i}");
            assert_eq!(p.supplementary_dim, p.size() - registry_lookup(i).unwrap().degree());
        }
    }

    #[test]
    fn wrong_substitution_rejected() {
        let rec = registry_lookup(3).unwrap();
        let s = crate::substitution::zeta_p(3).unwrap();
        assert!(matches!(perron_data(&s, rec), Err(Error::EigenvectorCheck(_))));
    }

    #[test]
    fn projection_of_letter_one() {
        let p = pd(1);
        let (emb, _) = build_matrices(registry_lookup(1).unwrap(), 64).unwrap();
        let v = pi_numeric(&p.pi_exact(&[0, 1, 0]).unwrap(), &emb).unwrap();
        let w = -emb.psi(&FieldElement::alpha(1).unwrap()).unwrap();
        assert!((v - w).norm() < 1e-12);
    }

    #[test]
    fn h_on_zero() {
        let p = pd(3);
        assert!(p.h_apply(&p.pi_exact(&[0; 6]).unwrap()).z.is_zero());
    }

    fn records() -> impl Strategy<Value = i32> {
        prop::sample::select(vec![1, 2, 3, 4, 5, -1, -3, -4, -5])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn pi_additive_and_equivariant(i in records(), raw in prop::collection::vec(-4i64..5, 20)) {
            let p = pd(i);
            let n = p.size();
            let x = &raw[..n];
            let y = &raw[10..10 + n];
            let sum: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let (zx, zy) = (p.pi_exact(x).unwrap(), p.pi_exact(y).unwrap());
            prop_assert_eq!(p.pi_exact(&sum).unwrap().z, &zx.z + &zy.z);
            let (emb, _) = build_matrices(registry_lookup(i).unwrap(), 64).unwrap();
            let h = p.h_matrix(&emb).unwrap();
            let lhs = pi_numeric(&p.h_apply(&zx), &emb).unwrap();
            let rhs = h * pi_numeric(&zx, &emb).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + rhs.norm()));
            let d = pi_numeric(&zx, &emb).unwrap() - pi_numeric(&zy, &emb).unwrap();
            let hd = lhs - pi_numeric(&p.h_apply(&zy), &emb).unwrap();
            prop_assert!(hd.norm() <= p.lambda1() * d.norm() + 1e-9);
        }

        #[test]
        fn class_equality_matches_numeric(i in records(), raw in prop::collection::vec(-2i64..3, 20)) {
            let p = pd(i);
            let n = p.size();
            let (emb, _) = build_matrices(registry_lookup(i).unwrap(), 64).unwrap();
            let (zx, zy) = (p.pi_exact(&raw[..n]).unwrap(), p.pi_exact(&raw[10..10 + n]).unwrap());
            let dist = (pi_numeric(&zx, &emb).unwrap() - pi_numeric(&zy, &emb).unwrap()).norm();
            let real_gap = (zx.z.to_f64() - zy.z.to_f64()).abs();
            if zx == zy {
                prop_assert!(dist < 1e-9);
            } else {
                // distinct classes differ in some embedding
                prop_assert!(dist > 1e-12 || real_gap > 1e-12);
            }
        }

        #[test]
        fn scale_invariant_signs(i in records(), raw in prop::collection::vec(-3i64..4, 10)) {
            let p = pd(i);
            let q = p.rescaled(&BigRational::from_integer(BigInt::from(2)));
            let x = &raw[..p.size()];
            prop_assert_eq!(p.pi_exact(x).unwrap().z.sign(), q.pi_exact(x).unwrap().z.sign());
        }
    }
}
