use super::field::{field, NumberField, BASE_BITS};
use super::registry::SpecialPisotRecord;
use crate::error::{Error, Result};
use crate::linalg::{berkowitz, solve_rational};
use crate::poly::{rational_from_f64, round_dyadic};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Exact element of `Q(alpha_i)`, stored as coefficients of `1, alpha, ..., alpha^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: i32,
    coeffs: Vec<BigRational>,
}

/// Approximation of one Galois conjugate of a field element.
#[derive(Clone, Debug)]
pub struct Conjugate {
    /// `(re, im)` rounded to doubles
    pub value: Complex64,
    /// `|(re, im) - exact| <= error_bound`
    pub error_bound: f64,
    pub re: BigRational,
    pub im: BigRational,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldElement {
    pub fn new(field_id: i32, coeffs: Vec<BigRational>) -> Result<Self> {
        let f = field(field_id)?;
        Ok(FieldElement {
            field: field_id,
            coeffs: f.reduce(coeffs),
        })
    }

    pub fn from_i64(field_id: i32, coeffs: &[i64]) -> Result<Self> {
        Self::new(field_id, coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn from_int(field_id: i32, n: i64) -> Result<Self> {
        Self::from_i64(field_id, &[n])
    }

    pub fn zero(field_id: i32) -> Result<Self> {
        Self::from_int(field_id, 0)
    }

    pub fn one(field_id: i32) -> Result<Self> {
        Self::from_int(field_id, 1)
    }

    /// The generator `alpha_i` itself.
    pub fn alpha(field_id: i32) -> Result<Self> {
        Self::from_i64(field_id, &[0, 1])
    }

    pub fn field_id(&self) -> i32 {
        self.field
    }

    pub fn field(&self) -> &'static NumberField {
        field(self.field).expect("validated on construction")
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Integer coefficients, when all coefficients are integers fitting `i64`.
    pub fn to_int_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
            .collect()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            Err(Error::FieldMismatch(self.field, other.field))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldElement {
            field: self.field,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(FieldElement {
            field: self.field,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len();
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        Ok(FieldElement {
            field: self.field,
            coeffs: self.field().reduce(prod),
        })
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        FieldElement {
            field: self.field,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Matrix of multiplication by `self` on the power basis (column `j` is `self * alpha^j`).
    pub fn mul_matrix(&self) -> Vec<Vec<BigRational>> {
        let n = self.coeffs.len();
        let mut cols = Vec::with_capacity(n);
        let mut x = self.clone();
        let alpha = Self::alpha(self.field).unwrap();
        for _ in 0..n {
            cols.push(x.coeffs.clone());
            x = &x * &alpha;
        }
        (0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect()
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse);
        }
        let n = self.coeffs.len();
        let mut e0 = vec![BigRational::zero(); n];
        e0[0] = BigRational::one();
        let x = solve_rational(&self.mul_matrix(), &e0).ok_or(Error::ZeroInverse)?;
        Ok(FieldElement {
            field: self.field,
            coeffs: x,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.inv()?)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(self.field)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Characteristic polynomial of multiplication by `self`, ascending and monic.
    pub fn char_poly(&self) -> Vec<BigRational> {
        berkowitz(&self.mul_matrix())
    }

    /// Value at the dominant root as a double (not certified).
    pub fn to_f64(&self) -> f64 {
        eval_f64(&self.coeffs, self.field().dominant_f64())
    }

    /// Certified sign at the dominant real root.
    pub fn sign(&self) -> i8 {
        self.sign_at_real_root(0)
    }

    /// Certified sign at real root `k` of the minimal polynomial (largest first).
    pub fn sign_at_real_root(&self, k: usize) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let f = self.field();
        let x = f.real_roots()[k].mid_f64();
        if let Some(s) = fast_sign(&self.coeffs, x) {
            return s;
        }
        let mut bits = BASE_BITS;
        loop {
            let iv = f.real_root_interval(k, bits);
            let (lo, hi) = interval_horner(&self.coeffs, &iv.lo, &iv.hi);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    /// Galois conjugates at the non-dominant roots, in the fixed root order.
    pub fn conjugates(&self, precision: u32) -> Vec<Conjugate> {
        let precision = precision.max(32);
        let f = self.field();
        f.conjugate_roots()
            .iter()
            .map(|&r| conjugate_at(f, &self.coeffs, r, precision))
            .collect()
    }
}

fn eval_f64(c: &[BigRational], x: f64) -> f64 {
    c.iter()
        .rev()
        .fold(0.0, |acc, ck| acc * x + ck.to_f64().unwrap_or(f64::NAN))
}

fn fast_sign(c: &[BigRational], x: f64) -> Option<i8> {
    let u = f64::EPSILON;
    let mut mag = 0.0;
    let mut deriv = 0.0;
    let ax = x.abs() + 1e-12;
    for (k, ck) in c.iter().enumerate() {
        let v = ck.to_f64()?;
        if !v.is_finite() {
            return None;
        }
        mag += v.abs() * ax.powi(k as i32);
        if k > 0 {
            deriv += k as f64 * v.abs() * ax.powi(k as i32 - 1);
        }
    }
    let v = eval_f64(c, x);
    let err = 2.0 * (4.0 * (c.len() as f64 + 1.0) * u * mag + deriv * (2.0 * u * ax + 1e-18));
    if !v.is_finite() || v.abs() <= err {
        None
    } else {
        Some(if v > 0.0 { 1 } else { -1 })
    }
}

/// Range of the coefficient polynomial over `[lo, hi]` by interval Horner.
fn interval_horner(c: &[BigRational], lo: &BigRational, hi: &BigRational) -> (BigRational, BigRational) {
    let mut a = c.last().unwrap().clone();
    let mut b = a.clone();
    for ck in c.iter().rev().skip(1) {
        let p = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mut mn = p[0].clone();
        let mut mx = p[0].clone();
        for x in &p[1..] {
            if x < &mn {
                mn = x.clone();
            }
            if x > &mx {
                mx = x.clone();
            }
        }
        a = mn + ck;
        b = mx + ck;
    }
    (a, b)
}

#[derive(Clone)]
struct Cq {
    re: BigRational,
    im: BigRational,
}

impl Cq {
    fn mul(&self, o: &Cq) -> Cq {
        Cq {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn add_real(&self, x: &BigRational) -> Cq {
        Cq {
            re: &self.re + x,
            im: self.im.clone(),
        }
    }

    fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn horner(c: &[BigRational], z: &Cq) -> Cq {
        let mut acc = Cq {
            re: BigRational::zero(),
            im: BigRational::zero(),
        };
        for ck in c.iter().rev() {
            acc = acc.mul(z).add_real(ck);
        }
        acc
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

fn sqrt_up(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY).sqrt() * (1.0 + 1e-12) + f64::MIN_POSITIVE
}

fn conjugate_at(f: &NumberField, coeffs: &[BigRational], root: Complex64, precision: u32) -> Conjugate {
    let mp: Vec<BigRational> = f
        .minpoly()
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    let dp: Vec<BigRational> = mp
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * q(k as i64))
        .collect();
    let n = (mp.len() - 1) as i64;
    let real = root.im == 0.0;
    let mut z = Cq {
        re: rational_from_f64(root.re),
        im: if real { BigRational::zero() } else { rational_from_f64(root.im) },
    };
    let mut work = precision + 16;
    loop {
        // Newton until the certified root radius is small enough
        let mut radius;
        let mut steps = 0;
        loop {
            let p = Cq::horner(&mp, &z);
            let d = Cq::horner(&dp, &z);
            let dn = d.norm_sqr();
            // root radius bound n |p / p'|
            radius = sqrt_up(&(p.norm_sqr() / &dn)) * n as f64;
            if radius < 2f64.powi(-(work as i32)) || steps > 64 {
                break;
            }
            // z <- z - p/p'
            let num = Cq {
                re: &p.re * &d.re + &p.im * &d.im,
                im: &p.im * &d.re - &p.re * &d.im,
            };
            z = Cq {
                re: round_dyadic(&(&z.re - &num.re / &dn), work + 8),
                im: if real {
                    BigRational::zero()
                } else {
                    round_dyadic(&(&z.im - &num.im / &dn), work + 8)
                },
            };
            steps += 1;
        }
        let v = Cq::horner(coeffs, &z);
        let zn = sqrt_up(&z.norm_sqr()) + radius;
        let lip: f64 = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c.abs().to_f64().unwrap_or(f64::INFINITY) * zn.powi(k as i32 - 1))
            .sum();
        let err = radius * lip * (1.0 + 1e-9);
        if err <= 2f64.powi(-(precision as i32)) {
            return Conjugate {
                value: v.to_c64(),
                error_bound: err,
                re: v.re,
                im: v.im,
            };
        }
        work += 32;
    }
}

/// `beta = alpha / (alpha - 1)` in `Q(alpha_i)`.
pub fn beta_of(record: &SpecialPisotRecord) -> Result<FieldElement> {
    record.require_tent_tile()?;
    let a = FieldElement::alpha(record.index)?;
    let one = FieldElement::one(record.index)?;
    a.checked_div(&(&a - &one))
}

/// Checks `alpha^{m_i} = beta^{m_{-i}}` exactly.
pub fn verify_dependency(record: &SpecialPisotRecord) -> bool {
    let Ok(beta) = beta_of(record) else {
        return false;
    };
    let Ok(partner) = super::registry_lookup(record.partner) else {
        return false;
    };
    let a = FieldElement::alpha(record.index).unwrap();
    a.pow(record.exponent as i64).unwrap() == beta.pow(partner.exponent as i64).unwrap()
}

pub fn sign_at_dominant_root(z: &FieldElement) -> i8 {
    z.sign()
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &'a FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field mismatch")
            }
        }
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                self.$checked(&rhs).expect("field mismatch")
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            field: self.field,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            if !unit || k == 0 {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "a")?,
                _ => write!(f, "a^{k}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::{registry_lookup, unit_indices};
    use proptest::prelude::*;

    fn el(i: i32, c: &[i64]) -> FieldElement {
        FieldElement::from_i64(i, c).unwrap()
    }

    #[test]
    fn unit_inverse() {
        let a = FieldElement::alpha(3).unwrap();
        assert!((&a * &a.inv().unwrap()).is_one());
        assert!(matches!(FieldElement::zero(3).unwrap().inv(), Err(Error::ZeroInverse)));
    }

    #[test]
    fn beta_times_alpha_minus_one() {
        let r = registry_lookup(1).unwrap();
        let b = beta_of(r).unwrap();
        let a = FieldElement::alpha(1).unwrap();
        let one = FieldElement::one(1).unwrap();
        assert_eq!(&(&a - &one) * &b, a);
    }

    #[test]
    fn minimal_polynomial_vanishes() {
        let a = FieldElement::alpha(5).unwrap();
        let one = FieldElement::one(5).unwrap();
        assert!((&(&a.pow(3).unwrap() - &a) - &one).is_zero());
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = FieldElement::alpha(1).unwrap();
        let b = FieldElement::alpha(2).unwrap();
        assert!(matches!(a.checked_add(&b), Err(Error::FieldMismatch(1, 2))));
    }

    #[test]
    fn beta_has_partner_minpoly() {
        for i in unit_indices() {
            let r = registry_lookup(i).unwrap();
            let b = beta_of(r).unwrap();
            let partner = registry_lookup(-i).unwrap();
            let want: Vec<BigRational> = partner.minpoly.coeffs.iter().map(|&c| q(c)).collect();
            assert_eq!(b.char_poly(), want, "alpha_{i}");
            assert!((b.to_f64() - partner.approx_value).abs() < 1e-4);
        }
        assert!(matches!(beta_of(registry_lookup(0).unwrap()), Err(Error::NoTentTile)));
    }

    #[test]
    fn beta_is_an_involution() {
        for i in unit_indices() {
            let b = beta_of(registry_lookup(i).unwrap()).unwrap();
            let one = FieldElement::one(i).unwrap();
            let bb = b.checked_div(&(&b - &one)).unwrap();
            assert_eq!(bb, FieldElement::alpha(i).unwrap());
        }
    }

    #[test]
    fn dependencies_hold() {
        for i in unit_indices() {
            assert!(verify_dependency(registry_lookup(i).unwrap()), "alpha_{i}");
        }
    }

    #[test]
    fn wrong_dependency_exponent_is_rejected() {
        let mut r = registry_lookup(4).unwrap().clone();
        r.exponent = 3;
        assert!(!verify_dependency(&r));
    }

    #[test]
    fn signs() {
        assert_eq!(el(1, &[-1, 1]).sign(), 1);
        assert_eq!(FieldElement::zero(1).unwrap().sign(), 0);
        let b = beta_of(registry_lookup(1).unwrap()).unwrap();
        let a = FieldElement::alpha(1).unwrap();
        assert_eq!((&b - &a).sign(), 1);
        // tiny difference forces the exact path: alpha_2 - 1.618033988749895
        let approx = BigRational::new(1618033988749895i64.into(), 1000000000000000i64.into());
        let d = FieldElement::new(2, vec![-approx, q(1)]).unwrap();
        assert_eq!(d.sign(), -1);
        // golden conjugate is negative
        assert_eq!(FieldElement::alpha(2).unwrap().sign_at_real_root(1), -1);
    }

    #[test]
    fn conjugate_examples() {
        let c = FieldElement::alpha(1).unwrap().conjugates(64);
        assert_eq!(c.len(), 2);
        assert!(c[0].value.im > 0.0 && c[1].value.im < 0.0);
        let expect = 1.0 / registry_lookup(1).unwrap().approx_value.sqrt();
        assert!((c[0].value.norm() - expect).abs() < 1e-4);
        assert!(c[0].error_bound <= 2f64.powi(-64) + 1e-16);
        let c = FieldElement::alpha(4).unwrap().conjugates(64);
        assert!((c[2].value.re + 0.81917).abs() < 1e-5 && c[2].value.im == 0.0);
        let c = FieldElement::alpha(-2).unwrap().conjugates(128);
        let want = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((c[0].value.re - want).abs() < 1e-15);
        assert!(c[0].error_bound < 1e-30);
    }

    #[test]
    fn conjugates_of_alpha_and_beta_are_small() {
        for i in unit_indices() {
            let r = registry_lookup(i).unwrap();
            let a = FieldElement::alpha(i).unwrap();
            let b = beta_of(r).unwrap();
            for z in a.conjugates(40).into_iter().chain(b.conjugates(40)) {
                assert!(z.value.norm() < 1.0, "alpha_{i}");
            }
        }
    }

    #[test]
    fn display() {
        assert_eq!(el(1, &[1, -2, 1]).to_string(), "a^2 - 2a + 1");
        assert_eq!(FieldElement::zero(1).unwrap().to_string(), "0");
    }

    fn arb(i: i32) -> impl Strategy<Value = FieldElement> {
        let n = registry_lookup(i).unwrap().degree();
        proptest::collection::vec(-20i64..20, n).prop_map(move |c| el(i, &c))
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb(4), b in arb(4), c in arb(4)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn sign_is_odd(a in arb(-4)) {
            let s = a.sign();
            prop_assert_eq!(s * (-&a).sign(), if a.is_zero() { 0 } else { -1 });
            prop_assert_eq!(s == 0, a.is_zero());
            if a.to_f64().abs() > 1e-6 {
                prop_assert_eq!(s as f64, a.to_f64().signum());
            }
        }

        #[test]
        fn conjugation_is_a_ring_map(a in arb(1), b in arb(1)) {
            let ca = a.conjugates(48);
            let cb = b.conjugates(48);
            let cab = (&a * &b).conjugates(48);
            for k in 0..ca.len() {
                let d = ca[k].value * cb[k].value - cab[k].value;
                prop_assert!(d.norm() < 1e-9 * (1.0 + cab[k].value.norm()));
            }
        }
    }
}
