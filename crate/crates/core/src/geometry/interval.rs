use crate::error::{Error, Result};
use crate::numberfield::{beta_of, field, registry_lookup, FieldElement};
use num_bigint::BigInt;
use num_rational::BigRational;

/// An interval `[Psi(lo), Psi(hi)]` of the real conjugate line, endpoints exact.
#[derive(Clone, Debug)]
pub struct ExactInterval {
    pub field_id: i32,
    pub lo: FieldElement,
    pub hi: FieldElement,
}

impl ExactInterval {
    /// Certified sign of `Psi(x)` (the real conjugate).
    pub fn psi_sign(x: &FieldElement) -> i8 {
        let f = x.field();
        let k = f.conjugate_real_index(0).expect("quadratic field has a real conjugate");
        x.sign_at_real_root(k)
    }

    /// `Psi(a) <= Psi(b)`
    pub fn psi_le(a: &FieldElement, b: &FieldElement) -> bool {
        Self::psi_sign(&(b - a)) >= 0
    }

    /// Length `Psi(hi) - Psi(lo)` as a field element.
    pub fn length(&self) -> FieldElement {
        &self.hi - &self.lo
    }

    pub fn to_f64(&self) -> (f64, f64) {
        let conj = |x: &FieldElement| x.conjugates(64)[0].value.re;
        (conj(&self.lo), conj(&self.hi))
    }
}

fn image(lo: &FieldElement, hi: &FieldElement, f: impl Fn(&FieldElement) -> FieldElement) -> (FieldElement, FieldElement) {
    let (a, b) = (f(lo), f(hi));
    if ExactInterval::psi_le(&a, &b) {
        (a, b)
    } else {
        (b, a)
    }
}

/// The tent-tile of `alpha_{-2}` or `alpha_2`, checked against `I = f_L(I) ∪ f_R(I)` exactly.
pub fn tent_interval_exact(i: i32) -> Result<ExactInterval> {
    if i != 2 && i != -2 {
        return Err(Error::Unsupported(format!("alpha_{i} has no interval tent-tile")));
    }
    let rec = registry_lookup(i)?;
    field(i)?;
    let one = FieldElement::one(i)?;
    let alpha = FieldElement::alpha(i)?;
    let beta = beta_of(rec)?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let (lo, hi) = if i == -2 {
        (&beta - &one, FieldElement::zero(i)?)
    } else {
        (alpha.scale(&half), one.scale(&half))
    };
    // f_L(x) = alpha x, f_R(x) = beta (1 - x)
    let (l1, h1) = image(&lo, &hi, |x| &alpha * x);
    let (l2, h2) = image(&lo, &hi, |x| &beta * &(&one - x));
    let (first, second) = if ExactInterval::psi_le(&l1, &l2) {
        ((l1, h1), (l2, h2))
    } else {
        ((l2, h2), (l1, h1))
    };
    let covers = first.0 == lo && ExactInterval::psi_le(&second.0, &first.1) && {
        let top = if ExactInterval::psi_le(&first.1, &second.1) { &second.1 } else { &first.1 };
        *top == hi
    };
    if !covers {
        return Err(Error::Unsupported(format!("set equation fails for alpha_{i}")));
    }
    Ok(ExactInterval { field_id: i, lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_tiles() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let iv = tent_interval_exact(-2).unwrap();
        let (a, b) = iv.to_f64();
        assert!((a + phi).abs() < 1e-15 && b == 0.0);
        let iv = tent_interval_exact(2).unwrap();
        let (a, b) = iv.to_f64();
        assert!((a - (1.0 - phi) / 2.0).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        assert!(tent_interval_exact(1).is_err());
    }

    #[test]
    fn branches_meet_in_a_point() {
        // f_L(I) and f_R(I) overlap only at an endpoint: lengths add up exactly
        for i in [-2, 2] {
            let iv = tent_interval_exact(i).unwrap();
            let rec = registry_lookup(i).unwrap();
            let a = FieldElement::alpha(i).unwrap();
            let b = beta_of(rec).unwrap();
            let len = iv.length();
            let scaled = |m: &FieldElement| {
                let x = m * &len;
                if ExactInterval::psi_sign(&x) < 0 { -x } else { x }
            };
            assert_eq!(&scaled(&a) + &scaled(&b), len);
        }
    }
}
