use super::registry::{registry, registry_lookup, SpecialPisotRecord};
use crate::error::Result;
use crate::poly::{IntPoly, RealRoots, RootInterval};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use std::sync::LazyLock;

pub(crate) const BASE_BITS: u32 = 64;

/// Precomputed root data for one registry field `Q(alpha_i)`.
#[derive(Debug)]
pub struct NumberField {
    pub record: &'static SpecialPisotRecord,
    poly: IntPoly,
    roots: RealRoots,
    /// real roots at `BASE_BITS`, largest first; the first one is the dominant root
    real_roots: Vec<RootInterval>,
    /// non-dominant roots: descending modulus, positive imaginary part first
    conjugate_roots: Vec<Complex64>,
    /// for each conjugate root, the index into `real_roots` when it is real
    conjugate_real: Vec<Option<usize>>,
}

static FIELDS: LazyLock<Vec<NumberField>> =
    LazyLock::new(|| registry().iter().map(NumberField::build).collect());

/// Field data for registry index `i`.
pub fn field(i: i32) -> Result<&'static NumberField> {
    registry_lookup(i)?;
    Ok(&FIELDS[(i + 5) as usize])
}

impl NumberField {
    fn build(record: &'static SpecialPisotRecord) -> Self {
        let poly = record.minpoly.to_poly();
        let roots = RealRoots::new(&poly);
        let real_roots = roots.isolate(BASE_BITS);
        let dominant = real_roots[0].mid_f64();
        let mut conj: Vec<Complex64> = poly
            .complex_roots()
            .into_iter()
            .filter(|z| (z - Complex64::new(dominant, 0.0)).norm() > 1e-6)
            .collect();
        // snap nearly-real roots onto the axis using the exact real isolation
        let mut conjugate_real = Vec::new();
        for z in conj.iter_mut() {
            let hit = real_roots
                .iter()
                .enumerate()
                .skip(1)
                .find(|(_, iv)| (iv.mid_f64() - z.re).abs() < 1e-6 && z.im.abs() < 1e-6);
            match hit {
                Some((k, iv)) => {
                    *z = Complex64::new(iv.mid_f64(), 0.0);
                    conjugate_real.push(Some(k));
                }
                None => conjugate_real.push(None),
            }
        }
        let mut order: Vec<usize> = (0..conj.len()).collect();
        order.sort_by(|&a, &b| {
            let (za, zb) = (conj[a], conj[b]);
            let (ma, mb) = (za.norm(), zb.norm());
            if (ma - mb).abs() > 1e-9 {
                mb.partial_cmp(&ma).unwrap()
            } else {
                zb.im.partial_cmp(&za.im).unwrap()
            }
        });
        let conjugate_roots = order.iter().map(|&k| conj[k]).collect();
        let conjugate_real = order.iter().map(|&k| conjugate_real[k]).collect();
        NumberField {
            record,
            poly,
            roots,
            real_roots,
            conjugate_roots,
            conjugate_real,
        }
    }

    pub fn index(&self) -> i32 {
        self.record.index
    }

    pub fn degree(&self) -> usize {
        self.record.degree()
    }

    pub fn minpoly(&self) -> &IntPoly {
        &self.poly
    }

    pub fn dominant_root(&self) -> &RootInterval {
        &self.real_roots[0]
    }

    pub fn dominant_f64(&self) -> f64 {
        self.real_roots[0].mid_f64()
    }

    pub fn real_roots(&self) -> &[RootInterval] {
        &self.real_roots
    }

    pub fn conjugate_roots(&self) -> &[Complex64] {
        &self.conjugate_roots
    }

    /// Index into [`Self::real_roots`] for a real conjugate.
    pub fn conjugate_real_index(&self, k: usize) -> Option<usize> {
        self.conjugate_real[k]
    }

    /// Refined copy of real root `k` with width at most `2^-bits`.
    pub fn real_root_interval(&self, k: usize, bits: u32) -> RootInterval {
        let mut iv = self.real_roots[k].clone();
        if bits > BASE_BITS {
            self.roots.refine(&mut iv, bits);
        }
        iv
    }

    /// Coefficients of `alpha^n` reduced modulo the minimal polynomial.
    pub(crate) fn reduce(&self, mut c: Vec<BigRational>) -> Vec<BigRational> {
        let n = self.degree();
        let mp: Vec<BigRational> = self
            .poly
            .coeffs()
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        while c.len() > n {
            let top = c.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = c.len() - n;
            for i in 0..n {
                c[base + i] -= &top * &mp[i];
            }
        }
        c.resize(n, BigRational::zero());
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates_are_inside_unit_disc() {
        for i in crate::numberfield::unit_indices() {
            let f = field(i).unwrap();
            assert_eq!(f.conjugate_roots().len(), f.degree() - 1);
            for z in f.conjugate_roots() {
                assert!(z.norm() < 1.0, "alpha_{i}: {z}");
            }
            assert!((f.dominant_f64() - f.record.approx_value).abs() < 1e-4);
        }
    }

    #[test]
    fn ordering_puts_positive_imaginary_first() {
        let f = field(4).unwrap();
        let r = f.conjugate_roots();
        assert!(r[0].im > 0.0 && r[1].im < 0.0);
        assert!((r[2].re + 0.81917).abs() < 1e-5);
        assert_eq!(f.conjugate_real_index(2), Some(1));
    }
}
