//! Integer polynomials, Sturm sequences and certified real root isolation.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Dense polynomial with integer coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    /// The monomial `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPoly { coeffs: c }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Coefficients as `i64` when they all fit.
    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides by the positive content; signs are preserved.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    /// Exact quotient by a monic divisor, or `None` if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        if !divisor.is_monic() {
            return None;
        }
        let Some(n) = self.degree() else {
            return Some(Self::zero());
        };
        if n < dd {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            q[k] = c;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(Self::new(q))
        } else {
            None
        }
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * z + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        // Horner on numerator/denominator to avoid repeated gcds.
        let (num, den) = (x.numer(), x.denom());
        let n = self.coeffs.len();
        if n == 0 {
            return BigRational::zero();
        }
        let mut acc = BigInt::zero();
        let mut den_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * num + c * &den_pow;
            den_pow *= den;
        }
        // acc = sum c_k num^k den^(n-1-k); den_pow = den^n
        let total_den = den_pow / den;
        BigRational::new(acc, total_den)
    }

    /// Sign of the value at a rational point.
    pub fn sign_at(&self, x: &BigRational) -> i8 {
        sign_of(&self.eval_rational(x))
    }

    /// Pseudo-remainder scaled so that its sign agrees with the true remainder.
    fn signed_prem(&self, other: &Self) -> Self {
        let db = other.degree().expect("division by zero polynomial");
        let lb = other.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        let mut scale_steps: u32 = 0;
        while r.len() > db && !r.is_empty() {
            let lr = r.last().unwrap().clone();
            let shift = r.len() - 1 - db;
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                r[shift + j] -= &lr * b;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
            scale_steps += 1;
        }
        let mut out = Self::new(r);
        if lb.is_negative() && scale_steps % 2 == 1 {
            out = out.neg();
        }
        out
    }

    /// Cauchy bound: every complex root has modulus strictly below the result.
    pub fn cauchy_bound(&self) -> BigRational {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return BigRational::one();
        }
        let lead = self.coeffs[n].abs();
        let mut best = BigRational::zero();
        for c in &self.coeffs[..n] {
            let r = BigRational::new(c.abs(), lead.clone());
            if r > best {
                best = r;
            }
        }
        // round up to an integer to keep the first bisection steps cheap
        let b = best + BigRational::one();
        BigRational::from_integer(b.ceil().to_integer())
    }

    /// Complex roots by the Aberth-Ehrlich iteration, in double precision.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let n = match self.degree() {
            Some(n) if n > 0 => n,
            _ => return Vec::new(),
        };
        let lead = self.coeffs[n].to_f64().unwrap();
        let monic: Vec<f64> = self
            .coeffs
            .iter()
            .map(|c| c.to_f64().unwrap() / lead)
            .collect();
        let eval = |z: Complex64| -> (Complex64, Complex64) {
            let mut p = Complex64::new(0.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for c in monic.iter().rev() {
                dp = dp * z + p;
                p = p * z + c;
            }
            (p, dp)
        };
        let radius = monic[..n]
            .iter()
            .fold(0.0f64, |m, c| m.max(c.abs()))
            .max(1e-3)
            + 1.0;
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(0.6 * radius, th)
            })
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let (p, dp) = eval(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        s += 1.0 / (z[i] - z[j]);
                    }
                }
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if w.is_finite() {
                    z[i] -= w;
                    moved = moved.max(w.norm() / z[i].norm().max(1.0));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coeff = !a.is_one() || k == 0;
            if show_coeff {
                write!(f, "{a}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{k}")?,
            }
        }
        Ok(())
    }
}

pub(crate) fn sign_of(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Sturm chain `p, p', -rem(p, p'), ...`, kept primitive.
#[derive(Clone, Debug)]
pub struct Sturm {
    chain: Vec<IntPoly>,
}

impl Sturm {
    pub fn new(p: &IntPoly) -> Self {
        let mut chain = vec![p.primitive_part()];
        let d = p.derivative();
        if !d.is_zero() {
            chain.push(d.primitive_part());
            loop {
                let n = chain.len();
                let r = chain[n - 2].signed_prem(&chain[n - 1]);
                if r.is_zero() {
                    break;
                }
                chain.push(r.neg().primitive_part());
            }
        }
        Sturm { chain }
    }

    pub fn poly(&self) -> &IntPoly {
        &self.chain[0]
    }

    fn count_changes(signs: impl Iterator<Item = i8>) -> usize {
        let mut last = 0i8;
        let mut changes = 0;
        for s in signs {
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }

    pub fn variations_at(&self, x: &BigRational) -> usize {
        Self::count_changes(self.chain.iter().map(|p| p.sign_at(x)))
    }

    pub fn variations_at_pos_inf(&self) -> usize {
        Self::count_changes(
            self.chain
                .iter()
                .map(|p| if p.leading().unwrap().is_positive() { 1 } else { -1 }),
        )
    }

    /// Number of distinct real roots in `(lo, hi]`; `lo` must not be a root.
    pub fn count_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations_at(lo).saturating_sub(self.variations_at(hi))
    }

    /// Number of distinct real roots in `(lo, +inf)`.
    pub fn count_above(&self, lo: &BigRational) -> usize {
        self.variations_at(lo)
            .saturating_sub(self.variations_at_pos_inf())
    }
}

/// Closed rational interval holding exactly one distinct real root.
#[derive(Clone, Debug, PartialEq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootInterval {
    pub fn exact(x: BigRational) -> Self {
        RootInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64().unwrap_or(f64::NAN)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        match BigRational::from_float(x) {
            Some(q) => self.lo <= q && q <= self.hi,
            None => false,
        }
    }

    pub fn disjoint(&self, other: &RootInterval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }

    /// Width is at most `2^-bits`.
    pub fn narrower_than(&self, bits: u32) -> bool {
        let scale = BigRational::from_integer(BigInt::one() << bits);
        self.width() * scale <= BigRational::one()
    }
}

/// Bisection-based isolator for the real roots of one polynomial.
#[derive(Clone, Debug)]
pub struct RealRoots {
    sturm: Sturm,
}

impl RealRoots {
    pub fn new(p: &IntPoly) -> Self {
        RealRoots {
            sturm: Sturm::new(p),
        }
    }

    pub fn sturm(&self) -> &Sturm {
        &self.sturm
    }

    fn poly(&self) -> &IntPoly {
        self.sturm.poly()
    }

    /// Disjoint isolating intervals for all distinct real roots, largest first.
    pub fn isolate(&self, bits: u32) -> Vec<RootInterval> {
        let p = self.poly();
        if p.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let b = p.cauchy_bound();
        let mut out = Vec::new();
        let mut stack = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = stack.pop() {
            let n = self.sturm.count_in(&lo, &hi);
            if n == 0 {
                continue;
            }
            if n == 1 {
                let mut iv = RootInterval { lo, hi };
                if p.sign_at(&iv.hi) == 0 {
                    iv = RootInterval::exact(iv.hi.clone());
                }
                out.push(iv);
                continue;
            }
            let mid = split_point(p, &lo, &hi);
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
        out.sort_by(|a, b| b.lo.cmp(&a.lo));
        for iv in out.iter_mut() {
            self.refine(iv, bits);
        }
        out
    }

    /// Largest real root, if any.
    pub fn largest(&self, bits: u32) -> Option<RootInterval> {
        let p = self.poly();
        if p.degree().unwrap_or(0) == 0 {
            return None;
        }
        let b = p.cauchy_bound();
        let (mut lo, hi) = (-b.clone(), b);
        if self.sturm.count_in(&lo, &hi) == 0 {
            return None;
        }
        let mut hi = hi;
        loop {
            let n = self.sturm.count_in(&lo, &hi);
            if n == 1 {
                break;
            }
            let mid = split_point(p, &lo, &hi);
            if self.sturm.count_in(&mid, &hi) >= 1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut iv = RootInterval { lo, hi };
        if p.sign_at(&iv.hi) == 0 {
            iv = RootInterval::exact(iv.hi.clone());
        }
        self.refine(&mut iv, bits);
        Some(iv)
    }

    /// Bisects until the width is at most `2^-bits`.
    pub fn refine(&self, iv: &mut RootInterval, bits: u32) {
        let p = self.poly();
        let mut s_hi = p.sign_at(&iv.hi);
        if s_hi == 0 {
            *iv = RootInterval::exact(iv.hi.clone());
            return;
        }
        let s_lo = p.sign_at(&iv.lo);
        let by_sign = s_lo != 0 && s_lo != s_hi;
        while !iv.is_exact() && !iv.narrower_than(bits) {
            let mid = round_dyadic(&iv.midpoint(), bits + 2);
            let mid = if mid <= iv.lo || mid >= iv.hi {
                iv.midpoint()
            } else {
                mid
            };
            let s_mid = p.sign_at(&mid);
            if s_mid == 0 {
                *iv = RootInterval::exact(mid);
                return;
            }
            let root_left = if by_sign {
                s_mid == s_hi
            } else {
                self.sturm.count_in(&iv.lo, &mid) == 1
            };
            if root_left {
                iv.hi = mid;
                s_hi = s_mid;
            } else {
                iv.lo = mid;
            }
        }
    }
}

/// A point strictly inside `(lo, hi)` that is not a root of `p`, close to the midpoint.
fn split_point(p: &IntPoly, lo: &BigRational, hi: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    let mid = (lo + hi) / &two;
    if p.sign_at(&mid) != 0 {
        return mid;
    }
    let mut step = (hi - lo) / BigRational::from_integer(BigInt::from(8));
    loop {
        let cand = &mid + &step;
        if p.sign_at(&cand) != 0 {
            return cand;
        }
        step = step / &two;
    }
}

/// Rounds to the nearest multiple of `2^-bits`.
pub fn round_dyadic(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    let scaled = x * BigRational::from_integer(scale.clone());
    BigRational::new(scaled.round().to_integer(), scale)
}

/// Rational approximation of a double that keeps the denominator a power of two.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}
