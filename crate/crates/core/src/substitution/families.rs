use super::{Substitution, Word};
use crate::error::{Error, Result};
use crate::geometry::{AffineMap, ContractionPair, EmbeddingMap};
use crate::numberfield::{beta_of, FieldElement, SpecialPisotRecord};

fn build(images: Vec<Word>) -> Substitution {
    Substitution::new(images).expect("family images are valid")
}

/// `0 -> 10, 1 -> 2, ..., (p-2) -> (p-1), (p-1) -> (p-1)0`
pub fn zeta_p(p: usize) -> Result<Substitution> {
    if p < 3 {
        return Err(Error::FamilyParameter { family: "zeta_p", value: p });
    }
    let mut images = vec![vec![1, 0]];
    images.extend((1..p - 1).map(|k| vec![k + 1]));
    images.push(vec![p - 1, 0]);
    Ok(build(images))
}

/// Two interleaved chains on `{0, ..., 2q-1}`.
pub fn theta_q(q: usize) -> Result<Substitution> {
    if q < 2 {
        return Err(Error::FamilyParameter { family: "theta_q", value: q });
    }
    let mut images: Vec<Word> = (0..q - 1).map(|k| vec![k + 1]).collect();
    images.push(vec![q, q - 1]);
    images.extend((q..2 * q - 1).map(|k| vec![k + 1]));
    images.push(vec![2 * q - 1, 0]);
    Ok(build(images))
}

pub fn theta_prime_q(q: usize) -> Result<Substitution> {
    if q < 3 {
        return Err(Error::FamilyParameter { family: "theta_prime_q", value: q });
    }
    let images: Vec<Word> = if q % 2 == 1 {
        let mut v: Vec<Word> = (0..q - 1).map(|k| vec![q + 1 + k]).collect();
        v.push(vec![0, 2 * q - 1]);
        v.extend((q..2 * q - 1).map(|k| vec![k - q + 1]));
        v.push(vec![q - 1, q]);
        v
    } else {
        let mut v: Vec<Word> = (0..q - 2).map(|k| vec![k + 2]).collect();
        v.push(vec![0, q - 1]);
        v.push(vec![0, q - 1, 1]);
        v
    };
    Ok(build(images))
}

pub fn zeta_prime_p(p: usize) -> Result<Substitution> {
    if p < 2 {
        return Err(Error::FamilyParameter { family: "zeta_prime_p", value: p });
    }
    let images: Vec<Word> = if p % 2 == 1 {
        let mut v: Vec<Word> = vec![vec![p + 1, p]];
        v.extend((1..p - 1).map(|k| vec![p + 1 + k]));
        v.push(vec![0, 2 * p - 1]);
        v.push(vec![0, 1]);
        v.extend((p + 1..2 * p - 1).map(|k| vec![k - p + 1]));
        v.push(vec![p - 1, p]);
        v
    } else {
        let mut v: Vec<Word> = vec![vec![2, 0, 1]];
        v.extend((1..p - 2).map(|k| vec![k + 2]));
        v.push(vec![0, p - 1]);
        v.push(vec![0, p - 1, 0, 1]);
        v
    };
    Ok(build(images))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Zeta(usize),
    Theta(usize),
    ThetaPrime(usize),
    ZetaPrime(usize),
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::Zeta(p) => format!("zeta_{p}"),
            Family::Theta(q) => format!("theta_{q}"),
            Family::ThetaPrime(q) => format!("theta'_{q}"),
            Family::ZetaPrime(p) => format!("zeta'_{p}"),
        }
    }
}

/// The matrix through which `h` acts in tent coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contraction {
    A,
    B,
    BSquared,
}

impl Contraction {
    pub fn matrix(&self, pair: &ContractionPair) -> crate::geometry::Mat {
        match self {
            Contraction::A => pair.a,
            Contraction::B => pair.b,
            Contraction::BSquared => pair.b * pair.b,
        }
    }
}

/// `X_k = Psi(shift) + s B^b A^a F` with `s = -1` when `reflect`.
#[derive(Clone, Debug)]
pub struct SubtileFormula {
    pub reflect: bool,
    pub a_pow: u32,
    pub b_pow: u32,
    pub shift: FieldElement,
}

impl SubtileFormula {
    pub fn affine(&self, pair: &ContractionPair, emb: &EmbeddingMap) -> Result<AffineMap> {
        let mut m = pair.a.pow(self.a_pow) * pair.b.pow(self.b_pow);
        if self.a_pow == 0 && self.b_pow == 0 {
            m = crate::geometry::Mat::zeros();
            for k in 0..pair.dim {
                m[(k, k)] = 1.0;
            }
        }
        if self.reflect {
            m = -m;
        }
        Ok(AffineMap::new(pair.dim, m, emb.psi(&self.shift)?))
    }
}

/// Which substitution describes a tent-tile, and how its subtiles relate to the tile.
#[derive(Clone, Debug)]
pub struct Correspondence {
    pub record_index: i32,
    pub family: Family,
    pub lambda0: FieldElement,
    pub contraction: Contraction,
    pub formulas: Vec<SubtileFormula>,
    /// letters whose subtiles are translates-free pieces of the tile itself
    pub tent_letters: Option<Vec<usize>>,
    /// letter whose shortest prefix-graph cycle fixes the rendering base point
    pub base_letter: usize,
}

pub fn substitution_for(record: &SpecialPisotRecord) -> Result<(Substitution, Correspondence)> {
    record.require_tent_tile()?;
    let i = record.index;
    let family = match i {
        1 => Family::Zeta(3),
        2 => Family::Zeta(4),
        3 => Family::Theta(3),
        4 => Family::Theta(4),
        5 => Family::Theta(5),
        -1 => Family::ZetaPrime(3),
        -3 => Family::ThetaPrime(3),
        -4 => Family::ThetaPrime(4),
        -5 => Family::ThetaPrime(5),
        _ => {
            return Err(Error::Unsupported(format!(
                "alpha_{i} is handled by exact interval arithmetic"
            )))
        }
    };
    let alpha = FieldElement::alpha(i)?;
    let beta = beta_of(record)?;
    let zero = FieldElement::zero(i)?;
    let ap = |k: u32| alpha.pow(k as i64).unwrap();
    let bp = |k: u32| beta.pow(k as i64).unwrap();
    let f = |reflect: bool, a_pow: u32, b_pow: u32, shift: FieldElement| SubtileFormula {
        reflect,
        a_pow,
        b_pow,
        shift,
    };
    // f_L^k f_R F = Psi(alpha^k beta) - A^k B F
    let lr = |k: u32| f(true, k, 1, &ap(k) * &beta);
    let (sub, lambda0, contraction, formulas, tent_letters, base_letter) = match family {
        Family::Zeta(p) => {
            let p32 = p as u32;
            let mut fs: Vec<SubtileFormula> = (0..p32 - 1).map(lr).collect();
            fs.push(f(false, p32 - 1, 0, zero.clone()));
            (zeta_p(p)?, alpha.clone(), Contraction::A, fs, Some((0..p).collect()), p - 1)
        }
        Family::Theta(q) => {
            let q32 = q as u32;
            let mut fs: Vec<SubtileFormula> = (0..q32 - 1)
                .map(|k| f(false, k, 1, &ap(k) - &(&ap(k) * &beta)))
                .collect();
            fs.push(f(true, q32 - 1, 0, ap(q32 - 1)));
            fs.extend((0..q32 - 1).map(lr));
            fs.push(f(false, q32 - 1, 0, zero.clone()));
            (theta_q(q)?, alpha.clone(), Contraction::A, fs, Some((q..2 * q).collect()), 2 * q - 1)
        }
        Family::ThetaPrime(q) if q % 2 == 1 => {
            let q32 = q as u32;
            let mut fs = Vec::new();
            for k in 0..q32 - 1 {
                fs.push(if k % 2 == 0 { f(false, 1, k, zero.clone()) } else { f(true, 1, k, bp(k)) });
            }
            fs.push(f(false, 0, q32 - 1, zero.clone()));
            for j in 0..q32 - 1 {
                fs.push(if j % 2 == 0 { f(true, 1, j, bp(j)) } else { f(false, 1, j, zero.clone()) });
            }
            fs.push(f(true, 0, q32 - 1, bp(q32 - 1)));
            (theta_prime_q(q)?, beta.clone(), Contraction::B, fs, None, q - 1)
        }
        Family::ThetaPrime(q) => (
            theta_prime_q(q)?,
            &beta * &beta,
            Contraction::BSquared,
            even_primed(q as u32, &bp, &zero),
            None,
            q - 1,
        ),
        Family::ZetaPrime(p) => {
            if p % 2 == 0 {
                (
                    zeta_prime_p(p)?,
                    &beta * &beta,
                    Contraction::BSquared,
                    even_primed(p as u32, &bp, &zero),
                    None,
                    p - 1,
                )
            } else {
                if p != 3 {
                    return Err(Error::FamilyParameter { family: "zeta_prime_p", value: p });
                }
                let fs = vec![
                    f(false, 1, 0, zero.clone()),
                    f(true, 1, 1, beta.clone()),
                    f(false, 0, 2, zero.clone()),
                    f(true, 1, 0, alpha.clone()),
                    f(false, 1, 1, zero.clone()),
                    f(true, 0, 2, bp(2)),
                ];
                (zeta_prime_p(3)?, beta.clone(), Contraction::B, fs, None, p - 1)
            }
        }
    };
    Ok((
        sub,
        Correspondence {
            record_index: i,
            family,
            lambda0,
            contraction,
            formulas,
            tent_letters,
            base_letter,
        },
    ))
}

fn even_primed(q: u32, bp: &dyn Fn(u32) -> FieldElement, zero: &FieldElement) -> Vec<SubtileFormula> {
    let mut fs = Vec::new();
    for k in 0..q - 1 {
        fs.push(SubtileFormula {
            reflect: k % 2 == 1,
            a_pow: 1,
            b_pow: k,
            shift: if k % 2 == 1 { bp(k) } else { zero.clone() },
        });
    }
    fs.push(SubtileFormula {
        reflect: true,
        a_pow: 0,
        b_pow: q - 1,
        shift: bp(q - 1),
    });
    fs
}
