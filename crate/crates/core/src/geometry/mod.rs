//! Conjugate-space embedding, the matrices `A` and `B`, the tent IFS and its attractor.

mod affine;
mod cloud;
mod interval;
mod render;

pub use affine::{inverse_padded, op_norm, AffineMap, Mat, Vec3};
pub use cloud::{hausdorff_distance, PointCloud};
pub use interval::{tent_interval_exact, ExactInterval};
pub use render::{render_tent_tile, Ifs, TentTile, DEFAULT_POINT_BUDGET};
pub use cloud::{hausdorff_within, write_layered_pgm};
pub(crate) use cloud::key as cell_key;

use crate::error::{Error, Result};
use crate::numberfield::{beta_of, field, registry_lookup, FieldElement, SpecialPisotRecord};
use num_traits::ToPrimitive;

/// Which conjugate feeds a coordinate block of `Psi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Block {
    Real(usize),
    Complex(usize),
}

/// The embedding `Psi: Q(alpha) -> R^d`, stored through the images of the power basis.
#[derive(Clone, Debug)]
pub struct EmbeddingMap {
    pub field_id: i32,
    pub dim: usize,
    pub precision: u32,
    blocks: Vec<Block>,
    /// `Psi(alpha^j)` for `j < d + 1`
    pub basis: Vec<Vec3>,
}

/// `A`, `B = A (A - I)^{-1}` and `Psi(1)`.
#[derive(Clone, Debug)]
pub struct ContractionPair {
    pub dim: usize,
    pub a: Mat,
    pub b: Mat,
    pub psi_one: Vec3,
}

fn blocks_for(field_id: i32) -> Vec<Block> {
    let f = field(field_id).expect("registry index");
    let roots = f.conjugate_roots();
    let mut reals = Vec::new();
    let mut complex = Vec::new();
    for (k, z) in roots.iter().enumerate() {
        if f.conjugate_real_index(k).is_some() {
            reals.push(Block::Real(k));
        } else if z.im > 0.0 {
            complex.push(Block::Complex(k));
        }
    }
    reals.extend(complex);
    reals
}

impl EmbeddingMap {
    pub fn new(field_id: i32, precision: u32) -> Result<Self> {
        let rec = registry_lookup(field_id)?;
        rec.require_tent_tile()?;
        let blocks = blocks_for(field_id);
        let dim = rec.dim();
        let alpha = FieldElement::alpha(field_id)?;
        let mut basis = Vec::with_capacity(dim + 1);
        let mut x = FieldElement::one(field_id)?;
        for _ in 0..=dim {
            basis.push(embed(&blocks, &x, precision));
            x = &x * &alpha;
        }
        Ok(EmbeddingMap {
            field_id,
            dim,
            precision,
            blocks,
            basis,
        })
    }

    /// `Psi(x)`, the rational-linear extension of the basis images.
    pub fn psi(&self, x: &FieldElement) -> Result<Vec3> {
        if x.field_id() != self.field_id {
            return Err(Error::FieldMismatch(x.field_id(), self.field_id));
        }
        let mut v = Vec3::zeros();
        for (c, b) in x.coeffs().iter().zip(&self.basis) {
            let c = c.to_f64().unwrap_or(f64::NAN);
            if c != 0.0 {
                v += b * c;
            }
        }
        Ok(v)
    }

    /// `Psi(x)` from the certified conjugates, accurate to `2^-precision` per coordinate.
    pub fn psi_exact(&self, x: &FieldElement) -> Result<Vec3> {
        if x.field_id() != self.field_id {
            return Err(Error::FieldMismatch(x.field_id(), self.field_id));
        }
        Ok(embed(&self.blocks, x, self.precision))
    }

    /// Matrix of `Psi`-multiplication by `x`.
    pub fn mult_matrix(&self, x: &FieldElement) -> Result<Mat> {
        if x.field_id() != self.field_id {
            return Err(Error::FieldMismatch(x.field_id(), self.field_id));
        }
        let conj = x.conjugates(self.precision);
        let mut m = Mat::zeros();
        let mut row = 0;
        for b in &self.blocks {
            match *b {
                Block::Real(k) => {
                    m[(row, row)] = conj[k].value.re;
                    row += 1;
                }
                Block::Complex(k) => {
                    let z = conj[k].value;
                    m[(row, row)] = z.re;
                    m[(row, row + 1)] = -z.im;
                    m[(row + 1, row)] = z.im;
                    m[(row + 1, row + 1)] = z.re;
                    row += 2;
                }
            }
        }
        Ok(m)
    }

    /// Moduli of the coordinate blocks of a multiplication matrix, one per conjugate.
    pub fn conjugate_moduli(&self, x: &FieldElement) -> Vec<f64> {
        let conj = x.conjugates(self.precision);
        let mut out: Vec<f64> = conj.iter().map(|c| c.value.norm()).collect();
        out.sort_by(|a, b| b.partial_cmp(a).unwrap());
        out
    }
}

fn embed(blocks: &[Block], x: &FieldElement, precision: u32) -> Vec3 {
    let conj = x.conjugates(precision);
    let mut v = Vec3::zeros();
    let mut row = 0;
    for b in blocks {
        match *b {
            Block::Real(k) => {
                v[row] = conj[k].value.re;
                row += 1;
            }
            Block::Complex(k) => {
                v[row] = conj[k].value.re;
                v[row + 1] = conj[k].value.im;
                row += 2;
            }
        }
    }
    v
}

pub fn build_matrices(record: &SpecialPisotRecord, precision: u32) -> Result<(EmbeddingMap, ContractionPair)> {
    record.require_tent_tile()?;
    let emb = EmbeddingMap::new(record.index, precision)?;
    let alpha = FieldElement::alpha(record.index)?;
    let beta = beta_of(record)?;
    let pair = ContractionPair {
        dim: emb.dim,
        a: emb.mult_matrix(&alpha)?,
        b: emb.mult_matrix(&beta)?,
        psi_one: emb.basis[0],
    };
    Ok((emb, pair))
}

pub fn psi(x: &FieldElement, emb: &EmbeddingMap) -> Result<Vec3> {
    emb.psi(x)
}

/// `f_L(x) = A x` and `f_R(x) = B (Psi(1) - x)`.
pub fn tent_ifs(record: &SpecialPisotRecord) -> Result<(AffineMap, AffineMap)> {
    let (_, pair) = build_matrices(record, 64)?;
    Ok(tent_maps(&pair))
}

pub fn tent_maps(pair: &ContractionPair) -> (AffineMap, AffineMap) {
    let fl = AffineMap::linear(pair.dim, pair.a);
    let fr = AffineMap::new(pair.dim, -pair.b, pair.b * pair.psi_one);
    (fl, fr)
}
