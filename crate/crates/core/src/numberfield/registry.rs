use crate::error::{Error, Result};
use crate::poly::IntPoly;
use serde::Serialize;
use std::fmt;

/// Monic integer polynomial, ascending coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalPolynomial {
    pub coeffs: Vec<i64>,
}

impl MinimalPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_poly(&self) -> IntPoly {
        IntPoly::from_i64(&self.coeffs)
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs[0].abs() == 1
    }
}

impl fmt::Display for MinimalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly())
    }
}

/// One of the eleven special Pisot numbers.
#[derive(Clone, Debug, Serialize)]
pub struct SpecialPisotRecord {
    pub index: i32,
    pub minpoly: MinimalPolynomial,
    pub approx_value: f64,
    pub partner: i32,
    /// `alpha_i^{m_i} = alpha_{-i}^{m_{-i}}`
    pub exponent: u32,
    pub has_tent_tile: bool,
}

impl SpecialPisotRecord {
    /// Algebraic degree `d + 1`.
    pub fn degree(&self) -> usize {
        self.minpoly.degree()
    }

    /// Dimension `d` of the tent-tile.
    pub fn dim(&self) -> usize {
        self.degree() - 1
    }

    pub fn is_unit(&self) -> bool {
        self.minpoly.is_unit()
    }

    pub(crate) fn require_tent_tile(&self) -> Result<()> {
        if self.has_tent_tile {
            Ok(())
        } else {
            Err(Error::NoTentTile)
        }
    }
}

macro_rules! rec {
    ($i:expr, [$($c:expr),*], $v:expr, $m:expr) => {
        SpecialPisotRecord {
            index: $i,
            minpoly: MinimalPolynomial { coeffs: vec![$($c),*] },
            approx_value: $v,
            partner: -$i,
            exponent: $m,
            has_tent_tile: $i != 0,
        }
    };
}

static REGISTRY: std::sync::LazyLock<Vec<SpecialPisotRecord>> = std::sync::LazyLock::new(|| {
    vec![
        rec!(-5, [-1, 4, -5, 1], 4.0796, 1),
        rec!(-4, [1, -4, 6, -5, 1], 3.62966, 1),
        rec!(-3, [-1, 3, -4, 1], 3.1479, 1),
        rec!(-2, [1, -3, 1], 2.61803, 1),
        rec!(-1, [-1, 2, -3, 1], 2.32472, 2),
        rec!(0, [-2, 1], 2.0, 1),
        rec!(1, [-1, 1, -2, 1], 1.75488, 3),
        rec!(2, [-1, -1, 1], 1.61803, 2),
        rec!(3, [-1, 0, -1, 1], 1.46557, 3),
        rec!(4, [-1, 0, 0, -1, 1], 1.38028, 4),
        rec!(5, [-1, -1, 0, 1], 1.32472, 5),
    ]
});

/// All eleven records, ordered by index from -5 to 5.
pub fn registry() -> &'static [SpecialPisotRecord] {
    &REGISTRY
}

pub fn registry_lookup(i: i32) -> Result<&'static SpecialPisotRecord> {
    if !(-5..=5).contains(&i) {
        return Err(Error::IndexOutOfRange(i));
    }
    Ok(&REGISTRY[(i + 5) as usize])
}

/// The ten unit records (every index except 0).
pub fn unit_indices() -> impl Iterator<Item = i32> {
    (-5..=5).filter(|&i| i != 0)
}
