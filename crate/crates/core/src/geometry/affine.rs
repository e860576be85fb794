use nalgebra::{Matrix3, Vector3};

/// Linear maps on `R^d` for `d <= 3`; unused rows and columns stay zero.
pub type Mat = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;

/// Spectral norm via the largest eigenvalue of `M^T M` (closed form for 3x3 symmetric).
pub fn op_norm(m: &Mat) -> f64 {
    let s = m.transpose() * m;
    let p1 = s[(0, 1)].powi(2) + s[(0, 2)].powi(2) + s[(1, 2)].powi(2);
    let lmax = if p1 == 0.0 {
        s[(0, 0)].max(s[(1, 1)]).max(s[(2, 2)])
    } else {
        let q = s.trace() / 3.0;
        let p2 = (s[(0, 0)] - q).powi(2) + (s[(1, 1)] - q).powi(2) + (s[(2, 2)] - q).powi(2) + 2.0 * p1;
        let p = (p2 / 6.0).sqrt();
        let b = (s - Mat::identity() * q) / p;
        let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        q + 2.0 * p * phi.cos()
    };
    // slack covers the rounding of the closed form
    lmax.max(0.0).sqrt() * (1.0 + 1e-12) + 1e-300
}

/// Inverse of the leading `n x n` block, padded with zeros.
pub fn inverse_padded(m: &Mat, n: usize) -> Option<Mat> {
    let mut full = *m;
    for k in n..3 {
        full[(k, k)] = 1.0;
    }
    let mut inv = full.try_inverse()?;
    for k in n..3 {
        inv[(k, k)] = 0.0;
    }
    Some(inv)
}

/// `x -> m x + t` on `R^dim`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub dim: usize,
    pub m: Mat,
    pub t: Vec3,
}

impl AffineMap {
    pub fn new(dim: usize, m: Mat, t: Vec3) -> Self {
        AffineMap { dim, m, t }
    }

    pub fn linear(dim: usize, m: Mat) -> Self {
        Self::new(dim, m, Vec3::zeros())
    }

    pub fn translation(dim: usize, t: Vec3) -> Self {
        let mut m = Mat::zeros();
        for k in 0..dim {
            m[(k, k)] = 1.0;
        }
        Self::new(dim, m, t)
    }

    pub fn identity(dim: usize) -> Self {
        Self::translation(dim, Vec3::zeros())
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        self.m * x + self.t
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap::new(self.dim, self.m * other.m, self.m * other.t + self.t)
    }

    pub fn inverse(&self) -> Option<AffineMap> {
        let mi = inverse_padded(&self.m, self.dim)?;
        Some(AffineMap::new(self.dim, mi, -(mi * self.t)))
    }

    pub fn norm(&self) -> f64 {
        op_norm(&self.m)
    }

    pub fn is_contraction(&self) -> bool {
        self.norm() < 1.0
    }

    /// Solution of `x = m x + t`.
    pub fn fixed_point(&self) -> Option<Vec3> {
        let mut id = Mat::zeros();
        for k in 0..self.dim {
            id[(k, k)] = 1.0;
        }
        let inv = inverse_padded(&(id - self.m), self.dim)?;
        Some(inv * self.t)
    }
}
