use super::affine::{op_norm, AffineMap, Mat, Vec3};
use super::cloud::PointCloud;
use super::{build_matrices, tent_maps, ContractionPair, EmbeddingMap};
use crate::error::{Error, Result};
use crate::numberfield::SpecialPisotRecord;

pub const DEFAULT_POINT_BUDGET: usize = 1 << 24;

/// An iterated function system of affine contractions.
#[derive(Clone, Debug)]
pub struct Ifs {
    pub dim: usize,
    pub maps: Vec<AffineMap>,
    norms: Vec<f64>,
}

impl Ifs {
    pub fn new(dim: usize, maps: Vec<AffineMap>) -> Result<Self> {
        let norms: Vec<f64> = maps.iter().map(AffineMap::norm).collect();
        if norms.iter().any(|&n| n >= 1.0) {
            return Err(Error::Unsupported("IFS map is not a norm contraction".into()));
        }
        Ok(Ifs { dim, maps, norms })
    }

    /// Radius of a ball around `c` that every map sends into itself.
    pub fn invariant_radius(&self, c: &Vec3) -> f64 {
        self.maps
            .iter()
            .zip(&self.norms)
            .map(|(f, n)| (f.apply(c) - c).norm() / (1.0 - n))
            .fold(0.0, f64::max)
    }

    /// Bound on `max |y - y0|` over the attractor, tightened by one coarse pass.
    pub fn radius_about(&self, y0: &Vec3) -> f64 {
        let r0 = self.invariant_radius(y0) * (1.0 + 1e-12);
        if r0 == 0.0 {
            return 0.0;
        }
        let coarse = r0 / 16.0;
        let mut far: f64 = 0.0;
        self.walk(y0, r0, coarse, usize::MAX, |p| far = far.max((p - y0).norm()))
            .expect("unbounded walk");
        (far + coarse).min(r0)
    }

    /// Depth-first enumeration of the prefix code `{w : |M_w| rho <= target}`;
    /// calls `emit(f_w(y0))` for each leaf and returns the leaf count.
    fn walk(&self, y0: &Vec3, rho: f64, target: f64, budget: usize, mut emit: impl FnMut(Vec3)) -> Result<usize> {
        let mut count = 0usize;
        let mut stack = vec![(AffineMap::identity(self.dim), 1.0f64)];
        while let Some((f, n)) = stack.pop() {
            if n * rho <= target {
                count += 1;
                if count > budget {
                    return Err(Error::PointBudget {
                        needed: count as f64,
                        budget,
                    });
                }
                emit(f.apply(y0));
                continue;
            }
            for g in &self.maps {
                let h = f.compose(g);
                let hn = op_norm(&h.m);
                stack.push((h, hn));
            }
        }
        Ok(count)
    }

    /// Attractor cloud with covering radius at most `target`, sampled at images of `y0`
    /// (which must lie on the attractor for the cloud to be a subset of it).
    pub fn render_adaptive(&self, y0: &Vec3, target: f64, budget: usize) -> Result<PointCloud> {
        let rho = self.radius_about(y0);
        if rho == 0.0 {
            return Ok(PointCloud::new(self.dim, vec![*y0], 0, 0.0));
        }
        let scale = 4.0;
        let rough = self.walk(y0, rho, target * scale, usize::MAX, |_| {})?;
        let needed = rough as f64 * scale.powi(self.dim as i32);
        if needed > budget as f64 * 4.0 {
            return Err(Error::PointBudget { needed, budget });
        }
        let mut pts = Vec::with_capacity((needed as usize).min(budget));
        self.walk(y0, rho, target, budget, |p| pts.push(p))?;
        let depth = (target / rho).ln() / self.norms.iter().cloned().fold(0.0, f64::max).ln();
        Ok(PointCloud::new(self.dim, pts, depth.ceil().max(0.0) as usize, target))
    }

    /// All words of length `depth` applied to `y0`.
    pub fn render_uniform(&self, y0: &Vec3, depth: usize, budget: usize) -> Result<PointCloud> {
        let k = self.maps.len() as f64;
        let needed = k.powi(depth as i32);
        if needed > budget as f64 {
            return Err(Error::PointBudget { needed, budget });
        }
        let rho = self.radius_about(y0);
        let mut level = vec![(AffineMap::identity(self.dim), 1.0f64)];
        for _ in 0..depth {
            let mut next = Vec::with_capacity(level.len() * self.maps.len());
            for (f, _) in &level {
                for g in &self.maps {
                    let h = f.compose(g);
                    let hn = op_norm(&h.m);
                    next.push((h, hn));
                }
            }
            level = next;
        }
        let worst = level.iter().map(|(_, n)| *n).fold(0.0, f64::max);
        let pts = level.iter().map(|(f, _)| f.apply(y0)).collect();
        Ok(PointCloud::new(self.dim, pts, depth, worst * rho))
    }
}

/// A tent-tile with its embedding and maps, ready to render.
#[derive(Clone, Debug)]
pub struct TentTile {
    pub record: &'static SpecialPisotRecord,
    pub emb: EmbeddingMap,
    pub pair: ContractionPair,
    pub ifs: Ifs,
    /// bound on `|y|` over the tile (`0` is the fixed point of `f_L`)
    pub radius: f64,
}

impl TentTile {
    pub fn new(record: &'static SpecialPisotRecord) -> Result<Self> {
        let (emb, pair) = build_matrices(record, 64)?;
        let (fl, fr) = tent_maps(&pair);
        let ifs = Ifs::new(pair.dim, vec![fl, fr])?;
        let radius = ifs.radius_about(&Vec3::zeros());
        Ok(TentTile {
            record,
            emb,
            pair,
            ifs,
            radius,
        })
    }

    pub fn dim(&self) -> usize {
        self.pair.dim
    }

    /// Adaptive render with covering radius `cell`.
    pub fn render(&self, cell: f64, budget: usize) -> Result<PointCloud> {
        self.ifs.render_adaptive(&Vec3::zeros(), cell, budget)
    }

    /// Largest contraction ratio of the two branches.
    pub fn lambda_max(&self) -> f64 {
        op_norm(&self.pair.a).max(op_norm(&self.pair.b))
    }

    /// Smallest `k` with `lambda_max^k * diam <= pixel / 2`, `diam = 2 |Psi(1)| / (1 - lambda_max)`.
    pub fn default_depth(&self, pixel: f64) -> usize {
        let l = self.lambda_max();
        let diam = 2.0 * self.pair.psi_one.norm() / (1.0 - l);
        ((pixel / 2.0 / diam).ln() / l.ln()).ceil().max(1.0) as usize
    }

    pub fn linear_pad(&self) -> Mat {
        let mut m = Mat::zeros();
        for k in 0..self.dim() {
            m[(k, k)] = 1.0;
        }
        m
    }
}

/// Every word of length `depth` in `{L, R}` applied to the fixed point of `f_L`.
pub fn render_tent_tile(record: &'static SpecialPisotRecord, depth: usize) -> Result<PointCloud> {
    record.require_tent_tile()?;
    if depth == 0 {
        return Err(Error::Unsupported("depth must be at least 1".into()));
    }
    let tile = TentTile::new(record)?;
    tile.ifs.render_uniform(&Vec3::zeros(), depth, DEFAULT_POINT_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hausdorff_distance;
    use crate::numberfield::registry_lookup;

    #[test]
    fn golden_intervals() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        for depth in [1, 5, 12] {
            let c = render_tent_tile(registry_lookup(-2).unwrap(), depth).unwrap();
            assert!(c.points.iter().all(|p| p[0] >= -phi - 1e-12 && p[0] <= 1e-12));
            let c = render_tent_tile(registry_lookup(2).unwrap(), depth).unwrap();
            assert!(c.points.iter().all(|p| p[0] >= (1.0 - phi) / 2.0 - 1e-12 && p[0] <= 0.5 + 1e-12));
        }
        assert!(render_tent_tile(registry_lookup(0).unwrap(), 3).is_err());
        assert!(matches!(
            render_tent_tile(registry_lookup(1).unwrap(), 40),
            Err(Error::PointBudget { .. })
        ));
    }

    #[test]
    fn uniform_clouds_are_cauchy() {
        let rec = registry_lookup(1).unwrap();
        let tile = TentTile::new(rec).unwrap();
        let lmax = tile.lambda_max();
        let diam = 2.0 * tile.radius;
        for k in [8, 12] {
            let a = render_tent_tile(rec, k).unwrap();
            let b = render_tent_tile(rec, k + 1).unwrap();
            let d = hausdorff_distance(&a, &b).unwrap();
            assert!(d <= diam * lmax.powi(k as i32), "{d}");
            assert!(a.cell_size <= diam * lmax.powi(k as i32));
        }
    }

    #[test]
    fn set_equation_self_consistency() {
        let rec = registry_lookup(1).unwrap();
        let tile = TentTile::new(rec).unwrap();
        let f = tile.render(0.01, DEFAULT_POINT_BUDGET).unwrap();
        let (fl, fr) = (tile.ifs.maps[0], tile.ifs.maps[1]);
        let image = PointCloud::union([&f.transform(&fl), &f.transform(&fr)]);
        let d = hausdorff_distance(&f, &image).unwrap();
        assert!(d <= 2.0 * f.cell_size, "{d} vs {}", f.cell_size);
    }

    #[test]
    fn adaptive_cell_is_honoured() {
        let rec = registry_lookup(-3).unwrap();
        let tile = TentTile::new(rec).unwrap();
        let coarse = tile.render(0.02, DEFAULT_POINT_BUDGET).unwrap();
        let fine = tile.render(0.002, DEFAULT_POINT_BUDGET).unwrap();
        let d = hausdorff_distance(&coarse, &fine).unwrap();
        assert!(d <= 0.022, "{d}");
        assert!(fine.len() > coarse.len());
    }

    #[test]
    fn default_depth_rule() {
        let tile = TentTile::new(registry_lookup(1).unwrap()).unwrap();
        let k = tile.default_depth(0.01);
        let l = tile.lambda_max();
        let diam = 2.0 * tile.pair.psi_one.norm() / (1.0 - l);
        assert!(l.powi(k as i32) * diam <= 0.005);
        assert!(l.powi(k as i32 - 1) * diam > 0.005);
    }
}
