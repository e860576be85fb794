use crate::error::{Error, Result};
use crate::geometry::{AffineMap, Mat, TentTile, Vec3};
use num_complex::Complex64;
use std::io::Write;

/// Approximate membership in a tent-tile.
///
/// The linear parts of `f_L` and `f_R` are block diagonal with conformal blocks, each acting
/// as multiplication by a real or complex scalar. A product of balls (one per block) around
/// `center` is therefore mapped by every word `f_w` onto a product of balls whose radii scale
/// with the moduli of those scalars. Membership up to `eps` means some word of size at most
/// `eps` has a cylinder containing the point.
#[derive(Clone, Debug)]
pub struct Membership {
    blocks: Vec<Vec<usize>>,
    /// per map: block scalars and `g(center) - center`
    maps: Vec<([Complex64; 3], Vec3)>,
    center: Vec3,
    radii: [f64; 3],
    diameter: f64,
}

/// Relative resolution of support points.
const SUPPORT_TOL: f64 = 1e-4;

#[derive(Clone, Copy)]
struct Node {
    z: [Complex64; 3],
    /// `f_w(center)`
    c: Vec3,
}

fn blocks_of(dim: usize, maps: &[AffineMap]) -> Vec<Vec<usize>> {
    let mut owner: Vec<usize> = (0..dim).collect();
    for f in maps {
        for i in 0..dim {
            for j in 0..dim {
                if i != j && f.m[(i, j)] != 0.0 {
                    let (a, b) = (owner[i].min(owner[j]), owner[i].max(owner[j]));
                    for o in owner.iter_mut() {
                        if *o == b {
                            *o = a;
                        }
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..dim {
        match out.iter_mut().find(|b| owner[b[0]] == owner[i]) {
            Some(b) => b.push(i),
            None => out.push(vec![i]),
        }
    }
    out
}

fn block_scalar(m: &Mat, block: &[usize]) -> Result<Complex64> {
    match *block {
        [i] => Ok(Complex64::new(m[(i, i)], 0.0)),
        [i, j] => {
            let z = Complex64::new(m[(i, i)], m[(j, i)]);
            let tol = 1e-12 * z.norm().max(1.0);
            if (m[(j, j)] - z.re).abs() > tol || (m[(i, j)] + z.im).abs() > tol {
                return Err(Error::Unsupported("linear block is not a rotation-scaling".into()));
            }
            Ok(z)
        }
        _ => Err(Error::Unsupported("linear block larger than 2".into())),
    }
}

impl Membership {
    pub fn new(tile: &TentTile) -> Result<Self> {
        let dim = tile.dim();
        let raw = &tile.ifs.maps;
        let blocks = blocks_of(dim, raw);
        let mut scalars = Vec::with_capacity(raw.len());
        for f in raw {
            let mut z = [Complex64::new(0.0, 0.0); 3];
            for (k, b) in blocks.iter().enumerate() {
                z[k] = block_scalar(&f.m, b)?;
            }
            scalars.push(z);
        }
        // 0 is the fixed point of f_L, so it lies on the tile
        let mut me = Membership {
            blocks,
            maps: Vec::new(),
            center: Vec3::zeros(),
            radii: [0.0; 3],
            diameter: 0.0,
        };
        me.recenter(raw, &scalars, Vec3::zeros());
        let tol = me.radii.iter().cloned().fold(0.0, f64::max) * SUPPORT_TOL;
        let mut lo = Vec3::zeros();
        let mut hi = Vec3::zeros();
        for i in 0..dim {
            let mut e = Vec3::zeros();
            e[i] = 1.0;
            hi[i] = me.extreme_point(&e, tol)[i];
            lo[i] = me.extreme_point(&-e, tol)[i];
        }
        me.recenter(raw, &scalars, (lo + hi) / 2.0);
        let extremes: Vec<Vec3> = directions(dim).iter().map(|d| me.extreme_point(d, tol)).collect();
        for (i, p) in extremes.iter().enumerate() {
            for q in &extremes[i + 1..] {
                me.diameter = me.diameter.max((p - q).norm());
            }
        }
        Ok(me)
    }

    fn recenter(&mut self, raw: &[AffineMap], scalars: &[[Complex64; 3]], c: Vec3) {
        self.center = c;
        self.maps = raw.iter().zip(scalars).map(|(f, z)| (*z, f.apply(&c) - c)).collect();
        self.radii = self.invariant_radii();
        self.tighten();
    }

    /// `f_w(0)` for the word of `n`, a point of the tile.
    fn tile_point(&self, n: &Node) -> Vec3 {
        let mut p = n.c;
        for (q, b) in self.blocks.iter().enumerate() {
            match *b.as_slice() {
                [i] => p[i] -= n.z[q].re * self.center[i],
                [i, j] => {
                    let w = n.z[q] * Complex64::new(self.center[i], self.center[j]);
                    p[i] -= w.re;
                    p[j] -= w.im;
                }
                _ => unreachable!(),
            }
        }
        p
    }

    /// Support of the cylinder of `n` in direction `d`.
    fn support_bound(&self, n: &Node, d: &Vec3) -> f64 {
        let mut v = n.c.dot(d);
        for (k, b) in self.blocks.iter().enumerate() {
            v += n.z[k].norm() * self.radii[k] * block_norm(d, b);
        }
        v
    }

    /// A point of the tile maximizing `<x, d>` up to `tol`, by branch and bound over words.
    pub fn extreme_point(&self, d: &Vec3, tol: f64) -> Vec3 {
        let root = self.root();
        let mut best = (f64::NEG_INFINITY, self.tile_point(&root));
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if self.support_bound(&n, d) <= best.0 {
                continue;
            }
            let p = self.tile_point(&n);
            let v = p.dot(d);
            if v > best.0 {
                best = (v, p);
            }
            if self.scale(&n) <= tol {
                continue;
            }
            let mut kids: Vec<(f64, Node)> = (0..self.maps.len())
                .map(|k| {
                    let ch = self.child(&n, k);
                    (self.support_bound(&ch, d), ch)
                })
                .collect();
            kids.sort_by(|a, b| a.0.total_cmp(&b.0));
            stack.extend(kids.into_iter().map(|k| k.1));
        }
        best.1
    }

    /// Per-block radii of a cylinder around `center` mapped into itself by every map.
    fn invariant_radii(&self) -> [f64; 3] {
        let mut r = [0.0f64; 3];
        for (z, d) in &self.maps {
            for (k, b) in self.blocks.iter().enumerate() {
                r[k] = r[k].max(block_norm(d, b) / (1.0 - z[k].norm()) * (1.0 + 1e-12));
            }
        }
        r
    }

    fn root(&self) -> Node {
        Node {
            z: [Complex64::new(1.0, 0.0); 3],
            c: self.center,
        }
    }

    fn child(&self, n: &Node, k: usize) -> Node {
        let (g, d) = &self.maps[k];
        let mut z = n.z;
        let mut c = n.c;
        for (q, b) in self.blocks.iter().enumerate() {
            z[q] = n.z[q] * g[q];
            match *b.as_slice() {
                [i] => c[i] += n.z[q].re * d[i],
                [i, j] => {
                    let w = n.z[q] * Complex64::new(d[i], d[j]);
                    c[i] += w.re;
                    c[j] += w.im;
                }
                _ => unreachable!(),
            }
        }
        Node { z, c }
    }

    fn scale(&self, n: &Node) -> f64 {
        (0..self.blocks.len()).map(|k| n.z[k].norm() * self.radii[k]).fold(0.0, f64::max)
    }

    /// One pass over the words with cylinder size below `max r / 16`.
    fn tighten(&mut self) {
        let coarse = self.radii.iter().cloned().fold(0.0, f64::max) / 16.0;
        let mut far = [0.0f64; 3];
        let mut slack = [0.0f64; 3];
        let mut stack = vec![self.root()];
        while let Some(n) = stack.pop() {
            if self.scale(&n) <= coarse {
                let p = n.c - self.center;
                for (k, b) in self.blocks.iter().enumerate() {
                    far[k] = far[k].max(block_norm(&p, b));
                    slack[k] = slack[k].max(n.z[k].norm() * self.radii[k]);
                }
                continue;
            }
            for k in 0..self.maps.len() {
                stack.push(self.child(&n, k));
            }
        }
        for k in 0..self.blocks.len() {
            self.radii[k] = self.radii[k].min(far[k] + slack[k]);
        }
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Radius of a ball around `center` containing the enclosing cylinder.
    pub fn reach(&self) -> f64 {
        self.radii.iter().map(|r| r * r).sum::<f64>().sqrt()
    }

    /// Volume of the enclosing cylinder.
    pub fn enclosure_volume(&self) -> f64 {
        self.blocks
            .iter()
            .zip(&self.radii)
            .map(|(b, r)| if b.len() == 1 { 2.0 * r } else { std::f64::consts::PI * r * r })
            .product()
    }

    /// Axis-aligned box around `t + place(cylinder)`, for `place` an isometry fixing the blocks.
    pub fn bounding_box(&self, place: &AffineMap, t: &Vec3) -> (Vec3, Vec3) {
        let c = place.apply(&self.center) + t;
        let (mut lo, mut hi) = (c, c);
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                lo[i] -= self.radii[k];
                hi[i] += self.radii[k];
            }
        }
        (lo, hi)
    }

    fn inside(&self, n: &Node, x: &Vec3) -> bool {
        let p = x - n.c;
        self.blocks
            .iter()
            .enumerate()
            .all(|(k, b)| block_norm(&p, b) <= n.z[k].norm() * self.radii[k] * (1.0 + 1e-12) + 1e-13)
    }

    /// Tags of the points that are members up to `eps`.
    pub fn members(&self, pts: Vec<(usize, Vec3)>, eps: f64) -> Vec<usize> {
        let mut out: Vec<usize> = pts.into_iter().filter(|(_, x)| self.contains(x, eps)).map(|p| p.0).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Depth-first search for one word, trying the child with the nearer center first.
    pub fn contains(&self, x: &Vec3, eps: f64) -> bool {
        let root = self.root();
        if !self.inside(&root, x) {
            return false;
        }
        let mut stack = vec![root];
        while let Some(n) = stack.pop() {
            if self.scale(&n) <= eps {
                return true;
            }
            let a = self.child(&n, 0);
            let b = self.child(&n, 1);
            let (ia, ib) = (self.inside(&a, x), self.inside(&b, x));
            let a_first = (x - a.c).norm_squared() <= (x - b.c).norm_squared();
            let (first, second) = if a_first { ((a, ia), (b, ib)) } else { ((b, ib), (a, ia)) };
            if second.1 {
                stack.push(second.0);
            }
            if first.1 {
                stack.push(first.0);
            }
        }
        false
    }

    /// Voxel occupancy of the tile by cell-center membership, in the text layout of
    /// `PointCloud::write_voxels`. Returns the number of occupied voxels.
    pub fn write_voxels<W: Write>(&self, w: &mut W, resolution: usize) -> Result<usize> {
        let dim: usize = self.blocks.iter().map(|b| b.len()).sum();
        let (mut lo, mut hi) = (Vec3::zeros(), Vec3::zeros());
        for k in 0..dim {
            let mut e = Vec3::zeros();
            e[k] = 1.0;
            hi[k] = self.extreme_point(&e, 1e-4)[k];
            lo[k] = self.extreme_point(&-e, 1e-4)[k];
        }
        let h = (hi - lo).max().max(1e-300) / resolution as f64;
        let n = |k: usize| if k < dim { resolution } else { 1 };
        let mut occ = Vec::new();
        for i in 0..n(0) {
            for j in 0..n(1) {
                for l in 0..n(2) {
                    let mut x = lo;
                    for (k, c) in [i, j, l].into_iter().enumerate().take(dim) {
                        x[k] += (c as f64 + 0.5) * h;
                    }
                    if self.contains(&x, h / 2.0) {
                        occ.push([i, j, l]);
                    }
                }
            }
        }
        writeln!(
            w,
            "voxels {resolution} origin {:.12} {:.12} {:.12} cell {:.12} count {}",
            lo[0],
            lo[1],
            lo[2],
            h,
            occ.len()
        )?;
        for c in &occ {
            writeln!(w, "{} {} {}", c[0], c[1], c[2])?;
        }
        Ok(occ.len())
    }
}

/// Unit directions spread over the circle or sphere.
fn directions(dim: usize) -> Vec<Vec3> {
    match dim {
        1 => vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)],
        2 => (0..64)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 64.0;
                Vec3::new(t.cos(), t.sin(), 0.0)
            })
            .collect(),
        _ => {
            let n = 64;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = golden * k as f64;
                    Vec3::new(r * t.cos(), r * t.sin(), z)
                })
                .collect()
        }
    }
}

fn block_norm(v: &Vec3, b: &[usize]) -> f64 {
    b.iter().map(|&i| v[i] * v[i]).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::registry_lookup;

    #[test]
    fn block_structure() {
        for (i, want) in [(1, vec![vec![0, 1]]), (4, vec![vec![0], vec![1, 2]]), (-2, vec![vec![0]])] {
            let tile = TentTile::new(registry_lookup(i).unwrap()).unwrap();
            let m = Membership::new(&tile).unwrap();
            assert_eq!(m.blocks, want);
        }
    }

    #[test]
    fn cloud_points_are_members() {
        let tile = TentTile::new(registry_lookup(1).unwrap()).unwrap();
        let m = Membership::new(&tile).unwrap();
        let cloud = tile.render(0.05, 1 << 20).unwrap();
        for p in cloud.points.iter().step_by(97) {
            assert!(m.contains(p, 1e-4));
        }
        let far = m.center() + Vec3::new(3.0 * m.reach(), 0.0, 0.0);
        assert!(!m.contains(&far, 1e-4));
    }

    #[test]
    fn voxel_volume_approaches_the_covolume() {
        for (i, res, rel) in [(1, 32, 0.03), (4, 16, 0.3)] {
            let tile = TentTile::new(registry_lookup(i).unwrap()).unwrap();
            let m = Membership::new(&tile).unwrap();
            let spec = crate::tiling::tiling_spec(i).unwrap();
            let share = spec.lattice_matrix(&tile).unwrap().determinant().abs() / spec.protos.len() as f64;
            let mut buf = Vec::new();
            let count = m.write_voxels(&mut buf, res).unwrap();
            let text = String::from_utf8(buf).unwrap();
            assert_eq!(text.lines().count(), count + 1);
            let h: f64 = text.split_whitespace().nth(7).unwrap().parse().unwrap();
            let vol = count as f64 * h.powi(tile.dim() as i32);
            assert!(vol >= share * (1.0 - 1e-3) && vol <= share * (1.0 + rel), "alpha_{i}: {vol} vs {share}");
        }
    }

    #[test]
    fn interval_membership() {
        let tile = TentTile::new(registry_lookup(-2).unwrap()).unwrap();
        let m = Membership::new(&tile).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(m.contains(&Vec3::new(-0.5, 0.0, 0.0), 1e-9));
        assert!(!m.contains(&Vec3::new(0.01, 0.0, 0.0), 1e-9));
        assert!(!m.contains(&Vec3::new(-phi - 0.01, 0.0, 0.0), 1e-9));
    }
}
