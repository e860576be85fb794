use super::affine::{AffineMap, Vec3};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::io::Write;

/// Finite approximation of an attractor.
///
/// Every point of the attractor lies within `cell_size` of some cloud point.
#[derive(Clone, Debug, Default)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Vec3>,
    pub depth: usize,
    pub cell_size: f64,
}

impl PointCloud {
    pub fn new(dim: usize, points: Vec<Vec3>, depth: usize, cell_size: f64) -> Self {
        PointCloud {
            dim,
            points,
            depth,
            cell_size,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Image under an affine map; the covering radius scales with the map's norm.
    pub fn transform(&self, f: &AffineMap) -> PointCloud {
        PointCloud {
            dim: self.dim,
            points: self.points.iter().map(|p| f.apply(p)).collect(),
            depth: self.depth,
            cell_size: self.cell_size * f.norm(),
        }
    }

    /// Union of clouds; the covering radius is the worst of the parts.
    pub fn union<'a>(parts: impl IntoIterator<Item = &'a PointCloud>) -> PointCloud {
        let mut out = PointCloud::default();
        for p in parts {
            out.dim = p.dim;
            out.depth = out.depth.max(p.depth);
            out.cell_size = out.cell_size.max(p.cell_size);
            out.points.extend_from_slice(&p.points);
        }
        out
    }

    /// Keeps the first point in each grid cell of side `h`; the covering radius grows by `h sqrt(dim)`.
    pub fn thinned(&self, h: f64) -> PointCloud {
        if h <= 0.0 {
            return self.clone();
        }
        let mut seen = std::collections::HashSet::new();
        let points: Vec<Vec3> = self
            .points
            .iter()
            .filter(|p| seen.insert(key(p, self.dim, h)))
            .copied()
            .collect();
        PointCloud {
            dim: self.dim,
            points,
            depth: self.depth,
            cell_size: self.cell_size + h * (self.dim as f64).sqrt(),
        }
    }

    pub fn bounding_box(&self) -> Result<(Vec3, Vec3)> {
        let first = self.points.first().ok_or(Error::EmptyCloud)?;
        let mut lo = *first;
        let mut hi = *first;
        for p in &self.points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        Ok((lo, hi))
    }

    pub fn centroid(&self) -> Result<Vec3> {
        if self.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let s: Vec3 = self.points.iter().sum();
        Ok(s / self.len() as f64)
    }

    /// A lower bound for the diameter: the largest distance among points that are
    /// extreme along a spread of directions.
    pub fn diameter(&self) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let dirs = directions(self.dim);
        let mut extreme = Vec::new();
        for d in &dirs {
            let mut best = (f64::NEG_INFINITY, 0);
            for (k, p) in self.points.iter().enumerate() {
                let v = p.dot(d);
                if v > best.0 {
                    best = (v, k);
                }
            }
            extreme.push(self.points[best.1]);
        }
        let mut diam: f64 = 0.0;
        for (i, p) in extreme.iter().enumerate() {
            for q in &extreme[i + 1..] {
                diam = diam.max((p - q).norm());
            }
        }
        Ok(diam)
    }

    /// One point per line, twelve decimals, an optional leading tag column.
    pub fn write_csv<W: Write>(&self, w: &mut W, tag: Option<usize>) -> Result<()> {
        for p in &self.points {
            if let Some(t) = tag {
                write!(w, "{t},")?;
            }
            let coords: Vec<String> = (0..self.dim).map(|k| format!("{:.12}", p[k])).collect();
            writeln!(w, "{}", coords.join(","))?;
        }
        Ok(())
    }

    /// Occupancy raster of the bounding box (binary PGM). Planar clouds only; a
    /// line cloud becomes a strip and a spatial cloud is projected to its first two axes.
    pub fn write_pgm<W: Write>(&self, w: &mut W, resolution: usize) -> Result<()> {
        let layers = [(self, 255u8)];
        write_layered_pgm(w, &layers, resolution)
    }

    /// SVG: merged segments for a line cloud, filled raster cells for a planar one.
    pub fn write_svg<W: Write>(&self, w: &mut W, resolution: usize) -> Result<()> {
        let (lo, hi) = self.bounding_box()?;
        let size = 800.0;
        if self.dim == 1 {
            let span = (hi[0] - lo[0]).max(1e-300);
            let scale = size / span;
            writeln!(w, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="60" viewBox="-10 -30 {} 60">"#, size + 20.0, size + 20.0)?;
            for (a, b) in self.segments() {
                writeln!(
                    w,
                    r#"<line x1="{:.6}" y1="0" x2="{:.6}" y2="0" stroke="black" stroke-width="4"/>"#,
                    (a - lo[0]) * scale,
                    (b - lo[0]) * scale
                )?;
            }
            writeln!(w, r#"<text x="0" y="25" font-size="12">[{:.9}, {:.9}]</text>"#, lo[0], hi[0])?;
            writeln!(w, "</svg>")?;
            return Ok(());
        }
        let (grid, nx, ny) = self.raster(resolution, lo, hi);
        let px = size / nx.max(ny) as f64;
        writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}">"#,
            px * nx as f64,
            px * ny as f64
        )?;
        for j in 0..ny {
            let mut i = 0;
            while i < nx {
                if grid[j * nx + i] {
                    let start = i;
                    while i < nx && grid[j * nx + i] {
                        i += 1;
                    }
                    writeln!(
                        w,
                        r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}"/>"#,
                        start as f64 * px,
                        (ny - 1 - j) as f64 * px,
                        (i - start) as f64 * px,
                        px
                    )?;
                } else {
                    i += 1;
                }
            }
        }
        writeln!(w, "</svg>")?;
        Ok(())
    }

    /// Voxel occupancy grid as text: header line, then one `ix iy iz` line per voxel.
    pub fn write_voxels<W: Write>(&self, w: &mut W, resolution: usize) -> Result<()> {
        let (lo, hi) = self.bounding_box()?;
        let span = (hi - lo).max().max(1e-300);
        let h = span / resolution as f64;
        let mut occ: Vec<[usize; 3]> = self
            .points
            .iter()
            .map(|p| {
                let mut c = [0usize; 3];
                for k in 0..self.dim {
                    c[k] = (((p[k] - lo[k]) / h) as usize).min(resolution - 1);
                }
                c
            })
            .collect();
        occ.sort_unstable();
        occ.dedup();
        writeln!(
            w,
            "voxels {resolution} origin {:.12} {:.12} {:.12} cell {:.12} count {}",
            lo[0],
            lo[1],
            lo[2],
            h,
            occ.len()
        )?;
        for c in occ {
            writeln!(w, "{} {} {}", c[0], c[1], c[2])?;
        }
        Ok(())
    }

    /// Maximal runs of a line cloud whose gaps are at most twice the covering radius.
    pub fn segments(&self) -> Vec<(f64, f64)> {
        let mut xs: Vec<f64> = self.points.iter().map(|p| p[0]).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::new();
        for x in xs {
            match out.last_mut() {
                Some(seg) if x - seg.1 <= 2.0 * self.cell_size + 1e-15 => seg.1 = x,
                _ => out.push((x, x)),
            }
        }
        out
    }

    fn raster(&self, resolution: usize, lo: Vec3, hi: Vec3) -> (Vec<bool>, usize, usize) {
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
        let h = span / resolution as f64;
        let nx = (((hi[0] - lo[0]) / h).ceil() as usize).clamp(1, resolution);
        let ny = if self.dim == 1 {
            1
        } else {
            (((hi[1] - lo[1]) / h).ceil() as usize).clamp(1, resolution)
        };
        let mut grid = vec![false; nx * ny];
        for p in &self.points {
            let i = (((p[0] - lo[0]) / h) as usize).min(nx - 1);
            let j = if self.dim == 1 {
                0
            } else {
                (((p[1] - lo[1]) / h) as usize).min(ny - 1)
            };
            grid[j * nx + i] = true;
        }
        (grid, nx, ny)
    }
}

/// Composite raster with one gray level per layer (later layers win).
pub fn write_layered_pgm<W: Write>(w: &mut W, layers: &[(&PointCloud, u8)], resolution: usize) -> Result<()> {
    let all = PointCloud::union(layers.iter().map(|(c, _)| *c));
    let (lo, hi) = all.bounding_box()?;
    let dim = all.dim;
    let span = if dim == 1 {
        hi[0] - lo[0]
    } else {
        (hi[0] - lo[0]).max(hi[1] - lo[1])
    }
    .max(1e-300);
    let h = span / resolution as f64;
    let nx = (((hi[0] - lo[0]) / h).ceil() as usize).clamp(1, resolution);
    let ny = if dim == 1 {
        16
    } else {
        (((hi[1] - lo[1]) / h).ceil() as usize).clamp(1, resolution)
    };
    let mut img = vec![0u8; nx * ny];
    for (cloud, level) in layers {
        for p in &cloud.points {
            let i = (((p[0] - lo[0]) / h) as usize).min(nx - 1);
            if dim == 1 {
                for j in 0..ny {
                    img[j * nx + i] = *level;
                }
            } else {
                let j = (((p[1] - lo[1]) / h) as usize).min(ny - 1);
                img[(ny - 1 - j) * nx + i] = *level;
            }
        }
    }
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    w.write_all(&img)?;
    Ok(())
}

pub(crate) fn directions(dim: usize) -> Vec<Vec3> {
    match dim {
        1 => vec![Vec3::new(1.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)],
        2 => (0..64)
            .map(|k| {
                let t = k as f64 * std::f64::consts::TAU / 64.0;
                Vec3::new(t.cos(), t.sin(), 0.0)
            })
            .collect(),
        _ => {
            // Fibonacci sphere
            let n = 256;
            let g = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
                    let r = (1.0 - z * z).sqrt();
                    let t = g * k as f64;
                    Vec3::new(r * t.cos(), r * t.sin(), z)
                })
                .collect()
        }
    }
}

/// Uniform bucket grid over a cloud for nearest-point queries.
pub(crate) struct Grid<'a> {
    pts: &'a [Vec3],
    dim: usize,
    h: f64,
    cells: HashMap<[i64; 3], (u32, u32)>,
    order: Vec<u32>,
}

impl<'a> Grid<'a> {
    pub(crate) fn new(pts: &'a [Vec3], dim: usize, h: f64) -> Self {
        let mut keyed: Vec<([i64; 3], u32)> = pts
            .iter()
            .enumerate()
            .map(|(k, p)| (key(p, dim, h), k as u32))
            .collect();
        keyed.sort_unstable();
        let mut cells = HashMap::new();
        let mut start = 0;
        while start < keyed.len() {
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == keyed[start].0 {
                end += 1;
            }
            cells.insert(keyed[start].0, (start as u32, end as u32));
            start = end;
        }
        Grid {
            pts,
            dim,
            h,
            cells,
            order: keyed.into_iter().map(|(_, k)| k).collect(),
        }
    }

    fn scan_shell(&self, c: [i64; 3], r: i64, p: &Vec3, best: &mut f64) {
        let ry = if self.dim >= 2 { r } else { 0 };
        let rz = if self.dim >= 3 { r } else { 0 };
        for dx in -r..=r {
            for dy in -ry..=ry {
                for dz in -rz..=rz {
                    if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                        continue;
                    }
                    if let Some(&(s, e)) = self.cells.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        for &k in &self.order[s as usize..e as usize] {
                            let d = (self.pts[k as usize] - p).norm();
                            if d < *best {
                                *best = d;
                            }
                        }
                    }
                }
            }
        }
    }

    /// Distance from `p` to the nearest grid point.
    pub(crate) fn nearest(&self, p: &Vec3) -> f64 {
        let c = key(p, self.dim, self.h);
        let mut best = f64::INFINITY;
        let limit = 64;
        for r in 0..=limit {
            self.scan_shell(c, r, p, &mut best);
            // every unscanned point is at least r*h away
            if best <= r as f64 * self.h {
                return best;
            }
        }
        self.pts.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Whether some grid point lies within `tol` of `p` (`tol <= h`).
    pub(crate) fn any_within(&self, p: &Vec3, tol: f64) -> bool {
        let c = key(p, self.dim, self.h);
        let mut best = f64::INFINITY;
        self.scan_shell(c, 0, p, &mut best);
        if best <= tol {
            return true;
        }
        self.scan_shell(c, 1, p, &mut best);
        best <= tol
    }
}

pub(crate) fn key(p: &Vec3, dim: usize, h: f64) -> [i64; 3] {
    let mut k = [0i64; 3];
    for i in 0..dim {
        k[i] = (p[i] / h).floor() as i64;
    }
    k
}

fn directed(a: &PointCloud, grid: &Grid) -> f64 {
    a.points.iter().map(|p| grid.nearest(p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two clouds, bucketed at their covering radius.
pub fn hausdorff_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let h = bucket_size(a, b);
    let ga = Grid::new(&a.points, a.dim, h);
    let gb = Grid::new(&b.points, b.dim, h);
    Ok(directed(a, &gb).max(directed(b, &ga)))
}

/// Whether the Hausdorff distance is at most `tol`, without computing it exactly.
pub fn hausdorff_within(a: &PointCloud, b: &PointCloud, tol: f64) -> Result<bool> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch(a.dim, b.dim));
    }
    let ga = Grid::new(&a.points, a.dim, tol);
    let gb = Grid::new(&b.points, b.dim, tol);
    Ok(a.points.iter().all(|p| gb.any_within(p, tol)) && b.points.iter().all(|p| ga.any_within(p, tol)))
}

fn bucket_size(a: &PointCloud, b: &PointCloud) -> f64 {
    let c = a.cell_size.max(b.cell_size);
    if c > 0.0 && c.is_finite() {
        return c;
    }
    // no metadata: aim at a handful of points per bucket
    let (lo, hi) = PointCloud::union([a, b]).bounding_box().unwrap();
    let span = (hi - lo).max().max(1e-12);
    let n = (a.len() + b.len()) as f64;
    span / n.powf(1.0 / a.dim.max(1) as f64).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid_cloud(n: usize, shift: Vec3) -> PointCloud {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                pts.push(Vec3::new(i as f64 / n as f64, j as f64 / n as f64, 0.0) + shift);
            }
        }
        PointCloud::new(2, pts, 0, 1.0 / n as f64)
    }

    #[test]
    fn identical_clouds() {
        let a = grid_cloud(20, Vec3::zeros());
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn translated_cloud() {
        let a = grid_cloud(20, Vec3::zeros());
        let t = Vec3::new(0.3, 0.4, 0.0);
        let b = grid_cloud(20, t);
        let d = hausdorff_distance(&a, &b).unwrap();
        assert!((d - 0.5).abs() < 1e-12, "{d}");
        assert!(hausdorff_within(&a, &b, 0.6).is_ok());
    }

    #[test]
    fn errors() {
        let a = grid_cloud(3, Vec3::zeros());
        let e = PointCloud::new(2, vec![], 0, 0.1);
        assert!(matches!(hausdorff_distance(&a, &e), Err(Error::EmptyCloud)));
        let l = PointCloud::new(1, vec![Vec3::zeros()], 0, 0.1);
        assert!(matches!(hausdorff_distance(&a, &l), Err(Error::DimensionMismatch(2, 1))));
    }

    #[test]
    fn exports() {
        let a = grid_cloud(4, Vec3::zeros());
        let mut buf = Vec::new();
        a.write_csv(&mut buf, Some(3)).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().next().unwrap(), "3,0.000000000000,0.000000000000");
        assert_eq!(s.lines().count(), 16);
        let mut buf = Vec::new();
        a.write_pgm(&mut buf, 8).unwrap();
        assert!(buf.starts_with(b"P5\n"));
        let mut buf = Vec::new();
        a.write_svg(&mut buf, 8).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("<rect"));
    }

    #[test]
    fn line_segments_merge() {
        let pts = [0.0, 0.1, 0.2, 0.9, 1.0].iter().map(|&x| Vec3::new(x, 0.0, 0.0)).collect();
        let c = PointCloud::new(1, pts, 0, 0.05);
        assert_eq!(c.segments(), vec![(0.0, 0.2), (0.9, 1.0)]);
    }

    proptest! {
        #[test]
        fn grid_matches_brute_force(pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..60),
                                    other in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..60)) {
            let a = PointCloud::new(2, pts.iter().map(|&(x, y)| Vec3::new(x, y, 0.0)).collect(), 0, 0.05);
            let b = PointCloud::new(2, other.iter().map(|&(x, y)| Vec3::new(x, y, 0.0)).collect(), 0, 0.05);
            let brute = |u: &PointCloud, v: &PointCloud| u.points.iter().map(|p| v.points.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
            let want = brute(&a, &b).max(brute(&b, &a));
            prop_assert!((hausdorff_distance(&a, &b).unwrap() - want).abs() < 1e-12);
            prop_assert!(hausdorff_within(&a, &b, want + 1e-9).unwrap());
            if want > 1e-6 {
                prop_assert!(!hausdorff_within(&a, &b, want * 0.999).unwrap());
            }
        }
    }
}
