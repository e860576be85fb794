//! Rauzy fractals of the family substitutions and their relation to tent-tiles.

use crate::error::{Error, Result};
use crate::geometry::{
    build_matrices, cell_key, hausdorff_distance, op_norm, AffineMap, EmbeddingMap, Mat, PointCloud, TentTile, Vec3,
    DEFAULT_POINT_BUDGET,
};
use crate::numberfield::registry_lookup;
use crate::spectral::{perron_data, PerronData};
use crate::substitution::{substitution_for, Correspondence, Substitution, Word};
use serde::Serialize;
use std::collections::{HashSet, VecDeque};
use std::io::Write;

/// Largest number of prefix-graph walks a render may enumerate.
pub const WALK_BUDGET: usize = 1 << 28;

/// One edge `a -U-> b` with its map `g_U(x) = -Psi(<l(U), u>) + h x`.
#[derive(Clone, Debug)]
pub struct RauzyEdge {
    pub from: usize,
    pub to: usize,
    pub prefix: Word,
    pub map: AffineMap,
}

/// The GIFS of a substitution in `K_c` coordinates.
#[derive(Clone, Debug)]
pub struct RauzyGifs {
    pub dim: usize,
    pub size: usize,
    pub edges: Vec<RauzyEdge>,
    /// linear part shared by all maps
    pub h: Mat,
    pub contraction: f64,
    /// a point of each subtile
    pub base_points: Vec<Vec3>,
    /// `|y - base_points[a]| <= radii[a]` on subtile `a`
    pub radii: Vec<f64>,
}

/// Shortest cycle through `start`, as a list of edge indices in walk order.
fn shortest_cycle(size: usize, edges: &[RauzyEdge], start: usize) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<usize>> = vec![None; size];
    let mut queue = VecDeque::new();
    for (k, e) in edges.iter().enumerate() {
        if e.from == start {
            if e.to == start {
                return Some(vec![k]);
            }
            if prev[e.to].is_none() {
                prev[e.to] = Some(k);
                queue.push_back(e.to);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        for (k, e) in edges.iter().enumerate() {
            if e.from != v {
                continue;
            }
            if e.to == start {
                let mut path = vec![k];
                let mut w = v;
                while w != start {
                    let pk = prev[w].unwrap();
                    path.push(pk);
                    w = edges[pk].from;
                }
                path.reverse();
                return Some(path);
            }
            if prev[e.to].is_none() && e.to != start {
                prev[e.to] = Some(k);
                queue.push_back(e.to);
            }
        }
    }
    None
}

pub fn rauzy_gifs(s: &Substitution, perron: &PerronData, emb: &EmbeddingMap) -> Result<RauzyGifs> {
    let h = perron.h_matrix(emb)?;
    let contraction = op_norm(&h);
    if contraction >= 1.0 {
        return Err(Error::Unsupported("substitution is not Pisot".into()));
    }
    let dim = emb.dim;
    let mut edges = Vec::new();
    for e in s.prefix_graph().edges {
        let t = -emb.psi(&perron.pi_word(&e.prefix))?;
        edges.push(RauzyEdge {
            from: e.from,
            to: e.to,
            map: AffineMap::new(dim, h, t),
            prefix: e.prefix,
        });
    }
    let (_, corr) = substitution_for(registry_lookup(perron.record_index)?)?;
    let mut gifs = RauzyGifs {
        dim,
        size: s.size(),
        edges,
        h,
        contraction,
        base_points: Vec::new(),
        radii: Vec::new(),
    };
    gifs.base_points = gifs.compute_base_points(corr.base_letter)?;
    gifs.radii = gifs.compute_radii();
    Ok(gifs)
}

impl RauzyGifs {
    pub fn edges_from(&self, a: usize) -> impl Iterator<Item = &RauzyEdge> {
        self.edges.iter().filter(move |e| e.from == a)
    }

    fn compute_base_points(&self, base: usize) -> Result<Vec<Vec3>> {
        let cycle = shortest_cycle(self.size, &self.edges, base)
            .ok_or_else(|| Error::Unsupported("prefix graph has no cycle through the base letter".into()))?;
        let mut g = AffineMap::identity(self.dim);
        for &k in &cycle {
            g = g.compose(&self.edges[k].map);
        }
        let y0 = g.fixed_point().ok_or_else(|| Error::Unsupported("cycle map is singular".into()))?;
        let mut pts: Vec<Option<Vec3>> = vec![None; self.size];
        pts[base] = Some(y0);
        // y_a = g_U(y_b) for a -U-> b
        loop {
            let mut changed = false;
            for e in &self.edges {
                if pts[e.from].is_none() {
                    if let Some(yb) = pts[e.to] {
                        pts[e.from] = Some(e.map.apply(&yb));
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        pts.into_iter()
            .map(|p| p.ok_or_else(|| Error::Unsupported("prefix graph is not strongly connected".into())))
            .collect()
    }

    fn compute_radii(&self) -> Vec<f64> {
        let jumps: Vec<f64> = self
            .edges
            .iter()
            .map(|e| (e.map.apply(&self.base_points[e.to]) - self.base_points[e.from]).norm())
            .collect();
        let mut r = vec![0.0; self.size];
        for _ in 0..100_000 {
            let mut next = vec![0.0f64; self.size];
            for (e, j) in self.edges.iter().zip(&jumps) {
                next[e.from] = next[e.from].max(j + self.contraction * r[e.to]);
            }
            let delta = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            r = next;
            if delta <= 1e-15 * (1.0 + r.iter().cloned().fold(0.0, f64::max)) {
                break;
            }
        }
        let mut r: Vec<f64> = r.iter().map(|x| x * (1.0 + 1e-9) + 1e-15).collect();
        // tighten with a coarse render: far_a + contraction^k r_max still bounds subtile a
        for _ in 0..2 {
            let rmax = r.iter().cloned().fold(0.0, f64::max);
            let mut k = 1;
            while k < 200 && self.walk_counts(k + 1).iter().sum::<f64>() <= 2e5 {
                k += 1;
            }
            let slack = self.contraction.powi(k as i32) * rmax;
            for (a, ra) in r.iter_mut().enumerate() {
                let y = self.base_points[a];
                let far = self.render_letter(a, k, 0.0).iter().map(|p| (p - y).norm()).fold(0.0, f64::max);
                *ra = ra.min(far + slack);
            }
        }
        r
    }

    /// Number of walks of length `depth` from each letter.
    pub fn walk_counts(&self, depth: usize) -> Vec<f64> {
        let mut c = vec![1.0; self.size];
        for _ in 0..depth {
            let mut next = vec![0.0; self.size];
            for e in &self.edges {
                next[e.from] += c[e.to];
            }
            c = next;
        }
        c
    }

    /// Smallest depth whose walk error `contraction^k max r` is at most `err`.
    pub fn depth_for(&self, err: f64) -> usize {
        let r = self.radii.iter().cloned().fold(0.0, f64::max);
        if r <= err {
            return 1;
        }
        ((err / r).ln() / self.contraction.ln()).ceil().max(1.0) as usize
    }

    fn render_letter(&self, a: usize, depth: usize, thin: f64) -> Vec<Vec3> {
        let mut powers = vec![Mat::identity()];
        for k in 0..depth {
            powers.push(powers[k] * self.h);
        }
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        let mut stack: Vec<(usize, usize, Vec3)> = vec![(a, 0, Vec3::zeros())];
        while let Some((v, k, t)) = stack.pop() {
            if k == depth {
                let p = t + powers[k] * self.base_points[v];
                if thin <= 0.0 || seen.insert(cell_key(&p, self.dim, thin)) {
                    out.push(p);
                }
                continue;
            }
            for e in self.edges_from(v) {
                stack.push((e.to, k + 1, t + powers[k] * e.map.t));
            }
        }
        out.sort_by(|p, q| p.iter().zip(q.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// All length-`depth` walks from each letter applied to the base points.
    pub fn render(&self, depth: usize, budget: usize) -> Result<RauzySubtiles> {
        self.render_thinned(depth, 0.0, budget)
    }

    /// As `render`, keeping one point per grid cell of side `thin`.
    pub fn render_thinned(&self, depth: usize, thin: f64, budget: usize) -> Result<RauzySubtiles> {
        if depth == 0 {
            return Err(Error::Unsupported("depth must be at least 1".into()));
        }
        let needed: f64 = self.walk_counts(depth).iter().sum();
        if needed > budget as f64 {
            return Err(Error::PointBudget { needed, budget });
        }
        let walk_err = self.contraction.powi(depth as i32) * self.radii.iter().cloned().fold(0.0, f64::max);
        let cell = walk_err + thin.max(0.0) * (self.dim as f64).sqrt();
        let clouds = (0..self.size)
            .map(|a| PointCloud::new(self.dim, self.render_letter(a, depth, thin), depth, cell))
            .collect();
        Ok(RauzySubtiles { clouds, depth, cell_size: cell })
    }

    /// Render with covering radius at most `cell`, split evenly between walk error and thinning.
    pub fn render_cell(&self, cell: f64, budget: usize) -> Result<RauzySubtiles> {
        let share = cell / (1.0 + (self.dim as f64).sqrt());
        self.render_thinned(self.depth_for(share), share, budget)
    }

    /// `max_a d_H(R(a), union g_U(R(b)))`, per letter.
    pub fn set_equation_residuals(&self, tiles: &RauzySubtiles) -> Result<Vec<f64>> {
        (0..self.size)
            .map(|a| {
                let parts: Vec<PointCloud> = self.edges_from(a).map(|e| tiles.clouds[e.to].transform(&e.map)).collect();
                hausdorff_distance(&tiles.clouds[a], &PointCloud::union(&parts))
            })
            .collect()
    }
}

/// Rendered subtiles `R(0), ..., R(m)`.
#[derive(Clone, Debug)]
pub struct RauzySubtiles {
    pub clouds: Vec<PointCloud>,
    pub depth: usize,
    pub cell_size: f64,
}

impl RauzySubtiles {
    pub fn union(&self) -> PointCloud {
        PointCloud::union(&self.clouds)
    }

    pub fn union_of(&self, letters: &[usize]) -> PointCloud {
        PointCloud::union(letters.iter().map(|&a| &self.clouds[a]))
    }

    /// One CSV row per point with its letter in the last column.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        for (a, c) in self.clouds.iter().enumerate() {
            c.write_csv(w, Some(a))?;
        }
        Ok(())
    }

    /// One gray level per letter.
    pub fn write_pgm<W: Write>(&self, w: &mut W, resolution: usize) -> Result<()> {
        let n = self.clouds.len().max(1);
        let layers: Vec<(&PointCloud, u8)> = self
            .clouds
            .iter()
            .enumerate()
            .map(|(a, c)| (c, (40 + 215 * a / n.max(2).saturating_sub(1).max(1)).min(255) as u8))
            .collect();
        crate::geometry::write_layered_pgm(w, &layers, resolution)
    }

    /// Share of occupied raster cells hit by more than one subtile.
    pub fn overlap_fraction(&self, resolution: usize) -> Result<f64> {
        let all = self.union();
        let (lo, hi) = all.bounding_box()?;
        let h = (hi - lo).max().max(1e-300) / resolution as f64;
        let mut owner: std::collections::HashMap<[i64; 3], (usize, bool)> = std::collections::HashMap::new();
        for (a, c) in self.clouds.iter().enumerate() {
            for p in &c.points {
                let k = cell_key(&(p - lo), all.dim, h);
                owner
                    .entry(k)
                    .and_modify(|(o, multi)| *multi |= *o != a)
                    .or_insert((a, false));
            }
        }
        let multi = owner.values().filter(|(_, m)| *m).count();
        Ok(multi as f64 / owner.len().max(1) as f64)
    }
}

/// Everything needed to compare a record's tent-tile with its Rauzy fractal.
pub struct RauzySetup {
    pub substitution: Substitution,
    pub correspondence: Correspondence,
    pub perron: PerronData,
    pub gifs: RauzyGifs,
    pub tile: TentTile,
}

impl RauzySetup {
    pub fn new(index: i32) -> Result<Self> {
        let rec = registry_lookup(index)?;
        let (substitution, correspondence) = substitution_for(rec)?;
        let perron = perron_data(&substitution, rec)?;
        let (emb, _) = build_matrices(rec, 64)?;
        let gifs = rauzy_gifs(&substitution, &perron, &emb)?;
        let tile = TentTile::new(rec)?;
        Ok(RauzySetup {
            substitution,
            correspondence,
            perron,
            gifs,
            tile,
        })
    }

    /// The maps `F -> X_k`, one per letter.
    pub fn subtile_maps(&self) -> Result<Vec<AffineMap>> {
        self.correspondence
            .formulas
            .iter()
            .map(|f| f.affine(&self.tile.pair, &self.tile.emb))
            .collect()
    }

    /// Diameter of the tent-tile from the finest render the default budget allows.
    pub fn tile_diameter(&self) -> Result<f64> {
        let mut div = 64.0;
        loop {
            match self.tile.render(self.tile.radius / div, DEFAULT_POINT_BUDGET) {
                Ok(c) => return c.diameter(),
                Err(Error::PointBudget { .. }) if div > 2.0 => div /= 2.0,
                Err(e) => return Err(e),
            }
        }
    }
}

/// Outcome of comparing `R(k)` with `X_k` for every letter.
#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub record: i32,
    pub family: String,
    pub cell_size: f64,
    pub tol: f64,
    pub distances: Vec<f64>,
    pub pass: bool,
}

/// `d_H(R(k), X_k)` for all letters with clouds of covering radius `cell`; passes iff all are `<= tol`.
pub fn correspondence_check(index: i32, cell: f64, tol: f64, budget: usize) -> Result<CorrespondenceReport> {
    let setup = RauzySetup::new(index)?;
    let tiles = setup.gifs.render_cell(cell, budget)?;
    let f = setup.tile.render(cell / 2.0, budget)?.thinned(cell / 2.0 / (setup.tile.dim() as f64).sqrt());
    let mut distances = Vec::new();
    for (k, map) in setup.subtile_maps()?.iter().enumerate() {
        let xk = f.transform(map);
        distances.push(hausdorff_distance(&tiles.clouds[k], &xk)?);
    }
    Ok(CorrespondenceReport {
        record: index,
        family: setup.correspondence.family.name(),
        cell_size: tiles.cell_size.max(f.cell_size),
        tol,
        pass: distances.iter().all(|&d| d <= tol),
        distances,
    })
}

/// The tent-tile recovered from Rauzy subtiles: a union of letters when the tile is one,
/// otherwise the inverse formula applied to the least expanding subtile.
pub fn tent_tile_from_rauzy(index: i32, cell: f64, budget: usize) -> Result<PointCloud> {
    let setup = RauzySetup::new(index)?;
    let tiles = setup.gifs.render_cell(cell, budget)?;
    if let Some(letters) = &setup.correspondence.tent_letters {
        return Ok(tiles.union_of(letters));
    }
    let maps = setup.subtile_maps()?;
    let (k, inv) = maps
        .iter()
        .enumerate()
        .filter_map(|(k, m)| m.inverse().map(|i| (k, i)))
        .min_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .ok_or_else(|| Error::Unsupported("no invertible subtile map".into()))?;
    Ok(tiles.clouds[k].transform(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta3_gifs_shape() {
        let s = RauzySetup::new(1).unwrap();
        assert_eq!(s.gifs.size, 3);
        assert_eq!(s.gifs.edges.len(), 5);
        let a = s.tile.pair.a;
        assert!((s.gifs.h - a).norm() < 1e-12);
        let eps = s.gifs.edges.iter().find(|e| e.prefix.is_empty()).unwrap();
        assert_eq!(eps.map.t, Vec3::zeros());
        assert!(s.gifs.edges.iter().all(|e| e.map.is_contraction()));
    }

    #[test]
    fn primed_linear_parts() {
        let s = RauzySetup::new(-3).unwrap();
        assert!((s.gifs.h - s.tile.pair.b).norm() < 1e-12);
        let s = RauzySetup::new(-4).unwrap();
        assert!((s.gifs.h - s.tile.pair.b * s.tile.pair.b).norm() < 1e-12);
    }

    #[test]
    fn base_points_lie_on_subtiles() {
        for i in [1, 3, -1, -3, -5] {
            let s = RauzySetup::new(i).unwrap();
            let tiles = s.gifs.render(6, WALK_BUDGET).unwrap();
            for (a, c) in tiles.clouds.iter().enumerate() {
                let y = s.gifs.base_points[a];
                let near = c.points.iter().map(|p| (p - y).norm()).fold(f64::INFINITY, f64::min);
                assert!(near <= tiles.cell_size + 1e-12, "alpha_{i} letter {a}");
                assert!(c.points.iter().all(|p| (p - y).norm() <= s.gifs.radii[a] + 1e-9));
            }
        }
    }

    #[test]
    fn set_equations_hold() {
        for i in [1, 5, -1, -5] {
            let s = RauzySetup::new(i).unwrap();
            let tiles = s.gifs.render_cell(0.02, WALK_BUDGET).unwrap();
            for (a, r) in s.gifs.set_equation_residuals(&tiles).unwrap().iter().enumerate() {
                assert!(*r <= 2.0 * tiles.cell_size, "alpha_{i} letter {a}: {r} vs {}", tiles.cell_size);
            }
        }
    }

    #[test]
    fn zeta3_last_subtile_is_scaled_tile() {
        let r = correspondence_check(1, 0.01, 0.05, WALK_BUDGET).unwrap();
        assert!(r.pass, "{:?}", r.distances);
    }

    #[test]
    fn correspondences_coarse() {
        for i in [2, 3, 5, -1, -3, -5] {
            let r = correspondence_check(i, 0.02, 0.1, WALK_BUDGET).unwrap();
            assert!(r.distances.iter().all(|&d| d <= 5.0 * r.cell_size), "alpha_{i}: {:?} cell {}", r.distances, r.cell_size);
        }
    }

    #[test]
    fn tile_recovered_from_rauzy() {
        for i in [1, 3, -3] {
            let s = RauzySetup::new(i).unwrap();
            let rebuilt = tent_tile_from_rauzy(i, 0.01, WALK_BUDGET).unwrap();
            let direct = s.tile.render(0.01, DEFAULT_POINT_BUDGET).unwrap();
            let d = hausdorff_distance(&rebuilt, &direct).unwrap();
            assert!(d <= 5.0 * rebuilt.cell_size.max(direct.cell_size), "alpha_{i}: {d}");
        }
    }

    #[test]
    fn subtiles_barely_overlap() {
        let s = RauzySetup::new(1).unwrap();
        let tiles = s.gifs.render_cell(0.002, WALK_BUDGET).unwrap();
        assert!(tiles.overlap_fraction(128).unwrap() <= 0.1);
    }

    #[test]
    fn walk_budget_enforced() {
        let s = RauzySetup::new(4).unwrap();
        assert!(matches!(s.gifs.render(400, WALK_BUDGET), Err(Error::PointBudget { .. })));
        assert!(s.gifs.render(0, WALK_BUDGET).is_err());
    }
}
