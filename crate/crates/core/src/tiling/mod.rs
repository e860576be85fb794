//! Lattice tilings by tent-tiles and their reflections, checked on a raster of cell centers.

mod oracle;

pub use oracle::Membership;

use crate::boundary::lattice_points;
use crate::error::{Error, Result};
use crate::geometry::{tent_interval_exact, AffineMap, TentTile, Vec3};
use crate::numberfield::{beta_of, registry_lookup, FieldElement};
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use std::io::Write;

pub const DEFAULT_THRESHOLD: f64 = 0.02;
pub const DEFAULT_WINDOW_SCALE: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TilingStatus {
    Tiles,
    TilesWithReflection,
    Unknown,
}

/// How a copy of the tile is placed before translation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    /// `F`
    Identity,
    /// `Psi(center) - F`
    Reflection,
}

#[derive(Clone, Debug)]
pub struct TilingSpec {
    pub record: i32,
    pub lattice: Vec<FieldElement>,
    pub protos: Vec<Placement>,
    pub center: Option<FieldElement>,
    pub status: TilingStatus,
}

pub fn tiling_spec(index: i32) -> Result<TilingSpec> {
    let rec = registry_lookup(index)?;
    if index == 0 {
        return Err(Error::NoTentTile);
    }
    let one = FieldElement::one(index)?;
    let a = FieldElement::alpha(index)?;
    let b = beta_of(rec)?;
    let pow = |x: &FieldElement, k: i64| x.pow(k).expect("nonzero");
    let diffs = |x: &FieldElement, y: &FieldElement, n: i64| -> Vec<FieldElement> { (1..=n).map(|k| x - &pow(y, k)).collect() };
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let (lattice, center, status) = match index {
        1 => (diffs(&b, &a, 2), None, TilingStatus::Tiles),
        3 => (diffs(&one, &a, 2), Some(one.clone()), TilingStatus::TilesWithReflection),
        -1 => (diffs(&a, &b, 2), Some(a.clone()), TilingStatus::TilesWithReflection),
        -3 => (diffs(&one, &b, 2), Some(one.clone()), TilingStatus::TilesWithReflection),
        4 => (diffs(&one, &a, 3), Some(one.clone()), TilingStatus::TilesWithReflection),
        -4 => (diffs(&one, &b, 3), None, TilingStatus::Tiles),
        -2 => (vec![&one - &b], None, TilingStatus::Tiles),
        2 => (vec![(&one - &a).scale(&half)], None, TilingStatus::Tiles),
        _ => (Vec::new(), None, TilingStatus::Unknown),
    };
    let protos = match status {
        TilingStatus::Tiles => vec![Placement::Identity],
        TilingStatus::TilesWithReflection => vec![Placement::Identity, Placement::Reflection],
        TilingStatus::Unknown => Vec::new(),
    };
    Ok(TilingSpec {
        record: index,
        lattice,
        protos,
        center,
        status,
    })
}

impl TilingSpec {
    /// `Psi` of the lattice basis as the columns of a `d x d` matrix.
    pub fn lattice_matrix(&self, tile: &TentTile) -> Result<DMatrix<f64>> {
        let d = tile.dim();
        let mut g = DMatrix::zeros(d, self.lattice.len());
        for (j, x) in self.lattice.iter().enumerate() {
            let v = tile.emb.psi(x)?;
            for i in 0..d {
                g[(i, j)] = v[i];
            }
        }
        Ok(g)
    }

    /// Determinant of the Gram matrix of the lattice vectors.
    pub fn gram_determinant(&self, tile: &TentTile) -> Result<f64> {
        let g = self.lattice_matrix(tile)?;
        Ok((g.transpose() * &g).determinant())
    }

    /// The affine map carrying `F` onto a prototile.
    pub fn placement_map(&self, p: Placement, tile: &TentTile) -> Result<AffineMap> {
        let d = tile.dim();
        Ok(match p {
            Placement::Identity => AffineMap::identity(d),
            Placement::Reflection => {
                let c = self.center.as_ref().ok_or_else(|| Error::Unsupported("reflection without center".into()))?;
                AffineMap::new(d, -tile.linear_pad(), tile.emb.psi(c)?)
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct CoverageConfig {
    /// window side in tile diameters
    pub window_scale: f64,
    /// cells per axis; `None` picks 512 (planar), 128 (spatial) or 4096 (line)
    pub resolution: Option<usize>,
    /// membership is resolved down to `cell * refine`; `None` picks by dimension
    pub refine: Option<f64>,
    pub threshold: f64,
    /// multiplies the lattice basis (2 gives the negative control)
    pub lattice_scale: i64,
}

impl Default for CoverageConfig {
    fn default() -> Self {
        CoverageConfig {
            window_scale: DEFAULT_WINDOW_SCALE,
            resolution: None,
            refine: None,
            threshold: DEFAULT_THRESHOLD,
            lattice_scale: 1,
        }
    }
}

pub fn default_refine(dim: usize) -> f64 {
    if dim >= 3 {
        2e-4
    } else {
        1e-9
    }
}

pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 4096,
        2 => 512,
        _ => 128,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageHistogram {
    pub record: i32,
    pub dim: usize,
    pub window_lo: Vec<f64>,
    pub window_hi: Vec<f64>,
    pub resolution: usize,
    pub cell_size: f64,
    /// `counts[m]` = number of cells covered exactly `m` times
    pub counts: Vec<u64>,
    pub modal: usize,
    pub boundary_fraction: f64,
    pub translates: usize,
    #[serde(skip)]
    pub multiplicity: Vec<u8>,
}

impl CoverageHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Grayscale heatmap of the multiplicities (the middle slice for spatial tiles).
    pub fn write_pgm<W: Write>(&self, w: &mut W) -> Result<()> {
        let n = self.resolution;
        let rows = if self.dim == 1 { 1 } else { n };
        let offset = if self.dim == 3 { (n / 2) * n * n } else { 0 };
        writeln!(w, "P5\n{n} {rows}\n255")?;
        let mut buf = Vec::with_capacity(n * rows);
        for r in (0..rows).rev() {
            for c in 0..n {
                let m = self.multiplicity[offset + r * n + c];
                buf.push(match m {
                    0 => 0,
                    1 => 128,
                    _ => 255,
                });
            }
        }
        w.write_all(&buf)?;
        Ok(())
    }
}

/// Rasterizes the placed translates over a cube of cells around the tile.
pub fn coverage_estimate(spec: &TilingSpec, cfg: &CoverageConfig) -> Result<CoverageHistogram> {
    if spec.status == TilingStatus::Unknown {
        return Err(Error::UnknownTiling(spec.record));
    }
    let tile = TentTile::new(registry_lookup(spec.record)?)?;
    let d = tile.dim();
    let oracle = Membership::new(&tile)?;
    let res = cfg.resolution.unwrap_or_else(|| default_resolution(d));
    let diam = oracle.diameter();
    let side = cfg.window_scale * diam;
    let cell = side / res as f64;
    let eps = cell * cfg.refine.unwrap_or_else(|| default_refine(d));
    let wc = oracle.center();
    let mut lo = Vec3::zeros();
    for i in 0..d {
        lo[i] = wc[i] - side / 2.0;
    }
    let mut lat = spec.lattice_matrix(&tile)?;
    lat *= cfg.lattice_scale as f64;
    let ncells = res.pow(d as u32);
    let mut mult = vec![0u8; ncells];
    let half_diag = side / 2.0 * (d as f64).sqrt();
    let mut translates = 0;
    for &p in &spec.protos {
        let place = spec.placement_map(p, &tile)?;
        let pc = place.apply(&oracle.center());
        let mut target = DVector::zeros(d);
        for i in 0..d {
            target[i] = wc[i] - pc[i];
        }
        let reach = half_diag + oracle.reach();
        for k in lattice_points(&lat, &target, reach) {
            let kv = DVector::from_iterator(d, k.iter().map(|&x| x as f64));
            let tv = &lat * kv;
            let mut t = Vec3::zeros();
            for i in 0..d {
                t[i] = tv[i];
            }
            let inv = place.inverse().expect("placement is invertible");
            // cells whose centers lie in the bounding box of the placed enclosure
            let (blo, bhi) = oracle.bounding_box(&place, &t);
            let mut ranges = Vec::with_capacity(d);
            let mut empty = false;
            for i in 0..d {
                let a = ((blo[i] - lo[i]) / cell - 0.5).ceil().max(0.0) as i64;
                let b = ((bhi[i] - lo[i]) / cell - 0.5).floor().min(res as f64 - 1.0) as i64;
                if a > b {
                    empty = true;
                }
                ranges.push((a, b));
            }
            if empty {
                continue;
            }
            translates += 1;
            let mut pts: Vec<(usize, Vec3)> = Vec::new();
            for_each_cell(&ranges, |ix| {
                let mut y = Vec3::zeros();
                let mut flat = 0usize;
                for i in (0..d).rev() {
                    y[i] = lo[i] + (ix[i] as f64 + 0.5) * cell;
                    flat = flat * res + ix[i] as usize;
                }
                pts.push((flat, inv.apply(&(y - t))));
            });
            for idx in oracle.members(pts, eps) {
                mult[idx] = mult[idx].saturating_add(1);
            }
        }
    }
    let mut counts = vec![0u64; 1 + *mult.iter().max().unwrap_or(&0) as usize];
    for &m in &mult {
        counts[m as usize] += 1;
    }
    let modal = (0..counts.len()).max_by_key(|&m| (counts[m], std::cmp::Reverse(m))).unwrap_or(0);
    let boundary_fraction = 1.0 - counts[modal] as f64 / ncells as f64;
    Ok(CoverageHistogram {
        record: spec.record,
        dim: d,
        window_lo: (0..d).map(|i| lo[i]).collect(),
        window_hi: (0..d).map(|i| lo[i] + side).collect(),
        resolution: res,
        cell_size: cell,
        counts,
        modal,
        boundary_fraction,
        translates,
        multiplicity: mult,
    })
}

/// Calls `f` on every multi-index in the box `ranges` (inclusive), last axis slowest.
fn for_each_cell(ranges: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    let mut ix: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(&ix);
        let mut k = 0;
        loop {
            if k == ix.len() {
                return;
            }
            if ix[k] < ranges[k].1 {
                ix[k] += 1;
                break;
            }
            ix[k] = ranges[k].0;
            k += 1;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TilingReport {
    pub record: i32,
    pub status: TilingStatus,
    pub protos: Vec<Placement>,
    pub center: Option<String>,
    pub lattice_scale: i64,
    pub histogram: CoverageHistogram,
    /// endpoint arithmetic for interval tiles
    pub exact: Option<bool>,
    pub threshold: f64,
    pub pass: bool,
}

pub fn verify_tiling(index: i32, cfg: &CoverageConfig) -> Result<TilingReport> {
    let spec = tiling_spec(index)?;
    let histogram = coverage_estimate(&spec, cfg)?;
    let exact = if spec.lattice.len() == 1 && cfg.lattice_scale == 1 {
        Some(interval_tiling_exact(index)?)
    } else {
        None
    };
    let pass = histogram.modal == 1 && histogram.boundary_fraction <= cfg.threshold && exact.unwrap_or(true);
    Ok(TilingReport {
        record: index,
        status: spec.status,
        protos: spec.protos.clone(),
        center: spec.center.as_ref().map(|c| c.to_string()),
        lattice_scale: cfg.lattice_scale,
        histogram,
        exact,
        threshold: cfg.threshold,
        pass,
    })
}

/// For an interval tile `[Psi(lo), Psi(hi)]`: the generator equals the length up to sign, so
/// consecutive translates meet exactly at endpoints.
pub fn interval_tiling_exact(index: i32) -> Result<bool> {
    let spec = tiling_spec(index)?;
    let iv = tent_interval_exact(index)?;
    let g = &spec.lattice[0];
    let len = iv.length();
    Ok(&len == g || len == -g)
}
