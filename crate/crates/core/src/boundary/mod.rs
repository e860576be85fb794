//! Boundary graphs of the self-replicating and lattice tilings, their dominant
//! eigenvalues, the tiling property and boundary dimensions.

mod lattice;

pub use lattice::{integer_coordinates, lattice_points, module_basis};

use crate::error::{Error, Result};
use crate::geometry::{build_matrices, EmbeddingMap, Vec3};
use crate::rauzy::rauzy_gifs;
use crate::numberfield::{registry_lookup, FieldElement};
use crate::poly::{IntPoly, RealRoots, RootInterval};
use crate::spectral::{dominant_eigenvalue, perron_data, DominantEigenvalue, PerronData};
use crate::substitution::{substitution_for, PrefixEdge, Substitution};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use num_traits::Zero;
use std::collections::{HashMap, VecDeque};
use std::io::Write;

/// Bits of the dominant-root isolating interval (`2^-40 < 10^-12`).
pub const ROOT_BITS: u32 = 40;
/// Refinement cap for the `mu < lambda0` comparison.
pub const COMPARE_CAP_BITS: u32 = 4096;
/// Safety factor on the subtile enclosure radii.
pub const ENCLOSURE_SLACK: f64 = 1.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Sr,
    Lat,
}

/// Which edge equation generates successors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeRule {
    /// `h(xi') = xi + pi l(U2) - pi l(U1)`
    Derived,
    /// `h(xi') = xi' + pi l(U2) - pi l(U1)`, with `xi` absent
    Literal,
}

/// `[a1, z, a2]`, standing for `R(a1) ∩ (xi + R(a2))` with `xi = -Psi(z)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryVertex {
    pub a1: usize,
    pub z: FieldElement,
    pub a2: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub from: usize,
    pub to: usize,
    pub label: FieldElement,
}

#[derive(Clone, Debug)]
pub struct BoundaryGraph {
    pub record: i32,
    pub variant: Variant,
    pub rule: EdgeRule,
    pub vertices: Vec<BoundaryVertex>,
    pub edges: Vec<BoundaryEdge>,
    pub seeds: Vec<usize>,
    pub bound: f64,
    /// vertices explored before pruning
    pub explored: usize,
}

/// Substitution data shared by graph construction and the dimension report.
#[derive(Clone, Debug)]
pub struct BoundaryContext {
    pub record: i32,
    pub substitution: Substitution,
    pub perron: PerronData,
    pub emb: EmbeddingMap,
    prefix_edges: Vec<PrefixEdge>,
    /// `<l(U), u>` per prefix edge
    labels: Vec<FieldElement>,
    /// subtile enclosures `(centers, radii)`
    enclosure: Option<(Vec<Vec3>, Vec<f64>)>,
}

impl BoundaryContext {
    pub fn new(index: i32) -> Result<Self> {
        let rec = registry_lookup(index)?;
        let (substitution, _) = substitution_for(rec)?;
        let perron = perron_data(&substitution, rec)?;
        let (emb, _) = build_matrices(rec, 64)?;
        Ok(Self::from_parts(substitution, perron, emb))
    }

    pub fn from_parts(substitution: Substitution, perron: PerronData, emb: EmbeddingMap) -> Self {
        let prefix_edges = substitution.prefix_graph().edges;
        let labels = prefix_edges.iter().map(|e| perron.pi_word(&e.prefix)).collect();
        let enclosure = rauzy_gifs(&substitution, &perron, &emb)
            .ok()
            .map(|g| (g.base_points, g.radii.iter().map(|r| r * ENCLOSURE_SLACK).collect()));
        BoundaryContext {
            record: perron.record_index,
            substitution,
            perron,
            emb,
            prefix_edges,
            labels,
            enclosure,
        }
    }

    /// The same context with `u` replaced by `s u`.
    pub fn rescaled(&self, s: i64) -> Self {
        let perron = self.perron.rescaled(&num_rational::BigRational::from_integer(s.into()));
        Self::from_parts(self.substitution.clone(), perron, self.emb.clone())
    }

    fn size(&self) -> usize {
        self.substitution.size()
    }

    fn dim(&self) -> usize {
        self.emb.dim
    }

    /// `|xi|` for the class `z`.
    fn norm(&self, z: &FieldElement) -> f64 {
        self.emb.psi(z).expect("same field").norm()
    }

    /// `2 max |pi l(U)| / (1 - |lambda_1|)`, rounded up.
    pub fn norm_bound(&self) -> f64 {
        let m = self.labels.iter().map(|c| self.norm(c)).fold(0.0, f64::max);
        let l1 = self.perron.lambda1() * (1.0 + 1e-12);
        2.0 * m / (1.0 - l1) * (1.0 + 1e-9)
    }

    /// Smallest of the a priori bound and the bound from the subtile enclosures.
    pub fn search_bound(&self) -> f64 {
        let b = self.norm_bound();
        let Some((c, r)) = &self.enclosure else {
            return b;
        };
        let mut e: f64 = 0.0;
        for i in 0..c.len() {
            for j in 0..c.len() {
                e = e.max((c[i] - c[j]).norm() + r[i] + r[j]);
            }
        }
        b.min(e * (1.0 + 1e-9))
    }

    /// Whether `R(a1)` and `xi + R(a2)` can meet, judged by the enclosing balls.
    fn may_meet(&self, a1: usize, z: &FieldElement, a2: usize) -> bool {
        let Some((c, r)) = &self.enclosure else {
            return true;
        };
        let xi = -self.emb.psi(z).expect("same field");
        (xi - (c[a1] - c[a2])).norm() <= (r[a1] + r[a2]) * (1.0 + 1e-9)
    }

    /// `0 <= z < <l(a), u>`
    pub fn in_xi_sr(&self, z: &FieldElement, a: usize) -> bool {
        z.sign() >= 0 && (&self.perron.u[a] - z).sign() > 0
    }

    /// Lattice translations `<l(a_i) - l(a_{d+1}), u>` for letters `a_i = i`, `a_{d+1} = 0`.
    pub fn xi_lat_basis(&self) -> Result<Vec<FieldElement>> {
        let u = &self.perron.u;
        let basis: Vec<FieldElement> = (1..=self.dim()).map(|i| &u[i] - &u[0]).collect();
        for a in 0..self.size() {
            if integer_coordinates(&basis, &(&u[a] - &u[0])).is_none() {
                return Err(Error::QuotientMapCondition(self.record));
            }
        }
        Ok(basis)
    }

    fn sr_seeds(&self, bound: f64) -> Vec<BoundaryVertex> {
        let basis = module_basis(&self.perron.u);
        let n = basis.len();
        let umax = self.perron.u.iter().map(FieldElement::to_f64).fold(0.0, f64::max);
        let half = umax / 2.0;
        let mut g = DMatrix::zeros(self.dim() + 1, n);
        for (j, w) in basis.iter().enumerate() {
            g[(0, j)] = w.to_f64() / half;
            let p = self.emb.psi(w).expect("same field");
            for i in 0..self.dim() {
                g[(i + 1, j)] = p[i] / bound;
            }
        }
        let mut c = DVector::zeros(self.dim() + 1);
        c[0] = 1.0;
        let mut out = Vec::new();
        for k in lattice_points(&g, &c, 2f64.sqrt() * (1.0 + 1e-9)) {
            let z = combine(&basis, &k, self.record);
            if z.sign() < 0 || self.norm(&z) > bound {
                continue;
            }
            for a2 in 0..self.size() {
                if !self.in_xi_sr(&z, a2) {
                    continue;
                }
                for a1 in 0..self.size() {
                    if (!z.is_zero() || a1 < a2) && self.may_meet(a1, &z, a2) {
                        out.push(BoundaryVertex { a1, z: z.clone(), a2 });
                    }
                }
            }
        }
        out
    }

    fn lat_seeds(&self, bound: f64) -> Result<Vec<BoundaryVertex>> {
        let basis = self.xi_lat_basis()?;
        let d = self.dim();
        let mut g = DMatrix::zeros(d, d);
        for (j, w) in basis.iter().enumerate() {
            let p = self.emb.psi(w)?;
            for i in 0..d {
                g[(i, j)] = p[i];
            }
        }
        let mut out = Vec::new();
        for k in lattice_points(&g, &DVector::zeros(d), bound * (1.0 + 1e-9)) {
            let z = combine(&basis, &k, self.record);
            if z.sign() <= 0 || self.norm(&z) > bound {
                continue;
            }
            for a1 in 0..self.size() {
                for a2 in 0..self.size() {
                    if self.may_meet(a1, &z, a2) {
                            out.push(BoundaryVertex { a1, z: z.clone(), a2 });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Builds the graph: seeds, forward closure under the edge rule, then pruning to infinite walks.
    pub fn build(&self, variant: Variant, rule: EdgeRule) -> Result<BoundaryGraph> {
        let bound = self.search_bound();
        let seeds = match variant {
            Variant::Sr => self.sr_seeds(bound),
            Variant::Lat => self.lat_seeds(bound)?,
        };
        let lambda0 = &self.perron.lambda0;
        let inv = lambda0.inv()?;
        let one = FieldElement::one(self.record)?;
        let inv_minus = (lambda0 - &one).inv()?;
        let inv_plus = (lambda0 + &one).inv()?;
        let n = self.size();
        let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (k, e) in self.prefix_edges.iter().enumerate() {
            out_edges[e.from].push(k);
        }
        let mut index: HashMap<BoundaryVertex, usize> = HashMap::new();
        let mut verts: Vec<BoundaryVertex> = Vec::new();
        let mut queue = VecDeque::new();
        let mut seed_ids = Vec::new();
        for v in seeds {
            if !index.contains_key(&v) {
                index.insert(v.clone(), verts.len());
                seed_ids.push(verts.len());
                queue.push_back(verts.len());
                verts.push(v);
            }
        }
        let mut edges: Vec<(usize, usize, FieldElement)> = Vec::new();
        while let Some(vi) = queue.pop_front() {
            let v = verts[vi].clone();
            for &k1 in &out_edges[v.a1] {
                for &k2 in &out_edges[v.a2] {
                    let (x, y) = (self.prefix_edges[k1].to, self.prefix_edges[k2].to);
                    // d = <l(U2) - l(U1), u>
                    let d = &self.labels[k2] - &self.labels[k1];
                    let dz = &d + &v.z;
                    let label = if dz.sign() >= 0 { self.labels[k1].clone() } else { &self.labels[k2] + &v.z };
                    let targets = match rule {
                        EdgeRule::Derived => {
                            let zp = &dz * &inv;
                            vec![(x, zp.clone(), y), (y, -zp, x)]
                        }
                        EdgeRule::Literal => vec![(x, &d * &inv_minus, y), (y, -(&d * &inv_plus), x)],
                    };
                    for (b1, z, b2) in targets {
                        let Some(w) = in_d(b1, z, b2) else {
                            continue;
                        };
                        if self.norm(&w.z) > bound || !self.may_meet(w.a1, &w.z, w.a2) {
                            continue;
                        }
                        let wi = match index.get(&w) {
                            Some(&i) => i,
                            None => {
                                let i = verts.len();
                                index.insert(w.clone(), i);
                                verts.push(w);
                                queue.push_back(i);
                                i
                            }
                        };
                        edges.push((vi, wi, label.clone()));
                    }
                }
            }
        }
        let explored = verts.len();
        Ok(prune(self.record, variant, rule, bound, explored, verts, edges, seed_ids))
    }
}

/// `[a1, z, a2]` if it lies in `D`: `z > 0`, or `z = 0` and `a1 < a2`.
pub fn in_d(a1: usize, z: FieldElement, a2: usize) -> Option<BoundaryVertex> {
    let s = z.sign();
    (s > 0 || (s == 0 && a1 < a2)).then_some(BoundaryVertex { a1, z, a2 })
}

/// The representative in `D` of `[a1, z, a2]` and its mirror `[a2, -z, a1]`.
pub fn normalize(a1: usize, z: FieldElement, a2: usize) -> Option<BoundaryVertex> {
    match z.sign() {
        1 => Some(BoundaryVertex { a1, z, a2 }),
        -1 => Some(BoundaryVertex { a1: a2, z: -z, a2: a1 }),
        _ => match a1.cmp(&a2) {
            std::cmp::Ordering::Less => Some(BoundaryVertex { a1, z, a2 }),
            std::cmp::Ordering::Greater => Some(BoundaryVertex { a1: a2, z, a2: a1 }),
            std::cmp::Ordering::Equal => None,
        },
    }
}

fn combine(basis: &[FieldElement], k: &[i64], field: i32) -> FieldElement {
    let mut z = FieldElement::zero(field).expect("registry field");
    for (b, &c) in basis.iter().zip(k) {
        if c != 0 {
            z = &z + &b.scale(&num_rational::BigRational::from_integer(c.into()));
        }
    }
    z
}

#[allow(clippy::too_many_arguments)]
fn prune(
    record: i32,
    variant: Variant,
    rule: EdgeRule,
    bound: f64,
    explored: usize,
    verts: Vec<BoundaryVertex>,
    mut edges: Vec<(usize, usize, FieldElement)>,
    seeds: Vec<usize>,
) -> BoundaryGraph {
    let n = verts.len();
    // edges are identified by (source, target, label)
    let mut seen = std::collections::HashSet::new();
    edges.retain(|e| seen.insert(e.clone()));
    let mut alive = vec![true; n];
    let mut outdeg = vec![0usize; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (f, t, _) in &edges {
        outdeg[*f] += 1;
        preds[*t].push(*f);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| outdeg[v] == 0).collect();
    while let Some(v) = stack.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &p in &preds[v] {
            outdeg[p] -= 1;
            if outdeg[p] == 0 && alive[p] {
                stack.push(p);
            }
        }
    }
    // reachability from surviving seeds
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (f, t, _) in &edges {
        if alive[*f] && alive[*t] {
            succ[*f].push(*t);
        }
    }
    let mut reach = vec![false; n];
    let mut q: Vec<usize> = seeds.iter().copied().filter(|&s| alive[s]).collect();
    for &s in &q {
        reach[s] = true;
    }
    while let Some(v) = q.pop() {
        for &w in &succ[v] {
            if !reach[w] {
                reach[w] = true;
                q.push(w);
            }
        }
    }
    let mut keep: Vec<usize> = (0..n).filter(|&v| reach[v]).collect();
    keep.sort_by(|&a, &b| {
        let (x, y) = (&verts[a], &verts[b]);
        (x.a1, x.a2, x.z.coeffs()).cmp(&(y.a1, y.a2, y.z.coeffs()))
    });
    let mut new_id = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        new_id[v] = i;
    }
    let mut out_edges: Vec<BoundaryEdge> = edges
        .into_iter()
        .filter(|(f, t, _)| reach[*f] && reach[*t])
        .map(|(f, t, label)| BoundaryEdge {
            from: new_id[f],
            to: new_id[t],
            label,
        })
        .collect();
    out_edges.sort_by(|a, b| (a.from, a.to, a.label.coeffs()).cmp(&(b.from, b.to, b.label.coeffs())));
    let mut seed_ids: Vec<usize> = seeds.iter().filter(|&&s| reach[s]).map(|&s| new_id[s]).collect();
    seed_ids.sort_unstable();
    BoundaryGraph {
        record,
        variant,
        rule,
        vertices: keep.iter().map(|&v| verts[v].clone()).collect(),
        edges: out_edges,
        seeds: seed_ids,
        bound,
        explored,
    }
}

impl BoundaryGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// `count[i][j]` = number of edges `i -> j`.
    pub fn adjacency(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut m = vec![vec![0i64; n]; n];
        for e in &self.edges {
            m[e.from][e.to] += 1;
        }
        m
    }

    pub fn dominant_eigenvalue(&self) -> Result<DominantEigenvalue> {
        graph_dominant_eigenvalue(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs = |z: &FieldElement| -> Vec<String> { z.coeffs().iter().map(|c| c.to_string()).collect() };
        serde_json::json!({
            "record": self.record,
            "variant": self.variant,
            "rule": self.rule,
            "bound": self.bound,
            "vertices": self.vertices.iter().map(|v| serde_json::json!([v.a1, coeffs(&v.z), v.a2])).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|e| serde_json::json!([e.from, e.to, coeffs(&e.label)])).collect::<Vec<_>>(),
            "seeds": self.seeds,
        })
    }

    pub fn write_adjacency_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        for row in self.adjacency() {
            let line: Vec<String> = row.iter().map(i64::to_string).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Exact characteristic polynomial of the adjacency counts and its dominant root.
pub fn graph_dominant_eigenvalue(g: &BoundaryGraph) -> Result<DominantEigenvalue> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    dominant_eigenvalue(&g.adjacency(), ROOT_BITS)
}

pub fn build_boundary_graph(index: i32, variant: Variant) -> Result<BoundaryGraph> {
    BoundaryContext::new(index)?.build(variant, EdgeRule::Derived)
}

/// Isolating interval of `lambda0`, the dominant root of its minimal polynomial.
pub fn lambda0_interval(perron: &PerronData, bits: u32) -> Result<RootInterval> {
    RealRoots::new(&perron.lambda_poly)
        .largest(bits)
        .ok_or_else(|| Error::EigenvectorCheck("lambda0 has no real root".into()))
}

/// Whether the largest root of `p` lies strictly below `lambda0`, by refining disjoint intervals.
pub fn root_below_lambda0(p: &IntPoly, perron: &PerronData) -> Result<bool> {
    let rp = RealRoots::new(p);
    let rl = RealRoots::new(&perron.lambda_poly);
    let mut bits = 32;
    let mut a = rp.largest(bits).ok_or(Error::EmptyGraph)?;
    let mut b = rl.largest(bits).ok_or(Error::EmptyGraph)?;
    loop {
        if a.disjoint(&b) {
            return Ok(a.hi < b.lo);
        }
        if bits >= COMPARE_CAP_BITS {
            return Err(Error::Undecided(bits));
        }
        bits *= 2;
        rp.refine(&mut a, bits);
        rl.refine(&mut b, bits);
    }
}

/// `mu < lambda0` for the given variant's graph.
pub fn tiling_property(index: i32, variant: Variant) -> Result<bool> {
    let ctx = BoundaryContext::new(index)?;
    let g = ctx.build(variant, EdgeRule::Derived)?;
    let mu = graph_dominant_eigenvalue(&g)?;
    root_below_lambda0(&mu.poly, &ctx.perron)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub record: i32,
    pub dim: usize,
    pub lambda0: f64,
    pub mu_sr: f64,
    /// ascending coefficients of the polynomial carrying `mu_sr`, powers of `t` removed
    pub mu_sr_poly: Vec<String>,
    pub lambda_1: f64,
    pub lambda_d: f64,
    pub box_dimension: f64,
    /// `|lambda_1| = |lambda_d|`, so the Hausdorff dimension equals the box dimension
    pub hausdorff_equal: bool,
    pub sr_vertices: usize,
    pub sr_tiling: bool,
    pub mu_lat: Option<f64>,
    pub lat_tiling: Option<bool>,
}

/// `d + (log lambda0 - log mu) / log |lambda_d|`
pub fn box_dimension(d: usize, lambda0: f64, mu: f64, lambda_d: f64) -> f64 {
    d as f64 + (lambda0.ln() - mu.ln()) / lambda_d.ln()
}

pub fn dimension_report(index: i32) -> Result<DimensionReport> {
    let ctx = BoundaryContext::new(index)?;
    let g = ctx.build(Variant::Sr, EdgeRule::Derived)?;
    let mu = graph_dominant_eigenvalue(&g)?;
    let lambda0 = lambda0_interval(&ctx.perron, ROOT_BITS)?.mid_f64();
    let sr_tiling = root_below_lambda0(&mu.poly, &ctx.perron)?;
    if !sr_tiling {
        return Err(Error::NoTilingProperty { mu: mu.value, lambda0 });
    }
    let (mu_lat, lat_tiling) = match ctx.build(Variant::Lat, EdgeRule::Derived) {
        Ok(gl) => {
            let ml = graph_dominant_eigenvalue(&gl)?;
            (Some(ml.value), Some(root_below_lambda0(&ml.poly, &ctx.perron)?))
        }
        Err(Error::QuotientMapCondition(_)) => (None, None),
        Err(e) => return Err(e),
    };
    let (l1, ld) = (ctx.perron.lambda1(), ctx.perron.lambda_d());
    Ok(DimensionReport {
        record: index,
        dim: ctx.dim(),
        lambda0,
        mu_sr: mu.value,
        mu_sr_poly: mu.poly.coeffs().iter().skip_while(|c| c.is_zero()).map(|c| c.to_string()).collect(),
        lambda_1: l1,
        lambda_d: ld,
        box_dimension: box_dimension(ctx.dim(), lambda0, mu.value, ld),
        hausdorff_equal: (l1 - ld).abs() < 1e-9,
        sr_vertices: g.len(),
        sr_tiling,
        mu_lat,
        lat_tiling,
    })
}

#[cfg(test)]
mod tests;
