use super::char_poly;
use crate::error::{Error, Result};
use crate::poly::{IntPoly, RealRoots, RootInterval};

/// Strongly connected components of a digraph on `0..n`, in reverse topological order.
pub fn strongly_connected_components(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Largest real eigenvalue of a nonnegative integer matrix, with the polynomial certifying it.
#[derive(Clone, Debug)]
pub struct DominantEigenvalue {
    pub value: f64,
    pub interval: RootInterval,
    /// characteristic polynomial of the component(s) carrying the eigenvalue
    pub poly: IntPoly,
    /// full `det(tI - M)`, assembled from the components
    pub char_poly: IntPoly,
    pub component_sizes: Vec<usize>,
}

fn spectral_radius_f64(m: &[Vec<i64>]) -> f64 {
    let n = m.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut r = 0.0;
    for _ in 0..4000 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            for (j, &x) in m[i].iter().enumerate() {
                if x != 0 {
                    w[i] += x as f64 * v[j];
                }
            }
        }
        for i in 0..n {
            w[i] = 0.5 * (w[i] + v[i]);
        }
        let s: f64 = w.iter().sum();
        if s == 0.0 {
            return 0.0;
        }
        let nr = 2.0 * s - 1.0;
        v = w.iter().map(|x| x / s).collect();
        if (nr - r).abs() < 1e-13 {
            return nr;
        }
        r = nr;
    }
    r
}

/// Exact characteristic polynomial and dominant root of `count[i][j]` (edges `i -> j`).
pub fn dominant_eigenvalue(count: &[Vec<i64>], bits: u32) -> Result<DominantEigenvalue> {
    let n = count.len();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let adj: Vec<Vec<usize>> = count
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, &c)| c != 0).map(|(j, _)| j).collect())
        .collect();
    let comps = strongly_connected_components(n, &adj);
    let mut full = IntPoly::from_i64(&[1]);
    let mut trivial = 0;
    let mut polys: Vec<(f64, IntPoly, usize)> = Vec::new();
    for comp in &comps {
        if comp.len() == 1 && count[comp[0]][comp[0]] == 0 {
            trivial += 1;
            continue;
        }
        let sub: Vec<Vec<i64>> = comp
            .iter()
            .map(|&i| comp.iter().map(|&j| count[i][j]).collect())
            .collect();
        let r = spectral_radius_f64(&sub);
        let p = char_poly(&sub);
        full = full.mul(&p);
        polys.push((r, p, comp.len()));
    }
    full = full.mul(&IntPoly::monomial(trivial));
    let rmax = polys.iter().map(|x| x.0).fold(0.0, f64::max);
    if polys.is_empty() {
        return Ok(DominantEigenvalue {
            value: 0.0,
            interval: RootInterval::exact(num_rational::BigRational::from_integer(0.into())),
            poly: IntPoly::monomial(1),
            char_poly: full,
            component_sizes: vec![1; n],
        });
    }
    let mut best: Option<(RootInterval, IntPoly)> = None;
    for (r, p, _) in polys {
        if r < rmax - 1e-6 * rmax.max(1.0) {
            continue;
        }
        let Some(iv) = RealRoots::new(&p).largest(bits) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some((b, _)) => iv.lo > b.hi || (!iv.disjoint(b) && iv.mid_f64() > b.mid_f64()),
        };
        if better {
            best = Some((iv, p));
        }
    }
    let (interval, poly) = best.ok_or(Error::EmptyGraph)?;
    let mut sizes: Vec<usize> = comps.iter().map(Vec::len).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(DominantEigenvalue {
        value: interval.mid_f64(),
        interval,
        poly,
        char_poly: full,
        component_sizes: sizes,
    })
}
