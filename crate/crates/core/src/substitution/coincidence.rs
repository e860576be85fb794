use super::{abelianize, PrefixGraph, Substitution};
use crate::numberfield::FieldElement;
use std::collections::HashSet;
use std::hash::Hash;

const STATE_CAP: usize = 2_000_000;

/// First level at which two letters coincide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWitness {
    pub a: usize,
    pub b: usize,
    pub k: usize,
    pub letter: usize,
    /// the common letter sits at the very start of both iterates
    pub at_start: bool,
}

/// Outcome of a bounded coincidence search. A failed search means "not found up to `k_max`".
#[derive(Clone, Debug)]
pub struct Coincidence {
    pub holds: bool,
    pub k_max: usize,
    pub witnesses: Vec<PairWitness>,
    pub missing: Vec<(usize, usize)>,
    /// the state space hit the cap before `k_max`
    pub truncated: bool,
}

impl Coincidence {
    /// Largest witness level over all pairs.
    pub fn witness_k(&self) -> Option<usize> {
        self.witnesses.iter().map(|w| w.k).max()
    }

    /// The letter shared by every witness, if there is one.
    pub fn common_letter(&self) -> Option<usize> {
        let first = self.witnesses.first()?.letter;
        self.witnesses.iter().all(|w| w.letter == first).then_some(first)
    }
}

/// Tracks `(difference, c1, c2, both prefixes empty)` for occurrences in `sigma^k(a)` and `sigma^k(b)`.
fn search<D, F, P, Z>(
    s: &Substitution,
    k_max: usize,
    zero: D,
    step: F,
    keep: P,
    is_zero: Z,
) -> Coincidence
where
    D: Clone + Eq + Hash,
    F: Fn(&D, &[usize], &[usize]) -> D,
    P: Fn(&D) -> bool,
    Z: Fn(&D) -> bool,
{
    let g: PrefixGraph = s.prefix_graph();
    let n = s.size();
    let mut into: Vec<Vec<(usize, &[usize])>> = vec![Vec::new(); n];
    for e in &g.edges {
        into[e.to].push((e.from, &e.prefix));
    }
    let mut witnesses = Vec::new();
    let mut missing = Vec::new();
    let mut truncated = false;
    for a in 0..n {
        for b in a + 1..n {
            let mut level: HashSet<(D, usize, usize, bool)> = HashSet::new();
            level.insert((zero.clone(), a, b, true));
            let mut found = None;
            for k in 1..=k_max {
                let mut next = HashSet::new();
                for (d, c1, c2, start) in &level {
                    for &(e1, u1) in &into[*c1] {
                        for &(e2, u2) in &into[*c2] {
                            let nd = step(d, u1, u2);
                            if keep(&nd) {
                                next.insert((nd, e1, e2, *start && u1.is_empty() && u2.is_empty()));
                            }
                        }
                    }
                }
                let mut hits: Vec<(bool, usize)> = next
                    .iter()
                    .filter(|(d, c1, c2, _)| c1 == c2 && is_zero(d))
                    .map(|(_, c, _, st)| (!*st, *c))
                    .collect();
                hits.sort();
                if let Some(&(not_start, letter)) = hits.first() {
                    found = Some(PairWitness {
                        a,
                        b,
                        k,
                        letter,
                        at_start: !not_start,
                    });
                    break;
                }
                if next.len() > STATE_CAP {
                    truncated = true;
                    break;
                }
                level = next;
            }
            match found {
                Some(w) => witnesses.push(w),
                None => missing.push((a, b)),
            }
        }
    }
    Coincidence {
        holds: missing.is_empty(),
        k_max,
        witnesses,
        missing,
        truncated,
    }
}

/// Numeric left Perron vector and eigenvalue of the incidence matrix.
fn perron_f64(m: &[Vec<i64>]) -> (Vec<f64>, f64) {
    let n = m.len();
    let mut u = vec![1.0; n];
    let mut lambda = 1.0;
    for _ in 0..2000 {
        let mut w = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                w[j] += u[i] * m[i][j] as f64;
            }
        }
        // damped iteration copes with periodic components
        for j in 0..n {
            w[j] = 0.5 * (w[j] + u[j]);
        }
        let s: f64 = w.iter().sum();
        lambda = 2.0 * s / u.iter().sum::<f64>() - 1.0;
        u = w.iter().map(|x| x / s).collect();
    }
    (u, lambda)
}

/// Bounded search for strong coincidence: some common letter at equal abelianized prefixes.
pub fn strong_coincidence(s: &Substitution, k_max: usize) -> Coincidence {
    let n = s.size();
    let m = s.incidence_matrix();
    let (u, lambda) = perron_f64(&m);
    let dot = |v: &[i64]| v.iter().zip(&u).map(|(a, b)| *a as f64 * b).sum::<f64>();
    let g = s.prefix_graph();
    let mut cmax: f64 = 0.0;
    for e1 in &g.edges {
        for e2 in &g.edges {
            let d: Vec<i64> = abelianize(&e1.prefix, n)
                .iter()
                .zip(abelianize(&e2.prefix, n))
                .map(|(x, y)| x - y)
                .collect();
            cmax = cmax.max(dot(&d).abs());
        }
    }
    // beyond this the dominant coordinate grows without bound and never returns to zero
    let bound = if lambda > 1.0 + 1e-9 {
        cmax / (lambda - 1.0) * (1.0 + 1e-6) + 1e-9
    } else {
        f64::INFINITY
    };
    search(
        s,
        k_max,
        vec![0i64; n],
        |v: &Vec<i64>, u1, u2| {
            let mut w: Vec<i64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * v[j]).sum()).collect();
            for &c in u1 {
                w[c] += 1;
            }
            for &c in u2 {
                w[c] -= 1;
            }
            w
        },
        |v| dot(v).abs() <= bound,
        |v| v.iter().all(|&x| x == 0),
    )
}

/// Bounded search for weak coincidence: common letter at prefixes with equal projection,
/// decided exactly through `<l(P1) - l(P2), u>` for a left eigenvector `u`.
pub fn weak_coincidence(s: &Substitution, u: &[FieldElement], k_max: usize) -> Coincidence {
    let n = s.size();
    let m = s.incidence_matrix();
    let field = u[0].field_id();
    let zero = FieldElement::zero(field).expect("field of u");
    // lambda_0 = (u M)_j / u_j
    let j = (0..n).find(|&j| !u[j].is_zero()).expect("nonzero eigenvector");
    let mut um = zero.clone();
    for i in 0..n {
        if m[i][j] != 0 {
            um = &um + &u[i].scale(&num_rational::BigRational::from_integer(m[i][j].into()));
        }
    }
    let lambda0 = um.checked_div(&u[j]).expect("nonzero entry");
    let cu = |w: &[usize]| w.iter().fold(zero.clone(), |acc, &c| &acc + &u[c]);
    let g = s.prefix_graph();
    let labels: Vec<f64> = g.edges.iter().map(|e| cu(&e.prefix).to_f64()).collect();
    let spread = labels.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - labels.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = spread / (lambda0.to_f64() - 1.0) * (1.0 + 1e-6) + 1e-9;
    search(
        s,
        k_max,
        zero.clone(),
        |z: &FieldElement, u1, u2| &(&(&lambda0 * z) + &cu(u1)) - &cu(u2),
        |z| z.to_f64().abs() <= bound,
        |z| z.is_zero(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numberfield::registry_lookup;
    use crate::spectral::perron_data;
    use crate::substitution::{substitution_for, theta_q, zeta_p};

    #[test]
    fn zeta_starts_with_last_letter() {
        for p in [3, 4, 6] {
            let c = strong_coincidence(&zeta_p(p).unwrap(), p - 1);
            assert!(c.holds, "p={p}");
            assert_eq!(c.common_letter(), Some(p - 1));
            assert!(c.witnesses.iter().all(|w| w.at_start && w.k <= p - 1));
            let direct = zeta_p(p).unwrap();
            for a in 0..p {
                assert_eq!(direct.iterate(a, p - 1).unwrap()[0], p - 1);
            }
        }
    }

    #[test]
    fn theta_coincides_within_2q() {
        for q in [3, 4, 5] {
            let c = strong_coincidence(&theta_q(q).unwrap(), 2 * q);
            assert!(c.holds, "q={q}");
            assert!(c.witness_k().unwrap() <= 2 * q);
            for a in 0..2 * q {
                assert_eq!(theta_q(q).unwrap().iterate(a, 2 * q).unwrap()[0], 2 * q - 1);
            }
        }
    }

    #[test]
    fn strong_implies_weak() {
        let rec = registry_lookup(1).unwrap();
        let (s, _) = substitution_for(rec).unwrap();
        let pd = perron_data(&s, rec).unwrap();
        assert!(strong_coincidence(&s, 9).holds);
        assert!(weak_coincidence(&s, &pd.u, 9).holds);
    }

    #[test]
    fn trivial_identity_fails() {
        let s = Substitution::new(vec![vec![0], vec![1]]).unwrap();
        let c = strong_coincidence(&s, 4);
        assert!(!c.holds);
        assert_eq!(c.missing, vec![(0, 1)]);
    }
}
