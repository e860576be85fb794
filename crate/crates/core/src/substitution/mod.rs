//! Substitutions, abelianization, prefix graphs, the four families and coincidence checks.

mod coincidence;
mod families;

pub use coincidence::{strong_coincidence, weak_coincidence, Coincidence, PairWitness};
pub use families::{substitution_for, theta_prime_q, theta_q, zeta_p, zeta_prime_p, Contraction, Correspondence, Family, SubtileFormula};

use crate::error::{Error, Result};
use serde::Serialize;

pub type Word = Vec<usize>;

/// A non-erasing substitution on the alphabet `{0, ..., m}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Substitution {
    images: Vec<Word>,
}

/// Letter-count vector `l(W)`.
pub type AbelianVector = Vec<i64>;

/// One edge `a -U-> b` of the prefix graph: `sigma(b) = U a V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrefixEdge {
    pub from: usize,
    pub prefix: Word,
    pub to: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PrefixGraph {
    pub size: usize,
    pub edges: Vec<PrefixEdge>,
}

impl Substitution {
    pub fn new(images: Vec<Word>) -> Result<Self> {
        let size = images.len();
        for img in &images {
            if img.is_empty() {
                return Err(Error::Unsupported("substitution must be non-erasing".into()));
            }
            if let Some(&letter) = img.iter().find(|&&c| c >= size) {
                return Err(Error::InvalidLetter { letter, size });
            }
        }
        Ok(Substitution { images })
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn image(&self, a: usize) -> &[usize] {
        &self.images[a]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    fn check_word(&self, w: &[usize]) -> Result<()> {
        match w.iter().find(|&&c| c >= self.size()) {
            Some(&letter) => Err(Error::InvalidLetter {
                letter,
                size: self.size(),
            }),
            None => Ok(()),
        }
    }

    pub fn apply(&self, w: &[usize]) -> Result<Word> {
        self.check_word(w)?;
        Ok(w.iter().flat_map(|&c| self.images[c].iter().copied()).collect())
    }

    /// `sigma^k(a)`
    pub fn iterate(&self, a: usize, k: usize) -> Result<Word> {
        let mut w = vec![a];
        self.check_word(&w)?;
        for _ in 0..k {
            w = self.apply(&w)?;
        }
        Ok(w)
    }

    pub fn abelianize(&self, w: &[usize]) -> AbelianVector {
        abelianize(w, self.size())
    }

    /// Column `j` is `l(sigma(j))`.
    pub fn incidence_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.size();
        let mut m = vec![vec![0i64; n]; n];
        for (j, img) in self.images.iter().enumerate() {
            for &c in img {
                m[c][j] += 1;
            }
        }
        m
    }

    /// Some power up to `(m+1)^2` of the incidence matrix is positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.size();
        let base: Vec<Vec<bool>> = self
            .incidence_matrix()
            .iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect();
        let mut p = base.clone();
        for _ in 0..n * n {
            if p.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if p[i][k] {
                        for j in 0..n {
                            next[i][j] |= base[k][j];
                        }
                    }
                }
            }
            p = next;
        }
        false
    }

    pub fn prefix_graph(&self) -> PrefixGraph {
        let mut edges = Vec::new();
        for (b, img) in self.images.iter().enumerate() {
            for (j, &a) in img.iter().enumerate() {
                edges.push(PrefixEdge {
                    from: a,
                    prefix: img[..j].to_vec(),
                    to: b,
                });
            }
        }
        PrefixGraph {
            size: self.size(),
            edges,
        }
    }

    /// `{alphabet, images}` as JSON.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "alphabet": self.size(), "images": self.images })
    }
}

pub fn abelianize(w: &[usize], size: usize) -> AbelianVector {
    let mut v = vec![0i64; size];
    for &c in w {
        v[c] += 1;
    }
    v
}

impl PrefixGraph {
    /// `count[a][b]` = number of edges `a -> b`.
    pub fn adjacency_counts(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.size]; self.size];
        for e in &self.edges {
            m[e.from][e.to] += 1;
        }
        m
    }

    pub fn edges_from(&self, a: usize) -> impl Iterator<Item = &PrefixEdge> {
        self.edges.iter().filter(move |e| e.from == a)
    }

    /// Distinct prefixes, shortest first.
    pub fn prefixes(&self) -> Vec<Word> {
        let mut p: Vec<Word> = self.edges.iter().map(|e| e.prefix.clone()).collect();
        p.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        p.dedup();
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::char_poly;
    use proptest::prelude::*;

    #[test]
    fn apply_and_iterate() {
        let z = zeta_p(3).unwrap();
        assert_eq!(z.apply(&[0]).unwrap(), vec![1, 0]);
        assert_eq!(z.iterate(2, 0).unwrap(), vec![2]);
        assert_eq!(z.iterate(0, 2).unwrap(), vec![2, 1, 0]);
        assert!(matches!(z.apply(&[3]), Err(Error::InvalidLetter { letter: 3, size: 3 })));
        assert!(Substitution::new(vec![vec![0], vec![]]).is_err());
    }

    #[test]
    fn incidence_char_poly() {
        let m = zeta_p(3).unwrap().incidence_matrix();
        assert_eq!(char_poly(&m).to_i64_vec().unwrap(), vec![-1, 1, -2, 1]);
    }

    #[test]
    fn theta_blocks() {
        let m = theta_q(3).unwrap().incidence_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[i][j], m[i + 3][j + 3]);
                assert_eq!(m[i + 3][j], m[i][j + 3]);
            }
        }
    }

    #[test]
    fn unimodular_instances() {
        let subs = [
            zeta_p(3).unwrap(),
            zeta_p(4).unwrap(),
            theta_q(3).unwrap(),
            theta_q(4).unwrap(),
            theta_q(5).unwrap(),
            theta_prime_q(3).unwrap(),
            theta_prime_q(4).unwrap(),
            theta_prime_q(5).unwrap(),
            zeta_prime_p(3).unwrap(),
            zeta_prime_p(4).unwrap(),
        ];
        for s in &subs {
            let det = char_poly(&s.incidence_matrix()).coeffs()[0].clone();
            assert!(det == 1.into() || det == (-1).into());
            assert!(s.is_primitive());
        }
        assert!(!Substitution::new(vec![vec![0], vec![1]]).unwrap().is_primitive());
    }

    #[test]
    fn zeta_prefix_graph() {
        let g = zeta_p(3).unwrap().prefix_graph();
        assert_eq!(g.edges.len(), 5);
        assert!(g.edges.contains(&PrefixEdge { from: 2, prefix: vec![], to: 1 }));
        assert!(g.edges.contains(&PrefixEdge { from: 0, prefix: vec![1], to: 0 }));
        assert!(g.edges.contains(&PrefixEdge { from: 2, prefix: vec![], to: 2 }));
        assert!(g.edges.contains(&PrefixEdge { from: 0, prefix: vec![2], to: 2 }));
        assert!(g.edges.contains(&PrefixEdge { from: 1, prefix: vec![], to: 0 }));
    }

    #[test]
    fn family_prefixes() {
        let g = theta_q(4).unwrap().prefix_graph();
        assert_eq!(g.prefixes(), vec![vec![], vec![4], vec![7]]);
        let g = zeta_prime_p(4).unwrap().prefix_graph();
        assert_eq!(g.prefixes(), vec![vec![], vec![0], vec![2], vec![0, 3], vec![2, 0], vec![0, 3, 0]]);
    }

    #[test]
    fn adjacency_equals_incidence() {
        for s in [theta_q(5).unwrap(), zeta_prime_p(3).unwrap(), theta_prime_q(4).unwrap()] {
            assert_eq!(s.prefix_graph().adjacency_counts(), s.incidence_matrix());
            let total: usize = s.images().iter().map(Vec::len).sum();
            assert_eq!(s.prefix_graph().edges.len(), total);
        }
    }

    #[test]
    fn json_shape() {
        let j = zeta_p(3).unwrap().to_json();
        assert_eq!(j["alphabet"], 3);
        assert_eq!(j["images"][0], serde_json::json!([1, 0]));
    }

    fn square(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let n = m.len();
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| m[i][k] * m[k][j]).sum()).collect()).collect()
    }

    #[test]
    fn even_primed_maps_square_the_base_matrix() {
        // theta'_q even: M = (M+ + M-)^2 where M+ + M- is the incidence of k -> k+1, q-1 -> 0(q-1)
        for q in [4usize, 6] {
            let mut base = vec![vec![0i64; q]; q];
            for k in 0..q - 1 {
                base[k + 1][k] = 1;
            }
            base[0][q - 1] = 1;
            base[q - 1][q - 1] = 1;
            assert_eq!(theta_prime_q(q).unwrap().incidence_matrix(), square(&base));
        }
        for p in [4usize, 6] {
            let z = zeta_p(p).unwrap().incidence_matrix();
            assert_eq!(zeta_prime_p(p).unwrap().incidence_matrix(), square(&z));
        }
    }

    fn subs() -> impl Strategy<Value = Substitution> {
        prop::sample::select(vec![
            zeta_p(3).unwrap(),
            theta_q(5).unwrap(),
            theta_prime_q(3).unwrap(),
            theta_prime_q(4).unwrap(),
            zeta_prime_p(3).unwrap(),
        ])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn abelianization_commutes(s in subs(), raw in prop::collection::vec(0usize..100, 0..30)) {
            let w: Word = raw.iter().map(|c| c % s.size()).collect();
            let m = s.incidence_matrix();
            let l = s.abelianize(&w);
            let lw = s.abelianize(&s.apply(&w).unwrap());
            let ml: Vec<i64> = (0..s.size()).map(|i| (0..s.size()).map(|j| m[i][j] * l[j]).sum()).collect();
            prop_assert_eq!(lw, ml);
        }
    }
}
