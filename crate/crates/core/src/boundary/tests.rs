use super::*;
use crate::numberfield::beta_of;
use proptest::prelude::*;

fn desc(c: &[i64]) -> IntPoly {
    let mut v = c.to_vec();
    v.reverse();
    IntPoly::from_i64(&v)
}

fn zeta3_poly() -> IntPoly {
    desc(&[1, 0, -2, 0, 1, -1])
}

fn largest_root(p: &IntPoly) -> f64 {
    RealRoots::new(p).largest(60).unwrap().mid_f64()
}

fn known_polys() -> Vec<(i32, IntPoly)> {
    vec![
        (1, zeta3_poly()),
        (3, desc(&[1, 0, 0, 0, 0, -2, 0, -1])),
        (-1, desc(&[1, 0, 0, -1, 0, -4, -4, -1, -4, -4, 1])),
        (-3, desc(&[1, 0, 0, -1, 0, 0, 0, -1, 0, -2, -1])),
        (5, desc(&[1, 0, 0, 0, 0, 0, -1, -1, 0, -2, 0, 0, 0, -1])),
        (
            -5,
            desc(&[1, -1, 1, -1, 1, -2, 1, -2, 2, -3, 1, 0, 1, -2, 0, -3, -2, -2, -1, -1, 1, 1]),
        ),
        (4, desc(&[1, 0, 0, 0, 0, 0, 0, -4, 0, -2, -2, 0, -2, 0, 0, -1])),
        (
            -4,
            desc(&[
                1, -2, 1, 0, 0, -6, 2, 0, 6, -2, 11, 1, 8, 0, -14, -12, -5, 9, 14, 8, -1, -13, 4, -1, 0, -1, 1, -2, 1,
            ]),
        ),
    ]
}

#[test]
fn xi_sr_membership() {
    let ctx = BoundaryContext::new(1).unwrap();
    let zero = FieldElement::zero(1).unwrap();
    for a in 0..3 {
        assert!(ctx.in_xi_sr(&zero, a));
        assert!(!ctx.in_xi_sr(&ctx.perron.u[a], a));
    }
    let beta = beta_of(registry_lookup(1).unwrap()).unwrap();
    assert!(!ctx.in_xi_sr(&beta, 0));
}

#[test]
fn lattice_bases() {
    let ctx = BoundaryContext::new(1).unwrap();
    let a = FieldElement::alpha(1).unwrap();
    let b = beta_of(registry_lookup(1).unwrap()).unwrap();
    // classes z with translation -Psi(z) = Psi(beta - alpha^k)
    assert_eq!(ctx.xi_lat_basis().unwrap(), vec![&a - &b, &(&a * &a) - &b]);

    let ctx = BoundaryContext::new(3).unwrap();
    let a = FieldElement::alpha(3).unwrap();
    let one = FieldElement::one(3).unwrap();
    assert_eq!(ctx.xi_lat_basis().unwrap(), vec![&a - &one, &(&a * &a) - &one]);

    for i in [5, -5] {
        let ctx = BoundaryContext::new(i).unwrap();
        assert!(matches!(ctx.xi_lat_basis(), Err(Error::QuotientMapCondition(j)) if j == i));
        assert!(matches!(ctx.build(Variant::Lat, EdgeRule::Derived), Err(Error::QuotientMapCondition(_))));
    }
}

#[test]
fn norm_bound_is_finite_and_dominates_search_bound() {
    for i in [1, 3, -1] {
        let ctx = BoundaryContext::new(i).unwrap();
        let b = ctx.norm_bound();
        assert!(b.is_finite() && b > 0.0);
        assert!(ctx.search_bound() <= b);
    }
}

#[test]
fn normalization_and_mirror() {
    let z = FieldElement::from_i64(1, &[-1, 1, 0]).unwrap();
    assert!(z.sign() > 0);
    let v = normalize(2, z.clone(), 0).unwrap();
    assert_eq!(v, normalize(0, -&z, 2).unwrap());
    assert_eq!(v.a1, 2);
    let zero = FieldElement::zero(1).unwrap();
    assert_eq!(normalize(2, zero.clone(), 1).unwrap().a1, 1);
    assert!(normalize(1, zero.clone(), 1).is_none());
    assert!(in_d(2, zero, 1).is_none());
}

#[test]
fn sr_polynomials() {
    for (i, p) in known_polys() {
        let g = build_boundary_graph(i, Variant::Sr).unwrap();
        let mu = g.dominant_eigenvalue().unwrap();
        assert!((mu.value - largest_root(&p)).abs() < 1e-9, "record {i}");
        assert!(mu.char_poly.div_exact(&p).is_some(), "record {i}");
    }
}

#[test]
fn graph_invariants() {
    for i in [1, -3] {
        let ctx = BoundaryContext::new(i).unwrap();
        for variant in [Variant::Sr, Variant::Lat] {
            let g = ctx.build(variant, EdgeRule::Derived).unwrap();
            let mut out = vec![0; g.len()];
            let mut succ = vec![Vec::new(); g.len()];
            for e in &g.edges {
                out[e.from] += 1;
                succ[e.from].push(e.to);
            }
            assert!(out.iter().all(|&d| d > 0));
            let mut seen = vec![false; g.len()];
            let mut stack = g.seeds.clone();
            while let Some(v) = stack.pop() {
                if !std::mem::replace(&mut seen[v], true) {
                    stack.extend(&succ[v]);
                }
            }
            assert!(seen.iter().all(|&s| s));
            for v in &g.vertices {
                assert_eq!(normalize(v.a1, v.z.clone(), v.a2).as_ref(), Some(v));
                assert_eq!(normalize(v.a2, -&v.z, v.a1).as_ref(), Some(v));
                assert!(ctx.norm(&v.z) <= g.bound);
            }
            let keys: std::collections::HashSet<_> = g.vertices.iter().collect();
            assert_eq!(keys.len(), g.len());
        }
    }
}

#[test]
fn lat_and_sr_agree() {
    for i in [1, 3, -1, -3] {
        let ctx = BoundaryContext::new(i).unwrap();
        let sr = ctx.build(Variant::Sr, EdgeRule::Derived).unwrap().dominant_eigenvalue().unwrap();
        let lat = ctx.build(Variant::Lat, EdgeRule::Derived).unwrap().dominant_eigenvalue().unwrap();
        assert!((sr.value - lat.value).abs() < 1e-9, "record {i}");
    }
}

#[test]
fn doubling_u_gives_the_same_matrix() {
    let ctx = BoundaryContext::new(1).unwrap();
    let g = ctx.build(Variant::Sr, EdgeRule::Derived).unwrap();
    let g2 = ctx.rescaled(2).build(Variant::Sr, EdgeRule::Derived).unwrap();
    assert_eq!(g.adjacency(), g2.adjacency());
    let two = num_rational::BigRational::from_integer(2.into());
    for (v, w) in g.vertices.iter().zip(&g2.vertices) {
        assert_eq!((v.a1, v.z.scale(&two), v.a2), (w.a1, w.z.clone(), w.a2));
    }
}

#[test]
fn enclosure_filter_does_not_change_the_graph() {
    let ctx = BoundaryContext::new(1).unwrap();
    let mut bare = ctx.clone();
    bare.enclosure = None;
    let a = ctx.build(Variant::Sr, EdgeRule::Derived).unwrap();
    let b = bare.build(Variant::Sr, EdgeRule::Derived).unwrap();
    assert_eq!(a.vertices, b.vertices);
    assert_eq!(a.edges, b.edges);
    assert!(b.explored > a.explored);
}

#[test]
fn literal_edge_rule_misses_the_polynomial() {
    let ctx = BoundaryContext::new(1).unwrap();
    let target = largest_root(&zeta3_poly());
    match ctx.build(Variant::Sr, EdgeRule::Literal).unwrap().dominant_eigenvalue() {
        Ok(mu) => assert!((mu.value - target).abs() > 1e-3),
        Err(e) => assert!(matches!(e, Error::EmptyGraph)),
    }
}

#[test]
fn tiling_property_planar() {
    for i in [1, 3, -1, -3] {
        assert!(tiling_property(i, Variant::Sr).unwrap(), "record {i}");
    }
}

#[test]
fn self_loop_graph() {
    let z = FieldElement::one(1).unwrap();
    let g = BoundaryGraph {
        record: 1,
        variant: Variant::Sr,
        rule: EdgeRule::Derived,
        vertices: vec![BoundaryVertex { a1: 0, z: z.clone(), a2: 0 }],
        edges: vec![BoundaryEdge { from: 0, to: 0, label: z }],
        seeds: vec![0],
        bound: 1.0,
        explored: 1,
    };
    let mu = g.dominant_eigenvalue().unwrap();
    assert_eq!(mu.poly.to_i64_vec().unwrap(), vec![-1, 1]);
    assert!((mu.value - 1.0).abs() < 1e-12);
    let empty = BoundaryGraph { vertices: vec![], edges: vec![], seeds: vec![], ..g };
    assert!(matches!(empty.dominant_eigenvalue(), Err(Error::EmptyGraph)));
}

#[test]
fn planar_dimensions() {
    for (i, want) in [(1, 1.10026), (3, 1.02952), (5, 1.37858), (-1, 1.70018), (-3, 1.25074), (-5, 1.92089)] {
        let r = dimension_report(i).unwrap();
        assert!((r.box_dimension - want).abs() < 1e-4, "record {i}: {}", r.box_dimension);
        assert!(r.hausdorff_equal);
        assert!(r.box_dimension > 1.0 && r.box_dimension <= 2.0);
    }
}

#[test]
fn carrying_polynomial_has_no_zero_roots() {
    let r = dimension_report(3).unwrap();
    assert_eq!(r.mu_sr_poly, ["-1", "0", "-2", "0", "0", "0", "0", "1"]);
}

#[test]
fn dimension_needs_a_substitution() {
    assert!(matches!(dimension_report(-2), Err(Error::Unsupported(_))));
    assert!(matches!(dimension_report(0), Err(Error::NoTentTile)));
}

#[test]
fn exports() {
    let g = build_boundary_graph(1, Variant::Sr).unwrap();
    let j = g.to_json();
    assert_eq!(j["vertices"].as_array().unwrap().len(), g.len());
    assert_eq!(j["edges"].as_array().unwrap().len(), g.edges.len());
    let mut buf = Vec::new();
    g.write_adjacency_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), g.len());
    assert!(text.lines().all(|l| l.split(',').count() == g.len()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(a1 in 0usize..3, a2 in 0usize..3, c in prop::collection::vec(-6i64..6, 3)) {
        let z = FieldElement::from_i64(1, &c).unwrap();
        let n = normalize(a1, z.clone(), a2);
        prop_assert_eq!(&n, &normalize(a2, -&z, a1));
        if let Some(v) = n {
            prop_assert_eq!(normalize(v.a1, v.z.clone(), v.a2), Some(v.clone()));
            prop_assert!(in_d(v.a1, v.z.clone(), v.a2).is_some());
        }
    }

}
