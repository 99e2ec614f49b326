mod common;

use barricade_core::horizon::{certify_and_solve, Conclusion, ExistenceRoute};
use barricade_core::separation::{counterexample_pair, separate, ExpectedStatus};
use barricade_core::{
    recession_cone, ssp_verdict, support, Ball, Catalog1D, CatalogFn, ConvexSet, Error, SublevelSystem,
};
use common::v;
use nalgebra::DMatrix;

fn hyperbola_sublevel() -> ConvexSet {
    // {x > 0, y >= 1/x} as a sublevel set of 1/x - y
    let g = CatalogFn::lift(2, 0, Catalog1D::Reciprocal, Some(v(&[0.0, -1.0])), 0.0).unwrap();
    SublevelSystem::new(vec![g]).unwrap().into()
}

#[test]
fn sublevel_hyperbola_matches_epigraph() {
    let s = hyperbola_sublevel();
    let gens = recession_cone(&s).generators();
    assert_eq!(gens.len(), 2);
    let sigma = support(&s, &v(&[-1.0, -1.0]), 1e-9).unwrap().value();
    assert!((sigma + 2.0).abs() < 1e-5, "{sigma}");
    assert!(!ssp_verdict(&s, 1e-7).unwrap().has_ssp());
}

#[test]
fn linear_objective_on_ball_uses_compactness() {
    let m: ConvexSet = Ball::new(v(&[0.0, 0.0]), 1.0).unwrap().into();
    let f = CatalogFn::affine(v(&[1.0, 0.0]), 0.0).unwrap();
    let r = certify_and_solve(&m, &f, 1e-6, 10_000).unwrap();
    assert_eq!(r.conclusion, Conclusion::NonemptyCompact(ExistenceRoute::BoundedConstraint));
    let s = r.solution.unwrap();
    assert!((s.x - v(&[-1.0, 0.0])).norm() < 1e-6);
}

#[test]
fn unbounded_objective_is_reported() {
    let m: ConvexSet = barricade_core::HPolyhedron::new(DMatrix::from_row_slice(1, 2, &[0.0, 1.0]), v(&[0.0]))
        .unwrap()
        .into();
    let f = CatalogFn::affine(v(&[0.0, 1.0]), 0.0).unwrap();
    let r = certify_and_solve(&m, &f, 1e-6, 2_000).unwrap();
    assert_eq!(r.bounded_below.holds, barricade_core::Truth::False);
    assert!(matches!(&r.conclusion, Conclusion::HypothesesFailed(h) if h.contains(&"bounded_below".to_string())));
    assert!(r.solution.is_none());
}

#[test]
fn truncated_slices_separate_in_finite_dimension() {
    for name in ["l2_slices", "l1_slices"] {
        let p = counterexample_pair(name, 4).unwrap();
        assert_eq!(p.expected, ExpectedStatus::StronglySeparated);
        assert_eq!(separate(&p.c, &p.d, 1e-7).unwrap().tag(), "StronglySeparated");
    }
    let p = counterexample_pair("l2_slices", 2).unwrap();
    assert_eq!(p.gaps.len(), 1);
    assert_eq!(p.gaps[0].gap, 1.0);
}

#[test]
fn errors_are_typed() {
    let b2: ConvexSet = Ball::new(v(&[0.0, 0.0]), 1.0).unwrap().into();
    let b3: ConvexSet = Ball::new(v(&[0.0, 0.0, 0.0]), 1.0).unwrap().into();
    let e = separate(&b2, &b3, 1e-6).unwrap_err();
    assert!(matches!(e, Error::Dimension { expected: 2, got: 3 }));
    assert_eq!(e.kind(), "DimensionError");
    let e = counterexample_pair("ell_infinity", 3).unwrap_err();
    assert_eq!(e.kind(), "KeyError");
    assert!(Ball::new(v(&[0.0]), -1.0).is_err());
    assert!(matches!(support(&b2, &v(&[f64::NAN, 0.0]), 1e-9), Err(Error::NonFinite(_))));
}
