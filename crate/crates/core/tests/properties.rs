mod common;

use barricade_core::horizon::{horizon, horizon_numeric, HorizonMethod};
use barricade_core::separation::{separate, SeparationOutcome};
use barricade_core::{
    classify_barrier, in_barrier_cone, support, Ball, Catalog1D, CatalogFn, ConvexSet, Epigraph1D, HPolyhedron, VSet,
    Vector,
};
use common::v;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn vec2() -> impl Strategy<Value = Vector> {
    prop::array::uniform2(-3.0..3.0f64).prop_map(|a| v(&a))
}

fn phi() -> impl Strategy<Value = Catalog1D> {
    prop_oneof![
        Just(Catalog1D::Square),
        Just(Catalog1D::Exp),
        Just(Catalog1D::Abs),
        (-2.0..2.0f64).prop_map(|slope| Catalog1D::Linear { slope }),
        Just(Catalog1D::NegSqrtDom),
        Just(Catalog1D::Reciprocal),
    ]
}

/// Polygons containing the origin with slack at least 0.1 per row.
fn hpoly() -> impl Strategy<Value = ConvexSet> {
    (1usize..=6)
        .prop_flat_map(|m| {
            (
                prop::collection::vec(-1.0..1.0f64, 2 * m),
                prop::collection::vec(0.1..2.0f64, m),
            )
        })
        .prop_filter_map("degenerate rows", |(a, b)| {
            let m = b.len();
            HPolyhedron::new(DMatrix::from_row_slice(m, 2, &a), DVector::from_vec(b))
                .ok()
                .map(ConvexSet::from)
        })
}

fn set() -> impl Strategy<Value = ConvexSet> {
    prop_oneof![
        (vec2(), 0.1..2.0f64).prop_map(|(c, r)| Ball::new(c, r).unwrap().into()),
        hpoly(),
        (phi(), -1.0..1.0f64).prop_map(|(p, h)| Epigraph1D::new(p, h).unwrap().into()),
        (prop::collection::vec(vec2(), 1..5), prop::collection::vec(vec2(), 0..2))
            .prop_filter_map("zero ray", |(p, r)| VSet::new(p, r).ok().map(ConvexSet::from)),
    ]
}

fn catalog_fn() -> impl Strategy<Value = CatalogFn> {
    prop_oneof![
        (phi(), prop::option::of(vec2())).prop_map(|(p, a)| CatalogFn::lift(2, 0, p, a, 0.0).unwrap()),
        (vec2(), -1.0..1.0f64).prop_map(|(a, b)| CatalogFn::affine(a, b).unwrap()),
        (0.1..3.0f64, 0.0..1.0f64, vec2()).prop_map(|(d, off, b)| {
            let l = DMatrix::from_row_slice(2, 2, &[d, 0.0, off, 1.0]);
            let q = &l * l.transpose();
            CatalogFn::quadratic(q, b, 0.0).unwrap()
        }),
        (vec2(), 0.1..3.0f64).prop_map(|(c, w)| CatalogFn::norm(c, w, 0.0).unwrap()),
        Just(CatalogFn::exp_minus_sqrt_product()),
    ]
}

fn nonzero(x: &Vector) -> bool {
    x.norm() > 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn support_is_sublinear(s in set(), x in vec2(), y in vec2(), t in 0.1..5.0f64) {
        prop_assume!(nonzero(&x) && nonzero(&y) && nonzero(&(&x + &y)));
        let sx = support(&s, &x, 1e-9).unwrap().value();
        let sy = support(&s, &y, 1e-9).unwrap().value();
        let sxy = support(&s, &(&x + &y), 1e-9).unwrap().value();
        if sx.is_finite() && sy.is_finite() {
            prop_assert!(sxy <= sx + sy + 1e-7 * (1.0 + sx.abs() + sy.abs()));
        }
        let stx = support(&s, &(&x * t), 1e-9).unwrap().value();
        if sx.is_finite() {
            prop_assert!((stx - t * sx).abs() <= 1e-7 * (1.0 + stx.abs()));
        } else {
            prop_assert!(stx.is_infinite());
        }
    }

    #[test]
    fn support_bounds_members(s in set(), x in vec2(), y in vec2()) {
        prop_assume!(nonzero(&x));
        let p = s.project(&(&y * 3.0), 1e-10, 10_000).unwrap();
        let sx = support(&s, &x, 1e-9).unwrap().value();
        prop_assert!(x.dot(&p) <= sx + 1e-7 * (1.0 + sx.abs().min(1e12)));
    }

    #[test]
    fn projection_is_idempotent_and_nonexpansive(s in set(), x in vec2(), y in vec2()) {
        let (x, y) = (x * 4.0, y * 4.0);
        let px = s.project(&x, 1e-10, 10_000).unwrap();
        let py = s.project(&y, 1e-10, 10_000).unwrap();
        prop_assert!(s.contains(&px, 1e-8).unwrap());
        let ppx = s.project(&px, 1e-10, 10_000).unwrap();
        prop_assert!((&ppx - &px).norm() <= 1e-8 * (1.0 + px.norm()));
        prop_assert!((&px - &py).norm() <= (&x - &y).norm() + 1e-7);
        // obtuse angle at the projection
        prop_assert!((&x - &px).dot(&(&py - &px)) <= 1e-6 * (1.0 + (&x - &px).norm() * (&py - &px).norm()));
    }

    #[test]
    fn horizon_quotients_are_monotone(f in catalog_fn(), dir in vec2(), t in 0.1..10.0f64) {
        prop_assume!(nonzero(&dir));
        let h = horizon_numeric(&f, &dir).unwrap();
        if let HorizonMethod::NumericLimit { estimates } = &h.method {
            for w in estimates.windows(2) {
                prop_assert!(w[1] >= w[0] - 1e-9 * (1.0 + w[0].abs()));
            }
            let closed = horizon(&f, &dir).unwrap().value;
            prop_assert!(estimates.last().unwrap() <= &(closed + 1e-7 * (1.0 + closed.abs())));
        }
        let a = horizon(&f, &dir).unwrap().value;
        let b = horizon(&f, &(&dir * t)).unwrap().value;
        if a.is_finite() {
            prop_assert!((b - t * a).abs() <= 1e-9 * (1.0 + b.abs()));
        } else {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn subgradient_inequality(f in catalog_fn(), x in vec2(), y in vec2()) {
        let (fx, fy) = (f.value(&x), f.value(&y));
        prop_assume!(fx.is_finite() && fy.is_finite());
        if let Some(g) = f.subgradient(&x) {
            prop_assert!(fy >= fx + g.dot(&(&y - &x)) - 1e-9 * (1.0 + fx.abs() + fy.abs()));
        }
    }

    #[test]
    fn interior_barrier_points_are_barrier_points(s in set(), x in vec2()) {
        prop_assume!(nonzero(&x));
        if classify_barrier(&s, &x, 1e-9).unwrap().is_interior() {
            prop_assert!(in_barrier_cone(&s, &x, 1e-9).unwrap());
        }
    }

    #[test]
    fn ball_separation_is_symmetric(c1 in vec2(), c2 in vec2(), r1 in 0.1..2.0f64, r2 in 0.1..2.0f64) {
        let gap = (&c1 - &c2).norm() - r1 - r2;
        prop_assume!(gap.abs() > 1e-3);
        let (b1, b2): (ConvexSet, ConvexSet) = (Ball::new(c1, r1).unwrap().into(), Ball::new(c2, r2).unwrap().into());
        let tol = 1e-6;
        let ab = separate(&b1, &b2, tol).unwrap();
        let ba = separate(&b2, &b1, tol).unwrap();
        prop_assert_eq!(ab.tag(), ba.tag());
        prop_assert_eq!(ab.tag(), if gap > 0.0 { "StronglySeparated" } else { "Intersecting" });
        if let (
            SeparationOutcome::StronglySeparated { hyperplane: h1, dist, .. },
            SeparationOutcome::StronglySeparated { hyperplane: h2, .. },
        ) = (&ab, &ba) {
            prop_assert!((&h1.xstar + &h2.xstar).norm() <= 1e-5);
            prop_assert!((dist - gap).abs() <= tol);
            let sc = support(&b1, &h1.xstar, 1e-9).unwrap().value();
            let sd = support(&b2, &-&h1.xstar, 1e-9).unwrap().value();
            prop_assert!(sc + h1.margin <= -sd + 2.0 * tol);
        }
    }
}
