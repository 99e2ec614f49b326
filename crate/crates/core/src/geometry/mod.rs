//! Closed convex sets in R^n with membership and projection oracles.

mod ball;
mod epigraph;
mod hpoly;
mod sublevel;
mod vset;

pub use ball::Ball;
pub use epigraph::Epigraph1D;
pub use hpoly::HPolyhedron;
pub use sublevel::SublevelSystem;
pub use vset::VSet;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::Vector;

/// Whether boundedness can be read off the representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    Unbounded,
    Unknown,
}

/// A nonempty closed convex set in R^n.
#[derive(Debug, Clone)]
pub enum ConvexSet {
    HPoly(HPolyhedron),
    VSet(VSet),
    Ball(Ball),
    Epigraph(Epigraph1D),
    Sublevel(SublevelSystem),
}

impl ConvexSet {
    pub fn dimension(&self) -> usize {
        match self {
            ConvexSet::HPoly(s) => s.dim(),
            ConvexSet::VSet(s) => s.dim(),
            ConvexSet::Ball(s) => s.dim(),
            ConvexSet::Epigraph(_) => 2,
            ConvexSet::Sublevel(s) => s.dim(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ConvexSet::HPoly(_) => "hpoly",
            ConvexSet::VSet(_) => "vset",
            ConvexSet::Ball(_) => "ball",
            ConvexSet::Epigraph(_) => "epigraph1d",
            ConvexSet::Sublevel(_) => "sublevel",
        }
    }

    /// Membership within `tol`: constraint residual for the H and sublevel
    /// forms, Euclidean distance for the others.
    pub fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_dim(self.dimension(), x.len())?;
        check_finite(x, "query point")?;
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        Ok(match self {
            ConvexSet::HPoly(s) => s.residual(x) <= tol,
            ConvexSet::Sublevel(s) => s.residual(x) <= tol,
            ConvexSet::Ball(s) => s.distance(x) <= tol,
            ConvexSet::Epigraph(s) => s.contains_exact(x) || (s.project(x)? - x).norm() <= tol,
            ConvexSet::VSet(s) => {
                let p = s.project(x, tol.min(1e-10), 10_000)?;
                (p - x).norm() <= tol
            }
        })
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, x: &Vector, tol: f64, max_iter: usize) -> Result<Vector> {
        check_dim(self.dimension(), x.len())?;
        check_finite(x, "query point")?;
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::Invalid("tolerance must be positive".into()));
        }
        match self {
            ConvexSet::HPoly(s) => s.project(x, tol, max_iter),
            ConvexSet::VSet(s) => s.project(x, tol, max_iter),
            ConvexSet::Ball(s) => Ok(s.project(x)),
            ConvexSet::Epigraph(s) => s.project(x),
            ConvexSet::Sublevel(s) => s.project(x, tol, max_iter),
        }
    }

    pub fn is_bounded_rep(&self) -> Boundedness {
        match self {
            ConvexSet::Ball(_) => Boundedness::Bounded,
            ConvexSet::VSet(s) => {
                if s.rays().is_empty() {
                    Boundedness::Bounded
                } else {
                    Boundedness::Unbounded
                }
            }
            ConvexSet::HPoly(s) => {
                if s.is_bounded() {
                    Boundedness::Bounded
                } else {
                    Boundedness::Unbounded
                }
            }
            ConvexSet::Epigraph(_) => Boundedness::Unbounded,
            ConvexSet::Sublevel(s) => s.boundedness(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.is_bounded_rep() == Boundedness::Bounded
    }

    /// A point of the set, fixed at construction.
    pub fn point(&self) -> Vector {
        match self {
            ConvexSet::HPoly(s) => s.witness().clone(),
            ConvexSet::VSet(s) => s.points()[0].clone(),
            ConvexSet::Ball(s) => s.center().clone(),
            ConvexSet::Epigraph(s) => s.witness(),
            ConvexSet::Sublevel(s) => s.witness().clone(),
        }
    }
}

impl From<HPolyhedron> for ConvexSet {
    fn from(s: HPolyhedron) -> Self {
        ConvexSet::HPoly(s)
    }
}

impl From<VSet> for ConvexSet {
    fn from(s: VSet) -> Self {
        ConvexSet::VSet(s)
    }
}

impl From<Ball> for ConvexSet {
    fn from(s: Ball) -> Self {
        ConvexSet::Ball(s)
    }
}

impl From<Epigraph1D> for ConvexSet {
    fn from(s: Epigraph1D) -> Self {
        ConvexSet::Epigraph(s)
    }
}

impl From<SublevelSystem> for ConvexSet {
    fn from(s: SublevelSystem) -> Self {
        ConvexSet::Sublevel(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Catalog1D;
    use nalgebra::{DMatrix, DVector};

    fn v(xs: &[f64]) -> Vector {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn contains_examples() {
        let ball: ConvexSet = Ball::new(v(&[0.0, 0.0]), 1.0).unwrap().into();
        assert!(ball.contains(&v(&[1.0, 0.0]), 1e-12).unwrap());
        let epi: ConvexSet = Epigraph1D::new(Catalog1D::Square, 0.0).unwrap().into();
        assert!(!epi.contains(&v(&[2.0, 3.0]), 1e-12).unwrap());
        let axis: ConvexSet = HPolyhedron::new(
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, -1.0]),
            v(&[0.0, 0.0]),
        )
        .unwrap()
        .into();
        assert!(axis.contains(&v(&[5.0, 0.0]), 1e-12).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let ball: ConvexSet = Ball::new(v(&[0.0, 0.0]), 1.0).unwrap().into();
        assert!(matches!(
            ball.contains(&v(&[1.0]), 1e-9),
            Err(Error::Dimension { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn project_examples() {
        let epi: ConvexSet = Epigraph1D::new(Catalog1D::Square, 0.0).unwrap().into();
        let p = epi.project(&v(&[0.0, -1.0]), 1e-8, 1000).unwrap();
        assert!(p.norm() < 1e-12);
        let ball: ConvexSet = Ball::new(v(&[3.0, 0.0]), 1.0).unwrap().into();
        let p = ball.project(&v(&[0.0, 0.0]), 1e-8, 1000).unwrap();
        assert!((p - v(&[2.0, 0.0])).norm() < 1e-15);
        let half: ConvexSet = HPolyhedron::new(DMatrix::from_row_slice(1, 2, &[-1.0, 0.0]), v(&[-1.0]))
            .unwrap()
            .into();
        let p = half.project(&v(&[0.0, 0.5]), 1e-8, 1000).unwrap();
        assert!((p - v(&[1.0, 0.5])).norm() < 1e-12);
    }

    #[test]
    fn boundedness_flags() {
        let ball: ConvexSet = Ball::new(v(&[0.0]), 2.0).unwrap().into();
        assert_eq!(ball.is_bounded_rep(), Boundedness::Bounded);
        let pts: ConvexSet = VSet::new(vec![v(&[0.0, 1.0]), v(&[2.0, 0.0])], vec![]).unwrap().into();
        assert_eq!(pts.is_bounded_rep(), Boundedness::Bounded);
        let epi: ConvexSet = Epigraph1D::new(Catalog1D::Square, 0.0).unwrap().into();
        assert_eq!(epi.is_bounded_rep(), Boundedness::Unbounded);
    }
}
