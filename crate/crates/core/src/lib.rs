//! Finite-dimensional convex geometry: support functions, recession and
//! barrier cones, strong separation and existence conditions for convex
//! programs.

pub mod catalog;
pub mod cone;
pub mod error;
pub mod geometry;
pub mod horizon;
pub mod linalg;
pub mod lp;
pub mod separation;
pub mod support;

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;

pub use catalog::{Catalog1D, CatalogFn, FnKind, Interval};
pub use cone::{
    classify_barrier, recession_cone, ssp_verdict, BarrierClassification, ConeRep, SspRule,
    SspStatus, SspVerdict,
};
pub use error::{Error, Result};
pub use geometry::{Ball, Boundedness, ConvexSet, Epigraph1D, HPolyhedron, SublevelSystem, VSet};
pub use horizon::{
    certify_and_solve, check_cond10, check_cond9, check_coercive, horizon, horizon_numeric,
    horizon_zero_cone, ConditionKind, ConditionReport, Conclusion, ExistenceReport,
    ExistenceRoute, HorizonValue, Truth,
};
pub use separation::{
    counterexample_pair, distance, separate, separate_with, CounterexamplePair, DistanceBounds,
    ExpectedStatus, GapPair, Hyperplane, SeparationOutcome,
};
pub use support::{in_barrier_cone, normalized_limsup_estimate, support, SupportValue, Unbounded};

/// Numerical tolerances shared by the analysis routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub membership: f64,
    pub projection: f64,
    pub cone: f64,
    pub max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            membership: 1e-9,
            projection: 1e-8,
            cone: 1e-7,
            max_iter: 10_000,
        }
    }
}
