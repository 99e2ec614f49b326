//! Closed-form convex functions.
//!
//! [`Catalog1D`] entries are proper, convex, lower semicontinuous functions on
//! R (`+inf` off their domain) with hand-derived conjugates and horizon
//! functions. [`CatalogFn`] lifts them, together with a few standard
//! n-dimensional forms, to constraint and objective functions on R^n.

use nalgebra::{DMatrix, DVector};

use crate::error::{check_finite, Error, Result};
use crate::linalg::{stack_rows, unit};
use crate::{Matrix, Vector};

/// An interval of the real line with open or closed ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        lo_closed: false,
        hi_closed: false,
    };

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Open as a subset of R: no finite endpoint is included.
    pub fn is_open(&self) -> bool {
        !(self.lo.is_finite() && self.lo_closed) && !(self.hi.is_finite() && self.hi_closed)
    }

    /// Finite endpoints that belong to the interval.
    pub fn closed_endpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        if self.lo.is_finite() && self.lo_closed {
            out.push(self.lo);
        }
        if self.hi.is_finite() && self.hi_closed && self.hi != self.lo {
            out.push(self.hi);
        }
        out
    }
}

/// One-dimensional catalog functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Catalog1D {
    /// x^2
    Square,
    /// e^x
    Exp,
    /// |x|
    Abs,
    /// slope * x
    Linear { slope: f64 },
    /// -sqrt(x) on x >= 0
    NegSqrtDom,
    /// 1/x on x > 0
    Reciprocal,
}

impl Catalog1D {
    pub const ALL: [Catalog1D; 6] = [
        Catalog1D::Square,
        Catalog1D::Exp,
        Catalog1D::Abs,
        Catalog1D::Linear { slope: 1.0 },
        Catalog1D::NegSqrtDom,
        Catalog1D::Reciprocal,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Catalog1D::Square => "square",
            Catalog1D::Exp => "exp",
            Catalog1D::Abs => "abs",
            Catalog1D::Linear { .. } => "linear",
            Catalog1D::NegSqrtDom => "neg_sqrt",
            Catalog1D::Reciprocal => "reciprocal",
        }
    }

    pub fn domain(&self) -> Interval {
        match self {
            Catalog1D::NegSqrtDom => Interval {
                lo: 0.0,
                hi: f64::INFINITY,
                lo_closed: true,
                hi_closed: false,
            },
            Catalog1D::Reciprocal => Interval {
                lo: 0.0,
                hi: f64::INFINITY,
                lo_closed: false,
                hi_closed: false,
            },
            _ => Interval::REAL,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Catalog1D::Square => x * x,
            Catalog1D::Exp => x.exp(),
            Catalog1D::Abs => x.abs(),
            Catalog1D::Linear { slope } => slope * x,
            Catalog1D::NegSqrtDom => {
                if x >= 0.0 {
                    -x.sqrt()
                } else {
                    f64::INFINITY
                }
            }
            Catalog1D::Reciprocal => {
                if x > 0.0 {
                    1.0 / x
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Derivative, or the minimum-norm subgradient at a kink. Infinite where
    /// the subdifferential is empty at a domain endpoint; NaN off the domain.
    pub fn derivative(&self, x: f64) -> f64 {
        if !self.domain().contains(x) {
            return f64::NAN;
        }
        match *self {
            Catalog1D::Square => 2.0 * x,
            Catalog1D::Exp => x.exp(),
            Catalog1D::Abs => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Catalog1D::Linear { slope } => slope,
            Catalog1D::NegSqrtDom => {
                if x > 0.0 {
                    -0.5 / x.sqrt()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Catalog1D::Reciprocal => -1.0 / (x * x),
        }
    }

    /// Domain of the conjugate.
    pub fn conjugate_domain(&self) -> Interval {
        match *self {
            Catalog1D::Square => Interval::REAL,
            Catalog1D::Exp => Interval {
                lo: 0.0,
                hi: f64::INFINITY,
                lo_closed: true,
                hi_closed: false,
            },
            Catalog1D::Abs => Interval {
                lo: -1.0,
                hi: 1.0,
                lo_closed: true,
                hi_closed: true,
            },
            Catalog1D::Linear { slope } => Interval {
                lo: slope,
                hi: slope,
                lo_closed: true,
                hi_closed: true,
            },
            Catalog1D::NegSqrtDom => Interval {
                lo: f64::NEG_INFINITY,
                hi: 0.0,
                lo_closed: false,
                hi_closed: false,
            },
            Catalog1D::Reciprocal => Interval {
                lo: f64::NEG_INFINITY,
                hi: 0.0,
                lo_closed: false,
                hi_closed: true,
            },
        }
    }

    /// Convex conjugate `sup_x s x - phi(x)`.
    pub fn conjugate(&self, s: f64) -> f64 {
        if !self.conjugate_domain().contains(s) {
            return f64::INFINITY;
        }
        match *self {
            Catalog1D::Square => s * s / 4.0,
            Catalog1D::Exp => {
                if s > 0.0 {
                    s * s.ln() - s
                } else {
                    0.0
                }
            }
            Catalog1D::Abs | Catalog1D::Linear { .. } => 0.0,
            Catalog1D::NegSqrtDom => -0.25 / s,
            Catalog1D::Reciprocal => -2.0 * (-s).sqrt(),
        }
    }

    /// A maximizer of `s x - phi(x)` when the supremum is attained.
    pub fn conjugate_argmax(&self, s: f64) -> Option<f64> {
        if !self.conjugate_domain().contains(s) {
            return None;
        }
        match *self {
            Catalog1D::Square => Some(s / 2.0),
            Catalog1D::Exp => (s > 0.0).then(|| s.ln()),
            Catalog1D::Abs | Catalog1D::Linear { .. } => Some(0.0),
            Catalog1D::NegSqrtDom => Some(0.25 / (s * s)),
            Catalog1D::Reciprocal => (s < 0.0).then(|| 1.0 / (-s).sqrt()),
        }
    }

    /// Horizon function; positively homogeneous, `+inf` allowed.
    pub fn horizon(&self, t: f64) -> f64 {
        if t > 0.0 {
            t * self.horizon_at_plus_one()
        } else if t < 0.0 {
            -t * self.horizon_at_minus_one()
        } else {
            0.0
        }
    }

    pub(crate) fn horizon_at_plus_one(&self) -> f64 {
        match *self {
            Catalog1D::Square | Catalog1D::Exp => f64::INFINITY,
            Catalog1D::Abs => 1.0,
            Catalog1D::Linear { slope } => slope,
            Catalog1D::NegSqrtDom | Catalog1D::Reciprocal => 0.0,
        }
    }

    pub(crate) fn horizon_at_minus_one(&self) -> f64 {
        match *self {
            Catalog1D::Square | Catalog1D::NegSqrtDom | Catalog1D::Reciprocal => f64::INFINITY,
            Catalog1D::Exp => 0.0,
            Catalog1D::Abs => 1.0,
            Catalog1D::Linear { slope } => -slope,
        }
    }

    /// A point in the interior of the domain.
    pub fn base_point(&self) -> f64 {
        match self {
            Catalog1D::NegSqrtDom | Catalog1D::Reciprocal => 1.0,
            _ => 0.0,
        }
    }

    /// Unit generators of the epigraph of the horizon function, which is the
    /// recession cone of the epigraph.
    pub fn epigraph_recession_generators(&self) -> Vec<Vector> {
        let mut gens = vec![DVector::from_vec(vec![0.0, 1.0])];
        let hp = self.horizon_at_plus_one();
        if hp.is_finite() {
            gens.push(DVector::from_vec(vec![1.0, hp]).normalize());
        }
        let hm = self.horizon_at_minus_one();
        if hm.is_finite() {
            gens.push(DVector::from_vec(vec![-1.0, hm]).normalize());
        }
        gens
    }
}

/// A coordinate lower bound `x[index] >= lower` (strict when `strict`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainBound {
    pub index: usize,
    pub lower: f64,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FnKind {
    /// `<a, x> + beta`
    Affine { a: Vector, beta: f64 },
    /// `x' Q x + <b, x> + c` with Q symmetric positive semidefinite.
    Quadratic { q: Matrix, b: Vector, c: f64 },
    /// `weight * |x - center| + offset`
    Norm {
        center: Vector,
        weight: f64,
        offset: f64,
    },
    /// `phi(x[index]) + <a, x> + beta`
    Lift {
        index: usize,
        phi: Catalog1D,
        a: Vector,
        beta: f64,
    },
    /// `exp(-x) - sqrt(x y)` on the closed nonnegative quadrant of R^2.
    ExpMinusSqrtProduct,
}

/// A validated catalog function on R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogFn {
    kind: FnKind,
    dim: usize,
}

impl CatalogFn {
    pub fn affine(a: Vector, beta: f64) -> Result<Self> {
        check_finite(&a, "affine coefficients")?;
        if !beta.is_finite() {
            return Err(Error::NonFinite("affine offset"));
        }
        Self::checked(FnKind::Affine { a, beta })
    }

    pub fn quadratic(q: Matrix, b: Vector, c: f64) -> Result<Self> {
        let n = b.len();
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                got: q.nrows(),
            });
        }
        if q.iter().any(|x| !x.is_finite()) || !c.is_finite() {
            return Err(Error::NonFinite("quadratic"));
        }
        check_finite(&b, "quadratic linear term")?;
        let q = (&q + q.transpose()) * 0.5;
        let scale = q.amax().max(1.0);
        let eig = q.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&l| l < -1e-10 * scale) {
            return Err(Error::Invalid("quadratic form is not positive semidefinite".into()));
        }
        Self::checked(FnKind::Quadratic { q, b, c })
    }

    pub fn norm(center: Vector, weight: f64, offset: f64) -> Result<Self> {
        check_finite(&center, "norm center")?;
        if !(weight > 0.0 && weight.is_finite()) || !offset.is_finite() {
            return Err(Error::Invalid("norm weight must be positive and finite".into()));
        }
        Self::checked(FnKind::Norm {
            center,
            weight,
            offset,
        })
    }

    /// `phi(x[index]) + <a, x> + beta` on R^dim. Pass `a = None` for no
    /// affine part.
    pub fn lift(dim: usize, index: usize, phi: Catalog1D, a: Option<Vector>, beta: f64) -> Result<Self> {
        if index >= dim {
            return Err(Error::Invalid(format!("lift index {index} out of range for dimension {dim}")));
        }
        if let Catalog1D::Linear { slope } = phi {
            if !slope.is_finite() {
                return Err(Error::NonFinite("linear slope"));
            }
        }
        let a = a.unwrap_or_else(|| DVector::zeros(dim));
        if a.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                got: a.len(),
            });
        }
        check_finite(&a, "lift affine part")?;
        if !beta.is_finite() {
            return Err(Error::NonFinite("lift offset"));
        }
        Self::checked(FnKind::Lift { index, phi, a, beta })
    }

    pub fn exp_minus_sqrt_product() -> Self {
        CatalogFn {
            kind: FnKind::ExpMinusSqrtProduct,
            dim: 2,
        }
    }

    fn checked(kind: FnKind) -> Result<Self> {
        let dim = match &kind {
            FnKind::Affine { a, .. } => a.len(),
            FnKind::Quadratic { b, .. } => b.len(),
            FnKind::Norm { center, .. } => center.len(),
            FnKind::Lift { a, .. } => a.len(),
            FnKind::ExpMinusSqrtProduct => 2,
        };
        if dim == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        Ok(CatalogFn { kind, dim })
    }

    pub fn kind(&self) -> &FnKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain_bounds(&self) -> Vec<DomainBound> {
        match &self.kind {
            FnKind::Lift { index, phi, .. } => {
                let d = phi.domain();
                if d.lo.is_finite() {
                    vec![DomainBound {
                        index: *index,
                        lower: d.lo,
                        strict: !d.lo_closed,
                    }]
                } else {
                    Vec::new()
                }
            }
            FnKind::ExpMinusSqrtProduct => vec![
                DomainBound {
                    index: 0,
                    lower: 0.0,
                    strict: false,
                },
                DomainBound {
                    index: 1,
                    lower: 0.0,
                    strict: false,
                },
            ],
            _ => Vec::new(),
        }
    }

    pub fn in_domain(&self, x: &Vector) -> bool {
        self.domain_bounds().iter().all(|b| {
            if b.strict {
                x[b.index] > b.lower
            } else {
                x[b.index] >= b.lower
            }
        })
    }

    pub fn value(&self, x: &Vector) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            FnKind::Affine { a, beta } => a.dot(x) + beta,
            FnKind::Quadratic { q, b, c } => x.dot(&(q * x)) + b.dot(x) + c,
            FnKind::Norm {
                center,
                weight,
                offset,
            } => weight * (x - center).norm() + offset,
            FnKind::Lift { index, phi, a, beta } => phi.value(x[*index]) + a.dot(x) + beta,
            FnKind::ExpMinusSqrtProduct => {
                let (u, v) = (x[0], x[1]);
                if u >= 0.0 && v >= 0.0 {
                    (-u).exp() - (u * v).sqrt()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// A subgradient at `x`, or `None` where the subdifferential is empty
    /// (off the domain or at a boundary point with infinite slope).
    pub fn subgradient(&self, x: &Vector) -> Option<Vector> {
        if !self.in_domain(x) {
            return None;
        }
        match &self.kind {
            FnKind::Affine { a, .. } => Some(a.clone()),
            FnKind::Quadratic { q, b, .. } => Some(q * x * 2.0 + b),
            FnKind::Norm { center, weight, .. } => {
                let d = x - center;
                let n = d.norm();
                if n > 0.0 {
                    Some(d * (*weight / n))
                } else {
                    Some(DVector::zeros(self.dim))
                }
            }
            FnKind::Lift { index, phi, a, .. } => {
                let dphi = phi.derivative(x[*index]);
                dphi.is_finite().then(|| a + unit(self.dim, *index) * dphi)
            }
            FnKind::ExpMinusSqrtProduct => {
                let (u, v) = (x[0], x[1]);
                if u > 0.0 && v > 0.0 {
                    let r = (u * v).sqrt();
                    Some(DVector::from_vec(vec![-(-u).exp() - 0.5 * v / r, -0.5 * u / r]))
                } else if u == 0.0 && v == 0.0 {
                    // -u - sqrt(uv) >= -1.5u - 0.5v on the quadrant (AM-GM)
                    Some(DVector::from_vec(vec![-1.5, -0.5]))
                } else {
                    None
                }
            }
        }
    }

    /// A finite descent surrogate: the subgradient where one exists, else
    /// the gradient with infinite partial derivatives dropped.
    pub fn descent_gradient(&self, x: &Vector) -> Vector {
        if let Some(g) = self.subgradient(x) {
            return g;
        }
        match &self.kind {
            FnKind::ExpMinusSqrtProduct if self.in_domain(x) => {
                let (u, v) = (x[0], x[1]);
                let du = if u > 0.0 { -(-u).exp() } else { 0.0 };
                let dv = 0.0;
                let _ = v;
                DVector::from_vec(vec![du, dv])
            }
            FnKind::Lift { a, .. } => a.clone(),
            _ => DVector::zeros(self.dim),
        }
    }

    /// Closed-form horizon function.
    pub fn horizon(&self, v: &Vector) -> f64 {
        match &self.kind {
            FnKind::Affine { a, .. } => a.dot(v),
            FnKind::Quadratic { q, b, .. } => {
                let qv = q * v;
                let scale = q.amax().max(1e-300) * v.norm();
                if qv.norm() > 1e-12 * scale.max(1e-300) && v.dot(&qv) > 0.0 {
                    f64::INFINITY
                } else {
                    b.dot(v)
                }
            }
            FnKind::Norm { weight, .. } => weight * v.norm(),
            FnKind::Lift { index, phi, a, .. } => phi.horizon(v[*index]) + a.dot(v),
            FnKind::ExpMinusSqrtProduct => {
                let (u, w) = (v[0], v[1]);
                if u >= 0.0 && w >= 0.0 {
                    -(u * w).sqrt()
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Rows `H` with `{v : f^inf(v) <= 0} = {v : H v <= 0}`. Zero rows are
    /// omitted, so an empty matrix stands for all of R^n.
    pub fn horizon_zero_rows(&self) -> Matrix {
        let n = self.dim;
        let mut rows: Vec<Vector> = Vec::new();
        match &self.kind {
            FnKind::Affine { a, .. } => rows.push(a.clone()),
            FnKind::Quadratic { q, b, .. } => {
                for i in 0..n {
                    let r = q.row(i).transpose().into_owned();
                    rows.push(r.clone());
                    rows.push(-r);
                }
                rows.push(b.clone());
            }
            FnKind::Norm { .. } => {
                for i in 0..n {
                    rows.push(unit(n, i));
                    rows.push(-unit(n, i));
                }
            }
            FnKind::Lift { index, phi, a, .. } => {
                let e = unit(n, *index);
                let hp = phi.horizon_at_plus_one();
                let hm = phi.horizon_at_minus_one();
                if hp.is_finite() {
                    rows.push(&e * hp + a);
                } else {
                    rows.push(e.clone());
                }
                if hm.is_finite() {
                    rows.push(&e * (-hm) + a);
                } else {
                    rows.push(-&e);
                }
                if !hp.is_finite() && !hm.is_finite() {
                    rows.push(a.clone());
                }
            }
            FnKind::ExpMinusSqrtProduct => {
                rows.push(-unit(2, 0));
                rows.push(-unit(2, 1));
            }
        }
        rows.retain(|r| r.amax() > 1e-14);
        stack_rows(&rows, n)
    }

    /// Points of the domain worth trying as base points in probes.
    pub fn base_points(&self) -> Vec<Vector> {
        let n = self.dim;
        match &self.kind {
            FnKind::Norm { center, .. } => vec![center.clone(), DVector::zeros(n)],
            FnKind::Lift { index, phi, .. } => {
                let mut x = DVector::zeros(n);
                x[*index] = phi.base_point();
                vec![x]
            }
            FnKind::ExpMinusSqrtProduct => vec![DVector::from_vec(vec![1.0, 1.0])],
            _ => vec![DVector::zeros(n)],
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            FnKind::Affine { .. } => "affine".into(),
            FnKind::Quadratic { .. } => "quadratic".into(),
            FnKind::Norm { .. } => "norm".into(),
            FnKind::Lift { phi, .. } => format!("lift({})", phi.name()),
            FnKind::ExpMinusSqrtProduct => "exp_minus_sqrt_product".into(),
        }
    }
}

/// Clamp `x` into the closure of the intersection of the given domain
/// bounds, keeping a margin of `inset` from strict bounds.
pub(crate) fn clamp_to_domain(x: &mut Vector, bounds: &[DomainBound], inset: f64) {
    for b in bounds {
        let lo = if b.strict { b.lower + inset } else { b.lower };
        if x[b.index] < lo {
            x[b.index] = lo;
        }
    }
}

pub(crate) fn domain_rows(bounds: &[DomainBound], n: usize) -> (Matrix, Vector) {
    let mut a = DMatrix::zeros(bounds.len(), n);
    let mut b = DVector::zeros(bounds.len());
    for (i, d) in bounds.iter().enumerate() {
        a[(i, d.index)] = -1.0;
        b[i] = -d.lower;
    }
    (a, b)
}
