//! Scenario files: JSON with schema tag `barricade/1`.

use std::collections::BTreeMap;
use std::path::Path;

use barricade_core::{Ball, Catalog1D, CatalogFn, ConvexSet, Epigraph1D, HPolyhedron, SublevelSystem, VSet, Vector};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: &str = "barricade/1";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
}

fn schema_err(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiSpec {
    Square,
    Exp,
    Abs,
    Linear(f64),
    NegSqrt,
    Reciprocal,
}

impl PhiSpec {
    pub fn to_core(self) -> Catalog1D {
        match self {
            PhiSpec::Square => Catalog1D::Square,
            PhiSpec::Exp => Catalog1D::Exp,
            PhiSpec::Abs => Catalog1D::Abs,
            PhiSpec::Linear(slope) => Catalog1D::Linear { slope },
            PhiSpec::NegSqrt => Catalog1D::NegSqrtDom,
            PhiSpec::Reciprocal => Catalog1D::Reciprocal,
        }
    }

    pub fn from_core(phi: Catalog1D) -> Self {
        match phi {
            Catalog1D::Square => PhiSpec::Square,
            Catalog1D::Exp => PhiSpec::Exp,
            Catalog1D::Abs => PhiSpec::Abs,
            Catalog1D::Linear { slope } => PhiSpec::Linear(slope),
            Catalog1D::NegSqrtDom => PhiSpec::NegSqrt,
            Catalog1D::Reciprocal => PhiSpec::Reciprocal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    /// `{x : a x <= b}`, rows of `a` listed in order.
    Hpoly { a: Vec<Vec<f64>>, b: Vec<f64> },
    /// Convex hull of `points` plus the cone of `rays`.
    Vset {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        rays: Vec<Vec<f64>>,
    },
    Ball { center: Vec<f64>, radius: f64 },
    /// Epigraph of `phi + shift` in the plane.
    Epigraph1d {
        phi: PhiSpec,
        #[serde(default)]
        shift: f64,
    },
    /// `{x : g(x) <= 0}` for each named function `g`.
    Sublevel { constraints: Vec<String> },
}

impl SetSpec {
    /// Inverse of construction for the explicit representations.
    pub fn from_set(s: &ConvexSet) -> Option<SetSpec> {
        let rows = |m: &DMatrix<f64>| m.row_iter().map(|r| r.iter().copied().collect()).collect();
        let vecs = |vs: &[Vector]| vs.iter().map(|v| v.iter().copied().collect()).collect();
        Some(match s {
            ConvexSet::HPoly(h) => SetSpec::Hpoly {
                a: rows(h.a()),
                b: h.b().iter().copied().collect(),
            },
            ConvexSet::VSet(v) => SetSpec::Vset {
                points: vecs(v.points()),
                rays: vecs(v.rays()),
            },
            ConvexSet::Ball(b) => SetSpec::Ball {
                center: b.center().iter().copied().collect(),
                radius: b.radius(),
            },
            ConvexSet::Epigraph(e) => SetSpec::Epigraph1d {
                phi: PhiSpec::from_core(e.phi()),
                shift: e.shift(),
            },
            ConvexSet::Sublevel(_) => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FnSpec {
    Affine {
        a: Vec<f64>,
        #[serde(default)]
        beta: f64,
    },
    Quadratic {
        q: Vec<Vec<f64>>,
        b: Vec<f64>,
        #[serde(default)]
        c: f64,
    },
    Norm {
        center: Vec<f64>,
        #[serde(default = "one")]
        weight: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `phi(x[index]) + <a, x> + beta`; `a` defaults to zero.
    Lift {
        index: usize,
        phi: PhiSpec,
        #[serde(default)]
        a: Option<Vec<f64>>,
        #[serde(default)]
        beta: f64,
    },
    ExpMinusSqrtProduct,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    Analyze(String),
    Separate(String, String),
    Ssp(String),
    Solve(String, String),
    /// Barrier-cone position of a dual vector.
    Classify(String, Vec<f64>),
    /// Coercivity and the two horizon conditions of a function.
    Conditions(String),
    /// Gap table of a named counterexample family.
    GapTable { name: String, n: usize },
}

impl TaskSpec {
    pub fn label(&self) -> String {
        match self {
            TaskSpec::Analyze(s) => format!("analyze({s})"),
            TaskSpec::Separate(a, b) => format!("separate({a},{b})"),
            TaskSpec::Ssp(s) => format!("ssp({s})"),
            TaskSpec::Solve(s, f) => format!("solve({s},{f})"),
            TaskSpec::Classify(s, x) => format!("classify({s},{x:?})"),
            TaskSpec::Conditions(f) => format!("conditions({f})"),
            TaskSpec::GapTable { name, n } => format!("gap_table({name},{n})"),
        }
    }

    pub fn is_solve(&self) -> bool {
        matches!(self, TaskSpec::Solve(..) | TaskSpec::Conditions(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    /// Separation, SSP and classification tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_solve_tol")]
    pub solve_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-7
}
fn default_solve_tol() -> f64 {
    1e-6
}
fn default_max_iter() -> usize {
    10_000
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        ToleranceSpec {
            tol: default_tol(),
            solve_tol: default_solve_tol(),
            max_iter: default_max_iter(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub dimension: usize,
    #[serde(default)]
    pub sets: BTreeMap<String, SetSpec>,
    #[serde(default)]
    pub functions: BTreeMap<String, FnSpec>,
    pub tasks: Vec<TaskSpec>,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub seed: u64,
}

/// Constructed sets and functions of a validated scenario.
#[derive(Debug, Clone)]
pub struct Model {
    pub sets: BTreeMap<String, ConvexSet>,
    pub functions: BTreeMap<String, CatalogFn>,
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<Scenario, ScenarioError> {
    let s: Scenario = serde_json::from_str(text)?;
    s.validate()?;
    Ok(s)
}

fn vector(v: &[f64]) -> Vector {
    Vector::from_column_slice(v)
}

fn matrix(field: &str, rows: &[Vec<f64>], cols: usize) -> Result<DMatrix<f64>, ScenarioError> {
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(schema_err(
            format!("{field}[{i}]"),
            format!("expected {cols} entries, found {}", rows[i].len()),
        ));
    }
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), cols, &flat))
}

fn expect_len(field: String, v: &[f64], n: usize) -> Result<(), ScenarioError> {
    if v.len() != n {
        return Err(schema_err(field, format!("expected {n} entries, found {}", v.len())));
    }
    Ok(())
}

impl Scenario {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema != SCHEMA {
            return Err(schema_err("schema", format!("expected \"{SCHEMA}\", found \"{}\"", self.schema)));
        }
        if self.dimension == 0 {
            return Err(schema_err("dimension", "must be at least 1"));
        }
        let t = &self.tolerances;
        if !(t.tol > 0.0 && t.solve_tol > 0.0 && t.tol.is_finite() && t.solve_tol.is_finite()) || t.max_iter == 0 {
            return Err(schema_err("tolerances", "tolerances and max_iter must be positive"));
        }
        self.build().map(|_| ())
    }

    fn need_set(&self, field: String, name: &str) -> Result<(), ScenarioError> {
        if self.sets.contains_key(name) {
            Ok(())
        } else {
            Err(schema_err(field, format!("undefined set `{name}`")))
        }
    }

    fn need_fn(&self, field: String, name: &str) -> Result<(), ScenarioError> {
        if self.functions.contains_key(name) {
            Ok(())
        } else {
            Err(schema_err(field, format!("undefined function `{name}`")))
        }
    }

    /// Resolve names and construct every set and function.
    pub fn build(&self) -> Result<Model, ScenarioError> {
        let n = self.dimension;
        let mut functions = BTreeMap::new();
        for (name, spec) in &self.functions {
            let field = format!("functions.{name}");
            let f = build_fn(&field, spec, n)?;
            functions.insert(name.clone(), f);
        }
        let mut sets = BTreeMap::new();
        for (name, spec) in &self.sets {
            let field = format!("sets.{name}");
            let s = build_set(&field, spec, n, &functions)?;
            sets.insert(name.clone(), s);
        }
        for (i, task) in self.tasks.iter().enumerate() {
            let field = format!("tasks[{i}]");
            match task {
                TaskSpec::Analyze(s) | TaskSpec::Ssp(s) => self.need_set(field, s)?,
                TaskSpec::Separate(a, b) => {
                    self.need_set(field.clone(), a)?;
                    self.need_set(field, b)?;
                }
                TaskSpec::Solve(s, f) => {
                    self.need_set(field.clone(), s)?;
                    self.need_fn(field, f)?;
                }
                TaskSpec::Classify(s, x) => {
                    self.need_set(field.clone(), s)?;
                    expect_len(field.clone(), x, n)?;
                    if x.iter().all(|&t| t == 0.0) || x.iter().any(|t| !t.is_finite()) {
                        return Err(schema_err(field, "dual vector must be finite and nonzero"));
                    }
                }
                TaskSpec::Conditions(f) => self.need_fn(field, f)?,
                TaskSpec::GapTable { name, n } => {
                    if !barricade_core::separation::COUNTEREXAMPLE_NAMES.contains(&name.as_str()) {
                        return Err(schema_err(field, format!("unknown counterexample `{name}`")));
                    }
                    if *n < 2 {
                        return Err(schema_err(field, "n must be at least 2"));
                    }
                }
            }
        }
        Ok(Model { sets, functions })
    }
}

fn core_err(field: &str, e: barricade_core::Error) -> ScenarioError {
    schema_err(field, e.to_string())
}

fn build_fn(field: &str, spec: &FnSpec, n: usize) -> Result<CatalogFn, ScenarioError> {
    let f = match spec {
        FnSpec::Affine { a, beta } => {
            expect_len(format!("{field}.a"), a, n)?;
            CatalogFn::affine(vector(a), *beta)
        }
        FnSpec::Quadratic { q, b, c } => {
            expect_len(format!("{field}.b"), b, n)?;
            if q.len() != n {
                return Err(schema_err(format!("{field}.q"), format!("expected {n} rows, found {}", q.len())));
            }
            CatalogFn::quadratic(matrix(&format!("{field}.q"), q, n)?, vector(b), *c)
        }
        FnSpec::Norm { center, weight, offset } => {
            expect_len(format!("{field}.center"), center, n)?;
            CatalogFn::norm(vector(center), *weight, *offset)
        }
        FnSpec::Lift { index, phi, a, beta } => {
            if let Some(a) = a {
                expect_len(format!("{field}.a"), a, n)?;
            }
            CatalogFn::lift(n, *index, phi.to_core(), a.as_deref().map(vector), *beta)
        }
        FnSpec::ExpMinusSqrtProduct => {
            if n != 2 {
                return Err(schema_err(field, "exp_minus_sqrt_product lives in dimension 2"));
            }
            Ok(CatalogFn::exp_minus_sqrt_product())
        }
    };
    f.map_err(|e| core_err(field, e))
}

fn build_set(
    field: &str,
    spec: &SetSpec,
    n: usize,
    functions: &BTreeMap<String, CatalogFn>,
) -> Result<ConvexSet, ScenarioError> {
    let s: barricade_core::Result<ConvexSet> = match spec {
        SetSpec::Hpoly { a, b } => {
            expect_len(format!("{field}.b"), b, a.len())?;
            let a = matrix(&format!("{field}.a"), a, n)?;
            HPolyhedron::new(a, vector(b)).map(Into::into)
        }
        SetSpec::Vset { points, rays } => {
            for (i, p) in points.iter().enumerate() {
                expect_len(format!("{field}.points[{i}]"), p, n)?;
            }
            for (i, r) in rays.iter().enumerate() {
                expect_len(format!("{field}.rays[{i}]"), r, n)?;
            }
            VSet::new(points.iter().map(|p| vector(p)).collect(), rays.iter().map(|r| vector(r)).collect())
                .map(Into::into)
        }
        SetSpec::Ball { center, radius } => {
            expect_len(format!("{field}.center"), center, n)?;
            Ball::new(vector(center), *radius).map(Into::into)
        }
        SetSpec::Epigraph1d { phi, shift } => {
            if n != 2 {
                return Err(schema_err(field, "epigraph1d lives in dimension 2"));
            }
            Epigraph1D::new(phi.to_core(), *shift).map(Into::into)
        }
        SetSpec::Sublevel { constraints } => {
            let mut gs = Vec::new();
            for (i, g) in constraints.iter().enumerate() {
                match functions.get(g) {
                    Some(f) => gs.push(f.clone()),
                    None => {
                        return Err(schema_err(
                            format!("{field}.constraints[{i}]"),
                            format!("undefined function `{g}`"),
                        ))
                    }
                }
            }
            SublevelSystem::new(gs).map(Into::into)
        }
    };
    s.map_err(|e| core_err(field, e))
}
