//! Radial initial-data sets: grids, field providers, built-in families,
//! validation, refinement, differentiation, and JSON persistence.
//!
//! A data set lives on a ball (`r[0] == 0`) or annulus (`r[0] > 0`) and
//! carries four radial profiles: the metric coefficient `g11` (with
//! `g = g11 dr² + rho² dΩ²`), the areal radius `rho`, and the two
//! extrinsic-curvature eigenvalues `ka` (radial) and `kb` (tangential),
//! so that `k^{ij} = n^i n^j ka + (g^{ij} − n^i n^j) kb`.
//!
//! Each field is either closed-form (value plus first and second
//! derivative callables, evaluable anywhere in the domain) or tabulated
//! (one sample per grid node; derivatives and off-node values come from
//! the local-cubic kernels in [`crate::numerics`]).

use crate::numerics;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

/// Smallest admissible grid.
pub const MIN_SAMPLES: usize = 16;

/// Errors from constructing, validating, or persisting radial data.
#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("grid must be strictly increasing (violated at index {index}: {left} >= {right})")]
    NonMonotoneGrid { index: usize, left: f64, right: f64 },
    #[error("grid has {got} samples but at least {MIN_SAMPLES} are required")]
    TooFewSamples { got: usize },
    #[error("grid value at index {index} is not finite")]
    NonFiniteGrid { index: usize },
    #[error("ball grids must start exactly at r = 0 (got r[0] = {got})")]
    BallMustStartAtZero { got: f64 },
    #[error("annulus grids must start at r > 0")]
    AnnulusMustStartPositive,
    #[error("field {field} is tabulated with {got} samples but the grid has {want} nodes")]
    LengthMismatch { field: FieldKind, got: usize, want: usize },
    #[error("field {field} carries units {got:?} but must carry {want:?}")]
    UnitsMismatch { field: FieldKind, got: Units, want: Units },
    #[error("data set is invalid:\n{}", violations.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Validation { violations: Vec<Violation> },
    #[error("family parameter {name} = {value} is out of range: {why}")]
    BadFamilyParameter { name: &'static str, value: f64, why: &'static str },
    #[error("family {family} requires {constraint}")]
    FamilyDomain { family: &'static str, constraint: String },
    #[error("refinement factor must be at least 2 (got {got})")]
    BadRefineFactor { got: usize },
    #[error("geometric grids need ratio in (0.5, 2) excluding 1 (got {got})")]
    BadGeometricRatio { got: f64 },
    #[error("unsupported schema {got:?} (expected {SCHEMA:?})")]
    BadSchema { got: String },
    #[error("unknown domain tag {got:?} (expected \"ball\" or \"annulus\")")]
    BadDomainTag { got: String },
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("JSON error on {path}: {source}")]
    Json { path: String, source: serde_json::Error },
}

/// One physics violation found by [`InitialData::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Offending field, when the violation is field-specific.
    pub field: Option<FieldKind>,
    /// Offending node index, when point-like.
    pub index: Option<usize>,
    /// What went wrong.
    pub kind: ViolationKind,
}

/// Classification of physics violations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `g11 <= 0` somewhere.
    NonPositiveMetric,
    /// `rho <= 0` at a positive radius.
    NonPositiveArealRadius,
    /// A field sample or closed-form value is NaN/inf.
    NonFinite,
    /// Ball data with `rho(0) != 0`.
    CenterArealRadius,
    /// Ball data with `rho_,r(0) != 1`.
    CenterArealSlope,
    /// Ball data with `g11(0) != 1`.
    CenterMetric,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ViolationKind::NonPositiveMetric => write!(f, "g11 must be positive")?,
            ViolationKind::NonPositiveArealRadius => write!(f, "rho must be positive away from the center")?,
            ViolationKind::NonFinite => write!(f, "non-finite value")?,
            ViolationKind::CenterArealRadius => write!(f, "regular center requires rho(0) = 0")?,
            ViolationKind::CenterArealSlope => write!(f, "regular center requires rho_,r(0) = 1")?,
            ViolationKind::CenterMetric => write!(f, "regular center requires g11(0) = 1")?,
        }
        if let Some(field) = self.field {
            write!(f, " [field {field}]")?;
        }
        if let Some(index) = self.index {
            write!(f, " [node {index}]")?;
        }
        Ok(())
    }
}

/// Ball (contains the center) or annulus domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Ball,
    Annulus,
}

/// The four radial profiles of a data set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    G11,
    Rho,
    Ka,
    Kb,
}

impl FieldKind {
    /// Units this field must carry.
    pub fn units(self) -> Units {
        match self {
            FieldKind::G11 => Units::Dimensionless,
            FieldKind::Rho => Units::Length,
            FieldKind::Ka | FieldKind::Kb => Units::InverseLength,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FieldKind::G11 => "g11",
            FieldKind::Rho => "rho",
            FieldKind::Ka => "ka",
            FieldKind::Kb => "kb",
        };
        write!(f, "{name}")
    }
}

/// Dimensional tag carried by every field provider (geometrized units,
/// G = c = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Dimensionless,
    Length,
    InverseLength,
}

/// Radial grid: strictly increasing nodes plus the domain tag.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    r: Vec<f64>,
    domain: Domain,
    /// Exact uniform spacing, when the grid is uniform.
    uniform_h: Option<f64>,
}

impl RadialGrid {
    /// Wrap explicit node coordinates.
    pub fn new(r: Vec<f64>, domain: Domain) -> Result<Self, DataError> {
        if r.len() < MIN_SAMPLES {
            return Err(DataError::TooFewSamples { got: r.len() });
        }
        for (i, &v) in r.iter().enumerate() {
            if !v.is_finite() {
                return Err(DataError::NonFiniteGrid { index: i });
            }
        }
        for i in 0..r.len() - 1 {
            if r[i] >= r[i + 1] {
                return Err(DataError::NonMonotoneGrid { index: i, left: r[i], right: r[i + 1] });
            }
        }
        match domain {
            Domain::Ball if r[0] != 0.0 => return Err(DataError::BallMustStartAtZero { got: r[0] }),
            Domain::Annulus if r[0] <= 0.0 => return Err(DataError::AnnulusMustStartPositive),
            _ => {}
        }
        let n = r.len();
        let h = (r[n - 1] - r[0]) / (n - 1) as f64;
        let span = r[n - 1] - r[0];
        let uniform = r
            .iter()
            .enumerate()
            .all(|(i, &v)| (v - (r[0] + i as f64 * h)).abs() <= 1e-12 * span);
        Ok(Self { r, domain, uniform_h: uniform.then_some(h) })
    }

    /// Uniform grid of `n` nodes on `[r_min, r_max]`.
    pub fn uniform(r_min: f64, r_max: f64, n: usize, domain: Domain) -> Result<Self, DataError> {
        let r: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    r_max
                } else {
                    r_min + (r_max - r_min) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        Self::new(r, domain)
    }

    /// Geometrically graded grid: adjacent spacings have the fixed `ratio`.
    pub fn geometric(r_min: f64, r_max: f64, n: usize, ratio: f64, domain: Domain) -> Result<Self, DataError> {
        if !(0.5..2.0).contains(&ratio) || ratio == 1.0 {
            return Err(DataError::BadGeometricRatio { got: ratio });
        }
        let total: f64 = (ratio.powi(n as i32 - 1) - 1.0) / (ratio - 1.0);
        let h0 = (r_max - r_min) / total;
        let mut r = Vec::with_capacity(n);
        let mut acc = numerics::Compensated::default();
        acc.add(r_min);
        r.push(r_min);
        let mut h = h0;
        for i in 1..n {
            acc.add(h);
            r.push(if i == n - 1 { r_max } else { acc.value() });
            h *= ratio;
        }
        Self::new(r, domain)
    }

    /// Node coordinates.
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    /// Always false: constructors enforce a minimum sample count.
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Ball or annulus.
    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Inner radius.
    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    /// Outer radius.
    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Per-interval increments; exact when the grid is uniform.
    pub fn increments(&self) -> Vec<f64> {
        match self.uniform_h {
            Some(h) => vec![h; self.r.len() - 1],
            None => self.r.windows(2).map(|p| p[1] - p[0]).collect(),
        }
    }

    /// Whether the grid is uniformly spaced.
    pub fn is_uniform(&self) -> bool {
        self.uniform_h.is_some()
    }
}

/// Closed-form field: value and first two derivatives, evaluable at any
/// radius in the domain.
#[derive(Clone)]
pub struct AnalyticField {
    pub value: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d1: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub d2: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl AnalyticField {
    /// Build from three closures.
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { value: Arc::new(value), d1: Arc::new(d1), d2: Arc::new(d2) }
    }

    /// Constant field.
    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0, |_| 0.0)
    }
}

impl fmt::Debug for AnalyticField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("AnalyticField{..}")
    }
}

/// Field representation: closed-form or per-node samples.
#[derive(Debug, Clone)]
pub enum Repr {
    Analytic(AnalyticField),
    Tabulated(Vec<f64>),
}

/// A radial field provider: units tag plus representation.
#[derive(Debug, Clone)]
pub struct FieldProvider {
    pub units: Units,
    pub repr: Repr,
}

impl FieldProvider {
    /// Closed-form provider.
    pub fn analytic(units: Units, field: AnalyticField) -> Self {
        Self { units, repr: Repr::Analytic(field) }
    }

    /// Tabulated provider (one sample per grid node).
    pub fn tabulated(units: Units, samples: Vec<f64>) -> Self {
        Self { units, repr: Repr::Tabulated(samples) }
    }

    fn is_analytic(&self) -> bool {
        matches!(self.repr, Repr::Analytic(_))
    }
}

/// Built-in closed-form families.
///
/// Serialized as `{"name": ..., parameters...}` inside the data-file
/// `family` slot so that loaded data keeps its provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Flat slice of flat spacetime: `g11 = 1`, `rho = r`, `k = 0`.
    Minkowski,
    /// Static slicing outside a black hole of mass `m`: annulus with
    /// `r_min > 2m`, `g11 = (1 − 2m/r)⁻¹`, `k = 0`.
    SchwarzschildTs { m: f64 },
    /// Flat slicing of the same geometry: annulus, `g11 = 1`,
    /// `kb = −√(2m/r³)`, `ka = −kb/2`.
    PainleveGullstrand { m: f64 },
    /// Interior of constant energy density `mu0` out to `r_star`, matched
    /// to the static vacuum exterior.
    ConstantDensityStar { mu0: f64, r_star: f64 },
    /// Flat metric with `kb = −k0`, `ka = −k0 (1 + beta r / scale)`.
    UniformCollapse { k0: f64, beta: f64, scale: f64 },
    /// Time-symmetric smooth bump: mass profile
    /// `m(r) = amplitude · (1 − exp(−(r/width)³))`, `g11 = (1 − 2m/r)⁻¹`.
    GaussianBlob { amplitude: f64, width: f64 },
}

impl FamilySpec {
    /// Short family tag for labels and reports.
    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::Minkowski => "minkowski",
            FamilySpec::SchwarzschildTs { .. } => "schwarzschild_ts",
            FamilySpec::PainleveGullstrand { .. } => "painleve_gullstrand",
            FamilySpec::ConstantDensityStar { .. } => "constant_density_star",
            FamilySpec::UniformCollapse { .. } => "uniform_collapse",
            FamilySpec::GaussianBlob { .. } => "gaussian_blob",
        }
    }
}

/// A complete initial-data set on a radial grid.
#[derive(Debug, Clone)]
pub struct InitialData {
    grid: RadialGrid,
    g11: FieldProvider,
    rho: FieldProvider,
    ka: FieldProvider,
    kb: FieldProvider,
    /// Free-form label carried through reports.
    pub label: String,
    /// Provenance when the set came from a built-in family.
    pub family: Option<FamilySpec>,
}

impl InitialData {
    /// Assemble a data set; checks structure (lengths, units) but not
    /// physics — call [`InitialData::validate`] for that.
    pub fn new(
        grid: RadialGrid,
        g11: FieldProvider,
        rho: FieldProvider,
        ka: FieldProvider,
        kb: FieldProvider,
        label: impl Into<String>,
    ) -> Result<Self, DataError> {
        let want = grid.len();
        for (kind, fp) in [
            (FieldKind::G11, &g11),
            (FieldKind::Rho, &rho),
            (FieldKind::Ka, &ka),
            (FieldKind::Kb, &kb),
        ] {
            if fp.units != kind.units() {
                return Err(DataError::UnitsMismatch { field: kind, got: fp.units, want: kind.units() });
            }
            if let Repr::Tabulated(v) = &fp.repr {
                if v.len() != want {
                    return Err(DataError::LengthMismatch { field: kind, got: v.len(), want });
                }
            }
        }
        Ok(Self { grid, g11, rho, ka, kb, label: label.into(), family: None })
    }

    /// The grid.
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Provider for one field.
    pub fn provider(&self, kind: FieldKind) -> &FieldProvider {
        match kind {
            FieldKind::G11 => &self.g11,
            FieldKind::Rho => &self.rho,
            FieldKind::Ka => &self.ka,
            FieldKind::Kb => &self.kb,
        }
    }

    /// Whether every field is closed-form.
    pub fn is_analytic(&self) -> bool {
        self.g11.is_analytic() && self.rho.is_analytic() && self.ka.is_analytic() && self.kb.is_analytic()
    }

    /// Whether the extrinsic curvature vanishes identically on the grid.
    pub fn is_time_symmetric(&self) -> bool {
        let ka = self.samples(FieldKind::Ka);
        let kb = self.samples(FieldKind::Kb);
        ka.iter().chain(kb.iter()).all(|&v| v == 0.0)
    }

    /// Field values at the grid nodes.
    pub fn samples(&self, kind: FieldKind) -> Vec<f64> {
        match &self.provider(kind).repr {
            Repr::Analytic(f) => self.grid.r().iter().map(|&r| (f.value)(r)).collect(),
            Repr::Tabulated(v) => v.clone(),
        }
    }

    /// Derivative of order 1 or 2 at the grid nodes: exact closures for
    /// closed-form fields, second-order stencils for tabulated ones.
    pub fn derivative(&self, kind: FieldKind, order: usize) -> Vec<f64> {
        assert!(order == 1 || order == 2, "derivative order must be 1 or 2");
        match &self.provider(kind).repr {
            Repr::Analytic(f) => {
                let d = if order == 1 { &f.d1 } else { &f.d2 };
                self.grid.r().iter().map(|&r| d(r)).collect()
            }
            Repr::Tabulated(v) => {
                numerics::derivative_from_increments(&self.grid.increments(), v, order)
            }
        }
    }

    /// Pointwise view of one field (value/d1/d2 anywhere in the domain).
    pub fn eval(&self, kind: FieldKind) -> FieldEval<'_> {
        FieldEval { grid: &self.grid, repr: &self.provider(kind).repr }
    }

    /// Physics validation: positivity, finiteness, and the regular-center
    /// conditions on ball domains. Returns every violation found.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.grid.len();
        for kind in [FieldKind::G11, FieldKind::Rho, FieldKind::Ka, FieldKind::Kb] {
            let vals = self.samples(kind);
            for (i, &v) in vals.iter().enumerate() {
                if !v.is_finite() {
                    out.push(Violation { field: Some(kind), index: Some(i), kind: ViolationKind::NonFinite });
                }
            }
            match kind {
                FieldKind::G11 => {
                    for (i, &v) in vals.iter().enumerate() {
                        if v.is_finite() && v <= 0.0 {
                            out.push(Violation {
                                field: Some(kind),
                                index: Some(i),
                                kind: ViolationKind::NonPositiveMetric,
                            });
                        }
                    }
                }
                FieldKind::Rho => {
                    let start = if self.grid.domain() == Domain::Ball { 1 } else { 0 };
                    for (i, &v) in vals.iter().enumerate().skip(start) {
                        if v.is_finite() && v <= 0.0 {
                            out.push(Violation {
                                field: Some(kind),
                                index: Some(i),
                                kind: ViolationKind::NonPositiveArealRadius,
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        if self.grid.domain() == Domain::Ball && n >= 3 {
            // center conditions; tolerance scales with h^2 for tabulated data
            let h = self.grid.r()[1] - self.grid.r()[0];
            let tol = if self.is_analytic() { 1e-10 } else { 10.0 * h * h };
            let rho0 = self.samples(FieldKind::Rho)[0];
            let drho0 = self.derivative(FieldKind::Rho, 1)[0];
            let g0 = self.samples(FieldKind::G11)[0];
            if rho0.abs() > tol * self.grid.r_max().max(1.0) {
                out.push(Violation { field: Some(FieldKind::Rho), index: Some(0), kind: ViolationKind::CenterArealRadius });
            }
            if (drho0 - 1.0).abs() > tol.max(1e-10) {
                out.push(Violation { field: Some(FieldKind::Rho), index: Some(0), kind: ViolationKind::CenterArealSlope });
            }
            if (g0 - 1.0).abs() > tol.max(1e-10) {
                out.push(Violation { field: Some(FieldKind::G11), index: Some(0), kind: ViolationKind::CenterMetric });
            }
        }
        out
    }

    /// Like [`InitialData::violations`] but as a hard error.
    pub fn validate(&self) -> Result<(), DataError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(DataError::Validation { violations })
        }
    }

    /// Refined copy: every interval is split into `factor` equal pieces
    /// ((n−1)·factor + 1 nodes). Closed-form fields are re-sampled exactly;
    /// tabulated fields are filled by local-cubic interpolation, with the
    /// original nodes kept bit-exact.
    pub fn refine(&self, factor: usize) -> Result<InitialData, DataError> {
        if factor < 2 {
            return Err(DataError::BadRefineFactor { got: factor });
        }
        let old = self.grid.r();
        let n = old.len();
        let mut r = Vec::with_capacity((n - 1) * factor + 1);
        for i in 0..n - 1 {
            r.push(old[i]);
            for j in 1..factor {
                r.push(old[i] + (old[i + 1] - old[i]) * j as f64 / factor as f64);
            }
        }
        r.push(old[n - 1]);
        let grid = RadialGrid::new(r, self.grid.domain())?;
        let refit = |fp: &FieldProvider| -> FieldProvider {
            match &fp.repr {
                Repr::Analytic(f) => FieldProvider::analytic(fp.units, f.clone()),
                Repr::Tabulated(v) => {
                    let vals: Vec<f64> = grid
                        .r()
                        .iter()
                        .enumerate()
                        .map(|(i, &rq)| {
                            if i % factor == 0 {
                                v[i / factor]
                            } else {
                                numerics::interp_local_cubic(old, v, rq, 0)
                            }
                        })
                        .collect();
                    FieldProvider::tabulated(fp.units, vals)
                }
            }
        };
        let (g11, rho, ka, kb) =
            (refit(&self.g11), refit(&self.rho), refit(&self.ka), refit(&self.kb));
        let mut out = InitialData::new(grid, g11, rho, ka, kb, self.label.clone())?;
        out.family = self.family.clone();
        Ok(out)
    }

    /// Copy with every field sampled onto the grid (drops closed forms;
    /// family metadata is kept).
    pub fn tabulate(&self) -> InitialData {
        let mut out = InitialData::new(
            self.grid.clone(),
            FieldProvider::tabulated(Units::Dimensionless, self.samples(FieldKind::G11)),
            FieldProvider::tabulated(Units::Length, self.samples(FieldKind::Rho)),
            FieldProvider::tabulated(Units::InverseLength, self.samples(FieldKind::Ka)),
            FieldProvider::tabulated(Units::InverseLength, self.samples(FieldKind::Kb)),
            self.label.clone(),
        )
        .expect("tabulating a valid data set cannot fail");
        out.family = self.family.clone();
        out
    }
}

/// Pointwise view of one field, usable at any radius in the domain.
#[derive(Clone, Copy)]
pub struct FieldEval<'a> {
    grid: &'a RadialGrid,
    repr: &'a Repr,
}

impl FieldEval<'_> {
    /// Field value at `r`.
    pub fn value(&self, r: f64) -> f64 {
        match self.repr {
            Repr::Analytic(f) => (f.value)(r),
            Repr::Tabulated(v) => numerics::interp_local_cubic(self.grid.r(), v, r, 0),
        }
    }

    /// First derivative at `r`.
    pub fn d1(&self, r: f64) -> f64 {
        match self.repr {
            Repr::Analytic(f) => (f.d1)(r),
            Repr::Tabulated(v) => numerics::interp_local_cubic(self.grid.r(), v, r, 1),
        }
    }

    /// Second derivative at `r`.
    pub fn d2(&self, r: f64) -> f64 {
        match self.repr {
            Repr::Analytic(f) => (f.d2)(r),
            Repr::Tabulated(v) => numerics::interp_local_cubic(self.grid.r(), v, r, 2),
        }
    }
}

// --------------------------------------------------------------- families

fn flat_rho() -> AnalyticField {
    AnalyticField::new(|r| r, |_| 1.0, |_| 0.0)
}

/// Build a closed-form data set from a family spec on the given grid.
///
/// Family-specific domain constraints are enforced here (for example the
/// flat-slicing family needs an annulus, and the static-exterior family
/// needs `r_min > 2m`).
pub fn build_family(spec: &FamilySpec, grid: RadialGrid) -> Result<InitialData, DataError> {
    let positive = |name: &'static str, value: f64| -> Result<(), DataError> {
        if !(value.is_finite() && value > 0.0) {
            return Err(DataError::BadFamilyParameter { name, value, why: "must be positive and finite" });
        }
        Ok(())
    };
    let label;
    let (g11, rho, ka, kb) = match spec {
        FamilySpec::Minkowski => {
            label = "minkowski".to_string();
            (
                AnalyticField::constant(1.0),
                flat_rho(),
                AnalyticField::constant(0.0),
                AnalyticField::constant(0.0),
            )
        }
        FamilySpec::SchwarzschildTs { m } => {
            positive("m", *m)?;
            if grid.domain() != Domain::Annulus || grid.r_min() <= 2.0 * m {
                return Err(DataError::FamilyDomain {
                    family: "schwarzschild_ts",
                    constraint: format!("an annulus with r_min > 2m = {}", 2.0 * m),
                });
            }
            let m = *m;
            label = format!("schwarzschild_ts m={m}");
            (
                AnalyticField::new(
                    move |r| 1.0 / (1.0 - 2.0 * m / r),
                    move |r| {
                        let u = 1.0 - 2.0 * m / r;
                        -(2.0 * m / (r * r)) / (u * u)
                    },
                    move |r| {
                        let u = 1.0 - 2.0 * m / r;
                        let up = 2.0 * m / (r * r);
                        let upp = -4.0 * m / (r * r * r);
                        2.0 * up * up / (u * u * u) - upp / (u * u)
                    },
                ),
                flat_rho(),
                AnalyticField::constant(0.0),
                AnalyticField::constant(0.0),
            )
        }
        FamilySpec::PainleveGullstrand { m } => {
            positive("m", *m)?;
            if grid.domain() != Domain::Annulus {
                return Err(DataError::FamilyDomain {
                    family: "painleve_gullstrand",
                    constraint: "an annulus (kb ~ r^(-3/2) is singular at the center)".to_string(),
                });
            }
            let c = (2.0 * m).sqrt();
            label = format!("painleve_gullstrand m={m}");
            (
                AnalyticField::constant(1.0),
                flat_rho(),
                AnalyticField::new(
                    move |r| 0.5 * c * r.powf(-1.5),
                    move |r| -0.75 * c * r.powf(-2.5),
                    move |r| 1.875 * c * r.powf(-3.5),
                ),
                AnalyticField::new(
                    move |r| -c * r.powf(-1.5),
                    move |r| 1.5 * c * r.powf(-2.5),
                    move |r| -3.75 * c * r.powf(-3.5),
                ),
            )
        }
        FamilySpec::ConstantDensityStar { mu0, r_star } => {
            positive("mu0", *mu0)?;
            positive("r_star", *r_star)?;
            let c = 8.0 * std::f64::consts::PI * mu0 / 3.0;
            if c * r_star * r_star >= 1.0 {
                return Err(DataError::BadFamilyParameter {
                    name: "mu0",
                    value: *mu0,
                    why: "(8π/3)·mu0·r_star² must stay below 1 (no horizon inside the star)",
                });
            }
            let rs = *r_star;
            let mtot = 4.0 * std::f64::consts::PI / 3.0 * mu0 * rs * rs * rs;
            label = format!("constant_density_star mu0={mu0} r_star={r_star}");
            // interior: u = c r²; exterior: u = 2M/r (continuous at r_star)
            (
                AnalyticField::new(
                    move |r| {
                        if r <= rs {
                            1.0 / (1.0 - c * r * r)
                        } else {
                            1.0 / (1.0 - 2.0 * mtot / r)
                        }
                    },
                    move |r| {
                        if r <= rs {
                            let u = 1.0 - c * r * r;
                            2.0 * c * r / (u * u)
                        } else {
                            let u = 1.0 - 2.0 * mtot / r;
                            -(2.0 * mtot / (r * r)) / (u * u)
                        }
                    },
                    move |r| {
                        if r <= rs {
                            let u = 1.0 - c * r * r;
                            2.0 * c / (u * u) + 8.0 * c * c * r * r / (u * u * u)
                        } else {
                            let u = 1.0 - 2.0 * mtot / r;
                            let up = 2.0 * mtot / (r * r);
                            let upp = -4.0 * mtot / (r * r * r);
                            2.0 * up * up / (u * u * u) - upp / (u * u)
                        }
                    },
                ),
                flat_rho(),
                AnalyticField::constant(0.0),
                AnalyticField::constant(0.0),
            )
        }
        FamilySpec::UniformCollapse { k0, beta, scale } => {
            positive("k0", *k0)?;
            positive("scale", *scale)?;
            if !(beta.is_finite() && *beta >= 0.0) {
                return Err(DataError::BadFamilyParameter {
                    name: "beta",
                    value: *beta,
                    why: "must be finite and nonnegative",
                });
            }
            let (k0v, slope) = (*k0, k0 * beta / scale);
            label = format!("uniform_collapse k0={k0} beta={beta} scale={scale}");
            (
                AnalyticField::constant(1.0),
                flat_rho(),
                AnalyticField::new(move |r| -k0v - slope * r, move |_| -slope, |_| 0.0),
                AnalyticField::constant(-k0v),
            )
        }
        FamilySpec::GaussianBlob { amplitude, width } => {
            positive("amplitude", *amplitude)?;
            positive("width", *width)?;
            let (a, w) = (*amplitude, *width);
            // horizon-free guard: max 2m(r)/r over a dense sample must stay
            // below 1 or g11 is singular somewhere
            let u = blob_u(a, w);
            let r_hi = grid.r_max();
            let max_u = (1..=4096)
                .map(|i| u(r_hi * i as f64 / 4096.0))
                .fold(0.0f64, f64::max);
            if max_u >= 0.99 {
                return Err(DataError::BadFamilyParameter {
                    name: "amplitude",
                    value: a,
                    why: "2 m(r)/r reaches 0.99 somewhere: the time-symmetric slicing degenerates",
                });
            }
            label = format!("gaussian_blob amplitude={amplitude} width={width}");
            let (u0, du0, ddu0) = (blob_u(a, w), blob_du(a, w), blob_ddu(a, w));
            let (u1, du1) = (blob_u(a, w), blob_du(a, w));
            (
                AnalyticField::new(
                    move |r| 1.0 / (1.0 - u0(r)),
                    move |r| {
                        let g = 1.0 / (1.0 - u1(r));
                        du1(r) * g * g
                    },
                    move |r| {
                        let g = 1.0 / (1.0 - u(r));
                        ddu0(r) * g * g + 2.0 * du0(r) * du0(r) * g * g * g
                    },
                ),
                flat_rho(),
                AnalyticField::constant(0.0),
                AnalyticField::constant(0.0),
            )
        }
    };
    let mut data = InitialData::new(
        grid,
        FieldProvider::analytic(Units::Dimensionless, g11),
        FieldProvider::analytic(Units::Length, rho),
        FieldProvider::analytic(Units::InverseLength, ka),
        FieldProvider::analytic(Units::InverseLength, kb),
        label,
    )?;
    data.family = Some(spec.clone());
    data.validate()?;
    Ok(data)
}

// u(r) = 2 m(r)/r for the smooth bump, with a series branch near the center
// (the direct form is 0/0 there). Series truncation error is O((r/w)^8).
fn blob_u(a: f64, w: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |r: f64| {
        let x = r / w;
        if x < 1e-3 {
            2.0 * a / w * (x * x - 0.5 * x.powi(5))
        } else {
            2.0 * a * (-(-x.powi(3)).exp_m1()) / r
        }
    }
}

fn blob_du(a: f64, w: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |r: f64| {
        let x = r / w;
        if x < 1e-3 {
            2.0 * a / (w * w) * (2.0 * x - 2.5 * x.powi(4))
        } else {
            let e = (-x.powi(3)).exp();
            let m = a * (-(-x.powi(3)).exp_m1());
            let dm = 3.0 * a / w * x * x * e;
            2.0 * dm / r - 2.0 * m / (r * r)
        }
    }
}

fn blob_ddu(a: f64, w: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |r: f64| {
        let x = r / w;
        if x < 1e-3 {
            2.0 * a / (w * w * w) * (2.0 - 10.0 * x.powi(3))
        } else {
            let e = (-x.powi(3)).exp();
            let m = a * (-(-x.powi(3)).exp_m1());
            let dm = 3.0 * a / w * x * x * e;
            let ddm = 3.0 * a / (w * w) * e * (2.0 * x - 3.0 * x.powi(4));
            2.0 * ddm / r - 4.0 * dm / (r * r) + 4.0 * m / (r * r * r)
        }
    }
}

// -------------------------------------------------------------- persistence

/// Schema tag for the JSON data-file format.
pub const SCHEMA: &str = "collapse-kit/v1";

#[derive(Serialize, Deserialize)]
struct FileFields {
    g11: Vec<f64>,
    rho: Vec<f64>,
    ka: Vec<f64>,
    kb: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DataFile {
    schema: String,
    domain: Domain,
    label: String,
    grid: Vec<f64>,
    fields: FileFields,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    family: Option<FamilySpec>,
}

/// serde_json formatter that prints every float with 17 significant digits
/// (lossless for f64) and keeps non-finite values as `null`.
struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serialize any value to JSON with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// Render a data set to the JSON document format written by
/// [`save_data`] (closed-form fields become samples; family metadata
/// rides along). Numbers carry 17 significant digits, enough to
/// reproduce every f64 bit-exactly on load.
pub fn data_json_string(data: &InitialData) -> Result<String, DataError> {
    let file = DataFile {
        schema: SCHEMA.to_string(),
        domain: data.grid().domain(),
        label: data.label.clone(),
        grid: data.grid().r().to_vec(),
        fields: FileFields {
            g11: data.samples(FieldKind::G11),
            rho: data.samples(FieldKind::Rho),
            ka: data.samples(FieldKind::Ka),
            kb: data.samples(FieldKind::Kb),
        },
        family: data.family.clone(),
    };
    to_json_string(&file)
        .map_err(|source| DataError::Json { path: "<string>".to_string(), source })
}

/// Save a data set as JSON (see [`data_json_string`] for the format).
pub fn save_data(data: &InitialData, path: impl AsRef<Path>) -> Result<(), DataError> {
    let path = path.as_ref();
    let text = data_json_string(data)?;
    std::fs::write(path, text)
        .map_err(|source| DataError::Io { path: path.display().to_string(), source })
}

/// Load a data set saved by [`save_data`]. Samples are authoritative: the
/// result is tabulated even when family metadata is present.
pub fn load_data(path: impl AsRef<Path>) -> Result<InitialData, DataError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| DataError::Io { path: path.display().to_string(), source })?;
    let file: DataFile = serde_json::from_str(&text)
        .map_err(|source| DataError::Json { path: path.display().to_string(), source })?;
    if file.schema != SCHEMA {
        return Err(DataError::BadSchema { got: file.schema });
    }
    let grid = RadialGrid::new(file.grid, file.domain)?;
    let mut data = InitialData::new(
        grid,
        FieldProvider::tabulated(Units::Dimensionless, file.fields.g11),
        FieldProvider::tabulated(Units::Length, file.fields.rho),
        FieldProvider::tabulated(Units::InverseLength, file.fields.ka),
        FieldProvider::tabulated(Units::InverseLength, file.fields.kb),
        file.label,
    )?;
    data.family = file.family;
    Ok(data)
}
