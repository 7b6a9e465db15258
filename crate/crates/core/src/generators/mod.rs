//! Generator descriptors: convex (or concave) functions `f` on `[0, ∞)`,
//! monotone transforms `G`, admissible pairs and the range bound `D_m(f)`.

mod registry;
mod table;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{fd_first, fd_second, log_grid};

pub use registry::{
    catalog_lookup, curve, curve_names, generator, generator_names, transform, transform_names,
    CatalogItem,
};

/// A real function of one real variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Named real parameters of a parametric family, ordered by name.
pub type Params = BTreeMap<String, f64>;

/// Which value the generator takes at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Normalization {
    /// `f(1) = 0`, the usual f-divergence convention.
    ZeroAtOne,
    /// `f(1) = 1`, used by the product-form (multiplicative) reformulations.
    OneAtOne,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Curvature {
    Convex,
    Concave,
}

/// Limit data of a generator (`f(0+)` or `lim f(t)/t`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limit {
    /// A finite value or `+inf`.
    Value(f64),
    /// Sampling did not settle.
    Indeterminate,
}

impl Limit {
    pub fn value(self) -> Option<f64> {
        match self {
            Limit::Value(v) => Some(v),
            Limit::Indeterminate => None,
        }
    }
}

/// A generator `f` with its derivatives and limit data.
#[derive(Clone)]
pub struct FGenerator {
    pub name: String,
    pub params: Params,
    pub norm: Normalization,
    pub curvature: Curvature,
    f: ScalarFn,
    d1: Option<ScalarFn>,
    d2: Option<ScalarFn>,
    d3: Option<ScalarFn>,
    d4: Option<ScalarFn>,
    f0: Limit,
    slope_inf: Limit,
    fd_fallback: bool,
}

impl fmt::Debug for FGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FGenerator")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("norm", &self.norm)
            .field("curvature", &self.curvature)
            .field("f0", &self.f0)
            .field("slope_inf", &self.slope_inf)
            .finish()
    }
}

/// Analytic pieces of a generator, used by the registry.
pub(crate) struct Analytic {
    pub f: ScalarFn,
    pub d1: ScalarFn,
    pub d2: ScalarFn,
    pub d3: Option<ScalarFn>,
    pub d4: Option<ScalarFn>,
    pub f0: f64,
    pub slope_inf: f64,
}

impl FGenerator {
    pub(crate) fn analytic(
        name: &str,
        params: Params,
        norm: Normalization,
        curvature: Curvature,
        a: Analytic,
    ) -> Self {
        FGenerator {
            name: name.to_string(),
            params,
            norm,
            curvature,
            f: a.f,
            d1: Some(a.d1),
            d2: Some(a.d2),
            d3: a.d3,
            d4: a.d4,
            f0: Limit::Value(a.f0),
            slope_inf: Limit::Value(a.slope_inf),
            fd_fallback: true,
        }
    }

    /// A user-supplied generator given only by its values. Derivatives come
    /// from central differences; `f(0+)` and the limit slope are sampled.
    pub fn custom(
        name: &str,
        norm: Normalization,
        curvature: Curvature,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let f: ScalarFn = Arc::new(f);
        let f0 = sample_f0(&*f);
        let slope_inf = sample_slope(&*f);
        FGenerator {
            name: name.to_string(),
            params: Params::new(),
            norm,
            curvature,
            f,
            d1: None,
            d2: None,
            d3: None,
            d4: None,
            f0,
            slope_inf,
            fd_fallback: true,
        }
    }

    /// A generator interpolated from `(x, f(x))` samples by monotone cubic
    /// (PCHIP) interpolation, extended linearly beyond the table.
    pub fn tabulated(points: &[[f64; 2]]) -> Result<Self> {
        table::tabulated(points)
    }

    /// Disables the finite-difference fallback for missing derivatives.
    pub fn without_fd_fallback(mut self) -> Self {
        self.fd_fallback = false;
        self
    }

    /// `f(t)` for `t > 0`; `t = 0` returns the right limit `f(0+)`.
    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.f0_value()
        } else if t == f64::INFINITY {
            match self.slope_inf {
                Limit::Value(s) if s > 0.0 => f64::INFINITY,
                _ => (self.f)(t),
            }
        } else {
            (self.f)(t)
        }
    }

    pub fn d1(&self, t: f64) -> f64 {
        match &self.d1 {
            Some(d) => d(t),
            None => fd_first(&*self.f, t),
        }
    }

    /// Second derivative, analytic or by finite differences when allowed.
    pub fn d2(&self, t: f64) -> Option<f64> {
        match &self.d2 {
            Some(d) => Some(d(t)),
            None if self.fd_fallback => Some(fd_second(&*self.f, t)),
            None => None,
        }
    }

    pub fn has_d2(&self) -> bool {
        self.d2.is_some() || self.fd_fallback
    }

    pub fn f0(&self) -> Limit {
        self.f0
    }

    pub fn slope_inf(&self) -> Limit {
        self.slope_inf
    }

    fn f0_value(&self) -> f64 {
        match self.f0 {
            Limit::Value(v) => v,
            Limit::Indeterminate => (self.f)(1e-300),
        }
    }

    pub(crate) fn slope_value(&self) -> f64 {
        match self.slope_inf {
            Limit::Value(v) => v,
            Limit::Indeterminate => (self.f)(1e8) / 1e8,
        }
    }

    /// `f(t) - t f'(t)`, the derivative of `q f(p/q)` in `q`; at `t = 0` this is `f(0+)`.
    pub fn conjugate_slope(&self, t: f64) -> f64 {
        if t == 0.0 {
            self.f0_value()
        } else {
            (self.f)(t) - t * self.d1(t)
        }
    }

    pub fn is_convex(&self) -> bool {
        self.curvature == Curvature::Convex
    }

    /// `x² f''(x)` for convex generators and `-x² f''(x)` for concave ones,
    /// the curve tested by the class checkers.
    pub fn g_curve(&self) -> Curve {
        let sign = match self.curvature {
            Curvature::Convex => 1.0,
            Curvature::Concave => -1.0,
        };
        let this = self.clone();
        let eval: ScalarFn = Arc::new(move |x: f64| {
            sign * x * x * this.d2(x).expect("g_curve requires a second derivative")
        });
        let (d1, d2) = match (&self.d2, &self.d3, &self.d4) {
            (Some(f2), Some(f3), Some(f4)) => {
                let (a2, a3) = (f2.clone(), f3.clone());
                let d1: ScalarFn = Arc::new(move |x: f64| sign * (2.0 * x * a2(x) + x * x * a3(x)));
                let (b2, b3, b4) = (f2.clone(), f3.clone(), f4.clone());
                let d2: ScalarFn = Arc::new(move |x: f64| {
                    sign * (2.0 * b2(x) + 4.0 * x * b3(x) + x * x * b4(x))
                });
                (Some(d1), Some(d2))
            }
            _ => (None, None),
        };
        Curve {
            name: format!("g[{}]", self.name),
            params: self.params.clone(),
            f: eval,
            d1,
            d2,
        }
    }

    /// `f + 1`: moves a `ZERO_AT_ONE` convex generator onto the `ONE_AT_ONE` track.
    pub fn plus_one(&self) -> Result<FGenerator> {
        if self.norm != Normalization::ZeroAtOne {
            return Err(Error::NotAdmissible(format!("{} is not ZERO_AT_ONE", self.name)));
        }
        Ok(self.shifted(1.0, Normalization::OneAtOne, format!("{}+1", self.name)))
    }

    /// `f - 1`: the inverse of [`FGenerator::plus_one`].
    pub fn minus_one(&self) -> Result<FGenerator> {
        if self.norm != Normalization::OneAtOne {
            return Err(Error::NotAdmissible(format!("{} is not ONE_AT_ONE", self.name)));
        }
        Ok(self.shifted(-1.0, Normalization::ZeroAtOne, format!("{}-1", self.name)))
    }

    fn shifted(&self, c: f64, norm: Normalization, name: String) -> FGenerator {
        let f = self.f.clone();
        let f0 = match self.f0 {
            Limit::Value(v) => Limit::Value(v + c),
            l => l,
        };
        FGenerator {
            name,
            norm,
            f: Arc::new(move |t| f(t) + c),
            f0,
            ..self.clone()
        }
    }

    /// `1 - f`: swaps the convex `ZERO_AT_ONE` track and the concave `ONE_AT_ONE` track.
    pub fn one_minus(&self) -> FGenerator {
        let neg = |d: &Option<ScalarFn>| -> Option<ScalarFn> {
            d.as_ref().map(|d| {
                let d = d.clone();
                Arc::new(move |t: f64| -d(t)) as ScalarFn
            })
        };
        let f = self.f.clone();
        let norm = match self.norm {
            Normalization::ZeroAtOne => Normalization::OneAtOne,
            Normalization::OneAtOne => Normalization::ZeroAtOne,
        };
        let curvature = match self.curvature {
            Curvature::Convex => Curvature::Concave,
            Curvature::Concave => Curvature::Convex,
        };
        let flip = |l: Limit| match l {
            Limit::Value(v) => Limit::Value(-v),
            l => l,
        };
        let f0 = match self.f0 {
            Limit::Value(v) => Limit::Value(1.0 - v),
            l => l,
        };
        FGenerator {
            name: format!("1-{}", self.name),
            params: self.params.clone(),
            norm,
            curvature,
            f: Arc::new(move |t| 1.0 - f(t)),
            d1: neg(&self.d1),
            d2: neg(&self.d2),
            d3: neg(&self.d3),
            d4: neg(&self.d4),
            f0,
            slope_inf: flip(self.slope_inf),
            fd_fallback: self.fd_fallback,
        }
    }

    pub(crate) fn renamed(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    /// Checks the normalization tag and sampled midpoint convexity (or
    /// concavity) on a log-spaced grid over `[1e-4, 1e4]`.
    pub fn validate(&self) -> Result<()> {
        let target = match self.norm {
            Normalization::ZeroAtOne => 0.0,
            Normalization::OneAtOne => 1.0,
        };
        let at_one = self.eval(1.0);
        if (at_one - target).abs() > 1e-12 {
            return Err(Error::NotAdmissible(format!(
                "{}: f(1) = {at_one}, expected {target}",
                self.name
            )));
        }
        let grid = log_grid(1e-4, 1e4, 400);
        let sign = if self.is_convex() { 1.0 } else { -1.0 };
        for stride in [1usize, 3, 17, 101, 399] {
            for i in 0..grid.len().saturating_sub(stride) {
                let (a, b) = (grid[i], grid[i + stride]);
                let avg = 0.5 * (self.eval(a) + self.eval(b));
                let mid = self.eval(0.5 * (a + b));
                if sign * (mid - avg) > 1e-9 * (1.0 + avg.abs()) {
                    return Err(Error::NotAdmissible(format!(
                        "{}: midpoint {} violated at ({a}, {b})",
                        self.name,
                        if sign > 0.0 { "convexity" } else { "concavity" }
                    )));
                }
            }
        }
        Ok(())
    }
}

fn sample_f0(f: &dyn Fn(f64) -> f64) -> Limit {
    let s: Vec<f64> = [1e-8, 1e-10, 1e-12].iter().map(|&t| f(t)).collect();
    settle(&s)
}

fn sample_slope(f: &dyn Fn(f64) -> f64) -> Limit {
    let s: Vec<f64> = [1e4, 1e6, 1e8].iter().map(|&t| f(t) / t).collect();
    settle(&s)
}

/// Classifies three successive samples of a limit: converged, diverging to
/// `+inf` (monotone growth with non-shrinking steps), geometrically converging
/// (Aitken extrapolation), or indeterminate.
fn settle(s: &[f64]) -> Limit {
    if s.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
        return Limit::Indeterminate;
    }
    if s[2] == f64::INFINITY {
        return Limit::Value(f64::INFINITY);
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Limit::Indeterminate;
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-6 * a.abs().max(b.abs()) || (a - b).abs() < 1e-12;
    if close(s[1], s[2]) {
        return Limit::Value(s[2]);
    }
    let (d1, d2) = (s[1] - s[0], s[2] - s[1]);
    if d1 > 0.0 && d2 > 0.0 && d2 >= 0.5 * d1 {
        return Limit::Value(f64::INFINITY);
    }
    let ratio = d2 / d1;
    if ratio > 0.0 && ratio <= 0.5 {
        return Limit::Value(s[2] - d2 * d2 / (d2 - d1));
    }
    Limit::Indeterminate
}

/// A scalar curve `g` with optional analytic derivatives; the input of the
/// class-membership checkers.
#[derive(Clone)]
pub struct Curve {
    pub name: String,
    pub params: Params,
    f: ScalarFn,
    d1: Option<ScalarFn>,
    d2: Option<ScalarFn>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl Curve {
    pub fn new(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: Option<ScalarFn>,
        d2: Option<ScalarFn>,
    ) -> Self {
        Curve { name: name.to_string(), params: Params::new(), f: Arc::new(f), d1, d2 }
    }

    pub(crate) fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn d1(&self, x: f64) -> f64 {
        match &self.d1 {
            Some(d) => d(x),
            None => fd_first(&*self.f, x),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match &self.d2 {
            Some(d) => d(x),
            None => fd_second(&*self.f, x),
        }
    }

    pub fn has_analytic_d2(&self) -> bool {
        self.d2.is_some()
    }
}

/// A non-decreasing transform `G: [0, ν) → [0, ∞)` with `G(0) = 0`.
#[derive(Clone)]
pub struct GTransform {
    pub name: String,
    pub params: Params,
    g: ScalarFn,
    d1: Option<ScalarFn>,
    recip_d1: Option<ScalarFn>,
    inverse: Option<ScalarFn>,
    /// Domain supremum ν (may be `+inf`).
    pub nu: f64,
    /// `lim_{x→ν⁻} G(x)`, used when an argument reaches the boundary.
    pub sup: f64,
    pub convex: bool,
    pub concave: bool,
}

impl fmt::Debug for GTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GTransform")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("nu", &self.nu)
            .field("convex", &self.convex)
            .finish()
    }
}

pub(crate) struct TransformParts {
    pub g: ScalarFn,
    pub d1: ScalarFn,
    pub recip_d1: Option<ScalarFn>,
    pub inverse: Option<ScalarFn>,
    pub nu: f64,
    pub sup: f64,
    pub convex: bool,
    pub concave: bool,
}

impl GTransform {
    pub(crate) fn from_parts(name: &str, params: Params, p: TransformParts) -> Self {
        GTransform {
            name: name.to_string(),
            params,
            g: p.g,
            d1: Some(p.d1),
            recip_d1: p.recip_d1,
            inverse: p.inverse,
            nu: p.nu,
            sup: p.sup,
            convex: p.convex,
            concave: p.concave,
        }
    }

    /// A user-supplied transform; derivatives by finite differences.
    pub fn custom(
        name: &str,
        nu: f64,
        convex: bool,
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let g: ScalarFn = Arc::new(g);
        let sup = if nu.is_finite() { g(nu * (1.0 - 1e-15)) } else { f64::INFINITY };
        GTransform {
            name: name.to_string(),
            params: Params::new(),
            g,
            d1: None,
            recip_d1: None,
            inverse: None,
            nu,
            sup,
            convex,
            concave: false,
        }
    }

    /// `G(x)`, with `x ≥ ν` mapped to the boundary limit.
    pub fn eval(&self, x: f64) -> f64 {
        if x >= self.nu {
            self.sup
        } else {
            (self.g)(x)
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        if x >= self.nu {
            return f64::INFINITY;
        }
        match &self.d1 {
            Some(d) => d(x),
            None => fd_first(&*self.g, x),
        }
    }

    /// `1 / G'(x)`.
    pub fn recip_d1(&self, x: f64) -> f64 {
        match &self.recip_d1 {
            Some(u) => u(x),
            None => 1.0 / self.d1(x),
        }
    }

    pub fn inverse(&self, y: f64) -> Option<f64> {
        self.inverse.as_ref().map(|inv| inv(y))
    }

    /// Checks `G(0) = 0` and monotonicity on a sampled grid of the domain.
    pub fn validate(&self) -> Result<()> {
        if self.eval(0.0).abs() > 1e-12 {
            return Err(Error::NotAdmissible(format!("{}: G(0) = {}", self.name, self.eval(0.0))));
        }
        let grid = domain_grid(self.nu, 500);
        for w in grid.windows(2) {
            if self.eval(w[1]) < self.eval(w[0]) {
                return Err(Error::NotAdmissible(format!("{}: decreasing near {}", self.name, w[0])));
            }
        }
        Ok(())
    }
}

/// Interior sample points of `[0, ν)`: log-spaced on `[1e-4, 1e4]` for an
/// unbounded domain, evenly spaced interior points otherwise.
pub(crate) fn domain_grid(nu: f64, n: usize) -> Vec<f64> {
    if nu.is_finite() {
        (1..=n).map(|i| nu * i as f64 / (n + 1) as f64).collect()
    } else {
        log_grid(1e-4, 1e4, n)
    }
}

/// `D_m(f) = f(0) + lim_{t→∞} f(t)/t`, the universal upper bound on `D_f`.
pub fn dm_of(f: &FGenerator) -> Result<f64> {
    match (f.f0(), f.slope_inf()) {
        (Limit::Value(a), Limit::Value(b)) => Ok(a + b),
        _ => Err(Error::Indeterminate(format!("limit data of `{}` did not settle", f.name))),
    }
}

/// An admissible pair `(G, f)`: `f` convex with `f(1) = 0`, and `D_m(f) ≤ ν`.
#[derive(Clone, Debug)]
pub struct AdmissiblePair {
    pub g: GTransform,
    pub f: FGenerator,
    pub dm: f64,
}

impl AdmissiblePair {
    pub fn label(&self) -> String {
        format!("({}, {})", self.g.name, self.f.name)
    }
}

/// Builds an admissible pair, rejecting `D_m(f) > ν`.
pub fn make_pair(g: GTransform, f: FGenerator) -> Result<AdmissiblePair> {
    if f.norm != Normalization::ZeroAtOne || !f.is_convex() {
        return Err(Error::NotAdmissible(format!(
            "{} must be convex with f(1) = 0",
            f.name
        )));
    }
    let dm = dm_of(&f)?;
    if dm > g.nu {
        return Err(Error::DomainViolation { dm, nu: g.nu });
    }
    Ok(AdmissiblePair { g, f, dm })
}

/// JSON description of a generator: a registry item or a table of samples.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged, deny_unknown_fields)]
pub enum GeneratorSpec {
    Registry {
        name: String,
        #[serde(default)]
        params: Params,
    },
    Table {
        table: Vec<[f64; 2]>,
    },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<FGenerator> {
        match self {
            GeneratorSpec::Registry { name, params } => generator(name, params),
            GeneratorSpec::Table { table } => FGenerator::tabulated(table),
        }
    }
}

/// JSON description of a registry transform or curve.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct NamedSpec {
    pub name: String,
    #[serde(default)]
    pub params: Params,
}
