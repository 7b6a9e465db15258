//! The built-in catalog. Every entry carries closed-form derivatives.

use std::sync::Arc;

use super::{
    Analytic, Curvature, Curve, FGenerator, GTransform, Normalization, Params, ScalarFn,
    TransformParts,
};
use crate::error::{Error, Result};

const INF: f64 = f64::INFINITY;

/// Anything the catalog can return.
#[derive(Clone, Debug)]
pub enum CatalogItem {
    Generator(FGenerator),
    Transform(GTransform),
    Curve(Curve),
}

const GENERATORS: &[&str] = &[
    "kl",
    "reverse_kl",
    "squared_hellinger",
    "jensen_shannon",
    "alpha",
    "pearson",
    "chi2",
    "triangular",
    "le_cam",
    "hellinger_order",
    "power",
    "power_theta",
    "sqrt",
    "sin_tminus",
    "one_minus_sqrt",
    "one_minus_power",
];

const TRANSFORMS: &[&str] = &["x", "identity", "pow", "log1p", "neg_log1m", "log_sinh", "renyi_G", "exp_m1"];

const CURVES: &[&str] = &["tplus_ratio", "tminus_gs", "power_shape", "log1p_shape", "sin_tminus_g"];

pub fn generator_names() -> &'static [&'static str] {
    GENERATORS
}

pub fn transform_names() -> &'static [&'static str] {
    TRANSFORMS
}

pub fn curve_names() -> &'static [&'static str] {
    CURVES
}

/// Looks `name` up among generators, then transforms, then curves.
pub fn catalog_lookup(name: &str, params: &Params) -> Result<CatalogItem> {
    if GENERATORS.contains(&name) {
        generator(name, params).map(CatalogItem::Generator)
    } else if TRANSFORMS.contains(&name) {
        transform(name, params).map(CatalogItem::Transform)
    } else if CURVES.contains(&name) {
        curve(name, params).map(CatalogItem::Curve)
    } else {
        Err(Error::UnknownName(name.to_string()))
    }
}

fn arc(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}

fn out_of_range(name: &str, detail: impl Into<String>) -> Error {
    Error::ParameterOutOfRange { name: name.to_string(), detail: detail.into() }
}

fn get(name: &str, params: &Params, key: &str) -> Result<f64> {
    match params.get(key) {
        Some(v) if v.is_finite() => Ok(*v),
        Some(v) => Err(out_of_range(name, format!("{key} = {v} is not finite"))),
        None => Err(out_of_range(name, format!("missing parameter `{key}`"))),
    }
}

fn only(name: &str, params: &Params, keys: &[&str]) -> Result<()> {
    match params.keys().find(|k| !keys.contains(&k.as_str())) {
        Some(k) => Err(out_of_range(name, format!("unexpected parameter `{k}`"))),
        None => Ok(()),
    }
}

fn alpha_param(name: &str, params: &Params) -> Result<f64> {
    let a = get(name, params, "alpha")?;
    if a <= 0.0 || a == 1.0 {
        return Err(out_of_range(name, format!("alpha = {a} must lie in (0,1)∪(1,∞)")));
    }
    Ok(a)
}

fn unit_open(name: &str, params: &Params, key: &str) -> Result<f64> {
    let s = get(name, params, key)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(out_of_range(name, format!("{key} = {s} must lie in (0,1)")));
    }
    Ok(s)
}

pub fn generator(name: &str, params: &Params) -> Result<FGenerator> {
    use Curvature::*;
    use Normalization::*;
    let z = |n: &str, a: Analytic| FGenerator::analytic(n, params.clone(), ZeroAtOne, Convex, a);
    let g = match name {
        "kl" => {
            only(name, params, &[])?;
            z(name, Analytic {
                f: arc(|x| if x == 0.0 { 0.0 } else { x * x.ln() }),
                d1: arc(|x| x.ln() + 1.0),
                d2: arc(|x| 1.0 / x),
                d3: Some(arc(|x| -1.0 / (x * x))),
                d4: Some(arc(|x| 2.0 / (x * x * x))),
                f0: 0.0,
                slope_inf: INF,
            })
        }
        "reverse_kl" => {
            only(name, params, &[])?;
            z(name, Analytic {
                f: arc(|x| -x.ln()),
                d1: arc(|x| -1.0 / x),
                d2: arc(|x| 1.0 / (x * x)),
                d3: Some(arc(|x| -2.0 / x.powi(3))),
                d4: Some(arc(|x| 6.0 / x.powi(4))),
                f0: INF,
                slope_inf: 0.0,
            })
        }
        "squared_hellinger" => {
            only(name, params, &[])?;
            z(name, Analytic {
                f: arc(|x| (x.sqrt() - 1.0).powi(2)),
                d1: arc(|x| 1.0 - 1.0 / x.sqrt()),
                d2: arc(|x| 0.5 * x.powf(-1.5)),
                d3: Some(arc(|x| -0.75 * x.powf(-2.5))),
                d4: Some(arc(|x| 1.875 * x.powf(-3.5))),
                f0: 1.0,
                slope_inf: 1.0,
            })
        }
        "jensen_shannon" => {
            only(name, params, &[])?;
            let ln2 = std::f64::consts::LN_2;
            z(name, Analytic {
                f: arc(|x| {
                    let xl = if x == 0.0 { 0.0 } else { x * x.ln() };
                    xl - (1.0 + x) * ((1.0 + x) / 2.0).ln()
                }),
                d1: arc(|x| x.ln() - ((1.0 + x) / 2.0).ln()),
                d2: arc(|x| 1.0 / (x * (1.0 + x))),
                d3: Some(arc(|x| -1.0 / (x * x) + 1.0 / ((1.0 + x) * (1.0 + x)))),
                d4: Some(arc(|x| 2.0 / x.powi(3) - 2.0 / (1.0 + x).powi(3))),
                f0: ln2,
                slope_inf: ln2,
            })
        }
        "alpha" => {
            only(name, params, &["alpha"])?;
            let a = alpha_param(name, params)?;
            let c = 1.0 / (a * (a - 1.0));
            z(name, Analytic {
                f: arc(move |x| c * (x.powf(a) - 1.0)),
                d1: arc(move |x| x.powf(a - 1.0) / (a - 1.0)),
                d2: arc(move |x| x.powf(a - 2.0)),
                d3: Some(arc(move |x| (a - 2.0) * x.powf(a - 3.0))),
                d4: Some(arc(move |x| (a - 2.0) * (a - 3.0) * x.powf(a - 4.0))),
                f0: -c,
                slope_inf: if a < 1.0 { 0.0 } else { INF },
            })
        }
        "pearson" | "chi2" => {
            only(name, params, &[])?;
            z("pearson", Analytic {
                f: arc(|x| (x - 1.0) * (x - 1.0)),
                d1: arc(|x| 2.0 * (x - 1.0)),
                d2: arc(|_| 2.0),
                d3: Some(arc(|_| 0.0)),
                d4: Some(arc(|_| 0.0)),
                f0: 1.0,
                slope_inf: INF,
            })
        }
        "triangular" => {
            only(name, params, &[])?;
            z(name, Analytic {
                f: arc(|x| (x - 1.0) * (x - 1.0) / (x + 1.0)),
                d1: arc(|x| 1.0 - 4.0 / ((x + 1.0) * (x + 1.0))),
                d2: arc(|x| 8.0 / (x + 1.0).powi(3)),
                d3: Some(arc(|x| -24.0 / (x + 1.0).powi(4))),
                d4: Some(arc(|x| 96.0 / (x + 1.0).powi(5))),
                f0: 1.0,
                slope_inf: 1.0,
            })
        }
        "le_cam" => {
            only(name, params, &[])?;
            z(name, Analytic {
                f: arc(|x| (1.0 - x) / (2.0 * x + 2.0)),
                d1: arc(|x| -1.0 / ((x + 1.0) * (x + 1.0))),
                d2: arc(|x| 2.0 / (x + 1.0).powi(3)),
                d3: Some(arc(|x| -6.0 / (x + 1.0).powi(4))),
                d4: Some(arc(|x| 24.0 / (x + 1.0).powi(5))),
                f0: 0.5,
                slope_inf: 0.0,
            })
        }
        "hellinger_order" => {
            only(name, params, &["alpha"])?;
            let a = alpha_param(name, params)?;
            z(name, Analytic {
                f: arc(move |x| (x.powf(a) - 1.0) / (a - 1.0)),
                d1: arc(move |x| a * x.powf(a - 1.0) / (a - 1.0)),
                d2: arc(move |x| a * x.powf(a - 2.0)),
                d3: Some(arc(move |x| a * (a - 2.0) * x.powf(a - 3.0))),
                d4: Some(arc(move |x| a * (a - 2.0) * (a - 3.0) * x.powf(a - 4.0))),
                f0: 1.0 / (1.0 - a),
                slope_inf: if a < 1.0 { 0.0 } else { INF },
            })
        }
        "power" => {
            only(name, params, &["p"])?;
            let p = get(name, params, "p")?;
            if p == 0.0 || p == 1.0 {
                return Err(out_of_range(name, format!("p = {p} gives an affine generator")));
            }
            power(name, params.clone(), p)
        }
        "sqrt" => {
            only(name, params, &[])?;
            power(name, params.clone(), 0.5)
        }
        "power_theta" => {
            only(name, params, &["s", "theta"])?;
            let s = get(name, params, "s")?;
            let t = unit_open(name, params, "theta")?;
            if s <= 1.0 {
                return Err(out_of_range(name, format!("s = {s} must exceed 1")));
            }
            let c = s / t;
            FGenerator::analytic(name, params.clone(), OneAtOne, Convex, Analytic {
                f: arc(move |x| x.powf(s) - c * x.powf(t) + c),
                d1: arc(move |x| s * x.powf(s - 1.0) - s * x.powf(t - 1.0)),
                d2: arc(move |x| s * (s - 1.0) * x.powf(s - 2.0) - s * (t - 1.0) * x.powf(t - 2.0)),
                d3: Some(arc(move |x| {
                    s * (s - 1.0) * (s - 2.0) * x.powf(s - 3.0)
                        - s * (t - 1.0) * (t - 2.0) * x.powf(t - 3.0)
                })),
                d4: Some(arc(move |x| {
                    s * (s - 1.0) * (s - 2.0) * (s - 3.0) * x.powf(s - 4.0)
                        - s * (t - 1.0) * (t - 2.0) * (t - 3.0) * x.powf(t - 4.0)
                })),
                f0: c,
                slope_inf: INF,
            })
        }
        "sin_tminus" => {
            only(name, params, &[])?;
            sin_tminus(params.clone())
        }
        "one_minus_sqrt" => {
            only(name, params, &[])?;
            power("sqrt", Params::new(), 0.5).one_minus().renamed(name)
        }
        "one_minus_power" => {
            only(name, params, &["s"])?;
            let s = unit_open(name, params, "s")?;
            let mut g = power("power", params.clone(), s).one_minus().renamed(name);
            g.params = params.clone();
            g
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(g)
}

/// `x^p` on the `ONE_AT_ONE` track; concave for `0 < p < 1`, convex otherwise.
fn power(name: &str, params: Params, p: f64) -> FGenerator {
    let curvature = if p > 0.0 && p < 1.0 { Curvature::Concave } else { Curvature::Convex };
    FGenerator::analytic(name, params, Normalization::OneAtOne, curvature, Analytic {
        f: arc(move |x| x.powf(p)),
        d1: arc(move |x| p * x.powf(p - 1.0)),
        d2: arc(move |x| p * (p - 1.0) * x.powf(p - 2.0)),
        d3: Some(arc(move |x| p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0))),
        d4: Some(arc(move |x| p * (p - 1.0) * (p - 2.0) * (p - 3.0) * x.powf(p - 4.0))),
        f0: if p > 0.0 { 0.0 } else { INF },
        slope_inf: if p > 1.0 { INF } else { 0.0 },
    })
}

/// `√x (45 + sin log x)/160 + (115/160) x`, concave with `f(1) = 1`.
///
/// Writing `f = √x h(log x)/160 + 115x/160` with `h = 45 + sin`, the second
/// derivative is `x^{-3/2} k(log x)/160` where `k = h'' - h/4`.
fn sin_tminus(params: Params) -> FGenerator {
    let k = |u: f64| -(45.0 + 5.0 * u.sin()) / 4.0;
    let k1 = |u: f64| -1.25 * u.cos();
    let k2 = |u: f64| 1.25 * u.sin();
    FGenerator::analytic("sin_tminus", params, Normalization::OneAtOne, Curvature::Concave, Analytic {
        f: arc(|x| x.sqrt() * (45.0 + x.ln().sin()) / 160.0 + 115.0 / 160.0 * x),
        d1: arc(|x| {
            let u = x.ln();
            (22.5 + 0.5 * u.sin() + u.cos()) / (160.0 * x.sqrt()) + 115.0 / 160.0
        }),
        d2: arc(move |x| x.powf(-1.5) * k(x.ln()) / 160.0),
        d3: Some(arc(move |x| {
            let u = x.ln();
            x.powf(-2.5) * (-1.5 * k(u) + k1(u)) / 160.0
        })),
        d4: Some(arc(move |x| {
            let u = x.ln();
            x.powf(-3.5) * (3.75 * k(u) - 4.0 * k1(u) + k2(u)) / 160.0
        })),
        f0: 0.0,
        slope_inf: 115.0 / 160.0,
    })
}

pub fn transform(name: &str, params: &Params) -> Result<GTransform> {
    let tp = match name {
        "x" | "identity" => {
            only(name, params, &[])?;
            TransformParts {
                g: arc(|x| x),
                d1: arc(|_| 1.0),
                recip_d1: Some(arc(|_| 1.0)),
                inverse: Some(arc(|y| y)),
                nu: INF,
                sup: INF,
                convex: true,
                concave: true,
            }
        }
        "pow" => {
            only(name, params, &["p"])?;
            let p = get(name, params, "p")?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(out_of_range(name, format!("p = {p} must lie in (0,1]")));
            }
            TransformParts {
                g: arc(move |x| x.powf(p)),
                d1: arc(move |x| p * x.powf(p - 1.0)),
                recip_d1: Some(arc(move |x| x.powf(1.0 - p) / p)),
                inverse: Some(arc(move |y| y.powf(1.0 / p))),
                nu: INF,
                sup: INF,
                convex: p == 1.0,
                concave: true,
            }
        }
        "log1p" => {
            only(name, params, &[])?;
            TransformParts {
                g: arc(f64::ln_1p),
                d1: arc(|x| 1.0 / (1.0 + x)),
                recip_d1: Some(arc(|x| 1.0 + x)),
                inverse: Some(arc(f64::exp_m1)),
                nu: INF,
                sup: INF,
                convex: false,
                concave: true,
            }
        }
        "neg_log1m" => {
            only(name, params, &[])?;
            TransformParts {
                g: arc(|x| -(-x).ln_1p()),
                d1: arc(|x| 1.0 / (1.0 - x)),
                recip_d1: Some(arc(|x| 1.0 - x)),
                inverse: Some(arc(|y| -(-y).exp_m1())),
                nu: 1.0,
                sup: INF,
                convex: true,
                concave: false,
            }
        }
        "log_sinh" => {
            only(name, params, &[])?;
            let c = 1f64.asinh();
            TransformParts {
                g: arc(move |x| if x == 0.0 { 0.0 } else { (x + c).sinh().ln() }),
                d1: arc(move |x| 1.0 / (x + c).tanh()),
                recip_d1: Some(arc(move |x| (x + c).tanh())),
                inverse: Some(arc(move |y| y.exp().asinh() - c)),
                nu: INF,
                sup: INF,
                convex: false,
                concave: true,
            }
        }
        "renyi_G" => {
            only(name, params, &["alpha"])?;
            let a = alpha_param(name, params)?;
            let b = a - 1.0;
            TransformParts {
                g: arc(move |x| (b * x).ln_1p() / b),
                d1: arc(move |x| 1.0 / (1.0 + b * x)),
                recip_d1: Some(arc(move |x| 1.0 + b * x)),
                inverse: Some(arc(move |y| (b * y).exp_m1() / b)),
                nu: if a > 1.0 { INF } else { 1.0 / (1.0 - a) },
                sup: INF,
                convex: a < 1.0,
                concave: a > 1.0,
            }
        }
        "exp_m1" => {
            only(name, params, &[])?;
            TransformParts {
                g: arc(f64::exp_m1),
                d1: arc(f64::exp),
                recip_d1: Some(arc(|x| (-x).exp())),
                inverse: Some(arc(f64::ln_1p)),
                nu: INF,
                sup: INF,
                convex: true,
                concave: false,
            }
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(GTransform::from_parts(name, params.clone(), tp))
}

pub fn curve(name: &str, params: &Params) -> Result<Curve> {
    let c = match name {
        "tplus_ratio" => {
            only(name, params, &["b", "c"])?;
            let b = get(name, params, "b")?;
            let c = get(name, params, "c")?;
            if c <= 0.0 {
                return Err(out_of_range(name, format!("c = {c} must be positive")));
            }
            Curve::new(
                name,
                move |x| (x + b) / (x + c),
                Some(arc(move |x| (c - b) / ((x + c) * (x + c)))),
                Some(arc(move |x| 2.0 * (b - c) / (x + c).powi(3))),
            )
        }
        "tminus_gs" => {
            only(name, params, &["a", "s"])?;
            let a = get(name, params, "a")?;
            let s = unit_open(name, params, "s")?;
            if a <= 0.0 {
                return Err(out_of_range(name, format!("a = {a} must be positive")));
            }
            // g = a x^s / w with w = 1 + x^{1-s}
            Curve::new(
                name,
                move |x| a * x.powf(s) / (1.0 + x.powf(1.0 - s)),
                Some(arc(move |x| {
                    let w = 1.0 + x.powf(1.0 - s);
                    a * (s * x.powf(s - 1.0) / w - (1.0 - s) / (w * w))
                })),
                Some(arc(move |x| {
                    let w = 1.0 + x.powf(1.0 - s);
                    a * (s * (s - 1.0) * x.powf(s - 2.0) / w - s * (1.0 - s) / (x * w * w)
                        + 2.0 * (1.0 - s) * (1.0 - s) * x.powf(-s) / (w * w * w))
                })),
            )
        }
        "power_shape" => {
            only(name, params, &["gamma", "coef"])?;
            let gm = get(name, params, "gamma")?;
            let k = match params.get("coef") {
                Some(_) => get(name, params, "coef")?,
                None => (gm * (gm - 1.0)).abs(),
            };
            if k <= 0.0 {
                return Err(out_of_range(name, format!("coef = {k} must be positive")));
            }
            Curve::new(
                name,
                move |x| k * x.powf(gm),
                Some(arc(move |x| k * gm * x.powf(gm - 1.0))),
                Some(arc(move |x| k * gm * (gm - 1.0) * x.powf(gm - 2.0))),
            )
        }
        "log1p_shape" => {
            only(name, params, &[])?;
            Curve::new(
                name,
                f64::ln_1p,
                Some(arc(|x| 1.0 / (1.0 + x))),
                Some(arc(|x| -1.0 / ((1.0 + x) * (1.0 + x)))),
            )
        }
        "sin_tminus_g" => {
            only(name, params, &[])?;
            Curve::new(
                name,
                |x| x.sqrt() * (9.0 + x.ln().sin()) / 128.0,
                Some(arc(|x| {
                    let u = x.ln();
                    (4.5 + 0.5 * u.sin() + u.cos()) / (128.0 * x.sqrt())
                })),
                Some(arc(|x| {
                    let u = x.ln();
                    x.powf(-1.5) * (-u.sin() - (9.0 + u.sin()) / 4.0) / 128.0
                })),
            )
        }
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(c.with_params(params.clone()))
}
