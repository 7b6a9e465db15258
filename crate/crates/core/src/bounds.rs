//! Fano-type, blocklength and hypothesis-testing bounds, and the
//! KL-comparison inequalities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::divergence::{f_div, gf_div};
use crate::error::{check_len, Error, Result};
use crate::generators::{generator, AdmissiblePair, FGenerator, Normalization, Params};
use crate::information::{max_igf_over_input, SolverOpts};
use crate::numeric::log_grid;
use crate::probcore::{Channel, Dist};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideCondition {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub value: f64,
    pub inputs_echo: BTreeMap<String, Value>,
    pub side_conditions: Vec<SideCondition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundResult {
    fn new(value: f64, echo: Value) -> Self {
        let inputs_echo = match echo {
            Value::Object(m) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        BoundResult { value, inputs_echo, side_conditions: Vec::new(), note: None }
    }

    fn cond(mut self, name: &str, holds: bool) -> Self {
        self.side_conditions.push(SideCondition { name: name.to_string(), holds });
        self
    }

    pub fn condition(&self, name: &str) -> Option<bool> {
        self.side_conditions.iter().find(|c| c.name == name).map(|c| c.holds)
    }
}

fn check_prob(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name: name.into(), detail: format!("{v} outside [0,1]") })
    }
}

/// `G((1/M) f(M(1−ε)) + ((M−1)/M) f(Mε/(M−1)))`. The endpoints use
/// `f(0+)` from the generator's limit data.
pub fn fano_lower(pair: &AdmissiblePair, m: u64, eps: f64) -> Result<BoundResult> {
    if !pair.g.convex {
        return Err(Error::ConvexityRequired(format!("fano_lower with G = {}", pair.g.name)));
    }
    if m < 2 {
        return Err(Error::ParameterOutOfRange { name: "M".into(), detail: format!("{m} < 2") });
    }
    check_prob("eps", eps)?;
    let mf = m as f64;
    let f = &pair.f;
    let a = f.eval(mf * (1.0 - eps));
    let b = f.eval(mf * eps / (mf - 1.0));
    let inner = a / mf + (mf - 1.0) / mf * b;
    let value = pair.g.eval(inner);
    Ok(BoundResult::new(value, json!({"pair": pair.label(), "M": m, "eps": eps}))
        .cond("g_convex", true)
        .cond("g_nondecreasing", true))
}

/// Lower bound on the blocklength: `fano_lower / max_p I_{G,f}(p, W)`.
pub fn blocklength_lower(
    pair: &AdmissiblePair,
    m: u64,
    eps: f64,
    w: &Channel,
    opts: &SolverOpts,
    assume_subadditive: bool,
) -> Result<BoundResult> {
    let num = fano_lower(pair, m, eps)?;
    let cap = max_igf_over_input(w, pair, opts)?;
    let zero = cap.value <= 1e-12;
    let value = if zero { f64::INFINITY } else { num.value / cap.value };
    let mut r = BoundResult::new(
        value,
        json!({"pair": pair.label(), "M": m, "eps": eps, "fano": num.value, "max_information": cap.value}),
    )
    .cond("g_convex", true)
    .cond("pair_subadditive_assumed", assume_subadditive)
    .cond("zero_information", zero);
    if zero {
        r.note = Some("the channel carries no information; no finite blocklength suffices".into());
    }
    Ok(r)
}

/// `n·𝒟(p‖q) − 𝒟(Bern(α)‖Bern(β))`; a non-negative slack is consistent
/// with a test of size `α` and power `β` on `n` samples.
pub fn ht_bound_check(
    pair: &AdmissiblePair,
    p: &Dist,
    q: &Dist,
    n: u64,
    alpha: f64,
    beta: f64,
    assume_subadditive: bool,
) -> Result<BoundResult> {
    check_len(p.len(), q.len())?;
    check_prob("alpha", alpha)?;
    check_prob("beta", beta)?;
    let single = gf_div(p, q, pair)?;
    let test = gf_div(&Dist::bernoulli(alpha)?, &Dist::bernoulli(beta)?, pair)?;
    let lhs = if single == 0.0 { 0.0 } else { n as f64 * single };
    let slack = crate::numeric::ext_sub(lhs, test);
    Ok(BoundResult::new(slack, json!({"pair": pair.label(), "n": n, "alpha": alpha, "beta": beta, "test_divergence": test}))
        .cond("pair_subadditive_assumed", assume_subadditive)
        .cond("slack_nonnegative", slack >= -1e-10))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    Plus,
    Minus,
}

const MINUS_NOTE: &str = "MINUS reads the divergence with the hat convention f̂ = 1 − f, so the bound is \
-log D_f(p‖q)/(1−s). For f = x^s this is the Rényi divergence of order s, which never exceeds KL; \
the stated inequality then fails whenever it is strict.";

/// `slack = bound − D_KL(p‖q)`.
///
/// * `PLUS` (`s > 1`): `f` convex with `f(1) = 1` and `f ≥ c x^s`; bound
///   `log D_f(p‖q)/(s−1)`.
/// * `MINUS` (`0 < s < 1`): `f` concave with `f(1) = 1` and `f ≤ c x^s`;
///   bound `−log D_f(p‖q)/(1−s)`.
///
/// A `ZERO_AT_ONE` generator is moved to the `ONE_AT_ONE` track first
/// (`f̂ + 1` for PLUS, `1 − f̂` for MINUS). The envelope is spot-checked on
/// a log grid and reported, never enforced.
pub fn kl_comparison(f: &FGenerator, s: f64, c: f64, p: &Dist, q: &Dist, direction: Direction) -> Result<BoundResult> {
    check_len(p.len(), q.len())?;
    if !(c > 0.0) {
        return Err(Error::ParameterOutOfRange { name: "c".into(), detail: format!("{c} must be positive") });
    }
    let f1 = match (direction, f.norm) {
        (_, Normalization::OneAtOne) => f.clone(),
        (Direction::Plus, Normalization::ZeroAtOne) => f.plus_one()?,
        (Direction::Minus, Normalization::ZeroAtOne) => f.one_minus(),
    };
    match direction {
        Direction::Plus if s <= 1.0 => {
            return Err(Error::ParameterOutOfRange { name: "s".into(), detail: format!("PLUS needs s > 1, got {s}") })
        }
        Direction::Minus if !(s > 0.0 && s < 1.0) => {
            return Err(Error::ParameterOutOfRange { name: "s".into(), detail: format!("MINUS needs 0 < s < 1, got {s}") })
        }
        _ => {}
    }
    let sign = if direction == Direction::Plus { 1.0 } else { -1.0 };
    let envelope = log_grid(1e-4, 1e4, 400).iter().all(|&x| {
        let e = c * x.powf(s);
        sign * (f1.eval(x) - e) >= -1e-12 * (1.0 + e.abs())
    });
    let d = f_div(p, q, &f1)?;
    let bound = match direction {
        Direction::Plus => d.ln() / (s - 1.0),
        Direction::Minus => -d.ln() / (1.0 - s),
    };
    let kl = f_div(p, q, &generator("kl", &Params::new())?)?;
    let slack = crate::numeric::ext_sub(bound, kl);
    let slack = if slack.abs() < 1e-15 { 0.0 } else { slack };
    let dir = match direction {
        Direction::Plus => "PLUS",
        Direction::Minus => "MINUS",
    };
    let mut r = BoundResult::new(
        slack,
        json!({"f": f.name, "s": s, "c": c, "direction": dir, "bound": bound, "kl": kl}),
    )
    .cond("envelope_holds", envelope)
    .cond("bound_holds", slack >= -1e-10);
    if direction == Direction::Minus {
        r.note = Some(MINUS_NOTE.into());
    }
    Ok(r)
}
