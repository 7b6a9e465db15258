//! Parsers for command-line values: distributions, channels, parameter
//! lists and generator specs.

use gfdiv::generators::{generator, transform};
use gfdiv::{Channel, Dist, Error, FGenerator, GTransform, GeneratorSpec, Params, Result};

fn bad(what: &str, s: &str) -> Error {
    Error::InvalidInput(format!("cannot parse {what} from `{s}`"))
}

/// `0.5,0.5` or a JSON array.
pub fn reals(s: &str) -> Result<Vec<f64>> {
    let t = s.trim();
    if t.starts_with('[') {
        return Ok(serde_json::from_str(t)?);
    }
    t.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad("a real list", s))).collect()
}

pub fn dist(s: &str) -> Result<Dist> {
    Dist::new(reals(s)?)
}

/// `k=v,k=v`; the empty string is the empty map.
pub fn params(s: &str) -> Result<Params> {
    let mut out = Params::new();
    for kv in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        let (k, v) = kv.split_once('=').ok_or_else(|| bad("a parameter list", s))?;
        let v = v.trim().parse::<f64>().map_err(|_| bad("a parameter list", s))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// `bsc:δ`, `bec:e`, `identity:n`, a JSON matrix, or `@file` holding one.
pub fn channel(s: &str) -> Result<Channel> {
    let t = s.trim();
    if let Some(path) = t.strip_prefix('@') {
        let body = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?;
        return channel(&body);
    }
    if t.starts_with('[') {
        let rows: Vec<Vec<f64>> = serde_json::from_str(t)?;
        return Channel::from_rows(rows);
    }
    let (kind, arg) = t.split_once(':').ok_or_else(|| bad("a channel", s))?;
    match kind {
        "bsc" => Channel::bsc(arg.parse().map_err(|_| bad("a channel", s))?),
        "bec" => Channel::bec(arg.parse().map_err(|_| bad("a channel", s))?),
        "identity" => Ok(Channel::identity(arg.parse().map_err(|_| bad("a channel", s))?)),
        _ => Err(Error::UnknownName(kind.to_string())),
    }
}

/// A registry name, or a JSON generator spec (`{"name":…}` / `{"table":…}`).
pub fn f_generator(name: &str, p: &str) -> Result<FGenerator> {
    let t = name.trim();
    if t.starts_with('{') {
        let spec: GeneratorSpec = serde_json::from_str(t)?;
        return spec.build();
    }
    generator(t, &params(p)?)
}

pub fn g_transform(name: &str, p: &str) -> Result<GTransform> {
    transform(name.trim(), &params(p)?)
}
