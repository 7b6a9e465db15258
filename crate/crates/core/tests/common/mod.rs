#![allow(dead_code)]

use gfdiv::generators::{generator, transform};
use gfdiv::numeric::{dirichlet_uniform, stream_rng};
use gfdiv::{make_pair, AdmissiblePair, Channel, Dist, FGenerator, Params};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    stream_rng(0x5EED, stream)
}

/// Dirichlet(1,…,1) draw kept away from the boundary.
pub fn dist<R: Rng>(rng: &mut R, n: usize) -> Dist {
    let v: Vec<f64> = dirichlet_uniform(rng, n).into_iter().map(|x| x + 1e-3).collect();
    Dist::new(normalize(v)).unwrap()
}

pub fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

pub fn channel<R: Rng>(rng: &mut R, nx: usize, ny: usize) -> Channel {
    Channel::new((0..nx).map(|_| dist(rng, ny)).collect()).unwrap()
}

pub fn size<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

/// Every registry generator at representative parameters.
pub fn registry_generators() -> Vec<FGenerator> {
    let list: Vec<(&str, Params)> = vec![
        ("kl", Params::new()),
        ("reverse_kl", Params::new()),
        ("squared_hellinger", Params::new()),
        ("jensen_shannon", Params::new()),
        ("alpha", params(&[("alpha", 0.5)])),
        ("alpha", params(&[("alpha", 2.0)])),
        ("pearson", Params::new()),
        ("triangular", Params::new()),
        ("le_cam", Params::new()),
        ("hellinger_order", params(&[("alpha", 0.5)])),
        ("hellinger_order", params(&[("alpha", 2.0)])),
        ("power", params(&[("p", 2.0)])),
        ("power", params(&[("p", 0.5)])),
        ("power", params(&[("p", -1.0)])),
        ("power_theta", params(&[("s", 2.0), ("theta", 0.5)])),
        ("sqrt", Params::new()),
        ("sin_tminus", Params::new()),
        ("one_minus_sqrt", Params::new()),
        ("one_minus_power", params(&[("s", 0.3)])),
    ];
    list.into_iter().map(|(n, p)| generator(n, &p).unwrap()).collect()
}

pub fn convex_generators() -> Vec<FGenerator> {
    registry_generators().into_iter().filter(|g| g.is_convex()).collect()
}

/// Every admissible (G, f) combination over the registry.
pub fn registry_pairs() -> Vec<AdmissiblePair> {
    let gs = [
        ("x", Params::new()),
        ("pow", params(&[("p", 0.5)])),
        ("log1p", Params::new()),
        ("neg_log1m", Params::new()),
        ("log_sinh", Params::new()),
        ("renyi_G", params(&[("alpha", 2.0)])),
        ("exp_m1", Params::new()),
    ];
    let mut out = Vec::new();
    for (gn, gp) in &gs {
        for f in registry_generators() {
            if let Ok(p) = make_pair(transform(gn, gp).unwrap(), f) {
                out.push(p);
            }
        }
    }
    out
}

pub fn pair(g: &str, f: &str) -> AdmissiblePair {
    make_pair(transform(g, &Params::new()).unwrap(), generator(f, &Params::new()).unwrap()).unwrap()
}

pub fn shannon_mi(p: &Dist, w: &Channel) -> f64 {
    let mut out = vec![0.0; w.ny()];
    for (x, &px) in p.probs().iter().enumerate() {
        for (y, o) in out.iter_mut().enumerate() {
            *o += px * w.get(x, y);
        }
    }
    let mut mi = 0.0;
    for (x, &px) in p.probs().iter().enumerate() {
        for (y, &py) in out.iter().enumerate() {
            let wxy = w.get(x, y);
            if px > 0.0 && wxy > 0.0 {
                mi += px * wxy * (wxy / py).ln();
            }
        }
    }
    mi
}
