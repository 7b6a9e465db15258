//! Finite-alphabet probability primitives: distributions, channels, products
//! and push-forwards.
//!
//! Probabilities are stored in natural scale. Products flatten in row-major
//! order: entry `(i, j)` of `a × b` sits at index `i * b.len() + j`.

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{check_len, Error, Result};
use crate::numeric::json_num17;

/// Sums within this distance of 1 are renormalized; anything further is rejected.
pub const NORMALIZE_TOL: f64 = 1e-9;

/// A probability vector on a finite alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist {
    probs: Vec<f64>,
}

impl Dist {
    /// Builds a distribution, clamping negatives within `1e-15` to zero and
    /// renormalizing when the sum is within [`NORMALIZE_TOL`] of one.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty probability vector".into()));
        }
        let mut probs = probs;
        for p in probs.iter_mut() {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("non-finite entry {p}")));
            }
            if *p < 0.0 {
                if *p >= -1e-15 {
                    *p = 0.0;
                } else {
                    return Err(Error::InvalidDistribution(format!("negative entry {p}")));
                }
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZE_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {sum}")));
        }
        if sum != 1.0 {
            for p in probs.iter_mut() {
                *p /= sum;
            }
        }
        Ok(Dist { probs })
    }

    /// `(p, 1 - p)`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution(format!("Bernoulli parameter {p}")));
        }
        Ok(Dist { probs: vec![p, 1.0 - p] })
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs a non-empty alphabet");
        Dist { probs: vec![1.0 / n as f64; n] }
    }

    /// Point mass on symbol `i` of an `n`-letter alphabet.
    pub fn point(n: usize, i: usize) -> Self {
        assert!(i < n);
        let mut probs = vec![0.0; n];
        probs[i] = 1.0;
        Dist { probs }
    }

    /// Wraps a vector already known to be a distribution (internal iterates).
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        Dist { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    pub fn mix(&self, other: &Dist, lambda: f64) -> Result<Dist> {
        check_len(self.len(), other.len())?;
        Dist::new(
            self.probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serialize_f64_seq(&self.probs, serializer)
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(deserializer)?;
        Dist::new(probs).map_err(de::Error::custom)
    }
}

pub(crate) fn serialize_f64_seq<S: Serializer>(xs: &[f64], serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(xs.len()))?;
    for &x in xs {
        let raw = RawValue::from_string(json_num17(x)).map_err(serde::ser::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

/// A row-stochastic kernel `W(y|x)`; row `x` is the output law given input `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    rows: Vec<Dist>,
}

impl Channel {
    pub fn new(rows: Vec<Dist>) -> Result<Self> {
        let ny = rows
            .first()
            .map(Dist::len)
            .ok_or_else(|| Error::InvalidChannel("no rows".into()))?;
        if let Some(bad) = rows.iter().find(|r| r.len() != ny) {
            return Err(Error::InvalidChannel(format!(
                "row sizes differ ({} vs {ny})",
                bad.len()
            )));
        }
        Ok(Channel { rows })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows.into_iter().map(Dist::new).collect::<Result<Vec<_>>>()?;
        Channel::new(rows)
    }

    /// Binary symmetric channel with crossover `delta`.
    pub fn bsc(delta: f64) -> Result<Self> {
        Channel::from_rows(vec![vec![1.0 - delta, delta], vec![delta, 1.0 - delta]])
    }

    /// Binary erasure channel; outputs are `(0, erasure, 1)`.
    pub fn bec(e: f64) -> Result<Self> {
        Channel::from_rows(vec![vec![1.0 - e, e, 0.0], vec![0.0, e, 1.0 - e]])
    }

    pub fn identity(n: usize) -> Self {
        Channel { rows: (0..n).map(|i| Dist::point(n, i)).collect() }
    }

    /// A channel whose rows are all equal to `row` (zero capacity).
    pub fn constant(nx: usize, row: Dist) -> Self {
        Channel { rows: vec![row; nx] }
    }

    pub fn rows(&self) -> &[Dist] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &Dist {
        &self.rows[x]
    }

    pub fn nx(&self) -> usize {
        self.rows.len()
    }

    pub fn ny(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.rows[x].probs[y]
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.rows.iter().all(Dist::has_full_support)
    }

    pub fn min_entry(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.probs.iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    /// Relabels inputs by `pi_in` and outputs by `pi_out`:
    /// the result maps `pi_in[x]` to `pi_out[y]` with probability `W(y|x)`.
    pub fn permuted(&self, pi_in: &[usize], pi_out: &[usize]) -> Result<Channel> {
        check_len(self.nx(), pi_in.len())?;
        check_len(self.ny(), pi_out.len())?;
        if !is_permutation(pi_in) || !is_permutation(pi_out) {
            return Err(Error::InvalidInput("not a permutation".into()));
        }
        let mut rows = vec![vec![0.0; self.ny()]; self.nx()];
        for x in 0..self.nx() {
            for y in 0..self.ny() {
                rows[pi_in[x]][pi_out[y]] = self.get(x, y);
            }
        }
        Ok(Channel { rows: rows.into_iter().map(Dist::from_raw).collect() })
    }
}

impl Serialize for Channel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows.len()))?;
        for r in &self.rows {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Channel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Dist>::deserialize(deserializer)?;
        Channel::new(rows).map_err(de::Error::custom)
    }
}

/// Product distribution `a × b` in row-major order.
pub fn product_dist(a: &Dist, b: &Dist) -> Dist {
    let mut probs = Vec::with_capacity(a.len() * b.len());
    for &ai in &a.probs {
        for &bj in &b.probs {
            probs.push(ai * bj);
        }
    }
    Dist { probs }
}

/// Output law `Σ_x p(x) K(·|x)`.
pub fn push_forward(p: &Dist, k: &Channel) -> Result<Dist> {
    check_len(k.nx(), p.len())?;
    let mut out = vec![0.0; k.ny()];
    for (px, row) in p.probs.iter().zip(&k.rows) {
        if *px == 0.0 {
            continue;
        }
        for (o, w) in out.iter_mut().zip(&row.probs) {
            *o += px * w;
        }
    }
    Ok(Dist { probs: out })
}

/// `p ≪ q`: every index where `q` vanishes also has `p` equal to zero.
pub fn is_abs_continuous(p: &Dist, q: &Dist) -> Result<bool> {
    check_len(p.len(), q.len())?;
    Ok(p.probs.iter().zip(&q.probs).all(|(&pi, &qi)| qi != 0.0 || pi == 0.0))
}

/// Product channel `K1 ⊗ K2` on paired inputs and paired outputs, both row-major.
pub fn product_channel(k1: &Channel, k2: &Channel) -> Channel {
    let mut rows = Vec::with_capacity(k1.nx() * k2.nx());
    for r1 in &k1.rows {
        for r2 in &k2.rows {
            rows.push(product_dist(r1, r2));
        }
    }
    Channel { rows }
}

fn is_permutation(pi: &[usize]) -> bool {
    let mut seen = vec![false; pi.len()];
    pi.iter().all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn uniform_product() {
        let h = Dist::bernoulli(0.5).unwrap();
        assert_eq!(product_dist(&h, &h).probs(), &[0.25; 4]);
    }

    #[test]
    fn point_mass_product_pads_with_zeros() {
        let one = Dist::bernoulli(1.0).unwrap();
        let d = Dist::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(product_dist(&one, &d).probs(), &[0.2, 0.3, 0.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn bernoulli_product_row_major() {
        let p = product_dist(&Dist::bernoulli(0.9).unwrap(), &Dist::bernoulli(0.2).unwrap());
        assert!(close(p.probs(), &[0.18, 0.72, 0.02, 0.08], 1e-15));
    }

    #[test]
    fn push_forward_examples() {
        let u = Dist::uniform(2);
        assert_eq!(push_forward(&u, &Channel::identity(2)).unwrap(), u);
        let bsc = Channel::bsc(0.1).unwrap();
        assert!(close(push_forward(&u, &bsc).unwrap().probs(), &[0.5, 0.5], 1e-15));
        let out = push_forward(&Dist::bernoulli(0.9).unwrap(), &bsc).unwrap();
        assert!(close(out.probs(), &[0.82, 0.18], 1e-15));
        assert!(matches!(
            push_forward(&Dist::uniform(3), &bsc),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn abs_continuity_examples() {
        let b = |x| Dist::bernoulli(x).unwrap();
        assert!(is_abs_continuous(&b(0.5), &b(0.9)).unwrap());
        assert!(!is_abs_continuous(&b(0.5), &b(1.0)).unwrap());
        assert!(is_abs_continuous(&b(1.0), &b(1.0)).unwrap());
        assert!(is_abs_continuous(&b(0.5), &Dist::uniform(3)).is_err());
    }

    #[test]
    fn dist_construction_normalizes_or_rejects() {
        let d = Dist::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(Dist::new(vec![0.5, 0.6]).is_err());
        assert!(Dist::new(vec![1.1, -0.1]).is_err());
        assert_eq!(Dist::new(vec![1.0, -1e-16]).unwrap().probs(), &[1.0, 0.0]);
    }

    #[test]
    fn json_uses_17_significant_digits_and_round_trips() {
        let d = Dist::new(vec![0.1, 0.2, 0.7]).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, "[1.0000000000000001e-1,2.0000000000000001e-1,6.9999999999999996e-1]");
        assert_eq!(serde_json::from_str::<Dist>(&s).unwrap(), d);
        let w = Channel::bsc(0.1).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(serde_json::from_str::<Channel>(&s).unwrap(), w);
        assert!(serde_json::from_str::<Channel>("[[0.5,0.5],[1.0]]").is_err());
    }

    #[test]
    fn permutations_are_lexicographic() {
        let p = permutations(3);
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![0, 1, 2]);
        assert_eq!(p[5], vec![2, 1, 0]);
    }

    #[test]
    fn bsc_is_invariant_under_swaps() {
        let w = Channel::bsc(0.3).unwrap();
        assert_eq!(w.permuted(&[1, 0], &[1, 0]).unwrap(), w);
    }
}
