//! Subadditivity: binary gap scans, the membership checkers for the classes
//! T, T⁺ and T⁻, the `1/G′` criterion, root counting and the Υ(ε) probe.
//!
//! Gaps follow one sign convention throughout: a negative gap is a violation.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::gf_div;
use crate::error::{check_len, Error, Result};
use crate::generators::{domain_grid, AdmissiblePair, Curve, FGenerator, GTransform};
use crate::information::{igf_info, SolverOpts};
use crate::numeric::{ext_sub, log_grid, stream_rng};
use crate::probcore::{product_channel, product_dist, Channel, Dist};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Outcome of a sampled check. `witness` is the argument tuple at which
/// `min_gap` was attained: `(x, y, r, s)` for gap scans, `(a, b)` for
/// midpoint tests, `(x, α)` for T⁺/T⁻ and `(x)` for a sign failure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub target: String,
    pub subject: String,
    pub min_gap: f64,
    pub witness: Vec<f64>,
    pub samples: u64,
    pub grid_res: u64,
    pub tol: f64,
    pub verdict: Verdict,
    pub nonfinite: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Running minimum with a lexicographic tie-break on the witness, so the
/// reduction gives the same answer in any association order.
#[derive(Clone, Debug)]
struct MinAcc {
    gap: f64,
    witness: Vec<f64>,
    samples: u64,
    nonfinite: u64,
}

impl MinAcc {
    fn empty() -> Self {
        MinAcc { gap: f64::INFINITY, witness: Vec::new(), samples: 0, nonfinite: 0 }
    }

    fn push(&mut self, gap: f64, witness: &[f64]) {
        self.samples += 1;
        if !gap.is_finite() {
            self.nonfinite += 1;
        }
        if self.better(gap, witness) {
            self.gap = gap;
            self.witness = witness.to_vec();
        }
    }

    fn better(&self, gap: f64, witness: &[f64]) -> bool {
        if self.witness.is_empty() {
            return true;
        }
        gap < self.gap || (gap == self.gap && lex_less(witness, &self.witness))
    }

    fn merge(mut self, other: MinAcc) -> MinAcc {
        let (s, n) = (self.samples + other.samples, self.nonfinite + other.nonfinite);
        if !other.witness.is_empty() && self.better(other.gap, &other.witness) {
            self.gap = other.gap;
            self.witness = other.witness;
        }
        self.samples = s;
        self.nonfinite = n;
        self
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    a.len() < b.len()
}

/// FAIL beats INCONCLUSIVE: a finite violation is a definite answer even if
/// other samples were out of domain.
fn verdict(min_gap: f64, tol: f64, samples: u64, nonfinite: u64) -> Verdict {
    if min_gap < -tol {
        Verdict::Fail
    } else if nonfinite as f64 > 0.01 * samples as f64 {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    }
}

fn report(target: &str, subject: &str, acc: MinAcc, grid_res: u64, tol: f64) -> ScanReport {
    ScanReport {
        target: target.to_string(),
        subject: subject.to_string(),
        min_gap: acc.gap,
        verdict: verdict(acc.gap, tol, acc.samples, acc.nonfinite),
        witness: acc.witness,
        samples: acc.samples,
        grid_res,
        tol,
        nonfinite: acc.nonfinite,
        note: None,
    }
}

/// `𝒟(qY‖rY) + 𝒟(qZ‖rZ) − 𝒟(qY×qZ ‖ rY×rZ)`; `≥ 0` where subadditivity holds.
pub fn div_gap(pair: &AdmissiblePair, qy: &Dist, ry: &Dist, qz: &Dist, rz: &Dist) -> Result<f64> {
    check_len(qy.len(), ry.len())?;
    check_len(qz.len(), rz.len())?;
    let a = gf_div(qy, ry, pair)?;
    let b = gf_div(qz, rz, pair)?;
    let joint = gf_div(&product_dist(qy, qz), &product_dist(ry, rz), pair)?;
    Ok(ext_sub(a + b, joint))
}

/// The binary gap at `(x, y, r, s)`: `rY = Bern(x)`, `qY = Bern(y)`,
/// `rZ = Bern(r)`, `qZ = Bern(s)`.
pub fn binary_gap(pair: &AdmissiblePair, w: [f64; 4]) -> f64 {
    let [x, y, r, s] = w;
    let b = |v: f64| Dist::from_raw(vec![v, 1.0 - v]);
    div_gap(pair, &b(y), &b(x), &b(s), &b(r)).expect("binary sizes agree")
}

pub const GAP_TOL: f64 = 1e-9;

/// Scans the open lattice `{i/(res+1)}⁴` plus `random_samples` scrambled
/// Sobol points mapped into `[1e-6, 1 − 1e-6]⁴`.
///
/// Binary laws decide subadditivity for `G = x` and, as a working reading,
/// for any `G` passing [`check_inv_gprime_concave`], bounded ones included.
pub fn binary_gap_scan(pair: &AdmissiblePair, grid_res: usize, random_samples: usize, seed: u64) -> ScanReport {
    assert!(grid_res >= 2, "grid_res must be at least 2");
    let res = grid_res;
    let node = |i: usize| (i + 1) as f64 / (res + 1) as f64;
    let lattice = (0..res * res)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / res, ij % res);
            let mut acc = MinAcc::empty();
            for k in 0..res {
                for l in 0..res {
                    let w = [node(i), node(j), node(k), node(l)];
                    acc.push(binary_gap(pair, w), &w);
                }
            }
            acc
        })
        .reduce(MinAcc::empty, MinAcc::merge);
    let scramble = (seed ^ (seed >> 32)) as u32;
    let sobol = (0..random_samples)
        .into_par_iter()
        .with_min_len(1024)
        .fold(MinAcc::empty, |mut acc, i| {
            // each dimension set holds 2^16 points
            let u = sobol_burley::sample_4d((i & 0xFFFF) as u32, (i >> 16) as u32, scramble);
            let m = |v: f32| 1e-6 + (1.0 - 2e-6) * v as f64;
            let w = [m(u[0]), m(u[1]), m(u[2]), m(u[3])];
            acc.push(binary_gap(pair, w), &w);
            acc
        })
        .reduce(MinAcc::empty, MinAcc::merge);
    report("divergence_subadditivity", &pair.label(), lattice.merge(sobol), res as u64, GAP_TOL)
}

/// Midpoint concavity defect `g((a+b)/2) − (g(a)+g(b))/2`.
pub fn midpoint_gap(g: &Curve, a: f64, b: f64) -> f64 {
    g.eval(0.5 * (a + b)) - 0.5 * (g.eval(a) + g.eval(b))
}

const CHECK_SEED: u64 = 0xC0FFEE;

/// Tests `g = x² f″(x)` for membership in T: non-negative and concave.
pub fn check_t(f: &FGenerator) -> Result<ScanReport> {
    if !f.has_d2() {
        return Err(Error::MissingDerivative(f.name.clone()));
    }
    let g = f.g_curve();
    let mut r = check_concave_curve(&g, "class_T");
    r.subject = f.name.clone();
    Ok(r)
}

/// Non-negativity plus midpoint concavity over all pairs of a 2000-point
/// log grid on `[1e-4, 1e4]` and 10⁵ random log-uniform pairs.
pub fn check_concave_curve(g: &Curve, target: &str) -> ScanReport {
    let grid = log_grid(1e-4, 1e4, 2000);
    let vals: Vec<f64> = grid.iter().map(|&x| g.eval(x)).collect();
    let mut neg = MinAcc::empty();
    for (x, v) in grid.iter().zip(&vals) {
        neg.push(*v, &[*x]);
    }
    if neg.gap < -GAP_TOL {
        return report(target, &g.name, neg, grid.len() as u64, GAP_TOL);
    }
    let pairs = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = MinAcc::empty();
            for j in i + 1..grid.len() {
                let (a, b) = (grid[i], grid[j]);
                let gap = g.eval(0.5 * (a + b)) - 0.5 * (vals[i] + vals[j]);
                acc.push(gap, &[a, b]);
            }
            acc
        })
        .reduce(MinAcc::empty, MinAcc::merge);
    let random = (0..100u64)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = stream_rng(CHECK_SEED, chunk);
            let mut acc = MinAcc::empty();
            for _ in 0..1000 {
                let a = 10f64.powf(rng.random_range(-4.0..4.0));
                let b = 10f64.powf(rng.random_range(-4.0..4.0));
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                acc.push(midpoint_gap(g, a, b), &[a, b]);
            }
            acc
        })
        .reduce(MinAcc::empty, MinAcc::merge);
    let mut acc = pairs.merge(random);
    acc.samples += neg.samples;
    report(target, &g.name, acc, grid.len() as u64, GAP_TOL)
}

/// Normalized residual of `x² g″(x) ∓ g(α) g(x/α) ≤ 0`, as a gap (negative
/// means violated): `−(x² g″ + sign·g(α)g(x/α)) / (1 + |g(α)g(x/α)|)`.
pub fn class_residual(g: &Curve, x: f64, alpha: f64, sign: f64) -> f64 {
    let prod = g.eval(alpha) * g.eval(x / alpha);
    let lhs = x * x * g.d2(x) + sign * prod;
    -lhs / (1.0 + prod.abs())
}

fn check_functional(g: &Curve, sign: f64, target: &str) -> ScanReport {
    let grid = log_grid(1e-3, 1e3, 300);
    let mut neg = MinAcc::empty();
    for &x in &grid {
        neg.push(g.eval(x), &[x]);
    }
    if neg.gap < -GAP_TOL {
        return report(target, &g.name, neg, 300, GAP_TOL);
    }
    let acc = grid
        .par_iter()
        .map(|&x| {
            let mut acc = MinAcc::empty();
            for &a in &grid {
                acc.push(class_residual(g, x, a, sign), &[x, a]);
            }
            acc
        })
        .reduce(MinAcc::empty, MinAcc::merge);
    report(target, &g.name, acc, 300, GAP_TOL)
}

/// Membership in T⁺: `g ≥ 0` and `x² g″(x) − g(α) g(x/α) ≤ 0` on a
/// 300×300 log grid over `[1e-3, 1e3]²`.
pub fn check_tplus(g: &Curve) -> ScanReport {
    check_functional(g, -1.0, "class_T_plus")
}

/// Membership in T⁻: `g ≥ 0` and `x² g″(x) + g(α) g(x/α) ≤ 0`.
pub fn check_tminus(g: &Curve) -> ScanReport {
    check_functional(g, 1.0, "class_T_minus")
}

/// Midpoint concavity of `u = 1/G′` over the domain grid.
pub fn check_inv_gprime_concave(g: &GTransform) -> Result<ScanReport> {
    let mut grid = vec![0.0];
    grid.extend(domain_grid(g.nu, 400));
    for &x in &grid {
        let d = g.d1(x);
        if !(d > 0.0) {
            return Err(Error::InvalidTransform { name: g.name.clone(), x, value: d });
        }
    }
    let u: Vec<f64> = grid.iter().map(|&x| g.recip_d1(x)).collect();
    let acc = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = MinAcc::empty();
            for j in i + 1..grid.len() {
                let mid = g.recip_d1(0.5 * (grid[i] + grid[j]));
                let avg = 0.5 * (u[i] + u[j]);
                acc.push((mid - avg) / (1.0 + avg.abs()), &[grid[i], grid[j]]);
            }
            acc
        })
        .reduce(MinAcc::empty, MinAcc::merge);
    Ok(report("inv_gprime_concave", &g.name, acc, grid.len() as u64, GAP_TOL))
}

/// Roots of `H(t; λ) − a − b t`, `H(t; λ) = λ f(t) − Σ_z rZ(z) f(t qZ(z)/rZ(z))`,
/// located by sign changes on a 10⁴-point log grid over `[1e-6, 1e6]` and
/// refined by bisection.
pub fn stationary_roots(f: &FGenerator, qz: &Dist, rz: &Dist, lambda: f64, a: f64, b: f64) -> Result<Vec<f64>> {
    check_len(qz.len(), rz.len())?;
    if !(lambda > 0.0) {
        return Err(Error::ParameterOutOfRange { name: "lambda".into(), detail: format!("{lambda} must be positive") });
    }
    let terms: Vec<(f64, f64)> = rz
        .probs()
        .iter()
        .zip(qz.probs())
        .filter(|(r, _)| **r > 0.0)
        .map(|(&r, &q)| (r, q / r))
        .collect();
    let h = |t: f64| {
        let mut s = lambda * f.eval(t) - a - b * t;
        for &(r, ratio) in &terms {
            s -= r * f.eval(t * ratio);
        }
        s
    };
    let grid = log_grid(1e-6, 1e6, 10_000);
    let mut roots = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for &t in &grid {
        let v = h(t);
        if v == 0.0 {
            roots.push(t);
            prev = None;
            continue;
        }
        if let Some((pt, pv)) = prev {
            if pv.signum() != v.signum() {
                let (mut lo, mut hi, mut vlo) = (pt, t, pv);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    let vm = h(mid);
                    if vm == 0.0 {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if vm.signum() == vlo.signum() {
                        lo = mid;
                        vlo = vm;
                    } else {
                        hi = mid;
                    }
                }
                roots.push(0.5 * (lo + hi));
            }
        }
        prev = Some((t, v));
    }
    Ok(roots)
}

pub fn count_stationary_roots(f: &FGenerator, qz: &Dist, rz: &Dist, lambda: f64, a: f64, b: f64) -> Result<usize> {
    stationary_roots(f, qz, rz, lambda, a, b).map(|r| r.len())
}

/// `Υ(ε) = I(X;Y) + I(X;Z) − I(X;YZ)` for the binary-input channel with
/// rows `q` (at `X = 0`, probability ε) and `r` (at `X = 1`), `Y ⊥ Z | X`.
pub fn equivalence_probe(
    pair: &AdmissiblePair,
    qy: &Dist,
    ry: &Dist,
    qz: &Dist,
    rz: &Dist,
    eps_grid: &[f64],
    opts: &SolverOpts,
) -> Result<Vec<f64>> {
    check_len(qy.len(), ry.len())?;
    check_len(qz.len(), rz.len())?;
    let wy = Channel::new(vec![qy.clone(), ry.clone()])?;
    let wz = Channel::new(vec![qz.clone(), rz.clone()])?;
    let wyz = Channel::new(vec![product_dist(qy, qz), product_dist(ry, rz)])?;
    eps_grid
        .iter()
        .map(|&e| {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidInput(format!("epsilon {e} outside [0,1]")));
            }
            let p = Dist::new(vec![e, 1.0 - e])?;
            let iy = igf_info(&p, &wy, pair, opts)?.value;
            let iz = igf_info(&p, &wz, pair, opts)?.value;
            let iyz = igf_info(&p, &wyz, pair, opts)?.value;
            Ok(iy + iz - iyz)
        })
        .collect()
}

/// Information-subadditivity gap `I(X₁;Y₁) + I(X₂;Y₂) − I(X₁X₂;Y₁Y₂)` for a
/// product input through a product channel.
pub fn info_gap(
    pair: &AdmissiblePair,
    p1: &Dist,
    w1: &Channel,
    p2: &Dist,
    w2: &Channel,
    opts: &SolverOpts,
) -> Result<f64> {
    let a = igf_info(p1, w1, pair, opts)?.value;
    let b = igf_info(p2, w2, pair, opts)?.value;
    let joint = igf_info(&product_dist(p1, p2), &product_channel(w1, w2), pair, opts)?.value;
    Ok(ext_sub(a + b, joint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{curve, generator, make_pair, transform, Params};

    fn pair(g: &str, f: &str) -> AdmissiblePair {
        make_pair(transform(g, &Params::new()).unwrap(), generator(f, &Params::new()).unwrap()).unwrap()
    }

    fn p(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn b(x: f64) -> Dist {
        Dist::bernoulli(x).unwrap()
    }

    #[test]
    fn div_gap_examples() {
        let g = div_gap(&pair("x", "kl"), &b(0.3), &b(0.6), &b(0.1), &b(0.8)).unwrap();
        assert!(g.abs() < 1e-10);
        let g = div_gap(&pair("x", "pearson"), &b(0.5), &b(0.25), &b(0.5), &b(0.25)).unwrap();
        assert!((g + 1.0 / 9.0).abs() < 1e-12);
        let g = div_gap(&pair("log1p", "pearson"), &b(0.5), &b(0.25), &b(0.5), &b(0.25)).unwrap();
        assert!(g.abs() < 1e-10);
        // witness order (x, y, r, s) = (rY, qY, rZ, qZ)
        let direct = div_gap(&pair("x", "pearson"), &b(0.5), &b(0.25), &b(0.5), &b(0.25)).unwrap();
        assert_eq!(binary_gap(&pair("x", "pearson"), [0.25, 0.5, 0.25, 0.5]), direct);
    }

    #[test]
    fn gap_scan_verdicts() {
        let kl = binary_gap_scan(&pair("x", "kl"), 10, 2000, 7);
        assert_eq!(kl.verdict, Verdict::Pass);
        assert!(kl.min_gap.abs() < 1e-10);
        let chi = binary_gap_scan(&pair("x", "pearson"), 10, 2000, 7);
        assert_eq!(chi.verdict, Verdict::Fail);
        assert!(chi.min_gap <= -1.0 / 9.0);
        let w: [f64; 4] = chi.witness.clone().try_into().unwrap();
        assert_eq!(binary_gap(&pair("x", "pearson"), w), chi.min_gap);
        assert_eq!(binary_gap_scan(&pair("x", "squared_hellinger"), 10, 2000, 7).verdict, Verdict::Pass);
    }

    #[test]
    fn scan_is_independent_of_thread_count() {
        let pr = pair("x", "jensen_shannon");
        let a = binary_gap_scan(&pr, 8, 3000, 3);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| binary_gap_scan(&pr, 8, 3000, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn class_t_examples() {
        let r = check_t(&generator("kl", &Params::new()).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_t(&generator("pearson", &Params::new()).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let [a, bb] = [r.witness[0], r.witness[1]];
        let g = generator("pearson", &Params::new()).unwrap().g_curve();
        assert_eq!(midpoint_gap(&g, a, bb), r.min_gap);
        let r = check_t(&generator("jensen_shannon", &Params::new()).unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn class_t_plus_examples() {
        let r = check_tplus(&curve("power_shape", &p(&[("gamma", 2.0)])).unwrap());
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.min_gap.abs() < 1e-12);
        assert_eq!(check_tplus(&curve("log1p_shape", &Params::new()).unwrap()).verdict, Verdict::Pass);
        let le_cam = generator("le_cam", &Params::new()).unwrap().g_curve();
        assert_eq!(check_tplus(&le_cam).verdict, Verdict::Fail);
    }

    #[test]
    fn class_t_minus_examples() {
        let quarter = curve("power_shape", &p(&[("gamma", 0.5), ("coef", 0.25)])).unwrap();
        let r = check_tminus(&quarter);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.min_gap.abs() < 1e-12);
        let kl = generator("kl", &Params::new()).unwrap().g_curve();
        assert_eq!(check_tminus(&kl).verdict, Verdict::Fail);
        let sin = curve("sin_tminus_g", &Params::new()).unwrap();
        assert_eq!(check_tminus(&sin).verdict, Verdict::Pass);
    }

    #[test]
    fn inverse_derivative_examples() {
        let run = |n: &str| check_inv_gprime_concave(&transform(n, &Params::new()).unwrap()).unwrap().verdict;
        assert_eq!(run("x"), Verdict::Pass);
        assert_eq!(run("log1p"), Verdict::Pass);
        assert_eq!(run("neg_log1m"), Verdict::Pass);
        assert_eq!(run("log_sinh"), Verdict::Pass);
        assert_eq!(run("exp_m1"), Verdict::Fail);
        let bad = GTransform::custom("flat", f64::INFINITY, true, |x| if x < 1.0 { x } else { 1.0 });
        assert!(matches!(check_inv_gprime_concave(&bad), Err(Error::InvalidTransform { .. })));
    }

    #[test]
    fn root_count_examples() {
        let sq = generator("hellinger_order", &p(&[("alpha", 2.0)])).unwrap();
        let qz = Dist::new(vec![0.2, 0.8]).unwrap();
        let rz = Dist::new(vec![0.6, 0.4]).unwrap();
        for &(l, a, bb) in &[(1.0, 0.0, 0.0), (3.0, 1.0, -2.0), (0.5, -1.0, 0.3), (2.0, 0.5, 0.5)] {
            assert!(count_stationary_roots(&sq, &qz, &rz, l, a, bb).unwrap() <= 2);
        }
        let kl = generator("kl", &Params::new()).unwrap();
        let same = Dist::new(vec![0.3, 0.7]).unwrap();
        let roots = stationary_roots(&kl, &same, &same, 1.0, -2.0, 1.0).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn probe_examples() {
        let opts = SolverOpts { restarts: 4, ..SolverOpts::default() };
        let (qy, ry, qz, rz) = (b(0.2), b(0.7), b(0.9), b(0.4));
        let eps = [0.0, 0.3, 0.8];
        let kl = equivalence_probe(&pair("x", "kl"), &qy, &ry, &qz, &rz, &eps, &opts).unwrap();
        // for Shannon information Υ(ε) = I(Y;Z), since Y − X − Z
        for (v, e) in kl.iter().zip(eps) {
            let mut joint = [[0.0; 2]; 2];
            for (y, row) in joint.iter_mut().enumerate() {
                for (z, j) in row.iter_mut().enumerate() {
                    *j = e * qy.probs()[y] * qz.probs()[z] + (1.0 - e) * ry.probs()[y] * rz.probs()[z];
                }
            }
            let py = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
            let pz = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
            let mut iyz = 0.0;
            for y in 0..2 {
                for z in 0..2 {
                    iyz += joint[y][z] * (joint[y][z] / (py[y] * pz[z])).ln();
                }
            }
            assert!((v - iyz).abs() < 1e-8, "{v} vs {iyz}");
        }
        let h = equivalence_probe(&pair("x", "squared_hellinger"), &qy, &ry, &qz, &rz, &[0.0, 0.1, 0.5, 0.9], &opts)
            .unwrap();
        assert!(h[0].abs() < 1e-8);
        assert!(h.iter().all(|v| *v >= -1e-6));
    }
}
