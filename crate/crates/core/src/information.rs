//! `I_{G,f}(X;Y) = min_q Σ_x p(x) G(D_f(W_x‖q))` and its maximization over inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::f_div_raw;
use crate::error::{check_len, Error, Result};
use crate::generators::AdmissiblePair;
use crate::numeric::{dirichlet_uniform, pairwise_sum, stream_rng};
use crate::probcore::{push_forward, Channel, Dist};

/// Entries of iterates are floored here, then renormalized.
pub const Q_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOpts {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    pub assume_permutation_invariant: bool,
}

impl Default for SolverOpts {
    fn default() -> Self {
        SolverOpts {
            restarts: 20,
            max_iters: 10_000,
            tol: 1e-12,
            seed: 0xC0FFEE,
            assume_permutation_invariant: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InfoResult {
    pub value: f64,
    pub argmin_q: Dist,
    pub solver_iters: usize,
    pub restarts_used: usize,
    /// Spread (max − min) of the restart optima.
    pub certified_gap: f64,
    /// Frank–Wolfe gap `Σ q ∇Φ − min ∇Φ` at the returned point.
    pub kkt_residual: f64,
    /// `G` convex and `kkt_residual < 1e-8`.
    pub certified: bool,
}

/// A differentiable objective on the probability simplex.
pub(crate) trait SimplexObjective: Sync {
    fn dim(&self) -> usize;
    /// Value at `q`; fills `grad` when given. May return `+inf`.
    fn eval(&self, q: &[f64], grad: Option<&mut [f64]>) -> f64;
}

#[derive(Clone, Debug)]
pub(crate) struct MdOutcome {
    pub q: Vec<f64>,
    pub value: f64,
    pub iters: usize,
    pub fw_gap: f64,
}

fn floor_normalize(q: &mut [f64]) {
    for v in q.iter_mut() {
        if !(*v >= Q_FLOOR) {
            *v = Q_FLOOR;
        }
    }
    let s = pairwise_sum(q);
    for v in q.iter_mut() {
        *v /= s;
    }
}

fn fw_gap(q: &[f64], g: &[f64]) -> f64 {
    let mean: f64 = q.iter().zip(g).map(|(a, b)| a * b).sum();
    let min = g.iter().cloned().fold(f64::INFINITY, f64::min);
    (mean - min).max(0.0)
}

/// Entropic mirror descent `q ← q·exp(−η∇)/Z` with backtracking on `η`.
pub(crate) fn mirror_descent(
    obj: &dyn SimplexObjective,
    mut q: Vec<f64>,
    max_iters: usize,
    tol: f64,
) -> MdOutcome {
    let n = obj.dim();
    floor_normalize(&mut q);
    let mut grad = vec![0.0; n];
    let mut value = obj.eval(&q, Some(&mut grad));
    if !value.is_finite() {
        return MdOutcome { q, value, iters: 0, fw_gap: f64::INFINITY };
    }
    // step from a Lipschitz-type scale of the gradient spread
    let spread = |g: &[f64]| {
        let (lo, hi) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        (hi - lo).max(1e-300)
    };
    let mut eta = 0.5 / spread(&grad).clamp(1e-3, 1.0);
    let mut stall = 0usize;
    let mut iters = 0usize;
    let mut cand = vec![0.0; n];
    let mut cand_grad = vec![0.0; n];
    while iters < max_iters {
        iters += 1;
        let gmin = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                cand[i] = q[i] * (-eta * (grad[i] - gmin)).exp();
            }
            floor_normalize(&mut cand);
            let v = obj.eval(&cand, Some(&mut cand_grad));
            if v.is_finite() && v <= value {
                let improvement = value - v;
                std::mem::swap(&mut q, &mut cand);
                std::mem::swap(&mut grad, &mut cand_grad);
                value = v;
                accepted = true;
                eta = (eta * 1.5).min(1e8);
                if improvement < tol {
                    stall += 1;
                } else {
                    stall = 0;
                }
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            stall += 1;
            eta = eta.max(1e-12);
        }
        if stall >= 50 || fw_gap(&q, &grad) < 1e-15 {
            break;
        }
    }
    let fw = fw_gap(&q, &grad);
    MdOutcome { q, value, iters, fw_gap: fw }
}

pub(crate) struct MultiStart {
    pub best: MdOutcome,
    pub gap: f64,
    pub total_iters: usize,
    pub runs: usize,
}

/// Runs mirror descent from every start; the best finite value wins with
/// ties going to the lowest start index.
pub(crate) fn multi_start(
    obj: &dyn SimplexObjective,
    starts: Vec<Vec<f64>>,
    max_iters: usize,
    tol: f64,
) -> Result<MultiStart> {
    let runs = starts.len();
    let outs: Vec<MdOutcome> = starts
        .into_par_iter()
        .map(|q0| mirror_descent(obj, q0, max_iters, tol))
        .collect();
    let total_iters = outs.iter().map(|o| o.iters).sum();
    let finite: Vec<&MdOutcome> = outs.iter().filter(|o| o.value.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::NonFiniteObjective);
    }
    let mut best = finite[0];
    for o in &finite[1..] {
        if o.value < best.value {
            best = o;
        }
    }
    let max = finite.iter().map(|o| o.value).fold(f64::NEG_INFINITY, f64::max);
    Ok(MultiStart { gap: max - best.value, best: best.clone(), total_iters, runs })
}

pub(crate) fn restart_points(first: Vec<f64>, n: usize, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut starts = vec![first];
    for k in 0..restarts {
        let mut rng = stream_rng(seed, k as u64 + 1);
        starts.push(dirichlet_uniform(&mut rng, n));
    }
    starts
}

/// `Φ(q) = Σ_x p(x) G(D_f(W_x‖q))`.
struct IgfObjective<'a> {
    p: &'a [f64],
    rows: Vec<&'a [f64]>,
    pair: &'a AdmissiblePair,
}

impl IgfObjective<'_> {
    fn divergences(&self, q: &[f64]) -> Vec<f64> {
        self.rows.iter().map(|w| f_div_raw(w, q, &self.pair.f).0).collect()
    }
}

impl SimplexObjective for IgfObjective<'_> {
    fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    fn eval(&self, q: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let g = &self.pair.g;
        let f = &self.pair.f;
        let mut terms = Vec::with_capacity(self.p.len());
        let divs = self.divergences(q);
        for (x, &px) in self.p.iter().enumerate() {
            if px > 0.0 {
                let v = g.eval(divs[x]);
                if v == f64::INFINITY {
                    return f64::INFINITY;
                }
                terms.push(px * v);
            }
        }
        if let Some(grad) = grad {
            grad.iter_mut().for_each(|v| *v = 0.0);
            for (x, &px) in self.p.iter().enumerate() {
                if px == 0.0 {
                    continue;
                }
                let w = px * g.d1(divs[x]);
                for (y, gy) in grad.iter_mut().enumerate() {
                    *gy += w * f.conjugate_slope(self.rows[x][y] / q[y]);
                }
            }
        }
        pairwise_sum(&terms)
    }
}

/// Minimizes `Φ` over output distributions by multi-start mirror descent.
///
/// Start 0 is the output marginal `p·W`, which is the exact minimizer for
/// `(x, KL)`; the others are Dirichlet(1) draws from `opts.seed`.
pub fn igf_info(p: &Dist, w: &Channel, pair: &AdmissiblePair, opts: &SolverOpts) -> Result<InfoResult> {
    let marginal = push_forward(p, w)?;
    info_from(p, w, pair, opts, marginal.probs().to_vec(), opts.restarts)
}

fn info_from(
    p: &Dist,
    w: &Channel,
    pair: &AdmissiblePair,
    opts: &SolverOpts,
    first: Vec<f64>,
    restarts: usize,
) -> Result<InfoResult> {
    check_len(w.nx(), p.len())?;
    let obj = IgfObjective { p: p.probs(), rows: w.rows().iter().map(|r| r.probs()).collect(), pair };
    let starts = restart_points(first, w.ny(), restarts, opts.seed);
    let ms = multi_start(&obj, starts, opts.max_iters, opts.tol)?;
    let kkt = ms.best.fw_gap;
    Ok(InfoResult {
        value: ms.best.value,
        argmin_q: Dist::from_raw(ms.best.q),
        solver_iters: ms.total_iters,
        restarts_used: ms.runs,
        certified_gap: ms.gap,
        kkt_residual: kkt,
        certified: pair.g.convex && kkt < 1e-8,
    })
}

/// Per-row values `G(D_f(W_x‖q))`, a supergradient of `p ↦ I_{G,f}` at the
/// minimizing `q`.
pub fn pointwise_values(w: &Channel, pair: &AdmissiblePair, q: &Dist) -> Result<Vec<f64>> {
    check_len(w.ny(), q.len())?;
    Ok(w.rows()
        .iter()
        .map(|r| pair.g.eval(f_div_raw(r.probs(), q.probs(), &pair.f).0))
        .collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct MaxInfo {
    pub value: f64,
    pub input: Dist,
    /// `max_x G(D_f(W_x‖q*))`, an upper bound on the supremum.
    pub upper_bound: f64,
    pub iters: usize,
}

/// Maximizes the concave map `p ↦ I_{G,f}(p, W)` by exponentiated
/// supergradient ascent from the uniform input.
pub fn max_igf_over_input(w: &Channel, pair: &AdmissiblePair, opts: &SolverOpts) -> Result<MaxInfo> {
    let nx = w.nx();
    let uniform = Dist::uniform(nx);
    if opts.assume_permutation_invariant {
        let r = igf_info(&uniform, w, pair, opts)?;
        let ub = upper(w, pair, &r.argmin_q)?;
        return Ok(MaxInfo { value: r.value, input: uniform, upper_bound: ub, iters: 0 });
    }
    let inner = SolverOpts { restarts: 0, ..opts.clone() };
    let mut p = uniform.probs().to_vec();
    let mut cur = igf_info(&Dist::from_raw(p.clone()), w, pair, &inner)?;
    let mut v = pointwise_values(w, pair, &cur.argmin_q)?;
    let mut eta = 1.0;
    let mut iters = 0;
    let mut stall = 0;
    while iters < 2000 {
        iters += 1;
        let ub = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if ub - cur.value < 1e-11 || stall >= 30 {
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut cand: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi * (eta * (vi - ub)).exp()).collect();
            let s = pairwise_sum(&cand);
            cand.iter_mut().for_each(|c| *c /= s);
            let cd = Dist::from_raw(cand.clone());
            let r = info_from(&cd, w, pair, &inner, cur.argmin_q.probs().to_vec(), 0)?;
            if r.value >= cur.value {
                stall = if r.value - cur.value < 1e-13 { stall + 1 } else { 0 };
                v = pointwise_values(w, pair, &r.argmin_q)?;
                p = cand;
                cur = r;
                eta = (eta * 1.5).min(1e6);
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let input = Dist::from_raw(p);
    let fin = igf_info(&input, w, pair, opts)?;
    if fin.value <= 1e-10 {
        let vertex = Dist::point(nx, 0);
        let r = igf_info(&vertex, w, pair, opts)?;
        let ub = upper(w, pair, &r.argmin_q)?;
        return Ok(MaxInfo { value: r.value, input: vertex, upper_bound: ub, iters });
    }
    let ub = upper(w, pair, &fin.argmin_q)?;
    Ok(MaxInfo { value: fin.value, input, upper_bound: ub, iters })
}

fn upper(w: &Channel, pair: &AdmissiblePair, q: &Dist) -> Result<f64> {
    Ok(pointwise_values(w, pair, q)?.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// `(W∘V)(z|x) = Σ_y V(z|y) W(y|x)`: first `W`, then `V`.
pub fn compose(w: &Channel, v: &Channel) -> Result<Channel> {
    check_len(w.ny(), v.nx())?;
    let rows = w
        .rows()
        .iter()
        .map(|r| {
            let mut out = vec![0.0; v.ny()];
            for (y, &wy) in r.probs().iter().enumerate() {
                if wy == 0.0 {
                    continue;
                }
                for (z, o) in out.iter_mut().enumerate() {
                    *o += wy * v.get(y, z);
                }
            }
            Dist::new(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Channel::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generator, make_pair, transform, Params};

    fn pair(g: &str, f: &str) -> AdmissiblePair {
        make_pair(transform(g, &Params::new()).unwrap(), generator(f, &Params::new()).unwrap()).unwrap()
    }

    fn h(x: f64) -> f64 {
        -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
    }

    #[test]
    fn identical_rows_give_zero() {
        let row = Dist::new(vec![0.2, 0.3, 0.5]).unwrap();
        let w = Channel::constant(3, row.clone());
        let r = igf_info(&Dist::uniform(3), &w, &pair("x", "squared_hellinger"), &SolverOpts::default()).unwrap();
        assert!(r.value.abs() < 1e-10);
        for (a, b) in r.argmin_q.probs().iter().zip(row.probs()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn bsc_mutual_information() {
        let w = Channel::bsc(0.1).unwrap();
        let r = igf_info(&Dist::uniform(2), &w, &pair("x", "kl"), &SolverOpts::default()).unwrap();
        let exact = 2f64.ln() - h(0.1);
        assert!((r.value - exact).abs() < 1e-10);
        assert!((r.value - 0.368064).abs() < 5e-7);
        assert!(r.certified);
        assert!(r.certified_gap < 1e-8);
    }

    #[test]
    fn capacity_examples() {
        let opts = SolverOpts::default();
        let m = max_igf_over_input(&Channel::bsc(0.1).unwrap(), &pair("x", "kl"), &opts).unwrap();
        assert!((m.value - (2f64.ln() - h(0.1))).abs() < 1e-9);
        assert!((m.input.probs()[0] - 0.5).abs() < 1e-5);
        let m = max_igf_over_input(&Channel::bec(0.5).unwrap(), &pair("x", "kl"), &opts).unwrap();
        assert!((m.value - 0.5 * 2f64.ln()).abs() < 1e-9);
        assert!((m.value - 0.346574).abs() < 5e-7);
        assert!(m.upper_bound - m.value < 1e-9);
    }

    #[test]
    fn flat_objective_returns_first_vertex() {
        let w = Channel::constant(3, Dist::new(vec![0.5, 0.5]).unwrap());
        let m = max_igf_over_input(&w, &pair("x", "kl"), &SolverOpts::default()).unwrap();
        assert_eq!(m.input, Dist::point(3, 0));
        assert!(m.value.abs() < 1e-10);
    }

    #[test]
    fn permutation_shortcut_evaluates_uniform() {
        let opts = SolverOpts { assume_permutation_invariant: true, ..SolverOpts::default() };
        let m = max_igf_over_input(&Channel::bsc(0.2).unwrap(), &pair("x", "kl"), &opts).unwrap();
        assert_eq!(m.input, Dist::uniform(2));
        assert!((m.value - (2f64.ln() - h(0.2))).abs() < 1e-10);
    }

    #[test]
    fn compose_examples() {
        let w = Channel::bsc(0.1).unwrap();
        assert_eq!(compose(&w, &Channel::identity(2)).unwrap(), w);
        let v = Channel::from_rows(vec![vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap();
        assert_eq!(compose(&Channel::identity(2), &v).unwrap(), v);
        let c = compose(&w, &Channel::bsc(0.2).unwrap()).unwrap();
        assert!((c.get(0, 1) - 0.26).abs() < 1e-15);
        assert!(compose(&w, &Channel::identity(3)).is_err());
    }

    #[test]
    fn disjoint_rows_with_unbounded_divergence_fail() {
        // reverse KL is +inf against any full-support q when a row has a zero
        let w = Channel::identity(2);
        let err = igf_info(&Dist::uniform(2), &w, &pair("x", "reverse_kl"), &SolverOpts::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteObjective));
    }

    #[test]
    fn parallel_and_serial_agree() {
        let w = Channel::from_rows(vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3]]).unwrap();
        let p = Dist::new(vec![0.4, 0.6]).unwrap();
        let pr = pair("log1p", "pearson");
        let a = igf_info(&p, &w, &pr, &SolverOpts::default()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| igf_info(&p, &w, &pr, &SolverOpts::default()).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.argmin_q, b.argmin_q);
    }
}
