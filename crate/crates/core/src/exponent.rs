//! Generalized sphere-packing exponent and a classical reference
//! implementation.
//!
//! For an s-indexed family `f_s` the exponent is
//! `sup_p sup_s inf_q [ −Σ_x p(x) μ_x(s, q)/(1−s) − sR/(1−s) ]` with
//! `μ_x = log D_{f_s}(q‖W_x)`, clamped below at zero.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::f_div_raw;
use crate::error::{check_len, Error, Result};
use crate::generators::{generator, Curvature, FGenerator, Normalization, Params};
use crate::information::{mirror_descent, SimplexObjective, SolverOpts};
use crate::numeric::{golden_max, pairwise_sum};
use crate::probcore::{Channel, Dist};

/// An s-indexed family of concave `ONE_AT_ONE` generators.
pub trait SFamily: Send + Sync {
    fn name(&self) -> String;
    fn at(&self, s: f64) -> Result<FGenerator>;
    /// Bounds `(a, b)` with `a ≤ ψ_s ≤ b`.
    fn psi_bounds(&self) -> (f64, f64);
}

/// `f_s(t) = t^s`, i.e. `ψ_s ≡ 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct PowerFamily;

impl SFamily for PowerFamily {
    fn name(&self) -> String {
        "power".into()
    }

    fn at(&self, s: f64) -> Result<FGenerator> {
        check_s(s)?;
        generator("power", &[("p".to_string(), s)].into_iter().collect::<Params>())
    }

    fn psi_bounds(&self) -> (f64, f64) {
        (1.0, 1.0)
    }
}

/// `ψ_s` and its first four derivatives at `x`.
pub type PsiFn = Arc<dyn Fn(f64, f64) -> [f64; 5] + Send + Sync>;

/// `f_s(t) = t^s ψ_s(log t)` for a user-supplied `ψ_s`.
#[derive(Clone)]
pub struct PsiFamily {
    pub name: String,
    pub psi: PsiFn,
    pub bounds: (f64, f64),
}

impl PsiFamily {
    pub fn new(name: &str, bounds: (f64, f64), psi: impl Fn(f64, f64) -> [f64; 5] + Send + Sync + 'static) -> Self {
        PsiFamily { name: name.into(), psi: Arc::new(psi), bounds }
    }

    /// The three conditions on `ψ_s` at a fixed `s`, sampled on `[−l, l]`.
    pub fn check(&self, s: f64, l: f64, n: usize) -> Result<PsiCheck> {
        check_psi(&*self.psi, s, l, n)
    }
}

impl SFamily for PsiFamily {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn at(&self, s: f64) -> Result<FGenerator> {
        check_s(s)?;
        let psi = self.psi.clone();
        let f = move |t: f64| {
            if t == 0.0 {
                0.0
            } else {
                t.powf(s) * psi(s, t.ln())[0]
            }
        };
        Ok(FGenerator::custom(&format!("{}(s={s})", self.name), Normalization::OneAtOne, Curvature::Concave, f))
    }

    fn psi_bounds(&self) -> (f64, f64) {
        self.bounds
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange { name: "s".into(), detail: format!("{s} outside (0,1)") })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiCheck {
    pub s: f64,
    pub psi_at_zero: f64,
    pub min_phi: f64,
    /// Minimum over the grid of `Lφ(x) − φ(y)φ(x−y)`.
    pub min_product_residual: f64,
    pub psi_at_zero_is_one: bool,
    pub phi_nonnegative: bool,
    pub product_condition: bool,
}

impl PsiCheck {
    pub fn holds(&self) -> bool {
        self.psi_at_zero_is_one && self.phi_nonnegative && self.product_condition
    }
}

/// Checks `ψ_s(0) = 1`, `φ_s ≥ 0` and `φ_s + kφ_s' − mφ_s'' ≥ φ_s(y)φ_s(x−y)`
/// where `φ_s = ψ_s + kψ_s' − mψ_s''`, `k = (1−2s)/(s(1−s))`, `m = 1/(s(1−s))`.
pub fn check_psi(psi: &dyn Fn(f64, f64) -> [f64; 5], s: f64, l: f64, n: usize) -> Result<PsiCheck> {
    check_s(s)?;
    if !(l > 0.0) || n < 2 {
        return Err(Error::InvalidInput("psi check needs l > 0 and n ≥ 2".into()));
    }
    let k = (1.0 - 2.0 * s) / (s * (1.0 - s));
    let m = 1.0 / (s * (1.0 - s));
    // φ, φ', φ'' from the derivative stack
    let phi = |x: f64| {
        let d = psi(s, x);
        [
            d[0] + k * d[1] - m * d[2],
            d[1] + k * d[2] - m * d[3],
            d[2] + k * d[3] - m * d[4],
        ]
    };
    let grid: Vec<f64> = (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect();
    let psi0 = psi(s, 0.0)[0];
    let mut min_phi = f64::INFINITY;
    let mut min_res = f64::INFINITY;
    for &x in &grid {
        let [p0, p1, p2] = phi(x);
        min_phi = min_phi.min(p0);
        let lhs = p0 + k * p1 - m * p2;
        for &y in &grid {
            let rhs = phi(y)[0] * phi(x - y)[0];
            min_res = min_res.min((lhs - rhs) / (1.0 + rhs.abs()));
        }
    }
    Ok(PsiCheck {
        s,
        psi_at_zero: psi0,
        min_phi,
        min_product_residual: min_res,
        psi_at_zero_is_one: (psi0 - 1.0).abs() < 1e-12,
        phi_nonnegative: min_phi >= -1e-12,
        product_condition: min_res >= -1e-9,
    })
}

/// `log D_{f_s}(q‖W_x) = log Σ_y W(y|x) f_s(q(y)/W(y|x))`.
pub fn mu_x(s: f64, q: &Dist, w: &Channel, x: usize, f_s: &FGenerator) -> Result<f64> {
    check_s(s)?;
    check_len(w.ny(), q.len())?;
    if x >= w.nx() {
        return Err(Error::InvalidInput(format!("input symbol {x} out of range for {} rows", w.nx())));
    }
    if !q.has_full_support() {
        return Err(Error::InvalidDistribution("mu_x needs a full-support q".into()));
    }
    Ok(f_div_raw(q.probs(), w.row(x).probs(), f_s).0.ln())
}

/// `q ↦ Σ_x p(x) v_x(q)` with `v_x = −(μ_x + sR)/(1−s)`.
struct Bracket<'a> {
    s: f64,
    rate: f64,
    p: &'a [f64],
    rows: Vec<&'a [f64]>,
    f: &'a FGenerator,
}

impl Bracket<'_> {
    fn per_input(&self, q: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|w| -(f_div_raw(q, w, self.f).0.ln() + self.s * self.rate) / (1.0 - self.s))
            .collect()
    }
}

impl SimplexObjective for Bracket<'_> {
    fn dim(&self) -> usize {
        self.rows[0].len()
    }

    fn eval(&self, q: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let c = 1.0 - self.s;
        let mut terms = Vec::with_capacity(self.rows.len());
        let mut g = grad;
        if let Some(g) = g.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        for (&px, w) in self.p.iter().zip(&self.rows) {
            if px == 0.0 {
                continue;
            }
            let d = f_div_raw(q, w, self.f).0;
            terms.push(-px * (d.ln() + self.s * self.rate) / c);
            if let Some(g) = g.as_deref_mut() {
                for (y, gy) in g.iter_mut().enumerate() {
                    *gy -= px * self.f.d1(q[y] / w[y]) / (d * c);
                }
            }
        }
        pairwise_sum(&terms)
    }
}

/// Result of the alternation at one `s`.
#[derive(Clone, Debug)]
struct SPoint {
    s: f64,
    lower: f64,
    upper: f64,
    p: Vec<f64>,
    q: Vec<f64>,
    rounds: usize,
}

const MAX_ROUNDS: usize = 50;
const ROUND_TOL: f64 = 1e-9;

fn inner(s: f64, rate: f64, p: &[f64], w: &Channel, f: &FGenerator, q0: Vec<f64>, opts: &SolverOpts) -> (Vec<f64>, f64, Vec<f64>) {
    let rows: Vec<&[f64]> = w.rows().iter().map(|r| r.probs()).collect();
    let obj = Bracket { s, rate, p, rows, f };
    let out = mirror_descent(&obj, q0, opts.max_iters, opts.tol);
    let v = obj.per_input(&out.q);
    (out.q, out.value, v)
}

/// Alternates the inner infimum over `q` with exponentiated-gradient steps
/// on `p`, starting from `(p, q0)`.
fn solve_s(w: &Channel, rate: f64, fam: &dyn SFamily, s: f64, start: (&[f64], &[f64]), opts: &SolverOpts) -> Result<SPoint> {
    let f = fam.at(s)?;
    let mut p = start.0.to_vec();
    let q0 = start.1.to_vec();
    let (mut q, mut lower, mut v) = inner(s, rate, &p, w, &f, q0, opts);
    let mut eta = 1.0;
    let mut rounds = 0;
    let upper_of = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    while rounds < MAX_ROUNDS {
        let upper = upper_of(&v);
        if upper - lower < ROUND_TOL {
            break;
        }
        rounds += 1;
        let mut moved = false;
        for _ in 0..40 {
            let mut cand: Vec<f64> = p.iter().zip(&v).map(|(pi, vi)| pi * (eta * (vi - upper)).exp()).collect();
            let z = pairwise_sum(&cand);
            cand.iter_mut().for_each(|c| *c /= z);
            let (cq, cl, cv) = inner(s, rate, &cand, w, &f, q.clone(), opts);
            if cl >= lower {
                p = cand;
                q = cq;
                lower = cl;
                v = cv;
                eta = (eta * 2.0).min(1e6);
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let upper = upper_of(&v);
    Ok(SPoint { s, lower, upper, p, q, rounds })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPoint {
    pub rate: f64,
    pub value: f64,
    pub s: f64,
    pub input: Dist,
    pub output: Dist,
    /// Certified bracket on the maximized inner value at `s`.
    pub lower: f64,
    pub upper: f64,
    pub rounds: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentCurve {
    pub family: String,
    pub psi_bounds: (f64, f64),
    pub rate_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub per_point: Vec<ExponentPoint>,
}

fn check_setting(w: &Channel, rate: f64) -> Result<()> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "R".into(), detail: format!("{rate} must be positive") });
    }
    if !w.is_strictly_positive() {
        return Err(Error::InvalidChannel("the exponent needs a strictly positive channel".into()));
    }
    Ok(())
}

/// The exponent at rate `rate`. The s-grid is `{0.01,…,0.99}` followed by a
/// golden-section refinement around the best grid point.
pub fn efsp(w: &Channel, rate: f64, fam: &dyn SFamily, opts: &SolverOpts) -> Result<ExponentPoint> {
    check_setting(w, rate)?;
    let nx = w.nx();
    let uniform = vec![1.0 / nx as f64; nx];
    let out = crate::probcore::push_forward(&Dist::from_raw(uniform.clone()), w)?.probs().to_vec();
    let mut best: Option<SPoint> = None;
    // each grid point starts from the previous one's solution
    let (mut p0, mut q0) = (uniform, out);
    for k in 1..=99 {
        let pt = solve_s(w, rate, fam, k as f64 / 100.0, (&p0, &q0), opts)?;
        p0.clone_from(&pt.p);
        q0.clone_from(&pt.q);
        if best.as_ref().is_none_or(|b| pt.lower > b.lower) {
            best = Some(pt);
        }
    }
    let mut best = best.expect("non-empty grid");
    let (bp, bq) = (best.p.clone(), best.q.clone());
    let lo = (best.s - 0.01).max(1e-4);
    let hi = (best.s + 0.01).min(1.0 - 1e-4);
    let mut err = None;
    let mut refined: Option<SPoint> = None;
    let (_, _) = golden_max(
        &mut |s| match solve_s(w, rate, fam, s, (&bp, &bq), opts) {
            Ok(pt) => {
                let v = pt.lower;
                if refined.as_ref().is_none_or(|b| v > b.lower) {
                    refined = Some(pt);
                }
                v
            }
            Err(e) => {
                err = Some(e);
                f64::NEG_INFINITY
            }
        },
        lo,
        hi,
        30,
    );
    if let Some(e) = err {
        return Err(e);
    }
    if let Some(r) = refined {
        if r.lower > best.lower {
            best = r;
        }
    }
    let converged = best.upper - best.lower <= 1e-6;
    let value = if best.lower == f64::INFINITY { f64::INFINITY } else { best.lower.max(0.0) };
    Ok(ExponentPoint {
        rate,
        value,
        s: best.s,
        input: Dist::from_raw(best.p),
        output: Dist::from_raw(best.q),
        lower: best.lower,
        upper: best.upper,
        rounds: best.rounds,
        converged,
    })
}

/// Evaluates [`efsp`] on every rate, in parallel.
pub fn exponent_curve(w: &Channel, rates: &[f64], fam: &dyn SFamily, opts: &SolverOpts) -> Result<ExponentCurve> {
    let per_point = rates.par_iter().map(|&r| efsp(w, r, fam, opts)).collect::<Result<Vec<_>>>()?;
    Ok(ExponentCurve {
        family: fam.name(),
        psi_bounds: fam.psi_bounds(),
        rate_grid: rates.to_vec(),
        values: per_point.iter().map(|p| p.value).collect(),
        per_point,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub value: f64,
    pub rho: f64,
    pub input: Dist,
}

/// `E_0(ρ, p) = −log Σ_y (Σ_x p(x) W(y|x)^{1/(1+ρ)})^{1+ρ}` with its gradient in `p`.
fn gallager_e0(w: &Channel, p: &[f64], rho: f64, grad: Option<&mut [f64]>) -> f64 {
    let e = 1.0 / (1.0 + rho);
    let ny = w.ny();
    let a: Vec<f64> = (0..ny).map(|y| (0..w.nx()).map(|x| p[x] * w.get(x, y).powf(e)).sum()).collect();
    let sum: f64 = a.iter().map(|ay| ay.powf(1.0 + rho)).sum();
    if let Some(g) = grad {
        for (x, gx) in g.iter_mut().enumerate() {
            let d: f64 = (0..ny).map(|y| a[y].powf(rho) * w.get(x, y).powf(e)).sum();
            *gx = -(1.0 + rho) * d / sum;
        }
    }
    -sum.ln()
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
}

/// `max_p E_0(ρ, p)` by projected gradient ascent from the uniform input.
fn max_e0(w: &Channel, rho: f64) -> (f64, Vec<f64>) {
    let n = w.nx();
    let mut p = vec![1.0 / n as f64; n];
    let mut g = vec![0.0; n];
    let mut val = gallager_e0(w, &p, rho, Some(&mut g));
    let mut step = 1.0;
    for _ in 0..2000 {
        let mut improved = false;
        for _ in 0..50 {
            let cand = project_simplex(&p.iter().zip(&g).map(|(a, b)| a + step * b).collect::<Vec<_>>());
            let mut cg = vec![0.0; n];
            let cv = gallager_e0(w, &cand, rho, Some(&mut cg));
            if cv > val {
                let gain = cv - val;
                p = cand;
                g = cg;
                val = cv;
                step *= 1.5;
                improved = gain > 1e-16;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (val, p)
}

/// Classical sphere-packing exponent `sup_{ρ∈[0,100]} sup_p [E_0(ρ, p) − ρR]`,
/// from a ρ grid followed by ternary search.
pub fn classical_sp_oracle(w: &Channel, rate: f64) -> Result<OracleResult> {
    check_setting(w, rate)?;
    let obj = |rho: f64| {
        let (e, p) = max_e0(w, rho);
        (e - rho * rate, p)
    };
    let grid: Vec<f64> = (0..=400).map(|k| 100.0 * (k as f64 / 400.0).powi(2)).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| obj(r).0).collect();
    let (k, _) = vals.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let mut a = grid[k.saturating_sub(1)];
    let mut b = grid[(k + 1).min(grid.len() - 1)];
    for _ in 0..100 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if obj(m1).0 < obj(m2).0 {
            a = m1;
        } else {
            b = m2;
        }
    }
    let mut rho = 0.5 * (a + b);
    let (mut v, mut p) = obj(rho);
    if vals[k] > v {
        rho = grid[k];
        (v, p) = obj(rho);
    }
    Ok(OracleResult { value: v.max(0.0), rho, input: Dist::from_raw(p) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bsc(d: f64) -> Channel {
        Channel::bsc(d).unwrap()
    }

    #[test]
    fn mu_x_examples() {
        let f = PowerFamily.at(0.5).unwrap();
        let w = Channel::from_rows(vec![vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let v = mu_x(0.5, &Dist::uniform(2), &w, 0, &f).unwrap();
        assert!((v - (0.45f64.sqrt() + 0.05f64.sqrt()).ln()).abs() < 1e-15);
        assert!((v + 0.111572).abs() < 1e-6);
        assert!(mu_x(0.5, w.row(0), &w, 0, &f).unwrap().abs() < 1e-15);
        assert!(mu_x(0.5, &Dist::uniform(2), &w, 1, &f).unwrap().abs() < 1e-15);
        assert!(mu_x(1.0, &Dist::uniform(2), &w, 0, &f).is_err());
        assert!(mu_x(0.5, &Dist::point(2, 0), &w, 0, &f).is_err());
    }

    #[test]
    fn oracle_examples() {
        let c = 2f64.ln() + 0.1 * 0.1f64.ln() + 0.9 * 0.9f64.ln();
        assert_eq!(classical_sp_oracle(&bsc(0.1), c + 1e-9).unwrap().value, 0.0);
        let r = classical_sp_oracle(&bsc(0.1), 0.1).unwrap();
        assert!((r.value - 0.12785).abs() < 1e-4, "{}", r.value);
        for &x in r.input.probs() {
            assert!((x - 0.5).abs() < 1e-6);
        }
    }

    #[test]
    fn efsp_matches_oracle_on_bsc() {
        let opts = SolverOpts::default();
        for &r in &[0.1, 0.2, 0.3] {
            let e = efsp(&bsc(0.1), r, &PowerFamily, &opts).unwrap();
            let o = classical_sp_oracle(&bsc(0.1), r).unwrap();
            assert!((e.value - o.value).abs() < 1e-3, "R={r}: {} vs {}", e.value, o.value);
            assert!(e.converged);
        }
        let e = efsp(&bsc(0.1), 0.368065, &PowerFamily, &opts).unwrap();
        assert!(e.value.abs() < 1e-6);
    }

    #[test]
    fn identical_rows_give_zero() {
        let w = Channel::constant(3, Dist::new(vec![0.2, 0.3, 0.5]).unwrap());
        let e = efsp(&w, 0.05, &PowerFamily, &SolverOpts::default()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn constant_psi_passes_the_checker() {
        let fam = PsiFamily::new("const", (1.0, 1.0), |_, _| [1.0, 0.0, 0.0, 0.0, 0.0]);
        for s in [0.1, 0.5, 0.9] {
            assert!(fam.check(s, 5.0, 41).unwrap().holds());
        }
        let bad = PsiFamily::new("shifted", (2.0, 2.0), |_, _| [2.0, 0.0, 0.0, 0.0, 0.0]);
        let c = bad.check(0.5, 5.0, 21).unwrap();
        assert!(!c.psi_at_zero_is_one);
        assert!(!c.product_condition);
        // ψ ≡ 1 as a custom family reproduces the power family
        let f = fam.at(0.3).unwrap();
        let g = PowerFamily.at(0.3).unwrap();
        for t in [0.01, 0.5, 2.0, 40.0] {
            assert!((f.eval(t) - g.eval(t)).abs() < 1e-14);
        }
    }

    #[test]
    fn projection_lands_on_simplex() {
        let p = project_simplex(&[0.8, 0.6, -0.3]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.4).abs() < 1e-15 && p[2] == 0.0);
    }
}
