//! Small numerical helpers shared across modules.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

/// Pairwise (tree) summation with a fixed split order.
///
/// The split is always at `len / 2`, so the association order depends only on
/// the length, never on the caller or the thread layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if xs.len() <= LEAF {
        let mut acc = 0.0;
        for &x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `n` log-spaced points covering `[lo, hi]` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// Central first derivative with relative step `1e-5` and one Richardson step.
pub fn fd_first(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = fd_step(x);
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Central second derivative with relative step `1e-3` and one Richardson step.
pub fn fd_second(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    // A larger step keeps cancellation error in f(x+h) - 2f(x) + f(x-h) tolerable.
    let h = 1e2 * fd_step(x);
    let fx = f(x);
    let d = |h: f64| (f(x + h) - 2.0 * fx + f(x - h)) / (h * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn fd_step(x: f64) -> f64 {
    let h = 1e-5 * x.abs();
    if h > 0.0 {
        h
    } else {
        1e-5
    }
}

/// Golden-section search for the maximum of a unimodal function on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max(f: &mut dyn FnMut(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Deterministic RNG for a given seed and stream index.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A Dirichlet(1, ..., 1) draw (uniform on the simplex).
pub fn dirichlet_uniform<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    v
}

/// Total variation distance between two equal-length vectors.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Extended-real subtraction for gap computations: `inf - inf` and other
/// undefined forms resolve to `+inf` (the inequality holds vacuously).
pub fn ext_sub(a: f64, b: f64) -> f64 {
    if a == f64::INFINITY {
        f64::INFINITY
    } else if b == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        a - b
    }
}

/// Decimal rendering with `sig` significant digits. Non-finite values print as
/// `inf`, `-inf` or `nan`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..16).contains(&exp) {
        let s = format!("{:.*e}", sig - 1, x);
        let (mant, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim_zeros(mant.to_string()));
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // Rounding can carry into a new digit (9.99.. -> 10.0); that only adds a
    // trailing digit, which trimming below handles.
    trim_zeros(s)
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}

/// JSON number text with 17 significant digits (exact f64 round trip).
pub fn json_num17(x: f64) -> String {
    if x.is_finite() {
        format!("{:.16e}", x)
    } else {
        // JSON has no infinity; callers only use this for finite data.
        "null".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let xs = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(pairwise_sum(&xs), ((0.1 + 0.2) + 0.3) + 0.4);
        let big: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&big), 499500.0);
    }

    #[test]
    fn log_grid_endpoints_are_exact() {
        let g = log_grid(1e-4, 1e4, 2000);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[1999], 1e4);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn finite_differences_on_smooth_functions() {
        let f = |x: f64| x.ln();
        for &x in &[1e-3, 0.5, 3.0, 1e3] {
            assert!((fd_first(&f, x) - 1.0 / x).abs() <= 1e-8 / x);
            let d2 = -1.0 / (x * x);
            assert!((fd_second(&f, x) - d2).abs() <= 1e-5 * d2.abs());
        }
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, v) = golden_max(&mut |x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.1438410362258904, 12), "0.143841036226");
        assert_eq!(fmt_sig(2.0, 12), "2");
        assert_eq!(fmt_sig(f64::INFINITY, 12), "inf");
        assert_eq!(fmt_sig(-1.0 / 9.0, 6), "-0.111111");
        assert_eq!(fmt_sig(1.5e-9, 3), "1.5e-9");
        assert_eq!(fmt_sig(-2.0e20, 12), "-2e20");
    }

    #[test]
    fn ext_sub_never_nan() {
        let inf = f64::INFINITY;
        assert_eq!(ext_sub(inf, inf), inf);
        assert_eq!(ext_sub(1.0, inf), -inf);
        assert_eq!(ext_sub(3.0, 1.0), 2.0);
    }
}
