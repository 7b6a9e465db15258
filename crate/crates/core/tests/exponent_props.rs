mod common;

use common::{channel, dist, pair, rng, size};
use gfdiv::exponent::{classical_sp_oracle, exponent_curve, mu_x, PowerFamily, SFamily};
use gfdiv::information::{max_igf_over_input, SolverOpts};
use gfdiv::Channel;

fn rates_up_to(cap: f64) -> Vec<f64> {
    let mut r: Vec<f64> = (1..).map(|k| 0.05 * k as f64).take_while(|&x| x < cap).collect();
    r.push(cap);
    r
}

fn check_channel(w: &Channel) {
    let opts = SolverOpts::default();
    let cap = max_igf_over_input(w, &pair("x", "kl"), &opts).unwrap().value;
    let rates = rates_up_to(cap);
    let curve = exponent_curve(w, &rates, &PowerFamily, &opts).unwrap();
    for (pt, &r) in curve.per_point.iter().zip(&rates) {
        let oracle = classical_sp_oracle(w, r).unwrap().value;
        assert!((pt.value - oracle).abs() < 1e-3, "R={r}: {} vs {oracle}", pt.value);
        assert!(pt.value >= -1e-9);
    }
    assert!(curve.values.last().unwrap().abs() < 1e-6);
    for win in curve.values.windows(2) {
        assert!(win[1] <= win[0] + 1e-6, "{win:?}");
    }
}

#[test]
fn matches_the_classical_exponent_on_bscs() {
    for d in [0.05, 0.1, 0.2] {
        check_channel(&Channel::bsc(d).unwrap());
    }
}

#[test]
fn matches_the_classical_exponent_on_a_random_channel() {
    let mut r = rng(40);
    check_channel(&channel(&mut r, 3, 3));
}

#[test]
fn bracket_vanishes_as_s_goes_to_zero() {
    let mut r = rng(41);
    let s = 1e-7;
    let f = PowerFamily.at(s).unwrap();
    for _ in 0..100 {
        let (nx, ny) = (size(&mut r, 2, 4), size(&mut r, 2, 4));
        let w = channel(&mut r, nx, ny);
        let (p, q) = (dist(&mut r, nx), dist(&mut r, ny));
        let rate = 0.3;
        let mut b = -s * rate / (1.0 - s);
        for x in 0..nx {
            b -= p.probs()[x] * mu_x(s, &q, &w, x, &f).unwrap() / (1.0 - s);
        }
        assert!(b.abs() < 1e-5, "{b}");
    }
}
