mod common;

use common::{channel, convex_generators, dist, registry_generators, rng, size};
use gfdiv::divergence::{f_div, renyi_div};
use gfdiv::generators::{generator, transform};
use gfdiv::probcore::{product_dist, push_forward};
use gfdiv::{dm_of, make_pair, Dist, Params};
use rand::Rng;

#[test]
fn data_processing_for_every_convex_generator() {
    let gens = convex_generators();
    let mut r = rng(1);
    for _ in 0..300 {
        let n = size(&mut r, 2, 4);
        let m = size(&mut r, 2, 4);
        let (p, q, k) = (dist(&mut r, n), dist(&mut r, n), channel(&mut r, n, m));
        let (pk, qk) = (push_forward(&p, &k).unwrap(), push_forward(&q, &k).unwrap());
        for f in &gens {
            let before = f_div(&p, &q, f).unwrap();
            let after = f_div(&pk, &qk, f).unwrap();
            assert!(after <= before + 1e-10, "{}: {after} > {before}", f.name);
        }
    }
}

/// Pairs with zeros in either argument, including disjoint supports.
fn boundary_dist<R: Rng>(r: &mut R, n: usize) -> Dist {
    loop {
        let v: Vec<f64> = (0..n).map(|_| if r.random_bool(0.35) { 0.0 } else { r.random::<f64>() }).collect();
        let s: f64 = v.iter().sum();
        if s > 1e-9 {
            return Dist::new(v.into_iter().map(|x| x / s).collect()).unwrap();
        }
    }
}

#[test]
fn divergence_never_exceeds_dm() {
    let gens: Vec<_> = convex_generators().into_iter().filter(|g| g.norm == gfdiv::Normalization::ZeroAtOne).collect();
    let dms: Vec<f64> = gens.iter().map(|g| dm_of(g).unwrap()).collect();
    let mut r = rng(2);
    for i in 0..10_000 {
        let n = size(&mut r, 2, 4);
        let (p, q) = if i % 2 == 0 {
            (dist(&mut r, n), dist(&mut r, n))
        } else {
            (boundary_dist(&mut r, n), boundary_dist(&mut r, n))
        };
        for (f, &dm) in gens.iter().zip(&dms) {
            let d = f_div(&p, &q, f).unwrap();
            assert!(d <= dm + 1e-9, "{}: {d} > {dm}", f.name);
        }
    }
}

#[test]
fn kl_is_additive_and_chi_square_multiplicative() {
    let kl = generator("kl", &Params::new()).unwrap();
    let chi = generator("pearson", &Params::new()).unwrap();
    let mut r = rng(3);
    for _ in 0..10_000 {
        let (n, m) = (size(&mut r, 2, 4), size(&mut r, 2, 4));
        let (a, b, c, d) = (dist(&mut r, n), dist(&mut r, n), dist(&mut r, m), dist(&mut r, m));
        let (ac, bd) = (product_dist(&a, &c), product_dist(&b, &d));
        let joint = f_div(&ac, &bd, &kl).unwrap();
        let sum = f_div(&a, &b, &kl).unwrap() + f_div(&c, &d, &kl).unwrap();
        assert!((joint - sum).abs() < 1e-10);
        let joint = 1.0 + f_div(&ac, &bd, &chi).unwrap();
        let prod = (1.0 + f_div(&a, &b, &chi).unwrap()) * (1.0 + f_div(&c, &d, &chi).unwrap());
        assert!((joint - prod).abs() < 1e-10 * prod.max(1.0));
    }
}

#[test]
fn renyi_identity_through_hellinger_divergence() {
    let mut r = rng(4);
    for alpha in [0.5, 2.0] {
        let ps = common::params(&[("alpha", alpha)]);
        let pair = make_pair(transform("renyi_G", &ps).unwrap(), generator("hellinger_order", &ps).unwrap()).unwrap();
        for _ in 0..100 {
            let n = size(&mut r, 2, 5);
            let (p, q) = (dist(&mut r, n), dist(&mut r, n));
            let via_pair = gfdiv::divergence::gf_div(&p, &q, &pair).unwrap();
            // independent direct sum
            let s: f64 = p.probs().iter().zip(q.probs()).map(|(a, b)| a.powf(alpha) * b.powf(1.0 - alpha)).sum();
            let direct = s.ln() / (alpha - 1.0);
            assert!((via_pair - direct).abs() < 1e-10, "alpha={alpha}: {via_pair} vs {direct}");
            assert!((renyi_div(&p, &q, alpha).unwrap() - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn concave_generators_reverse_data_processing() {
    let gens: Vec<_> = registry_generators().into_iter().filter(|g| !g.is_convex()).collect();
    assert!(!gens.is_empty());
    let mut r = rng(5);
    for _ in 0..200 {
        let n = size(&mut r, 2, 4);
        let (p, q, k) = (dist(&mut r, n), dist(&mut r, n), channel(&mut r, n, 3));
        let (pk, qk) = (push_forward(&p, &k).unwrap(), push_forward(&q, &k).unwrap());
        for f in &gens {
            assert!(f_div(&pk, &qk, f).unwrap() >= f_div(&p, &q, f).unwrap() - 1e-10, "{}", f.name);
        }
    }
}
