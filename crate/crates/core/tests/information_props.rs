mod common;

use common::{channel, dist, pair, registry_pairs, rng, shannon_mi, size};
use gfdiv::information::{compose, igf_info, max_igf_over_input, SolverOpts};
use gfdiv::numeric::total_variation;
use gfdiv::{Channel, Dist};
use rand::Rng;

fn opts() -> SolverOpts {
    SolverOpts { restarts: 2, ..SolverOpts::default() }
}

#[test]
fn information_is_nonnegative_and_obeys_data_processing() {
    let pairs = registry_pairs();
    assert!(pairs.len() > 30);
    let mut r = rng(10);
    let o = opts();
    for _ in 0..200 {
        let (nx, ny, nz) = (size(&mut r, 2, 4), size(&mut r, 2, 4), size(&mut r, 2, 4));
        let p = dist(&mut r, nx);
        let w = channel(&mut r, nx, ny);
        let v = channel(&mut r, ny, nz);
        let wv = compose(&w, &v).unwrap();
        for pr in &pairs {
            let direct = igf_info(&p, &w, pr, &o).unwrap().value;
            let processed = igf_info(&p, &wv, pr, &o).unwrap().value;
            assert!(direct >= -1e-12 && processed >= -1e-12, "{}", pr.label());
            assert!(processed <= direct + 1e-6, "{}: {processed} > {direct}", pr.label());
        }
    }
}

#[test]
fn information_is_concave_in_the_input() {
    let pairs = registry_pairs();
    let mut r = rng(11);
    let o = opts();
    for i in 0..200 {
        let pr = &pairs[i % pairs.len()];
        let (nx, ny) = (size(&mut r, 2, 4), size(&mut r, 2, 4));
        let w = channel(&mut r, nx, ny);
        let (p1, p2) = (dist(&mut r, nx), dist(&mut r, nx));
        let l: f64 = r.random();
        let mixed = p1.mix(&p2, l).unwrap();
        let phi = |p: &Dist| igf_info(p, &w, pr, &o).unwrap().value;
        let lhs = phi(&mixed);
        let rhs = l * phi(&p1) + (1.0 - l) * phi(&p2);
        assert!(lhs >= rhs - 1e-6, "{}: {lhs} < {rhs}", pr.label());
    }
}

#[test]
fn four_node_chain_for_convex_transforms() {
    let pairs: Vec<_> = registry_pairs().into_iter().filter(|p| p.g.convex).collect();
    assert!(!pairs.is_empty());
    let mut r = rng(12);
    let o = opts();
    for i in 0..200 {
        let pr = &pairs[i % pairs.len()];
        let sizes: Vec<usize> = (0..4).map(|_| size(&mut r, 2, 4)).collect();
        let pa = dist(&mut r, sizes[0]);
        let ax = channel(&mut r, sizes[0], sizes[1]);
        let xy = channel(&mut r, sizes[1], sizes[2]);
        let yb = channel(&mut r, sizes[2], sizes[3]);
        let px = gfdiv::probcore::push_forward(&pa, &ax).unwrap();
        let outer = igf_info(&pa, &compose(&compose(&ax, &xy).unwrap(), &yb).unwrap(), pr, &o).unwrap().value;
        let inner = igf_info(&px, &xy, pr, &o).unwrap().value;
        assert!(outer <= inner + 1e-6, "{}: {outer} > {inner}", pr.label());
    }
}

#[test]
fn shannon_information_is_recovered() {
    let kl = pair("x", "kl");
    let mut r = rng(13);
    for _ in 0..100 {
        let (nx, ny) = (size(&mut r, 2, 4), size(&mut r, 2, 4));
        let p = dist(&mut r, nx);
        let w = channel(&mut r, nx, ny);
        let v = igf_info(&p, &w, &kl, &SolverOpts::default()).unwrap().value;
        let oracle = shannon_mi(&p, &w);
        assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
    }
}

#[test]
fn bsc_capacity_at_uniform_input() {
    let kl = pair("x", "kl");
    let w = Channel::bsc(0.1).unwrap();
    let o = SolverOpts::default();
    let v = igf_info(&Dist::uniform(2), &w, &kl, &o).unwrap().value;
    let h = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
    assert!((v - (2f64.ln() - h)).abs() < 1e-10);
    assert!((v - 0.368064).abs() < 1e-6);
    let m = max_igf_over_input(&w, &kl, &o).unwrap();
    assert!(total_variation(m.input.probs(), &[0.5, 0.5]) < 1e-6);
}
