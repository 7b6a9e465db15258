mod common;

use common::registry_generators;
use gfdiv::generators::transform;
use gfdiv::numeric::{fd_first, log_grid};
use gfdiv::Params;
use proptest::prelude::*;

#[test]
fn analytic_second_derivative_matches_differences() {
    let grid = log_grid(1e-3, 1e3, 100);
    for g in registry_generators().into_iter().filter(|g| g.has_d2()) {
        for &x in &grid {
            let fd = fd_first(&|t| g.d1(t), x);
            let d2 = g.d2(x).unwrap();
            let tol = f64::max(1e-6, 1e-6 * d2.abs());
            assert!((fd - d2).abs() <= tol, "{} at {x}: fd {fd} vs {d2}", g.name);
        }
    }
}

proptest! {
    #[test]
    fn neg_log1m_has_affine_inverse_derivative(x in 0.0f64..0.999) {
        let g = transform("neg_log1m", &Params::new()).unwrap();
        prop_assert_eq!(g.recip_d1(x), 1.0 - x);
    }

    #[test]
    fn registry_generators_vanish_or_equal_one_at_one(i in 0usize..19) {
        let g = &registry_generators()[i];
        let want = match g.norm {
            gfdiv::Normalization::ZeroAtOne => 0.0,
            gfdiv::Normalization::OneAtOne => 1.0,
        };
        prop_assert!((g.eval(1.0) - want).abs() < 1e-14);
    }
}
