use juliagreen_core::{derive_params, greens_value, iterate_jet, log_deriv_jet, preimages, Complex64};
use rand::{Rng, SeedableRng};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Branch of `√(z²−4)` that behaves like `z` at infinity.
fn joukowski_root(z: Complex64) -> Complex64 {
    (z - 2.0).sqrt() * (z + 2.0).sqrt()
}

#[test]
fn chebyshev_case_matches_closed_forms() {
    let p = derive_params(2.0).unwrap();
    for k in 0..20 {
        let angle = 0.3 * f64::from(k);
        let z = c(2.5 * angle.cos(), 0.7 + 1.3 * angle.sin().abs()) * if k % 2 == 0 { 1.0 } else { -1.0 };
        let root = joukowski_root(z);
        let expected_g = ((z + root) / 2.0).norm().ln();
        let data = log_deriv_jet(&p, z, 1e-14).unwrap();
        assert!((greens_value(&p, z).unwrap() - expected_g).abs() < 1e-9);
        assert!((data.green - expected_g).abs() < 1e-9);
        assert!((data.log_deriv + 1.0 / root).norm() < 1e-8);
        assert!((data.log_deriv_prime - z / (root * root * root)).norm() < 1e-8);
    }
}

#[test]
fn doubling_identities_on_random_escaping_points() {
    let p = derive_params(6.0).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..200 {
        let z = c(rng.gen_range(-5.0..5.0), rng.gen_range(0.05..4.0));
        let image = p.eval(z);
        let g = greens_value(&p, z).unwrap();
        let g_image = greens_value(&p, image).unwrap();
        assert!((g_image - 2.0 * g).abs() < 1e-9, "{z}");
        let here = log_deriv_jet(&p, z, 1e-14).unwrap();
        let there = log_deriv_jet(&p, image, 1e-14).unwrap();
        let residual = there.log_deriv * 2.0 * z - 2.0 * here.log_deriv;
        assert!(residual.norm() < 1e-9, "{z}: {residual}");
    }
}

#[test]
fn iterated_derivative_dominates_the_expansion_rate() {
    let p = derive_params(6.0).unwrap();
    let target = c(p.xi, 0.0);
    let mut count = 0;
    for n in 1..=6 {
        let rate = (2.0 * p.eta).powi(n as i32);
        for y in preimages(&p, target, n) {
            let jet = iterate_jet(&p, y, n).unwrap();
            assert!((jet.value - target).norm() < 1e-9);
            assert!(jet.d1.norm() / rate >= 1.0, "n={n} y={y}");
            count += 1;
        }
    }
    assert_eq!(count, 126);
}
