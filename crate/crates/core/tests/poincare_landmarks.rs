use juliagreen_core::poincare::{
    comb_height, poincare_eval, selfsim_greens_residual, LandmarkTable, PoincareConfig,
};
use juliagreen_core::{derive_params, iterate_jet, Complex64};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn functional_equation_on_a_grid() {
    let config = PoincareConfig::default();
    for lambda in [3.5, 6.0] {
        let p = derive_params(lambda).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                let w = c(-60.0 + 6.0 * f64::from(i), -30.0 + 3.0 * f64::from(j));
                let inner = poincare_eval(&p, w, &config).unwrap().value;
                let outer = poincare_eval(&p, w * p.rho, &config).unwrap().value;
                let residual = (outer - inner * (inner + p.rho)).norm();
                assert!(residual < 1e-8 * outer.norm().max(1.0), "λ={lambda} w={w}");
            }
        }
    }
}

#[test]
fn landmark_ordering_and_scaling_up_to_sixty_four() {
    let p = derive_params(6.0).unwrap();
    let table = LandmarkTable::build(&p, 64, &PoincareConfig::default()).unwrap();
    let marks = table.landmarks();
    for pair in marks.windows(2) {
        let (upper, lower) = (&pair[0], &pair[1]);
        assert!(lower.a < lower.c && lower.c < lower.b);
        assert!(lower.b < upper.a);
    }
    let first = table.get(1).unwrap();
    for n in 1..=6 {
        let scaled = table.get(1 << n).unwrap();
        let factor = p.rho.powi(n);
        assert!((scaled.c - factor * first.c).abs() < 1e-8 * scaled.c.abs());
        assert!((scaled.a - factor * first.a).abs() < 1e-8 * scaled.a.abs());
        assert!((scaled.b - factor * first.b).abs() < 1e-8 * scaled.b.abs());
    }
}

#[test]
fn derivative_at_zeros_respects_the_expansion_bound() {
    let p = derive_params(6.0).unwrap();
    let config = PoincareConfig {
        disc_power: 10,
        ..PoincareConfig::default()
    };
    let table = LandmarkTable::build(&p, 170, &config).unwrap();
    let constants: Vec<f64> = (2..=8)
        .map(|n: i32| {
            let m = (1usize << n) / 3;
            let zero = table.get(2 * m).unwrap().a;
            let slope = poincare_eval(&p, c(zero, 0.0), &config).unwrap().d1.norm();
            (2.0 * p.eta / p.rho).powi(n) / slope
        })
        .collect();
    // The bound is one-sided, so the smallest admissible constant over the
    // first n indices must not grow.
    let mut running = constants[0];
    for value in &constants {
        running = running.max(*value);
        assert!(running <= 4.0 * constants[0]);
    }
}

#[test]
fn branch_composite_reproduces_iterates() {
    let p = derive_params(6.0).unwrap();
    let table = LandmarkTable::build(&p, 8, &PoincareConfig::default()).unwrap();
    let config = PoincareConfig::default();
    for x in [-1.0, 0.5, 1.5] {
        let base = table.branch_value(x, 1).unwrap();
        for n in 0..=4 {
            let w = c(base * p.rho.powi(n), 0.0);
            let lhs = poincare_eval(&p, w, &config).unwrap().value + p.xi;
            let rhs = iterate_jet(&p, c(x, 0.0), n as usize + 1).unwrap().value;
            assert!((lhs - rhs).norm() < 1e-6 * rhs.norm(), "x={x} n={n}");
        }
    }
}

#[test]
fn self_similarity_on_fifty_samples() {
    let p = derive_params(6.0).unwrap();
    let table = LandmarkTable::build(&p, 2, &PoincareConfig::default()).unwrap();
    let c1 = table.get(1).unwrap().c;
    let worst = (0..50)
        .map(|k| {
            let t = f64::from(k) / 49.0;
            let z = c(c1 * (1.5 * t - 0.5), 0.05 + 2.0 * t * (1.0 - t));
            selfsim_greens_residual(&p, z).unwrap()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-7, "{worst}");
}

#[test]
fn comb_heights_approach_the_comb_height() {
    let p = derive_params(6.0).unwrap();
    let pi = std::f64::consts::PI;
    assert!((comb_height(&p, 1).unwrap().height - 2f64.acosh() / pi).abs() < 1e-12);
    assert!((comb_height(&p, 2).unwrap().height - 10f64.acosh() / pi).abs() < 1e-12);
    let normalised: Vec<f64> = (0..=12)
        .map(|m| comb_height(&p, 1 << m).unwrap().height / f64::from(1u32 << m))
        .collect();
    assert!(normalised.windows(2).all(|w| w[1] > w[0]));
    assert!((normalised[12] - p.a).abs() < 1e-3);
    for l in [1, 3, 5, 7, 9] {
        assert_eq!(comb_height(&p, l).unwrap().height, comb_height(&p, 1).unwrap().height);
    }
}
