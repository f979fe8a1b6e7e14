use juliagreen_core::quadrature::QuadSettings;
use juliagreen_core::radvar::{
    goodset_level, radial_variation_with, scale_contribution_via_pullback, RadVarSettings,
};
use juliagreen_core::{
    derive_params, pullback_check, radial_variation, scale_contribution, DirectionAngle, Error,
};

fn ang(p: u64, q: u64) -> DirectionAngle {
    DirectionAngle::new(p, q).unwrap()
}

#[test]
fn two_thirds_decays_at_every_scale() {
    let p = derive_params(6.0).unwrap();
    let report = radial_variation(&p, &ang(2, 3), 16, 1e-3).unwrap();
    assert!(report.converged);
    assert!(report.tail_ratio <= 0.75);
    assert!(report.ratios()[5..].iter().all(|r| *r < 0.9));
}

#[test]
fn good_directions_decay_over_each_period() {
    let p = derive_params(6.0).unwrap();
    // Binary periods 0011, 001, 000111, 00001111 and 00001: F_1, F_1, F_2, F_3, F_3.
    let samples = [(ang(1, 5), 1), (ang(1, 7), 1), (ang(1, 9), 2), (ang(1, 17), 3), (ang(1, 31), 3)];
    for (angle, level) in samples {
        assert_eq!(goodset_level(&angle), Some(level));
        let period = angle.expansion().unwrap().1.len();
        let report = radial_variation(&p, &angle, 16, 1e-3).unwrap();
        assert!(report.converged, "{angle}");
        let s: Vec<f64> = report.scales.iter().map(|c| c.s_n).collect();
        for n in 5..s.len() - period {
            let averaged = (s[n + period] / s[n]).powf(1.0 / period as f64);
            assert!(averaged < 0.9, "{angle}: n={n} ratio {averaged}");
        }
    }
}

#[test]
fn partial_sums_settle_at_fine_resolution() {
    let p = derive_params(6.0).unwrap();
    let report = radial_variation(&p, &ang(2, 3), 20, 1e-6).unwrap();
    assert!(report.converged);
}

#[test]
fn direct_and_pulled_back_scales_agree() {
    let p = derive_params(6.0).unwrap();
    let angle = ang(2, 3);
    let quad = QuadSettings::default();
    for n in 0..=6 {
        let direct = scale_contribution(&p, &angle, n, &quad).unwrap().s_n;
        let pulled = scale_contribution_via_pullback(&p, &angle, n, &quad).unwrap().s_n;
        assert!((direct - pulled).abs() < 1e-5 * direct, "n={n}");
        assert!(pullback_check(&p, &angle, n).unwrap() < 1e-5);
    }
}

#[test]
fn mirror_directions_give_identical_reports() {
    let p = derive_params(6.0).unwrap();
    let report = radial_variation(&p, &ang(2, 7), 10, 1e-3).unwrap();
    let mirror = radial_variation(&p, &ang(5, 7), 10, 1e-3).unwrap();
    for (s, m) in report.scales.iter().zip(&mirror.scales) {
        assert!((s.s_n - m.s_n).abs() < 1e-10 * s.s_n);
    }
    assert!((report.total - mirror.total).abs() < 1e-10 * report.total);
}

#[test]
fn doubling_the_sample_density_is_stable() {
    let p = derive_params(6.0).unwrap();
    let angle = ang(2, 3);
    let base = RadVarSettings::default();
    let dense = RadVarSettings {
        quad: QuadSettings {
            initial_panels: 2 * base.quad.initial_panels,
            max_panels: 2 * base.quad.max_panels,
            ..base.quad
        },
        ..base
    };
    let coarse = radial_variation_with(&p, &angle, 12, &base).unwrap();
    let fine = radial_variation_with(&p, &angle, 12, &dense).unwrap();
    assert!((coarse.total - fine.total).abs() < 1e-3 * fine.total);
}

#[test]
fn dyadic_and_degenerate_inputs_are_rejected() {
    let p = derive_params(6.0).unwrap();
    assert!(matches!(
        radial_variation(&p, &ang(1, 2), 8, 1e-3),
        Err(Error::DyadicAngle { num: 1, den: 2 })
    ));
    let flat = derive_params(2.0).unwrap();
    assert!(matches!(
        radial_variation(&flat, &ang(2, 3), 8, 1e-3),
        Err(Error::Domain { .. })
    ));
}

#[test]
fn low_parameters_are_flagged_but_computed() {
    let p = derive_params(3.2).unwrap();
    let report = radial_variation(&p, &ang(2, 3), 8, 1e-3).unwrap();
    assert!(report.outside_theorem_range);
    assert!(report.total.is_finite() && report.total > 0.0);
}
