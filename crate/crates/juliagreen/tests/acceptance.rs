use juliagreen::verify::{criteria, run, Selection};
use juliagreen_core::poincare::{LandmarkTable, PoincareConfig};
use juliagreen_core::{derive_params, dimension_bound};

#[test]
fn frozen_reference_values() {
    let six = derive_params(6.0).unwrap();
    assert!((six.a - 0.5407847842564171).abs() < 1e-12);
    let low = derive_params(3.5).unwrap();
    assert!((low.a - 0.34146591744140975).abs() < 1e-12);
    let table = LandmarkTable::build(&six, 1, &PoincareConfig::default()).unwrap();
    assert!((table.critical(1).unwrap() + 20.193945238463037).abs() < 1e-9);
    let dims = [0.6942419136306174, 0.8791464, 0.9467772, 0.9752253];
    for (level, expected) in (1..).zip(dims) {
        assert!((dimension_bound(level).transfer - expected).abs() < 1e-6, "N={level}");
    }
}

#[test]
fn acceptance_criteria() {
    assert_eq!(criteria().len(), 13);
    let outcomes = run(Selection::All);
    for outcome in &outcomes {
        println!("{outcome}");
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
