use volcano_wasm::api::{eigenfunction, refine_resonance, scattering_curve};

#[test]
fn scattering_rows_are_unimodular() {
    let rows = scattering_curve("odd", 10.0, 200).unwrap();
    assert_eq!(rows.len(), 5 * 200);
    for r in rows.chunks(5) {
        assert!((r[4] - 1.0).abs() < 1e-10);
        assert!((r[2].hypot(r[3]) - r[4]).abs() < 1e-14);
    }
    assert_eq!(rows[5 * 199], 10.0);
}

#[test]
fn first_zero_from_a_rough_seed() {
    let z = refine_resonance(1, 0, -0.42, -0.58).unwrap();
    assert!((z[0] + 0.419).abs() < 5e-3 && (z[1] + 0.577).abs() < 5e-3);
    assert!(z[2] < 1e-10);
    let z = refine_resonance(2, -1, -0.39, 1.1).unwrap();
    assert!((z[0] + 0.386).abs() < 5e-3 && (z[1] - 1.101).abs() < 5e-3);
}

#[test]
fn eigenfunction_boundary_behaviour() {
    let odd = eigenfunction("odd", 1.5, 10.0, 1001).unwrap();
    assert_eq!(odd[0], 0.0);
    assert_eq!(odd[1], 0.0);
    let even = eigenfunction("even", 1.5, 1e-2, 5).unwrap();
    let u: Vec<f64> = even.chunks(2).map(|r| r[1]).collect();
    let h = 1e-2 / 4.0;
    let du = (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * h);
    assert!((du + 1.5 * u[0]).abs() < 1e-6);
}

#[test]
fn bad_requests_are_errors() {
    assert!(scattering_curve("sideways", 10.0, 100).is_err());
    assert!(scattering_curve("even", 10.0, 1).is_err());
    assert!(scattering_curve("even", -1.0, 100).is_err());
    assert!(eigenfunction("even", -1.0, 10.0, 100).is_err());
    assert!(refine_resonance(3, 0, 1.0, -1.0).is_err());
}
