use proptest::prelude::*;
use volcano_core::quadrature::QuadRule;
use volcano_core::spectrum::{f0, u_minus, uniform_grid};
use volcano_core::transform::{
    project_out_zero_mode, HalfLineFunction, SpectralCoefficients, TransformPlan,
};
use volcano_core::{Error, Parity};

fn gaussian(center: f64, width: f64) -> impl Fn(f64) -> f64 {
    move |z| {
        let s = (z - center) / width;
        if s.abs() > 8.0 {
            0.0
        } else {
            (-s * s).exp()
        }
    }
}

fn bump(center: f64, half_width: f64) -> impl Fn(f64) -> f64 {
    move |z| {
        let s = (z - center) / half_width;
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }
}

/// Two compact bumps combined so that the trapezoid overlap with f0 vanishes.
fn even_test_function(grid: &[f64]) -> HalfLineFunction {
    let a = HalfLineFunction::from_fn(grid, bump(4.0, 3.0)).unwrap();
    let b = HalfLineFunction::from_fn(grid, bump(8.0, 3.0)).unwrap();
    let c = a.zero_mode_overlap() / b.zero_mode_overlap();
    let v = a
        .values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| x - c * y)
        .collect();
    HalfLineFunction::new(grid.to_vec(), v).unwrap()
}

fn relative_l2(a: &HalfLineFunction, b: &HalfLineFunction) -> f64 {
    let d: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
    HalfLineFunction::new(a.z_grid.clone(), d)
        .unwrap()
        .l2_norm()
        / b.l2_norm()
}

#[test]
fn plancherel_both_parities() {
    let grid = uniform_grid(15.0, 0.01).unwrap();
    let plan = TransformPlan::new(&grid, &QuadRule::default_mass_rule()).unwrap();
    let odd = HalfLineFunction::from_fn(&grid, gaussian(5.0, 1.0)).unwrap();
    let even = even_test_function(&grid);
    for (parity, f) in [(Parity::Odd, &odd), (Parity::Even, &even)] {
        let c = plan.forward(parity, f).unwrap();
        let defect = (c.l2_norm_sq() - f.l2_norm().powi(2)).abs() / f.l2_norm().powi(2);
        println!(
            "{parity:?} Plancherel defect {defect:.3e}, tail {:.1e}",
            c.tail_estimate()
        );
        assert!(defect < 1e-3);
    }
}

#[test]
fn round_trip_reproduces_the_bump() {
    let grid = uniform_grid(15.0, 0.01).unwrap();
    let f = HalfLineFunction::from_fn(&grid, gaussian(5.0, 1.0)).unwrap();
    let mut errors = vec![];
    for per_panel in [6, 12, 24] {
        let rule = QuadRule::mass_rule(20.0, per_panel).unwrap();
        let plan = TransformPlan::new(&grid, &rule).unwrap();
        let back = plan
            .inverse(&plan.forward(Parity::Odd, &f).unwrap())
            .unwrap();
        errors.push(relative_l2(&back, &f));
    }
    println!("round-trip errors {errors:?}");
    assert!(errors[2] < 1e-2);
    assert!(errors[0] / errors[1] >= 4.0 && errors[1] / errors[2] >= 4.0);
}

#[test]
fn zero_input_maps_to_zero() {
    let grid = uniform_grid(5.0, 0.01).unwrap();
    let rule = QuadRule::mass_rule(20.0, 8).unwrap();
    let plan = TransformPlan::new(&grid, &rule).unwrap();
    let zero = HalfLineFunction::zeros(&grid).unwrap();
    for parity in Parity::BOTH {
        let c = plan.forward(parity, &zero).unwrap();
        assert!(c.values.iter().all(|v| *v == 0.0));
        let back = plan
            .inverse(&SpectralCoefficients::zeros(parity, &rule))
            .unwrap();
        assert_eq!(back.max_abs(), 0.0);
        assert_eq!(plan.multiplication_residual(parity, &zero).unwrap(), 0.0);
    }
}

#[test]
fn delta_coefficients_synthesize_one_mode() {
    let grid = uniform_grid(5.0, 0.01).unwrap();
    let rule = QuadRule::mass_rule(20.0, 8).unwrap();
    let plan = TransformPlan::new(&grid, &rule).unwrap();
    let j = 37;
    let mut c = SpectralCoefficients::zeros(Parity::Odd, &rule);
    c.values[j] = 1.0;
    let u = plan.inverse(&c).unwrap();
    for (i, &z) in grid.iter().enumerate().step_by(50) {
        let expected = rule.weights[j] * u_minus(z, rule.nodes[j]).unwrap();
        assert!((u.values[i] - expected).abs() < 1e-14);
    }
}

#[test]
fn windowed_mode_peaks_at_its_mass() {
    let grid = uniform_grid(60.0, 0.01).unwrap();
    let window = |z: f64| (-((z - 30.0) / 12.0).powi(2)).exp();
    let f = HalfLineFunction::from_fn(&grid, |z| window(z) * u_minus(z, 2.0).unwrap()).unwrap();
    let rule = QuadRule::gauss_legendre_panels(&[1.0, 1.5, 2.0, 2.5, 3.0], 40).unwrap();
    let plan = TransformPlan::new(&grid, &rule).unwrap();
    let c = plan.forward(Parity::Odd, &f).unwrap();
    let (imax, _) = c
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    let cell = rule.nodes[imax + 1] - rule.nodes[imax - 1];
    assert!(
        (rule.nodes[imax] - 2.0).abs() <= cell,
        "peak at {}",
        rule.nodes[imax]
    );
}

#[test]
fn even_transform_rejects_zero_mode_content() {
    let grid = uniform_grid(15.0, 0.01).unwrap();
    let plan = TransformPlan::new(&grid, &QuadRule::mass_rule(20.0, 8).unwrap()).unwrap();
    let f = HalfLineFunction::from_fn(&grid, gaussian(3.0, 1.0)).unwrap();
    assert!(matches!(
        plan.forward(Parity::Even, &f),
        Err(Error::DomainViolation { .. })
    ));
    let g = project_out_zero_mode(&f).unwrap();
    assert!(g.zero_mode_overlap().abs() < 1e-10);
    assert!(plan.forward(Parity::Even, &g).is_ok());
}

#[test]
fn projection_examples() {
    let grid = uniform_grid(40.0, 0.01).unwrap();
    let box_fn = HalfLineFunction::from_fn(&grid, |z| if z <= 10.0 { 1.0 } else { 0.0 }).unwrap();
    let g = project_out_zero_mode(&box_fn).unwrap();
    assert!(g.zero_mode_overlap().abs() < 1e-10);

    let orthogonal = even_test_function(&grid);
    let unchanged = project_out_zero_mode(&orthogonal).unwrap();
    let change = unchanged
        .values
        .iter()
        .zip(&orthogonal.values)
        .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
    assert!(change < 1e-8);

    // A windowed odd-sector mode is not orthogonal to f0 on the half line;
    // the projection removes exactly its quadrature overlap.
    let window = |z: f64| {
        if z < 30.0 {
            (-((z - 15.0) / 5.0).powi(2)).exp()
        } else {
            0.0
        }
    };
    let odd_like =
        HalfLineFunction::from_fn(&grid, |z| window(z) * u_minus(z, 1.0).unwrap()).unwrap();
    let overlap = odd_like.zero_mode_overlap();
    let f0_samples = HalfLineFunction::from_fn(&grid, f0).unwrap();
    let norm_sq = f0_samples.l2_norm().powi(2);
    let projected = project_out_zero_mode(&odd_like).unwrap();
    let change = (projected.values[0] - odd_like.values[0]).abs();
    assert!((change - overlap.abs() / norm_sq).abs() < 1e-15);
}

#[test]
fn zero_mode_has_no_continuum_image() {
    let grid = uniform_grid(60.0, 0.01).unwrap();
    let plan = TransformPlan::new(&grid, &QuadRule::default_mass_rule()).unwrap();
    // f0 truncated at 60 is not exactly f0; compare its even image with
    // the image of an orthogonal function of comparable norm.
    let f = HalfLineFunction::from_fn(&grid, f0).unwrap();
    let forced = project_out_zero_mode(&f).unwrap();
    assert!(forced.max_abs() < 1e-10);
    let c = plan.forward(Parity::Even, &forced).unwrap();
    assert!(c.values.iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn multiplication_property_converges() {
    let mut residuals = vec![];
    for dz in [0.04, 0.02, 0.01] {
        let grid = uniform_grid(15.0, dz).unwrap();
        let plan = TransformPlan::new(&grid, &QuadRule::default_mass_rule()).unwrap();
        let odd = HalfLineFunction::from_fn(&grid, gaussian(5.0, 1.0)).unwrap();
        let even = even_test_function(&grid);
        let r_odd = plan.multiplication_residual(Parity::Odd, &odd).unwrap();
        let r_even = plan.multiplication_residual(Parity::Even, &even).unwrap();
        residuals.push((r_odd, r_even));
    }
    println!("multiplication residuals {residuals:?}");
    for k in 0..2 {
        assert!(residuals[k].0 / residuals[k + 1].0 >= 4.0);
        assert!(residuals[k].1 / residuals[k + 1].1 >= 4.0);
    }
    assert!(residuals[2].0 < 1e-2 && residuals[2].1 < 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn transforms_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, c1 in 2.0f64..8.0, c2 in 2.0f64..8.0) {
        let grid = uniform_grid(12.0, 0.02).unwrap();
        let rule = QuadRule::mass_rule(10.0, 6).unwrap();
        let plan = TransformPlan::new(&grid, &rule).unwrap();
        let f = HalfLineFunction::from_fn(&grid, gaussian(c1, 0.7)).unwrap();
        let g = HalfLineFunction::from_fn(&grid, gaussian(c2, 0.9)).unwrap();
        let combo = HalfLineFunction::new(
            grid.clone(),
            f.values.iter().zip(&g.values).map(|(x, y)| a * x + b * y).collect(),
        ).unwrap();
        let cf = plan.forward(Parity::Odd, &f).unwrap();
        let cg = plan.forward(Parity::Odd, &g).unwrap();
        let cc = plan.forward(Parity::Odd, &combo).unwrap();
        for j in 0..rule.len() {
            let expected = a * cf.values[j] + b * cg.values[j];
            prop_assert!((cc.values[j] - expected).abs() < 1e-12 * (1.0 + expected.abs()));
        }
        let back = plan.inverse(&cc).unwrap();
        let bf = plan.inverse(&cf).unwrap();
        let bg = plan.inverse(&cg).unwrap();
        for i in 0..grid.len() {
            let expected = a * bf.values[i] + b * bg.values[i];
            prop_assert!((back.values[i] - expected).abs() < 1e-12 * (1.0 + expected.abs()));
        }
    }
}
