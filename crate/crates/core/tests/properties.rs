mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{random_body, random_function, random_spectrum, random_unit, rng, Degrees};
use funklib::convex::{circumference_direct, circumference_funk, width};
use funklib::fractional::{rl_integral, RadialProfile};
use funklib::harmonics::{analyze, parity_split, synthesize};
use funklib::sphere::{rotation_taking_north_to, zonal_reduction};
use funklib::transform::{
    funk, generalized_dual_with_section, generalized_funk_with_section, great_circle_integral, spherical_mean,
};
use funklib::{GreatCircle, GridFunction, Rotation, SphereGrid, SphericalField, UnitVector3};
use proptest::prelude::*;

fn grid(n_lat: usize) -> Arc<SphereGrid> {
    Arc::new(SphereGrid::new(n_lat).unwrap())
}

fn unit() -> impl Strategy<Value = UnitVector3> {
    (-1.0f64..1.0, 0.0f64..2.0 * PI).prop_map(|(z, phi)| {
        let r = (1.0 - z * z).sqrt();
        UnitVector3::new(r * phi.cos(), r * phi.sin(), z)
    })
}

fn rotation() -> impl Strategy<Value = Rotation> {
    (unit(), 0.0f64..2.0 * PI).prop_map(|(axis, angle)| Rotation::about_axis(axis, angle))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn north_rotation_reaches_target(a in unit()) {
        let r = rotation_taking_north_to(a);
        let b = r.apply(UnitVector3::E3);
        let gap = (a.x - b.x).abs().max((a.y - b.y).abs()).max((a.z - b.z).abs());
        prop_assert!(gap <= 1e-12, "{}", gap);
        prop_assert!(r.orthogonality_defect() <= 1e-12);
        prop_assert!((r.determinant() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zonal_reduction_matches_equispaced(coeffs in prop::collection::vec(-1.0f64..1.0, 11), shift in 0.0f64..2.0 * PI) {
        let poly = |s: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c);
        let m = 64;
        let equispaced: f64 = (0..m)
            .map(|j| poly((2.0 * PI * j as f64 / m as f64 - shift).cos()))
            .sum::<f64>()
            * 2.0 * PI / m as f64;
        prop_assert!((zonal_reduction(poly, 16) - equispaced).abs() <= 1e-8);
    }

    #[test]
    fn great_circle_quadrature_is_rotation_covariant(seed in any::<u64>(), r in rotation(), pole in unit()) {
        let mut rng = rng(seed);
        let field = SphericalField::new(&random_spectrum(&mut rng, 6, Degrees::All));
        let composed = |p: UnitVector3| field.eval(r.apply(p));
        let lhs = great_circle_integral(&composed, &GreatCircle::new(pole), 64);
        let rhs = great_circle_integral(&field, &GreatCircle::new(r.apply(pole)), 64);
        prop_assert!((lhs - rhs).abs() <= 1e-10, "{} {}", lhs, rhs);
    }

    #[test]
    fn evenness_of_means_in_the_height(seed in any::<u64>(), x in unit(), tau in 0.0f64..1.0, theta in 0.0f64..PI / 2.0) {
        let mut rng = rng(seed);
        let field = SphericalField::new(&random_spectrum(&mut rng, 6, Degrees::Even));
        let t = tau * theta.cos();
        let a = spherical_mean(&field, x, t, 64).unwrap();
        let b = spherical_mean(&field, x, -t, 64).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn k_averages_do_not_depend_on_the_section(seed in any::<u64>(), x in unit(), beta in 0.0f64..2.0 * PI, theta in 0.0f64..PI / 2.0) {
        let mut rng = rng(seed);
        let field = SphericalField::new(&random_spectrum(&mut rng, 5, Degrees::All));
        let r = rotation_taking_north_to(x);
        let other = r * Rotation::about_z(beta);
        let a = generalized_funk_with_section(&field, &r, theta, 64).unwrap();
        let b = generalized_funk_with_section(&field, &other, theta, 64).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
        let a = generalized_dual_with_section(&field, &r, theta, 64).unwrap();
        let b = generalized_dual_with_section(&field, &other, theta, 64).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn fractional_integral_is_monotone(
        values in prop::collection::vec(0.0f64..1.0, 8..40),
        alpha in 0.05f64..2.0,
        exponent in prop::sample::select(vec![-0.5, 0.0, 0.5, 1.0]),
        origin in prop::option::of(0.0f64..1.0),
    ) {
        let mut p = RadialProfile::new(1.0, values, exponent).unwrap();
        p.origin = origin;
        let out = rl_integral(&p, alpha).unwrap();
        prop_assert!(out.values.iter().all(|&v| v >= 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn parseval(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = grid(12);
        let s = random_spectrum(&mut rng, 8, Degrees::All);
        let f = synthesize(&s, Arc::clone(&g));
        let energy = f.map(|v| v * v).integral();
        prop_assert!((energy - s.energy()).abs() <= 1e-9 * energy.max(1.0));
    }

    #[test]
    fn parity_split_separates_degrees(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = grid(12);
        let f = random_function(&mut rng, &g, 9, Degrees::All);
        let (even, odd) = parity_split(&f);
        let se = analyze(&even, 9).unwrap();
        let so = analyze(&odd, 9).unwrap();
        for l in 0..=9 {
            let leak = if l % 2 == 0 { so.degree_max_abs(l) } else { se.degree_max_abs(l) };
            prop_assert!(leak <= 1e-10, "degree {} leaks {}", l, leak);
        }
    }

    #[test]
    fn funk_commutes_with_rotations(seed in any::<u64>(), r in rotation()) {
        let mut rng = rng(seed);
        let g = grid(12);
        let field = SphericalField::new(&random_spectrum(&mut rng, 6, Degrees::All));
        let f = GridFunction::from_fn(Arc::clone(&g), |p| field.eval(p));
        let rotated = GridFunction::from_fn(Arc::clone(&g), |p| field.eval(r.apply(p)));
        let mf = funk(&f, 64).field();
        let mrf = funk(&rotated, 64).field();
        for _ in 0..5 {
            let p = random_unit(&mut rng);
            prop_assert!((mrf.eval(p) - mf.eval(r.apply(p))).abs() <= 1e-9);
        }
    }

    #[test]
    fn funk_output_is_even_and_kills_odd_input(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = grid(12);
        let f = random_function(&mut rng, &g, 9, Degrees::All);
        prop_assert!(funk(&f, 64).values().antipodal_asymmetry() <= 1e-10);
        let odd = random_function(&mut rng, &g, 9, Degrees::Odd);
        prop_assert!(funk(&odd, 64).values().max_abs() <= 1e-9 * odd.max_abs());
    }

    #[test]
    fn constant_transform_iff_constant_even_function(seed in any::<u64>(), perturb in prop::bool::ANY) {
        let mut rng = rng(seed);
        let g = grid(12);
        let mut s = random_spectrum(&mut rng, 8, Degrees::Even);
        if !perturb {
            s = s.truncated(0);
        }
        let f = synthesize(&s, Arc::clone(&g));
        let is_const = |s: &funklib::HarmonicSpectrum| (1..=s.bandlimit).all(|l| s.degree_max_abs(l) <= 1e-10);
        let transformed = analyze(funk(&f, 64).values(), 8).unwrap();
        prop_assert_eq!(is_const(&analyze(&f, 8).unwrap()), is_const(&transformed));
    }

    #[test]
    fn circumference_formulas_agree(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let body = random_body(&mut rng, seed % 2 == 0);
        for _ in 0..20 {
            let w = random_unit(&mut rng);
            let a = circumference_funk(&body, w, 128);
            let b = circumference_direct(&body, w, 128).unwrap();
            prop_assert!((a - b).abs() <= 1e-7, "{} {}", a, b);
        }
    }

    #[test]
    fn circumference_is_linear_under_scaling(seed in any::<u64>(), lambda in 0.1f64..10.0) {
        let mut rng = rng(seed);
        let body = random_body(&mut rng, false);
        let big = body.scaled(lambda);
        let w = random_unit(&mut rng);
        let u = circumference_funk(&body, w, 128);
        prop_assert!((circumference_funk(&big, w, 128) - lambda * u).abs() <= 1e-11 * lambda * u);
        let d = circumference_direct(&body, w, 128).unwrap();
        prop_assert!((circumference_direct(&big, w, 128).unwrap() - lambda * d).abs() <= 1e-11 * lambda * d);
    }

    #[test]
    fn circumference_is_half_the_transform_of_width(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let body = random_body(&mut rng, false);
        let g = grid(12);
        let b = GridFunction::from_fn(Arc::clone(&g), |w| width(&body, w));
        let mb = funk(&b, 128);
        for (i, &w) in g.nodes.iter().enumerate().step_by(17) {
            let u = circumference_funk(&body, w, 128);
            prop_assert!((u - 0.5 * mb.values().values[i]).abs() <= 1e-8);
        }
    }

    #[test]
    fn constant_circumference_forces_constant_width(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let body = random_body(&mut rng, true);
        let c = circumference_funk(&body, UnitVector3::E3, 128);
        for _ in 0..20 {
            let w = random_unit(&mut rng);
            prop_assert!((circumference_funk(&body, w, 128) - c).abs() <= 1e-9);
            prop_assert!((width(&body, w) - c / PI).abs() <= 1e-7);
        }
    }
}

// Both reconstructions of one random function, checked against each other and
// against the input.
proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn inversions_agree_with_input_and_each_other(seed in any::<u64>()) {
        use funklib::inversion::{harmonic_value_at, invert_harmonic, AbelInverter, AbelOptions, RANGE_TOLERANCE};
        let mut rng = rng(seed);
        let g = grid(16);
        let f = random_function(&mut rng, &g, 8, Degrees::Even);
        let field = SphericalField::from_grid(&f);
        let data = funk(&f, 64);
        let inv = invert_harmonic(&data, 15, RANGE_TOLERANCE).unwrap();
        let diff = inv.f.zip_with(&f, |a, b| a - b).unwrap();
        prop_assert!(diff.l2_norm() <= 1e-8 * f.l2_norm());
        let abel = AbelInverter::new(&data, AbelOptions { n_t: 256, m_average: 64, ..AbelOptions::default() }).unwrap();
        for _ in 0..3 {
            let x = random_unit(&mut rng);
            let a = abel.reconstruct(x).unwrap().recovered_value;
            prop_assert!((a - field.eval(x)).abs() <= 1e-2);
            prop_assert!((a - harmonic_value_at(&inv, x)).abs() <= 2e-2);
        }
    }
}
