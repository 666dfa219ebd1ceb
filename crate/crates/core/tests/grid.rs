use std::f64::consts::PI;

use heatflow::verify::{random_density, DensityFamily};
use heatflow::{
    convolve, derivative, dilate, integrate, lp_norm, make_gaussian, pointwise_pow, Error, Grid, GridFunction,
};
use proptest::prelude::*;

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn wide() -> Grid {
    Grid::new(-10.0, 10.0, 4096).unwrap()
}

#[test]
fn grid_rejects_bad_shapes() {
    assert!(Grid::new(1.0, 0.0, 64).is_err());
    assert!(Grid::new(0.0, 1.0, 8).is_err());
    assert!(Grid::new(0.0, 1.0, 100).is_err());
    let g = Grid::new(0.0, 1.0, 16).unwrap();
    assert!((g.dx() - 1.0 / 15.0).abs() < 1e-15);
}

#[test]
fn grid_function_rejects_negative_and_nan() {
    let g = Grid::new(0.0, 1.0, 16).unwrap();
    let mut s = vec![1.0; 16];
    s[3] = -0.1;
    assert!(GridFunction::new(g, s.clone()).is_err());
    s[3] = f64::NAN;
    assert!(GridFunction::new(g, s).is_err());
    assert!(GridFunction::new(g, vec![1.0; 15]).is_err());
}

#[test]
fn gaussian_peak_mass_and_moment() {
    let m = make_gaussian(&wide(), 1.0, 0.0).unwrap();
    assert!((m.max() - 0.398942).abs() < 5e-6);
    assert!((integrate(&m) - 1.0).abs() < 1e-10);
    assert!((m.variance() - 1.0).abs() < 1e-8);
}

#[test]
fn gaussian_errors() {
    assert!(matches!(make_gaussian(&wide(), 0.0, 0.0), Err(Error::Domain(_))));
    assert!(matches!(make_gaussian(&wide(), 4.0, 0.0), Err(Error::Truncation(_))));
    assert!(matches!(make_gaussian(&wide(), 1.0, 5.0), Err(Error::Truncation(_))));
}

#[test]
fn integrate_examples() {
    let unit = Grid::new(0.0, 1.0, 64).unwrap();
    assert!((integrate(&GridFunction::constant(unit, 1.0).unwrap()) - 1.0).abs() < 1e-14);
    let g = wide();
    let two = make_gaussian(&g, 0.05, -4.0)
        .unwrap()
        .add(&make_gaussian(&g, 0.05, 4.0).unwrap())
        .unwrap();
    assert!((integrate(&two) - 2.0).abs() < 1e-8);
}

#[test]
fn lp_norm_examples() {
    let m = make_gaussian(&wide(), 1.0, 0.0).unwrap();
    assert!((lp_norm(&m, 1.0).unwrap() - 1.0).abs() < 1e-10);
    assert!((lp_norm(&m, 2.0).unwrap() - (4.0 * PI).powf(-0.25)).abs() < 1e-6);
    let unit = GridFunction::constant(Grid::new(0.0, 1.0, 64).unwrap(), 1.0).unwrap();
    assert!((lp_norm(&unit, 0.5).unwrap() - 1.0).abs() < 1e-14);
    assert!(matches!(lp_norm(&m, 0.0), Err(Error::Domain(_))));
    assert!(matches!(lp_norm(&m, -1.0), Err(Error::Domain(_))));
}

#[test]
fn derivative_examples() {
    let g = wide();
    let c = GridFunction::constant(g, 2.5).unwrap();
    assert!(derivative(&c).samples().iter().all(|d| d.abs() < 1e-12));

    let ramp = GridFunction::from_fn(g, |x| 3.0 * x + 40.0).unwrap();
    assert!(derivative(&ramp).samples().iter().all(|d| (d - 3.0).abs() < 1e-9));

    let m = make_gaussian(&g, 1.0, 0.0).unwrap();
    let d = derivative(&m);
    let err = (0..g.n_points())
        .map(|i| (d.samples()[i] + g.x(i) * m.samples()[i]).abs())
        .fold(0.0, f64::max);
    let dx = g.dx();
    assert!(err < dx * dx, "error {err} vs dx² {}", dx * dx);
}

#[test]
fn derivative_integrates_to_zero() {
    for seed in 0..4 {
        let f = random_density(seed, DensityFamily::SmoothedBump);
        assert!(derivative(&f).integrate().abs() < 1e-8);
    }
}

#[test]
fn dilation_examples() {
    let g = Grid::default();
    let m1 = make_gaussian(&g, 1.0, 0.0).unwrap();
    assert_eq!(dilate(&m1, 1.0).unwrap().samples(), m1.samples());
    let m4 = make_gaussian(&g, 4.0, 0.0).unwrap();
    assert!(sup_diff(dilate(&m1, 2.0).unwrap().samples(), m4.samples()) < 1e-6);
    assert!(dilate(&m1, 0.0).is_err());
    assert!(matches!(dilate(&m4, 8.0), Err(Error::Truncation(_))));
}

#[test]
fn convolution_examples() {
    let g = Grid::default();
    let m1 = make_gaussian(&g, 1.0, 0.0).unwrap();
    let m2 = make_gaussian(&g, 2.0, 0.0).unwrap();
    let m3 = make_gaussian(&g, 3.0, 0.0).unwrap();
    assert!(sup_diff(convolve(&m1, &m2).unwrap().samples(), m3.samples()) < 1e-6);

    let f = random_density(3, DensityFamily::GaussianMixture);
    let delta = make_gaussian(&g, 1e-4, 0.0).unwrap();
    assert!(sup_diff(convolve(&f, &delta).unwrap().samples(), f.samples()) < 1e-3);

    let other = make_gaussian(&wide(), 1.0, 0.0).unwrap();
    assert!(matches!(convolve(&m1, &other), Err(Error::GridMismatch(_))));
}

#[test]
fn convolution_does_not_wrap_around() {
    let g = Grid::new(-8.0, 8.0, 256).unwrap();
    let left = make_gaussian(&g, 0.1, -6.0).unwrap();
    let right = make_gaussian(&g, 0.1, -6.0).unwrap();
    let h = convolve(&left, &right).unwrap();
    // The true result peaks at −12, outside the grid; nothing may alias back in.
    assert!(h.max() < 1e-12, "aliased mass {}", h.max());
}

#[test]
fn pointwise_power_examples() {
    let g = wide();
    let m = make_gaussian(&g, 1.0, 0.0).unwrap();
    assert_eq!(pointwise_pow(&m, 1.0).samples(), m.samples());
    assert!(pointwise_pow(&m, 0.0).samples().iter().all(|&v| v == 1.0));
    let sq = pointwise_pow(&m, 2.0);
    let half = make_gaussian(&g, 0.5, 0.0).unwrap();
    let c = (2.0 * PI).powf(-0.5) * 0.5f64.sqrt();
    let err = sq
        .samples()
        .iter()
        .zip(half.samples())
        .map(|(a, b)| (a - c * b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-10);
}

#[test]
fn csv_round_trip() {
    let f = random_density(11, DensityFamily::Skewed);
    let mut buf = Vec::new();
    f.write_csv_to(&mut buf).unwrap();
    assert!(buf.starts_with(b"x,value\n"));
    let back = GridFunction::read_csv_from(buf.as_slice()).unwrap();
    assert_eq!(back.grid().n_points(), f.grid().n_points());
    assert!(sup_diff(back.samples(), f.samples()) < 1e-15);
}

#[test]
fn csv_rejects_nonuniform_spacing() {
    let mut text = String::from("x,value\n");
    for i in 0..16 {
        let x = if i == 7 { 7.01 } else { i as f64 };
        text.push_str(&format!("{x},1\n"));
    }
    assert!(GridFunction::read_csv_from(text.as_bytes()).is_err());
    assert!(GridFunction::read_csv_from("a,b\n0,1\n".as_bytes()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dilation_preserves_mass(seed in 0u64..1000, a in 0.25f64..4.0) {
        let g = Grid::new(-40.0, 40.0, 4096).unwrap();
        let f = heatflow::verify::random_density_on(&g, seed, DensityFamily::SmoothedBump).unwrap();
        let fa = dilate(&f, a).unwrap();
        prop_assert!((integrate(&fa) - integrate(&f)).abs() < 1e-8);
    }

    #[test]
    fn convolution_is_symmetric(s1 in 0u64..1000, s2 in 0u64..1000) {
        let f = random_density(s1, DensityFamily::GaussianMixture);
        let g = random_density(s2, DensityFamily::Skewed);
        let fg = convolve(&f, &g).unwrap();
        let gf = convolve(&g, &f).unwrap();
        prop_assert!(sup_diff(fg.samples(), gf.samples()) <= 1e-10);
    }

    #[test]
    fn convolution_multiplies_masses(s1 in 0u64..1000, c in 0.2f64..5.0) {
        let f = random_density(s1, DensityFamily::SmoothedBump).scaled(c).unwrap();
        let g = random_density(s1 + 1, DensityFamily::GaussianMixture);
        let h = convolve(&f, &g).unwrap();
        prop_assert!((integrate(&h) - integrate(&f) * integrate(&g)).abs() < 1e-8 * c.max(1.0));
    }

    #[test]
    fn lp_norm_is_homogeneous(seed in 0u64..1000, c in 0.01f64..100.0, p in 0.2f64..6.0) {
        let f = random_density(seed, DensityFamily::Skewed);
        let lhs = lp_norm(&f.scaled(c).unwrap(), p).unwrap();
        let rhs = c * lp_norm(&f, p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs);
    }

    #[test]
    fn holder_inequality_holds_on_the_grid(s1 in 0u64..1000, s2 in 0u64..1000, p in 1.05f64..8.0) {
        let q = p / (p - 1.0);
        let f = random_density(s1, DensityFamily::GaussianMixture);
        let g = random_density(s2, DensityFamily::SmoothedBump);
        let prod = GridFunction::new(
            *f.grid(),
            f.samples().iter().zip(g.samples()).map(|(a, b)| a * b).collect(),
        ).unwrap();
        let lhs = integrate(&prod);
        let rhs = lp_norm(&f, p).unwrap() * lp_norm(&g, q).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }
}
