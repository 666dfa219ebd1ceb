use std::f64::consts::{E, PI};

use heatflow::functionals::{
    cross_fisher_a, cross_fisher_b, entropy_power, fisher_information, holder_derivative, holder_functional,
    shannon_entropy, stam_ratio, trace_fd_derivative, young_convolvend, young_derivative, young_functional,
};
use heatflow::verify::{equality_case_detect, holder_flow_check, random_density, random_pair, DensityFamily, FlowOptions};
use heatflow::{
    convolve, derivative, dilate, gaussian_young_value, integrate, make_gaussian, optimal_diffusion, pointwise_pow,
    DiffusionPair, Error, FlowTrace, Grid, GridFunction, TimeGrid, YoungTriple,
};
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn gaussian(var: f64) -> GridFunction {
    make_gaussian(&Grid::default(), var, 0.0).unwrap()
}

const FAMILIES: [DensityFamily; 3] = DensityFamily::ALL;

#[test]
fn entropy_examples() {
    let unit = GridFunction::constant(Grid::new(0.0, 1.0, 256).unwrap(), 1.0).unwrap();
    assert!(shannon_entropy(&unit).abs() < 1e-14);
    assert!((shannon_entropy(&gaussian(1.0)) - 1.41893853320467274).abs() < 1e-6);
    for var in [0.5, 2.0, 3.0] {
        let expected = 0.5 * (2.0 * PI * E * var).ln();
        assert!((shannon_entropy(&gaussian(var)) - expected).abs() < 1e-6);
    }
    let f = random_density(4, DensityFamily::Skewed);
    for a in [0.5, 1.7] {
        let h = shannon_entropy(&dilate(&f, a).unwrap());
        assert!((h - shannon_entropy(&f) - a.ln()).abs() < 1e-6);
    }
}

#[test]
fn entropy_power_examples() {
    assert!((entropy_power(&gaussian(1.0)) - 2.0 * PI * E).abs() < 1e-4);
    let f = random_density(6, DensityFamily::GaussianMixture);
    let a = 0.6;
    assert!(rel(entropy_power(&dilate(&f, a).unwrap()), a * a * entropy_power(&f)) < 1e-6);
    let sum = convolve(&gaussian(1.0), &gaussian(2.0)).unwrap();
    assert!(rel(entropy_power(&sum), 2.0 * PI * E * 3.0) < 1e-3);
}

#[test]
fn fisher_examples() {
    for var in [0.5, 1.0, 2.0] {
        assert!(rel(fisher_information(&gaussian(var)), 1.0 / var) < 1e-4);
    }
    let f = random_density(8, DensityFamily::SmoothedBump);
    let a = 1.5;
    assert!(rel(fisher_information(&dilate(&f, a).unwrap()), fisher_information(&f) / (a * a)) < 1e-4);
}

#[test]
fn stam_ratio_examples() {
    let m1 = gaussian(1.0);
    assert!((stam_ratio(&m1, &m1).unwrap() - 1.0).abs() < 1e-4);
    let heavy = m1.scaled(2.0).unwrap();
    assert!(matches!(stam_ratio(&heavy, &m1), Err(Error::Domain(_))));
}

#[test]
fn holder_examples() {
    let f = random_density(1, DensityFamily::Skewed);
    for p in [1.1, 2.0, 5.0] {
        assert!((holder_functional(&f, &f, p).unwrap() - 1.0).abs() < 1e-8);
    }
    let oracle = 0.97098354341464684;
    assert!((holder_functional(&gaussian(1.0), &gaussian(2.0), 2.0).unwrap() - oracle).abs() < 1e-10);
    assert!(matches!(holder_functional(&f, &f, 1.0), Err(Error::Domain(_))));
}

#[test]
fn holder_derivative_vanishes_on_proportional_pairs() {
    let v = random_density(2, DensityFamily::GaussianMixture);
    let u = v.scaled(3.0).unwrap();
    for p in [1.5, 2.0, 4.0] {
        assert!(holder_derivative(&u, &v, p).unwrap().abs() < 1e-10);
    }
    let w = random_density(3, DensityFamily::SmoothedBump);
    assert!(holder_derivative(&w, &v, 2.0).unwrap() > 1e-6);
}

#[test]
fn holder_derivative_matches_finite_differences_along_the_flow() {
    let (u, v) = random_pair(12);
    let times = TimeGrid::geometric(1e-2, 1.25, 20.0).unwrap();
    let check = holder_flow_check(&u, &v, 1.7, &times, &FlowOptions::default()).unwrap();
    let rep = check.report("holder_flow_derivative").unwrap();
    assert!(rep.passed, "{rep:?}");
    assert!(check.report("holder_flow_monotone").unwrap().passed);
}

#[test]
fn young_convolvend_examples() {
    let t = YoungTriple::new(4.0 / 3.0, 4.0 / 3.0).unwrap();
    let m1 = gaussian(1.0);
    let h = young_convolvend(&m1, &m1, &t).unwrap();
    let fit = equality_case_detect(&h).unwrap();
    assert!(fit.fit_residual < 1e-6, "{fit:?}");
    let s = h.samples();
    let n = s.len();
    assert!((0..n).all(|i| (s[i] - s[n - 1 - i]).abs() <= 1e-10));

    let (u, v) = random_pair(5);
    let h = young_convolvend(&u, &v, &t).unwrap();
    let masses = integrate(&pointwise_pow(&u, 1.0 / t.p())) * integrate(&pointwise_pow(&v, 1.0 / t.q()));
    assert!((integrate(&h) - masses).abs() < 1e-8 * masses);
}

#[test]
fn young_functional_examples() {
    for (p, q) in [(4.0 / 3.0, 4.0 / 3.0), (1.2, 1.5)] {
        let t = YoungTriple::new(p, q).unwrap();
        let pair = optimal_diffusion(&t);
        let u = gaussian(pair.alpha);
        let v = gaussian(pair.beta);
        let psi = young_functional(&u, &v, &t).unwrap();
        assert!(rel(psi, gaussian_young_value(&t, &pair)) < 1e-4, "({p}, {q})");
    }

    let rev = YoungTriple::with_r(0.75, 0.75, 0.6).unwrap();
    let f = random_density(7, DensityFamily::SmoothedBump);
    let psi = young_functional(&f, &f, &rev).unwrap();
    assert!(psi.is_finite() && psi > 0.0);
}

#[test]
fn young_derivative_vanishes_on_optimal_gaussians() {
    for (p, q) in [(4.0 / 3.0, 4.0 / 3.0), (1.2, 1.5), (0.75, 0.75)] {
        let t = YoungTriple::new(p, q).unwrap();
        let pair = optimal_diffusion(&t);
        // Variances proportional to the optimal pair, scaled into the grid.
        let c = 1.0 / pair.alpha.max(pair.beta);
        let d = young_derivative(&gaussian(c * pair.alpha), &gaussian(c * pair.beta), &t, &pair).unwrap();
        assert!(d.abs() < 1e-6, "({p}, {q}): {d}");
    }
}

#[test]
fn cross_fisher_examples() {
    let f = random_density(3, DensityFamily::GaussianMixture);
    let g = random_density(4, DensityFamily::Skewed).scaled(2.0).unwrap();
    let a = cross_fisher_a(&f, &g).unwrap();
    assert!(rel(integrate(&a), fisher_information(&f) * integrate(&g)) < 1e-6);

    let fine = Grid::new(-8.0, 8.0, 8192).unwrap();
    let bump = make_gaussian(&fine, 0.5, -1.0)
        .unwrap()
        .add(&make_gaussian(&fine, 0.8, 1.5).unwrap())
        .unwrap();
    let delta = make_gaussian(&fine, 1e-5, 0.0).unwrap();
    let a = cross_fisher_a(&bump, &delta).unwrap();
    let df = derivative(&bump);
    let direct: Vec<f64> = bump
        .samples()
        .iter()
        .zip(df.samples())
        .map(|(&v, &d)| if v > 0.0 { d * d / v } else { 0.0 })
        .collect();
    let err = a.samples().iter().zip(&direct).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(err < 1e-3, "{err}");

    // ∫w·B(f,g) = ∫w·A(g,f): both are ∫∫ w(x+y) f(x) (g′)²/g(y).
    let w = pointwise_pow(&convolve(&f, &g).unwrap(), 0.5);
    let weighted = |h: &GridFunction| {
        let prod: Vec<f64> = h.samples().iter().zip(w.samples()).map(|(a, b)| a * b).collect();
        integrate(&GridFunction::new(*h.grid(), prod).unwrap())
    };
    let lhs = weighted(&cross_fisher_b(&f, &g).unwrap());
    let rhs = weighted(&cross_fisher_a(&g, &f).unwrap());
    assert!(rel(lhs, rhs) < 1e-8);
}

#[test]
fn cross_fisher_matches_nested_quadrature() {
    // On [0, L] every difference x_i − y_j with j ≤ i is itself a node.
    let g = Grid::new(0.0, 16.0, 256).unwrap();
    let f = make_gaussian(&g, 0.6, 5.0).unwrap();
    let h = make_gaussian(&g, 1.1, 6.5).unwrap();
    let a = cross_fisher_a(&f, &h).unwrap();
    let df = derivative(&f);
    let factor: Vec<f64> = f
        .samples()
        .iter()
        .zip(df.samples())
        .map(|(&v, &d)| if v > 0.0 { d * d / v } else { 0.0 })
        .collect();
    let dx = g.dx();
    for i in (0..256).step_by(17) {
        let terms: Vec<f64> = (0..=i).map(|j| factor[i - j] * h.samples()[j]).collect();
        let nested = if i == 0 {
            0.0
        } else {
            dx * (terms.iter().sum::<f64>() - 0.5 * (terms[0] + terms[i]))
        };
        assert!((a.samples()[i] - nested).abs() < 1e-8, "node {i}: {} vs {nested}", a.samples()[i]);
    }
}

#[test]
fn flow_trace_shape_and_csv() {
    assert!(FlowTrace::new(vec![0.0, 1.0], vec![1.0], None).is_err());
    assert!(FlowTrace::new(vec![1.0, 1.0], vec![1.0, 2.0], None).is_err());
    let times: Vec<f64> = (0..20).map(|k| 0.1 * 1.3f64.powi(k)).collect();
    let values: Vec<f64> = times.iter().map(|t| t.ln().powi(3)).collect();
    let exact: Vec<f64> = times.iter().map(|t| 3.0 * t.ln().powi(2) / t).collect();
    let trace = FlowTrace::new(times.clone(), values.clone(), Some(exact.clone())).unwrap();
    for (fd, ex) in trace.fd_derivative.as_ref().unwrap().iter().zip(&exact) {
        assert!((fd - ex).abs() < 1e-9 * ex.abs().max(1.0));
    }
    assert_eq!(trace_fd_derivative(&times, &values), trace.fd_derivative.clone().unwrap());

    let bare = FlowTrace::new(times[..3].to_vec(), values[..3].to_vec(), None).unwrap();
    let mut buf = Vec::new();
    bare.write_csv_to(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value,analytic_derivative,fd_derivative"));
    assert_eq!(lines.next().unwrap().split(',').nth(2), Some(""));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn cramer_rao(seed in 0u64..1000, fam in 0usize..3) {
        let f = random_density(seed, FAMILIES[fam]);
        prop_assert!(fisher_information(&f) * f.variance() >= 1.0 - 1e-6);
    }

    #[test]
    fn stam_ratio_is_at_most_one_and_dilation_invariant(s1 in 0u64..1000, s2 in 0u64..1000, a in 0.5f64..1.5) {
        let f = random_density(s1, DensityFamily::GaussianMixture);
        let g = random_density(s2, DensityFamily::SmoothedBump);
        let theta = stam_ratio(&f, &g).unwrap();
        prop_assert!(theta <= 1.0 + 1e-6);
        let (fa, ga) = (dilate(&f, a), dilate(&g, a));
        prop_assume!(fa.is_ok() && ga.is_ok());
        let (fa, ga) = (fa.unwrap(), ga.unwrap());
        // The dilated convolution must still fit the grid.
        prop_assume!(integrate(&convolve(&fa, &ga).unwrap()) > 1.0 - 1e-9);
        let scaled = stam_ratio(&fa, &ga).unwrap();
        prop_assert!(rel(scaled, theta) < 1e-5);
    }

    #[test]
    fn entropy_power_inequality(s1 in 0u64..1000, s2 in 0u64..1000) {
        let f = random_density(s1, DensityFamily::Skewed);
        let g = random_density(s2, DensityFamily::GaussianMixture);
        let (nf, ng) = (entropy_power(&f), entropy_power(&g));
        let nfg = entropy_power(&convolve(&f, &g).unwrap());
        prop_assert!(nfg >= nf + ng - 1e-4 * (nf + ng));
    }

    #[test]
    fn blachman_reduction(s1 in 0u64..1000, s2 in 0u64..1000, a in 0.1f64..5.0, b in 0.1f64..5.0) {
        let f = random_density(s1, DensityFamily::SmoothedBump);
        let g = random_density(s2, DensityFamily::Skewed);
        let lhs = (a + b).powi(2) * fisher_information(&convolve(&f, &g).unwrap());
        prop_assert!(lhs <= a * a * fisher_information(&f) + b * b * fisher_information(&g) + 1e-6);
    }

    #[test]
    fn holder_bound_and_sign(s1 in 0u64..1000, c in 0.1f64..10.0, p in 1.05f64..6.0) {
        let (u, v) = random_pair(s1);
        let u = u.scaled(c).unwrap();
        let q = p / (p - 1.0);
        let phi = holder_functional(&u, &v, p).unwrap();
        prop_assert!(phi <= integrate(&u).powf(1.0 / p) * integrate(&v).powf(1.0 / q) * (1.0 + 1e-12));
        prop_assert!(holder_derivative(&u, &v, p).unwrap() >= -1e-12);
    }

    #[test]
    fn young_is_dilation_invariant(seed in 0u64..1000, a in 0.6f64..1.6) {
        let t = YoungTriple::new(1.5, 1.2).unwrap();
        let (u, v) = random_pair(seed);
        let psi = young_functional(&u, &v, &t).unwrap();
        let (ua, va) = (dilate(&u, a), dilate(&v, a));
        prop_assume!(ua.is_ok() && va.is_ok());
        let scaled = young_functional(&ua.unwrap(), &va.unwrap(), &t).unwrap();
        prop_assert!(rel(scaled, psi) < 1e-5);
    }

    #[test]
    fn young_derivative_nonnegative_in_direct_regime(seed in 0u64..1000) {
        let t = YoungTriple::new(4.0 / 3.0, 4.0 / 3.0).unwrap();
        let (u, v) = random_pair(seed);
        let pair: DiffusionPair = optimal_diffusion(&t);
        prop_assert!(young_derivative(&u, &v, &t, &pair).unwrap() >= -1e-8);
    }
}
