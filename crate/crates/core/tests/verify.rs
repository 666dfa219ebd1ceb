use heatflow::functionals::fisher_information;
use heatflow::verify::{
    blachman_lemma_check, entropy_power_concavity_check, epi_check, equality_case_detect, holder_flow_check,
    random_density, random_density_on, random_pair, stam_flow_check, young_check, young_flow_check, young_ratio,
    DensityFamily, EqualityDiagnosis, FlowOptions, Tolerances, VerificationReport, MIN_SUPPORT,
};
use heatflow::{
    convolve, make_gaussian, optimal_diffusion, sharp_young_constant, DiffusionPair, Error, Grid, GridFunction,
    TimeGrid, YoungTriple,
};
use proptest::prelude::*;

fn gaussian(var: f64, mean: f64) -> GridFunction {
    make_gaussian(&Grid::default(), var, mean).unwrap()
}

fn bimodal() -> GridFunction {
    gaussian(0.5, -2.0).add(&gaussian(0.5, 2.0)).unwrap().normalized().unwrap()
}

fn bump() -> GridFunction {
    let g = Grid::default();
    let box2 = GridFunction::from_fn(g, |x| if x.abs() <= 2.0 { 0.25 } else { 0.0 }).unwrap();
    convolve(&box2, &gaussian(0.05, 0.0)).unwrap().normalized().unwrap()
}

fn short_times() -> TimeGrid {
    TimeGrid::geometric(1e-2, 1.4, 10.0).unwrap()
}

#[test]
fn report_pass_rule_and_diagnosis_window() {
    let diag = || {
        Some(EqualityDiagnosis {
            is_gaussian: true,
            fitted_variance: 1.0,
            fit_residual: 0.0,
        })
    };
    let r = VerificationReport::new("x", String::new(), 1.0, 1.0, -1e-7, 1e-6, diag);
    assert!(r.passed && r.equality_diagnosis.is_some());
    let r = VerificationReport::new("x", String::new(), 1.0, 1.0, -2e-6, 1e-6, diag);
    assert!(!r.passed);
    let r = VerificationReport::new("x", String::new(), 1.0, 2.0, 1.0, 1e-6, diag);
    assert!(r.passed && r.equality_diagnosis.is_none());

    let line = r.to_json_line();
    for key in ["check_name", "inputs_digest", "lhs", "rhs", "margin", "tolerance", "passed", "equality_diagnosis"] {
        assert!(line.contains(&format!("\"{key}\"")), "{line}");
    }
    let back: VerificationReport = serde_json::from_str(&line).unwrap();
    assert_eq!(back, r);
}

#[test]
fn tolerances_are_settable_by_key() {
    let mut t = Tolerances::default();
    t.set("epi", 1e-3).unwrap();
    assert_eq!(t.epi, 1e-3);
    assert!(t.set("nonsense", 1.0).is_err());
    assert!(t.set("mono", -1.0).is_err());
    assert_eq!(t.entries().len(), Tolerances::KEYS.len());
}

#[test]
fn random_densities_are_deterministic_unit_mass() {
    for fam in DensityFamily::ALL {
        for seed in [0u64, 1, 99, 123_456] {
            let a = random_density(seed, fam);
            let b = random_density(seed, fam);
            assert_eq!(a.samples(), b.samples());
            assert!((heatflow::integrate(&a) - 1.0).abs() < 1e-8);
            assert!(a.samples().iter().all(|&v| v >= 0.0));
        }
    }
    assert_ne!(
        random_density(1, DensityFamily::Skewed).samples(),
        random_density(2, DensityFamily::Skewed).samples()
    );
    assert!(matches!(
        random_density_on(&Grid::new(-1.0, 1.0, 64).unwrap(), 0, DensityFamily::GaussianMixture),
        Err(Error::Truncation(_))
    ));
}

#[test]
fn equality_detection_examples() {
    let fit = equality_case_detect(&gaussian(2.0, 1.0)).unwrap();
    assert!(fit.is_gaussian);
    assert!((fit.fitted_variance - 2.0).abs() < 1e-4 && (fit.fitted_mean - 1.0).abs() < 1e-4);

    let two = gaussian(1.0, -3.0).add(&gaussian(1.0, 3.0)).unwrap().scaled(0.5).unwrap();
    let fit = equality_case_detect(&two).unwrap();
    assert!(!fit.is_gaussian && fit.fit_residual > 1e-1);

    let g = gaussian(1.0, 0.0);
    let perturbed = g.add(&gaussian(0.3, 0.5).scaled(1e-6).unwrap()).unwrap();
    assert!(equality_case_detect(&perturbed).unwrap().is_gaussian);

    let mut spike = vec![0.0; 4096];
    spike[2000] = 1.0;
    spike[2001] = 0.5;
    let spike = GridFunction::new(Grid::default(), spike).unwrap();
    match equality_case_detect(&spike) {
        Err(Error::DegenerateSupport { found, needed }) => assert!(found < needed && needed == MIN_SUPPORT),
        other => panic!("{other:?}"),
    }
}

#[test]
fn young_check_examples() {
    let tol = Tolerances::default();
    let g = Grid::new(-20.0, 20.0, 8192).unwrap();
    let t = YoungTriple::new(1.5, 1.2).unwrap();
    // u = M_α evolves into f = u^{1/p} ∝ M_{pα}: the saturating variances are (q′, p′).
    let c = 0.5;
    let f = make_gaussian(&g, c * t.q_dual(), 0.0).unwrap();
    let h = make_gaussian(&g, c * t.p_dual(), 0.0).unwrap();
    let ratio = young_ratio(&f, &h, &t).unwrap();
    assert!((ratio - sharp_young_constant(&t, 1)).abs() < 1e-3);
    assert!(young_check(&f, &h, &t, &tol).unwrap().passed);

    let eq = make_gaussian(&g, 1.0, 0.0).unwrap();
    let rep = young_check(&eq, &eq, &t, &tol).unwrap();
    assert!(rep.passed && rep.margin > 1e-6, "{rep:?}");

    let rep = young_check(&bump(), &bump(), &YoungTriple::new(4.0 / 3.0, 4.0 / 3.0).unwrap(), &tol).unwrap();
    assert!(rep.passed && rep.margin > 1e-6);

    let rev = YoungTriple::with_r(0.75, 0.75, 0.6).unwrap();
    let (u, v) = random_pair(4);
    let rep = young_check(&u, &v, &rev, &tol).unwrap();
    assert!(rep.passed && rep.margin > 0.0, "{rep:?}");
}

#[test]
fn reports_are_deterministic() {
    let tol = Tolerances::default();
    let t = YoungTriple::new(4.0 / 3.0, 4.0 / 3.0).unwrap();
    let (u, v) = random_pair(17);
    let a = young_check(&u, &v, &t, &tol).unwrap();
    let b = young_check(&u, &v, &t, &tol).unwrap();
    assert_eq!(a, b);
    let c = young_check(&u, &u, &t, &tol).unwrap();
    assert_ne!(a.inputs_digest, c.inputs_digest);
    assert_eq!(a.inputs_digest.len(), 64);
}

#[test]
fn blachman_examples() {
    let tol = Tolerances::default();
    let (a, b, c) = (2.0, 3.0, 0.5);
    let f = gaussian(c * a, 0.0);
    let g = gaussian(c * b, 0.0);
    let rep = blachman_lemma_check(&f, &g, a, b, 2.0, &tol).unwrap();
    assert!(rep.passed);
    assert!((rep.lhs - rep.rhs).abs() < 1e-5 * rep.rhs, "{rep:?}");
    let diag = rep.equality_diagnosis.unwrap();
    assert!(diag.is_gaussian);

    // Shifted Gaussians are still extremal.
    let rep = blachman_lemma_check(&gaussian(c * a, 1.0), &gaussian(c * b, -2.0), a, b, 2.0, &tol).unwrap();
    assert!((rep.lhs - rep.rhs).abs() < 1e-5 * rep.rhs);

    let rep = blachman_lemma_check(&bimodal(), &gaussian(1.0, 0.0), 1.0, 1.0, 2.0, &tol).unwrap();
    assert!(rep.passed && rep.margin > 1e-4 * rep.rhs, "{rep:?}");

    // With r = 1 the lemma is the Blachman–Stam inequality.
    let (u, v) = random_pair(3);
    let rep = blachman_lemma_check(&u, &v, 1.3, 0.7, 1.0, &tol).unwrap();
    assert!(rep.passed);
    let direct = 4.0 * fisher_information(&convolve(&u, &v).unwrap());
    assert!(direct <= 1.3f64.powi(2) * fisher_information(&u) + 0.7f64.powi(2) * fisher_information(&v) + 1e-6);

    assert!(blachman_lemma_check(&u, &v, 0.0, 1.0, 2.0, &tol).is_err());
}

#[test]
fn epi_examples() {
    let tol = Tolerances::default();
    let rep = epi_check(&gaussian(0.7, 0.0), &gaussian(2.1, 1.0), &tol).unwrap();
    assert!(rep.passed && (rep.rhs - rep.lhs).abs() < 1e-3 * rep.lhs);
    let rep = epi_check(&bimodal(), &gaussian(1.0, 0.0), &tol).unwrap();
    assert!(rep.passed && rep.margin > 1e-3 * rep.lhs);
    let rep = epi_check(&bump(), &bump(), &tol).unwrap();
    assert!(rep.passed && rep.margin > 1e-3 * rep.lhs);
    assert!(epi_check(&gaussian(1.0, 0.0).scaled(2.0).unwrap(), &bump(), &tol).is_err());
}

#[test]
fn concavity_examples() {
    let opts = FlowOptions::default();
    let check = entropy_power_concavity_check(&gaussian(1.0, 0.0), &short_times(), &opts).unwrap();
    assert!(check.passed());
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    for (t, n) in check.trace.times.iter().zip(&check.trace.values) {
        assert!((n - two_pi_e * (1.0 + 2.0 * t)).abs() < 1e-4 * n);
    }
    assert!(check.trace.second_differences().iter().all(|d| d.abs() < 1e-4));

    assert!(entropy_power_concavity_check(&bimodal(), &short_times(), &opts).unwrap().passed());

    let three = TimeGrid::new(vec![0.1, 0.2, 0.4]).unwrap();
    let check = entropy_power_concavity_check(&bimodal(), &three, &opts).unwrap();
    assert_eq!(check.trace.second_differences().len(), 1);
    assert!(entropy_power_concavity_check(&bimodal(), &TimeGrid::new(vec![0.1, 0.2]).unwrap(), &opts).is_err());
}

#[test]
fn holder_flow_examples() {
    let opts = FlowOptions::default();
    let v = random_density(8, DensityFamily::SmoothedBump);
    let u = v.scaled(2.5).unwrap();
    let check = holder_flow_check(&u, &v, 3.0, &short_times(), &opts).unwrap();
    assert!(check.passed());
    let first = check.trace.values[0];
    assert!(check.trace.values.iter().all(|x| (x - first).abs() < 1e-8));

    let check = holder_flow_check(&bimodal(), &gaussian(1.0, 0.0), 2.0, &TimeGrid::default(), &opts).unwrap();
    assert!(check.passed(), "{:?}", check.reports);
    assert!(check.trace.increments().iter().all(|d| *d > 0.0));
    let limit = check.report("holder_flow_limit").unwrap();
    assert!((limit.lhs - 1.0).abs() < 1e-3);

    let single = holder_flow_check(&bimodal(), &gaussian(1.0, 0.0), 2.0, &TimeGrid::new(vec![0.0]).unwrap(), &opts)
        .unwrap();
    assert_eq!(single.trace.len(), 1);
    assert!(single.report("holder_flow_monotone").unwrap().passed);
}

#[test]
fn young_flow_is_constant_on_optimal_gaussians() {
    let t = YoungTriple::new(1.5, 1.2).unwrap();
    let pair = optimal_diffusion(&t);
    let c = 1.0 / pair.max_rate();
    let check = young_flow_check(
        &gaussian(c * pair.alpha, 0.0),
        &gaussian(c * pair.beta, 0.0),
        &t,
        &pair,
        &short_times(),
        &FlowOptions::default(),
    )
    .unwrap();
    assert!(check.passed(), "{:?}", check.reports);
    let first = check.trace.values[0];
    assert!(check.trace.values.iter().all(|x| ((x - first) / first).abs() < 1e-5));
}

#[test]
fn young_flow_orientation_by_regime() {
    let opts = FlowOptions::default();
    let direct = YoungTriple::new(4.0 / 3.0, 4.0 / 3.0).unwrap();
    let skewed = random_density(21, DensityFamily::Skewed);
    let check = young_flow_check(&bimodal(), &skewed, &direct, &optimal_diffusion(&direct), &short_times(), &opts)
        .unwrap();
    assert!(check.report("young_flow_monotone").unwrap().passed);
    assert!(check.trace.increments().iter().all(|d| *d >= -1e-8 * check.trace.values[0]));
    let ratio = young_ratio(&bimodal(), &skewed, &direct).unwrap();
    assert!(ratio < sharp_young_constant(&direct, 1) - 1e-4);

    let rev = YoungTriple::with_r(0.75, 0.75, 0.6).unwrap();
    let check = young_flow_check(&bimodal(), &bump(), &rev, &optimal_diffusion(&rev), &short_times(), &opts).unwrap();
    assert!(check.report("young_flow_monotone").unwrap().passed);
    assert!(check.trace.increments().iter().all(|d| *d <= 1e-8 * check.trace.values[0]));
}

#[test]
fn off_optimal_pairs_are_still_checked() {
    let t = YoungTriple::new(1.5, 1.2).unwrap();
    let pair = DiffusionPair::new(1.0, 1.0).unwrap();
    let times = TimeGrid::geometric(1e-2, 2.0, 5.0).unwrap();
    let check = young_flow_check(&bimodal(), &bump(), &t, &pair, &times, &FlowOptions::default()).unwrap();
    assert!(check.report("young_flow_derivative").unwrap().passed);
    assert!(check.limit.is_none());
}

#[test]
fn stam_flow_tends_to_one() {
    let check = stam_flow_check(&bimodal(), &bump(), &TimeGrid::default(), &FlowOptions::default()).unwrap();
    assert!(check.passed(), "{:?}", check.reports);
    assert!(check.trace.values.iter().all(|&v| v <= 1.0 + 1e-6));
    assert!(*check.trace.values.last().unwrap() > 0.99);
}

#[test]
fn seed_sweep_passes_static_audits() {
    let tol = Tolerances::default();
    let direct = YoungTriple::new(4.0 / 3.0, 4.0 / 3.0).unwrap();
    let rev = YoungTriple::new(0.75, 0.75).unwrap();
    for seed in 0..100 {
        let (u, v) = random_pair(seed);
        assert!(young_check(&u, &v, &direct, &tol).unwrap().passed, "seed {seed}");
        assert!(young_check(&u, &v, &rev, &tol).unwrap().passed, "seed {seed}");
        assert!(epi_check(&u, &v, &tol).unwrap().passed, "seed {seed}");
        let phi = heatflow::functionals::holder_functional(&u, &v, 2.0).unwrap();
        assert!(phi <= 1.0 + 1e-9, "seed {seed}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn direct_young_never_exceeds_the_sharp_constant(seed in 0u64..10_000, p in 1.1f64..1.9) {
        let t = YoungTriple::new(p, p).unwrap();
        let (u, v) = random_pair(seed);
        prop_assert!(young_check(&u, &v, &t, &Tolerances::default()).unwrap().passed);
    }

    #[test]
    fn blachman_holds_on_random_pairs(seed in 0u64..10_000, a in 0.2f64..3.0, b in 0.2f64..3.0, r in 1.0f64..3.0) {
        let (u, v) = random_pair(seed);
        prop_assert!(blachman_lemma_check(&u, &v, a, b, r, &Tolerances::default()).unwrap().passed);
    }
}
