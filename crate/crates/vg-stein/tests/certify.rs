use proptest::prelude::*;
use std::collections::BTreeMap;
use vg_stein::certify::*;
use vg_stein::stein_factors::BoundId;
use vg_stein::stein_solver::{CustomFn, SteinSolver, TestFunction};
use vg_stein::vg_dist::VGParams;

fn one_point(r: f64, t: f64, s: f64, tf: TfSpec, per_decade: usize) -> GridSpec {
    GridSpec {
        r_values: vec![r],
        theta_values: vec![t],
        sigma_values: vec![s],
        per_decade,
        tf_list: vec![tf],
        ..GridSpec::standard()
    }
}

#[test]
fn dgv_bound_small_r_indicator() {
    let g = GridSpec { tf_list: vec![TfSpec::Indicator { z: 0.0 }, TfSpec::Indicator { z: 1.0 }], ..one_point(1.5, 0.5, 1.0, TfSpec::Identity, 8) };
    let reps = certify_bound("DGV_F", &g).unwrap();
    assert_eq!(reps.len(), 2);
    assert!(reps.iter().all(|r| r.pass && r.n_failed == 0), "{reps:?}");
}

#[test]
fn constant_h_has_zero_solution() {
    let c = TestFunction::Custom(CustomFn {
        h: std::sync::Arc::new(|_| 2.5),
        dh: Some(std::sync::Arc::new(|_| 0.0)),
        sup_h: Some(2.5),
        lip_h: Some(0.0),
        kinks: vec![],
    });
    let s = SteinSolver::new(VGParams::new(2.5, 0.3, 1.1, 0.0).unwrap(), c).unwrap();
    for x in [-3.0, -0.2, 1e-4, 0.9, 6.0] {
        let e = s.solve_third(x).unwrap();
        for v in [e.f, e.f1.unwrap(), e.f2.unwrap(), e.f3.unwrap()] {
            assert!(v.abs() < 1e-12, "{v}");
        }
    }
}

#[test]
fn half_order_b_reports_match_closed_forms() {
    // ν = 1/2, γ = 0: K_{1/2}(x)x^{−1/2}∫₀ˣ t^{1/2}I_{1/2}(t)dt = e^{−x}(cosh x − 1)/x
    // and I_{1/2}(x)x^{−1/2}∫ₓ^∞ t^{1/2}K_{1/2}(t)dt = (1 − e^{−2x})/(2x)
    let g = AppendixGrid { nu_values: vec![0.5], gamma_values: vec![0.0], ..AppendixGrid::standard() };
    let reps = certify_appendix_b(&g);
    let by_id: BTreeMap<_, _> = reps.iter().map(|r| (r.bound_id.as_str(), r)).collect();
    let xs = g.x_grid();
    let sup = |f: &dyn Fn(f64) -> f64| xs.iter().map(|&(x, _)| f(x)).fold(0.0, f64::max);
    let k_int = sup(&|x: f64| 2.0 * (0.5 * x).sinh().powi(2) * (-x).exp() / x);
    let i_tail = sup(&|x: f64| -(-2.0 * x).exp_m1() / (2.0 * x));
    assert!((by_id["K_nu.int_I.p0"].lhs_sup - k_int).abs() < 1e-10 * k_int);
    assert!((by_id["I_nu.tail_K.p0"].lhs_sup - i_tail).abs() < 1e-10 * i_tail);
    // stated example: bound 2/(α(2ν+1)) = 1
    assert_eq!(by_id["K_nu.int_I.p0"].rhs, 1.0);
    assert!(reps.iter().all(|r| r.pass));
    assert!(by_id.contains_key("M < A") && by_id.contains_key("N < alpha^2 sigma^2 B"));
}

#[test]
fn skew_restricted_bounds_follow_their_domain() {
    let g = AppendixGrid { nu_values: vec![0.0], gamma_values: vec![-0.5, 0.5], ..AppendixGrid::standard() };
    let reps = certify_appendix_b(&g);
    let count = |id: &str, gam: &str| {
        reps.iter().filter(|r| r.bound_id == id && r.test_function.contains(gam)).count()
    };
    assert_eq!(count("K_nu+1.int_I.p0.beta_nonneg", "gamma=0.5"), 1);
    assert_eq!(count("K_nu+1.int_I.p0.beta_nonneg", "gamma=-0.5"), 0);
    assert_eq!(count("dK_prefactor.beta_nonpos", "gamma=-0.5"), 1);
    assert_eq!(count("dK_prefactor.beta_nonpos", "gamma=0.5"), 0);
}

#[test]
fn appendix_a_equality_at_half() {
    let reps = certify_appendix_a(&AppendixGrid::standard());
    let eq = reps.iter().find(|r| r.bound_id == "K_1/2 = K_-1/2").unwrap();
    assert!(eq.pass && eq.lhs_sup <= 1e-12);
    // both monotonicity directions hold with equality at ν = 1/2
    for id in ["K_nu <= K_nu-1", "K_nu >= K_nu-1"] {
        let r = reps.iter().find(|r| r.bound_id == id && r.test_function.starts_with("nu=0.5")).unwrap();
        assert!((r.lhs_sup - 1.0).abs() < 1e-12, "{id}: {}", r.lhs_sup);
    }
    assert!(reps.iter().all(|r| r.pass), "{:?}", reps.iter().find(|r| !r.pass));
}

#[test]
fn jump_matches_derivation_and_vanishes_for_large_r() {
    let p = VGParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
    let j = jump_check(&p).unwrap();
    assert_eq!(j.jump_analytic, 0.5);
    assert!(j.pass);
    let big = jump_check(&VGParams::new(40.0, 0.5, 1.0, 0.0).unwrap()).unwrap();
    assert!(big.pass && big.jump_numeric < 0.03);
}

#[test]
fn third_derivative_is_linear_in_x_near_mu() {
    // f‴ ≈ −a²x/(2(ν+2)) for 1/a² ≪ x ≪ 1/a
    let p = VGParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
    let a = 1e3;
    let s = SteinSolver::new(p, TestFunction::ScaledSine(a)).unwrap();
    let x = 1e-5;
    let f1 = s.solve_third(x).unwrap().f3.unwrap();
    let f2 = s.solve_third(2.0 * x).unwrap().f3.unwrap();
    assert!((f2 / f1 - 2.0).abs() < 0.05, "{}", f2 / f1);
    let id = SteinSolver::new(p, TestFunction::Identity).unwrap();
    assert!(id.solve_third(x).unwrap().f3.unwrap().abs() < 1e-8);
}

#[test]
fn every_bound_appears_once_per_combination() {
    let mut cfg = CertConfig {
        suite: Suite::Thm31,
        bounds: GridSpec {
            r_values: vec![1.0, 3.0],
            theta_values: vec![0.5],
            sigma_values: vec![1.0],
            per_decade: 2,
            tf_list: vec![TfSpec::Indicator { z: 0.2 }, TfSpec::ScaledSine { a: 2.0 }],
            ..GridSpec::standard()
        },
        ..CertConfig::default()
    };
    let b = run_full_certification(&cfg);
    let mut seen: BTreeMap<(String, String, String), usize> = BTreeMap::new();
    for rec in &b.records {
        let Record::Bound(r) = rec else { panic!("unexpected record") };
        *seen.entry((format!("{:?}", r.params), r.test_function.clone(), r.bound_id.clone())).or_default() += 1;
    }
    assert!(seen.values().all(|&n| n == 1));
    // 2 params × (5 bounded-class for the indicator + 12 for the sine)
    assert_eq!(seen.len(), 2 * (5 + BoundId::ALL.len()));
    assert!(b.all_pass());
    let json = serde_json::to_string(&b).unwrap();
    let back: Bundle = serde_json::from_str(&json).unwrap();
    assert_eq!(back.records.len(), b.records.len());
    assert_eq!(serde_json::to_string(&back).unwrap(), json);

    cfg.suite = Suite::Jump;
    let j = run_full_certification(&cfg);
    assert_eq!(j.records.len(), cfg.jump_params.len());
}

#[test]
fn constants_record_flags_discrepancy_without_failing() {
    let c = constants_record().unwrap();
    assert!(c.pass && c.discrepancy);
    assert!((c.c1_laplace - 112.03).abs() < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn refinement_only_raises_the_sup(r in 0.4f64..5.0, t in -1.5f64..1.5, s in 0.5f64..2.0, z in -1.0f64..1.0) {
        let g = one_point(r, t, s, TfSpec::Indicator { z }, 6);
        for rep in certify_bounds(&[BoundId::DgvF, BoundId::DgvF1, BoundId::XF], &g) {
            prop_assert!(rep.lhs_sup_coarse <= rep.lhs_sup);
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }
}
