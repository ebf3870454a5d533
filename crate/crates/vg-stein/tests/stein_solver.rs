use proptest::prelude::*;
use std::sync::Arc;
use vg_stein::stein_solver::*;
use vg_stein::vg_dist::VGParams;
use vg_stein::Error;

fn params10(mu: f64) -> Vec<VGParams> {
    [(0.5, 0.0, 1.0), (1.0, 0.0, 1.0), (2.0, 0.0, 1.0), (2.0, 1.0, 1.0), (3.0, -1.0, 0.5),
     (4.0, 0.5, 2.0), (7.0, 1.0, 1.0), (1.0, -2.0, 0.5), (0.5, 1.0, 2.0), (3.0, 0.0, 2.0)]
        .iter()
        .map(|&(r, t, s)| VGParams::new(r, t, s, mu).unwrap())
        .collect()
}

fn grid50(mu: f64) -> Vec<f64> {
    (0..50).map(|i| mu - 6.0 + 12.0 * (i as f64 + 0.37) / 50.0).collect()
}

/// E sin(aZ)/a = Im φ(a)/a with φ(u) = e^{iuμ}(1 + σ²u² − 2iθu)^{−r/2}.
fn sine_expectation_cf(p: &VGParams, a: f64) -> f64 {
    let (re, im) = (1.0 + p.sigma * p.sigma * a * a, -2.0 * p.theta * a);
    let modulus = (re * re + im * im).sqrt().powf(-0.5 * p.r);
    let arg = -0.5 * p.r * im.atan2(re) + a * p.mu;
    modulus * arg.sin() / a
}

#[test]
fn identity_and_square_oracles() {
    for p in params10(0.0) {
        let id = SteinSolver::new(p, TestFunction::Identity).unwrap();
        let sq = SteinSolver::new(p, TestFunction::Square).unwrap();
        for x in grid50(0.0) {
            let f = id.solve(x).unwrap().f;
            assert!((f + 1.0).abs() < 1e-8, "{p:?} x={x}: {f}");
            let g = sq.solve(x).unwrap().f;
            let want = -x - p.theta * (p.r + 2.0);
            assert!((g - want).abs() < 1e-7, "{p:?} x={x}: {g} vs {want}");
        }
    }
}

#[test]
fn sine_expectation_matches_characteristic_function() {
    for p in params10(0.4) {
        for a in [1.0, 7.5] {
            let e = expectation(&p, &TestFunction::ScaledSine(a)).unwrap();
            let cf = sine_expectation_cf(&p, a);
            assert!((e - cf).abs() < 1e-10, "{p:?} a={a}: {e} vs {cf}");
        }
    }
}

#[test]
fn residual_and_second_derivative_cross_check() {
    for p in params10(0.3) {
        for tf in [TestFunction::ScaledSine(1.0), TestFunction::Indicator(0.0)] {
            let s = SteinSolver::new(p, tf).unwrap();
            for x in grid50(0.3).into_iter().filter(|x| (x - 0.3f64).abs() > 0.01) {
                assert!(s.residual(x).unwrap().abs() < 1e-6);
                let e = s.solve_second(x).unwrap();
                let (_, _, f2, _) = s.second_direct(x).unwrap();
                assert!((e.f2.unwrap() - f2).abs() < 1e-8 * (1.0 + f2.abs()), "{p:?} x={x}");
            }
        }
    }
}

#[test]
fn derivative_matches_finite_differences() {
    for p in params10(-0.2) {
        let s = SteinSolver::new(p, TestFunction::ScaledSine(1.0)).unwrap();
        for &x in &[-3.1, -0.9, 0.45, 2.7] {
            let h = 1e-4;
            let fd = (s.solve(x + h).unwrap().f - s.solve(x - h).unwrap().f) / (2.0 * h);
            let f1 = s.solve_derivative(x).unwrap().f1.unwrap();
            assert!((fd - f1).abs() < 1e-6, "{p:?} x={x}: {fd} vs {f1}");
        }
    }
}

#[test]
fn representations_agree_near_mu() {
    for p in params10(0.1) {
        let band = 1.0 / p.reparam().alpha;
        for tf in [TestFunction::ScaledSine(1.0), TestFunction::Indicator(0.5)] {
            let s = SteinSolver::new(p, tf).unwrap();
            for k in [-2.0, -0.5, -0.01, 0.01, 0.5, 2.0] {
                let x = 0.1 + k * band;
                let a = s.solve(x).unwrap().f;
                let b = s.solve_alt(x).unwrap().f;
                assert!((a - b).abs() < 1e-8, "{p:?} x={x}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn value_at_mu_is_the_limit() {
    for p in params10(0.0) {
        let s = SteinSolver::new(p, TestFunction::ScaledSine(1.0)).unwrap();
        let f0 = s.solve(0.0).unwrap().f;
        let eps = 1e-9 / p.reparam().alpha;
        let l = s.solve(-eps).unwrap().f;
        let r = s.solve(eps).unwrap().f;
        assert!((f0 - l).abs() < 1e-6 && (f0 - r).abs() < 1e-6, "{p:?}: {l} {f0} {r}");
    }
}

#[test]
fn jump_of_first_derivative() {
    for p in params10(0.7).into_iter().filter(|p| p.r >= 1.0) {
        let s = SteinSolver::new(p, TestFunction::Indicator(0.7)).unwrap();
        let eps = 1e-7 / p.reparam().alpha;
        let jump = s.solve_derivative(0.7 - eps).unwrap().f1.unwrap()
            - s.solve_derivative(0.7 + eps).unwrap().f1.unwrap();
        let want = 1.0 / (p.sigma * p.sigma * p.r);
        assert!((jump / want - 1.0).abs() < 1e-3, "{p:?}: {jump} vs {want}");
    }
}

#[test]
fn third_derivative_in_oscillating_regime() {
    // 50-digit closed-form Laplace evaluation (mpmath): f‴(1e−6) for h = sin(10⁴x)/10⁴
    let oracle = -19.999761705690211827;
    let p = VGParams::new(2.0, 0.0, 1.0, 0.0).unwrap();
    let e = solve_third(&p, &TestFunction::ScaledSine(1e4), 1e-6).unwrap();
    assert!((e.f3.unwrap() / oracle - 1.0).abs() < 1e-6, "{:?}", e);
}

#[test]
fn refusals() {
    let p = VGParams::new(2.0, 1.0, 1.0, 0.0).unwrap();
    let s = SteinSolver::new(p, TestFunction::Indicator(1.0)).unwrap();
    assert!(matches!(s.solve_third(1.0), Err(Error::NotDifferentiable(_))));
    assert!(matches!(s.solve_second(0.5e-6), Err(Error::TooCloseToSingularity { .. })));
    assert!(matches!(s.solve_derivative(0.0), Err(Error::TooCloseToSingularity { .. })));
}

fn custom(h: impl Fn(f64) -> f64 + Send + Sync + 'static, sup: f64, kinks: Vec<f64>) -> TestFunction {
    TestFunction::Custom(CustomFn { h: Arc::new(h), dh: None, sup_h: Some(sup), lip_h: None, kinks })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identity_for_random_params(r in 0.3f64..6.0, t in -1.5f64..1.5, s in 0.3f64..2.0, x in -5.0f64..5.0) {
        let p = VGParams::new(r, t, s, 0.0).unwrap();
        let f = solve(&p, &TestFunction::Identity, x).unwrap().f;
        prop_assert!((f + 1.0).abs() < 1e-8);
    }

    #[test]
    fn linearity(r in 0.6f64..5.0, t in -1.0f64..1.0, s in 0.5f64..2.0, z in -1.0f64..1.0, x in -4.0f64..4.0) {
        let p = VGParams::new(r, t, s, 0.0).unwrap();
        let a = solve(&p, &TestFunction::Indicator(z), x).unwrap().f;
        let b = solve(&p, &TestFunction::ScaledSine(2.0), x).unwrap().f;
        let sum = custom(move |u| if u <= z { 1.0 } else { 0.0 } + (2.0 * u).sin() / 2.0, 1.5, vec![z]);
        let c = solve(&p, &sum, x).unwrap().f;
        prop_assert!((a + b - c).abs() < 1e-8, "{} + {} vs {}", a, b, c);
    }
}
