use proptest::prelude::*;
use vg_stein::distances::d_w_between;
use vg_stein::moment_bounds::*;
use vg_stein::stein_factors::{const_a, const_c, const_d};
use vg_stein::vg_dist::{cumulants_centered, sample, CumulantVector, VGParams};
use vg_stein::Error;

/// κ_n of VG_c(r, θ, σ) from the factorised CGF −(r/2)ln((1 − au)(1 − bu)),
/// a, b = θ ± √(θ²+σ²): κ_n = (r/2)(n−1)!(aⁿ + bⁿ) for n ≥ 2.
fn cgf_cumulant(r: f64, t: f64, s: f64, n: i32) -> f64 {
    let q = (t * t + s * s).sqrt();
    let (a, b) = (t + q, t - q);
    let fact: f64 = (1..n).map(|k| k as f64).product();
    0.5 * r * fact * (a.powi(n) + b.powi(n))
}

fn perturbed(p: &VGParams, d: [f64; 5]) -> CumulantVector {
    let mut k = cumulants_centered(p).to_array();
    for i in 0..5 {
        // relative perturbation; odd cumulants vanish when θ = 0, so add an absolute part
        k[i + 1] = k[i + 1] * (1.0 + d[i]) + 0.1 * d[i];
    }
    CumulantVector::from_array(k)
}

#[test]
fn target_cumulants_match_factorised_cgf() {
    for (r, t, s) in [(2.0f64, 1.0f64, 1.0f64), (0.7, -0.4, 1.6), (5.0, 2.0, 0.3)] {
        let k = cumulants_centered(&VGParams::centered(r, t, s).unwrap()).to_array();
        for n in 2..=6 {
            let want = cgf_cumulant(r, t, s, n);
            assert!((k[n as usize - 1] - want).abs() < 1e-12 * want.abs().max(1.0), "n={n}");
        }
    }
}

#[test]
fn laplace_c1_against_stated_value() {
    let p = VGParams::centered(2.0, 0.0, 1.0).unwrap();
    let (c1, c2) = c1_c2(&p).unwrap();
    assert!((c2 - const_c(&p)).abs() < 1e-12);
    let a3 = const_a(&VGParams::centered(3.0, 0.0, 1.0).unwrap());
    assert!((c1 - (2.0 / 3.0 + a3) * (1.0 + 2.0 * const_c(&p))).abs() < 1e-10);
    assert!((c1 - 112.03).abs() < 0.01, "{c1}");
    // the worked example prints 134.978; the displayed formula does not reproduce it
    assert!((c1 - STATED_C1_LAPLACE).abs() > 20.0);
}

#[test]
fn gauss_limit_constant_grows() {
    // C_{r,0,σ/√r} contains 2(√(2r)+r)A_r ~ 2√(2πr), so it has no finite limit
    let c: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&r: &f64| const_c(&VGParams::centered(r, 0.0, 1.0 / r.sqrt()).unwrap()))
        .collect();
    assert!(c[0] < c[1] && c[1] < c[2]);
    assert!(c[2] > 10.0 * STATED_C_GAUSS_LIMIT);
}

#[test]
fn c1_c2_dimensional_scaling() {
    // (θ, σ) → (λθ, λσ): C1 ∝ 1/λ², C2 ∝ 1/λ
    for (r, t, s) in [(2.0, 0.5, 1.0), (0.8, -1.0, 0.7), (4.0, 2.0, 1.5)] {
        let (c1, c2) = c1_c2(&VGParams::centered(r, t, s).unwrap()).unwrap();
        for lam in [0.3, 2.5] {
            let (d1, d2) = c1_c2(&VGParams::centered(r, lam * t, lam * s).unwrap()).unwrap();
            assert!((d1 * lam * lam - c1).abs() < 1e-12 * c1);
            assert!((d2 * lam - c2).abs() < 1e-12 * c2);
        }
    }
}

#[test]
fn kolmogorov_composition() {
    let p = VGParams::centered(2.0, 0.0, 1.0).unwrap();
    let mut k = cumulants_centered(&p);
    // (2θ² − σ²)κ̃4/3 must be ≥ 0 for a valid G
    k.kappa4 -= 0.02;
    let inp = SixMomentInput::new(2.0, 0.0, 1.0, k).unwrap();
    for form in [BoundForm::Raw, BoundForm::Tilde] {
        let w = wasserstein_bound(&inp, form).unwrap().value;
        let dk = kolmogorov_bound(&inp, form).unwrap();
        assert!((dk - const_d(&p).unwrap() * w.sqrt()).abs() < 1e-14);
    }
    let exact = SixMomentInput::new(2.0, 0.0, 1.0, cumulants_centered(&p)).unwrap();
    assert_eq!(kolmogorov_bound(&exact, BoundForm::Tilde).unwrap(), 0.0);
    assert_eq!(kolmogorov_bound(&exact, BoundForm::Raw).unwrap(), 0.0);
}

#[test]
fn r_one_propagates_condition() {
    let p = VGParams::centered(1.0, 0.0, 1.0).unwrap();
    let mut k = cumulants_centered(&p);
    k.kappa2 += 1e-9;
    let small = SixMomentInput::new(1.0, 0.0, 1.0, k).unwrap();
    assert!(kolmogorov_bound(&small, BoundForm::Tilde).unwrap() > 0.0);
    k.kappa2 += 0.5;
    let big = SixMomentInput::new(1.0, 0.0, 1.0, k).unwrap();
    assert!(matches!(kolmogorov_bound(&big, BoundForm::Tilde), Err(Error::ConditionViolated(_))));
}

#[test]
fn invalid_inputs() {
    let mut k = cumulants_centered(&VGParams::centered(2.0, 0.0, 1.0).unwrap());
    k.kappa1 = 0.1;
    assert!(matches!(SixMomentInput::new(2.0, 0.0, 1.0, k), Err(Error::InvalidCumulants(_))));
    k.kappa1 = 0.0;
    k.kappa2 = -1.0;
    assert!(matches!(SixMomentInput::new(2.0, 0.0, 1.0, k), Err(Error::InvalidCumulants(_))));
    // cumulants of no random variable: G < 0
    let mut bad = cumulants_centered(&VGParams::centered(2.0, 0.0, 1.0).unwrap());
    bad.kappa6 = -1e4;
    let inp = SixMomentInput::new(2.0, 0.0, 1.0, bad).unwrap();
    assert!(matches!(wasserstein_bound(&inp, BoundForm::Raw), Err(Error::NegativeVariance(_))));
    let t = wasserstein_bound(&inp, BoundForm::Tilde).unwrap();
    assert!(t.negative_under_root.contains(&"kappa6".to_string()));
}

#[test]
fn bound_dominates_exact_distance() {
    // W ~ VG_c(r, θ, 1.05σ) against Z ~ VG_c(r, θ, σ)
    for (r, t, s) in [(2.0, 0.0, 1.0), (3.0, 0.5, 1.0), (1.5, -0.3, 0.8), (0.8, 0.2, 1.2)] {
        let z = VGParams::centered(r, t, s).unwrap();
        let w = VGParams::centered(r, t, 1.05 * s).unwrap();
        let dw = d_w_between(&w, &z).unwrap().value;
        let inp = SixMomentInput::new(r, t, s, cumulants_centered(&w)).unwrap();
        for form in [BoundForm::Raw, BoundForm::Tilde] {
            let b = wasserstein_bound(&inp, form).unwrap().value;
            assert!(dw <= b, "{z:?} {form:?}: d_W = {dw} > {b}");
        }
    }
}

#[test]
fn sample_cumulants_within_standard_errors() {
    let (r, t, s) = (2.0, 1.0, 1.0);
    let p = VGParams::centered(r, t, s).unwrap();
    let xs = sample(&p, 1_000_000, 20240611).unwrap();
    let k = estimate_cumulants(&xs).unwrap();
    let n = xs.len() as f64;
    let c = |m: i32| cgf_cumulant(r, t, s, m);
    let se2 = ((c(4) + 2.0 * c(2).powi(2)) / n).sqrt();
    let se3 = ((c(6) + 9.0 * c(4) * c(2) + 9.0 * c(3).powi(2) + 6.0 * c(2).powi(3)) / n).sqrt();
    let se4 = ((c(8) + 16.0 * c(6) * c(2) + 48.0 * c(5) * c(3) + 34.0 * c(4).powi(2)
        + 72.0 * c(4) * c(2).powi(2) + 144.0 * c(3).powi(2) * c(2) + 24.0 * c(2).powi(4))
        / n)
        .sqrt();
    assert!((k.kappa2 - 6.0).abs() < 5.0 * se2, "{} ± {se2}", k.kappa2);
    assert!((k.kappa3 - 28.0).abs() < 5.0 * se3, "{} ± {se3}", k.kappa3);
    assert!((k.kappa4 - 204.0).abs() < 5.0 * se4, "{} ± {se4}", k.kappa4);
}

fn arb_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.2f64..8.0, -2.0f64..2.0, 0.3f64..3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn raw_and_tilde_g_agree((r, t, s) in arb_params(), d in prop::array::uniform5(-0.1f64..0.1)) {
        let p = VGParams::centered(r, t, s).unwrap();
        let k = perturbed(&p, d);
        let raw = cumulant_identity_g(&p, &k);
        let tilde = cumulant_identity_g_tilde(&p, &k);
        let scale = cumulant_identity_scale(&p, &k);
        prop_assert!((raw - tilde).abs() <= 1e-10 * scale, "raw {raw} tilde {tilde} scale {scale}");
    }

    #[test]
    fn tilde_dominates_raw((r, t, s) in arb_params(), d in prop::array::uniform5(-0.1f64..0.1)) {
        // √(Σ aᵢ) ≤ Σ √|aᵢ|
        let p = VGParams::centered(r, t, s).unwrap();
        let k = perturbed(&p, d);
        prop_assume!(k.kappa2 > 0.0);
        let inp = SixMomentInput::new(r, t, s, k).unwrap();
        if let Ok(raw) = wasserstein_bound(&inp, BoundForm::Raw) {
            let tilde = wasserstein_bound(&inp, BoundForm::Tilde).unwrap();
            prop_assert!(raw.value <= tilde.value * (1.0 + 1e-9) + 1e-12);
        }
    }

    #[test]
    fn tilde_monotone_in_each_difference((r, t, s) in arb_params(), i in 1usize..6, d in 0.001f64..0.1) {
        let p = VGParams::centered(r, t, s).unwrap();
        let z = cumulants_centered(&p).to_array();
        let at = |e: f64| {
            let mut k = z;
            k[i] += e * z[i].abs().max(1.0);
            let inp = SixMomentInput::new(r, t, s, CumulantVector::from_array(k)).unwrap();
            wasserstein_bound(&inp, BoundForm::Tilde).unwrap().value
        };
        prop_assert!(at(d) <= at(2.0 * d));
        prop_assert!(at(-d) <= at(-2.0 * d));
        prop_assert!(at(d) > 0.0);
    }
}
