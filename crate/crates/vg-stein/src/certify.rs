//! Certification harness.
//!
//! Sweeps parameter and argument grids, takes numerical suprema of the left-hand
//! sides of the Stein-solution bounds and of the Bessel-function inequalities they
//! rest on, and compares them with the analytic right-hand sides. A grid supremum
//! understates the true supremum, so a passing report means "no violation found",
//! not a proof. Every sweep is recorded at two refinement levels (the coarse grid
//! is a subset of the fine one).

use crate::bessel::{besseli_scaled, besselk_scaled, find_bessel_log_root};
use crate::error::{Error, Result};
use crate::exec::map_par;
use crate::moment_bounds::{c1_c2, STATED_C1_GAUSS_LIMIT, STATED_C1_LAPLACE, STATED_C_GAUSS_LIMIT};
use crate::quad::{integrate_points_best, QuadOptions};
use crate::special::gamma;
use crate::stein_factors::{bound_rhs, const_a, const_b, const_c, const_m_n, BoundId, HNorms};
use crate::stein_solver::{SteinEval, SteinSolver, TestFunction};
use crate::vg_dist::{cdf, VGParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_TOL_CERT: f64 = 1e-8;
pub const BUNDLE_VERSION: &str = "1";

/// Serializable description of a test function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TfSpec {
    Indicator { z: f64 },
    ScaledSine { a: f64 },
    Identity,
}

impl TfSpec {
    pub fn to_tf(self) -> TestFunction {
        match self {
            TfSpec::Indicator { z } => TestFunction::Indicator(z),
            TfSpec::ScaledSine { a } => TestFunction::ScaledSine(a),
            TfSpec::Identity => TestFunction::Identity,
        }
    }

    pub fn label(self) -> String {
        self.to_tf().label()
    }

    /// Whether the bound's norms are finite and known for this family.
    pub fn supports(self, id: BoundId) -> bool {
        match self {
            TfSpec::Indicator { .. } => id.is_bounded_class(),
            TfSpec::ScaledSine { .. } => true,
            TfSpec::Identity => !id.is_bounded_class(),
        }
    }

    /// Norms fed to the right-hand sides; `eh` = E h(Z).
    pub fn norms(self, p: &VGParams, eh: f64) -> Result<HNorms> {
        Ok(match self {
            TfSpec::Indicator { z } => {
                let f = cdf(p, z)?;
                HNorms { h_tilde: Some(f.max(1.0 - f)), h1: None, h2: None }
            }
            // sin(ax)/a attains ±1/a, so ‖h − c‖ = 1/a + |c|
            TfSpec::ScaledSine { a } => HNorms { h_tilde: Some(1.0 / a + eh.abs()), h1: Some(1.0), h2: Some(a) },
            TfSpec::Identity => HNorms { h_tilde: None, h1: Some(1.0), h2: Some(0.0) },
        })
    }
}

/// Grid for the Stein-solution bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub r_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
    pub mu: f64,
    /// log-spaced magnitudes per decade, in units of σ²/√(θ²+σ²)
    pub per_decade: usize,
    pub x_min: f64,
    pub x_max: f64,
    /// extra points hugging the exclusion band, split evenly between the two sides
    pub band_points: usize,
    pub tf_list: Vec<TfSpec>,
    pub tol_cert: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self::standard()
    }
}

impl GridSpec {
    pub fn standard() -> Self {
        Self {
            r_values: vec![0.5, 1.0, 1.5, 2.0, 3.5, 6.0],
            theta_values: vec![-1.0, 0.0, 1.0],
            sigma_values: vec![1.0, 2.0],
            mu: 0.0,
            per_decade: 64,
            x_min: 1e-6,
            x_max: 50.0,
            band_points: 16,
            tf_list: vec![
                TfSpec::Indicator { z: 0.0 },
                TfSpec::Indicator { z: 0.5 },
                TfSpec::ScaledSine { a: 1.0 },
                TfSpec::ScaledSine { a: 4.0 },
            ],
            tol_cert: DEFAULT_TOL_CERT,
        }
    }

    pub fn params(&self) -> Vec<VGParams> {
        let mut out = vec![];
        for &r in &self.r_values {
            for &t in &self.theta_values {
                for &s in &self.sigma_values {
                    if let Ok(p) = VGParams::new(r, t, s, self.mu) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }

    fn magnitudes(&self) -> Vec<f64> {
        let decades = (self.x_max / self.x_min).log10();
        let n = (decades * self.per_decade as f64).floor() as usize;
        let mut m: Vec<f64> =
            (0..=n).map(|k| self.x_min * 10f64.powf(k as f64 / self.per_decade as f64)).collect();
        if m.last().is_some_and(|&v| v < self.x_max * (1.0 - 1e-12)) {
            m.push(self.x_max);
        }
        m
    }

    /// Sorted evaluation points with a flag marking the coarse (every other magnitude) subset.
    pub fn x_grid(&self, p: &VGParams) -> Vec<(f64, bool)> {
        let l = p.length_scale();
        let band = p.delta_sing();
        let mut pts = vec![];
        // keep clear of the band after rounding x − μ
        let floor = band * (1.0 + 1e-8);
        for (k, m) in self.magnitudes().into_iter().enumerate() {
            for s in [-1.0, 1.0] {
                pts.push((p.mu + s * (m * l).max(floor), k % 2 == 0));
            }
        }
        let half = self.band_points / 2;
        for k in 0..half {
            // band·(1 + c), c from 1e−3 to 1
            let c = if half > 1 { 10f64.powf(-3.0 + 3.0 * k as f64 / (half - 1) as f64) } else { 1.0 };
            for s in [-1.0, 1.0] {
                pts.push((p.mu + s * band * (1.0 + c), true));
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        pts
    }

    pub fn describe(&self) -> String {
        format!(
            "x = mu ± m·sigma²/sqrt(theta²+sigma²), m in [{}, {}] at {}/decade, plus {} band points",
            self.x_min, self.x_max, self.per_decade, self.band_points
        )
    }
}

/// One certified inequality at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub label: String,
    pub params: VGParams,
    pub test_function: String,
    pub lhs_sup: f64,
    /// supremum over the coarse half of the grid
    pub lhs_sup_coarse: f64,
    pub x_at_sup: f64,
    pub rhs: f64,
    pub margin: f64,
    pub grid_spec: String,
    pub n_points: usize,
    pub n_failed: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Running supremum over a sweep.
#[derive(Debug, Clone)]
struct Sup {
    fine: f64,
    coarse: f64,
    at: f64,
    n: usize,
    failed: usize,
    note: Option<String>,
}

impl Sup {
    fn new() -> Self {
        Self { fine: 0.0, coarse: 0.0, at: f64::NAN, n: 0, failed: 0, note: None }
    }

    fn push(&mut self, x: f64, coarse: bool, v: Result<f64>) {
        self.n += 1;
        match v {
            Ok(v) if v.is_finite() => {
                if v > self.fine {
                    self.fine = v;
                    self.at = x;
                }
                if coarse {
                    self.coarse = self.coarse.max(v);
                }
            }
            Ok(v) => self.fail(format!("non-finite value {v} at x = {x}")),
            Err(e) => self.fail(format!("x = {x}: {e}")),
        }
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        self.note.get_or_insert(msg);
    }

    #[allow(clippy::too_many_arguments)]
    fn report(self, id: &str, label: &str, p: VGParams, tf: &str, rhs: f64, grid: &str, tol: f64) -> BoundReport {
        let margin = rhs - self.fine;
        let pass = margin >= -tol * rhs && self.failed == 0 && self.coarse <= self.fine;
        BoundReport {
            bound_id: id.into(),
            label: label.into(),
            params: p,
            test_function: tf.into(),
            lhs_sup: self.fine,
            lhs_sup_coarse: self.coarse,
            x_at_sup: self.at,
            rhs,
            margin,
            grid_spec: grid.into(),
            n_points: self.n,
            n_failed: self.failed,
            pass,
            note: self.note,
        }
    }
}

fn deriv_value(e: &SteinEval, order: usize) -> Option<f64> {
    match order {
        0 => Some(e.f),
        1 => e.f1,
        2 => e.f2,
        _ => e.f3,
    }
}

/// Reports for every bound in `ids` that the test function supports, at one parameter point.
pub fn certify_point(p: &VGParams, tf: TfSpec, ids: &[BoundId], grid: &GridSpec) -> Vec<BoundReport> {
    let ids: Vec<BoundId> = ids.iter().copied().filter(|&id| tf.supports(id)).collect();
    if ids.is_empty() {
        return vec![];
    }
    let desc = grid.describe();
    let label = tf.label();
    let mut sups: Vec<Sup> = ids.iter().map(|_| Sup::new()).collect();
    let setup = SteinSolver::new(*p, tf.to_tf()).and_then(|s| {
        let norms = tf.norms(p, s.eh)?;
        let rhs = ids.iter().map(|&id| bound_rhs(id, p, &norms)).collect::<Result<Vec<_>>>()?;
        Ok((s, rhs))
    });
    let (solver, rhs) = match setup {
        Ok(v) => v,
        Err(e) => {
            return ids
                .iter()
                .map(|&id| {
                    let mut s = Sup::new();
                    s.fail(format!("setup: {e}"));
                    s.report(id.as_str(), id.label(), *p, &label, f64::NAN, &desc, grid.tol_cert)
                })
                .collect();
        }
    };
    let order = ids.iter().map(|id| id.lhs().0).max().unwrap_or(0);
    for (x, coarse) in grid.x_grid(p) {
        let e = match order {
            0 => solver.solve(x),
            1 => solver.solve_derivative(x),
            2 => solver.solve_second(x),
            _ => solver.solve_third(x),
        };
        for (id, sup) in ids.iter().zip(sups.iter_mut()) {
            let (k, weighted) = id.lhs();
            let v = e.as_ref().map_err(Clone::clone).and_then(|e| {
                let d = deriv_value(e, k).ok_or(Error::NotDifferentiable(format!("order {k} missing")))?;
                Ok(if weighted { ((x - p.mu) * d).abs() } else { d.abs() })
            });
            sup.push(x, coarse, v);
        }
    }
    ids.iter()
        .zip(sups)
        .zip(rhs)
        .map(|((id, sup), rhs)| sup.report(id.as_str(), id.label(), *p, &label, rhs, &desc, grid.tol_cert))
        .collect()
}

/// All requested bounds over the grid, in (params, test function, bound) order.
pub fn certify_bounds(ids: &[BoundId], grid: &GridSpec) -> Vec<BoundReport> {
    let tasks: Vec<(VGParams, TfSpec)> =
        grid.params().into_iter().flat_map(|p| grid.tf_list.iter().map(move |&tf| (p, tf))).collect();
    map_par(&tasks, |(p, tf)| certify_point(p, *tf, ids, grid)).into_iter().flatten().collect()
}

/// One bound over the grid; unknown IDs are a registry error.
pub fn certify_bound(bound_id: &str, grid: &GridSpec) -> Result<Vec<BoundReport>> {
    let id = BoundId::parse(bound_id)?;
    Ok(certify_bounds(&[id], grid))
}

/// Grid over (ν, γ, x) for the Bessel inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AppendixGrid {
    pub nu_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub per_decade: usize,
    pub tol_cert: f64,
}

impl Default for AppendixGrid {
    fn default() -> Self {
        Self::standard()
    }
}

impl AppendixGrid {
    pub fn standard() -> Self {
        Self {
            nu_values: vec![-0.49, -0.25, 0.0, 0.5, 1.0, 2.0, 5.0],
            gamma_values: vec![-0.9, -0.5, 0.0, 0.5, 0.9],
            x_min: 1e-6,
            x_max: 50.0,
            per_decade: 8,
            tol_cert: DEFAULT_TOL_CERT,
        }
    }

    pub fn x_grid(&self) -> Vec<(f64, bool)> {
        let g = GridSpec { x_min: self.x_min, x_max: self.x_max, per_decade: self.per_decade, ..GridSpec::standard() };
        g.magnitudes().into_iter().enumerate().map(|(k, x)| (x, k % 2 == 0)).collect()
    }

    fn describe(&self) -> String {
        format!("x in [{}, {}] at {}/decade", self.x_min, self.x_max, self.per_decade)
    }
}

/// VG parameters with α = 1 and β = γ: σ² = √(θ²+σ²) = 1/(1−γ²), θ = γ/(1−γ²).
pub fn unit_alpha_params(nu: f64, gamma_: f64) -> Result<VGParams> {
    let s = 1.0 / (1.0 - gamma_ * gamma_);
    VGParams::new(2.0 * nu + 1.0, gamma_ * s, s.sqrt(), 0.0)
}

fn quad_checked<F: Fn(f64) -> f64>(f: F, pts: &[f64]) -> Result<f64> {
    let r = integrate_points_best(f, pts, QuadOptions { epsabs: 0.0, epsrel: 1e-13, max_panels: 4000 });
    if r.value.is_finite() && r.abserr <= 1e-10 * r.value.abs() {
        Ok(r.value)
    } else {
        Err(Error::Quadrature { value: r.value, abserr: r.abserr })
    }
}

/// e^{−(α+β)x} ∫₀ˣ e^{βt} t^{ν+p} I_ν(αt) dt, for α+β > 0 and 2ν+p > −1.
pub fn scaled_int_i(nu: f64, p: f64, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let lam = alpha + beta;
    if !(x > 0.0) {
        return Ok(0.0);
    }
    let g = |t: f64| (-lam * (x - t)).exp() * t.powf(nu + p) * besseli_scaled(nu, alpha * t).unwrap_or(f64::NAN);
    // t = b·u^q flattens the t^{2ν+p} behaviour at the origin
    let b = x.min(1.0 / alpha);
    let q = 1.0 / (2.0 * nu + p + 1.0);
    let head = quad_checked(|u: f64| g(b * u.powf(q)) * b * q * u.powf(q - 1.0), &[0.0, 0.5, 1.0])?;
    if b >= x {
        return Ok(head);
    }
    let mut pts = vec![b, x];
    let mut t = 2.0 * b;
    while t < x {
        pts.push(t);
        t *= 2.0;
    }
    let mut d = 1.0 / lam;
    while x - d > b {
        pts.push(x - d);
        d *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    Ok(head + quad_checked(g, &pts)?)
}

/// e^{(α−β)x} ∫ₓ^∞ e^{βt} t^{ν+p} K_ν(αt) dt, for α−β > 0 and x > 0.
pub fn scaled_int_k(nu: f64, p: f64, alpha: f64, beta: f64, x: f64) -> Result<f64> {
    let lam = alpha - beta;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("tail integral needs x > 0, got {x}")));
    }
    let g = |t: f64| (-lam * (t - x)).exp() * t.powf(nu + p) * besselk_scaled(nu, alpha * t).unwrap_or(f64::NAN);
    let scale = x.max(1.0 / alpha);
    let grow = (nu + p).max(0.0);
    // e^{−λ(T−x)}(T/scale)^{ν+p} below 1e−18
    let mut end = x + 40.0 / lam;
    while -lam * (end - x) + grow * (end / scale).ln() > -41.0 {
        end += 10.0 / lam;
    }
    let mut pts = vec![x, end];
    let mut t = 2.0 * x;
    while t < x + 1.0 / lam && t < end {
        pts.push(t);
        t *= 2.0;
    }
    let mut d = 1.0 / lam;
    while x + d < end {
        pts.push(x + d);
        d *= 2.0;
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    quad_checked(g, &pts)
}

/// Identifiers of the uniform Bessel-integral bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AppBId {
    KnuInt1,
    InuTail1,
    Knu1Int1,
    Knu1Int0,
    KnuInt0,
    InuTail0,
    XKnuInt0,
    XKnu1Int0,
    XInuTail0,
    Knu1Int0PosSkew,
    DiffI,
    DiffK,
    DiffKNegSkew,
    DKnuInt1,
    DInuTail1,
    DInuTail0,
    XDKnuInt0,
    XDInuTail0,
    DKnuInt0,
}

impl AppBId {
    pub const ALL: [AppBId; 19] = [
        AppBId::KnuInt1,
        AppBId::InuTail1,
        AppBId::Knu1Int1,
        AppBId::Knu1Int0,
        AppBId::KnuInt0,
        AppBId::InuTail0,
        AppBId::XKnuInt0,
        AppBId::XKnu1Int0,
        AppBId::XInuTail0,
        AppBId::Knu1Int0PosSkew,
        AppBId::DiffI,
        AppBId::DiffK,
        AppBId::DiffKNegSkew,
        AppBId::DKnuInt1,
        AppBId::DInuTail1,
        AppBId::DInuTail0,
        AppBId::XDKnuInt0,
        AppBId::XDInuTail0,
        AppBId::DKnuInt0,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AppBId::KnuInt1 => "K_nu.int_I.p1",
            AppBId::InuTail1 => "I_nu.tail_K.p1",
            AppBId::Knu1Int1 => "K_nu+1.int_I.p1",
            AppBId::Knu1Int0 => "K_nu+1.int_I.p0",
            AppBId::KnuInt0 => "K_nu.int_I.p0",
            AppBId::InuTail0 => "I_nu.tail_K.p0",
            AppBId::XKnuInt0 => "x.K_nu.int_I.p0",
            AppBId::XKnu1Int0 => "x.K_nu+1.int_I.p0",
            AppBId::XInuTail0 => "x.I_nu.tail_K.p0",
            AppBId::Knu1Int0PosSkew => "K_nu+1.int_I.p0.beta_nonneg",
            AppBId::DiffI => "dI_prefactor",
            AppBId::DiffK => "dK_prefactor",
            AppBId::DiffKNegSkew => "dK_prefactor.beta_nonpos",
            AppBId::DKnuInt1 => "dK_nu.int_I.p1",
            AppBId::DInuTail1 => "dI_nu.tail_K.p1",
            AppBId::DInuTail0 => "dI_nu.tail_K.p0",
            AppBId::XDKnuInt0 => "x.dK_nu.int_I.p0",
            AppBId::XDInuTail0 => "x.dI_nu.tail_K.p0",
            AppBId::DKnuInt0 => "dK_nu.int_I.p0",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AppBId::KnuInt1 => "e^{-bx}K_nu(ax)x^{-nu} int_0^x e^{bt}t^{nu+1}I_nu(at)dt < 1/(2a^2(1-|g|))",
            AppBId::InuTail1 => {
                "e^{-bx}I_nu(ax)x^{-nu} int_x^inf e^{bt}t^{nu+1}K_nu(at)dt < (1/a^2)(1 + 2sqrt(pi)|g|G(nu+3/2)/((1-g^2)^{nu+3/2}G(nu+1)))"
            }
            AppBId::Knu1Int1 => "e^{-bx}K_{nu+1}(ax)x^{-nu} int_0^x e^{bt}t^{nu+1}I_nu(at)dt < 1/(2a^2(1-|g|))",
            AppBId::Knu1Int0 => "e^{-bx}K_{nu+1}(ax)x^{-nu} int_0^x e^{bt}t^nu I_nu(at)dt <= 2/(a(2nu+1))",
            AppBId::KnuInt0 => "e^{-bx}K_nu(ax)x^{-nu} int_0^x e^{bt}t^nu I_nu(at)dt <= 2/(a(2nu+1))",
            AppBId::InuTail0 => "e^{-bx}I_nu(ax)x^{-nu} int_x^inf e^{bt}t^nu K_nu(at)dt <= M/a",
            AppBId::XKnuInt0 => "e^{-bx}K_nu(ax)x^{1-nu} int_0^x e^{bt}t^nu I_nu(at)dt < (2nu+7)/(2a^2(2nu+1)(1-|g|))",
            AppBId::XKnu1Int0 => {
                "e^{-bx}K_{nu+1}(ax)x^{1-nu} int_0^x e^{bt}t^nu I_nu(at)dt < (2nu+7)/(2a^2(2nu+1)(1-|g|))"
            }
            AppBId::XInuTail0 => "e^{-bx}I_nu(ax)x^{1-nu} int_x^inf e^{bt}t^nu K_nu(at)dt < N/a^2",
            AppBId::Knu1Int0PosSkew => {
                "e^{-bx}K_{nu+1}(ax)x^{-nu} int_0^x e^{bt}t^nu I_nu(at)dt <= 1/(a(2nu+1)), 0 <= b < a"
            }
            AppBId::DiffI => "|d/dx e^{-bx}I_nu(ax)x^{-nu}| < 2a e^{-bx}I_nu(ax)x^{-nu}  (ratio form)",
            AppBId::DiffK => "|d/dx e^{-bx}K_nu(ax)x^{-nu}| < 2a e^{-bx}K_{nu+1}(ax)x^{-nu}  (ratio form)",
            AppBId::DiffKNegSkew => {
                "|d/dx e^{-bx}K_nu(ax)x^{-nu}| <= a e^{-bx}K_{nu+1}(ax)x^{-nu}, -a < b <= 0  (ratio form)"
            }
            AppBId::DKnuInt1 => "|d/dx e^{-bx}K_nu(ax)x^{-nu}| int_0^x e^{bt}t^{nu+1}I_nu(at)dt < 1/(a(1-|g|))",
            AppBId::DInuTail1 => {
                "|d/dx e^{-bx}I_nu(ax)x^{-nu}| int_x^inf e^{bt}t^{nu+1}K_nu(at)dt < (2/a)(1 + 2sqrt(pi)|g|G(nu+3/2)/((1-g^2)^{nu+3/2}G(nu+1)))"
            }
            AppBId::DInuTail0 => "|d/dx e^{-bx}I_nu(ax)x^{-nu}| int_x^inf e^{bt}t^nu K_nu(at)dt < 2M",
            AppBId::XDKnuInt0 => {
                "x|d/dx e^{-bx}K_nu(ax)x^{-nu}| int_0^x e^{bt}t^nu I_nu(at)dt < (2nu+7)/(a(2nu+1)(1-|g|))"
            }
            AppBId::XDInuTail0 => "x|d/dx e^{-bx}I_nu(ax)x^{-nu}| int_x^inf e^{bt}t^nu K_nu(at)dt < 2N/a",
            AppBId::DKnuInt0 => "|d/dx e^{-bx}K_nu(ax)x^{-nu}| int_0^x e^{bt}t^nu I_nu(at)dt <= 2/(2nu+1)",
        }
    }

    fn applies(self, gamma_: f64) -> bool {
        match self {
            AppBId::Knu1Int0PosSkew => gamma_ >= 0.0,
            AppBId::DiffKNegSkew => gamma_ <= 0.0,
            _ => true,
        }
    }
}

/// Scaled ingredients at one (ν, α, β, x).
struct BesselPoint {
    x: f64,
    ks: f64,
    ks1: f64,
    is: f64,
    is1: f64,
    int_i0: f64,
    int_i1: f64,
    tail_k0: f64,
    tail_k1: f64,
}

impl BesselPoint {
    fn new(nu: f64, alpha: f64, beta: f64, x: f64) -> Result<Self> {
        let z = alpha * x;
        Ok(Self {
            x,
            ks: besselk_scaled(nu, z)?,
            ks1: besselk_scaled(nu + 1.0, z)?,
            is: besseli_scaled(nu, z)?,
            is1: besseli_scaled(nu + 1.0, z)?,
            int_i0: scaled_int_i(nu, 0.0, alpha, beta, x)?,
            int_i1: scaled_int_i(nu, 1.0, alpha, beta, x)?,
            tail_k0: scaled_int_k(nu, 0.0, alpha, beta, x)?,
            tail_k1: scaled_int_k(nu, 1.0, alpha, beta, x)?,
        })
    }

    /// Left side of the inequality (ratio for the derivative comparisons).
    fn lhs(&self, id: AppBId, nu: f64, alpha: f64, beta: f64) -> f64 {
        let w = self.x.powf(-nu);
        let dk = (alpha * self.ks1 + beta * self.ks).abs() * w;
        let di = (alpha * self.is1 - beta * self.is).abs() * w;
        let x = self.x;
        match id {
            AppBId::KnuInt1 => w * self.ks * self.int_i1,
            AppBId::InuTail1 => w * self.is * self.tail_k1,
            AppBId::Knu1Int1 => w * self.ks1 * self.int_i1,
            AppBId::Knu1Int0 | AppBId::Knu1Int0PosSkew => w * self.ks1 * self.int_i0,
            AppBId::KnuInt0 => w * self.ks * self.int_i0,
            AppBId::InuTail0 => w * self.is * self.tail_k0,
            AppBId::XKnuInt0 => x * w * self.ks * self.int_i0,
            AppBId::XKnu1Int0 => x * w * self.ks1 * self.int_i0,
            AppBId::XInuTail0 => x * w * self.is * self.tail_k0,
            AppBId::DiffI => di / (2.0 * alpha * w * self.is),
            AppBId::DiffK => dk / (2.0 * alpha * w * self.ks1),
            AppBId::DiffKNegSkew => dk / (alpha * w * self.ks1),
            AppBId::DKnuInt1 => dk * self.int_i1,
            AppBId::DInuTail1 => di * self.tail_k1,
            AppBId::DInuTail0 => di * self.tail_k0,
            AppBId::XDKnuInt0 => x * dk * self.int_i0,
            AppBId::XDInuTail0 => x * di * self.tail_k0,
            AppBId::DKnuInt0 => dk * self.int_i0,
        }
    }
}

/// (α-form bound, VG-form bound) of each inequality; `None` where no second form is stated.
fn app_b_rhs(id: AppBId, nu: f64, alpha: f64, beta: f64, p: &VGParams) -> Result<(f64, Option<f64>)> {
    let g = beta / alpha;
    let (m, n) = const_m_n(nu, g)?;
    let VGParams { r, theta, sigma, .. } = *p;
    let s2 = sigma * sigma;
    let root = theta.hypot(sigma);
    let q = 1.0 + theta * theta / s2;
    let skew = 1.0
        + 2.0 * PI.sqrt() * g.abs() * gamma(nu + 1.5) / ((1.0 - g * g).powf(nu + 1.5) * gamma(nu + 1.0));
    let skew_vg = s2 * s2 / (root * root) + (2.0 * PI).sqrt() * theta.abs() * sigma * (r + 1.0).sqrt() * q.powf(0.5 * (r - 1.0));
    let one_minus = 1.0 - g.abs();
    let weight = (2.0 * nu + 7.0) / (2.0 * alpha * alpha * (2.0 * nu + 1.0) * one_minus);
    Ok(match id {
        AppBId::KnuInt1 | AppBId::Knu1Int1 => (1.0 / (2.0 * alpha * alpha * one_minus), Some(s2)),
        AppBId::InuTail1 => (skew / (alpha * alpha), Some(skew_vg)),
        AppBId::Knu1Int0 | AppBId::KnuInt0 => (2.0 / (alpha * (2.0 * nu + 1.0)), None),
        AppBId::InuTail0 => (m / alpha, Some(s2 * const_a(p) / root)),
        AppBId::XKnuInt0 | AppBId::XKnu1Int0 => (weight, Some(s2 * (1.0 + 6.0 / r))),
        AppBId::XInuTail0 => (n / (alpha * alpha), Some(s2 * const_b(p))),
        AppBId::Knu1Int0PosSkew => (1.0 / (alpha * (2.0 * nu + 1.0)), None),
        AppBId::DiffI | AppBId::DiffK | AppBId::DiffKNegSkew => (1.0, None),
        AppBId::DKnuInt1 => (1.0 / (alpha * one_minus), Some(2.0 * root)),
        AppBId::DInuTail1 => (2.0 * skew / alpha, Some(2.0 * root / s2 * skew_vg)),
        AppBId::DInuTail0 => (2.0 * m, Some(2.0 * const_a(p))),
        AppBId::XDKnuInt0 => (2.0 * alpha * weight, Some(2.0 * (1.0 + 6.0 / r) * root)),
        AppBId::XDInuTail0 => (2.0 * n / alpha, Some(2.0 * root * const_b(p))),
        AppBId::DKnuInt0 => (2.0 / (2.0 * nu + 1.0), None),
    })
}

/// Appendix-B style uniform bounds at one (ν, γ), with α = 1.
fn app_b_point(nu: f64, gamma_: f64, grid: &AppendixGrid) -> Vec<BoundReport> {
    let desc = grid.describe();
    let alpha = 1.0;
    let beta = gamma_ * alpha;
    let p = match unit_alpha_params(nu, gamma_) {
        Ok(p) => p,
        Err(_) => return vec![],
    };
    let xs = grid.x_grid();
    let points: Vec<(bool, Result<BesselPoint>)> =
        xs.iter().map(|&(x, c)| (c, BesselPoint::new(nu, alpha, beta, x))).collect();
    let mut out = vec![];
    for id in AppBId::ALL.into_iter().filter(|id| id.applies(gamma_)) {
        let mut sup = Sup::new();
        for ((x, _), (coarse, bp)) in xs.iter().zip(&points) {
            let v = bp.as_ref().map_err(Clone::clone).map(|bp| bp.lhs(id, nu, alpha, beta));
            sup.push(*x, *coarse, v);
        }
        let (rhs_a, rhs_vg) = match app_b_rhs(id, nu, alpha, beta, &p) {
            Ok(v) => v,
            Err(e) => {
                sup.fail(e.to_string());
                (f64::NAN, None)
            }
        };
        let tf = format!("nu={nu}, gamma={gamma_}, alpha={alpha}");
        if let Some(vg) = rhs_vg {
            out.push(sup.clone().report(&format!("{}.vg", id.as_str()), id.label(), p, &tf, vg, &desc, grid.tol_cert));
        }
        out.push(sup.report(id.as_str(), id.label(), p, &tf, rhs_a, &desc, grid.tol_cert));
    }
    // M < A and N < α²σ²B
    if let Ok((m, n)) = const_m_n(nu, gamma_) {
        let mk = |id: &str, lhs: f64, rhs: f64| {
            let mut s = Sup::new();
            s.push(f64::NAN, true, Ok(lhs));
            // strict inequalities between constants: no tolerance
            let mut rep = s.report(id, id, p, "constants", rhs, "parameter point", 0.0);
            rep.pass = lhs < rhs;
            rep
        };
        let re = p.reparam();
        out.push(mk("M < A", m, const_a(&p)));
        out.push(mk("N < alpha^2 sigma^2 B", n, re.alpha * re.alpha * p.sigma * p.sigma * const_b(&p)));
    }
    out
}

pub fn certify_appendix_b(grid: &AppendixGrid) -> Vec<BoundReport> {
    let tasks: Vec<(f64, f64)> =
        grid.nu_values.iter().flat_map(|&n| grid.gamma_values.iter().map(move |&g| (n, g))).collect();
    map_par(&tasks, |&(n, g)| app_b_point(n, g, grid)).into_iter().flatten().collect()
}

/// Ratio of (e^{−βx}I_ν(x)/x^ν)‴ to 8e^{−βx}I_ν(x)/x^ν, from u = I_ν(x)/x^ν:
/// u′/u = ρ₁, u″/u = 1 − (2ν+1)ρ₁/x, u‴/u = ρ₁ − (2ν+1)ρ₂/x with ρ_k = I_{ν+k}/I_ν.
pub fn third_derivative_ratio(nu: f64, beta: f64, x: f64) -> Result<f64> {
    let i0 = besseli_scaled(nu, x)?;
    let r1 = besseli_scaled(nu + 1.0, x)? / i0;
    let r2 = besseli_scaled(nu + 2.0, x)? / i0;
    let c = 2.0 * nu + 1.0;
    let (d1, d2, d3) = (r1, 1.0 - c * r1 / x, r1 - c * r2 / x);
    Ok((d3 - 3.0 * beta * d2 + 3.0 * beta * beta * d1 - beta.powi(3)) / 8.0)
}

/// Appendix-A style inequalities, in ratio form (left/right ≤ 1).
pub fn certify_appendix_a(grid: &AppendixGrid) -> Vec<BoundReport> {
    let desc = grid.describe();
    let xs = grid.x_grid();
    let tol = grid.tol_cert;
    let mut tasks: Vec<(&'static str, &'static str, f64, f64)> = vec![];
    for &nu in &grid.nu_values {
        if nu >= 0.5 {
            tasks.push(("I_nu < I_nu-1", "I_nu(x) < I_{nu-1}(x), nu >= 1/2", nu, 0.0));
            tasks.push(("K_nu >= K_nu-1", "K_nu(x) >= K_{nu-1}(x), nu >= 1/2", nu, 0.0));
        }
        if nu <= 0.5 {
            tasks.push(("K_nu <= K_nu-1", "K_nu(x) <= K_{nu-1}(x), nu <= 1/2", nu, 0.0));
        }
        if nu > 0.0 {
            tasks.push(("K_nu I_nu <= 1/(2nu)", "K_nu(x)I_nu(x) <= 1/(2nu), nu > 0", nu, 0.0));
        }
        tasks.push(("int t^nu I_nu", "int_0^x t^nu I_nu(t)dt <= 2(nu+1)/(2nu+1) x^nu I_{nu+1}(x)", nu, 0.0));
        for &b in &grid.gamma_values {
            tasks.push(("d3 e^{-bx}I_nu/x^nu", "(e^{-bx}I_nu(x)/x^nu)''' < 8e^{-bx}I_nu(x)/x^nu, |b| < 1", nu, b));
        }
    }
    if grid.nu_values.contains(&0.5) {
        tasks.push(("K_1/2 = K_-1/2", "|K_{1/2}(x) - K_{-1/2}(x)| / K_{1/2}(x) <= 1e-12", 0.5, 0.0));
    }
    let eval = |id: &str, nu: f64, b: f64, x: f64| -> Result<f64> {
        Ok(match id {
            "I_nu < I_nu-1" => besseli_scaled(nu, x)? / besseli_scaled(nu - 1.0, x)?,
            "K_nu >= K_nu-1" => besselk_scaled(nu - 1.0, x)? / besselk_scaled(nu, x)?,
            "K_nu <= K_nu-1" => besselk_scaled(nu, x)? / besselk_scaled(nu - 1.0, x)?,
            "K_nu I_nu <= 1/(2nu)" => 2.0 * nu * besselk_scaled(nu, x)? * besseli_scaled(nu, x)?,
            "int t^nu I_nu" => {
                scaled_int_i(nu, 0.0, 1.0, 0.0, x)? * (2.0 * nu + 1.0)
                    / (2.0 * (nu + 1.0) * x.powf(nu) * besseli_scaled(nu + 1.0, x)?)
            }
            "d3 e^{-bx}I_nu/x^nu" => third_derivative_ratio(nu, b, x)?,
            _ => {
                let k = besselk_scaled(0.5, x)?;
                (k - besselk_scaled(-0.5, x)?).abs() / k
            }
        })
    };
    map_par(&tasks, |&(id, label, nu, b)| {
        let mut sup = Sup::new();
        for &(x, coarse) in &xs {
            sup.push(x, coarse, eval(id, nu, b, x));
        }
        let p = VGParams { r: 2.0 * nu + 1.0, theta: 0.0, sigma: 1.0, mu: 0.0 };
        let (rhs, t) = if id == "K_1/2 = K_-1/2" { (1e-12, 0.0) } else { (1.0, tol) };
        sup.report(id, label, p, &format!("nu={nu}, beta={b}"), rhs, &desc, t)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    pub params: VGParams,
    pub h: Vec<f64>,
    /// f′(μ−h) − f′(μ+h) at each h
    pub jumps: Vec<f64>,
    pub jump_numeric: f64,
    pub jump_analytic: f64,
    pub rel_gap: f64,
    pub pass: bool,
}

/// Jump of f′ at μ for h = 1{x ≤ μ}: analytically (h̃(μ−) − h̃(μ+))/(σ²r) = 1/(σ²r).
pub fn jump_check(p: &VGParams) -> Result<JumpReport> {
    let s = SteinSolver::new(*p, TestFunction::Indicator(p.mu))?;
    let l = p.length_scale();
    let h = vec![1e-3 * l, 1e-4 * l, 1e-5 * l];
    let jumps = h
        .iter()
        .map(|&h| Ok(s.solve_derivative(p.mu - h)?.f1.unwrap() - s.solve_derivative(p.mu + h)?.f1.unwrap()))
        .collect::<Result<Vec<f64>>>()?;
    // Aitken extrapolation over the geometric h sequence; falls back to the finest value
    let (d1, d2) = (jumps[1] - jumps[0], jumps[2] - jumps[1]);
    let jump_numeric = if d1 * d2 > 0.0 && d2.abs() < d1.abs() {
        let rho = d2 / d1;
        jumps[2] + d2 * rho / (1.0 - rho)
    } else {
        jumps[2]
    };
    let jump_analytic = 1.0 / (p.sigma * p.sigma * p.r);
    let rel_gap = (jump_numeric - jump_analytic).abs() / jump_analytic;
    Ok(JumpReport { params: *p, h, jumps, jump_numeric, jump_analytic, rel_gap, pass: rel_gap < 0.01 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub a: f64,
    pub x: f64,
    pub f3: f64,
    /// f‴(x)·2(ν+2)/(a²x)
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub params: VGParams,
    pub rows: Vec<BlowupRow>,
    /// |ratio| at the largest a
    pub abs_ratio: f64,
    pub pass: bool,
}

pub const BLOWUP_FREQUENCIES: [f64; 3] = [1e2, 1e3, 1e4];

/// f‴ for h = sin(ax)/a at x = μ + a^{−3/2}; pass iff the ratio lies in [0.8, 1.2] at the largest a.
pub fn blowup_demo(p: &VGParams) -> Result<BlowupReport> {
    let nu = p.reparam().nu;
    let rows = map_par(&BLOWUP_FREQUENCIES, |&a| -> Result<BlowupRow> {
        let y = a.powf(-1.5);
        let f3 = SteinSolver::new(*p, TestFunction::ScaledSine(a))?.solve_third(p.mu + y)?.f3.unwrap();
        Ok(BlowupRow { a, x: p.mu + y, f3, ratio: f3 * 2.0 * (nu + 2.0) / (a * a * y) })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let last = rows.last().map(|r| r.ratio).unwrap_or(f64::NAN);
    Ok(BlowupReport { params: *p, rows, abs_ratio: last.abs(), pass: (0.8..=1.2).contains(&last) })
}

/// Printed constants next to the values the displayed formulas give.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsRecord {
    pub a_laplace: f64,
    pub a_laplace_closed_form: f64,
    pub c_laplace: f64,
    pub c_laplace_closed_form: f64,
    pub x3_star: f64,
    pub x3_star_stated: f64,
    pub c1_laplace: f64,
    pub c1_laplace_stated: f64,
    pub c1_gauss_r1000: f64,
    pub c1_gauss_limit_stated: f64,
    pub c_gauss_r1000: f64,
    pub c_gauss_limit_stated: f64,
    /// formula and printed values disagree; informational only
    pub discrepancy: bool,
    pub pass: bool,
}

pub fn constants_record() -> Result<ConstantsRecord> {
    let lap = VGParams::centered(2.0, 0.0, 1.0)?;
    let sp = PI.sqrt();
    let (a_cf, c_cf) = (2.0 * sp / 3f64.sqrt(), 8.0 + 16.0 * sp / 3f64.sqrt());
    let x3 = find_bessel_log_root(3.0)?;
    let gauss = VGParams::centered(1000.0, 0.0, 1.0 / 1000f64.sqrt())?;
    let (c1_lap, _) = c1_c2(&lap)?;
    let (c1_g, _) = c1_c2(&gauss)?;
    let (a, c) = (const_a(&lap), const_c(&lap));
    let c_g = const_c(&gauss);
    let discrepancy = (c1_lap - STATED_C1_LAPLACE).abs() > 1e-3 * STATED_C1_LAPLACE
        || (c1_g - STATED_C1_GAUSS_LIMIT).abs() > 1.0
        || (c_g - STATED_C_GAUSS_LIMIT).abs() > 1.0;
    Ok(ConstantsRecord {
        a_laplace: a,
        a_laplace_closed_form: a_cf,
        c_laplace: c,
        c_laplace_closed_form: c_cf,
        x3_star: x3,
        x3_star_stated: 0.62927,
        c1_laplace: c1_lap,
        c1_laplace_stated: STATED_C1_LAPLACE,
        c1_gauss_r1000: c1_g,
        c1_gauss_limit_stated: STATED_C1_GAUSS_LIMIT,
        c_gauss_r1000: c_g,
        c_gauss_limit_stated: STATED_C_GAUSS_LIMIT,
        discrepancy,
        pass: (a - a_cf).abs() < 1e-12 && (c - c_cf).abs() < 1e-12 && (x3 - 0.62927).abs() < 5e-5,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Thm31,
    AppA,
    AppB,
    Jump,
    Blowup,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "all" => Suite::All,
            "thm31" => Suite::Thm31,
            "appa" => Suite::AppA,
            "appb" => Suite::AppB,
            "jump" => Suite::Jump,
            "blowup" => Suite::Blowup,
            _ => return Err(Error::Registry(format!("unknown suite '{s}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CertConfig {
    pub suite: Suite,
    pub bounds: GridSpec,
    pub appendix: AppendixGrid,
    pub jump_params: Vec<VGParams>,
    pub blowup_params: Vec<VGParams>,
}

impl Default for CertConfig {
    fn default() -> Self {
        let p = |r, t, s, m| VGParams { r, theta: t, sigma: s, mu: m };
        Self {
            suite: Suite::All,
            bounds: GridSpec::standard(),
            appendix: AppendixGrid::standard(),
            jump_params: vec![
                p(2.0, 0.0, 1.0, 0.0),
                p(1.0, 0.5, 1.0, 0.0),
                p(3.5, -1.0, 2.0, 0.3),
                p(0.6, 0.3, 0.8, 0.0),
                p(6.0, 1.0, 1.0, -1.0),
            ],
            blowup_params: vec![p(2.0, 0.0, 1.0, 0.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Bound(BoundReport),
    Appendix(BoundReport),
    Jump(JumpReport),
    Blowup(BlowupReport),
    Constants(ConstantsRecord),
    Error { stage: String, message: String },
}

impl Record {
    pub fn pass(&self) -> bool {
        match self {
            Record::Bound(b) | Record::Appendix(b) => b.pass,
            Record::Jump(j) => j.pass,
            Record::Blowup(b) => b.pass,
            Record::Constants(c) => c.pass,
            Record::Error { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub version: String,
    pub config: CertConfig,
    pub records: Vec<Record>,
}

impl Bundle {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(Record::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| !r.pass())
    }
}

pub fn run_full_certification(config: &CertConfig) -> Bundle {
    let want = |s: Suite| config.suite == Suite::All || config.suite == s;
    let mut records = vec![];
    if config.suite == Suite::All {
        match constants_record() {
            Ok(c) => records.push(Record::Constants(c)),
            Err(e) => records.push(Record::Error { stage: "constants".into(), message: e.to_string() }),
        }
    }
    if want(Suite::Thm31) {
        records.extend(certify_bounds(&BoundId::ALL, &config.bounds).into_iter().map(Record::Bound));
    }
    if want(Suite::AppA) {
        records.extend(certify_appendix_a(&config.appendix).into_iter().map(Record::Appendix));
    }
    if want(Suite::AppB) {
        records.extend(certify_appendix_b(&config.appendix).into_iter().map(Record::Appendix));
    }
    if want(Suite::Jump) {
        for p in &config.jump_params {
            records.push(match jump_check(p) {
                Ok(j) => Record::Jump(j),
                Err(e) => Record::Error { stage: format!("jump {p:?}"), message: e.to_string() },
            });
        }
    }
    if want(Suite::Blowup) {
        for p in &config.blowup_params {
            records.push(match blowup_demo(p) {
                Ok(b) => Record::Blowup(b),
                Err(e) => Record::Error { stage: format!("blowup {p:?}"), message: e.to_string() },
            });
        }
    }
    Bundle { version: BUNDLE_VERSION.into(), config: config.clone(), records }
}
