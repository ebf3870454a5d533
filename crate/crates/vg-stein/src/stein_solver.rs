//! The bounded solution of the VG Stein equation
//!
//! σ²(x−μ)f″ + (σ²r + 2θ(x−μ))f′ + (rθ − (x−μ))f = h(x) − E h(Z)
//!
//! and its first three derivatives.
//!
//! With y = x − μ > 0 the solution is
//!
//! f = −(e^{−βy}K_ν(αy)/(σ²y^ν)) ∫_0^y e^{βt}t^ν I_ν(αt) h̃ dt − (e^{−βy}I_ν(αy)/(σ²y^ν)) ∫_y^∞ e^{βt}t^ν K_ν(αt) h̃ dt.
//!
//! Both integrals are carried in scaled form: the prefactor exponentials are folded
//! into the integrands, which become
//!
//! J₁ = ∫_0^y e^{−(α+β)(y−t)} (t/y)^ν Ĩ_ν(αt) h̃ dt,  J₂ = ∫_y^∞ e^{−(α−β)(t−y)} (t/y)^ν K̃_ν(αt) h̃ dt
//!
//! with Ĩ = e^{−x}I, K̃ = e^{x}K, so f = −(K̃_ν(αy)J₁ + Ĩ_ν(αy)J₂)/σ² never overflows.
//! Points left of μ use the reflection f(μ − y) = −g(y), where g solves the
//! problem for θ → −θ and h(μ − ·).

use crate::bessel::{besseli_scaled, besselk_scaled, besselk_scaled_pair, ln_besseli_scaled, ln_besselk_scaled};
use crate::error::{Error, Result};
use crate::quad::{breakpoints, integrate_accept, tail_cutoff, QuadOptions};
use crate::special::ln_gamma;
use crate::vg_dist::{mean_variance, VGParams, VgLaw};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A user-supplied test function with whatever norm information is known.
#[derive(Clone)]
pub struct CustomFn {
    pub h: RealFn,
    pub dh: Option<RealFn>,
    /// ‖h‖
    pub sup_h: Option<f64>,
    /// ‖h′‖
    pub lip_h: Option<f64>,
    /// Points where h or h′ is not smooth; quadrature panels are split there.
    pub kinks: Vec<f64>,
}

#[derive(Clone)]
pub enum TestFunction {
    /// h = 1{x ≤ z}
    Indicator(f64),
    /// h = sin(ax)/a
    ScaledSine(f64),
    /// h = x
    Identity,
    /// h = x²
    Square,
    Custom(CustomFn),
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl TestFunction {
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(h: F) -> Self {
        Self::Custom(CustomFn { h: Arc::new(h), dh: None, sup_h: None, lip_h: None, kinks: vec![] })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Indicator(z) => format!("indicator({z})"),
            Self::ScaledSine(a) => format!("scaled_sine({a})"),
            Self::Identity => "identity".into(),
            Self::Square => "square".into(),
            Self::Custom(_) => "custom".into(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Indicator(z) => {
                if x <= *z {
                    1.0
                } else {
                    0.0
                }
            }
            Self::ScaledSine(a) => (a * x).sin() / a,
            Self::Identity => x,
            Self::Square => x * x,
            Self::Custom(c) => (c.h)(x),
        }
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        match self {
            Self::Indicator(z) if x == *z => {
                Err(Error::NotDifferentiable(format!("indicator jumps at {z}")))
            }
            Self::Indicator(_) => Ok(0.0),
            Self::ScaledSine(a) => Ok((a * x).cos()),
            Self::Identity => Ok(1.0),
            Self::Square => Ok(2.0 * x),
            Self::Custom(c) => c
                .dh
                .as_ref()
                .map(|d| d(x))
                .ok_or_else(|| Error::NotDifferentiable("custom test function has no derivative".into())),
        }
    }

    /// ‖h‖, when finite and known.
    pub fn sup_norm(&self) -> Option<f64> {
        match self {
            Self::Indicator(_) => Some(1.0),
            Self::ScaledSine(a) => Some(1.0 / a),
            Self::Identity | Self::Square => None,
            Self::Custom(c) => c.sup_h,
        }
    }

    /// ‖h′‖, when finite and known.
    pub fn lip(&self) -> Option<f64> {
        match self {
            Self::Indicator(_) | Self::Square => None,
            Self::ScaledSine(_) | Self::Identity => Some(1.0),
            Self::Custom(c) => c.lip_h,
        }
    }

    /// ‖h″‖, when finite and known.
    pub fn second_sup(&self) -> Option<f64> {
        match self {
            Self::ScaledSine(a) => Some(*a),
            Self::Identity => Some(0.0),
            Self::Square => Some(2.0),
            _ => None,
        }
    }

    pub fn kinks(&self) -> Vec<f64> {
        match self {
            Self::Indicator(z) => vec![*z],
            Self::Custom(c) => c.kinks.clone(),
            _ => vec![],
        }
    }

    /// Panel spacing for oscillating test functions.
    fn panel_spacing(&self) -> Option<f64> {
        match self {
            Self::ScaledSine(a) if *a > 1.0 => Some(2.0 * PI / a),
            _ => None,
        }
    }

    /// (c₀, c₁, c₂) with |h(μ ± t)| ≤ c₀ + c₁t + c₂t² for t ≥ 0.
    fn growth(&self, mu: f64) -> Option<[f64; 3]> {
        match self {
            Self::Indicator(_) => Some([1.0, 0.0, 0.0]),
            Self::ScaledSine(a) => Some([1.0 / a, 0.0, 0.0]),
            Self::Identity => Some([mu.abs(), 1.0, 0.0]),
            Self::Square => Some([mu * mu, 2.0 * mu.abs(), 1.0]),
            Self::Custom(c) => match (c.sup_h, c.lip_h) {
                (Some(s), _) => Some([s, 0.0, 0.0]),
                (None, Some(l)) => Some([(c.h)(mu).abs(), l, 0.0]),
                _ => None,
            },
        }
    }
}

/// E h(Z) using a prebuilt law.
pub fn expectation_law(law: &VgLaw, tf: &TestFunction) -> Result<f64> {
    let p = &law.params;
    match tf {
        TestFunction::Indicator(z) => law.cdf(*z),
        TestFunction::Identity => Ok(mean_variance(p).0),
        TestFunction::Square => {
            let (m, v) = mean_variance(p);
            Ok(v + m * m)
        }
        _ => {
            let scale = tf.sup_norm().unwrap_or(1.0);
            let target = QuadOptions { epsabs: 1e-15 * scale, epsrel: 1e-13, max_panels: 4000 };
            let mut total = 0.0;
            for sign in [-1.0, 1.0] {
                let kinks: Vec<f64> =
                    tf.kinks().iter().map(|z| sign * (z - p.mu)).filter(|t| *t > 0.0).collect();
                let w = |y: f64| tf.eval(p.mu + sign * y);
                total += law
                    .side_weighted(sign, 0.0, f64::INFINITY, &w, &kinks, tf.panel_spacing(), target, 1e-11 * scale)?
                    .0;
            }
            Ok(total)
        }
    }
}

/// E h(Z) for Z ~ VG(r, θ, σ, μ).
pub fn expectation(p: &VGParams, tf: &TestFunction) -> Result<f64> {
    expectation_law(&VgLaw::new(*p)?, tf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteinEval {
    pub x: f64,
    pub f: f64,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub f3: Option<f64>,
    /// Error estimate of the quadrature-based values, propagated through the prefactors.
    pub err_est: f64,
}

/// Scaled-form ingredients of the solution at one point, on the reflected side if y < 0.
#[derive(Debug, Clone, Copy)]
struct Parts {
    sign: f64,
    y: f64,
    beta: f64,
    j1: f64,
    e1: f64,
    j2: f64,
    e2: f64,
    ks: f64,
    ks1: f64,
    is: f64,
    is1: f64,
}

/// Solver for one (law, test function) pair, with E h(Z) cached.
#[derive(Clone)]
pub struct SteinSolver {
    pub law: VgLaw,
    pub tf: TestFunction,
    pub eh: f64,
    growth: Option<[f64; 3]>,
}

impl fmt::Debug for SteinSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SteinSolver")
            .field("params", &self.law.params)
            .field("tf", &self.tf)
            .field("eh", &self.eh)
            .finish()
    }
}

impl SteinSolver {
    pub fn new(p: VGParams, tf: TestFunction) -> Result<Self> {
        let law = VgLaw::new(p)?;
        let eh = expectation_law(&law, &tf)?;
        let growth = tf.growth(p.mu);
        Ok(Self { law, tf, eh, growth })
    }

    pub fn params(&self) -> &VGParams {
        &self.law.params
    }

    /// h̃(x) = h(x) − E h(Z).
    pub fn h_tilde(&self, x: f64) -> f64 {
        self.tf.eval(x) - self.eh
    }

    /// Scale of |h̃| on [0, t] away from μ, used to set absolute tolerances.
    fn h_scale(&self, t: f64) -> f64 {
        match self.growth {
            Some([c0, c1, c2]) => {
                let t = t.max(1.0);
                c0 + self.eh.abs() + c1 * t + c2 * t * t
            }
            None => 1.0 + self.eh.abs(),
        }
    }

    fn check_band(&self, x: f64) -> Result<()> {
        let band = self.params().delta_sing();
        let dist = (x - self.params().mu).abs();
        if dist < band {
            return Err(Error::TooCloseToSingularity { dist, band });
        }
        Ok(())
    }

    /// ∫_lo^hi exp(ln_w(ln t, t)) h̃(μ + hsign·t) dt, with the power substitution at
    /// t = 0 when `lo == 0`.
    #[allow(clippy::too_many_arguments)]
    fn integrate_side<L: Fn(f64, f64) -> f64>(
        &self,
        lo: f64,
        hi: f64,
        ln_w: L,
        hsign: f64,
        extra: &[f64],
        hs: f64,
    ) -> Result<(f64, f64)> {
        if !(lo < hi) {
            return Ok((0.0, 0.0));
        }
        let mu = self.params().mu;
        let y0 = 1.0 / self.law.re.alpha;
        let len = hi - lo;
        let target = QuadOptions { epsabs: 1e-16 * hs * y0.min(len), epsrel: 1e-13, max_panels: 4000 };
        let accept = 1e-11 * hs * y0.min(len);
        let mut kinks: Vec<f64> = self
            .tf
            .kinks()
            .iter()
            .map(|z| hsign * (z - mu))
            .filter(|t| *t > 0.0)
            .collect();
        kinks.extend_from_slice(extra);
        let q = self.law.substitution_power();
        let mut value = 0.0;
        let mut err = 0.0;
        let mut start = lo;
        if lo == 0.0 && q != 1.0 {
            let top = hi.min(y0);
            let ln_q = q.ln();
            let f = |s: f64| {
                let ln_s = s.ln();
                let ln_t = q * ln_s;
                let t = ln_t.exp();
                (ln_w(ln_t, t) + ln_q + (q - 1.0) * ln_s).exp() * (self.tf.eval(mu + hsign * t) - self.eh)
            };
            let mapped: Vec<f64> = kinks.iter().map(|k| k.powf(1.0 / q)).collect();
            let pts = breakpoints(0.0, top.powf(1.0 / q), &mapped, None, 0);
            let r = integrate_accept(f, &pts, target, accept, 1e-10)?;
            value += r.value;
            err += r.abserr;
            start = top;
        }
        if start < hi {
            let f = |t: f64| ln_w(t.ln(), t).exp() * (self.tf.eval(mu + hsign * t) - self.eh);
            let pts = breakpoints(start, hi, &kinks, self.tf.panel_spacing(), 1 << 20);
            let opts = QuadOptions { max_panels: target.max_panels.max(4 * pts.len()), ..target };
            let r = integrate_accept(f, &pts, opts, accept, 1e-10)?;
            value += r.value;
            err += r.abserr;
        }
        Ok((value, err))
    }

    /// Geometric breakpoints ×4 from `from` up to (not past) `to`.
    fn geometric(from: f64, to: f64) -> Vec<f64> {
        let mut v = vec![];
        let mut t = from * 4.0;
        while t < to && v.len() < 2000 {
            v.push(t);
            t *= 4.0;
        }
        v
    }

    /// Upper truncation point of J₂ for offset y (y = 0 drops the y^{−ν} factor).
    fn j2_cutoff(&self, y: f64, lambda: f64, tol: f64) -> Result<f64> {
        let [c0, c1, c2] = self
            .growth
            .ok_or_else(|| Error::DivergentTail("no sup or Lipschitz bound for the test function".into()))?;
        let nu = self.law.re.nu;
        let alpha = self.law.re.alpha;
        let degree = if c2 > 0.0 { 2.0 } else if c1 > 0.0 { 1.0 } else { 0.0 };
        let t0 = y.max(1.0).max((nu * nu + 2.0) / alpha);
        // K̃_ν is decreasing, and (c₀ + |Eh|) + c₁t + c₂t² ≤ (Σc)·t^degree for t ≥ 1
        let ln_c = (c0 + self.eh.abs() + c1 + c2).max(1e-300).ln() + ln_besselk_scaled(nu, alpha * t0)?
            - if y > 0.0 { nu * y.ln() } else { 0.0 }
            + lambda * y;
        tail_cutoff(ln_c, nu + degree, lambda, t0, tol)
    }

    /// J₁ and J₂ for offset y ≥ 0 on side `sign` (y = 0: J₂ without the y^{−ν} factor).
    fn j_integrals(&self, sign: f64, y: f64) -> Result<(f64, f64, f64, f64)> {
        let re = self.law.re;
        let (nu, alpha) = (re.nu, re.alpha);
        let beta = sign * re.beta;
        let y0 = 1.0 / alpha;
        let hs = self.h_scale(y);
        let ln_y = if y > 0.0 { y.ln() } else { 0.0 };

        let (j1, e1) = if y > 0.0 {
            let l1 = alpha + beta;
            let mut extra = Self::geometric(y0, y);
            extra.extend([1.0, 4.0, 16.0, 64.0, 256.0].iter().map(|m| y - m / l1).filter(|t| *t > 0.0));
            let w = |ln_t: f64, t: f64| {
                -l1 * (y - t) + nu * (ln_t - ln_y) + ln_besseli_scaled(nu, alpha * t).expect("t > 0")
            };
            self.integrate_side(0.0, y, w, sign, &extra, hs)?
        } else {
            (0.0, 0.0)
        };

        let l2 = alpha - beta;
        let tol = 1e-17 * hs * y0;
        let top = self.j2_cutoff(y, l2, tol)?;
        let mut extra = if y > 0.0 { Self::geometric(y, y0) } else { vec![] };
        extra.extend(Self::geometric(y0.max(y), top));
        extra.extend([0.25, 1.0, 4.0, 16.0, 64.0].iter().map(|m| y + m / l2));
        let w = |ln_t: f64, t: f64| {
            -l2 * (t - y) + nu * (ln_t - ln_y) + ln_besselk_scaled(nu, alpha * t).expect("t > 0")
        };
        let (j2, e2) = self.integrate_side(y, top, w, sign, &extra, self.h_scale(top))?;
        Ok((j1, e1, j2, e2))
    }

    fn parts(&self, x: f64) -> Result<Parts> {
        let yy = x - self.params().mu;
        let sign = if yy < 0.0 { -1.0 } else { 1.0 };
        let y = yy.abs();
        let re = self.law.re;
        let (j1, e1, j2, e2) = self.j_integrals(sign, y)?;
        let z = re.alpha * y;
        let (ks, ks1) = besselk_scaled_pair(re.nu, z)?;
        Ok(Parts {
            sign,
            y,
            beta: sign * re.beta,
            j1,
            e1,
            j2,
            e2,
            ks,
            ks1,
            is: besseli_scaled(re.nu, z)?,
            is1: besseli_scaled(re.nu + 1.0, z)?,
        })
    }

    /// f at μ, from the small-argument limit of the I-prefactor: (α/2)^ν/Γ(ν+1) · J₂(0).
    fn f_at_mu(&self) -> Result<SteinEval> {
        let re = self.law.re;
        let s2 = self.params().sigma.powi(2);
        let (_, _, j2, e2) = self.j_integrals(1.0, 0.0)?;
        let c = (re.nu * (0.5 * re.alpha).ln() - ln_gamma(re.nu + 1.0)).exp();
        Ok(SteinEval { x: self.params().mu, f: -c * j2 / s2, f1: None, f2: None, f3: None, err_est: c * e2 / s2 })
    }

    /// f(x).
    pub fn solve(&self, x: f64) -> Result<SteinEval> {
        if x == self.params().mu {
            return self.f_at_mu();
        }
        let p = self.parts(x)?;
        let s2 = self.params().sigma.powi(2);
        let g = -(p.ks * p.j1 + p.is * p.j2) / s2;
        let err = (p.ks * p.e1 + p.is * p.e2) / s2;
        Ok(SteinEval { x, f: p.sign * g, f1: None, f2: None, f3: None, err_est: err })
    }

    fn first(&self, p: &Parts) -> (f64, f64, f64, f64) {
        let s2 = self.params().sigma.powi(2);
        let a = self.law.re.alpha;
        let g = -(p.ks * p.j1 + p.is * p.j2) / s2;
        let dk = p.beta * p.ks + a * p.ks1;
        let di = a * p.is1 - p.beta * p.is;
        let g1 = (dk * p.j1 - di * p.j2) / s2;
        let err = (p.ks * p.e1 + p.is * p.e2).max(dk.abs() * p.e1 + di.abs() * p.e2) / s2;
        (p.sign * g, g1, err, g)
    }

    /// f(x) and f′(x) from the differentiated prefactors.
    pub fn solve_derivative(&self, x: f64) -> Result<SteinEval> {
        if x == self.params().mu {
            return Err(Error::TooCloseToSingularity { dist: 0.0, band: self.params().delta_sing() });
        }
        let p = self.parts(x)?;
        let (f, f1, err, _) = self.first(&p);
        Ok(SteinEval { x, f, f1: Some(f1), f2: None, f3: None, err_est: err })
    }

    fn second_from(&self, x: f64, f: f64, f1: f64) -> f64 {
        let VGParams { r, theta, sigma, mu } = *self.params();
        let y = x - mu;
        let s2 = sigma * sigma;
        (self.h_tilde(x) - (s2 * r + 2.0 * theta * y) * f1 - (r * theta - y) * f) / (s2 * y)
    }

    /// f, f′ and f″, the last by rearranging the Stein equation.
    pub fn solve_second(&self, x: f64) -> Result<SteinEval> {
        self.check_band(x)?;
        let mut e = self.solve_derivative(x)?;
        let f2 = self.second_from(x, e.f, e.f1.unwrap());
        let y = (x - self.params().mu).abs();
        let sigma = self.params().sigma;
        e.err_est *= 1.0 + (sigma * sigma * self.params().r + 2.0 * self.params().theta.abs() * y + 1.0 + y)
            / (sigma * sigma * y);
        e.f2 = Some(f2);
        Ok(e)
    }

    /// f, …, f‴, the last by rearranging the differentiated Stein equation
    ///
    /// σ²y f‴ = h′ + f − ((r+2)θ − y) f′ − (σ²(r+1) + 2θy) f″.
    pub fn solve_third(&self, x: f64) -> Result<SteinEval> {
        let dh = self.tf.deriv(x)?;
        let mut e = self.solve_second(x)?;
        let VGParams { r, theta, sigma, mu } = *self.params();
        let y = x - mu;
        let s2 = sigma * sigma;
        let (f, f1, f2) = (e.f, e.f1.unwrap(), e.f2.unwrap());
        let f3 = (dh + f - ((r + 2.0) * theta - y) * f1 - (s2 * (r + 1.0) + 2.0 * theta * y) * f2) / (s2 * y);
        e.err_est *= 1.0 + (s2 * (r + 1.0) + 2.0 * theta.abs() * y.abs() + 1.0 + (r + 2.0) * theta.abs() + y.abs())
            / (s2 * y.abs());
        e.f3 = Some(f3);
        Ok(e)
    }

    /// f″ straight from the twice-differentiated integral representation:
    ///
    /// g″ = −[((α²+β²)K̃_ν + (2αβ + (2ν+1)α/y)K̃_{ν+1})J₁ + ((α²+β²)Ĩ_ν − (2αβ + (2ν+1)α/y)Ĩ_{ν+1})J₂]/σ² + h̃/(σ²y),
    ///
    /// the α-general form of the α = 1 display. Returns (f, f′, f″, err).
    pub fn second_direct(&self, x: f64) -> Result<(f64, f64, f64, f64)> {
        self.check_band(x)?;
        let p = self.parts(x)?;
        let (f, f1, err, _) = self.first(&p);
        let re = self.law.re;
        let s2 = self.params().sigma.powi(2);
        let a = re.alpha;
        let ab = a * a + p.beta * p.beta;
        let c = 2.0 * a * p.beta + (2.0 * re.nu + 1.0) * a / p.y;
        let pk = ab * p.ks + c * p.ks1;
        let pi = ab * p.is - c * p.is1;
        let g2 = -(pk * p.j1 + pi * p.j2) / s2 + self.h_tilde(x) / (s2 * p.y);
        let err2 = (pk.abs() * p.e1 + pi.abs() * p.e2) / s2;
        Ok((f, f1, p.sign * g2, err.max(err2)))
    }

    /// L f(x) − h̃(x) with f, f′ and f″ all from quadrature.
    pub fn residual(&self, x: f64) -> Result<f64> {
        let (f, f1, f2, _) = self.second_direct(x)?;
        let VGParams { r, theta, sigma, mu } = *self.params();
        let y = x - mu;
        let s2 = sigma * sigma;
        Ok(s2 * y * f2 + (s2 * r + 2.0 * theta * y) * f1 + (r * theta - y) * f - self.h_tilde(x))
    }

    /// f(x) from the alternative representation with ∫_{−∞}^{y} in place of −∫_y^∞.
    ///
    /// The two agree because the K-kernel is the unnormalised density and E h̃ = 0.
    /// This form carries a factor e^{(α∓β)|y|}, so it is only usable within a few
    /// length scales 1/α of μ; it serves as a cross-check there.
    pub fn solve_alt(&self, x: f64) -> Result<SteinEval> {
        let mu = self.params().mu;
        let yy = x - mu;
        if yy == 0.0 {
            return self.solve(x);
        }
        let sign = if yy < 0.0 { -1.0 } else { 1.0 };
        let y = yy.abs();
        let re = self.law.re;
        let (nu, alpha) = (re.nu, re.alpha);
        let beta = sign * re.beta;
        let s2 = self.params().sigma.powi(2);
        let hs = self.h_scale(y);
        let ln_y = y.ln();
        let (j1, e1, _, _) = self.j_integrals(sign, y)?;
        // ∫_0^y e^{(α−β)(y−t)}(t/y)^ν K̃_ν(αt) h̃ dt
        let l2 = alpha - beta;
        let w_in = |ln_t: f64, t: f64| {
            l2 * (y - t) + nu * (ln_t - ln_y) + ln_besselk_scaled(nu, alpha * t).expect("t > 0")
        };
        let (a_in, ea) = self.integrate_side(0.0, y, w_in, sign, &[], hs)?;
        // e^{(α−β)y} ∫_0^∞ e^{−(α+β)u}(u/y)^ν K̃_ν(αu) h̃(μ − sign·u) du
        let l1 = alpha + beta;
        let top = self.j2_cutoff(y, l1, 1e-17 * hs / alpha)?;
        let w_out = |ln_u: f64, u: f64| {
            l2 * y - l1 * u + nu * (ln_u - ln_y) + ln_besselk_scaled(nu, alpha * u).expect("u > 0")
        };
        let extra = Self::geometric(1.0 / alpha, top);
        let (b_out, eb) = self.integrate_side(0.0, top, w_out, -sign, &extra, self.h_scale(top))?;
        let z = alpha * y;
        let ks = besselk_scaled(nu, z)?;
        let is = besseli_scaled(nu, z)?;
        let g = -(ks * j1 - is * (a_in + b_out)) / s2;
        Ok(SteinEval {
            x,
            f: sign * g,
            f1: None,
            f2: None,
            f3: None,
            err_est: (ks * e1 + is * (ea + eb)) / s2,
        })
    }
}

pub fn solve(p: &VGParams, tf: &TestFunction, x: f64) -> Result<SteinEval> {
    SteinSolver::new(*p, tf.clone())?.solve(x)
}

pub fn solve_derivative(p: &VGParams, tf: &TestFunction, x: f64) -> Result<SteinEval> {
    SteinSolver::new(*p, tf.clone())?.solve_derivative(x)
}

pub fn solve_second(p: &VGParams, tf: &TestFunction, x: f64) -> Result<SteinEval> {
    SteinSolver::new(*p, tf.clone())?.solve_second(x)
}

pub fn solve_third(p: &VGParams, tf: &TestFunction, x: f64) -> Result<SteinEval> {
    SteinSolver::new(*p, tf.clone())?.solve_third(x)
}

pub fn residual(p: &VGParams, tf: &TestFunction, x: f64) -> Result<f64> {
    SteinSolver::new(*p, tf.clone())?.residual(x)
}
