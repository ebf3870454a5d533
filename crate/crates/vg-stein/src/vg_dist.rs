//! The variance-gamma law VG(r, θ, σ, μ): density, CDF, mode, moments, sampling.
//!
//! The density is
//!
//! p(x) = e^{β(x−μ)} (|x−μ| / (2√(θ²+σ²)))^ν K_ν(α|x−μ|) / (σ√π Γ(r/2))
//!
//! with ν = (r−1)/2, α = √(θ²+σ²)/σ², β = θ/σ², evaluated in log space from scaled
//! Bessel values. The CDF integrates one side of μ at a time, so the (integrable)
//! singularity at μ for r ≤ 1 only ever sits at a panel endpoint and is removed by a
//! power substitution.

use crate::bessel::{besselk_scaled, besselk_scaled_pair, ln_besselk_scaled};
use crate::error::{Error, Result};
use crate::exec;
use crate::quad::{breakpoints, integrate_accept, tail_cutoff, QuadOptions};
use crate::roots::brent;
use crate::special::{gamma, ln_gamma};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VGParams {
    pub r: f64,
    pub theta: f64,
    pub sigma: f64,
    pub mu: f64,
}

/// (ν, α, β, γ) = ((r−1)/2, √(θ²+σ²)/σ², θ/σ², β/α).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReparamVG {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CumulantVector {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa5: f64,
    pub kappa6: f64,
}

impl CumulantVector {
    pub fn to_array(&self) -> [f64; 6] {
        [self.kappa1, self.kappa2, self.kappa3, self.kappa4, self.kappa5, self.kappa6]
    }

    pub fn from_array(k: [f64; 6]) -> Self {
        Self { kappa1: k[0], kappa2: k[1], kappa3: k[2], kappa4: k[3], kappa5: k[4], kappa6: k[5] }
    }
}

impl VGParams {
    pub fn new(r: f64, theta: f64, sigma: f64, mu: f64) -> Result<Self> {
        let p = Self { r, theta, sigma, mu };
        p.validate()?;
        Ok(p)
    }

    /// VG_c(r, θ, σ) = VG(r, θ, σ, −rθ), the zero-mean member of the family.
    pub fn centered(r: f64, theta: f64, sigma: f64) -> Result<Self> {
        Self::new(r, theta, sigma, -r * theta)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.r, self.theta, self.sigma, self.mu].iter().all(|v| v.is_finite());
        if !finite || !(self.r > 0.0) || !(self.sigma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "need r > 0, sigma > 0 and finite values, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn reparam(&self) -> ReparamVG {
        let s2 = self.sigma * self.sigma;
        let alpha = (self.theta * self.theta + s2).sqrt() / s2;
        let beta = self.theta / s2;
        ReparamVG { nu: 0.5 * (self.r - 1.0), alpha, beta, gamma: beta / alpha }
    }

    /// √(θ²+σ²).
    pub fn root_scale(&self) -> f64 {
        self.theta.hypot(self.sigma)
    }

    /// σ²/√(θ²+σ²) = 1/α, the natural length scale around μ.
    pub fn length_scale(&self) -> f64 {
        self.sigma * self.sigma / self.root_scale()
    }

    /// Half-width of the exclusion band around μ for second and third derivatives.
    pub fn delta_sing(&self) -> f64 {
        1e-6 * self.length_scale()
    }

    /// Law of −Z: VG(r, −θ, σ, −μ).
    pub fn reflected(&self) -> Self {
        Self { theta: -self.theta, mu: -self.mu, ..*self }
    }
}

/// Density limit at μ for r > 1.
fn density_at_mu(p: &VGParams) -> f64 {
    let t = p.theta / p.sigma;
    gamma(0.5 * (p.r - 1.0)) / (2.0 * p.sigma * PI.sqrt() * gamma(0.5 * p.r))
        * (1.0 + t * t).powf(-0.5 * (p.r - 1.0))
}

/// ln(e^z K_ν(z)) from ln z, using the leading small-z form once z underflows.
fn ln_k_scaled_from_ln(nu: f64, ln_z: f64) -> f64 {
    if ln_z > -600.0 {
        ln_besselk_scaled(nu, ln_z.exp()).expect("z > 0")
    } else {
        let a = nu.abs();
        if a == 0.0 {
            (-ln_z).ln()
        } else {
            (a - 1.0) * 2f64.ln() + ln_gamma(a) - a * ln_z
        }
    }
}

/// A VG law with its density constants and tail cutoffs precomputed.
#[derive(Debug, Clone)]
pub struct VgLaw {
    pub params: VGParams,
    pub re: ReparamVG,
    ln_const: f64,
    ln_2s: f64,
    /// Offsets from μ beyond which each tail (left, right) holds < 1e−15.
    cut: [f64; 2],
}

const SIDE_OPTS: QuadOptions = QuadOptions { epsabs: 1e-14, epsrel: 1e-13, max_panels: 4000 };

impl VgLaw {
    pub fn new(params: VGParams) -> Result<Self> {
        params.validate()?;
        let re = params.reparam();
        let ln_const = -(params.sigma * PI.sqrt()).ln() - ln_gamma(0.5 * params.r);
        let ln_2s = (2.0 * params.root_scale()).ln();
        let cut = [
            Self::tail_cut(&params, &re, re.alpha + re.beta)?,
            Self::tail_cut(&params, &re, re.alpha - re.beta)?,
        ];
        Ok(Self { params, re, ln_const, ln_2s, cut })
    }

    fn tail_cut(p: &VGParams, re: &ReparamVG, lambda: f64) -> Result<f64> {
        // asymptotic envelope of the density, with a factor-2 margin on its constant
        let ln_c = 2f64.ln() - 0.5 * p.r * 2f64.ln() - 0.25 * p.r * (p.root_scale().powi(2)).ln()
            - ln_gamma(0.5 * p.r);
        let t0 = (re.nu * re.nu + 2.0) / re.alpha;
        tail_cutoff(ln_c, 0.5 * p.r - 1.0, lambda, t0, 1e-15)
    }

    /// Tail cutoff offsets (left, right).
    pub fn cutoffs(&self) -> (f64, f64) {
        (self.cut[0], self.cut[1])
    }

    /// ln p(μ + sign·y) for y = e^{ln_y} > 0.
    pub fn ln_pdf_offset(&self, sign: f64, ln_y: f64) -> f64 {
        let y = ln_y.exp();
        let ReparamVG { nu, alpha, beta, .. } = self.re;
        self.ln_const + sign * beta * y + nu * (ln_y - self.ln_2s)
            + ln_k_scaled_from_ln(nu, alpha.ln() + ln_y)
            - alpha * y
    }

    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        let y = x - self.params.mu;
        if y == 0.0 {
            return if self.params.r > 1.0 {
                Ok(density_at_mu(&self.params).ln())
            } else {
                Err(Error::SingularAtMu(self.params.r))
            };
        }
        Ok(self.ln_pdf_offset(y.signum(), y.abs().ln()))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.log_pdf(x)?.exp())
    }

    pub(crate) fn substitution_power(&self) -> f64 {
        let r = self.params.r;
        if r < 1.0 {
            1.0 / r
        } else if r < 2.0 {
            2.0
        } else {
            1.0
        }
    }

    /// ∫_a^b p(μ + sign·y) dy for 0 ≤ a ≤ b (b may be +∞), with its error estimate.
    pub fn side_integral(&self, sign: f64, a: f64, b: f64) -> Result<(f64, f64)> {
        self.side_weighted(sign, a, b, &|_| 1.0, &[], None, SIDE_OPTS, 1e-12)
    }

    /// ∫_a^b w(y) p(μ + sign·y) dy, split at `kinks` (offsets from μ) and, for
    /// oscillating weights, on a grid of spacing `period`.
    #[allow(clippy::too_many_arguments)]
    pub fn side_weighted<W: Fn(f64) -> f64>(
        &self,
        sign: f64,
        a: f64,
        b: f64,
        w: &W,
        kinks: &[f64],
        period: Option<f64>,
        target: QuadOptions,
        accept_abs: f64,
    ) -> Result<(f64, f64)> {
        let side = if sign < 0.0 { 0 } else { 1 };
        let b = b.min(self.cut[side]);
        if !(a < b) {
            return Ok((0.0, 0.0));
        }
        let y0 = 1.0 / self.re.alpha;
        let q = self.substitution_power();
        let mut value = 0.0;
        let mut err = 0.0;
        let mut lo = a;
        if a < y0 && q != 1.0 {
            let hi = b.min(y0);
            let ln_q = q.ln();
            let f = |s: f64| {
                let ln_s = s.ln();
                let y = (q * ln_s).exp();
                (self.ln_pdf_offset(sign, q * ln_s) + ln_q + (q - 1.0) * ln_s).exp() * w(y)
            };
            let mapped: Vec<f64> = kinks.iter().map(|k| k.powf(1.0 / q)).collect();
            let pts = breakpoints(a.powf(1.0 / q), hi.powf(1.0 / q), &mapped, None, 0);
            let r = integrate_accept(f, &pts, target, accept_abs, 1e-10)?;
            value += r.value;
            err += r.abserr;
            lo = hi;
        }
        if lo < b {
            let mut cands = kinks.to_vec();
            let mut t = y0.max(lo) * 4.0;
            while t < b {
                cands.push(t);
                t *= 4.0;
            }
            let pts = breakpoints(lo, b, &cands, period, 1 << 20);
            let f = |y: f64| self.ln_pdf_offset(sign, y.ln()).exp() * w(y);
            let opts = QuadOptions { max_panels: target.max_panels.max(4 * pts.len()), ..target };
            let r = integrate_accept(f, &pts, opts, accept_abs, 1e-10)?;
            value += r.value;
            err += r.abserr;
        }
        Ok((value, err))
    }

    /// P(Z ≤ z).
    pub fn cdf(&self, z: f64) -> Result<f64> {
        let y = z - self.params.mu;
        let v = if y <= 0.0 {
            self.side_integral(-1.0, -y, f64::INFINITY)?.0
        } else {
            1.0 - self.side_integral(1.0, y, f64::INFINITY)?.0
        };
        Ok(v.clamp(0.0, 1.0))
    }

    /// Total mass (left, right) of the numerically integrated density.
    pub fn masses(&self) -> Result<(f64, f64)> {
        Ok((
            self.side_integral(-1.0, 0.0, f64::INFINITY)?.0,
            self.side_integral(1.0, 0.0, f64::INFINITY)?.0,
        ))
    }
}

pub fn pdf(p: &VGParams, x: f64) -> Result<f64> {
    VgLaw::new(*p)?.pdf(x)
}

pub fn log_pdf(p: &VGParams, x: f64) -> Result<f64> {
    VgLaw::new(*p)?.log_pdf(x)
}

pub fn cdf(p: &VGParams, z: f64) -> Result<f64> {
    VgLaw::new(*p)?.cdf(z)
}

/// Offset x* > 0 of the mode from μ when r > 2 and θ ≠ 0, with the bracket used.
pub fn mode_offset(p: &VGParams) -> Result<(f64, (f64, f64))> {
    let re = p.reparam();
    let at = p.theta.abs();
    let hi = at * (p.r - 2.0);
    let lo = if p.r > 3.0 { at * (p.r - 3.0) } else { 1e-12 * hi };
    let g = |x: f64| {
        let (k_lower, k) = besselk_scaled_pair(re.nu - 1.0, re.alpha * x).expect("x > 0");
        k_lower / k - re.gamma.abs()
    };
    let x = brent(g, lo, hi, 1e-15 * hi, 4.0 * f64::EPSILON, 300)?;
    Ok((x, (lo, hi)))
}

/// The mode: μ when r ≤ 2 or θ = 0, else μ + sgn(θ)x*.
pub fn mode(p: &VGParams) -> Result<f64> {
    p.validate()?;
    if p.r <= 2.0 || p.theta == 0.0 {
        return Ok(p.mu);
    }
    let (x, _) = mode_offset(p)?;
    Ok(p.mu + p.theta.signum() * x)
}

/// Sup-norm certificate for the density (exact for 1 < r ≤ 2).
pub fn density_sup_bound(p: &VGParams) -> Result<f64> {
    p.validate()?;
    let r = p.r;
    if r <= 1.0 {
        return Err(Error::Unbounded(r));
    }
    if r <= 2.0 {
        return Ok(density_at_mu(p));
    }
    let s2 = p.sigma * p.sigma;
    let t2 = p.theta * p.theta;
    let growth = (t2 * (r - 2.0) / s2).exp();
    let b25 = gamma(0.5 * (r - 1.0)) / (2.0 * p.sigma * PI.sqrt() * gamma(0.5 * r))
        * (s2 / (t2 + s2)).powf(0.5 * (r - 1.0))
        * growth;
    if r > 3.0 && p.theta != 0.0 {
        let nu = 0.5 * (r - 1.0);
        let at = p.theta.abs();
        let z = at * p.root_scale() * (r - 3.0) / s2;
        let k = besselk_scaled(nu, z)? * (-z).exp();
        let b26 = growth / (p.sigma * PI.sqrt() * gamma(0.5 * r))
            * (at * (r - 3.0) / (2.0 * p.root_scale())).powf(nu)
            * k;
        return Ok(b25.min(b26));
    }
    Ok(b25)
}

/// (E Z, Var Z) = (μ + rθ, r(σ² + 2θ²)).
pub fn mean_variance(p: &VGParams) -> (f64, f64) {
    (p.mu + p.r * p.theta, p.r * (p.sigma * p.sigma + 2.0 * p.theta * p.theta))
}

/// Cumulants κ1..κ6 of the centred law VG_c(r, θ, σ) (μ is ignored; κ1 = 0).
pub fn cumulants_centered(p: &VGParams) -> CumulantVector {
    let (r, t, s) = (p.r, p.theta, p.sigma);
    let (t2, s2) = (t * t, s * s);
    CumulantVector {
        kappa1: 0.0,
        kappa2: r * (s2 + 2.0 * t2),
        kappa3: 2.0 * r * t * (3.0 * s2 + 4.0 * t2),
        kappa4: 6.0 * r * (s2 * s2 + 8.0 * s2 * t2 + 8.0 * t2 * t2),
        kappa5: 24.0 * r * t * (5.0 * s2 * s2 + 20.0 * s2 * t2 + 16.0 * t2 * t2),
        kappa6: 120.0 * r * (s2 + 2.0 * t2) * (s2 * s2 + 16.0 * s2 * t2 + 16.0 * t2 * t2),
    }
}

/// Upper bound on E|Z − μ|: √(r(σ²+2θ²) + r²θ²).
pub fn abs_moment_bound(p: &VGParams) -> f64 {
    let (r, t, s) = (p.r, p.theta, p.sigma);
    (r * (s * s + 2.0 * t * t) + r * r * t * t).sqrt()
}

/// Large-|x| density asymptote |x|^{r/2−1} e^{β(x−μ) − α|x−μ|} / (2^{r/2}(θ²+σ²)^{r/4}Γ(r/2)).
pub fn tail_asymptote(p: &VGParams, x: f64) -> f64 {
    let re = p.reparam();
    let y = x - p.mu;
    let ln = (0.5 * p.r - 1.0) * x.abs().ln() + re.beta * y - re.alpha * y.abs()
        - 0.5 * p.r * 2f64.ln()
        - 0.25 * p.r * p.root_scale().powi(2).ln()
        - ln_gamma(0.5 * p.r);
    ln.exp()
}

/// Draws per independently seeded block in [`sample`].
pub const SAMPLE_BLOCK: usize = 1 << 16;

fn sample_block(p: &VGParams, seed: u64, block: usize, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    let mix = Gamma::new(0.5 * p.r, 2.0).expect("r > 0");
    (0..len)
        .map(|_| {
            let v: f64 = mix.sample(&mut rng);
            let n: f64 = StandardNormal.sample(&mut rng);
            p.mu + p.theta * v + p.sigma * v.sqrt() * n
        })
        .collect()
}

/// n i.i.d. draws of Z = μ + θV + σ√V·N with V ~ χ²_r and N ~ N(0, 1).
///
/// Draws are generated in blocks of [`SAMPLE_BLOCK`], block b using stream b of a
/// ChaCha8 generator seeded with `seed`, so the output depends only on (p, n, seed)
/// and not on the thread count.
pub fn sample(p: &VGParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    p.validate()?;
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let parts = exec::map_range(blocks, |b| {
        let len = SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK);
        sample_block(p, seed, b, len)
    });
    Ok(parts.concat())
}

/// Sequential twin of [`sample`] (identical output).
pub fn sample_seq(p: &VGParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    p.validate()?;
    let blocks = n.div_ceil(SAMPLE_BLOCK);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .map(|b| sample_block(p, seed, b, SAMPLE_BLOCK.min(n - b * SAMPLE_BLOCK)))
        .collect();
    Ok(parts.concat())
}
