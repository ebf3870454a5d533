//! Stein-factor constants and the right-hand sides of the uniform bounds on the
//! solution of the VG Stein equation, plus the Wasserstein → Kolmogorov conversion.
//!
//! A, B, C are indexed by (r, θ, σ); M, N by (ν, γ); D by (r, θ, σ). Piecewise
//! definitions are applied literally on their stated domains (no continuity at r = 2
//! is assumed).

use crate::error::{Error, Result};
use crate::special::{gamma, gamma_ratio};
use crate::vg_dist::{density_sup_bound, VGParams};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// θ²/σ².
fn skew2(p: &VGParams) -> f64 {
    let t = p.theta / p.sigma;
    t * t
}

fn a_at(r: f64, p: &VGParams) -> f64 {
    let q = 1.0 + skew2(p);
    if r >= 2.0 {
        2.0 * PI.sqrt() / (2.0 * r - 1.0).sqrt() * q.powf(0.5 * r)
    } else {
        12.0 * gamma(0.5 * r) * q
    }
}

fn b_at(r: f64, p: &VGParams) -> f64 {
    if r >= 2.0 {
        (PI * (r - 1.0) / 2.0).sqrt() * (1.0 + skew2(p)).powf(0.5 * r - 1.0)
    } else {
        2.0
    }
}

fn c_at(r: f64, p: &VGParams) -> f64 {
    let q = 1.0 + skew2(p);
    6.0 + 2.0 * 2f64.sqrt() / r.sqrt()
        + 2.0 * (2.0 * PI * (r + 1.0)).sqrt() * (p.theta.abs() / p.sigma) * q.powf(0.5 * (r - 1.0))
        + 2.0 * ((2.0 * r).sqrt() + r) * a_at(r, p)
}

/// 1 + 6/r + B_r: the factor shared by the weighted bounds.
fn weight_factor(r: f64, p: &VGParams) -> f64 {
    1.0 + 6.0 / r + b_at(r, p)
}

/// 1 + (2 + θ²/σ²) C_r: bounds ‖h′‖ + ‖f‖ + |θ|‖f′‖ in units of ‖h′‖.
fn lipschitz_lift(r: f64, p: &VGParams) -> f64 {
    1.0 + (2.0 + skew2(p)) * c_at(r, p)
}

pub fn const_a(p: &VGParams) -> f64 {
    a_at(p.r, p)
}

pub fn const_b(p: &VGParams) -> f64 {
    b_at(p.r, p)
}

pub fn const_c(p: &VGParams) -> f64 {
    c_at(p.r, p)
}

/// (M_{ν,γ}, N_{ν,γ}) for ν > −½, |γ| < 1.
pub fn const_m_n(nu: f64, gamma_: f64) -> Result<(f64, f64)> {
    if !(nu > -0.5) || !(gamma_.abs() < 1.0) {
        return Err(Error::Domain(format!("need nu > -1/2 and |gamma| < 1, got ({nu}, {gamma_})")));
    }
    if nu >= 0.5 {
        let w = (1.0 - gamma_ * gamma_).powf(nu + 0.5);
        let m = PI.sqrt() * gamma_ratio(nu + 0.5, nu + 1.0) / w;
        let n = PI.sqrt() * gamma_ratio(nu + 0.5, nu) / w;
        Ok((m, n))
    } else {
        let g = 1.0 - gamma_.abs();
        Ok((6.0 * gamma(nu + 0.5) / g, 1.0 / g))
    }
}

/// D = sup √(2p), the density certificate used for r > 1.
///
/// Exact for 1 < r ≤ 2 (the sup sits at μ); for r > 2 it is the exponential-growth
/// bound, sharpened by the Bessel bound when r > 3 and θ ≠ 0.
pub fn const_d(p: &VGParams) -> Result<f64> {
    if !(p.r > 1.0) {
        return Err(Error::Domain(format!("D needs r > 1, got r = {}", p.r)));
    }
    Ok((2.0 * density_sup_bound(p)?).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteinConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub m: f64,
    pub n: f64,
    /// Only defined for r > 1.
    pub d: Option<f64>,
}

impl SteinConstants {
    pub fn new(p: &VGParams) -> Result<Self> {
        p.validate()?;
        let re = p.reparam();
        let (m, n) = const_m_n(re.nu, re.gamma)?;
        let d = if p.r > 1.0 { Some(const_d(p)?) } else { None };
        Ok(Self { a: const_a(p), b: const_b(p), c: const_c(p), m, n, d })
    }
}

/// The three test-function norms the bounds are stated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    /// ‖h − E h(Z)‖
    HTilde,
    /// ‖h′‖
    H1,
    /// ‖h″‖
    H2,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::HTilde => "h_tilde",
            Norm::H1 => "h1",
            Norm::H2 => "h2",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HNorms {
    pub h_tilde: Option<f64>,
    pub h1: Option<f64>,
    pub h2: Option<f64>,
}

impl HNorms {
    fn get(&self, id: BoundId, n: Norm) -> Result<f64> {
        let v = match n {
            Norm::HTilde => self.h_tilde,
            Norm::H1 => self.h1,
            Norm::H2 => self.h2,
        };
        v.ok_or_else(|| Error::MissingNorm(id.as_str().to_string(), n.name()))
    }
}

/// Registered uniform bounds on the Stein solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundId {
    #[serde(rename = "DGV_F")]
    DgvF,
    #[serde(rename = "DGV_F1")]
    DgvF1,
    #[serde(rename = "T31_XF")]
    XF,
    #[serde(rename = "T31_XF1_K")]
    XF1K,
    #[serde(rename = "T31_XF2_K")]
    XF2K,
    #[serde(rename = "T31_F")]
    F,
    #[serde(rename = "T31_F1")]
    F1,
    #[serde(rename = "T31_F2")]
    F2,
    #[serde(rename = "T31_XF1_W")]
    XF1W,
    #[serde(rename = "T31_XF2_W")]
    XF2W,
    #[serde(rename = "T31_XF3_W")]
    XF3W,
    #[serde(rename = "C32_F3")]
    F3,
}

impl BoundId {
    pub const ALL: [BoundId; 12] = [
        BoundId::DgvF,
        BoundId::DgvF1,
        BoundId::XF,
        BoundId::XF1K,
        BoundId::XF2K,
        BoundId::F,
        BoundId::F1,
        BoundId::F2,
        BoundId::XF1W,
        BoundId::XF2W,
        BoundId::XF3W,
        BoundId::F3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::DgvF => "DGV_F",
            BoundId::DgvF1 => "DGV_F1",
            BoundId::XF => "T31_XF",
            BoundId::XF1K => "T31_XF1_K",
            BoundId::XF2K => "T31_XF2_K",
            BoundId::F => "T31_F",
            BoundId::F1 => "T31_F1",
            BoundId::F2 => "T31_F2",
            BoundId::XF1W => "T31_XF1_W",
            BoundId::XF2W => "T31_XF2_W",
            BoundId::XF3W => "T31_XF3_W",
            BoundId::F3 => "C32_F3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Registry(s.to_string()))
    }

    /// Human-readable form of the inequality.
    pub fn label(self) -> &'static str {
        match self {
            BoundId::DgvF => "|f| <= (2/r + A_r) |h~| / sqrt(theta^2+sigma^2)",
            BoundId::DgvF1 => "|f'| <= (2/r + A_r) |h~| / sigma^2",
            BoundId::XF => "|(x-mu) f| <= (1 + 6/r + B_r) |h~|",
            BoundId::XF1K => "|(x-mu) f'| <= 2 sqrt(theta^2+sigma^2)/sigma^2 (1 + 6/r + B_r) |h~|",
            BoundId::XF2K => "|(x-mu) f''| <= {5 + 2r A_r + (5 + 4theta^2/sigma^2)(1 + 6/r + B_r)} |h~| / sigma^2",
            BoundId::F => "|f| <= {4 + 2sqrt2/sqrt r + ... + (sqrt(2r) + r) A_r} |h'|",
            BoundId::F1 => "|f'| <= sqrt(theta^2+sigma^2)/sigma^2 C_r |h'|",
            BoundId::F2 => "|f''| <= (2/(r+1) + A_{r+1}) E_r |h'| / sigma^2",
            BoundId::XF1W => "|(x-mu) f'| <= (1 + 6/(r+1) + B_{r+1}) E_r |h'|",
            BoundId::XF2W => "|(x-mu) f''| <= 2 sqrt(theta^2+sigma^2)/sigma^2 (1 + 6/(r+1) + B_{r+1}) E_r |h'|",
            BoundId::XF3W => "|(x-mu) f'''| <= {5 + 2(r+1) A_{r+1} + (5 + 4theta^2/sigma^2)(1 + 6/(r+1) + B_{r+1})} E_r |h'| / sigma^2",
            BoundId::F3 => "|f'''| <= (2/(r+2) + A_{r+2}) E_{r+1} (|h''| + [sqrt(theta^2+sigma^2) C_r + |theta|(2/(r+1) + A_{r+1}) E_r] |h'| / sigma^2) / sigma^2",
        }
    }

    /// Norms the right-hand side is proportional to.
    pub fn norms(self) -> &'static [Norm] {
        match self {
            BoundId::DgvF | BoundId::DgvF1 | BoundId::XF | BoundId::XF1K | BoundId::XF2K => &[Norm::HTilde],
            BoundId::F3 => &[Norm::H2, Norm::H1],
            _ => &[Norm::H1],
        }
    }

    /// (derivative order, weighted by |x − μ|) of the left-hand side.
    pub fn lhs(self) -> (usize, bool) {
        match self {
            BoundId::DgvF | BoundId::F => (0, false),
            BoundId::DgvF1 | BoundId::F1 => (1, false),
            BoundId::F2 => (2, false),
            BoundId::F3 => (3, false),
            BoundId::XF => (0, true),
            BoundId::XF1K | BoundId::XF1W => (1, true),
            BoundId::XF2K | BoundId::XF2W => (2, true),
            BoundId::XF3W => (3, true),
        }
    }

    /// True for bounds stated for bounded measurable h (in ‖h̃‖).
    pub fn is_bounded_class(self) -> bool {
        self.norms() == [Norm::HTilde]
    }
}

impl std::fmt::Display for BoundId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of the bound registry.
#[derive(Debug, Clone, Serialize)]
pub struct RegistryEntry {
    pub bound_id: BoundId,
    pub label: &'static str,
    pub norms: Vec<&'static str>,
}

pub fn registry() -> Vec<RegistryEntry> {
    BoundId::ALL
        .iter()
        .map(|&b| RegistryEntry { bound_id: b, label: b.label(), norms: b.norms().iter().map(|n| n.name()).collect() })
        .collect()
}

/// Right-hand side of bound `id` at parameters `p` for the supplied norms.
pub fn bound_rhs(id: BoundId, p: &VGParams, norms: &HNorms) -> Result<f64> {
    p.validate()?;
    let r = p.r;
    let s2 = p.sigma * p.sigma;
    let s = p.root_scale();
    let t2 = skew2(p);
    let e_r = lipschitz_lift(r, p);
    let f2_factor = (2.0 / (r + 1.0) + a_at(r + 1.0, p)) * e_r / s2;
    let weighted_second = |rr: f64| 5.0 + 2.0 * rr * a_at(rr, p) + (5.0 + 4.0 * t2) * weight_factor(rr, p);
    let v = match id {
        BoundId::DgvF => norms.get(id, Norm::HTilde)? / s * (2.0 / r + a_at(r, p)),
        BoundId::DgvF1 => norms.get(id, Norm::HTilde)? / s2 * (2.0 / r + a_at(r, p)),
        BoundId::XF => weight_factor(r, p) * norms.get(id, Norm::HTilde)?,
        BoundId::XF1K => 2.0 * s / s2 * weight_factor(r, p) * norms.get(id, Norm::HTilde)?,
        BoundId::XF2K => weighted_second(r) / s2 * norms.get(id, Norm::HTilde)?,
        BoundId::F => {
            let k = 4.0 + 2.0 * 2f64.sqrt() / r.sqrt()
                + (2.0 * PI * (r + 1.0)).sqrt() * (p.theta.abs() / p.sigma) * (1.0 + t2).powf(0.5 * (r - 1.0))
                + ((2.0 * r).sqrt() + r) * a_at(r, p);
            k * norms.get(id, Norm::H1)?
        }
        BoundId::F1 => s / s2 * c_at(r, p) * norms.get(id, Norm::H1)?,
        BoundId::F2 => f2_factor * norms.get(id, Norm::H1)?,
        BoundId::XF1W => weight_factor(r + 1.0, p) * e_r * norms.get(id, Norm::H1)?,
        BoundId::XF2W => 2.0 * s / s2 * weight_factor(r + 1.0, p) * e_r * norms.get(id, Norm::H1)?,
        BoundId::XF3W => weighted_second(r + 1.0) / s2 * e_r * norms.get(id, Norm::H1)?,
        BoundId::F3 => {
            // ‖f‴‖ ≤ (second-derivative factor at r+1) · (‖h″‖ + ‖f′‖ + |θ|‖f″‖)
            let outer = (2.0 / (r + 2.0) + a_at(r + 2.0, p)) * lipschitz_lift(r + 1.0, p) / s2;
            let h2 = norms.get(id, Norm::H2)?;
            let h1 = norms.get(id, Norm::H1)?;
            let lower = (s * c_at(r, p) / s2 + p.theta.abs() * f2_factor) * h1;
            outer * (h2 + lower)
        }
    };
    Ok(v)
}

/// Largest d_W for which the r = 1 conversion is stated.
pub fn r1_dw_limit(p: &VGParams) -> f64 {
    0.755 * p.sigma.powi(3) / (p.theta * p.theta + p.sigma * p.sigma)
}

/// Kolmogorov bound implied by a Wasserstein distance `dw` to VG(r, θ, σ, μ).
pub fn dk_from_dw(p: &VGParams, dw: f64) -> Result<f64> {
    p.validate()?;
    if !(dw >= 0.0) || !dw.is_finite() {
        return Err(Error::Domain(format!("d_W must be finite and nonnegative, got {dw}")));
    }
    let (r, s) = (p.r, p.sigma);
    if r > 1.0 {
        return Ok(const_d(p)? * dw.sqrt());
    }
    if r == 1.0 {
        let lim = r1_dw_limit(p);
        if !(dw < lim) {
            return Err(Error::ConditionViolated(format!(
                "(theta^2+sigma^2) sigma^-3 d_W = {} must be below 0.755",
                0.755 * dw / lim
            )));
        }
        if dw == 0.0 {
            return Ok(0.0);
        }
        let q = s.powi(3) / ((p.theta * p.theta + s * s) * dw);
        return Ok((5.0 + (6.0 / PI).ln() + q.ln()) * (dw / (6.0 * PI * s)).sqrt());
    }
    let k = gamma(0.5 * (1.0 - r)) / (PI.sqrt() * 2f64.powf(r - 1.0) * gamma(0.5 * r));
    Ok(2.0 * k.powf(1.0 / (r + 1.0)) * (dw / s).powf(r / (r + 1.0)))
}
