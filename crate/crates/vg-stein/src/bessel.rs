//! Modified Bessel functions of real order, returned in scaled form.
//!
//! `besseli_scaled` is e^{-x} I_ν(x) and `besselk_scaled` is e^{x} K_ν(x). Both stay
//! finite over the whole range used here, so integrands of the form e^{βt} t^ν I_ν(αt)
//! can be assembled in log space without overflow.
//!
//! K uses Temme's series for x < 2 and Steed's continued fraction (CF2) above, on the
//! reduced order μ = ν − round(ν) ∈ [−½, ½), followed by upward recurrence. I uses the
//! power series (all terms positive) below the crossover and the Hankel asymptotic
//! expansion above it.

use crate::error::{Error, Result};
use crate::roots::brent;
use crate::special::{gamma, ln_gamma};
use std::f64::consts::PI;

const EPS: f64 = f64::EPSILON;

// Chebyshev coefficients for Temme's Γ-related functions on [-1, 1].
const G1_DAT: [f64; 14] = [
    -1.14516408366268311786898152867,
    0.00636085311347084238122955495,
    0.00186245193007206848934643657,
    0.000152833085873453507081227824,
    0.000017017464011802038795324732,
    -6.4597502923347254354668326451e-07,
    -5.1819848432519380894104312968e-08,
    4.5189092894858183051123180797e-10,
    3.2433227371020873043666259180e-11,
    6.8309434024947522875432400828e-13,
    2.8353502755172101513119628130e-14,
    -7.9883905769323592875638087541e-16,
    -3.3726677300771949833341213457e-17,
    -3.6586334809210520744054437104e-20,
];

const G2_DAT: [f64; 15] = [
    1.882645524949671835019616975350,
    -0.077490658396167518329547945212,
    -0.018256714847324929419579340950,
    0.0006338030209074895795923971731,
    0.0000762290543508729021194461175,
    -9.5501647561720443519853993526e-07,
    -8.8927268107886351912431512955e-08,
    -1.9521334772319613740511880132e-09,
    -9.4003052735885162111769579771e-11,
    4.6875133849532393179290879101e-12,
    2.2658535746925759582447545145e-13,
    -1.1725509698488015111878735251e-15,
    -7.0441338200245222530843155877e-17,
    -2.4377878310107693650659740228e-18,
    -7.5225243218253901727164675011e-20,
];

fn cheb_eval(c: &[f64], y: f64) -> f64 {
    let y2 = 2.0 * y;
    let (mut d, mut dd) = (0.0, 0.0);
    for &cj in c[1..].iter().rev() {
        let tmp = d;
        d = y2 * d - dd + cj;
        dd = tmp;
    }
    y * d - dd + 0.5 * c[0]
}

/// Γ(1+μ), Γ(1−μ) and Temme's auxiliary g1, g2 for |μ| ≤ ½.
fn temme_gamma(mu: f64) -> (f64, f64, f64, f64) {
    let y = 4.0 * mu.abs() - 1.0;
    let g1 = cheb_eval(&G1_DAT, y);
    let g2 = cheb_eval(&G2_DAT, y);
    let g_1mmu = 1.0 / (g2 + mu * g1);
    let g_1pmu = 1.0 / (g2 - mu * g1);
    (g_1pmu, g_1mmu, g1, g2)
}

/// e^x K_μ(x), e^x K_{μ+1}(x) for |μ| ≤ ½, x < 2.
fn k_scaled_temme(mu: f64, x: f64) -> (f64, f64) {
    let half_x = 0.5 * x;
    let ln_half_x = half_x.ln();
    let half_x_mu = (mu * ln_half_x).exp();
    let pi_mu = PI * mu;
    let sigma = -mu * ln_half_x;
    let sinrat = if pi_mu.abs() < EPS { 1.0 } else { pi_mu / pi_mu.sin() };
    let sinhrat = if sigma.abs() < EPS { 1.0 } else { sigma.sinh() / sigma };
    let ex = x.exp();
    let (g_1pmu, g_1mmu, g1, g2) = temme_gamma(mu);

    let mut fk = sinrat * (sigma.cosh() * g1 - sinhrat * ln_half_x * g2);
    let mut pk = 0.5 / half_x_mu * g_1pmu;
    let mut qk = 0.5 * half_x_mu * g_1mmu;
    let mut ck = 1.0;
    let mut sum0 = fk;
    let mut sum1 = pk;
    for k in 1..15000 {
        let k = k as f64;
        fk = (k * fk + pk + qk) / (k * k - mu * mu);
        ck *= half_x * half_x / k;
        pk /= k - mu;
        qk /= k + mu;
        let hk = -k * fk + pk;
        let del0 = ck * fk;
        let del1 = ck * hk;
        sum0 += del0;
        sum1 += del1;
        if del0.abs() < 0.5 * sum0.abs() * EPS && del1.abs() < 0.5 * sum1.abs() * EPS {
            break;
        }
    }
    (sum0 * ex, sum1 * 2.0 / x * ex)
}

/// e^x K_μ(x), e^x K_{μ+1}(x) for |μ| ≤ ½, x ≥ 2 (Steed's CF2).
fn k_scaled_steed_cf2(mu: f64, x: f64) -> (f64, f64) {
    let mut bi = 2.0 * (1.0 + x);
    let mut di = 1.0 / bi;
    let mut delhi = di;
    let mut hi = di;
    let mut qi = 0.0;
    let mut qip1 = 1.0;
    let mut ai = -(0.25 - mu * mu);
    let a1 = ai;
    let mut ci = -ai;
    let mut bqi = -ai;
    let mut s = 1.0 + bqi * delhi;
    for i in 2..10000 {
        ai -= 2.0 * (i - 1) as f64;
        ci = -ai * ci / i as f64;
        let tmp = (qi - bi * qip1) / ai;
        qi = qip1;
        qip1 = tmp;
        bqi += ci * qip1;
        bi += 2.0;
        di = 1.0 / (bi + ai * di);
        delhi = (bi * di - 1.0) * delhi;
        hi += delhi;
        let dels = bqi * delhi;
        s += dels;
        if (dels / s).abs() < 0.5 * EPS {
            break;
        }
    }
    hi *= -a1;
    let k_mu = (PI / (2.0 * x)).sqrt() / s;
    let k_mup1 = k_mu * (mu + x + 0.5 - hi) / x;
    (k_mu, k_mup1)
}

/// Scaled (K_a, K_{a+1}) for a ≥ 0 as mantissas times e^{ln_scale}.
fn k_core(a: f64, x: f64) -> (f64, f64, f64) {
    let n = (a + 0.5).floor();
    let mu = a - n;
    let (mut k0, mut k1) = if x < 2.0 {
        k_scaled_temme(mu, x)
    } else {
        k_scaled_steed_cf2(mu, x)
    };
    let mut ln_scale = 0.0;
    for j in 0..n as usize {
        let k2 = 2.0 * (mu + j as f64 + 1.0) / x * k1 + k0;
        k0 = k1;
        k1 = k2;
        if k1 > 1e250 {
            k0 *= 1e-250;
            k1 *= 1e-250;
            ln_scale += 250.0 * std::f64::consts::LN_10;
        }
    }
    (k0, k1, ln_scale)
}

fn check_k_args(nu: f64, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("K_nu needs x > 0, got x = {x}")));
    }
    if !nu.is_finite() {
        return Err(Error::Domain(format!("non-finite order {nu}")));
    }
    Ok(())
}

/// e^x K_ν(x) for x > 0 and any real ν (parity applied).
pub fn besselk_scaled(nu: f64, x: f64) -> Result<f64> {
    check_k_args(nu, x)?;
    let (k, _, s) = k_core(nu.abs(), x);
    Ok(if s == 0.0 { k } else { k * s.exp() })
}

/// ln(e^x K_ν(x)).
pub fn ln_besselk_scaled(nu: f64, x: f64) -> Result<f64> {
    check_k_args(nu, x)?;
    let (k, _, s) = k_core(nu.abs(), x);
    Ok(k.ln() + s)
}

/// (e^x K_ν(x), e^x K_{ν+1}(x)).
pub fn besselk_scaled_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    check_k_args(nu, x)?;
    if nu >= 0.0 {
        let (k0, k1, s) = k_core(nu, x);
        let f = if s == 0.0 { 1.0 } else { s.exp() };
        Ok((k0 * f, k1 * f))
    } else {
        Ok((besselk_scaled(nu, x)?, besselk_scaled(nu + 1.0, x)?))
    }
}

/// (ln e^x K_ν(x), ln e^x K_{ν+1}(x)).
pub fn ln_besselk_scaled_pair(nu: f64, x: f64) -> Result<(f64, f64)> {
    check_k_args(nu, x)?;
    if nu >= 0.0 {
        let (k0, k1, s) = k_core(nu, x);
        Ok((k0.ln() + s, k1.ln() + s))
    } else {
        Ok((ln_besselk_scaled(nu, x)?, ln_besselk_scaled(nu + 1.0, x)?))
    }
}

fn check_i_args(nu: f64, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("I_nu needs x >= 0, got x = {x}")));
    }
    if !(nu >= -0.5) || !nu.is_finite() {
        return Err(Error::Domain(format!("I_nu needs nu >= -1/2, got nu = {nu}")));
    }
    if x == 0.0 && nu < 0.0 {
        return Err(Error::DivergesAtZero(nu));
    }
    Ok(())
}

fn use_asymptotic(nu: f64, x: f64) -> bool {
    x >= 30.0 && x >= 0.5 * nu * nu
}

/// Series for e^{-x} I_ν(x) split as (ln of the leading term, normalised sum).
fn i_series(nu: f64, x: f64) -> (f64, f64) {
    let ln0 = nu * (0.5 * x).ln() - ln_gamma(nu + 1.0) - x;
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * (nu + k));
        sum += term;
        if term < 0.5 * EPS * sum {
            break;
        }
        k += 1.0;
    }
    (ln0, sum)
}

/// Hankel expansion of e^{-x} I_ν(x) √(2πx) (the e^{-2x} companion is negligible here).
fn i_asymptotic_sum(nu: f64, x: f64) -> f64 {
    let mu4 = 4.0 * nu * nu;
    let mut term = 1.0f64;
    let mut sum = 1.0;
    for j in 1..200 {
        let odd = (2 * j - 1) as f64;
        let next = -term * (mu4 - odd * odd) / (8.0 * j as f64 * x);
        if next.abs() > term.abs() && (2 * j - 1) as f64 > 2.0 * nu {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 0.5 * EPS * sum.abs() {
            break;
        }
    }
    sum
}

/// e^{-x} I_ν(x) for x ≥ 0 and ν ≥ −½.
pub fn besseli_scaled(nu: f64, x: f64) -> Result<f64> {
    check_i_args(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if use_asymptotic(nu, x) {
        Ok(i_asymptotic_sum(nu, x) / (2.0 * PI * x).sqrt())
    } else {
        let (ln0, s) = i_series(nu, x);
        Ok(ln0.exp() * s)
    }
}

/// ln(e^{-x} I_ν(x)); −∞ at x = 0 for ν > 0.
pub fn ln_besseli_scaled(nu: f64, x: f64) -> Result<f64> {
    check_i_args(nu, x)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if use_asymptotic(nu, x) {
        Ok(i_asymptotic_sum(nu, x).ln() - 0.5 * (2.0 * PI * x).ln())
    } else {
        let (ln0, s) = i_series(nu, x);
        Ok(ln0 + s.ln())
    }
}

/// Upper edge of the small-argument window for the leading-order helpers.
pub fn x_switch(nu: f64) -> f64 {
    1e-4 / (1.0 + nu.abs())
}

/// Leading small-x term of I_ν(x): (x/2)^ν / Γ(ν+1).
pub fn besseli_smallx(nu: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) || x > x_switch(nu) || !(nu >= -0.5) {
        return Err(Error::Domain(format!(
            "small-x I needs 0 <= x <= {} and nu >= -1/2, got (nu, x) = ({nu}, {x})",
            x_switch(nu)
        )));
    }
    if x == 0.0 {
        return match nu {
            n if n == 0.0 => Ok(1.0),
            n if n > 0.0 => Ok(0.0),
            _ => Err(Error::DivergesAtZero(nu)),
        };
    }
    Ok((0.5 * x).powf(nu) / gamma(nu + 1.0))
}

/// Leading small-x term of K_ν(x): 2^{|ν|−1} Γ(|ν|) x^{−|ν|}, or −ln x for ν = 0.
pub fn besselk_smallx(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || x > x_switch(nu) {
        return Err(Error::Domain(format!(
            "small-x K needs 0 < x <= {}, got x = {x}",
            x_switch(nu)
        )));
    }
    let a = nu.abs();
    if a == 0.0 {
        Ok(-x.ln())
    } else {
        Ok(2f64.powf(a - 1.0) * gamma(a) * x.powf(-a))
    }
}

/// The unique root in (0, 1) of e^x K_0(x) + c ln x = 0, for c ≥ 2.
pub fn find_bessel_log_root(c: f64) -> Result<f64> {
    if !(c >= 2.0) || !c.is_finite() {
        return Err(Error::Domain(format!("log-root needs c >= 2, got {c}")));
    }
    brent(
        |x| besselk_scaled(0.0, x).expect("x > 0") + c * x.ln(),
        1e-10,
        1.0,
        1e-16,
        4.0 * EPS,
        200,
    )
}
