//! Adaptive Gauss–Kronrod (G10/K21) quadrature with a global error heap.
//!
//! The driver bisects the panel with the largest error estimate until the summed
//! estimate meets `max(epsabs, epsrel·|I|)` or the panel budget runs out. Breakpoints
//! seed the initial partition so that kinks and jumps never sit inside a panel.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208640963390,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub epsabs: f64,
    pub epsrel: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { epsabs: 1e-10, epsrel: 1e-10, max_panels: 4000 }
    }
}

impl QuadOptions {
    pub fn new(epsabs: f64, epsrel: f64) -> Self {
        Self { epsabs, epsrel, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abserr: f64,
    pub neval: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        e = resasc * (200.0 * e / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

/// One 21-point Kronrod rule with its embedded 10-point Gauss estimate.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut resabs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let ah = h.abs();
    let err = rescale_error((res_k - res_g) * h, resabs * ah, resasc * ah);
    (res_k * h, err)
}

/// Adaptive integration over `[pts[0], pts[last]]` with the interior points as breakpoints.
/// Always returns the best estimate; `converged` reports whether the tolerance was met.
pub fn integrate_points_best<F: Fn(f64) -> f64>(f: F, pts: &[f64], opts: QuadOptions) -> QuadResult {
    let mut heap = BinaryHeap::new();
    let mut done_value = 0.0f64;
    let mut done_err = 0.0f64;
    let mut neval = 0;
    for w in pts.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, err) = gk21(&f, w[0], w[1]);
        neval += 21;
        heap.push(Panel { a: w[0], b: w[1], value, err });
    }
    let mut panels = heap.len();
    let mut total: f64 = heap.iter().map(|p| p.value).sum();
    let mut err: f64 = heap.iter().map(|p| p.err).sum();
    loop {
        let tol = opts.epsabs.max(opts.epsrel * total.abs());
        if err <= tol || heap.is_empty() || panels >= opts.max_panels {
            // re-sum to shed the drift of the running totals
            let total = done_value + heap.iter().map(|p| p.value).sum::<f64>();
            let err = done_err + heap.iter().map(|p| p.err).sum::<f64>();
            let tol = opts.epsabs.max(opts.epsrel * total.abs());
            return QuadResult { value: total, abserr: err, neval, converged: err <= tol };
        }
        let p = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (p.a + p.b);
        // A panel that cannot be split in floating point is retired as-is.
        if !(m > p.a.min(p.b) && m < p.a.max(p.b)) || (p.b - p.a).abs() < 1e-14 * m.abs().max(1e-300) {
            done_value += p.value;
            done_err += p.err;
            continue;
        }
        let (v1, e1) = gk21(&f, p.a, m);
        let (v2, e2) = gk21(&f, m, p.b);
        neval += 42;
        panels += 1;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, err: e2 });
    }
}

/// As [`integrate_points_best`], but a missed tolerance is an error.
pub fn integrate_points<F: Fn(f64) -> f64>(f: F, pts: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    let r = integrate_points_best(f, pts, opts);
    if r.converged && r.value.is_finite() {
        Ok(r)
    } else {
        Err(Error::Quadrature { value: r.value, abserr: r.abserr })
    }
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    integrate_points(f, &[a, b], opts)
}

/// Aim for `target`, but accept any finite result whose error estimate is below
/// `max(accept_abs, accept_rel·|I|)`.
pub fn integrate_accept<F: Fn(f64) -> f64>(
    f: F,
    pts: &[f64],
    target: QuadOptions,
    accept_abs: f64,
    accept_rel: f64,
) -> Result<QuadResult> {
    let r = integrate_points_best(f, pts, target);
    if r.value.is_finite() && r.abserr <= accept_abs.max(accept_rel * r.value.abs()) {
        Ok(r)
    } else {
        Err(Error::Quadrature { value: r.value, abserr: r.abserr })
    }
}

/// Sorted breakpoints for `[lo, hi]`: the endpoints, every candidate strictly inside,
/// and a uniform grid of spacing `period` when given (capped at `max_grid` points).
pub fn breakpoints(lo: f64, hi: f64, candidates: &[f64], period: Option<f64>, max_grid: usize) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    pts.extend(candidates.iter().copied().filter(|&c| c > lo && c < hi));
    if let Some(h) = period.filter(|h| *h > 0.0) {
        let n = (((hi - lo) / h).ceil() as usize).min(max_grid);
        let step = (hi - lo) / n.max(1) as f64;
        pts.extend((1..n).map(|i| lo + step * i as f64));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Smallest T ≥ `t0` with c·T^p·e^{−λT}/λ ≤ tol, where ln c = `ln_c`.
///
/// This bounds the tail mass of an envelope c·t^p·e^{−λt} beyond T once T > p/λ
/// (the envelope is then decreasing and the integral is dominated by the first
/// term of its asymptotic series, with a 2× safety factor for p > 0).
pub fn tail_cutoff(ln_c: f64, p: f64, lambda: f64, t0: f64, tol: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::DivergentTail(format!("decay rate {lambda} is not positive")));
    }
    let target = tol.ln() - 2f64.ln();
    let g = |t: f64| ln_c + p * t.ln() - lambda * t - lambda.ln() - target;
    let mut t = t0.max(2.0 * p.max(0.0) / lambda).max(1e-300);
    if g(t) <= 0.0 {
        return Ok(t);
    }
    for _ in 0..100 {
        let d = p / t - lambda;
        let step = g(t) / d;
        let next = if d < 0.0 { t - step } else { 2.0 * t };
        if !(next > t) {
            break;
        }
        t = next;
        if g(t) <= 1e-12 {
            return Ok(t * (1.0 + 1e-9) + 1e-12);
        }
    }
    if g(t) <= 1e-9 {
        Ok(t)
    } else {
        Err(Error::DivergentTail(format!("no cutoff found (last T = {t})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x, -1.0, 2.0, QuadOptions::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 1.0 / 6.0 - 4.5)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x: f64| x.sqrt().recip(), 0.0, 1.0, QuadOptions::new(1e-10, 1e-10)).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn breakpoints_handle_jump() {
        let f = |x: f64| if x <= 0.3 { 1.0 } else { 0.0 };
        let r = integrate_points(f, &[0.0, 0.3, 1.0], QuadOptions::default()).unwrap();
        assert!((r.value - 0.3).abs() < 1e-14);
        assert!(r.neval <= 42);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions { epsabs: 1e-15, epsrel: 1e-15, max_panels: 3 };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, opts);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn breakpoint_grid() {
        let p = breakpoints(0.0, 1.0, &[0.5, 2.0, -1.0], Some(0.25), 100);
        assert_eq!(p, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(breakpoints(0.0, 1.0, &[], Some(1e-9), 10).len(), 11);
    }

    #[test]
    fn tail_cutoff_bounds_the_mass() {
        let t = tail_cutoff(0.0, 0.0, 1.0, 0.0, 1e-14).unwrap();
        assert!((-t).exp() <= 1e-14 && (-t).exp() > 1e-16);
        let t2 = tail_cutoff(0.0, 3.0, 0.5, 1.0, 1e-14).unwrap();
        assert!(t2.powi(3) * (-0.5 * t2).exp() / 0.5 <= 1e-14);
        assert!(tail_cutoff(0.0, 1.0, 0.0, 1.0, 1e-14).is_err());
    }
}
