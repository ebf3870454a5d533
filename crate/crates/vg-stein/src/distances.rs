//! Kolmogorov and Wasserstein distances to and between VG laws.
//!
//! Between two laws, d_K is a grid search on F_A − F_B refined by golden-section
//! search, and d_W = ∫|F_A − F_B| is assembled from partial expectations: with
//! D(c) = E(c − A)₊ − E(c − B)₊ we have ∫_a^b (F_A − F_B) = D(b) − D(a), so after
//! locating the sign changes of F_A − F_B the integral of the absolute value is a
//! sum of |D(c_{j+1}) − D(c_j)|, each term an ordinary one-sided quadrature.

use crate::error::{Error, Result};
use crate::exec;
use crate::quad::QuadOptions;
use crate::roots::brent;
use crate::vg_dist::{mean_variance, VGParams, VgLaw};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quadrature,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: f64,
    pub method: Method,
    pub err_est: f64,
}

const GRID: usize = 2048;
const REFINE_CELLS: usize = 8;
/// Central range half-width in standard deviations.
const SPREAD: f64 = 12.0;
/// Accuracy of a single CDF evaluation.
const CDF_ERR: f64 = 1e-12;

fn central_range(ps: &[&VGParams]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in ps {
        let (m, v) = mean_variance(p);
        let sd = v.sqrt();
        lo = lo.min(m - SPREAD * sd).min(p.mu - sd);
        hi = hi.max(m + SPREAD * sd).max(p.mu + sd);
    }
    (lo, hi)
}

/// Grid on [lo, hi] with the centres `extra` inserted.
fn search_grid(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..GRID).map(|i| lo + (hi - lo) * i as f64 / (GRID - 1) as f64).collect();
    xs.extend(extra.iter().copied().filter(|x| *x > lo && *x < hi));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn golden_max<F: Fn(f64) -> f64>(g: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > tol {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

struct Pair {
    a: VgLaw,
    b: VgLaw,
}

impl Pair {
    fn new(pa: &VGParams, pb: &VGParams) -> Result<Self> {
        Ok(Self { a: VgLaw::new(*pa)?, b: VgLaw::new(*pb)? })
    }

    fn diff(&self, z: f64) -> Result<f64> {
        Ok(self.a.cdf(z)? - self.b.cdf(z)?)
    }

    /// The search grid and F_A − F_B on it.
    fn grid_values(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let (lo, hi) = central_range(&[&self.a.params, &self.b.params]);
        let xs = search_grid(lo, hi, &[self.a.params.mu, self.b.params.mu]);
        let ds: Result<Vec<f64>> = exec::map_par(&xs, |&x| self.diff(x)).into_iter().collect();
        Ok((xs, ds?))
    }
}

/// d_K between two VG laws.
pub fn d_k_between(pa: &VGParams, pb: &VGParams) -> Result<DistanceResult> {
    if pa == pb {
        return Ok(DistanceResult { value: 0.0, method: Method::Quadrature, err_est: 0.0 });
    }
    let pair = Pair::new(pa, pb)?;
    let (xs, ds) = pair.grid_values()?;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| ds[j].abs().total_cmp(&ds[i].abs()).then(i.cmp(&j)));
    let mut cells: Vec<usize> = Vec::new();
    for &i in &order {
        if cells.iter().all(|&c| c.abs_diff(i) > 1) {
            cells.push(i);
        }
        if cells.len() == REFINE_CELLS {
            break;
        }
    }
    let scale = xs[xs.len() - 1] - xs[0];
    let refined: Vec<Result<f64>> = exec::map_par(&cells, |&i| {
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(xs.len() - 1)];
        let err = std::cell::Cell::new(None);
        let (_, v) = golden_max(
            |z| match pair.diff(z) {
                Ok(d) => d.abs(),
                Err(e) => {
                    err.set(Some(e));
                    0.0
                }
            },
            a,
            b,
            1e-12 * scale,
        );
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(v.max(ds[i].abs())),
        }
    });
    let mut best = 0.0f64;
    for v in refined {
        best = best.max(v?);
    }
    Ok(DistanceResult { value: best.min(1.0), method: Method::Quadrature, err_est: 2.0 * CDF_ERR })
}

/// (E(c − X)₊, error estimate).
fn lower_partial(law: &VgLaw, c: f64) -> Result<(f64, f64)> {
    let p = &law.params;
    let sd = mean_variance(p).1.sqrt();
    let opts = QuadOptions { epsabs: 1e-15 * sd, epsrel: 1e-13, max_panels: 4000 };
    let acc = 1e-11 * sd;
    let y = c - p.mu;
    if y <= 0.0 {
        // X = μ − t with t > −y
        let d = -y;
        law.side_weighted(-1.0, d, f64::INFINITY, &|t| t - d, &[], None, opts, acc)
    } else {
        // E(c − X)₊ = c − E X + E(X − c)₊
        let (up, e) = law.side_weighted(1.0, y, f64::INFINITY, &|t| t - y, &[], None, opts, acc)?;
        Ok((c - mean_variance(p).0 + up, e))
    }
}

/// d_W between two VG laws.
pub fn d_w_between(pa: &VGParams, pb: &VGParams) -> Result<DistanceResult> {
    if pa == pb {
        return Ok(DistanceResult { value: 0.0, method: Method::Quadrature, err_est: 0.0 });
    }
    let pair = Pair::new(pa, pb)?;
    let (xs, ds) = pair.grid_values()?;
    // sign changes of F_A − F_B
    let mut cuts = Vec::new();
    for i in 1..xs.len() {
        let (d0, d1) = (ds[i - 1], ds[i]);
        if d0 * d1 < 0.0 {
            let c = if d0.abs().max(d1.abs()) < 10.0 * CDF_ERR {
                xs[i]
            } else {
                let span = xs[i] - xs[i - 1];
                brent(|z| pair.diff(z).unwrap_or(f64::NAN), xs[i - 1], xs[i], 1e-13 * span, 4.0 * f64::EPSILON, 200)
                    .unwrap_or(xs[i])
            };
            cuts.push(c);
        }
    }
    let parts: Vec<Result<(f64, f64)>> = exec::map_par(&cuts, |&c| {
        let (la, ea) = lower_partial(&pair.a, c)?;
        let (lb, eb) = lower_partial(&pair.b, c)?;
        Ok((la - lb, ea + eb))
    });
    let mut dvals = vec![0.0];
    let mut err = 0.0;
    for part in parts {
        let (d, e) = part?;
        dvals.push(d);
        err += e;
    }
    dvals.push(mean_variance(pb).0 - mean_variance(pa).0);
    let value: f64 = dvals.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    Ok(DistanceResult { value, method: Method::Quadrature, err_est: 2.0 * err + 1e-12 })
}

/// VG quantile at probability `u` ∈ (0, 1), by bracketed root finding on the CDF.
pub fn quantile(law: &VgLaw, u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!("quantile level {u} outside (0, 1)")));
    }
    let (m, v) = mean_variance(&law.params);
    let sd = v.sqrt();
    let g = |x: f64| law.cdf(x).map(|f| f - u);
    let (mut lo, mut hi) = (m - 2.0 * sd, m + 2.0 * sd);
    let mut k = 2.0;
    while g(lo)? > 0.0 {
        k *= 2.0;
        lo = m - k * sd;
        if k > 1e4 {
            return Err(Error::Convergence(format!("no lower bracket for quantile {u}")));
        }
    }
    k = 2.0;
    while g(hi)? < 0.0 {
        k *= 2.0;
        hi = m + k * sd;
        if k > 1e4 {
            return Err(Error::Convergence(format!("no upper bracket for quantile {u}")));
        }
    }
    brent(|x| g(x).unwrap_or(f64::NAN), lo, hi, 1e-13 * sd, 4.0 * f64::EPSILON, 200)
}

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("sample contains non-finite values".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

/// Two-sided ECDF sup-distance to VG(p).
pub fn d_k_empirical(sample: &[f64], p: &VGParams) -> Result<DistanceResult> {
    let xs = sorted(sample)?;
    let law = VgLaw::new(*p)?;
    let n = xs.len() as f64;
    let fs: Result<Vec<f64>> = exec::map_par(&xs, |&x| law.cdf(x)).into_iter().collect();
    let fs = fs?;
    let mut d = 0.0f64;
    for (i, f) in fs.iter().enumerate() {
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(DistanceResult { value: d, method: Method::Empirical, err_est: CDF_ERR })
}

/// Quantile-coupling distance mean_i |X_(i) − q((i − ½)/n)| to VG(p).
pub fn d_w_empirical(sample: &[f64], p: &VGParams) -> Result<DistanceResult> {
    let xs = sorted(sample)?;
    let law = VgLaw::new(*p)?;
    let n = xs.len();
    let qs: Result<Vec<f64>> = exec::map_range(n, |i| quantile(&law, (i as f64 + 0.5) / n as f64)).into_iter().collect();
    let qs = qs?;
    let value = xs.iter().zip(&qs).map(|(x, q)| (x - q).abs()).sum::<f64>() / n as f64;
    let sd = mean_variance(p).1.sqrt();
    Ok(DistanceResult { value, method: Method::Empirical, err_est: 1e-10 * sd })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplace(b: f64) -> VGParams {
        VGParams::new(2.0, 0.0, b, 0.0).unwrap()
    }

    #[test]
    fn identical_laws() {
        let p = laplace(1.0);
        assert_eq!(d_k_between(&p, &p).unwrap().value, 0.0);
        assert_eq!(d_w_between(&p, &p).unwrap().value, 0.0);
    }

    #[test]
    fn laplace_scale_pair() {
        let (a, b) = (laplace(1.0), laplace(1.1));
        let z = 1.1f64.ln() * 11.0;
        let want = 0.5 * ((-z / 1.1).exp() - (-z).exp());
        let dk = d_k_between(&a, &b).unwrap();
        assert!((dk.value - want).abs() < 1e-9, "{} vs {want}", dk.value);
        let dw = d_w_between(&a, &b).unwrap();
        assert!((dw.value - 0.1).abs() < 1e-10, "{}", dw.value);
    }

    #[test]
    fn shift_gives_delta() {
        let a = VGParams::new(1.5, 0.4, 0.8, 0.0).unwrap();
        let b = VGParams { mu: 0.3, ..a };
        let dw = d_w_between(&a, &b).unwrap();
        assert!((dw.value - 0.3).abs() < 1e-10, "{}", dw.value);
        assert!(d_k_between(&a, &b).unwrap().value > 0.0);
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3f64).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && v.abs() < 1e-12);
    }

    #[test]
    fn empty_sample() {
        let p = laplace(1.0);
        assert!(matches!(d_k_empirical(&[], &p), Err(Error::EmptySample)));
        assert!(matches!(d_w_empirical(&[], &p), Err(Error::EmptySample)));
    }
}
