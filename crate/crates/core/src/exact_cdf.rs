//! Exact finite-N distributions of the extreme eigenvalue moduli.
//!
//! The CDF of the largest modulus is a product of truncated orthogonal-
//! monomial norms, F_N(y) = prod_n h_n(y)/h_n(inf) with
//! h_n(y) = 2 pi int_0^y r^{2n+1} e^{-N V(r)} dr; the smallest-modulus
//! statistic uses the complementary ranges [y, inf). For the Gaussian
//! potential the product collapses to regularized incomplete gamma
//! functions. Everything is computed in the log domain.

use crate::asymptotics::ScalingMap;
use crate::error::{Error, Result};
use crate::potential::{solve_inner_edge, solve_outer_edge, RadialPotential};
use crate::quad::integrate;
use crate::specfun::log_reg_lower_gamma;
use rayon::prelude::*;
use serde::Serialize;

const LN_2PI: f64 = 1.837_877_066_409_345_3;
/// Integrand support is cut where the log-integrand drops this far below
/// its maximum on the range; e^{-60} is far below the 1e-12 tolerance.
const LOG_CUT: f64 = 60.0;
const REL_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 60;

/// Which extreme statistic a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeSide {
    /// Largest modulus: F(y) = P(|z_max| <= y).
    Outer,
    /// Smallest modulus: F(y) = P(|z_min| >= y).
    Inner,
}

/// Closed-form log CDF of |z_max| for V(r) = r^2:
/// log F_N(y) = sum_{k=1}^{N} log P(k, N y^2).
pub fn gaussian_log_cdf_max(n: u64, y: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::BadInput(format!("N must be >= 1, got {n}")));
    }
    if !(y >= 0.0) {
        return Err(Error::BadInput(format!("y must be >= 0, got {y}")));
    }
    if y == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let x = n as f64 * y * y;
    let terms = (1..=n)
        .into_par_iter()
        .map(|k| log_reg_lower_gamma(k as f64, x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(terms.iter().sum())
}

/// log-integrand of the norm integrals: (2n+1) log r - N V(r).
pub(crate) fn nf(p: &RadialPotential, big_n: f64, two_n_p1: f64, r: f64) -> f64 {
    two_n_p1 * r.ln() - big_n * p.v(r)
}

/// Saddle point r_0(n): the unique solution of r V'(r) = (2n+1)/N above
/// the inner stationary point. `lo` must satisfy rV'(lo) <= 0 and `hi`
/// rV'(hi) >= 2 (e.g. the support edges).
pub(crate) fn saddle(p: &RadialPotential, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if p.rv1(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Bisect for the radius in (a, b) where nf crosses `target`, given
/// nf(a) and nf(b) straddle it and nf is monotone on (a, b).
pub(crate) fn nf_crossing(
    p: &RadialPotential,
    big_n: f64,
    two_n_p1: f64,
    mut a: f64,
    mut b: f64,
    target: f64,
) -> f64 {
    let above_at_a = nf(p, big_n, two_n_p1, a) >= target;
    for _ in 0..200 {
        if b - a <= 1e-14 * b.max(1.0) {
            break;
        }
        let mid = 0.5 * (a + b);
        if (nf(p, big_n, two_n_p1, mid) >= target) == above_at_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// log of int_lo^hi r^{2n+1} e^{-N V(r)} dr with the log-shift
/// M = max of the log-integrand on the range; hi = None means +infinity.
/// Assumes the log-integrand is unimodal with peak at r0 (admissibility).
fn log_range_integral(
    p: &RadialPotential,
    big_n: f64,
    n: u64,
    r0: f64,
    lo: f64,
    hi: Option<f64>,
) -> Result<f64> {
    let two_n_p1 = (2 * n + 1) as f64;
    if let Some(h) = hi {
        if h <= lo {
            return Ok(f64::NEG_INFINITY);
        }
    }
    // peak position within the range
    let rm = match hi {
        Some(h) if r0 > h => h,
        _ if r0 < lo => lo,
        _ => r0,
    };
    let m = nf(p, big_n, two_n_p1, rm);
    if !m.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    let target = m - LOG_CUT;
    // right endpoint: supplied bound or the decay crossing beyond the peak
    let r_hi = match hi {
        Some(h) => {
            if h <= rm || nf(p, big_n, two_n_p1, h) >= target {
                h.max(rm)
            } else {
                nf_crossing(p, big_n, two_n_p1, rm, h, target)
            }
        }
        None => {
            let mut probe = (rm * 2.0).max(rm + 1.0);
            let mut iters = 0;
            while nf(p, big_n, two_n_p1, probe) >= target {
                probe *= 2.0;
                iters += 1;
                if iters > 200 {
                    return Err(Error::Domain(format!(
                        "norm integrand for n = {n} does not decay; potential not confining"
                    )));
                }
            }
            nf_crossing(p, big_n, two_n_p1, rm, probe, target)
        }
    };
    let g = |r: f64| (nf(p, big_n, two_n_p1, r) - m).exp();
    // split at the peak so each piece is monotone
    let left = if rm > lo {
        integrate(&g, lo, rm, REL_TOL, MAX_DEPTH)?
    } else {
        0.0
    };
    let right = if r_hi > rm {
        integrate(&g, rm, r_hi, REL_TOL, MAX_DEPTH)?
    } else {
        0.0
    };
    let total = left + right;
    if total <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(m + total.ln())
}

/// Precomputed per-n machinery for one (potential, N) pair: saddle points
/// and full norms, reused across evaluation points.
#[derive(Debug, Clone)]
pub struct GeneralCdf {
    p: RadialPotential,
    n: u64,
    r0: Vec<f64>,
    log_full: Vec<f64>,
}

impl GeneralCdf {
    pub fn new(p: &RadialPotential, n: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadInput(format!("N must be >= 1, got {n}")));
        }
        let a_minus = solve_inner_edge(p)?; // also enforces admissibility
        let a_plus = solve_outer_edge(p)?;
        let big_n = n as f64;
        let lo = a_minus.max(a_plus * 1e-15);
        let r0: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| saddle(p, (2 * k + 1) as f64 / big_n, lo, a_plus))
            .collect();
        let log_full = (0..n as usize)
            .into_par_iter()
            .map(|k| {
                log_range_integral(p, big_n, k as u64, r0[k], 0.0, None).map(|v| v + LN_2PI)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(GeneralCdf { p: p.clone(), n, r0, log_full })
    }

    pub fn potential(&self) -> &RadialPotential {
        &self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Per-n truncated norms at y for n in [start, N): log h_n(y) (Outer)
    /// or log h~_n(y) (Inner), in index order.
    fn log_truncated_from(&self, start: usize, y: f64, edge: EdgeSide) -> Result<Vec<f64>> {
        let big_n = self.n as f64;
        (start..self.n as usize)
            .into_par_iter()
            .map(|k| {
                let (lo, hi) = match edge {
                    EdgeSide::Outer => (0.0, Some(y)),
                    EdgeSide::Inner => (y.max(0.0), None),
                };
                log_range_integral(&self.p, big_n, k as u64, self.r0[k], lo, hi)
                    .map(|v| v + LN_2PI)
            })
            .collect()
    }

    /// log F_N(y): log P(|z_max| <= y) for Outer, log P(|z_min| >= y) for
    /// Inner. Summation over n is in fixed index order regardless of the
    /// parallel execution of the per-n integrals.
    pub fn log_cdf(&self, y: f64, edge: EdgeSide) -> Result<f64> {
        if !(y >= 0.0) && edge == EdgeSide::Outer {
            return Err(Error::BadInput(format!("y must be >= 0, got {y}")));
        }
        if edge == EdgeSide::Outer && y == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if edge == EdgeSide::Inner && y <= 0.0 {
            return Ok(0.0);
        }
        let trunc = self.log_truncated_from(0, y, edge)?;
        // each factor h_trunc/h_full is a probability; clamp the tiny
        // positive excess that roundoff can produce
        Ok(trunc
            .iter()
            .zip(&self.log_full)
            .map(|(t, f)| (t - f).min(0.0))
            .sum())
    }

    /// Approximate log CDF keeping only the last `k` factors of the
    /// product (the modes that dominate near the edge). Upper bound on the
    /// exact log CDF; intended for the CLI's --tail-only speedup.
    pub fn log_cdf_tail(&self, y: f64, edge: EdgeSide, k: u64) -> Result<f64> {
        if k == 0 || k > self.n {
            return Err(Error::BadInput(format!(
                "tail size must be in 1..=N, got {k} with N = {}",
                self.n
            )));
        }
        if edge == EdgeSide::Outer && y == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        if edge == EdgeSide::Inner && y <= 0.0 {
            return Ok(0.0);
        }
        let start = (self.n - k) as usize;
        let trunc = self.log_truncated_from(start, y, edge)?;
        Ok(trunc
            .iter()
            .zip(&self.log_full[start..])
            .map(|(t, f)| (t - f).min(0.0))
            .sum())
    }

    pub fn norm_ratio_table(&self, y: f64, edge: EdgeSide) -> Result<NormRatioTable> {
        let trunc = self.log_truncated_from(0, y, edge)?;
        Ok(NormRatioTable {
            log_h_truncated: trunc,
            log_h_full: self.log_full.clone(),
            y,
            edge,
        })
    }
}

/// log of 2 pi int r^{2n+1} e^{-N V(r)} dr over [0, y] (Outer),
/// [y, inf) (Inner), or the full half-line (y = +inf Outer / y = 0 Inner).
pub fn log_norm(p: &RadialPotential, n_count: u64, n: u64, y: f64, edge: EdgeSide) -> Result<f64> {
    if n >= n_count {
        return Err(Error::BadInput(format!("need n < N, got n = {n}, N = {n_count}")));
    }
    let a_minus = solve_inner_edge(p)?;
    let a_plus = solve_outer_edge(p)?;
    let big_n = n_count as f64;
    let lo = a_minus.max(a_plus * 1e-15);
    let r0 = saddle(p, (2 * n + 1) as f64 / big_n, lo, a_plus);
    let (lo, hi) = match edge {
        EdgeSide::Outer if y.is_infinite() => (0.0, None),
        EdgeSide::Outer => (0.0, Some(y)),
        EdgeSide::Inner => (y.max(0.0), None),
    };
    Ok(log_range_integral(p, big_n, n, r0, lo, hi)? + LN_2PI)
}

/// One-shot log CDF by quadrature; prefer [`GeneralCdf`] when evaluating
/// many points for one (potential, N).
pub fn log_cdf_general(p: &RadialPotential, n: u64, y: f64, edge: EdgeSide) -> Result<f64> {
    GeneralCdf::new(p, n)?.log_cdf(y, edge)
}

/// Per-n truncated and full norms at one evaluation point.
#[derive(Debug, Clone, Serialize)]
pub struct NormRatioTable {
    pub log_h_truncated: Vec<f64>,
    pub log_h_full: Vec<f64>,
    pub y: f64,
    pub edge: EdgeSide,
}

impl NormRatioTable {
    /// Truncation can only shrink each norm.
    pub fn check_invariants(&self) -> bool {
        self.log_h_truncated.len() == self.log_h_full.len()
            && self
                .log_h_truncated
                .iter()
                .zip(&self.log_h_full)
                .all(|(t, f)| f.is_finite() && (t.is_finite() || *t == f64::NEG_INFINITY) && t <= &(f + 1e-9))
    }
}

/// How the values of a [`CdfCurve`] were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "gaussian-closed-form")]
    GaussianClosedForm,
    #[serde(rename = "quadrature")]
    Quadrature,
    #[serde(rename = "asymptotic-gumbel")]
    AsymptoticGumbel,
    #[serde(rename = "asymptotic-phi")]
    AsymptoticPhi,
    #[serde(rename = "empirical")]
    Empirical,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveMeta {
    pub n: u64,
    pub potential_id: String,
    pub method: Method,
    pub edge: EdgeSide,
}

/// A CDF evaluated on an ordered grid; `abscissa` is the rescaled Y when a
/// scaling map was used, otherwise the raw modulus y.
#[derive(Debug, Clone, Serialize)]
pub struct CdfCurve {
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    /// Points where the scaled y fell outside [0, inf) and the value was
    /// clamped to the exact boundary value.
    pub clamped: Vec<bool>,
    pub meta: CurveMeta,
}

impl CdfCurve {
    pub fn check_invariants(&self) -> bool {
        self.abscissa.windows(2).all(|w| w[0] < w[1])
            && self.values.iter().all(|v| (0.0..=1.0).contains(v))
            && self.values.windows(2).all(|w| {
                if self.meta.edge == EdgeSide::Inner {
                    w[1] <= w[0] + 1e-12
                } else {
                    w[1] >= w[0] - 1e-12
                }
            })
    }
}

/// Evaluate the exact CDF on a grid. With a scaling map the grid is read
/// as rescaled Y values and mapped to y; without one it is raw y. The
/// Gaussian closed form is used automatically for the outer Gaussian case.
pub fn cdf_curve(
    p: &RadialPotential,
    n: u64,
    edge: EdgeSide,
    grid: &[f64],
    scaling: Option<&ScalingMap>,
) -> Result<CdfCurve> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadInput("grid must be ascending with >= 2 points".into()));
    }
    let gaussian = p.id() == "gauss" && edge == EdgeSide::Outer;
    let general = if gaussian { None } else { Some(GeneralCdf::new(p, n)?) };
    let mut values = Vec::with_capacity(grid.len());
    let mut clamped = Vec::with_capacity(grid.len());
    for &a in grid {
        let y = match scaling {
            Some(s) => s.y_from_big_y(a),
            None => a,
        };
        if y < 0.0 {
            // exact boundary value at y = 0
            values.push(match edge {
                EdgeSide::Outer => 0.0,
                EdgeSide::Inner => 1.0,
            });
            clamped.push(true);
            continue;
        }
        let log_f = match &general {
            None => gaussian_log_cdf_max(n, y)?,
            Some(g) => g.log_cdf(y, edge)?,
        };
        values.push(log_f.exp().clamp(0.0, 1.0));
        clamped.push(false);
    }
    Ok(CdfCurve {
        abscissa: grid.to_vec(),
        values,
        clamped,
        meta: CurveMeta {
            n,
            potential_id: p.id().to_string(),
            method: if gaussian { Method::GaussianClosedForm } else { Method::Quadrature },
            edge,
        },
    })
}
