//! Large-N asymptotics of the extreme-modulus distributions: the slowly
//! varying sequences alpha_N, the affine edge scaling maps, the Gumbel
//! limit, and the all-slowly-varying-order correction phi with its
//! diagnostic series expansion.

use crate::error::{Error, Result};
use crate::specfun::erfc;

const SQRT_PI: f64 = 1.772_453_850_905_516;
const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Which edge a scaling map describes. GaussOuter is the outer edge of
/// V(r) = r^2 with its constants a_+ = 1, F_+ = 4 baked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    GaussOuter,
    GeneralOuter,
    GeneralInner,
}

fn alpha_impl(n: u64, a_edge: f64, f_edge: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::SmallN { n, arg: f64::NAN });
    }
    if !(a_edge > 0.0) || !(f_edge > 0.0) {
        return Err(Error::Domain(format!(
            "edge constants must be positive, got a = {a_edge}, F = {f_edge}"
        )));
    }
    let ln_n = (n as f64).ln();
    let arg = ln_n - 2.0 * ln_n.ln() - LN_2PI + (a_edge * a_edge * f_edge / 4.0).ln();
    // The absolute value below follows the defining formula. For moderate N
    // the argument is negative (gauss: N <~ 300) and |.| keeps alpha real;
    // the scaling map stays an affine bijection and exp(phi) stays a valid
    // CDF there, so we do not reject those N.
    let alpha = (0.5 * arg.abs()).sqrt();
    if alpha == 0.0 {
        return Err(Error::SmallN { n, arg });
    }
    Ok(alpha)
}

/// alpha_N for the Gaussian outer edge.
pub fn alpha_gauss(n: u64) -> Result<f64> {
    alpha_impl(n, 1.0, 4.0)
}

/// alpha_N^(+) for a general outer edge with constants (a_+, F_+).
pub fn alpha_outer(n: u64, a_plus: f64, f_plus: f64) -> Result<f64> {
    alpha_impl(n, a_plus, f_plus)
}

/// alpha_N^(-) for a general inner edge with constants (a_-, F_-).
pub fn alpha_inner(n: u64, a_minus: f64, f_minus: f64) -> Result<f64> {
    alpha_impl(n, a_minus, f_minus)
}

/// Affine map between the raw modulus y and the rescaled Gumbel variable Y
/// at one edge: y = a ± sqrt(2/(N F)) (alpha + Y/(2 alpha)), + outer,
/// - inner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMap {
    pub edge_kind: EdgeKind,
    pub n: u64,
    pub a_edge: f64,
    pub f_edge: f64,
    pub alpha: f64,
}

impl ScalingMap {
    pub fn gauss_outer(n: u64) -> Result<Self> {
        Ok(ScalingMap {
            edge_kind: EdgeKind::GaussOuter,
            n,
            a_edge: 1.0,
            f_edge: 4.0,
            alpha: alpha_gauss(n)?,
        })
    }

    pub fn general_outer(n: u64, a_plus: f64, f_plus: f64) -> Result<Self> {
        Ok(ScalingMap {
            edge_kind: EdgeKind::GeneralOuter,
            n,
            a_edge: a_plus,
            f_edge: f_plus,
            alpha: alpha_outer(n, a_plus, f_plus)?,
        })
    }

    pub fn general_inner(n: u64, a_minus: f64, f_minus: f64) -> Result<Self> {
        Ok(ScalingMap {
            edge_kind: EdgeKind::GeneralInner,
            n,
            a_edge: a_minus,
            f_edge: f_minus,
            alpha: alpha_inner(n, a_minus, f_minus)?,
        })
    }

    fn sign(&self) -> f64 {
        match self.edge_kind {
            EdgeKind::GaussOuter | EdgeKind::GeneralOuter => 1.0,
            EdgeKind::GeneralInner => -1.0,
        }
    }

    /// Width of the edge fluctuation window, sqrt(2/(N F)).
    fn width(&self) -> f64 {
        (2.0 / (self.n as f64 * self.f_edge)).sqrt()
    }

    /// sigma_N(Y) = alpha + Y/(2 alpha).
    pub fn sigma(&self, big_y: f64) -> f64 {
        self.alpha + big_y / (2.0 * self.alpha)
    }

    pub fn y_from_big_y(&self, big_y: f64) -> f64 {
        self.a_edge + self.sign() * self.width() * self.sigma(big_y)
    }

    pub fn big_y_from_y(&self, y: f64) -> f64 {
        let sigma = self.sign() * (y - self.a_edge) / self.width();
        2.0 * self.alpha * (sigma - self.alpha)
    }
}

/// The Gumbel CDF exp(-exp(-Y)).
pub fn gumbel_cdf(big_y: f64) -> f64 {
    (-(-big_y).exp()).exp()
}

/// Approximation to log F_N at the rescaled coordinate Y: the Gumbel
/// exponent plus every slowly varying correction,
/// phi(Y) = -(a sqrt(N F)/(2 sqrt 2)) [e^{-sigma^2}/sqrt(pi) - sigma erfc(sigma)].
///
/// The bracket is positive and strictly decreasing in sigma for every real
/// sigma, so exp(phi) is a valid CDF on the whole line; no sigma cutoff is
/// imposed.
pub fn phi(s: &ScalingMap, big_y: f64) -> Result<f64> {
    if !big_y.is_finite() {
        return Err(Error::Domain(format!("phi requires finite Y, got {big_y}")));
    }
    let sigma = s.sigma(big_y);
    let pre = s.a_edge * (s.n as f64 * s.f_edge).sqrt() / (2.0 * std::f64::consts::SQRT_2);
    let bracket = (-sigma * sigma).exp() / SQRT_PI - sigma * erfc(sigma);
    Ok(-pre * bracket)
}

/// Diagnostic: the pre-drop finite-N expression that phi truncates, with
/// its O(N^{-1/2}) terms still present:
/// -(1/2) { [q + sigma/2] e^{-sigma^2}/sqrt(pi)
///          - erfc(sigma) [sigma^2/2 + q sigma + 1/4] },
/// q = a sqrt(N F) / sqrt(2). Useful for error-budget studies only.
pub fn phi_predrop(s: &ScalingMap, big_y: f64) -> Result<f64> {
    if !big_y.is_finite() {
        return Err(Error::Domain(format!("phi requires finite Y, got {big_y}")));
    }
    let sigma = s.sigma(big_y);
    let q = s.a_edge * (s.n as f64 * s.f_edge).sqrt() / std::f64::consts::SQRT_2;
    let g = (-sigma * sigma).exp() / SQRT_PI;
    Ok(-0.5 * ((q + 0.5 * sigma) * g - erfc(sigma) * (0.5 * sigma * sigma + q * sigma + 0.25)))
}

/// Diagnostic partial sum of the slowly varying series for phi:
/// -e^{-Y} log N e^{-Y^2/(4 alpha^2)} sum_{k=1}^{k_max}
/// (-1)^{k+1} (2k-1)!! / (2 sigma^2)^k.
/// Valid for sigma > 1 where the asymptotic series is usable.
pub fn phi_series(s: &ScalingMap, big_y: f64, k_max: u32) -> Result<f64> {
    let sigma = s.sigma(big_y);
    if sigma <= 1.0 {
        return Err(Error::Domain(format!(
            "phi_series requires sigma > 1, got sigma = {sigma}"
        )));
    }
    if k_max < 1 {
        return Err(Error::BadInput("phi_series needs k_max >= 1".into()));
    }
    let mut sum = 0.0;
    let mut term = 1.0 / (2.0 * sigma * sigma); // k = 1: (2k-1)!! = 1
    for k in 1..=k_max {
        sum += if k % 2 == 1 { term } else { -term };
        term *= (2.0 * k as f64 + 1.0) / (2.0 * sigma * sigma);
    }
    let ln_n = (s.n as f64).ln();
    Ok(-(-big_y).exp() * ln_n * (-big_y * big_y / (4.0 * s.alpha * s.alpha)).exp() * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_gauss_values() {
        // frozen against an independent high-precision evaluation
        assert!((alpha_gauss(10).unwrap() - 0.775679335779680).abs() < 1e-14);
        assert!((alpha_gauss(100).unwrap() - 0.378857580125471).abs() < 1e-14);
        assert!((alpha_gauss(1000).unwrap() - 0.776076267109316).abs() < 1e-14);
        // leading order: alpha^2 * 2 / log N -> 1 (logarithmically slowly)
        let ratio = |n: u64| {
            let a = alpha_gauss(n).unwrap();
            a * a * 2.0 / (n as f64).ln()
        };
        assert!((ratio(10u64.pow(15)) - 1.0).abs() < 0.3);
        assert!(ratio(10u64.pow(15)) > ratio(10u64.pow(6)));
        // domain edge near e^e
        assert!(alpha_gauss(16).unwrap() > 0.0);
        assert!(matches!(alpha_gauss(2), Err(Error::SmallN { .. })));
    }

    #[test]
    fn alpha_general_reduces_and_shifts() {
        for n in [100u64, 1000, 100000] {
            assert_eq!(alpha_outer(n, 1.0, 4.0).unwrap(), alpha_gauss(n).unwrap());
        }
        // cubic c=1/3: a=2^{1/3}, F=3*2^{1/3}, log term log(3/2)
        let a = 2f64.powf(1.0 / 3.0);
        assert!((alpha_outer(100, a, 3.0 * a).unwrap() - 0.243309449129199).abs() < 1e-14);
        // V = r^2/2 - r inner edge: a=1, F=1, log term log(1/4)
        assert!((alpha_inner(500, 1.0, 1.0).unwrap() - 0.575920419983746).abs() < 1e-14);
        assert!(alpha_outer(100, -1.0, 4.0).is_err());
        assert!(alpha_inner(100, 1.0, 0.0).is_err());
    }

    #[test]
    fn scaling_map_round_trip() {
        let maps = [
            ScalingMap::gauss_outer(100).unwrap(),
            ScalingMap::general_outer(50, 2f64.powf(1.0 / 3.0), 3.0 * 2f64.powf(1.0 / 3.0)).unwrap(),
            ScalingMap::general_inner(500, 1.0, 1.0).unwrap(),
        ];
        for s in &maps {
            for big_y in [-5.0, 0.0, 7.0] {
                let y = s.y_from_big_y(big_y);
                assert!((s.big_y_from_y(y) - big_y).abs() < 1e-12);
            }
        }
        // GaussOuter at Y=0: y = 1 + alpha/sqrt(2N)
        let s = &maps[0];
        assert!((s.y_from_big_y(0.0) - (1.0 + s.alpha / (2.0 * 100.0f64).sqrt())).abs() < 1e-15);
        // inner edge approached from below as N grows
        let s = ScalingMap::general_inner(1_000_000, 1.0, 1.0).unwrap();
        let y = s.y_from_big_y(0.0);
        assert!(y < 1.0 && y > 0.99);
    }

    #[test]
    fn gumbel_values() {
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-16);
        assert!(gumbel_cdf(50.0) > 1.0 - 1e-15);
        let median = -((2.0f64).ln().ln());
        assert!((gumbel_cdf(median) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phi_frozen_value_and_limit() {
        let s = ScalingMap::gauss_outer(100).unwrap();
        // frozen against an independent high-precision evaluation
        assert!((phi(&s, 0.0).unwrap() - (-1.869794444839844)).abs() < 1e-13);
        // N -> infinity at fixed Y: phi -> -e^{-Y}; the approach is
        // O(loglog N / log N), so use a huge N and a loose band
        for big_y in [-0.5, 0.0, 1.0] {
            let s = ScalingMap::gauss_outer(10u64.pow(18)).unwrap();
            let ratio = phi(&s, big_y).unwrap() / (-(-big_y).exp());
            assert!((ratio - 1.0).abs() < 0.25, "Y={big_y}: ratio {ratio}");
        }
    }

    #[test]
    fn phi_gauss_path_is_the_general_path() {
        // one code path: GaussOuter constants equal the general outer ones
        let g = ScalingMap::gauss_outer(77).unwrap();
        let o = ScalingMap::general_outer(77, 1.0, 4.0).unwrap();
        for big_y in [-3.0, 0.0, 4.5] {
            assert_eq!(phi(&g, big_y).unwrap(), phi(&o, big_y).unwrap());
        }
    }

    #[test]
    fn exp_phi_is_a_cdf_on_the_window() {
        let a = 2f64.powf(1.0 / 3.0);
        for s in [
            ScalingMap::gauss_outer(10).unwrap(),
            ScalingMap::gauss_outer(100).unwrap(),
            ScalingMap::gauss_outer(1000).unwrap(),
            ScalingMap::general_outer(100, a, 3.0 * a).unwrap(),
            ScalingMap::general_inner(500, 1.0, 1.0).unwrap(),
        ] {
            let mut prev = -1.0;
            for i in 0..=500 {
                let big_y = -4.0 + 14.0 * i as f64 / 500.0;
                let v = phi(&s, big_y).unwrap().exp();
                assert!((0.0..=1.0).contains(&v));
                assert!(v >= prev, "{:?} at Y={big_y}", s.edge_kind);
                prev = v;
            }
        }
    }

    #[test]
    fn phi_slope_matches_closed_form() {
        // d(phi)/dY = pre * erfc(sigma) / (2 alpha)
        let s = ScalingMap::gauss_outer(100).unwrap();
        let pre = (2.0 * 100.0f64).sqrt() / 2.0;
        let exact = pre * erfc(s.sigma(0.0)) / (2.0 * s.alpha);
        let h = 1e-6;
        let fd = (phi(&s, h).unwrap() - phi(&s, -h).unwrap()) / (2.0 * h);
        assert!((fd / exact - 1.0).abs() < 1e-6);
    }

    #[test]
    fn phi_predrop_close_to_phi_at_large_n() {
        for n in [100u64, 10_000, 1_000_000] {
            let s = ScalingMap::gauss_outer(n).unwrap();
            let d = (phi_predrop(&s, 0.0).unwrap() - phi(&s, 0.0).unwrap()).abs();
            assert!(d < 2.0 / (n as f64).sqrt(), "N={n}: {d}");
        }
    }

    #[test]
    fn phi_series_tail_bound_and_domain() {
        for n in [10_000u64, 1_000_000] {
            let s = ScalingMap::gauss_outer(n).unwrap();
            for i in 0..=12 {
                let big_y = -2.0 + 6.0 * i as f64 / 12.0;
                let sigma = s.sigma(big_y);
                if sigma <= 1.0 {
                    continue;
                }
                let p6 = phi_series(&s, big_y, 6).unwrap();
                let p7 = phi_series(&s, big_y, 7).unwrap();
                let term7 = (p7 - p6).abs();
                let exact = phi(&s, big_y).unwrap();
                assert!((p6 - exact).abs() < term7.max(1e-15), "N={n} Y={big_y}");
            }
        }
        let s = ScalingMap::gauss_outer(10).unwrap();
        assert!(matches!(phi_series(&s, -3.0, 3), Err(Error::Domain(_))));
        let s = ScalingMap::gauss_outer(10_000).unwrap();
        assert!(matches!(phi_series(&s, 0.0, 0), Err(Error::BadInput(_))));
    }

    #[test]
    fn first_correction_coefficient() {
        // phi = -e^{-Y} [1 + (2 loglog N + log 2pi - 3 - 2Y - Y^2/2)/log N + ...]
        let n = 10u64.pow(18);
        let s = ScalingMap::gauss_outer(n).unwrap();
        let ln_n = (n as f64).ln();
        for big_y in [-0.5, 0.0, 0.5, 1.0] {
            let measured = (phi(&s, big_y).unwrap() / (-(-big_y).exp()) - 1.0) * ln_n;
            let predicted =
                2.0 * ln_n.ln() + LN_2PI - 3.0 - 2.0 * big_y - 0.5 * big_y * big_y;
            // next order is O(loglog^2 N / log N)
            let slack = 10.0 * ln_n.ln() * ln_n.ln() / ln_n;
            assert!(
                (measured - predicted).abs() < slack,
                "Y={big_y}: {measured} vs {predicted}"
            );
        }
    }
}
