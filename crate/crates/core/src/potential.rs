//! Radially symmetric confining potentials, admissibility checks, and the
//! one-ring support edges a_-, a_+ with their curvature constants F_-, F_+.

use crate::error::{Error, Result};

/// Number of log-spaced grid points used by admissibility and edge scans.
const GRID_POINTS: usize = 1000;
/// Margin for the confinement check: V(r_max) - log r_max^2 must exceed
/// V(a_+) by this much.
const CONFINEMENT_MARGIN: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
enum PotentialKind {
    /// V(r) = r^2
    Gauss,
    /// V(r) = c r^3
    Cubic(f64),
    /// V(r) = r^2 + s r
    QuadLin(f64),
    /// V(r) = r^2/2 + s r
    HalfQuadLin(f64),
    /// V(r) = sum_k c_k r^k, coefficients 1-indexed by power
    Poly(Vec<f64>),
}

/// A radially symmetric potential V(r) with analytic first and second
/// derivatives and a truncation hint for root bracketing and quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPotential {
    id: String,
    kind: PotentialKind,
    r_max_hint: f64,
}

impl RadialPotential {
    pub fn gauss() -> Self {
        Self::build("gauss".into(), PotentialKind::Gauss)
    }

    pub fn cubic(c: f64) -> Self {
        Self::build(format!("cubic:{c}"), PotentialKind::Cubic(c))
    }

    pub fn quadlin(s: f64) -> Self {
        Self::build(format!("quadlin:{s}"), PotentialKind::QuadLin(s))
    }

    pub fn halfquadlin(s: f64) -> Self {
        Self::build(format!("halfquadlin:{s}"), PotentialKind::HalfQuadLin(s))
    }

    pub fn poly(coeffs: Vec<f64>) -> Self {
        let id = format!(
            "poly:{}",
            coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        Self::build(id, PotentialKind::Poly(coeffs))
    }

    /// Parse the CLI/config grammar:
    /// `gauss` | `cubic:<c>` | `quadlin:<s>` | `halfquadlin:<s>` | `poly:<c1>,<c2>,...`
    pub fn from_spec(spec: &str) -> Result<Self> {
        let bad = || Error::PotentialSpec(spec.to_string());
        let mut parts = spec.splitn(2, ':');
        let name = parts.next().ok_or_else(bad)?;
        let arg = parts.next();
        let one = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())
        };
        match name {
            "gauss" => {
                if arg.is_some() {
                    return Err(bad());
                }
                Ok(Self::gauss())
            }
            "cubic" => Ok(Self::cubic(one(arg)?)),
            "quadlin" => Ok(Self::quadlin(one(arg)?)),
            "halfquadlin" => Ok(Self::halfquadlin(one(arg)?)),
            "poly" => {
                let coeffs = arg
                    .ok_or_else(bad)?
                    .split(',')
                    .map(|c| c.trim().parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<Vec<f64>>>()?;
                if coeffs.is_empty() {
                    return Err(bad());
                }
                Ok(Self::poly(coeffs))
            }
            _ => Err(bad()),
        }
    }

    fn build(id: String, kind: PotentialKind) -> Self {
        let mut p = RadialPotential { id, kind, r_max_hint: 1e3 };
        p.r_max_hint = p.default_r_max_hint();
        p
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn r_max_hint(&self) -> f64 {
        self.r_max_hint
    }

    pub fn with_r_max_hint(mut self, hint: f64) -> Self {
        assert!(hint > 0.0, "r_max_hint must be positive");
        self.r_max_hint = hint;
        self
    }

    /// V(r)
    pub fn v(&self, r: f64) -> f64 {
        match &self.kind {
            PotentialKind::Gauss => r * r,
            PotentialKind::Cubic(c) => c * r * r * r,
            PotentialKind::QuadLin(s) => r * r + s * r,
            PotentialKind::HalfQuadLin(s) => 0.5 * r * r + s * r,
            PotentialKind::Poly(c) => {
                let mut acc = 0.0;
                for &ck in c.iter().rev() {
                    acc = (acc + ck) * r;
                }
                acc
            }
        }
    }

    /// V'(r)
    pub fn v1(&self, r: f64) -> f64 {
        match &self.kind {
            PotentialKind::Gauss => 2.0 * r,
            PotentialKind::Cubic(c) => 3.0 * c * r * r,
            PotentialKind::QuadLin(s) => 2.0 * r + s,
            PotentialKind::HalfQuadLin(s) => r + s,
            PotentialKind::Poly(c) => {
                let mut acc = 0.0;
                for (k, &ck) in c.iter().enumerate().rev() {
                    acc = acc * r + (k + 1) as f64 * ck;
                }
                acc
            }
        }
    }

    /// V''(r)
    pub fn v2(&self, r: f64) -> f64 {
        match &self.kind {
            PotentialKind::Gauss => 2.0,
            PotentialKind::Cubic(c) => 6.0 * c * r,
            PotentialKind::QuadLin(_) => 2.0,
            PotentialKind::HalfQuadLin(_) => 1.0,
            PotentialKind::Poly(c) => {
                let mut acc = 0.0;
                for (k, &ck) in c.iter().enumerate().rev().take_while(|(k, _)| *k >= 1) {
                    acc = acc * r + ((k + 1) * k) as f64 * ck;
                }
                acc
            }
        }
    }

    /// r V'(r), the quantity whose monotonicity and level sets control the
    /// ring edges.
    pub fn rv1(&self, r: f64) -> f64 {
        r * self.v1(r)
    }

    fn check_finite(&self, r: f64) -> Result<()> {
        let (a, b, c) = (self.v(r), self.v1(r), self.v2(r));
        if a.is_finite() && b.is_finite() && c.is_finite() {
            Ok(())
        } else {
            Err(Error::Evaluation { r })
        }
    }

    /// Default truncation radius: 10x the radius where V has climbed 50
    /// above its value at the outer edge (weight e^{-NV} negligible
    /// beyond), capped at 1e3. Falls back to 1e3 when no outer edge can be
    /// bracketed, which admissibility later reports.
    fn default_r_max_hint(&self) -> f64 {
        let cap = 1e3;
        // bracket a_+ by doubling
        let mut hi = 1.0;
        let mut found = false;
        for _ in 0..40 {
            if self.rv1(hi).is_finite() && self.rv1(hi) >= 2.0 {
                found = true;
                break;
            }
            hi *= 2.0;
            if hi > 1e6 {
                break;
            }
        }
        if !found {
            return cap;
        }
        let mut lo = hi / 2.0;
        if self.rv1(lo) >= 2.0 {
            lo = 1e-12;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.rv1(mid) < 2.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a_plus = 0.5 * (lo + hi);
        let target = self.v(a_plus) + 50.0;
        let mut r = a_plus.max(1e-6);
        for _ in 0..60 {
            if self.v(r) >= target {
                break;
            }
            r *= 2.0;
        }
        (10.0 * r).min(cap)
    }
}

/// Grid used by the admissibility and edge scans: log-spaced over
/// (0, r_max_hint].
fn log_grid(p: &RadialPotential) -> Vec<f64> {
    let hi = p.r_max_hint();
    let lo = hi * 1e-8;
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..GRID_POINTS)
        .map(|i| (llo + (lhi - llo) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// Outcome of the admissibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// Condition (i): V(r) - log r^2 grows without bound (checked with a
    /// fixed margin at r_max_hint).
    pub confining: bool,
    /// Condition (ii): r V'(r) strictly increasing from the innermost
    /// stationary point of V outward.
    pub monotone: bool,
    /// First radius at which a condition fails, if any.
    pub first_violation: Option<f64>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.confining && self.monotone
    }
}

/// Check the one-ring admissibility conditions on a log-spaced grid.
///
/// The monotonicity of r V'(r) is required from the largest zero of V'
/// outward: the region that determines the support and the saddle points.
/// Ring potentials (V' < 0 inside the hole) are admissible under this
/// reading even though r V'(r) dips below zero near the origin.
pub fn check_admissible(p: &RadialPotential) -> Result<AdmissibilityReport> {
    let grid = log_grid(p);
    for &r in &grid {
        p.check_finite(r)?;
    }
    // start monotonicity checking after the last sign change of V'
    let mut start = 0usize;
    for i in 1..grid.len() {
        if p.v1(grid[i - 1]) <= 0.0 && p.v1(grid[i]) > 0.0 {
            start = i;
        }
    }
    let mut monotone = true;
    let mut first_violation = None;
    let mut prev = p.rv1(grid[start]);
    for &r in &grid[start + 1..] {
        let cur = p.rv1(r);
        if cur <= prev {
            monotone = false;
            first_violation = Some(r);
            break;
        }
        prev = cur;
    }
    // condition (i): find the grid crossing of r V' = 2 as an a_+ estimate
    let mut a_plus_est = None;
    for i in (start + 1)..grid.len() {
        if p.rv1(grid[i - 1]) < 2.0 && p.rv1(grid[i]) >= 2.0 {
            a_plus_est = Some(grid[i]);
            break;
        }
    }
    let r_max = p.r_max_hint();
    let confining = match a_plus_est {
        Some(ap) => p.v(r_max) - 2.0 * r_max.ln() > p.v(ap) + CONFINEMENT_MARGIN,
        None => false,
    };
    if !confining && first_violation.is_none() {
        first_violation = Some(r_max);
    }
    Ok(AdmissibilityReport { confining, monotone, first_violation })
}

fn require_admissible(p: &RadialPotential) -> Result<()> {
    let rep = check_admissible(p)?;
    if rep.admissible() {
        Ok(())
    } else {
        Err(Error::Inadmissible(format!(
            "potential '{}' fails condition ({}) near r = {:?}",
            p.id(),
            if rep.confining { "ii" } else { "i" },
            rep.first_violation
        )))
    }
}

/// Newton polish after bisection; at most 5 steps, clamped to the bracket.
fn polish<F: Fn(f64) -> f64, D: Fn(f64) -> f64>(f: F, df: D, mut x: f64, lo: f64, hi: f64) -> f64 {
    for _ in 0..5 {
        let d = df(x);
        if d == 0.0 {
            break;
        }
        let next = x - f(x) / d;
        if next.is_finite() && next > lo && next < hi {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Inner support radius: the positive root of V' if one exists on the
/// grid, otherwise exactly 0.
pub fn solve_inner_edge(p: &RadialPotential) -> Result<f64> {
    require_admissible(p)?;
    let grid = log_grid(p);
    let mut brackets = Vec::new();
    for i in 1..grid.len() {
        let (a, b) = (p.v1(grid[i - 1]), p.v1(grid[i]));
        if a == 0.0 {
            brackets.push((grid[i - 1], grid[i - 1]));
        } else if a < 0.0 && b >= 0.0 || a > 0.0 && b <= 0.0 {
            brackets.push((grid[i - 1], grid[i]));
        }
    }
    match brackets.len() {
        0 => Ok(0.0),
        1 => {
            let (mut lo, mut hi) = brackets[0];
            if lo == hi {
                return Ok(lo);
            }
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if p.v1(lo) * p.v1(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let root = polish(|r| p.v1(r), |r| p.v2(r), 0.5 * (lo + hi), lo - 1e-6, hi + 1e-6);
            if p.v1(root).abs() >= 1e-12 * p.v2(root).abs().max(1.0) {
                return Err(Error::Bracket { lo, hi });
            }
            Ok(root)
        }
        _ => Err(Error::AmbiguousEdge { r_max: p.r_max_hint() }),
    }
}

/// Outer support radius: the solution of a_+ V'(a_+) = 2 above the inner
/// edge.
pub fn solve_outer_edge(p: &RadialPotential) -> Result<f64> {
    require_admissible(p)?;
    let a_minus = solve_inner_edge(p)?;
    let f = |r: f64| p.rv1(r) - 2.0;
    // bracket above a_minus on the grid
    let grid = log_grid(p);
    let mut lo = a_minus.max(grid[0]);
    let mut hi = None;
    for &r in grid.iter().filter(|&&r| r > a_minus) {
        if f(r) >= 0.0 {
            hi = Some(r);
            break;
        }
        lo = r;
    }
    let mut hi = hi.ok_or(Error::Bracket { lo: a_minus, hi: p.r_max_hint() })?;
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = polish(
        f,
        |r| p.v1(r) + r * p.v2(r),
        0.5 * (lo + hi),
        a_minus,
        p.r_max_hint(),
    );
    if f(root).abs() >= 1e-12 {
        return Err(Error::Bracket { lo, hi });
    }
    Ok(root)
}

/// Support topology of the limiting eigenvalue density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Disk,
    Annulus,
}

/// Support edges and curvature constants of the one-ring theorem.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportEdges {
    pub a_minus: f64,
    pub a_plus: f64,
    /// F_- = V''(a_-); present only for annular support.
    pub f_minus: Option<f64>,
    /// F_+ = V'(a_+)/a_+ + V''(a_+).
    pub f_plus: f64,
    pub topology: Topology,
}

impl SupportEdges {
    /// Solve both edges and the curvature constants for an admissible
    /// potential.
    pub fn solve(p: &RadialPotential) -> Result<Self> {
        let a_minus = solve_inner_edge(p)?;
        let a_plus = solve_outer_edge(p)?;
        let (f_plus, f_minus) = edge_curvatures(p, a_minus, a_plus)?;
        let topology = if a_minus > 0.0 { Topology::Annulus } else { Topology::Disk };
        Ok(SupportEdges { a_minus, a_plus, f_minus, f_plus, topology })
    }
}

/// Curvature constants (F_+, optional F_-) for solved edges.
pub fn edge_curvatures(p: &RadialPotential, a_minus: f64, a_plus: f64) -> Result<(f64, Option<f64>)> {
    let f_plus = p.v1(a_plus) / a_plus + p.v2(a_plus);
    if f_plus <= 0.0 {
        return Err(Error::DegenerateEdge { r: a_plus, value: f_plus });
    }
    let f_minus = if a_minus > 0.0 {
        let fm = p.v2(a_minus);
        if fm <= 0.0 {
            return Err(Error::DegenerateEdge { r: a_minus, value: fm });
        }
        Some(fm)
    } else {
        None
    };
    Ok((f_plus, f_minus))
}

/// Limiting eigenvalue density at |z| = r, per unit area; zero outside
/// the support.
pub fn density(p: &RadialPotential, edges: &SupportEdges, r: f64) -> f64 {
    if r < edges.a_minus || r > edges.a_plus {
        return 0.0;
    }
    let r = r.max(1e-12);
    (p.v1(r) / r + p.v2(r)) / (4.0 * std::f64::consts::PI)
}
