//! Stochastic validation engines: exact extreme-modulus samplers (Kostlan
//! for the Gaussian potential, per-mode inverse-CDF tables for general
//! radial potentials), the Metropolis Coulomb-gas chain, empirical CDFs,
//! and sup-norm distances between curves.

use crate::error::{Error, Result};
use crate::exact_cdf::{nf, nf_crossing, saddle, CdfCurve, CurveMeta, EdgeSide, Method};
use crate::potential::{solve_inner_edge, solve_outer_edge, RadialPotential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};
use rayon::prelude::*;
use serde::Serialize;

/// Seed plus substream id; identical configs reproduce bit-identical
/// output on every platform. Replica j of a run uses substream
/// `stream + j`, so parallel and serial execution agree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngConfig {
    pub seed: u64,
    pub stream: u64,
}

impl RngConfig {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngConfig { seed, stream }
    }

    fn rng_for(&self, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream.wrapping_add(replica));
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleMethod {
    Kostlan,
    InvCdf,
    Metropolis,
}

/// m sampled extreme moduli with full provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremeSampleSet {
    pub values: Vec<f64>,
    pub method: SampleMethod,
    pub edge: EdgeSide,
    pub n: u64,
    pub m: u64,
    pub rng: RngConfig,
    pub burn_in: Option<u64>,
    pub thin: Option<u64>,
}

/// Exact Gaussian-potential sampler: the squared moduli are jointly
/// distributed as independent Gamma(k, 1)/N variables for k = 1..N, so one
/// replica is max_k (or min_k) of sqrt(gamma_k / N).
pub fn sample_gauss_extreme_kostlan(
    n: u64,
    m: u64,
    rng: RngConfig,
    edge: EdgeSide,
) -> Result<ExtremeSampleSet> {
    if n < 1 || m < 1 {
        return Err(Error::BadInput(format!("need N >= 1 and m >= 1, got N = {n}, m = {m}")));
    }
    let gammas: Vec<Gamma<f64>> = (1..=n)
        .map(|k| {
            Gamma::new(k as f64, 1.0)
                .map_err(|e| Error::Domain(format!("gamma sampler setup: {e}")))
        })
        .collect::<Result<_>>()?;
    let big_n = n as f64;
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut r = rng.rng_for(j);
            let it = gammas.iter().map(|g| (g.sample(&mut r) / big_n).sqrt());
            match edge {
                EdgeSide::Outer => it.fold(f64::NEG_INFINITY, f64::max),
                EdgeSide::Inner => it.fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    Ok(ExtremeSampleSet {
        values,
        method: SampleMethod::Kostlan,
        edge,
        n,
        m,
        rng,
        burn_in: None,
        thin: None,
    })
}

/// Monotone cubic (Fritsch–Carlson) interpolation table mapping CDF level
/// u to modulus y for one mode.
#[derive(Debug, Clone)]
struct InvTable {
    c: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl InvTable {
    fn build(c: Vec<f64>, y: Vec<f64>) -> Self {
        let n = c.len();
        let mut d = vec![0.0; n]; // dy/dc at the nodes
        let sec = |i: usize| (y[i + 1] - y[i]) / (c[i + 1] - c[i]).max(1e-300);
        d[0] = sec(0);
        d[n - 1] = sec(n - 2);
        for i in 1..n - 1 {
            let (s0, s1) = (sec(i - 1), sec(i));
            d[i] = if s0 * s1 <= 0.0 {
                0.0
            } else {
                // harmonic mean keeps the interpolant monotone
                2.0 / (1.0 / s0 + 1.0 / s1)
            };
        }
        // Fritsch-Carlson limiter
        for i in 0..n - 1 {
            let s = sec(i);
            if s == 0.0 {
                d[i] = 0.0;
                d[i + 1] = 0.0;
            } else {
                let a = d[i] / s;
                let b = d[i + 1] / s;
                let r = (a * a + b * b).sqrt();
                if r > 3.0 {
                    d[i] *= 3.0 / r;
                    d[i + 1] *= 3.0 / r;
                }
            }
        }
        InvTable { c, y, slope: d }
    }

    fn invert(&self, u: f64) -> f64 {
        let n = self.c.len();
        if u <= self.c[0] {
            return self.y[0];
        }
        if u >= self.c[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.c.partition_point(|&v| v <= u) {
            0 => 0,
            k => k - 1,
        };
        let h = self.c[i + 1] - self.c[i];
        if h <= 0.0 {
            return self.y[i];
        }
        let t = (u - self.c[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (d0, d1) = (self.slope[i] * h, self.slope[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
            + d0 * (t3 - 2.0 * t2 + t)
            + y1 * (-2.0 * t3 + 3.0 * t2)
            + d1 * (t3 - t2)
    }
}

const INV_TABLE_POINTS: usize = 2048;

/// Per-mode inverse tables for the product measure: mode k has modulus
/// density proportional to r^{2k+1} e^{-N V(r)}.
fn build_inv_tables(p: &RadialPotential, n: u64) -> Result<Vec<InvTable>> {
    let a_minus = solve_inner_edge(p)?;
    let a_plus = solve_outer_edge(p)?;
    let big_n = n as f64;
    let lo0 = a_minus.max(a_plus * 1e-15);
    (0..n)
        .into_par_iter()
        .map(|k| {
            let tp = (2 * k + 1) as f64;
            let r0 = saddle(p, tp / big_n, lo0, a_plus);
            let m = nf(p, big_n, tp, r0);
            // span where the mode carries mass above ~1e-14 of the peak
            let target = m - 35.0;
            let left = nf_crossing(p, big_n, tp, a_plus * 1e-15, r0, target);
            let mut probe = (r0 * 2.0).max(r0 + 1.0);
            while nf(p, big_n, tp, probe) >= target {
                probe *= 2.0;
            }
            let right = nf_crossing(p, big_n, tp, r0, probe, target);
            // cumulative trapezoid of the normalized density on a fine grid
            let mut ys = Vec::with_capacity(INV_TABLE_POINTS);
            let mut cs = Vec::with_capacity(INV_TABLE_POINTS);
            let step = (right - left) / (INV_TABLE_POINTS - 1) as f64;
            let mut prev_f = (nf(p, big_n, tp, left) - m).exp();
            let mut acc = 0.0;
            ys.push(left);
            cs.push(0.0);
            for i in 1..INV_TABLE_POINTS {
                let r = left + i as f64 * step;
                let f = (nf(p, big_n, tp, r) - m).exp();
                acc += 0.5 * (prev_f + f) * step;
                prev_f = f;
                ys.push(r);
                cs.push(acc);
            }
            let total = acc;
            if !(total > 0.0) {
                return Err(Error::Quadrature { lo: left, hi: right });
            }
            for c in &mut cs {
                *c /= total;
            }
            Ok(InvTable::build(cs, ys))
        })
        .collect()
}

/// Exact sampler for general admissible potentials via per-mode inverse-
/// CDF tables: each replica inverts N independent uniforms and keeps the
/// extreme.
pub fn sample_general_extreme_invcdf(
    p: &RadialPotential,
    n: u64,
    m: u64,
    rng: RngConfig,
    edge: EdgeSide,
) -> Result<ExtremeSampleSet> {
    if n < 1 || m < 1 {
        return Err(Error::BadInput(format!("need N >= 1 and m >= 1, got N = {n}, m = {m}")));
    }
    let tables = build_inv_tables(p, n)?;
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut r = rng.rng_for(j);
            let it = tables.iter().map(|t| t.invert(r.random::<f64>()));
            match edge {
                EdgeSide::Outer => it.fold(f64::NEG_INFINITY, f64::max),
                EdgeSide::Inner => it.fold(f64::INFINITY, f64::min),
            }
        })
        .collect();
    Ok(ExtremeSampleSet {
        values,
        method: SampleMethod::InvCdf,
        edge,
        n,
        m,
        rng,
        burn_in: None,
        thin: None,
    })
}

/// One Coulomb-gas configuration with its energy
/// E = N sum_i V(|z_i|) - 2 sum_{j<k} log|z_j - z_k| (= N^2 S_eff).
#[derive(Debug, Clone, Serialize)]
pub struct GasConfiguration {
    pub points: Vec<(f64, f64)>,
    pub energy: f64,
    pub potential_id: String,
    pub n: u64,
}

impl GasConfiguration {
    /// Full O(N^2) energy recomputation, used to validate the incremental
    /// bookkeeping.
    pub fn recompute_energy(&self, p: &RadialPotential) -> f64 {
        full_energy(p, self.n as f64, &self.points)
    }
}

fn full_energy(p: &RadialPotential, big_n: f64, pts: &[(f64, f64)]) -> f64 {
    let mut e = 0.0;
    for (i, &(x, y)) in pts.iter().enumerate() {
        e += big_n * p.v((x * x + y * y).sqrt());
        for &(x2, y2) in &pts[i + 1..] {
            let d2 = (x - x2) * (x - x2) + (y - y2) * (y - y2);
            e -= d2.ln(); // 2 log|dz| = log|dz|^2
        }
    }
    e
}

/// Interaction part of the energy felt by one particle at `pt`.
fn local_energy(p: &RadialPotential, big_n: f64, pts: &[(f64, f64)], skip: usize, pt: (f64, f64)) -> f64 {
    let (x, y) = pt;
    let mut e = big_n * p.v((x * x + y * y).sqrt());
    for (j, &(x2, y2)) in pts.iter().enumerate() {
        if j == skip {
            continue;
        }
        let d2 = (x - x2) * (x - x2) + (y - y2) * (y - y2);
        e -= d2.ln();
    }
    e
}

/// Counters for one Metropolis run.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct MetropolisStats {
    pub proposals: u64,
    pub accepted: u64,
    /// Proposals auto-rejected because they produced a coincident pair.
    pub rejected_singular: u64,
}

impl MetropolisStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }
}

/// Metropolis chain for the Coulomb gas. One sweep is N single-particle
/// proposals: particle k uniform, both coordinates perturbed by
/// Normal(0, (eta/N)^2); a move is accepted iff exp(dE) > u with
/// dE = E_old - E_new (positive dE lowers the energy). Snapshots are taken
/// every `thin` sweeps once `burn_in` sweeps have passed.
pub fn metropolis_run(
    p: &RadialPotential,
    n: u64,
    sweeps: u64,
    eta: f64,
    rng: RngConfig,
    burn_in: u64,
    thin: u64,
) -> Result<(Vec<GasConfiguration>, MetropolisStats)> {
    if n < 2 {
        return Err(Error::BadInput(format!("metropolis needs N >= 2, got {n}")));
    }
    if !(eta > 0.0) {
        return Err(Error::BadInput(format!("eta must be > 0, got {eta}")));
    }
    if thin == 0 {
        return Err(Error::BadInput("thin must be >= 1".into()));
    }
    let big_n = n as f64;
    let mut r = rng.rng_for(0);
    let mut pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
        .collect();
    let mut energy = full_energy(p, big_n, &pts);
    let step = Normal::new(0.0, eta / big_n)
        .map_err(|e| Error::Domain(format!("step distribution: {e}")))?;
    let mut stats = MetropolisStats::default();
    let mut snapshots = Vec::new();
    for sweep in 0..sweeps {
        for _ in 0..n {
            stats.proposals += 1;
            let k = r.random_range(0..n as usize);
            let old = pts[k];
            let cand = (old.0 + step.sample(&mut r), old.1 + step.sample(&mut r));
            let e_old = local_energy(p, big_n, &pts, k, old);
            let e_new = local_energy(p, big_n, &pts, k, cand);
            if !e_new.is_finite() {
                stats.rejected_singular += 1;
                continue;
            }
            let de = e_old - e_new;
            let u: f64 = r.random::<f64>();
            if de.exp() > u {
                pts[k] = cand;
                energy -= de;
                stats.accepted += 1;
            }
        }
        if sweep >= burn_in && (sweep - burn_in) % thin == 0 {
            snapshots.push(GasConfiguration {
                points: pts.clone(),
                energy,
                potential_id: p.id().to_string(),
                n,
            });
        }
    }
    Ok((snapshots, stats))
}

/// Normalized radial histogram over [0, r_max]: returns (bin center,
/// fraction of all snapshot particles in the bin).
pub fn radial_histogram(snapshots: &[GasConfiguration], bins: usize, r_max: f64) -> Vec<(f64, f64)> {
    let mut counts = vec![0u64; bins];
    let mut total = 0u64;
    for s in snapshots {
        for &(x, y) in &s.points {
            let r = (x * x + y * y).sqrt();
            total += 1;
            let i = ((r / r_max) * bins as f64) as usize;
            if i < bins {
                counts[i] += 1;
            }
        }
    }
    let w = r_max / bins as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| ((i as f64 + 0.5) * w, c as f64 / total.max(1) as f64))
        .collect()
}

/// Time-averaged fraction of particles with |z| <= r.
pub fn occupation_fraction(snapshots: &[GasConfiguration], r: f64) -> f64 {
    let mut inside = 0u64;
    let mut total = 0u64;
    for s in snapshots {
        for &(x, y) in &s.points {
            total += 1;
            if x * x + y * y <= r * r {
                inside += 1;
            }
        }
    }
    inside as f64 / total.max(1) as f64
}

/// Step-function ECDF of a sample set on a grid. Orientation follows the
/// edge kind: Outer reports P(X <= y), Inner reports P(X >= y) so the
/// curve is directly comparable with the analytic one.
pub fn empirical_cdf(samples: &ExtremeSampleSet, grid: &[f64]) -> Result<CdfCurve> {
    if samples.values.is_empty() {
        return Err(Error::Domain("empty sample set".into()));
    }
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadInput("grid must be ascending with >= 2 points".into()));
    }
    let mut sorted = samples.values.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let m = sorted.len() as f64;
    let values: Vec<f64> = grid
        .iter()
        .map(|&y| {
            let le = sorted.partition_point(|&v| v <= y) as f64;
            match samples.edge {
                EdgeSide::Outer => le / m,
                EdgeSide::Inner => (m - sorted.partition_point(|&v| v < y) as f64) / m,
            }
        })
        .collect();
    Ok(CdfCurve {
        abscissa: grid.to_vec(),
        values,
        clamped: vec![false; grid.len()],
        meta: CurveMeta {
            n: samples.n,
            potential_id: String::new(),
            method: Method::Empirical,
            edge: samples.edge,
        },
    })
}

/// Sup-norm distance: c2 is evaluated at c1's abscissae by monotone linear
/// interpolation (clamped to its endpoint values outside its range).
pub fn ks_distance(c1: &CdfCurve, c2: &CdfCurve) -> f64 {
    let interp = |x: f64| -> f64 {
        let a = &c2.abscissa;
        let v = &c2.values;
        if x <= a[0] {
            return v[0];
        }
        if x >= a[a.len() - 1] {
            return v[v.len() - 1];
        }
        let i = a.partition_point(|&t| t <= x) - 1;
        let t = (x - a[i]) / (a[i + 1] - a[i]);
        v[i] + t * (v[i + 1] - v[i])
    };
    c1.abscissa
        .iter()
        .zip(&c1.values)
        .map(|(&x, &v)| (v - interp(x)).abs())
        .fold(0.0, f64::max)
}
