//! Command-line front end: `edges`, `cdf`, `sample`, and `compare`
//! subcommands emitting CSV or JSON tables.

use crate::asymptotics::{gumbel_cdf, phi, ScalingMap};
use crate::error::{Error, Result};
use crate::exact_cdf::{cdf_curve, gaussian_log_cdf_max, EdgeSide, GeneralCdf};
use crate::output::Table;
use crate::potential::{RadialPotential, SupportEdges, Topology};
use crate::sampler::{
    empirical_cdf, ks_distance, metropolis_run, radial_histogram, sample_gauss_extreme_kostlan,
    sample_general_extreme_invcdf, ExtremeSampleSet, RngConfig, SampleMethod,
};
use crate::specfun::log_reg_lower_gamma;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "ringstat",
    version,
    about = "Extreme-value statistics of 2D Coulomb gases with radial potentials"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the support edges and curvature constants of a potential
    Edges(EdgesArgs),
    /// Exact finite-N CDF of an extreme modulus on a grid
    Cdf(CdfArgs),
    /// Draw extreme-modulus samples and their empirical CDF
    Sample(SampleArgs),
    /// Exact CDF vs Gumbel vs the slowly-varying correction, with deviations
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EdgeArg {
    Outer,
    Inner,
}

impl From<EdgeArg> for EdgeSide {
    fn from(e: EdgeArg) -> Self {
        match e {
            EdgeArg::Outer => EdgeSide::Outer,
            EdgeArg::Inner => EdgeSide::Inner,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Kostlan,
    Invcdf,
    Metropolis,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Grid lower bound (rescaled Y by default, raw y with --raw-y)
    #[arg(long, default_value_t = -4.0)]
    ymin: f64,
    /// Grid upper bound
    #[arg(long, default_value_t = 8.0)]
    ymax: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 241)]
    points: usize,
    /// Interpret the grid as raw moduli y instead of rescaled Y
    #[arg(long, default_value_t = false)]
    raw_y: bool,
}

impl GridArgs {
    fn build(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(Error::BadInput("need at least 2 grid points".into()));
        }
        if !(self.ymax > self.ymin) {
            return Err(Error::BadInput(format!(
                "need ymin < ymax, got {} and {}",
                self.ymin, self.ymax
            )));
        }
        let k = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| self.ymin + (self.ymax - self.ymin) * i as f64 / k)
            .collect())
    }
}

#[derive(Debug, Args)]
struct EdgesArgs {
    /// Potential spec: gauss | cubic:<c> | quadlin:<s> | halfquadlin:<s> | poly:<c1>,...
    #[arg(long)]
    potential: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CdfArgs {
    #[arg(long)]
    potential: String,
    #[arg(long = "N")]
    n: u64,
    #[arg(long, value_enum, default_value_t = EdgeArg::Outer)]
    edge: EdgeArg,
    #[command(flatten)]
    grid: GridArgs,
    /// Also emit Gumbel and phi columns
    #[arg(long, default_value_t = false)]
    with_asymptotics: bool,
    /// Approximate: keep only the last <k> factors of the norm product
    #[arg(long)]
    tail_only: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long)]
    potential: String,
    #[arg(long = "N")]
    n: u64,
    /// Number of replicas (kostlan/invcdf) or recorded snapshots cap (metropolis)
    #[arg(long, default_value_t = 1000)]
    m: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::Kostlan)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = EdgeArg::Outer)]
    edge: EdgeArg,
    /// Metropolis sweeps (N proposals each); default burn_in + m*thin
    #[arg(long)]
    sweeps: Option<u64>,
    /// Metropolis step scale (step std dev is eta/N)
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Metropolis burn-in sweeps; default 20*N
    #[arg(long)]
    burn_in: Option<u64>,
    /// Metropolis sweeps between snapshots; default N
    #[arg(long)]
    thin: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Print the sup distance between the ECDF and the exact curve
    #[arg(long, default_value_t = false)]
    compare: bool,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long)]
    potential: String,
    #[arg(long = "N")]
    n: u64,
    #[arg(long, value_enum, default_value_t = EdgeArg::Outer)]
    edge: EdgeArg,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// Scaling map for (potential, N, edge); requires an annular support for
/// the inner edge.
fn scaling_for(p: &RadialPotential, edges: &SupportEdges, n: u64, edge: EdgeSide) -> Result<ScalingMap> {
    match edge {
        EdgeSide::Outer if p.id() == "gauss" => ScalingMap::gauss_outer(n),
        EdgeSide::Outer => ScalingMap::general_outer(n, edges.a_plus, edges.f_plus),
        EdgeSide::Inner => {
            let f_minus = edges.f_minus.ok_or_else(|| {
                Error::BadInput(format!(
                    "potential '{}' has disk topology (a_- = 0); the inner-edge scaling needs an annulus. Use --raw-y for the unscaled inner CDF.",
                    p.id()
                ))
            })?;
            ScalingMap::general_inner(n, edges.a_minus, f_minus)
        }
    }
}

fn emit(table: &Table, output: &OutputArgs, stdout: &mut impl std::io::Write) -> Result<()> {
    emit_to(table, output.out.as_deref(), &output.format, stdout)
}

fn emit_to(
    table: &Table,
    path: Option<&Path>,
    format: &str,
    stdout: &mut impl std::io::Write,
) -> Result<()> {
    let text = table.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => write!(stdout, "{text}")?,
    }
    Ok(())
}

/// Sibling path for a secondary table: foo.csv -> foo.<tag>.csv.
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("csv").to_string();
    path.with_extension(format!("{tag}.{ext}"))
}

fn base_meta(table: &mut Table, potential: &str, n: Option<u64>) {
    table.push_meta("potential", potential);
    if let Some(n) = n {
        table.push_meta("N", n);
    }
    table.push_meta("version", VERSION);
}

fn cmd_edges(args: &EdgesArgs, stdout: &mut impl std::io::Write) -> Result<()> {
    let p = RadialPotential::from_spec(&args.potential)?;
    let e = SupportEdges::solve(&p)?;
    let mut cols = vec!["a_minus", "a_plus", "f_plus"];
    let mut row = vec![e.a_minus, e.a_plus, e.f_plus];
    if let Some(fm) = e.f_minus {
        cols.push("f_minus");
        row.push(fm);
    }
    let mut t = Table::new("edges", &cols);
    base_meta(&mut t, p.id(), None);
    t.push_meta(
        "topology",
        match e.topology {
            Topology::Disk => "disk",
            Topology::Annulus => "annulus",
        },
    );
    t.push_row(row);
    emit(&t, &args.output, stdout)
}

fn cmd_cdf(args: &CdfArgs, stdout: &mut impl std::io::Write) -> Result<()> {
    let p = RadialPotential::from_spec(&args.potential)?;
    let edge: EdgeSide = args.edge.into();
    let edges = SupportEdges::solve(&p)?;
    let grid = args.grid.build()?;
    // in raw-y mode the scaling is optional (used for the Y column and the
    // asymptotic columns when it exists); otherwise it is required
    let scaling = match scaling_for(&p, &edges, args.n, edge) {
        Ok(s) => Some(s),
        Err(_) if args.grid.raw_y && !args.with_asymptotics => None,
        Err(e) => return Err(e),
    };
    if args.grid.raw_y && grid[0] < 0.0 {
        return Err(Error::BadInput("raw y grid must be nonnegative".into()));
    }

    let mut cols = Vec::new();
    if scaling.is_some() {
        cols.push("Y");
    }
    cols.push("y");
    cols.push("F_exact");
    if args.with_asymptotics {
        cols.push("F_gumbel");
        cols.push("F_phi");
    }
    let mut t = Table::new("cdf", &cols);
    base_meta(&mut t, p.id(), Some(args.n));
    t.push_meta("edge", if edge == EdgeSide::Outer { "outer" } else { "inner" });

    let exact = match args.tail_only {
        None => cdf_curve(
            &p,
            args.n,
            edge,
            &grid,
            if args.grid.raw_y { None } else { scaling.as_ref() },
        )?
        .values,
        Some(k) => {
            t.push_meta("approximate", "true");
            t.push_meta("tail_only", k);
            tail_curve(&p, args.n, edge, &grid, if args.grid.raw_y { None } else { scaling.as_ref() }, k)?
        }
    };
    t.push_meta(
        "method",
        if p.id() == "gauss" && edge == EdgeSide::Outer {
            "gaussian-closed-form"
        } else {
            "quadrature"
        },
    );

    for (i, &a) in grid.iter().enumerate() {
        let mut row = Vec::with_capacity(cols.len());
        let (big_y, y) = match (&scaling, args.grid.raw_y) {
            (Some(s), false) => (a, s.y_from_big_y(a)),
            (Some(s), true) => (s.big_y_from_y(a), a),
            (None, _) => (f64::NAN, a),
        };
        if scaling.is_some() {
            row.push(big_y);
        }
        row.push(y);
        row.push(exact[i]);
        if args.with_asymptotics {
            let s = scaling.as_ref().expect("scaling present with asymptotics");
            row.push(gumbel_cdf(big_y));
            row.push(phi(s, big_y)?.exp());
        }
        t.push_row(row);
    }
    emit(&t, &args.output, stdout)
}

/// Approximate curve for --tail-only.
fn tail_curve(
    p: &RadialPotential,
    n: u64,
    edge: EdgeSide,
    grid: &[f64],
    scaling: Option<&ScalingMap>,
    k: u64,
) -> Result<Vec<f64>> {
    if k == 0 || k > n {
        return Err(Error::BadInput(format!("tail size must be in 1..=N, got {k}")));
    }
    let gaussian = p.id() == "gauss" && edge == EdgeSide::Outer;
    let general = if gaussian { None } else { Some(GeneralCdf::new(p, n)?) };
    grid.iter()
        .map(|&a| {
            let y = match scaling {
                Some(s) => s.y_from_big_y(a),
                None => a,
            };
            if y < 0.0 {
                return Ok(if edge == EdgeSide::Outer { 0.0 } else { 1.0 });
            }
            let log_f = match &general {
                Some(g) => g.log_cdf_tail(y, edge, k)?,
                None => {
                    if y == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        let x = n as f64 * y * y;
                        (n - k + 1..=n)
                            .map(|j| log_reg_lower_gamma(j as f64, x))
                            .sum::<Result<f64>>()?
                    }
                }
            };
            Ok(log_f.exp().clamp(0.0, 1.0))
        })
        .collect()
}

fn cmd_sample(args: &SampleArgs, stdout: &mut impl std::io::Write) -> Result<()> {
    let p = RadialPotential::from_spec(&args.potential)?;
    let edge: EdgeSide = args.edge.into();
    let rng = RngConfig::new(args.seed, args.stream);
    let edges = SupportEdges::solve(&p)?;

    let mut histogram: Option<Table> = None;
    let set: ExtremeSampleSet = match args.method {
        MethodArg::Kostlan => {
            if p.id() != "gauss" {
                return Err(Error::BadInput(
                    "the kostlan method is exact only for the gauss potential; use invcdf or metropolis".into(),
                ));
            }
            sample_gauss_extreme_kostlan(args.n, args.m, rng, edge)?
        }
        MethodArg::Invcdf => sample_general_extreme_invcdf(&p, args.n, args.m, rng, edge)?,
        MethodArg::Metropolis => {
            let burn_in = args.burn_in.unwrap_or(20 * args.n);
            let thin = args.thin.unwrap_or(args.n).max(1);
            let sweeps = args.sweeps.unwrap_or(burn_in + args.m * thin);
            let (snaps, stats) = metropolis_run(&p, args.n, sweeps, args.eta, rng, burn_in, thin)?;
            if snaps.is_empty() {
                return Err(Error::BadInput(format!(
                    "no snapshots: sweeps ({sweeps}) must exceed burn-in ({burn_in})"
                )));
            }
            let mut hist = Table::new("histogram", &["r", "fraction"]);
            base_meta(&mut hist, p.id(), Some(args.n));
            hist.push_meta("snapshots", snaps.len());
            hist.push_meta("acceptance_rate", format!("{:.4}", stats.acceptance_rate()));
            for (r, f) in radial_histogram(&snaps, 50, edges.a_plus * 1.5) {
                hist.push_row(vec![r, f]);
            }
            histogram = Some(hist);
            let values: Vec<f64> = snaps
                .iter()
                .map(|s| {
                    let it = s.points.iter().map(|&(x, y)| (x * x + y * y).sqrt());
                    match edge {
                        EdgeSide::Outer => it.fold(f64::NEG_INFINITY, f64::max),
                        EdgeSide::Inner => it.fold(f64::INFINITY, f64::min),
                    }
                })
                .collect();
            ExtremeSampleSet {
                m: values.len() as u64,
                values,
                method: SampleMethod::Metropolis,
                edge,
                n: args.n,
                rng,
                burn_in: Some(burn_in),
                thin: Some(thin),
            }
        }
    };

    let mut samples = Table::new("samples", &["value"]);
    base_meta(&mut samples, p.id(), Some(args.n));
    samples.push_meta(
        "method",
        match args.method {
            MethodArg::Kostlan => "kostlan",
            MethodArg::Invcdf => "invcdf",
            MethodArg::Metropolis => "metropolis",
        },
    );
    samples.push_meta("edge", if edge == EdgeSide::Outer { "outer" } else { "inner" });
    samples.push_meta("m", set.m);
    samples.push_meta("seed", args.seed);
    samples.push_meta("stream", args.stream);
    if let (Some(b), Some(t)) = (set.burn_in, set.thin) {
        samples.push_meta("burn_in", b);
        samples.push_meta("thin", t);
        samples.push_meta("eta", args.eta);
    }
    for &v in &set.values {
        samples.push_row(vec![v]);
    }

    // ECDF on the requested grid, in raw y
    let y_grid: Vec<f64> = if args.grid.raw_y {
        args.grid.build()?
    } else {
        let s = scaling_for(&p, &edges, args.n, edge)?;
        args.grid.build()?.iter().map(|&a| s.y_from_big_y(a)).collect()
    };
    let y_grid: Vec<f64> = y_grid.into_iter().filter(|&y| y >= 0.0).collect();
    if y_grid.len() < 2 {
        return Err(Error::BadInput("grid collapses below y = 0; adjust --ymin/--ymax".into()));
    }
    let ecdf = empirical_cdf(&set, &y_grid)?;
    let mut et = Table::new("ecdf", &["y", "F_empirical"]);
    base_meta(&mut et, p.id(), Some(args.n));
    et.push_meta("m", set.m);
    for (y, v) in y_grid.iter().zip(&ecdf.values) {
        et.push_row(vec![*y, *v]);
    }

    if args.compare {
        let exact = cdf_curve(&p, args.n, edge, &y_grid, None)?;
        let d = ks_distance(&ecdf, &exact);
        writeln!(stdout, "ks_distance={d:.6}")?;
    }

    match &args.output.out {
        Some(path) => {
            emit_to(&samples, Some(path), &args.output.format, stdout)?;
            emit_to(&et, Some(&sibling(path, "ecdf")), &args.output.format, stdout)?;
            if let Some(h) = &histogram {
                emit_to(h, Some(&sibling(path, "hist")), &args.output.format, stdout)?;
            }
        }
        None => {
            emit_to(&samples, None, &args.output.format, stdout)?;
            emit_to(&et, None, &args.output.format, stdout)?;
            if let Some(h) = &histogram {
                emit_to(h, None, &args.output.format, stdout)?;
            }
        }
    }
    Ok(())
}

fn cmd_compare(args: &CompareArgs, stdout: &mut impl std::io::Write) -> Result<()> {
    let p = RadialPotential::from_spec(&args.potential)?;
    let edge: EdgeSide = args.edge.into();
    let edges = SupportEdges::solve(&p)?;
    if args.grid.raw_y {
        return Err(Error::BadInput("compare works on the rescaled Y grid".into()));
    }
    let grid = args.grid.build()?;
    let s = scaling_for(&p, &edges, args.n, edge)?;
    let exact = cdf_curve(&p, args.n, edge, &grid, Some(&s))?;
    let gumbel: Vec<f64> = grid.iter().map(|&y| gumbel_cdf(y)).collect();
    let phi_vals: Vec<f64> = grid
        .iter()
        .map(|&y| phi(&s, y).map(|v| v.exp()))
        .collect::<Result<_>>()?;

    let sup = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    };
    let mean = |a: &[f64], b: &[f64]| {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
    };

    let mut t = Table::new("compare", &["Y", "F_exact", "F_gumbel", "F_phi"]);
    base_meta(&mut t, p.id(), Some(args.n));
    t.push_meta("edge", if edge == EdgeSide::Outer { "outer" } else { "inner" });
    let pairs = [
        ("exact_gumbel", &exact.values, &gumbel),
        ("exact_phi", &exact.values, &phi_vals),
        ("gumbel_phi", &gumbel, &phi_vals),
    ];
    for (name, a, b) in pairs {
        t.push_meta(&format!("sup_{name}"), format!("{:.6e}", sup(a, b)));
        t.push_meta(&format!("mean_{name}"), format!("{:.6e}", mean(a, b)));
        writeln!(stdout, "sup_{name}={:.6e} mean_{name}={:.6e}", sup(a, b), mean(a, b))?;
    }
    for (i, &big_y) in grid.iter().enumerate() {
        t.push_row(vec![big_y, exact.values[i], gumbel[i], phi_vals[i]]);
    }
    emit(&t, &args.output, stdout)
}

/// Parse argv and run; returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut impl std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version via "errors" that exit 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Edges(a) => cmd_edges(a, stdout),
        Command::Cdf(a) => cmd_cdf(a, stdout),
        Command::Sample(a) => cmd_sample(a, stdout),
        Command::Compare(a) => cmd_compare(a, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
