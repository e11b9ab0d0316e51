use crate::config::{bad, RunConfig};
use crate::output::{emit, json_report, num, Csv};
use crate::{overlay, Cli, Command, Format, Global};
use anyhow::Context;
use clap::Args;
use cr3bp_core::convexity::{appendix_b_suite_seeded, convexity_scan, copenhagen_model, ScanSpec};
use cr3bp_core::dynamics::{lagrange_values, MassRatio};
use cr3bp_core::index::{conley_zehnder_geometric, find_crossings, robbin_salamon, SymplecticPath};
use cr3bp_core::liouville::{verify_y_eps, SurfaceGrid};
use cr3bp_core::orbits::{
    curve_crossings, find_retrograde, lyapunov_orbit, shooting_curve, transverse_hyperbolic,
    Branch, LyapunovConfig, PeriodicOrbit, ShootingConfig,
};
use cr3bp_core::saddle_center::{shield_profile, SaddleCenterData};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct LagrangeArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ShootArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Energy E (below L1).
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Samples per shooting curve.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct LyapunovArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Energy above L1.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct IndexArgs {
    /// JSON file `{"version": 1, "times": [...], "matrices": [[[...]]]}`, or a
    /// `.csv` with rows `t` followed by 4 or 16 row-major matrix entries.
    #[arg(long)]
    pub path_file: Option<PathBuf>,
    /// Orbit to compute instead: `lyapunov` or `retrograde`.
    #[arg(long)]
    pub orbit: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ConvexityArgs {
    /// Energy of the regularized problem (≤ −2).
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    pub res: Option<usize>,
    /// Number of θ values.
    #[arg(long)]
    pub theta_res: Option<usize>,
    /// Scan the full region instead of the first quadrant.
    #[arg(long)]
    pub full_domain: Option<bool>,
    /// Radius of the disk left out around S±.
    #[arg(long)]
    pub collar: Option<f64>,
}

#[derive(Args, Debug)]
pub struct AppendixbArgs {
    /// Grid points per axis.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Seed of the transcription self-test.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct LiouvilleArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Position grid per axis over the whole component.
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Position grid per axis around the neck.
    #[arg(long)]
    pub neck_res: Option<usize>,
    /// Velocity directions per position.
    #[arg(long)]
    pub angles: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ShieldArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub c0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Starting radius, in (−r₀, r₀) \ {0}; default r₀/2.
    #[arg(long, allow_negative_numbers = true)]
    pub r_init: Option<f64>,
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    let g = &cli.global;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(bad("threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let mut cfg = match &g.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::empty(),
    };
    match &cli.command {
        Command::Lagrange(a) => {
            overlay!(cfg, a, mu);
            lagrange(g, &cfg)
        }
        Command::Shoot(a) => {
            overlay!(cfg, a, mu, energy, samples, rtol, atol);
            shoot(g, &cfg)
        }
        Command::Lyapunov(a) => {
            overlay!(cfg, a, mu, eps, tol);
            lyapunov(g, &cfg)
        }
        Command::Index(a) => {
            overlay!(cfg, a, path_file, orbit, mu, eps, energy);
            index(g, &cfg)
        }
        Command::Convexity(a) => {
            overlay!(cfg, a, h, res, theta_res, full_domain, collar);
            convexity(g, &cfg)
        }
        Command::Appendixb(a) => {
            overlay!(cfg, a, resolution, seed);
            appendixb(g, &cfg)
        }
        Command::Liouville(a) => {
            overlay!(cfg, a, mu, eps, resolution, neck_res, angles);
            liouville(g, &cfg)
        }
        Command::Shield(a) => {
            overlay!(cfg, a, mu, c0, b, r_init);
            shield(g, &cfg)
        }
    }
}

/// Writes the JSON report (or the table when `--format csv`) and the optional CSV file.
fn finish<T: Serialize>(
    g: &Global,
    command: &str,
    cfg: &RunConfig,
    result: &T,
    table: Option<Csv>,
) -> anyhow::Result<()> {
    match (g.format, &table) {
        (Format::Csv, None) => return Err(bad(format!("{command} has no tabular output"))),
        (Format::Csv, Some(t)) => emit(&t.render(), g.out.as_deref())?,
        (Format::Json, _) => emit(&json_report(command, cfg, result)?, g.out.as_deref())?,
    }
    if let Some(p) = &g.csv {
        let t = table.ok_or_else(|| bad(format!("{command} has no tabular output")))?;
        emit(&t.render(), Some(p))?;
    }
    Ok(())
}

fn mass_ratio(cfg: &RunConfig, default: Option<f64>) -> anyhow::Result<MassRatio> {
    let mu = match cfg.mu.or(default) {
        Some(m) => m,
        None => cfg.require("mu", None)?,
    };
    Ok(MassRatio::new(mu)?)
}

fn lagrange(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let mu = mass_ratio(cfg, None)?;
    let data = lagrange_values(&mu);
    let mut t = Csv::new(&["point", "p1", "p2", "q1", "q2", "value"]);
    for (i, (z, v)) in data.points.iter().zip(data.values).enumerate() {
        let mut row = vec![format!("L{}", i + 1)];
        row.extend(z.iter().map(|&x| num(x)));
        row.push(num(v));
        t.row(row);
    }
    finish(g, "lagrange", cfg, &data, Some(t))
}

#[derive(Serialize)]
struct OrbitSummary {
    orbit: PeriodicOrbit,
    transverse_hyperbolic: bool,
}

#[derive(Serialize)]
struct ShootReport {
    mu: f64,
    energy: f64,
    gamma1_samples: usize,
    gamma2_samples: usize,
    gamma1_end: Option<(f64, String)>,
    gamma2_end: Option<(f64, String)>,
    gamma1_self_intersections: usize,
    gamma2_self_intersections: usize,
    crossings: Vec<(f64, f64)>,
    orbit: Option<PeriodicOrbit>,
}

fn shoot(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let mu = mass_ratio(cfg, Some(0.5))?;
    let energy = cfg.energy.unwrap_or(-2.2);
    let sc = ShootingConfig {
        samples: cfg.resolution_of("samples", cfg.samples, 120)?,
        rtol: cfg.tolerance_of("rtol", cfg.rtol, 1e-12)?,
        atol: cfg.tolerance_of("atol", cfg.atol, 1e-13)?,
        ..ShootingConfig::default()
    };
    let (g1, g2) = rayon::join(
        || shooting_curve(&mu, energy, Branch::Gamma1, &sc),
        || shooting_curve(&mu, energy, Branch::Gamma2, &sc),
    );
    let (g1, g2) = (g1?, g2?);
    let crossings = curve_crossings(&g1, &g2);
    let orbit = match crossings.first() {
        Some(&c) => {
            Some(find_retrograde(&mu, energy, Some(c), &sc).context("refining the crossing")?)
        }
        None => None,
    };
    let mut t = Csv::new(&["branch", "q1_0", "theta", "q2", "time", "sigma"]);
    for (name, curve) in [("gamma1", &g1), ("gamma2", &g2)] {
        for p in &curve.points {
            let mut row = vec![name.to_string()];
            row.extend(
                [p.q1_0, p.theta, p.q2, p.time, p.sigma]
                    .iter()
                    .map(|&x| num(x)),
            );
            t.row(row);
        }
    }
    let report = ShootReport {
        mu: mu.mu(),
        energy,
        gamma1_samples: g1.points.len(),
        gamma2_samples: g2.points.len(),
        gamma1_self_intersections: g1.self_intersections(),
        gamma2_self_intersections: g2.self_intersections(),
        gamma1_end: g1.endpoint.clone(),
        gamma2_end: g2.endpoint.clone(),
        crossings,
        orbit,
    };
    finish(g, "shoot", cfg, &report, Some(t))
}

fn lyapunov_from(cfg: &RunConfig) -> anyhow::Result<PeriodicOrbit> {
    let mu = mass_ratio(cfg, Some(0.5))?;
    let eps = cfg.eps.unwrap_or(1e-3);
    let lc = LyapunovConfig {
        tol: cfg.tolerance_of("tol", cfg.tol, 1e-13)?,
        ..LyapunovConfig::default()
    };
    Ok(lyapunov_orbit(&mu, eps, &lc)?)
}

fn lyapunov(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let orbit = lyapunov_from(cfg)?;
    let report = OrbitSummary {
        transverse_hyperbolic: transverse_hyperbolic(&orbit),
        orbit,
    };
    finish(g, "lyapunov", cfg, &report, None)
}

/// Sampled symplectic path read by `index --path-file`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathFile {
    version: u32,
    times: Vec<f64>,
    /// Row-major square matrices.
    matrices: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
struct IndexReport {
    source: String,
    dimension: usize,
    robbin_salamon: Option<f64>,
    conley_zehnder: Option<i64>,
    crossings: Vec<cr3bp_core::index::Crossing>,
    covers: Option<usize>,
}

fn load_path(path: &std::path::Path) -> anyhow::Result<SymplecticPath> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let (times, psis) = if is_csv {
        parse_path_csv(&text)?
    } else {
        parse_path_json(&text)?
    };
    SymplecticPath::from_samples(times, psis).map_err(|e| bad(e.to_string()))
}

type Samples = (Vec<f64>, Vec<DMatrix<f64>>);

fn parse_path_json(text: &str) -> anyhow::Result<Samples> {
    let pf: PathFile =
        serde_json::from_str(text).map_err(|e| bad(format!("invalid path file: {e}")))?;
    if pf.version != crate::config::CONFIG_VERSION {
        return Err(bad(format!("unsupported path file version {}", pf.version)));
    }
    let n = pf.matrices.first().map_or(0, |m| m.len());
    if n == 0 || !n.is_multiple_of(2) {
        return Err(bad("matrices must be non-empty and of even size"));
    }
    let mut psis = Vec::with_capacity(pf.matrices.len());
    for m in &pf.matrices {
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(bad(format!("every matrix must be {n}×{n}")));
        }
        psis.push(DMatrix::from_row_iterator(
            n,
            n,
            m.iter().flatten().copied(),
        ));
    }
    Ok((pf.times, psis))
}

/// Rows `t, m₁₁, m₁₂, …` with 4 (Sp(2)) or 16 (Sp(4)) row-major entries; an
/// optional header row is skipped.
fn parse_path_csv(text: &str) -> anyhow::Result<Samples> {
    let mut times = Vec::new();
    let mut psis = Vec::new();
    let mut header_seen = false;
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let values: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match values {
            Ok(v) => v,
            Err(_) if times.is_empty() && !header_seen => {
                header_seen = true;
                continue;
            }
            Err(e) => return Err(bad(format!("line {}: {e}", line_no + 1))),
        };
        let n = match values.len() {
            5 => 2,
            17 => 4,
            k => {
                return Err(bad(format!(
                    "line {}: expected 5 or 17 fields, got {k}",
                    line_no + 1
                )))
            }
        };
        if psis.first().is_some_and(|m: &DMatrix<f64>| m.nrows() != n) {
            return Err(bad(format!("line {}: matrix size changes", line_no + 1)));
        }
        times.push(values[0]);
        psis.push(DMatrix::from_row_slice(n, n, &values[1..]));
    }
    if psis.is_empty() {
        return Err(bad("path file has no samples"));
    }
    Ok((times, psis))
}

fn index(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let report = match (&cfg.path_file, cfg.orbit.as_deref()) {
        (Some(p), None) => {
            let path = load_path(p)?;
            let rs = robbin_salamon(&path)?;
            IndexReport {
                source: p.display().to_string(),
                dimension: path.psi(path.a).nrows(),
                robbin_salamon: Some(rs.value()),
                conley_zehnder: conley_zehnder_geometric(&path).ok(),
                crossings: find_crossings(&path)?,
                covers: None,
            }
        }
        (None, Some(kind)) => {
            let orbit = match kind {
                "lyapunov" => lyapunov_from(cfg)?,
                "retrograde" => {
                    let mu = mass_ratio(cfg, Some(0.5))?;
                    find_retrograde(
                        &mu,
                        cfg.energy.unwrap_or(-2.2),
                        None,
                        &ShootingConfig::default(),
                    )?
                }
                other => {
                    return Err(bad(format!(
                        "unknown orbit kind {other:?} (lyapunov or retrograde)"
                    )))
                }
            };
            IndexReport {
                source: kind.to_string(),
                dimension: 2,
                robbin_salamon: None,
                conley_zehnder: orbit.index,
                crossings: Vec::new(),
                covers: Some(orbit.index_covers),
            }
        }
        _ => return Err(bad("give exactly one of --path-file and --orbit")),
    };
    finish(g, "index", cfg, &report, None)
}

fn convexity(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let h = cfg.h.unwrap_or(-2.0);
    if h > -2.0 {
        return Err(bad(format!("h = {h}: the scan needs h ≤ −2")));
    }
    let res = cfg.resolution_of("res", cfg.res, 400)?;
    let spec = ScanSpec {
        n_x1: res,
        n_x2: res,
        n_theta: cfg.resolution_of("theta_res", cfg.theta_res, 64)?,
        full_domain: cfg.full_domain.unwrap_or(false),
        collar: cfg.collar.unwrap_or(1e-3),
        record: g.csv.is_some() || g.format == Format::Csv,
        ..ScanSpec::default()
    };
    let mut scan = convexity_scan(&copenhagen_model(h), &spec)?;
    let mut t = Csv::new(&["x1", "x2", "theta", "det"]);
    for p in &scan.points {
        t.nums(p);
    }
    scan.points.clear();
    finish(g, "convexity", cfg, &scan, Some(t))
}

fn appendixb(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let n = cfg.resolution_of("resolution", cfg.resolution, 2000)?;
    let report = appendix_b_suite_seeded(
        n,
        cfg.seed
            .unwrap_or(cr3bp_core::convexity::appendix_b::DEFAULT_SEED),
    );
    let mut t = Csv::new(&["name", "samples", "margin", "pass"]);
    for c in &report.claims {
        t.row(vec![
            format!("\"{}\"", c.name),
            c.samples.to_string(),
            num(c.margin),
            c.pass.to_string(),
        ]);
    }
    finish(g, "appendixb", cfg, &report, Some(t))?;
    if !report.pass {
        anyhow::bail!("positivity suite failed");
    }
    Ok(())
}

fn liouville(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let mu = mass_ratio(cfg, Some(0.5))?;
    let grid = SurfaceGrid {
        global: cfg.resolution_of("resolution", cfg.resolution, 160)?,
        neck: cfg.resolution_of("neck_res", cfg.neck_res, 120)?,
        angles: cfg.resolution_of("angles", cfg.angles, 32)?,
    };
    let report = verify_y_eps(&mu, cfg.eps.unwrap_or(1e-3), &grid)?;
    finish(g, "liouville", cfg, &report, None)
}

#[derive(Serialize)]
struct ShieldSummary {
    mu: f64,
    c0: f64,
    b: f64,
    r0: f64,
    rate: f64,
    rate_expected: f64,
    area_rate_end: f64,
    energy: f64,
    samples: usize,
}

fn shield(g: &Global, cfg: &RunConfig) -> anyhow::Result<()> {
    let mu = mass_ratio(cfg, Some(0.5))?;
    let scd = SaddleCenterData::new(&mu);
    let c0 = cfg.c0.unwrap_or(1.0);
    let b = cfg.b.unwrap_or(0.5);
    let r0 = (2.0 * c0 / scd.lambda2).sqrt();
    let p = shield_profile(&scd, c0, b, cfg.r_init.unwrap_or(0.5 * r0))?;
    let mut t = Csv::new(&["s", "r", "a"]);
    for i in 0..p.s.len() {
        t.nums(&[p.s[i], p.r[i], p.a[i]]);
    }
    let summary = ShieldSummary {
        mu: mu.mu(),
        c0,
        b,
        r0: p.r0,
        rate: p.rate,
        rate_expected: p.rate_expected,
        area_rate_end: p.area_rate_end,
        energy: p.energy,
        samples: p.s.len(),
    };
    finish(g, "shield", cfg, &summary, Some(t))
}
