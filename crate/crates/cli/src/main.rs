//! `phtorus`: cone verification, center fields, semiconjugacies, annulus
//! hunts and growth experiments from JSON configs.

use clap::{Args, Parser, Subcommand};
use phtorus::coherence_lab::{
    contradiction_bounds, grow_unstable_curve, hunt_invariant_circles, write_curves_csv,
    CircleRestrictionReport, HuntReport,
};
use phtorus::cone_analysis::{
    center_invariance_residual, check_invariance, classify, expansion_constants, Classification,
    PhReport,
};
use phtorus::config::RunConfig;
use phtorus::report::{fmt_f64, to_json, Envelope};
use phtorus::semiconjugacy::{self, RangeSweep, SemiconjugacyResult};
use phtorus::torus_map::{spectrum, Vec2};
use phtorus::Error;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_POINTWISE_ONLY: u8 = 2;
const EXIT_NOT_PH: u8 = 3;
const EXIT_NON_CONVERGENCE: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "phtorus",
    version,
    about = "Partially hyperbolic torus endomorphism laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Grid side, or `WxH` for `semiconj`.
    #[arg(long)]
    grid: Option<String>,

    /// Main tolerance of the subcommand.
    #[arg(long)]
    tol: Option<f64>,

    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check cone invariance and classify the domination regime.
    Verify(Common),
    /// Compute the center line field.
    Center(Common),
    /// Solve the strip semiconjugacy.
    Semiconj {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Hunt for periodic center circles.
    Annulus(Common),
    /// Grow a cone-tangent curve and compare against the rectangle bound.
    Growth(Common),
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    NotPh(String),
    NonConvergence(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::NotPh(_) => EXIT_NOT_PH,
            Failure::NonConvergence(_) => EXIT_NON_CONVERGENCE,
            Failure::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::NotPh(m)
            | Failure::NonConvergence(m)
            | Failure::Runtime(m) => m,
        }
    }
}

/// Errors from reading and checking inputs.
fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: Error) -> Failure {
    match e {
        Error::NonConvergence { .. } => Failure::NonConvergence(e.to_string()),
        _ => Failure::Runtime(e.to_string()),
    }
}

/// Files are collected in memory and written only once the command succeeds.
struct Outputs {
    dir: PathBuf,
    files: Vec<(&'static str, String)>,
}

impl Outputs {
    fn json<T: Serialize>(
        &mut self,
        name: &'static str,
        kind: &str,
        body: &T,
    ) -> Result<(), Failure> {
        let text =
            to_json(&Envelope::new(kind, body)).map_err(|e| Failure::Runtime(e.to_string()))?;
        self.files.push((name, text));
        Ok(())
    }

    fn csv(
        &mut self,
        name: &'static str,
        f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    ) -> Result<(), Failure> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| Failure::Runtime(e.to_string()))?;
        self.files
            .push((name, String::from_utf8(buf).expect("CSV is UTF-8")));
        Ok(())
    }

    fn flush(self) -> Result<(), Failure> {
        let io =
            |e: std::io::Error| Failure::Runtime(format!("writing {}: {e}", self.dir.display()));
        std::fs::create_dir_all(&self.dir).map_err(io)?;
        for (name, text) in &self.files {
            std::fs::write(self.dir.join(name), text).map_err(io)?;
        }
        Ok(())
    }
}

fn parse_grid(s: &str) -> Result<(usize, Option<usize>), Failure> {
    let bad = || Failure::Usage(format!("--grid expects N or WxH, got {s:?}"));
    match s.split_once('x') {
        Some((w, h)) => Ok((
            w.parse().map_err(|_| bad())?,
            Some(h.parse().map_err(|_| bad())?),
        )),
        None => Ok((s.parse().map_err(|_| bad())?, None)),
    }
}

enum Kind {
    Map,
    Semiconj,
    Annulus,
    Growth,
}

fn load(common: &Common, kind: Kind, max_iters: Option<usize>) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::load(&common.config)
        .map_err(|e| Failure::Usage(format!("{}: {e}", common.config.display())))?;
    if let Some(out) = &common.out {
        cfg.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.rng_seed = seed;
    }
    if let Some(g) = &common.grid {
        let (w, h) = parse_grid(g)?;
        match (&kind, h) {
            (Kind::Semiconj, h) => cfg.semiconj.grid = (w, h.unwrap_or(cfg.semiconj.grid.1)),
            (_, None) => cfg.grid_n = w,
            (_, Some(_)) => {
                return Err(Failure::Usage(
                    "--grid WxH is only meaningful for semiconj".into(),
                ))
            }
        }
    }
    if let Some(t) = common.tol {
        match kind {
            Kind::Map => cfg.tolerances.center = t,
            Kind::Semiconj | Kind::Growth => cfg.tolerances.solver = t,
            Kind::Annulus => cfg.tolerances.invariance = t,
        }
    }
    if let Some(m) = max_iters {
        cfg.semiconj.max_iters = m;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn outputs(cfg: &RunConfig) -> Outputs {
    Outputs {
        dir: cfg.output_dir.clone(),
        files: Vec::new(),
    }
}

fn exit_for(c: Classification) -> u8 {
    match c {
        Classification::Absolute => 0,
        Classification::PointwiseOnly => EXIT_POINTWISE_ONLY,
        Classification::NotPh => EXIT_NOT_PH,
    }
}

fn summary(r: &PhReport) {
    println!(
        "classification {:?}: invariant={} margin={} lambda_abs={} mu_abs={} delta_abs={} delta_pointwise={}",
        r.classification,
        r.invariant,
        fmt_f64(r.margin),
        fmt_f64(r.lambda_abs),
        fmt_f64(r.mu_abs),
        fmt_f64(r.delta_abs),
        fmt_f64(r.delta_pointwise)
    );
}

fn cmd_verify(common: &Common) -> Result<u8, Failure> {
    let cfg = load(common, Kind::Map, None)?;
    let (map, cones) = cfg.map_and_cones().map_err(usage)?;
    let report = classify(&map, &cones, cfg.grid_n, cfg.depth, cfg.tolerances.center);
    summary(&report);
    let mut out = outputs(&cfg);
    out.json("ph_report.json", "ph_report", &report)?;
    out.csv("ph_report.csv", |w| report.write_csv(w))?;
    out.flush()?;
    Ok(exit_for(report.classification))
}

#[derive(Serialize)]
struct CenterSummary {
    n: usize,
    depth: usize,
    tol: f64,
    classification: Classification,
    max_width: f64,
    invariance_residual: f64,
    invariance_ratio: f64,
}

fn cmd_center(common: &Common) -> Result<u8, Failure> {
    let cfg = load(common, Kind::Map, None)?;
    let (map, cones) = cfg.map_and_cones().map_err(usage)?;
    let report = classify(&map, &cones, cfg.grid_n, cfg.depth, cfg.tolerances.center);
    if report.classification == Classification::NotPh {
        summary(&report);
        return Err(Failure::NotPh(
            "map is not partially hyperbolic for this cone field; no center field".into(),
        ));
    }
    let field = report
        .center
        .as_ref()
        .expect("center field present for invariant cones");
    let res = center_invariance_residual(&map, &cones, field);
    let body = CenterSummary {
        n: field.n,
        depth: field.depth,
        tol: field.tol,
        classification: report.classification,
        max_width: field.max_width(),
        invariance_residual: res.max_residual,
        invariance_ratio: res.max_ratio,
    };
    println!(
        "center field: max width {} invariance residual {}",
        fmt_f64(body.max_width),
        fmt_f64(res.max_residual)
    );
    let mut out = outputs(&cfg);
    out.json("center_field.json", "center_field", &body)?;
    out.csv("center_field.csv", |w| {
        use std::io::Write;
        writeln!(w, "x,y,angle,width")?;
        for k in 0..field.n * field.n {
            let p = phtorus::cone_analysis::grid_point(field.n, k);
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(field.angle[k]),
                fmt_f64(field.width[k])
            )?;
        }
        Ok(())
    })?;
    out.flush()?;
    Ok(0)
}

#[derive(Serialize)]
struct SemiconjReport<'a> {
    #[serde(flatten)]
    result: &'a SemiconjugacyResult,
    equivariance_defect: f64,
    range_sweep: RangeSweep,
}

fn cmd_semiconj(common: &Common, max_iters: Option<usize>) -> Result<u8, Failure> {
    let cfg = load(common, Kind::Semiconj, max_iters)?;
    let strip = cfg.strip_map().map_err(usage)?;
    let result = semiconjugacy::solve(&strip, &cfg.solve_options()).map_err(runtime)?;
    let body = SemiconjReport {
        result: &result,
        equivariance_defect: result.equivariance_check(),
        range_sweep: result.range_sweep(0.5, 4096),
    };
    println!(
        "semiconjugacy: {} iterations, residual {}, u_sup {}",
        result.iterations,
        fmt_f64(result.residual),
        fmt_f64(result.u_sup)
    );
    let mut out = outputs(&cfg);
    out.json("semiconj.json", "semiconjugacy", &body)?;
    out.csv("semiconj_u.csv", |w| result.u.write_csv(w))?;
    out.flush()?;
    Ok(0)
}

#[derive(Serialize)]
struct CircleSummary {
    start: Vec2,
    homotopy_class: Option<[i64; 2]>,
    points: usize,
    length: f64,
    report: CircleRestrictionReport,
}

#[derive(Serialize)]
struct AnnulusReport {
    integer_spectrum: bool,
    seeds: usize,
    period_max: usize,
    closed_leaves: usize,
    open_leaves: usize,
    annulus_found: bool,
    circles: Vec<CircleSummary>,
}

fn annulus_report(hunt: &HuntReport, integer_spectrum: bool) -> AnnulusReport {
    AnnulusReport {
        integer_spectrum,
        seeds: hunt.seeds,
        period_max: hunt.period_max,
        closed_leaves: hunt.closed_leaves,
        open_leaves: hunt.open_leaves,
        annulus_found: !hunt.circles.is_empty(),
        circles: hunt
            .circles
            .iter()
            .map(|c| CircleSummary {
                start: c.curve.points[0],
                homotopy_class: c.curve.homotopy_class,
                points: c.curve.points.len(),
                length: c.curve.length,
                report: c.report.clone(),
            })
            .collect(),
    }
}

fn cmd_annulus(common: &Common) -> Result<u8, Failure> {
    let cfg = load(common, Kind::Annulus, None)?;
    let (map, cones) = cfg.map_and_cones().map_err(usage)?;
    let report = classify(&map, &cones, cfg.grid_n, cfg.depth, cfg.tolerances.center);
    let Some(field) = report
        .center
        .as_ref()
        .filter(|_| report.classification != Classification::NotPh)
    else {
        summary(&report);
        return Err(Failure::NotPh(
            "map is not partially hyperbolic for this cone field; no center field".into(),
        ));
    };
    let hunt = hunt_invariant_circles(&map, field, &cfg.hunt_options()).map_err(runtime)?;
    let body = annulus_report(&hunt, spectrum(&map.linear).is_integer_spectrum);
    println!(
        "annulus hunt: {} invariant circle(s) from {} closed leaves",
        hunt.circles.len(),
        hunt.closed_leaves
    );
    let mut out = outputs(&cfg);
    out.json("annulus.json", "annulus", &body)?;
    let curves: Vec<_> = hunt.circles.iter().map(|c| &c.curve).collect();
    out.csv("annulus_curves.csv", |w| write_curves_csv(&curves, w))?;
    out.flush()?;
    Ok(0)
}

#[derive(Serialize)]
struct GrowthEnvelope<'a> {
    lambda_abs: f64,
    lambda_max: f64,
    #[serde(flatten)]
    growth: &'a phtorus::coherence_lab::GrowthReport,
    semiconj_residual: Option<f64>,
}

fn cmd_growth(common: &Common) -> Result<u8, Failure> {
    let cfg = load(common, Kind::Growth, None)?;
    let (map, cones) = cfg.map_and_cones().map_err(usage)?;
    let strip = match (&cfg.strip, &cfg.strip_file) {
        (None, None) => None,
        _ => Some(cfg.strip_map().map_err(usage)?),
    };
    if !check_invariance(&map, &cones, cfg.grid_n).invariant {
        return Err(Failure::NotPh(
            "cone field is not invariant; growth needs an unstable cone field".into(),
        ));
    }
    let exp = expansion_constants(&map, &cones, cfg.grid_n);
    let mut growth = grow_unstable_curve(
        &map,
        &cones,
        cfg.growth_segment(&cones),
        &cfg.growth_options(),
    )
    .map_err(runtime)?;
    let mut semiconj_residual = None;
    if let Some(strip) = &strip {
        let semi = semiconjugacy::solve(strip, &cfg.solve_options()).map_err(runtime)?;
        semiconj_residual = Some(semi.residual);
        growth =
            contradiction_bounds(strip, &semi, &growth, &cfg.growth.bounds).map_err(runtime)?;
    }
    println!(
        "growth: lambda_fit {} K_estimate {} crossover {:?}",
        fmt_f64(growth.lambda_fit),
        fmt_f64(growth.k_estimate),
        growth.bounds.as_ref().and_then(|b| b.crossover_n)
    );
    let body = GrowthEnvelope {
        lambda_abs: exp.lambda_abs,
        lambda_max: exp.lambda_max,
        growth: &growth,
        semiconj_residual,
    };
    let mut out = outputs(&cfg);
    out.json("growth.json", "growth", &body)?;
    out.csv("growth.csv", |w| growth.write_csv(w))?;
    out.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Verify(c) => cmd_verify(c),
        Command::Center(c) => cmd_center(c),
        Command::Semiconj { common, max_iters } => cmd_semiconj(common, *max_iters),
        Command::Annulus(c) => cmd_annulus(c),
        Command::Growth(c) => cmd_growth(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("phtorus: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
