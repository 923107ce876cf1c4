//! Verbs of the `loewner` binary. Every verb resolves one [`RunConfig`],
//! writes its artifacts under `--out`, and returns whether all of its checks
//! passed.

use std::error::Error as StdError;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loewner_core::circlemap::TOL_EVAL;
use loewner_core::confmap::{self, JordanCurve, MapOptions};
use loewner_core::flow::{self, FlowSummary, Scheme};
use loewner_core::herglotz::{HerglotzField, DEFAULT_EPS};
use loewner_core::measures::{self, SolveOptions};
use loewner_core::{radius, serial, CircleMeasure};
use serde::Serialize;
use serde_json::json;

use crate::config::{AlphaChoice, FamilyKind, RunConfig};
use crate::output;
use crate::report::{Check, SuiteReport};
use crate::suites::{self, SuiteId};

pub type CliResult<T> = std::result::Result<T, Box<dyn StdError>>;

/// Prints a line, ignoring a closed stdout (e.g. piped into `head`).
fn say(line: String) {
    let _ = writeln!(io::stdout().lock(), "{line}");
}

#[derive(Debug, Parser)]
#[command(name = "loewner", version, about = "Loewner flow of analytic circle maps: builders, solvers and verification")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every verb; unset flags fall back to `--config` and then
/// to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON run configuration (as printed by `dump-config`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Grid half-size N (power of two).
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub family: Option<FamilyKind>,
    /// Möbius parameter, `re` or `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub a: Option<[f64; 2]>,
    /// Germ parameter, `re` or `re,im`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub b: Option<[f64; 2]>,
    /// Fourier-family coefficients `b_1, b_2, ...` as `re,im;re,im;...`.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_coeffs)]
    pub coeffs: Option<Coeffs>,
    #[arg(long, global = true, value_enum)]
    pub alpha: Option<AlphaChoice>,
    /// Conformal exponent.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub s: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", global = true)]
    pub tol: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coeffs(pub Vec<[f64; 2]>);

fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let mut parts = s.split(',').map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")));
    let re = parts.next().ok_or("empty value")??;
    let im = parts.next().transpose()?.unwrap_or(0.0);
    if parts.next().is_some() {
        return Err(format!("expected re or re,im, got {s:?}"));
    }
    Ok([re, im])
}

fn parse_coeffs(s: &str) -> Result<Coeffs, String> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()
        .map(Coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    Lebesgue,
    Dirac,
    HalfDirac,
    /// Density `1 + cos θ`.
    Fatou,
    /// The `s`-conformal measure of the family's map.
    Conformal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    Circle,
    Ellipse,
    /// Invariant curve `h(r·S¹)` of the family's linearizable map.
    Hull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowScheme {
    Exact,
    Euler,
    Midpoint,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the family's circle map and write it as JSON.
    BuildMap,
    /// Solve for the s-conformal measure; compare with the closed form.
    Measure,
    /// Boundary values of the Herglotz transform of a measure.
    Herglotz {
        #[arg(long, value_enum, default_value = "conformal")]
        measure: MeasureKind,
        /// Radial offsets for the extrapolation, decreasing.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EPS)]
        eps: Vec<f64>,
    },
    /// Exterior Riemann map and capacity of a Jordan curve.
    MapExterior {
        #[arg(long, value_enum, default_value = "ellipse")]
        curve: CurveKind,
        /// Circle radius, or the real semi-axis of the ellipse.
        #[arg(long, default_value_t = 2.0)]
        ra: f64,
        /// Imaginary semi-axis of the ellipse.
        #[arg(long, default_value_t = 1.0)]
        rb: f64,
        /// Level `r > 1` of the invariant curve for `--curve hull`.
        #[arg(long, default_value_t = 1.05)]
        level: f64,
    },
    /// Trajectory of the flow as JSON lines.
    Flow {
        #[arg(long, default_value_t = 0.1)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, value_enum, default_value = "exact")]
        scheme: FlowScheme,
    },
    /// Run verification suites (all when no ids are given).
    Verify {
        /// Suite ids: T1.1 T1.2 T1.3 T1.5 P5.1 T8.3 Fatou Poltoratski
        /// Conformal Capacity Herglotz.
        ids: Vec<String>,
    },
    /// Conformal radius along the flow of the family's germ.
    Radius {
        /// Uniformly spaced, increasing times.
        #[arg(long, value_delimiter = ',', default_values_t = [0.498, 0.499, 0.5, 0.501, 0.502])]
        t_list: Vec<f64>,
    },
    /// Print the resolved configuration.
    DumpConfig,
}

pub fn resolve_config(args: &CommonArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(family) = args.family {
        cfg.family = family;
    }
    if let Some(a) = args.a {
        cfg.a = a;
    }
    if let Some(b) = args.b {
        cfg.b = b;
    }
    if let Some(Coeffs(c)) = &args.coeffs {
        cfg.coeffs = c.clone();
    }
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
    }
    if let Some(s) = args.s {
        cfg.s = s;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    for t in &args.tol {
        cfg.tol.set(t)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(cli: Cli) -> CliResult<bool> {
    let cfg = resolve_config(&cli.common)?;
    match cli.command {
        Command::BuildMap => build_map(&cfg),
        Command::Measure => measure(&cfg),
        Command::Herglotz { measure, eps } => herglotz(&cfg, measure, &eps),
        Command::MapExterior { curve, ra, rb, level } => map_exterior(&cfg, curve, ra, rb, level),
        Command::Flow { t_end, dt, scheme } => flow_cmd(&cfg, t_end, dt, scheme),
        Command::Verify { ids } => verify(&cfg, &ids),
        Command::Radius { t_list } => radius_cmd(&cfg, &t_list),
        Command::DumpConfig => {
            say(format!("{}", serde_json::to_string_pretty(&cfg)?));
            Ok(true)
        }
    }
}

/// Writes the verb's report next to its artifacts and prints the verdicts.
fn finish(cfg: &RunConfig, rep: SuiteReport) -> CliResult<bool> {
    output::write_json(&output::artifact(cfg, &format!("{}.json", rep.id))?, &rep)?;
    for c in &rep.checks {
        say(format!("{}", c.line()));
    }
    Ok(rep.passed)
}

fn build_map(cfg: &RunConfig) -> CliResult<bool> {
    let g = cfg.circle_map()?;
    fs::write(output::artifact(cfg, "map.json")?, serial::to_json(&g)? + "\n")?;
    let mut rep = SuiteReport::new("build-map", "circle map of the selected family", cfg.params());
    rep.push(Check::below("circle_residual", g.circle_residual(), 10.0 * TOL_EVAL));
    let est = g.estimate_rotation_number(20_000);
    let d = ((est.value - g.alpha() + 0.5).rem_euclid(1.0) - 0.5).abs();
    rep.push(Check::below("rotation_number", d, 2.0 * est.error_bound).with("iterations", est.iterations));
    let ann = g.annulus();
    rep.data = json!({
        "alpha": g.alpha(),
        "annulus": [ann.inner, ann.outer],
        "coefficients": g.series().coefficients().len(),
        "linearizable": g.linearizer().is_some(),
        "rotation_estimate": est.value,
    });
    finish(cfg, rep)
}

#[derive(Serialize)]
struct MeasureRow {
    theta: f64,
    density: f64,
    oracle: Option<f64>,
}

fn measure(cfg: &RunConfig) -> CliResult<bool> {
    let g = cfg.circle_map()?;
    let mu = measures::conformal_measure_solve(&g, cfg.s, &SolveOptions::default())?;
    let oracle = match g.linearizer() {
        Some(_) => Some(measures::conformal_measure_oracle(&g, cfg.s)?),
        None => None,
    };
    let mut rep = SuiteReport::new("measure", "s-conformal measure", cfg.params());
    let arcs = measures::verify_conformal(&mu, &g, cfg.s, 100, cfg.seed);
    rep.push(
        Check::below("arc_identity", arcs.max_residual, cfg.tol.conformal_arcs)
            .with("n_arcs", arcs.n_arcs)
            .with("s", cfg.s),
    );
    if let Some(o) = &oracle {
        let gap = mu
            .density()
            .iter()
            .zip(o.density())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        rep.push(Check::below("solver_oracle_gap", gap, cfg.tol.conformal_gap).with("s", cfg.s));
    }
    let theta = cfg.grid().angles();
    let rows = theta.iter().enumerate().map(|(j, &t)| MeasureRow {
        theta: t,
        density: mu.density()[j],
        oracle: oracle.as_ref().map(|o| o.density()[j]),
    });
    output::write_csv(&output::artifact(cfg, "measure.csv")?, cfg, rows)?;
    finish(cfg, rep)
}

#[derive(Serialize)]
struct BoundaryRow {
    theta: f64,
    p: f64,
    q: f64,
    flagged: bool,
}

fn herglotz(cfg: &RunConfig, kind: MeasureKind, eps: &[f64]) -> CliResult<bool> {
    let grid = cfg.grid();
    let fatou = |t: f64| 1.0 + t.cos();
    let mu = match kind {
        MeasureKind::Lebesgue => CircleMeasure::lebesgue(grid),
        MeasureKind::Dirac => CircleMeasure::dirac(0.0, grid),
        MeasureKind::HalfDirac => CircleMeasure::combination(&[
            (0.5, &CircleMeasure::lebesgue(grid)),
            (0.5, &CircleMeasure::dirac(0.0, grid)),
        ])?,
        MeasureKind::Fatou => CircleMeasure::from_fn(grid, fatou)?,
        MeasureKind::Conformal => {
            measures::conformal_measure_solve(&cfg.circle_map()?, cfg.s, &SolveOptions::default())?
        }
    };
    let bv = HerglotzField::new(&mu).boundary_values(eps)?;
    let mut rep = SuiteReport::new("herglotz", "Herglotz boundary values", cfg.params());
    rep.extend(suites::herglotz_checks("input", &mu, cfg.tol.herglotz_infinity));
    if kind == MeasureKind::Fatou {
        let err = grid
            .angles()
            .iter()
            .zip(&bv.p)
            .map(|(t, p)| (p - fatou(-t)).abs())
            .fold(0.0, f64::max);
        rep.push(Check::below("fatou", err, cfg.tol.fatou).with("eps", json!(eps)));
    }
    let rows = grid.angles().into_iter().enumerate().map(|(j, theta)| BoundaryRow {
        theta,
        p: bv.p[j],
        q: bv.q[j],
        flagged: bv.flagged[j],
    });
    output::write_csv(&output::artifact(cfg, "herglotz.csv")?, cfg, rows)?;
    finish(cfg, rep)
}

#[derive(Serialize)]
struct CorrespondenceRow {
    theta: f64,
    x: f64,
    y: f64,
}

fn map_exterior(cfg: &RunConfig, curve: CurveKind, ra: f64, rb: f64, level: f64) -> CliResult<bool> {
    let grid = cfg.grid();
    let jordan = match curve {
        CurveKind::Circle => JordanCurve::circle(ra, grid)?,
        CurveKind::Ellipse => JordanCurve::ellipse(ra, rb, grid)?,
        CurveKind::Hull => confmap::hull_from_invariant_curve(&cfg.circle_map()?, level)?,
    };
    let opts = MapOptions::default();
    let map = confmap::exterior_map(&jordan, opts)?;
    let mut rep = SuiteReport::new("map-exterior", "exterior Riemann map", cfg.params());
    rep.push(Check::below("map_residual", map.residual(), opts.tol_map));
    match curve {
        CurveKind::Circle => {
            rep.push(Check::within("capacity", map.capacity(), ra.ln(), cfg.tol.capacity).with("radius", ra))
        }
        CurveKind::Ellipse => rep.push(
            Check::within("capacity", map.capacity(), ((ra + rb) / 2.0).ln(), cfg.tol.capacity)
                .with("a", ra)
                .with("b", rb),
        ),
        CurveKind::Hull => {}
    }
    rep.data = json!({"capacity": map.capacity(), "iterations": map.iterations()});
    output::write_json(&output::artifact(cfg, "exterior.json")?, &map)?;
    let rows = map
        .boundary_correspondence(grid)
        .into_iter()
        .map(|(theta, z)| CorrespondenceRow { theta, x: z.re, y: z.im });
    output::write_csv(&output::artifact(cfg, "correspondence.csv")?, cfg, rows)?;
    finish(cfg, rep)
}

#[derive(Serialize)]
struct TrajectoryLine {
    seed: u64,
    scheme: FlowScheme,
    #[serde(flatten)]
    state: FlowSummary,
}

fn flow_cmd(cfg: &RunConfig, t_end: f64, dt: f64, scheme: FlowScheme) -> CliResult<bool> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}").into());
    }
    let g = cfg.circle_map()?;
    let steps = (t_end / dt).round() as usize;
    let states = match scheme {
        FlowScheme::Exact => (0..=steps)
            .map(|i| flow::phi_exact(&g, i as f64 * dt))
            .collect::<loewner_core::Result<Vec<_>>>()?,
        FlowScheme::Euler => flow::integrate_flow(&g, t_end, dt, Scheme::Euler)?,
        FlowScheme::Midpoint => flow::integrate_flow(&g, t_end, dt, Scheme::Midpoint)?,
    };
    let mut rep = SuiteReport::new("flow", "flow trajectory", cfg.params());
    let worst_circle = states
        .iter()
        .map(|s| s.diagnostics.circle_residual)
        .fold(0.0, f64::max);
    rep.push(Check::below("circle_residual", worst_circle, 10.0 * TOL_EVAL));
    let end = &states[states.len() - 1];
    match scheme {
        FlowScheme::Exact => {
            let cap = states
                .iter()
                .filter_map(|s| s.diagnostics.capacity_error)
                .fold(0.0, f64::max);
            rep.push(Check::below("capacity_error", cap, cfg.tol.backward_capacity));
        }
        FlowScheme::Euler | FlowScheme::Midpoint => {
            let exact = flow::phi_exact(&g, end.t)?;
            rep.push(
                Check::below("gap_to_exact", end.map.sup_distance(&exact.map), cfg.tol.euler_gap)
                    .with("dt", dt)
                    .with("t_end", end.t),
            );
        }
    }
    let lines = states.iter().map(|s| TrajectoryLine {
        seed: cfg.seed,
        scheme,
        state: s.summary(),
    });
    output::write_jsonl(&output::artifact(cfg, "flow.jsonl")?, lines)?;
    finish(cfg, rep)
}

pub fn parse_ids(ids: &[String]) -> CliResult<Vec<SuiteId>> {
    if ids.is_empty() || ids.iter().any(|s| s.eq_ignore_ascii_case("all")) {
        return Ok(SuiteId::ALL.to_vec());
    }
    Ok(ids.iter().map(|s| s.parse()).collect::<Result<Vec<SuiteId>, String>>()?)
}

fn verify(cfg: &RunConfig, ids: &[String]) -> CliResult<bool> {
    let ids = parse_ids(ids)?;
    let battery = suites::run_battery(cfg, &ids);
    output::write_json(&output::artifact(cfg, "verify.json")?, &battery)?;
    for suite in &battery.suites {
        let verdict = if suite.passed { "PASS" } else { "FAIL" };
        say(format!("{verdict} {} — {}", suite.id, suite.title));
        for c in &suite.checks {
            say(format!("    {}", c.line()));
        }
    }
    Ok(battery.passed)
}

#[derive(Serialize)]
struct RadiusRow {
    t: f64,
    r: f64,
    capacity: f64,
    residual_real_identity: Option<f64>,
    residual_imag_identity: Option<f64>,
}

fn radius_cmd(cfg: &RunConfig, t_list: &[f64]) -> CliResult<bool> {
    let trace = radius::radius_trace(&cfg.germ()?, t_list, cfg.grid())?;
    let report = radius::verify_radius_identities(&trace)?;
    let mut rep = SuiteReport::new("radius", "conformal radius along the flow", cfg.params());
    rep.push(Check::holds("radius_increasing", trace.strictly_increasing()));
    for e in &report.entries {
        rep.push(Check::below(format!("residual_real[t={}]", e.t), e.residual_real, cfg.tol.radius).with("t", e.t));
        rep.push(Check::below(format!("residual_imag[t={}]", e.t), e.residual_imag, cfg.tol.radius).with("t", e.t));
    }
    let rows = trace.ts.iter().enumerate().map(|(i, &t)| {
        let entry = report.entries.iter().find(|e| e.t == t);
        RadiusRow {
            t,
            r: trace.radii[i],
            capacity: trace.capacities[i],
            residual_real_identity: entry.map(|e| e.residual_real),
            residual_imag_identity: entry.map(|e| e.residual_imag),
        }
    });
    output::write_csv(&output::artifact(cfg, "radius.csv")?, cfg, rows)?;
    rep.data = serde_json::to_value(&report.entries)?;
    finish(cfg, rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_flags() {
        assert_eq!(parse_complex("0.3").unwrap(), [0.3, 0.0]);
        assert_eq!(parse_complex("0.3,-0.1").unwrap(), [0.3, -0.1]);
        assert!(parse_complex("0.3,1,2").is_err());
        assert!(parse_complex("x").is_err());
        assert_eq!(parse_coeffs("0.05,0;0,0.02").unwrap(), Coeffs(vec![[0.05, 0.0], [0.0, 0.02]]));
    }

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from(["loewner", "--n", "64", "--a", "-0.2,0.1", "--tol", "fatou=1e-5", "dump-config"]).unwrap();
        let cfg = resolve_config(&cli.common).unwrap();
        assert_eq!(cfg.n, 64);
        assert_eq!(cfg.a, [-0.2, 0.1]);
        assert_eq!(cfg.tol.fatou, 1e-5);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cli = Cli::try_parse_from(["loewner", "--n", "100", "dump-config"]).unwrap();
        assert!(resolve_config(&cli.common).is_err());
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(parse_ids(&["T1.2".into(), "nope".into()]).is_err());
        assert_eq!(parse_ids(&[]).unwrap().len(), SuiteId::ALL.len());
    }
}
