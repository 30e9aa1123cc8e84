//! Argument parsing and command dispatch.

use std::ffi::OsString;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tribrick_core::closedform::{
    case1_config, case2_config, case_consistency, f_objective, min_rect_area, rect_area, thin_brick_for_side,
    RectParams,
};
use tribrick_core::geometry::{triangle_metrics, MIN_SIDE};
use tribrick_core::optimizer::{global_max_equilateral, global_max_min_side, SearchDomain, SearchSettings};
use tribrick_core::oracle::{catalogue, match_known_optima, Certificate, MATCH_TOL};

use crate::error::{exit, CliError};
use crate::format::{certificate_to_json, to_json};
use crate::svg::{self, Panel};
use crate::table::to_csv;

/// Samples of the tilt grid per lemma case.
pub const LEMMA_GRID: usize = 10_000;
/// Agreement required between the grid minimum and `|AB| |AC| sin(gamma)`.
pub const LEMMA_TOL: f64 = 1e-9;
pub const EQUILATERAL_CERT: &str = "cert-equilateral.json";
pub const MIN_SIDE_CERT: &str = "cert-min-side.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "tribrick", version, about = "Largest triangles on skew edges of a unit-volume brick")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Shorthand for --format json.
    #[arg(long, global = true, conflicts_with_all = ["csv", "format"])]
    pub json: bool,
    /// Shorthand for --format csv.
    #[arg(long, global = true, conflicts_with = "format")]
    pub csv: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Convergence tolerance of the searches.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Samples per dimension of the coarse search grids.
    #[arg(long = "grid-n", global = true, default_value_t = 33)]
    pub grid_n: usize,
    /// Number of refined multi-starts.
    #[arg(long, global = true, default_value_t = 16)]
    pub starts: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Smallest admissible brick side (default 1/sqrt 2).
    #[arg(long = "min-side", global = true, allow_negative_numbers = true)]
    pub min_side: Option<f64>,
    /// Output file; for verify-bound, the directory receiving certificates.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in certificates (otherwise 0, keeping runs
    /// byte-identical).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run both global searches, write their certificates, check the bound
    /// and the catalogue.
    VerifyBound,
    /// Tabulate the two closed-form families.
    ClosedForm {
        /// Comma-separated parameter values (default: 101 points on [1/2, 1]).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        t: Vec<f64>,
    },
    /// Check the minimal-rectangle property on seeded random triangles.
    LemmaCheck {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Fix the angle at A for every case.
        #[arg(long, allow_negative_numbers = true)]
        gamma: Option<f64>,
        /// Fix |AB| for every case.
        #[arg(long, allow_negative_numbers = true)]
        ab: Option<f64>,
        /// Fix |AC| for every case.
        #[arg(long, allow_negative_numbers = true)]
        ac: Option<f64>,
    },
    /// Build a thin unit-volume brick holding an equilateral triangle of the
    /// given side.
    ThinBrick {
        #[arg(long, allow_negative_numbers = true)]
        side: f64,
        /// Also draw the brick and triangle to this SVG file.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Draw the three maximal arrangements.
    Figure,
}

impl Cli {
    fn format(&self) -> Option<Format> {
        if self.json {
            Some(Format::Json)
        } else if self.csv {
            Some(Format::Csv)
        } else {
            self.format
        }
    }

    pub fn domain(&self) -> SearchDomain {
        SearchDomain::with_min_side(self.min_side.unwrap_or(MIN_SIDE))
    }

    pub fn settings(&self) -> SearchSettings {
        SearchSettings {
            grid_n: self.grid_n,
            starts: self.starts,
            tol: self.tol,
            seed: self.seed,
            ..SearchSettings::default()
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::VerifyBound => verify_bound(cli, out, err),
        Command::ClosedForm { t } => closed_form(cli, t, out),
        Command::LemmaCheck { n, gamma, ab, ac } => lemma_check(cli, *n, [*ab, *ac, *gamma], out, err),
        Command::ThinBrick { side, svg } => thin_brick(cli, *side, svg.as_deref(), out),
        Command::Figure => figure(cli, out),
    }
}

fn data_format(cli: &Cli, command: &str) -> Result<Format, CliError> {
    match cli.format().unwrap_or(Format::Json) {
        Format::Svg => Err(CliError::Usage(format!("{command} writes json or csv, not svg"))),
        f => Ok(f),
    }
}

fn render<T: Serialize>(format: Format, record: &T, rows: &[impl Serialize]) -> Result<String, CliError> {
    match format {
        Format::Csv => to_csv(rows),
        _ => Ok(to_json(record)),
    }
}

/// Writes `text` to `--out` when given, else to `out`.
fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SearchSummary {
    objective: String,
    file: String,
    optimum_sq: f64,
    bound_satisfied: bool,
    margin: f64,
    sharp: bool,
    matched: String,
    unmatched: usize,
}

#[derive(Debug, Serialize)]
struct VerifySummary {
    searches: Vec<SearchSummary>,
    all_optima_matched: bool,
    exit_code: i32,
}

fn summarize(cert: &Certificate, file: &Path) -> SearchSummary {
    let report = match_known_optima(cert, MATCH_TOL);
    let ids: Vec<&str> = report.ids().iter().map(|id| id.tag()).collect();
    SearchSummary {
        objective: cert.objective.tag().to_string(),
        file: file.display().to_string(),
        optimum_sq: cert.optimum_sq,
        bound_satisfied: cert.bound_check.satisfied,
        margin: cert.bound_check.margin,
        sharp: cert.bound_check.sharp,
        matched: ids.join(" "),
        unmatched: report.unmatched.len(),
    }
}

fn verify_bound(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let format = data_format(cli, "verify-bound")?;
    let domain = cli.domain();
    let settings = cli.settings();
    domain.validate()?;
    settings.validate()?;
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;

    let timed = |f: &dyn Fn() -> tribrick_core::Result<Certificate>| -> Result<Certificate, CliError> {
        let start = Instant::now();
        let mut cert = f()?;
        if cli.timing {
            cert.timing_ms = start.elapsed().as_millis() as u64;
        }
        Ok(cert)
    };
    let min_side = timed(&|| global_max_min_side(&domain, &settings))?;
    let equilateral = timed(&|| global_max_equilateral(&domain, &settings))?;

    let mut searches = Vec::new();
    for (cert, name) in [(&min_side, MIN_SIDE_CERT), (&equilateral, EQUILATERAL_CERT)] {
        let path = dir.join(name);
        fs::write(&path, certificate_to_json(cert))?;
        searches.push(summarize(cert, &path));
    }

    let bound_ok = min_side.bound_check.satisfied && equilateral.bound_check.satisfied;
    let all_matched = match_known_optima(&equilateral, MATCH_TOL).covers_catalogue();
    let code = if !bound_ok {
        exit::CHECK_FAILED
    } else if !all_matched {
        exit::CATALOGUE_MISMATCH
    } else {
        exit::OK
    };
    for s in &searches {
        if !s.bound_satisfied {
            writeln!(err, "bound violated: {} optimum_sq {:e} exceeds 2", s.objective, s.optimum_sq)?;
        }
    }
    if bound_ok && !all_matched {
        writeln!(err, "equilateral certificate does not contain every maximal arrangement")?;
    }
    let summary = VerifySummary { searches, all_optima_matched: all_matched, exit_code: code };
    let text = render(format, &summary, &summary.searches)?;
    out.write_all(text.as_bytes())?;
    Ok(code)
}

#[derive(Debug, Serialize)]
struct ClosedFormRow {
    t: f64,
    f: f64,
    case1_a_sq: f64,
    case1_b_sq: f64,
    case1_c_sq: f64,
    case1_d_sq: f64,
    case2_a_sq: f64,
    case2_b_sq: f64,
    case2_c_sq: f64,
    case2_d_sq: f64,
    z: f64,
    consistency: f64,
}

pub fn default_t_sweep() -> Vec<f64> {
    (0..=100).map(|k| 0.5 + 0.5 * k as f64 / 100.0).collect()
}

fn closed_form(cli: &Cli, ts: &[f64], out: &mut dyn Write) -> Result<i32, CliError> {
    let format = data_format(cli, "closed-form")?;
    let ts = if ts.is_empty() { default_t_sweep() } else { ts.to_vec() };
    let rows = ts
        .iter()
        .map(|&t| {
            let c1 = case1_config(t)?;
            let c2 = case2_config(t)?;
            Ok(ClosedFormRow {
                t,
                f: f_objective(t)?,
                case1_a_sq: c1.a_sq,
                case1_b_sq: c1.b_sq,
                case1_c_sq: c1.c_sq,
                case1_d_sq: c1.d_sq,
                case2_a_sq: c2.a_sq,
                case2_b_sq: c2.b_sq,
                case2_c_sq: c2.c_sq,
                case2_d_sq: c2.d_sq,
                z: c2.z,
                consistency: case_consistency(t)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    emit(cli, &render(format, &rows, &rows)?, out)?;
    Ok(exit::OK)
}

#[derive(Debug, Serialize)]
pub struct LemmaCase {
    pub index: usize,
    pub len_ab: f64,
    pub len_ac: f64,
    pub gamma: f64,
    pub grid_min: f64,
    pub theta_at_min: f64,
    pub bound: f64,
    pub at_boundary: bool,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
struct LemmaReport {
    seed: u64,
    n: usize,
    grid: usize,
    passed: usize,
    failed: usize,
    cases: Vec<LemmaCase>,
}

/// Minimizes the rectangle area over a tilt grid of [`LEMMA_GRID`] samples
/// and compares it with the boundary value.
pub fn lemma_case(index: usize, len_ab: f64, len_ac: f64, gamma: f64) -> Result<LemmaCase, CliError> {
    let (_, bound) = min_rect_area(len_ab, len_ac, gamma)?;
    let upper = (FRAC_PI_2 - gamma).max(0.0);
    let samples = if upper == 0.0 { 1 } else { LEMMA_GRID };
    let mut best = (f64::INFINITY, 0.0, 0usize);
    for k in 0..samples {
        let theta = if samples == 1 { 0.0 } else { upper * k as f64 / (samples - 1) as f64 };
        let v = rect_area(&RectParams { len_ab, len_ac, gamma, theta })?;
        if v < best.0 {
            best = (v, theta, k);
        }
    }
    let (grid_min, theta_at_min, k) = best;
    let tol = LEMMA_TOL * bound.abs().max(1.0);
    let endpoint_value = rect_area(&RectParams { len_ab, len_ac, gamma, theta: 0.0 })?;
    // Ties with an endpoint (to rounding) count as attained there.
    let at_boundary = k == 0 || k + 1 == samples || (grid_min - endpoint_value).abs() <= 4.0 * f64::EPSILON * bound;
    let pass = at_boundary && (grid_min - bound).abs() <= tol;
    Ok(LemmaCase { index, len_ab, len_ac, gamma, grid_min, theta_at_min, bound, at_boundary, pass })
}

/// Seeded draw of `(|AB|, |AC|, gamma)`: lengths log-uniform on
/// `[0.1, 10]`, gamma uniform on `(0, pi/2]`. Fixed values override draws.
pub fn lemma_inputs(seed: u64, n: usize, fixed: [Option<f64>; 3]) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let ab = 10f64.powf(rng.gen_range(-1.0..=1.0));
            let ac = 10f64.powf(rng.gen_range(-1.0..=1.0));
            let gamma = FRAC_PI_2 * (1.0 - rng.gen::<f64>());
            [fixed[0].unwrap_or(ab), fixed[1].unwrap_or(ac), fixed[2].unwrap_or(gamma)]
        })
        .collect()
}

fn lemma_check(
    cli: &Cli,
    n: usize,
    fixed: [Option<f64>; 3],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let format = data_format(cli, "lemma-check")?;
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let cases = lemma_inputs(cli.seed, n, fixed)
        .into_iter()
        .enumerate()
        .map(|(i, [ab, ac, g])| lemma_case(i, ab, ac, g))
        .collect::<Result<Vec<_>, CliError>>()?;
    let passed = cases.iter().filter(|c| c.pass).count();
    for c in cases.iter().filter(|c| !c.pass) {
        writeln!(
            err,
            "case {} failed: |AB| = {}, |AC| = {}, gamma = {}, grid min {} vs {}",
            c.index, c.len_ab, c.len_ac, c.gamma, c.grid_min, c.bound
        )?;
    }
    let report = LemmaReport { seed: cli.seed, n, grid: LEMMA_GRID, passed, failed: n - passed, cases };
    emit(cli, &render(format, &report, &report.cases)?, out)?;
    Ok(if passed == n { exit::OK } else { exit::CHECK_FAILED })
}

#[derive(Debug, Serialize)]
pub struct ThinBrickRecord {
    pub side: f64,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub volume: f64,
    pub ex: String,
    pub ey: String,
    pub ez: String,
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub lambda_c: f64,
    pub side_sq: f64,
    pub residual: f64,
    pub min_side: f64,
    pub admissible: bool,
    /// The brick breaks the minimal-side hypothesis.
    pub violation: bool,
}

fn thin_brick(cli: &Cli, side: f64, svg_path: Option<&Path>, out: &mut dyn Write) -> Result<i32, CliError> {
    let format = cli.format().unwrap_or(Format::Json);
    let tb = thin_brick_for_side(side)?;
    let m = triangle_metrics(&tb.brick, &tb.placement);
    let [la, lb, lc] = tb.placement.lambdas();
    let triple = tb.placement.triple();
    let record = ThinBrickRecord {
        side,
        t: tb.config.t,
        a: tb.brick.a,
        b: tb.brick.b,
        c: tb.brick.c,
        volume: tb.brick.volume(),
        ex: triple.ex().to_string(),
        ey: triple.ey().to_string(),
        ez: triple.ez().to_string(),
        lambda_a: la,
        lambda_b: lb,
        lambda_c: lc,
        side_sq: m.min_sq,
        residual: m.eq_residual,
        min_side: tb.brick.min_side(),
        admissible: tb.brick.is_admissible(),
        violation: tb.brick.min_side() < MIN_SIDE - 1e-12,
    };
    let panel = || Panel {
        title: format!("side {side}"),
        caption: format!(
            "brick {:.4} x {:.4} x {:.4}{}",
            tb.brick.a,
            tb.brick.b,
            tb.brick.c,
            if record.violation { ", below the minimal side" } else { "" }
        ),
        brick: tb.brick,
        placement: tb.placement,
    };
    if let Some(path) = svg_path {
        fs::write(path, svg::render(&[panel()]))?;
    }
    let text = match format {
        Format::Svg => svg::render(&[panel()]),
        f => render(f, &record, std::slice::from_ref(&record))?,
    };
    emit(cli, &text, out)?;
    Ok(exit::OK)
}

/// Panels of the three maximal arrangements, in catalogue order.
pub fn catalogue_panels() -> Vec<Panel> {
    catalogue()
        .iter()
        .map(|opt| {
            let w = opt.witness();
            let [x, y, z] = opt.brick_sq;
            Panel {
                title: opt.id.tag().to_string(),
                caption: format!("squared sides {x:.4}, {y:.4}, {z:.4}; triangle side^2 {:.4}", w.side_sq),
                brick: w.brick,
                placement: w.placement,
            }
        })
        .collect()
}

fn figure(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(f @ (Format::Json | Format::Csv)) = cli.format() {
        return Err(CliError::Usage(format!("figure requires svg output, got {f:?}")));
    }
    emit(cli, &svg::render(&catalogue_panels()), out)?;
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tribrick").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["tribrick", "figure"]).unwrap();
        assert_eq!(cli.settings(), SearchSettings::default());
        assert_eq!(cli.domain(), SearchDomain::admissible());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&[]).0, exit::USAGE);
        assert_eq!(run_args(&["bogus"]).0, exit::USAGE);
        assert_eq!(run_args(&["closed-form", "--json", "--csv"]).0, exit::USAGE);
        assert_eq!(run_args(&["closed-form", "--t", "0.5,-1"]).0, exit::USAGE);
        assert_eq!(run_args(&["closed-form", "--format", "svg"]).0, exit::USAGE);
        assert_eq!(run_args(&["figure", "--csv"]).0, exit::USAGE);
        assert_eq!(run_args(&["lemma-check", "--n", "0"]).0, exit::USAGE);
        assert_eq!(run_args(&["verify-bound", "--grid-n", "1"]).0, exit::USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, exit::OK);
        assert!(out.contains("verify-bound"));
    }

    #[test]
    fn default_sweep() {
        let ts = default_t_sweep();
        assert_eq!(ts.len(), 101);
        assert_eq!(ts[0], 0.5);
        assert_eq!(ts[100], 1.0);
    }

    #[test]
    fn right_angle_lemma_case() {
        let c = lemma_case(0, 1.0, 2.0, FRAC_PI_2).unwrap();
        assert!(c.pass && c.at_boundary);
        assert_eq!(c.theta_at_min, 0.0);
        assert!((c.grid_min - 2.0).abs() <= 1e-15);
    }

    #[test]
    fn lemma_inputs_honour_fixed_values() {
        let xs = lemma_inputs(0, 5, [Some(1.0), None, Some(0.5)]);
        assert!(xs.iter().all(|x| x[0] == 1.0 && x[2] == 0.5));
        assert!(xs.iter().all(|x| (0.1..=10.0).contains(&x[1])));
        assert_eq!(lemma_inputs(3, 5, [None; 3]), lemma_inputs(3, 5, [None; 3]));
    }
}
