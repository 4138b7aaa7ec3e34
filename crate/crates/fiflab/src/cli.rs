//! Command-line front end: contraction-condition checks, fractal function
//! builds, attractor renders, dimension analysis, and the end-to-end spinach
//! case study.
//!
//! Exit codes: 0 success, 2 usage error, 3 counterexamples found, 4 data
//! validation failure, 5 reproduction assertion failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::contraction::{
    check_banach, check_phi, check_suzuki, continuous_example_map, discrete_example_map,
    ContractionModulus, MetricSelfMap, DEFAULT_TOL,
};
use crate::core::{
    linear_interpolant, square_base, square_base_paper, InterpolationData, Interval,
    ScalarFunction, ScalingVector,
};
use crate::data_io::{
    export_cloud_csv, export_report_json, export_samples_csv, export_svg, figure1_fixture,
    load_price_csv, load_xy_csv, normalize_series, spinach_fixture, SvgStyle,
};
use crate::dimension::{analytic_box_dimension, estimate_box_dimension, DimensionMethod, DimensionResult};
use crate::expr;
use crate::fif::{construct_alpha_fif, FractalFunction};
use crate::ifs::{chaos_game, deterministic_attractor, IfsSystem, PointCloud};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_WITNESSES: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;
pub const EXIT_REPRODUCTION: i32 = 5;

const MAX_ITER: usize = 200;
const CASE3_ALPHAS: [f64; 10] = [0.1, 0.2, 0.5, 0.2, 0.4, 0.2, 0.4, 0.2, 0.3, 0.1];

#[derive(Parser)]
#[command(
    name = "fiflab",
    version,
    about = "Fractal interpolation functions: contraction checks, builds, renders and box dimensions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a self-map for violations of a contraction condition
    Check(CheckArgs),
    /// Construct a fractal interpolation function and write samples + metadata
    Build(BuildArgs),
    /// Render the IFS attractor as a point cloud
    Render(RenderArgs),
    /// Compute the box dimension of the FIF graph
    Dim(DimArgs),
    /// Reproduce the spinach price case study end to end
    Casestudy(CasestudyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Banach,
    Phi,
    Suzuki,
}

#[derive(Args)]
struct CheckArgs {
    /// Map to check: `t-continuous`, `t-discrete`, or an expression in `y`
    /// (e.g. "y/2" or "if 0 <= y <= 1 then y*y else 0")
    #[arg(long, default_value = "t-continuous")]
    map: String,

    /// Modulus: `half`, `piecewise`, or an expression in `t`
    #[arg(long, default_value = "half")]
    phi: String,

    /// Condition to scan for
    #[arg(long, value_enum)]
    mode: ModeArg,

    /// Interval carrier `lo:hi` (ignored by `t-discrete`, which uses {0..99})
    #[arg(long, default_value = "0:12", value_parser = parse_f64_range)]
    domain: (f64, f64),

    /// Grid spacing for interval carriers
    #[arg(long, default_value_t = 0.01)]
    delta: f64,

    /// Ratio bound for banach mode
    #[arg(long, default_value_t = 0.99)]
    ratio: f64,

    /// Absolute tolerance in the implication checks
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FixtureArg {
    Spinach,
    Figure1,
}

#[derive(Args, Clone)]
struct BuildCommon {
    /// Bundled dataset
    #[arg(long, value_enum, default_value_t = FixtureArg::Spinach, conflicts_with = "data")]
    fixture: FixtureArg,

    /// Price CSV with header `label,min,max,avg`
    #[arg(long)]
    data: Option<PathBuf>,

    /// Uniform vertical scaling factor
    #[arg(long, default_value_t = 0.4, conflicts_with = "alpha_list", allow_negative_numbers = true)]
    alpha: f64,

    /// Per-interval scaling factors, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha_list: Option<Vec<f64>>,

    /// Base function: `square`, `paper-square`, or a path to a `y,z` CSV
    /// (defaults to `square`; the figure1 fixture defaults to `paper-square`)
    #[arg(long)]
    base: Option<String>,

    /// Dyadic refinement depth per interval
    #[arg(long, default_value_t = 10)]
    depth: u32,

    /// Convergence tolerance for the fixed-point iteration
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: BuildCommon,

    /// Output file prefix
    #[arg(long, default_value = "fif")]
    out: String,

    /// Also write an SVG plot of the samples
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Chaos,
    Deterministic,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    common: BuildCommon,

    #[arg(long, value_enum, default_value_t = MethodArg::Chaos)]
    method: MethodArg,

    /// Points to draw (chaos) or cloud cap per round (deterministic)
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    points: u64,

    /// RNG seed (chaos method); recorded in the output name of reproductions
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Initial chaos-game points to discard
    #[arg(long, default_value_t = 100)]
    burn_in: usize,

    /// Hutchinson iterations (deterministic method)
    #[arg(long, default_value_t = 12)]
    iterations: usize,

    /// Output file prefix
    #[arg(long, default_value = "attractor")]
    out: String,

    /// Also write an SVG scatter plot
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct DimArgs {
    #[command(flatten)]
    common: BuildCommon,

    /// Also estimate the dimension by box-counting a chaos-game render
    #[arg(long)]
    empirical: bool,

    /// Dyadic scale range `k_min:k_max` for the box-count fit
    #[arg(long, default_value = "3:9", value_parser = parse_k_range)]
    k_range: (u32, u32),

    /// Chaos-game points for the empirical estimate
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    points: u64,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value_t = 100)]
    burn_in: usize,
}

#[derive(Args)]
struct CasestudyArgs {
    /// Output directory for the report bundle
    #[arg(long)]
    out: PathBuf,

    #[arg(long, default_value_t = 10)]
    depth: u32,

    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

fn parse_f64_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("bad lower bound {lo:?}"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("bad upper bound {hi:?}"))?;
    if !(hi > lo) {
        return Err(format!("range {s:?} is empty"));
    }
    Ok((lo, hi))
}

fn parse_k_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected k_min:k_max, got {s:?}"))?;
    let lo: u32 = lo.trim().parse().map_err(|_| format!("bad k_min {lo:?}"))?;
    let hi: u32 = hi.trim().parse().map_err(|_| format!("bad k_max {hi:?}"))?;
    Ok((lo, hi))
}

/// Parses and dispatches; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Build(a) => cmd_build(a),
        Command::Render(a) => cmd_render(a),
        Command::Dim(a) => cmd_dim(a),
        Command::Casestudy(a) => cmd_casestudy(a),
    }
}

fn cmd_check(a: CheckArgs) -> i32 {
    let map = match a.map.as_str() {
        "t-continuous" => continuous_example_map(a.domain.0, a.domain.1),
        "t-discrete" => discrete_example_map(),
        src => match expr::parse(src) {
            Ok(e) => MetricSelfMap::on_interval(a.domain.0, a.domain.1, move |y| e.eval(y)),
            Err(err) => {
                eprintln!("error: cannot parse --map expression: {err}");
                return EXIT_USAGE;
            }
        },
    };
    let phi = match a.phi.as_str() {
        "half" => ContractionModulus::half(),
        "piecewise" => ContractionModulus::piecewise(),
        src => {
            let e = match expr::parse(src) {
                Ok(e) => e,
                Err(err) => {
                    eprintln!("error: cannot parse --phi expression: {err}");
                    return EXIT_USAGE;
                }
            };
            match ContractionModulus::new(move |t| e.eval(t)) {
                Ok(m) => m,
                Err(err) => {
                    eprintln!("error: {err}");
                    return EXIT_USAGE;
                }
            }
        }
    };

    let violations = map.carrier_violations(a.delta);
    if !violations.is_empty() {
        let (y, ty) = violations[0];
        eprintln!(
            "warning: {} sampled points map outside the carrier (first: T({y}) = {ty})",
            violations.len()
        );
    }

    let report = match a.mode {
        ModeArg::Banach => check_banach(&map, a.delta, a.ratio, a.tol),
        ModeArg::Phi => check_phi(&map, &phi, a.delta, a.tol),
        ModeArg::Suzuki => check_suzuki(&map, &phi, a.delta, a.tol),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    if report.found_counterexamples() {
        EXIT_WITNESSES
    } else {
        EXIT_OK
    }
}

struct BuildInputs {
    data: InterpolationData,
    g: ScalarFunction,
    b: ScalarFunction,
    alpha: ScalingVector,
}

fn resolve_inputs(c: &BuildCommon) -> Result<BuildInputs, String> {
    let (data, g, default_base) = if let Some(path) = &c.data {
        let file = File::open(path).map_err(|e| format!("cannot open {}: {e}", path.display()))?;
        let series = load_price_csv(file).map_err(|e| e.to_string())?;
        let data = normalize_series(&series);
        let g = linear_interpolant(&data);
        (data, g, "square")
    } else {
        match c.fixture {
            FixtureArg::Spinach => {
                let data = normalize_series(&spinach_fixture());
                let g = linear_interpolant(&data);
                (data, g, "square")
            }
            FixtureArg::Figure1 => {
                let data = figure1_fixture();
                let g = ScalarFunction::from_fn(
                    Interval::new(4.0, 10.0).expect("static interval"),
                    crate::contraction::example_t_continuous,
                );
                (data, g, "paper-square")
            }
        }
    };

    let intervals = data.len() - 1;
    let alpha = match &c.alpha_list {
        Some(list) => {
            if list.len() != intervals {
                return Err(format!(
                    "--alpha-list has {} entries but the data defines {intervals} intervals",
                    list.len()
                ));
            }
            ScalingVector::new(list.clone()).map_err(|e| e.to_string())?
        }
        None => ScalingVector::uniform(c.alpha, intervals).map_err(|e| e.to_string())?,
    };

    let domain = data.partition().domain();
    let base_spec = c.base.as_deref().unwrap_or(default_base);
    let b = match base_spec {
        "square" => square_base(&g, domain),
        "paper-square" => square_base_paper(&g, domain).map_err(|e| e.to_string())?,
        path => {
            let file =
                File::open(path).map_err(|e| format!("cannot open base file {path}: {e}"))?;
            let points = load_xy_csv(file).map_err(|e| e.to_string())?;
            let base_data = InterpolationData::new(points).map_err(|e| e.to_string())?;
            linear_interpolant(&base_data)
        }
    };

    Ok(BuildInputs { data, g, b, alpha })
}

fn write_file<F>(path: &Path, write: F) -> Result<(), String>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), crate::data_io::DataError>,
{
    let file =
        File::create(path).map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    let mut sink = BufWriter::new(file);
    write(&mut sink).map_err(|e| format!("writing {}: {e}", path.display()))
}

fn build_fif(inputs: &BuildInputs, depth: u32, tol: f64) -> Result<FractalFunction, String> {
    construct_alpha_fif(
        &inputs.data,
        &inputs.g,
        &inputs.b,
        &inputs.alpha,
        depth,
        tol,
        MAX_ITER,
    )
    .map_err(|e| e.to_string())
}

fn cmd_build(a: BuildArgs) -> i32 {
    let inputs = match resolve_inputs(&a.common) {
        Ok(i) => i,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_VALIDATION;
        }
    };
    let ff = match build_fif(&inputs, a.common.depth, a.common.tol) {
        Ok(ff) => ff,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_VALIDATION;
        }
    };
    let samples_path = PathBuf::from(format!("{}.samples.csv", a.out));
    let meta_path = PathBuf::from(format!("{}.meta.json", a.out));
    let result = write_file(&samples_path, |sink| export_samples_csv(&ff, sink))
        .and_then(|_| write_file(&meta_path, |sink| export_report_json(&ff.metadata(), sink)))
        .and_then(|_| {
            if a.svg {
                let svg_path = PathBuf::from(format!("{}.svg", a.out));
                let points: Vec<(f64, f64)> = ff
                    .samples()
                    .grid()
                    .nodes()
                    .iter()
                    .copied()
                    .zip(ff.samples().values().iter().copied())
                    .collect();
                write_file(&svg_path, |sink| {
                    export_svg(&points, &SvgStyle::default(), sink)
                })
            } else {
                Ok(())
            }
        });
    match result {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn cmd_render(a: RenderArgs) -> i32 {
    let inputs = match resolve_inputs(&a.common) {
        Ok(i) => i,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_VALIDATION;
        }
    };
    let system = match IfsSystem::build(
        inputs.data.clone(),
        inputs.alpha.clone(),
        inputs.g.clone(),
        inputs.b.clone(),
    ) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let cloud = match a.method {
        MethodArg::Chaos => chaos_game(&system, a.points as usize, a.burn_in, a.seed),
        MethodArg::Deterministic => {
            let seed_cloud = PointCloud::from_data(system.data());
            match deterministic_attractor(&system, &seed_cloud, a.iterations, a.points as usize) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_VALIDATION;
                }
            }
        }
    };
    let csv_path = PathBuf::from(format!("{}.cloud.csv", a.out));
    let result = write_file(&csv_path, |sink| export_cloud_csv(&cloud, sink)).and_then(|_| {
        if a.svg {
            let svg_path = PathBuf::from(format!("{}.svg", a.out));
            let style = SvgStyle {
                markers: true,
                ..Default::default()
            };
            write_file(&svg_path, |sink| export_svg(cloud.points(), &style, sink))
        } else {
            Ok(())
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

#[derive(Serialize)]
struct DimReport {
    analytic: DimensionResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    empirical: Option<DimensionResult>,
}

fn cmd_dim(a: DimArgs) -> i32 {
    let inputs = match resolve_inputs(&a.common) {
        Ok(i) => i,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_VALIDATION;
        }
    };
    let analytic = if inputs.data.is_collinear() {
        eprintln!(
            "warning: data points are collinear; the graph is a line segment, reporting D = 1"
        );
        DimensionResult {
            method: DimensionMethod::Analytic,
            value: 1.0,
            residual: None,
            scales: None,
            slope: None,
            r2: None,
            warnings: vec!["collinear data".to_string()],
        }
    } else {
        match analytic_box_dimension(&inputs.alpha, &inputs.data.partition()) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        }
    };

    let empirical = if a.empirical {
        let system = match IfsSystem::build(
            inputs.data.clone(),
            inputs.alpha.clone(),
            inputs.g.clone(),
            inputs.b.clone(),
        ) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        };
        let cloud = chaos_game(&system, a.points as usize, a.burn_in, a.seed);
        match estimate_box_dimension(&cloud, a.k_range.0, a.k_range.1) {
            Ok(d) => {
                for w in &d.warnings {
                    eprintln!("warning: {w}");
                }
                Some(d)
            }
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        }
    } else {
        None
    };

    let report = DimReport { analytic, empirical };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    EXIT_OK
}

#[derive(Serialize)]
struct CaseEntry {
    label: String,
    alpha: Vec<f64>,
    dimension: f64,
    classical: bool,
    iterations: usize,
    residual: f64,
    interpolation_max_dev: f64,
    samples_csv: String,
    svg: String,
}

#[derive(Serialize)]
struct CasestudySummary {
    fixture: String,
    /// The three fractal-case dimensions, in case order.
    dims: Vec<f64>,
    cases: Vec<CaseEntry>,
}

fn cmd_casestudy(a: CasestudyArgs) -> i32 {
    if let Err(e) = std::fs::create_dir_all(&a.out) {
        eprintln!("error: cannot create {}: {e}", a.out.display());
        return EXIT_VALIDATION;
    }
    let data = normalize_series(&spinach_fixture());
    let g = linear_interpolant(&data);
    let domain = data.partition().domain();
    let b = square_base(&g, domain);
    let partition = data.partition();

    let configs: [(&str, Vec<f64>); 4] = [
        ("alpha-0.4", vec![0.4; 10]),
        ("alpha-0.6", vec![0.6; 10]),
        ("alpha-mixed", CASE3_ALPHAS.to_vec()),
        ("classical", vec![0.0; 10]),
    ];

    let mut cases = Vec::new();
    let mut dims = Vec::new();
    for (label, alphas) in configs {
        let alpha = match ScalingVector::new(alphas) {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        };
        let ff = match construct_alpha_fif(&data, &g, &b, &alpha, a.depth, a.tol, MAX_ITER) {
            Ok(ff) => ff,
            Err(e) => {
                eprintln!("error: building {label}: {e}");
                return EXIT_VALIDATION;
            }
        };
        let dim = match analytic_box_dimension(&alpha, &partition) {
            Ok(d) => d,
            Err(e) => {
                eprintln!("error: dimension for {label}: {e}");
                return EXIT_VALIDATION;
            }
        };
        let max_dev = data
            .points()
            .iter()
            .map(|&(y, z)| (ff.eval(y, None).expect("knot in domain") - z).abs())
            .fold(0.0f64, f64::max);

        let samples_csv = format!("{label}.samples.csv");
        let svg = format!("{label}.svg");
        let write = write_file(&a.out.join(&samples_csv), |sink| {
            export_samples_csv(&ff, sink)
        })
        .and_then(|_| {
            let points: Vec<(f64, f64)> = ff
                .samples()
                .grid()
                .nodes()
                .iter()
                .copied()
                .zip(ff.samples().values().iter().copied())
                .collect();
            write_file(&a.out.join(&svg), |sink| {
                export_svg(&points, &SvgStyle::default(), sink)
            })
        });
        if let Err(msg) = write {
            eprintln!("error: {msg}");
            return 1;
        }

        let classical = label == "classical";
        if !classical {
            dims.push(dim.value);
        }
        cases.push(CaseEntry {
            label: label.to_string(),
            alpha: alpha.alphas().to_vec(),
            dimension: dim.value,
            classical,
            iterations: ff.iterations_used(),
            residual: ff.final_residual(),
            interpolation_max_dev: max_dev,
            samples_csv,
            svg,
        });
    }

    let expected = [
        1.0 + 4f64.log10(),
        1.0 + 6f64.log10(),
        1.0 + 2.6f64.log10(),
    ];
    for (got, want) in dims.iter().zip(expected) {
        if (got - want).abs() > 1e-9 {
            eprintln!("error: computed dimension {got} does not reproduce the expected {want}");
            return EXIT_REPRODUCTION;
        }
    }
    if cases.last().map(|c| c.dimension) != Some(1.0) {
        eprintln!("error: the classical case must have dimension exactly 1");
        return EXIT_REPRODUCTION;
    }

    let summary = CasestudySummary {
        fixture: "spinach".to_string(),
        dims,
        cases,
    };
    if let Err(msg) = write_file(&a.out.join("summary.json"), |sink| {
        export_report_json(&summary, sink)
    }) {
        eprintln!("error: {msg}");
        return 1;
    }
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).expect("summary serializes")
    );
    EXIT_OK
}
