//! Command-line interface: argument parsing and the subcommand handlers.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use juliagreen_core::goodset::generate_cover;
use juliagreen_core::poincare::{poincare_eval, LandmarkTable};
use juliagreen_core::radvar::{radial_variation_with, sort_rows, DirectionRow};
use juliagreen_core::ray::trace_ray_with;
use juliagreen_core::{
    comb_height, derive_params, dimension_bound, julia_cover, Complex64, DirectionAngle,
    PolyParams, Termination,
};

use crate::config::{OutputFormat, RunConfig, TolSetting};
use crate::error::{CliError, Result, EXIT_DYADIC_TIP, EXIT_OK, EXIT_USAGE};
use crate::formats::{
    ray_csv, AngleDoc, CombDoc, CoverDoc, DimensionRow, IndexDoc, IndexRow, LandmarkDoc,
    ParamsDoc, PoincareDoc, RadVarBatch, RadVarDoc, RayRow, TipDoc,
};
use crate::svg::{comb_figure, decay_figure, rays_figure, RayPath};
use crate::verify::{self, Selection};

#[derive(Debug, Parser)]
#[command(
    name = "juliagreen",
    version,
    about = "Green's mapping numerics for real quadratic Julia sets"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Parameter of P(z) = z² − λ, at least 2.
    #[arg(long, global = true, default_value_t = 6.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Override a tolerance: quad, series, height, tail or poincare.
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    pub tolerances: Vec<TolSetting>,
    /// Directory for output files.
    #[arg(long = "out", global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Output encoding.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for batch work.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
}

impl GlobalArgs {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            out_dir: self.out_dir.clone(),
            format: self.format,
            jobs: self.jobs.map(usize::from),
            ..RunConfig::new(self.lambda)
        }
        .with_tolerances(&self.tolerances)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived constants of the polynomial.
    Params,
    /// Trace an external ray and dump its samples.
    Ray(RayArgs),
    /// Slit heights of the comb of the Poincaré function.
    Comb {
        /// Number of slits, at positions −1, −2, ….
        #[arg(long, default_value_t = 16)]
        count: u64,
    },
    /// Evaluate the Poincaré function and its derivatives.
    Poincare {
        /// Point as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        /// Also list the first K real landmarks.
        #[arg(long, value_name = "K")]
        landmarks: Option<usize>,
    },
    /// Dyadic cover of a good set at a given depth.
    Goodset {
        #[arg(long = "N", value_name = "N")]
        goodset_level: u32,
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Emit the full interval list as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Dimension of the good sets over a range of N, written `lo..hi` or `N`.
    Dim {
        #[arg(long = "N", value_name = "RANGE", default_value = "1..4")]
        range: String,
    },
    /// Radial variation for one or more directions.
    Radvar(RadVarArgs),
    /// Run verification suites: all, dynamics, boettcher, poincare, goodset or radvar.
    Verify {
        #[arg(default_value = "all")]
        suite: Selection,
    },
}

#[derive(Debug, Args)]
pub struct RayArgs {
    /// Angle as `p/q`.
    #[arg(long)]
    pub psi: DirectionAngle,
    /// Number of dyadic height scales below the top.
    #[arg(long, default_value_t = 10)]
    pub scales: u32,
    /// Samples per scale.
    #[arg(long, default_value_t = 16)]
    pub per_scale: u32,
    /// Write the samples as CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Draw the ray over the Julia set cover.
    #[arg(long, value_name = "FILE")]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RadVarArgs {
    /// Angles as `p/q`, comma separated or repeated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub psi: Vec<DirectionAngle>,
    /// Finest dyadic scale.
    #[arg(long, default_value_t = 16)]
    pub nmax: u32,
    /// Accepted for symmetry with the other commands; reports are always JSON.
    #[arg(long)]
    pub json: bool,
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let config = cli.global.run_config();
    match &cli.command {
        Command::Params => cmd_params(&config),
        Command::Ray(args) => cmd_ray(&config, args),
        Command::Comb { count } => cmd_comb(&config, *count),
        Command::Poincare { w, landmarks } => cmd_poincare(&config, w, *landmarks),
        Command::Goodset {
            goodset_level,
            k,
            json,
        } => cmd_goodset(&config, *goodset_level, *k, *json),
        Command::Dim { range } => cmd_dim(&config, range),
        Command::Radvar(args) => cmd_radvar(&config, args),
        Command::Verify { suite } => cmd_verify(*suite),
    }
}

fn params(config: &RunConfig) -> Result<PolyParams> {
    Ok(derive_params(config.lambda)?)
}

/// Writes `content` to `name` under `--out`, or to stdout without it.
fn emit(config: &RunConfig, name: &str, content: &str) -> Result<()> {
    match &config.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, content)?;
            eprintln!("wrote {}", path.display());
        }
        None => print_text(content),
    }
    Ok(())
}

fn print_text(content: &str) {
    if content.ends_with('\n') {
        print!("{content}");
    } else {
        println!("{content}");
    }
}

fn write_file(config: &RunConfig, path: &Path, content: &str) -> Result<()> {
    let path = match &config.out_dir {
        Some(dir) => dir.join(path),
        None => path.to_path_buf(),
    };
    if let Some(parent) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, content)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn cmd_params(config: &RunConfig) -> Result<i32> {
    let p = params(config)?;
    if p.is_degenerate() {
        eprintln!("warning: λ = 2 is the degenerate Chebyshev case; the Julia set is [−2, 2] and a = 0");
    } else if !p.theorem_range {
        eprintln!("warning: λ ≤ 2 + √2 lies outside the range where decay is predicted");
    }
    emit(config, "params.json", &to_json(&ParamsDoc::from(&p))?)?;
    Ok(EXIT_OK)
}

/// Heights `top·2^{−j/per_scale}` for `j = 0..=scales·per_scale`.
fn ray_schedule(p: &PolyParams, scales: u32, per_scale: u32) -> Vec<f64> {
    let top = if p.a > 0.0 { p.a } else { 0.5 };
    let count = scales * per_scale;
    (0..=count)
        .map(|j| top * (-f64::from(j) / f64::from(per_scale)).exp2())
        .collect()
}

fn cmd_ray(config: &RunConfig, args: &RayArgs) -> Result<i32> {
    if args.per_scale == 0 {
        return Err(CliError::Usage("--per-scale must be positive".to_owned()));
    }
    let p = params(config)?;
    let schedule = ray_schedule(&p, args.scales, args.per_scale);
    let ray = trace_ray_with(&p, args.psi, &schedule, &config.ray_config())?;
    let rows: Vec<RayRow> = ray.samples.iter().map(RayRow::from).collect();
    let tip = match ray.termination {
        Termination::Tip { z, h } => Some((z, h)),
        Termination::ReachedHMin => None,
    };
    let csv = ray_csv(&rows);
    let figure = || {
        let path = RayPath {
            label: format!("ψ = {}", args.psi),
            points: rows.iter().map(|r| (r.re_z, r.im_z)).collect(),
            tip: tip.map(|(z, _)| (z.re, z.im)),
        };
        let cover = julia_cover(&p, 5);
        rays_figure(
            &format!("External ray at ψ = {}, λ = {}", args.psi, p.lambda),
            &cover.intervals,
            &[path],
        )
    };
    if let Some(path) = &args.csv {
        write_file(config, path, &csv)?;
    }
    if let Some(path) = &args.svg {
        write_file(config, path, &figure())?;
    }
    if let Some((z, h)) = tip {
        let doc = TipDoc {
            psi: args.psi.into(),
            re_z: z.re,
            im_z: z.im,
            h,
        };
        print_text(&to_json(&doc)?);
        return Ok(EXIT_DYADIC_TIP);
    }
    if args.csv.is_none() && args.svg.is_none() {
        let name = format!("ray_{}_{}", args.psi.numerator(), args.psi.denominator());
        match config.format.unwrap_or(OutputFormat::Csv) {
            OutputFormat::Csv => emit(config, &format!("{name}.csv"), &csv)?,
            OutputFormat::Svg => emit(config, &format!("{name}.svg"), &figure())?,
            OutputFormat::Json => emit(config, &format!("{name}.json"), &to_json(&rows)?)?,
        }
    }
    Ok(EXIT_OK)
}

fn cmd_comb(config: &RunConfig, count: u64) -> Result<i32> {
    let p = params(config)?;
    let slits = (1..=count)
        .map(|l| comb_height(&p, l))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match config.format.unwrap_or_default() {
        OutputFormat::Svg => {
            let heights: Vec<(u64, f64)> = slits.iter().map(|s| (s.position, s.height)).collect();
            let title = format!("Comb slits, λ = {}", p.lambda);
            emit(config, "comb.svg", &comb_figure(&title, &heights))?;
        }
        OutputFormat::Csv => {
            let mut text = String::from("l,h\n");
            for s in &slits {
                text.push_str(&format!("{},{:?}\n", s.position, s.height));
            }
            emit(config, "comb.csv", &text)?;
        }
        OutputFormat::Json => emit(config, "comb.json", &to_json(&CombDoc::new(&slits))?)?,
    }
    Ok(EXIT_OK)
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("`{text}` is not a point of the form re,im")))
    };
    match text.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(parse(re)?, parse(im)?)),
        None => Ok(Complex64::new(parse(text)?, 0.0)),
    }
}

fn cmd_poincare(config: &RunConfig, w: &str, landmarks: Option<usize>) -> Result<i32> {
    let p = params(config)?;
    let w = parse_complex(w)?;
    let poincare = config.poincare_config();
    let value = poincare_eval(&p, w, &poincare)?;
    let landmarks = match landmarks {
        Some(k) if k > 0 => LandmarkTable::build(&p, k, &poincare)?
            .landmarks()
            .iter()
            .map(LandmarkDoc::from)
            .collect(),
        _ => Vec::new(),
    };
    let doc = PoincareDoc {
        lambda: p.lambda,
        w: w.into(),
        value: value.value.into(),
        d1: value.d1.into(),
        d2: value.d2.into(),
        depth: value.depth,
        landmarks,
    };
    emit(config, "poincare.json", &to_json(&doc)?)?;
    Ok(EXIT_OK)
}

fn cmd_goodset(config: &RunConfig, level: u32, k: u32, json: bool) -> Result<i32> {
    let cover = generate_cover(level, k)?;
    let doc = CoverDoc::from(&cover);
    if json || config.format == Some(OutputFormat::Json) {
        emit(config, &format!("goodset_N{level}_k{k}.json"), &to_json(&doc)?)?;
    } else {
        let (num, log2den) = juliagreen_core::goodset::total_length(&cover.keep);
        println!(
            "N = {level}, k = {k}: {} intervals, total length {num}/2^{log2den} ≈ {:.6}",
            cover.keep.len(),
            num as f64 / (log2den as f64).exp2()
        );
    }
    Ok(EXIT_OK)
}

fn parse_range(text: &str) -> Result<(u32, u32)> {
    let bad = || CliError::Usage(format!("`{text}` is not a range like 1..4"));
    let (lo, hi) = match text.split_once("..") {
        Some((lo, hi)) => (lo, hi.trim_start_matches('=')),
        None => (text, text),
    };
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || hi < lo || hi > 64 {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_dim(config: &RunConfig, range: &str) -> Result<i32> {
    let (lo, hi) = parse_range(range)?;
    let rows: Vec<DimensionRow> = (lo..=hi)
        .map(|n| {
            let bound = dimension_bound(n);
            DimensionRow {
                goodset_level: n,
                transfer: bound.transfer,
                word_count: bound.word_count,
                lower_bound: 1.0 - 1.0 / f64::from(n),
            }
        })
        .collect();
    match config.format {
        Some(OutputFormat::Json) => emit(config, "dim.json", &to_json(&rows)?)?,
        Some(OutputFormat::Csv) => {
            let mut text = String::from("N,transfer,word_count,lower_bound\n");
            for r in &rows {
                text.push_str(&format!(
                    "{},{:?},{:?},{:?}\n",
                    r.goodset_level, r.transfer, r.word_count, r.lower_bound
                ));
            }
            emit(config, "dim.csv", &text)?;
        }
        _ => {
            let mut text = format!("{:>3}  {:>9}  {:>10}  {:>9}\n", "N", "transfer", "word count", "1 - 1/N");
            for r in &rows {
                text.push_str(&format!(
                    "{:>3}  {:>9.5}  {:>10.5}  {:>9.5}\n",
                    r.goodset_level, r.transfer, r.word_count, r.lower_bound
                ));
            }
            emit(config, "dim.txt", &text)?;
        }
    }
    Ok(EXIT_OK)
}

fn report_name(angle: &DirectionAngle) -> String {
    format!("radvar_{}_{}.json", angle.numerator(), angle.denominator())
}

fn cmd_radvar(config: &RunConfig, args: &RadVarArgs) -> Result<i32> {
    let p = params(config)?;
    if !p.theorem_range {
        eprintln!(
            "warning: λ = {} is outside the theorem range (λ > 2 + √2); decay is not predicted",
            p.lambda
        );
    }
    let settings = config.radvar_settings();
    let work = |angles: &[DirectionAngle]| -> Vec<DirectionRow> {
        angles
            .par_iter()
            .map(|angle| DirectionRow {
                angle: *angle,
                outcome: radial_variation_with(&p, angle, args.nmax, &settings),
            })
            .collect()
    };
    let rows = match config.jobs {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} workers: {e}")))?
            .install(|| work(&args.psi)),
        None => work(&args.psi),
    };
    let rows = sort_rows(rows);

    let mut index = IndexDoc {
        lambda: p.lambda,
        outside_theorem_range: !p.theorem_range,
        rows: Vec::with_capacity(rows.len()),
    };
    let mut reports = Vec::new();
    for row in &rows {
        let psi = AngleDoc::from(row.angle);
        match &row.outcome {
            Ok(report) => {
                let doc = RadVarDoc::from(report);
                let file = config.out_dir.as_ref().map(|_| report_name(&row.angle));
                if let Some(name) = &file {
                    emit(config, name, &to_json(&doc)?)?;
                }
                eprintln!(
                    "ψ = {}: total {:.10}, tail ratio {:.4}, {}",
                    row.angle,
                    report.total,
                    report.tail_ratio,
                    if report.converged { "converged" } else { "not converged" }
                );
                index.rows.push(IndexRow {
                    psi,
                    status: "ok".to_owned(),
                    file,
                    total: Some(report.total),
                    converged: Some(report.converged),
                    error: None,
                });
                reports.push(doc);
            }
            Err(e) => {
                eprintln!("ψ = {}: error: {e}", row.angle);
                index.rows.push(IndexRow {
                    psi,
                    status: "error".to_owned(),
                    file: None,
                    total: None,
                    converged: None,
                    error: Some(e.to_string()),
                });
            }
        }
    }

    if config.out_dir.is_some() {
        emit(config, "index.json", &to_json(&index)?)?;
        if config.format == Some(OutputFormat::Svg) {
            let series: Vec<(String, Vec<(u32, f64)>)> = reports
                .iter()
                .map(|r| {
                    (
                        format!("{}/{}", r.psi.num, r.psi.den),
                        r.scales.iter().map(|s| (s.n, s.s_n)).collect(),
                    )
                })
                .collect();
            let title = format!("Per-scale radial variation, λ = {}", p.lambda);
            emit(config, "radvar_decay.svg", &decay_figure(&title, &series))?;
        }
    } else {
        print_text(&to_json(&RadVarBatch { index, reports })?);
    }
    Ok(EXIT_OK)
}

fn cmd_verify(selection: Selection) -> Result<i32> {
    let outcomes = verify::run(selection);
    for outcome in &outcomes {
        println!("{outcome}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        return Err(CliError::Verification { failed });
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_the_subcommand() {
        let cli = Cli::try_parse_from([
            "juliagreen", "radvar", "--psi", "2/3,1/5", "--lambda", "4.5", "--tol", "quad=1e-7", "--jobs", "2",
        ])
        .unwrap();
        assert_eq!(cli.global.lambda, 4.5);
        assert_eq!(cli.global.jobs, Some(2));
        let config = cli.global.run_config();
        assert_eq!(config.quad_settings().rel_tol, 1e-7);
        match cli.command {
            Command::Radvar(args) => assert_eq!(args.psi.len(), 2),
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerances_and_angles() {
        assert!(Cli::try_parse_from(["juliagreen", "params", "--tol", "speed=1"]).is_err());
        assert!(Cli::try_parse_from(["juliagreen", "params", "--tol", "quad=-1"]).is_err());
        assert!(Cli::try_parse_from(["juliagreen", "ray", "--psi", "3/2"]).is_err());
        assert!(Cli::try_parse_from(["juliagreen", "verify", "everything"]).is_err());
        assert_eq!(run_from(["juliagreen", "params", "--tol", "speed=1"]), EXIT_USAGE);
    }

    #[test]
    fn ranges_and_points() {
        assert_eq!(parse_range("1..4").unwrap(), (1, 4));
        assert_eq!(parse_range("2..=3").unwrap(), (2, 3));
        assert_eq!(parse_range("5").unwrap(), (5, 5));
        assert!(parse_range("4..1").is_err());
        assert!(parse_range("0..2").is_err());
        assert_eq!(parse_complex("-1.5,2").unwrap(), Complex64::new(-1.5, 2.0));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert!(parse_complex("a,b").is_err());
    }

    #[test]
    fn schedule_falls_back_when_the_height_vanishes() {
        let flat = derive_params(2.0).unwrap();
        let schedule = ray_schedule(&flat, 2, 4);
        assert_eq!(schedule.len(), 9);
        assert_eq!(schedule[0], 0.5);
        assert!((schedule[8] - 0.125).abs() < 1e-15);
    }
}
