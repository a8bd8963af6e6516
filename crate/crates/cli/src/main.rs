//! Command-line interface for the tube-hypersurface analyzer.
//!
//! Subcommands:
//! - `analyze`: admissibility sweep + curvature grid + optional flatness
//!   classification of a surface given as a JSON document.
//! - `model-check`: the seeded property suite over the ambient matrix model.
//! - `jet-eval`: print the jet coefficients of an expression at a point.
//!
//! Exit codes: 0 success, 1 errors (I/O, schema, evaluation), 2 when
//! `--expect-flat` was given and the surface classified as not flat.

use clap::{Parser, Subcommand};
use crtube::analysis::{self, AnalysisOptions};
use crtube::exprlang::{self, Expr, VarSet};
use crtube::so32::checks;
use crtube::surface::SurfaceSpec;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "crtube", version, about = "CR invariants of tube hypersurfaces in C^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a surface spec: admissibility, curvature grid, classification.
    Analyze {
        /// Path to the JSON surface document.
        spec: PathBuf,
        /// Grid resolution, e.g. 21x21.
        #[arg(long, default_value = "21x21")]
        grid: String,
        /// Tolerance override (defaults to the spec's, then 1e-9).
        #[arg(long)]
        tol: Option<f64>,
        /// Run the flatness classification pipeline.
        #[arg(long)]
        classify: bool,
        /// Exit with status 2 unless the surface classifies as flat
        /// (implies --classify).
        #[arg(long)]
        expect_flat: bool,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-sample CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the model-geometry property checks (deterministic given a seed).
    ModelCheck {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Evaluate an expression as a jet and print the coefficient table.
    JetEval {
        /// Expression over t1, t2 (bivariate) or v (univariate).
        #[arg(long)]
        expr: String,
        /// Base point: "t1,t2" for bivariate, "v" for univariate.
        #[arg(long, default_value = "0,0")]
        at: String,
        #[arg(long, default_value_t = 5)]
        degree: usize,
    },
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

/// Honor the CRTUBE_THREADS worker cap when set.
fn configure_threads() {
    if let Ok(value) = std::env::var("CRTUBE_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze {
            spec,
            grid,
            tol,
            classify,
            expect_flat,
            out,
            csv,
        } => cmd_analyze(spec, &grid, tol, classify || expect_flat, expect_flat, out, csv),
        Command::ModelCheck { seed, trials } => Ok(cmd_model_check(seed, trials)),
        Command::JetEval { expr, at, degree } => {
            cmd_jet_eval(&expr, &at, degree)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_grid(grid: &str) -> Result<(usize, usize), String> {
    let (a, b) = grid
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("grid must look like 21x21, got {grid}"))?;
    let n1 = a.trim().parse::<usize>().map_err(|e| format!("bad grid: {e}"))?;
    let n2 = b.trim().parse::<usize>().map_err(|e| format!("bad grid: {e}"))?;
    if n1 == 0 || n2 == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((n1, n2))
}

#[allow(clippy::too_many_arguments)]
fn cmd_analyze(
    spec_path: PathBuf,
    grid: &str,
    tol: Option<f64>,
    classify: bool,
    expect_flat: bool,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<ExitCode, String> {
    let document = std::fs::read_to_string(&spec_path)
        .map_err(|e| format!("cannot read {}: {e}", spec_path.display()))?;
    let spec = SurfaceSpec::load(&document).map_err(|e| e.to_string())?;
    let options = AnalysisOptions {
        grid: parse_grid(grid)?,
        tolerance: tol,
        classify,
    };
    let mut report = analysis::analyze(&spec, &options).map_err(|e| e.to_string())?;
    report.timestamp = chrono::Utc::now().to_rfc3339();

    let json =
        serde_json::to_string_pretty(&report).map_err(|e| format!("serialization: {e}"))?;
    match &out {
        Some(path) => std::fs::write(path, json.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => println!("{json}"),
    }
    if let Some(path) = &csv {
        std::fs::write(path, analysis::samples_to_csv(&report.samples))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }

    if let Some(error) = &report.classification_error {
        eprintln!("classification failed: {error}");
        return Ok(ExitCode::from(if expect_flat { 2 } else { 0 }));
    }
    if expect_flat && !report.is_flat() {
        eprintln!("surface did not classify as flat");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_model_check(seed: u64, trials: usize) -> ExitCode {
    let results = checks::run_all(seed, trials);
    let mut all_pass = true;
    for result in &results {
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag}  {} — {}", result.name, result.detail);
        all_pass &= result.pass;
    }
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_jet_eval(expr_src: &str, at: &str, degree: usize) -> Result<(), String> {
    // decide the variable set by attempting the bivariate parse first
    let bivariate = Expr::parse(expr_src, VarSet::Bivariate);
    match bivariate {
        Ok(expr) => {
            let coords: Vec<f64> = at
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format!("bad --at: {e}"))?;
            if coords.len() != 2 {
                return Err("bivariate expression needs --at t1,t2".into());
            }
            let jet = exprlang::eval_jet2(&expr, (coords[0], coords[1]), degree)
                .map_err(|e| e.to_string())?;
            println!(
                "jet of `{expr_src}` at (t1, t2) = ({}, {}), degree {degree}:",
                coords[0], coords[1]
            );
            for d in 0..=degree {
                for j in 0..=d {
                    let i = d - j;
                    let value = jet.coeff(i, j);
                    if value != 0.0 || d == 0 {
                        println!("  ({i},{j})  {value:.17}");
                    }
                }
            }
            Ok(())
        }
        Err(crtube::Error::UnknownVariable { name, .. }) if name == "v" => {
            let expr = Expr::parse(expr_src, VarSet::Univariate).map_err(|e| e.to_string())?;
            let base: f64 = at
                .trim()
                .parse()
                .map_err(|e| format!("bad --at for a univariate expression: {e}"))?;
            let jet =
                exprlang::eval_jet1(&expr, base, degree).map_err(|e| e.to_string())?;
            println!("jet of `{expr_src}` at v = {base}, degree {degree}:");
            for k in 0..=degree {
                let value = jet.coeff(k);
                if value != 0.0 || k == 0 {
                    println!("  ({k})  {value:.17}");
                }
            }
            Ok(())
        }
        Err(e) => Err(e.to_string()),
    }
}
