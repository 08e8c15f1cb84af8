//! `gharmonics` — command line front end for generalized harmonic functions.
//!
//! A single JSON job configuration drives every run:
//!
//! ```text
//! gharmonics --config job.json [--out PATH] [--format json|csv]
//!            [--tol F] [--max-terms N] [--fd-step F]
//! ```
//!
//! Commands: `eval` (kernel value tables), `synth` (sample a mode sum over a
//! circle or grid), `decompose` (recover mode coefficients from a sample
//! file), `verify` (finite-difference residual report), `limit` (asymptotic
//! gap table over mode indices), `algebra` (bracket / Λ_m / kernel /
//! equivalence / rescale queries).
//!
//! Exit status: 0 on success, 1 on configuration or I/O errors, 2 when a
//! verification exceeds its threshold.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use num_complex::Complex64;

use gharmonics::algebra::{equivalent, kernel_basis, lambda_map, rescale_params, OperatorElement};
use gharmonics::series::{bessel_i, kummer, p_series, theta};
use gharmonics::solutions::{coefficients_from_samples, CircleSamples, SolutionSeries};
use gharmonics::verification::{residual_m, GridSpec};
use gharmonics::EvalConfig;

mod config;
use config::{AlgebraOp, Command, Format, JobConfig, SCHEMA};

#[derive(Debug, Parser)]
#[command(
    name = "gharmonics",
    version,
    about = "generalized harmonic function toolkit"
)]
struct Cli {
    /// Path to the JSON job configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides io.output. Stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides io.format.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Series tail tolerance; overrides eval.tol.
    #[arg(long)]
    tol: Option<f64>,
    /// Series term budget; overrides eval.max_terms.
    #[arg(long)]
    max_terms: Option<u32>,
    /// Finite-difference step; overrides eval.fd_step.
    #[arg(long)]
    fd_step: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let config = JobConfig::load(&cli.config)?;
    config.validate()?;

    let mut eval_cfg = config.eval.unwrap_or_default();
    if let Some(tol) = cli.tol {
        eval_cfg.tol = tol;
    }
    if let Some(max_terms) = cli.max_terms {
        eval_cfg.max_terms = max_terms;
    }
    if let Some(fd_step) = cli.fd_step {
        eval_cfg.fd_step = fd_step;
    }
    eval_cfg
        .validate()
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;

    let out_path = cli
        .out
        .or_else(|| config.io.output.clone().map(PathBuf::from));
    let format = cli.format.or(config.io.format).unwrap_or(Format::Json);

    match config.command {
        Command::Eval => cmd_eval(&config, &eval_cfg, out_path.as_deref(), format),
        Command::Synth => cmd_synth(&config, &eval_cfg, out_path.as_deref(), format),
        Command::Decompose => cmd_decompose(&config, &eval_cfg, out_path.as_deref(), format),
        Command::Verify => cmd_verify(&config, &eval_cfg, out_path.as_deref()),
        Command::Limit => cmd_limit(&config, &eval_cfg, out_path.as_deref(), format),
        Command::Algebra => cmd_algebra(&config, out_path.as_deref()),
    }
}

/// Fixed float formatting: 17 significant digits, so identical jobs produce
/// byte-identical CSV.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn pair(z: Complex64) -> serde_json::Value {
    serde_json::json!([z.re, z.im])
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn grid_spec(config: &JobConfig, eval_cfg: &EvalConfig) -> Result<GridSpec> {
    config
        .grid
        .expect("validated")
        .to_spec(eval_cfg.fd_step)
        .map_err(|e| anyhow::anyhow!(e.to_string()))
}

fn eval_points(config: &JobConfig, eval_cfg: &EvalConfig) -> Result<Vec<Complex64>> {
    if let Some(points) = &config.points {
        Ok(points.iter().map(|p| Complex64::new(p[0], p[1])).collect())
    } else {
        Ok(grid_spec(config, eval_cfg)?.points())
    }
}

fn cmd_eval(
    config: &JobConfig,
    eval_cfg: &EvalConfig,
    out: Option<&Path>,
    format: Format,
) -> Result<ExitCode> {
    let params = config.params;
    let m = config.mode_index.unwrap_or(0);
    let st = params.s + params.t;
    let lambda = params.r + params.s * m as f64;

    struct Row {
        z: Complex64,
        p: Complex64,
        phi: Complex64,
        theta: Complex64,
        bessel: Complex64,
    }
    let mut rows = Vec::new();
    for z in eval_points(config, eval_cfg)? {
        let p = p_series(params, m, z, eval_cfg).map_err(|e| anyhow::anyhow!("P at z={z}: {e}"))?;
        // For s+t = 0 the Kummer reduction is undefined and the kernel
        // already equals the Theta form; report the kernel value there.
        let phi = if st.norm() > 0.0 {
            kummer(
                lambda / st,
                Complex64::from((m + 1) as f64),
                st * z,
                eval_cfg,
            )
            .map_err(|e| anyhow::anyhow!("Phi at z={z}: {e}"))?
        } else {
            p
        };
        let th =
            theta(m, lambda * z, eval_cfg).map_err(|e| anyhow::anyhow!("Theta at z={z}: {e}"))?;
        let bessel = bessel_i(m, z, eval_cfg).map_err(|e| anyhow::anyhow!("I_m at z={z}: {e}"))?;
        rows.push(Row {
            z,
            p,
            phi,
            theta: th,
            bessel,
        });
    }

    let content = match format {
        Format::Csv => {
            let mut s = String::from(
                "re_z,im_z,re_p,im_p,re_phi,im_phi,re_theta,im_theta,re_besseli,im_besseli\n",
            );
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{}",
                    fmt_f64(r.z.re),
                    fmt_f64(r.z.im),
                    fmt_f64(r.p.re),
                    fmt_f64(r.p.im),
                    fmt_f64(r.phi.re),
                    fmt_f64(r.phi.im),
                    fmt_f64(r.theta.re),
                    fmt_f64(r.theta.im),
                    fmt_f64(r.bessel.re),
                    fmt_f64(r.bessel.im),
                )?;
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "z": pair(r.z),
                        "p": pair(r.p),
                        "phi": pair(r.phi),
                        "theta": pair(r.theta),
                        "besseli": pair(r.bessel),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "schema": SCHEMA,
                "command": "eval",
                "mode_index": m,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    write_output(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn build_solution(config: &JobConfig, eval_cfg: &EvalConfig) -> Result<SolutionSeries> {
    SolutionSeries::new(
        config.params,
        config.modes.clone().expect("validated"),
        *eval_cfg,
    )
    .map_err(|e| anyhow::anyhow!(e.to_string()))
}

fn sample_rows_csv(samples: &[(Complex64, Complex64)]) -> Result<String> {
    let mut s = String::from("re_z,im_z,re_u,im_u\n");
    for (z, u) in samples {
        writeln!(
            s,
            "{},{},{},{}",
            fmt_f64(z.re),
            fmt_f64(z.im),
            fmt_f64(u.re),
            fmt_f64(u.im)
        )?;
    }
    Ok(s)
}

fn cmd_synth(
    config: &JobConfig,
    eval_cfg: &EvalConfig,
    out: Option<&Path>,
    format: Format,
) -> Result<ExitCode> {
    let sol = build_solution(config, eval_cfg)?;
    let points: Vec<Complex64> = if let Some(circle) = config.circle {
        (0..circle.n)
            .map(|j| {
                Complex64::from_polar(
                    circle.rho,
                    std::f64::consts::TAU * j as f64 / circle.n as f64,
                )
            })
            .collect()
    } else {
        grid_spec(config, eval_cfg)?.points()
    };

    let mut samples = Vec::with_capacity(points.len());
    for z in points {
        let u = sol
            .eval(z)
            .map_err(|e| anyhow::anyhow!("evaluating at z={z}: {e}"))?;
        samples.push((z, u));
    }

    let manifest = serde_json::json!({
        "schema": SCHEMA,
        "command": "synth",
        "params": config.params,
        "modes": sol.modes(),
        "circle": config.circle.map(|c| serde_json::json!({"rho": c.rho, "n": c.n})),
    });

    let content = match format {
        Format::Csv => sample_rows_csv(&samples)?,
        Format::Json => {
            let rows: Vec<_> = samples
                .iter()
                .map(|(z, u)| serde_json::json!({"z": pair(*z), "u": pair(*u)}))
                .collect();
            let doc = serde_json::json!({
                "schema": SCHEMA,
                "command": "synth",
                "manifest": manifest,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    write_output(out, &content)?;

    // The mode manifest rides next to file output so a later decompose run
    // can be checked against it.
    if let Some(path) = out {
        let manifest_path = path.with_extension(match path.extension() {
            Some(ext) => format!("{}.manifest.json", ext.to_string_lossy()),
            None => "manifest.json".to_string(),
        });
        std::fs::write(
            &manifest_path,
            serde_json::to_string_pretty(&manifest)? + "\n",
        )
        .with_context(|| format!("writing {}", manifest_path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Parse a circle sample CSV (as written by `synth` with a `circle` section)
/// back into samples, checking the expected layout `z_j = ρ·e^{2πij/N}`.
fn read_circle_csv(path: &Path) -> Result<CircleSamples> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("empty sample file")?;
    if header.trim() != "re_z,im_z,re_u,im_u" {
        bail!("unexpected header {header:?}, want re_z,im_z,re_u,im_u");
    }
    let mut zs = Vec::new();
    let mut us = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            bail!("line {}: expected 4 fields, got {}", i + 2, fields.len());
        }
        let nums: Vec<f64> = fields
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("line {}: bad float", i + 2))?;
        zs.push(Complex64::new(nums[0], nums[1]));
        us.push(Complex64::new(nums[2], nums[3]));
    }
    let n = zs.len();
    if n == 0 || !n.is_power_of_two() {
        bail!("sample count {n} is not a power of two");
    }
    let rho = zs[0].norm();
    for (j, z) in zs.iter().enumerate() {
        let expect = Complex64::from_polar(rho, std::f64::consts::TAU * j as f64 / n as f64);
        if (z - expect).norm() > 1e-9 * (1.0 + rho) {
            bail!("sample {j} at {z} is not on the expected circle layout (want {expect})");
        }
    }
    CircleSamples::new(rho, us).map_err(|e| anyhow::anyhow!(e.to_string()))
}

fn cmd_decompose(
    config: &JobConfig,
    eval_cfg: &EvalConfig,
    out: Option<&Path>,
    format: Format,
) -> Result<ExitCode> {
    let input = config.io.input.as_ref().expect("validated");
    let samples = read_circle_csv(Path::new(input))?;
    let [lo, hi] = config.m_range.expect("validated");
    if lo > hi {
        bail!("m_range [{lo}, {hi}] is empty");
    }
    let modes = coefficients_from_samples(&samples, config.params, lo..=hi, eval_cfg)
        .map_err(|e| anyhow::anyhow!(e.to_string()))?;

    let content = match format {
        Format::Csv => {
            let mut s = String::from("m,re_k,im_k\n");
            for mc in &modes {
                writeln!(s, "{},{},{}", mc.m, fmt_f64(mc.k.re), fmt_f64(mc.k.im))?;
            }
            s
        }
        Format::Json => {
            let doc = serde_json::json!({
                "schema": SCHEMA,
                "command": "decompose",
                "rho": samples.rho(),
                "n": samples.len(),
                "modes": modes,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    write_output(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(config: &JobConfig, eval_cfg: &EvalConfig, out: Option<&Path>) -> Result<ExitCode> {
    let sol = build_solution(config, eval_cfg)?;
    let grid = grid_spec(config, eval_cfg)?;
    let threshold = config.threshold.unwrap_or(1e-4);
    let h = eval_cfg.fd_step;

    // Preflight one boundary evaluation so series failures surface as a
    // configuration error instead of a panic inside the sweep.
    sol.eval(Complex64::new(grid.radius + h, 0.0))
        .map_err(|e| anyhow::anyhow!("solution not evaluable on the dilated grid: {e}"))?;
    let sampler = |z: Complex64| sol.eval(z).expect("preflighted");
    let report = residual_m(config.params, &sampler, &grid, h);
    let pass = report.max_abs <= threshold;

    let doc = serde_json::json!({
        "schema": SCHEMA,
        "command": "verify",
        "report": report,
        "threshold": threshold,
        "pass": pass,
    });
    write_output(out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_limit(
    config: &JobConfig,
    eval_cfg: &EvalConfig,
    out: Option<&Path>,
    format: Format,
) -> Result<ExitCode> {
    let radius = config.limit_radius.unwrap_or(1.0);
    let n_grid = config.n_grid.unwrap_or(21);
    let m_values = config.m_values.as_ref().expect("validated");
    let mut rows = Vec::new();
    for &m in m_values {
        let gap = gharmonics::series::asymptotic_gap(config.params, m, radius, n_grid, eval_cfg)
            .map_err(|e| anyhow::anyhow!("gap at m={m}: {e}"))?;
        rows.push((m, gap));
    }
    let content = match format {
        Format::Csv => {
            let mut s = String::from("m,gap\n");
            for (m, gap) in &rows {
                writeln!(s, "{},{}", m, fmt_f64(*gap))?;
            }
            s
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|(m, gap)| serde_json::json!({"m": m, "gap": gap}))
                .collect();
            let doc = serde_json::json!({
                "schema": SCHEMA,
                "command": "limit",
                "radius": radius,
                "n_grid": n_grid,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    write_output(out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn element_json(e: &OperatorElement) -> serde_json::Value {
    serde_json::json!({
        "ident": pair(e.ident),
        "z_del": pair(e.z_del),
        "zbar_delbar": pair(e.zbar_delbar),
        "del_delbar": pair(e.del_delbar),
    })
}

fn cmd_algebra(config: &JobConfig, out: Option<&Path>) -> Result<ExitCode> {
    let op = config.op.expect("validated");
    let elements = config.elements.clone().unwrap_or_default();
    let result = match op {
        AlgebraOp::Bracket => {
            let b = elements[0].bracket(&elements[1]);
            serde_json::json!({"gamma": pair(b.del_delbar), "element": element_json(&b)})
        }
        AlgebraOp::Lambda => {
            let t = lambda_map(&elements[0], config.m.expect("validated"));
            serde_json::json!({
                "q2": pair(t.q2),
                "q1_const": pair(t.q1_const),
                "q1_lin": pair(t.q1_lin),
                "q0": pair(t.q0),
            })
        }
        AlgebraOp::Kernel => {
            let k = kernel_basis(config.m.expect("validated"));
            element_json(&k)
        }
        AlgebraOp::Equivalent => {
            let w = equivalent(&elements[0], &elements[1], config.m.expect("validated"));
            serde_json::json!({"equivalent": w.equivalent, "mu": pair(w.mu)})
        }
        AlgebraOp::Rescale => {
            let p = rescale_params(config.params, config.rho.expect("validated"));
            serde_json::json!({"s": pair(p.s), "t": pair(p.t), "r": pair(p.r)})
        }
    };
    let doc = serde_json::json!({
        "schema": SCHEMA,
        "command": "algebra",
        "op": match op {
            AlgebraOp::Bracket => "bracket",
            AlgebraOp::Lambda => "lambda",
            AlgebraOp::Kernel => "kernel",
            AlgebraOp::Equivalent => "equivalent",
            AlgebraOp::Rescale => "rescale",
        },
        "result": result,
    });
    write_output(out, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
    Ok(ExitCode::SUCCESS)
}
