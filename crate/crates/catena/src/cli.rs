//! Command dispatch and result serialization: every command writes a
//! `summary.json` with all scalars plus one or more tab-separated tables
//! suitable for any plotting tool, atomically (write-temp-then-rename).

use crate::config::{Command, RunConfig, Settings};
use crate::deflection;
use crate::dynamics::{self, ModelParams};
use crate::error::{Error, Result};
use crate::fbp;
use crate::geometry::{self, catenoid_profile, solve_branches};
use crate::grid::{Grid, Profile};
use crate::par;
use crate::sar::{self, Model};
use crate::shooting;
use crate::verify;
use clap::Parser;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "catena",
    about = "Electrostatically deflected soap-film bridges: branches, spectra, \
             continuation, deflection direction, and dynamics"
)]
struct Args {
    /// flat key = value config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// one of: catenoid, eigencurve, continue, deflect, thresholds, simulate, potential, verify
    #[arg(long)]
    command: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long = "lambda_max", alias = "lambda-max")]
    lambda_max: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// sar or fbp
    #[arg(long)]
    model: Option<String>,
    /// inner or outer
    #[arg(long)]
    branch: Option<String>,
    #[arg(long = "grid_n", alias = "grid-n")]
    grid_n: Option<String>,
    #[arg(long = "n_eta", alias = "n-eta")]
    n_eta: Option<String>,
    /// eigenvalue index for the eigencurve command
    #[arg(long)]
    index: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long = "c_lo", alias = "c-lo")]
    c_lo: Option<String>,
    #[arg(long = "c_hi", alias = "c-hi")]
    c_hi: Option<String>,
    #[arg(long = "t_max", alias = "t-max")]
    t_max: Option<String>,
    #[arg(long)]
    dt: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// perturbation amplitude for simulate
    #[arg(long)]
    perturb: Option<String>,
    /// perturb with a seeded random profile instead of the first eigenfunction
    #[arg(long = "random_perturbation", alias = "random-perturbation")]
    random_perturbation: bool,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "out_dir", alias = "out-dir")]
    out_dir: Option<String>,
}

pub fn run() -> i32 {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(args: &Args) -> Result<i32> {
    let mut settings = Settings::default();
    if let Some(path) = &args.config {
        settings.load_file(path)?;
    }
    let overrides: &[(&str, &Option<String>)] = &[
        ("command", &args.command),
        ("sigma", &args.sigma),
        ("lambda", &args.lambda),
        ("lambda_max", &args.lambda_max),
        ("steps", &args.steps),
        ("model", &args.model),
        ("branch", &args.branch),
        ("grid_n", &args.grid_n),
        ("n_eta", &args.n_eta),
        ("index", &args.index),
        ("samples", &args.samples),
        ("c_lo", &args.c_lo),
        ("c_hi", &args.c_hi),
        ("t_max", &args.t_max),
        ("dt", &args.dt),
        ("tol", &args.tol),
        ("perturb", &args.perturb),
        ("seed", &args.seed),
        ("out_dir", &args.out_dir),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            settings.set(key, v)?;
        }
    }
    if args.random_perturbation {
        settings.set("random_perturbation", "true")?;
    }
    let cfg = settings.build()?;

    let (summary, tables, code) = match cfg.command {
        Command::Catenoid => cmd_catenoid(&cfg)?,
        Command::Eigencurve => cmd_eigencurve(&cfg)?,
        Command::Continue => cmd_continue(&cfg)?,
        Command::Deflect => cmd_deflect(&cfg)?,
        Command::Thresholds => cmd_thresholds(&cfg)?,
        Command::Simulate => cmd_simulate(&cfg)?,
        Command::Potential => cmd_potential(&cfg)?,
        Command::Verify => cmd_verify(&cfg)?,
    };

    std::fs::create_dir_all(&cfg.out_dir)?;
    write_atomic(
        &cfg.out_dir.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).expect("serializable summary") + "\n"),
    )?;
    for (name, text) in tables {
        write_atomic(&cfg.out_dir.join(name), &text)?;
    }
    Ok(code)
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

type CommandOutput = (Value, Vec<(String, String)>, i32);

fn tsv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push('\t');
            }
            let _ = write!(out, "{v:.16e}");
            first = false;
        }
        out.push('\n');
    }
    out
}

fn provenance(cfg: &RunConfig) -> Value {
    json!({
        "grid_n": cfg.grid_n,
        "n_eta": cfg.n_eta,
        "tol": cfg.tol,
        "model": cfg.model.as_str(),
        "branch": cfg.branch.as_str(),
    })
}

fn cmd_catenoid(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = Grid::uniform(cfg.grid_n)?;
    let bp = solve_branches(cfg.sigma)?;
    let u_out = catenoid_profile(bp.c_out, grid);
    let u_in = catenoid_profile(bp.c_in, grid);
    let rows = (0..grid.n())
        .map(|i| vec![grid.node(i), u_out.values()[i], u_in.values()[i]]);
    let table = tsv("z\tu_outer\tu_inner", rows);
    let summary = json!({
        "command": "catenoid",
        "sigma": cfg.sigma,
        "c_out": bp.c_out,
        "c_in": bp.c_in,
        "c_crit": bp.c_crit,
        "sigma_crit": bp.sigma_crit,
        "energy_outer": geometry::surface_energy(&u_out, cfg.sigma),
        "energy_inner": geometry::surface_energy(&u_in, cfg.sigma),
        "provenance": provenance(cfg),
    });
    Ok((summary, vec![("catenoid.tsv".into(), table)], 0))
}

fn cmd_eigencurve(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = Grid::uniform(cfg.grid_n)?;
    let cs: Vec<f64> = (0..cfg.samples)
        .map(|k| cfg.c_lo + (cfg.c_hi - cfg.c_lo) * k as f64 / (cfg.samples - 1) as f64)
        .collect();
    let mus = par::parallel_map(&cs, |&c| shooting::eigenvalue(c, cfg.index, grid));
    let mut rows = Vec::with_capacity(cs.len());
    for (c, mu) in cs.iter().zip(mus) {
        rows.push(vec![*c, mu?.mu]);
    }
    let zero = if cfg.index == 0 {
        shooting::first_eigencurve_zero(cfg.c_lo, cfg.c_hi, grid).ok()
    } else {
        None
    };
    let summary = json!({
        "command": "eigencurve",
        "index": cfg.index,
        "c_lo": cfg.c_lo,
        "c_hi": cfg.c_hi,
        "samples": cfg.samples,
        "zero_crossing": zero.map(|(c, _)| c),
        "zero_slope": zero.map(|(_, s)| s),
        "provenance": provenance(cfg),
    });
    let table = tsv("c\tmu", rows);
    Ok((summary, vec![("eigencurve.tsv".into(), table)], 0))
}

fn continuation_curve(cfg: &RunConfig, grid: Grid) -> Result<sar::ContinuationCurve> {
    match cfg.model {
        Model::Sar => {
            sar::continue_in_lambda(cfg.sigma, cfg.branch, cfg.lambda_max, cfg.steps, grid)
        }
        Model::Fbp => fbp::continue_in_lambda_fbp(
            cfg.sigma,
            cfg.branch,
            cfg.lambda_max,
            cfg.steps,
            grid,
            cfg.n_eta,
        ),
    }
}

fn residual_of(cfg: &RunConfig, u: &Profile, lambda: f64) -> Result<f64> {
    let r = match cfg.model {
        Model::Sar => sar::residual(u, cfg.sigma, lambda)?,
        Model::Fbp => {
            let g = fbp::gfbp(u, cfg.sigma, cfg.n_eta)?;
            sar::residual_with_force(u, cfg.sigma, lambda, &g)?
        }
    };
    Ok(sar::max_abs(&r))
}

fn cmd_continue(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = Grid::uniform(cfg.grid_n)?;
    let curve = continuation_curve(cfg, grid)?;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for p in &curve.points {
        let res = residual_of(cfg, &p.profile, p.lambda)?;
        points.push(json!({
            "lambda": p.lambda,
            "residual": res,
            "converged": res <= cfg.tol.max(1e-8),
            "symmetry_error": p.profile.symmetry_error(),
            "min_gap": p.profile.values().iter().cloned().fold(f64::INFINITY, f64::min) + 1.0,
        }));
        for i in 0..grid.n() {
            rows.push(vec![p.lambda, grid.node(i), p.profile.values()[i]]);
        }
    }
    let summary = json!({
        "command": "continue",
        "sigma": cfg.sigma,
        "lambda_max": cfg.lambda_max,
        "steps": cfg.steps,
        "points": points,
        "provenance": provenance(cfg),
    });
    let table = tsv("lambda\tz\tu", rows);
    Ok((summary, vec![("branch.tsv".into(), table)], 0))
}

fn cmd_deflect(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = Grid::uniform(cfg.grid_n)?;
    let rep = deflection::analyze(cfg.sigma, cfg.branch, cfg.model, grid, cfg.n_eta)?;
    let rows = (0..grid.n()).map(|i| vec![grid.node(i), rep.sensitivity.values()[i]]);
    let r0 = match rep.sign_pattern {
        deflection::SignPattern::TwoSignChanges { r0 } => Some(r0),
        _ => None,
    };
    let summary = json!({
        "command": "deflect",
        "sigma": cfg.sigma,
        "sign_pattern": rep.sign_pattern,
        "r0": r0,
        "criterion_integral": rep.criterion_integral,
        "I1": rep.i1,
        "I4": rep.i4,
        "end_slope_left": rep.end_slopes.0,
        "end_slope_right": rep.end_slopes.1,
        "provenance": provenance(cfg),
    });
    let table = tsv("z\tsensitivity", rows);
    Ok((summary, vec![("deflect.tsv".into(), table)], 0))
}

fn cmd_thresholds(cfg: &RunConfig) -> Result<CommandOutput> {
    let (star, upper) = deflection::find_sigma_thresholds()?;
    let sc = geometry::sigma_crit();
    let lo = sc + 1e-3;
    let hi = 20.0;
    let sigmas: Vec<f64> = (0..cfg.samples)
        .map(|k| lo * (hi / lo).powf(k as f64 / (cfg.samples - 1) as f64))
        .collect();
    let values = par::parallel_map(&sigmas, |&s| -> Result<(f64, f64)> {
        Ok((deflection::criterion_integral(s)?.1, deflection::i4(s)?))
    });
    let mut rows = Vec::new();
    for (s, v) in sigmas.iter().zip(values) {
        let (i1, i4) = v?;
        rows.push(vec![*s, i1, i4]);
    }
    let summary = json!({
        "command": "thresholds",
        "sigma_crit": sc,
        "sigma_star_est": star,
        "sigma_upper_star_est": upper,
        "sweep_samples": cfg.samples,
        "provenance": provenance(cfg),
    });
    let table = tsv("sigma\tI1\tI4", rows);
    Ok((summary, vec![("thresholds.tsv".into(), table)], 0))
}

fn reference_profile(cfg: &RunConfig, grid: Grid) -> Result<Profile> {
    let bp = solve_branches(cfg.sigma)?;
    let u0 = catenoid_profile(bp.c(cfg.branch), grid);
    if cfg.lambda == 0.0 {
        return Ok(u0);
    }
    match cfg.model {
        Model::Sar => sar::solve_stationary(cfg.sigma, cfg.lambda, &u0),
        Model::Fbp => fbp::solve_stationary_fbp(cfg.sigma, cfg.lambda, &u0, cfg.n_eta),
    }
}

fn cmd_simulate(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = Grid::uniform(cfg.grid_n)?;
    let bp = solve_branches(cfg.sigma)?;
    let reference = reference_profile(cfg, grid)?;
    let mut u0 = reference.clone();
    if cfg.random_perturbation {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
        for i in 1..grid.n() - 1 {
            u0.values_mut()[i] += cfg.perturb * rng.gen_range(-1.0..1.0);
        }
    } else {
        let ep = shooting::eigenvalue(bp.c(cfg.branch), 0, grid)?;
        for i in 1..grid.n() - 1 {
            u0.values_mut()[i] += cfg.perturb * ep.v[i];
        }
    }
    let params = ModelParams {
        model: cfg.model,
        sigma: cfg.sigma,
        lambda: cfg.lambda,
        n_eta: cfg.n_eta,
    };
    // Stop once the distance to the reference has shrunk by five decades:
    // below that the fit window would sit in rounding noise.
    // and once it has grown by three, before nonlinear saturation pollutes it.
    let d0 = u0.max_distance(&reference);
    let traj = dynamics::evolve_until(
        &u0,
        cfg.t_max,
        cfg.dt,
        &params,
        &reference,
        Some(1e2 * d0),
        Some(1e-5 * d0),
    )?;
    let report = dynamics::stability_report(&traj, &reference, cfg.sigma, cfg.lambda).ok();
    let rows = traj
        .times
        .iter()
        .zip(&traj.norms)
        .map(|(&t, &n)| vec![t, n])
        .collect::<Vec<_>>();
    let summary = json!({
        "command": "simulate",
        "sigma": cfg.sigma,
        "lambda": cfg.lambda,
        "t_max": cfg.t_max,
        "dt": cfg.dt,
        "perturb": cfg.perturb,
        "random_perturbation": cfg.random_perturbation,
        "seed": cfg.seed,
        "event": traj.event,
        "fitted_rate": report.as_ref().map(|r| r.fitted_rate),
        "spectral_bound": report.as_ref().map(|r| r.spectral_bound),
        "verdict": report.as_ref().map(|r| r.verdict),
        "final_distance": traj.norms.last(),
        "provenance": provenance(cfg),
    });
    let table = tsv("t\tdistance", rows);
    Ok((summary, vec![("trajectory.tsv".into(), table)], 0))
}

fn cmd_potential(cfg: &RunConfig) -> Result<CommandOutput> {
    let grid = Grid::uniform(cfg.grid_n)?;
    let bp = solve_branches(cfg.sigma)?;
    let u = catenoid_profile(bp.c(cfg.branch), grid);
    let psi = fbp::solve_potential(&u, cfg.sigma, cfg.n_eta)?;
    let force = fbp::electrostatic_force(&u, &psi, cfg.sigma)?;
    let mut psi_rows = Vec::with_capacity(psi.n_z * psi.n_eta);
    for i in 0..psi.n_z {
        for j in 0..psi.n_eta {
            psi_rows.push(vec![grid.node(i), j as f64 * psi.h_eta(), psi.at(i, j)]);
        }
    }
    let force_rows = (0..grid.n()).map(|i| vec![grid.node(i), force.values[i]]);
    let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &psi.psi {
        pmin = pmin.min(v);
        pmax = pmax.max(v);
    }
    let summary = json!({
        "command": "potential",
        "sigma": cfg.sigma,
        "psi_min": pmin,
        "psi_max": pmax,
        "force_max": force.values.iter().cloned().fold(0.0f64, f64::max),
        "provenance": provenance(cfg),
    });
    Ok((
        summary,
        vec![
            ("potential.tsv".into(), tsv("z\teta\tpsi", psi_rows)),
            ("force.tsv".into(), tsv("z\tg", force_rows)),
        ],
        0,
    ))
}

fn cmd_verify(_cfg: &RunConfig) -> Result<CommandOutput> {
    let outcome = verify::run_all();
    for c in &outcome.criteria {
        println!(
            "criterion {:2} [{}] {} — {}",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let code = if outcome.all_passed { 0 } else { 4 };
    let summary = serde_json::to_value(&outcome).map_err(|e| Error::NoConvergence {
        what: format!("serialize verify outcome: {e}"),
        iterations: 0,
    })?;
    Ok((summary, Vec::new(), code))
}
