use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use hyperfill::analysis::{capacity_scaling_check, kellogg_check};
use hyperfill::checks::{boundary_radii, run_suite, CheckReport, SuiteOptions};
use hyperfill::filling::{build_filling, uniformize, FillingGraph};
use hyperfill::io::{
    load_filling, load_function, save_filling, save_function, write_nets, write_space, Diagnostics, ProblemFile,
};
use hyperfill::nets::build_nets;
use hyperfill::solver::{assemble, el_battery, verify_el};
use hyperfill::space::FiniteSpace;
use hyperfill::traces::{BoundaryFunction, ZFunction};

use crate::config::RunConfig;
use crate::Failure;

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

fn out_dir(config: &RunConfig) -> Result<&Path, Failure> {
    std::fs::create_dir_all(&config.out)?;
    Ok(&config.out)
}

pub fn generate(config: &RunConfig) -> Result<(), Failure> {
    let space = config.load_space()?;
    let path = out_dir(config)?.join("space.json");
    write_space(&path, &space)?;
    println!(
        "wrote {} ({} samples, {} on the boundary, sigma = {:.4})",
        path.display(),
        space.len(),
        space.boundary().len(),
        space.sigma()
    );
    Ok(())
}

pub struct Built {
    pub space: FiniteSpace,
    pub filling: FillingGraph,
    pub dir: PathBuf,
    pub cached: bool,
}

/// Loads the filling from `<out>/cache/<hash>/` or builds and stores it there.
pub fn built(config: &RunConfig) -> Result<Built, Failure> {
    let space = config.load_space()?;
    let levels = config.levels_for(&space);
    let hash = config.build_hash(levels)?;
    let dir = config.out.join("cache").join(&hash[..16]);
    let filling_path = dir.join("filling.jsonl");
    if filling_path.is_file() {
        let filling = load_filling(&filling_path)?;
        return Ok(Built { space, filling, dir, cached: true });
    }
    std::fs::create_dir_all(&dir)?;
    let nets = build_nets(&space, config.alpha, levels, 0)?;
    let filling = build_filling(&space, &nets, config.tau)?;
    write_space(&dir.join("space.json"), &space)?;
    write_nets(&dir.join("nets.json"), &nets)?;
    save_filling(&filling_path, &filling, None)?;
    Ok(Built { space, filling, dir, cached: false })
}

pub fn build(config: &RunConfig) -> Result<(), Failure> {
    let b = built(config)?;
    println!(
        "{} {} (N = {}, {} vertices, {} edges)",
        if b.cached { "reused" } else { "built" },
        b.dir.display(),
        b.filling.depth(),
        b.filling.vertex_count(),
        b.filling.edges().len()
    );
    Ok(())
}

#[derive(Serialize)]
struct SolveReport {
    config_hash: String,
    seed: u64,
    beta: f64,
    #[serde(flatten)]
    diagnostics: Diagnostics,
}

pub fn solve(config: &RunConfig, problem_path: &Path) -> Result<(), Failure> {
    let pf: ProblemFile = serde_json::from_str(&std::fs::read_to_string(problem_path)?)?;
    let mut config = config.clone();
    config.p = pf.p;
    config.theta = pf.theta;
    config.tol = pf.tol.unwrap_or(config.tol);
    config.method = pf.method.unwrap_or(config.method);
    config.band_width = pf.band_width.or(config.band_width);
    config.validate_geometry()?;
    let Built { space, filling, .. } = built(&config)?;
    config.validate_exponents(&space)?;
    if space.sigma() >= config.p {
        eprintln!("warning: sigma = {} is not below p = {}", space.sigma(), config.p);
    }
    let base = problem_path.parent().unwrap_or(Path::new("."));
    let (boundary, interior) = (space.boundary(), space.interior());
    let f = match &pf.f_csv {
        Some(p) => BoundaryFunction { values: load_function(&base.join(p), &boundary)? },
        None => BoundaryFunction::constant(&space, 0.0),
    };
    let g = match &pf.g_csv {
        Some(p) => ZFunction { values: load_function(&base.join(p), &interior)? },
        None => ZFunction::constant(&space, 0.0),
    };
    let problem = assemble(&filling, &space, config.p, config.theta, &f, &g, config.band_width)?;
    let sol = hyperfill::solver::solve(&problem, &filling, &space, config.solve_opts())?;
    let el = verify_el(&problem, &sol, &el_battery(&problem, 20, config.seed));
    let out = out_dir(&config)?;
    let ids: Vec<usize> = (0..filling.vertex_count()).collect();
    save_function(&out.join("solution.csv"), &ids, &sol.u.values)?;
    save_function(&out.join("trace.csv"), &interior, &sol.trace.values)?;
    let report = SolveReport {
        config_hash: config.hash(),
        seed: config.seed,
        beta: config.beta(),
        diagnostics: Diagnostics {
            energy: sol.energy,
            grad_norm: sol.grad_norm,
            iterations: sol.iterations,
            method: sol.method,
            converged: sol.converged,
            el_residual: el,
        },
    };
    write_json(&out.join("diagnostics.json"), &report)?;
    println!(
        "energy {:.12e}, gradient {:.3e}, {} iterations ({}), EL residual {:.3e}",
        sol.energy, sol.grad_norm, sol.iterations, sol.method, el
    );
    if !sol.converged {
        return Err(Failure::Numerical(format!(
            "solver stopped after {} iterations with gradient norm {:e}",
            sol.iterations, sol.grad_norm
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SuiteReport<'a> {
    config_hash: String,
    seed: u64,
    tol: f64,
    inject_violation: bool,
    report: &'a CheckReport,
}

pub fn check(config: &RunConfig, suite: &str, inject_violation: bool) -> Result<(), Failure> {
    let name = suite.replace('_', "-");
    let opts = SuiteOptions { seed: config.seed, tol: config.tol, inject_violation };
    let report = run_suite(&name, &opts)?;
    let path = out_dir(config)?.join(format!("report-{name}.json"));
    write_json(
        &path,
        &SuiteReport { config_hash: config.hash(), seed: config.seed, tol: config.tol, inject_violation, report: &report },
    )?;
    println!("[{}] {name} {:.1}s {}", if report.passed { "PASS" } else { "FAIL" }, report.seconds, report.summary);
    for (k, v) in &report.metrics {
        println!("    {k} = {v:.4e}");
    }
    match &report.witness {
        _ if report.passed => Ok(()),
        Some(w) => Err(Failure::Assertion(format!("{name}: {w}"))),
        None => Err(Failure::Assertion(format!("{name} failed"))),
    }
}

pub fn capacity(config: &RunConfig, center: usize) -> Result<(), Failure> {
    let Built { space, filling, .. } = built(config)?;
    config.validate_exponents(&space)?;
    let boundary = space.boundary();
    let z0 = *boundary
        .get(center)
        .ok_or_else(|| Failure::Usage(format!("center {center} out of range; the space has {} boundary samples", boundary.len())))?;
    let uni = uniformize(&filling, &space, config.beta())?;
    let scaling =
        capacity_scaling_check(&space, &filling, &uni, z0, &boundary_radii(&space), config.p, config.theta, config.solve_opts())?;
    let mut csv = String::from("radius,upper,lower,predictor,wiener_ratio\n");
    for r in &scaling.rows {
        writeln!(csv, "{},{},{},{},{}", r.radius, r.upper, r.lower, r.predictor, r.wiener_ratio(config.p)).unwrap();
    }
    let path = out_dir(config)?.join("capacity.csv");
    std::fs::write(&path, csv)?;
    let wiener_min = scaling.rows.iter().map(|r| r.wiener_ratio(config.p)).fold(f64::INFINITY, f64::min);
    println!(
        "center {z0}: slopes {:.3} (balls) and {:.3} (boundary pieces), min Wiener ratio {:.3e}; wrote {}",
        scaling.upper_slope,
        scaling.lower_slope,
        wiener_min,
        path.display()
    );
    Ok(())
}

pub fn kellogg(config: &RunConfig, depths: &[usize], f_path: Option<&Path>) -> Result<(), Failure> {
    let space = config.load_space()?;
    config.validate_exponents(&space)?;
    let f = match f_path {
        Some(p) => BoundaryFunction { values: load_function(p, &space.boundary())? },
        None => BoundaryFunction::from_coords(&space, |x| x[0])?,
    };
    let report = kellogg_check(&space, &f, depths, config.alpha, config.tau, config.p, config.theta, config.solve_opts())?;
    let mut csv = String::from("levels,error\n");
    for (n, e) in report.depths.iter().zip(&report.errors) {
        writeln!(csv, "{n},{e}").unwrap();
    }
    let path = out_dir(config)?.join("kellogg.csv");
    std::fs::write(&path, csv)?;
    for (n, e) in report.depths.iter().zip(&report.errors) {
        println!("N = {n}: boundary error {e:.4e}");
    }
    if !report.converged {
        return Err(Failure::Numerical("a solve did not converge".into()));
    }
    Ok(())
}
