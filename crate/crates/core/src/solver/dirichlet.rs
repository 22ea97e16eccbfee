//! The `(f, G)`-inhomogeneous Dirichlet problem on a truncated filling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{minimize, resolved_diff, Method, Minimizer, PProblem, SolveOptions};
use crate::error::{Error, Result};
use crate::filling::{uniformize, FillingGraph, Uniformization};
use crate::fit::log_log_slope;
use crate::space::FiniteSpace;
use crate::traces::{
    extend_ex, extend_ez, trace_tx, weighted_besov, whitney_average, BoundaryFunction, GraphFunction, ZFunction,
};

/// `β = ε(1-θ)p`.
pub fn beta_for(epsilon: f64, p: f64, theta: f64) -> f64 {
    epsilon * (1.0 - theta) * p
}

pub fn check_exponents(sigma: f64, p: f64, theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param(format!("theta must lie in (0,1), got {theta}")));
    }
    if !(p > 1.0 && p > sigma / theta && p.is_finite()) {
        return Err(Error::param(format!(
            "p = {p} must exceed max(1, sigma/theta) = {}",
            (sigma / theta).max(1.0)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub p: f64,
    pub theta: f64,
    pub band_width: f64,
    pub f: BoundaryFunction,
    pub g: ZFunction,
    pub uni: Uniformization,
    pub energy: PProblem,
}

impl DirichletProblem {
    pub fn beta(&self) -> f64 {
        self.uni.beta
    }

    pub fn pinned_count(&self) -> usize {
        self.energy.pinned.iter().flatten().count()
    }
}

fn finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::param(format!("{what} has non-finite values")));
    }
    Ok(())
}

/// Pins level-`N` vertices within `band_width` (default `α^{-N}`) of `∂Z`
/// and aggregates `G·ν` onto the nearest level-`N` vertex of each sample.
pub fn assemble(
    filling: &FillingGraph,
    space: &FiniteSpace,
    p: f64,
    theta: f64,
    f: &BoundaryFunction,
    g: &ZFunction,
    band_width: Option<f64>,
) -> Result<DirichletProblem> {
    check_exponents(space.sigma(), p, theta)?;
    let boundary = space.boundary();
    let interior = space.interior();
    if f.values.len() != boundary.len() || g.values.len() != interior.len() {
        return Err(Error::param("data lengths do not match the space"));
    }
    finite(&f.values, "f")?;
    finite(&g.values, "G")?;
    let finest_scale = filling.alpha.powi(-(filling.depth() as i32));
    let band = band_width.unwrap_or(finest_scale);
    if !(band >= finest_scale * (1.0 - 1e-12)) {
        return Err(Error::param(format!("band width {band} is below the finest scale {finest_scale}")));
    }
    let uni = uniformize(filling, space, beta_for(filling.epsilon(), p, theta))?;
    let n = filling.vertex_count();
    let mut pinned = vec![None; n];
    if !boundary.is_empty() {
        for v in filling.finest() {
            let x = filling.vertices()[v].point;
            let (_, d) = space.nearest_in(x, boundary.iter().copied()).unwrap();
            if d <= band {
                pinned[v] = Some(whitney_average(space, &boundary, &f.values, x));
            }
        }
        if pinned.iter().all(Option::is_none) {
            return Err(Error::Degenerate("no finest-level vertex lies in the boundary band".into()));
        }
    }
    let mut loads = vec![0.0; n];
    for (k, &i) in interior.iter().enumerate() {
        let (v, _) = filling.nearest_finest(space, i);
        loads[v] += g.values[k] * space.nu()[i];
    }
    let conductances = uni.conductances(p)?;
    let edges = filling.edges().iter().map(|e| (e.a, e.b)).collect();
    Ok(DirichletProblem {
        p,
        theta,
        band_width: band,
        f: f.clone(),
        g: g.clone(),
        uni,
        energy: PProblem { n, edges, conductances, p, pinned, loads, masses: None },
    })
}

/// `I_G(u) = Σ_e c_e|Δ_e u|^p - p Σ_v u_v ℓ_v`.
pub fn energy_ig(problem: &DirichletProblem, u: &GraphFunction) -> f64 {
    problem.energy.energy(&u.values)
}

/// `E_T(u, v) = Σ_e c_e |Δ_e u|^{p-2} Δ_e u · Δ_e v`, edges oriented from lower to higher id.
pub fn et_form(problem: &DirichletProblem, u: &GraphFunction, v: &GraphFunction) -> f64 {
    let pr = &problem.energy;
    pr.edges
        .iter()
        .zip(&pr.conductances)
        .map(|(&(a, b), &c)| {
            let du = resolved_diff(u.values[b], u.values[a]);
            let dv = v.values[b] - v.values[a];
            if du == 0.0 || c == 0.0 {
                0.0
            } else {
                c * du.abs().powf(pr.p - 2.0) * du * dv
            }
        })
        .sum()
}

#[derive(Debug, Clone)]
pub struct DirichletSolution {
    pub u: GraphFunction,
    pub trace: ZFunction,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub method: Method,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// Solves from the averaging extension of `E_Z f`.
pub fn solve(
    problem: &DirichletProblem,
    filling: &FillingGraph,
    space: &FiniteSpace,
    opts: SolveOptions,
) -> Result<DirichletSolution> {
    let init = averaging_init(&problem.f, filling, space)?;
    solve_from(problem, filling, space, &init, opts)
}

/// `E_X(E_Z f)`, or zero when there is no boundary.
pub fn averaging_init(f: &BoundaryFunction, filling: &FillingGraph, space: &FiniteSpace) -> Result<GraphFunction> {
    if f.values.is_empty() {
        return Ok(GraphFunction::constant(filling, 0.0));
    }
    extend_ex(&extend_ez(f, space)?, filling, space)
}

pub fn solve_from(
    problem: &DirichletProblem,
    filling: &FillingGraph,
    space: &FiniteSpace,
    init: &GraphFunction,
    opts: SolveOptions,
) -> Result<DirichletSolution> {
    let m = minimize(&problem.energy, &init.values, opts)?;
    let u = GraphFunction { values: m.values };
    let trace = trace_tx(&u, filling, &problem.uni, space)?;
    Ok(DirichletSolution {
        u,
        trace,
        energy: m.energy,
        grad_norm: m.grad_norm,
        iterations: m.iterations,
        method: m.method,
        converged: m.converged,
        history: m.history,
    })
}

#[derive(Debug, Clone)]
pub struct Extension {
    pub u: GraphFunction,
    /// `Σ_e c_e|Δ_e u|^p` of the extension, i.e. `E_T(u, u)`.
    pub energy: f64,
    pub minimizer: Minimizer,
}

/// `p`-harmonic extension: level-`N` vertices take `u` at the nearest interior
/// sample; coarser vertices minimize the edge energy.
pub fn p_harmonic_extension(
    u: &ZFunction,
    filling: &FillingGraph,
    uni: &Uniformization,
    space: &FiniteSpace,
    p: f64,
    opts: SolveOptions,
) -> Result<Extension> {
    let interior = space.interior();
    if u.values.len() != interior.len() {
        return Err(Error::param("Z-function length does not match the space"));
    }
    let n = filling.vertex_count();
    let mut pinned = vec![None; n];
    for v in filling.finest() {
        let x = filling.vertices()[v].point;
        let (i, _) = space.nearest_in(x, interior.iter().copied()).ok_or_else(|| Error::Degenerate("no interior samples".into()))?;
        let k = interior.binary_search(&i).unwrap();
        pinned[v] = Some(u.values[k]);
    }
    let problem = PProblem {
        n,
        edges: filling.edges().iter().map(|e| (e.a, e.b)).collect(),
        conductances: uni.conductances(p)?,
        p,
        pinned,
        loads: vec![0.0; n],
        masses: None,
    };
    let init = extend_ex(u, filling, space)?;
    let m = minimize(&problem, &init.values, opts)?;
    Ok(Extension { energy: problem.edge_energy(&m.values), u: GraphFunction { values: m.values.clone() }, minimizer: m })
}

/// Test functions vanishing on the pinned set: one indicator per free vertex
/// followed by `random` sparse functions with values in `[-1, 1]`.
pub fn el_battery(problem: &DirichletProblem, random: usize, seed: u64) -> Vec<GraphFunction> {
    let pr = &problem.energy;
    let free: Vec<usize> = (0..pr.n).filter(|&i| pr.pinned[i].is_none()).collect();
    let mut out: Vec<GraphFunction> = free
        .iter()
        .map(|&i| {
            let mut v = vec![0.0; pr.n];
            v[i] = 1.0;
            GraphFunction { values: v }
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        let mut v = vec![0.0; pr.n];
        for &i in &free {
            if rng.gen_bool(0.2) {
                v[i] = rng.gen_range(-1.0..1.0);
            }
        }
        out.push(GraphFunction { values: v });
    }
    out
}

/// Largest weak-form residual `|E_T(u, v) - Σ_v v ℓ_v|` over the battery.
pub fn verify_el(problem: &DirichletProblem, solution: &DirichletSolution, battery: &[GraphFunction]) -> f64 {
    battery
        .iter()
        .map(|v| {
            let rhs: f64 = v.values.iter().zip(&problem.energy.loads).map(|(a, b)| a * b).sum();
            (et_form(problem, &solution.u, v) - rhs).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// `max_v (u₁ - u₂)(v)`, positive values are violations.
    pub worst: f64,
    pub vertex: usize,
    pub converged: bool,
}

impl ComparisonReport {
    pub fn holds(&self, slack: f64) -> bool {
        self.worst <= slack
    }
}

#[allow(clippy::too_many_arguments)]
pub fn verify_comparison(
    space: &FiniteSpace,
    filling: &FillingGraph,
    p: f64,
    theta: f64,
    f1: &BoundaryFunction,
    f2: &BoundaryFunction,
    g: &ZFunction,
    opts: SolveOptions,
) -> Result<ComparisonReport> {
    if f1.values.len() != f2.values.len() {
        return Err(Error::param("boundary data lengths differ"));
    }
    if let Some(k) = (0..f1.values.len()).find(|&k| f1.values[k] > f2.values[k]) {
        return Err(Error::param(format!("f1 exceeds f2 at boundary sample index {k}")));
    }
    let s1 = solve(&assemble(filling, space, p, theta, f1, g, None)?, filling, space, opts)?;
    let s2 = solve(&assemble(filling, space, p, theta, f2, g, None)?, filling, space, opts)?;
    let (vertex, worst) = s1
        .u
        .values
        .iter()
        .zip(&s2.u.values)
        .map(|(a, b)| a - b)
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    Ok(ComparisonReport { worst, vertex, converged: s1.converged && s2.converged })
}

#[derive(Debug, Clone)]
pub enum Perturbation {
    Boundary(BoundaryFunction),
    Load(ZFunction),
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub magnitudes: Vec<f64>,
    /// `Σ_e c_e|Δ_e(u_t - u)|^p` per magnitude.
    pub differences: Vec<f64>,
    pub slope: f64,
    /// Exponent the differences are bounded by: boundary `1` (`p ≥ 2`) or `p/2`;
    /// load `p'` (`p ≥ 2`) or `p`.
    pub expected: f64,
}

pub fn expected_stability_exponent(p: f64, perturbation: &Perturbation) -> f64 {
    match (perturbation, p >= 2.0) {
        (Perturbation::Boundary(_), true) => 1.0,
        (Perturbation::Boundary(_), false) => p / 2.0,
        (Perturbation::Load(_), true) => p / (p - 1.0),
        (Perturbation::Load(_), false) => p,
    }
}

/// Solves the base problem and its perturbations `f + t·h` (or `G + t·h`)
/// and fits the log-log slope of the energy of the difference against `t‖h‖_∞`.
#[allow(clippy::too_many_arguments)]
pub fn stability_experiment(
    space: &FiniteSpace,
    filling: &FillingGraph,
    p: f64,
    theta: f64,
    f: &BoundaryFunction,
    g: &ZFunction,
    h: &Perturbation,
    magnitudes: &[f64],
    opts: SolveOptions,
) -> Result<StabilityReport> {
    let positive: Vec<f64> = magnitudes.iter().copied().filter(|t| *t > 0.0).collect();
    let (lo, hi) = positive.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if positive.len() < 2 || hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(Error::param("perturbation magnitudes must span at least two decades"));
    }
    let base_problem = assemble(filling, space, p, theta, f, g, None)?;
    let base = solve(&base_problem, filling, space, opts)?;
    let hnorm = match h {
        Perturbation::Boundary(b) => sup_norm(&b.values),
        Perturbation::Load(z) => sup_norm(&z.values),
    };
    let mut differences = Vec::new();
    for &t in magnitudes {
        let (ft, gt) = match h {
            Perturbation::Boundary(b) => (axpy(&f.values, t, &b.values), g.values.clone()),
            Perturbation::Load(z) => (f.values.clone(), axpy(&g.values, t, &z.values)),
        };
        let pr = assemble(filling, space, p, theta, &BoundaryFunction { values: ft }, &ZFunction { values: gt }, None)?;
        let sol = if t == 0.0 { base.clone() } else { solve(&pr, filling, space, opts)? };
        let diff: Vec<f64> = sol.u.values.iter().zip(&base.u.values).map(|(a, b)| a - b).collect();
        differences.push(base_problem.energy.edge_energy(&diff));
    }
    let pts: Vec<(f64, f64)> = magnitudes.iter().zip(&differences).map(|(t, d)| (t * hnorm, *d)).collect();
    let slope = log_log_slope(&pts).ok_or_else(|| Error::Degenerate("perturbation produced no energy difference".into()))?;
    Ok(StabilityReport { magnitudes: magnitudes.to_vec(), differences, slope, expected: expected_stability_exponent(p, h) })
}

fn axpy(x: &[f64], t: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + t * b).collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBound {
    /// Discrete `B^{θ-σ/p}_{p,p}(∂Z, π)` norm of `f`.
    pub f_norm: f64,
    /// Discrete `L^{p'}(Z, ν)` norm of `G`.
    pub g_norm: f64,
    pub value: f64,
}

/// `K(f,G) = C(‖f‖^p + ‖G‖‖f‖ + (1 + ‖G‖)^{1/(p-1)})`.
pub fn k_bound(space: &FiniteSpace, f: &BoundaryFunction, g: &ZFunction, p: f64, theta: f64, c: f64) -> Result<KBound> {
    check_exponents(space.sigma(), p, theta)?;
    let ids = space.boundary();
    let pi = f.weights(space);
    let lp: f64 = f.values.iter().zip(&pi).map(|(x, w)| w * x.abs().powf(p)).sum();
    let semi = weighted_besov(space, &ids, &f.values, &pi, theta * p - space.sigma(), p)?;
    let f_norm = (lp + semi).powf(1.0 / p);
    let q = p / (p - 1.0);
    let nu = g.weights(space);
    let g_norm = g.values.iter().zip(&nu).map(|(x, w)| w * x.abs().powf(q)).sum::<f64>().powf(1.0 / q);
    let value = c * (f_norm.powf(p) + g_norm * f_norm + (1.0 + g_norm).powf(1.0 / (p - 1.0)));
    Ok(KBound { f_norm, g_norm, value })
}
