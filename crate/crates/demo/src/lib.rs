//! Browser demo: build an example space with its filling, solve a Dirichlet
//! problem on it, and follow the boundary error as the filling deepens.
//!
//! Each export returns a JSON string; the page in `www/` draws it.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use hyperfill::analysis::kellogg_check;
use hyperfill::filling::{build_filling, FillingGraph};
use hyperfill::generators::{generate_example, Example};
use hyperfill::nets::{build_nets, default_depth};
use hyperfill::solver::{assemble, solve, SolveOptions};
use hyperfill::space::FiniteSpace;
use hyperfill::traces::{BoundaryFunction, ZFunction};

const ALPHA: f64 = 3.0;
const TAU: f64 = 3.0;
/// Keeps a browser tab responsive.
const MAX_SAMPLES: usize = 6000;

#[derive(Debug, Serialize)]
pub struct SpaceView {
    pub name: String,
    pub sigma: f64,
    /// Planar coordinates; one-dimensional spaces are drawn on `y = 0`.
    pub points: Vec<[f64; 2]>,
    pub boundary: Vec<bool>,
    pub levels: usize,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Serialize)]
pub struct SolveView {
    pub interior: Vec<[f64; 2]>,
    pub trace: Vec<f64>,
    pub boundary: Vec<[f64; 2]>,
    pub data: Vec<f64>,
    pub energy: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct KelloggView {
    pub levels: Vec<usize>,
    pub errors: Vec<f64>,
    /// `3^{-N}`, for comparison with the errors.
    pub scales: Vec<f64>,
}

fn load(name: &str, depth: u32) -> Result<FiniteSpace, String> {
    let example: Example = name.parse().map_err(|e: hyperfill::Error| e.to_string())?;
    match example.point_count(depth) {
        Some(n) if n <= MAX_SAMPLES => {}
        _ => return Err(format!("{name} at depth {depth} is too large for the demo")),
    }
    generate_example(example, depth).and_then(|s| s.rescale()).map_err(|e| e.to_string())
}

fn filling_for(space: &FiniteSpace) -> Result<FillingGraph, String> {
    let nets = build_nets(space, ALPHA, default_depth(space, ALPHA), 0).map_err(|e| e.to_string())?;
    build_filling(space, &nets, TAU).map_err(|e| e.to_string())
}

fn planar(space: &FiniteSpace, i: usize) -> [f64; 2] {
    match space.point(i) {
        Some([x]) => [*x, 0.0],
        Some([x, y, ..]) => [*x, *y],
        _ => [0.0, 0.0],
    }
}

/// Boundary data by name (`x`, `wave` or `step`) in the first coordinate,
/// normalized to `[0, 1]` over the space.
fn boundary_values(space: &FiniteSpace, kind: &str) -> Result<Vec<f64>, String> {
    let first = |i: usize| space.point(i).and_then(|x| x.first().copied()).unwrap_or(0.0);
    let (lo, hi) = (0..space.len()).map(first).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let width = if hi > lo { hi - lo } else { 1.0 };
    space.boundary().into_iter().map(|i| boundary_data(kind, (first(i) - lo) / width)).collect()
}

fn boundary_data(kind: &str, t: f64) -> Result<f64, String> {
    match kind {
        "x" => Ok(t),
        "wave" => Ok((2.0 * std::f64::consts::PI * t).sin()),
        "step" => Ok(if t < 0.5 { 0.0 } else { 1.0 }),
        other => Err(format!("unknown boundary data `{other}`")),
    }
}

pub fn space_view(name: &str, depth: u32) -> Result<SpaceView, String> {
    let space = load(name, depth)?;
    let filling = filling_for(&space)?;
    Ok(SpaceView {
        name: name.to_string(),
        sigma: space.sigma(),
        points: (0..space.len()).map(|i| planar(&space, i)).collect(),
        boundary: space.boundary_flags().to_vec(),
        levels: filling.depth(),
        vertices: filling.vertex_count(),
        edges: filling.edges().len(),
    })
}

pub fn solve_view(name: &str, depth: u32, p: f64, theta: f64, data: &str, load_value: f64) -> Result<SolveView, String> {
    let space = load(name, depth)?;
    let filling = filling_for(&space)?;
    let boundary = space.boundary();
    let f = BoundaryFunction { values: boundary_values(&space, data)? };
    let g = ZFunction::constant(&space, load_value);
    let problem = assemble(&filling, &space, p, theta, &f, &g, None).map_err(|e| e.to_string())?;
    let sol = solve(&problem, &filling, &space, SolveOptions::default()).map_err(|e| e.to_string())?;
    Ok(SolveView {
        interior: space.interior().into_iter().map(|i| planar(&space, i)).collect(),
        trace: sol.trace.values,
        boundary: boundary.iter().map(|&i| planar(&space, i)).collect(),
        data: f.values,
        energy: sol.energy,
        grad_norm: sol.grad_norm,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}

pub fn kellogg_view(name: &str, depth: u32, p: f64, theta: f64, data: &str) -> Result<KelloggView, String> {
    let space = load(name, depth)?;
    let f = boundary_values(&space, data)?;
    let top = default_depth(&space, ALPHA);
    let levels: Vec<usize> = (2..=top).collect();
    let report = kellogg_check(&space, &BoundaryFunction { values: f }, &levels, ALPHA, TAU, p, theta, SolveOptions::default())
        .map_err(|e| e.to_string())?;
    Ok(KelloggView { scales: levels.iter().map(|&n| ALPHA.powi(-(n as i32))).collect(), levels, errors: report.errors })
}

fn json<T: Serialize>(r: Result<T, String>) -> Result<String, String> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
}

/// Sample points, boundary flags and filling size.
#[wasm_bindgen]
pub fn space(name: &str, depth: u32) -> Result<String, String> {
    json(space_view(name, depth))
}

/// Solution trace on the interior samples for boundary data `data` and constant load.
#[wasm_bindgen]
pub fn dirichlet(name: &str, depth: u32, p: f64, theta: f64, data: &str, load: f64) -> Result<String, String> {
    json(solve_view(name, depth, p, theta, data, load))
}

/// Boundary error of the homogeneous solution for each filling depth.
#[wasm_bindgen]
pub fn boundary_convergence(name: &str, depth: u32, p: f64, theta: f64, data: &str) -> Result<String, String> {
    json(kellogg_view(name, depth, p, theta, data))
}
