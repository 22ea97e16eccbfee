//! Minimization of convex graph `p`-energies
//! `J(u) = Σ_e c_e|u_a - u_b|^p + Σ_v m_v|u_v|^p - p Σ_v ℓ_v u_v`
//! with some vertices pinned.

mod cg;
pub mod dirichlet;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use dirichlet::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// `linear` for `p = 2`, `irls` otherwise.
    #[default]
    Auto,
    Linear,
    Irls,
    Gd,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Linear => "linear",
            Method::Irls => "irls",
            Method::Gd => "gd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Method::Auto),
            "linear" => Ok(Method::Linear),
            "irls" => Ok(Method::Irls),
            "gd" => Ok(Method::Gd),
            _ => Err(Error::param(format!("unknown method `{s}` (expected auto, linear, irls or gd)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub method: Method,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, max_iter: 500, method: Method::Auto }
    }
}

/// A pinned convex `p`-energy on a graph with `n` vertices.
#[derive(Debug, Clone)]
pub struct PProblem {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub conductances: Vec<f64>,
    pub p: f64,
    pub pinned: Vec<Option<f64>>,
    pub loads: Vec<f64>,
    /// Optional `m_v` for the `Σ m_v|u_v|^p` term.
    pub masses: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct Minimizer {
    pub values: Vec<f64>,
    pub energy: f64,
    /// Euclidean norm of the gradient restricted to free vertices.
    pub grad_norm: f64,
    pub iterations: usize,
    pub method: Method,
    pub converged: bool,
    /// Energy after each accepted iteration, starting with the initial guess.
    pub history: Vec<f64>,
}

fn signed_pow(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(q)
    }
}

/// `|y|^p - |x|^p` where `h = y - x` is supplied separately so that small
/// changes of a large value keep their relative accuracy.
fn pow_change(x: f64, y: f64, h: f64, p: f64) -> f64 {
    if x == 0.0 || y == 0.0 || x.signum() != y.signum() {
        return y.abs().powf(p) - x.abs().powf(p);
    }
    let r = h / x;
    if r.abs() < 0.5 {
        x.abs().powf(p) * (p * r.ln_1p()).exp_m1()
    } else {
        y.abs().powf(p) - x.abs().powf(p)
    }
}

/// `u_a - u_b`, with differences below the rounding resolution of the two
/// values snapped to zero; for `p < 2` such noise would otherwise dominate
/// `|Δ|^{p-1}`.
pub fn resolved_diff(ua: f64, ub: f64) -> f64 {
    let d = ua - ub;
    if d.abs() <= 8.0 * f64::EPSILON * ua.abs().max(ub.abs()) {
        0.0
    } else {
        d
    }
}

impl PProblem {
    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::param(format!("p must exceed 1, got {}", self.p)));
        }
        let n = self.n;
        if self.pinned.len() != n || self.loads.len() != n || self.conductances.len() != self.edges.len() {
            return Err(Error::param("problem arrays have inconsistent lengths"));
        }
        if self.masses.as_ref().is_some_and(|m| m.len() != n || m.iter().any(|x| !(*x >= 0.0))) {
            return Err(Error::param("vertex masses must be nonnegative, one per vertex"));
        }
        if self.edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return Err(Error::param("edge endpoints out of range"));
        }
        if self.conductances.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(Error::param("conductances must be finite and nonnegative"));
        }
        if self.loads.iter().any(|x| !x.is_finite()) || self.pinned.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::param("loads and pinned values must be finite"));
        }
        Ok(())
    }

    pub fn free(&self) -> Vec<bool> {
        self.pinned.iter().map(Option::is_none).collect()
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let p = self.p;
        let mut e: f64 = self
            .edges
            .iter()
            .zip(&self.conductances)
            .map(|(&(a, b), &c)| if c > 0.0 { c * (u[a] - u[b]).abs().powf(p) } else { 0.0 })
            .sum();
        if let Some(m) = &self.masses {
            e += m.iter().zip(u).map(|(m, x)| m * x.abs().powf(p)).sum::<f64>();
        }
        e - p * self.loads.iter().zip(u).map(|(l, x)| l * x).sum::<f64>()
    }

    /// `energy(v) - energy(u)`, accumulated term by term with each term
    /// computed relative to its own size, so that changes far below the
    /// rounding level of the total energy are still resolved.
    pub fn energy_change(&self, u: &[f64], v: &[f64]) -> f64 {
        let p = self.p;
        let mut e: f64 = self
            .edges
            .iter()
            .zip(&self.conductances)
            .map(|(&(a, b), &c)| {
                if c > 0.0 {
                    c * pow_change(u[a] - u[b], v[a] - v[b], (v[a] - u[a]) - (v[b] - u[b]), p)
                } else {
                    0.0
                }
            })
            .sum();
        if let Some(m) = &self.masses {
            e += m.iter().zip(u.iter().zip(v)).map(|(m, (&x, &y))| m * pow_change(x, y, y - x, p)).sum::<f64>();
        }
        e - p * self.loads.iter().zip(u.iter().zip(v)).map(|(l, (x, y))| l * (y - x)).sum::<f64>()
    }

    /// `Σ_e c_e |u_a - u_b|^p` alone.
    pub fn edge_energy(&self, u: &[f64]) -> f64 {
        self.edges
            .iter()
            .zip(&self.conductances)
            .map(|(&(a, b), &c)| c * (u[a] - u[b]).abs().powf(self.p))
            .sum()
    }

    /// Full gradient of `J` (pinned entries included).
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let p = self.p;
        let mut g: Vec<f64> = self.loads.iter().map(|l| -p * l).collect();
        for (&(a, b), &c) in self.edges.iter().zip(&self.conductances) {
            if c > 0.0 {
                let t = p * c * signed_pow(resolved_diff(u[a], u[b]), p - 1.0);
                g[a] += t;
                g[b] -= t;
            }
        }
        if let Some(m) = &self.masses {
            for (gi, (mi, x)) in g.iter_mut().zip(m.iter().zip(u)) {
                *gi += p * mi * signed_pow(*x, p - 1.0);
            }
        }
        g
    }

    /// Level below which the free gradient is rounding noise: a few ulps of
    /// every gradient term, plus how far each edge term moves when its
    /// difference shifts by the resolution of the endpoint values (large
    /// near `Δ = 0` when `p < 2`).
    fn gradient_floor(&self, u: &[f64]) -> f64 {
        let p = self.p;
        let mut s: Vec<f64> = self.loads.iter().map(|l| 64.0 * f64::EPSILON * (p * l).abs()).collect();
        for (&(a, b), &c) in self.edges.iter().zip(&self.conductances) {
            let d = (u[a] - u[b]).abs();
            let h = 8.0 * f64::EPSILON * u[a].abs().max(u[b].abs());
            let t = p * c * (64.0 * f64::EPSILON * d.powf(p - 1.0) + (d + h).powf(p - 1.0) - d.powf(p - 1.0));
            s[a] += t;
            s[b] += t;
        }
        if let Some(m) = &self.masses {
            for (si, (mi, x)) in s.iter_mut().zip(m.iter().zip(u)) {
                *si += 64.0 * f64::EPSILON * p * mi * x.abs().powf(p - 1.0);
            }
        }
        let free: Vec<f64> = s.iter().zip(&self.pinned).filter(|(_, pin)| pin.is_none()).map(|(x, _)| *x).collect();
        norm(&free)
    }

    fn free_gradient(&self, u: &[f64]) -> Vec<f64> {
        let mut g = self.gradient(u);
        for (gi, pin) in g.iter_mut().zip(&self.pinned) {
            if pin.is_some() {
                *gi = 0.0;
            }
        }
        g
    }

    /// Rejects problems whose energy is unbounded below: a free component
    /// with nonzero net load and nothing anchoring its level.
    pub fn check_bounded(&self) -> Result<()> {
        let n = self.n;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut anchored = vec![false; n];
        for i in 0..n {
            if self.masses.as_ref().is_some_and(|m| m[i] > 0.0) {
                anchored[i] = true;
            }
        }
        for (&(a, b), &c) in self.edges.iter().zip(&self.conductances) {
            if c <= 0.0 {
                continue;
            }
            match (self.pinned[a].is_some(), self.pinned[b].is_some()) {
                (false, false) => {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
                (false, true) => anchored[a] = true,
                (true, false) => anchored[b] = true,
                (true, true) => {}
            }
        }
        let mut net = vec![0.0; n];
        let mut scale = vec![0.0; n];
        let mut comp_anchor = vec![false; n];
        for i in (0..n).filter(|&i| self.pinned[i].is_none()) {
            let r = find(&mut parent, i);
            net[r] += self.loads[i];
            scale[r] += self.loads[i].abs();
            comp_anchor[r] |= anchored[i];
        }
        for i in (0..n).filter(|&i| self.pinned[i].is_none()) {
            let r = find(&mut parent, i);
            if !comp_anchor[r] && net[r].abs() > 1e-12 * scale[r] {
                return Err(Error::Unbounded(r));
            }
        }
        Ok(())
    }

    fn load_scale(&self) -> f64 {
        self.loads.iter().map(|l| l * l).sum::<f64>().sqrt()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct State<'a> {
    problem: &'a PProblem,
    free: Vec<bool>,
    u: Vec<f64>,
    energy: f64,
    history: Vec<f64>,
    iterations: usize,
    last_change: f64,
}

enum Step {
    /// Accepted with the given sup-norm of the applied change.
    Taken(f64),
    Stalled,
}

impl State<'_> {
    /// Backtracking Armijo search along `d` on the true energy.
    fn line_search(&mut self, g: &[f64], d: &[f64]) -> Step {
        let slope: f64 = g.iter().zip(d).map(|(a, b)| a * b).sum();
        let dsup = sup(d);
        if dsup == 0.0 {
            return Step::Taken(0.0);
        }
        if !(slope < 0.0) {
            return Step::Stalled;
        }
        let mut trial = self.u.clone();
        let mut t = 1.0;
        for _ in 0..60 {
            for i in 0..trial.len() {
                trial[i] = self.u[i] + t * d[i];
            }
            let change = self.problem.energy_change(&self.u, &trial);
            if change <= 1e-4 * t * slope {
                return self.accept(trial, change, t * dsup);
            }
            t *= 0.5;
        }
        Step::Stalled
    }

    fn accept(&mut self, u: Vec<f64>, change: f64, moved: f64) -> Step {
        self.u = u;
        self.energy += change;
        self.last_change = change;
        self.history.push(self.energy);
        self.iterations += 1;
        Step::Taken(moved)
    }

    /// Solves `H d = -g` for the weighted Laplacian `H` on free vertices.
    fn direction(&self, g: &[f64], weights: Vec<f64>, extra: Vec<f64>) -> Vec<f64> {
        let op = cg::Laplacian { edges: &self.problem.edges, weights, extra, free: &self.free };
        let b: Vec<f64> = g.iter().map(|x| -x).collect();
        let n = self.u.len();
        cg::solve(&op, &b, 1e-13, 20 * n + 100).x
    }

    fn newton_weights(&self, eta: f64) -> (Vec<f64>, Vec<f64>) {
        let pr = self.problem;
        let p = pr.p;
        let w = pr
            .edges
            .iter()
            .zip(&pr.conductances)
            .map(|(&(a, b), &c)| c * p * (p - 1.0) * (self.u[a] - self.u[b]).abs().max(eta).powf(p - 2.0))
            .collect();
        let extra = match &pr.masses {
            Some(m) => m
                .iter()
                .zip(&self.u)
                .map(|(m, x)| m * p * (p - 1.0) * x.abs().max(eta).powf(p - 2.0))
                .collect(),
            None => vec![0.0; pr.n],
        };
        (w, extra)
    }

    fn irls_weights(&self, delta: f64) -> (Vec<f64>, Vec<f64>) {
        let pr = self.problem;
        let p = pr.p;
        let w = pr
            .edges
            .iter()
            .zip(&pr.conductances)
            .map(|(&(a, b), &c)| {
                let d = self.u[a] - self.u[b];
                c * p * (d * d + delta * delta).powf((p - 2.0) / 2.0)
            })
            .collect();
        let extra = match &pr.masses {
            Some(m) => m.iter().zip(&self.u).map(|(m, x)| m * p * (x * x + delta * delta).powf((p - 2.0) / 2.0)).collect(),
            None => vec![0.0; pr.n],
        };
        (w, extra)
    }

    fn jacobi_direction(&self, g: &[f64]) -> Vec<f64> {
        let (w, extra) = self.newton_weights(1e-6);
        let mut diag = extra;
        for (&(a, b), &wi) in self.problem.edges.iter().zip(&w) {
            diag[a] += wi;
            diag[b] += wi;
        }
        g.iter()
            .zip(&diag)
            .zip(&self.free)
            .map(|((gi, d), &f)| if f && *d > 0.0 { -gi / d } else { 0.0 })
            .collect()
    }

    fn edge_scale(&self) -> f64 {
        let pr = self.problem;
        let mut s = pr.edges.iter().map(|&(a, b)| (self.u[a] - self.u[b]).abs()).fold(0.0, f64::max);
        if pr.masses.is_some() {
            s = s.max(sup(&self.u));
        }
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }
}

/// Minimizes `problem` from `init` (pinned entries are overwritten).
pub fn minimize(problem: &PProblem, init: &[f64], opts: SolveOptions) -> Result<Minimizer> {
    problem.validate()?;
    problem.check_bounded()?;
    if !(opts.tol > 0.0) {
        return Err(Error::param(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if init.len() != problem.n {
        return Err(Error::param("initial guess has the wrong length"));
    }
    let method = match opts.method {
        Method::Auto if problem.p == 2.0 => Method::Linear,
        Method::Auto => Method::Irls,
        Method::Linear if problem.p != 2.0 => {
            return Err(Error::param("the linear method requires p = 2"));
        }
        m => m,
    };
    let mut u: Vec<f64> = init.to_vec();
    for (ui, pin) in u.iter_mut().zip(&problem.pinned) {
        if let Some(v) = pin {
            *ui = *v;
        }
    }
    let energy = problem.energy(&u);
    let mut st = State { problem, free: problem.free(), u, energy, history: vec![energy], iterations: 0, last_change: f64::NEG_INFINITY };
    let base_gtol = opts.tol * (1.0 + problem.load_scale());
    let gtol_at = |u: &[f64]| base_gtol.max(problem.gradient_floor(u));
    let done = |g: &[f64], gtol: f64, moved: f64, change: f64, cur: f64| {
        norm(g) <= gtol && moved <= 0.1 * opts.tol && -change <= opts.tol * (cur.abs() + 1e-12)
    };

    if method == Method::Irls {
        // δ-continuation on the regularized weights; each step is a descent
        // step for the true energy
        let mut delta = st.edge_scale();
        let floor = 1e-10;
        while delta > 1e-4 * st.edge_scale() && delta > floor && st.iterations < opts.max_iter / 2 {
            let g = st.free_gradient();
            if norm(&g) <= base_gtol {
                break;
            }
            let (w, extra) = st.irls_weights(delta);
            let d = st.direction(&g, w, extra);
            let _ = st.line_search(&g, &d);
            delta = (delta / 2.0).max(floor);
        }
    }

    let positive: Vec<f64> = problem.conductances.iter().copied().filter(|c| *c > 0.0).collect();
    let mean_conductance = if positive.is_empty() { 1.0 } else { positive.iter().sum::<f64>() / positive.len() as f64 };
    let mut last_move = f64::INFINITY;
    let mut stalls = 0;
    while st.iterations < opts.max_iter {
        let g = st.free_gradient();
        let gtol = gtol_at(&st.u);
        if done(&g, gtol, last_move, st.last_change, st.energy) || (norm(&g) == 0.0) {
            return Ok(st.finish(method, true));
        }
        let d = if method == Method::Gd {
            st.jacobi_direction(&g)
        } else {
            let eta = if problem.p < 2.0 {
                // the difference an edge needs to carry the current force imbalance
                let force = (sup(&g) / (problem.p * mean_conductance)).powf(1.0 / (problem.p - 1.0));
                force.max(64.0 * f64::EPSILON * sup(&st.u).max(st.edge_scale()))
            } else {
                1e-9 * st.edge_scale()
            };
            let (w, extra) = st.newton_weights(eta);
            st.direction(&g, w, extra)
        };
        match st.line_search(&g, &d) {
            Step::Taken(m) => {
                last_move = m;
                stalls = 0;
            }
            Step::Stalled => {
                let d = st.jacobi_direction(&g);
                match st.line_search(&g, &d) {
                    Step::Taken(m) => last_move = m,
                    Step::Stalled => {
                        stalls += 1;
                        if norm(&g) <= gtol || stalls > 2 {
                            let ok = norm(&g) <= gtol;
                            return Ok(st.finish(method, ok));
                        }
                    }
                }
            }
        }
    }
    let g = st.free_gradient();
    let ok = norm(&g) <= gtol_at(&st.u);
    Ok(st.finish(method, ok))
}

impl State<'_> {
    fn free_gradient(&self) -> Vec<f64> {
        self.problem.free_gradient(&self.u)
    }

    fn finish(self, method: Method, converged: bool) -> Minimizer {
        let g = self.problem.free_gradient(&self.u);
        Minimizer {
            grad_norm: norm(&g),
            energy: self.problem.energy(&self.u),
            values: self.u,
            iterations: self.iterations,
            method,
            converged,
            history: self.history,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(p: f64) -> PProblem {
        PProblem {
            n: 3,
            edges: vec![(0, 1), (1, 2)],
            conductances: vec![1.0, 1.0],
            p,
            pinned: vec![Some(0.0), None, Some(1.0)],
            loads: vec![0.0; 3],
            masses: None,
        }
    }

    #[test]
    fn path_midpoint_for_several_p() {
        for p in [1.5, 2.0, 3.0, 4.0] {
            let m = minimize(&path(p), &[0.0, 0.9, 0.0], SolveOptions::default()).unwrap();
            assert!(m.converged, "p = {p}");
            assert!((m.values[1] - 0.5).abs() < 1e-7, "p = {p}: {}", m.values[1]);
        }
    }

    #[test]
    fn asymmetric_path_matches_closed_form() {
        // c1|x|^p + c2|1-x|^p is minimized at x = 1/(1 + (c1/c2)^{1/(p-1)})
        for p in [1.5, 2.0, 3.0] {
            let mut pr = path(p);
            pr.conductances = vec![1.0, 4.0];
            let m = minimize(&pr, &[0.0, 0.0, 0.0], SolveOptions::default()).unwrap();
            let x = 1.0 / (1.0 + 0.25f64.powf(1.0 / (p - 1.0)));
            assert!((m.values[1] - x).abs() < 1e-7, "p = {p}");
        }
    }

    #[test]
    fn energy_single_edge() {
        let pr = PProblem {
            n: 2,
            edges: vec![(0, 1)],
            conductances: vec![1.0],
            p: 3.0,
            pinned: vec![None, None],
            loads: vec![0.0, 0.0],
            masses: None,
        };
        assert_eq!(pr.energy(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let pr = PProblem {
            n: 4,
            edges: vec![(0, 1), (1, 2), (2, 3), (0, 2)],
            conductances: vec![1.0, 0.5, 2.0, 0.3],
            p: 2.7,
            pinned: vec![None; 4],
            loads: vec![0.1, -0.2, 0.3, 0.0],
            masses: Some(vec![0.2, 0.0, 0.1, 0.4]),
        };
        let u = [0.3, -0.7, 1.1, 0.2];
        let g = pr.gradient(&u);
        for i in 0..4 {
            let h = 1e-6;
            let (mut up, mut dn) = (u, u);
            up[i] += h;
            dn[i] -= h;
            let fd = (pr.energy(&up) - pr.energy(&dn)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "{i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn energy_change_matches_difference_and_resolves_tiny_steps() {
        let pr = PProblem {
            n: 3,
            edges: vec![(0, 1), (1, 2), (0, 2)],
            conductances: vec![1.0, 2.0, 0.5],
            p: 1.5,
            pinned: vec![None; 3],
            loads: vec![0.3, -0.1, 0.2],
            masses: Some(vec![0.1, 0.0, 0.2]),
        };
        let u = [0.4, -0.3, 1.2];
        let v = [0.1, -0.5, 0.9];
        assert!((pr.energy_change(&u, &v) - (pr.energy(&v) - pr.energy(&u))).abs() < 1e-14);
        let h = 1e-12;
        let w = [u[0] + h, u[1], u[2]];
        let g = pr.gradient(&u);
        let step = w[0] - u[0];
        let rel = (pr.energy_change(&u, &w) - g[0] * step).abs() / (g[0] * step).abs();
        assert!(rel < 1e-6, "{rel}");
    }

    #[test]
    fn unbounded_component_is_rejected() {
        let pr = PProblem {
            n: 4,
            edges: vec![(0, 1), (2, 3)],
            conductances: vec![1.0, 1.0],
            p: 2.0,
            pinned: vec![Some(0.0), None, None, None],
            loads: vec![0.0, 0.0, 1.0, 0.0],
            masses: None,
        };
        assert!(matches!(minimize(&pr, &[0.0; 4], SolveOptions::default()), Err(Error::Unbounded(_))));
        // zero net load on the floating component is fine
        let mut ok = pr.clone();
        ok.loads = vec![0.0, 0.0, 1.0, -1.0];
        let m = minimize(&ok, &[0.0; 4], SolveOptions::default()).unwrap();
        assert!((m.values[2] - m.values[3] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn energy_never_increases() {
        for method in [Method::Irls, Method::Gd] {
            let mut pr = path(3.0);
            pr.loads = vec![0.0, 0.4, 0.0];
            let m = minimize(&pr, &[0.0, -3.0, 0.0], SolveOptions { method, max_iter: 5000, ..Default::default() }).unwrap();
            assert!(m.converged, "{method}");
            for w in m.history.windows(2) {
                assert!(w[1] <= w[0] + 1e-13 * w[0].abs().max(1.0), "{method}: {w:?}");
            }
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Auto, Method::Linear, Method::Irls, Method::Gd] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("newton".parse::<Method>().is_err());
        assert!(minimize(&path(3.0), &[0.0; 3], SolveOptions { method: Method::Linear, ..Default::default() }).is_err());
    }
}
