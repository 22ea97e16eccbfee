//! Capacities, capacity scaling near the boundary, the Wiener ratio, boundary
//! convergence (Kellogg) and interior Hölder estimates.

use crate::error::{Error, Result};
use crate::filling::{build_filling, FillingGraph, Uniformization};
use crate::fit::{linear_fit, log_log_slope};
use crate::nets::build_nets;
use crate::solver::{assemble, minimize, solve, PProblem, SolveOptions};
use crate::space::FiniteSpace;
use crate::traces::{BoundaryFunction, ZFunction};

/// Inner set `E` and outer set `Ω` as vertex ids.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityQuery {
    pub inner: Vec<usize>,
    pub outer: Vec<usize>,
    pub p: f64,
}

/// `min Σ_e c_e|Δ_e u|^p` with `u = 1` on `inner` and `u = 0` off `outer`.
pub fn graph_capacity(
    n: usize,
    edges: &[(usize, usize)],
    conductances: &[f64],
    query: &CapacityQuery,
    opts: SolveOptions,
) -> Result<f64> {
    let mut in_outer = vec![false; n];
    for &v in &query.outer {
        *in_outer.get_mut(v).ok_or_else(|| Error::param(format!("vertex {v} out of range")))? = true;
    }
    let mut pinned: Vec<Option<f64>> = in_outer.iter().map(|&o| if o { None } else { Some(0.0) }).collect();
    for &v in &query.inner {
        if v >= n || !in_outer[v] {
            return Err(Error::param(format!("inner vertex {v} is not in the outer set")));
        }
        pinned[v] = Some(1.0);
    }
    if query.inner.is_empty() || pinned.iter().all(|x| *x != Some(0.0)) {
        return Ok(0.0);
    }
    let problem = PProblem {
        n,
        edges: edges.to_vec(),
        conductances: conductances.to_vec(),
        p: query.p,
        pinned,
        loads: vec![0.0; n],
        masses: None,
    };
    let init: Vec<f64> = vec![0.0; n];
    let m = minimize(&problem, &init, opts)?;
    if !m.converged {
        return Err(Error::NotConverged { iterations: m.iterations, grad_norm: m.grad_norm });
    }
    Ok(problem.edge_energy(&m.values))
}

fn filling_edges(filling: &FillingGraph) -> Vec<(usize, usize)> {
    filling.edges().iter().map(|e| (e.a, e.b)).collect()
}

/// Variational `p`-capacity of `E` relative to `Ω` on the filling.
pub fn variational_capacity(
    filling: &FillingGraph,
    uni: &Uniformization,
    query: &CapacityQuery,
    opts: SolveOptions,
) -> Result<f64> {
    let c = uni.conductances(query.p)?;
    graph_capacity(filling.vertex_count(), &filling_edges(filling), &c, query, opts)
}

/// Graph norm capacity: `min Σ_v m_v|u_v|^p + Σ_e c_e|Δ_e u|^p` over `u ≥ 1` on `E`,
/// `m_v` the `μ_β` vertex masses. Truncation at 1 lowers both terms, so
/// the minimizer equals 1 on `E`.
pub fn norm_capacity_graph(
    filling: &FillingGraph,
    uni: &Uniformization,
    inner: &[usize],
    p: f64,
    opts: SolveOptions,
) -> Result<f64> {
    let n = filling.vertex_count();
    let mut pinned = vec![None; n];
    for &v in inner {
        *pinned.get_mut(v).ok_or_else(|| Error::param(format!("vertex {v} out of range")))? = Some(1.0);
    }
    norm_capacity(n, filling_edges(filling), uni.conductances(p)?, uni.vertex_masses(filling), pinned, p, opts)
}

fn norm_capacity(
    n: usize,
    edges: Vec<(usize, usize)>,
    conductances: Vec<f64>,
    masses: Vec<f64>,
    pinned: Vec<Option<f64>>,
    p: f64,
    opts: SolveOptions,
) -> Result<f64> {
    if pinned.iter().all(Option::is_none) {
        return Err(Error::param("capacity of an empty set requested"));
    }
    let problem = PProblem { n, edges, conductances, p, pinned, loads: vec![0.0; n], masses: Some(masses) };
    let init: Vec<f64> = problem.pinned.iter().map(|x| x.unwrap_or(0.0)).collect();
    let m = minimize(&problem, &init, opts)?;
    if !m.converged {
        return Err(Error::NotConverged { iterations: m.iterations, grad_norm: m.grad_norm });
    }
    Ok(problem.energy(&m.values))
}

/// Besov norm capacity on the interior samples: `min ‖u‖_{L^p(ν)}^p + ‖u‖_{B^θ_{p,p}}^p`
/// over `u ≥ 1` on the sample ids `inner`.
pub fn norm_capacity_besov(space: &FiniteSpace, inner: &[usize], p: f64, theta: f64, opts: SolveOptions) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param(format!("theta must lie in (0,1), got {theta}")));
    }
    let ids = space.interior();
    let n = ids.len();
    let nu: Vec<f64> = ids.iter().map(|&i| space.nu()[i]).collect();
    let mut pinned = vec![None; n];
    for &i in inner {
        let k = ids.binary_search(&i).map_err(|_| Error::param(format!("sample {i} is not an interior sample")))?;
        pinned[k] = Some(1.0);
    }
    // pair weights w_xy + w_yx of the symmetric double sum
    let mut weight = vec![0.0; n * n];
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for x in 0..n {
        order.clear();
        order.extend((0..n).map(|y| (space.dist(ids[x], ids[y]), y)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (mut k, mut cum) = (0, 0.0);
        while k < n {
            let d = order[k].0;
            let mut j = k;
            while j < n && order[j].0 == d {
                cum += nu[order[j].1];
                j += 1;
            }
            if d > 0.0 {
                for &(_, y) in &order[k..j] {
                    let w = nu[x] * nu[y] / (d.powf(theta * p) * cum);
                    weight[x.min(y) * n + x.max(y)] += w;
                }
            }
            k = j;
        }
    }
    let mut edges = Vec::new();
    let mut conductances = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if weight[x * n + y] > 0.0 {
                edges.push((x, y));
                conductances.push(weight[x * n + y]);
            }
        }
    }
    norm_capacity(n, edges, conductances, nu, pinned, p, opts)
}

/// `ν` of the samples within `d_ε`-distance `r`.
pub fn eps_ball_nu(space: &FiniteSpace, sample_dist: &[f64], r: f64) -> f64 {
    sample_dist.iter().zip(space.nu()).filter(|(d, _)| **d < r).map(|(_, m)| m).sum()
}

/// Vertices within `d_ε`-distance `r`, given distances to every vertex.
pub fn eps_ball(dist: &[f64], r: f64) -> Vec<usize> {
    (0..dist.len()).filter(|&v| dist[v] < r).collect()
}

/// Finest vertex standing in for each boundary sample, with its `d_ε` distance
/// from `dist`'s center plus the vertical tail.
fn boundary_representatives(filling: &FillingGraph, space: &FiniteSpace, dist: &[f64]) -> Vec<(usize, f64)> {
    let tail = filling.boundary_tail();
    space
        .boundary()
        .into_iter()
        .map(|z| {
            let (v, _) = filling.nearest_finest(space, z);
            (v, dist[v] + tail)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityRow {
    pub radius: f64,
    /// `cap_p(B(z₀,r), B(z₀,2r))`.
    pub upper: f64,
    /// `cap_p(B(z₀,r) ∩ ∂Z, B(z₀,2r))`.
    pub lower: f64,
    /// `ν(B_ε(z₀,r)∩Z)/r^{θp}`.
    pub predictor: f64,
}

impl CapacityRow {
    /// `(lower/upper)^{1/(p-1)}`.
    pub fn wiener_ratio(&self, p: f64) -> f64 {
        (self.lower / self.upper).powf(1.0 / (p - 1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityScaling {
    pub center: usize,
    pub rows: Vec<CapacityRow>,
    pub upper_slope: f64,
    pub lower_slope: f64,
}

/// Both capacity families around the boundary sample `z0` over `radii`,
/// with log-log slopes against `ν(B_ε(z₀,r)∩Z)/r^{θp}`.
#[allow(clippy::too_many_arguments)]
pub fn capacity_scaling_check(
    space: &FiniteSpace,
    filling: &FillingGraph,
    uni: &Uniformization,
    z0: usize,
    radii: &[f64],
    p: f64,
    theta: f64,
    opts: SolveOptions,
) -> Result<CapacityScaling> {
    if !space.is_boundary(z0) {
        return Err(Error::param(format!("center {z0} is not a boundary sample")));
    }
    let dist = filling.eps_distances_from_point(space, z0);
    let sample_dist = filling.sample_eps_distances(&filling.entry_vertices(space), &dist, z0);
    let reps = boundary_representatives(filling, space, &dist);
    let c = uni.conductances(p)?;
    let edges = filling_edges(filling);
    let n = filling.vertex_count();
    let mut rows = Vec::new();
    for &r in radii {
        let outer = eps_ball(&dist, 2.0 * r);
        let upper_inner = eps_ball(&dist, r);
        let mut lower_inner: Vec<usize> = reps.iter().filter(|(_, d)| *d < r).map(|&(v, _)| v).collect();
        lower_inner.sort_unstable();
        lower_inner.dedup();
        if lower_inner.is_empty() || upper_inner.is_empty() || outer.len() == n {
            continue;
        }
        let upper = graph_capacity(n, &edges, &c, &CapacityQuery { inner: upper_inner, outer: outer.clone(), p }, opts)?;
        let lower = graph_capacity(n, &edges, &c, &CapacityQuery { inner: lower_inner, outer, p }, opts)?;
        let predictor = eps_ball_nu(space, &sample_dist, r) / r.powf(theta * p);
        if upper > 0.0 && lower > 0.0 && predictor > 0.0 {
            rows.push(CapacityRow { radius: r, upper, lower, predictor });
        }
    }
    if rows.len() < 3 {
        return Err(Error::Degenerate(format!("only {} usable radii around boundary sample {z0}", rows.len())));
    }
    let slope = |f: fn(&CapacityRow) -> f64| {
        log_log_slope(&rows.iter().map(|r| (r.predictor, f(r))).collect::<Vec<_>>()).unwrap_or(f64::NAN)
    };
    let upper_slope = slope(|r| r.upper);
    let lower_slope = slope(|r| r.lower);
    Ok(CapacityScaling { center: z0, rows, upper_slope, lower_slope })
}

/// `(cap(B∩∂Z, 2B)/cap(B, 2B))^{1/(p-1)} / r` per usable radius.
pub fn wiener_integrand(scaling: &CapacityScaling, p: f64) -> Vec<(f64, f64)> {
    scaling.rows.iter().map(|r| (r.radius, r.wiener_ratio(p) / r.radius)).collect()
}

/// Partial sums `Σ_{k ≤ K} value(r_k)·r_k·ln 2` of the dyadic Wiener sum,
/// rows ordered from large to small radii.
pub fn wiener_partial_sums(scaling: &CapacityScaling, p: f64) -> Vec<f64> {
    let mut rows = scaling.rows.clone();
    rows.sort_by(|a, b| b.radius.total_cmp(&a.radius));
    let mut acc = 0.0;
    rows.iter()
        .map(|r| {
            acc += r.wiener_ratio(p) * std::f64::consts::LN_2;
            acc
        })
        .collect()
}

/// Dyadic radii `r_max/2^k` down to `r_min`.
pub fn dyadic_radii(r_max: f64, r_min: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = r_max;
    while r >= r_min * (1.0 - 1e-12) && out.len() < 64 {
        out.push(r);
        r /= 2.0;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct KelloggReport {
    pub depths: Vec<usize>,
    /// Sup over boundary samples of `|⨍ T_X u - f(ζ)|`, per depth.
    pub errors: Vec<f64>,
    pub converged: bool,
}

impl KelloggReport {
    pub fn nonincreasing(&self, slack: f64) -> bool {
        self.errors.windows(2).all(|w| w[1] <= w[0] + slack)
    }
}

/// Solves the homogeneous problem at each depth `N` and measures how far the
/// solution's trace near each boundary sample is from `f` there.
#[allow(clippy::too_many_arguments)]
pub fn kellogg_check(
    space: &FiniteSpace,
    f: &BoundaryFunction,
    depths: &[usize],
    alpha: f64,
    tau: f64,
    p: f64,
    theta: f64,
    opts: SolveOptions,
) -> Result<KelloggReport> {
    let interior = space.interior();
    let boundary = space.boundary();
    let g = ZFunction::constant(space, 0.0);
    let mut errors = Vec::new();
    let mut converged = true;
    for &n in depths {
        let nets = build_nets(space, alpha, n, 0)?;
        let filling = build_filling(space, &nets, tau)?;
        let problem = assemble(&filling, space, p, theta, f, &g, None)?;
        let sol = solve(&problem, &filling, space, opts)?;
        converged &= sol.converged;
        let r = 2.0 * alpha.powi(-(n as i32));
        let mut worst: f64 = 0.0;
        for (k, &z) in boundary.iter().enumerate() {
            let (mut mass, mut sum) = (0.0, 0.0);
            for (j, &i) in interior.iter().enumerate() {
                if space.dist(z, i) < r {
                    mass += space.nu()[i];
                    sum += space.nu()[i] * sol.trace.values[j];
                }
            }
            if mass == 0.0 {
                let (i, _) = space.nearest_in(z, interior.iter().copied()).ok_or_else(|| Error::Degenerate("no interior samples".into()))?;
                let j = interior.binary_search(&i).unwrap();
                mass = 1.0;
                sum = sol.trace.values[j];
            }
            worst = worst.max((sum / mass - f.values[k]).abs());
        }
        errors.push(worst);
    }
    Ok(KelloggReport { depths: depths.to_vec(), errors, converged })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolderFit {
    /// Fitted exponent; `f64::INFINITY` when `u` is constant on the region.
    pub exponent: f64,
    pub pairs: usize,
    /// `(distance, max |u(z)-u(w)|)` per occupied distance bin.
    pub envelope: Vec<(f64, f64)>,
}

/// Upper-envelope log-log fit of `|u(z)-u(w)|` against `d(z,w)` over interior
/// sample pairs in `B(center, radius)`; requires `B(center, 2·radius) ∩ ∂Z = ∅`.
pub fn holder_estimate(space: &FiniteSpace, u: &ZFunction, center: usize, radius: f64, bins: usize) -> Result<HolderFit> {
    if space.boundary().iter().any(|&b| space.dist(center, b) < 2.0 * radius) {
        return Err(Error::param("the doubled region meets the boundary"));
    }
    let interior = space.interior();
    let members: Vec<usize> = (0..interior.len()).filter(|&k| space.dist(center, interior[k]) < radius).collect();
    let mut pairs = Vec::new();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            pairs.push((space.dist(interior[i], interior[j]), (u.values[i] - u.values[j]).abs()));
        }
    }
    if pairs.len() < 10 {
        return Err(Error::Degenerate(format!("region holds only {} sample pairs", pairs.len())));
    }
    let dmin = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let dmax = pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    if pairs.iter().all(|p| p.1 == 0.0) {
        return Ok(HolderFit { exponent: f64::INFINITY, pairs: pairs.len(), envelope: Vec::new() });
    }
    let bins = bins.max(2);
    let span = (dmax / dmin).ln().max(1e-12);
    let mut env = vec![(0.0f64, 0.0f64); bins];
    for &(d, du) in &pairs {
        let b = (((d / dmin).ln() / span) * bins as f64).floor().min(bins as f64 - 1.0) as usize;
        if du > env[b].1 {
            env[b] = (d, du);
        }
    }
    let envelope: Vec<(f64, f64)> = env.into_iter().filter(|e| e.1 > 0.0).collect();
    let exponent = log_log_slope(&envelope).unwrap_or(f64::NAN);
    Ok(HolderFit { exponent, pairs: pairs.len(), envelope })
}

/// `γ = max{1-α_H, (p(1-θ)(q-1) + Q)/(pq)}`; `q = ∞` gives `(1-θ)` in the second slot.
pub fn holder_gamma(p: f64, theta: f64, q: f64, mass_exponent: f64, holder_alpha: f64) -> f64 {
    let second = if q.is_infinite() {
        1.0 - theta
    } else {
        (p * (1.0 - theta) * (q - 1.0) + mass_exponent) / (p * q)
    };
    (1.0 - holder_alpha).max(second)
}

/// `ν(B_ε(z,r)∩Z)·r^{β/ε}/μ_β(B_ε(z,r))` for each center and radius.
pub fn codim_identity_ratios(
    space: &FiniteSpace,
    filling: &FillingGraph,
    uni: &Uniformization,
    centers: &[usize],
    radii: &[f64],
) -> Vec<f64> {
    let exp = uni.beta / uni.epsilon;
    let entries = filling.entry_vertices(space);
    let mut out = Vec::new();
    for &z in centers {
        let dist = filling.eps_distances_from_point(space, z);
        let sample_dist = filling.sample_eps_distances(&entries, &dist, z);
        for &r in radii {
            let mu = uni.ball_mass(filling, &dist, r, 16);
            let nu = eps_ball_nu(space, &sample_dist, r);
            if mu > 0.0 && nu > 0.0 {
                out.push(nu * r.powf(exp) / mu);
            }
        }
    }
    out
}

/// Exponent `Q` of `μ_β(B_ε(z,r)) ≈ r^Q`, fitted over `centers` and `radii`.
pub fn mu_beta_mass_exponent(
    space: &FiniteSpace,
    filling: &FillingGraph,
    uni: &Uniformization,
    centers: &[usize],
    radii: &[f64],
) -> Option<f64> {
    let mut pts = Vec::new();
    for &z in centers {
        let dist = filling.eps_distances_from_point(space, z);
        for &r in radii {
            let mu = uni.ball_mass(filling, &dist, r, 16);
            if mu > 0.0 {
                pts.push((r.ln(), mu.ln()));
            }
        }
    }
    linear_fit(&pts).map(|f| f.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::uniformize;
    use crate::generators::{generate_example, Example};
    use crate::solver::beta_for;

    fn path3() -> (Vec<(usize, usize)>, Vec<f64>) {
        (vec![(0, 1), (1, 2)], vec![1.0, 1.0])
    }

    #[test]
    fn series_conductance_on_a_path() {
        let (e, c) = path3();
        let q = CapacityQuery { inner: vec![0], outer: vec![0, 1], p: 2.0 };
        let cap = graph_capacity(3, &e, &c, &q, SolveOptions::default()).unwrap();
        assert!((cap - 0.5).abs() < 1e-10);
        // p-capacity of a two-edge series: 2·(1/2)^p
        let q3 = CapacityQuery { p: 3.0, ..q };
        let cap3 = graph_capacity(3, &e, &c, &q3, SolveOptions::default()).unwrap();
        assert!((cap3 - 0.25).abs() < 1e-9);
    }

    #[test]
    fn capacity_edge_cases() {
        let (e, c) = path3();
        let all = CapacityQuery { inner: vec![0], outer: vec![0, 1, 2], p: 2.0 };
        assert_eq!(graph_capacity(3, &e, &c, &all, SolveOptions::default()).unwrap(), 0.0);
        let empty = CapacityQuery { inner: vec![], outer: vec![0, 1], p: 2.0 };
        assert_eq!(graph_capacity(3, &e, &c, &empty, SolveOptions::default()).unwrap(), 0.0);
        let bad = CapacityQuery { inner: vec![2], outer: vec![0, 1], p: 2.0 };
        assert!(graph_capacity(3, &e, &c, &bad, SolveOptions::default()).is_err());
    }

    #[test]
    fn capacity_monotonicity() {
        let s = generate_example(Example::Interval, 7).unwrap().rescale().unwrap();
        let nets = build_nets(&s, 3.0, 4, 0).unwrap();
        let g = build_filling(&s, &nets, 3.0).unwrap();
        let uni = uniformize(&g, &s, beta_for(g.epsilon(), 2.0, 0.75)).unwrap();
        let dist = g.eps_distances_from_point(&s, s.boundary()[0]);
        let opts = SolveOptions::default();
        let cap = |r: f64, big: f64| {
            let q = CapacityQuery { inner: eps_ball(&dist, r), outer: eps_ball(&dist, big), p: 2.0 };
            variational_capacity(&g, &uni, &q, opts).unwrap()
        };
        assert!(cap(0.05, 0.3) <= cap(0.1, 0.3) + 1e-12);
        assert!(cap(0.05, 0.3) <= cap(0.05, 0.2) + 1e-12);
    }

    #[test]
    fn norm_capacities() {
        let s = generate_example(Example::Interval, 5).unwrap().rescale().unwrap();
        let nets = build_nets(&s, 3.0, 3, 0).unwrap();
        let g = build_filling(&s, &nets, 3.0).unwrap();
        let uni = uniformize(&g, &s, beta_for(g.epsilon(), 2.0, 0.75)).unwrap();
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        let opts = SolveOptions::default();
        let total = norm_capacity_graph(&g, &uni, &all, 2.0, opts).unwrap();
        assert!((total - uni.total_mass()).abs() < 1e-12 * total);
        let a = norm_capacity_graph(&g, &uni, &[5], 2.0, opts).unwrap();
        let b = norm_capacity_graph(&g, &uni, &[5, 6], 2.0, opts).unwrap();
        assert!(0.0 < a && a <= b);

        let z = s.interior();
        let whole = norm_capacity_besov(&s, &z, 2.0, 0.75, opts).unwrap();
        assert!((whole - s.total_nu()).abs() < 1e-12);
        let one = norm_capacity_besov(&s, &z[3..4], 2.0, 0.75, opts).unwrap();
        let two = norm_capacity_besov(&s, &z[3..6], 2.0, 0.75, opts).unwrap();
        assert!(0.0 < one && one <= two && two <= whole);
    }

    #[test]
    fn gamma_formula() {
        assert_eq!(holder_gamma(2.0, 0.5, f64::INFINITY, 3.0, 1.0), 0.5);
        let g = holder_gamma(2.0, 0.5, 4.0, 1.0, 1.0);
        assert!((g - (2.0 * 0.5 * 3.0 + 1.0) / 8.0).abs() < 1e-15);
        assert_eq!(holder_gamma(2.0, 0.5, f64::INFINITY, 3.0, 0.2), 0.8);
    }

    #[test]
    fn holder_of_constant_and_power() {
        let s = generate_example(Example::Interval, 8).unwrap().rescale().unwrap();
        let center = s.interior()[s.interior().len() / 2];
        let c = ZFunction::constant(&s, 1.0);
        assert_eq!(holder_estimate(&s, &c, center, 0.1, 8).unwrap().exponent, f64::INFINITY);
        let x0 = s.point(center).unwrap()[0];
        let u = ZFunction::from_coords(&s, |x| (x[0] - x0).abs().sqrt()).unwrap();
        let h = holder_estimate(&s, &u, center, 0.1, 8).unwrap();
        assert!((h.exponent - 0.5).abs() < 0.1, "{h:?}");
        assert!(holder_estimate(&s, &u, center, 0.3, 8).is_err());
    }
}
