//! Hyperbolic filling graph of a net hierarchy, its uniformized edge lengths
//! `d_ε`, the lifted measure `μ_β`, and closed-form edge `p`-conductances.
//!
//! Every edge is a unit interval glued between two vertices. Along an edge
//! the graph distance to the root is the piecewise-linear profile `ℓ(t)`:
//! `n + t` on a vertical edge from level `n` to `n+1`, and the tent
//! `n + min(t, 1-t)` on a horizontal edge at level `n`. All edge integrals
//! below are integrals of `e^{-k ℓ(t)}` and have closed forms.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nets::NetHierarchy;
use crate::space::FiniteSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub point: usize,
    pub level: usize,
}

/// Edge between vertex ids `a < b`; for vertical edges `a` is the coarser end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone)]
pub struct FillingGraph {
    pub alpha: f64,
    pub tau: f64,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    level_start: Vec<usize>,
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl FillingGraph {
    /// Assembles a graph from explicit parts, checking that every vertex below
    /// the root has a neighbour one level up.
    pub fn from_parts(alpha: f64, tau: f64, vertices: Vec<Vertex>, mut edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() || vertices[0].level != 0 {
            return Err(Error::param("first vertex must be the root at level 0"));
        }
        if vertices.windows(2).any(|w| w[1].level < w[0].level) {
            return Err(Error::param("vertices must be sorted by level"));
        }
        let depth = vertices.last().map_or(0, |v| v.level);
        let mut level_start = vec![0; depth + 2];
        for n in 0..=depth {
            level_start[n + 1] = level_start[n] + vertices.iter().filter(|v| v.level == n).count();
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter_mut().enumerate() {
            if e.a > e.b {
                std::mem::swap(&mut e.a, &mut e.b);
            }
            if e.b >= vertices.len() || e.a == e.b {
                return Err(Error::param(format!("edge {k} has invalid endpoints")));
            }
            let (la, lb) = (vertices[e.a].level, vertices[e.b].level);
            let ok = match e.kind {
                EdgeKind::Horizontal => la == lb,
                EdgeKind::Vertical => lb == la + 1,
            };
            if !ok {
                return Err(Error::param(format!("edge {k} kind does not match its levels")));
            }
            adjacency[e.a].push((e.b, k));
            adjacency[e.b].push((e.a, k));
        }
        let graph = FillingGraph { alpha, tau, vertices, edges, level_start, adjacency };
        for v in 1..graph.vertices.len() {
            if graph.parent_count(v) == 0 {
                let vx = graph.vertices[v];
                return Err(Error::Disconnected { point: vx.point, level: vx.level });
            }
        }
        Ok(graph)
    }

    fn parent_count(&self, v: usize) -> usize {
        let level = self.vertices[v].level;
        self.adjacency[v]
            .iter()
            .filter(|&&(w, _)| self.vertices[w].level + 1 == level)
            .count()
    }

    pub fn epsilon(&self) -> f64 {
        self.alpha.ln()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn depth(&self) -> usize {
        self.level_start.len() - 2
    }

    pub fn level_vertices(&self, n: usize) -> std::ops::Range<usize> {
        self.level_start[n]..self.level_start[n + 1]
    }

    pub fn finest(&self) -> std::ops::Range<usize> {
        self.level_vertices(self.depth())
    }

    /// Neighbours of `v` as `(vertex, edge)` pairs.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    /// Graph distance to the root; equals the level because every vertex has
    /// an ancestor chain and edges change level by at most one.
    pub fn root_distance(&self, v: usize) -> usize {
        self.vertices[v].level
    }

    pub fn scale(&self, v: usize) -> f64 {
        self.alpha.powi(-(self.vertices[v].level as i32))
    }

    /// Breadth-first distances from the root (unit edge lengths).
    pub fn bfs_root_distances(&self) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        let mut queue = VecDeque::from([0]);
        dist[0] = Some(0);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for &(w, _) in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Profile `ℓ(t)` of graph distance to the root along edge `e`, oriented from `a` to `b`.
    pub fn root_profile(&self, e: usize) -> RootProfile {
        let edge = self.edges[e];
        RootProfile { level: self.vertices[edge.a].level, kind: edge.kind }
    }

    /// Edge length in the uniformized metric `d_ε`.
    pub fn eps_length(&self, e: usize) -> f64 {
        self.root_profile(e).integral(self.epsilon())
    }

    /// Multi-source Dijkstra in `d_ε`, restricted to vertex-to-vertex paths.
    pub fn eps_distances(&self, sources: &[(usize, f64)]) -> Vec<f64> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
            }
        }
        let lengths: Vec<f64> = (0..self.edges.len()).map(|e| self.eps_length(e)).collect();
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        for &(v, d) in sources {
            if d < dist[v] {
                dist[v] = d;
                heap.push(Item(d, v));
            }
        }
        while let Some(Item(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &self.adjacency[v] {
                let nd = d + lengths[e];
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Item(nd, w));
                }
            }
        }
        dist
    }

    /// Interior samples in `D(v) = B_Z(ξ_v, α^{-n_v})`.
    pub fn shadow(&self, space: &FiniteSpace, v: usize) -> Vec<usize> {
        let vx = self.vertices[v];
        let r = self.scale(v);
        (0..space.len())
            .filter(|&i| !space.is_boundary(i) && space.dist(vx.point, i) < r)
            .collect()
    }

    /// `ν(D(v))` for every vertex.
    pub fn shadow_masses(&self, space: &FiniteSpace) -> Vec<f64> {
        (0..self.vertices.len())
            .map(|v| space.ball_mass(self.vertices[v].point, self.scale(v)))
            .collect()
    }

    /// Finest-level vertex whose base point is nearest to sample `i` (ties to lower id).
    pub fn nearest_finest(&self, space: &FiniteSpace, i: usize) -> (usize, f64) {
        let mut best = (usize::MAX, f64::INFINITY);
        for v in self.finest() {
            let d = space.dist(i, self.vertices[v].point);
            if d < best.1 {
                best = (v, d);
            }
        }
        best
    }

    /// Distance in `d_ε` from a vertex at level `N` straight down to `Z̄`.
    pub fn boundary_tail(&self) -> f64 {
        let eps = self.epsilon();
        (-eps * self.depth() as f64).exp() / eps
    }

    /// `d_ε` distances from the sample point `z` to every vertex: enter the
    /// graph through any finest vertex whose shadow ball contains `z`.
    pub fn eps_distances_from_point(&self, space: &FiniteSpace, z: usize) -> Vec<f64> {
        let tail = self.boundary_tail();
        let r = self.alpha.powi(-(self.depth() as i32));
        let mut sources: Vec<(usize, f64)> = self
            .finest()
            .filter(|&v| space.dist(z, self.vertices[v].point) < r)
            .map(|v| (v, tail))
            .collect();
        if sources.is_empty() {
            sources.push((self.nearest_finest(space, z).0, tail));
        }
        self.eps_distances(&sources)
    }

    /// Finest vertices through which each sample enters the graph: those whose
    /// shadow ball contains it, else the nearest one.
    pub fn entry_vertices(&self, space: &FiniteSpace) -> Vec<Vec<usize>> {
        let r = self.alpha.powi(-(self.depth() as i32));
        (0..space.len())
            .map(|i| {
                let near: Vec<usize> =
                    self.finest().filter(|&v| space.dist(i, self.vertices[v].point) < r).collect();
                if near.is_empty() {
                    vec![self.nearest_finest(space, i).0]
                } else {
                    near
                }
            })
            .collect()
    }

    /// `d_ε` from the center of `vertex_dist` to every sample, descending the
    /// vertical tail from the cheapest entry vertex; `center` itself gets 0.
    pub fn sample_eps_distances(&self, entries: &[Vec<usize>], vertex_dist: &[f64], center: usize) -> Vec<f64> {
        let tail = self.boundary_tail();
        entries
            .iter()
            .enumerate()
            .map(|(i, vs)| {
                if i == center {
                    0.0
                } else {
                    vs.iter().map(|&v| vertex_dist[v]).fold(f64::INFINITY, f64::min) + tail
                }
            })
            .collect()
    }
}

/// `ℓ(t)` along one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootProfile {
    pub level: usize,
    pub kind: EdgeKind,
}

impl RootProfile {
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.level as f64;
        match self.kind {
            EdgeKind::Vertical => n + t,
            EdgeKind::Horizontal => n + t.min(1.0 - t),
        }
    }

    /// `∫₀¹ e^{-k ℓ(t)} dt`.
    pub fn integral(&self, k: f64) -> f64 {
        let base = (-k * self.level as f64).exp();
        match self.kind {
            EdgeKind::Vertical => base * phi1(k),
            EdgeKind::Horizontal => base * phi1(k / 2.0),
        }
    }

    /// `∫₀ᵗ e^{-k ℓ(s)} ds`.
    pub fn partial_integral(&self, k: f64, t: f64) -> f64 {
        let base = (-k * self.level as f64).exp();
        let f = |x: f64| x * phi1(k * x);
        match self.kind {
            EdgeKind::Vertical => base * f(t),
            EdgeKind::Horizontal if t <= 0.5 => base * f(t),
            EdgeKind::Horizontal => base * (2.0 * f(0.5) - f(1.0 - t)),
        }
    }

    /// `∫₀¹ t e^{-k ℓ(t)} dt`.
    pub fn moment(&self, k: f64) -> f64 {
        match self.kind {
            EdgeKind::Vertical => (-k * self.level as f64).exp() * phi2(k),
            EdgeKind::Horizontal => 0.5 * self.integral(k),
        }
    }
}

/// `(1 - e^{-k})/k = ∫₀¹ e^{-kt} dt`.
fn phi1(k: f64) -> f64 {
    if k.abs() < 1e-8 {
        1.0 - k / 2.0
    } else {
        -(-k).exp_m1() / k
    }
}

/// `∫₀¹ t e^{-kt} dt = (1 - (1+k)e^{-k})/k²`.
fn phi2(k: f64) -> f64 {
    if k.abs() < 1e-3 {
        0.5 - k / 3.0 + k * k / 8.0
    } else {
        (1.0 - (1.0 + k) * (-k).exp()) / (k * k)
    }
}

pub fn build_filling(space: &FiniteSpace, nets: &NetHierarchy, tau: f64) -> Result<FillingGraph> {
    if !(tau > 2.0) {
        return Err(Error::param(format!("tau must exceed 2, got {tau}")));
    }
    let alpha = nets.alpha;
    let mut vertices = Vec::new();
    let mut starts = Vec::new();
    for (n, level) in nets.levels.iter().enumerate() {
        starts.push(vertices.len());
        vertices.extend(level.iter().map(|&point| Vertex { point, level: n }));
    }
    starts.push(vertices.len());
    let mut edges = Vec::new();
    for n in 0..nets.levels.len() {
        let r = 2.0 * alpha.powi(-(n as i32));
        for a in starts[n]..starts[n + 1] {
            for b in a + 1..starts[n + 1] {
                if space.dist(vertices[a].point, vertices[b].point) < r {
                    edges.push(Edge { a, b, kind: EdgeKind::Horizontal });
                }
            }
        }
        if n + 1 < nets.levels.len() {
            let r = tau * alpha.powi(-(n as i32)) + tau * alpha.powi(-(n as i32) - 1);
            for a in starts[n]..starts[n + 1] {
                for b in starts[n + 1]..starts[n + 2] {
                    if space.dist(vertices[a].point, vertices[b].point) < r {
                        edges.push(Edge { a, b, kind: EdgeKind::Vertical });
                    }
                }
            }
        }
    }
    FillingGraph::from_parts(alpha, tau, vertices, edges)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformizedEdge {
    pub edge: usize,
    pub d_eps_length: f64,
    pub mu_beta_mass: f64,
    /// Average shadow mass `a_(v,w)`.
    pub a_vw: f64,
    pub profile: RootProfile,
}

impl UniformizedEdge {
    /// Edges whose two shadows carry no mass hold no energy.
    pub fn is_degenerate(&self) -> bool {
        self.a_vw <= 0.0
    }
}

/// Per-edge `d_ε` lengths and `μ_β` masses for one choice of `β`.
#[derive(Debug, Clone)]
pub struct Uniformization {
    pub epsilon: f64,
    pub beta: f64,
    pub edges: Vec<UniformizedEdge>,
}

pub fn uniformize(filling: &FillingGraph, space: &FiniteSpace, beta: f64) -> Result<Uniformization> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param(format!("beta must be positive, got {beta}")));
    }
    let eps = filling.epsilon();
    let shadow = filling.shadow_masses(space);
    let edges = filling
        .edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let profile = filling.root_profile(k);
            let a_vw = 0.5 * (shadow[e.a] + shadow[e.b]);
            UniformizedEdge {
                edge: k,
                d_eps_length: profile.integral(eps),
                mu_beta_mass: a_vw * profile.integral(beta),
                a_vw,
                profile,
            }
        })
        .collect();
    Ok(Uniformization { epsilon: eps, beta, edges })
}

impl Uniformization {
    pub fn total_mass(&self) -> f64 {
        self.edges.iter().map(|e| e.mu_beta_mass).sum()
    }

    /// `c_e` such that the least `p`-energy `∫|du/ds_ε|^p dμ_β` on the edge with
    /// endpoint values `u_a, u_b` equals `c_e·|u_a - u_b|^p`.
    pub fn conductance(&self, e: usize, p: f64) -> Result<f64> {
        edge_conductance(&self.edges[e], self.epsilon, self.beta, p)
    }

    /// Conductances of all edges; degenerate edges get 0.
    pub fn conductances(&self, p: f64) -> Result<Vec<f64>> {
        (0..self.edges.len()).map(|e| self.conductance(e, p)).collect()
    }

    /// `μ_β` mass assigned to vertices: half of each incident edge.
    pub fn vertex_masses(&self, filling: &FillingGraph) -> Vec<f64> {
        let mut m = vec![0.0; filling.vertex_count()];
        for (ue, e) in self.edges.iter().zip(filling.edges()) {
            m[e.a] += 0.5 * ue.mu_beta_mass;
            m[e.b] += 0.5 * ue.mu_beta_mass;
        }
        m
    }

    /// `μ_β(B_ε(z, r))` given `d_ε` distances from `z` to every vertex. Each
    /// edge is cut into `pieces` segments; a segment counts when its midpoint
    /// is within `r` through either endpoint.
    pub fn ball_mass(&self, filling: &FillingGraph, dist: &[f64], r: f64, pieces: usize) -> f64 {
        let mut total = 0.0;
        for (ue, e) in self.edges.iter().zip(filling.edges()) {
            if ue.is_degenerate() {
                continue;
            }
            let (da, db) = (dist[e.a], dist[e.b]);
            if da.min(db) >= r {
                continue;
            }
            let prof = ue.profile;
            if da + ue.d_eps_length < r && db + ue.d_eps_length < r {
                total += ue.mu_beta_mass;
                continue;
            }
            let mut prev = 0.0;
            for j in 0..pieces {
                let t1 = (j + 1) as f64 / pieces as f64;
                let tm = (j as f64 + 0.5) / pieces as f64;
                let s = prof.partial_integral(self.epsilon, tm);
                let next = prof.partial_integral(self.beta, t1);
                if (da + s).min(db + ue.d_eps_length - s) < r {
                    total += ue.a_vw * (next - prev);
                }
                prev = next;
            }
        }
        total
    }

    /// Fraction of the `μ_β`-mean of an affine function on edge `e` carried by
    /// its `b` endpoint: `∫t e^{-βℓ} / ∫e^{-βℓ}`.
    pub fn far_weight(&self, e: usize) -> f64 {
        let p = self.edges[e].profile;
        p.moment(self.beta) / p.integral(self.beta)
    }
}

/// Closed-form edge conductance `a_vw · (∫₀¹ e^{-(εp-β)ℓ(t)/(p-1)} dt)^{-(p-1)}`.
pub fn edge_conductance(edge: &UniformizedEdge, epsilon: f64, beta: f64, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param(format!("p must exceed 1, got {p}")));
    }
    if edge.is_degenerate() {
        return Ok(0.0);
    }
    let k = (epsilon * p - beta) / (p - 1.0);
    Ok(edge.a_vw * edge.profile.integral(k).powf(-(p - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_example, Example};
    use crate::nets::{build_nets, default_depth};

    fn quad(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        // composite Simpson
        let h = 1.0 / n as f64;
        let mut s = f(0.0) + f(1.0);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn interval_filling(depth: u32, levels: usize) -> (FiniteSpace, FillingGraph) {
        let s = generate_example(Example::Interval, depth).unwrap().rescale().unwrap();
        let nets = build_nets(&s, 3.0, levels, 0).unwrap();
        let g = build_filling(&s, &nets, 3.0).unwrap();
        (s, g)
    }

    #[test]
    fn profiles() {
        let v = RootProfile { level: 2, kind: EdgeKind::Vertical };
        let h = RootProfile { level: 3, kind: EdgeKind::Horizontal };
        assert_eq!(v.eval(0.5), 2.5);
        assert_eq!(h.eval(0.5), 3.5);
        assert_eq!(h.eval(0.0), 3.0);
    }

    #[test]
    fn closed_form_integrals_match_quadrature() {
        for kind in [EdgeKind::Vertical, EdgeKind::Horizontal] {
            for level in [0, 1, 4] {
                let prof = RootProfile { level, kind };
                for k in [1e-9, 0.3, 3f64.ln(), 2.5] {
                    let q = quad(|t| (-k * prof.eval(t)).exp(), 2000);
                    assert!((prof.integral(k) - q).abs() < 1e-10 * q.max(1.0), "{kind:?} {level} {k}");
                    let m = quad(|t| t * (-k * prof.eval(t)).exp(), 2000);
                    assert!((prof.moment(k) - m).abs() < 1e-10, "{kind:?} {level} {k}");
                }
            }
        }
        let v0 = RootProfile { level: 0, kind: EdgeKind::Vertical };
        let eps = 3f64.ln();
        assert!((v0.integral(eps) - (1.0 - 1.0 / 3.0) / eps).abs() < 1e-15);
        // vertical edges: (e^{-εn} - e^{-ε(n+1)})/ε exactly
        let v3 = RootProfile { level: 3, kind: EdgeKind::Vertical };
        let exact = ((-eps * 3.0).exp() - (-eps * 4.0).exp()) / eps;
        assert!((v3.integral(eps) - exact).abs() < 1e-15);
    }

    #[test]
    fn partial_integrals_match_quadrature() {
        for kind in [EdgeKind::Vertical, EdgeKind::Horizontal] {
            let prof = RootProfile { level: 2, kind };
            for k in [0.0, 0.7, 2.0] {
                for t in [0.0, 0.2, 0.5, 0.8, 1.0] {
                    let q = quad(|s| t * (-k * prof.eval(s * t)).exp(), 2000);
                    assert!((prof.partial_integral(k, t) - q).abs() < 1e-12, "{kind:?} {k} {t}");
                }
                assert!((prof.partial_integral(k, 1.0) - prof.integral(k)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ball_mass_limits() {
        let (s, g) = interval_filling(6, 3);
        let u = uniformize(&g, &s, 3f64.ln()).unwrap();
        let d = g.eps_distances_from_point(&s, 10);
        assert_eq!(u.ball_mass(&g, &d, 0.0, 16), 0.0);
        let all = u.ball_mass(&g, &d, 100.0, 16);
        assert!((all - u.total_mass()).abs() < 1e-12 * all);
        let (m1, m2) = (u.ball_mass(&g, &d, 0.1, 16), u.ball_mass(&g, &d, 0.2, 16));
        assert!(0.0 < m1 && m1 <= m2 && m2 <= all);
    }

    #[test]
    fn single_level_hierarchy_is_a_point() {
        let s = generate_example(Example::Interval, 3).unwrap().rescale().unwrap();
        let nets = NetHierarchy { alpha: 3.0, levels: vec![vec![0]] };
        let g = build_filling(&s, &nets, 3.0).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn level_one_vertices_touch_root() {
        let (_, g) = interval_filling(6, 2);
        for v in g.level_vertices(1) {
            assert!(g.neighbors(v).iter().any(|&(w, _)| w == 0));
        }
    }

    #[test]
    fn root_distance_is_level() {
        for (e, depth) in [(Example::Interval, 7), (Example::CarpetMinusEdge, 2)] {
            let s = generate_example(e, depth).unwrap().rescale().unwrap();
            let nets = build_nets(&s, 3.0, default_depth(&s, 3.0), 0).unwrap();
            let g = build_filling(&s, &nets, 3.0).unwrap();
            let bfs = g.bfs_root_distances();
            for v in 0..g.vertex_count() {
                assert_eq!(bfs[v], Some(g.root_distance(v)));
            }
        }
    }

    #[test]
    fn missing_ancestor_is_reported() {
        let verts = vec![Vertex { point: 0, level: 0 }, Vertex { point: 1, level: 1 }];
        let err = FillingGraph::from_parts(3.0, 3.0, verts, vec![]).unwrap_err();
        assert!(matches!(err, Error::Disconnected { point: 1, level: 1 }));
    }

    #[test]
    fn conductance_closed_forms() {
        let eps = 3f64.ln();
        let edge = UniformizedEdge {
            edge: 0,
            d_eps_length: 0.0,
            mu_beta_mass: 0.0,
            a_vw: 0.7,
            profile: RootProfile { level: 0, kind: EdgeKind::Vertical },
        };
        // p = 2, θ = 1/2 ⇒ β = ε
        let c = edge_conductance(&edge, eps, eps, 2.0).unwrap();
        assert!((c - 0.7 * eps / (1.0 - 1.0 / 3.0)).abs() < 1e-14);
        assert!(edge_conductance(&edge, eps, eps, 1.0).is_err());
    }

    #[test]
    fn root_shadow_is_everything() {
        let (s, g) = interval_filling(5, 3);
        assert_eq!(g.shadow(&s, 0), s.interior());
        for v in g.finest() {
            let pt = g.vertices()[v].point;
            for i in g.shadow(&s, v) {
                assert!(s.dist(pt, i) < g.scale(v));
            }
        }
    }

    #[test]
    fn vertical_shadows_overlap_at_tau_scale() {
        let (s, g) = interval_filling(7, 4);
        for e in g.edges().iter().filter(|e| e.kind == EdgeKind::Vertical) {
            let (va, vb) = (g.vertices()[e.a], g.vertices()[e.b]);
            let (ra, rb) = (g.tau * g.scale(e.a), g.tau * g.scale(e.b));
            let shared = s.interior().into_iter().any(|i| s.dist(va.point, i) < ra && s.dist(vb.point, i) < rb);
            assert!(shared);
        }
    }

    #[test]
    fn uniformization_masses() {
        let (s, g) = interval_filling(6, 3);
        let u = uniformize(&g, &s, 3f64.ln()).unwrap();
        let total: f64 = u.edges.iter().map(|e| e.mu_beta_mass).sum();
        assert!(total.is_finite() && total > 0.0);
        assert_eq!(total, u.total_mass());
        for e in &u.edges {
            assert!(e.d_eps_length > 0.0);
            assert!(e.is_degenerate() || e.mu_beta_mass > 0.0);
        }
        let vm: f64 = u.vertex_masses(&g).iter().sum();
        assert!((vm - total).abs() < 1e-12 * total);
    }

    #[test]
    fn eps_distance_of_a_vertical_chain() {
        let (_, g) = interval_filling(6, 3);
        let d = g.eps_distances(&[(0, 0.0)]);
        let eps = g.epsilon();
        for v in 0..g.vertex_count() {
            let n = g.vertices()[v].level as f64;
            // descending purely vertically is the shortest possible route
            let vertical = (1.0 - (-eps * n).exp()) / eps;
            assert!(d[v] >= vertical - 1e-12);
        }
    }
}
