//! Extension and trace operators between `Z`, its boundary `∂Z`, and the
//! filling; the Besov seminorm; codimensional measure estimates.

use crate::error::{Error, Result};
use crate::filling::{FillingGraph, Uniformization};
use crate::fit::linear_fit;
use crate::space::FiniteSpace;

/// Values on the interior samples, in `space.interior()` order.
#[derive(Debug, Clone, PartialEq)]
pub struct ZFunction {
    pub values: Vec<f64>,
}

/// Values on the boundary samples, in `space.boundary()` order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    pub values: Vec<f64>,
}

/// Values on the filling's vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    pub values: Vec<f64>,
}

fn from_coords(space: &FiniteSpace, ids: &[usize], f: impl Fn(&[f64]) -> f64) -> Result<Vec<f64>> {
    ids.iter()
        .map(|&i| {
            space
                .point(i)
                .map(&f)
                .ok_or_else(|| Error::space(format!("point {i} has no coordinates")))
        })
        .collect()
}

impl ZFunction {
    pub fn constant(space: &FiniteSpace, c: f64) -> Self {
        ZFunction { values: vec![c; space.interior().len()] }
    }

    pub fn from_coords(space: &FiniteSpace, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Ok(ZFunction { values: from_coords(space, &space.interior(), f)? })
    }

    /// Evaluates `f` at each interior sample id.
    pub fn from_ids(space: &FiniteSpace, f: impl FnMut(usize) -> f64) -> Self {
        ZFunction { values: space.interior().into_iter().map(f).collect() }
    }

    pub fn weights(&self, space: &FiniteSpace) -> Vec<f64> {
        space.interior().into_iter().map(|i| space.nu()[i]).collect()
    }
}

impl BoundaryFunction {
    pub fn constant(space: &FiniteSpace, c: f64) -> Self {
        BoundaryFunction { values: vec![c; space.boundary().len()] }
    }

    pub fn from_coords(space: &FiniteSpace, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Ok(BoundaryFunction { values: from_coords(space, &space.boundary(), f)? })
    }

    pub fn from_ids(space: &FiniteSpace, f: impl FnMut(usize) -> f64) -> Self {
        BoundaryFunction { values: space.boundary().into_iter().map(f).collect() }
    }

    pub fn weights(&self, space: &FiniteSpace) -> Vec<f64> {
        space.boundary().into_iter().map(|i| space.pi()[i]).collect()
    }
}

impl GraphFunction {
    pub fn constant(filling: &FillingGraph, c: f64) -> Self {
        GraphFunction { values: vec![c; filling.vertex_count()] }
    }
}

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::param(format!("{what} has {got} values, expected {want}")));
    }
    Ok(())
}

/// Averaging extension: each vertex gets the `ν`-mean of `u` over its shadow.
pub fn extend_ex(u: &ZFunction, filling: &FillingGraph, space: &FiniteSpace) -> Result<GraphFunction> {
    let interior = space.interior();
    check_len("Z-function", u.values.len(), interior.len())?;
    let nu = space.nu();
    let mut values = vec![f64::NAN; filling.vertex_count()];
    for v in 0..filling.vertex_count() {
        let vx = filling.vertices()[v];
        let r = filling.scale(v);
        let (mut mass, mut sum) = (0.0, 0.0);
        for (k, &i) in interior.iter().enumerate() {
            if space.dist(vx.point, i) < r {
                mass += nu[i];
                sum += nu[i] * u.values[k];
            }
        }
        values[v] = if mass > 0.0 {
            sum / mass
        } else {
            // nearest parent; parents precede children in id order
            let parent = filling
                .neighbors(v)
                .iter()
                .map(|&(w, _)| w)
                .filter(|&w| filling.vertices()[w].level + 1 == vx.level)
                .min_by(|&a, &b| {
                    let da = space.dist(vx.point, filling.vertices()[a].point);
                    let db = space.dist(vx.point, filling.vertices()[b].point);
                    da.total_cmp(&db).then(a.cmp(&b))
                });
            match parent {
                Some(w) => values[w],
                None => return Err(Error::Degenerate("every shadow is empty".into())),
            }
        };
    }
    Ok(GraphFunction { values })
}

/// Trace at the finest scale: the `μ_β`-weighted mean of `w` (affine along
/// edges) over the star of the level-`N` vertex nearest each sample.
pub fn trace_tx(
    w: &GraphFunction,
    filling: &FillingGraph,
    uni: &Uniformization,
    space: &FiniteSpace,
) -> Result<ZFunction> {
    check_len("graph function", w.values.len(), filling.vertex_count())?;
    let limit = filling.alpha.powi(1 - filling.depth() as i32);
    let mut star = vec![f64::NAN; filling.vertex_count()];
    let mut values = Vec::new();
    for i in space.interior() {
        let (v, d) = filling.nearest_finest(space, i);
        if !(d < limit) {
            return Err(Error::Degenerate(format!("sample {i} has no finest-level vertex within {limit}")));
        }
        if star[v].is_nan() {
            star[v] = star_mean(w, filling, uni, v);
        }
        values.push(star[v]);
    }
    Ok(ZFunction { values })
}

fn star_mean(w: &GraphFunction, filling: &FillingGraph, uni: &Uniformization, v: usize) -> f64 {
    let (mut mass, mut sum) = (0.0, 0.0);
    for &(_, e) in filling.neighbors(v) {
        let m = uni.edges[e].mu_beta_mass;
        if m <= 0.0 {
            continue;
        }
        let edge = filling.edges()[e];
        let (wa, wb) = (w.values[edge.a], w.values[edge.b]);
        mass += m;
        sum += m * (wa + (wb - wa) * uni.far_weight(e));
    }
    if mass > 0.0 {
        sum / mass
    } else {
        w.values[v]
    }
}

/// `ν`-average of `values` (indexed like `interior`) over `B(center, r)`.
fn ball_average(space: &FiniteSpace, interior: &[usize], values: &[f64], center: usize, r: f64) -> Option<f64> {
    let nu = space.nu();
    let (mut mass, mut sum) = (0.0, 0.0);
    for (k, &i) in interior.iter().enumerate() {
        if space.dist(center, i) < r {
            mass += nu[i];
            sum += nu[i] * values[k];
        }
    }
    (mass > 0.0).then(|| sum / mass)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub trace: BoundaryFunction,
    /// Largest jump between ball averages at consecutive nonempty radii, per boundary sample.
    pub oscillation: Vec<f64>,
}

/// Ball-average trace on `∂Z`; `radii` are sorted internally into decreasing order.
pub fn trace_tz(u: &ZFunction, space: &FiniteSpace, radii: &[f64]) -> Result<BoundaryTrace> {
    let interior = space.interior();
    check_len("Z-function", u.values.len(), interior.len())?;
    let radii = sorted_desc(radii)?;
    let mut values = Vec::new();
    let mut oscillation = Vec::new();
    for z in space.boundary() {
        let avgs: Vec<f64> = radii
            .iter()
            .filter_map(|&r| ball_average(space, &interior, &u.values, z, r))
            .collect();
        let Some(&last) = avgs.last() else {
            return Err(Error::Degenerate(format!("every ball around boundary sample {z} is empty")));
        };
        values.push(last);
        oscillation.push(avgs.windows(2).map(|w| (w[0] - w[1]).abs()).fold(0.0, f64::max));
    }
    Ok(BoundaryTrace { trace: BoundaryFunction { values }, oscillation })
}

fn sorted_desc(radii: &[f64]) -> Result<Vec<f64>> {
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::param("radii must be a nonempty list of positive numbers"));
    }
    let mut r = radii.to_vec();
    r.sort_by(|a, b| b.total_cmp(a));
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroTraceOptions {
    /// Averages at or below this everywhere along the radii count as zero.
    pub abs_tol: f64,
    /// Least log-log slope of `⨍_{B(ζ,r)}|u|^p dν` against `r` that counts as decay.
    pub min_slope: f64,
}

impl Default for ZeroTraceOptions {
    fn default() -> Self {
        ZeroTraceOptions { abs_tol: 1e-12, min_slope: 0.25 }
    }
}

/// Per boundary sample: whether `⨍_{B(ζ,r)}|u|^p dν → 0` as `r` decreases.
pub fn zero_trace_test(
    u: &ZFunction,
    space: &FiniteSpace,
    p: f64,
    radii: &[f64],
    opts: ZeroTraceOptions,
) -> Result<Vec<bool>> {
    let interior = space.interior();
    check_len("Z-function", u.values.len(), interior.len())?;
    let radii = sorted_desc(radii)?;
    let powered: Vec<f64> = u.values.iter().map(|x| x.abs().powf(p)).collect();
    let mut out = Vec::new();
    for z in space.boundary() {
        let samples: Vec<(f64, f64)> = radii
            .iter()
            .filter_map(|&r| ball_average(space, &interior, &powered, z, r).map(|a| (r, a)))
            .collect();
        if samples.is_empty() {
            return Err(Error::Degenerate(format!("every ball around boundary sample {z} is empty")));
        }
        if samples.iter().all(|&(_, a)| a <= opts.abs_tol) {
            out.push(true);
            continue;
        }
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|&&(_, a)| a > 0.0)
            .map(|&(r, a)| (r.ln(), a.ln()))
            .collect();
        let decays = pts.len() >= 2 && linear_fit(&pts).is_some_and(|f| f.slope >= opts.min_slope);
        out.push(decays);
    }
    Ok(out)
}

/// Whitney-type extension: average `f` (by `π`) over the boundary samples in
/// `B(ζ_x, 2 d(x, ∂Z))`, `ζ_x` the nearest boundary sample to `x`.
pub fn extend_ez(f: &BoundaryFunction, space: &FiniteSpace) -> Result<ZFunction> {
    let boundary = space.boundary();
    check_len("boundary function", f.values.len(), boundary.len())?;
    if boundary.is_empty() {
        return Err(Error::Degenerate("space has no boundary samples".into()));
    }
    let values = space
        .interior()
        .into_iter()
        .map(|x| whitney_average(space, &boundary, &f.values, x))
        .collect();
    Ok(ZFunction { values })
}

/// `π`-average of `f` over `∂Z ∩ B(ζ_x, 2 d(x, ∂Z))`; `boundary` must be nonempty.
pub(crate) fn whitney_average(space: &FiniteSpace, boundary: &[usize], f: &[f64], x: usize) -> f64 {
    let pi = space.pi();
    let (zeta, d) = space.nearest_in(x, boundary.iter().copied()).expect("nonempty boundary");
    let (mut mass, mut sum) = (0.0, 0.0);
    for (k, &b) in boundary.iter().enumerate() {
        if b == zeta || space.dist(zeta, b) < 2.0 * d {
            mass += pi[b];
            sum += pi[b] * f[k];
        }
    }
    sum / mass
}

/// `p`-th power of the discrete Besov seminorm of `values` on the samples
/// `ids` with weights `w`: `Σ_{x≠y} |u(y)-u(x)|^p w_x w_y / (d^{s} m(B̄(x,d)))`,
/// with `s = θp` and `m` the closed-ball mass of `w` restricted to `ids`.
pub fn besov_pth_power(space: &FiniteSpace, ids: &[usize], values: &[f64], w: &[f64], theta: f64, p: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::param(format!("theta must lie in (0,1), got {theta}")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param(format!("p must exceed 1, got {p}")));
    }
    weighted_besov(space, ids, values, w, theta * p, p)
}

pub(crate) fn weighted_besov(space: &FiniteSpace, ids: &[usize], values: &[f64], w: &[f64], s: f64, p: f64) -> Result<f64> {
    check_len("function", values.len(), ids.len())?;
    check_len("weights", w.len(), ids.len())?;
    let n = ids.len();
    let mut total = 0.0;
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for x in 0..n {
        if w[x] <= 0.0 {
            continue;
        }
        order.clear();
        order.extend((0..n).map(|y| (space.dist(ids[x], ids[y]), y)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut k = 0;
        let mut cum = 0.0;
        while k < n {
            // group samples at equal distance: the closed ball takes them all
            let d = order[k].0;
            let mut j = k;
            while j < n && order[j].0 == d {
                cum += w[order[j].1];
                j += 1;
            }
            if d > 0.0 {
                let denom = d.powf(s) * cum;
                for &(_, y) in &order[k..j] {
                    let diff = (values[y] - values[x]).abs();
                    if diff > 0.0 && w[y] > 0.0 {
                        total += diff.powf(p) * w[x] * w[y] / denom;
                    }
                }
            }
            k = j;
        }
    }
    Ok(total)
}

/// `‖u‖_{B^θ_{p,p}(Z,ν)}` (the `p`-th root of the double sum).
pub fn besov_seminorm(u: &ZFunction, space: &FiniteSpace, theta: f64, p: f64) -> Result<f64> {
    let ids = space.interior();
    let w = u.weights(space);
    Ok(besov_pth_power(space, &ids, &u.values, &w, theta, p)?.powf(1.0 / p))
}

/// Greedy-cover estimate at a fixed scale of the codimension-`σ` Hausdorff
/// content of `subset`: `Σ ν(B_i)/scale^σ`.
pub fn codim_measure_estimate(space: &FiniteSpace, subset: &[usize], sigma: f64, scale: f64) -> f64 {
    let mut centers: Vec<usize> = Vec::new();
    for &b in subset {
        if !centers.iter().any(|&c| space.dist(c, b) < scale) {
            centers.push(b);
        }
    }
    centers.iter().map(|&c| space.ball_mass(c, scale)).sum::<f64>() / scale.powf(sigma)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularityReport {
    pub min: f64,
    pub max: f64,
    /// Pairs `(ζ, r)` skipped because `ν(B(ζ,r)) = 0`.
    pub skipped: usize,
}

impl RegularityReport {
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

/// Range of `π(B(ζ,r))·r^σ/ν(B(ζ,r))` over boundary samples and radii.
pub fn codim_regularity_check(space: &FiniteSpace, sigma: f64, radii: &[f64]) -> Result<RegularityReport> {
    let mut rep = RegularityReport { min: f64::INFINITY, max: 0.0, skipped: 0 };
    for z in space.boundary() {
        for &r in radii {
            let nu = space.ball_mass(z, r);
            if nu <= 0.0 {
                rep.skipped += 1;
                continue;
            }
            let ratio = space.boundary_ball_mass(z, r) * r.powf(sigma) / nu;
            rep.min = rep.min.min(ratio);
            rep.max = rep.max.max(ratio);
        }
    }
    if rep.max == 0.0 {
        return Err(Error::Degenerate("no boundary ball carries ν-mass".into()));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filling::{build_filling, uniformize};
    use crate::generators::{generate_example, Example};
    use crate::nets::build_nets;
    use crate::space::Metric;

    fn interval(depth: u32) -> FiniteSpace {
        generate_example(Example::Interval, depth).unwrap().rescale().unwrap()
    }

    fn setup(depth: u32, levels: usize) -> (FiniteSpace, FillingGraph, Uniformization) {
        let s = interval(depth);
        let nets = build_nets(&s, 3.0, levels, 0).unwrap();
        let g = build_filling(&s, &nets, 3.0).unwrap();
        let u = uniformize(&g, &s, 3f64.ln()).unwrap();
        (s, g, u)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn constants_are_preserved() {
        let (s, g, uni) = setup(6, 3);
        let c = 2.5;
        let ex = extend_ex(&ZFunction::constant(&s, c), &g, &s).unwrap();
        assert!(close(&ex.values, &vec![c; g.vertex_count()], 1e-14));
        let tx = trace_tx(&GraphFunction::constant(&g, c), &g, &uni, &s).unwrap();
        assert!(tx.values.iter().all(|&x| (x - c).abs() < 1e-14));
        let ez = extend_ez(&BoundaryFunction::constant(&s, c), &s).unwrap();
        assert!(ez.values.iter().all(|&x| (x - c).abs() < 1e-14));
        let tz = trace_tz(&ZFunction::constant(&s, c), &s, &[0.1, 0.05, 0.02]).unwrap();
        assert!(tz.trace.values.iter().all(|&x| (x - c).abs() < 1e-14));
        assert!(tz.oscillation.iter().all(|&o| o < 1e-14));
    }

    #[test]
    fn root_value_is_the_mean() {
        let (s, g, _) = setup(6, 3);
        let u = ZFunction::from_coords(&s, |x| x[0] * x[0]).unwrap();
        let w = u.weights(&s);
        let mean = u.values.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / w.iter().sum::<f64>();
        let ex = extend_ex(&u, &g, &s).unwrap();
        assert!((ex.values[0] - mean).abs() < 1e-14);
    }

    #[test]
    fn indicator_average_on_a_level_one_vertex() {
        let (s, g, _) = setup(6, 2);
        let u = ZFunction::from_coords(&s, |x| if x[0] < 0.25 { 1.0 } else { 0.0 }).unwrap();
        let ex = extend_ex(&u, &g, &s).unwrap();
        for v in g.level_vertices(1) {
            let c = g.vertices()[v].point;
            let r = g.scale(v);
            let (mut inside, mut total) = (0.0, 0.0);
            for i in s.interior() {
                if s.dist(c, i) < r {
                    total += s.nu()[i];
                    if s.point(i).unwrap()[0] < 0.25 {
                        inside += s.nu()[i];
                    }
                }
            }
            assert!((ex.values[v] - inside / total).abs() < 1e-14);
        }
    }

    #[test]
    fn trace_of_root_distance_is_near_depth() {
        let (s, g, uni) = setup(8, 4);
        let w = GraphFunction { values: (0..g.vertex_count()).map(|v| g.root_distance(v) as f64).collect() };
        let tx = trace_tx(&w, &g, &uni, &s).unwrap();
        for &x in &tx.values {
            assert!((x - 4.0).abs() <= 1.0, "{x}");
        }
    }

    #[test]
    fn trace_of_extension_converges() {
        let u_fn = |x: &[f64]| (3.0 * x[0]).sin();
        let mut errs = Vec::new();
        for n in [3, 4, 5] {
            let (s, g, uni) = setup(9, n);
            let u = ZFunction::from_coords(&s, u_fn).unwrap();
            let back = trace_tx(&extend_ex(&u, &g, &s).unwrap(), &g, &uni, &s).unwrap();
            errs.push(u.values.iter().zip(&back.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }

    #[test]
    fn operators_are_linear() {
        let (s, g, uni) = setup(6, 3);
        let u = ZFunction::from_coords(&s, |x| x[0]).unwrap();
        let v = ZFunction::from_coords(&s, |x| (5.0 * x[0]).cos()).unwrap();
        let comb = ZFunction { values: u.values.iter().zip(&v.values).map(|(a, b)| 2.0 * a - 3.0 * b).collect() };
        let (eu, ev, ec) = (extend_ex(&u, &g, &s).unwrap(), extend_ex(&v, &g, &s).unwrap(), extend_ex(&comb, &g, &s).unwrap());
        let lin: Vec<f64> = eu.values.iter().zip(&ev.values).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
        assert!(close(&ec.values, &lin, 1e-12));
        let (tu, tv, tc) = (
            trace_tx(&eu, &g, &uni, &s).unwrap(),
            trace_tx(&ev, &g, &uni, &s).unwrap(),
            trace_tx(&ec, &g, &uni, &s).unwrap(),
        );
        let lin: Vec<f64> = tu.values.iter().zip(&tv.values).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
        assert!(close(&tc.values, &lin, 1e-12));

        let f = BoundaryFunction { values: vec![1.0, -2.0] };
        let h = BoundaryFunction { values: vec![0.5, 4.0] };
        let fh = BoundaryFunction { values: vec![1.5, 2.0] };
        let (a, b, c) = (extend_ez(&f, &s).unwrap(), extend_ez(&h, &s).unwrap(), extend_ez(&fh, &s).unwrap());
        let lin: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        assert!(close(&c.values, &lin, 1e-12));
    }

    #[test]
    fn interval_extension_takes_nearest_endpoint() {
        let s = interval(5);
        let f = BoundaryFunction { values: vec![0.0, 1.0] };
        let e = extend_ez(&f, &s).unwrap();
        for (k, i) in s.interior().into_iter().enumerate() {
            let x = s.point(i).unwrap()[0];
            assert_eq!(e.values[k], if x <= 0.25 { 0.0 } else { 1.0 }, "x = {x}");
        }
    }

    #[test]
    fn boundary_distance_has_zero_trace() {
        let s = interval(10);
        let radii: Vec<f64> = (2..8).map(|k| 0.5f64.powi(k)).collect();
        let d = ZFunction::from_ids(&s, |i| s.nearest_boundary(i).unwrap().1);
        let tz = trace_tz(&d, &s, &radii).unwrap();
        for &v in &tz.trace.values {
            assert!(v <= radii[5], "{v}");
        }
        // a jump in the middle does not reach the boundary traces
        let jump = ZFunction::from_coords(&s, |x| if x[0] > 0.25 { 7.0 } else { 0.0 }).unwrap();
        let jumped = ZFunction { values: d.values.iter().zip(&jump.values).map(|(a, b)| a + b).collect() };
        let tj = trace_tz(&jumped, &s, &[0.1, 0.05]).unwrap();
        let t0 = trace_tz(&d, &s, &[0.1, 0.05]).unwrap();
        assert!((tj.trace.values[0] - t0.trace.values[0]).abs() < 1e-14);
    }

    #[test]
    fn zero_trace_dichotomy() {
        let s = interval(10);
        let radii: Vec<f64> = (2..8).map(|k| 0.5f64.powi(k)).collect();
        let opts = ZeroTraceOptions::default();
        let zero = ZFunction::constant(&s, 0.0);
        assert!(zero_trace_test(&zero, &s, 2.0, &radii, opts).unwrap().iter().all(|&b| b));
        let one = ZFunction::constant(&s, 1.0);
        assert!(zero_trace_test(&one, &s, 2.0, &radii, opts).unwrap().iter().all(|&b| !b));
        let sqrt = ZFunction::from_ids(&s, |i| s.nearest_boundary(i).unwrap().1.sqrt());
        assert!(zero_trace_test(&sqrt, &s, 2.0, &radii, opts).unwrap().iter().all(|&b| b));
    }

    #[test]
    fn besov_two_point_hand_computation() {
        let (m1, m2, d) = (0.3, 0.7, 0.4);
        let s = FiniteSpace::new(
            vec![Some(vec![0.0]), Some(vec![d])],
            Metric::Euclidean,
            vec![m1, m2],
            vec![false, false],
            vec![0.0, 0.0],
            1.0,
            true,
        )
        .unwrap();
        let (theta, p) = (0.5, 3.0);
        let u = ZFunction { values: vec![0.0, 1.0] };
        let got = besov_seminorm(&u, &s, theta, p).unwrap().powf(p);
        // closed balls of radius d contain both points
        let dp = d.powf(theta * p);
        let expected = 2.0 * m1 * m2 / (dp * (m1 + m2));
        assert!((got - expected).abs() < 1e-14);
    }

    #[test]
    fn besov_is_homogeneous_and_vanishes_on_constants() {
        let s = interval(6);
        let u = ZFunction::from_coords(&s, |x| x[0].powi(2)).unwrap();
        let b = besov_seminorm(&u, &s, 0.5, 2.5).unwrap();
        assert!(b > 0.0);
        let su = ZFunction { values: u.values.iter().map(|x| -3.0 * x).collect() };
        assert!((besov_seminorm(&su, &s, 0.5, 2.5).unwrap() - 3.0 * b).abs() < 1e-12 * b);
        assert_eq!(besov_seminorm(&ZFunction::constant(&s, 4.0), &s, 0.5, 2.5).unwrap(), 0.0);
    }

    #[test]
    fn codim_estimates() {
        let s = interval(8);
        let scale = 0.05;
        let est = codim_measure_estimate(&s, &s.boundary(), 1.0, scale);
        let expected = (s.ball_mass(s.boundary()[0], scale) + s.ball_mass(s.boundary()[1], scale)) / scale;
        assert!((est - expected).abs() < 1e-14);
        assert_eq!(codim_measure_estimate(&s, &[], 1.0, scale), 0.0);
        let half = codim_measure_estimate(&s, &s.boundary(), 1.0, scale / 2.0);
        assert!(est / half < 4.0 && half / est < 4.0);
    }

    #[test]
    fn carpet_regularity_is_bounded_and_detects_wrong_sigma() {
        let s = generate_example(Example::CarpetMinusEdge, 3).unwrap().rescale().unwrap();
        let radii: Vec<f64> = (0..4).map(|k| 0.2 * 0.5f64.powi(k)).collect();
        let good = codim_regularity_check(&s, s.sigma(), &radii).unwrap();
        assert!(good.spread() < 10.0, "{good:?}");
        let bad = codim_regularity_check(&s, s.sigma() + 0.3, &radii).unwrap();
        assert!(bad.spread() > good.spread());

        let scaled = FiniteSpace::new(
            s.points().to_vec(),
            s.metric().clone(),
            s.nu().to_vec(),
            s.boundary_flags().to_vec(),
            s.pi().iter().map(|x| 10.0 * x).collect(),
            s.sigma(),
            true,
        )
        .unwrap();
        let ten = codim_regularity_check(&scaled, s.sigma(), &radii).unwrap();
        assert!((ten.min / good.min - 10.0).abs() < 1e-9 && (ten.max / good.max - 10.0).abs() < 1e-9);
    }
}
