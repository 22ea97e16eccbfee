//! Nested maximal `α⁻ⁿ`-separated nets `A₀ ⊂ A₁ ⊂ … ⊂ A_N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::FiniteSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetHierarchy {
    pub alpha: f64,
    /// `levels[n]` lists the point ids of `A_n` in insertion order.
    pub levels: Vec<Vec<usize>>,
}

impl NetHierarchy {
    pub fn base_point(&self) -> usize {
        self.levels[0][0]
    }

    /// Finest level `N`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn scale(&self, n: usize) -> f64 {
        self.alpha.powi(-(n as i32))
    }
}

/// Finest level whose scale `α⁻ᴺ` is still at least the sample resolution.
pub fn default_depth(space: &FiniteSpace, alpha: f64) -> usize {
    let res = space.resolution();
    if !res.is_finite() || res >= 1.0 {
        return 1;
    }
    ((res.ln() / (1.0 / alpha).ln()).floor() as usize).max(1)
}

/// Greedy construction: `A_n` starts from `A_{n-1}` and admits points in
/// ascending id order whenever they are `α⁻ⁿ`-far from every current member.
pub fn build_nets(space: &FiniteSpace, alpha: f64, depth: usize, z0: usize) -> Result<NetHierarchy> {
    if !(alpha > 2.0) {
        return Err(Error::param(format!("alpha must exceed 2, got {alpha}")));
    }
    if depth < 1 {
        return Err(Error::param("net depth must be at least 1"));
    }
    if z0 >= space.len() {
        return Err(Error::param(format!("base point {z0} out of range")));
    }
    if space.diam() >= 1.0 {
        return Err(Error::param("space must be rescaled to diameter < 1 before building nets"));
    }
    let mut levels = vec![vec![z0]];
    let mut member = vec![false; space.len()];
    member[z0] = true;
    for n in 1..=depth {
        let sep = alpha.powi(-(n as i32));
        let mut current = levels[n - 1].clone();
        for i in 0..space.len() {
            if !member[i] && current.iter().all(|&a| space.dist(i, a) >= sep) {
                current.push(i);
                member[i] = true;
            }
        }
        levels.push(current);
    }
    Ok(NetHierarchy { alpha, levels })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetReport {
    pub nesting: bool,
    pub separation: bool,
    pub maximality: bool,
    /// First violation found: `(level, a, b)`; for maximality `b` is the uncovered point.
    pub witness: Option<(usize, usize, usize)>,
}

impl NetReport {
    pub fn ok(&self) -> bool {
        self.nesting && self.separation && self.maximality
    }
}

pub fn verify_nets(nets: &NetHierarchy, space: &FiniteSpace) -> NetReport {
    let mut report = NetReport { nesting: true, separation: true, maximality: true, witness: None };
    let note = |w: &mut Option<(usize, usize, usize)>, v| {
        if w.is_none() {
            *w = Some(v);
        }
    };
    if nets.levels.first().map(Vec::len) != Some(1) {
        report.nesting = false;
    }
    for n in 1..nets.levels.len() {
        let (prev, cur) = (&nets.levels[n - 1], &nets.levels[n]);
        if let Some(&a) = prev.iter().find(|a| !cur.contains(a)) {
            report.nesting = false;
            note(&mut report.witness, (n, a, a));
        }
    }
    for (n, level) in nets.levels.iter().enumerate() {
        let sep = nets.scale(n);
        for (k, &a) in level.iter().enumerate() {
            for &b in &level[..k] {
                if a == b || space.dist(a, b) < sep {
                    report.separation = false;
                    note(&mut report.witness, (n, b, a));
                }
            }
        }
        for i in 0..space.len() {
            if !level.iter().any(|&a| space.dist(i, a) < sep || a == i) {
                report.maximality = false;
                note(&mut report.witness, (n, level[0], i));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{generate_example, Example};
    use crate::space::Metric;

    fn grid(n: usize, len: f64) -> FiniteSpace {
        let h = len / (n - 1) as f64;
        let pts = (0..n).map(|i| Some(vec![i as f64 * h])).collect();
        FiniteSpace::new(pts, Metric::Euclidean, vec![h; n], vec![false; n], vec![0.0; n], 1.0, true).unwrap()
    }

    /// Largest subset with pairwise gaps ≥ sep, by exhaustive search on a 1-D grid
    /// (greedy from the left is optimal on a line, but enumerate to be sure).
    fn max_packing_1d(xs: &[f64], sep: f64) -> usize {
        fn go(xs: &[f64], sep: f64, last: Option<f64>, i: usize) -> usize {
            if i == xs.len() {
                return 0;
            }
            let skip = go(xs, sep, last, i + 1);
            if last.is_none_or(|l| xs[i] - l >= sep) {
                skip.max(1 + go(xs, sep, Some(xs[i]), i + 1))
            } else {
                skip
            }
        }
        go(xs, sep, None, 0)
    }

    #[test]
    fn level_zero_is_base_point() {
        let s = grid(101, 0.5);
        let nets = build_nets(&s, 3.0, 3, 7).unwrap();
        assert_eq!(nets.levels[0], vec![7]);
    }

    #[test]
    fn interval_level_one_has_two_points() {
        let s = grid(101, 0.5);
        let nets = build_nets(&s, 3.0, 2, 0).unwrap();
        assert_eq!(nets.levels[1].len(), 2);
        // no larger 1/3-separated subset exists in the coarse sample
        let xs: Vec<f64> = (0..101).step_by(5).map(|i| s.point(i).unwrap()[0]).collect();
        assert_eq!(max_packing_1d(&xs, 1.0 / 3.0), 2);
    }

    #[test]
    fn built_nets_verify() {
        for (e, depth) in [(Example::Interval, 6), (Example::CarpetMinusEdge, 2), (Example::KochRug, 1)] {
            let s = generate_example(e, depth).unwrap().rescale().unwrap();
            let n = default_depth(&s, 3.0);
            let nets = build_nets(&s, 3.0, n, 0).unwrap();
            let rep = verify_nets(&nets, &s);
            assert!(rep.ok(), "{e}: {rep:?}");
            for w in nets.levels.windows(2) {
                assert!(w[0].len() <= w[1].len());
            }
            assert_eq!(nets, build_nets(&s, 3.0, n, 0).unwrap());
        }
    }

    #[test]
    fn constructed_violations_are_detected() {
        let s = grid(101, 0.5);
        let mut nets = build_nets(&s, 3.0, 3, 0).unwrap();
        let good = verify_nets(&nets, &s);
        assert!(good.ok());

        let mut removed = nets.clone();
        removed.levels[3].pop();
        let rep = verify_nets(&removed, &s);
        assert!(!rep.maximality && rep.witness.is_some());

        let dup = nets.levels[3][1];
        nets.levels[3].push(dup);
        let rep = verify_nets(&nets, &s);
        assert!(!rep.separation);
    }

    #[test]
    fn packing_lower_bound_on_interval() {
        let s = grid(1025, 0.5);
        let nets = build_nets(&s, 3.0, 5, 0).unwrap();
        for n in 1..=5 {
            let bound = 3f64.powi(n as i32) * s.diam();
            assert!(nets.levels[n].len() as f64 >= 0.5 * bound, "level {n}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = grid(11, 0.5);
        assert!(build_nets(&s, 2.0, 2, 0).is_err());
        assert!(build_nets(&s, 3.0, 0, 0).is_err());
        assert!(build_nets(&s, 3.0, 2, 11).is_err());
    }
}
