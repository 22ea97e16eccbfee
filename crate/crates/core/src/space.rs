//! Finite samples of metric measure spaces `(Z, d, ν)` together with a
//! sampled boundary `∂Z` carrying the measure `π`.
//!
//! Measures are atomic: each sample point carries the mass of its Voronoi
//! cell, so every integral against `ν` or `π` is a weighted sum.

use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Upper bound on the number of sample points any constructor accepts.
pub const MAX_POINTS: usize = 200_000;

/// How pairwise distances are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Euclidean distance between the embedding coordinates.
    Euclidean,
    /// Explicit symmetric distance matrix.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy)]
struct Extent {
    diam: f64,
    resolution: f64,
}

#[derive(Debug)]
pub struct FiniteSpace {
    points: Vec<Option<Vec<f64>>>,
    metric: Metric,
    nu: Vec<f64>,
    boundary: Vec<bool>,
    pi: Vec<f64>,
    sigma: f64,
    rescaled: bool,
    extent: OnceLock<Extent>,
}

impl Clone for FiniteSpace {
    fn clone(&self) -> Self {
        FiniteSpace {
            points: self.points.clone(),
            metric: self.metric.clone(),
            nu: self.nu.clone(),
            boundary: self.boundary.clone(),
            pi: self.pi.clone(),
            sigma: self.sigma,
            rescaled: self.rescaled,
            extent: self.extent.clone(),
        }
    }
}

impl FiniteSpace {
    /// Builds a space after checking the measure invariants.
    ///
    /// `nu`, `boundary` and `pi` are indexed by point id. `ν` must be positive
    /// on interior samples and zero on boundary samples; `π` the other way round.
    pub fn new(
        points: Vec<Option<Vec<f64>>>,
        metric: Metric,
        nu: Vec<f64>,
        boundary: Vec<bool>,
        pi: Vec<f64>,
        sigma: f64,
        rescaled: bool,
    ) -> Result<Self> {
        let n = nu.len();
        if n == 0 {
            return Err(Error::space("no sample points"));
        }
        if n > MAX_POINTS {
            return Err(Error::TooLarge { requested: n, limit: MAX_POINTS });
        }
        if boundary.len() != n || pi.len() != n || points.len() != n {
            return Err(Error::space(format!(
                "length mismatch: {} points, {} nu, {} boundary flags, {} pi",
                points.len(),
                n,
                boundary.len(),
                pi.len()
            )));
        }
        match &metric {
            Metric::Euclidean => {
                let dim = points
                    .first()
                    .and_then(|p| p.as_ref())
                    .map(|c| c.len())
                    .ok_or_else(|| Error::space("euclidean metric needs coordinates"))?;
                for (i, p) in points.iter().enumerate() {
                    match p {
                        Some(c) if c.len() == dim && c.iter().all(|x| x.is_finite()) => {}
                        _ => return Err(Error::space(format!("bad coordinates for point {i}"))),
                    }
                }
            }
            Metric::Matrix(m) => {
                if m.len() != n || m.iter().any(|row| row.len() != n) {
                    return Err(Error::space("distance matrix is not n x n"));
                }
                for i in 0..n {
                    if m[i][i] != 0.0 {
                        return Err(Error::space(format!("nonzero diagonal at {i}")));
                    }
                    for j in 0..i {
                        let d = m[i][j];
                        if !(d.is_finite() && d > 0.0) || d != m[j][i] {
                            return Err(Error::space(format!(
                                "distance ({i},{j}) must be positive and symmetric"
                            )));
                        }
                    }
                }
            }
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::space(format!("codimension must be positive, got {sigma}")));
        }
        for i in 0..n {
            let (m, w) = (nu[i], pi[i]);
            if !(m.is_finite() && w.is_finite() && m >= 0.0 && w >= 0.0) {
                return Err(Error::space(format!("non-finite or negative mass at {i}")));
            }
            if boundary[i] {
                if m != 0.0 {
                    return Err(Error::space(format!("boundary sample {i} carries nu mass")));
                }
                if w <= 0.0 {
                    return Err(Error::space(format!("boundary sample {i} has no pi mass")));
                }
            } else {
                if m <= 0.0 {
                    return Err(Error::space(format!("interior sample {i} has no nu mass")));
                }
                if w != 0.0 {
                    return Err(Error::space(format!("interior sample {i} carries pi mass")));
                }
            }
        }
        if boundary.iter().all(|&b| b) {
            return Err(Error::space("no interior samples"));
        }
        let space = FiniteSpace {
            points,
            metric,
            nu,
            boundary,
            pi,
            sigma,
            rescaled,
            extent: OnceLock::new(),
        };
        if n > 1 && space.resolution() <= 0.0 {
            return Err(Error::space("two sample points coincide"));
        }
        if rescaled && space.diam() >= 1.0 {
            return Err(Error::space(format!(
                "space flagged as rescaled but diameter is {}",
                space.diam()
            )));
        }
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Euclidean => {
                let (a, b) = (self.coords(i), self.coords(j));
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            }
            Metric::Matrix(m) => m[i][j],
        }
    }

    fn coords(&self, i: usize) -> &[f64] {
        self.points[i].as_deref().unwrap_or(&[])
    }

    pub fn point(&self, i: usize) -> Option<&[f64]> {
        self.points[i].as_deref()
    }

    pub fn points(&self) -> &[Option<Vec<f64>>] {
        &self.points
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn nu(&self) -> &[f64] {
        &self.nu
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.boundary[i]
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn is_rescaled(&self) -> bool {
        self.rescaled
    }

    /// Replaces the codimension (the interval's boundary codimension is a free parameter).
    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param(format!("sigma must be positive, got {sigma}")));
        }
        self.sigma = sigma;
        Ok(self)
    }

    /// Ids of interior (`Z`) samples, ascending.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.boundary[i]).collect()
    }

    /// Ids of boundary (`∂Z`) samples, ascending.
    pub fn boundary(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.boundary[i]).collect()
    }

    pub fn total_nu(&self) -> f64 {
        self.nu.iter().sum()
    }

    pub fn total_pi(&self) -> f64 {
        self.pi.iter().sum()
    }

    fn extent(&self) -> Extent {
        *self.extent.get_or_init(|| {
            let n = self.len();
            let mut diam = 0.0_f64;
            let mut resolution = f64::INFINITY;
            for i in 0..n {
                for j in 0..i {
                    let d = self.dist(i, j);
                    diam = diam.max(d);
                    resolution = resolution.min(d);
                }
            }
            Extent { diam, resolution }
        })
    }

    pub fn diam(&self) -> f64 {
        self.extent().diam
    }

    /// Minimal pairwise distance (`+∞` for a single point).
    pub fn resolution(&self) -> f64 {
        self.extent().resolution
    }

    /// Multiplies all distances by `1/(2·diam)` so that the diameter becomes 1/2.
    ///
    /// A space already flagged as rescaled is returned unchanged.
    pub fn rescale(&self) -> Result<FiniteSpace> {
        if self.rescaled {
            return Ok(self.clone());
        }
        let diam = self.diam();
        if self.len() < 2 || diam <= 0.0 {
            return Err(Error::Degenerate("cannot rescale a space of diameter 0".into()));
        }
        let factor = 1.0 / (2.0 * diam);
        let points = self
            .points
            .iter()
            .map(|p| p.as_ref().map(|c| c.iter().map(|x| x * factor).collect()))
            .collect();
        let metric = match &self.metric {
            Metric::Euclidean => Metric::Euclidean,
            Metric::Matrix(m) => Metric::Matrix(
                m.iter()
                    .map(|row| row.iter().map(|d| d * factor).collect())
                    .collect(),
            ),
        };
        let extent = self.extent();
        let out = FiniteSpace {
            points,
            metric,
            nu: self.nu.clone(),
            boundary: self.boundary.clone(),
            pi: self.pi.clone(),
            sigma: self.sigma,
            rescaled: true,
            extent: OnceLock::new(),
        };
        let _ = out.extent.set(Extent {
            diam: 0.5,
            resolution: extent.resolution * factor,
        });
        Ok(out)
    }

    /// `ν(B(center, r))` over the open ball.
    pub fn ball_mass(&self, center: usize, r: f64) -> f64 {
        self.weighted_ball(&self.nu, center, r)
    }

    /// `π(B(center, r))` over the open ball.
    pub fn boundary_ball_mass(&self, center: usize, r: f64) -> f64 {
        self.weighted_ball(&self.pi, center, r)
    }

    fn weighted_ball(&self, weights: &[f64], center: usize, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        (0..self.len())
            .filter(|&j| self.dist(center, j) < r)
            .map(|j| weights[j])
            .sum()
    }

    /// Ids of points in the open ball, ascending.
    pub fn ball(&self, center: usize, r: f64) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.dist(center, j) < r).collect()
    }

    /// Distance from point `i` to the nearest boundary sample, with that sample.
    pub fn nearest_boundary(&self, i: usize) -> Option<(usize, f64)> {
        self.nearest_in(i, (0..self.len()).filter(|&j| self.boundary[j]))
    }

    /// Nearest member of `candidates` to point `i`; ties go to the first candidate.
    pub fn nearest_in(
        &self,
        i: usize,
        candidates: impl IntoIterator<Item = usize>,
    ) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in candidates {
            let d = self.dist(i, j);
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((j, d));
            }
        }
        best
    }

    /// Empirical doubling ratio `max ν(B(x,2r))/ν(B(x,r))` over all sample centers.
    pub fn doubling_estimate(&self, radii: &[f64]) -> Result<f64> {
        self.doubling_estimate_at(&(0..self.len()).collect::<Vec<_>>(), radii)
    }

    /// Doubling ratio restricted to the given centers; empty balls are skipped.
    pub fn doubling_estimate_at(&self, centers: &[usize], radii: &[f64]) -> Result<f64> {
        let mut worst: Option<f64> = None;
        for &c in centers {
            for &r in radii {
                let inner = self.ball_mass(c, r);
                if inner > 0.0 {
                    let ratio = self.ball_mass(c, 2.0 * r) / inner;
                    worst = Some(worst.map_or(ratio, |w| w.max(ratio)));
                }
            }
        }
        worst.ok_or_else(|| Error::Degenerate("every sampled ball is empty".into()))
    }

    /// Checks that the metric is a metric on the samples: exhaustive over
    /// triples up to 500 points, 10⁵ random triples beyond.
    pub fn verify_triangle_inequality(&self, seed: u64) -> Option<(usize, usize, usize)> {
        let n = self.len();
        let slack = 1e-12 * self.diam().max(1.0);
        let bad = |i: usize, j: usize, k: usize| self.dist(i, k) > self.dist(i, j) + self.dist(j, k) + slack;
        if n <= 500 {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        if bad(i, j, k) {
                            return Some((i, j, k));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..100_000 {
                let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if bad(i, j, k) {
                    return Some((i, j, k));
                }
            }
        }
        None
    }

    /// Uniform perfectness of `subset` with constant `k`, tested at radii above
    /// three times the subset's resolution.
    pub fn uniform_perfectness_check(&self, subset: &[usize], k: f64) -> Result<PerfectnessReport> {
        if k < 2.0 {
            return Err(Error::param(format!("uniform perfectness constant must be >= 2, got {k}")));
        }
        if subset.is_empty() {
            return Err(Error::param("empty subset"));
        }
        let degenerate = PerfectnessReport { perfect: false, degenerate: true, witness: None, radii_tested: 0 };
        if subset.len() < 2 {
            return Ok(degenerate);
        }
        let mut diam = 0.0_f64;
        let mut resolution = f64::INFINITY;
        for (a, &i) in subset.iter().enumerate() {
            for &j in &subset[..a] {
                let d = self.dist(i, j);
                diam = diam.max(d);
                resolution = resolution.min(d);
            }
        }
        let r_min = 3.0 * resolution;
        if r_min >= diam {
            return Ok(degenerate);
        }
        let step = 2f64.powf(0.25);
        let mut radii = Vec::new();
        let mut r = r_min * step;
        while r < diam {
            radii.push(r);
            r *= step;
        }
        for &w in subset {
            for &r in &radii {
                let hit = subset.iter().any(|&a| {
                    let d = self.dist(w, a);
                    d < r && d >= r / k
                });
                if !hit {
                    return Ok(PerfectnessReport {
                        perfect: false,
                        degenerate: false,
                        witness: Some((w, r)),
                        radii_tested: radii.len(),
                    });
                }
            }
        }
        Ok(PerfectnessReport { perfect: true, degenerate: false, witness: None, radii_tested: radii.len() })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerfectnessReport {
    pub perfect: bool,
    /// Set when the subset is too small or too sparse for any radius to be tested.
    pub degenerate: bool,
    /// Center and radius of an empty annulus.
    pub witness: Option<(usize, f64)>,
    pub radii_tested: usize,
}
