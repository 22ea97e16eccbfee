//! Sampled versions of the standard example domains.
//!
//! Every generator returns an *unrescaled* space whose points are ordered
//! lexicographically by construction address: interior cells first, then
//! boundary samples.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::space::{FiniteSpace, Metric, MAX_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Example {
    /// `(0,1)` with `∂Z = {0, 1}` and counting measure on the boundary.
    Interval,
    /// `(0,1)²` with the perimeter as boundary, carrying length measure.
    Square,
    /// von Koch curve times `(0,1)`; boundary is the curve at heights 0 and 1.
    KochRug,
    /// Sierpiński carpet without its bottom edge.
    CarpetMinusEdge,
    /// Pentagasket without the arc generated by four of its five maps.
    PentagasketMinusArc,
}

impl Example {
    pub const ALL: [Example; 5] = [
        Example::Interval,
        Example::Square,
        Example::KochRug,
        Example::CarpetMinusEdge,
        Example::PentagasketMinusArc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Example::Interval => "interval",
            Example::Square => "square",
            Example::KochRug => "koch_rug",
            Example::CarpetMinusEdge => "carpet_minus_edge",
            Example::PentagasketMinusArc => "pentagasket_minus_arc",
        }
    }

    /// Analytic codimension of `π` relative to `ν`.
    pub fn sigma(self) -> f64 {
        match self {
            Example::Interval | Example::Square | Example::KochRug => 1.0,
            Example::CarpetMinusEdge => (8.0f64 / 3.0).ln() / 3f64.ln(),
            Example::PentagasketMinusArc => (5.0f64 / 4.0).ln() / golden_scale().ln(),
        }
    }

    /// Hausdorff dimension of the interior measure `ν`.
    pub fn mass_dimension(self) -> f64 {
        match self {
            Example::Interval => 1.0,
            Example::Square => 2.0,
            Example::KochRug => 4f64.ln() / 3f64.ln() + 1.0,
            Example::CarpetMinusEdge => 8f64.ln() / 3f64.ln(),
            Example::PentagasketMinusArc => 5f64.ln() / golden_scale().ln(),
        }
    }

    /// Number of sample points produced at `depth`.
    pub fn point_count(self, depth: u32) -> Option<usize> {
        let pow = |b: usize| b.checked_pow(depth);
        match self {
            Example::Interval => pow(2)?.checked_add(1),
            Example::Square => pow(2)?.checked_add(1).and_then(|m| m.checked_mul(m)),
            Example::KochRug => pow(4)?.checked_mul(pow(3)?.checked_add(2)?),
            Example::CarpetMinusEdge => pow(8)?.checked_add(pow(3)?),
            Example::PentagasketMinusArc => pow(5)?.checked_add(pow(4)?),
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::UnknownExample(s.to_string()))
    }
}

/// `(3+√5)/2`, the inverse contraction ratio of the pentagasket.
pub fn golden_scale() -> f64 {
    (3.0 + 5f64.sqrt()) / 2.0
}

pub fn generate_example(example: Example, depth: u32) -> Result<FiniteSpace> {
    if depth < 1 {
        return Err(Error::param("depth must be at least 1"));
    }
    match example.point_count(depth) {
        Some(n) if n <= MAX_POINTS => {}
        Some(n) => return Err(Error::TooLarge { requested: n, limit: MAX_POINTS }),
        None => return Err(Error::TooLarge { requested: usize::MAX, limit: MAX_POINTS }),
    }
    let samples = match example {
        Example::Interval => interval(depth),
        Example::Square => square(depth),
        Example::KochRug => koch_rug(depth),
        Example::CarpetMinusEdge => carpet(depth),
        Example::PentagasketMinusArc => pentagasket(depth),
    };
    samples.into_space(example.sigma())
}

#[derive(Default)]
struct Samples {
    points: Vec<Option<Vec<f64>>>,
    nu: Vec<f64>,
    pi: Vec<f64>,
    boundary: Vec<bool>,
}

impl Samples {
    fn interior(&mut self, p: Vec<f64>, mass: f64) {
        self.points.push(Some(p));
        self.nu.push(mass);
        self.pi.push(0.0);
        self.boundary.push(false);
    }

    fn edge(&mut self, p: Vec<f64>, mass: f64) {
        self.points.push(Some(p));
        self.nu.push(0.0);
        self.pi.push(mass);
        self.boundary.push(true);
    }

    fn into_space(self, sigma: f64) -> Result<FiniteSpace> {
        FiniteSpace::new(self.points, Metric::Euclidean, self.nu, self.boundary, self.pi, sigma, false)
    }
}

fn interval(depth: u32) -> Samples {
    let m = 1usize << depth;
    let h = 1.0 / m as f64;
    let mut s = Samples::default();
    for i in 0..=m {
        let x = i as f64 * h;
        if i == 0 || i == m {
            s.edge(vec![x], 1.0);
        } else {
            s.interior(vec![x], h);
        }
    }
    s
}

fn square(depth: u32) -> Samples {
    let m = 1usize << depth;
    let h = 1.0 / m as f64;
    let mut s = Samples::default();
    for i in 0..=m {
        for j in 0..=m {
            let p = vec![i as f64 * h, j as f64 * h];
            if i == 0 || j == 0 || i == m || j == m {
                s.edge(p, h);
            } else {
                s.interior(p, h * h);
            }
        }
    }
    s
}

/// Iterated function system of homotheties `x ↦ ratio·x + offset`.
struct Homotheties {
    ratio: f64,
    offsets: Vec<[f64; 2]>,
}

impl Homotheties {
    /// Images `f_w(x)` for all words `w` of length `depth` over `alphabet`, in
    /// lexicographic order of `w`.
    fn images(&self, alphabet: &[usize], depth: u32, x: [f64; 2]) -> Vec<[f64; 2]> {
        let mut words: Vec<[f64; 2]> = vec![x];
        // f_{w1..wk}(x) = f_{w1}(f_{w2..wk}(x)); build from the innermost map outwards
        // so that the first letter varies slowest.
        for _ in 0..depth {
            let mut next = Vec::with_capacity(words.len() * alphabet.len());
            for &a in alphabet {
                let o = self.offsets[a];
                next.extend(words.iter().map(|p| [self.ratio * p[0] + o[0], self.ratio * p[1] + o[1]]));
            }
            words = next;
        }
        words
    }
}

fn carpet(depth: u32) -> Samples {
    let mut offsets = Vec::new();
    for j in 0..3 {
        for i in 0..3 {
            if (i, j) != (1, 1) {
                offsets.push([i as f64 / 3.0, j as f64 / 3.0]);
            }
        }
    }
    let ifs = Homotheties { ratio: 1.0 / 3.0, offsets };
    let all: Vec<usize> = (0..8).collect();
    let bottom = [0, 1, 2];
    let cell_mass = 8f64.powi(-(depth as i32));
    let edge_mass = 3f64.powi(-(depth as i32));
    let mut s = Samples::default();
    for p in ifs.images(&all, depth, [0.5, 0.5]) {
        s.interior(p.to_vec(), cell_mass);
    }
    for p in ifs.images(&bottom, depth, [0.5, 0.0]) {
        s.edge(p.to_vec(), edge_mass);
    }
    s
}

fn pentagasket(depth: u32) -> Samples {
    let lambda = 1.0 / golden_scale();
    let vertices: Vec<[f64; 2]> = (0..5)
        .map(|i| {
            let t = std::f64::consts::FRAC_PI_2 + 2.0 * std::f64::consts::PI * i as f64 / 5.0;
            [t.cos(), t.sin()]
        })
        .collect();
    let offsets = vertices.iter().map(|v| [(1.0 - lambda) * v[0], (1.0 - lambda) * v[1]]).collect();
    let ifs = Homotheties { ratio: lambda, offsets };
    let all: Vec<usize> = (0..5).collect();
    let arc = [1, 2, 3, 4];
    let cell_mass = 5f64.powi(-(depth as i32));
    let arc_mass = 4f64.powi(-(depth as i32));
    let mut s = Samples::default();
    for p in ifs.images(&all, depth, [0.0, 0.0]) {
        s.interior(p.to_vec(), cell_mass);
    }
    // corner 1 is the fixed point of map 1, hence on the arc
    for p in ifs.images(&arc, depth, vertices[1]) {
        s.edge(p.to_vec(), arc_mass);
    }
    s
}

/// Segment midpoints of the depth-`depth` von Koch curve from (0,0) to (1,0),
/// in order along the curve.
fn koch_midpoints(depth: u32) -> Vec<[f64; 2]> {
    let mut pts = vec![[0.0, 0.0], [1.0, 0.0]];
    let (c, s) = ((std::f64::consts::PI / 3.0).cos(), (std::f64::consts::PI / 3.0).sin());
    for _ in 0..depth {
        let mut next = Vec::with_capacity(4 * pts.len());
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = [(b[0] - a[0]) / 3.0, (b[1] - a[1]) / 3.0];
            let p1 = [a[0] + d[0], a[1] + d[1]];
            let p3 = [a[0] + 2.0 * d[0], a[1] + 2.0 * d[1]];
            let peak = [p1[0] + c * d[0] - s * d[1], p1[1] + s * d[0] + c * d[1]];
            next.extend([a, p1, peak, p3]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    pts.windows(2).map(|w| [(w[0][0] + w[1][0]) / 2.0, (w[0][1] + w[1][1]) / 2.0]).collect()
}

fn koch_rug(depth: u32) -> Samples {
    let curve = koch_midpoints(depth);
    let layers = 3usize.pow(depth);
    let seg_mass = 4f64.powi(-(depth as i32));
    let dt = 1.0 / layers as f64;
    let mut s = Samples::default();
    for p in &curve {
        for j in 0..layers {
            s.interior(vec![p[0], p[1], (j as f64 + 0.5) * dt], seg_mass * dt);
        }
    }
    for height in [0.0, 1.0] {
        for p in &curve {
            s.edge(vec![p[0], p[1], height], seg_mass);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_codimensions() {
        assert!((Example::CarpetMinusEdge.sigma() - 0.892_789).abs() < 1e-5);
        assert_eq!(Example::KochRug.sigma(), 1.0);
        let pg = (1.25f64).ln() / ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert_eq!(Example::PentagasketMinusArc.sigma(), pg);
        assert!(pg < 1.0);
    }

    #[test]
    fn counts_match_generated_sizes() {
        for e in Example::ALL {
            for depth in 1..=3 {
                let s = generate_example(e, depth).unwrap();
                assert_eq!(Some(s.len()), e.point_count(depth), "{e} depth {depth}");
            }
        }
        let carpet = generate_example(Example::CarpetMinusEdge, 3).unwrap();
        assert_eq!(carpet.interior().len(), 512);
        assert_eq!(carpet.boundary().len(), 27);
        assert_eq!(generate_example(Example::Interval, 5).unwrap().len(), 33);
    }

    #[test]
    fn measures_are_normalised() {
        for e in [Example::CarpetMinusEdge, Example::PentagasketMinusArc, Example::KochRug] {
            let s = generate_example(e, 2).unwrap();
            assert!((s.total_nu() - 1.0).abs() < 1e-12, "{e}");
        }
        let carpet = generate_example(Example::CarpetMinusEdge, 3).unwrap();
        assert!((carpet.total_pi() - 1.0).abs() < 1e-12);
        let rug = generate_example(Example::KochRug, 2).unwrap();
        assert!((rug.total_pi() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn carpet_boundary_is_bottom_edge() {
        let s = generate_example(Example::CarpetMinusEdge, 2).unwrap();
        for i in s.boundary() {
            assert_eq!(s.point(i).unwrap()[1], 0.0);
        }
        for i in s.interior() {
            assert!(s.point(i).unwrap()[1] > 0.0);
        }
    }

    #[test]
    fn unknown_name_and_guards() {
        assert!(matches!("sponge".parse::<Example>(), Err(Error::UnknownExample(_))));
        assert_eq!("koch_rug".parse::<Example>().unwrap(), Example::KochRug);
        assert!(matches!(generate_example(Example::CarpetMinusEdge, 9), Err(Error::TooLarge { .. })));
        assert!(generate_example(Example::Interval, 0).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_example(Example::PentagasketMinusArc, 3).unwrap();
        let b = generate_example(Example::PentagasketMinusArc, 3).unwrap();
        assert_eq!(a.points(), b.points());
    }
}
