//! Jacobi-preconditioned conjugate gradients for weighted graph Laplacians
//! restricted to the free vertices.

/// `A = L_w + diag(extra)` acting on free coordinates; pinned coordinates are held at zero.
pub(crate) struct Laplacian<'a> {
    pub edges: &'a [(usize, usize)],
    pub weights: Vec<f64>,
    pub extra: Vec<f64>,
    pub free: &'a [bool],
}

impl Laplacian<'_> {
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, (xi, m)) in y.iter_mut().zip(x.iter().zip(&self.extra)) {
            *yi = m * xi;
        }
        for (&(a, b), &w) in self.edges.iter().zip(&self.weights) {
            if w != 0.0 {
                let d = w * (x[a] - x[b]);
                y[a] += d;
                y[b] -= d;
            }
        }
        for (yi, &f) in y.iter_mut().zip(self.free) {
            if !f {
                *yi = 0.0;
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let mut d = self.extra.clone();
        for (&(a, b), &w) in self.edges.iter().zip(&self.weights) {
            d[a] += w;
            d[b] += w;
        }
        d
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) struct CgOutcome {
    pub x: Vec<f64>,
    #[allow(dead_code)]
    pub iterations: usize,
}

/// Solves `A x = b` (b zero on pinned coordinates) to relative residual `rtol`.
pub(crate) fn solve(op: &Laplacian, b: &[f64], rtol: f64, max_iter: usize) -> CgOutcome {
    let n = b.len();
    let diag = op.diagonal();
    let inv: Vec<f64> = diag
        .iter()
        .zip(op.free)
        .map(|(&d, &f)| if f && d > 0.0 { 1.0 / d } else { 0.0 })
        .collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return CgOutcome { x, iterations: 0 };
    }
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return CgOutcome { x, iterations: it };
        }
        let step = rz / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        if dot(&r, &r).sqrt() <= rtol * bnorm {
            return CgOutcome { x, iterations: it + 1 };
        }
        for i in 0..n {
            z[i] = r[i] * inv[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    CgOutcome { x, iterations: max_iter }
}
