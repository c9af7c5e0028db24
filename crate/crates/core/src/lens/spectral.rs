//! Low Laplacian eigenvectors by restarted Lanczos.
//!
//! The solver works on the complement of the constant vector (the kernel
//! of `L` on a connected graph) with full reorthogonalization against the
//! whole basis. Eigenpairs are extracted one at a time; each converged
//! vector is locked and deflated before the next run, so repeated
//! eigenvalues are found with their full multiplicity. Restarts keep the
//! best half of the Ritz vectors (Krylov–Schur style) and the projected
//! matrix is diagonalized with cyclic Jacobi rotations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LensDiagnostics, LensError, LensField, LensKind, LensParams};
use crate::graph::{connected_components, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenWhich {
    /// Eigenvector of the second smallest eigenvalue (Fiedler vector).
    L2,
    /// Eigenvector of the third smallest eigenvalue.
    L3,
}

impl EigenWhich {
    fn kind(self) -> LensKind {
        match self {
            EigenWhich::L2 => LensKind::LaplacianL2,
            EigenWhich::L3 => LensKind::LaplacianL3,
        }
    }

    /// Number of non-trivial eigenpairs needed.
    fn rank(self) -> usize {
        match self {
            EigenWhich::L2 => 1,
            EigenWhich::L3 => 2,
        }
    }
}

/// `out = L x` with `(Lx)(v) = Σ_{u ∈ N(v)} w_uv (x(v) − x(u))`.
pub fn laplacian_apply(g: &WeightedGraph, x: &[f64], out: &mut [f64]) {
    for (v, o) in out.iter_mut().enumerate() {
        *o = g.neighbors(v).map(|(u, w)| w * (x[v] - x[u])).sum();
    }
}

/// Unit eigenvector of the second (`L2`) or third (`L3`) smallest eigenvalue
/// of the unnormalized Laplacian, with `‖Lv − λv‖₂ ≤ tol`.
///
/// The sign is fixed so the entry of largest magnitude is positive; entries
/// within a relative `1e-6` of the maximum count as tied and the lowest index
/// wins.
pub fn compute_laplacian_eigen(
    g: &WeightedGraph,
    which: EigenWhich,
    tol: f64,
    seed: u64,
) -> Result<LensField, LensError> {
    let kind = which.kind();
    if !(tol.is_finite() && tol > 0.0) {
        return Err(LensError::InvalidParameter(format!(
            "eigen tolerance must be positive, got {tol}"
        )));
    }
    let n = g.node_count();
    if n == 0 {
        return Err(LensError::EmptyGraph);
    }
    let dimension = connected_components(g, None).len();
    if dimension > 1 {
        return Err(LensError::KernelMultiplicity { dimension });
    }
    if n < which.rank() + 1 {
        return Err(LensError::TooFewNodes {
            lens: kind,
            needed: which.rank() + 1,
            found: n,
        });
    }

    let mut solver = Lanczos::new(g, seed, 10 * n);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut eigenvalue = 0.0;
    for _ in 0..which.rank() {
        let (value, vector) =
            solver
                .smallest(&locked, tol)
                .map_err(|residual| LensError::NotConverged {
                    lens: kind,
                    iterations: solver.matvecs,
                    residual,
                })?;
        eigenvalue = value;
        locked.push(vector);
    }
    let mut vector = locked.pop().expect("at least one eigenpair");
    apply_sign_rule(&mut vector);
    let residual = residual_norm(g, &vector, eigenvalue);

    let params = LensParams {
        eigen_tol: tol,
        eigen_seed: seed,
        ..LensParams::default()
    };
    let mut field = LensField::from_raw(kind, params, vector)?;
    field.diagnostics = LensDiagnostics {
        eigenvalue: Some(eigenvalue),
        residual: Some(residual),
        iterations: Some(solver.matvecs),
        scores: None,
    };
    Ok(field)
}

fn apply_sign_rule(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(i) = v.iter().position(|x| x.abs() >= max * (1.0 - 1e-6)) {
        if v[i] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

pub(crate) fn residual_norm(g: &WeightedGraph, v: &[f64], lambda: f64) -> f64 {
    let mut lv = vec![0.0; v.len()];
    laplacian_apply(g, v, &mut lv);
    lv.iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

struct Lanczos<'g> {
    g: &'g WeightedGraph,
    rng: ChaCha8Rng,
    budget: usize,
    matvecs: usize,
}

impl<'g> Lanczos<'g> {
    fn new(g: &'g WeightedGraph, seed: u64, budget: usize) -> Self {
        Self {
            g,
            rng: ChaCha8Rng::seed_from_u64(seed),
            budget,
            matvecs: 0,
        }
    }

    /// Projects `x` onto the complement of `1`, `locked` and `basis`
    /// (two Gram–Schmidt passes). Returns the coefficients on `basis`.
    fn orthogonalize(x: &mut [f64], locked: &[Vec<f64>], basis: &[Vec<f64>]) -> Vec<f64> {
        let mut coef = vec![0.0; basis.len()];
        for _ in 0..2 {
            remove_mean(x);
            for l in locked {
                let c = dot(l, x);
                axpy(-c, l, x);
            }
            for (b, acc) in basis.iter().zip(coef.iter_mut()) {
                let c = dot(b, x);
                axpy(-c, b, x);
                *acc += c;
            }
        }
        coef
    }

    /// A fresh random unit vector orthogonal to everything so far, if any
    /// direction remains.
    fn random_direction(&mut self, locked: &[Vec<f64>], basis: &[Vec<f64>]) -> Option<Vec<f64>> {
        let n = self.g.node_count();
        for _ in 0..3 {
            let mut x: Vec<f64> = (0..n).map(|_| self.rng.random::<f64>() - 0.5).collect();
            let before = norm(&x);
            Self::orthogonalize(&mut x, locked, basis);
            let after = norm(&x);
            if after > 1e-8 * before {
                x.iter_mut().for_each(|v| *v /= after);
                return Some(x);
            }
        }
        None
    }

    /// Smallest eigenpair of `L` on the complement of `1` and `locked`.
    /// On failure returns the best residual seen.
    fn smallest(&mut self, locked: &[Vec<f64>], tol: f64) -> Result<(f64, Vec<f64>), f64> {
        let n = self.g.node_count();
        let dim = n - 1 - locked.len();
        let m = dim.min(60);
        let keep = (m / 2).max(1);
        let target = tol * 0.1;
        let breakdown = 1e-12 * self.scale();

        let Some(start) = self.random_direction(locked, &[]) else {
            return Err(f64::INFINITY);
        };
        let mut basis = vec![start];
        let mut h = vec![vec![0.0; m]; m];
        let mut best = f64::INFINITY;
        let mut lv = vec![0.0; n];
        loop {
            // expand the basis to m vectors; `tail` is the unnormalized residual direction
            let mut tail;
            let mut tail_norm;
            let mut j = basis.len() - 1;
            loop {
                laplacian_apply(self.g, &basis[j], &mut lv);
                self.matvecs += 1;
                tail = lv.clone();
                let coef = Self::orthogonalize(&mut tail, locked, &basis);
                for (i, c) in coef.into_iter().enumerate() {
                    h[i][j] = c;
                    h[j][i] = c;
                }
                tail_norm = norm(&tail);
                if j + 1 == m {
                    break;
                }
                let next = if tail_norm > breakdown {
                    h[j + 1][j] = tail_norm;
                    h[j][j + 1] = tail_norm;
                    tail.iter().map(|x| x / tail_norm).collect()
                } else {
                    h[j + 1][j] = 0.0;
                    h[j][j + 1] = 0.0;
                    match self.random_direction(locked, &basis) {
                        Some(v) => v,
                        None => break,
                    }
                };
                basis.push(next);
                j += 1;
            }
            let size = basis.len();
            let projected: Vec<Vec<f64>> =
                h[..size].iter().map(|row| row[..size].to_vec()).collect();
            let (theta, y) = jacobi_eigen(projected);
            let coupling = if size == m { tail_norm } else { 0.0 };

            // Ritz pairs in ascending order of value
            let ritz = |c: usize| -> Vec<f64> {
                let mut x = vec![0.0; n];
                for (b, row) in basis.iter().zip(&y) {
                    axpy(row[c], b, &mut x);
                }
                x
            };
            let estimate = coupling * y[size - 1][0].abs();
            if estimate <= target || size == dim {
                let mut x = ritz(0);
                let nx = norm(&x);
                x.iter_mut().for_each(|v| *v /= nx);
                laplacian_apply(self.g, &x, &mut lv);
                let lambda = dot(&x, &lv);
                let residual = residual_norm(self.g, &x, lambda);
                best = best.min(residual);
                if residual <= target || (size == dim && residual <= tol) {
                    return Ok((lambda, x));
                }
            } else {
                best = best.min(estimate);
            }
            if self.matvecs >= self.budget {
                return Err(best);
            }

            // restart from the `keep` lowest Ritz vectors plus the residual direction
            let keep = keep.min(size - 1).max(1);
            let mut new_basis: Vec<Vec<f64>> = (0..keep).map(ritz).collect();
            for row in h.iter_mut() {
                row.iter_mut().for_each(|x| *x = 0.0);
            }
            for (i, &t) in theta.iter().take(keep).enumerate() {
                h[i][i] = t;
            }
            // re-orthonormalize the kept vectors to stop drift
            for i in 0..keep {
                let (done, rest) = new_basis.split_at_mut(i);
                Self::orthogonalize(&mut rest[0], locked, done);
                let nv = norm(&rest[0]);
                rest[0].iter_mut().for_each(|v| *v /= nv);
            }
            let next = if coupling > breakdown {
                for (i, row) in y[size - 1].iter().take(keep).enumerate() {
                    h[i][keep] = coupling * row;
                    h[keep][i] = coupling * row;
                }
                tail.iter().map(|x| x / coupling).collect()
            } else {
                match self.random_direction(locked, &new_basis) {
                    Some(v) => v,
                    None => return Err(best),
                }
            };
            new_basis.push(next);
            basis = new_basis;
        }
    }

    /// Upper bound on the spectral radius of `L`.
    fn scale(&self) -> f64 {
        let g = self.g;
        (0..g.node_count())
            .map(|v| 2.0 * g.weighted_degree(v))
            .fold(1.0, f64::max)
    }
}

/// Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Returns ascending eigenvalues and the matrix whose columns are
/// the matching eigenvectors.
pub(crate) fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let diag: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum();
        if off <= 1e-30 * diag.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                #[allow(clippy::needless_range_loop)]
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = v
        .iter()
        .map(|row| order.iter().map(|&i| row[i]).collect())
        .collect();
    (values, vectors)
}
