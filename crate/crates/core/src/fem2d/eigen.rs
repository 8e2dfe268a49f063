use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::linalg::{rcm_ordering, CsrMatrix, SkylineLdl};
use crate::error::{Result, SpectraError};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    /// Relative Ritz residual accepted as converged.
    pub tol: f64,
    /// Shift for the shift-invert operator (K − σM)⁻¹M.
    pub shift: f64,
    /// Systems at or below this many dofs are solved densely.
    pub dense_threshold: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { tol: 1e-10, shift: 0.0, dense_threshold: 800, max_restarts: 12, seed: 0x5eed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// Lanczos runs used (0 for the dense path).
    pub runs: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Number of generalized eigenvalues of (K, M) strictly below τ, from the
/// inertia of K − τM.
pub fn sturm_count(k: &CsrMatrix, m: &CsrMatrix, tau: f64) -> Result<usize> {
    let a = CsrMatrix::combine(1.0, k, -tau, m);
    let perm = rcm_ordering(&a);
    match SkylineLdl::factor(&a, &perm) {
        Ok(f) => Ok(f.negative_pivots()),
        // τ hit an eigenvalue of a leading block; nudge it.
        Err(_) => {
            let t2 = tau * (1.0 + 1e-13) + 1e-300;
            let a = CsrMatrix::combine(1.0, k, -t2, m);
            Ok(SkylineLdl::factor(&a, &perm)?.negative_pivots())
        }
    }
}

pub fn dense_eigen(k: &CsrMatrix, m: &CsrMatrix, nev: usize) -> Result<EigenSolution> {
    let n = k.n;
    let chol = m
        .to_dense()
        .cholesky()
        .ok_or_else(|| SpectraError::NumericalFailure("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| SpectraError::NumericalFailure("singular mass factor".into()))?;
    let c = &linv * k.to_dense() * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let take = nev.min(n);
    let lt_inv = linv.transpose();
    let values = idx[..take].iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = idx[..take].iter().map(|&i| (&lt_inv * eig.eigenvectors.column(i)).iter().copied().collect()).collect();
    Ok(EigenSolution { values, vectors, runs: 0 })
}

struct RitzPair {
    theta: f64,
    residual: f64,
    vector: Vec<f64>,
}

struct LanczosRun<'a> {
    factor: &'a SkylineLdl,
    m: &'a CsrMatrix,
    locked: &'a [Vec<f64>],
    locked_m: &'a [Vec<f64>],
}

impl LanczosRun<'_> {
    /// Removes locked and basis components in the M-inner product, twice.
    fn orthogonalize(&self, w: &mut [f64], basis: &[Vec<f64>], basis_m: &[Vec<f64>]) {
        for _ in 0..2 {
            for (u, mu) in self.locked.iter().zip(self.locked_m).chain(basis.iter().zip(basis_m)) {
                let c = dot(mu, w);
                axpy(-c, u, w);
            }
        }
    }

    /// Grows a Krylov basis until the `want` largest Ritz values converge
    /// or `max_dim` is reached; returns all converged Ritz pairs.
    fn run(&self, start: Vec<f64>, want: usize, max_dim: usize, tol: f64) -> Vec<RitzPair> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut basis_m: Vec<Vec<f64>> = Vec::new();
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut v = start;
        self.orthogonalize(&mut v, &basis, &basis_m);
        let nrm = dot(&self.m.apply(&v), &v).sqrt();
        if nrm == 0.0 {
            return Vec::new();
        }
        v.iter_mut().for_each(|x| *x /= nrm);
        let mut next_check = (want + 10).max(20).min(max_dim);
        loop {
            let mv = self.m.apply(&v);
            let mut w = self.factor.solve(&mv);
            let a = dot(&mv, &w);
            axpy(-a, &v, &mut w);
            if let (Some(b), Some(prev)) = (beta.last(), basis.last()) {
                axpy(-b, prev, &mut w);
            }
            basis.push(v);
            basis_m.push(mv);
            alpha.push(a);
            self.orthogonalize(&mut w, &basis, &basis_m);
            let b = dot(&self.m.apply(&w), &w).max(0.0).sqrt();
            let j = basis.len();
            let exhausted = b <= 1e-13 * alpha.iter().fold(0.0f64, |s, x| s.max(x.abs()));
            if j >= next_check || j >= max_dim || exhausted {
                let pairs = self.ritz(&basis, &alpha, &beta, if exhausted { 0.0 } else { b });
                let mut sorted: Vec<&RitzPair> = pairs.iter().collect();
                sorted.sort_by(|x, y| y.theta.total_cmp(&x.theta));
                let done = sorted.len() >= want.min(j) && sorted[..want.min(j)].iter().all(|p| p.residual <= tol * p.theta.abs());
                if done || j >= max_dim || exhausted {
                    return pairs.into_iter().filter(|p| p.residual <= tol * p.theta.abs()).collect();
                }
                next_check = (j + j / 4 + 10).min(max_dim);
            }
            beta.push(b);
            v = w;
            v.iter_mut().for_each(|x| *x /= b);
        }
    }

    fn ritz(&self, basis: &[Vec<f64>], alpha: &[f64], beta: &[f64], b_last: f64) -> Vec<RitzPair> {
        let j = alpha.len();
        let mut t = DMatrix::zeros(j, j);
        for i in 0..j {
            t[(i, i)] = alpha[i];
            if i + 1 < j {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        (0..j)
            .map(|i| {
                let s = eig.eigenvectors.column(i);
                let mut x = vec![0.0; basis[0].len()];
                for (q, c) in basis.iter().zip(s.iter()) {
                    axpy(*c, q, &mut x);
                }
                RitzPair { theta: eig.eigenvalues[i], residual: (b_last * s[j - 1]).abs(), vector: x }
            })
            .collect()
    }
}

/// The `nev` smallest generalized eigenpairs of (K, M), K symmetric positive
/// semidefinite and M positive definite. Lanczos runs on (K − σM)⁻¹M with
/// full reorthogonalization; converged pairs are locked and the result is
/// checked against the Sturm count, restarting from a deflated random vector
/// whenever an eigenvalue (for instance a repeated one) was missed.
pub fn smallest_eigenpairs(k: &CsrMatrix, m: &CsrMatrix, nev: usize, opts: &EigenOptions) -> Result<EigenSolution> {
    let n = k.n;
    if nev == 0 || nev > n {
        return Err(SpectraError::InvalidInput(format!("requested {nev} eigenvalues from a system of size {n}")));
    }
    if n <= opts.dense_threshold {
        return dense_eigen(k, m, nev);
    }
    let f = CsrMatrix::combine(1.0, k, -opts.shift, m);
    let factor = SkylineLdl::factor(&f, &rcm_ordering(&f))?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::new();
    let mut locked_m: Vec<Vec<f64>> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut want = nev + 2;
    for run in 1..=opts.max_restarts {
        let avail = n - locked.len();
        let want_run = want.min(avail);
        let max_dim = (3 * want_run + 60).min(avail);
        let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ctx = LanczosRun { factor: &factor, m, locked: &locked, locked_m: &locked_m };
        let pairs = ctx.run(start, want_run, max_dim, opts.tol);
        for p in pairs {
            let mut x = p.vector;
            // Keep locked vectors mutually M-orthonormal.
            for _ in 0..2 {
                for (u, mu) in locked.iter().zip(&locked_m) {
                    axpy(-dot(mu, &x), u, &mut x);
                }
            }
            let mx = m.apply(&x);
            let nrm = dot(&mx, &x).sqrt();
            if !(nrm > 0.5) {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= nrm);
            values.push(opts.shift + 1.0 / p.theta);
            locked_m.push(mx.into_iter().map(|v| v / nrm).collect());
            locked.push(x);
        }
        if values.len() < nev {
            want = nev - values.len() + 2;
            continue;
        }
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let top = sorted[nev - 1];
        let tau = top + 1e-9 * top.abs().max(1.0);
        let below = sorted.iter().filter(|&&v| v < tau).count();
        let count = sturm_count(k, m, tau)?;
        if count == below {
            let mut idx: Vec<usize> = (0..values.len()).collect();
            idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            idx.truncate(nev);
            return Ok(EigenSolution {
                values: idx.iter().map(|&i| values[i]).collect(),
                vectors: idx.iter().map(|&i| locked[i].clone()).collect(),
                runs: run,
            });
        }
        if count < below {
            return Err(SpectraError::NumericalFailure(format!(
                "Lanczos returned {below} values below {tau} but the inertia count is {count}"
            )));
        }
        want = count - below + 2;
    }
    Err(SpectraError::NumericalFailure(format!("eigensolver did not converge after {} restarts", opts.max_restarts)))
}
