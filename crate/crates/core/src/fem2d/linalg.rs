use std::collections::VecDeque;

use crate::error::{Result, SpectraError};

/// Symmetric matrix in compressed-row form with both triangles stored.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries.
    pub fn from_triplets(n: usize, mut trip: Vec<(usize, usize, f64)>) -> CsrMatrix {
        trip.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(trip.len());
        let mut vals: Vec<f64> = Vec::with_capacity(trip.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in trip {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(p) => self.vals[r.start + p],
            Err(_) => 0.0,
        }
    }

    /// a·A + b·B; the result has the union of both sparsity patterns.
    pub fn combine(a: f64, ma: &CsrMatrix, b: f64, mb: &CsrMatrix) -> CsrMatrix {
        if ma.row_ptr == mb.row_ptr && ma.cols == mb.cols {
            return CsrMatrix {
                n: ma.n,
                row_ptr: ma.row_ptr.clone(),
                cols: ma.cols.clone(),
                vals: ma.vals.iter().zip(&mb.vals).map(|(x, y)| a * x + b * y).collect(),
            };
        }
        let mut trip = Vec::with_capacity(ma.vals.len() + mb.vals.len());
        for i in 0..ma.n {
            trip.extend(ma.row(i).map(|(j, v)| (i, j, a * v)));
            trip.extend(mb.row(i).map(|(j, v)| (i, j, b * v)));
        }
        CsrMatrix::from_triplets(ma.n, trip)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[(i, j)] = v;
            }
        }
        d
    }
}

/// Reverse Cuthill-McKee ordering. Returns `perm` with perm[new] = old.
pub fn rcm_ordering(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n;
    let degree: Vec<usize> = (0..n).map(|i| a.row_ptr[i + 1] - a.row_ptr[i]).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let bfs_levels = |start: usize, seen: &mut Vec<bool>| -> Vec<usize> {
        // Returns nodes in BFS order; used to find a far node.
        let mut q = VecDeque::from([start]);
        let mut out = Vec::new();
        seen[start] = true;
        while let Some(u) = q.pop_front() {
            out.push(u);
            for (v, _) in a.row(u) {
                if !seen[v] {
                    seen[v] = true;
                    q.push_back(v);
                }
            }
        }
        out
    };
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        // Pseudo-peripheral start: the last node of two successive sweeps.
        let mut start = seed;
        for _ in 0..2 {
            let mut seen = visited.clone();
            let sweep = bfs_levels(start, &mut seen);
            start = *sweep.last().unwrap();
        }
        let mut q = VecDeque::from([start]);
        visited[start] = true;
        let mut nbrs = Vec::new();
        while let Some(u) = q.pop_front() {
            order.push(u);
            nbrs.clear();
            nbrs.extend(a.row(u).map(|(v, _)| v).filter(|&v| !visited[v]));
            nbrs.sort_by_key(|&v| (degree[v], v));
            for &v in &nbrs {
                visited[v] = true;
                q.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// Variable-band (skyline) LDLᵀ factorization of a permuted symmetric matrix,
/// without pivoting. The negative pivots count eigenvalues below the shift.
pub struct SkylineLdl {
    perm: Vec<usize>,
    first: Vec<usize>,
    ptr: Vec<usize>,
    /// Row i holds L[i, first[i]..i] followed by D[i].
    vals: Vec<f64>,
}

impl SkylineLdl {
    pub fn factor(a: &CsrMatrix, perm: &[usize]) -> Result<SkylineLdl> {
        let n = a.n;
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for old in 0..n {
            let i = inv[old];
            for (oj, _) in a.row(old) {
                let j = inv[oj];
                if j < first[i] {
                    first[i] = j;
                }
            }
        }
        let mut ptr = vec![0usize; n + 1];
        for i in 0..n {
            ptr[i + 1] = ptr[i] + (i - first[i] + 1);
        }
        let mut vals = vec![0.0; ptr[n]];
        for old in 0..n {
            let i = inv[old];
            for (oj, v) in a.row(old) {
                let j = inv[oj];
                if j <= i {
                    vals[ptr[i] + (j - first[i])] += v;
                }
            }
        }
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let fi = first[i];
            let (head, tail) = vals.split_at_mut(ptr[i]);
            let row = &mut tail[..=i - fi];
            // First pass: row[j] becomes g_j = L_ij·D_j.
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let rj = &head[ptr[j]..ptr[j + 1]];
                let mut s = 0.0;
                for k in start..j {
                    s += row[k - fi] * rj[k - fj];
                }
                row[j - fi] -= s;
            }
            let mut d = row[i - fi];
            for j in fi..i {
                let g = row[j - fi];
                let l = g / diag[j];
                d -= g * l;
                row[j - fi] = l;
            }
            if d == 0.0 || !d.is_finite() {
                return Err(SpectraError::NumericalFailure(format!("zero or invalid pivot at row {i}")));
            }
            row[i - fi] = d;
            diag[i] = d;
        }
        Ok(SkylineLdl { perm: perm.to_vec(), first, ptr, vals })
    }

    pub fn dim(&self) -> usize {
        self.first.len()
    }

    pub fn negative_pivots(&self) -> usize {
        (0..self.dim()).filter(|&i| self.vals[self.ptr[i + 1] - 1] < 0.0).count()
    }

    pub fn stored_entries(&self) -> usize {
        self.vals.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1] - 1];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(l, x)| l * x).sum();
            y[i] -= s;
        }
        for i in 0..n {
            y[i] /= self.vals[self.ptr[i + 1] - 1];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let yi = y[i];
            let row = &self.vals[self.ptr[i]..self.ptr[i + 1] - 1];
            for (l, x) in row.iter().zip(&mut y[fi..i]) {
                *x -= l * yi;
            }
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = y[new];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laplacian_1d(n: usize, shift: f64) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 - shift));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    fn random_sparse_spd(n: usize, seed: u64) -> CsrMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 1.0));
            for _ in 0..3 {
                let j = rng.gen_range(0..n);
                if j != i {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    t.push((i, j, v));
                    t.push((j, i, v));
                    t.push((i, i, v.abs()));
                    t.push((j, j, v.abs()));
                }
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn solve_matches_dense() {
        let a = random_sparse_spd(60, 3);
        let perm = rcm_ordering(&a);
        let f = SkylineLdl::factor(&a, &perm).unwrap();
        let b: Vec<f64> = (0..60).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b);
        let r = a.apply(&x);
        for (ri, bi) in r.iter().zip(&b) {
            assert!((ri - bi).abs() < 1e-11);
        }
        let dense = a.to_dense().lu().solve(&nalgebra::DVector::from_vec(b.clone())).unwrap();
        for i in 0..60 {
            assert!((dense[i] - x[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // Eigenvalues of the 1D second difference: 2 − 2cos(kπ/(n+1)).
        let n = 40;
        for shift in [0.1, 0.7, 1.9, 3.3] {
            let a = laplacian_1d(n, shift);
            let f = SkylineLdl::factor(&a, &rcm_ordering(&a)).unwrap();
            let exact = (1..=n)
                .filter(|&k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos() < shift)
                .count();
            assert_eq!(f.negative_pivots(), exact);
        }
    }

    #[test]
    fn rcm_is_a_permutation_and_narrows_band() {
        let a = random_sparse_spd(200, 9);
        let mut p = rcm_ordering(&a);
        let f = SkylineLdl::factor(&a, &p).unwrap();
        let ident: Vec<usize> = (0..200).collect();
        let g = SkylineLdl::factor(&a, &ident).unwrap();
        assert!(f.stored_entries() <= g.stored_entries());
        p.sort_unstable();
        assert_eq!(p, ident);
    }
}
