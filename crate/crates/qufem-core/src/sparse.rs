//! Sparse amplitude vectors and a column-stored sparse matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::num::{r, DMat, C64, ZERO};

/// One nonzero amplitude of a sparse state.
pub type Amp = (usize, C64);

/// Entries below this fraction of the largest magnitude are treated as cancellation noise.
const DROP_REL: f64 = 1e-15;

/// Sort by index, merge duplicates and drop numerically zero amplitudes.
pub fn compact(mut v: Vec<Amp>) -> Vec<Amp> {
    if v.is_empty() {
        return v;
    }
    v.sort_unstable_by_key(|a| a.0);
    let mut out: Vec<Amp> = Vec::with_capacity(v.len());
    for (i, z) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += z,
            _ => out.push((i, z)),
        }
    }
    let m = out.iter().map(|a| a.1.norm()).fold(0.0, f64::max);
    let cut = m * DROP_REL;
    out.retain(|a| a.1.norm() > cut);
    out
}

pub fn to_sparse(x: &[C64]) -> Vec<Amp> {
    x.iter().enumerate().filter(|(_, z)| **z != ZERO).map(|(i, z)| (i, *z)).collect()
}

pub fn to_dense(x: &[Amp], dim: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    for &(i, z) in x {
        v[i] += z;
    }
    v
}

/// Square sparse matrix stored by columns; columns are sorted by row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat {
    pub dim: usize,
    pub cols: Vec<Vec<Amp>>,
}

impl SparseMat {
    pub fn zeros(dim: usize) -> Self {
        SparseMat { dim, cols: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        SparseMat { dim, cols: (0..dim).map(|j| vec![(j, r(1.0))]).collect() }
    }

    pub fn from_diag(d: &[C64]) -> Self {
        SparseMat {
            dim: d.len(),
            cols: d
                .iter()
                .enumerate()
                .map(|(j, &z)| if z == ZERO { Vec::new() } else { vec![(j, z)] })
                .collect(),
        }
    }

    pub fn from_triplets(dim: usize, t: &[(usize, usize, C64)]) -> Self {
        let mut cols: Vec<Vec<Amp>> = vec![Vec::new(); dim];
        for &(i, j, z) in t {
            assert!(i < dim && j < dim, "triplet out of range");
            cols[j].push((i, z));
        }
        let cols = cols.into_iter().map(merge_exact).collect();
        SparseMat { dim, cols }
    }

    pub fn from_real_triplets(dim: usize, t: &[(usize, usize, f64)]) -> Self {
        let t: Vec<_> = t.iter().map(|&(i, j, x)| (i, j, r(x))).collect();
        Self::from_triplets(dim, &t)
    }

    pub fn from_dense(m: &DMat) -> Self {
        assert_eq!(m.rows, m.cols);
        let mut t = Vec::new();
        for i in 0..m.rows {
            for j in 0..m.cols {
                if m[(i, j)] != ZERO {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.rows, &t)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        match self.cols[j].binary_search_by_key(&i, |a| a.0) {
            Ok(k) => self.cols[j][k].1,
            Err(_) => ZERO,
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut t = Vec::with_capacity(self.nnz());
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, z) in col {
                t.push((i, j, z));
            }
        }
        t.sort_unstable_by_key(|a| (a.0, a.1));
        t
    }

    pub fn to_dense(&self) -> DMat {
        let mut m = DMat::zeros(self.dim, self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, z) in col {
                m[(i, j)] = z;
            }
        }
        m
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![ZERO; self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj == ZERO {
                continue;
            }
            for &(i, z) in col {
                y[i] += z * xj;
            }
        }
        y
    }

    pub fn matvec_real(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let mut y = vec![0.0; self.dim];
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for &(i, z) in col {
                y[i] += z.re * xj;
            }
        }
        y
    }

    pub fn adjoint(&self) -> Self {
        let t: Vec<_> = self.triplets().into_iter().map(|(i, j, z)| (j, i, z.conj())).collect();
        Self::from_triplets(self.dim, &t)
    }

    pub fn scale(&self, s: C64) -> Self {
        SparseMat {
            dim: self.dim,
            cols: self.cols.iter().map(|c| c.iter().map(|&(i, z)| (i, z * s)).collect()).collect(),
        }
    }

    pub fn add(&self, o: &SparseMat) -> Self {
        assert_eq!(self.dim, o.dim);
        let cols = self
            .cols
            .iter()
            .zip(&o.cols)
            .map(|(a, b)| {
                let mut v = a.clone();
                v.extend_from_slice(b);
                merge_exact(v)
            })
            .collect();
        SparseMat { dim: self.dim, cols }
    }

    pub fn sub(&self, o: &SparseMat) -> Self {
        self.add(&o.scale(r(-1.0)))
    }

    pub fn matmul(&self, o: &SparseMat) -> Self {
        assert_eq!(self.dim, o.dim);
        let cols = o
            .cols
            .iter()
            .map(|col| {
                let mut v = Vec::new();
                for &(k, b) in col {
                    for &(i, a) in &self.cols[k] {
                        v.push((i, a * b));
                    }
                }
                merge_exact(v)
            })
            .collect();
        SparseMat { dim: self.dim, cols }
    }

    /// Kronecker product with `self` on the most-significant index.
    pub fn kron(&self, o: &SparseMat) -> Self {
        let dim = self.dim * o.dim;
        let mut cols = vec![Vec::new(); dim];
        for (ja, ca) in self.cols.iter().enumerate() {
            for (jb, cb) in o.cols.iter().enumerate() {
                let col: &mut Vec<Amp> = &mut cols[ja * o.dim + jb];
                for &(ia, a) in ca {
                    for &(ib, b) in cb {
                        col.push((ia * o.dim + ib, a * b));
                    }
                }
                col.sort_unstable_by_key(|x| x.0);
            }
        }
        SparseMat { dim, cols }
    }

    /// Entrywise max |A - B|.
    pub fn max_abs_diff(&self, o: &SparseMat) -> f64 {
        assert_eq!(self.dim, o.dim);
        self.sub(o).cols.iter().flatten().map(|a| a.1.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.cols.iter().flatten().map(|a| a.1.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.cols.iter().flatten().map(|a| crate::num::abs(a.1.im)).fold(0.0, f64::max)
    }

    /// max |A - A^dagger|.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// Drop entries with magnitude at or below `tol`.
    pub fn prune(&self, tol: f64) -> Self {
        SparseMat {
            dim: self.dim,
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().copied().filter(|a| a.1.norm() > tol).collect())
                .collect(),
        }
    }
}

fn merge_exact(mut v: Vec<Amp>) -> Vec<Amp> {
    v.sort_unstable_by_key(|a| a.0);
    let mut out: Vec<Amp> = Vec::with_capacity(v.len());
    for (i, z) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += z,
            _ => out.push((i, z)),
        }
    }
    out.retain(|a| a.1 != ZERO);
    out
}
