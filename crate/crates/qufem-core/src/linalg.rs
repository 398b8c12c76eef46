//! Real sparse direct solves: reverse Cuthill-McKee ordering followed by a banded LU with
//! partial pivoting, plus extreme singular value estimates.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{norm2_real, sqrt};
use crate::sparse::SparseMat;

/// Real matrix in coordinate form, column-compressed by `SparseMat`.
#[derive(Clone, Debug)]
pub struct RealMat {
    pub dim: usize,
    pub triplets: Vec<(usize, usize, f64)>,
}

impl RealMat {
    /// Real part of a complex sparse matrix; fails if any imaginary part exceeds `tol`.
    pub fn from_sparse(m: &SparseMat, tol: f64) -> Result<Self> {
        if m.max_imag() > tol {
            return Err(Error::Invalid("matrix has a non-negligible imaginary part".into()));
        }
        let triplets = m.triplets().into_iter().filter(|t| t.2.re != 0.0).map(|(i, j, z)| (i, j, z.re)).collect();
        Ok(RealMat { dim: m.dim, triplets })
    }

    pub fn transpose(&self) -> Self {
        RealMat { dim: self.dim, triplets: self.triplets.iter().map(|&(i, j, v)| (j, i, v)).collect() }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for &(i, j, v) in &self.triplets {
            y[i] += v * x[j];
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.triplets.iter().map(|t| t.2.abs()).fold(0.0, f64::max)
    }
}

/// Reverse Cuthill-McKee permutation of the symmetrized pattern: `perm[new] = old`.
pub fn rcm_order(m: &RealMat) -> Vec<usize> {
    let n = m.dim;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j, _) in &m.triplets {
        if i != j {
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
        a.dedup();
    }
    let deg: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (deg[v], v));
    for &start in &by_degree {
        if seen[start] {
            continue;
        }
        let root = peripheral(&adj, start);
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&w| !seen[w]).collect();
            nb.sort_by_key(|&w| (deg[w], w));
            for w in nb {
                seen[w] = true;
                q.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Pseudo-peripheral node of the component containing `start` (repeated BFS to the
/// farthest minimum-degree node).
fn peripheral(adj: &[Vec<usize>], start: usize) -> usize {
    let mut root = start;
    let mut ecc = 0;
    for _ in 0..8 {
        let (far, e) = bfs_far(adj, root);
        if e <= ecc {
            break;
        }
        ecc = e;
        root = far;
    }
    root
}

fn bfs_far(adj: &[Vec<usize>], root: usize) -> (usize, usize) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[root] = 0;
    let mut q = VecDeque::from([root]);
    let mut best = (root, 0);
    while let Some(v) = q.pop_front() {
        let d = dist[v];
        if d > best.1 || (d == best.1 && adj[v].len() < adj[best.0].len()) {
            best = (v, d);
        }
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = d + 1;
                q.push_back(w);
            }
        }
    }
    best
}

/// Banded LU of P A P^T with the RCM permutation P.
#[derive(Clone, Debug)]
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    perm: Vec<usize>,
    piv: Vec<usize>,
    a: Vec<f64>,
}

impl BandedLu {
    pub fn factor(m: &RealMat) -> Result<Self> {
        let n = m.dim;
        let perm = rcm_order(m);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let (mut kl, mut ku) = (0, 0);
        for &(i, j, _) in &m.triplets {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
        // pivoting widens the upper band by kl
        let width = 2 * kl + ku + 1;
        let mut a = vec![0.0; n * width];
        for &(i, j, v) in &m.triplets {
            let (pi, pj) = (inv[i], inv[j]);
            a[pi * width + pj + kl - pi] += v;
        }
        let scale = m.max_abs();
        let mut lu = BandedLu { n, kl, ku: kl + ku, width, perm, piv: vec![0; n], a };
        lu.eliminate(scale)?;
        Ok(lu)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * self.width + j + self.kl - i
    }

    fn eliminate(&mut self, scale: f64) -> Result<()> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.a[self.at(k, k)].abs();
            for i in k + 1..=last {
                let v = self.a[self.at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= scale * 1e-15 || best == 0.0 {
                return Err(Error::Singular);
            }
            self.piv[k] = p;
            let cend = (k + ku).min(n - 1);
            if p != k {
                for c in k..=cend {
                    let (x, y) = (self.at(k, c), self.at(p, c));
                    self.a.swap(x, y);
                }
            }
            let d = self.a[self.at(k, k)];
            for i in k + 1..=last {
                let ik = self.at(i, k);
                let f = self.a[ik] / d;
                self.a[ik] = f;
                if f == 0.0 {
                    continue;
                }
                for c in k + 1..=cend {
                    let (ic, kc) = (self.at(i, c), self.at(k, c));
                    self.a[ic] -= f * self.a[kc];
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// (lower, upper) bandwidth after ordering, upper including pivot fill.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut x: Vec<f64> = self.perm.iter().map(|&o| b[o]).collect();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let xk = x[k];
            if xk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    x[i] -= self.a[self.at(i, k)] * xk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for c in i + 1..=(i + ku).min(n - 1) {
                s -= self.a[self.at(i, c)] * x[c];
            }
            x[i] = s / self.a[self.at(i, i)];
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

/// Direct solve of A x = b.
pub fn solve(m: &RealMat, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != m.dim {
        return Err(Error::DimensionMismatch { expected: m.dim, got: b.len() });
    }
    Ok(BandedLu::factor(m)?.solve(b))
}

/// Largest and smallest singular values by power iteration on A^T A and on (A^T A)^{-1}.
pub fn singular_extremes(m: &RealMat) -> Result<(f64, f64)> {
    let n = m.dim;
    let mt = m.transpose();
    let lu = BandedLu::factor(m)?;
    let lut = BandedLu::factor(&mt)?;
    let start: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * libm::sin(0.37 * i as f64 + 0.11)).collect();
    let smax = power(&start, |v| mt.matvec(&m.matvec(v)));
    let inv = power(&start, |v| lu.solve(&lut.solve(v)));
    Ok((sqrt(smax), 1.0 / sqrt(inv)))
}

/// Dominant eigenvalue of a symmetric positive semidefinite map by power iteration.
fn power(start: &[f64], f: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let mut v: Vec<f64> = {
        let s = norm2_real(start);
        start.iter().map(|x| x / s).collect()
    };
    let mut lam = 0.0;
    for it in 0..5000 {
        let w = f(&v);
        let nw = norm2_real(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let rq: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        v = w.iter().map(|x| x / nw).collect();
        if it > 10 && (rq - lam).abs() <= 1e-13 * rq.abs() {
            return rq;
        }
        lam = rq;
    }
    lam
}

/// 2-norm condition number.
pub fn condition_number(m: &RealMat) -> Result<f64> {
    let (smax, smin) = singular_extremes(m)?;
    Ok(smax / smin)
}
