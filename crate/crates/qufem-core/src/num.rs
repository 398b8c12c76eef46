//! Scalar helpers and a small dense complex matrix type.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

pub use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Principal square root: sqrt(r e^{i t}) = sqrt(r) e^{i t/2} with t in (-pi, pi].
pub fn principal_sqrt(z: C64) -> C64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            return r(sqrt(z.re));
        }
        return c(0.0, sqrt(-z.re));
    }
    let mag = sqrt(z.norm());
    let t = libm::atan2(z.im, z.re) / 2.0;
    c(mag * libm::cos(t), mag * libm::sin(t))
}

pub fn powi(x: f64, k: i32) -> f64 {
    let v = (0..k.unsigned_abs()).fold(1.0, |a, _| a * x);
    if k < 0 { 1.0 / v } else { v }
}

/// Smallest b with 2^b >= n (0 for n <= 1).
pub fn ceil_log2(n: usize) -> usize {
    let mut b = 0;
    while (1usize << b) < n {
        b += 1;
    }
    b
}

pub fn is_pow2(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

pub fn norm2(v: &[C64]) -> f64 {
    sqrt(v.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub fn norm2_real(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|z| z * z).sum::<f64>())
}

pub fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(nr * nc);
        for row in rows {
            assert_eq!(row.len(), nc, "ragged rows");
            data.extend_from_slice(row);
        }
        DMat { rows: nr, cols: nc, data }
    }

    pub fn from_real(rows: usize, cols: usize, vals: &[f64]) -> Self {
        assert_eq!(vals.len(), rows * cols);
        DMat { rows, cols, data: vals.iter().map(|&x| r(x)).collect() }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn matmul(&self, o: &DMat) -> DMat {
        assert_eq!(self.cols, o.rows, "matmul shape mismatch");
        let mut m = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..o.cols {
                    m.data[i * o.cols + j] += a * o.data[k * o.cols + j];
                }
            }
        }
        m
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// Kronecker product with `self` on the most-significant index.
    pub fn kron(&self, o: &DMat) -> DMat {
        let mut m = Self::zeros(self.rows * o.rows, self.cols * o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..o.rows {
                    for l in 0..o.cols {
                        m[(i * o.rows + k, j * o.cols + l)] = a * o[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn add(&self, o: &DMat) -> DMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        DMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> DMat {
        DMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn max_abs_diff(&self, o: &DMat) -> f64 {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn sum(&self) -> C64 {
        self.data.iter().sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).sum()
    }

    /// max |U^dagger U - I| entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        self.adjoint().matmul(self).max_abs_diff(&DMat::identity(self.cols))
    }
}

impl Index<(usize, usize)> for DMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Fixed 2x2 gates used by the explicit prepare oracles.
pub mod gate2 {
    use super::*;

    pub fn h() -> DMat {
        let s = 1.0 / sqrt(2.0);
        DMat::from_real(2, 2, &[s, s, s, -s])
    }
    pub fn z() -> DMat {
        DMat::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }
    pub fn x() -> DMat {
        DMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }
    /// Phase gate |0><0| + i|1><1|.
    pub fn s() -> DMat {
        DMat::diag(&[ONE, I])
    }
    /// R_y(theta) = exp(-i theta Y / 2).
    pub fn ry(theta: f64) -> DMat {
        let (cs, sn) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
        DMat::from_real(2, 2, &[cs, -sn, sn, cs])
    }
}
