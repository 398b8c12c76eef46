//! Multivariate polynomials in the monomial basis with a domain box and a sup-norm bound.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::abs;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    Chebyshev,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolySpec {
    pub vars: usize,
    /// (exponents per variable, coefficient)
    pub terms: Vec<(Vec<usize>, f64)>,
    /// Box the polynomial is meant for, one interval per variable.
    pub domain: Vec<(f64, f64)>,
    pub sup_norm_bound: f64,
}

fn ipow(x: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |a, _| a * x)
}

/// T_k(x) by the three-term recurrence.
pub fn chebyshev_t(k: usize, x: f64) -> f64 {
    let (mut a, mut b) = (1.0, x);
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        let c = 2.0 * x * b - a;
        a = b;
        b = c;
    }
    b
}

/// Monomial coefficients of T_k.
fn chebyshev_monomial(k: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    let mut b = vec![0.0, 1.0];
    if k == 0 {
        return a;
    }
    for _ in 1..k {
        let mut c = vec![0.0; b.len() + 1];
        for (i, &x) in b.iter().enumerate() {
            c[i + 1] += 2.0 * x;
        }
        for (i, &x) in a.iter().enumerate() {
            c[i] -= x;
        }
        a = b;
        b = c;
    }
    b
}

impl PolySpec {
    /// Build from monomial terms; the sup-norm bound is estimated on a sample grid of the box.
    pub fn new(vars: usize, terms: Vec<(Vec<usize>, f64)>, domain: Vec<(f64, f64)>) -> Result<Self> {
        if domain.len() != vars || terms.iter().any(|t| t.0.len() != vars) {
            return Err(Error::Invalid("term or domain arity does not match variable count".into()));
        }
        let mut p = PolySpec { vars, terms, domain, sup_norm_bound: 0.0 };
        p.sup_norm_bound = p.sampled_sup();
        Ok(p)
    }

    pub fn constant(vars: usize, c: f64, domain: Vec<(f64, f64)>) -> Self {
        Self::new(vars, vec![(vec![0; vars], c)], domain).expect("arity")
    }

    /// Univariate from monomial coefficients c_0 + c_1 x + ...
    pub fn univariate(coeffs: &[f64], domain: (f64, f64)) -> Self {
        let terms = coeffs.iter().enumerate().map(|(k, &c)| (vec![k], c)).collect();
        Self::new(1, terms, vec![domain]).expect("arity")
    }

    /// Univariate from Chebyshev coefficients sum c_k T_k(x).
    pub fn from_chebyshev(coeffs: &[f64], domain: (f64, f64)) -> Self {
        let mut mono = vec![0.0; coeffs.len()];
        for (k, &c) in coeffs.iter().enumerate() {
            for (i, t) in chebyshev_monomial(k).into_iter().enumerate() {
                mono[i] += c * t;
            }
        }
        Self::univariate(&mono, domain)
    }

    /// Unit box [0, 1]^vars.
    pub fn unit_box(vars: usize) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); vars]
    }

    /// Product of coordinates x_0 x_1 ... on the unit box.
    pub fn coordinate_product(vars: usize) -> Self {
        Self::new(vars, vec![(vec![1; vars], 1.0)], Self::unit_box(vars)).expect("arity")
    }

    pub fn with_sup_norm(mut self, b: f64) -> Self {
        self.sup_norm_bound = b;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.vars);
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| ipow(xi, k)).product::<f64>())
            .sum()
    }

    pub fn eval1(&self, x: f64) -> f64 {
        self.eval(&[x])
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().filter(|t| t.1 != 0.0).map(|t| t.0.iter().sum()).max().unwrap_or(0)
    }

    pub fn axis_degree(&self, i: usize) -> usize {
        self.terms.iter().filter(|t| t.1 != 0.0).map(|t| t.0[i]).max().unwrap_or(0)
    }

    pub fn max_axis_degree(&self) -> usize {
        (0..self.vars).map(|i| self.axis_degree(i)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.1 == 0.0)
    }

    /// Some(0) for even, Some(1) for odd, None for mixed (univariate).
    pub fn parity(&self) -> Option<usize> {
        let mut par = None;
        for (e, c) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            let k = e.iter().sum::<usize>() % 2;
            match par {
                None => par = Some(k),
                Some(q) if q != k => return None,
                _ => {}
            }
        }
        Some(par.unwrap_or(self.degree() % 2))
    }

    /// Monomial coefficients of a univariate polynomial.
    pub fn monomial_coeffs(&self) -> Vec<f64> {
        assert_eq!(self.vars, 1);
        let mut c = vec![0.0; self.degree() + 1];
        for (e, v) in &self.terms {
            if e[0] < c.len() {
                c[e[0]] += v;
            }
        }
        c
    }

    /// Chebyshev coefficients of a univariate polynomial in its raw variable.
    pub fn chebyshev_coeffs(&self) -> Vec<f64> {
        let mut mono = self.monomial_coeffs();
        let d = mono.len() - 1;
        let mut out = vec![0.0; d + 1];
        for k in (0..=d).rev() {
            let t = chebyshev_monomial(k);
            let c = mono[k] / t[k];
            out[k] = c;
            for (i, ti) in t.iter().enumerate() {
                mono[i] -= c * ti;
            }
        }
        out
    }

    /// Max |p| over a grid of the domain box.
    pub fn sampled_sup(&self) -> f64 {
        let per = match self.vars {
            0 => 1,
            1 => 2001,
            2 => 201,
            3 => 41,
            _ => 11,
        };
        let total = (per as u64).pow(self.vars as u32) as usize;
        let mut best: f64 = 0.0;
        let mut x = vec![0.0; self.vars];
        for idx in 0..total {
            let mut r = idx;
            for (i, xi) in x.iter_mut().enumerate() {
                let t = (r % per) as f64 / (per - 1).max(1) as f64;
                r /= per;
                let (a, b) = self.domain[i];
                *xi = a + (b - a) * t;
            }
            best = best.max(abs(self.eval(&x)));
        }
        best
    }
}
