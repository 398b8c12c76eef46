//! Exact polynomial transforms of diagonal block-encodings: the single-variable fast path
//! and the multivariate Chebyshev-product LCU.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{abs, powi, r, C64};
use crate::qcore::{be_diagonal, be_lcu_real, be_product_chain, extract_block, BlockEncoding};
use crate::quad::poly::{chebyshev_t, PolySpec};

/// Real diagonal alpha * block of a diagonal encoding.
pub fn encoded_diagonal(be: &BlockEncoding) -> Result<Vec<f64>> {
    let m = extract_block(be);
    let mut d = vec![0.0; m.dim];
    for (j, col) in m.cols.iter().enumerate() {
        for &(i, z) in col {
            if z.norm() <= 1e-13 {
                continue;
            }
            if i != j {
                return Err(Error::NotDiagonal);
            }
            if abs(z.im) > 1e-12 {
                return Err(Error::Invalid("diagonal is not real".into()));
            }
            d[j] = z.re;
        }
    }
    Ok(d)
}

/// Encoding of diag(q(lambda_i)) with subnormalization max(sup bound, max |q(lambda_i)|).
pub fn poly_transform_diagonal(be: &BlockEncoding, poly: &PolySpec) -> Result<BlockEncoding> {
    if poly.vars != 1 {
        return Err(Error::Invalid("single-variable transform needs a univariate polynomial".into()));
    }
    let lam = encoded_diagonal(be)?;
    let vals: Vec<C64> = lam.iter().map(|&x| r(poly.eval1(x))).collect();
    be_diagonal(&vals, Some(poly.sup_norm_bound))
}

/// Result of a multivariate transform.
#[derive(Clone, Debug)]
pub struct MqetOutput {
    pub be: BlockEncoding,
    /// LCU weights beta_s for s in [D]^(d-1), row-major with s_0 most significant.
    pub beta: Vec<f64>,
    pub beta_norm: f64,
    /// Per-axis degree bound D (degree < D in each variable).
    pub degree_bound: usize,
}

/// Map x in [a, b] to t in [-1, 1].
fn pull_back(x: f64, (a, b): (f64, f64)) -> f64 {
    if b == a {
        0.0
    } else {
        (2.0 * x - a - b) / (b - a)
    }
}

/// g(A^(0), ..., A^(d-1)) for commuting diagonal encodings. The polynomial is pulled back
/// from its domain box to [-1, 1]^d and normalized by its sup bound; g = sum_s Q_s(t_{d-1})
/// prod_k T_{s_k}(t_k) with Q_s from Chebyshev-Gauss quadrature at 2D + 1 nodes per axis.
pub fn mqet_transform(bes: &[BlockEncoding], poly: &PolySpec) -> Result<MqetOutput> {
    let d = bes.len();
    if d == 0 || poly.vars != d {
        return Err(Error::Invalid("one encoding per polynomial variable".into()));
    }
    let sys = bes[0].system_qubits;
    if bes.iter().any(|b| b.system_qubits != sys) {
        return Err(Error::DimensionMismatch { expected: sys, got: bes.iter().map(|b| b.system_qubits).max().unwrap() });
    }
    let norm = if poly.sup_norm_bound > 0.0 { poly.sup_norm_bound } else { 1.0 };
    let dbound = poly.max_axis_degree() + 1;
    let t: Vec<Vec<f64>> = bes
        .iter()
        .enumerate()
        .map(|(k, b)| encoded_diagonal(b).map(|l| l.iter().map(|&x| pull_back(x, poly.domain[k])).collect()))
        .collect::<Result<_>>()?;
    if t.iter().flatten().any(|x| abs(*x) > 1.0 + 1e-9) {
        return Err(Error::Invalid("eigenvalues fall outside the polynomial domain".into()));
    }
    let g = |tt: &[f64]| -> f64 {
        let x: Vec<f64> = tt
            .iter()
            .enumerate()
            .map(|(k, &ti)| {
                let (a, b) = poly.domain[k];
                a + (b - a) * (ti + 1.0) / 2.0
            })
            .collect();
        poly.eval(&x) / norm
    };
    if d == 1 {
        let vals: Vec<C64> = t[0].iter().map(|&ti| r(g(&[ti]))).collect();
        let be = be_diagonal(&vals, Some(1.0))?;
        let a = be.alpha;
        return Ok(MqetOutput { be: be.with_alpha(a * norm), beta: vec![1.0], beta_norm: 1.0, degree_bound: dbound });
    }
    let nq = 2 * dbound + 1;
    let nodes: Vec<f64> =
        (0..nq).map(|i| libm::cos(core::f64::consts::PI * (i as f64 + 0.5) / nq as f64)).collect();
    let nstr = dbound.pow((d - 1) as u32);
    let strings: Vec<Vec<usize>> = (0..nstr)
        .map(|mut v| {
            let mut s = vec![0; d - 1];
            for k in (0..d - 1).rev() {
                s[k] = v % dbound;
                v /= dbound;
            }
            s
        })
        .collect();
    // Q_s(t_last) by discrete projection over the first d - 1 axes
    let q_s = |s: &[usize], tl: f64| -> f64 {
        let mut acc = 0.0;
        let total = nq.pow((d - 1) as u32);
        let mut pt = vec![0.0; d];
        pt[d - 1] = tl;
        for idx in 0..total {
            let mut v = idx;
            let mut w = 1.0;
            for k in (0..d - 1).rev() {
                let x = nodes[v % nq];
                v /= nq;
                pt[k] = x;
                w *= chebyshev_t(s[k], x);
            }
            acc += w * g(&pt);
        }
        let scale: f64 = s.iter().map(|&sk| if sk == 0 { 1.0 } else { 2.0 } / nq as f64).product();
        acc * scale
    };
    let samples: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 / 200.0).collect();
    let last = &t[d - 1];
    let mut terms = Vec::new();
    let mut coeffs = Vec::new();
    let mut beta = vec![0.0; nstr];
    for (si, s) in strings.iter().enumerate() {
        let qv: Vec<f64> = last.iter().map(|&x| q_s(s, x)).collect();
        let b = samples
            .iter()
            .map(|&x| abs(q_s(s, x)))
            .chain(qv.iter().map(|x| abs(*x)))
            .fold(0.0, f64::max);
        beta[si] = b;
        if b <= 1e-14 {
            continue;
        }
        let mut chain = Vec::with_capacity(d);
        for k in 0..d - 1 {
            let vals: Vec<C64> = t[k].iter().map(|&x| r(chebyshev_t(s[k], x))).collect();
            chain.push(be_diagonal(&vals, Some(1.0))?);
        }
        let vals: Vec<C64> = qv.iter().map(|&x| r(x / b)).collect();
        chain.push(be_diagonal(&vals, Some(1.0))?);
        terms.push(be_product_chain(&chain)?.with_alpha(1.0));
        coeffs.push(b);
    }
    let beta_norm: f64 = beta.iter().sum();
    let bound = powi((dbound + 2) as f64, (d - 1) as i32);
    if beta_norm > bound * (1.0 + 1e-12) {
        return Err(Error::Invalid("Chebyshev weights exceed the (D + 2)^(d - 1) bound".into()));
    }
    let be = if terms.is_empty() {
        let zero = vec![r(0.0); 1 << sys];
        be_diagonal(&zero, Some(1.0))?
    } else {
        be_lcu_real(&terms, &coeffs)?
    };
    let a = be.alpha;
    Ok(MqetOutput { be: be.with_alpha(a * norm), beta, beta_norm, degree_bound: dbound })
}
