//! Block-encodings and their algebra: extraction, validation, products, LCU, tensor
//! products, 1-sparse encodings, state-preparation pairs and post-selected application.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{ceil_log2, is_pow2, norm2, principal_sqrt, r, sqrt, DMat, C64, ONE, ZERO};
use crate::op::{amp_fn, Operator};
use crate::sparse::{to_sparse, SparseMat};

/// Slack added to `epsilon` when validating against a target.
pub const VALIDATION_SLACK: f64 = 1e-9;

/// A unitary on `ancillas + system_qubits` qubits whose top-left block, scaled by `alpha`,
/// is the encoded matrix. Ancillas are the most-significant qubits.
#[derive(Clone, Debug)]
pub struct BlockEncoding {
    pub unitary: Operator,
    pub alpha: f64,
    pub ancillas: usize,
    pub epsilon: f64,
    pub system_qubits: usize,
}

impl BlockEncoding {
    pub fn new(unitary: Operator, alpha: f64, ancillas: usize, system_qubits: usize) -> Self {
        assert_eq!(unitary.qubits(), ancillas + system_qubits, "register width mismatch");
        assert!(alpha > 0.0, "subnormalization must be positive");
        BlockEncoding { unitary, alpha, ancillas, epsilon: 0.0, system_qubits }
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = eps;
        self
    }

    /// Same circuit read with a different subnormalization.
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        assert!(alpha > 0.0);
        self.alpha = alpha;
        self
    }

    pub fn system_dim(&self) -> usize {
        1 << self.system_qubits
    }

    /// (1,0)-encoding of a unitary.
    pub fn from_unitary(u: Operator) -> Self {
        let n = u.qubits();
        Self::new(u, 1.0, 0, n)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_unitary(Operator::identity(n))
    }

    /// alpha * block * x for an arbitrary (unnormalized) system vector.
    pub fn apply_block(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.system_dim());
        let dim = self.system_dim();
        let mut y = vec![ZERO; dim];
        for (i, z) in self.unitary.apply_sparse(to_sparse(x)) {
            if i < dim {
                y[i] += z * self.alpha;
            }
        }
        y
    }

    /// Same encoding with `extra` idle ancillas added on top.
    pub fn pad_ancillas(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        BlockEncoding {
            unitary: Operator::pad_high(self.unitary.clone(), extra),
            alpha: self.alpha,
            ancillas: self.ancillas + extra,
            epsilon: self.epsilon,
            system_qubits: self.system_qubits,
        }
    }

    /// Encoding of the adjoint block.
    pub fn adjoint(&self) -> Self {
        BlockEncoding { unitary: self.unitary.adjoint(), ..self.clone() }
    }
}

/// alpha (<0^m| (x) I) U (|0^m> (x) I), column by column.
pub fn extract_block(be: &BlockEncoding) -> SparseMat {
    let dim = be.system_dim();
    let cols = (0..dim)
        .map(|j| {
            be.unitary
                .column(j)
                .into_iter()
                .filter(|a| a.0 < dim)
                .map(|(i, z)| (i, z * be.alpha))
                .collect()
        })
        .collect();
    SparseMat { dim, cols }
}

/// Max-norm check of the encoded block against `target`, within epsilon plus slack.
pub fn validate_be(be: &BlockEncoding, target: &SparseMat) -> Result<bool> {
    if target.dim != be.system_dim() {
        return Err(Error::DimensionMismatch { expected: be.system_dim(), got: target.dim });
    }
    let got = extract_block(be);
    Ok(got.max_abs_diff(target) <= be.epsilon + VALIDATION_SLACK)
}

/// Product AB: U acts on (ancU, sys), V on (ancV, sys); layout is (ancV, ancU, sys).
pub fn be_product(u: &BlockEncoding, v: &BlockEncoding) -> Result<BlockEncoding> {
    if u.system_qubits != v.system_qubits {
        return Err(Error::DimensionMismatch { expected: u.system_qubits, got: v.system_qubits });
    }
    let n = u.system_qubits;
    let (a, b) = (u.ancillas, v.ancillas);
    let total = n + a + b;
    let u_op = Operator::on_qubits(u.unitary.clone(), (0..n + a).collect(), total);
    let mut vpos: Vec<usize> = (0..n).collect();
    vpos.extend(n + a..n + a + b);
    let v_op = Operator::on_qubits(v.unitary.clone(), vpos, total);
    Ok(BlockEncoding {
        unitary: Operator::product(&[u_op, v_op]),
        alpha: u.alpha * v.alpha,
        ancillas: a + b,
        epsilon: u.alpha * v.epsilon + v.alpha * u.epsilon,
        system_qubits: n,
    })
}

/// Product of a chain A_0 A_1 ... A_k.
pub fn be_product_chain(chain: &[BlockEncoding]) -> Result<BlockEncoding> {
    let mut it = chain.iter();
    let mut acc = it.next().ok_or(Error::Invalid("empty product".into()))?.clone();
    for b in it {
        acc = be_product(&acc, b)?;
    }
    Ok(acc)
}

/// Prepare oracles for an LCU coefficient vector.
#[derive(Clone, Debug)]
pub struct StatePrepPair {
    pub coeffs: Vec<C64>,
    pub prep: Operator,
    pub prep_tilde: Operator,
    pub beta_norm: f64,
    pub pad_qubits: usize,
}

impl StatePrepPair {
    /// Entry (0, 0) of prep_tilde * prep, times beta; equals sum_j y_j.
    pub fn roundtrip(&self) -> C64 {
        let col = self.prep.column(0);
        let mut acc = ZERO;
        for (j, z) in col {
            acc += self.prep_tilde.entry(0, j) * z;
        }
        acc * self.beta_norm
    }
}

/// Complete a unit vector to a unitary by Gram-Schmidt against the standard basis.
pub fn complete_unitary(v: &[C64]) -> DMat {
    let d = v.len();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    let nv = norm2(v);
    cols.push(v.iter().map(|z| z / nv).collect());
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let mut w = vec![ZERO; d];
        w[k] = ONE;
        for _ in 0..2 {
            for c in &cols {
                let dot: C64 = c.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, ci) in w.iter_mut().zip(c) {
                    *wi -= dot * ci;
                }
            }
        }
        let nw = norm2(&w);
        if nw > 1e-8 {
            cols.push(w.iter().map(|z| z / nw).collect());
        }
    }
    let mut m = DMat::zeros(d, d);
    for (j, c) in cols.iter().enumerate() {
        for (i, z) in c.iter().enumerate() {
            m[(i, j)] = *z;
        }
    }
    m
}

/// PREP with first column sqrt(y_j)/sqrt(|y|_1) and PREP~ with the same first row.
pub fn make_prep_pair(y: &[C64]) -> Result<StatePrepPair> {
    let beta: f64 = y.iter().map(|z| z.norm()).sum();
    if y.is_empty() || beta <= 0.0 {
        return Err(Error::ZeroNorm);
    }
    let b = ceil_log2(y.len());
    let d = 1usize << b;
    let sb = sqrt(beta);
    let mut v = vec![ZERO; d];
    for (j, z) in y.iter().enumerate() {
        v[j] = principal_sqrt(*z) / sb;
    }
    let prep = complete_unitary(&v);
    let all_real_nonneg = y.iter().all(|z| z.im == 0.0 && z.re >= 0.0);
    let prep_tilde = if all_real_nonneg {
        prep.adjoint()
    } else {
        let w: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        complete_unitary(&w).adjoint()
    };
    Ok(StatePrepPair {
        coeffs: y.to_vec(),
        prep: Operator::dense(prep),
        prep_tilde: Operator::dense(prep_tilde),
        beta_norm: beta,
        pad_qubits: b,
    })
}

/// LCU sum_j y_j A_j. Terms with unequal alpha are absorbed into the coefficients as
/// y_j alpha_j / alpha_max and the pair is rebuilt.
pub fn be_lcu(terms: &[BlockEncoding], pair: &StatePrepPair) -> Result<BlockEncoding> {
    if terms.len() != pair.coeffs.len() {
        return Err(Error::CoefficientCount { coeffs: pair.coeffs.len(), terms: terms.len() });
    }
    if terms.is_empty() {
        return Err(Error::ZeroNorm);
    }
    let n = terms[0].system_qubits;
    for t in terms {
        if t.system_qubits != n {
            return Err(Error::DimensionMismatch { expected: n, got: t.system_qubits });
        }
    }
    let amax = terms.iter().map(|t| t.alpha).fold(0.0, f64::max);
    let uniform = terms.iter().all(|t| (t.alpha - amax).abs() <= 1e-15 * amax);
    let rebuilt;
    let pair = if uniform {
        pair
    } else {
        let y: Vec<C64> = pair.coeffs.iter().zip(terms).map(|(y, t)| y * (t.alpha / amax)).collect();
        rebuilt = make_prep_pair(&y)?;
        &rebuilt
    };
    let a = terms.iter().map(|t| t.ancillas).max().unwrap_or(0);
    let b = pair.pad_qubits;
    let low = a + n;
    let total = b + low;
    let ops: Vec<Option<Operator>> =
        terms.iter().map(|t| Some(t.pad_ancillas(a - t.ancillas).unitary)).collect();
    let sel_pos: Vec<usize> = (low..total).collect();
    let prep = Operator::on_qubits(pair.prep.clone(), sel_pos.clone(), total);
    let prep_t = Operator::on_qubits(pair.prep_tilde.clone(), sel_pos, total);
    let select = if b == 0 { ops[0].clone().unwrap() } else { Operator::select(low, ops) };
    let eps: f64 = terms.iter().zip(&pair.coeffs).map(|(t, y)| y.norm() * t.epsilon).sum::<f64>()
        * if uniform { 1.0 } else { amax };
    Ok(BlockEncoding {
        unitary: Operator::product(&[prep_t, select, prep]),
        alpha: amax * pair.beta_norm,
        ancillas: a + b,
        epsilon: eps,
        system_qubits: n,
    })
}

/// LCU from raw coefficients.
pub fn be_lcu_coeffs(terms: &[BlockEncoding], y: &[C64]) -> Result<BlockEncoding> {
    let pair = make_prep_pair(y)?;
    be_lcu(terms, &pair)
}

/// Real-coefficient convenience wrapper.
pub fn be_lcu_real(terms: &[BlockEncoding], y: &[f64]) -> Result<BlockEncoding> {
    let y: Vec<C64> = y.iter().map(|&x| r(x)).collect();
    be_lcu_coeffs(terms, &y)
}

/// A (x) B with layout (ancU, ancV, sysA, sysB).
pub fn be_tensor(u: &BlockEncoding, v: &BlockEncoding) -> BlockEncoding {
    let (n1, a) = (u.system_qubits, u.ancillas);
    let (n2, b) = (v.system_qubits, v.ancillas);
    let total = n1 + n2 + a + b;
    let mut upos: Vec<usize> = (n2..n2 + n1).collect();
    upos.extend(n1 + n2 + b..total);
    let mut vpos: Vec<usize> = (0..n2).collect();
    vpos.extend(n1 + n2..n1 + n2 + b);
    let uo = Operator::on_qubits(u.unitary.clone(), upos, total);
    let vo = Operator::on_qubits(v.unitary.clone(), vpos, total);
    BlockEncoding {
        unitary: Operator::product(&[uo, vo]),
        alpha: u.alpha * v.alpha,
        ancillas: a + b,
        epsilon: u.alpha * v.epsilon + v.alpha * u.epsilon,
        system_qubits: n1 + n2,
    }
}

/// Tensor chain with the first factor most significant.
pub fn be_tensor_chain(chain: &[BlockEncoding]) -> BlockEncoding {
    let mut it = chain.iter();
    let mut acc = it.next().expect("empty tensor chain").clone();
    for b in it {
        acc = be_tensor(&acc, b);
    }
    acc
}

/// (1,1)-encoding of the 1-sparse matrix with A[c(j), j] = amps[j], as (I (x) O_c) O_A.
pub fn be_sparse1(perm: &[usize], amps: &[C64]) -> Result<BlockEncoding> {
    if perm.len() != amps.len() {
        return Err(Error::DimensionMismatch { expected: perm.len(), got: amps.len() });
    }
    if !is_pow2(perm.len()) {
        return Err(Error::DimensionMismatch { expected: 1 << ceil_log2(perm.len()), got: perm.len() });
    }
    if amps.iter().any(|a| a.norm() > 1.0 + 1e-12) {
        return Err(Error::Invalid("amplitude exceeds one".into()));
    }
    let n = ceil_log2(perm.len());
    let oc = Operator::perm_table(perm.to_vec())?;
    let a = amps.to_vec();
    let oa = Operator::amplitude_oracle(n, amp_fn(move |j| a[j]));
    let oc = Operator::on_qubits(oc, (0..n).collect(), n + 1);
    Ok(BlockEncoding::new(Operator::product(&[oc, oa]), 1.0, 1, n))
}

/// (alpha,1)-encoding of a diagonal with entries d (alpha = max |d|, or `alpha` if larger).
pub fn be_diagonal(d: &[C64], alpha: Option<f64>) -> Result<BlockEncoding> {
    let m = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let a = alpha.unwrap_or(m).max(m);
    let a = if a == 0.0 { 1.0 } else { a };
    let amps: Vec<C64> = d.iter().map(|z| z / a).collect();
    let perm: Vec<usize> = (0..d.len()).collect();
    Ok(be_sparse1(&perm, &amps)?.with_alpha(a))
}

#[derive(Clone, Debug)]
pub struct PostselectResult {
    pub state: Vec<C64>,
    pub success_prob: f64,
    pub raw_norm: f64,
    /// Set when |A psi| < 1e-14 and `state` is the zero vector.
    pub zero: bool,
}

/// Apply the encoding to |0^m>|psi> and post-select the ancillas on |0^m>.
pub fn apply_postselected(be: &BlockEncoding, psi: &[C64]) -> Result<PostselectResult> {
    if psi.len() != be.system_dim() {
        return Err(Error::DimensionMismatch { expected: be.system_dim(), got: psi.len() });
    }
    let nrm = norm2(psi);
    if (nrm - 1.0).abs() > 1e-10 {
        return Err(Error::Unnormalized(nrm));
    }
    let mut v = be.apply_block(psi);
    for z in v.iter_mut() {
        *z /= be.alpha;
    }
    let raw = norm2(&v);
    if raw * be.alpha < 1e-14 {
        return Ok(PostselectResult { state: vec![ZERO; v.len()], success_prob: 0.0, raw_norm: raw, zero: true });
    }
    let state = v.iter().map(|z| z / raw).collect();
    Ok(PostselectResult { state, success_prob: raw * raw, raw_norm: raw, zero: false })
}

/// Hermitian unitary (H (x) I)(|0><1| (x) U + |1><0| (x) U^dagger)(H (x) I) encoding the same
/// block when the block is Hermitian; one extra ancilla on top.
pub fn be_hermitize(be: &BlockEncoding) -> BlockEncoding {
    let q = be.unitary.qubits();
    let sel = Operator::select(q, vec![Some(be.unitary.adjoint()), Some(be.unitary.clone())]);
    let x = Operator::on_qubits(Operator::dense(crate::num::gate2::x()), vec![q], q + 1);
    let h = Operator::on_qubits(Operator::dense(crate::num::gate2::h()), vec![q], q + 1);
    BlockEncoding {
        unitary: Operator::product(&[h.clone(), x, sel, h]),
        alpha: be.alpha,
        ancillas: be.ancillas + 1,
        epsilon: be.epsilon,
        system_qubits: be.system_qubits,
    }
}

/// Embed a system-register encoding on a subset of a larger system register; the other
/// system qubits see the identity.
pub fn be_on_system_qubits(be: &BlockEncoding, positions: &[usize], total_sys: usize) -> BlockEncoding {
    assert_eq!(positions.len(), be.system_qubits);
    let total = total_sys + be.ancillas;
    let mut pos: Vec<usize> = positions.to_vec();
    pos.extend(total_sys..total);
    BlockEncoding {
        unitary: Operator::on_qubits(be.unitary.clone(), pos, total),
        alpha: be.alpha,
        ancillas: be.ancillas,
        epsilon: be.epsilon,
        system_qubits: total_sys,
    }
}
