//! Lazy, matrix-free operators on qubit registers.
//!
//! Basis index bit `q` is qubit `q`; higher qubits are more significant. Operators act on
//! sparse amplitude lists so that extracting a block costs one pass per column instead of
//! materializing the full unitary.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{ceil_log2, is_pow2, r, sqrt, DMat, C64, ONE, ZERO};
use crate::sparse::{compact, to_dense, to_sparse, Amp, SparseMat};

/// Largest dimension [`Operator::to_dense`] will materialize.
pub const DENSE_LIMIT: usize = 1 << 12;

pub trait LinOp: Send + Sync {
    fn qubits(&self) -> usize;
    /// Apply to a sparse vector with unique indices; the result has unique indices.
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp>;
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp>;
    fn unitary_hint(&self) -> bool {
        true
    }
}

pub type IndexFn = Arc<dyn Fn(usize) -> usize + Send + Sync>;
pub type AmpFn = Arc<dyn Fn(usize) -> C64 + Send + Sync>;

/// Shared handle to a lazy operator.
#[derive(Clone)]
pub struct Operator(Arc<dyn LinOp>);

impl core::fmt::Debug for Operator {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Operator({} qubits)", self.qubits())
    }
}

impl Operator {
    pub fn new<T: LinOp + 'static>(op: T) -> Self {
        Operator(Arc::new(op))
    }

    pub fn qubits(&self) -> usize {
        self.0.qubits()
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits()
    }

    pub fn is_unitary_hint(&self) -> bool {
        self.0.unitary_hint()
    }

    pub fn apply_sparse(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.0.apply(x)
    }

    pub fn apply_adjoint_sparse(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.0.apply_adjoint(x)
    }

    pub fn apply_dense(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim());
        to_dense(&self.0.apply(to_sparse(x)), self.dim())
    }

    pub fn apply_adjoint_dense(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.dim());
        to_dense(&self.0.apply_adjoint(to_sparse(x)), self.dim())
    }

    /// Column `j` as a sorted sparse vector.
    pub fn column(&self, j: usize) -> Vec<Amp> {
        let mut c = self.0.apply(vec![(j, ONE)]);
        c.sort_unstable_by_key(|a| a.0);
        c
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.column(j).iter().find(|a| a.0 == i).map(|a| a.1).unwrap_or(ZERO)
    }

    pub fn to_dense(&self) -> Result<DMat> {
        let d = self.dim();
        if d > DENSE_LIMIT {
            return Err(Error::TooLarge(d));
        }
        let mut m = DMat::zeros(d, d);
        for j in 0..d {
            for (i, z) in self.column(j) {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn to_sparse_matrix(&self) -> SparseMat {
        SparseMat { dim: self.dim(), cols: (0..self.dim()).map(|j| self.column(j)).collect() }
    }

    pub fn adjoint(&self) -> Operator {
        Operator::new(AdjointOp(self.clone()))
    }

    // ---- constructors ----

    pub fn identity(qubits: usize) -> Operator {
        Operator::new(IdentityOp(qubits))
    }

    pub fn dense(m: DMat) -> Operator {
        assert_eq!(m.rows, m.cols, "dense operator must be square");
        assert!(is_pow2(m.rows), "dense operator dimension must be a power of two");
        let unitary = m.unitarity_defect() <= 1e-10;
        let adj = m.adjoint();
        Operator::new(DenseOp { qubits: ceil_log2(m.rows), m, adj, unitary })
    }

    /// Permutation |i> -> |fwd(i)>; `inv` must be its inverse.
    pub fn perm(qubits: usize, fwd: IndexFn, inv: IndexFn) -> Operator {
        Operator::new(PermOp { qubits, fwd, inv })
    }

    pub fn perm_fn(
        qubits: usize,
        fwd: impl Fn(usize) -> usize + Send + Sync + 'static,
        inv: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> Operator {
        Self::perm(qubits, Arc::new(fwd), Arc::new(inv))
    }

    /// Permutation given by a table; fails if the table is not a bijection.
    pub fn perm_table(table: Vec<usize>) -> Result<Operator> {
        let n = table.len();
        if !is_pow2(n) {
            return Err(Error::DimensionMismatch { expected: 1 << ceil_log2(n), got: n });
        }
        let mut inv = vec![usize::MAX; n];
        for (i, &t) in table.iter().enumerate() {
            if t >= n || inv[t] != usize::MAX {
                return Err(Error::NotBijective);
            }
            inv[t] = i;
        }
        let fwd = Arc::new(table);
        let inv = Arc::new(inv);
        Ok(Self::perm_fn(ceil_log2(n), move |i| fwd[i], move |i| inv[i]))
    }

    /// Diagonal operator; `unitary` is a hint only.
    pub fn diagonal(qubits: usize, f: AmpFn, unitary: bool) -> Operator {
        Operator::new(DiagOp { qubits, f, unitary })
    }

    /// Amplitude oracle on (flag, system): |0>|j> -> (a_j|0> + sqrt(1-|a_j|^2)|1>)|j>.
    pub fn amplitude_oracle(sys_qubits: usize, amps: AmpFn) -> Operator {
        Operator::new(AmpOracle { sys: sys_qubits, amps })
    }

    /// Matrix product; `factors[0]` is leftmost, so the last factor acts first.
    pub fn product(factors: &[Operator]) -> Operator {
        assert!(!factors.is_empty());
        let q = factors[0].qubits();
        for f in factors {
            assert_eq!(f.qubits(), q, "product factors must act on the same register");
        }
        if factors.len() == 1 {
            return factors[0].clone();
        }
        Operator::new(ProductOp { seq: factors.iter().rev().cloned().collect() })
    }

    /// Embed `inner` on the listed qubits of a `total`-qubit register; `positions[k]` is the
    /// outer qubit carrying inner qubit `k`. The other qubits are spectators.
    pub fn on_qubits(inner: Operator, positions: Vec<usize>, total: usize) -> Operator {
        assert_eq!(positions.len(), inner.qubits(), "position count must match inner qubits");
        let mut mask = 0usize;
        for &p in &positions {
            assert!(p < total, "position out of range");
            assert!(mask & (1 << p) == 0, "duplicate position");
            mask |= 1 << p;
        }
        let contiguous = positions.iter().enumerate().all(|(k, &p)| k == p);
        if contiguous && positions.len() == total {
            return inner;
        }
        Operator::new(OnQubits { inner, positions, total, mask, contiguous })
    }

    /// `inner` on the low qubits with `extra` idle qubits on top.
    pub fn pad_high(inner: Operator, extra: usize) -> Operator {
        let q = inner.qubits();
        Self::on_qubits(inner, (0..q).collect(), q + extra)
    }

    /// Multiplexor sum_j |j><j| (x) U_j with the select register on top; missing or `None`
    /// entries act as identity.
    pub fn select(low_qubits: usize, ops: Vec<Option<Operator>>) -> Operator {
        for o in ops.iter().flatten() {
            assert_eq!(o.qubits(), low_qubits, "select branch has wrong width");
        }
        let sel = ceil_log2(ops.len().max(1));
        Operator::new(SelectOp { low: low_qubits, sel, ops })
    }

    /// Apply `op` on the low register iff the top `ctrl` qubits equal `pattern`.
    pub fn controlled(ctrl: usize, pattern: usize, op: Operator) -> Operator {
        let low = op.qubits();
        let mut ops: Vec<Option<Operator>> = vec![None; 1 << ctrl];
        ops[pattern] = Some(op);
        Operator::new(SelectOp { low, sel: ctrl, ops })
    }

    /// Run `inner` (workspace on its top `work` qubits) with the workspace starting and
    /// ending in |0>; the workspace is hidden from the result.
    pub fn with_clean_workspace(inner: Operator, work: usize) -> Operator {
        assert!(inner.qubits() >= work);
        Operator::new(CleanWorkspace { inner, work })
    }

    /// Wrap a non-unitary sparse matrix as an operator.
    pub fn from_sparse(m: SparseMat) -> Operator {
        assert!(is_pow2(m.dim));
        let adj = m.adjoint();
        Operator::new(SparseOp { qubits: ceil_log2(m.dim), m, adj })
    }

    /// Unitary mapping |0> to the normalized vector `v`: a phase times the Householder
    /// reflection exchanging |0> and e^{-i phi} v.
    pub fn state_prep(v: &[C64]) -> Result<Operator> {
        if !is_pow2(v.len()) {
            return Err(Error::DimensionMismatch { expected: 1 << ceil_log2(v.len()), got: v.len() });
        }
        let nrm = sqrt(v.iter().map(|z| z.norm_sqr()).sum());
        if (nrm - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(nrm));
        }
        let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { ONE };
        let mut w: Vec<C64> = v.iter().map(|z| -(z / phase)).collect();
        w[0] += ONE;
        let wn: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        let w = if wn < 1e-28 { Vec::new() } else { to_sparse(&w) };
        Ok(Operator::new(Householder { qubits: ceil_log2(v.len()), w, wn, phase }))
    }
}

struct Householder {
    qubits: usize,
    w: Vec<Amp>,
    wn: f64,
    phase: C64,
}

impl Householder {
    fn run(&self, x: Vec<Amp>, ph: C64) -> Vec<Amp> {
        let mut out = x;
        if !self.w.is_empty() {
            let mut dot = ZERO;
            for &(i, z) in &out {
                if let Ok(k) = self.w.binary_search_by_key(&i, |a| a.0) {
                    dot += self.w[k].1.conj() * z;
                }
            }
            let f = dot * (2.0 / self.wn);
            if f != ZERO {
                out.extend(self.w.iter().map(|&(i, z)| (i, -z * f)));
                out = compact(out);
            }
        }
        for a in out.iter_mut() {
            a.1 *= ph;
        }
        out
    }
}

impl LinOp for Householder {
    fn qubits(&self) -> usize {
        self.qubits
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, self.phase)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        // the reflection is Hermitian, so only the phase conjugates
        let y: Vec<Amp> = x.into_iter().map(|(i, z)| (i, z * self.phase.conj())).collect();
        self.run(y, ONE)
    }
}

struct IdentityOp(usize);

impl LinOp for IdentityOp {
    fn qubits(&self) -> usize {
        self.0
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        x
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        x
    }
}

struct AdjointOp(Operator);

impl LinOp for AdjointOp {
    fn qubits(&self) -> usize {
        self.0.qubits()
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.0 .0.apply_adjoint(x)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.0 .0.apply(x)
    }
    fn unitary_hint(&self) -> bool {
        self.0.is_unitary_hint()
    }
}

struct DenseOp {
    qubits: usize,
    m: DMat,
    adj: DMat,
    unitary: bool,
}

fn dense_apply(m: &DMat, x: Vec<Amp>) -> Vec<Amp> {
    let mut acc = vec![ZERO; m.rows];
    for (j, z) in x {
        for (i, slot) in acc.iter_mut().enumerate() {
            let a = m.data[i * m.cols + j];
            if a != ZERO {
                *slot += a * z;
            }
        }
    }
    compact(to_sparse(&acc))
}

impl LinOp for DenseOp {
    fn qubits(&self) -> usize {
        self.qubits
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        dense_apply(&self.m, x)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        dense_apply(&self.adj, x)
    }
    fn unitary_hint(&self) -> bool {
        self.unitary
    }
}

struct PermOp {
    qubits: usize,
    fwd: IndexFn,
    inv: IndexFn,
}

impl LinOp for PermOp {
    fn qubits(&self) -> usize {
        self.qubits
    }
    fn apply(&self, mut x: Vec<Amp>) -> Vec<Amp> {
        for a in x.iter_mut() {
            a.0 = (self.fwd)(a.0);
        }
        x
    }
    fn apply_adjoint(&self, mut x: Vec<Amp>) -> Vec<Amp> {
        for a in x.iter_mut() {
            a.0 = (self.inv)(a.0);
        }
        x
    }
}

struct DiagOp {
    qubits: usize,
    f: AmpFn,
    unitary: bool,
}

impl LinOp for DiagOp {
    fn qubits(&self) -> usize {
        self.qubits
    }
    fn apply(&self, mut x: Vec<Amp>) -> Vec<Amp> {
        for a in x.iter_mut() {
            a.1 *= (self.f)(a.0);
        }
        x.retain(|a| a.1 != ZERO);
        x
    }
    fn apply_adjoint(&self, mut x: Vec<Amp>) -> Vec<Amp> {
        for a in x.iter_mut() {
            a.1 *= (self.f)(a.0).conj();
        }
        x.retain(|a| a.1 != ZERO);
        x
    }
    fn unitary_hint(&self) -> bool {
        self.unitary
    }
}

struct AmpOracle {
    sys: usize,
    amps: AmpFn,
}

impl AmpOracle {
    fn run(&self, x: Vec<Amp>, adjoint: bool) -> Vec<Amp> {
        let top = 1usize << self.sys;
        let mut out = Vec::with_capacity(2 * x.len());
        for (idx, z) in x {
            let j = idx & (top - 1);
            let flag = idx >> self.sys;
            let a = (self.amps)(j);
            let s = r(sqrt((1.0 - a.norm_sqr()).max(0.0)));
            // U = [[a, -s], [s, conj a]]
            let (u00, u01, u10, u11) = if adjoint {
                (a.conj(), s, -s, a)
            } else {
                (a, -s, s, a.conj())
            };
            if flag == 0 {
                out.push((j, u00 * z));
                out.push((j | top, u10 * z));
            } else {
                out.push((j, u01 * z));
                out.push((j | top, u11 * z));
            }
        }
        compact(out)
    }
}

impl LinOp for AmpOracle {
    fn qubits(&self) -> usize {
        self.sys + 1
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, false)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, true)
    }
}

struct ProductOp {
    /// Application order: seq[0] acts first.
    seq: Vec<Operator>,
}

impl LinOp for ProductOp {
    fn qubits(&self) -> usize {
        self.seq[0].qubits()
    }
    fn apply(&self, mut x: Vec<Amp>) -> Vec<Amp> {
        for op in &self.seq {
            if x.is_empty() {
                break;
            }
            x = op.0.apply(x);
        }
        x
    }
    fn apply_adjoint(&self, mut x: Vec<Amp>) -> Vec<Amp> {
        for op in self.seq.iter().rev() {
            if x.is_empty() {
                break;
            }
            x = op.0.apply_adjoint(x);
        }
        x
    }
    fn unitary_hint(&self) -> bool {
        self.seq.iter().all(|o| o.is_unitary_hint())
    }
}

struct OnQubits {
    inner: Operator,
    positions: Vec<usize>,
    total: usize,
    mask: usize,
    contiguous: bool,
}

impl OnQubits {
    #[inline]
    fn gather(&self, idx: usize) -> usize {
        if self.contiguous {
            return idx & self.mask;
        }
        let mut v = 0;
        for (k, &p) in self.positions.iter().enumerate() {
            v |= ((idx >> p) & 1) << k;
        }
        v
    }

    #[inline]
    fn scatter(&self, v: usize) -> usize {
        if self.contiguous {
            return v;
        }
        let mut idx = 0;
        for (k, &p) in self.positions.iter().enumerate() {
            idx |= ((v >> k) & 1) << p;
        }
        idx
    }

    fn run(&self, x: Vec<Amp>, adjoint: bool) -> Vec<Amp> {
        let mut keyed: Vec<(usize, usize, C64)> =
            x.into_iter().map(|(i, z)| (i & !self.mask, self.gather(i), z)).collect();
        keyed.sort_unstable_by_key(|e| e.0);
        let mut out = Vec::with_capacity(keyed.len());
        let mut start = 0;
        while start < keyed.len() {
            let spec = keyed[start].0;
            let mut end = start;
            let mut group = Vec::new();
            while end < keyed.len() && keyed[end].0 == spec {
                group.push((keyed[end].1, keyed[end].2));
                end += 1;
            }
            let res = if adjoint { self.inner.0.apply_adjoint(group) } else { self.inner.0.apply(group) };
            for (v, z) in res {
                out.push((spec | self.scatter(v), z));
            }
            start = end;
        }
        out
    }
}

impl LinOp for OnQubits {
    fn qubits(&self) -> usize {
        self.total
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, false)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, true)
    }
    fn unitary_hint(&self) -> bool {
        self.inner.is_unitary_hint()
    }
}

struct SelectOp {
    low: usize,
    sel: usize,
    ops: Vec<Option<Operator>>,
}

impl SelectOp {
    fn run(&self, x: Vec<Amp>, adjoint: bool) -> Vec<Amp> {
        let lowmask = (1usize << self.low) - 1;
        let mut keyed: Vec<(usize, usize, C64)> =
            x.into_iter().map(|(i, z)| (i >> self.low, i & lowmask, z)).collect();
        keyed.sort_unstable_by_key(|e| e.0);
        let mut out = Vec::with_capacity(keyed.len());
        let mut start = 0;
        while start < keyed.len() {
            let s = keyed[start].0;
            let mut end = start;
            while end < keyed.len() && keyed[end].0 == s {
                end += 1;
            }
            let group: Vec<Amp> = keyed[start..end].iter().map(|e| (e.1, e.2)).collect();
            let res = match self.ops.get(s).and_then(|o| o.as_ref()) {
                Some(op) if adjoint => op.0.apply_adjoint(group),
                Some(op) => op.0.apply(group),
                None => group,
            };
            for (v, z) in res {
                out.push(((s << self.low) | v, z));
            }
            start = end;
        }
        out
    }
}

impl LinOp for SelectOp {
    fn qubits(&self) -> usize {
        self.low + self.sel
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, false)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, true)
    }
    fn unitary_hint(&self) -> bool {
        self.ops.iter().flatten().all(|o| o.is_unitary_hint())
    }
}

struct CleanWorkspace {
    inner: Operator,
    work: usize,
}

impl CleanWorkspace {
    fn run(&self, x: Vec<Amp>, adjoint: bool) -> Vec<Amp> {
        let q = self.inner.qubits() - self.work;
        let res = if adjoint { self.inner.0.apply_adjoint(x) } else { self.inner.0.apply(x) };
        let mut out = Vec::with_capacity(res.len());
        for (i, z) in res {
            if i >> q != 0 {
                assert!(z.norm() < 1e-12, "{}", format!("workspace left dirty at index {i}"));
                continue;
            }
            out.push((i, z));
        }
        out
    }
}

impl LinOp for CleanWorkspace {
    fn qubits(&self) -> usize {
        self.inner.qubits() - self.work
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, false)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        self.run(x, true)
    }
    fn unitary_hint(&self) -> bool {
        self.inner.is_unitary_hint()
    }
}

struct SparseOp {
    qubits: usize,
    m: SparseMat,
    adj: SparseMat,
}

fn sparse_apply(m: &SparseMat, x: Vec<Amp>) -> Vec<Amp> {
    let mut out = Vec::new();
    for (j, z) in x {
        for &(i, a) in &m.cols[j] {
            out.push((i, a * z));
        }
    }
    compact(out)
}

impl LinOp for SparseOp {
    fn qubits(&self) -> usize {
        self.qubits
    }
    fn apply(&self, x: Vec<Amp>) -> Vec<Amp> {
        sparse_apply(&self.m, x)
    }
    fn apply_adjoint(&self, x: Vec<Amp>) -> Vec<Amp> {
        sparse_apply(&self.adj, x)
    }
    fn unitary_hint(&self) -> bool {
        false
    }
}

/// Boxed closure helpers.
pub fn index_fn(f: impl Fn(usize) -> usize + Send + Sync + 'static) -> IndexFn {
    Arc::new(f)
}

pub fn amp_fn(f: impl Fn(usize) -> C64 + Send + Sync + 'static) -> AmpFn {
    Arc::new(f)
}
