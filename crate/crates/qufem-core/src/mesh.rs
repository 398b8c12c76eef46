//! Structured meshes, connectivity, position operators, element projectors and the
//! boundary oracle for masked domains.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates::{comparator, or_gate, multi_cnot, remainder_qubits, CostedOperator};
use crate::num::{ceil_log2, is_pow2, r, C64};
use crate::op::{amp_fn, Operator};
use crate::qcore::{be_lcu_real, be_on_system_qubits, BlockEncoding};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshParams {
    pub d: usize,
    pub p: usize,
    pub m: usize,
    pub n: usize,
    pub numnp: usize,
    pub numel: usize,
    pub nen: usize,
    pub h: f64,
}

impl MeshParams {
    /// Mesh with n qubits per axis; requires p = 2^m - 1 and m | n.
    pub fn new(d: usize, p: usize, n: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidMesh("dimension must be positive".into()));
        }
        if p == 0 || !is_pow2(p + 1) {
            return Err(Error::InvalidMesh(format!("p + 1 = {} is not a power of two", p + 1)));
        }
        let m = remainder_qubits(p);
        if n == 0 || n % m != 0 {
            return Err(Error::InvalidMesh(format!("n = {n} is not a positive multiple of m = {m}")));
        }
        if n * d > 40 {
            return Err(Error::TooLarge(n * d));
        }
        let numnp = 1usize << n;
        let numel = (numnp - 1) / p;
        Ok(MeshParams { d, p, m, n, numnp, numel, nen: p + 1, h: 1.0 / numel as f64 })
    }

    /// Node spacing h / p; node j sits at x = j / (numnp - 1).
    pub fn node_spacing(&self) -> f64 {
        1.0 / (self.numnp - 1) as f64
    }

    pub fn node_coord(&self, j: usize) -> f64 {
        j as f64 * self.node_spacing()
    }

    /// Total number of grid nodes numnp^d.
    pub fn total_nodes(&self) -> usize {
        self.numnp.pow(self.d as u32)
    }

    /// Axis coordinates of a flattened node index; axis 0 is the low register.
    pub fn split_index(&self, v: usize) -> Vec<usize> {
        (0..self.d).map(|i| (v >> (i * self.n)) & (self.numnp - 1)).collect()
    }

    pub fn join_index(&self, idx: &[usize]) -> usize {
        idx.iter().enumerate().map(|(i, &j)| j << (i * self.n)).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Connectivity {
    pub nen: usize,
    pub numel: usize,
    pub numnp: usize,
    /// ix[j][e] = global node of local node j in element e.
    pub ix: Vec<Vec<usize>>,
    pub injective_per_row: bool,
}

impl Connectivity {
    /// ix(j, e) = e p + j.
    pub fn lagrange_1d(mp: &MeshParams) -> Self {
        let ix: Vec<Vec<usize>> =
            (0..mp.nen).map(|j| (0..mp.numel).map(|e| e * mp.p + j).collect()).collect();
        Self::from_table(ix, mp.numnp)
    }

    /// ix(j, e) = (e p + j) mod numnp over every element start e p < numnp.
    pub fn periodic_1d(mp: &MeshParams) -> Self {
        let numel = mp.numnp.div_ceil(mp.p);
        let ix = (0..mp.nen)
            .map(|j| (0..numel).map(|e| (e * mp.p + j) % mp.numnp).collect())
            .collect();
        Self::from_table(ix, mp.numnp)
    }

    pub fn from_table(ix: Vec<Vec<usize>>, numnp: usize) -> Self {
        let nen = ix.len();
        let numel = ix.first().map_or(0, |r| r.len());
        let injective_per_row = ix.iter().all(|row| {
            let mut seen = vec![false; numnp];
            row.iter().all(|&g| g < numnp && !core::mem::replace(&mut seen[g], true))
        });
        Connectivity { nen, numel, numnp, ix, injective_per_row }
    }

    pub fn get(&self, j: usize, e: usize) -> usize {
        self.ix[j][e]
    }

    fn check_injective(&self) -> Result<()> {
        for (j, row) in self.ix.iter().enumerate() {
            let mut seen = vec![false; self.numnp];
            for &g in row {
                if g >= self.numnp || seen[g] {
                    return Err(Error::NonInjective(j));
                }
                seen[g] = true;
            }
        }
        Ok(())
    }
}

/// Mesh with n = m k qubits per axis.
pub fn build_mesh(d: usize, p: usize, k: usize) -> Result<(MeshParams, Connectivity)> {
    if p == 0 || !is_pow2(p + 1) {
        return Err(Error::InvalidMesh(format!("p + 1 = {} is not a power of two", p + 1)));
    }
    let mp = MeshParams::new(d, p, remainder_qubits(p) * k)?;
    let conn = Connectivity::lagrange_1d(&mp);
    Ok((mp, conn))
}

/// O_IX on (out n | e n | j b): |j>|e>|y> -> |j>|e>|y xor IX(j, e)>; identity outside the table.
pub fn o_ix_oracle(conn: &Connectivity) -> Result<Operator> {
    conn.check_injective()?;
    let n = ceil_log2(conn.numnp);
    let ne = ceil_log2(conn.numel.max(conn.numnp));
    let b = ceil_log2(conn.nen);
    let table = conn.ix.clone();
    let (nen, numel) = (conn.nen, conn.numel);
    let f = move |i: usize| {
        let e = (i >> n) & ((1 << ne) - 1);
        let j = i >> (n + ne);
        if j < nen && e < numel {
            i ^ table[j][e]
        } else {
            i
        }
    };
    let g = f.clone();
    Ok(Operator::perm_fn(n + ne + b, f, g))
}

/// Compact form |j>|e> -> |j>|IX(j, e)> on (e n | j b); each row is completed to a bijection
/// by sending unused inputs to unused outputs in increasing order.
pub fn o_ix_compact(conn: &Connectivity) -> Result<Operator> {
    conn.check_injective()?;
    let n = ceil_log2(conn.numnp.max(conn.numel));
    let b = ceil_log2(conn.nen);
    let dim = 1usize << n;
    let mut table = Vec::with_capacity(dim << b);
    for j in 0..(1usize << b) {
        let mut row = vec![usize::MAX; dim];
        if j < conn.nen {
            let mut used = vec![false; dim];
            for (e, &g) in conn.ix[j].iter().enumerate() {
                row[e] = g;
                used[g] = true;
            }
            let mut free = (0..dim).filter(|&g| !used[g]);
            for slot in row.iter_mut().filter(|s| **s == usize::MAX) {
                *slot = free.next().expect("counts match");
            }
        } else {
            row = (0..dim).collect();
        }
        table.extend(row.into_iter().map(|g| (j << n) | g));
    }
    Operator::perm_table(table)
}

/// (N - 1)-encoding of X = diag(0, ..., N - 1) as (N-1)/2 I - 1/2 sum_i 2^i Z^(i).
pub fn position_be(n: usize) -> BlockEncoding {
    let nn = (1usize << n) as f64;
    let mut terms = vec![BlockEncoding::identity(n)];
    let mut y = vec![(nn - 1.0) / 2.0];
    for i in 0..n {
        let z = Operator::diagonal(n, amp_fn(move |j| if (j >> i) & 1 == 1 { r(-1.0) } else { r(1.0) }), true);
        terms.push(BlockEncoding::from_unitary(z));
        y.push(-((1u64 << i) as f64) / 2.0);
    }
    be_lcu_real(&terms, &y).expect("nonzero coefficients")
}

/// The same circuit read with alpha = 1: eigenvalues j / (N - 1), the node coordinates.
pub fn unit_position_be(n: usize) -> BlockEncoding {
    position_be(n).with_alpha(1.0)
}

/// X^(i) on axis i of a d-axis register.
pub fn position_be_dim(i: usize, d: usize, n: usize) -> BlockEncoding {
    assert!(i < d);
    let pos: Vec<usize> = (i * n..(i + 1) * n).collect();
    be_on_system_qubits(&position_be(n), &pos, d * n)
}

/// Flag set iff e >= numel, so the block is the projector onto [numel].
pub fn element_projector_be(n: usize, p: usize) -> BlockEncoding {
    let numel = ((1usize << n) - 1) / p;
    BlockEncoding::new(comparator(n, numel).op, 1.0, 1, n)
}

/// Active, fixed (Dirichlet) and Neumann nodes on a numnp^d grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainMask {
    pub d: usize,
    pub n: usize,
    pub active: Vec<bool>,
    pub fixed: Vec<bool>,
    pub neumann: Vec<bool>,
}

impl DomainMask {
    /// Full grid with every node on the outer boundary fixed.
    pub fn full(d: usize, n: usize) -> Self {
        Self::from_active(d, n, vec![true; 1 << (d * n)])
    }

    /// Full grid with nothing fixed.
    pub fn unconstrained(d: usize, n: usize) -> Self {
        let len = 1 << (d * n);
        DomainMask { d, n, active: vec![true; len], fixed: vec![false; len], neumann: vec![false; len] }
    }

    /// Elements are active iff all their corners are; a node is free iff every element
    /// touching it exists and is active, otherwise it is fixed to zero.
    pub fn from_active(d: usize, n: usize, active: Vec<bool>) -> Self {
        let nn = 1usize << n;
        assert_eq!(active.len(), 1 << (d * n));
        let split = |v: usize| -> Vec<usize> { (0..d).map(|i| (v >> (i * n)) & (nn - 1)).collect() };
        let join = |c: &[usize]| -> usize { c.iter().enumerate().map(|(i, &x)| x << (i * n)).sum() };
        let ne = nn - 1;
        // element (corner index) active flags
        let el_active = |c: &[usize]| -> bool {
            if c.iter().any(|&x| x >= ne) {
                return false;
            }
            (0..(1usize << d)).all(|corner| {
                let v: Vec<usize> = c.iter().enumerate().map(|(i, &x)| x + ((corner >> i) & 1)).collect();
                active[join(&v)]
            })
        };
        let fixed = (0..active.len())
            .map(|v| {
                let c = split(v);
                let all_ok = (0..(1usize << d)).all(|s| {
                    let mut el = Vec::with_capacity(d);
                    for (i, &x) in c.iter().enumerate() {
                        let off = (s >> i) & 1;
                        if x < off {
                            return false;
                        }
                        el.push(x - off);
                    }
                    el_active(&el)
                });
                !all_ok
            })
            .collect();
        DomainMask { d, n, active, fixed, neumann: vec![false; 1 << (d * n)] }
    }

    /// Bitmap rows of '0'/'1', most-significant y first, one character per node.
    pub fn from_bitmap(n: usize, rows: &[&str]) -> Result<Self> {
        let nn = 1usize << n;
        if rows.len() != nn {
            return Err(Error::InvalidMesh(format!("bitmap has {} rows, expected {nn}", rows.len())));
        }
        let mut active = vec![false; nn * nn];
        for (ri, row) in rows.iter().enumerate() {
            let y = nn - 1 - ri;
            let bytes = row.trim().as_bytes();
            if bytes.len() != nn {
                return Err(Error::InvalidMesh(format!("bitmap row {ri} has {} columns", bytes.len())));
            }
            for (x, &ch) in bytes.iter().enumerate() {
                active[(y << n) | x] = match ch {
                    b'1' => true,
                    b'0' => false,
                    _ => return Err(Error::InvalidMesh(format!("bad bitmap character in row {ri}"))),
                };
            }
        }
        Ok(Self::from_active(2, n, active))
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Number of constrained nodes.
    pub fn numbp(&self) -> usize {
        self.fixed.iter().filter(|&&f| f).count()
    }

    pub fn interior_indicator(&self) -> Vec<f64> {
        self.fixed.iter().map(|&f| if f { 0.0 } else { 1.0 }).collect()
    }

    /// Mark fixed nodes on the listed outer faces as Neumann instead; faces are
    /// (axis, side) with side 0 at coordinate 0 and side 1 at numnp - 1. Corner nodes
    /// shared with a remaining Dirichlet face stay fixed.
    pub fn with_neumann_faces(mut self, faces: &[(usize, usize)]) -> Self {
        let nn = 1usize << self.n;
        let on_face = |v: usize, axis: usize, side: usize| -> bool {
            let x = (v >> (axis * self.n)) & (nn - 1);
            x == if side == 0 { 0 } else { nn - 1 }
        };
        for v in 0..self.len() {
            if !self.active[v] {
                continue;
            }
            let on_neu = faces.iter().any(|&(a, s)| on_face(v, a, s));
            if !on_neu {
                continue;
            }
            self.neumann[v] = true;
            let on_dir = (0..self.d)
                .flat_map(|a| [(a, 0), (a, 1)])
                .filter(|f| !faces.contains(f))
                .any(|(a, s)| on_face(v, a, s));
            if !on_dir {
                self.fixed[v] = false;
            }
        }
        self
    }
}

/// U_B: flag (top) set iff the node is fixed; as a (1,1)-encoding its block is P_int.
pub fn boundary_oracle(mask: &DomainMask) -> (Operator, BlockEncoding) {
    let q = mask.d * mask.n;
    let fixed = alloc::sync::Arc::new(mask.fixed.clone());
    let f = move |i: usize| if fixed[i & ((1 << q) - 1)] { i ^ (1 << q) } else { i };
    let g = f.clone();
    let op = Operator::perm_fn(q + 1, f, g);
    (op.clone(), BlockEncoding::new(op, 1.0, 1, q))
}

/// (1,1)-encoding of P_bd = I - P_int: the boundary oracle followed by X on the flag.
pub fn boundary_projector_be(mask: &DomainMask) -> BlockEncoding {
    let (ub, _) = boundary_oracle(mask);
    let q = mask.d * mask.n;
    let x = Operator::on_qubits(Operator::dense(crate::num::gate2::x()), vec![q], q + 1);
    BlockEncoding::new(Operator::product(&[x, ub]), 1.0, 1, q)
}

/// 1D gate form (c_{0^n}NOT)(c_{1^n}NOT) of the boundary oracle for the two end nodes.
pub fn boundary_oracle_1d_gates(n: usize) -> CostedOperator {
    or_gate(n).then_after(&multi_cnot(n))
}

/// Diagonal of a projector as complex entries.
pub fn indicator_diag(ind: &[f64]) -> Vec<C64> {
    ind.iter().map(|&x| r(x)).collect()
}
