//! Units of interaction and local-to-global indicator matrices: brute-force references
//! and their circuit block-encodings.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gates::{
    comparator, mod_p_unitary, mul_mod_unitary, multi_cnot, multi_cnot_cost, or_gate, remainder_qubits,
    shift_op, CostedBe, GateCost,
};
use crate::mesh::{Connectivity, MeshParams};
use crate::num::{gate2, ONE};
use crate::op::Operator;
use crate::qcore::BlockEncoding;
use crate::sparse::SparseMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InteractionSpec {
    pub j: usize,
    pub k: usize,
    pub p: usize,
    pub n: usize,
    pub periodic: bool,
}

/// sum_e |IX(j, e)><IX(k, e)|.
pub fn uoi_reference(conn: &Connectivity, j: usize, k: usize) -> SparseMat {
    let t: Vec<_> = (0..conn.numel).map(|e| (conn.get(j, e), conn.get(k, e), ONE)).collect();
    SparseMat::from_triplets(conn.numnp, &t)
}

/// sum_e |IX(j, e)><e| on a register of max(numnp, numel) states.
pub fn indicator_reference(conn: &Connectivity, j: usize) -> SparseMat {
    let dim = conn.numnp.max(conn.numel);
    let t: Vec<_> = (0..conn.numel).map(|e| (conn.get(j, e), e, ONE)).collect();
    SparseMat::from_triplets(dim, &t)
}

/// Conjugate a (1,a)-encoding of A_00 by shifts: S^j A_00 S^-k on the system register.
fn shifted(core: CostedBe, n: usize, j: i64, k: i64) -> CostedBe {
    let a = core.be.ancillas;
    let sj = shift_op(n, j);
    let sk = shift_op(n, -k);
    let pad = |o: Operator| Operator::pad_high(o, a);
    let u = Operator::product(&[pad(sj.op), core.be.unitary.clone(), pad(sk.op)]);
    CostedBe { be: BlockEncoding::new(u, 1.0, a, n), cost: core.cost + sj.cost + sk.cost }
}

/// (1,1)-encoding of A_00 for p = 1: C^n(NOT) flags the last node. Periodic meshes use
/// the identity with one idle ancilla.
pub fn uoi00_p1(n: usize, periodic: bool) -> CostedBe {
    if periodic {
        return CostedBe { be: BlockEncoding::identity(n).pad_ancillas(1), cost: GateCost::ZERO };
    }
    let mc = multi_cnot(n);
    CostedBe { be: BlockEncoding::new(mc.op, 1.0, 1, n), cost: mc.cost }
}

/// Reduced-Toffoli (1,1)-encoding of A_11 for p = 1: the OR-gate flags node 0.
pub fn uoi11_p1_or(n: usize) -> CostedBe {
    let g = or_gate(n);
    CostedBe { be: BlockEncoding::new(g.op, 1.0, 1, n), cost: g.cost }
}

/// A_jk = S^j A_00 S^-k for p = 1.
pub fn uoi_be_p1(n: usize, j: usize, k: usize, periodic: bool) -> Result<CostedBe> {
    if j > 1 || k > 1 {
        return Err(Error::Invalid("p = 1 local indices are 0 or 1".into()));
    }
    Ok(shifted(uoi00_p1(n, periodic), n, j as i64, k as i64))
}

/// (1,2)-encoding of A_00 for order p on (flag2, flag1, sys): flag1 is set iff i mod p != 0
/// (via U_%p with its remainder register as clean workspace), flag2 iff i = 2^n - 1.
pub fn uoi00_p(n: usize, p: usize, periodic: bool) -> Result<CostedBe> {
    MeshParams::new(1, p, n)?;
    let m = remainder_qubits(p);
    // inner register: (rem m | flag1 | sys n)
    let q = n + 1 + m;
    let mut upos: Vec<usize> = (0..n).collect();
    upos.extend(n + 1..q);
    let modp = mod_p_unitary(n, p)?;
    let u = Operator::on_qubits(modp.op.clone(), upos, q);
    let x1 = Operator::on_qubits(Operator::dense(gate2::x()), vec![n], q);
    // C_{0^m}NOT from the remainder onto flag1: OR gate on (flag1, rem)
    let mut opos: Vec<usize> = (n + 1..q).collect();
    opos.push(n);
    let orr = or_gate(m);
    let c0 = Operator::on_qubits(orr.op, opos, q);
    let inner = Operator::product(&[u.adjoint(), c0, x1, u]);
    let flag1 = Operator::with_clean_workspace(inner, m);
    let mut cost = modp.cost.times(2) + multi_cnot_cost(m);
    let op = if periodic {
        Operator::pad_high(flag1, 1)
    } else {
        let mc = multi_cnot(n);
        cost += mc.cost;
        let mut mpos: Vec<usize> = (0..n).collect();
        mpos.push(n + 1);
        let mc = Operator::on_qubits(mc.op, mpos, n + 2);
        Operator::product(&[mc, Operator::pad_high(flag1, 1)])
    };
    Ok(CostedBe { be: BlockEncoding::new(op, 1.0, 2, n), cost })
}

/// A_jk = S^j A_00 S^-k for order p.
pub fn uoi_be_p(n: usize, p: usize, j: usize, k: usize, periodic: bool) -> Result<CostedBe> {
    if j > p || k > p {
        return Err(Error::Invalid("local index out of range".into()));
    }
    Ok(shifted(uoi00_p(n, p, periodic)?, n, j as i64, k as i64))
}

/// Dispatch on p: the one-ancilla circuit for p = 1, the two-flag circuit otherwise.
pub fn uoi_be(spec: InteractionSpec) -> Result<CostedBe> {
    if spec.p == 1 {
        uoi_be_p1(spec.n, spec.j, spec.k, spec.periodic)
    } else {
        uoi_be_p(spec.n, spec.p, spec.j, spec.k, spec.periodic)
    }
}

/// (1,1)-encoding of A_j = sum_{e < numel} |e p + j><e|: a comparator flags e >= numel, then
/// O_j = S^j U_{(.p)%N} maps the element index to the global node.
pub fn indicator_be(n: usize, p: usize, j: usize) -> Result<CostedBe> {
    let mp = MeshParams::new(1, p, n)?;
    if j > p {
        return Err(Error::Invalid("local index out of range".into()));
    }
    let cmp = comparator(n, mp.numel);
    let mul = mul_mod_unitary(n, p)?;
    let sh = shift_op(n, j as i64);
    let oj = Operator::product(&[sh.op, mul.op]);
    let u = Operator::product(&[Operator::pad_high(oj, 1), cmp.op]);
    Ok(CostedBe { be: BlockEncoding::new(u, 1.0, 1, n), cost: cmp.cost + mul.cost + sh.cost })
}
