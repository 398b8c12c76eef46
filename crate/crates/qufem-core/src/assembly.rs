//! Global arrays from constant elemental contributions: the classical assembler and the
//! unit-of-interaction LCU in one and d dimensions.

use alloc::vec;
use alloc::vec::Vec;

use crate::elements::{elemental_arrays, elemental_prep_oracles};
use crate::error::Result;
use crate::gates::{compression_ledger, control_overhead, CompressionLedger, GateCost};
use crate::interaction::{uoi_be, InteractionSpec};
use crate::mesh::{Connectivity, MeshParams};
use crate::num::{ceil_log2, powi, r, DMat, C64};
use crate::qcore::{be_lcu, be_lcu_real, be_tensor_chain, make_prep_pair, BlockEncoding};
use crate::sparse::SparseMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrayKind {
    Stiffness,
    Mass,
    Custom,
}

#[derive(Clone, Debug)]
pub struct AssembledArray {
    pub be: BlockEncoding,
    pub alpha_analytic: f64,
    pub kind: ArrayKind,
    pub cost: GateCost,
    /// Post-selected ancillas with the compression gadget (the simulated circuit uses a
    /// plain LCU and may carry more).
    pub ledger: CompressionLedger,
}

/// sum_e sum_jk A^e_jk |IX(j, e)><IX(k, e)|.
pub fn classical_assemble(conn: &Connectivity, elem: &DMat) -> SparseMat {
    let mut t = Vec::with_capacity(conn.numel * conn.nen * conn.nen);
    for e in 0..conn.numel {
        for j in 0..conn.nen {
            for k in 0..conn.nen {
                let v = elem[(j, k)];
                if v != r(0.0) {
                    t.push((conn.get(j, e), conn.get(k, e), v));
                }
            }
        }
    }
    SparseMat::from_triplets(conn.numnp, &t)
}

/// Classical assembly on the numnp^d tensor grid; `elem` is indexed by local multi-indices
/// with axis 0 least significant (the layout of `tensor_elemental`).
pub fn classical_assemble_tensor(mp: &MeshParams, conn: &Connectivity, elem: &DMat) -> SparseMat {
    let d = mp.d;
    let nen = conn.nen;
    let nloc = nen.pow(d as u32);
    assert_eq!(elem.rows, nloc);
    let nel = conn.numel.pow(d as u32);
    let global = |e: usize, loc: usize| -> usize {
        let (mut e, mut loc) = (e, loc);
        let mut g = 0;
        for i in 0..d {
            let (ei, li) = (e % conn.numel, loc % nen);
            e /= conn.numel;
            loc /= nen;
            g |= conn.get(li, ei) << (i * mp.n);
        }
        g
    };
    let mut t = Vec::with_capacity(nel * nloc * nloc);
    for e in 0..nel {
        for a in 0..nloc {
            for b in 0..nloc {
                let v = elem[(a, b)];
                if v != r(0.0) {
                    t.push((global(e, a), global(e, b), v));
                }
            }
        }
    }
    SparseMat::from_triplets(mp.total_nodes(), &t)
}

/// LCU over the (p+1)^2 units of interaction with weights A^e_jk. For p = 1 and the
/// standard K^e or M^e the explicit prepare circuits are used.
pub fn assemble_global_1d(elem: &DMat, p: usize, n: usize) -> Result<AssembledArray> {
    let mp = MeshParams::new(1, p, n)?;
    let nen = mp.nen;
    let mut terms = Vec::with_capacity(nen * nen);
    let mut cost = GateCost::ZERO;
    let b = ceil_log2(nen * nen);
    for j in 0..nen {
        for k in 0..nen {
            let u = uoi_be(InteractionSpec { j, k, p, n, periodic: false })?;
            cost += u.cost + control_overhead(b);
            terms.push(u.be);
        }
    }
    let y: Vec<C64> = elem.data.clone();
    let arrays = elemental_arrays(p);
    let mut kind = ArrayKind::Custom;
    let pair = if elem.max_abs_diff(&arrays.ke) < 1e-14 {
        kind = ArrayKind::Stiffness;
        elemental_prep_oracles(&arrays)?.0
    } else if elem.max_abs_diff(&arrays.me) < 1e-14 {
        kind = ArrayKind::Mass;
        elemental_prep_oracles(&arrays)?.1
    } else {
        make_prep_pair(&y)?
    };
    let be = be_lcu(&terms, &pair)?;
    let per_term = terms.iter().map(|t| t.ancillas).max().unwrap_or(0);
    let ledger = compression_ledger(nen * nen, per_term);
    cost += ledger.cost;
    Ok(AssembledArray { be, alpha_analytic: elem.abs_sum(), kind, cost, ledger })
}

/// (K^(d), M^(d)): M^(d) is the d-fold tensor of the 1D mass encoding; K^(d) is the LCU of
/// the d tensor terms carrying K in one slot.
pub fn assemble_global_dd(d: usize, p: usize, n: usize) -> Result<(AssembledArray, AssembledArray)> {
    let arrays = elemental_arrays(p);
    let k1 = assemble_global_1d(&arrays.ke, p, n)?;
    let m1 = assemble_global_1d(&arrays.me, p, n)?;
    if d == 1 {
        return Ok((k1, m1));
    }
    let mass = AssembledArray {
        be: be_tensor_chain(&vec![m1.be.clone(); d]),
        alpha_analytic: powi(m1.alpha_analytic, d as i32),
        kind: ArrayKind::Mass,
        cost: m1.cost.times(d as u64),
        ledger: stacked_ledger(&m1.ledger, d),
    };
    let mut terms = Vec::with_capacity(d);
    for slot in 0..d {
        let chain: Vec<BlockEncoding> =
            (0..d).map(|s| if s == slot { k1.be.clone() } else { m1.be.clone() }).collect();
        terms.push(be_tensor_chain(&chain));
    }
    let be = be_lcu_real(&terms, &vec![1.0; d])?;
    let per_term = k1.cost + m1.cost.times(d as u64 - 1);
    let cost = (per_term + control_overhead(ceil_log2(d))).times(d as u64);
    let mut ledger = stacked_ledger(&k1.ledger, d);
    ledger.select_qubits += ceil_log2(d);
    ledger.ancillas += ceil_log2(d);
    let stiff = AssembledArray {
        be,
        alpha_analytic: d as f64 * k1.alpha_analytic * powi(m1.alpha_analytic, d as i32 - 1),
        kind: ArrayKind::Stiffness,
        cost,
        ledger,
    };
    Ok((stiff, mass))
}

fn stacked_ledger(l: &CompressionLedger, d: usize) -> CompressionLedger {
    CompressionLedger {
        select_qubits: l.select_qubits * d,
        per_term_ancillas: l.per_term_ancillas * d,
        counter_qubits: l.counter_qubits * d,
        ancillas: l.ancillas * d,
        uncompressed_ancillas: l.uncompressed_ancillas * d,
        cost: l.cost.times(d as u64),
    }
}
