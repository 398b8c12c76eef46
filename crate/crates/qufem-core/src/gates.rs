//! Circuit primitives realized as permutations, each carrying a closed-form Toffoli count.

use core::ops::{Add, AddAssign};

use crate::error::{Error, Result};
use crate::num::ceil_log2;
use crate::op::Operator;
use crate::qcore::BlockEncoding;

/// Toffoli count plus clean workspace qubits (restored to |0>, not post-selected).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCost {
    pub toffoli: u64,
    pub extra_workspace_qubits: usize,
}

impl GateCost {
    pub const ZERO: GateCost = GateCost { toffoli: 0, extra_workspace_qubits: 0 };

    pub fn toffoli(t: u64) -> Self {
        GateCost { toffoli: t, extra_workspace_qubits: 0 }
    }

    pub fn times(self, k: u64) -> Self {
        GateCost { toffoli: self.toffoli * k, extra_workspace_qubits: self.extra_workspace_qubits }
    }
}

/// Toffolis add; workspace is reused across sequential pieces, so it takes the max.
impl Add for GateCost {
    type Output = GateCost;
    fn add(self, o: GateCost) -> GateCost {
        GateCost {
            toffoli: self.toffoli + o.toffoli,
            extra_workspace_qubits: self.extra_workspace_qubits.max(o.extra_workspace_qubits),
        }
    }
}

impl AddAssign for GateCost {
    fn add_assign(&mut self, o: GateCost) {
        *self = *self + o;
    }
}

#[derive(Clone, Debug)]
pub struct CostedOperator {
    pub op: Operator,
    pub cost: GateCost,
}

impl CostedOperator {
    pub fn new(op: Operator, cost: GateCost) -> Self {
        CostedOperator { op, cost }
    }

    /// Sequential composition `self * later`; costs add.
    pub fn then_after(&self, later: &CostedOperator) -> CostedOperator {
        CostedOperator { op: Operator::product(&[self.op.clone(), later.op.clone()]), cost: self.cost + later.cost }
    }
}

/// A block-encoding with its gate cost.
#[derive(Clone, Debug)]
pub struct CostedBe {
    pub be: BlockEncoding,
    pub cost: GateCost,
}

/// Toffolis per unit of constant shift, per qubit.
pub const SHIFT_COST_PER_QUBIT: u64 = 2;

/// Reduce k modulo 2^n into (-2^(n-1), 2^(n-1)].
fn reduce_shift(n: usize, k: i64) -> i64 {
    if n == 0 {
        return 0;
    }
    let nn = 1i64 << n;
    let mut r = k.rem_euclid(nn);
    if r > nn / 2 {
        r -= nn;
    }
    r
}

/// Toffoli count charged for S^k: an incrementer (2n) for |k| = 1, a constant adder
/// (modeled as two incrementer-equivalents) otherwise.
pub fn shift_cost(n: usize, k: i64) -> u64 {
    let r = reduce_shift(n, k).unsigned_abs();
    SHIFT_COST_PER_QUBIT * n as u64 * r.min(2)
}

/// S^k |i> = |(i + k) mod 2^n>.
pub fn shift_op(n: usize, k: i64) -> CostedOperator {
    let r = reduce_shift(n, k);
    if r == 0 {
        return CostedOperator::new(Operator::identity(n), GateCost::ZERO);
    }
    let mask = (1usize << n) - 1;
    let up = r.rem_euclid(1i64 << n) as usize;
    let down = ((1usize << n) - up) & mask;
    let op = Operator::perm_fn(n, move |i| (i + up) & mask, move |i| (i + down) & mask);
    CostedOperator::new(op, GateCost::toffoli(shift_cost(n, k)))
}

/// Toffoli count of C^n(NOT): 0, 1, then 2n-3 with one clean workspace qubit.
pub fn multi_cnot_cost(n: usize) -> GateCost {
    match n {
        0 | 1 => GateCost::ZERO,
        2 => GateCost::toffoli(1),
        _ => GateCost { toffoli: 2 * n as u64 - 3, extra_workspace_qubits: 1 },
    }
}

/// C^n(NOT) on (target, controls): target is the top qubit, flipped iff all n controls are 1.
pub fn multi_cnot(n: usize) -> CostedOperator {
    assert!(n >= 1, "multi_cnot needs a control");
    let ones = (1usize << n) - 1;
    let flip = move |i: usize| if i & ones == ones { i ^ (1 << n) } else { i };
    CostedOperator::new(Operator::perm_fn(n + 1, flip, flip), multi_cnot_cost(n))
}

/// Flag (top qubit) flips iff all n inputs are 0: X-conjugated C^n(NOT).
pub fn or_gate(n: usize) -> CostedOperator {
    assert!(n >= 1);
    let ones = (1usize << n) - 1;
    let flip = move |i: usize| if i & ones == 0 { i ^ (1 << n) } else { i };
    CostedOperator::new(Operator::perm_fn(n + 1, flip, flip), multi_cnot_cost(n))
}

/// Flag (top qubit) flips iff the n-qubit input is >= `bound`.
pub fn comparator(n: usize, bound: usize) -> CostedOperator {
    let ones = (1usize << n) - 1;
    let flip = move |i: usize| if i & ones >= bound { i ^ (1 << n) } else { i };
    CostedOperator::new(Operator::perm_fn(n + 1, flip, flip), GateCost::toffoli(2 * n as u64))
}

/// Toffoli count of quantum division of an n-qubit dividend by an m-qubit divisor.
pub fn division_cost(n: usize, m: usize) -> u64 {
    let (n, m) = (n as i64, m as i64);
    let c = 46 * m * n - 46 * m * m + 48 * m - 2 * n - 2;
    c.max(0) as u64
}

/// Width of the remainder register for divisor p.
pub fn remainder_qubits(p: usize) -> usize {
    ceil_log2(p + 1)
}

/// U_{%p} on (remainder m, input n): |r>|i> -> |r xor (i mod p)>|i>. The division and its
/// uncomputation are both charged.
pub fn mod_p_unitary(n: usize, p: usize) -> Result<CostedOperator> {
    if p == 0 {
        return Err(Error::Invalid("divisor must be positive".into()));
    }
    let m = remainder_qubits(p);
    let lo = (1usize << n) - 1;
    let f = move |i: usize| i ^ (((i & lo) % p) << n);
    let op = Operator::perm_fn(n + m, f, f);
    let cost = GateCost { toffoli: 2 * division_cost(n, m), extra_workspace_qubits: n };
    Ok(CostedOperator::new(op, cost))
}

/// U_{(.p)%N}|e> = |(e p) mod 2^n>; a bijection for odd p.
pub fn mul_mod_unitary(n: usize, p: usize) -> Result<CostedOperator> {
    if p % 2 == 0 {
        return Err(Error::Invalid("multiplier must be odd to be invertible mod 2^n".into()));
    }
    let mask = (1usize << n) - 1;
    // inverse of p modulo 2^n by Newton iteration
    let mut inv = p;
    for _ in 0..6 {
        inv = inv.wrapping_mul(2usize.wrapping_sub(p.wrapping_mul(inv)));
    }
    let inv = inv & mask;
    let op = Operator::perm_fn(n, move |e| e.wrapping_mul(p) & mask, move |e| e.wrapping_mul(inv) & mask);
    let m = remainder_qubits(p);
    let cost = if p == 1 { GateCost::ZERO } else { GateCost::toffoli(division_cost(n, m) + (n * m) as u64) };
    Ok(CostedOperator::new(op, cost))
}

/// Ancilla accounting for the compression gadget shared by k controlled block-encodings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompressionLedger {
    pub select_qubits: usize,
    pub per_term_ancillas: usize,
    pub counter_qubits: usize,
    pub ancillas: usize,
    pub uncompressed_ancillas: usize,
    pub cost: GateCost,
}

/// Post-selected ancillas: log k select qubits, the shared per-term register and a
/// (log k + 1)-qubit counter; one term needs no gadget.
pub fn compression_ledger(k_terms: usize, per_term_ancillas: usize) -> CompressionLedger {
    if k_terms <= 1 {
        return CompressionLedger {
            select_qubits: 0,
            per_term_ancillas,
            counter_qubits: 0,
            ancillas: per_term_ancillas,
            uncompressed_ancillas: per_term_ancillas,
            cost: GateCost::ZERO,
        };
    }
    let b = ceil_log2(k_terms);
    let counter = b + 1;
    // one counter increment (about log k + 1 Toffolis) per controlled term
    let gadget = (k_terms * counter) as u64;
    CompressionLedger {
        select_qubits: b,
        per_term_ancillas,
        counter_qubits: counter,
        ancillas: b + per_term_ancillas + counter,
        uncompressed_ancillas: b + k_terms * per_term_ancillas,
        cost: GateCost::toffoli(gadget),
    }
}

/// Extra Toffolis to control a block-encoding on a b-qubit select value.
pub fn control_overhead(b: usize) -> GateCost {
    multi_cnot_cost(b + 1).times(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_wraps() {
        let s = shift_op(2, 1).op;
        assert_eq!(s.column(3), alloc::vec![(0, crate::num::ONE)]);
        assert_eq!(shift_cost(3, 0), 0);
        assert_eq!(shift_cost(3, 8), 0);
        assert_eq!(shift_cost(3, -1), 6);
    }

    #[test]
    fn mul_mod_inverse() {
        let u = mul_mod_unitary(5, 3).unwrap().op;
        for e in 0..32 {
            let col = u.column(e);
            assert_eq!(col[0].0, (3 * e) % 32);
            assert_eq!(u.adjoint().column(col[0].0)[0].0, e);
        }
    }
}
