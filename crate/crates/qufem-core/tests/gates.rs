use proptest::prelude::*;
use qufem_core::demos::linear_fit;
use qufem_core::gates::*;
use qufem_core::interaction::{uoi00_p, uoi00_p1};
use qufem_core::num::r;
use qufem_core::Operator;

fn is_permutation(op: &Operator) -> bool {
    let m = op.to_dense().unwrap();
    (0..m.rows).all(|i| {
        let row = m.row(i);
        let ones = row.iter().filter(|z| (**z - r(1.0)).norm() < 1e-15).count();
        let zeros = row.iter().filter(|z| z.norm() == 0.0).count();
        ones == 1 && zeros == m.cols - 1
    }) && (0..m.cols).all(|j| m.column(j).iter().filter(|z| z.norm() > 0.0).count() == 1)
}

#[test]
fn shift_matrix_n2() {
    let s = shift_op(2, 1).op.to_dense().unwrap();
    let want = [[0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]];
    for (i, row) in want.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(s[(i, j)], r(*v));
        }
    }
}

#[test]
fn zero_shift_is_free_identity() {
    let s = shift_op(4, 0);
    assert_eq!(s.cost, GateCost::ZERO);
    assert!(s.op.to_sparse_matrix().max_abs_diff(&qufem_core::SparseMat::identity(16)) == 0.0);
    assert_eq!(shift_op(3, 8).cost, GateCost::ZERO);
}

#[test]
fn multi_cnot_costs() {
    assert_eq!(multi_cnot(1).cost, GateCost::ZERO);
    assert_eq!(multi_cnot(2).cost, GateCost::toffoli(1));
    assert_eq!(multi_cnot(3).cost, GateCost { toffoli: 3, extra_workspace_qubits: 1 });
    let g = multi_cnot(3).op;
    for i in 0..16usize {
        let out = g.column(i);
        let want = if i & 7 == 7 { i ^ 8 } else { i };
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].0, want);
    }
}

#[test]
fn or_gate_examples() {
    let g = or_gate(2).op;
    // index = flag << 2 | input
    assert_eq!(g.column(0b000)[0].0, 0b100);
    assert_eq!(g.column(0b010)[0].0, 0b010);
    let twice = Operator::product(&[g.clone(), g]);
    for i in 0..8 {
        assert_eq!(twice.column(i)[0].0, i);
    }
}

#[test]
fn mod_p_examples() {
    let u = mod_p_unitary(4, 3).unwrap();
    // remainder register sits above the 4 input qubits
    assert_eq!(u.op.column(6)[0].0 >> 4, 0);
    assert_eq!(u.op.column(7)[0].0 >> 4, 1);
    assert_eq!(u.op.column(7)[0].0 & 15, 7);
    assert!(mod_p_unitary(4, 0).is_err());
}

#[test]
fn division_spot_value() {
    assert_eq!(division_cost(4, 2), 270);
    // U_%p charges the division and its uncomputation
    assert_eq!(mod_p_unitary(4, 3).unwrap().cost.toffoli, 540);
    // A_00 applies U_%p and its adjoint, plus C^m(NOT) on the remainder and C^n(NOT) on the input
    let a00 = uoi00_p(4, 3, false).unwrap();
    assert_eq!(a00.cost.toffoli, 2 * 540 + 1 + 5);
}

#[test]
fn mul_mod_examples() {
    let u = mul_mod_unitary(4, 3).unwrap();
    assert_eq!(u.op.column(2)[0].0, 6);
    let id = mul_mod_unitary(4, 1).unwrap();
    assert_eq!(id.cost, GateCost::ZERO);
    for e in 0..16 {
        assert_eq!(id.op.column(e)[0].0, e);
    }
    // S^j U_(.p) realizes IX(j, e) = j + e p
    let p = 3;
    for j in 0..=p {
        let oj = shift_op(4, j as i64).then_after(&mul_mod_unitary(4, p).unwrap());
        for e in 0..5 {
            assert_eq!(oj.op.column(e)[0].0, j + e * p);
        }
    }
}

#[test]
fn compression_examples() {
    let c = compression_ledger(4, 1);
    assert_eq!(c.ancillas, 6);
    for m in 1..=3usize {
        let p = (1 << m) - 1;
        let c = compression_ledger((p + 1) * (p + 1), 2);
        assert_eq!(c.ancillas, 4 * m + 3);
    }
    let one = compression_ledger(1, 3);
    assert_eq!(one.ancillas, one.uncompressed_ancillas);
    assert_eq!(one.cost, GateCost::ZERO);
}

#[test]
fn gate_operators_are_permutations() {
    assert!(is_permutation(&shift_op(3, 2).op));
    assert!(is_permutation(&multi_cnot(3).op));
    assert!(is_permutation(&or_gate(3).op));
    assert!(is_permutation(&comparator(3, 5).op));
    assert!(is_permutation(&mod_p_unitary(4, 3).unwrap().op));
    assert!(is_permutation(&mul_mod_unitary(4, 3).unwrap().op));
}

#[test]
fn a00_cost_is_affine_in_n() {
    let pts: Vec<(f64, f64)> = (3..=10).map(|n| (n as f64, uoi00_p1(n, false).cost.toffoli as f64)).collect();
    let (_, _, r2) = linear_fit(&pts);
    assert!(r2 > 0.99, "r2 = {r2}");
}

proptest! {
    #[test]
    fn shift_inverse_pair(n in 1usize..=6, k in 1i64..=3) {
        let a = shift_op(n, k);
        let b = shift_op(n, -k);
        let ab = a.then_after(&b);
        for i in 0..1usize << n {
            prop_assert_eq!(ab.op.column(i)[0].0, i);
        }
    }

    #[test]
    fn mod_p_matches_integer_arithmetic(n in 1usize..=8, pi in 0usize..5) {
        let p = [1usize, 2, 3, 5, 7][pi];
        let u = mod_p_unitary(n, p).unwrap();
        for i in 0..1usize << n {
            let out = u.op.column(i)[0].0;
            prop_assert_eq!(out & ((1 << n) - 1), i);
            prop_assert_eq!(out >> n, i % p);
        }
    }

    #[test]
    fn cost_additivity(a in 0u64..1000, b in 0u64..1000, n in 1usize..6) {
        let x = CostedOperator::new(shift_op(n, 1).op, GateCost::toffoli(a));
        let y = CostedOperator::new(shift_op(n, 2).op, GateCost::toffoli(b));
        prop_assert_eq!(x.then_after(&y).cost.toffoli, a + b);
    }
}
