use qufem_core::assembly::*;
use qufem_core::demos::linear_fit;
use qufem_core::elements::{elemental_arrays, tensor_elemental};
use qufem_core::interaction::uoi_reference;
use qufem_core::mesh::{Connectivity, MeshParams};
use qufem_core::num::r;
use qufem_core::qcore::extract_block;
use qufem_core::{DMat, SparseMat};

fn conn(p: usize, n: usize) -> (MeshParams, Connectivity) {
    let mp = MeshParams::new(1, p, n).unwrap();
    let c = Connectivity::lagrange_1d(&mp);
    (mp, c)
}

#[test]
fn hand_assembled_examples() {
    let (_, c) = conn(1, 2);
    let a = elemental_arrays(1);
    let k = classical_assemble(&c, &a.ke);
    let want = [[1.0, -1.0, 0.0, 0.0], [-1.0, 2.0, -1.0, 0.0], [0.0, -1.0, 2.0, -1.0], [0.0, 0.0, -1.0, 1.0]];
    for i in 0..4 {
        for j in 0..4 {
            assert!((k.get(i, j) - r(want[i][j])).norm() < 1e-14);
        }
    }
    let m = classical_assemble(&c, &a.me);
    let diag = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0];
    for i in 0..4 {
        assert!((m.get(i, i).re - diag[i]).abs() < 1e-14);
        if i + 1 < 4 {
            assert!((m.get(i, i + 1).re - 1.0 / 6.0).abs() < 1e-14);
        }
    }
    let single = Connectivity::from_table(vec![vec![0], vec![1]], 2);
    assert!(classical_assemble(&single, &a.ke).max_abs_diff(&SparseMat::from_dense(&a.ke)) < 1e-15);
}

#[test]
fn linear_subnormalizations() {
    let a = elemental_arrays(1);
    let k = assemble_global_1d(&a.ke, 1, 4).unwrap();
    let m = assemble_global_1d(&a.me, 1, 4).unwrap();
    assert!((k.be.alpha - 4.0).abs() < 1e-12);
    assert!((m.be.alpha - 1.0).abs() < 1e-12);
    assert_eq!(k.kind, ArrayKind::Stiffness);
    assert_eq!(m.kind, ArrayKind::Mass);
    assert_eq!(k.ledger.ancillas, 6);
    for arr in [&k, &m] {
        assert!((arr.be.alpha - arr.alpha_analytic).abs() < 1e-12);
    }
}

#[test]
fn quantum_equals_classical_1d() {
    for p in [1usize, 3] {
        for n in 2..=6usize {
            let Ok(_) = MeshParams::new(1, p, n) else { continue };
            let (_, c) = conn(p, n);
            let a = elemental_arrays(p);
            for elem in [&a.ke, &a.me] {
                let q = assemble_global_1d(elem, p, n).unwrap();
                let got = extract_block(&q.be);
                assert!(got.max_abs_diff(&classical_assemble(&c, elem)) < 1e-10, "p={p} n={n}");
                assert!(got.max_abs_diff(&got.adjoint()) < 1e-12);
                assert!((q.be.alpha - q.alpha_analytic).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn custom_elemental_matrix() {
    let e = DMat::from_real(2, 2, &[0.5, -2.0, 0.25, 1.0]);
    let q = assemble_global_1d(&e, 1, 3).unwrap();
    assert_eq!(q.kind, ArrayKind::Custom);
    let (_, c) = conn(1, 3);
    assert!(extract_block(&q.be).max_abs_diff(&classical_assemble(&c, &e)) < 1e-12);
    assert!((q.be.alpha - 3.75).abs() < 1e-12);
}

/// sum over local multi-index pairs of A^{e,2}_(j,k) (A_{j0 k0} (x) A_{j1 k1}), axis 1 on the high register.
fn interaction_sum_2d(c: &Connectivity, elem: &DMat, nen: usize) -> SparseMat {
    let mut out = SparseMat::zeros(c.numnp * c.numnp);
    for j in 0..nen * nen {
        for k in 0..nen * nen {
            let v = elem[(j, k)];
            if v.norm() == 0.0 {
                continue;
            }
            let hi = uoi_reference(c, j / nen, k / nen);
            let lo = uoi_reference(c, j % nen, k % nen);
            out = out.add(&hi.kron(&lo).scale(v));
        }
    }
    out
}

#[test]
fn quantum_equals_classical_2d() {
    for n in 2..=4usize {
        let (mp1, c) = conn(1, n);
        let (k2, m2) = assemble_global_dd(2, 1, n).unwrap();
        let a = elemental_arrays(1);
        let (ke2, me2) = tensor_elemental(1, 2);
        let mp = MeshParams::new(2, 1, n).unwrap();
        let kq = extract_block(&k2.be);
        let mq = extract_block(&m2.be);
        assert!(kq.max_abs_diff(&classical_assemble_tensor(&mp, &c, &ke2)) < 1e-10);
        assert!(mq.max_abs_diff(&classical_assemble_tensor(&mp, &c, &me2)) < 1e-10);
        if n <= 3 {
            assert!(kq.max_abs_diff(&interaction_sum_2d(&c, &ke2, mp1.nen)) < 1e-10);
            assert!(mq.max_abs_diff(&interaction_sum_2d(&c, &me2, mp1.nen)) < 1e-10);
        }
        let k1 = classical_assemble(&c, &a.ke);
        let m1 = classical_assemble(&c, &a.me);
        assert!(kq.max_abs_diff(&k1.kron(&m1).add(&m1.kron(&k1))) < 1e-12);
        assert!(mq.max_abs_diff(&m1.kron(&m1)) < 1e-12);
        assert!((k2.be.alpha - 8.0).abs() < 1e-12);
        assert!((m2.be.alpha - 1.0).abs() < 1e-12);
        assert!(kq.max_abs_diff(&kq.adjoint()) < 1e-12);
    }
}

#[test]
fn dd_reduces_to_1d() {
    let (k, m) = assemble_global_dd(1, 3, 4).unwrap();
    let a = elemental_arrays(3);
    let k1 = assemble_global_1d(&a.ke, 3, 4).unwrap();
    let m1 = assemble_global_1d(&a.me, 3, 4).unwrap();
    assert_eq!(extract_block(&k.be).max_abs_diff(&extract_block(&k1.be)), 0.0);
    assert_eq!(extract_block(&m.be).max_abs_diff(&extract_block(&m1.be)), 0.0);
}

#[test]
fn dd_subnormalization_identities() {
    let a = elemental_arrays(3);
    let (k, m) = assemble_global_dd(2, 3, 4).unwrap();
    assert!((k.be.alpha - 2.0 * a.ke_abs_sum * a.me_abs_sum).abs() < 1e-10);
    assert!((m.be.alpha - a.me_abs_sum * a.me_abs_sum).abs() < 1e-12);
    let (k3, _) = assemble_global_dd(3, 1, 2).unwrap();
    assert!((k3.be.alpha - 3.0 * 4.0).abs() < 1e-12);
}

#[test]
fn linear_cost_is_affine() {
    let a = elemental_arrays(1);
    let pts: Vec<(f64, f64)> =
        (3..=10).map(|n| (n as f64, assemble_global_1d(&a.ke, 1, n).unwrap().cost.toffoli as f64)).collect();
    let (slope, _, r2) = linear_fit(&pts);
    assert!(slope > 0.0);
    assert!(r2 > 0.99, "r2 = {r2}");
}

#[test]
fn order_p_cost_tracks_n_m_nen_squared() {
    let mut ratios = Vec::new();
    for (p, ns) in [(1usize, vec![4usize, 6, 8, 10]), (3, vec![4, 6, 8, 10]), (7, vec![6, 9])] {
        let a = elemental_arrays(p);
        let m = qufem_core::gates::remainder_qubits(p);
        for n in ns {
            let cost = assemble_global_1d(&a.me, p, n).unwrap().cost.toffoli as f64;
            ratios.push(cost / (n * m * (p + 1) * (p + 1)) as f64);
        }
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo < 100.0, "ratios {ratios:?}");
}
