use proptest::prelude::*;
use qufem_core::assembly::assemble_global_1d;
use qufem_core::constraints::*;
use qufem_core::demos::classical_dirichlet_solve;
use qufem_core::elements::elemental_arrays;
use qufem_core::mesh::DomainMask;
use qufem_core::num::{c, r};
use qufem_core::qcore::{be_diagonal, be_lcu_real, be_product, be_sparse1, extract_block, BlockEncoding};
use qufem_core::quad::poly::PolySpec;
use qufem_core::solver::{extract_system, solve_block_system, solve_encoded};
use qufem_core::{SparseMat, C64};

fn unit(i: usize, j: usize) -> SparseMat {
    SparseMat::from_triplets(2, &[(i, j, r(1.0))])
}

fn diag_be(v: &[f64]) -> BlockEncoding {
    be_diagonal(&v.iter().map(|&x| r(x)).collect::<Vec<_>>(), None).unwrap()
}

/// A generic non-Hermitian block: diagonal times a weighted permutation.
fn random_block(n: usize, seed: u64) -> BlockEncoding {
    let dim = 1usize << n;
    let mut s = seed;
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (s >> 11) as f64 / (1u64 << 53) as f64
    };
    let d: Vec<f64> = (0..dim).map(|_| 2.0 * next() - 1.0).collect();
    let mut perm: Vec<usize> = (0..dim).collect();
    for i in (1..dim).rev() {
        perm.swap(i, (next() * (i + 1) as f64) as usize % (i + 1));
    }
    let amps: Vec<C64> = (0..dim).map(|_| c(next() - 0.5, next() - 0.5)).collect();
    be_product(&diag_be(&d), &be_sparse1(&perm, &amps).unwrap()).unwrap()
}

fn stiffness(n: usize) -> BlockEncoding {
    // 1D Poisson operator h^-1 K
    let k = assemble_global_1d(&elemental_arrays(1).ke, 1, n).unwrap().be;
    let h = 1.0 / ((1 << n) - 1) as f64;
    be_lcu_real(&[k], &[1.0 / h]).unwrap()
}

#[test]
fn single_block_entries() {
    for seed in 0..4u64 {
        let a = random_block(2, seed);
        let ea = extract_block(&a);
        for i in 0..2 {
            for j in 0..2 {
                let e = be_block_entry(&a, i, j).unwrap();
                assert_eq!(e.ancillas, a.ancillas + 1);
                assert_eq!(e.system_qubits, a.system_qubits + 1);
                assert!((e.alpha - a.alpha).abs() < 1e-15);
                let want = unit(i, j).kron(&ea);
                assert!(extract_block(&e).max_abs_diff(&want) < 1e-12, "i={i} j={j}");
            }
        }
    }
}

#[test]
fn block_diagonal_partition() {
    let a = random_block(3, 7);
    let be = block_encode_partitioned(&[[Some(a.clone()), None], [None, Some(a.clone())]]).unwrap();
    let want = SparseMat::identity(2).kron(&extract_block(&a));
    assert!(extract_block(&be).max_abs_diff(&want) < 1e-12);
}

#[test]
fn off_diagonal_partition_is_hermitian() {
    let b = random_block(2, 11);
    let eb = extract_block(&b);
    let be = block_encode_partitioned(&[[None, Some(b.clone())], [Some(b.adjoint()), None]]).unwrap();
    let got = extract_block(&be);
    let want = unit(0, 1).kron(&eb).add(&unit(1, 0).kron(&eb.adjoint()));
    assert!(got.max_abs_diff(&want) < 1e-12);
    assert!(got.hermiticity_defect() < 1e-12);
}

#[test]
fn partition_subnormalizations() {
    let p = |v: f64| diag_be(&[v, -v, v, v]);
    let four = block_encode_partitioned(&[[Some(p(1.0)), Some(p(1.0))], [Some(p(1.0)), Some(p(1.0))]]).unwrap();
    assert!((four.alpha - 4.0).abs() < 1e-12);
    assert_eq!(four.ancillas, p(1.0).ancillas + 3);
    let mixed = block_encode_partitioned(&[[Some(p(2.0)), Some(p(0.5))], [Some(p(0.5)), None]]).unwrap();
    assert!((mixed.alpha - 3.0).abs() < 1e-12);

    let a = diag_be(&[1.0, -2.0, 0.5, 3.0]);
    let b = random_block(2, 3);
    let s = be_saddle(&a, &b).unwrap();
    assert!((s.alpha - (a.alpha + b.alpha)).abs() < 1e-12);
    let want = unit(0, 0).kron(&extract_block(&a)).add(&unit(0, 1).kron(&extract_block(&b))).add(&unit(1, 0).kron(&extract_block(&b).adjoint()));
    assert!(extract_block(&s).max_abs_diff(&want) < 1e-12);
    let general = block_encode_partitioned(&[[Some(a.clone()), Some(b.clone())], [Some(b.adjoint()), None]]).unwrap();
    assert!(s.alpha < general.alpha);
}

#[test]
fn partitioned_rhs_examples() {
    let f: Vec<C64> = [0.5, -0.5, 0.5, 0.5].iter().map(|&x| r(x)).collect();
    let g: Vec<C64> = vec![r(0.0), c(0.0, 0.6), r(0.8), r(0.0)];
    let same = partitioned_rhs(&f, &f).unwrap();
    let s = 1.0 / 2f64.sqrt();
    for j in 0..4 {
        assert!((same[j] - f[j] * s).norm() < 1e-14);
        assert!((same[4 + j] - f[j] * s).norm() < 1e-14);
    }
    let mixed = partitioned_rhs(&f, &g).unwrap();
    for j in 0..4 {
        assert!((mixed[j] - f[j] * s).norm() < 1e-14);
        assert!((mixed[4 + j] - g[j] * s).norm() < 1e-14);
    }
    let zero = vec![r(0.0); 4];
    let only = partitioned_rhs_weighted(1.0, &f, 0.0, &zero).unwrap();
    for j in 0..4 {
        assert!((only[j] - f[j]).norm() < 1e-14);
        assert!(only[4 + j].norm() < 1e-14);
    }
    let w = partitioned_rhs_weighted(3.0, &f, 4.0, &g).unwrap();
    assert!((w[2] - f[2] * 0.6).norm() < 1e-14 && (w[6] - g[2] * 0.8).norm() < 1e-14);
    let bad: Vec<C64> = vec![r(1.0); 4];
    assert!(partitioned_rhs(&f, &bad).is_err());
}

fn kron_block_system(l: &SparseMat, mask: &DomainMask) -> SparseMat {
    let pint: Vec<C64> = mask.interior_indicator().iter().map(|&x| r(x)).collect();
    let pbd: Vec<C64> = pint.iter().map(|z| r(1.0) - z).collect();
    let (pi, pb) = (SparseMat::from_diag(&pint), SparseMat::from_diag(&pbd));
    unit(0, 0).kron(l).add(&unit(0, 1).kron(&pb)).add(&unit(1, 0).kron(&pb)).add(&unit(1, 1).kron(&pi))
}

#[test]
fn lagrange_system_structure() {
    let n = 3;
    let l = stiffness(n);
    let mask = DomainMask::full(1, n);
    let f = vec![1.0; 8];
    let sys = lagrange_system(&l, &mask, &f, &[0.0; 8]).unwrap();
    let m = extract_system(&sys).unwrap();
    assert_eq!(m.dim, 16);
    assert!(m.max_abs_diff(&kron_block_system(&extract_block(&l), &mask)) < 1e-10);
    assert!(m.hermiticity_defect() < 1e-12);
}

#[test]
fn unconstrained_system_decouples() {
    let n = 3;
    // L = h^-1 K + I is nonsingular without constraints
    let k = stiffness(n);
    let l = be_lcu_real(&[k, BlockEncoding::identity(n)], &[1.0, 1.0]).unwrap();
    let mask = DomainMask::unconstrained(1, n);
    let f: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
    let sys = lagrange_system(&l, &mask, &f, &[0.0; 8]).unwrap();
    let rep = solve_block_system(&sys).unwrap();
    let direct = solve_encoded(&l, &f).unwrap();
    for i in 0..8 {
        assert!((rep.u[i] - direct.u[i]).abs() < 1e-10);
        assert!(rep.lambda[i].abs() < 1e-12);
    }
}

#[test]
fn homogeneous_poisson_matches_row_replacement() {
    let n = 4;
    let l = stiffness(n);
    let mask = DomainMask::full(1, n);
    let h = 1.0 / 15.0;
    let f: Vec<f64> = (0..16).map(|i| if i == 0 || i == 15 { h / 2.0 } else { h }).collect();
    let ubar = vec![0.0; 16];
    let rep = solve_block_system(&lagrange_system(&l, &mask, &f, &ubar).unwrap()).unwrap();
    let classical = classical_dirichlet_solve(&extract_block(&l), &f, &mask, &ubar).unwrap();
    for i in 0..16 {
        assert!((rep.u[i] - classical[i]).abs() < 1e-9);
    }
    // -u'' = 1 with zero ends is x(1 - x)/2, exact at the nodes for linear elements
    for (i, u) in rep.u.iter().enumerate() {
        let x = i as f64 * h;
        assert!((u - x * (1.0 - x) / 2.0).abs() < 1e-9);
    }
}

#[test]
fn projector_with_no_constraints_is_identity_map() {
    let n = 3;
    let l = stiffness(n);
    let mask = DomainMask::unconstrained(1, n);
    let b: Vec<f64> = (0..8).map(|i| i as f64).collect();
    let (ld, bd) = projector_dirichlet(&l, &mask, &b, &[0.0; 8]).unwrap();
    assert!(extract_block(&ld).max_abs_diff(&extract_block(&l)) < 1e-12);
    for i in 0..8 {
        assert!((bd[i] - b[i]).abs() < 1e-12);
    }
}

#[test]
fn projector_boundary_rows_are_identity() {
    let n = 3;
    let l = stiffness(n);
    let mask = DomainMask::full(1, n);
    let (ld, _) = projector_dirichlet(&l, &mask, &[1.0; 8], &[0.0; 8]).unwrap();
    let m = extract_block(&ld);
    for &row in &[0usize, 7] {
        for j in 0..8 {
            let want = if j == row { 1.0 } else { 0.0 };
            assert!((m.get(row, j) - r(want)).norm() < 1e-12);
            assert!((m.get(j, row) - r(want)).norm() < 1e-12);
        }
    }
}

#[test]
fn methods_agree_with_nonhomogeneous_data() {
    let n = 4;
    let l = stiffness(n);
    let mask = DomainMask::full(1, n);
    let f: Vec<f64> = (0..16).map(|i| (i as f64 / 15.0).powi(2) / 15.0).collect();
    let mut ubar = vec![0.0; 16];
    ubar[0] = 0.75;
    ubar[15] = -1.25;
    // interior entries are ignored
    ubar[5] = 9.0;
    let lag = solve_block_system(&lagrange_system(&l, &mask, &f, &ubar).unwrap()).unwrap();
    let (ld, bd) = projector_dirichlet(&l, &mask, &f, &ubar).unwrap();
    let proj = solve_encoded(&ld, &bd).unwrap();
    for i in 0..16 {
        assert!((lag.u[i] - proj.u[i]).abs() < 1e-8);
    }
    assert!((lag.u[0] - 0.75).abs() < 1e-9 && (lag.u[15] + 1.25).abs() < 1e-9);
    assert!((proj.u[0] - 0.75).abs() < 1e-9 && (proj.u[15] + 1.25).abs() < 1e-9);
    let sol = BlockSolution::from_stacked(&lag.x);
    assert!(sol.constraint_defect(&mask, &ubar) < 1e-9);
    assert!((sol.u_norm - lag.u.iter().map(|x| x * x).sum::<f64>().sqrt()).abs() < 1e-12);
    // interior multipliers are pinned to zero
    for i in 1..15 {
        assert!(lag.lambda[i].abs() < 1e-10);
    }
}

#[test]
fn dirichlet_state_examples() {
    let mask = DomainMask::full(1, 3);
    let zero = dirichlet_state(&mask, &DirichletData::Values(vec![0.0; 8])).unwrap();
    assert!(zero.iter().all(|&v| v == 0.0));
    let zp = dirichlet_state(&mask, &DirichletData::Poly(PolySpec::univariate(&[0.0], (0.0, 1.0)))).unwrap();
    assert!(zp.iter().all(|&v| v == 0.0));
    let ones = dirichlet_state(&mask, &DirichletData::Values(vec![1.0; 8])).unwrap();
    assert_eq!(ones, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let onep = dirichlet_state(&mask, &DirichletData::Poly(PolySpec::univariate(&[1.0], (0.0, 1.0)))).unwrap();
    for (a, b) in onep.iter().zip(&ones) {
        assert!((a - b).abs() < 1e-12);
    }
    let xs: Vec<f64> = (0..8).map(|i| i as f64 / 7.0).collect();
    let direct = dirichlet_state(&mask, &DirichletData::Values(xs)).unwrap();
    let poly = dirichlet_state(&mask, &DirichletData::Poly(PolySpec::univariate(&[0.0, 1.0], (0.0, 1.0)))).unwrap();
    for (a, b) in direct.iter().zip(&poly) {
        assert!((a - b).abs() < 1e-10);
    }
    let m2 = DomainMask::full(2, 2);
    let g = PolySpec::new(2, vec![(vec![1, 0], 1.0), (vec![0, 2], 0.5)], PolySpec::unit_box(2)).unwrap();
    let poly2 = dirichlet_state(&m2, &DirichletData::Poly(g.clone())).unwrap();
    for v in 0..16usize {
        let x = [(v & 3) as f64 / 3.0, (v >> 2) as f64 / 3.0];
        let want = if m2.fixed[v] { g.eval(&x) } else { 0.0 };
        assert!((poly2[v] - want).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn block_extraction_matches_kronecker(n in 1usize..=5, vals in proptest::collection::vec(0.5f64..3.0, 32), bits in proptest::collection::vec(any::<bool>(), 32)) {
        let dim = 1usize << n;
        let l = diag_be(&vals[..dim]);
        let mut mask = DomainMask::unconstrained(1, n);
        mask.fixed = bits[..dim].to_vec();
        let f = vec![1.0; dim];
        let sys = lagrange_system(&l, &mask, &f, &vec![0.0; dim]).unwrap();
        let got = extract_system(&sys).unwrap();
        prop_assert!(got.max_abs_diff(&kron_block_system(&extract_block(&l), &mask)) < 1e-10);
    }

    #[test]
    fn constraints_hold_for_both_methods(a in -2.0f64..2.0, b in -2.0f64..2.0, s in 0.0f64..3.0) {
        let n = 3;
        let l = stiffness(n);
        let mask = DomainMask::full(1, n);
        let f = vec![s / 7.0; 8];
        let mut ubar = vec![0.0; 8];
        ubar[0] = a;
        ubar[7] = b;
        prop_assume!(a.abs() + b.abs() + s > 1e-6);
        let lag = solve_block_system(&lagrange_system(&l, &mask, &f, &ubar).unwrap()).unwrap();
        let (ld, bd) = projector_dirichlet(&l, &mask, &f, &ubar).unwrap();
        let proj = solve_encoded(&ld, &bd).unwrap();
        prop_assert!((lag.u[0] - a).abs() < 1e-9 && (lag.u[7] - b).abs() < 1e-9);
        prop_assert!((proj.u[0] - a).abs() < 1e-9 && (proj.u[7] - b).abs() < 1e-9);
        for i in 0..8 {
            prop_assert!((lag.u[i] - proj.u[i]).abs() < 1e-8);
        }
    }
}
