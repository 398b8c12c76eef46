use approx::assert_relative_eq;
use proptest::prelude::*;

use qufem_core::constraints::DirichletData;
use qufem_core::demos::*;
use qufem_core::error::Error;
use qufem_core::linalg::{condition_number, rcm_order, singular_extremes, solve, BandedLu, RealMat};
use qufem_core::mesh::DomainMask;
use qufem_core::num::r;
use qufem_core::qcore::{be_diagonal, be_lcu_real, BlockEncoding};
use qufem_core::quad::poly::PolySpec;
use qufem_core::solver::*;
use qufem_core::sparse::SparseMat;

fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(row, &v)| row.iter().copied().chain([v]).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))?;
        if m[p][c].abs() < 1e-14 {
            return None;
        }
        m.swap(c, p);
        for i in 0..n {
            if i != c {
                let f = m[i][c] / m[c][c];
                for k in c..=n {
                    m[i][k] -= f * m[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

fn to_real(a: &[Vec<f64>]) -> RealMat {
    let triplets = a
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().filter(|t| *t.1 != 0.0).map(move |(j, &v)| (i, j, v)))
        .collect();
    RealMat { dim: a.len(), triplets }
}

fn tridiag(n: usize) -> RealMat {
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, 2.0));
        if i + 1 < n {
            t.push((i, i + 1, -1.0));
            t.push((i + 1, i, -1.0));
        }
    }
    RealMat { dim: n, triplets: t }
}

#[test]
fn extract_identity_and_stiffness() {
    let id = extract_system(&BlockEncoding::identity(3)).unwrap();
    assert!(id.max_abs_diff(&SparseMat::identity(8)) < 1e-14);

    let coef = PDECoefficients::poisson(Coefficient::Const(0.0), 8);
    let l = extract_system(&scaled_operator(&coef, 1, 1, 3).unwrap()).unwrap();
    let h = 1.0 / 7.0;
    for i in 0..8 {
        let diag = if i == 0 || i == 7 { 1.0 } else { 2.0 };
        assert_relative_eq!(l.get(i, i).re, diag / h, max_relative = 1e-12);
        if i + 1 < 8 {
            assert_relative_eq!(l.get(i, i + 1).re, -1.0 / h, max_relative = 1e-12);
        }
    }
}

#[test]
fn extract_rejects_large_systems() {
    let big = be_diagonal(&vec![r(0.5); 1 << 14], None).unwrap();
    assert_eq!(extract_system(&big).unwrap_err(), Error::TooLarge(1 << 14));
}

#[test]
fn identity_system_returns_rhs() {
    let be = be_lcu_real(&[BlockEncoding::identity(2)], &[1.0]).unwrap();
    let f = [0.5, -1.0, 2.0, 0.25];
    let rep = solve_encoded(&be, &f).unwrap();
    for (u, v) in rep.u.iter().zip(f) {
        assert!((u - v).abs() < 1e-14);
    }
    assert_relative_eq!(rep.p_qlsp, (rep.beta / rep.alpha).powi(2), max_relative = 1e-12);
    assert_relative_eq!(rep.beta, 1.0, max_relative = 1e-10);
    assert!(rep.norm_recovery_error() < 1e-12);
}

#[test]
fn scaled_system_success_probability() {
    // L = diag(1, 2, 4, 8) encoded with alpha = 8.
    let d: Vec<_> = [1.0, 2.0, 4.0, 8.0].iter().map(|&v| r(v)).collect();
    let be = be_diagonal(&d, Some(8.0)).unwrap();
    let f = [1.0, 1.0, 1.0, 1.0];
    let rep = solve_encoded(&be, &f).unwrap();
    let xhat2: f64 = [1.0, 0.25, 1.0 / 16.0, 1.0 / 64.0].iter().sum::<f64>() / 4.0;
    assert_relative_eq!(rep.p_qlsp, xhat2 / 64.0, max_relative = 1e-10);
    assert_relative_eq!(rep.kappa, 8.0, max_relative = 1e-8);
    assert!(rep.norm_recovery_error() < 1e-9);
}

#[test]
fn qlsp_rejects_bad_inputs() {
    let l = SparseMat::identity(4);
    assert_eq!(solve_qlsp(&l, 1.0, &[0.0; 4], None).unwrap_err(), Error::ZeroNorm);
    assert!(matches!(solve_qlsp(&l, 1.0, &[1.0; 3], None), Err(Error::DimensionMismatch { .. })));
    assert!(matches!(solve_qlsp(&l, 1.0, &[1.0; 4], Some(2.0)), Err(Error::Invalid(_))));
    let ok = solve_qlsp(&l, 1.0, &[1.0; 4], Some(0.5)).unwrap();
    assert!(ok.norm_recovery_error() < 1e-12);
}

#[test]
fn singular_matrix_detected() {
    let m = RealMat { dim: 3, triplets: vec![(0, 0, 1.0), (1, 1, 1.0), (0, 2, 1.0)] };
    assert_eq!(solve(&m, &[1.0, 1.0, 1.0]).unwrap_err(), Error::Singular);
}

#[test]
fn rcm_reduces_bandwidth_of_scrambled_chain() {
    let n = 64;
    let scramble = |i: usize| (i * 37) % n;
    let t: Vec<_> = tridiag(n).triplets.iter().map(|&(i, j, v)| (scramble(i), scramble(j), v)).collect();
    let m = RealMat { dim: n, triplets: t };
    let perm = rcm_order(&m);
    let mut sorted = perm.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..n).collect::<Vec<_>>());
    let lu = BandedLu::factor(&m).unwrap();
    let (kl, ku) = lu.bandwidth();
    assert!(kl <= 2 && ku <= 4, "bandwidth ({kl}, {ku})");
}

#[test]
fn extreme_singular_values_of_laplacian() {
    let n = 31;
    let (smax, smin) = singular_extremes(&tridiag(n)).unwrap();
    let pi = std::f64::consts::PI;
    let lam = |k: usize| 2.0 - 2.0 * (k as f64 * pi / (n + 1) as f64).cos();
    assert_relative_eq!(smax, lam(n), max_relative = 1e-9);
    assert_relative_eq!(smin, lam(1), max_relative = 1e-9);
    assert_relative_eq!(condition_number(&tridiag(n)).unwrap(), lam(n) / lam(1), max_relative = 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn banded_lu_matches_dense(n in 2usize..12, seed in prop::collection::vec(-1.0f64..1.0, 144), rhs in prop::collection::vec(-1.0f64..1.0, 12)) {
        let a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| {
                let v = seed[i * 12 + j];
                if v.abs() < 0.4 { 0.0 } else { v }
            } + if i == j { 0.05 } else { 0.0 }).collect())
            .collect();
        let b = &rhs[..n];
        let Some(want) = dense_solve(&a, b) else { return Ok(()); };
        let scale = want.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        match solve(&to_real(&a), b) {
            Ok(got) => {
                for (g, w) in got.iter().zip(&want) {
                    prop_assert!((g - w).abs() <= 1e-8 * scale, "{g} vs {w}");
                }
            }
            Err(Error::Singular) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn residual_and_norm_recovery_on_laplacian(n in 2usize..5, f in prop::collection::vec(-1.0f64..1.0, 16)) {
        let dim = 1usize << n;
        prop_assume!(f[..dim].iter().any(|v| v.abs() > 1e-3));
        let coef = PDECoefficients {
            reaction: Coefficient::Const(1.0),
            ..PDECoefficients::poisson(Coefficient::Const(0.0), dim)
        };
        let be = scaled_operator(&coef, 1, 1, n).unwrap();
        let rep = solve_encoded(&be, &f[..dim]).unwrap();
        prop_assert!(rep.residual <= 1e-9 * rep.rhs_norm);
        prop_assert!(rep.norm_recovery_error() <= 1e-9);
        prop_assert!(rep.p_qlsp > 0.0 && rep.p_qlsp <= 1.0 + 1e-12);
    }
}

#[test]
fn coercivity_checks() {
    let mut coef = PDECoefficients::poisson(Coefficient::Const(1.0), 16);
    coef.diffusivity = Coefficient::Const(0.0);
    assert!(matches!(coef.check_coercive(2), Err(Error::Invalid(_))));
    coef.diffusivity = Coefficient::Poly(PolySpec::univariate(&[-0.5, 1.0], (0.0, 1.0)));
    assert!(coef.check_coercive(1).is_err());
    coef.diffusivity = Coefficient::Const(1.0);
    coef.reaction = Coefficient::Const(-1.0);
    assert!(scaled_operator(&coef, 1, 1, 2).is_err());
}

#[test]
fn observable_examples() {
    let one = PolySpec::constant(2, 1.0, PolySpec::unit_box(2));
    let u = vec![1.0; 64];
    assert_relative_eq!(observable(&one, &u, 2, 1, 3).unwrap(), 1.0, max_relative = 1e-12);

    // r = x: int x dx over [0, 1] is 1/2, exact for the linear interpolant.
    let x = PolySpec::univariate(&[0.0, 1.0], (0.0, 1.0));
    assert_relative_eq!(observable(&x, &vec![1.0; 16], 1, 1, 4).unwrap(), 0.5, max_relative = 1e-12);

    let w: Vec<f64> = (0..64).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
    assert!(observable_nodal(&w, &w, 2, 1, 3).unwrap() >= 0.0);
}

#[test]
fn cal_mask_shape() {
    for n in 3..=6 {
        let m = cal_mask(n);
        assert!(m.active.iter().any(|&a| a));
        assert!(m.active.iter().any(|&a| !a));
        let rows = mask_bitmap(&m);
        let back = DomainMask::from_bitmap(n, &rows.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
        assert_eq!(back.active, m.active);
        assert_eq!(back.fixed, m.fixed);
    }
    // Strokes are under two grid spacings wide until n = 5.
    assert!(cal_mask(4).fixed.iter().zip(&cal_mask(4).active).all(|(&f, &a)| !a || f));
    assert!(cal_mask(5).fixed.iter().zip(&cal_mask(5).active).any(|(&f, &a)| a && !f));
}

#[test]
fn cal_demo_small() {
    // An L-shaped region stands in for the letters on the 16 x 16 grid.
    let active: Vec<bool> = (0..256).map(|v| {
        let (x, y) = (v & 15, v >> 4);
        (2..=13).contains(&x) && (2..=13).contains(&y) && !(x > 7 && y > 7)
    }).collect();
    let mask = DomainMask::from_active(2, 4, active);
    let demo = demo_poisson_cal(4, &cal_force(), Some(mask.clone())).unwrap();
    let res = &demo.result;
    assert!(res.rel_error <= 1e-8, "rel {}", res.rel_error);
    assert!(res.method_gap <= 1e-8 * res.classical_u.iter().fold(1e-300f64, |m, x| m.max(x.abs())));
    assert!(res.constraint_defect <= 1e-9);
    assert!(demo.interior_lambda <= 1e-9, "lambda {}", demo.interior_lambda);
    assert!(res.lagrange.norm_recovery_error() <= 1e-9);
    assert!(res.projector.norm_recovery_error() <= 1e-9);
    assert!(res.classical_u.iter().any(|&v| v > 0.0));
    for (i, &a) in res.mask.active.iter().enumerate() {
        if !a {
            assert_eq!(res.lagrange.u[i].abs() < 1e-12, true);
        }
    }

    let again = demo_poisson_cal(4, &cal_force(), Some(mask)).unwrap();
    assert_eq!(again.result.lagrange.u, res.lagrange.u);
}

#[test]
fn cal_demo_rejects_bad_masks() {
    assert!(matches!(demo_poisson_cal(4, &cal_force(), Some(cal_mask(3))), Err(Error::DimensionMismatch { .. })));
    let dead = DomainMask::from_active(2, 3, vec![false; 64]);
    assert!(demo_poisson_cal(3, &cal_force(), Some(dead)).is_err());
    assert!(demo_poisson_cal(4, &cal_force(), None).is_err());
}

#[test]
fn duct_demo_small() {
    let demo = demo_square_duct(4, -1.0).unwrap();
    let res = &demo.result;
    assert!(res.rel_error <= 1e-8);
    assert!(res.constraint_defect <= 1e-9);
    assert!(demo.asymmetry <= 1e-10);
    assert!(res.lagrange.norm_recovery_error() <= 1e-9);
    assert!(demo.center_velocity > 0.0);

    // Grid sum with trapezoid weights; the boundary rows are zero.
    let h = 1.0 / 15.0;
    let riemann: f64 = res.lagrange.u.iter().sum::<f64>() * h * h;
    assert!((demo.flow_rate - riemann).abs() <= 0.01 * riemann, "{} vs {riemann}", demo.flow_rate);
    assert!(demo.center_velocity < duct_center_series() * 1.1);
}

#[test]
fn duct_series_values() {
    // Center value of the unit-square torsion function is 0.0736713532...; fifty terms
    // of the series truncate at about 2e-6 relative.
    assert_relative_eq!(duct_center_series(), 0.07367135328, max_relative = 5e-6);
    assert_relative_eq!(duct_series(0.5, 0.5, 2000), 0.07367135328, max_relative = 1e-8);
    assert!(duct_series(0.0, 0.3, 50).abs() < 1e-12);
    assert_relative_eq!(duct_series(0.3, 0.7, 60), duct_series(0.7, 0.3, 60), max_relative = 1e-12);
}

#[test]
fn dirichlet_data_flows_through_pipeline() {
    // u = x on [0, 1]^2 with zero force is reproduced exactly by Q1 elements.
    let mask = DomainMask::full(2, 3);
    let mut coef = PDECoefficients::poisson(Coefficient::Const(0.0), mask.len());
    coef.dirichlet = DirichletData::Poly(PolySpec::new(2, vec![(vec![1, 0], 1.0)], PolySpec::unit_box(2)).unwrap());
    let res = run_pipeline(&coef, &mask, 1).unwrap();
    for v in 0..64 {
        let x = (v & 7) as f64 / 7.0;
        assert!((res.lagrange.u[v] - x).abs() < 1e-9);
        assert!((res.projector.u[v] - x).abs() < 1e-9);
    }
}

#[test]
fn kappa_grows_fourfold_per_level() {
    let k3 = dirichlet_kappa(3).unwrap();
    let k4 = dirichlet_kappa(4).unwrap();
    assert!(k4 / k3 > 3.0 && k4 / k3 < 5.0, "{k3} {k4}");
    let slope = kappa_slope(&[2, 3, 4]).unwrap();
    assert!((slope - 2.0).abs() <= 0.5, "slope {slope}");
}

#[test]
fn linear_fit_exact_line() {
    let (a, b, r2) = linear_fit(&[(1.0, 3.0), (2.0, 5.0), (4.0, 9.0)]);
    assert_relative_eq!(a, 2.0, max_relative = 1e-14);
    assert_relative_eq!(b, 1.0, max_relative = 1e-14);
    assert_relative_eq!(r2, 1.0, max_relative = 1e-14);
}
