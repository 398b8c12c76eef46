use proptest::prelude::*;
use qufem_core::assembly::{assemble_global_1d, assemble_global_dd};
use qufem_core::elements::elemental_arrays;
use qufem_core::mesh::{unit_position_be, DomainMask};
use qufem_core::qcore::{be_lcu_real, be_on_system_qubits, extract_block, BlockEncoding};
use qufem_core::quad::force::*;
use qufem_core::quad::gauss::{gauss_legendre, legendre};
use qufem_core::quad::poly::{chebyshev_t, PolySpec};
use qufem_core::quad::qsp::{qsp_apply, qsp_phases, qsp_response};
use qufem_core::quad::transform::{encoded_diagonal, mqet_transform, poly_transform_diagonal};
use qufem_core::quad::varcoef::*;

fn unit() -> (f64, f64) {
    (0.0, 1.0)
}

fn monomial_integral(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        2.0 / (k + 1) as f64
    }
}

#[test]
fn small_rules() {
    let g1 = gauss_legendre(1);
    assert_eq!((g1.points[0], g1.weights[0]), (0.0, 2.0));
    let g2 = gauss_legendre(2);
    let s = 1.0 / 3f64.sqrt();
    assert!((g2.points[0] + s).abs() < 1e-15 && (g2.points[1] - s).abs() < 1e-15);
    assert!((g2.weights[0] - 1.0).abs() < 1e-15 && (g2.weights[1] - 1.0).abs() < 1e-15);
    let g3 = gauss_legendre(3);
    assert!((g3.integrate(|x| x.powi(4)) - 0.4).abs() < 1e-14);
}

#[test]
fn exactness_up_to_2g_minus_1() {
    for g in 1..=10 {
        let rule = gauss_legendre(g);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        for k in 0..2 * g {
            let got = rule.integrate(|x| x.powi(k as i32));
            let want = monomial_integral(k);
            let err = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
            assert!(err <= 1e-12, "G={g} k={k} err={err:e}");
        }
    }
}

#[test]
fn squared_one_minus_x_weight_is_wrong() {
    // w = 2 / ((1 - x)^2 P'(x)^2) instead of 2 / ((1 - x^2) P'(x)^2)
    let rule = gauss_legendre(3);
    let alt: Vec<f64> = rule
        .points
        .iter()
        .map(|&x| {
            let (_, dp) = legendre(3, x);
            2.0 / ((1.0 - x) * (1.0 - x) * dp * dp)
        })
        .collect();
    let total: f64 = alt.iter().sum();
    assert!((total - 2.0).abs() > 1e-3);
}

#[test]
fn gauss_point_position_examples() {
    let (p, n, g) = (1, 3, 2);
    let rule = gauss_legendre(g);
    let l = rule.points.iter().position(|&x| x < 0.0).unwrap();
    let be = gauss_point_position_be(l, g, p, n).unwrap();
    let h = 1.0 / 7.0;
    let x = (1.0 - 1.0 / 3f64.sqrt()) / 2.0;
    let d = encoded_diagonal(&be).unwrap();
    for e in 0..7 {
        assert!((d[e] - h * (x + e as f64)).abs() < 1e-14);
        assert!(d[e] >= h * e as f64 && d[e] <= h * (e + 1) as f64);
    }
    assert_eq!(d[7], 0.0);
    assert!(be.alpha >= p as f64 && be.alpha <= p as f64 + h);
    for (p, n) in [(3usize, 4usize), (1, 5)] {
        let g = 4;
        for l in 0..g {
            let a = gauss_point_position_be(l, g, p, n).unwrap().alpha;
            let h = p as f64 / ((1 << n) - 1) as f64;
            assert!(a >= p as f64 - 1e-14 && a <= p as f64 + h + 1e-14);
        }
    }
}

#[test]
fn diagonal_transform_examples() {
    let x = unit_position_be(3);
    let id = PolySpec::univariate(&[0.0, 1.0], unit());
    let t = poly_transform_diagonal(&x, &id).unwrap();
    assert!(extract_block(&t).max_abs_diff(&extract_block(&x)) < 1e-14);
    let one = PolySpec::univariate(&[1.0], unit());
    let t = encoded_diagonal(&poly_transform_diagonal(&x, &one).unwrap()).unwrap();
    assert!(t.iter().all(|&v| (v - 1.0).abs() < 1e-14));
    let sq = PolySpec::univariate(&[0.0, 0.0, 1.0], unit());
    let t = encoded_diagonal(&poly_transform_diagonal(&x, &sq).unwrap()).unwrap();
    for (i, v) in t.iter().enumerate() {
        assert!((v - (i * i) as f64 / 49.0).abs() < 1e-14);
    }
    let not_diag = qufem_core::interaction::uoi_be_p1(3, 1, 0, false).unwrap().be;
    assert!(poly_transform_diagonal(&not_diag, &sq).is_err());
}

#[test]
fn qsp_linear_reproduces_input() {
    let p = PolySpec::univariate(&[0.0, 1.0], (-1.0, 1.0));
    let ph = qsp_phases(&p).unwrap();
    let x = unit_position_be(3);
    let q = qsp_apply(&x, &ph);
    assert!(extract_block(&q).max_abs_diff(&extract_block(&x)) < 1e-8);
}

#[test]
fn qsp_t2_response() {
    let p = PolySpec::from_chebyshev(&[0.0, 0.0, 1.0], (-1.0, 1.0));
    let ph = qsp_phases(&p).unwrap();
    assert_eq!(ph.phases.len(), 3);
    for i in 0..100 {
        let x = -1.0 + 2.0 * i as f64 / 99.0;
        let z = qsp_response(&ph.phases, x);
        assert!((z.re - (2.0 * x * x - 1.0)).abs() < 1e-8 && z.im.abs() < 1e-8);
    }
}

#[test]
fn qsp_matches_exact_backend() {
    let x = unit_position_be(3);
    // 2x - 1 spreads the spectrum over [-1, 1]
    let xs = be_lcu_real(&[x, BlockEncoding::identity(3)], &[2.0, -1.0]).unwrap();
    for deg in 1..=8usize {
        let mut co = vec![0.0; deg + 1];
        co[deg] = 1.0;
        let poly = PolySpec::from_chebyshev(&co, (-1.0, 1.0));
        let ph = qsp_phases(&poly).unwrap();
        let q = qsp_apply(&xs, &ph);
        let exact = poly_transform_diagonal(&xs.clone().with_alpha(1.0), &poly).unwrap();
        let diff = extract_block(&q).max_abs_diff(&extract_block(&exact));
        assert!(diff < 1e-8, "deg {deg}: {diff:e}");
    }
    // odd target with |P(1)| < 1: no phases give a real top-left entry
    let poly = PolySpec::from_chebyshev(&[0.0, 0.3, 0.0, -0.5], (-1.0, 1.0));
    assert!(matches!(qsp_phases(&poly), Err(qufem_core::Error::PhaseResidual(_))));
}

#[test]
fn qsp_rejects_mixed_parity() {
    let poly = PolySpec::univariate(&[0.2, 0.5], (-1.0, 1.0));
    assert!(qsp_phases(&poly).is_err());
}

fn axis_positions(n: usize, d: usize) -> Vec<BlockEncoding> {
    (0..d)
        .map(|i| {
            let pos: Vec<usize> = (i * n..(i + 1) * n).collect();
            be_on_system_qubits(&unit_position_be(n), &pos, d * n)
        })
        .collect()
}

#[test]
fn mqet_single_variable_matches_diagonal() {
    let x = unit_position_be(3);
    let poly = PolySpec::univariate(&[0.1, -0.4, 0.9], unit());
    let a = mqet_transform(&[x.clone()], &poly).unwrap();
    let b = poly_transform_diagonal(&x, &poly).unwrap();
    assert!(extract_block(&a.be).max_abs_diff(&extract_block(&b)) < 1e-13);
}

#[test]
fn mqet_product_of_coordinates() {
    let n = 2;
    let bes = axis_positions(n, 2);
    let g = PolySpec::coordinate_product(2);
    let out = mqet_transform(&bes, &g).unwrap();
    assert_eq!(out.degree_bound, 2);
    assert!(out.beta_norm <= 4.0 + 1e-12);
    let d = encoded_diagonal(&out.be).unwrap();
    for v in 0..16usize {
        let (x, y) = ((v & 3) as f64 / 3.0, (v >> 2) as f64 / 3.0);
        assert!((d[v] - x * y).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn mqet_beta_bound(deg in 0usize..4, co in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let mut terms = Vec::new();
        for a in 0..=deg {
            for b in 0..=deg {
                terms.push((vec![a, b], co[a * 4 + b]));
            }
        }
        let poly = PolySpec::new(2, terms, PolySpec::unit_box(2)).unwrap();
        prop_assume!(poly.sup_norm_bound > 1e-3);
        let bes = axis_positions(2, 2);
        let out = mqet_transform(&bes, &poly).unwrap();
        let dd = out.degree_bound as f64;
        prop_assert!(dd <= 4.0);
        prop_assert!(out.beta_norm <= dd + 2.0 + 1e-9, "beta {} D {}", out.beta_norm, dd);
        let d = encoded_diagonal(&out.be).unwrap();
        for v in 0..16usize {
            let x = [(v & 3) as f64 / 3.0, (v >> 2) as f64 / 3.0];
            prop_assert!((d[v] - poly.eval(&x)).abs() < 1e-10);
        }
    }

    #[test]
    fn chebyshev_identity(k in 0usize..12, t in -1.0f64..1.0) {
        prop_assert!((chebyshev_t(k, t) - (k as f64 * t.acos()).cos()).abs() < 1e-12);
    }
}

#[test]
fn gauss_position_operators_commute() {
    let g = 3;
    let ops: Vec<_> = (0..g).map(|l| extract_block(&gauss_point_position_be(l, g, 1, 3).unwrap())).collect();
    for a in &ops {
        for b in &ops {
            assert_eq!(a.matmul(b).max_abs_diff(&b.matmul(a)), 0.0);
        }
    }
}

fn polys_1d() -> Vec<PolySpec> {
    vec![
        PolySpec::univariate(&[1.0], unit()),
        PolySpec::univariate(&[0.0, 1.0], unit()),
        PolySpec::univariate(&[0.0, 0.0, 1.0], unit()),
    ]
}

#[test]
fn variable_coefficients_match_classical_1d() {
    for p in [1usize, 3] {
        for n in 3..=5usize {
            if p == 3 && n % 2 == 1 {
                continue;
            }
            for f in polys_1d() {
                let g = required_order(&f, p);
                for kind in [BilinearKind::Mass, BilinearKind::Stiffness] {
                    let q = assemble_variable_coeff(&f, kind, p, n, g, 1).unwrap();
                    let c = classical_variable_assemble(&f, kind, p, n, g, 1).unwrap();
                    let diff = extract_block(&q.be).max_abs_diff(&c);
                    assert!(diff < 1e-8, "p={p} n={n} {kind:?}: {diff:e}");
                }
            }
        }
    }
}

#[test]
fn variable_coefficients_match_classical_2d() {
    let polys = vec![
        PolySpec::constant(2, 1.0, PolySpec::unit_box(2)),
        PolySpec::new(2, vec![(vec![1, 0], 1.0)], PolySpec::unit_box(2)).unwrap(),
        PolySpec::new(2, vec![(vec![2, 0], 1.0)], PolySpec::unit_box(2)).unwrap(),
        PolySpec::coordinate_product(2),
    ];
    for f in polys {
        let g = required_order(&f, 1);
        for kind in [BilinearKind::Mass, BilinearKind::Stiffness] {
            let q = assemble_variable_coeff(&f, kind, 1, 3, g, 2).unwrap();
            let c = classical_variable_assemble(&f, kind, 1, 3, g, 2).unwrap();
            assert!(extract_block(&q.be).max_abs_diff(&c) < 1e-8, "{kind:?}");
        }
    }
}

#[test]
fn unit_coefficient_recovers_constant_assembly() {
    let one = PolySpec::univariate(&[1.0], unit());
    for p in [1usize, 3] {
        let a = elemental_arrays(p);
        let m = assemble_variable_coeff(&one, BilinearKind::Mass, p, 4, required_order(&one, p), 1).unwrap();
        let mc = assemble_global_1d(&a.me, p, 4).unwrap();
        assert!(extract_block(&m.be).max_abs_diff(&extract_block(&mc.be)) < 1e-12);
        let k = assemble_variable_coeff(&one, BilinearKind::Stiffness, p, 4, required_order(&one, p), 1).unwrap();
        let kc = assemble_global_1d(&a.ke, p, 4).unwrap();
        assert!(extract_block(&k.be).max_abs_diff(&extract_block(&kc.be)) < 1e-10);
    }
    let one2 = PolySpec::constant(2, 1.0, PolySpec::unit_box(2));
    let (k2, m2) = assemble_global_dd(2, 1, 3).unwrap();
    let m = assemble_variable_coeff(&one2, BilinearKind::Mass, 1, 3, 2, 2).unwrap();
    let k = assemble_variable_coeff(&one2, BilinearKind::Stiffness, 1, 3, 2, 2).unwrap();
    assert!(extract_block(&m.be).max_abs_diff(&extract_block(&m2.be)) < 1e-12);
    assert!(extract_block(&k.be).max_abs_diff(&extract_block(&k2.be)) < 1e-12);
}

#[test]
fn linear_alpha_within_integral_bound() {
    for f in polys_1d() {
        for kind in [BilinearKind::Mass, BilinearKind::Stiffness] {
            let g = required_order(&f, 1);
            let q = assemble_variable_coeff(&f, kind, 1, 4, g, 1).unwrap();
            assert!(q.be.alpha <= variable_alpha_bound(&f, kind, 1, 1) * (1.0 + 1e-9), "{kind:?}");
        }
    }
    let xy = PolySpec::coordinate_product(2);
    for kind in [BilinearKind::Mass, BilinearKind::Stiffness] {
        let q = assemble_variable_coeff(&xy, kind, 1, 3, required_order(&xy, 1), 2).unwrap();
        assert!(q.be.alpha <= variable_alpha_bound(&xy, kind, 1, 2) * (1.0 + 1e-9));
    }
}

#[test]
fn cubic_alpha_within_quadrature_bound_only() {
    let f = PolySpec::univariate(&[1.0], unit());
    for kind in [BilinearKind::Mass, BilinearKind::Stiffness] {
        for g in 3..=7 {
            let q = assemble_variable_coeff(&f, kind, 3, 4, g, 1).unwrap();
            assert!(q.be.alpha <= quadrature_alpha_bound(&f, kind, 3, 1, g) * (1.0 + 1e-9));
        }
    }
    // sign changes of B inside the element can put sum_l w_l |B(x_l)| above int |B|
    let k = assemble_variable_coeff(&f, BilinearKind::Stiffness, 3, 4, required_order(&f, 3), 1).unwrap();
    assert!(k.be.alpha > variable_alpha_bound(&f, BilinearKind::Stiffness, 3, 1));
    let m = assemble_variable_coeff(&f, BilinearKind::Mass, 3, 4, 5, 1).unwrap();
    assert!(m.be.alpha > variable_alpha_bound(&f, BilinearKind::Mass, 3, 1));
}

#[test]
fn unit_force_vector() {
    let one = PolySpec::univariate(&[1.0], unit());
    let n = 3;
    let mask = DomainMask::unconstrained(1, n);
    let fa = assemble_force_vector(&one, &mask, 1, n, 1).unwrap();
    let h = 1.0 / 7.0;
    for (i, v) in fa.vector.iter().enumerate() {
        let want = if i == 0 || i == 7 { h / 2.0 } else { h };
        assert!((v - want).abs() < 1e-14);
    }
    assert!(fa.filling_fraction > 0.0 && fa.filling_fraction <= 1.0);
    assert!(fa.amplification_rounds >= 1);
    let zero = PolySpec::univariate(&[0.0], unit());
    let z = assemble_force_vector(&zero, &mask, 1, n, 1).unwrap();
    assert!(z.zero && z.norm == 0.0);
}

#[test]
fn force_coefficient_sums() {
    for g in 1..=4 {
        let c = force_coefficients(1, 1, g);
        let s: f64 = c.iter().flatten().map(|v| v.abs()).sum();
        assert!((s - 1.0).abs() < 1e-14);
        let c2 = force_coefficients(1, 2, g);
        let s2: f64 = c2.iter().flatten().map(|v| v.abs()).sum();
        assert!((s2 - 1.0).abs() < 1e-14);
    }
    // the signed sum is one for every order; the absolute sum exceeds it once N_j changes sign
    let c3 = force_coefficients(3, 1, 3);
    let signed: f64 = c3.iter().flatten().sum();
    let abs: f64 = c3.iter().flatten().map(|v| v.abs()).sum();
    assert!((signed - 1.0).abs() < 1e-14);
    assert!(abs > 1.0 + 1e-6);
}

#[test]
fn force_vectors_match_classical() {
    let cases: Vec<(PolySpec, usize, usize, usize)> = vec![
        (PolySpec::univariate(&[0.5, 1.0, -2.0], unit()), 1, 4, 1),
        (PolySpec::univariate(&[0.0, 0.0, 1.0, 1.0], unit()), 3, 4, 1),
        (PolySpec::coordinate_product(2), 1, 3, 2),
    ];
    for (f, p, n, d) in cases {
        let mask = DomainMask::unconstrained(d, n);
        let q = assemble_force_vector(&f, &mask, p, n, d).unwrap();
        let c = classical_force_vector(&f, p, n, d).unwrap();
        let cn = vector_norm(&c);
        for (i, z) in q.state.iter().enumerate() {
            assert!((z.re - c[i] / cn).abs() < 1e-10 && z.im.abs() < 1e-12);
            assert!((q.vector[i] - c[i]).abs() < 1e-10 * cn);
        }
        assert!((q.norm - cn).abs() < 1e-10 * cn);
    }
}

#[test]
fn neumann_vectors_match_classical() {
    let h = PolySpec::univariate(&[1.0, 2.0], unit());
    let m1 = DomainMask::full(1, 3).with_neumann_faces(&[(0, 1)]);
    let q = assemble_neumann_vector(&h, &m1, 1).unwrap();
    let c = classical_neumann_vector(&h, &m1, 1).unwrap();
    assert_eq!(c[7], 3.0);
    for (a, b) in q.vector.iter().zip(&c) {
        assert!((a - b).abs() < 1e-12);
    }
    let h2 = PolySpec::new(2, vec![(vec![0, 0], 1.0), (vec![1, 0], 1.0)], PolySpec::unit_box(2)).unwrap();
    let m2 = DomainMask::full(2, 3).with_neumann_faces(&[(1, 0), (0, 1)]);
    let q = assemble_neumann_vector(&h2, &m2, 1).unwrap();
    let c = classical_neumann_vector(&h2, &m2, 1).unwrap();
    assert!(vector_norm(&c) > 0.0);
    for (a, b) in q.vector.iter().zip(&c) {
        assert!((a - b).abs() < 1e-12);
    }
    let none = DomainMask::full(2, 3);
    assert!(assemble_neumann_vector(&h2, &none, 1).unwrap().zero);
}
