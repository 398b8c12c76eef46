//! Gauss-point position operators and assembly with a polynomial coefficient.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{ArrayKind, AssembledArray};
use crate::elements::{basis_eval, basis_grad};
use crate::error::{Error, Result};
use crate::gates::{compression_ledger, GateCost};
use crate::interaction::indicator_be;
use crate::mesh::{element_projector_be, position_be, Connectivity, MeshParams};
use crate::num::r;
use crate::qcore::{be_lcu_real, be_on_system_qubits, be_product, be_product_chain, be_tensor_chain, BlockEncoding};
use crate::quad::gauss::{gauss_legendre, QuadratureRule};
use crate::quad::poly::PolySpec;
use crate::quad::transform::{mqet_transform, poly_transform_diagonal};
use crate::sparse::SparseMat;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BilinearKind {
    Stiffness,
    Mass,
}

/// X_l = h Pi [((x_l + 1)/2) I + X] on the element register, with subnormalization
/// p + h (x_l + 1)/2.
pub fn gauss_point_position_be_rule(rule: &QuadratureRule, l: usize, p: usize, n: usize) -> Result<BlockEncoding> {
    let mp = MeshParams::new(1, p, n)?;
    let shift = mp.h * rule.ref_point(l);
    let x = position_be(n);
    let lin = be_lcu_real(&[BlockEncoding::identity(n), x], &[shift, mp.h])?;
    be_product(&element_projector_be(n, p), &lin)
}

pub fn gauss_point_position_be(l: usize, g: usize, p: usize, n: usize) -> Result<BlockEncoding> {
    gauss_point_position_be_rule(&gauss_legendre(g), l, p, n)
}

/// Reference-element bilinear form B[N_j, N_k] at a point of [0, 1]^d; local multi-indices
/// have axis 0 least significant.
pub fn bilinear_ref(kind: BilinearKind, p: usize, d: usize, j: usize, k: usize, xi: &[f64]) -> f64 {
    let nen = p + 1;
    let digits = |mut v: usize| -> Vec<usize> {
        (0..d)
            .map(|_| {
                let x = v % nen;
                v /= nen;
                x
            })
            .collect()
    };
    let (jd, kd) = (digits(j), digits(k));
    let mass: f64 = (0..d).map(|i| basis_eval(p, jd[i], xi[i]) * basis_eval(p, kd[i], xi[i])).product();
    match kind {
        BilinearKind::Mass => mass,
        BilinearKind::Stiffness => (0..d)
            .map(|a| {
                (0..d)
                    .map(|i| {
                        if i == a {
                            basis_grad(p, jd[i], xi[i]) * basis_grad(p, kd[i], xi[i])
                        } else {
                            basis_eval(p, jd[i], xi[i]) * basis_eval(p, kd[i], xi[i])
                        }
                    })
                    .product::<f64>()
            })
            .sum(),
    }
}

/// Gauss multi-indices with axis 0 least significant: (reference points, weight product).
pub fn gauss_points_dd(rule: &QuadratureRule, d: usize) -> Vec<(Vec<usize>, Vec<f64>, f64)> {
    let g = rule.order_g;
    (0..g.pow(d as u32))
        .map(|mut v| {
            let mut ls = Vec::with_capacity(d);
            for _ in 0..d {
                ls.push(v % g);
                v /= g;
            }
            let xi: Vec<f64> = ls.iter().map(|&l| rule.ref_point(l)).collect();
            let w: f64 = ls.iter().map(|&l| rule.ref_weight(l)).product();
            (ls, xi, w)
        })
        .collect()
}

/// Classical reference: sum_e sum_jk sum_l c_ljk f(x_l^e) |IX(j,e)><IX(k,e)| on the
/// reference element scaling (no powers of h).
pub fn classical_variable_assemble(
    f: &PolySpec,
    kind: BilinearKind,
    p: usize,
    n: usize,
    g: usize,
    d: usize,
) -> Result<SparseMat> {
    let mp = MeshParams::new(d, p, n)?;
    let conn = Connectivity::lagrange_1d(&mp);
    let rule = gauss_legendre(g);
    let pts = gauss_points_dd(&rule, d);
    let nen = p + 1;
    let nloc = nen.pow(d as u32);
    let nel = mp.numel.pow(d as u32);
    let mut t = Vec::new();
    for e in 0..nel {
        let ed: Vec<usize> = (0..d).map(|i| (e / mp.numel.pow(i as u32)) % mp.numel).collect();
        let fvals: Vec<f64> = pts
            .iter()
            .map(|(_, xi, _)| {
                let x: Vec<f64> = (0..d).map(|i| mp.h * (xi[i] + ed[i] as f64)).collect();
                f.eval(&x)
            })
            .collect();
        for a in 0..nloc {
            for b in 0..nloc {
                let v: f64 = pts
                    .iter()
                    .zip(&fvals)
                    .map(|((_, xi, w), fv)| w * bilinear_ref(kind, p, d, a, b, xi) * fv)
                    .sum();
                if v != 0.0 {
                    let ga = global_node(&mp, &conn, &ed, a);
                    let gb = global_node(&mp, &conn, &ed, b);
                    t.push((ga, gb, r(v)));
                }
            }
        }
    }
    Ok(SparseMat::from_triplets(mp.total_nodes(), &t))
}

pub(crate) fn global_node(mp: &MeshParams, conn: &Connectivity, ed: &[usize], loc: usize) -> usize {
    let nen = conn.nen;
    let mut loc = loc;
    let mut gidx = 0;
    for (i, &ei) in ed.iter().enumerate() {
        gidx |= conn.get(loc % nen, ei) << (i * mp.n);
        loc /= nen;
    }
    gidx
}

/// f(X_l) for every Gauss multi-index, via the diagonal transform (d = 1) or the
/// multivariate Chebyshev LCU (d > 1).
pub fn coefficient_at_gauss_points(f: &PolySpec, rule: &QuadratureRule, p: usize, n: usize, d: usize) -> Result<Vec<BlockEncoding>> {
    if f.vars != d {
        return Err(Error::Invalid("coefficient arity must equal the dimension".into()));
    }
    let axis: Vec<BlockEncoding> =
        (0..rule.order_g).map(|l| gauss_point_position_be_rule(rule, l, p, n)).collect::<Result<_>>()?;
    gauss_points_dd(rule, d)
        .into_iter()
        .map(|(ls, _, _)| {
            if d == 1 {
                poly_transform_diagonal(&axis[ls[0]], f)
            } else {
                let bes: Vec<BlockEncoding> = ls
                    .iter()
                    .enumerate()
                    .map(|(i, &l)| {
                        let pos: Vec<usize> = (i * n..(i + 1) * n).collect();
                        be_on_system_qubits(&axis[l], &pos, d * n)
                    })
                    .collect();
                Ok(mqet_transform(&bes, f)?.be)
            }
        })
        .collect()
}

/// A_j^(d) = A_{j_{d-1}} (x) ... (x) A_{j_0}.
pub fn indicator_dd(p: usize, n: usize, d: usize, j: usize) -> Result<(BlockEncoding, GateCost)> {
    let nen = p + 1;
    let mut chain = Vec::with_capacity(d);
    let mut cost = GateCost::ZERO;
    for i in (0..d).rev() {
        let ji = (j / nen.pow(i as u32)) % nen;
        let a = indicator_be(n, p, ji)?;
        cost += a.cost;
        chain.push(a.be);
    }
    Ok((be_tensor_chain(&chain), cost))
}

/// F = sum_jk A_j (sum_l c_ljk f(X_l)) A_k^dagger with c_ljk = w_l B[N_j, N_k](x_l) on the
/// reference element.
pub fn assemble_variable_coeff(
    f: &PolySpec,
    kind: BilinearKind,
    p: usize,
    n: usize,
    g: usize,
    d: usize,
) -> Result<AssembledArray> {
    MeshParams::new(d, p, n)?;
    let rule = gauss_legendre(g);
    let pts = gauss_points_dd(&rule, d);
    let fx = coefficient_at_gauss_points(f, &rule, p, n, d)?;
    let nloc = (p + 1).pow(d as u32);
    let ind: Vec<(BlockEncoding, GateCost)> = (0..nloc).map(|j| indicator_dd(p, n, d, j)).collect::<Result<_>>()?;
    let mut outer = Vec::new();
    let mut cost = GateCost::ZERO;
    let mut alpha_analytic = 0.0;
    for a in 0..nloc {
        for b in 0..nloc {
            let c: Vec<f64> = pts.iter().map(|(_, xi, w)| w * bilinear_ref(kind, p, d, a, b, xi)).collect();
            let keep: Vec<usize> = (0..c.len()).filter(|&l| c[l].abs() > 1e-15).collect();
            if keep.is_empty() {
                continue;
            }
            let terms: Vec<BlockEncoding> = keep.iter().map(|&l| fx[l].clone()).collect();
            let coeffs: Vec<f64> = keep.iter().map(|&l| c[l]).collect();
            alpha_analytic += keep.iter().map(|&l| c[l].abs() * fx[l].alpha).sum::<f64>();
            let inner = be_lcu_real(&terms, &coeffs)?;
            let term = be_product_chain(&[ind[a].0.clone(), inner, ind[b].0.adjoint()])?;
            cost += ind[a].1 + ind[b].1;
            outer.push(term);
        }
    }
    if outer.is_empty() {
        return Err(Error::ZeroNorm);
    }
    let k = outer.len();
    let per_term = outer.iter().map(|t| t.ancillas).max().unwrap_or(0);
    let be = be_lcu_real(&outer, &vec![1.0; k])?;
    let ledger = compression_ledger(k, per_term);
    let kind = match kind {
        BilinearKind::Mass => ArrayKind::Mass,
        BilinearKind::Stiffness => ArrayKind::Stiffness,
    };
    Ok(AssembledArray { be, alpha_analytic, kind, cost: cost + ledger.cost, ledger })
}

/// Right-hand side of the alpha bound: ||f||_inf sum_jk int |B[N_j, N_k]| on the reference
/// element. |B| is only piecewise polynomial, so the integral uses a composite rule.
pub fn variable_alpha_bound(f: &PolySpec, kind: BilinearKind, p: usize, d: usize) -> f64 {
    let cells = if d == 1 { 200 } else { 24 };
    let rule = gauss_legendre(8);
    let h = 1.0 / cells as f64;
    let axis: Vec<(f64, f64)> = (0..cells)
        .flat_map(|c| (0..rule.order_g).map(move |l| (c, l)))
        .map(|(c, l)| (rule.element_point(l, c, h), rule.element_weight(l, h)))
        .collect();
    let k = axis.len();
    let nloc = (p + 1).pow(d as u32);
    let mut s = 0.0;
    let mut xi = vec![0.0; d];
    for idx in 0..k.pow(d as u32) {
        let mut v = idx;
        let mut w = 1.0;
        for x in xi.iter_mut() {
            let (pt, wt) = axis[v % k];
            v /= k;
            *x = pt;
            w *= wt;
        }
        for a in 0..nloc {
            for b in 0..nloc {
                s += w * bilinear_ref(kind, p, d, a, b, &xi).abs();
            }
        }
    }
    f.sup_norm_bound * s
}

/// The bound with the integral replaced by the quadrature sum sum_l w_l |B(x_l)| that the
/// LCU weights actually carry; equal to `variable_alpha_bound` when no |B| changes sign
/// inside the element.
pub fn quadrature_alpha_bound(f: &PolySpec, kind: BilinearKind, p: usize, d: usize, g: usize) -> f64 {
    let pts = gauss_points_dd(&gauss_legendre(g), d);
    let nloc = (p + 1).pow(d as u32);
    let mut s = 0.0;
    for a in 0..nloc {
        for b in 0..nloc {
            s += pts.iter().map(|(_, xi, w)| w * bilinear_ref(kind, p, d, a, b, xi).abs()).sum::<f64>();
        }
    }
    f.sup_norm_bound * s
}

/// Smallest G making the rule exact for (axis degree of f) + 2p.
pub fn required_order(f: &PolySpec, p: usize) -> usize {
    (f.max_axis_degree() + 2 * p + 2).div_ceil(2).max(1)
}

