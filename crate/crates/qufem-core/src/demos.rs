//! The two worked problems: Poisson on a letter-shaped domain and Poiseuille flow in a
//! square duct, each run through the block-encoded pipeline and an all-classical FEM solve.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::classical_assemble_tensor;
use crate::constraints::{dirichlet_state, lagrange_system, projector_dirichlet, BlockSolution};
use crate::elements::{basis_eval, tensor_elemental};
use crate::error::{Error, Result};
use crate::linalg::{condition_number, solve, RealMat};
use crate::mesh::{Connectivity, DomainMask, MeshParams};
use crate::num::{powi, sqrt};
use crate::quad::force::{assemble_force_vector, assemble_neumann_vector, classical_force_vector, classical_neumann_vector};
use crate::quad::gauss::gauss_legendre;
use crate::quad::poly::PolySpec;
use crate::quad::varcoef::{classical_variable_assemble, required_order, BilinearKind};
use crate::solver::{extract_system, scaled_operator, solve_block_system, solve_encoded, Coefficient, PDECoefficients, SolveReport};
use crate::sparse::SparseMat;

/// Strokes of the letters C, A, L as closed boxes [x0, x1] x [y0, y1] in the unit square.
const CAL_STROKES: [[f64; 4]; 9] = [
    [0.04, 0.16, 0.25, 0.75],
    [0.04, 0.30, 0.63, 0.75],
    [0.04, 0.30, 0.25, 0.37],
    [0.36, 0.48, 0.25, 0.75],
    [0.54, 0.66, 0.25, 0.75],
    [0.36, 0.66, 0.63, 0.75],
    [0.36, 0.66, 0.44, 0.56],
    [0.72, 0.84, 0.25, 0.75],
    [0.72, 0.96, 0.25, 0.37],
];

/// Active nodes of the letter domain on the 2^n x 2^n grid.
pub fn cal_active(n: usize) -> Vec<bool> {
    let nn = 1usize << n;
    let s = 1.0 / (nn - 1) as f64;
    let eps = 1e-12;
    (0..nn * nn)
        .map(|v| {
            let (x, y) = ((v & (nn - 1)) as f64 * s, (v >> n) as f64 * s);
            CAL_STROKES.iter().any(|b| x >= b[0] - eps && x <= b[1] + eps && y >= b[2] - eps && y <= b[3] + eps)
        })
        .collect()
}

pub fn cal_mask(n: usize) -> DomainMask {
    DomainMask::from_active(2, n, cal_active(n))
}

/// Rows of '0'/'1', top row (largest y) first, the format read by `DomainMask::from_bitmap`.
pub fn mask_bitmap(mask: &DomainMask) -> Vec<alloc::string::String> {
    let nn = 1usize << mask.n;
    (0..nn)
        .rev()
        .map(|y| (0..nn).map(|x| if mask.active[(y << mask.n) | x] { '1' } else { '0' }).collect())
        .collect()
}

/// Classical FEM operator h^(d-2) K_D + h^d M_k from element loops.
pub fn classical_operator(coef: &PDECoefficients, d: usize, p: usize, n: usize) -> Result<SparseMat> {
    let mp = MeshParams::new(d, p, n)?;
    let (hk, hm) = (powi(mp.h, d as i32 - 2), powi(mp.h, d as i32));
    let scale = |m: SparseMat, s: f64| m.scale(crate::num::r(s));
    match (&coef.diffusivity, &coef.reaction) {
        (Coefficient::Const(dk), Coefficient::Const(kr)) => {
            let conn = Connectivity::lagrange_1d(&mp);
            let (ke, me) = tensor_elemental(p, d);
            let mut l = scale(classical_assemble_tensor(&mp, &conn, &ke), dk * hk);
            if *kr != 0.0 {
                l = l.add(&scale(classical_assemble_tensor(&mp, &conn, &me), kr * hm));
            }
            Ok(l)
        }
        _ => {
            let dp = coef.diffusivity.to_poly(d);
            let mut l = scale(classical_variable_assemble(&dp, BilinearKind::Stiffness, p, n, required_order(&dp, p), d)?, hk);
            if !coef.reaction.is_zero() {
                let kp = coef.reaction.to_poly(d);
                l = l.add(&scale(classical_variable_assemble(&kp, BilinearKind::Mass, p, n, required_order(&kp, p), d)?, hm));
            }
            Ok(l)
        }
    }
}

/// Row replacement: fixed rows of L become identity rows and b_i = u_bar_i.
pub fn classical_dirichlet_solve(l: &SparseMat, b: &[f64], mask: &DomainMask, ubar: &[f64]) -> Result<Vec<f64>> {
    let m = RealMat::from_sparse(l, 1e-12)?;
    let triplets: Vec<(usize, usize, f64)> = m
        .triplets
        .into_iter()
        .filter(|&(i, _, _)| !mask.fixed[i])
        .chain((0..m.dim).filter(|&i| mask.fixed[i]).map(|i| (i, i, 1.0)))
        .collect();
    let rhs: Vec<f64> = (0..m.dim).map(|i| if mask.fixed[i] { ubar[i] } else { b[i] }).collect();
    solve(&RealMat { dim: m.dim, triplets }, &rhs)
}

/// Classical right-hand side: body force plus Neumann flux.
pub fn classical_rhs(coef: &PDECoefficients, mask: &DomainMask, p: usize) -> Result<Vec<f64>> {
    let (d, n) = (mask.d, mask.n);
    let mut b = if coef.force.is_zero() {
        vec![0.0; mask.len()]
    } else {
        classical_force_vector(&coef.force.to_poly(d), p, n, d)?
    };
    if !coef.neumann.is_zero() {
        let h = classical_neumann_vector(&coef.neumann.to_poly(d), mask, p)?;
        for (x, y) in b.iter_mut().zip(h) {
            *x += y;
        }
    }
    Ok(b)
}

/// Right-hand side through the force and flux block-encodings.
pub fn quantum_rhs(coef: &PDECoefficients, mask: &DomainMask, p: usize) -> Result<Vec<f64>> {
    let (d, n) = (mask.d, mask.n);
    let mut b = if coef.force.is_zero() {
        vec![0.0; mask.len()]
    } else {
        assemble_force_vector(&coef.force.to_poly(d), mask, p, n, d)?.vector
    };
    if !coef.neumann.is_zero() {
        let h = assemble_neumann_vector(&coef.neumann.to_poly(d), mask, p)?;
        for (x, y) in b.iter_mut().zip(h.vector) {
            *x += y;
        }
    }
    Ok(b)
}

/// Both constraint methods and the classical reference for one problem.
#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub d: usize,
    pub p: usize,
    pub n: usize,
    pub mask: DomainMask,
    pub ubar: Vec<f64>,
    /// Lagrange-multiplier solve of the extracted block system.
    pub lagrange: SolveReport,
    /// Projector-method solve.
    pub projector: SolveReport,
    pub classical_u: Vec<f64>,
    /// max |u_quantum - u_classical| / max |u_classical|.
    pub rel_error: f64,
    /// max |u_lagrange - u_projector|.
    pub method_gap: f64,
    /// max |u - u_bar| over fixed nodes.
    pub constraint_defect: f64,
    pub alpha_operator: f64,
}

/// max |u_j - u_bar_j| over fixed nodes.
pub fn fixed_defect(mask: &DomainMask, u: &[f64], ubar: &[f64]) -> f64 {
    BlockSolution { u: u.to_vec(), lambda: Vec::new(), u_norm: 0.0, lambda_norm: 0.0 }.constraint_defect(mask, ubar)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Block-encoded operator, force and constraints, solved by both Dirichlet methods, plus
/// the classical FEM solve of the same mesh.
pub fn run_pipeline(coef: &PDECoefficients, mask: &DomainMask, p: usize) -> Result<PipelineResult> {
    let (d, n) = (mask.d, mask.n);
    let be_l = scaled_operator(coef, d, p, n)?;
    let b = quantum_rhs(coef, mask, p)?;
    let ubar = dirichlet_state(mask, &coef.dirichlet)?;
    let sys = lagrange_system(&be_l, mask, &b, &ubar)?;
    let lagrange = solve_block_system(&sys)?;
    let (ld, bd) = projector_dirichlet(&be_l, mask, &b, &ubar)?;
    let projector = solve_encoded(&ld, &bd)?;
    let l_classical = classical_operator(coef, d, p, n)?;
    let b_classical = classical_rhs(coef, mask, p)?;
    let classical_u = classical_dirichlet_solve(&l_classical, &b_classical, mask, &ubar)?;
    let scale = max_abs(&classical_u).max(1e-300);
    let rel_error = max_diff(&lagrange.u, &classical_u) / scale;
    let method_gap = max_diff(&lagrange.u, &projector.u);
    let constraint_defect = fixed_defect(mask, &lagrange.u, &ubar).max(fixed_defect(mask, &projector.u, &ubar));
    Ok(PipelineResult {
        d,
        p,
        n,
        mask: mask.clone(),
        ubar,
        lagrange,
        projector,
        classical_u,
        rel_error,
        method_gap,
        constraint_defect,
        alpha_operator: be_l.alpha,
    })
}

/// Node values as rows indexed [y][x].
pub fn to_grid(v: &[f64], n: usize) -> Vec<Vec<f64>> {
    let nn = 1usize << n;
    (0..nn).map(|y| v[y * nn..(y + 1) * nn].to_vec()).collect()
}

#[derive(Clone, Debug)]
pub struct CalDemo {
    pub result: PipelineResult,
    pub u_grid: Vec<Vec<f64>>,
    pub lambda_grid: Vec<Vec<f64>>,
    /// Largest |lambda| over nodes that are free (strictly inside the active region).
    pub interior_lambda: f64,
}

/// -lap u = f on the letter domain with u = 0 on every fixed or inactive node.
pub fn demo_poisson_cal(n: usize, f: &PolySpec, mask: Option<DomainMask>) -> Result<CalDemo> {
    let mask = mask.unwrap_or_else(|| cal_mask(n));
    if mask.d != 2 || mask.n != n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: mask.d * mask.n });
    }
    if mask.fixed.iter().all(|&x| x) {
        return Err(Error::Invalid("mask has no free nodes".into()));
    }
    let coef = PDECoefficients::poisson(Coefficient::Poly(f.clone()), mask.len());
    let result = run_pipeline(&coef, &mask, 1)?;
    let interior_lambda = result
        .lagrange
        .lambda
        .iter()
        .zip(&mask.fixed)
        .filter(|(_, &f)| !f)
        .fold(0.0f64, |m, (l, _)| m.max(l.abs()));
    Ok(CalDemo {
        u_grid: to_grid(&result.lagrange.u, n),
        lambda_grid: to_grid(&result.lagrange.lambda, n),
        interior_lambda,
        result,
    })
}

/// f(x0, x1) = x0 x1 on the unit square.
pub fn cal_force() -> PolySpec {
    PolySpec::coordinate_product(2)
}

#[derive(Clone, Debug)]
pub struct DuctDemo {
    pub result: PipelineResult,
    pub u_grid: Vec<Vec<f64>>,
    /// Bilinear interpolation of the field at (1/2, 1/2).
    pub center_velocity: f64,
    /// int u over the square, as 1^T M u.
    pub flow_rate: f64,
    /// Largest deviation under x <-> y, x -> 1 - x and y -> 1 - y.
    pub asymmetry: f64,
    /// L2 error against the double-series solution.
    pub l2_error: f64,
}

/// Number of odd modes per axis in the reference series for the center value.
pub const CENTER_SERIES_TERMS: usize = 50;
/// Number of odd modes per axis in the reference series for the L2 error.
pub const L2_SERIES_TERMS: usize = 100;

/// w solving -lap w = 1 on the unit square with w = 0 on the edges, as the double sine
/// series over the first `terms` odd modes per axis.
pub fn duct_series(x: f64, y: f64, terms: usize) -> f64 {
    let pi = core::f64::consts::PI;
    let sx: Vec<f64> = (0..terms).map(|k| libm::sin((2 * k + 1) as f64 * pi * x)).collect();
    let sy: Vec<f64> = (0..terms).map(|k| libm::sin((2 * k + 1) as f64 * pi * y)).collect();
    series_from_sines(&sx, &sy)
}

fn series_from_sines(sx: &[f64], sy: &[f64]) -> f64 {
    let pi4 = powi(core::f64::consts::PI, 4);
    let mut s = 0.0;
    for (a, &sa) in sx.iter().enumerate() {
        let m = (2 * a + 1) as f64;
        for (b, &sb) in sy.iter().enumerate() {
            let k = (2 * b + 1) as f64;
            s += 16.0 / (pi4 * m * k * (m * m + k * k)) * sa * sb;
        }
    }
    s
}

/// Center value of the unit-forcing duct solution, approximately 0.0737.
pub fn duct_center_series() -> f64 {
    duct_series(0.5, 0.5, CENTER_SERIES_TERMS)
}

/// Value of a p = 1 nodal field at a point by bilinear interpolation.
pub fn interpolate_q1(u: &[f64], n: usize, x: f64, y: f64) -> f64 {
    let nn = 1usize << n;
    let s = (nn - 1) as f64;
    let (fx, fy) = (x * s, y * s);
    let (i, j) = ((fx as usize).min(nn - 2), (fy as usize).min(nn - 2));
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let at = |a: usize, b: usize| u[(b << n) | a];
    (1.0 - tx) * (1.0 - ty) * at(i, j) + tx * (1.0 - ty) * at(i + 1, j) + (1.0 - tx) * ty * at(i, j + 1) + tx * ty * at(i + 1, j + 1)
}

/// ||u_h - scale w||_{L2} with a 3 x 3 Gauss rule per element and the series reference.
pub fn duct_l2_error(u: &[f64], n: usize, scale: f64) -> f64 {
    let nn = 1usize << n;
    let ne = nn - 1;
    let h = 1.0 / ne as f64;
    let rule = gauss_legendre(3);
    let pi = core::f64::consts::PI;
    let coords: Vec<Vec<f64>> = (0..ne)
        .map(|e| (0..3).map(|l| rule.element_point(l, e, h)).collect())
        .collect();
    let sines: Vec<Vec<Vec<f64>>> = coords
        .iter()
        .map(|cs| {
            cs.iter()
                .map(|&x| (0..L2_SERIES_TERMS).map(|k| libm::sin((2 * k + 1) as f64 * pi * x)).collect())
                .collect()
        })
        .collect();
    let mut acc = 0.0;
    for ey in 0..ne {
        for ex in 0..ne {
            for ly in 0..3 {
                for lx in 0..3 {
                    let (xi, eta) = (rule.ref_point(lx), rule.ref_point(ly));
                    let mut uh = 0.0;
                    for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                        uh += basis_eval(1, a, xi) * basis_eval(1, b, eta) * u[((ey + b) << n) | (ex + a)];
                    }
                    let w = scale * series_from_sines(&sines[ex][lx], &sines[ey][ly]);
                    let wt = rule.ref_weight(lx) * rule.ref_weight(ly) * h * h;
                    acc += wt * (uh - w) * (uh - w);
                }
            }
        }
    }
    sqrt(acc)
}

/// r^T M u with the physical mass matrix and nodal values of r.
pub fn observable_nodal(r: &[f64], u: &[f64], d: usize, p: usize, n: usize) -> Result<f64> {
    let mp = MeshParams::new(d, p, n)?;
    let conn = Connectivity::lagrange_1d(&mp);
    let (_, me) = tensor_elemental(p, d);
    let m = RealMat::from_sparse(&classical_assemble_tensor(&mp, &conn, &me), 1e-12)?;
    let mu = m.matvec(u);
    Ok(powi(mp.h, d as i32) * r.iter().zip(&mu).map(|(a, b)| a * b).sum::<f64>())
}

/// (r, u) = int r u for a polynomial weight r evaluated at the nodes.
pub fn observable(r: &PolySpec, u: &[f64], d: usize, p: usize, n: usize) -> Result<f64> {
    let mp = MeshParams::new(d, p, n)?;
    let rv: Vec<f64> = (0..mp.total_nodes())
        .map(|v| {
            let x: Vec<f64> = mp.split_index(v).iter().map(|&i| mp.node_coord(i)).collect();
            r.eval(&x)
        })
        .collect();
    observable_nodal(&rv, u, d, p, n)
}

/// Poiseuille flow: lap u = dp/dx / mu with no-slip walls, so u = -(dp/dx / mu) w.
pub fn demo_square_duct(n: usize, dpdx_over_mu: f64) -> Result<DuctDemo> {
    let mask = DomainMask::full(2, n);
    let force = Coefficient::Const(-dpdx_over_mu);
    let coef = PDECoefficients::poisson(force, mask.len());
    let result = run_pipeline(&coef, &mask, 1)?;
    let u = &result.lagrange.u;
    let nn = 1usize << n;
    let mut asym: f64 = 0.0;
    for y in 0..nn {
        for x in 0..nn {
            let v = u[(y << n) | x];
            asym = asym
                .max((v - u[(x << n) | y]).abs())
                .max((v - u[(y << n) | (nn - 1 - x)]).abs())
                .max((v - u[((nn - 1 - y) << n) | x]).abs());
        }
    }
    let ones = vec![1.0; u.len()];
    Ok(DuctDemo {
        u_grid: to_grid(u, n),
        center_velocity: interpolate_q1(u, n, 0.5, 0.5),
        flow_rate: observable_nodal(&ones, u, 2, 1, n)?,
        asymmetry: asym,
        l2_error: duct_l2_error(u, n, -dpdx_over_mu),
        result,
    })
}

/// Ratio of duct L2 errors on the 2^n and 2^(n+1) grids (classical solves).
pub fn duct_convergence_ratio(n: usize) -> Result<f64> {
    let err = |k: usize| -> Result<f64> {
        let mask = DomainMask::full(2, k);
        let coef = PDECoefficients::poisson(Coefficient::Const(1.0), mask.len());
        let l = classical_operator(&coef, 2, 1, k)?;
        let b = classical_rhs(&coef, &mask, 1)?;
        let u = classical_dirichlet_solve(&l, &b, &mask, &vec![0.0; mask.len()])?;
        Ok(duct_l2_error(&u, k, 1.0))
    };
    Ok(err(n)? / err(n + 1)?)
}

/// Condition number of the projected Dirichlet Laplacian on the full square, from the
/// extracted block-encoding.
pub fn dirichlet_kappa(n: usize) -> Result<f64> {
    let mask = DomainMask::full(2, n);
    let coef = PDECoefficients::poisson(Coefficient::Const(1.0), mask.len());
    let be_l = scaled_operator(&coef, 2, 1, n)?;
    let zeros = vec![0.0; mask.len()];
    let (ld, _) = projector_dirichlet(&be_l, &mask, &zeros, &zeros)?;
    let m = RealMat::from_sparse(&extract_system(&ld)?, 1e-10)?;
    condition_number(&m)
}

/// Least-squares slope of log2 kappa against n.
pub fn kappa_slope(ns: &[usize]) -> Result<f64> {
    let pts: Vec<(f64, f64)> =
        ns.iter().map(|&n| dirichlet_kappa(n).map(|k| (n as f64, libm::log2(k)))).collect::<Result<_>>()?;
    Ok(linear_fit(&pts).0)
}

/// (slope, intercept, R^2) of an ordinary least-squares line.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / k, sy / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}
