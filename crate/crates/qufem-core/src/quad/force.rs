//! Nodal force vectors: body-force assembly applied to the uniform superposition, and
//! Neumann flux terms restricted to flagged boundary faces.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::elements::basis_eval;
use crate::mesh::{Connectivity, DomainMask, MeshParams};
use crate::num::{norm2_real, powi, r, sqrt, C64};
use crate::qcore::{apply_postselected, be_diagonal, be_lcu_real, be_product_chain, BlockEncoding};
use crate::quad::gauss::gauss_legendre;
use crate::quad::poly::PolySpec;
use crate::quad::varcoef::{coefficient_at_gauss_points, gauss_points_dd, global_node, indicator_dd};

#[derive(Clone, Debug)]
pub struct ForceAssembly {
    /// Normalized nodal force vector.
    pub state: Vec<C64>,
    /// Norm of the physical force vector (scaled by h^d).
    pub norm: f64,
    /// Success amplitude of the preparation: ||f_hat|u>|| / alpha.
    pub filling_fraction: f64,
    pub amplification_rounds: u64,
    /// Physical nodal force vector.
    pub vector: Vec<f64>,
    pub zero: bool,
    pub be: Option<BlockEncoding>,
}

impl ForceAssembly {
    fn zero(dim: usize) -> Self {
        ForceAssembly {
            state: vec![r(0.0); dim],
            norm: 0.0,
            filling_fraction: 0.0,
            amplification_rounds: 0,
            vector: vec![0.0; dim],
            zero: true,
            be: None,
        }
    }
}

/// Gauss order exact for f N_j on each axis.
pub fn force_order(f: &PolySpec, p: usize) -> usize {
    (f.max_axis_degree() + p + 2).div_ceil(2).max(1)
}

/// c_jl = w_l N_j(x_l) on the reference element (multi-indices, axis 0 least significant).
pub fn force_coefficients(p: usize, d: usize, g: usize) -> Vec<Vec<f64>> {
    let rule = gauss_legendre(g);
    let pts = gauss_points_dd(&rule, d);
    let nen = p + 1;
    (0..nen.pow(d as u32))
        .map(|j| {
            pts.iter()
                .map(|(_, xi, w)| {
                    let mut v = *w;
                    let mut jj = j;
                    for &x in xi {
                        v *= basis_eval(p, jj % nen, x);
                        jj /= nen;
                    }
                    v
                })
                .collect()
        })
        .collect()
}

/// Classical nodal force sum_e sum_j sum_l h^d c_jl f(x_l^e) e_{IX(j,e)}.
pub fn classical_force_vector(f: &PolySpec, p: usize, n: usize, d: usize) -> Result<Vec<f64>> {
    let mp = MeshParams::new(d, p, n)?;
    let conn = Connectivity::lagrange_1d(&mp);
    let g = force_order(f, p);
    let rule = gauss_legendre(g);
    let pts = gauss_points_dd(&rule, d);
    let c = force_coefficients(p, d, g);
    let mut out = vec![0.0; mp.total_nodes()];
    let hd = powi(mp.h, d as i32);
    for e in 0..mp.numel.pow(d as u32) {
        let ed: Vec<usize> = (0..d).map(|i| (e / mp.numel.pow(i as u32)) % mp.numel).collect();
        let fv: Vec<f64> = pts
            .iter()
            .map(|(_, xi, _)| {
                let x: Vec<f64> = (0..d).map(|i| mp.h * (xi[i] + ed[i] as f64)).collect();
                f.eval(&x)
            })
            .collect();
        for (j, cj) in c.iter().enumerate() {
            let v: f64 = cj.iter().zip(&fv).map(|(a, b)| a * b).sum();
            out[global_node(&mp, &conn, &ed, j)] += hd * v;
        }
    }
    Ok(out)
}

fn finish(be: BlockEncoding, dim: usize, scale: f64) -> Result<ForceAssembly> {
    let u = vec![r(1.0 / sqrt(dim as f64)); dim];
    let res = apply_postselected(&be, &u)?;
    if res.zero {
        return Ok(ForceAssembly::zero(dim));
    }
    // A u = alpha raw_norm state, and u = ones / sqrt(dim)
    let ref_norm = be.alpha * res.raw_norm * sqrt(dim as f64);
    let vector: Vec<f64> = res.state.iter().map(|z| z.re * ref_norm * scale).collect();
    let ff = res.raw_norm;
    Ok(ForceAssembly {
        state: res.state,
        norm: ref_norm * scale,
        filling_fraction: ff,
        amplification_rounds: libm::ceil(1.0 / ff) as u64,
        vector,
        zero: false,
        be: Some(be),
    })
}

/// f_hat = sum_j A_j (sum_l c_jl f(X_l)) A_j^dagger applied to the uniform state; Neumann
/// fluxes are added separately by `assemble_neumann_vector`.
pub fn assemble_force_vector(f: &PolySpec, mask: &DomainMask, p: usize, n: usize, d: usize) -> Result<ForceAssembly> {
    let mp = MeshParams::new(d, p, n)?;
    if mask.d != d || mask.n != n {
        return Err(Error::DimensionMismatch { expected: d * n, got: mask.d * mask.n });
    }
    let dim = mp.total_nodes();
    if f.is_zero() {
        return Ok(ForceAssembly::zero(dim));
    }
    let g = force_order(f, p);
    let rule = gauss_legendre(g);
    let fx = coefficient_at_gauss_points(f, &rule, p, n, d)?;
    let c = force_coefficients(p, d, g);
    let mut terms = Vec::new();
    for (j, cj) in c.iter().enumerate() {
        let keep: Vec<usize> = (0..cj.len()).filter(|&l| cj[l].abs() > 1e-15).collect();
        if keep.is_empty() {
            continue;
        }
        let t: Vec<BlockEncoding> = keep.iter().map(|&l| fx[l].clone()).collect();
        let w: Vec<f64> = keep.iter().map(|&l| cj[l]).collect();
        let inner = be_lcu_real(&t, &w)?;
        let (a, _) = indicator_dd(p, n, d, j)?;
        terms.push(be_product_chain(&[a.clone(), inner, a.adjoint()])?);
    }
    let be = be_lcu_real(&terms, &vec![1.0; terms.len()])?;
    finish(be, dim, powi(mp.h, d as i32))
}

/// Boundary flux vector: for d = 1 the flux value at each Neumann end node; for d = 2 a 1D
/// force assembly along every outer face, restricted to face elements whose nodes are all
/// Neumann, scaled by h.
pub fn assemble_neumann_vector(hflux: &PolySpec, mask: &DomainMask, p: usize) -> Result<ForceAssembly> {
    let (d, n) = (mask.d, mask.n);
    let mp = MeshParams::new(d, p, n)?;
    let dim = mp.total_nodes();
    if hflux.is_zero() || !mask.neumann.iter().any(|&b| b) {
        return Ok(ForceAssembly::zero(dim));
    }
    match d {
        1 => {
            let vals: Vec<C64> = (0..dim)
                .map(|v| if mask.neumann[v] { r(hflux.eval1(mp.node_coord(v))) } else { r(0.0) })
                .collect();
            finish(be_diagonal(&vals, None)?, dim, 1.0)
        }
        2 => {
            let conn = Connectivity::lagrange_1d(&mp);
            let g = force_order(hflux, p);
            let rule = gauss_legendre(g);
            let c = force_coefficients(p, 1, g);
            let nn = mp.numnp;
            let mut terms = Vec::new();
            for axis in 0..2 {
                for side in 0..2 {
                    let fixed_coord = if side == 0 { 0 } else { nn - 1 };
                    let tang = 1 - axis;
                    let node = |t: usize| -> usize {
                        let mut idx = [0usize; 2];
                        idx[axis] = fixed_coord;
                        idx[tang] = t;
                        idx[0] | (idx[1] << n)
                    };
                    // face elements with all nodes Neumann
                    let chi: Vec<bool> = (0..nn)
                        .map(|e| e < mp.numel && (0..mp.nen).all(|j| mask.neumann[node(conn.get(j, e))]))
                        .collect();
                    if !chi.iter().any(|&b| b) {
                        continue;
                    }
                    for (j, cj) in c.iter().enumerate() {
                        // diagonal on the element register: sum_l c_jl h(x_l^e) chi_e
                        let diag: Vec<C64> = (0..nn)
                            .map(|e| {
                                if !chi[e] {
                                    return r(0.0);
                                }
                                let v: f64 = (0..g)
                                    .map(|l| {
                                        let mut x = [0.0; 2];
                                        x[axis] = fixed_coord as f64 * mp.node_spacing();
                                        x[tang] = rule.element_point(l, e, mp.h);
                                        cj[l] * hflux.eval(&x)
                                    })
                                    .sum();
                                r(v)
                            })
                            .collect();
                        if diag.iter().all(|z| z.norm() == 0.0) {
                            continue;
                        }
                        let inner = be_diagonal(&diag, None)?;
                        let (a, _) = indicator_dd(p, n, 1, j)?;
                        let face = be_product_chain(&[a.clone(), inner, a.adjoint()])?;
                        // embed: tangential axis carries the face operator, the normal axis
                        // is projected onto the face coordinate
                        let proj: Vec<C64> = (0..nn).map(|t| if t == fixed_coord { r(1.0) } else { r(0.0) }).collect();
                        let pbe = be_diagonal(&proj, Some(1.0))?;
                        let (hi, lo) = if axis == 0 { (face, pbe) } else { (pbe, face) };
                        terms.push(crate::qcore::be_tensor(&hi, &lo));
                    }
                }
            }
            if terms.is_empty() {
                return Ok(ForceAssembly::zero(dim));
            }
            let be = be_lcu_real(&terms, &vec![1.0; terms.len()])?;
            finish(be, dim, mp.h)
        }
        _ => Err(Error::Invalid("Neumann faces are supported for d <= 2".into())),
    }
}

/// Classical Neumann vector with the same face rule.
pub fn classical_neumann_vector(hflux: &PolySpec, mask: &DomainMask, p: usize) -> Result<Vec<f64>> {
    let (d, n) = (mask.d, mask.n);
    let mp = MeshParams::new(d, p, n)?;
    let mut out = vec![0.0; mp.total_nodes()];
    match d {
        1 => {
            for (v, o) in out.iter_mut().enumerate() {
                if mask.neumann[v] {
                    *o = hflux.eval1(mp.node_coord(v));
                }
            }
        }
        2 => {
            let conn = Connectivity::lagrange_1d(&mp);
            let g = force_order(hflux, p);
            let rule = gauss_legendre(g);
            let c = force_coefficients(p, 1, g);
            let nn = mp.numnp;
            for axis in 0..2 {
                for side in 0..2 {
                    let fixed_coord = if side == 0 { 0 } else { nn - 1 };
                    let tang = 1 - axis;
                    let node = |t: usize| -> usize {
                        let mut idx = [0usize; 2];
                        idx[axis] = fixed_coord;
                        idx[tang] = t;
                        idx[0] | (idx[1] << n)
                    };
                    for e in 0..mp.numel {
                        if !(0..mp.nen).all(|j| mask.neumann[node(conn.get(j, e))]) {
                            continue;
                        }
                        for (j, cj) in c.iter().enumerate() {
                            let v: f64 = (0..g)
                                .map(|l| {
                                    let mut x = [0.0; 2];
                                    x[axis] = fixed_coord as f64 * mp.node_spacing();
                                    x[tang] = rule.element_point(l, e, mp.h);
                                    cj[l] * hflux.eval(&x)
                                })
                                .sum();
                            out[node(conn.get(j, e))] += mp.h * v;
                        }
                    }
                }
            }
        }
        _ => return Err(Error::Invalid("Neumann faces are supported for d <= 2".into())),
    }
    Ok(out)
}

/// ||v|| for a real vector.
pub fn vector_norm(v: &[f64]) -> f64 {
    norm2_real(v)
}

