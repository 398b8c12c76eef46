//! End-to-end solves: PDE coefficients to a block-encoded operator, system extraction, the
//! classical stand-in for the QLSP solver and norm recovery.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::{assemble_global_dd, AssembledArray};
use crate::constraints::BlockSystem;
use crate::error::{Error, Result};
use crate::linalg::{singular_extremes, solve, RealMat};
use crate::mesh::MeshParams;
use crate::num::{norm2_real, powi, sqrt};
use crate::qcore::{be_lcu_real, extract_block, BlockEncoding};
use crate::quad::poly::PolySpec;
use crate::quad::varcoef::{assemble_variable_coeff, required_order, BilinearKind};
use crate::sparse::SparseMat;

/// Largest system dimension `extract_system` accepts.
pub const EXTRACT_LIMIT: usize = 1 << 13;

/// Constant or polynomial coefficient.
#[derive(Clone, Debug)]
pub enum Coefficient {
    Const(f64),
    Poly(PolySpec),
}

impl Coefficient {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Poly(p) => p.eval(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Const(c) => *c == 0.0,
            Coefficient::Poly(p) => p.is_zero(),
        }
    }

    /// Polynomial form on [0, 1]^vars.
    pub fn to_poly(&self, vars: usize) -> PolySpec {
        match self {
            Coefficient::Const(c) => PolySpec::constant(vars, *c, PolySpec::unit_box(vars)),
            Coefficient::Poly(p) => p.clone(),
        }
    }

    /// Smallest value over a grid of samples on [0, 1]^d.
    pub fn sampled_min(&self, d: usize) -> f64 {
        match self {
            Coefficient::Const(c) => *c,
            Coefficient::Poly(p) => {
                let k = 21usize;
                (0..k.pow(d as u32))
                    .map(|mut v| {
                        let x: Vec<f64> = (0..d)
                            .map(|_| {
                                let t = (v % k) as f64 / (k - 1) as f64;
                                v /= k;
                                t
                            })
                            .collect();
                        p.eval(&x)
                    })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

/// Coefficients of -div(D grad u) + k u = f.
#[derive(Clone, Debug)]
pub struct PDECoefficients {
    pub diffusivity: Coefficient,
    pub reaction: Coefficient,
    pub force: Coefficient,
    pub neumann: Coefficient,
    pub dirichlet: crate::constraints::DirichletData,
}

impl PDECoefficients {
    /// -lap u = f with homogeneous Dirichlet data on `dim` nodes.
    pub fn poisson(force: Coefficient, dim: usize) -> Self {
        PDECoefficients {
            diffusivity: Coefficient::Const(1.0),
            reaction: Coefficient::Const(0.0),
            force,
            neumann: Coefficient::Const(0.0),
            dirichlet: crate::constraints::DirichletData::Values(vec![0.0; dim]),
        }
    }

    /// Diffusivity must stay positive on the domain.
    pub fn check_coercive(&self, d: usize) -> Result<()> {
        let m = self.diffusivity.sampled_min(d);
        if m <= 0.0 {
            return Err(Error::Invalid("diffusivity is not bounded away from zero".into()));
        }
        if self.reaction.sampled_min(d) < 0.0 {
            return Err(Error::Invalid("reaction coefficient is negative".into()));
        }
        Ok(())
    }
}

/// Block-encoding of the physical operator h^(d-2) K_D + h^d M_k, with K_D and M_k the
/// reference-scaled arrays for the given coefficients.
pub fn scaled_operator(coef: &PDECoefficients, d: usize, p: usize, n: usize) -> Result<BlockEncoding> {
    coef.check_coercive(d)?;
    let mp = MeshParams::new(d, p, n)?;
    let (hk, hm) = (powi(mp.h, d as i32 - 2), powi(mp.h, d as i32));
    let mut terms = Vec::with_capacity(2);
    let mut w = Vec::with_capacity(2);
    let constant = matches!(coef.diffusivity, Coefficient::Const(_)) && matches!(coef.reaction, Coefficient::Const(_));
    if constant {
        let (stiff, mass) = assemble_global_dd(d, p, n)?;
        let dk = coef.diffusivity.eval(&[]);
        terms.push(stiff.be);
        w.push(dk * hk);
        let kr = coef.reaction.eval(&[]);
        if kr != 0.0 {
            terms.push(mass.be);
            w.push(kr * hm);
        }
    } else {
        let dpoly = coef.diffusivity.to_poly(d);
        let stiff = assemble_variable_coeff(&dpoly, BilinearKind::Stiffness, p, n, required_order(&dpoly, p), d)?;
        terms.push(stiff.be);
        w.push(hk);
        if !coef.reaction.is_zero() {
            let kpoly = coef.reaction.to_poly(d);
            let mass = assemble_variable_coeff(&kpoly, BilinearKind::Mass, p, n, required_order(&kpoly, p), d)?;
            terms.push(mass.be);
            w.push(hm);
        }
    }
    be_lcu_real(&terms, &w)
}

/// Something with a block-encoded system matrix.
pub trait Extractable {
    fn block_encoding(&self) -> &BlockEncoding;
}

impl Extractable for BlockEncoding {
    fn block_encoding(&self) -> &BlockEncoding {
        self
    }
}

impl Extractable for AssembledArray {
    fn block_encoding(&self) -> &BlockEncoding {
        &self.be
    }
}

impl Extractable for BlockSystem {
    fn block_encoding(&self) -> &BlockEncoding {
        &self.be
    }
}

/// alpha times the post-selected block, column by column.
pub fn extract_system<T: Extractable + ?Sized>(sys: &T) -> Result<SparseMat> {
    let be = sys.block_encoding();
    let dim = be.system_dim();
    if dim > EXTRACT_LIMIT {
        return Err(Error::TooLarge(dim));
    }
    Ok(extract_block(be).prune(1e-14 * be.alpha))
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    /// Solution of the extracted system (the stacked (u, lambda) for a block system).
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Norm of x recovered from alpha, beta, ||f|| and p_qlsp.
    pub u_norm: f64,
    /// ||x|| computed directly.
    pub direct_norm: f64,
    pub p_qlsp: f64,
    pub kappa: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// ||L x - f||.
    pub residual: f64,
    pub rhs_norm: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SolveReport {
    /// |u_norm - direct_norm| / direct_norm.
    pub fn norm_recovery_error(&self) -> f64 {
        if self.direct_norm == 0.0 {
            return self.u_norm.abs();
        }
        (self.u_norm - self.direct_norm).abs() / self.direct_norm
    }
}

/// Direct solve standing in for a QLSP solver. The success probability of the ideal
/// solver, p = (beta / alpha)^2 ||L^-1 f_hat||^2, is computed from a solve on the
/// normalized right-hand side; the norm is then recovered as (alpha / beta) ||f|| sqrt(p)
/// and compared against a separate solve on the raw right-hand side. `beta_lower`
/// defaults to the smallest singular value.
pub fn solve_qlsp(l: &SparseMat, alpha: f64, rhs: &[f64], beta_lower: Option<f64>) -> Result<SolveReport> {
    let m = RealMat::from_sparse(l, 1e-10 * l.max_abs().max(1.0))?;
    if rhs.len() != m.dim {
        return Err(Error::DimensionMismatch { expected: m.dim, got: rhs.len() });
    }
    let fnorm = norm2_real(rhs);
    if fnorm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let (smax, smin) = singular_extremes(&m)?;
    let beta = beta_lower.unwrap_or(smin);
    if beta <= 0.0 || beta > smin * (1.0 + 1e-6) {
        return Err(Error::Invalid("beta must be a positive lower bound on the smallest singular value".into()));
    }
    let fhat: Vec<f64> = rhs.iter().map(|v| v / fnorm).collect();
    let xhat = solve(&m, &fhat)?;
    let p_qlsp = powi(beta / alpha, 2) * powi(norm2_real(&xhat), 2);
    let u_norm = alpha / beta * fnorm * sqrt(p_qlsp);
    let x = solve(&m, rhs)?;
    let lx = m.matvec(&x);
    let residual = sqrt(lx.iter().zip(rhs).map(|(a, b)| (a - b) * (a - b)).sum());
    Ok(SolveReport {
        direct_norm: norm2_real(&x),
        u: x.clone(),
        lambda: Vec::new(),
        x,
        u_norm,
        p_qlsp,
        kappa: smax / smin,
        sigma_max: smax,
        sigma_min: smin,
        residual,
        rhs_norm: fnorm,
        alpha,
        beta,
    })
}

/// Extract and solve a Lagrange block system, splitting the solution into (u, lambda).
pub fn solve_block_system(sys: &BlockSystem) -> Result<SolveReport> {
    let l = extract_system(sys)?;
    let rhs: Vec<f64> = sys.rhs.iter().map(|z| z.re * sys.rhs_norm).collect();
    let mut rep = solve_qlsp(&l, sys.be.alpha, &rhs, None)?;
    let h = rep.u.len() / 2;
    rep.lambda = rep.u[h..].to_vec();
    rep.u.truncate(h);
    Ok(rep)
}

/// Extract and solve a plain system L x = b.
pub fn solve_encoded(be: &BlockEncoding, b: &[f64]) -> Result<SolveReport> {
    let l = extract_system(be)?;
    solve_qlsp(&l, be.alpha, b, None)
}
