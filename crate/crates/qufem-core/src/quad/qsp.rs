//! Quantum signal processing in the W_x convention: phase finding by damped least
//! squares, and the phased circuit acting on a block-encoding.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num::{abs, c, sqrt, C64, ONE, ZERO};
use crate::op::{amp_fn, Operator};
use crate::qcore::{be_hermitize, BlockEncoding};
use crate::quad::poly::PolySpec;

/// Largest supported degree.
pub const MAX_DEGREE: usize = 16;
/// Residual threshold for accepting phases.
pub const PHASE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct QSPPhases {
    pub phases: Vec<f64>,
    pub parity: usize,
    pub target: PolySpec,
    /// Max |P(x) - target(x)| over the fitting nodes.
    pub residual: f64,
}

type M2 = [[C64; 2]; 2];

fn mul2(a: &M2, b: &M2) -> M2 {
    let mut m = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

fn rz(phi: f64) -> M2 {
    let e = c(libm::cos(phi), libm::sin(phi));
    [[e, ZERO], [ZERO, e.conj()]]
}

/// U_Phi(x) = e^{i phi_0 Z} prod_j W(x) e^{i phi_j Z}, W(x) = [[x, i s], [i s, x]].
pub fn qsp_unitary(phases: &[f64], x: f64) -> [[C64; 2]; 2] {
    let s = sqrt((1.0 - x * x).max(0.0));
    let w: M2 = [[c(x, 0.0), c(0.0, s)], [c(0.0, s), c(x, 0.0)]];
    let mut u = rz(phases[0]);
    for &phi in &phases[1..] {
        u = mul2(&u, &w);
        u = mul2(&u, &rz(phi));
    }
    u
}

/// <0|U_Phi(x)|0>.
pub fn qsp_response(phases: &[f64], x: f64) -> C64 {
    qsp_unitary(phases, x)[0][0]
}

fn fit_nodes(deg: usize) -> Vec<f64> {
    let k = (2 * (deg + 1)).max(24);
    (0..k).map(|i| libm::cos(core::f64::consts::PI * (2 * i + 1) as f64 / (4 * k) as f64)).collect()
}

fn residuals(phases: &[f64], nodes: &[f64], target: &[f64]) -> Vec<f64> {
    let mut r = Vec::with_capacity(2 * nodes.len());
    for (&x, &t) in nodes.iter().zip(target) {
        let p = qsp_response(phases, x);
        r.push(p.re - t);
        r.push(p.im);
    }
    r
}

/// Solve (A + mu I) x = b for a small symmetric positive system.
fn solve_damped(a: &[Vec<f64>], b: &[f64], mu: f64) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut rhs = b.to_vec();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += mu * (1.0 + row[i]);
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| abs(m[i][col]).total_cmp(&abs(m[j][col])))?;
        if abs(m[piv][col]) < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[i][k] -= f * m[col][k];
                }
                rhs[i] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| m[i][k] * x[k]).sum();
        x[i] = (rhs[i] - s) / m[i][i];
    }
    Some(x)
}

fn sumsq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Phases whose response equals `poly` on [-1, 1]; Levenberg-Marquardt from a fixed
/// perturbation of the zero vector.
pub fn qsp_phases(poly: &PolySpec) -> Result<QSPPhases> {
    if poly.vars != 1 {
        return Err(Error::Invalid("QSP needs a univariate polynomial".into()));
    }
    let deg = poly.degree();
    if deg > MAX_DEGREE {
        return Err(Error::TooLarge(deg));
    }
    let parity = poly.parity().ok_or(Error::WrongParity(deg))?;
    let nodes = fit_nodes(deg);
    let target: Vec<f64> = nodes.iter().map(|&x| poly.eval1(x)).collect();
    if target.iter().any(|t| abs(*t) > 1.0 + 1e-12) {
        return Err(Error::Invalid("target exceeds one in magnitude".into()));
    }
    let np = deg + 1;
    let mut phi: Vec<f64> = (0..np).map(|j| 0.05 * libm::sin(1.3 * j as f64 + 0.7)).collect();
    let mut r = residuals(&phi, &nodes, &target);
    let mut cost = sumsq(&r);
    let mut mu = 1e-3;
    for _ in 0..500 {
        if cost < 1e-30 {
            break;
        }
        // forward-difference Jacobian
        let hstep = 1e-7;
        let mut jac = vec![vec![0.0; r.len()]; np];
        for (k, col) in jac.iter_mut().enumerate() {
            let mut q = phi.clone();
            q[k] += hstep;
            let rq = residuals(&q, &nodes, &target);
            for (cj, (a, b)) in col.iter_mut().zip(rq.iter().zip(&r)) {
                *cj = (a - b) / hstep;
            }
        }
        let jtj: Vec<Vec<f64>> = (0..np)
            .map(|a| (0..np).map(|b| jac[a].iter().zip(&jac[b]).map(|(x, y)| x * y).sum()).collect())
            .collect();
        let jtr: Vec<f64> = (0..np).map(|a| -jac[a].iter().zip(&r).map(|(x, y)| x * y).sum::<f64>()).collect();
        let mut improved = false;
        for _ in 0..30 {
            if let Some(step) = solve_damped(&jtj, &jtr, mu) {
                let cand: Vec<f64> = phi.iter().zip(&step).map(|(a, b)| a + b).collect();
                let rc = residuals(&cand, &nodes, &target);
                let cc = sumsq(&rc);
                if cc < cost {
                    phi = cand;
                    r = rc;
                    cost = cc;
                    mu = (mu / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    // check on a finer grid than the fitting nodes
    let residual = (0..=200)
        .map(|i| {
            let x = -1.0 + i as f64 / 100.0;
            (qsp_response(&phi, x) - c(poly.eval1(x), 0.0)).norm()
        })
        .fold(0.0, f64::max);
    if residual > PHASE_TOL {
        return Err(Error::PhaseResidual(residual));
    }
    Ok(QSPPhases { phases: phi, parity, target: poly.clone(), residual })
}

/// e^{i phi Z_Pi} with Z_Pi = +1 on ancilla |0> and -1 elsewhere, optionally preceded by Z_Pi.
fn pi_phase(q: usize, sys: usize, phi: f64, with_reflection: bool) -> Operator {
    let e = c(libm::cos(phi), libm::sin(phi));
    let ec = e.conj();
    let sign = if with_reflection { -ONE } else { ONE };
    Operator::diagonal(q, amp_fn(move |i| if i >> sys == 0 { e } else { sign * ec }), true)
}

/// Block P(A / alpha) for a Hermitian block A: the encoding is made Hermitian (one extra
/// ancilla) and each signal step is the reflection U_H Z_Pi, which acts as W(x) on every
/// invariant two-dimensional subspace up to a diagonal change of basis.
pub fn qsp_apply(be: &BlockEncoding, phases: &QSPPhases) -> BlockEncoding {
    let h = be_hermitize(be);
    let q = h.unitary.qubits();
    let sys = h.system_qubits;
    let mut factors = vec![pi_phase(q, sys, phases.phases[0], false)];
    for &phi in &phases.phases[1..] {
        factors.push(h.unitary.clone());
        factors.push(pi_phase(q, sys, phi, true));
    }
    BlockEncoding::new(Operator::product(&factors), 1.0, h.ancillas, sys)
}
