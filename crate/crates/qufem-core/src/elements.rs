//! Lagrange elements on [0, 1], elemental stiffness and mass arrays, their tensor
//! extensions and the elemental prepare oracles.

use alloc::vec::Vec;

use crate::error::Result;
use crate::num::{gate2, r, sqrt, DMat, C64, ONE};
use crate::op::Operator;
use crate::qcore::{make_prep_pair, StatePrepPair};
use crate::quad::gauss::gauss_legendre;

#[derive(Clone, Debug)]
pub struct LagrangeElement {
    pub p: usize,
    pub nodes: Vec<f64>,
}

impl LagrangeElement {
    pub fn new(p: usize) -> Self {
        assert!(p >= 1);
        LagrangeElement { p, nodes: (0..=p).map(|m| m as f64 / p as f64).collect() }
    }

    pub fn eval(&self, j: usize, x: f64) -> f64 {
        basis_eval(self.p, j, x)
    }

    pub fn grad(&self, j: usize, x: f64) -> f64 {
        basis_grad(self.p, j, x)
    }
}

/// N_j(x) = prod_{m != j} (x - x_m) / (x_j - x_m) with x_m = m/p.
pub fn basis_eval(p: usize, j: usize, x: f64) -> f64 {
    assert!(j <= p);
    let pf = p as f64;
    let xj = j as f64 / pf;
    (0..=p).filter(|&m| m != j).map(|m| (x - m as f64 / pf) / (xj - m as f64 / pf)).product()
}

pub fn basis_grad(p: usize, j: usize, x: f64) -> f64 {
    assert!(j <= p);
    let pf = p as f64;
    let xj = j as f64 / pf;
    let mut s = 0.0;
    for q in (0..=p).filter(|&q| q != j) {
        let mut t = 1.0 / (xj - q as f64 / pf);
        for m in (0..=p).filter(|&m| m != j && m != q) {
            t *= (x - m as f64 / pf) / (xj - m as f64 / pf);
        }
        s += t;
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ElementalArrays {
    pub p: usize,
    /// (p+1) x (p+1), real entries.
    pub ke: DMat,
    pub me: DMat,
    pub ke_abs_sum: f64,
    pub me_abs_sum: f64,
}

impl ElementalArrays {
    pub fn nen(&self) -> usize {
        self.p + 1
    }

    /// Row-major vec(K^e).
    pub fn vec_ke(&self) -> Vec<C64> {
        self.ke.data.clone()
    }

    pub fn vec_me(&self) -> Vec<C64> {
        self.me.data.clone()
    }
}

/// K^e and M^e on [0, 1] with a G-point rule.
pub fn elemental_arrays_with(p: usize, g: usize) -> ElementalArrays {
    let rule = gauss_legendre(g);
    let nen = p + 1;
    let mut ke = DMat::zeros(nen, nen);
    let mut me = DMat::zeros(nen, nen);
    for l in 0..g {
        let (x, w) = (rule.ref_point(l), rule.ref_weight(l));
        for j in 0..nen {
            for k in 0..nen {
                ke[(j, k)] += r(w * basis_grad(p, j, x) * basis_grad(p, k, x));
                me[(j, k)] += r(w * basis_eval(p, j, x) * basis_eval(p, k, x));
            }
        }
    }
    let ke_abs_sum = ke.abs_sum();
    let me_abs_sum = me.abs_sum();
    ElementalArrays { p, ke, me, ke_abs_sum, me_abs_sum }
}

/// Exact elemental arrays: the integrands have degree <= 2p, so G = p + 1 suffices.
pub fn elemental_arrays(p: usize) -> ElementalArrays {
    elemental_arrays_with(p, p + 1)
}

/// (K^{e,d}, M^{e,d}); the first Kronecker factor is the most-significant (highest) axis.
pub fn tensor_elemental(p: usize, d: usize) -> (DMat, DMat) {
    assert!(d >= 1);
    let a = elemental_arrays(p);
    let mut m = a.me.clone();
    for _ in 1..d {
        m = m.kron(&a.me);
    }
    let nd = (p + 1).pow(d as u32);
    let mut k = DMat::zeros(nd, nd);
    for slot in 0..d {
        let mut t = if slot == 0 { a.ke.clone() } else { a.me.clone() };
        for s in 1..d {
            t = t.kron(if s == slot { &a.ke } else { &a.me });
        }
        k = k.add(&t);
    }
    (k, m)
}

/// Prepare pairs for vec(K^e) and vec(M^e); p = 1 uses the explicit circuits.
pub fn elemental_prep_oracles(arrays: &ElementalArrays) -> Result<(StatePrepPair, StatePrepPair)> {
    let mut kp = make_prep_pair(&arrays.vec_ke())?;
    let mut mp = make_prep_pair(&arrays.vec_me())?;
    if arrays.p == 1 {
        kp.prep = Operator::dense(prep_ke_p1());
        kp.prep_tilde = Operator::dense(prep_ke_tilde_p1());
        mp.prep = Operator::dense(prep_me_p1());
        mp.prep_tilde = Operator::dense(prep_me_p1().adjoint());
    }
    Ok((kp, mp))
}

/// Two-qubit modular shift |i> -> |i + k mod 4> as a matrix.
fn shift4(k: i64) -> DMat {
    let mut m = DMat::zeros(4, 4);
    for i in 0..4i64 {
        m[((i + k).rem_euclid(4) as usize, i as usize)] = ONE;
    }
    m
}

/// S^{-1} ((S H Z) (x) H), with S the phase gate inside the bracket.
pub fn prep_ke_p1() -> DMat {
    let shz = gate2::s().matmul(&gate2::h()).matmul(&gate2::z());
    shift4(-1).matmul(&shz.kron(&gate2::h()))
}

/// ((Z H S) (x) H) S^1.
pub fn prep_ke_tilde_p1() -> DMat {
    let zhs = gate2::z().matmul(&gate2::h()).matmul(&gate2::s());
    zhs.kron(&gate2::h()).matmul(&shift4(1))
}

/// theta_M = 2 arccos(sqrt(2/3)).
pub fn theta_m() -> f64 {
    2.0 * libm::acos(sqrt(2.0 / 3.0))
}

/// S^{-1} (R_y(theta_M) (x) H).
pub fn prep_me_p1() -> DMat {
    shift4(-1).matmul(&gate2::ry(theta_m()).kron(&gate2::h()))
}
