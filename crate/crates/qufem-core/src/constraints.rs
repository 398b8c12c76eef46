//! Dirichlet conditions: block-encodings of 2x2 partitioned operators, partitioned
//! right-hand sides, the Lagrange-multiplier system and the projector method.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mesh::{boundary_oracle, boundary_projector_be, unit_position_be, DomainMask};
use crate::num::{norm2_real, r, sqrt, C64, ZERO};
use crate::op::Operator;
use crate::qcore::{be_lcu_real, be_on_system_qubits, be_product, BlockEncoding};
use crate::quad::poly::PolySpec;
use crate::quad::transform::{mqet_transform, poly_transform_diagonal};
use crate::sparse::to_dense;

/// 2-qubit permutation on (low = block bit, high = flag) given as an index table.
fn top_pair(table: [usize; 4], below: usize) -> Result<Operator> {
    let op = Operator::perm_table(table.to_vec())?;
    Ok(Operator::on_qubits(op, vec![below, below + 1], below + 2))
}

/// (alpha, m + 1)-encoding of |i><j| (x) A. Internal layout (flag | block bit | anc | sys)
/// is permuted to (flag | anc | block bit | sys) so the block bit joins the system.
pub fn be_block_entry(a: &BlockEncoding, i: usize, j: usize) -> Result<BlockEncoding> {
    if i > 1 || j > 1 {
        return Err(Error::Invalid("block indices must be 0 or 1".into()));
    }
    let (m, n) = (a.ancillas, a.system_qubits);
    let low = m + n;
    // index = block + 2 flag; controlled-on-0 X flips the block bit while the flag is 0
    let cx = top_pair([1, 0, 2, 3], low)?;
    let swap = top_pair([0, 2, 1, 3], low)?;
    let cu = Operator::controlled(2, 0, a.unitary.clone());
    let mut seq = Vec::with_capacity(4);
    if i == 1 {
        seq.push(cx.clone());
    }
    seq.push(cu);
    seq.push(swap);
    if j == 1 {
        seq.push(cx);
    }
    let inner = Operator::product(&seq);
    let mut pos: Vec<usize> = (0..n).collect();
    pos.extend(n + 1..n + 1 + m);
    pos.push(n);
    pos.push(n + m + 1);
    let u = Operator::on_qubits(inner, pos, n + m + 2);
    Ok(BlockEncoding::new(u, a.alpha, m + 1, n + 1).with_epsilon(a.epsilon))
}

/// LCU of the |i><j| (x) A_ij encodings with weights alpha_ij, so the subnormalization is
/// sum alpha_ij; `None` blocks are zero and omitted.
pub fn block_encode_partitioned(blocks: &[[Option<BlockEncoding>; 2]; 2]) -> Result<BlockEncoding> {
    let mut terms = Vec::with_capacity(4);
    let mut n = None;
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            if let Some(b) = b {
                match n {
                    None => n = Some(b.system_qubits),
                    Some(n0) if n0 != b.system_qubits => {
                        return Err(Error::DimensionMismatch { expected: n0, got: b.system_qubits })
                    }
                    _ => {}
                }
                terms.push(be_block_entry(b, i, j)?);
            }
        }
    }
    if terms.is_empty() {
        return Err(Error::ZeroNorm);
    }
    // equal weights with unequal alphas: the LCU absorbs alpha_ij / alpha_max
    let ones = vec![1.0; terms.len()];
    be_lcu_real(&terms, &ones)
}

/// [[A, B], [B^dagger, 0]] as the top-left half of the enlarged operator
/// [[A, B, 0, 0], [B^dagger, 0, I, 0], [0, I, 0, I], [0, 0, I, I]], with subnormalization
/// alpha + beta. Layout (sel | top | anc | block bit | sys).
pub fn be_saddle(a: &BlockEncoding, b: &BlockEncoding) -> Result<BlockEncoding> {
    if a.system_qubits != b.system_qubits {
        return Err(Error::DimensionMismatch { expected: a.system_qubits, got: b.system_qubits });
    }
    let n = a.system_qubits;
    let m = a.ancillas.max(b.ancillas);
    let low = m + n;
    let (ua, ub) = (a.pad_ancillas(m - a.ancillas).unitary, b.pad_ancillas(m - b.ancillas).unitary);
    // index = q1 + 2 q0 on the two top qubits
    let swap = top_pair([0, 2, 1, 3], low)?;
    let d = Operator::product(&[Operator::controlled(2, 0, ua), swap]);
    let x1 = top_pair([1, 0, 3, 2], low)?;
    let o = Operator::product(&[x1, Operator::controlled(2, 0, ub.adjoint()), Operator::controlled(2, 1, ub)]);
    let mut pos: Vec<usize> = (0..n).collect();
    pos.extend(n + 1..n + 1 + m);
    pos.push(n);
    pos.push(n + m + 1);
    let place = |op: Operator| Operator::on_qubits(op, pos.clone(), n + m + 2);
    let ud = BlockEncoding::new(place(d), a.alpha, m + 1, n + 1);
    let uo = BlockEncoding::new(place(o), b.alpha, m + 1, n + 1);
    be_lcu_real(&[ud, uo], &[1.0, 1.0])
}

/// (|0>|f0> + |1>|f1>) / sqrt(2) from H on the top qubit and two controlled preparations.
pub fn partitioned_rhs(f0: &[C64], f1: &[C64]) -> Result<Vec<C64>> {
    partitioned_rhs_weighted(1.0, f0, 1.0, f1)
}

/// (w0 |0>|f0> + w1 |1>|f1>) / ||(w0, w1)|| with an R_y rotation in place of H; the
/// inputs must be normalized, a zero weight skips the normalization check.
pub fn partitioned_rhs_weighted(w0: f64, f0: &[C64], w1: f64, f1: &[C64]) -> Result<Vec<C64>> {
    if f0.len() != f1.len() {
        return Err(Error::DimensionMismatch { expected: f0.len(), got: f1.len() });
    }
    let wn = sqrt(w0 * w0 + w1 * w1);
    if wn == 0.0 || w0 < 0.0 || w1 < 0.0 {
        return Err(Error::Invalid("weights must be non-negative and not both zero".into()));
    }
    let dim = f0.len();
    let prep = |f: &[C64], w: f64| -> Result<Operator> {
        if w == 0.0 {
            return Ok(Operator::identity(crate::num::ceil_log2(dim)));
        }
        Operator::state_prep(f)
    };
    let (u0, u1) = (prep(f0, w0)?, prep(f1, w1)?);
    let nq = u0.qubits();
    let (c0, s0) = (w0 / wn, w1 / wn);
    let ry = Operator::dense(crate::num::DMat::from_real(2, 2, &[c0, -s0, s0, c0]));
    let top = Operator::on_qubits(ry, vec![nq], nq + 1);
    let sel = Operator::select(nq, vec![Some(u0), Some(u1)]);
    Ok(to_dense(&Operator::product(&[sel, top]).column(0), 2 * dim))
}

/// The 2x2 system [[L, I - P_int], [I - P_int, P_int]] (u, lambda) = (f, u_bar).
#[derive(Clone, Debug)]
pub struct BlockSystem {
    pub be: BlockEncoding,
    /// Normalized (f, u_bar) block vector.
    pub rhs: Vec<C64>,
    /// ||(f, u_bar)||, so rhs_norm * rhs is the raw right-hand side.
    pub rhs_norm: f64,
    pub f: Vec<f64>,
    pub ubar: Vec<f64>,
    pub pint: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct BlockSolution {
    pub u: Vec<f64>,
    pub lambda: Vec<f64>,
    pub u_norm: f64,
    pub lambda_norm: f64,
}

impl BlockSolution {
    /// Split a stacked (u, lambda) vector.
    pub fn from_stacked(x: &[f64]) -> Self {
        let h = x.len() / 2;
        let (u, lambda) = (x[..h].to_vec(), x[h..].to_vec());
        BlockSolution { u_norm: norm2_real(&u), lambda_norm: norm2_real(&lambda), u, lambda }
    }

    /// max |u_j - u_bar_j| over fixed nodes.
    pub fn constraint_defect(&self, mask: &DomainMask, ubar: &[f64]) -> f64 {
        mask.fixed
            .iter()
            .zip(self.u.iter().zip(ubar))
            .filter(|(f, _)| **f)
            .map(|(_, (u, b))| (u - b).abs())
            .fold(0.0, f64::max)
    }
}

/// u_bar restricted to fixed nodes.
fn restrict_fixed(mask: &DomainMask, ubar: &[f64]) -> Vec<f64> {
    ubar.iter().zip(&mask.fixed).map(|(&v, &f)| if f { v } else { 0.0 }).collect()
}

fn real_state(v: &[f64]) -> (Vec<C64>, f64) {
    let nrm = norm2_real(v);
    if nrm == 0.0 {
        return (vec![ZERO; v.len()], 0.0);
    }
    (v.iter().map(|&x| r(x / nrm)).collect(), nrm)
}

/// Lagrange-multiplier system. Entries of `ubar` off the fixed nodes are zeroed, so interior
/// multipliers are pinned to zero by the P_int block.
pub fn lagrange_system(be_l: &BlockEncoding, mask: &DomainMask, f: &[f64], ubar: &[f64]) -> Result<BlockSystem> {
    let dim = be_l.system_dim();
    if mask.len() != dim || f.len() != dim || ubar.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: mask.len().min(f.len()).min(ubar.len()) });
    }
    let (_, pint_be) = boundary_oracle(mask);
    let pbd = boundary_projector_be(mask);
    let be = if mask.numbp() == 0 {
        block_encode_partitioned(&[[Some(be_l.clone()), None], [None, Some(pint_be)]])?
    } else {
        block_encode_partitioned(&[[Some(be_l.clone()), Some(pbd.clone())], [Some(pbd), Some(pint_be)]])?
    };
    let ub = restrict_fixed(mask, ubar);
    let (fs, fnorm) = real_state(f);
    let (us, unorm) = real_state(&ub);
    let rhs_norm = sqrt(fnorm * fnorm + unorm * unorm);
    if rhs_norm == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let rhs = partitioned_rhs_weighted(fnorm, &fs, unorm, &us)?;
    Ok(BlockSystem { be, rhs, rhs_norm, f: f.to_vec(), ubar: ub, pint: mask.interior_indicator() })
}

/// Projector method: L_D = P L P + (I - P) and b_D = P b - (P L - I)(I - P) u_bar, both
/// built from block-encoding applications. Using (L - I) in place of (P L - I) agrees only
/// when L (I - P) u_bar vanishes on the fixed nodes; the projected form keeps the fixed
/// rows equal to u_bar in general.
pub fn projector_dirichlet(
    be_l: &BlockEncoding,
    mask: &DomainMask,
    b: &[f64],
    ubar: &[f64],
) -> Result<(BlockEncoding, Vec<f64>)> {
    let dim = be_l.system_dim();
    if mask.len() != dim || b.len() != dim || ubar.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: mask.len().min(b.len()).min(ubar.len()) });
    }
    let (_, p) = boundary_oracle(mask);
    let pbd = boundary_projector_be(mask);
    let plp = be_product(&p, &be_product(be_l, &p)?)?;
    let ld = if mask.numbp() == 0 { plp } else { be_lcu_real(&[plp, pbd.clone()], &[1.0, 1.0])? };
    let cplx = |v: &[f64]| -> Vec<C64> { v.iter().map(|&x| r(x)).collect() };
    let ub = cplx(&restrict_fixed(mask, ubar));
    let bd_u = pbd.apply_block(&ub);
    let l_bd_u = be_l.apply_block(&bd_u);
    let pl_bd_u = p.apply_block(&l_bd_u);
    let pb = p.apply_block(&cplx(b));
    let rhs: Vec<f64> = (0..dim).map(|i| (pb[i] - pl_bd_u[i] + bd_u[i]).re).collect();
    Ok((ld, rhs))
}

/// Dirichlet data: explicit per-node values or a polynomial in the node coordinates.
#[derive(Clone, Debug)]
pub enum DirichletData {
    Values(Vec<f64>),
    Poly(PolySpec),
}

/// u_bar: boundary entries g(x_b), zero elsewhere. The polynomial path evaluates g on the
/// whole grid through a transform of the coordinate encodings and multiplies by P_bd.
pub fn dirichlet_state(mask: &DomainMask, g: &DirichletData) -> Result<Vec<f64>> {
    match g {
        DirichletData::Values(v) => {
            if v.len() != mask.len() {
                return Err(Error::DimensionMismatch { expected: mask.len(), got: v.len() });
            }
            Ok(restrict_fixed(mask, v))
        }
        DirichletData::Poly(poly) => {
            let (d, n) = (mask.d, mask.n);
            if poly.vars != d {
                return Err(Error::Invalid("boundary polynomial arity must equal the dimension".into()));
            }
            if poly.is_zero() {
                return Ok(vec![0.0; mask.len()]);
            }
            let axes: Vec<BlockEncoding> = (0..d)
                .map(|i| {
                    let pos: Vec<usize> = (i * n..(i + 1) * n).collect();
                    be_on_system_qubits(&unit_position_be(n), &pos, d * n)
                })
                .collect();
            let gbe = if d == 1 { poly_transform_diagonal(&axes[0], poly)? } else { mqet_transform(&axes, poly)?.be };
            let be = be_product(&boundary_projector_be(mask), &gbe)?;
            let ones = vec![r(1.0); mask.len()];
            let v = be.apply_block(&ones);
            Ok(v.iter().map(|z| z.re).collect())
        }
    }
}
