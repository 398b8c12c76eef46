//! The CLI subcommands as library functions returning serializable reports.

use std::ops::RangeInclusive;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qufem_core::assembly::{assemble_global_1d, assemble_global_dd, classical_assemble, classical_assemble_tensor, AssembledArray};
use qufem_core::demos::{cal_force, classical_operator, demo_poisson_cal, demo_square_duct, mask_bitmap, PipelineResult};
use qufem_core::elements::{elemental_arrays, tensor_elemental};
use qufem_core::gates::{division_cost, mod_p_unitary, multi_cnot, remainder_qubits, shift_op};
use qufem_core::interaction::{uoi00_p, uoi00_p1};
use qufem_core::mesh::{Connectivity, DomainMask, MeshParams};
use qufem_core::qcore::extract_block;
use qufem_core::solver::{extract_system, scaled_operator, SolveReport};
use qufem_core::sparse::SparseMat;
use serde::Serialize;

use crate::config::PdeConfig;
use crate::io::{self, CostRow};

/// Tolerances asserted by `assemble` and `demo`.
pub const ASSEMBLY_TOL: f64 = 1e-10;
pub const VARIABLE_TOL: f64 = 1e-8;
pub const SOLUTION_TOL: f64 = 1e-8;
pub const DEFECT_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct ArrayReport {
    pub name: String,
    pub alpha: f64,
    pub alpha_analytic: Option<f64>,
    pub ancillas_simulated: usize,
    pub ancillas_compressed: Option<usize>,
    pub toffoli: Option<u64>,
    pub nnz: usize,
    pub max_error_vs_classical: f64,
    pub hermiticity_defect: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssembleReport {
    pub d: usize,
    pub p: usize,
    pub n: usize,
    pub arrays: Vec<ArrayReport>,
    pub passed: bool,
}

fn array_report(name: &str, arr: &AssembledArray, classical: &SparseMat) -> (ArrayReport, SparseMat) {
    let q = extract_block(&arr.be);
    let rep = ArrayReport {
        name: name.into(),
        alpha: arr.be.alpha,
        alpha_analytic: Some(arr.alpha_analytic),
        ancillas_simulated: arr.be.ancillas,
        ancillas_compressed: Some(arr.ledger.ancillas),
        toffoli: Some(arr.cost.toffoli),
        nnz: q.nnz(),
        max_error_vs_classical: q.max_abs_diff(classical),
        hermiticity_defect: q.hermiticity_defect(),
    };
    (rep, q)
}

/// Global stiffness and mass (or the scaled operator for a coefficient file), checked
/// against element-loop assembly. Triplet files go to `out` when given.
pub fn assemble(d: usize, p: usize, n: usize, coeff: Option<&PdeConfig>, out: Option<&Path>) -> Result<AssembleReport> {
    let mp = MeshParams::new(d, p, n)?;
    let conn = Connectivity::lagrange_1d(&mp);
    let mut arrays = Vec::new();
    let mut mats = Vec::new();
    let tol;
    match coeff {
        None => {
            tol = ASSEMBLY_TOL;
            let (k, m) = assemble_global_dd(d, p, n)?;
            let (ke, me) = tensor_elemental(p, d);
            let classical = |e| if d == 1 { classical_assemble(&conn, e) } else { classical_assemble_tensor(&mp, &conn, e) };
            for (name, arr, e) in [("stiffness", &k, &ke), ("mass", &m, &me)] {
                let (rep, q) = array_report(name, arr, &classical(e));
                arrays.push(rep);
                mats.push((name, q));
            }
        }
        Some(cfg) => {
            tol = VARIABLE_TOL;
            let coef = cfg.to_pde(d, mp.total_nodes())?;
            let be = scaled_operator(&coef, d, p, n)?;
            let q = extract_system(&be)?;
            let classical = classical_operator(&coef, d, p, n)?;
            arrays.push(ArrayReport {
                name: "operator".into(),
                alpha: be.alpha,
                alpha_analytic: None,
                ancillas_simulated: be.ancillas,
                ancillas_compressed: None,
                toffoli: None,
                nnz: q.nnz(),
                max_error_vs_classical: q.max_abs_diff(&classical),
                hermiticity_defect: q.hermiticity_defect(),
            });
            mats.push(("operator", q));
        }
    }
    let passed = arrays.iter().all(|a| a.max_error_vs_classical <= tol * a.alpha.max(1.0) && a.hermiticity_defect <= tol);
    let report = AssembleReport { d, p, n, arrays, passed };
    if let Some(dir) = out {
        for (name, q) in &mats {
            io::write(dir, &format!("{name}.csv"), io::triplets_csv(q))?;
        }
        io::write(dir, "summary.json", serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub u_norm_recovered: f64,
    pub u_norm_direct: f64,
    pub norm_recovery_error: f64,
    pub lambda_norm: f64,
    pub p_qlsp: f64,
    pub kappa: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub alpha: f64,
    pub beta: f64,
    pub residual: f64,
    pub rhs_norm: f64,
}

impl From<&SolveReport> for SolveSummary {
    fn from(r: &SolveReport) -> Self {
        SolveSummary {
            u_norm_recovered: r.u_norm,
            u_norm_direct: r.direct_norm,
            norm_recovery_error: r.norm_recovery_error(),
            lambda_norm: r.lambda.iter().map(|x| x * x).sum::<f64>().sqrt(),
            p_qlsp: r.p_qlsp,
            kappa: r.kappa,
            sigma_max: r.sigma_max,
            sigma_min: r.sigma_min,
            alpha: r.alpha,
            beta: r.beta,
            residual: r.residual,
            rhs_norm: r.rhs_norm,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CostLedger {
    pub stiffness_toffoli: u64,
    pub stiffness_ancillas: usize,
    pub mass_toffoli: u64,
    pub mass_ancillas: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DemoReport {
    pub demo: String,
    pub n: usize,
    pub active_nodes: usize,
    pub fixed_nodes: usize,
    pub lagrange: SolveSummary,
    pub projector: SolveSummary,
    pub rel_error_vs_classical: f64,
    pub method_gap: f64,
    pub constraint_defect: f64,
    pub operator_alpha: f64,
    pub interior_lambda: Option<f64>,
    pub center_velocity: Option<f64>,
    pub flow_rate: Option<f64>,
    pub asymmetry: Option<f64>,
    pub l2_error: Option<f64>,
    pub cost_ledger: CostLedger,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum DemoKind {
    Cal,
    Duct,
}

fn demo_report(name: &str, res: &PipelineResult) -> Result<DemoReport> {
    let (k, m) = assemble_global_dd(res.d, res.p, res.n)?;
    let passed = res.rel_error <= SOLUTION_TOL
        && res.method_gap <= SOLUTION_TOL * res.classical_u.iter().fold(1.0f64, |a, x| a.max(x.abs()))
        && res.constraint_defect <= DEFECT_TOL
        && res.lagrange.norm_recovery_error() <= NORM_TOL
        && res.projector.norm_recovery_error() <= NORM_TOL;
    Ok(DemoReport {
        demo: name.into(),
        n: res.n,
        active_nodes: res.mask.active.iter().filter(|&&a| a).count(),
        fixed_nodes: res.mask.fixed.iter().filter(|&&a| a).count(),
        lagrange: (&res.lagrange).into(),
        projector: (&res.projector).into(),
        rel_error_vs_classical: res.rel_error,
        method_gap: res.method_gap,
        constraint_defect: res.constraint_defect,
        operator_alpha: res.alpha_operator,
        interior_lambda: None,
        center_velocity: None,
        flow_rate: None,
        asymmetry: None,
        l2_error: None,
        cost_ledger: CostLedger {
            stiffness_toffoli: k.cost.toffoli,
            stiffness_ancillas: k.ledger.ancillas,
            mass_toffoli: m.cost.toffoli,
            mass_ancillas: m.ledger.ancillas,
        },
        passed,
    })
}

/// Run a demo; with `out`, writes u.csv, u.pgm, mask.txt and summary.json (plus lambda.csv
/// for the letter domain).
pub fn demo(kind: DemoKind, n: usize, mask: Option<DomainMask>, out: Option<&Path>) -> Result<DemoReport> {
    let (report, u, lambda, mask) = match kind {
        DemoKind::Cal => {
            let d = demo_poisson_cal(n, &cal_force(), mask)?;
            let mut rep = demo_report("cal", &d.result)?;
            rep.interior_lambda = Some(d.interior_lambda);
            rep.passed &= d.interior_lambda <= DEFECT_TOL;
            (rep, d.result.lagrange.u, Some(d.result.lagrange.lambda), d.result.mask)
        }
        DemoKind::Duct => {
            if mask.is_some() {
                bail!("the duct demo runs on the full square and takes no mask");
            }
            let d = demo_square_duct(n, -1.0)?;
            let mut rep = demo_report("duct", &d.result)?;
            rep.center_velocity = Some(d.center_velocity);
            rep.flow_rate = Some(d.flow_rate);
            rep.asymmetry = Some(d.asymmetry);
            rep.l2_error = Some(d.l2_error);
            rep.passed &= d.asymmetry <= SOLUTION_TOL;
            (rep, d.result.lagrange.u, None, d.result.mask)
        }
    };
    if let Some(dir) = out {
        io::write(dir, "u.csv", io::field_csv(&u, n))?;
        io::write(dir, "u.pgm", io::field_pgm(&u, n))?;
        if let Some(l) = &lambda {
            io::write(dir, "lambda.csv", io::field_csv(l, n))?;
        }
        io::write(dir, "mask.txt", mask_bitmap(&mask).join("\n") + "\n")?;
        io::write(dir, "summary.json", serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

pub const CONSTRUCTS: [&str; 8] = ["shift", "multi-cnot", "a00", "division", "mod-p", "assembly-1d", "assembly-1d-mass", "assembly-2d"];

/// "n=3..10" (inclusive).
pub fn parse_sweep(s: &str) -> Result<RangeInclusive<usize>> {
    let body = s.strip_prefix("n=").context("sweep must look like n=3..10")?;
    let (a, b) = body.split_once("..").context("sweep must look like n=3..10")?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
    if a == 0 || a > b || b > 20 {
        bail!("sweep range {a}..{b} must satisfy 1 <= lo <= hi <= 20");
    }
    Ok(a..=b)
}

/// Toffoli and ancilla counts over a range of register sizes. Sizes the construct cannot
/// take (for example an order p that does not divide 2^n - 1) are skipped.
pub fn cost(construct: &str, ns: RangeInclusive<usize>, p: usize) -> Result<Vec<CostRow>> {
    let m = remainder_qubits(p);
    let mut rows = Vec::new();
    for n in ns {
        let (toffoli, ancillas) = match construct {
            "shift" => {
                let c = shift_op(n, 1).cost;
                (c.toffoli, c.extra_workspace_qubits)
            }
            "multi-cnot" => {
                let c = multi_cnot(n).cost;
                (c.toffoli, c.extra_workspace_qubits)
            }
            "a00" => {
                let c = if p == 1 { uoi00_p1(n, false) } else if MeshParams::new(1, p, n).is_ok() { uoi00_p(n, p, false)? } else { continue };
                (c.cost.toffoli, c.be.ancillas)
            }
            "division" => (division_cost(n, m), m),
            "mod-p" => {
                let c = mod_p_unitary(n, p)?.cost;
                (c.toffoli, m + c.extra_workspace_qubits)
            }
            "assembly-1d" | "assembly-1d-mass" => {
                if MeshParams::new(1, p, n).is_err() {
                    continue;
                }
                let a = elemental_arrays(p);
                let e = if construct == "assembly-1d" { &a.ke } else { &a.me };
                let arr = assemble_global_1d(e, p, n)?;
                (arr.cost.toffoli, arr.ledger.ancillas)
            }
            "assembly-2d" => {
                if MeshParams::new(2, p, n).is_err() {
                    continue;
                }
                let (k, _) = assemble_global_dd(2, p, n)?;
                (k.cost.toffoli, k.ledger.ancillas)
            }
            other => bail!("unknown construct {other:?}; expected one of {}", CONSTRUCTS.join(", ")),
        };
        rows.push(CostRow { construct: construct.into(), n, m, p, toffoli, ancillas });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_syntax() {
        assert_eq!(parse_sweep("n=3..10").unwrap(), 3..=10);
        assert_eq!(parse_sweep("n=4..=4").unwrap(), 4..=4);
        assert!(parse_sweep("3..10").is_err());
        assert!(parse_sweep("n=5..3").is_err());
        assert!(parse_sweep("n=x..3").is_err());
    }

    #[test]
    fn division_rows() {
        let rows = cost("division", 4..=4, 3).unwrap();
        assert_eq!(rows[0].toffoli, 270);
        assert_eq!(rows[0].m, 2);
        assert!(cost("nope", 3..=3, 1).is_err());
    }
}
