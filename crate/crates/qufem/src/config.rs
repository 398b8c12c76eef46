//! JSON configuration for PDE coefficients and polynomials.
//!
//! A coefficient is either a bare number or a polynomial object:
//!
//! ```json
//! {
//!   "diffusivity": { "basis": "monomial", "coefficients": [1.0, 0.5] },
//!   "reaction": 0.0,
//!   "force": { "terms": [{ "exponents": [1, 1], "coefficient": 1.0 }] },
//!   "dirichlet": { "poly": { "basis": "chebyshev", "degree": 1, "coefficients": [0.0, 1.0] } }
//! }
//! ```
//!
//! Dense `coefficients` describe a univariate polynomial; `terms` describe a multivariate
//! one in the monomial basis. Polynomials default to the unit box.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qufem_core::constraints::DirichletData;
use qufem_core::quad::poly::PolySpec;
use qufem_core::solver::{Coefficient, PDECoefficients};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisConfig {
    #[default]
    Monomial,
    Chebyshev,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermConfig {
    pub exponents: Vec<usize>,
    pub coefficient: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyConfig {
    #[serde(default)]
    pub basis: BasisConfig,
    /// Checked against the coefficients when given.
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default)]
    pub terms: Option<Vec<TermConfig>>,
    #[serde(default)]
    pub domain: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub sup_norm_bound: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffConfig {
    Const(f64),
    Poly(PolyConfig),
}

impl Default for CoeffConfig {
    fn default() -> Self {
        CoeffConfig::Const(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DirichletConfig {
    Values(Vec<f64>),
    Poly(PolyConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeConfig {
    #[serde(default = "one")]
    pub diffusivity: CoeffConfig,
    #[serde(default)]
    pub reaction: CoeffConfig,
    #[serde(default)]
    pub force: CoeffConfig,
    #[serde(default)]
    pub neumann: CoeffConfig,
    #[serde(default)]
    pub dirichlet: Option<DirichletConfig>,
}

fn one() -> CoeffConfig {
    CoeffConfig::Const(1.0)
}

impl Default for PdeConfig {
    fn default() -> Self {
        PdeConfig {
            diffusivity: one(),
            reaction: CoeffConfig::default(),
            force: CoeffConfig::default(),
            neumann: CoeffConfig::default(),
            dirichlet: None,
        }
    }
}

impl PolyConfig {
    /// Polynomial in `vars` variables.
    pub fn to_poly(&self, vars: usize) -> Result<PolySpec> {
        let domain: Vec<(f64, f64)> = match &self.domain {
            Some(d) => d.iter().map(|b| (b[0], b[1])).collect(),
            None => PolySpec::unit_box(vars),
        };
        if domain.len() != vars {
            bail!("polynomial domain has {} intervals, expected {vars}", domain.len());
        }
        let poly = match (&self.coefficients, &self.terms) {
            (Some(_), Some(_)) => bail!("give either `coefficients` or `terms`, not both"),
            (None, None) => bail!("polynomial has no coefficients"),
            (Some(c), None) => {
                if vars != 1 {
                    bail!("dense coefficients describe a univariate polynomial; use `terms` for {vars} variables");
                }
                match self.basis {
                    BasisConfig::Monomial => PolySpec::univariate(c, domain[0]),
                    BasisConfig::Chebyshev => PolySpec::from_chebyshev(c, domain[0]),
                }
            }
            (None, Some(t)) => {
                if self.basis != BasisConfig::Monomial {
                    bail!("`terms` are monomial; the chebyshev basis takes dense coefficients");
                }
                let terms = t.iter().map(|t| (t.exponents.clone(), t.coefficient)).collect();
                PolySpec::new(vars, terms, domain)?
            }
        };
        if let Some(deg) = self.degree {
            if poly.degree() > deg {
                bail!("polynomial has degree {} but `degree` is {deg}", poly.degree());
            }
        }
        Ok(match self.sup_norm_bound {
            Some(b) if b < poly.sup_norm_bound => bail!("sup_norm_bound {b} is below the sampled maximum {}", poly.sup_norm_bound),
            Some(b) => poly.with_sup_norm(b),
            None => poly,
        })
    }
}

impl CoeffConfig {
    pub fn to_coefficient(&self, vars: usize) -> Result<Coefficient> {
        Ok(match self {
            CoeffConfig::Const(c) => Coefficient::Const(*c),
            CoeffConfig::Poly(p) => Coefficient::Poly(p.to_poly(vars)?),
        })
    }
}

impl PdeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing coefficient file")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    /// Coefficients for a d-dimensional problem with `nodes` grid nodes.
    pub fn to_pde(&self, d: usize, nodes: usize) -> Result<PDECoefficients> {
        let dirichlet = match &self.dirichlet {
            None => DirichletData::Values(vec![0.0; nodes]),
            Some(DirichletConfig::Values(v)) => {
                if v.len() != nodes {
                    bail!("dirichlet values have length {}, expected {nodes}", v.len());
                }
                DirichletData::Values(v.clone())
            }
            Some(DirichletConfig::Poly(p)) => DirichletData::Poly(p.to_poly(d)?),
        };
        Ok(PDECoefficients {
            diffusivity: self.diffusivity.to_coefficient(d)?,
            reaction: self.reaction.to_coefficient(d)?,
            force: self.force.to_coefficient(d)?,
            neumann: self.neumann.to_coefficient(d)?,
            dirichlet,
        })
    }
}
