//! JSON input: a named factory state or an explicit state/operator.
//!
//! ```json
//! {"factory": {"name": "multicat", "params": {"n": 4, "c": [0.6, 0.8]}}}
//! {"explicit": {"shape": [2, 2], "kind": "density", "data": [[[0.25, 0], ...], ...]}}
//! ```
//!
//! Complex entries are `[re, im]` pairs or plain real numbers. Matrices are
//! nested row by row in the composite basis order (first part slowest).

use entmeter::manybody::{self, CouplingRange, FockSpace};
use entmeter::states::{self, Statistics};
use entmeter::tensor::{outer, Hermiticity};
use entmeter::{Operator, PureState, SpaceShape, C64};
use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Slack on `Σ|c|² = 1` for coefficients typed with limited precision; such
/// coefficients are rescaled to unit norm.
pub const COEFF_RENORM_TOL: f64 = 1e-6;

/// Tolerance on the trace of an explicit density.
pub const DENSITY_TRACE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSpec {
    Factory(FactorySpec),
    Explicit(ExplicitSpec),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorySpec {
    pub name: String,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Pure,
    Density,
    Operator,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSpec {
    pub shape: Vec<usize>,
    pub kind: Kind,
    pub data: serde_json::Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexIn {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexIn> for C64 {
    fn from(z: ComplexIn) -> C64 {
        match z {
            ComplexIn::Real(x) => C64::new(x, 0.0),
            ComplexIn::Pair([re, im]) => C64::new(re, im),
        }
    }
}

/// What a spec resolves to, and therefore which measure applies.
#[derive(Clone, Debug)]
pub enum Target {
    /// An operator on a composite space.
    Operator(Operator),
    /// A Fock-space state and the order of its reduced density matrix.
    Fock { space: FockSpace, rho: Operator, p: usize },
    /// A spin-½ lattice state and the order of its spin density matrix.
    Spin { rho: Operator, p: usize },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SignParams {
    #[serde(default = "plus")]
    sign: i8,
}

fn plus() -> i8 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CatParams {
    n: usize,
    c: Vec<ComplexIn>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HfParams {
    n: usize,
    #[serde(default)]
    p: Option<usize>,
    statistics: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FockParams {
    n: usize,
    modes: usize,
    #[serde(default = "one")]
    p: usize,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GibbsParams {
    beta: f64,
    #[serde(default)]
    sites: Option<usize>,
    #[serde(default)]
    coupling: Option<f64>,
    #[serde(default)]
    range: Option<String>,
    #[serde(default)]
    hamiltonian: Option<ExplicitSpec>,
    /// Measure the spin density matrix of this order instead of the state itself.
    #[serde(default)]
    spin_order: Option<usize>,
}

fn params<T: DeserializeOwned>(name: &str, v: &serde_json::Value) -> Result<T, CliError> {
    let v = if v.is_null() { serde_json::json!({}) } else { v.clone() };
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("params for {name}: {e}")))
}

/// Coefficients with `|Σ|c|² − 1| ≤ COEFF_RENORM_TOL` rescaled to unit norm.
fn coefficients(raw: &[ComplexIn], warnings: &mut Vec<String>) -> Vec<C64> {
    let c: Vec<C64> = raw.iter().map(|&z| z.into()).collect();
    let n2: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    if n2 != 1.0 && (n2 - 1.0).abs() <= COEFF_RENORM_TOL {
        warnings.push(format!("coefficients rescaled to unit norm (sum of squares was {n2})"));
        let s = n2.sqrt();
        c.into_iter().map(|z| z / s).collect()
    } else {
        c
    }
}

fn density(psi: PureState) -> Result<Target, CliError> {
    Ok(Target::Operator(outer(&psi)?))
}

impl StateSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid state spec: {e}")))
    }

    /// Builds the target; notes about input adjustments go to `warnings`.
    pub fn build(&self, warnings: &mut Vec<String>) -> Result<Target, CliError> {
        match self {
            StateSpec::Factory(f) => f.build(warnings),
            StateSpec::Explicit(e) => e.build().map(Target::Operator),
        }
    }
}

impl FactorySpec {
    fn build(&self, warnings: &mut Vec<String>) -> Result<Target, CliError> {
        let name = self.name.as_str();
        match name {
            "epr" => density(states::epr(params::<SignParams>(name, &self.params)?.sign)?),
            "bell" => density(states::bell(params::<SignParams>(name, &self.params)?.sign)?),
            "ghz" => density(states::ghz(params::<SignParams>(name, &self.params)?.sign)?),
            "multicat" => {
                let p: CatParams = params(name, &self.params)?;
                let c = coefficients(&p.c, warnings);
                if c.len() != 2 {
                    return Err(CliError::Input(format!("multicat needs 2 coefficients, got {}", c.len())));
                }
                density(states::multicat(p.n, c[0], c[1])?)
            }
            "multimode" => {
                let p: CatParams = params(name, &self.params)?;
                let c = coefficients(&p.c, warnings);
                density(states::multimode(p.n, &c)?)
            }
            "hartree_fock" => {
                let p: HfParams = params(name, &self.params)?;
                let stat: Statistics = p.statistics.parse()?;
                density(states::hartree_fock(p.n, stat)?)
            }
            "reduced_hf" => {
                let p: HfParams = params(name, &self.params)?;
                let stat: Statistics = p.statistics.parse()?;
                let order = p.p.ok_or_else(|| CliError::Input("reduced_hf needs p".into()))?;
                Ok(Target::Operator(states::reduced_hartree_fock(p.n, order, stat)?))
            }
            "gibbs" => {
                let p: GibbsParams = params(name, &self.params)?;
                let h = match (&p.hamiltonian, p.sites) {
                    (Some(h), None) => h.build()?,
                    (None, Some(sites)) => {
                        let range: CouplingRange = p.range.as_deref().unwrap_or("all-to-all").parse()?;
                        manybody::heisenberg_hamiltonian(sites, p.coupling.unwrap_or(1.0), range)?
                    }
                    _ => {
                        return Err(CliError::Input(
                            "gibbs needs either an explicit hamiltonian or Heisenberg sites".into(),
                        ))
                    }
                };
                let rho = states::gibbs(&h, p.beta)?;
                match p.spin_order {
                    Some(order) => Ok(Target::Spin { rho, p: order }),
                    None => Ok(Target::Operator(rho)),
                }
            }
            "condensate" => {
                let p: FockParams = params(name, &self.params)?;
                let (space, rho) = manybody::condensate(p.n, p.modes)?;
                Ok(Target::Fock { space, rho, p: p.p })
            }
            "fermi_sea" => {
                let p: FockParams = params(name, &self.params)?;
                let (space, rho) = manybody::fermi_sea(p.n, p.modes)?;
                Ok(Target::Fock { space, rho, p: p.p })
            }
            other => Err(CliError::Input(format!("unknown factory {other:?}"))),
        }
    }
}

fn complex_vec(v: &serde_json::Value, len: usize) -> Result<Vec<C64>, CliError> {
    let raw: Vec<ComplexIn> =
        serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("explicit data: {e}")))?;
    if raw.len() != len {
        return Err(CliError::Input(format!("expected {len} entries, got {}", raw.len())));
    }
    Ok(raw.into_iter().map(C64::from).collect())
}

impl ExplicitSpec {
    pub fn build(&self) -> Result<Operator, CliError> {
        let shape = SpaceShape::new(self.shape.clone())?;
        let d = shape.total_dim();
        match self.kind {
            Kind::Pure => {
                let amps = complex_vec(&self.data, d)?;
                let psi = PureState::new(shape, DVector::from_vec(amps))?;
                Ok(outer(&psi)?)
            }
            Kind::Density | Kind::Operator => {
                let rows = self
                    .data
                    .as_array()
                    .ok_or_else(|| CliError::Input("explicit matrix data must be an array of rows".into()))?;
                if rows.len() != d {
                    return Err(CliError::Input(format!("expected {d} rows, got {}", rows.len())));
                }
                let mut entries = Vec::with_capacity(d * d);
                for row in rows {
                    entries.extend(complex_vec(row, d)?);
                }
                let m = DMatrix::from_row_slice(d, d, &entries);
                if self.kind == Kind::Operator {
                    return Ok(Operator::with_flag(shape, m, Hermiticity::Unknown)?);
                }
                let op = Operator::hermitian(shape, m)?;
                let tr = op.trace();
                if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TRACE_TOL {
                    return Err(CliError::Input(format!("density must have unit trace, got {tr}")));
                }
                Ok(op)
            }
        }
    }
}
