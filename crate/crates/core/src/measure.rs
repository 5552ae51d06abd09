//! The entanglement measure `ε(A) = log(‖A‖_D / ‖A⊗‖_D)` and the operator
//! order index `ω(A) = log‖A‖ / log|Tr A|`.
//!
//! The nonentangling counterpart is assembled from unnormalized single-part
//! reductions `A_i = Tr_{j≠i} A`. Since `Tr A_i = Tr A` for every part, the
//! normalization `Tr A⊗ = Tr A` fixes the prefactor to `(Tr A)^{1-K}`:
//!
//! ```text
//! A⊗ = (Tr A)^{1-K} · A_1 ⊗ A_2 ⊗ … ⊗ A_K
//! ```

use crate::error::{Error, Result};
use crate::norms::{
    factorized_basis_norm, factorized_restricted_norm, full_norm, restricted_norm_basis,
    restricted_norm_variational, NormMode, NormOptions, NormResult,
};
use crate::tensor::{partial_trace, tensor_product, Operator};
use crate::C64;

/// `|Tr A|` at or below this multiple of `‖A‖_F` is treated as zero.
pub const DEGENERATE_TRACE_REL: f64 = 1e-12;

/// Norms below `ZERO_NORM_PER_DIM · D_tot` make `ε` undefined.
pub const ZERO_NORM_PER_DIM: f64 = 1e-14;

/// Logarithm base for reported values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub const TWO: LogBase = LogBase(2.0);
    pub const E: LogBase = LogBase(std::f64::consts::E);
    pub const TEN: LogBase = LogBase(10.0);

    pub fn new(base: f64) -> Result<Self> {
        if base > 1.0 && base.is_finite() {
            Ok(LogBase(base))
        } else {
            Err(Error::invalid(format!("log base must be finite and > 1, got {base}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn log(self, x: f64) -> f64 {
        if self.0 == 2.0 {
            x.log2()
        } else if self.0 == 10.0 {
            x.log10()
        } else if self.0 == std::f64::consts::E {
            x.ln()
        } else {
            x.ln() / self.0.ln()
        }
    }

    /// Converts a natural logarithm into this base.
    pub fn from_ln(self, ln: f64) -> f64 {
        ln / self.0.ln()
    }

    /// `"2"`, `"e"`, `"10"` or another decimal value.
    pub fn label(self) -> String {
        if self.0 == std::f64::consts::E {
            "e".to_string()
        } else if self.0 == 2.0 {
            "2".to_string()
        } else if self.0 == 10.0 {
            "10".to_string()
        } else {
            format!("{}", self.0)
        }
    }
}

impl Default for LogBase {
    fn default() -> Self {
        LogBase::TWO
    }
}

impl std::str::FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2" => Ok(LogBase::TWO),
            "e" => Ok(LogBase::E),
            "10" => Ok(LogBase::TEN),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("unknown log base {other:?}")))
                .and_then(LogBase::new),
        }
    }
}

/// Optimizer diagnostics for the two norms of the measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub a: NormResult,
    pub a_otimes: NormResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureResult {
    pub epsilon: f64,
    pub norm_d_a: f64,
    pub norm_d_aotimes: f64,
    pub log_base: LogBase,
    pub mode: NormMode,
    pub diagnostics: Option<Diagnostics>,
    /// False when no optimizer start converged; the best value is still reported.
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl MeasureResult {
    pub(crate) fn from_norms(
        norm_d_a: f64,
        norm_d_aotimes: f64,
        dim: usize,
        base: LogBase,
        mode: NormMode,
    ) -> Result<Self> {
        let floor = ZERO_NORM_PER_DIM * dim as f64;
        if norm_d_a.is_nan() || norm_d_a < floor {
            return Err(Error::ZeroNorm { which: "‖A‖_D", value: norm_d_a });
        }
        if norm_d_aotimes.is_nan() || norm_d_aotimes < floor {
            return Err(Error::ZeroNorm { which: "‖A⊗‖_D", value: norm_d_aotimes });
        }
        Ok(MeasureResult {
            epsilon: base.log(norm_d_a / norm_d_aotimes),
            norm_d_a,
            norm_d_aotimes,
            log_base: base,
            mode,
            diagnostics: None,
            converged: true,
            warnings: Vec::new(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderIndexResult {
    pub omega: f64,
    pub norm: f64,
    pub trace_abs: f64,
}

/// `Tr_{j≠i} A` for every part `i`, unnormalized.
pub fn single_partite_reductions(a: &Operator) -> Result<Vec<Operator>> {
    (0..a.shape().parts()).map(|i| partial_trace(a, &[i])).collect()
}

fn checked_trace(a: &Operator) -> Result<C64> {
    let tr = a.trace();
    if tr.norm() <= DEGENERATE_TRACE_REL * a.frobenius_norm() {
        return Err(Error::DegenerateTrace { trace_abs: tr.norm() });
    }
    Ok(tr)
}

/// Prefactor `(Tr A)^{1-K}` and the reductions making up `A⊗`.
fn nonentangling_parts(a: &Operator) -> Result<(C64, Vec<Operator>)> {
    let tr = checked_trace(a)?;
    let k = a.shape().parts() as i32;
    Ok((tr.powi(1 - k), single_partite_reductions(a)?))
}

/// `A⊗ = (Tr A)^{1-K} ⊗_i Tr_{j≠i} A`, with `Tr A⊗ = Tr A`.
pub fn nonentangling(a: &Operator) -> Result<Operator> {
    let (scalar, reductions) = nonentangling_parts(a)?;
    Ok(tensor_product(&reductions)?.scale(scalar))
}

/// `ε(A) = log_base(‖A‖_D / ‖A⊗‖_D)` for a hermitian operator.
///
/// In variational mode `‖A⊗‖_D` factorizes into a product of single-part
/// spectral norms; in basis mode it is the largest diagonal entry of the
/// product, `|c| ∏ max|diag A_i|`. Optimizer non-convergence becomes a
/// warning on the result rather than an error.
pub fn entanglement(a: &Operator, mode: NormMode, base: LogBase, opts: &NormOptions) -> Result<MeasureResult> {
    if !a.is_hermitian() {
        return Err(Error::invalid(format!(
            "entanglement measure needs a hermitian operator (deviation {:e})",
            a.hermitian_deviation()
        )));
    }
    let (scalar, reductions) = nonentangling_parts(a)?;
    let mut warnings = Vec::new();
    let (norm_a, norm_ot) = match mode {
        NormMode::Variational => {
            let norm_a = variational_or_best(a, opts, &mut warnings)?;
            let ot = factorized_restricted_norm(&reductions, scalar)?;
            (norm_a, exact(ot))
        }
        NormMode::Basis => {
            let norm_a = restricted_norm_basis(a);
            (norm_a, exact(factorized_basis_norm(&reductions, scalar)))
        }
        NormMode::FullSpace => {
            return Err(Error::invalid("the entanglement measure needs a restricted norm mode"));
        }
    };
    if norm_a.monotone_violations > 0 {
        warnings.push(format!("{} non-monotone optimizer sweeps", norm_a.monotone_violations));
    }
    let mut out = MeasureResult::from_norms(norm_a.value, norm_ot.value, a.dim(), base, mode)?;
    out.converged = norm_a.converged || mode == NormMode::Basis;
    out.diagnostics = Some(Diagnostics { a: norm_a, a_otimes: norm_ot });
    out.warnings = warnings;
    Ok(out)
}

/// Variational restricted norm; non-convergence becomes a warning and the
/// best value found is returned with `converged = false`.
pub(crate) fn variational_or_best(a: &Operator, opts: &NormOptions, warnings: &mut Vec<String>) -> Result<NormResult> {
    match restricted_norm_variational(a, opts) {
        Ok(mut r) => {
            r.converged = true;
            Ok(r)
        }
        Err(Error::NonConvergence { best }) => {
            warnings.push(format!(
                "restricted norm did not converge within {} sweeps; best value reported",
                opts.max_sweeps
            ));
            let mut r = *best;
            r.converged = false;
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

pub(crate) fn exact(value: f64) -> NormResult {
    NormResult::exact(value, None)
}

/// `ln(N! / (N-p)!)` as a sum of logarithms.
pub(crate) fn ln_falling_factorial(n: usize, p: usize) -> f64 {
    (n - p + 1..=n).map(|k| (k as f64).ln()).sum()
}

/// `log_base( (N-p)! N^p ‖ρ_p‖_D / (N! ‖ρ_1‖^p) )`.
pub fn reduced_measure_formula(n: usize, p: usize, norm_p: f64, norm_1: f64, base: LogBase) -> Result<f64> {
    if p == 0 || p > n {
        return Err(Error::invalid(format!("need N >= p >= 1, got N = {n}, p = {p}")));
    }
    if !(norm_p > 0.0 && norm_p.is_finite()) || !(norm_1 > 0.0 && norm_1.is_finite()) {
        return Err(Error::invalid(format!("norms must be positive, got {norm_p} and {norm_1}")));
    }
    let pf = p as f64;
    let ln = pf * (n as f64).ln() + norm_p.ln() - ln_falling_factorial(n, p) - pf * norm_1.ln();
    Ok(base.from_ln(ln))
}

/// `ω(A) = ln‖A‖ / ln|Tr A|`.
pub fn order_index(a: &Operator) -> Result<OrderIndexResult> {
    let trace_abs = a.trace().norm();
    if trace_abs <= 1e-12 || (trace_abs - 1.0).abs() <= 1e-12 {
        return Err(Error::DegenerateTrace { trace_abs });
    }
    let norm = full_norm(a);
    Ok(OrderIndexResult {
        omega: norm.ln() / trace_abs.ln(),
        norm,
        trace_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{self, Statistics};
    use crate::tensor::{outer, PureState, SpaceShape};
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn rho(psi: PureState) -> Operator {
        outer(&psi).unwrap()
    }

    fn var(a: &Operator) -> MeasureResult {
        entanglement(a, NormMode::Variational, LogBase::TWO, &NormOptions::default()).unwrap()
    }

    #[test]
    fn reductions_of_named_states() {
        let half = DMatrix::<C64>::identity(2, 2).unscale(2.0);
        for r in single_partite_reductions(&rho(states::epr(1).unwrap())).unwrap() {
            assert!((r.matrix() - &half).camax() < 1e-15);
        }
        let ghz = single_partite_reductions(&rho(states::ghz(1).unwrap())).unwrap();
        assert_eq!(ghz.len(), 3);
        for r in ghz {
            assert!((r.matrix() - &half).camax() < 1e-15);
        }
        let shape = SpaceShape::uniform(2, 2).unwrap();
        let p12 = rho(PureState::from_terms(shape, &[(vec![0, 1], c(1.0))]).unwrap());
        let red = single_partite_reductions(&p12).unwrap();
        assert_eq!(red[0].matrix()[(0, 0)], c(1.0));
        assert_eq!(red[1].matrix()[(1, 1)], c(1.0));
    }

    #[test]
    fn nonentangling_examples() {
        let ot = nonentangling(&rho(states::epr(1).unwrap())).unwrap();
        assert!((ot.matrix() - DMatrix::<C64>::identity(4, 4).unscale(4.0)).camax() < 1e-15);
        let ot = nonentangling(&rho(states::ghz(1).unwrap())).unwrap();
        assert!((ot.matrix() - DMatrix::<C64>::identity(8, 8).unscale(8.0)).camax() < 1e-15);

        let shape = SpaceShape::uniform(2, 2).unwrap();
        let p11 = rho(PureState::from_terms(shape.clone(), &[(vec![0, 0], c(1.0))]).unwrap());
        assert!((nonentangling(&p11).unwrap().matrix() - p11.matrix()).camax() < 1e-15);

        let traceless = Operator::from_diagonal(shape, &[1.0, -1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(nonentangling(&traceless), Err(Error::DegenerateTrace { .. })));
    }

    #[test]
    fn nonentangling_preserves_trace() {
        let a = crate::tensor::random_density(&SpaceShape::new(vec![2, 3, 2]).unwrap(), 3).scale(c(2.5));
        let ot = nonentangling(&a).unwrap();
        assert!((ot.trace() - a.trace()).norm() <= 1e-10 * a.trace().norm());
    }

    #[test]
    fn named_state_measures() {
        assert_abs_diff_eq!(var(&rho(states::epr(1).unwrap())).epsilon, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(var(&rho(states::ghz(1).unwrap())).epsilon, 2.0, epsilon = 1e-9);
        let mc = var(&rho(states::multicat(4, c(0.6), c(0.8)).unwrap()));
        assert_abs_diff_eq!(mc.epsilon, -3.0 * 0.64f64.log2(), epsilon = 1e-8);
        assert_abs_diff_eq!(mc.epsilon, 1.9315686, epsilon = 1e-7);

        let quarter = Operator::from_diagonal(SpaceShape::uniform(2, 2).unwrap(), &[0.25; 4]).unwrap();
        assert_abs_diff_eq!(var(&quarter).epsilon, 0.0, epsilon = 1e-12);

        let hf = rho(states::hartree_fock(3, Statistics::Fermi).unwrap());
        let r = entanglement(&hf, NormMode::Basis, LogBase::TWO, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(r.epsilon, (27.0f64 / 6.0).log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.epsilon, 2.1699250, epsilon = 1e-7);
    }

    #[test]
    fn measure_is_consistent_with_its_norms() {
        let r = entanglement(&rho(states::epr(1).unwrap()), NormMode::Variational, LogBase::E, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(r.epsilon, (r.norm_d_a / r.norm_d_aotimes).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(r.epsilon, 2f64.ln(), epsilon = 1e-9);
        assert_abs_diff_eq!(r.norm_d_a, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.norm_d_aotimes, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn measure_errors() {
        let shape = SpaceShape::uniform(2, 2).unwrap();
        let zero = Operator::zeros(shape.clone());
        assert!(matches!(var_err(&zero), Error::DegenerateTrace { .. }));
        let mut m = DMatrix::<C64>::identity(4, 4);
        m[(0, 1)] = c(1.0);
        let nh = Operator::new(shape.clone(), m).unwrap();
        assert!(matches!(var_err(&nh), Error::InvalidArgument(_)));
        let id = Operator::identity(shape);
        assert!(entanglement(&id, NormMode::FullSpace, LogBase::TWO, &NormOptions::default()).is_err());
    }

    fn var_err(a: &Operator) -> Error {
        entanglement(a, NormMode::Variational, LogBase::TWO, &NormOptions::default()).unwrap_err()
    }

    #[test]
    fn reduced_formula_examples() {
        for (n, p) in [(3usize, 1usize), (4, 2), (6, 3), (10, 10)] {
            let falling = ln_falling_factorial(n, p).exp();
            let e = reduced_measure_formula(n, p, falling, n as f64, LogBase::TWO).unwrap();
            assert_abs_diff_eq!(e, 0.0, epsilon = 1e-12);
        }
        let e = reduced_measure_formula(4, 2, 1.0, 1.0, LogBase::TWO).unwrap();
        assert_abs_diff_eq!(e, (4.0f64 / 3.0).log2(), epsilon = 1e-14);
        assert_abs_diff_eq!(e, 0.4150375, epsilon = 1e-7);
        let n = 1e6;
        let e = reduced_measure_formula(1_000_000, 2, n, 1.0, LogBase::TWO).unwrap();
        assert_abs_diff_eq!(e, 19.93, epsilon = 0.01);
        assert!(reduced_measure_formula(3, 4, 1.0, 1.0, LogBase::TWO).is_err());
        assert!(reduced_measure_formula(3, 2, 0.0, 1.0, LogBase::TWO).is_err());
    }

    #[test]
    fn order_index_examples() {
        let shape = SpaceShape::new(vec![2]).unwrap();
        let condensed = Operator::from_diagonal(shape.clone(), &[100.0, 0.0]).unwrap();
        assert_abs_diff_eq!(order_index(&condensed).unwrap().omega, 1.0, epsilon = 1e-12);
        let disordered = Operator::from_diagonal(SpaceShape::new(vec![100]).unwrap(), &[1.0; 100]).unwrap();
        assert_abs_diff_eq!(order_index(&disordered).unwrap().omega, 0.0, epsilon = 1e-12);
        let pure = rho(states::epr(1).unwrap());
        assert!(matches!(order_index(&pure), Err(Error::DegenerateTrace { .. })));
    }

    #[test]
    fn log_base_parsing() {
        assert_eq!("2".parse::<LogBase>().unwrap(), LogBase::TWO);
        assert_eq!("e".parse::<LogBase>().unwrap(), LogBase::E);
        assert!("1".parse::<LogBase>().is_err());
        assert!("x".parse::<LogBase>().is_err());
        assert_abs_diff_eq!(LogBase::TEN.log(1000.0), 3.0, epsilon = 1e-15);
    }
}
