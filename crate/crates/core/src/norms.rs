//! Operator norms over the full space and over the disentangled set.
//!
//! The restricted norm `‖A‖_D = sup |⟨f|A|f⟩|` over normalized product
//! states is found by alternating spectral iteration: with every factor but
//! `φ_i` held fixed the objective is the quadratic form of an effective
//! `d_i × d_i` hermitian matrix `M_i`, and `φ_i` is replaced by the
//! eigenvector of `M_i` whose eigenvalue has the largest magnitude. Each
//! update can only raise `|⟨f|A|f⟩|`, so every restart climbs monotonically
//! to a local maximum. Global optimality is not certified; the multistart
//! value is cross-checked against [`restricted_norm_oracle`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{contract_except, contract_vector_except, embed_product, hermitian_part, Operator, ProductState};
use crate::C64;

/// Eigenvalues closer than this to the dominant magnitude count as tied.
const TIE_TOL: f64 = 1e-12;

/// Keeps oracle sample streams apart from optimizer restarts under the same seed.
const ORACLE_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

/// Which supremum is used for `‖·‖_D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NormMode {
    /// Supremum over all normalized product states.
    Variational,
    /// Supremum over computational product-basis states only.
    Basis,
    /// Unrestricted spectral norm; the only mode offered for non-hermitian operators.
    FullSpace,
}

impl NormMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMode::Variational => "variational",
            NormMode::Basis => "basis",
            NormMode::FullSpace => "full_space",
        }
    }
}

impl std::fmt::Display for NormMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variational" => Ok(NormMode::Variational),
            "basis" => Ok(NormMode::Basis),
            "full_space" | "full-space" | "full" => Ok(NormMode::FullSpace),
            other => Err(Error::invalid(format!("unknown norm mode {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormOptions {
    /// Random initializations. One extra start from the best basis state is always added.
    pub restarts: usize,
    pub max_sweeps: usize,
    /// Relative change between sweeps below which a restart is converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            restarts: 32,
            max_sweeps: 200,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl NormOptions {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be >= 1"));
        }
        if self.max_sweeps == 0 {
            return Err(Error::invalid("max_sweeps must be >= 1"));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::invalid("tol must be positive and finite"));
        }
        Ok(())
    }
}

/// A restricted-norm value with its maximizer and optimizer diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct NormResult {
    pub value: f64,
    pub maximizer: Option<ProductState>,
    pub sweeps_used: usize,
    pub converged: bool,
    pub restarts_agreeing: usize,
    /// Starts actually run (random restarts plus the basis start).
    pub restarts_run: usize,
    /// Sweeps, over all restarts, where the objective decreased by more than `1e-12` relative.
    pub monotone_violations: usize,
}

impl NormResult {
    pub(crate) fn exact(value: f64, maximizer: Option<ProductState>) -> Self {
        NormResult {
            value,
            maximizer,
            sweeps_used: 0,
            converged: true,
            restarts_agreeing: 1,
            restarts_run: 1,
            monotone_violations: 0,
        }
    }
}

/// Outcome of a single optimizer start.
#[derive(Clone, Debug)]
pub struct RestartOutcome {
    pub value: f64,
    pub state: ProductState,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective before the first sweep and after each sweep.
    pub trajectory: Vec<f64>,
}

impl RestartOutcome {
    /// Number of sweeps whose objective fell below the previous one.
    pub fn monotone_violations(&self) -> usize {
        self.trajectory
            .windows(2)
            .filter(|w| w[1] < w[0] - 1e-12 * w[0].abs().max(1.0))
            .count()
    }
}

/// Spectral norm: largest singular value, or largest `|λ|` when hermitian.
pub fn full_norm(a: &Operator) -> f64 {
    if a.is_hermitian() {
        hermitian_part(a.matrix())
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    } else {
        a.matrix()
            .clone()
            .singular_values()
            .iter()
            .fold(0.0f64, |m, &x| m.max(x))
    }
}

/// Largest `|λ|` of a small hermitian matrix.
fn max_abs_eigenvalue(m: &DMatrix<C64>) -> f64 {
    hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()))
}

/// Eigenpair of largest `|λ|`, with deterministic tie-breaking and phase.
fn dominant_eigenpair(m: &DMatrix<C64>) -> (f64, DVector<C64>) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let top = order.iter().fold(0.0f64, |acc, &k| acc.max(eig.eigenvalues[k].abs()));
    let pick = order
        .iter()
        .copied()
        .find(|&k| eig.eigenvalues[k].abs() >= top - TIE_TOL)
        .unwrap_or(0);
    let mut v: DVector<C64> = eig.eigenvectors.column(pick).into_owned();
    fix_phase(&mut v);
    (eig.eigenvalues[pick], v)
}

/// Rotates the first largest-magnitude component onto the positive real axis.
fn fix_phase(v: &mut DVector<C64>) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (k, z) in v.iter().enumerate() {
        if z.norm() > best_abs {
            best_abs = z.norm();
            best = k;
        }
    }
    if best_abs > 0.0 {
        let phase = v[best] / best_abs;
        let rot = phase.conj();
        v.apply(|z| *z *= rot);
        v[best] = C64::new(v[best].norm(), 0.0);
    }
    let n = v.norm();
    if n > 0.0 {
        v.unscale_mut(n);
    }
}

/// Relative residual below which an operator is treated as `s·|v⟩⟨v|`.
const RANK_ONE_TOL: f64 = 1e-13;

/// How the objective is evaluated: the dense operator, or `s·|v⟩⟨v|` when
/// the operator has rank one, which makes every contraction linear in the
/// total dimension.
enum Objective<'a> {
    Dense(&'a Operator),
    RankOne { sign: f64, v: DVector<C64>, dims: Vec<usize> },
}

impl<'a> Objective<'a> {
    fn new(a: &'a Operator) -> Self {
        match rank_one_factor(a) {
            Some((sign, v)) => Objective::RankOne {
                sign,
                v,
                dims: a.shape().dims().to_vec(),
            },
            None => Objective::Dense(a),
        }
    }

    fn value(&self, factors: &[DVector<C64>]) -> f64 {
        match self {
            Objective::Dense(a) => contract_except(a, factors, None)[0].norm(),
            Objective::RankOne { v, dims, .. } => contract_vector_except(v.as_slice(), dims, factors, None)[0].norm_sqr(),
        }
    }

    fn effective(&self, factors: &[DVector<C64>], part: usize) -> DMatrix<C64> {
        match self {
            Objective::Dense(a) => effective_matrix(a, factors, part),
            Objective::RankOne { sign, v, dims } => {
                let u = DVector::from_vec(contract_vector_except(v.as_slice(), dims, factors, Some(part)));
                (&u * u.adjoint()).scale(*sign)
            }
        }
    }
}

/// `(s, v)` with `A = s·|v⟩⟨v|`, if `A` is hermitian of rank one.
fn rank_one_factor(a: &Operator) -> Option<(f64, DVector<C64>)> {
    let m = a.matrix();
    let d = a.dim();
    let (j, pivot) = (0..d).map(|k| (k, m[(k, k)].re)).max_by(|x, y| x.1.abs().total_cmp(&y.1.abs()))?;
    if pivot == 0.0 || !a.is_hermitian() {
        return None;
    }
    let sign = pivot.signum();
    let v: DVector<C64> = m.column(j).unscale(pivot.abs().sqrt());
    let tol = RANK_ONE_TOL * pivot.abs();
    for c in 0..d {
        let vc = v[c].conj() * sign;
        for r in 0..d {
            if (m[(r, c)] - v[r] * vc).norm() > tol {
                return None;
            }
        }
    }
    Some((sign, v))
}

/// Effective single-part matrix `M_i` with all other factors contracted.
pub fn effective_matrix(a: &Operator, factors: &[DVector<C64>], part: usize) -> DMatrix<C64> {
    let d = a.shape().dims()[part];
    DMatrix::from_vec(d, d, contract_except(a, factors, Some(part)))
}

/// Runs alternating spectral iteration from `start`.
pub fn run_restart(a: &Operator, start: &ProductState, max_sweeps: usize, tol: f64) -> RestartOutcome {
    run_objective(&Objective::new(a), start, max_sweeps, tol)
}

fn run_objective(obj: &Objective<'_>, start: &ProductState, max_sweeps: usize, tol: f64) -> RestartOutcome {
    let mut factors: Vec<DVector<C64>> = start.factors().to_vec();
    let k = factors.len();
    let initial = obj.value(&factors);
    let mut trajectory = Vec::with_capacity(max_sweeps + 1);
    trajectory.push(initial);
    let mut prev = initial;
    let mut value = initial;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < max_sweeps {
        sweeps += 1;
        for part in 0..k {
            let m = obj.effective(&factors, part);
            let (lambda, v) = dominant_eigenpair(&m);
            factors[part] = v;
            value = lambda.abs();
        }
        trajectory.push(value);
        if (value - prev).abs() <= tol * value.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        prev = value;
    }
    RestartOutcome {
        value,
        state: ProductState::from_factors_unchecked(factors),
        sweeps,
        converged,
        trajectory,
    }
}

/// Random product state for start `index` under `seed`; independent of scheduling.
pub fn random_start(a: &Operator, seed: u64, index: u64) -> ProductState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    ProductState::random(a.shape(), &mut rng)
}

/// `sup |⟨f|A|f⟩|` over normalized product states, by multistart alternating
/// spectral iteration.
///
/// Start 0 is the best computational basis state; starts `1..=restarts` are
/// Haar-random. The best value wins, ties going to the lowest start index.
/// Returns [`Error::NonConvergence`] carrying the best result when no start
/// converged.
pub fn restricted_norm_variational(a: &Operator, opts: &NormOptions) -> Result<NormResult> {
    opts.validate()?;
    if !a.is_hermitian() {
        return Err(Error::invalid(
            "restricted quadratic-form norm needs a hermitian operator; use full-space mode",
        ));
    }
    let objective = Objective::new(a);
    let basis_start = restricted_norm_basis(a)
        .maximizer
        .expect("basis norm always reports a maximizer");
    let outcomes: Vec<RestartOutcome> = (0..=opts.restarts as u64)
        .into_par_iter()
        .map(|idx| {
            let start = if idx == 0 {
                basis_start.clone()
            } else {
                random_start(a, opts.seed, idx)
            };
            run_objective(&objective, &start, opts.max_sweeps, opts.tol)
        })
        .collect();

    let mut best = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if o.value > outcomes[best].value {
            best = k;
        }
    }
    let top = &outcomes[best];
    let agreeing = outcomes
        .iter()
        .filter(|o| (o.value - top.value).abs() <= 100.0 * opts.tol * top.value.max(f64::MIN_POSITIVE))
        .count();
    let any_converged = outcomes.iter().any(|o| o.converged);
    let result = NormResult {
        value: top.value,
        maximizer: Some(top.state.clone()),
        sweeps_used: top.sweeps,
        converged: top.converged,
        restarts_agreeing: agreeing,
        restarts_run: outcomes.len(),
        monotone_violations: outcomes.iter().map(RestartOutcome::monotone_violations).sum(),
    };
    if any_converged {
        Ok(result)
    } else {
        Err(Error::NonConvergence { best: Box::new(result) })
    }
}

/// `max |⟨n_1…n_K|A|n_1…n_K⟩|`: the supremum over product basis states.
pub fn restricted_norm_basis(a: &Operator) -> NormResult {
    let m = a.matrix();
    let mut best = 0;
    let mut best_abs = -1.0;
    for k in 0..a.dim() {
        let v = m[(k, k)].norm();
        if v > best_abs {
            best_abs = v;
            best = k;
        }
    }
    let digits = a.shape().digits(best);
    let maximizer = ProductState::basis(a.shape(), &digits).expect("digits come from the shape");
    NormResult::exact(best_abs, Some(maximizer))
}

/// Lower bound on `‖A‖_D` from random product states, each refined by up to
/// 50 alternating sweeps.
///
/// The refinement builds each effective matrix by embedding the product
/// vectors into the full space, a separate route from the tensor contraction
/// used by [`restricted_norm_variational`].
pub fn restricted_norm_oracle(a: &Operator, samples: usize, seed: u64) -> Result<f64> {
    const SWEEPS: usize = 50;
    if samples == 0 {
        return Err(Error::invalid("oracle needs at least one sample"));
    }
    if !a.is_hermitian() {
        return Err(Error::invalid("oracle needs a hermitian operator"));
    }
    let shape = a.shape().clone();
    let h = hermitian_part(a.matrix());
    let best = (0..samples as u64)
        .into_par_iter()
        .map(|idx| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ORACLE_SALT);
            rng.set_stream(idx);
            let mut factors: Vec<DVector<C64>> = ProductState::random(&shape, &mut rng).factors().to_vec();
            let mut value = embedded_value(&h, &factors);
            for _ in 0..SWEEPS {
                let before = value;
                for part in 0..factors.len() {
                    let m = embedded_effective_matrix(&h, &factors, part);
                    let eig = SymmetricEigen::new(hermitian_part(&m));
                    let (k, lambda) = eig
                        .eigenvalues
                        .iter()
                        .enumerate()
                        .fold((0, 0.0f64), |acc, (k, &x)| if x.abs() > acc.1 { (k, x.abs()) } else { acc });
                    factors[part] = eig.eigenvectors.column(k).into_owned();
                    value = lambda;
                }
                if (value - before).abs() <= 1e-15 * value.max(f64::MIN_POSITIVE) {
                    break;
                }
            }
            value.max(embedded_value(&h, &factors))
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

fn embedded_value(h: &DMatrix<C64>, factors: &[DVector<C64>]) -> f64 {
    let v = embed_product(&ProductState::from_factors_unchecked(factors.to_vec()));
    let v = v.amplitudes();
    v.dotc(&(h * v)).norm()
}

fn embedded_effective_matrix(h: &DMatrix<C64>, factors: &[DVector<C64>], part: usize) -> DMatrix<C64> {
    let d = factors[part].len();
    let columns: Vec<DVector<C64>> = (0..d)
        .map(|a| {
            let mut fs = factors.to_vec();
            let mut e = DVector::zeros(d);
            e[a] = C64::new(1.0, 0.0);
            fs[part] = e;
            embed_product(&ProductState::from_factors_unchecked(fs)).amplitudes().clone()
        })
        .collect();
    let p = DMatrix::from_columns(&columns);
    p.adjoint() * h * p
}

/// `‖c · ⊗ F_i‖_D = |c| ∏ max|λ(F_i)|` for hermitian factors.
pub fn factorized_restricted_norm(factors: &[Operator], scalar: C64) -> Result<f64> {
    if factors.is_empty() {
        return Err(Error::invalid("factorized norm needs at least one factor"));
    }
    let mut acc = scalar.norm();
    for (i, f) in factors.iter().enumerate() {
        if !f.is_hermitian() {
            return Err(Error::invalid(format!("factor {i} is not hermitian")));
        }
        acc *= max_abs_eigenvalue(f.matrix());
    }
    Ok(acc)
}

/// `|c| ∏ max|diag(F_i)|`: the basis-mode norm of `c · ⊗ F_i` without assembling it.
pub fn factorized_basis_norm(factors: &[Operator], scalar: C64) -> f64 {
    factors.iter().fold(scalar.norm(), |acc, f| {
        acc * f.matrix().diagonal().iter().fold(0.0f64, |m, z| m.max(z.norm()))
    })
}

/// Restricted norm under `mode`.
pub fn restricted_norm(a: &Operator, mode: NormMode, opts: &NormOptions) -> Result<NormResult> {
    match mode {
        NormMode::Variational => restricted_norm_variational(a, opts),
        NormMode::Basis => Ok(restricted_norm_basis(a)),
        NormMode::FullSpace => Ok(NormResult::exact(full_norm(a), None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{outer, quadratic_form, tensor_product, PureState, SpaceShape};
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn epr_rho() -> Operator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_terms(SpaceShape::uniform(2, 2).unwrap(), &[(vec![0, 1], c(s)), (vec![1, 0], c(s))]).unwrap();
        outer(&psi).unwrap()
    }

    #[test]
    fn full_norm_examples() {
        assert_abs_diff_eq!(full_norm(&Operator::identity(SpaceShape::new(vec![3]).unwrap())), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(full_norm(&epr_rho()), 1.0, epsilon = 1e-14);
        let d = Operator::from_diagonal(SpaceShape::new(vec![2]).unwrap(), &[0.2, 0.8]).unwrap();
        assert_abs_diff_eq!(full_norm(&d), 0.8, epsilon = 1e-14);
        // non-hermitian: singular values of [[0, 2], [0, 0]] are {2, 0}
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(2.0);
        let a = Operator::new(SpaceShape::new(vec![2]).unwrap(), m).unwrap();
        assert_abs_diff_eq!(full_norm(&a), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn variational_epr_and_product_projector() {
        let r = restricted_norm_variational(&epr_rho(), &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-12);
        assert!(r.converged);
        assert_eq!(r.monotone_violations, 0);

        let shape = SpaceShape::uniform(2, 2).unwrap();
        let p = outer(&PureState::from_terms(shape.clone(), &[(vec![0, 0], c(1.0))]).unwrap()).unwrap();
        let r = restricted_norm_variational(&p, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-12);
        let f = r.maximizer.unwrap();
        assert_abs_diff_eq!(f.factors()[0][0].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.factors()[1][0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn maximizer_reproduces_value() {
        let rho = crate::tensor::random_density(&SpaceShape::uniform(2, 3).unwrap(), 21);
        let opts = NormOptions::default();
        let r = restricted_norm_variational(&rho, &opts).unwrap();
        let q = quadratic_form(r.maximizer.as_ref().unwrap(), &rho).unwrap().norm();
        assert!((q - r.value).abs() <= 10.0 * opts.tol * r.value);
        assert!(r.restarts_agreeing >= 1);
        assert_eq!(r.restarts_run, opts.restarts + 1);
    }

    #[test]
    fn variational_rejects_non_hermitian() {
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 1)] = c(1.0);
        let a = Operator::new(SpaceShape::uniform(2, 2).unwrap(), m).unwrap();
        assert!(matches!(
            restricted_norm_variational(&a, &NormOptions::default()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn non_convergence_carries_best_value() {
        let rho = crate::tensor::random_density(&SpaceShape::uniform(2, 3).unwrap(), 4);
        let opts = NormOptions {
            max_sweeps: 1,
            tol: 1e-300,
            ..NormOptions::default()
        };
        match restricted_norm_variational(&rho, &opts) {
            Err(Error::NonConvergence { best }) => assert!(best.value > 0.0),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn basis_norm_examples() {
        let r = restricted_norm_basis(&epr_rho());
        assert_abs_diff_eq!(r.value, 0.5, epsilon = 1e-15);
        let d = Operator::from_diagonal(SpaceShape::uniform(2, 2).unwrap(), &[0.1, -0.7, 0.3, 0.2]).unwrap();
        let r = restricted_norm_basis(&d);
        assert_abs_diff_eq!(r.value, 0.7, epsilon = 1e-15);
        assert_eq!(r.maximizer.unwrap(), ProductState::basis(d.shape(), &[0, 1]).unwrap());
    }

    #[test]
    fn oracle_examples() {
        assert_abs_diff_eq!(restricted_norm_oracle(&epr_rho(), 1000, 0).unwrap(), 0.5, epsilon = 1e-6);
        let id = Operator::identity(SpaceShape::uniform(2, 2).unwrap());
        assert_abs_diff_eq!(restricted_norm_oracle(&id, 10, 0).unwrap(), 1.0, epsilon = 1e-12);
        let rho = crate::tensor::random_density(&SpaceShape::uniform(2, 2).unwrap(), 11);
        let var = restricted_norm_variational(&rho, &NormOptions::default()).unwrap().value;
        assert!(restricted_norm_oracle(&rho, 500, 3).unwrap() <= var + 1e-8);
    }

    #[test]
    fn factorized_norm_examples() {
        let half = Operator::from_diagonal(SpaceShape::new(vec![2]).unwrap(), &[0.5, 0.5]).unwrap();
        let n = factorized_restricted_norm(&[half.clone(), half.clone()], c(1.0)).unwrap();
        assert_abs_diff_eq!(n, 0.25, epsilon = 1e-15);
        let n = factorized_restricted_norm(&[half.clone(), half.clone(), half.clone()], c(1.0)).unwrap();
        assert_abs_diff_eq!(n, 0.125, epsilon = 1e-15);
        let id = Operator::identity(SpaceShape::new(vec![3]).unwrap());
        assert_abs_diff_eq!(factorized_restricted_norm(&[id.clone(), id], c(1.0)).unwrap(), 1.0, epsilon = 1e-15);
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        let nh = Operator::new(SpaceShape::new(vec![2]).unwrap(), m).unwrap();
        assert!(factorized_restricted_norm(&[nh], c(1.0)).is_err());
    }

    #[test]
    fn factorized_basis_matches_assembled() {
        let a = crate::tensor::random_density(&SpaceShape::new(vec![2]).unwrap(), 1);
        let b = crate::tensor::random_density(&SpaceShape::new(vec![3]).unwrap(), 2);
        let ab = tensor_product(&[a.clone(), b.clone()]).unwrap().scale(c(-2.0));
        let direct = restricted_norm_basis(&ab).value;
        assert_abs_diff_eq!(factorized_basis_norm(&[a, b], c(-2.0)), direct, epsilon = 1e-14);
    }

    #[test]
    fn single_part_norm_is_max_abs_eigenvalue() {
        let d = Operator::from_diagonal(SpaceShape::new(vec![3]).unwrap(), &[0.1, -0.9, 0.5]).unwrap();
        let r = restricted_norm_variational(&d, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.9, epsilon = 1e-14);
    }

    #[test]
    fn phase_convention() {
        let mut v = DVector::from_vec(vec![C64::new(0.0, 0.3), C64::new(0.0, -0.9)]);
        fix_phase(&mut v);
        assert!(v[1].im.abs() < 1e-15 && v[1].re > 0.0);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("basis".parse::<NormMode>().unwrap(), NormMode::Basis);
        assert!("bogus".parse::<NormMode>().is_err());
    }

    #[test]
    fn rank_one_path_matches_dense_contraction() {
        let psi = crate::states::hartree_fock(3, crate::states::Statistics::Bose).unwrap();
        let rho = outer(&psi).unwrap().scale(c(-1.5));
        assert!(rank_one_factor(&rho).is_some());
        assert!(rank_one_factor(&crate::tensor::random_density(&SpaceShape::uniform(2, 2).unwrap(), 3)).is_none());
        for idx in 1..6 {
            let start = random_start(&rho, 9, idx);
            let fast = run_objective(&Objective::new(&rho), &start, 200, 1e-12);
            let dense = run_objective(&Objective::Dense(&rho), &start, 200, 1e-12);
            assert_abs_diff_eq!(fast.value, dense.value, epsilon = 1e-12);
        }
        let r = restricted_norm_variational(&rho, &NormOptions::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.5 * 6.0 / 27.0, epsilon = 1e-9);
    }
}
