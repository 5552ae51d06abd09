//! Fock spaces of `N` identical particles in `m` modes and their
//! field-operator reduced density matrices
//!
//! ```text
//! ρ_p(x, x̄) = Tr[ ψ(x_1)…ψ(x_p) ρ̂ ψ†(x̄_p)…ψ†(x̄_1) ]
//! ```
//!
//! with the variables `x` ranging over mode indices.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::measure::{exact, variational_or_best, Diagnostics, ln_falling_factorial, reduced_measure_formula, LogBase, MeasureResult};
use crate::norms::{full_norm, restricted_norm_basis, NormMode, NormOptions};
use crate::states::Statistics;
use crate::tensor::{hermitian_part, tensor_product, Operator, SpaceShape};
use crate::C64;

/// Fixed-particle-number Fock space.
#[derive(Clone, Debug)]
pub struct FockSpace {
    modes: usize,
    particles: usize,
    statistics: Statistics,
    basis: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

/// Occupation vectors with the given total, first mode most occupied first.
fn enumerate(modes: usize, particles: usize, max_occ: usize) -> Vec<Vec<usize>> {
    fn rec(mode: usize, left: usize, max_occ: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let modes = cur.len();
        if left > max_occ * (modes - mode) {
            return;
        }
        if mode == modes - 1 {
            if left <= max_occ {
                cur[mode] = left;
                out.push(cur.clone());
            }
            return;
        }
        for n in (0..=left.min(max_occ)).rev() {
            cur[mode] = n;
            rec(mode + 1, left - n, max_occ, cur, out);
        }
        cur[mode] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; modes];
    rec(0, particles, max_occ, &mut cur, &mut out);
    out
}

impl FockSpace {
    pub fn new(modes: usize, particles: usize, statistics: Statistics) -> Result<Self> {
        if modes == 0 {
            return Err(Error::invalid("Fock space needs at least one mode"));
        }
        if statistics == Statistics::Fermi && particles > modes {
            return Err(Error::invalid(format!("{particles} fermions do not fit into {modes} modes")));
        }
        Ok(Self::build(modes, particles, statistics))
    }

    fn build(modes: usize, particles: usize, statistics: Statistics) -> Self {
        let max_occ = match statistics {
            Statistics::Bose => particles,
            Statistics::Fermi => 1,
        };
        let basis = enumerate(modes, particles, max_occ);
        let index = basis.iter().enumerate().map(|(k, occ)| (occ.clone(), k)).collect();
        FockSpace {
            modes,
            particles,
            statistics,
            basis,
            index,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn basis(&self) -> &[Vec<usize>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, occupations: &[usize]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    /// Shape used for operators on this space: a single part of dimension `dim()`.
    pub fn shape(&self) -> SpaceShape {
        SpaceShape::new(vec![self.dim()]).expect("Fock basis is never empty")
    }

    /// `|occ⟩⟨occ|` for a basis state.
    pub fn projector(&self, occupations: &[usize]) -> Result<Operator> {
        let k = self
            .index_of(occupations)
            .ok_or_else(|| Error::invalid(format!("{occupations:?} is not in the Fock basis")))?;
        let mut diag = vec![0.0; self.dim()];
        diag[k] = 1.0;
        Operator::from_diagonal(self.shape(), &diag)
    }

    /// `Σ_k ε_k n_k`.
    pub fn one_body_hamiltonian(&self, energies: &[f64]) -> Result<Operator> {
        if energies.len() != self.modes {
            return Err(Error::invalid("one energy per mode is required"));
        }
        let diag: Vec<f64> = self
            .basis
            .iter()
            .map(|occ| occ.iter().zip(energies).map(|(&n, &e)| n as f64 * e).sum())
            .collect();
        Operator::from_diagonal(self.shape(), &diag)
    }

    fn sign_before(&self, occ: &[usize], mode: usize) -> f64 {
        match self.statistics {
            Statistics::Bose => 1.0,
            Statistics::Fermi => {
                if occ[..mode].iter().sum::<usize>() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// `ψ†(mode)` on an occupation vector, in place; returns the amplitude or `None` for zero.
    fn create(&self, occ: &mut [usize], mode: usize) -> Option<f64> {
        match self.statistics {
            Statistics::Bose => {
                occ[mode] += 1;
                Some((occ[mode] as f64).sqrt())
            }
            Statistics::Fermi => {
                if occ[mode] == 1 {
                    return None;
                }
                let s = self.sign_before(occ, mode);
                occ[mode] = 1;
                Some(s)
            }
        }
    }
}

/// Mode-index tuples `(x_1, …, x_p)` in row-major order.
fn tuples(modes: usize, p: usize) -> Vec<Vec<usize>> {
    let shape = SpaceShape::uniform(modes, p).expect("modes >= 1 and p >= 1");
    (0..shape.total_dim()).map(|k| shape.digits(k)).collect()
}

/// The `p`-body reduced density matrix `ρ_p` as an operator on `p` parts of dimension `m`.
#[derive(Clone, Debug)]
pub struct ReducedDensityMatrix {
    pub p: usize,
    pub statistics: Statistics,
    pub matrix: Operator,
}

/// Builds `ρ_p` from a statistical operator on the Fock basis.
///
/// `ρ_p(x, x̄) = Σ_a conj(d_x(a)) ρ[b_x(a), b_x̄(a)] d_x̄(a)`, where
/// `ψ†(x_p)…ψ†(x_1)|a⟩ = d_x(a)|b_x(a)⟩` for `a` in the `(N−p)`-particle basis.
pub fn reduced_dm(space: &FockSpace, rho: &Operator, p: usize) -> Result<ReducedDensityMatrix> {
    if p == 0 || p > space.particles {
        return Err(Error::invalid(format!("need 1 <= p <= N = {}, got {p}", space.particles)));
    }
    if rho.dim() != space.dim() {
        return Err(Error::invalid(format!(
            "statistical operator has dimension {}, Fock basis has {}",
            rho.dim(),
            space.dim()
        )));
    }
    if !rho.is_hermitian() {
        return Err(Error::invalid("statistical operator must be hermitian"));
    }
    let tr = rho.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(Error::invalid(format!("statistical operator must have unit trace, got {tr}")));
    }

    let lower = FockSpace::build(space.modes, space.particles - p, space.statistics);
    let xs = tuples(space.modes, p);
    // raised[x][a] = (b index, amplitude) or None
    let raised: Vec<Vec<Option<(usize, f64)>>> = xs
        .iter()
        .map(|x| {
            lower
                .basis
                .iter()
                .map(|a| {
                    let mut occ = a.clone();
                    let mut amp = 1.0;
                    for &mode in x {
                        amp *= space.create(&mut occ, mode)?;
                    }
                    space.index_of(&occ).map(|b| (b, amp))
                })
                .collect()
        })
        .collect();

    let rm = rho.matrix();
    let n = xs.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for r in 0..n {
        for c in r..n {
            let mut acc = C64::new(0.0, 0.0);
            for (ar, ac) in raised[r].iter().zip(&raised[c]) {
                if let (Some((br, dr)), Some((bc, dc))) = (ar, ac) {
                    acc += rm[(*br, *bc)] * (dr * dc);
                }
            }
            m[(r, c)] = acc;
            m[(c, r)] = acc.conj();
        }
    }
    let matrix = Operator::hermitian(SpaceShape::uniform(space.modes, p)?, m)?;
    Ok(ReducedDensityMatrix {
        p,
        statistics: space.statistics,
        matrix,
    })
}

/// All `N` bosons in the first mode.
pub fn condensate(particles: usize, modes: usize) -> Result<(FockSpace, Operator)> {
    let space = FockSpace::new(modes, particles, Statistics::Bose)?;
    let mut occ = vec![0; modes];
    occ[0] = particles;
    let rho = space.projector(&occ)?;
    Ok((space, rho))
}

/// `N` fermions filling the first `N` of `m` modes.
pub fn fermi_sea(particles: usize, modes: usize) -> Result<(FockSpace, Operator)> {
    let space = FockSpace::new(modes, particles, Statistics::Fermi)?;
    let occ: Vec<usize> = (0..modes).map(|k| usize::from(k < particles)).collect();
    let rho = space.projector(&occ)?;
    Ok((space, rho))
}

/// `N!/((N−p)! N^p) · ρ_1^{⊗p}`, the nonentangling counterpart of `ρ_p`.
pub fn nonentangling_reduced(rho1: &Operator, particles: usize, p: usize) -> Result<Operator> {
    if p == 0 || p > particles {
        return Err(Error::invalid(format!("need 1 <= p <= N, got p = {p}, N = {particles}")));
    }
    let coeff = (ln_falling_factorial(particles, p) - p as f64 * (particles as f64).ln()).exp();
    let factors = vec![rho1.clone(); p];
    Ok(tensor_product(&factors)?.scale(C64::new(coeff, 0.0)))
}

/// Eigenvectors of a hermitian matrix, columns ordered by descending eigenvalue.
pub(crate) fn natural_orbitals(m: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let cols: Vec<_> = order.iter().map(|&k| eig.eigenvectors.column(k).into_owned()).collect();
    DMatrix::from_columns(&cols)
}

/// `(U^{⊗p})† A U^{⊗p}` for an operator on `p` identical parts.
pub(crate) fn rotate_parts(a: &Operator, u: &DMatrix<C64>) -> Result<Operator> {
    let k = a.shape().parts();
    let mut full = u.clone();
    for _ in 1..k {
        full = full.kronecker(u);
    }
    let m = full.adjoint() * a.matrix() * &full;
    Operator::hermitian(a.shape().clone(), hermitian_part(&m))
}

/// `ε(ρ_p)` through the reduced-matrix closed form.
///
/// `‖ρ_1‖` is its spectral norm. In basis mode `ρ_p` is first expressed in
/// the natural-orbital basis (eigenvectors of `ρ_1`).
pub fn measure_reduced(
    space: &FockSpace,
    rho: &Operator,
    p: usize,
    mode: NormMode,
    base: LogBase,
    opts: &NormOptions,
) -> Result<MeasureResult> {
    let rho_p = reduced_dm(space, rho, p)?.matrix;
    let rho_1 = if p == 1 { rho_p.clone() } else { reduced_dm(space, rho, 1)?.matrix };
    let norm_1 = full_norm(&rho_1);
    let mut warnings = Vec::new();
    let norm_p = match mode {
        NormMode::Variational => variational_or_best(&rho_p, opts, &mut warnings)?,
        NormMode::Basis => {
            let u = natural_orbitals(rho_1.matrix());
            restricted_norm_basis(&rotate_parts(&rho_p, &u)?)
        }
        NormMode::FullSpace => return Err(Error::invalid("the measure needs a restricted norm mode")),
    };
    let n = space.particles;
    let coeff = (ln_falling_factorial(n, p) - p as f64 * (n as f64).ln()).exp();
    let norm_ot = coeff * norm_1.powi(p as i32);
    let mut out = MeasureResult::from_norms(norm_p.value, norm_ot, rho_p.dim(), base, mode)?;
    out.epsilon = reduced_measure_formula(n, p, norm_p.value, norm_1, base)?;
    out.converged = norm_p.converged;
    out.diagnostics = Some(Diagnostics { a: norm_p, a_otimes: exact(norm_ot) });
    out.warnings = warnings;
    Ok(out)
}
