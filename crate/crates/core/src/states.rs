//! Named states and density operators.
//!
//! Basis labels `|1⟩, |2⟩, …` in the usual notation map to zero-based
//! indices `0, 1, …` here.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor::{hermitian_part, Operator, PureState, SpaceShape};
use crate::C64;

/// Tolerance on `Σ |c_n|² = 1` for superposition coefficients.
const COEFF_NORM_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Statistics {
    Bose,
    Fermi,
}

impl std::str::FromStr for Statistics {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bose" | "boson" | "bosons" => Ok(Statistics::Bose),
            "fermi" | "fermion" | "fermions" => Ok(Statistics::Fermi),
            other => Err(Error::invalid(format!("unknown statistics {other:?}"))),
        }
    }
}

fn sign_factor(sign: i8) -> Result<f64> {
    match sign {
        1 => Ok(1.0),
        -1 => Ok(-1.0),
        other => Err(Error::invalid(format!("sign must be +1 or -1, got {other}"))),
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `(|12⟩ ± |21⟩)/√2`.
pub fn epr(sign: i8) -> Result<PureState> {
    let s = sign_factor(sign)?;
    let a = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_terms(
        SpaceShape::uniform(2, 2)?,
        &[(vec![0, 1], real(a)), (vec![1, 0], real(s * a))],
    )
}

/// `(|11⟩ ± |22⟩)/√2`.
pub fn bell(sign: i8) -> Result<PureState> {
    let s = sign_factor(sign)?;
    let a = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_terms(
        SpaceShape::uniform(2, 2)?,
        &[(vec![0, 0], real(a)), (vec![1, 1], real(s * a))],
    )
}

/// `(|111⟩ ± |222⟩)/√2`.
pub fn ghz(sign: i8) -> Result<PureState> {
    let s = sign_factor(sign)?;
    let a = std::f64::consts::FRAC_1_SQRT_2;
    multicat(3, real(a), real(s * a))
}

/// `c₁|11…1⟩ + c₂|22…2⟩` on `n` two-level parts.
pub fn multicat(n: usize, c1: C64, c2: C64) -> Result<PureState> {
    multimode(n, &[c1, c2])
}

/// `Σ_n c_n |n…n⟩` on `n` parts of local dimension `m = coeffs.len()`.
pub fn multimode(n: usize, coeffs: &[C64]) -> Result<PureState> {
    if n < 2 {
        return Err(Error::invalid(format!("need at least 2 parts, got {n}")));
    }
    if coeffs.len() < 2 {
        return Err(Error::invalid("need at least 2 modes"));
    }
    let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (total - 1.0).abs() > COEFF_NORM_TOL {
        return Err(Error::invalid(format!("coefficients must satisfy Σ|c|² = 1, got {total}")));
    }
    let terms: Vec<(Vec<usize>, C64)> = coeffs
        .iter()
        .enumerate()
        .map(|(mode, &c)| (vec![mode; n], c))
        .collect();
    PureState::from_terms(SpaceShape::uniform(coeffs.len(), n)?, &terms)
}

/// Heap's algorithm; yields every permutation of `0..n` with its parity.
fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut odd = false;
    let mut out = vec![(perm.clone(), odd)];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            odd = !odd;
            out.push((perm.clone(), odd));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// `(1/√N!) Σ_perm (±1)^perm |P(1 2 … N)⟩` on `N` parts of local dimension `N`.
pub fn hartree_fock(n: usize, stat: Statistics) -> Result<PureState> {
    if n < 2 {
        return Err(Error::invalid(format!("Hartree-Fock needs at least 2 parts, got {n}")));
    }
    if n > 6 {
        return Err(Error::Unsupported(format!("Hartree-Fock with {n} parts exceeds the dense size limit")));
    }
    let perms = permutations(n);
    let amp = 1.0 / (perms.len() as f64).sqrt();
    let terms: Vec<(Vec<usize>, C64)> = perms
        .into_iter()
        .map(|(p, odd)| {
            let s = if stat == Statistics::Fermi && odd { -amp } else { amp };
            (p, real(s))
        })
        .collect();
    PureState::from_terms(SpaceShape::uniform(n, n)?, &terms)
}

/// `Tr_{p+1..N} |HF⟩⟨HF|`, keeping parts `1..p`. Trace 1.
pub fn reduced_hartree_fock(n: usize, p: usize, stat: Statistics) -> Result<Operator> {
    if p == 0 || p > n {
        return Err(Error::invalid(format!("need 1 <= p <= N, got p = {p}, N = {n}")));
    }
    let psi = hartree_fock(n, stat)?;
    // kept parts are the slow digits: ψ reshapes to (kept × traced)
    let kept = n.pow(p as u32);
    let traced = n.pow((n - p) as u32);
    let m = DMatrix::from_fn(kept, traced, |k, t| psi.amplitudes()[k * traced + t]);
    Operator::hermitian(SpaceShape::uniform(n, p)?, hermitian_part(&(&m * m.adjoint())))
}

/// `e^{-βH} / Tr e^{-βH}` by eigendecomposition with the ground energy shifted to zero.
pub fn gibbs(h: &Operator, beta: f64) -> Result<Operator> {
    if !h.is_hermitian() {
        return Err(Error::invalid("Gibbs state needs a hermitian Hamiltonian"));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("inverse temperature must be finite and >= 0, got {beta}")));
    }
    let eig = SymmetricEigen::new(hermitian_part(h.matrix()));
    let e0 = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig.eigenvalues.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let diag = DVector::from_iterator(weights.len(), weights.iter().map(|&w| real(w / z)));
    let v = &eig.eigenvectors;
    let m: DMatrix<C64> = v * DMatrix::from_diagonal(&diag) * v.adjoint();
    Operator::hermitian(h.shape().clone(), hermitian_part(&m))
}
