//! Spin-½ lattices: spin density matrices
//!
//! ```text
//! R_p[(i_1 α_1 … i_p α_p), (j_1 β_1 … j_p β_p)] = Tr S_{i_1}^{α_1}…S_{i_p}^{α_p} ρ̂ S_{j_p}^{β_p}…S_{j_1}^{β_1}
//! ```
//!
//! and Heisenberg Hamiltonians. Site `i` is part `i` of `(C²)^{⊗N}`; local
//! index 0 is spin up.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::manybody::fock::{natural_orbitals, rotate_parts};
use crate::measure::{exact, variational_or_best, Diagnostics, LogBase, MeasureResult};
use crate::norms::{full_norm, restricted_norm_basis, NormMode, NormOptions};
use crate::tensor::{Operator, SpaceShape};
use crate::C64;

pub const MAX_SITES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// `S^α` on one site as a monomial: `(bit flip, amplitude for up, amplitude for down)`.
fn single_site(axis: Axis) -> (bool, C64, C64) {
    match axis {
        Axis::X => (true, C64::new(0.5, 0.0), C64::new(0.5, 0.0)),
        // σ^y|↑⟩ = i|↓⟩, σ^y|↓⟩ = −i|↑⟩
        Axis::Y => (true, C64::new(0.0, 0.5), C64::new(0.0, -0.5)),
        Axis::Z => (false, C64::new(0.5, 0.0), C64::new(-0.5, 0.0)),
    }
}

/// A product of single-site spin operators: `X|b⟩ = coef[b] |b ^ mask⟩`.
struct SpinString {
    mask: usize,
    coef: Vec<C64>,
}

impl SpinString {
    /// `S_{s_1}^{α_1} … S_{s_k}^{α_k}`, the rightmost factor acting first.
    fn new(sites: usize, factors: &[(usize, Axis)]) -> Self {
        let dim = 1usize << sites;
        let mut mask = 0;
        let mut coef = vec![C64::new(1.0, 0.0); dim];
        for (b, slot) in coef.iter_mut().enumerate() {
            let mut state = b;
            for &(site, axis) in factors.iter().rev() {
                let bit = 1usize << (sites - 1 - site);
                let (flip, up, down) = single_site(axis);
                *slot *= if state & bit == 0 { up } else { down };
                if flip {
                    state ^= bit;
                }
            }
            if b == 0 {
                mask = state;
            }
        }
        SpinString { mask, coef }
    }
}

fn check_qubits(rho: &Operator) -> Result<usize> {
    let dims = rho.shape().dims();
    if dims.iter().any(|&d| d != 2) {
        return Err(Error::invalid(format!("spin-1/2 lattice needs local dimension 2, got {dims:?}")));
    }
    if dims.len() > MAX_SITES {
        return Err(Error::Unsupported(format!("at most {MAX_SITES} sites, got {}", dims.len())));
    }
    Ok(dims.len())
}

/// `R_p` as an operator on `p` parts of dimension `3N`; index `3·site + axis` per part.
#[derive(Clone, Debug)]
pub struct SpinDensityMatrix {
    pub p: usize,
    pub sites: usize,
    pub matrix: Operator,
}

pub fn spin_density_matrix(rho: &Operator, p: usize) -> Result<SpinDensityMatrix> {
    let sites = check_qubits(rho)?;
    match p {
        0 => return Err(Error::invalid("spin density matrix order must be >= 1")),
        1 | 2 => {}
        _ => return Err(Error::Unsupported(format!("spin density matrices of order {p} (dimension (3N)^p)"))),
    }
    if !rho.is_hermitian() {
        return Err(Error::invalid("statistical operator must be hermitian"));
    }
    let labels: Vec<(usize, Axis)> = (0..sites).flat_map(|s| Axis::ALL.map(|a| (s, a))).collect();
    let strings: Vec<SpinString> = if p == 1 {
        labels.iter().map(|&l| SpinString::new(sites, &[l])).collect()
    } else {
        labels
            .iter()
            .flat_map(|&l1| labels.iter().map(move |&l2| (l1, l2)))
            .map(|(l1, l2)| SpinString::new(sites, &[l1, l2]))
            .collect()
    };
    // Tr(X_I ρ X_J†) = Σ_a c_I(a^m_I) ρ[a^m_I, a^m_J] conj(c_J(a^m_J))
    let rm = rho.matrix();
    let dim = 1usize << sites;
    let n = strings.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        let si = &strings[i];
        for j in i..n {
            let sj = &strings[j];
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..dim {
                let (bi, bj) = (a ^ si.mask, a ^ sj.mask);
                let v = rm[(bi, bj)];
                if v != C64::new(0.0, 0.0) {
                    acc += si.coef[bi] * v * sj.coef[bj].conj();
                }
            }
            m[(i, j)] = acc;
            m[(j, i)] = acc.conj();
        }
    }
    let matrix = Operator::hermitian(SpaceShape::uniform(3 * sites, p)?, m)?;
    Ok(SpinDensityMatrix { p, sites, matrix })
}

/// `ε(R_p) = log(‖R_p‖_D / ‖R_1^{⊗p}‖_D)` with the literal `p`-fold product.
pub fn measure_spin(rho: &Operator, p: usize, mode: NormMode, base: LogBase, opts: &NormOptions) -> Result<MeasureResult> {
    let r_p = spin_density_matrix(rho, p)?.matrix;
    let r_1 = if p == 1 { r_p.clone() } else { spin_density_matrix(rho, 1)?.matrix };
    let norm_1 = full_norm(&r_1);
    let mut warnings = Vec::new();
    let norm_p = match mode {
        NormMode::Variational => variational_or_best(&r_p, opts, &mut warnings)?,
        NormMode::Basis => {
            let u = natural_orbitals(r_1.matrix());
            restricted_norm_basis(&rotate_parts(&r_p, &u)?)
        }
        NormMode::FullSpace => return Err(Error::invalid("the measure needs a restricted norm mode")),
    };
    let norm_ot = norm_1.powi(p as i32);
    let mut out = MeasureResult::from_norms(norm_p.value, norm_ot, r_p.dim(), base, mode)?;
    out.converged = norm_p.converged;
    out.diagnostics = Some(Diagnostics { a: norm_p, a_otimes: exact(norm_ot) });
    out.warnings = warnings;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingRange {
    /// Ring of nearest-neighbour bonds; a single bond for two sites.
    Nearest,
    /// Every pair, couplings scaled by `1/N`.
    AllToAll,
}

impl std::str::FromStr for CouplingRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(CouplingRange::Nearest),
            "all-to-all" | "all_to_all" | "all" => Ok(CouplingRange::AllToAll),
            other => Err(Error::invalid(format!("unknown coupling range {other:?}"))),
        }
    }
}

/// `H = −J Σ_bonds S_i·S_j` (nearest) or `H = −(J/N) Σ_{i<j} S_i·S_j`
/// (all-to-all). `J > 0` is ferromagnetic.
pub fn heisenberg_hamiltonian(sites: usize, coupling: f64, range: CouplingRange) -> Result<Operator> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::invalid(format!("need 1..={MAX_SITES} sites, got {sites}")));
    }
    let bonds: Vec<(usize, usize)> = match range {
        CouplingRange::Nearest if sites == 1 => vec![],
        CouplingRange::Nearest if sites == 2 => vec![(0, 1)],
        CouplingRange::Nearest => (0..sites).map(|i| (i, (i + 1) % sites)).collect(),
        CouplingRange::AllToAll => (0..sites).flat_map(|i| (i + 1..sites).map(move |j| (i, j))).collect(),
    };
    let scale = match range {
        CouplingRange::Nearest => -coupling,
        CouplingRange::AllToAll => -coupling / sites as f64,
    };
    let dim = 1usize << sites;
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for &(i, j) in &bonds {
        let (bi, bj) = (1usize << (sites - 1 - i), 1usize << (sites - 1 - j));
        for b in 0..dim {
            let aligned = (b & bi == 0) == (b & bj == 0);
            if aligned {
                m[(b, b)] += C64::new(0.25 * scale, 0.0);
            } else {
                m[(b, b)] += C64::new(-0.25 * scale, 0.0);
                // (S⁺S⁻ + S⁻S⁺)/2 swaps the antiparallel pair
                m[(b ^ bi ^ bj, b)] += C64::new(0.5 * scale, 0.0);
            }
        }
    }
    Operator::hermitian(SpaceShape::uniform(2, sites)?, m)
}

/// `Σ_i S_i^z`.
pub fn total_sz(sites: usize) -> Result<Operator> {
    let dim = 1usize << sites;
    let diag: Vec<f64> = (0..dim)
        .map(|b| {
            let down = b.count_ones() as f64;
            0.5 * (sites as f64 - down) - 0.5 * down
        })
        .collect();
    Operator::from_diagonal(SpaceShape::uniform(2, sites)?, &diag)
}

/// `|↑…↑⟩⟨↑…↑|`.
pub fn polarized(sites: usize) -> Result<Operator> {
    let mut diag = vec![0.0; 1 << sites];
    diag[0] = 1.0;
    Operator::from_diagonal(SpaceShape::uniform(2, sites)?, &diag)
}

/// `I / 2^N`.
pub fn infinite_temperature(sites: usize) -> Result<Operator> {
    let dim = 1usize << sites;
    Operator::from_diagonal(SpaceShape::uniform(2, sites)?, &vec![1.0 / dim as f64; dim])
}
