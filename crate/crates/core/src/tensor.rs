//! Dense multipartite linear algebra.
//!
//! The composite basis `|n_1 n_2 … n_K⟩` is ordered row-major: part 1 is the
//! slowest-varying index. Part indices in the public API are zero-based.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::C64;

/// Entrywise tolerance used when resolving an unknown hermiticity flag.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Tolerance on the Euclidean norm of normalized states and factors.
pub const NORMALIZED_TOL: f64 = 1e-12;

/// Local dimensions of a composite space `⊗ H_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceShape(Vec<usize>);

impl SpaceShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::invalid("a space needs at least one part"));
        }
        if dims.contains(&0) {
            return Err(Error::invalid(format!("local dimensions must be >= 1, got {dims:?}")));
        }
        Ok(SpaceShape(dims))
    }

    /// `parts` copies of the same local dimension.
    pub fn uniform(local_dim: usize, parts: usize) -> Result<Self> {
        Self::new(vec![local_dim; parts])
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn parts(&self) -> usize {
        self.0.len()
    }

    pub fn total_dim(&self) -> usize {
        self.0.iter().product()
    }

    /// Flat composite index of a basis string.
    pub fn flat_index(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.parts());
        digits
            .iter()
            .zip(&self.0)
            .fold(0, |acc, (&n, &d)| acc * d + n)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.parts()];
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = flat % d;
            flat /= d;
        }
        out
    }

    fn concat(shapes: &[&SpaceShape]) -> SpaceShape {
        SpaceShape(shapes.iter().flat_map(|s| s.0.iter().copied()).collect())
    }
}

/// A vector in the composite space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    shape: SpaceShape,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(shape: SpaceShape, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::invalid(format!(
                "state has {} amplitudes, shape {:?} needs {}",
                amplitudes.len(),
                shape.dims(),
                shape.total_dim()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("state amplitudes must be finite"));
        }
        Ok(PureState { shape, amplitudes })
    }

    /// Builds a state from `(basis string, amplitude)` pairs.
    pub fn from_terms(shape: SpaceShape, terms: &[(Vec<usize>, C64)]) -> Result<Self> {
        let mut amps = DVector::zeros(shape.total_dim());
        for (digits, c) in terms {
            if digits.len() != shape.parts() || digits.iter().zip(shape.dims()).any(|(&n, &d)| n >= d) {
                return Err(Error::invalid(format!("basis string {digits:?} outside {:?}", shape.dims())));
            }
            amps[shape.flat_index(digits)] += *c;
        }
        Self::new(shape, amps)
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORMALIZED_TOL
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// An element of the disentangled set: one unit vector per part.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    factors: Vec<DVector<C64>>,
}

impl ProductState {
    pub fn new(factors: Vec<DVector<C64>>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::invalid("product state needs at least one factor"));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.is_empty() || (f.norm() - 1.0).abs() > NORMALIZED_TOL {
                return Err(Error::invalid(format!("factor {i} is not a unit vector (norm {})", f.norm())));
            }
        }
        Ok(ProductState { factors })
    }

    /// Normalizes each factor before construction.
    pub fn normalized(factors: Vec<DVector<C64>>) -> Result<Self> {
        let mut out = Vec::with_capacity(factors.len());
        for (i, f) in factors.into_iter().enumerate() {
            let n = f.norm();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::invalid(format!("factor {i} has zero or non-finite norm")));
            }
            out.push(f.unscale(n));
        }
        Self::new(out)
    }

    /// The computational basis product state `|n_1⟩ ⊗ … ⊗ |n_K⟩`.
    pub fn basis(shape: &SpaceShape, digits: &[usize]) -> Result<Self> {
        if digits.len() != shape.parts() {
            return Err(Error::invalid("basis string length differs from part count"));
        }
        let factors = digits
            .iter()
            .zip(shape.dims())
            .map(|(&n, &d)| {
                if n >= d {
                    return Err(Error::invalid(format!("basis index {n} outside local dimension {d}")));
                }
                let mut v = DVector::zeros(d);
                v[n] = C64::new(1.0, 0.0);
                Ok(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductState { factors })
    }

    /// Haar-random factors.
    pub fn random(shape: &SpaceShape, rng: &mut impl rand::Rng) -> Self {
        let factors = shape
            .dims()
            .iter()
            .map(|&d| {
                let v = gaussian_vector(d, rng);
                let n = v.norm();
                v.unscale(n)
            })
            .collect();
        ProductState { factors }
    }

    pub fn factors(&self) -> &[DVector<C64>] {
        &self.factors
    }

    pub fn shape(&self) -> SpaceShape {
        SpaceShape(self.factors.iter().map(|f| f.len()).collect())
    }

    pub(crate) fn from_factors_unchecked(factors: Vec<DVector<C64>>) -> Self {
        ProductState { factors }
    }
}

/// Tri-state self-adjointness metadata.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hermiticity {
    Yes,
    No,
    Unknown,
}

/// Dense operator on a composite space.
#[derive(Clone, Debug)]
pub struct Operator {
    shape: SpaceShape,
    matrix: DMatrix<C64>,
    declared: Hermiticity,
    resolved: OnceLock<bool>,
}

impl PartialEq for Operator {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape && self.matrix == other.matrix
    }
}

impl Operator {
    /// Wraps a matrix; hermiticity is resolved on first use.
    pub fn new(shape: SpaceShape, matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_flag(shape, matrix, Hermiticity::Unknown)
    }

    /// Wraps a matrix declared self-adjoint. The declaration is checked.
    pub fn hermitian(shape: SpaceShape, matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_flag(shape, matrix, Hermiticity::Yes)
    }

    pub fn with_flag(shape: SpaceShape, matrix: DMatrix<C64>, flag: Hermiticity) -> Result<Self> {
        let d = shape.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::invalid(format!(
                "matrix is {}x{}, shape {:?} needs {d}x{d}",
                matrix.nrows(),
                matrix.ncols(),
                shape.dims()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("operator entries must be finite"));
        }
        let op = Operator {
            shape,
            matrix,
            declared: flag,
            resolved: OnceLock::new(),
        };
        if flag == Hermiticity::Yes && !op.check_hermitian() {
            return Err(Error::invalid(format!(
                "operator declared hermitian deviates by {:e}",
                op.hermitian_deviation()
            )));
        }
        Ok(op)
    }

    pub fn identity(shape: SpaceShape) -> Self {
        let d = shape.total_dim();
        Operator {
            shape,
            matrix: DMatrix::identity(d, d),
            declared: Hermiticity::Yes,
            resolved: OnceLock::new(),
        }
    }

    pub fn zeros(shape: SpaceShape) -> Self {
        let d = shape.total_dim();
        Operator {
            shape,
            matrix: DMatrix::zeros(d, d),
            declared: Hermiticity::Yes,
            resolved: OnceLock::new(),
        }
    }

    pub fn from_diagonal(shape: SpaceShape, diag: &[f64]) -> Result<Self> {
        if diag.len() != shape.total_dim() {
            return Err(Error::invalid("diagonal length differs from total dimension"));
        }
        let m = DMatrix::from_diagonal(&DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0))));
        Self::hermitian(shape, m)
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn declared_hermiticity(&self) -> Hermiticity {
        self.declared
    }

    /// Max entrywise `|M − M†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let m = &self.matrix;
        let n = m.nrows();
        let mut worst = 0.0f64;
        for c in 0..n {
            for r in c..n {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    fn check_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL
    }

    /// Resolves the hermiticity flag, checking entrywise when unknown.
    pub fn is_hermitian(&self) -> bool {
        match self.declared {
            Hermiticity::Yes => true,
            Hermiticity::No => false,
            Hermiticity::Unknown => *self.resolved.get_or_init(|| self.check_hermitian()),
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn scale(&self, c: C64) -> Operator {
        let flag = match self.declared {
            Hermiticity::Yes if c.im == 0.0 => Hermiticity::Yes,
            _ => Hermiticity::Unknown,
        };
        Operator {
            shape: self.shape.clone(),
            matrix: &self.matrix * c,
            declared: flag,
            resolved: OnceLock::new(),
        }
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            shape: self.shape.clone(),
            matrix: self.matrix.adjoint(),
            declared: self.declared,
            resolved: OnceLock::new(),
        }
    }

    /// `self + other`; shapes must match.
    pub fn add(&self, other: &Operator) -> Result<Operator> {
        if self.shape != other.shape {
            return Err(Error::invalid("operator shapes differ"));
        }
        Operator::new(self.shape.clone(), &self.matrix + &other.matrix)
    }

    /// `U† A U` for `U = ⊗ U_i`.
    pub fn conjugate_local(&self, unitaries: &[Operator]) -> Result<Operator> {
        if unitaries.len() != self.shape.parts() {
            return Err(Error::invalid("one local unitary per part is required"));
        }
        for (u, &d) in unitaries.iter().zip(self.shape.dims()) {
            if u.shape.parts() != 1 || u.dim() != d {
                return Err(Error::invalid("local unitary dimension differs from the part it acts on"));
            }
        }
        let u = tensor_product(unitaries)?;
        let m = u.matrix.adjoint() * &self.matrix * &u.matrix;
        Operator::new(self.shape.clone(), m)
    }

    /// Relabels parts: part `perm[k]` of `self` becomes part `k` of the result.
    pub fn permute_parts(&self, perm: &[usize]) -> Result<Operator> {
        let k = self.shape.parts();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid(format!("{perm:?} is not a permutation of {k} parts")));
        }
        let new_shape = SpaceShape(perm.iter().map(|&p| self.shape.0[p]).collect());
        let d = self.dim();
        let map: Vec<usize> = (0..d)
            .map(|flat| {
                let old = self.shape.digits(flat);
                let new: Vec<usize> = perm.iter().map(|&p| old[p]).collect();
                new_shape.flat_index(&new)
            })
            .collect();
        let mut m = DMatrix::zeros(d, d);
        for c in 0..d {
            for r in 0..d {
                m[(map[r], map[c])] = self.matrix[(r, c)];
            }
        }
        Operator::with_flag(new_shape, m, self.declared)
    }

    /// Sorted eigenvalues of a hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian() {
            return Err(Error::invalid("eigenvalues requested for a non-hermitian operator"));
        }
        let mut ev: Vec<f64> = hermitian_part(&self.matrix).symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

/// `(M + M†)/2`.
pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).unscale(2.0)
}

/// Kronecker product of the operators, in list order.
pub fn tensor_product(ops: &[Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::invalid("tensor product of an empty list"))?;
    let mut m = first.matrix.clone();
    for op in rest {
        m = m.kronecker(&op.matrix);
    }
    let shape = SpaceShape::concat(&ops.iter().map(|o| &o.shape).collect::<Vec<_>>());
    let flag = if ops.iter().all(|o| o.declared == Hermiticity::Yes) {
        Hermiticity::Yes
    } else {
        Hermiticity::Unknown
    };
    Ok(Operator {
        shape,
        matrix: m,
        declared: flag,
        resolved: OnceLock::new(),
    })
}

/// Traces out every part not listed in `keep`. The kept parts appear in the
/// order given by `keep`.
pub fn partial_trace(a: &Operator, keep: &[usize]) -> Result<Operator> {
    let k = a.shape.parts();
    if keep.is_empty() {
        return Err(Error::invalid("partial trace must keep at least one part"));
    }
    let mut seen = vec![false; k];
    for &p in keep {
        if p >= k {
            return Err(Error::invalid(format!("part index {p} out of range for {k} parts")));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::invalid(format!("part index {p} repeated")));
        }
    }
    let dims = a.shape.dims();
    let traced: Vec<usize> = (0..k).filter(|p| !seen[*p]).collect();
    let kept_shape = SpaceShape(keep.iter().map(|&p| dims[p]).collect());
    let traced_shape = SpaceShape(traced.iter().map(|&p| dims[p]).collect::<Vec<_>>());
    let dk = kept_shape.total_dim();
    let dt = if traced.is_empty() { 1 } else { traced_shape.total_dim() };

    // full[flat(kept digits, traced digits)]
    let mut index = vec![0usize; dk * dt];
    let mut digits = vec![0usize; k];
    for kf in 0..dk {
        let kd = kept_shape.digits(kf);
        for (slot, &p) in kd.iter().zip(keep) {
            digits[p] = *slot;
        }
        for tf in 0..dt {
            if !traced.is_empty() {
                let td = traced_shape.digits(tf);
                for (slot, &p) in td.iter().zip(&traced) {
                    digits[p] = *slot;
                }
            }
            index[kf * dt + tf] = a.shape.flat_index(&digits);
        }
    }

    let mut out = DMatrix::zeros(dk, dk);
    for c in 0..dk {
        for r in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += a.matrix[(index[r * dt + t], index[c * dt + t])];
            }
            out[(r, c)] = acc;
        }
    }
    let flag = if a.declared == Hermiticity::Yes {
        Hermiticity::Yes
    } else {
        Hermiticity::Unknown
    };
    Ok(Operator {
        shape: kept_shape,
        matrix: out,
        declared: flag,
        resolved: OnceLock::new(),
    })
}

/// `|ψ⟩⟨ψ|` for a normalized state.
pub fn outer(psi: &PureState) -> Result<Operator> {
    if !psi.is_normalized() {
        return Err(Error::invalid(format!("outer product needs a normalized state (norm {})", psi.norm())));
    }
    let v = &psi.amplitudes;
    let m = v * v.adjoint();
    Ok(Operator {
        shape: psi.shape.clone(),
        matrix: hermitian_part(&m),
        declared: Hermiticity::Yes,
        resolved: OnceLock::new(),
    })
}

/// Contracts one axis of a row-major tensor with a vector.
pub(crate) fn contract_axis(data: &[C64], dims: &[usize], axis: usize, v: &[C64]) -> Vec<C64> {
    let pre: usize = dims[..axis].iter().product();
    let k = dims[axis];
    let post: usize = dims[axis + 1..].iter().product();
    debug_assert_eq!(v.len(), k);
    let mut out = vec![C64::new(0.0, 0.0); pre * post];
    for p in 0..pre {
        let dst = &mut out[p * post..(p + 1) * post];
        for (j, &w) in v.iter().enumerate() {
            if w == C64::new(0.0, 0.0) {
                continue;
            }
            let src = &data[(p * k + j) * post..(p * k + j + 1) * post];
            for (o, &s) in dst.iter_mut().zip(src) {
                *o += s * w;
            }
        }
    }
    out
}

/// Contracts the operator with every factor except those in `skip`.
///
/// The column-major matrix storage is read as a row-major tensor with axes
/// `[col_1 … col_K, row_1 … row_K]`. Column axes take `f_j`, row axes take
/// `conj(f_j)`. The remaining axes keep their relative order.
pub(crate) fn contract_except(a: &Operator, f: &[DVector<C64>], skip: Option<usize>) -> Vec<C64> {
    let k = a.shape.parts();
    let mut dims: Vec<usize> = a.shape.dims().iter().chain(a.shape.dims()).copied().collect();
    let mut data: Option<Vec<C64>> = None;
    // highest axis first so lower axis positions stay valid
    for axis in (0..2 * k).rev() {
        let part = axis % k;
        if Some(part) == skip {
            continue;
        }
        let v: Vec<C64> = if axis >= k {
            f[part].iter().map(|z| z.conj()).collect()
        } else {
            f[part].iter().copied().collect()
        };
        let src: &[C64] = data.as_deref().unwrap_or(a.matrix.as_slice());
        data = Some(contract_axis(src, &dims, axis, &v));
        dims.remove(axis);
    }
    data.unwrap_or_else(|| a.matrix.as_slice().to_vec())
}

/// Contracts a state vector with `conj(f_j)` on every part except `skip`.
pub(crate) fn contract_vector_except(v: &[C64], dims: &[usize], f: &[DVector<C64>], skip: Option<usize>) -> Vec<C64> {
    let mut dims = dims.to_vec();
    let mut data: Option<Vec<C64>> = None;
    for part in (0..dims.len()).rev() {
        if Some(part) == skip {
            continue;
        }
        let w: Vec<C64> = f[part].iter().map(|z| z.conj()).collect();
        let src: &[C64] = data.as_deref().unwrap_or(v);
        data = Some(contract_axis(src, &dims, part, &w));
        dims.remove(part);
    }
    data.unwrap_or_else(|| v.to_vec())
}

/// `⟨f|A|f⟩`, evaluated by contracting the factors directly.
pub fn quadratic_form(f: &ProductState, a: &Operator) -> Result<C64> {
    if f.shape() != a.shape {
        return Err(Error::invalid(format!(
            "product state shape {:?} differs from operator shape {:?}",
            f.shape().dims(),
            a.shape.dims()
        )));
    }
    let out = contract_except(a, &f.factors, None);
    let z = out[0];
    if a.is_hermitian() {
        Ok(C64::new(z.re, 0.0))
    } else {
        Ok(z)
    }
}

/// Full amplitude vector of `⊗ φ_i`.
pub fn embed_product(f: &ProductState) -> PureState {
    let mut v = f.factors[0].clone();
    for g in &f.factors[1..] {
        v = v.kronecker(g);
    }
    PureState {
        shape: f.shape(),
        amplitudes: v,
    }
}

fn gaussian_vector(d: usize, rng: &mut impl rand::Rng) -> DVector<C64> {
    DVector::from_fn(d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

fn ginibre(d: usize, rng: &mut impl rand::Rng) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    })
}

/// Hilbert–Schmidt random density: `G G† / Tr(G G†)` with `G` complex Ginibre.
pub fn random_density(shape: &SpaceShape, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(shape.total_dim(), &mut rng);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    Operator {
        shape: shape.clone(),
        matrix: hermitian_part(&w).unscale(tr),
        declared: Hermiticity::Yes,
        resolved: OnceLock::new(),
    }
}

/// Haar-random unitary of dimension `d`.
pub fn random_unitary(d: usize, rng: &mut impl rand::Rng) -> DMatrix<C64> {
    let g = ginibre(d, rng);
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    // fix column phases so the distribution is Haar
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        if n > 0.0 {
            let phase = rjj / n;
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// One Haar-random unitary per part.
pub fn random_local_unitaries(shape: &SpaceShape, seed: u64) -> Vec<Operator> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shape
        .dims()
        .iter()
        .map(|&d| Operator {
            shape: SpaceShape(vec![d]),
            matrix: random_unitary(d, &mut rng),
            declared: Hermiticity::Unknown,
            resolved: OnceLock::new(),
        })
        .collect()
}
