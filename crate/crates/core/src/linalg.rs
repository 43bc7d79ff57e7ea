//! Dense complex linear algebra for small Hilbert spaces.
//!
//! [`ComplexMatrix`] wraps a `nalgebra` dense matrix and adds the handful of
//! quantum-flavoured operations the rest of the crate needs: Kronecker
//! products, partial traces over tensor factors, Hermitian matrix functions
//! (exponentials and square roots via eigendecomposition) and numerical rank.
//!
//! Tensor factors are ordered left to right: index 0 is the leftmost factor,
//! so in `system ⊗ controller` the system is factor 0.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Absolute tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLIP_TOL, 0)` are treated as round-off and clipped to zero.
pub const PSD_CLIP_TOL: f64 = 1e-10;
/// Default relative tolerance for [`numerical_rank`].
pub const RANK_TOL: f64 = 1e-8;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.get(i, j);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong counts and NaN/Inf.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Structure("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Real matrix from nested rows; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Self::from_fn(n, m, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i] } else { ZERO })
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// Projector `|u⟩⟨u|` (no normalisation applied).
    pub fn projector(u: &[C64]) -> Self {
        Self::outer(u, u)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols(), v.len(), "matrix-vector dimension mismatch");
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `⟨v|A|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        inner(v, &self.mul_vec(v))
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows()))
    }

    /// Operator (spectral) norm: the largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.0
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }
}

impl From<DMatrix<C64>> for ComplexMatrix {
    fn from(m: DMatrix<C64>) -> Self {
        Self(m)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 + rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 - rhs.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-self.0)
    }
}

/// `⟨a|b⟩ = Σ conj(a_k) b_k`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "vector dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Computational basis vector `|index⟩` of dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix(a.0.kronecker(&b.0))
}

/// Kronecker product of a list of factors, leftmost first.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let (first, rest) = factors.split_first().expect("at least one factor");
    rest.iter().fold((*first).clone(), |acc, f| kron(&acc, f))
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Ordered subsystem dimensions of a tensor-product space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorStructure {
    factor_dims: Vec<usize>,
}

impl TensorStructure {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.contains(&0) {
            return Err(Error::Structure(
                "factor dimensions must be a nonempty list of positive integers".into(),
            ));
        }
        Ok(Self { factor_dims })
    }

    /// Two factors, e.g. system and controller.
    pub fn bipartite(left: usize, right: usize) -> Self {
        Self {
            factor_dims: vec![left, right],
        }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    fn digits(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.factor_dims.len()];
        for (slot, &d) in self.factor_dims.iter().enumerate().rev() {
            out[slot] = flat % d;
            flat /= d;
        }
        out
    }
}

/// Reduces `m` to the factor `keep` by tracing out every other factor.
pub fn partial_trace(
    m: &ComplexMatrix,
    structure: &TensorStructure,
    keep: usize,
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if structure.dim() != m.rows() {
        return Err(Error::Structure(format!(
            "factor dimensions {:?} do not multiply to {}",
            structure.factor_dims,
            m.rows()
        )));
    }
    if keep >= structure.factor_dims.len() {
        return Err(Error::Structure(format!(
            "kept factor {keep} out of range for {} factors",
            structure.factor_dims.len()
        )));
    }
    let dk = structure.factor_dims[keep];
    let digits: Vec<Vec<usize>> = (0..m.rows()).map(|i| structure.digits(i)).collect();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (i, di) in digits.iter().enumerate() {
        for (j, dj) in digits.iter().enumerate() {
            let traced_equal = di
                .iter()
                .zip(dj)
                .enumerate()
                .all(|(slot, (a, b))| slot == keep || a == b);
            if traced_equal {
                let (a, b) = (di[keep], dj[keep]);
                out.0[(a, b)] += m.0[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `Σ f(λ_k) |v_k⟩⟨v_k|`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.vectors;
        let d: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v.get(i, j) * d[j]);
        &scaled * &v.adjoint()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

/// Hermitian eigendecomposition. The input is symmetrised after the check.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    if !h.is_finite() {
        return Err(Error::NonFinite);
    }
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian { defect });
    }
    let eig = h.hermitian_part().0.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(h.rows(), h.rows(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// `exp(-i t h)` for Hermitian `h`.
pub fn unitary_from_generator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = eigh(h)?;
    Ok(eig.map(|x| C64::from_polar(1.0, -t * x)))
}

/// Principal square root of a positive semi-definite matrix.
pub fn psd_sqrt(e: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(e)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -PSD_CLIP_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig.map(|x| C64::new(x.max(0.0).sqrt(), 0.0)))
}

/// Inverse square root of a positive definite matrix.
pub fn inv_sqrt(e: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(e)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min <= 0.0 {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    Ok(eig.map(|x| C64::new(1.0 / x.sqrt(), 0.0)))
}

/// Singular values of the matrix whose columns are `vectors`, padded to square.
fn column_svd(vectors: &[Vec<C64>]) -> Option<(Vec<f64>, DMatrix<C64>)> {
    let dim = vectors.first()?.len();
    assert!(
        vectors.iter().all(|v| v.len() == dim),
        "vectors must share a dimension"
    );
    let cols = vectors.len().max(dim);
    let a = DMatrix::from_fn(dim, cols, |i, j| vectors.get(j).map_or(ZERO, |v| v[i]));
    let svd = a.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    Some((svd.singular_values.iter().copied().collect(), u))
}

/// Number of singular values of the stacked vectors above `tol` times the largest.
pub fn numerical_rank(vectors: &[Vec<C64>], tol: f64) -> usize {
    let Some((sv, _)) = column_svd(vectors) else {
        return 0;
    };
    let max = sv.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)`.
pub fn orthogonal_complement(vectors: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let Some((sv, u)) = column_svd(vectors) else {
        return Vec::new();
    };
    let dim = u.nrows();
    let max = sv.iter().copied().fold(0.0, f64::max);
    // u has min(dim, cols) = dim columns since the input was padded to at least dim columns.
    (0..dim)
        .filter(|&k| max == 0.0 || sv[k] <= tol * max)
        .map(|k| u.column(k).iter().copied().collect())
        .collect()
}
