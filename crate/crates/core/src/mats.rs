//! Dense complex linear algebra.
//!
//! Matrices are stored row-major. Vectorization stacks columns:
//! `vec(A)[i + j*m] = A[i, j]`, so `vec(E_ij) = e_{i + j*m}` (0-based) and
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. Every superoperator in the crate uses this
//! convention.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as C64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Numerical thresholds shared by every routine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular values at or below `rank_tol * σ_max` count as zero.
    pub rank_tol: f64,
    /// Eigenvalue floor for semidefiniteness, scaled by `max(1, ‖M‖)`.
    pub psd_tol: f64,
    /// Stopping threshold for iterations and residual checks.
    pub conv_tol: f64,
    /// Relative distance below which eigenvalues are grouped into one cluster.
    pub cluster_tol: f64,
    /// Relative tolerance for deciding `|λ| = r`.
    pub peripheral_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_tol: 1e-9,
            psd_tol: 1e-9,
            conv_tol: 1e-10,
            cluster_tol: 1e-6,
            peripheral_tol: 1e-8,
        }
    }
}

/// Complex `rows × cols` matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    /// Real matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = C64::new(x, 0.0);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn diag_real(d: &[f64]) -> Self {
        Self::diag(&d.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    /// Matrix unit `E_ij` in `M_n` (0-based).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn column(v: &[C64]) -> Self {
        DenseMatrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius (Hilbert–Schmidt) norm.
    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    /// Operator norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        if self.rows == 2 && self.cols == 2 {
            let f2 = self.data.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let det = (self.data[0] * self.data[3] - self.data[1] * self.data[2]).norm_sqr();
            return ((f2 + (f2 * f2 - 4.0 * det).max(0.0).sqrt()) / 2.0).sqrt();
        }
        singular_values(self)
            .ok()
            .and_then(|s| s.first().copied())
            .unwrap_or_else(|| self.fro_norm())
    }

    /// Hilbert–Schmidt inner product `trace(self* other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && (self - &self.adjoint()).fro_norm() <= tol * self.fro_norm().max(1.0)
    }

    /// `(M + M*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_re(0.5)
    }

    pub fn sub_block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let (n, k, p) = (self.rows, self.cols, rhs.cols);
        if n * k * p > 64 * 64 * 64 {
            return from_faer(&(to_faer(self) * to_faer(rhs)));
        }
        let mut out = Self::zeros(n, p);
        for i in 0..n {
            let row = &self.data[i * k..(i + 1) * k];
            let orow = &mut out.data[i * p..(i + 1) * p];
            for (l, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rrow = &rhs.data[l * p..(l + 1) * p];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn check_same_shape(&self, rhs: &Self) {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "shape mismatch: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            rhs.rows,
            rhs.cols
        );
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &DenseMatrix {
    type Output = DenseMatrix;
    fn add(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.check_same_shape(rhs);
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &DenseMatrix {
    type Output = DenseMatrix;
    fn sub(self, rhs: &DenseMatrix) -> DenseMatrix {
        self.check_same_shape(rhs);
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &DenseMatrix {
    type Output = DenseMatrix;
    fn neg(self) -> DenseMatrix {
        self.map(|z| -z)
    }
}

/// Panics on inner-dimension mismatch; use [`DenseMatrix::matmul`] for a checked product.
impl Mul for &DenseMatrix {
    type Output = DenseMatrix;
    fn mul(self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimension mismatch");
        self.mul_unchecked(rhs)
    }
}

impl AddAssign<&DenseMatrix> for DenseMatrix {
    fn add_assign(&mut self, rhs: &DenseMatrix) {
        self.check_same_shape(rhs);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub(crate) fn to_faer(a: &DenseMatrix) -> Mat<C64> {
    Mat::from_fn(a.rows, a.cols, |i, j| a[(i, j)])
}

pub(crate) fn from_faer<M>(m: &M) -> DenseMatrix
where
    M: faer::mat::AsMatRef<T = C64, Rows = usize, Cols = usize>,
{
    let r = m.as_mat_ref();
    DenseMatrix::from_fn(r.nrows(), r.ncols(), |i, j| r[(i, j)])
}

/// Kronecker product: entry `(i*rB + k, j*cB + l)` is `A[i,j] * B[k,l]`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ra, ca, rb, cb) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = DenseMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// `k`-fold Kronecker power; `k = 0` gives the 1×1 identity.
pub fn kron_power(a: &DenseMatrix, k: usize) -> DenseMatrix {
    (0..k).fold(DenseMatrix::identity(1), |acc, _| kron(&acc, a))
}

/// Column-stacking vectorization of a square matrix.
pub fn vec(a: &DenseMatrix) -> Result<Vec<C64>> {
    let m = a.require_square()?;
    let mut v = vec![ZERO; m * m];
    for j in 0..m {
        for i in 0..m {
            v[i + j * m] = a[(i, j)];
        }
    }
    Ok(v)
}

/// Inverse of [`vec`]; the length must be a perfect square.
pub fn unvec(v: &[C64]) -> Result<DenseMatrix> {
    let m = isqrt(v.len()).ok_or_else(|| Error::Dimension(format!("length {} is not a perfect square", v.len())))?;
    Ok(DenseMatrix::from_fn(m, m, |i, j| v[i + j * m]))
}

/// Exact integer square root, if it exists.
pub fn isqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

/// Eigenvalues with algebraic multiplicity, in solver order.
pub fn eigenvalues(m: &DenseMatrix) -> Result<Vec<C64>> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Vec::new());
    }
    to_faer(m).eigenvalues().map_err(|_| Error::NoConvergence)
}

/// Eigenvalues and (right) eigenvectors as columns.
pub fn eigen(m: &DenseMatrix) -> Result<(Vec<C64>, DenseMatrix)> {
    m.require_square()?;
    let e = to_faer(m).eigen().map_err(|_| Error::NoConvergence)?;
    let vals = e.S().column_vector().iter().copied().collect();
    Ok((vals, from_faer(&e.U())))
}

/// Max modulus over the eigenvalues; 0 for an empty matrix.
pub fn spectral_radius(m: &DenseMatrix) -> Result<f64> {
    if m.rows == 2 && m.cols == 2 {
        let (a, b, c, d) = (m.data[0], m.data[1], m.data[2], m.data[3]);
        let half = (a + d) / 2.0;
        let disc = (half * half - (a * d - b * c)).sqrt();
        return Ok((half + disc).norm().max((half - disc).norm()));
    }
    Ok(eigenvalues(m)?.iter().fold(0.0, |a, z| a.max(z.norm())))
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &DenseMatrix) -> Result<Vec<f64>> {
    if m.rows == 0 || m.cols == 0 {
        return Ok(Vec::new());
    }
    let s = to_faer(m).singular_values().map_err(|_| Error::NoConvergence)?;
    Ok(s)
}

/// Full SVD `M = U diag(s) V*`, with `s` nonincreasing.
pub struct Svd {
    pub u: DenseMatrix,
    pub s: Vec<f64>,
    pub v: DenseMatrix,
}

pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    let d = to_faer(m).svd().map_err(|_| Error::NoConvergence)?;
    Ok(Svd {
        u: from_faer(&d.U()),
        s: d.S().column_vector().iter().map(|z| z.re).collect(),
        v: from_faer(&d.V()),
    })
}

/// Eigen-decomposition of the Hermitian part; eigenvalues ascending, vectors as columns.
pub fn hermitian_eigen(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    m.require_square()?;
    let h = to_faer(&m.hermitian_part());
    let e = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
    let vals = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok((vals, from_faer(&e.U())))
}

pub fn hermitian_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    m.require_square()?;
    let h = to_faer(&m.hermitian_part());
    let e = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NoConvergence)?;
    Ok(e)
}

/// Number of singular values above `rank_tol * σ_max`; 0 for the zero matrix.
pub fn tolerant_rank(m: &DenseMatrix, rank_tol: f64) -> usize {
    let s = match singular_values(m) {
        Ok(s) => s,
        Err(_) => return 0,
    };
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rank_tol * top).count()
}

/// Outcome of [`psd_checks`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub is_hermitian: bool,
    pub is_psd: bool,
    pub is_strictly_positive: bool,
    pub min_eigenvalue: f64,
}

/// Hermiticity and eigenvalue-floor tests on the symmetrized matrix.
///
/// The floor is `psd_tol * max(1, ‖M‖_F)`.
pub fn psd_checks(m: &DenseMatrix, tol: &Tolerance) -> Result<PsdReport> {
    let n = m.require_square()?;
    let scale = m.fro_norm().max(1.0);
    let is_hermitian = (m - &m.adjoint()).fro_norm() <= tol.psd_tol * scale;
    let min_eigenvalue = if n == 0 { 0.0 } else { hermitian_eigenvalues(m)?[0] };
    let floor = tol.psd_tol * scale;
    Ok(PsdReport {
        is_hermitian,
        is_psd: is_hermitian && min_eigenvalue >= -floor,
        is_strictly_positive: is_hermitian && min_eigenvalue > floor,
        min_eigenvalue,
    })
}

/// Principal square root of a PSD matrix.
pub fn herm_sqrt(m: &DenseMatrix, tol: &Tolerance) -> Result<DenseMatrix> {
    let rep = psd_checks(m, tol)?;
    if !rep.is_psd {
        return Err(Error::NotPsd(rep.min_eigenvalue));
    }
    let (vals, vecs) = hermitian_eigen(m)?;
    let roots: Vec<C64> = vals.iter().map(|&x| C64::new(x.max(0.0).sqrt(), 0.0)).collect();
    Ok(&(&vecs * &DenseMatrix::diag(&roots)) * &vecs.adjoint())
}

/// Inverse of a nonsingular matrix; singular means `σ_min <= rank_tol * max(1, σ_max)`.
pub fn inverse(m: &DenseMatrix, tol: &Tolerance) -> Result<DenseMatrix> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    let s = singular_values(m)?;
    let (smax, smin) = (s[0], s[n - 1]);
    if smin <= tol.rank_tol * smax.max(1.0) {
        return Err(Error::Singular(smin));
    }
    Ok(from_faer(&to_faer(m).partial_piv_lu().inverse()))
}

/// Matrix exponential by scaling and squaring a truncated Taylor series.
pub fn mat_exp(m: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.require_square()?;
    let norm = m.fro_norm();
    let mut s = 0u32;
    while norm / f64::powi(2.0, s as i32) > 0.5 {
        s += 1;
    }
    let a = m.scale_re(f64::powi(2.0, -(s as i32)));
    let mut result = DenseMatrix::identity(n);
    let mut term = DenseMatrix::identity(n);
    for k in 1..=24 {
        term = (&term * &a).scale_re(1.0 / k as f64);
        result += &term;
        if term.fro_norm() <= f64::EPSILON * result.fro_norm() {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}

/// `M^n` by repeated squaring.
pub fn power(m: &DenseMatrix, mut n: u64) -> Result<DenseMatrix> {
    let size = m.require_square()?;
    let mut result = DenseMatrix::identity(size);
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        n >>= 1;
        if n > 0 {
            base = &base * &base;
        }
    }
    Ok(result)
}

/// Solves `M x = b` by LU with a singularity check.
pub fn solve(m: &DenseMatrix, b: &[C64], tol: &Tolerance) -> Result<Vec<C64>> {
    let inv = inverse(m, tol)?;
    Ok(inv.mul_vec(b))
}

/// Orthonormal basis (as columns) of the null space, from singular values at or
/// below `rank_tol * σ_max`; `k` forces the dimension when given.
pub fn null_space(m: &DenseMatrix, rank_tol: f64, k: Option<usize>) -> Result<DenseMatrix> {
    let n = m.cols;
    let d = svd(m)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    let rank = match k {
        Some(k) => n - k.min(n),
        None => d.s.iter().filter(|&&x| x > rank_tol * top && top > 0.0).count(),
    };
    Ok(d.v.sub_block(0, rank, n, n - rank))
}

/// Orthonormal basis (as columns) of the column space at tolerant rank.
pub fn range_basis(m: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let d = svd(m)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    let rank = d.s.iter().filter(|&&x| x > rank_tol * top && top > 0.0).count();
    Ok(d.u.sub_block(0, 0, m.rows, rank))
}

/// Upper-triangular Schur form `M = Q T Q*` computed by successive deflation
/// with eigenvectors of the trailing block.
pub fn schur(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = m.require_square()?;
    let mut q = DenseMatrix::identity(n);
    let mut t = m.clone();
    for k in 0..n.saturating_sub(1) {
        let size = n - k;
        let block = t.sub_block(k, k, size, size);
        let vals = eigenvalues(&block)?;
        let lambda = vals[0];
        let shifted = &block - &DenseMatrix::identity(size).scale(lambda);
        let v = null_space(&shifted, 0.0, Some(1))?.col(0);
        // Unitary whose first column is v: the left singular vectors of v.
        let w = svd(&DenseMatrix::column(&v))?.u;
        let mut big = DenseMatrix::identity(n);
        big.set_block(k, k, &w);
        t = &(&big.adjoint() * &t) * &big;
        q = &q * &big;
        for i in k + 1..n {
            t[(i, k)] = ZERO;
        }
    }
    Ok((q, t))
}

/// JSON form of a matrix: `{"rows": r, "cols": c, "data": [[re, im], ...]}` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&DenseMatrix> for MatrixJson {
    fn from(m: &DenseMatrix) -> Self {
        MatrixJson {
            rows: m.rows,
            cols: m.cols,
            data: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for DenseMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        DenseMatrix::from_row_major(
            j.rows,
            j.cols,
            j.data.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
        )
    }
}

impl Serialize for DenseMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for DenseMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        DenseMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}
