//! Superoperators on `M_m` and linear maps on block-diagonal algebras.

use crate::algebra::{compress, AlgebraElement, AlgebraShape};
use crate::error::{Error, Result};
use crate::mats::{self, isqrt, unvec, vec, DenseMatrix, Tolerance, C64};

/// Matrix `T` of side `m²` acting by `vec(φ(X)) = T vec(X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    m: usize,
    matrix: DenseMatrix,
}

impl SuperOperator {
    pub fn new(matrix: DenseMatrix) -> Result<Self> {
        let n = matrix.require_square()?;
        let m = isqrt(n).ok_or_else(|| Error::Dimension(format!("superoperator side {n} is not a perfect square")))?;
        Ok(SuperOperator { m, matrix })
    }

    pub fn identity(m: usize) -> Self {
        SuperOperator {
            m,
            matrix: DenseMatrix::identity(m * m),
        }
    }

    pub fn zero(m: usize) -> Self {
        SuperOperator {
            m,
            matrix: DenseMatrix::zeros(m * m, m * m),
        }
    }

    /// Tabulates a linear map on `M_m` from its action on the matrix units.
    pub fn from_map(m: usize, f: impl Fn(&DenseMatrix) -> DenseMatrix) -> Result<Self> {
        let mut t = DenseMatrix::zeros(m * m, m * m);
        for j in 0..m {
            for i in 0..m {
                let col = vec(&f(&DenseMatrix::unit(m, i, j)))?;
                for (r, z) in col.into_iter().enumerate() {
                    t[(r, i + j * m)] = z;
                }
            }
        }
        Ok(SuperOperator { m, matrix: t })
    }

    /// The transpose map `X ↦ Xᵀ`, which is positive but not completely positive.
    pub fn transpose_map(m: usize) -> Self {
        Self::from_map(m, |x| x.transpose()).expect("square units")
    }

    /// Superoperator with the given Choi matrix `C[(i,k),(j,l)] = φ(E_ij)[k,l]`.
    pub fn from_choi(c: &DenseMatrix) -> Result<Self> {
        let n = c.require_square()?;
        let m = isqrt(n).ok_or_else(|| Error::Dimension(format!("Choi side {n} is not a perfect square")))?;
        let mut t = DenseMatrix::zeros(n, n);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        t[(k + l * m, i + j * m)] = c[(i * m + k, j * m + l)];
                    }
                }
            }
        }
        Ok(SuperOperator { m, matrix: t })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        if x.rows() != self.m || x.cols() != self.m {
            return Err(Error::Dimension(format!(
                "{}x{} input for a map on M_{}",
                x.rows(),
                x.cols(),
                self.m
            )));
        }
        unvec(&self.matrix.mul_vec(&vec(x)?))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(SuperOperator {
            m: self.m,
            matrix: self.matrix.matmul(&other.matrix)?,
        })
    }

    pub fn power(&self, n: u64) -> Self {
        SuperOperator {
            m: self.m,
            matrix: mats::power(&self.matrix, n).expect("square"),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        SuperOperator {
            m: self.m,
            matrix: self.matrix.scale_re(s),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SuperOperator {
            m: self.m,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SuperOperator {
            m: self.m,
            matrix: &self.matrix - &other.matrix,
        }
    }

    /// Hilbert–Schmidt adjoint map, i.e. the conjugate transpose of the matrix.
    pub fn hs_adjoint(&self) -> Self {
        SuperOperator {
            m: self.m,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        mats::spectral_radius(&self.matrix)
    }

    /// Choi matrix `Σ E_ij ⊗ φ(E_ij)`, i.e. `C[(i,k),(j,l)] = T[k + l*m, i + j*m]`.
    pub fn choi(&self) -> DenseMatrix {
        let m = self.m;
        let mut c = DenseMatrix::zeros(m * m, m * m);
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        c[(i * m + k, j * m + l)] = self.matrix[(k + l * m, i + j * m)];
                    }
                }
            }
        }
        c
    }

    /// Complete positivity via a PSD test on the Choi matrix.
    pub fn is_cp(&self, tol: &Tolerance) -> Result<bool> {
        Ok(mats::psd_checks(&self.choi(), tol)?.is_psd)
    }
}

/// A linear map on the algebra of a given shape, stored as an `m²×m²`
/// superoperator that vanishes on the orthogonal complement of the algebra and
/// takes values in it.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    shape: AlgebraShape,
    superop: SuperOperator,
    positive: bool,
}

impl LinearMap {
    /// Restricts `t` to the algebra. Fails if `t` sends the algebra outside itself.
    pub fn new(shape: &AlgebraShape, t: &SuperOperator, positive: bool, tol: &Tolerance) -> Result<Self> {
        let m = shape.m();
        if t.m() != m {
            return Err(Error::Dimension(format!(
                "superoperator on M_{} for shape [{shape}]",
                t.m()
            )));
        }
        let idx = shape.vec_indices();
        let mut inside = vec![false; m * m];
        for &i in &idx {
            inside[i] = true;
        }
        let mut out = DenseMatrix::zeros(m * m, m * m);
        let (mut leak, mut total) = (0.0f64, 0.0f64);
        for &c in &idx {
            for r in 0..m * m {
                let z = t.matrix()[(r, c)];
                total += z.norm_sqr();
                if inside[r] {
                    out[(r, c)] = z;
                } else {
                    leak += z.norm_sqr();
                }
            }
        }
        if leak.sqrt() > tol.psd_tol * total.sqrt().max(1.0) {
            return Err(Error::Precondition(format!(
                "map does not send the algebra [{shape}] into itself (leak {:e})",
                leak.sqrt()
            )));
        }
        Ok(LinearMap {
            shape: shape.clone(),
            superop: SuperOperator { m, matrix: out },
            positive,
        })
    }

    /// Builds the map from its matrix in the matrix-unit coordinates of the
    /// algebra (ordered as [`AlgebraShape::positions`]).
    pub fn from_algebra_matrix(shape: &AlgebraShape, a: &DenseMatrix, positive: bool) -> Result<Self> {
        let dim = shape.dim();
        if a.rows() != dim || a.cols() != dim {
            return Err(Error::Dimension(format!(
                "{}x{} coordinate matrix for an algebra of dimension {dim}",
                a.rows(),
                a.cols()
            )));
        }
        let m = shape.m();
        let idx = shape.vec_indices();
        let mut t = DenseMatrix::zeros(m * m, m * m);
        for (r, &ir) in idx.iter().enumerate() {
            for (c, &ic) in idx.iter().enumerate() {
                t[(ir, ic)] = a[(r, c)];
            }
        }
        Ok(LinearMap {
            shape: shape.clone(),
            superop: SuperOperator { m, matrix: t },
            positive,
        })
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        LinearMap {
            shape: shape.clone(),
            superop: shape.compression_superop(),
            positive: true,
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn superop(&self) -> &SuperOperator {
        &self.superop
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn m(&self) -> usize {
        self.shape.m()
    }

    /// Matrix of the map in the matrix-unit coordinates of the algebra.
    pub fn algebra_matrix(&self) -> DenseMatrix {
        let idx = self.shape.vec_indices();
        DenseMatrix::from_fn(idx.len(), idx.len(), |r, c| self.superop.matrix()[(idx[r], idx[c])])
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        let y = self.superop.apply(x.matrix())?;
        compress(&y, &self.shape)
    }

    /// Applies the map to the compression of an arbitrary `m×m` matrix.
    pub fn apply_matrix(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.superop.apply(x)
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        mats::spectral_radius(&self.algebra_matrix())
    }

    /// Operator norm of a positive map, `‖φ(1)‖`.
    pub fn positive_norm(&self) -> Result<f64> {
        Ok(self.apply(&AlgebraElement::identity(&self.shape))?.matrix().op_norm())
    }

    pub fn with_superop(&self, t: SuperOperator) -> Self {
        LinearMap {
            shape: self.shape.clone(),
            superop: t,
            positive: self.positive,
        }
    }
}

/// Coordinates of `x` in the matrix-unit basis of the algebra.
pub fn algebra_coords(x: &DenseMatrix, shape: &AlgebraShape) -> Vec<C64> {
    shape.positions().into_iter().map(|(i, j)| x[(i, j)]).collect()
}

/// Inverse of [`algebra_coords`].
pub fn from_algebra_coords(v: &[C64], shape: &AlgebraShape) -> DenseMatrix {
    let m = shape.m();
    let mut x = DenseMatrix::zeros(m, m);
    for (&z, (i, j)) in v.iter().zip(shape.positions()) {
        x[(i, j)] = z;
    }
    x
}
