//! Block-diagonal C*-algebras `M_{n1} ⊕ … ⊕ M_{nd}` inside `M_m`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cpmap::{kraus_of_choi, CpMap, LinearMap, SuperOperator};
use crate::error::{Error, Result};
use crate::mats::{DenseMatrix, Tolerance, ONE, ZERO};

/// Block sizes `[n1, …, nd]` of a block-diagonal subalgebra of `M_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeJson", into = "ShapeJson")]
pub struct AlgebraShape {
    blocks: Vec<usize>,
    offsets: Vec<usize>,
    m: usize,
}

#[derive(Serialize, Deserialize)]
struct ShapeJson {
    blocks: Vec<usize>,
}

impl TryFrom<ShapeJson> for AlgebraShape {
    type Error = Error;
    fn try_from(j: ShapeJson) -> Result<Self> {
        AlgebraShape::new(j.blocks)
    }
}

impl From<AlgebraShape> for ShapeJson {
    fn from(s: AlgebraShape) -> Self {
        ShapeJson { blocks: s.blocks }
    }
}

impl AlgebraShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Invalid("a shape needs at least one block".into()));
        }
        if blocks.contains(&0) {
            return Err(Error::Invalid("block sizes must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut m = 0;
        for &b in &blocks {
            offsets.push(m);
            m += b;
        }
        Ok(AlgebraShape { blocks, offsets, m })
    }

    /// The full matrix algebra `M_m`.
    pub fn full(m: usize) -> Self {
        AlgebraShape::new(vec![m]).expect("m must be positive")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Complex dimension `Σ nᵢ²`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    pub fn is_full(&self) -> bool {
        self.blocks.len() == 1
    }

    fn block_index(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    /// Whether position `(i, j)` lies inside a diagonal block.
    pub fn contains_position(&self, i: usize, j: usize) -> bool {
        self.block_index(i) == self.block_index(j)
    }

    /// Matrix-unit positions `(i, j)` spanning the algebra, in vec order.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.dim());
        for j in 0..self.m {
            for i in 0..self.m {
                if self.contains_position(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Indices into `vec(X)` of the positions in [`Self::positions`].
    pub fn vec_indices(&self) -> Vec<usize> {
        self.positions().into_iter().map(|(i, j)| i + j * self.m).collect()
    }

    /// Superoperator of the compression onto the diagonal blocks (a 0/1 diagonal).
    pub fn compression_superop(&self) -> SuperOperator {
        let m = self.m;
        let mut t = DenseMatrix::zeros(m * m, m * m);
        for idx in self.vec_indices() {
            t[(idx, idx)] = ONE;
        }
        SuperOperator::new(t).expect("square by construction")
    }
}

impl fmt::Display for AlgebraShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.blocks.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses the `--shape` form `"2,1"`.
impl FromStr for AlgebraShape {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let blocks = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad block size {p:?} in shape {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        AlgebraShape::new(blocks)
    }
}

/// An element of the algebra, stored as its embedded block-diagonal `m×m` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    shape: AlgebraShape,
    matrix: DenseMatrix,
}

impl AlgebraElement {
    /// Wraps `x`, which must lie in the algebra up to `psd_tol * max(1, ‖x‖)`.
    /// Off-block entries are zeroed.
    pub fn new(shape: &AlgebraShape, x: &DenseMatrix, tol: &Tolerance) -> Result<Self> {
        if !is_member(x, shape, tol)? {
            return Err(Error::Invalid(format!(
                "matrix is not block diagonal for shape [{shape}]"
            )));
        }
        compress(x, shape)
    }

    pub fn identity(shape: &AlgebraShape) -> Self {
        AlgebraElement {
            shape: shape.clone(),
            matrix: DenseMatrix::identity(shape.m()),
        }
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.matrix
    }

    /// The diagonal blocks in order.
    pub fn blocks(&self) -> Vec<DenseMatrix> {
        self.shape
            .blocks
            .iter()
            .zip(&self.shape.offsets)
            .map(|(&n, &o)| self.matrix.sub_block(o, o, n, n))
            .collect()
    }
}

/// Places `blocks` along the diagonal of an `m×m` matrix.
pub fn embed(blocks: &[DenseMatrix], shape: &AlgebraShape) -> Result<AlgebraElement> {
    if blocks.len() != shape.blocks.len() {
        return Err(Error::Dimension(format!(
            "{} blocks supplied for shape [{shape}]",
            blocks.len()
        )));
    }
    let mut x = DenseMatrix::zeros(shape.m, shape.m);
    for ((b, &n), &o) in blocks.iter().zip(&shape.blocks).zip(&shape.offsets) {
        if b.rows() != n || b.cols() != n {
            return Err(Error::Dimension(format!(
                "block of size {}x{} where {n}x{n} was expected",
                b.rows(),
                b.cols()
            )));
        }
        x.set_block(o, o, b);
    }
    Ok(AlgebraElement {
        shape: shape.clone(),
        matrix: x,
    })
}

/// Block-diagonal part of `x`: `Σ P_k x P_k`.
pub fn compress(x: &DenseMatrix, shape: &AlgebraShape) -> Result<AlgebraElement> {
    let m = x.require_square()?;
    if m != shape.m {
        return Err(Error::Dimension(format!(
            "{m}x{m} matrix for shape [{shape}] of side {}",
            shape.m
        )));
    }
    let matrix = DenseMatrix::from_fn(
        m,
        m,
        |i, j| {
            if shape.contains_position(i, j) {
                x[(i, j)]
            } else {
                ZERO
            }
        },
    );
    Ok(AlgebraElement {
        shape: shape.clone(),
        matrix,
    })
}

/// `‖x − compress(x)‖_F ≤ psd_tol * max(1, ‖x‖_F)`.
pub fn is_member(x: &DenseMatrix, shape: &AlgebraShape, tol: &Tolerance) -> Result<bool> {
    let c = compress(x, shape)?;
    Ok((x - &c.matrix).fro_norm() <= tol.psd_tol * x.fro_norm().max(1.0))
}

/// Extends a CP map on the algebra to all of `M_m` as `ι ∘ τ ∘ φ`, with `φ` the
/// block compression. The Kraus list of the result comes from its Choi matrix.
///
/// Fails if `τ` does not map the algebra into itself.
pub fn canonical_extension(tau: &CpMap, tol: &Tolerance) -> Result<CpMap> {
    let shape = tau.shape();
    let ext = extension_superop(tau, tol)?;
    let kraus = kraus_of_choi(&ext.choi(), tol)?;
    CpMap::new(kraus, AlgebraShape::full(shape.m()))
}

/// Superoperator `T_φ T_τ T_φ` of the canonical extension.
pub fn extension_superop(tau: &CpMap, tol: &Tolerance) -> Result<SuperOperator> {
    let restricted = LinearMap::new(tau.shape(), &tau.superop(), true, tol)?;
    Ok(restricted.superop().clone())
}
