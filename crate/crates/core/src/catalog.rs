//! Small CP maps and tuples with known closed-form spectral data.

use crate::algebra::AlgebraShape;
use crate::cpmap::CpMap;
use crate::mats::DenseMatrix;

/// Golden ratio `(1 + √5)/2`.
pub fn golden_ratio() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn unit_kraus(m: usize, pairs: &[(usize, usize)], blocks: Vec<usize>) -> CpMap {
    let kraus = pairs.iter().map(|&(i, j)| DenseMatrix::unit(m, i, j)).collect();
    CpMap::new(kraus, AlgebraShape::new(blocks).expect("valid blocks")).expect("valid kraus list")
}

/// `[[a, b], [c, d]] ↦ diag(a + d, 0)` on `M₂`. Spectral radius 1, while every
/// power has norm 2.
pub fn corner_collapse_map() -> CpMap {
    unit_kraus(2, &[(0, 0), (1, 0)], vec![2])
}

/// `(X, e) ↦ (diag(a + e, a + e), d)` on `M₂ ⊕ M₁`, where `a = X₁₁`, `d = X₂₂`.
/// Spectral radius is the golden ratio.
pub fn golden_ratio_map() -> CpMap {
    unit_kraus(3, &[(0, 0), (0, 1), (2, 0), (2, 1), (1, 2)], vec![2, 1])
}

/// `X ↦ 2 trace(X) I` on `M₁ ⊕ M₁`, written with Kraus operators
/// `[[1, 1], [1, 1]]` and `[[1, −1], [1, −1]]` that share an invariant line.
pub fn trace_pair_map() -> CpMap {
    let a = DenseMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
    let b = DenseMatrix::from_real_rows(&[&[1.0, -1.0], &[1.0, -1.0]]);
    CpMap::new(vec![a, b], AlgebraShape::new(vec![1, 1]).expect("valid blocks")).expect("valid kraus list")
}

/// `(a, b, c) ↦ (b, a + c, b)` on `M₁ ⊕ M₁ ⊕ M₁`: the adjacency matrix of the
/// path on three vertices, with eigenvalues `0, ±√2`.
pub fn path_graph_map() -> CpMap {
    unit_kraus(3, &[(1, 0), (1, 2), (0, 1), (2, 1)], vec![1, 1, 1])
}

/// `{[[1, 1], [0, 1]], [[1, 0], [1, 1]]}`, whose joint spectral radius is the
/// golden ratio, attained by the product of the two.
pub fn golden_pair() -> Vec<DenseMatrix> {
    vec![
        DenseMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]),
        DenseMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 1.0]]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mats::{Tolerance, C64};

    #[test]
    fn closed_forms() {
        let x = DenseMatrix::from_fn(3, 3, |i, j| C64::new((1 + i + 3 * j) as f64, 0.0));
        let tau = golden_ratio_map();
        let y = tau.apply(&x).unwrap();
        let (a, d, e) = (x[(0, 0)], x[(1, 1)], x[(2, 2)]);
        let want = DenseMatrix::diag(&[a + e, a + e, d]);
        assert!((&y - &want).max_abs() < 1e-14);

        let y = path_graph_map().apply(&x).unwrap();
        let (a, b, c) = (x[(0, 0)], x[(1, 1)], x[(2, 2)]);
        assert!((&y - &DenseMatrix::diag(&[b, a + c, b])).max_abs() < 1e-14);

        let x2 = DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let y = corner_collapse_map().apply(&x2).unwrap();
        assert!((&y - &DenseMatrix::diag_real(&[5.0, 0.0])).max_abs() < 1e-14);

        let x2 = DenseMatrix::diag_real(&[1.5, 0.25]);
        let y = trace_pair_map().apply(&x2).unwrap();
        assert!((&y - &DenseMatrix::diag_real(&[3.5, 3.5])).max_abs() < 1e-14);
        assert!(trace_pair_map().superop().is_cp(&Tolerance::default()).unwrap());
    }
}
