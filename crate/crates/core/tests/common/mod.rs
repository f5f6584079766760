#![allow(dead_code)]

use cpspectra::algebra::{compress, AlgebraElement, AlgebraShape};
use cpspectra::cpmap::CpMap;
use cpspectra::{DenseMatrix, Tolerance, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn tol() -> Tolerance {
    Tolerance::default()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_like<R: Rng>(rng: &mut R) -> f64 {
    // Sum of uniforms; enough spread for test inputs.
    (0..4).map(|_| rng.random::<f64>() - 0.5).sum::<f64>()
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| C64::new(gaussian_like(rng), gaussian_like(rng)))
}

pub fn random_real_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| C64::new(gaussian_like(rng), 0.0))
}

pub fn random_tuple<R: Rng>(rng: &mut R, d: usize, m: usize) -> Vec<DenseMatrix> {
    (0..d).map(|_| random_matrix(rng, m, m)).collect()
}

pub fn random_unitary<R: Rng>(rng: &mut R, m: usize) -> DenseMatrix {
    let h = random_matrix(rng, m, m);
    let herm = &h + &h.adjoint();
    cpspectra::mats::mat_exp(&herm.scale(C64::new(0.0, 1.0))).unwrap()
}

/// Strictly positive element of the algebra.
pub fn random_strictly_positive<R: Rng>(rng: &mut R, shape: &AlgebraShape) -> AlgebraElement {
    let m = shape.m();
    let b = random_matrix(rng, m, m);
    let p = &(&b.adjoint() * &b) + &DenseMatrix::identity(m).scale_re(0.1);
    compress(&p, shape).unwrap()
}

/// Nonzero PSD element of the algebra of rank at most `rank`.
pub fn random_psd<R: Rng>(rng: &mut R, shape: &AlgebraShape, rank: usize) -> AlgebraElement {
    let m = shape.m();
    let b = random_matrix(rng, rank, m);
    compress(&(&b.adjoint() * &b), shape).unwrap()
}

/// Random CP map on the algebra: Kraus operators `Aᵢ Pₖ` with `Pₖ` the block
/// projections, so that the image always lies in the algebra.
pub fn random_cp<R: Rng>(rng: &mut R, shape: &AlgebraShape, count: usize) -> CpMap {
    let m = shape.m();
    let mut kraus = Vec::new();
    for _ in 0..count {
        let a = random_matrix(rng, m, m);
        let mut offset = 0;
        for &n in shape.blocks() {
            let p = DenseMatrix::from_fn(m, m, |i, j| {
                if i == j && (offset..offset + n).contains(&i) {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            kraus.push(&a * &p);
            offset += n;
        }
    }
    CpMap::new(kraus, shape.clone()).unwrap()
}

pub fn shapes() -> Vec<AlgebraShape> {
    [vec![2], vec![2, 1], vec![1, 1, 1]]
        .into_iter()
        .map(|b| AlgebraShape::new(b).unwrap())
        .collect()
}

/// `(a, b) ↦ (a + b, b)` on `M₁ ⊕ M₁`, a CP map with a 2×2 Jordan block at 1.
pub fn jordan_map() -> CpMap {
    let kraus = vec![
        DenseMatrix::unit(2, 0, 0),
        DenseMatrix::unit(2, 1, 0),
        DenseMatrix::unit(2, 1, 1),
    ];
    CpMap::new(kraus, AlgebraShape::new(vec![1, 1]).unwrap()).unwrap()
}
