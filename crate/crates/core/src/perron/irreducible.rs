use rand::Rng;

use crate::algebra::{canonical_extension, AlgebraShape};
use crate::cpmap::{CpMap, LinearMap};
use crate::error::Result;
use crate::mats::{self, DenseMatrix, Tolerance, C64};

use super::generated::algebra_basis;

/// Verdict of [`irreducible_cp`].
#[derive(Clone, Debug, PartialEq)]
pub struct Irreducibility {
    pub irreducible: bool,
    /// Dimension of the non-unital algebra generated by a Kraus list of `τ̃`.
    pub dimension: usize,
    pub m: usize,
    /// A unit matrix HS-orthogonal to the generated algebra, when reducible.
    pub witness: Option<DenseMatrix>,
}

/// A CP map on the algebra is irreducible iff the Kraus operators of its
/// canonical extension generate all of `M_m`. Any Kraus list of the extension
/// works, since the generated algebra depends only on the coefficient space.
pub fn irreducible_cp(tau: &CpMap, tol: &Tolerance) -> Result<Irreducibility> {
    let m = tau.m();
    if m == 1 {
        return Ok(Irreducibility {
            irreducible: true,
            dimension: 1,
            m,
            witness: None,
        });
    }
    let ext = canonical_extension(tau, tol)?;
    let gen = algebra_basis(ext.kraus(), false, tol)?;
    let dimension = gen.dim();
    let irreducible = dimension == m * m;
    Ok(Irreducibility {
        irreducible,
        dimension,
        m,
        witness: if irreducible {
            None
        } else {
            gen.space.orthogonal_witness()
        },
    })
}

/// Outcome of [`strict_positivity_probe`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeReport {
    pub all_strictly_positive: bool,
    pub min_eigenvalue: f64,
    pub probes: usize,
}

fn random_rank_one<R: Rng>(shape: &AlgebraShape, rng: &mut R) -> DenseMatrix {
    let blocks = shape.blocks();
    let which = rng.random_range(0..blocks.len());
    let offset: usize = blocks[..which].iter().sum();
    let n = blocks[which];
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let norm = v
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let m = shape.m();
    DenseMatrix::from_fn(m, m, |i, j| {
        if (offset..offset + n).contains(&i) && (offset..offset + n).contains(&j) {
            v[i - offset] * v[j - offset].conj() / (norm * norm)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Randomized check that `(1 + φ)^{m−1}` sends rank-one projections of the
/// algebra to strictly positive elements. Corroborates, never decides.
pub fn strict_positivity_probe<R: Rng>(
    phi: &LinearMap,
    probes: usize,
    rng: &mut R,
    tol: &Tolerance,
) -> Result<ProbeReport> {
    let shape = phi.shape();
    let m = shape.m();
    let one_plus = shape.compression_superop().add(phi.superop());
    let s = one_plus.power(m.saturating_sub(1) as u64);
    let mut min_eig = f64::INFINITY;
    let mut all = true;
    for _ in 0..probes {
        let x = random_rank_one(shape, rng);
        let y = s.apply(&x)?;
        let rep = mats::psd_checks(&y, tol)?;
        min_eig = min_eig.min(rep.min_eigenvalue);
        all &= rep.is_strictly_positive;
    }
    Ok(ProbeReport {
        all_strictly_positive: all,
        min_eigenvalue: min_eig,
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn block_diagonal_alpha_is_reducible() {
        let a = DenseMatrix::diag_real(&[1.0, 2.0]);
        let tau = CpMap::alpha(&a).unwrap();
        let v = irreducible_cp(&tau, &tol()).unwrap();
        assert!(!v.irreducible);
        assert_eq!(v.dimension, 2);
        let w = v.witness.unwrap();
        assert!(w.hs_inner(&DenseMatrix::identity(2)).norm() < 1e-12);
        assert!(w.hs_inner(&a).norm() < 1e-12);
    }

    #[test]
    fn probe_sees_low_rank_images() {
        let tau = CpMap::alpha(&DenseMatrix::unit(3, 0, 0)).unwrap();
        let phi = LinearMap::new(tau.shape(), &tau.superop(), true, &tol()).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        assert!(
            !strict_positivity_probe(&phi, 16, &mut rng, &tol())
                .unwrap()
                .all_strictly_positive
        );
    }

    #[test]
    fn full_kraus_set_is_irreducible() {
        let kraus: Vec<_> = (0..2)
            .flat_map(|i| (0..2).map(move |j| DenseMatrix::unit(2, i, j)))
            .collect();
        let tau = CpMap::on_full(kraus).unwrap();
        let v = irreducible_cp(&tau, &tol()).unwrap();
        assert!(v.irreducible && v.witness.is_none());
        let phi = LinearMap::new(tau.shape(), &tau.superop(), true, &tol()).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        assert!(
            strict_positivity_probe(&phi, 16, &mut rng, &tol())
                .unwrap()
                .all_strictly_positive
        );
    }

    #[test]
    fn scalar_algebra_is_irreducible() {
        let tau = CpMap::alpha(&DenseMatrix::from_real_rows(&[&[0.0]])).unwrap();
        assert!(irreducible_cp(&tau, &tol()).unwrap().irreducible);
    }
}
