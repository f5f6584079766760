use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::mats::{self, DenseMatrix, Tolerance, C64};

/// One eigenvalue cluster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCluster {
    pub value: C64,
    pub multiplicity: usize,
    /// Size of the largest Jordan block.
    pub degeneracy_index: usize,
}

/// Eigenvalue data of a linear map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralStructure {
    pub eigenvalues: Vec<EigenCluster>,
    pub r: f64,
    /// Largest degeneracy index among eigenvalues of modulus `r`.
    pub d_max: usize,
    /// Eigenvalues of modulus `r` whose degeneracy index is `d_max`.
    pub maximal_spectrum: Vec<C64>,
}

impl SpectralStructure {
    /// The cluster containing `z`, if any.
    pub fn cluster_at(&self, z: C64, tol: &Tolerance) -> Option<&EigenCluster> {
        let scale = self.r.max(1.0);
        self.eigenvalues
            .iter()
            .find(|c| (c.value - z).norm() <= tol.cluster_tol * scale)
    }

    pub fn is_peripheral(&self, z: C64, tol: &Tolerance) -> bool {
        z.norm() >= self.r * (1.0 - tol.peripheral_tol)
    }
}

/// Groups eigenvalues whose distance to the running cluster mean is at most
/// `cluster_tol * max(1, max|λ|)`.
pub(crate) fn cluster_eigenvalues(vals: &[C64], tol: &Tolerance) -> Vec<(C64, usize)> {
    let scale = vals.iter().fold(1.0f64, |a, z| a.max(z.norm()));
    let mut sums: Vec<(C64, usize)> = Vec::new();
    for &z in vals {
        match sums
            .iter_mut()
            .find(|(s, k)| (*s / *k as f64 - z).norm() <= tol.cluster_tol * scale)
        {
            Some((s, k)) => {
                *s += z;
                *k += 1;
            }
            None => sums.push((z, 1)),
        }
    }
    sums.into_iter().map(|(s, k)| (s / k as f64, k)).collect()
}

/// Smallest `k` for which the nullity of `(T − λI)^k` reaches the algebraic
/// multiplicity. Singular values of `(T − λI)^k` count as zero below
/// `rank_tol · max(1, ‖T − λI‖)^k`.
pub(crate) fn degeneracy_index(t: &DenseMatrix, lambda: C64, mult: usize, tol: &Tolerance) -> Result<usize> {
    let n = t.rows();
    let shifted = t - &DenseMatrix::identity(n).scale(lambda);
    let base = shifted.op_norm().max(1.0);
    let mut pw = shifted.clone();
    for k in 1..=mult {
        let s = mats::singular_values(&pw)?;
        let thr = tol.rank_tol * base.powi(k as i32);
        let nullity = s.iter().filter(|&&x| x <= thr).count();
        if nullity >= mult {
            return Ok(k);
        }
        pw = &pw * &shifted;
    }
    Ok(mult)
}

/// Clusters the spectrum of `t` and computes degeneracy indices.
pub fn spectral_structure(t: &DenseMatrix, tol: &Tolerance) -> Result<SpectralStructure> {
    t.require_square()?;
    let vals = mats::eigenvalues(t)?;
    let clusters = cluster_eigenvalues(&vals, tol);
    let mut eigenvalues = Vec::with_capacity(clusters.len());
    for (value, multiplicity) in clusters {
        let degeneracy_index = degeneracy_index(t, value, multiplicity, tol)?;
        eigenvalues.push(EigenCluster {
            value,
            multiplicity,
            degeneracy_index,
        });
    }
    eigenvalues.sort_by(|a, b| b.value.norm().total_cmp(&a.value.norm()));
    let r = eigenvalues.first().map_or(0.0, |c| c.value.norm());
    let peripheral: Vec<&EigenCluster> = eigenvalues
        .iter()
        .filter(|c| c.value.norm() >= r * (1.0 - tol.peripheral_tol))
        .collect();
    let d_max = peripheral.iter().map(|c| c.degeneracy_index).max().unwrap_or(0);
    let maximal_spectrum = peripheral
        .iter()
        .filter(|c| c.degeneracy_index == d_max)
        .map(|c| c.value)
        .collect();
    Ok(SpectralStructure {
        eigenvalues,
        r,
        d_max,
        maximal_spectrum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonalizable_has_index_one() {
        let t = DenseMatrix::diag_real(&[2.0, -2.0, 1.0, 1.0]);
        let s = spectral_structure(&t, &Tolerance::default()).unwrap();
        assert!(s.eigenvalues.iter().all(|c| c.degeneracy_index == 1));
        assert_eq!(s.d_max, 1);
        assert_eq!(s.maximal_spectrum.len(), 2);
        assert!((s.r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jordan_block() {
        let t = DenseMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let s = spectral_structure(&t, &Tolerance::default()).unwrap();
        assert_eq!(s.d_max, 2);
        assert_eq!(s.maximal_spectrum.len(), 1);
        assert!((s.maximal_spectrum[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let t3 = DenseMatrix::from_real_rows(&[
            &[0.5, 1.0, 0.0, 0.0],
            &[0.0, 0.5, 1.0, 0.0],
            &[0.0, 0.0, 0.5, 0.0],
            &[0.0, 0.0, 0.0, 0.5],
        ]);
        let s = spectral_structure(&t3, &Tolerance::default()).unwrap();
        assert_eq!(s.eigenvalues.len(), 1);
        assert_eq!(s.eigenvalues[0].multiplicity, 4);
        assert_eq!(s.d_max, 3);
    }
}
