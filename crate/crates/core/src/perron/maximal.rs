use crate::algebra::AlgebraElement;
use crate::cpmap::{LinearMap, SuperOperator};
use crate::error::{Error, Result};
use crate::mats::{self, DenseMatrix, Tolerance, C64};

use super::structure::{spectral_structure, SpectralStructure};

/// Limits on the Cesàro averaging in [`maximal_part_cesaro`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CesaroBudget {
    /// Maximum number of doublings when `d = 1` (up to `2^doublings` terms).
    pub doublings: u32,
    /// `log2` of the maximum number of terms summed one by one when `d > 1`.
    pub direct_log2: u32,
}

impl Default for CesaroBudget {
    fn default() -> Self {
        CesaroBudget {
            doublings: 60,
            direct_log2: 20,
        }
    }
}

/// The maximal part `φ̂` of a map with positive spectral radius.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalPart {
    pub superop: SuperOperator,
    pub r: f64,
    pub d: usize,
    /// `φ̂² = φ̂` (true) versus `φ̂² = 0` (false).
    pub idempotent: bool,
    /// `‖φ̂² − φ̂‖` and `‖φ̂²‖`.
    pub idempotent_residual: f64,
    pub nilpotent_residual: f64,
    /// Max-entry distance between the projection and Cesàro routes.
    pub route_gap: f64,
    pub structure: SpectralStructure,
}

impl MaximalPart {
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        self.superop.apply(x)
    }
}

fn binom(n: u64, k: usize) -> f64 {
    let mut b = 1.0f64;
    for i in 0..k as u64 {
        b *= (n - i) as f64 / (i + 1) as f64;
    }
    b
}

fn require_radius(s: &SpectralStructure, a: &DenseMatrix, tol: &Tolerance) -> Result<()> {
    if s.r <= tol.rank_tol * a.op_norm().max(f64::MIN_POSITIVE) || s.r == 0.0 {
        return Err(Error::ZeroSpectralRadius);
    }
    Ok(())
}

/// Projection route: `(A − r)^{d−1} P_r` with `P_r` the Riesz projection onto
/// the generalized eigenspace at `r`, computed on the coordinate matrix `a`.
///
/// `P_r = V (W*V)⁻¹ W*`, where `V` and `W` span the right and left null spaces
/// of `(A − r)^{d_r}`. The result is zero when `r` is not in the maximal spectrum.
pub fn maximal_part_projection(a: &DenseMatrix, s: &SpectralStructure, tol: &Tolerance) -> Result<DenseMatrix> {
    let n = a.require_square()?;
    require_radius(s, a, tol)?;
    let r = C64::new(s.r, 0.0);
    let Some(at_r) = s.cluster_at(r, tol) else {
        return Ok(DenseMatrix::zeros(n, n));
    };
    if at_r.degeneracy_index < s.d_max {
        return Ok(DenseMatrix::zeros(n, n));
    }
    let shifted = a - &DenseMatrix::identity(n).scale(at_r.value);
    let k = at_r.multiplicity;
    let kpow = mats::power(&shifted, at_r.degeneracy_index as u64)?;
    let svd = mats::svd(&kpow)?;
    let v = svd.v.sub_block(0, n - k, n, k);
    let w = svd.u.sub_block(0, n - k, n, k);
    let middle = mats::inverse(&(&w.adjoint() * &v), tol)?;
    let p = &(&v * &middle) * &w.adjoint();
    let lead = mats::power(&shifted, (s.d_max - 1) as u64)?;
    Ok(&lead * &p)
}

/// Cesàro route: the mean of `Aⁿ / (C(n, d−1) r^{n−d+1})` over `n = 1..N`.
///
/// For `d = 1` the partial sums double geometrically, `G(2N) = G(N) + BᴺG(N)`
/// with `B = A/r`; the means are combined as `2e_{2N} − e_N`, cancelling the
/// `c/N` bias, and iteration stops once two such values agree within `conv_tol`. For
/// `d > 1` terms are summed one by one and three means at `N, 2N, 4N` are
/// combined as `4e_{4N} − 4e_{2N} + e_N`, cancelling the `(α ln N + β)/N` bias.
pub fn maximal_part_cesaro(
    a: &DenseMatrix,
    r: f64,
    d: usize,
    tol: &Tolerance,
    budget: CesaroBudget,
) -> Result<DenseMatrix> {
    let n = a.require_square()?;
    if r <= 0.0 {
        return Err(Error::ZeroSpectralRadius);
    }
    let b = a.scale_re(1.0 / r);
    if d <= 1 {
        let mut bn = b.clone();
        let mut g = b.clone();
        let mut count: u64 = 1;
        let mut prev_mean = g.clone();
        let mut prev_x: Option<DenseMatrix> = None;
        for _ in 0..budget.doublings {
            g = &g + &(&bn * &g);
            bn = &bn * &bn;
            count = count.saturating_mul(2);
            let mean = g.scale_re(1.0 / count as f64);
            let x = &mean.scale_re(2.0) - &prev_mean;
            if let Some(p) = &prev_x {
                if (&x - p).max_abs() <= tol.conv_tol * x.max_abs().max(1.0) {
                    return Ok(x);
                }
            }
            prev_x = Some(x);
            prev_mean = mean;
        }
        return Err(Error::CesaroNoConvergence(count));
    }
    let scale = r.powi(d as i32 - 1);
    let mut sum = DenseMatrix::zeros(n, n);
    let mut bn = DenseMatrix::identity(n);
    let mut means: Vec<DenseMatrix> = Vec::new();
    let mut extrapolated: Option<DenseMatrix> = None;
    let mut next_checkpoint: u64 = 4;
    let limit = 1u64 << budget.direct_log2;
    let mut term: u64 = 0;
    while term < limit {
        term += 1;
        bn = &bn * &b;
        let c = binom(term, d - 1);
        if c > 0.0 {
            sum += &bn.scale_re(scale / c);
        }
        if term == next_checkpoint {
            means.push(sum.scale_re(1.0 / term as f64));
            next_checkpoint *= 2;
            let len = means.len();
            if len >= 3 {
                let x = &(&means[len - 1].scale_re(4.0) - &means[len - 2].scale_re(4.0)) + &means[len - 3];
                if let Some(prev) = &extrapolated {
                    let diff = (&x - prev).max_abs();
                    if diff <= tol.conv_tol * x.max_abs().max(1.0) {
                        return Ok(x);
                    }
                }
                extrapolated = Some(x);
            }
        }
    }
    Err(Error::CesaroNoConvergence(term))
}

/// Maximal part by the projection route, cross-checked against the Cesàro route.
///
/// A Cesàro budget exhaustion is reported as an error; the agreement between
/// the routes is returned in `route_gap`.
pub fn maximal_part(phi: &LinearMap, tol: &Tolerance) -> Result<MaximalPart> {
    maximal_part_with_budget(phi, tol, CesaroBudget::default())
}

pub fn maximal_part_with_budget(phi: &LinearMap, tol: &Tolerance, budget: CesaroBudget) -> Result<MaximalPart> {
    let a = phi.algebra_matrix();
    let structure = spectral_structure(&a, tol)?;
    require_radius(&structure, &a, tol)?;
    let proj = maximal_part_projection(&a, &structure, tol)?;
    let ces = maximal_part_cesaro(&a, structure.r, structure.d_max, tol, budget)?;
    let route_gap = (&proj - &ces).max_abs();
    let sq = &proj * &proj;
    let idempotent_residual = (&sq - &proj).max_abs();
    let nilpotent_residual = sq.max_abs();
    let lifted = LinearMap::from_algebra_matrix(phi.shape(), &proj, phi.is_positive())?;
    Ok(MaximalPart {
        superop: lifted.superop().clone(),
        r: structure.r,
        d: structure.d_max,
        idempotent: idempotent_residual <= nilpotent_residual,
        idempotent_residual,
        nilpotent_residual,
        route_gap,
        structure,
    })
}

/// Output of [`perron_vector`].
#[derive(Clone, Debug, PartialEq)]
pub struct PerronVector {
    pub l: AlgebraElement,
    pub r: f64,
    /// `‖φ(L) − rL‖ / ‖L‖`.
    pub residual: f64,
    pub min_eigenvalue: f64,
}

/// `L = φ̂(1)`, a positive eigenvector for `r(φ)`.
pub fn perron_vector(phi: &LinearMap, tol: &Tolerance) -> Result<PerronVector> {
    let mp = maximal_part(phi, tol)?;
    perron_vector_from(phi, &mp, tol)
}

pub(crate) fn perron_vector_from(phi: &LinearMap, mp: &MaximalPart, tol: &Tolerance) -> Result<PerronVector> {
    let shape = phi.shape();
    let lm = mp.apply(&DenseMatrix::identity(shape.m()))?;
    let norm = lm.fro_norm();
    if norm <= tol.rank_tol {
        return Err(Error::Precondition("the maximal part annihilates the identity".into()));
    }
    let rep = mats::psd_checks(&lm, tol)?;
    if !rep.is_psd {
        return Err(Error::NotPsd(rep.min_eigenvalue));
    }
    let l = AlgebraElement::new(shape, &lm.hermitian_part(), tol)?;
    let fl = phi.apply(&l)?;
    let residual = (fl.matrix() - &l.matrix().scale_re(mp.r)).fro_norm() / norm;
    Ok(PerronVector {
        l,
        r: mp.r,
        residual,
        min_eigenvalue: rep.min_eigenvalue,
    })
}
