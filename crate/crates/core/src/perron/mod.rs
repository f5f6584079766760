//! Perron–Frobenius data: spectral structure, maximal parts, Perron vectors,
//! irreducibility and generated algebras.

mod generated;
mod irreducible;
mod maximal;
mod structure;

pub use generated::{
    algebra_basis, common_invariant_subspace, default_resolvent_b, exp_eta, gamma_one_rank, resolvent_gamma,
    GeneratedAlgebra, SeriesPair,
};
pub use irreducible::{irreducible_cp, strict_positivity_probe, Irreducibility, ProbeReport};
pub use maximal::{
    maximal_part, maximal_part_cesaro, maximal_part_projection, maximal_part_with_budget, perron_vector, CesaroBudget,
    MaximalPart, PerronVector,
};
pub use structure::{spectral_structure, EigenCluster, SpectralStructure};

use crate::algebra::{canonical_extension, AlgebraElement};
use crate::cpmap::{coefficient_space, CpMap, LinearMap};
use crate::error::{Error, Result};
use crate::mats::{self, unvec, vec, DenseMatrix, Tolerance, C64};

/// `τ̂(X) = ψ(X)·L` with `ψ(X) = trace(R X)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub r: f64,
    pub l: AlgebraElement,
    pub density: DenseMatrix,
    /// `‖τ(L) − rL‖`.
    pub eigen_residual: f64,
    /// `|trace(RL) − 1|`.
    pub normalization_residual: f64,
    /// `‖ψ∘τ − rψ‖` as a row vector on the algebra.
    pub adjoint_residual: f64,
    /// Relative distance of `φ̂` from `vec(L)·ψ`.
    pub factor_residual: f64,
    pub faithful: bool,
    pub l_min_eigenvalue: f64,
    pub density_min_eigenvalue: f64,
}

/// Factors the maximal part of an irreducible CP map as a rank-one map.
pub fn maximal_factorization(tau: &CpMap, tol: &Tolerance) -> Result<Factorization> {
    let irr = irreducible_cp(tau, tol)?;
    if !irr.irreducible {
        return Err(Error::Precondition(format!(
            "map is reducible (generated algebra has dimension {} < {})",
            irr.dimension,
            irr.m * irr.m
        )));
    }
    let shape = tau.shape();
    let phi = LinearMap::new(shape, &tau.superop(), true, tol)?;
    let mp = maximal_part(&phi, tol)?;
    let coords = phi.with_superop(mp.superop.clone()).algebra_matrix();
    let rank = mats::tolerant_rank(&coords, tol.rank_tol.sqrt());
    if rank != 1 {
        return Err(Error::RankNotOne(rank));
    }
    let m = shape.m();
    let t = mp.superop.matrix();
    let l_mat = mp.apply(&DenseMatrix::identity(m))?.hermitian_part();
    let lv = vec(&l_mat)?;
    let lnorm2: f64 = lv.iter().map(|z| z.norm_sqr()).sum();
    let n = m * m;
    let f: Vec<C64> = (0..n)
        .map(|c| (0..n).map(|r| lv[r].conj() * t[(r, c)]).sum::<C64>() / lnorm2)
        .collect();
    let mut factor_err = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            factor_err = factor_err.max((t[(r, c)] - lv[r] * f[c]).norm());
        }
    }
    // ψ(X) = Σ f[i + j m] X[i,j] = trace(R X) with R[j,i] = f[i + j m].
    let raw = unvec(&f)?.transpose();
    let herm_gap = (&raw - &raw.adjoint()).fro_norm();
    if herm_gap > tol.psd_tol.sqrt() * raw.fro_norm().max(1.0) {
        return Err(Error::Invalid(format!(
            "the functional of the maximal part is not Hermitian (gap {herm_gap:e})"
        )));
    }
    let trl = (&raw * &l_mat).trace();
    let density = raw.hermitian_part().scale(C64::new(1.0, 0.0) / trl);
    let l = AlgebraElement::new(shape, &l_mat, tol)?;

    let tl = tau.apply(l.matrix())?;
    let eigen_residual = (&tl - &l.matrix().scale_re(mp.r)).fro_norm();
    let normalization_residual = ((&density * l.matrix()).trace() - C64::new(1.0, 0.0)).norm();
    let rv = vec(&density.transpose())?;
    let tphi = phi.superop().matrix();
    let mut adjoint_residual = 0.0f64;
    for c in 0..n {
        let lhs: C64 = (0..n).map(|r| rv[r] * tphi[(r, c)]).sum();
        adjoint_residual = adjoint_residual.max((lhs - rv[c] * mp.r).norm());
    }
    let lrep = mats::psd_checks(l.matrix(), tol)?;
    let rrep = mats::psd_checks(&density, tol)?;
    Ok(Factorization {
        r: mp.r,
        l,
        density,
        eigen_residual,
        normalization_residual,
        adjoint_residual,
        factor_residual: factor_err / t.max_abs().max(f64::MIN_POSITIVE),
        faithful: rrep.is_strictly_positive,
        l_min_eigenvalue: lrep.min_eigenvalue,
        density_min_eigenvalue: rrep.min_eigenvalue,
    })
}

/// Outcome of [`maximal_ideal_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct IdealCheck {
    pub is_subalgebra: bool,
    pub is_ideal: bool,
    /// Worst relative residual of `BⱼBₖ` against `span{B}`.
    pub subalgebra_residual: f64,
    /// Worst relative residual of `AᵢBⱼ` and `BⱼAᵢ` against `span{B}`.
    pub ideal_residual: f64,
    pub dim: usize,
}

/// Checks that the coefficient space of the maximal part of `τ̃` is a
/// subalgebra and an ideal in the algebra generated by the Kraus operators of `τ̃`.
pub fn maximal_ideal_check(tau: &CpMap, tol: &Tolerance) -> Result<IdealCheck> {
    let phi = LinearMap::new(tau.shape(), &tau.superop(), true, tol)?;
    let mp = maximal_part(&phi, tol)?;
    let hat = CpMap::on_full(mats_kraus(&mp.superop.choi(), tol)?)?;
    let span = coefficient_space(&hat, tol)?;
    let ext = canonical_extension(tau, tol)?;
    let rel = |x: &DenseMatrix| -> f64 {
        let n = x.fro_norm();
        if n == 0.0 {
            0.0
        } else {
            span.project(x).1 / n.max(1.0)
        }
    };
    let mut sub = 0.0f64;
    for b in span.basis() {
        for c in span.basis() {
            sub = sub.max(rel(&(b * c)));
        }
    }
    let mut ideal = 0.0f64;
    for a in ext.kraus() {
        let an = a.scale_re(1.0 / a.fro_norm().max(f64::MIN_POSITIVE));
        for b in span.basis() {
            ideal = ideal.max(rel(&(&an * b))).max(rel(&(b * &an)));
        }
    }
    let limit = 1e-8;
    Ok(IdealCheck {
        is_subalgebra: sub <= limit,
        is_ideal: sub <= limit && ideal <= limit,
        subalgebra_residual: sub,
        ideal_residual: ideal,
        dim: span.dim(),
    })
}

fn mats_kraus(c: &DenseMatrix, tol: &Tolerance) -> Result<Vec<DenseMatrix>> {
    let herm = c.hermitian_part();
    crate::cpmap::kraus_of_choi(&herm, tol)
}
