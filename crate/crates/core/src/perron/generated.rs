use crate::cpmap::{CoefficientSpace, CpMap, SuperOperator};
use crate::error::{Error, Result};
use crate::mats::{self, DenseMatrix, Tolerance, C64};

/// Basis of the algebra generated by a tuple, with the sweep count at which the
/// dimension stopped growing.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratedAlgebra {
    pub space: CoefficientSpace,
    pub stabilization_index: usize,
}

impl GeneratedAlgebra {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
}

/// Incremental HS-orthonormal basis built with twice-applied modified Gram–Schmidt.
struct Basis {
    elems: Vec<DenseMatrix>,
    threshold: f64,
}

impl Basis {
    /// Adds the normalized residual of `x`; returns whether it was new.
    fn push(&mut self, x: &DenseMatrix) -> bool {
        let norm = x.fro_norm();
        if norm <= self.threshold {
            return false;
        }
        let mut v = x.scale_re(1.0 / norm);
        for _ in 0..2 {
            for b in &self.elems {
                let c = b.hs_inner(&v);
                v = &v - &b.scale(c);
            }
        }
        let res = v.fro_norm();
        if res <= self.threshold {
            return false;
        }
        self.elems.push(v.scale_re(1.0 / res));
        true
    }
}

/// Orthonormal basis of the algebra generated by `tuple`.
///
/// Starts from `span{1}` (unital) or `span{Aᵢ}` and adds `Aᵢ·B` for each newly
/// found `B` until a sweep adds nothing. Candidates are normalized first and
/// count as new when their residual exceeds `rank_tol`.
pub fn algebra_basis(tuple: &[DenseMatrix], unital: bool, tol: &Tolerance) -> Result<GeneratedAlgebra> {
    let first = tuple
        .first()
        .ok_or_else(|| Error::Invalid("the tuple is empty".into()))?;
    let m = first.require_square()?;
    if tuple.iter().any(|a| a.rows() != m || a.cols() != m) {
        return Err(Error::Dimension("tuple mixes matrix sides".into()));
    }
    let gens: Vec<DenseMatrix> = tuple
        .iter()
        .filter(|a| a.fro_norm() > 0.0)
        .map(|a| a.scale_re(1.0 / a.fro_norm()))
        .collect();
    let mut basis = Basis {
        elems: Vec::new(),
        threshold: tol.rank_tol,
    };
    if unital {
        basis.push(&DenseMatrix::identity(m));
    } else {
        for g in &gens {
            basis.push(g);
        }
    }
    let mut frontier_start = 0;
    let mut sweeps = 0;
    loop {
        let frontier_end = basis.elems.len();
        let frontier: Vec<DenseMatrix> = basis.elems[frontier_start..frontier_end].to_vec();
        let mut added = false;
        for g in &gens {
            for b in &frontier {
                added |= basis.push(&(g * b));
            }
        }
        sweeps += 1;
        if !added {
            break;
        }
        frontier_start = frontier_end;
    }
    Ok(GeneratedAlgebra {
        space: CoefficientSpace::from_orthonormal(m, basis.elems),
        stabilization_index: sweeps,
    })
}

/// Smallest proper subspace of `C^m` invariant under every matrix in the tuple,
/// searched among cyclic subspaces of eigenvectors of the generators and of a
/// fixed generic combination. Returns an orthonormal basis as columns.
pub fn common_invariant_subspace(tuple: &[DenseMatrix], tol: &Tolerance) -> Result<Option<DenseMatrix>> {
    let first = tuple
        .first()
        .ok_or_else(|| Error::Invalid("the tuple is empty".into()))?;
    let m = first.require_square()?;
    let mut mix = DenseMatrix::zeros(m, m);
    for (i, a) in tuple.iter().enumerate() {
        let t = 0.7 + 1.3 * i as f64;
        mix += &a.scale(C64::from_polar(1.0 + 0.37 * i as f64, t));
    }
    let mut candidates = Vec::new();
    for a in tuple.iter().chain(std::iter::once(&mix)) {
        let (_, vecs) = mats::eigen(a)?;
        for j in 0..m {
            candidates.push(vecs.col(j));
        }
    }
    let mut best: Option<Vec<Vec<C64>>> = None;
    for x in candidates {
        let span = cyclic_span(tuple, &x, tol);
        if span.len() < m && best.as_ref().is_none_or(|b| span.len() < b.len()) {
            best = Some(span);
        }
    }
    Ok(best.map(|cols| DenseMatrix::from_fn(m, cols.len(), |i, j| cols[j][i])))
}

fn cyclic_span(tuple: &[DenseMatrix], x: &[C64], tol: &Tolerance) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let push = |basis: &mut Vec<Vec<C64>>, v: Vec<C64>| -> bool {
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= tol.rank_tol {
            return false;
        }
        let mut w: Vec<C64> = v.iter().map(|z| z / norm).collect();
        for _ in 0..2 {
            for b in basis.iter() {
                let c: C64 = b.iter().zip(&w).map(|(p, q)| p.conj() * q).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= c * bi;
                }
            }
        }
        let res = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if res <= tol.cluster_tol {
            return false;
        }
        basis.push(w.iter().map(|z| z / res).collect());
        true
    };
    push(&mut basis, x.to_vec());
    let mut start = 0;
    while start < basis.len() {
        let end = basis.len();
        for i in start..end {
            for a in tuple {
                let v = a.mul_vec(&basis[i]);
                push(&mut basis, v);
            }
        }
        start = end;
    }
    basis
}

/// `γ₀ = (1 − bτ)⁻¹` and `γ₁ = γ₀ − 1`, or `η₀ = exp(dτ)` and `η₁ = η₀ − 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesPair {
    pub zero: SuperOperator,
    pub one: SuperOperator,
}

impl SeriesPair {
    /// Choi ranks of the two maps.
    pub fn choi_ranks(&self, tol: &Tolerance) -> (usize, usize) {
        (
            mats::tolerant_rank(&self.zero.choi(), tol.rank_tol),
            mats::tolerant_rank(&self.one.choi(), tol.rank_tol),
        )
    }
}

/// Default resolvent parameter `1 / (2 max(1, r(τ)))`.
pub fn default_resolvent_b(tau: &CpMap) -> Result<f64> {
    Ok(0.5 / tau.superop().spectral_radius()?.max(1.0))
}

/// Resolvent series of `τ`; requires `b > 0` and `b·r(τ) < 1`.
pub fn resolvent_gamma(tau: &CpMap, b: f64, tol: &Tolerance) -> Result<SeriesPair> {
    let t = tau.superop();
    let r = t.spectral_radius()?;
    if !(b > 0.0 && b * r < 1.0) {
        return Err(Error::Precondition(format!(
            "resolvent needs 0 < b and b r(tau) < 1 (b = {b}, r = {r})"
        )));
    }
    let n = t.matrix().rows();
    let sys = &DenseMatrix::identity(n) - &t.matrix().scale_re(b);
    let zero = SuperOperator::new(mats::inverse(&sys, tol)?)?;
    let one = zero.sub(&SuperOperator::identity(t.m()));
    Ok(SeriesPair { zero, one })
}

/// Exponential series of `τ`; requires `d > 0`.
pub fn exp_eta(tau: &CpMap, d: f64) -> Result<SeriesPair> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Precondition(format!("exponential needs d > 0 (d = {d})")));
    }
    let t = tau.superop();
    let zero = SuperOperator::new(mats::mat_exp(&t.matrix().scale_re(d))?)?;
    let one = zero.sub(&SuperOperator::identity(t.m()));
    Ok(SeriesPair { zero, one })
}

/// Choi rank of a CP map's `γ₁`, which equals the non-unital generated dimension.
pub fn gamma_one_rank(tau: &CpMap, tol: &Tolerance) -> Result<usize> {
    let b = default_resolvent_b(tau)?;
    Ok(resolvent_gamma(tau, b, tol)?.choi_ranks(tol).1)
}
