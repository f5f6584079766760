//! Completely positive maps `τ(X) = Σ Aᵢ* X Aᵢ` and their Choi, Kraus and
//! superoperator forms.
//!
//! The superoperator of `τ` is `Σ Aᵢᵀ ⊗ Aᵢ*` under column stacking. The
//! conjugate-side matrix `Σ Āᵢ ⊗ Aᵢ` represents the adjoint map and has the same
//! spectral radius.

mod superop;

pub use superop::{algebra_coords, from_algebra_coords, LinearMap, SuperOperator};

use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraShape;
use crate::error::{Error, Result};
use crate::mats::{self, isqrt, kron, DenseMatrix, Tolerance, C64, ZERO};

/// A CP map given by Kraus operators, acting on the algebra of `shape`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CpMapJson", into = "CpMapJson")]
pub struct CpMap {
    kraus: Vec<DenseMatrix>,
    shape: AlgebraShape,
}

#[derive(Serialize, Deserialize)]
struct CpMapJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape: Option<AlgebraShape>,
    kraus: Vec<DenseMatrix>,
}

impl TryFrom<CpMapJson> for CpMap {
    type Error = Error;
    fn try_from(j: CpMapJson) -> Result<Self> {
        match j.shape {
            Some(s) => CpMap::new(j.kraus, s),
            None => CpMap::on_full(j.kraus),
        }
    }
}

impl From<CpMap> for CpMapJson {
    fn from(c: CpMap) -> Self {
        CpMapJson {
            shape: Some(c.shape),
            kraus: c.kraus,
        }
    }
}

impl CpMap {
    pub fn new(kraus: Vec<DenseMatrix>, shape: AlgebraShape) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Invalid("a CP map needs at least one Kraus operator".into()));
        }
        let m = shape.m();
        for a in &kraus {
            if a.rows() != m || a.cols() != m {
                return Err(Error::Dimension(format!(
                    "Kraus operator of size {}x{} for a map on side {m}",
                    a.rows(),
                    a.cols()
                )));
            }
        }
        Ok(CpMap { kraus, shape })
    }

    /// A CP map on the full algebra `M_m`, with `m` taken from the operators.
    pub fn on_full(kraus: Vec<DenseMatrix>) -> Result<Self> {
        let m = kraus
            .first()
            .ok_or_else(|| Error::Invalid("a CP map needs at least one Kraus operator".into()))?
            .rows();
        if m == 0 {
            return Err(Error::Invalid("Kraus operators must be nonempty".into()));
        }
        CpMap::new(kraus, AlgebraShape::full(m))
    }

    /// `α_A(X) = A* X A`.
    pub fn alpha(a: &DenseMatrix) -> Result<Self> {
        CpMap::on_full(vec![a.clone()])
    }

    pub fn kraus(&self) -> &[DenseMatrix] {
        &self.kraus
    }

    pub fn shape(&self) -> &AlgebraShape {
        &self.shape
    }

    pub fn m(&self) -> usize {
        self.shape.m()
    }

    pub fn with_shape(&self, shape: AlgebraShape) -> Result<Self> {
        CpMap::new(self.kraus.clone(), shape)
    }

    /// `Σ Aᵢ* X Aᵢ`.
    pub fn apply(&self, x: &DenseMatrix) -> Result<DenseMatrix> {
        let m = self.m();
        if x.rows() != m || x.cols() != m {
            return Err(Error::Dimension(format!(
                "{}x{} input for a map on side {m}",
                x.rows(),
                x.cols()
            )));
        }
        let mut out = DenseMatrix::zeros(m, m);
        for a in &self.kraus {
            out += &(&a.adjoint() * &(x * a));
        }
        Ok(out)
    }

    /// `Σ Aᵢᵀ ⊗ Aᵢ*`.
    pub fn superop(&self) -> SuperOperator {
        let m = self.m();
        let mut t = DenseMatrix::zeros(m * m, m * m);
        for a in &self.kraus {
            t += &kron(&a.transpose(), &a.adjoint());
        }
        SuperOperator::new(t).expect("side m² by construction")
    }

    /// `Σ Āᵢ ⊗ Aᵢ`, the superoperator of the adjoint map `X ↦ Σ AᵢXAᵢ*`.
    pub fn adjoint_superop_matrix(&self) -> DenseMatrix {
        let m = self.m();
        let mut t = DenseMatrix::zeros(m * m, m * m);
        for a in &self.kraus {
            t += &kron(&a.conj(), a);
        }
        t
    }

    /// Choi matrix `Σ E_ij ⊗ τ(E_ij)`.
    pub fn choi(&self) -> DenseMatrix {
        choi_of(self)
    }

    /// `a·τ` for `a ≥ 0`, realized by scaling every Kraus operator by `√a`.
    pub fn scaled(&self, a: f64) -> Result<Self> {
        if a < 0.0 || !a.is_finite() {
            return Err(Error::Invalid(format!("scale {a} must be finite and nonnegative")));
        }
        let s = a.sqrt();
        CpMap::new(self.kraus.iter().map(|k| k.scale_re(s)).collect(), self.shape.clone())
    }

    /// `τ + σ`, concatenating the Kraus lists.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.m() != other.m() {
            return Err(Error::Dimension("maps on different sides".into()));
        }
        let mut k = self.kraus.clone();
        k.extend(other.kraus.iter().cloned());
        CpMap::new(k, self.shape.clone())
    }

    /// Superoperator of `τ ∘ σ`.
    pub fn compose(&self, other: &Self) -> Result<SuperOperator> {
        self.superop().compose(&other.superop())
    }

    /// Superoperator of `τⁿ`.
    pub fn power(&self, n: u64) -> SuperOperator {
        self.superop().power(n)
    }

    /// `‖τ‖ = ‖τ(1)‖`.
    pub fn norm(&self) -> Result<f64> {
        Ok(self.apply(&DenseMatrix::identity(self.m()))?.op_norm())
    }
}

/// `C[(i,k),(j,l)] = τ(E_ij)[k,l]`, assembled as `Σ uᵢ uᵢ*` with
/// `uᵢ[i*m + k] = conj(Aᵢ[i,k])`.
pub fn choi_of(tau: &CpMap) -> DenseMatrix {
    let m = tau.m();
    let mut c = DenseMatrix::zeros(m * m, m * m);
    for a in &tau.kraus {
        let u: Vec<C64> = a.data().iter().map(|z| z.conj()).collect();
        for r in 0..m * m {
            if u[r] == ZERO {
                continue;
            }
            for s in 0..m * m {
                c[(r, s)] += u[r] * u[s].conj();
            }
        }
    }
    c
}

/// Eigenpairs of a Hermitian PSD matrix with eigenvalue above `rank_tol · λ_max`,
/// largest first.
fn dominant_eigenpairs(c: &DenseMatrix, tol: &Tolerance) -> Result<Vec<(f64, Vec<C64>)>> {
    let rep = mats::psd_checks(c, tol)?;
    if !rep.is_psd {
        return Err(Error::NotPsd(rep.min_eigenvalue));
    }
    let (vals, vecs) = mats::hermitian_eigen(c)?;
    let top = vals.last().copied().unwrap_or(0.0);
    if top <= 0.0 {
        return Ok(Vec::new());
    }
    Ok((0..vals.len())
        .rev()
        .filter(|&i| vals[i] > tol.rank_tol * top)
        .map(|i| (vals[i], vecs.col(i)))
        .collect())
}

fn matrix_from_choi_vector(u: &[C64], m: usize, s: f64) -> DenseMatrix {
    DenseMatrix::from_fn(m, m, |i, k| u[i * m + k].conj() * s)
}

/// Kraus operators from the spectral decomposition of a PSD Choi matrix: each
/// eigenpair `(λ, u)` gives `A[i,k] = √λ · conj(u[i*m + k])`.
pub fn kraus_of_choi(c: &DenseMatrix, tol: &Tolerance) -> Result<Vec<DenseMatrix>> {
    let n = c.require_square()?;
    let m = isqrt(n).ok_or_else(|| Error::Dimension(format!("Choi side {n} is not a perfect square")))?;
    let pairs = dominant_eigenpairs(c, tol)?;
    if pairs.is_empty() {
        return Ok(vec![DenseMatrix::zeros(m, m)]);
    }
    Ok(pairs
        .iter()
        .map(|(l, u)| matrix_from_choi_vector(u, m, l.sqrt()))
        .collect())
}

/// Rank of the Choi matrix.
pub fn choi_rank(tau: &CpMap, tol: &Tolerance) -> usize {
    mats::tolerant_rank(&tau.choi(), tol.rank_tol)
}

/// Whether `τ − η` is CP.
pub fn dominates(tau: &CpMap, eta: &CpMap, tol: &Tolerance) -> Result<bool> {
    if tau.m() != eta.m() {
        return Err(Error::Dimension("maps on different sides".into()));
    }
    let diff = &tau.choi() - &eta.choi();
    Ok(mats::psd_checks(&diff, tol)?.is_psd)
}

/// Complete positivity of a superoperator.
pub fn is_cp(t: &SuperOperator, tol: &Tolerance) -> Result<bool> {
    t.is_cp(tol)
}

/// Hilbert–Schmidt orthonormal basis of a subspace of `M_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientSpace {
    m: usize,
    basis: Vec<DenseMatrix>,
}

impl CoefficientSpace {
    /// Wraps a basis that the caller guarantees to be orthonormal.
    pub fn from_orthonormal(m: usize, basis: Vec<DenseMatrix>) -> Self {
        CoefficientSpace { m, basis }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[DenseMatrix] {
        &self.basis
    }

    /// Orthogonal projection of `a` and the HS norm of the residual.
    pub fn project(&self, a: &DenseMatrix) -> (DenseMatrix, f64) {
        let mut p = DenseMatrix::zeros(self.m, self.m);
        for b in &self.basis {
            p += &b.scale(b.hs_inner(a));
        }
        let r = (a - &p).fro_norm();
        (p, r)
    }

    /// Residual test `‖a − Pa‖ ≤ rank_tol^{1/2} · max(1, ‖a‖)`.
    pub fn contains(&self, a: &DenseMatrix, tol: &Tolerance) -> bool {
        let (_, r) = self.project(a);
        r <= membership_threshold(a, tol)
    }

    /// Projector onto the space in row-major flattened coordinates.
    pub fn projector(&self) -> DenseMatrix {
        let n = self.m * self.m;
        let mut p = DenseMatrix::zeros(n, n);
        for b in &self.basis {
            let d = b.data();
            for r in 0..n {
                if d[r] == ZERO {
                    continue;
                }
                for s in 0..n {
                    p[(r, s)] += d[r] * d[s].conj();
                }
            }
        }
        p
    }

    /// Every basis element of `self` lies in `other`.
    pub fn is_subspace_of(&self, other: &Self, tol: &Tolerance) -> bool {
        self.basis.iter().all(|b| other.contains(b, tol))
    }

    /// A unit matrix orthogonal to the space, if the space is proper.
    pub fn orthogonal_witness(&self) -> Option<DenseMatrix> {
        let n = self.m * self.m;
        if self.dim() >= n {
            return None;
        }
        let p = self.projector();
        let comp = &DenseMatrix::identity(n) - &p;
        let d = mats::svd(&comp).ok()?;
        let v = d.u.col(0);
        DenseMatrix::from_row_major(self.m, self.m, v).ok()
    }
}

fn membership_threshold(a: &DenseMatrix, tol: &Tolerance) -> f64 {
    tol.rank_tol.sqrt() * a.fro_norm().max(1.0)
}

/// Span of the Kraus operators, read off the range of the Choi matrix.
pub fn coefficient_space(tau: &CpMap, tol: &Tolerance) -> Result<CoefficientSpace> {
    let m = tau.m();
    let pairs = dominant_eigenpairs(&tau.choi(), tol)?;
    Ok(CoefficientSpace {
        m,
        basis: pairs.iter().map(|(_, u)| matrix_from_choi_vector(u, m, 1.0)).collect(),
    })
}

/// Verdict of [`membership`].
#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// HS distance from `A` to the coefficient space.
    pub residual: f64,
    /// `q` with `α_A ≤ qτ`, present for members.
    pub q: Option<f64>,
    /// Minimum-norm coefficients `λ` with `A ≈ Σ λᵢ Aᵢ`, present for members.
    pub coefficients: Option<Vec<C64>>,
}

/// Decides `A ∈ span{Aᵢ}` by projection. For members, the certificate is
/// `q = ‖V‖ + 1` with `V = (λ̄ᵢ λⱼ)`, so `‖V‖ = ‖λ‖²`.
pub fn membership(a: &DenseMatrix, tau: &CpMap, tol: &Tolerance) -> Result<Membership> {
    let m = tau.m();
    if a.rows() != m || a.cols() != m {
        return Err(Error::Dimension(format!(
            "{}x{} matrix for a map on side {m}",
            a.rows(),
            a.cols()
        )));
    }
    let space = coefficient_space(tau, tol)?;
    let (_, residual) = space.project(a);
    if residual > membership_threshold(a, tol) {
        return Ok(Membership {
            member: false,
            residual,
            q: None,
            coefficients: None,
        });
    }
    let p = tau.kraus.len();
    let k = DenseMatrix::from_fn(m * m, p, |r, c| tau.kraus[c].data()[r]);
    let lambda = least_squares_min_norm(&k, a.data(), tol)?;
    let v_norm: f64 = lambda.iter().map(|z| z.norm_sqr()).sum();
    Ok(Membership {
        member: true,
        residual,
        q: Some(v_norm + 1.0),
        coefficients: Some(lambda),
    })
}

/// Minimum-norm least-squares solution of `K x = b` through the pseudo-inverse.
fn least_squares_min_norm(k: &DenseMatrix, b: &[C64], tol: &Tolerance) -> Result<Vec<C64>> {
    let d = mats::svd(k)?;
    let top = d.s.first().copied().unwrap_or(0.0);
    let mut x = vec![ZERO; k.cols()];
    for (idx, &s) in d.s.iter().enumerate() {
        if top == 0.0 || s <= tol.rank_tol * top {
            break;
        }
        let ui = d.u.col(idx);
        let coef: C64 = ui.iter().zip(b).map(|(u, bb)| u.conj() * bb).sum::<C64>() / s;
        for (r, xr) in x.iter_mut().enumerate() {
            *xr += d.v[(r, idx)] * coef;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rm(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_real_rows(rows)
    }

    fn eg1() -> CpMap {
        CpMap::on_full(vec![DenseMatrix::unit(2, 0, 0), DenseMatrix::unit(2, 1, 0)]).unwrap()
    }

    #[test]
    fn superop_matches_apply() {
        let tau = CpMap::on_full(vec![
            DenseMatrix::from_fn(3, 3, |i, j| C64::new(i as f64 - j as f64, (i * j) as f64)),
            DenseMatrix::from_fn(3, 3, |i, j| C64::new(1.0 / (1 + i + j) as f64, 0.5)),
        ])
        .unwrap();
        let t = tau.superop();
        for i in 0..3 {
            for j in 0..3 {
                let e = DenseMatrix::unit(3, i, j);
                assert!((&t.apply(&e).unwrap() - &tau.apply(&e).unwrap()).max_abs() < 1e-13);
            }
        }
    }

    #[test]
    fn identity_channel() {
        let id = CpMap::alpha(&DenseMatrix::identity(2)).unwrap();
        let x = DenseMatrix::from_fn(2, 2, |i, j| C64::new(i as f64, j as f64));
        assert_eq!(id.apply(&x).unwrap(), x);
        let c = id.choi();
        let mut want = DenseMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                want[(i * 2 + i, j * 2 + j)] = C64::new(1.0, 0.0);
            }
        }
        assert_eq!(c, want);
        assert_eq!(choi_rank(&id, &tol()), 1);
        let k = kraus_of_choi(&c, &tol()).unwrap();
        assert_eq!(k.len(), 1);
        let phase = k[0][(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!((&k[0].scale(phase.conj()) - &DenseMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn eg1_choi_and_powers() {
        let tau = eg1();
        let want = &kron(&DenseMatrix::unit(2, 0, 0), &DenseMatrix::unit(2, 0, 0))
            + &kron(&DenseMatrix::unit(2, 1, 1), &DenseMatrix::unit(2, 0, 0));
        assert_eq!(tau.choi(), want);
        assert_eq!(choi_rank(&tau, &tol()), 2);
        for n in 1..6 {
            let y = tau.power(n).apply(&DenseMatrix::identity(2)).unwrap();
            assert!((&y - &DenseMatrix::diag_real(&[2.0, 0.0])).max_abs() < 1e-14);
        }
    }

    #[test]
    fn depolarizing_choi_rank() {
        let kraus: Vec<_> = (0..2)
            .flat_map(|i| (0..2).map(move |j| DenseMatrix::unit(2, i, j)))
            .collect();
        let tau = CpMap::on_full(kraus).unwrap();
        let x = rm(&[&[1.0, 2.0], &[3.0, 5.0]]);
        assert!((&tau.apply(&x).unwrap() - &DenseMatrix::identity(2).scale_re(6.0)).max_abs() < 1e-14);
        assert_eq!(tau.choi(), DenseMatrix::identity(4));
        assert_eq!(choi_rank(&tau, &tol()), 4);
    }

    #[test]
    fn kraus_of_scaled_identity_choi() {
        let k = kraus_of_choi(&DenseMatrix::identity(4).scale_re(2.0), &tol()).unwrap();
        assert_eq!(k.len(), 4);
        let tau = CpMap::on_full(k).unwrap();
        assert_eq!(coefficient_space(&tau, &tol()).unwrap().dim(), 4);
        assert!((&tau.choi() - &DenseMatrix::identity(4).scale_re(2.0)).max_abs() < 1e-12);
        assert!(matches!(
            kraus_of_choi(&DenseMatrix::diag_real(&[1.0, -1.0, 0.0, 0.0]), &tol()),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn coefficient_space_examples() {
        let id = CpMap::alpha(&DenseMatrix::identity(3)).unwrap();
        let cs = coefficient_space(&id, &tol()).unwrap();
        assert_eq!(cs.dim(), 1);
        let b = &cs.basis()[0];
        let phase = b[(0, 0)] / b[(0, 0)].norm();
        assert!((&b.scale(phase.conj()) - &DenseMatrix::identity(3).scale_re(1.0 / 3f64.sqrt())).max_abs() < 1e-12);
        let a = rm(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let bb = rm(&[&[1.0, -1.0], &[1.0, -1.0]]);
        let pair = CpMap::on_full(vec![a.clone(), bb.clone()]).unwrap();
        let s1 = coefficient_space(&pair, &tol()).unwrap();
        assert_eq!(s1.dim(), 2);
        let h = 1.0 / 2f64.sqrt();
        let rot = CpMap::on_full(vec![(&a + &bb).scale_re(h), (&a - &bb).scale_re(h)]).unwrap();
        let s2 = coefficient_space(&rot, &tol()).unwrap();
        assert!((&s1.projector() - &s2.projector()).max_abs() < 1e-10);
    }

    #[test]
    fn domination_and_membership() {
        let a1 = rm(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let a2 = rm(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let tau = CpMap::on_full(vec![a1.clone(), a2.clone()]).unwrap();
        assert!(dominates(&tau, &tau, &tol()).unwrap());
        assert!(dominates(&tau.scaled(2.0).unwrap(), &tau, &tol()).unwrap());
        let a = &a1 + &a2;
        let alpha = CpMap::alpha(&a).unwrap();
        assert!(dominates(&tau.scaled(3.0).unwrap(), &alpha, &tol()).unwrap());
        assert!(!dominates(&tau, &alpha, &tol()).unwrap());
        let mem = membership(&a, &tau, &tol()).unwrap();
        assert!(mem.member);
        assert!((mem.q.unwrap() - 3.0).abs() < 1e-12);
        assert!(membership(&a1, &tau, &tol()).unwrap().member);
        let e12 = CpMap::alpha(&DenseMatrix::unit(2, 0, 1)).unwrap();
        let non = membership(&DenseMatrix::identity(2), &e12, &tol()).unwrap();
        assert!(!non.member && non.q.is_none());
    }

    #[test]
    fn is_cp_examples() {
        let a1 = rm(&[&[1.0, 2.0], &[0.0, 1.0]]);
        let a2 = rm(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let tau = CpMap::on_full(vec![a1.clone(), a2]).unwrap();
        let rest = tau.superop().sub(&CpMap::alpha(&a1).unwrap().superop());
        assert!(is_cp(&rest, &tol()).unwrap());
        assert!(!is_cp(&SuperOperator::transpose_map(2), &tol()).unwrap());
    }

    #[test]
    fn json_forms() {
        let tau = eg1();
        let s = serde_json::to_string(&tau).unwrap();
        let back: CpMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, tau);
        let no_shape = r#"{"kraus":[{"rows":1,"cols":1,"data":[[2,0]]}]}"#;
        let c: CpMap = serde_json::from_str(no_shape).unwrap();
        assert_eq!(c.shape().blocks(), &[1]);
    }
}
