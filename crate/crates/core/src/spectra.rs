//! Spectral radii of maps and matrix tuples, and the witnesses that certify them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::AlgebraElement;
use crate::cpmap::{algebra_coords, from_algebra_coords, CpMap, LinearMap, SuperOperator};
use crate::error::{Error, Result};
use crate::mats::{self, kron, kron_power, DenseMatrix, Tolerance, C64};

/// Default cap on `d^n_max` for [`jsr_brute`].
pub const DEFAULT_WORD_BUDGET: u128 = 1_000_000;
/// Default cap on the superoperator side `m^{2k}` for [`jsr_tensor_approx`].
pub const DEFAULT_SIDE_BUDGET: u128 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JsrMethod {
    Brute,
    TensorPower,
}

/// Two-sided bound on the joint spectral radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsrEstimate {
    pub lower: f64,
    pub upper: f64,
    pub method: JsrMethod,
    /// Word length `n_max` or tensor power `k`.
    pub parameter: usize,
}

impl JsrEstimate {
    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.lower - slack <= x && x <= self.upper + slack
    }

    pub fn intersects(&self, other: &Self, slack: f64) -> bool {
        self.lower <= other.upper + slack && other.lower <= self.upper + slack
    }
}

fn check_tuple(tuple: &[DenseMatrix]) -> Result<usize> {
    let first = tuple
        .first()
        .ok_or_else(|| Error::Invalid("the tuple is empty".into()))?;
    let m = first.require_square()?;
    for a in tuple {
        if a.rows() != m || a.cols() != m {
            return Err(Error::Dimension(format!(
                "tuple mixes sides {m} and {}x{}",
                a.rows(),
                a.cols()
            )));
        }
    }
    Ok(m)
}

/// Spectral radius of a superoperator.
pub fn spectral_radius_map(t: &SuperOperator) -> Result<f64> {
    t.spectral_radius()
}

/// `ρ̂(A₁,…,A_d) = √r(Σ Āᵢ ⊗ Aᵢ)`.
pub fn outer_radius(tuple: &[DenseMatrix]) -> Result<f64> {
    let m = check_tuple(tuple)?;
    let mut t = DenseMatrix::zeros(m * m, m * m);
    for a in tuple {
        t += &kron(&a.conj(), a);
    }
    Ok(mats::spectral_radius(&t)?.sqrt())
}

/// `‖τⁿ(1)‖^{1/2n}` with `τ(X) = Σ Aᵢ* X Aᵢ`, iterated with renormalization so
/// large `n` neither overflows nor underflows.
pub fn outer_radius_gelfand(tuple: &[DenseMatrix], n: usize) -> Result<f64> {
    let m = check_tuple(tuple)?;
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let tau = CpMap::on_full(tuple.to_vec())?;
    let mut x = DenseMatrix::identity(m);
    let mut log_sum = 0.0;
    for _ in 0..n {
        let y = tau.apply(&x)?;
        let s = y.op_norm();
        if s == 0.0 {
            return Ok(0.0);
        }
        log_sum += s.ln();
        x = y.scale_re(1.0 / s);
    }
    Ok((log_sum / (2.0 * n as f64)).exp())
}

struct WordStats {
    max_norm: Vec<f64>,
    lower: f64,
}

fn explore(tuple: &[DenseMatrix], prod: &DenseMatrix, depth: usize, n_max: usize, stats: &mut WordStats) -> Result<()> {
    let norm = prod.op_norm();
    let slot = &mut stats.max_norm[depth - 1];
    *slot = slot.max(norm);
    let rho = mats::spectral_radius(prod)?;
    stats.lower = stats.lower.max(rho.powf(1.0 / depth as f64));
    if depth < n_max {
        for a in tuple {
            explore(tuple, &(prod * a), depth + 1, n_max, stats)?;
        }
    }
    Ok(())
}

/// Enumerates every word of length at most `n_max`.
///
/// `upper` is `min_n max_{|w|=n} ‖A_w‖^{1/n}` and `lower` is
/// `max_w r(A_w)^{1/|w|}`. Fails if `d^n_max` exceeds `budget`.
pub fn jsr_brute(tuple: &[DenseMatrix], n_max: usize, budget: u128) -> Result<JsrEstimate> {
    check_tuple(tuple)?;
    if n_max == 0 {
        return Err(Error::Invalid("n_max must be at least 1".into()));
    }
    let d = tuple.len() as u128;
    let needed = d.checked_pow(n_max as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: "words of maximal length",
            needed,
            budget,
        });
    }
    let partial: Vec<WordStats> = tuple
        .par_iter()
        .map(|a| {
            let mut stats = WordStats {
                max_norm: vec![0.0; n_max],
                lower: 0.0,
            };
            explore(tuple, a, 1, n_max, &mut stats).map(|_| stats)
        })
        .collect::<Result<_>>()?;
    let mut max_norm = vec![0.0f64; n_max];
    let mut lower = 0.0f64;
    for s in &partial {
        for (acc, x) in max_norm.iter_mut().zip(&s.max_norm) {
            *acc = acc.max(*x);
        }
        lower = lower.max(s.lower);
    }
    let upper = max_norm
        .iter()
        .enumerate()
        .map(|(i, &x)| x.powf(1.0 / (i + 1) as f64))
        .fold(f64::INFINITY, f64::min);
    Ok(JsrEstimate {
        lower,
        upper,
        method: JsrMethod::Brute,
        parameter: n_max,
    })
}

/// Sandwich `d^{-1/2k} ρ̂(A^{⊗k})^{1/k} ≤ ρ ≤ ρ̂(A^{⊗k})^{1/k}` from Kronecker
/// powers. Fails if the superoperator side `m^{2k}` exceeds `side_budget`.
pub fn jsr_tensor_approx(tuple: &[DenseMatrix], k: usize, side_budget: u128) -> Result<JsrEstimate> {
    let m = check_tuple(tuple)? as u128;
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let needed = m.checked_pow(2 * k as u32).unwrap_or(u128::MAX);
    if needed > side_budget {
        return Err(Error::BudgetExceeded {
            what: "tensor-power superoperator side",
            needed,
            budget: side_budget,
        });
    }
    let powers: Vec<DenseMatrix> = tuple.iter().map(|a| kron_power(a, k)).collect();
    let upper = outer_radius(&powers)?.powf(1.0 / k as f64);
    let d = tuple.len() as f64;
    Ok(JsrEstimate {
        lower: d.powf(-1.0 / (2.0 * k as f64)) * upper,
        upper,
        method: JsrMethod::TensorPower,
        parameter: k,
    })
}

fn require_strictly_positive(v: &DenseMatrix, tol: &Tolerance) -> Result<()> {
    let rep = mats::psd_checks(v, tol)?;
    if !rep.is_strictly_positive {
        return Err(Error::NotStrictlyPositive(rep.min_eigenvalue));
    }
    Ok(())
}

/// `‖Σ (vAᵢv⁻¹)*(vAᵢv⁻¹)‖^{1/2}` for strictly positive `v`.
pub fn scaled_outer_radius(tuple: &[DenseMatrix], v: &DenseMatrix, tol: &Tolerance) -> Result<f64> {
    let m = check_tuple(tuple)?;
    if v.rows() != m || v.cols() != m {
        return Err(Error::Dimension("scaling matrix has the wrong side".into()));
    }
    require_strictly_positive(v, tol)?;
    let vinv = mats::inverse(v, tol)?;
    let mut s = DenseMatrix::zeros(m, m);
    for a in tuple {
        let b = &(v * a) * &vinv;
        s += &(&b.adjoint() * &b);
    }
    Ok(s.op_norm().sqrt())
}

/// `r(w⁻¹ φ(w))` for strictly positive `w` in the algebra.
pub fn friedland_value(phi: &LinearMap, w: &AlgebraElement, tol: &Tolerance) -> Result<f64> {
    require_strictly_positive(w.matrix(), tol)?;
    let fw = phi.apply(w)?;
    let winv = mats::inverse(w.matrix(), tol)?;
    mats::spectral_radius(&(&winv * fw.matrix()))
}

/// Output of [`neumann_witness`].
#[derive(Clone, Debug, PartialEq)]
pub struct NeumannWitness {
    pub w: AlgebraElement,
    /// `‖φ(w) − s(w − 1)‖`.
    pub residual: f64,
    /// Minimum eigenvalue of `w − 1`.
    pub min_excess: f64,
}

/// `w = Σ (φ/s)ⁿ(1) = (id − φ/s)⁻¹(1)`, which satisfies `φ(w) = s(w − 1)`.
///
/// Requires `s > r(φ)`; values of `s` within `rank_tol·max(1, r)` of `r(φ)`
/// are rejected as numerically singular.
pub fn neumann_witness(phi: &LinearMap, s: f64, tol: &Tolerance) -> Result<NeumannWitness> {
    let shape = phi.shape();
    let r = phi.spectral_radius()?;
    if !(s.is_finite() && s - r > tol.rank_tol * r.max(1.0)) {
        return Err(Error::Precondition(format!(
            "s = {s} must exceed the spectral radius {r}"
        )));
    }
    let a = phi.algebra_matrix();
    let n = a.rows();
    let sys = &DenseMatrix::identity(n) - &a.scale_re(1.0 / s);
    let one = algebra_coords(&DenseMatrix::identity(shape.m()), shape);
    let coords = mats::solve(&sys, &one, tol)?;
    let wm = from_algebra_coords(&coords, shape);
    let w = AlgebraElement::new(shape, &wm, tol)?;
    let excess = w.matrix() - &DenseMatrix::identity(shape.m());
    let rep = mats::psd_checks(&excess, tol)?;
    if !rep.is_psd {
        return Err(Error::Precondition(format!(
            "witness is not above the identity (min eigenvalue of w - 1 is {:e}); is the map positive?",
            rep.min_eigenvalue
        )));
    }
    let lhs = phi.apply(&w)?;
    let residual = (lhs.matrix() - &excess.scale_re(s)).fro_norm();
    Ok(NeumannWitness {
        w,
        residual,
        min_excess: rep.min_eigenvalue,
    })
}

/// `x ↦ v⁻¹ φ(v x v) v⁻¹` for strictly positive `v` in the algebra.
pub fn conjugate_map(phi: &LinearMap, v: &AlgebraElement, tol: &Tolerance) -> Result<LinearMap> {
    require_strictly_positive(v.matrix(), tol)?;
    let vm = v.matrix();
    let vinv = mats::inverse(vm, tol)?;
    let right = kron(&vm.transpose(), vm);
    let left = kron(&vinv.transpose(), &vinv);
    let t = &(&left * phi.superop().matrix()) * &right;
    LinearMap::new(phi.shape(), &SuperOperator::new(t)?, phi.is_positive(), tol)
}

/// Output of [`norm_achieving_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct NormAchieving {
    pub v: AlgebraElement,
    /// `‖v⁻¹ φ(v²) v⁻¹‖`.
    pub norm: f64,
    pub r: f64,
    /// `|norm − r|`.
    pub gap: f64,
    pub achieved: bool,
}

/// Given `w > 0` with `φ(w) ≤ r(φ)·w`, conjugating by `v = w^{1/2}` yields a map
/// whose norm equals `r(φ)`.
pub fn norm_achieving_check(phi: &LinearMap, w: &AlgebraElement, tol: &Tolerance) -> Result<NormAchieving> {
    require_strictly_positive(w.matrix(), tol)?;
    let r = phi.spectral_radius()?;
    let fw = phi.apply(w)?;
    let slack = &w.matrix().scale_re(r) - fw.matrix();
    let rep = mats::psd_checks(&slack, tol)?;
    if !rep.is_psd {
        return Err(Error::Precondition(format!(
            "phi(w) <= r w fails: r w - phi(w) has eigenvalue {:e}",
            rep.min_eigenvalue
        )));
    }
    let v = AlgebraElement::new(phi.shape(), &mats::herm_sqrt(w.matrix(), tol)?, tol)?;
    let sigma = conjugate_map(phi, &v, tol)?;
    let norm = sigma.positive_norm()?;
    let gap = (norm - r).abs();
    Ok(NormAchieving {
        v,
        norm,
        r,
        gap,
        achieved: gap <= 1e-8 * r.max(1.0),
    })
}

/// Horizon and growth threshold for the bounded-powers test in [`balance_similarity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundedPowers {
    pub horizon: usize,
    pub threshold: f64,
}

impl Default for BoundedPowers {
    fn default() -> Self {
        BoundedPowers {
            horizon: 256,
            threshold: 1e3,
        }
    }
}

/// Output of [`balance_similarity`].
#[derive(Clone, Debug, PartialEq)]
pub struct Balance {
    pub p: DenseMatrix,
    pub norm: f64,
    pub r: f64,
}

fn cluster(vals: &[C64], scale: f64, tol: f64) -> Vec<(C64, usize)> {
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    for &z in vals {
        match clusters
            .iter_mut()
            .find(|(c, k)| (*c / *k as f64 - z).norm() <= tol * scale)
        {
            Some((c, k)) => {
                *c += z;
                *k += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    clusters.into_iter().map(|(c, k)| (c / k as f64, k)).collect()
}

/// Finds invertible `P` with `‖P A P⁻¹‖ ≤ r(A)(1 + 1e-6)`.
///
/// Peripheral eigenvalues must be semisimple; their eigenvectors are kept.
/// The interior part is triangularized and scaled by `diag(δ^j)`, starting from
/// `δ = epsilon` and halving until the scaled block has norm below `r(A)`.
pub fn balance_similarity(a: &DenseMatrix, epsilon: f64, bounds: BoundedPowers, tol: &Tolerance) -> Result<Balance> {
    let n = a.require_square()?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    let vals = mats::eigenvalues(a)?;
    let r = vals.iter().fold(0.0f64, |x, z| x.max(z.norm()));
    if r <= tol.rank_tol * a.op_norm().max(1.0) {
        return Err(Error::ZeroSpectralRadius);
    }

    let b = a.scale_re(1.0 / r);
    let mut pw = DenseMatrix::identity(n);
    let mut worst = (0usize, 0.0f64);
    for k in 1..=bounds.horizon {
        pw = &pw * &b;
        let g = pw.op_norm();
        if g > worst.1 {
            worst = (k, g);
        }
        if g > bounds.threshold {
            return Err(Error::UnboundedPowers { n: k, growth: g });
        }
    }

    let scale = r.max(1.0);
    let clusters = cluster(&vals, scale, tol.cluster_tol);
    let peripheral: Vec<(C64, usize)> = clusters
        .iter()
        .copied()
        .filter(|(c, _)| c.norm() >= r * (1.0 - tol.cluster_tol))
        .collect();

    let mut vcols: Vec<Vec<C64>> = Vec::new();
    let mut annihilator = DenseMatrix::identity(n);
    for &(mu, k) in &peripheral {
        let shifted = a - &DenseMatrix::identity(n).scale(mu);
        let sv = mats::singular_values(&shifted)?;
        let kth = sv[n - k];
        if kth > 1e-6 * a.op_norm().max(1.0) {
            return Err(Error::UnboundedPowers {
                n: worst.0,
                growth: worst.1,
            });
        }
        let ns = mats::null_space(&shifted, 0.0, Some(k))?;
        for j in 0..k {
            vcols.push(ns.col(j));
        }
        annihilator = &annihilator * &shifted;
    }
    let p_dim = vcols.len();
    let interior_dim = n - p_dim;
    let range = mats::svd(&annihilator)?.u;
    let mut s = DenseMatrix::zeros(n, n);
    for (j, c) in vcols.iter().enumerate() {
        for i in 0..n {
            s[(i, j)] = c[i];
        }
    }
    for j in 0..interior_dim {
        for i in 0..n {
            s[(i, p_dim + j)] = range[(i, j)];
        }
    }
    let s_inv = mats::inverse(&s, tol)?;
    let c = &(&s_inv * a) * &s;

    let mut second = DenseMatrix::identity(n);
    if interior_dim > 0 {
        let inner = c.sub_block(p_dim, p_dim, interior_dim, interior_dim);
        let (q, t) = mats::schur(&inner)?;
        let mut delta = epsilon.min(1.0);
        let mut scaled = None;
        for _ in 0..200 {
            let d = DenseMatrix::from_fn(interior_dim, interior_dim, |i, j| {
                if i == j {
                    C64::new(delta.powi(i as i32), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let d_inv = DenseMatrix::from_fn(interior_dim, interior_dim, |i, j| {
                if i == j {
                    C64::new(delta.powi(-(i as i32)), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let tt = &(&d_inv * &t) * &d;
            if tt.op_norm() < r {
                scaled = Some(&d_inv * &q.adjoint());
                break;
            }
            delta /= 2.0;
        }
        let block = scaled.ok_or(Error::NoConvergence)?;
        second.set_block(p_dim, p_dim, &block);
    }
    let p = &second * &s_inv;
    let p_inv = mats::inverse(&p, tol)?;
    let norm = (&(&p * a) * &p_inv).op_norm();
    if norm > r * (1.0 + 1e-6) {
        return Err(Error::NoConvergence);
    }
    Ok(Balance { p, norm, r })
}

/// A nonzero singular PSD matrix in `span{W1, W2}`: `W1 − W2/d` with `d` the
/// spectral radius of `W1^{-1/2} W2 W1^{-1/2}`. A singular input is returned as is.
pub fn singular_psd_combination(w1: &DenseMatrix, w2: &DenseMatrix, tol: &Tolerance) -> Result<DenseMatrix> {
    let m = w1.require_square()?;
    if w2.rows() != m || w2.cols() != m {
        return Err(Error::Dimension("inputs have different sides".into()));
    }
    let r1 = mats::psd_checks(w1, tol)?;
    let r2 = mats::psd_checks(w2, tol)?;
    if !r1.is_psd {
        return Err(Error::NotPsd(r1.min_eigenvalue));
    }
    if !r2.is_psd {
        return Err(Error::NotPsd(r2.min_eigenvalue));
    }
    let pair = DenseMatrix::from_fn(m * m, 2, |i, j| if j == 0 { w1.data()[i] } else { w2.data()[i] });
    if mats::tolerant_rank(&pair, tol.rank_tol) < 2 {
        return Err(Error::Invalid("inputs are linearly dependent".into()));
    }
    if !r1.is_strictly_positive {
        return Ok(w1.clone());
    }
    if !r2.is_strictly_positive {
        return Ok(w2.clone());
    }
    let root = mats::herm_sqrt(w1, tol)?;
    let root_inv = mats::inverse(&root, tol)?;
    let mid = &(&root_inv * w2) * &root_inv;
    let d = *mats::hermitian_eigenvalues(&mid)?.last().expect("nonempty");
    Ok(w1 - &w2.scale_re(1.0 / d))
}
