//! Acceptance suite. Prints one line per criterion and exits non-zero when a
//! criterion outside `KNOWN_FAILURES` fails (or one inside it starts passing).

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use cpspectra::algebra::{AlgebraElement, AlgebraShape};
use cpspectra::catalog::{corner_collapse_map, golden_ratio, golden_ratio_map, path_graph_map, trace_pair_map};
use cpspectra::cpmap::{dominates, membership, CpMap, LinearMap, SuperOperator};
use cpspectra::mats::{self, DenseMatrix};
use cpspectra::perron::{
    algebra_basis, common_invariant_subspace, gamma_one_rank, irreducible_cp, maximal_factorization,
    maximal_ideal_check, maximal_part, perron_vector, spectral_structure,
};
use cpspectra::spectra::{conjugate_map, jsr_brute, jsr_tensor_approx, outer_radius, DEFAULT_SIDE_BUDGET};
use cpspectra::C64;

/// Criteria expected to fail, with the reason printed next to the verdict.
const KNOWN_FAILURES: &[(u32, &str)] = &[(
    2,
    "the displayed 1/2 normalization is not idempotent; 1/4 is the maximal part",
)];

struct Outcome {
    id: u32,
    checks: Vec<(String, bool)>,
    limit: Option<Duration>,
    elapsed: Duration,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.1) && self.limit.is_none_or(|l| self.elapsed < l)
    }
}

fn run(id: u32, limit: Option<f64>, f: impl FnOnce() -> Vec<(String, bool)>) -> Outcome {
    let start = Instant::now();
    let checks = f();
    Outcome {
        id,
        checks,
        limit: limit.map(Duration::from_secs_f64),
        elapsed: start.elapsed(),
    }
}

fn check(name: impl Into<String>, ok: bool) -> (String, bool) {
    (name.into(), ok)
}

fn linear(tau: &CpMap) -> LinearMap {
    LinearMap::new(tau.shape(), &tau.superop(), true, &tol()).unwrap()
}

fn max_gap(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (a - b).max_abs()
}

fn criterion_1() -> Vec<(String, bool)> {
    let tau = golden_ratio_map();
    let p = golden_ratio();
    let phi = linear(&tau);
    let mp = maximal_part(&phi, &tol()).unwrap();
    let shown = SuperOperator::from_map(3, |x| {
        let s = (x[(0, 0)] + x[(1, 1)] * (p - 1.0) + x[(2, 2)]) / 5f64.sqrt();
        DenseMatrix::diag(&[s, s, s * (p - 1.0)])
    })
    .unwrap();
    let l = perron_vector(&phi, &tol()).unwrap().l;
    let want_l = DenseMatrix::diag_real(&[p * p, p * p, p]).scale_re(1.0 / 5f64.sqrt());
    let v = AlgebraElement::new(tau.shape(), &mats::herm_sqrt(l.matrix(), &tol()).unwrap(), &tol()).unwrap();
    let sigma = conjugate_map(&phi, &v, &tol()).unwrap();
    let gap = max_gap(mp.superop.matrix(), shown.matrix());
    let lgap = max_gap(l.matrix(), &want_l);
    let sn = sigma.positive_norm().unwrap();
    vec![
        check(format!("r = {:.12}", mp.r), (mp.r - p).abs() < 1e-9),
        check(format!("maximal part gap {gap:.1e}"), gap < 1e-8),
        check(format!("L gap {lgap:.1e}"), lgap < 1e-8),
        check(format!("|sigma| - r = {:.1e}", sn - p), (sn - p).abs() < 1e-8),
    ]
}

fn criterion_2() -> Vec<(String, bool)> {
    let tau = path_graph_map();
    let s2 = 2f64.sqrt();
    let phi = linear(&tau);
    let st = spectral_structure(&phi.algebra_matrix(), &tol()).unwrap();
    let mut vals: Vec<f64> = st.eigenvalues.iter().map(|c| c.value.re).collect();
    vals.sort_by(f64::total_cmp);
    let eig_ok = vals.len() == 3
        && st.eigenvalues.iter().all(|c| c.value.im.abs() < 1e-10)
        && vals.iter().zip([-s2, 0.0, s2]).all(|(a, b)| (a - b).abs() < 1e-10);
    let mp = maximal_part(&phi, &tol()).unwrap();
    let with_constant = |c: f64| {
        SuperOperator::from_map(3, |x| {
            let s = (x[(0, 0)] + x[(1, 1)] * s2 + x[(2, 2)]) * c;
            DenseMatrix::diag(&[s, s * s2, s])
        })
        .unwrap()
    };
    let shown_gap = max_gap(mp.superop.matrix(), with_constant(0.5).matrix());
    let quarter_gap = max_gap(mp.superop.matrix(), with_constant(0.25).matrix());
    let f = maximal_factorization(&tau, &tol()).unwrap();
    vec![
        check(format!("eigenvalues {vals:.12?}"), eig_ok),
        check(
            format!("displayed 1/2 formula gap {shown_gap:.3e} (1/4 formula gap {quarter_gap:.1e})"),
            shown_gap < 1e-8,
        ),
        check(
            format!("tau(L) - sqrt2 L = {:.1e}", f.eigen_residual),
            f.eigen_residual < 1e-8,
        ),
        check(
            format!("trace(RL) - 1 = {:.1e}", f.normalization_residual),
            f.normalization_residual < 1e-8,
        ),
        check(
            format!("adjoint residual {:.1e}", f.adjoint_residual),
            f.adjoint_residual < 1e-8,
        ),
    ]
}

fn criterion_3() -> Vec<(String, bool)> {
    let tau = corner_collapse_map();
    let phi = linear(&tau);
    let r = phi.spectral_radius().unwrap();
    let mut worst = 0.0f64;
    let mut t = phi.superop().clone();
    for _ in 1..=64 {
        worst = worst.max((t.apply(&DenseMatrix::identity(2)).unwrap().op_norm() - 2.0).abs());
        t = t.compose(phi.superop()).unwrap();
    }
    let mp = maximal_part(&phi, &tol()).unwrap();
    let mut g = rng(3);
    let mut eig_res = 0.0f64;
    for _ in 0..16 {
        let y = mp.apply(&random_matrix(&mut g, 2, 2)).unwrap();
        eig_res = eig_res.max(max_gap(&tau.apply(&y).unwrap(), &y.scale_re(r)));
    }
    vec![
        check(format!("r = {r}"), (r - 1.0).abs() < 1e-12),
        check(format!("max | |tau^n| - 2 | = {worst:.1e}"), worst < 1e-12),
        check(format!("d = {}", mp.d), mp.d == 1),
        check(format!("image eigen residual {eig_res:.1e}"), eig_res < 1e-8),
    ]
}

fn criterion_4() -> Vec<(String, bool)> {
    let tau = trace_pair_map();
    let v = irreducible_cp(&tau, &tol()).unwrap();
    let sub = common_invariant_subspace(tau.kraus(), &tol()).unwrap();
    let line_ok = sub.as_ref().is_some_and(|s| {
        let c = s.col(0);
        s.cols() == 1 && (c[0] - c[1]).norm() < 1e-12 && c[0].norm() > 0.5
    });
    vec![
        check(format!("irreducible = {}", v.irreducible), v.irreducible),
        check(format!("generated dimension {}", v.dimension), v.dimension == 4),
        check(
            format!(
                "common invariant subspace of dimension {}",
                sub.as_ref().map_or(0, |s| s.cols())
            ),
            line_ok,
        ),
    ]
}

fn criterion_5() -> Vec<(String, bool)> {
    let mut worst_upper = f64::NEG_INFINITY;
    let mut worst_lower = f64::NEG_INFINITY;
    for i in 0..50 {
        let mut g = rng(5000 + i);
        let tuple = random_tuple(&mut g, 2, 2);
        let brute = jsr_brute(&tuple, 10, u128::MAX).unwrap();
        for k in 1..=3 {
            let t = jsr_tensor_approx(&tuple, k, DEFAULT_SIDE_BUDGET).unwrap();
            worst_upper = worst_upper.max(t.lower - brute.upper);
            worst_lower = worst_lower.max(brute.lower - t.upper);
        }
    }
    let mut worst_single = 0.0f64;
    for i in 0..50 {
        let mut g = rng(5500 + i);
        let a = random_matrix(&mut g, 2, 2);
        let a = a.scale_re(1.0 / mats::spectral_radius(&a).unwrap());
        let r = mats::spectral_radius(&a).unwrap();
        let single = std::slice::from_ref(&a);
        let brute = jsr_brute(single, 2000, u128::MAX).unwrap();
        let t = jsr_tensor_approx(single, 2, DEFAULT_SIDE_BUDGET).unwrap();
        for x in [brute.lower, brute.upper, t.lower, t.upper] {
            worst_single = worst_single.max((x - r).abs());
        }
    }
    vec![
        check(
            format!("max tensor.lower - brute.upper = {worst_upper:.3e}"),
            worst_upper <= 1e-9,
        ),
        check(
            format!("max brute.lower - tensor.upper = {worst_lower:.3e}"),
            worst_lower <= 1e-9,
        ),
        check(
            format!("singleton deviation from r(A) {worst_single:.1e}"),
            worst_single < 1e-3,
        ),
    ]
}

fn spectral_point_maps() -> Vec<CpMap> {
    let shapes = shapes();
    (0..200)
        .map(|i| {
            let mut g = rng(6000 + i as u64);
            random_cp(&mut g, &shapes[i % 3], 1 + i % 3)
        })
        .collect()
}

fn criterion_6() -> Vec<(String, bool)> {
    let mut worst = 0.0f64;
    for tau in spectral_point_maps() {
        let a = linear(&tau).algebra_matrix();
        let vals = mats::eigenvalues(&a).unwrap();
        let r = vals.iter().fold(0.0f64, |x, z| x.max(z.norm()));
        let gap = vals
            .iter()
            .map(|z| (z - C64::new(r, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(gap);
    }
    vec![check(format!("max min |lambda - r| = {worst:.1e}"), worst < 1e-8)]
}

fn criterion_7() -> Vec<(String, bool)> {
    let mut maps = vec![
        corner_collapse_map(),
        golden_ratio_map(),
        trace_pair_map(),
        path_graph_map(),
    ];
    maps.extend(spectral_point_maps());
    let mut worst = 0.0f64;
    let mut failures = 0;
    for tau in &maps {
        match maximal_part(&linear(tau), &tol()) {
            Ok(mp) => worst = worst.max(mp.route_gap),
            Err(_) => failures += 1,
        }
    }
    vec![
        check(format!("{} maps, route errors {failures}", maps.len()), failures == 0),
        check(format!("max route gap {worst:.1e}"), worst < 1e-6),
    ]
}

fn criterion_8() -> Vec<(String, bool)> {
    let mut disagreements = 0;
    let mut rank_mismatch = 0;
    let mut worst_stab = 0usize;
    let mut stab_ok = true;
    let mut members = 0;
    for i in 0..100u64 {
        let mut g = rng(8000 + i);
        let m = 2 + (i as usize % 2);
        let count = 1 + (i as usize / 2) % 2;
        let tau = if i % 4 == 3 {
            // Upper-triangular Kraus operators generate a proper algebra.
            let kraus = (0..count)
                .map(|_| {
                    let a = random_matrix(&mut g, m, m);
                    DenseMatrix::from_fn(m, m, |r, c| if r <= c { a[(r, c)] } else { C64::new(0.0, 0.0) })
                })
                .collect();
            CpMap::on_full(kraus).unwrap()
        } else {
            random_cp(&mut g, &AlgebraShape::full(m), count)
        };
        let a = if i % 2 == 0 {
            tau.kraus().iter().fold(DenseMatrix::zeros(m, m), |acc, k| {
                &acc + &k.scale(C64::new(gaussian_like(&mut g), gaussian_like(&mut g)))
            })
        } else {
            random_matrix(&mut g, m, m)
        };
        let mem = membership(&a, &tau, &tol()).unwrap();
        let alpha = CpMap::alpha(&a).unwrap();
        let certified = match mem.q {
            Some(q) => dominates(&tau.scaled(q).unwrap(), &alpha, &tol()).unwrap(),
            None => dominates(&tau.scaled(1e6).unwrap(), &alpha, &tol()).unwrap(),
        };
        members += mem.member as usize;
        if mem.member != certified {
            disagreements += 1;
        }
        let gen = algebra_basis(tau.kraus(), false, &tol()).unwrap();
        if gamma_one_rank(&tau, &tol()).unwrap() != gen.dim() {
            rank_mismatch += 1;
        }
        worst_stab = worst_stab.max(gen.stabilization_index);
        stab_ok &= gen.stabilization_index <= m * m;
    }
    vec![
        check(
            format!("membership vs domination disagreements {disagreements} ({members} members)"),
            disagreements == 0,
        ),
        check(
            format!("gamma_1 Choi rank mismatches {rank_mismatch}"),
            rank_mismatch == 0,
        ),
        check(format!("max stabilization index {worst_stab}"), stab_ok),
    ]
}

fn criterion_9() -> Vec<(String, bool)> {
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let mut g = rng(9000 + i);
        let d = 1 + (i as usize % 3);
        let m = 2 + (i as usize / 3) % 2;
        let tuple = random_tuple(&mut g, d, m);
        let adj: Vec<DenseMatrix> = tuple.iter().map(|a| a.adjoint()).collect();
        let x = outer_radius(&tuple).unwrap();
        let y = outer_radius(&adj).unwrap();
        worst = worst.max((x - y).abs() / x.max(1.0));
    }
    vec![check(format!("max |rho(A*) - rho(A)| = {worst:.1e}"), worst < 1e-9)]
}

fn criterion_10() -> Vec<(String, bool)> {
    [
        ("golden ratio", golden_ratio_map()),
        ("trace pair", trace_pair_map()),
        ("path graph", path_graph_map()),
    ]
    .into_iter()
    .map(|(name, tau)| {
        let c = maximal_ideal_check(&tau, &tol()).unwrap();
        check(
            format!(
                "{name}: subalgebra {:.1e}, ideal {:.1e}, dim {}",
                c.subalgebra_residual, c.ideal_residual, c.dim
            ),
            c.is_subalgebra && c.is_ideal && c.subalgebra_residual < 1e-8 && c.ideal_residual < 1e-8,
        )
    })
    .collect()
}

fn main() -> ExitCode {
    let outcomes = vec![
        run(1, Some(1.0), criterion_1),
        run(2, Some(1.0), criterion_2),
        run(3, Some(1.0), criterion_3),
        run(4, Some(1.0), criterion_4),
        run(5, Some(60.0), criterion_5),
        run(6, Some(30.0), criterion_6),
        run(7, Some(30.0), criterion_7),
        run(8, Some(60.0), criterion_8),
        run(9, None, criterion_9),
        run(10, None, criterion_10),
    ];
    let mut unexpected = 0;
    for o in &outcomes {
        let pass = o.passed();
        let known = KNOWN_FAILURES.iter().find(|k| k.0 == o.id);
        let verdict = if pass { "PASS" } else { "FAIL" };
        let failed: Vec<&str> = o.checks.iter().filter(|c| !c.1).map(|c| c.0.as_str()).collect();
        let detail = if failed.is_empty() {
            o.checks.iter().map(|c| c.0.as_str()).collect::<Vec<_>>().join("; ")
        } else {
            failed.join("; ")
        };
        let note = match (pass, known) {
            (false, Some(k)) => format!(" [known: {}]", k.1),
            (true, Some(_)) => " [listed as known failure but passed]".to_string(),
            _ => String::new(),
        };
        println!(
            "criterion {:>2}: {verdict} ({:.3}s) {detail}{note}",
            o.id,
            o.elapsed.as_secs_f64()
        );
        if pass == known.is_some() {
            unexpected += 1;
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} criteria deviate from the expected outcome");
        ExitCode::FAILURE
    }
}
