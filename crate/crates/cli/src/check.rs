use cpspectra::cpmap::{CpMap, LinearMap};
use cpspectra::perron::{irreducible_cp, maximal_factorization, maximal_ideal_check, maximal_part, perron_vector};
use cpspectra::spectra::{jsr_brute, jsr_tensor_approx, outer_radius, DEFAULT_SIDE_BUDGET, DEFAULT_WORD_BUDGET};
use cpspectra::{DenseMatrix, C64};

use crate::commands::Context;
use crate::report::{CliError, Report};

struct Example {
    name: &'static str,
    json: &'static str,
    r: f64,
    irreducible: bool,
}

fn examples() -> [Example; 4] {
    [
        Example {
            name: "eg1",
            json: include_str!("../examples/eg1.json"),
            r: 1.0,
            irreducible: false,
        },
        Example {
            name: "eg2",
            json: include_str!("../examples/eg2.json"),
            r: (1.0 + 5f64.sqrt()) / 2.0,
            irreducible: true,
        },
        Example {
            name: "eg3",
            json: include_str!("../examples/eg3.json"),
            r: 4.0,
            irreducible: true,
        },
        Example {
            name: "eg4",
            json: include_str!("../examples/eg4.json"),
            r: 2f64.sqrt(),
            irreducible: true,
        },
    ]
}

const SINGLE_IDENTITY: &str = include_str!("../examples/single_identity.json");
const GOLDEN_PAIR: &str = include_str!("../examples/golden_pair.json");

struct Tally<'a> {
    report: &'a mut Report,
    failed: Vec<String>,
}

impl Tally<'_> {
    /// Records `residual` under `name` and fails the check when it exceeds `limit`
    /// or is NaN.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn residual(&mut self, name: &str, residual: f64, limit: f64) {
        self.report.residual(name, residual);
        if !(residual <= limit) {
            self.failed.push(name.to_string());
        }
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.report.value(name, ok);
        if !ok {
            self.failed.push(name.to_string());
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(name: &str, json: &str) -> Result<T, CliError> {
    serde_json::from_str(json).map_err(|e| CliError::Input(format!("bundled {name}: {e}")))
}

fn check_map(t: &mut Tally, ex: &Example, ctx: &Context) -> Result<(), CliError> {
    let tol = &ctx.tol;
    let n = ex.name;
    let tau: CpMap = parse(n, ex.json)?;
    let phi = LinearMap::new(tau.shape(), &tau.superop(), true, tol)?;
    let a = phi.algebra_matrix();
    let mp = maximal_part(&phi, tol)?;
    let hat = phi.with_superop(mp.superop.clone()).algebra_matrix();
    let r = mp.r;
    t.report.value(&format!("{n}.r"), r);
    t.residual(&format!("{n}.r_error"), (r - ex.r).abs(), 1e-9);
    let rhat = hat.scale_re(r);
    let commute = (&(&a * &hat) - &rhat).max_abs().max((&(&hat * &a) - &rhat).max_abs());
    t.residual(&format!("{n}.commutation"), commute, 1e-8);
    let sq = &hat * &hat;
    let idem = (&sq - &hat).max_abs() < 1e-8;
    let nil = sq.max_abs() < 1e-8;
    t.flag(&format!("{n}.dichotomy"), idem != nil && idem == (mp.d == 1));
    let in_spectrum = mp
        .structure
        .maximal_spectrum
        .iter()
        .any(|z| (z - C64::new(r, 0.0)).norm() < 1e-8 * r.max(1.0));
    t.flag(&format!("{n}.r_in_maximal_spectrum"), in_spectrum);
    t.residual(&format!("{n}.route_gap"), mp.route_gap, 1e-6);
    let pv = perron_vector(&phi, tol)?;
    t.residual(&format!("{n}.perron"), pv.residual, 1e-8);
    let irr = irreducible_cp(&tau, tol)?;
    t.flag(&format!("{n}.irreducible_verdict"), irr.irreducible == ex.irreducible);
    if ex.irreducible {
        let f = maximal_factorization(&tau, tol)?;
        t.residual(&format!("{n}.factor_eigen"), f.eigen_residual, 1e-8);
        t.residual(&format!("{n}.factor_normalization"), f.normalization_residual, 1e-8);
        t.residual(&format!("{n}.factor_adjoint"), f.adjoint_residual, 1e-8);
        t.flag(&format!("{n}.faithful"), f.faithful);
        let ideal = maximal_ideal_check(&tau, tol)?;
        t.residual(
            &format!("{n}.ideal"),
            ideal.ideal_residual.max(ideal.subalgebra_residual),
            1e-8,
        );
    }
    Ok(())
}

pub fn run(report: &mut Report, ctx: &mut Context) -> Result<(), CliError> {
    for ex in examples() {
        ctx.digest.add(ex.name, ex.json.as_bytes());
    }
    ctx.digest.add("single_identity", SINGLE_IDENTITY.as_bytes());
    ctx.digest.add("golden_pair", GOLDEN_PAIR.as_bytes());
    let mut t = Tally {
        report,
        failed: Vec::new(),
    };
    for ex in examples() {
        check_map(&mut t, &ex, ctx)?;
    }
    let id: Vec<DenseMatrix> = parse("single_identity", SINGLE_IDENTITY)?;
    t.residual("single_identity.outer_radius", (outer_radius(&id)? - 1.0).abs(), 1e-12);
    let pair: Vec<DenseMatrix> = parse("golden_pair", GOLDEN_PAIR)?;
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    let brute = jsr_brute(&pair, 12, DEFAULT_WORD_BUDGET)?;
    let tensor = jsr_tensor_approx(&pair, 2, DEFAULT_SIDE_BUDGET)?;
    t.flag("golden_pair.brute_contains", brute.contains(golden, 1e-9));
    t.flag("golden_pair.tensor_contains", tensor.contains(golden, 1e-9));
    t.flag("golden_pair.intervals_intersect", brute.intersects(&tensor, 1e-9));
    let failed = std::mem::take(&mut t.failed);
    t.report.value("all_passed", failed.is_empty());
    t.report.value("failed", &failed);
    if !failed.is_empty() {
        t.report.exit_code = 2;
    }
    Ok(())
}
