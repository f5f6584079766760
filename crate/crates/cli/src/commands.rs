use std::fs;
use std::path::Path;

use cpspectra::algebra::{AlgebraElement, AlgebraShape};
use cpspectra::cpmap::{choi_of, coefficient_space, kraus_of_choi, membership, CpMap, LinearMap};
use cpspectra::perron::{
    algebra_basis, default_resolvent_b, gamma_one_rank, irreducible_cp, maximal_factorization, maximal_part,
    perron_vector, resolvent_gamma, strict_positivity_probe,
};
use cpspectra::spectra::{
    balance_similarity, friedland_value, jsr_brute, jsr_tensor_approx, neumann_witness, outer_radius,
    outer_radius_gelfand, BoundedPowers, DEFAULT_SIDE_BUDGET, DEFAULT_WORD_BUDGET,
};
use cpspectra::{mats, DenseMatrix, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;

use crate::report::{CliError, InputDigest, Report};
use crate::{check, Command, JsrMethodArg, MapArgs};

pub struct Context {
    pub tol: Tolerance,
    pub budget: Option<u64>,
    pub seed: u64,
    pub digest: InputDigest,
}

type Outcome = Result<Report, CliError>;

impl Context {
    fn load<T: DeserializeOwned>(&mut self, label: &str, path: &Path) -> Result<T, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.digest.add(label, &bytes);
        serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    fn load_map(&mut self, args: &MapArgs) -> Result<CpMap, CliError> {
        let tau: CpMap = self.load("map", &args.map)?;
        match &args.shape {
            Some(shape) => tau.with_shape(shape.clone()).map_err(CliError::from),
            None => Ok(tau),
        }
    }

    fn load_tuple(&mut self, path: &Path) -> Result<Vec<DenseMatrix>, CliError> {
        let tuple: Vec<DenseMatrix> = self.load("tuple", path)?;
        if tuple.is_empty() {
            return Err(CliError::Input(format!("{}: the tuple is empty", path.display())));
        }
        Ok(tuple)
    }

    fn element(&mut self, label: &str, path: &Path, shape: &AlgebraShape) -> Result<AlgebraElement, CliError> {
        let x: DenseMatrix = self.load(label, path)?;
        Ok(AlgebraElement::new(shape, &x, &self.tol)?)
    }
}

fn linear(tau: &CpMap, tol: &Tolerance) -> Result<LinearMap, CliError> {
    Ok(LinearMap::new(tau.shape(), &tau.superop(), true, tol)?)
}

pub fn dispatch(cmd: &Command, ctx: &mut Context) -> Outcome {
    let mut report = Report::new(cmd.name());
    match cmd {
        Command::OuterRadius { tuple, gelfand } => {
            let t = ctx.load_tuple(tuple)?;
            let value = outer_radius(&t)?;
            let adj: Vec<DenseMatrix> = t.iter().map(|a| a.adjoint()).collect();
            report.value("value", value);
            report.residual("adjoint_gap", (outer_radius(&adj)? - value).abs());
            if let Some(n) = gelfand {
                let g = outer_radius_gelfand(&t, *n)?;
                report.value("gelfand", g).residual("gelfand_gap", (g - value).abs());
            }
        }
        Command::Jsr { tuple, method, n, k } => {
            let t = ctx.load_tuple(tuple)?;
            let est = match method {
                JsrMethodArg::Brute => {
                    report.warn("lower bound is the largest r(product)^(1/length) over enumerated words");
                    jsr_brute(&t, *n, ctx.budget.map_or(DEFAULT_WORD_BUDGET, u128::from))?
                }
                JsrMethodArg::Tensor => {
                    report.warn("bounds at a single tensor power; no extrapolation in k");
                    jsr_tensor_approx(&t, *k, ctx.budget.map_or(DEFAULT_SIDE_BUDGET, u128::from))?
                }
            };
            report
                .value("lower", est.lower)
                .value("upper", est.upper)
                .value("method", est.method)
                .value("parameter", est.parameter)
                .residual("width", est.upper - est.lower);
        }
        Command::Friedland { map, w } => {
            let tau = ctx.load_map(map)?;
            let w = ctx.element("w", w, tau.shape())?;
            let phi = linear(&tau, &ctx.tol)?;
            let value = friedland_value(&phi, &w, &ctx.tol)?;
            let r = phi.spectral_radius()?;
            report
                .value("value", value)
                .value("r", r)
                .residual("excess_over_r", value - r);
        }
        Command::Witness { map, s } => {
            let tau = ctx.load_map(map)?;
            let phi = linear(&tau, &ctx.tol)?;
            let w = neumann_witness(&phi, *s, &ctx.tol)?;
            report
                .value("w", w.w.matrix())
                .value("s", s)
                .value("r", phi.spectral_radius()?)
                .residual("equation", w.residual)
                .residual("min_eigenvalue_w_minus_1", w.min_excess);
        }
        Command::Balance {
            matrix,
            epsilon,
            horizon,
            threshold,
        } => {
            let a: DenseMatrix = ctx.load("matrix", matrix)?;
            let bounds = BoundedPowers {
                horizon: *horizon,
                threshold: *threshold,
            };
            let b = balance_similarity(&a, *epsilon, bounds, &ctx.tol)?;
            report
                .value("p", &b.p)
                .value("norm", b.norm)
                .value("r", b.r)
                .residual("norm_excess", b.norm - b.r);
        }
        Command::Choi { map } => {
            let tau = ctx.load_map(map)?;
            let c = choi_of(&tau);
            let rep = mats::psd_checks(&c, &ctx.tol)?;
            report
                .value("choi", &c)
                .value("rank", mats::tolerant_rank(&c, ctx.tol.rank_tol))
                .value("is_cp", rep.is_psd)
                .residual("min_eigenvalue", rep.min_eigenvalue)
                .residual("hermitian_gap", (&c - &c.adjoint()).max_abs());
        }
        Command::Kraus { map } => {
            let tau = ctx.load_map(map)?;
            let c = choi_of(&tau);
            let kraus = kraus_of_choi(&c, &ctx.tol)?;
            let rebuilt = CpMap::new(kraus.clone(), tau.shape().clone())?;
            report
                .value("count", kraus.len())
                .value("kraus", &kraus)
                .residual("choi_reconstruction", (&choi_of(&rebuilt) - &c).max_abs());
        }
        Command::CoeffSpace { map } => {
            let tau = ctx.load_map(map)?;
            let space = coefficient_space(&tau, &ctx.tol)?;
            let worst = tau.kraus().iter().map(|k| space.project(k).1).fold(0.0f64, f64::max);
            report
                .value("dim", space.dim())
                .value("basis", space.basis())
                .residual("kraus_projection", worst);
        }
        Command::Member { map, matrix } => {
            let tau = ctx.load_map(map)?;
            let a: DenseMatrix = ctx.load("matrix", matrix)?;
            let mem = membership(&a, &tau, &ctx.tol)?;
            report
                .value("member", mem.member)
                .value("q", mem.q)
                .value("coefficients", &mem.coefficients)
                .residual("projection", mem.residual);
        }
        Command::MaximalPart { map } => {
            let tau = ctx.load_map(map)?;
            let mp = maximal_part(&linear(&tau, &ctx.tol)?, &ctx.tol)?;
            report
                .value("superop", mp.superop.matrix())
                .value("r", mp.r)
                .value("d", mp.d)
                .value("idempotent", mp.idempotent)
                .value("maximal_spectrum", &mp.structure.maximal_spectrum)
                .residual("idempotent", mp.idempotent_residual)
                .residual("nilpotent", mp.nilpotent_residual)
                .residual("route_gap", mp.route_gap);
        }
        Command::Perron { map } => {
            let tau = ctx.load_map(map)?;
            let pv = perron_vector(&linear(&tau, &ctx.tol)?, &ctx.tol)?;
            report
                .value("r", pv.r)
                .value("l", pv.l.matrix())
                .residual("eigen", pv.residual)
                .residual("min_eigenvalue", pv.min_eigenvalue);
        }
        Command::Irreducible { map, probes } => {
            let tau = ctx.load_map(map)?;
            let v = irreducible_cp(&tau, &ctx.tol)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let probe = strict_positivity_probe(&linear(&tau, &ctx.tol)?, *probes, &mut rng, &ctx.tol)?;
            if probe.all_strictly_positive != v.irreducible {
                report.warn("randomized strict-positivity probe disagrees with the algebra criterion");
            }
            report
                .value("irreducible", v.irreducible)
                .value("dimension", v.dimension)
                .value("m", v.m)
                .value("witness", &v.witness)
                .value("probe_strictly_positive", probe.all_strictly_positive)
                .value("probes", probe.probes)
                .residual("dimension_deficit", (v.m * v.m - v.dimension) as f64)
                .residual("probe_min_eigenvalue", probe.min_eigenvalue);
        }
        Command::AlgebraDim { tuple, unital, .. } => {
            let t = ctx.load_tuple(tuple)?;
            let gen = algebra_basis(&t, *unital, &ctx.tol)?;
            let m = t[0].rows();
            let tau = CpMap::on_full(t)?;
            let rank = if *unital {
                let b = default_resolvent_b(&tau)?;
                resolvent_gamma(&tau, b, &ctx.tol)?.choi_ranks(&ctx.tol).0
            } else {
                gamma_one_rank(&tau, &ctx.tol)?
            };
            if rank != gen.dim() {
                report.warn("resolvent Choi rank differs from the enumerated dimension");
            }
            report
                .value("dim", gen.dim())
                .value("unital", unital)
                .value("stabilization_index", gen.stabilization_index)
                .value("resolvent_choi_rank", rank)
                .value("m", m)
                .residual("rank_mismatch", (rank as f64 - gen.dim() as f64).abs());
        }
        Command::Factorize { map } => {
            let tau = ctx.load_map(map)?;
            let f = maximal_factorization(&tau, &ctx.tol)?;
            report
                .value("r", f.r)
                .value("l", f.l.matrix())
                .value("density", &f.density)
                .value("faithful", f.faithful)
                .residual("eigen", f.eigen_residual)
                .residual("normalization", f.normalization_residual)
                .residual("adjoint", f.adjoint_residual)
                .residual("rank_one", f.factor_residual)
                .residual("density_min_eigenvalue", f.density_min_eigenvalue)
                .residual("l_min_eigenvalue", f.l_min_eigenvalue);
        }
        Command::Check => {
            check::run(&mut report, ctx)?;
        }
    }
    Ok(report)
}
