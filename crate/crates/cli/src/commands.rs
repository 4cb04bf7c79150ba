//! Subcommand implementations.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use algest::estimators::{
    build_mle_system, certify_class, reduce_system, Clazz, EstimatingSystem, EstimatorError,
};
use algest::groebner::{GroebnerError, GroebnerLimits, ReductionIdeal};
use algest::homotopy::{compile, select_estimate, solve_compiled, HomotopyError, PathStatus, TrackerConfig};
use algest::models::{Model, ModelId};
use algest::polyalg::{parse_rat, Rat};
use algest::simulate::{self, build_system, EstimatorSpec, ExperimentPlan, SamplerMode, SimulateError};

use crate::config::Config;
use crate::golden;
use crate::{BenchArgs, Common, ConstructArgs, ReduceArgs, SimulateArgs, SolveArgs, TrackerArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("resource ceiling: {0}")]
    Ceiling(String),
    #[error("{0}")]
    NoRealSolution(String),
    #[error("{0} selftest check(s) failed")]
    Selftest(usize),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Ceiling(_) => 3,
            CliError::NoRealSolution(_) => 4,
            CliError::Selftest(_) => 5,
            CliError::Other(_) => 1,
        }
    }
}

fn groebner_error(e: GroebnerError) -> CliError {
    match e {
        GroebnerError::BasisTooLarge { .. } | GroebnerError::DegreeTooHigh { .. } => CliError::Ceiling(e.to_string()),
        other => CliError::Other(other.to_string()),
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> Self {
        match e {
            EstimatorError::Groebner(g) => groebner_error(g),
            EstimatorError::ClazzMismatch { .. }
            | EstimatorError::NotSquare { .. }
            | EstimatorError::NotEtaUnknowns
            | EstimatorError::PerturbationDegree { .. }
            | EstimatorError::PerturbationCount { .. }
            | EstimatorError::Format(_)
            | EstimatorError::Alignment(_) => CliError::Usage(e.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<HomotopyError> for CliError {
    fn from(e: HomotopyError) -> Self {
        match e {
            HomotopyError::NoRealSolution | HomotopyError::AllPathsFailed(_) => CliError::NoRealSolution(e.to_string()),
            HomotopyError::DataLength { .. } | HomotopyError::Config(_) | HomotopyError::Unbound(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<SimulateError> for CliError {
    fn from(e: SimulateError) -> Self {
        match e {
            SimulateError::Estimator(inner) => inner.into(),
            SimulateError::Plan(m) => CliError::Usage(m),
            SimulateError::Model(m) => CliError::Usage(m.to_string()),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}

pub fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let src = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            Config::parse(&src).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))
        }
    }
}

struct Resolved {
    model: Model,
    c: Option<Rat>,
    limits: GroebnerLimits,
}

fn resolve(cfg: &Config, common: &Common) -> Result<Resolved, CliError> {
    let name = common.model.as_deref().unwrap_or(&cfg.model);
    let id: ModelId = name.parse().map_err(|e: algest::models::ModelError| CliError::Usage(e.to_string()))?;
    let c_src = common.c.as_deref().unwrap_or(&cfg.c);
    let c = match c_src {
        "symbolic" => None,
        s => Some(parse_rat(s).map_err(|e| CliError::Usage(format!("--c: {e}")))?),
    };
    let mut limits = cfg.limits.to_limits();
    if let Some(b) = common.max_basis {
        limits.max_basis = b;
    }
    if let Some(d) = common.max_degree {
        limits.max_degree = d;
    }
    Ok(Resolved { model: id.build(), c, limits })
}

fn tracker(cfg: &Config, a: &TrackerArgs) -> Result<(TrackerConfig, u64), CliError> {
    let mut t = cfg.tracker.to_tracker();
    if let Some(v) = a.initial_step {
        t.initial_step = v;
    }
    if let Some(v) = a.min_step {
        t.min_step = v;
    }
    if let Some(v) = a.newton_tol {
        t.newton_tol = v;
    }
    if let Some(v) = a.refine_tol {
        t.refine_tol = v;
    }
    if let Some(v) = a.max_steps {
        t.max_steps = v;
    }
    t.validate()?;
    Ok((t, a.seed.unwrap_or(cfg.seed)))
}

fn parse_clazz(s: &str) -> Result<Clazz, CliError> {
    s.parse().map_err(|e: EstimatorError| CliError::Usage(e.to_string()))
}

fn build(r: &Resolved, clazz: Clazz) -> Result<EstimatingSystem, CliError> {
    match (&r.c, clazz) {
        (None, Clazz::FirstOrder | Clazz::SecondOrder) => {
            let choice = algest::estimators::PerturbationChoice::default_for(&r.model, clazz, None)?;
            let vs = algest::estimators::build_vector_version(&r.model, &choice, clazz)?;
            Ok(algest::estimators::eliminate_v(&vs, r.limits)?)
        }
        (c, _) => Ok(build_system(&r.model, clazz, c.as_ref().unwrap_or(&Rat::from_integer(1.into())), r.limits)?),
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn read_system(path: &Path, common: &Common) -> Result<EstimatingSystem, CliError> {
    let src = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let sys = EstimatingSystem::from_text(&src)?;
    if let Some(m) = &common.model {
        if m != sys.model.as_str() {
            return Err(CliError::Usage(format!("--model {m} conflicts with {} in {}", sys.model, path.display())));
        }
    }
    Ok(sys)
}

pub fn construct(cfg: &Config, a: ConstructArgs) -> Result<(), CliError> {
    let r = resolve(cfg, &a.common)?;
    let clazz = parse_clazz(a.clazz.as_deref().unwrap_or(&cfg.clazz))?;
    let sys = build(&r, clazz)?;
    let mut text = sys.to_text();
    if a.show_golden {
        for line in golden::report(&sys) {
            text += &line;
            text.push('\n');
        }
    }
    emit(&text, a.out.as_deref())
}

pub fn reduce(cfg: &Config, a: ReduceArgs) -> Result<(), CliError> {
    let r = resolve(cfg, &a.common)?;
    let mle = match &a.input {
        Some(p) => read_system(p, &a.common)?,
        None => build_mle_system(&r.model)?,
    };
    let k = a.k as usize;
    let reduced = reduce_system(&mle, k, r.limits)?;
    let cert = certify_class(&reduced, &mle, k, r.limits)?;
    let mut text = reduced.to_text();
    text += &format!("# {}\n", cert.to_line());
    if a.show_golden {
        for line in golden::report(&reduced) {
            text += &line;
            text.push('\n');
        }
    }
    emit(&text, a.out.as_deref())
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.12}")).collect::<Vec<_>>().join(",")
}

pub fn solve(cfg: &Config, a: SolveArgs) -> Result<(), CliError> {
    let r = resolve(cfg, &a.common)?;
    let (tr, seed) = tracker(cfg, &a.tracker)?;
    let sys = match &a.input {
        Some(p) => read_system(p, &a.common)?,
        None => build(&r, parse_clazz(a.clazz.as_deref().unwrap_or(&cfg.clazz))?)?,
    };
    let model = sys.model.build();
    let data = a.data.clone().unwrap_or_else(|| cfg.data.clone());
    if data.len() != model.d {
        return Err(CliError::Usage(format!("--data needs {} values for {}, got {}", model.d, model.id, data.len())));
    }
    let compiled = compile(&sys, &data, None)?;
    let report = solve_compiled(&compiled, &tr, seed)?;
    if let Some(p) = &a.out {
        std::fs::write(p, report.to_csv().map_err(|e| CliError::Other(e.to_string()))?)?;
    }
    println!("model: {}", model.id);
    println!("clazz: {}", sys.clazz);
    println!("paths: {}", report.path_count);
    println!(
        "converged: {} diverged: {} failed: {}",
        report.count(PathStatus::Converged),
        report.count(PathStatus::Diverged),
        report.count(PathStatus::Failed)
    );
    println!("distinct: {} real: {}", report.solutions.len(), report.real_solutions.len());
    println!("time_s: {:.6}", report.wall_time.as_secs_f64());
    let est = select_estimate(&report, &model, &sys, &data)?;
    println!("estimate_unknowns: {}", fmt_vec(&est.unknowns));
    println!("estimate_eta: {}", fmt_vec(&est.eta));
    println!("distance: {:.6e}", est.distance);
    Ok(())
}

/// Truth used when the model differs from the configured one and no
/// `--truth` is given.
fn default_truth(id: ModelId) -> Vec<f64> {
    match id {
        ModelId::PeriodicGaussian => vec![0.5],
        ModelId::LogMarginal => vec![1.0 / 6.0, 0.25, 1.0 / 12.0, 1.0 / 12.0, 0.25, 1.0 / 6.0],
        ModelId::ToyLinear => vec![0.5],
    }
}

pub fn simulate(cfg: &Config, a: SimulateArgs) -> Result<(), CliError> {
    let r = resolve(cfg, &a.common)?;
    let (tr, seed) = tracker(cfg, &a.tracker)?;
    let from_config = r.model.id.as_str() == cfg.model;
    let truth = match (&a.truth, from_config) {
        (Some(t), _) => t.clone(),
        (None, true) => cfg.simulate.truth.clone(),
        (None, false) => default_truth(r.model.id),
    };
    let mut plan = ExperimentPlan::new(r.model.id, truth);
    if let Some(est) = a.estimators.as_ref().or(from_config.then_some(&cfg.simulate.estimators)) {
        plan.estimators = est
            .iter()
            .map(|s| s.parse::<EstimatorSpec>().map_err(|e| CliError::Usage(e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    plan.n_grid = a.n_grid.clone().unwrap_or_else(|| cfg.simulate.n_grid.clone());
    plan.trials = a.trials.unwrap_or(cfg.simulate.trials);
    plan.seed = seed;
    plan.tracker = tr;
    plan.limits = r.limits;
    if let Some(c) = r.c {
        plan.c = c;
    }
    plan.timing = !a.no_timing;
    plan.sampler = if a.exact { SamplerMode::Exact } else { SamplerMode::Random };
    let records = simulate::run_experiment(&plan)?;
    let truth = r.model.truth(&plan.truth).map_err(|e| CliError::Usage(e.to_string()))?;
    let rows = simulate::aggregate(plan.model, &truth, &records);
    match &a.out {
        Some(p) => simulate::emit_csv(&rows, r.model.d, p)?,
        None => simulate::write_csv(&rows, r.model.d, std::io::stdout())?,
    }
    if let Some(p) = &a.long {
        simulate::write_long_csv(&rows, std::fs::File::create(p)?)?;
    }
    Ok(())
}

pub fn bench(cfg: &Config, a: BenchArgs) -> Result<(), CliError> {
    let r = resolve(cfg, &a.common)?;
    let (tr, seed) = tracker(cfg, &a.tracker)?;
    let reps = a.reps.unwrap_or(cfg.reps);
    if reps == 0 {
        return Err(CliError::Usage("--reps must be positive".into()));
    }
    let data = a.data.clone().unwrap_or_else(|| cfg.data.clone());
    if data.len() != r.model.d {
        return Err(CliError::Usage(format!("--data needs {} values, got {}", r.model.d, data.len())));
    }
    let classes = match &a.clazz {
        Some(list) => list.iter().map(|s| parse_clazz(s)).collect::<Result<Vec<_>, _>>()?,
        None => vec![Clazz::Mle, Clazz::ReducedSecondOrder],
    };
    let mut out = String::from("estimator,paths,reps,mean_s,std_s\n");
    let mut means = Vec::new();
    for clazz in classes {
        let sys = build(&r, clazz)?;
        let compiled = compile(&sys, &data, None)?;
        let mut times = Vec::with_capacity(reps);
        let mut paths = 0;
        for _ in 0..reps {
            let rep = solve_compiled(&compiled, &tr, seed)?;
            paths = rep.path_count;
            times.push(rep.wall_time.as_secs_f64());
        }
        let mean = times.iter().sum::<f64>() / reps as f64;
        let var = if reps > 1 { times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (reps - 1) as f64 } else { 0.0 };
        out += &format!("{clazz},{paths},{reps},{mean:.6},{:.6}\n", var.sqrt());
        means.push((clazz, mean));
    }
    if let [(a0, m0), .., (a1, m1)] = means.as_slice() {
        out += &format!("# speedup {a0}/{a1}: {:.2}\n", m0 / m1);
    }
    emit(&out, a.out.as_deref())
}

pub fn selftest() -> Result<(), CliError> {
    let mut failures = 0;
    let mut check = |name: &str, ok: Result<bool, CliError>| {
        let ok = matches!(ok, Ok(true));
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };
    let limits = GroebnerLimits::default();
    let pg = ModelId::PeriodicGaussian.build();
    let lm = ModelId::LogMarginal.build();
    let all_factors = |sys: &EstimatingSystem| golden::factors(sys).is_some_and(|f| f.iter().all(Option::is_some));
    check("periodic-gaussian MLE quintic", build_mle_system(&pg).map(|s| all_factors(&s)).map_err(Into::into));
    check(
        "periodic-gaussian g + c*h by elimination",
        build(&Resolved { model: pg.clone(), c: None, limits }, Clazz::SecondOrder).map(|s| all_factors(&s)),
    );
    let mle = build_mle_system(&lm);
    check(
        "log-marginal MLE total degree 500",
        mle.clone().map(|s| s.total_degree_product == 500 && all_factors(&s)).map_err(Into::into),
    );
    for (k, product, bound) in [(3usize, 32u128, 2u32), (2, 4, 1)] {
        let res = mle.clone().map_err(CliError::from).and_then(|m| {
            let red = reduce_system(&m, k, limits)?;
            let cert = certify_class(&red, &m, k, limits)?;
            Ok(red.total_degree_product == product && red.max_eta_degree() <= bound && cert.holds() && all_factors(&red))
        });
        check(&format!("log-marginal reduction modulo I{k}"), res);
    }
    for d in [2usize, 3] {
        let res = (|| -> Result<bool, CliError> {
            let t = algest::polyalg::VariableTable::eta_x(d, &[]).map_err(|e| CliError::Other(e.to_string()))?;
            let eta = t.block(algest::polyalg::Block::Eta);
            let x = t.block(algest::polyalg::Block::X);
            let gb = ReductionIdeal::new(3, &eta, &x).map_err(|e| CliError::Other(e.to_string()))?.basis(limits).map_err(groebner_error)?;
            Ok(gb.satisfies_buchberger_criterion() && gb.check_reduced())
        })();
        check(&format!("Buchberger criterion on GB(I3), d={d}"), res);
    }
    let res = (|| -> Result<bool, CliError> {
        let sys = build_mle_system(&pg)?;
        let eta0 = pg.eta_at(&[0.0], None).map_err(|e| CliError::Other(e.to_string()))?;
        let rep = solve_compiled(&compile(&sys, &eta0, None)?, &TrackerConfig::default(), 1)?;
        let est = select_estimate(&rep, &pg, &sys, &eta0)?;
        Ok(rep.path_count == 5 && est.unknowns[0].abs() < 1e-8)
    })();
    check("homotopy recovers a = 0 from exact data", res);
    if failures > 0 {
        Err(CliError::Selftest(failures))
    } else {
        Ok(())
    }
}
