//! Monte-Carlo experiments: sample data at a true point, solve each
//! estimator, aggregate mean squared error, bias and timing.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::estimators::{
    bias_correction, build_mle_system, build_vector_version, eliminate_v, reduce_system, BiasSource, Clazz,
    EstimatingSystem, EstimatorError, PerturbationChoice,
};
use crate::groebner::GroebnerLimits;
use crate::homotopy::{select_estimate, solve, HomotopyError, TrackerConfig};
use crate::models::{Model, ModelError, ModelId, TruePoint};
use crate::polyalg::Rat;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An estimator of an experiment: a system class, optionally bias corrected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EstimatorSpec {
    pub clazz: Clazz,
    pub bias_corrected: bool,
}

impl EstimatorSpec {
    pub const fn plain(clazz: Clazz) -> Self {
        EstimatorSpec { clazz, bias_corrected: false }
    }
}

impl fmt::Display for EstimatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.clazz, if self.bias_corrected { "+bc" } else { "" })
    }
}

impl FromStr for EstimatorSpec {
    type Err = EstimatorError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, bias_corrected) = match s.strip_suffix("+bc") {
            Some(rest) => (rest, true),
            None => (s, false),
        };
        Ok(EstimatorSpec { clazz: name.parse()?, bias_corrected })
    }
}

/// How the sufficient-statistic mean is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerMode {
    /// The model's sampler with `N` observations.
    Random,
    /// X̄ fixed at the true η.
    Exact,
}

/// A Monte-Carlo experiment.
#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub model: ModelId,
    /// Parameters (explicit models) or η (implicit models) of the truth.
    pub truth: Vec<f64>,
    pub estimators: Vec<EstimatorSpec>,
    pub n_grid: Vec<u64>,
    pub trials: usize,
    pub seed: u64,
    pub tracker: TrackerConfig,
    /// Perturbation constant for unreduced first/second-order systems.
    pub c: Rat,
    pub limits: GroebnerLimits,
    pub sampler: SamplerMode,
    /// Record solve wall times; off gives byte-reproducible output.
    pub timing: bool,
}

impl ExperimentPlan {
    /// Defaults: N ∈ {10², 10³, 10⁴}, 200 trials, the model's standard estimators.
    pub fn new(model: ModelId, truth: Vec<f64>) -> Self {
        ExperimentPlan {
            model,
            truth,
            estimators: default_estimators(model),
            n_grid: vec![100, 1_000, 10_000],
            trials: 200,
            seed: 20_120_101,
            tracker: TrackerConfig::default(),
            c: Rat::from_integer(1.into()),
            limits: GroebnerLimits::default(),
            sampler: SamplerMode::Random,
            timing: true,
        }
    }

    pub fn validate(&self, model: &Model) -> Result<TruePoint, SimulateError> {
        if self.trials == 0 {
            return Err(SimulateError::Plan("trials must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(SimulateError::Plan("N grid must be positive and strictly increasing".into()));
        }
        if self.estimators.is_empty() {
            return Err(SimulateError::Plan("no estimators".into()));
        }
        self.tracker.validate().map_err(|e| SimulateError::Plan(e.to_string()))?;
        Ok(model.truth(&self.truth)?)
    }
}

/// MLE and both reduced estimators for implicit models; MLE, its bias-corrected
/// version and the second-order algebraic version for explicit ones.
pub fn default_estimators(model: ModelId) -> Vec<EstimatorSpec> {
    match model {
        ModelId::LogMarginal => vec![
            EstimatorSpec::plain(Clazz::Mle),
            EstimatorSpec::plain(Clazz::ReducedFirstOrder),
            EstimatorSpec::plain(Clazz::ReducedSecondOrder),
        ],
        _ => vec![
            EstimatorSpec::plain(Clazz::Mle),
            EstimatorSpec { clazz: Clazz::Mle, bias_corrected: true },
            EstimatorSpec::plain(Clazz::SecondOrder),
        ],
    }
}

/// Builds the estimating system of the given class with symbolic data.
pub fn build_system(model: &Model, clazz: Clazz, c: &Rat, limits: GroebnerLimits) -> Result<EstimatingSystem, EstimatorError> {
    match clazz {
        Clazz::Mle => build_mle_system(model),
        Clazz::ReducedFirstOrder => reduce_system(&build_mle_system(model)?, 2, limits),
        Clazz::ReducedSecondOrder => reduce_system(&build_mle_system(model)?, 3, limits),
        Clazz::FirstOrder | Clazz::SecondOrder => {
            let choice = PerturbationChoice::default_for(model, clazz, Some(c.clone()))?;
            eliminate_v(&build_vector_version(model, &choice, clazz)?, limits)
        }
    }
}

/// Outcome of one estimator on one simulated data set.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub n: u64,
    pub trial: usize,
    pub estimator: EstimatorSpec,
    pub success: bool,
    pub eta: Option<Vec<f64>>,
    pub u: Option<Vec<f64>>,
    pub time_s: f64,
    pub paths: usize,
}

/// Generator for trial `trial` at grid position `grid_index`.
pub fn trial_rng(seed: u64, grid_index: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((grid_index as u64) << 32) | trial as u64);
    rng
}

fn run_trial(
    model: &Model,
    truth: &TruePoint,
    systems: &[(EstimatorSpec, EstimatingSystem)],
    plan: &ExperimentPlan,
    grid_index: usize,
    trial: usize,
) -> Result<Vec<TrialRecord>, SimulateError> {
    let n = plan.n_grid[grid_index];
    let mut rng = trial_rng(plan.seed, grid_index, trial);
    let solver_seed: u64 = rng.random();
    let xbar = match plan.sampler {
        SamplerMode::Random => model.sample_mean(truth, n, &mut rng)?,
        SamplerMode::Exact => truth.eta.clone(),
    };
    let mut out = Vec::with_capacity(systems.len());
    for (spec, sys) in systems {
        let mut record =
            TrialRecord { n, trial, estimator: *spec, success: false, eta: None, u: None, time_s: 0.0, paths: 0 };
        match solve(sys, &xbar, &plan.tracker, solver_seed) {
            Ok(report) => {
                record.paths = report.path_count;
                if plan.timing {
                    record.time_s = report.wall_time.as_secs_f64();
                }
                if let Ok(est) = select_estimate(&report, model, sys, &xbar) {
                    if let Some((u, eta)) = finish_estimate(model, spec, est.eta, n) {
                        record.success = eta.iter().chain(&u).all(|v| v.is_finite());
                        record.u = Some(u);
                        record.eta = Some(eta);
                    }
                }
            }
            Err(HomotopyError::AllPathsFailed(p)) => record.paths = p,
            Err(e) => return Err(SimulateError::Plan(e.to_string())),
        }
        out.push(record);
    }
    Ok(out)
}

/// Parameters and η of a selected root, after bias correction if requested.
fn finish_estimate(model: &Model, spec: &EstimatorSpec, eta: Vec<f64>, n: u64) -> Option<(Vec<f64>, Vec<f64>)> {
    let u = if model.is_explicit() { explicit_params(model, &eta)? } else { model.params_of_eta(&eta).ok()? };
    if !spec.bias_corrected {
        return Some((u, eta));
    }
    let anchor = if model.is_explicit() { None } else { Some(eta.as_slice()) };
    let shift = bias_correction(model, &u, n as f64, anchor, BiasSource::ClosedForm).ok()?;
    let corrected: Vec<f64> = u.iter().zip(&shift).map(|(a, b)| a - b).collect();
    let eta = model.eta_at(&corrected, anchor).ok()?;
    Some((corrected, eta))
}

/// Recovers parameters from η on explicit models with a linear coordinate.
fn explicit_params(model: &Model, eta: &[f64]) -> Option<Vec<f64>> {
    match model.id {
        ModelId::PeriodicGaussian => Some(vec![-eta[1] / 4.0]),
        ModelId::ToyLinear => Some(vec![eta[0]]),
        ModelId::LogMarginal => None,
    }
}

/// Runs every (N, trial) pair; records come back sorted by N, trial and
/// estimator position in the plan.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<Vec<TrialRecord>, SimulateError> {
    let model = plan.model.build();
    let truth = plan.validate(&model)?;
    let systems = plan
        .estimators
        .iter()
        .map(|spec| Ok((*spec, build_system(&model, spec.clazz, &plan.c, plan.limits)?)))
        .collect::<Result<Vec<_>, EstimatorError>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..plan.n_grid.len()).flat_map(|g| (0..plan.trials).map(move |t| (g, t))).collect();
    #[cfg(feature = "parallel")]
    let results: Vec<Result<Vec<TrialRecord>, SimulateError>> = {
        use rayon::prelude::*;
        jobs.par_iter().map(|&(g, t)| run_trial(&model, &truth, &systems, plan, g, t)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<Vec<TrialRecord>, SimulateError>> =
        jobs.iter().map(|&(g, t)| run_trial(&model, &truth, &systems, plan, g, t)).collect();
    let mut records = Vec::with_capacity(jobs.len() * systems.len());
    for r in results {
        records.extend(r?);
    }
    Ok(records)
}

/// Aggregate statistics of one estimator at one sample size.
#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub model: ModelId,
    pub estimator: EstimatorSpec,
    pub n: u64,
    pub trials: usize,
    /// Mean of ‖η̂ − η*‖² over successful trials.
    pub mse: f64,
    /// Mean of ‖û − u*‖² over successful trials.
    pub mse_u: f64,
    pub bias: Vec<f64>,
    pub mean_time_s: f64,
    pub fail_rate: f64,
}

/// Groups records by (N, estimator) in plan order.
pub fn aggregate(model: ModelId, truth: &TruePoint, records: &[TrialRecord]) -> Vec<AggregateRow> {
    let mut keys: Vec<(u64, EstimatorSpec)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.n, r.estimator)) {
            keys.push((r.n, r.estimator));
        }
    }
    keys.sort_by_key(|k| k.0);
    keys.into_iter()
        .map(|(n, estimator)| {
            let group: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n && r.estimator == estimator).collect();
            let ok: Vec<&TrialRecord> = group.iter().copied().filter(|r| r.success).collect();
            let d = truth.eta.len();
            let mut bias = vec![0.0; d];
            let (mut mse, mut mse_u) = (0.0, 0.0);
            for r in &ok {
                let eta = r.eta.as_ref().expect("successful trials carry η");
                for i in 0..d {
                    bias[i] += eta[i] - truth.eta[i];
                }
                mse += sq_dist(eta, &truth.eta);
                mse_u += sq_dist(r.u.as_ref().expect("successful trials carry u"), &truth.u);
            }
            let k = ok.len() as f64;
            let div = |x: f64| if ok.is_empty() { f64::NAN } else { x / k };
            AggregateRow {
                model,
                estimator,
                n,
                trials: group.len(),
                mse: div(mse),
                mse_u: div(mse_u),
                bias: bias.into_iter().map(div).collect(),
                mean_time_s: group.iter().map(|r| r.time_s).sum::<f64>() / group.len() as f64,
                fail_rate: (group.len() - ok.len()) as f64 / group.len() as f64,
            }
        })
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn header(d: usize) -> Vec<String> {
    let mut h: Vec<String> = ["model", "estimator", "N", "trials", "mse"].iter().map(|s| s.to_string()).collect();
    h.extend((1..=d).map(|i| format!("bias_{i}")));
    h.push("mean_time_s".into());
    h.push("fail_rate".into());
    h
}

/// Aggregate rows as CSV: `model, estimator, N, trials, mse, bias_1..d, mean_time_s, fail_rate`.
pub fn write_csv<W: Write>(rows: &[AggregateRow], d: usize, out: W) -> Result<(), SimulateError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(d))?;
    for r in rows {
        let mut rec = vec![r.model.to_string(), r.estimator.to_string(), r.n.to_string(), r.trials.to_string()];
        rec.push(format!("{:e}", r.mse));
        rec.extend(r.bias.iter().map(|b| format!("{b:e}")));
        rec.push(format!("{:e}", r.mean_time_s));
        rec.push(format!("{}", r.fail_rate));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes [`write_csv`] output to `path`.
pub fn emit_csv(rows: &[AggregateRow], d: usize, path: &Path) -> Result<(), SimulateError> {
    write_csv(rows, d, std::fs::File::create(path)?)
}

/// Long format `N, estimator, metric, value` with metrics mse, mse_u,
/// bias_i, mean_time_s and fail_rate.
pub fn write_long_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<(), SimulateError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["N", "estimator", "metric", "value"])?;
    for r in rows {
        let mut metrics = vec![("mse".to_string(), r.mse), ("mse_u".to_string(), r.mse_u)];
        metrics.extend(r.bias.iter().enumerate().map(|(i, b)| (format!("bias_{}", i + 1), *b)));
        metrics.push(("mean_time_s".into(), r.mean_time_s));
        metrics.push(("fail_rate".into(), r.fail_rate));
        for (name, v) in metrics {
            w.write_record([r.n.to_string(), r.estimator.to_string(), name, format!("{v:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`].
pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<AggregateRow>, SimulateError> {
    let mut rd = csv::Reader::from_reader(input);
    let d = rd.headers()?.iter().filter(|h| h.starts_with("bias_")).count();
    let bad = |m: &str| SimulateError::Plan(format!("malformed csv field: {m}"));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).ok_or_else(|| bad("missing column"));
        let num = |i: usize| -> Result<f64, SimulateError> { f(i)?.parse().map_err(|_| bad(f(i).unwrap_or(""))) };
        rows.push(AggregateRow {
            model: f(0)?.parse()?,
            estimator: f(1)?.parse()?,
            n: f(2)?.parse().map_err(|_| bad("N"))?,
            trials: f(3)?.parse().map_err(|_| bad("trials"))?,
            mse: num(4)?,
            mse_u: f64::NAN,
            bias: (0..d).map(|i| num(5 + i)).collect::<Result<_, _>>()?,
            mean_time_s: num(5 + d)?,
            fail_rate: num(6 + d)?,
        });
    }
    Ok(rows)
}

/// Least-squares slope of log MSE against log N over rows with `N ≥ min_n`.
pub fn log_log_slope(rows: &[AggregateRow], estimator: EstimatorSpec, min_n: u64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.estimator == estimator && r.n >= min_n && r.mse > 0.0 && r.mse.is_finite())
        .map(|r| ((r.n as f64).ln(), r.mse.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}

/// `MSE(a) / MSE(b)` at sample size `n`.
pub fn mse_ratio(rows: &[AggregateRow], a: EstimatorSpec, b: EstimatorSpec, n: u64) -> Option<f64> {
    let find = |e| rows.iter().find(|r| r.estimator == e && r.n == n).map(|r| r.mse);
    Some(find(a)? / find(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(n: u64, mse: f64) -> AggregateRow {
        AggregateRow {
            model: ModelId::ToyLinear,
            estimator: EstimatorSpec::plain(Clazz::Mle),
            n,
            trials: 10,
            mse,
            mse_u: mse,
            bias: vec![0.5, -0.25],
            mean_time_s: 0.001,
            fail_rate: 0.0,
        }
    }

    #[test]
    fn estimator_names_round_trip() {
        for s in ["mle", "mle+bc", "reduced-second-order", "first-order+bc"] {
            assert_eq!(s.parse::<EstimatorSpec>().unwrap().to_string(), s);
        }
        assert!("second".parse::<EstimatorSpec>().is_err());
    }

    #[test]
    fn symmetric_records_have_zero_bias() {
        let truth = TruePoint { u: vec![0.5], eta: vec![0.5, 0.25] };
        let rec = |eta: Vec<f64>, u: f64| TrialRecord {
            n: 10,
            trial: 0,
            estimator: EstimatorSpec::plain(Clazz::Mle),
            success: true,
            eta: Some(eta),
            u: Some(vec![u]),
            time_s: 0.0,
            paths: 3,
        };
        let rows = aggregate(ModelId::ToyLinear, &truth, &[rec(vec![0.6, 0.35], 0.6), rec(vec![0.4, 0.15], 0.4)]);
        assert_eq!(rows.len(), 1);
        assert!(rows[0].bias.iter().all(|b| b.abs() < 1e-15));
        assert!((rows[0].mse - 0.02).abs() < 1e-15);
        let exact = aggregate(ModelId::ToyLinear, &truth, &[rec(vec![0.5, 0.25], 0.5)]);
        assert_eq!(exact[0].mse, 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let mut buf = Vec::new();
        write_csv(&[], 2, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "model,estimator,N,trials,mse,bias_1,bias_2,mean_time_s,fail_rate\n");
        let rows = vec![row(100, 0.125)];
        let mut buf = Vec::new();
        write_csv(&rows, 2, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap().lines().count(), 2);
        let back = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back[0].mse, 0.125);
        assert_eq!(back[0].bias, rows[0].bias);
        assert_eq!(back[0].estimator, rows[0].estimator);
    }

    #[test]
    fn slope_of_inverse_law() {
        let rows: Vec<_> = [100u64, 1000, 10000].iter().map(|&n| row(n, 3.0 / n as f64)).collect();
        assert!((log_log_slope(&rows, EstimatorSpec::plain(Clazz::Mle), 30).unwrap() + 1.0).abs() < 1e-12);
    }
}
