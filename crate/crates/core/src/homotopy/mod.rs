//! Linear homotopy continuation from a total-degree start system.

mod system;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::Duration;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::estimators::EstimatingSystem;
use crate::models::{Model, ModelError};
use crate::polyalg::{Block, PolyError, Polynomial, Var};

pub use system::CompiledSystem;
use system::nan_max;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HomotopyError {
    #[error("system has {equations} equations in {unknowns} unknowns")]
    NotSquare { equations: usize, unknowns: usize },
    #[error("equation {0} has degree zero")]
    ZeroDegree(usize),
    #[error("variable {0} is neither an unknown nor bound to a value")]
    Unbound(Var),
    #[error("expected {expected} data values, got {got}")]
    DataLength { expected: usize, got: usize },
    #[error("invalid tracker configuration: {0}")]
    Config(&'static str),
    #[error("all {0} paths failed")]
    AllPathsFailed(usize),
    #[error("no real solution")]
    NoRealSolution,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Start system `aᵢ·zᵢ^{dᵢ} − bᵢ` with its `∏ dᵢ` roots and the γ constant.
#[derive(Clone, Debug)]
pub struct StartSystem {
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub degrees: Vec<u32>,
    pub gamma: Complex64,
    pub roots: Vec<Vec<Complex64>>,
}

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

impl StartSystem {
    /// Random unit-modulus `aᵢ`, `bᵢ`, γ drawn from `seed`.
    pub fn total_degree(degrees: &[u32], seed: u64) -> Result<Self, HomotopyError> {
        if let Some(i) = degrees.iter().position(|&d| d == 0) {
            return Err(HomotopyError::ZeroDegree(i));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<Complex64> = degrees.iter().map(|_| unit_complex(&mut rng)).collect();
        let b: Vec<Complex64> = degrees.iter().map(|_| unit_complex(&mut rng)).collect();
        let gamma = unit_complex(&mut rng);
        let per_coord: Vec<Vec<Complex64>> = degrees
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                let base = (b[i] / a[i]).powf(1.0 / d as f64);
                (0..d).map(|k| base * Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64)).collect()
            })
            .collect();
        let mut roots = vec![Vec::new()];
        for choices in &per_coord {
            roots = roots
                .into_iter()
                .flat_map(|prefix: Vec<Complex64>| {
                    choices.iter().map(move |&c| {
                        let mut r = prefix.clone();
                        r.push(c);
                        r
                    })
                })
                .collect();
        }
        Ok(StartSystem { a, b, degrees: degrees.to_vec(), gamma, roots })
    }

    pub fn eval_jacobian(&self, z: &[Complex64]) -> (DVector<Complex64>, DMatrix<Complex64>) {
        let n = self.degrees.len();
        let mut f = DVector::zeros(n);
        let mut j = DMatrix::zeros(n, n);
        for i in 0..n {
            let d = self.degrees[i];
            f[i] = self.a[i] * z[i].powu(d) - self.b[i];
            j[(i, i)] = self.a[i] * Complex64::from(d as f64) * z[i].powu(d - 1);
        }
        (f, j)
    }

    /// Largest relative residual `|aᵢzᵢ^{dᵢ} − bᵢ| / |bᵢ|` over the stored roots.
    pub fn max_root_residual(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| {
                let (f, _) = self.eval_jacobian(r);
                f.iter().zip(&self.b).map(|(v, b)| v.norm() / b.norm()).fold(0.0, nan_max)
            })
            .fold(0.0, nan_max)
    }
}

/// Path tracker settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrackerConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub divergence: f64,
    /// Backward-error threshold an endpoint must meet to count as converged.
    pub refine_tol: f64,
    pub max_refine: usize,
    pub max_steps: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            initial_step: 0.05,
            min_step: 1e-8,
            max_step: 0.1,
            newton_tol: 1e-10,
            max_newton: 5,
            divergence: 1e8,
            refine_tol: 1e-10,
            max_refine: 20,
            max_steps: 20_000,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<(), HomotopyError> {
        if !(self.initial_step > 0.0 && self.initial_step <= 1.0) {
            return Err(HomotopyError::Config("initial step must lie in (0, 1]"));
        }
        if !(self.min_step > 0.0 && self.min_step < self.initial_step) {
            return Err(HomotopyError::Config("min step must be positive and below the initial step"));
        }
        if self.max_step < self.initial_step {
            return Err(HomotopyError::Config("max step must be at least the initial step"));
        }
        if !(self.newton_tol > 0.0 && self.refine_tol > 0.0 && self.divergence > 0.0) {
            return Err(HomotopyError::Config("tolerances must be positive"));
        }
        if self.max_newton == 0 || self.max_steps == 0 {
            return Err(HomotopyError::Config("iteration limits must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PathStatus {
    Converged,
    Diverged,
    Failed,
}

impl PathStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PathStatus::Converged => "converged",
            PathStatus::Diverged => "diverged",
            PathStatus::Failed => "failed",
        }
    }
}

/// Result of tracking one path.
#[derive(Clone, Debug, PartialEq)]
pub struct PathOutcome {
    pub status: PathStatus,
    pub endpoint: Vec<Complex64>,
    pub steps: usize,
    /// Normwise backward error of the endpoint in the target system.
    pub residual: f64,
    /// Value of t reached.
    pub t: f64,
    /// The target Jacobian is numerically rank deficient at the endpoint.
    pub singular: bool,
}

fn inf_norm(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm()).fold(0.0, nan_max)
}

struct Homotopy<'a> {
    target: &'a CompiledSystem,
    start: &'a StartSystem,
}

impl Homotopy<'_> {
    /// `H`, `∂H/∂z` and `∂H/∂t` at `(z, t)`.
    fn eval(&self, z: &[Complex64], t: f64) -> (DVector<Complex64>, DMatrix<Complex64>, DVector<Complex64>) {
        let (f, jf) = self.target.eval_jacobian(z);
        let (g, jg) = self.start.eval_jacobian(z);
        let s = self.start.gamma * (1.0 - t);
        let tc = Complex64::from(t);
        let h = &g * s + &f * tc;
        let hz = &jg * s + &jf * tc;
        let ht = f - g * self.start.gamma;
        (h, hz, ht)
    }

    fn newton(&self, z: &mut [Complex64], t: f64, cfg: &TrackerConfig) -> bool {
        let mut last = f64::INFINITY;
        for _ in 0..cfg.max_newton {
            let (h, hz, _) = self.eval(z, t);
            let Some(dz) = hz.lu().solve(&h) else { return false };
            let size = dz.iter().map(|c| c.norm()).fold(0.0, nan_max);
            if !size.is_finite() || size > 0.5 * last {
                return false;
            }
            for (zi, d) in z.iter_mut().zip(dz.iter()) {
                *zi -= d;
            }
            if size <= cfg.newton_tol * (1.0 + inf_norm(z)) {
                return true;
            }
            last = size;
        }
        false
    }
}

/// Follows `H(z, t) = γ(1−t)·start + t·target` from `root` at t = 0 to t = 1
/// with an Euler predictor and a Newton corrector. When `trace` is given,
/// every accepted point `(t, z)` is appended to it.
pub fn track_path(
    target: &CompiledSystem,
    start: &StartSystem,
    root: &[Complex64],
    cfg: &TrackerConfig,
    mut trace: Option<&mut Vec<(f64, Vec<Complex64>)>>,
) -> PathOutcome {
    let hom = Homotopy { target, start };
    let mut z = root.to_vec();
    let mut t = 0.0;
    let mut step = cfg.initial_step;
    let mut successes = 0;
    let mut steps = 0;
    if let Some(tr) = trace.as_deref_mut() {
        tr.push((t, z.clone()));
    }
    let finish = |status: PathStatus, z: Vec<Complex64>, steps: usize, t: f64| {
        if status == PathStatus::Failed && t >= ENDGAME_START {
            return endgame(target, z, steps, t, cfg);
        }
        let residual = target.backward_error(&z);
        let singular = is_singular(target, &z);
        PathOutcome { status, endpoint: z, steps, residual, t, singular }
    };
    while t < 1.0 {
        if steps >= cfg.max_steps {
            return finish(PathStatus::Failed, z, steps, t);
        }
        steps += 1;
        let dt = step.min(1.0 - t);
        let (_, hz, ht) = hom.eval(&z, t);
        let Some(dzdt) = hz.lu().solve(&(-ht)) else {
            return finish(PathStatus::Failed, z, steps, t);
        };
        let mut trial: Vec<Complex64> = z.iter().zip(dzdt.iter()).map(|(zi, d)| zi + d * dt).collect();
        let t_next = if dt == 1.0 - t { 1.0 } else { t + dt };
        if hom.newton(&mut trial, t_next, cfg) {
            z = trial;
            t = t_next;
            if let Some(tr) = trace.as_deref_mut() {
                tr.push((t, z.clone()));
            }
            if inf_norm(&z) > cfg.divergence {
                return finish(PathStatus::Diverged, z, steps, t);
            }
            successes += 1;
            if successes >= 3 {
                step = (step * 2.0).min(cfg.max_step);
                successes = 0;
            }
        } else {
            successes = 0;
            step /= 2.0;
            if step < cfg.min_step {
                let status = if inf_norm(&z) > cfg.divergence.sqrt() { PathStatus::Diverged } else { PathStatus::Failed };
                return finish(status, z, steps, t);
            }
        }
    }
    refine(target, &mut z, cfg);
    let residual = target.backward_error(&z);
    if inf_norm(&z) > cfg.divergence {
        return finish(PathStatus::Diverged, z, steps, t);
    }
    if !(residual < cfg.refine_tol) {
        return endgame(target, z, steps, t, cfg);
    }
    let singular = is_singular(target, &z);
    PathOutcome { status: PathStatus::Converged, endpoint: z, steps, residual, t, singular }
}

/// Paths stalling beyond this t are projected onto the target's zero set.
pub const ENDGAME_START: f64 = 0.9;
const SINGULAR_RCOND: f64 = 1e-10;

const SVD_MAX_ITER: usize = 1000;

/// SVD with an iteration cap; `None` for non-finite input or no convergence.
fn svd(j: DMatrix<Complex64>, vectors: bool) -> Option<nalgebra::SVD<Complex64, nalgebra::Dyn, nalgebra::Dyn>> {
    if !j.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        return None;
    }
    nalgebra::SVD::try_new(j, vectors, vectors, f64::EPSILON, SVD_MAX_ITER)
}

fn is_singular(target: &CompiledSystem, z: &[Complex64]) -> bool {
    let (_, j) = target.eval_jacobian(z);
    let Some(svd) = svd(j, false) else { return true };
    let sv = svd.singular_values;
    let max = sv.max();
    !(max > 0.0) || sv.min() < SINGULAR_RCOND * max
}

/// Gauss–Newton with an SVD pseudo-inverse on the target system, for paths
/// that end near singular or positive-dimensional solution sets.
fn endgame(target: &CompiledSystem, mut z: Vec<Complex64>, steps: usize, t: f64, cfg: &TrackerConfig) -> PathOutcome {
    let mut best = target.backward_error(&z);
    for _ in 0..4 * cfg.max_refine {
        if best < cfg.refine_tol * 1e-3 {
            break;
        }
        let (f, j) = target.eval_jacobian(&z);
        let Some(svd) = svd(j, true) else { break };
        let eps = 1e-12 * svd.singular_values.max();
        let Ok(dz) = svd.solve(&f, eps) else { break };
        let next: Vec<Complex64> = z.iter().zip(dz.iter()).map(|(a, d)| a - d).collect();
        let err = target.backward_error(&next);
        if !(err < best) {
            break;
        }
        best = err;
        z = next;
    }
    let status = if inf_norm(&z) > cfg.divergence.sqrt() {
        PathStatus::Diverged
    } else if best < cfg.refine_tol {
        PathStatus::Converged
    } else {
        PathStatus::Failed
    };
    let singular = status == PathStatus::Converged && is_singular(target, &z);
    PathOutcome { status, endpoint: z, steps, residual: best, t, singular }
}

/// Newton polishing on the target system; keeps the best iterate.
fn refine(target: &CompiledSystem, z: &mut Vec<Complex64>, cfg: &TrackerConfig) {
    let mut best = target.backward_error(z);
    for _ in 0..cfg.max_refine {
        if best < cfg.refine_tol * 1e-3 {
            break;
        }
        let (f, j) = target.eval_jacobian(z);
        let Some(dz) = j.lu().solve(&f) else { break };
        let next: Vec<Complex64> = z.iter().zip(dz.iter()).map(|(a, d)| a - d).collect();
        let err = target.backward_error(&next);
        if !(err < best) {
            break;
        }
        best = err;
        *z = next;
    }
}

/// Outcome of solving one system.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub path_count: usize,
    pub outcomes: Vec<PathOutcome>,
    /// Distinct converged endpoints, in canonical order.
    pub solutions: Vec<Vec<Complex64>>,
    /// Real parts of the distinct solutions with negligible imaginary parts.
    pub real_solutions: Vec<Vec<f64>>,
    pub wall_time: Duration,
}

impl SolveReport {
    pub fn count(&self, status: PathStatus) -> usize {
        self.outcomes.iter().filter(|o| o.status == status).count()
    }

    /// CSV with columns `path, status, steps, residual, re_1, im_1, …`.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let n = self.outcomes.first().map_or(0, |o| o.endpoint.len());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["path".to_string(), "status".into(), "steps".into(), "residual".into()];
        for i in 1..=n {
            header.push(format!("re_{i}"));
            header.push(format!("im_{i}"));
        }
        w.write_record(&header)?;
        for (i, o) in self.outcomes.iter().enumerate() {
            let mut row = vec![i.to_string(), o.status.as_str().to_string(), o.steps.to_string(), format!("{:e}", o.residual)];
            for c in &o.endpoint {
                row.push(format!("{:e}", c.re));
                row.push(format!("{:e}", c.im));
            }
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Relative clustering radius for distinct solutions.
pub const CLUSTER_RADIUS: f64 = 1e-8;
/// Threshold on imaginary parts, relative to `max(1, ‖z‖∞)`, for real solutions.
pub const REAL_TOL: f64 = 1e-8;

fn canonical_cmp(a: &[Complex64], b: &[Complex64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

fn cluster(mut points: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    points.sort_by(|a, b| canonical_cmp(a, b));
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for p in points {
        let close = out.iter().any(|q| {
            let dist = p.iter().zip(q).map(|(a, b)| (a - b).norm()).fold(0.0, nan_max);
            dist <= CLUSTER_RADIUS * (1.0 + inf_norm(q))
        });
        if !close {
            out.push(p);
        }
    }
    out
}

fn now() -> Option<std::time::Instant> {
    #[cfg(not(target_arch = "wasm32"))]
    {
        Some(std::time::Instant::now())
    }
    #[cfg(target_arch = "wasm32")]
    {
        None
    }
}

/// Rounds of re-tracking for paths that appear to have jumped.
const RETRACK_ROUNDS: usize = 2;
/// Factor by which each re-tracking round shrinks the maximum step.
const RETRACK_FACTOR: f64 = 10.0;

fn track_many(target: &CompiledSystem, start: &StartSystem, paths: &[usize], cfg: &TrackerConfig) -> Vec<PathOutcome> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        paths.par_iter().map(|&i| track_path(target, start, &start.roots[i], cfg, None)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        paths.iter().map(|&i| track_path(target, start, &start.roots[i], cfg, None)).collect()
    }
}

/// Paths sharing a nonsingular endpoint with another path. A regular root is
/// the end of exactly one path, so at least one of them jumped.
fn jumped_paths(outcomes: &[PathOutcome]) -> Vec<usize> {
    let regular: Vec<usize> = (0..outcomes.len())
        .filter(|&i| outcomes[i].status == PathStatus::Converged && !outcomes[i].singular)
        .collect();
    let mut out = Vec::new();
    for &i in &regular {
        let zi = &outcomes[i].endpoint;
        let shared = regular.iter().any(|&j| {
            let zj = &outcomes[j].endpoint;
            j != i && zi.iter().zip(zj).map(|(a, b)| (a - b).norm()).fold(0.0, nan_max) <= CLUSTER_RADIUS * (1.0 + inf_norm(zj))
        });
        if shared {
            out.push(i);
        }
    }
    out
}

/// Tracks every start root of a total-degree homotopy into `target`. Paths
/// that share a nonsingular endpoint are re-tracked with smaller steps.
pub fn solve_compiled(target: &CompiledSystem, cfg: &TrackerConfig, seed: u64) -> Result<SolveReport, HomotopyError> {
    cfg.validate()?;
    let clock = now();
    let start = StartSystem::total_degree(target.degrees(), seed)?;
    let all: Vec<usize> = (0..start.roots.len()).collect();
    let mut outcomes = track_many(target, &start, &all, cfg);
    let mut tight = *cfg;
    for _ in 0..RETRACK_ROUNDS {
        let suspects = jumped_paths(&outcomes);
        if suspects.is_empty() {
            break;
        }
        tight.max_step /= RETRACK_FACTOR;
        tight.initial_step = tight.initial_step.min(tight.max_step);
        tight.min_step = tight.min_step.min(tight.initial_step / 2.0);
        for (i, o) in suspects.iter().zip(track_many(target, &start, &suspects, &tight)) {
            outcomes[*i] = o;
        }
    }
    let path_count = outcomes.len();
    if outcomes.iter().all(|o| o.status == PathStatus::Failed) {
        return Err(HomotopyError::AllPathsFailed(path_count));
    }
    let solutions =
        cluster(outcomes.iter().filter(|o| o.status == PathStatus::Converged).map(|o| o.endpoint.clone()).collect());
    let real_solutions = solutions
        .iter()
        .filter(|s| s.iter().all(|c| c.im.abs() < REAL_TOL * inf_norm(s).max(1.0)))
        .map(|s| s.iter().map(|c| c.re).collect())
        .collect();
    let wall_time = clock.map(|c| c.elapsed()).unwrap_or(Duration::ZERO);
    Ok(SolveReport { path_count, outcomes, solutions, real_solutions, wall_time })
}

/// Compiles an estimating system with its data block bound to `data` (and a
/// symbolic `c` bound to `c_value` when present).
pub fn compile(system: &EstimatingSystem, data: &[f64], c_value: Option<f64>) -> Result<CompiledSystem, HomotopyError> {
    let xs = system.table.block(Block::X);
    if xs.len() != data.len() {
        return Err(HomotopyError::DataLength { expected: xs.len(), got: data.len() });
    }
    let mut values: BTreeMap<Var, Complex64> = xs.iter().copied().zip(data.iter().map(|&v| Complex64::from(v))).collect();
    if system.c.is_none() {
        if let (Some(c), Some(cv)) = (system.table.id("c"), c_value) {
            values.insert(c, Complex64::from(cv));
        }
    }
    let polys: Vec<Polynomial<Complex64>> =
        system.equations.iter().map(|p| p.to_complex().partial_eval(&values)).collect();
    CompiledSystem::new(&polys, &system.unknowns)
}

/// Solves an estimating system at data `data` by total-degree homotopy.
pub fn solve(system: &EstimatingSystem, data: &[f64], cfg: &TrackerConfig, seed: u64) -> Result<SolveReport, HomotopyError> {
    solve_compiled(&compile(system, data, None)?, cfg, seed)
}

/// An estimate selected from the real solutions.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    /// Values of the system's unknowns.
    pub unknowns: Vec<f64>,
    pub eta: Vec<f64>,
    pub distance: f64,
}

/// The real solution whose η is closest to `xbar` in Euclidean norm, ties
/// broken lexicographically.
pub fn select_estimate(
    report: &SolveReport,
    model: &Model,
    system: &EstimatingSystem,
    xbar: &[f64],
) -> Result<Estimate, HomotopyError> {
    let mut best: Option<Estimate> = None;
    for sol in &report.real_solutions {
        let eta = eta_of_solution(model, system, sol)?;
        let distance = eta.iter().zip(xbar).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let cand = Estimate { unknowns: sol.clone(), eta, distance };
        best = Some(match best {
            None => cand,
            Some(b) => {
                let ord = cand
                    .distance
                    .total_cmp(&b.distance)
                    .then_with(|| cand.unknowns.iter().zip(&b.unknowns).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal));
                if ord == Ordering::Less { cand } else { b }
            }
        });
    }
    best.ok_or(HomotopyError::NoRealSolution)
}

fn eta_of_solution(model: &Model, system: &EstimatingSystem, sol: &[f64]) -> Result<Vec<f64>, HomotopyError> {
    let pos = |v: Var| system.unknowns.iter().position(|&u| u == v);
    if model.is_explicit() {
        let u: Vec<f64> = model.params.iter().map(|&p| pos(p).map(|i| sol[i]).ok_or(HomotopyError::Unbound(p))).collect::<Result<_, _>>()?;
        Ok(model.eta_at(&u, None)?)
    } else {
        model.eta.iter().map(|&e| pos(e).map(|i| sol[i]).ok_or(HomotopyError::Unbound(e))).collect()
    }
}
