//! Browser bindings: estimating curves of the periodic Gaussian model,
//! homotopy path traces for a pair of plane curves, and bias curves.
//!
//! Each operation has a plain Rust form returning JSON (used by the tests)
//! and a `wasm_bindgen` wrapper that turns errors into JavaScript exceptions.

use algest::estimators::{build_mle_system, numeric_bias, BiasTerm, Clazz, EstimatorError, EstimatingSystem, BIAS_STEP};
use algest::groebner::GroebnerLimits;
use algest::homotopy::{compile, select_estimate, solve, solve_compiled, track_path, CompiledSystem, HomotopyError, StartSystem, TrackerConfig};
use algest::models::{periodic_gaussian, Model, ModelError, ModelId};
use algest::polyalg::{parse_poly, parse_rat, PolyError, VariableTable};
use algest::simulate::build_system;
use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;
use wasm_bindgen::prelude::*;

/// Largest Bézout number traced in the browser.
pub const MAX_PATHS: u128 = 64;

#[derive(Debug, Error)]
pub enum DemoError {
    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },
    #[error("{0} paths exceed the demo limit of {MAX_PATHS}")]
    TooManyPaths(u128),
    #[error("bias curves need an explicit model, got {0}")]
    Implicit(ModelId),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn curve(model: &Model, name: &str, system: &EstimatingSystem, data: &[f64], a: &[f64]) -> Result<Value, DemoError> {
    let f = compile(system, data, None)?;
    let values: Vec<f64> = a.iter().map(|&x| f.eval(&[Complex64::new(x, 0.0)])[0].re).collect();
    let report = solve(system, data, &TrackerConfig::default(), 1)?;
    let roots: Vec<f64> = report.real_solutions.iter().map(|s| s[0]).filter(|r| (0.0..1.0).contains(r)).collect();
    let estimate = select_estimate(&report, model, system, data).ok().map(|e| e.unknowns[0]);
    Ok(json!({ "name": name, "values": values, "roots": roots, "estimate": estimate }))
}

/// Periodic Gaussian MLE and second-order estimating polynomials in `a` at
/// data `X̄ = (x₁, x₂, x₃)`, sampled on `[0, 0.99]`, with their real roots
/// in `[0, 1)` and the selected estimates.
pub fn pg_curves_json(data: &[f64], c: &str, samples: usize) -> Result<String, DemoError> {
    if data.len() != 3 {
        return Err(DemoError::Length { expected: 3, got: data.len() });
    }
    let model = periodic_gaussian();
    let c = parse_rat(c)?;
    let mle = build_mle_system(&model)?;
    let second = build_system(&model, Clazz::SecondOrder, &c, GroebnerLimits::default())?;
    let a = grid(0.0, 0.99, samples);
    let curves = vec![curve(&model, "mle", &mle, data, &a)?, curve(&model, "second-order", &second, data, &a)?];
    Ok(json!({ "a": a, "curves": curves }).to_string())
}

/// Traces every path of the total-degree homotopy for `{f₁ = 0, f₂ = 0}` in
/// the variables `x`, `y`. Each trace point is `[t, Re x, Im x, Re y, Im y]`.
pub fn homotopy_paths_json(f1: &str, f2: &str, seed: u64) -> Result<String, DemoError> {
    let table = VariableTable::eta_x(0, &["x", "y"])?;
    let polys = [parse_poly(f1, &table)?.to_complex(), parse_poly(f2, &table)?.to_complex()];
    let target = CompiledSystem::new(&polys, &[0, 1])?;
    if target.bezout_number() > MAX_PATHS {
        return Err(DemoError::TooManyPaths(target.bezout_number()));
    }
    let cfg = TrackerConfig::default();
    let start = StartSystem::total_degree(target.degrees(), seed)?;
    let paths: Vec<Value> = start
        .roots
        .iter()
        .map(|root| {
            let mut trace = Vec::new();
            let o = track_path(&target, &start, root, &cfg, Some(&mut trace));
            let points: Vec<[f64; 5]> = trace.iter().map(|(t, z)| [*t, z[0].re, z[0].im, z[1].re, z[1].im]).collect();
            json!({
                "status": o.status.as_str(),
                "steps": o.steps,
                "residual": o.residual,
                "singular": o.singular,
                "trace": points,
            })
        })
        .collect();
    let report = solve_compiled(&target, &cfg, seed)?;
    Ok(json!({ "degrees": target.degrees(), "paths": paths, "real": report.real_solutions }).to_string())
}

/// Second-order bias `b(u)` of a one-parameter explicit model on `[lo, hi]`:
/// the numeric connection formula, the derived closed form and, where one
/// exists, the published closed form.
pub fn bias_curves_json(model: &str, lo: f64, hi: f64, samples: usize) -> Result<String, DemoError> {
    let id: ModelId = model.parse()?;
    let model = id.build();
    if !model.is_explicit() {
        return Err(DemoError::Implicit(id));
    }
    if model.p != 1 {
        return Err(DemoError::Length { expected: 1, got: model.p });
    }
    let u = grid(lo, hi, samples);
    let derived = BiasTerm::closed_form(&model);
    let printed = BiasTerm::printed(&model);
    let mut numeric = Vec::with_capacity(u.len());
    let mut closed = Vec::with_capacity(u.len());
    let mut published = Vec::with_capacity(u.len());
    for &x in &u {
        numeric.push(numeric_bias(&model, &[x], None, BIAS_STEP)?[0]);
        closed.push(derived.eval(&[x])?[0]);
        if let Some(p) = &printed {
            published.push(p.eval(&[x])?[0]);
        }
    }
    Ok(json!({
        "u": u,
        "numeric": numeric,
        "closed_form": closed,
        "published": printed.map(|_| published),
    })
    .to_string())
}

fn js(e: DemoError) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = pgCurves)]
pub fn pg_curves(data: &[f64], c: &str, samples: usize) -> Result<String, JsError> {
    pg_curves_json(data, c, samples).map_err(js)
}

#[wasm_bindgen(js_name = homotopyPaths)]
pub fn homotopy_paths(f1: &str, f2: &str, seed: u64) -> Result<String, JsError> {
    homotopy_paths_json(f1, f2, seed).map_err(js)
}

#[wasm_bindgen(js_name = biasCurves)]
pub fn bias_curves(model: &str, lo: f64, hi: f64, samples: usize) -> Result<String, JsError> {
    bias_curves_json(model, lo, hi, samples).map_err(js)
}
